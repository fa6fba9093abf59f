//! Residue trees `T_C` and `p`-homogeneity.
//!
//! Levels follow the digit convention: the vertices at level `γ` are the
//! residues `C mod p^γ`, and a vertex branches at level `γ` when its children
//! differ in digit `t_γ`. Zero exponents `j ∈ [1, n]` of the character sums
//! correspond to branch level `j - 1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cyclotomic::CyclotomicModulus;
use crate::error::{Error, Result};
use crate::padic::check_prime;

pub(crate) fn checked_power(p: u32, n: u32) -> Result<u64> {
    (p as u64)
        .checked_pow(n)
        .filter(|&m| m <= 1 << 40)
        .ok_or_else(|| Error::TooLarge(format!("{p}^{n}")))
}

/// A subset of `Z/p^nZ`, members sorted and distinct.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "ResidueSetRepr")]
pub struct ResidueSet {
    p: u32,
    n: u32,
    members: Vec<u64>,
}

#[derive(Deserialize)]
struct ResidueSetRepr {
    p: u32,
    n: u32,
    members: Vec<u64>,
}

impl TryFrom<ResidueSetRepr> for ResidueSet {
    type Error = Error;

    fn try_from(r: ResidueSetRepr) -> Result<Self> {
        ResidueSet::new(r.p, r.n, r.members)
    }
}

impl ResidueSet {
    /// Rejects duplicates and out-of-range members; input order is irrelevant.
    pub fn new(p: u32, n: u32, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        check_prime(p)?;
        if n == 0 {
            return Err(Error::InvalidResidueSet("level n must be at least 1".into()));
        }
        let modulus = checked_power(p, n)?;
        let mut v: Vec<u64> = members.into_iter().collect();
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidResidueSet(format!("duplicate member {}", w[0])));
        }
        if let Some(&m) = v.iter().find(|&&m| m >= modulus) {
            return Err(Error::InvalidResidueSet(format!("member {m} not below {p}^{n}")));
        }
        Ok(ResidueSet { p, n, members: v })
    }

    /// All of `Z/p^nZ`.
    pub fn full(p: u32, n: u32) -> Result<Self> {
        let m = checked_power(p, n)?;
        ResidueSet::new(p, n, 0..m)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        (self.p as u64).pow(self.n)
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    /// `C + g mod p^n`.
    pub fn translate(&self, g: u64) -> ResidueSet {
        let m = self.modulus();
        let mut v: Vec<u64> = self.members.iter().map(|&c| (c + g % m) % m).collect();
        v.sort_unstable();
        ResidueSet { p: self.p, n: self.n, members: v }
    }
}

/// A residue multiset: member → multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueMultiset {
    p: u32,
    n: u32,
    weights: BTreeMap<u64, u64>,
}

impl ResidueMultiset {
    pub fn new(p: u32, n: u32, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        check_prime(p)?;
        let modulus = checked_power(p, n)?;
        let mut weights = BTreeMap::new();
        for m in members {
            if m >= modulus {
                return Err(Error::InvalidResidueSet(format!("member {m} not below {p}^{n}")));
            }
            *weights.entry(m).or_insert(0) += 1;
        }
        Ok(ResidueMultiset { p, n, weights })
    }

    pub fn total(&self) -> u64 {
        self.weights.values().sum()
    }

    pub fn weights(&self) -> &BTreeMap<u64, u64> {
        &self.weights
    }

    /// The underlying set if every multiplicity is one.
    pub fn as_set(&self) -> Option<ResidueSet> {
        self.weights.values().all(|&w| w == 1).then(|| ResidueSet {
            p: self.p,
            n: self.n,
            members: self.weights.keys().copied().collect(),
        })
    }
}

impl From<&ResidueSet> for ResidueMultiset {
    fn from(c: &ResidueSet) -> Self {
        ResidueMultiset { p: c.p, n: c.n, weights: c.members.iter().map(|&m| (m, 1)).collect() }
    }
}

/// The tree `T_C`: `levels[γ]` is the sorted set `C mod p^γ`, `γ = 0..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelTree {
    p: u32,
    n: u32,
    levels: Vec<Vec<u64>>,
}

impl LevelTree {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn depth(&self) -> u32 {
        self.n
    }

    pub fn levels(&self) -> &[Vec<u64>] {
        &self.levels
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    /// Children of vertex `v` (a residue mod `p^γ`) at level `γ + 1`.
    pub fn children(&self, level: u32, v: u64) -> Vec<u64> {
        let m = (self.p as u64).pow(level);
        self.levels[level as usize + 1].iter().copied().filter(|c| c % m == v).collect()
    }

    /// Parent/child pairs `((γ, v), (γ + 1, w))`.
    pub fn edges(&self) -> Vec<((u32, u64), (u32, u64))> {
        let mut out = Vec::new();
        for g in 0..self.n {
            let m = (self.p as u64).pow(g);
            for &w in &self.levels[g as usize + 1] {
                out.push(((g, w % m), (g + 1, w)));
            }
        }
        out
    }
}

pub fn build_tree(c: &ResidueSet) -> Result<LevelTree> {
    if c.is_empty() {
        return Err(Error::EmptySet);
    }
    let levels = (0..=c.n)
        .map(|g| {
            let m = (c.p as u64).pow(g);
            let s: BTreeSet<u64> = c.members.iter().map(|x| x % m).collect();
            s.into_iter().collect()
        })
        .collect();
    Ok(LevelTree { p: c.p, n: c.n, levels })
}

/// For each level `γ < n`, child count → number of level-`γ` vertices with it.
pub fn branching_profile(t: &LevelTree) -> Vec<BTreeMap<u64, usize>> {
    (0..t.n)
        .map(|g| {
            let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
            let m = (t.p as u64).pow(g);
            for &w in &t.levels[g as usize + 1] {
                *counts.entry(w % m).or_insert(0) += 1;
            }
            let mut profile = BTreeMap::new();
            for c in counts.values() {
                *profile.entry(*c).or_insert(0) += 1;
            }
            profile
        })
        .collect()
}

/// The branch levels `I ⊆ {0, ..., n-1}`; `J` is the complement.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BranchLevelSet {
    n: u32,
    levels: BTreeSet<u32>,
}

impl BranchLevelSet {
    pub fn new(n: u32, levels: impl IntoIterator<Item = u32>) -> Result<Self> {
        let levels: BTreeSet<u32> = levels.into_iter().collect();
        if let Some(&l) = levels.iter().find(|&&l| l >= n) {
            return Err(Error::Precondition(format!("branch level {l} outside 0..{n}")));
        }
        Ok(BranchLevelSet { n, levels })
    }

    pub fn depth(&self) -> u32 {
        self.n
    }

    pub fn levels(&self) -> &BTreeSet<u32> {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn contains(&self, level: u32) -> bool {
        self.levels.contains(&level)
    }

    /// The single-branch levels `J`.
    pub fn complement(&self) -> BranchLevelSet {
        BranchLevelSet { n: self.n, levels: (0..self.n).filter(|l| !self.levels.contains(l)).collect() }
    }

    /// `{Σ_{i∈I} s_i p^i : s_i ∈ [0, p)}`, the canonical homogeneous set with these branch levels.
    pub fn canonical_set(&self, p: u32) -> Result<ResidueSet> {
        let mut members = vec![0u64];
        for &i in &self.levels {
            let step = (p as u64).pow(i);
            members = members.iter().flat_map(|&m| (0..p as u64).map(move |s| m + s * step)).collect();
        }
        ResidueSet::new(p, self.n, members)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Homogeneity {
    Homogeneous { branch_levels: BranchLevelSet },
    /// First level whose vertices do not all have `p` children or all have one;
    /// `vertex` is the first vertex there whose count breaks the pattern.
    Inhomogeneous { level: u32, vertex: u64, children: u64 },
    Empty,
}

impl Homogeneity {
    pub fn branch_levels(&self) -> Option<&BranchLevelSet> {
        match self {
            Homogeneity::Homogeneous { branch_levels } => Some(branch_levels),
            _ => None,
        }
    }
}

pub fn is_p_homogeneous(c: &ResidueSet) -> Homogeneity {
    let Ok(t) = build_tree(c) else {
        return Homogeneity::Empty;
    };
    let p = c.p as u64;
    let mut branch = BTreeSet::new();
    for g in 0..t.n {
        let m = p.pow(g);
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for &w in &t.levels[g as usize + 1] {
            *counts.entry(w % m).or_insert(0) += 1;
        }
        let first = *counts.values().next().expect("tree levels are nonempty");
        let uniform = counts.values().all(|&k| k == first);
        if !uniform || (first != 1 && first != p) {
            let (&vertex, &children) = if uniform {
                counts.iter().next().expect("nonempty")
            } else {
                counts.iter().find(|(_, &k)| k != first).expect("a vertex breaks uniformity")
            };
            return Homogeneity::Inhomogeneous { level: g, vertex, children };
        }
        if first == p {
            branch.insert(g);
        }
    }
    Homogeneity::Homogeneous { branch_levels: BranchLevelSet { n: c.n, levels: branch } }
}

/// Derives the branch levels from vanishing character sums
/// `Σ_{c∈C} e^{2πi c / p^j} = 0` for `j` in `exponents ⊆ [1, n]`.
pub fn homogeneity_from_zeros(c: &ResidueMultiset, exponents: &BTreeSet<u32>) -> Result<BranchLevelSet> {
    if let Some(&j) = exponents.iter().find(|&&j| j == 0 || j > c.n) {
        return Err(Error::Precondition(format!("exponent {j} outside [1, {}]", c.n)));
    }
    let k = exponents.len() as u32;
    let bound = checked_power(c.p, k)?;
    if c.total() > bound {
        return Err(Error::Precondition(format!("#C = {} exceeds {}^{k}", c.total(), c.p)));
    }
    for &j in exponents {
        let order = checked_power(c.p, j)?;
        let mut coeffs = vec![0i64; order as usize];
        for (&x, &w) in &c.weights {
            coeffs[(x % order) as usize] += w as i64;
        }
        if !CyclotomicModulus::new(order)?.vanishes_i64(&coeffs) {
            return Err(Error::Precondition(format!("character sum at exponent {j} does not vanish")));
        }
    }
    if c.total() != bound {
        return Err(Error::TheoremViolation(format!("#C = {} but expected {}^{k}", c.total(), c.p)));
    }
    let set = c
        .as_set()
        .ok_or_else(|| Error::TheoremViolation("vanishing sums forced a repeated residue".into()))?;
    let levels = BranchLevelSet { n: c.n, levels: exponents.iter().map(|j| j - 1).collect() };
    match is_p_homogeneous(&set) {
        Homogeneity::Homogeneous { branch_levels } if branch_levels == levels => Ok(levels),
        other => Err(Error::TheoremViolation(format!(
            "zeros give branch levels {:?} but the tree says {other:?}",
            levels.levels
        ))),
    }
}

/// Zero exponents `j ∈ [1, n]` with `Σ_{c∈C} e^{2πi c/p^j} = 0`.
pub fn zero_exponents(c: &ResidueSet) -> Result<BTreeSet<u32>> {
    let mut out = BTreeSet::new();
    for j in 1..=c.n {
        let order = checked_power(c.p, j)?;
        let mut coeffs = vec![0i64; order as usize];
        for &x in &c.members {
            coeffs[(x % order) as usize] += 1;
        }
        if CyclotomicModulus::new(order)?.vanishes_i64(&coeffs) {
            out.insert(j);
        }
    }
    Ok(out)
}

/// Digits `t_0 t_1 ... t_{γ-1}` of `v`, comma-separated when `p > 10`.
pub fn digit_label(p: u32, level: u32, v: u64) -> String {
    let mut x = v;
    let digits: Vec<String> = (0..level)
        .map(|_| {
            let d = x % p as u64;
            x /= p as u64;
            d.to_string()
        })
        .collect();
    if digits.is_empty() {
        "root".into()
    } else if p > 10 {
        digits.join(",")
    } else {
        digits.concat()
    }
}

pub fn tree_to_dot(t: &LevelTree, annotate: Option<&BranchLevelSet>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph T_C {{");
    let _ = writeln!(out, "  // p = {}, depth = {}", t.p, t.n);
    if let Some(b) = annotate {
        let _ = writeln!(out, "  // I = {:?}, J = {:?}", b.levels, b.complement().levels);
    }
    let _ = writeln!(out, "  node [shape=circle, fontsize=10];");
    for (g, level) in t.levels.iter().enumerate() {
        let branching = annotate.is_some_and(|b| b.contains(g as u32));
        for &v in level {
            let style = if branching { ", style=filled, fillcolor=lightblue" } else { "" };
            let _ = writeln!(
                out,
                "  L{g}_{v} [label=\"{}\"{style}];",
                digit_label(t.p, g as u32, v)
            );
        }
    }
    for ((g, v), (h, w)) in t.edges() {
        let _ = writeln!(out, "  L{g}_{v} -> L{h}_{w};");
    }
    out.push_str("}\n");
    out
}

/// Every `p`-homogeneous subset of `Z/p^nZ`, built level by level; errors
/// once more than `limit` sets would be produced.
pub fn enumerate_homogeneous(p: u32, n: u32, limit: usize) -> Result<Vec<ResidueSet>> {
    checked_power(p, n)?;
    let mut out = Vec::new();
    // Each partial set holds residues mod p^g.
    let mut frontier: Vec<Vec<u64>> = vec![vec![0]];
    for g in 0..n {
        let step = (p as u64).pow(g);
        let mut next = Vec::new();
        for partial in &frontier {
            // Branch fully.
            next.push(
                partial
                    .iter()
                    .flat_map(|&v| (0..p as u64).map(move |s| v + s * step))
                    .collect::<Vec<u64>>(),
            );
            // Choose one digit per vertex.
            let k = partial.len() as u32;
            let choices = (p as u64)
                .checked_pow(k)
                .filter(|&c| c as usize <= limit)
                .ok_or_else(|| Error::TooLarge(format!("homogeneous sets of Z/{p}^{n}Z")))?;
            for code in 0..choices {
                let mut c = code;
                let child: Vec<u64> = partial
                    .iter()
                    .map(|&v| {
                        let d = c % p as u64;
                        c /= p as u64;
                        v + d * step
                    })
                    .collect();
                next.push(child);
            }
            if next.len() > limit {
                return Err(Error::TooLarge(format!("homogeneous sets of Z/{p}^{n}Z")));
            }
        }
        frontier = next;
    }
    for members in frontier {
        out.push(ResidueSet::new(p, n, members)?);
    }
    out.sort();
    Ok(out)
}
