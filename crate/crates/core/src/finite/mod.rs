//! Finite groups `Z/p^nZ × Z/qZ`: exact Fourier zero sets and the tiling and
//! spectral predicates.
//!
//! Elements are pairs `(a, b)` with `a ∈ [0, p^n)` and `b ∈ [0, q)`; the dual
//! group is identified with the group itself through the pairing
//! `⟨(ξ, η), (x, y)⟩ = ξx/p^n + ηy/q`.

mod classify;
mod search;

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use classify::{classify_tile_pp, classify_tile_pq, PpClassification, PqClassification, TileClassification};
pub use search::{find_spectra, find_spectra_with_budget, find_tiling_complements, find_tiling_complements_with_budget, is_spectral_set, is_tile, SearchOutcome};

use crate::cyclotomic::CyclotomicModulus;
use crate::error::{Error, Result};
use crate::padic::{check_prime, is_prime};
use crate::tree::{checked_power, ResidueSet};

/// `Z/p^nZ × Z/qZ` with `q = 1`, `q = p`, or `q` a prime distinct from `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProductGroup {
    p: u32,
    n: u32,
    q: u32,
}

impl ProductGroup {
    pub fn new(p: u32, n: u32, q: u32) -> Result<Self> {
        check_prime(p)?;
        if n == 0 {
            return Err(Error::InvalidGroup("exponent n must be at least 1".into()));
        }
        if q != 1 && !is_prime(q as u64) {
            return Err(Error::InvalidGroup(format!("cofactor {q} is neither 1 nor a prime")));
        }
        let pn = checked_power(p, n)?;
        if pn * q as u64 > 1 << 24 {
            return Err(Error::TooLarge(format!("group of order {}", pn * q as u64)));
        }
        Ok(ProductGroup { p, n, q })
    }

    pub fn cyclic(p: u32, n: u32) -> Result<Self> {
        ProductGroup::new(p, n, 1)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn pn(&self) -> u64 {
        (self.p as u64).pow(self.n)
    }

    pub fn order(&self) -> u64 {
        self.pn() * self.q as u64
    }

    /// The order of the roots of unity the pairing takes values in.
    pub fn pairing_order(&self) -> u64 {
        self.pn().lcm(&(self.q as u64))
    }

    pub fn index(&self, (a, b): (u64, u64)) -> usize {
        (a + self.pn() * b) as usize
    }

    pub fn element(&self, idx: usize) -> (u64, u64) {
        let pn = self.pn();
        (idx as u64 % pn, idx as u64 / pn)
    }

    pub fn add(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        ((x.0 + y.0) % self.pn(), (x.1 + y.1) % self.q as u64)
    }

    pub fn sub(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        let pn = self.pn();
        let q = self.q as u64;
        ((x.0 + pn - y.0 % pn) % pn, (x.1 + q - y.1 % q) % q)
    }

    /// Exponent `k` with `⟨(ξ, η), (x, y)⟩ = k / L`, `L` the pairing order.
    pub fn pairing(&self, dual: (u64, u64), x: (u64, u64)) -> u64 {
        let l = self.pairing_order() as u128;
        let pn = self.pn() as u128;
        let q = self.q as u128;
        let k = dual.0 as u128 * x.0 as u128 * (l / pn) + dual.1 as u128 * x.1 as u128 * (l / q);
        (k % l) as u64
    }

    /// The first factor `Z/p^nZ` as a group.
    pub fn first_factor(&self) -> ProductGroup {
        ProductGroup { p: self.p, n: self.n, q: 1 }
    }
}

impl fmt::Display for ProductGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 1 {
            write!(f, "Z/{}^{}Z", self.p, self.n)
        } else {
            write!(f, "Z/{}^{}Z x Z/{}Z", self.p, self.n, self.q)
        }
    }
}

thread_local! {
    static MODULI: RefCell<HashMap<u64, Rc<CyclotomicModulus>>> = RefCell::new(HashMap::new());
}

pub(crate) fn modulus_for(order: u64) -> Result<Rc<CyclotomicModulus>> {
    if let Some(m) = MODULI.with(|c| c.borrow().get(&order).cloned()) {
        return Ok(m);
    }
    let m = Rc::new(CyclotomicModulus::new(order)?);
    MODULI.with(|c| c.borrow_mut().insert(order, m.clone()));
    Ok(m)
}

/// A subset of a [`ProductGroup`]; elements sorted by `(a, b)` and distinct.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupSubset {
    group: ProductGroup,
    elements: Vec<(u64, u64)>,
}

impl GroupSubset {
    pub fn new(group: ProductGroup, elements: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let mut v: Vec<(u64, u64)> = elements.into_iter().collect();
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGroup(format!("duplicate element {:?}", w[0])));
        }
        if let Some(e) = v.iter().find(|e| e.0 >= group.pn() || e.1 >= group.q as u64) {
            return Err(Error::InvalidGroup(format!("element {e:?} outside {group}")));
        }
        Ok(GroupSubset { group, elements: v })
    }

    /// A subset of `Z/p^nZ` given by its residues.
    pub fn cyclic(p: u32, n: u32, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        GroupSubset::new(ProductGroup::cyclic(p, n)?, members.into_iter().map(|a| (a, 0)))
    }

    pub fn from_residues(c: &ResidueSet) -> GroupSubset {
        let group = ProductGroup { p: c.p(), n: c.n(), q: 1 };
        GroupSubset { group, elements: c.members().iter().map(|&a| (a, 0)).collect() }
    }

    /// Elements by flat index `a + p^n·b`; duplicates merge.
    pub fn from_indices(group: ProductGroup, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut elements: Vec<(u64, u64)> = idx.into_iter().map(|i| group.element(i)).collect();
        elements.sort_unstable();
        elements.dedup();
        GroupSubset { group, elements }
    }

    pub fn group(&self) -> ProductGroup {
        self.group
    }

    pub fn elements(&self) -> &[(u64, u64)] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: (u64, u64)) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn translate(&self, g: (u64, u64)) -> GroupSubset {
        let mut v: Vec<(u64, u64)> = self.elements.iter().map(|&e| self.group.add(e, g)).collect();
        v.sort_unstable();
        GroupSubset { group: self.group, elements: v }
    }

    /// `A_j = {x : (x, j) ∈ A}` for `j ∈ [0, q)`.
    pub fn slices(&self) -> Vec<ResidueSet> {
        (0..self.group.q as u64)
            .map(|j| {
                let members = self.elements.iter().filter(|e| e.1 == j).map(|e| e.0);
                ResidueSet::new(self.group.p, self.group.n, members).expect("slice members are in range")
            })
            .collect()
    }

    /// `π_1(A)` as a set.
    pub fn projection(&self) -> ResidueSet {
        let s: BTreeSet<u64> = self.elements.iter().map(|e| e.0).collect();
        ResidueSet::new(self.group.p, self.group.n, s).expect("projection members are in range")
    }

    /// The residues when `q = 1`.
    pub fn residues(&self) -> Option<ResidueSet> {
        (self.group.q == 1).then(|| self.projection())
    }
}

impl fmt::Display for GroupSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            if self.group.q == 1 {
                write!(f, "{}", e.0)?;
            } else {
                write!(f, "({}, {})", e.0, e.1)?;
            }
        }
        f.write_str("}")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ElementRepr {
    Bare(u64),
    Pair((u64, u64)),
}

#[derive(Serialize, Deserialize)]
struct GroupSubsetRepr {
    p: u32,
    n: u32,
    #[serde(default = "one")]
    q: u32,
    elements: Vec<ElementRepr>,
}

fn one() -> u32 {
    1
}

impl Serialize for GroupSubset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let elements = self
            .elements
            .iter()
            .map(|&(a, b)| if self.group.q == 1 { ElementRepr::Bare(a) } else { ElementRepr::Pair((a, b)) })
            .collect();
        GroupSubsetRepr { p: self.group.p, n: self.group.n, q: self.group.q, elements }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GroupSubset {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = GroupSubsetRepr::deserialize(deserializer)?;
        let group = ProductGroup::new(r.p, r.n, r.q).map_err(D::Error::custom)?;
        let mut elements = Vec::with_capacity(r.elements.len());
        for e in r.elements {
            match e {
                ElementRepr::Pair(pair) => elements.push(pair),
                ElementRepr::Bare(a) if group.q == 1 => elements.push((a, 0)),
                ElementRepr::Bare(a) => {
                    return Err(D::Error::custom(format!("bare element {a} needs a pair when q = {}", group.q)))
                }
            }
        }
        GroupSubset::new(group, elements).map_err(D::Error::custom)
    }
}

/// `Z_A = {g : 1̂_A(g) = 0}` in the dual group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualZeroSet {
    group: ProductGroup,
    zeros: BTreeSet<(u64, u64)>,
    mask: Vec<bool>,
}

impl DualZeroSet {
    pub fn group(&self) -> ProductGroup {
        self.group
    }

    pub fn zeros(&self) -> &BTreeSet<(u64, u64)> {
        &self.zeros
    }

    pub fn contains(&self, g: (u64, u64)) -> bool {
        self.mask[self.group.index(g)]
    }

    pub(crate) fn contains_index(&self, idx: usize) -> bool {
        self.mask[idx]
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }
}

impl Serialize for DualZeroSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.group.q == 1 {
            serializer.collect_seq(self.zeros.iter().map(|z| z.0))
        } else {
            serializer.collect_seq(self.zeros.iter())
        }
    }
}

/// `1̂_A(ξ, η) = Σ_{(x,y)∈A} e^{2πi(ξx/p^n + ηy/q)}` is zero, tested exactly.
pub(crate) fn is_fourier_zero(a: &GroupSubset, dual: (u64, u64), m: &CyclotomicModulus) -> bool {
    let mut coeffs = vec![0i64; m.order() as usize];
    for &x in &a.elements {
        coeffs[a.group.pairing(dual, x) as usize] += 1;
    }
    m.vanishes_i64(&coeffs)
}

pub fn dft_zero_set(a: &GroupSubset) -> Result<DualZeroSet> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let g = a.group;
    let m = modulus_for(g.pairing_order())?;
    let mut zeros = BTreeSet::new();
    let mut mask = vec![false; g.order() as usize];
    for idx in 0..g.order() as usize {
        let dual = g.element(idx);
        if is_fourier_zero(a, dual, &m) {
            zeros.insert(dual);
            mask[idx] = true;
        }
    }
    Ok(DualZeroSet { group: g, zeros, mask })
}

/// Every element is `a + t` for exactly one `(a, t) ∈ A × T`.
pub fn is_tiling_pair(a: &GroupSubset, t: &GroupSubset) -> Result<bool> {
    if a.group != t.group {
        return Err(Error::GroupMismatch);
    }
    let g = a.group;
    if (a.len() as u64) * (t.len() as u64) != g.order() {
        return Ok(false);
    }
    let mut covered = vec![false; g.order() as usize];
    for &x in &a.elements {
        for &s in &t.elements {
            let idx = g.index(g.add(x, s));
            if covered[idx] {
                return Ok(false);
            }
            covered[idx] = true;
        }
    }
    Ok(true)
}

/// `#L = #A` and every difference of distinct members of `L` lies in `Z_A`.
pub fn is_spectral_pair(a: &GroupSubset, l: &GroupSubset) -> Result<bool> {
    if a.group != l.group {
        return Err(Error::GroupMismatch);
    }
    if l.len() != a.len() {
        return Ok(false);
    }
    let z = dft_zero_set(a)?;
    for (i, &x) in l.elements.iter().enumerate() {
        for &y in &l.elements[i + 1..] {
            if !z.contains(a.group.sub(x, y)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
