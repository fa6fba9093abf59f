//! Structure of tiles in `Z/p^nZ × Z/qZ` (`q ≠ p`) and `Z/p^nZ × Z/pZ`.
//!
//! Every classification carries witnesses that are re-checked before being
//! returned; a witness that fails is reported as a theorem violation, which
//! can only mean a bug here.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{dft_zero_set, find_tiling_complements, is_tile, is_tiling_pair, GroupSubset, ProductGroup};
use crate::error::{Error, Result};
use crate::tree::{is_p_homogeneous, BranchLevelSet, ResidueSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum TileClassification {
    /// Slices are pairwise disjoint and their union tiles `Z/p^nZ`.
    DisjointUnion { union: ResidueSet, branch_levels: BranchLevelSet, complement: ResidueSet },
    /// Every nonempty slice is `p`-homogeneous; `branch_levels` is set when they
    /// share one branch level set, `complement` when a common complement exists.
    CommonComplement {
        slices: Vec<ResidueSet>,
        branch_levels: Option<BranchLevelSet>,
        complement: Option<ResidueSet>,
    },
    /// `Ã = {x + b_0·y·p^{n-j_0-1}}` is `p`-homogeneous.
    Shift { j0: u32, b0: u64, shifted: ResidueSet, branch_levels: BranchLevelSet, complement: ResidueSet },
}

impl TileClassification {
    pub fn case_name(&self) -> &'static str {
        match self {
            TileClassification::DisjointUnion { .. } => "disjoint_union",
            TileClassification::CommonComplement { .. } => "common_complement",
            TileClassification::Shift { .. } => "shift",
        }
    }

    /// Re-checks every witness through the public checkers.
    pub fn reverify(&self) -> Result<bool> {
        Ok(match self {
            TileClassification::DisjointUnion { union, branch_levels, complement } => {
                has_branch_levels(union, branch_levels) && tiles_with(union, complement)?
            }
            TileClassification::CommonComplement { slices, branch_levels, complement } => {
                let mut ok = true;
                for s in slices.iter().filter(|s| !s.is_empty()) {
                    let h = is_p_homogeneous(s);
                    ok &= match branch_levels {
                        Some(b) => h.branch_levels() == Some(b),
                        None => h.branch_levels().is_some(),
                    };
                    if let Some(t) = complement {
                        ok &= tiles_with(s, t)?;
                    }
                }
                ok
            }
            TileClassification::Shift { shifted, branch_levels, complement, .. } => {
                has_branch_levels(shifted, branch_levels) && tiles_with(shifted, complement)?
            }
        })
    }
}

fn has_branch_levels(c: &ResidueSet, b: &BranchLevelSet) -> bool {
    is_p_homogeneous(c).branch_levels() == Some(b)
}

fn tiles_with(c: &ResidueSet, t: &ResidueSet) -> Result<bool> {
    is_tiling_pair(&GroupSubset::from_residues(c), &GroupSubset::from_residues(t))
}

fn power_exponent(mut k: u64, p: u64) -> Option<u32> {
    let mut t = 0;
    while k % p == 0 {
        k /= p;
        t += 1;
    }
    (k == 1).then_some(t)
}

/// Branch levels of a homogeneous `c` and the complement `T_J`, verified.
fn homogeneous_with_complement(c: &ResidueSet, what: &str) -> Result<(BranchLevelSet, ResidueSet)> {
    let h = is_p_homogeneous(c);
    let b = h
        .branch_levels()
        .cloned()
        .ok_or_else(|| Error::TheoremViolation(format!("{what} {c:?} is not p-homogeneous: {h:?}")))?;
    let t = b.complement().canonical_set(c.p())?;
    if !tiles_with(c, &t)? {
        return Err(Error::TheoremViolation(format!("T_J fails to tile {what}")));
    }
    Ok((b, t))
}

fn require_tile(a: &GroupSubset) -> Result<()> {
    if is_tile(a)? {
        Ok(())
    } else {
        Err(Error::NotATile(format!("{a} has no tiling complement in {}", a.group())))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PqClassification {
    /// `#A = p^t` or `p^t·q`.
    pub t: u32,
    pub has_q_factor: bool,
    pub tile: TileClassification,
}

pub fn classify_tile_pq(a: &GroupSubset) -> Result<PqClassification> {
    let g = a.group();
    if g.q() == 1 || g.q() == g.p() {
        return Err(Error::InvalidGroup(format!("{g}: need a cofactor prime distinct from p")));
    }
    require_tile(a)?;
    let p = g.p() as u64;
    let size = a.len() as u64;
    if let Some(t) = power_exponent(size, p) {
        let slices = a.slices();
        let union = a.projection();
        if slices.iter().map(ResidueSet::len).sum::<usize>() != union.len() {
            return Err(Error::TheoremViolation(format!("slices of {a} overlap")));
        }
        let (branch_levels, complement) = homogeneous_with_complement(&union, "union of slices")?;
        return Ok(PqClassification {
            t,
            has_q_factor: false,
            tile: TileClassification::DisjointUnion { union, branch_levels, complement },
        });
    }
    if size % g.q() as u64 == 0 {
        if let Some(t) = power_exponent(size / g.q() as u64, p) {
            let slices = a.slices();
            let (first, complement) = homogeneous_with_complement(&slices[0], "slice 0")?;
            for (j, s) in slices.iter().enumerate().skip(1) {
                if is_p_homogeneous(s).branch_levels() != Some(&first) {
                    return Err(Error::TheoremViolation(format!("slice {j} does not share branch levels")));
                }
            }
            let tile = TileClassification::CommonComplement {
                slices,
                branch_levels: Some(first),
                complement: Some(complement),
            };
            if !tile.reverify()? {
                return Err(Error::TheoremViolation("common complement fails".into()));
            }
            return Ok(PqClassification { t, has_q_factor: true, tile });
        }
    }
    Err(Error::TheoremViolation(format!("tile of size {size} is neither p^t nor p^t*q")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PpClassification {
    /// `#A = p^t`.
    pub t: u32,
    /// `I_A = {i < n : (p^i, 0) ∈ Z_A}`.
    pub zero_levels: BTreeSet<u32>,
    pub tile: TileClassification,
}

/// Common complement of the slices: `T_J` when they share branch levels,
/// otherwise the first complement every slice admits.
fn common_complement(slices: &[ResidueSet]) -> Result<(Option<BranchLevelSet>, Option<ResidueSet>)> {
    let levels: BTreeSet<BranchLevelSet> =
        slices.iter().filter_map(|s| is_p_homogeneous(s).branch_levels().cloned()).collect();
    if levels.len() == 1 {
        let b = levels.into_iter().next().expect("one element");
        let t = b.complement().canonical_set(slices[0].p())?;
        return Ok((Some(b), Some(t)));
    }
    let mut shared: Option<BTreeSet<GroupSubset>> = None;
    for s in slices {
        let found: BTreeSet<GroupSubset> =
            find_tiling_complements(&GroupSubset::from_residues(s))?.sets.into_iter().collect();
        shared = Some(match shared {
            None => found,
            Some(prev) => prev.intersection(&found).cloned().collect(),
        });
    }
    let t = shared.and_then(|s| s.into_iter().next()).and_then(|t| t.residues());
    Ok((None, t))
}

pub fn classify_tile_pp(a: &GroupSubset) -> Result<PpClassification> {
    let g: ProductGroup = a.group();
    if g.q() != g.p() {
        return Err(Error::InvalidGroup(format!("{g}: need q = p")));
    }
    require_tile(a)?;
    let p = g.p() as u64;
    let n = g.n();
    let t = power_exponent(a.len() as u64, p)
        .ok_or_else(|| Error::TheoremViolation(format!("tile of size {} is not a power of p", a.len())))?;
    let zeros = dft_zero_set(a)?;
    let zero_levels: BTreeSet<u32> = (0..n).filter(|&i| zeros.contains((p.pow(i), 0))).collect();
    let k = zero_levels.len() as u32;

    let tile = if k == t {
        let union = a.projection();
        if union.len() != a.len() {
            return Err(Error::TheoremViolation("projection is not injective".into()));
        }
        let (branch_levels, complement) = homogeneous_with_complement(&union, "projection")?;
        TileClassification::DisjointUnion { union, branch_levels, complement }
    } else if k + 1 == t {
        let shift = (0..n)
            .filter(|j| !zero_levels.contains(j))
            .find_map(|j| (1..p).find(|&b| zeros.contains((p.pow(j), b))).map(|b| (j, b)));
        match shift {
            Some((j0, b0)) => {
                let step = p.pow(n - j0 - 1);
                let members: BTreeSet<u64> =
                    a.elements().iter().map(|&(x, y)| (x + b0 * y * step) % g.pn()).collect();
                if members.len() != a.len() {
                    return Err(Error::TheoremViolation("shifted set collapses".into()));
                }
                let shifted = ResidueSet::new(g.p(), n, members)?;
                let (branch_levels, complement) = homogeneous_with_complement(&shifted, "shifted set")?;
                TileClassification::Shift { j0, b0, shifted, branch_levels, complement }
            }
            None => {
                let slices = a.slices();
                let expected = p.pow(t - 1) as usize;
                for (j, s) in slices.iter().enumerate() {
                    if s.len() != expected || is_p_homogeneous(s).branch_levels().is_none() {
                        return Err(Error::TheoremViolation(format!(
                            "slice {j} is not p-homogeneous of size {expected}"
                        )));
                    }
                }
                let (branch_levels, complement) = common_complement(&slices)?;
                TileClassification::CommonComplement { slices, branch_levels, complement }
            }
        }
    } else {
        return Err(Error::TheoremViolation(format!("#I_A = {k} with t = {t}")));
    };
    if !tile.reverify()? {
        return Err(Error::TheoremViolation(format!("witness for case {} fails", tile.case_name())));
    }
    Ok(PpClassification { t, zero_levels, tile })
}
