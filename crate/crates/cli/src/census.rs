//! Exhaustive tile / spectral / homogeneous scan over every subset of `Z/p^nZ`.

use serde::Serialize;

use padic_tiles::{is_p_homogeneous, is_spectral_set, is_tile, Error, GroupSubset, ProductGroup, ResidueSet, Result};

/// Largest group order scanned.
pub const MAX_ORDER: u64 = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub size: usize,
    pub subsets: u64,
    pub tiles: u64,
    pub spectral: u64,
    pub homogeneous: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusMismatch {
    pub set: Vec<u64>,
    pub tile: bool,
    pub spectral: bool,
    pub homogeneous: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Census {
    pub group: String,
    pub total_subsets: u64,
    pub scanned: u64,
    pub exhaustive: bool,
    pub rows: Vec<CensusRow>,
    /// No mismatch among the scanned subsets.
    pub equivalent: bool,
    pub mismatches: Vec<CensusMismatch>,
}

impl Census {
    pub fn count(&self, f: impl Fn(&CensusRow) -> u64) -> u64 {
        self.rows.iter().map(f).sum()
    }
}

/// Subsets are visited in mask order; `budget` caps how many are scanned.
/// The empty set counts as none of the three.
pub fn census(p: u32, n: u32, budget: Option<u64>) -> Result<Census> {
    let g = ProductGroup::cyclic(p, n)?;
    let order = g.order();
    if order > MAX_ORDER {
        return Err(Error::TooLarge(format!("2^{order} subsets of {g}")));
    }
    let total = 1u64 << order;
    let limit = budget.map_or(total, |b| b.min(total));
    let mut rows: Vec<CensusRow> = (0..=order as usize)
        .map(|size| CensusRow { size, subsets: 0, tiles: 0, spectral: 0, homogeneous: 0 })
        .collect();
    let mut mismatches = Vec::new();
    for mask in 0..limit {
        let members: Vec<u64> = (0..order).filter(|i| mask >> i & 1 == 1).collect();
        let row = &mut rows[members.len()];
        row.subsets += 1;
        if members.is_empty() {
            continue;
        }
        let a = GroupSubset::from_indices(g, members.iter().map(|&i| i as usize));
        let tile = is_tile(&a)?;
        let spectral = is_spectral_set(&a)?;
        let homogeneous = is_p_homogeneous(&ResidueSet::new(p, n, members.iter().copied())?).branch_levels().is_some();
        row.tiles += tile as u64;
        row.spectral += spectral as u64;
        row.homogeneous += homogeneous as u64;
        if tile != spectral || tile != homogeneous {
            mismatches.push(CensusMismatch { set: members, tile, spectral, homogeneous });
        }
    }
    Ok(Census {
        group: g.to_string(),
        total_subsets: total,
        scanned: limit,
        exhaustive: limit == total,
        rows,
        equivalent: mismatches.is_empty(),
        mismatches,
    })
}
