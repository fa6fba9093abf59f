use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::compact::{CompactOpenSet, Normalization};
use super::measure::{convolve_window, is_function_tiling, DiscreteMeasure};
use crate::error::{Error, Result};
use crate::finite::{classify_tile_pp, classify_tile_pq, GroupSubset, ProductGroup, TileClassification};
use crate::padic::{Ball, PAdicScalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum QpZ2Case {
    /// `Ω_0 ∩ Ω_1` is null and `Ω_0 ∪ Ω_1` tiles `Q_p` with `complement`.
    UnionTile { union: CompactOpenSet, complement: DiscreteMeasure },
    /// `Ω_0` and `Ω_1` both tile `Q_p` with `complement`.
    CommonComplement { complement: DiscreteMeasure },
    /// `Ω_0 ⊔ (Ω_1 + shift)` tiles `Q_2` with `complement`.
    ShiftCase { j0: u32, shift: PAdicScalar, shifted: CompactOpenSet, union: CompactOpenSet, complement: DiscreteMeasure },
}

impl QpZ2Case {
    pub fn name(&self) -> &'static str {
        match self {
            QpZ2Case::UnionTile { .. } => "union_tile",
            QpZ2Case::CommonComplement { .. } => "common_complement",
            QpZ2Case::ShiftCase { .. } => "shift_case",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QpZ2Classification {
    pub p: u32,
    /// `Ω_j = c_0 + p^{-R}(C_j + p^n Z_p)`.
    pub normalization: Normalization,
    /// Classification of `C_0 × {0} ∪ C_1 × {1}` in `Z/p^nZ × Z/2Z`.
    pub finite: TileClassification,
    pub case: QpZ2Case,
}

fn one() -> BigRational {
    BigRational::one()
}

/// `Σ_j 1_{Ω_j} * μ_{T_{j+k}} = 1` on the window for `k = 0, 1`.
fn verify_pair(omega: &[CompactOpenSet; 2], t: &[&DiscreteMeasure; 2], window: &Ball) -> Result<bool> {
    for k in 0..2 {
        let mut total: BTreeMap<Ball, BigRational> = BTreeMap::new();
        for j in 0..2 {
            for (cell, v) in convolve_window(&omega[j].indicator(), t[(j + k) % 2], window)? {
                *total.entry(cell).or_default() += v;
            }
        }
        if !total.values().all(|v| *v == one()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Classifies a tile `Ω = Ω_0 × {0} ⊔ Ω_1 × {1}` of `Q_p × Z/2Z` given with a windowed
/// complement `T = T_0 × {0} ⊔ T_1 × {1}`. The pair is checked on the window first;
/// the structure comes from the finite reduction and every witness is lifted back
/// and re-checked by windowed convolution.
pub fn classify_qp_z2(
    omega0: &CompactOpenSet,
    omega1: &CompactOpenSet,
    t0: &DiscreteMeasure,
    t1: &DiscreteMeasure,
) -> Result<QpZ2Classification> {
    let p = omega0.p();
    for q in [omega1.p(), t0.p(), t1.p()] {
        if q != p {
            return Err(Error::PrimeMismatch(p, q));
        }
    }
    if t0.window() != t1.window() {
        return Err(Error::WindowInsufficient("T_0 and T_1 must share a window".into()));
    }
    let window = t0.window().clone();
    if t0.window_exp_at_zero().is_none() {
        return Err(Error::WindowInsufficient("the window must be centred at 0".into()));
    }
    if !t0.is_unit_weight() || !t1.is_unit_weight() {
        return Err(Error::Precondition("translation sets carry unit weights".into()));
    }
    let gamma = omega0.gamma().max(omega1.gamma());
    let omega = [omega0.refine(gamma)?, omega1.refine(gamma)?];
    if !verify_pair(&omega, &[t0, t1], &window)? {
        return Err(Error::NotATile("(Ω, T) does not tile Q_p × Z/2Z on the window".into()));
    }

    let norm = CompactOpenSet::normalize_joint(&omega)?;
    let n = norm.n();
    let g = ProductGroup::new(p, n, 2)?;
    let a = GroupSubset::new(
        g,
        norm.residues[0]
            .members()
            .iter()
            .map(|&x| (x, 0))
            .chain(norm.residues[1].members().iter().map(|&x| (x, 1))),
    )?;
    let finite = if p == 2 { classify_tile_pp(&a).map(|c| c.tile) } else { classify_tile_pq(&a).map(|c| c.tile) };
    let finite = finite.map_err(|e| match e {
        Error::NotATile(m) => Error::TheoremViolation(format!("windowed tiling reduced to a non-tile: {m}")),
        other => other,
    })?;

    let case = match &finite {
        TileClassification::DisjointUnion { complement, .. } => {
            let union = omega[0].union(&omega[1])?;
            let complement = norm.lift_complement(complement, &window)?;
            ensure(is_function_tiling(&union.indicator(), &complement, &one(), &window)?, "union complement")?;
            QpZ2Case::UnionTile { union, complement }
        }
        TileClassification::CommonComplement { complement, .. } => {
            let t = complement
                .as_ref()
                .ok_or_else(|| Error::TheoremViolation("no common complement for the slices".into()))?;
            let complement = norm.lift_complement(t, &window)?;
            for o in &omega {
                ensure(is_function_tiling(&o.indicator(), &complement, &one(), &window)?, "common complement")?;
            }
            QpZ2Case::CommonComplement { complement }
        }
        TileClassification::Shift { j0, b0, complement, .. } => {
            let shift = PAdicScalar::power_unchecked(p, n as i64 - *j0 as i64 - 1 - norm.shift)
                .mul_int(&BigInt::from(*b0));
            let shifted = omega[1].translate(&shift)?;
            ensure(omega[0].is_disjoint(&shifted)?, "shifted slices overlap")?;
            let union = omega[0].union(&shifted)?;
            let complement = norm.lift_complement(complement, &window)?;
            ensure(is_function_tiling(&union.indicator(), &complement, &one(), &window)?, "shifted union complement")?;
            QpZ2Case::ShiftCase { j0: *j0, shift, shifted, union, complement }
        }
    };
    Ok(QpZ2Classification { p, normalization: norm, finite, case })
}

fn ensure(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::TheoremViolation(format!("lifted witness fails: {what}")))
    }
}
