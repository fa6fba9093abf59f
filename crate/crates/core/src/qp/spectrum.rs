use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::compact::CompactOpenSet;
use super::measure::{is_function_tiling, DiscreteMeasure};
use super::CELL_LIMIT;
use crate::cyclotomic::weighted_phases_vanish;
use crate::error::{Error, Result};
use crate::finite::{classify_tile_pp, GroupSubset, ProductGroup, TileClassification};
use crate::padic::{admissible_orders, ball_character_integral, Ball, BallIntegral, PAdicScalar, UnitPhase};
use crate::tree::ResidueSet;

/// `Λ = B + L` where `L` is every point whose digits sit at positions
/// `tail_min..=tail_max` (truncated at `-m`). Second components live in `Z/2Z`
/// and are all zero for subsets of `Q_p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectrumDescription {
    pub p: u32,
    pub base: Vec<(PAdicScalar, u32)>,
    pub tail_min: i64,
    pub tail_max: i64,
    pub product: bool,
}

impl SpectrumDescription {
    fn tail(&self) -> Result<Vec<PAdicScalar>> {
        let depth = (self.tail_max - self.tail_min + 1).max(0) as u32;
        let count = (self.p as u128).checked_pow(depth).unwrap_or(u128::MAX);
        if count > CELL_LIMIT as u128 {
            return Err(Error::TooLarge(format!("{count} tail points")));
        }
        Ok((0..count as u64)
            .map(|j| PAdicScalar::normalized(self.p, BigInt::from(j), 0).mul_prime_power(self.tail_min))
            .collect())
    }

    /// `Λ_m`, sorted and deduplicated.
    pub fn points(&self) -> Result<Vec<(PAdicScalar, u32)>> {
        let tail = self.tail()?;
        let set: BTreeSet<(PAdicScalar, u32)> = self
            .base
            .iter()
            .flat_map(|(b, y)| tail.iter().map(move |t| (b + t, *y)))
            .collect();
        Ok(set.into_iter().collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectrumCheck {
    pub description: SpectrumDescription,
    pub truncation: i64,
    pub points: usize,
    pub expected_points: usize,
    pub orthogonal: bool,
    /// A difference `λ - λ'` whose inner product is nonzero.
    pub failing_difference: Option<(PAdicScalar, u32)>,
    pub orders: BTreeSet<i64>,
    pub expected_orders: Option<BTreeSet<i64>>,
    pub pass: bool,
}

/// Balls of `Ω` tagged with their second component.
type TaggedBalls = Vec<(Ball, u32)>;

fn differences(points: &[(PAdicScalar, u32)]) -> HashSet<(PAdicScalar, u32)> {
    let mut out = HashSet::new();
    for (x, a) in points {
        for (y, b) in points {
            out.insert((x - y, (a + 2 - b) % 2));
        }
    }
    out
}

/// `⟨e_λ, e_λ'⟩ = Σ_{(B, y)} ∫_B χ(d x) dx · e^{πi η y}` with `(d, η) = λ - λ'`.
fn inner_product_vanishes(balls: &TaggedBalls, d: &PAdicScalar, eta: u32) -> Result<bool> {
    // Equal radii: every integral is zero as soon as one is.
    if let Some((first, _)) = balls.first() {
        if balls.iter().all(|(b, _)| b.radius_exp() == first.radius_exp())
            && ball_character_integral(first, d)? == BallIntegral::Zero
        {
            return Ok(true);
        }
    }
    let mut terms = Vec::new();
    for (ball, y) in balls {
        if let BallIntegral::Term { phase, magnitude } = ball_character_integral(ball, d)? {
            let twist = UnitPhase::from_ratio((eta * y) as i64, 2);
            terms.push((&phase + &twist, magnitude));
        }
    }
    weighted_phases_vanish(&terms)
}

fn check(
    desc: SpectrumDescription,
    balls: &TaggedBalls,
    truncation: i64,
    expected_points: usize,
    expected_orders: Option<BTreeSet<i64>>,
) -> Result<SpectrumCheck> {
    let points = desc.points()?;
    let base: Vec<(PAdicScalar, u32)> = desc.base.clone();
    let tail: Vec<(PAdicScalar, u32)> = desc.tail()?.into_iter().map(|t| (t, 0)).collect();
    // The differences of B + L are exactly D(B) + D(L).
    let db = differences(&base);
    let dl: Vec<PAdicScalar> = differences(&tail).into_iter().map(|(d, _)| d).collect();
    let mut diffs: BTreeSet<(PAdicScalar, u32)> = BTreeSet::new();
    for (b, eta) in &db {
        for l in &dl {
            diffs.insert((b + l, *eta));
        }
    }
    let mut failing = None;
    let mut orders = BTreeSet::new();
    for (d, eta) in &diffs {
        if d.is_zero() && *eta == 0 {
            continue;
        }
        if let Some(v) = d.valuation().finite() {
            orders.insert(v);
        }
        if failing.is_none() && !inner_product_vanishes(balls, d, *eta)? {
            failing = Some((d.clone(), *eta));
        }
    }
    let orthogonal = failing.is_none();
    let complete = points.len() == expected_points && points.len() == base.len() * tail.len();
    let orders_ok = expected_orders.as_ref().is_none_or(|e| *e == orders);
    Ok(SpectrumCheck {
        description: desc,
        truncation,
        points: points.len(),
        expected_points,
        orthogonal,
        failing_difference: failing,
        orders,
        expected_orders,
        pass: orthogonal && complete && orders_ok,
    })
}

fn expected_count(residues: usize, p: u32, depth: i64) -> Result<usize> {
    (p as usize)
        .checked_pow(depth as u32)
        .and_then(|k| k.checked_mul(residues))
        .ok_or_else(|| Error::TooLarge("spectrum truncation".into()))
}

/// `Λ = {Σ_{k ∈ K} s_k p^{-k-1}} + L` for a `p`-homogeneous `Ω` with branch positions `K`,
/// where `L` holds every point with digits only below position `-γ`; checked on `Λ_m = Λ ∩ B(0, p^m)`.
pub fn spectrum_for_homogeneous(omega: &CompactOpenSet, m: i64) -> Result<SpectrumCheck> {
    let k = omega.branch_positions()?.ok_or_else(|| Error::Precondition("set is not p-homogeneous".into()))?;
    let (p, gamma) = (omega.p(), omega.gamma());
    if m < gamma {
        return Err(Error::Precondition(format!("truncation {m} is below the scale {gamma}")));
    }
    let mut base = vec![PAdicScalar::zero(p)?];
    for &pos in &k {
        let step = PAdicScalar::power_unchecked(p, -pos - 1);
        base = base
            .iter()
            .flat_map(|b| (0..p).map(|s| b + &step.mul_int(&BigInt::from(s))).collect::<Vec<_>>())
            .collect();
    }
    let desc = SpectrumDescription {
        p,
        base: base.into_iter().map(|b| (b, 0)).collect(),
        tail_min: -m,
        tail_max: -gamma - 1,
        product: false,
    };
    let balls: TaggedBalls = omega.balls().into_iter().map(|b| (b, 0)).collect();
    let expected_orders: BTreeSet<i64> = k.iter().map(|&i| -i - 1).chain(-m..=-gamma - 1).collect();
    check(desc, &balls, m, expected_count(omega.len(), p, m - gamma)?, Some(expected_orders))
}

/// Candidate spectrum of `Ω = (C_0 + 2^n Z_2) × {0} ⊔ (C_1 + 2^n Z_2) × {1}` in the shift case:
/// `{(Σ_{i ∈ I_C} s_i 2^{i-n} + s 2^{j_0-n}, s)} + L × {0}`, with `L` the points whose digits
/// lie below position `-n`.
pub fn lambda_case_iii(c0: &ResidueSet, c1: &ResidueSet, m: i64) -> Result<SpectrumCheck> {
    if c0.p() != 2 || c1.p() != 2 {
        return Err(Error::Precondition("the shift-case spectrum is built for p = 2".into()));
    }
    if c0.n() != c1.n() {
        return Err(Error::Precondition("C_0 and C_1 must share the level n".into()));
    }
    let n = c0.n();
    if m < n as i64 {
        return Err(Error::Precondition(format!("truncation {m} is below the scale {n}")));
    }
    let g = ProductGroup::new(2, n, 2)?;
    let a = GroupSubset::new(
        g,
        c0.members().iter().map(|&x| (x, 0)).chain(c1.members().iter().map(|&x| (x, 1))),
    )?;
    let cls = classify_tile_pp(&a)?;
    let TileClassification::Shift { j0, .. } = cls.tile else {
        return Err(Error::Precondition(format!("{a} is in case {}, not the shift case", cls.tile.case_name())));
    };
    let nn = n as i64;
    let mut base = vec![(PAdicScalar::zero(2)?, 0u32)];
    for &i in &cls.zero_levels {
        let step = PAdicScalar::power_unchecked(2, i as i64 - nn);
        base = base.iter().flat_map(|(b, y)| [(b.clone(), *y), (b + &step, *y)]).collect();
    }
    let shift = PAdicScalar::power_unchecked(2, j0 as i64 - nn);
    base = base.iter().flat_map(|(b, _)| [(b.clone(), 0), (b + &shift, 1)]).collect();
    let desc = SpectrumDescription { p: 2, base, tail_min: -m, tail_max: -nn - 1, product: true };
    let ball = |x: u64| Ball::new(PAdicScalar::normalized(2, BigInt::from(x), 0), -nn);
    let balls: TaggedBalls = c0
        .members()
        .iter()
        .map(|&x| (ball(x), 0))
        .chain(c1.members().iter().map(|&x| (ball(x), 1)))
        .collect();
    check(desc, &balls, m, expected_count(a.len(), 2, m - nn)?, None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplementOrders {
    /// `1_Ω * μ_T = 1` on the whole window.
    pub tiles: bool,
    pub orders: BTreeSet<i64>,
    /// `{i ∈ [-W, γ) : i ∉ K}`, the part of `Z \ I_Ω` visible in the window.
    pub expected: BTreeSet<i64>,
    pub pass: bool,
}

/// For homogeneous `Ω` and a windowed complement `T`: `I_T = Z \ I_Ω` within the window.
pub fn tiling_complement_orders_check(omega: &CompactOpenSet, t: &DiscreteMeasure) -> Result<ComplementOrders> {
    let w = t
        .window_exp_at_zero()
        .ok_or_else(|| Error::WindowInsufficient("complement windows must be centred at 0".into()))?;
    if !t.is_unit_weight() {
        return Err(Error::Precondition("complements carry unit weights".into()));
    }
    let k = omega.branch_positions()?.ok_or_else(|| Error::Precondition("set is not p-homogeneous".into()))?;
    let one = BigRational::from_integer(BigInt::from(1));
    let tiles = is_function_tiling(&omega.indicator(), t, &one, t.window())?;
    let orders = match admissible_orders(&t.points()) {
        Ok(o) => o.orders().clone(),
        Err(Error::TooFewPoints(_)) => BTreeSet::new(),
        Err(e) => return Err(e),
    };
    let expected: BTreeSet<i64> = (-w..omega.gamma()).filter(|i| !k.contains(i)).collect();
    let pass = tiles && orders == expected;
    Ok(ComplementOrders { tiles, orders, expected, pass })
}
