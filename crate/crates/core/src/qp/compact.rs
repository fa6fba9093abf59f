use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize, Serializer};

use super::measure::{DiscreteMeasure, TestFunction};
use super::CELL_LIMIT;
use crate::error::{Error, Result};
use crate::padic::{check_prime, rational_pow, Ball, PAdicScalar};
use crate::tree::{checked_power, is_p_homogeneous, Homogeneity, ResidueSet};

/// `Ω = ⊔_{c ∈ C} (c + p^γ Z_p)`, residues kept as canonical representatives mod `p^γ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Deserialize)]
#[serde(try_from = "CompactOpenRepr")]
pub struct CompactOpenSet {
    p: u32,
    gamma: i64,
    residues: BTreeSet<PAdicScalar>,
}

/// A scalar in JSON: an integer or a `"k/p^l"` string.
#[derive(Deserialize)]
#[serde(untagged)]
pub(crate) enum ScalarRepr {
    Int(i64),
    Text(String),
}

impl ScalarRepr {
    pub(crate) fn resolve(&self, p: u32) -> Result<PAdicScalar> {
        let x = match self {
            ScalarRepr::Int(k) => PAdicScalar::from_int(p, *k)?,
            ScalarRepr::Text(s) => s.parse()?,
        };
        if x.prime() != p {
            return Err(Error::PrimeMismatch(p, x.prime()));
        }
        Ok(x)
    }
}

#[derive(Deserialize)]
struct CompactOpenRepr {
    p: u32,
    gamma: i64,
    residues: Vec<ScalarRepr>,
}

impl TryFrom<CompactOpenRepr> for CompactOpenSet {
    type Error = Error;

    fn try_from(r: CompactOpenRepr) -> Result<Self> {
        let residues = r.residues.iter().map(|s| s.resolve(r.p)).collect::<Result<Vec<_>>>()?;
        CompactOpenSet::new(r.p, r.gamma, residues)
    }
}

impl Serialize for CompactOpenSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            p: u32,
            gamma: i64,
            residues: Vec<&'a PAdicScalar>,
        }
        Out { p: self.p, gamma: self.gamma, residues: self.residues.iter().collect() }.serialize(serializer)
    }
}

/// `Ω = c_0 + p^{-R}·(C + p^n Z_p)` with `C ⊆ Z/p^nZ`: tree level `i` of `C`
/// sits at digit position `i - R` of `Ω - c_0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Normalization {
    pub c0: PAdicScalar,
    pub shift: i64,
    pub residues: Vec<ResidueSet>,
}

impl Normalization {
    pub fn n(&self) -> u32 {
        self.residues[0].n()
    }

    /// Digit position of tree level `level`.
    pub fn position(&self, level: u32) -> i64 {
        level as i64 - self.shift
    }

    /// The point `c_0 + p^{-R} x`.
    pub fn to_qp(&self, x: u64) -> PAdicScalar {
        &self.c0 + &PAdicScalar::normalized(self.c0.prime(), BigInt::from(x), 0).mul_prime_power(-self.shift)
    }

    /// `T' + (digits below position 0)`, scaled by `p^{-R}`, restricted to `window`.
    /// A complement of `C` in `Z/p^nZ` lifts this way to a complement of `Ω` in `Q_p`.
    pub fn lift_complement(&self, t: &ResidueSet, window: &Ball) -> Result<DiscreteMeasure> {
        let p = self.c0.prime();
        if window.prime() != p {
            return Err(Error::PrimeMismatch(p, window.prime()));
        }
        if !window.center().is_zero() {
            return Err(Error::WindowInsufficient("complement windows must be centred at 0".into()));
        }
        let depth = (window.radius_exp() - self.shift).max(0);
        let tails = (p as u128).checked_pow(depth as u32).unwrap_or(u128::MAX);
        if tails.saturating_mul(t.len() as u128) > CELL_LIMIT as u128 {
            return Err(Error::TooLarge(format!("{} lifted points", tails.saturating_mul(t.len() as u128))));
        }
        let mut points = Vec::new();
        for &base in t.members() {
            for k in 0..tails as u64 {
                // k / p^depth has digits at positions -depth..-1.
                let y = &PAdicScalar::normalized(p, BigInt::from(base), 0)
                    + &PAdicScalar::normalized(p, BigInt::from(k), depth as u32);
                let x = y.mul_prime_power(-self.shift);
                if window.contains(&x) {
                    points.push(x);
                }
            }
        }
        DiscreteMeasure::from_points(window.clone(), points)
    }
}

impl CompactOpenSet {
    /// Residues are reduced mod `p^γ`; two residues in the same class are rejected.
    pub fn new(p: u32, gamma: i64, residues: impl IntoIterator<Item = PAdicScalar>) -> Result<Self> {
        check_prime(p)?;
        let mut set = BTreeSet::new();
        for c in residues {
            if c.prime() != p {
                return Err(Error::PrimeMismatch(p, c.prime()));
            }
            let r = c.reduce_mod(gamma);
            if !set.insert(r.clone()) {
                return Err(Error::InvalidResidueSet(format!("{c} repeats residue {r} mod {p}^{gamma}")));
            }
        }
        Ok(CompactOpenSet { p, gamma, residues: set })
    }

    pub fn from_ints(p: u32, gamma: i64, residues: &[i64]) -> Result<Self> {
        let v = residues.iter().map(|&k| PAdicScalar::from_int(p, k)).collect::<Result<Vec<_>>>()?;
        CompactOpenSet::new(p, gamma, v)
    }

    /// `Ω = B(c, p^n)` as a one-residue set.
    pub fn ball(ball: &Ball) -> Self {
        let gamma = -ball.radius_exp();
        CompactOpenSet { p: ball.prime(), gamma, residues: [ball.center().reduce_mod(gamma)].into() }
    }

    /// `{c + p^γ t : c ∈ C}` read back from a residue set of `Z/p^nZ` with `γ = n`.
    pub fn from_residue_set(c: &ResidueSet) -> Self {
        let p = c.p();
        CompactOpenSet {
            p,
            gamma: c.n() as i64,
            residues: c.members().iter().map(|&m| PAdicScalar::normalized(p, BigInt::from(m), 0)).collect(),
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn gamma(&self) -> i64 {
        self.gamma
    }

    pub fn residues(&self) -> &BTreeSet<PAdicScalar> {
        &self.residues
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn measure(&self) -> BigRational {
        rational_pow(self.p, -self.gamma) * BigInt::from(self.residues.len())
    }

    pub fn balls(&self) -> Vec<Ball> {
        self.residues.iter().map(|c| Ball::new(c.clone(), -self.gamma)).collect()
    }

    pub fn contains(&self, x: &PAdicScalar) -> bool {
        x.prime() == self.p && self.residues.contains(&x.reduce_mod(self.gamma))
    }

    /// Smallest `e` with `Ω ⊆ B(0, p^e)`.
    pub fn support_exp(&self) -> i64 {
        self.residues
            .iter()
            .filter_map(|c| c.valuation().finite())
            .map(|v| -v)
            .fold(-self.gamma, i64::max)
    }

    /// The same set written at a finer scale `γ' >= γ`.
    pub fn refine(&self, gamma: i64) -> Result<Self> {
        if gamma < self.gamma {
            return Err(Error::Precondition(format!("cannot coarsen from scale {} to {gamma}", self.gamma)));
        }
        let k = (self.p as u128).checked_pow((gamma - self.gamma) as u32).unwrap_or(u128::MAX);
        if k.saturating_mul(self.len() as u128) > CELL_LIMIT as u128 {
            return Err(Error::TooLarge(format!("refining to scale {gamma}")));
        }
        let step = PAdicScalar::power_unchecked(self.p, self.gamma);
        let residues = self
            .residues
            .iter()
            .flat_map(|c| {
                let step = &step;
                (0..k as u64).map(move |j| c + &step.mul_int(&BigInt::from(j)))
            })
            .collect();
        Ok(CompactOpenSet { p: self.p, gamma, residues })
    }

    pub fn translate(&self, t: &PAdicScalar) -> Result<Self> {
        let shifted = self.residues.iter().map(|c| c.try_add(t)).collect::<Result<Vec<_>>>()?;
        CompactOpenSet::new(self.p, self.gamma, shifted)
    }

    /// `Ω ∪ Ω'` at the finer of the two scales.
    pub fn union(&self, other: &CompactOpenSet) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        let g = self.gamma.max(other.gamma);
        let (a, b) = (self.refine(g)?, other.refine(g)?);
        let residues = a.residues.union(&b.residues).cloned().collect();
        Ok(CompactOpenSet { p: self.p, gamma: g, residues })
    }

    /// Equality as subsets of `Q_p`, whatever scale each side is written at.
    pub fn same_set(&self, other: &CompactOpenSet) -> Result<bool> {
        let g = self.gamma.max(other.gamma);
        Ok(self.p == other.p && self.refine(g)? == other.refine(g)?)
    }

    pub fn is_disjoint(&self, other: &CompactOpenSet) -> Result<bool> {
        let g = self.gamma.max(other.gamma);
        Ok(self.refine(g)?.residues.is_disjoint(&other.refine(g)?.residues))
    }

    /// `1_Ω` as a test function with constancy exponent `-γ`.
    pub fn indicator(&self) -> TestFunction {
        let one = BigRational::from_integer(BigInt::from(1));
        TestFunction::from_parts(
            self.p,
            -self.gamma,
            self.support_exp(),
            self.residues.iter().map(|c| (c.clone(), one.clone())).collect(),
        )
    }

    pub fn normalize(&self) -> Result<Normalization> {
        CompactOpenSet::normalize_joint(std::slice::from_ref(self))
    }

    /// A single translation and scaling that places every set inside `Z_p`
    /// as a union of cosets of `p^n Z_p`, with `n >= 1` minimal.
    pub fn normalize_joint(sets: &[CompactOpenSet]) -> Result<Normalization> {
        let p = sets.first().ok_or(Error::EmptySet)?.p;
        if let Some(s) = sets.iter().find(|s| s.p != p) {
            return Err(Error::PrimeMismatch(p, s.p));
        }
        let gamma = sets.iter().map(|s| s.gamma).max().expect("nonempty");
        let refined = sets.iter().map(|s| s.refine(gamma)).collect::<Result<Vec<_>>>()?;
        let c0 = refined.iter().flat_map(|s| s.residues.iter()).min().ok_or(Error::EmptySet)?.clone();
        let spread = refined
            .iter()
            .flat_map(|s| s.residues.iter())
            .filter_map(|c| (c - &c0).valuation().finite())
            .map(|v| -v)
            .fold(-gamma, i64::max);
        let shift = spread.max(1 - gamma);
        let n = u32::try_from(gamma + shift).map_err(|_| Error::TooLarge("normalized depth".into()))?;
        checked_power(p, n)?;
        let residues = refined
            .iter()
            .map(|s| {
                let members = s.residues.iter().map(|c| {
                    let x = (c - &c0).mul_prime_power(shift).reduce_mod(n as i64);
                    debug_assert_eq!(x.denom_exp(), 0);
                    x.numerator().to_u64().expect("residue fits in u64")
                });
                ResidueSet::new(p, n, members)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Normalization { c0, shift, residues })
    }

    pub fn homogeneity(&self) -> Result<Homogeneity> {
        if self.is_empty() {
            return Ok(Homogeneity::Empty);
        }
        Ok(is_p_homogeneous(&self.normalize()?.residues[0]))
    }

    /// Branch digit positions `K` (all below `γ`) when `Ω` is `p`-homogeneous;
    /// the admissible orders of `Ω` are then `K ∪ [γ, ∞)`.
    pub fn branch_positions(&self) -> Result<Option<BTreeSet<i64>>> {
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        let norm = self.normalize()?;
        Ok(is_p_homogeneous(&norm.residues[0])
            .branch_levels()
            .map(|b| b.levels().iter().map(|&i| norm.position(i)).collect()))
    }

    /// The complement `p^{-R}(T_J + reps of Q_p/Z_p)` of a homogeneous set, inside `window`.
    pub fn homogeneous_complement(&self, window: &Ball) -> Result<DiscreteMeasure> {
        let norm = self.normalize()?;
        let levels = is_p_homogeneous(&norm.residues[0])
            .branch_levels()
            .cloned()
            .ok_or_else(|| Error::Precondition("set is not p-homogeneous".into()))?;
        let t = levels.complement().canonical_set(self.p)?;
        norm.lift_complement(&t, window)
    }
}
