use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize, Serializer};

use super::compact::ScalarRepr;
use super::CELL_LIMIT;
use crate::cyclotomic::weighted_phases_vanish;
use crate::error::{Error, Result};
use crate::padic::{ball_character_integral, character, check_prime, rational_pow, Ball, BallIntegral, PAdicScalar, UnitPhase};

fn rational_to_string(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RationalRepr {
    Int(i64),
    Text(String),
}

impl RationalRepr {
    fn resolve(&self) -> Result<BigRational> {
        match self {
            RationalRepr::Int(k) => Ok(BigRational::from_integer(BigInt::from(*k))),
            RationalRepr::Text(s) => {
                BigRational::from_str(s.trim()).map_err(|_| Error::Parse(format!("bad rational {s:?}")))
            }
        }
    }
}

/// A function constant on balls of radius `p^ℓ` and supported in `B(0, p^{ℓ'})`.
/// Values are keyed by the canonical center (mod `p^{-ℓ}`) of each cell; absent cells are zero.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(try_from = "TestFunctionRepr")]
pub struct TestFunction {
    p: u32,
    constancy_exp: i64,
    support_exp: i64,
    values: BTreeMap<PAdicScalar, BigRational>,
}

#[derive(Deserialize)]
struct TestFunctionRepr {
    p: u32,
    constancy: i64,
    support: i64,
    values: Vec<(ScalarRepr, RationalRepr)>,
}

impl TryFrom<TestFunctionRepr> for TestFunction {
    type Error = Error;

    fn try_from(r: TestFunctionRepr) -> Result<Self> {
        let values = r
            .values
            .iter()
            .map(|(c, v)| Ok((c.resolve(r.p)?, v.resolve()?)))
            .collect::<Result<Vec<_>>>()?;
        TestFunction::new(r.p, r.constancy, r.support, values)
    }
}

impl Serialize for TestFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            p: u32,
            constancy: i64,
            support: i64,
            values: Vec<(String, String)>,
        }
        Out {
            p: self.p,
            constancy: self.constancy_exp,
            support: self.support_exp,
            values: self.values.iter().map(|(c, v)| (c.to_string(), rational_to_string(v))).collect(),
        }
        .serialize(serializer)
    }
}

impl TestFunction {
    pub fn new(
        p: u32,
        constancy_exp: i64,
        support_exp: i64,
        values: impl IntoIterator<Item = (PAdicScalar, BigRational)>,
    ) -> Result<Self> {
        check_prime(p)?;
        if constancy_exp > support_exp {
            return Err(Error::Precondition(format!(
                "constancy exponent {constancy_exp} exceeds support exponent {support_exp}"
            )));
        }
        let mut map = BTreeMap::new();
        for (c, v) in values {
            if c.prime() != p {
                return Err(Error::PrimeMismatch(p, c.prime()));
            }
            if !c.norm_at_most(support_exp) {
                return Err(Error::Precondition(format!("cell {c} lies outside B(0, {p}^{support_exp})")));
            }
            let key = c.reduce_mod(-constancy_exp);
            if map.insert(key.clone(), v).is_some() {
                return Err(Error::Precondition(format!("cell {key} given twice")));
            }
        }
        map.retain(|_, v: &mut BigRational| !v.is_zero());
        Ok(TestFunction { p, constancy_exp, support_exp, values: map })
    }

    /// Caller guarantees canonical keys inside the support ball.
    pub(crate) fn from_parts(p: u32, constancy_exp: i64, support_exp: i64, values: BTreeMap<PAdicScalar, BigRational>) -> Self {
        TestFunction { p, constancy_exp, support_exp, values }
    }

    /// `a·1_B`.
    pub fn scaled_indicator(ball: &Ball, a: BigRational) -> Self {
        let n = ball.radius_exp();
        let support = ball.center().valuation().finite().map_or(n, |v| n.max(-v));
        let mut values = BTreeMap::new();
        if !a.is_zero() {
            values.insert(ball.center().clone(), a);
        }
        TestFunction { p: ball.prime(), constancy_exp: n, support_exp: support, values }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Nominal `ℓ`.
    pub fn constancy_exp(&self) -> i64 {
        self.constancy_exp
    }

    /// Nominal `ℓ'`.
    pub fn support_exp(&self) -> i64 {
        self.support_exp
    }

    pub fn values(&self) -> &BTreeMap<PAdicScalar, BigRational> {
        &self.values
    }

    pub fn value_at(&self, x: &PAdicScalar) -> BigRational {
        if !x.norm_at_most(self.support_exp) {
            return BigRational::zero();
        }
        self.values.get(&x.reduce_mod(-self.constancy_exp)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn integral(&self) -> BigRational {
        self.values.values().sum::<BigRational>() * rational_pow(self.p, self.constancy_exp)
    }

    /// `f̂(ξ) = ∫ f(x) χ(-ξx) dx` as weighted phases.
    pub fn fourier_terms(&self, xi: &PAdicScalar) -> Result<Vec<(UnitPhase, BigRational)>> {
        let neg = -xi;
        let mut out = Vec::new();
        for (c, v) in &self.values {
            if let BallIntegral::Term { phase, magnitude } =
                ball_character_integral(&Ball::new(c.clone(), self.constancy_exp), &neg)?
            {
                out.push((phase, v * magnitude));
            }
        }
        Ok(out)
    }

    pub fn fourier_vanishes(&self, xi: &PAdicScalar) -> Result<bool> {
        weighted_phases_vanish(&self.fourier_terms(xi)?)
    }

    /// Largest `e ∈ [ℓ, ℓ']` such that `f` is constant on every ball of radius `p^e`
    /// inside `B(0, p^{ℓ'})`.
    pub fn effective_constancy(&self) -> i64 {
        let cells_per = |e: i64| (self.p as u128).checked_pow((e - self.constancy_exp) as u32);
        for e in (self.constancy_exp + 1..=self.support_exp).rev() {
            let Some(full) = cells_per(e) else { continue };
            let mut groups: BTreeMap<PAdicScalar, (u128, &BigRational, bool)> = BTreeMap::new();
            for (c, v) in &self.values {
                let g = groups.entry(c.reduce_mod(-e)).or_insert((0, v, true));
                g.0 += 1;
                g.2 &= g.1 == v;
            }
            if groups.values().all(|&(k, _, same)| same && k == full) {
                return e;
            }
        }
        self.constancy_exp
    }
}

/// Atoms `α_x δ_x` of a measure inside a window ball; outside the window nothing is known.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(try_from = "MeasureRepr")]
pub struct DiscreteMeasure {
    window: Ball,
    atoms: BTreeMap<PAdicScalar, i64>,
}

#[derive(Deserialize)]
struct MeasureRepr {
    p: u32,
    window: WindowRepr,
    atoms: Vec<AtomRepr>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum WindowRepr {
    Exp(i64),
    Ball(String),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AtomRepr {
    Weighted(ScalarRepr, i64),
    Unit(ScalarRepr),
}

impl TryFrom<MeasureRepr> for DiscreteMeasure {
    type Error = Error;

    fn try_from(r: MeasureRepr) -> Result<Self> {
        let window = match r.window {
            WindowRepr::Exp(w) => Ball::centered_at_zero(r.p, w)?,
            WindowRepr::Ball(s) => s.parse()?,
        };
        if window.prime() != r.p {
            return Err(Error::PrimeMismatch(r.p, window.prime()));
        }
        let atoms = r
            .atoms
            .iter()
            .map(|a| match a {
                AtomRepr::Weighted(x, w) => Ok((x.resolve(r.p)?, *w)),
                AtomRepr::Unit(x) => Ok((x.resolve(r.p)?, 1)),
            })
            .collect::<Result<Vec<_>>>()?;
        DiscreteMeasure::new(window, atoms)
    }
}

impl Serialize for DiscreteMeasure {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            p: u32,
            window: &'a Ball,
            atoms: Vec<(&'a PAdicScalar, i64)>,
        }
        Out { p: self.p(), window: &self.window, atoms: self.atoms.iter().map(|(x, &w)| (x, w)).collect() }
            .serialize(serializer)
    }
}

impl DiscreteMeasure {
    /// Repeated points accumulate; zero weights are dropped.
    pub fn new(window: Ball, atoms: impl IntoIterator<Item = (PAdicScalar, i64)>) -> Result<Self> {
        let mut map: BTreeMap<PAdicScalar, i64> = BTreeMap::new();
        for (x, w) in atoms {
            if x.prime() != window.prime() {
                return Err(Error::PrimeMismatch(window.prime(), x.prime()));
            }
            if !window.contains(&x) {
                return Err(Error::Precondition(format!("atom {x} lies outside the window {window}")));
            }
            *map.entry(x).or_insert(0) += w;
        }
        map.retain(|_, w| *w != 0);
        Ok(DiscreteMeasure { window, atoms: map })
    }

    /// `μ_T`: unit weights on distinct points.
    pub fn from_points(window: Ball, points: impl IntoIterator<Item = PAdicScalar>) -> Result<Self> {
        let pts: Vec<PAdicScalar> = points.into_iter().collect();
        let distinct: BTreeSet<&PAdicScalar> = pts.iter().collect();
        if distinct.len() != pts.len() {
            return Err(Error::Precondition("repeated point in a unit-weight measure".into()));
        }
        DiscreteMeasure::new(window, pts.into_iter().map(|x| (x, 1)))
    }

    pub fn p(&self) -> u32 {
        self.window.prime()
    }

    pub fn window(&self) -> &Ball {
        &self.window
    }

    pub fn atoms(&self) -> &BTreeMap<PAdicScalar, i64> {
        &self.atoms
    }

    pub fn points(&self) -> Vec<PAdicScalar> {
        self.atoms.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> i64 {
        self.atoms.values().sum()
    }

    pub fn is_unit_weight(&self) -> bool {
        self.atoms.values().all(|&w| w == 1)
    }

    /// `W` when the window is `B(0, p^W)`.
    pub fn window_exp_at_zero(&self) -> Option<i64> {
        self.window.center().is_zero().then(|| self.window.radius_exp())
    }

    /// `ν + ν'` over the same window.
    pub fn sum(&self, other: &DiscreteMeasure) -> Result<DiscreteMeasure> {
        if self.window != other.window {
            return Err(Error::WindowInsufficient(format!("windows differ: {} vs {}", self.window, other.window)));
        }
        DiscreteMeasure::new(
            self.window.clone(),
            self.atoms.iter().chain(other.atoms.iter()).map(|(x, &w)| (x.clone(), w)),
        )
    }

    /// Restriction to a smaller window.
    pub fn restrict(&self, window: &Ball) -> Result<DiscreteMeasure> {
        if !self.window.contains_ball(window) {
            return Err(Error::WindowInsufficient(format!("{window} is not inside {}", self.window)));
        }
        DiscreteMeasure::new(
            window.clone(),
            self.atoms.iter().filter(|(x, _)| window.contains(x)).map(|(x, &w)| (x.clone(), w)),
        )
    }
}

/// `(f * ν)` on every cell of `eval`. Cells have radius `p^{min(ℓ, e)}`, on which
/// the convolution is constant. Needs `eval ⊆ window` and `ℓ' <= W`: then every
/// `t` with `f(x - t) ≠ 0` lies in `B(x, p^{ℓ'}) ⊆ window`.
pub fn convolve_window(f: &TestFunction, nu: &DiscreteMeasure, eval: &Ball) -> Result<BTreeMap<Ball, BigRational>> {
    if f.p != nu.p() || eval.prime() != nu.p() {
        return Err(Error::PrimeMismatch(f.p, nu.p()));
    }
    let window = nu.window();
    if !window.contains_ball(eval) {
        return Err(Error::WindowInsufficient(format!("evaluation ball {eval} is not inside {window}")));
    }
    if f.support_exp > window.radius_exp() {
        return Err(Error::WindowInsufficient(format!(
            "support radius {}^{} exceeds window radius {}^{}",
            f.p,
            f.support_exp,
            f.p,
            window.radius_exp()
        )));
    }
    let e = eval.radius_exp();
    if e <= f.constancy_exp {
        let x = eval.center();
        let mut total = BigRational::zero();
        for (t, &w) in nu.atoms() {
            total += f.value_at(&(x - t)) * BigInt::from(w);
        }
        return Ok([(eval.clone(), total)].into());
    }
    let ell = f.constancy_exp;
    let mut out: BTreeMap<Ball, BigRational> =
        eval.cells(ell, CELL_LIMIT)?.into_iter().map(|b| (b, BigRational::zero())).collect();
    for (t, &w) in nu.atoms() {
        for (c, v) in &f.values {
            let cell = Ball::new(t + c, ell);
            if let Some(acc) = out.get_mut(&cell) {
                *acc += v * BigInt::from(w);
            }
        }
    }
    Ok(out)
}

/// `f * ν = w` on every cell of `eval`.
pub fn is_function_tiling(f: &TestFunction, nu: &DiscreteMeasure, w: &BigRational, eval: &Ball) -> Result<bool> {
    Ok(convolve_window(f, nu, eval)?.values().all(|v| v == w))
}

/// Masses `ν(B)` of every ball of radius `p^n` in the window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BallCounts {
    pub scale: i64,
    pub counts: Vec<(Ball, i64)>,
    pub uniform: bool,
}

impl BallCounts {
    pub fn value(&self) -> Option<i64> {
        if self.uniform {
            self.counts.first().map(|c| c.1)
        } else {
            None
        }
    }

    /// Two balls with different masses, when there are any.
    pub fn witness(&self) -> Option<UniformityWitness> {
        let (a, ka) = self.counts.first()?;
        let (b, kb) = self.counts.iter().find(|(_, k)| k != ka)?;
        Some(UniformityWitness { scale: self.scale, ball_a: a.clone(), count_a: *ka, ball_b: b.clone(), count_b: *kb })
    }
}

pub fn measure_ball_counts(nu: &DiscreteMeasure, n: i64) -> Result<BallCounts> {
    let window = nu.window();
    if n > window.radius_exp() {
        return Err(Error::WindowInsufficient(format!("scale {n} exceeds the window {window}")));
    }
    let mut counts: BTreeMap<Ball, i64> = window.cells(n, CELL_LIMIT)?.into_iter().map(|b| (b, 0)).collect();
    for (x, &w) in nu.atoms() {
        *counts.get_mut(&Ball::new(x.clone(), n)).expect("atoms lie in the window") += w;
    }
    let first = counts.values().next().copied();
    let uniform = counts.values().all(|&k| Some(k) == first);
    Ok(BallCounts { scale: n, counts: counts.into_iter().collect(), uniform })
}

/// Scales examined for uniformity: from the first with more balls than atoms
/// up to `W - 1` (at `W` there is a single ball and nothing to compare).
fn checkable_scales(nu: &DiscreteMeasure) -> std::ops::RangeInclusive<i64> {
    let w = nu.window().radius_exp();
    let mut d = 1i64;
    while (nu.p() as u128).pow(d as u32) <= nu.len() as u128 {
        d += 1;
    }
    (w - d)..=(w - 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Density {
    pub density: String,
    #[serde(skip)]
    pub value: BigRational,
    /// Smallest scale with uniform counts.
    pub scale: i64,
    pub count: i64,
}

/// `ν(B(x, p^n)) / p^n` at the smallest scale where every ball in the window has the same mass.
pub fn density(nu: &DiscreteMeasure) -> Result<Density> {
    if nu.is_empty() {
        return Err(Error::EmptySet);
    }
    for n in checkable_scales(nu) {
        let counts = measure_ball_counts(nu, n)?;
        if let Some(k) = counts.value() {
            let value = BigRational::from_integer(BigInt::from(k)) / rational_pow(nu.p(), n);
            return Ok(Density { density: rational_to_string(&value), value, scale: n, count: k });
        }
    }
    Err(Error::DensityNotCertified)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Constancy {
    /// Recomputed `ℓ`.
    pub constancy_exp: i64,
    pub support_exp: i64,
    /// Smallest `n` with `f̂ ≠ 0` on all of `B(0, p^{-n})`.
    pub n_f: i64,
    pub integral: String,
}

pub fn constancy_parameter(f: &TestFunction) -> Result<Constancy> {
    let integral = f.integral();
    if integral.is_zero() {
        return Err(Error::ZeroIntegral);
    }
    let zero = PAdicScalar::zero(f.p)?;
    // f̂ is constant on balls of radius p^{-ℓ'}; B(0, p^{-ℓ'}) is one such cell where f̂ = ∫f.
    let mut n = f.support_exp;
    while n >= f.constancy_exp {
        let outer = Ball::new(zero.clone(), -(n - 1));
        let mut all_nonzero = true;
        for cell in outer.cells(-f.support_exp, CELL_LIMIT)? {
            if cell.center().norm_at_most(-n) {
                continue;
            }
            if f.fourier_vanishes(cell.center())? {
                all_nonzero = false;
                break;
            }
        }
        if !all_nonzero {
            break;
        }
        n -= 1;
    }
    Ok(Constancy {
        constancy_exp: f.effective_constancy(),
        support_exp: f.support_exp,
        n_f: n,
        integral: rational_to_string(&integral),
    })
}

/// Spheres `|ξ| = p^r` on which `ν̂_W(p^{-r}) = Σ_{x ∈ window} α_x χ(p^{-r} x)` vanishes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZeroScan {
    pub r_min: i64,
    pub r_max: i64,
    pub vanishing: BTreeSet<i64>,
    /// `min_λ max_{λ' ≠ λ} v(λ - λ')` over the window atoms; `None` with fewer than two.
    pub n_nu: Option<i64>,
}

impl ZeroScan {
    pub fn contains(&self, r: i64) -> bool {
        self.vanishing.contains(&r)
    }
}

/// Scans `r ∈ [1 - W, max_abs_exp]`. From `r > -W` on, `B(p^{-r}, p^{-W})` lies in a
/// single sphere and `p^{-W} ν̂_W(ξ)` is exactly `⟨ν̂, 1_{B(ξ, p^{-W})}⟩`.
pub fn measure_zero_scan(nu: &DiscreteMeasure, max_abs_exp: i64) -> Result<ZeroScan> {
    let w = nu
        .window_exp_at_zero()
        .ok_or_else(|| Error::WindowInsufficient("zero scans need a window centred at 0".into()))?;
    let p = nu.p();
    let r_min = 1 - w;
    let mut vanishing = BTreeSet::new();
    for r in r_min..=max_abs_exp {
        let xi = PAdicScalar::prime_power(p, -r)?;
        let terms = nu
            .atoms()
            .iter()
            .map(|(x, &a)| Ok((character(&xi, x)?, BigRational::from_integer(BigInt::from(a)))))
            .collect::<Result<Vec<_>>>()?;
        if weighted_phases_vanish(&terms)? {
            vanishing.insert(r);
        }
    }
    let n_nu = separation_order(nu);
    let bound = n_nu.map_or(i64::MIN, |n| n + 1);
    if let Some(&r) = vanishing.iter().find(|&&r| r > bound) {
        return Err(Error::TheoremViolation(format!("zero on sphere p^{r} beyond the bound {bound}")));
    }
    Ok(ZeroScan { r_min, r_max: max_abs_exp, vanishing, n_nu })
}

fn separation_order(nu: &DiscreteMeasure) -> Option<i64> {
    let pts = nu.points();
    if pts.len() < 2 {
        return None;
    }
    pts.iter()
        .map(|x| {
            pts.iter()
                .filter(|y| *y != x)
                .filter_map(|y| (x - y).valuation().finite())
                .max()
                .expect("at least one other point")
        })
        .min()
}

/// Two balls of radius `p^scale` with different counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniformityWitness {
    pub scale: i64,
    pub ball_a: Ball,
    pub count_a: i64,
    pub ball_b: Ball,
    pub count_b: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum UniformPartition {
    /// Every ball of radius `p^scale` in the window holds `count` points.
    Uniform { scale: i64, count: i64 },
    NonUniform { witnesses: Vec<UniformityWitness> },
}

/// Smallest checkable scale with constant counts, or a witness pair at every checkable scale.
pub fn uniform_partition_check(t: &DiscreteMeasure) -> Result<UniformPartition> {
    if t.is_empty() {
        return Err(Error::EmptySet);
    }
    if !t.is_unit_weight() {
        return Err(Error::Precondition("uniform partitions need unit weights".into()));
    }
    let mut witnesses = Vec::new();
    for n in checkable_scales(t) {
        let counts = measure_ball_counts(t, n)?;
        match counts.value() {
            Some(k) => return Ok(UniformPartition::Uniform { scale: n, count: k }),
            None => witnesses.push(counts.witness().expect("non-uniform counts have a witness")),
        }
    }
    Ok(UniformPartition::NonUniform { witnesses })
}

/// `f = (1/c)·1_{B(0, p^n)}` when every radius-`p^n` ball in the window holds `c` points.
pub fn uniform_partition_construct(t: &DiscreteMeasure, n: i64) -> Result<TestFunction> {
    let counts = measure_ball_counts(t, n)?;
    match counts.value() {
        Some(c) if c > 0 => Ok(TestFunction::scaled_indicator(
            &Ball::centered_at_zero(t.p(), n)?,
            BigRational::new(BigInt::one(), BigInt::from(c)),
        )),
        _ => Err(Error::NonUniform(n)),
    }
}
