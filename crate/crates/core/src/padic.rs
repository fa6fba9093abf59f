//! Exact arithmetic on the dense subring `Z[1/p]` of `Q_p`.
//!
//! Every point the tiling checkers touch (residues of compact open sets,
//! translation atoms, dual frequencies) has a finite Hensel expansion, so a
//! scalar is stored as `k / p^l` in lowest `p`-terms. Additive characters are
//! represented by their phase `{xi * x}` as an exact rational in `[0, 1)`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn check_prime(p: u32) -> Result<()> {
    if is_prime(p as u64) {
        Ok(())
    } else {
        Err(Error::NotPrime(p as u64))
    }
}

pub(crate) fn big_pow(p: u32, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

/// `p^e` as an exact rational; `e` may be negative.
pub(crate) fn rational_pow(p: u32, e: i64) -> BigRational {
    let base = big_pow(p, e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(base)
    } else {
        BigRational::new(BigInt::one(), base)
    }
}

/// The `p`-adic valuation; `Infinite` is the valuation of zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// An element `k / p^l` of `Z[1/p]`, kept in canonical lowest-terms form:
/// `k = 0` forces `l = 0`, and `l > 0` forces `p ∤ k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PAdicScalar {
    prime: u32,
    numerator: BigInt,
    denom_exp: u32,
}

impl PAdicScalar {
    pub fn new(prime: u32, numerator: impl Into<BigInt>, denom_exp: u32) -> Result<Self> {
        check_prime(prime)?;
        Ok(Self::normalized(prime, numerator.into(), denom_exp))
    }

    pub fn from_int(prime: u32, value: i64) -> Result<Self> {
        Self::new(prime, value, 0)
    }

    pub fn zero(prime: u32) -> Result<Self> {
        Self::new(prime, 0, 0)
    }

    /// `p^e` for any integer `e`.
    pub fn prime_power(prime: u32, e: i64) -> Result<Self> {
        check_prime(prime)?;
        Ok(Self::power_unchecked(prime, e))
    }

    pub(crate) fn power_unchecked(prime: u32, e: i64) -> Self {
        if e >= 0 {
            Self::normalized(prime, big_pow(prime, e as u32), 0)
        } else {
            Self::normalized(prime, BigInt::one(), (-e) as u32)
        }
    }

    pub(crate) fn normalized(prime: u32, mut k: BigInt, mut l: u32) -> Self {
        if k.is_zero() {
            return PAdicScalar { prime, numerator: k, denom_exp: 0 };
        }
        let p = BigInt::from(prime);
        while l > 0 {
            let (q, r) = k.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            k = q;
            l -= 1;
        }
        PAdicScalar { prime, numerator: k, denom_exp: l }
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn denom_exp(&self) -> u32 {
        self.denom_exp
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn valuation(&self) -> Valuation {
        if self.numerator.is_zero() {
            return Valuation::Infinite;
        }
        if self.denom_exp > 0 {
            return Valuation::Finite(-(self.denom_exp as i64));
        }
        let p = BigInt::from(self.prime);
        let mut k = self.numerator.clone();
        let mut v = 0i64;
        loop {
            let (q, r) = k.div_rem(&p);
            if !r.is_zero() {
                return Valuation::Finite(v);
            }
            k = q;
            v += 1;
        }
    }

    /// `true` when `|x|_p <= p^e`, i.e. `x ∈ B(0, p^e)`.
    pub fn norm_at_most(&self, e: i64) -> bool {
        match self.valuation() {
            Valuation::Infinite => true,
            Valuation::Finite(v) => v >= -e,
        }
    }

    /// Fractional part `{x}` of the Hensel expansion.
    pub fn frac_part(&self) -> UnitPhase {
        if self.denom_exp == 0 {
            return UnitPhase::zero();
        }
        let den = big_pow(self.prime, self.denom_exp);
        let num = self.numerator.mod_floor(&den);
        UnitPhase::new(BigRational::new(num, den))
    }

    /// Canonical representative of `x mod p^m Z_p`: the Hensel digits of `x`
    /// strictly below position `m`, as a nonnegative rational.
    pub fn reduce_mod(&self, m: i64) -> PAdicScalar {
        match self.valuation() {
            Valuation::Infinite => return self.clone(),
            Valuation::Finite(v) if v >= m => {
                return PAdicScalar::normalized(self.prime, BigInt::zero(), 0)
            }
            _ => {}
        }
        let l = self.denom_exp as i64;
        let modulus = big_pow(self.prime, (m + l) as u32);
        PAdicScalar::normalized(self.prime, self.numerator.mod_floor(&modulus), self.denom_exp)
    }

    /// Hensel digit of `x` at position `pos`.
    pub fn digit(&self, pos: i64) -> u32 {
        let hi = self.reduce_mod(pos + 1);
        let lo = self.reduce_mod(pos);
        let d = (&hi - &lo).mul_prime_power(-pos);
        d.numerator.to_u32().expect("digit fits in u32")
    }

    /// `x * p^e`.
    pub fn mul_prime_power(&self, e: i64) -> PAdicScalar {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.denom_exp as i64 - e;
        if l >= 0 {
            PAdicScalar::normalized(self.prime, self.numerator.clone(), l as u32)
        } else {
            PAdicScalar::normalized(self.prime, &self.numerator * big_pow(self.prime, (-l) as u32), 0)
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> PAdicScalar {
        PAdicScalar::normalized(self.prime, &self.numerator * k, self.denom_exp)
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.numerator.clone(), big_pow(self.prime, self.denom_exp))
    }

    /// Approximate real value of the rational `k / p^l`, for display only.
    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }

    fn same_prime(&self, other: &PAdicScalar) -> Result<()> {
        if self.prime == other.prime {
            Ok(())
        } else {
            Err(Error::PrimeMismatch(self.prime, other.prime))
        }
    }

    pub fn try_add(&self, other: &PAdicScalar) -> Result<PAdicScalar> {
        self.same_prime(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn try_sub(&self, other: &PAdicScalar) -> Result<PAdicScalar> {
        self.same_prime(other)?;
        Ok(self.add_unchecked(&-other))
    }

    pub fn try_mul(&self, other: &PAdicScalar) -> Result<PAdicScalar> {
        self.same_prime(other)?;
        Ok(PAdicScalar::normalized(
            self.prime,
            &self.numerator * &other.numerator,
            self.denom_exp + other.denom_exp,
        ))
    }

    fn add_unchecked(&self, other: &PAdicScalar) -> PAdicScalar {
        let l = self.denom_exp.max(other.denom_exp);
        let a = &self.numerator * big_pow(self.prime, l - self.denom_exp);
        let b = &other.numerator * big_pow(self.prime, l - other.denom_exp);
        PAdicScalar::normalized(self.prime, a + b, l)
    }
}

impl Add for &PAdicScalar {
    type Output = PAdicScalar;

    /// Panics when the primes differ; use [`PAdicScalar::try_add`] for a
    /// fallible version.
    fn add(self, rhs: &PAdicScalar) -> PAdicScalar {
        self.try_add(rhs).expect("prime mismatch in addition")
    }
}

impl Sub for &PAdicScalar {
    type Output = PAdicScalar;

    fn sub(self, rhs: &PAdicScalar) -> PAdicScalar {
        self.try_sub(rhs).expect("prime mismatch in subtraction")
    }
}

impl Mul for &PAdicScalar {
    type Output = PAdicScalar;

    fn mul(self, rhs: &PAdicScalar) -> PAdicScalar {
        self.try_mul(rhs).expect("prime mismatch in multiplication")
    }
}

impl Neg for &PAdicScalar {
    type Output = PAdicScalar;

    fn neg(self) -> PAdicScalar {
        PAdicScalar { prime: self.prime, numerator: -&self.numerator, denom_exp: self.denom_exp }
    }
}

impl Ord for PAdicScalar {
    /// Orders by prime, then by real value of `k / p^l`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.prime.cmp(&other.prime).then_with(|| {
            if self.denom_exp == other.denom_exp {
                return self.numerator.cmp(&other.numerator);
            }
            let l = self.denom_exp.max(other.denom_exp);
            let a = &self.numerator * big_pow(self.prime, l - self.denom_exp);
            let b = &other.numerator * big_pow(other.prime, l - other.denom_exp);
            a.cmp(&b)
        })
    }
}

impl PartialOrd for PAdicScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PAdicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}^{}", self.numerator, self.prime, self.denom_exp)
    }
}

fn parse_prime_power(s: &str) -> Result<(u32, i64)> {
    let (p, e) = s
        .trim()
        .split_once('^')
        .ok_or_else(|| Error::Parse(format!("expected p^e, got {s:?}")))?;
    let p: u32 = p.trim().parse().map_err(|_| Error::Parse(format!("bad prime in {s:?}")))?;
    let e: i64 = e.trim().parse().map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
    Ok((p, e))
}

impl FromStr for PAdicScalar {
    type Err = Error;

    /// Parses `"k/p^l"`, e.g. `"5/2^3"`. Non-canonical inputs are normalized.
    fn from_str(s: &str) -> Result<Self> {
        let (k, rest) = s
            .trim()
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("expected k/p^l, got {s:?}")))?;
        let k: BigInt = k.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let (p, l) = parse_prime_power(rest)?;
        check_prime(p)?;
        if l >= 0 {
            Ok(PAdicScalar::normalized(p, k, l as u32))
        } else {
            Ok(PAdicScalar::normalized(p, k * big_pow(p, (-l) as u32), 0))
        }
    }
}

impl Serialize for PAdicScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PAdicScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A point of the circle `e^{2πi q}`, stored as the exact rational `q ∈ [0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitPhase(BigRational);

impl UnitPhase {
    pub fn new(q: BigRational) -> Self {
        let r = &q - q.floor();
        UnitPhase(r)
    }

    pub fn zero() -> Self {
        UnitPhase(BigRational::zero())
    }

    pub fn from_ratio(num: i64, den: u64) -> Self {
        Self::new(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn scale(&self, k: &BigInt) -> UnitPhase {
        UnitPhase::new(&self.0 * BigRational::from_integer(k.clone()))
    }
}

impl Add for &UnitPhase {
    type Output = UnitPhase;

    fn add(self, rhs: &UnitPhase) -> UnitPhase {
        UnitPhase::new(&self.0 + &rhs.0)
    }
}

impl Sub for &UnitPhase {
    type Output = UnitPhase;

    fn sub(self, rhs: &UnitPhase) -> UnitPhase {
        UnitPhase::new(&self.0 - &rhs.0)
    }
}

impl Neg for &UnitPhase {
    type Output = UnitPhase;

    fn neg(self) -> UnitPhase {
        UnitPhase::new(-&self.0)
    }
}

impl fmt::Display for UnitPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for UnitPhase {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(&self.0)
    }
}

/// The closed ball `B(center, p^n) = center + p^{-n} Z_p`.
///
/// The center is reduced modulo `p^{-n} Z_p` on construction, so two values
/// denoting the same ball compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ball {
    center: PAdicScalar,
    radius_exp: i64,
}

impl Ball {
    pub fn new(center: PAdicScalar, radius_exp: i64) -> Self {
        Ball { center: center.reduce_mod(-radius_exp), radius_exp }
    }

    pub fn centered_at_zero(prime: u32, radius_exp: i64) -> Result<Self> {
        Ok(Ball::new(PAdicScalar::zero(prime)?, radius_exp))
    }

    pub fn center(&self) -> &PAdicScalar {
        &self.center
    }

    pub fn radius_exp(&self) -> i64 {
        self.radius_exp
    }

    pub fn prime(&self) -> u32 {
        self.center.prime
    }

    pub fn contains(&self, x: &PAdicScalar) -> bool {
        x.prime == self.center.prime && (x - &self.center).norm_at_most(self.radius_exp)
    }

    pub fn contains_ball(&self, other: &Ball) -> bool {
        other.radius_exp <= self.radius_exp && self.contains(&other.center)
    }

    /// Haar measure `p^n`, normalized so that `Z_p` has measure one.
    pub fn measure(&self) -> BigRational {
        rational_pow(self.prime(), self.radius_exp)
    }

    /// The `p` maximal proper sub-balls, of radius `p^{n-1}`.
    pub fn sub_balls(&self) -> Vec<Ball> {
        let step = PAdicScalar::power_unchecked(self.prime(), -self.radius_exp);
        (0..self.prime())
            .map(|j| {
                let c = &self.center + &step.mul_int(&BigInt::from(j));
                Ball::new(c, self.radius_exp - 1)
            })
            .collect()
    }

    /// All sub-balls of radius `p^scale` (`scale <= n`), at most `limit` of them.
    pub fn cells(&self, scale: i64, limit: usize) -> Result<Vec<Ball>> {
        if scale > self.radius_exp {
            return Err(Error::Precondition(format!(
                "cell scale {scale} exceeds ball radius exponent {}",
                self.radius_exp
            )));
        }
        let depth = (self.radius_exp - scale) as u32;
        let count = (self.prime() as u128).checked_pow(depth).unwrap_or(u128::MAX);
        if count > limit as u128 {
            return Err(Error::TooLarge(format!(
                "{count} cells of radius {}^{scale} in {self}",
                self.prime()
            )));
        }
        let step = PAdicScalar::power_unchecked(self.prime(), -self.radius_exp);
        Ok((0..count as u64)
            .map(|k| Ball::new(&self.center + &step.mul_int(&BigInt::from(k)), scale))
            .collect())
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B({}; {}^{})", self.center, self.prime(), self.radius_exp)
    }
}

impl FromStr for Ball {
    type Err = Error;

    /// Parses `"B(center; p^n)"`, e.g. `"B(1/2^0; 2^-1)"`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix("B(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("expected B(center; p^n), got {s:?}")))?;
        let (c, r) = inner
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("missing ';' in {s:?}")))?;
        let center: PAdicScalar = c.parse()?;
        let (p, n) = parse_prime_power(r)?;
        if p != center.prime {
            return Err(Error::PrimeMismatch(center.prime, p));
        }
        Ok(Ball::new(center, n))
    }
}

impl Serialize for Ball {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ball {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn valuation(x: &PAdicScalar) -> Valuation {
    x.valuation()
}

pub fn frac_part(x: &PAdicScalar) -> UnitPhase {
    x.frac_part()
}

/// Phase of the character `χ_ξ(x) = χ(ξ x)`.
pub fn character(xi: &PAdicScalar, x: &PAdicScalar) -> Result<UnitPhase> {
    Ok(xi.try_mul(x)?.frac_part())
}

/// Exact value of `∫_B χ(ξ x) dx`: `χ(cξ)·p^n` when `|ξ|_p <= p^{-n}`, else zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BallIntegral {
    Zero,
    Term { phase: UnitPhase, magnitude: BigRational },
}

pub fn ball_character_integral(ball: &Ball, xi: &PAdicScalar) -> Result<BallIntegral> {
    if ball.prime() != xi.prime {
        return Err(Error::PrimeMismatch(ball.prime(), xi.prime));
    }
    if !xi.norm_at_most(-ball.radius_exp) {
        return Ok(BallIntegral::Zero);
    }
    Ok(BallIntegral::Term { phase: character(xi, &ball.center)?, magnitude: ball.measure() })
}

/// The set `{v_p(x - y) : x ≠ y}` of a finite point set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct AdmissibleOrderSet {
    orders: BTreeSet<i64>,
}

impl AdmissibleOrderSet {
    pub fn from_orders(orders: impl IntoIterator<Item = i64>) -> Self {
        AdmissibleOrderSet { orders: orders.into_iter().collect() }
    }

    pub fn orders(&self) -> &BTreeSet<i64> {
        &self.orders
    }

    pub fn contains(&self, i: i64) -> bool {
        self.orders.contains(&i)
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }
}

pub fn admissible_orders(points: &[PAdicScalar]) -> Result<AdmissibleOrderSet> {
    let distinct: BTreeSet<&PAdicScalar> = points.iter().collect();
    if distinct.len() < 2 {
        return Err(Error::TooFewPoints(distinct.len()));
    }
    let pts: Vec<&PAdicScalar> = distinct.into_iter().collect();
    let mut orders = BTreeSet::new();
    for (i, x) in pts.iter().enumerate() {
        for y in &pts[i + 1..] {
            let d = x.try_sub(y)?;
            if let Valuation::Finite(v) = d.valuation() {
                orders.insert(v);
            }
        }
    }
    Ok(AdmissibleOrderSet { orders })
}
