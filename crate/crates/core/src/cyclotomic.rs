//! Exact vanishing tests for integer combinations of `N`-th roots of unity.
//!
//! A sum `Σ a_j ω_N^j` is zero exactly when the polynomial `Σ a_j x^j` is
//! divisible by the cyclotomic polynomial `Φ_N`, so the test is a single
//! polynomial remainder over the integers.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::padic::{PAdicScalar, UnitPhase};

/// Prime factorization `[(p, e), ...]` with primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn supported_factors(order: u64) -> Result<Vec<(u64, u32)>> {
    if order == 0 {
        return Err(Error::UnsupportedOrder(0));
    }
    let f = factorize(order);
    if f.len() > 2 {
        return Err(Error::UnsupportedOrder(order));
    }
    Ok(f)
}

/// `a / b` for monic integer polynomials, low degree first; `None` if inexact.
fn poly_div_exact(a: &[i64], b: &[i64]) -> Option<Vec<i64>> {
    let db = b.len() - 1;
    if a.len() < b.len() {
        return None;
    }
    let mut r = a.to_vec();
    let mut q = vec![0i64; a.len() - db];
    for i in (db..a.len()).rev() {
        let c = r[i];
        if c != 0 {
            q[i - db] = c;
            for (k, bk) in b.iter().enumerate() {
                r[i - db + k] -= c * bk;
            }
        }
    }
    r.iter().all(|&c| c == 0).then_some(q)
}

/// `Φ_n` for squarefree `n`, by dividing `x^n - 1` by `Φ_d` for each proper divisor `d`.
fn squarefree_cyclotomic(n: u64, primes: &[u64]) -> Vec<i64> {
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    let mut divisors = vec![1u64];
    for &p in primes {
        let more: Vec<u64> = divisors.iter().map(|d| d * p).collect();
        divisors.extend(more);
    }
    for d in divisors.into_iter().filter(|&d| d != n) {
        let sub: Vec<u64> = primes.iter().copied().filter(|p| d % p == 0).collect();
        let phi = squarefree_cyclotomic(d, &sub);
        num = poly_div_exact(&num, &phi).expect("cyclotomic factor divides x^n - 1");
    }
    num
}

/// The cyclotomic polynomial `Φ_N` for an order with at most two prime factors,
/// kept together with `N` so repeated zero tests avoid recomputing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicModulus {
    order: u64,
    phi: Vec<i64>,
    /// `Some(m)` when `N = p^n` and `m = p^{n-1}`: the fiber-equality shortcut applies.
    fiber: Option<(u64, u64)>,
}

impl CyclotomicModulus {
    pub fn new(order: u64) -> Result<Self> {
        let factors = supported_factors(order)?;
        let primes: Vec<u64> = factors.iter().map(|&(p, _)| p).collect();
        let rad: u64 = primes.iter().product();
        let base = squarefree_cyclotomic(rad, &primes);
        let stretch = (order / rad) as usize;
        let mut phi = vec![0i64; (base.len() - 1) * stretch + 1];
        for (k, c) in base.iter().enumerate() {
            phi[k * stretch] = *c;
        }
        let fiber = match factors.as_slice() {
            [(p, _)] => Some((*p, order / p)),
            _ => None,
        };
        Ok(CyclotomicModulus { order, phi, fiber })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Coefficients of `Φ_N`, lowest degree first.
    pub fn phi(&self) -> &[i64] {
        &self.phi
    }

    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn is_vanishing(&self, s: &RootSum) -> Result<bool> {
        if s.order != self.order {
            return Err(Error::Precondition(format!(
                "root sum of order {} tested against modulus of order {}",
                s.order, self.order
            )));
        }
        let small: Option<Vec<i64>> = s.coeffs.iter().map(|c| c.to_i64()).collect();
        if let Some(v) = small {
            if let Some(ans) = self.vanishes_checked(&v) {
                return Ok(ans);
            }
        }
        Ok(self.vanishes_big(&s.coeffs))
    }

    /// Zero test for a dense `i64` coefficient vector of length `N`.
    pub fn vanishes_i64(&self, coeffs: &[i64]) -> bool {
        assert_eq!(coeffs.len() as u64, self.order, "coefficient vector length must equal the order");
        match self.vanishes_checked(coeffs) {
            Some(ans) => ans,
            None => {
                let big: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
                self.vanishes_big(&big)
            }
        }
    }

    /// `None` on `i64` overflow.
    fn vanishes_checked(&self, coeffs: &[i64]) -> Option<bool> {
        let d = self.degree();
        let mut r = coeffs.to_vec();
        for i in (d..r.len()).rev() {
            let c = r[i];
            if c == 0 {
                continue;
            }
            for (k, &pk) in self.phi.iter().enumerate() {
                if pk != 0 {
                    let idx = i - d + k;
                    r[idx] = r[idx].checked_sub(c.checked_mul(pk)?)?;
                }
            }
        }
        Some(r[..d].iter().all(|&c| c == 0))
    }

    fn vanishes_big(&self, coeffs: &[BigInt]) -> bool {
        let d = self.degree();
        let mut r = coeffs.to_vec();
        for i in (d..r.len()).rev() {
            if r[i].is_zero() {
                continue;
            }
            let c = r[i].clone();
            for (k, &pk) in self.phi.iter().enumerate() {
                if pk != 0 {
                    r[i - d + k] -= &c * pk;
                }
            }
        }
        r[..d].iter().all(Zero::is_zero)
    }

    /// For `N = p^n`, the pair `(p, p^{n-1})`.
    pub fn prime_power_fiber(&self) -> Option<(u64, u64)> {
        self.fiber
    }
}

/// `Σ_j coeffs[j]·e^{2πi j/N}` with a dense coefficient vector over `Z/NZ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootSum {
    order: u64,
    coeffs: Vec<BigInt>,
}

impl RootSum {
    pub fn zero(order: u64) -> Result<Self> {
        supported_factors(order)?;
        Ok(RootSum { order, coeffs: vec![BigInt::zero(); order as usize] })
    }

    /// Builds from `(index, coefficient)` pairs; indices are reduced mod `N`
    /// and repeated indices accumulate.
    pub fn from_sparse<I, C>(order: u64, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut s = RootSum::zero(order)?;
        for (j, a) in entries {
            let idx = j.mod_floor(&(order as i64)) as usize;
            s.coeffs[idx] += a.into();
        }
        Ok(s)
    }

    pub fn from_dense(order: u64, coeffs: &[i64]) -> Result<Self> {
        if coeffs.len() as u64 != order {
            return Err(Error::Precondition(format!(
                "expected {order} coefficients, got {}",
                coeffs.len()
            )));
        }
        RootSum::from_sparse(order, coeffs.iter().enumerate().map(|(j, &a)| (j as i64, a)))
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, j: u64) -> &BigInt {
        &self.coeffs[(j % self.order) as usize]
    }

    /// Nonzero entries in index order.
    pub fn support(&self) -> impl Iterator<Item = (u64, &BigInt)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, c)| (j as u64, c))
    }
}

impl fmt::Display for RootSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[N={}]", self.order)?;
        for (j, c) in self.support() {
            write!(f, " {c}@{j}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Coef {
    Small(i64),
    Big(String),
}

#[derive(Serialize, Deserialize)]
struct RootSumRepr {
    order: u64,
    coeffs: BTreeMap<String, Coef>,
}

impl Serialize for RootSum {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = self
            .support()
            .map(|(j, c)| {
                let v = c.to_i64().map(Coef::Small).unwrap_or_else(|| Coef::Big(c.to_string()));
                (j.to_string(), v)
            })
            .collect();
        RootSumRepr { order: self.order, coeffs }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RootSum {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = RootSumRepr::deserialize(deserializer)?;
        let mut entries = Vec::new();
        for (k, v) in repr.coeffs {
            let j: u64 = k.parse().map_err(|_| D::Error::custom(format!("bad index {k:?}")))?;
            if j >= repr.order {
                return Err(D::Error::custom(format!("index {j} out of range for order {}", repr.order)));
            }
            let a = match v {
                Coef::Small(a) => BigInt::from(a),
                Coef::Big(s) => s.parse().map_err(|_| D::Error::custom(format!("bad coefficient {s:?}")))?,
            };
            entries.push((j as i64, a));
        }
        RootSum::from_sparse(repr.order, entries).map_err(D::Error::custom)
    }
}

pub fn is_vanishing(s: &RootSum) -> Result<bool> {
    CyclotomicModulus::new(s.order)?.is_vanishing(s)
}

/// Replaces index `j` by `u·j mod N`.
pub fn rotate(s: &RootSum, u: i64) -> Result<RootSum> {
    let n = s.order as i64;
    let u = u.mod_floor(&n);
    if n > 1 && u.gcd(&n) != 1 {
        return Err(Error::NotAUnit(u, s.order));
    }
    let mut out = RootSum::zero(s.order)?;
    for (j, c) in s.support() {
        let idx = ((j as i128 * u as i128) % n as i128) as usize;
        out.coeffs[idx] += c;
    }
    Ok(out)
}

/// The `p` points `{r, r + 1/p, ..., r + (p-1)/p}` modulo `Z_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PCycle {
    base: PAdicScalar,
}

impl PCycle {
    pub fn new(base: PAdicScalar) -> Self {
        PCycle { base }
    }

    pub fn base(&self) -> &PAdicScalar {
        &self.base
    }

    pub fn members(&self) -> Vec<PAdicScalar> {
        let p = self.base.prime();
        let step = PAdicScalar::power_unchecked(p, -1);
        (0..p).map(|s| &self.base + &step.mul_int(&BigInt::from(s))).collect()
    }

    /// Indices of the members as `p^n`-th roots of unity, ascending.
    pub fn indices(&self, n: u32) -> Vec<u64> {
        let p = self.base.prime() as u64;
        let order = p.pow(n);
        let mut out: Vec<u64> = self
            .members()
            .iter()
            .map(|x| {
                let r = x.mul_prime_power(n as i64).reduce_mod(n as i64);
                r.numerator().to_u64().expect("index is a nonnegative integer") % order
            })
            .collect();
        out.sort_unstable();
        out
    }
}

/// Peels cycles `{j, j + p^{n-1}, ..., j + (p-1)p^{n-1}}` off a nonnegative
/// vanishing sum of order `p^n`, always taking the smallest remaining index.
pub fn p_cycle_decompose(s: &RootSum) -> Result<Vec<PCycle>> {
    let factors = supported_factors(s.order)?;
    let (p, n) = match factors.as_slice() {
        [(p, n)] => (*p, *n),
        [] => (1, 0),
        _ => return Err(Error::Precondition(format!("order {} is not a prime power", s.order))),
    };
    if s.coeffs.iter().any(Signed::is_negative) {
        return Err(Error::Precondition("coefficients must be nonnegative".into()));
    }
    if !is_vanishing(s)? {
        return Err(Error::NotDecomposable(format!("{s} does not vanish")));
    }
    if p == 1 {
        return Ok(Vec::new());
    }
    let stride = s.order / p;
    let mut rest: Vec<BigInt> = s.coeffs.clone();
    let mut out = Vec::new();
    while let Some(j) = rest.iter().position(|c| !c.is_zero()) {
        for k in 0..p {
            let idx = (j as u64 + k * stride) as usize % rest.len();
            rest[idx] -= 1;
            if rest[idx].is_negative() {
                return Err(Error::NotDecomposable(format!("peeling at index {j} went negative")));
            }
        }
        out.push(PCycle::new(PAdicScalar::normalized(p as u32, BigInt::from(j), n)));
    }
    Ok(out)
}

/// Aggregates weighted phases into a root sum of order `lcm(denominators)`.
pub fn phases_to_rootsum(phases: &[(UnitPhase, BigInt)]) -> Result<RootSum> {
    let order = phases
        .iter()
        .map(|(ph, _)| ph.denominator().clone())
        .fold(BigInt::from(1), |acc, d| acc.lcm(&d));
    let order_u = order.to_u64().ok_or_else(|| Error::UnsupportedOrder(u64::MAX))?;
    let mut s = RootSum::zero(order_u)?;
    for (ph, w) in phases {
        let scaled: BigRational = ph.value() * BigRational::from_integer(order.clone());
        let idx = scaled.to_integer().to_usize().expect("index below order");
        s.coeffs[idx] += w;
    }
    Ok(s)
}

/// Whether `Σ w_k e^{2πi q_k}` is zero for rational weights `w_k`.
pub fn weighted_phases_vanish(terms: &[(UnitPhase, BigRational)]) -> Result<bool> {
    let den = terms.iter().fold(BigInt::from(1), |acc, (_, w)| acc.lcm(w.denom()));
    let scaled: Vec<(UnitPhase, BigInt)> = terms
        .iter()
        .map(|(ph, w)| (ph.clone(), (w * BigRational::from_integer(den.clone())).to_integer()))
        .collect();
    is_vanishing(&phases_to_rootsum(&scaled)?)
}
