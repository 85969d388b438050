//! Exact arithmetic in Q(ε_p) for odd primes p, where ε is a primitive p-th
//! root of unity.
//!
//! Elements are stored in the power basis 1, ε, …, ε^{p−2}, always reduced:
//! exponents fold via ε^p = 1 and the top power eliminates via
//! ε^{p−1} = −(1 + ε + ⋯ + ε^{p−2}), the relation Φ_p(ε) = 0. Reduction is
//! applied after every multiplication, so equality of elements is equality
//! of coefficient vectors.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::density::is_odd_prime;
use crate::error::{Error, Result};
use crate::ratio::{is_integer, json_from_rat, rat_from_json, rat_int, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicElt {
    p: u64,
    /// Exactly p−1 entries: coefficients of ε⁰ … ε^{p−2}.
    coeffs: Vec<Rat>,
}

fn check_prime(p: u64) -> Result<()> {
    if is_odd_prime(p) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{p} is not an odd prime")))
    }
}

/// Folds a raw coefficient vector indexed by ε⁰ … ε^{p−1} into the power
/// basis by substituting ε^{p−1} = −(1 + ε + ⋯ + ε^{p−2}).
fn reduce_raw(p: u64, mut raw: Vec<Rat>) -> Vec<Rat> {
    let n = (p - 1) as usize;
    debug_assert_eq!(raw.len(), p as usize);
    let top = raw.pop().unwrap();
    if !top.is_zero() {
        for c in raw.iter_mut() {
            *c -= &top;
        }
    }
    debug_assert_eq!(raw.len(), n);
    raw
}

impl CyclotomicElt {
    /// Builds an element from coefficients of ε⁰, ε¹, … of any length;
    /// exponents are folded mod p and the result reduced mod Φ_p.
    pub fn from_coeffs(p: u64, coeffs: Vec<Rat>) -> Result<Self> {
        check_prime(p)?;
        let mut raw = vec![rat_int(0); p as usize];
        for (e, c) in coeffs.into_iter().enumerate() {
            raw[e % p as usize] += c;
        }
        Ok(CyclotomicElt { p, coeffs: reduce_raw(p, raw) })
    }

    /// Internal fast path: an already-reduced integer vector of length p−1.
    pub(crate) fn from_int_vec(p: u64, v: &[i64]) -> Self {
        debug_assert_eq!(v.len(), (p - 1) as usize);
        CyclotomicElt { p, coeffs: v.iter().map(|&c| rat_int(c)).collect() }
    }

    pub fn zero(p: u64) -> Result<Self> {
        check_prime(p)?;
        Ok(CyclotomicElt { p, coeffs: vec![rat_int(0); (p - 1) as usize] })
    }

    pub fn one(p: u64) -> Result<Self> {
        Self::from_rational(p, rat_int(1))
    }

    pub fn from_rational(p: u64, value: Rat) -> Result<Self> {
        let mut x = Self::zero(p)?;
        x.coeffs[0] = value;
        Ok(x)
    }

    pub fn from_integer(p: u64, n: i64) -> Result<Self> {
        Self::from_rational(p, rat_int(n))
    }

    /// ε^k, reduced.
    pub fn eps_pow(p: u64, k: u64) -> Result<Self> {
        check_prime(p)?;
        let mut raw = vec![rat_int(0); p as usize];
        raw[(k % p) as usize] = rat_int(1);
        Ok(CyclotomicElt { p, coeffs: reduce_raw(p, raw) })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rat::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(is_integer)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::DomainMismatch(format!(
                "cyclotomic elements over p = {} and p = {}",
                self.p, other.p
            )))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs =
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(CyclotomicElt { p: self.p, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs =
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(CyclotomicElt { p: self.p, coeffs })
    }

    pub fn neg(&self) -> Self {
        CyclotomicElt { p: self.p, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, k: &Rat) -> Self {
        CyclotomicElt { p: self.p, coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let p = self.p as usize;
        let mut raw = vec![rat_int(0); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                raw[(i + j) % p] += a * b;
            }
        }
        Ok(CyclotomicElt { p: self.p, coeffs: reduce_raw(self.p, raw) })
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Self::one(self.p).unwrap();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).unwrap();
            }
            base = base.mul(&base).unwrap();
            e >>= 1;
        }
        acc
    }

    /// The Galois map σ_i: ε ↦ ε^i, for i ≢ 0 (mod p).
    pub fn galois(&self, i: u64) -> Result<Self> {
        let p = self.p as usize;
        let i = (i % self.p) as usize;
        if i == 0 {
            return Err(Error::Precondition("Galois index must be nonzero mod p".into()));
        }
        let mut raw = vec![rat_int(0); p];
        for (j, c) in self.coeffs.iter().enumerate() {
            raw[(i * j) % p] += c;
        }
        Ok(CyclotomicElt { p: self.p, coeffs: reduce_raw(self.p, raw) })
    }

    /// Complex conjugation ε ↦ ε^{−1} = σ_{p−1}.
    pub fn conjugate(&self) -> Self {
        self.galois(self.p - 1).unwrap()
    }

    /// Field norm N(x) = ∏_{i=1}^{p−1} σ_i(x); always a rational number,
    /// and an integer when x has integer coefficients.
    pub fn norm(&self) -> Rat {
        let mut acc = Self::one(self.p).unwrap();
        for i in 1..self.p {
            acc = acc.mul(&self.galois(i).unwrap()).unwrap();
        }
        assert!(
            acc.coeffs[1..].iter().all(Rat::is_zero),
            "norm landed outside the rationals; reduction is broken"
        );
        acc.coeffs[0].clone()
    }

    /// Unit test for elements of Z[ε]: N(x) = ±1. Errors on non-integral
    /// coefficients, where the norm criterion does not apply.
    pub fn is_unit(&self) -> Result<bool> {
        if !self.is_integral() {
            return Err(Error::Precondition(
                "unit test requires integer coefficients".into(),
            ));
        }
        let n = self.norm();
        Ok(n == rat_int(1) || n == rat_int(-1))
    }

    /// Sum of the stored coefficients. For integral x this is the image of
    /// x in Z[ε]/(1−ε) ≅ Z/p (up to reduction mod p by the caller).
    pub fn coeff_sum(&self) -> Rat {
        let mut acc = rat_int(0);
        for c in &self.coeffs {
            acc += c;
        }
        acc
    }

    /// Numerators as big integers, for integral elements.
    pub fn integer_coeffs(&self) -> Result<Vec<BigInt>> {
        if !self.is_integral() {
            return Err(Error::Precondition("element has non-integer coefficients".into()));
        }
        Ok(self.coeffs.iter().map(|c| c.numer().clone()).collect())
    }
}

#[derive(Serialize, Deserialize)]
struct CycJson {
    p: u64,
    coeffs: Vec<serde_json::Value>,
}

impl Serialize for CyclotomicElt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CycJson { p: self.p, coeffs: self.coeffs.iter().map(json_from_rat).collect() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CyclotomicElt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = CycJson::deserialize(deserializer)?;
        if !is_odd_prime(raw.p) {
            return Err(D::Error::custom(format!("{} is not an odd prime", raw.p)));
        }
        if raw.coeffs.len() != (raw.p - 1) as usize {
            return Err(D::Error::custom(format!(
                "expected {} coefficients for p = {}, got {}",
                raw.p - 1,
                raw.p,
                raw.coeffs.len()
            )));
        }
        let coeffs = raw
            .coeffs
            .iter()
            .map(rat_from_json)
            .collect::<Result<Vec<_>>>()
            .map_err(|e| D::Error::custom(e.to_string()))?;
        Ok(CyclotomicElt { p: raw.p, coeffs })
    }
}
