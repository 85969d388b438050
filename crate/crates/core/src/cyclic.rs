//! Group rings D[Cp] for a cyclic group of odd prime order p, with
//! coefficient domains D ∈ {Z, Q, Z/2, Z/4}.
//!
//! Elements are coefficient vectors of length p (entry i belongs to t^i);
//! multiplication is convolution with exponents mod p. The module carries
//! the structural maps used downstream: the augmentation, the involution
//! * (t ↦ t^{−1}), the automorphisms φ_i (t ↦ t^i), evaluation at a
//! primitive p-th root of unity, the combined map Δ = (augmentation,
//! ε-evaluation) — which is injective on Q[Cp] — and the norm-style
//! products over Galois orbits. On top of those sit the unit-group tools:
//! exact inversion in Z[Cp], Bass units, and the splitting of an
//! augmentation-one unit as t^i times a unit congruent to 1 mod (t−1)².

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cyclotomic::CyclotomicElt;
use crate::density::is_odd_prime;
use crate::error::{Error, Result};
use crate::linalg;
use crate::ratio::{is_integer, json_from_rat, rat_from_json, rat_int, Rat};

/// Coefficient domain tag. The modular domains store canonical residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    Z,
    Q,
    Z2,
    Z4,
}

impl Domain {
    pub fn modulus(self) -> Option<u64> {
        match self {
            Domain::Z | Domain::Q => None,
            Domain::Z2 => Some(2),
            Domain::Z4 => Some(4),
        }
    }

    /// Canonical form of one coefficient in this domain: integers stay as
    /// they are, residues land in [0, m). Fractions are rejected outside Q.
    fn canon(self, c: Rat) -> Result<Rat> {
        match self {
            Domain::Q => Ok(c),
            Domain::Z => {
                if is_integer(&c) {
                    Ok(c)
                } else {
                    Err(Error::Precondition(format!(
                        "coefficient {c} is not an integer (domain Z)"
                    )))
                }
            }
            Domain::Z2 | Domain::Z4 => {
                if !is_integer(&c) {
                    return Err(Error::Precondition(format!(
                        "coefficient {c} is not an integer (modular domain)"
                    )));
                }
                let m = BigInt::from(self.modulus().unwrap());
                let mut r = c.numer() % &m;
                if r.is_negative() {
                    r += &m;
                }
                Ok(Rat::from_integer(r))
            }
        }
    }

    fn name(self) -> &'static str {
        match self {
            Domain::Z => "Z",
            Domain::Q => "Q",
            Domain::Z2 => "Z2",
            Domain::Z4 => "Z4",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicRingElt {
    p: u64,
    domain: Domain,
    /// Exactly p entries; entry i is the coefficient of t^i.
    coeffs: Vec<Rat>,
}

fn check_prime(p: u64) -> Result<()> {
    if is_odd_prime(p) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{p} is not an odd prime")))
    }
}

impl CyclicRingElt {
    /// Builds an element from coefficients of t⁰, t¹, … of any length;
    /// exponents fold mod p and every coefficient is canonicalised.
    pub fn from_coeffs(p: u64, domain: Domain, coeffs: Vec<Rat>) -> Result<Self> {
        check_prime(p)?;
        let mut out = vec![rat_int(0); p as usize];
        for (e, c) in coeffs.into_iter().enumerate() {
            out[e % p as usize] += c;
        }
        let coeffs = out.into_iter().map(|c| domain.canon(c)).collect::<Result<_>>()?;
        Ok(CyclicRingElt { p, domain, coeffs })
    }

    pub fn from_int_coeffs(p: u64, domain: Domain, coeffs: &[i64]) -> Result<Self> {
        Self::from_coeffs(p, domain, coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    pub fn zero(p: u64, domain: Domain) -> Result<Self> {
        check_prime(p)?;
        Ok(CyclicRingElt { p, domain, coeffs: vec![rat_int(0); p as usize] })
    }

    pub fn one(p: u64, domain: Domain) -> Result<Self> {
        Self::t_pow(p, domain, 0)
    }

    /// The basis element t^k.
    pub fn t_pow(p: u64, domain: Domain, k: u64) -> Result<Self> {
        let mut x = Self::zero(p, domain)?;
        x.coeffs[(k % p) as usize] = rat_int(1);
        Ok(x)
    }

    /// σ = 1 + t + ⋯ + t^{p−1}, the sum over the group.
    pub fn sigma(p: u64, domain: Domain) -> Result<Self> {
        Self::from_coeffs(p, domain, vec![rat_int(1); p as usize])
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Rat {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rat::is_zero)
    }

    /// Coerces into `target`. Identity always works; otherwise only the
    /// embeddings and reductions out of Z are meaningful.
    pub fn coerce(&self, target: Domain) -> Result<Self> {
        if self.domain == target {
            return Ok(self.clone());
        }
        if self.domain != Domain::Z {
            return Err(Error::DomainMismatch(format!(
                "no coercion {} -> {}",
                self.domain.name(),
                target.name()
            )));
        }
        let coeffs =
            self.coeffs.iter().map(|c| target.canon(c.clone())).collect::<Result<_>>()?;
        Ok(CyclicRingElt { p: self.p, domain: target, coeffs })
    }

    /// Common domain for a binary operation: equal domains, or Z lifted to
    /// the other side's domain.
    fn align(&self, other: &Self) -> Result<(Self, Self)> {
        if self.p != other.p {
            return Err(Error::DomainMismatch(format!(
                "cyclic ring elements over p = {} and p = {}",
                self.p, other.p
            )));
        }
        if self.domain == other.domain {
            return Ok((self.clone(), other.clone()));
        }
        match (self.domain, other.domain) {
            (Domain::Z, d) => Ok((self.coerce(d)?, other.clone())),
            (d, Domain::Z) => Ok((self.clone(), other.coerce(d)?)),
            (a, b) => Err(Error::DomainMismatch(format!(
                "incompatible domains {} and {}",
                a.name(),
                b.name()
            ))),
        }
    }

    fn canon_in_place(mut self) -> Self {
        if self.domain.modulus().is_some() {
            for c in self.coeffs.iter_mut() {
                let canon = self.domain.canon(std::mem::replace(c, rat_int(0))).unwrap();
                *c = canon;
            }
        }
        self
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.align(other)?;
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        Ok(CyclicRingElt { p: a.p, domain: a.domain, coeffs }.canon_in_place())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.align(other)?;
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect();
        Ok(CyclicRingElt { p: a.p, domain: a.domain, coeffs }.canon_in_place())
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| -c).collect();
        CyclicRingElt { p: self.p, domain: self.domain, coeffs }.canon_in_place()
    }

    /// Scalar multiple. The scalar must be an integer unless the domain
    /// is Q.
    pub fn scale(&self, k: &Rat) -> Result<Self> {
        if self.domain != Domain::Q && !is_integer(k) {
            return Err(Error::Precondition(format!(
                "scalar {k} is not an integer (domain {})",
                self.domain.name()
            )));
        }
        let coeffs = self.coeffs.iter().map(|c| c * k).collect();
        Ok(CyclicRingElt { p: self.p, domain: self.domain, coeffs }.canon_in_place())
    }

    /// Convolution product with exponents mod p.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.align(other)?;
        let p = a.p as usize;
        let mut coeffs = vec![rat_int(0); p];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                coeffs[(i + j) % p] += x * y;
            }
        }
        Ok(CyclicRingElt { p: a.p, domain: a.domain, coeffs }.canon_in_place())
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Self::one(self.p, self.domain).unwrap();
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

    /// Sum of coefficients — the image under the ring map t ↦ 1.
    pub fn augmentation(&self) -> Rat {
        let mut acc = rat_int(0);
        for c in &self.coeffs {
            acc += c;
        }
        self.domain.canon(acc).unwrap()
    }

    /// The involution t^i ↦ t^{p−i}; equals φ_{p−1}.
    pub fn star(&self) -> Self {
        self.phi(self.p - 1).unwrap()
    }

    /// The automorphism φ_i : t ↦ t^i, for i ≢ 0 (mod p).
    pub fn phi(&self, i: u64) -> Result<Self> {
        let p = self.p as usize;
        let i = (i % self.p) as usize;
        if i == 0 {
            return Err(Error::Precondition("automorphism index must be nonzero mod p".into()));
        }
        let mut coeffs = vec![rat_int(0); p];
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs[(i * j) % p] = c.clone();
        }
        Ok(CyclicRingElt { p: self.p, domain: self.domain, coeffs })
    }

    /// Evaluation t ↦ ε, reduced mod Φ_p. Exact domains only.
    pub fn eval_eps(&self) -> Result<CyclotomicElt> {
        match self.domain {
            Domain::Z | Domain::Q => CyclotomicElt::from_coeffs(self.p, self.coeffs.clone()),
            d => Err(Error::Precondition(format!(
                "evaluation at a root of unity needs domain Z or Q, got {}",
                d.name()
            ))),
        }
    }

    /// Δ(x) = (x(1), x(ε)): a ring homomorphism Q[Cp] → Q × Q(ε), and
    /// injective — both components vanish only on the zero element.
    pub fn delta(&self) -> Result<(Rat, CyclotomicElt)> {
        Ok((self.augmentation(), self.eval_eps()?))
    }

    /// Exact inverse in Z[Cp]: solve the p×p multiplication system over Q,
    /// then insist on integer coefficients.
    pub fn invert_unit(&self) -> Result<Self> {
        if self.domain != Domain::Z {
            return Err(Error::Precondition(format!(
                "integral inversion needs domain Z, got {}",
                self.domain.name()
            )));
        }
        let p = self.p as usize;
        // Column j of the matrix is x·t^j: coefficient rows are rotations.
        let a: Vec<Vec<Rat>> = (0..p)
            .map(|row| (0..p).map(|col| self.coeffs[(row + p - col) % p].clone()).collect())
            .collect();
        let mut rhs = vec![rat_int(0); p];
        rhs[0] = rat_int(1);
        let y = linalg::solve(a, rhs).ok_or(Error::NotAUnit)?;
        if !y.iter().all(is_integer) {
            return Err(Error::NotAUnit);
        }
        let inv = CyclicRingElt { p: self.p, domain: Domain::Z, coeffs: y };
        debug_assert!(self.mul(&inv).unwrap() == Self::one(self.p, Domain::Z).unwrap());
        Ok(inv)
    }

    /// N(x) = ∏_{i=1}^{p−1} φ_i(x).
    pub fn full_norm(&self) -> Self {
        let mut acc = Self::one(self.p, self.domain).unwrap();
        for i in 1..self.p {
            acc = acc.mul(&self.phi(i).unwrap()).unwrap();
        }
        acc
    }

    /// ∏_{i=1}^{(p−1)/2} φ_i(x), the product over one representative of
    /// each conjugate pair {i, p−i}.
    pub fn half_norm(&self) -> Self {
        let mut acc = Self::one(self.p, self.domain).unwrap();
        for i in 1..=(self.p - 1) / 2 {
            acc = acc.mul(&self.phi(i).unwrap()).unwrap();
        }
        acc
    }

    /// Residue of an integer coefficient mod m, in [0, m).
    fn residue(c: &Rat, m: u64) -> u64 {
        debug_assert!(is_integer(c));
        let mm = BigInt::from(m);
        let mut r = c.numer() % &mm;
        if r.is_negative() {
            r += &mm;
        }
        r.to_u64().unwrap()
    }

    /// First-order coefficient of x at t = 1: Σ j·x_j mod p. For a unit of
    /// augmentation 1 this is the exponent i with x ≡ t^i mod (t−1)².
    fn drift_index(&self) -> u64 {
        let mut acc = rat_int(0);
        for (j, c) in self.coeffs.iter().enumerate() {
            acc += c * rat_int(j as i64);
        }
        Self::residue(&acc, self.p)
    }

    /// Congruence test for x ≡ 1 mod (t−1)² in Z[Cp]: augmentation 1 and
    /// Σ j·x_j ≡ 0 (mod p). Together with unit-ness this characterises the
    /// subgroup U2 of units congruent to 1 mod (t−1)².
    pub fn is_u2_member(&self) -> Result<bool> {
        if self.domain != Domain::Z {
            return Err(Error::Precondition(format!(
                "congruence test needs domain Z, got {}",
                self.domain.name()
            )));
        }
        Ok(self.augmentation() == rat_int(1) && self.drift_index() == 0)
    }

    /// Splits a unit w of augmentation 1 as w = t^i · v with v ≡ 1 mod
    /// (t−1)². The cofactor v is automatically *-invariant.
    pub fn u1_decompose(&self) -> Result<U1Decomposition> {
        if self.domain != Domain::Z {
            return Err(Error::Precondition(format!(
                "unit splitting needs domain Z, got {}",
                self.domain.name()
            )));
        }
        if self.augmentation() != rat_int(1) {
            return Err(Error::Precondition(format!(
                "unit splitting needs augmentation 1, got {}",
                self.augmentation()
            )));
        }
        self.invert_unit()?; // NotAUnit propagates
        let i = self.drift_index();
        let v = Self::t_pow(self.p, Domain::Z, (self.p - i) % self.p)?.mul(self)?;
        assert!(
            v.is_u2_member().unwrap() && v.star() == v,
            "cofactor of a unit escaped U2; the splitting argument is broken"
        );
        Ok(U1Decomposition { i, v })
    }

    /// The Bass unit (1 + t + ⋯ + t^{k−1})^m + ((1 − k^m)/p)·σ, defined
    /// whenever k^m ≡ 1 (mod p).
    pub fn bass_unit(p: u64, k: u64, m: u64) -> Result<Self> {
        check_prime(p)?;
        if !(1 < k && k < p) {
            return Err(Error::Precondition(format!("need 1 < k < p, got k = {k}")));
        }
        let km = BigInt::from(k).modpow(&BigInt::from(m), &BigInt::from(p));
        if km != BigInt::from(1) {
            return Err(Error::Precondition(format!(
                "{k}^{m} is not 1 mod {p}; no Bass unit there"
            )));
        }
        let base = Self::from_coeffs(
            p,
            Domain::Z,
            (0..k).map(|_| rat_int(1)).collect(),
        )?;
        let power = base.pow(m);
        let exact_km = BigInt::from(k).pow(m as u32);
        let coeff = Rat::from_integer((BigInt::from(1) - exact_km) / BigInt::from(p));
        let correction = Self::sigma(p, Domain::Z)?.scale(&coeff)?;
        let unit = power.add(&correction)?;
        debug_assert_eq!(unit.augmentation(), rat_int(1));
        Ok(unit)
    }
}

/// A unit of augmentation 1 split as t^i · v with v ≡ 1 mod (t−1)².
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct U1Decomposition {
    pub i: u64,
    pub v: CyclicRingElt,
}

#[derive(Serialize, Deserialize)]
struct CycRingJson {
    p: u64,
    domain: Domain,
    coeffs: Vec<serde_json::Value>,
}

impl Serialize for CyclicRingElt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CycRingJson {
            p: self.p,
            domain: self.domain,
            coeffs: self.coeffs.iter().map(json_from_rat).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CyclicRingElt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = CycRingJson::deserialize(deserializer)?;
        if raw.coeffs.len() != raw.p as usize {
            return Err(D::Error::custom(format!(
                "expected {} coefficients for p = {}, got {}",
                raw.p,
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
        CyclicRingElt::from_coeffs(raw.p, raw.domain, coeffs)
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}
