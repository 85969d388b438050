//! Multiplicative orders, the prime set P = {odd p : ord_p(2) ≡ 2 (mod 4)},
//! the Odoni density constant λ(𝒬, g), and empirical prime scans.
//!
//! Everything is exact: densities are rationals, scans report exact counts,
//! and decimal output exists only in display fields.

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratio::{rat_frac, rat_int, rat_to_decimal, rat_to_string, Rat};

/// Trial-division primality test; the desk scale here never exceeds ~10⁷.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    // 30-wheel: candidates coprime to 2·3·5.
    let mut d = 7u64;
    let wheel = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut w = 0;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += wheel[w];
        w = (w + 1) % wheel.len();
    }
    true
}

pub fn is_odd_prime(n: u64) -> bool {
    n > 2 && is_prime(n)
}

/// All primes ≤ limit by sieve of Eratosthenes.
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// The first `count` odd primes (2 is excluded), in increasing order.
pub fn first_odd_primes(count: usize) -> Vec<u64> {
    if count == 0 {
        return Vec::new();
    }
    // p_n < n(ln n + ln ln n) for n ≥ 6; pad the estimate and grow on a miss.
    let mut limit = {
        let n = (count + 1).max(6) as f64;
        (n * (n.ln() + n.ln().ln())) as u64 + 100
    };
    loop {
        let primes = sieve_primes(limit);
        if primes.len() > count {
            return primes[1..=count].to_vec();
        }
        limit *= 2;
    }
}

fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let m = modulus as u128;
    let mut acc: u128 = 1;
    let mut b = (base % modulus) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
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
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Smallest k ≥ 1 with n^k ≡ 1 (mod p), computed by factoring p−1 and
/// descending: start at p−1 and strip each prime factor while the power
/// still lands on 1.
pub fn mult_order(n: u64, p: u64) -> Result<u64> {
    if !is_odd_prime(p) {
        return Err(Error::Precondition(format!("{p} is not an odd prime")));
    }
    if n % p == 0 {
        return Err(Error::Precondition(format!("gcd({n}, {p}) != 1")));
    }
    let mut order = p - 1;
    for (q, _) in factorize(p - 1) {
        while order % q == 0 && pow_mod(n, order / q, p) == 1 {
            order /= q;
        }
    }
    Ok(order)
}

/// Multiplicative order modulo an arbitrary odd modulus m ≥ 1 (gcd(2, m) = 1
/// is automatic); plain iteration, used only for small group descriptors.
fn order_mod_composite(n: u64, m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    let mut v = n % m;
    let mut k = 1;
    while v != 1 {
        v = v * n % m;
        k += 1;
    }
    k
}

/// Membership in P: ord_p(2) ≡ 2 (mod 4).
pub fn in_p(p: u64) -> Result<bool> {
    Ok(mult_order(2, p)? % 4 == 2)
}

/// Parameters of the Odoni density formula, with the derived quantities:
/// t is the largest exponent with g a perfect t-th power (g = ĝ^t),
/// g̃ is the squarefree part of ĝ, τ(q) = v_q(t) and γ(q) = v_q(g̃).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OdoniParams {
    pub q_set: Vec<u64>,
    pub g: u64,
    pub t: u64,
    pub g_hat: u64,
    pub g_tilde: u64,
}

fn integer_root(g: u64, t: u32) -> Option<u64> {
    let r = (g as f64).powf(1.0 / t as f64).round() as u64;
    for c in r.saturating_sub(1)..=r + 1 {
        if c.checked_pow(t).map(|v| v == g) == Some(true) {
            return Some(c);
        }
    }
    None
}

fn squarefree_part(n: u64) -> u64 {
    let mut out = 1;
    for (q, e) in factorize(n) {
        if e % 2 == 1 {
            out *= q;
        }
    }
    out
}

fn valuation(mut n: u64, q: u64) -> u32 {
    let mut v = 0;
    while n % q == 0 {
        n /= q;
        v += 1;
    }
    v
}

impl OdoniParams {
    pub fn new(q_set: &[u64], g: u64) -> Result<Self> {
        if q_set.is_empty() {
            return Err(Error::Precondition("the prime set must be non-empty".into()));
        }
        for &q in q_set {
            if !is_prime(q) {
                return Err(Error::Precondition(format!("{q} is not prime")));
            }
        }
        let mut q_set: Vec<u64> = q_set.to_vec();
        q_set.sort_unstable();
        q_set.dedup();
        if g < 2 {
            return Err(Error::Precondition("g must exceed 1".into()));
        }
        let mut t = 1u64;
        let mut g_hat = g;
        for cand in (2..=g.ilog2().max(1)).rev() {
            if let Some(root) = integer_root(g, cand) {
                t = cand as u64;
                g_hat = root;
                break;
            }
        }
        let g_tilde = squarefree_part(g_hat);
        Ok(OdoniParams { q_set, g, t, g_hat, g_tilde })
    }

    pub fn tau(&self, q: u64) -> u32 {
        valuation(self.t, q)
    }

    pub fn gamma(&self, q: u64) -> u32 {
        valuation(self.g_tilde, q)
    }
}

/// q^e as an exact rational for possibly negative e.
fn rat_pow(q: u64, e: i64) -> Rat {
    let p = rat_int(q as i64);
    let mut acc = rat_int(1);
    for _ in 0..e.unsigned_abs() {
        acc *= &p;
    }
    if e < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// The density λ(𝒬, g) of primes p such that no prime of 𝒬 divides ord_p(g):
///
///   λ = ∏_{q ∈ 𝒬} (1 − q^{1−τ(q)} / (q² − 1)) + λ*
///
/// with λ* = 0 when 2 ∉ 𝒬 or g̃ ∤ 2·∏𝒬, and otherwise λ* = ∏ c_q:
/// c_q = 1 − γ(q) − q^{1−τ(q)}/(q²−1) for odd q, and c₂ given by a case
/// table over g̃ mod 4 and the 2-adic valuation of t. The published c₂
/// branch for g̃ ≡ 3 (mod 4) has an ambiguous summation bound as printed,
/// so that branch is refused with UnsupportedBranch.
pub fn odoni_lambda(params: &OdoniParams) -> Result<Rat> {
    let mut main = rat_int(1);
    for &q in &params.q_set {
        let tau = params.tau(q) as i64;
        let correction = rat_pow(q, 1 - tau) / rat_int((q * q - 1) as i64);
        main *= rat_int(1) - correction;
    }

    let q_prod: u64 = params.q_set.iter().product();
    let has_two = params.q_set.contains(&2);
    if !has_two || (2 * q_prod) % params.g_tilde != 0 {
        return Ok(main);
    }

    // λ* = ∏ c_q; compute the c₂ factor from its case table, then fold in
    // the odd-prime factors.
    let tau2 = params.tau(2) as i64;
    let mut star = match params.g_tilde % 4 {
        1 => rat_pow(2, -tau2) * rat_frac(1, 3),
        3 => {
            return Err(Error::UnsupportedBranch(
                "c2 for squarefree part = 3 (mod 4): the printed summation bound \
                 \"sum over 1+tau(q) <= n < 2 of 1/2\" is ambiguous"
                    .into(),
            ))
        }
        2 => match valuation(params.t, 2) {
            0 => rat_frac(-1, 24),
            1 => rat_frac(-1, 12),
            _ => rat_pow(2, -tau2) * rat_frac(1, 3), // 4 | t
        },
        _ => unreachable!("g_tilde is squarefree, never 0 mod 4"),
    };
    for &q in &params.q_set {
        if q == 2 {
            continue;
        }
        let tau = params.tau(q) as i64;
        star *=
            rat_int(1 - params.gamma(q) as i64) - rat_pow(q, 1 - tau) / rat_int((q * q - 1) as i64);
    }
    Ok(main + star)
}

/// Density of P, computed as λ({2}, 4) − λ({2}, 2) = 7/12 − 7/24 = 7/24.
pub fn density_of_p() -> Rat {
    let l4 = odoni_lambda(&OdoniParams::new(&[2], 4).unwrap()).unwrap();
    let l2 = odoni_lambda(&OdoniParams::new(&[2], 2).unwrap()).unwrap();
    l4 - l2
}

/// Prime predicates available to scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Predicate {
    /// ord_p(2) ≡ 2 (mod 4).
    #[serde(rename = "in_P")]
    InP,
    /// ord_p(2) odd.
    #[serde(rename = "ord2_odd")]
    Ord2Odd,
    /// ord_p(2) even.
    #[serde(rename = "ord2_even")]
    Ord2Even,
    /// The filter under which Z[Q8 × Cp] has nonzero nilpotent elements:
    /// ord_p(2) even.
    #[serde(rename = "case_iii")]
    CaseIii,
}

impl Predicate {
    pub fn evaluate(self, p: u64) -> Result<bool> {
        let ord = mult_order(2, p)?;
        Ok(match self {
            Predicate::InP => ord % 4 == 2,
            Predicate::Ord2Odd => ord % 2 == 1,
            Predicate::Ord2Even | Predicate::CaseIii => ord % 2 == 0,
        })
    }

    /// Chebotarev density of the predicate, as an exact rational.
    pub fn theoretical_density(self) -> Rat {
        let odd = odoni_lambda(&OdoniParams::new(&[2], 2).unwrap()).unwrap();
        match self {
            Predicate::InP => density_of_p(),
            Predicate::Ord2Odd => odd,
            Predicate::Ord2Even | Predicate::CaseIii => rat_int(1) - odd,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Predicate::InP => "in_P",
            Predicate::Ord2Odd => "ord2_odd",
            Predicate::Ord2Even => "ord2_even",
            Predicate::CaseIii => "case_iii",
        }
    }
}

impl std::str::FromStr for Predicate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "in_P" => Ok(Predicate::InP),
            "ord2_odd" => Ok(Predicate::Ord2Odd),
            "ord2_even" => Ok(Predicate::Ord2Even),
            "case_iii" => Ok(Predicate::CaseIii),
            other => Err(Error::Parse(format!(
                "unknown predicate {other:?}; expected in_P, ord2_odd, ord2_even, or case_iii"
            ))),
        }
    }
}

/// Outcome of scanning the first `scanned` odd primes with a predicate.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub predicate: Predicate,
    pub scanned: u64,
    pub matched: u64,
    /// matched / scanned, exact.
    pub ratio: Rat,
    pub theoretical: Rat,
    /// |ratio − theoretical|, exact.
    pub deviation: Rat,
}

impl DensityReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "predicate": self.predicate.name(),
            "scanned": self.scanned,
            "matched": self.matched,
            "ratio": rat_to_string(&self.ratio),
            "theoretical": rat_to_string(&self.theoretical),
            "deviation": rat_to_string(&self.deviation),
            "ratio_decimal": rat_to_decimal(&self.ratio, 6),
            "deviation_decimal": rat_to_decimal(&self.deviation, 6),
        })
    }
}

/// Applies `predicate` to the first `count` odd primes (2 is excluded).
pub fn scan_primes(count: u64, predicate: Predicate) -> Result<DensityReport> {
    if count == 0 {
        return Err(Error::Precondition("count must be at least 1".into()));
    }
    let primes = first_odd_primes(count as usize);
    let mut matched = 0u64;
    for &p in &primes {
        if predicate.evaluate(p)? {
            matched += 1;
        }
    }
    let ratio = rat_frac(matched as i64, count as i64);
    let theoretical = predicate.theoretical_density();
    let deviation = (ratio.clone() - &theoretical).abs();
    Ok(DensityReport { predicate, scanned: count, matched, ratio, theoretical, deviation })
}

/// Group descriptors for the nilpotent-elements decision: either an abelian
/// group or Q8 × E × A with E elementary abelian 2-group and |A| = m odd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupShape {
    Abelian,
    /// Q8 × E × A, described by the odd order m = |A|.
    QuaternionProduct { odd_order: u64 },
}

/// Whether Z[H × Q] (Q the rational field context of the descriptor) has
/// nonzero nilpotent elements: never for abelian H; for Q8 × E × A exactly
/// when ord_m(2) is even.
pub fn qq_has_nilpotents(shape: &GroupShape) -> Result<bool> {
    match shape {
        GroupShape::Abelian => Ok(false),
        GroupShape::QuaternionProduct { odd_order } => {
            if *odd_order == 0 || odd_order % 2 == 0 {
                return Err(Error::Precondition(format!(
                    "|A| must be odd and positive, got {odd_order}"
                )));
            }
            Ok(order_mod_composite(2, *odd_order) % 2 == 0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_orders() {
        assert_eq!(mult_order(2, 7).unwrap(), 3);
        assert_eq!(mult_order(2, 5).unwrap(), 4);
        assert_eq!(mult_order(2, 11).unwrap(), 10);
        assert_eq!(mult_order(2, 13).unwrap(), 12);
        assert_eq!(mult_order(2, 281).unwrap() % 4, 2);
        assert!(mult_order(2, 9).is_err());
        assert!(mult_order(14, 7).is_err());
    }

    #[test]
    fn membership_in_p() {
        assert!(in_p(11).unwrap());
        assert!(!in_p(5).unwrap());
        assert!(in_p(3).unwrap());
        assert!(in_p(2).is_err());
        assert!(in_p(15).is_err());
    }

    #[test]
    fn known_density_values() {
        let l22 = odoni_lambda(&OdoniParams::new(&[2], 2).unwrap()).unwrap();
        assert_eq!(l22, rat_frac(7, 24));
        let l24 = odoni_lambda(&OdoniParams::new(&[2], 4).unwrap()).unwrap();
        assert_eq!(l24, rat_frac(7, 12));
        assert_eq!(density_of_p(), rat_frac(7, 24));
        let l32 = odoni_lambda(&OdoniParams::new(&[3], 2).unwrap()).unwrap();
        assert_eq!(l32, rat_frac(5, 8));
    }

    #[test]
    fn odoni_parameter_derivation() {
        let p = OdoniParams::new(&[2], 4).unwrap();
        assert_eq!((p.t, p.g_hat, p.g_tilde), (2, 2, 2));
        assert_eq!(p.tau(2), 1);
        let p = OdoniParams::new(&[2], 2).unwrap();
        assert_eq!((p.t, p.g_hat, p.g_tilde), (1, 2, 2));
        assert_eq!(p.tau(2), 0);
        let p = OdoniParams::new(&[2, 3], 64).unwrap();
        // 64 = 2^6, so t = 6, ĝ = 2.
        assert_eq!((p.t, p.g_hat, p.g_tilde), (6, 2, 2));
        assert_eq!((p.tau(2), p.tau(3)), (1, 1));
    }

    #[test]
    fn ambiguous_branch_is_refused() {
        // g = 3: squarefree part 3 ≡ 3 (mod 4) and 3 | 2·(2·3).
        let p = OdoniParams::new(&[2, 3], 3).unwrap();
        assert!(matches!(odoni_lambda(&p), Err(Error::UnsupportedBranch(_))));
    }

    #[test]
    fn tiny_scan() {
        let r = scan_primes(1, Predicate::InP).unwrap();
        assert_eq!((r.scanned, r.matched), (1, 1)); // p = 3, ord₃(2) = 2
        let r = scan_primes(4, Predicate::Ord2Odd).unwrap();
        // 3, 5, 7, 11 → only ord₇(2) = 3 is odd.
        assert_eq!(r.matched, 1);
    }

    #[test]
    fn nilpotent_existence_decision() {
        assert!(!qq_has_nilpotents(&GroupShape::Abelian).unwrap());
        assert!(!qq_has_nilpotents(&GroupShape::QuaternionProduct { odd_order: 7 }).unwrap());
        assert!(qq_has_nilpotents(&GroupShape::QuaternionProduct { odd_order: 5 }).unwrap());
        assert!(qq_has_nilpotents(&GroupShape::QuaternionProduct { odd_order: 4 }).is_err());
    }

    #[test]
    fn prime_supply() {
        let ps = first_odd_primes(5);
        assert_eq!(ps, vec![3, 5, 7, 11, 13]);
        assert_eq!(sieve_primes(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
