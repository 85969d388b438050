//! Jordan decompositions of units in Z[Q8 × Cp] and everything built on
//! them: normalisation into the section 𝒱, integrality certificates for
//! the semisimple part, congruence test batteries, and a randomised but
//! reproducible generator of certified non-semisimple units.
//!
//! For a unit u = Σ f_g(t)·g of augmentation 1, write β_g = f_g − f_{gz}
//! for g ∈ {a, b, c}. The unit is non-semisimple exactly when some β_g is
//! nonzero (in which case β_a² + β_b² + β_c² = 0 automatically), and then
//!
//!   u_s = f₁ + f_z·z + ½·Σ_g (f_g + f_{gz})·g(1+z),
//!   u_n = ½·Σ_g β_g·g(1−z)
//!
//! is its Jordan decomposition: u_s is central (a combination of class
//! sums), u_n² = 0, and the only denominators that can appear are 1 and 2.
//! The ring has the MJD property at p exactly when u_s is integral for
//! every such unit, which happens iff F_g = f_g + f_{gz} ≡ 0 (mod 2) for
//! g ∈ {a, b, c}; the certificate evaluates both formulations and treats
//! any disagreement as an internal error.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cyclic::{CyclicRingElt, Domain};
use crate::density::mult_order;
use crate::error::{Error, Result};
use crate::gring::{make_nilpotent, GRingElt, Q8Elt};
use crate::ratio::{is_integer, rat_frac, rat_int};

/// β_g = f_g − f_{gz} for g ∈ {a, b, c}.
fn beta(u: &GRingElt) -> Result<[CyclicRingElt; 3]> {
    let b = |g: usize| u.components()[g].sub(&u.components()[g + 4]);
    Ok([b(1)?, b(2)?, b(3)?])
}

/// F_g = f_g + f_{gz} for g ∈ {1, a, b, c}.
fn capital_f(u: &GRingElt) -> Result<[CyclicRingElt; 4]> {
    let f = |g: usize| u.components()[g].add(&u.components()[g + 4]);
    Ok([f(0)?, f(1)?, f(2)?, f(3)?])
}

fn sum_of_squares(xs: &[CyclicRingElt]) -> Result<CyclicRingElt> {
    let mut acc = CyclicRingElt::zero(xs[0].p(), xs[0].domain())?;
    for x in xs {
        acc = acc.add(&x.mul(x)?)?;
    }
    Ok(acc)
}

fn require_domain_z(u: &GRingElt, what: &str) -> Result<()> {
    if u.domain() == Domain::Z {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{what} needs integer coefficients (domain Z)")))
    }
}

/// The β-shape criterion alone: some β_g ≠ 0 and β_a² + β_b² + β_c² = 0.
/// For verified units this is exactly non-semisimplicity; callers that
/// have not verified unit-ness should use [`is_non_semisimple`].
pub fn non_semisimple_criterion(u: &GRingElt) -> Result<bool> {
    require_domain_z(u, "the semisimplicity criterion")?;
    let b = beta(u)?;
    Ok(b.iter().any(|x| !x.is_zero()) && sum_of_squares(&b)?.is_zero())
}

/// Authoritative test: verifies that u is a unit of augmentation 1 (the
/// inverse is recomputed exactly; NotAUnit otherwise), then applies the
/// β criterion.
pub fn is_non_semisimple(u: &GRingElt) -> Result<bool> {
    require_domain_z(u, "the semisimplicity test")?;
    if u.augmentation() != rat_int(1) {
        return Err(Error::Precondition(format!(
            "semisimplicity test needs augmentation 1, got {}",
            u.augmentation()
        )));
    }
    u.invert()?;
    non_semisimple_criterion(u)
}

/// The two halves of a Jordan decomposition, over Q with denominators
/// dividing 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JordanPair {
    pub u_s: GRingElt,
    pub u_n: GRingElt,
}

/// Semisimple + nilpotent splitting of a non-semisimple unit by the closed
/// formulas. The caller is responsible for unit-ness (see
/// [`is_non_semisimple`]); inputs that are not non-semisimple units are
/// caught by the β criterion: all-zero β means SemisimpleInput, a nonzero
/// sum of squares means the input was no unit at all.
pub fn jordan_decompose(u: &GRingElt) -> Result<JordanPair> {
    require_domain_z(u, "Jordan decomposition")?;
    let b = beta(u)?;
    if b.iter().all(CyclicRingElt::is_zero) {
        return Err(Error::SemisimpleInput);
    }
    if !sum_of_squares(&b)?.is_zero() {
        return Err(Error::Precondition(
            "β_a² + β_b² + β_c² ≠ 0: the input cannot be a non-semisimple unit".into(),
        ));
    }
    let p = u.p();
    let uq = u.coerce(Domain::Q)?;
    let half = rat_frac(1, 2);
    let one_plus_z = GRingElt::one(p, Domain::Q)?.add(&GRingElt::group_elt(p, Domain::Q, Q8Elt::Z, 0)?)?;
    let one_minus_z = GRingElt::one(p, Domain::Q)?.sub(&GRingElt::group_elt(p, Domain::Q, Q8Elt::Z, 0)?)?;

    let f = capital_f(u)?;
    let mut u_s = GRingElt::from_cyclic(&uq.components()[0], Q8Elt::ONE)?
        .add(&GRingElt::from_cyclic(&uq.components()[4], Q8Elt::Z)?)?;
    for (idx, g) in [(1usize, Q8Elt::A), (2, Q8Elt::B), (3, Q8Elt::C)] {
        let coeff = f[idx].coerce(Domain::Q)?.scale(&half)?;
        let term = GRingElt::from_cyclic(&coeff, g)?.mul(&one_plus_z)?;
        u_s = u_s.add(&term)?;
    }
    let mut u_n = GRingElt::zero(p, Domain::Q)?;
    for (idx, g) in [(0usize, Q8Elt::A), (1, Q8Elt::B), (2, Q8Elt::C)] {
        let coeff = b[idx].coerce(Domain::Q)?.scale(&half)?;
        let term = GRingElt::from_cyclic(&coeff, g)?.mul(&one_minus_z)?;
        u_n = u_n.add(&term)?;
    }

    // Only halves can appear.
    let denominators_ok = |x: &GRingElt| {
        x.components()
            .iter()
            .flat_map(|f| f.coeffs())
            .all(|c| c.denom() == &num_bigint::BigInt::from(1) || c.denom() == &num_bigint::BigInt::from(2))
    };
    assert!(
        denominators_ok(&u_s) && denominators_ok(&u_n),
        "Jordan parts must have denominators dividing 2"
    );
    debug_assert!(u_s.add(&u_n).unwrap() == uq);
    debug_assert!(u_n.mul(&u_n).unwrap().is_zero());
    debug_assert!(u_s.mul(&u_n).unwrap() == u_n.mul(&u_s).unwrap());
    debug_assert!(u_s.rho().unwrap().is_scalar());
    Ok(JordanPair { u_s, u_n })
}

/// Membership in the section 𝒱: integer coefficients with f₁ − f_z = 1.
pub fn is_in_v(u: &GRingElt) -> Result<bool> {
    require_domain_z(u, "the 𝒱 membership test")?;
    let d = u.components()[0].sub(&u.components()[4])?;
    Ok(d == CyclicRingElt::one(u.p(), Domain::Z)?)
}

/// Multiplies a non-semisimple unit of augmentation 1 into 𝒱 by a central
/// unit: returns (v, w) with v = u·w, v ∈ 𝒱, and w supported on
/// {1, z} × Cp. The correction is w = (f₁−f_z)⁻¹ when f₁(1) = 1 and
/// w = −z·(f₁−f_z)⁻¹ when f_z(1) = 1.
pub fn normalize_to_v(u: &GRingElt) -> Result<(GRingElt, GRingElt)> {
    require_domain_z(u, "normalisation into 𝒱")?;
    if u.augmentation() != rat_int(1) {
        return Err(Error::Precondition(format!(
            "normalisation needs augmentation 1, got {}",
            u.augmentation()
        )));
    }
    if !non_semisimple_criterion(u)? {
        return Err(Error::SemisimpleInput);
    }
    let f1 = &u.components()[0];
    let fz = &u.components()[4];
    let marks = (f1.augmentation(), fz.augmentation());
    let d_inv = f1.sub(fz)?.invert_unit()?;
    let w = if marks == (rat_int(1), rat_int(0)) {
        GRingElt::from_cyclic(&d_inv, Q8Elt::ONE)?
    } else if marks == (rat_int(0), rat_int(1)) {
        GRingElt::from_cyclic(&d_inv.neg(), Q8Elt::Z)?
    } else {
        return Err(Error::Precondition(format!(
            "expected (f₁(1), f_z(1)) ∈ {{(1,0), (0,1)}}, got ({}, {})",
            marks.0, marks.1
        )));
    };
    let v = u.mul(&w)?;
    assert!(is_in_v(&v)?, "normalisation must land in 𝒱");
    Ok((v, w))
}

/// Integrality certificate for the semisimple part of one unit, evaluated
/// after normalisation into 𝒱. `passed` means F_g ≡ 0 (mod 2) for
/// g ∈ {a, b, c} — equivalently, u_s has integer coefficients; the two
/// formulations are computed independently and must agree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MJDCertificate {
    pub p: u64,
    #[serde(rename = "F_a")]
    pub f_a: CyclicRingElt,
    #[serde(rename = "F_b")]
    pub f_b: CyclicRingElt,
    #[serde(rename = "F_c")]
    pub f_c: CyclicRingElt,
    /// The three F_g reduced mod 2.
    pub residues: Vec<CyclicRingElt>,
    pub passed: bool,
}

pub fn mjd_certificate(u: &GRingElt) -> Result<MJDCertificate> {
    let (v, _) = normalize_to_v(u)?;
    let f = capital_f(&v)?;
    let residues = vec![
        f[1].coerce(Domain::Z2)?,
        f[2].coerce(Domain::Z2)?,
        f[3].coerce(Domain::Z2)?,
    ];
    let passed = residues.iter().all(CyclicRingElt::is_zero);

    // Independent formulation: integrality of the semisimple part.
    let pair = jordan_decompose(&v)?;
    let integral =
        pair.u_s.components().iter().all(|f| f.coeffs().iter().all(is_integer));
    assert_eq!(
        passed, integral,
        "internal error: mod-2 residues and u_s integrality disagree"
    );

    Ok(MJDCertificate {
        p: u.p(),
        f_a: f[1].clone(),
        f_b: f[2].clone(),
        f_c: f[3].clone(),
        residues,
        passed,
    })
}

/// One named check in a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Human-readable context; carries the offending residues on failure.
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckOutcome { name: name.into(), passed, detail }
    }
}

/// Outcome of a battery of checks on one unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub p: u64,
    pub checks: Vec<CheckOutcome>,
    pub all_passed: bool,
}

impl CheckReport {
    fn from_checks(p: u64, checks: Vec<CheckOutcome>) -> Self {
        let all_passed = checks.iter().all(|c| c.passed);
        CheckReport { p, checks, all_passed }
    }
}

fn render(x: &CyclicRingElt) -> String {
    serde_json::to_string(x).unwrap()
}

/// Congruence battery for a unit v ∈ 𝒱, all in exact modular arithmetic:
///
/// 1. F_a² + F_b² + F_c² ≡ 0 (mod 4);
/// 2. F_a + F_b + F_c ≡ 0 (mod 2);
/// 3. the four abelian projections w_g lie in U2 and are *-invariant;
/// 4. 4·F_g equals the signed w-sums, and every F_g is *-invariant;
/// 5. F_a³ ≡ F_b³ ≡ F_c³ (mod 2);
/// 6. when ord_p(2) ≡ 2 (mod 4): F_a ≡ F_b ≡ F_c ≡ 0 (mod 2) — vacuous
///    for other p, which the detail records.
pub fn congruence_suite(v: &GRingElt) -> Result<CheckReport> {
    if !is_in_v(v)? {
        return Err(Error::NotInV);
    }
    let p = v.p();
    let f = capital_f(v)?;
    let ws = v.project_abelian()?;
    let mut checks = Vec::new();

    let sq_sum = sum_of_squares(&f[1..])?.coerce(Domain::Z4)?;
    checks.push(CheckOutcome::new(
        "sum_of_squares_mod4",
        sq_sum.is_zero(),
        if sq_sum.is_zero() {
            "F_a² + F_b² + F_c² ≡ 0 (mod 4)".into()
        } else {
            format!("nonzero residue {}", render(&sq_sum))
        },
    ));

    let lin_sum = f[1].add(&f[2])?.add(&f[3])?.coerce(Domain::Z2)?;
    checks.push(CheckOutcome::new(
        "sum_mod2",
        lin_sum.is_zero(),
        if lin_sum.is_zero() {
            "F_a + F_b + F_c ≡ 0 (mod 2)".into()
        } else {
            format!("nonzero residue {}", render(&lin_sum))
        },
    ));

    let mut u2_ok = true;
    let mut u2_detail = Vec::new();
    for (name, w) in ["w_1", "w_a", "w_b", "w_c"].iter().zip(&ws) {
        let member = w.is_u2_member()?;
        let starred = w.star() == *w;
        if !(member && starred) {
            u2_ok = false;
            u2_detail.push(format!(
                "{name}: in U2 = {member}, *-invariant = {starred}, value {}",
                render(w)
            ));
        }
    }
    checks.push(CheckOutcome::new(
        "w_components_in_u2_and_star_invariant",
        u2_ok,
        if u2_ok {
            "w_1, w_a, w_b, w_c all lie in U2 and are *-invariant".into()
        } else {
            u2_detail.join("; ")
        },
    ));

    // 4F₁ = w₁+w_a+w_b+w_c, 4F_a = w₁+w_a−w_b−w_c,
    // 4F_b = w₁−w_a+w_b−w_c, 4F_c = w₁−w_a−w_b+w_c.
    let signs: [[i64; 4]; 4] =
        [[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]];
    let mut f_ok = true;
    let mut f_detail = Vec::new();
    for (idx, row) in signs.iter().enumerate() {
        let mut acc = CyclicRingElt::zero(p, Domain::Z)?;
        for (s, w) in row.iter().zip(&ws) {
            acc = acc.add(&w.scale(&rat_int(*s))?)?;
        }
        let four_f = f[idx].scale(&rat_int(4))?;
        let star_ok = f[idx].star() == f[idx];
        if acc != four_f || !star_ok {
            f_ok = false;
            f_detail.push(format!(
                "component {idx}: w-sum identity = {}, *-invariant = {star_ok}",
                acc == four_f
            ));
        }
    }
    checks.push(CheckOutcome::new(
        "f_star_invariant_via_w_sums",
        f_ok,
        if f_ok {
            "4·F_g match the signed w-sums and each F_g is *-invariant".into()
        } else {
            f_detail.join("; ")
        },
    ));

    let cubes: Vec<CyclicRingElt> = f[1..]
        .iter()
        .map(|x| Ok(x.coerce(Domain::Z2)?.pow(3)))
        .collect::<Result<_>>()?;
    let cubes_ok = cubes[0] == cubes[1] && cubes[1] == cubes[2];
    checks.push(CheckOutcome::new(
        "cubes_agree_mod2",
        cubes_ok,
        if cubes_ok {
            "F_a³ ≡ F_b³ ≡ F_c³ (mod 2)".into()
        } else {
            format!(
                "cubes differ: {}, {}, {}",
                render(&cubes[0]),
                render(&cubes[1]),
                render(&cubes[2])
            )
        },
    ));

    let ord = mult_order(2, p)?;
    if ord % 4 == 2 {
        let residues: Vec<CyclicRingElt> =
            f[1..].iter().map(|x| x.coerce(Domain::Z2)).collect::<Result<_>>()?;
        let even = residues.iter().all(CyclicRingElt::is_zero);
        checks.push(CheckOutcome::new(
            "f_even_when_ord_two_eq_2_mod4",
            even,
            if even {
                format!("ord_{p}(2) = {ord} ≡ 2 (mod 4) and F_a, F_b, F_c ≡ 0 (mod 2)")
            } else {
                format!(
                    "ord_{p}(2) = {ord} ≡ 2 (mod 4) but residues are {}, {}, {}",
                    render(&residues[0]),
                    render(&residues[1]),
                    render(&residues[2])
                )
            },
        ));
    } else {
        checks.push(CheckOutcome::new(
            "f_even_when_ord_two_eq_2_mod4",
            true,
            format!("vacuous: ord_{p}(2) = {ord} ≢ 2 (mod 4)"),
        ));
    }

    Ok(CheckReport::from_checks(p, checks))
}

/// Identity battery special to p = 5, on a unit v ∈ 𝒱. With F_g from v
/// and H_g from v⁻¹ (same f_g + f_{gz} recipe):
///
/// 1. H_g = φ₂(F_g) for g ∈ {1, a, b, c};
/// 2. v⁻¹ = u_s⁻¹ − u_n;
/// 3. F_g + H_g ≡ 0 (mod 2) for g ∈ {a, b, c};
/// 4. w_g·φ₂(w_g) = 1 for the four abelian projections;
/// 5. u_s + u_s⁻¹ has integer coefficients.
pub fn p5_relations(v: &GRingElt) -> Result<CheckReport> {
    if v.p() != 5 {
        return Err(Error::WrongPrime { expected: 5, got: v.p() });
    }
    if !is_in_v(v)? {
        return Err(Error::NotInV);
    }
    let inv = v.invert()?;
    let f = capital_f(v)?;
    let h = capital_f(&inv)?;
    let mut checks = Vec::new();

    let mut phi_ok = true;
    let mut phi_detail = Vec::new();
    for (idx, name) in ["1", "a", "b", "c"].iter().enumerate() {
        let expect = f[idx].phi(2)?;
        if h[idx] != expect {
            phi_ok = false;
            phi_detail.push(format!(
                "H_{name} = {} but φ₂(F_{name}) = {}",
                render(&h[idx]),
                render(&expect)
            ));
        }
    }
    checks.push(CheckOutcome::new(
        "h_equals_phi2_f",
        phi_ok,
        if phi_ok { "H_g = φ₂(F_g) for g ∈ {1, a, b, c}".into() } else { phi_detail.join("; ") },
    ));

    // Semisimple v is allowed: its decomposition is (v, 0).
    let (u_s, u_n) = match jordan_decompose(v) {
        Ok(pair) => (pair.u_s, pair.u_n),
        Err(Error::SemisimpleInput) => {
            (v.coerce(Domain::Q)?, GRingElt::zero(5, Domain::Q)?)
        }
        Err(e) => return Err(e),
    };
    let u_s_inv = u_s.invert_rational()?;
    let lemma_lhs = inv.coerce(Domain::Q)?;
    let lemma_rhs = u_s_inv.sub(&u_n)?;
    checks.push(CheckOutcome::new(
        "inverse_decomposition",
        lemma_lhs == lemma_rhs,
        if lemma_lhs == lemma_rhs {
            "v⁻¹ = u_s⁻¹ − u_n".into()
        } else {
            "v⁻¹ differs from u_s⁻¹ − u_n".into()
        },
    ));

    let mut even_ok = true;
    let mut even_detail = Vec::new();
    for (idx, name) in ["a", "b", "c"].iter().enumerate() {
        let residue = f[idx + 1].add(&h[idx + 1])?.coerce(Domain::Z2)?;
        if !residue.is_zero() {
            even_ok = false;
            even_detail.push(format!("F_{name} + H_{name} ≡ {}", render(&residue)));
        }
    }
    checks.push(CheckOutcome::new(
        "f_plus_h_even",
        even_ok,
        if even_ok {
            "F_g + H_g ≡ 0 (mod 2) for g ∈ {a, b, c}".into()
        } else {
            even_detail.join("; ")
        },
    ));

    let ws = v.project_abelian()?;
    let one = CyclicRingElt::one(5, Domain::Z)?;
    let mut w_ok = true;
    let mut w_detail = Vec::new();
    for (name, w) in ["w_1", "w_a", "w_b", "w_c"].iter().zip(&ws) {
        let prod = w.mul(&w.phi(2)?)?;
        if prod != one {
            w_ok = false;
            w_detail.push(format!("{name}·φ₂({name}) = {}", render(&prod)));
        }
    }
    checks.push(CheckOutcome::new(
        "w_times_phi2_w_is_one",
        w_ok,
        if w_ok { "w_g·φ₂(w_g) = 1 for all four projections".into() } else { w_detail.join("; ") },
    ));

    let symmetrised = u_s.add(&u_s_inv)?;
    let integral =
        symmetrised.components().iter().all(|f| f.coeffs().iter().all(is_integer));
    checks.push(CheckOutcome::new(
        "u_s_plus_inverse_integral",
        integral,
        if integral {
            "u_s + u_s⁻¹ has integer coefficients".into()
        } else {
            "u_s + u_s⁻¹ has a non-integer coefficient".into()
        },
    ));

    Ok(CheckReport::from_checks(5, checks))
}

/// The standard witness that the unit hypothesis in the decomposition
/// theory is necessary: u = σ·(a+b+c) + ν with ν the canonical nilpotent.
/// Its augmentation is 3p, so it is no unit; it still splits as
/// semisimple + nilpotent with both parts annihilating each other, but its
/// semisimple part σ·(a+b+c) is not central.
pub fn nonunit_witness(p: u64) -> Result<GRingElt> {
    let nu = make_nilpotent(p)?;
    let sigma = CyclicRingElt::sigma(p, Domain::Z)?;
    let mut w = nu;
    for g in [Q8Elt::A, Q8Elt::B, Q8Elt::C] {
        w = w.add(&GRingElt::from_cyclic(&sigma, g)?)?;
    }
    debug_assert_eq!(w.augmentation(), rat_int(3 * p as i64));
    Ok(w)
}

// ---------------------------------------------------------------------------
// unit generator

/// Σ ζ·α_g g(1−z) for a direction triple (α_a, α_b, α_c); squares to zero
/// whenever the triple does, because ζ is central.
fn assemble_nilpotent(direction: &[CyclicRingElt; 3], zeta: &CyclicRingElt) -> GRingElt {
    let p = zeta.p();
    let mut out = GRingElt::zero(p, Domain::Z).unwrap();
    for (slot, base) in direction.iter().enumerate() {
        let alpha = base.mul(zeta).unwrap();
        let g = [Q8Elt::A, Q8Elt::B, Q8Elt::C][slot];
        let gz = [Q8Elt::AZ, Q8Elt::BZ, Q8Elt::CZ][slot];
        out = out
            .add(&GRingElt::from_cyclic(&alpha, g).unwrap())
            .unwrap()
            .sub(&GRingElt::from_cyclic(&alpha, gz).unwrap())
            .unwrap();
    }
    out
}

/// A unit with an exact, product-checked inverse.
#[derive(Debug, Clone)]
pub struct CertifiedUnit {
    pub unit: GRingElt,
    pub inverse: GRingElt,
}

/// A unit together with its exact inverse, plus the analytically expected
/// decomposition data used to cross-check the closed formulas: the unit is
/// sem·(1 + ν̃) with sem = z^δ·t^j·w central, so u_s = sem and
/// u_n = sem·ν̃.
#[derive(Debug, Clone)]
pub struct GeneratedUnit {
    pub unit: GRingElt,
    pub inverse: GRingElt,
    pub sem: GRingElt,
    pub sem_inv: GRingElt,
    pub nil: GRingElt,
}

/// Reproducible generator of certified non-semisimple units of
/// augmentation 1: u = z^δ·t^j·w·q(1+ν)q⁻¹, with w a central unit drawn
/// from powers of t, Bass units and their products; ν a randomised variant
/// of the canonical nilpotent (common Z[Cp]-multiple, coordinate signs and
/// permutation — all preserve the sum-of-squares identity); and q a
/// conjugator from Q8 elements and unipotents 1 + ν′. Every product is
/// verified exactly before the unit is handed out.
pub struct UnitHarness {
    p: u64,
    rng: ChaCha8Rng,
    alphas: [CyclicRingElt; 3],
}

impl UnitHarness {
    /// Fails with NoSolution when ord_p(2) is odd — no non-semisimple
    /// units exist there at all.
    pub fn new(p: u64, seed: u64) -> Result<Self> {
        let base = make_nilpotent(p)?;
        let alphas = base.is_nilpotent()?.expect("canonical nilpotent must classify");
        Ok(UnitHarness { p, rng: ChaCha8Rng::seed_from_u64(seed), alphas })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// A central unit of Z[Cp] of augmentation 1, with its inverse.
    fn sample_cyclic_unit(&mut self) -> (CyclicRingElt, CyclicRingElt) {
        let p = self.p;
        let kind = self.rng.gen_range(0..4u8);
        let t_pow = |rng: &mut ChaCha8Rng| {
            let i = rng.gen_range(0..p);
            CyclicRingElt::t_pow(p, Domain::Z, i).unwrap()
        };
        let bass = |rng: &mut ChaCha8Rng| {
            // p = 3 has no k with 1 < k < p other than 2; in general pick
            // any k and pair it with its multiplicative order.
            let k = rng.gen_range(2..p);
            let m = mult_order(k, p).unwrap();
            CyclicRingElt::bass_unit(p, k, m).unwrap()
        };
        let w = match kind {
            0 => CyclicRingElt::one(p, Domain::Z).unwrap(),
            1 => t_pow(&mut self.rng),
            2 => bass(&mut self.rng),
            _ => {
                let x = bass(&mut self.rng);
                let y = t_pow(&mut self.rng);
                x.mul(&y).unwrap()
            }
        };
        let w_inv = w.invert_unit().expect("sampled central units are units by construction");
        (w, w_inv)
    }

    /// A random Z[Cp] element with small coefficients.
    fn sample_multiplier(&mut self) -> CyclicRingElt {
        let coeffs: Vec<i64> =
            (0..self.p).map(|_| self.rng.gen_range(-2..=2i64)).collect();
        CyclicRingElt::from_int_coeffs(self.p, Domain::Z, &coeffs).unwrap()
    }

    /// A signed permutation of the canonical triple (α_a, α_b, α_c): the
    /// "direction" of a nilpotent. Signs and order don't disturb the
    /// sum-of-squares, so any common multiple of the triple still squares
    /// to zero.
    fn sample_direction(&mut self) -> [CyclicRingElt; 3] {
        const PERMS: [[usize; 3]; 6] =
            [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let perm = PERMS[self.rng.gen_range(0..6usize)];
        [0, 1, 2].map(|slot| {
            let sign = if self.rng.gen::<bool>() { 1 } else { -1 };
            self.alphas[perm[slot]].scale(&rat_int(sign)).unwrap()
        })
    }

    /// A nonzero multiple of `direction`, assembled as Σ α_g g(1−z).
    fn scaled_nilpotent(&mut self, direction: &[CyclicRingElt; 3]) -> GRingElt {
        loop {
            let zeta = self.sample_multiplier();
            let out = assemble_nilpotent(direction, &zeta);
            if out.is_zero() {
                continue; // ζ annihilated the triple; resample
            }
            debug_assert!(out.is_nilpotent().unwrap().is_some());
            return out;
        }
    }

    /// A nonzero nilpotent: common multiple, coordinate signs, and a
    /// permutation applied to the canonical (α_a, α_b, α_c).
    fn sample_nilpotent(&mut self) -> GRingElt {
        let direction = self.sample_direction();
        self.scaled_nilpotent(&direction)
    }

    /// A conjugator q with its exact inverse: a Q8 element, a unipotent
    /// 1 + ν′, or their product.
    fn sample_conjugator(&mut self) -> (GRingElt, GRingElt) {
        let p = self.p;
        let one = GRingElt::one(p, Domain::Z).unwrap();
        let kind = self.rng.gen_range(0..3u8);
        match kind {
            0 => {
                let g = [Q8Elt::A, Q8Elt::B, Q8Elt::C][self.rng.gen_range(0..3usize)];
                let q = GRingElt::group_elt(p, Domain::Z, g, 0).unwrap();
                let q_inv = GRingElt::group_elt(p, Domain::Z, g.inverse(), 0).unwrap();
                (q, q_inv)
            }
            1 => {
                let nu = self.sample_nilpotent();
                (one.add(&nu).unwrap(), one.sub(&nu).unwrap())
            }
            _ => {
                let g = [Q8Elt::A, Q8Elt::B, Q8Elt::C][self.rng.gen_range(0..3usize)];
                let ge = GRingElt::group_elt(p, Domain::Z, g, 0).unwrap();
                let ge_inv = GRingElt::group_elt(p, Domain::Z, g.inverse(), 0).unwrap();
                let nu = self.sample_nilpotent();
                let q = ge.mul(&one.add(&nu).unwrap()).unwrap();
                let q_inv = one.sub(&nu).unwrap().mul(&ge_inv).unwrap();
                (q, q_inv)
            }
        }
    }

    /// A central unit of Z[G] supported on {1, z} × Cp, with inverse:
    /// z^δ·t^j·w.
    pub fn next_central_pair(&mut self) -> (GRingElt, GRingElt) {
        let p = self.p;
        let delta = self.rng.gen::<bool>();
        let j = self.rng.gen_range(0..p);
        let (w, w_inv) = self.sample_cyclic_unit();
        let spot = if delta { Q8Elt::Z } else { Q8Elt::ONE };
        let g = GRingElt::group_elt(p, Domain::Z, spot, j).unwrap();
        let g_inv = GRingElt::group_elt(p, Domain::Z, spot, (p - j) % p).unwrap();
        let sem = g.mul(&GRingElt::from_cyclic(&w, Q8Elt::ONE).unwrap()).unwrap();
        let sem_inv =
            g_inv.mul(&GRingElt::from_cyclic(&w_inv, Q8Elt::ONE).unwrap()).unwrap();
        (sem, sem_inv)
    }

    /// The next certified non-semisimple unit.
    pub fn next_unit(&mut self) -> GeneratedUnit {
        let p = self.p;
        let one = GRingElt::one(p, Domain::Z).unwrap();
        let (sem, sem_inv) = self.next_central_pair();
        let (q, q_inv) = self.sample_conjugator();
        let nu = self.sample_nilpotent();
        let conjugated = q.mul(&nu).unwrap().mul(&q_inv).unwrap();
        let nil = sem.mul(&conjugated).unwrap();
        let unit = sem.add(&nil).unwrap();
        let inverse =
            sem_inv.mul(&one.sub(&conjugated).unwrap()).unwrap();
        assert!(
            unit.mul(&inverse).unwrap() == one && inverse.mul(&unit).unwrap() == one,
            "generated unit failed its inverse check"
        );
        debug_assert_eq!(unit.augmentation(), rat_int(1));
        GeneratedUnit { unit, inverse, sem, sem_inv, nil }
    }

    /// A non-semisimple unit assembled as a product of `factors` generated
    /// units. The factors share one conjugator and one nilpotent direction
    /// while their central parts and multipliers stay independent. The
    /// sharing is forced: a product of units with nilpotent parts in two
    /// directions is only non-semisimple when the directions are orthogonal,
    /// and orthogonal isotropic vectors of x² + y² + z² are proportional
    /// (the polar line at a point of the conic is its tangent), so sampling
    /// directions independently would turn this into a rejection loop that
    /// waits for that coincidence — rarer and rarer as p grows. Resamples
    /// in the rare case the multipliers cancel and the product comes out
    /// semisimple anyway.
    pub fn next_product_unit(&mut self, factors: usize) -> CertifiedUnit {
        assert!(factors >= 1);
        let one = GRingElt::one(self.p, Domain::Z).unwrap();
        loop {
            let (q, q_inv) = self.sample_conjugator();
            let direction = self.sample_direction();
            let mut unit = one.clone();
            let mut inverse = one.clone();
            for _ in 0..factors {
                let (sem, sem_inv) = self.next_central_pair();
                let nu = self.scaled_nilpotent(&direction);
                let conjugated = q.mul(&nu).unwrap().mul(&q_inv).unwrap();
                let factor = sem.mul(&one.add(&conjugated).unwrap()).unwrap();
                let factor_inv =
                    one.sub(&conjugated).unwrap().mul(&sem_inv).unwrap();
                unit = unit.mul(&factor).unwrap();
                inverse = factor_inv.mul(&inverse).unwrap();
            }
            debug_assert!(
                unit.mul(&inverse).unwrap() == one && inverse.mul(&unit).unwrap() == one,
                "product unit failed its inverse check"
            );
            if non_semisimple_criterion(&unit).unwrap() {
                return CertifiedUnit { unit, inverse };
            }
        }
    }
}
