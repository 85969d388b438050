//! The acceptance battery: eight numbered end-to-end criteria, one test
//! each. Every test prints a single `ACCEPTANCE n: PASS/FAIL — …` line
//! (visible with `cargo test --test acceptance -- --nocapture`), and the
//! criteria with wall-clock budgets enforce them with assertions.

use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use mjd_core::cyclic::{CyclicRingElt, Domain};
use mjd_core::cyclotomic::CyclotomicElt;
use mjd_core::density::{
    density_of_p, first_odd_primes, in_p, mult_order, odoni_lambda, scan_primes, OdoniParams,
    Predicate,
};
use mjd_core::error::Error;
use mjd_core::gring::{make_nilpotent, GRingElt, Q8Elt};
use mjd_core::jordan::{
    congruence_suite, is_in_v, jordan_decompose, mjd_certificate, non_semisimple_criterion,
    normalize_to_v, p5_relations, UnitHarness,
};
use mjd_core::ratio::{is_integer, rat_frac, rat_int, Rat};
use mjd_core::solve_r_s;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn run(n: u32, body: impl FnOnce() -> String) {
    let started = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body));
    let secs = started.elapsed().as_secs_f64();
    match outcome {
        Ok(detail) => println!("ACCEPTANCE {n}: PASS — {detail} [{secs:.2}s]"),
        Err(cause) => {
            println!("ACCEPTANCE {n}: FAIL [{secs:.2}s]");
            resume_unwind(cause);
        }
    }
}

fn within(budget: Duration, started: Instant, what: &str) {
    let elapsed = started.elapsed();
    assert!(elapsed <= budget, "{what} took {elapsed:.2?}, budget {budget:?}");
}

#[test]
fn acceptance_1_prime_class_population() {
    run(1, || {
        let started = Instant::now();
        let report = scan_primes(10_000, Predicate::InP).unwrap();
        assert_eq!(report.scanned, 10_000);
        assert_eq!(
            report.matched, 2917,
            "population of the ord₂ ≡ 2 (mod 4) class among the first 10000 odd primes"
        );
        within(Duration::from_secs(10), started, "scanning 10000 odd primes");
        "exactly 2917 of the first 10000 odd primes have ord_p(2) ≡ 2 (mod 4)".into()
    });
}

#[test]
fn acceptance_2_exact_densities() {
    run(2, || {
        let lambda = |qs: &[u64], g: u64| -> Rat {
            odoni_lambda(&OdoniParams::new(qs, g).unwrap()).unwrap()
        };
        assert_eq!(lambda(&[2], 2), rat_frac(7, 24));
        assert_eq!(lambda(&[2], 4), rat_frac(7, 12));
        assert_eq!(density_of_p(), rat_frac(7, 24));
        "λ({2}, 2) = 7/24, λ({2}, 4) = 7/12, class density = 7/12 − 7/24 = 7/24".into()
    });
}

#[test]
fn acceptance_3_smallest_one_mod_four_member() {
    run(3, || {
        let mut skipped = 0u32;
        let mut found = None;
        for p in first_odd_primes(100) {
            if p % 4 != 1 {
                continue;
            }
            if in_p(p).unwrap() {
                found = Some(p);
                break;
            }
            skipped += 1;
        }
        assert_eq!(found, Some(281), "first p ≡ 1 (mod 4) inside the class");
        assert!(skipped > 0, "281 must not be the very first p ≡ 1 (mod 4) candidate");
        format!(
            "scanning primes in order, the first class member ≡ 1 (mod 4) is 281 \
             (after {skipped} smaller p ≡ 1 (mod 4) candidates)"
        )
    });
}

#[test]
fn acceptance_4_quintic_triple_residues() {
    run(4, || {
        let p = 5;
        let elt = |coeffs: &[i64]| CyclicRingElt::from_int_coeffs(p, Domain::Z, coeffs).unwrap();
        let alpha = elt(&[0, 1, 0, 0, 1]); // t + t⁴
        let beta = elt(&[0, 0, 1, 1, 0]); // t² + t³
        let gamma = alpha.add(&beta).unwrap();

        // Sum of squares: exactly 4 + 4σ — zero mod 4, nonzero exactly.
        let squares = alpha
            .mul(&alpha)
            .unwrap()
            .add(&beta.mul(&beta).unwrap())
            .unwrap()
            .add(&gamma.mul(&gamma).unwrap())
            .unwrap();
        assert_eq!(squares, elt(&[8, 4, 4, 4, 4]));
        assert!(squares.coerce(Domain::Z4).unwrap().is_zero());
        assert!(!squares.is_zero());

        // Mod-2 residues of the triple itself: all odd, bit-exact.
        let bits = |coeffs: &[i64]| CyclicRingElt::from_int_coeffs(p, Domain::Z2, coeffs).unwrap();
        assert_eq!(alpha.coerce(Domain::Z2).unwrap(), bits(&[0, 1, 0, 0, 1]));
        assert_eq!(beta.coerce(Domain::Z2).unwrap(), bits(&[0, 0, 1, 1, 0]));
        assert_eq!(gamma.coerce(Domain::Z2).unwrap(), bits(&[0, 1, 1, 1, 1]));

        // All three cubes share the residue t + t² + t³ + t⁴ mod 2, whether
        // the cube is taken before or after reduction.
        let cube_residue = bits(&[0, 1, 1, 1, 1]);
        for x in [&alpha, &beta, &gamma] {
            assert_eq!(x.pow(3).coerce(Domain::Z2).unwrap(), cube_residue);
            assert_eq!(x.coerce(Domain::Z2).unwrap().pow(3), cube_residue);
        }
        "α² + β² + γ² = 4 + 4σ exactly (≡ 0 mod 4 but ≠ 0) and all three cubes \
         reduce to t + t² + t³ + t⁴ mod 2"
            .into()
    });
}

#[test]
fn acceptance_5_quadratic_pair_solver_sweep() {
    run(5, || {
        let started = Instant::now();
        let mut solved = Vec::new();
        let mut refused = Vec::new();
        for p in first_odd_primes(14) {
            assert!(p <= 50);
            let ord = mult_order(2, p).unwrap();
            match solve_r_s(p) {
                Ok((r, s)) => {
                    assert_eq!(ord % 2, 0, "solutions exist only for even order, p = {p}");
                    let sum = r.mul(&r).unwrap().add(&s.mul(&s).unwrap()).unwrap();
                    assert_eq!(sum, CyclotomicElt::one(p).unwrap().neg(), "r² + s² = −1 at p = {p}");
                    solved.push(p);
                }
                Err(Error::NoSolution { .. }) => {
                    assert_eq!(ord % 2, 1, "refusal is only correct for odd order, p = {p}");
                    refused.push(p);
                }
                Err(other) => panic!("unexpected solver error at p = {p}: {other}"),
            }
        }
        assert_eq!(solved, vec![3, 5, 11, 13, 17, 19, 29, 37, 41, 43]);
        assert_eq!(refused, vec![7, 23, 31, 47]);
        within(Duration::from_secs(60), started, "the solver sweep over p ≤ 50");
        "r² + s² = −1 solved and verified for all ten p ≤ 50 with even ord_p(2); \
         the four odd-order primes are refused"
            .into()
    });
}

/// Everything that must hold for one generated unit: the decomposition
/// identities, the side conditions on augmentations and on f₁ − f_z, the
/// central-multiplier equivariance, normalisation into the section 𝒱, and
/// the inverse identity v⁻¹ = v_s⁻¹ − v_n.
fn unit_battery(p: u64, unit: &GRingElt, inverse: &GRingElt, harness: &mut UnitHarness) {
    let one = GRingElt::one(p, Domain::Z).unwrap();
    let one_q = GRingElt::one(p, Domain::Q).unwrap();

    let pair = jordan_decompose(unit).unwrap();
    assert_eq!(pair.u_s.add(&pair.u_n).unwrap(), unit.coerce(Domain::Q).unwrap());
    assert!(pair.u_n.mul(&pair.u_n).unwrap().is_zero());
    assert!(!pair.u_n.is_zero());
    assert_eq!(pair.u_s.mul(&pair.u_n).unwrap(), pair.u_n.mul(&pair.u_s).unwrap());
    for (g, k) in [(Q8Elt::A, 0), (Q8Elt::B, 0), (Q8Elt::ONE, 1)] {
        let gen = GRingElt::group_elt(p, Domain::Z, g, k).unwrap();
        assert_eq!(pair.u_s.mul(&gen).unwrap(), gen.mul(&pair.u_s).unwrap());
    }
    assert!(pair.u_s.rho().unwrap().is_scalar());

    // Augmentation marks: the image under t ↦ 1 is a trivial unit carried
    // by 1 or by z, and the difference f₁ − f_z is a unit of Z[Cp].
    let marks =
        (unit.components()[0].augmentation(), unit.components()[4].augmentation());
    assert!(
        marks == (rat_int(1), rat_int(0)) || marks == (rat_int(0), rat_int(1)),
        "central augmentation marks must be (1,0) or (0,1), got {marks:?}"
    );
    for g in [1usize, 2, 3, 5, 6, 7] {
        assert_eq!(unit.components()[g].augmentation(), rat_int(0));
    }
    let d = unit.components()[0].sub(&unit.components()[4]).unwrap();
    let d_inv = d.invert_unit().unwrap();
    assert_eq!(d.mul(&d_inv).unwrap(), CyclicRingElt::one(p, Domain::Z).unwrap());

    // Multiplying by a central unit multiplies both parts.
    let (w, _) = harness.next_central_pair();
    let uw = unit.mul(&w).unwrap();
    let pair_w = jordan_decompose(&uw).unwrap();
    assert_eq!(pair_w.u_s, pair.u_s.mul(&w).unwrap());
    assert_eq!(pair_w.u_n, pair.u_n.mul(&w).unwrap());

    // Normalisation into 𝒱 and the assembled inverse of the result.
    let (v, w_corr) = normalize_to_v(unit).unwrap();
    assert!(is_in_v(&v).unwrap());
    assert!(non_semisimple_criterion(&v).unwrap());
    assert_eq!(v, unit.mul(&w_corr).unwrap());
    let w_corr_inv = if marks.0 == rat_int(1) {
        GRingElt::from_cyclic(&d, Q8Elt::ONE).unwrap()
    } else {
        GRingElt::from_cyclic(&d.neg(), Q8Elt::Z).unwrap()
    };
    let v_inv = w_corr_inv.mul(inverse).unwrap();
    assert_eq!(v.mul(&v_inv).unwrap(), one);
    assert_eq!(v_inv.mul(&v).unwrap(), one);

    // On the section the semisimple part fixes the nilpotent part, the
    // inverse decomposes as v⁻¹ = v_s⁻¹ − v_n, and v_s + v_s⁻¹ is integral.
    let pv = jordan_decompose(&v).unwrap();
    assert_eq!(pv.u_s.mul(&pv.u_n).unwrap(), pv.u_n);
    assert_eq!(pv.u_n.mul(&pv.u_s).unwrap(), pv.u_n);
    let vs_inv = v_inv.add(&pv.u_n).unwrap();
    assert_eq!(pv.u_s.mul(&vs_inv).unwrap(), one_q);
    assert_eq!(vs_inv.mul(&pv.u_s).unwrap(), one_q);
    let symmetric = pv.u_s.add(&vs_inv).unwrap();
    assert!(
        symmetric.components().iter().all(|f| f.coeffs().iter().all(is_integer)),
        "v_s + v_s⁻¹ must have integer coefficients"
    );
}

#[test]
fn acceptance_6_unit_battery() {
    run(6, || {
        let started = Instant::now();
        for (p, seed) in [(3u64, 6003u64), (5, 6005), (11, 6011), (13, 6013)] {
            let mut harness = UnitHarness::new(p, seed).unwrap();
            for i in 0..200 {
                let (unit, inverse) = if i % 10 == 9 {
                    let cu = harness.next_product_unit(2);
                    (cu.unit, cu.inverse)
                } else {
                    let gu = harness.next_unit();
                    (gu.unit, gu.inverse)
                };
                unit_battery(p, &unit, &inverse, &mut harness);
            }
        }
        within(Duration::from_secs(300), started, "the unit battery");
        "200 seeded units at each of p = 3, 5, 11, 13 satisfy every decomposition \
         identity, side condition, and inverse relation exactly"
            .into()
    });
}

#[test]
fn acceptance_7_certificates_and_congruences() {
    run(7, || {
        let sample = |harness: &mut UnitHarness, i: usize| -> GRingElt {
            if i % 10 == 9 {
                harness.next_product_unit(2).unit
            } else {
                harness.next_unit().unit
            }
        };

        for (p, seed) in [(3u64, 7003u64), (11, 7011)] {
            let mut harness = UnitHarness::new(p, seed).unwrap();
            for i in 0..200 {
                let unit = sample(&mut harness, i);
                let cert = mjd_certificate(&unit).unwrap();
                assert!(cert.passed, "certificate must pass at p = {p}");
                let (v, _) = normalize_to_v(&unit).unwrap();
                let report = congruence_suite(&v).unwrap();
                assert!(report.all_passed, "congruence suite must pass at p = {p}: {report:?}");
            }
        }

        let mut harness = UnitHarness::new(5, 7005).unwrap();
        for i in 0..200 {
            let unit = sample(&mut harness, i);
            let (v, _) = normalize_to_v(&unit).unwrap();
            let report = p5_relations(&v).unwrap();
            assert!(report.all_passed, "p = 5 relation battery must pass: {report:?}");
        }

        // p = 13 is the open case: outcomes are recorded, not asserted.
        let mut harness = UnitHarness::new(13, 7013).unwrap();
        let mut passed = 0u32;
        let mut failed = 0u32;
        for i in 0..50 {
            let unit = sample(&mut harness, i);
            match mjd_certificate(&unit) {
                Ok(cert) if cert.passed => passed += 1,
                Ok(_) => failed += 1,
                Err(e) => panic!("certificate computation must not error at p = 13: {e}"),
            }
        }
        format!(
            "p ∈ {{3, 11}}: 200 certificates + congruence suites each, all passed; \
             p = 5: 200 relation batteries passed; \
             p = 13 recorded without assertion: {passed} passed, {failed} failed of 50"
        )
    });
}

fn random_element(rng: &mut ChaCha8Rng, p: u64, lo: i64, hi: i64) -> GRingElt {
    let components = (0..8)
        .map(|_| {
            let coeffs: Vec<i64> = (0..p).map(|_| rng.gen_range(lo..=hi)).collect();
            CyclicRingElt::from_int_coeffs(p, Domain::Z, &coeffs).unwrap()
        })
        .collect::<Vec<_>>();
    GRingElt::from_components(components).unwrap()
}

#[test]
fn acceptance_8_homomorphism_layer() {
    run(8, || {
        let even = |x: &Rat| is_integer(x) && is_integer(&(x.clone() / rat_int(2)));

        for p in [3u64, 5, 11] {
            let mut rng = ChaCha8Rng::seed_from_u64(8000 + p);
            for _ in 0..1000 {
                let x = random_element(&mut rng, p, -3, 3);
                let y = random_element(&mut rng, p, -3, 3);
                let xy = x.mul(&y).unwrap();

                let rx = x.rho().unwrap();
                let ry = y.rho().unwrap();
                let rxy = xy.rho().unwrap();
                assert_eq!(rxy, rx.mul(&ry).unwrap());
                assert_eq!(xy.theta(), x.theta().mul(&y.theta()).unwrap());
                let px = x.project_abelian().unwrap();
                let py = y.project_abelian().unwrap();
                let pxy = xy.project_abelian().unwrap();
                for i in 0..4 {
                    assert_eq!(pxy[i], px[i].mul(&py[i]).unwrap());
                }
                // Traces of integral elements have even integer coefficients.
                for m in [&rx, &ry, &rxy] {
                    assert!(m.trace().coeffs().iter().all(even));
                }
            }
        }

        // Nilpotency classification agrees with the squaring oracle.
        let mut nilpotent_seen = 0u32;
        for p in [3u64, 5, 11] {
            let mut rng = ChaCha8Rng::seed_from_u64(8100 + p);
            for i in 0..334 {
                let x = if i % 3 == 0 {
                    let zeta_coeffs: Vec<i64> = (0..p).map(|_| rng.gen_range(-2..=2)).collect();
                    let zeta =
                        CyclicRingElt::from_int_coeffs(p, Domain::Z, &zeta_coeffs).unwrap();
                    GRingElt::from_cyclic(&zeta, Q8Elt::ONE)
                        .unwrap()
                        .mul(&make_nilpotent(p).unwrap())
                        .unwrap()
                } else {
                    random_element(&mut rng, p, -2, 2)
                };
                let classified = x.is_nilpotent().unwrap().is_some();
                let squares_to_zero = x.mul(&x).unwrap().is_zero();
                assert_eq!(classified, squares_to_zero);
                if classified {
                    nilpotent_seen += 1;
                }
            }
        }
        assert!(nilpotent_seen >= 300, "the sample must exercise the nilpotent branch");

        // The multiplication table is associative: all 512 triples.
        for x in Q8Elt::all() {
            for y in Q8Elt::all() {
                for z in Q8Elt::all() {
                    assert_eq!(x.mul(y).mul(z), x.mul(y.mul(z)));
                }
            }
        }

        format!(
            "ρ, θ, and the abelianisation are multiplicative on 1000 pairs at each of \
             p = 3, 5, 11 with even ρ-traces throughout; nilpotency classification matches \
             the squaring oracle on 1002 elements ({nilpotent_seen} nilpotent); \
             all 512 associativity triples hold"
        )
    });
}
