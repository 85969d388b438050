//! End-to-end exercises of the decomposition pipeline that fall outside
//! the main randomised battery: error taxonomy, serialisation shapes, and
//! the special elements (the non-unit witness, the identity, shifted
//! products).

use mjd_core::cyclic::{CyclicRingElt, Domain};
use mjd_core::error::Error;
use mjd_core::gring::{make_nilpotent, GRingElt, Q8Elt};
use mjd_core::jordan::{
    congruence_suite, is_in_v, jordan_decompose, mjd_certificate, nonunit_witness,
    normalize_to_v, p5_relations, UnitHarness,
};
use mjd_core::ratio::rat_int;

#[test]
fn error_taxonomy() {
    let one = GRingElt::one(5, Domain::Z).unwrap();
    let q_one = GRingElt::one(5, Domain::Q).unwrap();

    assert!(matches!(jordan_decompose(&one), Err(Error::SemisimpleInput)));
    assert!(matches!(jordan_decompose(&q_one), Err(Error::Precondition(_))));
    assert!(matches!(normalize_to_v(&one), Err(Error::SemisimpleInput)));

    // Augmentation 2 is rejected before any inversion is attempted.
    let two = one.scale(&rat_int(2)).unwrap();
    assert!(matches!(normalize_to_v(&two), Err(Error::Precondition(_))));

    // congruence_suite and p5_relations insist on the section.
    let z = GRingElt::group_elt(5, Domain::Z, Q8Elt::Z, 0).unwrap();
    let off_section = z.mul(&one.add(&make_nilpotent(5).unwrap()).unwrap()).unwrap();
    assert!(!is_in_v(&off_section).unwrap());
    assert!(matches!(congruence_suite(&off_section), Err(Error::NotInV)));
    assert!(matches!(p5_relations(&off_section), Err(Error::NotInV)));
    assert!(matches!(
        p5_relations(&GRingElt::one(3, Domain::Z).unwrap()),
        Err(Error::WrongPrime { expected: 5, got: 3 })
    ));
}

#[test]
fn identity_passes_the_p5_battery_as_a_semisimple_section_member() {
    // 1 ∈ 𝒱 by the h₁ − h_z = 1 test; the battery treats it as (1, 0).
    let one = GRingElt::one(5, Domain::Z).unwrap();
    assert!(is_in_v(&one).unwrap());
    let report = p5_relations(&one).unwrap();
    assert!(report.all_passed, "{report:?}");
}

#[test]
fn witness_has_no_jordan_decomposition_by_the_unit_formulas() {
    // The closed formulas presuppose a unit: applied to the non-unit
    // witness they would produce a "nilpotent" part that does not square
    // to zero, and the β criterion already rules it out.
    let w = nonunit_witness(5).unwrap();
    assert!(matches!(jordan_decompose(&w), Err(Error::Precondition(_))));
}

#[test]
fn shifted_products_certify_after_normalisation() {
    let mut h = UnitHarness::new(3, 17).unwrap();
    let z = GRingElt::group_elt(3, Domain::Z, Q8Elt::Z, 1).unwrap();
    for _ in 0..3 {
        let cu = h.next_product_unit(2);
        let shifted = z.mul(&cu.unit).unwrap();
        let cert = mjd_certificate(&shifted).unwrap();
        assert!(cert.passed);
        let (v, _) = normalize_to_v(&shifted).unwrap();
        assert!(congruence_suite(&v).unwrap().all_passed);
    }
}

#[test]
fn report_and_certificate_serialise_with_stable_shapes() {
    let p = 5;
    let u = GRingElt::one(p, Domain::Z)
        .unwrap()
        .add(&make_nilpotent(p).unwrap())
        .unwrap();

    let pair = jordan_decompose(&u).unwrap();
    let pair_json = serde_json::to_value(&pair).unwrap();
    assert!(pair_json.get("u_s").is_some());
    assert!(pair_json.get("u_n").is_some());

    let cert = mjd_certificate(&u).unwrap();
    let cert_json = serde_json::to_value(&cert).unwrap();
    for key in ["p", "F_a", "F_b", "F_c", "residues", "passed"] {
        assert!(cert_json.get(key).is_some(), "missing {key}");
    }
    assert_eq!(cert_json["passed"], serde_json::Value::Bool(true));

    let report = congruence_suite(&u).unwrap();
    let report_json = serde_json::to_value(&report).unwrap();
    assert_eq!(report_json["p"], serde_json::json!(5));
    assert_eq!(report_json["all_passed"], serde_json::Value::Bool(true));
    let checks = report_json["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 6);
    for check in checks {
        assert!(check.get("name").is_some());
        assert!(check.get("passed").is_some());
        assert!(check.get("detail").is_some());
    }

    // Elements round-trip through their JSON encodings.
    let encoded = serde_json::to_string(&u).unwrap();
    let decoded: GRingElt = serde_json::from_str(&encoded).unwrap();
    assert_eq!(decoded, u);
    let f = CyclicRingElt::from_int_coeffs(p, Domain::Z, &[3, -1, 0, 2, 1]).unwrap();
    let encoded = serde_json::to_string(&f).unwrap();
    let decoded: CyclicRingElt = serde_json::from_str(&encoded).unwrap();
    assert_eq!(decoded, f);
}
