//! Acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line (visible with `cargo test -- --nocapture`).

use num_rational::BigRational;
use num_traits::One;
use skewps::oracle::oracle_compare;
use skewps::report::Report;
use skewps::ring::{Elem, Ring, SeriesExt};
use skewps::scenario::{run_scenario, Scenario};
use skewps::series::SkewSeries;

fn gate(name: &str, report: &Report) {
    println!(
        "acceptance {name}: {}",
        if report.pass { "PASS" } else { "FAIL" }
    );
    assert!(
        report.pass,
        "{name} failed:\n{}",
        report.to_json_string()
    );
}

fn run_default(check: &str) -> Report {
    run_scenario(&Scenario::named(check)).unwrap()
}

#[test]
fn criterion_01_example_2_10_suite() {
    // k4_quotient over the rationals, N = 16, 200 seeded series.
    gate("01 example-2.10", &run_default("example-2.10"));
}

#[test]
fn criterion_02_skew_derivation_law() {
    // 500 samples per catalogued ring plus the lifted tower pair, with a
    // degree-lowering negative control.
    gate("02 skew-derivation", &run_default("skew-derivation"));
}

#[test]
fn criterion_03_series_ring_axioms() {
    // 1000 seeded triples per ring at N = 8.
    gate("03 series-associativity", &run_default("series-associativity"));
}

#[test]
fn criterion_04_unit_lemma() {
    // 200 + 200 + 200 seeded series mod z^12.
    gate("04 unit-lemma", &run_default("unit-lemma"));
}

#[test]
fn criterion_05_left_right_conversion() {
    // 500 roundtrips per ring and spanning-set consistency at N = 8.
    gate("05 left-right-roundtrip", &run_default("left-right-roundtrip"));
}

#[test]
fn criterion_06_gr_leading_term_law() {
    // 500 seeded pairs over poly_dt and poly_qscale:2 at N = 8.
    gate("06 gr-leading", &run_default("gr-leading"));
}

#[test]
fn criterion_07_induced_ideal_equality() {
    // poly_euler, I = <t>, N = 8, 100 samples: three inclusions plus
    // contraction.
    gate("07 prop2.7", &run_default("prop2.7"));
}

#[test]
fn criterion_08_star_condition() {
    // t in {1,2,3}, I = <t> in poly_euler, 100 samples each.
    gate("08 star", &run_default("star"));
}

#[test]
fn criterion_09_weyl_tower_commutation() {
    // q = d = 1 at N = 8: factorial closed form, Laurent relation
    // y x - x y = 1, and D(x^i) = i x^{i-1}.
    let one = run_default("weyl-commutation");
    let mut pass = one.pass;
    let mut detail = one.to_json_string();

    // q in {2, 1/3}, d = 1, at N = 6, plus oracle agreement on z_x z_y.
    for q in ["2", "1/3"] {
        let mut sc = Scenario::named("weyl-commutation");
        sc.q = Some(q.into());
        sc.precision = Some(6);
        let r = run_scenario(&sc).unwrap();
        if !r.pass {
            pass = false;
            detail = r.to_json_string();
        }

        let qr: BigRational = skewps::field::parse_rational(q).unwrap();
        let x_level = Ring::series(
            Ring::rational(),
            SeriesExt::WeylSigmaD {
                q: qr,
                d: BigRational::one(),
            },
            6,
        );
        let top = Ring::series(x_level.clone(), SeriesExt::Trivial, 6);
        let Ring::Series(s) = &*x_level else { unreachable!() };
        let zx = Elem::Series(Box::new(SkewSeries::constant(
            x_level.clone(),
            Elem::Series(Box::new(SkewSeries::z(s.coeff.clone(), 6))),
            6,
        )));
        let zy = Elem::Series(Box::new(SkewSeries::z(x_level.clone(), 6)));
        let r = oracle_compare(&top, &zx, &zy);
        if !r.pass {
            pass = false;
            detail = format!("oracle disagreed on z_x z_y at q={q}: {}", r.to_json_string());
        }
    }

    println!("acceptance 09 weyl-commutation: {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "09 weyl-commutation failed:\n{detail}");
}

#[test]
fn criterion_10_oracle_differential() {
    // 500 seeded pairs per catalogued ring at N = 6 and 200
    // strategy-independence terms.
    gate("10 oracle-diff", &run_default("oracle-diff"));
}

#[test]
fn criterion_11_tower_units() {
    // 2-level Weyl tower over the rationals at N = 6, 200 + 200 samples.
    gate("11 tower-units", &run_default("tower-units"));
}

#[test]
fn criterion_12_report_determinism() {
    let mut pass = true;
    for check in ["example-2.10", "unit-lemma", "star", "weyl-commutation"] {
        let mut sc = Scenario::named(check);
        sc.samples = Some(25);
        let a = run_scenario(&sc).unwrap().to_json_string();
        let b = run_scenario(&sc).unwrap().to_json_string();
        if a != b {
            pass = false;
        }
    }
    println!("acceptance 12 determinism: {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "reports were not byte-identical across reruns");
}
