use std::f64::consts::FRAC_PI_4;

use dephase::criteria::{decide_with, Verdict, DEFAULT_TOL_COMM};
use dephase::evolution::joint_state;
use dephase::evolution::{propagators, ConditionalPropagators};
use dephase::fixtures;
use dephase::linalg::{Complex64, ComplexMatrix, Subsystem};
use dephase::model::{
    random_instance, validate, DephasingModel, Dynamics, EnsembleSpec, Family, ValidatedModel,
};
use dephase::witnesses::{
    minor_d, minor_x, minor_y, minor_ytilde, pt_spectrum, witness_scan, MinorClass, WitnessClass,
};
use dephase::Error;

fn real(rows: &[&[f64]]) -> ComplexMatrix {
    ComplexMatrix::from_rows(
        &rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect::<Vec<_>>(),
    )
    .unwrap()
}

fn qubit_with(env: ComplexMatrix, w1: ComplexMatrix) -> (ValidatedModel, ConditionalPropagators) {
    let m = env.rows();
    let h = Complex64::new(0.5f64.sqrt(), 0.0);
    let model = validate(DephasingModel {
        n: 2,
        m,
        amplitudes: vec![h, h],
        initial_env: env,
        dynamics: Dynamics::Propagators {
            instant: 1.0,
            propagators: vec![ComplexMatrix::identity(m), w1],
        },
        system_energies: None,
    })
    .unwrap();
    let props = propagators(&model, 1.0).unwrap();
    (model, props)
}

fn rotation(a: f64) -> ComplexMatrix {
    real(&[&[a.cos(), -a.sin()], &[a.sin(), a.cos()]])
}

fn random(family: Family, n: usize, m: usize, seed: u64) -> ValidatedModel {
    let spec = EnsembleSpec {
        seed,
        count: 1,
        n,
        m,
        family,
    };
    validate(random_instance(&spec, 0).unwrap()).unwrap()
}

#[test]
fn qutrit_fixture_d_minor() {
    let model = validate(fixtures::qutrit_mixed_environment()).unwrap();
    let props = propagators(&model, fixtures::QUTRIT_EXAMPLE_INSTANT).unwrap();
    // |c|^6 = 1/27, p = 1/2, |x_01| = 1, phases ±1: D_01 = −2·(1/27)·(1/8)·2.
    for (k, q) in [(0, 1), (1, 0)] {
        let d = minor_d(&model, &props, k, q, DEFAULT_TOL_COMM).unwrap();
        assert_eq!(d.class, MinorClass::D);
        assert!((d.determinant + 1.0 / 54.0).abs() < 1e-12, "{d:?}");
        assert!((d.closed_form + 1.0 / 54.0).abs() < 1e-12, "{d:?}");
    }
    for k in 0..2 {
        let d = minor_d(&model, &props, k, k, DEFAULT_TOL_COMM).unwrap();
        assert!(d.determinant.abs() < 1e-15 && d.closed_form.abs() < 1e-15);
    }
    let x = minor_x(&model, &props, 0, 1, 2, 0, 1, DEFAULT_TOL_COMM).unwrap();
    assert!((x.determinant + 1.0 / 54.0).abs() < 1e-12);
}

#[test]
fn x_minor_refuses_qubit_like_violations() {
    let model = random(Family::GenericHermitian, 3, 2, 4);
    let props = propagators(&model, 1.0).unwrap();
    assert!(matches!(
        minor_x(&model, &props, 0, 1, 2, 0, 1, DEFAULT_TOL_COMM),
        Err(Error::PreconditionFailed(_))
    ));
}

#[test]
fn x_minors_vanish_for_commuting_generators() {
    let model = random(Family::CommutingFamily, 3, 3, 5);
    let props = propagators(&model, 1.3).unwrap();
    for k in 0..3 {
        for q in 0..3 {
            let x = minor_x(&model, &props, 0, 1, 2, k, q, DEFAULT_TOL_COMM).unwrap();
            assert!(
                x.closed_form.abs() < 1e-14 && x.determinant.abs() < 1e-14,
                "{x:?}"
            );
        }
    }
}

#[test]
fn y_minor_with_one_zero_weight() {
    // R(0) = |0⟩⟨0|, W_01 = w_1† with ⟨0|w_1†|1⟩ = sin(π/4):
    // Y = −|c_0|⁴|c_1|²·p_n²·|y_nr|² = −(1/4)(1/2)(1/2).
    let (model, props) = qubit_with(real(&[&[1.0, 0.0], &[0.0, 0.0]]), rotation(FRAC_PI_4));
    let occupied = minor_y(&model, &props, 0, 1, 1).unwrap();
    assert!(occupied.informative);
    assert!(
        (occupied.closed_form + 1.0 / 16.0).abs() < 1e-12,
        "{occupied:?}"
    );
    assert!(
        (occupied.determinant + 1.0 / 16.0).abs() < 1e-12,
        "{occupied:?}"
    );
    let empty = minor_y(&model, &props, 0, 1, 0).unwrap();
    assert!(empty.closed_form == 0.0 && empty.determinant.abs() < 1e-15);
}

#[test]
fn y_minors_vanish_when_blocks_commute() {
    let model = random(Family::CommutingFamily, 3, 4, 6);
    let props = propagators(&model, 2.2).unwrap();
    for (i, j) in [(0, 1), (2, 0), (1, 2)] {
        for n in 0..4 {
            let y = minor_y(&model, &props, i, j, n).unwrap();
            assert!(
                y.closed_form.abs() < 1e-12 && y.determinant.abs() < 1e-12,
                "{y:?}"
            );
        }
    }
}

#[test]
fn decoupled_zero_weight_state_is_eliminated() {
    // State 2 has zero weight and w_1 never touches it, so the instance
    // reduces to the single-zero case on states {0, 1}.
    let env = real(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
    let w1 = real(&[
        &[FRAC_PI_4.cos(), -FRAC_PI_4.sin(), 0.0],
        &[FRAC_PI_4.sin(), FRAC_PI_4.cos(), 0.0],
        &[0.0, 0.0, 1.0],
    ]);
    let (model, props) = qubit_with(env, w1);
    let ys: Vec<_> = (0..3)
        .filter_map(|n| minor_y(&model, &props, 0, 1, n).ok())
        .collect();
    assert_eq!(ys.len(), 2);
    assert!(ys.iter().all(|y| y.basis_note.contains("eliminated")));
    let min = ys
        .iter()
        .map(|y| y.determinant)
        .fold(f64::INFINITY, f64::min);
    assert!((min + 1.0 / 16.0).abs() < 1e-12);
    for y in &ys {
        assert!((y.closed_form - y.determinant).abs() < 1e-12);
    }
}

#[test]
fn ytilde_minors_with_two_coupled_zero_weights() {
    let env = real(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
    let (a, b) = (0.7f64, 0.4f64);
    let g01 = real(&[
        &[a.cos(), -a.sin(), 0.0],
        &[a.sin(), a.cos(), 0.0],
        &[0.0, 0.0, 1.0],
    ]);
    let g02 = real(&[
        &[b.cos(), 0.0, -b.sin()],
        &[0.0, 1.0, 0.0],
        &[b.sin(), 0.0, b.cos()],
    ]);
    let w1 = &g01 * &g02;
    let (model, props) = qubit_with(env, w1.clone());

    let y = minor_y(&model, &props, 0, 1, 2).unwrap();
    assert!(!y.informative);
    assert_eq!(y.closed_form, 0.0);
    assert!(y.determinant.abs() < 1e-15);

    // The occupied state is the last eigenvector; the split of the coupling
    // between the two zero-weight states depends on the basis, its sum does not.
    let occupied = 2;
    let total: f64 = [0, 1]
        .iter()
        .map(|&r| {
            let e = minor_ytilde(&model, &props, 0, 1, occupied, r).unwrap();
            assert!((e.closed_form - e.determinant).abs() < 1e-12, "{e:?}");
            e.determinant
        })
        .sum();
    let y00 = w1.adjoint()[(0, 0)].norm_sqr();
    assert!((total + (1.0 - y00) / 8.0).abs() < 1e-12, "{total}");

    let min_pt = pt_spectrum(&joint_state(&model, &props).unwrap(), Subsystem::System).unwrap()[0];
    assert!(min_pt < -1e-3);
    assert!(matches!(
        minor_ytilde(&model, &props, 0, 1, 0, 1),
        Err(Error::PreconditionFailed(_))
    ));
}

#[test]
fn scan_reports_x_for_the_qutrit_fixture() {
    let model = validate(fixtures::qutrit_mixed_environment()).unwrap();
    let props = propagators(&model, fixtures::QUTRIT_EXAMPLE_INSTANT).unwrap();
    let report = decide_with(&model, &props, DEFAULT_TOL_COMM).unwrap();
    let w = witness_scan(&model, &props, &report).unwrap();
    assert_eq!(w.len(), 1);
    assert_eq!(w[0].class, WitnessClass::X);
    assert!((w[0].determinant + 1.0 / 54.0).abs() < 1e-12);
    let json = serde_json::to_value(&w[0]).unwrap();
    for key in [
        "class",
        "indices",
        "closed_form",
        "determinant",
        "pt_min_eigenvalue",
    ] {
        assert!(json.get(key).is_some(), "{key}");
    }
}

#[test]
fn scan_is_empty_for_separable_states() {
    let model = random(Family::CommutingFamily, 4, 3, 8);
    let props = propagators(&model, 1.0).unwrap();
    let report = decide_with(&model, &props, DEFAULT_TOL_COMM).unwrap();
    assert_eq!(report.verdict, Verdict::Separable);
    assert!(witness_scan(&model, &props, &report).unwrap().is_empty());
    let min = pt_spectrum(&joint_state(&model, &props).unwrap(), Subsystem::System).unwrap()[0];
    assert!(min >= -1e-10);
}

#[test]
fn scan_reports_y_for_qubit_like_violations() {
    for family in [Family::GenericHermitian, Family::PureEnvironment] {
        for (n, m) in [(2, 2), (3, 3), (4, 2)] {
            let model = random(family, n, m, 10);
            let props = propagators(&model, 0.9).unwrap();
            let report = decide_with(&model, &props, DEFAULT_TOL_COMM).unwrap();
            assert!(!report.qubit_like_holds());
            let w = witness_scan(&model, &props, &report).unwrap();
            assert!(
                matches!(w[0].class, WitnessClass::Y | WitnessClass::Ytilde),
                "{family:?} {n}x{m}: {w:?}"
            );
            assert!(w.iter().all(|x| x.determinant < 0.0));
        }
    }
}

#[test]
fn scan_reports_x_for_mixed_environments() {
    let model = random(Family::MixedEnvironment, 4, 3, 12);
    let props = propagators(&model, 1.5).unwrap();
    let report = decide_with(&model, &props, DEFAULT_TOL_COMM).unwrap();
    assert!(report.qubit_like_holds() && !report.cross_holds());
    let w = witness_scan(&model, &props, &report).unwrap();
    assert_eq!(w[0].class, WitnessClass::X);
    assert!(w[0].determinant < 0.0 && w[0].pt_min_eigenvalue < 0.0);
}

#[test]
fn full_rank_qubit_y_vanishes_exactly_when_separable() {
    for seed in 0..10 {
        let model = random(Family::GenericHermitian, 2, 3, seed);
        for t in [0.0, 0.8] {
            let props = propagators(&model, t).unwrap();
            let report = decide_with(&model, &props, DEFAULT_TOL_COMM).unwrap();
            let all_zero =
                (0..3).all(|n| minor_y(&model, &props, 0, 1, n).unwrap().determinant.abs() < 1e-12);
            assert_eq!(
                all_zero,
                report.verdict == Verdict::Separable,
                "seed {seed} t {t}"
            );
        }
    }
}
