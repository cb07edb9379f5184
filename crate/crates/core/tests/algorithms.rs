mod common;

use cholqr::algos::{Stage, ShiftPolicy};
use cholqr::cost::{collective_calls, collective_words};
use cholqr::dense::householder_qr_reference;
use cholqr::harness::run_factorization;
use cholqr::testbed::{generate, orthogonality_error, residual_error};
use cholqr::{Algorithm, CommError, FactorOptions, Matrix, PanelSpec, QrError};
use common::*;
use proptest::prelude::*;

fn orthonormal(m: usize, n: usize, seed: u64) -> Matrix {
    let g = generate(m, n, 1.0, seed).unwrap().matrix;
    householder_qr_reference(g.view()).unwrap().0
}

fn panels_for(algorithm: Algorithm, k: usize) -> Option<usize> {
    algorithm.uses_panels().then_some(k)
}

#[test]
fn orthonormal_input_is_a_fixed_point() {
    let q0 = orthonormal(120, 9, 3);
    for algorithm in Algorithm::ALL {
        for ranks in [1, 3] {
            let f = factors(&q0, &config(algorithm, ranks, panels_for(algorithm, 3)));
            let eye = Matrix::identity(9);
            let (q_tol, r_tol) = match algorithm {
                // The shift perturbs R by about s / 2 on the diagonal.
                Algorithm::Scqr | Algorithm::Scqr3 => {
                    let s = ShiftPolicy::default().shift(120, 9.0);
                    (10.0 * U + s, 10.0 * U + s)
                }
                _ => (10.0 * U, 10.0 * U),
            };
            assert!(f.q.max_abs_diff(&q0) <= q_tol, "{algorithm} P={ranks}");
            assert!(f.r.as_matrix().max_abs_diff(&eye) <= r_tol, "{algorithm} P={ranks}");
        }
    }
}

#[test]
fn cqr_breaks_down_beyond_square_root_of_precision() {
    let a = generate(1000, 100, 1e10, 1).unwrap().matrix;
    let out = run_factorization(&a, &config(Algorithm::Cqr, 4, None));
    let b = *out.factors.unwrap_err().breakdown().expect("breakdown");
    assert_eq!((b.stage, b.panel), (Stage::Cqr, None));
}

#[test]
fn cqr2_on_tall_suite() {
    let ok = report(&tall(1e4), &config(Algorithm::Cqr2, 4, None));
    assert!(ok.within(100.0 * U), "{ok:?}");
    let bad = report(&tall(1e12), &config(Algorithm::Cqr2, 4, None));
    assert!(bad.breakdown.is_some() || bad.orthogonality > 1e-8);
}

#[test]
fn cqr2_first_breaks_down_at_1e9() {
    for e in [8, 9] {
        let r = report(&tall(10f64.powi(e)), &config(Algorithm::Cqr2, 4, None));
        assert_eq!(r.breakdown.is_some(), e == 9, "kappa 1e{e}: {r:?}");
    }
}

#[test]
fn scqr_survives_extreme_condition() {
    let r = report(&tall(1e15), &config(Algorithm::Scqr, 4, None));
    assert!(r.breakdown.is_none());
    // A preconditioner, not an orthogonal factor.
    assert!(r.orthogonality > 1e-8);
    assert!(r.residual <= 1e-13);
}

#[test]
fn scqr_without_roundoff_is_cqr() {
    let a = generate(200, 12, 1e5, 4).unwrap().matrix;
    let options = FactorOptions {
        panels: None,
        shift: ShiftPolicy::with_unit_roundoff(0.0),
    };
    for ranks in [1, 2, 5] {
        let shifted = factors(&a, &config(Algorithm::Scqr, ranks, None).options(options));
        let plain = factors(&a, &config(Algorithm::Cqr, ranks, None));
        assert!(same_factors(&shifted, &plain));
    }
}

#[test]
fn scqr3_matches_cqr2_when_well_conditioned() {
    let a = generate(400, 30, 1.0, 2).unwrap().matrix;
    let x = factors(&a, &config(Algorithm::Scqr3, 4, None));
    let y = factors(&a, &config(Algorithm::Cqr2, 4, None));
    assert!(x.r.as_matrix().max_abs_diff(y.r.as_matrix()) <= 100.0 * U);
}

#[test]
fn one_panel_degenerates_bitwise() {
    let a = generate(250, 16, 1e6, 8).unwrap().matrix;
    for backend in BACKENDS {
        for ranks in [1, 2, 3, 8] {
            let run = |alg, k| factors(&a, &config(alg, ranks, k).backend(backend));
            let cqr = run(Algorithm::Cqr, None);
            let cqr2 = run(Algorithm::Cqr2, None);
            assert!(same_factors(&run(Algorithm::Cqrgs, Some(1)), &cqr));
            assert!(same_factors(&run(Algorithm::Cqr2gs, Some(1)), &cqr2));
            assert!(same_factors(&run(Algorithm::Mcqr2gs, Some(1)), &cqr2));
        }
    }
}

#[test]
fn cqr2gs_two_panels_mid_condition() {
    let r = report(&tall(1e8), &config(Algorithm::Cqr2gs, 4, Some(2)));
    assert!(r.within(1e-13), "{r:?}");
}

#[test]
fn cqr2gs_panel_sensitivity_is_frozen() {
    let a = tall(1e15);
    let orth = |k| report(&a, &config(Algorithm::Cqr2gs, 4, Some(k)));
    let one = orth(1);
    assert_eq!(one.breakdown.map(|b| b.stage), Some(Stage::FirstPass));
    assert!(orth(3).orthogonality > 1e-13);
    let five = orth(5);
    assert!(five.within(1e-13), "{five:?}");
}

#[test]
fn mcqr2gs_two_panel_threshold_is_frozen() {
    let at = |kappa| report(&tall(kappa), &config(Algorithm::Mcqr2gs, 4, Some(2)));
    assert!(at(1e16).within(1e-13));
    let broken = at(1e17).breakdown.expect("breakdown at 1e17");
    assert_eq!((broken.stage, broken.panel), (Stage::Panel1Cqr2, Some(0)));
}

#[test]
fn breakdown_reports_panel() {
    let a = generate(300, 30, 1e30, 1).unwrap().matrix;
    let err = run_factorization(&a, &config(Algorithm::Cqrgs, 2, Some(2))).factors.unwrap_err();
    let b = err.breakdown().expect("breakdown");
    assert_eq!((b.stage, b.panel), (Stage::Cqr, Some(0)));
}

#[test]
fn ragged_panels_factor_accurately() {
    let a = generate(300, 10, 1e6, 6).unwrap().matrix;
    for algorithm in [Algorithm::Cqrgs, Algorithm::Cqr2gs, Algorithm::Mcqr2gs] {
        for k in [3, 4, 6, 7, 10] {
            let r = report(&a, &config(algorithm, 3, Some(k)));
            assert!(r.residual <= 1e-13, "{algorithm} k={k}: {r:?}");
            if algorithm != Algorithm::Cqrgs {
                assert!(r.orthogonality <= 1e-13, "{algorithm} k={k}: {r:?}");
            }
        }
    }
}

#[test]
fn call_and_word_counts_match_reconciliation() {
    let a = generate(160, 12, 1e3, 11).unwrap().matrix;
    for algorithm in Algorithm::ALL {
        for ranks in [1, 2, 4, 8] {
            for k in [1, 2, 3, 5, 10] {
                let panels = panels_for(algorithm, k);
                if panels.is_none() && k > 1 {
                    continue;
                }
                let spec = PanelSpec::from_panels(12, k).unwrap();
                let out = run_factorization(&a, &config(algorithm, ranks, panels));
                assert!(out.factors.is_ok());
                let label = format!("{algorithm} P={ranks} k={k}");
                assert_eq!(out.stats.allreduce_calls, collective_calls(algorithm, spec.count()), "{label}");
                assert_eq!(out.stats.allreduce_words, collective_words(algorithm, 12, &spec), "{label}");
            }
        }
    }
}

#[test]
fn thirty_two_ranks_on_one_thread() {
    let a = generate(320, 8, 1e4, 12).unwrap().matrix;
    let one = factors(&a, &config(Algorithm::Mcqr2gs, 1, Some(2)));
    let many = factors(&a, &config(Algorithm::Mcqr2gs, 32, Some(2)));
    assert!(many.q.max_abs_diff(&one.q) <= 1e-13);
    assert!(residual_error(a.view(), many.q.view(), &many.r).unwrap() <= 1e-13);
    assert!(orthogonality_error(many.q.view()) <= 1e-13);
}

#[test]
fn invalid_requests() {
    let a = generate(20, 4, 10.0, 1).unwrap().matrix;
    let err = |cfg| run_factorization(&a, &cfg).factors.unwrap_err();
    assert_eq!(
        err(config(Algorithm::Cqr2, 2, Some(2))),
        QrError::PanelsNotApplicable { algorithm: Algorithm::Cqr2 }
    );
    assert!(matches!(err(config(Algorithm::Cqr2gs, 2, Some(5))), QrError::Panel(_)));
    assert_eq!(
        err(config(Algorithm::Cqr, 21, None)),
        QrError::Comm(CommError::InvalidPartition { rows: 20, parts: 21 })
    );
    let wide = Matrix::zeros(3, 4);
    assert_eq!(
        run_factorization(&wide, &config(Algorithm::Cqr, 1, None)).factors.unwrap_err(),
        QrError::InvalidShape { rows: 3, cols: 4 }
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn factors_are_upper_and_accurate(
        n in 2usize..12,
        extra in 0usize..60,
        ranks in 1usize..6,
        k in 1usize..5,
        log_kappa in 0.0f64..4.0,
        seed in 0u64..1000,
        alg in 0usize..7,
    ) {
        let m = n + extra + ranks;
        let algorithm = Algorithm::ALL[alg];
        let a = generate(m, n, 10f64.powf(log_kappa), seed).unwrap().matrix;
        let f = factors(&a, &config(algorithm, ranks, panels_for(algorithm, k.min(n))));
        let r = f.r.as_matrix();
        for j in 0..n {
            for i in j + 1..n {
                prop_assert_eq!(r.get(i, j).to_bits(), 0);
            }
        }
        prop_assert!(residual_error(a.view(), f.q.view(), &f.r).unwrap() <= 1e-13);
        prop_assert_eq!(f.q.shape(), (m, n));
    }
}
