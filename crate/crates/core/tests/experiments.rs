//! Behaviour of the simulation testbed across estimators and truths.

use rkhs_regress::krr::{default_lambda_grid, Kernel};
use rkhs_regress::sinc::SincBandwidth;
use rkhs_regress::testbed::{
    run_experiment, truth_for_replication, EstimatorSpec, ExperimentConfig, ExperimentReport, NoiseSpec,
    Truth, TruthSpec,
};

fn config(estimator: EstimatorSpec, truth: TruthSpec, n: usize, reps: usize, sigma: f64) -> ExperimentConfig {
    ExperimentConfig {
        estimator,
        truth,
        n,
        replications: reps,
        noise: NoiseSpec::new(sigma).unwrap(),
        seed: 5,
        quad_nodes: None,
    }
}

fn run(estimator: EstimatorSpec, truth: TruthSpec, n: usize, reps: usize, sigma: f64) -> ExperimentReport {
    run_experiment(&config(estimator, truth, n, reps, sigma), None).unwrap()
}

fn sinc(c: f64) -> EstimatorSpec {
    EstimatorSpec::SincProjection { c: SincBandwidth::new(c).unwrap() }
}

fn brownian(s: f64, frozen: bool) -> TruthSpec {
    TruthSpec::Brownian { s, truncation: 400, frozen }
}

#[test]
fn noiseless_error_never_exceeds_noisy_error() {
    for est in [sinc(20.0), EstimatorSpec::LegendreProjection { degree: 12 }] {
        let clean = run(est.clone(), TruthSpec::Example1, 200, 40, 0.0);
        let noisy = run(est, TruthSpec::Example1, 200, 40, 0.3);
        assert!(clean.mean_l2_error < noisy.mean_l2_error);
        assert!(clean.max_abs_noise.iter().all(|&e| e == 0.0));
    }
}

#[test]
fn error_decreases_with_sample_size() {
    let errors: Vec<f64> = [100, 400, 1600]
        .iter()
        .map(|&n| {
            run(EstimatorSpec::LegendreProjection { degree: 20 }, TruthSpec::Example1, n, 30, 0.1)
                .mean_l2_error
        })
        .collect();
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
}

#[test]
fn smoother_series_is_estimated_better() {
    for est in [sinc(30.0), EstimatorSpec::LegendreProjection { degree: 20 }] {
        let rough = run(est.clone(), brownian(1.0, false), 500, 30, 0.1);
        let smooth = run(est, brownian(2.0, false), 500, 30, 0.1);
        assert!(smooth.mean_l2_error < rough.mean_l2_error);
    }
}

#[test]
fn frozen_truth_is_shared_and_fresh_truth_is_not() {
    let coeffs = |frozen: bool, r: usize| -> Vec<f64> {
        let cfg = config(sinc(30.0), brownian(1.0, frozen), 50, 3, 0.1);
        match truth_for_replication(&cfg, r).unwrap() {
            Truth::Brownian(spec) => spec.coefficients().to_vec(),
            other => panic!("unexpected truth {other:?}"),
        }
    };
    assert_eq!(coeffs(true, 0), coeffs(true, 2));
    assert_ne!(coeffs(false, 0), coeffs(false, 2));
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let cfg = config(
        EstimatorSpec::Krr {
            kernel: Kernel::sinc(SincBandwidth::new(30.0).unwrap()),
            lambda_grid: vec![1e-3, 1e-2, 1e-1],
        },
        brownian(2.0, false),
        60,
        6,
        0.1,
    );
    let one = run_experiment(&cfg, Some(1)).unwrap();
    let three = run_experiment(&cfg, Some(3)).unwrap();
    assert_eq!(one.errors, three.errors);
    assert_eq!(one.selected_lambdas, three.selected_lambdas);
}

#[test]
fn projection_is_cheaper_than_kernel_ridge() {
    let proj = run(sinc(30.0), TruthSpec::Example1, 1000, 5, 0.1);
    let krr = run(
        EstimatorSpec::Krr {
            kernel: Kernel::sinc(SincBandwidth::new(30.0).unwrap()),
            lambda_grid: default_lambda_grid(),
        },
        TruthSpec::Example1,
        500,
        5,
        0.1,
    );
    assert!(
        proj.wall_time_secs < krr.wall_time_secs,
        "projection {} s, krr {} s",
        proj.wall_time_secs,
        krr.wall_time_secs
    );
}

#[test]
fn report_summary_matches_replications() {
    let r = run(sinc(20.0), TruthSpec::Example1, 100, 8, 0.1);
    assert_eq!(r.errors.len(), 8);
    let mean = r.errors.iter().sum::<f64>() / 8.0;
    assert!((mean - r.mean_l2_error).abs() <= 1e-15 * mean);
    assert!(r.selected_lambdas.is_none());
}
