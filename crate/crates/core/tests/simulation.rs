mod common;

use approx::assert_abs_diff_eq;
use fidelity_decay::analytics::{gamma_for_config, product_closed_form, closed_form_params};
use fidelity_decay::linalg::PauliAxis;
use fidelity_decay::noise::{
    expand_shorthand, CoefficientSpec, CorrelationClass, NoiseModelConfig, NoiseTerm, PairSelection, Shorthand,
};
use fidelity_decay::linalg::ProductOperator;
use fidelity_decay::sim::{
    estimate_gamma, realization_traces, run_experiment, run_experiment_bernoulli, Backend, CircuitForm,
    ExperimentConfig, FidelityCurve, GammaMethod, QubitInit,
};

fn one_body(n: usize, spec: CoefficientSpec, class: CorrelationClass) -> NoiseModelConfig {
    expand_shorthand(n, &Shorthand::one_body(spec), class).unwrap()
}

fn spec_for(class: CorrelationClass) -> CoefficientSpec {
    match class {
        CorrelationClass::Coherent => CoefficientSpec::Constant(0.09),
        _ => CoefficientSpec::gaussian(0.03, 0.07).unwrap(),
    }
}

#[test]
fn dense_and_separable_backends_agree_per_realization() {
    for class in CorrelationClass::ALL {
        for form in [CircuitForm::MotionReversal, CircuitForm::StepwiseTwirl] {
            let base = ExperimentConfig::new(one_body(3, spec_for(class), class))
                .with_qubit_state(1, QubitInit::MaximallyMixed)
                .with_qubit_state(2, QubitInit::PureBloch { theta: 2.0, phi: 0.3 })
                .with_measured(&[0, 2])
                .with_steps(12)
                .with_realizations(20)
                .with_circuit_form(form)
                .with_seed(5);
            let dense = realization_traces(&base.clone().with_backend(Backend::Dense)).unwrap();
            let separable = realization_traces(&base.with_backend(Backend::Separable)).unwrap();
            for (a, b) in dense.iter().zip(&separable) {
                for (x, y) in a.iter().zip(b) {
                    assert_abs_diff_eq!(x, y, epsilon = 1e-12);
                }
            }
        }
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let noise = expand_shorthand(
        3,
        &Shorthand::one_body(CoefficientSpec::gaussian(0.0, 0.05).unwrap())
            .with_two_body(PairSelection::All, CoefficientSpec::Constant(0.03)),
        CorrelationClass::IncoherentShort,
    )
    .unwrap();
    let cfg = ExperimentConfig::new(noise).with_steps(10).with_realizations(64).with_seed(9);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_experiment(&cfg).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
}

#[test]
fn noiseless_runs_stay_at_f0() {
    let cfg = ExperimentConfig::new(NoiseModelConfig::noiseless(3).unwrap())
        .with_qubit_state(1, QubitInit::MaximallyMixed)
        .with_steps(5)
        .with_realizations(10);
    let curve = run_experiment(&cfg).unwrap();
    for t in 0..=5 {
        assert_abs_diff_eq!(curve.mean_f[t], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(curve.stderr[t], 0.0, epsilon = 1e-12);
    }
}

#[test]
fn noise_on_unmeasured_qubits_is_invisible_for_one_body_models() {
    let op = ProductOperator::from_sparse(2, &[1], "X").unwrap();
    let noise =
        NoiseModelConfig::new(2, vec![NoiseTerm::new(op, CoefficientSpec::Constant(0.3))], CorrelationClass::Coherent)
            .unwrap();
    let curve = run_experiment(&ExperimentConfig::new(noise).with_measured(&[0]).with_steps(4)).unwrap();
    assert!(curve.mean_f.iter().all(|&f| (f - 1.0).abs() < 1e-12));
}

#[test]
fn same_seed_reproduces_and_new_seed_changes_coherent_draws() {
    let noise = one_body(2, CoefficientSpec::gaussian(0.0, 0.1).unwrap(), CorrelationClass::Coherent);
    let cfg = ExperimentConfig::new(noise).with_steps(3).with_realizations(16);
    let a = run_experiment(&cfg.clone().with_seed(1)).unwrap();
    assert_eq!(a, run_experiment(&cfg.clone().with_seed(1)).unwrap());
    assert_ne!(a.mean_f, run_experiment(&cfg.with_seed(2)).unwrap().mean_f);
}

#[test]
fn sampled_mean_tracks_exact_trace() {
    let noise = one_body(2, CoefficientSpec::Constant(0.2), CorrelationClass::Coherent);
    let cfg = ExperimentConfig::new(noise).with_steps(8).with_realizations(20_000).with_seed(3);
    let exact = run_experiment(&cfg).unwrap();
    let sampled = run_experiment_bernoulli(&cfg).unwrap();
    for t in 1..=8 {
        let z = (exact.mean_f[t] - sampled.mean_f[t]).abs() / sampled.stderr[t];
        assert!(z < 4.0, "t = {t}: z = {z}");
    }
}

#[test]
fn coherent_one_body_curve_matches_closed_form_at_high_statistics() {
    let noise = one_body(2, CoefficientSpec::Constant(0.1), CorrelationClass::Coherent);
    let cfg = ExperimentConfig::new(noise)
        .with_qubit_state(1, QubitInit::MaximallyMixed)
        .with_steps(30)
        .with_realizations(20_000)
        .with_seed(4);
    let curve = run_experiment(&cfg).unwrap();
    let params = closed_form_params(&cfg).unwrap();
    for t in 0..=30 {
        let expected = product_closed_form(&params, t).unwrap();
        assert!((curve.mean_f[t] - expected).abs() <= 4.0 * curve.stderr[t] + 1e-12, "t = {t}");
    }
}

#[test]
fn first_step_gamma_matches_second_order_prediction() {
    // two-body noise with one unmeasured mixed qubit, dense backend
    let noise = expand_shorthand(
        3,
        &Shorthand::one_body(CoefficientSpec::Constant(0.02))
            .with_axes(&[PauliAxis::X, PauliAxis::Z])
            .with_two_body(PairSelection::FirstNeighbor, CoefficientSpec::Constant(0.02)),
        CorrelationClass::Coherent,
    )
    .unwrap();
    let cfg = ExperimentConfig::new(noise)
        .with_qubit_state(2, QubitInit::MaximallyMixed)
        .with_measured(&[0, 1])
        .with_realizations(40_000)
        .with_seed(8);
    let est = estimate_gamma(&cfg, GammaMethod::FirstStep).unwrap();
    let predicted = gamma_for_config(&cfg).unwrap().gamma;
    let chi_sq_total = 0.02f64.powi(2) * (6.0 + 18.0);
    assert!(
        (est.gamma - predicted).abs() <= 3.0 * est.stderr + chi_sq_total * chi_sq_total,
        "{} ± {} vs {predicted}",
        est.gamma,
        est.stderr
    );
}

#[test]
fn curve_files_round_trip() {
    let noise = one_body(2, CoefficientSpec::gaussian(0.0, 0.05).unwrap(), CorrelationClass::IncoherentLong);
    let curve = run_experiment(&ExperimentConfig::new(noise).with_steps(7).with_realizations(13)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    curve.save(&path).unwrap();
    assert_eq!(FidelityCurve::load(&path).unwrap(), curve);
}

#[test]
fn single_realization_reports_zero_stderr() {
    let noise = one_body(1, CoefficientSpec::Constant(0.1), CorrelationClass::Coherent);
    let curve = run_experiment(&ExperimentConfig::new(noise).with_steps(3).with_realizations(1)).unwrap();
    assert!(curve.stderr.iter().all(|&s| s == 0.0));
}

#[test]
fn brute_force_oracle_agrees_with_simulator() {
    let noise = expand_shorthand(
        2,
        &Shorthand::one_body(CoefficientSpec::Constant(0.04))
            .with_two_body(PairSelection::All, CoefficientSpec::Constant(0.04)),
        CorrelationClass::Coherent,
    )
    .unwrap();
    let states = [QubitInit::Zero.state(), QubitInit::MaximallyMixed.state()];
    let values = vec![0.04; noise.terms().len()];
    let exact = common::exact_gamma_clifford(&noise, &values, &states, &[0]);
    let cfg = ExperimentConfig::new(noise)
        .with_qubit_state(1, QubitInit::MaximallyMixed)
        .with_measured(&[0])
        .with_realizations(50_000)
        .with_seed(2);
    let est = estimate_gamma(&cfg, GammaMethod::FirstStep).unwrap();
    assert!((est.gamma - exact).abs() <= 3.0 * est.stderr, "{} ± {} vs {exact}", est.gamma, est.stderr);
}
