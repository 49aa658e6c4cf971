mod common;

use common::oracles::brute_force_weighted_gap;
use ghlab::diophantine::{check_condition_a, Alpha, DiophantineVerdict};
use ghlab::hypo_engine::{
    build_counterexample, gh_experiment, verdict, verify_counterexample, DiophantineParams, GhResult,
    GhxConfig, OperatorSpec, Reason, SignConfig, WitnessCheckConfig,
};
use ghlab::regularity::{classify, CoefficientField, RegularityConfig, RegularityVerdict};
use ghlab::spectral_models::{counting_function, generate_weyl, EigenvalueSequence, WeylModel};
use ghlab::torus_fn::{PeriodicFunction, TrigPoly};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn weyl_spectrum_feeds_the_diophantine_scan() {
    let model = WeylModel::new(2.0, 1.0, 1, 1.0).unwrap();
    let seq = generate_weyl(&model, 500).unwrap();
    assert_eq!(counting_function(&seq, 100.0), 100);
    let report = check_condition_a(&Alpha::sqrt(2, 60), &seq, 500, &[1.0]).unwrap();
    assert!(report.verdict.holds());
    let (j, w) = brute_force_weighted_gap(2f64.sqrt(), 500, 1.0);
    let fit = report.fit(1.0).unwrap();
    assert_eq!(fit.argmin_j, j);
    assert!((fit.c - w).abs() < 1e-12);
}

#[test]
fn rational_frequency_is_not_hypoelliptic() {
    let seq = EigenvalueSequence::identity(50);
    let v = verdict(&OperatorSpec::constant(c(3.0 / 7.0, 0.0), seq.clone()), &DiophantineParams::default())
        .unwrap();
    assert_eq!((v.result, v.theorem), (GhResult::NotGh, Reason::ConditionAFailed));

    let params = DiophantineParams { alpha: Some(Alpha::ratio(3, 7).unwrap()), ..Default::default() };
    let v = verdict(&OperatorSpec::constant(c(3.0 / 7.0, 0.0), seq), &params).unwrap();
    let ghlab::hypo_engine::Certificate::Diophantine(rep) = v.certificate else {
        panic!("expected a Diophantine certificate")
    };
    assert!(matches!(rep.verdict, DiophantineVerdict::FailsEvidence { .. }));
}

#[test]
fn one_signed_operator_gains_regularity() {
    let seq = EigenvalueSequence::identity(20);
    let spec = OperatorSpec::variable(
        PeriodicFunction::Trig(TrigPoly::constant(c(0.0, 2.0)).add(&TrigPoly::sin(1).scale(c(0.0, 1.0)))),
        seq.clone(),
    );
    let data = CoefficientField::from_fn(&seq, 20, |_, l| {
        PeriodicFunction::Trig(TrigPoly::cos(1).scale(c((-l).exp(), 0.0)))
    })
    .unwrap();
    let cfg = GhxConfig { m_max: 4, ..Default::default() };
    let report = gh_experiment(&spec, &data, &DiophantineParams::default(), &cfg).unwrap();
    assert_eq!(report.verdict.result, GhResult::Gh);
    assert!(report.passes);
    assert!(report.per_m.iter().all(|e| e.data_passes && e.solution_passes_next));
}

#[test]
fn witness_solution_is_rejected_by_the_classifier() {
    let seq = EigenvalueSequence::identity(16);
    let spec = OperatorSpec::variable(PeriodicFunction::Trig(TrigPoly::sin(1).scale(c(0.0, 1.0))), seq);
    let w = build_counterexample(&spec, 16, &SignConfig { density: 2048, ..Default::default() }).unwrap();
    let report = classify(&w.u, 2, 4, &RegularityConfig::default()).unwrap();
    assert!(matches!(report.verdict, RegularityVerdict::RejectedAt { .. }));
    let check = verify_counterexample(&w.u, &w.f, &spec, w.t_star, &WitnessCheckConfig::default()).unwrap();
    assert!(check.all_pass());
}
