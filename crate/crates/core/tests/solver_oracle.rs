mod common;

use common::oracles::shooting;
use ghlab::mode_solver::{solve_variable_mode, FormulaChoice, SolverConfig};
use ghlab::torus_fn::{PeriodicFunction, TrigPoly};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_against_shooting(lambda: f64, coef: &TrigPoly, f: &TrigPoly) -> f64 {
    let n = 64;
    let sol = solve_variable_mode(
        lambda,
        &PeriodicFunction::Trig(coef.clone()),
        &PeriodicFunction::Trig(f.clone()),
        &SolverConfig::default(),
    )
    .unwrap();
    let c_sup = coef.abs_sum();
    let reference = shooting(lambda, |t| coef.eval(t), |t| f.eval(t), c_sup, n);
    let scale = reference.iter().map(|z| z.norm()).fold(1.0, f64::max);
    reference
        .iter()
        .enumerate()
        .map(|(k, r)| (sol.u.eval(2.0 * std::f64::consts::PI * k as f64 / n as f64) - r).norm())
        .fold(0.0, f64::max)
        / scale
}

#[test]
fn one_signed_coefficient_matches_shooting() {
    let coef = TrigPoly::constant(c(1.0, 2.0)).add(&TrigPoly::sin(1).scale(c(0.0, 1.0)));
    let err = check_against_shooting(5.0, &coef, &TrigPoly::cos(1));
    assert!(err < 1e-10, "{err:e}");
}

#[test]
fn sign_changing_coefficient_matches_shooting() {
    let coef = TrigPoly::constant(c(0.3, 0.1))
        .add(&TrigPoly::sin(1).scale(c(0.0, 0.8)))
        .add(&TrigPoly::cos(2).scale(c(0.2, 0.0)));
    let f = TrigPoly::exp_i(-3).add(&TrigPoly::constant(c(0.5, -0.5)));
    let err = check_against_shooting(17.0, &coef, &f);
    assert!(err < 1e-9, "{err:e}");
}

#[test]
fn negative_mean_uses_the_other_direction() {
    let coef = TrigPoly::constant(c(-0.7, -0.4)).add(&TrigPoly::cos(1).scale(c(0.0, 0.5)));
    let err = check_against_shooting(9.5, &coef, &TrigPoly::sin(2));
    assert!(err < 1e-10, "{err:e}");
}

#[test]
fn forced_directions_agree() {
    let coef = PeriodicFunction::Trig(TrigPoly::constant(c(0.4, 0.2)).add(&TrigPoly::sin(1).scale(c(0.0, 0.6))));
    let f = PeriodicFunction::Trig(TrigPoly::cos(3));
    let solve = |formula| {
        solve_variable_mode(8.0, &coef, &f, &SolverConfig { formula, ..Default::default() }).unwrap()
    };
    let (a, b) = (solve(FormulaChoice::Backward), solve(FormulaChoice::Forward));
    let diff = (0..256)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 256.0;
            (a.u.eval(t) - b.u.eval(t)).norm()
        })
        .fold(0.0, f64::max);
    assert!(diff < 1e-9, "{diff:e}");
}
