//! Periodic solutions of the mode equations `D_t u + λωu = f` and
//! `D_t u + λc(t)u = f`, with `D_t = −i∂_t`.
//!
//! Constant coefficients are solved frequency by frequency,
//! `û(τ) = f̂(τ)/(τ + ωλ)`. Variable coefficients go through the two explicit
//! integral representations over one period; the one whose exponent stays
//! bounded when `Im c` is one-signed is picked automatically, and exponents are
//! summed in log space so sign-changing `Im c` does not overflow.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypo_engine::{Coefficient, OperatorSpec};
use crate::regularity::CoefficientField;
use crate::spectral_models::EigenvalueSequence;
use crate::torus_fn::{
    composite_nodes, grid_points, GridFn, PeriodicFunction, TrigPoly, DEFAULT_GRID_GAMMA_MAX,
    TWO_PI,
};

/// Largest real exponent accepted before declaring overflow.
const MAX_EXPONENT: f64 = 700.0;

/// Relative size of the top quarter of the spectrum at which the output grid
/// stops refining.
const TAIL_TOL: f64 = 1e-13;

/// Node-by-term tables larger than this are evaluated on the fly.
const MAX_TABLE_ENTRIES: usize = 1 << 23;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormulaChoice {
    #[default]
    Auto,
    /// Integrates over `[t − 2π, t]`; bounded exponents when `Im c ≤ 0`.
    Backward,
    /// Integrates over `[t, t + 2π]`; bounded exponents when `Im c ≥ 0`.
    Forward,
    Divisor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaUsed {
    DivisorForm,
    Backward,
    Forward,
    GeneralWithFreeConstant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Starting number of Gauss–Legendre panels over one period.
    pub panels: usize,
    pub resonance_tol: f64,
    /// Accepted residual, relative to `max(1, sup|f|, sup|λcu|)`.
    pub residual_tol: f64,
    pub formula: FormulaChoice,
    /// Relative change between panel doublings that stops refinement.
    pub quad_tol: f64,
    pub max_panels: usize,
    pub min_grid: usize,
    pub max_grid: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            panels: 16,
            resonance_tol: 1e-10,
            residual_tol: 1e-8,
            formula: FormulaChoice::Auto,
            quad_tol: 1e-12,
            max_panels: 1 << 14,
            min_grid: 64,
            max_grid: 4096,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution {
    pub u: PeriodicFunction,
    /// `min_τ |τ + ωλ|` for the divisor form; `|1 − e^{∓2πiλc₀}|` for the
    /// integral formulas. Zero exactly when the mode is resonant.
    pub divisor_magnitude: f64,
    pub resonant: bool,
    pub formula_used: FormulaUsed,
    pub residual_sup: f64,
}

impl ModeSolution {
    /// `(t, Re u, Im u)` rows on an `n`-point grid.
    pub fn to_csv(&self, n: usize) -> String {
        let mut out = String::from("t,re_u,im_u\n");
        for (t, z) in grid_points(n).zip(self.u.samples(n)) {
            out.push_str(&format!("{t:.17e},{:.17e},{:.17e}\n", z.re, z.im));
        }
        out
    }

    pub fn diagnostics(&self, j: usize, lambda: f64) -> ModeDiagnostics {
        ModeDiagnostics {
            j,
            lambda,
            divisor_magnitude: self.divisor_magnitude,
            resonant: self.resonant,
            formula_used: self.formula_used,
            residual_sup: self.residual_sup,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeDiagnostics {
    pub j: usize,
    pub lambda: f64,
    pub divisor_magnitude: f64,
    pub resonant: bool,
    pub formula_used: FormulaUsed,
    pub residual_sup: f64,
}

/// Accurate `1 − e^z`, free of cancellation for small `|z|`.
pub fn stable_one_minus_exp(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    let s = (0.5 * y).sin();
    Complex64::new(
        -(x.exp_m1() * y.cos() - 2.0 * s * s),
        -x.exp() * y.sin(),
    )
}

/// A branch of `ln(1 − e^w)` that stays finite for large `Re w`.
fn ln_one_minus_exp(w: Complex64) -> Complex64 {
    if w.re <= 0.0 {
        stable_one_minus_exp(w).ln()
    } else {
        w + (-stable_one_minus_exp(-w)).ln()
    }
}

fn dist_to_integer(x: f64) -> f64 {
    (x - x.round()).abs()
}

fn is_resonant(z: Complex64, tol: f64) -> bool {
    z.im.abs() <= tol && dist_to_integer(z.re) <= tol
}

/// Indices `j` (1-based) with `λ_j c₀` within `tol` of an integer.
pub fn resonant_set(seq: &EigenvalueSequence, c0: Complex64, tol: f64) -> Vec<usize> {
    seq.values()
        .iter()
        .enumerate()
        .filter(|(_, l)| is_resonant(c0 * **l, tol))
        .map(|(i, _)| i + 1)
        .collect()
}

/// Divisor-form solution of `D_t u + ωλu = f`. Sampled data is read through
/// its interpolating trigonometric polynomial.
pub fn solve_constant_mode(lambda: f64, omega: Complex64, f: &PeriodicFunction) -> Result<ModeSolution> {
    solve_constant_mode_with(lambda, omega, f, &SolverConfig::default())
}

pub fn solve_constant_mode_with(
    lambda: f64,
    omega: Complex64,
    f: &PeriodicFunction,
    cfg: &SolverConfig,
) -> Result<ModeSolution> {
    let fp = f.to_trig();
    let z = omega * lambda;
    let resonant = is_resonant(z, cfg.resonance_tol);
    let tau0 = -(z.re.round() as i64);
    let mut divisor_magnitude = (Complex64::new(tau0 as f64, 0.0) + z).norm();
    let mut terms = Vec::new();
    for (tau, c) in fp.terms() {
        let d = Complex64::new(tau as f64, 0.0) + z;
        if resonant && tau == tau0 {
            return Err(Error::Resonance {
                mode: None,
                freq: tau,
                divisor: d.norm(),
            });
        }
        divisor_magnitude = divisor_magnitude.min(d.norm());
        terms.push((tau, c / d));
    }
    let u = TrigPoly::new(terms)?;
    let residual = u
        .derivative(1)
        .scale(Complex64::new(0.0, -1.0))
        .add(&u.scale(z))
        .add(&fp.scale(Complex64::new(-1.0, 0.0)));
    Ok(ModeSolution {
        u: PeriodicFunction::Trig(u),
        divisor_magnitude: if resonant { 0.0 } else { divisor_magnitude },
        resonant,
        formula_used: if resonant {
            FormulaUsed::GeneralWithFreeConstant
        } else {
            FormulaUsed::DivisorForm
        },
        residual_sup: residual.abs_sum(),
    })
}

/// Quadrature of one integral representation at arbitrary `t`.
struct PeriodIntegral {
    lambda: f64,
    c0: Complex64,
    /// `+1` integrates forward (`t + ζ`), `−1` backward (`t − ζ`).
    sigma: f64,
    ln_prefactor: Complex64,
    nodes: Vec<(f64, f64)>,
    q: Vec<(i64, Complex64)>,
    f: Vec<(i64, Complex64)>,
    q_table: Option<Vec<Complex64>>,
    f_table: Option<Vec<Complex64>>,
}

fn shift_table(nodes: &[(f64, f64)], terms: &[(i64, Complex64)], sigma: f64) -> Option<Vec<Complex64>> {
    if nodes.len() * terms.len() > MAX_TABLE_ENTRIES {
        return None;
    }
    let mut table = Vec::with_capacity(nodes.len() * terms.len());
    for (zeta, _) in nodes {
        for (k, _) in terms {
            table.push(Complex64::from_polar(1.0, sigma * *k as f64 * zeta));
        }
    }
    Some(table)
}

impl PeriodIntegral {
    fn new(
        lambda: f64,
        c0: Complex64,
        q: &TrigPoly,
        f: &TrigPoly,
        sigma: f64,
        panels: usize,
    ) -> Self {
        let w = Complex64::new(0.0, sigma * TWO_PI * lambda) * c0;
        let ln_prefactor = Complex64::new(0.0, -sigma).ln() - ln_one_minus_exp(w);
        let nodes = composite_nodes(0.0, TWO_PI, panels);
        let q: Vec<_> = q.terms().collect();
        let f: Vec<_> = f.terms().collect();
        let q_table = shift_table(&nodes, &q, sigma);
        let f_table = shift_table(&nodes, &f, sigma);
        Self {
            lambda,
            c0,
            sigma,
            ln_prefactor,
            nodes,
            q,
            f,
            q_table,
            f_table,
        }
    }

    fn shifted_sum(
        terms: &[(i64, Complex64)],
        phases: &[Complex64],
        table: Option<&[Complex64]>,
        m: usize,
        s: f64,
    ) -> Complex64 {
        match table {
            Some(tab) => {
                let row = &tab[m * terms.len()..(m + 1) * terms.len()];
                terms
                    .iter()
                    .zip(phases)
                    .zip(row)
                    .map(|(((_, c), p), r)| c * p * r)
                    .sum()
            }
            None => terms
                .iter()
                .map(|(k, c)| c * Complex64::from_polar(1.0, *k as f64 * s))
                .sum(),
        }
    }

    fn eval(&self, t: f64) -> Result<Complex64> {
        self.eval_conditioned(t).map(|(u, _)| u)
    }

    /// The value and its condition `Σ|terms| / |Σ terms|`: cancellation in
    /// the quadrature sum caps the attainable relative accuracy.
    fn eval_conditioned(&self, t: f64) -> Result<(Complex64, f64)> {
        let q_phase: Vec<Complex64> = self
            .q
            .iter()
            .map(|(k, _)| Complex64::from_polar(1.0, *k as f64 * t))
            .collect();
        let f_phase: Vec<Complex64> = self
            .f
            .iter()
            .map(|(k, _)| Complex64::from_polar(1.0, *k as f64 * t))
            .collect();
        let q_t: Complex64 = self.q.iter().zip(&q_phase).map(|((_, c), p)| c * p).sum();
        let il = Complex64::new(0.0, self.lambda);

        let mut terms = Vec::with_capacity(self.nodes.len());
        let mut max_re = f64::NEG_INFINITY;
        for (m, (zeta, weight)) in self.nodes.iter().enumerate() {
            let s = t + self.sigma * zeta;
            let fv = Self::shifted_sum(&self.f, &f_phase, self.f_table.as_deref(), m, s);
            if fv == Complex64::default() {
                continue;
            }
            let qv = Self::shifted_sum(&self.q, &q_phase, self.q_table.as_deref(), m, s);
            let e = il * (qv - q_t + self.c0 * (self.sigma * zeta));
            max_re = max_re.max(e.re);
            terms.push((e, fv * weight));
        }
        if terms.is_empty() {
            return Ok((Complex64::default(), 1.0));
        }
        let scale = Complex64::new(max_re, 0.0);
        let (sum, mass) = terms.iter().fold((Complex64::default(), 0.0), |(s, m), (e, v)| {
            let term = v * (e - scale).exp();
            (s + term, m + term.norm())
        });
        if sum == Complex64::default() {
            return Ok((Complex64::default(), 1.0));
        }
        let ln_u = sum.ln() + scale + self.ln_prefactor;
        if !ln_u.re.is_finite() || ln_u.re > MAX_EXPONENT {
            return Err(Error::Overflow { exponent: ln_u.re });
        }
        Ok((ln_u.exp(), mass / sum.norm()))
    }
}

const ROUNDING_FLOOR: f64 = 16.0 * f64::EPSILON;

fn relative_change(a: &[Complex64], b: &[Complex64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let size = b.iter().map(|y| y.norm()).fold(0.0, f64::max);
    if size == 0.0 {
        diff
    } else {
        diff / size
    }
}

/// Periodic solution of `D_t u + λc(t)u = f` through the integral formulas.
pub fn solve_variable_mode(
    lambda: f64,
    c: &PeriodicFunction,
    f: &PeriodicFunction,
    cfg: &SolverConfig,
) -> Result<ModeSolution> {
    let c_poly = c.to_trig();
    let c0 = c_poly.mean();
    if lambda == 0.0 {
        return solve_constant_mode_with(0.0, Complex64::default(), f, cfg);
    }
    let is_constant = c_poly.terms().all(|(k, _)| k == 0);
    if cfg.formula == FormulaChoice::Divisor {
        if !is_constant {
            return Err(Error::InvalidArgument(
                "the divisor form needs a constant coefficient".into(),
            ));
        }
        return solve_constant_mode_with(lambda, c0, f, cfg);
    }
    let z = c0 * lambda;
    if is_resonant(z, cfg.resonance_tol) {
        // constant coefficients admit compatible resonant data mode by mode
        if is_constant {
            return solve_constant_mode_with(lambda, c0, f, cfg);
        }
        let tau = -(z.re.round() as i64);
        return Err(Error::Resonance {
            mode: None,
            freq: tau,
            divisor: (Complex64::new(tau as f64, 0.0) + z).norm(),
        });
    }
    let (sigma, formula_used) = match cfg.formula {
        FormulaChoice::Backward => (-1.0, FormulaUsed::Backward),
        FormulaChoice::Forward => (1.0, FormulaUsed::Forward),
        _ if c0.im <= 0.0 => (-1.0, FormulaUsed::Backward),
        _ => (1.0, FormulaUsed::Forward),
    };
    let w = Complex64::new(0.0, sigma * TWO_PI) * z;
    let divisor_magnitude = ln_one_minus_exp(w).re.exp();

    // periodic part of the primitive of c
    let q = TrigPoly::new(
        c_poly
            .terms()
            .filter(|(k, _)| *k != 0)
            .map(|(k, v)| (k, v / Complex64::new(0.0, k as f64))),
    )?;
    let f_poly = f.to_trig();

    // Panels: resolve the oscillation λ|c| and the data bandwidth.
    let bandwidth = lambda * c.sup_norm() + f_poly.max_freq() as f64 + 1.0;
    let mut panels = cfg.panels.max((TWO_PI * bandwidth / 8.0).ceil() as usize).max(1);
    let probes = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0, 0.5];
    let eval_probes = |panels: usize| -> Result<(Vec<Complex64>, f64)> {
        let integral = PeriodIntegral::new(lambda, c0, &q, &f_poly, sigma, panels);
        let mut condition = 1.0f64;
        let values = probes
            .iter()
            .map(|t| {
                integral.eval_conditioned(*t).map(|(u, k)| {
                    condition = condition.max(k);
                    u
                })
            })
            .collect::<Result<_>>()?;
        Ok((values, condition))
    };
    let (mut prev, _) = eval_probes(panels)?;
    loop {
        let (next, condition) = eval_probes(2 * panels)?;
        let change = relative_change(&prev, &next);
        panels *= 2;
        // below the rounding floor of a cancelling sum no refinement helps
        let floor = ROUNDING_FLOOR * condition * (panels as f64).sqrt();
        if change <= cfg.quad_tol.max(floor) {
            break;
        }
        if panels >= cfg.max_panels {
            return Err(Error::NoConvergence { panels, change });
        }
        prev = next;
    }
    let integral = PeriodIntegral::new(lambda, c0, &q, &f_poly, sigma, panels);

    // Output grid: refine until the interpolant's spectral tail is negligible.
    let mut n = cfg
        .min_grid
        .max(4 * (f_poly.max_freq() as usize + c_poly.max_freq() as usize) + 8)
        .next_power_of_two();
    let mut samples: Vec<Complex64> = grid_points(n)
        .map(|t| integral.eval(t))
        .collect::<Result<_>>()?;
    let mut grid = GridFn::new(samples.clone(), DEFAULT_GRID_GAMMA_MAX)?;
    while grid.spectral_tail() > TAIL_TOL && 2 * n <= cfg.max_grid {
        let odd: Vec<Complex64> = (0..n)
            .map(|i| integral.eval(TWO_PI * (2 * i + 1) as f64 / (2 * n) as f64))
            .collect::<Result<_>>()?;
        samples = samples
            .iter()
            .zip(&odd)
            .flat_map(|(e, o)| [*e, *o])
            .collect();
        n *= 2;
        grid = GridFn::new(samples.clone(), DEFAULT_GRID_GAMMA_MAX)?;
    }

    let u = PeriodicFunction::Grid(grid);
    let (residual_sup, scale) = residual(&u, lambda, c, f, n)?;
    if residual_sup > cfg.residual_tol * scale {
        return Err(Error::VerificationFailed {
            check: "residual",
            mode: 0,
            quantity: format!("residual {residual_sup:e} exceeds {:e}", cfg.residual_tol * scale),
        });
    }
    Ok(ModeSolution {
        u,
        divisor_magnitude,
        resonant: false,
        formula_used,
        residual_sup,
    })
}

/// `sup_t |D_t u + λcu − f|` on an `n`-point grid, and the scale
/// `max(1, sup|f|, sup|λcu|)` it should be compared against.
pub fn residual(
    u: &PeriodicFunction,
    lambda: f64,
    c: &PeriodicFunction,
    f: &PeriodicFunction,
    n: usize,
) -> Result<(f64, f64)> {
    let du = u.derivative(1)?.samples(n);
    let us = u.samples(n);
    let cs = c.samples(n);
    let fs = f.samples(n);
    let mut res: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for i in 0..n {
        let lcu = cs[i] * us[i] * lambda;
        res = res.max((Complex64::new(0.0, -1.0) * du[i] + lcu - fs[i]).norm());
        scale = scale.max(fs[i].norm()).max(lcu.norm());
    }
    Ok((res, scale))
}

/// Per-mode solutions of a whole field together with their diagnostics.
#[derive(Debug, Clone)]
pub struct SolvedField {
    pub field: CoefficientField,
    pub diagnostics: Vec<ModeDiagnostics>,
}

/// Solves every stored mode (in parallel; results are ordered by `j`).
pub fn solve_field(
    operator: &OperatorSpec,
    data: &CoefficientField,
    cfg: &SolverConfig,
) -> Result<SolvedField> {
    let spectrum = data.spectrum();
    let results: Vec<(usize, Result<ModeSolution>)> = data
        .modes()
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let lambda = spectrum.values()[i];
            let solved = match operator.coefficient() {
                Coefficient::Constant(omega) => solve_constant_mode_with(lambda, *omega, f, cfg),
                Coefficient::Variable(c) => solve_variable_mode(lambda, c, f, cfg),
            };
            (i + 1, solved)
        })
        .collect();

    let mut modes = Vec::with_capacity(results.len());
    let mut diagnostics = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (j, r) in results {
        match r {
            Ok(sol) => {
                diagnostics.push(sol.diagnostics(j, spectrum.values()[j - 1]));
                modes.push(sol.u);
            }
            Err(e) => failures.push((j, with_mode(e, j).to_string())),
        }
    }
    if !failures.is_empty() {
        return Err(Error::ModeFailures { failures });
    }
    Ok(SolvedField {
        field: CoefficientField::new(modes, spectrum.clone())?,
        diagnostics,
    })
}

fn with_mode(e: Error, j: usize) -> Error {
    match e {
        Error::Resonance { freq, divisor, .. } => Error::Resonance {
            mode: Some(j),
            freq,
            divisor,
        },
        Error::VerificationFailed { check, quantity, .. } => Error::VerificationFailed {
            check,
            mode: j,
            quantity,
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus_fn::TrigPoly;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn trig(p: TrigPoly) -> PeriodicFunction {
        PeriodicFunction::Trig(p)
    }

    fn sup_diff(a: &PeriodicFunction, b: &PeriodicFunction) -> f64 {
        a.samples(256)
            .iter()
            .zip(b.samples(256))
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn resonant_set_examples() {
        let seq = EigenvalueSequence::identity(6);
        assert_eq!(resonant_set(&seq, c(0.5, 0.0), 0.0), vec![2, 4, 6]);
        assert!(resonant_set(&seq, c(0.0, 1.0), 1e-10).is_empty());
        let big = EigenvalueSequence::identity(10_000);
        assert!(resonant_set(&big, c(2f64.sqrt(), 0.0), 1e-12).is_empty());
    }

    #[test]
    fn constant_mode_examples() {
        // τ = −2 is a zero divisor, but f has no such component
        let s = solve_constant_mode(2.0, c(1.0, 0.0), &trig(TrigPoly::exp_i(1))).unwrap();
        assert_eq!(s.u, trig(TrigPoly::exp_i(1).scale(c(1.0 / 3.0, 0.0))));
        assert_eq!(s.formula_used, FormulaUsed::GeneralWithFreeConstant);
        assert!(s.resonant);

        let s = solve_constant_mode(2.0, c(0.25, 0.0), &trig(TrigPoly::exp_i(1))).unwrap();
        assert!((s.u.to_trig().coeff(1) - c(1.0 / 1.5, 0.0)).norm() < 1e-15);
        assert_eq!(s.formula_used, FormulaUsed::DivisorForm);
        assert!(!s.resonant && (s.divisor_magnitude - 0.5).abs() < 1e-15);

        let err = solve_constant_mode(1.0, c(1.0, 0.0), &trig(TrigPoly::exp_i(-1))).unwrap_err();
        assert!(matches!(err, Error::Resonance { freq: -1, .. }));

        let s = solve_constant_mode(3.0, c(0.0, 1.0), &PeriodicFunction::constant(c(1.0, 0.0))).unwrap();
        assert!((s.u.eval(0.7) - c(0.0, -1.0 / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn constant_mode_matches_integral_formula() {
        // i/(1 − e^{−2πiλω}) ∫₀^{2π} e^{−iλωζ} dζ for λ = 3, ω = i, f = 1
        let (l, w) = (3.0, c(0.0, 1.0));
        let pref = c(0.0, 1.0) / stable_one_minus_exp(c(0.0, -TWO_PI * l) * w);
        let (int, _) = crate::torus_fn::integrate(
            |z| (c(0.0, -l) * w * z).exp(),
            0.0,
            TWO_PI,
            1e-14,
            4,
        )
        .unwrap();
        assert!((pref * int - c(0.0, -1.0 / 3.0)).norm() < 1e-10);
    }

    #[test]
    fn compatible_resonance_gets_free_constant_zero() {
        let f = trig(TrigPoly::exp_i(2));
        let s = solve_constant_mode(1.0, c(1.0, 0.0), &f).unwrap();
        assert!(s.resonant);
        assert_eq!(s.divisor_magnitude, 0.0);
        assert_eq!(s.formula_used, FormulaUsed::GeneralWithFreeConstant);
        assert_eq!(s.u.to_trig().coeff(-1), c(0.0, 0.0));
        assert!(s.residual_sup < 1e-15);
    }

    #[test]
    fn variable_mode_reduces_to_constant() {
        let f = trig(TrigPoly::exp_i(1));
        let cfg = SolverConfig::default();
        let v = solve_variable_mode(2.0, &PeriodicFunction::constant(c(1.0, 0.0)), &f, &cfg).unwrap();
        let k = solve_constant_mode(2.0, c(1.0, 0.0), &f).unwrap();
        assert!(sup_diff(&v.u, &k.u) < 1e-10);

        let v = solve_variable_mode(
            1.0,
            &PeriodicFunction::constant(c(0.0, 2.0)),
            &PeriodicFunction::constant(c(1.0, 0.0)),
            &cfg,
        )
        .unwrap();
        assert_eq!(v.formula_used, FormulaUsed::Forward);
        assert!(sup_diff(&v.u, &PeriodicFunction::constant(c(0.0, -0.5))) < 1e-12);
    }

    #[test]
    fn two_formulas_agree_for_sign_changing_b() {
        let cfun = trig(TrigPoly::constant(c(0.3, 0.2)).add(&TrigPoly::sin(1).scale(c(0.0, 1.5))));
        let f = trig(TrigPoly::cos(2).add(&TrigPoly::exp_i(-1).scale(c(0.0, 0.5))));
        let s1 = SolverConfig { formula: FormulaChoice::Backward, ..Default::default() };
        let s2 = SolverConfig { formula: FormulaChoice::Forward, ..Default::default() };
        let a = solve_variable_mode(4.0, &cfun, &f, &s1).unwrap();
        let b = solve_variable_mode(4.0, &cfun, &f, &s2).unwrap();
        let size = a.u.sup_norm();
        assert!(sup_diff(&a.u, &b.u) / size < 1e-10);
    }

    #[test]
    fn variable_resonance_is_reported() {
        let cfun = trig(TrigPoly::constant(c(0.5, 0.0)).add(&TrigPoly::sin(1).scale(c(0.0, 1.0))));
        let err = solve_variable_mode(2.0, &cfun, &PeriodicFunction::constant(c(1.0, 0.0)), &SolverConfig::default());
        assert!(matches!(err, Err(Error::Resonance { .. })));
    }

    #[test]
    fn stable_one_minus_exp_examples() {
        assert_eq!(stable_one_minus_exp(c(0.0, 0.0)), c(0.0, 0.0));
        assert!((stable_one_minus_exp(c(0.0, PI)) - c(2.0, 0.0)).norm() < 1e-15);
        let z = c(0.0, 1e-12);
        let v = stable_one_minus_exp(z);
        // series: 1 − e^z = −z − z²/2 − …
        let series = -z - z * z * 0.5;
        assert!((v - series).norm() / series.norm() < 1e-14);
    }

    #[test]
    fn one_minus_exp_lower_bound_on_dense_grid() {
        let n = 600_001;
        let violations = (0..n)
            .map(|i| -3.0 + 6.0 * i as f64 / (n - 1) as f64)
            .filter(|b| stable_one_minus_exp(c(0.0, TWO_PI * b)).norm() < 4.0 * dist_to_integer(*b) * (1.0 - 1e-12))
            .count();
        assert_eq!(violations, 0);
    }

    #[test]
    fn integral_bound_for_negative_b() {
        // b = −(2 + sin t) ≤ −1 = −θ
        let theta = 1.0;
        let bp = TrigPoly::constant(c(-2.0, 0.0)).add(&TrigPoly::sin(1).scale(c(-1.0, 0.0)));
        let prim = PeriodicFunction::Trig(bp).primitive_from(0.0);
        for lambda in [1.0, 10.0, 100.0] {
            for t in [0.0, 1.0, 2.5, 4.0] {
                let (v, _) = crate::torus_fn::integrate(
                    |z| c((lambda * (prim.eval(t) - prim.eval(t - z)).re).exp(), 0.0),
                    0.0,
                    TWO_PI,
                    1e-12,
                    64,
                )
                .unwrap();
                assert!(v.re <= 1.0 / (lambda * theta));
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(12))]

            #[test]
            fn linearity_and_periodicity(
                lambda in 0.5f64..6.0,
                b in -1.5f64..1.5,
                alpha in -2.0f64..2.0,
                beta in -2.0f64..2.0,
            ) {
                let cfun = trig(TrigPoly::constant(c(0.4, 0.7)).add(&TrigPoly::cos(1).scale(c(0.0, b))));
                let f = trig(TrigPoly::exp_i(1));
                let g = trig(TrigPoly::cos(2));
                let cfg = SolverConfig::default();
                let combo = trig(f.to_trig().scale(c(alpha, 0.0)).add(&g.to_trig().scale(c(beta, 0.0))));
                let uf = solve_variable_mode(lambda, &cfun, &f, &cfg).unwrap();
                let ug = solve_variable_mode(lambda, &cfun, &g, &cfg).unwrap();
                let uc = solve_variable_mode(lambda, &cfun, &combo, &cfg).unwrap();
                let expect = |t: f64| uf.u.eval(t) * alpha + ug.u.eval(t) * beta;
                let scale = uf.u.sup_norm() + ug.u.sup_norm();
                for t in [0.0, 0.9, 2.2, 4.1] {
                    prop_assert!((uc.u.eval(t) - expect(t)).norm() <= 1e-9 * scale.max(1.0));
                }
                prop_assert!((uc.u.eval(0.0) - uc.u.eval(TWO_PI)).norm() <= 1e-9 * scale.max(1.0));
            }

            #[test]
            fn divisor_form_residual_vanishes(lambda in 0.1f64..50.0, wr in -2.0f64..2.0, wi in 0.1f64..2.0) {
                let f = trig(TrigPoly::new([(0, c(1.0, 0.0)), (3, c(0.5, -0.2)), (-5, c(0.0, 1.0))]).unwrap());
                let s = solve_constant_mode(lambda, c(wr, wi), &f).unwrap();
                prop_assert!(s.residual_sup < 1e-10);
            }
        }
    }
}
