//! Global-hypoellipticity verdicts for `D_t + ωP` and `D_t + c(t)P`, the sign
//! analysis of `b = Im c` behind them, and explicit witnesses of failure.
//!
//! A constant coefficient is decided by its imaginary part and, when that
//! vanishes, by the Diophantine behavior of its real part against the
//! spectrum. A variable coefficient is decided by whether `b` changes sign;
//! when it does, a solution with non-decaying modes and smooth right-hand side
//! is built from cutoffs around the maximum of the primitive of `b`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diophantine::{check_condition_a, Alpha, DiophantineReport, DEFAULT_EPSILONS};
use crate::error::{Error, Result};
use crate::mode_solver::{residual, solve_field, ModeDiagnostics, SolverConfig};
use crate::regularity::{
    condition_star_star, least_squares, synthesis_membership, CoefficientField, GevreyFit,
    RegularityConfig, SynthesisReport,
};
use crate::spectral_models::EigenvalueSequence;
use crate::torus_fn::{
    bump, grid_points, Bump, GridFn, PeriodicFunction, Primitive, DEFAULT_GRID_GAMMA_MAX, TWO_PI,
};

const MAX_EXPONENT: f64 = 700.0;

#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Constant(Complex64),
    Variable(PeriodicFunction),
}

/// The operator together with the modeled spectrum of `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    coefficient: Coefficient,
    spectrum: EigenvalueSequence,
    c0: Complex64,
}

impl OperatorSpec {
    pub fn constant(omega: Complex64, spectrum: EigenvalueSequence) -> Self {
        Self {
            coefficient: Coefficient::Constant(omega),
            spectrum,
            c0: omega,
        }
    }

    pub fn variable(c: PeriodicFunction, spectrum: EigenvalueSequence) -> Self {
        let c0 = c.mean();
        Self {
            coefficient: Coefficient::Variable(c),
            spectrum,
            c0,
        }
    }

    pub fn coefficient(&self) -> &Coefficient {
        &self.coefficient
    }

    pub fn spectrum(&self) -> &EigenvalueSequence {
        &self.spectrum
    }

    /// Mean `c₀ = a₀ + i b₀` of the coefficient.
    pub fn c0(&self) -> Complex64 {
        self.c0
    }

    /// The coefficient as a function of `t` (constant when `ω` is).
    pub fn coefficient_fn(&self) -> PeriodicFunction {
        match &self.coefficient {
            Coefficient::Constant(w) => PeriodicFunction::constant(*w),
            Coefficient::Variable(c) => c.clone(),
        }
    }

    /// A variable coefficient with no `t`-dependence, read as a constant.
    fn effective_constant(&self) -> Option<Complex64> {
        match &self.coefficient {
            Coefficient::Constant(w) => Some(*w),
            Coefficient::Variable(c) => {
                let p = c.to_trig();
                let constant = p.terms().all(|(k, _)| k == 0);
                constant.then(|| p.mean())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignConfig {
    /// Grid size for the sign scan (also the witness grid).
    pub density: usize,
    /// Samples with `|b| ≤ zero_tol · sup|b|` count as zero.
    pub zero_tol: f64,
    /// Consecutive zero samples that make a zero interval.
    pub plateau_min: usize,
    /// Target for the margins `c*`, `c_*`.
    pub margin_floor: f64,
}

impl Default for SignConfig {
    fn default() -> Self {
        Self {
            density: 4096,
            zero_tol: 1e-12,
            plateau_min: 8,
            margin_floor: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignClass {
    PositiveOneSigned,
    NegativeOneSigned,
    ChangesSign,
    PlateauBetweenSignChange,
    IdenticallyZero,
}

/// Points `α < γ < t < δ < β`: the primitive anchored at `t` is `≤ 0` on
/// `[α, β]` and `≤ −margin` on `[α, γ] ∪ [δ, β]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub alpha: f64,
    pub gamma: f64,
    pub t: f64,
    pub delta: f64,
    pub beta: f64,
    pub margin: f64,
    pub below_floor: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignAnalysis {
    pub classification: SignClass,
    /// `−max b` when `b < 0` throughout.
    pub theta: Option<f64>,
    /// `−min b` when `b < 0` throughout.
    pub vartheta: Option<f64>,
    /// Maximizer of the primitive of `b`: `∫_{t*}^t b ≤ 0` around it.
    pub t_star: Option<f64>,
    /// Minimizer: `∫_{t_*}^t b ≥ 0` around it.
    pub t_lowstar: Option<f64>,
    pub upper: Option<Partition>,
    pub lower: Option<Partition>,
    pub c_star: Option<f64>,
    pub c_lowstar: Option<f64>,
    /// Maximal runs of zero samples, as `[start, end]`.
    pub zero_intervals: Vec<(f64, f64)>,
    /// Whether a zero interval sits away from every sign change.
    pub zero_interval_inside_sign: bool,
    pub note: Option<String>,
}

struct Scan {
    n: usize,
    /// Primitive `∫₀^{t_i} b` on the grid.
    prim: Vec<f64>,
    /// `2π b₀`, the drift of the primitive over one period.
    drift: f64,
    tol: f64,
}

impl Scan {
    fn at(&self, i: i64) -> f64 {
        let n = self.n as i64;
        let (q, r) = (i.div_euclid(n), i.rem_euclid(n));
        self.prim[r as usize] + q as f64 * self.drift
    }

    /// Steps left and right of `i` over which the primitive stays `≤` its
    /// value at `i` (at most one period each way).
    fn extents(&self, i: usize) -> (usize, usize) {
        let top = self.prim[i] + self.tol;
        let walk = |dir: i64| {
            (1..=self.n as i64)
                .find(|k| self.at(i as i64 + dir * k) > top)
                .map_or(self.n, |k| k as usize - 1)
        };
        (walk(-1), walk(1))
    }
}

fn step(n: usize) -> f64 {
    TWO_PI / n as f64
}

/// Sign classification of a real periodic `b` with the critical points and
/// partitions used by the witness construction.
pub fn analyze_sign(b: &PeriodicFunction, cfg: &SignConfig) -> Result<SignAnalysis> {
    let n = cfg.density;
    let samples = b.samples(n);
    let sup = samples.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if samples.iter().any(|z| z.im.abs() > 1e-12 * sup.max(1.0)) {
        return Err(Error::InvalidArgument("b must be real-valued".into()));
    }
    let mut out = SignAnalysis {
        classification: SignClass::IdenticallyZero,
        theta: None,
        vartheta: None,
        t_star: None,
        t_lowstar: None,
        upper: None,
        lower: None,
        c_star: None,
        c_lowstar: None,
        zero_intervals: Vec::new(),
        zero_interval_inside_sign: false,
        note: None,
    };
    if sup == 0.0 {
        return Ok(out);
    }
    let z = cfg.zero_tol * sup;
    let sign: Vec<i8> = samples
        .iter()
        .map(|v| if v.re > z { 1 } else if v.re < -z { -1 } else { 0 })
        .collect();
    let has_pos = sign.contains(&1);
    let has_neg = sign.contains(&-1);
    if !has_neg {
        out.classification = SignClass::PositiveOneSigned;
        return Ok(out);
    }
    if !has_pos {
        out.classification = SignClass::NegativeOneSigned;
        let max = samples.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max);
        let min = samples.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
        out.theta = Some(-max);
        out.vartheta = Some(-min);
        return Ok(out);
    }

    // zero runs, cyclically, with the signs on either side
    let start = sign.iter().position(|s| *s != 0).expect("b has a nonzero sample");
    let mut plateau_between = false;
    let mut i = 0;
    while i < n {
        let k = (start + i) % n;
        if sign[k] != 0 {
            i += 1;
            continue;
        }
        let before = sign[(k + n - 1) % n];
        let mut len = 0;
        while sign[(k + len) % n] == 0 {
            len += 1;
        }
        let after = sign[(k + len) % n];
        if len >= cfg.plateau_min {
            let h = step(n);
            out.zero_intervals.push((k as f64 * h, (k + len - 1) as f64 * h));
            if before != after {
                plateau_between = true;
            } else {
                out.zero_interval_inside_sign = true;
            }
        }
        i += len;
    }
    out.classification = if plateau_between {
        SignClass::PlateauBetweenSignChange
    } else {
        SignClass::ChangesSign
    };

    let prim = b.re_part().primitive_from(0.0);
    let upper = critical_partition(&prim, n, 1.0, cfg);
    let lower = critical_partition(&prim, n, -1.0, cfg);
    let mut notes = Vec::new();
    match upper {
        Ok(p) => {
            out.t_star = Some(p.t);
            out.c_star = Some(p.margin);
            out.upper = Some(p);
        }
        Err(msg) => notes.push(format!("t*: {msg}")),
    }
    match lower {
        Ok(p) => {
            out.t_lowstar = Some(p.t);
            out.c_lowstar = Some(p.margin);
            out.lower = Some(p);
        }
        Err(msg) => notes.push(format!("t_*: {msg}")),
    }
    if !notes.is_empty() {
        out.note = Some(notes.join("; "));
    }
    Ok(out)
}

/// Finds the point of `sign · ∫b` with the widest window on which the
/// anchored primitive stays nonpositive, and a margin partition inside it.
fn critical_partition(
    prim: &Primitive,
    n: usize,
    sign: f64,
    cfg: &SignConfig,
) -> std::result::Result<Partition, String> {
    let h = step(n);
    let values: Vec<f64> = grid_points(n).map(|t| sign * prim.eval(t).re).collect();
    let amplitude = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let scan = Scan {
        n,
        drift: sign * prim.mean().re * TWO_PI,
        tol: 1e-12 * amplitude.max(1e-300),
        prim: values,
    };

    let mut best: Option<(usize, usize)> = None;
    for i in 0..n {
        let prev = scan.at(i as i64 - 1);
        let next = scan.at(i as i64 + 1);
        if scan.prim[i] + scan.tol < prev || scan.prim[i] + scan.tol < next {
            continue;
        }
        let (l, r) = scan.extents(i);
        let width = l.min(r);
        if best.map_or(true, |(_, w)| width > w) {
            best = Some((i, width));
        }
    }
    let (i, width) = best.ok_or("no local maximum of the primitive")?;
    if width < 4 {
        return Err("window around the maximum is below grid resolution".into());
    }
    let t = i as f64 * h;
    let half = (width as f64 * h).min(std::f64::consts::PI);
    let outer = 0.5 * half;

    let anchored = |s: f64| sign * (prim.eval(s).re - prim.eval(t).re);
    // validate the nonpositivity on [t − outer, t + outer]
    let fine = 4 * (outer / h).ceil() as usize + 1;
    let max_inside = (0..fine)
        .map(|k| anchored(t - outer + 2.0 * outer * k as f64 / (fine - 1) as f64))
        .fold(f64::NEG_INFINITY, f64::max);
    if max_inside > 1e-9 * amplitude.max(1.0) {
        return Err(format!("anchored primitive reaches {max_inside:e} > 0 inside the window"));
    }

    // widen the inner radius until the margin on the two side pieces clears the floor
    let margin_for = |inner: f64| {
        let pts = 256;
        let side = |from: f64, to: f64| {
            (0..=pts)
                .map(|k| anchored(from + (to - from) * k as f64 / pts as f64))
                .fold(f64::NEG_INFINITY, f64::max)
        };
        -side(t - outer, t - inner).max(side(t + inner, t + outer))
    };
    let mut chosen = (0.5 * outer, margin_for(0.5 * outer));
    let mut best_margin = chosen;
    if chosen.1 < cfg.margin_floor {
        for k in 1..=16 {
            let inner = 0.5 * outer + 0.45 * outer * k as f64 / 16.0;
            let m = margin_for(inner);
            if m > best_margin.1 {
                best_margin = (inner, m);
            }
            if m >= cfg.margin_floor {
                chosen = (inner, m);
                break;
            }
        }
        if chosen.1 < cfg.margin_floor {
            chosen = best_margin;
        }
    }
    if !(chosen.1 > 0.0) {
        return Err("no partition with a positive margin".into());
    }
    Ok(Partition {
        alpha: t - outer,
        gamma: t - chosen.0,
        t,
        delta: t + chosen.0,
        beta: t + outer,
        margin: chosen.1,
        below_floor: chosen.1 < cfg.margin_floor,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GhResult {
    #[serde(rename = "GH")]
    Gh,
    #[serde(rename = "NotGH")]
    NotGh,
    Indeterminate,
}

/// Which result the verdict rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    /// Constant `ω` with `Im ω ≠ 0`.
    NonzeroImaginaryPart,
    /// Constant real `ω` satisfying the Diophantine condition up to `J`.
    ConditionA,
    /// Constant real `ω` with a constructive failure of the condition.
    ConditionAFailed,
    /// `Im c` does not change sign and is not identically zero.
    OneSignedImaginaryPart,
    /// `Im c` changes sign.
    SignChange,
    /// `Im c` changes sign through an interval where it vanishes.
    SignChangeThroughPlateau,
    /// `Im c` changes sign but also vanishes on an interval elsewhere.
    SignChangeWithZeroInterval,
    /// `Im c ≡ 0` with non-constant `c`: not covered.
    ImaginaryPartZeroOpen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    None,
    Diophantine(Box<DiophantineReport>),
    Sign(Box<SignAnalysis>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub result: GhResult,
    pub theorem: Reason,
    /// True when the verdict rests on a finite truncation.
    pub evidential: bool,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiophantineParams {
    /// Exact value of `Re ω` to scan with; defaults to the double.
    pub alpha: Option<Alpha>,
    pub j_max: Option<usize>,
    pub epsilons: Vec<f64>,
    pub sign: SignConfig,
}

impl Default for DiophantineParams {
    fn default() -> Self {
        Self {
            alpha: None,
            j_max: None,
            epsilons: DEFAULT_EPSILONS.to_vec(),
            sign: SignConfig::default(),
        }
    }
}

pub fn verdict(spec: &OperatorSpec, params: &DiophantineParams) -> Result<Verdict> {
    if let Some(omega) = spec.effective_constant() {
        if omega.im != 0.0 {
            return Ok(Verdict {
                result: GhResult::Gh,
                theorem: Reason::NonzeroImaginaryPart,
                evidential: false,
                certificate: Certificate::None,
            });
        }
        let alpha = params.alpha.clone().unwrap_or(Alpha::Float(omega.re));
        let j_max = params
            .j_max
            .unwrap_or(10_000)
            .min(spec.spectrum.len());
        let report = check_condition_a(&alpha, &spec.spectrum, j_max, &params.epsilons)?;
        let holds = report.verdict.holds();
        return Ok(Verdict {
            result: if holds { GhResult::Gh } else { GhResult::NotGh },
            theorem: if holds {
                Reason::ConditionA
            } else {
                Reason::ConditionAFailed
            },
            evidential: holds,
            certificate: Certificate::Diophantine(Box::new(report)),
        });
    }
    let Coefficient::Variable(c) = &spec.coefficient else {
        unreachable!("constant coefficients are handled above")
    };
    let analysis = analyze_sign(&c.im_part(), &params.sign)?;
    let (result, theorem) = match analysis.classification {
        SignClass::PositiveOneSigned | SignClass::NegativeOneSigned => {
            (GhResult::Gh, Reason::OneSignedImaginaryPart)
        }
        SignClass::ChangesSign if analysis.zero_interval_inside_sign => {
            (GhResult::Indeterminate, Reason::SignChangeWithZeroInterval)
        }
        SignClass::ChangesSign => (GhResult::NotGh, Reason::SignChange),
        SignClass::PlateauBetweenSignChange => (GhResult::NotGh, Reason::SignChangeThroughPlateau),
        SignClass::IdenticallyZero => (GhResult::Indeterminate, Reason::ImaginaryPartZeroOpen),
    };
    Ok(Verdict {
        result,
        theorem,
        evidential: false,
        certificate: Certificate::Sign(Box::new(analysis)),
    })
}

/// A solution with non-decaying modes and rapidly decaying right-hand side.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub u: CoefficientField,
    pub f: CoefficientField,
    pub t_star: f64,
    pub analysis: SignAnalysis,
    /// Cutoff `g*` (support `[α*, β*]`, plateau `[γ*, δ*]`).
    pub g: Bump,
    /// Cutoff `ψ*` equal to 1 on `[α*, β*]`.
    pub psi: Bump,
    pub grid: usize,
}

/// `u_j = g*·exp[λ_j ψ*(ℬ − i𝒜)]`, `f_j = −i g*′·exp[λ_j ψ*(ℬ − i𝒜)]` with
/// `ℬ, 𝒜` the primitives of `b, a` anchored at `t*`.
pub fn build_counterexample(spec: &OperatorSpec, len: usize, cfg: &SignConfig) -> Result<Counterexample> {
    let Coefficient::Variable(c) = &spec.coefficient else {
        return Err(Error::InvalidArgument("the witness needs a variable coefficient".into()));
    };
    let analysis = analyze_sign(&c.im_part(), cfg)?;
    if !matches!(
        analysis.classification,
        SignClass::ChangesSign | SignClass::PlateauBetweenSignChange
    ) {
        return Err(Error::InvalidArgument(format!(
            "the witness needs a sign-changing imaginary part, found {:?}",
            analysis.classification
        )));
    }
    let part = analysis.upper.ok_or_else(|| {
        Error::InvalidArgument(format!(
            "no admissible partition: {}",
            analysis.note.clone().unwrap_or_default()
        ))
    })?;
    if len > spec.spectrum.len() {
        return Err(Error::InvalidArgument(format!(
            "{len} modes exceed the {} stored eigenvalues",
            spec.spectrum.len()
        )));
    }
    let t_star = part.t;
    let g = bump((part.alpha, part.beta), (part.gamma, part.delta))?;
    let pad = (0.5 * (TWO_PI - (part.beta - part.alpha))).min(0.5) * 0.9;
    let psi = bump((part.alpha - pad, part.beta + pad), (part.alpha, part.beta))?;

    let a_prim = c.re_part().primitive_from(t_star);
    let b_prim = c.im_part().primitive_from(t_star);
    let n = cfg.density;
    let origin = psi.support.0;
    // per grid point: (g, g′, ψ(ℬ − i𝒜)) evaluated at the representative in the ψ-window
    let base: Vec<(f64, f64, Complex64)> = grid_points(n)
        .map(|t| {
            let s = origin + (t - origin).rem_euclid(TWO_PI);
            let (gv, dg) = g.value_and_derivative(s);
            let w = psi.value(s);
            let e = if w == 0.0 {
                Complex64::default()
            } else {
                Complex64::new(b_prim.eval(s).re, -a_prim.eval(s).re) * w
            };
            (gv, dg, e)
        })
        .collect();

    let lambdas = &spec.spectrum.values()[..len];
    let modes: Vec<(PeriodicFunction, PeriodicFunction)> = lambdas
        .par_iter()
        .map(|&l| -> Result<(PeriodicFunction, PeriodicFunction)> {
            let mut u = Vec::with_capacity(n);
            let mut f = Vec::with_capacity(n);
            for (gv, dg, e) in &base {
                let ex = e * l;
                if ex.re > MAX_EXPONENT {
                    return Err(Error::Overflow { exponent: ex.re });
                }
                let v = if *gv == 0.0 && *dg == 0.0 {
                    Complex64::default()
                } else {
                    ex.exp()
                };
                u.push(v * gv);
                f.push(v * Complex64::new(0.0, -dg));
            }
            Ok((
                PeriodicFunction::Grid(GridFn::new(u, DEFAULT_GRID_GAMMA_MAX)?),
                PeriodicFunction::Grid(GridFn::new(f, DEFAULT_GRID_GAMMA_MAX)?),
            ))
        })
        .collect::<Result<_>>()?;
    let (us, fs): (Vec<_>, Vec<_>) = modes.into_iter().unzip();
    Ok(Counterexample {
        u: CoefficientField::new(us, spec.spectrum.clone())?,
        f: CoefficientField::new(fs, spec.spectrum.clone())?,
        t_star,
        analysis,
        g,
        psi,
        grid: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WitnessCheckConfig {
    pub residual_tol: f64,
    pub modulus_tol: f64,
    pub regularity: RegularityConfig,
}

impl Default for WitnessCheckConfig {
    fn default() -> Self {
        Self {
            residual_tol: 1e-8,
            modulus_tol: 1e-8,
            // The data gains one Gevrey order over the cutoffs and its modes
            // carry `j^γ` factors; a wide radius absorbs them.
            regularity: RegularityConfig {
                gevrey_sigma: 3.0,
                gevrey_eta: 8.0,
                ..RegularityConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    /// `(j, sup_t |D_t u_j + λ_j c u_j − f_j|)`.
    pub residuals: Vec<(usize, f64)>,
    /// `(j, |u_j(t*)|)`.
    pub moduli: Vec<(usize, f64)>,
    pub u_membership: SynthesisReport,
    pub f_membership: SynthesisReport,
    /// `(j, sup_t |f_j|)`.
    pub f_sup: Vec<(usize, f64)>,
    /// Least-squares rate `r` in `sup|f_j| ≈ C e^{−r j}`.
    pub decay_rate: f64,
    /// Smallest `C` with `sup|f_j| ≤ C e^{−c* j}` over the stored modes.
    pub decay_constant: Option<f64>,
    pub c_star: Option<f64>,
    pub residual_ok: bool,
    pub modulus_ok: bool,
    pub f_member_ok: bool,
}

impl WitnessReport {
    pub fn all_pass(&self) -> bool {
        self.residual_ok && self.modulus_ok && self.f_member_ok
    }

    /// The first failing check as an error.
    pub fn into_result(self) -> Result<Self> {
        if !self.residual_ok {
            let (j, r) = self.worst_residual();
            return Err(Error::VerificationFailed {
                check: "residual",
                mode: j,
                quantity: format!("residual {r:e}"),
            });
        }
        if !self.modulus_ok {
            let (j, m) = self.worst_modulus();
            return Err(Error::VerificationFailed {
                check: "modulus",
                mode: j,
                quantity: format!("|u_j(t*)| = {m}"),
            });
        }
        if !self.f_member_ok {
            return Err(Error::VerificationFailed {
                check: "data-membership",
                mode: self.f_sup.len(),
                quantity: format!("{:?}", self.f_membership.verdict),
            });
        }
        Ok(self)
    }

    fn worst_residual(&self) -> (usize, f64) {
        self.residuals
            .iter()
            .copied()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((0, f64::NAN))
    }

    fn worst_modulus(&self) -> (usize, f64) {
        self.moduli
            .iter()
            .copied()
            .max_by(|a, b| (a.1 - 1.0).abs().total_cmp(&(b.1 - 1.0).abs()))
            .unwrap_or((0, f64::NAN))
    }
}

/// Checks a witness: (i) every mode equation holds, (ii) `|u_j(t*)| = 1` so
/// the solution does not decay (and its synthesis is rejected), (iii) the
/// right-hand side passes the synthesis test.
pub fn verify_counterexample(
    u: &CoefficientField,
    f: &CoefficientField,
    spec: &OperatorSpec,
    t_star: f64,
    cfg: &WitnessCheckConfig,
) -> Result<WitnessReport> {
    if u.len() != f.len() {
        return Err(Error::InvalidArgument("u and f have different lengths".into()));
    }
    let c = spec.coefficient_fn();
    let n = u
        .modes()
        .iter()
        .chain(f.modes())
        .filter_map(|m| m.grid_len())
        .max()
        .unwrap_or(1024);
    let per_mode: Vec<(f64, f64, f64)> = (0..u.len())
        .into_par_iter()
        .map(|i| -> Result<(f64, f64, f64)> {
            let lambda = spec.spectrum.values()[i];
            let (r, _) = residual(&u.modes()[i], lambda, &c, &f.modes()[i], n)?;
            Ok((r, u.modes()[i].eval(t_star).norm(), f.modes()[i].sup_norm_with(n)))
        })
        .collect::<Result<_>>()?;
    let residuals: Vec<(usize, f64)> = per_mode.iter().enumerate().map(|(i, p)| (i + 1, p.0)).collect();
    let moduli: Vec<(usize, f64)> = per_mode.iter().enumerate().map(|(i, p)| (i + 1, p.1)).collect();
    let f_sup: Vec<(usize, f64)> = per_mode.iter().enumerate().map(|(i, p)| (i + 1, p.2)).collect();

    let u_membership = synthesis_membership(u, &cfg.regularity)?;
    let f_membership = synthesis_membership(f, &cfg.regularity)?;

    let pts: Vec<(f64, f64)> = f_sup
        .iter()
        .filter(|(_, s)| *s > 0.0)
        .map(|(j, s)| (*j as f64, s.ln()))
        .collect();
    let decay_rate = if pts.len() >= 2 { -least_squares(&pts).1 } else { f64::INFINITY };
    let c_star = analyze_sign(&c.im_part(), &SignConfig::default())
        .ok()
        .and_then(|a| a.c_star);
    let decay_constant = c_star.map(|cs| {
        f_sup
            .iter()
            .map(|(j, s)| s * (cs * *j as f64).exp())
            .fold(0.0, f64::max)
    });

    Ok(WitnessReport {
        residual_ok: residuals.iter().all(|(_, r)| *r <= cfg.residual_tol),
        modulus_ok: moduli.iter().all(|(_, m)| (m - 1.0).abs() <= cfg.modulus_tol)
            && !u_membership.verdict.is_member(),
        f_member_ok: f_membership.verdict.is_member(),
        residuals,
        moduli,
        u_membership,
        f_membership,
        f_sup,
        decay_rate,
        decay_constant,
        c_star,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GhxConfig {
    pub solver: SolverConfig,
    pub regularity: RegularityConfig,
    pub m_max: u32,
    pub gamma_max: usize,
}

impl Default for GhxConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            regularity: RegularityConfig::default(),
            m_max: 6,
            gamma_max: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhxEntry {
    pub m: u32,
    pub data_passes: bool,
    pub solution_passes: bool,
    /// The solution also passes at `M + 1`: one order of decay gained.
    pub solution_passes_next: bool,
    pub fit: Option<GevreyFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhxReport {
    pub verdict: Verdict,
    pub data_membership: SynthesisReport,
    pub diagnostics: Vec<ModeDiagnostics>,
    pub per_m: Vec<GhxEntry>,
    /// Every `M ≤ m_max` passes for the solution.
    pub passes: bool,
}

/// Solves all modes for smooth data and classifies the solution field.
pub fn gh_experiment(
    spec: &OperatorSpec,
    data: &CoefficientField,
    params: &DiophantineParams,
    cfg: &GhxConfig,
) -> Result<GhxReport> {
    let verdict = verdict(spec, params)?;
    let data_membership = synthesis_membership(data, &cfg.regularity)?;
    let solved = solve_field(spec, data, &cfg.solver)?;
    let per_m = (0..=cfg.m_max)
        .map(|m| -> Result<GhxEntry> {
            let d = condition_star_star(data, m, cfg.gamma_max, &cfg.regularity)?;
            let s = condition_star_star(&solved.field, m, cfg.gamma_max, &cfg.regularity)?;
            let s1 = condition_star_star(&solved.field, m + 1, cfg.gamma_max, &cfg.regularity)?;
            Ok(GhxEntry {
                m,
                data_passes: d.passed,
                solution_passes: s.passed,
                solution_passes_next: s1.passed,
                fit: s.fit,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GhxReport {
        passes: per_m.iter().all(|e| e.solution_passes),
        verdict,
        data_membership,
        diagnostics: solved.diagnostics,
        per_m,
    })
}
