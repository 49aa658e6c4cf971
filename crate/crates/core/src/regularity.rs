//! Regularity of eigencoefficient fields through decay in `j`.
//!
//! A field `{u_j}` represents `Σ u_j(t) φ_j`; smoothness of the sum shows up
//! as joint bounds in `j` and in `t`-derivatives. The conditions quantify over
//! all `j`, so every verdict here is a truncation: constants are fitted on the
//! first half of the stored modes and the second half must stay within a
//! relative band of the fitted bound.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral_models::EigenvalueSequence;
use crate::torus_fn::{ln_factorial, PeriodicFunction};

/// Absolute slack in log space so that bounds computed from the same data
/// they were fitted on compare as satisfied.
const LOG_SLACK: f64 = 1e-12;

/// Truncated family `{u_j(t)}_{j ≤ J}` over a shared spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    modes: Vec<PeriodicFunction>,
    spectrum: EigenvalueSequence,
}

impl CoefficientField {
    pub fn new(modes: Vec<PeriodicFunction>, spectrum: EigenvalueSequence) -> Result<Self> {
        if modes.len() > spectrum.len() {
            return Err(Error::InvalidArgument(format!(
                "{} modes exceed the {} stored eigenvalues",
                modes.len(),
                spectrum.len()
            )));
        }
        Ok(Self { modes, spectrum })
    }

    /// Builds `u_j = gen(j, λ_j)` for `j = 1..=len`.
    pub fn from_fn(
        spectrum: &EigenvalueSequence,
        len: usize,
        gen: impl Fn(usize, f64) -> PeriodicFunction,
    ) -> Result<Self> {
        let modes = (1..=len.min(spectrum.len()))
            .map(|j| gen(j, spectrum.lambda(j)))
            .collect();
        Self::new(modes, spectrum.clone())
    }

    pub fn modes(&self) -> &[PeriodicFunction] {
        &self.modes
    }

    pub fn mode(&self, j: usize) -> &PeriodicFunction {
        &self.modes[j - 1]
    }

    pub fn spectrum(&self) -> &EigenvalueSequence {
        &self.spectrum
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Replaces mode `j` (1-based).
    pub fn with_mode(mut self, j: usize, u: PeriodicFunction) -> Self {
        self.modes[j - 1] = u;
        self
    }

    fn ln_tilde(&self, j: usize) -> f64 {
        self.spectrum.tilde_lambda(j).ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegularityConfig {
    /// Relative band the uncalibrated half may exceed the fitted bound by.
    pub band: f64,
    /// Minimum number of points for sup-norms in `t`.
    pub density: usize,
    pub gamma_max: usize,
    /// Gevrey parameters of the per-mode norm used by the membership tests.
    pub gevrey_sigma: f64,
    pub gevrey_eta: f64,
    pub m_prime_max: u32,
    /// Search range `|M| ≤ m_search_max` for distribution orders.
    pub m_search_max: i32,
}

impl Default for RegularityConfig {
    fn default() -> Self {
        Self {
            band: 0.1,
            density: 512,
            gamma_max: 8,
            gevrey_sigma: 1.0,
            gevrey_eta: 1.0,
            m_prime_max: 4,
            m_search_max: 64,
        }
    }
}

/// Number of leading modes used to calibrate constants.
pub fn calibration_len(len: usize) -> usize {
    len.div_ceil(2)
}

/// `(Σ_j |u_j|² λ̃_j^{2r})^{1/2}`.
pub fn sk_norm(u: &[Complex64], r: f64, seq: &EigenvalueSequence) -> Result<f64> {
    if u.len() > seq.len() {
        return Err(Error::InvalidArgument(format!(
            "{} coefficients exceed the {} stored eigenvalues",
            u.len(),
            seq.len()
        )));
    }
    let terms: Vec<f64> = u
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > 0.0)
        .map(|(i, z)| 2.0 * (z.norm().ln() + r * seq.tilde_lambda(i + 1).ln()))
        .collect();
    Ok((0.5 * log_sum_exp(&terms)).exp())
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Gevrey envelope `y_γ ≤ (γ+1) ln C + σ ln γ!` fitted to log-magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevreyFit {
    pub sigma: f64,
    pub ln_c: f64,
    /// RMS residual of the ratio regression (0 when fewer than two ratios).
    pub residual: f64,
}

impl GevreyFit {
    pub fn c(&self) -> f64 {
        self.ln_c.exp()
    }

    pub fn ln_bound(&self, gamma: usize) -> f64 {
        (gamma + 1) as f64 * self.ln_c + self.sigma * ln_factorial(gamma)
    }
}

/// Fits `σ` as the slope of `y_γ − y_{γ−1}` against `ln γ` (the growth rate
/// of successive ratios), clamped to `σ ≥ 1`, then takes the smallest `C`
/// making the envelope hold at every finite `y_γ`. Returns `None` when no
/// `y_γ` is finite.
pub fn fit_gevrey_envelope(y: &[f64]) -> Option<GevreyFit> {
    let pts: Vec<(f64, f64)> = (1..y.len())
        .filter(|g| y[*g].is_finite() && y[g - 1].is_finite())
        .map(|g| ((g as f64).ln(), y[g] - y[g - 1]))
        .collect();
    let (slope, residual) = if pts.len() >= 2 {
        let (a, b, r) = least_squares(&pts);
        let _ = a;
        (b, r)
    } else {
        (1.0, 0.0)
    };
    let sigma = slope.max(1.0);
    let ln_c = y
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .map(|(g, v)| (v - sigma * ln_factorial(g)) / (g + 1) as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    ln_c.is_finite().then_some(GevreyFit {
        sigma,
        ln_c,
        residual,
    })
}

/// Ordinary least squares `y ≈ a + b x`; returns `(a, b, rms residual)`.
pub fn least_squares(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - a - b * p.0).powi(2)).sum();
    (a, b, (rss / n).sqrt())
}

fn eval_density(field: &CoefficientField, cfg: &RegularityConfig) -> usize {
    field
        .modes
        .iter()
        .map(|u| match u {
            PeriodicFunction::Trig(p) => 4 * p.max_freq() as usize + 1,
            PeriodicFunction::Grid(g) => g.len(),
        })
        .fold(cfg.density, usize::max)
}

/// `ln sup_t |∂^γ u_j|` for every `j` (rows) and `γ ≤ gamma_max` (columns).
fn ln_sup_table(field: &CoefficientField, gamma_max: usize, density: usize) -> Result<Vec<Vec<f64>>> {
    field
        .modes
        .par_iter()
        .map(|u| {
            (0..=gamma_max)
                .map(|g| Ok(u.derivative(g)?.sup_norm_with(density).ln()))
                .collect::<Result<Vec<f64>>>()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarReport {
    pub m: u32,
    pub gamma_max: usize,
    pub passed: bool,
    pub fit: Option<GevreyFit>,
    /// `(γ, S_γ over the calibration half, S_γ over all modes)`.
    pub sums: Vec<(usize, f64, f64)>,
    /// First `γ` whose sum grew by more than the band when `J` doubled.
    pub divergent_at: Option<usize>,
    pub divergence_ratio: f64,
}

/// Joint condition: `S_γ = sup_t Σ_j λ̃_j^{2M} |∂^γ u_j(t)|²` must stabilize as
/// `J` doubles, and `S_γ ≤ C^{2(γ+1)} (γ!)^{2σ}` is fitted.
pub fn condition_star(
    field: &CoefficientField,
    m: u32,
    gamma_max: usize,
    cfg: &RegularityConfig,
) -> Result<StarReport> {
    let n = eval_density(field, cfg);
    let half = calibration_len(field.len());
    // ln |∂^γ u_j(t_i)|² + 2M ln λ̃_j, per γ, per j, per t
    let per_gamma: Vec<(f64, f64)> = (0..=gamma_max)
        .into_par_iter()
        .map(|g| -> Result<(f64, f64)> {
            let mut partial = vec![Vec::new(); n];
            let mut full = vec![Vec::new(); n];
            for (i, u) in field.modes.iter().enumerate() {
                let w = 2.0 * f64::from(m) * field.ln_tilde(i + 1);
                for (k, z) in u.derivative(g)?.samples(n).iter().enumerate() {
                    let v = z.norm();
                    if v > 0.0 {
                        let term = 2.0 * v.ln() + w;
                        if i < half {
                            partial[k].push(term);
                        }
                        full[k].push(term);
                    }
                }
            }
            let sup = |rows: &[Vec<f64>]| {
                rows.iter()
                    .map(|r| log_sum_exp(r))
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            Ok((sup(&partial), sup(&full)))
        })
        .collect::<Result<_>>()?;

    let mut divergent_at = None;
    let mut divergence_ratio: f64 = 1.0;
    for (g, (lp, lf)) in per_gamma.iter().enumerate() {
        let ratio = if lf == &f64::NEG_INFINITY {
            1.0
        } else {
            (lf - lp).exp()
        };
        if ratio > 1.0 + cfg.band && divergent_at.is_none() {
            divergent_at = Some(g);
            divergence_ratio = ratio;
        }
        if divergent_at.is_none() {
            divergence_ratio = divergence_ratio.max(ratio);
        }
    }
    let y: Vec<f64> = per_gamma.iter().map(|(_, lf)| 0.5 * lf).collect();
    let fit = fit_gevrey_envelope(&y).or(Some(GevreyFit {
        sigma: 1.0,
        ln_c: f64::NEG_INFINITY,
        residual: 0.0,
    }));
    Ok(StarReport {
        m,
        gamma_max,
        passed: divergent_at.is_none(),
        fit,
        sums: per_gamma
            .iter()
            .enumerate()
            .map(|(g, (lp, lf))| (g, lp.exp(), lf.exp()))
            .collect(),
        divergent_at,
        divergence_ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarStarReport {
    pub m: u32,
    pub gamma_max: usize,
    pub passed: bool,
    pub fit: Option<GevreyFit>,
    /// First `(j, γ)` exceeding the banded bound, scanning `j` then `γ`.
    pub failure: Option<(usize, usize)>,
    /// Worst ratio of observed value to fitted bound over the checked half.
    pub worst_ratio: f64,
}

/// Pointwise condition `sup_t |∂^γ u_j| ≤ C^{γ+1} (γ!)^σ λ̃_j^{−M}`.
pub fn condition_star_star(
    field: &CoefficientField,
    m: u32,
    gamma_max: usize,
    cfg: &RegularityConfig,
) -> Result<StarStarReport> {
    let table = ln_sup_table(field, gamma_max, eval_density(field, cfg))?;
    Ok(star_star_from_table(field, &table, m, gamma_max, cfg.band))
}

fn weighted(field: &CoefficientField, table: &[Vec<f64>], m: u32) -> Vec<Vec<f64>> {
    table
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let w = f64::from(m) * field.ln_tilde(i + 1);
            row.iter().map(|v| v + w).collect()
        })
        .collect()
}

fn star_star_from_table(
    field: &CoefficientField,
    table: &[Vec<f64>],
    m: u32,
    gamma_max: usize,
    band: f64,
) -> StarStarReport {
    let rows = weighted(field, table, m);
    let half = calibration_len(rows.len());
    let y: Vec<f64> = (0..=gamma_max)
        .map(|g| {
            rows[..half]
                .iter()
                .map(|r| r[g])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let Some(fit) = fit_gevrey_envelope(&y) else {
        // nothing nonzero in the calibration half: any nonzero later mode fails
        let failure = first_nonzero(&rows);
        return StarStarReport {
            m,
            gamma_max,
            passed: failure.is_none(),
            fit: None,
            failure,
            worst_ratio: if failure.is_some() { f64::INFINITY } else { 0.0 },
        };
    };
    let mut failure = None;
    let mut worst = f64::NEG_INFINITY;
    for (i, row) in rows.iter().enumerate() {
        for (g, v) in row.iter().enumerate() {
            let excess = v - fit.ln_bound(g);
            if i >= half {
                worst = worst.max(excess);
            }
            if excess > band.ln_1p() + LOG_SLACK && failure.is_none() {
                failure = Some((i + 1, g));
            }
        }
    }
    StarStarReport {
        m,
        gamma_max,
        passed: failure.is_none(),
        fit: Some(fit),
        failure,
        worst_ratio: worst.exp(),
    }
}

fn first_nonzero(rows: &[Vec<f64>]) -> Option<(usize, usize)> {
    rows.iter().enumerate().find_map(|(i, r)| {
        r.iter()
            .position(|v| v.is_finite())
            .map(|g| (i + 1, g))
    })
}

/// First `(j, γ)` violating `sup_t |∂^γ u_j| ≤ C^{γ+1} (γ!)^σ λ̃_j^{−M}` for
/// the given constants, with no band.
pub fn check_star_star(
    field: &CoefficientField,
    m: u32,
    gamma_max: usize,
    sigma: f64,
    c: f64,
    cfg: &RegularityConfig,
) -> Result<Option<(usize, usize)>> {
    let table = ln_sup_table(field, gamma_max, eval_density(field, cfg))?;
    let fit = GevreyFit {
        sigma,
        ln_c: c.ln(),
        residual: 0.0,
    };
    let rows = weighted(field, &table, m);
    Ok(rows.iter().enumerate().find_map(|(i, row)| {
        row.iter()
            .enumerate()
            .find(|(g, v)| **v > fit.ln_bound(*g) + LOG_SLACK)
            .map(|(g, _)| (i + 1, g))
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormReport {
    pub m: u32,
    pub sigma: f64,
    pub eta: f64,
    /// Constant fitted on the calibration half.
    pub constant: f64,
    /// `(j, ‖u_j‖, constant · λ̃_j^{−M}, within band)`.
    pub per_j: Vec<(usize, f64, f64, bool)>,
    pub holds: bool,
}

/// Gevrey norm of every mode against `B λ̃_j^{−M}` with `B` fitted.
pub fn seminorm_decay(
    field: &CoefficientField,
    sigma: f64,
    eta: f64,
    m: u32,
    cfg: &RegularityConfig,
) -> Result<SeminormReport> {
    let norms = mode_norms(field, sigma, eta, cfg.gamma_max)?;
    let ln_w: Vec<f64> = (1..=field.len())
        .map(|j| f64::from(m) * field.ln_tilde(j))
        .collect();
    let scaled: Vec<f64> = norms.iter().zip(&ln_w).map(|(n, w)| n.ln() + w).collect();
    let cal = calibrate(&scaled, cfg.band);
    let per_j = norms
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let bound = (cal.ln_b - ln_w[i]).exp();
            (i + 1, *n, bound, scaled[i] <= cal.ln_b + cfg.band.ln_1p() + LOG_SLACK)
        })
        .collect();
    Ok(SeminormReport {
        m,
        sigma,
        eta,
        constant: cal.ln_b.exp(),
        per_j,
        holds: cal.first_violation.is_none(),
    })
}

/// Truncated Gevrey norm of every mode (in parallel, ordered by `j`).
pub fn mode_norms(field: &CoefficientField, sigma: f64, eta: f64, gamma_max: usize) -> Result<Vec<f64>> {
    field
        .modes
        .par_iter()
        .map(|u| {
            let est = u.gevrey_norm(sigma, eta, gamma_max)?;
            Ok(if est.ln_value == f64::NEG_INFINITY { 0.0 } else { est.value })
        })
        .collect()
}

struct Calibration {
    ln_b: f64,
    first_violation: Option<usize>,
}

/// `ln B` = max over the calibration half; the rest must stay within the band.
fn calibrate(ln_values: &[f64], band: f64) -> Calibration {
    let half = calibration_len(ln_values.len());
    let ln_b = ln_values[..half]
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let first_violation = ln_values
        .iter()
        .position(|v| *v > ln_b + band.ln_1p() + LOG_SLACK)
        .map(|i| i + 1);
    Calibration {
        ln_b,
        first_violation,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum SynthesisVerdict {
    MemberUpTo {
        j: usize,
        m_prime_max: u32,
        gamma_max: usize,
        slope: Option<f64>,
    },
    Rejected {
        m_prime: u32,
        slope: f64,
    },
}

impl SynthesisVerdict {
    pub fn is_member(&self) -> bool {
        matches!(self, Self::MemberUpTo { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisReport {
    pub verdict: SynthesisVerdict,
    pub norms: Vec<f64>,
    /// `(M′, B_{M′} = max_j ‖u_j‖ j^{M′}, slope test passed)`.
    pub per_m_prime: Vec<(u32, f64, bool)>,
    /// Log-log slope over the calibration half and over the tail.
    pub head_slope: Option<f64>,
    pub tail_slope: Option<f64>,
}

/// Log-log slope of `‖u_j‖` against `j` over `j ∈ range`, ignoring zero norms.
fn loglog_slope(norms: &[f64], range: std::ops::Range<usize>) -> Option<f64> {
    let pts: Vec<(f64, f64)> = range
        .filter(|i| norms[*i] > 0.0)
        .map(|i| (((i + 1) as f64).ln(), norms[i].ln()))
        .collect();
    (pts.len() >= 2).then(|| least_squares(&pts).1)
}

/// Membership of `Σ u_j φ_j` in the smooth class: the per-mode Gevrey norms
/// must decay faster than `j^{−M′}` for `M′ ≤ m_prime_max`, judged by the
/// log-log slope over the tail `j > J/2` (each `M′` passes when the slope is
/// at most `−M′(1 − band)`).
pub fn synthesis_membership(field: &CoefficientField, cfg: &RegularityConfig) -> Result<SynthesisReport> {
    let norms = mode_norms(field, cfg.gevrey_sigma, cfg.gevrey_eta, cfg.gamma_max)?;
    Ok(synthesis_from_norms(norms, cfg))
}

pub fn synthesis_from_norms(norms: Vec<f64>, cfg: &RegularityConfig) -> SynthesisReport {
    let len = norms.len();
    let half = calibration_len(len);
    let head_slope = loglog_slope(&norms, 0..half);
    let tail_slope = loglog_slope(&norms, half..len);
    let per_m_prime: Vec<(u32, f64, bool)> = (1..=cfg.m_prime_max)
        .map(|mp| {
            let b = norms
                .iter()
                .enumerate()
                .map(|(i, n)| n * ((i + 1) as f64).powi(mp as i32))
                .fold(0.0, f64::max);
            let ok = tail_slope.map_or(true, |s| s <= -f64::from(mp) * (1.0 - cfg.band));
            (mp, b, ok)
        })
        .collect();
    let verdict = match per_m_prime.iter().find(|(_, _, ok)| !ok) {
        Some((mp, _, _)) => SynthesisVerdict::Rejected {
            m_prime: *mp,
            slope: tail_slope.unwrap_or(0.0),
        },
        None => SynthesisVerdict::MemberUpTo {
            j: len,
            m_prime_max: cfg.m_prime_max,
            gamma_max: cfg.gamma_max,
            slope: tail_slope,
        },
    };
    SynthesisReport {
        verdict,
        norms,
        per_m_prime,
        head_slope,
        tail_slope,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DistributionOrder {
    Bounded { m: i32, b: f64 },
    Unbounded,
}

/// Smallest integer `M` for which `norms_j / λ̃_j^M` stays bounded over the
/// stored range (calibrated on the first half), with `B` its supremum.
pub fn distribution_order_fit(
    norms: &[f64],
    seq: &EigenvalueSequence,
    cfg: &RegularityConfig,
) -> Result<DistributionOrder> {
    if norms.len() > seq.len() {
        return Err(Error::InvalidArgument(format!(
            "{} norms exceed the {} stored eigenvalues",
            norms.len(),
            seq.len()
        )));
    }
    if let Some(bad) = norms.iter().position(|n| !(*n >= 0.0)) {
        return Err(Error::InvalidArgument(format!("norm {} is negative or NaN", bad + 1)));
    }
    if norms.is_empty() || norms.iter().all(|n| *n == 0.0) {
        return Ok(DistributionOrder::Bounded {
            m: -cfg.m_search_max,
            b: 0.0,
        });
    }
    let ln_l: Vec<f64> = (1..=norms.len()).map(|j| seq.tilde_lambda(j).ln()).collect();
    for m in -cfg.m_search_max..=cfg.m_search_max {
        let scaled: Vec<f64> = norms
            .iter()
            .zip(&ln_l)
            .map(|(n, l)| n.ln() - f64::from(m) * l)
            .collect();
        if calibrate(&scaled, cfg.band).first_violation.is_none() {
            let b = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max).exp();
            return Ok(DistributionOrder::Bounded { m, b });
        }
    }
    Ok(DistributionOrder::Unbounded)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum RegularityVerdict {
    MemberUpTo { j: usize, m_max: u32, gamma_max: usize },
    RejectedAt { m: u32, j: usize, gamma: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    /// `(M, passed, σ_M, C_M)`.
    pub per_m: Vec<(u32, bool, f64, f64)>,
    pub max_verified_m: Option<u32>,
    pub verdict: RegularityVerdict,
}

/// Runs the pointwise condition for `M = 0..=m_max` and records the first
/// failing triple.
pub fn classify(
    field: &CoefficientField,
    m_max: u32,
    gamma_max: usize,
    cfg: &RegularityConfig,
) -> Result<RegularityReport> {
    let table = ln_sup_table(field, gamma_max, eval_density(field, cfg))?;
    let mut per_m = Vec::new();
    let mut max_verified_m = None;
    let mut rejected = None;
    for m in 0..=m_max {
        let r = star_star_from_table(field, &table, m, gamma_max, cfg.band);
        let (sigma, c) = r.fit.map_or((1.0, 0.0), |f| (f.sigma, f.c()));
        per_m.push((m, r.passed, sigma, c));
        match r.failure {
            None if rejected.is_none() => max_verified_m = Some(m),
            Some((j, g)) if rejected.is_none() => rejected = Some((m, j, g)),
            _ => {}
        }
    }
    let verdict = match rejected {
        Some((m, j, gamma)) => RegularityVerdict::RejectedAt { m, j, gamma },
        None => RegularityVerdict::MemberUpTo {
            j: field.len(),
            m_max,
            gamma_max,
        },
    };
    Ok(RegularityReport {
        per_m,
        max_verified_m,
        verdict,
    })
}

/// CSV rows `(j, sup-norm, fitted bound)` for plotting a decay curve.
pub fn decay_csv(field: &CoefficientField, report: &SeminormReport) -> String {
    let mut out = String::from("j,norm,bound\n");
    for (j, n, b, _) in &report.per_j {
        let _ = field;
        out.push_str(&format!("{j},{n:.17e},{b:.17e}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus_fn::TrigPoly;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn constants(len: usize, f: impl Fn(f64) -> f64) -> CoefficientField {
        CoefficientField::from_fn(&EigenvalueSequence::identity(len), len, |_, l| {
            PeriodicFunction::constant(c(f(l), 0.0))
        })
        .unwrap()
    }

    fn waves(len: usize) -> CoefficientField {
        CoefficientField::from_fn(&EigenvalueSequence::identity(len), len, |j, _| {
            PeriodicFunction::Trig(TrigPoly::exp_i(j as i64).scale(c((-(j as f64)).exp(), 0.0)))
        })
        .unwrap()
    }

    #[test]
    fn sk_norm_examples() {
        let seq = EigenvalueSequence::identity(3);
        assert_eq!(sk_norm(&[c(1.0, 0.0)], 2.5, &seq).unwrap(), 1.0);
        let u = [c(1.0, 0.0), c(0.5, 0.0), c(1.0 / 3.0, 0.0)];
        assert!((sk_norm(&u, 0.0, &seq).unwrap() - 7.0 / 6.0).abs() < 1e-15);

        let big = EigenvalueSequence::identity(10_000);
        let u: Vec<Complex64> = (1..=10_000).map(|j| c((j as f64).powi(-2), 0.0)).collect();
        let v = sk_norm(&u, 1.0, &big).unwrap();
        let limit = std::f64::consts::PI / 6f64.sqrt();
        // tail Σ_{j > J} j^{−2} ≈ 1/J
        assert!(v < limit && limit - v < 1e-4);
    }

    #[test]
    fn star_examples() {
        let cfg = RegularityConfig::default();
        let r = condition_star(&constants(40, |l| (-l).exp()), 2, 5, &cfg).unwrap();
        assert!(r.passed);
        assert!((r.fit.unwrap().sigma - 1.0).abs() < 1e-12);
        assert!(r.sums[1..].iter().all(|(_, a, b)| *a == 0.0 && *b == 0.0));

        let r = condition_star(&waves(40), 1, 8, &cfg).unwrap();
        assert!(r.passed);
        assert!((r.fit.unwrap().sigma - 1.0).abs() < 0.1);
        // S_γ = Σ j^{2+2γ} e^{−2j}, constant in t
        let exact: f64 = (1..=40).map(|j: i32| f64::from(j).powi(2 + 2 * 3) * (-2.0 * f64::from(j)).exp()).sum();
        assert!((r.sums[3].2 - exact).abs() / exact < 1e-12);

        let r = condition_star(&constants(40, |l| 1.0 / l), 2, 3, &cfg).unwrap();
        assert!(!r.passed);
        assert_eq!(r.divergent_at, Some(0));
        assert!(r.divergence_ratio > 5.0);
    }

    #[test]
    fn star_star_examples() {
        let cfg = RegularityConfig::default();
        let r = condition_star_star(&constants(30, |l| l.powi(-3)), 3, 4, &cfg).unwrap();
        assert!(r.passed);
        assert!(r.fit.unwrap().c() - 1.0 < 1e-12);

        let r = condition_star_star(&constants(30, |l| 1.0 / l), 2, 4, &cfg).unwrap();
        assert!(!r.passed);

        let sines = CoefficientField::from_fn(&EigenvalueSequence::identity(40), 40, |_, l| {
            PeriodicFunction::Trig(TrigPoly::sin(1).scale(c((-l).exp(), 0.0)))
        })
        .unwrap();
        for m in 0..=10u32 {
            let r = condition_star_star(&sines, m, 4, &cfg).unwrap();
            assert!(r.passed, "M = {m}");
            // at γ = 0 the constant is max_j j^M e^{−j}
            let brute = (1..=20)
                .map(|j: i32| f64::from(j).powi(m as i32) * (-f64::from(j)).exp())
                .fold(0.0, f64::max);
            assert!(r.fit.unwrap().c() >= brute * (1.0 - 1e-9));
        }
    }

    #[test]
    fn cubic_decay_first_failure() {
        let r = condition_star_star(&constants(50, |l| l.powi(-3)), 4, 4, &RegularityConfig::default())
            .unwrap();
        // calibrated C = 25 on j ≤ 25; j > 27.5 exceeds the 10% band
        assert_eq!(r.failure, Some((28, 0)));
    }

    #[test]
    fn seminorm_examples() {
        let cfg = RegularityConfig::default();
        assert!(seminorm_decay(&constants(30, |l| (-l).exp()), 1.0, 1.0, 4, &cfg).unwrap().holds);
        assert!(!seminorm_decay(&constants(30, |_| 1.0), 1.0, 1.0, 1, &cfg).unwrap().holds);
        let exact = seminorm_decay(&constants(30, |l| l.powi(-3)), 1.0, 1.0, 3, &cfg).unwrap();
        assert!(exact.holds);
        assert!((exact.constant - 1.0).abs() < 1e-12);
    }

    #[test]
    fn synthesis_examples() {
        let cfg = RegularityConfig::default();
        assert!(synthesis_membership(&constants(40, |l| (-l).exp()), &cfg).unwrap().verdict.is_member());
        let r = synthesis_membership(&constants(40, |l| l.powi(-3)), &cfg).unwrap();
        match r.verdict {
            SynthesisVerdict::Rejected { m_prime, slope } => {
                assert_eq!(m_prime, 4);
                assert!((slope + 3.0).abs() < 1e-9);
            }
            v => panic!("{v:?}"),
        }
        assert!(synthesis_membership(&constants(40, |_| 0.0), &cfg).unwrap().verdict.is_member());
    }

    #[test]
    fn distribution_order_examples() {
        let cfg = RegularityConfig::default();
        let seq = EigenvalueSequence::identity(40);
        let sq: Vec<f64> = (1..=40).map(|j| (j * j) as f64).collect();
        assert_eq!(
            distribution_order_fit(&sq, &seq, &cfg).unwrap(),
            DistributionOrder::Bounded { m: 2, b: 1.0 }
        );
        assert_eq!(
            distribution_order_fit(&[1.0; 40], &seq, &cfg).unwrap(),
            DistributionOrder::Bounded { m: 0, b: 1.0 }
        );
        let p: Vec<f64> = (1..=40).map(|j| (j as f64).powf(2.5)).collect();
        match distribution_order_fit(&p, &seq, &cfg).unwrap() {
            DistributionOrder::Bounded { m, b } => {
                assert_eq!(m, 3);
                assert!((b - 1.0).abs() < 1e-12);
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn classify_records_first_failure() {
        let rep = classify(&constants(50, |l| l.powi(-3)), 6, 3, &RegularityConfig::default()).unwrap();
        assert_eq!(rep.max_verified_m, Some(3));
        assert_eq!(rep.verdict, RegularityVerdict::RejectedAt { m: 4, j: 28, gamma: 0 });
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn field_strategy() -> impl Strategy<Value = CoefficientField> {
            field_with_rates(0.3..2.0)
        }

        fn field_with_rates(rates: std::ops::Range<f64>) -> impl Strategy<Value = CoefficientField> {
            (rates, 1usize..4).prop_map(|(rate, freq)| {
                CoefficientField::from_fn(&EigenvalueSequence::identity(24), 24, |j, l| {
                    PeriodicFunction::Trig(
                        TrigPoly::exp_i((freq * j % 7) as i64).scale(c((-rate * l).exp(), 0.0)),
                    )
                })
                .unwrap()
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn star_star_monotone_in_constants(field in field_strategy(), m in 0u32..5, ds in 0.0f64..2.0, dc in 0.0f64..3.0) {
                let cfg = RegularityConfig::default();
                let r = condition_star_star(&field, m, 4, &cfg).unwrap();
                let fit = r.fit.unwrap();
                // the fitted constants bound every mode once the band is absorbed into C
                let c0 = fit.c() * (1.0 + cfg.band);
                if r.passed {
                    prop_assert_eq!(check_star_star(&field, m, 4, fit.sigma, c0, &cfg).unwrap(), None);
                    prop_assert_eq!(check_star_star(&field, m, 4, fit.sigma + ds, c0 + dc, &cfg).unwrap(), None);
                }
            }

            #[test]
            fn sk_norm_monotone_in_r(vals in prop::collection::vec(0.0f64..3.0, 1..30), r in -2.0f64..2.0, dr in 0.0f64..2.0) {
                let seq = EigenvalueSequence::identity(vals.len());
                let u: Vec<Complex64> = vals.iter().map(|v| c(*v, 0.0)).collect();
                prop_assert!(sk_norm(&u, r, &seq).unwrap() <= sk_norm(&u, r + dr, &seq).unwrap() * (1.0 + 1e-12));
            }

            #[test]
            fn star_monotone_in_m(field in field_strategy(), m in 1u32..5) {
                let cfg = RegularityConfig::default();
                if condition_star(&field, m, 3, &cfg).unwrap().passed {
                    for lower in 0..m {
                        prop_assert!(condition_star(&field, lower, 3, &cfg).unwrap().passed);
                    }
                }
            }

            #[test]
            // Slower decay leaves the partial sums of (*) unconverged at 24 modes.
            fn star_star_with_excess_implies_star(field in field_with_rates(0.7..2.0), m in 0u32..4) {
                let cfg = RegularityConfig::default();
                if condition_star_star(&field, m + 2, 3, &cfg).unwrap().passed {
                    prop_assert!(condition_star(&field, m, 3, &cfg).unwrap().passed);
                }
            }

            #[test]
            fn distribution_order_shifts(vals in prop::collection::vec(0.01f64..100.0, 4..40), k in -5i32..6) {
                let cfg = RegularityConfig::default();
                let seq = EigenvalueSequence::identity(vals.len());
                let shifted: Vec<f64> = vals.iter().enumerate().map(|(i, v)| v * ((i + 1) as f64).powi(k)).collect();
                let a = distribution_order_fit(&vals, &seq, &cfg).unwrap();
                let b = distribution_order_fit(&shifted, &seq, &cfg).unwrap();
                match (a, b) {
                    (DistributionOrder::Bounded { m: ma, .. }, DistributionOrder::Bounded { m: mb, .. }) => prop_assert_eq!(mb, ma + k),
                    _ => prop_assert!(false, "{:?} {:?}", a, b),
                }
            }
        }
    }
}
