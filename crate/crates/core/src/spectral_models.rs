//! Synthetic eigenvalue sequences standing in for the spectrum of an elliptic
//! scattering operator.
//!
//! Eigenfunctions are never materialized: everything downstream only needs the
//! eigenvalues `λ_j` (indexed from `j = 1`), the kernel dimension, and a
//! polynomial growth certificate `K' j^ϱ' ≤ λ_j ≤ K j^ϱ`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack used when comparing eigenvalues against growth bounds, so
/// that a bound computed by the same expression as the eigenvalue passes.
const GROWTH_SLACK: f64 = 1e-12;

/// Lower-exponent deficit used by the `m = μ` certificate: `ϱ' = (1 − δ) ϱ`.
const LOG_BRANCH_DEFICIT: f64 = 0.1;

/// Weyl-law model of the spectrum: `λ_j ≈ scale · j^{min(m, μ)/d}` when
/// `m ≠ μ`, and `λ_j ≈ scale · (j / log j)^{m/d}` when `m = μ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylModel {
    pub m: f64,
    pub mu: f64,
    pub d: u32,
    pub scale: f64,
}

impl WeylModel {
    pub fn new(m: f64, mu: f64, d: u32, scale: f64) -> Result<Self> {
        let model = Self { m, mu, d, scale };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.m.is_finite()) {
            return Err(Error::InvalidModel(format!("m must be positive, got {}", self.m)));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidModel(format!("mu must be positive, got {}", self.mu)));
        }
        if self.d == 0 {
            return Err(Error::InvalidModel("dimension d must be at least 1".into()));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "scale must be positive, got {}",
                self.scale
            )));
        }
        Ok(())
    }

    /// Whether the model sits on the logarithmic (`m = μ`) branch.
    pub fn is_log_branch(&self) -> bool {
        self.m == self.mu
    }

    /// Exponent of `j` in the model: `min(m, μ)/d`, or `m/d` on the log branch.
    pub fn exponent(&self) -> f64 {
        self.m.min(self.mu) / f64::from(self.d)
    }

    /// Model value at index `j ≥ 1`. On the log branch `λ_1 = scale`.
    pub fn value(&self, j: usize) -> f64 {
        let p = self.exponent();
        let jf = j as f64;
        if self.is_log_branch() {
            if j <= 1 {
                self.scale
            } else {
                self.scale * (jf / jf.ln()).powf(p)
            }
        } else {
            self.scale * jf.powf(p)
        }
    }

    /// A growth certificate valid for every `j ≥ 1`, not just the stored range.
    ///
    /// On the log branch the upper constant is attained at `j = 2` and the lower
    /// one uses `min_x x^δ / ln x = eδ` (attained at `x = e^{1/δ}`).
    pub fn certificate(&self) -> GrowthCertificate {
        let p = self.exponent();
        if self.is_log_branch() {
            let delta = LOG_BRANCH_DEFICIT;
            GrowthCertificate {
                upper_const: self.scale * (1.0 / std::f64::consts::LN_2).powf(p),
                upper_exp: p,
                lower_const: self.scale * (std::f64::consts::E * delta).powf(p),
                lower_exp: (1.0 - delta) * p,
            }
        } else {
            GrowthCertificate {
                upper_const: self.scale,
                upper_exp: p,
                lower_const: self.scale,
                lower_exp: p,
            }
        }
    }
}

/// Polynomial sandwich `K' j^{ϱ'} ≤ λ_j ≤ K j^{ϱ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthCertificate {
    /// `K`
    pub upper_const: f64,
    /// `ϱ`
    pub upper_exp: f64,
    /// `K'`
    pub lower_const: f64,
    /// `ϱ'`
    pub lower_exp: f64,
}

impl GrowthCertificate {
    pub fn new(upper_const: f64, upper_exp: f64, lower_const: f64, lower_exp: f64) -> Result<Self> {
        let all_positive = [upper_const, upper_exp, lower_const, lower_exp]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite());
        if !all_positive {
            return Err(Error::InvalidSequence(
                "growth constants and exponents must be positive".into(),
            ));
        }
        Ok(Self {
            upper_const,
            upper_exp,
            lower_const,
            lower_exp,
        })
    }

    fn bounds(&self, j: usize) -> (f64, f64) {
        let jf = j as f64;
        (
            self.lower_const * jf.powf(self.lower_exp),
            self.upper_const * jf.powf(self.upper_exp),
        )
    }
}

/// Outcome of checking a growth sandwich over the stored range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub holds: bool,
    /// 1-based indices where either side of the sandwich fails.
    pub violations: Vec<usize>,
    pub checked_up_to: usize,
}

impl GrowthReport {
    pub fn first_violation(&self) -> Option<usize> {
        self.violations.first().copied()
    }
}

/// A finite truncation `λ_1, …, λ_J` of the modeled spectrum.
///
/// Every claim made downstream is "verified up to `J`".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSequence", into = "RawSequence")]
pub struct EigenvalueSequence {
    values: Vec<f64>,
    kernel_dim: usize,
    growth: Option<GrowthCertificate>,
}

#[derive(Serialize, Deserialize)]
struct RawSequence {
    values: Vec<f64>,
    #[serde(default)]
    kernel_dim: usize,
    #[serde(default)]
    growth: Option<GrowthCertificate>,
}

impl TryFrom<RawSequence> for EigenvalueSequence {
    type Error = Error;

    fn try_from(raw: RawSequence) -> Result<Self> {
        Self::new(raw.values, raw.kernel_dim, raw.growth)
    }
}

impl From<EigenvalueSequence> for RawSequence {
    fn from(seq: EigenvalueSequence) -> Self {
        Self {
            values: seq.values,
            kernel_dim: seq.kernel_dim,
            growth: seq.growth,
        }
    }
}

impl EigenvalueSequence {
    /// Validates a user-supplied sequence: finite, nondecreasing, positive past
    /// the kernel, and (if present) inside its growth certificate for every
    /// stored `j` past the kernel.
    pub fn new(
        values: Vec<f64>,
        kernel_dim: usize,
        growth: Option<GrowthCertificate>,
    ) -> Result<Self> {
        if let Some(j) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidSequence(format!(
                "lambda_{} = {} is not a finite nonnegative number",
                j + 1,
                values[j]
            )));
        }
        if let Some(j) = values.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::InvalidSequence(format!(
                "values must be nondecreasing: lambda_{} > lambda_{}",
                j + 1,
                j + 2
            )));
        }
        if let Some(j) = values
            .iter()
            .enumerate()
            .skip(kernel_dim)
            .find(|(_, v)| **v <= 0.0)
            .map(|(j, _)| j)
        {
            return Err(Error::InvalidSequence(format!(
                "lambda_{} must be positive outside the kernel",
                j + 1
            )));
        }
        let seq = Self {
            values,
            kernel_dim,
            growth,
        };
        if let Some(cert) = growth {
            let report = verify_growth(&seq, &cert);
            if let Some(j) = report.first_violation() {
                return Err(Error::InvalidSequence(format!(
                    "growth certificate violated at j = {j}"
                )));
            }
        }
        Ok(seq)
    }

    /// `λ_j = j` for `j = 1..=len`, with its exact certificate.
    pub fn identity(len: usize) -> Self {
        Self {
            values: (1..=len).map(|j| j as f64).collect(),
            kernel_dim: 0,
            growth: Some(GrowthCertificate {
                upper_const: 1.0,
                upper_exp: 1.0,
                lower_const: 1.0,
                lower_exp: 1.0,
            }),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel_dim
    }

    pub fn growth(&self) -> Option<&GrowthCertificate> {
        self.growth.as_ref()
    }

    /// `λ_j` for 1-based `j`.
    pub fn lambda(&self, j: usize) -> f64 {
        self.values[j - 1]
    }

    /// `λ̃_j`: 1 inside the kernel, `λ_j` outside.
    pub fn tilde_lambda(&self, j: usize) -> f64 {
        if j <= self.kernel_dim {
            1.0
        } else {
            self.values[j - 1]
        }
    }

    /// Keeps the first `len` entries.
    pub fn truncate(&self, len: usize) -> Self {
        let len = len.min(self.values.len());
        Self {
            values: self.values[..len].to_vec(),
            kernel_dim: self.kernel_dim.min(len),
            growth: self.growth,
        }
    }

    pub fn require_growth(&self, purpose: &'static str) -> Result<&GrowthCertificate> {
        self.growth.as_ref().ok_or(Error::MissingGrowth(purpose))
    }

    /// `j,lambda_j` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,lambda_j\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{},{}", i + 1, v);
        }
        out
    }
}

/// Samples the Weyl model for `j = 1..=len` and attaches its certificate.
///
/// On the log branch the head of the sequence is not monotone (`λ_2 > λ_3`);
/// the model values are kept as they are.
pub fn generate_weyl(model: &WeylModel, len: usize) -> Result<EigenvalueSequence> {
    model.validate()?;
    if len == 0 {
        return Err(Error::InvalidModel("truncation J must be positive".into()));
    }
    Ok(EigenvalueSequence {
        values: (1..=len).map(|j| model.value(j)).collect(),
        kernel_dim: 0,
        growth: Some(model.certificate()),
    })
}

/// Replaces the kernel entries by 1.
pub fn tilde(seq: &EigenvalueSequence) -> Result<EigenvalueSequence> {
    if seq.kernel_dim > seq.len() {
        return Err(Error::InconsistentKernel {
            kernel_dim: seq.kernel_dim,
            len: seq.len(),
        });
    }
    let mut values = seq.values.clone();
    values[..seq.kernel_dim].fill(1.0);
    Ok(EigenvalueSequence {
        values,
        kernel_dim: seq.kernel_dim,
        growth: seq.growth,
    })
}

/// `N(λ) = #{j : λ_j ≤ λ}` over the stored values.
pub fn counting_function(seq: &EigenvalueSequence, lambda: f64) -> usize {
    seq.values.iter().filter(|v| **v <= lambda).count()
}

/// Checks the sandwich for every stored `j` past the kernel (kernel entries
/// are zero and cannot satisfy a positive lower bound).
pub fn verify_growth(seq: &EigenvalueSequence, cert: &GrowthCertificate) -> GrowthReport {
    let violations: Vec<usize> = (seq.kernel_dim + 1..=seq.len())
        .filter(|&j| {
            let v = seq.lambda(j);
            let (lo, hi) = cert.bounds(j);
            lo > v * (1.0 + GROWTH_SLACK) || v > hi * (1.0 + GROWTH_SLACK)
        })
        .collect();
    GrowthReport {
        holds: violations.is_empty(),
        violations,
        checked_up_to: seq.len(),
    }
}
