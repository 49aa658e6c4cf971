//! 2π-periodic complex functions on the circle.
//!
//! Two representations share one interface: an exact trigonometric polynomial
//! and a uniform sample grid read through its trigonometric interpolant.
//! Derivatives, means and primitives are exact on the former and spectrally
//! accurate on the latter; [`PeriodicFunction::is_exact`] tells callers which
//! tolerance to expect.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * PI;

/// Default number of points used for sup-norms. The grid maximum is a lower
/// bound on the true supremum.
pub const DEFAULT_SUP_DENSITY: usize = 4096;

/// Default highest derivative order available on sampled functions.
pub const DEFAULT_GRID_GAMMA_MAX: usize = 12;

/// Interpolation coefficients below this fraction of the largest one are
/// treated as round-off when differentiating sampled data.
pub const SPECTRAL_NOISE_FLOOR: f64 = 1e-14;

const GL_ORDER: usize = 16;

/// `ln γ!` through the log-gamma function.
pub fn ln_factorial(n: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// Trigonometric polynomial `Σ_τ ĉ_τ e^{iτt}` with distinct integer frequencies.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigPoly {
    terms: BTreeMap<i64, Complex64>,
}

impl TrigPoly {
    pub fn new(pairs: impl IntoIterator<Item = (i64, Complex64)>) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (freq, coeff) in pairs {
            if !(coeff.re.is_finite() && coeff.im.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "non-finite coefficient at frequency {freq}"
                )));
            }
            if terms.insert(freq, coeff).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "duplicate frequency {freq} in trigonometric polynomial"
                )));
            }
        }
        terms.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(Self { terms })
    }

    fn from_map(mut terms: BTreeMap<i64, Complex64>) -> Self {
        terms.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Self { terms }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_map(BTreeMap::from([(0, c)]))
    }

    /// `e^{i·freq·t}`
    pub fn exp_i(freq: i64) -> Self {
        Self::from_map(BTreeMap::from([(freq, Complex64::new(1.0, 0.0))]))
    }

    /// `cos(k t)`
    pub fn cos(k: i64) -> Self {
        if k == 0 {
            return Self::constant(Complex64::new(1.0, 0.0));
        }
        let half = Complex64::new(0.5, 0.0);
        Self::from_map(BTreeMap::from([(k, half), (-k, half)]))
    }

    /// `sin(k t)`
    pub fn sin(k: i64) -> Self {
        if k == 0 {
            return Self::zero();
        }
        Self::from_map(BTreeMap::from([
            (k, Complex64::new(0.0, -0.5)),
            (-k, Complex64::new(0.0, 0.5)),
        ]))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.terms.iter().map(|(k, c)| (*k, *c))
    }

    pub fn coeff(&self, freq: i64) -> Complex64 {
        self.terms.get(&freq).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest `|τ|` present (0 for the zero polynomial).
    pub fn max_freq(&self) -> u64 {
        self.terms.keys().map(|k| k.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(k, c)| c * Complex64::from_polar(1.0, *k as f64 * t))
            .sum()
    }

    pub fn derivative(&self, gamma: usize) -> Self {
        if gamma == 0 {
            return self.clone();
        }
        Self::from_map(
            self.terms
                .iter()
                .map(|(k, c)| (*k, c * Complex64::new(0.0, *k as f64).powu(gamma as u32)))
                .collect(),
        )
    }

    pub fn mean(&self) -> Complex64 {
        self.coeff(0)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_map(self.terms.iter().map(|(k, c)| (*k, c * s)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            *terms.entry(*k).or_default() += c;
        }
        Self::from_map(terms)
    }

    /// Real part as a trigonometric polynomial: `(ĉ_τ + conj ĉ_{−τ}) / 2`.
    pub fn re_part(&self) -> Self {
        self.hermitian_part(false)
    }

    /// Imaginary part: `(ĉ_τ − conj ĉ_{−τ}) / 2i`.
    pub fn im_part(&self) -> Self {
        self.hermitian_part(true)
    }

    fn hermitian_part(&self, imaginary: bool) -> Self {
        let freqs: std::collections::BTreeSet<i64> =
            self.terms.keys().flat_map(|k| [*k, -*k]).collect();
        Self::from_map(
            freqs
                .into_iter()
                .map(|k| {
                    let c = self.coeff(k);
                    let r = self.coeff(-k).conj();
                    let v = if imaginary {
                        (c - r) / Complex64::new(0.0, 2.0)
                    } else {
                        (c + r) * 0.5
                    };
                    (k, v)
                })
                .collect(),
        )
    }

    /// `Σ |ĉ_τ|`, an upper bound for the sup-norm.
    pub fn abs_sum(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// Samples on the uniform grid `t_i = 2π i / n`.
    pub fn samples(&self, n: usize) -> Vec<Complex64> {
        if (self.max_freq() as usize) * 2 < n {
            let mut buf = vec![Complex64::default(); n];
            for (k, c) in &self.terms {
                buf[k.rem_euclid(n as i64) as usize] += c;
            }
            FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
            buf
        } else {
            grid_points(n).map(|t| self.eval(t)).collect()
        }
    }

    /// Drops terms whose modulus is below `rel` times the largest one.
    pub fn compact(&self, rel: f64) -> Self {
        let max = self.terms.values().map(|c| c.norm()).fold(0.0, f64::max);
        Self::from_map(
            self.terms
                .iter()
                .filter(|(_, c)| c.norm() > rel * max)
                .map(|(k, c)| (*k, *c))
                .collect(),
        )
    }
}

/// Uniform sample grid over `[0, 2π)` read through its trigonometric
/// interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    samples: Vec<Complex64>,
    coeffs: Vec<Complex64>,
    gamma_max: usize,
}

impl GridFn {
    pub fn new(samples: Vec<Complex64>, gamma_max: usize) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("sample grid must be nonempty".into()));
        }
        if let Some(i) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite {
                what: "grid samples",
                at: TWO_PI * i as f64 / samples.len() as f64,
            });
        }
        let n = samples.len();
        let mut coeffs = samples.clone();
        FftPlanner::new().plan_fft_forward(n).process(&mut coeffs);
        let inv = 1.0 / n as f64;
        coeffs.iter_mut().for_each(|c| *c *= inv);
        Ok(Self {
            samples,
            coeffs,
            gamma_max,
        })
    }

    pub fn from_fn(n: usize, gamma_max: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(grid_points(n).map(f).collect(), gamma_max)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn gamma_max(&self) -> usize {
        self.gamma_max
    }

    /// Frequency carried by coefficient slot `k`; the Nyquist slot reports `n/2`.
    fn freq(&self, k: usize) -> i64 {
        let n = self.samples.len();
        if k <= n / 2 {
            k as i64
        } else {
            k as i64 - n as i64
        }
    }

    fn is_nyquist(&self, k: usize) -> bool {
        let n = self.samples.len();
        n % 2 == 0 && k == n / 2
    }

    /// The interpolant as a trigonometric polynomial; the Nyquist term is split
    /// evenly between `±n/2`.
    pub fn to_trig(&self) -> TrigPoly {
        let mut terms = BTreeMap::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            let f = self.freq(k);
            if self.is_nyquist(k) {
                *terms.entry(f).or_default() += c * 0.5;
                *terms.entry(-f).or_default() += c * 0.5;
            } else {
                *terms.entry(f).or_default() += c;
            }
        }
        TrigPoly::from_map(terms)
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let f = self.freq(k) as f64;
                if self.is_nyquist(k) {
                    c * (f * t).cos()
                } else {
                    c * Complex64::from_polar(1.0, f * t)
                }
            })
            .sum()
    }

    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn derivative(&self, gamma: usize) -> Result<Self> {
        if gamma > self.gamma_max {
            return Err(Error::UnsupportedOrder {
                requested: gamma,
                supported: self.gamma_max,
            });
        }
        if gamma == 0 {
            return Ok(self.clone());
        }
        let floor = SPECTRAL_NOISE_FLOOR * self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut coeffs: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if c.norm() <= floor || (self.is_nyquist(k) && gamma % 2 == 1) {
                    Complex64::default()
                } else {
                    c * Complex64::new(0.0, self.freq(k) as f64).powu(gamma as u32)
                }
            })
            .collect();
        let mut samples = coeffs.clone();
        FftPlanner::new()
            .plan_fft_inverse(samples.len())
            .process(&mut samples);
        // keep the truncated spectrum consistent with the new samples
        coeffs.shrink_to_fit();
        Ok(Self {
            samples,
            coeffs,
            gamma_max: self.gamma_max - gamma,
        })
    }

    /// Samples of the interpolant on an `n`-point grid.
    pub fn resample(&self, n: usize) -> Vec<Complex64> {
        if n == self.samples.len() {
            return self.samples.clone();
        }
        self.to_trig().samples(n)
    }

    /// Magnitude of the highest quarter of the spectrum relative to the whole.
    pub fn spectral_tail(&self) -> f64 {
        let n = self.samples.len();
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return 0.0;
        }
        let tail = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(k, _)| self.freq(*k).unsigned_abs() as usize >= n / 4)
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max);
        tail / max
    }
}

/// A 2π-periodic complex function in one of the two representations.
#[derive(Debug, Clone, PartialEq)]
pub enum PeriodicFunction {
    Trig(TrigPoly),
    Grid(GridFn),
}

impl From<TrigPoly> for PeriodicFunction {
    fn from(p: TrigPoly) -> Self {
        Self::Trig(p)
    }
}

impl From<GridFn> for PeriodicFunction {
    fn from(g: GridFn) -> Self {
        Self::Grid(g)
    }
}

impl PeriodicFunction {
    pub fn constant(c: Complex64) -> Self {
        Self::Trig(TrigPoly::constant(c))
    }

    /// Samples `exp(p(t))` on an `n`-point grid.
    pub fn exp_of_trig(p: &TrigPoly, n: usize) -> Result<Self> {
        Ok(Self::Grid(GridFn::new(
            p.samples(n).into_iter().map(|z| z.exp()).collect(),
            DEFAULT_GRID_GAMMA_MAX,
        )?))
    }

    /// True when derivatives, means and primitives are exact.
    pub fn is_exact(&self) -> bool {
        matches!(self, Self::Trig(_))
    }

    /// Highest supported derivative order (`None` means unlimited).
    pub fn derivative_order_supported(&self) -> Option<usize> {
        match self {
            Self::Trig(_) => None,
            Self::Grid(g) => Some(g.gamma_max),
        }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        match self {
            Self::Trig(p) => p.eval(t),
            Self::Grid(g) => g.eval(t),
        }
    }

    pub fn derivative(&self, gamma: usize) -> Result<Self> {
        match self {
            Self::Trig(p) => Ok(Self::Trig(p.derivative(gamma))),
            Self::Grid(g) => Ok(Self::Grid(g.derivative(gamma)?)),
        }
    }

    pub fn samples(&self, n: usize) -> Vec<Complex64> {
        match self {
            Self::Trig(p) => p.samples(n),
            Self::Grid(g) => g.resample(n),
        }
    }

    /// Native grid size of a sampled function.
    pub fn grid_len(&self) -> Option<usize> {
        match self {
            Self::Trig(_) => None,
            Self::Grid(g) => Some(g.len()),
        }
    }

    /// The interpolant (or the polynomial itself) as a trigonometric polynomial.
    pub fn to_trig(&self) -> TrigPoly {
        match self {
            Self::Trig(p) => p.clone(),
            Self::Grid(g) => g.to_trig(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm_with(DEFAULT_SUP_DENSITY)
    }

    /// Grid maximum over at least `density` points (and never coarser than the
    /// native grid of sampled data).
    pub fn sup_norm_with(&self, density: usize) -> f64 {
        let n = match self {
            Self::Trig(p) => density.max(4 * p.max_freq() as usize + 1),
            Self::Grid(g) => density.max(g.len()),
        };
        self.samples(n).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `(2π)^{-1} ∫ f`: the zero coefficient, exact for trigonometric
    /// polynomials and the trapezoidal rule for sampled data.
    pub fn mean(&self) -> Complex64 {
        match self {
            Self::Trig(p) => p.mean(),
            Self::Grid(g) => g.mean(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        match self {
            Self::Trig(p) => Self::Trig(p.scale(s)),
            Self::Grid(g) => Self::Grid(GridFn {
                samples: g.samples.iter().map(|z| z * s).collect(),
                coeffs: g.coeffs.iter().map(|z| z * s).collect(),
                gamma_max: g.gamma_max,
            }),
        }
    }

    pub fn re_part(&self) -> Self {
        match self {
            Self::Trig(p) => Self::Trig(p.re_part()),
            Self::Grid(g) => Self::Grid(
                GridFn::new(
                    g.samples.iter().map(|z| Complex64::new(z.re, 0.0)).collect(),
                    g.gamma_max,
                )
                .expect("finite samples stay finite"),
            ),
        }
    }

    pub fn im_part(&self) -> Self {
        match self {
            Self::Trig(p) => Self::Trig(p.im_part()),
            Self::Grid(g) => Self::Grid(
                GridFn::new(
                    g.samples.iter().map(|z| Complex64::new(z.im, 0.0)).collect(),
                    g.gamma_max,
                )
                .expect("finite samples stay finite"),
            ),
        }
    }

    /// `t ↦ ∫_η^t f(r) dr` on the real line. Not periodic when the mean is
    /// nonzero.
    pub fn primitive_from(&self, eta: f64) -> Primitive {
        Primitive::new(&self.to_trig(), eta)
    }

    /// Truncated Gevrey norm `sup_{γ ≤ Γ} η^{−γ} (γ!)^{−σ} sup_t |∂^γ f|`.
    pub fn gevrey_norm(&self, sigma: f64, eta: f64, gamma_max: usize) -> Result<GevreyNormEstimate> {
        gevrey_norm(self, sigma, eta, gamma_max)
    }
}

/// Grid abscissae `2π i / n`.
pub fn grid_points(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| TWO_PI * i as f64 / n as f64)
}

/// Exact antiderivative of a trigonometric polynomial, anchored at `η`.
#[derive(Debug, Clone, PartialEq)]
pub struct Primitive {
    periodic: TrigPoly,
    mean: Complex64,
    eta: f64,
    anchor: Complex64,
}

impl Primitive {
    pub fn new(f: &TrigPoly, eta: f64) -> Self {
        let periodic = TrigPoly::from_map(
            f.terms()
                .filter(|(k, _)| *k != 0)
                .map(|(k, c)| (k, c / Complex64::new(0.0, k as f64)))
                .collect(),
        );
        let anchor = periodic.eval(eta);
        Self {
            periodic,
            mean: f.mean(),
            eta,
            anchor,
        }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        if t == self.eta {
            return Complex64::default();
        }
        self.periodic.eval(t) - self.anchor + self.mean * (t - self.eta)
    }

    /// The periodic part `Q` with `Q' = f − mean`.
    pub fn periodic_part(&self) -> &TrigPoly {
        &self.periodic
    }

    pub fn mean(&self) -> Complex64 {
        self.mean
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevreyNormEstimate {
    pub sigma: f64,
    pub eta: f64,
    pub gamma_max: usize,
    pub value: f64,
    /// Natural log of `value`; stays finite when `value` would underflow.
    pub ln_value: f64,
    /// Order at which the supremum over `γ` is attained.
    pub argmax_gamma: usize,
}

pub fn gevrey_norm(
    f: &PeriodicFunction,
    sigma: f64,
    eta: f64,
    gamma_max: usize,
) -> Result<GevreyNormEstimate> {
    if !(sigma >= 1.0) {
        return Err(Error::InvalidArgument(format!("sigma must be >= 1, got {sigma}")));
    }
    if !(eta > 0.0) {
        return Err(Error::InvalidArgument(format!("eta must be positive, got {eta}")));
    }
    let mut best = (f64::NEG_INFINITY, 0usize);
    for gamma in 0..=gamma_max {
        let sup = f.derivative(gamma)?.sup_norm();
        let term = sup.ln() - gamma as f64 * eta.ln() - sigma * ln_factorial(gamma);
        if term > best.0 {
            best = (term, gamma);
        }
    }
    Ok(GevreyNormEstimate {
        sigma,
        eta,
        gamma_max,
        value: best.0.exp(),
        ln_value: best.0,
        argmax_gamma: best.1,
    })
}

fn gl_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        gauss_quad::GaussLegendre::new(GL_ORDER.try_into().expect("nonzero order"))
            .iter()
            .map(|(x, w)| (*x, *w))
            .collect()
    })
}

/// Nodes and weights of the composite 16-point Gauss–Legendre rule on
/// `[a, b]` with `panels` equal panels (order 32 per panel).
pub fn composite_nodes(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / panels as f64;
    let rule = gl_rule();
    let mut out = Vec::with_capacity(panels * rule.len());
    for p in 0..panels {
        let left = a + h * p as f64;
        for (x, w) in rule {
            out.push((left + 0.5 * h * (x + 1.0), 0.5 * h * w));
        }
    }
    out
}

/// Composite Gauss–Legendre approximation of `∫_a^b g`.
pub fn quadrature(g: impl Fn(f64) -> Complex64, a: f64, b: f64, panels: usize) -> Result<Complex64> {
    if panels == 0 {
        return Err(Error::InvalidArgument("quadrature needs at least one panel".into()));
    }
    let mut acc = Complex64::default();
    for (x, w) in composite_nodes(a, b, panels) {
        let v = g(x);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite {
                what: "quadrature integrand",
                at: x,
            });
        }
        acc += v * w;
    }
    Ok(acc)
}

/// Doubles the panel count from `start_panels` until the relative change drops
/// below `tol`. Returns the value and the panel count used.
pub fn integrate(
    g: impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    tol: f64,
    start_panels: usize,
) -> Result<(Complex64, usize)> {
    const MAX_PANELS: usize = 1 << 16;
    let mut panels = start_panels.max(1);
    let mut prev = quadrature(&g, a, b, panels)?;
    loop {
        let next_panels = panels * 2;
        let next = quadrature(&g, a, b, next_panels)?;
        let change = (next - prev).norm() / next.norm().max(f64::MIN_POSITIVE);
        if change < tol || (next - prev).norm() < f64::EPSILON * tol {
            return Ok((next, next_panels));
        }
        if next_panels >= MAX_PANELS {
            return Err(Error::NoConvergence {
                panels: next_panels,
                change,
            });
        }
        prev = next;
        panels = next_panels;
    }
}

/// Gevrey order of the `exp(−1/x)` transition used by [`Bump`]. Recorded, not
/// certified.
pub const BUMP_GEVREY_ORDER: f64 = 2.0;

/// Smooth periodic cutoff: 0 outside `[a, b]`, 1 on `[c, d]`, with
/// `exp(−1/x)`-type transitions. Arguments are reduced mod 2π into `[a, a+2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub support: (f64, f64),
    pub plateau: (f64, f64),
}

/// Builds the cutoff; the support may sit anywhere on the line as long as it
/// spans at most one period.
pub fn bump(support: (f64, f64), plateau: (f64, f64)) -> Result<Bump> {
    let (a, b) = support;
    let (c, d) = plateau;
    if !(a < c && c < d && d < b) {
        return Err(Error::InvalidSupport(format!(
            "need a < c < d < b, got support [{a}, {b}] and plateau [{c}, {d}]"
        )));
    }
    if b - a > TWO_PI {
        return Err(Error::InvalidSupport(format!(
            "support [{a}, {b}] is longer than one period"
        )));
    }
    Ok(Bump { support, plateau })
}

fn transition_kernel(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// `S(x) = h(x) / (h(x) + h(1 − x))`, `h(x) = e^{−1/x}`; returns `(S, S')`.
fn smooth_step(x: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0);
    }
    if x >= 1.0 {
        return (1.0, 0.0);
    }
    let h0 = transition_kernel(x);
    let h1 = transition_kernel(1.0 - x);
    let den = h0 + h1;
    let dh0 = if h0 > 0.0 { h0 / (x * x) } else { 0.0 };
    let dh1 = if h1 > 0.0 { h1 / ((1.0 - x) * (1.0 - x)) } else { 0.0 };
    (h0 / den, (dh0 * h1 + h0 * dh1) / (den * den))
}

impl Bump {
    fn reduce(&self, t: f64) -> f64 {
        let a = self.support.0;
        a + (t - a).rem_euclid(TWO_PI)
    }

    /// Returns `(value, derivative)` at `t`.
    pub fn value_and_derivative(&self, t: f64) -> (f64, f64) {
        let (a, b) = self.support;
        let (c, d) = self.plateau;
        let t = self.reduce(t);
        if t >= b {
            (0.0, 0.0)
        } else if t < c {
            let (s, ds) = smooth_step((t - a) / (c - a));
            (s, ds / (c - a))
        } else if t <= d {
            (1.0, 0.0)
        } else {
            let (s, ds) = smooth_step((b - t) / (b - d));
            (s, -ds / (b - d))
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.value_and_derivative(t).0
    }

    pub fn derivative_value(&self, t: f64) -> f64 {
        self.value_and_derivative(t).1
    }

    /// Samples the cutoff on an `n`-point grid.
    pub fn sample(&self, n: usize) -> Result<PeriodicFunction> {
        Ok(PeriodicFunction::Grid(GridFn::from_fn(
            n,
            DEFAULT_GRID_GAMMA_MAX,
            |t| Complex64::new(self.value(t), 0.0),
        )?))
    }
}

/// `ln max_{A ≥ 0} A^{τp} e^{−μ A^q}`, attained at `A = (τp/(μq))^{1/q}`.
pub fn ln_power_exp_max(tau: u32, p: f64, q: f64, mu: f64) -> f64 {
    if tau == 0 {
        return 0.0;
    }
    let r = f64::from(tau) * p / q;
    r * ((r / mu).ln() - 1.0)
}

/// `(max_A A^{τp} e^{−μA^q})^{1/τ} / (τ!)^{p/(qτ)}`; bounded in `τ`.
pub fn normalized_power_exp_max(tau: u32, p: f64, q: f64, mu: f64) -> f64 {
    assert!(tau > 0, "normalization needs tau >= 1");
    let t = f64::from(tau);
    (ln_power_exp_max(tau, p, q, mu) / t - (p / q) * ln_factorial(tau as usize) / t).exp()
}
