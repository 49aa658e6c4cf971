//! Experiment configuration: a single JSON document, optionally patched by
//! `--set key=value` overrides before it is validated.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use ghlab::diophantine::{Alpha, DEFAULT_EPSILONS};
use ghlab::hypo_engine::{GhxConfig, OperatorSpec, SignConfig, WitnessCheckConfig};
use ghlab::mode_solver::SolverConfig;
use ghlab::regularity::RegularityConfig;
use ghlab::spectral_models::{generate_weyl, EigenvalueSequence, GrowthCertificate, WeylModel};
use ghlab::torus_fn::{bump, GridFn, PeriodicFunction, TrigPoly};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spectrum,
    Solve,
    Verdict,
    Diophantine,
    Classify,
    Counterexample,
    Ghx,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Spectrum => "spectrum",
            Self::Solve => "solve",
            Self::Verdict => "verdict",
            Self::Diophantine => "diophantine",
            Self::Classify => "classify",
            Self::Counterexample => "counterexample",
            Self::Ghx => "ghx",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    pub spectrum: SpectrumSpec,
    #[serde(default)]
    pub operator: Option<OperatorConfig>,
    #[serde(default)]
    pub data: Option<DataSpec>,
    pub truncation: Truncation,
    #[serde(default)]
    pub numeric: Numeric,
    #[serde(default)]
    pub diophantine: DiophantineSpec,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpectrumSpec {
    /// `λ_j = j`.
    Identity {
        #[serde(default)]
        len: Option<usize>,
    },
    Weyl {
        m: f64,
        mu: f64,
        d: u32,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default)]
        len: Option<usize>,
    },
    Values {
        values: Vec<f64>,
        #[serde(default)]
        kernel_dim: usize,
        #[serde(default)]
        growth: Option<GrowthCertificate>,
    },
}

fn one() -> f64 {
    1.0
}

/// A complex number written as `1.5` or `[1.5, -2]`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cx {
    Real(f64),
    Pair([f64; 2]),
}

impl From<Cx> for Complex64 {
    fn from(z: Cx) -> Self {
        match z {
            Cx::Real(x) => Complex64::new(x, 0.0),
            Cx::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

/// Function literals on the circle.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionLiteral {
    /// `Σ c_k e^{ikt}` as `[[k, c_k], ...]`.
    Trig(Vec<(i64, Cx)>),
    Const(Cx),
    /// Samples on the uniform grid `2πk/n`.
    Samples {
        values: Vec<Cx>,
        #[serde(default = "default_gamma_max")]
        gamma_max: usize,
    },
    Bump {
        support: (f64, f64),
        plateau: (f64, f64),
        #[serde(default = "default_bump_grid")]
        n: usize,
        #[serde(default = "unit")]
        scale: Cx,
    },
    /// `exp(p(t))` for a trigonometric polynomial `p`.
    ExpOfTrig {
        terms: Vec<(i64, Cx)>,
        #[serde(default = "default_bump_grid")]
        n: usize,
    },
}

fn default_gamma_max() -> usize {
    ghlab::torus_fn::DEFAULT_GRID_GAMMA_MAX
}

fn default_bump_grid() -> usize {
    1024
}

fn unit() -> Cx {
    Cx::Real(1.0)
}

/// Repeated frequencies add up.
pub fn trig_from_terms(terms: &[(i64, Cx)]) -> TrigPoly {
    terms
        .iter()
        .fold(TrigPoly::zero(), |p, (k, c)| p.add(&TrigPoly::exp_i(*k).scale((*c).into())))
}

impl FunctionLiteral {
    pub fn build(&self) -> ghlab::Result<PeriodicFunction> {
        Ok(match self {
            Self::Trig(terms) => PeriodicFunction::Trig(trig_from_terms(terms)),
            Self::Const(c) => PeriodicFunction::constant((*c).into()),
            Self::Samples { values, gamma_max } => PeriodicFunction::Grid(GridFn::new(
                values.iter().map(|z| Complex64::from(*z)).collect(),
                *gamma_max,
            )?),
            Self::Bump { support, plateau, n, scale } => {
                bump(*support, *plateau)?.sample(*n)?.scale((*scale).into())
            }
            Self::ExpOfTrig { terms, n } => PeriodicFunction::exp_of_trig(&trig_from_terms(terms), *n)?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OperatorConfig {
    Constant { omega: Cx },
    Variable { c: FunctionLiteral },
}

/// A named family `f_j` (or `u_j`) with its parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    pub generator: String,
    #[serde(default)]
    pub params: Map<String, Value>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    #[serde(rename = "J")]
    pub j: usize,
    #[serde(default = "default_m_max")]
    pub m_max: u32,
    #[serde(default = "default_gamma")]
    pub gamma_max: usize,
}

fn default_m_max() -> u32 {
    6
}

fn default_gamma() -> usize {
    8
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numeric {
    pub solver: SolverConfig,
    pub regularity: RegularityConfig,
    pub sign: SignConfig,
    pub witness: WitnessCheckConfig,
    /// Decimal digits for exact irrational frequencies.
    pub precision_digits: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiophantineSpec {
    /// `"sqrt2"`, `"sqrt:N"`, `"liouville:K"`, `"p/q"` or a decimal.
    pub alpha: Option<String>,
    pub epsilons: Vec<f64>,
    /// Indices `10^e` at which to report exact gaps.
    pub probe_log10: Vec<u64>,
}

impl Default for DiophantineSpec {
    fn default() -> Self {
        Self {
            alpha: None,
            epsilons: DEFAULT_EPSILONS.to_vec(),
            probe_log10: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub dir: String,
    pub csv: bool,
    /// Points per period in sampled CSV series.
    pub samples: usize,
    /// Modes written to sampled CSV series.
    pub csv_modes: usize,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            dir: "out".into(),
            csv: true,
            samples: 256,
            csv_modes: 8,
        }
    }
}

pub const DEFAULT_PRECISION: usize = 60;

/// Parsed configuration plus the canonical document it came from.
pub struct Loaded {
    pub config: ExperimentConfig,
    pub hash: String,
}

/// Applies `key.path=value` overrides; values parse as JSON, else as strings.
pub fn apply_overrides(doc: &mut Value, sets: &[String]) -> Result<(), CliError> {
    for set in sets {
        let (path, raw) = set
            .split_once('=')
            .ok_or_else(|| CliError::usage("", format!("override `{set}` is not key=value")))?;
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut node = &mut *doc;
        let keys: Vec<&str> = path.split('.').collect();
        for (i, key) in keys.iter().enumerate() {
            let pointer = format!("/{}", keys[..=i].join("/"));
            let last = i + 1 == keys.len();
            node = match node {
                Value::Object(map) => {
                    if last {
                        map.insert((*key).to_string(), value.clone());
                        break;
                    }
                    map.entry((*key).to_string()).or_insert_with(|| Value::Object(Map::new()))
                }
                Value::Array(items) => {
                    let idx: usize = key
                        .parse()
                        .map_err(|_| CliError::usage(&pointer, "array index expected".into()))?;
                    let len = items.len();
                    let slot = items
                        .get_mut(idx)
                        .ok_or_else(|| CliError::usage(&pointer, format!("index out of range (len {len})")))?;
                    if last {
                        *slot = value.clone();
                        break;
                    }
                    slot
                }
                _ => return Err(CliError::usage(&pointer, "cannot descend into a scalar".into())),
            };
        }
    }
    Ok(())
}

pub fn load(text: &str, sets: &[String], precision: Option<usize>) -> Result<Loaded, CliError> {
    let mut doc: Value =
        serde_json::from_str(text).map_err(|e| CliError::usage("", format!("config is not JSON: {e}")))?;
    apply_overrides(&mut doc, sets)?;
    if let Some(p) = precision {
        apply_overrides(&mut doc, &[format!("numeric.precision_digits={p}")])?;
    }
    let config: ExperimentConfig = serde_path_to_error::deserialize(&doc).map_err(|e| {
        let pointer = pointer_of(e.path());
        CliError::usage(&pointer, e.into_inner().to_string())
    })?;
    if config.truncation.j == 0 {
        return Err(CliError::usage("/truncation/J", "truncation must be positive".into()));
    }
    if config.truncation.gamma_max == 0 {
        return Err(CliError::usage("/truncation/gamma_max", "truncation must be positive".into()));
    }
    let canonical = serde_json::to_string(&doc).expect("a parsed document serializes");
    let hash = Sha256::digest(canonical.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();
    Ok(Loaded { config, hash })
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } | Segment::Enum { variant: key } => out.push_str(&format!("/{key}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    out
}

impl ExperimentConfig {
    pub fn precision(&self) -> usize {
        self.numeric.precision_digits.unwrap_or(DEFAULT_PRECISION)
    }

    pub fn spectrum(&self) -> Result<EigenvalueSequence, CliError> {
        let at = |e: ghlab::Error| CliError::engine_at("/spectrum", e);
        match &self.spectrum {
            SpectrumSpec::Identity { len } => Ok(EigenvalueSequence::identity(len.unwrap_or(self.truncation.j))),
            SpectrumSpec::Weyl { m, mu, d, scale, len } => {
                let model = WeylModel::new(*m, *mu, *d, *scale).map_err(at)?;
                generate_weyl(&model, len.unwrap_or(self.truncation.j)).map_err(at)
            }
            SpectrumSpec::Values { values, kernel_dim, growth } => {
                EigenvalueSequence::new(values.clone(), *kernel_dim, *growth).map_err(at)
            }
        }
    }

    pub fn operator(&self, spectrum: EigenvalueSequence) -> Result<OperatorSpec, CliError> {
        match self.operator.as_ref() {
            None => Err(CliError::usage("/operator", "this command needs an operator".into())),
            Some(OperatorConfig::Constant { omega }) => Ok(OperatorSpec::constant((*omega).into(), spectrum)),
            Some(OperatorConfig::Variable { c }) => Ok(OperatorSpec::variable(
                c.build().map_err(|e| CliError::engine_at("/operator/c", e))?,
                spectrum,
            )),
        }
    }

    /// The exact frequency to scan, when one is configured.
    pub fn alpha(&self) -> Result<Option<Alpha>, CliError> {
        self.diophantine
            .alpha
            .as_deref()
            .map(|s| parse_alpha(s, self.precision()))
            .transpose()
    }

    pub fn ghx(&self) -> GhxConfig {
        GhxConfig {
            solver: self.numeric.solver,
            regularity: self.numeric.regularity,
            m_max: self.truncation.m_max,
            gamma_max: self.truncation.gamma_max,
        }
    }
}

pub fn parse_alpha(text: &str, digits: usize) -> Result<Alpha, CliError> {
    let bad = |msg: String| CliError::usage("/diophantine/alpha", msg);
    let t = text.trim();
    if t == "sqrt2" {
        return Ok(Alpha::sqrt(2, digits));
    }
    if let Some(n) = t.strip_prefix("sqrt:") {
        let n: u64 = n.parse().map_err(|_| bad(format!("`{n}` is not a nonnegative integer")))?;
        return Ok(Alpha::sqrt(n, digits));
    }
    if let Some(k) = t.strip_prefix("liouville:") {
        let k: u32 = k.parse().map_err(|_| bad(format!("`{k}` is not a depth")))?;
        return Ok(Alpha::liouville(k));
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad(format!("`{p}` is not an integer")))?;
        let q: i64 = q.trim().parse().map_err(|_| bad(format!("`{q}` is not an integer")))?;
        return Alpha::ratio(p, q).map_err(|e| bad(e.to_string()));
    }
    Alpha::decimal(t).map_err(|e| bad(e.to_string()))
}
