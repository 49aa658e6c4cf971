//! Named families of mode coefficients `f_j(t)` for configs.

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{Map, Value};

use ghlab::regularity::CoefficientField;
use ghlab::spectral_models::EigenvalueSequence;
use ghlab::torus_fn::{PeriodicFunction, TrigPoly};

use crate::config::{Cx, DataSpec, FunctionLiteral};
use crate::CliError;

pub const GENERATORS: [&str; 6] = [
    "exp-decay",
    "power-decay",
    "resonant-exp-decay",
    "fixed",
    "zero",
    "exp-decay-shift",
];

/// `f_j = amp · e^{−rate·λ_j} · e^{ikt}` (`cos`/`sin` when `kind` says so).
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpDecay {
    #[serde(default = "one")]
    rate: f64,
    #[serde(default = "one_i")]
    k: i64,
    #[serde(default)]
    kind: Wave,
    #[serde(default = "unit")]
    amp: Cx,
}

/// `f_j = amp · j^{−power} · e^{ikt}`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PowerDecay {
    power: f64,
    #[serde(default)]
    k: i64,
    #[serde(default = "unit")]
    amp: Cx,
}

/// `f_j = e^{−rate·j} e^{iτ_j t}` with `τ_j` the integer nearest to
/// `−α λ_j`: the frequency whose divisor `τ + αλ_j` is smallest.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ResonantExpDecay {
    #[serde(default = "one")]
    rate: f64,
    alpha: f64,
}

/// The same function in every mode.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Fixed {
    f: FunctionLiteral,
}

/// `f_j = e^{−rate·j} e^{i·shift·j·t}`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpDecayShift {
    #[serde(default = "one")]
    rate: f64,
    #[serde(default = "one_i")]
    shift: i64,
}

#[derive(Deserialize, Default, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum Wave {
    #[default]
    Exp,
    Cos,
    Sin,
}

fn one() -> f64 {
    1.0
}

fn one_i() -> i64 {
    1
}

fn unit() -> Cx {
    Cx::Real(1.0)
}

fn params<T: DeserializeOwned>(map: &Map<String, Value>) -> Result<T, CliError> {
    serde_path_to_error::deserialize(Value::Object(map.clone())).map_err(|e| {
        let path = e.path().to_string();
        let pointer = if path == "." { "/data/params".to_string() } else { format!("/data/params/{path}") };
        CliError::usage(&pointer, e.into_inner().to_string())
    })
}

fn wave(kind: Wave, k: i64) -> TrigPoly {
    match kind {
        Wave::Exp => TrigPoly::exp_i(k),
        Wave::Cos => TrigPoly::cos(k),
        Wave::Sin => TrigPoly::sin(k),
    }
}

pub fn build(spec: &DataSpec, seq: &EigenvalueSequence, len: usize) -> Result<CoefficientField, CliError> {
    let engine = |e| CliError::engine_at("/data", e);
    let trig = |p: TrigPoly| PeriodicFunction::Trig(p);
    match spec.generator.as_str() {
        "exp-decay" => {
            let p: ExpDecay = params(&spec.params)?;
            let base = wave(p.kind, p.k).scale(p.amp.into());
            CoefficientField::from_fn(seq, len, |_, l| trig(base.scale(Complex64::new((-p.rate * l).exp(), 0.0))))
        }
        "power-decay" => {
            let p: PowerDecay = params(&spec.params)?;
            let base = TrigPoly::exp_i(p.k).scale(p.amp.into());
            CoefficientField::from_fn(seq, len, |j, _| {
                trig(base.scale(Complex64::new((j as f64).powf(-p.power), 0.0)))
            })
        }
        "resonant-exp-decay" => {
            let p: ResonantExpDecay = params(&spec.params)?;
            CoefficientField::from_fn(seq, len, |j, l| {
                let tau = -(p.alpha * l).round() as i64;
                trig(TrigPoly::exp_i(tau).scale(Complex64::new((-p.rate * j as f64).exp(), 0.0)))
            })
        }
        "fixed" => {
            let p: Fixed = params(&spec.params)?;
            let f = p.f.build().map_err(|e| CliError::engine_at("/data/params/f", e))?;
            CoefficientField::from_fn(seq, len, |_, _| f.clone())
        }
        "zero" => CoefficientField::from_fn(seq, len, |_, _| trig(TrigPoly::zero())),
        "exp-decay-shift" => {
            let p: ExpDecayShift = params(&spec.params)?;
            CoefficientField::from_fn(seq, len, |j, _| {
                trig(TrigPoly::exp_i(p.shift * j as i64).scale(Complex64::new((-p.rate * j as f64).exp(), 0.0)))
            })
        }
        other => {
            return Err(CliError::usage(
                "/data/generator",
                format!("unknown generator `{other}`; expected one of {}", GENERATORS.join(", ")),
            ))
        }
    }
    .map_err(engine)
}
