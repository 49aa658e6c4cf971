//! One function per command: each returns the JSON result and CSV series.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use ghlab::diophantine::{check_condition_a, construct_liouville, probe_gaps, Alpha, DiophantineReport};
use ghlab::hypo_engine::{
    build_counterexample, gh_experiment, verdict, verify_counterexample, Certificate, DiophantineParams,
};
use ghlab::mode_solver::{solve_field, ModeDiagnostics};
use ghlab::regularity::{
    classify, condition_star, distribution_order_fit, mode_norms, synthesis_membership, CoefficientField,
};
use ghlab::spectral_models::{counting_function, verify_growth, EigenvalueSequence};
use ghlab::torus_fn::grid_points;

use crate::config::{Command, ExperimentConfig};
use crate::{generators, CliError};

/// Result of a command: the JSON payload, CSV artifacts, and whether the
/// run's own checks passed.
pub struct Outcome {
    pub result: Value,
    pub csv: Vec<(String, String)>,
    pub verified: bool,
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn engine(e: ghlab::Error) -> CliError {
    CliError::Engine(e)
}

pub fn run(cmd: Command, cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let seq = cfg.spectrum()?;
    let j = cfg.truncation.j;
    if j > seq.len() {
        return Err(CliError::usage(
            "/truncation/J",
            format!("J = {j} exceeds the {} stored eigenvalues", seq.len()),
        ));
    }
    match cmd {
        Command::Spectrum => spectrum(cfg, &seq),
        Command::Solve => solve(cfg, seq),
        Command::Verdict => verdict_cmd(cfg, seq),
        Command::Diophantine => diophantine(cfg, &seq),
        Command::Classify => classify_cmd(cfg, &seq),
        Command::Counterexample => counterexample(cfg, seq),
        Command::Ghx => ghx(cfg, seq),
    }
}

fn data(cfg: &ExperimentConfig, seq: &EigenvalueSequence) -> Result<CoefficientField, CliError> {
    let spec = cfg
        .data
        .as_ref()
        .ok_or_else(|| CliError::usage("/data", "this command needs a data generator".into()))?;
    generators::build(spec, seq, cfg.truncation.j)
}

fn samples_csv(field: &CoefficientField, cfg: &ExperimentConfig) -> String {
    let n = cfg.outputs.samples;
    let modes = field.len().min(cfg.outputs.csv_modes);
    let sampled: Vec<_> = field.modes()[..modes].iter().map(|u| u.samples(n)).collect();
    let mut out = String::from("t");
    for j in 1..=modes {
        let _ = write!(out, ",re_{j},im_{j}");
    }
    out.push('\n');
    for (k, t) in grid_points(n).enumerate() {
        let _ = write!(out, "{t:.17e}");
        for s in &sampled {
            let _ = write!(out, ",{:.17e},{:.17e}", s[k].re, s[k].im);
        }
        out.push('\n');
    }
    out
}

fn diagnostics_csv(diags: &[ModeDiagnostics]) -> String {
    let mut out = String::from("j,lambda_j,divisor_magnitude,resonant,formula,residual_sup\n");
    for d in diags {
        let formula = to_value(d.formula_used);
        let _ = writeln!(
            out,
            "{},{},{:.17e},{},{},{:.17e}",
            d.j,
            d.lambda,
            d.divisor_magnitude,
            d.resonant,
            formula.as_str().unwrap_or_default(),
            d.residual_sup
        );
    }
    out
}

fn gaps_split(report: &mut DiophantineReport) -> String {
    let csv = report.gaps_csv();
    report.gaps.clear();
    csv
}

fn spectrum(cfg: &ExperimentConfig, seq: &EigenvalueSequence) -> Result<Outcome, CliError> {
    let growth = seq.growth().map(|g| verify_growth(seq, g));
    let top = seq.values().iter().copied().fold(0.0, f64::max);
    let mut counting = Vec::new();
    let mut level = 1.0;
    while level <= top {
        counting.push((level, counting_function(seq, level)));
        level *= 2.0;
    }
    Ok(Outcome {
        result: json!({
            "len": seq.len(),
            "kernel_dim": seq.kernel_dim(),
            "growth_certificate": seq.growth(),
            "growth_report": growth,
            "counting": counting,
        }),
        csv: if cfg.outputs.csv { vec![("spectrum.csv".into(), seq.to_csv())] } else { vec![] },
        verified: growth.as_ref().map_or(true, |g| g.holds),
    })
}

fn solve(cfg: &ExperimentConfig, seq: EigenvalueSequence) -> Result<Outcome, CliError> {
    let f = data(cfg, &seq)?;
    let op = cfg.operator(seq)?;
    let solved = solve_field(&op, &f, &cfg.numeric.solver).map_err(engine)?;
    let max_residual = solved.diagnostics.iter().map(|d| d.residual_sup).fold(0.0, f64::max);
    let mut csv = Vec::new();
    if cfg.outputs.csv {
        csv.push(("modes.csv".into(), diagnostics_csv(&solved.diagnostics)));
        csv.push(("solution.csv".into(), samples_csv(&solved.field, cfg)));
    }
    Ok(Outcome {
        result: json!({
            "c0": [op.c0().re, op.c0().im],
            "max_residual": max_residual,
            "modes": solved.diagnostics,
        }),
        csv,
        verified: true,
    })
}

fn diophantine_params(cfg: &ExperimentConfig) -> Result<DiophantineParams, CliError> {
    Ok(DiophantineParams {
        alpha: cfg.alpha()?,
        j_max: Some(cfg.truncation.j),
        epsilons: cfg.diophantine.epsilons.clone(),
        sign: cfg.numeric.sign,
    })
}

fn verdict_cmd(cfg: &ExperimentConfig, seq: EigenvalueSequence) -> Result<Outcome, CliError> {
    let op = cfg.operator(seq)?;
    let mut v = verdict(&op, &diophantine_params(cfg)?).map_err(engine)?;
    let mut csv = Vec::new();
    if let Certificate::Diophantine(rep) = &mut v.certificate {
        let gaps = gaps_split(rep);
        if cfg.outputs.csv {
            csv.push(("gaps.csv".into(), gaps));
        }
    }
    Ok(Outcome {
        result: to_value(&v),
        csv,
        verified: true,
    })
}

fn liouville_depth(alpha: &Alpha) -> Option<u32> {
    alpha.label().strip_prefix("liouville(")?.strip_suffix(')')?.parse().ok()
}

fn diophantine(cfg: &ExperimentConfig, seq: &EigenvalueSequence) -> Result<Outcome, CliError> {
    let alpha = match cfg.alpha()? {
        Some(a) => a,
        None => match &cfg.operator {
            Some(crate::config::OperatorConfig::Constant { omega }) => {
                Alpha::float(num_complex::Complex64::from(*omega).re)
            }
            _ => {
                return Err(CliError::usage(
                    "/diophantine/alpha",
                    "set an alpha or a constant operator".into(),
                ))
            }
        },
    };
    if let Some(k) = liouville_depth(&alpha) {
        if !(2..=6).contains(&k) {
            return Err(CliError::usage("/diophantine/alpha", format!("Liouville depth {k} outside 2..=6")));
        }
    }
    let mut report =
        check_condition_a(&alpha, seq, cfg.truncation.j, &cfg.diophantine.epsilons).map_err(engine)?;
    let gaps = gaps_split(&mut report);
    let probes = probe_gaps(&alpha, &cfg.diophantine.probe_log10).map_err(engine)?;
    let certificate = liouville_depth(&alpha)
        .map(|k| construct_liouville(k, cfg.precision()).map(|(_, c)| c))
        .transpose()
        .map_err(engine)?;
    let verified = certificate.as_ref().map_or(true, |c| c.all_within_bound());
    Ok(Outcome {
        result: json!({
            "alpha_decimal": alpha.to_decimal(30),
            "report": report,
            "probes": probes,
            "liouville_certificate": certificate,
        }),
        csv: if cfg.outputs.csv { vec![("gaps.csv".into(), gaps)] } else { vec![] },
        verified,
    })
}

fn classify_cmd(cfg: &ExperimentConfig, seq: &EigenvalueSequence) -> Result<Outcome, CliError> {
    let field = data(cfg, seq)?;
    let reg = &cfg.numeric.regularity;
    let t = cfg.truncation;
    let report = classify(&field, t.m_max, t.gamma_max, reg).map_err(engine)?;
    let star = (0..=t.m_max)
        .map(|m| condition_star(&field, m, t.gamma_max, reg))
        .collect::<ghlab::Result<Vec<_>>>()
        .map_err(engine)?;
    let membership = synthesis_membership(&field, reg).map_err(engine)?;
    let sup_norms = mode_norms(&field, 1.0, 1.0, 0).map_err(engine)?;
    let order = distribution_order_fit(&sup_norms, seq, reg).map_err(engine)?;
    let mut csv = String::from("j,lambda_j,sup_norm,synthesis_norm\n");
    for (i, (s, n)) in sup_norms.iter().zip(&membership.norms).enumerate() {
        let _ = writeln!(csv, "{},{},{:.17e},{:.17e}", i + 1, seq.lambda(i + 1), s, n);
    }
    Ok(Outcome {
        result: json!({
            "pointwise": report,
            "joint": star,
            "synthesis": membership.verdict,
            "distribution_order": order,
        }),
        csv: if cfg.outputs.csv { vec![("norms.csv".into(), csv)] } else { vec![] },
        verified: true,
    })
}

fn counterexample(cfg: &ExperimentConfig, seq: EigenvalueSequence) -> Result<Outcome, CliError> {
    let op = cfg.operator(seq)?;
    let w = build_counterexample(&op, cfg.truncation.j, &cfg.numeric.sign).map_err(engine)?;
    let check = verify_counterexample(&w.u, &w.f, &op, w.t_star, &cfg.numeric.witness).map_err(engine)?;
    let mut csv = Vec::new();
    if cfg.outputs.csv {
        let mut modes = String::from("j,residual,modulus_at_t_star,sup_f\n");
        for ((r, m), s) in check.residuals.iter().zip(&check.moduli).zip(&check.f_sup) {
            let _ = writeln!(modes, "{},{:.17e},{:.17e},{:.17e}", r.0, r.1, m.1, s.1);
        }
        csv.push(("witness_modes.csv".into(), modes));
        csv.push(("witness_u.csv".into(), samples_csv(&w.u, cfg)));
        csv.push(("witness_f.csv".into(), samples_csv(&w.f, cfg)));
    }
    let verified = check.all_pass();
    Ok(Outcome {
        result: json!({
            "t_star": w.t_star,
            "cutoff": w.g,
            "extension": w.psi,
            "grid": w.grid,
            "sign_analysis": w.analysis,
            "checks": {
                "residual": check.residual_ok,
                "non_decay": check.modulus_ok,
                "data_smooth": check.f_member_ok,
            },
            "max_residual": check.residuals.iter().map(|r| r.1).fold(0.0, f64::max),
            "max_modulus_error": check.moduli.iter().map(|m| (m.1 - 1.0).abs()).fold(0.0, f64::max),
            "decay_rate": check.decay_rate,
            "decay_constant": check.decay_constant,
            "c_star": check.c_star,
            "solution_membership": check.u_membership.verdict,
            "data_membership": check.f_membership.verdict,
        }),
        csv,
        verified,
    })
}

fn ghx(cfg: &ExperimentConfig, seq: EigenvalueSequence) -> Result<Outcome, CliError> {
    let f = data(cfg, &seq)?;
    let op = cfg.operator(seq)?;
    let mut report = gh_experiment(&op, &f, &diophantine_params(cfg)?, &cfg.ghx()).map_err(engine)?;
    let mut csv = Vec::new();
    if let Certificate::Diophantine(rep) = &mut report.verdict.certificate {
        let gaps = gaps_split(rep);
        if cfg.outputs.csv {
            csv.push(("gaps.csv".into(), gaps));
        }
    }
    if cfg.outputs.csv {
        csv.push(("modes.csv".into(), diagnostics_csv(&report.diagnostics)));
    }
    let min_divisor = report
        .diagnostics
        .iter()
        .map(|d| d.divisor_magnitude)
        .fold(f64::INFINITY, f64::min);
    Ok(Outcome {
        result: json!({
            "verdict": report.verdict,
            "data_membership": report.data_membership.verdict,
            "per_m": report.per_m,
            "solution_passes": report.passes,
            "min_divisor": min_divisor,
        }),
        csv,
        verified: true,
    })
}
