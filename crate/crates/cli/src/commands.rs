//! `report`, `sweep` and `sample`.

use std::fs;
use std::path::Path;

use monoqt_core::emit::{
    emit_csv, emit_summary_json, emit_svg_scatter, emit_sweep_csv, emit_sweep_svg, render_summary_json, round_sig,
};
use monoqt_core::lab::{
    self, capability_residual, ksp_pair_negativity, ksp_residual_formula, negativity_residual, one_vs_rest_negativity,
    oup_pair_negativity, oup_residual_high, oup_residual_low, OU_BRANCH_POINT,
};
use monoqt_core::measures::{negativity, teleportation_capability};
use monoqt_core::states::{density_from_state, named_state, partial_trace};
use monoqt_core::{Cut, Error, Family, NamedState, OptimizerConfig, Result, Sampler, StateVector, Tolerances};
use serde_json::{json, Map, Value};

use crate::exit;

fn rounded(values: &[f64]) -> Value {
    values.iter().map(|&v| json!(round_sig(v))).collect()
}

fn print_json(value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    println!("{text}");
    Ok(())
}

/// Ou and KS are the `p = 1` members of their families.
fn resolve(name: &str, p: Option<f64>) -> Result<(NamedState, Option<f64>)> {
    let state: NamedState = name.parse()?;
    match (state, p) {
        (NamedState::Ou | NamedState::Ks, Some(p)) if p != 1.0 => Err(Error::OutOfRange(format!(
            "{state} is the p = 1 member of its family; use {state}_p for p = {p}"
        ))),
        (NamedState::Ou, _) => Ok((NamedState::OuP, Some(1.0))),
        (NamedState::Ks, _) => Ok((NamedState::KsP, Some(1.0))),
        (s, _) if s.takes_parameter() => {
            let p = p.ok_or_else(|| Error::OutOfRange(format!("{s} needs a parameter p")))?;
            Ok((s, Some(p)))
        }
        (s, Some(_)) => Err(Error::OutOfRange(format!("{s} takes no parameter"))),
        (s, None) => Ok((s, None)),
    }
}

/// Closed-form `(N_{1(23)}, N_{1j}, residual)` for the one-parameter families.
fn closed_form(state: NamedState, p: f64) -> Option<Value> {
    let (pair, residual) = match state {
        NamedState::OuP => (
            oup_pair_negativity(p),
            if p <= OU_BRANCH_POINT {
                oup_residual_low(p)
            } else {
                oup_residual_high(p)
            },
        ),
        NamedState::KsP => (ksp_pair_negativity(p), ksp_residual_formula(p)),
        _ => return None,
    };
    Some(json!({
        "n_a_bc": round_sig(one_vs_rest_negativity(p)),
        "n_ab": round_sig(pair),
        "n_ac": round_sig(pair),
        "residual": round_sig(residual),
    }))
}

fn spectra(psi: &StateVector) -> Result<Value> {
    let rho = density_from_state(psi);
    let n = psi.num_subsystems();
    let mut keeps: Vec<Vec<usize>> = (0..n).map(|k| vec![k]).collect();
    if n == 3 {
        keeps.extend([vec![0, 1], vec![0, 2], vec![1, 2]]);
    }
    let mut out = Map::new();
    for keep in keeps {
        let label: String = keep.iter().map(|k| (k + 1).to_string()).collect();
        out.insert(label, rounded(&partial_trace(&rho, &keep)?.spectrum()?));
    }
    Ok(Value::Object(out))
}

fn report_three_party(
    psi: &StateVector,
    state: NamedState,
    shown: NamedState,
    p: Option<f64>,
    cfg: &OptimizerConfig,
) -> Result<Value> {
    let n = negativity_residual(psi, 0)?;
    let t = capability_residual(psi, 0, cfg)?;
    let mut doc = json!({
        "state": shown.to_string(),
        "p": p,
        "dims": psi.dims(),
        "n_a_bc": round_sig(n.n_a_bc),
        "n_ab": round_sig(n.n_ab),
        "n_ac": round_sig(n.n_ac),
        "lhs": round_sig(n.lhs),
        "residual": round_sig(n.residual),
        "marginal_spectra": spectra(psi)?,
        "capability": {
            "t_a_bc": round_sig(t.n_a_bc),
            "t_ab": round_sig(t.n_ab),
            "t_ac": round_sig(t.n_ac),
            "residual": round_sig(t.residual),
        },
        "notes": [
            "t_a_bc is the pure-state negativity across 1|23; the teleportation setting needs a d x d resource",
        ],
    });
    if let Some(cf) = p.and_then(|p| closed_form(state, p)) {
        let gap = (cf["residual"].as_f64().unwrap_or(f64::NAN) - n.residual).abs();
        if gap > Tolerances::DEFAULT.analytic_match {
            doc["notes"].as_array_mut().expect("notes array").push(json!(format!(
                "closed-form residual differs from the computed one by {}",
                round_sig(gap)
            )));
        }
        doc["closed_form"] = cf;
    }
    Ok(doc)
}

fn report_two_party(psi: &StateVector, state: NamedState, cfg: &OptimizerConfig) -> Result<Value> {
    let rho = density_from_state(psi);
    Ok(json!({
        "state": state.to_string(),
        "dims": psi.dims(),
        "negativity": round_sig(negativity(&rho, &Cut::bipartite())?.value),
        "capability": round_sig(teleportation_capability(&rho, cfg)?.value),
        "marginal_spectra": spectra(psi)?,
    }))
}

pub fn report(name: &str, p: Option<f64>, cfg: &OptimizerConfig) -> Result<u8> {
    let (state, p) = resolve(name, p)?;
    let psi = named_state(state, p)?;
    // Ou and KS keep their own names in the output.
    let shown: NamedState = name.parse()?;
    let doc = match psi.num_subsystems() {
        3 => report_three_party(&psi, state, shown, p, cfg)?,
        _ => report_two_party(&psi, shown, cfg)?,
    };
    print_json(&doc)?;
    Ok(exit::OK)
}

pub fn sweep(family: &str, grid: usize, out: &Path, tolerance: f64) -> Result<u8> {
    let family: Family = family.parse()?;
    if tolerance.is_nan() || tolerance < 0.0 {
        return Err(Error::OutOfRange(format!(
            "tolerance must be non-negative, got {tolerance}"
        )));
    }
    let records = lab::sweep(family, grid)?;
    fs::create_dir_all(out)?;
    emit_sweep_csv(&records, &out.join("sweep.csv"))?;
    emit_sweep_svg(&records, &out.join("sweep.svg"))?;

    let max_mismatch = records.iter().map(|r| r.mismatch()).fold(0.0, f64::max);
    let min_numeric = records.iter().map(|r| r.numeric_residual).fold(f64::INFINITY, f64::min);
    let min_analytic = records
        .iter()
        .map(|r| r.analytic_residual)
        .fold(f64::INFINITY, f64::min);
    let worst = records
        .iter()
        .max_by(|a, b| a.mismatch().total_cmp(&b.mismatch()))
        .expect("grid has at least two points");
    print_json(&json!({
        "family": family.to_string(),
        "points": records.len(),
        "tolerance": tolerance,
        "max_mismatch": round_sig(max_mismatch),
        "worst_p": round_sig(worst.p),
        "min_numeric_residual": round_sig(min_numeric),
        "min_analytic_residual": round_sig(min_analytic),
    }))?;

    if max_mismatch > tolerance {
        eprintln!(
            "monoqt: analytic and numeric residuals differ by {} at p = {} (tolerance {tolerance:e})",
            round_sig(max_mismatch),
            round_sig(worst.p)
        );
        return Ok(exit::MISMATCH);
    }
    if min_numeric < -Tolerances::DEFAULT.clamp {
        eprintln!("monoqt: negative residual {} on the grid", round_sig(min_numeric));
        return Ok(exit::VIOLATION);
    }
    Ok(exit::OK)
}

pub fn sample(n: usize, sampler: &str, seed: u64, out: &Path) -> Result<u8> {
    let sampler: Sampler = sampler.parse()?;
    if sampler == Sampler::Named {
        return Err(Error::Parse("sampler must be haar or canonical".into()));
    }
    let run = lab::run_monte_carlo(n, sampler, seed)?;
    fs::create_dir_all(out)?;
    emit_csv(&run.records, &out.join("samples.csv"))?;
    emit_svg_scatter(&run.records, &out.join("scatter.svg"))?;
    emit_summary_json(&run.summary, &out.join("summary.json"))?;
    print!("{}", render_summary_json(&run.summary)?);

    if run.violations.is_empty() {
        return Ok(exit::OK);
    }
    let mut dump = serde_json::to_string_pretty(&run.violations).map_err(|e| Error::Parse(e.to_string()))?;
    dump.push('\n');
    fs::write(out.join("violations.json"), dump)?;
    eprintln!(
        "monoqt: {} monogamy violation(s); states written to violations.json",
        run.violations.len()
    );
    Ok(exit::VIOLATION)
}
