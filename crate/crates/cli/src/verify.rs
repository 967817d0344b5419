//! Invariant battery behind `monoqt verify`.

use monoqt_core::emit::fmt_sig;
use monoqt_core::lab::concurrence_residual;
use monoqt_core::measures::{negativity, pure_state_negativity, teleportation_capability};
use monoqt_core::states::{
    density_from_state, ghz_state, haar_random_state, named_state, partial_trace, random_mixed, w_state,
};
use monoqt_core::tensor::hermitian_eig;
use monoqt_core::{ComplexMatrix, Cut, NamedState, OptimizerConfig, Result};
use rayon::prelude::*;

use crate::exit;

struct Check {
    name: &'static str,
    /// Worst observed value of the checked quantity.
    worst: f64,
    bound: &'static str,
    passed: bool,
}

impl Check {
    fn at_most(name: &'static str, worst: f64, limit: f64, bound: &'static str) -> Self {
        Self {
            name,
            worst,
            bound,
            passed: worst <= limit,
        }
    }

    fn at_least(name: &'static str, worst: f64, limit: f64, bound: &'static str) -> Self {
        Self {
            name,
            worst,
            bound,
            passed: worst >= limit,
        }
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn min_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, f64::min)
}

/// Indefinite Hermitian test matrix of size `n`: difference of two random density operators.
fn test_hermitian(n: usize, seed: u64) -> Result<ComplexMatrix> {
    let a = random_mixed(&[n], n, seed)?;
    let b = random_mixed(&[n], 1.max(n / 2), seed ^ 0x5eed)?;
    Ok(a.matrix() - b.matrix())
}

fn eigensolver_check() -> Result<Check> {
    let worst = (2..=27usize)
        .into_par_iter()
        .map(|n| -> Result<f64> {
            let h = test_hermitian(n, n as u64)?;
            let eig = hermitian_eig(&h)?;
            let v = &eig.eigenvectors;
            let orth = v.adjoint().matmul(v).max_abs_diff(&ComplexMatrix::identity(n));
            let recon = eig.reconstruct().max_abs_diff(&h) / h.frobenius_norm().max(1.0);
            Ok(orth.max(recon))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Check::at_most(
        "eigensolver reconstruction, sizes 2..27",
        max_of(worst),
        1e-9,
        "<= 1e-9",
    ))
}

fn pure_equality_check(count: u64, cfg: &OptimizerConfig) -> Result<Check> {
    let gaps = (0..count)
        .into_par_iter()
        .map(|seed| -> Result<f64> {
            let psi = haar_random_state(&[3, 3], 1_000 + seed)?;
            let n = pure_state_negativity(&psi, &Cut::bipartite())?.value;
            let t = teleportation_capability(&density_from_state(&psi), cfg)?.value;
            Ok((t - n).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Check::at_most(
        "|T - N| on pure two-qutrit states",
        max_of(gaps),
        1e-5,
        "<= 1e-5",
    ))
}

fn mixed_bound_check(count: u64, cfg: &OptimizerConfig) -> Result<Check> {
    let gaps = (0..count)
        .into_par_iter()
        .map(|seed| -> Result<f64> {
            let rank = 1 + (seed % 9) as usize;
            let rho = random_mixed(&[3, 3], rank, 2_000 + seed)?;
            let n = negativity(&rho, &Cut::bipartite())?.value;
            let t = teleportation_capability(&rho, cfg)?.value;
            Ok(n - t)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Check::at_least(
        "N - T on mixed two-qutrit states",
        min_of(gaps),
        -1e-6,
        ">= -1e-6",
    ))
}

fn ckw_check(count: u64) -> Result<Check> {
    let residuals = (0..count)
        .into_par_iter()
        .map(|seed| -> Result<f64> {
            let psi = haar_random_state(&[2, 2, 2], 3_000 + seed)?;
            Ok(concurrence_residual(&psi, 0)?.residual)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Check::at_least(
        "CKW residual on Haar three-qubit states",
        min_of(residuals),
        -1e-9,
        ">= -1e-9",
    ))
}

fn fixture_checks() -> Result<Vec<Check>> {
    let ghz = concurrence_residual(&ghz_state(3, 2)?, 0)?.residual;
    // W saturates CKW: C²_1(23) = 8/9 = 2 · (2/3)².
    let w = concurrence_residual(&w_state(3)?, 0)?.residual;
    Ok(vec![
        Check::at_most("CKW residual of GHZ minus 1", (ghz - 1.0).abs(), 1e-9, "<= 1e-9"),
        Check::at_most("CKW residual of W", w.abs(), 1e-9, "<= 1e-9"),
    ])
}

/// Largest deviation of the pair-marginal spectra from `expected(p)` padded with zeros.
fn spectrum_gap(state: NamedState, pairs: &[[usize; 2]], expected: fn(f64) -> [f64; 3]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..=10 {
        let p = k as f64 / 10.0;
        let rho = density_from_state(&named_state(state, Some(p))?);
        let mut want = vec![0.0; 6];
        want.extend(expected(p));
        want.sort_by(f64::total_cmp);
        for keep in pairs {
            let spec = partial_trace(&rho, keep)?.spectrum()?;
            for (a, b) in spec.iter().zip(&want) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    Ok(worst)
}

fn spectra_checks() -> Result<Vec<Check>> {
    let ou = spectrum_gap(NamedState::OuP, &[[0, 1], [0, 2], [1, 2]], |p| {
        [p / 3.0, p / 3.0, 1.0 - 2.0 * p / 3.0]
    })?;
    let ks = spectrum_gap(NamedState::KsP, &[[0, 1], [0, 2]], |p| [p / 2.0, p / 2.0, 1.0 - p])?;
    Ok(vec![
        Check::at_most("Ou_p pair-marginal spectra, 11 values of p", ou, 1e-10, "<= 1e-10"),
        Check::at_most("KS_p pair-marginal spectra, 11 values of p", ks, 1e-10, "<= 1e-10"),
    ])
}

pub fn run(quick: bool, cfg: &OptimizerConfig) -> Result<u8> {
    let count = if quick { 20 } else { 200 };
    let mut checks = vec![
        eigensolver_check()?,
        pure_equality_check(count, cfg)?,
        mixed_bound_check(count, cfg)?,
        ckw_check(count)?,
    ];
    checks.extend(fixture_checks()?);
    checks.extend(spectra_checks()?);

    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    println!("{:<width$}  {:<6}  {:<20}  bound", "check", "result", "worst");
    for c in &checks {
        println!(
            "{:<width$}  {:<6}  {:<20}  {}",
            c.name,
            if c.passed { "pass" } else { "FAIL" },
            fmt_sig(c.worst),
            c.bound
        );
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} of {} checks passed", checks.len() - failed, checks.len());
    Ok(if failed == 0 { exit::OK } else { exit::VERIFY_FAILED })
}
