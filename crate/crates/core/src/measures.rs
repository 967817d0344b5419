//! Entanglement and teleportation measures on bipartite states.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{
    density_from_state, haar_state_from_rng, partial_transpose, weyl_operator, Cut, DensityOperator, StateVector,
};
use crate::tensor::{
    hermitian_eig, trace_norm_hermitian, unitarity_deviation, unitary_from_generator, ComplexMatrix, ZERO,
};
use crate::tolerance::Tolerances;

/// How a measure value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    ClosedForm,
    Optimizer,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    pub value: f64,
    pub cut: Cut,
    pub method: Method,
    pub iterations: usize,
    /// Standard error; zero unless the value is a Monte-Carlo estimate.
    pub stderr: f64,
}

impl MeasureResult {
    fn exact(value: f64, cut: Cut) -> Self {
        Self {
            value,
            cut,
            method: Method::Exact,
            iterations: 0,
            stderr: 0.0,
        }
    }
}

/// Settings for the fully-entangled-fraction search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub step_size: f64,
    pub gradient_tolerance: f64,
    /// Seeds the random starting unitaries of restarts after the first.
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_iterations: 500,
            step_size: 0.1,
            gradient_tolerance: 1e-8,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iterations == 0 {
            return Err(Error::OutOfRange("restarts and max_iterations must be positive".into()));
        }
        if self.step_size.is_nan()
            || self.step_size <= 0.0
            || self.gradient_tolerance.is_nan()
            || self.gradient_tolerance <= 0.0
        {
            return Err(Error::OutOfRange(
                "step_size and gradient_tolerance must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Snaps values within the clamp tolerance of `[lo, hi]` onto the interval.
fn clamp_measure(measure: &'static str, value: f64, lo: f64, hi: f64) -> Result<f64> {
    let slack = Tolerances::DEFAULT.clamp;
    if !value.is_finite() || value < lo - slack || value > hi + slack {
        return Err(Error::MeasureOutOfRange { measure, value });
    }
    Ok(value.clamp(lo, hi))
}

fn local_dims(rho: &DensityOperator) -> Result<usize> {
    match rho.dims() {
        [a, b] if a == b => Ok(*a),
        dims => Err(Error::DimensionMismatch(format!(
            "expected a d x d bipartite state, got dims {dims:?}"
        ))),
    }
}

/// Normalized negativity `(‖ρ^{T_B}‖₁ − 1)/(d − 1)` across `cut`, with `d` the smaller block dimension.
pub fn negativity(rho: &DensityOperator, cut: &Cut) -> Result<MeasureResult> {
    let grouped = rho.reshape_to_cut(cut)?;
    let d = grouped.dims()[0].min(grouped.dims()[1]);
    let pt = partial_transpose(&grouped, 1)?;
    let norm = trace_norm_hermitian(&pt)?;
    let value = clamp_measure("negativity", (norm - 1.0) / (d - 1) as f64, 0.0, 1.0)?;
    Ok(MeasureResult::exact(value, cut.clone()))
}

/// Schmidt coefficients in descending order, from the left-block marginal spectrum.
pub fn schmidt_coefficients(psi: &StateVector, cut: &Cut) -> Result<Vec<f64>> {
    let grouped = psi.reshape_to_cut(cut)?;
    let (dl, dr) = (grouped.dims()[0], grouped.dims()[1]);
    let a = grouped.amplitudes();
    let mut marginal = ComplexMatrix::zeros(dl, dl);
    for i in 0..dl {
        for k in i..dl {
            let z: Complex64 = (0..dr).map(|j| a[i * dr + j] * a[k * dr + j].conj()).sum();
            marginal[(i, k)] = z;
            marginal[(k, i)] = z.conj();
        }
    }
    let mut s: Vec<f64> = hermitian_eig(&marginal)?
        .eigenvalues
        .iter()
        .map(|&l| l.max(0.0).sqrt())
        .collect();
    s.reverse();
    Ok(s)
}

/// Pure-state negativity `((Σ s_i)² − 1)/(d − 1)` from Schmidt coefficients.
pub fn pure_negativity_closed_form(psi: &StateVector, cut: &Cut) -> Result<f64> {
    let s = schmidt_coefficients(psi, cut)?;
    let (dl, dr) = cut.block_dims(psi.dims());
    let d = dl.min(dr);
    let sum: f64 = s.iter().sum();
    clamp_measure("negativity", (sum * sum - 1.0) / (d - 1) as f64, 0.0, 1.0)
}

/// `(I ⊗ U) |Φ⁺⟩` as a flat vector.
fn twisted_max_entangled(u: &ComplexMatrix) -> Vec<Complex64> {
    let d = u.rows();
    let norm = 1.0 / (d as f64).sqrt();
    let mut v = vec![ZERO; d * d];
    for a in 0..d {
        for b in 0..d {
            v[a * d + b] = u[(b, a)] * norm;
        }
    }
    v
}

fn fef_objective(rho: &ComplexMatrix, u: &ComplexMatrix) -> f64 {
    rho.expectation(&twisted_max_entangled(u)).re
}

/// Hermitian matrix from `d²` real coordinates: diagonal first, then
/// real/imaginary parts of the strict upper triangle.
fn hermitian_from_params(d: usize, theta: &[f64]) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        h[(i, i)] = Complex64::new(theta[i], 0.0);
    }
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = Complex64::new(theta[k], theta[k + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    h
}

/// The optimum found by [`optimize_fef`]: the overlap and the unitary attaining it.
#[derive(Debug, Clone)]
pub struct FefSolution {
    pub result: MeasureResult,
    pub unitary: ComplexMatrix,
}

const FD_STEP: f64 = 1e-5;

struct AscentOutcome {
    value: f64,
    unitary: ComplexMatrix,
    iterations: usize,
}

/// Gradient ascent on `U ↦ ⟨Φ_U|ρ|Φ_U⟩` along `U ← exp(iK) U`.
///
/// The gradient over the `d²` coordinates of `K` is taken by central
/// differences. The step grows by 20% after an improving move and halves on
/// a rejected one.
fn ascend(rho: &ComplexMatrix, start: ComplexMatrix, cfg: &OptimizerConfig) -> Result<AscentOutcome> {
    let d = start.rows();
    let n_params = d * d;
    let mut u = start;
    let mut value = fef_objective(rho, &u);
    let mut step = cfg.step_size;
    let mut theta = vec![0.0; n_params];
    let mut grad = vec![0.0; n_params];

    for iteration in 1..=cfg.max_iterations {
        for k in 0..n_params {
            theta[k] = FD_STEP;
            let up = unitary_from_generator(&hermitian_from_params(d, &theta))?.matmul(&u);
            theta[k] = -FD_STEP;
            let down = unitary_from_generator(&hermitian_from_params(d, &theta))?.matmul(&u);
            theta[k] = 0.0;
            grad[k] = (fef_objective(rho, &up) - fef_objective(rho, &down)) / (2.0 * FD_STEP);
        }
        let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if grad_norm < cfg.gradient_tolerance {
            return Ok(AscentOutcome {
                value,
                unitary: u,
                iterations: iteration,
            });
        }
        loop {
            let move_params: Vec<f64> = grad.iter().map(|g| g * step).collect();
            let candidate = unitary_from_generator(&hermitian_from_params(d, &move_params))?.matmul(&u);
            let candidate_value = fef_objective(rho, &candidate);
            if candidate_value >= value {
                u = candidate;
                value = candidate_value;
                step *= 1.2;
                break;
            }
            step *= 0.5;
            if step * grad_norm < 1e-15 {
                // no representable uphill move left
                return Ok(AscentOutcome {
                    value,
                    unitary: u,
                    iterations: iteration,
                });
            }
        }
    }
    Ok(AscentOutcome {
        value,
        unitary: u,
        iterations: cfg.max_iterations,
    })
}

fn random_unitary(d: usize, rng: &mut impl Rng) -> Result<ComplexMatrix> {
    let mut theta = vec![0.0; d * d];
    for t in theta.iter_mut() {
        *t = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    }
    unitary_from_generator(&hermitian_from_params(d, &theta))
}

/// Maximizes the overlap of `rho` with the maximally entangled states `(I⊗U)|Φ⁺⟩`.
///
/// The first restart starts at `U = I`, the rest at random unitaries drawn
/// from `cfg.seed`. The value is a lower bound on the true optimum.
pub fn optimize_fef(rho: &DensityOperator, cfg: &OptimizerConfig) -> Result<FefSolution> {
    cfg.validate()?;
    let d = local_dims(rho)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<AscentOutcome> = None;
    for restart in 0..cfg.restarts {
        let start = if restart == 0 {
            ComplexMatrix::identity(d)
        } else {
            random_unitary(d, &mut rng)?
        };
        let outcome = ascend(rho.matrix(), start, cfg)?;
        if best.as_ref().is_none_or(|b| outcome.value > b.value) {
            best = Some(outcome);
        }
    }
    let best = best.expect("at least one restart");
    let value = clamp_measure("fully entangled fraction", best.value, 0.0, 1.0)?;
    Ok(FefSolution {
        result: MeasureResult {
            value,
            cut: Cut::bipartite(),
            method: Method::Optimizer,
            iterations: best.iterations,
            stderr: 0.0,
        },
        unitary: best.unitary,
    })
}

pub fn fully_entangled_fraction(rho: &DensityOperator, cfg: &OptimizerConfig) -> Result<MeasureResult> {
    Ok(optimize_fef(rho, cfg)?.result)
}

/// Maximal average fidelity of standard teleportation, `(F d + 1)/(d + 1)`.
pub fn teleportation_fidelity(rho: &DensityOperator, cfg: &OptimizerConfig) -> Result<MeasureResult> {
    let d = local_dims(rho)? as f64;
    let fef = fully_entangled_fraction(rho, cfg)?;
    let value = (fef.value * d + 1.0) / (d + 1.0);
    Ok(MeasureResult { value, ..fef })
}

/// `max{((d+1) f − 2)/(d − 1), 0}`.
pub fn teleportation_capability(rho: &DensityOperator, cfg: &OptimizerConfig) -> Result<MeasureResult> {
    let d = local_dims(rho)? as f64;
    let fid = teleportation_fidelity(rho, cfg)?;
    let raw = ((d + 1.0) * fid.value - 2.0) / (d - 1.0);
    let value = clamp_measure("teleportation capability", raw.max(0.0), 0.0, 1.0)?;
    Ok(MeasureResult { value, ..fid })
}

/// Monte-Carlo estimate of the average fidelity of standard teleportation over `rho`.
///
/// Each trial draws a Haar-random input `|ξ⟩`, applies the generalized Bell
/// measurement `{(I ⊗ W_mn)|Φ⁺⟩}` to the input and Alice's half, and lets Bob
/// apply `W_mnᵀ U†`. With `U = I` the scheme is exact for `|Φ⁺⟩`; passing the
/// optimal unitary from [`optimize_fef`] targets `(I ⊗ U)|Φ⁺⟩` instead. The
/// trial value is the outcome-averaged fidelity `Σ_mn ⟨ξ|V σ_mn V†|ξ⟩`.
pub fn mc_teleportation_fidelity(
    rho: &DensityOperator,
    correction: &ComplexMatrix,
    n_samples: usize,
    seed: u64,
) -> Result<MeasureResult> {
    let d = local_dims(rho)?;
    if correction.rows() != d || !correction.is_square() {
        return Err(Error::DimensionMismatch("correction must be a d x d unitary".into()));
    }
    let deviation = unitarity_deviation(correction);
    if deviation > 1e-9 {
        return Err(Error::NotUnitary { deviation });
    }
    if n_samples < 2 {
        return Err(Error::OutOfRange("at least two Monte-Carlo samples are needed".into()));
    }
    let r = rho.matrix();
    let inv_sqrt_d = 1.0 / (d as f64).sqrt();
    let u_adj = correction.adjoint();
    // (Bell vector φ_mn[c, a], Bob's correction V_mn)
    let mut outcomes = Vec::with_capacity(d * d);
    for m in 0..d {
        for n in 0..d {
            let w = weyl_operator(d, m, n)?;
            let mut phi = ComplexMatrix::zeros(d, d);
            for c in 0..d {
                for a in 0..d {
                    phi[(c, a)] = w[(a, c)] * inv_sqrt_d;
                }
            }
            outcomes.push((phi, w.transpose().matmul(&u_adj)));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut u_vec = vec![ZERO; d];
    let mut sigma = ComplexMatrix::zeros(d, d);
    for _ in 0..n_samples {
        let xi = haar_state_from_rng(&[d], &mut rng)?;
        let xi = xi.amplitudes();
        let mut fidelity = 0.0;
        for (phi, v) in &outcomes {
            for (a, slot) in u_vec.iter_mut().enumerate() {
                *slot = (0..d).map(|c| phi[(c, a)].conj() * xi[c]).sum();
            }
            // Bob's unnormalized conditional state
            for b in 0..d {
                for bp in 0..d {
                    let mut acc = ZERO;
                    for a in 0..d {
                        for ap in 0..d {
                            acc += u_vec[a] * u_vec[ap].conj() * r[(a * d + b, ap * d + bp)];
                        }
                    }
                    sigma[(b, bp)] = acc;
                }
            }
            let w = v.adjoint().mul_vec(xi);
            fidelity += sigma.expectation(&w).re;
        }
        sum += fidelity;
        sum_sq += fidelity * fidelity;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let variance = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(MeasureResult {
        value: mean,
        cut: Cut::bipartite(),
        method: Method::MonteCarlo,
        iterations: n_samples,
        stderr: (variance / n).sqrt(),
    })
}

/// Wootters concurrence of a two-qubit state.
pub fn wootters_concurrence(rho: &DensityOperator) -> Result<MeasureResult> {
    if rho.dims() != [2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "concurrence needs a two-qubit state, got dims {:?}",
            rho.dims()
        )));
    }
    let m = rho.matrix();
    // Y⊗Y is real: antidiagonal (-1, 1, 1, -1)
    let yy_sign = [-1.0, 1.0, 1.0, -1.0];
    let mut tilde = ComplexMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            tilde[(i, j)] = m[(3 - i, 3 - j)].conj() * (yy_sign[i] * yy_sign[j]);
        }
    }
    let eig = hermitian_eig(m)?;
    let sqrt_rho = eig.reconstruct_with(|l| Complex64::new(l.max(0.0).sqrt(), 0.0));
    let product = sqrt_rho.matmul(&tilde).matmul(&sqrt_rho);
    let hermitian = (&product + &product.adjoint()).scale(Complex64::new(0.5, 0.0));
    let mut lambdas: Vec<f64> = hermitian_eig(&hermitian)?
        .eigenvalues
        .iter()
        .map(|&l| l.max(0.0).sqrt())
        .collect();
    lambdas.reverse();
    let raw = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3];
    let value = clamp_measure("concurrence", raw.max(0.0), 0.0, 1.0)?;
    Ok(MeasureResult::exact(value, Cut::bipartite()))
}

/// Concurrence of a pure state across `cut`, `√(2(1 − tr ρ_L²))`.
pub fn pure_state_concurrence(psi: &StateVector, cut: &Cut) -> Result<f64> {
    let purity: f64 = schmidt_coefficients(psi, cut)?.iter().map(|s| s.powi(4)).sum();
    Ok((2.0 * (1.0 - purity)).max(0.0).sqrt())
}

/// Negativity of a pure state across `cut`.
pub fn pure_state_negativity(psi: &StateVector, cut: &Cut) -> Result<MeasureResult> {
    negativity(&density_from_state(psi), cut)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{haar_random_state, max_entangled, named_state, random_mixed, NamedState};
    use crate::tensor::kron;
    use proptest::prelude::*;

    fn bipartite(psi: &StateVector) -> DensityOperator {
        density_from_state(psi)
    }

    fn product_qutrits() -> DensityOperator {
        bipartite(&StateVector::basis(vec![3, 3], &[0, 0]).unwrap())
    }

    #[test]
    fn negativity_endpoints() {
        let me = bipartite(&max_entangled(3).unwrap());
        assert!((negativity(&me, &Cut::bipartite()).unwrap().value - 1.0).abs() < 1e-12);
        assert_eq!(negativity(&product_qutrits(), &Cut::bipartite()).unwrap().value, 0.0);
        let a = random_mixed(&[3], 3, 1).unwrap();
        let b = random_mixed(&[3], 3, 2).unwrap();
        let prod = DensityOperator::new(vec![3, 3], kron(a.matrix(), b.matrix()).unwrap()).unwrap();
        assert!(negativity(&prod, &Cut::bipartite()).unwrap().value < 1e-12);
    }

    #[test]
    fn negativity_of_oup_one_vs_rest() {
        // (p + 2√(p(3−2p)))/3 at p = 1/2 is 5/6
        let psi = named_state(NamedState::OuP, Some(0.5)).unwrap();
        let n = pure_state_negativity(&psi, &Cut::new(&[0], 3).unwrap()).unwrap();
        assert!((n.value - 5.0 / 6.0).abs() < 1e-12);
        assert_eq!(n.method, Method::Exact);
    }

    #[test]
    fn negativity_cut_uses_smaller_dimension() {
        // qutrit maximally entangled with one party of a 3x3 pair: N_{1(23)} = 1
        let ou = named_state(NamedState::Ou, None).unwrap();
        let n = pure_state_negativity(&ou, &Cut::new(&[0], 3).unwrap()).unwrap();
        assert!((n.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn schmidt_cases() {
        let prod = StateVector::basis(vec![3, 3], &[1, 2]).unwrap();
        let s = schmidt_coefficients(&prod, &Cut::bipartite()).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-14 && s[1..].iter().all(|x| x.abs() < 1e-7));

        let me = max_entangled(3).unwrap();
        let s = schmidt_coefficients(&me, &Cut::bipartite()).unwrap();
        for x in s {
            assert!((x - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        }
        assert!((pure_negativity_closed_form(&me, &Cut::bipartite()).unwrap() - 1.0).abs() < 1e-12);
        assert!(pure_negativity_closed_form(&prod, &Cut::bipartite()).unwrap() < 1e-12);
    }

    #[test]
    fn fef_of_maximally_entangled_and_mixed() {
        let cfg = OptimizerConfig::default();
        let me = bipartite(&max_entangled(3).unwrap());
        assert!((fully_entangled_fraction(&me, &cfg).unwrap().value - 1.0).abs() < 1e-12);

        let mixed = DensityOperator::maximally_mixed(vec![3, 3]).unwrap();
        assert!((fully_entangled_fraction(&mixed, &cfg).unwrap().value - 1.0 / 9.0).abs() < 1e-8);
    }

    #[test]
    fn fef_matches_schmidt_closed_form() {
        let cfg = OptimizerConfig::default();
        for seed in 0..10 {
            let psi = haar_random_state(&[3, 3], seed).unwrap();
            let s = schmidt_coefficients(&psi, &Cut::bipartite()).unwrap();
            let closed = s.iter().sum::<f64>().powi(2) / 3.0;
            let fef = fully_entangled_fraction(&bipartite(&psi), &cfg).unwrap().value;
            assert!(fef <= closed + 1e-9, "optimizer exceeded the optimum");
            assert!((fef - closed).abs() < 1e-6, "seed {seed}: {fef} vs {closed}");
        }
    }

    #[test]
    fn fef_rejects_bad_input() {
        let cfg = OptimizerConfig::default();
        let rect = DensityOperator::maximally_mixed(vec![2, 3]).unwrap();
        assert!(matches!(
            fully_entangled_fraction(&rect, &cfg),
            Err(Error::DimensionMismatch(_))
        ));
        let bad = OptimizerConfig { restarts: 0, ..cfg };
        let me = bipartite(&max_entangled(2).unwrap());
        assert!(fully_entangled_fraction(&me, &bad).is_err());
    }

    #[test]
    fn fidelity_and_capability_values() {
        let cfg = OptimizerConfig::default();
        let me = bipartite(&max_entangled(3).unwrap());
        assert!((teleportation_fidelity(&me, &cfg).unwrap().value - 1.0).abs() < 1e-12);
        assert!((teleportation_capability(&me, &cfg).unwrap().value - 1.0).abs() < 1e-12);

        // F = 1/3 gives the classical threshold 2/(d+1)
        let prod = product_qutrits();
        assert!((teleportation_fidelity(&prod, &cfg).unwrap().value - 0.5).abs() < 1e-9);
        assert!(teleportation_capability(&prod, &cfg).unwrap().value < 1e-9);

        let mixed = DensityOperator::maximally_mixed(vec![3, 3]).unwrap();
        assert!((teleportation_fidelity(&mixed, &cfg).unwrap().value - 1.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn capability_equals_negativity_on_pure_states() {
        let cfg = OptimizerConfig::default();
        for seed in 100..105 {
            let rho = bipartite(&haar_random_state(&[3, 3], seed).unwrap());
            let t = teleportation_capability(&rho, &cfg).unwrap().value;
            let n = negativity(&rho, &Cut::bipartite()).unwrap().value;
            assert!((t - n).abs() < 1e-6, "seed {seed}: T={t} N={n}");
        }
    }

    #[test]
    fn mc_perfect_channel() {
        let me = bipartite(&max_entangled(3).unwrap());
        let r = mc_teleportation_fidelity(&me, &ComplexMatrix::identity(3), 2000, 1).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert_eq!(r.method, Method::MonteCarlo);
    }

    #[test]
    fn mc_product_resource_hits_classical_bound() {
        let r = mc_teleportation_fidelity(&product_qutrits(), &ComplexMatrix::identity(3), 10_000, 2).unwrap();
        assert!((r.value - 0.5).abs() <= 3.0 * r.stderr, "{} ± {}", r.value, r.stderr);
    }

    #[test]
    fn mc_with_optimal_unitary_matches_closed_form() {
        let cfg = OptimizerConfig::default();
        let rho = bipartite(&haar_random_state(&[3, 3], 77).unwrap());
        let sol = optimize_fef(&rho, &cfg).unwrap();
        let expected = (sol.result.value * 3.0 + 1.0) / 4.0;
        let r = mc_teleportation_fidelity(&rho, &sol.unitary, 10_000, 3).unwrap();
        assert!(
            (r.value - expected).abs() <= 4.0 * r.stderr,
            "{} vs {expected} ± {}",
            r.value,
            r.stderr
        );
    }

    #[test]
    fn mc_rejects_non_unitary() {
        let me = bipartite(&max_entangled(3).unwrap());
        let bad = ComplexMatrix::real_diagonal(&[1.0, 2.0, 1.0]);
        assert!(matches!(
            mc_teleportation_fidelity(&me, &bad, 10, 1),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn mc_stderr_scales_with_samples() {
        let rho = bipartite(&haar_random_state(&[3, 3], 5).unwrap());
        let u = ComplexMatrix::identity(3);
        let small = mc_teleportation_fidelity(&rho, &u, 2_000, 11).unwrap();
        let large = mc_teleportation_fidelity(&rho, &u, 8_000, 12).unwrap();
        let ratio = small.stderr / large.stderr;
        // sample standard deviations fluctuate by a few percent at these sizes
        assert!((ratio - 2.0).abs() < 0.3, "ratio {ratio}");
    }

    #[test]
    fn concurrence_cases() {
        let bell = bipartite(&max_entangled(2).unwrap());
        assert!((wootters_concurrence(&bell).unwrap().value - 1.0).abs() < 1e-12);

        let prod = bipartite(&haar_random_state(&[2], 1).unwrap());
        let other = bipartite(&haar_random_state(&[2], 2).unwrap());
        let pp = DensityOperator::new(vec![2, 2], kron(prod.matrix(), other.matrix()).unwrap()).unwrap();
        assert!(wootters_concurrence(&pp).unwrap().value < 1e-7);

        // Werner p|Φ+⟩⟨Φ+| + (1-p) I/4 has C = (3p - 1)/2
        let p = 0.8;
        let werner = &bell.matrix().scale(Complex64::new(p, 0.0))
            + &ComplexMatrix::identity(4).scale(Complex64::new((1.0 - p) / 4.0, 0.0));
        let werner = DensityOperator::new(vec![2, 2], werner).unwrap();
        assert!((wootters_concurrence(&werner).unwrap().value - 0.7).abs() < 1e-12);

        assert!(wootters_concurrence(&product_qutrits()).is_err());
    }

    #[test]
    fn pure_concurrence_agrees_with_wootters() {
        for seed in 0..20 {
            let psi = haar_random_state(&[2, 2], seed).unwrap();
            let pure = pure_state_concurrence(&psi, &Cut::bipartite()).unwrap();
            let mixed = wootters_concurrence(&bipartite(&psi)).unwrap().value;
            assert!((pure - mixed).abs() < 1e-7, "seed {seed}: {pure} vs {mixed}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn closed_form_matches_partial_transpose(seed in any::<u64>()) {
            let psi = haar_random_state(&[3, 3], seed).unwrap();
            let closed = pure_negativity_closed_form(&psi, &Cut::bipartite()).unwrap();
            let numeric = pure_state_negativity(&psi, &Cut::bipartite()).unwrap().value;
            prop_assert!((closed - numeric).abs() < 1e-9);
            let s = schmidt_coefficients(&psi, &Cut::bipartite()).unwrap();
            prop_assert!((s.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-10);
            prop_assert!(s.windows(2).all(|w| w[0] >= w[1]));
        }

        #[test]
        fn negativity_is_local_unitary_invariant(seed in any::<u64>(), rank in 1usize..=9) {
            let rho = random_mixed(&[3, 3], rank, seed).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
            let u = random_unitary(3, &mut rng).unwrap();
            let v = random_unitary(3, &mut rng).unwrap();
            let rotated = rho.conjugate_by(&kron(&u, &v).unwrap()).unwrap();
            let n0 = negativity(&rho, &Cut::bipartite()).unwrap().value;
            let n1 = negativity(&rotated, &Cut::bipartite()).unwrap().value;
            prop_assert!((n0 - n1).abs() < 1e-9);
        }
    }
}
