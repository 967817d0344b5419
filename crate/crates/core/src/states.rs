//! Multi-qudit pure states and density operators.
//!
//! Basis index `i` of a system with dimensions `(d₁, …, dₙ)` decodes in mixed
//! radix with the first subsystem most significant, so `|i₁,…,iₙ⟩` has index
//! `((i₁·d₂ + i₂)·d₃ + …)`. This is the ordering produced by [`kron`](crate::tensor::kron).

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{hermitian_eig, ComplexMatrix, ONE, ZERO};
use crate::tolerance::{clamped_sqrt, Tolerances};

/// Attempts allowed by default before the canonical sampler gives up.
pub const DEFAULT_REJECTION_BUDGET: usize = 10_000;

fn validate_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() {
        return Err(Error::InvalidState("at least one subsystem is required".into()));
    }
    if let Some(d) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidState(format!("subsystem dimension {d} is below 2")));
    }
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::InvalidState("total dimension overflows".into()))
}

/// Splits a flat index into per-subsystem digits.
pub fn decode_index(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; dims.len()];
    for (slot, &d) in digits.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    digits
}

pub fn encode_index(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&i, &d)| acc * d + i)
}

/// A normalized pure state with its subsystem dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Accepts amplitudes that are already normalized to within the state-norm tolerance.
    pub fn new(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let total = validate_dims(&dims)?;
        if amplitudes.len() != total {
            return Err(Error::InvalidState(format!(
                "{} amplitudes for total dimension {total}",
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > Tolerances::DEFAULT.state_norm {
            return Err(Error::InvalidState(format!("squared norm {norm_sqr} is not 1")));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(dims: Vec<usize>, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Self::new(dims, amplitudes)
    }

    /// The computational basis state `|digits⟩`.
    pub fn basis(dims: Vec<usize>, digits: &[usize]) -> Result<Self> {
        let total = validate_dims(&dims)?;
        if digits.len() != dims.len() || digits.iter().zip(&dims).any(|(&i, &d)| i >= d) {
            return Err(Error::InvalidState(format!(
                "basis label {digits:?} does not fit dims {dims:?}"
            )));
        }
        let mut amplitudes = vec![ZERO; total];
        amplitudes[encode_index(digits, &dims)] = ONE;
        Self::new(dims, amplitudes)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn amplitude(&self, digits: &[usize]) -> Complex64 {
        self.amplitudes[encode_index(digits, &self.dims)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Reorders subsystems so that new subsystem `k` is old subsystem `order[k]`.
    pub fn permute_subsystems(&self, order: &[usize]) -> Result<Self> {
        check_permutation(order, self.dims.len())?;
        let new_dims: Vec<usize> = order.iter().map(|&k| self.dims[k]).collect();
        let mut out = vec![ZERO; self.amplitudes.len()];
        for (i, &a) in self.amplitudes.iter().enumerate() {
            let digits = decode_index(i, &self.dims);
            let permuted: Vec<usize> = order.iter().map(|&k| digits[k]).collect();
            out[encode_index(&permuted, &new_dims)] = a;
        }
        Ok(Self {
            dims: new_dims,
            amplitudes: out,
        })
    }

    /// Groups the state into two subsystems, left block first.
    pub fn reshape_to_cut(&self, cut: &Cut) -> Result<Self> {
        cut.check(self.dims.len())?;
        let permuted = self.permute_subsystems(&cut.order())?;
        let (dl, dr) = cut.block_dims(&self.dims);
        Ok(Self {
            dims: vec![dl, dr],
            amplitudes: permuted.amplitudes,
        })
    }
}

fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::InvalidCut(format!(
            "permutation {order:?} has wrong length for {n} subsystems"
        )));
    }
    for &k in order {
        if k >= n || seen[k] {
            return Err(Error::InvalidCut(format!("{order:?} is not a permutation of 0..{n}")));
        }
        seen[k] = true;
    }
    Ok(())
}

/// A bipartition of subsystem indices (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cut {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Cut {
    /// `left` against the complement in `0..num_subsystems`.
    pub fn new(left: &[usize], num_subsystems: usize) -> Result<Self> {
        let mut left = left.to_vec();
        left.sort_unstable();
        left.dedup();
        let right: Vec<usize> = (0..num_subsystems).filter(|k| !left.contains(k)).collect();
        Self::from_parts(left, right, num_subsystems)
    }

    pub fn from_parts(mut left: Vec<usize>, mut right: Vec<usize>, num_subsystems: usize) -> Result<Self> {
        left.sort_unstable();
        right.sort_unstable();
        if left.is_empty() || right.is_empty() {
            return Err(Error::InvalidCut("both sides of a cut must be non-empty".into()));
        }
        let mut all: Vec<usize> = left.iter().chain(&right).copied().collect();
        all.sort_unstable();
        if all != (0..num_subsystems).collect::<Vec<_>>() {
            return Err(Error::InvalidCut(format!(
                "{left:?}|{right:?} is not a partition of {num_subsystems} subsystems"
            )));
        }
        Ok(Self { left, right })
    }

    /// The `0|1` cut of a two-party system.
    pub fn bipartite() -> Self {
        Self {
            left: vec![0],
            right: vec![1],
        }
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn num_subsystems(&self) -> usize {
        self.left.len() + self.right.len()
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.num_subsystems() != n {
            return Err(Error::InvalidCut(format!(
                "cut covers {} subsystems but the state has {n}",
                self.num_subsystems()
            )));
        }
        Ok(())
    }

    fn order(&self) -> Vec<usize> {
        self.left.iter().chain(&self.right).copied().collect()
    }

    pub fn block_dims(&self, dims: &[usize]) -> (usize, usize) {
        (
            self.left.iter().map(|&k| dims[k]).product(),
            self.right.iter().map(|&k| dims[k]).product(),
        )
    }
}

impl fmt::Display for Cut {
    /// 1-based labels, e.g. `1|23`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = |side: &[usize]| side.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{}|{}", label(&self.left), label(&self.right))
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    dims: Vec<usize>,
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(dims: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        let total = validate_dims(&dims)?;
        if matrix.rows() != total || matrix.cols() != total {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for total dimension {total}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let deviation = matrix.hermiticity_deviation();
        if deviation > tol.hermiticity {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > tol.trace || trace.im.abs() > tol.trace {
            return Err(Error::InvalidState(format!("trace {trace} is not 1")));
        }
        let min_eig = hermitian_eig(&matrix)?.eigenvalues[0];
        if min_eig < -tol.psd_floor {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig}")));
        }
        Ok(Self { dims, matrix })
    }

    /// For operators built from valid ones by trace-preserving maps.
    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, matrix: ComplexMatrix) -> Self {
        Self { dims, matrix }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let total = validate_dims(&dims)?;
        let m = ComplexMatrix::identity(total).scale(Complex64::new(1.0 / total as f64, 0.0));
        Ok(Self { dims, matrix: m })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eig(&self.matrix)?.eigenvalues)
    }

    /// `(U₁⊗…⊗Uₙ) ρ (U₁⊗…⊗Uₙ)†` for a full-space unitary `u`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.matrix.rows() || !u.is_square() {
            return Err(Error::DimensionMismatch(
                "unitary does not match the state dimension".into(),
            ));
        }
        let m = u.matmul(&self.matrix).matmul(&u.adjoint());
        Ok(Self::from_parts_unchecked(self.dims.clone(), m))
    }

    pub fn permute_subsystems(&self, order: &[usize]) -> Result<Self> {
        check_permutation(order, self.dims.len())?;
        let new_dims: Vec<usize> = order.iter().map(|&k| self.dims[k]).collect();
        let n = self.matrix.rows();
        let map: Vec<usize> = (0..n)
            .map(|i| {
                let digits = decode_index(i, &self.dims);
                let permuted: Vec<usize> = order.iter().map(|&k| digits[k]).collect();
                encode_index(&permuted, &new_dims)
            })
            .collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(map[i], map[j])] = self.matrix[(i, j)];
            }
        }
        Ok(Self::from_parts_unchecked(new_dims, out))
    }

    /// Groups the operator into two subsystems, left block first.
    pub fn reshape_to_cut(&self, cut: &Cut) -> Result<Self> {
        cut.check(self.dims.len())?;
        let permuted = self.permute_subsystems(&cut.order())?;
        let (dl, dr) = cut.block_dims(&self.dims);
        Ok(Self::from_parts_unchecked(vec![dl, dr], permuted.matrix))
    }
}

/// `|ψ⟩⟨ψ|`.
pub fn density_from_state(psi: &StateVector) -> DensityOperator {
    DensityOperator::from_parts_unchecked(psi.dims.clone(), ComplexMatrix::outer(&psi.amplitudes, &psi.amplitudes))
}

/// Traces out every subsystem not in `keep`; kept subsystems retain their order.
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let n_sub = rho.dims.len();
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&k| k >= n_sub) {
        return Err(Error::SubsystemOutOfRange {
            index: bad,
            count: n_sub,
        });
    }
    if keep.is_empty() || keep.len() == n_sub {
        return Err(Error::InvalidCut(format!(
            "keep set {keep:?} must be a non-empty proper subset of {n_sub} subsystems"
        )));
    }
    let traced: Vec<usize> = (0..n_sub).filter(|k| !keep.contains(k)).collect();
    let kept_dims: Vec<usize> = keep.iter().map(|&k| rho.dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| rho.dims[k]).collect();
    let n = rho.matrix.rows();
    let split: Vec<(usize, usize)> = (0..n)
        .map(|i| {
            let digits = decode_index(i, &rho.dims);
            let kd: Vec<usize> = keep.iter().map(|&k| digits[k]).collect();
            let td: Vec<usize> = traced.iter().map(|&k| digits[k]).collect();
            (encode_index(&kd, &kept_dims), encode_index(&td, &traced_dims))
        })
        .collect();
    let m: usize = kept_dims.iter().product();
    let mut out = ComplexMatrix::zeros(m, m);
    for (i, &(ki, ti)) in split.iter().enumerate() {
        for (j, &(kj, tj)) in split.iter().enumerate() {
            if ti == tj {
                out[(ki, kj)] += rho.matrix[(i, j)];
            }
        }
    }
    Ok(DensityOperator::from_parts_unchecked(kept_dims, out))
}

/// Transposes the indices of one subsystem: `⟨i,j|ρ^{T_B}|k,l⟩ = ⟨i,l|ρ|k,j⟩`.
pub fn partial_transpose(rho: &DensityOperator, subsystem: usize) -> Result<ComplexMatrix> {
    let n_sub = rho.dims.len();
    if subsystem >= n_sub {
        return Err(Error::SubsystemOutOfRange {
            index: subsystem,
            count: n_sub,
        });
    }
    let n = rho.matrix.rows();
    let digits: Vec<Vec<usize>> = (0..n).map(|i| decode_index(i, &rho.dims)).collect();
    let mut out = ComplexMatrix::zeros(n, n);
    let mut di = vec![0; n_sub];
    let mut dj = vec![0; n_sub];
    for i in 0..n {
        for j in 0..n {
            di.copy_from_slice(&digits[i]);
            dj.copy_from_slice(&digits[j]);
            std::mem::swap(&mut di[subsystem], &mut dj[subsystem]);
            out[(encode_index(&di, &rho.dims), encode_index(&dj, &rho.dims))] = rho.matrix[(i, j)];
        }
    }
    Ok(out)
}

fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state: i.i.d. complex Gaussians, normalized.
pub fn haar_random_state(dims: &[usize], seed: u64) -> Result<StateVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_state_from_rng(dims, &mut rng)
}

pub(crate) fn haar_state_from_rng(dims: &[usize], rng: &mut impl Rng) -> Result<StateVector> {
    let total = validate_dims(dims)?;
    let amps = (0..total).map(|_| complex_gaussian(rng)).collect();
    StateVector::normalized(dims.to_vec(), amps)
}

/// How a coefficient of the canonical three-qutrit form is constrained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientKind {
    /// `c_jii = c_iji = c_iij = 0` for `i < j`.
    Zero,
    /// At most one index differs from 2.
    RealNonNegative,
    Complex,
}

/// Classification of `c_ijk` in the canonical three-qutrit form.
pub fn canonical_coefficient_kind(idx: [usize; 3]) -> CoefficientKind {
    let [a, b, c] = idx;
    // one index strictly larger than the other two, which are equal
    let zero = (b == c && a > b) || (a == c && b > a) || (a == b && c > a);
    if zero {
        CoefficientKind::Zero
    } else if idx.iter().filter(|&&k| k != 2).count() <= 1 {
        CoefficientKind::RealNonNegative
    } else {
        CoefficientKind::Complex
    }
}

/// Checks the three structural constraints of the canonical form exactly.
pub fn satisfies_canonical_constraints(psi: &StateVector) -> bool {
    if psi.dims() != [3, 3, 3] {
        return false;
    }
    let coeff = |i: usize, j: usize, k: usize| psi.amplitude(&[i, j, k]);
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let c = coeff(i, j, k);
                match canonical_coefficient_kind([i, j, k]) {
                    CoefficientKind::Zero if c != ZERO => return false,
                    CoefficientKind::RealNonNegative if c.im != 0.0 || c.re < 0.0 => return false,
                    _ => {}
                }
                let lo = i.min(j).min(k);
                if (0..=lo).any(|m| c.norm() > coeff(m, m, m).norm()) {
                    return false;
                }
            }
        }
    }
    true
}

pub fn canonical_qutrit_sample(seed: u64) -> Result<StateVector> {
    canonical_qutrit_sample_with_budget(seed, DEFAULT_REJECTION_BUDGET)
}

/// Samples the canonical three-qutrit form directly.
///
/// Free complex coefficients are standard complex Gaussians, real
/// non-negative ones are half-normal. Draws violating `|c_iii| ≥ |c_jkl|`
/// (for `i ≤ min{j,k,l}`) are discarded and redrawn from the same stream.
pub fn canonical_qutrit_sample_with_budget(seed: u64, budget: usize) -> Result<StateVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = [3usize, 3, 3];
    let mut worst = 0.0f64;
    for _ in 0..budget {
        let mut amps = vec![ZERO; 27];
        for (idx, amp) in amps.iter_mut().enumerate() {
            let d = decode_index(idx, &dims);
            *amp = match canonical_coefficient_kind([d[0], d[1], d[2]]) {
                CoefficientKind::Zero => ZERO,
                CoefficientKind::RealNonNegative => {
                    let x: f64 = rng.sample(StandardNormal);
                    Complex64::new(x.abs(), 0.0)
                }
                CoefficientKind::Complex => complex_gaussian(&mut rng),
            };
        }
        let ordered = (0..27).all(|idx| {
            let d = decode_index(idx, &dims);
            let lo = d[0].min(d[1]).min(d[2]);
            (0..=lo).all(|m| amps[idx].norm() <= amps[encode_index(&[m, m, m], &dims)].norm())
        });
        if ordered {
            let psi = StateVector::normalized(dims.to_vec(), amps)?;
            debug_assert!(satisfies_canonical_constraints(&psi));
            return Ok(psi);
        }
        let largest = amps.iter().map(|z| z.norm()).fold(0.0, f64::max);
        worst = worst.max(largest / amps[0].norm().max(f64::MIN_POSITIVE));
    }
    Err(Error::RejectionBudget {
        attempts: budget,
        detail: format!("seed {seed}; worst max|c|/|c_000| ratio seen {worst:.3}"),
    })
}

/// Named three-qutrit states used in monogamy checks, plus a few references.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NamedState {
    /// Totally antisymmetric three-qutrit state.
    Ou,
    Ks,
    /// `√p |Ou⟩ + √(1−p) |000⟩`.
    OuP,
    /// `√p |KS⟩ + √(1−p) |222⟩`.
    KsP,
    /// Two-qudit `(1/√d) Σ_k |kk⟩`.
    MaxEnt(usize),
    /// `(|000⟩ + |111⟩ + |222⟩)/√3`.
    Ghz3,
    /// `|000⟩` on three qutrits.
    Product,
}

impl NamedState {
    pub fn takes_parameter(self) -> bool {
        matches!(self, NamedState::OuP | NamedState::KsP)
    }
}

impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let parsed = match lower.as_str() {
            "ou" => NamedState::Ou,
            "ks" => NamedState::Ks,
            "ou_p" | "oup" => NamedState::OuP,
            "ks_p" | "ksp" => NamedState::KsP,
            "ghz3" | "ghz" => NamedState::Ghz3,
            "product" => NamedState::Product,
            "maxent" => NamedState::MaxEnt(3),
            other => {
                let d = other
                    .strip_prefix("maxent")
                    .map(|rest| rest.trim_start_matches('(').trim_end_matches(')'))
                    .and_then(|rest| rest.parse::<usize>().ok());
                match d {
                    Some(d) => NamedState::MaxEnt(d),
                    None => return Err(Error::UnknownState(s.to_string())),
                }
            }
        };
        Ok(parsed)
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedState::Ou => write!(f, "Ou"),
            NamedState::Ks => write!(f, "KS"),
            NamedState::OuP => write!(f, "Ou_p"),
            NamedState::KsP => write!(f, "KS_p"),
            NamedState::MaxEnt(d) => write!(f, "MaxEnt({d})"),
            NamedState::Ghz3 => write!(f, "GHZ3"),
            NamedState::Product => write!(f, "Product"),
        }
    }
}

fn qutrit_terms(terms: &[(f64, [usize; 3])]) -> Vec<Complex64> {
    let mut amps = vec![ZERO; 27];
    for &(c, idx) in terms {
        amps[encode_index(&idx, &[3, 3, 3])] += Complex64::new(c, 0.0);
    }
    amps
}

fn ou_amplitudes() -> Vec<Complex64> {
    let s = 1.0 / 6f64.sqrt();
    qutrit_terms(&[
        (s, [0, 1, 2]),
        (-s, [0, 2, 1]),
        (s, [1, 2, 0]),
        (-s, [1, 0, 2]),
        (s, [2, 0, 1]),
        (-s, [2, 1, 0]),
    ])
}

fn ks_amplitudes() -> Vec<Complex64> {
    let s = 1.0 / 6f64.sqrt();
    qutrit_terms(&[
        (SQRT_2 * s, [0, 1, 0]),
        (SQRT_2 * s, [1, 0, 1]),
        (s, [2, 0, 0]),
        (s, [2, 1, 1]),
    ])
}

fn superpose(base: Vec<Complex64>, extra: [usize; 3], p: f64) -> Vec<Complex64> {
    let a = p.sqrt();
    let b = clamped_sqrt(1.0 - p);
    let mut amps: Vec<Complex64> = base.into_iter().map(|z| z * a).collect();
    amps[encode_index(&extra, &[3, 3, 3])] += Complex64::new(b, 0.0);
    amps
}

/// Builds a named state; `p` is required for the one-parameter families and ignored otherwise.
pub fn named_state(name: NamedState, p: Option<f64>) -> Result<StateVector> {
    let param = || -> Result<f64> {
        let p = p.ok_or_else(|| Error::OutOfRange(format!("{name} needs a parameter p")))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange(format!("p = {p} is outside [0, 1]")));
        }
        Ok(p)
    };
    let qutrits = vec![3, 3, 3];
    match name {
        NamedState::Ou => StateVector::normalized(qutrits, ou_amplitudes()),
        NamedState::Ks => StateVector::normalized(qutrits, ks_amplitudes()),
        NamedState::OuP => StateVector::normalized(qutrits, superpose(ou_amplitudes(), [0, 0, 0], param()?)),
        NamedState::KsP => StateVector::normalized(qutrits, superpose(ks_amplitudes(), [2, 2, 2], param()?)),
        NamedState::MaxEnt(d) => max_entangled(d),
        NamedState::Ghz3 => ghz_state(3, 3),
        NamedState::Product => StateVector::basis(qutrits, &[0, 0, 0]),
    }
}

pub fn max_entangled(d: usize) -> Result<StateVector> {
    if d < 2 {
        return Err(Error::OutOfRange(format!("local dimension {d} is below 2")));
    }
    let mut amps = vec![ZERO; d * d];
    for k in 0..d {
        amps[k * d + k] = ONE;
    }
    StateVector::normalized(vec![d, d], amps)
}

/// `(1/√d) Σ_k |k…k⟩` on `parties` qudits.
pub fn ghz_state(parties: usize, d: usize) -> Result<StateVector> {
    let dims = vec![d; parties];
    let total = validate_dims(&dims)?;
    let mut amps = vec![ZERO; total];
    for k in 0..d {
        amps[encode_index(&vec![k; parties], &dims)] = ONE;
    }
    StateVector::normalized(dims, amps)
}

/// Qubit W state `(|10…0⟩ + |01…0⟩ + … + |0…01⟩)/√n`.
pub fn w_state(parties: usize) -> Result<StateVector> {
    let dims = vec![2; parties];
    let total = validate_dims(&dims)?;
    let mut amps = vec![ZERO; total];
    for k in 0..parties {
        amps[1 << (parties - 1 - k)] = ONE;
    }
    StateVector::normalized(dims, amps)
}

/// Mixture of `rank` Haar-random pure states with flat-Dirichlet weights.
pub fn random_mixed(dims: &[usize], rank: usize, seed: u64) -> Result<DensityOperator> {
    let total = validate_dims(dims)?;
    if rank == 0 || rank > total {
        return Err(Error::OutOfRange(format!("rank {rank} must lie in 1..={total}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..rank).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let sum: f64 = raw.iter().sum();
    let mut m = ComplexMatrix::zeros(total, total);
    for w in raw {
        let phi = haar_state_from_rng(dims, &mut rng)?;
        let term = ComplexMatrix::outer(phi.amplitudes(), phi.amplitudes()).scale(Complex64::new(w / sum, 0.0));
        m = &m + &term;
    }
    Ok(DensityOperator::from_parts_unchecked(dims.to_vec(), m))
}

/// Generalized Pauli operator `W_mn = Σ_k ω^{kn} |k+m mod d⟩⟨k|`, `ω = e^{2πi/d}`.
pub fn weyl_operator(d: usize, m: usize, n: usize) -> Result<ComplexMatrix> {
    if d < 2 {
        return Err(Error::OutOfRange(format!("dimension {d} is below 2")));
    }
    if m >= d || n >= d {
        return Err(Error::OutOfRange(format!("Weyl indices ({m}, {n}) must be below {d}")));
    }
    let mut w = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        let phase = 2.0 * PI * ((k * n) % d) as f64 / d as f64;
        w[((k + m) % d, k)] = Complex64::from_polar(1.0, phase);
    }
    Ok(w)
}
