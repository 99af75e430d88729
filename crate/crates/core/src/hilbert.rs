//! State representation on truncated Fock and qubit spaces.
//!
//! `CavityState` holds a density matrix on Fock levels `0..=n_trunc`,
//! `AtomState` a qubit state parameterized by its ground occupation `q` and
//! coherence `r = <g|χ|e>`, and `JointState` a density matrix on the tensor
//! product cavity ⊗ atom. The basis ordering of the joint space is fixed as
//! cavity-major with atom basis (g, e): index = 2·n + a, a ∈ {0 = g, 1 = e}.
//!
//! All values are immutable after construction and safe to share across
//! parallel workers.

use ndarray::Array2;
use num_complex::Complex;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::scalar::{cr, Real};

/// Default bound on the neglected coherent-state tail mass.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
/// Hermiticity tolerance for state validation.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Unit-trace tolerance for state validation.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalue floor for positive semidefiniteness of validated states.
pub const PSD_FLOOR: f64 = 1e-10;
/// Positivity slack for the (q, r) atom parameterization.
pub const ATOM_POSITIVITY_TOL: f64 = 1e-12;

fn validate_density<T: Real>(m: &CMatrix<T>, what: &str) -> Result<()> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::InvalidState(format!("{what}: matrix is {n}x{} (not square)", m.ncols())));
    }
    let herm_tol = T::tol(HERMITICITY_TOL);
    for i in 0..n {
        for j in i..n {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > herm_tol {
                return Err(Error::InvalidState(format!("{what}: not Hermitian at ({i}, {j})")));
            }
        }
    }
    let tr = linalg::trace(m);
    if (tr.re - T::one()).abs() > T::tol(TRACE_TOL) || tr.im.abs() > T::tol(TRACE_TOL) {
        return Err(Error::InvalidState(format!("{what}: trace = {} + {}i, expected 1", tr.re, tr.im)));
    }
    let eigs = linalg::hermitian_eigenvalues(m);
    let floor = eigs.iter().copied().fold(T::infinity(), T::min);
    if floor < -T::tol(PSD_FLOOR) {
        return Err(Error::InvalidState(format!("{what}: eigenvalue floor {floor}")));
    }
    Ok(())
}

/// Cavity density matrix on Fock levels `0..=n_trunc`.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityState<T: Real> {
    matrix: CMatrix<T>,
}

impl<T: Real> CavityState<T> {
    /// Validating constructor: Hermitian, unit trace, PSD.
    pub fn from_matrix(matrix: CMatrix<T>) -> Result<Self> {
        validate_density(&matrix, "cavity state")?;
        Ok(Self { matrix })
    }

    /// Constructor for matrices whose validity is guaranteed by the caller's
    /// algebra (e.g. unitary conjugation of a valid state).
    pub(crate) fn from_matrix_trusted(matrix: CMatrix<T>) -> Self {
        debug_assert!(validate_density(&matrix, "cavity state (trusted)").is_ok());
        Self { matrix }
    }

    /// Number of Fock levels (`n_trunc + 1`).
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Highest retained Fock level.
    pub fn n_trunc(&self) -> usize {
        self.dim() - 1
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    /// Entry p_{n,m}; zero outside the stored range.
    pub fn p(&self, n: usize, m: usize) -> Complex<T> {
        if n < self.dim() && m < self.dim() {
            self.matrix[(n, m)]
        } else {
            Complex::zero()
        }
    }

    /// Diagonal occupations p_n.
    pub fn populations(&self) -> Vec<T> {
        self.matrix.diag().iter().map(|z| z.re).collect()
    }

    /// Photon-number moment Σ n^k p_n.
    pub fn number_moment(&self, k: u32) -> T {
        self.populations()
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (n, &p)| acc + T::of((n as f64).powi(k as i32)) * p)
    }

    /// Tr ρ².
    pub fn purity(&self) -> T {
        self.matrix.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    /// Zero-padded copy on `dim` Fock levels.
    pub fn embedded(&self, dim: usize) -> CMatrix<T> {
        assert!(dim >= self.dim(), "embedding cannot shrink the space");
        let mut out = Array2::zeros((dim, dim));
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                out[(i, j)] = self.matrix[(i, j)];
            }
        }
        out
    }
}

/// Atom (qubit) state `q |g><g| + r |g><e| + r* |e><g| + (1-q) |e><e|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomState<T: Real> {
    q: T,
    r: Complex<T>,
}

impl<T: Real> AtomState<T> {
    /// Validating constructor: `q ∈ [0, 1]` and `q(1-q) ≥ |r|²` within
    /// tolerance.
    pub fn new(q: T, r: Complex<T>) -> Result<Self> {
        let slack = T::tol(ATOM_POSITIVITY_TOL);
        if q < -slack || q > T::one() + slack {
            return Err(Error::InvalidState(format!("atom state: q = {q} outside [0, 1]")));
        }
        if q * (T::one() - q) - r.norm_sqr() < -slack {
            return Err(Error::InvalidState(format!(
                "atom state: positivity violated, q(1-q) - |r|^2 = {}",
                q * (T::one() - q) - r.norm_sqr()
            )));
        }
        Ok(Self { q, r })
    }

    pub fn ground() -> Self {
        Self { q: T::one(), r: Complex::zero() }
    }

    pub fn excited() -> Self {
        Self { q: T::zero(), r: Complex::zero() }
    }

    pub fn maximally_mixed() -> Self {
        Self { q: T::of(0.5), r: Complex::zero() }
    }

    /// Unvalidated constructor for marginals that may sit a hair outside the
    /// Bloch ball from round-off; distances and residuals still make sense.
    pub(crate) fn from_raw(q: T, r: Complex<T>) -> Self {
        Self { q, r }
    }

    /// Ground-state occupation.
    pub fn q(&self) -> T {
        self.q
    }

    /// Coherence `<g|χ|e>`.
    pub fn r(&self) -> Complex<T> {
        self.r
    }

    /// 2×2 density matrix in the (g, e) basis.
    pub fn matrix(&self) -> CMatrix<T> {
        let mut m = Array2::zeros((2, 2));
        m[(0, 0)] = cr(self.q);
        m[(0, 1)] = self.r;
        m[(1, 0)] = self.r.conj();
        m[(1, 1)] = cr(T::one() - self.q);
        m
    }

    /// Read (q, r) off a validated 2×2 density matrix.
    pub fn from_matrix(m: &CMatrix<T>) -> Result<Self> {
        if m.nrows() != 2 || m.ncols() != 2 {
            return Err(Error::DimensionMismatch { left: m.nrows(), right: 2 });
        }
        validate_density(m, "atom state")?;
        Self::new(m[(0, 0)].re, m[(0, 1)])
    }

    /// Tr χ².
    pub fn purity(&self) -> T {
        self.q * self.q + (T::one() - self.q) * (T::one() - self.q)
            + T::of(2.0) * self.r.norm_sqr()
    }

    /// Trace distance ‖χ − χ'‖₁ = 2 √(Δq² + |Δr|²) in closed form.
    pub fn trace_distance_to(&self, other: &Self) -> T {
        let dq = self.q - other.q;
        let dr = self.r - other.r;
        T::of(2.0) * (dq * dq + dr.norm_sqr()).sqrt()
    }
}

/// Joint density matrix on cavity ⊗ atom, cavity-major ordering with atom
/// basis (g, e).
#[derive(Debug, Clone, PartialEq)]
pub struct JointState<T: Real> {
    cavity_dim: usize,
    matrix: CMatrix<T>,
}

impl<T: Real> JointState<T> {
    pub fn from_matrix(cavity_dim: usize, matrix: CMatrix<T>) -> Result<Self> {
        if matrix.nrows() != 2 * cavity_dim {
            return Err(Error::DimensionMismatch { left: matrix.nrows(), right: 2 * cavity_dim });
        }
        validate_density(&matrix, "joint state")?;
        Ok(Self { cavity_dim, matrix })
    }

    pub(crate) fn from_matrix_trusted(cavity_dim: usize, matrix: CMatrix<T>) -> Self {
        debug_assert_eq!(matrix.nrows(), 2 * cavity_dim);
        Self { cavity_dim, matrix }
    }

    pub fn cavity_dim(&self) -> usize {
        self.cavity_dim
    }

    /// Total dimension 2 · cavity_dim.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    /// Expectation of the total excitation number n_S + n_C.
    pub fn total_excitation(&self) -> T {
        let mut acc = T::zero();
        for n in 0..self.cavity_dim {
            for a in 0..2 {
                let weight = T::of(n as f64 + a as f64);
                acc = acc + weight * self.matrix[(2 * n + a, 2 * n + a)].re;
            }
        }
        acc
    }
}

/// Truncated and renormalized coherent state |α><α| with the default tail
/// tolerance.
pub fn coherent_state<T: Real>(alpha: Complex<T>, n_trunc: usize) -> Result<CavityState<T>> {
    coherent_state_with_tail_tol(alpha, n_trunc, T::tol(DEFAULT_TAIL_TOL))
}

/// Truncated and renormalized coherent state with an explicit bound on the
/// neglected tail mass e^{-|α|²} Σ_{n>n_trunc} |α|^{2n}/n!.
pub fn coherent_state_with_tail_tol<T: Real>(
    alpha: Complex<T>,
    n_trunc: usize,
    tail_tol: T,
) -> Result<CavityState<T>> {
    if n_trunc < 1 {
        return Err(Error::InvalidParams("coherent state needs n_trunc >= 1".into()));
    }
    let amps = coherent_amplitudes(alpha, n_trunc);
    let kept: T = amps.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
    let tail = (T::one() - kept).max(T::zero());
    if tail > tail_tol {
        return Err(Error::TruncationTooSmall { tail: tail.to_f64_lossy(), tol: tail_tol.to_f64_lossy() });
    }
    let dim = n_trunc + 1;
    let norm = cr(kept.sqrt());
    let mut m = Array2::zeros((dim, dim));
    for n in 0..dim {
        for k in 0..dim {
            m[(n, k)] = (amps[n] / norm) * (amps[k] / norm).conj();
        }
    }
    Ok(CavityState::from_matrix_trusted(m))
}

/// Fock amplitudes of |α> up to `n_trunc`, computed by the stable recurrence
/// c_{n+1} = c_n α / √(n+1) (safe for large |α| where α^n/√n! overflows).
pub fn coherent_amplitudes<T: Real>(alpha: Complex<T>, n_trunc: usize) -> Vec<Complex<T>> {
    let mut amps = Vec::with_capacity(n_trunc + 1);
    let mut c = cr((-alpha.norm_sqr() / T::of(2.0)).exp());
    amps.push(c);
    for n in 0..n_trunc {
        c = c * alpha / cr(T::of(n as f64 + 1.0).sqrt());
        amps.push(c);
    }
    amps
}

/// Smallest n_trunc whose coherent tail mass is at or below `tol`.
pub fn min_n_trunc_for_tail<T: Real>(alpha_abs: T, tol: T) -> usize {
    let lambda = alpha_abs * alpha_abs;
    let mut term = (-lambda).exp();
    let mut kept = term;
    let mut n = 0usize;
    while T::one() - kept > tol && n < 100_000 {
        n += 1;
        term = term * lambda / T::of(n as f64);
        kept = kept + term;
    }
    n.max(1)
}

/// Fock state |n><n| on levels `0..=n_trunc`.
pub fn fock_state<T: Real>(n: usize, n_trunc: usize) -> Result<CavityState<T>> {
    if n > n_trunc {
        return Err(Error::IndexOutOfRange { index: n, n_trunc });
    }
    let mut m = Array2::zeros((n_trunc + 1, n_trunc + 1));
    m[(n, n)] = Complex::one();
    Ok(CavityState::from_matrix_trusted(m))
}

/// Kronecker product ρ ⊗ χ in the crate's cavity-major ordering.
pub fn tensor<T: Real>(cavity: &CavityState<T>, atom: &AtomState<T>) -> JointState<T> {
    let joint = linalg::kron(cavity.matrix(), &atom.matrix());
    JointState::from_matrix_trusted(cavity.dim(), joint)
}

/// Reduced cavity state Tr_C.
pub fn partial_trace_cavity<T: Real>(joint: &JointState<T>) -> CavityState<T> {
    let d = joint.cavity_dim();
    let m = joint.matrix();
    let out = Array2::from_shape_fn((d, d), |(n, k)| m[(2 * n, 2 * k)] + m[(2 * n + 1, 2 * k + 1)]);
    CavityState::from_matrix_trusted(out)
}

/// Reduced atom state Tr_S.
pub fn partial_trace_atom<T: Real>(joint: &JointState<T>) -> AtomState<T> {
    let d = joint.cavity_dim();
    let m = joint.matrix();
    let mut q = T::zero();
    let mut r = Complex::zero();
    for n in 0..d {
        q = q + m[(2 * n, 2 * n)].re;
        r = r + m[(2 * n, 2 * n + 1)];
    }
    AtomState { q, r }
}

/// Trace distance ‖a − b‖₁ (sum of singular values of the difference).
pub fn trace_distance<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.nrows(), right: b.nrows() });
    }
    let diff = a - b;
    let eigs = linalg::hermitian_eigenvalues(&diff);
    Ok(eigs.iter().fold(T::zero(), |acc, &x| acc + x.abs()))
}

/// Uhlmann fidelity F(a, b) = (Tr √(√a b √a))², in [0, 1].
///
/// Evaluated as ‖√a √b‖₁² from clipped root factors, which keeps the result
/// accurate to ~machine precision even when one argument is (near-)singular.
pub fn uhlmann_fidelity<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.nrows(), right: b.nrows() });
    }
    let fa = psd_root_factor(a)?;
    let fb = psd_root_factor(b)?;
    Ok(fidelity_from_root_factors(&fa, &fb))
}

/// Root factor F of a PSD matrix m = F F†: eigenvector columns scaled by
/// √eigenvalue, with eigenvalues below dim·eps·λmax dropped.
pub fn psd_root_factor<T: Real>(m: &CMatrix<T>) -> Result<CMatrix<T>> {
    let n = m.nrows();
    let (vals, vecs) = linalg::hermitian_eigen(m);
    let floor = vals.iter().copied().fold(T::infinity(), T::min);
    if floor < -T::tol(PSD_FLOOR) {
        return Err(Error::NonPsdInput { floor: floor.to_f64_lossy() });
    }
    let top = vals.iter().copied().fold(T::zero(), T::max);
    let clip = T::of(n as f64) * T::epsilon() * top;
    let kept: Vec<usize> = (0..n).filter(|&k| vals[k] > clip).collect();
    let mut f = Array2::zeros((n, kept.len()));
    for (col, &k) in kept.iter().enumerate() {
        let s = cr(vals[k].sqrt());
        for i in 0..n {
            f[(i, col)] = vecs[(i, k)] * s;
        }
    }
    Ok(f)
}

/// Fidelity ‖Fa† Fb‖₁² from root factors a = Fa Fa†, b = Fb Fb†.
///
/// Callers with structured states (e.g. tensor products, whose root factor
/// is the Kronecker product of the factors' root factors) can supply the
/// factors directly instead of paying for a full eigendecomposition.
pub fn fidelity_from_root_factors<T: Real>(fa: &CMatrix<T>, fb: &CMatrix<T>) -> T {
    let overlap = linalg::dagger(fa).dot(fb);
    let root_sum = linalg::nuclear_norm(&overlap);
    (root_sum * root_sum).min(T::one())
}

/// Random density matrix of the given dimension (Ginibre ensemble G G†/Tr).
///
/// Deterministic given the RNG stream; used for reproducible randomized
/// checks and scans.
pub fn random_density_matrix<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CavityState<T> {
    let g: CMatrix<T> = Array2::from_shape_fn((dim, dim), |_| {
        Complex::new(standard_normal(rng), standard_normal(rng))
    });
    let mut m = g.dot(&linalg::dagger(&g));
    let tr = linalg::trace(&m).re;
    m = linalg::scale(&m, cr(T::one() / tr));
    CavityState::from_matrix_trusted(linalg::hermitize(&m))
}

/// Random atom state drawn uniformly from the Bloch ball.
pub fn random_atom_state<T: Real, R: Rng + ?Sized>(rng: &mut R) -> AtomState<T> {
    loop {
        let x: f64 = rng.gen_range(-1.0..1.0);
        let y: f64 = rng.gen_range(-1.0..1.0);
        let z: f64 = rng.gen_range(-1.0..1.0);
        if x * x + y * y + z * z <= 1.0 {
            let q = T::of(0.5 * (1.0 + z));
            let r = Complex::new(T::of(0.5 * x), T::of(-0.5 * y));
            return AtomState { q, r };
        }
    }
}

fn standard_normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    // Box-Muller on the unit square
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    T::of((-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos())
}
