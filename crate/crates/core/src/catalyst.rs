//! Solving the catalytic constraint.
//!
//! An atom state χ is catalytic for a joint channel 𝓔 (unitary conjugation
//! or Lindblad propagation) when Tr_S[𝓔(ρ ⊗ χ)] = χ. Two routes are
//! implemented and cross-checked against each other:
//!
//! - the closed-form solution for closed JC dynamics: the constraint is
//!   affine in (q, r), with coefficients given by four auxiliary sums over
//!   the cavity matrix elements;
//! - the fixed point of the effective atom channel χ → Tr_S[𝓔(ρ ⊗ χ)],
//!   which exists for every channel (quantum Perron-Frobenius) and also
//!   covers dissipative dynamics and degenerate interaction times.
//!
//! The fixed point is computed from the channel's Pauli transfer matrix as
//! the minimum-norm solution of the affine fixed-point system in Bloch
//! coordinates. For a qubit, the von Neumann entropy is strictly decreasing
//! in the Bloch radius, so the minimum-norm point is exactly the
//! maximum-entropy fixed point; this makes the tie-break on degenerate fixed
//! spaces (e.g. the identity channel) deterministic and basis-independent.

use ndarray::Array2;
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hilbert::{AtomState, CavityState};
use crate::jc_core::{jc_propagator_with_dim, Propagator, RabiTable, SimulationParams};
use crate::linalg::{self, CMatrix};
use crate::scalar::{cr, Real};

/// Relative threshold below which a solver denominator counts as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-9;

/// The four auxiliary sums entering the coherence equation of the catalytic
/// constraint. At t = 0 all four vanish (degenerate time).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxFunctions<T: Real> {
    pub a1: Complex<T>,
    pub a2: Complex<T>,
    pub a3: Complex<T>,
    pub a4: Complex<T>,
}

/// Evaluate the auxiliary sums for a cavity state at interaction time `t`.
pub fn aux_functions<T: Real>(
    cavity: &CavityState<T>,
    params: &SimulationParams<T>,
    t: T,
) -> AuxFunctions<T> {
    let d_in = cavity.dim();
    let rabi = RabiTable::new(params.g, t, d_in + 1);
    let pops = cavity.populations();
    let mut a_sum = T::zero();
    let mut b_sum: Complex<T> = Complex::zero();
    let mut c_sum: Complex<T> = Complex::zero();
    let mut d_sum: Complex<T> = Complex::zero();
    for n in 0..d_in {
        a_sum = a_sum + pops[n] * rabi.c_down[n] * rabi.c[n];
        b_sum = b_sum + cavity.p(n, n + 2) * cr(rabi.s[n] * rabi.s[n + 1]);
        c_sum = c_sum + cavity.p(n, n + 1) * cr(rabi.s[n] * (rabi.c_down[n] + rabi.c[n + 1]));
        d_sum = d_sum + cavity.p(n, n + 1) * cr(rabi.s[n] * rabi.c[n + 1]);
    }
    let arg = params.omega * t;
    let e_iwt = Complex::new(arg.cos(), arg.sin());
    let i_unit = Complex::new(T::zero(), T::one());
    AuxFunctions {
        a1: e_iwt * cr(a_sum) - Complex::one(),
        a2: i_unit * e_iwt * c_sum,
        a3: e_iwt * b_sum,
        a4: -i_unit * e_iwt * d_sum,
    }
}

/// Outcome of the closed-form catalyst solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CatalystSolution<T: Real> {
    /// A valid atom state satisfying the catalytic constraint.
    Feasible(AtomState<T>),
    /// The unique algebraic solution violates positivity; the raw
    /// coefficients are kept for scan bookkeeping.
    Infeasible { q: T, r: Complex<T> },
}

impl<T: Real> CatalystSolution<T> {
    pub fn feasible(&self) -> Option<AtomState<T>> {
        match self {
            Self::Feasible(atom) => Some(*atom),
            Self::Infeasible { .. } => None,
        }
    }

    /// Raw (q, r) coefficients regardless of feasibility.
    pub fn coefficients(&self) -> (T, Complex<T>) {
        match self {
            Self::Feasible(atom) => (atom.q(), atom.r()),
            Self::Infeasible { q, r } => (*q, *r),
        }
    }
}

/// Closed-form solution of the catalytic constraint for closed JC dynamics.
///
/// The coherence equation r·a₁ + q·a₂ + r*·a₃ + a₄ = 0 is solved for r as an
/// affine function of q, which turns the population equation into a scalar
/// linear equation for q. Returns `DegenerateTime` when either denominator
/// is below threshold; callers should then fall back to [`fixed_point`].
pub fn solve_catalyst_analytic<T: Real>(
    cavity: &CavityState<T>,
    params: &SimulationParams<T>,
    tau: T,
) -> Result<CatalystSolution<T>> {
    let aux = aux_functions(cavity, params, tau);
    let det = aux.a1.norm_sqr() - aux.a3.norm_sqr();
    let det_scale = T::one().max(aux.a1.norm_sqr() + aux.a3.norm_sqr());
    if det.abs() <= T::tol(DEGENERACY_THRESHOLD) * det_scale {
        return Err(Error::DegenerateTime { denominator: det.to_f64_lossy() });
    }
    // r = u + v q
    let u = (aux.a3 * aux.a4.conj() - aux.a1.conj() * aux.a4) / cr(det);
    let v = (aux.a3 * aux.a2.conj() - aux.a1.conj() * aux.a2) / cr(det);

    let d_in = cavity.dim();
    let rabi = RabiTable::new(params.g, tau, d_in);
    let pops = cavity.populations();
    let mut s2_weighted = T::zero();
    let mut big_q = T::zero();
    for n in 0..d_in {
        let s2 = rabi.s[n] * rabi.s[n];
        s2_weighted = s2_weighted + pops[n] * s2;
        let p_next = if n + 1 < d_in { pops[n + 1] } else { T::zero() };
        big_q = big_q + (pops[n] + p_next) * s2;
    }
    // population coupling L[z] = -Σ 2 Im[z p_{n+1,n}] s_n c_n
    let coupling = |z: Complex<T>| -> T {
        let mut acc = T::zero();
        for n in 0..d_in.saturating_sub(1) {
            acc = acc - T::of(2.0) * (z * cavity.p(n + 1, n)).im * rabi.s[n] * rabi.c[n];
        }
        acc
    };
    let denom = big_q - coupling(v);
    if denom.abs() <= T::tol(DEGENERACY_THRESHOLD) * T::one().max(big_q) {
        return Err(Error::DegenerateTime { denominator: denom.to_f64_lossy() });
    }
    let q = (s2_weighted + coupling(u)) / denom;
    let r = u + v * cr(q);
    Ok(classify(q, r))
}

/// Catalyst ground occupation for a Fock-diagonal cavity state, where the
/// coherence equation forces r = 0 and q has a two-sum closed form.
pub fn solve_catalyst_incoherent<T: Real>(populations: &[T], g: T, tau: T) -> Result<T> {
    let mut numer = T::zero();
    let mut denom = T::zero();
    for (n, &p) in populations.iter().enumerate() {
        let s = (g * tau * T::of(n as f64 + 1.0).sqrt()).sin();
        let s2 = s * s;
        let p_next = populations.get(n + 1).copied().unwrap_or_else(T::zero);
        numer = numer + p * s2;
        denom = denom + (p + p_next) * s2;
    }
    if denom.abs() <= T::tol(DEGENERACY_THRESHOLD) {
        return Err(Error::DegenerateTime { denominator: denom.to_f64_lossy() });
    }
    Ok(numer / denom)
}

fn classify<T: Real>(q: T, r: Complex<T>) -> CatalystSolution<T> {
    match AtomState::new(q, r) {
        Ok(atom) => CatalystSolution::Feasible(atom),
        Err(_) => CatalystSolution::Infeasible { q, r },
    }
}

/// A linear, trace-preserving map on the joint cavity ⊗ atom space.
pub trait JointChannel<T: Real> {
    fn cavity_dim(&self) -> usize;

    /// Linear action on an arbitrary joint-space operator (no state
    /// validation, no trace or Hermiticity repair).
    fn apply_matrix(&self, m: &CMatrix<T>) -> CMatrix<T>;
}

impl<T: Real> JointChannel<T> for Propagator<T> {
    fn cavity_dim(&self) -> usize {
        self.cavity_dim()
    }

    fn apply_matrix(&self, m: &CMatrix<T>) -> CMatrix<T> {
        self.matrix().dot(m).dot(&linalg::dagger(self.matrix()))
    }
}

/// Effective channel on the atom induced by a fixed cavity state and a
/// joint channel: χ → Tr_S[𝓔(ρ ⊗ χ)], stored as a 4×4 superoperator on
/// column-vectorized 2×2 operators.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannel<T: Real> {
    matrix: CMatrix<T>,
}

impl<T: Real> EffectiveChannel<T> {
    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    /// Apply to an arbitrary 2×2 operator.
    pub fn apply_matrix(&self, m: &CMatrix<T>) -> CMatrix<T> {
        let v = linalg::vec_col(m);
        let out = self.matrix.dot(&v);
        linalg::unvec_col(&out, 2)
    }

    /// Apply to an atom state; the output is renormalized in trace only
    /// (CPTP channels preserve it up to round-off).
    pub fn apply(&self, atom: &AtomState<T>) -> Result<AtomState<T>> {
        let out = self.apply_matrix(&atom.matrix());
        AtomState::new(out[(0, 0)].re, (out[(0, 1)] + out[(1, 0)].conj()) / cr(T::of(2.0)))
    }

    /// Choi matrix Σ_ab |a><b| ⊗ 𝓜(|a><b|); PSD iff the channel is CP.
    pub fn choi(&self) -> CMatrix<T> {
        let mut c: CMatrix<T> = Array2::zeros((4, 4));
        for a in 0..2 {
            for b in 0..2 {
                let mut basis: CMatrix<T> = Array2::zeros((2, 2));
                basis[(a, b)] = Complex::one();
                let image = self.apply_matrix(&basis);
                for i in 0..2 {
                    for j in 0..2 {
                        c[(2 * a + i, 2 * b + j)] = c[(2 * a + i, 2 * b + j)] + image[(i, j)];
                    }
                }
            }
        }
        c
    }

    /// Deviation of the adjoint map from sending identity to identity.
    pub fn trace_preservation_defect(&self) -> T {
        // column sums of the (0,0)+(1,1) rows of the superoperator
        let mut defect = T::zero();
        for col in 0..4 {
            let sum = self.matrix[(0, col)] + self.matrix[(3, col)];
            let expected = if col == 0 || col == 3 { Complex::one() } else { Complex::zero() };
            defect = defect.max((sum - expected).norm());
        }
        defect
    }
}

/// Assemble the effective atom channel by pushing the four 2×2 basis
/// operators through the joint channel and tracing out the cavity.
pub fn effective_atom_channel<T: Real>(
    cavity: &CavityState<T>,
    channel: &impl JointChannel<T>,
) -> Result<EffectiveChannel<T>> {
    let d = channel.cavity_dim();
    if cavity.dim() > d {
        return Err(Error::DimensionMismatch { left: cavity.dim(), right: d });
    }
    let rho = cavity.embedded(d);
    let mut m: CMatrix<T> = Array2::zeros((4, 4));
    for a in 0..2 {
        for b in 0..2 {
            let mut basis: CMatrix<T> = Array2::zeros((2, 2));
            basis[(a, b)] = Complex::one();
            let joint_in = linalg::kron(&rho, &basis);
            let joint_out = channel.apply_matrix(&joint_in);
            let reduced = trace_out_cavity_matrix(&joint_out, d);
            let col = a + 2 * b;
            for i in 0..2 {
                for j in 0..2 {
                    m[(i + 2 * j, col)] = reduced[(i, j)];
                }
            }
        }
    }
    Ok(EffectiveChannel { matrix: m })
}

/// Partial trace over the cavity of a raw joint-space matrix.
pub(crate) fn trace_out_cavity_matrix<T: Real>(m: &CMatrix<T>, cavity_dim: usize) -> CMatrix<T> {
    let mut out: CMatrix<T> = Array2::zeros((2, 2));
    for a in 0..2 {
        for b in 0..2 {
            let mut acc: Complex<T> = Complex::zero();
            for n in 0..cavity_dim {
                acc = acc + m[(2 * n + a, 2 * n + b)];
            }
            out[(a, b)] = acc;
        }
    }
    out
}

/// Fixed point of the effective atom channel.
///
/// In Bloch coordinates χ = (1 + b·σ)/2 the fixed-point condition reads
/// (I − R) b = c with (R | c) read off the channel's Pauli transfer matrix.
/// The minimum-norm solution of that affine system is returned; it is PSD
/// whenever any PSD fixed point exists, and on degenerate fixed spaces it is
/// the unique maximum-entropy fixed point.
pub fn fixed_point<T: Real>(channel: &EffectiveChannel<T>) -> Result<AtomState<T>> {
    let paulis = pauli_basis::<T>();
    // transfer[i][j] = Tr[σ_i 𝓜(σ_j)] / 2
    let mut transfer = [[T::zero(); 4]; 4];
    for j in 0..4 {
        let image = channel.apply_matrix(&paulis[j]);
        for i in 0..4 {
            let mut tr: Complex<T> = Complex::zero();
            for row in 0..2 {
                for k in 0..2 {
                    tr = tr + paulis[i][(row, k)] * image[(k, row)];
                }
            }
            transfer[i][j] = tr.re / T::of(2.0);
        }
    }
    // (I - R) b = c
    let mut a = [[T::zero(); 3]; 3];
    let mut c = [T::zero(); 3];
    for i in 0..3 {
        c[i] = transfer[i + 1][0];
        for j in 0..3 {
            a[i][j] = -transfer[i + 1][j + 1];
            if i == j {
                a[i][j] = a[i][j] + T::one();
            }
        }
    }
    let b = min_norm_solve3(&a, &c);
    // consistency of the affine system
    let mut residual = T::zero();
    for i in 0..3 {
        let mut lhs = T::zero();
        for j in 0..3 {
            lhs = lhs + a[i][j] * b[j];
        }
        residual = residual.max((lhs - c[i]).abs());
    }
    let scale = c.iter().fold(T::one(), |acc, x| acc.max(x.abs()));
    if residual > T::tol(1e-9) * scale {
        return Err(Error::NoPsdFixedPoint { residual: residual.to_f64_lossy() });
    }
    let norm = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    if norm > T::one() + T::tol(1e-9) {
        return Err(Error::NoPsdFixedPoint { residual: (norm - T::one()).to_f64_lossy() });
    }
    // round-off repair only: pull a marginally super-unit Bloch vector back
    let shrink = if norm > T::one() { T::one() / norm } else { T::one() };
    let bx = b[0] * shrink;
    let by = b[1] * shrink;
    let bz = b[2] * shrink;
    let q = (T::one() + bz) / T::of(2.0);
    let r = Complex::new(bx / T::of(2.0), -by / T::of(2.0));
    AtomState::new(q, r)
}

fn pauli_basis<T: Real>() -> [CMatrix<T>; 4] {
    let zero: Complex<T> = Complex::zero();
    let one: Complex<T> = Complex::one();
    let i_unit = Complex::new(T::zero(), T::one());
    let mk = |entries: [[Complex<T>; 2]; 2]| {
        Array2::from_shape_fn((2, 2), |(i, j)| entries[i][j])
    };
    [
        mk([[one, zero], [zero, one]]),
        mk([[zero, one], [one, zero]]),
        mk([[zero, -i_unit], [i_unit, zero]]),
        mk([[one, zero], [zero, -one]]),
    ]
}

/// Minimum-norm solution of A b = c for a (possibly singular) real 3×3
/// system, via the eigendecomposition of A Aᵀ.
fn min_norm_solve3<T: Real>(a: &[[T; 3]; 3], c: &[T; 3]) -> [T; 3] {
    let gram: CMatrix<T> = Array2::from_shape_fn((3, 3), |(i, j)| {
        let mut acc = T::zero();
        for k in 0..3 {
            acc = acc + a[i][k] * a[j][k];
        }
        cr(acc)
    });
    let (vals, vecs) = linalg::hermitian_eigen(&gram);
    let top = vals.iter().copied().fold(T::zero(), T::max);
    // singular values of A below ~1e-12 of the largest are treated as zero
    let cut = top * T::tol(1e-12) * T::tol(1e-12) + T::min_positive_value();
    // y = (A Aᵀ)⁺ c
    let mut y = [T::zero(); 3];
    for k in 0..3 {
        if vals[k] <= cut {
            continue;
        }
        let mut proj = T::zero();
        for i in 0..3 {
            proj = proj + vecs[(i, k)].re * c[i];
        }
        let w = proj / vals[k];
        for i in 0..3 {
            y[i] = y[i] + vecs[(i, k)].re * w;
        }
    }
    // b = Aᵀ y
    let mut b = [T::zero(); 3];
    for i in 0..3 {
        for k in 0..3 {
            b[i] = b[i] + a[k][i] * y[k];
        }
    }
    b
}

/// Residual Δ = ‖χ − Tr_S[𝓔(ρ ⊗ χ)]‖₁ of the catalytic constraint.
pub fn verify_catalytic<T: Real>(
    cavity: &CavityState<T>,
    atom: &AtomState<T>,
    channel: &impl JointChannel<T>,
) -> T {
    let d = channel.cavity_dim();
    let rho = if cavity.dim() < d { cavity.embedded(d) } else { cavity.matrix().clone() };
    let joint_in = linalg::kron(&rho, &atom.matrix());
    let joint_out = channel.apply_matrix(&joint_in);
    let reduced = trace_out_cavity_matrix(&joint_out, d);
    let evolved = AtomState::from_raw(reduced[(0, 0)].re, reduced[(0, 1)]);
    atom.trace_distance_to(&evolved)
}

/// Closed-dynamics catalyst at interaction time `tau`: closed form where the
/// time is non-degenerate, channel fixed point otherwise.
pub fn solve_catalyst<T: Real>(
    cavity: &CavityState<T>,
    params: &SimulationParams<T>,
    tau: T,
) -> Result<CatalystSolution<T>> {
    match solve_catalyst_analytic(cavity, params, tau) {
        Ok(solution) => Ok(solution),
        Err(Error::DegenerateTime { .. }) => {
            let dim = cavity.dim().max(params.n_trunc + 1) + 1;
            let u = jc_propagator_with_dim(params, tau, dim);
            let channel = effective_atom_channel(cavity, &u)?;
            Ok(CatalystSolution::Feasible(fixed_point(&channel)?))
        }
        Err(e) => Err(e),
    }
}
