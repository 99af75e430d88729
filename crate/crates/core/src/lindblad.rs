//! Open-system dynamics: Lindblad master equation on the joint space and
//! dissipative catalysis.
//!
//! The generator −i[H, ·] + κ(n_th+1)𝓓[a] + κ n_th 𝓓[a†] + Γ 𝓓[σ₋], with
//! 𝓓[L]ρ = LρL† − ½{L†L, ρ}, is assembled as a dense superoperator on
//! column-vectorized joint density matrices via the identity
//! vec(A X B) = (Bᵀ ⊗ A) vec(X). Propagation uses one matrix exponential
//! per interaction time (scaling-and-squaring); the resulting channel is
//! reused across catalyst solves at that time.

use num_complex::Complex;
use num_traits::One;

use crate::catalyst::{effective_atom_channel, fixed_point, JointChannel};
use crate::error::{Error, Result};
use crate::hilbert::{AtomState, CavityState, JointState};
use crate::jc_core::SimulationParams;
use crate::linalg::{self, CMatrix};
use crate::scalar::{cr, Real};

/// PSD eigenvalue floor tolerated after propagation; worse means the Fock
/// truncation is too small for the requested time.
pub const PROPAGATION_PSD_FLOOR: f64 = 1e-8;

/// Cavity loss rate κ, atom decay rate Γ, and mean thermal excitation n_th.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipationParams<T: Real> {
    pub kappa: T,
    pub gamma: T,
    pub n_th: T,
}

impl<T: Real> DissipationParams<T> {
    pub fn new(kappa: T, gamma: T, n_th: T) -> Result<Self> {
        for (name, v) in [("kappa", kappa), ("gamma", gamma), ("n_th", n_th)] {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self { kappa, gamma, n_th })
    }

    /// No dissipation at all; the generator reduces to the commutator.
    pub fn closed() -> Self {
        Self { kappa: T::zero(), gamma: T::zero(), n_th: T::zero() }
    }

    pub fn is_closed(&self) -> bool {
        self.kappa.is_zero() && self.gamma.is_zero()
    }
}

/// Mean thermal occupation n_th = (e^{1/T} − 1)^{-1} for a dimensionless
/// bath temperature.
pub fn n_th_from_temperature<T: Real>(temperature: T) -> T {
    T::one() / ((T::one() / temperature).exp() - T::one())
}

/// Dense Lindblad generator on column-vectorized joint density matrices.
#[derive(Debug, Clone)]
pub struct Liouvillian<T: Real> {
    cavity_dim: usize,
    matrix: CMatrix<T>,
}

impl<T: Real> Liouvillian<T> {
    pub fn cavity_dim(&self) -> usize {
        self.cavity_dim
    }

    /// The D² × D² generator, D = 2 · cavity_dim.
    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    /// Quantum channel exp(𝓛 τ).
    pub fn channel(&self, tau: T) -> LindbladChannel<T> {
        let scaled = linalg::scale(&self.matrix, cr(tau));
        LindbladChannel { tau, cavity_dim: self.cavity_dim, matrix: linalg::expm(&scaled) }
    }

    /// Channels at τ = offset, offset + dt, ..., sharing one exponential:
    /// each grid step multiplies by exp(𝓛 dt).
    pub fn channels_on_grid(&self, offset: T, dt: T, count: usize) -> Vec<LindbladChannel<T>> {
        let mut out = Vec::with_capacity(count);
        if count == 0 {
            return out;
        }
        let step = self.channel(dt).matrix;
        let mut current = self.channel(offset);
        out.push(current.clone());
        for k in 1..count {
            current = LindbladChannel {
                tau: offset + dt * T::of(k as f64),
                cavity_dim: self.cavity_dim,
                matrix: current.matrix.dot(&step),
            };
            out.push(current.clone());
        }
        out
    }
}

/// exp(𝓛 τ) as a linear map on joint-space operators.
#[derive(Debug, Clone)]
pub struct LindbladChannel<T: Real> {
    tau: T,
    cavity_dim: usize,
    matrix: CMatrix<T>,
}

impl<T: Real> LindbladChannel<T> {
    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    /// Propagate a state through the channel, restore Hermiticity and unit
    /// trace (round-off repair), and gate on the PSD floor.
    pub fn propagate(&self, state: &JointState<T>) -> Result<JointState<T>> {
        if state.cavity_dim() != self.cavity_dim {
            return Err(Error::DimensionMismatch { left: state.cavity_dim(), right: self.cavity_dim });
        }
        let raw = self.apply_matrix(state.matrix());
        let mut repaired = linalg::hermitize(&raw);
        let tr = linalg::trace(&repaired).re;
        repaired = linalg::scale(&repaired, cr(T::one() / tr));
        let floor = linalg::hermitian_eigenvalues(&repaired)
            .iter()
            .copied()
            .fold(T::infinity(), T::min);
        if floor < -T::tol(PROPAGATION_PSD_FLOOR) {
            return Err(Error::PropagationUnstable { floor: floor.to_f64_lossy() });
        }
        Ok(JointState::from_matrix_trusted(self.cavity_dim, repaired))
    }
}

impl<T: Real> JointChannel<T> for LindbladChannel<T> {
    fn cavity_dim(&self) -> usize {
        self.cavity_dim
    }

    fn apply_matrix(&self, m: &CMatrix<T>) -> CMatrix<T> {
        let v = linalg::vec_col(m);
        linalg::unvec_col(&self.matrix.dot(&v), 2 * self.cavity_dim)
    }
}

/// Annihilation operator on the cavity factor of the joint space.
fn joint_annihilation<T: Real>(cavity_dim: usize) -> CMatrix<T> {
    let mut a: CMatrix<T> = ndarray::Array2::zeros((cavity_dim, cavity_dim));
    for n in 1..cavity_dim {
        a[(n - 1, n)] = cr(T::of(n as f64).sqrt());
    }
    linalg::kron(&a, &linalg::identity(2))
}

/// Atom lowering operator |g><e| on the joint space.
fn joint_sigma_minus<T: Real>(cavity_dim: usize) -> CMatrix<T> {
    let mut s: CMatrix<T> = ndarray::Array2::zeros((2, 2));
    s[(0, 1)] = Complex::one();
    linalg::kron(&linalg::identity(cavity_dim), &s)
}

/// JC Hamiltonian on the joint space.
fn joint_hamiltonian<T: Real>(params: &SimulationParams<T>, cavity_dim: usize) -> CMatrix<T> {
    let d = cavity_dim;
    let mut h: CMatrix<T> = ndarray::Array2::zeros((2 * d, 2 * d));
    let half = T::of(0.5);
    for n in 0..d {
        for a in 0..2 {
            let sz = if a == 1 { T::one() } else { -T::one() };
            let idx = 2 * n + a;
            h[(idx, idx)] = cr(params.omega * (T::of(n as f64) + half * sz));
        }
    }
    for n in 0..d.saturating_sub(1) {
        let amp = cr(params.g * T::of(n as f64 + 1.0).sqrt());
        h[(2 * n + 1, 2 * (n + 1))] = amp;
        h[(2 * (n + 1), 2 * n + 1)] = amp;
    }
    h
}

/// Superoperator of the dissipator 𝓓[L] = L·L† − ½{L†L, ·}.
fn dissipator<T: Real>(l: &CMatrix<T>) -> CMatrix<T> {
    let d = l.nrows();
    let eye = linalg::identity::<T>(d);
    let l_conj = l.mapv(|z| z.conj());
    let l_dag_l = linalg::dagger(l).dot(l);
    let half = cr(T::of(0.5));
    let jump = linalg::kron(&l_conj, l);
    let left = linalg::kron(&eye, &l_dag_l);
    let right = linalg::kron(&l_dag_l.t().to_owned(), &eye);
    let mut out = jump;
    out = out - linalg::scale(&left, half);
    out = out - linalg::scale(&right, half);
    out
}

/// Assemble the Lindblad generator on the internal propagation space of
/// `params`.
pub fn build_liouvillian<T: Real>(
    params: &SimulationParams<T>,
    diss: &DissipationParams<T>,
) -> Liouvillian<T> {
    build_liouvillian_with_dim(params, diss, params.propagation_dim())
}

pub(crate) fn build_liouvillian_with_dim<T: Real>(
    params: &SimulationParams<T>,
    diss: &DissipationParams<T>,
    cavity_dim: usize,
) -> Liouvillian<T> {
    let d = cavity_dim;
    let dd = 2 * d;
    let h = joint_hamiltonian(params, d);
    let eye = linalg::identity::<T>(dd);
    let i_unit = Complex::new(T::zero(), T::one());
    // -i (I ⊗ H - Hᵀ ⊗ I)
    let comm = linalg::scale(&linalg::kron(&eye, &h), -i_unit)
        + linalg::scale(&linalg::kron(&h.t().to_owned(), &eye), i_unit);
    let mut total = comm;
    if !diss.kappa.is_zero() {
        let a = joint_annihilation::<T>(d);
        let down = dissipator(&a);
        total = total + linalg::scale(&down, cr(diss.kappa * (diss.n_th + T::one())));
        if !diss.n_th.is_zero() {
            let up = dissipator(&linalg::dagger(&a));
            total = total + linalg::scale(&up, cr(diss.kappa * diss.n_th));
        }
    }
    if !diss.gamma.is_zero() {
        let decay = dissipator(&joint_sigma_minus::<T>(d));
        total = total + linalg::scale(&decay, cr(diss.gamma));
    }
    Liouvillian { cavity_dim: d, matrix: total }
}

/// Propagate a joint state for time `t` (one matrix exponential).
pub fn propagate<T: Real>(l: &Liouvillian<T>, state: &JointState<T>, t: T) -> Result<JointState<T>> {
    if !(t >= T::zero()) {
        return Err(Error::InvalidParams(format!("propagation time must be >= 0, got {t}")));
    }
    l.channel(t).propagate(state)
}

/// Atom state satisfying the generalized catalytic constraint
/// Tr_S 𝓔_τ[ρ ⊗ χ] = χ for the channel 𝓔_τ = exp(𝓛 τ).
pub fn dissipative_catalyst<T: Real>(
    cavity: &CavityState<T>,
    l: &Liouvillian<T>,
    tau: T,
) -> Result<AtomState<T>> {
    dissipative_catalyst_with(cavity, &l.channel(tau))
}

/// Same, reusing an already-exponentiated channel.
pub fn dissipative_catalyst_with<T: Real>(
    cavity: &CavityState<T>,
    channel: &LindbladChannel<T>,
) -> Result<AtomState<T>> {
    let effective = effective_atom_channel(cavity, channel)?;
    fixed_point(&effective)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalyst::{solve_catalyst_analytic, verify_catalytic};
    use crate::hilbert::{
        coherent_state, fock_state, partial_trace_cavity, random_atom_state,
        random_density_matrix, tensor,
    };
    use crate::jc_core::evolve_closed;
    use ndarray::Array2;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use std::f64::consts::PI;

    fn params(omega: f64, g: f64, n_trunc: usize) -> SimulationParams<f64> {
        SimulationParams::new(omega, g, n_trunc).unwrap()
    }

    #[test]
    fn generator_annihilates_the_trace() {
        let p = params(2.0 * PI, 0.1 * PI, 4);
        let diss = DissipationParams::new(0.005, 0.05, 0.1).unwrap();
        let l = build_liouvillian(&p, &diss);
        let dd = 2 * l.cavity_dim();
        // vec(I)† 𝓛 = 0: column sums over diagonal positions vanish
        let mut worst = 0.0f64;
        for col in 0..dd * dd {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dd {
                acc += l.matrix()[(k + dd * k, col)];
            }
            worst = worst.max(acc.norm());
        }
        assert!(worst < 1e-12, "trace defect {worst}");
    }

    #[test]
    fn spectrum_has_no_positive_real_parts() {
        let p = params(2.0 * PI, 0.3 * PI, 2);
        let diss = DissipationParams::new(0.02, 0.05, 0.15).unwrap();
        let l = build_liouvillian(&p, &diss);
        let eigs = linalg::complex_eigenvalues(l.matrix());
        let max_re = eigs.iter().map(|z| z.re).fold(f64::MIN, f64::max);
        assert!(max_re < 1e-10, "spectral abscissa {max_re}");
        // and the stationary eigenvalue at zero exists
        let near_zero = eigs.iter().any(|z| z.norm() < 1e-9);
        assert!(near_zero, "no stationary eigenvalue found");
    }

    #[test]
    fn closed_generator_reproduces_unitary_dynamics() {
        let p = params(2.0 * PI, PI, 12);
        let l = build_liouvillian(&p, &DissipationParams::closed());
        let cavity = coherent_state(Complex64::new(0.5, 0.0), 12).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let atom = random_atom_state(&mut rng);
        for &t in &[0.7, 2.9] {
            let open = propagate(&l, &tensor(&CavityState::from_matrix(cavity.embedded(14)).unwrap(), &atom), t).unwrap();
            let closed = evolve_closed(&cavity, &atom, &p, t).unwrap();
            let err = linalg::max_abs_diff(open.matrix(), closed.matrix());
            assert!(err < 1e-9, "t={t}: open vs closed {err}");
        }
    }

    #[test]
    fn damped_cavity_relaxes_to_the_thermal_occupation() {
        // negligible coupling, no atom decay: the cavity mode alone relaxes
        let p = params(2.0 * PI, 1e-9, 8);
        let n_th = 0.1;
        let diss = DissipationParams::new(0.5, 0.0, n_th).unwrap();
        let l = build_liouvillian(&p, &diss);
        let cavity = fock_state(2, 8).unwrap();
        let joint = tensor(&CavityState::from_matrix(cavity.embedded(10)).unwrap(), &AtomState::ground());
        let late = propagate(&l, &joint, 60.0).unwrap();
        let reduced = partial_trace_cavity(&late);
        assert!(
            (reduced.number_moment(1) - n_th).abs() < 1e-6,
            "<n> = {} vs n_th = {n_th}",
            reduced.number_moment(1)
        );
    }

    #[test]
    fn propagation_preserves_trace_and_returns_input_at_zero_time() {
        let p = params(2.0 * PI, 0.1 * PI, 5);
        let diss = DissipationParams::new(0.01, 0.03, 0.2).unwrap();
        let l = build_liouvillian(&p, &diss);
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let cavity: CavityState<f64> = random_density_matrix(7, &mut rng);
        let atom = random_atom_state(&mut rng);
        let joint = tensor(&cavity, &atom);
        let same = propagate(&l, &joint, 0.0).unwrap();
        assert!(linalg::max_abs_diff(same.matrix(), joint.matrix()) < 1e-12);
        for &t in &[1.3, 6.0] {
            let out = propagate(&l, &joint, t).unwrap();
            let tr = linalg::trace(out.matrix()).re;
            assert!((tr - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn free_cavity_purity_never_increases() {
        let p = params(2.0 * PI, 1e-9, 6);
        let diss = DissipationParams::new(0.2, 0.0, 0.3).unwrap();
        let l = build_liouvillian(&p, &diss);
        let cavity = fock_state(3, 6).unwrap();
        let joint = tensor(&CavityState::from_matrix(cavity.embedded(8)).unwrap(), &AtomState::ground());
        let mut last = f64::INFINITY;
        for k in 0..8 {
            let t = 0.5 * k as f64;
            let out = propagate(&l, &joint, t).unwrap();
            let purity = partial_trace_cavity(&out).purity();
            assert!(purity <= last + 1e-9, "purity rose: {last} -> {purity}");
            last = purity;
        }
    }

    #[test]
    fn channel_grid_matches_individual_exponentials() {
        let p = params(2.0 * PI, 0.1 * PI, 4);
        let diss = DissipationParams::new(0.005, 0.05, 0.1).unwrap();
        let l = build_liouvillian(&p, &diss);
        let grid = l.channels_on_grid(0.5, 0.5, 4);
        for ch in &grid {
            let direct = l.channel(ch.tau());
            let err = linalg::max_abs_diff(ch.matrix(), direct.matrix());
            assert!(err < 1e-11, "tau={}: {err}", ch.tau());
        }
    }

    #[test]
    fn exp_channel_is_cptp_via_choi_and_kraus_oracle() {
        let p = params(2.0 * PI, 0.4, 2);
        let diss = DissipationParams::new(0.1, 0.2, 0.2).unwrap();
        let l = build_liouvillian(&p, &diss);
        let ch = l.channel(1.7);
        let dd = 2 * l.cavity_dim();
        // Choi matrix: C[(i·D+k), (j·D+l)] = <k| E(|i><j|) |l>
        let mut choi: CMatrix<f64> = Array2::zeros((dd * dd, dd * dd));
        for i in 0..dd {
            for j in 0..dd {
                let mut basis: CMatrix<f64> = Array2::zeros((dd, dd));
                basis[(i, j)] = Complex64::new(1.0, 0.0);
                let image = ch.apply_matrix(&basis);
                for k in 0..dd {
                    for lcol in 0..dd {
                        choi[(i * dd + k, j * dd + lcol)] = image[(k, lcol)];
                    }
                }
            }
        }
        let (vals, vecs) = linalg::hermitian_eigen(&choi);
        let floor = vals.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(floor > -1e-8, "Choi floor {floor}");
        // Kraus decomposition from the Choi eigenpairs reproduces the channel
        let mut kraus: Vec<CMatrix<f64>> = Vec::new();
        for m in 0..dd * dd {
            if vals[m] <= 1e-12 {
                continue;
            }
            let scalef = vals[m].sqrt();
            let mut k_op: CMatrix<f64> = Array2::zeros((dd, dd));
            for i in 0..dd {
                for k in 0..dd {
                    k_op[(k, i)] = vecs[(i * dd + k, m)] * Complex64::new(scalef, 0.0);
                }
            }
            kraus.push(k_op);
        }
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let cavity: CavityState<f64> = random_density_matrix(l.cavity_dim(), &mut rng);
        let atom = random_atom_state(&mut rng);
        let x = tensor(&cavity, &atom);
        let direct = ch.apply_matrix(x.matrix());
        let mut via_kraus: CMatrix<f64> = Array2::zeros((dd, dd));
        for k_op in &kraus {
            via_kraus = via_kraus + k_op.dot(x.matrix()).dot(&linalg::dagger(k_op));
        }
        let err = linalg::max_abs_diff(&direct, &via_kraus);
        assert!(err < 1e-10, "Kraus route differs by {err}");
    }

    #[test]
    fn dissipative_catalyst_closed_limit_matches_analytic() {
        let p = params(2.0 * PI, PI, 14);
        let cavity = coherent_state(Complex64::new(1.0 / 2f64.sqrt(), 0.0), 14).unwrap();
        let l = build_liouvillian(&p, &DissipationParams::closed());
        for &tau in &[0.9, 2.6] {
            let via_lindblad = dissipative_catalyst(&cavity, &l, tau).unwrap();
            let analytic = solve_catalyst_analytic(&cavity, &p, tau)
                .unwrap()
                .feasible()
                .unwrap();
            assert!(
                via_lindblad.trace_distance_to(&analytic) < 1e-8,
                "tau={tau}"
            );
        }
    }

    #[test]
    fn dissipative_catalyst_satisfies_the_generalized_constraint() {
        let p = params(2.0 * PI, 0.1 * PI, 8);
        let diss = DissipationParams::new(0.005, 0.05, 0.1).unwrap();
        let l = build_liouvillian(&p, &diss);
        let cavity = coherent_state_n8();
        for &tau in &[1.0, 4.0] {
            let ch = l.channel(tau);
            let chi = dissipative_catalyst_with(&cavity, &ch).unwrap();
            let delta = verify_catalytic(&cavity, &chi, &ch);
            assert!(delta < 1e-10, "tau={tau}: delta={delta}");
        }
    }

    #[test]
    fn strong_decay_weak_coupling_pins_the_atom_to_the_ground_state() {
        let p = params(2.0 * PI, 1e-4, 6);
        let diss = DissipationParams::new(0.0, 5.0, 0.0).unwrap();
        let l = build_liouvillian(&p, &diss);
        let cavity = coherent_state_n6();
        let chi = dissipative_catalyst(&cavity, &l, 3.0).unwrap();
        assert!((chi.q() - 1.0).abs() < 1e-4, "q = {}", chi.q());
        assert!(chi.r().norm() < 1e-4);
    }

    fn coherent_state_n8() -> CavityState<f64> {
        coherent_state_with_tol(8)
    }

    fn coherent_state_n6() -> CavityState<f64> {
        coherent_state_with_tol(6)
    }

    fn coherent_state_with_tol(n: usize) -> CavityState<f64> {
        crate::hilbert::coherent_state_with_tail_tol(
            Complex64::new(1.0 / 2f64.sqrt(), 0.0),
            n,
            1e-5,
        )
        .unwrap()
    }
}
