//! Closed-system Jaynes-Cummings dynamics.
//!
//! On resonance the JC Hamiltonian ω a†a + (ω/2)σ_z + g(σ₊a + σ₋a†) couples
//! only the dressed-state pairs {|n+1,g>, |n,e>}; |0,g> is stationary up to a
//! phase. The propagator is therefore assembled block-by-block in closed form
//! (2×2 rotation by g·t·√(n+1) with phase e^{-i(n+1/2)ωt} per pair) instead
//! of via a matrix exponential. The reduced states of cavity and atom after
//! the interaction also have closed-form series, which the scan code uses to
//! avoid constructing joint states in hot loops; the brute-force
//! conjugation + partial-trace route stays available as a cross-check.

use ndarray::Array2;
use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hilbert::{tensor, AtomState, CavityState, JointState};
use crate::linalg::{self, CMatrix};
use crate::scalar::{cr, Real};

/// Parameters of the resonant Jaynes-Cummings model.
///
/// `omega` is the shared atom/cavity angular frequency, `g` the coupling
/// rate, `n_trunc` the highest Fock level offered to user states. Detuned
/// models are rejected by construction: there is a single frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationParams<T: Real> {
    pub omega: T,
    pub g: T,
    pub n_trunc: usize,
}

impl<T: Real> SimulationParams<T> {
    pub fn new(omega: T, g: T, n_trunc: usize) -> Result<Self> {
        if !(omega > T::zero()) || !omega.is_finite() {
            return Err(Error::InvalidParams(format!("omega must be positive, got {omega}")));
        }
        if g.is_zero() || !g.is_finite() {
            return Err(Error::InvalidParams(format!("coupling g must be nonzero, got {g}")));
        }
        if n_trunc < 2 {
            return Err(Error::InvalidParams(format!("n_trunc must be >= 2, got {n_trunc}")));
        }
        Ok(Self { omega, g, n_trunc })
    }

    /// Fock levels of the internal propagation space. One level above
    /// `n_trunc` so the topmost pair populated by any admissible input,
    /// {|n_trunc+1, g>, |n_trunc, e>}, is complete and the propagator is
    /// exactly unitary on every populated block.
    pub fn propagation_dim(&self) -> usize {
        self.n_trunc + 2
    }
}

/// Rabi half-angles sin/cos(g·t·√(n+1)) for n = 0..dim-1, plus the shifted
/// row cos(g·t·√n). Shared by the propagator, the reduced-state series and
/// the catalytic-constraint solver.
#[derive(Debug, Clone)]
pub(crate) struct RabiTable<T> {
    /// s[n] = sin(g t √(n+1))
    pub s: Vec<T>,
    /// c[n] = cos(g t √(n+1))
    pub c: Vec<T>,
    /// c_down[n] = cos(g t √n); c_down[0] = 1
    pub c_down: Vec<T>,
}

impl<T: Real> RabiTable<T> {
    pub fn new(g: T, t: T, dim: usize) -> Self {
        let mut s = Vec::with_capacity(dim);
        let mut c = Vec::with_capacity(dim);
        let mut c_down = Vec::with_capacity(dim);
        for n in 0..dim {
            let up = g * t * T::of(n as f64 + 1.0).sqrt();
            let down = g * t * T::of(n as f64).sqrt();
            s.push(up.sin());
            c.push(up.cos());
            c_down.push(down.cos());
        }
        Self { s, c, c_down }
    }
}

/// Closed-form joint unitary at a fixed time.
#[derive(Debug, Clone)]
pub struct Propagator<T: Real> {
    time: T,
    cavity_dim: usize,
    matrix: CMatrix<T>,
}

impl<T: Real> Propagator<T> {
    pub fn time(&self) -> T {
        self.time
    }

    pub fn cavity_dim(&self) -> usize {
        self.cavity_dim
    }

    /// Unitary on the 2·cavity_dim joint space, cavity-major ordering.
    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    /// Conjugate a joint state: U ρ U†.
    pub fn conjugate(&self, joint: &JointState<T>) -> Result<JointState<T>> {
        if joint.cavity_dim() != self.cavity_dim {
            return Err(Error::DimensionMismatch { left: joint.cavity_dim(), right: self.cavity_dim });
        }
        let evolved = self.matrix.dot(joint.matrix()).dot(&linalg::dagger(&self.matrix));
        Ok(JointState::from_matrix_trusted(self.cavity_dim, evolved))
    }
}

/// Closed-form propagator on the internal propagation space of `params`.
pub fn jc_propagator<T: Real>(params: &SimulationParams<T>, t: T) -> Propagator<T> {
    jc_propagator_with_dim(params, t, params.propagation_dim())
}

/// Closed-form propagator on an explicit cavity dimension.
pub(crate) fn jc_propagator_with_dim<T: Real>(
    params: &SimulationParams<T>,
    t: T,
    cavity_dim: usize,
) -> Propagator<T> {
    let d = cavity_dim;
    let mut u: CMatrix<T> = Array2::zeros((2 * d, 2 * d));
    let half_omega_t = params.omega * t / T::of(2.0);
    // dark state |0,g>
    u[(0, 0)] = Complex::new(half_omega_t.cos(), half_omega_t.sin());
    let rabi = RabiTable::new(params.g, t, d);
    let minus_i = Complex::new(T::zero(), -T::one());
    for n in 0..d {
        // block phase e^{-i(n+1/2)ωt}
        let arg = -(T::of(n as f64) + T::of(0.5)) * params.omega * t;
        let phase = Complex::new(arg.cos(), arg.sin());
        let i_e = 2 * n + 1;
        if n + 1 < d {
            let i_g = 2 * (n + 1);
            let c = phase * cr(rabi.c[n]);
            let s = minus_i * phase * cr(rabi.s[n]);
            u[(i_g, i_g)] = c;
            u[(i_e, i_e)] = c;
            u[(i_g, i_e)] = s;
            u[(i_e, i_g)] = s;
        } else {
            // top excited state has no partner inside the truncated space;
            // it is an eigenstate of the truncated Hamiltonian
            u[(i_e, i_e)] = phase;
        }
    }
    Propagator { time: t, cavity_dim: d, matrix: u }
}

fn check_fits<T: Real>(cavity: &CavityState<T>, params: &SimulationParams<T>) -> Result<()> {
    if cavity.dim() > params.n_trunc + 1 {
        return Err(Error::TruncationTooSmall {
            tail: f64::NAN,
            tol: f64::NAN,
        });
    }
    Ok(())
}

/// Joint state U (ρ ⊗ χ) U† on the internal propagation space.
pub fn evolve_closed<T: Real>(
    cavity: &CavityState<T>,
    atom: &AtomState<T>,
    params: &SimulationParams<T>,
    t: T,
) -> Result<JointState<T>> {
    check_fits(cavity, params)?;
    let d = params.propagation_dim();
    let embedded = CavityState::from_matrix_trusted(cavity.embedded(d));
    let joint = tensor(&embedded, atom);
    let u = jc_propagator(params, t);
    u.conjugate(&joint)
}

/// Reduced cavity state after the interaction, evaluated from the
/// closed-form series without constructing the joint state.
pub fn reduced_cavity_analytic<T: Real>(
    cavity: &CavityState<T>,
    atom: &AtomState<T>,
    params: &SimulationParams<T>,
    t: T,
) -> Result<CavityState<T>> {
    check_fits(cavity, params)?;
    let d_in = cavity.dim();
    let d = params.propagation_dim();
    let q = cr(atom.q());
    let one_minus_q = cr(T::one() - atom.q());
    let r = atom.r();
    let i_unit = Complex::new(T::zero(), T::one());
    let rabi = RabiTable::new(params.g, t, d_in);
    let phase = |k: T| {
        let arg = k * params.omega * t;
        Complex::new(arg.cos(), arg.sin())
    };
    let mut out: CMatrix<T> = Array2::zeros((d, d));

    out[(0, 0)] = q * cavity.p(0, 0);
    for n in 0..d_in {
        // row |0><n+1| couples to the dark state
        let coeff = phase(T::of(n as f64 + 1.0))
            * (q * cavity.p(0, n + 1) * cr(rabi.c[n]) + i_unit * r * cavity.p(0, n) * cr(rabi.s[n]));
        out[(0, n + 1)] = out[(0, n + 1)] + coeff;
        out[(n + 1, 0)] = out[(n + 1, 0)] + coeff.conj();
    }
    for n in 0..d_in {
        for m in 0..d_in {
            let ph = phase(T::of(m as f64) - T::of(n as f64));
            let sn = cr(rabi.s[n]);
            let sm = cr(rabi.s[m]);
            let cn = cr(rabi.c[n]);
            let cm = cr(rabi.c[m]);
            let from_ground = q * cavity.p(n + 1, m + 1) * ph;
            out[(n, m)] = out[(n, m)] + from_ground * sn * sm;
            out[(n + 1, m + 1)] = out[(n + 1, m + 1)] + from_ground * cn * cm;
            let from_excited = one_minus_q * cavity.p(n, m) * ph;
            out[(n, m)] = out[(n, m)] + from_excited * cn * cm;
            out[(n + 1, m + 1)] = out[(n + 1, m + 1)] + from_excited * sn * sm;
            // coherence-fed terms, plus their Hermitian images
            let base = i_unit * ph * cn * sm;
            let upper = base * cavity.p(n + 1, m) * r;
            out[(n + 1, m + 1)] = out[(n + 1, m + 1)] + upper;
            out[(m + 1, n + 1)] = out[(m + 1, n + 1)] + upper.conj();
            let lower = base * cavity.p(n, m + 1) * r.conj();
            out[(n, m)] = out[(n, m)] + lower;
            out[(m, n)] = out[(m, n)] + lower.conj();
        }
    }
    Ok(CavityState::from_matrix_trusted(out))
}

/// Atom state (q(t), r(t)) after the interaction, from the closed-form
/// series.
pub fn atom_state_at<T: Real>(
    cavity: &CavityState<T>,
    atom: &AtomState<T>,
    params: &SimulationParams<T>,
    t: T,
) -> Result<AtomState<T>> {
    check_fits(cavity, params)?;
    let d_in = cavity.dim();
    let rabi = RabiTable::new(params.g, t, d_in);
    let pops = cavity.populations();
    let q0 = atom.q();
    let r0 = atom.r();

    let mut q = T::zero();
    for n in 0..d_in {
        let cd = rabi.c_down[n];
        q = q + pops[n] * (q0 * cd * cd + (T::one() - q0) * rabi.s[n] * rabi.s[n]);
        if n + 1 < d_in {
            let y = (r0 * cavity.p(n + 1, n)).im;
            q = q - T::of(2.0) * y * rabi.s[n] * rabi.c[n];
        }
    }

    // r(t) = e^{iωt} [ r·A + i q·C − i·D + r*·B ]
    let mut a_sum = T::zero();
    let mut b_sum = Complex::zero();
    let mut c_sum = Complex::zero();
    let mut d_sum = Complex::zero();
    for n in 0..d_in {
        a_sum = a_sum + pops[n] * rabi.c_down[n] * rabi.c[n];
        let c_up2 = if n + 1 < d_in { rabi.c[n + 1] } else { (params.g * t * T::of(n as f64 + 2.0).sqrt()).cos() };
        let s_up = if n + 1 < d_in { rabi.s[n + 1] } else { (params.g * t * T::of(n as f64 + 2.0).sqrt()).sin() };
        b_sum = b_sum + cavity.p(n, n + 2) * cr(rabi.s[n] * s_up);
        c_sum = c_sum + cavity.p(n, n + 1) * cr(rabi.s[n] * (rabi.c_down[n] + c_up2));
        d_sum = d_sum + cavity.p(n, n + 1) * cr(rabi.s[n] * c_up2);
    }
    let i_unit = Complex::new(T::zero(), T::one());
    let arg = params.omega * t;
    let e_iwt = Complex::new(arg.cos(), arg.sin());
    let r = e_iwt
        * (r0 * cr(a_sum) + i_unit * cr(q0) * c_sum - i_unit * d_sum + r0.conj() * b_sum);
    AtomState::new(clamp_unit(q), r)
}

/// Atom trajectory over a monotone time grid.
pub fn atom_trajectory<T: Real>(
    cavity: &CavityState<T>,
    atom: &AtomState<T>,
    params: &SimulationParams<T>,
    t_grid: &[T],
) -> Result<Vec<AtomState<T>>> {
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParams("time grid must be monotone non-decreasing".into()));
    }
    t_grid
        .iter()
        .map(|&t| atom_state_at(cavity, atom, params, t))
        .collect()
}

fn clamp_unit<T: Real>(x: T) -> T {
    x.max(T::zero()).min(T::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{
        coherent_state, fock_state, partial_trace_atom, partial_trace_cavity,
        random_atom_state, random_density_matrix,
    };
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use std::f64::consts::PI;

    fn params(omega: f64, g: f64, n_trunc: usize) -> SimulationParams<f64> {
        SimulationParams::new(omega, g, n_trunc).unwrap()
    }

    /// JC Hamiltonian built directly from the operator definition; used as
    /// an independent route to the propagator.
    fn hamiltonian(p: &SimulationParams<f64>, cavity_dim: usize) -> CMatrix<f64> {
        let d = cavity_dim;
        let mut h: CMatrix<f64> = Array2::zeros((2 * d, 2 * d));
        for n in 0..d {
            for a in 0..2 {
                let idx = 2 * n + a;
                let sz = if a == 1 { 1.0 } else { -1.0 };
                h[(idx, idx)] = Complex64::new(p.omega * n as f64 + 0.5 * p.omega * sz, 0.0);
            }
        }
        // g (σ+ a + σ- a†): couples |n+1, g> and |n, e>
        for n in 0..d - 1 {
            let amp = Complex64::new(p.g * ((n + 1) as f64).sqrt(), 0.0);
            h[(2 * n + 1, 2 * (n + 1))] = amp;
            h[(2 * (n + 1), 2 * n + 1)] = amp;
        }
        h
    }

    #[test]
    fn zero_time_is_identity() {
        let p = params(2.0 * PI, PI, 6);
        let u = jc_propagator(&p, 0.0);
        let err = linalg::max_abs_diff(u.matrix(), &linalg::identity(2 * p.propagation_dim()));
        assert!(err < 1e-14);
    }

    #[test]
    fn full_rabi_transfer_of_one_excitation() {
        // g t √1 = π/2 with ω = 2π, g = π, t = 1/2: |0,e> -> -|1,g>
        let p = params(2.0 * PI, PI, 4);
        let u = jc_propagator(&p, 0.5);
        let col = 1; // |0,e>
        for row in 0..u.matrix().nrows() {
            let v = u.matrix()[(row, col)];
            if row == 2 {
                assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-12, "got {v}");
            } else {
                assert!(v.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn propagator_is_unitary_and_matches_exponential() {
        let p = params(2.0 * PI, PI, 8);
        let d = p.propagation_dim();
        for &t in &[0.3, 1.7, 5.0] {
            let u = jc_propagator(&p, t);
            let err_u = linalg::max_abs_diff(
                &linalg::dagger(u.matrix()).dot(u.matrix()),
                &linalg::identity(2 * d),
            );
            assert!(err_u < 1e-10, "unitarity defect {err_u}");
            let h = hamiltonian(&p, d);
            let minus_i_ht = linalg::scale(&h, Complex64::new(0.0, -t));
            let exp = linalg::expm(&minus_i_ht);
            let err = linalg::max_abs_diff(u.matrix(), &exp);
            assert!(err < 1e-9, "propagator vs exponential {err} at t={t}");
        }
    }

    #[test]
    fn group_property() {
        let p = params(1.3, 0.7, 5);
        let u1 = jc_propagator(&p, 0.9);
        let u2 = jc_propagator(&p, 1.4);
        let u12 = jc_propagator(&p, 2.3);
        let err = linalg::max_abs_diff(&u1.matrix().dot(u2.matrix()), u12.matrix());
        assert!(err < 1e-10, "group defect {err}");
    }

    #[test]
    fn dark_state_is_stationary() {
        let p = params(2.0 * PI, PI, 4);
        let vacuum = fock_state(0, 2).unwrap();
        let joint = evolve_closed(&vacuum, &AtomState::ground(), &p, 3.21).unwrap();
        let cav = partial_trace_cavity(&joint);
        assert!((cav.p(0, 0).re - 1.0).abs() < 1e-12);
        let atom = partial_trace_atom(&joint);
        assert!((atom.q() - 1.0).abs() < 1e-12);
        assert!(atom.r().norm() < 1e-12);
    }

    #[test]
    fn excitation_number_is_conserved() {
        let p = params(2.0 * PI, PI, 12);
        let alpha = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
        let cavity = coherent_state(alpha, 12).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let atom = random_atom_state(&mut rng);
        let joint0 = evolve_closed(&cavity, &atom, &p, 0.0).unwrap();
        let n0 = joint0.total_excitation();
        for &t in &[0.4, 2.1, 7.9] {
            let joint = evolve_closed(&cavity, &atom, &p, t).unwrap();
            assert!((joint.total_excitation() - n0).abs() < 1e-10);
        }
    }

    #[test]
    fn analytic_reduced_cavity_matches_partial_trace() {
        let mut rng = ChaCha12Rng::seed_from_u64(19);
        let p = params(2.0 * PI, PI, 7);
        for _ in 0..4 {
            let cavity: CavityState<f64> = random_density_matrix(8, &mut rng);
            let atom = random_atom_state(&mut rng);
            let t = 3.7;
            let direct = reduced_cavity_analytic(&cavity, &atom, &p, t).unwrap();
            let brute = partial_trace_cavity(&evolve_closed(&cavity, &atom, &p, t).unwrap());
            let err = linalg::max_abs_diff(direct.matrix(), brute.matrix());
            assert!(err < 1e-12, "series vs partial trace: {err}");
        }
    }

    #[test]
    fn analytic_atom_matches_partial_trace() {
        let mut rng = ChaCha12Rng::seed_from_u64(29);
        let p = params(2.0 * PI, PI, 7);
        for _ in 0..4 {
            let cavity: CavityState<f64> = random_density_matrix(8, &mut rng);
            let atom = random_atom_state(&mut rng);
            let t = 2.9;
            let direct = atom_state_at(&cavity, &atom, &p, t).unwrap();
            let brute = partial_trace_atom(&evolve_closed(&cavity, &atom, &p, t).unwrap());
            assert!(direct.trace_distance_to(&brute) < 1e-12);
        }
    }

    #[test]
    fn trajectory_starts_at_the_input() {
        let p = params(2.0 * PI, PI, 12);
        let cavity = coherent_state(Complex64::new(0.5, 0.0), 12).unwrap();
        let atom = AtomState::new(0.7, Complex64::new(0.1, -0.2)).unwrap();
        let grid = [0.0, 0.5, 1.0];
        let traj = atom_trajectory(&cavity, &atom, &p, &grid).unwrap();
        assert!(traj[0].trace_distance_to(&atom) < 1e-14);
        assert!(atom_trajectory(&cavity, &atom, &p, &[1.0, 0.5]).is_err());
    }
}
