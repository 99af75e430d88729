//! Non-classicality and statistics functionals of cavity states.
//!
//! - `g2`: second-order auto-correlation (⟨n²⟩ − ⟨n⟩)/⟨n⟩²; values below 1
//!   (sub-Poissonian statistics) certify non-classicality.
//! - `g2_catalytic_predict`: the same quantity for the post-interaction
//!   state of a catalytic evolution, from the closed-form correlation sum
//!   instead of a joint-state construction.
//! - `verify_moment_relation`: residual of the moment bookkeeping identity
//!   that excitation conservation imposes on ⟨n_S^k⟩.
//! - `wigner` / `wln`: Wigner function on a phase-space grid via the
//!   Fock-basis Laguerre closed form, and the Wigner logarithmic negativity
//!   log ∫|W| (natural log; zero for positive-Wigner states).
//! - `squeezing_xi`: √2 · ΔX₁ for the quadrature X₁ = (a† + a)/√2; values
//!   below 1 certify squeezing.

use ndarray::Array2;
use num_complex::Complex;
use num_traits::Zero;

use crate::catalyst::verify_catalytic;
use crate::error::{Error, Result};
use crate::hilbert::{AtomState, CavityState};
use crate::jc_core::{evolve_closed, jc_propagator, RabiTable, SimulationParams};
use crate::scalar::{cr, Real};

/// ⟨n⟩ below this counts as vacuum and leaves g² undefined.
pub const VACUUM_MEAN_N: f64 = 1e-12;
/// Catalytic-constraint residual accepted by `g2_catalytic_predict`.
pub const CATALYTIC_CHECK_TOL: f64 = 1e-6;
/// |∫|W| − 1| within this is treated as a positive Wigner function when
/// clamping the logarithmic negativity at zero.
pub const GRID_MASS_TOL: f64 = 1e-3;

/// Second-order auto-correlation g² = (⟨n²⟩ − ⟨n⟩)/⟨n⟩².
pub fn g2<T: Real>(state: &CavityState<T>) -> Result<T> {
    let mean = state.number_moment(1);
    if mean <= T::tol(VACUUM_MEAN_N) {
        return Err(Error::VacuumUndefined { mean_n: mean.to_f64_lossy() });
    }
    let second = state.number_moment(2);
    Ok((second - mean) / (mean * mean))
}

/// Correlation sum ⟨n_S ⊗ n_C⟩ of the evolved joint state, in closed form.
fn correlation_term<T: Real>(
    cavity: &CavityState<T>,
    atom: &AtomState<T>,
    params: &SimulationParams<T>,
    tau: T,
) -> T {
    let d_in = cavity.dim();
    let rabi = RabiTable::new(params.g, tau, d_in);
    let pops = cavity.populations();
    let q = atom.q();
    let r = atom.r();
    let mut acc = T::zero();
    for n in 1..d_in {
        let weight = T::of(n as f64);
        let s = rabi.s[n];
        let c = rabi.c[n];
        let mut term = (T::one() - q) * pops[n] * c * c;
        if n + 1 < d_in {
            term = term + q * pops[n + 1] * s * s;
            term = term + T::of(2.0) * (r * cavity.p(n + 1, n)).im * s * c;
        }
        acc = acc + weight * term;
    }
    acc
}

/// g² of the final cavity state of a catalytic evolution, computed without
/// constructing the joint state.
///
/// The atom must satisfy the catalytic constraint at `tau`; this is checked
/// with the full evolve-and-trace residual and rejected above
/// [`CATALYTIC_CHECK_TOL`].
pub fn g2_catalytic_predict<T: Real>(
    cavity: &CavityState<T>,
    atom: &AtomState<T>,
    params: &SimulationParams<T>,
    tau: T,
) -> Result<T> {
    let u = jc_propagator(params, tau);
    let delta = verify_catalytic(cavity, atom, &u);
    if delta > T::tol(CATALYTIC_CHECK_TOL) {
        return Err(Error::NotCatalytic {
            delta: delta.to_f64_lossy(),
            tol: CATALYTIC_CHECK_TOL,
        });
    }
    Ok(g2_catalytic_unchecked(cavity, atom, params, tau)?)
}

/// The g² prediction formula alone; scan code calls this after verifying the
/// constraint through its own (cheaper, closed-form) residual.
pub(crate) fn g2_catalytic_unchecked<T: Real>(
    cavity: &CavityState<T>,
    atom: &AtomState<T>,
    params: &SimulationParams<T>,
    tau: T,
) -> Result<T> {
    let mean = cavity.number_moment(1);
    if mean <= T::tol(VACUUM_MEAN_N) {
        return Err(Error::VacuumUndefined { mean_n: mean.to_f64_lossy() });
    }
    let g2_in = g2(cavity)?;
    let corr = correlation_term(cavity, atom, params, tau);
    let q = atom.q();
    Ok(g2_in - T::of(2.0) / (mean * mean) * (corr - (T::one() - q) * mean))
}

/// Residual of the conservation identity for the k-th moment of n_S.
///
/// For an excitation-conserving joint evolution,
/// ⟨n_S^k⟩_σ − ⟨n_S^k⟩_ρ = ⟨n_C^k⟩_ρ − ⟨n_C^k⟩_σ + Tr[Δ_k (ρ_SC − σ_SC)]
/// with Δ_k the binomial cross terms of (n_S + n_C)^k. The returned value is
/// the absolute violation; for a catalytic atom the n_C terms cancel and the
/// k = 2 case becomes the variance-transfer identity behind the g²
/// mechanism.
pub fn verify_moment_relation<T: Real>(
    cavity: &CavityState<T>,
    atom: &AtomState<T>,
    params: &SimulationParams<T>,
    t: T,
    k: u32,
) -> Result<T> {
    if k < 2 {
        return Err(Error::InvalidParams(format!("moment order must be >= 2, got {k}")));
    }
    let sigma = evolve_closed(cavity, atom, params, t)?;
    let d = sigma.cavity_dim();
    let m = sigma.matrix();
    // diagonal occupations of the evolved joint state
    let mut n_s_k_out = T::zero();
    let mut excited_out = T::zero();
    let mut delta_out = T::zero();
    for n in 0..d {
        let pg = m[(2 * n, 2 * n)].re;
        let pe = m[(2 * n + 1, 2 * n + 1)].re;
        let nf = n as f64;
        n_s_k_out = n_s_k_out + T::of(nf.powi(k as i32)) * (pg + pe);
        excited_out = excited_out + pe;
        // Σ_{i=1}^{k-1} C(k,i) n^{k-i} = (n+1)^k − n^k − 1 for a projector n_C
        delta_out = delta_out + T::of((nf + 1.0).powi(k as i32) - nf.powi(k as i32) - 1.0) * pe;
    }
    let n_s_k_in = cavity.number_moment(k);
    let excited_in = T::one() - atom.q();
    let mut delta_in = T::zero();
    for (n, &p) in cavity.populations().iter().enumerate() {
        let nf = n as f64;
        delta_in = delta_in + T::of((nf + 1.0).powi(k as i32) - nf.powi(k as i32) - 1.0) * p * excited_in;
    }
    let lhs = n_s_k_out - n_s_k_in;
    let rhs = (excited_in - excited_out) + (delta_in - delta_out);
    Ok((lhs - rhs).abs())
}

/// Symmetric uniform phase-space grid specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T: Real> {
    pub half_width: T,
    pub points: usize,
}

impl<T: Real> GridSpec<T> {
    pub fn new(half_width: T, points: usize) -> Result<Self> {
        if !(half_width > T::zero()) || points < 2 {
            return Err(Error::InvalidParams("grid needs positive extent and >= 2 points".into()));
        }
        Ok(Self { half_width, points })
    }

    /// Default grid for states of coherent amplitude |α|:
    /// [−L, L]² with L = √2(|α| + 3) + 1 at 201×201 points.
    pub fn default_for(alpha_abs: T) -> Self {
        let l = T::of(2.0).sqrt() * (alpha_abs + T::of(3.0)) + T::one();
        Self { half_width: l, points: 201 }
    }

    /// Same extent at half the grid spacing.
    pub fn refined(&self) -> Self {
        Self { half_width: self.half_width, points: 2 * self.points - 1 }
    }

    pub fn axis(&self) -> Vec<T> {
        let n = self.points;
        let step = T::of(2.0) * self.half_width / T::of((n - 1) as f64);
        (0..n).map(|i| -self.half_width + step * T::of(i as f64)).collect()
    }

    pub fn step(&self) -> T {
        T::of(2.0) * self.half_width / T::of((self.points - 1) as f64)
    }
}

/// Wigner function sampled on a uniform grid; `values[(i, j)] = W(x_i, p_j)`.
#[derive(Debug, Clone)]
pub struct WignerField<T: Real> {
    pub x_grid: Vec<T>,
    pub p_grid: Vec<T>,
    pub values: Array2<T>,
}

impl<T: Real> WignerField<T> {
    /// Trapezoid ∫ W dx dp.
    pub fn total_mass(&self) -> T {
        self.integrate(|w| w)
    }

    /// Trapezoid ∫ |W| dx dp.
    pub fn abs_mass(&self) -> T {
        self.integrate(|w| w.abs())
    }

    fn integrate(&self, f: impl Fn(T) -> T) -> T {
        let nx = self.x_grid.len();
        let np = self.p_grid.len();
        let hx = self.x_grid[1] - self.x_grid[0];
        let hp = self.p_grid[1] - self.p_grid[0];
        let mut acc = T::zero();
        for i in 0..nx {
            let wx = if i == 0 || i == nx - 1 { T::of(0.5) } else { T::one() };
            for j in 0..np {
                let wp = if j == 0 || j == np - 1 { T::of(0.5) } else { T::one() };
                acc = acc + wx * wp * f(self.values[(i, j)]);
            }
        }
        acc * hx * hp
    }
}

/// First and second quadrature moments: (⟨a⟩, ⟨a²⟩, ⟨n⟩).
fn ladder_moments<T: Real>(state: &CavityState<T>) -> (Complex<T>, Complex<T>, T) {
    let d = state.dim();
    let mut a1: Complex<T> = Complex::zero();
    let mut a2: Complex<T> = Complex::zero();
    for n in 1..d {
        a1 = a1 + state.p(n, n - 1) * cr(T::of(n as f64).sqrt());
        if n >= 2 {
            a2 = a2 + state.p(n, n - 2) * cr(T::of((n * (n - 1)) as f64).sqrt());
        }
    }
    (a1, a2, state.number_moment(1))
}

fn check_grid_coverage<T: Real>(state: &CavityState<T>, grid: &GridSpec<T>) -> Result<()> {
    let (a1, a2, mean_n) = ladder_moments(state);
    let two = T::of(2.0);
    let x_mean = two.sqrt() * a1.re;
    let p_mean = two.sqrt() * a1.im;
    let x2 = (T::one() + two * mean_n + two * a2.re) / two;
    let p2 = (T::one() + two * mean_n - two * a2.re) / two;
    let x_sd = (x2 - x_mean * x_mean).max(T::zero()).sqrt();
    let p_sd = (p2 - p_mean * p_mean).max(T::zero()).sqrt();
    let needed = (x_mean.abs() + T::of(5.0) * x_sd).max(p_mean.abs() + T::of(5.0) * p_sd);
    if grid.half_width < needed {
        return Err(Error::GridTooSmall {
            needed: needed.to_f64_lossy(),
            got: grid.half_width.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Wigner function via the Fock-basis closed form
/// W_{nm} = (1/π)(−1)ⁿ √(2^{m−n} n!/m!) (x+ip)^{m−n} e^{−x²−p²} L_n^{m−n}(2(x²+p²)),
/// in the convention where the vacuum gives W(0,0) = 1/π.
pub fn wigner<T: Real>(state: &CavityState<T>, grid: &GridSpec<T>) -> Result<WignerField<T>> {
    check_grid_coverage(state, grid)?;
    let xs = grid.axis();
    let ps = grid.axis();
    let d = state.dim();
    let inv_pi = T::one() / T::PI();

    let rows: Vec<Vec<T>> = {
        use rayon::prelude::*;
        xs.par_iter()
            .map(|&x| {
                let mut row = vec![T::zero(); ps.len()];
                for (j, &p) in ps.iter().enumerate() {
                    row[j] = wigner_point(state, d, x, p) * inv_pi;
                }
                row
            })
            .collect()
    };
    let mut values = Array2::zeros((xs.len(), ps.len()));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, w) in row.into_iter().enumerate() {
            values[(i, j)] = w;
        }
    }
    Ok(WignerField { x_grid: xs, p_grid: ps, values })
}

fn wigner_point<T: Real>(state: &CavityState<T>, d: usize, x: T, p: T) -> T {
    let r2 = x * x + p * p;
    let gauss = (-r2).exp();
    let z = T::of(2.0) * r2;
    let amp = Complex::new(x, p);
    let mut acc = T::zero();
    // offset k = m - n; the k = 0 band is real, the rest enter twice via 2 Re
    let mut amp_pow: Complex<T> = Complex::new(T::one(), T::zero());
    for k in 0..d {
        // prefactor √(2^k n!/(n+k)!) at n = 0 is √(2^k / k!)
        let mut pref = T::one();
        for j in 1..=k {
            pref = pref * (T::of(2.0) / T::of(j as f64)).sqrt();
        }
        let mut lag_prev = T::zero();
        let mut lag = T::one(); // L_0^k
        let mut sign = T::one();
        for n in 0..d - k {
            let m = n + k;
            let entry = state.p(n, m);
            if !(entry.norm_sqr().is_zero()) {
                let radial = sign * pref * lag * gauss;
                if k == 0 {
                    acc = acc + entry.re * radial;
                } else {
                    acc = acc + T::of(2.0) * (entry * amp_pow).re * radial;
                }
            }
            // advance L_n^k -> L_{n+1}^k and the prefactor
            let np1 = T::of(n as f64 + 1.0);
            let kf = T::of(k as f64);
            let next = ((T::of(2.0) * np1 - T::one() + kf - z) * lag - (np1 - T::one() + kf) * lag_prev) / np1;
            lag_prev = lag;
            lag = next;
            pref = pref * (np1 / (np1 + kf)).sqrt();
            sign = -sign;
        }
        amp_pow = amp_pow * amp;
    }
    acc
}

/// Wigner logarithmic negativity ln ∫|W| dx dp, clamped at zero when the
/// integral is within grid tolerance of 1.
pub fn wln<T: Real>(state: &CavityState<T>, grid: &GridSpec<T>) -> Result<T> {
    let field = wigner(state, grid)?;
    Ok(wln_of_field(&field))
}

/// WLN of an already-computed field (lets callers reuse the grid values).
pub fn wln_of_field<T: Real>(field: &WignerField<T>) -> T {
    let integral = field.abs_mass();
    let raw = integral.ln();
    if raw < T::zero() && T::one() - integral <= T::of(GRID_MASS_TOL) {
        T::zero()
    } else {
        raw
    }
}

/// Squeezing parameter ξ = √2 · ΔX₁ with X₁ = (a† + a)/√2. Coherent states
/// (and the vacuum) give ξ = 1; ξ < 1 certifies squeezing.
pub fn squeezing_xi<T: Real>(state: &CavityState<T>) -> T {
    let (a1, a2, mean_n) = ladder_moments(state);
    let two = T::of(2.0);
    let x_mean = two.sqrt() * a1.re;
    let x2 = (T::one() + two * mean_n + two * a2.re) / two;
    let var = (x2 - x_mean * x_mean).max(T::zero());
    (two * var).sqrt()
}

/// Bundle of every witness for one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessReport<T: Real> {
    pub mean_n: T,
    pub second_moment_n: T,
    pub g2: T,
    pub wln: T,
    pub xi: T,
}

/// All witnesses of one state on one grid.
pub fn witness_report<T: Real>(state: &CavityState<T>, grid: &GridSpec<T>) -> Result<WitnessReport<T>> {
    Ok(WitnessReport {
        mean_n: state.number_moment(1),
        second_moment_n: state.number_moment(2),
        g2: g2(state)?,
        wln: wln(state, grid)?,
        xi: squeezing_xi(state),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalyst::{solve_catalyst_analytic, CatalystSolution};
    use crate::hilbert::{
        coherent_state, fock_state, partial_trace_cavity, random_atom_state, CavityState,
    };
    use crate::linalg::CMatrix;
    use ndarray::Array2;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use std::f64::consts::PI;

    fn mixture_quarter_three_quarters() -> CavityState<f64> {
        let mut m: CMatrix<f64> = Array2::zeros((8, 8));
        m[(0, 0)] = Complex64::new(0.25, 0.0);
        m[(2, 2)] = Complex64::new(0.75, 0.0);
        CavityState::from_matrix(m).unwrap()
    }

    #[test]
    fn g2_of_reference_states() {
        let coherent = coherent_state(Complex64::new(0.8, 0.3), 25).unwrap();
        assert!((g2(&coherent).unwrap() - 1.0).abs() < 1e-9);
        let f2 = fock_state::<f64>(2, 5).unwrap();
        assert!((g2(&f2).unwrap() - 0.5).abs() < 1e-14);
        let mix = mixture_quarter_three_quarters();
        assert!((g2(&mix).unwrap() - 2.0 / 3.0).abs() < 1e-14);
        assert!(matches!(
            g2(&fock_state::<f64>(0, 3).unwrap()),
            Err(Error::VacuumUndefined { .. })
        ));
    }

    #[test]
    fn g2_prediction_matches_full_evolution() {
        let p = SimulationParams::new(2.0 * PI, PI, 20).unwrap();
        let cavity = coherent_state(Complex64::new(1.0 / 2f64.sqrt(), 0.0), 20).unwrap();
        for &tau in &[1.3, 4.7, 9.2] {
            let atom = solve_catalyst_analytic(&cavity, &p, tau)
                .unwrap()
                .feasible()
                .unwrap();
            let predicted = g2_catalytic_predict(&cavity, &atom, &p, tau).unwrap();
            let joint = evolve_closed(&cavity, &atom, &p, tau).unwrap();
            let full = g2(&partial_trace_cavity(&joint)).unwrap();
            assert!(
                (predicted - full).abs() < 1e-8,
                "tau={tau}: {predicted} vs {full}"
            );
        }
    }

    #[test]
    fn g2_prediction_rejects_non_catalytic_atoms() {
        let p = SimulationParams::new(2.0 * PI, PI, 20).unwrap();
        let cavity = coherent_state(Complex64::new(1.0 / 2f64.sqrt(), 0.0), 20).unwrap();
        let result = g2_catalytic_predict(&cavity, &AtomState::ground(), &p, 2.0);
        assert!(matches!(result, Err(Error::NotCatalytic { .. })));
    }

    #[test]
    fn moment_relation_holds_at_zero_time_and_random_times() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let p = SimulationParams::new(2.0 * PI, PI, 12).unwrap();
        let cavity = coherent_state(Complex64::new(0.7, 0.0), 12).unwrap();
        for _ in 0..3 {
            let atom = random_atom_state(&mut rng);
            assert!(verify_moment_relation(&cavity, &atom, &p, 0.0, 2).unwrap() < 1e-12);
            for k in 2..=4 {
                let res = verify_moment_relation(&cavity, &atom, &p, 3.3, k).unwrap();
                assert!(res < 1e-9, "k={k}: residual {res}");
            }
        }
        assert!(verify_moment_relation(&cavity, &AtomState::ground(), &p, 1.0, 1).is_err());
    }

    #[test]
    fn vacuum_wigner_is_the_unit_gaussian() {
        let vacuum = fock_state::<f64>(0, 6).unwrap();
        let grid = GridSpec::new(6.0, 121).unwrap();
        let field = wigner(&vacuum, &grid).unwrap();
        let mid = (grid.points - 1) / 2;
        assert!((field.values[(mid, mid)] - 1.0 / PI).abs() < 1e-12);
        // spot-check the Gaussian away from the origin
        let x = field.x_grid[mid + 10];
        let expected = (-x * x).exp() / PI;
        assert!((field.values[(mid + 10, mid)] - expected).abs() < 1e-12);
        assert!((field.total_mass() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn fock_one_wigner_is_negative_at_the_origin() {
        let one = fock_state::<f64>(1, 6).unwrap();
        let grid = GridSpec::new(7.0, 141).unwrap();
        let field = wigner(&one, &grid).unwrap();
        let mid = (grid.points - 1) / 2;
        assert!((field.values[(mid, mid)] + 1.0 / PI).abs() < 1e-12);
        assert!(wln(&one, &grid).unwrap() > 0.0);
    }

    #[test]
    fn coherent_wigner_is_a_displaced_gaussian() {
        let alpha = Complex64::new(0.9, -0.4);
        let state = coherent_state(alpha, 25).unwrap();
        let grid = GridSpec::new(7.0, 141).unwrap();
        let field = wigner(&state, &grid).unwrap();
        // peak position (√2 Re α, √2 Im α)
        let mut best = (0usize, 0usize);
        let mut best_val = f64::MIN;
        for i in 0..grid.points {
            for j in 0..grid.points {
                if field.values[(i, j)] > best_val {
                    best_val = field.values[(i, j)];
                    best = (i, j);
                }
            }
        }
        let step = grid.step();
        assert!((field.x_grid[best.0] - 2f64.sqrt() * alpha.re).abs() <= step);
        assert!((field.p_grid[best.1] - 2f64.sqrt() * alpha.im).abs() <= step);
        // everywhere nonnegative up to round-off
        let min = field.values.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(min > -1e-12);
        // hence zero logarithmic negativity
        assert_eq!(wln(&state, &grid).unwrap(), 0.0);
    }

    #[test]
    fn wigner_matches_quadrature_oracle() {
        // literal integral of the defining transform with Hermite functions
        fn hermite_functions(x: f64, d: usize) -> Vec<f64> {
            let mut psi = vec![0.0; d];
            psi[0] = (-x * x / 2.0).exp() / PI.powf(0.25);
            if d > 1 {
                psi[1] = 2f64.sqrt() * x * psi[0];
            }
            for n in 1..d.saturating_sub(1) {
                psi[n + 1] = (2.0 / (n as f64 + 1.0)).sqrt() * x * psi[n]
                    - (n as f64 / (n as f64 + 1.0)).sqrt() * psi[n - 1];
            }
            psi
        }
        fn oracle(state: &CavityState<f64>, x: f64, p: f64) -> f64 {
            let d = state.dim();
            let half = 8.0;
            let steps = 1601;
            let h = 2.0 * half / (steps - 1) as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for s in 0..steps {
                let y = -half + s as f64 * h;
                let w = if s == 0 || s == steps - 1 { 0.5 } else { 1.0 };
                let left = hermite_functions(x - y, d);
                let right = hermite_functions(x + y, d);
                let mut kernel = Complex64::new(0.0, 0.0);
                for n in 0..d {
                    for m in 0..d {
                        kernel += state.p(n, m) * left[n] * right[m];
                    }
                }
                acc += Complex64::new(0.0, 2.0 * p * y).exp() * kernel * w;
            }
            (acc * h / PI).re
        }

        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let state: CavityState<f64> = crate::hilbert::random_density_matrix(5, &mut rng);
        let grid = GridSpec::new(10.5, 43).unwrap();
        let field = wigner(&state, &grid).unwrap();
        for &(i, j) in &[(20usize, 20usize), (23, 18), (28, 26), (15, 24)] {
            let direct = field.values[(i, j)];
            let reference = oracle(&state, field.x_grid[i], field.p_grid[j]);
            assert!(
                (direct - reference).abs() < 1e-9,
                "W({}, {}): {direct} vs {reference}",
                field.x_grid[i],
                field.p_grid[j]
            );
        }
    }

    #[test]
    fn grid_coverage_is_enforced() {
        let state = coherent_state(Complex64::new(2.0, 0.0), 35).unwrap();
        let grid = GridSpec::new(2.0, 41).unwrap();
        assert!(matches!(wigner(&state, &grid), Err(Error::GridTooSmall { .. })));
    }

    #[test]
    fn squeezing_of_reference_states() {
        let vac = fock_state::<f64>(0, 4).unwrap();
        assert!((squeezing_xi(&vac) - 1.0).abs() < 1e-12);
        let coh = coherent_state(Complex64::new(0.5, 0.8), 22).unwrap();
        assert!((squeezing_xi(&coh) - 1.0).abs() < 1e-9);
        // Fock |1> is anti-squeezed in both quadratures
        let one = fock_state::<f64>(1, 4).unwrap();
        assert!(squeezing_xi(&one) > 1.0);
    }
}
