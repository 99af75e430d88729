//! Dense complex linear algebra on `ndarray` storage.
//!
//! Dimensions in this crate stay small (joint spaces below ~10³ states,
//! Liouvillian superoperators below ~2·10³ rows), so plain dense algorithms
//! are used throughout: Gaussian elimination with partial pivoting, Padé(13)
//! scaling-and-squaring for the matrix exponential, cyclic Jacobi for
//! Hermitian eigendecompositions, a values-only Householder + implicit-QL
//! path for Hermitian spectra of larger matrices, and a shifted Hessenberg QR
//! iteration for general complex spectra.

use ndarray::{Array1, Array2};
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{cr, Real};

/// Dense complex matrix.
pub type CMatrix<T> = Array2<Complex<T>>;
/// Dense complex vector.
pub type CVector<T> = Array1<Complex<T>>;

pub use ndarray::linalg::kron;

/// n×n identity.
pub fn identity<T: Real>(n: usize) -> CMatrix<T> {
    Array2::from_diag_elem(n, Complex::one())
}

/// Conjugate transpose.
pub fn dagger<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let (r, c) = m.dim();
    Array2::from_shape_fn((c, r), |(i, j)| m[(j, i)].conj())
}

/// Matrix trace.
pub fn trace<T: Real>(m: &CMatrix<T>) -> Complex<T> {
    m.diag().iter().fold(Complex::zero(), |acc, z| acc + z)
}

/// Entrywise scaling.
pub fn scale<T: Real>(m: &CMatrix<T>, z: Complex<T>) -> CMatrix<T> {
    m.mapv(|x| x * z)
}

/// Largest entry magnitude.
pub fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
}

/// Largest entrywise difference |a - b|.
pub fn max_abs_diff<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    debug_assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .fold(T::zero(), |acc, (x, y)| acc.max((*x - *y).norm()))
}

/// Induced 1-norm (max column absolute sum).
pub fn one_norm<T: Real>(m: &CMatrix<T>) -> T {
    let mut best = T::zero();
    for col in m.columns() {
        let s = col.iter().fold(T::zero(), |acc, z| acc + z.norm());
        best = best.max(s);
    }
    best
}

/// Frobenius norm.
pub fn fro_norm<T: Real>(m: &CMatrix<T>) -> T {
    m.iter()
        .fold(T::zero(), |acc, z| acc + z.norm_sqr())
        .sqrt()
}

/// Symmetrized (Hermitian) part (M + M†)/2.
pub fn hermitize<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let half = cr(T::of(0.5));
    let md = dagger(m);
    Array2::from_shape_fn(m.dim(), |(i, j)| (m[(i, j)] + md[(i, j)]) * half)
}

/// Column-major vectorization: `vec(M)[i + nrows*j] = M[i, j]`.
pub fn vec_col<T: Real>(m: &CMatrix<T>) -> CVector<T> {
    let (nr, nc) = m.dim();
    Array1::from_shape_fn(nr * nc, |k| m[(k % nr, k / nr)])
}

/// Inverse of [`vec_col`].
pub fn unvec_col<T: Real>(v: &CVector<T>, nrows: usize) -> CMatrix<T> {
    assert_eq!(v.len() % nrows, 0, "vector length must be divisible by nrows");
    let ncols = v.len() / nrows;
    Array2::from_shape_fn((nrows, ncols), |(i, j)| v[i + nrows * j])
}

/// Solve A X = B by Gaussian elimination with partial pivoting.
pub fn solve<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return Err(Error::DimensionMismatch { left: n, right: b.nrows() });
    }
    let m = b.ncols();
    let mut lu = a.clone();
    let mut x = b.clone();
    let scale_ref = one_norm(a).max(T::min_positive_value());
    for col in 0..n {
        let mut piv_row = col;
        let mut piv_mag = lu[(col, col)].norm();
        for row in col + 1..n {
            let mag = lu[(row, col)].norm();
            if mag > piv_mag {
                piv_mag = mag;
                piv_row = row;
            }
        }
        if piv_mag <= T::epsilon() * scale_ref * T::of(16.0) {
            return Err(Error::SingularMatrix { pivot: piv_mag.to_f64_lossy() });
        }
        if piv_row != col {
            for j in 0..n {
                lu.swap((col, j), (piv_row, j));
            }
            for j in 0..m {
                x.swap((col, j), (piv_row, j));
            }
        }
        let pivot = lu[(col, col)];
        for row in col + 1..n {
            let factor = lu[(row, col)] / pivot;
            if factor.is_zero() {
                continue;
            }
            for j in col..n {
                let v = lu[(col, j)];
                lu[(row, j)] = lu[(row, j)] - factor * v;
            }
            for j in 0..m {
                let v = x[(col, j)];
                x[(row, j)] = x[(row, j)] - factor * v;
            }
        }
    }
    for col in (0..n).rev() {
        let pivot = lu[(col, col)];
        for j in 0..m {
            let mut sum = x[(col, j)];
            for k in col + 1..n {
                sum = sum - lu[(col, k)] * x[(k, j)];
            }
            x[(col, j)] = sum / pivot;
        }
    }
    Ok(x)
}

// Padé(13) coefficients b_k / b_0 (Higham 2005, Table 10.2 / Eq. 10.33).
const PADE13: [f64; 14] = [
    1.0,
    0.5,
    0.12,
    1.833_333_333_333_333_4e-2,
    1.992_753_623_188_405_8e-3,
    1.630_434_782_608_696e-4,
    1.035_196_687_370_6e-5,
    5.175_983_436_853_03e-7,
    2.043_151_356_652_5e-8,
    6.306_022_705_717_595e-10,
    1.483_770_048_404_14e-11,
    2.529_153_491_597_966e-13,
    2.810_170_546_219_962e-15,
    1.544_049_750_670_309e-17,
];
const PADE13_THETA: f64 = 5.371_920_351_148_152;

/// Matrix exponential by Padé(13) with scaling and squaring.
pub fn expm<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if n == 0 {
        return a.clone();
    }
    let norm = one_norm(a).to_f64_lossy();
    let squarings = if norm > PADE13_THETA {
        (norm / PADE13_THETA).log2().ceil() as u32
    } else {
        0
    };
    let shrink = cr(T::of(0.5).powi(squarings as i32));
    let a_s = scale(a, shrink);

    let eye = identity::<T>(n);
    let a2 = a_s.dot(&a_s);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);
    let b = |k: usize| cr(T::of(PADE13[k]));

    let w1 = scale(&a6, b(13)) + scale(&a4, b(11)) + scale(&a2, b(9));
    let w2 = w1.dot(&a6) + scale(&a6, b(7)) + scale(&a4, b(5)) + scale(&a2, b(3)) + scale(&eye, b(1));
    let u = a_s.dot(&w2);
    let v1 = scale(&a6, b(12)) + scale(&a4, b(10)) + scale(&a2, b(8));
    let v = v1.dot(&a6) + scale(&a6, b(6)) + scale(&a4, b(4)) + scale(&a2, b(2)) + scale(&eye, b(0));

    let num = &v + &u;
    let den = &v - &u;
    let mut result = solve(&den, &num).expect("Padé denominator is nonsingular by construction");
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

/// Hermitian eigendecomposition by cyclic Jacobi.
///
/// Returns eigenvalues in ascending order and the unitary whose columns are
/// the matching eigenvectors. The input is symmetrized first; feeding a
/// matrix that is far from Hermitian is a caller bug.
pub fn hermitian_eigen<T: Real>(m: &CMatrix<T>) -> (Array1<T>, CMatrix<T>) {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "hermitian_eigen needs a square matrix");
    let mut a = hermitize(m);
    let mut v = identity::<T>(n);
    if n <= 1 {
        let vals = Array1::from_shape_fn(n, |i| a[(i, i)].re);
        return (vals, v);
    }
    let scale_ref = fro_norm(&a).max(T::min_positive_value());
    let stop = T::epsilon() * scale_ref * T::of(0.5);
    for _sweep in 0..64 {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off = off + a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= T::epsilon() * scale_ref * T::of(1e-3) {
                    continue;
                }
                let phase = apq / cr(mag);
                let tau = (a[(q, q)].re - a[(p, p)].re) / (T::of(2.0) * mag);
                let t = if tau.is_zero() {
                    T::one()
                } else {
                    tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt())
                };
                let cth = T::one() / (T::one() + t * t).sqrt();
                let sth = t * cth;
                // J = I with block [[c, s φ], [-s φ*, c]] on (p, q); A <- J† A J.
                let s_ph = phase * cr(sth);
                let s_ph_c = s_ph.conj();
                let cc = cr(cth);
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * cc - akq * s_ph_c;
                    a[(k, q)] = akp * s_ph + akq * cc;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * cc - s_ph * aqk;
                    a[(q, k)] = apk * s_ph_c + aqk * cc;
                }
                a[(p, q)] = Complex::zero();
                a[(q, p)] = Complex::zero();
                a[(p, p)] = cr(a[(p, p)].re);
                a[(q, q)] = cr(a[(q, q)].re);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * cc - vkq * s_ph_c;
                    v[(k, q)] = vkp * s_ph + vkq * cc;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).expect("finite eigenvalues"));
    let vals = Array1::from_shape_fn(n, |i| a[(order[i], order[i])].re);
    let vecs = Array2::from_shape_fn((n, n), |(i, j)| v[(i, order[j])]);
    (vals, vecs)
}

/// Hermitian eigenvalues only, ascending.
///
/// The Hermitian problem is lifted to a real symmetric one of twice the size
/// (each eigenvalue appears twice), reduced to tridiagonal form by
/// Householder reflections and solved by the implicit-shift QL iteration.
/// This is the cheap path used for PSD gates, trace norms and fidelities of
/// larger matrices where eigenvectors are not needed.
pub fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> Array1<T> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "hermitian_eigenvalues needs a square matrix");
    if n == 0 {
        return Array1::zeros(0);
    }
    let h = hermitize(m);
    // B = [[X, -Y], [Y, X]] for H = X + iY is symmetric with doubled spectrum.
    let mut b = Array2::<T>::zeros((2 * n, 2 * n));
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            b[(i, j)] = z.re;
            b[(i + n, j + n)] = z.re;
            b[(i, j + n)] = -z.im;
            b[(i + n, j)] = z.im;
        }
    }
    let (mut d, mut e) = sym_tridiagonalize(&mut b);
    tridiag_eigenvalues(&mut d, &mut e);
    d.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Array1::from_shape_fn(n, |i| d[2 * i])
}

/// Householder reduction of a real symmetric matrix to tridiagonal form
/// (values-only; the matrix is destroyed). Returns (diagonal, subdiagonal)
/// with `e[i]` coupling rows i and i+1, `e[n-1]` unused.
fn sym_tridiagonalize<T: Real>(a: &mut Array2<T>) -> (Vec<T>, Vec<T>) {
    let n = a.nrows();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    for k in 0..n.saturating_sub(2) {
        let mut sigma = T::zero();
        for i in k + 1..n {
            sigma = sigma + a[(i, k)] * a[(i, k)];
        }
        let x0 = a[(k + 1, k)];
        if sigma.is_zero() {
            e[k] = T::zero();
            continue;
        }
        let norm = sigma.sqrt();
        let alpha = if x0 >= T::zero() { -norm } else { norm };
        e[k] = alpha;
        // v = x - alpha e1, H = I - 2 v v^T / (v^T v)
        let mut v = vec![T::zero(); n];
        v[k + 1] = x0 - alpha;
        for i in k + 2..n {
            v[i] = a[(i, k)];
        }
        let vnorm2 = v[k + 1..n].iter().fold(T::zero(), |acc, &x| acc + x * x);
        if vnorm2.is_zero() {
            continue;
        }
        // w = 2 A v / v'v restricted to trailing block; K = v'w / v'v
        let mut w = vec![T::zero(); n];
        for i in k + 1..n {
            let mut s = T::zero();
            for j in k + 1..n {
                s = s + a[(i, j)] * v[j];
            }
            w[i] = T::of(2.0) * s / vnorm2;
        }
        let vw: T = (k + 1..n).fold(T::zero(), |acc, i| acc + v[i] * w[i]);
        let kk = vw / vnorm2;
        for i in k + 1..n {
            w[i] = w[i] - kk * v[i];
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[(i, j)] = a[(i, j)] - v[i] * w[j] - w[i] * v[j];
            }
        }
        a[(k + 1, k)] = alpha;
    }
    for i in 0..n {
        d[i] = a[(i, i)];
    }
    if n >= 2 {
        e[n - 2] = a[(n - 1, n - 2)];
    }
    // shift so e[i] couples i and i+1
    (d, e)
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix
/// (eigenvalues only). `e[i]` couples entries i and i+1.
fn tridiag_eigenvalues<T: Real>(d: &mut [T], e: &mut [T]) {
    let n = d.len();
    if n == 0 {
        return;
    }
    e[n - 1] = T::zero();
    // absolute deflation floor: a subdiagonal below eps * ||T|| cannot move
    // any eigenvalue by more than eps * ||T|| (rank-deficient inputs have
    // long runs of zero diagonals, so a purely relative test would stall)
    let anorm = d
        .iter()
        .zip(e.iter())
        .fold(T::zero(), |acc, (&di, &ei)| acc.max(di.abs() + ei.abs()));
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = (d[m].abs() + d[m + 1].abs()).max(anorm);
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 64, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (T::of(2.0) * e[l]);
            let mut r = g.hypot(T::one());
            let sign_r = if g >= T::zero() { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + sign_r);
            let (mut s, mut c) = (T::one(), T::one());
            let mut p = T::zero();
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r.is_zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + T::of(2.0) * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
}

/// Principal square root of a PSD Hermitian matrix.
///
/// Eigenvalues below `-floor` raise [`Error::NonPsdInput`]; small negative
/// round-off eigenvalues are clipped to zero.
pub fn sqrtm_psd<T: Real>(m: &CMatrix<T>, floor: T) -> Result<CMatrix<T>> {
    let (vals, vecs) = hermitian_eigen(m);
    let lowest = vals.iter().copied().fold(T::infinity(), T::min);
    if lowest < -floor {
        return Err(Error::NonPsdInput { floor: lowest.to_f64_lossy() });
    }
    let n = m.nrows();
    let sqrt_vals: Vec<T> = vals.iter().map(|&x| x.max(T::zero()).sqrt()).collect();
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex::zero();
            for k in 0..n {
                acc = acc + vecs[(i, k)] * cr(sqrt_vals[k]) * vecs[(j, k)].conj();
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Nuclear norm (sum of singular values) by one-sided Jacobi.
///
/// Column pairs are rotated until mutually orthogonal; the singular values
/// are then the column norms. Unlike forming M†M and taking eigenvalue
/// square roots, each singular value comes out with absolute accuracy
/// ~eps·‖M‖, which the fidelity of near-singular states relies on.
pub fn nuclear_norm<T: Real>(m: &CMatrix<T>) -> T {
    let mut a = if m.ncols() > m.nrows() { dagger(m) } else { m.clone() };
    let n = a.ncols();
    let rows = a.nrows();
    if n == 0 || rows == 0 {
        return T::zero();
    }
    let total2 = a.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
    let negligible = total2 * T::epsilon() * T::epsilon();
    for _sweep in 0..60 {
        let mut converged = true;
        for p in 0..n {
            for q in p + 1..n {
                let mut app = T::zero();
                let mut aqq = T::zero();
                let mut apq: Complex<T> = Complex::zero();
                for k in 0..rows {
                    let zp = a[(k, p)];
                    let zq = a[(k, q)];
                    app = app + zp.norm_sqr();
                    aqq = aqq + zq.norm_sqr();
                    apq = apq + zp.conj() * zq;
                }
                if app <= negligible || aqq <= negligible {
                    continue;
                }
                let mag = apq.norm();
                if mag <= T::epsilon() * (app * aqq).sqrt() {
                    continue;
                }
                converged = false;
                let phase = apq / cr(mag);
                let tau = (aqq - app) / (T::of(2.0) * mag);
                let t = if tau.is_zero() {
                    T::one()
                } else {
                    tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt())
                };
                let cth = T::one() / (T::one() + t * t).sqrt();
                let sth = t * cth;
                let s_ph = phase * cr(sth);
                let cc = cr(cth);
                for k in 0..rows {
                    let zp = a[(k, p)];
                    let zq = a[(k, q)];
                    a[(k, p)] = zp * cc - zq * s_ph.conj();
                    a[(k, q)] = zp * s_ph + zq * cc;
                }
            }
        }
        if converged {
            break;
        }
    }
    let mut sum = T::zero();
    for p in 0..n {
        let norm2 = (0..rows).fold(T::zero(), |acc, k| acc + a[(k, p)].norm_sqr());
        sum = sum + norm2.sqrt();
    }
    sum
}

/// Eigenvalues of a general complex matrix.
///
/// Householder reduction to Hessenberg form followed by the explicitly
/// shifted QR iteration with a Wilkinson shift. Used for spectral
/// diagnostics (e.g. checking that a Liouvillian has no eigenvalue with
/// positive real part); not a performance path.
pub fn complex_eigenvalues<T: Real>(m: &CMatrix<T>) -> Vec<Complex<T>> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "complex_eigenvalues needs a square matrix");
    let mut h = hessenberg(m);
    let mut eigs = Vec::with_capacity(n);
    let mut hi = n; // active block is 0..hi
    let scale_ref = one_norm(m).max(T::min_positive_value());
    let mut iter_guard = 0usize;
    while hi > 0 {
        iter_guard += 1;
        assert!(iter_guard < 60 * n + 60, "QR iteration failed to converge");
        // deflate tiny subdiagonals
        for i in 1..hi {
            let tol = T::epsilon() * (h[(i - 1, i - 1)].norm() + h[(i, i)].norm()).max(scale_ref * T::epsilon());
            if h[(i, i - 1)].norm() <= tol {
                h[(i, i - 1)] = Complex::zero();
            }
        }
        if hi == 1 {
            eigs.push(h[(0, 0)]);
            hi = 0;
            continue;
        }
        if h[(hi - 1, hi - 2)].is_zero() {
            eigs.push(h[(hi - 1, hi - 1)]);
            hi -= 1;
            continue;
        }
        // start of the unreduced block ending at hi-1
        let mut lo = hi - 1;
        while lo > 0 && !h[(lo, lo - 1)].is_zero() {
            lo -= 1;
        }
        if hi - lo == 2 {
            let (l1, l2) = eig2(h[(lo, lo)], h[(lo, lo + 1)], h[(lo + 1, lo)], h[(lo + 1, lo + 1)]);
            eigs.push(l1);
            eigs.push(l2);
            hi = lo;
            continue;
        }
        // Wilkinson shift from the trailing 2x2 of the active block
        let (l1, l2) = eig2(
            h[(hi - 2, hi - 2)],
            h[(hi - 2, hi - 1)],
            h[(hi - 1, hi - 2)],
            h[(hi - 1, hi - 1)],
        );
        let target = h[(hi - 1, hi - 1)];
        let shift = if (l1 - target).norm() <= (l2 - target).norm() { l1 } else { l2 };
        let shift = if iter_guard % 17 == 0 {
            // occasional exceptional shift to break symmetry stalls
            shift + cr(h[(hi - 1, hi - 2)].norm())
        } else {
            shift
        };
        qr_step(&mut h, lo, hi, shift);
    }
    eigs
}

/// Eigenvalues of [[a, b], [c, d]].
fn eig2<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> (Complex<T>, Complex<T>) {
    let half = cr(T::of(0.5));
    let tr = (a + d) * half;
    let det = a * d - b * c;
    let disc = (tr * tr - det).sqrt();
    (tr + disc, tr - disc)
}

/// One explicit shifted QR sweep on the active Hessenberg block [lo, hi).
fn qr_step<T: Real>(h: &mut CMatrix<T>, lo: usize, hi: usize, shift: Complex<T>) {
    let n = h.nrows();
    // QR of (H - shift I) via Givens rotations on the subdiagonal
    let mut rot: Vec<(Complex<T>, Complex<T>)> = Vec::with_capacity(hi - lo - 1);
    for i in lo..hi {
        h[(i, i)] = h[(i, i)] - shift;
    }
    for i in lo..hi - 1 {
        let a = h[(i, i)];
        let b = h[(i + 1, i)];
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (c, s) = if r.is_zero() {
            (Complex::one(), Complex::zero())
        } else {
            (a.conj() / cr(r), b.conj() / cr(r))
        };
        // apply G = [[c, s], [-s̄, c̄]] on rows i, i+1
        for j in i..n {
            let x = h[(i, j)];
            let y = h[(i + 1, j)];
            h[(i, j)] = c * x + s * y;
            h[(i + 1, j)] = -s.conj() * x + c.conj() * y;
        }
        rot.push((c, s));
    }
    // H <- R Q* ... multiply by G† on columns: H <- H G_i†
    for (i, (c, s)) in rot.iter().enumerate() {
        let col = lo + i;
        for j in 0..(col + 2).min(n) {
            let x = h[(j, col)];
            let y = h[(j, col + 1)];
            h[(j, col)] = x * c.conj() + y * s.conj();
            h[(j, col + 1)] = -(x * *s) + y * *c;
        }
    }
    for i in lo..hi {
        h[(i, i)] = h[(i, i)] + shift;
    }
}

/// Householder reduction to upper Hessenberg form.
fn hessenberg<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let n = m.nrows();
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        let mut sigma = T::zero();
        for i in k + 1..n {
            sigma = sigma + h[(i, k)].norm_sqr();
        }
        if sigma.is_zero() {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let norm = sigma.sqrt();
        let phase = if x0.is_zero() { Complex::one() } else { x0 / cr(x0.norm()) };
        let alpha = -phase * cr(norm);
        let mut v: Vec<Complex<T>> = vec![Complex::zero(); n];
        v[k + 1] = x0 - alpha;
        for i in k + 2..n {
            v[i] = h[(i, k)];
        }
        let vnorm2 = v[k + 1..n]
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr());
        if vnorm2.is_zero() {
            continue;
        }
        let beta = T::of(2.0) / vnorm2;
        // H <- P H P with P = I - beta v v†
        for j in 0..n {
            let mut s: Complex<T> = Complex::zero();
            for i in k + 1..n {
                s = s + v[i].conj() * h[(i, j)];
            }
            s = s * cr(beta);
            for i in k + 1..n {
                h[(i, j)] = h[(i, j)] - v[i] * s;
            }
        }
        for i in 0..n {
            let mut s: Complex<T> = Complex::zero();
            for j in k + 1..n {
                s = s + h[(i, j)] * v[j];
            }
            s = s * cr(beta);
            for j in k + 1..n {
                h[(i, j)] = h[(i, j)] - s * v[j].conj();
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = Complex::zero();
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn random_matrix(n: usize, seed: u64) -> CMatrix<f64> {
        // small deterministic LCG; good enough to exercise the algebra
        let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state as f64 / u64::MAX as f64) * 2.0 - 1.0
        };
        Array2::from_shape_fn((n, n), |_| Complex64::new(next(), next()))
    }

    #[test]
    fn solve_recovers_identity() {
        let a = random_matrix(7, 3);
        let x = solve(&a, &identity::<f64>(7)).unwrap();
        let err = max_abs_diff(&a.dot(&x), &identity::<f64>(7));
        assert!(err < 1e-11, "inverse residual {err}");
    }

    #[test]
    fn expm_diagonal_and_nilpotent() {
        // diagonal case
        let mut d = Array2::zeros((3, 3));
        d[(0, 0)] = Complex64::new(1.0, 0.0);
        d[(1, 1)] = Complex64::new(0.0, 2.0);
        d[(2, 2)] = Complex64::new(-0.5, -1.0);
        let e = expm(&d);
        for i in 0..3 {
            let expected = d[(i, i)].exp();
            assert!((e[(i, i)] - expected).norm() < 1e-13);
        }
        // nilpotent case: exp([[0,1],[0,0]]) = [[1,1],[0,1]]
        let mut nil = Array2::zeros((2, 2));
        nil[(0, 1)] = Complex64::new(1.0, 0.0);
        let e = expm(&nil);
        assert!((e[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((e[(0, 1)] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((e[(1, 0)]).norm() < 1e-14);
    }

    #[test]
    fn expm_additivity_for_commuting() {
        let a = {
            let m = random_matrix(6, 11);
            hermitize(&m)
        };
        // exp(A) exp(A) = exp(2A)
        let e1 = expm(&a);
        let e2 = expm(&scale(&a, Complex64::new(2.0, 0.0)));
        let err = max_abs_diff(&e1.dot(&e1), &e2);
        assert!(err < 1e-10, "additivity residual {err}");
    }

    #[test]
    fn jacobi_eigen_reconstructs() {
        let h = hermitize(&random_matrix(12, 5));
        let (vals, vecs) = hermitian_eigen(&h);
        // V diag V† = H
        let n = 12;
        let mut rec: CMatrix<f64> = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += vecs[(i, k)] * Complex64::new(vals[k], 0.0) * vecs[(j, k)].conj();
                }
                rec[(i, j)] = acc;
            }
        }
        let err = max_abs_diff(&rec, &h);
        assert!(err < 1e-11, "reconstruction residual {err}");
        // unitarity
        let err_u = max_abs_diff(&dagger(&vecs).dot(&vecs), &identity::<f64>(n));
        assert!(err_u < 1e-12, "non-unitary eigenbasis {err_u}");
        // ascending
        for k in 1..n {
            assert!(vals[k] >= vals[k - 1]);
        }
    }

    #[test]
    fn tridiag_values_match_jacobi() {
        for seed in 0..5 {
            let h = hermitize(&random_matrix(15, 100 + seed));
            let (jac, _) = hermitian_eigen(&h);
            let fast = hermitian_eigenvalues(&h);
            for k in 0..15 {
                assert!(
                    close(jac[k], fast[k], 1e-10),
                    "eigenvalue {k}: {} vs {}",
                    jac[k],
                    fast[k]
                );
            }
        }
    }

    #[test]
    fn sqrtm_squares_back() {
        let g = random_matrix(9, 42);
        let psd = g.dot(&dagger(&g));
        let root = sqrtm_psd(&psd, 1e-10).unwrap();
        let err = max_abs_diff(&root.dot(&root), &psd);
        assert!(err < 1e-10, "sqrt residual {err}");
    }

    #[test]
    fn sqrtm_rejects_indefinite() {
        let mut m = identity::<f64>(3);
        m[(2, 2)] = Complex64::new(-0.5, 0.0);
        assert!(matches!(sqrtm_psd(&m, 1e-10), Err(Error::NonPsdInput { .. })));
    }

    #[test]
    fn general_eigenvalues_match_hermitian_case() {
        let h = hermitize(&random_matrix(10, 8));
        let mut reference: Vec<f64> = hermitian_eigenvalues(&h).to_vec();
        let mut general: Vec<f64> = complex_eigenvalues(&h)
            .into_iter()
            .map(|z| {
                assert!(z.im.abs() < 1e-9, "Hermitian spectrum must be real, got {z}");
                z.re
            })
            .collect();
        reference.sort_by(|a, b| a.partial_cmp(b).unwrap());
        general.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for k in 0..10 {
            assert!(close(reference[k], general[k], 1e-9));
        }
    }

    #[test]
    fn general_eigenvalues_match_trace_and_det_upper_triangular() {
        let mut m = random_matrix(8, 21);
        for i in 0..8 {
            for j in 0..i {
                m[(i, j)] = Complex64::new(0.0, 0.0);
            }
        }
        let mut eigs = complex_eigenvalues(&m);
        let mut diag: Vec<Complex64> = (0..8).map(|i| m[(i, i)]).collect();
        let key = |z: &Complex64| (z.re, z.im);
        eigs.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        diag.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        for k in 0..8 {
            assert!((eigs[k] - diag[k]).norm() < 1e-9, "{} vs {}", eigs[k], diag[k]);
        }
    }

    #[test]
    fn vec_unvec_roundtrip() {
        let m = random_matrix(5, 77);
        let v = vec_col(&m);
        // column-major convention: vec(|i><j|) has a 1 at i + n*j
        assert_eq!(v[3 + 5 * 2], m[(3, 2)]);
        let back = unvec_col(&v, 5);
        assert_eq!(max_abs_diff(&back, &m), 0.0);
    }

    #[test]
    fn kron_identity_structure() {
        let a = random_matrix(3, 9);
        let k = kron(&a, &identity::<f64>(2));
        assert_eq!(k.dim(), (6, 6));
        assert_eq!(k[(0, 0)], a[(0, 0)]);
        assert_eq!(k[(1, 1)], a[(0, 0)]);
        assert_eq!(k[(2, 0)], a[(1, 0)]);
    }

    #[test]
    fn works_at_f32() {
        let a: CMatrix<f32> = Array2::from_shape_fn((4, 4), |(i, j)| {
            Complex::new((i + 1) as f32 * 0.1, (j as f32) * 0.05)
        });
        let h = hermitize(&a);
        let (vals, _) = hermitian_eigen(&h);
        let fast = hermitian_eigenvalues(&h);
        for k in 0..4 {
            assert!((vals[k] - fast[k]).abs() < 1e-4);
        }
        let e = expm(&h);
        assert!(e[(0, 0)].re.is_finite());
    }
}
