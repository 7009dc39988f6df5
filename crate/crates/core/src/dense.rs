//! Thin wrappers around the dense linear-algebra backend.
//!
//! Everything the crate needs from dense complex linear algebra funnels
//! through here: determinants of `I + Q`, the eigenvalue of `Q` nearest a
//! shift, and largest singular values. Keeping the backend behind this module
//! makes the rest of the crate independent of the matrix library.

use faer::prelude::*;
use num_complex::Complex64;

/// Dense complex matrix used for discretized operators.
pub type CMat = faer::Mat<faer::complex_native::c64>;

fn c(z: Complex64) -> faer::complex_native::c64 {
    faer::complex_native::c64::new(z.re, z.im)
}

fn nc(z: faer::complex_native::c64) -> Complex64 {
    Complex64::new(z.re, z.im)
}

/// Builds an `n x n` matrix from a closure.
pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> CMat {
    CMat::from_fn(n, n, |i, j| c(f(i, j)))
}

/// Determinant in overflow-safe polar form: `exp(log_abs) * exp(i arg)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    pub log_abs: f64,
    pub arg: f64,
}

impl LogDet {
    /// The determinant itself; may overflow or underflow for large matrices,
    /// in which case work with the polar data directly.
    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(self.log_abs.exp(), self.arg)
    }

    /// `exp(log_abs - shift) * exp(i arg)`: the determinant divided by
    /// `exp(shift)`, for forming ratios of determinants without overflow.
    pub fn value_shifted(&self, shift: f64) -> Complex64 {
        Complex64::from_polar((self.log_abs - shift).exp(), self.arg)
    }
}

/// `log det(I + Q)` via partial-pivot LU, accumulated in polar form so that
/// products over thousands of pivots cannot overflow.
pub fn log_det_i_plus(q: &CMat) -> LogDet {
    let n = q.nrows();
    let mut a = q.clone();
    for i in 0..n {
        a[(i, i)] += faer::complex_native::c64::new(1.0, 0.0);
    }
    let lu = a.partial_piv_lu();
    let u = lu.compute_u();
    let mut log_abs = 0.0;
    let mut arg = 0.0;
    for i in 0..n {
        let d = nc(u[(i, i)]);
        log_abs += d.norm().ln();
        arg += d.arg();
    }
    let (fwd, _) = lu.row_permutation().arrays();
    if permutation_sign(fwd) < 0.0 {
        arg += std::f64::consts::PI;
    }
    LogDet { log_abs, arg }
}

/// Determinant of `I + Q` via partial-pivot LU.
pub fn det_i_plus(q: &CMat) -> Complex64 {
    log_det_i_plus(q).value()
}

fn permutation_sign(fwd: &[usize]) -> f64 {
    let mut seen = vec![false; fwd.len()];
    let mut sign = 1.0;
    for start in 0..fwd.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0usize;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = fwd[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// All eigenvalues of a general complex matrix.
pub fn eigenvalues(q: &CMat) -> Vec<Complex64> {
    q.eigenvalues::<faer::complex_native::c64>()
        .into_iter()
        .map(nc)
        .collect()
}

/// Largest singular value (operator 2-norm), by power iteration on `Q^* Q`.
///
/// Converges geometrically with ratio `(s2/s1)^2`; 300 iterations with a
/// deterministic start vector give far more accuracy than the certificates
/// and diagnostics that consume this need. A full SVD would be exact but is
/// orders of magnitude slower on the matrix sizes involved.
pub fn operator_norm(q: &CMat) -> f64 {
    let n = q.nrows();
    if n == 0 {
        return 0.0;
    }
    let qh = q.adjoint().to_owned();
    let mut x = CMat::from_fn(n, 1, |i, _| {
        faer::complex_native::c64::new(1.0 + (i as f64 * 0.29).sin(), (i as f64 * 0.53).cos())
    });
    let mut sigma2 = 0.0f64;
    for _ in 0..300 {
        let y = &qh * &(q * &x);
        let norm_y = frob(&y);
        let norm_x = frob(&x);
        if norm_y == 0.0 || !norm_y.is_finite() {
            return 0.0;
        }
        let next = norm_y / norm_x;
        let inv = faer::complex_native::c64::new(1.0 / norm_y, 0.0);
        x = faer::scale(inv) * &y;
        if (next - sigma2).abs() <= 1e-13 * next {
            sigma2 = next;
            break;
        }
        sigma2 = next;
    }
    sigma2.sqrt()
}

/// Eigenvalue of `q` nearest `shift`, by shift-invert power iteration.
///
/// Factorizes `q - shift I` once and iterates; intended for large matrices
/// where a full eigendecomposition is too expensive. Returns the Rayleigh
/// quotient after the iterate stabilizes.
pub fn eigenvalue_nearest(q: &CMat, shift: Complex64, max_iter: usize) -> Complex64 {
    let n = q.nrows();
    let mut a = q.clone();
    for i in 0..n {
        a[(i, i)] -= c(shift);
    }
    let lu = a.partial_piv_lu();
    // Deterministic start vector with no special symmetry.
    let mut x = CMat::from_fn(n, 1, |i, _| {
        faer::complex_native::c64::new(1.0 + (i as f64 * 0.37).sin(), (i as f64 * 0.41).cos())
    });
    let mut lambda = Complex64::new(f64::NAN, f64::NAN);
    for _ in 0..max_iter {
        let y = lu.solve(&x);
        let norm = frob(&y);
        if !norm.is_finite() || norm == 0.0 {
            break;
        }
        let inv = faer::complex_native::c64::new(1.0 / norm, 0.0);
        x = faer::scale(inv) * &y;
        // Rayleigh quotient x* Q x / x* x with x normalized.
        let qx = q * &x;
        let mut num = Complex64::new(0.0, 0.0);
        for i in 0..n {
            num += nc(x[(i, 0)]).conj() * nc(qx[(i, 0)]);
        }
        let prev = lambda;
        lambda = num;
        if (lambda - prev).norm() <= 1e-13 * (1.0 + lambda.norm()) {
            break;
        }
    }
    lambda
}

fn frob(m: &CMat) -> f64 {
    let mut s = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            s += m[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn determinant_of_small_matrix() {
        // Q = [[1, 2], [3, 4i]]; det(I + Q) = 2*(1+4i) - 6 = -4 + 8i.
        let q = from_fn(2, |i, j| match (i, j) {
            (0, 0) => Complex64::new(1.0, 0.0),
            (0, 1) => Complex64::new(2.0, 0.0),
            (1, 0) => Complex64::new(3.0, 0.0),
            _ => Complex64::new(0.0, 4.0),
        });
        let d = det_i_plus(&q);
        assert_relative_eq!(d.re, -4.0, max_relative = 1e-12);
        assert_relative_eq!(d.im, 8.0, max_relative = 1e-12);
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let q = from_fn(3, |i, j| {
            if i == j {
                Complex64::new(i as f64, 1.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let mut ev = eigenvalues(&q);
        ev.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (i, e) in ev.iter().enumerate() {
            assert_relative_eq!(e.re, i as f64, epsilon = 1e-12);
            assert_relative_eq!(e.im, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn nearest_eigenvalue_matches_direct() {
        // Non-normal test matrix with known spectrum {1, 2, 3} shifted off axis.
        let q = from_fn(3, |i, j| match (i, j) {
            (0, 0) => Complex64::new(1.0, 0.1),
            (1, 1) => Complex64::new(2.0, -0.2),
            (2, 2) => Complex64::new(3.0, 0.05),
            (0, 1) => Complex64::new(0.7, 0.0),
            (1, 2) => Complex64::new(-0.3, 0.4),
            _ => Complex64::new(0.0, 0.0),
        });
        let lam = eigenvalue_nearest(&q, Complex64::new(2.1, 0.0), 100);
        assert_relative_eq!(lam.re, 2.0, epsilon = 1e-10);
        assert_relative_eq!(lam.im, -0.2, epsilon = 1e-10);
    }

    #[test]
    fn operator_norm_of_column_scaling() {
        let q = from_fn(2, |i, j| {
            if i == j {
                Complex64::new(0.0, if i == 0 { 3.0 } else { 1.0 })
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        assert_relative_eq!(operator_norm(&q), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn operator_norm_matches_svd_on_dense_matrix() {
        let n = 40;
        let q = from_fn(n, |i, j| {
            Complex64::new(
                ((i * 7 + j * 3) as f64 * 0.41).sin() / (1.0 + i as f64),
                ((i + 2 * j) as f64 * 0.23).cos() / (1.0 + j as f64),
            )
        });
        let svd_norm = q.singular_values().first().copied().unwrap();
        assert_relative_eq!(operator_norm(&q), svd_norm, max_relative = 1e-9);
    }

    #[test]
    fn log_det_agrees_with_direct_determinant() {
        let q = from_fn(2, |i, j| match (i, j) {
            (0, 0) => Complex64::new(1.0, 0.0),
            (0, 1) => Complex64::new(2.0, 0.0),
            (1, 0) => Complex64::new(3.0, 0.0),
            _ => Complex64::new(0.0, 4.0),
        });
        let ld = log_det_i_plus(&q);
        let direct = Complex64::new(-4.0, 8.0);
        assert_relative_eq!(ld.log_abs, direct.norm().ln(), max_relative = 1e-12);
        assert_relative_eq!((ld.value() - direct).norm(), 0.0, epsilon = 1e-10);
        // Shifted values preserve ratios.
        let shifted = ld.value_shifted(ld.log_abs);
        assert_relative_eq!(shifted.norm(), 1.0, max_relative = 1e-12);
    }
}
