//! Small fixed-size complex vectors and matrices.
//!
//! The two-component structure of the Dirac system shows up everywhere, so we
//! keep a hand-rolled `Vec2`/`Mat2` pair instead of pulling in a generic
//! linear-algebra crate for 2x2 work. Closed-form singular values and the
//! Hermitian eigendecomposition are exact for this size.

use num_complex::Complex64;
use serde::Serialize;
use std::ops::{Add, Mul, Neg, Sub};

/// Column vector in C^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2 {
    pub a: Complex64,
    pub b: Complex64,
}

impl Vec2 {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    pub fn zero() -> Self {
        Self::new(Complex64::default(), Complex64::default())
    }

    /// Euclidean norm.
    pub fn norm(self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr()).sqrt()
    }

    /// Hermitian inner product, conjugate-linear in `self`.
    pub fn dot(self, rhs: Vec2) -> Complex64 {
        self.a.conj() * rhs.a + self.b.conj() * rhs.b
    }

    pub fn scale(self, s: Complex64) -> Self {
        Self::new(self.a * s, self.b * s)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.a, -self.b)
    }
}

/// Dense 2x2 complex matrix, row-major entries `m[row][col]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mat2 {
    pub e11: Complex64,
    pub e12: Complex64,
    pub e21: Complex64,
    pub e22: Complex64,
}

impl Mat2 {
    pub fn new(e11: Complex64, e12: Complex64, e21: Complex64, e22: Complex64) -> Self {
        Self { e11, e12, e21, e22 }
    }

    pub fn zero() -> Self {
        let z = Complex64::default();
        Self::new(z, z, z, z)
    }

    pub fn identity() -> Self {
        Self::new(
            Complex64::new(1.0, 0.0),
            Complex64::default(),
            Complex64::default(),
            Complex64::new(1.0, 0.0),
        )
    }

    /// Rank-one product `u v^T` (plain transpose, no conjugation).
    pub fn outer(u: Vec2, v: Vec2) -> Self {
        Self::new(u.a * v.a, u.a * v.b, u.b * v.a, u.b * v.b)
    }

    pub fn scale(self, s: Complex64) -> Self {
        Self::new(self.e11 * s, self.e12 * s, self.e21 * s, self.e22 * s)
    }

    pub fn adjoint(self) -> Self {
        Self::new(
            self.e11.conj(),
            self.e21.conj(),
            self.e12.conj(),
            self.e22.conj(),
        )
    }

    pub fn trace(self) -> Complex64 {
        self.e11 + self.e22
    }

    pub fn det(self) -> Complex64 {
        self.e11 * self.e22 - self.e12 * self.e21
    }

    pub fn apply(self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.e11 * v.a + self.e12 * v.b,
            self.e21 * v.a + self.e22 * v.b,
        )
    }

    pub fn frobenius_norm(self) -> f64 {
        (self.e11.norm_sqr() + self.e12.norm_sqr() + self.e21.norm_sqr() + self.e22.norm_sqr())
            .sqrt()
    }

    /// Operator 2-norm (largest singular value), closed form.
    pub fn operator_norm(self) -> f64 {
        // Largest eigenvalue of the Hermitian matrix M* M = [[alpha, gamma],
        // [conj(gamma), beta]], written as mean + radius. The discriminant
        // route through |M|_F^4 - 4 |det M|^2 cancels catastrophically for
        // near-scalar matrices; half_diff^2 + |gamma|^2 never does.
        let alpha = self.e11.norm_sqr() + self.e21.norm_sqr();
        let beta = self.e12.norm_sqr() + self.e22.norm_sqr();
        let gamma = self.e11.conj() * self.e12 + self.e21.conj() * self.e22;
        let half_diff = 0.5 * (alpha - beta);
        let radius = (half_diff * half_diff + gamma.norm_sqr()).sqrt();
        (0.5 * (alpha + beta) + radius).max(0.0).sqrt()
    }

    pub fn is_hermitian(self, tol: f64) -> bool {
        (self.e11.im.abs() <= tol)
            && (self.e22.im.abs() <= tol)
            && ((self.e12 - self.e21.conj()).norm() <= tol)
    }

    /// Eigendecomposition of a Hermitian matrix: eigenvalues descending plus a
    /// unitary matrix of column eigenvectors. The imaginary parts of the
    /// diagonal are ignored (caller guarantees Hermitian input).
    pub fn hermitian_eigen(self) -> ([f64; 2], Mat2) {
        let p = self.e11.re;
        let s = self.e22.re;
        let q = self.e12;
        let half_diff = 0.5 * (p - s);
        let mean = 0.5 * (p + s);
        let r = (half_diff * half_diff + q.norm_sqr()).sqrt();
        let l_hi = mean + r;
        let l_lo = mean - r;
        if r <= 1e-300 || q.norm() + half_diff.abs() <= 1e-300 {
            return ([l_hi, l_lo], Mat2::identity());
        }
        // Eigenvector for l_hi: rows of (A - l_hi I) are orthogonal to it;
        // pick the better-conditioned of the two classic formulas.
        let v = if (l_hi - p).abs() >= (l_hi - s).abs() {
            Vec2::new(q, Complex64::new(l_hi - p, 0.0))
        } else {
            Vec2::new(Complex64::new(l_hi - s, 0.0), q.conj())
        };
        let n = v.norm();
        let v = if n == 0.0 {
            Vec2::new(Complex64::new(1.0, 0.0), Complex64::default())
        } else {
            v.scale(Complex64::new(1.0 / n, 0.0))
        };
        // Orthonormal companion column.
        let w = Vec2::new(-v.b.conj(), v.a.conj());
        ([l_hi, l_lo], Mat2::new(v.a, w.a, v.b, w.b))
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.e11 + rhs.e11,
            self.e12 + rhs.e12,
            self.e21 + rhs.e21,
            self.e22 + rhs.e22,
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.e11 - rhs.e11,
            self.e12 - rhs.e12,
            self.e21 - rhs.e21,
            self.e22 - rhs.e22,
        )
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.e11 * rhs.e11 + self.e12 * rhs.e21,
            self.e11 * rhs.e12 + self.e12 * rhs.e22,
            self.e21 * rhs.e11 + self.e22 * rhs.e21,
            self.e21 * rhs.e12 + self.e22 * rhs.e22,
        )
    }
}
