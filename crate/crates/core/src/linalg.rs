//! Fixed-size matrices over the (position, velocity) state and the
//! (angle, delay, Doppler) measurement.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

const SINGULAR_DET: f64 = 1e-300;

/// 2×2 real matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[0.0, 0.0], [0.0, 0.0]]);
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn diag(a: f64, d: f64) -> Self {
        Mat2([[a, 0.0], [0.0, d]])
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn scale(&self, s: f64) -> Self {
        let m = &self.0;
        Mat2([[s * m[0][0], s * m[0][1]], [s * m[1][0], s * m[1][1]]])
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if !(det.abs() > SINGULAR_DET) || !det.is_finite() {
            return Err(Error::Singular { det });
        }
        let m = &self.0;
        Ok(Mat2([
            [m[1][1] / det, -m[0][1] / det],
            [-m[1][0] / det, m[0][0] / det],
        ]))
    }

    /// (M + Mᵀ) / 2.
    pub fn symmetrize(&self) -> Self {
        let off = 0.5 * (self.0[0][1] + self.0[1][0]);
        Mat2([[self.0[0][0], off], [off, self.0[1][1]]])
    }

    pub fn mul_vec(&self, v: [f64; 2]) -> [f64; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// A·M·Aᵀ.
    pub fn congruence(&self, a: &Mat2) -> Self {
        *a * *self * a.transpose()
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        (self.0[0][1] - self.0[1][0]).abs() <= rel_tol * scale
    }

    /// Eigenvalues of the symmetric part, ascending.
    pub fn sym_eigenvalues(&self) -> [f64; 2] {
        let s = self.symmetrize();
        let mean = 0.5 * s.trace();
        let half_diff = 0.5 * (s.0[0][0] - s.0[1][1]);
        let radius = half_diff.hypot(s.0[0][1]);
        [mean - radius, mean + radius]
    }

    /// Symmetric within 1e-12 relative with eigenvalues ≥ −1e-12·|trace|.
    pub fn is_covariance(&self) -> bool {
        if !self.0.iter().flatten().all(|v| v.is_finite()) || !self.is_symmetric(1e-12) {
            return false;
        }
        let [lo, _] = self.sym_eigenvalues();
        lo >= -1e-12 * self.trace().abs()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.is_symmetric(1e-12) && self.0[0][0] > 0.0 && self.det() > 0.0
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        self + rhs.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

/// diag(σ₁², σ₂², σ₃²) over (angle, delay, Doppler).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagMat3(pub [f64; 3]);

impl DiagMat3 {
    pub fn scale(&self, s: f64) -> Self {
        DiagMat3(self.0.map(|v| v * s))
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|v| v.is_finite() && *v > 0.0)
    }
}

/// ∂(φ, τ, μ)/∂(x, v). Only the Doppler row depends on velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian32(pub [[f64; 2]; 3]);

impl Jacobian32 {
    /// Hᵀ · diag(w) · H for nonnegative weights `w` (inverse variances).
    pub fn weighted_gram(&self, w: [f64; 3]) -> Mat2 {
        let h = &self.0;
        let mut out = [[0.0; 2]; 2];
        for (k, wk) in w.iter().enumerate() {
            for (i, row) in out.iter_mut().enumerate() {
                for (j, cell) in row.iter_mut().enumerate() {
                    *cell += h[k][i] * wk * h[k][j];
                }
            }
        }
        Mat2(out)
    }
}

/// Symmetric 3×3 matrix, dense storage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sym3(pub [[f64; 3]; 3]);

impl Sym3 {
    pub fn identity() -> Self {
        Sym3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    /// Inverse through a Cholesky factorization. Fails unless positive definite.
    pub fn inverse_pd(&self) -> Result<Self> {
        let a = &self.0;
        let mut l = [[0.0f64; 3]; 3];
        for i in 0..3 {
            for j in 0..=i {
                let mut s = a[i][j];
                for k in 0..j {
                    s -= l[i][k] * l[j][k];
                }
                if i == j {
                    if !(s > 0.0) {
                        return Err(Error::NotPositiveDefinite);
                    }
                    l[i][i] = s.sqrt();
                } else {
                    l[i][j] = s / l[j][j];
                }
            }
        }
        // L⁻¹ by forward substitution, then A⁻¹ = L⁻ᵀ L⁻¹.
        let mut li = [[0.0f64; 3]; 3];
        for i in 0..3 {
            li[i][i] = 1.0 / l[i][i];
            for j in 0..i {
                let mut s = 0.0;
                for k in j..i {
                    s -= l[i][k] * li[k][j];
                }
                li[i][j] = s / l[i][i];
            }
        }
        let mut inv = [[0.0f64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                inv[i][j] = (i.max(j)..3).map(|k| li[k][i] * li[k][j]).sum();
            }
        }
        Ok(Sym3(inv))
    }
}
