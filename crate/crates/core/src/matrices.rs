//! The impact matrices Γ̃ and Γ = Γ̃ + Γ̃ᵀ with O(N) structured products.
//!
//! `Γ̃` is lower triangular with ½ on the diagonal and `α^{i−j}` below it, so
//! `Γ` is the Kac–Murdock–Szegő matrix `α^{|i−j|}`. Its inverse is tridiagonal:
//!
//! ```text
//! (1−α²)Γ⁻¹ = tridiag(−α; 1, 1+α², …, 1+α², 1; −α)
//! ```

use nalgebra::DMatrix;

use crate::{GameError, GameParams, Result};

/// Above this size dense storage is only built on explicit request.
pub const DENSE_LIMIT: usize = 512;

#[derive(Debug, Clone)]
pub struct DenseImpact {
    pub gamma_tilde: DMatrix<f64>,
    pub gamma: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct ImpactMatrices {
    alpha: f64,
    rho_dt: f64,
    size: usize,
    dense: Option<DenseImpact>,
}

/// Builds the impact matrices, storing them densely only for N+1 ≤ 512.
pub fn build_matrices(params: &GameParams) -> Result<ImpactMatrices> {
    let mut m = structured_matrices(params)?;
    if m.size <= DENSE_LIMIT {
        m.dense = Some(m.assemble_dense());
    }
    Ok(m)
}

/// Structured-only matrices: O(1) storage, products in O(N).
pub fn structured_matrices(params: &GameParams) -> Result<ImpactMatrices> {
    params.validate()?;
    Ok(ImpactMatrices {
        alpha: params.alpha(),
        rho_dt: params.rho_dt(),
        size: params.size(),
        dense: None,
    })
}

/// Builds the impact matrices with dense storage regardless of size.
pub fn build_matrices_dense(params: &GameParams) -> Result<ImpactMatrices> {
    let mut m = build_matrices(params)?;
    if m.dense.is_none() {
        m.dense = Some(m.assemble_dense());
    }
    Ok(m)
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(GameError::LengthMismatch { expected, actual });
    }
    Ok(())
}

impl ImpactMatrices {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dense(&self) -> Option<&DenseImpact> {
        self.dense.as_ref()
    }

    /// Γ̃_{ij} (0-based).
    pub fn gamma_tilde_entry(&self, i: usize, j: usize) -> f64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => 0.5,
            Greater => (-((i - j) as f64) * self.rho_dt).exp(),
            Less => 0.0,
        }
    }

    /// Γ_{ij} (0-based).
    pub fn gamma_entry(&self, i: usize, j: usize) -> f64 {
        self.gamma_tilde_entry(i, j) + self.gamma_tilde_entry(j, i)
    }

    fn assemble_dense(&self) -> DenseImpact {
        let n = self.size;
        let gamma_tilde = DMatrix::from_fn(n, n, |i, j| self.gamma_tilde_entry(i, j));
        let gamma = &gamma_tilde + gamma_tilde.transpose();
        DenseImpact { gamma_tilde, gamma }
    }

    /// Γ̃z in O(N).
    pub fn mul_gamma_tilde(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_len(self.size, z.len())?;
        let mut out = Vec::with_capacity(z.len());
        let mut acc = 0.0;
        for (k, &zk) in z.iter().enumerate() {
            if k > 0 {
                acc = self.alpha * (acc + z[k - 1]);
            }
            out.push(0.5 * zk + acc);
        }
        Ok(out)
    }

    /// Γ̃ᵀz in O(N).
    pub fn mul_gamma_tilde_t(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_len(self.size, z.len())?;
        let n = z.len();
        let mut out = vec![0.0; n];
        let mut acc = 0.0;
        for k in (0..n).rev() {
            if k + 1 < n {
                acc = self.alpha * (acc + z[k + 1]);
            }
            out[k] = 0.5 * z[k] + acc;
        }
        Ok(out)
    }

    /// Γz in O(N).
    pub fn mul_gamma(&self, z: &[f64]) -> Result<Vec<f64>> {
        let a = self.mul_gamma_tilde(z)?;
        let b = self.mul_gamma_tilde_t(z)?;
        Ok(a.iter().zip(&b).map(|(p, q)| p + q).collect())
    }
}

/// Γ⁻¹·rhs from the tridiagonal inverse, O(N).
pub fn gamma_inverse_apply(params: &GameParams, rhs: &[f64]) -> Result<Vec<f64>> {
    params.validate()?;
    let n = params.size();
    check_len(n, rhs.len())?;
    let a = params.alpha();
    let scale = 1.0 / params.one_minus_alpha_sq();
    let inner = 1.0 + a * a;
    let out = (0..n)
        .map(|k| {
            let v = if k == 0 {
                rhs[0] - a * rhs[1]
            } else if k == n - 1 {
                rhs[k] - a * rhs[k - 1]
            } else {
                inner * rhs[k] - a * (rhs[k - 1] + rhs[k + 1])
            };
            v * scale
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, rho_t: f64) -> GameParams {
        GameParams::new(rho_t, 1.0, n, 0.1, 1.0, 0.5).unwrap()
    }

    #[test]
    fn half_alpha_first_row() {
        let p = GameParams::new(2.0f64.ln(), 2.0, 2, 0.0, 1.0, 1.0).unwrap();
        let m = build_matrices(&p).unwrap();
        let g = &m.dense().unwrap().gamma;
        for (j, want) in [1.0, 0.5, 0.25].into_iter().enumerate() {
            assert!((g[(0, j)] - want).abs() < 1e-15);
        }
    }

    #[test]
    fn gamma_is_exact_sum_of_triangles() {
        let m = build_matrices(&params(17, 1.3)).unwrap();
        let d = m.dense().unwrap();
        let sum = &d.gamma_tilde + d.gamma_tilde.transpose();
        assert_eq!(sum, d.gamma);
        for i in 0..m.size() {
            assert_eq!(d.gamma[(i, i)], 1.0);
        }
    }

    #[test]
    fn dense_storage_threshold() {
        assert!(build_matrices(&params(600, 1.0)).unwrap().dense().is_none());
        assert!(build_matrices_dense(&params(600, 1.0)).unwrap().dense().is_some());
    }

    #[test]
    fn columns_are_geometric() {
        let m = build_matrices(&params(12, 2.0)).unwrap();
        let a = m.alpha();
        for j in 0..m.size() {
            for i in j + 2..m.size() {
                let r = m.gamma_tilde_entry(i, j) / m.gamma_tilde_entry(i - 1, j);
                assert!((r - a).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn structured_products_match_dense() {
        let m = build_matrices(&params(30, 0.7)).unwrap();
        let d = m.dense().unwrap();
        let z: Vec<f64> = (0..m.size()).map(|k| ((k * 7 % 11) as f64) - 5.0).collect();
        let zv = nalgebra::DVector::from_column_slice(&z);
        let pairs = [
            (m.mul_gamma_tilde(&z).unwrap(), &d.gamma_tilde * &zv),
            (m.mul_gamma_tilde_t(&z).unwrap(), d.gamma_tilde.transpose() * &zv),
            (m.mul_gamma(&z).unwrap(), &d.gamma * &zv),
        ];
        for (fast, slow) in pairs {
            for (a, b) in fast.iter().zip(slow.iter()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn length_mismatch_is_reported() {
        let p = params(5, 1.0);
        let e = gamma_inverse_apply(&p, &[1.0; 3]).unwrap_err();
        assert_eq!(e, GameError::LengthMismatch { expected: 6, actual: 3 });
    }
}
