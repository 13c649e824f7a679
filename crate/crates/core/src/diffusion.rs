//! Diffusion-metric baseline.
//!
//! The generator is the symmetric normalized Laplacian
//! `L = D^{-1/2} K D^{-1/2} - I`, whose spectrum lies in `[-2, 0]`. With
//! eigenpairs `(nu_l, x^l)` the diffusion distance at time `t` is
//! `d_t(i, j) = sqrt(sum_l e^{2 t nu_l} (x^l_i - x^l_j)^2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::AffinityMatrix;
use crate::matrix::SquareMatrix;

pub const DEFAULT_EIGEN_TOL: f64 = 1e-10;
pub const MAX_SWEEPS: usize = 100;

/// Eigenpairs sorted by ascending eigenvalue. Column `l` of the
/// eigenvector table is the unit eigenvector for `eigenvalues[l]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    /// `n` rows of `L` components each.
    eigenvectors: Vec<Vec<f64>>,
    #[serde(default)]
    convention: String,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.eigenvectors.len()
    }

    /// Number of retained eigenpairs.
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Component `i` of eigenvector `l`.
    pub fn component(&self, i: usize, l: usize) -> f64 {
        self.eigenvectors[i][l]
    }

    pub fn eigenvector(&self, l: usize) -> Vec<f64> {
        self.eigenvectors.iter().map(|row| row[l]).collect()
    }

    pub fn eigenvector_rows(&self) -> &[Vec<f64>] {
        &self.eigenvectors
    }

    pub fn convention(&self) -> &str {
        &self.convention
    }

    /// `sum_l nu_l x^l (x^l)^T`
    pub fn reconstruct(&self) -> SquareMatrix {
        let n = self.n();
        SquareMatrix::from_fn(n, |i, j| {
            (0..self.len())
                .map(|l| self.eigenvalues[l] * self.component(i, l) * self.component(j, l))
                .sum()
        })
    }

    /// Max-norm distance of `X^T X` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.n();
        let m = self.len();
        let mut worst: f64 = 0.0;
        for a in 0..m {
            for b in a..m {
                let dot: f64 = (0..n).map(|i| self.component(i, a) * self.component(i, b)).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Keeps the `count` eigenpairs with the largest eigenvalues.
    pub fn truncated(&self, count: usize) -> Self {
        let start = self.len().saturating_sub(count);
        Self {
            eigenvalues: self.eigenvalues[start..].to_vec(),
            eigenvectors: self
                .eigenvectors
                .iter()
                .map(|row| row[start..].to_vec())
                .collect(),
            convention: self.convention.clone(),
        }
    }
}

/// `D^{-1/2} K D^{-1/2} - I` with `D` the diagonal of row sums.
pub fn graph_laplacian(kernel: &AffinityMatrix) -> Result<SquareMatrix> {
    let n = kernel.n();
    let inv_sqrt_deg = (0..n)
        .map(|i| {
            let deg: f64 = kernel.row(i).iter().sum();
            if deg > 0.0 {
                Ok(deg.sqrt().recip())
            } else {
                Err(Error::DegenerateVertex(i))
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut lap = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let mut v = inv_sqrt_deg[i] * kernel.get(i, j) * inv_sqrt_deg[j];
            if i == j {
                v -= 1.0;
            }
            lap.set(i, j, v);
            lap.set(j, i, v);
        }
    }
    Ok(lap)
}

fn off_diagonal_norm(a: &SquareMatrix) -> f64 {
    let n = a.n();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a.get(i, j) * a.get(i, j);
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops
/// below `tol`.
pub fn eig_symmetric(s: &SquareMatrix, tol: f64) -> Result<SpectralDecomposition> {
    eig_symmetric_tagged(s, tol, "symmetric")
}

fn eig_symmetric_tagged(s: &SquareMatrix, tol: f64, convention: &str) -> Result<SpectralDecomposition> {
    if let Some((i, j)) = s.asymmetry(1e-12) {
        return Err(Error::Domain(format!(
            "matrix is not symmetric at ({i}, {j}): {} vs {}",
            s.get(i, j),
            s.get(j, i)
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let n = s.n();
    let mut a = s.clone();
    let mut v = SquareMatrix::identity(n);

    let mut residual = off_diagonal_norm(&a);
    let mut sweeps = 0;
    while residual >= tol {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NotConverged { sweeps, residual });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = (t * t + 1.0).sqrt().recip();
                let sn = t * c;
                rotate(&mut a, &mut v, p, q, c, sn);
            }
        }
        sweeps += 1;
        residual = off_diagonal_norm(&a);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a.get(x, x).total_cmp(&a.get(y, y)));
    let eigenvalues = order.iter().map(|&l| a.get(l, l)).collect();
    let eigenvectors = (0..n)
        .map(|i| order.iter().map(|&l| v.get(i, l)).collect())
        .collect();
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        convention: convention.to_string(),
    })
}

/// `A <- J^T A J`, `V <- V J` for the rotation in the `(p, q)` plane.
fn rotate(a: &mut SquareMatrix, v: &mut SquareMatrix, p: usize, q: usize, c: f64, s: f64) {
    let n = a.n();
    for r in 0..n {
        let arp = a.get(r, p);
        let arq = a.get(r, q);
        a.set(r, p, c * arp - s * arq);
        a.set(r, q, s * arp + c * arq);
    }
    for r in 0..n {
        let apr = a.get(p, r);
        let aqr = a.get(q, r);
        a.set(p, r, c * apr - s * aqr);
        a.set(q, r, s * apr + c * aqr);
    }
    a.set(p, q, 0.0);
    a.set(q, p, 0.0);
    for r in 0..n {
        let vrp = v.get(r, p);
        let vrq = v.get(r, q);
        v.set(r, p, c * vrp - s * vrq);
        v.set(r, q, s * vrp + c * vrq);
    }
}

/// Eigendecomposition of the normalized Laplacian of `kernel`.
pub fn laplacian_spectrum(kernel: &AffinityMatrix, tol: f64) -> Result<SpectralDecomposition> {
    eig_symmetric_tagged(&graph_laplacian(kernel)?, tol, "normalized-symmetric")
}

pub fn diffusion_distance_matrix(decomp: &SpectralDecomposition, t: f64) -> Result<SquareMatrix> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParameter(format!("diffusion time must be positive, got {t}")));
    }
    let n = decomp.n();
    let weights: Vec<f64> = decomp
        .eigenvalues()
        .iter()
        .map(|&nu| (2.0 * t * nu).exp())
        .collect();
    let mut out = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let (xi, xj) = (&decomp.eigenvectors[i], &decomp.eigenvectors[j]);
            let sq: f64 = weights
                .iter()
                .zip(xi.iter().zip(xj))
                .map(|(w, (a, b))| w * (a - b) * (a - b))
                .sum();
            let d = sq.sqrt();
            out.set(i, j, d);
            out.set(j, i, d);
        }
    }
    Ok(out)
}
