use serde::{Deserialize, Serialize};

use super::lambda::{InverseVariant, LambdaSequence};
use crate::error::{Error, Result};
use crate::kernel::AffinityMatrix;
use crate::matrix::SquareMatrix;

/// Triangle constant guaranteed for quasi-metrics produced by [`delta_matrix`].
pub const QUASI_TRIANGLE_BOUND: f64 = 8.0;

/// `delta(i, j) = 2^(-lambda^{-1}(K[i][j]))` off the diagonal, zero on it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiMetricMatrix {
    values: SquareMatrix,
    variant: InverseVariant,
}

impl QuasiMetricMatrix {
    /// Wraps arbitrary distances, e.g. for comparing against another metric.
    pub fn from_matrix(values: SquareMatrix, variant: InverseVariant) -> Self {
        Self { values, variant }
    }

    pub fn n(&self) -> usize {
        self.values.n()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.values.row(i)
    }

    pub fn values(&self) -> &SquareMatrix {
        &self.values
    }

    pub fn variant(&self) -> InverseVariant {
        self.variant
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let values = SquareMatrix::from_fn(self.n(), |i, j| self.get(i, j) * factor);
        Self::from_matrix(values, self.variant)
    }
}

pub fn delta_matrix(
    kernel: &AffinityMatrix,
    lambda: &LambdaSequence,
    variant: InverseVariant,
) -> QuasiMetricMatrix {
    let values = SquareMatrix::from_fn(kernel.n(), |i, j| {
        if i == j {
            0.0
        } else {
            dyadic(lambda.inverse(kernel.get(i, j), variant))
        }
    });
    QuasiMetricMatrix { values, variant }
}

/// `2^(-e)`, exact for every exponent an `f64` can hold.
pub(crate) fn dyadic(e: usize) -> f64 {
    (-(e.min(1074) as f64)).exp2()
}

/// Largest `delta(i, m) / (delta(i, j) + delta(j, m))` over triples of
/// distinct vertices with a positive denominator.
pub fn quasi_triangle_constant(delta: &QuasiMetricMatrix) -> Result<f64> {
    let n = delta.n();
    if n < 3 {
        return Err(Error::Domain(format!(
            "a triangle constant needs at least 3 vertices, got {n}"
        )));
    }
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            let dij = delta.get(i, j);
            for m in 0..n {
                if m == i || m == j {
                    continue;
                }
                let denom = dij + delta.get(j, m);
                if denom > 0.0 {
                    worst = worst.max(delta.get(i, m) / denom);
                }
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frink::lambda::compute_lambda_sequence;
    use crate::kernel::newtonian_kernel;

    fn four() -> (AffinityMatrix, LambdaSequence) {
        let k = newtonian_kernel(4, 1.0, 2.0).unwrap();
        let l = compute_lambda_sequence(&k).unwrap();
        (k, l)
    }

    #[test]
    fn four_vertex_delta() {
        let (k, l) = four();
        let d = delta_matrix(&k, &l, InverseVariant::Script);
        assert_eq!(d.get(0, 1), 0.25);
        assert_eq!(d.get(0, 2), 0.5);
        assert_eq!(d.get(0, 3), 0.5);
        for i in 0..4 {
            assert_eq!(d.get(i, i), 0.0);
        }
        assert!(d.values().is_symmetric(0.0));
        assert!(d.get(0, 1) <= d.get(0, 3));
    }

    #[test]
    fn four_vertex_triangle_constant() {
        let (k, l) = four();
        let d = delta_matrix(&k, &l, InverseVariant::Script);
        assert_eq!(quasi_triangle_constant(&d).unwrap(), 1.0);
    }

    #[test]
    fn true_metric_has_constant_at_most_one() {
        let m = SquareMatrix::from_fn(6, |i, j| (i as f64 - j as f64).abs().sqrt());
        let d = QuasiMetricMatrix::from_matrix(m, InverseVariant::Script);
        assert!(quasi_triangle_constant(&d).unwrap() <= 1.0);
    }

    #[test]
    fn triangle_constant_needs_three_points() {
        let d = QuasiMetricMatrix::from_matrix(SquareMatrix::zeros(2), InverseVariant::Script);
        assert!(matches!(quasi_triangle_constant(&d), Err(Error::Domain(_))));
    }

    #[test]
    fn dyadic_is_exact() {
        assert_eq!(dyadic(0), 1.0);
        assert_eq!(dyadic(3), 0.125);
        assert_eq!(dyadic(60), 1.0 / (1u64 << 60) as f64);
    }

    #[test]
    fn variants_differ_by_exponent() {
        let (k, l) = four();
        let script = delta_matrix(&k, &l, InverseVariant::Script);
        let upper = delta_matrix(&k, &l, InverseVariant::Upper);
        let lower = delta_matrix(&k, &l, InverseVariant::Lower);
        // K(0,1) = 1 = lambda(1): script 2, upper 1, lower 0.
        assert_eq!(script.get(0, 1), 0.25);
        assert_eq!(upper.get(0, 1), 0.5);
        assert_eq!(lower.get(0, 1), 1.0);
    }
}
