//! Frink's chain pseudo-metric on a finite vertex set.
//!
//! With nested relations `U_i = {K >= lambda(i)}`, a pair that lies in
//! `U_m` but not `U_{m+1}` gets the one-step weight `f = 2^-(m+1)`; pairs in
//! no level get 1 and the diagonal gets 0. The pseudo-metric is the infimum
//! of `f` summed along chains, which on a finite set is the all-pairs
//! shortest path over `f`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::delta::dyadic;
use super::lambda::LambdaSequence;
use crate::kernel::AffinityMatrix;
use crate::matrix::SquareMatrix;
use crate::relation::{level_set, Inequality};

const PARALLEL_MIN_N: usize = 128;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PseudoMetricMatrix {
    values: SquareMatrix,
    chain_weights: SquareMatrix,
}

impl PseudoMetricMatrix {
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

    /// The one-step weights `f` the chains are built from.
    pub fn chain_weights(&self) -> &SquareMatrix {
        &self.chain_weights
    }
}

/// One-step weights derived from the level relations of `lambda`.
pub fn chain_weights(kernel: &AffinityMatrix, lambda: &LambdaSequence) -> SquareMatrix {
    let n = kernel.n();
    let levels: Vec<_> = lambda
        .values()
        .iter()
        .map(|&t| level_set(kernel, t, Inequality::NonStrict))
        .collect();
    SquareMatrix::from_fn(n, |i, j| {
        if i == j {
            return 0.0;
        }
        // Levels are nested, so the deepest containing one is found scanning down.
        let depth = levels
            .iter()
            .rposition(|u| u.contains(i, j))
            .map_or(0, |m| m + 1);
        dyadic(depth)
    })
}

pub fn frink_chain_metric(kernel: &AffinityMatrix, lambda: &LambdaSequence) -> PseudoMetricMatrix {
    let chain_weights = chain_weights(kernel, lambda);
    let mut values = chain_weights.clone();
    shortest_paths_in_place(&mut values);
    PseudoMetricMatrix {
        values,
        chain_weights,
    }
}

/// Dense all-pairs shortest paths by cubic relaxation over intermediate vertices.
pub fn shortest_paths_in_place(dist: &mut SquareMatrix) {
    let n = dist.n();
    let mut pivot_row = vec![0.0; n];
    for k in 0..n {
        pivot_row.copy_from_slice(dist.row(k));
        let relax = |row: &mut [f64]| {
            let dik = row[k];
            if dik.is_infinite() {
                return;
            }
            for (dij, dkj) in row.iter_mut().zip(&pivot_row) {
                let via = dik + dkj;
                if via < *dij {
                    *dij = via;
                }
            }
        };
        let data = dist.as_mut_slice();
        if n >= PARALLEL_MIN_N {
            data.par_chunks_mut(n).for_each(relax);
        } else {
            data.chunks_mut(n).for_each(relax);
        }
    }
}

/// True when one more relaxation sweep would change nothing.
pub fn is_shortest_path_fixed_point(dist: &SquareMatrix) -> bool {
    let n = dist.n();
    (0..n).all(|i| {
        (0..n).all(|j| (0..n).all(|k| dist.get(i, j) <= dist.get(i, k) + dist.get(k, j)))
    })
}
