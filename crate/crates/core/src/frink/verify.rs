//! Checks that a computed sequence and its metrics have the properties the
//! construction promises. Everything here reports rather than fails.

use serde::{Deserialize, Serialize};

use super::chain::{frink_chain_metric, PseudoMetricMatrix};
use super::delta::{delta_matrix, dyadic, quasi_triangle_constant, QuasiMetricMatrix, QUASI_TRIANGLE_BOUND};
use super::lambda::{InverseVariant, LambdaSequence};
use crate::error::{Error, Result};
use crate::kernel::{validate_kernel, AffinityMatrix, ValidationReport};
use crate::relation::{level_set, BinaryRelation, Inequality};

/// Lower and upper bounds asserted on `d / delta`.
pub const EQUIVALENCE_LOWER: f64 = 0.125;
pub const EQUIVALENCE_UPPER: f64 = 2.0;

/// Least sandwich shift accepted by [`SandwichReport::passed`].
pub const MIN_SANDWICH_SHIFT: i32 = -1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleCompositionReport {
    /// `violations[i - 1]` counts pairs of `U_i^3` outside `U_{i-1}`.
    pub violations: Vec<usize>,
    /// The strict-form restatement selected the same relations.
    pub strict_form_agrees: bool,
    pub passed: bool,
}

/// Largest distinct kernel value below `v`, so that `{K >= v} = {K > v'}`.
pub fn strict_equivalent_threshold(kernel: &AffinityMatrix, v: f64) -> f64 {
    let distinct = kernel.distinct_values();
    let idx = distinct.partition_point(|&x| x < v);
    if idx == 0 {
        f64::NEG_INFINITY
    } else {
        distinct[idx - 1]
    }
}

/// Checks `{K >= lambda(i)}^3 ⊆ {K >= lambda(i-1)}` for `i = 1..=k`, and that
/// the same relations arise from strict thresholds.
pub fn verify_triple_composition(kernel: &AffinityMatrix, lambda: &LambdaSequence) -> TripleCompositionReport {
    let levels: Vec<BinaryRelation> = lambda
        .values()
        .iter()
        .map(|&t| level_set(kernel, t, Inequality::NonStrict))
        .collect();
    let strict_form_agrees = lambda.values().iter().zip(&levels).all(|(&t, u)| {
        level_set(kernel, strict_equivalent_threshold(kernel, t), Inequality::Strict) == *u
    });
    let violations: Vec<usize> = levels
        .windows(2)
        .map(|w| {
            let cube = w[1].power3();
            cube.pairs().filter(|&(i, j)| !w[0].contains(i, j)).count()
        })
        .collect();
    let passed = strict_form_agrees && violations.iter().all(|&v| v == 0);
    TripleCompositionReport {
        violations,
        strict_form_agrees,
        passed,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichLevel {
    pub index: usize,
    /// `U_n ⊆ {d < 2^-n}`
    pub inner_holds: bool,
    /// `{d < 2^-n} ⊆ U_{n-1}`; absent for `n = 0`.
    pub outer_holds: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub levels: Vec<SandwichLevel>,
    /// Largest `s <= 1` with `{d < 2^-n} ⊆ U_{n+s}` for every `n` in `1..=k`,
    /// where `U_j` is all pairs for `j < 0` and the diagonal for `j > k`.
    pub tightest_shift: i32,
    pub passed: bool,
}

pub fn verify_sandwich(
    kernel: &AffinityMatrix,
    lambda: &LambdaSequence,
    d: &PseudoMetricMatrix,
) -> Result<SandwichReport> {
    let n = kernel.n();
    if d.n() != n {
        return Err(Error::DimensionMismatch { left: n, right: d.n() });
    }
    let k = lambda.k();
    let levels: Vec<BinaryRelation> = lambda
        .values()
        .iter()
        .map(|&t| level_set(kernel, t, Inequality::NonStrict))
        .collect();
    let full = BinaryRelation::full(n);
    let diagonal = BinaryRelation::diagonal(n);
    let level = |j: i64| -> &BinaryRelation {
        if j < 0 {
            &full
        } else if j as usize > k {
            &diagonal
        } else {
            &levels[j as usize]
        }
    };
    let ball = |idx: usize| BinaryRelation::from_fn(n, |i, j| d.get(i, j) < dyadic(idx));

    let balls: Vec<BinaryRelation> = (0..=k).map(ball).collect();
    let report_levels: Vec<SandwichLevel> = (0..=k)
        .map(|idx| SandwichLevel {
            index: idx,
            inner_holds: levels[idx].is_subset_of(&balls[idx]),
            outer_holds: (idx > 0).then(|| balls[idx].is_subset_of(&levels[idx - 1])),
        })
        .collect();

    let lowest = -(k as i32) - 1;
    let tightest_shift = (lowest..=1)
        .rev()
        .find(|&s| (1..=k).all(|idx| balls[idx].is_subset_of(level(idx as i64 + s as i64))))
        .unwrap_or(lowest);

    let passed = report_levels.iter().all(|l| l.inner_holds) && tightest_shift >= MIN_SANDWICH_SHIFT;
    Ok(SandwichReport {
        levels: report_levels,
        tightest_shift,
        passed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    /// `min d / delta` over off-diagonal pairs with `d > 0`.
    pub c_lo: Option<f64>,
    /// `max d / delta` over the same pairs.
    pub c_hi: Option<f64>,
    pub pairs: usize,
    pub passed: bool,
}

pub fn verify_equivalence(delta: &QuasiMetricMatrix, d: &PseudoMetricMatrix) -> Result<EquivalenceReport> {
    let n = delta.n();
    if d.n() != n {
        return Err(Error::DimensionMismatch { left: n, right: d.n() });
    }
    let mut c_lo = f64::INFINITY;
    let mut c_hi = f64::NEG_INFINITY;
    let mut pairs = 0;
    for i in 0..n {
        for j in 0..n {
            let dij = d.get(i, j);
            if i == j || dij <= 0.0 {
                continue;
            }
            let ratio = dij / delta.get(i, j);
            c_lo = c_lo.min(ratio);
            c_hi = c_hi.max(ratio);
            pairs += 1;
        }
    }
    if pairs == 0 {
        return Ok(EquivalenceReport {
            c_lo: None,
            c_hi: None,
            pairs,
            passed: true,
        });
    }
    Ok(EquivalenceReport {
        c_lo: Some(c_lo),
        c_hi: Some(c_hi),
        pairs,
        passed: c_lo >= EQUIVALENCE_LOWER && c_hi <= EQUIVALENCE_UPPER,
    })
}

/// Everything checked for a kernel and its sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub validation: ValidationReport,
    pub triple_composition: TripleCompositionReport,
    pub sandwich: SandwichReport,
    pub equivalence: EquivalenceReport,
    /// Absent for fewer than three vertices.
    pub quasi_triangle_constant: Option<f64>,
    pub quasi_triangle_passed: bool,
    pub passed: bool,
}

pub fn verify_all(
    kernel: &AffinityMatrix,
    lambda: &LambdaSequence,
    variant: InverseVariant,
) -> Result<VerificationReport> {
    let validation = validate_kernel(kernel);
    let delta = delta_matrix(kernel, lambda, variant);
    let chain = frink_chain_metric(kernel, lambda);
    let triple_composition = verify_triple_composition(kernel, lambda);
    let sandwich = verify_sandwich(kernel, lambda, &chain)?;
    let equivalence = verify_equivalence(&delta, &chain)?;
    let quasi_triangle_constant = if kernel.n() >= 3 {
        Some(quasi_triangle_constant(&delta)?)
    } else {
        None
    };
    let quasi_triangle_passed = quasi_triangle_constant.is_none_or(|c| c <= QUASI_TRIANGLE_BOUND);
    let passed = validation.all_flags()
        && triple_composition.passed
        && sandwich.passed
        && equivalence.passed
        && quasi_triangle_passed;
    Ok(VerificationReport {
        validation,
        triple_composition,
        sandwich,
        equivalence,
        quasi_triangle_constant,
        quasi_triangle_passed,
        passed,
    })
}
