use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kernel::{validate_kernel, AffinityMatrix};
use crate::relation::{level_set, Inequality};

/// How many main diagonals seed the first threshold.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DiagonalBand {
    #[default]
    Three,
    Five,
}

impl DiagonalBand {
    /// Largest `|i - j|` inside the band.
    pub fn half_width(self) -> usize {
        match self {
            DiagonalBand::Three => 1,
            DiagonalBand::Five => 2,
        }
    }
}

impl TryFrom<u8> for DiagonalBand {
    type Error = Error;

    fn try_from(width: u8) -> Result<Self> {
        match width {
            3 => Ok(DiagonalBand::Three),
            5 => Ok(DiagonalBand::Five),
            other => Err(Error::InvalidParameter(format!(
                "diagonal band must be 3 or 5, got {other}"
            ))),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct LambdaOptions {
    pub diagonal_band: DiagonalBand,
    /// Replaces the band minimum as the starting threshold. Snapped up to the
    /// nearest kernel value, which leaves the level set unchanged.
    pub lambda0_override: Option<f64>,
}

/// Strictly increasing thresholds `lambda(0) < .. < lambda(k)`, each one an
/// entry of the kernel it was computed from.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaSequence {
    values: Vec<f64>,
    lambda0_raw: f64,
    iterations: usize,
}

impl LambdaSequence {
    /// Builds a sequence from explicit thresholds, e.g. ones read from disk.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("a lambda sequence needs at least one value".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Domain("lambda values must be finite and nonnegative".into()));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("lambda values must be strictly increasing".into()));
        }
        let lambda0_raw = *values.last().unwrap();
        Ok(Self {
            values,
            lambda0_raw,
            iterations: 0,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Index of the last threshold.
    pub fn k(&self) -> usize {
        self.values.len() - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// The starting threshold before reversal, as requested by the caller.
    pub fn lambda0_raw(&self) -> f64 {
        self.lambda0_raw
    }

    /// Number of cube-and-minimize rounds performed.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// `#{i : lambda(i) <= t}`
    fn count_at_most(&self, t: f64) -> usize {
        self.values.partition_point(|&v| v <= t)
    }

    /// `#{i : lambda(i) < t}`
    fn count_below(&self, t: f64) -> usize {
        self.values.partition_point(|&v| v < t)
    }

    /// `lambda^{-1}(t)` under the given extension. Panics on negative `t`;
    /// use [`lambda_inverse`] for checked input.
    pub(crate) fn inverse(&self, t: f64, variant: InverseVariant) -> usize {
        debug_assert!(t >= 0.0);
        let k = self.k();
        match variant {
            InverseVariant::Script => self.count_at_most(t),
            InverseVariant::Upper => self.count_below(t).min(k),
            InverseVariant::Lower => self.count_below(t).min(k).saturating_sub(1),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct LambdaJson {
    values: Vec<f64>,
    iterations: usize,
}

impl Serialize for LambdaSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        LambdaJson {
            values: self.values.clone(),
            iterations: self.iterations,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LambdaSequence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = LambdaJson::deserialize(deserializer)?;
        let mut seq = LambdaSequence::from_values(raw.values).map_err(serde::de::Error::custom)?;
        seq.iterations = raw.iterations;
        Ok(seq)
    }
}

/// Which increasing extension of `lambda` is inverted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InverseVariant {
    /// Left-closed intervals: `0` below `lambda(0)`, `i + 1` on
    /// `[lambda(i), lambda(i+1))`, `k + 1` from `lambda(k)` on.
    #[default]
    Script,
    /// Right-closed intervals: `i` on `(lambda(i-1), lambda(i)]`, `0` up to
    /// `lambda(0)`, saturating at `k`.
    Upper,
    /// The upper extension shifted down by one, saturating at `k - 1`.
    Lower,
}

impl fmt::Display for InverseVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InverseVariant::Script => "script",
            InverseVariant::Upper => "upper",
            InverseVariant::Lower => "lower",
        })
    }
}

impl FromStr for InverseVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "script" => Ok(InverseVariant::Script),
            "upper" => Ok(InverseVariant::Upper),
            "lower" => Ok(InverseVariant::Lower),
            other => Err(Error::InvalidParameter(format!(
                "unknown inverse variant `{other}` (expected script, upper or lower)"
            ))),
        }
    }
}

pub fn lambda_inverse(t: f64, lambda: &LambdaSequence, variant: InverseVariant) -> Result<usize> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Domain(format!("lambda inverse needs t >= 0, got {t}")));
    }
    Ok(lambda.inverse(t, variant))
}

/// Computes the threshold sequence with the default options (three main
/// diagonals, no override).
pub fn compute_lambda_sequence(kernel: &AffinityMatrix) -> Result<LambdaSequence> {
    compute_lambda_sequence_with(kernel, &LambdaOptions::default())
}

/// Starting from the band minimum `L0`, repeatedly takes the minimum of `K`
/// over the support of `{K >= L_h}^3` to get `L_{h+1}`, until the minimum
/// of `K` is reached or the threshold stops decreasing. The thresholds are
/// returned in ascending order.
pub fn compute_lambda_sequence_with(
    kernel: &AffinityMatrix,
    options: &LambdaOptions,
) -> Result<LambdaSequence> {
    let report = validate_kernel(kernel);
    if !report.tridiagonal_positive {
        return Err(Error::NonMetrizable(
            "tridiagonal_positive is false: a main-diagonal or adjacent entry is zero".into(),
        ));
    }
    if !report.diag_dominant {
        return Err(Error::NonMetrizable(
            "diag_dominant is false: some K[i][i] is below the maximum of its row".into(),
        ));
    }

    let n = kernel.n();
    let (start, lambda0_raw) = match options.lambda0_override {
        None => {
            let start = kernel.band_min(options.diagonal_band.half_width() + 1);
            if start <= 0.0 {
                return Err(Error::NonMetrizable(format!(
                    "the {}-diagonal minimum is zero",
                    2 * options.diagonal_band.half_width() + 1
                )));
            }
            (start, start)
        }
        Some(raw) => (snap_start(kernel, raw)?, raw),
    };

    let kmin = report.min_entry;
    let cap = n * n;
    let mut descending = vec![start];
    let mut iterations = 0;
    loop {
        let current = *descending.last().unwrap();
        if iterations > 0 && current <= kmin {
            break;
        }
        if iterations >= cap {
            return Err(Error::Internal(format!(
                "threshold sequence did not terminate within {cap} iterations"
            )));
        }
        let cube = level_set(kernel, current, Inequality::NonStrict).power3();
        let next = cube
            .pairs()
            .map(|(i, j)| kernel.get(i, j))
            .fold(f64::INFINITY, f64::min);
        iterations += 1;
        // The cube contains the level set, so `next <= current`; equality
        // means the level set is closed under composition.
        if next >= current {
            break;
        }
        descending.push(next);
    }

    descending.reverse();
    Ok(LambdaSequence {
        values: descending,
        lambda0_raw,
        iterations,
    })
}

fn snap_start(kernel: &AffinityMatrix, raw: f64) -> Result<f64> {
    if !(raw.is_finite() && raw > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "starting threshold must be positive, got {raw}"
        )));
    }
    let distinct = kernel.distinct_values();
    let idx = distinct.partition_point(|&v| v < raw);
    let snapped = *distinct.get(idx).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "starting threshold {raw} exceeds every kernel entry"
        ))
    })?;
    let u0 = level_set(kernel, snapped, Inequality::NonStrict);
    if !u0.contains_diagonal() {
        return Err(Error::NonMetrizable(format!(
            "starting threshold {raw} excludes some diagonal entries"
        )));
    }
    if u0.covering_index(kernel.n()).is_none() {
        return Err(Error::NonMetrizable(format!(
            "the level set at starting threshold {raw} never covers all pairs"
        )));
    }
    Ok(snapped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::newtonian_kernel;

    #[test]
    fn four_vertex_newtonian() {
        let k = newtonian_kernel(4, 1.0, 2.0).unwrap();
        let lambda = compute_lambda_sequence(&k).unwrap();
        assert_eq!(lambda.values(), &[1.0 / 3.0, 1.0]);
        assert_eq!(lambda.k(), 1);
        assert_eq!(lambda.lambda0_raw(), 1.0);
        assert_eq!(lambda.iterations(), 1);
    }

    #[test]
    fn sixty_vertex_newtonian() {
        let k = newtonian_kernel(60, 1.0, 2.0).unwrap();
        let lambda = compute_lambda_sequence(&k).unwrap();
        assert_eq!(
            lambda.values(),
            &[1.0 / 59.0, 1.0 / 27.0, 1.0 / 9.0, 1.0 / 3.0, 1.0]
        );
        assert_eq!(lambda.iterations(), 4);
    }

    #[test]
    fn two_vertex_single_level() {
        let k = AffinityMatrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let lambda = compute_lambda_sequence(&k).unwrap();
        assert_eq!(lambda.values(), &[1.0]);
        assert_eq!(lambda.k(), 0);
    }

    #[test]
    fn rejects_kernels_failing_preconditions() {
        let weak_diag = AffinityMatrix::from_rows(vec![vec![0.5, 1.0], vec![1.0, 2.0]]).unwrap();
        let err = compute_lambda_sequence(&weak_diag).unwrap_err();
        assert!(matches!(&err, Error::NonMetrizable(m) if m.contains("diag_dominant")));

        let gap = AffinityMatrix::from_rows(vec![
            vec![2.0, 0.0, 1.0],
            vec![0.0, 2.0, 1.0],
            vec![1.0, 1.0, 2.0],
        ])
        .unwrap();
        let err = compute_lambda_sequence(&gap).unwrap_err();
        assert!(matches!(&err, Error::NonMetrizable(m) if m.contains("tridiagonal_positive")));
    }

    #[test]
    fn five_diagonal_start() {
        let k = newtonian_kernel(60, 1.0, 2.0).unwrap();
        let options = LambdaOptions {
            diagonal_band: DiagonalBand::Five,
            ..Default::default()
        };
        let lambda = compute_lambda_sequence_with(&k, &options).unwrap();
        // band 2 -> 6 -> 18 -> 54 -> full
        assert_eq!(
            lambda.values(),
            &[1.0 / 59.0, 1.0 / 54.0, 1.0 / 18.0, 1.0 / 6.0, 0.5]
        );
    }

    #[test]
    fn override_snaps_to_kernel_value() {
        let k = newtonian_kernel(60, 1.0, 2.0).unwrap();
        let options = LambdaOptions {
            lambda0_override: Some(0.3),
            ..Default::default()
        };
        let lambda = compute_lambda_sequence_with(&k, &options).unwrap();
        // 0.3 snaps to 1/3, giving band 3 -> 9 -> 27 -> 81.
        assert_eq!(lambda.values(), &[1.0 / 59.0, 1.0 / 27.0, 1.0 / 9.0, 1.0 / 3.0]);
        assert_eq!(lambda.lambda0_raw(), 0.3);

        for bad in [0.0, -1.0, 5.0] {
            let options = LambdaOptions {
                lambda0_override: Some(bad),
                ..Default::default()
            };
            assert!(compute_lambda_sequence_with(&k, &options).is_err(), "{bad}");
        }
    }

    #[test]
    fn inverse_examples() {
        let lambda = LambdaSequence::from_values(vec![1.0 / 3.0, 1.0]).unwrap();
        let inv = |t, v| lambda_inverse(t, &lambda, v).unwrap();
        assert_eq!(inv(1.0, InverseVariant::Script), 2);
        assert_eq!(inv(0.5, InverseVariant::Script), 1);
        assert_eq!(inv(0.2, InverseVariant::Script), 0);
        assert_eq!(inv(5.0, InverseVariant::Script), 2);

        assert_eq!(inv(0.0, InverseVariant::Upper), 0);
        assert_eq!(inv(1.0 / 3.0, InverseVariant::Upper), 0);
        assert_eq!(inv(0.5, InverseVariant::Upper), 1);
        assert_eq!(inv(1.0, InverseVariant::Upper), 1);
        assert_eq!(inv(5.0, InverseVariant::Upper), 1);

        assert_eq!(inv(0.5, InverseVariant::Lower), 0);
        assert_eq!(inv(5.0, InverseVariant::Lower), 0);

        assert!(matches!(
            lambda_inverse(-0.1, &lambda, InverseVariant::Script),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn upper_inverse_is_exact_on_grid() {
        let lambda = LambdaSequence::from_values(vec![0.1, 0.2, 0.4, 0.8]).unwrap();
        for (i, &v) in lambda.values().iter().enumerate() {
            assert_eq!(lambda.inverse(v, InverseVariant::Upper), i);
            assert_eq!(lambda.inverse(v, InverseVariant::Script), i + 1);
        }
    }

    #[test]
    fn json_shape_and_validation() {
        let k = newtonian_kernel(4, 1.0, 2.0).unwrap();
        let lambda = compute_lambda_sequence(&k).unwrap();
        let v = serde_json::to_value(&lambda).unwrap();
        assert_eq!(v, serde_json::json!({"values": [1.0 / 3.0, 1.0], "iterations": 1}));
        let back: LambdaSequence = serde_json::from_value(v).unwrap();
        assert_eq!(back.values(), lambda.values());
        assert!(serde_json::from_str::<LambdaSequence>(r#"{"values":[1,1],"iterations":0}"#).is_err());
        assert!(serde_json::from_str::<LambdaSequence>(r#"{"values":[],"iterations":0}"#).is_err());
    }
}
