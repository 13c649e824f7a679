//! Balls and annuli for the three metrics compared: the dyadic quasi-metric
//! (F), the diffusion distance (D) and the index distance `|i - j|` (E).

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frink::{InverseVariant, LambdaSequence};
use crate::kernel::AffinityMatrix;

/// Band colours, innermost first. Bands past the last colour cycle.
pub const PALETTE: [&str; 5] = ["yellow", "green", "turquoise", "lavender", "purple"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    F,
    D,
    E,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::F => "F",
            Metric::D => "D",
            Metric::E => "E",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "F" | "f" => Ok(Metric::F),
            "D" | "d" => Ok(Metric::D),
            "E" | "e" => Ok(Metric::E),
            other => Err(Error::InvalidParameter(format!(
                "unknown metric `{other}` (expected F, D or E)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallResult {
    pub center: usize,
    pub radius: f64,
    /// Ascending vertex indices.
    pub members: Vec<usize>,
    pub metric: Metric,
}

impl BallResult {
    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }
}

fn check_center(n: usize, center: usize) -> Result<()> {
    if center >= n {
        return Err(Error::Domain(format!("center {center} out of range for {n} vertices")));
    }
    Ok(())
}

/// `floor(log2(1 / r))` for `0 < r <= 1`, computed without rounding.
fn dyadic_floor(r: f64) -> usize {
    let mut j = 0;
    while j < 1074 && (-((j + 1) as f64)).exp2() >= r {
        j += 1;
    }
    j
}

/// The open ball `{y : delta(center, y) < r}` read directly off the kernel
/// row, without building `delta`.
///
/// With `j = floor(log2(1/r))` the ball is `{K >= lambda(j)}` under the
/// script inverse, `{K > lambda(j)}` under the upper inverse and
/// `{K > lambda(j + 1)}` under the lower one. Indices past the end of the
/// sequence leave only the center.
pub fn delta_ball(
    kernel: &AffinityMatrix,
    lambda: &LambdaSequence,
    center: usize,
    r: f64,
    variant: InverseVariant,
) -> Result<BallResult> {
    check_center(kernel.n(), center)?;
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Domain(format!("ball radius must lie in (0, 1], got {r}")));
    }
    let j = dyadic_floor(r);
    let k = lambda.k();
    let rule = match variant {
        InverseVariant::Script => (j <= k).then(|| (lambda.get(j), true)),
        InverseVariant::Upper => (j < k).then(|| (lambda.get(j), false)),
        InverseVariant::Lower => (j + 1 < k).then(|| (lambda.get(j + 1), false)),
    };
    let members = kernel
        .row(center)
        .iter()
        .enumerate()
        .filter(|&(y, &v)| {
            y == center
                || match rule {
                    Some((t, true)) => v >= t,
                    Some((t, false)) => v > t,
                    None => false,
                }
        })
        .map(|(y, _)| y)
        .collect();
    Ok(BallResult {
        center,
        radius: r,
        members,
        metric: Metric::F,
    })
}

/// `{y : distances[y] < radius}` for a row of distances from `center`.
pub fn distance_ball(distances: &[f64], center: usize, radius: f64, metric: Metric) -> Result<BallResult> {
    check_center(distances.len(), center)?;
    if radius.is_nan() || radius <= 0.0 {
        return Err(Error::Domain(format!("ball radius must be positive, got {radius}")));
    }
    let members = distances
        .iter()
        .enumerate()
        .filter(|&(_, &d)| d < radius)
        .map(|(y, _)| y)
        .collect();
    Ok(BallResult {
        center,
        radius,
        members,
        metric,
    })
}

/// `|center - j|` for every vertex `j`.
pub fn euclidean_distances(n: usize, center: usize) -> Result<Vec<f64>> {
    check_center(n, center)?;
    Ok((0..n).map(|j| center.abs_diff(j) as f64).collect())
}

/// Vertices coloured by which annulus around a center they fall in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusBands {
    pub center: usize,
    pub radii: Vec<f64>,
    /// Band of each vertex, below `palette.len()`.
    pub band_of: Vec<usize>,
    /// Colour of each band, index-aligned with band numbers.
    pub palette: Vec<String>,
}

impl AnnulusBands {
    fn new(center: usize, radii: Vec<f64>, band_of: Vec<usize>, band_count: usize) -> Self {
        let palette = (0..band_count)
            .map(|b| PALETTE[b % PALETTE.len()].to_string())
            .collect();
        Self {
            center,
            radii,
            band_of,
            palette,
        }
    }

    pub fn color_of(&self, v: usize) -> &str {
        &self.palette[self.band_of[v]]
    }

    /// Vertices of band `b`, ascending.
    pub fn band(&self, b: usize) -> Vec<usize> {
        self.band_of
            .iter()
            .enumerate()
            .filter(|&(_, &x)| x == b)
            .map(|(v, _)| v)
            .collect()
    }

    pub fn band_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.palette.len()];
        for &b in &self.band_of {
            sizes[b] += 1;
        }
        sizes
    }
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::Domain("at least one radius is required".into()));
    }
    if radii.iter().any(|r| !r.is_finite()) || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("radii must be finite and strictly ascending".into()));
    }
    Ok(())
}

/// Band of vertex `v` is the number of radii not exceeding its distance.
pub fn annuli(distances: &[f64], center: usize, radii: &[f64]) -> Result<AnnulusBands> {
    check_center(distances.len(), center)?;
    check_radii(radii)?;
    let band_of = distances
        .iter()
        .map(|&d| radii.partition_point(|&r| r <= d))
        .collect();
    Ok(AnnulusBands::new(center, radii.to_vec(), band_of, radii.len() + 1))
}

/// Kernel-level bands between consecutive thresholds. Vertex `y` lands in
/// band `b` when exactly `b` thresholds are at or above `K(center, y)`; the
/// center is forced into band 0. Ties with `lambda(0)` are merged into band
/// `k`, so band `k + 1` only holds pairs below every threshold.
/// Radii are the thresholds themselves.
pub fn frink_annuli(kernel: &AffinityMatrix, lambda: &LambdaSequence, center: usize) -> Result<AnnulusBands> {
    check_center(kernel.n(), center)?;
    let values = lambda.values();
    let k = lambda.k();
    let band_of: Vec<usize> = kernel
        .row(center)
        .iter()
        .enumerate()
        .map(|(y, &v)| {
            if y == center {
                0
            } else if v < values[0] {
                k + 1
            } else {
                (values.len() - values.partition_point(|&t| t < v)).min(k)
            }
        })
        .collect();
    let band_count = band_of.iter().max().map_or(0, |b| b + 1).max(k + 1);
    Ok(AnnulusBands::new(center, values.to_vec(), band_of, band_count))
}

/// `|A ∩ B| / |A ∪ B|`, 1 when both are empty.
pub fn jaccard(a: &[usize], b: &[usize]) -> f64 {
    let a: BTreeSet<_> = a.iter().collect();
    let b: BTreeSet<_> = b.iter().collect();
    let union = a.union(&b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(&b).count() as f64 / union as f64
}

/// Undirected DOT graph with nodes filled by band colour and an edge for
/// every pair with `K >= edge_threshold`.
pub fn bands_to_dot(bands: &AnnulusBands, kernel: &AffinityMatrix, edge_threshold: f64) -> String {
    let n = kernel.n();
    let mut out = String::new();
    writeln!(out, "graph balls {{").unwrap();
    writeln!(out, "  node [style=filled];").unwrap();
    for v in 0..n {
        let peripheries = if v == bands.center { ", penwidth=2" } else { "" };
        writeln!(
            out,
            "  {v} [style=filled, fillcolor={}{peripheries}];",
            bands.color_of(v)
        )
        .unwrap();
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if kernel.get(i, j) >= edge_threshold {
                writeln!(out, "  {i} -- {j};").unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}
