//! Probability measures with finite support: atomic measures, sampled
//! clouds from parametric families, Lévy concentration profiles, and the
//! lower concentration dimension.
//!
//! Points are stored as flat real coordinates in ℝᴺ; when N is even the
//! same points are also available as vectors in ℂ^{N/2} (re, im interleaved).

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::CVec;
use crate::quadrature::{fs_uniform_point, neumaier_sum};

/// Weight sums are accepted if within this distance of 1 and then rescaled.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    /// Finitely many explicit atoms with explicit weights.
    Atomic,
    /// A sampled stand-in for a continuous measure; uniform weights.
    SampleCloud,
}

/// A finitely supported probability measure on ℝᴺ (N even ⇒ also on ℂ^{N/2}).
#[derive(Clone, Debug)]
pub struct Measure {
    kind: MeasureKind,
    ambient_dim: usize,
    /// Row-major point coordinates, len = n_points · ambient_dim.
    points: Vec<f64>,
    /// Nonnegative, rescaled to sum 1 at construction.
    weights: Vec<f64>,
    /// Complex view of `points` when ambient_dim is even.
    points_complex: Option<Vec<Complex64>>,
}

fn dist_sq_real(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()
}

fn validate_and_build(
    kind: MeasureKind,
    ambient_dim: usize,
    points: Vec<f64>,
    mut weights: Vec<f64>,
    require_distinct: bool,
) -> Result<Measure> {
    if ambient_dim == 0 {
        return Err(Error::EmptyVector);
    }
    let n_points = weights.len();
    if n_points == 0 {
        return Err(Error::InvalidWeights(
            "measure needs at least one point".into(),
        ));
    }
    if points.len() != n_points * ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: n_points * ambient_dim,
            got: points.len(),
        });
    }
    if points.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "non-finite point coordinate".into(),
        ));
    }
    for (i, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidWeights(format!(
                "weight {i} is {w}, must be finite and >= 0"
            )));
        }
    }
    let sum = neumaier_sum(weights.iter().copied());
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
    }
    for w in &mut weights {
        *w /= sum;
    }
    if require_distinct {
        for i in 0..n_points {
            for j in (i + 1)..n_points {
                let a = &points[i * ambient_dim..(i + 1) * ambient_dim];
                let b = &points[j * ambient_dim..(j + 1) * ambient_dim];
                if a == b {
                    return Err(Error::DuplicatePoints(i, j));
                }
            }
        }
    }
    let points_complex = if ambient_dim % 2 == 0 {
        Some(
            points
                .chunks_exact(2)
                .map(|c| Complex64::new(c[0], c[1]))
                .collect(),
        )
    } else {
        None
    };
    Ok(Measure {
        kind,
        ambient_dim,
        points,
        weights,
        points_complex,
    })
}

/// Atomic measure from complex support points and weights.
pub fn make_atomic(points: &[CVec], weights: &[f64]) -> Result<Measure> {
    if points.is_empty() {
        return Err(Error::EmptyVector);
    }
    if points.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            got: weights.len(),
        });
    }
    let n = points[0].dim();
    let mut flat = Vec::with_capacity(points.len() * 2 * n);
    for p in points {
        if p.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.dim(),
            });
        }
        flat.extend(p.to_real_coords());
    }
    validate_and_build(MeasureKind::Atomic, 2 * n, flat, weights.to_vec(), true)
}

/// Atomic measure from real coordinate rows (ambient ℝᴺ, any N ≥ 1).
pub fn make_atomic_real(points: &[Vec<f64>], weights: &[f64]) -> Result<Measure> {
    if points.is_empty() {
        return Err(Error::EmptyVector);
    }
    let dim = points[0].len();
    let mut flat = Vec::with_capacity(points.len() * dim);
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
        flat.extend_from_slice(p);
    }
    validate_and_build(MeasureKind::Atomic, dim, flat, weights.to_vec(), true)
}

impl Measure {
    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    /// Real ambient dimension N.
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Complex dimension n = N/2; errors for odd N.
    pub fn complex_dim(&self) -> Result<usize> {
        if self.ambient_dim % 2 == 0 {
            Ok(self.ambient_dim / 2)
        } else {
            Err(Error::InvalidParameter(format!(
                "measure lives in R^{}, which has no complex structure",
                self.ambient_dim
            )))
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn point_real(&self, i: usize) -> &[f64] {
        &self.points[i * self.ambient_dim..(i + 1) * self.ambient_dim]
    }

    /// All support points as a flat complex slice (n entries per point).
    pub fn complex_points(&self) -> Result<&[Complex64]> {
        self.points_complex
            .as_deref()
            .ok_or_else(|| Error::InvalidParameter("odd ambient dimension".into()))
    }

    pub fn point_cvec(&self, i: usize) -> Result<CVec> {
        let n = self.complex_dim()?;
        let flat = self.complex_points()?;
        CVec::new(flat[i * n..(i + 1) * n].to_vec())
    }

    /// Largest single-point weight (the largest atom for Atomic measures).
    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    /// ∫ log(1 + |w|²) dμ(w); finite for every finitely supported measure.
    pub fn log_moment(&self) -> f64 {
        neumaier_sum((0..self.len()).map(|i| {
            let p = self.point_real(i);
            let norm_sq: f64 = p.iter().map(|v| v * v).sum();
            self.weights[i] * norm_sq.ln_1p()
        }))
    }
}

/// μ(B(x, r)) for the open Euclidean ball about real coordinates x.
pub fn concentration_real(mu: &Measure, x: &[f64], r: f64) -> Result<f64> {
    if x.len() != mu.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.ambient_dim(),
            got: x.len(),
        });
    }
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "radius must be > 0, got {r}"
        )));
    }
    let rr = r * r;
    Ok(neumaier_sum((0..mu.len()).filter_map(|i| {
        if dist_sq_real(mu.point_real(i), x) < rr {
            Some(mu.weights()[i])
        } else {
            None
        }
    })))
}

/// μ(B(x, r)) for x ∈ ℂⁿ.
pub fn concentration(mu: &Measure, x: &CVec, r: f64) -> Result<f64> {
    concentration_real(mu, &x.to_real_coords(), r)
}

/// Lévy concentration function sampled on a radius grid.
#[derive(Clone, Debug)]
pub struct ConcentrationProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

/// Integer cell coordinates for the bucket grid at scale r.
fn cell_of(p: &[f64], r: f64) -> Vec<i64> {
    p.iter().map(|&v| (v / r).floor() as i64).collect()
}

/// Q_μ(r) for one radius via a bucket grid: only cells near each point are
/// touched. Per-point sums run in a fixed order, so the result does not
/// depend on the thread count.
fn q_at_radius_generic(mu: &Measure, r: f64) -> f64 {
    let d = mu.ambient_dim();
    let n = mu.len();
    let mut buckets: HashMap<Vec<i64>, Vec<u32>> = HashMap::new();
    let cells: Vec<Vec<i64>> = (0..n).map(|i| cell_of(mu.point_real(i), r)).collect();
    for (i, c) in cells.iter().enumerate() {
        buckets.entry(c.clone()).or_default().push(i as u32);
    }
    let rr = r * r;
    let offsets: Vec<Vec<i64>> = {
        let mut out = vec![vec![]];
        for _ in 0..d {
            let mut next = Vec::with_capacity(out.len() * 3);
            for base in &out {
                for step in [-1i64, 0, 1] {
                    let mut v = base.clone();
                    v.push(step);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    };
    let per_point: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = mu.point_real(i);
            let mut mass = 0.0;
            let mut key = vec![0i64; d];
            for off in &offsets {
                for (k, (c, o)) in cells[i].iter().zip(off).enumerate() {
                    key[k] = c + o;
                }
                if let Some(members) = buckets.get(&key) {
                    for &j in members {
                        if dist_sq_real(mu.point_real(j as usize), x) < rr {
                            mass += mu.weights()[j as usize];
                        }
                    }
                }
            }
            mass
        })
        .collect();
    per_point.into_iter().fold(0.0, f64::max)
}

/// Planar fast path: a grid of sub-cells of size r/s, organized as rows of
/// sorted columns with prefix-summed weights. Per center and row, the
/// column span of cells wholly inside the ball is added via one prefix-sum
/// difference; only the few circle-crossing cells at the span ends are
/// scanned point-by-point. The subdivision factor s is tuned from a cheap
/// density pre-pass.
fn q_at_radius_planar(mu: &Measure, r: f64) -> f64 {
    /// A point of the plane with its weight: (x, y, w).
    type WeightedPoint = (f64, f64, f64);
    struct Row {
        cols: Vec<i64>,
        /// prefix[k] = total weight of cols[0..k]; len = cols.len() + 1.
        prefix: Vec<f64>,
        /// Per-column member points (x, y, weight), same order as cols.
        pts: Vec<Vec<WeightedPoint>>,
    }
    let n = mu.len();
    // Pre-pass at cell size r: the max 3×3 neighborhood point count bounds
    // the ball count from above and sets the subdivision.
    let mut counts: HashMap<(i64, i64), u32> = HashMap::new();
    for i in 0..n {
        let p = mu.point_real(i);
        let key = ((p[0] / r).floor() as i64, (p[1] / r).floor() as i64);
        *counts.entry(key).or_default() += 1;
    }
    let mut k_hat = 0u64;
    for &(cx, cy) in counts.keys() {
        let mut total = 0u64;
        for dx in -1..=1 {
            for dy in -1..=1 {
                total += *counts.get(&(cx + dx, cy + dy)).unwrap_or(&0) as u64;
            }
        }
        k_hat = k_hat.max(total);
    }
    let s = ((3.0 * (0.7 * k_hat as f64).cbrt()).round() as i64).clamp(2, 64);
    let h = r / s as f64;

    // Group points by sub-cell, then build sorted rows.
    let mut by_cell: HashMap<(i64, i64), Vec<WeightedPoint>> = HashMap::new();
    for (i, &w) in mu.weights().iter().enumerate() {
        let p = mu.point_real(i);
        let key = ((p[0] / h).floor() as i64, (p[1] / h).floor() as i64);
        by_cell.entry(key).or_default().push((p[0], p[1], w));
    }
    let mut rows: HashMap<i64, Row> = HashMap::new();
    {
        let mut grouped: HashMap<i64, Vec<(i64, Vec<WeightedPoint>)>> = HashMap::new();
        for ((bx, by), pts) in by_cell {
            grouped.entry(by).or_default().push((bx, pts));
        }
        for (by, mut cols) in grouped {
            cols.sort_by_key(|c| c.0);
            let mut prefix = Vec::with_capacity(cols.len() + 1);
            prefix.push(0.0);
            let mut acc = 0.0;
            for (_, pts) in &cols {
                acc += pts.iter().map(|p| p.2).sum::<f64>();
                prefix.push(acc);
            }
            rows.insert(
                by,
                Row {
                    cols: cols.iter().map(|c| c.0).collect(),
                    prefix,
                    pts: cols.into_iter().map(|c| c.1).collect(),
                },
            );
        }
    }

    let rr = r * r;
    // Squared distance range from coordinate x to the cell box [b·h, (b+1)·h].
    let axis_range = |cell: i64, x: f64| -> (f64, f64) {
        let lo = cell as f64 * h - x;
        let hi = lo + h;
        let far = lo.abs().max(hi.abs());
        let near = if lo <= 0.0 && hi >= 0.0 {
            0.0
        } else {
            lo.abs().min(hi.abs())
        };
        (near * near, far * far)
    };
    let per_point: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let p = mu.point_real(i);
            let (x, y) = (p[0], p[1]);
            let cy = (y / h).floor() as i64;
            let mut mass = 0.0;
            for by in (cy - s - 1)..=(cy + s + 1) {
                let Some(row) = rows.get(&by) else { continue };
                let (min_y, max_y) = axis_range(by, y);
                if min_y >= rr {
                    continue;
                }
                // Columns whose box comes within r of x horizontally:
                // b·h < x + w and (b+1)·h > x − w, with w² = r² − min_y.
                let w = (rr - min_y).sqrt();
                let b_lo = ((x - w) / h).floor() as i64;
                let b_hi = ((x + w) / h).floor() as i64;
                let k_lo = row.cols.partition_point(|&c| c < b_lo);
                let k_hi = row.cols.partition_point(|&c| c <= b_hi);
                if k_lo >= k_hi {
                    continue;
                }
                // Fully-inside column span (if any): far_x² + max_y < r².
                let (mut k_in_lo, mut k_in_hi) = (k_hi, k_hi);
                if max_y < rr {
                    let v = (rr - max_y).sqrt();
                    // Conservative candidate span, then verify endpoints.
                    let c_lo = ((x - v) / h).ceil() as i64;
                    let c_hi = ((x + v) / h).floor() as i64 - 1;
                    k_in_lo = row.cols.partition_point(|&c| c < c_lo).max(k_lo);
                    k_in_hi = row.cols.partition_point(|&c| c <= c_hi).min(k_hi);
                    while k_in_lo < k_in_hi {
                        let (_, far) = axis_range(row.cols[k_in_lo], x);
                        if far + max_y < rr {
                            break;
                        }
                        k_in_lo += 1;
                    }
                    while k_in_hi > k_in_lo {
                        let (_, far) = axis_range(row.cols[k_in_hi - 1], x);
                        if far + max_y < rr {
                            break;
                        }
                        k_in_hi -= 1;
                    }
                    mass += row.prefix[k_in_hi] - row.prefix[k_in_lo];
                }
                // Boundary cells on both sides of the inside span.
                for k in (k_lo..k_in_lo).chain(k_in_hi..k_hi) {
                    let (near, _) = axis_range(row.cols[k], x);
                    if near + min_y >= rr {
                        continue;
                    }
                    for &(px, py, wt) in &row.pts[k] {
                        let dx = px - x;
                        let dy = py - y;
                        if dx * dx + dy * dy < rr {
                            mass += wt;
                        }
                    }
                }
            }
            mass
        })
        .collect();
    per_point.into_iter().fold(0.0, f64::max)
}

fn q_at_radius(mu: &Measure, r: f64) -> f64 {
    if mu.ambient_dim() == 2 {
        q_at_radius_planar(mu, r)
    } else {
        q_at_radius_generic(mu, r)
    }
}

/// Q_μ(r) = sup over the support of the open-ball mass, for each radius.
pub fn q_concentration(mu: &Measure, radii: &[f64]) -> Result<ConcentrationProfile> {
    if radii.is_empty() {
        return Err(Error::InvalidParameter("radius list is empty".into()));
    }
    for w in radii.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "radii must be strictly ascending".into(),
            ));
        }
    }
    if !(radii[0] > 0.0) {
        return Err(Error::InvalidParameter("radii must be positive".into()));
    }
    let values: Vec<f64> = radii.iter().map(|&r| q_at_radius(mu, r)).collect();
    Ok(ConcentrationProfile {
        radii: radii.to_vec(),
        values,
    })
}

/// Result of the lower-concentration-dimension fit.
#[derive(Copy, Clone, Debug)]
pub struct DimensionEstimate {
    /// Fitted slope of log Q_μ(r) against log r, clamped to [0, N].
    pub gamma: f64,
    /// RMS residual of the log-log fit (0 = perfect power law).
    pub residual: f64,
    /// Set when the profile is flat (e.g. Q ≡ 1), in which case gamma = 0.
    pub flat: bool,
}

/// Least-squares slope of log Q_μ(r) vs log r over a geometric radius grid.
///
/// For sample clouds the window matters: Q is a maximum over support
/// points, so radii where the expected ball count N·Q(r) is small inflate
/// Q by the largest sampling fluctuation and flatten the fitted slope.
/// Choose r_lo so that N·Q(r_lo) is at least a few hundred; the reported
/// residual flags windows where no clean power law holds.
pub fn dimension_estimate(
    mu: &Measure,
    r_lo: f64,
    r_hi: f64,
    num_radii: usize,
) -> Result<DimensionEstimate> {
    if !(r_lo > 0.0) || !(r_hi > r_lo) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < r_lo < r_hi, got {r_lo}, {r_hi}"
        )));
    }
    if num_radii < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 radii, got {num_radii}"
        )));
    }
    let m = num_radii;
    let radii: Vec<f64> = (0..m)
        .map(|i| r_lo * (r_hi / r_lo).powf(i as f64 / (m - 1) as f64))
        .collect();
    let profile = q_concentration(mu, &radii)?;
    let vmin = profile.values.iter().copied().fold(f64::INFINITY, f64::min);
    let vmax = profile.values.iter().copied().fold(0.0, f64::max);
    if vmax - vmin < 1e-12 {
        return Ok(DimensionEstimate {
            gamma: 0.0,
            residual: 0.0,
            flat: true,
        });
    }
    let xs: Vec<f64> = profile.radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = profile.values.iter().map(|q| q.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / m as f64;
    let ybar = ys.iter().sum::<f64>() / m as f64;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum::<f64>()
        / m as f64)
        .sqrt();
    Ok(DimensionEstimate {
        gamma: slope.clamp(0.0, mu.ambient_dim() as f64),
        residual,
        flat: false,
    })
}

/// Parametric families of sample clouds.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Uniform on a solid Euclidean ball.
    Ball,
    /// Uniform on a Euclidean sphere (surface).
    Sphere,
    /// Uniform on a straight segment.
    Segment,
    /// Uniform on a k-dimensional axis-box patch (a square for k = 2).
    Kplane,
    /// Midpoints of the level-d intervals of a two-branch Cantor set,
    /// d = ⌈log₂ N⌉, subsampled to N points when 2^d > N.
    CantorLine,
    /// Fubini–Study-uniform points of ℙⁿ, stored as unit representatives
    /// in ℂⁿ⁺¹ (ambient ℝ^{2(n+1)}).
    UniformPn,
}

/// Parameters of a sampled measure; `validate` lists the exact rules.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub family: Family,
    /// Center in real ambient coordinates (sets the ambient dimension).
    /// Unused by uniform_pn.
    #[serde(default)]
    pub center: Option<Vec<f64>>,
    /// Radius (ball, sphere) or total length / side (segment, kplane,
    /// cantor_line).
    #[serde(default)]
    pub scale: Option<f64>,
    /// Orthonormal direction vectors: one for segment/cantor_line, k for
    /// kplane. Defaults to the first coordinate axes.
    #[serde(default)]
    pub orientation: Option<Vec<Vec<f64>>>,
    /// Patch dimension for kplane (default 2).
    #[serde(default)]
    pub k: Option<usize>,
    /// Cantor contraction ratio in (0, 1/2].
    #[serde(default)]
    pub ratio: Option<f64>,
    /// Complex dimension for uniform_pn.
    #[serde(default)]
    pub n: Option<usize>,
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

impl FamilySpec {
    fn center(&self) -> Result<&[f64]> {
        self.center
            .as_deref()
            .filter(|c| !c.is_empty())
            .ok_or_else(|| Error::InvalidParameter("family needs a nonempty center".into()))
    }

    fn scale(&self) -> Result<f64> {
        match self.scale {
            Some(s) if s > 0.0 && s.is_finite() => Ok(s),
            _ => Err(Error::InvalidParameter(
                "family needs a positive finite scale".into(),
            )),
        }
    }

    /// Orthonormal basis of the patch directions, validated or defaulted.
    fn basis(&self, ambient: usize, count: usize) -> Result<Vec<Vec<f64>>> {
        match &self.orientation {
            None => {
                if count > ambient {
                    return Err(Error::InvalidParameter(format!(
                        "patch dimension {count} exceeds ambient {ambient}"
                    )));
                }
                Ok((0..count)
                    .map(|i| {
                        let mut e = vec![0.0; ambient];
                        e[i] = 1.0;
                        e
                    })
                    .collect())
            }
            Some(vecs) => {
                if vecs.len() != count {
                    return Err(Error::InvalidParameter(format!(
                        "expected {count} orientation vectors, got {}",
                        vecs.len()
                    )));
                }
                for v in vecs {
                    if v.len() != ambient {
                        return Err(Error::DimensionMismatch {
                            expected: ambient,
                            got: v.len(),
                        });
                    }
                    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>();
                    if (norm - 1.0).abs() > 1e-8 {
                        return Err(Error::InvalidParameter(
                            "orientation vectors must be unit".into(),
                        ));
                    }
                }
                for i in 0..vecs.len() {
                    for j in (i + 1)..vecs.len() {
                        let dot: f64 = vecs[i].iter().zip(&vecs[j]).map(|(a, b)| a * b).sum();
                        if dot.abs() > 1e-8 {
                            return Err(Error::InvalidParameter(
                                "orientation vectors must be orthogonal".into(),
                            ));
                        }
                    }
                }
                Ok(vecs.clone())
            }
        }
    }
}

/// The level-d interval left endpoints of the two-branch Cantor set with
/// contraction ratio rho on [0, 1], in ascending order, plus the interval
/// length.
fn cantor_intervals(rho: f64, depth: usize) -> (Vec<f64>, f64) {
    let mut lefts = vec![0.0f64];
    let mut len = 1.0f64;
    for _ in 0..depth {
        let next_len = len * rho;
        let mut next = Vec::with_capacity(lefts.len() * 2);
        for &a in &lefts {
            next.push(a);
            next.push(a + len - next_len);
        }
        lefts = next;
        len = next_len;
    }
    (lefts, len)
}

/// Draw a sample cloud. Bit-identical output for identical specs.
pub fn sample_family(spec: &FamilySpec) -> Result<Measure> {
    if spec.samples == 0 {
        return Err(Error::InvalidParameter("sample count must be >= 1".into()));
    }
    let n_samples = spec.samples;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (ambient, flat) = match spec.family {
        Family::Ball | Family::Sphere => {
            let center = spec.center()?;
            let radius = spec.scale()?;
            let d = center.len();
            let solid = spec.family == Family::Ball;
            let mut flat = Vec::with_capacity(n_samples * d);
            for _ in 0..n_samples {
                // Gaussian direction, then radius R·U^{1/d} for the solid ball.
                let mut dir: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                let norm: f64 = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
                let norm = if norm < 1e-300 { 1.0 } else { norm };
                let rho = if solid {
                    radius * rng.random::<f64>().powf(1.0 / d as f64)
                } else {
                    radius
                };
                for (c, v) in center.iter().zip(&mut dir) {
                    *v = c + rho * *v / norm;
                }
                flat.extend_from_slice(&dir);
            }
            (d, flat)
        }
        Family::Segment => {
            let center = spec.center()?;
            let length = spec.scale()?;
            let d = center.len();
            let dir = &spec.basis(d, 1)?[0];
            let mut flat = Vec::with_capacity(n_samples * d);
            for _ in 0..n_samples {
                let t = rng.random::<f64>() - 0.5;
                flat.extend(center.iter().zip(dir).map(|(c, u)| c + t * length * u));
            }
            (d, flat)
        }
        Family::Kplane => {
            let center = spec.center()?;
            let side = spec.scale()?;
            let d = center.len();
            let k = spec.k.unwrap_or(2);
            if k == 0 {
                return Err(Error::InvalidParameter("kplane needs k >= 1".into()));
            }
            let basis = spec.basis(d, k)?;
            let mut flat = Vec::with_capacity(n_samples * d);
            for _ in 0..n_samples {
                let ts: Vec<f64> = (0..k).map(|_| rng.random::<f64>() - 0.5).collect();
                let mut p = center.to_vec();
                for (t, b) in ts.iter().zip(&basis) {
                    for (pi, bi) in p.iter_mut().zip(b) {
                        *pi += t * side * bi;
                    }
                }
                flat.extend_from_slice(&p);
            }
            (d, flat)
        }
        Family::CantorLine => {
            let center = spec.center()?;
            let length = spec.scale()?;
            let rho = match spec.ratio {
                Some(r) if r > 0.0 && r <= 0.5 => r,
                Some(r) => {
                    return Err(Error::InvalidParameter(format!(
                        "Cantor ratio must lie in (0, 1/2], got {r}"
                    )))
                }
                None => return Err(Error::InvalidParameter("cantor_line needs a ratio".into())),
            };
            let d = center.len();
            let dir = &spec.basis(d, 1)?[0];
            let depth = (n_samples as f64).log2().ceil().max(1.0) as usize;
            let (lefts, ilen) = cantor_intervals(rho, depth);
            // Midpoints in [0,1], recentred to [−1/2, 1/2] of the segment.
            let mids: Vec<f64> = lefts.iter().map(|a| a + 0.5 * ilen - 0.5).collect();
            let chosen: Vec<usize> = if mids.len() > n_samples {
                let mut idx = rand::seq::index::sample(&mut rng, mids.len(), n_samples).into_vec();
                idx.sort_unstable();
                idx
            } else {
                (0..mids.len()).collect()
            };
            let mut flat = Vec::with_capacity(chosen.len() * d);
            for &i in &chosen {
                let t = mids[i];
                flat.extend(center.iter().zip(dir).map(|(c, u)| c + t * length * u));
            }
            (d, flat)
        }
        Family::UniformPn => {
            let n = match spec.n {
                Some(n) if n >= 1 => n,
                _ => return Err(Error::InvalidParameter("uniform_pn needs n >= 1".into())),
            };
            let d = 2 * (n + 1);
            let mut flat = Vec::with_capacity(n_samples * d);
            for _ in 0..n_samples {
                let p = fs_uniform_point(&mut rng, n);
                flat.extend(p.representative().to_real_coords());
            }
            (d, flat)
        }
    };
    let count = flat.len() / ambient;
    let weights = vec![1.0 / count as f64; count];
    validate_and_build(MeasureKind::SampleCloud, ambient, flat, weights, false)
}

/// On-disk measure description.
///
/// ```json
/// {"kind": "atomic", "points": [[re, im, ...], ...], "weights": [...]}
/// {"kind": "family", "family": {"family": "segment", "center": [0,0],
///  "scale": 2.0, "samples": 1000}, "seed": 7}
/// ```
///
/// Unknown fields are rejected.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Parse a JSON measure description.
pub fn measure_from_json(text: &str) -> Result<Measure> {
    let file: MeasureFile = serde_json::from_str(text)?;
    match file.kind.as_str() {
        "atomic" => {
            let points = file
                .points
                .ok_or_else(|| Error::MeasureFile("atomic measure needs points".into()))?;
            let weights = file
                .weights
                .ok_or_else(|| Error::MeasureFile("atomic measure needs weights".into()))?;
            if file.family.is_some() {
                return Err(Error::MeasureFile(
                    "atomic measure must not carry a family".into(),
                ));
            }
            make_atomic_real(&points, &weights)
        }
        "family" => {
            let mut family = file
                .family
                .ok_or_else(|| Error::MeasureFile("family measure needs a family".into()))?;
            if file.points.is_some() || file.weights.is_some() {
                return Err(Error::MeasureFile(
                    "family measure must not carry explicit points or weights".into(),
                ));
            }
            if let Some(seed) = file.seed {
                family.seed = seed;
            }
            sample_family(&family)
        }
        other => Err(Error::MeasureFile(format!(
            "unknown measure kind {other:?}; expected \"atomic\" or \"family\""
        ))),
    }
}

/// Load a measure from a JSON file.
pub fn load_measure(path: &Path) -> Result<Measure> {
    let text = std::fs::read_to_string(path)?;
    measure_from_json(&text)
}

/// Serialize any measure to the atomic on-disk form (explicit points).
pub fn measure_to_json(mu: &Measure) -> String {
    let points: Vec<Vec<f64>> = (0..mu.len()).map(|i| mu.point_real(i).to_vec()).collect();
    let file = MeasureFile {
        kind: "atomic".into(),
        points: Some(points),
        weights: Some(mu.weights().to_vec()),
        family: None,
        seed: None,
    };
    serde_json::to_string_pretty(&file).expect("plain data serializes")
}
