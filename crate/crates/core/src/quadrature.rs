//! Deterministic integration backends: midpoint box grids on ℝᵈ, Monte
//! Carlo on ℙⁿ against the normalized Fubini–Study volume, the radial
//! polar-coordinate rule on ℙⁿ, sphere means, and ball masses.
//!
//! Every accumulation is either sequentially ordered or compensated
//! (Neumaier), so results are bit-identical across thread counts.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::geometry::{CVec, ProjectivePoint};

/// Neumaier's compensated sum; deterministic for a fixed iteration order.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Axis-aligned box with a midpoint grid: node j on axis i sits at
/// center_i − hw_i + (2·hw_i)·(j+½)/ppa.
#[derive(Clone, Debug)]
pub struct GridSpec {
    center: Vec<f64>,
    half_widths: Vec<f64>,
    points_per_axis: usize,
}

impl GridSpec {
    pub fn new(center: Vec<f64>, half_widths: Vec<f64>, points_per_axis: usize) -> Result<Self> {
        if center.len() != half_widths.len() {
            return Err(Error::DimensionMismatch {
                expected: center.len(),
                got: half_widths.len(),
            });
        }
        if center.is_empty() {
            return Err(Error::EmptyVector);
        }
        if points_per_axis < 2 {
            return Err(Error::InvalidParameter(format!(
                "points per axis must be >= 2, got {points_per_axis}"
            )));
        }
        if half_widths.iter().any(|&h| !(h > 0.0) || !h.is_finite()) {
            return Err(Error::InvalidParameter(
                "half widths must be positive and finite".into(),
            ));
        }
        Ok(GridSpec {
            center,
            half_widths,
            points_per_axis,
        })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn node_count(&self) -> usize {
        self.points_per_axis.pow(self.dim() as u32)
    }

    pub fn cell_volume(&self) -> f64 {
        self.half_widths
            .iter()
            .map(|&h| 2.0 * h / self.points_per_axis as f64)
            .product()
    }

    /// Node coordinates for the flat row-major index (last axis fastest).
    pub fn node(&self, mut flat: usize) -> Vec<f64> {
        let d = self.dim();
        let ppa = self.points_per_axis;
        let mut idx = vec![0usize; d];
        for axis in (0..d).rev() {
            idx[axis] = flat % ppa;
            flat /= ppa;
        }
        (0..d)
            .map(|i| {
                self.center[i] - self.half_widths[i]
                    + 2.0 * self.half_widths[i] * (idx[i] as f64 + 0.5) / ppa as f64
            })
            .collect()
    }

    /// Same box, different resolution.
    pub fn with_points_per_axis(&self, ppa: usize) -> Result<GridSpec> {
        GridSpec::new(self.center.clone(), self.half_widths.clone(), ppa)
    }
}

/// Result of a grid integration: the midpoint Riemann sum and how many
/// nodes were excluded for taking a ±∞ value.
#[derive(Copy, Clone, Debug)]
pub struct GridIntegral {
    pub value: f64,
    pub excluded: usize,
}

/// Midpoint-rule integral of f over the box. ±∞ nodes are excluded and
/// counted; NaN is a hard error, as is a grid with no finite node.
pub fn grid_integrate<F>(f: F, spec: &GridSpec) -> Result<GridIntegral>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let total = spec.node_count();
    let values: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|i| f(&spec.node(i)))
        .collect();
    let mut excluded = 0usize;
    for (i, v) in values.iter().enumerate() {
        if v.is_nan() {
            return Err(Error::Quadrature(format!("NaN at grid node {i}")));
        }
        if v.is_infinite() {
            excluded += 1;
        }
    }
    if excluded == total {
        return Err(Error::Quadrature("all grid nodes are infinite".into()));
    }
    let sum = neumaier_sum(values.iter().copied().filter(|v| v.is_finite()));
    Ok(GridIntegral {
        value: sum * spec.cell_volume(),
        excluded,
    })
}

/// Grid L^p norm (grid_integrate |f|^p)^{1/p}, p ≥ 1.
pub fn lp_norm<F>(f: F, spec: &GridSpec, p: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
    }
    let integral = grid_integrate(|x| f(x).abs().powf(p), spec)?;
    Ok(integral.value.powf(1.0 / p))
}

/// A Fubini–Study-uniform random point of ℙⁿ: a standard complex Gaussian
/// vector in ℂⁿ⁺¹, projectivized.
pub fn fs_uniform_point<R: Rng>(rng: &mut R, n: usize) -> ProjectivePoint {
    loop {
        let entries: Vec<Complex64> = (0..n + 1)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im)
            })
            .collect();
        let v = CVec::new(entries).expect("nonempty by construction");
        if v.norm() > 1e-12 {
            return ProjectivePoint::new(v).expect("nonzero by the norm guard");
        }
    }
}

/// Monte Carlo mean and standard error.
#[derive(Copy, Clone, Debug)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
}

/// Mean of f over N Fubini–Study-uniform points of ℙⁿ.
///
/// Sampling is sequential from a ChaCha stream seeded by `seed`, evaluation
/// is data-parallel in index order, and both reductions are compensated;
/// the result is bit-identical for a fixed seed regardless of thread count.
pub fn mc_integrate_pn<F>(f: F, n: usize, samples: usize, seed: u64) -> Result<McEstimate>
where
    F: Fn(&ProjectivePoint) -> f64 + Sync,
{
    if samples < 100 {
        return Err(Error::InvalidParameter(format!(
            "Monte Carlo needs at least 100 samples, got {samples}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<ProjectivePoint> = (0..samples)
        .map(|_| fs_uniform_point(&mut rng, n))
        .collect();
    let values: Vec<f64> = points.par_iter().map(&f).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Quadrature(
            "non-finite sample in Monte Carlo integration".into(),
        ));
    }
    let mean = neumaier_sum(values.iter().copied()) / samples as f64;
    let var = neumaier_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (samples as f64 - 1.0);
    Ok(McEstimate {
        mean,
        std_error: (var / samples as f64).sqrt(),
    })
}

/// Nodes and weights of m-point Gauss–Legendre on [−1, 1], by Newton
/// iteration on the Legendre recurrence.
fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0f64; m];
    let mut weights = vec![0.0f64; m];
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0f64;
            let mut p1 = x;
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Polar-coordinate quadrature rule on ℙⁿ: ∫_{ℙⁿ} f dV = ∫₀^{π/√2} g(r)·A(r) dr
/// for radial f, with A(r) ∝ sin^{2n−2}(r/√2)·sin(√2·r) normalized to mass 1.
///
/// Built in the variable u = sin(r/√2), where A(r) dr = 2n·u^{2n−1} du; the
/// panels are geometric toward u = 0, so integrands with a log singularity
/// at r = 0 are handled to near machine precision.
#[derive(Clone, Debug)]
pub struct RadialRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl RadialRule {
    pub fn new(n: usize, panels: usize, gl_points: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        if panels < 2 || gl_points < 2 {
            return Err(Error::InvalidParameter(
                "radial rule needs at least 2 panels and 2 points".into(),
            ));
        }
        let (gl_x, gl_w) = gauss_legendre(gl_points);
        let mut nodes = Vec::with_capacity(panels * gl_points);
        let mut weights = Vec::with_capacity(panels * gl_points);
        // u-panels [2^{−j−1}, 2^{−j}], j = panels−1 … 0, ascending in u.
        for j in (0..panels).rev() {
            let hi = 0.5f64.powi(j as i32);
            let lo = 0.5 * hi;
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            for (x, w) in gl_x.iter().zip(&gl_w) {
                let u = mid + half * x;
                let du = half * w;
                nodes.push(std::f64::consts::SQRT_2 * u.asin());
                weights.push(2.0 * n as f64 * u.powi(2 * n as i32 - 1) * du);
            }
        }
        Ok(RadialRule { nodes, weights })
    }

    /// Default design: 40 geometric panels × 16-point Gauss–Legendre.
    pub fn for_dim(n: usize) -> Result<Self> {
        RadialRule::new(n, 40, 16)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G) -> Result<f64> {
        let total = neumaier_sum(
            self.nodes
                .iter()
                .zip(&self.weights)
                .map(|(&r, &w)| w * g(r)),
        );
        if !total.is_finite() {
            return Err(Error::Quadrature("non-finite radial integral".into()));
        }
        Ok(total)
    }
}

/// ∫₀^{π/√2} g(r)·A(r) dr with the default rule for ℙⁿ.
pub fn radial_integrate_pn<G: Fn(f64) -> f64>(g: G, n: usize) -> Result<f64> {
    RadialRule::for_dim(n)?.integrate(g)
}

const ALPHA_CACHE_MAX: usize = 6;

/// α_n = −∫₀^{π/√2} log sin(r/√2)·A(r) dr > 0, the normalization constant
/// of the projective logarithmic potential; cached for n ≤ 6.
///
/// The quadrature evaluates to 1/(2n) to ~1e−14; the independent 1-D
/// cross-check is ∫₀¹ u^{2n−1}·log u du = −1/(4n²).
pub fn alpha_n(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("alpha_n needs n >= 1".into()));
    }
    static CACHE: OnceLock<Vec<f64>> = OnceLock::new();
    let compute = |m: usize| -> Result<f64> {
        Ok(-radial_integrate_pn(
            |r| (r / std::f64::consts::SQRT_2).sin().ln(),
            m,
        )?)
    };
    if n <= ALPHA_CACHE_MAX {
        let cache = CACHE.get_or_init(|| {
            (1..=ALPHA_CACHE_MAX)
                .map(|m| compute(m).expect("default radial rule is valid"))
                .collect()
        });
        Ok(cache[n - 1])
    } else {
        compute(n)
    }
}

/// Node counts for the radial-angular product rules behind [`ball_mass`]
/// and the sphere means.
#[derive(Copy, Clone, Debug)]
pub struct BallQuad {
    /// Radial panels on [r_inner, r_outer].
    pub radial_panels: usize,
    /// Gauss–Legendre points per radial panel.
    pub radial_gl: usize,
    /// Gauss–Legendre points for the latitude coordinate on S³ (and S⁵).
    pub sphere_s_points: usize,
    /// Equispaced points per angular circle.
    pub sphere_angle_points: usize,
}

impl Default for BallQuad {
    fn default() -> Self {
        BallQuad {
            radial_panels: 16,
            radial_gl: 8,
            sphere_s_points: 8,
            sphere_angle_points: 16,
        }
    }
}

/// Mean of f over the sphere of radius rho about center (ℝ² or ℝ⁴).
fn sphere_mean_real<F>(f: &F, center: &[f64], rho: f64, quad: &BallQuad) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    match center.len() {
        2 => {
            let m = quad.sphere_angle_points;
            let vals = (0..m).map(|j| {
                let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / m as f64;
                f(&[center[0] + rho * phi.cos(), center[1] + rho * phi.sin()])
            });
            neumaier_sum(vals) / m as f64
        }
        4 => {
            // Hopf coordinates: x = (√(1−s)·e^{iφ₁}, √s·e^{iφ₂}) is uniform
            // on S³ when s, φ₁, φ₂ are independently uniform.
            let (gl_x, gl_w) = gauss_legendre(quad.sphere_s_points);
            let m = quad.sphere_angle_points;
            let mut terms = Vec::with_capacity(quad.sphere_s_points * m * m);
            for (x, w) in gl_x.iter().zip(&gl_w) {
                let s = 0.5 + 0.5 * x;
                let ws = 0.5 * w;
                let r1 = rho * (1.0 - s).max(0.0).sqrt();
                let r2 = rho * s.max(0.0).sqrt();
                for j1 in 0..m {
                    let p1 = 2.0 * std::f64::consts::PI * (j1 as f64 + 0.5) / m as f64;
                    for j2 in 0..m {
                        let p2 = 2.0 * std::f64::consts::PI * (j2 as f64 + 0.5) / m as f64;
                        let pt = [
                            center[0] + r1 * p1.cos(),
                            center[1] + r1 * p1.sin(),
                            center[2] + r2 * p2.cos(),
                            center[3] + r2 * p2.sin(),
                        ];
                        terms.push(ws / (m * m) as f64 * f(&pt));
                    }
                }
            }
            neumaier_sum(terms)
        }
        _ => unreachable!("dimension checked by the callers"),
    }
}

/// ∫ f over the shell r_inner ≤ |x − center| ≤ r_outer in ℝ² or ℝ⁴, by a
/// radial Gauss rule times uniform sphere means.
///
/// When r_inner = 0 the first radial panel is subdivided geometrically so a
/// density peaked at the center (width ≫ machine scale) is resolved.
pub fn shell_mass<F>(
    f: F,
    center: &[f64],
    r_inner: f64,
    r_outer: f64,
    quad: &BallQuad,
) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let d = center.len();
    if d != 2 && d != 4 {
        return Err(Error::InvalidParameter(format!(
            "ball/shell mass supports ambient dimension 2 or 4, got {d}"
        )));
    }
    if !(r_outer > r_inner) || r_inner < 0.0 {
        return Err(Error::InvalidParameter(
            "need 0 <= r_inner < r_outer".into(),
        ));
    }
    let surface = if d == 2 {
        2.0 * std::f64::consts::PI
    } else {
        2.0 * std::f64::consts::PI * std::f64::consts::PI
    };
    // Panel boundaries, ascending.
    let mut bounds = Vec::new();
    let step = (r_outer - r_inner) / quad.radial_panels as f64;
    bounds.push(r_inner);
    if r_inner == 0.0 {
        // Subdivide the innermost panel geometrically: step·2^{−9} … step·2^{−1}.
        for j in (1..=9).rev() {
            bounds.push(step * 0.5f64.powi(j));
        }
    }
    for i in 1..=quad.radial_panels {
        bounds.push(r_inner + step * i as f64);
    }
    bounds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    bounds.dedup();

    let (gl_x, gl_w) = gauss_legendre(quad.radial_gl);
    let mut radial_nodes = Vec::new();
    for seg in bounds.windows(2) {
        let mid = 0.5 * (seg[0] + seg[1]);
        let half = 0.5 * (seg[1] - seg[0]);
        if half <= 0.0 {
            continue;
        }
        for (x, w) in gl_x.iter().zip(&gl_w) {
            radial_nodes.push((mid + half * x, half * w));
        }
    }
    let contributions: Vec<f64> = radial_nodes
        .par_iter()
        .map(|&(rho, w)| {
            let mean = sphere_mean_real(&f, center, rho, quad);
            w * surface * rho.powi(d as i32 - 1) * mean
        })
        .collect();
    let total = neumaier_sum(contributions.iter().copied());
    if !total.is_finite() {
        return Err(Error::Quadrature("non-finite shell mass".into()));
    }
    Ok(total)
}

/// ∫ f over the ball B(center, r) in ℝ² or ℝ⁴.
pub fn ball_mass<F>(f: F, center: &[f64], r: f64, quad: &BallQuad) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    shell_mass(f, center, 0.0, r, quad)
}

/// Mean of f over the unit sphere S^{2n−1} ⊂ ℂⁿ, n ∈ {1, 2, 3}.
///
/// n = 1 is a circle average; n = 2 uses Hopf coordinates; n = 3 uses the
/// smooth simplex chart (t₁,t₂,t₃) = (1−s, s(1−b), s·b) with density 2s,
/// under which |z_j|² = t_j is uniform on the simplex.
pub fn sphere_mean_complex<F>(f: F, n: usize, quad: &BallQuad) -> Result<f64>
where
    F: Fn(&CVec) -> f64 + Sync,
{
    let m = quad.sphere_angle_points;
    let two_pi = 2.0 * std::f64::consts::PI;
    let angle = |j: usize| two_pi * (j as f64 + 0.5) / m as f64;
    let unit = |phi: f64, r: f64| Complex64::new(r * phi.cos(), r * phi.sin());
    match n {
        1 => {
            let vals: Vec<f64> = (0..m)
                .into_par_iter()
                .map(|j| f(&CVec::new(vec![unit(angle(j), 1.0)]).unwrap()))
                .collect();
            Ok(neumaier_sum(vals.iter().copied()) / m as f64)
        }
        2 => {
            let (gl_x, gl_w) = gauss_legendre(quad.sphere_s_points);
            let mut tasks = Vec::new();
            for (x, w) in gl_x.iter().zip(&gl_w) {
                let s = 0.5 + 0.5 * x;
                tasks.push((s, 0.5 * w));
            }
            let vals: Vec<f64> = tasks
                .par_iter()
                .map(|&(s, ws)| {
                    let r1 = (1.0 - s).max(0.0).sqrt();
                    let r2 = s.max(0.0).sqrt();
                    let mut acc = Vec::with_capacity(m * m);
                    for j1 in 0..m {
                        for j2 in 0..m {
                            let z =
                                CVec::new(vec![unit(angle(j1), r1), unit(angle(j2), r2)]).unwrap();
                            acc.push(f(&z));
                        }
                    }
                    ws * neumaier_sum(acc) / (m * m) as f64
                })
                .collect();
            Ok(neumaier_sum(vals.iter().copied()))
        }
        3 => {
            let (gl_x, gl_w) = gauss_legendre(quad.sphere_s_points);
            let mut tasks = Vec::new();
            for (xs, ws) in gl_x.iter().zip(&gl_w) {
                let s = 0.5 + 0.5 * xs;
                for (xb, wb) in gl_x.iter().zip(&gl_w) {
                    let b = 0.5 + 0.5 * xb;
                    // density 2s over (s,b) ∈ [0,1]².
                    tasks.push((s, b, 0.25 * ws * wb * 2.0 * s));
                }
            }
            let vals: Vec<f64> = tasks
                .par_iter()
                .map(|&(s, b, w)| {
                    let t1 = (1.0 - s).max(0.0);
                    let t2 = (s * (1.0 - b)).max(0.0);
                    let t3 = (s * b).max(0.0);
                    let mut acc = Vec::with_capacity(m * m * m);
                    for j1 in 0..m {
                        for j2 in 0..m {
                            for j3 in 0..m {
                                let z = CVec::new(vec![
                                    unit(angle(j1), t1.sqrt()),
                                    unit(angle(j2), t2.sqrt()),
                                    unit(angle(j3), t3.sqrt()),
                                ])
                                .unwrap();
                                acc.push(f(&z));
                            }
                        }
                    }
                    w * neumaier_sum(acc) / (m * m * m) as f64
                })
                .collect();
            Ok(neumaier_sum(vals.iter().copied()))
        }
        _ => Err(Error::InvalidParameter(format!(
            "sphere mean supports n in 1..=3, got {n}"
        ))),
    }
}
