//! Riesz potentials J_{μ,α}, their Cavalieri (layer-cake) representation,
//! critical integrability exponents, and an empirical L^p threshold probe.
//!
//! Two independent routes to the same quantity anchor this module:
//! [`riesz_j`] sums |x − p|^{−α} directly over atoms, while
//! [`cavalieri_j`] integrates the ball-mass profile r ↦ μ(B(x,r)) against
//! α·r^{−α−1}. Their agreement exercises the concentration machinery on a
//! formula with a closed-form counterpart.

use crate::error::{Error, Result};
use crate::geometry::CVec;
use crate::measures::Measure;
use crate::quadrature::{grid_integrate, neumaier_sum, GridSpec};

fn check_alpha(alpha: f64, ambient: usize) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0 && alpha < ambient as f64) {
        return Err(Error::InvalidParameter(format!(
            "Riesz exponent must lie in (0, {ambient}), got {alpha}"
        )));
    }
    Ok(())
}

fn check_point_dim(mu: &Measure, x: &CVec) -> Result<usize> {
    let n = mu.complex_dim()?;
    if x.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.dim(),
        });
    }
    Ok(n)
}

/// J_{μ,α}(x) = Σ_j w_j·|x − p_j|^{−α}, with |·| the Euclidean norm of
/// ℝ^N ≅ ℂⁿ. Returns +∞ (never NaN) exactly when x is an atom of positive
/// weight. Requires 0 < α < N.
pub fn riesz_j(mu: &Measure, x: &CVec, alpha: f64) -> Result<f64> {
    check_point_dim(mu, x)?;
    check_alpha(alpha, mu.ambient_dim())?;
    riesz_j_real(mu, &x.to_real_coords(), alpha)
}

/// [`riesz_j`] on raw real coordinates; shared by the grid probes.
pub fn riesz_j_real(mu: &Measure, x: &[f64], alpha: f64) -> Result<f64> {
    if x.len() != mu.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.ambient_dim(),
            got: x.len(),
        });
    }
    check_alpha(alpha, mu.ambient_dim())?;
    let weights = mu.weights();
    let mut terms = Vec::with_capacity(mu.len());
    for (i, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let d_sq: f64 = mu
            .point_real(i)
            .iter()
            .zip(x)
            .map(|(p, q)| (p - q) * (p - q))
            .sum();
        if d_sq == 0.0 {
            return Ok(f64::INFINITY);
        }
        terms.push(w * d_sq.powf(-0.5 * alpha));
    }
    Ok(neumaier_sum(terms))
}

/// J_{μ,α}(x) through the Cavalieri principle:
/// α·∫₀^∞ μ(B(x,r))·r^{−α−1} dr, computed as a product rule on
/// geometrically spaced panels between the nearest support distance and
/// r_max — the ball mass is sampled at each panel's geometric midpoint and
/// the power weight α·r^{−α−1} is integrated exactly — plus the exact tail
/// r_max^{−α} where the ball mass is 1.
///
/// The support must be contained in B(x, r_max). Returns +∞ when x lies on
/// a positively weighted atom. `quad_points` (≥ 64) is the panel count;
/// the relative quadrature error is at most about
/// α·log(r_max/d_min)/quad_points.
pub fn cavalieri_j(
    mu: &Measure,
    x: &CVec,
    alpha: f64,
    r_max: f64,
    quad_points: usize,
) -> Result<f64> {
    check_point_dim(mu, x)?;
    check_alpha(alpha, mu.ambient_dim())?;
    if quad_points < 64 {
        return Err(Error::InvalidParameter(format!(
            "Cavalieri quadrature needs at least 64 points, got {quad_points}"
        )));
    }
    if !(r_max.is_finite() && r_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "r_max must be finite and positive, got {r_max}"
        )));
    }
    let xr = x.to_real_coords();
    let weights = mu.weights();
    // (distance, weight) per positively weighted atom, sorted by distance.
    let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(mu.len());
    for (i, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let d_sq: f64 = mu
            .point_real(i)
            .iter()
            .zip(&xr)
            .map(|(p, q)| (p - q) * (p - q))
            .sum();
        atoms.push((d_sq.sqrt(), w));
    }
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let farthest = atoms.last().map_or(0.0, |a| a.0);
    if farthest > r_max {
        return Err(Error::SupportExceedsRmax { farthest, r_max });
    }
    let d_min = atoms.first().map_or(0.0, |a| a.0);
    if d_min == 0.0 {
        return Ok(f64::INFINITY);
    }
    // Prefix masses: cum[i] = mass of atoms with distance <= atoms[i].0,
    // so the open-ball mass at radius r is cum before the first index with
    // distance >= r.
    let mut cum = Vec::with_capacity(atoms.len());
    let mut running = 0.0;
    for &(_, w) in &atoms {
        running += w;
        cum.push(running);
    }
    let total = running;
    let open_ball_mass = |r: f64| -> f64 {
        let idx = atoms.partition_point(|&(d, _)| d < r);
        if idx == 0 {
            0.0
        } else {
            cum[idx - 1]
        }
    };
    let lo = d_min.ln();
    let hi = r_max.ln();
    let m = quad_points;
    let mut terms = Vec::with_capacity(m + 1);
    for i in 0..m {
        let ta = lo + (hi - lo) * i as f64 / m as f64;
        let tb = lo + (hi - lo) * (i + 1) as f64 / m as f64;
        let (a, b) = (ta.exp(), tb.exp());
        if a >= b {
            continue;
        }
        let mass = open_ball_mass((0.5 * (ta + tb)).exp());
        if mass > 0.0 {
            // α·∫_a^b r^{−α−1} dr = a^{−α} − b^{−α}, integrated exactly.
            terms.push(mass * (a.powf(-alpha) - b.powf(-alpha)));
        }
    }
    // For r > r_max the ball holds everything: α·∫_{r_max}^∞ = r_max^{−α}.
    terms.push(total * r_max.powf(-alpha));
    Ok(neumaier_sum(terms))
}

/// Critical integrability exponents for a measure of concentration
/// dimension γ on ℂⁿ ≅ ℝ^N:
///
/// * `p1_star` = (2n−γ)/(1−γ)₊ — L^p range of the potential's gradient,
/// * `alpha_star` = 1 − 2n·(1−γ)₊/(2n−γ) — Hölder-type exponent,
/// * `p2_star` = (2n−γ)/(2−γ)₊ — L^p range of the full Hessian,
/// * `q_star` = (2n−γ)/(n·(2−γ)₊) — L^q range of the determinant,
/// * `riesz_p_star` = (N−γ)/(α−γ)₊ — local L^p range of J_{μ,α}
///   (present when α is supplied),
///
/// with x₊ = max(x,0) and division by 0₊ giving +∞.
#[derive(Copy, Clone, Debug)]
pub struct ExponentReport {
    pub gamma: f64,
    pub n: usize,
    pub ambient: usize,
    pub p1_star: f64,
    pub alpha_star: f64,
    pub p2_star: f64,
    pub q_star: f64,
    pub alpha: Option<f64>,
    pub riesz_p_star: Option<f64>,
}

/// num/(den)₊, with division by a nonpositive denominator giving +∞.
fn div_pos(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        f64::INFINITY
    }
}

/// Evaluate the exponent formulas; see [`ExponentReport`]. `n` is the
/// complex dimension, `ambient` = N the real one (2n in the chart
/// setting), γ ∈ [0, min(N, 2n)], and α ∈ (0, N) when present.
pub fn critical_exponents(
    gamma: f64,
    n: usize,
    ambient: usize,
    alpha: Option<f64>,
) -> Result<ExponentReport> {
    if n == 0 || ambient == 0 {
        return Err(Error::InvalidParameter(
            "dimensions must be positive".into(),
        ));
    }
    let two_n = 2.0 * n as f64;
    let big_n = ambient as f64;
    if !(gamma.is_finite() && (0.0..=big_n).contains(&gamma)) {
        return Err(Error::InvalidParameter(format!(
            "gamma must lie in [0, {ambient}], got {gamma}"
        )));
    }
    if gamma > two_n {
        return Err(Error::InvalidParameter(format!(
            "gamma must not exceed 2n = {two_n}, got {gamma}"
        )));
    }
    if let Some(a) = alpha {
        check_alpha(a, ambient)?;
    }
    let p1_star = div_pos(two_n - gamma, 1.0 - gamma);
    // For γ ≥ 1 the (1−γ)₊ factor vanishes and the exponent saturates at 1
    // (also when 2n−γ = 0, where the quotient form would be 0/0).
    let alpha_star = if gamma >= 1.0 {
        1.0
    } else {
        1.0 - two_n * (1.0 - gamma) / (two_n - gamma)
    };
    let p2_star = div_pos(two_n - gamma, 2.0 - gamma);
    let q_star = div_pos(two_n - gamma, n as f64 * (2.0 - gamma));
    let riesz_p_star = alpha.map(|a| div_pos(big_n - gamma, a - gamma));
    Ok(ExponentReport {
        gamma,
        n,
        ambient,
        p1_star,
        alpha_star,
        p2_star,
        q_star,
        alpha,
        riesz_p_star,
    })
}

/// Growth ratio below which a refinement study is diagnosed "bounded".
pub const LP_BOUNDED_RATIO: f64 = 1.1;

/// One row of an L^p refinement probe at a given p and grid resolution.
#[derive(Copy, Clone, Debug)]
pub struct LpProbeRow {
    pub p: f64,
    pub resolution: usize,
    /// Grid L^p norm (∫|J|^p)^{1/p} over the fixed probe box.
    pub norm: f64,
    /// Growth factor of the p-th-power integral relative to the previous
    /// resolution; None on each p's first row.
    pub ratio: Option<f64>,
    /// Grid nodes excluded for hitting an atom exactly (value +∞).
    pub excluded: usize,
}

/// Result of [`lp_threshold_probe`]: rows ordered by p, then resolution.
#[derive(Clone, Debug)]
pub struct LpProbe {
    pub rows: Vec<LpProbeRow>,
    /// The probe box: center and per-axis half-width.
    pub box_center: Vec<f64>,
    pub box_half_width: f64,
}

impl LpProbe {
    /// "bounded" when every recorded ratio for this p stays below
    /// [`LP_BOUNDED_RATIO`], "growing" otherwise; None when p was not
    /// probed or produced fewer than two rows.
    pub fn diagnosis(&self, p: f64) -> Option<&'static str> {
        let ratios: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.p == p)
            .filter_map(|r| r.ratio)
            .collect();
        if ratios.is_empty() {
            return None;
        }
        if ratios.iter().all(|&r| r < LP_BOUNDED_RATIO) {
            Some("bounded")
        } else {
            Some("growing")
        }
    }
}

/// Probe local L^p membership of J_{μ,α} empirically: midpoint Riemann
/// sums of |J|^p over one fixed box containing the support, at each of the
/// strictly increasing grid resolutions. Bounded integrals give
/// refinement ratios near 1; divergent ones grow geometrically (the
/// decision rule [`LP_BOUNDED_RATIO`] is calibrated for resolution
/// doubling).
///
/// The box is the support's bounding cube inflated by half its width, with
/// a minimum half-width of 1.
pub fn lp_threshold_probe(
    mu: &Measure,
    alpha: f64,
    p_list: &[f64],
    resolutions: &[usize],
) -> Result<LpProbe> {
    let ambient = mu.ambient_dim();
    check_alpha(alpha, ambient)?;
    if p_list.is_empty() || resolutions.is_empty() {
        return Err(Error::InvalidParameter(
            "need at least one p and one resolution".into(),
        ));
    }
    for &p in p_list {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "p must be finite and >= 1, got {p}"
            )));
        }
    }
    for pair in resolutions.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::InvalidParameter(
                "resolutions must be strictly increasing".into(),
            ));
        }
    }
    if resolutions[0] < 2 {
        return Err(Error::InvalidParameter(
            "resolutions must be at least 2".into(),
        ));
    }
    // Fixed probe box around the support.
    let mut lo = vec![f64::INFINITY; ambient];
    let mut hi = vec![f64::NEG_INFINITY; ambient];
    for i in 0..mu.len() {
        for (j, &c) in mu.point_real(i).iter().enumerate() {
            lo[j] = lo[j].min(c);
            hi[j] = hi[j].max(c);
        }
    }
    let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let extent = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| 0.5 * (b - a))
        .fold(0.0f64, f64::max);
    let half_width = (1.5 * extent).max(1.0);
    let mut rows = Vec::with_capacity(p_list.len() * resolutions.len());
    for &p in p_list {
        let mut prev_mass: Option<f64> = None;
        for &res in resolutions {
            let spec = GridSpec::new(center.clone(), vec![half_width; ambient], res)?;
            let integral = grid_integrate(
                |x: &[f64]| {
                    let j = riesz_j_real(mu, x, alpha).expect("validated inputs");
                    j.powf(p)
                },
                &spec,
            )?;
            let mass = integral.value;
            let ratio = prev_mass.map(|m| mass / m);
            prev_mass = Some(mass);
            rows.push(LpProbeRow {
                p,
                resolution: res,
                norm: mass.powf(1.0 / p),
                ratio,
                excluded: integral.excluded,
            });
        }
    }
    Ok(LpProbe {
        rows,
        box_center: center,
        box_half_width: half_width,
    })
}
