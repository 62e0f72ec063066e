//! Logarithmic potentials of probability measures on ℂⁿ and ℙⁿ.
//!
//! Three scalar potentials of a measure μ:
//!
//! * `eval_u` — the affine potential U_μ(z) = ∫ K(z,w) dμ(w),
//! * `eval_v` — the projectively normalized potential
//!   V_μ^ε(z) = ∫ N_ε(z,w) dμ(w),
//! * `eval_g` — the chart-free potential 𝔾_μ(p) = ∫ G(p,q) dμ(q) of a
//!   measure given in homogeneous coordinates.
//!
//! [`PotentialField`] bundles a measure with a regularization ε and an
//! optional smooth twist, and exposes first and second complex derivatives
//! plus Monge–Ampère densities. [`atom_mass_diagnostic`] integrates the top
//! Monge–Ampère density over small balls to detect atoms;
//! [`robin_estimate`] extrapolates the logarithmic asymptotics of V_μ along
//! a ray.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{from_chart, wedge_norm_sq, AffinePoint, CVec, ChartIndex, ProjectivePoint};
use crate::kernels::{
    accumulate_grad_n_eps, accumulate_hessian_n_eps, elementary_symmetric, kernel_g_homogeneous,
    kernel_k, kernel_n, mixed_discriminant, HermitianMatrix, RegEps,
};
use crate::measures::{make_atomic, Measure};
use crate::quadrature::{ball_mass, neumaier_sum, BallQuad};

/// ½·log(1 + |z|²), the chart expression of the Fubini–Study potential.
/// The logarithmic envelope of all potentials produced here: U_μ ≤ V_μ⁰ ≤
/// fs_log pointwise.
pub fn fs_log(z: &CVec) -> f64 {
    0.5 * z.norm_sq().ln_1p()
}

fn check_dim(n: usize, z: &CVec) -> Result<()> {
    if z.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: z.dim(),
        });
    }
    Ok(())
}

/// U_μ(z) = Σ_j w_j·K(z, p_j).
///
/// Returns −∞ when z coincides with an atom of positive weight; atoms of
/// weight exactly zero are skipped and cannot produce −∞.
pub fn eval_u(mu: &Measure, z: &CVec) -> Result<f64> {
    let n = mu.complex_dim()?;
    check_dim(n, z)?;
    let weights = mu.weights();
    let mut terms = Vec::with_capacity(mu.len());
    for (i, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let v = kernel_k(z, &mu.point_cvec(i)?)?;
        if v == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        terms.push(w * v);
    }
    Ok(neumaier_sum(terms))
}

/// V_μ^ε(z) = Σ_j w_j·N_ε(z, p_j).
///
/// With ε = 0 this is −∞ exactly at atoms of positive weight (the wedge
/// term vanishes only at z = w); with ε > 0 it is finite everywhere.
pub fn eval_v(mu: &Measure, z: &CVec, eps: RegEps) -> Result<f64> {
    let n = mu.complex_dim()?;
    check_dim(n, z)?;
    let weights = mu.weights();
    let mut terms = Vec::with_capacity(mu.len());
    for (i, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let v = kernel_n(z, &mu.point_cvec(i)?, eps)?;
        if v == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        terms.push(w * v);
    }
    Ok(neumaier_sum(terms))
}

/// 𝔾_μ(p) = Σ_j w_j·G(p, q_j) for a measure whose points are homogeneous
/// representatives in ℂ^{n+1}.
///
/// Scale-invariant in both arguments; −∞ exactly when p equals an atom of
/// positive weight (as a projective point).
pub fn eval_g(mu: &Measure, p: &ProjectivePoint) -> Result<f64> {
    let n = mu.complex_dim()?;
    let rep = p.representative();
    check_dim(n, rep)?;
    let weights = mu.weights();
    let mut terms = Vec::with_capacity(mu.len());
    for (i, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let v = kernel_g_homogeneous(&mu.point_cvec(i)?, rep)?;
        if v == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        terms.push(w * v);
    }
    Ok(neumaier_sum(terms))
}

/// Push a measure on ℂⁿ into homogeneous coordinates through chart k:
/// each point w becomes the unit representative of [w₀‥, 1, ‥w_{n−1}] with
/// the 1 in slot k. Weights are preserved; the result is an atomic measure
/// on ℂ^{n+1} suitable for [`eval_g`].
pub fn lift_to_projective(mu: &Measure, chart: ChartIndex) -> Result<Measure> {
    let _ = mu.complex_dim()?;
    let mut reps = Vec::with_capacity(mu.len());
    for i in 0..mu.len() {
        let affine = AffinePoint {
            z: mu.point_cvec(i)?,
            chart,
        };
        reps.push(from_chart(&affine)?.representative().clone());
    }
    make_atomic(&reps, mu.weights())
}

type ValueFn = dyn Fn(&CVec) -> f64 + Send + Sync;
type GradFn = dyn Fn(&CVec) -> CVec + Send + Sync;
type HessFn = dyn Fn(&CVec) -> HermitianMatrix + Send + Sync;

/// A smooth additive term φ with caller-supplied derivatives: the gradient
/// is (∂φ/∂z_m)_m and the Hessian (∂²φ/∂z_m∂z̄_k)_{mk}.
///
/// Consistency of the three closures is *checked numerically* when the
/// twist is attached to a [`PotentialField`]; see
/// [`PotentialField::with_twist`].
#[derive(Clone)]
pub struct Twist {
    value: Arc<ValueFn>,
    gradient: Arc<GradFn>,
    hessian: Arc<HessFn>,
}

impl fmt::Debug for Twist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Twist { .. }")
    }
}

impl Twist {
    pub fn new(
        value: impl Fn(&CVec) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&CVec) -> CVec + Send + Sync + 'static,
        hessian: impl Fn(&CVec) -> HermitianMatrix + Send + Sync + 'static,
    ) -> Self {
        Twist {
            value: Arc::new(value),
            gradient: Arc::new(gradient),
            hessian: Arc::new(hessian),
        }
    }

    /// c·½·log(1 + |z|²) with its exact derivatives:
    /// ∂φ/∂z_m = c·z̄_m/(2(1+|z|²)) and
    /// ∂²φ/∂z_m∂z̄_k = c·((1+|z|²)δ_mk − z_k·z̄_m)/(2(1+|z|²)²).
    ///
    /// With c = −1 this converts V_μ^ε into the relative potential
    /// V_μ^ε − fs_log whose ω-normalization matches 𝔾_μ on the chart.
    pub fn scaled_fubini_study(c: f64) -> Self {
        Twist::new(
            move |z: &CVec| c * fs_log(z),
            move |z: &CVec| {
                let s = 1.0 + z.norm_sq();
                CVec::new(
                    z.entries()
                        .iter()
                        .map(|zm| zm.conj() * (c / (2.0 * s)))
                        .collect(),
                )
                .expect("nonempty by construction")
            },
            move |z: &CVec| {
                let n = z.dim();
                let s = 1.0 + z.norm_sq();
                let f = c / (2.0 * s * s);
                let mut data = vec![Complex64::new(0.0, 0.0); n * n];
                for m in 0..n {
                    for k in 0..n {
                        let mut q = -z[k] * z[m].conj();
                        if m == k {
                            q += s;
                        }
                        data[m * n + k] = q * f;
                    }
                }
                HermitianMatrix::new(n, data).expect("square by construction")
            },
        )
    }

    pub fn value(&self, z: &CVec) -> f64 {
        (self.value)(z)
    }

    pub fn gradient(&self, z: &CVec) -> CVec {
        (self.gradient)(z)
    }

    pub fn hessian(&self, z: &CVec) -> HermitianMatrix {
        (self.hessian)(z)
    }
}

/// Step for the central differences that validate a twist at attach time.
const TWIST_FD_STEP: f64 = 1e-4;
/// Relative tolerance for the twist consistency check.
const TWIST_FD_TOL: f64 = 1e-5;
/// Probe points drawn per twist check.
const TWIST_PROBES: usize = 10;

fn shifted(z: &CVec, m: usize, delta: Complex64) -> CVec {
    let mut e = z.entries().to_vec();
    e[m] += delta;
    CVec::new(e).expect("nonempty by construction")
}

/// Central-difference ∂f/∂z_m = ½(∂_x − i·∂_y)f at z.
pub(crate) fn fd_dz<F: Fn(&CVec) -> f64>(f: &F, z: &CVec, m: usize, h: f64) -> Complex64 {
    let dx = (f(&shifted(z, m, Complex64::new(h, 0.0)))
        - f(&shifted(z, m, Complex64::new(-h, 0.0))))
        / (2.0 * h);
    let dy = (f(&shifted(z, m, Complex64::new(0.0, h)))
        - f(&shifted(z, m, Complex64::new(0.0, -h))))
        / (2.0 * h);
    0.5 * Complex64::new(dx, -dy)
}

/// Central-difference ∂g/∂z̄_k = ½(∂_x + i·∂_y)g for complex-valued g.
pub(crate) fn fd_dzbar<G: Fn(&CVec) -> Complex64>(g: &G, z: &CVec, k: usize, h: f64) -> Complex64 {
    let dx = (g(&shifted(z, k, Complex64::new(h, 0.0)))
        - g(&shifted(z, k, Complex64::new(-h, 0.0))))
        / (2.0 * h);
    let dy = (g(&shifted(z, k, Complex64::new(0.0, h)))
        - g(&shifted(z, k, Complex64::new(0.0, -h))))
        / (2.0 * h);
    0.5 * (dx + Complex64::new(0.0, 1.0) * dy)
}

/// Check the twist's closures against finite differences of each other on
/// a fixed set of pseudo-random probe points.
fn verify_twist(twist: &Twist, n: usize) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7769_7374);
    let h = TWIST_FD_STEP;
    for probe in 0..TWIST_PROBES {
        let z = CVec::new(
            (0..n)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect(),
        )?;
        let grad = twist.gradient(&z);
        if grad.dim() != n {
            return Err(Error::TwistInconsistent(format!(
                "gradient returned dimension {} for dimension-{n} input",
                grad.dim()
            )));
        }
        let hess = twist.hessian(&z);
        if hess.dim() != n {
            return Err(Error::TwistInconsistent(format!(
                "hessian returned dimension {} for dimension-{n} input",
                hess.dim()
            )));
        }
        for m in 0..n {
            let fd = fd_dz(&|y: &CVec| twist.value(y), &z, m, h);
            let an = grad[m];
            let err = (an - fd).norm();
            if !err.is_finite() || err > TWIST_FD_TOL * (1.0 + an.norm()) {
                return Err(Error::TwistInconsistent(format!(
                    "gradient entry {m} at probe {probe}: analytic {an}, finite-difference {fd}"
                )));
            }
            for k in 0..n {
                let fd = fd_dzbar(&|y: &CVec| twist.gradient(y)[m], &z, k, h);
                let an = hess.get(m, k);
                let err = (an - fd).norm();
                if !err.is_finite() || err > TWIST_FD_TOL * (1.0 + an.norm()) {
                    return Err(Error::TwistInconsistent(format!(
                        "hessian entry ({m},{k}) at probe {probe}: analytic {an}, \
                         finite-difference {fd}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// A measure together with a regularization ε, an optional twist, and the
/// chart its coordinates live in. Evaluates
/// u(z) = V_μ^ε(z) + φ(z) and its complex derivatives.
///
/// ε = 0 is accepted and evaluates the unregularized potential; every
/// derivative operation then fails with the ε-precondition error.
#[derive(Clone, Debug)]
pub struct PotentialField {
    measure: Measure,
    eps: RegEps,
    twist: Option<Twist>,
    chart: ChartIndex,
    n: usize,
}

impl PotentialField {
    pub fn new(measure: Measure, eps: RegEps) -> Result<Self> {
        let n = measure.complex_dim()?;
        Ok(PotentialField {
            measure,
            eps,
            twist: None,
            chart: ChartIndex(0),
            n,
        })
    }

    /// Attach a twist after validating its internal consistency by central
    /// differences (step 1e−4, relative tolerance 1e−5) on ten fixed
    /// pseudo-random probe points.
    pub fn with_twist(mut self, twist: Twist) -> Result<Self> {
        verify_twist(&twist, self.n)?;
        self.twist = Some(twist);
        Ok(self)
    }

    /// Record which chart the measure's coordinates refer to (metadata for
    /// projective interpretation; does not change any value).
    pub fn with_chart(mut self, chart: ChartIndex) -> Self {
        self.chart = chart;
        self
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    pub fn eps(&self) -> RegEps {
        self.eps
    }

    pub fn chart(&self) -> ChartIndex {
        self.chart
    }

    /// Complex dimension n of the underlying space.
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn value(&self, z: &CVec) -> Result<f64> {
        let v = eval_v(&self.measure, z, self.eps)?;
        Ok(match &self.twist {
            Some(t) => v + t.value(z),
            None => v,
        })
    }

    /// (∂u/∂z_m)_m. Errors when ε = 0.
    pub fn grad(&self, z: &CVec) -> Result<CVec> {
        check_dim(self.n, z)?;
        let pts = self.measure.complex_points()?;
        let weights = self.measure.weights();
        let mut acc = vec![Complex64::new(0.0, 0.0); self.n];
        for (i, w) in pts.chunks_exact(self.n).enumerate() {
            if weights[i] == 0.0 {
                continue;
            }
            accumulate_grad_n_eps(&mut acc, z.entries(), w, self.eps, weights[i])?;
        }
        if let Some(t) = &self.twist {
            let g = t.gradient(z);
            check_dim(self.n, &g)?;
            for m in 0..self.n {
                acc[m] += g[m];
            }
        }
        CVec::new(acc)
    }

    /// (∂²u/∂z_m∂z̄_k)_{mk}. Errors when ε = 0.
    pub fn hessian(&self, z: &CVec) -> Result<HermitianMatrix> {
        check_dim(self.n, z)?;
        let pts = self.measure.complex_points()?;
        let weights = self.measure.weights();
        let mut acc = vec![Complex64::new(0.0, 0.0); self.n * self.n];
        for (i, w) in pts.chunks_exact(self.n).enumerate() {
            if weights[i] == 0.0 {
                continue;
            }
            accumulate_hessian_n_eps(&mut acc, z.entries(), w, self.eps, weights[i])?;
        }
        let mut h = HermitianMatrix::new(self.n, acc)?;
        if let Some(t) = &self.twist {
            h.add_scaled(&t.hessian(z), 1.0)?;
        }
        Ok(h)
    }

    /// Density of the k-Hessian measure (dd^c u)^k ∧ β^{n−k} against
    /// Lebesgue measure, where β is the standard Kähler form of ℂⁿ.
    /// See [`ma_density_from_hessian`] for normalization and clamping.
    pub fn ma_density(&self, z: &CVec, k: usize) -> Result<MaDensity> {
        let h = self.hessian(z)?;
        ma_density_from_hessian(&h, k)
    }
}

/// Dimensional constant turning a complex-Hessian determinant into a
/// Monge–Ampère density: (dd^c u)ⁿ = cma·det(∂²u/∂z∂z̄)·dV with
/// d^c = (i/2π)(∂̄ − ∂), so cma = 2ⁿ·n!/πⁿ and every (dd^c N_ε)ⁿ has
/// total mass 1.
#[derive(Copy, Clone, Debug)]
pub struct MaNormalization {
    pub cma: f64,
}

impl MaNormalization {
    pub fn for_dim(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "Monge–Ampère normalization needs dimension >= 1".into(),
            ));
        }
        Ok(MaNormalization {
            cma: (1..=n).fold(1.0, |a, j| a * 2.0 * j as f64 / std::f64::consts::PI),
        })
    }
}

/// A pointwise Monge–Ampère density value. `clamped` records that the
/// Hessian had a materially negative eigenvalue that was clipped to zero
/// before forming the density (the evaluated function is not
/// plurisubharmonic there, typically because of a twist).
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct MaDensity {
    pub value: f64,
    pub clamped: bool,
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |a, j| a * (n - j) as f64 / (j + 1) as f64)
}

/// k-Hessian density from an already-computed complex Hessian:
/// cma·σ_k(λ)/C(n,k) with λ the eigenvalues clipped at zero; k = n gives
/// cma·det. Eigenvalues below −10⁻¹⁰·‖H‖ set the `clamped` flag.
pub fn ma_density_from_hessian(h: &HermitianMatrix, k: usize) -> Result<MaDensity> {
    let n = h.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "Hessian-measure order k must satisfy 1 <= k <= {n}, got {k}"
        )));
    }
    let cma = MaNormalization::for_dim(n)?.cma;
    if k == n {
        // Fast path: positive definite by Sylvester means no clamping and
        // the density is just the determinant.
        if h.positive_definite_by_minors() == Some(true) {
            return Ok(MaDensity {
                value: cma * h.det(),
                clamped: false,
            });
        }
    }
    let eigs = h.eigenvalues();
    let scale = eigs.iter().fold(0.0f64, |a, &e| a.max(e.abs()));
    let clamped = eigs.iter().any(|&e| e < -1e-10 * scale);
    let clipped: Vec<f64> = eigs.iter().map(|&e| e.max(0.0)).collect();
    Ok(MaDensity {
        value: cma * elementary_symmetric(&clipped, k) / binomial(n, k),
        clamped,
    })
}

/// Density of the mixed Monge–Ampère measure dd^c u₁ ∧ … ∧ dd^c uₙ from
/// the n complex Hessians: cma·D(H₁,…,Hₙ) with D the mixed discriminant
/// (so all-equal arguments reproduce [`ma_density_from_hessian`] at k = n).
pub fn mixed_ma_density(hessians: &[HermitianMatrix]) -> Result<f64> {
    let d = mixed_discriminant(hessians)?;
    Ok(MaNormalization::for_dim(hessians.len())?.cma * d)
}

/// Default ball radius for atom scans, as a multiple of ε.
pub const DEFAULT_BALL_RADIUS_FACTOR: f64 = 10.0;

/// One row of an atom scan: the mass of (dd^c V_μ^ε)ⁿ on B(a, radius).
#[derive(Copy, Clone, Debug)]
pub struct AtomScan {
    pub eps: f64,
    pub radius: f64,
    pub mass: f64,
}

/// Product quadrature sized for the concentrated integrands of atom scans
/// (density varies at scale ε inside a ball of radius ~10ε; the geometric
/// central refinement of the radial rule carries most of the accuracy).
fn atom_scan_quad(n: usize) -> BallQuad {
    match n {
        1 => BallQuad {
            radial_panels: 14,
            radial_gl: 8,
            sphere_s_points: 8,
            sphere_angle_points: 24,
        },
        _ => BallQuad {
            radial_panels: 10,
            radial_gl: 5,
            sphere_s_points: 5,
            sphere_angle_points: 10,
        },
    }
}

/// Scan for an atom of μ at `a`: for each ε in the strictly decreasing
/// `eps_list`, integrate the top Monge–Ampère density of V_μ^ε over the
/// ball B(a, r_of_eps(ε)) (pass `|e| DEFAULT_BALL_RADIUS_FACTOR * e` for
/// the standard schedule). Masses that stabilize near a positive limit as
/// ε shrinks indicate an atom of that weight at `a` (for n = 1 the mass is
/// linear in μ; for n ≥ 2 an atom of weight c contributes cⁿ); masses
/// that decay to zero indicate diffuse mass.
///
/// Supports n = 1 and n = 2 (the ball quadrature is radial-spherical in
/// ℝ² / ℝ⁴).
pub fn atom_mass_diagnostic<F: Fn(f64) -> f64>(
    mu: &Measure,
    a: &CVec,
    eps_list: &[f64],
    r_of_eps: F,
) -> Result<Vec<AtomScan>> {
    let n = mu.complex_dim()?;
    check_dim(n, a)?;
    if !(1..=2).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "atom scan supports complex dimension 1 or 2, got {n}"
        )));
    }
    if eps_list.is_empty() {
        return Err(Error::InvalidParameter("eps list is empty".into()));
    }
    for pair in eps_list.windows(2) {
        if !(pair[1] < pair[0]) {
            return Err(Error::InvalidParameter(format!(
                "eps list must be strictly decreasing, got {} before {}",
                pair[0], pair[1]
            )));
        }
    }
    let quad = atom_scan_quad(n);
    let center = a.to_real_coords();
    let mut out = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let reg = RegEps::new(eps)?;
        reg.require_positive()?;
        let radius = r_of_eps(eps);
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ball radius for eps = {eps} must be positive, got {radius}"
            )));
        }
        let field = PotentialField::new(mu.clone(), reg)?;
        // Dimensions and ε are validated above, so the density evaluation
        // cannot fail inside the quadrature; a NaN would be caught by the
        // quadrature's own finiteness check.
        let mass = ball_mass(
            |x: &[f64]| {
                let z = CVec::from_real_coords(x).expect("even length by construction");
                field.ma_density(&z, n).map(|d| d.value).unwrap_or(f64::NAN)
            },
            &center,
            radius,
            &quad,
        )?;
        out.push(AtomScan { eps, radius, mass });
    }
    Ok(out)
}

/// Result of a Robin-function estimation along a ray.
#[derive(Copy, Clone, Debug)]
pub struct RobinEstimate {
    pub value: f64,
    /// Set when the smallest λ is less than ten times the support radius
    /// of the measure, where the asymptotic expansion is unreliable.
    pub lambda_warning: bool,
}

/// Estimate the Robin function of V_μ at the unit direction ξ:
/// ρ(ξ) = lim_{λ→∞} V_μ(λξ) − log λ, by evaluating
/// f(λ) = V_μ(λξ) − log λ on the given strictly increasing radii and
/// extrapolating the polynomial in 1/λ through the samples to 1/λ = 0
/// (Neville's scheme, matching the f(λ) = ρ + a/λ + b/λ² + … expansion).
///
/// For atomic μ the limit equals
/// ½·Σ_j w_j·log((1 + |ξ∧p_j|²)/(1 + |p_j|²)) ≤ 0.
pub fn robin_estimate(mu: &Measure, xi: &CVec, lambdas: &[f64]) -> Result<RobinEstimate> {
    let n = mu.complex_dim()?;
    check_dim(n, xi)?;
    if (xi.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "direction must be a unit vector, got norm {}",
            xi.norm()
        )));
    }
    if lambdas.len() < 2 {
        return Err(Error::InvalidParameter(
            "Robin extrapolation needs at least two radii".into(),
        ));
    }
    for pair in lambdas.windows(2) {
        if !(pair[0] < pair[1]) {
            return Err(Error::InvalidParameter(format!(
                "radii must be strictly increasing, got {} before {}",
                pair[0], pair[1]
            )));
        }
    }
    if !(lambdas[0].is_finite() && lambdas[0] > 0.0) || !lambdas[lambdas.len() - 1].is_finite() {
        return Err(Error::InvalidParameter(
            "radii must be finite and positive".into(),
        ));
    }
    let support_radius = (0..mu.len())
        .map(|i| mu.point_cvec(i).map(|p| p.norm()))
        .try_fold(0.0f64, |a, r| r.map(|r| a.max(r)))?;
    let lambda_warning = lambdas[0] < 10.0 * support_radius;

    let mut xs = Vec::with_capacity(lambdas.len());
    let mut ys = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let z = xi.scale(Complex64::new(lambda, 0.0));
        let v = eval_v(mu, &z, RegEps::zero())?;
        if !v.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "potential is singular at radius {lambda}; choose different radii"
            )));
        }
        xs.push(1.0 / lambda);
        ys.push(v - lambda.ln());
    }
    // Neville tableau evaluated at 0.
    let m = ys.len();
    for j in 1..m {
        for i in 0..m - j {
            ys[i] = (xs[i + j] * ys[i] - xs[i] * ys[i + 1]) / (xs[i + j] - xs[i]);
        }
    }
    Ok(RobinEstimate {
        value: ys[0],
        lambda_warning,
    })
}

/// Closed-form Robin function of V_μ for an atomic measure (the λ→∞ limit
/// of V_μ(λξ) − log λ): ½·Σ_j w_j·log((1+|ξ∧p_j|²)/(1+|p_j|²)).
pub fn robin_closed_form(mu: &Measure, xi: &CVec) -> Result<f64> {
    let n = mu.complex_dim()?;
    check_dim(n, xi)?;
    let weights = mu.weights();
    let mut terms = Vec::with_capacity(mu.len());
    for (i, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let p = mu.point_cvec(i)?;
        let wedge = wedge_norm_sq(xi, &p)?;
        terms.push(w * 0.5 * (wedge.ln_1p() - p.norm_sq().ln_1p()));
    }
    Ok(neumaier_sum(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::geometry::projective_sine_distance;
    use crate::kernels::kernel_g;
    use crate::measures::{sample_family, Family, FamilySpec};
    use crate::quadrature::{alpha_n, mc_integrate_pn};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_cvec(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> CVec {
        CVec::new(
            (0..n)
                .map(|_| {
                    c(
                        rng.random_range(-radius..radius),
                        rng.random_range(-radius..radius),
                    )
                })
                .collect(),
        )
        .unwrap()
    }

    fn random_atomic(rng: &mut ChaCha8Rng, n: usize, atoms: usize, radius: f64) -> Measure {
        let pts: Vec<CVec> = (0..atoms).map(|_| random_cvec(rng, n, radius)).collect();
        let raw: Vec<f64> = (0..atoms).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        make_atomic(&pts, &weights).unwrap()
    }

    fn ball_cloud(n: usize, samples: usize, seed: u64) -> Measure {
        sample_family(&FamilySpec {
            family: Family::Ball,
            center: Some(vec![0.0; 2 * n]),
            scale: Some(1.0),
            orientation: None,
            k: None,
            ratio: None,
            n: None,
            samples,
            seed,
        })
        .unwrap()
    }

    #[test]
    fn dirac_potentials_match_kernels_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let n = rng.random_range(1..=3);
            let w = random_cvec(&mut rng, n, 2.0);
            let z = random_cvec(&mut rng, n, 2.0);
            let mu = make_atomic(std::slice::from_ref(&w), &[1.0]).unwrap();
            assert_eq!(eval_u(&mu, &z).unwrap(), kernel_k(&z, &w).unwrap());
            let eps = RegEps::new(0.3).unwrap();
            assert_eq!(
                eval_v(&mu, &z, eps).unwrap(),
                kernel_n(&z, &w, eps).unwrap()
            );
            let lifted = lift_to_projective(&mu, ChartIndex(0)).unwrap();
            let p = from_chart(&AffinePoint {
                z: z.clone(),
                chart: ChartIndex(0),
            })
            .unwrap();
            let q = from_chart(&AffinePoint {
                z: w.clone(),
                chart: ChartIndex(0),
            })
            .unwrap();
            let direct = kernel_g(&p, &q).unwrap();
            assert!((eval_g(&lifted, &p).unwrap() - direct).abs() <= 1e-12);
        }
    }

    #[test]
    fn potentials_respect_the_logarithmic_envelope() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for n in 1..=3usize {
            let mu = random_atomic(&mut rng, n, 40, 1.5);
            for _ in 0..50 {
                let z = random_cvec(&mut rng, n, 3.0);
                let u = eval_u(&mu, &z).unwrap();
                let v0 = eval_v(&mu, &z, RegEps::zero()).unwrap();
                let ell = fs_log(&z);
                assert!(u <= v0 + 1e-12, "U = {u} above V = {v0}");
                assert!(v0 <= ell + 1e-12, "V = {v0} above envelope {ell}");
            }
        }
    }

    #[test]
    fn minus_infinity_only_at_positively_weighted_atoms() {
        let a = CVec::new(vec![c(0.3, 0.1)]).unwrap();
        let b = CVec::new(vec![c(-0.5, 0.2)]).unwrap();
        let mu = make_atomic(&[a.clone(), b.clone()], &[0.0, 1.0]).unwrap();
        // Zero-weight atom: finite value there.
        assert!(eval_u(&mu, &a).unwrap().is_finite());
        assert!(eval_v(&mu, &a, RegEps::zero()).unwrap().is_finite());
        // Positive-weight atom: −∞ at ε = 0, finite for ε > 0.
        assert_eq!(eval_u(&mu, &b).unwrap(), f64::NEG_INFINITY);
        assert_eq!(eval_v(&mu, &b, RegEps::zero()).unwrap(), f64::NEG_INFINITY);
        assert!(eval_v(&mu, &b, RegEps::new(0.1).unwrap())
            .unwrap()
            .is_finite());
        let lifted = lift_to_projective(&mu, ChartIndex(0)).unwrap();
        let pb = from_chart(&AffinePoint {
            z: b,
            chart: ChartIndex(0),
        })
        .unwrap();
        assert_eq!(eval_g(&lifted, &pb).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn regularized_values_decrease_with_eps() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let mu = random_atomic(&mut rng, 2, 20, 1.0);
        for _ in 0..50 {
            let z = random_cvec(&mut rng, 2, 2.0);
            let v0 = eval_v(&mu, &z, RegEps::zero()).unwrap();
            let v1 = eval_v(&mu, &z, RegEps::new(0.1).unwrap()).unwrap();
            let v2 = eval_v(&mu, &z, RegEps::new(0.5).unwrap()).unwrap();
            assert!(v0 <= v1 && v1 <= v2);
        }
    }

    #[test]
    fn potentials_and_derivatives_are_linear_in_the_measure() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let n = 2;
        let pts_a: Vec<CVec> = (0..8).map(|_| random_cvec(&mut rng, n, 1.0)).collect();
        let pts_b: Vec<CVec> = (0..8).map(|_| random_cvec(&mut rng, n, 1.0)).collect();
        let w = vec![0.125; 8];
        let mu_a = make_atomic(&pts_a, &w).unwrap();
        let mu_b = make_atomic(&pts_b, &w).unwrap();
        let mut pts = pts_a;
        pts.extend(pts_b);
        let mix = make_atomic(&pts, &[0.0625; 16]).unwrap();
        let eps = RegEps::new(0.2).unwrap();
        let fa = PotentialField::new(mu_a.clone(), eps).unwrap();
        let fb = PotentialField::new(mu_b.clone(), eps).unwrap();
        let fm = PotentialField::new(mix.clone(), eps).unwrap();
        for _ in 0..25 {
            let z = random_cvec(&mut rng, n, 2.0);
            let u_mix = eval_u(&mix, &z).unwrap();
            let u_parts = 0.5 * eval_u(&mu_a, &z).unwrap() + 0.5 * eval_u(&mu_b, &z).unwrap();
            assert!((u_mix - u_parts).abs() <= 1e-12);
            let g_mix = fm.grad(&z).unwrap();
            let ga = fa.grad(&z).unwrap();
            let gb = fb.grad(&z).unwrap();
            for m in 0..n {
                assert!((g_mix[m] - 0.5 * (ga[m] + gb[m])).norm() <= 1e-12);
            }
            let h_mix = fm.hessian(&z).unwrap();
            let ha = fa.hessian(&z).unwrap();
            let hb = fb.hessian(&z).unwrap();
            for m in 0..n {
                for k in 0..n {
                    let want = 0.5 * (ha.get(m, k) + hb.get(m, k));
                    assert!((h_mix.get(m, k) - want).norm() <= 1e-12);
                }
            }
        }
    }

    /// 𝔾 through any chart equals V − fs_log in that chart's coordinates.
    #[test]
    fn chart_free_potential_localizes_in_every_chart() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let n = 2;
        let mu = random_atomic(&mut rng, n, 15, 1.2);
        for k in 0..=n {
            let chart = ChartIndex(k);
            let lifted = lift_to_projective(&mu, chart).unwrap();
            for _ in 0..30 {
                let z = random_cvec(&mut rng, n, 2.0);
                let p = from_chart(&AffinePoint {
                    z: z.clone(),
                    chart,
                })
                .unwrap();
                let g = eval_g(&lifted, &p).unwrap();
                let v = eval_v(&mu, &z, RegEps::zero()).unwrap();
                assert!(
                    (g - (v - fs_log(&z))).abs() <= 1e-12,
                    "chart {k}: {} vs {}",
                    g,
                    v - fs_log(&z)
                );
            }
        }
    }

    /// The mean of 𝔾_δq over ℙⁿ is −αₙ = −1/(2n): G(p,q) = log sin of the
    /// normalized distance, whose Fubini–Study average is the radial
    /// integral behind alpha_n.
    #[test]
    fn sphere_average_of_g_matches_alpha_n() {
        for n in 1..=2usize {
            let q_rep = CVec::new(
                (0..=n)
                    .map(|j| if j == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) })
                    .collect(),
            )
            .unwrap();
            let mu = make_atomic(std::slice::from_ref(&q_rep), &[1.0]).unwrap();
            let est = mc_integrate_pn(|p: &ProjectivePoint| eval_g(&mu, p).unwrap(), n, 40_000, 7)
                .unwrap();
            let expect = -alpha_n(n).unwrap();
            assert!(
                (est.mean - expect).abs() <= 3.0 * est.std_error,
                "n = {n}: mean {} vs −αₙ {expect} (SE {})",
                est.mean,
                est.std_error
            );
        }
    }

    /// Sanity for the test above: G really is log sin(d/√2).
    #[test]
    fn g_kernel_is_log_sine_of_normalized_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        for _ in 0..100 {
            let n = rng.random_range(1..=3);
            let p = ProjectivePoint::new(random_cvec(&mut rng, n + 1, 1.0)).unwrap();
            let q = ProjectivePoint::new(random_cvec(&mut rng, n + 1, 1.0)).unwrap();
            let (sine, _) = projective_sine_distance(&p, &q).unwrap();
            let g = kernel_g(&p, &q).unwrap();
            if sine > 1e-8 {
                assert!((g - sine.ln()).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let h = 1e-5;
        for n in 1..=3usize {
            let mu = random_atomic(&mut rng, n, 12, 1.0);
            let field = PotentialField::new(mu, RegEps::new(0.25).unwrap()).unwrap();
            for _ in 0..20 {
                let z = random_cvec(&mut rng, n, 1.5);
                let grad = field.grad(&z).unwrap();
                for m in 0..n {
                    let fd = fd_dz(&|y: &CVec| field.value(y).unwrap(), &z, m, h);
                    assert!(
                        (grad[m] - fd).norm() <= 1e-6,
                        "n = {n}, entry {m}: {} vs {fd}",
                        grad[m]
                    );
                }
            }
        }
    }

    #[test]
    fn hessian_matches_finite_differences_of_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(38);
        let h = 1e-5;
        for n in 1..=3usize {
            let mu = random_atomic(&mut rng, n, 12, 1.0);
            let field = PotentialField::new(mu, RegEps::new(0.25).unwrap()).unwrap();
            for _ in 0..10 {
                let z = random_cvec(&mut rng, n, 1.5);
                let hess = field.hessian(&z).unwrap();
                for m in 0..n {
                    for k in 0..n {
                        let fd = fd_dzbar(&|y: &CVec| field.grad(y).unwrap()[m], &z, k, h);
                        assert!(
                            (hess.get(m, k) - fd).norm() <= 1e-6,
                            "n = {n}, entry ({m},{k}): {} vs {fd}",
                            hess.get(m, k)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn derivatives_require_positive_eps() {
        let mut rng = ChaCha8Rng::seed_from_u64(39);
        let mu = random_atomic(&mut rng, 2, 5, 1.0);
        let field = PotentialField::new(mu, RegEps::zero()).unwrap();
        let z = random_cvec(&mut rng, 2, 1.0);
        assert!(field.value(&z).unwrap().is_finite());
        assert!(matches!(field.grad(&z), Err(Error::EpsRequired)));
        assert!(matches!(field.hessian(&z), Err(Error::EpsRequired)));
        assert!(matches!(field.ma_density(&z, 1), Err(Error::EpsRequired)));
    }

    #[test]
    fn twist_consistency_gate_accepts_honest_and_rejects_broken() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let mu = random_atomic(&mut rng, 2, 6, 1.0);
        let eps = RegEps::new(0.3).unwrap();
        let base = PotentialField::new(mu.clone(), eps).unwrap();
        let field = PotentialField::new(mu, eps)
            .unwrap()
            .with_twist(Twist::scaled_fubini_study(-1.0))
            .unwrap();
        // Twisted value/grad/hessian are base plus the exact twist terms.
        let twist = Twist::scaled_fubini_study(-1.0);
        for _ in 0..20 {
            let z = random_cvec(&mut rng, 2, 2.0);
            assert!(
                (field.value(&z).unwrap() - (base.value(&z).unwrap() + twist.value(&z))).abs()
                    <= 1e-12
            );
            let g = field.grad(&z).unwrap();
            let gb = base.grad(&z).unwrap();
            let gt = twist.gradient(&z);
            for m in 0..2 {
                assert!((g[m] - (gb[m] + gt[m])).norm() <= 1e-12);
            }
            let h = field.hessian(&z).unwrap();
            let mut hb = base.hessian(&z).unwrap();
            hb.add_scaled(&twist.hessian(&z), 1.0).unwrap();
            for m in 0..2 {
                for k in 0..2 {
                    assert!((h.get(m, k) - hb.get(m, k)).norm() <= 1e-12);
                }
            }
        }
        // A gradient off by 2× must be caught at attach time.
        let broken = Twist::new(
            |z: &CVec| fs_log(z),
            |z: &CVec| {
                let s = 1.0 + z.norm_sq();
                CVec::new(z.entries().iter().map(|zm| zm.conj() / s).collect()).unwrap()
            },
            |z: &CVec| Twist::scaled_fubini_study(1.0).hessian(z),
        );
        let mu2 = random_atomic(&mut rng, 2, 3, 1.0);
        match PotentialField::new(mu2, eps).unwrap().with_twist(broken) {
            Err(Error::TwistInconsistent(msg)) => {
                assert!(msg.contains("gradient"), "unexpected message: {msg}")
            }
            other => panic!("expected twist rejection, got {other:?}"),
        }
    }

    /// For n = 1 the regularized density is ε²/(π·(|z−w|² + ε²)²), which at
    /// the atom is 1/(πε²) for every w.
    #[test]
    fn one_dim_density_at_the_atom_is_inverse_pi_eps_squared() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..50 {
            let w = random_cvec(&mut rng, 1, 2.0);
            let mu = make_atomic(std::slice::from_ref(&w), &[1.0]).unwrap();
            let eps = rng.random_range(0.05..0.8);
            let field = PotentialField::new(mu, RegEps::new(eps).unwrap()).unwrap();
            let d = field.ma_density(&w, 1).unwrap();
            let expect = 1.0 / (std::f64::consts::PI * eps * eps);
            assert!(!d.clamped);
            assert!(
                (d.value - expect).abs() <= 1e-12 * expect,
                "eps {eps}: {} vs {expect}",
                d.value
            );
        }
    }

    #[test]
    fn density_normalization_and_mixed_forms_agree() {
        // cma for n = 1, 2, 3.
        assert!(
            (MaNormalization::for_dim(1).unwrap().cma - 2.0 / std::f64::consts::PI).abs() < 1e-15
        );
        assert!(
            (MaNormalization::for_dim(2).unwrap().cma - 8.0 / std::f64::consts::PI.powi(2)).abs()
                < 1e-15
        );
        assert!(
            (MaNormalization::for_dim(3).unwrap().cma - 48.0 / std::f64::consts::PI.powi(3)).abs()
                < 1e-14
        );
        // Mixed density of diag(1,0), diag(0,1) is cma·½.
        let d10 = HermitianMatrix::from_diag(&[1.0, 0.0]).unwrap();
        let d01 = HermitianMatrix::from_diag(&[0.0, 1.0]).unwrap();
        let got = mixed_ma_density(&[d10, d01]).unwrap();
        let cma2 = MaNormalization::for_dim(2).unwrap().cma;
        assert!((got - 0.5 * cma2).abs() <= 1e-14);
        // All-equal mixed arguments reproduce the top density.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mu = random_atomic(&mut rng, 2, 5, 1.0);
        let field = PotentialField::new(mu, RegEps::new(0.2).unwrap()).unwrap();
        let z = random_cvec(&mut rng, 2, 1.0);
        let h = field.hessian(&z).unwrap();
        let top = field.ma_density(&z, 2).unwrap().value;
        let mixed = mixed_ma_density(&[h.clone(), h]).unwrap();
        assert!((top - mixed).abs() <= 1e-12 * top.abs().max(1.0));
    }

    /// k-Hessian densities interpolate: k = 1 is cma·trace/n, and all are
    /// nonnegative.
    #[test]
    fn lower_hessian_orders_match_symmetric_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let mu = random_atomic(&mut rng, 3, 4, 1.0);
        let field = PotentialField::new(mu, RegEps::new(0.3).unwrap()).unwrap();
        let cma3 = MaNormalization::for_dim(3).unwrap().cma;
        for _ in 0..20 {
            let z = random_cvec(&mut rng, 3, 1.5);
            let h = field.hessian(&z).unwrap();
            let d1 = field.ma_density(&z, 1).unwrap();
            assert!((d1.value - cma3 * h.trace() / 3.0).abs() <= 1e-12 * h.trace().max(1.0));
            for k in 1..=3 {
                let d = field.ma_density(&z, k).unwrap();
                assert!(d.value >= 0.0);
                assert!(!d.clamped, "kernel Hessians are PSD");
            }
        }
        assert!(matches!(
            field.ma_density(&random_cvec(&mut rng, 3, 1.0), 4),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            field.ma_density(&random_cvec(&mut rng, 3, 1.0), 0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn negative_twist_curvature_sets_the_clamp_flag() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let mu = random_atomic(&mut rng, 2, 4, 0.5);
        let field = PotentialField::new(mu, RegEps::new(0.5).unwrap())
            .unwrap()
            .with_twist(Twist::scaled_fubini_study(-50.0))
            .unwrap();
        // Far from the atoms the kernel Hessian is tiny, so the strongly
        // concave twist dominates and every eigenvalue is negative.
        let z = CVec::new(vec![c(4.0, 0.0), c(0.0, 4.0)]).unwrap();
        let d = field.ma_density(&z, 2).unwrap();
        assert!(d.clamped);
        assert_eq!(d.value, 0.0);
        let d1 = field.ma_density(&z, 1).unwrap();
        assert!(d1.clamped);
        assert_eq!(d1.value, 0.0);
    }

    /// n = 1 total-mass identity: the ball B(w, 10ε) carries exactly
    /// 100/101 of the unit mass of (dd^c N_ε), for every atom position.
    #[test]
    fn one_dim_atom_ball_carries_hundred_over_hundred_one() {
        let w = CVec::new(vec![c(0.3, 0.7)]).unwrap();
        let mu = make_atomic(std::slice::from_ref(&w), &[1.0]).unwrap();
        let scans =
            atom_mass_diagnostic(&mu, &w, &[0.5, 0.1], |e| DEFAULT_BALL_RADIUS_FACTOR * e).unwrap();
        for scan in scans {
            assert!(
                (scan.mass - 100.0 / 101.0).abs() <= 1e-3,
                "eps {}: mass {}",
                scan.eps,
                scan.mass
            );
        }
    }

    /// n = 2 total-mass sandwich at an off-center atom: writing
    /// S = δ*Mδ with M = (1+|w|²)I − ww*, whose eigenvalues are 1 (along w)
    /// and 1+|w|², the ball mass of (dd^c N_ε)² over B(w,R) is between the
    /// two isotropic comparison masses (R²/(R²+ε²))² and
    /// (R²λ/(R²λ+ε²))² with λ = 1+|w|².
    #[test]
    fn two_dim_ball_mass_obeys_the_sandwich() {
        let w = CVec::new(vec![c(0.5, 0.0), c(0.0, 0.2)]).unwrap();
        let mu = make_atomic(std::slice::from_ref(&w), &[1.0]).unwrap();
        let eps = 0.1;
        let r = 20.0 * eps;
        let scans = atom_mass_diagnostic(&mu, &w, &[eps], |_| r).unwrap();
        let mass = scans[0].mass;
        let lam = 1.0 + w.norm_sq();
        let lo = (r * r / (r * r + eps * eps)).powi(2);
        let hi = (r * r * lam / (r * r * lam + eps * eps)).powi(2);
        let slack = 5e-4;
        assert!(
            mass >= lo - slack && mass <= hi + slack,
            "mass {mass} outside [{lo}, {hi}]"
        );
        assert!(mass > 0.98);
    }

    /// n = 1 is linear in the measure, so a two-atom scan at one atom sees
    /// that atom's weight (plus the other atom's small leakage).
    #[test]
    fn two_atom_scan_recovers_the_local_weight() {
        let a = CVec::new(vec![c(-1.0, 0.0)]).unwrap();
        let b = CVec::new(vec![c(1.0, 0.0)]).unwrap();
        let mu = make_atomic(&[a.clone(), b], &[0.5, 0.5]).unwrap();
        let scans = atom_mass_diagnostic(&mu, &a, &[0.05], |e| 10.0 * e).unwrap();
        // 0.5·(100/101) from the atom at a, plus ≤ 0.5·(r/(d−r))²-ish from b.
        assert!(
            (scans[0].mass - 0.5).abs() <= 0.02,
            "mass {}",
            scans[0].mass
        );
    }

    #[test]
    fn atom_scan_validates_inputs() {
        let w = CVec::new(vec![c(0.0, 0.0)]).unwrap();
        let mu = make_atomic(std::slice::from_ref(&w), &[1.0]).unwrap();
        assert!(matches!(
            atom_mass_diagnostic(&mu, &w, &[0.1, 0.2], |e| 10.0 * e),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            atom_mass_diagnostic(&mu, &w, &[], |e| 10.0 * e),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            atom_mass_diagnostic(&mu, &w, &[0.1, 0.0], |e| 10.0 * e),
            Err(Error::EpsRequired) | Err(Error::InvalidParameter(_))
        ));
        let w3 = CVec::new(vec![c(0.0, 0.0); 3]).unwrap();
        let mu3 = make_atomic(std::slice::from_ref(&w3), &[1.0]).unwrap();
        assert!(matches!(
            atom_mass_diagnostic(&mu3, &w3, &[0.1], |e| 10.0 * e),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn robin_of_dirac_at_origin_is_zero() {
        let n = 2;
        let mu = make_atomic(
            std::slice::from_ref(&CVec::new(vec![c(0.0, 0.0); n]).unwrap()),
            &[1.0],
        )
        .unwrap();
        let xi = CVec::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let est = robin_estimate(&mu, &xi, &[10.0, 20.0, 40.0, 80.0]).unwrap();
        assert!(est.value.abs() <= 1e-13, "rho = {}", est.value);
        assert!(!est.lambda_warning);
    }

    #[test]
    fn robin_extrapolation_matches_the_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        for n in 1..=3usize {
            let mu = random_atomic(&mut rng, n, 5, 1.0);
            let raw = random_cvec(&mut rng, n, 1.0);
            let xi = raw.scale(Complex64::new(1.0 / raw.norm(), 0.0));
            let est = robin_estimate(&mu, &xi, &[50.0, 100.0, 200.0, 400.0]).unwrap();
            let oracle = robin_closed_form(&mu, &xi).unwrap();
            assert!(
                (est.value - oracle).abs() <= 1e-6,
                "n = {n}: {} vs {oracle}",
                est.value
            );
            // The Robin function of V is never positive.
            assert!(est.value <= 1e-9);
            assert!(!est.lambda_warning);
        }
    }

    #[test]
    fn robin_warns_when_radii_start_inside_the_support_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        let mu = random_atomic(&mut rng, 2, 5, 1.0);
        let xi = CVec::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let est = robin_estimate(&mu, &xi, &[2.0, 4.0, 8.0, 16.0]).unwrap();
        assert!(est.lambda_warning);
        assert!(matches!(
            robin_estimate(&mu, &xi, &[50.0]),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            robin_estimate(&mu, &xi, &[100.0, 50.0]),
            Err(Error::InvalidParameter(_))
        ));
        let not_unit = CVec::new(vec![c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(
            robin_estimate(&mu, &not_unit, &[50.0, 100.0]),
            Err(Error::InvalidParameter(_))
        ));
    }

    /// Spot-check the a-priori derivative bounds that the verification
    /// suite later sweeps on a grid: with J_α(z) = Σ_j w_j·d(z,p_j)^{−α},
    /// ‖∂V^ε‖ ≤ √2/2·(1 + (1+|z|)·J₁(z)) and every Hessian entry is at
    /// most 3·(1 + (1+|z|²)·J₂(z)).
    #[test]
    fn gradient_and_hessian_bounds_hold_on_random_clouds() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for n in 1..=2usize {
            let mu = ball_cloud(n, 300, 11 + n as u64);
            let field = PotentialField::new(mu.clone(), RegEps::new(0.1).unwrap()).unwrap();
            for _ in 0..40 {
                let z = random_cvec(&mut rng, n, 2.0);
                let (mut j1, mut j2) = (0.0, 0.0);
                for i in 0..mu.len() {
                    let d = z.dist_sq(&mu.point_cvec(i).unwrap()).unwrap().sqrt();
                    j1 += mu.weights()[i] / d;
                    j2 += mu.weights()[i] / (d * d);
                }
                let s2 = std::f64::consts::SQRT_2 / 2.0;
                let grad_bound = s2 + s2 * (1.0 + z.norm()) * j1;
                assert!(field.grad(&z).unwrap().norm() <= grad_bound * (1.0 + 1e-12));
                let hess_bound = 3.0 + 3.0 * (1.0 + z.norm_sq()) * j2;
                assert!(field.hessian(&z).unwrap().max_abs_entry() <= hess_bound * (1.0 + 1e-12));
            }
        }
    }
}
