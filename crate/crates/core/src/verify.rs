//! Self-verification suites: named numerical checks with measured values
//! printed against their tolerances.
//!
//! Each suite re-derives its expectations from independent routes —
//! closed forms, dual-route identities, finite differences, quadrature
//! versus Monte Carlo — rather than from the code under test. Reports are
//! deterministic for a given seed: stable check order, fixed float
//! formatting, no timestamps.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{wedge_norm_sq, CVec};
use crate::kernels::{extended_wedge_norm_sq, hessian_n_eps, kernel_k, kernel_n, RegEps};
use crate::measures::{
    dimension_estimate, make_atomic, sample_family, Family, FamilySpec, Measure,
};
use crate::potentials::{
    atom_mass_diagnostic, eval_g, eval_u, eval_v, fd_dz, fd_dzbar, lift_to_projective,
    mixed_ma_density, PotentialField,
};
use crate::quadrature::{alpha_n, mc_integrate_pn, sphere_mean_complex, BallQuad};
use crate::riesz::{cavalieri_j, critical_exponents, lp_threshold_probe, riesz_j};
use crate::ChartIndex;

/// A verification suite name.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Suite {
    Geometry,
    Kernels,
    Potentials,
    Riesz,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Geometry => "geometry",
            Suite::Kernels => "kernels",
            Suite::Potentials => "potentials",
            Suite::Riesz => "riesz",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geometry" => Ok(Suite::Geometry),
            "kernels" => Ok(Suite::Kernels),
            "potentials" => Ok(Suite::Potentials),
            "riesz" => Ok(Suite::Riesz),
            "all" => Ok(Suite::All),
            other => Err(Error::InvalidParameter(format!(
                "unknown suite '{other}' (expected geometry, kernels, potentials, riesz, or all)"
            ))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One named check: identifier, human line, measured detail, verdict.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub id: String,
    pub name: String,
    pub detail: String,
    pub pass: bool,
}

/// All checks of a run, with the seed that parameterized them.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Stable text table: one `PASS|FAIL <id> — <name>: <detail>` line per
    /// check plus a summary line. Byte-identical for identical seeds.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("suite: {}  seed: {}\n", self.suite, self.seed));
        for c in &self.checks {
            out.push_str(&format!(
                "{} {} — {}: {}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.id,
                c.name,
                c.detail
            ));
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        out.push_str(&format!(
            "result: {} ({passed}/{} checks)\n",
            if self.all_pass() { "PASS" } else { "FAIL" },
            self.checks.len()
        ));
        out
    }
}

/// Independent generator per check so adding checks never shifts another
/// check's random stream.
fn rng_for(seed: u64, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn random_cvec(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> CVec {
    CVec::new(
        (0..n)
            .map(|_| {
                Complex64::new(
                    rng.random_range(-radius..radius),
                    rng.random_range(-radius..radius),
                )
            })
            .collect(),
    )
    .expect("nonempty")
}

fn random_atomic(rng: &mut ChaCha8Rng, n: usize, atoms: usize, radius: f64) -> Measure {
    let pts: Vec<CVec> = (0..atoms).map(|_| random_cvec(rng, n, radius)).collect();
    let raw: Vec<f64> = (0..atoms).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    make_atomic(&pts, &weights).expect("distinct random atoms")
}

/// Run one suite (or all of them, in fixed order) with the given seed.
pub fn run_suite(suite: Suite, seed: u64) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    match suite {
        Suite::Geometry => geometry_checks(seed, &mut checks)?,
        Suite::Kernels => kernel_checks(seed, &mut checks)?,
        Suite::Potentials => potential_checks(seed, &mut checks)?,
        Suite::Riesz => riesz_checks(seed, &mut checks)?,
        Suite::All => {
            geometry_checks(seed, &mut checks)?;
            kernel_checks(seed, &mut checks)?;
            potential_checks(seed, &mut checks)?;
            riesz_checks(seed, &mut checks)?;
        }
    }
    Ok(SuiteReport {
        suite,
        seed,
        checks,
    })
}

// ---------------------------------------------------------------------------
// geometry
// ---------------------------------------------------------------------------

/// Lagrange identities in three forms, 10⁵ random pairs over dims 2–5:
/// |z|²|w|² = |⟨z,w⟩|² + |z∧w|², the same for the 1-padded vectors
/// (1+|z|²)(1+|w|²) = |1+⟨z,w⟩|² + |z−w|² + |z∧w|², and the extended
/// wedge split |（1,z)∧(1,w)|² = |z−w|² + |z∧w|² against the direct minor
/// sum.
fn geometry_checks(seed: u64, checks: &mut Vec<CheckResult>) -> Result<()> {
    let mut rng = rng_for(seed, 1);
    let mut max_rel = 0.0f64;
    let mut pairs = 0usize;
    for dim in 2..=5 {
        for _ in 0..25_000 {
            let z = random_cvec(&mut rng, dim, 3.0);
            let w = random_cvec(&mut rng, dim, 3.0);
            let dot = z.herm_dot(&w)?;
            let wedge = wedge_norm_sq(&z, &w)?;
            let lhs1 = z.norm_sq() * w.norm_sq();
            let rhs1 = dot.norm_sqr() + wedge;
            let rel1 = (lhs1 - rhs1).abs() / lhs1.max(rhs1).max(1.0);

            let dist = z.dist_sq(&w)?;
            let lhs2 = (1.0 + z.norm_sq()) * (1.0 + w.norm_sq());
            let rhs2 = (Complex64::new(1.0, 0.0) + dot).norm_sqr() + dist + wedge;
            let rel2 = (lhs2 - rhs2).abs() / lhs2.max(rhs2).max(1.0);

            let mut ze = vec![Complex64::new(1.0, 0.0)];
            ze.extend_from_slice(z.entries());
            let mut we = vec![Complex64::new(1.0, 0.0)];
            we.extend_from_slice(w.entries());
            let lhs3 = wedge_norm_sq(&CVec::new(ze)?, &CVec::new(we)?)?;
            let rhs3 = extended_wedge_norm_sq(&z, &w)?;
            let rel3 = (lhs3 - rhs3).abs() / lhs3.max(rhs3).max(1.0);

            max_rel = max_rel.max(rel1).max(rel2).max(rel3);
            pairs += 1;
        }
    }
    checks.push(CheckResult {
        id: "geo.lagrange".into(),
        name: "Lagrange identities, three forms, dims 2-5".into(),
        detail: format!("max relative deviation {max_rel:.3e} on {pairs} pairs (tol 1e-12)"),
        pass: max_rel <= 1e-12,
    });
    Ok(())
}

// ---------------------------------------------------------------------------
// kernels
// ---------------------------------------------------------------------------

fn kernel_checks(seed: u64, checks: &mut Vec<CheckResult>) -> Result<()> {
    // Sandwich and gap bounds on 10⁵ pairs in ℂ².
    let mut rng = rng_for(seed, 2);
    let mut violations = 0usize;
    let pairs = 100_000usize;
    for _ in 0..pairs {
        let z = random_cvec(&mut rng, 2, 3.0);
        let w = random_cvec(&mut rng, 2, 3.0);
        let k = kernel_k(&z, &w)?;
        let n0 = kernel_n(&z, &w, RegEps::zero())?;
        let n_small = kernel_n(&z, &w, RegEps::new(0.1)?)?;
        let n_large = kernel_n(&z, &w, RegEps::new(0.5)?)?;
        let upper = 0.5 * z.norm_sq().ln_1p();
        let mut ok = k <= n0 + 1e-12 && n0 <= upper + 1e-12;
        ok &= n0 <= n_small && n_small <= n_large;
        if k.is_finite() {
            let gap_bound = 0.5 * (1.0 + z.norm_sq().min(w.norm_sq())).ln();
            ok &= n0 - k >= -1e-12 && n0 - k <= gap_bound + 1e-12;
        }
        if !ok {
            violations += 1;
        }
    }
    checks.push(CheckResult {
        id: "ker.sandwich".into(),
        name: "kernel sandwich, monotonicity and gap bounds in C^2".into(),
        detail: format!("{violations} violations on {pairs} pairs (tol 1e-12)"),
        pass: violations == 0,
    });

    // Closed-form derivatives against central finite differences, 10³
    // random configurations over n = 1, 2, 3.
    let mut rng = rng_for(seed, 3);
    let mut max_scaled = 0.0f64;
    let configs = 1_000usize;
    for i in 0..configs {
        let n = 1 + i % 3;
        let atoms = rng.random_range(1..=4);
        let mu = random_atomic(&mut rng, n, atoms, 1.5);
        let eps = RegEps::new(rng.random_range(0.05..0.5))?;
        let field = PotentialField::new(mu, eps)?;
        let z = random_cvec(&mut rng, n, 2.0);
        let m = rng.random_range(0..n);
        let k = rng.random_range(0..n);
        let h = 1e-5;
        let grad = field.grad(&z)?;
        let fd_g = fd_dz(&|y: &CVec| field.value(y).expect("finite eps"), &z, m, h);
        max_scaled = max_scaled.max((grad[m] - fd_g).norm() / (1.0 + grad[m].norm()));
        let hess = field.hessian(&z)?;
        let fd_h = fd_dzbar(&|y: &CVec| field.grad(y).expect("finite eps")[m], &z, k, h);
        max_scaled = max_scaled.max((hess.get(m, k) - fd_h).norm() / (1.0 + hess.get(m, k).norm()));
    }
    checks.push(CheckResult {
        id: "ker.fd".into(),
        name: "gradient and Hessian closed forms vs finite differences".into(),
        detail: format!(
            "max scaled deviation {max_scaled:.3e} on {configs} configurations (tol 1e-6)"
        ),
        pass: max_scaled <= 1e-6,
    });

    // Unit total mass of (dd^c N_ε(·,w))ⁿ: integrate the density over
    // B(w, 20ε), which the eigenvalue sandwich of S confines to within a
    // fraction of a percent of the full-space value 1.
    for n in 1..=2usize {
        let mut rng = rng_for(seed, 4 + n as u64);
        let w = random_cvec(&mut rng, n, 0.8);
        let mu = make_atomic(std::slice::from_ref(&w), &[1.0])?;
        let mut masses = Vec::new();
        let mut ok = true;
        for eps in [0.5, 0.1] {
            let scan = atom_mass_diagnostic(&mu, &w, &[eps], |e| 20.0 * e)?;
            let mass = scan[0].mass;
            ok &= (mass - 1.0).abs() <= 0.02;
            masses.push(format!("eps {eps}: {mass:.6}"));
        }
        checks.push(CheckResult {
            id: format!("ker.mass.total.n{n}"),
            name: format!("unit Dirac Monge-Ampere mass, n = {n}"),
            detail: format!("{} (tol 2e-2 about 1)", masses.join(", ")),
            pass: ok,
        });
    }
    // n = 1 closed form: B(w, 10ε) carries exactly 100/101.
    {
        let mut rng = rng_for(seed, 7);
        let w = random_cvec(&mut rng, 1, 0.8);
        let mu = make_atomic(std::slice::from_ref(&w), &[1.0])?;
        let scans = atom_mass_diagnostic(&mu, &w, &[0.5, 0.1], |e| 10.0 * e)?;
        let target = 100.0 / 101.0;
        let max_dev = scans
            .iter()
            .map(|s| (s.mass - target).abs())
            .fold(0.0f64, f64::max);
        checks.push(CheckResult {
            id: "ker.mass.ball.n1".into(),
            name: "n = 1 ball mass closed form 100/101".into(),
            detail: format!(
                "masses {} vs {target:.9}, max deviation {max_dev:.3e} (tol 1e-3)",
                scans
                    .iter()
                    .map(|s| format!("{:.9}", s.mass))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            pass: max_dev <= 1e-3,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// potentials
// ---------------------------------------------------------------------------

/// The three n = 2 grid measures for the derivative-bound sweep: one atom,
/// two atoms, and a 500-point segment cloud.
fn bound_sweep_measures(seed: u64) -> Result<Vec<(&'static str, Measure)>> {
    let atom = make_atomic(
        &[CVec::new(vec![
            Complex64::new(0.2, 0.1),
            Complex64::new(-0.3, 0.05),
        ])?],
        &[1.0],
    )?;
    let pair = make_atomic(
        &[
            CVec::new(vec![Complex64::new(-0.8, 0.0), Complex64::new(0.0, 0.3)])?,
            CVec::new(vec![Complex64::new(0.8, 0.0), Complex64::new(0.0, -0.3)])?,
        ],
        &[0.5, 0.5],
    )?;
    let cloud = sample_family(&FamilySpec {
        family: Family::Segment,
        center: Some(vec![0.0; 4]),
        scale: Some(2.0),
        orientation: None,
        k: None,
        ratio: None,
        n: None,
        samples: 500,
        seed: seed ^ 0xBEEF,
    })?;
    Ok(vec![("atom", atom), ("pair", pair), ("cloud", cloud)])
}

fn potential_checks(seed: u64, checks: &mut Vec<CheckResult>) -> Result<()> {
    // Derivative bounds on a 101² slice grid of ℂ², z₂ fixed:
    // ‖∂V^ε‖ ≤ (√2/2)(1 + (1+|z|)·J₁) and every Hessian entry at most
    // 3·(1 + (1+|z|²)·J₂), with J_a(z) = Σ_j w_j·|z−p_j|^{−a}.
    let eps = RegEps::new(0.1)?;
    let fixed = Complex64::new(0.15, -0.1);
    for (label, mu) in bound_sweep_measures(seed)? {
        let field = PotentialField::new(mu.clone(), eps)?;
        let mut violations = 0usize;
        let mut worst = 0.0f64;
        for iy in 0..101 {
            for ix in 0..101 {
                let x = -2.0 + 4.0 * ix as f64 / 100.0;
                let y = -2.0 + 4.0 * iy as f64 / 100.0;
                let z = CVec::new(vec![Complex64::new(x, y), fixed])?;
                let (mut j1, mut j2) = (0.0f64, 0.0f64);
                for i in 0..mu.len() {
                    let d = z.dist_sq(&mu.point_cvec(i)?)?.sqrt();
                    j1 += mu.weights()[i] / d;
                    j2 += mu.weights()[i] / (d * d);
                }
                let s2 = std::f64::consts::SQRT_2 / 2.0;
                let grad_bound = s2 * (1.0 + (1.0 + z.norm()) * j1);
                let hess_bound = 3.0 * (1.0 + (1.0 + z.norm_sq()) * j2);
                let g = field.grad(&z)?.norm();
                let h = field.hessian(&z)?.max_abs_entry();
                let r = (g / grad_bound).max(h / hess_bound);
                worst = worst.max(r);
                if r > 1.0 + 1e-9 {
                    violations += 1;
                }
            }
        }
        checks.push(CheckResult {
            id: format!("pot.bounds.{label}"),
            name: format!("gradient/Hessian moment bounds on 101 x 101 grid ({label})"),
            detail: format!("{violations} violations, worst bound ratio {worst:.6}"),
            pass: violations == 0,
        });
    }

    // Multilinearity: top density of a 3-atom field equals the
    // mixed-discriminant expansion Σ_{j,k} w_j·w_k·cma·D(H_j, H_k).
    {
        let mut rng = rng_for(seed, 10);
        let pts: Vec<CVec> = (0..3).map(|_| random_cvec(&mut rng, 2, 1.0)).collect();
        let weights = [0.5, 0.3, 0.2];
        let mu = make_atomic(&pts, &weights)?;
        let mut max_rel = 0.0f64;
        for _ in 0..100 {
            let e = RegEps::new(rng.random_range(0.05..0.8))?;
            let z = random_cvec(&mut rng, 2, 2.0);
            let field = PotentialField::new(mu.clone(), e)?;
            let direct = field.ma_density(&z, 2)?.value;
            let hs: Vec<_> = pts
                .iter()
                .map(|p| hessian_n_eps(&z, p, e))
                .collect::<Result<_>>()?;
            let mut expansion = 0.0;
            for (j, hj) in hs.iter().enumerate() {
                for (k, hk) in hs.iter().enumerate() {
                    expansion +=
                        weights[j] * weights[k] * mixed_ma_density(&[hj.clone(), hk.clone()])?;
                }
            }
            let scale = direct.abs().max(expansion.abs()).max(f64::MIN_POSITIVE);
            max_rel = max_rel.max((direct - expansion).abs() / scale);
        }
        checks.push(CheckResult {
            id: "pot.multilinear".into(),
            name: "top density equals mixed-discriminant expansion (3 atoms)".into(),
            detail: format!("max relative deviation {max_rel:.3e} on 100 draws (tol 1e-10)"),
            pass: max_rel <= 1e-10,
        });
    }

    // Atom dichotomy, atomic side: ½δ_a + ½δ_b keeps at least (½)²·0.9 of
    // ball mass near a along the ε schedule.
    {
        let a = CVec::new(vec![Complex64::new(-0.5, 0.0), Complex64::new(0.0, 0.0)])?;
        let b = CVec::new(vec![Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0)])?;
        let mu = make_atomic(&[a.clone(), b], &[0.5, 0.5])?;
        let scans = atom_mass_diagnostic(&mu, &a, &[0.2, 0.1, 0.05], |e| 10.0 * e)?;
        let min_mass = scans.iter().map(|s| s.mass).fold(f64::INFINITY, f64::min);
        checks.push(CheckResult {
            id: "pot.dichotomy.atoms".into(),
            name: "two-atom ball mass stays above 0.25*0.9".into(),
            detail: format!(
                "masses {} (threshold 0.225)",
                scans
                    .iter()
                    .map(|s| format!("eps {}: {:.4}", s.eps, s.mass))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            pass: min_mass >= 0.225,
        });
    }

    // Atom dichotomy, diffuse side: for a 1000-point cloud the same
    // diagnostic at a cloud point decays below 0.05 along the documented
    // schedule ε ∈ {0.04, 0.02, 0.01} (ball radius 10ε).
    {
        let cloud = sample_family(&FamilySpec {
            family: Family::Ball,
            center: Some(vec![0.0; 4]),
            scale: Some(1.0),
            orientation: None,
            k: None,
            ratio: None,
            n: None,
            samples: 1_000,
            seed: seed ^ 0xC10D,
        })?;
        let a = cloud.point_cvec(0)?;
        let scans = atom_mass_diagnostic(&cloud, &a, &[0.04, 0.02, 0.01], |e| 10.0 * e)?;
        let max_mass = scans.iter().map(|s| s.mass).fold(0.0f64, f64::max);
        checks.push(CheckResult {
            id: "pot.dichotomy.cloud".into(),
            name: "1000-point cloud ball mass falls below 0.05".into(),
            detail: format!(
                "masses {} (threshold 0.05)",
                scans
                    .iter()
                    .map(|s| format!("eps {}: {:.5}", s.eps, s.mass))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            pass: max_mass < 0.05,
        });
    }

    // The spherical-mean constant: radial quadrature vs the closed
    // candidate 1/(2n), vs Monte Carlo, and the measure-independent mean
    // ∫𝔾_μ dV = −αₙ.
    {
        let mut details = Vec::new();
        let mut ok = true;
        for n in 1..=2usize {
            let quad = alpha_n(n)?;
            let candidate = 1.0 / (2.0 * n as f64);
            ok &= (quad - candidate).abs() <= 1e-6;
            details.push(format!(
                "n={n}: quadrature {quad:.9} vs 1/(2n) {candidate:.9}"
            ));
        }
        checks.push(CheckResult {
            id: "pot.alpha.quad".into(),
            name: "spherical log-sine constant matches 1/(2n)".into(),
            detail: format!("{} (tol 1e-6)", details.join("; ")),
            pass: ok,
        });

        let mut details = Vec::new();
        let mut ok = true;
        for n in 1..=2usize {
            let q_rep = CVec::new(
                (0..=n)
                    .map(|j| Complex64::new(if j == 0 { 1.0 } else { 0.0 }, 0.0))
                    .collect(),
            )?;
            let mu = make_atomic(std::slice::from_ref(&q_rep), &[1.0])?;
            let est = mc_integrate_pn(
                |p| eval_g(&mu, p).expect("dimensions fixed"),
                n,
                100_000,
                seed ^ 0xA1FA ^ n as u64,
            )?;
            let expect = -alpha_n(n)?;
            let dev = (est.mean - expect).abs();
            ok &= dev <= 2.0 * est.std_error;
            details.push(format!(
                "n={n}: MC {:.6} (SE {:.2e}) vs -alpha {expect:.6}",
                est.mean, est.std_error
            ));
        }
        checks.push(CheckResult {
            id: "pot.alpha.mc".into(),
            name: "Monte Carlo agrees with radial quadrature (2 SE)".into(),
            detail: details.join("; "),
            pass: ok,
        });

        // Three atomic measures: mean of 𝔾_μ over ℙⁿ is −αₙ regardless of μ.
        let mut rng = rng_for(seed, 11);
        let mut details = Vec::new();
        let mut ok = true;
        for (i, (n, atoms)) in [(1usize, 3usize), (2, 2), (2, 5)].iter().enumerate() {
            let mu = random_atomic(&mut rng, *n, *atoms, 1.0);
            let lifted = lift_to_projective(&mu, ChartIndex(0))?;
            let est = mc_integrate_pn(
                |p| eval_g(&lifted, p).expect("dimensions fixed"),
                *n,
                100_000,
                seed ^ 0x6E0B ^ i as u64,
            )?;
            let expect = -alpha_n(*n)?;
            let dev = (est.mean - expect).abs();
            ok &= dev <= 2.0 * est.std_error;
            details.push(format!(
                "n={n}/{atoms} atoms: MC {:.6} (SE {:.2e}) vs {expect:.6}",
                est.mean, est.std_error
            ));
        }
        checks.push(CheckResult {
            id: "pot.alpha.normalization".into(),
            name: "mean of G-potential over P^n is -alpha_n (2 SE)".into(),
            detail: details.join("; "),
            pass: ok,
        });
    }

    // Sphere-mean lower bound: for measures supported in the closed unit
    // ball of ℂ², the means of U_μ and V_μ over |z| = 1 are ≥ −log√5.
    {
        let mut rng = rng_for(seed, 12);
        let bound = -(5.0f64.sqrt()).ln();
        let quad = BallQuad::default();
        let mut ok = true;
        let mut worst = f64::INFINITY;
        for _ in 0..5 {
            let mu = random_atomic(&mut rng, 2, 8, 0.636); // coords ≤ 0.636 ⇒ |p| ≤ 0.9
            let mean_u =
                sphere_mean_complex(|z| eval_u(&mu, z).expect("dimensions fixed"), 2, &quad)?;
            let mean_v = sphere_mean_complex(
                |z| eval_v(&mu, z, RegEps::zero()).expect("dimensions fixed"),
                2,
                &quad,
            )?;
            worst = worst.min(mean_u).min(mean_v);
            ok &= mean_u >= bound - 1e-9 && mean_v >= bound - 1e-9;
        }
        checks.push(CheckResult {
            id: "pot.spheremean".into(),
            name: "unit-sphere means of U and V stay above -log sqrt(5)".into(),
            detail: format!("smallest mean {worst:.6} vs bound {bound:.6}, 5 measures"),
            pass: ok,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// riesz
// ---------------------------------------------------------------------------

fn riesz_checks(seed: u64, checks: &mut Vec<CheckResult>) -> Result<()> {
    // Cavalieri vs direct sum, 100 points per measure and exponent.
    {
        let mut rng = rng_for(seed, 20);
        let dirac = random_atomic(&mut rng, 2, 1, 0.8);
        let pair = random_atomic(&mut rng, 2, 2, 0.8);
        let cloud = sample_family(&FamilySpec {
            family: Family::Ball,
            center: Some(vec![0.0; 4]),
            scale: Some(1.0),
            orientation: None,
            k: None,
            ratio: None,
            n: None,
            samples: 300,
            seed: seed ^ 0xCAFA,
        })?;
        let mut max_rel = 0.0f64;
        let mut points = 0usize;
        for mu in [&dirac, &pair, &cloud] {
            for alpha in [1.0, 2.0] {
                for _ in 0..100 {
                    let x = random_cvec(&mut rng, 2, 2.5);
                    let direct = riesz_j(mu, &x, alpha)?;
                    if !direct.is_finite() {
                        continue;
                    }
                    let r_max = 2.0
                        * (0..mu.len())
                            .map(|i| Ok::<f64, Error>(x.dist_sq(&mu.point_cvec(i)?)?.sqrt()))
                            .try_fold(0.0f64, |a, r| r.map(|r| a.max(r)))?;
                    let layered = cavalieri_j(mu, &x, alpha, r_max, 2_048)?;
                    max_rel = max_rel.max((layered - direct).abs() / direct);
                    points += 1;
                }
            }
        }
        checks.push(CheckResult {
            id: "rz.cavalieri".into(),
            name: "layer-cake Riesz integral matches the direct sum".into(),
            detail: format!("max relative deviation {max_rel:.3e} on {points} points (tol 1e-2)"),
            pass: max_rel <= 1e-2,
        });
    }

    // Dimension estimator on the three reference measures.
    {
        let dirac = make_atomic(
            std::slice::from_ref(&CVec::new(vec![Complex64::new(0.3, 0.2)])?),
            &[1.0],
        )?;
        let est = dimension_estimate(&dirac, 0.01, 0.1, 6)?;
        checks.push(CheckResult {
            id: "rz.dimension.dirac".into(),
            name: "Dirac dimension estimate is exactly 0".into(),
            detail: format!("gamma {} flat {}", est.gamma, est.flat),
            pass: est.gamma == 0.0 && est.flat,
        });

        // Counts-aware windows: r_lo keeps the expected ball counts in the
        // hundreds so the max-statistic bias of the concentration profile
        // stays small relative to the fitted decade.
        let square = sample_family(&FamilySpec {
            family: Family::Kplane,
            center: Some(vec![0.5, 0.5]),
            scale: Some(1.0),
            orientation: None,
            k: Some(2),
            ratio: None,
            n: None,
            samples: 100_000,
            seed: seed ^ 0x50AF,
        })?;
        let est = dimension_estimate(&square, 0.03, 0.3, 10)?;
        checks.push(CheckResult {
            id: "rz.dimension.square".into(),
            name: "square cloud dimension estimate (100k points)".into(),
            detail: format!(
                "gamma {:.4} vs 2 (tol 0.15, residual {:.4})",
                est.gamma, est.residual
            ),
            pass: (est.gamma - 2.0).abs() <= 0.15,
        });

        let cantor = sample_family(&FamilySpec {
            family: Family::CantorLine,
            center: Some(vec![0.0, 0.0]),
            scale: Some(1.0),
            orientation: None,
            k: None,
            ratio: Some(1.0 / 3.0),
            n: None,
            samples: 100_000,
            seed: seed ^ 0xCA27,
        })?;
        let est = dimension_estimate(&cantor, 1e-4, 0.1, 12)?;
        let oracle = std::f64::consts::LN_2 / 3.0f64.ln();
        checks.push(CheckResult {
            id: "rz.dimension.cantor".into(),
            name: "middle-thirds Cantor dimension estimate (100k points)".into(),
            detail: format!(
                "gamma {:.4} vs log2/log3 = {oracle:.4} (tol 0.1, residual {:.4})",
                est.gamma, est.residual
            ),
            pass: (est.gamma - oracle).abs() <= 0.1,
        });
    }

    // Exponent calculator against the hand-evaluated table.
    {
        let fmt_e = |x: f64| {
            if x.is_infinite() {
                "inf".to_string()
            } else {
                format!("{x}")
            }
        };
        let r0 = critical_exponents(0.0, 2, 4, None)?;
        let r1 = critical_exponents(1.0, 2, 4, Some(2.0))?;
        let r2 = critical_exponents(2.0, 2, 4, None)?;
        let pass = r0.p1_star == 4.0
            && r0.alpha_star == 0.0
            && r0.p2_star == 2.0
            && r0.q_star == 1.0
            && r1.p1_star == f64::INFINITY
            && r1.alpha_star == 1.0
            && r1.p2_star == 3.0
            && r1.q_star == 1.5
            && r1.riesz_p_star == Some(3.0)
            && r2.p2_star == f64::INFINITY
            && r2.q_star == f64::INFINITY;
        checks.push(CheckResult {
            id: "rz.exponents".into(),
            name: "critical exponent table (n = 2)".into(),
            detail: format!(
                "gamma 0: ({}, {}, {}, {}); gamma 1: ({}, {}, {}, {}), riesz {}; gamma 2: p2 {}, q {}",
                fmt_e(r0.p1_star),
                fmt_e(r0.alpha_star),
                fmt_e(r0.p2_star),
                fmt_e(r0.q_star),
                fmt_e(r1.p1_star),
                fmt_e(r1.alpha_star),
                fmt_e(r1.p2_star),
                fmt_e(r1.q_star),
                fmt_e(r1.riesz_p_star.unwrap_or(f64::NAN)),
                fmt_e(r2.p2_star),
                fmt_e(r2.q_star),
            ),
            pass,
        });
    }

    // L^p refinement probe: δ₀ in ℝ², α = 1 — bounded at p = 1.5,
    // divergent at p = 3.
    {
        let mu = make_atomic(
            std::slice::from_ref(&CVec::new(vec![Complex64::new(0.0, 0.0)])?),
            &[1.0],
        )?;
        let probe = lp_threshold_probe(&mu, 1.0, &[1.5, 3.0], &[32, 64, 128, 256])?;
        let d_low = probe.diagnosis(1.5);
        let d_high = probe.diagnosis(3.0);
        let ratios = |p: f64| {
            probe
                .rows
                .iter()
                .filter(|r| r.p == p)
                .filter_map(|r| r.ratio.map(|q| format!("{q:.3}")))
                .collect::<Vec<_>>()
                .join(", ")
        };
        checks.push(CheckResult {
            id: "rz.lp".into(),
            name: "L^p refinement probe separates 1.5 from 3".into(),
            detail: format!(
                "p=1.5 ratios [{}] -> {:?}; p=3 ratios [{}] -> {:?}",
                ratios(1.5),
                d_low,
                ratios(3.0),
                d_high
            ),
            pass: d_low == Some("bounded") && d_high == Some("growing"),
        });
    }
    Ok(())
}
