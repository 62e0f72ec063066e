//! Points of ℂⁿ and ℙⁿ and the coordinate bookkeeping between them.
//!
//! A point of projective space is stored as a unit-norm homogeneous
//! representative in ℂ^{n+1}.  The central quantity is the wedge norm
//!
//! ```text
//! |a ∧ b|² = Σ_{i<j} |a_i b_j − a_j b_i|²,
//! ```
//!
//! which satisfies the Lagrange identity |a ∧ b|² = |a|²|b|² − |⟨a,b⟩|²
//! and induces the sine distance and the geodesic distance
//! dist(p, q) = √2·asin(sine) on ℙⁿ.  Affine charts 𝒰_k = {ζ_k ≠ 0}
//! carry the usual coordinates z_j = ζ_j/ζ_k (j ≠ k, increasing j), and
//! `homogenize_value` turns a function of logarithmic growth on chart
//! coordinates into its scale-invariant homogeneous version.

use num_complex::Complex64;
use std::ops::Index;

use crate::error::{Error, Result};

/// Two unit representatives describe the same projective point when the
/// squared wedge norm between them falls below this threshold.
pub const PROJECTIVE_EQ_TOL_SQ: f64 = 1e-20;

/// A point counts as lying outside chart 𝒰_k when the modulus of its k-th
/// homogeneous coordinate (on a unit representative) is below this.
pub const CHART_TOL: f64 = 1e-12;

/// Dense complex vector with at least one entry.
#[derive(Clone, Debug, PartialEq)]
pub struct CVec(Vec<Complex64>);

impl CVec {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyVector);
        }
        Ok(CVec(entries))
    }

    /// Builds a vector from interleaved real coordinates `[re₀, im₀, re₁, im₁, …]`.
    pub fn from_real_coords(coords: &[f64]) -> Result<Self> {
        if coords.is_empty() || coords.len() % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "real coordinate list must have positive even length, got {}",
                coords.len()
            )));
        }
        Ok(CVec(
            coords
                .chunks_exact(2)
                .map(|c| Complex64::new(c[0], c[1]))
                .collect(),
        ))
    }

    pub fn to_real_coords(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.0.len());
        for e in &self.0 {
            out.push(e.re);
            out.push(e.im);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.0
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|e| e.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Hermitian inner product ⟨a, b⟩ = Σ a_i·conj(b_i).
    pub fn herm_dot(&self, other: &Self) -> Result<Complex64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b.conj()).sum())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(CVec(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        CVec(self.0.iter().map(|e| e * c).collect())
    }

    pub fn dist_sq(&self, other: &Self) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum())
    }
}

impl Index<usize> for CVec {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(Error::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}

/// Squared wedge norm |a ∧ b|² = Σ_{i<j} |a_i b_j − a_j b_i|².
///
/// Vanishes exactly when a and b are complex-proportional; the direct
/// minor sum avoids the cancellation that the Lagrange form
/// |a|²|b|² − |⟨a,b⟩|² suffers for nearly parallel vectors.
pub fn wedge_norm_sq(a: &CVec, b: &CVec) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            acc += (a[i] * b[j] - a[j] * b[i]).norm_sqr();
        }
    }
    Ok(acc)
}

/// Point of ℙⁿ, held as a unit-norm representative in ℂ^{n+1}.
#[derive(Clone, Debug)]
pub struct ProjectivePoint {
    rep: CVec,
}

impl ProjectivePoint {
    /// Normalizes a homogeneous representative; the zero vector is rejected.
    pub fn new(homogeneous: CVec) -> Result<Self> {
        if homogeneous.dim() < 2 {
            return Err(Error::InvalidParameter(
                "projective point needs at least two homogeneous coordinates".into(),
            ));
        }
        let norm = homogeneous.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(ProjectivePoint {
            rep: homogeneous.scale(Complex64::new(1.0 / norm, 0.0)),
        })
    }

    /// Complex dimension n of the ambient ℙⁿ.
    pub fn n(&self) -> usize {
        self.rep.dim() - 1
    }

    /// Unit-norm homogeneous representative.
    pub fn representative(&self) -> &CVec {
        &self.rep
    }

    /// Projective equality: |p ∧ q|² below [`PROJECTIVE_EQ_TOL_SQ`] on unit
    /// representatives.
    pub fn same_point(&self, other: &Self) -> Result<bool> {
        Ok(wedge_norm_sq(&self.rep, &other.rep)? < PROJECTIVE_EQ_TOL_SQ)
    }
}

/// Sine distance and geodesic distance on ℙⁿ.
///
/// Returns `(sine, dist)` with sine = |p ∧ q| on unit representatives,
/// clamped into [0, 1], and dist = √2·asin(sine) ∈ [0, π/√2].
pub fn projective_sine_distance(p: &ProjectivePoint, q: &ProjectivePoint) -> Result<(f64, f64)> {
    let s_sq = wedge_norm_sq(p.representative(), q.representative())?;
    let sine = s_sq.sqrt().min(1.0);
    Ok((sine, std::f64::consts::SQRT_2 * sine.asin()))
}

/// Label k of the affine chart 𝒰_k = {ζ_k ≠ 0}, 0 ≤ k ≤ n.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct ChartIndex(pub usize);

/// Chart coordinates z ∈ ℂⁿ of a point of 𝒰_k, together with the chart label.
#[derive(Clone, Debug)]
pub struct AffinePoint {
    pub z: CVec,
    pub chart: ChartIndex,
}

/// Coordinates of p in chart 𝒰_k: z_j = ζ_j/ζ_k for j ≠ k, increasing j.
pub fn chart_transform(p: &ProjectivePoint, chart: ChartIndex) -> Result<AffinePoint> {
    let n = p.n();
    let k = chart.0;
    if k > n {
        return Err(Error::ChartIndex { index: k, dim: n });
    }
    let rep = p.representative();
    let pivot = rep[k];
    // Unit representative, so |ζ_k| is directly comparable with CHART_TOL.
    if pivot.norm() <= CHART_TOL {
        return Err(Error::ChartDomain {
            index: k,
            magnitude: pivot.norm(),
        });
    }
    let mut z = Vec::with_capacity(n);
    for j in 0..=n {
        if j != k {
            z.push(rep[j] / pivot);
        }
    }
    Ok(AffinePoint {
        z: CVec::new(z)?,
        chart,
    })
}

/// Homogeneous point with 1 inserted in slot k: [z₀‥z_{k−1}, 1, z_k‥] ↦ ℙⁿ.
pub fn from_chart(a: &AffinePoint) -> Result<ProjectivePoint> {
    let n = a.z.dim();
    let k = a.chart.0;
    if k > n {
        return Err(Error::ChartIndex { index: k, dim: n });
    }
    let mut hom = Vec::with_capacity(n + 1);
    for j in 0..n {
        if j == k {
            hom.push(Complex64::new(1.0, 0.0));
        }
        hom.push(a.z[j]);
    }
    if k == n {
        hom.push(Complex64::new(1.0, 0.0));
    }
    ProjectivePoint::new(CVec::new(hom)?)
}

/// Transition 𝒰_k → 𝒰_ℓ by composing `from_chart` with `chart_transform`.
pub fn chart_transition(a: &AffinePoint, to: ChartIndex) -> Result<AffinePoint> {
    chart_transform(&from_chart(a)?, to)
}

/// Homogeneous (scale-invariant) value of a chart function of logarithmic
/// growth: φ_u(p) = u(z) − ½·log(1 + |z|²) with z the 𝒰_k coordinates of p.
///
/// The value may be −∞ when u is; p outside 𝒰_k is an error.
pub fn homogenize_value<F: Fn(&CVec) -> f64>(
    u: F,
    p: &ProjectivePoint,
    chart: ChartIndex,
) -> Result<f64> {
    let a = chart_transform(p, chart)?;
    let val = u(&a.z);
    Ok(val - 0.5 * (1.0 + a.z.norm_sq()).ln())
}
