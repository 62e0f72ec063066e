//! Pair kernels on ℂⁿ×ℂⁿ and ℙⁿ×ℙⁿ, with closed-form first and second
//! complex derivatives of the regularized kernel.
//!
//! For z, w ∈ ℂⁿ put S(z,w) = |z−w|² + |z∧w|².  The kernels are
//!
//! ```text
//! K(z,w)   = ½·log( |z−w|² / (1+|w|²) )
//! N_ε(z,w) = ½·log( (S(z,w) + ε²) / (1+|w|²) )
//! G(p,q)   = ½·log( |ζ∧η|² / (|ζ|²|η|²) )        p = [ζ], q = [η] ∈ ℙⁿ
//! ```
//!
//! With D = S + ε² and ⟨w,z⟩ = Σ_j w_j·z̄_j the derivatives of N_ε are
//!
//! ```text
//! ∂S/∂z_m        = P_m = (z̄_m − w̄_m) + z̄_m·|w|² − w̄_m·⟨w,z⟩
//! ∂N_ε/∂z_m      = P_m / (2D)
//! ∂²N_ε/∂z_m∂z̄_k = (Q_{mk}·D − P_m·P̄_k) / (2D²)
//! Q_{mk}         = (1+|w|²)·δ_{mk} − w_k·w̄_m
//! ```
//!
//! P_m here is the closed form of the term-by-term minor sum
//! z̄_m − w̄_m + Σ_{j≠m} w_j·conj(z_m w_j − z_j w_m); the tests pin the two
//! against each other and against central finite differences.  Every entry
//! obeys |H_{mk}| ≤ [`HESSIAN_ENTRY_CONST`]·(1+|w|²)/D.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{wedge_norm_sq, CVec, ProjectivePoint};

/// Entrywise Hessian bound constant: |∂²N_ε/∂z_m∂z̄_k| ≤ 1.5·(1+|w|²)/D.
///
/// From |Q_{mk}| ≤ 1+|w|² and |P|² ≤ (1+2|w|²)·S ≤ 2(1+|w|²)·D, the quotient
/// rule gives (1+|w|²)/(2D) + 2(1+|w|²)/(2D) = (3/2)(1+|w|²)/D.
pub const HESSIAN_ENTRY_CONST: f64 = 1.5;

/// Regularization parameter ε ≥ 0 of the smooth kernel family N_ε.
///
/// ε = 0 is a legitimate value for kernel and potential evaluation and is
/// rejected by every derivative operation.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct RegEps(f64);

impl RegEps {
    pub fn new(eps: f64) -> Result<Self> {
        if !eps.is_finite() || eps < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "eps must be finite and >= 0, got {eps}"
            )));
        }
        Ok(RegEps(eps))
    }

    /// ε = 0, the unregularized kernel.
    pub fn zero() -> Self {
        RegEps(0.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The ε value, or the derivative-precondition error when ε = 0.
    pub fn require_positive(self) -> Result<f64> {
        if self.0 > 0.0 {
            Ok(self.0)
        } else {
            Err(Error::EpsRequired)
        }
    }
}

/// S(z,w) = |z−w|² + |z∧w|², the squared extended wedge norm.
///
/// Equals |(1,z) ∧ (1,w)|²: the minors against the 0-th slot contribute
/// |z−w|², the remaining ones |z∧w|².
pub fn extended_wedge_norm_sq(z: &CVec, w: &CVec) -> Result<f64> {
    Ok(z.dist_sq(w)? + wedge_norm_sq(z, w)?)
}

/// K(z,w) = ½·log(|z−w|²/(1+|w|²)); −∞ exactly on the diagonal.
pub fn kernel_k(z: &CVec, w: &CVec) -> Result<f64> {
    let d = z.dist_sq(w)?;
    Ok(0.5 * (d / (1.0 + w.norm_sq())).ln())
}

/// N_ε(z,w) = ½·log((|z−w|² + |z∧w|² + ε²)/(1+|w|²)); −∞ iff z = w and ε = 0.
pub fn kernel_n(z: &CVec, w: &CVec, eps: RegEps) -> Result<f64> {
    let s = extended_wedge_norm_sq(z, w)?;
    let e = eps.value();
    Ok(0.5 * ((s + e * e) / (1.0 + w.norm_sq())).ln())
}

/// G(p,q) = ½·log(|ζ∧η|²/(|ζ|²|η|²)) = log sine-distance; ≤ 0, −∞ iff p = q.
pub fn kernel_g(p: &ProjectivePoint, q: &ProjectivePoint) -> Result<f64> {
    kernel_g_homogeneous(p.representative(), q.representative())
}

/// G on arbitrary (not necessarily unit) homogeneous representatives.
///
/// Scale-invariant in both arguments; clamped to ≤ 0 against roundoff in
/// the norm quotient.
pub fn kernel_g_homogeneous(zeta: &CVec, eta: &CVec) -> Result<f64> {
    let wedge = wedge_norm_sq(zeta, eta)?;
    let val = 0.5 * (wedge / (zeta.norm_sq() * eta.norm_sq())).ln();
    Ok(val.min(0.0))
}

/// Dimension cap for the stack-allocated derivative buffers.
const MAX_DERIV_DIM: usize = 8;

/// Fills p[0..n] with the gradient numerator P and returns (D, |w|²).
///
/// Uses the Lagrange form |z∧w|² = |z|²|w|² − |⟨z,w⟩|² rather than the
/// minor sum: the cancellation it can suffer near parallel vectors is
/// bounded by roundoff in |z|²|w|², which the ε² > 0 floor in D keeps
/// harmless — and it makes the whole computation O(n).
#[inline]
fn deriv_core(z: &[Complex64], w: &[Complex64], e: f64, p: &mut [Complex64]) -> (f64, f64) {
    let n = z.len();
    let mut dist_sq = 0.0f64;
    let mut z_norm_sq = 0.0f64;
    let mut w_norm_sq = 0.0f64;
    let mut wz = Complex64::new(0.0, 0.0); // ⟨w,z⟩ = Σ_j w_j·z̄_j
    for j in 0..n {
        dist_sq += (z[j] - w[j]).norm_sqr();
        z_norm_sq += z[j].norm_sqr();
        w_norm_sq += w[j].norm_sqr();
        wz += w[j] * z[j].conj();
    }
    let wedge = (z_norm_sq * w_norm_sq - wz.norm_sqr()).max(0.0);
    let d = dist_sq + wedge + e * e;
    for m in 0..n {
        p[m] = (z[m] - w[m]).conj() + z[m].conj() * w_norm_sq - w[m].conj() * wz;
    }
    (d, w_norm_sq)
}

#[inline]
fn check_deriv_dims(
    acc_len: usize,
    z: &[Complex64],
    w: &[Complex64],
    entries: usize,
) -> Result<usize> {
    let n = z.len();
    if n == 0 {
        return Err(Error::EmptyVector);
    }
    if n > MAX_DERIV_DIM {
        return Err(Error::InvalidParameter(format!(
            "kernel derivatives support dimension <= {MAX_DERIV_DIM}, got {n}"
        )));
    }
    if w.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: w.len(),
        });
    }
    if acc_len != entries {
        return Err(Error::DimensionMismatch {
            expected: entries,
            got: acc_len,
        });
    }
    Ok(n)
}

/// acc[m] += scale·∂N_ε/∂z_m for all m; allocation-free.
pub fn accumulate_grad_n_eps(
    acc: &mut [Complex64],
    z: &[Complex64],
    w: &[Complex64],
    eps: RegEps,
    scale: f64,
) -> Result<()> {
    let e = eps.require_positive()?;
    let n = check_deriv_dims(acc.len(), z, w, z.len())?;
    let mut p = [Complex64::new(0.0, 0.0); MAX_DERIV_DIM];
    let (d, _) = deriv_core(z, w, e, &mut p[..n]);
    let c = scale / (2.0 * d);
    for m in 0..n {
        acc[m] += p[m] * c;
    }
    Ok(())
}

/// acc[m·n + k] += scale·∂²N_ε/∂z_m∂z̄_k for all m, k; allocation-free.
pub fn accumulate_hessian_n_eps(
    acc: &mut [Complex64],
    z: &[Complex64],
    w: &[Complex64],
    eps: RegEps,
    scale: f64,
) -> Result<()> {
    let e = eps.require_positive()?;
    let n = check_deriv_dims(acc.len(), z, w, z.len() * z.len())?;
    let mut p = [Complex64::new(0.0, 0.0); MAX_DERIV_DIM];
    let (d, w_norm_sq) = deriv_core(z, w, e, &mut p[..n]);
    let inv_2d2 = scale / (2.0 * d * d);
    let diag = 1.0 + w_norm_sq;
    for m in 0..n {
        for k in 0..n {
            // Q_mk = (1+|w|²)·δ_mk − w_k·w̄_m
            let mut q_mk = -w[k] * w[m].conj();
            if m == k {
                q_mk += diag;
            }
            acc[m * n + k] += (q_mk * d - p[m] * p[k].conj()) * inv_2d2;
        }
    }
    Ok(())
}

/// Holomorphic gradient (∂N_ε/∂z_m)_m = P/(2D); requires ε > 0.
///
/// The Euclidean norm of this vector obeys
/// ‖∂N_ε(·,w)‖ ≤ (√2/2)·(1+|w|)/|z−w| for z ≠ w, since
/// |P| ≤ |z−w| + √2·|w|·|z∧w| ≤ √(1+2|w|²)·√S and √S/D ≤ 1/√S.
pub fn grad_n_eps(z: &CVec, w: &CVec, eps: RegEps) -> Result<CVec> {
    let mut acc = vec![Complex64::new(0.0, 0.0); z.dim()];
    accumulate_grad_n_eps(&mut acc, z.entries(), w.entries(), eps, 1.0)?;
    CVec::new(acc)
}

/// Complex Hessian (∂²N_ε/∂z_m∂z̄_k)_{mk}; Hermitian and PSD (N_ε is psh).
pub fn hessian_n_eps(z: &CVec, w: &CVec, eps: RegEps) -> Result<HermitianMatrix> {
    let n = z.dim();
    let mut acc = vec![Complex64::new(0.0, 0.0); n * n];
    accumulate_hessian_n_eps(&mut acc, z.entries(), w.entries(), eps, 1.0)?;
    HermitianMatrix::new(n, acc)
}

/// n×n complex matrix H_{jk} = ∂²u/∂z_j∂z̄_k, kept exactly Hermitian.
///
/// Construction symmetrizes A ← (A + A*)/2, so H = H* holds to the last bit
/// regardless of how the entries were accumulated.
#[derive(Clone, Debug)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyVector);
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        let mut m = HermitianMatrix { n, data };
        m.symmetrize();
        Ok(m)
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, vec![Complex64::new(0.0, 0.0); n * n])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        Ok(m)
    }

    pub fn from_diag(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut m = Self::zeros(n)?;
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = Complex64::new(d, 0.0);
        }
        Ok(m)
    }

    fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            self.data[i * n + i] = Complex64::new(self.data[i * n + i].re, 0.0);
            for j in (i + 1)..n {
                let avg = 0.5 * (self.data[i * n + j] + self.data[j * n + i].conj());
                self.data[i * n + j] = avg;
                self.data[j * n + i] = avg.conj();
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    /// Largest entry modulus; the unit for entrywise bound checks.
    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.data[i * self.n + i].re).sum()
    }

    /// self + c·other, entrywise; used to accumulate potential Hessians.
    pub fn add_scaled(&mut self, other: &HermitianMatrix, c: f64) -> Result<()> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn scale(&mut self, c: f64) {
        for a in self.data.iter_mut() {
            *a *= c;
        }
    }

    /// Real eigenvalues in ascending order.
    ///
    /// Computed by cyclic Jacobi on the real symmetric embedding
    /// [[X, −Y], [Y, X]] of H = X + iY, whose spectrum is that of H with
    /// every eigenvalue doubled.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.n;
        let m = 2 * n;
        let mut a = vec![0.0f64; m * m];
        for i in 0..n {
            for j in 0..n {
                let h = self.data[i * n + j];
                a[i * m + j] = h.re;
                a[(i + n) * m + (j + n)] = h.re;
                a[i * m + (j + n)] = -h.im;
                a[(i + n) * m + j] = h.im;
            }
        }
        let doubled = jacobi_symmetric_eigenvalues(&mut a, m);
        (0..n)
            .map(|i| 0.5 * (doubled[2 * i] + doubled[2 * i + 1]))
            .collect()
    }

    /// det H (real for Hermitian input). Closed form for n <= 3, eigenvalue
    /// product beyond that.
    pub fn det(&self) -> f64 {
        match self.n {
            1 => self.data[0].re,
            2 => self.data[0].re * self.data[3].re - self.data[1].norm_sqr(),
            3 => {
                let a = self.data[0].re;
                let b = self.data[4].re;
                let c = self.data[8].re;
                let x = self.data[1]; // (0,1)
                let y = self.data[2]; // (0,2)
                let z = self.data[5]; // (1,2)
                a * b * c + 2.0 * (x * z * y.conj()).re
                    - a * z.norm_sqr()
                    - b * y.norm_sqr()
                    - c * x.norm_sqr()
            }
            _ => self.eigenvalues().iter().product(),
        }
    }

    /// Sylvester test: `Some(true)` iff all leading principal minors are
    /// strictly positive (hence the matrix is positive definite). Only
    /// implemented for n <= 3; larger matrices return `None` and callers
    /// should fall back to eigenvalues.
    pub fn positive_definite_by_minors(&self) -> Option<bool> {
        let m1 = self.data[0].re;
        match self.n {
            1 => Some(m1 > 0.0),
            2 => Some(m1 > 0.0 && self.det() > 0.0),
            3 => {
                let m2 = self.data[0].re * self.data[4].re - self.data[1].norm_sqr();
                Some(m1 > 0.0 && m2 > 0.0 && self.det() > 0.0)
            }
            _ => None,
        }
    }

    fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self.data[i * self.n + j]).collect()
    }
}

/// Eigenvalues of a dense real symmetric matrix, ascending (cyclic Jacobi).
fn jacobi_symmetric_eigenvalues(a: &mut [f64], n: usize) -> Vec<f64> {
    let scale: f64 = (0..n).map(|i| a[i * n + i].abs()).fold(1.0_f64, f64::max);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for i in 0..n {
                    if i != p && i != q {
                        let aip = a[i * n + p];
                        let aiq = a[i * n + q];
                        a[i * n + p] = c * aip - s * aiq;
                        a[i * n + q] = s * aip + c * aiq;
                        a[p * n + i] = a[i * n + p];
                        a[q * n + i] = a[i * n + q];
                    }
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eigs
}

/// k-th elementary symmetric function e_k(λ); e_0 = 1.
pub fn elementary_symmetric(eigs: &[f64], k: usize) -> f64 {
    if k > eigs.len() {
        return 0.0;
    }
    let mut e = vec![0.0f64; k + 1];
    e[0] = 1.0;
    for &lam in eigs {
        for j in (1..=k).rev() {
            e[j] += lam * e[j - 1];
        }
    }
    e[k]
}

/// Determinant of a dense complex matrix by LU with partial pivoting.
fn complex_det(n: usize, mut a: Vec<Complex64>) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col * n + col].norm_sqr();
        for row in (col + 1)..n {
            let mag = a[row * n + col].norm_sqr();
            if mag > best {
                best = mag;
                pivot = row;
            }
        }
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            det = -det;
        }
        let diag = a[col * n + col];
        det *= diag;
        for row in (col + 1)..n {
            let factor = a[row * n + col] / diag;
            for j in col..n {
                let sub = factor * a[col * n + j];
                a[row * n + j] -= sub;
            }
        }
    }
    det
}

/// Mixed discriminant D(H₁,…,Hₙ) of n Hermitian n×n matrices, normalized so
/// that D(H,…,H) = det H.
///
/// Column-permutation formula: D = (1/n!)·Σ_σ det(column j of H_{σ(j)}).
/// Symmetric and multilinear; real for Hermitian inputs (the imaginary
/// residue of the permutation sum is discarded).
pub fn mixed_discriminant(mats: &[HermitianMatrix]) -> Result<f64> {
    let n = mats.len();
    if n == 0 {
        return Err(Error::EmptyVector);
    }
    for m in mats {
        if m.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: m.dim(),
            });
        }
    }
    if n > 8 {
        return Err(Error::InvalidParameter(format!(
            "mixed discriminant supports up to 8 matrices, got {n}"
        )));
    }
    let columns: Vec<Vec<Vec<Complex64>>> = mats
        .iter()
        .map(|m| (0..n).map(|j| m.column(j)).collect())
        .collect();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut count = 0usize;
    // Heap's algorithm over permutations σ; each term is the determinant of
    // the matrix whose column j is column j of H_{σ(j)}.
    heap_permutations(&mut perm, n, &mut |sigma| {
        let mut a = vec![Complex64::new(0.0, 0.0); n * n];
        for (j, &which) in sigma.iter().enumerate() {
            for i in 0..n {
                a[i * n + j] = columns[which][j][i];
            }
        }
        acc += complex_det(n, a);
        count += 1;
    });
    let factorial = count as f64;
    Ok(acc.re / factorial)
}

fn heap_permutations<F: FnMut(&[usize])>(items: &mut Vec<usize>, k: usize, visit: &mut F) {
    if k <= 1 {
        visit(items);
        return;
    }
    for i in 0..k {
        heap_permutations(items, k - 1, visit);
        if k % 2 == 0 {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

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

    /// ∂f/∂z_m = ½(∂x − i·∂y)f by central differences on a real-valued f.
    fn fd_holomorphic_gradient<F: Fn(&CVec) -> f64>(f: F, z: &CVec, h: f64) -> CVec {
        let n = z.dim();
        let mut out = Vec::with_capacity(n);
        let mut coords = z.to_real_coords();
        for m in 0..n {
            let mut diff = |idx: usize| {
                let orig = coords[idx];
                coords[idx] = orig + h;
                let up = f(&CVec::from_real_coords(&coords).unwrap());
                coords[idx] = orig - h;
                let dn = f(&CVec::from_real_coords(&coords).unwrap());
                coords[idx] = orig;
                (up - dn) / (2.0 * h)
            };
            let dx = diff(2 * m);
            let dy = diff(2 * m + 1);
            out.push(0.5 * c(dx, -dy));
        }
        CVec::new(out).unwrap()
    }

    /// ∂g/∂z̄_k = ½(∂x + i·∂y)g by central differences on a ℂ-valued g.
    fn fd_antiholomorphic<F: Fn(&CVec) -> Complex64>(
        g: F,
        z: &CVec,
        k: usize,
        h: f64,
    ) -> Complex64 {
        let mut coords = z.to_real_coords();
        let mut diff = |idx: usize| {
            let orig = coords[idx];
            coords[idx] = orig + h;
            let up = g(&CVec::from_real_coords(&coords).unwrap());
            coords[idx] = orig - h;
            let dn = g(&CVec::from_real_coords(&coords).unwrap());
            coords[idx] = orig;
            (up - dn) / (2.0 * h)
        };
        let dx = diff(2 * k);
        let dy = diff(2 * k + 1);
        0.5 * (dx + c(0.0, 1.0) * dy)
    }

    #[test]
    fn kernel_k_against_origin_is_plain_log() {
        let z = CVec::new(vec![c(0.6, -0.8), c(0.0, 0.5)]).unwrap();
        let w = CVec::new(vec![c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((kernel_k(&z, &w).unwrap() - z.norm().ln()).abs() < 1e-14);
        assert!((kernel_n(&z, &w, RegEps::zero()).unwrap() - z.norm().ln()).abs() < 1e-14);
    }

    #[test]
    fn kernels_hit_minus_infinity_on_the_diagonal() {
        let w = CVec::new(vec![c(0.3, 0.4), c(-1.0, 0.2)]).unwrap();
        assert_eq!(kernel_k(&w, &w).unwrap(), f64::NEG_INFINITY);
        assert_eq!(kernel_n(&w, &w, RegEps::zero()).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn regularized_diagonal_value_is_closed_form() {
        let w = CVec::new(vec![c(0.3, 0.4), c(-1.0, 0.2)]).unwrap();
        let eps = RegEps::new(0.25).unwrap();
        let expect = 0.5 * (0.25f64 * 0.25 / (1.0 + w.norm_sq())).ln();
        assert!((kernel_n(&w, &w, eps).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn kernel_g_examples() {
        let p = ProjectivePoint::new(CVec::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap()).unwrap();
        let q = ProjectivePoint::new(CVec::new(vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap()).unwrap();
        assert_eq!(kernel_g(&p, &q).unwrap(), 0.0);
        assert_eq!(kernel_g(&p, &p).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn kernel_g_matches_log_sine_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let p = ProjectivePoint::new(random_cvec(&mut rng, 3, 2.0)).unwrap();
            let q = ProjectivePoint::new(random_cvec(&mut rng, 3, 2.0)).unwrap();
            let g = kernel_g(&p, &q).unwrap();
            let (sine, _) = crate::geometry::projective_sine_distance(&p, &q).unwrap();
            assert!((g - sine.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn chart_identity_links_g_and_n() {
        // For p, q in chart 0 with affine coordinates z, w:
        // G(p, q) = N(z, w, 0) − ½·log(1+|z|²), an exact algebraic identity.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..500 {
            let z = random_cvec(&mut rng, 2, 3.0);
            let w = random_cvec(&mut rng, 2, 3.0);
            let lift = |v: &CVec| {
                let mut hom = vec![c(1.0, 0.0)];
                hom.extend_from_slice(v.entries());
                ProjectivePoint::new(CVec::new(hom).unwrap()).unwrap()
            };
            let g = kernel_g(&lift(&z), &lift(&w)).unwrap();
            let n = kernel_n(&z, &w, RegEps::zero()).unwrap();
            let ell = 0.5 * (1.0 + z.norm_sq()).ln();
            assert!((g - (n - ell)).abs() < 1e-12, "g={g} n-ell={}", n - ell);
        }
    }

    #[test]
    fn derivatives_reject_zero_eps() {
        let z = CVec::new(vec![c(1.0, 0.0)]).unwrap();
        let w = CVec::new(vec![c(0.0, 0.0)]).unwrap();
        assert!(matches!(
            grad_n_eps(&z, &w, RegEps::zero()),
            Err(Error::EpsRequired)
        ));
        assert!(matches!(
            hessian_n_eps(&z, &w, RegEps::zero()),
            Err(Error::EpsRequired)
        ));
    }

    #[test]
    fn gradient_vanishes_on_the_diagonal() {
        let w = CVec::new(vec![c(0.7, -0.1), c(0.2, 0.9), c(0.0, -0.4)]).unwrap();
        let g = grad_n_eps(&w, &w, RegEps::new(0.3).unwrap()).unwrap();
        assert!(g.norm() < 1e-15);
    }

    #[test]
    fn gradient_numerator_matches_term_by_term_minor_sum() {
        // The O(n) contraction used in deriv_data must equal the literal
        // minor-sum formula for P_m.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let n = rng.random_range(1..=4);
            let z = random_cvec(&mut rng, n, 2.0);
            let w = random_cvec(&mut rng, n, 2.0);
            let eps = RegEps::new(rng.random_range(0.2..1.0)).unwrap();
            let grad = grad_n_eps(&z, &w, eps).unwrap();
            let e = eps.value();
            let d = extended_wedge_norm_sq(&z, &w).unwrap() + e * e;
            for m in 0..n {
                let mut pm = (z[m] - w[m]).conj();
                for j in 0..n {
                    if j != m {
                        pm += w[j] * (z[m] * w[j] - z[j] * w[m]).conj();
                    }
                }
                let direct = pm / (2.0 * d);
                assert!((grad[m] - direct).norm() < 1e-13 * (1.0 + direct.norm()));
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..200 {
            let n = rng.random_range(1..=3);
            let z = random_cvec(&mut rng, n, 2.0);
            let w = random_cvec(&mut rng, n, 2.0);
            let eps = RegEps::new(rng.random_range(0.2..1.0)).unwrap();
            let analytic = grad_n_eps(&z, &w, eps).unwrap();
            let fd = fd_holomorphic_gradient(|y| kernel_n(y, &w, eps).unwrap(), &z, 1e-5);
            let scale = analytic.norm().max(1e-3);
            assert!(
                analytic.sub(&fd).unwrap().norm() <= 1e-6 * scale,
                "gradient FD mismatch: {:e}",
                analytic.sub(&fd).unwrap().norm() / scale
            );
        }
    }

    #[test]
    fn hessian_matches_finite_differences_of_the_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..120 {
            let n = rng.random_range(1..=3);
            let z = random_cvec(&mut rng, n, 2.0);
            let w = random_cvec(&mut rng, n, 2.0);
            let eps = RegEps::new(rng.random_range(0.2..1.0)).unwrap();
            let h = hessian_n_eps(&z, &w, eps).unwrap();
            let scale = h.max_abs_entry().max(1e-3);
            for m in 0..n {
                for k in 0..n {
                    let fd =
                        fd_antiholomorphic(|y| grad_n_eps(y, &w, eps).unwrap()[m], &z, k, 1e-5);
                    assert!(
                        (h.get(m, k) - fd).norm() <= 1e-6 * scale,
                        "H[{m}{k}] mismatch {:e}",
                        (h.get(m, k) - fd).norm() / scale
                    );
                }
            }
        }
    }

    #[test]
    fn hessian_matches_mixed_second_differences_of_the_value() {
        // Double central differencing of the value halves the attainable
        // precision, so the tolerance is looser than the gradient-based one.
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..60 {
            let n = rng.random_range(1..=3);
            let z = random_cvec(&mut rng, n, 1.5);
            let mut w = random_cvec(&mut rng, n, 1.5);
            if z.dist_sq(&w).unwrap() < 0.09 {
                w = CVec::new(w.entries().iter().map(|e| e + c(0.5, 0.5)).collect()).unwrap();
            }
            let eps = RegEps::new(rng.random_range(0.3..1.0)).unwrap();
            let h = hessian_n_eps(&z, &w, eps).unwrap();
            let scale = h.max_abs_entry().max(1e-3);
            for m in 0..n {
                for k in 0..n {
                    let fd = fd_antiholomorphic(
                        |y| fd_holomorphic_gradient(|x| kernel_n(x, &w, eps).unwrap(), y, 1e-4)[m],
                        &z,
                        k,
                        1e-4,
                    );
                    assert!(
                        (h.get(m, k) - fd).norm() <= 1e-5 * scale,
                        "H[{m}{k}] value-FD mismatch {:e}",
                        (h.get(m, k) - fd).norm() / scale
                    );
                }
            }
        }
    }

    #[test]
    fn one_dimensional_diagonal_hessian_is_half_inverse_eps_squared() {
        let w = CVec::new(vec![c(0.4, -1.1)]).unwrap();
        for &e in &[0.5, 0.1, 0.03] {
            let h = hessian_n_eps(&w, &w, RegEps::new(e).unwrap()).unwrap();
            let expect = 1.0 / (2.0 * e * e);
            assert!((h.get(0, 0).re - expect).abs() < 1e-9 * expect);
            assert!(h.get(0, 0).im.abs() < 1e-15 * expect);
        }
    }

    #[test]
    fn hessian_is_positive_semidefinite_and_entry_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10_000 {
            let n = rng.random_range(1..=3);
            let z = random_cvec(&mut rng, n, 2.5);
            let w = random_cvec(&mut rng, n, 2.5);
            let eps = RegEps::new(rng.random_range(0.05..1.0)).unwrap();
            let h = hessian_n_eps(&z, &w, eps).unwrap();
            let eigs = h.eigenvalues();
            assert!(eigs[0] >= -1e-10, "negative eigenvalue {:e}", eigs[0]);
            let e = eps.value();
            let d = extended_wedge_norm_sq(&z, &w).unwrap() + e * e;
            let bound = HESSIAN_ENTRY_CONST * (1.0 + w.norm_sq()) / d;
            assert!(h.max_abs_entry() <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn gradient_norm_bound_holds_off_the_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for _ in 0..10_000 {
            let n = rng.random_range(1..=3);
            let z = random_cvec(&mut rng, n, 2.5);
            let w = random_cvec(&mut rng, n, 2.5);
            let dist = z.dist_sq(&w).unwrap().sqrt();
            if dist < 1e-6 {
                continue;
            }
            let eps = RegEps::new(rng.random_range(0.01..1.0)).unwrap();
            let g = grad_n_eps(&z, &w, eps).unwrap();
            let bound = 0.5 * std::f64::consts::SQRT_2 * (1.0 + w.norm()) / dist;
            assert!(g.norm() <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn known_two_by_two_eigenvalues() {
        // [[2, i], [−i, 2]] has eigenvalues 1 and 3.
        let h = HermitianMatrix::new(2, vec![c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)])
            .unwrap();
        let eigs = h.eigenvalues();
        assert!((eigs[0] - 1.0).abs() < 1e-12);
        assert!((eigs[1] - 3.0).abs() < 1e-12);
        assert!((h.det() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_det_matches_eigenvalue_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..2_000 {
            let n = rng.random_range(1..=3);
            let mut data = vec![Complex64::default(); n * n];
            for i in 0..n {
                data[i * n + i] = c(rng.random_range(-2.0..2.0), 0.0);
                for j in (i + 1)..n {
                    let v = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                    data[i * n + j] = v;
                    data[j * n + i] = v.conj();
                }
            }
            let h = HermitianMatrix::new(n, data).unwrap();
            let product: f64 = h.eigenvalues().iter().product();
            let scale = h.max_abs_entry().max(1.0).powi(n as i32);
            assert!(
                (h.det() - product).abs() <= 1e-11 * scale,
                "det {} vs eigen product {}",
                h.det(),
                product
            );
            // Sylvester agrees with the eigenvalue sign test.
            let pd = h.eigenvalues().iter().all(|&e| e > 0.0);
            if let Some(by_minors) = h.positive_definite_by_minors() {
                // The two tests can only disagree within roundoff of a
                // singular matrix; skip near-singular draws.
                if h.eigenvalues().iter().all(|&e| e.abs() > 1e-9) {
                    assert_eq!(by_minors, pd);
                }
            }
        }
    }

    #[test]
    fn elementary_symmetric_basics() {
        let eigs = [1.0, 2.0, 3.0];
        assert_eq!(elementary_symmetric(&eigs, 0), 1.0);
        assert_eq!(elementary_symmetric(&eigs, 1), 6.0);
        assert_eq!(elementary_symmetric(&eigs, 2), 11.0);
        assert_eq!(elementary_symmetric(&eigs, 3), 6.0);
        assert_eq!(elementary_symmetric(&eigs, 4), 0.0);
    }

    #[test]
    fn mixed_discriminant_pinned_values() {
        let h1 = HermitianMatrix::from_diag(&[1.0, 0.0]).unwrap();
        let h2 = HermitianMatrix::from_diag(&[0.0, 1.0]).unwrap();
        let d = mixed_discriminant(&[h1.clone(), h2.clone()]).unwrap();
        assert!((d - 0.5).abs() < 1e-14);
        // Diagonal case reproduces det.
        let d11 = mixed_discriminant(&[h1.clone(), h1.clone()]).unwrap();
        assert!(d11.abs() < 1e-14);
        let id = HermitianMatrix::identity(2).unwrap();
        let dii = mixed_discriminant(&[id.clone(), id.clone()]).unwrap();
        assert!((dii - 1.0).abs() < 1e-14);
    }

    /// Polarization oracle: n!·D(A₁,…,Aₙ) = Σ_{∅≠S} (−1)^{n−|S|} det(Σ_{i∈S} Aᵢ).
    fn polarization_mixed(mats: &[HermitianMatrix]) -> f64 {
        let n = mats.len();
        let mut total = 0.0;
        for mask in 1u32..(1 << n) {
            let mut sum = HermitianMatrix::zeros(n).unwrap();
            let mut size = 0;
            for (i, m) in mats.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    sum.add_scaled(m, 1.0).unwrap();
                    size += 1;
                }
            }
            let sign = if (n - size) % 2 == 0 { 1.0 } else { -1.0 };
            total += sign * sum.det();
        }
        let factorial: f64 = (1..=n).map(|i| i as f64).product();
        total / factorial
    }

    #[test]
    fn mixed_discriminant_agrees_with_polarization() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..100 {
            let n = rng.random_range(2..=3);
            let mats: Vec<HermitianMatrix> = (0..n)
                .map(|_| {
                    let raw: Vec<Complex64> = (0..n * n)
                        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                        .collect();
                    HermitianMatrix::new(n, raw).unwrap()
                })
                .collect();
            let direct = mixed_discriminant(&mats).unwrap();
            let polar = polarization_mixed(&mats);
            assert!(
                (direct - polar).abs() <= 1e-10 * (1.0 + direct.abs().max(polar.abs())),
                "mixed discriminant {direct} vs polarization {polar}"
            );
        }
    }

    #[test]
    fn mixed_discriminant_is_symmetric_in_its_arguments() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let mats: Vec<HermitianMatrix> = (0..3)
            .map(|_| {
                let raw: Vec<Complex64> = (0..9)
                    .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect();
                HermitianMatrix::new(3, raw).unwrap()
            })
            .collect();
        let base = mixed_discriminant(&mats).unwrap();
        let swapped =
            mixed_discriminant(&[mats[2].clone(), mats[0].clone(), mats[1].clone()]).unwrap();
        assert!((base - swapped).abs() < 1e-12 * (1.0 + base.abs()));
    }

    proptest! {
        /// N_ε is strictly increasing in ε and sandwiched:
        /// K ≤ N ≤ ½log(1+|z|²), with gap at most ½log(1+min(|z|²,|w|²)).
        #[test]
        fn sandwich_and_gap(
            ze in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 2),
            we in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 2),
        ) {
            let z = CVec::new(ze.iter().map(|&(re, im)| c(re, im)).collect()).unwrap();
            let w = CVec::new(we.iter().map(|&(re, im)| c(re, im)).collect()).unwrap();
            let k = kernel_k(&z, &w).unwrap();
            let n0 = kernel_n(&z, &w, RegEps::zero()).unwrap();
            let n_small = kernel_n(&z, &w, RegEps::new(0.1).unwrap()).unwrap();
            let n_large = kernel_n(&z, &w, RegEps::new(0.5).unwrap()).unwrap();
            let upper = 0.5 * (1.0 + z.norm_sq()).ln();
            prop_assert!(k <= n0 + 1e-12);
            prop_assert!(n0 <= upper + 1e-12);
            prop_assert!(n_small <= n_large);
            prop_assert!(n0 <= n_small);
            if k.is_finite() {
                let gap_bound = 0.5 * (1.0 + z.norm_sq().min(w.norm_sq())).ln();
                prop_assert!(n0 - k >= -1e-12);
                prop_assert!(n0 - k <= gap_bound + 1e-12);
            }
        }
    }
}
