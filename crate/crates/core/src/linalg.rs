//! Dense complex linear algebra for matrices of dimension <= 8.
//!
//! Everything the Floquet and entanglement machinery needs lives here:
//! products, adjoints, a general (Hessenberg + shifted QR) eigensolver and a
//! Hermitian (complex Jacobi) eigensolver. The dimensions involved are tiny,
//! so the kernels are written for auditability rather than throughput.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest matrix dimension the kernels accept.
pub const MAX_DIM: usize = 8;

const EPS: f64 = f64::EPSILON;

/// Dense row-major complex matrix, dimension 1..=8.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries. All entries must be finite.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Domain(format!(
                "matrix dimension {dim} outside 1..={MAX_DIM}"
            )));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimMismatch {
                left: entries.len(),
                right: dim * dim,
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("matrix entry is not finite".into()));
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} outside 1..={MAX_DIM}");
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Entry-wise complex conjugate (no transpose).
    pub fn conjugate(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { dim: self.dim, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { dim: self.dim, entries })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius norm of A - A†.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Largest entry-wise |a_ij - b_ij|.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::DimMismatch {
                left: self.dim,
                right: v.len(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for i in 0..self.dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.dim {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        matmul(self, other)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.4e}{:+.4e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Plain triple-loop product.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim != b.dim {
        return Err(Error::DimMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    let n = a.dim;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a[(i, k)];
            if aik.re == 0.0 && aik.im == 0.0 {
                continue;
            }
            for j in 0..n {
                out[(i, j)] += aik * b[(k, j)];
            }
        }
    }
    Ok(out)
}

/// Eigenvalues with optional eigenvectors, sorted by descending modulus
/// (ties broken by descending real, then descending imaginary part).
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<Complex64>,
    pub vectors: Option<Vec<Vec<Complex64>>>,
}

impl EigenPairs {
    /// Real parts of the eigenvalues (intended for the Hermitian solver).
    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }
}

// Total order used for eigenvalue output: descending modulus quantized at
// 1e-12 so that round-off ties fall through to the real/imaginary comparison.
fn eig_sort_key(z: &Complex64) -> (i64, i64, i64) {
    let q = |x: f64| -> i64 { (x * 1e12).round().clamp(-9e17, 9e17) as i64 };
    (-q(z.norm()), -q(z.re), -q(z.im))
}

fn sort_pairs(values: Vec<Complex64>, vectors: Vec<Vec<Complex64>>) -> EigenPairs {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by_key(|&i| eig_sort_key(&values[i]));
    let values = order.iter().map(|&i| values[i]).collect();
    let vectors = order.iter().map(|&i| vectors[i].clone()).collect();
    EigenPairs {
        values,
        vectors: Some(vectors),
    }
}

fn normalize_gauge(v: &mut [Complex64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
    // Fix the global phase: largest component made real and positive.
    let mut best = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm_sqr() > v[best].norm_sqr() {
            best = i;
        }
    }
    let mag = v[best].norm();
    if mag > 0.0 {
        let phase = v[best] / mag;
        let correction = phase.conj();
        for z in v.iter_mut() {
            *z *= correction;
        }
    }
}

/// All eigenvalues (and eigenvectors) of a general complex matrix via
/// Hessenberg reduction followed by shifted QR iteration.
pub fn eig_general(a: &ComplexMatrix) -> Result<EigenPairs> {
    let n = a.dim;
    if n == 1 {
        return Ok(EigenPairs {
            values: vec![a[(0, 0)]],
            vectors: Some(vec![vec![Complex64::new(1.0, 0.0)]]),
        });
    }
    let (mut t, mut z) = hessenberg(a);
    schur(&mut t, &mut z, 100 * n * n)?;

    let values: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let tnorm = t.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut vectors = Vec::with_capacity(n);
    for k in 0..n {
        let y = triangular_eigvec(&t, k, tnorm);
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..=k {
                acc += z[(i, j)] * y[j];
            }
            v[i] = acc;
        }
        normalize_gauge(&mut v);
        vectors.push(v);
    }
    Ok(sort_pairs(values, vectors))
}

/// A = Q H Q† with H upper Hessenberg, via complex Householder reflections.
fn hessenberg(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.dim;
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let mut v: Vec<Complex64> = (0..m).map(|i| h[(k + 1 + i, k)]).collect();
        let xnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm <= EPS * h.frobenius_norm() {
            continue;
        }
        let alpha = v[0];
        let phase = if alpha.norm() > 0.0 {
            alpha / alpha.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        v[0] += phase * xnorm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;

        // H <- P H with P = I - tau v v†, acting on rows k+1..
        for j in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..m {
                s += v[i].conj() * h[(k + 1 + i, j)];
            }
            s *= tau;
            for i in 0..m {
                let vi = v[i];
                h[(k + 1 + i, j)] -= s * vi;
            }
        }
        // H <- H P, acting on columns k+1..
        for i in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..m {
                s += h[(i, k + 1 + j)] * v[j];
            }
            s *= tau;
            for j in 0..m {
                h[(i, k + 1 + j)] -= s * v[j].conj();
            }
        }
        // Q <- Q P
        for i in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..m {
                s += q[(i, k + 1 + j)] * v[j];
            }
            s *= tau;
            for j in 0..m {
                q[(i, k + 1 + j)] -= s * v[j].conj();
            }
        }
    }
    // Scrub the introduced zeros.
    for i in 0..n {
        for j in 0..i.saturating_sub(1) {
            h[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    (h, q)
}

fn subdiag_negligible(t: &ComplexMatrix, i: usize) -> bool {
    let scale = t[(i - 1, i - 1)].norm() + t[(i, i)].norm();
    let tol = if scale > 0.0 {
        EPS * scale
    } else {
        EPS * t.frobenius_norm()
    };
    t[(i, i - 1)].norm() <= tol
}

/// Reduces an upper Hessenberg matrix to upper triangular (complex Schur)
/// form in place, accumulating the similarity transform into `z`.
fn schur(t: &mut ComplexMatrix, z: &mut ComplexMatrix, budget: usize) -> Result<()> {
    let n = t.dim;
    let mut hi = n - 1;
    let mut iterations = 0usize;
    let mut since_deflation = 0usize;
    loop {
        // Deflate converged eigenvalues off the bottom of the active block.
        while hi > 0 && subdiag_negligible(t, hi) {
            t[(hi, hi - 1)] = Complex64::new(0.0, 0.0);
            hi -= 1;
            since_deflation = 0;
        }
        if hi == 0 {
            return Ok(());
        }
        let mut lo = hi;
        while lo > 0 && !subdiag_negligible(t, lo) {
            lo -= 1;
        }
        if lo > 0 {
            t[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
        }

        iterations += 1;
        since_deflation += 1;
        if iterations > budget {
            let estimates = (0..n).map(|i| t[(i, i)]).collect();
            return Err(Error::NoConvergence {
                iterations,
                estimates,
            });
        }
        let shift = if since_deflation.is_multiple_of(12) {
            // Exceptional shift to break symmetric stalls.
            let s = t[(hi, hi - 1)].norm();
            t[(hi, hi)] + Complex64::new(0.75 * s, 0.4375 * s)
        } else {
            wilkinson_shift(t, hi)
        };
        qr_sweep(t, z, lo, hi, shift);
    }
}

fn wilkinson_shift(t: &ComplexMatrix, hi: usize) -> Complex64 {
    let a = t[(hi - 1, hi - 1)];
    let b = t[(hi - 1, hi)];
    let c = t[(hi, hi - 1)];
    let d = t[(hi, hi)];
    let mid = (a + d) * 0.5;
    let disc = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
    let e1 = mid + disc;
    let e2 = mid - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// One explicit-shift QR step H - mu = QR, H <- RQ + mu on the active block.
fn qr_sweep(t: &mut ComplexMatrix, z: &mut ComplexMatrix, lo: usize, hi: usize, shift: Complex64) {
    let n = t.dim;
    for i in lo..=hi {
        let d = t[(i, i)];
        t[(i, i)] = d - shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for i in lo..hi {
        let (c, s) = givens(t[(i, i)], t[(i + 1, i)]);
        for j in i..n {
            let a = t[(i, j)];
            let b = t[(i + 1, j)];
            t[(i, j)] = c * a + s * b;
            t[(i + 1, j)] = -s.conj() * a + c * b;
        }
        t[(i + 1, i)] = Complex64::new(0.0, 0.0);
        rotations.push((c, s));
    }
    for (idx, &(c, s)) in rotations.iter().enumerate() {
        let i = lo + idx;
        // T <- T G†, touching only rows with nonzeros in columns i, i+1.
        for r in 0..=(i + 1).min(n - 1) {
            let a = t[(r, i)];
            let b = t[(r, i + 1)];
            t[(r, i)] = c * a + s.conj() * b;
            t[(r, i + 1)] = -s * a + c * b;
        }
        for r in 0..n {
            let a = z[(r, i)];
            let b = z[(r, i + 1)];
            z[(r, i)] = c * a + s.conj() * b;
            z[(r, i + 1)] = -s * a + c * b;
        }
    }
    for i in lo..=hi {
        let d = t[(i, i)];
        t[(i, i)] = d + shift;
    }
}

/// Complex Givens rotation G = [[c, s], [-s̄, c]] with real c, mapping
/// (a, b) to (r, 0).
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    let an = a.norm();
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = (an * an + bn * bn).sqrt();
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

/// Solves (T - lambda_k I) y = 0 by back-substitution with the usual
/// perturbed-diagonal guard for (nearly) repeated eigenvalues.
fn triangular_eigvec(t: &ComplexMatrix, k: usize, tnorm: f64) -> Vec<Complex64> {
    let lambda = t[(k, k)];
    let smallnum = (EPS * tnorm).max(f64::MIN_POSITIVE);
    let mut y = vec![Complex64::new(0.0, 0.0); k + 1];
    y[k] = Complex64::new(1.0, 0.0);
    for i in (0..k).rev() {
        let mut s = Complex64::new(0.0, 0.0);
        for j in (i + 1)..=k {
            s += t[(i, j)] * y[j];
        }
        let mut d = t[(i, i)] - lambda;
        if d.norm() < smallnum {
            d = Complex64::new(smallnum, 0.0);
        }
        y[i] = -s / d;
    }
    y
}

/// Eigendecomposition of a Hermitian matrix via cyclic complex Jacobi
/// rotations. Returns real eigenvalues and orthonormal eigenvectors.
pub fn eig_hermitian(a: &ComplexMatrix) -> Result<EigenPairs> {
    let n = a.dim;
    let fro = a.frobenius_norm();
    let dev = a.hermitian_deviation();
    if dev > 1e-12 * fro {
        return Err(Error::NotHermitian { deviation: dev });
    }

    // Work on the symmetrized copy to scrub rounding noise.
    let mut m = a.add(&a.adjoint())?.scale(Complex64::new(0.5, 0.0));
    let mut v = ComplexMatrix::identity(n);
    let tol = 1e-14 * fro.max(f64::MIN_POSITIVE);

    let mut converged = false;
    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        let estimates = (0..n).map(|i| m[(i, i)]).collect();
        return Err(Error::NoConvergence {
            iterations: 60,
            estimates,
        });
    }

    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let d = m[(i, i)];
        if d.im.abs() > 1e-10 {
            return Err(Error::Numerical(format!(
                "Hermitian eigenvalue has imaginary part {:.3e}",
                d.im
            )));
        }
        values.push(Complex64::new(d.re, 0.0));
    }
    let mut vectors = Vec::with_capacity(n);
    for j in 0..n {
        let mut col: Vec<Complex64> = (0..n).map(|i| v[(i, j)]).collect();
        normalize_gauge(&mut col);
        vectors.push(col);
    }
    Ok(sort_pairs(values, vectors))
}

fn jacobi_rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let n = m.dim;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let phase = apq / g;
    let tau = (aqq - app) / (2.0 * g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let sigma = phase * (t * c);

    // M <- J† M J with J[[p,q],[p,q]] = [[c, sigma], [-sigma̅, c]].
    for r in 0..n {
        let mrp = m[(r, p)];
        let mrq = m[(r, q)];
        m[(r, p)] = c * mrp - sigma.conj() * mrq;
        m[(r, q)] = sigma * mrp + c * mrq;
    }
    for s in 0..n {
        let mps = m[(p, s)];
        let mqs = m[(q, s)];
        m[(p, s)] = c * mps - sigma * mqs;
        m[(q, s)] = sigma.conj() * mps + c * mqs;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    let dpp = m[(p, p)];
    let dqq = m[(q, q)];
    m[(p, p)] = Complex64::new(dpp.re, 0.0);
    m[(q, q)] = Complex64::new(dqq.re, 0.0);

    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = c * vrp - sigma.conj() * vrq;
        v[(r, q)] = sigma * vrp + c * vrq;
    }
}
