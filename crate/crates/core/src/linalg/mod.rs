//! Dense complex linear algebra sized for few-qubit problems.
//!
//! Everything here is written for dimensions in the single digits: matrices
//! are row-major `Vec<Complex64>` with no blocking or SIMD, and the
//! eigensolver is a closed form at `d = 2` plus cyclic Jacobi sweeps above
//! that. Larger dimensions work but are not tuned.

mod eig;

pub use eig::{
    herm_eigs, inv_sqrt_psd, max_eigenvalue, positive_part, sqrt_psd, sum_positive_eigenvalues,
};
pub(crate) use eig::{herm_eigs_of_hermitized, inv_sqrt_psd_internal};

use crate::error::{Error, Result};
use crate::tol;
use num_complex::Complex64;

pub type C64 = Complex64;

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  [")?;
            for j in 0..self.dim {
                let z = self.get(i, j);
                write!(f, " {:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f, " ]")?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix from rows; all rows must have equal length matching
    /// the row count.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "expected {dim} entries in each of {dim} rows"
            )));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from real entries, row-major.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let complex: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            dim: self.dim,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            dim: self.dim,
            data,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let aik = self.get(i, k);
                if aik.re == 0.0 && aik.im == 0.0 {
                    continue;
                }
                for j in 0..d {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.set(i, j, self.get(j, i));
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Real part of `Tr(self * other)`, without forming the product.
    pub fn trace_product_re(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut acc = 0.0;
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                let b = other.get(k, i);
                acc += a.re * b.re - a.im * b.im;
            }
        }
        acc
    }

    /// `(A + A†)/2`.
    pub fn hermitize(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let v = (self.get(i, j) + self.get(j, i).conj()) * 0.5;
                out.set(i, j, v);
            }
        }
        out
    }

    /// Largest entrywise deviation from hermiticity.
    pub fn hermiticity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let dev = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn has_non_finite(&self) -> bool {
        self.data
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        self.sub(other).frobenius_norm()
    }

    /// Largest entrywise deviation from the identity.
    pub fn deviation_from_identity(&self) -> (f64, (usize, usize)) {
        let d = self.dim;
        let mut worst = 0.0f64;
        let mut at = (0, 0);
        for i in 0..d {
            for j in 0..d {
                let target = if i == j {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                let dev = (self.get(i, j) - target).norm();
                if dev > worst {
                    worst = dev;
                    at = (i, j);
                }
            }
        }
        (worst, at)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let (dev, _) = self.adjoint().matmul(self).deviation_from_identity();
        dev <= tol
    }

    /// Kronecker product, `self` acting on the first factor.
    pub fn tensor(&self, other: &Self) -> Self {
        let da = self.dim;
        let db = other.dim;
        let d = da * db;
        let mut out = Self::zeros(d);
        for ia in 0..da {
            for ja in 0..da {
                let a = self.get(ia, ja);
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for ib in 0..db {
                    for jb in 0..db {
                        out.set(ia * db + ib, ja * db + jb, a * other.get(ib, jb));
                    }
                }
            }
        }
        out
    }

    /// Checks trace one, hermiticity, and positive semidefiniteness within
    /// [`tol::RECONSTRUCTION`].
    pub fn validate_density(&self) -> Result<()> {
        if self.has_non_finite() {
            return Err(Error::NotDensity("contains non-finite entries".into()));
        }
        let dev = self.hermiticity_deviation();
        if dev > tol::RECONSTRUCTION {
            return Err(Error::NotHermitian(dev));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > tol::RECONSTRUCTION || tr.im.abs() > tol::RECONSTRUCTION {
            return Err(Error::NotDensity(format!(
                "trace is {:+.6}{:+.6}i, expected 1",
                tr.re, tr.im
            )));
        }
        let (values, _) = eig::herm_eigs_of_hermitized(self);
        if let Some(min) = values.first() {
            if *min < -tol::RECONSTRUCTION {
                return Err(Error::NotDensity(format!(
                    "smallest eigenvalue {min:.3e} is negative"
                )));
            }
        }
        Ok(())
    }
}

/// Traces out the first tensor factor of a `dim_a * dim_b` square matrix,
/// returning the `dim_b`-dimensional remainder.
pub fn partial_trace_a(
    rho_ab: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
) -> Result<ComplexMatrix> {
    if rho_ab.dim() != dim_a * dim_b {
        return Err(Error::DimensionMismatch(format!(
            "matrix has dimension {}, expected {}*{}",
            rho_ab.dim(),
            dim_a,
            dim_b
        )));
    }
    let mut out = ComplexMatrix::zeros(dim_b);
    for ib in 0..dim_b {
        for jb in 0..dim_b {
            let mut acc = C64::new(0.0, 0.0);
            for ia in 0..dim_a {
                acc += rho_ab.get(ia * dim_b + ib, ia * dim_b + jb);
            }
            out.set(ib, jb, acc);
        }
    }
    Ok(out)
}

/// Traces out the second tensor factor, returning the `dim_a`-dimensional
/// remainder.
pub fn partial_trace_b(
    rho_ab: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
) -> Result<ComplexMatrix> {
    if rho_ab.dim() != dim_a * dim_b {
        return Err(Error::DimensionMismatch(format!(
            "matrix has dimension {}, expected {}*{}",
            rho_ab.dim(),
            dim_a,
            dim_b
        )));
    }
    let mut out = ComplexMatrix::zeros(dim_a);
    for ia in 0..dim_a {
        for ja in 0..dim_a {
            let mut acc = C64::new(0.0, 0.0);
            for ib in 0..dim_b {
                acc += rho_ab.get(ia * dim_b + ib, ja * dim_b + ib);
            }
            out.set(ia, ja, acc);
        }
    }
    Ok(out)
}

/// Normalized pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amps: Vec<C64>,
}

impl Ket {
    /// Requires the amplitudes to be normalized within [`tol::ALGEBRAIC`].
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > tol::ALGEBRAIC {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amps })
    }

    /// Normalizes the amplitudes; errors if the vector is numerically zero.
    pub fn from_unnormalized(amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm < tol::ALGEBRAIC {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[k] = C64::new(1.0, 0.0);
        Self { amps }
    }

    /// Qubit ket `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
    pub fn qubit(theta: f64, phi: f64) -> Self {
        let half = theta / 2.0;
        Self {
            amps: vec![
                C64::new(half.cos(), 0.0),
                C64::from_polar(half.sin(), phi),
            ],
        }
    }

    /// Real qubit ket `cos(t/2)|0> + sin(t/2)|1>` at polar angle `t`.
    pub fn real_qubit(t: f64) -> Self {
        Self {
            amps: vec![C64::new((t / 2.0).cos(), 0.0), C64::new((t / 2.0).sin(), 0.0)],
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amp(&self, i: usize) -> C64 {
        self.amps[i]
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> C64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn overlap_sqr(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `|self><self|`.
    pub fn outer(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.set(i, j, self.amps[i] * self.amps[j].conj());
            }
        }
        out
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Self { amps }
    }

    /// Applies a matrix, returning the unnormalized image and its squared
    /// norm.
    pub fn apply(&self, m: &ComplexMatrix) -> (Vec<C64>, f64) {
        debug_assert_eq!(self.dim(), m.dim());
        let d = self.dim();
        let mut out = vec![C64::new(0.0, 0.0); d];
        for i in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..d {
                acc += m.get(i, j) * self.amps[j];
            }
            out[i] = acc;
        }
        let norm_sqr = out.iter().map(|a| a.norm_sqr()).sum();
        (out, norm_sqr)
    }

    /// Global phase fixed so the first amplitude above the floor is real and
    /// nonnegative.
    pub fn canonicalize(&self) -> Self {
        let lead = self.amps.iter().find(|a| a.norm() > 1e-9);
        match lead {
            Some(a) => {
                let phase = a / a.norm();
                let conj = phase.conj();
                Self {
                    amps: self.amps.iter().map(|z| z * conj).collect(),
                }
            }
            None => self.clone(),
        }
    }

    /// Orthogonal complement of a qubit ket.
    pub fn qubit_orthogonal(&self) -> Result<Self> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "qubit complement needs dimension 2, got {}",
                self.dim()
            )));
        }
        Ket::new(vec![-self.amps[1].conj(), self.amps[0].conj()])
    }
}

/// Maximally entangled ket `sum_i |ii> / sqrt(d)` on `C^d x C^d`.
pub fn maximally_entangled(d: usize) -> Ket {
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    let w = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        amps[i * d + i] = C64::new(w, 0.0);
    }
    Ket { amps }
}

/// Schmidt-diagonal two-qubit ket `cos(t)|00> + sin(t)|11>`.
pub fn schmidt_diagonal_qubit(t: f64) -> Ket {
    let mut amps = vec![C64::new(0.0, 0.0); 4];
    amps[0] = C64::new(t.cos(), 0.0);
    amps[3] = C64::new(t.sin(), 0.0);
    Ket { amps }
}

/// Modified Gram-Schmidt orthonormalization; errors if the input is
/// numerically rank-deficient.
pub fn gram_schmidt(vectors: &[Vec<C64>]) -> Result<Vec<Vec<C64>>> {
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for b in &basis {
            let proj: C64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= proj * bi;
            }
        }
        let norm = w.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::DimensionMismatch(
                "vectors are linearly dependent".into(),
            ));
        }
        for wi in w.iter_mut() {
            *wi /= norm;
        }
        basis.push(w);
    }
    Ok(basis)
}
