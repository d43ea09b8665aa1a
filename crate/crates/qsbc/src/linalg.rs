//! Dense complex-matrix kernel: tensor products, Hermitian eigendecomposition,
//! SVD, PSD square roots, polar factors, trace norm/distance, and fidelity.
//!
//! Everything downstream (evidence operators, the purification attack, the
//! optimal-measurement advantage) reduces to these operations. Matrices are
//! stored row-major as flat [`C64`] vectors and are immutable in spirit:
//! every operation returns a fresh matrix, so values can be shared freely
//! across threads.
//!
//! Dimensions stay small (at most 2¹⁰–2¹² for the largest sweeps), so dense
//! O(d³) decompositions — delegated to `nalgebra` behind this module's own
//! types — are both fast enough and numerically transparent.
//!
//! # Tolerance ladder
//!
//! * [`TOL_INPUT`] (1e-12) — conjugate-symmetry validation on inputs.
//! * [`TOL_DECOMP`] (1e-9) — decomposition residuals (orthonormality,
//!   sorted-spectrum reconstruction).
//! * [`TOL_RECON`] (1e-8) — looser reconstruction checks (e.g. squaring a
//!   matrix square root).
//! * [`EIG_CLAMP`] (1e-10) — eigenvalues of nominally-PSD matrices in
//!   [−1e-10, 0) are clamped to 0; anything below −1e-10 is rejected as not
//!   positive semidefinite.

use nalgebra::DMatrix;
use num_complex::Complex;
use thiserror::Error;

/// Double-precision complex scalar used throughout the crate.
pub type C64 = Complex<f64>;

/// Conjugate-symmetry tolerance for Hermitian input validation.
pub const TOL_INPUT: f64 = 1e-12;
/// Accepted residual for decompositions (orthonormality, reconstruction).
pub const TOL_DECOMP: f64 = 1e-9;
/// Accepted residual for second-order reconstructions (e.g. √p·√p = p).
pub const TOL_RECON: f64 = 1e-8;
/// Eigenvalues of nominally-PSD inputs in [−EIG_CLAMP, 0) are clamped to 0.
pub const EIG_CLAMP: f64 = 1e-10;

/// Errors surfaced by the matrix kernel.
#[derive(Debug, Error)]
pub enum LinalgError {
    /// A Hermitian-only operation received a matrix whose conjugate-transpose
    /// asymmetry exceeds [`TOL_INPUT`] (or a non-square matrix).
    #[error("matrix is not Hermitian (max |A - A†| entry = {max_asymmetry:.3e})")]
    NotHermitian { max_asymmetry: f64 },
    /// Operand shapes are incompatible.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },
    /// A nominally positive-semidefinite matrix has an eigenvalue below
    /// −[`EIG_CLAMP`].
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPSD { eigenvalue: f64 },
    /// An entry vector of the wrong length was supplied for the given shape.
    #[error("entry count {got} does not match {rows}x{cols}")]
    BadEntryCount {
        rows: usize,
        cols: usize,
        got: usize,
    },
}

/// Dense complex matrix, row-major storage.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i * self.cols + j]
    }
}

impl ComplexMatrix {
    /// Build a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::BadEntryCount {
                rows,
                cols,
                got: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Build a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self, LinalgError> {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&x| C64::new(x, 0.0)).collect(),
        )
    }

    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![C64::ZERO; rows * cols],
        }
    }

    /// Identity matrix.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = C64::ONE;
        }
        m
    }

    /// Build entrywise from a closure over (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    /// Outer product |u⟩⟨v| of two coefficient vectors (column u times row v†).
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// Validate conjugate symmetry at [`TOL_INPUT`] and return the matrix.
    pub fn hermitian(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self, LinalgError> {
        let m = Self::new(rows, cols, entries)?;
        m.check_hermitian()?;
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row-major entry slice.
    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    /// Largest |A − A†| entry; 0 for the empty matrix.
    pub fn hermitian_asymmetry(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    fn check_hermitian(&self) -> Result<(), LinalgError> {
        let asym = self.hermitian_asymmetry();
        if asym > TOL_INPUT {
            return Err(LinalgError::NotHermitian {
                max_asymmetry: asym,
            });
        }
        Ok(())
    }

    /// Conjugate transpose A†.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Matrix product A·B.
    pub fn mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                left: format!("{}x{}", self.rows, self.cols),
                right: format!("{}x{}", other.rows, other.cols),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Matrix–vector product A·v.
    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>, LinalgError> {
        if self.cols != v.len() {
            return Err(LinalgError::DimensionMismatch {
                left: format!("{}x{}", self.rows, self.cols),
                right: format!("len {}", v.len()),
            });
        }
        let mut out = vec![C64::ZERO; self.rows];
        for i in 0..self.rows {
            let mut acc = C64::ZERO;
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Entrywise sum A + B.
    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Entrywise difference A − B.
    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                left: format!("{}x{}", self.rows, self.cols),
                right: format!("{}x{}", other.rows, other.cols),
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Scalar multiple c·A.
    pub fn scale(&self, c: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&x| c * x).collect(),
        }
    }

    /// Matrix trace (square matrices).
    pub fn trace(&self) -> C64 {
        debug_assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus (max norm).
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Column `j` as a coefficient vector.
    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Largest |U†U − I| entry — 0 means the columns are orthonormal.
    pub fn unitarity_residual(&self) -> f64 {
        let gram = self
            .dagger()
            .mul(self)
            .expect("shapes agree by construction");
        gram.sub(&Self::identity(self.cols))
            .expect("square")
            .max_abs()
    }

    fn to_na(&self) -> DMatrix<C64> {
        DMatrix::from_row_iterator(self.rows, self.cols, self.entries.iter().copied())
    }
}

/// Kronecker (tensor) product A ⊗ B.
///
/// Entry ((i·B.rows + k), (j·B.cols + l)) equals A[i,j]·B[k,l], so for square
/// operators the first factor acts on the most significant qubits.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            if aij == C64::ZERO {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence of factors, left to right.
pub fn tensor_all(factors: &[ComplexMatrix]) -> ComplexMatrix {
    let mut acc = ComplexMatrix::identity(1);
    for f in factors {
        acc = tensor(&acc, f);
    }
    acc
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    /// Real eigenvalues, sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose k-th column is the eigenvector of eigenvalue k.
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    /// Rebuild V·Λ·V†.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let dim = v.rows();
        ComplexMatrix::from_fn(dim, dim, |i, j| {
            (0..dim)
                .map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)].conj())
                .sum()
        })
    }

    /// Apply a real function to the spectrum and rebuild V·f(Λ)·V†.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let mapped = Self {
            eigenvalues: self.eigenvalues.iter().map(|&x| f(x)).collect(),
            eigenvectors: self.eigenvectors.clone(),
        };
        mapped.reconstruct()
    }
}

/// Hermitian eigendecomposition with eigenvalues sorted descending.
///
/// Validates conjugate symmetry at [`TOL_INPUT`] and the reconstruction
/// residual at [`TOL_DECOMP`] before returning.
pub fn eigh(h: &ComplexMatrix) -> Result<SpectralDecomposition, LinalgError> {
    h.check_hermitian()?;
    let se = h.to_na().symmetric_eigen();
    let dim = h.rows;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[b]
            .partial_cmp(&se.eigenvalues[a])
            .expect("finite eigenvalues")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(dim, dim, |i, j| se.eigenvectors[(i, order[j])]);
    let decomp = SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    };
    let residual = decomp.reconstruct().sub(h)?.max_abs();
    debug_assert!(
        residual <= TOL_DECOMP,
        "eigendecomposition residual {residual:.3e} exceeds {TOL_DECOMP:.0e}"
    );
    Ok(decomp)
}

/// Trace norm Tr|A| of a Hermitian matrix: the sum of absolute eigenvalues.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64, LinalgError> {
    Ok(eigh(a)?.eigenvalues.iter().map(|x| x.abs()).sum())
}

/// Trace distance ½·Tr|P − Q| between two density operators.
///
/// Callers are expected to pass valid density operators (trace 1, PSD);
/// Hermitian symmetry and matching dimensions are validated here, the rest
/// is the constructing module's contract. The result lies in [0, 1] for
/// genuine density operators.
pub fn trace_distance(p: &ComplexMatrix, q: &ComplexMatrix) -> Result<f64, LinalgError> {
    if p.rows != q.rows || p.cols != q.cols {
        return Err(LinalgError::DimensionMismatch {
            left: format!("{}x{}", p.rows, p.cols),
            right: format!("{}x{}", q.rows, q.cols),
        });
    }
    debug_assert!((p.trace().re - 1.0).abs() < 1e-9 && (q.trace().re - 1.0).abs() < 1e-9);
    Ok(0.5 * trace_norm(&p.sub(q)?)?)
}

/// Hermitian PSD square root via the spectral decomposition.
///
/// Eigenvalues in [−[`EIG_CLAMP`], 0) are treated as rounding noise and
/// clamped to zero; anything lower fails with [`LinalgError::NotPSD`].
pub fn sqrt_psd(p: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let decomp = eigh(p)?;
    if let Some(&bad) = decomp.eigenvalues.iter().find(|&&x| x < -EIG_CLAMP) {
        return Err(LinalgError::NotPSD { eigenvalue: bad });
    }
    Ok(decomp.map_eigenvalues(|x| x.max(0.0).sqrt()))
}

/// Singular value decomposition a = u·diag(d)·v.
///
/// `v` is the right factor as multiplied (its *rows* are the right singular
/// vectors' conjugates), so reconstruction is a plain triple product. For a
/// square input both factors are unitary; for rectangular input they carry
/// orthonormal columns (u) and rows (v) of length min(rows, cols).
#[derive(Clone, Debug)]
pub struct SingularValueDecomposition {
    pub u: ComplexMatrix,
    /// Non-negative singular values, sorted descending.
    pub d: Vec<f64>,
    pub v: ComplexMatrix,
}

impl SingularValueDecomposition {
    /// Rebuild u·diag(d)·v.
    pub fn reconstruct(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.u.rows(), self.v.cols(), |i, j| {
            (0..self.d.len())
                .map(|k| self.u[(i, k)] * self.d[k] * self.v[(k, j)])
                .sum()
        })
    }
}

/// Singular value decomposition with singular values sorted descending.
pub fn svd(a: &ComplexMatrix) -> SingularValueDecomposition {
    let na_svd = a.to_na().svd(true, true);
    let u_na = na_svd.u.expect("requested U");
    let vt_na = na_svd.v_t.expect("requested V^H");
    let r = na_svd.singular_values.len();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&x, &y| {
        na_svd.singular_values[y]
            .partial_cmp(&na_svd.singular_values[x])
            .expect("finite singular values")
    });
    let d: Vec<f64> = order.iter().map(|&k| na_svd.singular_values[k]).collect();
    let u = ComplexMatrix::from_fn(u_na.nrows(), r, |i, j| u_na[(i, order[j])]);
    let v = ComplexMatrix::from_fn(r, vt_na.ncols(), |i, j| vt_na[(order[i], j)]);
    let out = SingularValueDecomposition { u, d, v };
    debug_assert!(
        out.reconstruct()
            .sub(a)
            .map(|m| m.max_abs())
            .unwrap_or(f64::INFINITY)
            <= TOL_DECOMP,
        "SVD reconstruction residual exceeds {TOL_DECOMP:.0e}"
    );
    out
}

/// Left polar decomposition a = modulus·phase with modulus = |a| = √(a·a†)
/// Hermitian PSD and phase unitary.
///
/// Built from the SVD a = UΣV: modulus = UΣU†, phase = UV. The phase factor
/// is a product of unitaries, so it is unitary on all of the space — the
/// kernel of |a| is carried along automatically.
pub fn polar_left(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix), LinalgError> {
    if a.rows != a.cols {
        return Err(LinalgError::DimensionMismatch {
            left: format!("{}x{}", a.rows, a.cols),
            right: "square matrix required".into(),
        });
    }
    let dec = svd(a);
    let dim = a.rows;
    let modulus = ComplexMatrix::from_fn(dim, dim, |i, j| {
        (0..dim)
            .map(|k| dec.u[(i, k)] * dec.d[k] * dec.u[(j, k)].conj())
            .sum()
    });
    let phase = dec.u.mul(&dec.v)?;
    Ok((modulus, phase))
}

/// Fidelity F(p, q) = Tr|√p·√q| between two density operators.
///
/// Equals 1 exactly when p = q and 0 for orthogonally-supported states; by
/// Uhlmann's theorem it is the largest overlap achievable between
/// purifications of p and q under local unitaries.
pub fn fidelity(p: &ComplexMatrix, q: &ComplexMatrix) -> Result<f64, LinalgError> {
    if p.rows != q.rows || p.cols != q.cols {
        return Err(LinalgError::DimensionMismatch {
            left: format!("{}x{}", p.rows, p.cols),
            right: format!("{}x{}", q.rows, q.cols),
        });
    }
    let m = sqrt_psd(p)?.mul(&sqrt_psd(q)?)?;
    // Tr|M| for non-Hermitian M is the sum of singular values.
    Ok(svd(&m).d.iter().sum())
}

/// Extend a d×r matrix with orthonormal columns to a full d×d unitary.
///
/// Candidates are drawn deterministically from the standard basis and
/// orthogonalised twice (modified Gram–Schmidt) against everything kept so
/// far; near-dependent candidates are skipped. The input columns are
/// preserved verbatim as the first r columns.
pub fn complete_orthonormal(m: &ComplexMatrix) -> ComplexMatrix {
    let d = m.rows();
    let r = m.cols();
    debug_assert!(r <= d);
    let mut cols: Vec<Vec<C64>> = (0..r).map(|j| m.column(j)).collect();
    let mut candidate = 0usize;
    while cols.len() < d && candidate < d {
        let mut v = vec![C64::ZERO; d];
        v[candidate] = C64::ONE;
        candidate += 1;
        for _pass in 0..2 {
            for c in &cols {
                let overlap: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= overlap * ci;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for z in &mut v {
                *z /= norm;
            }
            cols.push(v);
        }
    }
    assert_eq!(cols.len(), d, "failed to complete an orthonormal basis");
    ComplexMatrix::from_fn(d, d, |i, j| cols[j][i])
}
