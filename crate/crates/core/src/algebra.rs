//! Finite-dimensional algebras and their elements.
//!
//! An algebra is either a direct sum of full matrix blocks `⊕ M_{d_i}`
//! (always unital, the C*-algebra case) or the nilpotent algebra of strictly
//! upper-triangular `m × m` matrices, for which the product of any `m`
//! elements vanishes identically. Elements carry their descriptor and a
//! dense complex matrix constrained to the descriptor's support pattern.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ONE, ZERO};
use crate::rel_scale;

pub use crate::linalg::{CMatrix, Complex64};

/// Shape of a finite-dimensional algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlgebraDescriptor {
    /// `⊕_i M_{d_i}` represented as block-diagonal matrices of total
    /// dimension `Σ d_i`. Unital, with unit the identity matrix.
    DirectSum { blocks: Vec<usize> },
    /// Strictly upper-triangular `size × size` matrices. Nonunital; the
    /// product of any `size` elements is exactly zero.
    Nilpotent { size: usize },
}

impl AlgebraDescriptor {
    pub fn direct_sum(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() || blocks.iter().any(|&b| b == 0) {
            return Err(Error::ShapeMismatch {
                context: "direct sum needs nonempty positive block sizes".into(),
            });
        }
        Ok(AlgebraDescriptor::DirectSum { blocks })
    }

    pub fn full_matrix(dim: usize) -> Result<Self> {
        Self::direct_sum(vec![dim])
    }

    pub fn nilpotent(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::ShapeMismatch {
                context: "nilpotent algebra needs positive size".into(),
            });
        }
        Ok(AlgebraDescriptor::Nilpotent { size })
    }

    /// Ambient matrix dimension.
    pub fn dim(&self) -> usize {
        match self {
            AlgebraDescriptor::DirectSum { blocks } => blocks.iter().sum(),
            AlgebraDescriptor::Nilpotent { size } => *size,
        }
    }

    pub fn is_unital(&self) -> bool {
        matches!(self, AlgebraDescriptor::DirectSum { .. })
    }

    /// `(offset, size)` of each direct summand; a single pseudo-block for
    /// the nilpotent case.
    pub fn block_ranges(&self) -> Vec<(usize, usize)> {
        match self {
            AlgebraDescriptor::DirectSum { blocks } => {
                let mut out = Vec::with_capacity(blocks.len());
                let mut offset = 0;
                for &b in blocks {
                    out.push((offset, b));
                    offset += b;
                }
                out
            }
            AlgebraDescriptor::Nilpotent { size } => vec![(0, *size)],
        }
    }

    /// Whether coordinate `(row, col)` lies in the algebra's support.
    pub fn supports(&self, row: usize, col: usize) -> bool {
        match self {
            AlgebraDescriptor::DirectSum { .. } => self
                .block_ranges()
                .iter()
                .any(|&(o, s)| row >= o && row < o + s && col >= o && col < o + s),
            AlgebraDescriptor::Nilpotent { .. } => row < col,
        }
    }

    /// Canonical ordered basis of matrix units spanning the algebra:
    /// block by block in row-major order for direct sums, row-major
    /// strictly-upper coordinates for the nilpotent case.
    pub fn basis_indices(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        match self {
            AlgebraDescriptor::DirectSum { .. } => {
                for (o, s) in self.block_ranges() {
                    for r in o..o + s {
                        for c in o..o + s {
                            out.push((r, c));
                        }
                    }
                }
            }
            AlgebraDescriptor::Nilpotent { size } => {
                for r in 0..*size {
                    for c in r + 1..*size {
                        out.push((r, c));
                    }
                }
            }
        }
        out
    }

    /// Matrix unit `E_{rc}` in the ambient dimension.
    pub fn unit_matrix(&self, row: usize, col: usize) -> CMatrix {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        m[(row, col)] = ONE;
        m
    }

    /// The multiplicative unit. Errors for nilpotent algebras.
    pub fn unit(&self) -> Result<CMatrix> {
        if self.is_unital() {
            Ok(CMatrix::identity(self.dim(), self.dim()))
        } else {
            Err(Error::NonUnitalAlgebra)
        }
    }

    /// Largest off-support entry modulus of `m`.
    pub fn support_defect(&self, m: &CMatrix) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in 0..d {
                if !self.supports(r, c) {
                    worst = worst.max(m[(r, c)].norm());
                }
            }
        }
        worst
    }

    /// Copy of `m` with off-support entries zeroed.
    pub fn project_support(&self, m: &CMatrix) -> CMatrix {
        let d = self.dim();
        CMatrix::from_fn(d, d, |r, c| if self.supports(r, c) { m[(r, c)] } else { ZERO })
    }
}

impl std::fmt::Display for AlgebraDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AlgebraDescriptor::DirectSum { blocks } => {
                let parts: Vec<String> = blocks.iter().map(|b| format!("M{b}")).collect();
                write!(f, "{}", parts.join("⊕"))
            }
            AlgebraDescriptor::Nilpotent { size } => write!(f, "N{size}"),
        }
    }
}

/// A matrix tagged with the algebra it lives in.
///
/// The support invariant (block-diagonal for direct sums, strictly upper
/// triangular for nilpotent algebras) is enforced at the construction
/// boundary. Operations such as [`AlgebraElement::adjoint`] on nilpotent
/// elements legitimately leave the algebra; they keep the descriptor tag
/// and the caller can interrogate [`AlgebraElement::support_defect`].
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    algebra: AlgebraDescriptor,
    matrix: CMatrix,
}

impl AlgebraElement {
    /// Strict constructor: the matrix must be square of the right
    /// dimension, with finite entries and exact zeros off support.
    pub fn new(algebra: AlgebraDescriptor, matrix: CMatrix) -> Result<Self> {
        let d = algebra.dim();
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.nrows() != d {
            return Err(Error::ShapeMismatch {
                context: format!("matrix is {}x{} but algebra {algebra} has dim {d}", matrix.nrows(), matrix.ncols()),
            });
        }
        for r in 0..d {
            for c in 0..d {
                let z = matrix[(r, c)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: r, col: c });
                }
                if !algebra.supports(r, c) && z != ZERO {
                    return Err(Error::SupportViolation {
                        row: r,
                        col: c,
                        magnitude: z.norm(),
                    });
                }
            }
        }
        Ok(AlgebraElement { algebra, matrix })
    }

    /// Constructor that tolerates off-support noise up to
    /// `1e-12 · max(1, max-entry)` and projects it away; anything louder is
    /// a [`Error::SupportViolation`].
    pub fn from_ambient(algebra: AlgebraDescriptor, matrix: CMatrix) -> Result<Self> {
        let scale = matrix.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        let defect = algebra.support_defect(&matrix);
        if defect > 1e-12 * rel_scale(scale) {
            let d = algebra.dim();
            for r in 0..d {
                for c in 0..d {
                    if !algebra.supports(r, c) && matrix[(r, c)].norm() >= defect {
                        return Err(Error::SupportViolation {
                            row: r,
                            col: c,
                            magnitude: defect,
                        });
                    }
                }
            }
        }
        let projected = algebra.project_support(&matrix);
        Self::new(algebra, projected)
    }

    pub(crate) fn new_unchecked(algebra: AlgebraDescriptor, matrix: CMatrix) -> Self {
        AlgebraElement { algebra, matrix }
    }

    pub fn zero(algebra: AlgebraDescriptor) -> Self {
        let d = algebra.dim();
        AlgebraElement {
            matrix: CMatrix::zeros(d, d),
            algebra,
        }
    }

    pub fn unit(algebra: AlgebraDescriptor) -> Result<Self> {
        let u = algebra.unit()?;
        Ok(AlgebraElement { algebra, matrix: u })
    }

    pub fn algebra(&self) -> &AlgebraDescriptor {
        &self.algebra
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn support_defect(&self) -> f64 {
        self.algebra.support_defect(&self.matrix)
    }

    /// Conjugate transpose. An involution: `a.adjoint().adjoint() == a`.
    pub fn adjoint(&self) -> AlgebraElement {
        AlgebraElement {
            algebra: self.algebra.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// Largest singular value; satisfies the C*-identity
    /// `‖a*a‖ = ‖a‖²` up to roundoff.
    pub fn operator_norm(&self) -> f64 {
        linalg::operator_norm(&self.matrix)
    }

    /// Eigenvalues with algebraic multiplicity, lexicographically sorted.
    ///
    /// Hermitian elements are detected at the default tolerance and routed
    /// to the symmetric solver. Elements of a nilpotent algebra are
    /// strictly triangular, so their spectrum (computed in the unitization)
    /// is exactly `{0}` with multiplicity `size`.
    pub fn spectrum(&self) -> Result<Vec<Complex64>> {
        match &self.algebra {
            AlgebraDescriptor::Nilpotent { size } => Ok(vec![ZERO; *size]),
            AlgebraDescriptor::DirectSum { .. } => {
                let mut all = Vec::with_capacity(self.dim());
                for (o, s) in self.algebra.block_ranges() {
                    let block = self.matrix.view((o, o), (s, s)).into_owned();
                    all.extend(linalg::eigenvalues(&block, crate::DEFAULT_TOL)?);
                }
                linalg::sort_complex(&mut all);
                Ok(all)
            }
        }
    }

    /// Self-adjointness within `tol · max(1, ‖a‖)`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        linalg::is_hermitian(&self.matrix, tol)
    }

    /// Positive semidefiniteness test: Hermitian within tolerance and the
    /// Hermitian part has minimum eigenvalue `≥ −tol · max(1, ‖a‖)`.
    pub fn is_positive(&self, tol: f64) -> bool {
        let scale = rel_scale(self.operator_norm());
        if linalg::hermiticity_defect(&self.matrix) > tol * scale {
            return false;
        }
        let min = linalg::hermitian_eigenvalues(&self.matrix)
            .first()
            .copied()
            .unwrap_or(0.0);
        min >= -tol * scale
    }

    /// Map each diagonal block through `f`, keeping the block structure.
    /// Decompositions that must stay inside the algebra (polar factors,
    /// PSD roots) go through here so numerically degenerate singular
    /// subspaces cannot rotate across blocks.
    pub fn map_blocks(&self, mut f: impl FnMut(&CMatrix) -> CMatrix) -> AlgebraElement {
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for (o, s) in self.algebra.block_ranges() {
            let block = self.matrix.view((o, o), (s, s)).into_owned();
            let img = f(&block);
            out.view_mut((o, o), (s, s)).copy_from(&img);
        }
        AlgebraElement {
            algebra: self.algebra.clone(),
            matrix: out,
        }
    }
}

impl std::ops::Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.algebra, rhs.algebra, "algebra mismatch");
        AlgebraElement {
            algebra: self.algebra.clone(),
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl std::ops::Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.algebra, rhs.algebra, "algebra mismatch");
        AlgebraElement {
            algebra: self.algebra.clone(),
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl std::ops::Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.algebra, rhs.algebra, "algebra mismatch");
        AlgebraElement {
            algebra: self.algebra.clone(),
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

/// How [`factor`] splits an element into `k` factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorMode {
    /// `(a, 1, 1, …, 1)` — exact, always available on unital algebras.
    Trivial,
    /// `(1, …, 1, a)` — exact, a second distinct factorization.
    Reversed,
    /// Balanced factorization from the polar decomposition
    /// `a = u·p`: `(u·p^{1/k}, p^{1/k}, …, p^{1/k})`. Exact for invertible
    /// `a` up to roundoff.
    Polar,
}

/// Factor `a` into `k` elements whose ordered product is `a`.
pub fn factor(a: &AlgebraElement, k: u32, mode: FactorMode) -> Result<Vec<AlgebraElement>> {
    if !a.algebra().is_unital() {
        return Err(Error::NonUnitalAlgebra);
    }
    if k == 0 {
        return Err(Error::ShapeMismatch {
            context: "factor needs k >= 1".into(),
        });
    }
    let unit = AlgebraElement::unit(a.algebra().clone())?;
    let k = k as usize;
    match mode {
        FactorMode::Trivial => {
            let mut out = vec![a.clone()];
            out.extend(std::iter::repeat_with(|| unit.clone()).take(k - 1));
            Ok(out)
        }
        FactorMode::Reversed => {
            let mut out: Vec<AlgebraElement> =
                std::iter::repeat_with(|| unit.clone()).take(k - 1).collect();
            out.push(a.clone());
            Ok(out)
        }
        FactorMode::Polar => {
            if k == 1 {
                return Ok(vec![a.clone()]);
            }
            // Blockwise polar keeps the factors inside the algebra.
            let mut first = a.clone();
            let mut root = a.clone();
            let kk = k as u32;
            first = first.map_blocks(|b| {
                let (u, p) = linalg::polar(b);
                &u * linalg::psd_root(&p, kk)
            });
            root = root.map_blocks(|b| {
                let (_, p) = linalg::polar(b);
                linalg::psd_root(&p, kk)
            });
            let mut out = vec![first];
            out.extend(std::iter::repeat_with(|| root.clone()).take(k - 1));
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn m2() -> AlgebraDescriptor {
        AlgebraDescriptor::full_matrix(2).unwrap()
    }

    #[test]
    fn identity_is_self_adjoint() {
        let a = AlgebraElement::unit(AlgebraDescriptor::full_matrix(3).unwrap()).unwrap();
        assert_eq!(a.adjoint(), a);
    }

    #[test]
    fn adjoint_transposes_real_matrices() {
        let m = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        let a = AlgebraElement::new(m2(), m).unwrap();
        let expect = CMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO]);
        assert_eq!(a.adjoint().matrix(), &expect);
    }

    #[test]
    fn operator_norm_examples() {
        let zero = AlgebraElement::zero(m2());
        assert_eq!(zero.operator_norm(), 0.0);
        let m = CMatrix::from_row_slice(2, 2, &[c(3.0, 0.0), ZERO, ZERO, c(0.0, -4.0)]);
        let a = AlgebraElement::new(m2(), m).unwrap();
        assert!((a.operator_norm() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn spectrum_of_diagonal() {
        let d3 = AlgebraDescriptor::full_matrix(3).unwrap();
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(-1.0, 0.0),
            ZERO,
        ]));
        let a = AlgebraElement::new(d3, m).unwrap();
        let s = a.spectrum().unwrap();
        assert_eq!(s, vec![c(-1.0, 0.0), ZERO, c(1.0, 0.0)]);
    }

    #[test]
    fn spectrum_of_nilpotent_is_zero() {
        let alg = AlgebraDescriptor::nilpotent(2).unwrap();
        let m = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        let a = AlgebraElement::new(alg, m).unwrap();
        assert_eq!(a.spectrum().unwrap(), vec![ZERO, ZERO]);
    }

    #[test]
    fn is_positive_examples() {
        let d2 = m2();
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), ZERO, ZERO, c(-1.0, 0.0)]);
        assert!(!AlgebraElement::new(d2.clone(), m).unwrap().is_positive(1e-9));
        let m = CMatrix::from_row_slice(2, 2, &[c(-1e-14, 0.0), ZERO, ZERO, c(1.0, 0.0)]);
        assert!(AlgebraElement::new(d2, m).unwrap().is_positive(1e-9));
    }

    #[test]
    fn support_enforced_for_direct_sums() {
        let alg = AlgebraDescriptor::direct_sum(vec![1, 1]).unwrap();
        let m = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(
            AlgebraElement::new(alg, m),
            Err(Error::SupportViolation { row: 0, col: 1, .. })
        ));
    }

    #[test]
    fn factor_trivial_multiplies_back() {
        let d3 = AlgebraDescriptor::full_matrix(3).unwrap();
        let a = AlgebraElement::unit(d3).unwrap();
        let fs = factor(&a, 4, FactorMode::Trivial).unwrap();
        assert_eq!(fs.len(), 4);
        let prod = fs.iter().skip(1).fold(fs[0].clone(), |acc, f| &acc * f);
        assert_eq!(prod.matrix(), a.matrix());
    }

    #[test]
    fn factor_rejects_nilpotent() {
        let alg = AlgebraDescriptor::nilpotent(3).unwrap();
        let a = AlgebraElement::zero(alg);
        assert!(matches!(
            factor(&a, 2, FactorMode::Trivial),
            Err(Error::NonUnitalAlgebra)
        ));
    }
}
