//! Spectral theory of n-potents (`e^n = e`).
//!
//! The n roots of `x^n = x` are `0` together with the (n−1)-th roots of
//! unity. Lagrange interpolation at those roots produces idempotent-valued
//! polynomials, which turn any n-potent into an n-partition of unity and
//! reconstruct it as a root-weighted sum of the partition.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::algebra::{AlgebraDescriptor, AlgebraElement, CMatrix, Complex64};
use crate::error::{Error, Result};
use crate::linalg::{self, ONE, ZERO};
use crate::rel_scale;

/// The ordered roots `Σ_n = (ω_0, …, ω_{n−1})` of `x^n = x`:
/// `ω_0 = 0` and `ω_k = exp(2πi(k−1)/(n−1))` for `1 ≤ k ≤ n−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    n: u32,
    roots: Vec<Complex64>,
}

impl RootSet {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn omega(&self, k: usize) -> Complex64 {
        self.roots[k]
    }

    /// The real roots among `Σ_n`: `{0, 1}` for even n, `{−1, 0, 1}` for
    /// odd n.
    pub fn real_roots(&self) -> Vec<f64> {
        self.roots
            .iter()
            .filter(|z| z.im == 0.0)
            .map(|z| z.re)
            .collect()
    }
}

/// Construct `Σ_n`. Quarter-turn angles are emitted exactly, so
/// `Σ_3 = (0, 1, −1)` and `Σ_5 = (0, 1, i, −1, −i)` hold without roundoff.
pub fn roots_sigma(n: u32) -> Result<RootSet> {
    if n < 2 {
        return Err(Error::InvalidN { n: i64::from(n) });
    }
    let m = n - 1;
    let mut roots = Vec::with_capacity(n as usize);
    roots.push(ZERO);
    for k in 0..m {
        // angle 2πk/m; snap the four axis points
        let r = if (4 * k) % m == 0 {
            match (4 * k / m) % 4 {
                0 => ONE,
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            }
        } else {
            let theta = 2.0 * std::f64::consts::PI * f64::from(k) / f64::from(m);
            Complex64::new(theta.cos(), theta.sin())
        };
        roots.push(r);
    }
    Ok(RootSet { n, roots })
}

/// Coefficients (ascending degree, length n) of the Lagrange polynomial
/// `p_k` on `Σ_n`: `p_k(ω_k) = 1`, `p_k(ω_j) = 0` for `j ≠ k`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationPolynomial {
    n: u32,
    k: usize,
    coefficients: Vec<Complex64>,
}

impl InterpolationPolynomial {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn index(&self) -> usize {
        self.k
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Horner evaluation at a scalar.
    pub fn eval(&self, x: Complex64) -> Complex64 {
        let mut acc = ZERO;
        for c in self.coefficients.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Horner evaluation at a matrix argument: O(n) matrix multiplies, no
    /// diagonalization.
    pub fn eval_matrix(&self, m: &CMatrix) -> CMatrix {
        let d = m.nrows();
        let id = CMatrix::identity(d, d);
        let mut acc = CMatrix::zeros(d, d);
        for c in self.coefficients.iter().rev() {
            acc = &acc * m + &id * *c;
        }
        acc
    }
}

fn polynomial_cache() -> &'static RwLock<HashMap<(u32, usize), Arc<InterpolationPolynomial>>> {
    static CACHE: OnceLock<RwLock<HashMap<(u32, usize), Arc<InterpolationPolynomial>>>> =
        OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The Lagrange polynomial `p_k` on `Σ_n`, computed by expanding the
/// product formula and cached per `(n, k)`.
pub fn lagrange_polynomial(n: u32, k: usize) -> Result<Arc<InterpolationPolynomial>> {
    if n < 2 {
        return Err(Error::InvalidN { n: i64::from(n) });
    }
    if k >= n as usize {
        return Err(Error::IndexOutOfRange { k, n });
    }
    if let Some(p) = polynomial_cache().read().unwrap().get(&(n, k)) {
        return Ok(Arc::clone(p));
    }
    let sigma = roots_sigma(n)?;
    let omega_k = sigma.omega(k);
    // numerator ∏_{j≠k} (x − ω_j)
    let mut coeffs: Vec<Complex64> = vec![ONE];
    let mut denom = ONE;
    for (j, &omega_j) in sigma.roots().iter().enumerate() {
        if j == k {
            continue;
        }
        let mut next = vec![ZERO; coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= omega_j * c;
        }
        coeffs = next;
        denom *= omega_k - omega_j;
    }
    for c in &mut coeffs {
        *c /= denom;
    }
    let poly = Arc::new(InterpolationPolynomial {
        n,
        k,
        coefficients: coeffs,
    });
    polynomial_cache()
        .write()
        .unwrap()
        .insert((n, k), Arc::clone(&poly));
    Ok(poly)
}

/// `‖e^n − e‖ ≤ tol · max(1, ‖e‖^n)`.
pub fn is_npotent(e: &AlgebraElement, n: u32, tol: f64) -> Result<bool> {
    Ok(npotency_defect(e, n)? <= tol * rel_scale(e.operator_norm().powi(n as i32)))
}

/// Raw defect `‖e^n − e‖`.
pub fn npotency_defect(e: &AlgebraElement, n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidN { n: i64::from(n) });
    }
    let p = linalg::power(e.matrix(), n);
    Ok(linalg::operator_norm(&(p - e.matrix())))
}

/// Residuals achieved by a constructed [`NPartition`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PartitionResiduals {
    /// `max_k ‖e_k² − e_k‖`
    pub idempotency: f64,
    /// `max_{j≠k} ‖e_j e_k‖`
    pub orthogonality: f64,
    /// `‖Σ_k e_k − 1‖`
    pub sum_to_unit: f64,
    /// `‖Σ_{k≥1} ω_k e_k − e‖`
    pub reconstruction: f64,
}

impl PartitionResiduals {
    pub fn worst(&self) -> f64 {
        self.idempotency
            .max(self.orthogonality)
            .max(self.sum_to_unit)
            .max(self.reconstruction)
    }
}

/// An ordered n-partition of unity `(e_0, …, e_{n−1})`: idempotents,
/// pairwise orthogonal, summing to the unit.
///
/// Constructed partitions are not re-projected to exact idempotents; the
/// achieved residuals are part of the value.
#[derive(Debug, Clone)]
pub struct NPartition {
    n: u32,
    idempotents: Vec<AlgebraElement>,
    residuals: PartitionResiduals,
}

impl NPartition {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn idempotents(&self) -> &[AlgebraElement] {
        &self.idempotents
    }

    pub fn residuals(&self) -> &PartitionResiduals {
        &self.residuals
    }

    /// `Σ_{k≥1} ω_k e_k`, which reconstructs the generating n-potent.
    pub fn weighted_sum(&self) -> Result<AlgebraElement> {
        let sigma = roots_sigma(self.n)?;
        let alg = self.idempotents[0].algebra().clone();
        let d = alg.dim();
        let mut acc = CMatrix::zeros(d, d);
        for (k, e) in self.idempotents.iter().enumerate().skip(1) {
            acc += e.matrix() * sigma.omega(k);
        }
        Ok(AlgebraElement::new_unchecked(alg, acc))
    }
}

/// Ambient algebra in which a partition lives: the algebra itself when
/// unital, the full matrix algebra on the same space (the unitization
/// model) otherwise.
fn partition_ambient(algebra: &AlgebraDescriptor) -> Result<AlgebraDescriptor> {
    match algebra {
        AlgebraDescriptor::DirectSum { .. } => Ok(algebra.clone()),
        AlgebraDescriptor::Nilpotent { size } => AlgebraDescriptor::full_matrix(*size),
    }
}

/// Decompose an n-potent into its n-partition of unity, `e_k = p_k(e)`.
///
/// The reconstruction `e = Σ_{k≥1} ω_k e_k` and the partition invariants
/// are verified to `tol`; failure signals an ill-conditioned input and is
/// reported as [`Error::ToleranceExceeded`] rather than silently projected.
/// For nilpotent algebras the partition lives in the unitization, modeled
/// as the full matrix algebra on the same space.
pub fn partition_of_unity(e: &AlgebraElement, n: u32, tol: f64) -> Result<NPartition> {
    let defect = npotency_defect(e, n)?;
    if defect > tol * rel_scale(e.operator_norm().powi(n as i32)) {
        return Err(Error::NotNPotent {
            n,
            residual: defect,
        });
    }
    let ambient = partition_ambient(e.algebra())?;
    let mut idempotents = Vec::with_capacity(n as usize);
    for k in 0..n as usize {
        let p = lagrange_polynomial(n, k)?;
        let ek = p.eval_matrix(e.matrix());
        idempotents.push(AlgebraElement::new_unchecked(ambient.clone(), ek));
    }

    let mut idem = 0.0f64;
    let mut orth = 0.0f64;
    for (j, ej) in idempotents.iter().enumerate() {
        let sq = ej.matrix() * ej.matrix();
        idem = idem.max(linalg::operator_norm(&(sq - ej.matrix())));
        for (k, ek) in idempotents.iter().enumerate() {
            if j != k {
                orth = orth.max(linalg::operator_norm(&(ej.matrix() * ek.matrix())));
            }
        }
    }
    let d = ambient.dim();
    let mut sum = CMatrix::zeros(d, d);
    for ek in &idempotents {
        sum += ek.matrix();
    }
    let sum_to_unit = linalg::operator_norm(&(sum - CMatrix::identity(d, d)));
    let sigma = roots_sigma(n)?;
    let mut rec = CMatrix::zeros(d, d);
    for (k, ek) in idempotents.iter().enumerate().skip(1) {
        rec += ek.matrix() * sigma.omega(k);
    }
    let reconstruction = linalg::operator_norm(&(rec - e.matrix()));

    let residuals = PartitionResiduals {
        idempotency: idem,
        orthogonality: orth,
        sum_to_unit,
        reconstruction,
    };
    let scale = rel_scale(e.operator_norm());
    if residuals.worst() > tol * scale {
        let what = if idem >= orth && idem >= sum_to_unit && idem >= reconstruction {
            "idempotency"
        } else if orth >= sum_to_unit && orth >= reconstruction {
            "orthogonality"
        } else if sum_to_unit >= reconstruction {
            "sum-to-unit"
        } else {
            "reconstruction"
        };
        return Err(Error::ToleranceExceeded {
            what: what.into(),
            residual: residuals.worst(),
        });
    }
    Ok(NPartition {
        n,
        idempotents,
        residuals,
    })
}

/// Outcome of classifying a self-adjoint n-potent.
#[derive(Debug, Clone)]
pub enum SelfAdjointClass {
    /// Even n: the element is a projection. Carries the achieved
    /// idempotency and self-adjointness residuals.
    Projection {
        e: AlgebraElement,
        idempotency: f64,
        selfadjointness: f64,
    },
    /// Odd n: `e = p1 − p2` with orthogonal projections
    /// `p1 = (e² + e)/2`, `p2 = (e² − e)/2`.
    TripotentSplit {
        p1: AlgebraElement,
        p2: AlgebraElement,
        projection_residual: f64,
        orthogonality: f64,
        reconstruction: f64,
    },
}

/// Classify a self-adjoint n-potent: a projection when n is even, a
/// difference of two orthogonal projections when n is odd.
pub fn classify_selfadjoint_npotent(
    e: &AlgebraElement,
    n: u32,
    tol: f64,
) -> Result<SelfAdjointClass> {
    let scale = rel_scale(e.operator_norm());
    let sa = linalg::hermiticity_defect(e.matrix());
    if sa > tol * scale {
        return Err(Error::NotSelfAdjoint { residual: sa });
    }
    let defect = npotency_defect(e, n)?;
    if defect > tol * rel_scale(e.operator_norm().powi(n as i32)) {
        return Err(Error::NotNPotent {
            n,
            residual: defect,
        });
    }
    if n % 2 == 0 {
        let idem = linalg::operator_norm(&(e.matrix() * e.matrix() - e.matrix()));
        if idem > tol * scale {
            return Err(Error::ToleranceExceeded {
                what: "even self-adjoint n-potent should be a projection".into(),
                residual: idem,
            });
        }
        Ok(SelfAdjointClass::Projection {
            e: e.clone(),
            idempotency: idem,
            selfadjointness: sa,
        })
    } else {
        let sq = e.matrix() * e.matrix();
        let p1 = (&sq + e.matrix()).scale(0.5);
        let p2 = (&sq - e.matrix()).scale(0.5);
        let proj = linalg::operator_norm(&(&p1 * &p1 - &p1))
            .max(linalg::operator_norm(&(&p2 * &p2 - &p2)))
            .max(linalg::hermiticity_defect(&p1))
            .max(linalg::hermiticity_defect(&p2));
        let orth = linalg::operator_norm(&(&p1 * &p2));
        let rec = linalg::operator_norm(&(&p1 - &p2 - e.matrix()));
        let worst = proj.max(orth).max(rec);
        if worst > tol * scale {
            return Err(Error::ToleranceExceeded {
                what: "odd self-adjoint n-potent split".into(),
                residual: worst,
            });
        }
        let alg = e.algebra().clone();
        Ok(SelfAdjointClass::TripotentSplit {
            p1: AlgebraElement::new_unchecked(alg.clone(), p1),
            p2: AlgebraElement::new_unchecked(alg, p2),
            projection_residual: proj,
            orthogonality: orth,
            reconstruction: rec,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn roots_for_small_n() {
        let s2 = roots_sigma(2).unwrap();
        assert_eq!(s2.roots(), &[ZERO, ONE]);
        let s3 = roots_sigma(3).unwrap();
        assert_eq!(s3.roots(), &[ZERO, ONE, c(-1.0, 0.0)]);
        let s5 = roots_sigma(5).unwrap();
        assert_eq!(
            s5.roots(),
            &[ZERO, ONE, c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]
        );
    }

    #[test]
    fn roots_satisfy_defining_equation() {
        for n in 2..=12u32 {
            let s = roots_sigma(n).unwrap();
            assert_eq!(s.roots().len(), n as usize);
            for &r in s.roots() {
                let mut p = ONE;
                for _ in 0..n {
                    p *= r;
                }
                assert!((p - r).norm() <= 1e-14, "n={n} root {r}");
            }
            // pairwise distinct
            for i in 0..s.roots().len() {
                for j in 0..i {
                    assert!((s.roots()[i] - s.roots()[j]).norm() > 1e-3);
                }
            }
        }
    }

    #[test]
    fn rejects_n_below_two() {
        assert!(matches!(roots_sigma(1), Err(Error::InvalidN { .. })));
        assert!(matches!(roots_sigma(0), Err(Error::InvalidN { .. })));
    }

    #[test]
    fn p0_is_one_minus_x_to_n_minus_1() {
        for n in 2..=8u32 {
            let p0 = lagrange_polynomial(n, 0).unwrap();
            let coeffs = p0.coefficients();
            assert!((coeffs[0] - ONE).norm() < 1e-12);
            assert!((coeffs[n as usize - 1] + ONE).norm() < 1e-12);
            for c in &coeffs[1..n as usize - 1] {
                assert!(c.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn lagrange_n3_closed_forms() {
        // roots (0, 1, −1): p_1 = x(x+1)/2, p_2 = x(x−1)/2
        let p1 = lagrange_polynomial(3, 1).unwrap();
        let expect1 = [ZERO, c(0.5, 0.0), c(0.5, 0.0)];
        for (a, b) in p1.coefficients().iter().zip(expect1.iter()) {
            assert!((a - b).norm() < 1e-14);
        }
        let p2 = lagrange_polynomial(3, 2).unwrap();
        let expect2 = [ZERO, c(-0.5, 0.0), c(0.5, 0.0)];
        for (a, b) in p2.coefficients().iter().zip(expect2.iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn kronecker_property_on_roots() {
        for n in 2..=8u32 {
            let sigma = roots_sigma(n).unwrap();
            for k in 0..n as usize {
                let p = lagrange_polynomial(n, k).unwrap();
                for (j, &w) in sigma.roots().iter().enumerate() {
                    let val = p.eval(w);
                    let expect = if j == k { ONE } else { ZERO };
                    assert!((val - expect).norm() < 1e-12, "n={n} k={k} j={j}");
                }
            }
        }
    }

    #[test]
    fn polynomials_sum_to_one_coefficientwise() {
        for n in 2..=8u32 {
            let mut sum = vec![ZERO; n as usize];
            for k in 0..n as usize {
                let p = lagrange_polynomial(n, k).unwrap();
                for (i, c) in p.coefficients().iter().enumerate() {
                    sum[i] += c;
                }
            }
            assert!((sum[0] - ONE).norm() < 1e-12);
            for c in &sum[1..] {
                assert!(c.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn index_out_of_range() {
        assert!(matches!(
            lagrange_polynomial(3, 3),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn projections_are_npotent_for_all_n() {
        let alg = AlgebraDescriptor::full_matrix(2).unwrap();
        let p = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
        let p = AlgebraElement::new(alg, p).unwrap();
        for n in 2..=9 {
            assert!(is_npotent(&p, n, 1e-12).unwrap());
        }
    }

    #[test]
    fn jordan_block_is_not_tripotent() {
        let alg = AlgebraDescriptor::full_matrix(2).unwrap();
        let j = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        let j = AlgebraElement::new(alg, j).unwrap();
        assert!(!is_npotent(&j, 3, 1e-9).unwrap());
    }

    #[test]
    fn partition_of_identity_selects_p1() {
        let alg = AlgebraDescriptor::full_matrix(2).unwrap();
        let e = AlgebraElement::unit(alg).unwrap();
        let part = partition_of_unity(&e, 4, 1e-10).unwrap();
        let zero = CMatrix::zeros(2, 2);
        let id = CMatrix::identity(2, 2);
        assert!(linalg::operator_norm(&(part.idempotents()[0].matrix() - &zero)) < 1e-12);
        assert!(linalg::operator_norm(&(part.idempotents()[1].matrix() - &id)) < 1e-12);
        assert!(linalg::operator_norm(&(part.idempotents()[2].matrix() - &zero)) < 1e-12);
        assert!(linalg::operator_norm(&(part.idempotents()[3].matrix() - &zero)) < 1e-12);
    }

    #[test]
    fn partition_of_diag_signature() {
        let alg = AlgebraDescriptor::full_matrix(2).unwrap();
        let e = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(-1.0, 0.0)]);
        let e = AlgebraElement::new(alg, e).unwrap();
        let part = partition_of_unity(&e, 3, 1e-10).unwrap();
        let e1 = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
        let e2 = CMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, ONE]);
        assert!(linalg::operator_norm(&(part.idempotents()[1].matrix() - e1)) < 1e-12);
        assert!(linalg::operator_norm(&(part.idempotents()[2].matrix() - e2)) < 1e-12);
        assert!(part.residuals().worst() < 1e-12);
    }

    #[test]
    fn partition_rejects_non_npotent() {
        let alg = AlgebraDescriptor::full_matrix(2).unwrap();
        let j = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        let j = AlgebraElement::new(alg, j).unwrap();
        assert!(matches!(
            partition_of_unity(&j, 3, 1e-9),
            Err(Error::NotNPotent { .. })
        ));
    }

    #[test]
    fn classify_splits_signature_matrix() {
        let alg = AlgebraDescriptor::full_matrix(3).unwrap();
        let e = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            ONE,
            c(-1.0, 0.0),
            ZERO,
        ]));
        let e = AlgebraElement::new(alg, e).unwrap();
        match classify_selfadjoint_npotent(&e, 3, 1e-10).unwrap() {
            SelfAdjointClass::TripotentSplit { p1, p2, .. } => {
                let q1 = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                    ONE, ZERO, ZERO,
                ]));
                let q2 = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                    ZERO, ONE, ZERO,
                ]));
                assert!(linalg::operator_norm(&(p1.matrix() - q1)) < 1e-12);
                assert!(linalg::operator_norm(&(p2.matrix() - q2)) < 1e-12);
            }
            other => panic!("expected split, got {other:?}"),
        }
    }

    #[test]
    fn classify_certifies_projection_for_even_n() {
        let alg = AlgebraDescriptor::full_matrix(2).unwrap();
        let p = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
        let p = AlgebraElement::new(alg, p).unwrap();
        match classify_selfadjoint_npotent(&p, 4, 1e-10).unwrap() {
            SelfAdjointClass::Projection { idempotency, .. } => {
                assert!(idempotency < 1e-14);
            }
            other => panic!("expected projection, got {other:?}"),
        }
    }

    #[test]
    fn classify_rejects_non_selfadjoint() {
        let alg = AlgebraDescriptor::full_matrix(2).unwrap();
        let m = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        let m = AlgebraElement::new(alg, m).unwrap();
        assert!(matches!(
            classify_selfadjoint_npotent(&m, 3, 1e-9),
            Err(Error::NotSelfAdjoint { .. })
        ));
    }
}
