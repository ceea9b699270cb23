//! Positivity and continuity of involutive n-homomorphisms.
//!
//! Complete positivity is decided by the Choi criterion — the block matrix
//! `[φ(E_ij)]` over the matrix units of the domain is positive semidefinite
//! iff the map is completely positive — which is the finite-dimensional
//! stand-in for the Stinespring argument. The odd-case continuity route
//! goes through Harris solvability of `c(λ − (a*a)^k) = a` and the spectral
//! inclusion `σ((φ(a)*φ(a))^k) ⊆ σ((a*a)^k) ∪ {0}`.

use crate::algebra::{AlgebraDescriptor, AlgebraElement, CMatrix, Complex64};
use crate::error::{Error, Result};
use crate::generate::{self, RandomStyle};
use crate::linalg::{self, ZERO};
use crate::nhom::LinearMapRep;
use crate::rel_scale;

/// Amplified layout: block sizes scaled by k (direct sums) or size scaled
/// by k (nilpotent, inner-major so strict upper-triangularity is kept).
fn amplified_descriptor(desc: &AlgebraDescriptor, k: usize) -> AlgebraDescriptor {
    match desc {
        AlgebraDescriptor::DirectSum { blocks } => AlgebraDescriptor::DirectSum {
            blocks: blocks.iter().map(|b| b * k).collect(),
        },
        AlgebraDescriptor::Nilpotent { size } => AlgebraDescriptor::Nilpotent { size: size * k },
    }
}

/// The induced map `φ_k : M_k(A) → M_k(B)` applying `φ` entrywise to k×k
/// block matrices over the domain.
///
/// Layout convention (bit-exact for the wire format): a direct-sum block of
/// size `d` amplifies to size `k·d` with coordinate `(u·d + p, v·d + q)`
/// holding entry `(p, q)` of the `(u, v)`-th block; a nilpotent algebra of
/// size `m` amplifies to size `k·m` with coordinate `(p·k + u, q·k + v)`
/// holding entry `(u, v)` of the block at `(p, q)`.
pub fn amplify(phi: &LinearMapRep, k: usize) -> LinearMapRep {
    if k == 1 {
        return phi.clone();
    }
    let dom = phi.domain().clone();
    let cod = phi.codomain().clone();
    let dom_amp = amplified_descriptor(&dom, k);
    let cod_amp = amplified_descriptor(&cod, k);
    let db_amp = cod_amp.dim();
    let dom_ranges = dom.block_ranges();
    let cod_ranges = cod.block_ranges();

    match &dom {
        AlgebraDescriptor::DirectSum { .. } => {
            LinearMapRep::from_action(dom_amp, cod_amp, |ra, ca| {
                // locate the amplified block and split indices as
                // (outer, inner)
                let mut out = CMatrix::zeros(db_amp, db_amp);
                let mut amp_off = 0;
                for &(doff, dsz) in &dom_ranges {
                    let asz = dsz * k;
                    if ra >= amp_off && ra < amp_off + asz {
                        let (u, p) = ((ra - amp_off) / dsz, (ra - amp_off) % dsz);
                        let (v, q) = ((ca - amp_off) / dsz, (ca - amp_off) % dsz);
                        let img = phi.image_of_unit(doff + p, doff + q);
                        // scatter each codomain block at its amplified offset
                        let mut camp_off = 0;
                        for &(coff, csz) in &cod_ranges {
                            for i in 0..csz {
                                for j in 0..csz {
                                    out[(camp_off + u * csz + i, camp_off + v * csz + j)] =
                                        img[(coff + i, coff + j)];
                                }
                            }
                            camp_off += csz * k;
                        }
                        break;
                    }
                    amp_off += asz;
                }
                out
            })
        }
        AlgebraDescriptor::Nilpotent { .. } => {
            LinearMapRep::from_action(dom_amp, cod_amp, |ra, ca| {
                let (p, u) = (ra / k, ra % k);
                let (q, v) = (ca / k, ca % k);
                let mut out = CMatrix::zeros(db_amp, db_amp);
                if p < q {
                    let img = phi.image_of_unit(p, q);
                    for i in 0..img.nrows() {
                        for j in 0..img.ncols() {
                            out[(i * k + u, j * k + v)] = img[(i, j)];
                        }
                    }
                }
                out
            })
        }
    }
}

/// The Choi matrix `Σ_{(i,j)} E_ij ⊗ φ(E_ij)` over the matrix units of the
/// domain. Block-diagonal across the direct summands of the domain, so the
/// map is completely positive iff this matrix is PSD.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    pub domain_dim: usize,
    pub codomain_dim: usize,
    pub matrix: CMatrix,
    /// `‖C − C*‖`; zero (to roundoff) iff the map is involutive.
    pub hermiticity_defect: f64,
}

impl ChoiMatrix {
    pub fn min_eigenvalue(&self) -> f64 {
        linalg::hermitian_eigenvalues(&self.matrix)
            .first()
            .copied()
            .unwrap_or(0.0)
    }
}

/// Assemble the Choi matrix. The domain must be a direct-sum algebra (the
/// criterion is stated over its matrix units).
pub fn choi_matrix(phi: &LinearMapRep) -> Result<ChoiMatrix> {
    if !matches!(phi.domain(), AlgebraDescriptor::DirectSum { .. }) {
        return Err(Error::NonDirectSumDomain);
    }
    let da = phi.domain().dim();
    let db = phi.codomain().dim();
    let mut c = CMatrix::zeros(da * db, da * db);
    for (r, s) in phi.domain().basis_indices() {
        let img = phi.image_of_unit(r, s);
        for i in 0..db {
            for j in 0..db {
                c[(r * db + i, s * db + j)] = img[(i, j)];
            }
        }
    }
    let hermiticity_defect = linalg::hermiticity_defect(&c);
    Ok(ChoiMatrix {
        domain_dim: da,
        codomain_dim: db,
        matrix: c,
        hermiticity_defect,
    })
}

/// Complete positivity through the Choi criterion: Hermitian within
/// tolerance and minimum eigenvalue `≥ −tol · max(1, ‖C‖)`.
pub fn is_completely_positive(phi: &LinearMapRep, tol: f64) -> Result<bool> {
    let choi = choi_matrix(phi)?;
    let scale = rel_scale(linalg::operator_norm(&choi.matrix));
    if choi.hermiticity_defect > tol * scale {
        return Ok(false);
    }
    Ok(choi.min_eigenvalue() >= -tol * scale)
}

/// Two generalized C*-identities evaluated on one element.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CstarIdentityReport {
    pub k: u32,
    /// `‖x‖^{2k}` and `‖(x*x)^k‖`, with their relative error.
    pub even_lhs: f64,
    pub even_rhs: f64,
    pub even_rel_err: f64,
    /// `‖x‖^{2k+1}` and `‖x(x*x)^k‖`, with their relative error.
    pub odd_lhs: f64,
    pub odd_rhs: f64,
    pub odd_rel_err: f64,
    pub pass: bool,
}

/// Check `‖x‖^{2k} = ‖(x*x)^k‖` and `‖x‖^{2k+1} = ‖x(x*x)^k‖`.
pub fn cstar_identity_check(x: &AlgebraElement, k: u32, tol: f64) -> CstarIdentityReport {
    let norm = x.operator_norm();
    let xsx = x.matrix().adjoint() * x.matrix();
    let pk = linalg::power(&xsx, k);
    let even_lhs = norm.powi(2 * k as i32);
    let even_rhs = linalg::operator_norm(&pk);
    let odd_lhs = norm.powi(2 * k as i32 + 1);
    let odd_rhs = linalg::operator_norm(&(x.matrix() * &pk));
    let even_rel_err = (even_lhs - even_rhs).abs() / rel_scale(even_lhs.abs());
    let odd_rel_err = (odd_lhs - odd_rhs).abs() / rel_scale(odd_lhs.abs());
    CstarIdentityReport {
        k,
        even_lhs,
        even_rhs,
        even_rel_err,
        odd_lhs,
        odd_rhs,
        odd_rel_err,
        pass: even_rel_err <= tol && odd_rel_err <= tol,
    }
}

/// Outcome of attempting `c (λ − (a*a)^k) = a`.
#[derive(Debug, Clone)]
pub struct SolvabilityResult {
    /// The solution when the least-squares residual is accepted.
    pub solution: Option<CMatrix>,
    /// Achieved residual `‖c(λ − (a*a)^k) − a‖`.
    pub residual: f64,
    /// Distance from λ to the computed spectrum of `(a*a)^k`.
    pub spectrum_distance: f64,
    pub lambda: Complex64,
    pub k: u32,
}

impl SolvabilityResult {
    pub fn solvable(&self) -> bool {
        self.solution.is_some()
    }
}

/// Solvability of `c (λ − (a*a)^k) = a` by right division. A solution is
/// accepted iff the least-squares residual is `≤ tol·max(1, ‖a‖)`; the
/// verdict matches `dist(λ, σ((a*a)^k)) > tol` away from the boundary.
pub fn harris_solvability(
    a: &AlgebraElement,
    lambda: Complex64,
    k: u32,
    tol: f64,
) -> Result<SolvabilityResult> {
    if lambda == ZERO {
        return Err(Error::LambdaZero);
    }
    let d = a.dim();
    let asa = a.matrix().adjoint() * a.matrix();
    let pk = linalg::power(&asa, k);
    let m = CMatrix::identity(d, d) * lambda - &pk;
    let (c, residual) = linalg::solve_right(&m, a.matrix())?;
    let spectrum: Vec<f64> = linalg::hermitian_eigenvalues(&pk);
    let spectrum_distance = spectrum
        .iter()
        .map(|mu| (lambda - Complex64::new(*mu, 0.0)).norm())
        .fold(f64::INFINITY, f64::min);
    let accepted = residual <= tol * rel_scale(a.operator_norm());
    Ok(SolvabilityResult {
        solution: accepted.then_some(c),
        residual,
        spectrum_distance,
        lambda,
        k,
    })
}

/// Spectra involved in the odd-case inclusion, with the verdict.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub lhs_spectrum: Vec<Complex64>,
    pub rhs_spectrum: Vec<Complex64>,
    pub inclusion_holds: bool,
    /// Worst inclusion measure `min(|μ|, min_ρ |μ − ρ|)` over lhs
    /// eigenvalues.
    pub max_unmatched_distance: f64,
}

/// Check `σ((φ(a)*φ(a))^k) ⊆ σ((a*a)^k) ∪ {0}` for odd `n = 2k+1`. An lhs
/// eigenvalue μ counts as included when `min(|μ|, min_ρ |μ−ρ|) ≤
/// tol·max(1, ‖(a*a)^k‖)`.
pub fn spectral_inclusion_check(
    phi: &LinearMapRep,
    a: &AlgebraElement,
    n: u32,
    tol: f64,
) -> Result<SpectralReport> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::EvenN { n });
    }
    let k = (n - 1) / 2;
    let fa = phi.apply(a)?;
    let lhs_h = {
        let g = fa.matrix().adjoint() * fa.matrix();
        linalg::power(&g, k)
    };
    let rhs_h = {
        let g = a.matrix().adjoint() * a.matrix();
        linalg::power(&g, k)
    };
    let lhs: Vec<f64> = linalg::hermitian_eigenvalues(&lhs_h);
    let rhs: Vec<f64> = linalg::hermitian_eigenvalues(&rhs_h);
    let scale = rel_scale(linalg::operator_norm(&rhs_h));
    let mut worst = 0.0f64;
    for mu in &lhs {
        let to_zero = mu.abs();
        let to_rhs = rhs
            .iter()
            .map(|rho| (mu - rho).abs())
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(to_zero.min(to_rhs));
    }
    Ok(SpectralReport {
        lhs_spectrum: lhs.iter().map(|x| Complex64::new(*x, 0.0)).collect(),
        rhs_spectrum: rhs.iter().map(|x| Complex64::new(*x, 0.0)).collect(),
        inclusion_holds: worst <= tol * scale,
        max_unmatched_distance: worst,
    })
}

/// Contractivity sampling report.
#[derive(Debug, Clone)]
pub struct ContractivityReport {
    pub trials: usize,
    /// Largest observed `‖φ(a)‖ / ‖a‖`.
    pub max_ratio: f64,
    pub pass: bool,
    /// The sample achieving the maximum, for diagnosis.
    pub worst: Option<CMatrix>,
}

/// Sample `‖φ(a)‖ ≤ ‖a‖(1 + tol)` over Ginibre, Hermitian, unitary,
/// positive, and rank-one elements. A ratio above `1 + tol` is a FAIL
/// verdict falsifying contractivity numerically.
pub fn contractivity_check(
    phi: &LinearMapRep,
    trials: usize,
    tol: f64,
    seed: u64,
) -> ContractivityReport {
    let domain = phi.domain().clone();
    let styles = [
        RandomStyle::Ginibre,
        RandomStyle::Hermitian,
        RandomStyle::Unitary,
        RandomStyle::Positive,
    ];
    let mut max_ratio = 0.0f64;
    let mut worst: Option<CMatrix> = None;
    for t in 0..trials {
        let s = generate::mix_seed(seed, t as u64);
        let a = if t % (styles.len() + 1) == styles.len() {
            rank_one(&domain, s)
        } else {
            let style = if domain.is_unital() {
                styles[t % (styles.len() + 1)]
            } else {
                RandomStyle::Ginibre
            };
            generate::random_element(&domain, style, s).expect("style supported")
        };
        let na = a.operator_norm();
        if na == 0.0 {
            continue;
        }
        let fa = phi.apply(&a).expect("domain element");
        let ratio = fa.operator_norm() / na;
        if ratio > max_ratio {
            max_ratio = ratio;
            worst = Some(a.matrix().clone());
        }
    }
    ContractivityReport {
        trials,
        max_ratio,
        pass: max_ratio <= 1.0 + tol,
        worst,
    }
}

/// A rank-one element supported in a single (seed-chosen) block.
fn rank_one(algebra: &AlgebraDescriptor, seed: u64) -> AlgebraElement {
    let mut rng = generate::rng_from(seed);
    let ranges = algebra.block_ranges();
    let pick = (seed as usize) % ranges.len();
    let (off, sz) = ranges[pick];
    let d = algebra.dim();
    let mut m = CMatrix::zeros(d, d);
    match algebra {
        AlgebraDescriptor::DirectSum { .. } => {
            let u = generate::ginibre(sz, &mut rng);
            let v = generate::ginibre(sz, &mut rng);
            for i in 0..sz {
                for j in 0..sz {
                    m[(off + i, off + j)] = u[(i, 0)] * v[(j, 0)].conj();
                }
            }
        }
        AlgebraDescriptor::Nilpotent { size } => {
            if *size >= 2 {
                let g = generate::ginibre(2, &mut rng);
                m[(0, size - 1)] = g[(0, 0)];
            }
        }
    }
    AlgebraElement::new(algebra.clone(), m).expect("constructed in support")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;
    use crate::nhom::{is_n_homomorphism, VerifyMode, DEFAULT_BUDGET};

    fn m2() -> AlgebraDescriptor {
        AlgebraDescriptor::full_matrix(2).unwrap()
    }

    #[test]
    fn amplify_identity_is_identity() {
        let id = LinearMapRep::identity(m2());
        let amp = amplify(&id, 2);
        let alg4 = AlgebraDescriptor::full_matrix(4).unwrap();
        assert_eq!(amp.domain(), &alg4);
        let expect = LinearMapRep::identity(alg4);
        assert!(linalg::fro_norm(&(amp.matrix() - expect.matrix())) < 1e-14);
    }

    #[test]
    fn amplify_k_one_is_noop() {
        let id = LinearMapRep::identity(m2());
        assert_eq!(&amplify(&id, 1), &id);
    }

    #[test]
    fn choi_of_identity_is_maximally_entangled() {
        let id = LinearMapRep::identity(m2());
        let choi = choi_matrix(&id).unwrap();
        // rank-one projector scaled by dim: eigenvalues {2, 0, 0, 0}
        let eigs = linalg::hermitian_eigenvalues(&choi.matrix);
        assert!((eigs[3] - 2.0).abs() < 1e-12);
        for e in &eigs[..3] {
            assert!(e.abs() < 1e-12);
        }
        assert!(is_completely_positive(&id, 1e-10).unwrap());
    }

    #[test]
    fn choi_of_transpose_has_negative_eigenvalue() {
        let t = LinearMapRep::transpose_map(m2());
        let choi = choi_matrix(&t).unwrap();
        let eigs = linalg::hermitian_eigenvalues(&choi.matrix);
        assert!((eigs[0] + 1.0).abs() < 1e-12, "transpose Choi has eigenvalue -1");
        assert!(!is_completely_positive(&t, 1e-10).unwrap());
    }

    #[test]
    fn negated_map_is_not_cp() {
        let id = LinearMapRep::identity(m2());
        let neg = id.scaled(Complex64::new(-1.0, 0.0));
        assert!(!is_completely_positive(&neg, 1e-10).unwrap());
        assert!(is_completely_positive(&LinearMapRep::zero(m2(), m2()), 1e-10).unwrap());
    }

    #[test]
    fn choi_requires_direct_sum_domain() {
        let alg = AlgebraDescriptor::nilpotent(3).unwrap();
        let phi = LinearMapRep::zero(alg.clone(), alg);
        assert!(matches!(choi_matrix(&phi), Err(Error::NonDirectSumDomain)));
    }

    #[test]
    fn cstar_identities_on_diagonal() {
        let alg = m2();
        let x = CMatrix::from_row_slice(2, 2, &[Complex64::new(2.0, 0.0), ZERO, ZERO, ONE]);
        let x = AlgebraElement::new(alg, x).unwrap();
        let rep = cstar_identity_check(&x, 2, 1e-12);
        assert!((rep.even_lhs - 16.0).abs() < 1e-12);
        assert!((rep.even_rhs - 16.0).abs() < 1e-12);
        assert!(rep.pass);
    }

    #[test]
    fn harris_zero_element() {
        let a = AlgebraElement::zero(m2());
        let res = harris_solvability(&a, ONE, 1, 1e-9).unwrap();
        assert!(res.solvable());
        assert!(linalg::fro_norm(res.solution.as_ref().unwrap()) < 1e-12);
    }

    #[test]
    fn harris_rejects_lambda_zero() {
        let a = AlgebraElement::zero(m2());
        assert!(matches!(
            harris_solvability(&a, ZERO, 1, 1e-9),
            Err(Error::LambdaZero)
        ));
    }

    #[test]
    fn harris_unsolvable_on_spectrum() {
        // a unitary: a*a = I, λ = 1 lies in the spectrum.
        let u = generate::random_element(&m2(), RandomStyle::Unitary, 9).unwrap();
        let res = harris_solvability(&u, ONE, 1, 1e-7).unwrap();
        assert!(!res.solvable());
        assert!(res.spectrum_distance < 1e-10);
    }

    #[test]
    fn harris_solvable_outside_spectrum() {
        let a = generate::random_element(&m2(), RandomStyle::Ginibre, 10).unwrap();
        let lambda = Complex64::new(a.operator_norm().powi(2) + 1.0, 0.0);
        let res = harris_solvability(&a, lambda, 1, 1e-10).unwrap();
        assert!(res.solvable());
        // explicit-inverse oracle from the solvable direction
        let d = a.dim();
        let asa = a.matrix().adjoint() * a.matrix();
        let m = CMatrix::identity(d, d) * lambda - asa;
        let c_oracle = a.matrix() * m.try_inverse().unwrap();
        let c = res.solution.unwrap();
        assert!(linalg::fro_norm(&(&c - &c_oracle)) < 1e-9);
    }

    #[test]
    fn spectral_inclusion_for_identity() {
        let id = LinearMapRep::identity(m2());
        let a = generate::random_element(&m2(), RandomStyle::Ginibre, 11).unwrap();
        let rep = spectral_inclusion_check(&id, &a, 3, 1e-9).unwrap();
        assert!(rep.inclusion_holds);
        assert!(rep.max_unmatched_distance < 1e-10);
    }

    #[test]
    fn spectral_inclusion_rejects_even_n() {
        let id = LinearMapRep::identity(m2());
        let a = AlgebraElement::zero(m2());
        assert!(matches!(
            spectral_inclusion_check(&id, &a, 4, 1e-9),
            Err(Error::EvenN { n: 4 })
        ));
    }

    #[test]
    fn identity_map_has_ratio_one() {
        let id = LinearMapRep::identity(m2());
        let rep = contractivity_check(&id, 50, 1e-10, 12);
        assert!((rep.max_ratio - 1.0).abs() < 1e-12);
        assert!(rep.pass);
    }

    #[test]
    fn amplified_involutive_nhom_stays_involutive_nhom() {
        let dom = m2();
        let cod = AlgebraDescriptor::full_matrix(5).unwrap();
        let inst = generate::random_involutive_nhom(&dom, &cod, 4, 13).unwrap();
        let amp = amplify(&inst.map, 2);
        assert!(amp.is_star_linear(1e-9));
        let rep = is_n_homomorphism(
            &amp,
            4,
            1e-9,
            VerifyMode::Randomized {
                trials: 60,
                seed: 14,
            },
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(rep.pass, "residual {}", rep.max_residual);
    }
}
