//! Seeded random elements and map instances.
//!
//! Everything here is deterministic in the seed: the same seed, descriptor,
//! and style always reproduce the same bits. Random n-potents are built
//! through similarities with controlled condition number so downstream
//! partition residuals stay well below verification tolerances, and random
//! homomorphism families share one conjugating matrix per codomain block so
//! their mutual orthogonality is exact.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::algebra::{AlgebraDescriptor, AlgebraElement, CMatrix, Complex64};
use crate::error::{Error, Result};
use crate::linalg::{self, ZERO};
use crate::nhom::LinearMapRep;
use crate::npotent::roots_sigma;

/// Styles understood by [`random_element`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomStyle {
    /// Independent complex-normal entries.
    Ginibre,
    /// Hermitian part of a Ginibre draw.
    Hermitian,
    /// Haar-distributed unitary (per block).
    Unitary,
    /// `b*b` for a Ginibre `b`.
    Positive,
    /// Exact n-potent `S · diag(Σ_n values) · S⁻¹` with a
    /// condition-controlled similarity.
    NPotent(u32),
    /// Exact self-adjoint n-potent `U · diag(Σ_n ∩ ℝ values) · U*`.
    SelfAdjointNPotent(u32),
}

impl std::fmt::Display for RandomStyle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RandomStyle::Ginibre => write!(f, "ginibre"),
            RandomStyle::Hermitian => write!(f, "hermitian"),
            RandomStyle::Unitary => write!(f, "unitary"),
            RandomStyle::Positive => write!(f, "positive"),
            RandomStyle::NPotent(n) => write!(f, "npotent({n})"),
            RandomStyle::SelfAdjointNPotent(n) => write!(f, "selfadjoint-npotent({n})"),
        }
    }
}

/// SplitMix64 step, used to derive independent stream seeds from a master
/// seed without coupling nearby values.
pub fn mix_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn rng_from(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

fn normal(rng: &mut ChaCha12Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex standard normal entry.
fn cnormal(rng: &mut ChaCha12Rng) -> Complex64 {
    Complex64::new(normal(rng), normal(rng)) * std::f64::consts::FRAC_1_SQRT_2
}

pub(crate) fn ginibre(dim: usize, rng: &mut ChaCha12Rng) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| cnormal(rng))
}

pub(crate) fn haar_unitary(dim: usize, rng: &mut ChaCha12Rng) -> CMatrix {
    linalg::qr_unitary(&ginibre(dim, rng))
}

/// Invertible matrix with singular values in `[0.6, 1.6]`, so condition
/// numbers stay below ~2.7.
pub(crate) fn conditioned_invertible(dim: usize, rng: &mut ChaCha12Rng) -> CMatrix {
    let u = haar_unitary(dim, rng);
    let v = haar_unitary(dim, rng);
    let mut s = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        s[(i, i)] = Complex64::new(0.6 + rng.random::<f64>(), 0.0);
    }
    &u * s * v.adjoint()
}

fn block_element(
    algebra: &AlgebraDescriptor,
    mut f: impl FnMut(usize, &mut ChaCha12Rng) -> Result<CMatrix>,
    rng: &mut ChaCha12Rng,
) -> Result<AlgebraElement> {
    let d = algebra.dim();
    let mut out = CMatrix::zeros(d, d);
    for (o, s) in algebra.block_ranges() {
        let b = f(s, rng)?;
        out.view_mut((o, o), (s, s)).copy_from(&b);
    }
    AlgebraElement::new(algebra.clone(), out)
}

/// Draw a random element of the given style. Deterministic in the seed.
///
/// Nilpotent algebras only support the Ginibre style (random strictly
/// upper-triangular entries); every other style needs the *-structure and
/// unit of a direct sum.
pub fn random_element(
    algebra: &AlgebraDescriptor,
    style: RandomStyle,
    seed: u64,
) -> Result<AlgebraElement> {
    let mut rng = rng_from(seed);
    if let AlgebraDescriptor::Nilpotent { size } = algebra {
        if style != RandomStyle::Ginibre {
            return Err(Error::UnsupportedStyle {
                style: style.to_string(),
            });
        }
        let m = *size;
        let mut out = CMatrix::zeros(m, m);
        for r in 0..m {
            for c in r + 1..m {
                out[(r, c)] = cnormal(&mut rng);
            }
        }
        return AlgebraElement::new(algebra.clone(), out);
    }
    match style {
        RandomStyle::Ginibre => block_element(algebra, |s, rng| Ok(ginibre(s, rng)), &mut rng),
        RandomStyle::Hermitian => block_element(
            algebra,
            |s, rng| {
                let g = ginibre(s, rng);
                Ok((&g + g.adjoint()) * Complex64::new(0.5, 0.0))
            },
            &mut rng,
        ),
        RandomStyle::Unitary => block_element(algebra, |s, rng| Ok(haar_unitary(s, rng)), &mut rng),
        RandomStyle::Positive => block_element(
            algebra,
            |s, rng| {
                let g = ginibre(s, rng);
                Ok(g.adjoint() * &g)
            },
            &mut rng,
        ),
        RandomStyle::NPotent(n) => {
            if n < 2 {
                return Err(Error::InvalidN { n: i64::from(n) });
            }
            let sigma = roots_sigma(n)?;
            block_element(
                algebra,
                |s, rng| {
                    let t = conditioned_invertible(s, rng);
                    let ti = t.clone().try_inverse().expect("conditioned invertible");
                    let mut d = CMatrix::zeros(s, s);
                    for i in 0..s {
                        let pick = rng.random_range(0..sigma.roots().len());
                        d[(i, i)] = sigma.omega(pick);
                    }
                    Ok(&t * d * ti)
                },
                &mut rng,
            )
        }
        RandomStyle::SelfAdjointNPotent(n) => {
            if n < 2 {
                return Err(Error::InvalidN { n: i64::from(n) });
            }
            let sigma = roots_sigma(n)?;
            let reals = sigma.real_roots();
            block_element(
                algebra,
                |s, rng| {
                    let u = haar_unitary(s, rng);
                    let mut d = CMatrix::zeros(s, s);
                    for i in 0..s {
                        let pick = rng.random_range(0..reals.len());
                        d[(i, i)] = Complex64::new(reals[pick], 0.0);
                    }
                    Ok(&u * d * u.adjoint())
                },
                &mut rng,
            )
        }
    }
}

/// Invertible element with controlled condition number, blockwise.
pub fn random_invertible(algebra: &AlgebraDescriptor, seed: u64) -> Result<AlgebraElement> {
    if !algebra.is_unital() {
        return Err(Error::NonUnitalAlgebra);
    }
    let mut rng = rng_from(seed);
    block_element(algebra, |s, rng| Ok(conditioned_invertible(s, rng)), &mut rng)
}

/// A random linear map: independent complex-normal images (constrained to
/// the codomain support) for every domain basis unit.
pub fn random_linear_map(
    domain: &AlgebraDescriptor,
    codomain: &AlgebraDescriptor,
    seed: u64,
) -> LinearMapRep {
    let mut rng = rng_from(seed);
    let db = codomain.dim();
    LinearMapRep::from_action(domain.clone(), codomain.clone(), |_, _| {
        CMatrix::from_fn(db, db, |r, c| {
            if codomain.supports(r, c) {
                cnormal(&mut rng)
            } else {
                ZERO
            }
        })
    })
}

/// Assignment of one copy of a domain block into a codomain block.
#[derive(Debug, Clone, Copy)]
struct Slot {
    codomain_block: usize,
    offset: usize,
    part: usize,
    domain_block: usize,
}

/// A family of `parts` mutually orthogonal homomorphisms built from a
/// random block-embedding plan, all conjugated by the same per-block
/// transformation so orthogonality is exact by construction.
fn random_hom_family(
    domain: &AlgebraDescriptor,
    codomain: &AlgebraDescriptor,
    parts: usize,
    star: bool,
    seed: u64,
) -> Result<Vec<LinearMapRep>> {
    let (AlgebraDescriptor::DirectSum { blocks: dom_blocks }, AlgebraDescriptor::DirectSum { .. }) =
        (domain, codomain)
    else {
        return Err(Error::NonDirectSumDomain);
    };
    let mut rng = rng_from(seed);
    let cod_ranges = codomain.block_ranges();
    let dom_ranges = domain.block_ranges();

    // Pack copies of domain blocks into codomain blocks; leave random gaps.
    let mut slots: Vec<Slot> = Vec::new();
    for (j, &(_, cj)) in cod_ranges.iter().enumerate() {
        let mut free = cj;
        loop {
            let candidates: Vec<usize> = (0..dom_blocks.len())
                .filter(|&i| dom_blocks[i] <= free)
                .collect();
            if candidates.is_empty() {
                break;
            }
            // one extra outcome per round: waste a dimension of padding
            let roll = rng.random_range(0..parts * candidates.len() + 1);
            if roll == parts * candidates.len() {
                free -= 1;
                continue;
            }
            let part = roll / candidates.len();
            let i = candidates[roll % candidates.len()];
            slots.push(Slot {
                codomain_block: j,
                offset: cj - free,
                part,
                domain_block: i,
            });
            free -= dom_blocks[i];
        }
    }
    // Keep the family nontrivial whenever anything fits at all.
    if slots.is_empty() {
        if let Some((j, i)) = cod_ranges.iter().enumerate().find_map(|(j, &(_, cj))| {
            (0..dom_blocks.len())
                .find(|&i| dom_blocks[i] <= cj)
                .map(|i| (j, i))
        }) {
            slots.push(Slot {
                codomain_block: j,
                offset: 0,
                part: 0,
                domain_block: i,
            });
        }
    }

    // One conjugator per codomain block, shared by all parts.
    let conjugators: Vec<(CMatrix, CMatrix)> = cod_ranges
        .iter()
        .map(|&(_, cj)| {
            if star {
                let u = haar_unitary(cj, &mut rng);
                let ui = u.adjoint();
                (u, ui)
            } else {
                let t = conditioned_invertible(cj, &mut rng);
                let ti = t.clone().try_inverse().expect("conditioned invertible");
                (t, ti)
            }
        })
        .collect();

    let db = codomain.dim();
    let mut maps = Vec::with_capacity(parts);
    for part in 0..parts {
        let my_slots: Vec<Slot> = slots.iter().copied().filter(|s| s.part == part).collect();
        let dom_ranges = dom_ranges.clone();
        let cod_ranges = cod_ranges.clone();
        let conjugators = &conjugators;
        let map = LinearMapRep::from_action(domain.clone(), codomain.clone(), |r, c| {
            let mut out = CMatrix::zeros(db, db);
            for slot in &my_slots {
                let (doff, dsz) = dom_ranges[slot.domain_block];
                if r < doff || r >= doff + dsz || c < doff || c >= doff + dsz {
                    continue;
                }
                let (coff, _) = cod_ranges[slot.codomain_block];
                let (t, ti) = &conjugators[slot.codomain_block];
                let row = slot.offset + (r - doff);
                let col = slot.offset + (c - doff);
                // image of E_rc inside this slot: t · E_slot · t⁻¹
                let tcol = t.column(row);
                let tirow = ti.row(col);
                let contrib = tcol * tirow;
                let cj = contrib.nrows();
                for a in 0..cj {
                    for b in 0..cj {
                        out[(coff + a, coff + b)] += contrib[(a, b)];
                    }
                }
            }
            out
        });
        maps.push(map);
    }
    Ok(maps)
}

/// `parts` mutually orthogonal *-homomorphisms (shared Haar conjugation).
pub fn random_orthogonal_star_homs(
    domain: &AlgebraDescriptor,
    codomain: &AlgebraDescriptor,
    parts: usize,
    seed: u64,
) -> Result<Vec<LinearMapRep>> {
    random_hom_family(domain, codomain, parts, true, seed)
}

/// `parts` mutually orthogonal homomorphisms conjugated by a shared
/// invertible (generally non-unitary) matrix, so they are not *-preserving.
pub fn random_orthogonal_homs(
    domain: &AlgebraDescriptor,
    codomain: &AlgebraDescriptor,
    parts: usize,
    seed: u64,
) -> Result<Vec<LinearMapRep>> {
    random_hom_family(domain, codomain, parts, false, seed)
}

/// A generated involutive n-homomorphism together with the orthogonal
/// *-homomorphisms it was assembled from.
#[derive(Debug, Clone)]
pub struct InvolutiveInstance {
    pub n: u32,
    pub map: LinearMapRep,
    /// The positive part ψ₁ (the whole map when n is even).
    pub psi_plus: LinearMapRep,
    /// The negated part ψ₂; the zero map when n is even.
    pub psi_minus: LinearMapRep,
}

/// Generate an involutive n-homomorphism: a *-homomorphism when n is even,
/// and a difference `ψ₁ − ψ₂` of orthogonal *-homomorphisms when n is odd
/// (the only root patterns of `Σ_n` compatible with involutivity).
pub fn random_involutive_nhom(
    domain: &AlgebraDescriptor,
    codomain: &AlgebraDescriptor,
    n: u32,
    seed: u64,
) -> Result<InvolutiveInstance> {
    if n < 2 {
        return Err(Error::InvalidN { n: i64::from(n) });
    }
    if n % 2 == 0 {
        let mut homs = random_hom_family(domain, codomain, 1, true, seed)?;
        let psi_plus = homs.pop().expect("one part");
        let psi_minus = LinearMapRep::zero(domain.clone(), codomain.clone());
        Ok(InvolutiveInstance {
            n,
            map: psi_plus.clone(),
            psi_plus,
            psi_minus,
        })
    } else {
        let homs = random_hom_family(domain, codomain, 2, true, seed)?;
        let psi_plus = homs[0].clone();
        let psi_minus = homs[1].clone();
        let map = psi_plus.sub(&psi_minus)?;
        Ok(InvolutiveInstance {
            n,
            map,
            psi_plus,
            psi_minus,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::npotent::is_npotent;

    #[test]
    fn deterministic_in_seed() {
        let alg = AlgebraDescriptor::direct_sum(vec![2, 3]).unwrap();
        let a = random_element(&alg, RandomStyle::Ginibre, 7).unwrap();
        let b = random_element(&alg, RandomStyle::Ginibre, 7).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        let c = random_element(&alg, RandomStyle::Ginibre, 8).unwrap();
        assert_ne!(a.matrix(), c.matrix());
    }

    #[test]
    fn selfadjoint_npotent_examples() {
        let alg = AlgebraDescriptor::full_matrix(3).unwrap();
        let e = random_element(&alg, RandomStyle::SelfAdjointNPotent(3), 5).unwrap();
        assert!(is_npotent(&e, 3, 1e-10).unwrap());
        assert!(e.is_hermitian(1e-12));
    }

    #[test]
    fn unitary_style_is_unitary() {
        let alg = AlgebraDescriptor::full_matrix(2).unwrap();
        let u = random_element(&alg, RandomStyle::Unitary, 3).unwrap();
        let defect = linalg::operator_norm(
            &(u.matrix().adjoint() * u.matrix() - CMatrix::identity(2, 2)),
        );
        assert!(defect <= 1e-12);
    }

    #[test]
    fn positive_style_is_positive() {
        let alg = AlgebraDescriptor::full_matrix(2).unwrap();
        let p = random_element(&alg, RandomStyle::Positive, 11).unwrap();
        assert!(p.is_positive(1e-12));
    }

    #[test]
    fn nilpotent_supports_only_ginibre() {
        let alg = AlgebraDescriptor::nilpotent(4).unwrap();
        assert!(random_element(&alg, RandomStyle::Ginibre, 0).is_ok());
        assert!(matches!(
            random_element(&alg, RandomStyle::Unitary, 0),
            Err(Error::UnsupportedStyle { .. })
        ));
    }

    #[test]
    fn nilpotent_product_of_size_many_elements_vanishes() {
        let alg = AlgebraDescriptor::nilpotent(4).unwrap();
        let mut prod = CMatrix::identity(4, 4);
        for s in 0..4 {
            let a = random_element(&alg, RandomStyle::Ginibre, 100 + s).unwrap();
            prod = &prod * a.matrix();
        }
        assert_eq!(prod, CMatrix::zeros(4, 4));
    }

    #[test]
    fn npotent_style_is_exactly_npotent() {
        let alg = AlgebraDescriptor::full_matrix(4).unwrap();
        for n in 2..=8 {
            let e = random_element(&alg, RandomStyle::NPotent(n), u64::from(n)).unwrap();
            assert!(is_npotent(&e, n, 1e-10).unwrap(), "n = {n}");
        }
    }
}
