//! Linear maps between algebras and the structure theory of
//! n-homomorphisms.
//!
//! A map is stored as a dense matrix acting on column-stacked coordinates,
//! so application is a matrix–vector product and linearity is exact. The
//! n-multiplicativity defect `(a_1, …, a_n) ↦ φ(a_1⋯a_n) − φ(a_1)⋯φ(a_n)`
//! is multilinear, so vanishing on every n-tuple of canonical basis units
//! is equivalent to vanishing identically; exhaustive verification checks
//! exactly that, and randomized verification samples Ginibre tuples when
//! the basis-tuple count exceeds the budget.

use std::collections::BTreeMap;

use rand::Rng;

use crate::algebra::{AlgebraDescriptor, AlgebraElement, CMatrix, Complex64};
use crate::error::{Error, Result};
use crate::linalg::{self, ONE, ZERO};
use crate::npotent::{self, SelfAdjointClass};
use crate::rel_scale;

/// Default cap on `basis_count^n` for exhaustive verification.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// A linear map `φ : A → B` as a dense `dim(B)² × dim(A)²` matrix on
/// column-stacked coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMapRep {
    domain: AlgebraDescriptor,
    codomain: AlgebraDescriptor,
    matrix: CMatrix,
}

impl LinearMapRep {
    pub fn new(
        domain: AlgebraDescriptor,
        codomain: AlgebraDescriptor,
        matrix: CMatrix,
    ) -> Result<Self> {
        let (rows, cols) = (codomain.dim() * codomain.dim(), domain.dim() * domain.dim());
        if matrix.nrows() != rows || matrix.ncols() != cols {
            return Err(Error::ShapeMismatch {
                context: format!(
                    "map matrix is {}x{}, expected {rows}x{cols} for {domain} → {codomain}",
                    matrix.nrows(),
                    matrix.ncols()
                ),
            });
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { row: 0, col: 0 });
        }
        Ok(LinearMapRep {
            domain,
            codomain,
            matrix,
        })
    }

    /// Build a map from its action on the canonical basis units of the
    /// domain support; all off-support coordinates are annihilated.
    pub fn from_action(
        domain: AlgebraDescriptor,
        codomain: AlgebraDescriptor,
        mut f: impl FnMut(usize, usize) -> CMatrix,
    ) -> Self {
        let da = domain.dim();
        let db = codomain.dim();
        let mut matrix = CMatrix::zeros(db * db, da * da);
        for (r, c) in domain.basis_indices() {
            let img = f(r, c);
            let col = c * da + r;
            matrix.column_mut(col).copy_from(&linalg::vec_of(&img));
        }
        LinearMapRep {
            domain,
            codomain,
            matrix,
        }
    }

    pub fn identity(algebra: AlgebraDescriptor) -> Self {
        let d = algebra.dim();
        Self::from_action(algebra.clone(), algebra, |r, c| {
            let mut m = CMatrix::zeros(d, d);
            m[(r, c)] = ONE;
            m
        })
    }

    pub fn zero(domain: AlgebraDescriptor, codomain: AlgebraDescriptor) -> Self {
        let (da, db) = (domain.dim(), codomain.dim());
        LinearMapRep {
            domain,
            codomain,
            matrix: CMatrix::zeros(db * db, da * da),
        }
    }

    /// `a ↦ u · a · u*`.
    pub fn conjugation(algebra: AlgebraDescriptor, u: &CMatrix) -> Result<Self> {
        let d = algebra.dim();
        if u.nrows() != d || u.ncols() != d {
            return Err(Error::ShapeMismatch {
                context: format!("conjugator is {}x{}, algebra dim {d}", u.nrows(), u.ncols()),
            });
        }
        let ua = u.adjoint();
        Ok(Self::from_action(algebra.clone(), algebra, |r, c| {
            let col = u.column(r);
            let row = ua.row(c);
            col * row
        }))
    }

    /// The transpose map `a ↦ aᵀ`.
    pub fn transpose_map(algebra: AlgebraDescriptor) -> Self {
        let d = algebra.dim();
        Self::from_action(algebra.clone(), algebra, |r, c| {
            let mut m = CMatrix::zeros(d, d);
            m[(c, r)] = ONE;
            m
        })
    }

    pub fn domain(&self) -> &AlgebraDescriptor {
        &self.domain
    }

    pub fn codomain(&self) -> &AlgebraDescriptor {
        &self.codomain
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn scaled(&self, z: Complex64) -> Self {
        LinearMapRep {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: &self.matrix * z,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a - b)
    }

    fn combine(&self, other: &Self, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Result<Self> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(Error::ShapeMismatch {
                context: "maps have different domains or codomains".into(),
            });
        }
        Ok(LinearMapRep {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: f(&self.matrix, &other.matrix),
        })
    }

    /// Post-compose with left multiplication: `a ↦ m · φ(a)`.
    pub fn left_multiplied(&self, m: &CMatrix) -> Self {
        let db = self.codomain.dim();
        let id = CMatrix::identity(db, db);
        LinearMapRep {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: linalg::kron(&id, m) * &self.matrix,
        }
    }

    /// Post-compose with two-sided multiplication: `a ↦ l · φ(a) · r`.
    pub fn compressed(&self, l: &CMatrix, r: &CMatrix) -> Self {
        LinearMapRep {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: linalg::kron(&r.transpose(), l) * &self.matrix,
        }
    }

    /// Image of the ambient coordinate `E_{rc}` (a column read).
    pub fn image_of_unit(&self, r: usize, c: usize) -> CMatrix {
        let da = self.domain.dim();
        let db = self.codomain.dim();
        let col = self.matrix.column(c * da + r);
        CMatrix::from_column_slice(db, db, col.as_slice())
    }

    /// Apply to a raw ambient matrix.
    pub fn apply_raw(&self, a: &CMatrix) -> CMatrix {
        let y = &self.matrix * linalg::vec_of(a);
        linalg::unvec(&y, self.codomain.dim())
    }

    /// Apply to an element of the domain algebra.
    pub fn apply(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        if a.algebra() != &self.domain {
            return Err(Error::ShapeMismatch {
                context: format!("element lives in {}, map domain is {}", a.algebra(), self.domain),
            });
        }
        Ok(AlgebraElement::new_unchecked(
            self.codomain.clone(),
            self.apply_raw(a.matrix()),
        ))
    }

    /// `φ(1)`, the distinguished n-potent of a unital domain.
    pub fn unit_image(&self) -> Result<AlgebraElement> {
        let unit = self.domain.unit()?;
        Ok(AlgebraElement::new_unchecked(
            self.codomain.clone(),
            self.apply_raw(&unit),
        ))
    }

    /// Maximum star-linearity defect over the canonical basis:
    /// `‖φ(E*) − φ(E)*‖ / max(1, ‖φ(E*)‖, ‖φ(E)‖)`.
    pub fn star_linearity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (r, c) in self.domain.basis_indices() {
            let img = self.image_of_unit(r, c);
            let img_star_arg = self.image_of_unit(c, r);
            let defect = linalg::fro_norm(&(&img_star_arg - img.adjoint()));
            let scale = rel_scale(linalg::fro_norm(&img).max(linalg::fro_norm(&img_star_arg)));
            worst = worst.max(defect / scale);
        }
        worst
    }

    pub fn is_star_linear(&self, tol: f64) -> bool {
        self.star_linearity_residual() <= tol
    }
}

/// How to verify n-multiplicativity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// All `basis_count^n` tuples of canonical basis units; errors with
    /// [`Error::BudgetExceeded`] above the budget.
    Exhaustive,
    /// `trials` seeded Ginibre tuples.
    Randomized { trials: usize, seed: u64 },
    /// Exhaustive when within budget, otherwise randomized.
    Auto { trials: usize, seed: u64 },
}

impl Default for VerifyMode {
    fn default() -> Self {
        VerifyMode::Auto {
            trials: 200,
            seed: 0,
        }
    }
}

/// A failing tuple.
#[derive(Debug, Clone)]
pub enum Witness {
    /// Ambient coordinates of the basis units in the offending tuple.
    BasisTuple(Vec<(usize, usize)>),
    /// A sampled offending tuple.
    Sampled { trial: usize, tuple: Vec<CMatrix> },
}

/// Result of a multiplicativity verification.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub pass: bool,
    pub max_residual: f64,
    pub witness: Option<Witness>,
    pub mode: &'static str,
    /// Tuples checked.
    pub checked: u64,
}

struct ExhaustiveCtx<'a> {
    images: &'a [CMatrix],
    basis: &'a [(usize, usize)],
    lookup: &'a [usize],
    da: usize,
    n: usize,
    prefixes: Vec<CMatrix>,
    prefix_zero: Vec<bool>,
    chains: Vec<Option<(usize, usize)>>,
    stack: Vec<usize>,
    max_residual: f64,
    worst: Vec<usize>,
    checked: u64,
}

impl ExhaustiveCtx<'_> {
    fn visit(&mut self, depth: usize) {
        if depth == self.n {
            self.checked += 1;
            let lhs: Option<&CMatrix> = match self.chains[depth] {
                Some((a, b)) => {
                    let idx = self.lookup[a * self.da + b];
                    debug_assert!(idx != usize::MAX, "chain endpoints stay in support");
                    Some(&self.images[idx])
                }
                None => None,
            };
            let rhs: Option<&CMatrix> = if self.prefix_zero[depth] {
                None
            } else {
                Some(&self.prefixes[depth])
            };
            let mut dsq = 0.0f64;
            let mut lsq = 0.0f64;
            let mut rsq = 0.0f64;
            let len = self.prefixes[depth].len();
            for i in 0..len {
                let l = lhs.map_or(ZERO, |m| m[i]);
                let r = rhs.map_or(ZERO, |m| m[i]);
                dsq += (l - r).norm_sqr();
                lsq += l.norm_sqr();
                rsq += r.norm_sqr();
            }
            let residual = dsq.sqrt() / rel_scale(lsq.sqrt().max(rsq.sqrt()));
            if residual > self.max_residual {
                self.max_residual = residual;
                self.worst = self.stack.clone();
            }
            return;
        }
        for i in 0..self.basis.len() {
            let (r, c) = self.basis[i];
            self.chains[depth + 1] = match self.chains[depth] {
                Some((a, b)) if b == r => Some((a, c)),
                Some(_) => None,
                None => None,
            };
            if self.prefix_zero[depth] {
                self.prefix_zero[depth + 1] = true;
            } else {
                let (head, tail) = self.prefixes.split_at_mut(depth + 1);
                head[depth].mul_to(&self.images[i], &mut tail[0]);
                self.prefix_zero[depth + 1] = tail[0].iter().all(|z| *z == ZERO);
            }
            self.stack.push(i);
            self.visit(depth + 1);
            self.stack.pop();
        }
    }
}

/// Verify `φ(a_1⋯a_n) = φ(a_1)⋯φ(a_n)`.
pub fn is_n_homomorphism(
    phi: &LinearMapRep,
    n: u32,
    tol: f64,
    mode: VerifyMode,
    budget: u128,
) -> Result<VerificationReport> {
    if n < 2 {
        return Err(Error::InvalidN { n: i64::from(n) });
    }
    let basis = phi.domain().basis_indices();
    let tuples = (basis.len() as u128)
        .checked_pow(n)
        .unwrap_or(u128::MAX);
    match mode {
        VerifyMode::Exhaustive => {
            if tuples > budget {
                return Err(Error::BudgetExceeded { tuples, budget });
            }
            Ok(exhaustive_check(phi, n, tol, &basis))
        }
        VerifyMode::Randomized { trials, seed } => Ok(randomized_check(phi, n, tol, trials, seed)),
        VerifyMode::Auto { trials, seed } => {
            // Exhaustive only while the flop estimate (one dB×dB multiply
            // per tuple) stays tractable, not just the tuple count.
            let db = phi.codomain().dim() as u128;
            let flops = tuples.saturating_mul(db * db * db);
            if tuples <= budget && flops <= 400_000_000 {
                Ok(exhaustive_check(phi, n, tol, &basis))
            } else {
                Ok(randomized_check(phi, n, tol, trials, seed))
            }
        }
    }
}

fn exhaustive_check(
    phi: &LinearMapRep,
    n: u32,
    tol: f64,
    basis: &[(usize, usize)],
) -> VerificationReport {
    let da = phi.domain().dim();
    let db = phi.codomain().dim();
    let images: Vec<CMatrix> = basis
        .iter()
        .map(|&(r, c)| phi.image_of_unit(r, c))
        .collect();
    let mut lookup = vec![usize::MAX; da * da];
    for (i, &(r, c)) in basis.iter().enumerate() {
        lookup[r * da + c] = i;
    }
    let n = n as usize;
    // Empty product starts as the chain (row, row); seed the recursion with
    // one explicit level instead so the chain state is always well-formed.
    let mut ctx = ExhaustiveCtx {
        images: &images,
        basis,
        lookup: &lookup,
        da,
        n,
        prefixes: vec![CMatrix::zeros(db, db); n + 1],
        prefix_zero: vec![false; n + 1],
        chains: vec![None; n + 1],
        stack: Vec::with_capacity(n),
        max_residual: 0.0,
        worst: Vec::new(),
        checked: 0,
    };
    for i in 0..basis.len() {
        let (r, c) = basis[i];
        ctx.chains[1] = Some((r, c));
        ctx.prefixes[1] = images[i].clone();
        ctx.prefix_zero[1] = images[i].iter().all(|z| *z == ZERO);
        ctx.stack.push(i);
        ctx.visit(1);
        ctx.stack.pop();
    }
    let pass = ctx.max_residual <= tol;
    let witness = if pass {
        None
    } else {
        Some(Witness::BasisTuple(
            ctx.worst.iter().map(|&i| basis[i]).collect(),
        ))
    };
    VerificationReport {
        pass,
        max_residual: ctx.max_residual,
        witness,
        mode: "exhaustive",
        checked: ctx.checked,
    }
}

fn randomized_check(
    phi: &LinearMapRep,
    n: u32,
    tol: f64,
    trials: usize,
    seed: u64,
) -> VerificationReport {
    let mut rng = crate::generate::rng_from(seed);
    let domain = phi.domain().clone();
    let mut max_residual = 0.0f64;
    let mut worst: Option<(usize, Vec<CMatrix>)> = None;
    for trial in 0..trials {
        let tuple: Vec<CMatrix> = (0..n)
            .map(|_| {
                let e = crate::generate::random_element(
                    &domain,
                    crate::generate::RandomStyle::Ginibre,
                    rng.random::<u64>(),
                )
                .expect("ginibre is always supported");
                let norm = e.operator_norm();
                if norm > 0.0 {
                    e.matrix() / Complex64::new(norm, 0.0)
                } else {
                    e.into_matrix()
                }
            })
            .collect();
        let mut product = tuple[0].clone();
        for a in &tuple[1..] {
            product = &product * a;
        }
        let lhs = phi.apply_raw(&product);
        let mut rhs = phi.apply_raw(&tuple[0]);
        for a in &tuple[1..] {
            rhs = rhs * phi.apply_raw(a);
        }
        let defect = linalg::fro_norm(&(&lhs - &rhs));
        let residual =
            defect / rel_scale(linalg::fro_norm(&lhs).max(linalg::fro_norm(&rhs)));
        if residual > max_residual {
            max_residual = residual;
            worst = Some((trial, tuple));
        }
    }
    let pass = max_residual <= tol;
    VerificationReport {
        pass,
        max_residual,
        witness: if pass {
            None
        } else {
            worst.map(|(trial, tuple)| Witness::Sampled { trial, tuple })
        },
        mode: "randomized",
        checked: trials as u64,
    }
}

/// Maximum 2-multiplicativity defect over basis pairs (always exhaustive;
/// the pair count is quadratic).
pub fn two_multiplicativity_residual(phi: &LinearMapRep) -> f64 {
    let basis = phi.domain().basis_indices();
    exhaustive_check(phi, 2, f64::INFINITY, &basis).max_residual
}

/// Assemble `φ = Σ_{k=1}^{n−1} ω_k ψ_k` from `n−1` mutually orthogonal
/// homomorphisms. By the converse direction of the decomposition theory
/// (`ω_k^n = ω_k`), the result is an n-homomorphism.
pub fn from_orthogonal_homs(
    parts: &[LinearMapRep],
    n: u32,
    tol: f64,
) -> Result<LinearMapRep> {
    if n < 2 {
        return Err(Error::InvalidN { n: i64::from(n) });
    }
    if parts.len() != (n - 1) as usize {
        return Err(Error::ShapeMismatch {
            context: format!("expected {} parts for n = {n}, got {}", n - 1, parts.len()),
        });
    }
    let domain = parts[0].domain().clone();
    let codomain = parts[0].codomain().clone();
    for (i, p) in parts.iter().enumerate() {
        if p.domain() != &domain || p.codomain() != &codomain {
            return Err(Error::ShapeMismatch {
                context: format!("part {i} has mismatched domain or codomain"),
            });
        }
        let residual = two_multiplicativity_residual(p);
        if residual > tol {
            return Err(Error::NotHomomorphism { index: i, residual });
        }
    }
    let basis = domain.basis_indices();
    for i in 0..parts.len() {
        for j in 0..parts.len() {
            if i == j {
                continue;
            }
            let mut worst = 0.0f64;
            for &(r1, c1) in &basis {
                let x = parts[i].image_of_unit(r1, c1);
                for &(r2, c2) in &basis {
                    let y = parts[j].image_of_unit(r2, c2);
                    let prod = &x * &y;
                    worst = worst.max(linalg::fro_norm(&prod));
                }
            }
            if worst > tol {
                return Err(Error::NotOrthogonal {
                    i,
                    j,
                    residual: worst,
                });
            }
        }
    }
    let sigma = npotent::roots_sigma(n)?;
    let mut acc = LinearMapRep::zero(domain, codomain);
    for (k, part) in parts.iter().enumerate() {
        acc = acc.add(&part.scaled(sigma.omega(k + 1)))?;
    }
    Ok(acc)
}

/// Outcome of decomposing an n-homomorphism on a unital domain.
#[derive(Debug, Clone)]
pub struct DecompositionResult {
    pub n: u32,
    /// The n-potent `e = φ(1)`.
    pub e: AlgebraElement,
    /// The associated homomorphism `ψ(a) = e^{n−2} φ(a)`; for even
    /// involutive maps, `φ` itself.
    pub psi: LinearMapRep,
    /// The odd-case splitting `(ψ₁, ψ₂)` with `φ = ψ₁ − ψ₂`.
    pub odd_split: Option<(LinearMapRep, LinearMapRep)>,
    /// Named verification residuals achieved by the decomposition.
    pub residuals: BTreeMap<String, f64>,
}

fn check_residuals(residuals: &BTreeMap<String, f64>, tol: f64) -> Result<()> {
    if let Some((what, residual)) = residuals
        .iter()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
    {
        if *residual > tol {
            return Err(Error::VerificationFailed {
                what: what.clone(),
                residual: *residual,
            });
        }
    }
    Ok(())
}

fn basis_defect(
    domain: &AlgebraDescriptor,
    mut f: impl FnMut(usize, usize) -> (CMatrix, CMatrix),
) -> f64 {
    let mut worst = 0.0f64;
    for (r, c) in domain.basis_indices() {
        let (x, y) = f(r, c);
        let defect = linalg::fro_norm(&(&x - &y));
        worst = worst.max(defect / rel_scale(linalg::fro_norm(&x).max(linalg::fro_norm(&y))));
    }
    worst
}

/// Decompose an n-homomorphism on a unital domain as `φ(a) = e·ψ(a) =
/// ψ(a)·e` with `e = φ(1)` an n-potent and `ψ(a) = e^{n−2}·φ(a)` a
/// homomorphism. All residuals are verified against `tol` and reported.
pub fn unital_decompose(phi: &LinearMapRep, n: u32, tol: f64) -> Result<DecompositionResult> {
    if n < 2 {
        return Err(Error::InvalidN { n: i64::from(n) });
    }
    if !phi.domain().is_unital() {
        return Err(Error::NonUnitalDomain);
    }
    let e = phi.unit_image()?;
    let e_mat = e.matrix().clone();
    let en = linalg::power(&e_mat, n);
    let e_npotency = linalg::fro_norm(&(&en - &e_mat))
        / rel_scale(e.operator_norm().powi(n as i32));
    let en2 = linalg::power(&e_mat, n - 2);
    let psi = phi.left_multiplied(&en2);

    let mut residuals = BTreeMap::new();
    residuals.insert("e_npotency".into(), e_npotency);
    residuals.insert("psi_multiplicativity".into(), two_multiplicativity_residual(&psi));
    residuals.insert(
        "phi_eq_e_psi".into(),
        basis_defect(phi.domain(), |r, c| {
            (phi.image_of_unit(r, c), &e_mat * psi.image_of_unit(r, c))
        }),
    );
    residuals.insert(
        "phi_eq_psi_e".into(),
        basis_defect(phi.domain(), |r, c| {
            (phi.image_of_unit(r, c), psi.image_of_unit(r, c) * &e_mat)
        }),
    );
    residuals.insert(
        "e_commutes_with_range".into(),
        basis_defect(phi.domain(), |r, c| {
            let img = phi.image_of_unit(r, c);
            (&e_mat * &img, img * &e_mat)
        }),
    );
    check_residuals(&residuals, tol)?;
    Ok(DecompositionResult {
        n,
        e,
        psi,
        odd_split: None,
        residuals,
    })
}

/// Split an involutive n-homomorphism per the parity dichotomy: for even n
/// the map itself is certified as a *-homomorphism with `e = φ(1)` a
/// projection; for odd n it is split as `φ = ψ₁ − ψ₂` with `ψ_i = p_i ψ p_i`
/// built from the orthogonal projections of `φ(1)`.
pub fn split_involutive(
    phi: &LinearMapRep,
    n: u32,
    tol: f64,
    mode: VerifyMode,
    budget: u128,
) -> Result<DecompositionResult> {
    let star = phi.star_linearity_residual();
    if star > tol {
        return Err(Error::NotInvolutive { residual: star });
    }
    let report = is_n_homomorphism(phi, n, tol, mode, budget)?;
    if !report.pass {
        return Err(Error::NotNHomomorphism {
            n,
            residual: report.max_residual,
        });
    }
    let mut result = unital_decompose(phi, n, tol)?;
    result
        .residuals
        .insert("star_linearity".into(), star);
    let e_mat = result.e.matrix().clone();
    if n % 2 == 0 {
        let two = two_multiplicativity_residual(phi);
        result.residuals.insert("two_multiplicativity".into(), two);
        result.residuals.insert(
            "e_idempotency".into(),
            linalg::fro_norm(&(&e_mat * &e_mat - &e_mat)) / rel_scale(result.e.operator_norm()),
        );
        result.residuals.insert(
            "e_selfadjointness".into(),
            linalg::hermiticity_defect(&e_mat) / rel_scale(result.e.operator_norm()),
        );
        check_residuals(&result.residuals, tol)?;
        // The map itself is the certified *-homomorphism.
        result.psi = phi.clone();
        Ok(result)
    } else {
        let class = npotent::classify_selfadjoint_npotent(&result.e, n, tol)?;
        let SelfAdjointClass::TripotentSplit { p1, p2, .. } = class else {
            unreachable!("odd n always yields a split");
        };
        let psi1 = result.psi.compressed(p1.matrix(), p1.matrix());
        let psi2 = result.psi.compressed(p2.matrix(), p2.matrix());
        let basis = phi.domain().basis_indices();
        let mut orth = 0.0f64;
        for &(r1, c1) in &basis {
            let x = psi1.image_of_unit(r1, c1);
            for &(r2, c2) in &basis {
                let y = psi2.image_of_unit(r2, c2);
                orth = orth.max(linalg::fro_norm(&(&x * &y)));
                orth = orth.max(linalg::fro_norm(&(y * x.clone())));
            }
        }
        result.residuals.insert("parts_orthogonality".into(), orth);
        result.residuals.insert(
            "reconstruction".into(),
            basis_defect(phi.domain(), |r, c| {
                (
                    phi.image_of_unit(r, c),
                    psi1.image_of_unit(r, c) - psi2.image_of_unit(r, c),
                )
            }),
        );
        result
            .residuals
            .insert("psi1_multiplicativity".into(), two_multiplicativity_residual(&psi1));
        result
            .residuals
            .insert("psi2_multiplicativity".into(), two_multiplicativity_residual(&psi2));
        result
            .residuals
            .insert("psi1_star_linearity".into(), psi1.star_linearity_residual());
        result
            .residuals
            .insert("psi2_star_linearity".into(), psi2.star_linearity_residual());
        check_residuals(&result.residuals, tol)?;
        result.odd_split = Some((psi1, psi2));
        Ok(result)
    }
}

/// Full orthogonal decomposition `φ = Σ_{k=1}^{n−1} ω_k ψ_k` with
/// `ψ_k(a) = e_k ψ(a) e_k` and `(e_k)` the n-partition of unity of `φ(1)`.
pub fn orthogonal_split_full(
    phi: &LinearMapRep,
    n: u32,
    tol: f64,
    mode: VerifyMode,
    budget: u128,
) -> Result<Vec<LinearMapRep>> {
    let report = is_n_homomorphism(phi, n, tol, mode, budget)?;
    if !report.pass {
        return Err(Error::NotNHomomorphism {
            n,
            residual: report.max_residual,
        });
    }
    let base = unital_decompose(phi, n, tol)?;
    let partition = npotent::partition_of_unity(&base.e, n, tol)?;
    let parts: Vec<LinearMapRep> = partition.idempotents()[1..]
        .iter()
        .map(|ek| base.psi.compressed(ek.matrix(), ek.matrix()))
        .collect();
    let sigma = npotent::roots_sigma(n)?;
    let reconstruction = basis_defect(phi.domain(), |r, c| {
        let db = phi.codomain().dim();
        let mut acc = CMatrix::zeros(db, db);
        for (k, part) in parts.iter().enumerate() {
            acc += part.image_of_unit(r, c) * sigma.omega(k + 1);
        }
        (phi.image_of_unit(r, c), acc)
    });
    if reconstruction > tol {
        return Err(Error::VerificationFailed {
            what: "orthogonal reconstruction".into(),
            residual: reconstruction,
        });
    }
    Ok(parts)
}

/// Report of the positivity ⟺ *-homomorphism equivalence check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PositiveNhomReport {
    pub n: u32,
    pub trials: usize,
    /// Every sampled `φ(b*b)` was positive.
    pub positive: bool,
    /// Most negative eigenvalue seen across samples, relative to scale.
    pub min_eigenvalue: f64,
    /// 2-multiplicativity residual over basis pairs.
    pub two_mult_residual: f64,
    /// Star-linearity residual over the basis.
    pub star_residual: f64,
    /// `φ` is a *-homomorphism at tolerance.
    pub star_hom: bool,
    /// positivity verdict coincides with the *-homomorphism verdict.
    pub corollary_agrees: bool,
    /// On unital domains: `φ(1) ≥ 0` (route (c) of the equivalence).
    pub unit_positive: Option<bool>,
}

/// Sample-based check of "positive n-homomorphism ⟺ *-homomorphism":
/// draws `a = b*b`, tests positivity of `φ(a)`, and cross-checks against
/// the 2-multiplicativity and star residuals. Report-only.
pub fn positive_nhom_check(
    phi: &LinearMapRep,
    n: u32,
    tol: f64,
    trials: usize,
    seed: u64,
) -> PositiveNhomReport {
    let two = two_multiplicativity_residual(phi);
    let star = phi.star_linearity_residual();
    let star_hom = two <= tol && star <= tol;
    let mut positive = true;
    let mut min_eig = f64::INFINITY;
    for t in 0..trials {
        let b = crate::generate::random_element(
            phi.domain(),
            crate::generate::RandomStyle::Ginibre,
            crate::generate::mix_seed(seed, t as u64),
        )
        .expect("ginibre is always supported");
        let a = &b.adjoint() * &b;
        let fa = phi.apply(&a).expect("domain element");
        if !fa.is_positive(tol) {
            positive = false;
        }
        let low = linalg::hermitian_eigenvalues(fa.matrix())
            .first()
            .copied()
            .unwrap_or(0.0);
        min_eig = min_eig.min(low / rel_scale(fa.operator_norm()));
    }
    let unit_positive = if phi.domain().is_unital() {
        Some(phi.unit_image().map(|e| e.is_positive(tol)).unwrap_or(false))
    } else {
        None
    };
    PositiveNhomReport {
        n,
        trials,
        positive,
        min_eigenvalue: if min_eig.is_finite() { min_eig } else { 0.0 },
        two_mult_residual: two,
        star_residual: star,
        star_hom,
        corollary_agrees: positive == star_hom,
        unit_positive,
    }
}

/// Report of the coherent factorization check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CoherentFactorizationReport {
    pub n: u32,
    pub k: u32,
    pub trials: usize,
    /// Worst defect of `φ(a_1)⋯φ(a_k) = φ(b_1)⋯φ(b_k)` across trials and
    /// factorization pairs.
    pub max_residual: f64,
    /// For `k = n` only: worst defect against `φ(a)` itself.
    pub n_mult_residual: Option<f64>,
    pub pass: bool,
}

/// Verify the coherent factorization property: for `a = a_1⋯a_k = b_1⋯b_k`
/// (trivial and polar factorizations of random invertible elements), the
/// image products coincide even though neither equals `φ(a)` in general.
pub fn coherent_factorization_check(
    phi: &LinearMapRep,
    n: u32,
    k: u32,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<CoherentFactorizationReport> {
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { k: k as usize, n });
    }
    if !phi.domain().is_unital() {
        return Err(Error::NonUnitalDomain);
    }
    let mut max_residual = 0.0f64;
    let mut n_mult: Option<f64> = if k == n { Some(0.0) } else { None };
    for t in 0..trials {
        let a = crate::generate::random_invertible(
            phi.domain(),
            crate::generate::mix_seed(seed, t as u64),
        )?;
        let image_product = |fs: &[AlgebraElement]| -> Result<CMatrix> {
            let mut acc: Option<CMatrix> = None;
            for f in fs {
                let img = phi.apply(f)?.into_matrix();
                acc = Some(match acc {
                    Some(m) => m * img,
                    None => img,
                });
            }
            Ok(acc.expect("k >= 1"))
        };
        let trivial = crate::algebra::factor(&a, k, crate::algebra::FactorMode::Trivial)?;
        let reversed = crate::algebra::factor(&a, k, crate::algebra::FactorMode::Reversed)?;
        let polar = crate::algebra::factor(&a, k, crate::algebra::FactorMode::Polar)?;
        let p_trivial = image_product(&trivial)?;
        let p_reversed = image_product(&reversed)?;
        let p_polar = image_product(&polar)?;
        for other in [&p_reversed, &p_polar] {
            let defect = linalg::fro_norm(&(&p_trivial - other));
            let scale = rel_scale(linalg::fro_norm(&p_trivial).max(linalg::fro_norm(other)));
            max_residual = max_residual.max(defect / scale);
        }
        if k == n {
            let fa = phi.apply(&a)?.into_matrix();
            let defect = linalg::fro_norm(&(&p_trivial - &fa));
            let scale = rel_scale(linalg::fro_norm(&p_trivial).max(linalg::fro_norm(&fa)));
            let d = defect / scale;
            n_mult = Some(n_mult.unwrap_or(0.0).max(d));
        }
    }
    Ok(CoherentFactorizationReport {
        n,
        k,
        trials,
        max_residual,
        n_mult_residual: n_mult,
        pass: max_residual <= tol && n_mult.map_or(true, |d| d <= tol),
    })
}

fn unitized_descriptor(desc: &AlgebraDescriptor) -> AlgebraDescriptor {
    match desc {
        AlgebraDescriptor::DirectSum { blocks } => {
            let mut blocks = blocks.clone();
            blocks.push(1);
            AlgebraDescriptor::DirectSum { blocks }
        }
        AlgebraDescriptor::Nilpotent { size } => AlgebraDescriptor::DirectSum {
            blocks: vec![*size, 1],
        },
    }
}

/// The unitization `φ⁺ : A⁺ → B⁺`, `φ⁺(a, λ) = (φ(a), λ)`, realized on the
/// enlarged direct-sum algebras.
///
/// `A⁺ = A ⊕ ℂ` is modeled by `(a, λ) ↦ diag(a + λ·1, λ)`; for a nilpotent
/// `A` the first block of the model is the full matrix algebra on the same
/// space (only the embedded copy of `A⁺` is meaningful, and the map
/// annihilates the rest). The unitization of an n-homomorphism generally
/// fails to be an n-homomorphism; the verification report exhibits a
/// witness tuple.
pub fn unitize(phi: &LinearMapRep) -> LinearMapRep {
    let da = phi.domain().dim();
    let db = phi.codomain().dim();
    let dom_plus = unitized_descriptor(phi.domain());
    let cod_plus = unitized_descriptor(phi.codomain());
    let embed = |m: &CMatrix, unit_slot: f64| -> CMatrix {
        let mut out = CMatrix::zeros(db + 1, db + 1);
        out.view_mut((0, 0), (db, db)).copy_from(m);
        out[(db, db)] = Complex64::new(unit_slot, 0.0);
        out
    };
    let domain = phi.domain().clone();
    LinearMapRep::from_action(dom_plus, cod_plus, move |r, c| {
        if r == da && c == da {
            // adjoined unit: (0, 1) ↦ (0, 1), i.e. diag(1_B − φ(1_A), 1)
            // in the model (the correction vanishes for nilpotent domains).
            let correction = match &domain {
                AlgebraDescriptor::DirectSum { .. } => {
                    let unit = CMatrix::identity(da, da);
                    phi.apply_raw(&unit)
                }
                AlgebraDescriptor::Nilpotent { .. } => CMatrix::zeros(db, db),
            };
            embed(&(CMatrix::identity(db, db) - correction), 1.0)
        } else if r < da && c < da && domain.supports(r, c) {
            embed(&phi.image_of_unit(r, c), 0.0)
        } else {
            CMatrix::zeros(db + 1, db + 1)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraDescriptor;

    fn m2() -> AlgebraDescriptor {
        AlgebraDescriptor::full_matrix(2).unwrap()
    }

    #[test]
    fn identity_map_applies_identically() {
        let id = LinearMapRep::identity(m2());
        let a = crate::generate::random_element(&m2(), crate::generate::RandomStyle::Ginibre, 1)
            .unwrap();
        let out = id.apply(&a).unwrap();
        assert_eq!(out.matrix(), a.matrix());
    }

    #[test]
    fn zero_map_annihilates() {
        let z = LinearMapRep::zero(m2(), m2());
        let a = crate::generate::random_element(&m2(), crate::generate::RandomStyle::Ginibre, 2)
            .unwrap();
        assert_eq!(z.apply(&a).unwrap().matrix(), &CMatrix::zeros(2, 2));
    }

    #[test]
    fn conjugation_matches_direct_computation() {
        let u = crate::generate::random_element(&m2(), crate::generate::RandomStyle::Unitary, 3)
            .unwrap();
        let phi = LinearMapRep::conjugation(m2(), u.matrix()).unwrap();
        let a = crate::generate::random_element(&m2(), crate::generate::RandomStyle::Ginibre, 4)
            .unwrap();
        let direct = u.matrix() * a.matrix() * u.matrix().adjoint();
        let via_map = phi.apply(&a).unwrap();
        assert!(linalg::fro_norm(&(via_map.matrix() - direct)) < 1e-12);
    }

    #[test]
    fn apply_rejects_wrong_domain() {
        let id = LinearMapRep::identity(m2());
        let a =
            AlgebraElement::zero(AlgebraDescriptor::full_matrix(3).unwrap());
        assert!(matches!(id.apply(&a), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn star_linearity_examples() {
        let u = crate::generate::random_element(&m2(), crate::generate::RandomStyle::Unitary, 5)
            .unwrap();
        let conj = LinearMapRep::conjugation(m2(), u.matrix()).unwrap();
        assert!(conj.is_star_linear(1e-12));
        let transpose = LinearMapRep::transpose_map(m2());
        assert!(transpose.is_star_linear(1e-14));
        // a ↦ N·a with N non-Hermitian: not star-linear
        let nmat = CMatrix::from_row_slice(
            2,
            2,
            &[ONE, Complex64::new(2.0, 1.0), ZERO, ONE],
        );
        let id = LinearMapRep::identity(m2());
        let lm = id.left_multiplied(&nmat);
        assert!(!lm.is_star_linear(1e-9));
    }

    #[test]
    fn star_homs_are_n_homs_for_all_n() {
        let u = crate::generate::random_element(&m2(), crate::generate::RandomStyle::Unitary, 6)
            .unwrap();
        let phi = LinearMapRep::conjugation(m2(), u.matrix()).unwrap();
        for n in 2..=5 {
            let rep =
                is_n_homomorphism(&phi, n, 1e-10, VerifyMode::Exhaustive, DEFAULT_BUDGET)
                    .unwrap();
            assert!(rep.pass, "n = {n}: residual {}", rep.max_residual);
        }
    }

    #[test]
    fn negated_star_hom_is_3_hom_but_not_2_hom() {
        let psi = LinearMapRep::identity(m2());
        let phi = psi.scaled(Complex64::new(-1.0, 0.0));
        let three =
            is_n_homomorphism(&phi, 3, 1e-10, VerifyMode::Exhaustive, DEFAULT_BUDGET).unwrap();
        assert!(three.pass);
        let two =
            is_n_homomorphism(&phi, 2, 1e-10, VerifyMode::Exhaustive, DEFAULT_BUDGET).unwrap();
        assert!(!two.pass);
        assert!(two.witness.is_some());
    }

    #[test]
    fn budget_is_enforced() {
        let alg = AlgebraDescriptor::full_matrix(3).unwrap();
        let id = LinearMapRep::identity(alg);
        let err = is_n_homomorphism(&id, 8, 1e-10, VerifyMode::Exhaustive, 1000);
        assert!(matches!(err, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn every_linear_map_on_nilpotent_algebra_is_m_hom() {
        for m in 2..=4u32 {
            let alg = AlgebraDescriptor::nilpotent(m as usize).unwrap();
            let phi = crate::generate::random_linear_map(&alg, &alg, u64::from(m));
            let rep = is_n_homomorphism(&phi, m, 0.0, VerifyMode::Exhaustive, DEFAULT_BUDGET)
                .unwrap();
            assert!(rep.pass, "m = {m}");
            assert_eq!(rep.max_residual, 0.0, "defect must vanish identically");
        }
    }
}
