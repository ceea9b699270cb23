//! Dense complex linear algebra helpers on top of nalgebra.
//!
//! Everything in the crate funnels matrix decompositions through this module
//! so tolerance and routing conventions (Hermitian detection, phase fixing,
//! least-squares residuals) live in one place.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::rel_scale;

pub type Complex64 = num_complex::Complex<f64>;
pub type CMatrix = DMatrix<Complex64>;

pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Frobenius norm.
pub fn fro_norm(m: &CMatrix) -> f64 {
    m.norm()
}

/// Operator norm: the largest singular value, computed as
/// `sqrt(λ_max(m* m))` through the Hermitian eigensolver.
///
/// nalgebra's complex SVD mis-converges on clustered singular values, so
/// everything norm-like in this crate goes through the Gram matrix route
/// instead.
pub fn operator_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// All singular values in descending order (square roots of the Gram
/// matrix spectrum, clamped at zero).
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    // use the smaller Gram side
    let g = if m.nrows() <= m.ncols() {
        m * m.adjoint()
    } else {
        m.adjoint() * m
    };
    let se = nalgebra::SymmetricEigen::new(g);
    let mut out: Vec<f64> = se.eigenvalues.iter().map(|v| v.max(0.0).sqrt()).collect();
    out.sort_by(|a, b| b.partial_cmp(a).unwrap());
    out
}

/// Numerical rank with relative threshold `max(tol, 1e-7) · max(1,
/// sigma_max)`. The floor covers the Gram-route noise on vanishing
/// singular values (`~sqrt(eps)·σ_max`).
pub fn rank(m: &CMatrix, tol: f64) -> usize {
    let sv = singular_values(m);
    let cutoff = tol.max(1e-7) * rel_scale(sv.first().copied().unwrap_or(0.0));
    sv.iter().filter(|s| **s > cutoff).count()
}

/// Hermiticity defect `‖m − m*‖` in operator norm.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    operator_norm(&(m - m.adjoint()))
}

/// True iff `‖m − m*‖ ≤ tol·max(1, ‖m‖)`.
pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    hermiticity_defect(m) <= tol * rel_scale(operator_norm(m))
}

/// Eigenvalues of the Hermitian part `(m + m*)/2`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    let se = nalgebra::SymmetricEigen::new(h);
    let mut vals: Vec<f64> = se.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// Full Hermitian eigendecomposition of `(m + m*)/2`: pairs sorted ascending
/// by eigenvalue, together with the unitary of column eigenvectors in the
/// same order.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()).scale(0.5);
    let se = nalgebra::SymmetricEigen::new(h);
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &se.eigenvectors.column(src));
    }
    (vals, vecs)
}

/// General complex eigenvalues via the Schur decomposition.
///
/// Hermitian inputs (within `herm_tol` relative) are routed to the symmetric
/// solver for accuracy; strictly triangular inputs short-circuit to their
/// diagonal.
pub fn eigenvalues(m: &CMatrix, herm_tol: f64) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if is_hermitian(m, herm_tol) {
        return Ok(hermitian_eigenvalues(m)
            .into_iter()
            .map(|x| Complex64::new(x, 0.0))
            .collect());
    }
    let schur = m
        .clone()
        .try_schur(f64::EPSILON, 0)
        .ok_or(Error::EigenFailure)?;
    let ev = schur.eigenvalues().ok_or(Error::EigenFailure)?;
    let mut out: Vec<Complex64> = ev.iter().copied().collect();
    sort_complex(&mut out);
    Ok(out)
}

/// Lexicographic (re, im) sort used everywhere a deterministic eigenvalue
/// order is needed.
pub fn sort_complex(vals: &mut [Complex64]) {
    vals.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
}

/// Greedy minimal-distance multiset matching between two equally sized
/// spectra. Returns the largest matched distance. Ties are broken by the
/// lexicographic (re, im) order of the sorted inputs.
pub fn match_spectra(lhs: &[Complex64], rhs: &[Complex64]) -> Result<f64> {
    if lhs.len() != rhs.len() {
        return Err(Error::ShapeMismatch {
            context: format!("spectra of sizes {} and {}", lhs.len(), rhs.len()),
        });
    }
    let mut a: Vec<Complex64> = lhs.to_vec();
    let mut b: Vec<Complex64> = rhs.to_vec();
    sort_complex(&mut a);
    sort_complex(&mut b);
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    // Pick the globally closest unmatched pair each round.
    for _ in 0..a.len() {
        let mut best: Option<(usize, usize, f64)> = None;
        for (i, x) in a.iter().enumerate() {
            if x.re.is_nan() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if used[j] {
                    continue;
                }
                let d = (x - y).norm();
                if best.map(|(_, _, bd)| d < bd).unwrap_or(true) {
                    best = Some((i, j, d));
                }
            }
        }
        let (i, j, d) = best.expect("nonempty spectra");
        a[i] = Complex64::new(f64::NAN, 0.0);
        used[j] = true;
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Unitary Q factor of the QR decomposition, with phases fixed so the
/// diagonal of R is real nonnegative. Deterministic for a fixed input.
pub fn qr_unitary(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let qr = m.clone().qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// k-th matrix power by repeated multiplication (`k = 0` gives the identity).
pub fn power(m: &CMatrix, k: u32) -> CMatrix {
    let n = m.nrows();
    let mut acc = CMatrix::identity(n, n);
    for _ in 0..k {
        acc = &acc * m;
    }
    acc
}

/// Fractional power `h^(1/k)` of a positive semidefinite matrix via its
/// Hermitian eigendecomposition; negative eigenvalues are clamped to zero.
pub fn psd_root(h: &CMatrix, k: u32) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(h);
    let n = vals.len();
    let mut d = CMatrix::zeros(n, n);
    for (i, v) in vals.iter().enumerate() {
        d[(i, i)] = Complex64::new(v.max(0.0).powf(1.0 / f64::from(k)), 0.0);
    }
    &vecs * d * vecs.adjoint()
}

/// Polar decomposition `m = u·p` with `p = (m*m)^{1/2}` PSD, through the
/// Hermitian eigendecomposition of the Gram matrix. For invertible inputs
/// `u` is unitary up to roundoff; near-zero singular directions of a
/// singular input are dropped from `u`.
pub fn polar(m: &CMatrix) -> (CMatrix, CMatrix) {
    let g = m.adjoint() * m;
    let (vals, vecs) = hermitian_eigen(&g);
    let n = m.nrows();
    let smax = vals.last().map(|v| v.max(0.0).sqrt()).unwrap_or(0.0);
    let cutoff = f64::EPSILON * rel_scale(smax) * n as f64;
    let mut s = CMatrix::zeros(n, n);
    let mut s_inv = CMatrix::zeros(n, n);
    for (i, v) in vals.iter().enumerate() {
        let sv = v.max(0.0).sqrt();
        s[(i, i)] = Complex64::new(sv, 0.0);
        s_inv[(i, i)] = Complex64::new(if sv > cutoff { 1.0 / sv } else { 0.0 }, 0.0);
    }
    let p = &vecs * &s * vecs.adjoint();
    let p_pinv = &vecs * s_inv * vecs.adjoint();
    let u = m * p_pinv;
    (u, p)
}

/// Least-squares solution of `x · m = b` (right division). Returns the
/// solution together with the achieved residual `‖x·m − b‖`.
///
/// Well-conditioned systems go through a Householder QR solve; (near-)
/// singular ones fall back to the pseudo-inverse of the normal equations
/// via the Hermitian eigensolver, which is accurate enough to certify the
/// large residuals those cases produce.
pub fn solve_right(m: &CMatrix, b: &CMatrix) -> Result<(CMatrix, f64)> {
    // x m = b  ⟺  m* x* = b*.
    let n = m.nrows();
    let ma = m.adjoint();
    let bt = b.adjoint();
    let qr = ma.clone().qr();
    let r = qr.r();
    let rmin = (0..n).map(|i| r[(i, i)].norm()).fold(f64::INFINITY, f64::min);
    let rmax = (0..n).map(|i| r[(i, i)].norm()).fold(0.0f64, f64::max);
    if rmin > f64::EPSILON * rel_scale(rmax) * (n as f64) * 16.0 {
        let mut xt = bt.clone();
        if qr.solve_mut(&mut xt) {
            let x = xt.adjoint();
            let residual = operator_norm(&(&x * m - b));
            return Ok((x, residual));
        }
    }
    // normal equations x (m m*) = b m*, pseudo-inverted spectrally
    let g = m * &ma;
    let (vals, vecs) = hermitian_eigen(&g);
    let gmax = vals.last().copied().unwrap_or(0.0).max(0.0);
    let cutoff = (f64::EPSILON * (n as f64)).powi(2) * rel_scale(gmax);
    let mut g_inv = CMatrix::zeros(n, n);
    for (i, v) in vals.iter().enumerate() {
        g_inv[(i, i)] = Complex64::new(if *v > cutoff { 1.0 / v } else { 0.0 }, 0.0);
    }
    let g_pinv = &vecs * g_inv * vecs.adjoint();
    let x = b * &ma * g_pinv;
    let residual = operator_norm(&(&x * m - b));
    Ok((x, residual))
}

/// vec(m) in column-stacked order, matching nalgebra's internal layout.
pub fn vec_of(m: &CMatrix) -> DVector<Complex64> {
    DVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vec_of`] for a square matrix of the given dimension.
pub fn unvec(v: &DVector<Complex64>, dim: usize) -> CMatrix {
    CMatrix::from_column_slice(dim, dim, v.as_slice())
}

/// Kronecker product, used to express `x ↦ a·x·b` on vectorized coordinates
/// as `(bᵀ ⊗ a)`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn operator_norm_of_diagonal_is_max_modulus() {
        let m = CMatrix::from_diagonal(&DVector::from_vec(vec![c(3.0, 0.0), c(0.0, -4.0)]));
        assert!((operator_norm(&m) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn solve_right_recovers_exact_solution() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c(2.0, 0.0), c(1.0, 1.0), c(0.0, -1.0), c(3.0, 0.0)],
        );
        let x_true = CMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.5), c(0.0, 0.0), c(-2.0, 0.0), c(1.0, -1.0)],
        );
        let b = &x_true * &m;
        let (x, res) = solve_right(&m, &b).unwrap();
        assert!(res < 1e-12);
        assert!(operator_norm(&(x - x_true)) < 1e-10);
    }

    #[test]
    fn vec_round_trip_is_column_stacked() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        let v = vec_of(&m);
        // column-stacked: (1,1),(2,1),(1,2),(2,2)
        assert_eq!(v[0], c(1.0, 0.0));
        assert_eq!(v[1], c(3.0, 0.0));
        assert_eq!(v[2], c(2.0, 0.0));
        assert_eq!(v[3], c(4.0, 0.0));
        assert_eq!(unvec(&v, 2), m);
    }

    #[test]
    fn polar_reconstructs_input() {
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0, 0.2),
                c(0.3, -0.4),
                c(0.0, 0.0),
                c(-0.5, 0.0),
                c(2.0, 0.0),
                c(0.1, 0.1),
                c(0.0, 0.7),
                c(0.0, 0.0),
                c(1.5, -0.3),
            ],
        );
        let (u, p) = polar(&m);
        assert!(operator_norm(&(&u * &p - &m)) < 1e-12);
        assert!(hermiticity_defect(&p) < 1e-12);
    }
}
