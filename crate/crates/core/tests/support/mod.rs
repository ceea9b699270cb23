//! Independent numerical oracles for integration tests.
//!
//! Nothing here calls back into the library's decomposition routines; the
//! point is to cross-check the implementation through different algebraic
//! routes (repeated squaring for norms, characteristic polynomials plus
//! Durand–Kerner for spectra).

use nhom_core::{CMatrix, Complex64};

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn fro(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Operator norm via `‖a‖ = lim ‖(a*a)^{2^J}‖_F^{1/2^{J+1}}`, evaluated by
/// repeated squaring with running log-scale. Independent of any SVD or
/// eigenvalue code.
pub fn operator_norm_by_squaring(a: &CMatrix) -> f64 {
    let h = a.adjoint() * a;
    let d = h.nrows();
    if d == 0 {
        return 0.0;
    }
    let f0 = fro(&h);
    if f0 == 0.0 {
        return 0.0;
    }
    let mut m = &h / Complex64::new(f0, 0.0);
    let mut log_scale = f0.ln();
    const STEPS: u32 = 46;
    for _ in 0..STEPS {
        let sq = &m * &m;
        let f = fro(&sq);
        m = sq / Complex64::new(f, 0.0);
        log_scale = 2.0 * log_scale + f.ln();
    }
    // ‖h^{2^J}‖_F = exp(log_scale); σ_max(h) = that^(1/2^J), ‖a‖ = sqrt.
    let pow = (log_scale / 2f64.powi(STEPS as i32)).exp();
    pow.sqrt()
}

/// Monic characteristic polynomial coefficients (ascending degree,
/// length d+1) via the Faddeev–LeVerrier recurrence.
pub fn char_poly(a: &CMatrix) -> Vec<Complex64> {
    let d = a.nrows();
    let id = CMatrix::identity(d, d);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); d + 1];
    coeffs[d] = Complex64::new(1.0, 0.0);
    let mut m = id.clone();
    for k in 1..=d {
        let am = a * &m;
        let trace: Complex64 = (0..d).map(|i| am[(i, i)]).sum();
        let ck = -trace / Complex64::new(k as f64, 0.0);
        coeffs[d - k] = ck;
        m = am + &id * ck;
    }
    coeffs
}

/// All roots of a polynomial (ascending coefficients, leading nonzero) via
/// Durand–Kerner iteration.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let eval = |x: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in monic.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };
    let mut roots: Vec<Complex64> = (0..deg)
        .map(|i| Complex64::new(0.4, 0.9).powu(i as u32 + 1))
        .collect();
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 {
            break;
        }
    }
    roots
}

/// Greedy multiset pairing distance (test-local copy, so library and test
/// matching logic stay independent).
pub fn max_pair_distance(xs: &[Complex64], ys: &[Complex64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let mut remaining: Vec<Complex64> = ys.to_vec();
    let mut worst = 0.0f64;
    for x in xs {
        let (idx, dist) = remaining
            .iter()
            .enumerate()
            .map(|(i, y)| (i, (x - y).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .expect("nonempty");
        remaining.swap_remove(idx);
        worst = worst.max(dist);
    }
    worst
}
