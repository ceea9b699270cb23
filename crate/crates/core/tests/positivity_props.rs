//! Amplification closure, complete positivity, C*-identities, Harris
//! solvability, spectral inclusion, and contractivity over a generated
//! corpus of involutive n-homomorphisms.

mod support;

use nhom_core::generate::{mix_seed, random_element, random_involutive_nhom, RandomStyle};
use nhom_core::linalg;
use nhom_core::nhom::{is_n_homomorphism, VerifyMode, DEFAULT_BUDGET};
use nhom_core::positivity::{
    amplify, choi_matrix, contractivity_check, cstar_identity_check, harris_solvability,
    is_completely_positive, spectral_inclusion_check,
};
use nhom_core::{AlgebraDescriptor, Complex64};

fn md(d: usize) -> AlgebraDescriptor {
    AlgebraDescriptor::full_matrix(d).unwrap()
}

#[test]
fn amplification_closure() {
    // induced maps on k×k matrices stay involutive n-homomorphisms
    for n in [3u32, 4] {
        let inst = random_involutive_nhom(&md(2), &md(4), n, mix_seed(61, u64::from(n))).unwrap();
        for k in 1..=3usize {
            let amp = amplify(&inst.map, k);
            assert!(amp.is_star_linear(1e-9), "n={n} k={k}");
            let rep = is_n_homomorphism(
                &amp,
                n,
                1e-8,
                VerifyMode::Auto {
                    trials: 80,
                    seed: mix_seed(62, u64::from(n) * 10 + k as u64),
                },
                DEFAULT_BUDGET,
            )
            .unwrap();
            assert!(rep.pass, "n={n} k={k}: residual {}", rep.max_residual);
        }
    }
}

#[test]
fn amplify_direct_sum_layout_is_block_exact() {
    // amplifying ⊕M_di keeps images supported in the scaled blocks
    let dom = AlgebraDescriptor::direct_sum(vec![1, 2]).unwrap();
    let cod = AlgebraDescriptor::direct_sum(vec![2, 1]).unwrap();
    let inst = random_involutive_nhom(&dom, &cod, 2, 9).unwrap();
    let amp = amplify(&inst.map, 2);
    assert_eq!(
        amp.domain(),
        &AlgebraDescriptor::direct_sum(vec![2, 4]).unwrap()
    );
    assert_eq!(
        amp.codomain(),
        &AlgebraDescriptor::direct_sum(vec![4, 2]).unwrap()
    );
    for (r, c) in amp.domain().basis_indices() {
        let img = amp.image_of_unit(r, c);
        assert_eq!(amp.codomain().support_defect(&img), 0.0);
    }
}

#[test]
fn even_corpus_is_completely_positive() {
    for n in [2u32, 4, 6] {
        for trial in 0..8u64 {
            let inst = random_involutive_nhom(
                &md(2),
                &md(5),
                n,
                mix_seed(63, u64::from(n) * 100 + trial),
            )
            .unwrap();
            let choi = choi_matrix(&inst.map).unwrap();
            let scale = linalg::operator_norm(&choi.matrix).max(1.0);
            assert!(
                choi.min_eigenvalue() >= -1e-8 * scale,
                "n={n} trial {trial}: min eig {}",
                choi.min_eigenvalue()
            );
            assert!(is_completely_positive(&inst.map, 1e-8).unwrap());
        }
    }
}

#[test]
fn odd_corpus_contains_non_cp_instance() {
    let psi = nhom_core::LinearMapRep::identity(md(2));
    let phi = psi.scaled(Complex64::new(-1.0, 0.0));
    assert!(!is_completely_positive(&phi, 1e-8).unwrap());
    // and a generated instance with nonzero negative part is non-CP too
    for seed in 0..20u64 {
        let inst = random_involutive_nhom(&md(2), &md(5), 3, mix_seed(64, seed)).unwrap();
        if linalg::fro_norm(inst.psi_minus.matrix()) > 1e-9 {
            assert!(!is_completely_positive(&inst.map, 1e-8).unwrap());
            return;
        }
    }
    panic!("no odd instance with nonzero negative part");
}

#[test]
fn cstar_identities_hold_on_random_elements() {
    let mut worst = 0.0f64;
    for trial in 0..60u64 {
        let x = random_element(&md(5), RandomStyle::Ginibre, mix_seed(65, trial)).unwrap();
        for k in 1..=4u32 {
            let rep = cstar_identity_check(&x, k, 1e-9);
            assert!(rep.pass, "trial {trial} k={k}");
            worst = worst.max(rep.even_rel_err.max(rep.odd_rel_err));
        }
    }
    assert!(worst <= 1e-9, "worst relative error {worst}");
}

#[test]
fn cstar_identities_on_unitary() {
    let u = random_element(&md(3), RandomStyle::Unitary, 66).unwrap();
    for k in 1..=4 {
        let rep = cstar_identity_check(&u, k, 1e-10);
        assert!((rep.even_lhs - 1.0).abs() < 1e-10);
        assert!((rep.even_rhs - 1.0).abs() < 1e-10);
        assert!((rep.odd_lhs - 1.0).abs() < 1e-10);
        assert!((rep.odd_rhs - 1.0).abs() < 1e-10);
    }
}

#[test]
fn harris_dichotomy_on_lambda_grid() {
    for trial in 0..10u64 {
        let a = random_element(&md(4), RandomStyle::Ginibre, mix_seed(67, trial)).unwrap();
        for k in 1..=3u32 {
            let asa = a.matrix().adjoint() * a.matrix();
            let pk = linalg::power(&asa, k);
            let spectrum = linalg::hermitian_eigenvalues(&pk);
            let scale = linalg::operator_norm(&pk).max(1.0);
            // The least-squares verdict flips around dist ≈ (eps/tol)·scale,
            // so probe well inside (exact eigenvalues, offsets ≤ 1e-13·scale)
            // and well outside (offsets of 0.5·scale) the boundary band.
            let mut grid: Vec<Complex64> = Vec::new();
            for mu in &spectrum {
                if *mu > 1e-12 {
                    grid.push(Complex64::new(*mu, 0.0));
                    grid.push(Complex64::new(*mu, 1e-13 * scale));
                }
                grid.push(Complex64::new(mu + 0.5 * scale, 0.0));
            }
            grid.push(Complex64::new(-scale, 0.0));
            grid.push(Complex64::new(0.0, scale));
            grid.push(Complex64::new(linalg::operator_norm(&pk) + 1.0, 0.0));
            for lambda in grid {
                let res = harris_solvability(&a, lambda, k, 1e-7).unwrap();
                let outside = res.spectrum_distance > 1e-7;
                assert_eq!(
                    res.solvable(),
                    outside,
                    "trial {trial} k={k} λ={lambda}: residual {} dist {}",
                    res.residual,
                    res.spectrum_distance
                );
            }
        }
    }
}

#[test]
fn spectral_inclusion_across_odd_corpus() {
    for n in [3u32, 5, 7] {
        for trial in 0..4u64 {
            let inst = random_involutive_nhom(
                &md(3),
                &md(6),
                n,
                mix_seed(68, u64::from(n) * 10 + trial),
            )
            .unwrap();
            for sample in 0..12u64 {
                let a = random_element(&md(3), RandomStyle::Ginibre, mix_seed(69, sample))
                    .unwrap();
                let rep = spectral_inclusion_check(&inst.map, &a, n, 1e-7).unwrap();
                assert!(
                    rep.inclusion_holds,
                    "n={n} trial {trial} sample {sample}: worst {}",
                    rep.max_unmatched_distance
                );
            }
        }
    }
}

#[test]
fn negated_representation_reproduces_spectrum() {
    let psi = nhom_core::LinearMapRep::identity(md(3));
    let phi = psi.scaled(Complex64::new(-1.0, 0.0));
    let a = random_element(&md(3), RandomStyle::Ginibre, 70).unwrap();
    let rep = spectral_inclusion_check(&phi, &a, 3, 1e-9).unwrap();
    // lhs equals σ(a*a) exactly since (−a)*(−a) = a*a
    let dist = support::max_pair_distance(&rep.lhs_spectrum, &rep.rhs_spectrum);
    assert!(dist <= 1e-10);
}

#[test]
fn contractivity_across_both_parities() {
    for n in 2..=7u32 {
        let inst = random_involutive_nhom(&md(2), &md(6), n, mix_seed(71, u64::from(n))).unwrap();
        let rep = contractivity_check(&inst.map, 400, 1e-8, mix_seed(72, u64::from(n)));
        assert!(
            rep.max_ratio <= 1.0 + 1e-8,
            "n={n}: max ratio {}",
            rep.max_ratio
        );
    }
    // −ψ for a unital representation: ratio exactly 1
    let psi = nhom_core::LinearMapRep::identity(md(3));
    let phi = psi.scaled(Complex64::new(-1.0, 0.0));
    let rep = contractivity_check(&phi, 1000, 1e-9, 73);
    assert!((rep.max_ratio - 1.0).abs() <= 1e-12);
}
