//! Randomized linear-algebra invariants behind the decay bounds.

use lyapdecay::densela::{cplx, hermitian_eig, hermitian_part, svd, CMat};
use lyapdecay::lyap::solve_lyapunov;
use lyapdecay::models::random_stable;
use proptest::prelude::*;

fn cmat_strategy(n: usize) -> impl Strategy<Value = CMat> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |vals| {
        CMat::from_fn(n, n, |i, j| {
            let (re, im) = vals[i * n + j];
            cplx(re, im)
        })
    })
}

fn dims() -> impl Strategy<Value = usize> {
    1usize..=6
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // sigma_k(M N) <= sigma_1(M) sigma_k(N)
    #[test]
    fn product_singular_values_bounded((n, seed_m, seed_n) in dims().prop_flat_map(|n| {
        (Just(n), cmat_strategy(n), cmat_strategy(n))
    })) {
        let sv_m = svd(&seed_m).unwrap().singular_values;
        let sv_n = svd(&seed_n).unwrap().singular_values;
        let sv_mn = svd(&(&seed_m * &seed_n)).unwrap().singular_values;
        for k in 0..n {
            prop_assert!(sv_mn[k] <= sv_m[0] * sv_n[k] + 1e-10);
        }
    }

    // lambda_k of the Hermitian part never exceeds sigma_k
    #[test]
    fn hermitian_part_eigenvalues_below_singular_values((n, m) in dims().prop_flat_map(|n| {
        (Just(n), cmat_strategy(n))
    })) {
        let sv = svd(&m).unwrap().singular_values;
        let h = hermitian_part(&m);
        let lam = hermitian_eig(&h, 1e-10).unwrap().eigenvalues;
        for k in 0..n {
            prop_assert!(lam[k] <= sv[k] + 1e-10, "k={k}: {} vs {}", lam[k], sv[k]);
        }
    }

    // Weyl: lambda_{i+j-1}(A + B) <= lambda_i(A) + lambda_j(B)
    #[test]
    fn weyl_inequalities((n, ma, mb) in dims().prop_flat_map(|n| {
        (Just(n), cmat_strategy(n), cmat_strategy(n))
    })) {
        let ha = hermitian_part(&ma);
        let hb = hermitian_part(&mb);
        let la = hermitian_eig(&ha, 1e-10).unwrap().eigenvalues;
        let lb = hermitian_eig(&hb, 1e-10).unwrap().eigenvalues;
        let ls = hermitian_eig(&(&ha + &hb), 1e-10).unwrap().eigenvalues;
        for i in 0..n {
            for j in 0..n {
                if i + j < n {
                    prop_assert!(ls[i + j] <= la[i] + lb[j] + 1e-10);
                }
            }
        }
    }

    // sigma_k(I - X/s1) = 1 - s_{n-k+1}/s1 for Hermitian positive
    // semidefinite X
    #[test]
    fn shifted_identity_singular_values((n, m) in dims().prop_flat_map(|n| {
        (Just(n), cmat_strategy(n))
    })) {
        let x = &m * m.adjoint(); // Hermitian PSD
        let s = hermitian_eig(&x, 1e-8).unwrap().eigenvalues;
        prop_assume!(s[0] > 1e-10);
        let e = CMat::identity(n, n) - &x / cplx(s[0], 0.0);
        let sv = svd(&e).unwrap().singular_values;
        for k in 0..n {
            let expected = 1.0 - s[n - 1 - k] / s[0];
            prop_assert!((sv[k] - expected).abs() < 1e-8, "k={k}: {} vs {expected}", sv[k]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // solver output is Hermitian positive semidefinite with a small residual
    #[test]
    fn solutions_are_positive_with_small_residual(seed in 0u64..1000, n in 2usize..10) {
        let p = random_stable(n, 1, seed, 1.0).unwrap();
        let sol = solve_lyapunov(&p).unwrap();
        prop_assert!(sol.residual < 1e-8);
        prop_assert!(sol.singular_values.iter().all(|&s| s >= -1e-10));
        // scaling B by c scales X by |c|^2
        let scaled = lyapdecay::lyap::LyapunovProblem::assume_controllable(
            p.a.clone(),
            &p.b * cplx(0.0, 3.0),
        ).unwrap();
        let sol2 = solve_lyapunov(&scaled).unwrap();
        prop_assert!((sol2.s1() - 9.0 * sol.s1()).abs() < 1e-8 * sol.s1().max(1.0));
    }
}
