//! Matrix families with known analytic structure: the finite-difference
//! discretization of d/dx - 1, the bidiagonal Jordan family, the completely
//! solvable 2x2 case, companion/Krylov factorizations, and a seeded random
//! generator for property tests.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::densela::{self, bidiagonal, cplx, CMat, C64};
use crate::error::{Error, Result};
use crate::lyap::{solve_lyapunov, LyapunovProblem};

/// Companion/Krylov machinery is restricted to small n by default; the
/// Krylov matrix is severely graded and the factorization check loses all
/// accuracy beyond this.
pub const KRYLOV_SIZE_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    FdOperator,
    Jordan,
    TwoByTwo,
    Custom,
}

/// Closed-form reference quantities known for a family; populated only
/// where they exist.
#[derive(Debug, Clone, Default)]
pub struct ClosedForms {
    /// W(A) is the disk |z - center| <= radius.
    pub w_disk: Option<(C64, f64)>,
    /// Numerical abscissa.
    pub omega: Option<f64>,
    /// Exact solution X (2x2 family).
    pub exact_x: Option<CMat>,
    /// Exact s2/s1 (2x2 family).
    pub ratio_s2_s1: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ModelProblem {
    pub family: Family,
    pub n: usize,
    pub alpha: Option<f64>,
    pub t: Option<f64>,
    pub problem: LyapunovProblem,
    pub closed: ClosedForms,
}

/// Forward finite differences for d/dx - 1 on a uniform grid with spacing
/// 1/n: bidiagonal with diagonal -1-n and superdiagonal n. B is a constant
/// vector normalized to unit norm (the ratios s_k/s_1 do not depend on the
/// constant).
pub fn fd_operator(n: usize) -> Result<ModelProblem> {
    if n < 2 {
        return Err(Error::InvalidInput("fd_operator requires n >= 2".into()));
    }
    let a = bidiagonal(n, -1.0 - n as f64, n as f64);
    let b = CMat::from_element(n, 1, cplx(1.0 / (n as f64).sqrt(), 0.0));
    let radius = n as f64 * (PI / (n as f64 + 1.0)).cos();
    let center = cplx(-1.0 - n as f64, 0.0);
    let omega = -1.0 - n as f64 * (1.0 - (PI / (n as f64 + 1.0)).cos());
    Ok(ModelProblem {
        family: Family::FdOperator,
        n,
        alpha: None,
        t: None,
        // Controllable for any constant B (single Jordan block, last entry
        // of B nonzero); the Krylov rank test breaks down for large n.
        problem: LyapunovProblem::assume_controllable(a, b)?,
        closed: ClosedForms {
            w_disk: Some((center, radius)),
            omega: Some(omega),
            ..Default::default()
        },
    })
}

/// Jordan-type bidiagonal family A = -I + alpha S of dimension n. Default
/// B = [1, ..., 1]^T.
pub fn jordan_family(n: usize, alpha: f64, b: Option<CMat>) -> Result<ModelProblem> {
    if n < 2 || alpha <= 0.0 {
        return Err(Error::InvalidInput(
            "jordan_family requires n >= 2 and alpha > 0".into(),
        ));
    }
    let a = bidiagonal(n, -1.0, alpha);
    let b = b.unwrap_or_else(|| CMat::from_element(n, 1, cplx(1.0, 0.0)));
    let radius = alpha * (PI / (n as f64 + 1.0)).cos();
    Ok(ModelProblem {
        family: Family::Jordan,
        n,
        alpha: Some(alpha),
        t: None,
        problem: LyapunovProblem::assume_controllable(a, b)?,
        closed: ClosedForms {
            w_disk: Some((cplx(-1.0, 0.0), radius)),
            omega: Some(-1.0 + radius),
            ..Default::default()
        },
    })
}

/// Exact 2x2 solution X for A = [[-1, alpha], [0, -1]], B = [t, 1]^T.
pub fn exact_two_by_two_x(alpha: f64, t: f64) -> CMat {
    CMat::from_row_slice(
        2,
        2,
        &[
            cplx(0.25 * (2.0 * t * t + 2.0 * alpha * t + alpha * alpha), 0.0),
            cplx(0.25 * (alpha + 2.0 * t), 0.0),
            cplx(0.25 * (alpha + 2.0 * t), 0.0),
            cplx(0.5, 0.0),
        ],
    )
}

/// s2/s1 of a 2x2 Hermitian positive definite matrix from its trace and
/// determinant.
pub fn ratio_from_trace_det(x: &CMat) -> f64 {
    let tr = (x[(0, 0)] + x[(1, 1)]).re;
    let det = (x[(0, 0)] * x[(1, 1)] - x[(0, 1)] * x[(1, 0)]).re;
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    (tr - disc) / (tr + disc)
}

/// The completely solvable 2x2 family with its exact solution.
pub fn two_by_two(alpha: f64, t: f64) -> Result<ModelProblem> {
    if alpha <= 0.0 {
        return Err(Error::InvalidInput("two_by_two requires alpha > 0".into()));
    }
    let a = bidiagonal(2, -1.0, alpha);
    // second component of B must be nonzero for controllability; it is 1 here
    let b = CMat::from_column_slice(2, 1, &[cplx(t, 0.0), cplx(1.0, 0.0)]);
    let x = exact_two_by_two_x(alpha, t);
    let ratio = ratio_from_trace_det(&x);
    Ok(ModelProblem {
        family: Family::TwoByTwo,
        n: 2,
        alpha: Some(alpha),
        t: Some(t),
        problem: LyapunovProblem::new(a, b)?,
        closed: ClosedForms {
            w_disk: Some((cplx(-1.0, 0.0), alpha / 2.0)),
            omega: Some(alpha / 2.0 - 1.0),
            exact_x: Some(x),
            ratio_s2_s1: Some(ratio),
        },
    })
}

/// Piecewise worst-case ratio: alpha^2/4 for alpha <= 2, else 4/alpha^2.
pub fn worst_case_ratio(alpha: f64) -> f64 {
    if alpha <= 2.0 {
        alpha * alpha / 4.0
    } else {
        4.0 / (alpha * alpha)
    }
}

/// Worst-case right-hand side parameter t* = -alpha/2 and the attained
/// ratio s2/s1.
pub fn worst_case_t(alpha: f64) -> (f64, f64) {
    (-alpha / 2.0, worst_case_ratio(alpha))
}

/// Numerically maximize the exact trace/det ratio over t in [-10 alpha,
/// 10 alpha]: coarse grid then golden-section refinement.
pub fn maximize_ratio_over_t(alpha: f64) -> (f64, f64) {
    let f = |t: f64| ratio_from_trace_det(&exact_two_by_two_x(alpha, t));
    let (lo, hi) = (-10.0 * alpha, 10.0 * alpha);
    let grid = 2000;
    let mut best_t = lo;
    let mut best = f(lo);
    for i in 1..=grid {
        let t = lo + (hi - lo) * i as f64 / grid as f64;
        let v = f(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    let h = (hi - lo) / grid as f64;
    let (mut a, mut b) = (best_t - h, best_t + h);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut c, mut d) = (b - phi * (b - a), a + phi * (b - a));
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-10 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

/// Coefficients c_0..c_{n-1} of the characteristic polynomial, expanded from
/// the computed eigenvalues of A.
fn charpoly_coefficients(a: &CMat) -> Result<Vec<C64>> {
    let eigs = densela::eigenvalues(a)?;
    // poly starts as 1; multiply by (z - lambda) per eigenvalue
    let mut coeffs = vec![cplx(1.0, 0.0)];
    for lambda in eigs {
        let mut next = vec![cplx(0.0, 0.0); coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= lambda * c;
        }
        coeffs = next;
    }
    coeffs.truncate(a.nrows()); // drop the leading 1
    Ok(coeffs)
}

/// Companion matrix, unnormalized Krylov matrix K = [B AB ... A^{n-1}B], and
/// the canonical Gramian G solving A_c G + G A_c* = -e1 e1*, so that
/// X = K G K*.
pub fn companion_krylov(p: &LyapunovProblem, cap_override: bool) -> Result<(CMat, CMat, CMat)> {
    let n = p.n();
    if p.b.ncols() != 1 || p.rank_b != 1 {
        return Err(Error::InvalidInput(
            "companion_krylov requires a rank-1 right-hand side".into(),
        ));
    }
    if n > KRYLOV_SIZE_CAP && !cap_override {
        return Err(Error::TooLarge {
            n,
            cap: KRYLOV_SIZE_CAP,
        });
    }
    if p.krylov_rank < n {
        return Err(Error::NotControllable {
            rank: p.krylov_rank,
            n,
        });
    }
    let mut k = CMat::zeros(n, n);
    let mut col = p.b.clone();
    for j in 0..n {
        k.set_column(j, &col.column(0));
        if j + 1 < n {
            col = &p.a * col;
        }
    }
    let c = charpoly_coefficients(&p.a)?;
    let mut a_c = CMat::zeros(n, n);
    for i in 1..n {
        a_c[(i, i - 1)] = cplx(1.0, 0.0);
    }
    for i in 0..n {
        a_c[(i, n - 1)] = -c[i];
    }
    let mut e1 = CMat::zeros(n, 1);
    e1[(0, 0)] = cplx(1.0, 0.0);
    let companion = LyapunovProblem::assume_controllable(a_c.clone(), e1)?;
    let g = solve_lyapunov(&companion)?.x;
    Ok((k, a_c, g))
}

/// Hautus margin: min over eigenvalues lambda of sigma_min([A - lambda I, B]),
/// relative to ||A|| + ||B||. Positive iff (A, B) is controllable; unlike the
/// Krylov-rank test it does not degrade exponentially with n.
pub fn hautus_margin(a: &CMat, b: &CMat) -> Result<f64> {
    let n = a.nrows();
    let scale = a.norm() + b.norm();
    let mut margin = f64::INFINITY;
    for lambda in densela::eigenvalues(a)? {
        let mut m = CMat::zeros(n, n + b.ncols());
        m.view_mut((0, 0), (n, n)).copy_from(&(a - CMat::identity(n, n) * lambda));
        m.view_mut((0, n), (n, b.ncols())).copy_from(b);
        let sv = densela::svd(&m)?.singular_values;
        margin = margin.min(sv[n - 1] / scale);
    }
    Ok(margin)
}

const HAUTUS_TOL: f64 = 1e-8;

/// Deterministic random stable problem A = Lambda + alpha S with Lambda
/// diagonal (Re log-uniform in [-10, -0.1], Im uniform in [-5, 5]) and S
/// strictly upper triangular; B is resampled until (A, B) passes the
/// controllability test (Hautus margin — the Krylov-rank test is
/// exponentially pessimistic at these sizes).
pub fn random_stable(n: usize, r: usize, seed: u64, alpha: f64) -> Result<LyapunovProblem> {
    if n == 0 || r == 0 || r > n {
        return Err(Error::InvalidInput(format!(
            "random_stable: invalid sizes n={n}, r={r}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = CMat::zeros(n, n);
    for i in 0..n {
        let re = -(10f64.powf(rng.gen_range(-1.0..1.0)));
        let im = rng.gen_range(-5.0..5.0);
        a[(i, i)] = cplx(re, im);
    }
    for i in 0..n {
        for j in i + 1..n {
            a[(i, j)] = cplx(
                alpha * rng.gen_range(-1.0..1.0),
                alpha * rng.gen_range(-1.0..1.0),
            );
        }
    }
    const MAX_ATTEMPTS: usize = 10;
    for _ in 0..MAX_ATTEMPTS {
        let b = CMat::from_fn(n, r, |_, _| {
            cplx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        if hautus_margin(&a, &b)? > HAUTUS_TOL {
            return LyapunovProblem::assume_controllable(a, b);
        }
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
    })
}
