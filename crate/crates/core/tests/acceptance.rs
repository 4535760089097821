//! Acceptance gate: one test per criterion, each printing a single
//! pass/fail line (visible with --nocapture; cargo prints captured output
//! for failing tests automatically).

use std::f64::consts::PI;
use std::time::Instant;

use lyapdecay::bounds::{
    adi_error_bound, asz_bound, cor_genbnd, cor_s1n, eig_bound, krylov_bound, make_shifts,
    nr_bound, psa_bound, BoundReport, ShiftStrategy, CROUZEIX_CONSTANT,
};
use lyapdecay::densela::{bidiagonal, cplx, spectral_norm, CMat};
use lyapdecay::lyap::{solve_lyapunov, solve_lyapunov_oracle, LyapunovProblem, SolutionSpectrum};
use lyapdecay::models::{
    companion_krylov, fd_operator, jordan_family, maximize_ratio_over_t, random_stable,
    two_by_two, worst_case_ratio,
};
use lyapdecay::spectral::{
    default_box, epsilon_contour, numerical_range, resolvent_grid, hermitian_part_spectrum,
};

struct Criterion {
    num: usize,
    what: &'static str,
}

impl Criterion {
    fn new(num: usize, what: &'static str) -> Self {
        Self { num, what }
    }

    fn pass(self) {
        println!("[{:>2}] {:<58} pass", self.num, self.what);
    }

    fn fail(&self, detail: &str) -> ! {
        println!("[{:>2}] {:<58} FAIL: {detail}", self.num, self.what);
        panic!("criterion {} failed: {detail}", self.num);
    }
}

fn check(c: &Criterion, ok: bool, detail: &str) {
    if !ok {
        c.fail(detail);
    }
}

#[test]
fn two_by_two_closed_form_grid() {
    let c = Criterion::new(1, "2x2 worst-case ratio matches the piecewise formula");
    let start = Instant::now();
    let points = 200;
    let mut max_err = 0.0f64;
    let mut peak = 0.0f64;
    for i in 0..points {
        let alpha = 0.1 + (10.0 - 0.1) * i as f64 / (points - 1) as f64;
        let model = two_by_two(alpha, -alpha / 2.0).unwrap();
        let sol = solve_lyapunov(&model.problem).unwrap();
        let err = (sol.ratio(2) - worst_case_ratio(alpha)).abs();
        max_err = max_err.max(err);
        peak = peak.max(sol.ratio(2));
    }
    let model = two_by_two(2.0, -1.0).unwrap();
    let sol = solve_lyapunov(&model.problem).unwrap();
    let elapsed = start.elapsed();
    check(&c, max_err <= 1e-10, &format!("max error {max_err:e}"));
    check(&c, (sol.ratio(2) - 1.0).abs() <= 1e-10, "peak at alpha=2 is not 1");
    check(&c, peak <= 1.0 + 1e-12, &format!("ratio exceeded 1: {peak}"));
    check(&c, elapsed.as_secs_f64() < 1.0, &format!("took {elapsed:?}"));
    c.pass();
}

#[test]
fn two_by_two_worst_case_t_recovery() {
    let c = Criterion::new(2, "numerical maximization recovers t* = -alpha/2");
    for alpha in [0.5, 1.0, 2.0, 4.0, 8.0] {
        let (t_star, _) = maximize_ratio_over_t(alpha);
        check(
            &c,
            (t_star + alpha / 2.0).abs() <= 1e-6,
            &format!("alpha={alpha}: t*={t_star}"),
        );
    }
    c.pass();
}

#[test]
fn fd_closed_forms() {
    let c = Criterion::new(3, "fd family: abscissa formula and disk-shaped range");
    let start = Instant::now();
    for n in [16usize, 32, 64, 128, 256] {
        let model = fd_operator(n).unwrap();
        let nf = n as f64;
        let omega_exact = -1.0 - nf * (1.0 - (PI / (nf + 1.0)).cos());
        let omega = hermitian_part_spectrum(&model.problem.a).unwrap()[0];
        check(
            &c,
            (omega - omega_exact).abs() <= 1e-8,
            &format!("n={n}: omega {omega} vs {omega_exact}"),
        );
        let nr = numerical_range(&model.problem.a, 64).unwrap();
        let radius = nf * (PI / (nf + 1.0)).cos();
        let center = cplx(-1.0 - nf, 0.0);
        let max_dev = nr
            .points
            .iter()
            .map(|z| ((z - center).norm() - radius).abs())
            .fold(0.0, f64::max);
        check(&c, max_dev <= 1e-6, &format!("n={n}: radial deviation {max_dev:e}"));
    }
    let elapsed = start.elapsed();
    check(&c, elapsed.as_secs_f64() < 30.0, &format!("took {elapsed:?}"));
    c.pass();
}

#[test]
fn fd_decay_slows_with_n() {
    let c = Criterion::new(4, "fd decay curves: ratios nondecreasing in n for k <= 20");
    let mut prev: Option<SolutionSpectrum> = None;
    for n in [16usize, 32, 64, 128, 256] {
        let model = fd_operator(n).unwrap();
        let sol = solve_lyapunov(&model.problem).unwrap();
        if let Some(prev) = &prev {
            for k in 1..=20.min(prev.singular_values.len()) {
                check(
                    &c,
                    sol.ratio(k) >= prev.ratio(k) - 1e-12,
                    &format!("n={n} k={k}: {} < {}", sol.ratio(k), prev.ratio(k)),
                );
            }
        }
        prev = Some(sol);
    }
    c.pass();
}

#[test]
fn jordan_decay_peaks_near_alpha_one() {
    let c = Criterion::new(5, "bidiagonal family: slowest decay at alpha = 1");
    let ratio_at = |alpha: f64| -> f64 {
        let model = jordan_family(64, alpha, None).unwrap();
        solve_lyapunov(&model.problem).unwrap().ratio(10)
    };
    let r_half = ratio_at(0.5);
    let r_one = ratio_at(1.0);
    let r_two = ratio_at(2.0);
    let r_four = ratio_at(4.0);
    check(&c, r_one > r_half, &format!("{r_one} vs alpha=1/2 {r_half}"));
    check(&c, r_one > r_two, &format!("{r_one} vs alpha=2 {r_two}"));
    check(&c, r_one > r_four, &format!("{r_one} vs alpha=4 {r_four}"));
    check(&c, r_four < r_two, &format!("alpha=4 {r_four} not below alpha=2 {r_two}"));
    c.pass();
}

#[test]
fn abscissa_bound_property_suite() {
    let c = Criterion::new(6, "two-sided abscissa bounds hold on 200 random instances");
    let start = Instant::now();
    let slack = -1e-9;
    for i in 0..200u64 {
        let n = 2 + (i as usize * 7) % 19; // 2..=20
        let r = 1 + (i as usize) % 3.min(n);
        let alpha = (i % 11) as f64;
        let p = random_stable(n, r, 9000 + i, alpha).unwrap();
        let sol = solve_lyapunov(&p).unwrap();
        for row in lyapdecay::bounds::abscissa_bounds(&sol, &p.a, &p.b).unwrap() {
            check(
                &c,
                row.lower <= row.omega_ratio - slack && row.omega_ratio <= row.upper - slack,
                &format!(
                    "i={i} k={}: {} <= {} <= {}",
                    row.k, row.lower, row.omega_ratio, row.upper
                ),
            );
        }
        let (lo, omega, hi) = cor_s1n(&sol, &p.a, &p.b).unwrap();
        check(&c, lo <= omega - slack && omega <= hi - slack, &format!("i={i}: strip"));
        let report = cor_genbnd(Some(&sol), &p.a).unwrap();
        check(
            &c,
            report.min_slack().unwrap() >= slack,
            &format!("i={i}: trailing bound slack {:?}", report.min_slack()),
        );
    }
    let elapsed = start.elapsed();
    check(&c, elapsed.as_secs_f64() < 60.0, &format!("took {elapsed:?}"));
    c.pass();
}

#[test]
fn trailing_bound_sharpness_and_limit() {
    let c = Criterion::new(7, "trailing bound: sharp at alpha=2, loose at alpha=100");
    // alpha = 2, t = -1: bound and actual ratio both equal 1
    let model = two_by_two(2.0, -1.0).unwrap();
    let sol = solve_lyapunov(&model.problem).unwrap();
    let report = cor_genbnd(Some(&sol), &model.problem.a).unwrap();
    let e = report.entries.iter().find(|e| e.index == 2).unwrap();
    check(
        &c,
        (e.bound - e.actual.unwrap()).abs() <= 1e-12,
        &format!("gap {:e}", (e.bound - e.actual.unwrap()).abs()),
    );
    // alpha = 100: closed-form bound 0.51005 vs actual 4/alpha^2 = 4e-4
    let alpha = 100.0f64;
    let a_norm = (1.0 + alpha * alpha / 2.0 + alpha * (alpha * alpha / 4.0 + 1.0).sqrt()).sqrt();
    let omega1 = alpha / 2.0 - 1.0;
    let bound = 1.0 - omega1 / a_norm;
    check(&c, (bound - 0.51005).abs() <= 1e-4, &format!("bound {bound}"));
    let model = two_by_two(alpha, -alpha / 2.0).unwrap();
    let sol = solve_lyapunov(&model.problem).unwrap();
    check(
        &c,
        (sol.ratio(2) - 4e-4).abs() <= 1e-8,
        &format!("actual {}", sol.ratio(2)),
    );
    c.pass();
}

fn all_reports(p: &LyapunovProblem, sol: &SolutionSpectrum, eps: f64) -> Vec<BoundReport> {
    let a = &p.a;
    let shifts = make_shifts(a, ShiftStrategy::LogSpaced, 4).unwrap();
    let nr = numerical_range(a, 96).unwrap();
    let gbox = default_box(&nr, eps, spectral_norm(a).unwrap());
    let grid = resolvent_grid(a, gbox, 96).unwrap();
    let contour = epsilon_contour(&grid, eps).unwrap();
    let mut reports = vec![
        adi_error_bound(Some(sol), a, &shifts, p.rank_b).unwrap(),
        eig_bound(Some(sol), a, &shifts, p.rank_b).unwrap(),
        nr_bound(Some(sol), a, &shifts, p.rank_b, &nr, CROUZEIX_CONSTANT).unwrap(),
        psa_bound(Some(sol), a, &shifts, p.rank_b, &contour).unwrap(),
        asz_bound(Some(sol), a, &p.b).unwrap(),
        cor_genbnd(Some(sol), a).unwrap(),
    ];
    if p.n() <= lyapdecay::models::KRYLOV_SIZE_CAP {
        reports.push(krylov_bound(Some(sol), p, false).unwrap());
    }
    reports
}

#[test]
fn bound_soundness_on_model_families() {
    let c = Criterion::new(8, "every valid bound dominates the realized decay");
    let mut cases: Vec<(String, LyapunovProblem, f64)> = Vec::new();
    for n in [16usize, 32] {
        let m = fd_operator(n).unwrap();
        let eps = 0.05 * spectral_norm(&m.problem.a).unwrap();
        cases.push((format!("fd n={n}"), m.problem, eps));
    }
    for alpha in [0.5, 1.0, 2.0, 4.0] {
        let m = jordan_family(64, alpha, None).unwrap();
        cases.push((format!("jordan alpha={alpha}"), m.problem, 0.2));
    }
    for (label, p, eps) in cases {
        let sol = solve_lyapunov(&p).unwrap();
        for report in all_reports(&p, &sol, eps) {
            if !report.valid {
                continue;
            }
            let slack = report.min_slack();
            check(
                &c,
                slack.map_or(true, |s| s >= -1e-9),
                &format!("{label}: {} slack {slack:?}", report.name),
            );
        }
    }
    c.pass();
}

#[test]
fn krylov_factorization_and_bound() {
    let c = Criterion::new(9, "X = KGK* on 50 random instances; bound dominates");
    for i in 0..50u64 {
        let n = 2 + (i as usize) % 7; // 2..=8
        let p = random_stable(n, 1, 20_000 + i, 1.0 + (i % 5) as f64).unwrap();
        let sol = solve_lyapunov(&p).unwrap();
        let (k, _, g) = companion_krylov(&p, false).unwrap();
        let reconstructed = &k * &g * k.adjoint();
        let rel = (&reconstructed - &sol.x).norm() / sol.x.norm();
        check(&c, rel <= 1e-6, &format!("i={i} n={n}: factorization error {rel:e}"));
        let report = krylov_bound(Some(&sol), &p, false).unwrap();
        check(
            &c,
            report.min_slack().unwrap() >= -1e-9,
            &format!("i={i}: slack {:?}", report.min_slack()),
        );
    }
    c.pass();
}

#[test]
fn solver_agrees_with_vectorization_oracle() {
    let c = Criterion::new(10, "dense solver matches the Kronecker oracle");
    for i in 0..100u64 {
        let n = 2 + (i as usize) % 23; // 2..=24
        let r = 1 + (i as usize) % 2;
        let p = random_stable(n, r, 40_000 + i, ((i % 7) as f64) * 0.5).unwrap();
        let sol = solve_lyapunov(&p).unwrap();
        let oracle = solve_lyapunov_oracle(&p).unwrap();
        let rel = (&sol.x - &oracle.x).norm() / oracle.x.norm();
        check(&c, rel <= 1e-8, &format!("i={i} n={n}: relative gap {rel:e}"));
    }
    c.pass();
}

#[test]
fn contour_calibration_on_normal_matrices() {
    let c = Criterion::new(11, "contour lengths match circles; levels nest");
    let eps_list = [0.05, 0.1, 0.2];
    for (label, diag_vals, circles) in [
        ("diag(-1)", vec![-1.0], 1.0),
        ("diag(-1,-5)", vec![-1.0, -5.0], 2.0),
    ] {
        let a = CMat::from_diagonal(&nalgebra::DVector::from_vec(
            diag_vals.iter().map(|&v| cplx(v, 0.0)).collect(),
        ));
        let nr = numerical_range(&a, 64).unwrap();
        let gbox = default_box(&nr, 0.2, spectral_norm(&a).unwrap());
        let grid = resolvent_grid(&a, gbox, 256).unwrap();
        let mut contours = Vec::new();
        for &eps in &eps_list {
            let contour = epsilon_contour(&grid, eps).unwrap();
            let exact = circles * 2.0 * PI * eps;
            let rel = (contour.total_length - exact).abs() / exact;
            check(&c, rel <= 0.02, &format!("{label} eps={eps}: length off by {rel:.3}"));
            contours.push(contour);
        }
        for w in contours.windows(2) {
            let nested = w[0]
                .points()
                .all(|z| w[1].encloses(z));
            check(&c, nested, &format!("{label}: sigma_eps nesting violated"));
        }
    }
    c.pass();
}

#[test]
fn norm_anchors() {
    let c = Criterion::new(12, "closed-form and windowed norms for the Jordan family");
    for i in 0..20 {
        let alpha = 0.5 + i as f64 * 0.5;
        let a = bidiagonal(2, -1.0, alpha);
        let exact =
            (1.0 + alpha * alpha / 2.0 + alpha * (alpha * alpha / 4.0 + 1.0).sqrt()).sqrt();
        let norm = spectral_norm(&a).unwrap();
        check(
            &c,
            (norm - exact).abs() <= 1e-10,
            &format!("alpha={alpha}: {norm} vs {exact}"),
        );
    }
    for alpha in [4.0, 8.0] {
        let a = bidiagonal(64, -1.0, alpha);
        let norm = spectral_norm(&a).unwrap();
        check(
            &c,
            norm >= alpha - 1.0 && norm <= alpha + 1.0,
            &format!("alpha={alpha}: ||A|| = {norm} outside the window"),
        );
    }
    c.pass();
}
