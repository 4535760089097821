//! Experiment runners: each produces CSV tables and optional SVG plots in
//! the output directory.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use lyapdecay::bounds::{
    abscissa_bounds, adi_error_bound, asz_bound, cor_genbnd, cor_s1n, eig_bound, krylov_bound,
    make_shifts, nr_bound, psa_bound, BoundReport, ShiftSet, ShiftStrategy, CROUZEIX_CONSTANT,
};
use lyapdecay::densela::{cplx, spectral_norm, CMat};
use lyapdecay::lyap::{norm_identity_check, solve_lyapunov, LyapunovProblem, SolutionSpectrum};
use lyapdecay::models::{
    self, fd_operator, jordan_family, random_stable, two_by_two, worst_case_ratio, worst_case_t,
};
use lyapdecay::spectral::{
    default_box, epsilon_contour, numerical_range, resolvent_grid, NumericalRangeBoundary,
};

use crate::io::{self, int, num, text, Csv};
use crate::svg::{self, Series};

/// A valid bound fell below the realized ratio: a bug, reported loudly with
/// its own exit code.
#[derive(Debug)]
pub struct SoundnessViolation(pub String);

impl fmt::Display for SoundnessViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "soundness violation: {}", self.0)
    }
}

impl std::error::Error for SoundnessViolation {}

const SOUNDNESS_SLACK: f64 = -1e-9;

fn check_sound(report: &BoundReport) -> Result<()> {
    if !report.valid {
        return Ok(());
    }
    if let Some(slack) = report.min_slack() {
        if slack < SOUNDNESS_SLACK {
            bail!(SoundnessViolation(format!(
                "{} bound below actual by {:e}",
                report.name, -slack
            )));
        }
    }
    Ok(())
}

pub struct Output {
    pub dir: PathBuf,
    pub csv: bool,
    pub svg: bool,
}

impl Output {
    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }
}

/// Problem source shared by `solve`, `bounds`, `nrange`, `psa`, `compare`.
pub enum Source {
    Files { a: CMat, b: Option<CMat> },
    Fd { n: usize },
    Jordan { n: usize, alpha: f64 },
    TwoByTwo { alpha: f64, t: f64 },
    Random { n: usize, r: usize, seed: u64, alpha: f64 },
}

impl Source {
    pub fn label(&self) -> String {
        match self {
            Source::Files { .. } => "custom".into(),
            Source::Fd { n } => format!("fd n={n}"),
            Source::Jordan { n, alpha } => format!("jordan n={n} alpha={alpha}"),
            Source::TwoByTwo { alpha, t } => format!("2x2 alpha={alpha} t={t}"),
            Source::Random { n, r, seed, .. } => format!("random n={n} r={r} seed={seed}"),
        }
    }

    pub fn matrix(&self) -> Result<CMat> {
        Ok(match self {
            Source::Files { a, .. } => a.clone(),
            _ => self.problem()?.a.clone(),
        })
    }

    pub fn problem(&self) -> Result<LyapunovProblem> {
        Ok(match self {
            Source::Files { a, b } => {
                let b = b.clone().context("this command needs --b alongside --a")?;
                LyapunovProblem::new(a.clone(), b)?
            }
            Source::Fd { n } => fd_operator(*n)?.problem,
            Source::Jordan { n, alpha } => jordan_family(*n, *alpha, None)?.problem,
            Source::TwoByTwo { alpha, t } => two_by_two(*alpha, *t)?.problem,
            Source::Random { n, r, seed, alpha } => random_stable(*n, *r, *seed, *alpha)?,
        })
    }
}

pub fn run_solve(source: &Source, out: &Output) -> Result<()> {
    let p = source.problem()?;
    let sol = solve_lyapunov(&p)?;
    let (b_sq, two_as1) = norm_identity_check(&p, &sol)?;
    println!(
        "{}: n={} rank(B)={} residual={:.3e} ||B||^2={:.6e} <= 2||A||s1={:.6e}",
        source.label(),
        p.n(),
        p.rank_b,
        sol.residual,
        b_sq,
        two_as1
    );
    if out.csv {
        let mut csv = Csv::new(&["k", "s_k", "ratio"]);
        for (i, &s) in sol.singular_values.iter().enumerate() {
            csv.row(&[int(i + 1), num(s), num(sol.ratio(i + 1))]);
        }
        csv.write(&out.path("spectrum.csv"))?;
    }
    if out.svg {
        let series = vec![Series {
            label: source.label(),
            points: ratio_points(&sol),
        }];
        svg::decay_plot(&out.path("spectrum.svg"), "singular value decay", &series)?;
    }
    Ok(())
}

fn ratio_points(sol: &SolutionSpectrum) -> Vec<(f64, f64)> {
    sol.singular_values
        .iter()
        .enumerate()
        .map(|(i, _)| ((i + 1) as f64, sol.ratio(i + 1)))
        .collect()
}

fn boundary_series(label: String, nr: &NumericalRangeBoundary) -> Series {
    let mut points: Vec<(f64, f64)> = nr.points.iter().map(|z| (z.re, z.im)).collect();
    if let Some(&first) = points.first() {
        points.push(first);
    }
    Series { label, points }
}

pub fn run_nrange(source: &Source, m: usize, out: &Output) -> Result<()> {
    let a = source.matrix()?;
    let nr = numerical_range(&a, m)?;
    println!("{}: omega(A) = {:.12e}", source.label(), nr.omega());
    if out.csv {
        let mut csv = Csv::new(&["re", "im"]);
        for z in &nr.points {
            csv.row(&[num(z.re), num(z.im)]);
        }
        csv.write(&out.path("nrange.csv"))?;
    }
    if out.svg {
        let series = vec![boundary_series(source.label(), &nr)];
        svg::plane_plot(&out.path("nrange.svg"), "numerical range boundary", &series)?;
    }
    Ok(())
}

pub fn run_psa(source: &Source, eps_list: &[f64], grid: usize, out: &Output) -> Result<()> {
    let a = source.matrix()?;
    let nr = numerical_range(&a, 128)?;
    let eps_max = eps_list.iter().cloned().fold(0.0, f64::max);
    let gbox = default_box(&nr, eps_max, spectral_norm(&a)?);
    let pgrid = resolvent_grid(&a, gbox, grid)?;
    let mut csv = Csv::new(&["eps", "piece", "re", "im"]);
    let mut series = Vec::new();
    for &eps in eps_list {
        let contour = epsilon_contour(&pgrid, eps)?;
        println!(
            "{}: eps={eps:.3e} pieces={} length={:.9e}",
            source.label(),
            contour.polylines.len(),
            contour.total_length
        );
        for (pi, poly) in contour.polylines.iter().enumerate() {
            for &(x, y) in poly {
                csv.row(&[num(eps), int(pi), num(x), num(y)]);
            }
            series.push(Series {
                label: format!("eps={eps}"),
                points: poly.clone(),
            });
        }
    }
    if out.csv {
        csv.write(&out.path("psa.csv"))?;
    }
    if out.svg {
        svg::plane_plot(&out.path("psa.svg"), "pseudospectrum contours", &series)?;
    }
    Ok(())
}

pub struct BoundsConfig {
    pub shifts: Option<Vec<f64>>,
    pub strategy: Option<String>,
    pub k: usize,
    pub m: usize,
    pub eps: f64,
    pub grid: usize,
    pub cap_override: bool,
}

fn resolve_shifts(a: &CMat, cfg: &BoundsConfig) -> Result<ShiftSet> {
    if let Some(vals) = &cfg.shifts {
        return Ok(ShiftSet::user(vals.iter().map(|&v| cplx(v, 0.0)).collect())?);
    }
    let strategy = match cfg.strategy.as_deref() {
        Some("single") => ShiftStrategy::SinglePoint,
        Some("log") | None => ShiftStrategy::LogSpaced,
        Some(other) => bail!("unknown shift strategy '{other}' (expected 'single' or 'log')"),
    };
    Ok(make_shifts(a, strategy, cfg.k)?)
}

struct AllBounds {
    shifts: ShiftSet,
    adi: BoundReport,
    eig: BoundReport,
    nr: BoundReport,
    psa: BoundReport,
    asz: BoundReport,
    krylov: Option<BoundReport>,
    genbnd: BoundReport,
}

fn compute_all(
    p: &LyapunovProblem,
    sol: &SolutionSpectrum,
    cfg: &BoundsConfig,
) -> Result<AllBounds> {
    let a = &p.a;
    let shifts = resolve_shifts(a, cfg)?;
    let r = p.rank_b;
    let nr_boundary = numerical_range(a, cfg.m)?;
    let gbox = default_box(&nr_boundary, cfg.eps, spectral_norm(a)?);
    let pgrid = resolvent_grid(a, gbox, cfg.grid)?;
    let contour = epsilon_contour(&pgrid, cfg.eps)?;
    let krylov = if p.n() <= models::KRYLOV_SIZE_CAP || cfg.cap_override {
        Some(krylov_bound(Some(sol), p, cfg.cap_override)?)
    } else {
        None
    };
    Ok(AllBounds {
        adi: adi_error_bound(Some(sol), a, &shifts, r)?,
        eig: eig_bound(Some(sol), a, &shifts, r)?,
        nr: nr_bound(Some(sol), a, &shifts, r, &nr_boundary, CROUZEIX_CONSTANT)?,
        psa: psa_bound(Some(sol), a, &shifts, r, &contour)?,
        asz: asz_bound(Some(sol), a, &p.b)?,
        krylov,
        genbnd: cor_genbnd(Some(sol), a)?,
        shifts,
    })
}

fn reports(all: &AllBounds) -> Vec<&BoundReport> {
    let mut out = vec![&all.adi, &all.eig, &all.nr, &all.psa, &all.asz, &all.genbnd];
    if let Some(k) = &all.krylov {
        out.push(k);
    }
    out
}

pub fn run_bounds(source: &Source, cfg: &BoundsConfig, out: &Output) -> Result<()> {
    let p = source.problem()?;
    let sol = solve_lyapunov(&p)?;
    let all = compute_all(&p, &sol, cfg)?;
    println!(
        "{}: shifts {:?}",
        source.label(),
        all.shifts.shifts.iter().map(|z| z.re).collect::<Vec<_>>()
    );
    let mut csv = Csv::new(&["name", "valid", "index", "bound", "actual", "vacuous"]);
    for report in reports(&all) {
        check_sound(report)?;
        if !report.valid {
            println!(
                "  {:<10} invalid: {}",
                report.name,
                report.invalid_reason.as_deref().unwrap_or("")
            );
            csv.row(&[
                text(report.name),
                text("invalid"),
                int(0),
                text(""),
                text(""),
                text(""),
            ]);
            continue;
        }
        for e in &report.entries {
            csv.row(&[
                text(report.name),
                text("valid"),
                int(e.index),
                num(e.bound),
                e.actual.map(num).unwrap_or(text("")),
                text(if e.vacuous { "vacuous" } else { "" }),
            ]);
        }
        println!(
            "  {:<10} entries={} min slack={:?}",
            report.name,
            report.entries.len(),
            report.min_slack()
        );
    }
    let mut abs_csv = Csv::new(&["k", "lower", "omega_ratio", "upper"]);
    for row in abscissa_bounds(&sol, &p.a, &p.b)? {
        abs_csv.row(&[int(row.k), num(row.lower), num(row.omega_ratio), num(row.upper)]);
    }
    let (lo, omega, hi) = cor_s1n(&sol, &p.a, &p.b)?;
    println!("  abscissa strip: {lo:.6e} <= omega(A) = {omega:.6e} <= {hi:.6e}");
    if out.csv {
        csv.write(&out.path("bounds.csv"))?;
        abs_csv.write(&out.path("abscissa.csv"))?;
    }
    Ok(())
}

pub fn run_compare(source: &Source, cfg: &BoundsConfig, out: &Output) -> Result<()> {
    let p = source.problem()?;
    let sol = solve_lyapunov(&p)?;
    let all = compute_all(&p, &sol, cfg)?;
    for report in reports(&all) {
        check_sound(report)?;
    }
    let columns = ["eig", "nr", "psa", "asz", "krylov", "cor_genbnd"];
    let lookup = |report: &BoundReport, k: usize| -> io::CsvCell {
        if !report.valid {
            return text("invalid");
        }
        report
            .entries
            .iter()
            .find(|e| e.index == k)
            .map(|e| num(e.bound))
            .unwrap_or(text(""))
    };
    let mut header = vec!["k", "actual"];
    header.extend(columns);
    let mut csv = Csv::new(&header);
    for k in 1..=p.n() {
        let mut row = vec![int(k), num(sol.ratio(k))];
        row.push(lookup(&all.eig, k));
        row.push(lookup(&all.nr, k));
        row.push(lookup(&all.psa, k));
        row.push(lookup(&all.asz, k));
        row.push(match &all.krylov {
            Some(r) => lookup(r, k),
            None => text(""),
        });
        row.push(lookup(&all.genbnd, k));
        csv.row(&row);
    }
    if out.csv {
        csv.write(&out.path("compare.csv"))?;
    }
    println!("{}: compare table for n={}", source.label(), p.n());
    Ok(())
}

pub fn run_fig1(n_list: &[usize], out: &Output) -> Result<()> {
    let mut decay = Csv::new(&["n", "k", "ratio"]);
    let mut boundary = Csv::new(&["n", "re", "im"]);
    let mut decay_series = Vec::new();
    let mut range_series = Vec::new();
    for &n in n_list {
        let model = fd_operator(n)?;
        let sol = solve_lyapunov(&model.problem)?;
        for k in 1..=n {
            decay.row(&[int(n), int(k), num(sol.ratio(k))]);
        }
        let nr = numerical_range(&model.problem.a, 256)?;
        for z in &nr.points {
            boundary.row(&[int(n), num(z.re), num(z.im)]);
        }
        decay_series.push(Series {
            label: format!("n={n}"),
            points: ratio_points(&sol),
        });
        range_series.push(boundary_series(format!("n={n}"), &nr));
        println!("fig1: n={n} s1={:.6e} omega={:.6e}", sol.s1(), nr.omega());
    }
    if out.csv {
        decay.write(&out.path("fig1_decay.csv"))?;
        boundary.write(&out.path("fig1_nrange.csv"))?;
    }
    if out.svg {
        svg::decay_plot(&out.path("fig1_decay.svg"), "decay vs n", &decay_series)?;
        svg::plane_plot(&out.path("fig1_nrange.svg"), "numerical ranges", &range_series)?;
    }
    Ok(())
}

pub fn run_fig2(alpha_list: &[f64], n: usize, out: &Output) -> Result<()> {
    let mut decay = Csv::new(&["alpha", "k", "ratio"]);
    let mut boundary = Csv::new(&["alpha", "re", "im"]);
    let mut decay_series = Vec::new();
    let mut range_series = Vec::new();
    for &alpha in alpha_list {
        let model = jordan_family(n, alpha, None)?;
        let sol = solve_lyapunov(&model.problem)?;
        for k in 1..=n {
            decay.row(&[num(alpha), int(k), num(sol.ratio(k))]);
        }
        let nr = numerical_range(&model.problem.a, 256)?;
        for z in &nr.points {
            boundary.row(&[num(alpha), num(z.re), num(z.im)]);
        }
        decay_series.push(Series {
            label: format!("alpha={alpha}"),
            points: ratio_points(&sol),
        });
        range_series.push(boundary_series(format!("alpha={alpha}"), &nr));
        let radius = model.closed.w_disk.map(|(_, r)| r).unwrap_or(f64::NAN);
        println!("fig2: alpha={alpha} W-radius={radius:.6} ratio(k=10)={:.6e}", sol.ratio(10));
    }
    if out.csv {
        decay.write(&out.path("fig2_decay.csv"))?;
        boundary.write(&out.path("fig2_nrange.csv"))?;
    }
    if out.svg {
        svg::decay_plot(&out.path("fig2_decay.svg"), "decay vs alpha", &decay_series)?;
        svg::plane_plot(&out.path("fig2_nrange.svg"), "numerical ranges", &range_series)?;
    }
    Ok(())
}

pub fn run_sweep2x2(points: usize, out: &Output) -> Result<()> {
    let mut csv = Csv::new(&["alpha", "exact", "solver", "genbnd"]);
    let mut exact_series = Vec::new();
    let mut bound_series = Vec::new();
    let mut max_gap = 0.0f64;
    for i in 0..points {
        let alpha = 0.1 + (10.0 - 0.1) * i as f64 / (points - 1) as f64;
        let exact = worst_case_ratio(alpha);
        let (t_star, _) = worst_case_t(alpha);
        let model = two_by_two(alpha, t_star)?;
        let sol = solve_lyapunov(&model.problem)?;
        let solver = sol.ratio(2);
        let report = cor_genbnd(Some(&sol), &model.problem.a)?;
        let bound = report
            .entries
            .iter()
            .find(|e| e.index == 2)
            .map(|e| e.bound)
            .unwrap();
        max_gap = max_gap.max((exact - solver).abs());
        if bound < solver + SOUNDNESS_SLACK {
            bail!(SoundnessViolation(format!(
                "genbnd {bound:e} below ratio {solver:e} at alpha={alpha}"
            )));
        }
        csv.row(&[num(alpha), num(exact), num(solver), num(bound)]);
        exact_series.push((alpha, exact));
        bound_series.push((alpha, bound));
    }
    println!("sweep2x2: {points} points, max |exact - solver| = {max_gap:.3e}");
    if max_gap > 1e-10 {
        bail!(SoundnessViolation(format!(
            "solver drifted from the closed form by {max_gap:e}"
        )));
    }
    if out.csv {
        csv.write(&out.path("sweep2x2.csv"))?;
    }
    if out.svg {
        let series = vec![
            Series { label: "exact ratio".into(), points: exact_series },
            Series { label: "bound".into(), points: bound_series },
        ];
        svg::decay_plot(&out.path("sweep2x2.svg"), "worst-case ratio vs alpha", &series)?;
    }
    Ok(())
}

pub fn run_strip(values: &[f64; 4], out: &Output) -> Result<()> {
    let [a_norm, b_norm, s1, sn] = *values;
    if !(a_norm > 0.0 && s1 >= sn && sn >= 0.0 && s1 > 0.0) {
        bail!("strip needs ||A|| > 0 and s1 >= sn >= 0 with s1 > 0");
    }
    let left = -b_norm * b_norm / (2.0 * s1);
    let right = (s1 - sn) / (s1 + sn) * a_norm;
    println!("strip: omega(A) must lie in [{left:.12e}, {right:.12e}]");
    if out.csv {
        let mut csv = Csv::new(&["left", "right"]);
        csv.row(&[num(left), num(right)]);
        csv.write(&out.path("strip.csv"))?;
    }
    if out.svg {
        let h = a_norm * 0.5;
        let series = vec![
            Series {
                label: "strip".into(),
                points: vec![(left, -h), (right, -h), (right, h), (left, h), (left, -h)],
            },
            Series {
                label: "axis".into(),
                points: vec![(left - a_norm * 0.5, 0.0), (right + a_norm * 0.5, 0.0)],
            },
        ];
        svg::plane_plot(&out.path("strip.svg"), "admissible abscissa strip", &series)?;
    }
    Ok(())
}

pub fn parse_matrix_source(
    a: Option<&Path>,
    b: Option<&Path>,
    family: Option<&str>,
    n: Option<usize>,
    alpha: Option<f64>,
    t: Option<f64>,
    r: Option<usize>,
    seed: Option<u64>,
) -> Result<Source> {
    if let Some(a_path) = a {
        let a = io::read_matrix(a_path)?;
        let b = b.map(io::read_matrix).transpose()?;
        return Ok(Source::Files { a, b });
    }
    match family.unwrap_or("fd") {
        "fd" => Ok(Source::Fd { n: n.unwrap_or(16) }),
        "jordan" => Ok(Source::Jordan {
            n: n.unwrap_or(64),
            alpha: alpha.unwrap_or(2.0),
        }),
        "2x2" => {
            let alpha = alpha.unwrap_or(2.0);
            let t = t.unwrap_or_else(|| worst_case_t(alpha).0);
            Ok(Source::TwoByTwo { alpha, t })
        }
        "random" => Ok(Source::Random {
            n: n.unwrap_or(12),
            r: r.unwrap_or(1),
            seed: seed.unwrap_or(0),
            alpha: alpha.unwrap_or(1.0),
        }),
        other => bail!("unknown family '{other}' (expected fd, jordan, 2x2, random)"),
    }
}
