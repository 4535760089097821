//! Decay bounds on the singular values of Lyapunov solutions: the ADI
//! rational-function bound and its eigenvalue, numerical-range, and
//! pseudospectral relaxations; the Antoulas–Sorensen–Zhou series bound; the
//! Krylov factorization bound; and the numerical-abscissa bounds that force
//! fast decay under large departure from normality.

use crate::densela::{self, cplx, eig_general, linear_solve, spectral_norm, CMat, C64};
use crate::error::{Error, Result};
use crate::lyap::{LyapunovProblem, SolutionSpectrum};
use crate::models::companion_krylov;
use crate::spectral::{EpsilonContour, NumericalRangeBoundary};

/// Crouzeix's constant: proven value 11.08; C = 2 is conjectural.
pub const CROUZEIX_CONSTANT: f64 = 11.08;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftStrategy {
    User,
    SinglePoint,
    LogSpaced,
}

/// ADI shifts in the open right half-plane.
#[derive(Debug, Clone)]
pub struct ShiftSet {
    pub shifts: Vec<C64>,
    pub strategy: ShiftStrategy,
}

impl ShiftSet {
    pub fn user(shifts: Vec<C64>) -> Result<Self> {
        for &mu in &shifts {
            if mu.re <= 0.0 {
                return Err(Error::NotInRightHalfPlane(mu));
            }
        }
        Ok(Self {
            shifts,
            strategy: ShiftStrategy::User,
        })
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }
}

/// Shift selection. "single-point" repeats the geometric mean of the real
/// spectral interval; "log-spaced" spreads k shifts log-uniformly across it.
pub fn make_shifts(a: &CMat, strategy: ShiftStrategy, k: usize) -> Result<ShiftSet> {
    let eigs = densela::eigenvalues(a)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for lambda in &eigs {
        if lambda.re >= 0.0 {
            return Err(Error::Unstable(*lambda));
        }
        lo = lo.min(-lambda.re);
        hi = hi.max(-lambda.re);
    }
    let shifts = match strategy {
        ShiftStrategy::User => {
            return Err(Error::InvalidInput(
                "user strategy requires explicit shifts; use ShiftSet::user".into(),
            ))
        }
        ShiftStrategy::SinglePoint => vec![cplx((lo * hi).sqrt(), 0.0); k],
        ShiftStrategy::LogSpaced => {
            if k == 1 {
                vec![cplx((lo * hi).sqrt(), 0.0)]
            } else {
                (0..k)
                    .map(|i| {
                        let t = i as f64 / (k - 1) as f64;
                        cplx(10f64.powf(lo.log10() + t * (hi.log10() - lo.log10())), 0.0)
                    })
                    .collect()
            }
        }
    };
    Ok(ShiftSet { shifts, strategy })
}

/// |phi_j(z)|^2 for the first `j` shifts.
pub fn phi_abs2(z: C64, shifts: &[C64]) -> f64 {
    shifts
        .iter()
        .map(|&mu| {
            let num = (z + mu).norm_sqr();
            let den = (z - mu.conj()).norm_sqr();
            num / den
        })
        .product()
}

/// ||phi_k(A)|| evaluated exactly in factored form: each factor is
/// (A + mu I) applied to the solve with (A - conj(mu) I). The factors
/// commute in exact arithmetic, so the given order only affects roundoff.
pub fn phi_norm(a: &CMat, shifts: &ShiftSet) -> Result<f64> {
    Ok(*phi_norm_prefixes(a, shifts)?.last().unwrap())
}

/// ||phi_j(A)|| for every prefix j = 0..=k; entry 0 is ||I|| = 1.
pub fn phi_norm_prefixes(a: &CMat, shifts: &ShiftSet) -> Result<Vec<f64>> {
    let n = a.nrows();
    let eye = CMat::identity(n, n);
    let mut p = eye.clone();
    let mut norms = vec![1.0];
    for &mu in &shifts.shifts {
        let solved = linear_solve(&(a - &eye * mu.conj()), &p)?;
        p = (a + &eye * mu) * solved;
        norms.push(spectral_norm(&p)?);
    }
    Ok(norms)
}

/// One evaluated bound value: an upper bound on s_index / s_1.
#[derive(Debug, Clone, Copy)]
pub struct BoundEntry {
    /// 1-based singular value index the bound applies to.
    pub index: usize,
    pub bound: f64,
    /// Realized s_index / s_1 when a solved instance was supplied.
    pub actual: Option<f64>,
    /// Bound >= 1 carries no information.
    pub vacuous: bool,
}

#[derive(Debug, Clone)]
pub struct BoundReport {
    pub name: &'static str,
    pub params: String,
    pub valid: bool,
    pub invalid_reason: Option<String>,
    pub entries: Vec<BoundEntry>,
}

impl BoundReport {
    fn invalid(name: &'static str, params: String, reason: String) -> Self {
        Self {
            name,
            params,
            valid: false,
            invalid_reason: Some(reason),
            entries: Vec::new(),
        }
    }

    /// Largest violation bound - actual over entries (negative = violation).
    pub fn min_slack(&self) -> Option<f64> {
        self.entries
            .iter()
            .filter_map(|e| e.actual.map(|a| e.bound - a))
            .fold(None, |acc, s| Some(acc.map_or(s, |m: f64| m.min(s))))
    }
}

fn entry(index: usize, bound: f64, sol: Option<&SolutionSpectrum>) -> BoundEntry {
    BoundEntry {
        index,
        bound,
        actual: sol.and_then(|s| {
            if index <= s.singular_values.len() {
                Some(s.ratio(index))
            } else {
                None
            }
        }),
        vacuous: bound >= 1.0,
    }
}

/// ADI error bound: s_{jr+1} / s_1 <= ||phi_j(A)||^2 for each prefix j.
pub fn adi_error_bound(
    sol: Option<&SolutionSpectrum>,
    a: &CMat,
    shifts: &ShiftSet,
    r: usize,
) -> Result<BoundReport> {
    let n = a.nrows();
    let norms = phi_norm_prefixes(a, shifts)?;
    let entries = norms
        .iter()
        .enumerate()
        .filter(|(j, _)| j * r + 1 <= n)
        .map(|(j, &norm)| entry(j * r + 1, norm * norm, sol))
        .collect();
    Ok(BoundReport {
        name: "adi",
        params: format!("k={} r={r}", shifts.len()),
        valid: true,
        invalid_reason: None,
        entries,
    })
}

/// Eigenvalue bound: kappa(V)^2 max over the spectrum of |phi_j|^2. Invalid
/// for numerically defective A.
pub fn eig_bound(
    sol: Option<&SolutionSpectrum>,
    a: &CMat,
    shifts: &ShiftSet,
    r: usize,
) -> Result<BoundReport> {
    let params = format!("k={} r={r}", shifts.len());
    let es = eig_general(a)?;
    if es.defective {
        return Ok(BoundReport::invalid(
            "eig",
            params,
            format!("defective: kappa(V) = {:.3e}", es.cond),
        ));
    }
    let n = a.nrows();
    let kappa2 = es.cond * es.cond;
    let entries = (0..=shifts.len())
        .filter(|j| j * r + 1 <= n)
        .map(|j| {
            let max_phi2 = es
                .eigenvalues
                .iter()
                .map(|&l| phi_abs2(l, &shifts.shifts[..j]))
                .fold(0.0, f64::max);
            entry(j * r + 1, kappa2 * max_phi2, sol)
        })
        .collect();
    Ok(BoundReport {
        name: "eig",
        params,
        valid: true,
        invalid_reason: None,
        entries,
    })
}

/// Numerical-range bound: C^2 max over the W(A) boundary of |phi_j|^2.
/// Requires every pole conj(mu_j) outside W(A); the maximum over W(A) is
/// attained on the boundary by the maximum-modulus principle.
pub fn nr_bound(
    sol: Option<&SolutionSpectrum>,
    a: &CMat,
    shifts: &ShiftSet,
    r: usize,
    nr: &NumericalRangeBoundary,
    crouzeix_c: f64,
) -> Result<BoundReport> {
    let params = format!("k={} r={r} C={crouzeix_c}", shifts.len());
    for &mu in &shifts.shifts {
        if nr.contains(mu.conj(), 0.0) {
            return Ok(BoundReport::invalid(
                "nr",
                params,
                format!("pole {} inside W(A); phi not analytic", mu.conj()),
            ));
        }
    }
    let n = a.nrows();
    let c2 = crouzeix_c * crouzeix_c;
    let entries = (0..=shifts.len())
        .filter(|j| j * r + 1 <= n)
        .map(|j| {
            let max_phi2 = nr
                .points
                .iter()
                .map(|&z| phi_abs2(z, &shifts.shifts[..j]))
                .fold(0.0, f64::max);
            entry(j * r + 1, c2 * max_phi2, sol)
        })
        .collect();
    Ok(BoundReport {
        name: "nr",
        params,
        valid: true,
        invalid_reason: None,
        entries,
    })
}

/// Pseudospectral bound: (L_eps^2 / 4 pi^2 eps^2) max over the sigma_eps
/// boundary of |phi_j|^2. Requires every pole strictly outside the contour.
pub fn psa_bound(
    sol: Option<&SolutionSpectrum>,
    a: &CMat,
    shifts: &ShiftSet,
    r: usize,
    contour: &EpsilonContour,
) -> Result<BoundReport> {
    let params = format!("k={} r={r} eps={:e}", shifts.len(), contour.epsilon);
    for &mu in &shifts.shifts {
        if contour.encloses(mu.conj()) {
            return Ok(BoundReport::invalid(
                "psa",
                params,
                format!("pole {} inside sigma_eps; phi not analytic", mu.conj()),
            ));
        }
    }
    let n = a.nrows();
    let lead = contour.total_length.powi(2)
        / (4.0 * std::f64::consts::PI.powi(2) * contour.epsilon.powi(2));
    let points: Vec<C64> = contour.points().collect();
    let entries = (0..=shifts.len())
        .filter(|j| j * r + 1 <= n)
        .map(|j| {
            let max_phi2 = points
                .iter()
                .map(|&z| phi_abs2(z, &shifts.shifts[..j]))
                .fold(0.0, f64::max);
            entry(j * r + 1, lead * max_phi2, sol)
        })
        .collect();
    Ok(BoundReport {
        name: "psa",
        params,
        valid: true,
        invalid_reason: None,
        entries,
    })
}

/// delta value of a candidate eigenvalue given the already-ordered prefix.
fn asz_delta(lambda: C64, prefix: &[C64]) -> f64 {
    let lead = -1.0 / (2.0 * lambda.re);
    let prod: f64 = prefix
        .iter()
        .map(|&lj| (lambda - lj).norm_sqr() / (lambda + lj.conj()).norm_sqr())
        .product();
    lead * prod
}

/// Greedy ordering: pick each next eigenvalue maximizing its delta given
/// those already chosen. Returns the ordered eigenvalues and their deltas.
pub fn asz_greedy_order(eigenvalues: &[C64]) -> (Vec<C64>, Vec<f64>) {
    let mut remaining: Vec<C64> = eigenvalues.to_vec();
    let mut order = Vec::with_capacity(remaining.len());
    let mut deltas = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let (best_i, best_delta) = remaining
            .iter()
            .enumerate()
            .map(|(i, &l)| (i, asz_delta(l, &order)))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        order.push(remaining.swap_remove(best_i));
        deltas.push(best_delta);
    }
    (order, deltas)
}

/// Antoulas–Sorensen–Zhou series bound (r = 1, diagonalizable A):
/// s_{k+1} <= (n-k)^2 kappa(V)^2 ||B||^2 delta_{k+1}, reported in the
/// relative form via ||B||^2 <= 2 ||A|| s_1.
pub fn asz_bound(
    sol: Option<&SolutionSpectrum>,
    a: &CMat,
    b: &CMat,
) -> Result<BoundReport> {
    let params = String::new();
    if b.ncols() != 1 {
        return Ok(BoundReport::invalid(
            "asz",
            params,
            format!("requires rank-1 B, got r = {}", b.ncols()),
        ));
    }
    let es = eig_general(a)?;
    if es.defective {
        return Ok(BoundReport::invalid(
            "asz",
            params,
            format!("defective: kappa(V) = {:.3e}", es.cond),
        ));
    }
    let n = a.nrows();
    let (_, deltas) = asz_greedy_order(&es.eigenvalues);
    let kappa2 = es.cond * es.cond;
    let a_norm = spectral_norm(a)?;
    let entries = (0..n)
        .map(|k| {
            let rel = 2.0 * ((n - k) as f64).powi(2) * a_norm * kappa2 * deltas[k];
            entry(k + 1, rel, sol)
        })
        .collect();
    Ok(BoundReport {
        name: "asz",
        params,
        valid: true,
        invalid_reason: None,
        entries,
    })
}

/// Krylov factorization bound: s_k/s_1 <= sigma_k(K)^2 ||A|| (2||G|| / ||BB*||).
pub fn krylov_bound(
    sol: Option<&SolutionSpectrum>,
    p: &LyapunovProblem,
    cap_override: bool,
) -> Result<BoundReport> {
    let params = format!("n={}", p.n());
    let (k, _, g) = match companion_krylov(p, cap_override) {
        Ok(triple) => triple,
        Err(e @ (Error::TooLarge { .. } | Error::NotControllable { .. })) => return Err(e),
        Err(Error::InvalidInput(msg)) => {
            return Ok(BoundReport::invalid("krylov", params, msg))
        }
        Err(e) => return Err(e),
    };
    let svk = densela::svd(&k)?.singular_values;
    let g_norm = spectral_norm(&g)?;
    let a_norm = spectral_norm(&p.a)?;
    let bbh_norm = spectral_norm(&(&p.b * p.b.adjoint()))?;
    let entries = (0..p.n())
        .map(|i| {
            let bound = svk[i] * svk[i] * a_norm * (2.0 * g_norm / bbh_norm);
            entry(i + 1, bound, sol)
        })
        .collect();
    Ok(BoundReport {
        name: "krylov",
        params,
        valid: true,
        invalid_reason: None,
        entries,
    })
}

/// One row of the two-sided abscissa bound.
#[derive(Debug, Clone, Copy)]
pub struct TwoSidedEntry {
    /// 1-based k (kth rightmost eigenvalue of the Hermitian part).
    pub k: usize,
    pub lower: f64,
    pub omega_ratio: f64,
    pub upper: f64,
}

/// Two-sided bound on omega_k / ||A||:
/// s_k/s_1 - 1 - ||B||^2/(2 s_1 ||A||) <= omega_k/||A|| <= 1 - s_{n-k+1}/s_1.
pub fn abscissa_bounds(
    sol: &SolutionSpectrum,
    a: &CMat,
    b: &CMat,
) -> Result<Vec<TwoSidedEntry>> {
    let n = a.nrows();
    let a_norm = spectral_norm(a)?;
    let b_norm2 = spectral_norm(b)?.powi(2);
    let omega = crate::spectral::hermitian_part_spectrum(a)?;
    let s1 = sol.s1();
    Ok((1..=n)
        .map(|k| TwoSidedEntry {
            k,
            lower: sol.ratio(k) - 1.0 - b_norm2 / (2.0 * s1 * a_norm),
            omega_ratio: omega[k - 1] / a_norm,
            upper: 1.0 - sol.ratio(n - k + 1),
        })
        .collect())
}

/// Extreme-singular-value bound on the numerical abscissa:
/// -||B||^2/(2 s_1) <= omega(A) <= ((s_1 - s_n)/(s_1 + s_n)) ||A||.
pub fn cor_s1n(sol: &SolutionSpectrum, a: &CMat, b: &CMat) -> Result<(f64, f64, f64)> {
    let n = a.nrows();
    let s1 = sol.s1();
    let sn = sol.singular_values[n - 1];
    let lower = -spectral_norm(b)?.powi(2) / (2.0 * s1);
    let upper = (s1 - sn) / (s1 + sn) * spectral_norm(a)?;
    let omega = crate::spectral::numerical_abscissa(a)?;
    Ok((lower, omega, upper))
}

/// Trailing singular value bound: s_{n-k+1}/s_1 <= 1 - omega_k/||A||.
/// Vacuous (flagged) whenever omega_k < 0, as for every stable normal A.
pub fn cor_genbnd(sol: Option<&SolutionSpectrum>, a: &CMat) -> Result<BoundReport> {
    let n = a.nrows();
    let a_norm = spectral_norm(a)?;
    let omega = crate::spectral::hermitian_part_spectrum(a)?;
    let entries = (1..=n)
        .map(|k| entry(n - k + 1, 1.0 - omega[k - 1] / a_norm, sol))
        .collect();
    Ok(BoundReport {
        name: "cor_genbnd",
        params: String::new(),
        valid: true,
        invalid_reason: None,
        entries,
    })
}
