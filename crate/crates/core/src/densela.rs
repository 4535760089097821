//! Dense complex linear algebra: factorizations and norms used by every other
//! module. Sized for n up to a few hundred; everything is computed in complex
//! arithmetic even when inputs are real.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;

/// Default relative tolerance for factorization contracts.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Eigenvector condition number above which a matrix is treated as defective.
pub const DEFECTIVE_CAP: f64 = 1e12;

const SCHUR_MAX_ITER: usize = 100_000;

pub fn cplx(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Full eigensystem of a Hermitian matrix, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct HermitianEigenSystem {
    pub eigenvalues: Vec<f64>,
    /// Unitary; column k pairs with `eigenvalues[k]`.
    pub eigenvectors: CMat,
}

/// Singular value decomposition, singular values sorted descending.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub singular_values: Vec<f64>,
    pub u: CMat,
    pub v_t: CMat,
}

/// General (possibly nonnormal) eigensystem with eigenvector conditioning.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<C64>,
    /// Columns are unit-norm eigenvectors; meaningless when `defective`.
    pub eigenvectors: CMat,
    /// kappa(V) = ||V|| ||V^-1||, computed from the singular values of V.
    pub cond: f64,
    /// Set when kappa(V) exceeds [`DEFECTIVE_CAP`].
    pub defective: bool,
}

pub fn check_finite(m: &CMat) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

fn require_square(m: &CMat) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()) * cplx(0.5, 0.0)
}

/// Eigensystem of a Hermitian matrix. Checks ||H - H*|| <= tol ||H||
/// (Frobenius) before factorizing; the input is symmetrized internally.
pub fn hermitian_eig(h: &CMat, tol: f64) -> Result<HermitianEigenSystem> {
    require_square(h)?;
    check_finite(h)?;
    let deviation = (h - h.adjoint()).norm();
    if deviation > tol * h.norm().max(1e-300) {
        return Err(Error::NotHermitian { deviation });
    }
    let sym = hermitian_part(h);
    let se = sym.symmetric_eigen();
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[j].partial_cmp(&se.eigenvalues[i]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut eigenvectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &se.eigenvectors.column(src));
    }
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::NoConvergence);
    }
    Ok(HermitianEigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

fn svd_residual(m: &CMat, res: &SvdResult) -> f64 {
    let mut sigma_vts = res.v_t.clone();
    for (i, &s) in res.singular_values.iter().enumerate() {
        for j in 0..sigma_vts.ncols() {
            sigma_vts[(i, j)] *= cplx(s, 0.0);
        }
    }
    (&res.u * sigma_vts - m).norm()
}

fn sort_svd(singular_values: Vec<f64>, u: CMat, v_t: CMat) -> Option<SvdResult> {
    if singular_values.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let k = singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| singular_values[j].partial_cmp(&singular_values[i]).unwrap());
    let mut us = CMat::zeros(u.nrows(), k);
    let mut vts = CMat::zeros(k, v_t.ncols());
    for (dst, &src) in order.iter().enumerate() {
        us.set_column(dst, &u.column(src));
        vts.set_row(dst, &v_t.row(src));
    }
    Some(SvdResult {
        singular_values: order.iter().map(|&i| singular_values[i]).collect(),
        u: us,
        v_t: vts,
    })
}

/// One-sided Jacobi SVD: orthogonalize column pairs with complex plane
/// rotations until convergence. Much slower than the QR-iteration path but
/// reliably accurate; used as its fallback.
fn jacobi_svd(m: &CMat) -> Option<SvdResult> {
    if m.nrows() < m.ncols() {
        // M* = V Sigma U*
        let res = jacobi_svd(&m.adjoint())?;
        let k = res.singular_values.len();
        let mut v_t = CMat::zeros(k, res.u.nrows());
        for i in 0..k {
            v_t.set_row(i, &res.u.column(i).adjoint());
        }
        return Some(SvdResult {
            singular_values: res.singular_values,
            u: res.v_t.adjoint(),
            v_t,
        });
    }
    let (rows, n) = (m.nrows(), m.ncols());
    let mut a = m.clone();
    let mut v = CMat::identity(n, n);
    let scale = m.norm().max(f64::MIN_POSITIVE);
    let tol = 1e-15;
    let max_sweeps = 100;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma: C64 = (0..rows).map(|i| a[(i, p)].conj() * a[(i, q)]).sum();
                let g = gamma.norm();
                if g <= tol * (alpha * beta).sqrt().max(tol * scale * scale) {
                    continue;
                }
                rotated = true;
                // rotate the phase of column q so the inner product is real
                let phase = (gamma / g).conj();
                for i in 0..rows {
                    a[(i, q)] *= phase;
                }
                for i in 0..n {
                    v[(i, q)] *= phase;
                }
                let zeta = (beta - alpha) / (2.0 * g);
                let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let ap = a[(i, p)];
                    let aq = a[(i, q)];
                    a[(i, p)] = ap * c - aq * s;
                    a[(i, q)] = ap * s + aq * c;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = vp * c - vq * s;
                    v[(i, q)] = vp * s + vq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut u = CMat::zeros(rows, n);
    let mut sv = Vec::with_capacity(n);
    for j in 0..n {
        let norm = a.column(j).norm();
        sv.push(norm);
        if norm > 0.0 {
            let col = a.column(j) / cplx(norm, 0.0);
            u.set_column(j, &col);
        } else {
            u[(j.min(rows - 1), j)] = cplx(1.0, 0.0);
        }
    }
    let mut v_t = CMat::zeros(n, n);
    for i in 0..n {
        v_t.set_row(i, &v.column(i).adjoint());
    }
    sort_svd(sv, u, v_t)
}

/// SVD with singular values sorted descending. The QR-iteration result is
/// verified by reconstruction; silent inaccuracies (which the underlying
/// routine does produce for some complex inputs) trigger a Jacobi fallback.
pub fn svd(m: &CMat) -> Result<SvdResult> {
    check_finite(m)?;
    let tight = 1e-10 * (m.norm() + 1.0);
    let fast = m
        .clone()
        .try_svd(true, true, 1e-14, SCHUR_MAX_ITER)
        .and_then(|dec| {
            sort_svd(
                dec.singular_values.iter().cloned().collect(),
                dec.u.unwrap(),
                dec.v_t.unwrap(),
            )
        });
    if let Some(res) = fast {
        if svd_residual(m, &res) <= tight {
            return Ok(res);
        }
    }
    let res = jacobi_svd(m).ok_or(Error::NoConvergence)?;
    if svd_residual(m, &res) > 1e-8 * (m.norm() + 1.0) {
        return Err(Error::NoConvergence);
    }
    Ok(res)
}

/// Largest singular value ||M||.
pub fn spectral_norm(m: &CMat) -> Result<f64> {
    Ok(svd(m)?.singular_values.first().copied().unwrap_or(0.0))
}

/// Unitary Schur factorization M = Q T Q* with T upper triangular.
pub fn schur(m: &CMat) -> Result<(CMat, CMat)> {
    require_square(m)?;
    check_finite(m)?;
    let dec = m
        .clone()
        .try_schur(f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or(Error::NoConvergence)?;
    let (q, t) = dec.unpack();
    Ok((q, t))
}

/// Eigenvalues only, via the Schur form.
pub fn eigenvalues(m: &CMat) -> Result<Vec<C64>> {
    let (_, t) = schur(m)?;
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Eigenvector matrix from an upper triangular T by back substitution.
/// Near-zero denominators are clamped, so defective structure surfaces as an
/// ill-conditioned V rather than a division failure.
fn triangular_eigenvectors(t: &CMat) -> CMat {
    let n = t.nrows();
    let smlnum = f64::EPSILON * t.norm().max(f64::MIN_POSITIVE);
    let mut y = CMat::zeros(n, n);
    for k in 0..n {
        let lam = t[(k, k)];
        y[(k, k)] = cplx(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = cplx(0.0, 0.0);
            for j in i + 1..=k {
                s += t[(i, j)] * y[(j, k)];
            }
            let mut den = t[(i, i)] - lam;
            if den.norm() < smlnum {
                den = cplx(smlnum, 0.0);
            }
            y[(i, k)] = -s / den;
            // near-defective columns grow geometrically; rescale before the
            // running values can overflow
            let mag = y[(i, k)].norm();
            if mag > 1e100 {
                for j in i..=k {
                    y[(j, k)] /= cplx(mag, 0.0);
                }
            }
        }
        // normalize max-first so the squared sum cannot overflow
        let mx = (0..=k).map(|i| y[(i, k)].norm()).fold(0.0, f64::max);
        if mx > 0.0 {
            for i in 0..=k {
                y[(i, k)] /= cplx(mx, 0.0);
            }
            let norm = y.column(k).norm();
            for i in 0..=k {
                y[(i, k)] /= cplx(norm, 0.0);
            }
        }
    }
    y
}

/// General eigendecomposition M = V diag(lambda) V^-1 with conditioning.
pub fn eig_general(m: &CMat) -> Result<EigenSystem> {
    let (q, t) = schur(m)?;
    let n = t.nrows();
    let y = triangular_eigenvectors(&t);
    let mut v = &q * y;
    for k in 0..n {
        let norm = v.column(k).norm();
        if norm > 0.0 {
            let col = v.column(k) / cplx(norm, 0.0);
            v.set_column(k, &col);
        }
    }
    let sv = svd(&v)?.singular_values;
    let smin = sv[n - 1];
    let cond = if smin > 0.0 { sv[0] / smin } else { f64::INFINITY };
    Ok(EigenSystem {
        eigenvalues: (0..n).map(|i| t[(i, i)]).collect(),
        eigenvectors: v,
        cond,
        defective: !(cond < DEFECTIVE_CAP),
    })
}

/// Solve M X = rhs by LU with partial pivoting.
pub fn linear_solve(m: &CMat, rhs: &CMat) -> Result<CMat> {
    require_square(m)?;
    check_finite(m)?;
    check_finite(rhs)?;
    if m.nrows() != rhs.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "solve: {}x{} vs rhs {}x{}",
            m.nrows(),
            m.ncols(),
            rhs.nrows(),
            rhs.ncols()
        )));
    }
    let lu = m.clone().lu();
    let x = lu.solve(rhs).ok_or(Error::Singular)?;
    check_finite(&x).map_err(|_| Error::Singular)?;
    Ok(x)
}

/// Bidiagonal Jordan-type block: `diag` on the diagonal, `sup` above it.
pub fn bidiagonal(n: usize, diag: f64, sup: f64) -> CMat {
    CMat::from_fn(n, n, |i, j| {
        if i == j {
            cplx(diag, 0.0)
        } else if j == i + 1 {
            cplx(sup, 0.0)
        } else {
            cplx(0.0, 0.0)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_cmat(rng: &mut StdRng, rows: usize, cols: usize) -> CMat {
        CMat::from_fn(rows, cols, |_, _| {
            cplx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    /// Determinant by Laplace expansion along the first row. Exponential cost;
    /// test oracle only, independent of the LU/QR paths under test.
    fn laplace_det(m: &CMat) -> C64 {
        let n = m.nrows();
        if n == 1 {
            return m[(0, 0)];
        }
        let mut acc = cplx(0.0, 0.0);
        for j in 0..n {
            let minor = CMat::from_fn(n - 1, n - 1, |r, c| {
                m[(r + 1, if c < j { c } else { c + 1 })]
            });
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += m[(0, j)] * cplx(sign, 0.0) * laplace_det(&minor);
        }
        acc
    }

    #[test]
    fn hermitian_eig_scalar() {
        let h = CMat::from_element(1, 1, cplx(-1.0, 0.0));
        let es = hermitian_eig(&h, DEFAULT_TOL).unwrap();
        assert!((es.eigenvalues[0] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn hermitian_eig_swap_matrix() {
        let h = CMat::from_row_slice(2, 2, &[cplx(0., 0.), cplx(1., 0.), cplx(1., 0.), cplx(0., 0.)]);
        let es = hermitian_eig(&h, DEFAULT_TOL).unwrap();
        assert!((es.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((es.eigenvalues[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn hermitian_eig_rejects_nonhermitian() {
        let m = CMat::from_row_slice(2, 2, &[cplx(0., 0.), cplx(1., 0.), cplx(2., 0.), cplx(0., 0.)]);
        assert!(matches!(
            hermitian_eig(&m, DEFAULT_TOL),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn hermitian_eig_matches_charpoly_roots() {
        // Oracle: bisect sign changes of det(H - x I) computed by Laplace
        // expansion over the Gershgorin interval.
        let mut rng = StdRng::seed_from_u64(7);
        let m = random_cmat(&mut rng, 8, 8);
        let h = hermitian_part(&m);

        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..8 {
            let radius: f64 = (0..8).filter(|&j| j != i).map(|j| h[(i, j)].norm()).sum();
            lo = lo.min(h[(i, i)].re - radius);
            hi = hi.max(h[(i, i)].re + radius);
        }
        let f = |x: f64| {
            let shifted = &h - CMat::identity(8, 8) * cplx(x, 0.0);
            laplace_det(&shifted).re
        };
        let samples = 4000;
        let mut roots = Vec::new();
        let mut prev_x = lo;
        let mut prev_f = f(lo);
        for s in 1..=samples {
            let x = lo + (hi - lo) * s as f64 / samples as f64;
            let fx = f(x);
            if prev_f == 0.0 {
                roots.push(prev_x);
            } else if prev_f.signum() != fx.signum() {
                let (mut a, mut b, mut fa) = (prev_x, x, prev_f);
                for _ in 0..80 {
                    let mid = 0.5 * (a + b);
                    let fm = f(mid);
                    if fa.signum() == fm.signum() {
                        a = mid;
                        fa = fm;
                    } else {
                        b = mid;
                    }
                }
                roots.push(0.5 * (a + b));
            }
            prev_x = x;
            prev_f = fx;
        }
        assert_eq!(roots.len(), 8, "oracle must isolate all 8 eigenvalues");
        roots.sort_by(|a, b| b.partial_cmp(a).unwrap());

        let es = hermitian_eig(&h, DEFAULT_TOL).unwrap();
        for (computed, oracle) in es.eigenvalues.iter().zip(&roots) {
            assert!(
                (computed - oracle).abs() < 1e-8,
                "eigenvalue {computed} vs oracle {oracle}"
            );
        }
    }

    #[test]
    fn hermitian_eig_residual() {
        let mut rng = StdRng::seed_from_u64(11);
        let h = hermitian_part(&random_cmat(&mut rng, 10, 10));
        let es = hermitian_eig(&h, DEFAULT_TOL).unwrap();
        let hnorm = h.norm();
        for k in 0..10 {
            let v = es.eigenvectors.column(k);
            let resid = (&h * v - v * cplx(es.eigenvalues[k], 0.0)).norm();
            assert!(resid <= 1e-12 * hnorm.max(1.0), "residual {resid}");
        }
    }

    #[test]
    fn svd_fallback_on_hard_hermitian_input() {
        // the QR-iteration SVD silently returns sigma_1 = 0.9934 for this
        // rank-1 Hermitian matrix; the true value equals the Frobenius norm
        let e = CMat::from_row_slice(
            2,
            2,
            &[
                cplx(0.022120989028608817, 0.0),
                cplx(0.017104412352032174, 0.14287154034387956),
                cplx(0.017104412352032174, -0.14287154034387956),
                cplx(0.9359815664373745, 0.0),
            ],
        );
        let res = svd(&e).unwrap();
        assert!((res.singular_values[0] - e.norm()).abs() < 1e-12);
        assert!(res.singular_values[1].abs() < 1e-12);
    }

    #[test]
    fn svd_identity() {
        let res = svd(&CMat::identity(3, 3)).unwrap();
        for s in &res.singular_values {
            assert!((s - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn svd_jordan_two() {
        // [[-1,2],[0,-1]] has s1 = 1 + sqrt(2), from the eigenvalues of A*A.
        let m = bidiagonal(2, -1.0, 2.0);
        let res = svd(&m).unwrap();
        assert!((res.singular_values[0] - (1.0 + 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn svd_cross_check_with_hermitian_eig() {
        let mut rng = StdRng::seed_from_u64(3);
        let m = random_cmat(&mut rng, 6, 4);
        let res = svd(&m).unwrap();
        let gram = m.adjoint() * &m;
        let es = hermitian_eig(&gram, 1e-8).unwrap();
        for k in 0..4 {
            let s2 = res.singular_values[k] * res.singular_values[k];
            assert!((s2 - es.eigenvalues[k]).abs() < 1e-10 * es.eigenvalues[0].max(1.0));
        }
        // reconstruction (thin SVD: u is 6x4, v_t is 4x4)
        let sigma = CMat::from_fn(4, 4, |i, j| {
            if i == j {
                cplx(res.singular_values[i], 0.0)
            } else {
                cplx(0.0, 0.0)
            }
        });
        let resid = (&res.u * sigma * &res.v_t - &m).norm();
        assert!(resid < 1e-12 * res.singular_values[0]);
    }

    #[test]
    fn spectral_norm_zero() {
        assert_eq!(spectral_norm(&CMat::zeros(3, 3)).unwrap(), 0.0);
    }

    #[test]
    fn spectral_norm_jordan_closed_form() {
        // sqrt(1 + a^2/2 + a sqrt(a^2/4 + 1)) at a = 2 is 1 + sqrt(2)
        let m = bidiagonal(2, -1.0, 2.0);
        assert!((spectral_norm(&m).unwrap() - (1.0 + 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn spectral_norm_jordan_gerschgorin_window() {
        let m = bidiagonal(64, -1.0, 4.0);
        let norm = spectral_norm(&m).unwrap();
        assert!(norm >= 3.0 && norm <= 5.0, "norm {norm}");
    }

    #[test]
    fn eig_general_normal_diag() {
        let m = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            cplx(-1.0, 0.0),
            cplx(-2.0, 0.0),
        ]));
        let es = eig_general(&m).unwrap();
        let mut re: Vec<f64> = es.eigenvalues.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!((re[0] + 1.0).abs() < 1e-12 && (re[1] + 2.0).abs() < 1e-12);
        assert!((es.cond - 1.0).abs() < 1e-8);
        assert!(!es.defective);
    }

    #[test]
    fn eig_general_jordan_defective() {
        let es = eig_general(&bidiagonal(2, -1.0, 1.0)).unwrap();
        assert!(es.defective, "cond = {}", es.cond);
    }

    #[test]
    fn eig_general_constructed_spectrum() {
        let mut rng = StdRng::seed_from_u64(21);
        let n = 8;
        let lambda: Vec<C64> = (0..n)
            .map(|i| cplx(-1.0 - i as f64, rng.gen_range(-1.0..1.0)))
            .collect();
        let v = loop {
            let v = random_cmat(&mut rng, n, n);
            if svd(&v).unwrap().singular_values[n - 1] > 0.1 {
                break v;
            }
        };
        let vinv = linear_solve(&v, &CMat::identity(n, n)).unwrap();
        let m = &v * CMat::from_diagonal(&nalgebra::DVector::from_vec(lambda.clone())) * &vinv;
        let es = eig_general(&m).unwrap();
        let mut got = es.eigenvalues.clone();
        let mut want = lambda;
        got.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        want.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < 1e-8, "{g} vs {w}");
        }
        // residual M V = V diag(lambda)
        let lam = CMat::from_diagonal(&nalgebra::DVector::from_vec(es.eigenvalues.clone()));
        let resid = (&m * &es.eigenvectors - &es.eigenvectors * lam).norm();
        assert!(resid < 1e-8 * m.norm());
    }

    #[test]
    fn linear_solve_identity_and_diag() {
        let b = CMat::from_column_slice(2, 1, &[cplx(2.0, 0.0), cplx(4.0, 0.0)]);
        let x = linear_solve(&CMat::identity(2, 2), &b).unwrap();
        assert!((&x - &b).norm() < 1e-15);
        let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            cplx(2.0, 0.0),
            cplx(4.0, 0.0),
        ]));
        let x = linear_solve(&d, &b).unwrap();
        assert!((x[(0, 0)] - cplx(1.0, 0.0)).norm() < 1e-15);
        assert!((x[(1, 0)] - cplx(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn linear_solve_residual_random() {
        let mut rng = StdRng::seed_from_u64(5);
        let m = random_cmat(&mut rng, 10, 10) + CMat::identity(10, 10) * cplx(4.0, 0.0);
        let rhs = random_cmat(&mut rng, 10, 2);
        let x = linear_solve(&m, &rhs).unwrap();
        let resid = (&m * &x - &rhs).norm();
        assert!(resid <= 1e-10 * m.norm() * x.norm().max(1.0));
    }

    #[test]
    fn linear_solve_singular() {
        let m = CMat::zeros(2, 2);
        let rhs = CMat::from_element(2, 1, cplx(1.0, 0.0));
        assert!(matches!(linear_solve(&m, &rhs), Err(Error::Singular)));
    }
}
