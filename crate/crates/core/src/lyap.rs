//! Solve A X + X A* = -B B* for stable A: a Schur-based dense solver, an
//! independent Kronecker-vectorization oracle, and the norm identity
//! ||B||^2 <= 2 ||A|| s1.

use crate::densela::{
    self, cplx, hermitian_eig, linear_solve, schur, spectral_norm, CMat, C64,
};
use crate::error::{Error, Result};

/// Largest problem size accepted by the n^2 x n^2 vectorization oracle.
pub const ORACLE_SIZE_CAP: usize = 64;

/// Relative threshold for the numerical rank of the Krylov matrix.
pub const CONTROLLABILITY_THRESHOLD: f64 = 1e-12;

/// A stable pair (A, B) with the rank of B.
#[derive(Debug, Clone)]
pub struct LyapunovProblem {
    pub a: CMat,
    pub b: CMat,
    /// Numerical rank of B.
    pub rank_b: usize,
    /// Numerical rank of the (column-normalized) Krylov matrix. Equals n when
    /// the controllability test passed; smaller values are only present on
    /// problems constructed with [`LyapunovProblem::assume_controllable`].
    pub krylov_rank: usize,
}

/// Solution X with its ordered singular values and the solve residual.
#[derive(Debug, Clone)]
pub struct SolutionSpectrum {
    /// Hermitian positive definite solution.
    pub x: CMat,
    /// Eigenvalues of X in descending order; for Hermitian positive definite
    /// X these are its singular values.
    pub singular_values: Vec<f64>,
    /// Frobenius norm of A X + X A* + B B*.
    pub residual: f64,
}

impl SolutionSpectrum {
    pub fn s1(&self) -> f64 {
        self.singular_values[0]
    }

    /// s_k / s_1 for 1-based k.
    pub fn ratio(&self, k: usize) -> f64 {
        self.singular_values[k - 1] / self.singular_values[0]
    }
}

fn check_stable(a: &CMat) -> Result<Vec<C64>> {
    let eigs = densela::eigenvalues(a)?;
    for &lambda in &eigs {
        if lambda.re >= 0.0 {
            return Err(Error::Unstable(lambda));
        }
    }
    Ok(eigs)
}

/// Krylov matrix [B AB ... A^{n-1}B] with each block column normalized so
/// powers of A cannot overflow; normalization leaves the rank unchanged.
pub fn krylov_matrix(a: &CMat, b: &CMat) -> CMat {
    let n = a.nrows();
    let r = b.ncols();
    let mut k = CMat::zeros(n, n * r);
    let mut block = b.clone();
    for p in 0..n {
        let norm = block.norm();
        if norm > 0.0 {
            block /= cplx(norm, 0.0);
        }
        for c in 0..r {
            k.set_column(p * r + c, &block.column(c));
        }
        if p + 1 < n {
            block = a * block;
        }
    }
    k
}

fn numerical_rank(m: &CMat, threshold: f64) -> Result<usize> {
    let sv = densela::svd(m)?.singular_values;
    let s1 = sv[0];
    Ok(sv.iter().filter(|&&s| s > threshold * s1).count())
}

impl LyapunovProblem {
    /// Build a problem, verifying stability of A and controllability of
    /// (A, B) via the numerical rank of the Krylov matrix.
    pub fn new(a: CMat, b: CMat) -> Result<Self> {
        let p = Self::assume_controllable(a, b)?;
        let n = p.a.nrows();
        if p.krylov_rank < n {
            return Err(Error::NotControllable {
                rank: p.krylov_rank,
                n,
            });
        }
        Ok(p)
    }

    /// Build a problem, verifying stability only. The Krylov rank is still
    /// recorded but not enforced. Intended for model families whose
    /// controllability is known analytically yet whose Krylov matrices are
    /// too graded for a floating-point rank test at large n.
    pub fn assume_controllable(a: CMat, b: CMat) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::NotSquare {
                rows: a.nrows(),
                cols: a.ncols(),
            });
        }
        if b.nrows() != a.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "A is {0}x{0} but B has {1} rows",
                a.nrows(),
                b.nrows()
            )));
        }
        densela::check_finite(&a)?;
        densela::check_finite(&b)?;
        check_stable(&a)?;
        let rank_b = numerical_rank(&b, CONTROLLABILITY_THRESHOLD)?;
        let krylov_rank = numerical_rank(&krylov_matrix(&a, &b), CONTROLLABILITY_THRESHOLD)?;
        Ok(Self {
            a,
            b,
            rank_b,
            krylov_rank,
        })
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }
}

fn spectrum_from_x(p: &LyapunovProblem, x: CMat) -> Result<SolutionSpectrum> {
    // Symmetrize before eigenvalue extraction; roundoff asymmetry otherwise
    // leaks into the small singular values.
    let x = densela::hermitian_part(&x);
    let es = hermitian_eig(&x, 1e-6)?;
    let residual = (&p.a * &x + &x * p.a.adjoint() + &p.b * p.b.adjoint()).norm();
    Ok(SolutionSpectrum {
        x,
        singular_values: es.eigenvalues,
        residual,
    })
}

/// Solve A X + X A* = -B B* by unitary reduction of A to triangular form and
/// column back-substitution on the transformed equation.
pub fn solve_lyapunov(p: &LyapunovProblem) -> Result<SolutionSpectrum> {
    let n = p.n();
    let (q, t) = schur(&p.a)?;
    // T Y + Y T* = -Q* B B* Q
    let qb = q.adjoint() * &p.b;
    let c = &qb * qb.adjoint();
    let mut y = CMat::zeros(n, n);
    let eye = CMat::identity(n, n);
    for j in (0..n).rev() {
        // (T + conj(t_jj) I) y_j = -c_j - sum_{k>j} conj(t_jk) y_k
        let mut rhs = CMat::zeros(n, 1);
        for i in 0..n {
            rhs[(i, 0)] = -c[(i, j)];
        }
        for k in j + 1..n {
            let coeff = t[(j, k)].conj();
            for i in 0..n {
                rhs[(i, 0)] -= cplx(coeff.re, coeff.im) * y[(i, k)];
            }
        }
        let shifted = &t + &eye * t[(j, j)].conj();
        let col = solve_upper_triangular(&shifted, &rhs)
            .map_err(|e| Error::SolveFailure(format!("column {j}: {e}")))?;
        y.set_column(j, &col.column(0));
    }
    let x = &q * y * q.adjoint();
    spectrum_from_x(p, x)
}

fn solve_upper_triangular(u: &CMat, rhs: &CMat) -> Result<CMat> {
    let n = u.nrows();
    let mut x = rhs.clone();
    for i in (0..n).rev() {
        for k in i + 1..n {
            let coeff = u[(i, k)];
            for c in 0..x.ncols() {
                let sub = coeff * x[(k, c)];
                x[(i, c)] -= sub;
            }
        }
        let d = u[(i, i)];
        if d.norm() == 0.0 {
            return Err(Error::Singular);
        }
        for c in 0..x.ncols() {
            x[(i, c)] /= d;
        }
    }
    Ok(x)
}

/// Independent oracle: solve the vectorized n^2 x n^2 linear system
/// (I (x) A + conj(A) (x) I) vec(X) = -vec(B B*).
pub fn solve_lyapunov_oracle(p: &LyapunovProblem) -> Result<SolutionSpectrum> {
    let n = p.n();
    if n > ORACLE_SIZE_CAP {
        return Err(Error::TooLarge {
            n,
            cap: ORACLE_SIZE_CAP,
        });
    }
    let nn = n * n;
    let mut m = CMat::zeros(nn, nn);
    // vec stacks columns: vec(AX) = (I (x) A) vec(X), vec(X A*) = (conj(A) (x) I) vec(X)
    for bi in 0..n {
        for bj in 0..n {
            let abar = p.a[(bi, bj)].conj();
            for i in 0..n {
                if bi == bj {
                    for j in 0..n {
                        m[(bi * n + i, bj * n + j)] += p.a[(i, j)];
                    }
                }
                m[(bi * n + i, bj * n + i)] += abar;
            }
        }
    }
    let bbh = &p.b * p.b.adjoint();
    let mut rhs = CMat::zeros(nn, 1);
    for j in 0..n {
        for i in 0..n {
            rhs[(j * n + i, 0)] = -bbh[(i, j)];
        }
    }
    let xv = linear_solve(&m, &rhs)?;
    let x = CMat::from_fn(n, n, |i, j| xv[(j * n + i, 0)]);
    spectrum_from_x(p, x)
}

/// Both sides of ||B||^2 = ||A X + X A*|| <= 2 ||A|| s1.
pub fn norm_identity_check(p: &LyapunovProblem, sol: &SolutionSpectrum) -> Result<(f64, f64)> {
    let lhs = spectral_norm(&p.b)?.powi(2);
    let rhs = 2.0 * spectral_norm(&p.a)? * sol.s1();
    Ok((lhs, rhs))
}

/// Residual contract: residual <= tol (2 ||A|| ||X|| + ||B||^2).
pub fn verify_residual(p: &LyapunovProblem, sol: &SolutionSpectrum, tol: f64) -> Result<bool> {
    let scale = 2.0 * spectral_norm(&p.a)? * sol.s1() + spectral_norm(&p.b)?.powi(2);
    Ok(sol.residual <= tol * scale)
}
