//! Dense full SVD (one-sided Jacobi) and iterative top-singular-pair
//! extraction (power iteration on the Gram operator).
//!
//! The two routes deliberately have very different costs: the full
//! decomposition is what a nuclear-norm projection needs, while the top pair
//! is all a nuclear-norm linear minimization needs.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numerics::{all_finite, dot, norm_l2, Matrix, SeededRng};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float as _;

/// Thin SVD `Y = U diag(sigma) Vᵀ` with `k = min(rows, cols)`.
///
/// `u` is `rows x k`, `v` is `cols x k`, both with orthonormal columns, and
/// `sigma` is nonnegative and sorted nonincreasing.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

impl SvdResult {
    /// `U diag(sigma') Vᵀ` for modified singular values `sigma'`.
    pub fn reconstruct_with(&self, sigma: &[f64]) -> Matrix {
        let (m, n, k) = (self.u.rows(), self.v.rows(), self.sigma.len());
        debug_assert_eq!(sigma.len(), k);
        let mut out = Matrix::zeros(m, n);
        for r in 0..k {
            if sigma[r] == 0.0 {
                continue;
            }
            for i in 0..m {
                let s = sigma[r] * self.u.get(i, r);
                if s == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.set(i, j, out.get(i, j) + s * self.v.get(j, r));
                }
            }
        }
        out
    }
}

// Relative column-orthogonality threshold at which Jacobi sweeps stop.
const JACOBI_TOL: f64 = 1e-11;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Full SVD by one-sided Jacobi rotations.
///
/// Rotations are applied to column pairs of a working copy until all pairs
/// are mutually orthogonal (relative to their norms), which typically takes
/// fewer than a dozen sweeps. A zero matrix yields all-zero singular values
/// with orthonormal basis columns.
pub fn full_svd(a: &Matrix) -> SvdResult {
    if a.rows() >= a.cols() {
        full_svd_tall(a)
    } else {
        // Work on the transpose and swap the factors back.
        let t = full_svd_tall(&a.transpose());
        SvdResult {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        }
    }
}

fn full_svd_tall(a: &Matrix) -> SvdResult {
    let (m, n) = (a.rows(), a.cols());
    debug_assert!(m >= n);

    // Column-major working copy; rotations touch contiguous memory.
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| a.get(i, j)).collect()).collect();
    let mut vcols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    let mut sqnorm: Vec<f64> = cols.iter().map(|c| dot(c, c)).collect();

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = 0usize;
        for i in 0..n {
            for j in (i + 1)..n {
                let aii = sqnorm[i];
                let ajj = sqnorm[j];
                let aij = dot(&cols[i], &cols[j]);
                if aij == 0.0 || aij * aij <= JACOBI_TOL * JACOBI_TOL * aii * ajj {
                    continue;
                }
                rotated += 1;
                let zeta = (ajj - aii) / (2.0 * aij);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut cols, i, j, c, s);
                rotate_pair(&mut vcols, i, j, c, s);
                sqnorm[i] = dot(&cols[i], &cols[i]);
                sqnorm[j] = dot(&cols[j], &cols[j]);
            }
        }
        if rotated == 0 {
            break;
        }
    }

    // Singular values, sorted nonincreasing (stable under ties).
    let mut sigma: Vec<f64> = sqnorm.iter().map(|&s| s.sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| sigma[y].total_cmp(&sigma[x]));
    let mut ucols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut vout: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut svals = Vec::with_capacity(n);
    for &idx in &order {
        svals.push(sigma[idx]);
        ucols.push(core::mem::take(&mut cols[idx]));
        vout.push(core::mem::take(&mut vcols[idx]));
    }
    sigma = svals;

    for (r, col) in ucols.iter_mut().enumerate() {
        if sigma[r] > 0.0 {
            let inv = 1.0 / sigma[r];
            for x in col.iter_mut() {
                *x *= inv;
            }
        }
    }
    // Orthonormal completion for exactly-zero singular values.
    for r in 0..n {
        if sigma[r] > 0.0 {
            continue;
        }
        ucols[r] = complete_column(&ucols[..r], m);
    }
    // Deterministic sign: first nonzero entry of each left vector positive.
    for r in 0..n {
        if let Some(&lead) = ucols[r].iter().find(|&&x| x != 0.0) {
            if lead < 0.0 {
                for x in ucols[r].iter_mut() {
                    *x = -*x;
                }
                for x in vout[r].iter_mut() {
                    *x = -*x;
                }
            }
        }
    }

    let mut u = Matrix::zeros(m, n);
    let mut v = Matrix::zeros(n, n);
    for r in 0..n {
        for i in 0..m {
            u.set(i, r, ucols[r][i]);
        }
        for i in 0..n {
            v.set(i, r, vout[r][i]);
        }
    }
    SvdResult { u, sigma, v }
}

fn rotate_pair(cols: &mut [Vec<f64>], i: usize, j: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(j);
    let ci = &mut lo[i];
    let cj = &mut hi[0];
    for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
        let xi = *x;
        let yj = *y;
        *x = c * xi - s * yj;
        *y = s * xi + c * yj;
    }
}

/// Unit vector orthogonal to all of `existing`, picked from the standard
/// basis by largest residual.
fn complete_column(existing: &[Vec<f64>], m: usize) -> Vec<f64> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for cand in 0..m {
        let mut v = vec![0.0; m];
        v[cand] = 1.0;
        for e in existing {
            let proj = dot(&v, e);
            for (x, y) in v.iter_mut().zip(e) {
                *x -= proj * y;
            }
        }
        let norm = norm_l2(&v);
        if best.as_ref().map_or(true, |(b, _)| norm > *b) {
            if norm > 0.0 {
                for x in v.iter_mut() {
                    *x /= norm;
                }
            }
            best = Some((norm, v));
        }
    }
    best.expect("m >= 1").1
}

/// Approximate top singular pair.
#[derive(Debug, Clone)]
pub struct TopPair {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub sigma1_estimate: f64,
    pub iterations: usize,
    pub converged: bool,
}

// Successive-change factor: stop once the Rayleigh estimate moves by less
// than this fraction of the requested relative tolerance.
const POWER_STOP_FACTOR: f64 = 1e-2;

/// Top singular pair of a nonzero matrix by power iteration on `x ↦ Yᵀ(Yx)`
/// from a seeded random unit start.
///
/// The Rayleigh estimates `uᵀYv` are nondecreasing and never exceed the top
/// singular value; the run stops when their relative change falls below a
/// small fraction of `tol`, or reports `converged = false` after `max_iter`
/// iterations.
pub fn top_singular_pair(a: &Matrix, tol: f64, max_iter: usize, seed: u64) -> Result<TopPair> {
    if !all_finite(a.data()) {
        return Err(Error::NonFinite("matrix"));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive"));
    }
    if a.data().iter().all(|&x| x == 0.0) {
        return Err(Error::InvalidParameter(
            "top singular pair of the zero matrix is undefined",
        ));
    }

    let n = a.cols();
    let mut rng = SeededRng::new(seed);
    let mut v = unit_normal(&mut rng, n);
    let mut u = vec![0.0; a.rows()];
    let mut sigma_prev = 0.0f64;
    let mut sigma = 0.0f64;
    let mut converged = false;
    let mut iterations = 0usize;

    for it in 0..max_iter {
        iterations = it + 1;
        let w = a.matvec(&v);
        let nw = norm_l2(&w);
        if nw == 0.0 {
            // Start landed in the null space; redraw deterministically.
            v = unit_normal(&mut rng, n);
            continue;
        }
        u = w;
        for x in u.iter_mut() {
            *x /= nw;
        }
        sigma = nw;
        let z = a.tr_matvec(&u);
        let nz = norm_l2(&z);
        if nz == 0.0 {
            v = unit_normal(&mut rng, n);
            continue;
        }
        v = z;
        for x in v.iter_mut() {
            *x /= nz;
        }
        if it > 0 && (sigma - sigma_prev) <= POWER_STOP_FACTOR * tol * sigma {
            converged = true;
            break;
        }
        sigma_prev = sigma;
    }

    Ok(TopPair {
        u,
        v,
        sigma1_estimate: sigma,
        iterations,
        converged,
    })
}

fn unit_normal(rng: &mut SeededRng, n: usize) -> Vec<f64> {
    loop {
        let mut v = rng.normal_vec(n);
        let norm = norm_l2(&v);
        if norm > 0.0 {
            for x in v.iter_mut() {
                *x /= norm;
            }
            return v;
        }
    }
}
