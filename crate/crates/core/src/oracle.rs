//! Brute-force references for the test suites: explicit vertex enumeration,
//! an argmin scan over vertices, a projected-gradient projection onto the
//! convex hull of the vertices, and a densely materialized version of the
//! Birkhoff affine projector.
//!
//! Nothing here shares code with the production oracles or projections; the
//! helpers are intentionally naive so they can serve as independent checks.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lmo::LmoResult;
use crate::numerics::{Matrix, Point};
use crate::sets::SetSpec;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float as _;

const MAX_ENUM_VERTICES: usize = 50_000;

fn permutations_of(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Explicit vertex list of an enumerable set at small size.
///
/// Supported: simplex, ℓ1-ball, ℓ∞-ball (n ≤ 14), Birkhoff (n ≤ 6),
/// permutahedron (n ≤ 8), and flow polytopes with a modest number of
/// source-sink paths. The ℓ2-, ℓp-, and nuclear balls are not polytopes and
/// are rejected.
pub fn vertices(spec: &SetSpec) -> Result<Vec<Point>> {
    match spec {
        SetSpec::Simplex { n } => Ok((0..*n)
            .map(|i| {
                let mut e = vec![0.0; *n];
                e[i] = 1.0;
                Point::Vector(e)
            })
            .collect()),
        SetSpec::L1Ball { n } => {
            let mut out = Vec::with_capacity(2 * n);
            for i in 0..*n {
                for sign in [1.0, -1.0] {
                    let mut e = vec![0.0; *n];
                    e[i] = sign;
                    out.push(Point::Vector(e));
                }
            }
            Ok(out)
        }
        SetSpec::LInfBall { n } => {
            if *n > 14 {
                return Err(Error::Unsupported("linf vertex enumeration beyond n = 14"));
            }
            let mut out = Vec::with_capacity(1 << *n);
            for mask in 0..(1usize << *n) {
                let v: Vec<f64> = (0..*n)
                    .map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 })
                    .collect();
                out.push(Point::Vector(v));
            }
            Ok(out)
        }
        SetSpec::Birkhoff { n } => {
            if *n > 6 {
                return Err(Error::Unsupported("Birkhoff vertex enumeration beyond n = 6"));
            }
            Ok(permutations_of(*n)
                .into_iter()
                .map(|perm| {
                    let mut m = Matrix::zeros(*n, *n);
                    for (i, &j) in perm.iter().enumerate() {
                        m.set(i, j, 1.0);
                    }
                    Point::Matrix(m)
                })
                .collect())
        }
        SetSpec::Permutahedron(w) => {
            let n = w.len();
            if n > 8 {
                return Err(Error::Unsupported(
                    "permutahedron vertex enumeration beyond n = 8",
                ));
            }
            Ok(permutations_of(n)
                .into_iter()
                .map(|perm| {
                    Point::Vector(perm.iter().map(|&i| w.sorted()[i]).collect())
                })
                .collect())
        }
        SetSpec::FlowPolytope(dag) => {
            fn rec(
                dag: &crate::combinatorial::Dag,
                v: usize,
                picked: &mut Vec<usize>,
                out: &mut Vec<Point>,
            ) -> Result<()> {
                if out.len() > MAX_ENUM_VERTICES {
                    return Err(Error::Unsupported("too many source-sink paths"));
                }
                if v == dag.sink() {
                    let mut flow = vec![0.0; dag.edge_count()];
                    for &e in picked.iter() {
                        flow[e] = 1.0;
                    }
                    out.push(Point::Vector(flow));
                    return Ok(());
                }
                for (e, &(t, h)) in dag.edges().iter().enumerate() {
                    if t == v {
                        picked.push(e);
                        rec(dag, h, picked, out)?;
                        picked.pop();
                    }
                }
                Ok(())
            }
            let mut out = Vec::new();
            rec(dag, dag.source(), &mut Vec::new(), &mut out)?;
            Ok(out)
        }
        SetSpec::L2Ball { .. } | SetSpec::LpBall { .. } | SetSpec::NuclearBall { .. } => {
            Err(Error::Unsupported("set has no finite vertex list"))
        }
    }
}

/// Exact argmin of `⟨x, y⟩` over the vertex list; the first vertex attaining
/// the minimum wins.
pub fn brute_lmo(spec: &SetSpec, direction: &Point) -> Result<LmoResult> {
    spec.check_shape(direction)?;
    let verts = vertices(spec)?;
    let y = direction.as_slice();
    let mut best: Option<(f64, Point)> = None;
    for v in verts {
        let obj: f64 = v.as_slice().iter().zip(y).map(|(a, b)| a * b).sum();
        if best.as_ref().map_or(true, |(b, _)| obj < *b) {
            best = Some((obj, v));
        }
    }
    let (objective, point) = best.expect("vertex lists are nonempty");
    Ok(LmoResult {
        point,
        objective,
        is_vertex: true,
    })
}

/// Naive simplex projection used only inside the oracle: scans every
/// support size of the sorted input and returns the threshold whose
/// Karush-Kuhn-Tucker pattern is consistent.
fn naive_weight_simplex_projection(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mut sorted = y.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.reverse();
    let mut choice = None;
    let mut running = 0.0;
    for k in 1..=n {
        running += sorted[k - 1];
        let tau = (running - 1.0) / k as f64;
        let support_ok = sorted[k - 1] > tau;
        let rest_ok = k == n || sorted[k] <= tau;
        if support_ok && rest_ok {
            choice = Some(tau);
        }
    }
    let tau = choice.unwrap_or((y.iter().sum::<f64>() - 1.0) / n as f64);
    y.iter().map(|&v| (v - tau).max(0.0)).collect()
}

/// Largest eigenvalue estimate of `VᵀV` by a few naive power steps, used to
/// pick a safe gradient step size.
fn lipschitz_estimate(verts: &[Point]) -> f64 {
    let k = verts.len();
    let mut lam = vec![1.0 / (k as f64).sqrt(); k];
    let mut estimate = 0.0;
    for _ in 0..60 {
        // w = V λ in point space, then back through Vᵀ.
        let d = verts[0].len();
        let mut w = vec![0.0; d];
        for (c, v) in lam.iter().zip(verts) {
            for (wi, vi) in w.iter_mut().zip(v.as_slice()) {
                *wi += c * vi;
            }
        }
        let mut next = vec![0.0; k];
        for (out, v) in next.iter_mut().zip(verts) {
            *out = v.as_slice().iter().zip(&w).map(|(a, b)| a * b).sum();
        }
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 1.0;
        }
        estimate = norm / lam.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in next.iter_mut() {
            *v /= norm;
        }
        lam = next;
    }
    estimate.max(1e-12)
}

/// Nearest point of `conv(vertices(spec))` to `y`, by projected gradient on
/// the simplex of convex weights, run until the proximal-gradient residual
/// of the weights falls below `tol`.
pub fn brute_project(spec: &SetSpec, y: &Point, tol: f64) -> Result<Point> {
    spec.check_shape(y)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive"));
    }
    let verts = vertices(spec)?;
    let k = verts.len();
    let d = y.len();
    let target = y.as_slice();

    let mut lam = vec![1.0 / k as f64; k];
    let step = 1.0 / (1.05 * lipschitz_estimate(&verts));
    let max_iter = 2_000_000usize;
    let mut current = vec![0.0; d];
    for _ in 0..max_iter {
        current.iter_mut().for_each(|v| *v = 0.0);
        for (c, v) in lam.iter().zip(&verts) {
            for (xi, vi) in current.iter_mut().zip(v.as_slice()) {
                *xi += c * vi;
            }
        }
        let residual_dir: Vec<f64> = current.iter().zip(target).map(|(a, b)| a - b).collect();
        // Weight-space gradient Vᵀ(Vλ - y).
        let mut grad = vec![0.0; k];
        for (g, v) in grad.iter_mut().zip(&verts) {
            *g = v.as_slice().iter().zip(&residual_dir).map(|(a, b)| a * b).sum();
        }
        let shifted: Vec<f64> = lam.iter().zip(&grad).map(|(l, g)| l - step * g).collect();
        let next = naive_weight_simplex_projection(&shifted);
        let moved = lam
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
            / step;
        lam = next;
        if moved <= tol {
            break;
        }
    }

    current.iter_mut().for_each(|v| *v = 0.0);
    for (c, v) in lam.iter().zip(&verts) {
        for (xi, vi) in current.iter_mut().zip(v.as_slice()) {
            *xi += c * vi;
        }
    }
    Ok(match spec.point_shape() {
        crate::sets::PointShape::Vector(_) => Point::Vector(current),
        crate::sets::PointShape::Matrix(m, n) => Point::Matrix(Matrix::new(m, n, current)?),
    })
}

/// Densely materialized `A†A` product for the Birkhoff affine constraint
/// matrix, built from its two distinct circulant blocks.
pub fn dense_bccb_apply(n: usize, x: &[f64]) -> Result<Vec<f64>> {
    if n == 0 || n > 16 {
        return Err(Error::Unsupported("dense BCCB product limited to 1 <= n <= 16"));
    }
    if x.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: x.len(),
        });
    }
    let nn = n * n;
    let nf = n as f64;
    // Block (bi, bj) is B1 when bi == bj else B2, all scaled by 1/n².
    let mut full = Matrix::zeros(nn, nn);
    for bi in 0..n {
        for bj in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let diag_block = bi == bj;
                    let val = if diag_block {
                        if i == j {
                            nf + (nf - 1.0)
                        } else {
                            nf - 1.0
                        }
                    } else if i == j {
                        nf - 1.0
                    } else {
                        -1.0
                    };
                    full.set(bi * n + i, bj * n + j, val / (nf * nf));
                }
            }
        }
    }
    Ok(full.matvec(x))
}
