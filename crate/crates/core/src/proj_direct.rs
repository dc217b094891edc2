//! Exact finite-procedure Euclidean projections: simplex, ℓ1, ℓ2, ℓ∞,
//! nuclear norm-ball, and permutahedron, plus the pool-adjacent-violators
//! kernel the permutahedron reduction rests on.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numerics::{all_finite, argsort_desc, sign, Matrix, Point};
use crate::sets::PermutahedronWeights;
use crate::svd::full_svd;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float as _;

/// Result of a projection: the projected point plus bookkeeping. Direct
/// methods report zero iterations; `residual` is the feasibility violation
/// of the returned point.
#[derive(Debug, Clone)]
pub struct ProjectionReport {
    pub point: Point,
    pub iterations: usize,
    pub residual: f64,
    pub method: &'static str,
    pub converged: bool,
}

impl ProjectionReport {
    fn direct(point: Point, residual: f64, method: &'static str) -> Self {
        Self {
            point,
            iterations: 0,
            residual,
            method,
            converged: true,
        }
    }
}

fn require_finite(y: &[f64]) -> Result<()> {
    if all_finite(y) {
        Ok(())
    } else {
        Err(Error::NonFinite("projection input"))
    }
}

/// Threshold for the sort-based simplex projection: `τ` such that
/// `max(y - τ, 0)` sums to one.
fn simplex_threshold(y: &[f64]) -> f64 {
    let mut sorted = y.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut prefix = 0.0;
    let mut tau = (sorted[0] - 1.0).min(sorted[0]); // replaced below at k = 0
    for (k, &u) in sorted.iter().enumerate() {
        prefix += u;
        let candidate = (prefix - 1.0) / (k as f64 + 1.0);
        if u > candidate {
            tau = candidate;
        } else {
            break;
        }
    }
    tau
}

/// Projection onto the standard simplex by sort and threshold.
pub fn proj_simplex(y: &[f64]) -> Result<ProjectionReport> {
    require_finite(y)?;
    if y.is_empty() {
        return Err(Error::InvalidParameter("input must be nonempty"));
    }
    let tau = simplex_threshold(y);
    let point: Vec<f64> = y.iter().map(|&v| (v - tau).max(0.0)).collect();
    let residual = (point.iter().sum::<f64>() - 1.0).abs();
    Ok(ProjectionReport::direct(
        Point::Vector(point),
        residual,
        "simplex-sort-threshold",
    ))
}

/// Projection onto the ℓ1-ball: identity inside, otherwise a signed simplex
/// projection of the magnitudes.
pub fn proj_l1(y: &[f64]) -> Result<ProjectionReport> {
    require_finite(y)?;
    if y.is_empty() {
        return Err(Error::InvalidParameter("input must be nonempty"));
    }
    let abs: Vec<f64> = y.iter().map(|v| v.abs()).collect();
    if abs.iter().sum::<f64>() <= 1.0 {
        return Ok(ProjectionReport::direct(
            Point::Vector(y.to_vec()),
            0.0,
            "l1-sort-threshold",
        ));
    }
    let tau = simplex_threshold(&abs);
    let point: Vec<f64> = y
        .iter()
        .map(|&v| sign(v) * (v.abs() - tau).max(0.0))
        .collect();
    let residual = (point.iter().map(|v| v.abs()).sum::<f64>() - 1.0).max(0.0);
    Ok(ProjectionReport::direct(
        Point::Vector(point),
        residual,
        "l1-sort-threshold",
    ))
}

/// Projection onto the ℓ2-ball: `y / max(‖y‖₂, 1)`.
pub fn proj_l2(y: &[f64]) -> Result<ProjectionReport> {
    require_finite(y)?;
    let norm = crate::numerics::norm_l2(y);
    let point: Vec<f64> = if norm <= 1.0 {
        y.to_vec()
    } else {
        y.iter().map(|v| v / norm).collect()
    };
    let residual = (crate::numerics::norm_l2(&point) - 1.0).max(0.0);
    Ok(ProjectionReport::direct(
        Point::Vector(point),
        residual,
        "l2-rescale",
    ))
}

/// Projection onto the ℓ∞-ball: entrywise clamp to `[-1, 1]`.
pub fn proj_linf(y: &[f64]) -> Result<ProjectionReport> {
    require_finite(y)?;
    let point: Vec<f64> = y.iter().map(|&v| v.clamp(-1.0, 1.0)).collect();
    Ok(ProjectionReport::direct(
        Point::Vector(point),
        0.0,
        "linf-clamp",
    ))
}

/// Isotonic least squares under the nondecreasing constraint, solved by
/// pool-adjacent-violators: violating neighbor blocks are merged into their
/// mean until the block means are monotone.
pub fn pava_nondecreasing(a: &[f64]) -> Result<Vec<f64>> {
    require_finite(a)?;
    // (sum, count) per block; mean = sum / count.
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(a.len());
    for &v in a {
        blocks.push((v, 1));
        while blocks.len() >= 2 {
            let (s_last, c_last) = blocks[blocks.len() - 1];
            let (s_prev, c_prev) = blocks[blocks.len() - 2];
            if s_prev / c_prev as f64 > s_last / c_last as f64 {
                blocks.pop();
                let top = blocks.len() - 1;
                blocks[top] = (s_prev + s_last, c_prev + c_last);
            } else {
                break;
            }
        }
    }
    let mut out = Vec::with_capacity(a.len());
    for &(s, c) in &blocks {
        let mean = s / c as f64;
        out.extend(core::iter::repeat(mean).take(c));
    }
    Ok(out)
}

/// Euclidean projection onto the permutahedron of `weights`.
///
/// Reduction: sort `y` descending, subtract the descending weights, fit the
/// difference by a nonincreasing isotonic regression, subtract the fit from
/// the sorted input, and undo the sort. The projection shares the ordering
/// of `y`, which is what makes the reduction valid.
pub fn proj_permutahedron(
    weights: &PermutahedronWeights,
    y: &[f64],
) -> Result<ProjectionReport> {
    require_finite(y)?;
    let n = weights.len();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: y.len(),
        });
    }
    let order = argsort_desc(y);
    let w_desc: Vec<f64> = weights.sorted().iter().rev().copied().collect();
    // d = sorted(y) - w_desc, fitted by a nonincreasing regression, which is
    // the negated nondecreasing fit of -d.
    let neg_d: Vec<f64> = order
        .iter()
        .zip(&w_desc)
        .map(|(&idx, &w)| -(y[idx] - w))
        .collect();
    let fit = pava_nondecreasing(&neg_d)?;
    let mut point = vec![0.0; n];
    for (rank, &idx) in order.iter().enumerate() {
        point[idx] = y[idx] + fit[rank]; // y - (-fit)
    }

    // Majorization residual of the output.
    let mut sorted_out: Vec<f64> = point.clone();
    sorted_out.sort_by(|a, b| b.total_cmp(a));
    let mut residual = 0.0f64;
    let mut px = 0.0;
    let mut pw = 0.0;
    for k in 0..n {
        px += sorted_out[k];
        pw += w_desc[k];
        if k + 1 < n {
            residual = residual.max(px - pw);
        } else {
            residual = residual.max((px - pw).abs());
        }
    }
    Ok(ProjectionReport::direct(
        Point::Vector(point),
        residual,
        "permutahedron-isotonic",
    ))
}

/// Euclidean projection onto the nuclear norm-ball. Inside the ball the
/// input is returned unchanged; otherwise the singular values are projected
/// onto the simplex and the matrix is rebuilt.
pub fn proj_nuclear(y: &Matrix) -> Result<ProjectionReport> {
    if !all_finite(y.data()) {
        return Err(Error::NonFinite("projection input"));
    }
    let svd = full_svd(y);
    let nuclear: f64 = svd.sigma.iter().sum();
    if nuclear <= 1.0 {
        return Ok(ProjectionReport::direct(
            Point::Matrix(y.clone()),
            0.0,
            "nuclear-svd-simplex",
        ));
    }
    let clipped = proj_simplex(&svd.sigma)?;
    let sigma_hat = clipped.point.vector().expect("vector projection");
    let point = svd.reconstruct_with(sigma_hat);
    let residual = (sigma_hat.iter().sum::<f64>() - 1.0).max(0.0);
    Ok(ProjectionReport::direct(
        Point::Matrix(point),
        residual,
        "nuclear-svd-simplex",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{dot, norm_l2, SeededRng};

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn simplex_examples() {
        let third = 1.0 / 3.0;
        let r = proj_simplex(&[third, third, third]).unwrap();
        assert_close(r.point.vector().unwrap(), &[third, third, third], 1e-15);

        let r = proj_simplex(&[1.0, 1.0]).unwrap();
        assert_close(r.point.vector().unwrap(), &[0.5, 0.5], 1e-15);

        let r = proj_simplex(&[2.0, 0.0, 0.0]).unwrap();
        assert_close(r.point.vector().unwrap(), &[1.0, 0.0, 0.0], 1e-15);
    }

    #[test]
    fn simplex_output_is_exactly_normalized() {
        let mut rng = SeededRng::new(1);
        for _ in 0..200 {
            let y = rng.normal_vec(9);
            let r = proj_simplex(&y).unwrap();
            let v = r.point.vector().unwrap();
            assert!((v.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            assert!(v.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn l1_examples() {
        let r = proj_l1(&[0.2, -0.3]).unwrap();
        assert_close(r.point.vector().unwrap(), &[0.2, -0.3], 0.0);

        let r = proj_l1(&[2.0, 0.0]).unwrap();
        assert_close(r.point.vector().unwrap(), &[1.0, 0.0], 1e-15);

        let r = proj_l1(&[1.0, -1.0]).unwrap();
        assert_close(r.point.vector().unwrap(), &[0.5, -0.5], 1e-15);
    }

    #[test]
    fn l2_examples() {
        let r = proj_l2(&[3.0, 4.0]).unwrap();
        assert_close(r.point.vector().unwrap(), &[0.6, 0.8], 1e-15);
        let r = proj_l2(&[0.1, 0.0]).unwrap();
        assert_close(r.point.vector().unwrap(), &[0.1, 0.0], 0.0);
        let r = proj_l2(&[0.0, 0.0]).unwrap();
        assert_close(r.point.vector().unwrap(), &[0.0, 0.0], 0.0);
    }

    #[test]
    fn linf_examples() {
        let r = proj_linf(&[2.0, -0.5]).unwrap();
        assert_close(r.point.vector().unwrap(), &[1.0, -0.5], 0.0);
        let r = proj_linf(&[-3.0, -3.0]).unwrap();
        assert_close(r.point.vector().unwrap(), &[-1.0, -1.0], 0.0);
        let r = proj_linf(&[0.0]).unwrap();
        assert_close(r.point.vector().unwrap(), &[0.0], 0.0);
    }

    #[test]
    fn pava_examples() {
        assert_eq!(
            pava_nondecreasing(&[1.0, 2.0, 3.0]).unwrap(),
            vec![1.0, 2.0, 3.0]
        );
        assert_eq!(pava_nondecreasing(&[2.0, 1.0]).unwrap(), vec![1.5, 1.5]);
        assert_eq!(
            pava_nondecreasing(&[3.0, 1.0, 2.0]).unwrap(),
            vec![2.0, 2.0, 2.0]
        );
    }

    #[test]
    fn pava_is_optimal_against_candidate_perturbations() {
        // First-order check of the quadratic program over the monotone cone:
        // the fit beats nearby monotone candidates.
        let mut rng = SeededRng::new(2);
        for _ in 0..50 {
            let a = rng.normal_vec(8);
            let fit = pava_nondecreasing(&a).unwrap();
            for w in fit.windows(2) {
                assert!(w[0] <= w[1] + 1e-12);
            }
            let base: f64 = fit.iter().zip(&a).map(|(f, v)| (f - v) * (f - v)).sum();
            for _ in 0..20 {
                let mut cand = rng.normal_vec(8);
                cand.sort_by(f64::total_cmp);
                let alt: f64 = cand.iter().zip(&a).map(|(f, v)| (f - v) * (f - v)).sum();
                assert!(base <= alt + 1e-12);
            }
        }
    }

    #[test]
    fn permutahedron_fixed_points() {
        let w = PermutahedronWeights::new(vec![1.0, 2.0, 3.0]).unwrap();
        for y in [[1.0, 2.0, 3.0], [3.0, 1.0, 2.0], [2.0, 3.0, 1.0]] {
            let r = proj_permutahedron(&w, &y).unwrap();
            assert_close(r.point.vector().unwrap(), &y, 1e-12);
        }
    }

    #[test]
    fn permutahedron_symmetric_example() {
        let w = PermutahedronWeights::new(vec![0.0, 1.0]).unwrap();
        let r = proj_permutahedron(&w, &[2.0, 2.0]).unwrap();
        assert_close(r.point.vector().unwrap(), &[0.5, 0.5], 1e-12);
    }

    #[test]
    fn permutahedron_spike_example() {
        let w = PermutahedronWeights::new(vec![1.0, 2.0, 3.0]).unwrap();
        let r = proj_permutahedron(&w, &[10.0, 0.0, 0.0]).unwrap();
        // Variational inequality against every vertex confirms optimality.
        let p = r.point.vector().unwrap();
        assert_close(p, &[3.0, 1.5, 1.5], 1e-10);
        assert!(r.residual <= 1e-10);
    }

    #[test]
    fn nuclear_examples() {
        // Inside the ball: unchanged.
        let y = Matrix::new(2, 2, vec![0.3, 0.0, 0.0, 0.2]).unwrap();
        let r = proj_nuclear(&y).unwrap();
        assert_eq!(r.point.matrix().unwrap(), &y);

        // diag(3, 1) projects to diag(1, 0).
        let y = Matrix::new(2, 2, vec![3.0, 0.0, 0.0, 1.0]).unwrap();
        let r = proj_nuclear(&y).unwrap();
        let p = r.point.matrix().unwrap();
        assert!((p.get(0, 0) - 1.0).abs() < 1e-10);
        for (i, j) in [(0, 1), (1, 0), (1, 1)] {
            assert!(p.get(i, j).abs() < 1e-10);
        }

        // A scaled rank-1 matrix shrinks to the unit rank-1 vertex.
        let u = [0.6, 0.8];
        let v = [0.0, 1.0];
        let c = 2.5;
        let mut y = Matrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                y.set(i, j, c * u[i] * v[j]);
            }
        }
        let r = proj_nuclear(&y).unwrap();
        let p = r.point.matrix().unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((p.get(i, j) - u[i] * v[j]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn nuclear_output_commutes_on_diagonal_case() {
        // For diagonal input the output shares singular vectors, so it
        // commutes with yᵀy.
        let y = Matrix::new(2, 2, vec![3.0, 0.0, 0.0, 1.0]).unwrap();
        let p = proj_nuclear(&y).unwrap();
        let p = p.point.matrix().unwrap().clone();
        let yty = Matrix::new(2, 2, vec![9.0, 0.0, 0.0, 1.0]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let left: f64 = (0..2).map(|k| p.get(i, k) * yty.get(k, j)).sum();
                let right: f64 = (0..2).map(|k| yty.get(i, k) * p.get(k, j)).sum();
                assert!((left - right).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn projections_are_idempotent_and_nonexpansive() {
        let mut rng = SeededRng::new(3);
        type Proj = fn(&[f64]) -> Result<ProjectionReport>;
        let ops: [(Proj, &str); 4] = [
            (proj_simplex as Proj, "simplex"),
            (proj_l1 as Proj, "l1"),
            (proj_l2 as Proj, "l2"),
            (proj_linf as Proj, "linf"),
        ];
        for (op, name) in ops {
            for _ in 0..100 {
                let y1 = rng.normal_vec(7);
                let y2 = rng.normal_vec(7);
                let p1 = op(&y1).unwrap().point;
                let p2 = op(&y2).unwrap().point;
                let again = op(p1.vector().unwrap()).unwrap().point;
                for (a, b) in again
                    .vector()
                    .unwrap()
                    .iter()
                    .zip(p1.vector().unwrap())
                {
                    assert!((a - b).abs() <= 1e-10, "{name} not idempotent");
                }
                let dist_in: f64 = norm_l2(
                    &y1.iter().zip(&y2).map(|(a, b)| a - b).collect::<Vec<_>>(),
                );
                let dist_out: f64 = norm_l2(
                    &p1.vector()
                        .unwrap()
                        .iter()
                        .zip(p2.vector().unwrap())
                        .map(|(a, b)| a - b)
                        .collect::<Vec<_>>(),
                );
                assert!(dist_out <= dist_in + 1e-10, "{name} expanded");
            }
        }
    }

    #[test]
    fn variational_inequality_on_simplex() {
        let mut rng = SeededRng::new(9);
        for _ in 0..100 {
            let y = rng.normal_vec(6);
            let p = proj_simplex(&y).unwrap().point;
            let p = p.vector().unwrap();
            // Random feasible point as a convex combination of vertices.
            let mut x = rng.normal_vec(6);
            let xsum: f64 = x.iter_mut().map(|v| {
                *v = v.abs();
                *v
            }).sum();
            for v in x.iter_mut() {
                *v /= xsum;
            }
            let lhs: f64 = (0..6).map(|i| (y[i] - p[i]) * (x[i] - p[i])).sum();
            assert!(lhs <= 1e-8);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn pava_output_is_monotone_and_mean_preserving(
                seed in 0u64..500,
                n in 1usize..30,
            ) {
                let a = SeededRng::new(seed).normal_vec(n);
                let fit = pava_nondecreasing(&a).unwrap();
                for w in fit.windows(2) {
                    prop_assert!(w[0] <= w[1] + 1e-12);
                }
                let sa: f64 = a.iter().sum();
                let sf: f64 = fit.iter().sum();
                prop_assert!((sa - sf).abs() <= 1e-9 * sa.abs().max(1.0));
            }

            #[test]
            fn permutahedron_projection_is_feasible_and_idempotent(
                seed in 0u64..300,
                n in 2usize..7,
            ) {
                let mut rng = SeededRng::new(seed);
                let w = PermutahedronWeights::new(rng.normal_vec(n)).unwrap();
                let y = rng.normal_vec(n).iter().map(|v| v * 3.0).collect::<Vec<_>>();
                let r = proj_permutahedron(&w, &y).unwrap();
                prop_assert!(r.residual <= 1e-8);
                let again = proj_permutahedron(&w, r.point.vector().unwrap()).unwrap();
                for (a, b) in again.point.vector().unwrap().iter().zip(r.point.vector().unwrap()) {
                    prop_assert!((a - b).abs() <= 1e-10);
                }
                // Variational inequality against every vertex of the hull.
                let p = r.point.vector().unwrap();
                let g: Vec<f64> = y.iter().zip(p).map(|(a, b)| a - b).collect();
                let verts = crate::oracle::vertices(
                    &crate::sets::SetSpec::Permutahedron(w.clone()),
                ).unwrap();
                for v in verts {
                    let vs = v.as_slice();
                    let inner = dot(&g, &vs.iter().zip(p).map(|(a, b)| a - b).collect::<Vec<_>>());
                    prop_assert!(inner <= 1e-8, "VI violated: {inner}");
                }
            }
        }
    }
}
