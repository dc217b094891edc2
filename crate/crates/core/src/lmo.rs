//! Linear minimization oracles: `argmin ⟨x, y⟩` over each supported set.
//!
//! Every oracle resolves argmin/argmax ties toward the smallest index and
//! maps a zero direction to a fixed feasible point, so outputs are
//! deterministic.

use alloc::vec;
use alloc::vec::Vec;

use crate::combinatorial::{dag_shortest_path, hungarian, Dag};
use crate::error::{Error, Result};
use crate::numerics::{all_finite, argsort_desc, dot, norm_l2, norm_linf, sign, Matrix, Point};
use crate::sets::{PermutahedronWeights, SetSpec};
use crate::svd::top_singular_pair;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float as _;

/// Default relative tolerance for the iterative nuclear-norm oracle.
pub const DEFAULT_NUCLEAR_LMO_TOL: f64 = 1e-9;

/// Iteration cap of the power iteration behind [`lmo_nuclear`].
pub const NUCLEAR_LMO_MAX_ITER: usize = 20_000;

/// Fixed seed of the power-iteration start behind [`lmo_nuclear`].
pub const NUCLEAR_LMO_SEED: u64 = 0x5eed_1a0;

/// Result of a linear minimization: the minimizing point, its objective
/// `⟨point, y⟩`, and whether the point is a vertex of the set.
#[derive(Debug, Clone)]
pub struct LmoResult {
    pub point: Point,
    pub objective: f64,
    pub is_vertex: bool,
}

fn vector_result(point: Vec<f64>, y: &[f64], is_vertex: bool) -> LmoResult {
    let objective = dot(&point, y);
    LmoResult {
        point: Point::Vector(point),
        objective,
        is_vertex,
    }
}

fn require_finite(y: &[f64]) -> Result<()> {
    if all_finite(y) {
        Ok(())
    } else {
        Err(Error::NonFinite("lmo direction"))
    }
}

/// Smallest index of the minimum entry.
fn argmin(y: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in y.iter().enumerate().skip(1) {
        if v < y[best] {
            best = i;
        }
    }
    best
}

/// `argmin over the simplex = e_i` at the smallest minimizing index.
pub fn lmo_simplex(y: &[f64]) -> Result<LmoResult> {
    require_finite(y)?;
    if y.is_empty() {
        return Err(Error::InvalidParameter("direction must be nonempty"));
    }
    let i = argmin(y);
    let mut point = vec![0.0; y.len()];
    point[i] = 1.0;
    Ok(vector_result(point, y, true))
}

/// `argmin over the ℓ1-ball = -sign(y_imax) e_imax`; a zero direction maps
/// to `e_1`, which is optimal like every other point.
pub fn lmo_l1(y: &[f64]) -> Result<LmoResult> {
    require_finite(y)?;
    if y.is_empty() {
        return Err(Error::InvalidParameter("direction must be nonempty"));
    }
    let mut i_max = 0;
    for (i, v) in y.iter().enumerate().skip(1) {
        if v.abs() > y[i_max].abs() {
            i_max = i;
        }
    }
    let mut point = vec![0.0; y.len()];
    point[i_max] = if y[i_max] > 0.0 { -1.0 } else { 1.0 };
    Ok(vector_result(point, y, true))
}

/// `argmin over the ℓ2-ball = -y/‖y‖₂`; zero maps to the origin.
pub fn lmo_l2(y: &[f64]) -> Result<LmoResult> {
    require_finite(y)?;
    let norm = norm_l2(y);
    if norm == 0.0 {
        return Ok(vector_result(vec![0.0; y.len()], y, false));
    }
    let point: Vec<f64> = y.iter().map(|v| -v / norm).collect();
    Ok(vector_result(point, y, true))
}

/// `argmin over the ℓ∞-ball = -sign(y)` entrywise. Zero entries stay zero,
/// which is still a minimizer but not a vertex; the flag reports that.
pub fn lmo_linf(y: &[f64]) -> Result<LmoResult> {
    require_finite(y)?;
    let point: Vec<f64> = y.iter().map(|&v| -sign(v)).collect();
    let is_vertex = !y.is_empty() && y.iter().all(|&v| v != 0.0);
    Ok(vector_result(point, y, is_vertex))
}

/// `argmin over the ℓp-ball = -sign(y)|y|^{q-1}/‖y‖_q^{q-1}` with
/// `q = p/(p-1)`, evaluated on `y/‖y‖∞` since the argmin is scale
/// invariant; this keeps the powers from overflowing for p close to 1.
pub fn lmo_lp(y: &[f64], p: f64) -> Result<LmoResult> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidParameter("lp exponent must satisfy 1 < p < inf"));
    }
    require_finite(y)?;
    let scale = norm_linf(y);
    if scale == 0.0 {
        return Ok(vector_result(vec![0.0; y.len()], y, false));
    }
    let q = p / (p - 1.0);
    // ‖ỹ‖_q^{q-1} = (Σ|ỹ|^q)^{1/p} because (q-1)/q = 1/p.
    let total: f64 = y.iter().map(|v| (v.abs() / scale).powf(q)).sum();
    let denom = total.powf(1.0 / p);
    let point: Vec<f64> = y
        .iter()
        .map(|&v| -sign(v) * (v.abs() / scale).powf(q - 1.0) / denom)
        .collect();
    Ok(vector_result(point, y, true))
}

/// Rank-one minimizer `u vᵀ` over the nuclear norm-ball, from the top
/// singular pair of `-y`. A zero matrix maps to the vertex `e₁ e₁ᵀ`.
pub fn lmo_nuclear(y: &Matrix, tol: f64) -> Result<LmoResult> {
    if !all_finite(y.data()) {
        return Err(Error::NonFinite("lmo direction"));
    }
    let (m, n) = (y.rows(), y.cols());
    if y.data().iter().all(|&v| v == 0.0) {
        let mut point = Matrix::zeros(m, n);
        point.set(0, 0, 1.0);
        let objective = 0.0;
        return Ok(LmoResult {
            point: Point::Matrix(point),
            objective,
            is_vertex: true,
        });
    }
    let neg = Matrix::new(m, n, y.data().iter().map(|v| -v).collect())?;
    let pair = top_singular_pair(&neg, tol, NUCLEAR_LMO_MAX_ITER, NUCLEAR_LMO_SEED)?;
    let mut point = Matrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            point.set(i, j, pair.u[i] * pair.v[j]);
        }
    }
    let objective = dot(point.data(), y.data());
    Ok(LmoResult {
        point: Point::Matrix(point),
        objective,
        is_vertex: true,
    })
}

/// Minimizer over the flow polytope: the indicator of a shortest
/// source-to-sink path under edge weights `y`.
pub fn lmo_flow(dag: &Dag, y: &[f64]) -> Result<LmoResult> {
    let flow = dag_shortest_path(dag, y)?;
    Ok(vector_result(flow, y, true))
}

/// Minimizing permutation matrix over the Birkhoff polytope, by solving the
/// assignment problem on `y`.
pub fn lmo_birkhoff(y: &Matrix) -> Result<LmoResult> {
    let assignment = hungarian(y)?;
    let n = y.rows();
    let mut point = Matrix::zeros(n, n);
    for (i, &j) in assignment.perm.iter().enumerate() {
        point.set(i, j, 1.0);
    }
    let objective = dot(point.data(), y.data());
    Ok(LmoResult {
        point: Point::Matrix(point),
        objective,
        is_vertex: true,
    })
}

/// Minimizer over the permutahedron: the largest entry of `y` receives the
/// smallest weight.
pub fn lmo_permutahedron(weights: &PermutahedronWeights, y: &[f64]) -> Result<LmoResult> {
    require_finite(y)?;
    if y.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            found: y.len(),
        });
    }
    let order = argsort_desc(y);
    let mut point = vec![0.0; y.len()];
    for (rank, &idx) in order.iter().enumerate() {
        point[idx] = weights.sorted()[rank];
    }
    Ok(vector_result(point, y, true))
}

/// Dispatches to the oracle for `spec`, checking the direction's shape.
pub fn lmo(spec: &SetSpec, direction: &Point) -> Result<LmoResult> {
    spec.check_shape(direction)?;
    match (spec, direction) {
        (SetSpec::Simplex { .. }, Point::Vector(y)) => lmo_simplex(y),
        (SetSpec::L1Ball { .. }, Point::Vector(y)) => lmo_l1(y),
        (SetSpec::L2Ball { .. }, Point::Vector(y)) => lmo_l2(y),
        (SetSpec::LInfBall { .. }, Point::Vector(y)) => lmo_linf(y),
        (SetSpec::LpBall { p, .. }, Point::Vector(y)) => lmo_lp(y, *p),
        (SetSpec::NuclearBall { .. }, Point::Matrix(y)) => {
            lmo_nuclear(y, DEFAULT_NUCLEAR_LMO_TOL)
        }
        (SetSpec::FlowPolytope(dag), Point::Vector(y)) => lmo_flow(dag, y),
        (SetSpec::Birkhoff { .. }, Point::Matrix(y)) => lmo_birkhoff(y),
        (SetSpec::Permutahedron(w), Point::Vector(y)) => lmo_permutahedron(w, y),
        _ => unreachable!("shape checked above"),
    }
}
