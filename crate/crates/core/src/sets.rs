//! Set descriptors and membership testing: the shared vocabulary between the
//! oracles, the projections, the Frank-Wolfe driver, and the CLI.

use alloc::vec;
use alloc::vec::Vec;

use crate::combinatorial::Dag;
use crate::error::{Error, Result};
use crate::numerics::{all_finite, norm_p, Point};
use crate::svd::full_svd;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float as _;

/// Default additive feasibility tolerance.
pub const DEFAULT_FEASIBILITY_EPS: f64 = 1e-9;

/// Additive per-constraint feasibility tolerance; all sets here are O(1)
/// scaled so a single knob suffices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityTolerance {
    eps: f64,
}

impl FeasibilityTolerance {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidParameter(
                "feasibility tolerance must be finite and positive",
            ));
        }
        Ok(Self { eps })
    }

    pub fn eps(self) -> f64 {
        self.eps
    }
}

impl Default for FeasibilityTolerance {
    fn default() -> Self {
        Self {
            eps: DEFAULT_FEASIBILITY_EPS,
        }
    }
}

/// Permutahedron weights, stored sorted ascending; the original order is
/// retained for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutahedronWeights {
    sorted: Vec<f64>,
    original: Vec<f64>,
}

impl PermutahedronWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("weights must be nonempty"));
        }
        if !all_finite(&weights) {
            return Err(Error::NonFinite("permutahedron weights"));
        }
        let mut sorted = weights.clone();
        sorted.sort_by(f64::total_cmp);
        Ok(Self {
            sorted,
            original: weights,
        })
    }

    /// Weights sorted ascending.
    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Weights in the order they were supplied.
    pub fn original(&self) -> &[f64] {
        &self.original
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }
}

/// Shape of the points a set lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointShape {
    Vector(usize),
    Matrix(usize, usize),
}

impl PointShape {
    pub fn flat_len(self) -> usize {
        match self {
            PointShape::Vector(n) => n,
            PointShape::Matrix(m, n) => m * n,
        }
    }
}

/// Descriptor of a feasible set, carrying its parameters.
#[derive(Debug, Clone)]
pub enum SetSpec {
    /// Nonnegative vectors summing to one.
    Simplex { n: usize },
    /// Unit ℓ1-ball.
    L1Ball { n: usize },
    /// Unit ℓ2-ball.
    L2Ball { n: usize },
    /// Unit ℓ∞-ball.
    LInfBall { n: usize },
    /// Unit ℓp-ball for an exponent strictly between 1 and ∞.
    LpBall { n: usize, p: f64 },
    /// Matrices whose singular values sum to at most one.
    NuclearBall { rows: usize, cols: usize },
    /// Unit source-to-sink flows on a DAG; coordinates are edge flows.
    FlowPolytope(Dag),
    /// Doubly stochastic n x n matrices.
    Birkhoff { n: usize },
    /// Convex hull of all coordinate permutations of a weight vector.
    Permutahedron(PermutahedronWeights),
}

impl SetSpec {
    /// Validated ℓp-ball; `p` must lie strictly between 1 and ∞
    /// (`p ∈ {1, 2, ∞}` have their own variants, though `p = 2` is accepted
    /// here as well for cross-checks).
    pub fn lp_ball(n: usize, p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidParameter("lp-ball exponent must satisfy 1 < p < inf"));
        }
        Ok(SetSpec::LpBall { n, p })
    }

    pub fn permutahedron(weights: Vec<f64>) -> Result<Self> {
        Ok(SetSpec::Permutahedron(PermutahedronWeights::new(weights)?))
    }

    /// Canonical CLI name of the set family.
    pub fn name(&self) -> &'static str {
        match self {
            SetSpec::Simplex { .. } => "simplex",
            SetSpec::L1Ball { .. } => "l1",
            SetSpec::L2Ball { .. } => "l2",
            SetSpec::LInfBall { .. } => "linf",
            SetSpec::LpBall { .. } => "lp",
            SetSpec::NuclearBall { .. } => "nuclear",
            SetSpec::FlowPolytope(_) => "flow",
            SetSpec::Birkhoff { .. } => "birkhoff",
            SetSpec::Permutahedron(_) => "permutahedron",
        }
    }

    pub fn point_shape(&self) -> PointShape {
        match self {
            SetSpec::Simplex { n }
            | SetSpec::L1Ball { n }
            | SetSpec::L2Ball { n }
            | SetSpec::LInfBall { n }
            | SetSpec::LpBall { n, .. } => PointShape::Vector(*n),
            SetSpec::NuclearBall { rows, cols } => PointShape::Matrix(*rows, *cols),
            SetSpec::FlowPolytope(dag) => PointShape::Vector(dag.edge_count()),
            SetSpec::Birkhoff { n } => PointShape::Matrix(*n, *n),
            SetSpec::Permutahedron(w) => PointShape::Vector(w.len()),
        }
    }

    /// Checks that `point` has the shape this set demands.
    pub fn check_shape(&self, point: &Point) -> Result<()> {
        let ok = match (self.point_shape(), point) {
            (PointShape::Vector(n), Point::Vector(v)) => v.len() == n,
            (PointShape::Matrix(m, n), Point::Matrix(x)) => x.rows() == m && x.cols() == n,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.point_shape().flat_len(),
                found: point.len(),
            })
        }
    }

    /// Largest additive violation of the set's defining constraints at
    /// `point`; zero (up to rounding) exactly on the set.
    pub fn membership_violation(&self, point: &Point) -> Result<f64> {
        self.check_shape(point)?;
        let x = point.as_slice();
        if !all_finite(x) {
            return Err(Error::NonFinite("membership point"));
        }
        let violation = match self {
            SetSpec::Simplex { .. } => {
                let neg = x.iter().fold(0.0f64, |a, &v| a.max(-v));
                let sum: f64 = x.iter().sum();
                neg.max((sum - 1.0).abs())
            }
            SetSpec::L1Ball { .. } => (norm_p(x, 1.0)? - 1.0).max(0.0),
            SetSpec::L2Ball { .. } => (norm_p(x, 2.0)? - 1.0).max(0.0),
            SetSpec::LInfBall { .. } => (norm_p(x, f64::INFINITY)? - 1.0).max(0.0),
            SetSpec::LpBall { p, .. } => (norm_p(x, *p)? - 1.0).max(0.0),
            SetSpec::NuclearBall { .. } => {
                let m = point.matrix().expect("shape checked");
                let nuc: f64 = full_svd(m).sigma.iter().sum();
                (nuc - 1.0).max(0.0)
            }
            SetSpec::FlowPolytope(dag) => {
                let neg = x.iter().fold(0.0f64, |a, &v| a.max(-v));
                let mut net = vec![0.0f64; dag.vertex_count()];
                for (e, &(t, h)) in dag.edges().iter().enumerate() {
                    net[t] -= x[e];
                    net[h] += x[e];
                }
                let mut worst = neg;
                for (v, &flow) in net.iter().enumerate() {
                    let want = if v == dag.source() {
                        -1.0
                    } else if v == dag.sink() {
                        1.0
                    } else {
                        0.0
                    };
                    worst = worst.max((flow - want).abs());
                }
                worst
            }
            SetSpec::Birkhoff { n } => {
                let m = point.matrix().expect("shape checked");
                let mut worst = x.iter().fold(0.0f64, |a, &v| a.max(-v));
                for i in 0..*n {
                    let row_sum: f64 = m.row(i).iter().sum();
                    worst = worst.max((row_sum - 1.0).abs());
                }
                for j in 0..*n {
                    let col_sum: f64 = (0..*n).map(|i| m.get(i, j)).sum();
                    worst = worst.max((col_sum - 1.0).abs());
                }
                worst
            }
            SetSpec::Permutahedron(w) => {
                // Majorization test: every partial sum of the k largest
                // entries of x is at most the corresponding partial sum of
                // the weights, and the total sums agree.
                let n = w.len();
                let mut xs: Vec<f64> = x.to_vec();
                xs.sort_by(|a, b| b.total_cmp(a));
                let mut worst = 0.0f64;
                let mut px = 0.0;
                let mut pw = 0.0;
                for k in 0..n {
                    px += xs[k];
                    pw += w.sorted()[n - 1 - k];
                    if k + 1 < n {
                        worst = worst.max(px - pw);
                    } else {
                        worst = worst.max((px - pw).abs());
                    }
                }
                worst
            }
        };
        Ok(violation)
    }

    /// Membership within the additive tolerance.
    pub fn contains(&self, point: &Point, tol: FeasibilityTolerance) -> Result<bool> {
        Ok(self.membership_violation(point)? <= tol.eps())
    }
}
