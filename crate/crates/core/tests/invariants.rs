//! Cross-module invariants: oracle feasibility and scale invariance across
//! every set family, solver trajectories staying inside their certified
//! halfspaces, and direct projections always landing on their sets.

use oraclebench_core::combinatorial::Dag;
use oraclebench_core::frankwolfe::{default_start, fw_minimize, FwConfig, StepRule};
use oraclebench_core::lmo::{lmo, lmo_l2, lmo_lp, lmo_nuclear};
use oraclebench_core::numerics::{dot, norm_l2, Matrix, Point, SeededRng};
use oraclebench_core::proj_direct::{
    proj_l1, proj_l2, proj_linf, proj_nuclear, proj_permutahedron, proj_simplex,
};
use oraclebench_core::proj_iterative::{
    haugazeau_double_halfspace, haugazeau_step_target, project_birkhoff, project_lp_ball,
    DouglasRachfordConfig, HaugazeauConfig, LpBallLevelSet,
};
use oraclebench_core::sets::{FeasibilityTolerance, PermutahedronWeights, PointShape, SetSpec};
use oraclebench_core::SetSpec as Spec;

fn all_specs() -> Vec<SetSpec> {
    let dag = Dag::topo_sort(5, &[(0, 1), (0, 2), (1, 3), (2, 3), (1, 2), (3, 4)]).unwrap();
    vec![
        Spec::Simplex { n: 6 },
        Spec::L1Ball { n: 6 },
        Spec::L2Ball { n: 6 },
        Spec::LInfBall { n: 6 },
        Spec::lp_ball(6, 1.5).unwrap(),
        Spec::lp_ball(6, 4.0).unwrap(),
        Spec::NuclearBall { rows: 4, cols: 3 },
        Spec::FlowPolytope(dag),
        Spec::Birkhoff { n: 3 },
        Spec::permutahedron(vec![-2.0, 0.0, 0.5, 1.0, 1.0, 3.0]).unwrap(),
    ]
}

fn random_direction(rng: &mut SeededRng, spec: &SetSpec) -> Point {
    match spec.point_shape() {
        PointShape::Vector(n) => Point::Vector(rng.normal_vec(n)),
        PointShape::Matrix(m, n) => Point::Matrix(Matrix::new(m, n, rng.normal_vec(m * n)).unwrap()),
    }
}

#[test]
fn lmo_feasibility_across_all_sets() {
    let mut rng = SeededRng::new(2024);
    let tol = FeasibilityTolerance::default();
    for spec in all_specs() {
        for _ in 0..40 {
            let dir = random_direction(&mut rng, &spec);
            let r = lmo(&spec, &dir).unwrap();
            assert!(
                spec.contains(&r.point, tol).unwrap(),
                "{} produced an infeasible oracle point",
                spec.name()
            );
            if r.is_vertex {
                // Vertices are feasible at the strictest tolerance too.
                assert!(spec
                    .contains(&r.point, FeasibilityTolerance::new(1e-9).unwrap())
                    .unwrap());
            }
        }
    }
}

#[test]
fn lmo_scale_invariance_across_all_sets() {
    let mut rng = SeededRng::new(55);
    for spec in all_specs() {
        for _ in 0..10 {
            let dir = random_direction(&mut rng, &spec);
            let base = lmo(&spec, &dir).unwrap();
            for c in [0.25, 2.0, 640.0] {
                let scaled = match &dir {
                    Point::Vector(v) => Point::Vector(v.iter().map(|x| x * c).collect()),
                    Point::Matrix(m) => Point::Matrix(
                        Matrix::new(m.rows(), m.cols(), m.data().iter().map(|x| x * c).collect())
                            .unwrap(),
                    ),
                };
                let r = lmo(&spec, &scaled).unwrap();
                match spec {
                    // Vertex-valued oracles are bitwise scale invariant.
                    Spec::Simplex { .. }
                    | Spec::L1Ball { .. }
                    | Spec::LInfBall { .. }
                    | Spec::FlowPolytope(_)
                    | Spec::Birkhoff { .. }
                    | Spec::Permutahedron(_) => {
                        assert_eq!(r.point, base.point, "{} at c={c}", spec.name())
                    }
                    // Smooth oracles agree up to rounding.
                    _ => {
                        for (a, b) in r.point.as_slice().iter().zip(base.point.as_slice()) {
                            assert!((a - b).abs() <= 1e-9, "{} at c={c}", spec.name());
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn lmo_objective_never_above_feasible_samples() {
    // The oracle value is a lower bound on <x, y> over feasible x; check
    // against random convex combinations of oracle outputs.
    let mut rng = SeededRng::new(321);
    for spec in all_specs() {
        let dir = random_direction(&mut rng, &spec);
        let r = lmo(&spec, &dir).unwrap();
        for _ in 0..10 {
            let other = lmo(&spec, &random_direction(&mut rng, &spec)).unwrap();
            let lambda = rng.uniform();
            let mix: Vec<f64> = r
                .point
                .as_slice()
                .iter()
                .zip(other.point.as_slice())
                .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
                .collect();
            let value = dot(&mix, dir.as_slice());
            assert!(r.objective <= value + 1e-9, "{}", spec.name());
        }
    }
}

#[test]
fn direct_projections_land_on_their_sets() {
    let mut rng = SeededRng::new(77);
    let tol = FeasibilityTolerance::new(1e-8).unwrap();
    for _ in 0..50 {
        let y: Vec<f64> = rng.normal_vec(7).iter().map(|v| v * 3.0).collect();
        let cases: Vec<(SetSpec, Point)> = vec![
            (Spec::Simplex { n: 7 }, proj_simplex(&y).unwrap().point),
            (Spec::L1Ball { n: 7 }, proj_l1(&y).unwrap().point),
            (Spec::L2Ball { n: 7 }, proj_l2(&y).unwrap().point),
            (Spec::LInfBall { n: 7 }, proj_linf(&y).unwrap().point),
        ];
        for (spec, point) in cases {
            assert!(spec.contains(&point, tol).unwrap(), "{}", spec.name());
        }

        let w = PermutahedronWeights::new(rng.normal_vec(7)).unwrap();
        let p = proj_permutahedron(&w, &y).unwrap();
        let spec = Spec::Permutahedron(w);
        assert!(spec.contains(&p.point, tol).unwrap());

        let m = Matrix::new(3, 4, rng.normal_vec(12)).unwrap();
        let p = proj_nuclear(&m).unwrap();
        let spec = Spec::NuclearBall { rows: 3, cols: 4 };
        assert!(spec.contains(&p.point, tol).unwrap());
    }
}

#[test]
fn haugazeau_trajectory_iterates_lie_in_both_halfspaces() {
    let mut rng = SeededRng::new(11);
    for p in [1.5, 3.0] {
        let y: Vec<f64> = rng.normal_vec(10).iter().map(|v| v * 2.0).collect();
        let set = LpBallLevelSet::new(10, p).unwrap();
        let cfg = HaugazeauConfig {
            tol: 1e-8,
            record_iterates: true,
            ..Default::default()
        };
        let run = project_lp_ball(&y, p, &cfg).unwrap();
        let iterates = run.iterates.unwrap();
        for t in 0..iterates.len() - 1 {
            let x = &iterates[t];
            let z = haugazeau_step_target(&set, x).unwrap();
            let next = haugazeau_double_halfspace(&y, x, &z).unwrap();
            // The recorded successor is the closed-form projection, and it
            // lies in both halfspaces.
            for (a, b) in next.iter().zip(&iterates[t + 1]) {
                assert_eq!(a, b);
            }
            let h1: f64 = (0..10).map(|i| (next[i] - x[i]) * (y[i] - x[i])).sum();
            let h2: f64 = (0..10).map(|i| (next[i] - z[i]) * (x[i] - z[i])).sum();
            assert!(h1 <= 1e-9);
            assert!(h2 <= 1e-9);
        }
    }
}

#[test]
fn lp_oracle_and_projection_consistency_via_support() {
    // For a boundary point x* of the lp-ball, the oracle at the outward
    // normal direction returns -x* (support-function duality).
    let mut rng = SeededRng::new(99);
    let p = 3.0;
    let y: Vec<f64> = rng.normal_vec(6).iter().map(|v| v * 2.0).collect();
    let run = project_lp_ball(&y, p, &HaugazeauConfig::default()).unwrap();
    let x = &run.point;
    // Outward normal at x is the level-set gradient.
    let set = LpBallLevelSet::new(6, p).unwrap();
    let grad = {
        use oraclebench_core::proj_iterative::LevelSet;
        set.grad(x)
    };
    let r = lmo_lp(&grad, p).unwrap();
    for (a, b) in r.point.vector().unwrap().iter().zip(x) {
        assert!((a + b).abs() <= 1e-6, "support duality violated");
    }
}

#[test]
fn birkhoff_dr_point_matches_frank_wolfe() {
    let mut rng = SeededRng::new(5);
    let y = Matrix::new(3, 3, rng.normal_vec(9)).unwrap();
    let dr = project_birkhoff(
        &y,
        &DouglasRachfordConfig {
            tol: 1e-9,
            max_iter: 400_000,
            record_average_trace: false,
        },
    )
    .unwrap();
    let spec = Spec::Birkhoff { n: 3 };
    let target = Point::Matrix(y);
    let (f, g) = oraclebench_core::frankwolfe::quadratic_objective(&target);
    let trace = fw_minimize(
        &f,
        &g,
        &spec,
        default_start(&spec).unwrap(),
        &FwConfig {
            step_rule: StepRule::QuadraticLineSearch,
            max_iter: 200_000,
            gap_tol: 1e-10,
        },
    )
    .unwrap();
    let d: Vec<f64> = trace
        .point
        .as_slice()
        .iter()
        .zip(dr.point.data())
        .map(|(a, b)| a - b)
        .collect();
    assert!(norm_l2(&d) <= 1e-3, "cross-method disagreement {}", norm_l2(&d));
}

#[test]
fn fw_runs_over_flow_and_nuclear_sets() {
    let mut rng = SeededRng::new(17);
    let tol = FeasibilityTolerance::new(1e-8).unwrap();

    let dag = Dag::topo_sort(4, &[(0, 1), (1, 3), (0, 2), (2, 3), (1, 2)]).unwrap();
    let spec = Spec::FlowPolytope(dag);
    let target = Point::Vector(rng.normal_vec(5));
    let (f, g) = oraclebench_core::frankwolfe::quadratic_objective(&target);
    let trace = fw_minimize(
        &f,
        &g,
        &spec,
        default_start(&spec).unwrap(),
        &FwConfig {
            step_rule: StepRule::QuadraticLineSearch,
            max_iter: 500,
            gap_tol: 1e-9,
        },
    )
    .unwrap();
    assert!(spec.contains(&trace.point, tol).unwrap());
    assert!(trace.objectives.windows(2).all(|w| w[1] <= w[0] + 1e-12));

    let spec = Spec::NuclearBall { rows: 3, cols: 3 };
    let target = Point::Matrix(Matrix::new(3, 3, rng.normal_vec(9)).unwrap());
    let (f, g) = oraclebench_core::frankwolfe::quadratic_objective(&target);
    let trace = fw_minimize(
        &f,
        &g,
        &spec,
        default_start(&spec).unwrap(),
        &FwConfig {
            step_rule: StepRule::QuadraticLineSearch,
            max_iter: 500,
            gap_tol: 1e-9,
        },
    )
    .unwrap();
    assert!(spec.contains(&trace.point, tol).unwrap());
}

#[test]
fn l2_and_lp_oracles_match_support_values() {
    let mut rng = SeededRng::new(400);
    for _ in 0..20 {
        let y = rng.normal_vec(9);
        let l2 = lmo_l2(&y).unwrap();
        assert!((l2.objective + norm_l2(&y)).abs() <= 1e-12);
        for p in [1.5, 2.5, 6.0] {
            let q = p / (p - 1.0);
            let lp = lmo_lp(&y, p).unwrap();
            let qnorm = oraclebench_core::numerics::norm_p(&y, q).unwrap();
            assert!((lp.objective + qnorm).abs() <= 1e-9 * qnorm.max(1.0), "p={p}");
        }
    }
}

#[test]
fn nuclear_oracle_objective_dominated_by_projection_distance_route() {
    // Two independent routes to the top singular value agree: the oracle
    // objective equals -sigma1(-Y) and sigma1 is also the largest scaled
    // Rayleigh quotient over random probes.
    let mut rng = SeededRng::new(41);
    let y = Matrix::new(6, 5, rng.normal_vec(30)).unwrap();
    let r = lmo_nuclear(&y, 1e-10).unwrap();
    let mut best = 0.0f64;
    for _ in 0..2000 {
        let mut u = rng.normal_vec(6);
        let mut v = rng.normal_vec(5);
        let (nu, nv) = (norm_l2(&u), norm_l2(&v));
        u.iter_mut().for_each(|x| *x /= nu);
        v.iter_mut().for_each(|x| *x /= nv);
        let val: f64 = (0..6)
            .map(|i| -u[i] * (0..5).map(|j| y.get(i, j) * v[j]).sum::<f64>())
            .sum();
        best = best.max(val);
    }
    assert!(-r.objective >= best - 1e-9);
}
