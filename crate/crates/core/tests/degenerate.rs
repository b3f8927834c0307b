use freeboundary::degenerate::*;
use freeboundary::exact::{weiss_profile, Field, HalfSpaceSolution, ModelConstants, QuadratureSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn square(k: usize) -> TensorGrid {
    TensorGrid::new(vec![Axis::uniform(-1.0, 1.0, k); 2]).unwrap()
}

fn direct_halfspace(k: usize) -> (HalfSpaceSolution, DirectSolution) {
    let c = ModelConstants::new(0.5, 2, 1).unwrap();
    let exact = HalfSpaceSolution::standard(c);
    let d = solve_direct_nonlinear(&c, square(k), |x| exact.value(x), &DirectOptions::default()).unwrap();
    (exact, d)
}

#[test]
fn direct_solver_recovers_halfspace() {
    let mut errs = Vec::new();
    for k in [17, 33, 65] {
        let (exact, d) = direct_halfspace(k);
        let h = d.u.grid.axes[0].spacing();
        let err = (0..d.u.grid.len())
            .map(|i| (d.u.values[i] - exact.value(&d.u.grid.point(&d.u.grid.unflat(i)))[0]).abs())
            .fold(0.0, f64::max);
        assert!(err <= 5.0 * h * h + 5.0 * d.delta.sqrt(), "k = {k}: {err:e}");
        errs.push(err);
    }
    assert!(errs[2] < errs[0]);
}

#[test]
fn direct_solution_sign_structure() {
    let (_, d) = direct_halfspace(33);
    for (i, v) in d.u.values.iter().enumerate() {
        assert!(*v >= -d.delta, "negative value {v} at {:?}", d.u.grid.point(&d.u.grid.unflat(i)));
    }
}

#[test]
fn weiss_monotone_on_direct_solution() {
    let (_, d) = direct_halfspace(33);
    let c = ModelConstants::new(0.5, 2, 1).unwrap();
    let spec = QuadratureSpec { radial_points: 8, angular_points: 8, depth: 3 };
    let radii = [0.2, 0.3, 0.4, 0.5, 0.6];
    let w = weiss_profile(&d.u, &c, &[0.0, 0.0], &radii, &spec).unwrap();
    for p in w.windows(2) {
        assert!(p[1].1 >= p[0].1 - 1e-3, "{w:?}");
    }
}

#[test]
fn weighted_norm_bounded_by_source() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let gamma = 2.0;
    let grid = TensorGrid::new(vec![Axis::uniform(-0.5, 0.5, 17), Axis::graded(0.0, 1.0, 17)]).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let c: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = GridField::from_fn(grid.clone(), 1, |x| vec![c[0] + c[1] * x[0] + c[2] * x[1] + c[3] * x[0] * x[1]]);
        let u = solve_deg_linear_nd(gamma, &f, |_| 0.0).unwrap();
        let lhs = estimate_wkp_norm(&u.u, 2.0).unwrap();
        worst = worst.max(lhs / lp_norm(&f, 2.0));
    }
    println!("max ratio {worst}");
    assert!(worst.is_finite() && worst < 10.0);
}
