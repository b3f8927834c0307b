use freeboundary::ck::{ck_expand, instantiate_model, rescale_data, CauchyData};
use freeboundary::degenerate::{extract_free_boundary, regularized_source, solve_ode_1d, Axis, GridField, TensorGrid};
use freeboundary::exact::{pde_residual, Field, FieldJet, HalfSpaceSolution, ModelConstants};
use freeboundary::harness::{diffeo_map, DataTerm, ScenarioConfig};
use freeboundary::hodograph::{coefficients_at, inverse_reconstruct, rescale_series, LegendreState};
use freeboundary::series::text::{parse_series, write_series};
use freeboundary::series::{MultiIndex, Rational, Scalar, TruncatedSeries};
use proptest::prelude::*;

const N: usize = 2;
const S: usize = 4;

fn small_ratio() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=7).prop_map(|(a, b)| Rational::from_ratio(a, b))
}

fn series() -> impl Strategy<Value = TruncatedSeries<Rational>> {
    let len = MultiIndex::enumerate(N, S).len();
    prop::collection::vec(small_ratio(), len).prop_map(|c| {
        TruncatedSeries::from_derivatives(N, S, MultiIndex::enumerate(N, S).into_iter().zip(c))
    })
}

fn pure(s: TruncatedSeries<Rational>) -> TruncatedSeries<Rational> {
    s.add_constant(-s.constant_term())
}

fn unit_vec(v: Vec<f64>) -> Option<Vec<f64>> {
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (r > 0.2).then(|| v.iter().map(|x| x / r).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(a in series(), b in series(), c in series()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&a * &TruncatedSeries::constant(N, S, Rational::from_i64(1)), a);
    }

    #[test]
    fn compose_matches_repeated_products(outer in prop::collection::vec(small_ratio(), 1..7), inner in series()) {
        let inner = pure(inner);
        let mut want = TruncatedSeries::zero(N, S);
        let mut power = TruncatedSeries::constant(N, S, Rational::from_i64(1));
        for c in &outer {
            want = &want + &power.scale(c);
            power = &power * &inner;
        }
        prop_assert_eq!(TruncatedSeries::compose(&outer, &inner).unwrap(), want);
    }

    #[test]
    fn derivatives_commute_and_obey_leibniz(a in series(), b in series()) {
        let (x, y) = (0, N - 1);
        prop_assert_eq!(a.differentiate(x).differentiate(y), a.differentiate(y).differentiate(x));
        for axis in [x, y] {
            let lhs = (&a * &b).differentiate(axis);
            let rhs = &(&a.differentiate(axis) * &b.with_order(lhs.order())) + &(&a.with_order(lhs.order()) * &b.differentiate(axis));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn series_text_roundtrip(a in series(), b in series()) {
        let v = vec![a, b];
        prop_assert_eq!(parse_series::<Rational>(&write_series(&v)).unwrap(), v);
    }

    #[test]
    fn alpha_identity(q in 0.0f64..0.95) {
        let c = ModelConstants::new(q, 2, 1).unwrap();
        prop_assert!((c.alpha.powf(1.0 - q) * c.kappa * (c.kappa - 1.0) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn halfspace_solves_the_equation(
        q in 0.0f64..0.9,
        nu in prop::collection::vec(-1.0f64..1.0, 3),
        e in prop::collection::vec(-1.0f64..1.0, 2),
        x in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        let (Some(nu), Some(e)) = (unit_vec(nu), unit_vec(e)) else { return Ok(()) };
        let c = ModelConstants::new(q, 3, 2).unwrap();
        let u = HalfSpaceSolution::new(c, &nu, &e).unwrap();
        prop_assume!(u.height(&x) > 1e-3 || u.height(&x) < 0.0);
        let r = pde_residual(&u, q, &x);
        let scale = u.value(&x).iter().map(|v| v.abs()).fold(1.0, f64::max);
        prop_assert!(r.iter().all(|v| v.abs() < 1e-10 * scale), "{:?}", r);
    }

    #[test]
    fn recursion_commutes_with_scaling(a in -9i64..=9, b in -9i64..=9, k in 2i64..=5) {
        let c = ModelConstants::from_ratio(0, 1, 2, 1).unwrap();
        let v0 = TruncatedSeries::from_monomials(2, 5, [
            (MultiIndex::new(vec![2, 0]), Rational::from_ratio(a, 200)),
            (MultiIndex::new(vec![3, 0]), Rational::from_ratio(b, 300)),
        ]);
        let data = CauchyData::new(vec![v0], 0.1).unwrap();
        let sys = instantiate_model(c);
        let r = Rational::from_ratio(1, k);
        let scaled = ck_expand(&sys, &rescale_data(&data, &r).unwrap(), 5).unwrap();
        let direct = ck_expand(&sys, &data, 5).unwrap();
        prop_assert_eq!(scaled.v, rescale_series(&direct.v, &r));
        for (s, d) in direct.v.iter().zip(&data.v0) {
            prop_assert_eq!(&s.trace(), d);
        }
    }

    #[test]
    fn first_order_gradient_is_controlled(s1 in -0.09f64..0.09, b in -0.09f64..0.09, q in 0.0f64..0.8) {
        let c = ModelConstants::new(q, 2, 1).unwrap();
        let v01 = TruncatedSeries::from_monomials(2, 4, [(MultiIndex::new(vec![1, 0]), s1), (MultiIndex::new(vec![2, 0]), b)]);
        let data = CauchyData::new(vec![v01], 0.1).unwrap();
        let sol = ck_expand(&instantiate_model(c), &data, 4).unwrap();
        let g = sol.v[0].coeff(&MultiIndex::new(vec![1, 0])).hypot(sol.p[0]);
        prop_assert!(g <= 10.0 * data.epsilon0, "{} vs {}", g, data.epsilon0);
    }

    #[test]
    fn coefficients_are_small(g in prop::collection::vec(-1.0f64..1.0, 3), v2 in -1.0f64..1.0, eps in 1e-4f64..0.05) {
        let c = ModelConstants::new(0.5, 3, 2).unwrap();
        let mut jet = FieldJet::zero(3, 2);
        jet.grad[0] = g.iter().map(|x| eps * x / 3f64.sqrt()).collect();
        jet.value[1] = eps * v2;
        let co = coefficients_at(&jet, &c).unwrap();
        prop_assert!(co.a.iter().all(|a| a.abs() <= 5.0 * eps), "{:?}", co.a);
    }

    #[test]
    fn zero_set_meets_vertical_lines_at_the_trace(a in -0.05f64..0.05, b in -0.05f64..0.05, x1 in -0.4f64..0.4) {
        let c = ModelConstants::new(0.5, 2, 1).unwrap();
        let v1 = TruncatedSeries::from_monomials(2, 4, [
            (MultiIndex::new(vec![1, 0]), a),
            (MultiIndex::new(vec![2, 0]), b),
            (MultiIndex::new(vec![1, 1]), a * b),
        ]);
        let u = inverse_reconstruct(LegendreState::from_series(c, vec![v1.clone()]).unwrap());
        let fb = v1.evaluate(&[x1, 0.0]);
        prop_assert_eq!(u.value(&[x1, fb - 1e-6])[0], 0.0);
        let above = u.value(&[x1, fb + 1e-3])[0];
        prop_assert!(above > 0.0);
        let y = u.height(&[x1, fb + 1e-3]).unwrap().unwrap();
        prop_assert!((y + v1.evaluate(&[x1, y]) - (fb + 1e-3)).abs() < 1e-12);
    }

    #[test]
    fn ode_bounds(gamma in 1.05f64..5.0, c in prop::collection::vec(-1.0f64..1.0, 1..6)) {
        let s = solve_ode_1d(gamma, |x| c.iter().rev().fold(0.0, |a, k| a * x + k), 9).unwrap();
        prop_assert!(s.bounds_hold(), "{} {}", s.du_margin(), s.x_d2u_margin());
    }

    #[test]
    fn regularized_source_is_lipschitz(q in 0.0f64..0.95, u in -1.0f64..1.0, w in -1.0f64..1.0, d in 1e-4f64..1e-1) {
        let (a, b) = (regularized_source(&[u], q, d)[0], regularized_source(&[w], q, d)[0]);
        prop_assert!((a - b).abs() <= d.powf(q - 1.0) * (u - w).abs() * (1.0 + 1e-12));
        if u.abs() >= d {
            prop_assert!((a - u.abs().powf(q - 1.0) * u).abs() <= 1e-12 * u.abs().powf(q));
        }
    }

    #[test]
    fn tilted_plane_interface(slope in -0.5f64..0.5, shift in -0.3f64..0.3) {
        let grid = TensorGrid::new(vec![Axis::uniform(-1.0, 1.0, 33); 2]).unwrap();
        let f = GridField::from_fn(grid.clone(), 1, |x| vec![(x[1] - slope * x[0] - shift).max(0.0).powi(2)]);
        let iface = extract_free_boundary(&f, &grid, 0.0).unwrap();
        prop_assert!(iface.max_deviation(|xp| slope * xp[0] + shift) <= 2.0 * iface.spacing);
    }

    #[test]
    fn diffeo_keeps_the_plane_and_far_field(a in -0.9f64..0.9, z in prop::collection::vec(-1.5f64..1.5, 2)) {
        let p = diffeo_map(&[a], &[z[0], 0.0]);
        prop_assert!(p[1].abs() < 1e-12);
        if z[1].abs() > 0.5 {
            let q = diffeo_map(&[a], &z);
            prop_assert!((q[0] - z[0]).abs() < 1e-12 && (q[1] - z[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn config_roundtrip(
        q in prop::sample::select(vec![0.0, 0.25, 0.5, 0.75]),
        order in 2usize..12,
        count in 5usize..80,
        coef in -0.05f64..0.05,
        k in 1u32..4,
    ) {
        let mut c = ScenarioConfig::flat("prop");
        c.model.q = q;
        c.series.order = order;
        c.grid.count = count;
        c.data.push(DataTerm { index: vec![k], value: vec![coef] });
        prop_assert_eq!(ScenarioConfig::parse(&c.to_text()).unwrap(), c);
    }
}
