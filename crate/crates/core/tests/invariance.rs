use freeboundary::ck::{ck_expand, instantiate_model, CauchyData};
use freeboundary::exact::ModelConstants;
use freeboundary::harness::{diffeo_check, run_pipeline, ScenarioConfig};
use freeboundary::series::{binomial, MultiIndex, TruncatedSeries};

/// `f(y_1 + t, ...)` truncated at `order`, from monomial coefficients of `f`.
fn translate(f: &TruncatedSeries<f64>, t: f64, order: usize) -> TruncatedSeries<f64> {
    let n = f.dim();
    let entries = MultiIndex::enumerate(n, order).into_iter().map(|mu| {
        let mut acc = 0.0;
        let room = f.order() as u32 - mu.weighted_order().min(f.order() as u32);
        for k in 0..=room {
            let mut nu = mu.entries().to_vec();
            nu[0] += k;
            let c = f.monomial_coeff(&MultiIndex::new(nu.clone()));
            acc += c * binomial(nu[0] as u64, k as u64) as f64 * t.powi(k as i32);
        }
        (mu, acc)
    });
    TruncatedSeries::from_monomials(n, order, entries.collect::<Vec<_>>())
}

#[test]
fn recursion_commutes_with_tangential_translation() {
    let c = ModelConstants::new(0.5, 2, 2).unwrap();
    let sys = instantiate_model(c);
    let (s, big, t) = (6, 16, 0.1);
    let v01 = TruncatedSeries::from_monomials(2, big, [(MultiIndex::new(vec![2, 0]), 0.02), (MultiIndex::new(vec![3, 0]), -0.01)]);
    let v02 = TruncatedSeries::from_monomials(2, big, [(MultiIndex::new(vec![1, 0]), 0.003)]);
    let wide = ck_expand(&sys, &CauchyData::new(vec![v01.clone(), v02.clone()], 0.1).unwrap(), big).unwrap();
    let shifted = CauchyData::new(vec![translate(&v01, t, s), translate(&v02, t, s)], 0.1).unwrap();
    let local = ck_expand(&sys, &shifted, s).unwrap();
    for (a, b) in local.v.iter().zip(&wide.v) {
        let diff = a - &translate(b, t, s);
        assert!(diff.max_abs_in_orders(0, s) < 1e-10, "{}", diff.max_abs_in_orders(0, s));
    }
}

#[test]
fn pipeline_reports_are_deterministic() {
    let cfg = ScenarioConfig::parabolic("det", 0.01);
    let (a, b) = (run_pipeline(&cfg).unwrap(), run_pipeline(&cfg).unwrap());
    assert_eq!(a.checks, b.checks);
    assert_eq!(a.plots, b.plots);
}

#[test]
fn diffeo_properties_at_reference_offsets() {
    for a in [[0.0, 0.0], [0.05, 0.0], [0.1, 0.1]] {
        for r in diffeo_check(&a, 1e-7, 3).unwrap() {
            assert!(r.pass, "{a:?}: {r:?}");
        }
    }
}
