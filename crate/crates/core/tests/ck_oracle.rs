mod common;

use common::*;
use freeboundary::ck::{ck_expand, system_residual, CauchyData};
use num_traits::Zero;

#[test]
fn recursion_matches_oracle_through_order_four() {
    for order in 2..=4 {
        assert_eq!(oracle_mismatches(order), 0, "order {order}");
    }
}

#[test]
fn oracle_solution_has_vanishing_residual() {
    for (toy, data) in toy_cases() {
        let v = oracle(&toy, &data, 4);
        let r = residual(&toy, &v);
        for w in 0..=2 {
            for k in indices_of_weight(toy.n, w) {
                assert!(r.get(&k).map_or(true, |c| c.is_zero()), "{k:?}");
            }
        }
    }
}

#[test]
fn oracle_agrees_with_library_residual() {
    for (toy, data) in toy_cases() {
        let v = oracle(&toy, &data, 5);
        let s = to_series(&v, toy.n, 5);
        let r = system_residual(&toy.system(), &[s]).unwrap();
        assert!(r[0].is_zero());
    }
}

#[test]
fn first_order_roots() {
    let cases = toy_cases();
    let en = |n: usize| {
        let mut k = vec![0u32; n];
        k[n - 1] = 1;
        k
    };
    let want = [q(3, 250), q(1, 8), q(1, 100), q(0, 1)];
    for ((toy, data), p) in cases.iter().zip(want) {
        let d = CauchyData::unchecked(vec![to_series(data, toy.n, 3)]).unwrap();
        assert_eq!(ck_expand(&toy.system(), &d, 3).unwrap().p[0], p);
        let v = oracle(toy, data, 2);
        assert_eq!(v.get(&en(toy.n)).cloned().unwrap_or_else(Q::zero), p);
    }
}
