//! Undetermined-coefficients oracle for scalar toy systems
//! `y_n ∂_n²v + γ ∂_n v = y_n (-Σ_{k<n} ∂_k²v + λ ∂_n v ∂_n²v) + g(v, ∇v)`,
//! computed on plain monomial maps with exact rationals.

#![allow(dead_code)]

use std::collections::BTreeMap;

use freeboundary::ck::{PolynomialSystem, SourceTerm};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;
pub type Poly = BTreeMap<Vec<u32>, Q>;

pub fn q(a: i64, b: i64) -> Q {
    Q::new(BigInt::from(a), BigInt::from(b))
}

/// `c v^a Π_k (∂_k v)^{b_k}`
#[derive(Clone, Debug)]
pub struct Term {
    pub coef: (i64, i64),
    pub v_pow: u32,
    pub grad_pow: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct Toy {
    pub n: usize,
    pub gamma: (i64, i64),
    pub lambda: (i64, i64),
    pub source: Vec<Term>,
}

impl Toy {
    pub fn system(&self) -> PolynomialSystem {
        let src = self
            .source
            .iter()
            .map(|t| SourceTerm { coef: t.coef, v_pow: vec![t.v_pow], grad_pow: vec![t.grad_pow.clone()] })
            .collect();
        PolynomialSystem::new(self.n, vec![self.gamma], vec![vec![self.lambda]], vec![src]).unwrap()
    }
}

fn add_to(p: &mut Poly, k: Vec<u32>, c: Q) {
    if c.is_zero() {
        return;
    }
    let e = p.entry(k.clone()).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        p.remove(&k);
    }
}

pub fn add(a: &Poly, b: &Poly) -> Poly {
    let mut out = a.clone();
    for (k, c) in b {
        add_to(&mut out, k.clone(), c.clone());
    }
    out
}

pub fn scale(a: &Poly, s: &Q) -> Poly {
    let mut out = Poly::new();
    for (k, c) in a {
        add_to(&mut out, k.clone(), c * s);
    }
    out
}

pub fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ka, ca) in a {
        for (kb, cb) in b {
            let k: Vec<u32> = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
            add_to(&mut out, k, ca * cb);
        }
    }
    out
}

pub fn diff(a: &Poly, axis: usize) -> Poly {
    let mut out = Poly::new();
    for (k, c) in a {
        if k[axis] > 0 {
            let mut j = k.clone();
            j[axis] -= 1;
            add_to(&mut out, j, c * Q::from_integer(BigInt::from(k[axis])));
        }
    }
    out
}

pub fn times_var(a: &Poly, axis: usize) -> Poly {
    a.iter()
        .map(|(k, c)| {
            let mut j = k.clone();
            j[axis] += 1;
            (j, c.clone())
        })
        .collect()
}

fn constant(n: usize, c: Q) -> Poly {
    let mut p = Poly::new();
    add_to(&mut p, vec![0; n], c);
    p
}

fn weight(k: &[u32]) -> u32 {
    k.iter().sum::<u32>() + k[k.len() - 1]
}

/// Every multi-index in `n` variables with `|μ| + μ_n = w`.
pub fn indices_of_weight(n: usize, w: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(i: usize, n: usize, w: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == n {
            if weight(cur) == w {
                out.push(cur.clone());
            }
            return;
        }
        for e in 0..=w {
            cur[i] = e;
            rec(i + 1, n, w, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, n, w, &mut cur, &mut out);
    out
}

/// Full (untruncated) residual of the toy equation at the polynomial `v`.
pub fn residual(toy: &Toy, v: &Poly) -> Poly {
    let n = toy.n;
    let vn = diff(v, n - 1);
    let vnn = diff(&vn, n - 1);
    let mut lhs = add(&times_var(&vnn, n - 1), &scale(&vn, &q(toy.gamma.0, toy.gamma.1)));
    let mut tangential = Poly::new();
    for k in 0..n - 1 {
        tangential = add(&tangential, &diff(&diff(v, k), k));
    }
    let quasi = scale(&mul(&vn, &vnn), &q(toy.lambda.0, toy.lambda.1));
    let principal = times_var(&add(&scale(&tangential, &q(-1, 1)), &quasi), n - 1);
    lhs = add(&lhs, &scale(&principal, &q(-1, 1)));
    let grads: Vec<Poly> = (0..n).map(|k| diff(v, k)).collect();
    let mut g = Poly::new();
    for t in &toy.source {
        let mut p = constant(n, q(t.coef.0, t.coef.1));
        for _ in 0..t.v_pow {
            p = mul(&p, v);
        }
        for (k, &e) in t.grad_pow.iter().enumerate() {
            for _ in 0..e {
                p = mul(&p, &grads[k]);
            }
        }
        g = add(&g, &p);
    }
    add(&lhs, &scale(&g, &q(-1, 1)))
}

fn coeff(p: &Poly, k: &[u32]) -> Q {
    p.get(k).cloned().unwrap_or_else(Q::zero)
}

fn exact_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let (a, b) = (x.numer().sqrt(), x.denom().sqrt());
    (&a * &a == *x.numer() && &b * &b == *x.denom()).then(|| Q::new(a, b))
}

fn solve_exact(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Vec<Q> {
    let m = b.len();
    for col in 0..m {
        let piv = (col..m).find(|&r| !a[r][col].is_zero()).expect("oracle system is singular");
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..m {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..m {
                    let t = &a[col][c] * &f;
                    a[r][c] -= t;
                }
                let t = &b[col] * &f;
                b[r] -= t;
            }
        }
    }
    (0..m).map(|i| &b[i] / &a[i][i]).collect()
}

/// Coefficients of the solution through weighted order `order`, given the
/// trace `data` (monomials with `μ_n = 0`). The first-order root must be
/// rational and is the one of smallest modulus.
pub fn oracle(toy: &Toy, data: &Poly, order: u32) -> Poly {
    let n = toy.n;
    let mut v = data.clone();
    let mut en = vec![0u32; n];
    en[n - 1] = 1;
    let zero = vec![0u32; n];
    // the constant residual coefficient as a polynomial in p (degree <= 2)
    let at = |p: i64| {
        let mut w = v.clone();
        add_to(&mut w, en.clone(), q(p, 1));
        coeff(&residual(toy, &w), &zero)
    };
    let (f0, f1, fm, f2) = (at(0), at(1), at(-1), at(2));
    let two = q(2, 1);
    let a = (&f1 + &fm - &f0 * &two) / &two;
    let b = (&f1 - &fm) / &two;
    let c = f0.clone();
    assert_eq!(&a * q(4, 1) + &b * &two + &c, f2, "first-order equation has degree above 2");
    let p = if a.is_zero() {
        -c / b
    } else {
        let disc = &b * &b - &a * &c * q(4, 1);
        let s = exact_sqrt(&disc).expect("first-order root is not rational");
        let r1 = (-&b + &s) / (&a * &two);
        let r2 = (-&b - &s) / (&a * &two);
        if r1.abs() <= r2.abs() {
            r1
        } else {
            r2
        }
    };
    add_to(&mut v, en, p);
    for t in 3..=order {
        let unknowns: Vec<Vec<u32>> = indices_of_weight(n, t).into_iter().filter(|k| k[n - 1] >= 1).collect();
        let eqs = indices_of_weight(n, t - 2);
        assert_eq!(unknowns.len(), eqs.len());
        let r0 = residual(toy, &v);
        let base: Vec<Q> = eqs.iter().map(|e| coeff(&r0, e)).collect();
        let mut mat = vec![vec![Q::zero(); unknowns.len()]; eqs.len()];
        for (j, u) in unknowns.iter().enumerate() {
            let mut w = v.clone();
            add_to(&mut w, u.clone(), Q::one());
            let r = residual(toy, &w);
            for (i, e) in eqs.iter().enumerate() {
                mat[i][j] = coeff(&r, e) - &base[i];
            }
        }
        let x = solve_exact(mat, base.iter().map(|b| -b).collect());
        for (u, c) in unknowns.into_iter().zip(x) {
            add_to(&mut v, u, c);
        }
    }
    v
}

pub fn poly(terms: &[(&[u32], Q)]) -> Poly {
    let mut p = Poly::new();
    for (k, c) in terms {
        add_to(&mut p, k.to_vec(), c.clone());
    }
    p
}

/// Toy systems with rational first-order roots and data for them.
pub fn toy_cases() -> Vec<(Toy, Poly)> {
    vec![
        (
            Toy {
                n: 2,
                gamma: (5, 2),
                lambda: (0, 1),
                source: vec![Term { coef: (3, 100), v_pow: 0, grad_pow: vec![0, 0] }],
            },
            poly(&[(&[2, 0], q(1, 50)), (&[3, 0], q(-1, 30))]),
        ),
        // 2p = p² + 15/64 at order zero, so p = 1/8
        (
            Toy {
                n: 2,
                gamma: (2, 1),
                lambda: (1, 3),
                source: vec![
                    Term { coef: (1, 1), v_pow: 0, grad_pow: vec![0, 2] },
                    Term { coef: (15, 64), v_pow: 0, grad_pow: vec![0, 0] },
                    Term { coef: (1, 2), v_pow: 1, grad_pow: vec![1, 0] },
                ],
            },
            poly(&[(&[2, 0], q(1, 40)), (&[1, 0], q(0, 1)), (&[4, 0], q(1, 7))]),
        ),
        (
            Toy {
                n: 3,
                gamma: (3, 1),
                lambda: (-1, 2),
                source: vec![
                    Term { coef: (3, 100), v_pow: 0, grad_pow: vec![0, 0, 0] },
                    Term { coef: (1, 10), v_pow: 2, grad_pow: vec![0, 0, 0] },
                    Term { coef: (1, 5), v_pow: 0, grad_pow: vec![1, 1, 0] },
                    Term { coef: (1, 20), v_pow: 1, grad_pow: vec![0, 0, 1] },
                ],
            },
            poly(&[(&[1, 0, 0], q(1, 50)), (&[2, 0, 0], q(1, 40)), (&[1, 1, 0], q(1, 60)), (&[0, 3, 0], q(-1, 30))]),
        ),
        (
            Toy {
                n: 3,
                gamma: (7, 3),
                lambda: (2, 1),
                source: vec![
                    Term { coef: (1, 3), v_pow: 0, grad_pow: vec![2, 0, 0] },
                    Term { coef: (-1, 4), v_pow: 0, grad_pow: vec![0, 1, 1] },
                ],
            },
            poly(&[(&[0, 1, 0], q(1, 30)), (&[2, 1, 0], q(-1, 11)), (&[0, 0, 0], q(1, 90))]),
        ),
    ]
}

pub fn to_series(p: &Poly, n: usize, order: usize) -> freeboundary::series::TruncatedSeries<Q> {
    use freeboundary::series::{MultiIndex, TruncatedSeries};
    TruncatedSeries::from_monomials(n, order, p.iter().map(|(k, c)| (MultiIndex::new(k.clone()), c.clone())))
}

/// Runs the exact recursion on every toy case and returns the number of
/// monomial coefficients that differ from the oracle.
pub fn oracle_mismatches(order: usize) -> usize {
    use freeboundary::ck::{ck_expand, CauchyData};
    use freeboundary::series::MultiIndex;
    let mut bad = 0;
    for (toy, data) in toy_cases() {
        let want = oracle(&toy, &data, order as u32);
        let d = CauchyData::unchecked(vec![to_series(&data, toy.n, order)]).unwrap();
        let got = ck_expand(&toy.system(), &d, order).unwrap();
        for w in 0..=order as u32 {
            for k in indices_of_weight(toy.n, w) {
                if got.v[0].monomial_coeff(&MultiIndex::new(k.clone())) != coeff(&want, &k) {
                    bad += 1;
                }
            }
        }
    }
    bad
}
