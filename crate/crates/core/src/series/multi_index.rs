use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use once_cell::sync::{Lazy, OnceCell};

/// A multi-index `(mu_1, ..., mu_n)`. The last axis is the vertical one and
/// counts twice in the weighted order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        assert!(!entries.is_empty(), "multi-index needs at least one axis");
        MultiIndex(entries)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut e = vec![0; dim];
        e[axis] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// `|mu|`
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `mu_n`
    pub fn vertical(&self) -> u32 {
        *self.0.last().unwrap()
    }

    /// `|mu| + mu_n`
    pub fn weighted_order(&self) -> u32 {
        self.total() + self.vertical()
    }

    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&k| factorial(k)).product()
    }

    pub fn factorial_u64(&self) -> u64 {
        self.0.iter().map(|&k| (1..=k as u64).product::<u64>()).product()
    }

    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn plus(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn minus(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if !other.le(self) {
            return None;
        }
        Some(MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    pub fn bump(&self, axis: usize) -> MultiIndex {
        let mut e = self.0.clone();
        e[axis] += 1;
        MultiIndex(e)
    }

    pub fn drop_axis(&self, axis: usize) -> Option<MultiIndex> {
        if self.0[axis] == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[axis] -= 1;
        Some(MultiIndex(e))
    }

    /// `binomial(mu, sigma) = mu! / (sigma! (mu - sigma)!)`, defined iff `sigma <= mu`.
    pub fn binomial(&self, sigma: &MultiIndex) -> Option<u64> {
        if !sigma.le(self) {
            return None;
        }
        Some(
            self.0
                .iter()
                .zip(&sigma.0)
                .map(|(&m, &s)| binomial(m as u64, s as u64))
                .product(),
        )
    }

    /// `y^mu` at a point.
    pub fn monomial(&self, y: &[f64]) -> f64 {
        self.0.iter().zip(y).map(|(&k, &x)| x.powi(k as i32)).product()
    }

    /// All multi-indices of dimension `dim` with weighted order at most `order`,
    /// in graded-lexicographic order on `(weighted_order, entries)`.
    pub fn enumerate(dim: usize, order: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; dim];
        fill(&mut out, &mut cur, 0, order as u32);
        out.sort();
        out
    }
}

fn fill(out: &mut Vec<MultiIndex>, cur: &mut Vec<u32>, axis: usize, budget: u32) {
    let dim = cur.len();
    let weight = if axis + 1 == dim { 2 } else { 1 };
    let mut k = 0;
    while k * weight <= budget {
        cur[axis] = k;
        if axis + 1 == dim {
            out.push(MultiIndex(cur.clone()));
        } else {
            fill(out, cur, axis + 1, budget - k * weight);
        }
        k += 1;
    }
    cur[axis] = 0;
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weighted_order()
            .cmp(&other.weighted_order())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Enumeration and product bookkeeping shared by every series of one shape.
pub struct IndexTable {
    pub dim: usize,
    pub order: usize,
    pub indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
    products: OnceCell<Vec<(u32, u32, u32, u64)>>,
}

impl IndexTable {
    pub fn get(dim: usize, order: usize) -> Arc<IndexTable> {
        static CACHE: Lazy<Mutex<HashMap<(usize, usize), Arc<IndexTable>>>> =
            Lazy::new(|| Mutex::new(HashMap::new()));
        let mut cache = CACHE.lock().unwrap();
        cache
            .entry((dim, order))
            .or_insert_with(|| {
                let indices = MultiIndex::enumerate(dim, order);
                let lookup = indices.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
                Arc::new(IndexTable {
                    dim,
                    order,
                    indices,
                    lookup,
                    products: OnceCell::new(),
                })
            })
            .clone()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn position(&self, mu: &MultiIndex) -> Option<usize> {
        self.lookup.get(mu).copied()
    }

    /// Triples `(i, j, k, binomial(mu_k, mu_i))` with `mu_i + mu_j = mu_k`.
    pub fn products(&self) -> &[(u32, u32, u32, u64)] {
        self.products.get_or_init(|| {
            let mut out = Vec::new();
            for (i, a) in self.indices.iter().enumerate() {
                for (j, b) in self.indices.iter().enumerate() {
                    if a.weighted_order() + b.weighted_order() > self.order as u32 {
                        continue;
                    }
                    let sum = a.plus(b);
                    let k = self.lookup[&sum];
                    let w = sum.binomial(a).unwrap();
                    out.push((i as u32, j as u32, k as u32, w));
                }
            }
            out
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weighted_order_counts_vertical_twice() {
        let mu = MultiIndex::new(vec![2, 1, 3]);
        assert_eq!(mu.total(), 6);
        assert_eq!(mu.weighted_order(), 9);
    }

    #[test]
    fn binomial_edges() {
        let mu = MultiIndex::new(vec![3, 2]);
        assert_eq!(mu.binomial(&MultiIndex::zero(2)), Some(1));
        assert_eq!(mu.binomial(&mu), Some(1));
        assert_eq!(mu.binomial(&MultiIndex::new(vec![4, 0])), None);
        assert_eq!(mu.binomial(&MultiIndex::new(vec![1, 1])), Some(6));
    }

    #[test]
    fn enumeration_is_graded() {
        let all = MultiIndex::enumerate(2, 4);
        // a + 2b <= 4
        assert_eq!(all.len(), 5 + 3 + 1);
        assert!(all.windows(2).all(|w| w[0].weighted_order() <= w[1].weighted_order()));
        assert_eq!(all[0], MultiIndex::zero(2));
    }

    #[test]
    fn vandermonde_identity() {
        // sum over |sigma| = s of binomial(mu, sigma) = binomial(|mu|, s)
        for mu in MultiIndex::enumerate(3, 8) {
            if mu.total() > 8 {
                continue;
            }
            let all = MultiIndex::enumerate(3, 16);
            for s in 0..=mu.total() {
                let lhs: u64 = all
                    .iter()
                    .filter(|sig| sig.total() == s)
                    .filter_map(|sig| mu.binomial(sig))
                    .sum();
                assert_eq!(lhs, binomial(mu.total() as u64, s as u64), "mu={mu} s={s}");
            }
        }
    }
}
