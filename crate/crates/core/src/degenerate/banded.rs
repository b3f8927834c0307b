use crate::error::{Error, Result};

/// Square band matrix with `kl` sub- and `ku` super-diagonals, factored in
/// place by LU with partial pivoting. Row `i` stores columns
/// `i - kl ..= i + ku + kl`; the extra `kl` absorb pivoting fill.
#[derive(Clone, Debug)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
    perm: Vec<usize>,
    factored: bool,
}

impl BandMatrix {
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandMatrix { n, kl, ku, width, data: vec![0.0; n * width], perm: Vec::new(), factored: false }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku + self.kl);
        i * self.width + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku + self.kl {
            0.0
        } else {
            self.data[self.slot(i, j)]
        }
    }

    /// Adds `v` to entry `(i, j)`, which must lie within the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(j + self.kl >= i && j <= i + self.ku, "entry ({i}, {j}) outside the band");
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    pub fn factor(&mut self) -> Result<()> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        self.perm = (0..n).collect();
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).abs();
            for i in k + 1..=last {
                let v = self.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::InvalidArgument(format!("singular band matrix at column {k}")));
            }
            let right = (k + ku + kl).min(n - 1);
            if p != k {
                for j in k..=right {
                    let (a, b) = (self.slot(k, j), self.slot(p, j));
                    self.data.swap(a, b);
                }
            }
            self.perm[k] = p;
            let piv = self.get(k, k);
            for i in k + 1..=last {
                let s = self.slot(i, k);
                let l = self.data[s] / piv;
                self.data[s] = l;
                if l == 0.0 {
                    continue;
                }
                for j in k + 1..=right {
                    let ukj = self.data[self.slot(k, j)];
                    let t = self.slot(i, j);
                    self.data[t] -= l * ukj;
                }
            }
        }
        self.factored = true;
        Ok(())
    }

    /// Solves `A x = b` with the factored matrix.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert!(self.factored, "solve before factor");
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.perm[k]);
            let xk = x[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                x[i] -= self.data[self.slot(i, k)] * xk;
            }
        }
        for k in (0..n).rev() {
            let mut acc = x[k];
            for j in k + 1..=(k + ku + kl).min(n - 1) {
                acc -= self.data[self.slot(k, j)] * x[j];
            }
            x[k] = acc / self.data[self.slot(k, k)];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_band_system_needs_pivoting() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (n, kl, ku) = (40, 3, 2);
        let mut a = BandMatrix::new(n, kl, ku);
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                // weak diagonal forces row swaps
                let v = if i == j { 1e-3 } else { rng.gen_range(-1.0..1.0) };
                a.add(i, j, v);
                dense[i][j] = v;
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let b: Vec<f64> = dense.iter().map(|r| r.iter().zip(&x).map(|(p, q)| p * q).sum()).collect();
        a.factor().unwrap();
        let got = a.solve(&b);
        for (g, e) in got.iter().zip(&x) {
            assert!((g - e).abs() < 1e-9);
        }
    }
}
