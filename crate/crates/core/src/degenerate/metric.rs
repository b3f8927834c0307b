/// `|x - y| / sqrt(|x - y| + x_n + y_n)`, comparable to the intrinsic distance
/// of the degenerate operator on the upper half-space.
pub fn intrinsic_distance(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let d = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    if d == 0.0 {
        return 0.0;
    }
    d / (d + x[n - 1] + y[n - 1]).sqrt()
}

/// `(x_n + r^2)^{γ + n/2} r^n`, comparable to the weighted measure of the
/// intrinsic ball of radius `r` about `x`.
pub fn ball_measure(x: &[f64], r: f64, gamma: f64) -> f64 {
    let n = x.len() as f64;
    (x[x.len() - 1] + r * r).powf(gamma + 0.5 * n) * r.powf(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn vertical_pairs_within_factor_four() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(intrinsic_distance(&[0.3, 0.2], &[0.3, 0.2]), 0.0);
        for _ in 0..100 {
            let (t, s): (f64, f64) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
            let d = intrinsic_distance(&[0.0, t], &[0.0, s]);
            let exact = 2.0 * (t.sqrt() - s.sqrt()).abs();
            assert!(d <= 4.0 * exact + 1e-15 && exact <= 4.0 * d + 1e-15);
        }
    }

    #[test]
    fn doubling() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let g = rng.gen_range(1.0..5.0);
            let x = [rng.gen_range(-1.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
            let r = rng.gen_range(1e-3..1.0);
            let ratio = ball_measure(&x, 3.0 * r, g) / ball_measure(&x, r, g);
            assert!(ratio <= 3f64.powf(2.0 * g + 6.0) * (1.0 + 1e-12));
        }
    }
}
