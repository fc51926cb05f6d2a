//! Fixed-order pairwise summation.
//!
//! The split points depend only on the slice length, so the result is
//! bit-identical regardless of how many worker threads take part.

use num_complex::Complex64;

const LEAF: usize = 256;

/// Pairwise sum with a fixed binary split; halves are summed on the rayon pool.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    if values.len() <= LEAF {
        return values.iter().fold(Complex64::new(0.0, 0.0), |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    let (lo, hi) = values.split_at(mid);
    let (a, b) = rayon::join(|| pairwise_sum(lo), || pairwise_sum(hi));
    a + b
}

/// Pairwise sum of nonnegative reals, same tree shape as [`pairwise_sum`].
pub fn pairwise_sum_real(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    let (lo, hi) = values.split_at(mid);
    let (a, b) = rayon::join(|| pairwise_sum_real(lo), || pairwise_sum_real(hi));
    a + b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independent_of_pool_size() {
        let values: Vec<Complex64> = (0..100_000)
            .map(|i| Complex64::new(1.0 / (1.0 + i as f64), (i as f64).sin()))
            .collect();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| pairwise_sum(&values));
        let b = four.install(|| pairwise_sum(&values));
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }

    #[test]
    fn small_sums() {
        assert_eq!(pairwise_sum(&[]), Complex64::new(0.0, 0.0));
        assert_eq!(pairwise_sum_real(&[1.0, 2.0, 3.0]), 6.0);
    }
}
