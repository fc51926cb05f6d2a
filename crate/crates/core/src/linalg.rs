//! Small dense complex linear algebra on top of `nalgebra`, plus polynomial
//! helpers shared by the period and cohomology code.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Singular values below this fraction of the largest are treated as kernel.
pub const RANK_CUTOFF: f64 = 1e-10;

/// `n` Chebyshev points of the first kind on `[lo, hi]`, ascending.
pub fn chebyshev_points(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let t = -(std::f64::consts::PI * (2 * i + 1) as f64 / (2 * n) as f64).cos();
            0.5 * (lo + hi) + 0.5 * (hi - lo) * t
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub solution: Vec<Complex64>,
    /// `||A x - b|| / ||b||`, or 0 when `b = 0`.
    pub relative_residual: f64,
    /// `sigma_max / sigma_min` over the retained singular values of the
    /// column-normalized matrix.
    pub condition: f64,
    pub rank: usize,
}

/// Minimum-norm least-squares solution of `A x = b` by truncated SVD.
pub fn least_squares(a: &DMatrix<Complex64>, b: &DVector<Complex64>) -> LeastSquares {
    let ncols = a.ncols();
    let scales: Vec<f64> = (0..ncols)
        .map(|j| {
            let n = a.column(j).norm();
            if n > 0.0 {
                n
            } else {
                1.0
            }
        })
        .collect();
    let mut scaled = a.clone();
    for (j, s) in scales.iter().enumerate() {
        scaled.column_mut(j).unscale_mut(*s);
    }
    let svd = scaled.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = smax * RANK_CUTOFF;
    let retained: Vec<f64> = svd.singular_values.iter().cloned().filter(|&s| s > cutoff).collect();
    let rank = retained.len();
    let condition = if rank == 0 {
        f64::INFINITY
    } else {
        smax / retained.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    let y = svd.solve(b, cutoff).expect("svd computed with u and v");
    let solution: Vec<Complex64> = y.iter().zip(&scales).map(|(v, s)| v / *s).collect();
    let x = DVector::from_vec(solution.clone());
    let bnorm = b.norm();
    let relative_residual = if bnorm == 0.0 { 0.0 } else { (a * x - b).norm() / bnorm };
    LeastSquares { solution, relative_residual, condition, rank }
}

/// Solve a square system by LU; `None` if singular.
pub fn solve_square(a: DMatrix<Complex64>, b: &DVector<Complex64>) -> Option<Vec<Complex64>> {
    a.lu().solve(b).map(|x| x.iter().cloned().collect())
}

/// Horner evaluation of `sum c_j z^j`.
pub fn poly_eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Pascal's triangle row `binom(n, 0..=n)` as floats.
pub fn binomial_row(n: usize) -> Vec<f64> {
    let mut row = vec![1.0; n + 1];
    for j in 1..n {
        row[j] = row[j - 1] * (n - j + 1) as f64 / j as f64;
    }
    row
}

/// Monomial coefficients of `sum b_j ((z - center)/scale)^j`.
pub fn shifted_to_monomial(b: &[Complex64], center: Complex64, scale: f64) -> Vec<Complex64> {
    let n = b.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (j, bj) in b.iter().enumerate() {
        let row = binomial_row(j);
        let s = bj / scale.powi(j as i32);
        // (z - center)^j = sum_i binom(j, i) z^i (-center)^{j-i}
        for (i, binom) in row.iter().enumerate() {
            out[i] += s * binom * (-center).powi((j - i) as i32);
        }
    }
    out
}
