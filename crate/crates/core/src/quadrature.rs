//! Adaptive Gauss–Legendre quadrature for vector-valued complex integrands.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

const ORDER: usize = 20;
const MAX_DEPTH: u32 = 40;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = p1;
            dp = n as f64 * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ORDER))
}

fn fixed<F>(f: &F, lo: f64, hi: f64, dim: usize, scratch: &mut [Complex64]) -> Vec<Complex64>
where
    F: Fn(f64, &mut [Complex64]),
{
    let (nodes, weights) = rule();
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut acc = vec![Complex64::new(0.0, 0.0); dim];
    for (x, w) in nodes.iter().zip(weights) {
        f(mid + half * x, scratch);
        for (a, s) in acc.iter_mut().zip(scratch.iter()) {
            *a += s * (w * half);
        }
    }
    acc
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Integrate `f` over `[lo, hi]` to absolute tolerance `tol` in every component.
///
/// `f(t, out)` writes the `dim` components of the integrand at `t` into `out`.
pub fn integrate<F>(f: &F, lo: f64, hi: f64, dim: usize, tol: f64) -> Result<Vec<Complex64>>
where
    F: Fn(f64, &mut [Complex64]),
{
    let mut scratch = vec![Complex64::new(0.0, 0.0); dim];
    let whole = fixed(f, lo, hi, dim, &mut scratch);
    let mut total = vec![Complex64::new(0.0, 0.0); dim];
    recurse(f, lo, hi, whole, tol, 0, dim, &mut scratch, &mut total)?;
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    f: &F,
    lo: f64,
    hi: f64,
    whole: Vec<Complex64>,
    tol: f64,
    depth: u32,
    dim: usize,
    scratch: &mut [Complex64],
    total: &mut [Complex64],
) -> Result<()>
where
    F: Fn(f64, &mut [Complex64]),
{
    let mid = 0.5 * (lo + hi);
    let left = fixed(f, lo, mid, dim, scratch);
    let right = fixed(f, mid, hi, dim, scratch);
    let split: Vec<Complex64> = left.iter().zip(&right).map(|(a, b)| a + b).collect();
    let estimate = max_diff(&whole, &split);
    let magnitude = split.iter().map(|x| x.norm()).fold(0.0, f64::max);
    // roundoff floor: halved tolerances eventually drop below what doubles resolve
    if estimate <= tol || estimate <= 1e-14 * magnitude {
        for (t, s) in total.iter_mut().zip(&split) {
            *t += s;
        }
        return Ok(());
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Quadrature { lo, hi, estimate });
    }
    recurse(f, lo, mid, left, 0.5 * tol, depth + 1, dim, scratch, total)?;
    recurse(f, mid, hi, right, 0.5 * tol, depth + 1, dim, scratch, total)
}
