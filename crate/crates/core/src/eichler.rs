//! Eichler integrals of cusp forms, Bol's identity and period elements.
//!
//! For a cusp form `G` of weight `k+2` the Eichler integral `F` is the
//! termwise `(k+1)`-fold antiderivative. Its period `F|M - F` under the
//! weight `-k` stroke is computed two ways: by fitting the stroke difference
//! at interpolation nodes, and from the moments of `G` along the vertical line
//! from `V^{-1}∞` to `i∞`,
//!
//! `p_V(z) = ((-1)^k / k!) ∫ G(τ) (τ - z)^k dτ`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::automorphy::{ppow, MultiplierSystem};
use crate::error::{Error, Result};
use crate::forms::FourierExpansion;
use crate::linalg::{binomial_row, chebyshev_points, least_squares, poly_eval, shifted_to_monomial, solve_square};
use crate::modgroup::GroupElement;
use crate::quadrature::integrate;
use crate::serial::ComplexList;
use crate::{function, Function};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Height of the interpolation nodes.
pub const NODE_HEIGHT: f64 = 1.5;
/// Half-width of the node segment.
pub const NODE_HALF_WIDTH: f64 = 0.5;
/// Largest accepted relative validation residual of a polynomial fit.
pub const FIT_LIMIT: f64 = 1e-6;
/// Absolute target for each quadrature segment of a moment.
pub const QUAD_TOL: f64 = 1e-15;

pub struct EichlerIntegral {
    source: FourierExpansion,
    k: u32,
    /// `derivatives[n]` is the `n`-th termwise derivative of the integral, `n <= k+1`.
    derivatives: Vec<FourierExpansion>,
    pub normalization: Complex64,
}

/// Termwise `(k+1)`-fold antiderivative of a cusp-class expansion.
pub fn eichler_integral(g: &FourierExpansion, k: u32) -> Result<EichlerIntegral> {
    for (i, a) in g.coeffs().iter().enumerate() {
        let m = g.start + i as i64;
        let e = m as f64 + g.kappa;
        if e <= 0.0 && a.norm() != 0.0 {
            return Err(Error::NotCuspForm { index: m, value: e });
        }
    }
    let coeffs = g
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let f = g.frequency(g.start + i as i64);
            if a.norm() == 0.0 {
                ZERO
            } else {
                a / f.powu(k + 1)
            }
        })
        .collect();
    let integrated = FourierExpansion { coeffs: ComplexList(coeffs), ..g.clone() };
    let derivatives = (0..=k + 1).map(|n| integrated.derivative(n)).collect();
    Ok(EichlerIntegral { source: g.clone(), k, derivatives, normalization: Complex64::new(1.0, 0.0) })
}

impl EichlerIntegral {
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Weight `-k` of the integral.
    pub fn weight(&self) -> f64 {
        -(self.k as f64)
    }

    pub fn source(&self) -> &FourierExpansion {
        &self.source
    }

    pub fn expansion(&self) -> &FourierExpansion {
        &self.derivatives[0]
    }

    pub fn derivative_expansion(&self, n: u32) -> FourierExpansion {
        self.derivatives[0].derivative(n)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.normalization * self.derivatives[0].eval(z)
    }

    /// `F^{(n)}(z)` for `n <= k+1`.
    pub fn eval_derivative(&self, n: usize, z: Complex64) -> Complex64 {
        self.normalization * self.derivatives[n].eval(z)
    }

    pub fn to_function(self: &Arc<Self>) -> Function {
        let me = self.clone();
        function(move |z| me.eval(z))
    }
}

/// Taylor coefficients in `t` of `(c(z0+t)+d)^k F(M(z0+t))` up to `t^{k+1}`.
fn composed_taylor(f: &EichlerIntegral, m: &GroupElement, z0: Complex64) -> Vec<Complex64> {
    let n = f.k as usize + 1;
    let c = m.c() as f64;
    let j0 = m.j(z0);
    let w0 = m.act(z0);
    // M(z0 + t) - M(z0) = sum_{i>=1} (-1)^{i+1} c^{i-1} j0^{-i-1} t^i
    let mut u = vec![ZERO; n + 1];
    for (i, ui) in u.iter_mut().enumerate().skip(1) {
        let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
        *ui = sign * c.powi(i as i32 - 1) / j0.powi(i as i32 + 1);
    }
    let mut factorial = 1.0;
    let mut composed = vec![ZERO; n + 1];
    let mut upow = vec![ZERO; n + 1];
    upow[0] = Complex64::new(1.0, 0.0);
    for i in 0..=n {
        if i > 0 {
            factorial *= i as f64;
            upow = poly_mul_trunc(&upow, &u, n + 1);
        }
        let fi = f.eval_derivative(i, w0) / factorial;
        for (acc, p) in composed.iter_mut().zip(&upow) {
            *acc += fi * p;
        }
    }
    // (j0 + c t)^k
    let row = binomial_row(f.k as usize);
    let automorphy: Vec<Complex64> = row
        .iter()
        .enumerate()
        .map(|(i, b)| b * c.powi(i as i32) * j0.powi(f.k as i32 - i as i32))
        .collect();
    poly_mul_trunc(&composed, &automorphy, n + 1)
}

pub(crate) fn poly_mul_trunc(a: &[Complex64], b: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; len];
    for (i, x) in a.iter().enumerate().take(len) {
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    poly_mul_trunc(a, b, a.len() + b.len() - 1)
}

/// Max relative residual of `d^{k+1}/dz^{k+1} [(cz+d)^k F(Mz)] = (cz+d)^{-k-2} F^{(k+1)}(Mz)`.
pub fn bol_check(f: &EichlerIntegral, m: &GroupElement, samples: &[Complex64]) -> f64 {
    let n = f.k as usize + 1;
    let n_factorial: f64 = (1..=n).map(|i| i as f64).product();
    samples
        .iter()
        .map(|&z| {
            let lhs = composed_taylor(f, m, z)[n] * n_factorial;
            let rhs = m.j(z).powi(-(n as i32) - 1) * f.eval_derivative(n, m.act(z));
            let scale = rhs.norm();
            if scale == 0.0 {
                lhs.norm()
            } else {
                (lhs - rhs).norm() / scale
            }
        })
        .fold(0.0, f64::max)
}

/// A function-valued period element with its values on a stored grid.
#[derive(Clone)]
pub struct SampledFunction {
    pub grid: Vec<Complex64>,
    pub values: Vec<Complex64>,
    pub evaluator: Function,
    pub label: String,
}

impl std::fmt::Debug for SampledFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SampledFunction").field("label", &self.label).field("grid", &self.grid.len()).finish()
    }
}

/// A cocycle value: a polynomial for integer weight, otherwise a function.
#[derive(Clone, Debug)]
pub enum PeriodElement {
    /// Monomial coefficients `c_0..c_n`.
    Polynomial(Vec<Complex64>),
    Sampled(SampledFunction),
}

/// The fixed grid: Chebyshev points on `Im z = 3/2`, `|Re z| <= 1/2`.
pub fn standard_grid(n: usize) -> Vec<Complex64> {
    chebyshev_points(n, -NODE_HALF_WIDTH, NODE_HALF_WIDTH)
        .into_iter()
        .map(|x| Complex64::new(x, NODE_HEIGHT))
        .collect()
}

impl PeriodElement {
    pub fn zero_polynomial(k: u32) -> PeriodElement {
        PeriodElement::Polynomial(vec![ZERO; k as usize + 1])
    }

    pub fn from_function(f: Function, label: impl Into<String>) -> PeriodElement {
        let grid = standard_grid(10);
        let values = grid.iter().map(|&z| f(z)).collect();
        PeriodElement::Sampled(SampledFunction { grid, values, evaluator: f, label: label.into() })
    }

    pub fn coeffs(&self) -> Option<&[Complex64]> {
        match self {
            PeriodElement::Polynomial(c) => Some(c),
            PeriodElement::Sampled(_) => None,
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            PeriodElement::Polynomial(c) => poly_eval(c, z),
            PeriodElement::Sampled(s) => (s.evaluator)(z),
        }
    }

    pub fn to_function(&self) -> Function {
        match self {
            PeriodElement::Polynomial(c) => {
                let c = c.clone();
                function(move |z| poly_eval(&c, z))
            }
            PeriodElement::Sampled(s) => s.evaluator.clone(),
        }
    }

    /// Sup-norm on the standard 10-point grid.
    pub fn grid_norm(&self) -> f64 {
        standard_grid(10).iter().map(|&z| self.eval(z).norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> PeriodElement {
        match self {
            PeriodElement::Polynomial(c) => PeriodElement::Polynomial(c.iter().map(|x| x * s).collect()),
            PeriodElement::Sampled(f) => {
                let g = f.evaluator.clone();
                PeriodElement::from_function(function(move |z| s * g(z)), format!("{} * {s}", f.label))
            }
        }
    }

    pub fn add(&self, other: &PeriodElement) -> PeriodElement {
        match (self, other) {
            (PeriodElement::Polynomial(a), PeriodElement::Polynomial(b)) => {
                let mut out = vec![ZERO; a.len().max(b.len())];
                for (i, x) in a.iter().enumerate() {
                    out[i] += x;
                }
                for (i, x) in b.iter().enumerate() {
                    out[i] += x;
                }
                PeriodElement::Polynomial(out)
            }
            _ => {
                let (f, g) = (self.to_function(), other.to_function());
                PeriodElement::from_function(function(move |z| f(z) + g(z)), "sum")
            }
        }
    }

    pub fn sub(&self, other: &PeriodElement) -> PeriodElement {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `(p|_v^{w} M)(z) = v(M)^{-1} (cz+d)^{-w} p(Mz)` with `w` the weight.
    ///
    /// Polynomials of degree at most `-w` stay polynomials for integer `w <= 0`.
    pub fn slash(&self, m: &GroupElement, weight: f64, v: &MultiplierSystem) -> Result<PeriodElement> {
        let vinv = 1.0 / v.extend(m)?;
        let k = -weight;
        if let PeriodElement::Polynomial(c) = self {
            if k >= 0.0 && k.fract() == 0.0 && c.len() <= k as usize + 1 {
                return Ok(PeriodElement::Polynomial(slash_polynomial(c, m, k as usize, vinv)));
            }
        }
        let f = self.to_function();
        let m = *m;
        Ok(PeriodElement::from_function(
            function(move |z| vinv * ppow(m.j(z), k) * f(m.act(z))),
            format!("slash by {m}"),
        ))
    }
}

/// Coefficients of `s (cz+d)^k p((az+b)/(cz+d))` for `deg p <= k`.
fn slash_polynomial(c: &[Complex64], m: &GroupElement, k: usize, s: Complex64) -> Vec<Complex64> {
    let lin = |x: i64, y: i64| vec![Complex64::new(y as f64, 0.0), Complex64::new(x as f64, 0.0)];
    let num = lin(m.a(), m.b());
    let den = lin(m.c(), m.d());
    let mut num_pows = vec![vec![Complex64::new(1.0, 0.0)]];
    let mut den_pows = vec![vec![Complex64::new(1.0, 0.0)]];
    for _ in 0..k {
        num_pows.push(poly_mul(num_pows.last().unwrap(), &num));
        den_pows.push(poly_mul(den_pows.last().unwrap(), &den));
    }
    let mut out = vec![ZERO; k + 1];
    for (j, cj) in c.iter().enumerate() {
        if cj.norm() == 0.0 {
            continue;
        }
        let term = poly_mul(&num_pows[j], &den_pows[k - j]);
        for (o, t) in out.iter_mut().zip(&term) {
            *o += s * cj * t;
        }
    }
    out
}

/// Outcome of the interpolation route.
#[derive(Clone, Debug)]
pub struct DirectPeriod {
    pub element: PeriodElement,
    /// Max fit error at the validation nodes relative to the values of `F` and `F|M` there.
    pub validation_residual: f64,
    /// Max `|b_j| / max|b|` over `j > k` of a degree `k+4` fit in the node basis.
    pub degree_excess: f64,
}

fn stroke_difference(f: &EichlerIntegral, m: &GroupElement, vinv: Complex64, z: Complex64) -> (Complex64, f64) {
    let fz = f.eval(z);
    let fm = vinv * m.j(z).powi(f.k as i32) * f.eval(m.act(z));
    (fm - fz, fz.norm().max(fm.norm()))
}

fn node_basis(z: Complex64) -> Complex64 {
    (z - Complex64::new(0.0, NODE_HEIGHT)) / NODE_HALF_WIDTH
}

fn validation_nodes(n: usize) -> Vec<Complex64> {
    chebyshev_points(n, -0.45, 0.45)
        .into_iter()
        .enumerate()
        .map(|(i, x)| Complex64::new(x, if i % 2 == 0 { 1.25 } else { 1.75 }))
        .collect()
}

/// `p_M = F|_v^{-k} M - F` by interpolation at `k+1` Chebyshev nodes on `Im z = 3/2`.
pub fn period_direct(f: &EichlerIntegral, m: &GroupElement, v: &MultiplierSystem) -> Result<DirectPeriod> {
    let k = f.k as usize;
    let vinv = 1.0 / v.extend(m)?;
    let nodes = standard_grid(k + 1);
    let sampled: Vec<(Complex64, f64)> = nodes.iter().map(|&z| stroke_difference(f, m, vinv, z)).collect();
    let values: Vec<Complex64> = sampled.iter().map(|s| s.0).collect();
    let value_max = values.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let scale_max = sampled.iter().map(|s| s.1).fold(0.0, f64::max);
    if value_max <= 1e-13 * scale_max {
        // F|M = F up to roundoff, e.g. M a translation
        return Ok(DirectPeriod { element: PeriodElement::zero_polynomial(f.k), validation_residual: 0.0, degree_excess: 0.0 });
    }
    let vander = DMatrix::from_fn(k + 1, k + 1, |i, j| node_basis(nodes[i]).powi(j as i32));
    let b = solve_square(vander, &DVector::from_vec(values.clone()))
        .ok_or_else(|| Error::InvalidArgument("singular interpolation system".into()))?;
    let coeffs = shifted_to_monomial(&b, Complex64::new(0.0, NODE_HEIGHT), NODE_HALF_WIDTH);

    let check = validation_nodes(k + 5);
    let mut worst = 0.0f64;
    let mut extra_values = Vec::with_capacity(check.len());
    for &z in &check {
        let (d, scale) = stroke_difference(f, m, vinv, z);
        extra_values.push(d);
        let err = (poly_eval(&coeffs, z) - d).norm();
        worst = worst.max(if scale > 0.0 { err / scale } else { err });
    }

    let all_nodes: Vec<Complex64> = nodes.iter().chain(&check).cloned().collect();
    let all_values: Vec<Complex64> = values.iter().chain(&extra_values).cloned().collect();
    let wide = DMatrix::from_fn(all_nodes.len(), k + 5, |i, j| node_basis(all_nodes[i]).powi(j as i32));
    let ls = least_squares(&wide, &DVector::from_vec(all_values));
    let bmax = ls.solution.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let excess = ls.solution[k + 1..].iter().map(|x| x.norm()).fold(0.0, f64::max);

    if worst > FIT_LIMIT {
        return Err(Error::FitValidation { residual: worst, limit: FIT_LIMIT });
    }
    Ok(DirectPeriod {
        element: PeriodElement::Polynomial(coeffs),
        validation_residual: worst,
        degree_excess: if bmax > 0.0 { excess / bmax } else { 0.0 },
    })
}

/// Integrate the `dim` outputs of `h(s)` over `[lo, ∞)` where `h` decays like `e^{-rate s}`.
fn integrate_to_infinity<F>(h: &F, lo: f64, rate: f64, dim: usize) -> Result<Vec<Complex64>>
where
    F: Fn(f64, &mut [Complex64]),
{
    let hi = lo + 100.0 / rate;
    let mid = lo + 10.0 / rate;
    let mut a = integrate(h, lo, mid, dim, QUAD_TOL)?;
    let b = integrate(h, mid, hi, dim, QUAD_TOL)?;
    for (x, y) in a.iter_mut().zip(&b) {
        *x += y;
    }
    Ok(a)
}

/// The vertical path from `r = V^{-1}∞` to `i∞`, split at height `1/|c|`.
///
/// Calls `weight(tau, out)` for the non-`G` part of the integrand and returns
/// `∫ G(τ) weight(τ) dτ` componentwise. Below the split `G` is evaluated through
/// `G(τ) = u (cτ+d)^{-(k+2)} G(Vτ)` with `u = 1/(multiplier of G at V)`.
fn vertical_integral<W>(
    g: &FourierExpansion,
    vmat: &GroupElement,
    g_weight: f64,
    g_mult: Complex64,
    dim: usize,
    path_weight: W,
) -> Result<Vec<Complex64>>
where
    W: Fn(Complex64, &mut [Complex64]) + Sync,
{
    let c = vmat.c() as f64;
    let r = -(vmat.d() as f64) / c;
    let split = 1.0 / c.abs();
    let lowest = crate::forms::CoefficientSupport::min_exponent(g).unwrap_or(1.0);
    let rate = 2.0 * PI * lowest / g.lambda;
    let ginv = 1.0 / g_mult;
    let scratch_len = dim;

    // upper: τ = r + i t, t >= split
    let upper = |t: f64, out: &mut [Complex64]| {
        let tau = Complex64::new(r, t);
        let mut w = vec![ZERO; scratch_len];
        path_weight(tau, &mut w);
        let gv = g.eval(tau) * Complex64::i();
        for (o, x) in out.iter_mut().zip(&w) {
            *o = gv * x;
        }
    };
    // lower: t = 1/(c^2 s), s >= split; Vτ = a/c + i s
    let a_over_c = vmat.a() as f64 / c;
    let lower = |s: f64, out: &mut [Complex64]| {
        let t = 1.0 / (c * c * s);
        let tau = Complex64::new(r, t);
        let mut w = vec![ZERO; scratch_len];
        path_weight(tau, &mut w);
        let j = Complex64::new(0.0, c * t);
        let gv = ginv * ppow(j, -g_weight) * g.eval(Complex64::new(a_over_c, s));
        let jac = Complex64::i() / (c * c * s * s);
        for (o, x) in out.iter_mut().zip(&w) {
            *o = gv * jac * x;
        }
    };
    let mut up = integrate_to_infinity(&upper, split, rate, dim)?;
    let low = integrate_to_infinity(&lower, split, rate, dim)?;
    for (x, y) in up.iter_mut().zip(&low) {
        *x += y;
    }
    Ok(up)
}

/// The period of the Eichler integral of `g` under `V`, from moments of `g`.
///
/// `g` transforms with the multiplier `v` and weight `k+2`. Integer `k` gives
/// the polynomial `F|_v^{-k} V - F`; other real `k` gives the integral map
/// [`period_integral_literal`] as a function-valued element.
pub fn period_integral(g: &FourierExpansion, vmat: &GroupElement, v: &MultiplierSystem, k: f64) -> Result<PeriodElement> {
    let integer = k >= 0.0 && k.fract() == 0.0;
    if vmat.c() == 0 {
        return Ok(if integer {
            PeriodElement::zero_polynomial(k as u32)
        } else {
            PeriodElement::from_function(function(|_| ZERO), "zero")
        });
    }
    if !integer {
        return Ok(PeriodElement::from_function(period_integral_literal(g, vmat, v, k)?, format!("integral map at {vmat}")));
    }
    let kk = k as usize;
    let c = vmat.c() as f64;
    let r = -(vmat.d() as f64) / c;
    let gm = v.extend(vmat)?;
    // mu_j = ∫ G(τ) (τ - r)^j dτ
    let mu = vertical_integral(g, vmat, k + 2.0, gm, kk + 1, |tau, out| {
        let x = tau - r;
        let mut p = Complex64::new(1.0, 0.0);
        for o in out.iter_mut() {
            *o = p;
            p *= x;
        }
    })?;
    let k_factorial: f64 = (1..=kk).map(|i| i as f64).product();
    let binom = binomial_row(kk);
    // p(z) = (-1)^k/k! sum_j binom(k,j) mu_j (-(z - r))^{k-j}
    let mut shifted = vec![ZERO; kk + 1];
    for j in 0..=kk {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        shifted[kk - j] = mu[j] * binom[j] * sign / k_factorial;
    }
    Ok(PeriodElement::Polynomial(shifted_to_monomial(&shifted, Complex64::new(r, 0.0), 1.0)))
}

/// The integral map evaluated literally:
/// `z ↦ conj( ∫_{V^{-1}∞}^{i∞} G(τ) (τ - conj z)^k dτ )`, with `G` of
/// multiplier `conj v` and weight `k+2`, and principal powers.
pub fn period_integral_literal(g: &FourierExpansion, vmat: &GroupElement, v: &MultiplierSystem, k: f64) -> Result<Function> {
    if vmat.c() == 0 {
        return Ok(function(|_| ZERO));
    }
    let gm = v.extend(vmat)?.conj();
    let g = g.clone();
    let vmat = *vmat;
    Ok(function(move |z: Complex64| {
        let zb = z.conj();
        vertical_integral(&g, &vmat, k + 2.0, gm, 1, |tau, out| out[0] = ppow(tau - zb, k))
            .map(|x| x[0].conj())
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    }))
}

/// Serialized period polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodPolynomialRecord {
    pub weight: f64,
    pub matrix: [i64; 4],
    pub coeffs: ComplexList,
}

impl PeriodPolynomialRecord {
    pub fn new(k: u32, m: &GroupElement, element: &PeriodElement) -> Result<Self> {
        let coeffs = element
            .coeffs()
            .ok_or_else(|| Error::InvalidArgument("only polynomial period elements serialize as coefficients".into()))?;
        Ok(PeriodPolynomialRecord { weight: -(k as f64), matrix: m.entries(), coeffs: ComplexList(coeffs.to_vec()) })
    }
}

/// Max coefficient difference relative to the larger coefficient vector.
pub fn relative_coefficient_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    let n = a.len().max(b.len());
    let get = |v: &[Complex64], i: usize| v.get(i).cloned().unwrap_or(ZERO);
    let scale = a.iter().chain(b).map(|x| x.norm()).fold(0.0, f64::max);
    let gap = (0..n).map(|i| (get(a, i) - get(b, i)).norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        0.0
    } else {
        gap / scale
    }
}
