//! Truncated Fourier expansions at `∞` and at finite cusps, and the shipped
//! example forms.
//!
//! An expansion at `∞` is `sum_m a_m e^{2πi(m+κ)z/λ}` over the stored index
//! range. An expansion at a finite cusp `q` is
//! `(z - q)^{-k} sum_m a_m e^{2πi(m+κ)w/λ}` in the local variable
//! `w = -1/(z - q)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::automorphy::{ppow, MultiplierSystem};
use crate::error::{Error, Result};
use crate::modgroup::{Cusp, GroupElement, SubgroupDescriptor};
use crate::serial::ComplexList;
use crate::{function, Function};

const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * PI);

/// A value with an estimate of the truncation error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub tail_estimate: f64,
}

/// `sum_{m = start}^{start + len - 1} a_m e^{2πi(m+κ)z/λ}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierExpansion {
    pub kappa: f64,
    pub lambda: f64,
    pub start: i64,
    pub coeffs: ComplexList,
}

impl FourierExpansion {
    pub fn new(kappa: f64, lambda: f64, start: i64, coeffs: Vec<Complex64>) -> Result<Self> {
        if !(0.0..1.0).contains(&kappa) {
            return Err(Error::InvalidArgument(format!("kappa must lie in [0, 1), got {kappa}")));
        }
        if !(lambda > 0.0) {
            return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
        }
        Ok(FourierExpansion { kappa, lambda, start, coeffs: ComplexList(coeffs) })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs.0
    }

    /// Highest stored index.
    pub fn truncation(&self) -> i64 {
        self.start + self.coeffs.0.len() as i64 - 1
    }

    pub fn coefficient(&self, m: i64) -> Complex64 {
        let i = m - self.start;
        if i < 0 || i as usize >= self.coeffs.0.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs.0[i as usize]
        }
    }

    /// The first `n` stored coefficients.
    pub fn truncated(&self, n: usize) -> FourierExpansion {
        let mut out = self.clone();
        out.coeffs.0.truncate(n);
        out
    }

    /// Frequency `2πi(m+κ)/λ` of index `m`.
    pub fn frequency(&self, m: i64) -> Complex64 {
        TWO_PI_I * ((m as f64 + self.kappa) / self.lambda)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let q = (TWO_PI_I * z / self.lambda).exp();
        let lead = (self.frequency(self.start) * z).exp();
        let horner = self
            .coeffs
            .0
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, a| acc * q + a);
        lead * horner
    }

    /// Value plus an estimate of the omitted tail at the height of `z`.
    pub fn eval_with_tail(&self, z: Complex64) -> Evaluation {
        Evaluation { value: self.eval(z), tail_estimate: self.tail_estimate(z.im) }
    }

    /// Geometric-decay estimate of `sum_{m > M} |a_m| r^{m+κ}`, `r = e^{-2πy/λ}`,
    /// with polynomial coefficient growth read off the last half of the table.
    pub fn tail_estimate(&self, y: f64) -> f64 {
        let n = self.coeffs.0.len();
        if n == 0 {
            return 0.0;
        }
        let r = (-2.0 * PI * y / self.lambda).exp();
        let top = self.truncation() as f64;
        let block_max = |lo: usize, hi: usize| {
            self.coeffs.0[lo.min(n - 1)..hi.clamp(lo.min(n - 1) + 1, n)]
                .iter()
                .map(|a| a.norm())
                .fold(0.0, f64::max)
        };
        let a_hi = block_max(3 * n / 4, n);
        let a_mid = block_max(n / 2, 3 * n / 4);
        let growth = if a_mid > 0.0 && a_hi > 0.0 && n >= 8 {
            ((a_hi / a_mid).ln() / (7.0f64 / 5.0).ln()).clamp(0.0, 20.0)
        } else {
            0.0
        };
        let base = top.max(1.0);
        let mut tail = 0.0;
        let mut term_r = r.powf(top + 1.0 + self.kappa);
        for j in 1..=10_000 {
            let t = a_hi.max(1e-300) * ((top + j as f64) / base).powf(growth) * term_r;
            tail += t;
            if t < 1e-18 * tail.max(f64::MIN_POSITIVE) {
                break;
            }
            term_r *= r;
        }
        if a_hi == 0.0 {
            0.0
        } else {
            tail
        }
    }

    /// `n`-fold termwise derivative.
    pub fn derivative(&self, n: u32) -> FourierExpansion {
        let coeffs = self
            .coeffs
            .0
            .iter()
            .enumerate()
            .map(|(i, a)| a * self.frequency(self.start + i as i64).powu(n))
            .collect();
        FourierExpansion { coeffs: ComplexList(coeffs), ..self.clone() }
    }

    pub fn scaled(&self, s: Complex64) -> FourierExpansion {
        let coeffs = self.coeffs.0.iter().map(|a| a * s).collect();
        FourierExpansion { coeffs: ComplexList(coeffs), ..self.clone() }
    }

    pub fn to_function(&self) -> Function {
        let e = self.clone();
        function(move |z| e.eval(z))
    }
}

/// Smallest exponent `m + κ` among nonzero coefficients.
pub trait CoefficientSupport {
    fn min_exponent(&self) -> Option<f64>;
}

impl CoefficientSupport for FourierExpansion {
    fn min_exponent(&self) -> Option<f64> {
        min_support(self.start, self.kappa, self.coeffs())
    }
}

fn min_support(start: i64, kappa: f64, coeffs: &[Complex64]) -> Option<f64> {
    coeffs
        .iter()
        .position(|a| a.norm() != 0.0)
        .map(|i| (start + i as i64) as f64 + kappa)
}

/// Expansion at a finite cusp; see the module docs for the form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuspExpansion {
    pub cusp: Cusp,
    pub kappa: f64,
    /// Period of the local variable `w = -1/(z - q)`.
    pub lambda: f64,
    pub start: i64,
    pub coeffs: ComplexList,
    pub weight: f64,
    /// Evaluation requires `Im(w)/λ` at or above this height.
    pub valid_height: f64,
}

impl CuspExpansion {
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs.0
    }

    pub fn local_variable(&self, z: Complex64) -> Result<Complex64> {
        let q = self
            .cusp
            .to_f64()
            .ok_or_else(|| Error::InvalidArgument("cusp expansion needs a finite cusp".into()))?;
        let dz = z - q;
        if dz.norm() == 0.0 {
            return Err(Error::InvalidArgument("evaluation point is the cusp itself".into()));
        }
        Ok(-1.0 / dz)
    }

    pub fn eval_at_cusp(&self, z: Complex64) -> Result<Complex64> {
        let w = self.local_variable(z)?;
        if w.im / self.lambda < self.valid_height {
            return Err(Error::BelowValidityHeight { z: format!("{z}"), height: self.valid_height });
        }
        let q = self.cusp.to_f64().expect("finite cusp");
        let series = FourierExpansion {
            kappa: self.kappa,
            lambda: self.lambda,
            start: self.start,
            coeffs: self.coeffs.clone(),
        }
        .eval(w);
        Ok(ppow(z - q, -self.weight) * series)
    }
}

impl CoefficientSupport for CuspExpansion {
    fn min_exponent(&self) -> Option<f64> {
        min_support(self.start, self.kappa, self.coeffs())
    }
}

/// Coefficient-support class of a form from its expansions at all cusps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormClass {
    /// Only exponents `m + κ > 0` everywhere.
    Cusp,
    /// Only exponents `m + κ >= 0` everywhere.
    Entire,
    MeromorphicAtCusps,
}

pub fn classify(expansions: &[&dyn CoefficientSupport]) -> FormClass {
    const EPS: f64 = 1e-12;
    let mins: Vec<f64> = expansions.iter().filter_map(|e| e.min_exponent()).collect();
    if mins.iter().any(|&m| m < -EPS) {
        FormClass::MeromorphicAtCusps
    } else if mins.iter().all(|&m| m > EPS) {
        FormClass::Cusp
    } else {
        FormClass::Entire
    }
}

/// Coefficients of `prod_{n>=1} (1 - q^n)` up to `q^{len-1}` (Euler's pentagonal series).
pub fn euler_product(len: usize) -> Vec<i128> {
    let mut out = vec![0i128; len];
    if len > 0 {
        out[0] = 1;
    }
    for j in 1i64.. {
        let p1 = (j * (3 * j - 1) / 2) as usize;
        if p1 >= len {
            break;
        }
        let sign = if j % 2 == 0 { 1 } else { -1 };
        out[p1] += sign;
        let p2 = (j * (3 * j + 1) / 2) as usize;
        if p2 < len {
            out[p2] += sign;
        }
    }
    out
}

fn mul_trunc(a: &[i128], b: &[i128], len: usize) -> Vec<i128> {
    let mut out = vec![0i128; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Ramanujan `tau(1..=n)`: coefficients of `q prod (1 - q^n)^24`.
pub fn delta_coefficients(n: usize) -> Vec<i128> {
    let p = euler_product(n);
    let p2 = mul_trunc(&p, &p, n);
    let p4 = mul_trunc(&p2, &p2, n);
    let p8 = mul_trunc(&p4, &p4, n);
    let p16 = mul_trunc(&p8, &p8, n);
    mul_trunc(&p16, &p8, n)
}

/// The discriminant `Δ = q prod (1 - q^n)^24` with `n_terms` coefficients from `q^1`.
pub fn delta_expansion(n_terms: usize) -> FourierExpansion {
    let coeffs = delta_coefficients(n_terms.max(1))
        .into_iter()
        .map(|t| Complex64::new(t as f64, 0.0))
        .collect();
    FourierExpansion::new(0.0, 1.0, 1, coeffs).expect("valid parameters")
}

/// Riemann zeta at an integer `s >= 2`.
pub fn zeta(s: i32) -> f64 {
    let n = 2000usize;
    let partial: f64 = (1..=n).rev().map(|m| (m as f64).powi(-s)).sum();
    let nn = n as f64;
    // Euler–Maclaurin correction for the tail beyond n
    partial + nn.powi(1 - s) / (s - 1) as f64 - 0.5 * nn.powi(-s) + s as f64 * nn.powi(-s - 1) / 12.0
}

fn divisor_power_sum(n: u64, p: i32) -> f64 {
    let mut total = 0.0;
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            total += (d as f64).powi(p);
            let e = n / d;
            if e != d {
                total += (e as f64).powi(p);
            }
        }
        d += 1;
    }
    total
}

/// Normalized Eisenstein series `E_k = 1 + C_k sum sigma_{k-1}(n) q^n`
/// with `C_k = -2k/B_k`, `n_terms` coefficients from `q^0`.
pub fn eisenstein_qexp(k: i32, n_terms: usize) -> Result<FourierExpansion> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::InvalidArgument(format!("Eisenstein weight must be even and >= 4, got {k}")));
    }
    let factorial: f64 = (1..k).map(|i| i as f64).product();
    let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let mut c = sign * (2.0 * PI).powi(k) / (factorial * zeta(k));
    if (c - c.round()).abs() < 1e-9 * c.abs() {
        c = c.round();
    }
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for n in 1..n_terms.max(1) as u64 {
        coeffs.push(Complex64::new(c * divisor_power_sum(n, k - 1), 0.0));
    }
    FourierExpansion::new(0.0, 1.0, 0, coeffs)
}

/// `eta(z) = e^{πiz/12} prod_{n <= n_factors} (1 - e^{2πinz})`.
pub fn eta(z: Complex64, n_factors: usize) -> Complex64 {
    let q = (TWO_PI_I * z).exp();
    let mut prod = Complex64::new(1.0, 0.0);
    let mut qn = q;
    for _ in 0..n_factors {
        prod *= 1.0 - qn;
        qn *= q;
        if qn.norm() < 1e-300 {
            break;
        }
    }
    (Complex64::new(0.0, PI / 12.0) * z).exp() * prod
}

/// Move `z` into the standard fundamental domain of `SL2(Z)`.
///
/// Returns `(g, g z)` with `|Re(gz)| <= 1/2` and `|gz| >= 1`.
pub fn reduce_to_fundamental_domain(z: Complex64) -> (GroupElement, Complex64) {
    let mut g = GroupElement::IDENTITY;
    let mut w = z;
    for _ in 0..10_000 {
        let n = w.re.round() as i64;
        if n != 0 {
            let s = GroupElement::translation(-n);
            g = s * g;
            w = s.act(w);
        }
        if w.norm_sqr() < 1.0 - 1e-15 {
            g = GroupElement::T * g;
            w = GroupElement::T.act(w);
        } else {
            break;
        }
    }
    (g, w)
}

/// Evaluate a level-one form of integer weight `k` by reducing `z` to the
/// fundamental domain first: `F(z) = j(g^{-1}, gz)^k F(gz)`.
pub fn eval_level_one(e: &FourierExpansion, k: i32, z: Complex64) -> Complex64 {
    let (g, w) = reduce_to_fundamental_domain(z);
    g.inverse().j(w).powi(k) * e.eval(w)
}

/// Expansion at the finite cusp `q = a/c` of a level-one form of integer
/// weight `k` with trivial multiplier, transported through `g = [[a,b],[c,d]]`:
/// local period `c^2` and coefficients `(-1)^k c^{-k} a_m e^{-2πimd/c}`.
pub fn cusp_expansion_level_one(e: &FourierExpansion, k: i32, q: Cusp) -> Result<CuspExpansion> {
    let Cusp::Rational(a, c) = q else {
        return Err(Error::InvalidArgument("use the expansion at infinity directly".into()));
    };
    if e.kappa != 0.0 || e.lambda != 1.0 {
        return Err(Error::InvalidArgument("level-one transport needs kappa = 0, lambda = 1".into()));
    }
    let (_, x, _) = crate::modgroup::ext_gcd(a, c);
    let d = x;
    let scale = if k % 2 == 0 { 1.0 } else { -1.0 } * (c as f64).powi(-k);
    let coeffs = e
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, am)| {
            let m = e.start + i as i64;
            am * scale * Complex64::from_polar(1.0, -2.0 * PI * ((m * d).rem_euclid(c)) as f64 / c as f64)
        })
        .collect();
    Ok(CuspExpansion {
        cusp: q,
        kappa: 0.0,
        lambda: (c * c) as f64,
        start: e.start,
        coeffs: ComplexList(coeffs),
        weight: k as f64,
        valid_height: 0.5,
    })
}

/// `max_z |F(Mz) - v(M)(cz+d)^k F(z)| / (1 + |F(z)|)`.
pub fn automorphy_residual(
    f: &Function,
    k: f64,
    v: &MultiplierSystem,
    m: &GroupElement,
    samples: &[Complex64],
) -> Result<f64> {
    let vm = v.extend(m)?;
    Ok(samples
        .iter()
        .map(|&z| {
            let fz = f(z);
            (f(m.act(z)) - vm * ppow(m.j(z), k) * fz).norm() / (1.0 + fz.norm())
        })
        .fold(0.0, f64::max))
}

/// Coefficients `a_0..a_{n-1}` (`a_0 = 0`) of the weight-2 newform `eta(z)^2 eta(11z)^2` on `Gamma0(11)`.
pub fn level11_coefficients(n: usize) -> Vec<f64> {
    let p = euler_product(n);
    let p2: Vec<i128> = mul_sparse(&p, &p, n);
    let mut p11 = vec![0i128; n];
    for (i, &x) in p2.iter().enumerate() {
        if 11 * i < n {
            p11[11 * i] = x;
        }
    }
    let mut out = vec![0.0];
    out.extend(mul_sparse(&p2, &p11, n).into_iter().take(n.saturating_sub(1)).map(|x| x as f64));
    out.truncate(n);
    out
}

fn mul_sparse(a: &[i128], b: &[i128], len: usize) -> Vec<i128> {
    let nz: Vec<(usize, i128)> = b.iter().enumerate().filter(|(_, &y)| y != 0).map(|(j, &y)| (j, y)).collect();
    let mut out = vec![0i128; len];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for &(j, y) in &nz {
            if i + j >= len {
                break;
            }
            out[i + j] += x * y;
        }
    }
    out
}

/// The weight-0 antiderivative `I(z) = sum a_n/n q^n` of the level-11 newform.
#[derive(Clone, Debug)]
pub struct Level11Integral {
    coeffs: Vec<f64>,
}

impl Level11Integral {
    pub fn new(n_terms: usize) -> Self {
        let a = level11_coefficients(n_terms + 1);
        let coeffs = (1..=n_terms).map(|n| a[n] / n as f64).collect();
        Level11Integral { coeffs }
    }

    pub fn n_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let q = (TWO_PI_I * z).exp();
        q * self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * q + c)
    }

    /// `I(Mz) - I(z)`, independent of `z`; measured at `z = -d/c + i/|c|`
    /// where `z` and `Mz` share the height `1/|c|`.
    pub fn period(&self, m: &GroupElement) -> Result<Complex64> {
        if m.c() == 0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let c = m.c().abs() as f64;
        let needed = (7.0 * c).ceil() as usize + 40;
        let z = Complex64::new(-(m.d() as f64) / m.c() as f64, 1.0 / c);
        if needed > self.coeffs.len() {
            let wider = Level11Integral::new(needed);
            return Ok(wider.eval(m.act(z)) - wider.eval(z));
        }
        Ok(self.eval(m.act(z)) - self.eval(z))
    }
}

/// A weight-0 generalized modular form on `Gamma0(11)` with no zeros or poles,
/// `E(z) = exp(2πi c I(z))`, and its multiplier `v(M) = exp(2πi c (I(Mz) - I(z)))`.
#[derive(Clone)]
pub struct GmfExample {
    pub c: Complex64,
    pub function: Function,
    pub multiplier: MultiplierSystem,
    pub integral: Arc<Level11Integral>,
}

impl GmfExample {
    /// The multiplier measured directly from the transformation of `E`.
    pub fn measured_multiplier(&self, m: &GroupElement) -> Result<Complex64> {
        Ok((TWO_PI_I * self.c * self.integral.period(m)?).exp())
    }
}

pub fn gmf_example(c: Complex64, n_terms: usize) -> Result<GmfExample> {
    if n_terms < 10 {
        return Err(Error::InvalidArgument(format!("gmf_example needs at least 10 terms, got {n_terms}")));
    }
    let group = Arc::new(SubgroupDescriptor::gamma0(11)?);
    let integral = Arc::new(Level11Integral::new(n_terms));
    let values = group
        .generators()
        .iter()
        .map(|g| Ok((TWO_PI_I * c * integral.period(g)?).exp()))
        .collect::<Result<Vec<_>>>()?;
    let multiplier =
        MultiplierSystem::from_generator_values(group, 0.0, values, format!("gmf_example({}, {})", c.re, c.im))?;
    let f_int = integral.clone();
    let function = function(move |z| (TWO_PI_I * c * f_int.eval(z)).exp());
    Ok(GmfExample { c, function, multiplier, integral })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `prod (1 - q^n)^24` expanded by repeated multiplication with `(1 - q^n)`.
    fn delta_oracle(n: usize) -> Vec<i128> {
        let mut poly = vec![0i128; n];
        poly[0] = 1;
        for m in 1..n {
            for _ in 0..24 {
                for i in (m..n).rev() {
                    poly[i] -= poly[i - m];
                }
            }
        }
        poly
    }

    #[test]
    fn delta_coefficients_match_oracle() {
        let e = delta_expansion(30);
        assert_eq!(e.coefficient(1), Complex64::new(1.0, 0.0));
        assert_eq!(e.coefficient(2), Complex64::new(-24.0, 0.0));
        assert_eq!(e.coefficient(3), Complex64::new(252.0, 0.0));
        let oracle = delta_oracle(30);
        for m in 1..=30 {
            assert_eq!(e.coefficient(m).re, oracle[(m - 1) as usize] as f64, "tau({m})");
        }
    }

    #[test]
    fn eisenstein_coefficients() {
        let e4 = eisenstein_qexp(4, 10).unwrap();
        assert_eq!(e4.coefficient(0), Complex64::new(1.0, 0.0));
        assert_eq!(e4.coefficient(1).re, 240.0);
        assert_eq!(e4.coefficient(2).re, 240.0 * 9.0);
        let e6 = eisenstein_qexp(6, 10).unwrap();
        assert_eq!(e6.coefficient(1).re, -504.0);
        let e12 = eisenstein_qexp(12, 3).unwrap();
        assert!((e12.coefficient(1).re - 65520.0 / 691.0).abs() < 1e-10);
        assert!(eisenstein_qexp(5, 10).is_err());
        assert!(eisenstein_qexp(2, 10).is_err());
    }

    #[test]
    fn single_term_is_constant() {
        let e = FourierExpansion::new(0.0, 1.0, 0, vec![Complex64::new(1.0, 0.0)]).unwrap();
        for z in [Complex64::new(0.1, 0.2), Complex64::new(-3.0, 5.0)] {
            assert!((e.eval(z) - 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn delta_at_i_matches_closed_form() {
        // eta(i) = Gamma(1/4) / (2 pi^{3/4})
        let gamma_quarter = 3.625_609_908_221_908_3_f64;
        let eta_i = gamma_quarter / (2.0 * PI.powf(0.75));
        let want = eta_i.powi(24);
        let got = delta_expansion(60).eval(Complex64::i());
        assert!(((got.re - want) / want).abs() < 1e-10);
        let wider = delta_expansion(120).eval(Complex64::i());
        assert!(((wider - got) / want).norm() < 1e-12);
    }

    #[test]
    fn truncation_doubling_is_stable() {
        let e4 = eisenstein_qexp(4, 60).unwrap();
        let z = Complex64::i();
        assert!((e4.eval(z) - e4.truncated(30).eval(z)).norm() < 1e-12);
        for z in [Complex64::new(0.3, 0.5), Complex64::new(-0.4, 0.7)] {
            for e in [delta_expansion(120), eisenstein_qexp(4, 120).unwrap(), eisenstein_qexp(6, 120).unwrap()] {
                let full = e.eval(z);
                let half = e.truncated(60).eval(z);
                assert!((full - half).norm() < 1e-12 * (1.0 + full.norm()));
            }
        }
    }

    #[test]
    fn tail_estimate_covers_truncation_error() {
        let e = delta_expansion(200);
        for y in [0.3, 0.5, 1.0] {
            let z = Complex64::new(0.1, y);
            let short = e.truncated(40);
            let err = (e.eval(z) - short.eval(z)).norm();
            assert!(err <= short.tail_estimate(y), "y={y}: err {err:e} vs {:e}", short.tail_estimate(y));
        }
    }

    #[test]
    fn classification() {
        let delta = delta_expansion(20);
        assert_eq!(classify(&[&delta]), FormClass::Cusp);
        let e4 = eisenstein_qexp(4, 20).unwrap();
        assert_eq!(classify(&[&e4]), FormClass::Entire);
        let mut zeroed = e4.clone();
        zeroed.coeffs.0[0] = Complex64::new(0.0, 0.0);
        assert_eq!(classify(&[&zeroed]), FormClass::Cusp);
        let polar = FourierExpansion::new(0.0, 1.0, -1, vec![1.0.into(), 0.0.into(), 3.0.into()]).unwrap();
        assert_eq!(classify(&[&polar]), FormClass::MeromorphicAtCusps);
    }

    #[test]
    fn fundamental_domain_reduction() {
        for z in [Complex64::new(0.37, 0.01), Complex64::new(-5.2, 0.003), Complex64::new(0.5, 0.5)] {
            let (g, w) = reduce_to_fundamental_domain(z);
            assert!(w.re.abs() <= 0.5 + 1e-12 && w.norm() >= 1.0 - 1e-12);
            assert!((g.act(z) - w).norm() < 1e-9 * (1.0 + w.norm()));
        }
    }

    #[test]
    fn cusp_expansion_pullback_matches_reduced_evaluation() {
        let delta = delta_expansion(80);
        for q in [Cusp::Rational(0, 1), Cusp::Rational(1, 2), Cusp::Rational(2, 3), Cusp::Rational(-1, 3)] {
            let ce = cusp_expansion_level_one(&delta, 12, q).unwrap();
            let qf = q.to_f64().unwrap();
            let lambda = ce.lambda;
            for (dx, y) in [(0.0, 0.2 / lambda), (0.05 / lambda, 0.3 / lambda), (-0.02 / lambda, 0.5 / lambda)] {
                let z = Complex64::new(qf + dx, y);
                let direct = eval_level_one(&delta, 12, z);
                let via = ce.eval_at_cusp(z).unwrap();
                assert!((direct - via).norm() <= 1e-8 * direct.norm().max(1e-300), "q={q}: {direct} vs {via}");
            }
        }
    }

    #[test]
    fn cusp_expansion_refuses_low_points_and_decays() {
        let delta = delta_expansion(40);
        let ce = cusp_expansion_level_one(&delta, 12, Cusp::Rational(0, 1)).unwrap();
        assert!(matches!(ce.eval_at_cusp(Complex64::new(0.0, 3.0)), Err(Error::BelowValidityHeight { .. })));
        assert!(ce.eval_at_cusp(Complex64::new(0.0, 0.0)).is_err());
        // weight 0 cusp-class expansion: values shrink as z approaches q vertically
        let flat = CuspExpansion { weight: 0.0, ..ce };
        let vals: Vec<f64> = [0.5, 0.25, 0.1]
            .iter()
            .map(|&y| flat.eval_at_cusp(Complex64::new(0.0, y)).unwrap().norm())
            .collect();
        assert!(vals[0] > vals[1] && vals[1] > vals[2]);
        let unit = CuspExpansion { coeffs: ComplexList(vec![1.0.into()]), start: 0, ..flat };
        assert!((unit.eval_at_cusp(Complex64::new(0.2, 0.3)).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn level11_coefficients_known_values() {
        // a_p for the elliptic curve 11a: a_2 = -2, a_3 = -1, a_5 = 1, a_7 = -2, a_11 = 1
        let a = level11_coefficients(14);
        assert_eq!(&a[1..8], &[1.0, -2.0, -1.0, 2.0, 1.0, 2.0, -2.0]);
        assert_eq!(a[11], 1.0);
        assert_eq!(a[13], 4.0);
    }

    #[test]
    fn residual_sanity_direction() {
        let g = Arc::new(SubgroupDescriptor::sl2z());
        let v = MultiplierSystem::trivial(g, 12.0);
        let delta = delta_expansion(60).to_function();
        let pts: Vec<Complex64> = (0..5).map(|i| Complex64::new(-0.4 + 0.2 * i as f64, 0.8)).collect();
        assert!(automorphy_residual(&delta, 12.0, &v, &GroupElement::S, &pts).unwrap() < 1e-12);
        let ident = function(|z| z);
        assert!(automorphy_residual(&ident, 12.0, &v, &GroupElement::T, &pts).unwrap() > 0.1);
    }

    #[test]
    fn gmf_with_zero_parameter_is_trivial() {
        let ex = gmf_example(Complex64::new(0.0, 0.0), 20).unwrap();
        assert!((ex.function)(Complex64::new(0.1, 0.4)) == Complex64::new(1.0, 0.0));
        assert!(ex.multiplier.generator_values().iter().all(|v| *v == Complex64::new(1.0, 0.0)));
        assert!(gmf_example(Complex64::new(1.0, 0.0), 5).is_err());
    }
}
