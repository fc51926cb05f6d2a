//! Generalized Poincaré and Eisenstein series over `Γ∞ \ Γ` and the
//! construction of an automorphic integral from a parabolic cocycle.
//!
//! With `Θ` the coset representatives and `V = [[*, *], [c, d]]`,
//!
//! ```text
//! Ψ(z) = sum_{V ∈ Θ} φ_V(z) conj(w(V)) (cz+d)^{-k'}
//! g(z) = sum_{V ∈ Θ}        conj(w(V)) (cz+d)^{-k'}
//! ```
//!
//! truncated to `c^2 + d^2 <= B`. For `M ∈ Γ` they satisfy
//! `v(M)^{-1} (γz+δ)^k Ψ(Mz) = conj(w(M))^{-1} (γz+δ)^{k'} (Ψ(z) - g(z) φ_M(z))`,
//! so `F = -Ψ/g + φ_0` has `F|M - F = φ_M`.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automorphy::{ppow, MultiplierSystem};
use crate::cohomology::{shift_by_phi0, Cocycle, TRANSLATION_TOL};
use crate::eichler::PeriodElement;
use crate::error::{Error, Result};
use crate::modgroup::{coset_reps_mod_translations, GroupElement};
use crate::summation::{pairwise_sum, pairwise_sum_real};

const CHUNK: usize = 4096;
/// Slack on the fitted constant: the ratio also depends on the direction of `(c, d)`.
const FIT_SAFETY: f64 = 2.0;
/// Refuse `F = -Ψ/g + φ_0` where `|g| < NEAR_ZERO * sum |terms of g|`.
pub const NEAR_ZERO: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub e: f64,
    pub eta: f64,
    pub psi: f64,
}

/// `e = max(ρ/2, σ + k/2)`, `η = 6e - 2k`, `ψ = 2e + 4 + 2α`.
pub fn threshold(rho: f64, sigma: f64, k: f64, alpha: f64) -> ThresholdReport {
    let e = (rho / 2.0).max(sigma + k / 2.0);
    ThresholdReport { e, eta: 6.0 * e - 2.0 * k, psi: 2.0 * e + 4.0 + 2.0 * alpha }
}

/// Smallest even integer exceeding `ψ + 2`.
pub fn select_kprime(psi: f64) -> i32 {
    let mut k = (psi + 2.0).floor() as i32 + 1;
    if k % 2 != 0 {
        k += 1;
    }
    k.max(2)
}

#[derive(Clone, Debug)]
pub struct SeriesConfig {
    pub kprime: i32,
    /// Multiplier of weight `k'`; its modulus need not be 1.
    pub w: MultiplierSystem,
    pub bound: u64,
    pub tolerance: f64,
    pub threshold: ThresholdReport,
    /// Exponent `α` of the multiplier growth `|w(V)| <= K μ(V)^α`.
    pub alpha: f64,
    pub warnings: Vec<String>,
    reps: OnceLock<Arc<Vec<GroupElement>>>,
}

impl SeriesConfig {
    pub fn new(kprime: i32, w: MultiplierSystem, bound: u64, threshold: ThresholdReport, alpha: f64) -> Result<Self> {
        if kprime <= 0 || kprime % 2 != 0 {
            return Err(Error::InvalidArgument(format!("k' must be a positive even integer, got {kprime}")));
        }
        if bound == 0 {
            return Err(Error::InvalidArgument("coset bound B must be positive".into()));
        }
        let mut warnings = Vec::new();
        if (kprime as f64) <= threshold.psi {
            warnings.push(format!("k' = {kprime} does not exceed psi = {}; the series may diverge", threshold.psi));
        }
        if w.weight() != kprime as f64 {
            warnings.push(format!("multiplier weight {} differs from k' = {kprime}", w.weight()));
        }
        if w.extend(&w.group().translation())? != Complex64::new(1.0, 0.0) {
            warnings.push("w is nontrivial on the translation; the coset sum depends on representatives".into());
        }
        Ok(SeriesConfig { kprime, w, bound, tolerance: 1e-8, threshold, alpha, warnings, reps: OnceLock::new() })
    }

    /// Trivial `w` of weight `k'` on the group of `v`, with `k'` chosen from `ψ`.
    pub fn trivial_for(
        group: Arc<crate::modgroup::SubgroupDescriptor>,
        threshold: ThresholdReport,
        bound: u64,
        kprime: Option<i32>,
    ) -> Result<Self> {
        let kp = kprime.unwrap_or_else(|| select_kprime(threshold.psi));
        SeriesConfig::new(kp, MultiplierSystem::trivial(group, kp as f64), bound, threshold, 0.0)
    }

    /// Coset representatives with `c^2 + d^2 <= B` in the fixed order.
    pub fn reps(&self) -> Arc<Vec<GroupElement>> {
        self.reps
            .get_or_init(|| Arc::new(coset_reps_mod_translations(self.w.group(), self.bound)))
            .clone()
    }

    /// Exponent of `c^2 + d^2` in the term bound of `Ψ`.
    pub fn poincare_exponent(&self) -> f64 {
        self.threshold.e + 1.0 + self.alpha - self.kprime as f64 / 2.0
    }

    /// Exponent of `c^2 + d^2` in the term bound of `g`.
    pub fn eisenstein_exponent(&self) -> f64 {
        self.alpha - self.kprime as f64 / 2.0
    }
}

/// Audit of the term bound `|t_V| <= K (c^2 + d^2)^p (|z|^η + y^{-η})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermBoundAudit {
    pub exponent: f64,
    /// `K` fitted on the first tenth of the terms.
    pub k1: f64,
    /// Max `|t_V| / (K (c^2+d^2)^p env)` over the remaining terms; at most 1 when the bound holds.
    pub validation_ratio: f64,
}

impl TermBoundAudit {
    pub fn holds(&self) -> bool {
        self.validation_ratio <= 1.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    /// Fitted-bound estimate of the terms beyond `B`.
    pub tail_estimate: f64,
    /// Floating-point error bound of the summation.
    pub rounding_estimate: f64,
    pub abs_sum: f64,
    pub n_terms: usize,
    pub audit: TermBoundAudit,
}

impl SeriesValue {
    pub fn error_estimate(&self) -> f64 {
        self.tail_estimate + self.rounding_estimate
    }
}

fn envelope(z: Complex64, eta: f64) -> f64 {
    z.norm().powf(eta) + z.im.powf(-eta)
}

/// `(3/π) ∫_B^∞ K Q^p dQ`: the count of representatives up to `Q` grows like `3Q/π`.
fn tail_from_bound(k1: f64, p: f64, b: f64) -> f64 {
    if k1 == 0.0 {
        0.0
    } else if p + 1.0 >= 0.0 {
        f64::INFINITY
    } else {
        (6.0 / PI) * k1 * b.powf(p + 1.0) / (-2.0 * (p + 1.0))
    }
}

struct ChunkSums {
    sums: Vec<Complex64>,
    abs: Vec<f64>,
    fit_ratio: Vec<f64>,
    rest_ratio: Vec<f64>,
}

/// Sum `channels` series at once. `term(V, out)` writes `out[ch * n_points + i]`.
fn sum_series<T>(
    cfg: &SeriesConfig,
    points: &[Complex64],
    exponents: &[f64],
    term: T,
) -> Result<Vec<Vec<SeriesValue>>>
where
    T: Fn(&GroupElement, &mut [Complex64]) -> Result<()> + Sync,
{
    let reps = cfg.reps();
    let n = reps.len();
    let channels = exponents.len();
    let width = channels * points.len();
    let fit_count = (n / 10).max(1);
    let envs: Vec<f64> = points.iter().map(|&z| envelope(z, cfg.threshold.eta)).collect();

    let chunks: Vec<ChunkSums> = reps
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(ci, chunk)| -> Result<ChunkSums> {
            let mut terms = vec![Vec::with_capacity(chunk.len()); width];
            let mut abs_terms = vec![Vec::with_capacity(chunk.len()); width];
            let mut fit_ratio = vec![0.0f64; width];
            let mut rest_ratio = vec![0.0f64; width];
            let mut out = vec![Complex64::new(0.0, 0.0); width];
            for (i, v) in chunk.iter().enumerate() {
                term(v, &mut out)?;
                let q = (v.c() * v.c() + v.d() * v.d()) as f64;
                let in_fit = ci * CHUNK + i < fit_count;
                for (slot, t) in out.iter().enumerate() {
                    let a = t.norm();
                    terms[slot].push(*t);
                    abs_terms[slot].push(a);
                    let ratio = a / (q.powf(exponents[slot / points.len()]) * envs[slot % points.len()]);
                    let target = if in_fit { &mut fit_ratio[slot] } else { &mut rest_ratio[slot] };
                    *target = target.max(ratio);
                }
            }
            Ok(ChunkSums {
                sums: terms.iter().map(|t| pairwise_sum(t)).collect(),
                abs: abs_terms.iter().map(|t| pairwise_sum_real(t)).collect(),
                fit_ratio,
                rest_ratio,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let levels = (n.max(2) as f64).log2().ceil() + 2.0;
    let mut result = Vec::with_capacity(channels);
    for ch in 0..channels {
        let mut row = Vec::with_capacity(points.len());
        for (pi, env) in envs.iter().enumerate() {
            let slot = ch * points.len() + pi;
            let sums: Vec<Complex64> = chunks.iter().map(|c| c.sums[slot]).collect();
            let abs: Vec<f64> = chunks.iter().map(|c| c.abs[slot]).collect();
            let fit = FIT_SAFETY * chunks.iter().map(|c| c.fit_ratio[slot]).fold(0.0, f64::max);
            let rest = chunks.iter().map(|c| c.rest_ratio[slot]).fold(0.0, f64::max);
            let abs_sum = pairwise_sum_real(&abs);
            let exponent = exponents[ch];
            row.push(SeriesValue {
                value: pairwise_sum(&sums),
                tail_estimate: tail_from_bound(fit * env, exponent, cfg.bound as f64),
                rounding_estimate: f64::EPSILON * levels * abs_sum,
                abs_sum,
                n_terms: n,
                audit: TermBoundAudit {
                    exponent,
                    k1: fit,
                    validation_ratio: if fit > 0.0 { rest / fit } else if rest == 0.0 { 0.0 } else { f64::INFINITY },
                },
            });
        }
        result.push(row);
    }
    Ok(result)
}

fn conj_w(cfg: &SeriesConfig, v: &GroupElement) -> Result<Complex64> {
    if cfg.w.is_trivial() {
        Ok(Complex64::new(1.0, 0.0))
    } else {
        Ok(cfg.w.extend(v)?.conj())
    }
}

/// `g` at each point.
pub fn eisenstein_eval_many(cfg: &SeriesConfig, points: &[Complex64]) -> Result<Vec<SeriesValue>> {
    let kp = cfg.kprime;
    let mut out = sum_series(cfg, points, &[cfg.eisenstein_exponent()], |v, out| {
        let wv = conj_w(cfg, v)?;
        for (o, &z) in out.iter_mut().zip(points) {
            *o = wv * v.j(z).powi(-kp);
        }
        Ok(())
    })?;
    Ok(out.remove(0))
}

pub fn eisenstein_eval(cfg: &SeriesConfig, z: Complex64) -> Result<SeriesValue> {
    Ok(eisenstein_eval_many(cfg, &[z])?[0])
}

fn check_translation(phi: &Cocycle) -> Result<()> {
    let t = phi.group().translation();
    let norm = phi.value_at(&t)?.grid_norm();
    let scale = phi.grid_norm();
    if norm > TRANSLATION_TOL * scale && norm > 0.0 {
        return Err(Error::NonzeroTranslationValue { norm });
    }
    Ok(())
}

/// `Ψ` and `g` at each point, from one pass over the representatives.
pub fn poincare_and_eisenstein(
    phi: &Cocycle,
    cfg: &SeriesConfig,
    points: &[Complex64],
) -> Result<(Vec<SeriesValue>, Vec<SeriesValue>)> {
    check_translation(phi)?;
    let kp = cfg.kprime;
    let np = points.len();
    let zero = phi.grid_norm() == 0.0;
    let mut out = sum_series(cfg, points, &[cfg.poincare_exponent(), cfg.eisenstein_exponent()], |v, out| {
        let wv = conj_w(cfg, v)?;
        let word = if zero { Vec::new() } else { phi.group().word_decompose(v)? };
        for (i, &z) in points.iter().enumerate() {
            let base = wv * v.j(z).powi(-kp);
            out[np + i] = base;
            out[i] = if zero { Complex64::new(0.0, 0.0) } else { phi.eval_on_word(&word, z)? * base };
        }
        Ok(())
    })?;
    let g = out.pop().expect("two channels");
    let psi = out.pop().expect("two channels");
    Ok((psi, g))
}

/// `Ψ(φ*)` at each point; requires `φ*_S = 0`.
pub fn poincare_eval_many(phi: &Cocycle, cfg: &SeriesConfig, points: &[Complex64]) -> Result<Vec<SeriesValue>> {
    Ok(poincare_and_eisenstein(phi, cfg, points)?.0)
}

pub fn poincare_eval(phi: &Cocycle, cfg: &SeriesConfig, z: Complex64) -> Result<SeriesValue> {
    Ok(poincare_eval_many(phi, cfg, &[z])?[0])
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformationReport {
    /// Max over samples of `|v(M)^{-1} j^k Ψ(Mz) - conj(w(M))^{-1} j^{k'} (Ψ(z) - g(z) φ_M(z))|`.
    pub residual: f64,
    /// Max over samples of the propagated error estimates of both sides.
    pub error_estimate: f64,
    pub per_point: Vec<(f64, f64)>,
}

pub fn transformation_residual(
    phi: &Cocycle,
    cfg: &SeriesConfig,
    m: &GroupElement,
    samples: &[Complex64],
) -> Result<TransformationReport> {
    let mut points = samples.to_vec();
    points.extend(samples.iter().map(|&z| m.act(z)));
    let (psi, g) = poincare_and_eisenstein(phi, cfg, &points)?;
    let n = samples.len();
    let k = -phi.weight();
    let vinv = 1.0 / phi.multiplier().extend(m)?;
    let winv = 1.0 / conj_w(cfg, m)?;
    let mut per_point = Vec::with_capacity(n);
    for (i, &z) in samples.iter().enumerate() {
        let j = m.j(z);
        let jk = ppow(j, k);
        let jkp = j.powi(cfg.kprime);
        let phim = phi.eval_at(m, z)?;
        let lhs = vinv * jk * psi[n + i].value;
        let rhs = winv * jkp * (psi[i].value - g[i].value * phim);
        let err = jk.norm() * psi[n + i].error_estimate()
            + (winv * jkp).norm() * (psi[i].error_estimate() + phim.norm() * g[i].error_estimate());
        per_point.push(((lhs - rhs).norm(), err));
    }
    Ok(TransformationReport {
        residual: per_point.iter().map(|p| p.0).fold(0.0, f64::max),
        error_estimate: per_point.iter().map(|p| p.1).fold(0.0, f64::max),
        per_point,
    })
}

/// `F = -Ψ(φ*)/g + φ_0` with `φ* = φ - (φ_0|V - φ_0)`.
#[derive(Clone, Debug)]
pub struct AutomorphicIntegral {
    pub phi: Cocycle,
    pub phi_star: Cocycle,
    pub phi0: PeriodElement,
    pub cfg: SeriesConfig,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegralValue {
    pub value: Complex64,
    pub error_estimate: f64,
    pub psi: SeriesValue,
    pub g: SeriesValue,
}

pub fn construct_automorphic_integral(phi: &Cocycle, phi0: &PeriodElement, cfg: SeriesConfig) -> Result<AutomorphicIntegral> {
    let phi_star = shift_by_phi0(phi, phi0)?;
    Ok(AutomorphicIntegral { phi: phi.clone(), phi_star, phi0: phi0.clone(), cfg })
}

impl AutomorphicIntegral {
    pub fn eval_many(&self, points: &[Complex64]) -> Result<Vec<Result<IntegralValue>>> {
        let (psi, g) = poincare_and_eisenstein(&self.phi_star, &self.cfg, points)?;
        Ok(points
            .iter()
            .zip(psi.iter().zip(&g))
            .map(|(&z, (p, gv))| {
                if gv.value.norm() < NEAR_ZERO * gv.abs_sum {
                    return Err(Error::NearZeroDenominator {
                        value: gv.value.norm(),
                        scale: gv.abs_sum,
                        z: format!("{z}"),
                    });
                }
                let fstar = -p.value / gv.value;
                let err = (p.error_estimate() + fstar.norm() * gv.error_estimate()) / gv.value.norm();
                Ok(IntegralValue { value: fstar + self.phi0.eval(z), error_estimate: err, psi: *p, g: *gv })
            })
            .collect())
    }

    pub fn eval(&self, z: Complex64) -> Result<IntegralValue> {
        self.eval_many(&[z])?.remove(0)
    }

    /// `|F|M - F - φ_M|` at each sample, with the propagated error estimate.
    pub fn defining_residual(&self, m: &GroupElement, samples: &[Complex64]) -> Result<TransformationReport> {
        let mut points = samples.to_vec();
        points.extend(samples.iter().map(|&z| m.act(z)));
        let values = self.eval_many(&points)?.into_iter().collect::<Result<Vec<_>>>()?;
        let n = samples.len();
        let k = -self.phi.weight();
        let vinv = 1.0 / self.phi.multiplier().extend(m)?;
        let mut per_point = Vec::with_capacity(n);
        for (i, &z) in samples.iter().enumerate() {
            let jk = ppow(m.j(z), k);
            let lhs = vinv * jk * values[n + i].value - values[i].value;
            let phim = self.phi.eval_at(m, z)?;
            let err = (vinv * jk).norm() * values[n + i].error_estimate + values[i].error_estimate;
            per_point.push(((lhs - phim).norm(), err));
        }
        Ok(TransformationReport {
            residual: per_point.iter().map(|p| p.0).fold(0.0, f64::max),
            error_estimate: per_point.iter().map(|p| p.1).fold(0.0, f64::max),
            per_point,
        })
    }
}

/// CLI-facing report of one series value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesReportRecord {
    pub value: crate::serial::Complex,
    #[serde(rename = "B")]
    pub bound: u64,
    pub tail_estimate: crate::serial::Real,
    pub kprime: i32,
    pub psi: crate::serial::Real,
}

impl SeriesReportRecord {
    pub fn new(v: &SeriesValue, cfg: &SeriesConfig) -> Self {
        SeriesReportRecord {
            value: crate::serial::Complex(v.value),
            bound: cfg.bound,
            tail_estimate: crate::serial::Real(v.error_estimate()),
            kprime: cfg.kprime,
            psi: crate::serial::Real(cfg.threshold.psi),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::coboundary_from;
    use crate::forms::eisenstein_qexp;
    use crate::modgroup::SubgroupDescriptor;

    fn sl2z() -> Arc<SubgroupDescriptor> {
        Arc::new(SubgroupDescriptor::sl2z())
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold(2.0, 1.0, 4.0, 0.0), ThresholdReport { e: 3.0, eta: 10.0, psi: 10.0 });
        assert_eq!(threshold(0.0, 0.0, 0.0, 0.0), ThresholdReport { e: 0.0, eta: 0.0, psi: 4.0 });
        let a = threshold(3.0, 0.5, 10.0, 0.25);
        let b = threshold(3.0, 0.5, 10.0, 1.25);
        assert_eq!(b.psi - a.psi, 2.0);
        assert_eq!(select_kprime(15.0), 18);
        assert_eq!(select_kprime(10.0), 14);
        assert_eq!(select_kprime(9.5), 12);
    }

    #[test]
    fn eisenstein_matches_qexp_and_tail() {
        let cfg = SeriesConfig::trivial_for(sl2z(), threshold(0.0, 0.0, 0.0, 0.0), 20_000, Some(12)).unwrap();
        let z = Complex64::new(0.1, 1.1);
        let g = eisenstein_eval(&cfg, z).unwrap();
        let want = eisenstein_qexp(12, 40).unwrap().eval(z);
        assert!((g.value - want).norm() < 1e-6, "{} vs {want}", g.value);
        let wider = SeriesConfig::trivial_for(sl2z(), cfg.threshold, 40_000, Some(12)).unwrap();
        let g2 = eisenstein_eval(&wider, z).unwrap();
        assert!((g2.value - g.value).norm() <= g.error_estimate());
        assert!(g.audit.holds(), "{:?}", g.audit);
    }

    #[test]
    fn zero_cocycle_series() {
        let v = MultiplierSystem::trivial(sl2z(), -10.0);
        let c = Cocycle::zero(v, 10);
        let cfg = SeriesConfig::trivial_for(sl2z(), threshold(1.0, 0.5, 10.0, 0.0), 2_000, None).unwrap();
        assert_eq!(cfg.kprime, 18);
        let p = poincare_eval(&c, &cfg, Complex64::new(0.0, 2.0)).unwrap();
        assert_eq!(p.value, Complex64::new(0.0, 0.0));
        let f = construct_automorphic_integral(&c, &PeriodElement::zero_polynomial(10), cfg).unwrap();
        assert_eq!(f.eval(Complex64::new(0.3, 1.7)).unwrap().value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn rejects_nonzero_translation_value() {
        let v = MultiplierSystem::trivial(sl2z(), -10.0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 11];
        coeffs[2] = Complex64::new(1.0, 0.0);
        let c = coboundary_from(&PeriodElement::Polynomial(coeffs), v, -10.0).unwrap();
        let cfg = SeriesConfig::trivial_for(sl2z(), threshold(1.0, 0.5, 10.0, 0.0), 100, None).unwrap();
        assert!(matches!(poincare_eval(&c, &cfg, Complex64::i()), Err(Error::NonzeroTranslationValue { .. })));
    }

    #[test]
    fn bit_identical_across_pools() {
        let cfg = SeriesConfig::trivial_for(sl2z(), threshold(0.0, 0.0, 0.0, 0.0), 30_000, Some(12)).unwrap();
        let z = Complex64::new(0.2, 0.9);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| eisenstein_eval(&cfg, z).unwrap().value);
        let b = many.install(|| eisenstein_eval(&cfg, z).unwrap().value);
        assert_eq!((a.re.to_bits(), a.im.to_bits()), (b.re.to_bits(), b.im.to_bits()));
    }
}
