//! Cocycles on the generators of a group, coboundary and parabolicity tests,
//! the `φ_S = 0` normalization, and growth-space membership checks.
//!
//! A cocycle assigns `ρ_g` to each generator `g` and extends to words through
//! `ρ_{M1 M2} = ρ_{M1} | M2 + ρ_{M2}`, where `|` is the weight `-k` stroke with
//! the cocycle's multiplier.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::automorphy::{ppow, MultiplierSystem};
use crate::eichler::{period_integral, standard_grid, PeriodElement};
use crate::error::{Error, Result};
use crate::forms::FourierExpansion;
use crate::linalg::{chebyshev_points, least_squares};
use crate::modgroup::{CuspData, GroupElement, SubgroupDescriptor};
use crate::serial::{ComplexList, Real};
use crate::{function, Function};

/// Verdict thresholds on the relative residual.
pub const COBOUNDARY_RESIDUAL: f64 = 1e-8;
pub const NOT_COBOUNDARY_RESIDUAL: f64 = 1e-2;
pub const CONDITION_LIMIT: f64 = 1e8;
/// Largest accepted relative size of `φ*_S` before it is set to zero.
pub const TRANSLATION_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Cocycle {
    weight: f64,
    multiplier: MultiplierSystem,
    values: Vec<PeriodElement>,
    /// `ρ_{g^{-1}} = -ρ_g | g^{-1}` per generator.
    inverses: Vec<PeriodElement>,
    zero: Vec<bool>,
}

fn is_zero(p: &PeriodElement) -> bool {
    p.coeffs().is_some_and(|c| c.iter().all(|x| x.norm() == 0.0))
}

impl Cocycle {
    pub fn new(multiplier: MultiplierSystem, weight: f64, values: Vec<PeriodElement>) -> Result<Self> {
        let n = multiplier.group().generators().len();
        if values.len() != n {
            return Err(Error::InvalidArgument(format!("cocycle needs {n} generator values, got {}", values.len())));
        }
        let inverses = values
            .iter()
            .zip(multiplier.group().generators())
            .map(|(p, g)| Ok(p.slash(&g.inverse(), weight, &multiplier)?.scale(Complex64::new(-1.0, 0.0))))
            .collect::<Result<Vec<_>>>()?;
        let zero = values.iter().map(is_zero).collect();
        Ok(Cocycle { weight, multiplier, values, inverses, zero })
    }

    /// The zero cocycle of weight `-k`.
    pub fn zero(multiplier: MultiplierSystem, k: u32) -> Self {
        let n = multiplier.group().generators().len();
        Cocycle::new(multiplier, -(k as f64), vec![PeriodElement::zero_polynomial(k); n]).expect("zero cocycle")
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn multiplier(&self) -> &MultiplierSystem {
        &self.multiplier
    }

    pub fn group(&self) -> &Arc<SubgroupDescriptor> {
        self.multiplier.group()
    }

    pub fn generator_values(&self) -> &[PeriodElement] {
        &self.values
    }

    fn letter(&self, g: usize, inverse: bool) -> Result<PeriodElement> {
        Ok(if inverse { self.inverses[g].clone() } else { self.values[g].clone() })
    }

    /// `ρ_W(z)` for the product `W` of a word, evaluated pointwise from the
    /// right: `ρ_{L R}(z) = v(R)^{-1} (c_R z + d_R)^k ρ_L(R z) + ρ_R(z)`.
    pub fn eval_on_word(&self, word: &[(usize, i64)], z: Complex64) -> Result<Complex64> {
        let k = -self.weight;
        let trivial = self.multiplier.is_trivial();
        let gens = self.group().generators();
        let mut r = GroupElement::IDENTITY;
        let mut vr = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for &(g, e) in word.iter().rev() {
            let inverse = e < 0;
            let letter = if inverse { gens[g].inverse() } else { gens[g] };
            if self.zero[g] && trivial {
                r = letter.pow(e.abs()) * r;
                continue;
            }
            let element = if inverse { &self.inverses[g] } else { &self.values[g] };
            let vl = if trivial { Complex64::new(1.0, 0.0) } else { self.multiplier.extend(&letter)? };
            for _ in 0..e.unsigned_abs() {
                if !self.zero[g] {
                    acc += ppow(r.j(z), k) / vr * element.eval(r.act(z));
                }
                if !trivial {
                    vr = vl * vr * self.multiplier.factor(&letter, &r, self.multiplier.weight())?;
                }
                r = letter * r;
            }
        }
        Ok(acc)
    }

    /// [`Cocycle::eval_on_word`] on the canonical word of `m`.
    pub fn eval_at(&self, m: &GroupElement, z: Complex64) -> Result<Complex64> {
        let word = self.group().word_decompose(m)?;
        self.eval_on_word(&word, z)
    }

    /// The value on a word of `(generator, exponent)` letters.
    pub fn value_on_word(&self, word: &[(usize, i64)]) -> Result<PeriodElement> {
        let k = (-self.weight).max(0.0).ceil() as u32;
        let mut acc: Option<PeriodElement> = None;
        for &(g, e) in word {
            let letter = self.letter(g, e < 0)?;
            let gm = if e < 0 { self.group().generators()[g].inverse() } else { self.group().generators()[g] };
            for _ in 0..e.unsigned_abs() {
                acc = Some(match acc {
                    None => letter.clone(),
                    Some(prev) => prev.slash(&gm, self.weight, &self.multiplier)?.add(&letter),
                });
            }
        }
        Ok(acc.unwrap_or_else(|| PeriodElement::zero_polynomial(k)))
    }

    /// The value on a group element through its canonical word.
    pub fn value_at(&self, m: &GroupElement) -> Result<PeriodElement> {
        let word = self.group().word_decompose(m)?;
        self.value_on_word(&word)
    }

    pub fn scale(&self, s: Complex64) -> Cocycle {
        let values = self.values.iter().map(|p| p.scale(s)).collect();
        Cocycle::new(self.multiplier.clone(), self.weight, values).expect("same shape")
    }

    pub fn add(&self, other: &Cocycle) -> Cocycle {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.add(b)).collect();
        Cocycle::new(self.multiplier.clone(), self.weight, values).expect("same shape")
    }

    /// Sup-norm of the generator values on the standard grid.
    pub fn grid_norm(&self) -> f64 {
        self.values.iter().map(|p| p.grid_norm()).fold(0.0, f64::max)
    }
}

/// The coboundary `ρ_M = ρ|M - ρ`.
pub fn coboundary_from(rho: &PeriodElement, multiplier: MultiplierSystem, weight: f64) -> Result<Cocycle> {
    let values = multiplier
        .group()
        .generators()
        .iter()
        .map(|g| Ok(rho.slash(g, weight, &multiplier)?.sub(rho)))
        .collect::<Result<Vec<_>>>()?;
    Cocycle::new(multiplier, weight, values)
}

/// The period cocycle `g ↦ p_g` of a cusp form `G` of weight `k+2`.
pub fn period_cocycle(g: &FourierExpansion, multiplier: MultiplierSystem, k: f64) -> Result<Cocycle> {
    let values = multiplier
        .group()
        .generators()
        .iter()
        .map(|gen| period_integral(g, gen, &multiplier, k))
        .collect::<Result<Vec<_>>>()?;
    Cocycle::new(multiplier, -k, values)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConsistencyReport {
    /// Max sup-grid norm of `ρ_{M1M2} - ρ_{M1}|M2 - ρ_{M2}`.
    pub absolute: f64,
    /// The same, divided by the largest sup-grid norm among the three terms
    /// and the generator values.
    pub relative: f64,
}

/// Path independence on `trials` random pairs of words of length at most 4:
/// `ρ_{M1M2}` is taken from the canonical word of the product matrix.
pub fn cocycle_consistency_check(c: &Cocycle, trials: usize, seed: u64) -> Result<ConsistencyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = standard_grid(10);
    let floor = c.grid_norm();
    let mut report = ConsistencyReport { absolute: 0.0, relative: 0.0 };
    for _ in 0..trials {
        let l1 = rng.gen_range(1..=4);
        let l2 = rng.gen_range(1..=4);
        let (w1, m1) = c.group().random_word(&mut rng, l1);
        let (w2, m2) = c.group().random_word(&mut rng, l2);
        let whole = c.value_at(&(m1 * m2))?;
        let left = c.value_on_word(&w1)?.slash(&m2, c.weight, &c.multiplier)?;
        let right = c.value_on_word(&w2)?;
        let mut diff = 0.0f64;
        let mut scale = floor;
        for &z in &grid {
            let (a, b, d) = (whole.eval(z), left.eval(z), right.eval(z));
            diff = diff.max((a - b - d).norm());
            scale = scale.max(a.norm()).max(b.norm()).max(d.norm());
        }
        report.absolute = report.absolute.max(diff);
        report.relative = report.relative.max(if scale > 0.0 { diff / scale } else { 0.0 });
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Coboundary,
    NotCoboundary,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Coboundary => "coboundary",
            Verdict::NotCoboundary => "not-coboundary",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug)]
pub struct CoboundaryCertificate {
    pub rho: PeriodElement,
    /// `||A ρ - b|| / ||b||`, coefficientwise for polynomials, else on a grid.
    pub residual: f64,
    pub condition: f64,
    pub verdict: Verdict,
    /// Set when the trial space is not a basis of the full space, so a
    /// negative verdict is evidence only.
    pub restricted_trial_space: bool,
}

fn decide(residual: f64, condition: f64) -> Verdict {
    if residual < COBOUNDARY_RESIDUAL {
        Verdict::Coboundary
    } else if residual > NOT_COBOUNDARY_RESIDUAL && condition < CONDITION_LIMIT {
        Verdict::NotCoboundary
    } else {
        Verdict::Inconclusive
    }
}

/// Targets below this fraction of the cocycle's sup-grid norm count as zero.
pub const ZERO_TARGET: f64 = 1e-11;

/// Three rows of Chebyshev points at heights `1.25, 1.5, 1.75`.
fn solve_grid(n: usize) -> Vec<Complex64> {
    let xs = chebyshev_points(n, -0.5, 0.5);
    [1.25, 1.5, 1.75]
        .iter()
        .flat_map(|&y| xs.iter().map(move |&x| Complex64::new(x, y)))
        .collect()
}

/// Trial space for `ρ`: monomials of degree `<= k` for integer weight `-k`,
/// otherwise monomials up to `ceil(k)` together with the cocycle's own values.
fn trial_basis(c: &Cocycle, extra: &[PeriodElement]) -> (Vec<PeriodElement>, bool) {
    let k = -c.weight;
    let integer = k >= 0.0 && k.fract() == 0.0;
    let top = k.max(0.0).ceil() as usize;
    let mut basis: Vec<PeriodElement> = (0..=top)
        .map(|j| {
            let mut coeffs = vec![Complex64::new(0.0, 0.0); top + 1];
            coeffs[j] = Complex64::new(1.0, 0.0);
            PeriodElement::Polynomial(coeffs)
        })
        .collect();
    if !integer {
        basis.extend(extra.iter().cloned());
    }
    (basis, !integer)
}

/// Least-squares solve of `ρ|M - ρ = target_M` simultaneously over `relations`.
fn solve_relations(c: &Cocycle, relations: &[(GroupElement, PeriodElement)]) -> Result<CoboundaryCertificate> {
    let extra: Vec<PeriodElement> = relations.iter().map(|r| r.1.clone()).collect();
    let (basis, restricted) = trial_basis(c, &extra);
    let top = (-c.weight).max(0.0).ceil() as usize;
    let polynomial = !restricted
        && relations.iter().all(|(_, t)| t.coeffs().is_some_and(|x| x.len() <= top + 1));
    // polynomial data is compared coefficientwise, everything else on a grid
    let grid = solve_grid(basis.len().max(10));
    let per = if polynomial { top + 1 } else { grid.len() };
    let sample = |p: &PeriodElement, out: &mut dyn FnMut(usize, Complex64)| {
        if polynomial {
            let coeffs = p.coeffs().expect("polynomial");
            for i in 0..per {
                out(i, coeffs.get(i).cloned().unwrap_or_default());
            }
        } else {
            for (i, &z) in grid.iter().enumerate() {
                out(i, p.eval(z));
            }
        }
    };
    let rows = per * relations.len();
    let mut a = DMatrix::zeros(rows, basis.len());
    let mut b = DVector::zeros(rows);
    for (r, (m, target)) in relations.iter().enumerate() {
        for (j, e) in basis.iter().enumerate() {
            let image = e.slash(m, c.weight, &c.multiplier)?.sub(e);
            sample(&image, &mut |i, x| a[(r * per + i, j)] = x);
        }
        sample(target, &mut |i, x| b[r * per + i] = x);
    }
    // a target at roundoff relative to the cocycle is zero; dividing by it would not be
    let negligible = b.iter().map(|x| x.norm()).fold(0.0, f64::max) / c.grid_norm().max(f64::MIN_POSITIVE);
    if b.norm() == 0.0 || negligible <= ZERO_TARGET {
        let top = (-c.weight).max(0.0).ceil() as u32;
        return Ok(CoboundaryCertificate {
            rho: PeriodElement::zero_polynomial(top),
            residual: if b.norm() == 0.0 { 0.0 } else { negligible },
            condition: 1.0,
            verdict: Verdict::Coboundary,
            restricted_trial_space: restricted,
        });
    }
    let ls = least_squares(&a, &b);
    let mut rho = basis[0].scale(ls.solution[0]);
    for (e, x) in basis.iter().zip(&ls.solution).skip(1) {
        rho = rho.add(&e.scale(*x));
    }
    Ok(CoboundaryCertificate {
        rho,
        residual: ls.relative_residual,
        condition: ls.condition,
        verdict: decide(ls.relative_residual, ls.condition),
        restricted_trial_space: restricted,
    })
}

/// Is `c` a coboundary `ρ|M - ρ` on every generator?
pub fn coboundary_test(c: &Cocycle) -> Result<CoboundaryCertificate> {
    let relations: Vec<(GroupElement, PeriodElement)> =
        c.group().generators().iter().cloned().zip(c.values.iter().cloned()).collect();
    solve_relations(c, &relations)
}

/// One single-relation solve `ρ_h|Q_h - ρ_h = ρ_{Q_h}` per cusp.
pub fn parabolic_test(c: &Cocycle, cusps: &[CuspData]) -> Result<Vec<CoboundaryCertificate>> {
    cusps
        .iter()
        .map(|cd| {
            let value = c.value_at(&cd.generator)?;
            solve_relations(c, &[(cd.generator, value)])
        })
        .collect()
}

/// `φ*_V = φ_V - (φ_0|V - φ_0)`, with the translation value then set to zero.
pub fn shift_by_phi0(c: &Cocycle, phi0: &PeriodElement) -> Result<Cocycle> {
    let shift = coboundary_from(phi0, c.multiplier.clone(), c.weight)?;
    let mut out = c.add(&shift.scale(Complex64::new(-1.0, 0.0)));
    let translation = c.group().translation();
    let residual = out.value_at(&translation)?.grid_norm();
    let scale = c.grid_norm().max(shift.grid_norm());
    if residual > TRANSLATION_TOL * scale.max(f64::MIN_POSITIVE) && residual > 0.0 {
        return Err(Error::NonzeroTranslationValue { norm: residual });
    }
    if let Some(i) = c.group().generators().iter().position(|g| *g == translation) {
        let top = (-c.weight).max(0.0).ceil() as u32;
        let mut values = out.values.clone();
        values[i] = match &values[i] {
            PeriodElement::Polynomial(_) => PeriodElement::zero_polynomial(top),
            PeriodElement::Sampled(_) => PeriodElement::from_function(function(|_| Complex64::new(0.0, 0.0)), "zero"),
        };
        out = Cocycle::new(out.multiplier.clone(), out.weight, values)?;
    }
    Ok(out)
}

/// Constants of the bound `|f(z)| < K (|z|^ρ + y^{-σ})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthProfile {
    pub k: f64,
    pub rho: f64,
    pub sigma: f64,
}

impl GrowthProfile {
    pub fn new(k: f64, rho: f64, sigma: f64) -> Result<Self> {
        if !(k > 0.0 && rho > 0.0 && sigma > 0.0) {
            return Err(Error::InvalidArgument(format!("growth profile needs positive constants, got ({k}, {rho}, {sigma})")));
        }
        Ok(GrowthProfile { k, rho, sigma })
    }

    pub fn envelope(&self, z: Complex64) -> f64 {
        z.norm().powf(self.rho) + z.im.powf(-self.sigma)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthCheck {
    pub holds: bool,
    /// `max |f(z)| / (|z|^ρ + y^{-σ})`.
    pub worst_ratio: f64,
}

pub fn growth_membership_check(f: &Function, profile: &GrowthProfile, samples: &[Complex64]) -> GrowthCheck {
    let worst_ratio = samples
        .iter()
        .map(|&z| f(z).norm() / profile.envelope(z))
        .fold(0.0, f64::max);
    GrowthCheck { holds: worst_ratio < profile.k, worst_ratio }
}

/// `n` points with `|x| <= 10` and log-uniform heights in `[1e-2, 1e2]`.
pub fn growth_samples(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let x = rng.gen_range(-10.0..=10.0);
            let y = 10f64.powf(rng.gen_range(-2.0..=2.0));
            Complex64::new(x, y)
        })
        .collect()
}

/// Fit `(ρ, σ)` from log-slopes of `|f|` on the training points, rounded up to a
/// multiple of 1/2 plus a margin of 1/2, and take `K` as twice the worst ratio.
pub fn fit_growth_profile(f: &Function, training: &[Complex64]) -> Result<GrowthProfile> {
    let values: Vec<(Complex64, f64)> = training.iter().map(|&z| (z, f(z).norm())).collect();
    let slope = |pts: Vec<(f64, f64)>| -> f64 {
        let n = pts.len() as f64;
        if pts.len() < 2 {
            return 0.0;
        }
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        if sxx > 0.0 {
            sxy / sxx
        } else {
            0.0
        }
    };
    let log_or_floor = |v: f64| v.max(1e-300).ln();
    let high: Vec<(f64, f64)> = values
        .iter()
        .filter(|(z, _)| z.im >= 1.0)
        .map(|(z, v)| (z.norm().ln(), log_or_floor(*v)))
        .collect();
    let low: Vec<(f64, f64)> = values
        .iter()
        .filter(|(z, _)| z.im < 0.1)
        .map(|(z, v)| (-z.im.ln(), log_or_floor(*v)))
        .collect();
    let round_up = |s: f64| ((s.max(0.0) * 2.0).ceil() / 2.0) + 0.5;
    let rho = round_up(slope(high));
    let sigma = round_up(slope(low));
    let provisional = GrowthProfile { k: 1.0, rho, sigma };
    let worst = values.iter().map(|(z, v)| v / provisional.envelope(*z)).fold(0.0, f64::max);
    GrowthProfile::new(2.0 * worst.max(f64::MIN_POSITIVE), rho, sigma)
}

/// Serialized form of a cocycle with polynomial values on the generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CocycleRecord {
    pub group: String,
    pub weight: Real,
    pub multiplier_values: ComplexList,
    pub generators: Vec<String>,
    pub values: Vec<ComplexList>,
}

impl CocycleRecord {
    pub fn from_cocycle(c: &Cocycle) -> Result<Self> {
        let values = c
            .values
            .iter()
            .map(|p| {
                p.coeffs()
                    .map(|x| ComplexList(x.to_vec()))
                    .ok_or_else(|| Error::InvalidArgument("only polynomial cocycles serialize".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CocycleRecord {
            group: c.group().kind().to_string(),
            weight: Real(c.weight),
            multiplier_values: ComplexList(c.multiplier.generator_values().to_vec()),
            generators: c.group().generator_names().to_vec(),
            values,
        })
    }

    pub fn to_cocycle(&self) -> Result<Cocycle> {
        let kind = self.group.parse()?;
        let group = Arc::new(SubgroupDescriptor::from_kind(kind)?);
        if self.generators != group.generator_names() {
            return Err(Error::Parse(format!(
                "generator names {:?} do not match {} generators {:?}",
                self.generators,
                self.group,
                group.generator_names()
            )));
        }
        let multiplier =
            MultiplierSystem::from_generator_values(group, self.weight.0, self.multiplier_values.0.clone(), "file")?;
        let values = self.values.iter().map(|c| PeriodElement::Polynomial(c.0.clone())).collect();
        Cocycle::new(multiplier, self.weight.0, values)
    }
}

/// Serialized certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub verdict: Verdict,
    pub residual: Real,
    pub condition: Real,
    pub rho: PeriodElementRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PeriodElementRecord {
    Polynomial { coeffs: ComplexList },
    Sampled { grid: ComplexList, values: ComplexList },
}

impl From<&PeriodElement> for PeriodElementRecord {
    fn from(p: &PeriodElement) -> Self {
        match p {
            PeriodElement::Polynomial(c) => PeriodElementRecord::Polynomial { coeffs: ComplexList(c.clone()) },
            PeriodElement::Sampled(s) => PeriodElementRecord::Sampled {
                grid: ComplexList(s.grid.clone()),
                values: ComplexList(s.values.clone()),
            },
        }
    }
}

impl From<&CoboundaryCertificate> for CertificateRecord {
    fn from(c: &CoboundaryCertificate) -> Self {
        CertificateRecord {
            verdict: c.verdict,
            residual: Real(c.residual),
            condition: Real(c.condition),
            rho: (&c.rho).into(),
        }
    }
}
