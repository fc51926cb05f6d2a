//! Real-weight powers, multiplier systems and the stroke operator.
//!
//! Powers use the principal branch `w^k = |w|^k e^{ik arg w}` with
//! `-π <= arg w < π`. A multiplier system is given by its values on the
//! generators of a [`SubgroupDescriptor`] and extended to arbitrary elements
//! through the consistency condition
//!
//! ```text
//! v(M1 M2) = v(M1) v(M2) (c1 M2 z + d1)^k (c2 z + d2)^k / (c3 z + d3)^k
//! ```
//!
//! where the ratio on the right does not depend on `z`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::modgroup::{GroupElement, SubgroupDescriptor};
use crate::Function;

/// Tolerance for algebraic identities.
pub const ALGEBRAIC_TOL: f64 = 1e-12;

fn integer_weight(k: f64) -> Option<i32> {
    (k.fract() == 0.0 && k.abs() < i32::MAX as f64).then_some(k as i32)
}

/// The argument of `w` in `[-π, π)`.
pub fn principal_arg(w: Complex64) -> f64 {
    let t = w.arg();
    if t >= PI {
        -PI
    } else {
        t
    }
}

/// `w^k` on the principal branch. Rejects `w = 0`.
pub fn principal_power(w: Complex64, k: f64) -> Result<Complex64> {
    if w == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroPower);
    }
    Ok(ppow(w, k))
}

/// [`principal_power`] without the zero check; returns NaN for `w = 0, k < 0`.
pub(crate) fn ppow(w: Complex64, k: f64) -> Complex64 {
    if let Some(n) = integer_weight(k) {
        return w.powi(n);
    }
    Complex64::from_polar(w.norm().powf(k), k * principal_arg(w))
}

fn raw_factor(m1: &GroupElement, m2: &GroupElement, k: f64, z: Complex64) -> Complex64 {
    let m3 = *m1 * *m2;
    ppow(m1.j(m2.act(z)), k) * ppow(m2.j(z), k) / ppow(m3.j(z), k)
}

/// The `z`-independent ratio `(c1 M2 z + d1)^k (c2 z + d2)^k / (c3 z + d3)^k`.
///
/// Evaluated at `z = i` and checked against `z = 2i`; a modulus away from 1 or
/// a dependence on `z` indicates a branch bug and is reported as an error.
pub fn consistency_factor(m1: &GroupElement, m2: &GroupElement, k: f64) -> Result<Complex64> {
    let value = raw_factor(m1, m2, k, Complex64::i());
    let modulus = value.norm();
    if (modulus - 1.0).abs() > ALGEBRAIC_TOL {
        return Err(Error::BranchModulus { m1: *m1, m2: *m2, modulus });
    }
    let other = raw_factor(m1, m2, k, Complex64::new(0.0, 2.0));
    let difference = (other - value).norm();
    if difference > ALGEBRAIC_TOL {
        return Err(Error::BranchDependence { m1: *m1, m2: *m2, difference });
    }
    Ok(value)
}

/// `consistency_factor` evaluated at an arbitrary point, without checks.
pub fn consistency_factor_at(m1: &GroupElement, m2: &GroupElement, k: f64, z: Complex64) -> Complex64 {
    raw_factor(m1, m2, k, z)
}

struct Inner {
    weight: f64,
    group: Arc<SubgroupDescriptor>,
    generator_values: Vec<Complex64>,
    label: String,
    cache: RwLock<HashMap<GroupElement, Complex64>>,
}

/// A multiplier system of real weight on a subgroup of `SL2(Z)`.
///
/// Cloning is cheap and clones share the value cache.
#[derive(Clone)]
pub struct MultiplierSystem {
    inner: Arc<Inner>,
}

impl std::fmt::Debug for MultiplierSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MultiplierSystem")
            .field("label", &self.inner.label)
            .field("weight", &self.inner.weight)
            .field("group", &self.inner.group.kind())
            .field("generator_values", &self.inner.generator_values)
            .finish()
    }
}

impl MultiplierSystem {
    pub fn from_generator_values(
        group: Arc<SubgroupDescriptor>,
        weight: f64,
        values: Vec<Complex64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if values.len() != group.generators().len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} generator values, got {}",
                group.generators().len(),
                values.len()
            )));
        }
        if values.iter().any(|v| v.norm() == 0.0 || !v.is_finite()) {
            return Err(Error::InvalidArgument("multiplier values must be finite and nonzero".into()));
        }
        Ok(MultiplierSystem {
            inner: Arc::new(Inner {
                weight,
                group,
                generator_values: values,
                label: label.into(),
                cache: RwLock::new(HashMap::new()),
            }),
        })
    }

    /// All generator values 1. Consistent for even integer weight, and for any
    /// integer weight on groups whose generators avoid `-I` relations.
    pub fn trivial(group: Arc<SubgroupDescriptor>, weight: f64) -> Self {
        let n = group.generators().len();
        Self::from_generator_values(group, weight, vec![Complex64::new(1.0, 0.0); n], "trivial")
            .expect("trivial values are valid")
    }

    /// The multiplier of `eta^s` on `SL2(Z)`, weight `s/2`:
    /// `v(S) = e^{πis/12}`, `v(T) = e^{-πis/4}`.
    pub fn eta_power(s: f64) -> Self {
        let values = vec![
            Complex64::from_polar(1.0, PI * s / 12.0),
            Complex64::from_polar(1.0, -PI * s / 4.0),
        ];
        Self::from_generator_values(Arc::new(SubgroupDescriptor::sl2z()), s / 2.0, values, format!("eta_power({s})"))
            .expect("eta values are valid")
    }

    /// The same multiplier restricted to a subgroup of the current group.
    pub fn restrict(&self, subgroup: Arc<SubgroupDescriptor>) -> Result<Self> {
        let values = subgroup
            .generators()
            .iter()
            .map(|g| self.extend(g))
            .collect::<Result<Vec<_>>>()?;
        Self::from_generator_values(subgroup, self.weight(), values, self.inner.label.clone())
    }

    pub fn weight(&self) -> f64 {
        self.inner.weight
    }

    pub fn group(&self) -> &Arc<SubgroupDescriptor> {
        &self.inner.group
    }

    pub fn generator_values(&self) -> &[Complex64] {
        &self.inner.generator_values
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }

    /// `v(M)`, computed from a word decomposition and cached.
    pub fn extend(&self, m: &GroupElement) -> Result<Complex64> {
        if let Some(v) = self.inner.cache.read().expect("cache lock").get(m) {
            return Ok(*v);
        }
        let word = self.inner.group.word_decompose(m)?;
        let value = self.evaluate_word(&word)?;
        self.inner.cache.write().expect("cache lock").entry(*m).or_insert(value);
        Ok(value)
    }

    /// `v` of the product of a word, folded left through the consistency condition.
    pub fn evaluate_word(&self, word: &[(usize, i64)]) -> Result<Complex64> {
        let k = self.weight();
        let group = &self.inner.group;
        let mut acc = GroupElement::IDENTITY;
        let mut value = Complex64::new(1.0, 0.0);
        for &(g, e) in word {
            let gen = group.generators()[g];
            let (letter, letter_value) = if e > 0 {
                (gen, self.inner.generator_values[g])
            } else {
                let inv = gen.inverse();
                let vg = self.inner.generator_values[g];
                (inv, 1.0 / (vg * self.factor(&gen, &inv, k)?))
            };
            for _ in 0..e.unsigned_abs() {
                value = value * letter_value * self.factor(&acc, &letter, k)?;
                acc = acc * letter;
            }
        }
        Ok(value)
    }

    /// All generator values are 1 and the weight is an integer, so `v ≡ 1`.
    pub fn is_trivial(&self) -> bool {
        integer_weight(self.weight()).is_some()
            && self.inner.generator_values.iter().all(|v| *v == Complex64::new(1.0, 0.0))
    }

    pub(crate) fn factor(&self, m1: &GroupElement, m2: &GroupElement, k: f64) -> Result<Complex64> {
        // integer powers are multiplicative, the ratio is exactly 1
        if integer_weight(k).is_some() {
            return Ok(Complex64::new(1.0, 0.0));
        }
        consistency_factor(m1, m2, k)
    }

    /// `|v(Q_j)| = 1` within `tol` at every cusp-class generator, and at
    /// 20 random conjugates `g Q_j^{±1} g^{-1}`.
    pub fn is_weakly_parabolic(&self, tol: f64) -> Result<bool> {
        let group = &self.inner.group;
        let cusps = group.cusp_classes();
        for cd in &cusps {
            if (self.extend(&cd.generator)?.norm() - 1.0).abs() > tol {
                return Ok(false);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for i in 0..20 {
            let q = cusps[i % cusps.len()].generator;
            let q = if i % 2 == 0 { q } else { q.inverse() };
            let (_, g) = group.random_word(&mut rng, 1 + i % 4);
            let conj = g * q * g.inverse();
            if (self.extend(&conj)?.norm() - 1.0).abs() > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A bound `|v(V)| <= K mu(V)^alpha` fitted to sampled words.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthBound {
    pub k: f64,
    pub alpha: f64,
}

impl GrowthBound {
    pub fn holds(&self, v: &MultiplierSystem, m: &GroupElement) -> Result<bool> {
        let bound = self.k * (m.mu() as f64).powf(self.alpha);
        Ok(v.extend(m)?.norm() <= bound * (1.0 + 1e-12))
    }
}

/// Fit `(K, alpha)` with `|v(V)| <= K mu(V)^alpha` over `samples` random words
/// of length `1..=max_length`.
///
/// Unitary samples give `(1, 0)`. Otherwise `alpha` is the smallest slope for
/// which the bound holds with `K = 1` on every sample.
pub fn growth_fit(v: &MultiplierSystem, max_length: usize, samples: usize, seed: u64) -> Result<GrowthBound> {
    let max_length = max_length.max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let group = v.group().clone();
    let mut points = Vec::with_capacity(samples);
    for i in 0..samples {
        let (_, m) = group.random_word(&mut rng, 1 + i % max_length);
        points.push(((m.mu() as f64).ln(), v.extend(&m)?.norm().ln()));
    }
    if points.iter().all(|&(_, y)| y.abs() < ALGEBRAIC_TOL) {
        return Ok(GrowthBound { k: 1.0, alpha: 0.0 });
    }
    let alpha = points.iter().map(|&(x, y)| y / x).fold(0.0f64, f64::max);
    let log_k = points.iter().map(|&(x, y)| y - alpha * x).fold(0.0f64, f64::max);
    Ok(GrowthBound { k: log_k.exp(), alpha })
}

/// The stroke operator `(F|M)(z) = F(Mz) v(M)^{-1} (cz + d)^{-k}`.
///
/// The Möbius part ignores the sign of `M`; `v(M)` does not.
pub fn stroke(f: &Function, m: &GroupElement, k: f64, v: &MultiplierSystem) -> Result<Function> {
    let vm_inv = 1.0 / v.extend(m)?;
    let (f, m) = (f.clone(), *m);
    Ok(Arc::new(move |z| f(m.act(z)) * vm_inv * ppow(m.j(z), -k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn principal_power_examples() {
        let p = principal_power(Complex64::new(-1.0, 0.0), 0.5).unwrap();
        assert!(close(p, Complex64::new(0.0, -1.0), 1e-15));
        let p = principal_power(Complex64::new(4.0, 0.0), 0.5).unwrap();
        assert!(close(p, Complex64::new(2.0, 0.0), 1e-15));
        let p = principal_power(Complex64::i(), 2.0).unwrap();
        assert!(close(p, Complex64::new(-1.0, 0.0), 1e-15));
        assert!(matches!(principal_power(Complex64::new(0.0, 0.0), 0.5), Err(Error::ZeroPower)));
    }

    #[test]
    fn negative_real_axis_uses_minus_pi() {
        assert_eq!(principal_arg(Complex64::new(-3.0, 0.0)), -PI);
        assert_eq!(principal_arg(Complex64::new(-3.0, -0.0)), -PI);
    }

    #[test]
    fn consistency_factor_examples() {
        let i = GroupElement::IDENTITY;
        assert!(close(consistency_factor(&i, &i, 0.37).unwrap(), 1.0.into(), 1e-15));
        let u1 = GroupElement::translation(3);
        let u2 = GroupElement::translation(-5);
        assert!(close(consistency_factor(&u1, &u2, 0.37).unwrap(), 1.0.into(), 1e-15));
        let t = GroupElement::T;
        let at_i = consistency_factor(&t, &t, 0.5).unwrap();
        let at_2i = consistency_factor_at(&t, &t, 0.5, Complex64::new(0.0, 2.0));
        assert!(close(at_i, at_2i, 1e-12));
        // (i)^{1/2} (i)^{1/2} / (-1)^{1/2} = i / (-i) = -1
        assert!(close(at_i, Complex64::new(-1.0, 0.0), 1e-14));
    }

    #[test]
    fn translations_compose_without_factor() {
        let kappa = 0.3;
        let g = Arc::new(SubgroupDescriptor::sl2z());
        let v = MultiplierSystem::from_generator_values(
            g,
            12.0,
            vec![Complex64::from_polar(1.0, 2.0 * PI * kappa), 1.0.into()],
            "test",
        )
        .unwrap();
        for n in -4..=4 {
            let got = v.extend(&GroupElement::translation(n)).unwrap();
            assert!(close(got, Complex64::from_polar(1.0, 2.0 * PI * kappa * n as f64), 1e-13));
        }
    }

    #[test]
    fn eta_minus_identity() {
        // v(-I) = e^{iπk} for weight k
        let v = MultiplierSystem::eta_power(1.0);
        let got = v.extend(&GroupElement::MINUS_IDENTITY).unwrap();
        assert!(close(got, Complex64::from_polar(1.0, PI * 0.5), 1e-14));
        assert_eq!(v.extend(&GroupElement::IDENTITY).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn weak_parabolicity_of_unitary_systems() {
        let g = Arc::new(SubgroupDescriptor::sl2z());
        assert!(MultiplierSystem::trivial(g, 12.0).is_weakly_parabolic(1e-10).unwrap());
        assert!(MultiplierSystem::eta_power(1.0).is_weakly_parabolic(1e-10).unwrap());
    }

    #[test]
    fn unitary_growth_fit() {
        let g = Arc::new(SubgroupDescriptor::sl2z());
        let fit = growth_fit(&MultiplierSystem::trivial(g, 12.0), 6, 200, 1).unwrap();
        assert_eq!(fit, GrowthBound { k: 1.0, alpha: 0.0 });
        let fit = growth_fit(&MultiplierSystem::eta_power(1.0), 6, 200, 1).unwrap();
        assert_eq!(fit, GrowthBound { k: 1.0, alpha: 0.0 });
    }

    #[test]
    fn stroke_identity_and_constant() {
        let g = Arc::new(SubgroupDescriptor::sl2z());
        let v = MultiplierSystem::trivial(g, 0.0);
        let f = function(|z: Complex64| z * z + 1.0);
        let z = Complex64::new(0.3, 1.7);
        let id = stroke(&f, &GroupElement::IDENTITY, 0.0, &v).unwrap();
        assert!(close(id(z), f(z), 1e-15));
        let one = function(|_| Complex64::new(1.0, 0.0));
        let m = GroupElement::new(2, 1, 1, 1).unwrap();
        assert!(close(stroke(&one, &m, 0.0, &v).unwrap()(z), 1.0.into(), 1e-15));
    }
}
