use std::sync::Arc;

use eichler_core::automorphy::MultiplierSystem;
use eichler_core::cohomology::{
    coboundary_from, coboundary_test, cocycle_consistency_check, fit_growth_profile, growth_membership_check,
    growth_samples, parabolic_test, period_cocycle, shift_by_phi0, CertificateRecord, Cocycle, CocycleRecord,
    GrowthProfile, Verdict,
};
use eichler_core::eichler::PeriodElement;
use eichler_core::forms::{delta_expansion, level11_coefficients, FourierExpansion};
use eichler_core::modgroup::{GroupElement, SubgroupDescriptor};
use eichler_core::{function, Complex64, Error};
use proptest::prelude::*;

fn sl2z() -> Arc<SubgroupDescriptor> {
    Arc::new(SubgroupDescriptor::sl2z())
}

fn poly(coeffs: &[f64], k: usize) -> PeriodElement {
    let mut c = vec![Complex64::new(0.0, 0.0); k + 1];
    for (i, &x) in coeffs.iter().enumerate() {
        c[i] = Complex64::new(x, 0.0);
    }
    PeriodElement::Polynomial(c)
}

fn delta_cocycle() -> Cocycle {
    period_cocycle(&delta_expansion(120), MultiplierSystem::trivial(sl2z(), -10.0), 10.0).unwrap()
}

#[test]
fn delta_cocycle_certificates() {
    let c = delta_cocycle();
    let r = cocycle_consistency_check(&c, 20, 5).unwrap();
    assert!(r.relative < 1e-7, "{r:?}");
    let cert = coboundary_test(&c).unwrap();
    assert_eq!(cert.verdict, Verdict::NotCoboundary);
    let par = parabolic_test(&c, &c.group().cusp_classes()).unwrap();
    assert_eq!(par.len(), 1);
    assert_eq!(par[0].verdict, Verdict::Coboundary);
}

#[test]
fn level11_cocycle_is_parabolic_at_both_cusps() {
    let a = level11_coefficients(400);
    let g = FourierExpansion::new(0.0, 1.0, 1, a[1..].iter().map(|&x| Complex64::new(x, 0.0)).collect()).unwrap();
    let group = Arc::new(SubgroupDescriptor::gamma0(11).unwrap());
    let c = period_cocycle(&g, MultiplierSystem::trivial(group, 0.0), 0.0).unwrap();
    let certs = parabolic_test(&c, &c.group().cusp_classes()).unwrap();
    assert_eq!(certs.len(), 2);
    assert!(certs.iter().all(|x| x.verdict == Verdict::Coboundary), "{:?}", certs.iter().map(|x| x.residual).collect::<Vec<_>>());
    assert!(c.value_at(&c.group().cusp_classes()[1].generator).unwrap().grid_norm() < 1e-11 * c.grid_norm());
}

#[test]
fn record_roundtrip_is_exact() {
    let c = delta_cocycle();
    let record = CocycleRecord::from_cocycle(&c).unwrap();
    let text = serde_json::to_string(&record).unwrap();
    let back: CocycleRecord = serde_json::from_str(&text).unwrap();
    assert_eq!(back, record);
    let c2 = back.to_cocycle().unwrap();
    for (a, b) in c.generator_values().iter().zip(c2.generator_values()) {
        assert_eq!(a.coeffs(), b.coeffs());
    }
    let cert = CertificateRecord::from(&coboundary_test(&c2).unwrap());
    let text = serde_json::to_string(&cert).unwrap();
    assert_eq!(serde_json::from_str::<CertificateRecord>(&text).unwrap(), cert);
    let mut bad = record.clone();
    bad.generators.reverse();
    assert!(matches!(bad.to_cocycle(), Err(Error::Parse(_))));
}

#[test]
fn shift_by_witness() {
    let v = MultiplierSystem::trivial(sl2z(), -10.0);
    let rho = poly(&[0.0, 0.0, 1.0], 10);
    let c = coboundary_from(&rho, v, -10.0).unwrap();
    assert!(c.value_at(&GroupElement::S).unwrap().grid_norm() > 1.0);
    let shifted = shift_by_phi0(&c, &rho).unwrap();
    assert!(shifted.grid_norm() < 1e-12);
    let wrong = poly(&[0.0, 1.0], 10);
    assert!(matches!(shift_by_phi0(&c, &wrong), Err(Error::NonzeroTranslationValue { .. })));
}

#[test]
fn growth_profiles() {
    let profile = GrowthProfile::new(1.2, 3.0, 0.5).unwrap();
    let cube = function(|z: Complex64| z * z * z);
    assert!(growth_membership_check(&cube, &profile, &growth_samples(200, 3)).holds);
    let fitted = fit_growth_profile(&cube, &growth_samples(300, 4)).unwrap();
    assert!((3.0..=4.0).contains(&fitted.rho), "{fitted:?}");
    assert!(growth_membership_check(&cube, &fitted, &growth_samples(300, 44)).holds);
    let exp = function(|z: Complex64| (-Complex64::i() * z * 8.0).exp());
    assert!(!growth_membership_check(&exp, &profile, &growth_samples(200, 5)).holds);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_coboundaries_are_recognized(c in prop::collection::vec(-5.0f64..5.0, 11)) {
        prop_assume!(c.iter().any(|x| x.abs() > 0.1));
        let rho = poly(&c, 10);
        let cocycle = coboundary_from(&rho, MultiplierSystem::trivial(sl2z(), -10.0), -10.0).unwrap();
        let cert = coboundary_test(&cocycle).unwrap();
        prop_assert_eq!(cert.verdict, Verdict::Coboundary);
        let got = cert.rho.coeffs().unwrap();
        for (a, b) in got.iter().zip(rho.coeffs().unwrap()) {
            prop_assert!((a - b).norm() < 1e-8);
        }
        prop_assert!(cocycle_consistency_check(&cocycle, 5, 1).unwrap().relative < 1e-12);
    }

    #[test]
    fn period_cocycle_is_linear_in_the_form(s in -2.0f64..2.0) {
        let delta = delta_expansion(120);
        let v = MultiplierSystem::trivial(sl2z(), -10.0);
        let a = period_cocycle(&delta, v.clone(), 10.0).unwrap();
        let b = period_cocycle(&delta.scaled(Complex64::new(s, 0.0)), v, 10.0).unwrap();
        let diff = a.scale(Complex64::new(s, 0.0)).add(&b.scale(Complex64::new(-1.0, 0.0)));
        prop_assert!(diff.grid_norm() <= 1e-12 * a.grid_norm().max(1e-300) * s.abs().max(1.0));
    }
}
