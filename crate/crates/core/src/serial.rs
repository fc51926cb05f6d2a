//! JSON helpers. Floats are written with 17 significant digits so that every
//! value round-trips exactly.

use num_complex::Complex64;
use serde::de::Deserializer;
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

/// `x` with 17 significant digits; non-finite values become `null`.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn raw(x: f64) -> Box<RawValue> {
    RawValue::from_string(format_f64(x)).expect("formatted float is valid JSON")
}

/// A real number serialized with 17 significant digits.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        raw(self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Option::<f64>::deserialize(d).map(|x| Real(x.unwrap_or(f64::NAN)))
    }
}

/// A complex number as `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Complex(pub Complex64);

impl Serialize for Complex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&raw(self.0.re))?;
        seq.serialize_element(&raw(self.0.im))?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Complex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [re, im] = <[Real; 2]>::deserialize(d)?;
        Ok(Complex(Complex64::new(re.0, im.0)))
    }
}

/// A list of complex numbers, each as `[re, im]`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ComplexList(pub Vec<Complex64>);

impl Serialize for ComplexList {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for z in &self.0 {
            seq.serialize_element(&Complex(*z))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for ComplexList {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<Complex>::deserialize(d)?;
        Ok(ComplexList(v.into_iter().map(|c| c.0).collect()))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> crate::Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

pub fn from_json<T: for<'de> Deserialize<'de>>(s: &str) -> crate::Result<T> {
    Ok(serde_json::from_str(s)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_exact() {
        let values = vec![
            Complex64::new(0.1, -1.0 / 3.0),
            Complex64::new(1e-300, 6.02214076e23),
            Complex64::new(f64::MIN_POSITIVE, -0.0),
        ];
        let json = serde_json::to_string(&ComplexList(values.clone())).unwrap();
        let back: ComplexList = serde_json::from_str(&json).unwrap();
        for (a, b) in values.iter().zip(&back.0) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im, b.im);
        }
    }

    #[test]
    fn real_formatting() {
        assert_eq!(format_f64(1.0), "1.0000000000000000e0");
        assert_eq!(serde_json::to_string(&Real(f64::NAN)).unwrap(), "null");
        let r: Real = serde_json::from_str("0.30000000000000004").unwrap();
        assert_eq!(r.0, 0.1 + 0.2);
    }
}
