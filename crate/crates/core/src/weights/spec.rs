//! JSON form of a weight:
//! `{"kind": "generalized_dt", "factors": [{"z": -1, "gamma": 0.5, "Gamma": 0}], "base": {...}}`.

use serde::{Deserialize, Serialize};

use super::{Factor, MonotoneProfile, Weight, WeightKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorSpec {
    pub z: f64,
    pub gamma: f64,
    #[serde(rename = "Gamma", default)]
    pub log_gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub gamma: f64,
    #[serde(rename = "Gamma", default)]
    pub log_gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub kind: WeightKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<FactorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Box<WeightSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl WeightSpec {
    pub fn build(&self) -> Result<Weight> {
        let factors: Vec<Factor> = self
            .factors
            .iter()
            .map(|f| Factor::new(f.z, f.gamma, f.log_gamma))
            .collect();
        let base = match &self.base {
            Some(b) => b.build()?,
            None => Weight::one(),
        };
        let w = match self.kind {
            WeightKind::Constant => Weight::constant(self.scale.unwrap_or(1.0)),
            WeightKind::GeneralizedJacobi => {
                if factors.iter().any(|f| f.log_gamma != 0.0) {
                    return Err(Error::InvalidWeight(
                        "generalized_jacobi factors cannot carry a log exponent".into(),
                    ));
                }
                let pairs: Vec<(f64, f64)> = factors.iter().map(|f| (f.z, f.gamma)).collect();
                let j = Weight::jacobi(&pairs)?;
                if self.base.is_some() {
                    Weight::gdt(base, j.factors().to_vec())?
                } else {
                    j
                }
            }
            WeightKind::GeneralizedDt => Weight::gdt(base, factors)?,
            WeightKind::ProductMonotone => {
                let xi = self
                    .xi
                    .ok_or_else(|| Error::InvalidWeight("product_monotone needs 'xi'".into()))?;
                let p = self
                    .profile
                    .as_ref()
                    .ok_or_else(|| Error::InvalidWeight("product_monotone needs 'profile'".into()))?;
                if p.gamma < 0.0 || (p.gamma == 0.0 && p.log_gamma > 0.0) {
                    return Err(Error::InvalidWeight(format!("profile {p:?} is not nondecreasing")));
                }
                Weight::product_monotone(
                    base,
                    xi,
                    MonotoneProfile::PowerLog {
                        gamma: p.gamma,
                        log_gamma: p.log_gamma,
                    },
                )?
            }
            WeightKind::Custom => {
                let name = self
                    .name
                    .as_deref()
                    .ok_or_else(|| Error::InvalidWeight("custom weight needs 'name'".into()))?;
                Weight::builtin_custom(name)?
            }
        };
        match (self.kind, self.scale) {
            (WeightKind::Constant, _) | (_, None) => Ok(w),
            (_, Some(s)) => Ok(w.scaled(s)),
        }
    }
}

impl Weight {
    pub(crate) fn scaled(mut self, s: f64) -> Self {
        self.scale *= s;
        self
    }

    pub fn from_spec(spec: &WeightSpec) -> Result<Self> {
        spec.build()
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let spec: WeightSpec = serde_json::from_str(json)?;
        spec.build()
    }

    /// JSON-representable description; `None` for closures that are not
    /// built-ins.
    pub fn to_spec(&self) -> Option<WeightSpec> {
        let base = match self.base() {
            Some(b) => Some(Box::new(b.to_spec()?)),
            None => None,
        };
        let factors = self
            .factors()
            .iter()
            .map(|f| FactorSpec {
                z: f.z,
                gamma: f.gamma,
                log_gamma: f.log_gamma,
            })
            .collect();
        let scale = (self.kind() != WeightKind::Constant && self.scale() != 1.0).then_some(self.scale());
        let mut spec = WeightSpec {
            kind: self.kind(),
            factors,
            base,
            scale,
            xi: None,
            profile: None,
            name: None,
        };
        match self.kind() {
            WeightKind::Constant => spec.scale = Some(self.scale()),
            WeightKind::ProductMonotone => {
                let m = self.monotone()?;
                spec.xi = Some(m.xi);
                spec.profile = match &m.profile {
                    MonotoneProfile::Power { gamma } => Some(ProfileSpec {
                        gamma: *gamma,
                        log_gamma: 0.0,
                    }),
                    MonotoneProfile::PowerLog { gamma, log_gamma } => Some(ProfileSpec {
                        gamma: *gamma,
                        log_gamma: *log_gamma,
                    }),
                    MonotoneProfile::Custom { .. } => return None,
                };
            }
            WeightKind::Custom => {
                let c = self.custom_part()?;
                Weight::builtin_custom(&c.name).ok()?;
                spec.name = Some(c.name.clone());
            }
            _ => {}
        }
        Some(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_form() {
        let w = Weight::from_json(
            r#"{"kind": "generalized_dt", "factors": [{"z": -1, "gamma": 0.5, "Gamma": 0}, {"z": 1, "gamma": 0.5}], "base": {"kind": "constant"}}"#,
        )
        .unwrap();
        assert!((w.value(0.6) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_log_exponent() {
        let r = Weight::from_json(r#"{"kind": "generalized_dt", "factors": [{"z": 0, "gamma": 0, "Gamma": 1}]}"#);
        assert!(r.is_err());
    }

    #[test]
    fn spec_round_trip_preserves_values() {
        let w = Weight::gdt(
            Weight::jacobi(&[(0.0, 0.3)]).unwrap(),
            vec![Factor::new(0.5, 1.0, -1.0)],
        )
        .unwrap();
        let back = Weight::from_spec(&w.to_spec().unwrap()).unwrap();
        for x in [-0.9, -0.2, 0.1, 0.5, 0.77] {
            assert_eq!(w.value(x), back.value(x));
        }
        let c = Weight::from_json(r#"{"kind": "custom", "name": "flat_exp"}"#).unwrap();
        assert_eq!(c.to_spec().unwrap().name.as_deref(), Some("flat_exp"));
        let pm = Weight::from_json(
            r#"{"kind": "product_monotone", "base": {"kind": "constant"}, "xi": 0.2, "profile": {"gamma": 1}}"#,
        )
        .unwrap();
        assert!((pm.value(0.7) - 0.5).abs() < 1e-15);
    }
}
