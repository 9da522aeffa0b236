//! Target functions `f: [-1, 1] → ℝ` and the named registry used by configs.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cheb::ChebPoly;
use crate::error::{Error, Result};
use crate::geometry::chebyshev_grid;
use crate::weights::Weight;

#[derive(Clone)]
pub struct TargetFunction {
    label: String,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    singular_points: Vec<f64>,
}

impl fmt::Debug for TargetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetFunction")
            .field("label", &self.label)
            .field("singular_points", &self.singular_points)
            .finish()
    }
}

impl TargetFunction {
    pub fn new<F>(label: impl Into<String>, eval: F, singular_points: Vec<f64>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        TargetFunction {
            label: label.into(),
            eval: Arc::new(eval),
            singular_points,
        }
    }

    pub fn from_poly(label: impl Into<String>, p: ChebPoly) -> Self {
        TargetFunction::new(label, move |x| p.eval(x), Vec::new())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn singular_points(&self) -> &[f64] {
        &self.singular_points
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// `f(x)` unless `x` is a declared singular point or the value is not
    /// finite.
    #[inline]
    pub fn try_eval(&self, x: f64) -> Option<f64> {
        if self.singular_points.contains(&x) {
            return None;
        }
        let v = (self.eval)(x);
        v.is_finite().then_some(v)
    }

    /// `f + c`.
    pub fn offset(&self, c: f64) -> Self {
        let inner = self.eval.clone();
        TargetFunction {
            label: format!("{}+{c}", self.label),
            eval: Arc::new(move |x| inner(x) + c),
            singular_points: self.singular_points.clone(),
        }
    }
}

/// A registry reference in a config: `{"name": "power_abs", "params": {"z": 0, "alpha": 0.6}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

pub const REGISTRY: &[&str] = &[
    "power_abs",
    "log_power",
    "neg_power",
    "truncated_power",
    "exp",
    "sin",
    "chebyshev",
    "monomial",
];

fn param(params: &BTreeMap<String, f64>, key: &str, default: Option<f64>) -> Result<f64> {
    match params.get(key).copied().or(default) {
        Some(v) if v.is_finite() => Ok(v),
        Some(v) => Err(Error::Config(format!("parameter '{key}' = {v} is not finite"))),
        None => Err(Error::Config(format!("missing parameter '{key}'"))),
    }
}

fn nonneg_int(v: f64, key: &str) -> Result<i32> {
    if v < 0.0 || v.fract() != 0.0 || v > 64.0 {
        return Err(Error::Config(format!("parameter '{key}' = {v} must be an integer in 0..=64")));
    }
    Ok(v as i32)
}

/// Builds a registered function. Every entry accepts an optional `offset`
/// added to the value.
///
/// * `power_abs(z, alpha ≥ 0)`: `|x - z|^α`
/// * `log_power(z, alpha, beta)`: `|x - z|^α (ln e/|x - z|)^β`
/// * `neg_power(z, alpha < 0)`: `|x - z|^α`, singular at `z`
/// * `truncated_power(z, alpha)`: `(x - z)_+^α`
/// * `exp(k = 1)`: `e^{kx}`; `sin(k = 1)`: `sin(kx)`
/// * `chebyshev(k)`: `T_k`; `monomial(k)`: `x^k`
pub fn function_registry(name: &str, params: &BTreeMap<String, f64>) -> Result<TargetFunction> {
    let offset = param(params, "offset", Some(0.0))?;
    let f = match name {
        "power_abs" => {
            let z = param(params, "z", Some(0.0))?;
            let a = param(params, "alpha", None)?;
            if a < 0.0 {
                return Err(Error::Config(format!("power_abs needs alpha ≥ 0 (got {a}); use neg_power")));
            }
            TargetFunction::new(format!("|x-{z}|^{a}"), move |x| (x - z).abs().powf(a), Vec::new())
        }
        "log_power" => {
            let z = param(params, "z", Some(0.0))?;
            let a = param(params, "alpha", None)?;
            let b = param(params, "beta", None)?;
            let singular = if a > 0.0 || (a == 0.0 && b <= 0.0) { Vec::new() } else { vec![z] };
            TargetFunction::new(
                format!("|x-{z}|^{a}(ln e/|x-{z}|)^{b}"),
                move |x| {
                    let d = (x - z).abs();
                    if d == 0.0 {
                        return if a > 0.0 || (a == 0.0 && b < 0.0) { 0.0 } else if a == 0.0 && b == 0.0 { 1.0 } else { f64::INFINITY };
                    }
                    d.powf(a) * (1.0 - d.ln()).powf(b)
                },
                singular,
            )
        }
        "neg_power" => {
            let z = param(params, "z", Some(0.0))?;
            let a = param(params, "alpha", None)?;
            if a >= 0.0 {
                return Err(Error::Config(format!("neg_power needs alpha < 0 (got {a})")));
            }
            TargetFunction::new(format!("|x-{z}|^{a}"), move |x| (x - z).abs().powf(a), vec![z])
        }
        "truncated_power" => {
            let z = param(params, "z", Some(0.0))?;
            let a = param(params, "alpha", None)?;
            if a < 0.0 {
                return Err(Error::Config(format!("truncated_power needs alpha ≥ 0 (got {a})")));
            }
            TargetFunction::new(
                format!("(x-{z})_+^{a}"),
                move |x| if x > z { (x - z).powf(a) } else { 0.0 },
                Vec::new(),
            )
        }
        "exp" => {
            let k = param(params, "k", Some(1.0))?;
            TargetFunction::new(format!("exp({k}x)"), move |x| (k * x).exp(), Vec::new())
        }
        "sin" => {
            let k = param(params, "k", Some(1.0))?;
            TargetFunction::new(format!("sin({k}x)"), move |x| (k * x).sin(), Vec::new())
        }
        "chebyshev" => {
            let k = nonneg_int(param(params, "k", None)?, "k")?;
            TargetFunction::from_poly(format!("T_{k}"), ChebPoly::chebyshev_t(k as usize))
        }
        "monomial" => {
            let k = nonneg_int(param(params, "k", None)?, "k")?;
            TargetFunction::new(format!("x^{k}"), move |x| x.powi(k), Vec::new())
        }
        _ => {
            return Err(Error::UnknownFunction {
                name: name.to_string(),
                known: REGISTRY.join(", "),
            })
        }
    };
    Ok(if offset != 0.0 { f.offset(offset) } else { f })
}

impl FunctionSpec {
    pub fn build(&self) -> Result<TargetFunction> {
        function_registry(&self.name, &self.params)
    }
}

/// Samples `|w f|` on points approaching each singular point of `f` at
/// distances `10^{-k}`, `1 ≤ k ≤ depth`, and on a Chebyshev grid. Returns
/// the largest value and whether it stayed bounded (no growth by more than
/// a factor 1.5 over the last three decades).
pub fn weighted_sup_check(f: &TargetFunction, w: &Weight, depth: u32) -> (f64, bool) {
    let mut sup: f64 = 0.0;
    for x in chebyshev_grid(-1.0, 1.0, 512) {
        if let Some(v) = f.try_eval(x) {
            sup = sup.max((w.value(x) * v).abs());
        }
    }
    let mut bounded = true;
    for &z in f.singular_points() {
        let profile: Vec<f64> = (1..=depth)
            .map(|k| {
                let d = 10f64.powi(-(k as i32));
                [z - d, z + d]
                    .iter()
                    .filter(|x| (-1.0..=1.0).contains(*x))
                    .filter_map(|&x| f.try_eval(x).map(|v| (w.value(x) * v).abs()))
                    .fold(0.0, f64::max)
            })
            .collect();
        sup = profile.iter().copied().fold(sup, f64::max);
        if profile.len() >= 4 {
            let tail = &profile[profile.len() - 4..];
            if tail[3] > 1.5 * tail[0] && tail[3] > 1e-12 {
                bounded = false;
            }
        }
    }
    (sup, bounded && sup.is_finite())
}
