//! Weights on `[-1, 1]`: construction, evaluation, interval mass, the
//! averaged weight `w_n`, and estimation of the doubling, A* and W*(Z)
//! constants.
//!
//! A weight is the product `scale · base(x) · Π factors · monotone · custom`.
//! Every weight is identically zero outside `[-1, 1]`.

mod classify;
mod spec;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::rho_n;
use crate::quadrature::{self, QuadSettings};

pub use classify::{
    check_wstar_condition, classify_weight, estimate_astar_constant, estimate_astar_ladder,
    estimate_doubling_constant, estimate_doubling_ladder, wstar_sweep, AStarEstimate,
    DoublingEstimate, LadderRow, MassTable, WStarCheck, WStarSweep, WeightClassReport,
};
pub use spec::{FactorSpec, ProfileSpec, WeightSpec};

/// Ratio by which an estimate must grow per resolution doubling, twice in a
/// row, to be declared divergent.
pub const DIVERGENCE_GROWTH: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    Constant,
    GeneralizedJacobi,
    GeneralizedDt,
    ProductMonotone,
    Custom,
}

/// `|x - z|^γ (ln(e/|x - z|))^Γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factor {
    pub z: f64,
    pub gamma: f64,
    pub log_gamma: f64,
}

impl Factor {
    pub fn new(z: f64, gamma: f64, log_gamma: f64) -> Self {
        Factor { z, gamma, log_gamma }
    }

    pub fn jacobi(z: f64, gamma: f64) -> Self {
        Factor::new(z, gamma, 0.0)
    }

    pub fn value(&self, x: f64) -> f64 {
        let d = (x - self.z).abs();
        if d == 0.0 {
            return if self.gamma > 0.0 || self.log_gamma < 0.0 { 0.0 } else { 1.0 };
        }
        let mut v = if self.gamma == 0.0 { 1.0 } else { d.powf(self.gamma) };
        if self.log_gamma != 0.0 {
            v *= (1.0 - d.ln()).powf(self.log_gamma);
        }
        v
    }

    fn is_trivial(&self) -> bool {
        self.gamma == 0.0 && self.log_gamma == 0.0
    }

    fn validate(&self) -> Result<()> {
        if !(self.z.is_finite() && self.gamma.is_finite() && self.log_gamma.is_finite()) {
            return Err(Error::InvalidWeight(format!("non-finite factor {self:?}")));
        }
        if !(-1.0..=1.0).contains(&self.z) {
            return Err(Error::InvalidWeight(format!("factor point {} outside [-1, 1]", self.z)));
        }
        if self.gamma < 0.0 {
            return Err(Error::InvalidWeight(format!("negative exponent {} at {}", self.gamma, self.z)));
        }
        if self.gamma == 0.0 && self.log_gamma > 0.0 {
            return Err(Error::InvalidWeight(format!(
                "log exponent {} > 0 with zero power exponent at {}",
                self.log_gamma, self.z
            )));
        }
        Ok(())
    }
}

/// Nondecreasing profile `f` on `[0, 2]` for product weights `w(x) f(|x - ξ|)`.
#[derive(Clone)]
pub enum MonotoneProfile {
    /// `s^γ`, `γ ≥ 0`.
    Power { gamma: f64 },
    /// `(1 - ln s)^Γ` if `γ = 0` (then `Γ ≤ 0`), else `s^γ (Ψ - ln s)^Γ`
    /// with `Ψ = 1 + max(0, Γ)/γ`.
    PowerLog { gamma: f64, log_gamma: f64 },
    Custom {
        name: String,
        eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for MonotoneProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonotoneProfile::Power { gamma } => write!(f, "Power({gamma})"),
            MonotoneProfile::PowerLog { gamma, log_gamma } => write!(f, "PowerLog({gamma}, {log_gamma})"),
            MonotoneProfile::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl MonotoneProfile {
    pub fn value(&self, s: f64) -> f64 {
        match self {
            MonotoneProfile::Power { gamma } => {
                if *gamma == 0.0 {
                    1.0
                } else {
                    s.powf(*gamma)
                }
            }
            MonotoneProfile::PowerLog { gamma, log_gamma } => {
                if s == 0.0 {
                    return if *gamma > 0.0 || *log_gamma < 0.0 { 0.0 } else { 1.0 };
                }
                if *gamma == 0.0 {
                    (1.0 - s.ln()).powf(*log_gamma)
                } else {
                    let psi = 1.0 + log_gamma.max(0.0) / gamma;
                    s.powf(*gamma) * (psi - s.ln()).powf(*log_gamma)
                }
            }
            MonotoneProfile::Custom { eval, .. } => eval(s),
        }
    }

    /// Samples `f(2s)/f(s)` on a logarithmic grid of `(0, 1]` and checks
    /// monotonicity on `[0, 2]`. Returns the observed doubling factor `K`,
    /// or `None` when the profile is not nondecreasing or `K` is infinite.
    pub fn doubling_factor(&self, samples: usize) -> Option<f64> {
        let samples = samples.max(16);
        let lo = 1e-12_f64.ln();
        let mut prev = self.value(0.0);
        let mut k: f64 = 0.0;
        for i in 0..=samples {
            let s = (lo + (0.0 - lo) * i as f64 / samples as f64).exp();
            let fs = self.value(s);
            let f2 = self.value(2.0 * s);
            if fs < prev * (1.0 - 1e-12) || f2 < fs * (1.0 - 1e-12) {
                return None;
            }
            prev = fs;
            if fs > 0.0 {
                k = k.max(f2 / fs);
            } else if f2 > 0.0 {
                return None;
            }
        }
        k.is_finite().then_some(k)
    }
}

#[derive(Debug, Clone)]
pub struct MonotoneFactor {
    pub xi: f64,
    pub profile: MonotoneProfile,
}

/// Pointwise-evaluable weight given as a closure with declared breakpoints.
#[derive(Clone)]
pub struct CustomWeight {
    pub name: String,
    pub eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub breakpoints: Vec<f64>,
}

impl fmt::Debug for CustomWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomWeight")
            .field("name", &self.name)
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub struct Weight {
    kind: WeightKind,
    scale: f64,
    factors: Vec<Factor>,
    base: Option<Box<Weight>>,
    monotone: Option<MonotoneFactor>,
    custom: Option<CustomWeight>,
}

impl Weight {
    pub fn constant(value: f64) -> Self {
        Weight {
            kind: WeightKind::Constant,
            scale: value,
            factors: Vec::new(),
            base: None,
            monotone: None,
            custom: None,
        }
    }

    pub fn one() -> Self {
        Weight::constant(1.0)
    }

    /// Generalized Jacobi weight `Π |x - z_j|^{γ_j}`.
    pub fn jacobi(factors: &[(f64, f64)]) -> Result<Self> {
        let factors: Vec<Factor> = factors.iter().map(|&(z, g)| Factor::jacobi(z, g)).collect();
        for f in &factors {
            f.validate()?;
        }
        Ok(Weight {
            kind: WeightKind::GeneralizedJacobi,
            scale: 1.0,
            factors,
            base: None,
            monotone: None,
            custom: None,
        })
    }

    /// `φ(x)^μ = (1 - x)^{μ/2} (1 + x)^{μ/2}`.
    pub fn phi_power(mu: f64) -> Result<Self> {
        Weight::jacobi(&[(-1.0, 0.5 * mu), (1.0, 0.5 * mu)])
    }

    /// Generalized Ditzian–Totik product `base(x) Π |x - z_i|^{γ_i} (ln e/|x - z_i|)^{Γ_i}`.
    ///
    /// Only the factor hypotheses are checked here; see [`make_gdt_weight`]
    /// for the variant that also checks the base weight.
    pub fn gdt(base: Weight, factors: Vec<Factor>) -> Result<Self> {
        for f in &factors {
            f.validate()?;
        }
        if factors.is_empty() {
            return Ok(base);
        }
        let base = if base.is_unit() { None } else { Some(Box::new(base)) };
        Ok(Weight {
            kind: WeightKind::GeneralizedDt,
            scale: 1.0,
            factors,
            base,
            monotone: None,
            custom: None,
        })
    }

    /// `base(x) · f(|x - ξ|)`.
    pub fn product_monotone(base: Weight, xi: f64, profile: MonotoneProfile) -> Result<Self> {
        if !(-1.0..=1.0).contains(&xi) {
            return Err(Error::InvalidWeight(format!("ξ = {xi} outside [-1, 1]")));
        }
        Ok(Weight {
            kind: WeightKind::ProductMonotone,
            scale: 1.0,
            factors: Vec::new(),
            base: Some(Box::new(base)),
            monotone: Some(MonotoneFactor { xi, profile }),
            custom: None,
        })
    }

    pub fn custom<F>(name: impl Into<String>, eval: F, breakpoints: Vec<f64>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Weight {
            kind: WeightKind::Custom,
            scale: 1.0,
            factors: Vec::new(),
            base: None,
            monotone: None,
            custom: Some(CustomWeight {
                name: name.into(),
                eval: Arc::new(eval),
                breakpoints,
            }),
        }
    }

    /// `-x` for `x < 0`, `x²` for `x ≥ 0`: satisfies the local comparability
    /// condition for `Z = {0}` but is not doubling.
    pub fn piecewise_nonexample() -> Self {
        Weight::custom("piecewise_nonexample", |x| if x < 0.0 { -x } else { x * x }, vec![0.0])
    }

    /// `exp(-1/x²)` for `x > 0`, zero otherwise.
    pub fn flat_exp() -> Self {
        Weight::custom(
            "flat_exp",
            |x| if x > 0.0 { (-1.0 / (x * x)).exp() } else { 0.0 },
            vec![0.0],
        )
    }

    /// Looks up one of the built-in custom weights by name.
    pub fn builtin_custom(name: &str) -> Result<Self> {
        match name {
            "piecewise_nonexample" => Ok(Weight::piecewise_nonexample()),
            "flat_exp" => Ok(Weight::flat_exp()),
            _ => Err(Error::InvalidWeight(format!(
                "unknown custom weight '{name}', known: piecewise_nonexample, flat_exp"
            ))),
        }
    }

    /// `w · φ^μ`.
    pub fn times_phi_power(&self, mu: f64) -> Result<Self> {
        Weight::gdt(
            self.clone(),
            vec![Factor::jacobi(-1.0, 0.5 * mu), Factor::jacobi(1.0, 0.5 * mu)],
        )
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn base(&self) -> Option<&Weight> {
        self.base.as_deref()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn monotone(&self) -> Option<&MonotoneFactor> {
        self.monotone.as_ref()
    }

    pub fn custom_part(&self) -> Option<&CustomWeight> {
        self.custom.as_ref()
    }

    fn is_unit(&self) -> bool {
        self.kind == WeightKind::Constant && self.scale == 1.0
    }

    /// `w(x)`, zero outside `[-1, 1]`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::NonFinite(x));
        }
        Ok(self.value(x))
    }

    /// Infallible evaluation for finite `x`; callers guarantee finiteness.
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        if !(-1.0..=1.0).contains(&x) {
            return 0.0;
        }
        self.inner(x)
    }

    fn inner(&self, x: f64) -> f64 {
        let mut v = self.scale;
        if let Some(b) = &self.base {
            v *= b.inner(x);
        }
        for f in &self.factors {
            v *= f.value(x);
        }
        if let Some(m) = &self.monotone {
            v *= m.profile.value((x - m.xi).abs());
        }
        if let Some(c) = &self.custom {
            v *= (c.eval)(x);
        }
        v
    }

    /// Points where the weight may be non-smooth: all factor points with a
    /// nontrivial exponent, the monotone centre, and custom breakpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .factors
            .iter()
            .filter(|f| !f.is_trivial())
            .map(|f| f.z)
            .collect();
        if let Some(b) = &self.base {
            pts.extend(b.breakpoints());
        }
        if let Some(m) = &self.monotone {
            pts.push(m.xi);
        }
        if let Some(c) = &self.custom {
            pts.extend(c.breakpoints.iter().copied());
        }
        pts.retain(|p| (-1.0..=1.0).contains(p));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Breakpoints at which the weight vanishes.
    pub fn zero_set(&self) -> Vec<f64> {
        self.breakpoints().into_iter().filter(|&p| self.value(p) == 0.0).collect()
    }

    /// `∫_{[a,b] ∩ [-1,1]} w` with relative tolerance `tol`.
    pub fn mass(&self, a: f64, b: f64, tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!("quadrature tolerance {tol} must be positive")));
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::NonFinite(if a.is_finite() { b } else { a }));
        }
        if a > b {
            return Err(Error::InvalidParameter(format!("mass over [{a}, {b}] with a > b")));
        }
        let lo = a.max(-1.0);
        let hi = b.min(1.0);
        if hi <= lo {
            return Ok(0.0);
        }
        if let Some(v) = self.closed_form_mass(lo, hi) {
            return Ok(v);
        }
        let settings = QuadSettings {
            rel_tol: tol,
            ..QuadSettings::default()
        };
        quadrature::integrate_split(&|x| self.inner(x), lo, hi, &self.breakpoints(), settings)
    }

    fn closed_form_mass(&self, lo: f64, hi: f64) -> Option<f64> {
        if self.base.is_some() || self.monotone.is_some() || self.custom.is_some() {
            return None;
        }
        let active: Vec<&Factor> = self.factors.iter().filter(|f| !f.is_trivial()).collect();
        match active.as_slice() {
            [] => Some(self.scale * (hi - lo)),
            [f] if f.log_gamma == 0.0 => {
                let g = f.gamma + 1.0;
                let prim = |u: f64| u.signum() * u.abs().powf(g) / g;
                Some(self.scale * (prim(hi - f.z) - prim(lo - f.z)))
            }
            _ => None,
        }
    }

    /// Formula-like name for report titles, e.g. `|x+1|^0.5|x|^0.3`.
    pub fn short_label(&self) -> String {
        let mut parts = Vec::new();
        if self.scale != 1.0 {
            parts.push(format!("{}", self.scale));
        }
        if let Some(b) = &self.base {
            let inner = b.short_label();
            if inner != "1" {
                parts.push(inner);
            }
        }
        for f in self.factors.iter().filter(|f| !f.is_trivial()) {
            let d = if f.z == 0.0 {
                "|x|".to_string()
            } else if f.z < 0.0 {
                format!("|x+{}|", -f.z)
            } else {
                format!("|x-{}|", f.z)
            };
            if f.gamma != 0.0 {
                parts.push(format!("{d}^{}", f.gamma));
            }
            if f.log_gamma != 0.0 {
                parts.push(format!("ln(e/{d})^{}", f.log_gamma));
            }
        }
        if let Some(m) = &self.monotone {
            parts.push(format!("g(|x-{}|)", m.xi));
        }
        if let Some(c) = &self.custom {
            parts.push(c.name.clone());
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("")
        }
    }

    /// Canonical label (the JSON spec) used in cache keys and report inputs.
    pub fn label(&self) -> String {
        match self.to_spec() {
            Some(s) => serde_json::to_string(&s).unwrap_or_else(|_| format!("{self:?}")),
            None => format!("{self:?}"),
        }
    }
}

/// `w_n(x) = ρ_n(x)^{-1} ∫_{x-ρ_n(x)}^{x+ρ_n(x)} w(u) du`.
pub fn averaged_weight(w: &Weight, n: usize, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("averaged weight needs n ≥ 1".into()));
    }
    if !x.is_finite() {
        return Err(Error::NonFinite(x));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter(format!("averaged weight at {x} outside [-1, 1]")));
    }
    let r = rho_n(n, x);
    Ok(w.mass(x - r, x + r, 1e-10)? / r)
}

/// `w_n` on a list of points.
pub fn averaged_weight_values(w: &Weight, n: usize, xs: &[f64]) -> Result<Vec<f64>> {
    use rayon::prelude::*;
    xs.par_iter().map(|&x| averaged_weight(w, n, x)).collect()
}

/// Checks the factor hypotheses and that `base` has a finite-stable A*
/// estimate, then builds the generalized Ditzian–Totik product.
pub fn make_gdt_weight(base: Weight, factors: Vec<Factor>) -> Result<Weight> {
    for f in &factors {
        f.validate()?;
    }
    if base.kind() != WeightKind::Constant {
        let ladder = estimate_astar_ladder(&base, &[64, 128, 256])?;
        if ladder.diverging {
            return Err(Error::InvalidWeight(format!(
                "base weight is not A* at the tested resolutions (estimates {:?})",
                ladder.rows.iter().map(|r| r.astar).collect::<Vec<_>>()
            )));
        }
    }
    Weight::gdt(base, factors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        assert_eq!(Weight::one().eval(0.3).unwrap(), 1.0);
        let w = Weight::gdt(Weight::one(), vec![Factor::new(0.0, 1.0, 0.0)]).unwrap();
        assert_eq!(w.eval(0.5).unwrap(), 0.5);
        let phi = Weight::phi_power(1.0).unwrap();
        assert_eq!(phi.eval(1.5).unwrap(), 0.0);
        assert!(phi.eval(f64::NAN).is_err());
        assert!((phi.eval(0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mass_examples() {
        assert!((Weight::one().mass(-1.0, 1.0, 1e-10).unwrap() - 2.0).abs() < 1e-15);
        let lin = Weight::jacobi(&[(1.0, 1.0)]).unwrap();
        assert!((lin.mass(0.0, 1.0, 1e-10).unwrap() - 0.5).abs() < 1e-14);
        let sqrt = Weight::jacobi(&[(0.0, 0.5)]).unwrap();
        assert!((sqrt.mass(0.0, 1.0, 1e-10).unwrap() - 2.0 / 3.0).abs() < 1e-14);
        assert!(sqrt.mass(0.0, 1.0, 0.0).is_err());
        assert!(sqrt.mass(1.0, 0.0, 1e-8).is_err());
        // quadrature path agrees with the closed form
        let two = Weight::jacobi(&[(0.0, 0.5), (0.7, 0.0)]).unwrap();
        let prod = Weight::gdt(two, vec![Factor::new(0.3, 0.0, 0.0)]).unwrap();
        let direct = Weight::custom("sqrt", |x: f64| x.abs().sqrt(), vec![0.0]);
        let v = direct.mass(-0.5, 0.9, 1e-12).unwrap();
        let exact = (2.0 / 3.0) * (0.5_f64.powf(1.5) + 0.9_f64.powf(1.5));
        assert!((v - exact).abs() < 1e-11, "{v} vs {exact}");
        assert!((prod.mass(-0.5, 0.9, 1e-12).unwrap() - exact).abs() < 1e-11);
    }

    #[test]
    fn gdt_examples() {
        let w = make_gdt_weight(Weight::one(), vec![]).unwrap();
        assert_eq!(w.eval(0.2).unwrap(), 1.0);
        let phi = make_gdt_weight(
            Weight::one(),
            vec![Factor::new(-1.0, 0.5, 0.0), Factor::new(1.0, 0.5, 0.0)],
        )
        .unwrap();
        assert!((phi.eval(0.0).unwrap() - 1.0).abs() < 1e-15);
        let lg = make_gdt_weight(Weight::one(), vec![Factor::new(0.0, 1.0, -1.0)]).unwrap();
        let expect = 0.5 / (std::f64::consts::E / 0.5).ln();
        assert!((lg.eval(0.5).unwrap() - expect).abs() < 1e-15);
        assert!(make_gdt_weight(Weight::one(), vec![Factor::new(0.0, 0.0, 1.0)]).is_err());
        assert!(make_gdt_weight(Weight::one(), vec![Factor::new(0.0, -0.1, 0.0)]).is_err());
        assert!(make_gdt_weight(Weight::piecewise_nonexample(), vec![]).is_err());
    }

    #[test]
    fn averaged_weight_examples() {
        let one = Weight::one();
        assert!((averaged_weight(&one, 10, 0.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((averaged_weight(&one, 10, 1.0).unwrap() - 1.0).abs() < 1e-12);
        // 1 - x² : closed form ρ^{-1}[2ρ - 2ρ³/3] = 2 - 2ρ²/3
        let w = Weight::jacobi(&[(-1.0, 1.0), (1.0, 1.0)]).unwrap();
        let r = rho_n(8, 0.0);
        let expect = 2.0 - 2.0 * r * r / 3.0;
        assert!((averaged_weight(&w, 8, 0.0).unwrap() - expect).abs() < 1e-12);
        assert!(averaged_weight(&w, 0, 0.0).is_err());
    }

    #[test]
    fn zero_set_and_breakpoints() {
        let w = Weight::jacobi(&[(-1.0, 0.5), (0.0, 0.3), (0.5, 0.0), (1.0, 0.5)]).unwrap();
        assert_eq!(w.breakpoints(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(w.zero_set(), vec![-1.0, 0.0, 1.0]);
        let lg = Weight::gdt(Weight::one(), vec![Factor::new(0.2, 0.0, -1.0)]).unwrap();
        assert_eq!(lg.zero_set(), vec![0.2]);
    }

    #[test]
    fn monotone_profiles() {
        let p = MonotoneProfile::PowerLog { gamma: 0.5, log_gamma: 2.0 };
        let k = p.doubling_factor(200).unwrap();
        assert!(k > 1.0 && k < 3.0, "{k}");
        let dec = MonotoneProfile::Custom {
            name: "dec".into(),
            eval: Arc::new(|s: f64| 2.0 - s),
        };
        assert!(dec.doubling_factor(64).is_none());
    }
}
