//! Symmetric differences and the weighted moduli of smoothness: main part
//! `Ω`, complete `ω`, restricted `Ω_S`, Ditzian–Totik `ω_φ` and the
//! Mastroianni–Totik `ω*`.
//!
//! Suprema are grid maxima: `h` runs over `t θ^k` and `x` over a shared
//! [`SampleGrid`]. Stencils that hit a singular point of `f` are excluded
//! and tallied.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::TargetFunction;
use crate::geometry::{main_set, neighborhood, phi, IntervalSet, SampleGrid, ZSet};
use crate::minimax::ApproxCache;
use crate::weights::Weight;

/// Ratio of consecutive `h` samples.
pub const THETA: f64 = 0.85;
/// Largest supported difference order.
pub const MAX_ORDER: usize = 20;

/// `binom(r, i)`, exact for `r ≤ 20`.
pub fn binomial(r: usize, i: usize) -> u64 {
    if i > r {
        return 0;
    }
    let k = i.min(r - i) as u64;
    let mut c: u64 = 1;
    for j in 0..k {
        c = c * (r as u64 - j) / (j + 1);
    }
    c
}

/// Outcome of one difference evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stencil {
    Value(f64),
    Outside,
    Singular,
}

/// `Δ_h^r(f, x)` without any containment test.
pub fn raw_difference(f: &TargetFunction, h: f64, r: usize, x: f64) -> Stencil {
    let start = x - 0.5 * r as f64 * h;
    let mut acc = 0.0;
    for i in 0..=r {
        let Some(v) = f.try_eval(start + i as f64 * h) else { return Stencil::Singular };
        let c = binomial(r, i) as f64;
        if (r - i).is_multiple_of(2) {
            acc += c * v;
        } else {
            acc -= c * v;
        }
    }
    Stencil::Value(acc)
}

fn stencil_in(set: &IntervalSet, f: &TargetFunction, h: f64, r: usize, x: f64) -> Stencil {
    let half = 0.5 * r as f64 * h;
    if !set.contains_segment(x - half, x + half) {
        return Stencil::Outside;
    }
    raw_difference(f, h, r, x)
}

fn check_order(r: usize) -> Result<()> {
    if r == 0 || r > MAX_ORDER {
        return Err(Error::InvalidParameter(format!("order r = {r} outside 1..={MAX_ORDER}")));
    }
    Ok(())
}

/// `Δ_h^r(f, x, J)`: zero unless `[x - rh/2, x + rh/2] ⊂ J`; a stencil
/// through a singular point of `f` also gives zero.
pub fn symmetric_difference(f: &TargetFunction, h: f64, r: usize, x: f64, j: &IntervalSet) -> Result<f64> {
    check_order(r)?;
    if !(h > 0.0) || !x.is_finite() {
        return Err(Error::InvalidParameter(format!("h = {h}, x = {x}")));
    }
    Ok(match stencil_in(j, f, h, r, x) {
        Stencil::Value(v) => v,
        _ => 0.0,
    })
}

/// Both sides of `Δ_{2h}^r(f, x) = Σ_{i ∈ {0,1}^r} Δ_h^r(f, x + (|i| - r/2) h)`.
pub fn doubling_identity(f: &TargetFunction, h: f64, r: usize, x: f64) -> Result<(f64, f64)> {
    check_order(r)?;
    let val = |s: Stencil| match s {
        Stencil::Value(v) => Ok(v),
        _ => Err(Error::InvalidParameter(format!("stencil at {x} hits a singular point"))),
    };
    let lhs = val(raw_difference(f, 2.0 * h, r, x))?;
    let mut rhs = 0.0;
    for k in 0..=r {
        let shift = (k as f64 - 0.5 * r as f64) * h;
        rhs += binomial(r, k) as f64 * val(raw_difference(f, h, r, x + shift))?;
    }
    Ok((lhs, rhs))
}

/// `t θ^k`, `k < count`.
pub fn h_values(t: f64, count: usize) -> Vec<f64> {
    (0..count.max(1)).map(|k| t * THETA.powi(k as i32)).collect()
}

/// Result of a grid supremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusValue {
    pub value: f64,
    pub argmax_h: Option<f64>,
    pub argmax_x: Option<f64>,
    pub excluded_stencils: usize,
    /// No admissible stencil at any `h`.
    pub vacuous: bool,
}

impl ModulusValue {
    fn empty() -> Self {
        ModulusValue { value: 0.0, argmax_h: None, argmax_x: None, excluded_stencils: 0, vacuous: true }
    }

    fn merge(self, other: ModulusValue) -> ModulusValue {
        let excluded = self.excluded_stencils + other.excluded_stencils;
        let vacuous = self.vacuous && other.vacuous;
        let mut best = if other.value > self.value || (self.argmax_h.is_none() && other.argmax_h.is_some()) {
            other
        } else {
            self
        };
        best.excluded_stencils = excluded;
        best.vacuous = vacuous;
        best
    }
}

/// Max of `w(x) |Δ_{hφ(x)}^r(f, x)|` over `hs × grid`, where the stencil must
/// lie in `set(h)`.
fn grid_sup<S>(f: &TargetFunction, w: &Weight, r: usize, hs: &[f64], grid: &[f64], set: S) -> ModulusValue
where
    S: Fn(f64) -> IntervalSet + Sync,
{
    hs.par_iter()
        .map(|&h| {
            let s = set(h);
            let mut acc = ModulusValue::empty();
            if s.is_empty() {
                return acc;
            }
            for &x in grid {
                let step = h * phi(x);
                if step <= 0.0 {
                    continue;
                }
                match stencil_in(&s, f, step, r, x) {
                    Stencil::Value(v) => {
                        let val = w.value(x) * v.abs();
                        if acc.vacuous || val > acc.value {
                            acc.value = val;
                            acc.argmax_h = Some(h);
                            acc.argmax_x = Some(x);
                        }
                        acc.vacuous = false;
                    }
                    Stencil::Singular => acc.excluded_stencils += 1,
                    Stencil::Outside => {}
                }
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(ModulusValue::empty(), ModulusValue::merge)
}

/// Everything a modulus computation needs.
#[derive(Debug, Clone)]
pub struct ModulusQuery {
    pub f: TargetFunction,
    pub w: Weight,
    pub z: ZSet,
    pub r: usize,
    pub a: f64,
    pub b: f64,
    pub t: f64,
    pub h_grid: usize,
    pub x_grid: usize,
}

impl ModulusQuery {
    pub fn validate(&self) -> Result<()> {
        check_order(self.r)?;
        for (name, v) in [("A", self.a), ("B", self.b), ("t", self.t)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
            }
        }
        if self.h_grid < 16 || self.x_grid < 16 {
            return Err(Error::InvalidParameter(format!(
                "grids must be ≥ 16 (h_grid = {}, x_grid = {})",
                self.h_grid, self.x_grid
            )));
        }
        Ok(())
    }

    pub fn sample_grid(&self) -> SampleGrid {
        SampleGrid::new(self.x_grid, &self.z)
    }

    /// `h` samples for `Ω(f, A, t)`, starting at `min(t, √(2/A))`.
    pub fn main_h_values(&self) -> Vec<f64> {
        h_values(self.t.min((2.0 / self.a).sqrt()), self.h_grid)
    }
}

/// `Ω(f, A, ·)` over explicit `h` samples.
pub fn main_part_on(f: &TargetFunction, w: &Weight, z: &ZSet, r: usize, a: f64, hs: &[f64], grid: &[f64]) -> ModulusValue {
    grid_sup(f, w, r, hs, grid, |h| main_set(z, a, h))
}

/// Main part modulus `Ω_φ^r(f, A, t)_w`.
pub fn main_part_modulus(q: &ModulusQuery) -> Result<ModulusValue> {
    q.validate()?;
    let grid = q.sample_grid();
    Ok(main_part_on(&q.f, &q.w, &q.z, q.r, q.a, &q.main_h_values(), grid.points()))
}

/// `Ω` plus the local errors `E_r(f, Z^j_{B,t})_w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompleteModulus {
    pub value: f64,
    pub main: ModulusValue,
    pub local: Vec<f64>,
}

/// `E_r(f, J)_w` on the grid points inside `J`.
pub fn local_error(f: &TargetFunction, w: &Weight, r: usize, j: [f64; 2], grid: &SampleGrid, cache: &ApproxCache) -> Result<f64> {
    let pts = grid.within(j[0], j[1]);
    cache.error_on_points(f, w, j, r, pts)
}

/// Sum of `E_r(f, Z^j_{B,t})_w` over `j`.
pub fn local_errors(
    f: &TargetFunction,
    w: &Weight,
    z: &ZSet,
    r: usize,
    b: f64,
    t: f64,
    grid: &SampleGrid,
    cache: &ApproxCache,
) -> Result<Vec<f64>> {
    z.points()
        .iter()
        .map(|&zj| local_error(f, w, r, neighborhood(zj, b, t), grid, cache))
        .collect()
}

/// Complete modulus over explicit main-part `h` samples.
pub fn complete_on(
    f: &TargetFunction,
    w: &Weight,
    z: &ZSet,
    r: usize,
    a: f64,
    b: f64,
    t: f64,
    hs: &[f64],
    grid: &SampleGrid,
    cache: &ApproxCache,
) -> Result<CompleteModulus> {
    let main = main_part_on(f, w, z, r, a, hs, grid.points());
    let local = local_errors(f, w, z, r, b, t, grid, cache)?;
    Ok(CompleteModulus { value: main.value + local.iter().sum::<f64>(), main, local })
}

/// Complete modulus `ω_φ^r(f, A, B, t)_w`.
pub fn complete_modulus(q: &ModulusQuery, cache: &ApproxCache) -> Result<CompleteModulus> {
    q.validate()?;
    let grid = q.sample_grid();
    let t_local = q.t.min((2.0 / q.b).sqrt().max((2.0 / q.a).sqrt()));
    complete_on(&q.f, &q.w, &q.z, q.r, q.a, q.b, t_local, &q.main_h_values(), &grid, cache)
}

/// `Ω_φ^r(f, t)_{S,w}` over explicit `h` samples.
pub fn restricted_on(f: &TargetFunction, w: &Weight, r: usize, s: &IntervalSet, hs: &[f64], grid: &[f64]) -> ModulusValue {
    grid_sup(f, w, r, hs, grid, |_| s.clone())
}

/// Restricted main part modulus on a fixed set `S`.
pub fn restricted_modulus(
    f: &TargetFunction,
    w: &Weight,
    r: usize,
    t: f64,
    s: &IntervalSet,
    h_grid: usize,
    grid: &SampleGrid,
) -> Result<ModulusValue> {
    check_order(r)?;
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("t = {t} must be positive")));
    }
    Ok(restricted_on(f, w, r, s, &h_values(t, h_grid), grid.points()))
}

/// Weighted Ditzian–Totik modulus `ω_φ^r(f, t)_w`.
pub fn dt_modulus(f: &TargetFunction, w: &Weight, r: usize, t: f64, h_grid: usize, grid: &SampleGrid) -> Result<ModulusValue> {
    restricted_modulus(f, w, r, t, &IntervalSet::whole(), h_grid, grid)
}

/// `ω*` split into its pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MtModulus {
    pub value: f64,
    pub differences: Vec<f64>,
    pub local: Vec<f64>,
}

fn mt_shape(z: &ZSet) -> Result<()> {
    let p = z.points();
    if p.len() < 3 || p[0] != -1.0 || p[p.len() - 1] != 1.0 {
        return Err(Error::InvalidParameter(format!(
            "ω* needs M ≥ 3 points with z_1 = -1 and z_M = 1, got {p:?}"
        )));
    }
    Ok(())
}

/// `I_{j,h}` (zero-based `j`).
pub fn mt_i_interval(z: &ZSet, j: usize, h: f64) -> [f64; 2] {
    let p = z.points();
    let m = p.len();
    if j == 0 {
        [-1.0, (-1.0 + h * h).min(1.0)]
    } else if j == m - 1 {
        [(1.0 - h * h).max(-1.0), 1.0]
    } else {
        [(p[j] - h).max(-1.0), (p[j] + h).min(1.0)]
    }
}

/// `J_{j,h}` between `z_j` and `z_{j+1}` (zero-based `j`), `None` when empty.
pub fn mt_j_interval(z: &ZSet, j: usize, h: f64) -> Option<[f64; 2]> {
    let p = z.points();
    let m = p.len();
    let lo = if j == 0 { -1.0 + h * h } else { p[j] + h };
    let hi = if j + 1 == m - 1 { 1.0 - h * h } else { p[j + 1] - h };
    (lo <= hi).then_some([lo, hi])
}

/// `ω*` over explicit `h` samples; `t` sets the local intervals.
pub fn mt_on(
    f: &TargetFunction,
    w: &Weight,
    z: &ZSet,
    r: usize,
    t: f64,
    hs: &[f64],
    grid: &SampleGrid,
    cache: &ApproxCache,
) -> Result<MtModulus> {
    mt_shape(z)?;
    check_order(r)?;
    let m = z.len();
    let differences: Vec<f64> = (0..m - 1)
        .map(|j| {
            grid_sup(f, w, r, hs, grid.points(), |h| match mt_j_interval(z, j, h) {
                Some([lo, hi]) => IntervalSet::single(lo, hi),
                None => IntervalSet::empty(),
            })
            .value
        })
        .collect();
    let local = (0..m)
        .map(|j| local_error(f, w, r, mt_i_interval(z, j, t), grid, cache))
        .collect::<Result<Vec<_>>>()?;
    Ok(MtModulus { value: differences.iter().sum::<f64>() + local.iter().sum::<f64>(), differences, local })
}

/// Mastroianni–Totik modulus `ω*(f, t)`.
pub fn mt_modulus(
    f: &TargetFunction,
    w: &Weight,
    z: &ZSet,
    r: usize,
    t: f64,
    h_grid: usize,
    grid: &SampleGrid,
    cache: &ApproxCache,
) -> Result<MtModulus> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("t = {t} must be positive")));
    }
    mt_on(f, w, z, r, t, &h_values(t, h_grid), grid, cache)
}

/// `A' = max{(1 - z_2²)^{-1/2}, (1 - z_{M-1}²)^{-1/2}}`.
pub fn mt_constant(z: &ZSet) -> Result<f64> {
    mt_shape(z)?;
    let p = z.points();
    let m = p.len();
    Ok((1.0 / phi(p[1])).max(1.0 / phi(p[m - 2])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheb::ChebPoly;

    fn tf(label: &str, g: fn(f64) -> f64) -> TargetFunction {
        TargetFunction::new(label, g, vec![])
    }

    #[test]
    fn binomials_are_exact() {
        assert_eq!(binomial(20, 10), 184_756);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
    }

    #[test]
    fn difference_examples() {
        let whole = IntervalSet::whole();
        let cube = tf("x^3", |x| x * x * x);
        let v = symmetric_difference(&cube, 0.1, 3, 0.2, &whole).unwrap();
        assert!((v - 6.0 * 1e-3).abs() < 1e-15);
        let sq = tf("x^2", |x| x * x);
        assert!(symmetric_difference(&sq, 0.1, 3, 0.3, &whole).unwrap().abs() < 1e-15);
        let narrow = IntervalSet::single(0.0, 0.2);
        assert_eq!(symmetric_difference(&sq, 0.5, 2, 0.1, &narrow).unwrap(), 0.0);
        let sing = TargetFunction::new("1/x", |x| 1.0 / x, vec![0.0]);
        assert_eq!(symmetric_difference(&sing, 0.1, 2, 0.0, &whole).unwrap(), 0.0);
    }

    #[test]
    fn doubling_identity_holds() {
        let e = tf("exp", f64::exp);
        let (l, r) = doubling_identity(&e, 0.05, 2, 0.1).unwrap();
        assert!((l - r).abs() < 1e-12);
    }

    #[test]
    fn main_part_examples() {
        let z = ZSet::endpoints();
        let q = ModulusQuery {
            f: tf("x", |x| x),
            w: Weight::one(),
            z: z.clone(),
            r: 1,
            a: 1.0,
            b: 1.0,
            t: 0.1,
            h_grid: 40,
            x_grid: 2000,
        };
        let v = main_part_modulus(&q).unwrap();
        assert!((v.value - 0.1).abs() < 1e-4, "{}", v.value);
        let sat = ModulusQuery { t: 2f64.sqrt(), ..q.clone() };
        let big = ModulusQuery { t: 3.0, ..q.clone() };
        assert_eq!(main_part_modulus(&sat).unwrap().value, main_part_modulus(&big).unwrap().value);
    }

    #[test]
    fn complete_modulus_of_abs() {
        let q = ModulusQuery {
            f: tf("|x|", f64::abs),
            w: Weight::one(),
            z: ZSet::new(vec![-1.0, 0.0, 1.0]).unwrap(),
            r: 2,
            a: 1.0,
            b: 1.0,
            t: 0.2,
            h_grid: 30,
            x_grid: 2000,
        };
        let cache = ApproxCache::new();
        let c = complete_modulus(&q, &cache).unwrap();
        assert!(c.main.value < 1e-12);
        assert!((c.value - 0.12).abs() < 1e-3, "{:?}", c);
    }

    #[test]
    fn dt_examples() {
        let grid = SampleGrid::new(4000, &ZSet::endpoints());
        let sq = tf("x^2", |x| x * x);
        let v = dt_modulus(&sq, &Weight::one(), 1, 0.1, 20, &grid).unwrap();
        assert!((v.value - 0.1).abs() < 1e-5, "{}", v.value);
        let cube = tf("x^3", |x| x * x * x);
        let v3 = dt_modulus(&cube, &Weight::one(), 3, 0.1, 20, &grid).unwrap();
        assert!((v3.value - 6e-3).abs() < 1e-6, "{}", v3.value);
    }

    #[test]
    fn mt_modulus_annihilates_linear() {
        let z = ZSet::new(vec![-1.0, 0.0, 1.0]).unwrap();
        let grid = SampleGrid::new(500, &z);
        let p = TargetFunction::from_poly("p", ChebPoly::new([-1.0, 1.0], vec![0.3, -0.7]).unwrap());
        let m = mt_modulus(&p, &Weight::one(), &z, 2, 0.25, 20, &grid, &ApproxCache::new()).unwrap();
        assert!(m.value < 1e-12);
        assert!(mt_modulus(&p, &Weight::one(), &ZSet::endpoints(), 2, 0.25, 20, &grid, &ApproxCache::new()).is_err());
        assert_eq!(mt_constant(&z).unwrap(), 1.0);
    }
}
