//! Point and interval machinery on `[-1, 1]`: the step functions `ρ`, `ρ_n`,
//! the variants of `φ`, singular neighbourhoods, main sets, difference
//! domains and Chebyshev grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `φ(x) = √(1 - x²)`, zero outside `[-1, 1]`.
#[inline]
pub fn phi(x: f64) -> f64 {
    let v = (1.0 - x) * (1.0 + x);
    if v > 0.0 {
        v.sqrt()
    } else {
        0.0
    }
}

/// `ρ(h, x) = h φ(x) + h²`.
#[inline]
pub fn rho(h: f64, x: f64) -> f64 {
    h * phi(x) + h * h
}

/// `ρ_n(x) = ρ(1/n, x)`.
#[inline]
pub fn rho_n(n: usize, x: f64) -> f64 {
    rho(1.0 / n as f64, x)
}

/// `φ_n(x) = φ(x) + 1/n`.
#[inline]
pub fn phi_n(n: usize, x: f64) -> f64 {
    phi(x) + 1.0 / n as f64
}

/// `λ_n(x) = max{φ(x), 1/n}`.
#[inline]
pub fn lambda_n(n: usize, x: f64) -> f64 {
    phi(x).max(1.0 / n as f64)
}

/// `(φ(x), φ_n(x), λ_n(x))`.
pub fn varphi_variants(n: usize, x: f64) -> (f64, f64, f64) {
    (phi(x), phi_n(n, x), lambda_n(n, x))
}

/// Which `φ`-like function scales a weighted norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Phi,
    PhiN,
    LambdaN,
    RhoN,
}

impl Variant {
    pub fn value(self, n: usize, x: f64) -> f64 {
        match self {
            Variant::Phi => phi(x),
            Variant::PhiN => phi_n(n, x),
            Variant::LambdaN => lambda_n(n, x),
            Variant::RhoN => rho_n(n, x),
        }
    }
}

/// Ordered singular points `-1 ≤ z_1 < … < z_M ≤ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ZSet {
    points: Vec<f64>,
}

impl TryFrom<Vec<f64>> for ZSet {
    type Error = Error;

    fn try_from(points: Vec<f64>) -> Result<Self> {
        ZSet::new(points)
    }
}

impl From<ZSet> for Vec<f64> {
    fn from(z: ZSet) -> Self {
        z.points
    }
}

impl ZSet {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("Z must contain at least one point".into()));
        }
        if points.iter().any(|p| !p.is_finite() || !(-1.0..=1.0).contains(p)) {
            return Err(Error::InvalidParameter(format!("Z = {points:?} has points outside [-1, 1]")));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!("Z = {points:?} is not strictly increasing")));
        }
        Ok(ZSet { points })
    }

    /// `Z = {-1, 1}`, the classical Ditzian–Totik setting.
    pub fn endpoints() -> Self {
        ZSet { points: vec![-1.0, 1.0] }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Smallest positive gap among `z_j - z_{j-1}`, `1 ≤ j ≤ M+1`, with
    /// `z_0 = -1` and `z_{M+1} = 1`.
    pub fn spacing(&self) -> f64 {
        let mut ext = Vec::with_capacity(self.points.len() + 2);
        ext.push(-1.0);
        ext.extend_from_slice(&self.points);
        ext.push(1.0);
        ext.windows(2)
            .map(|w| w[1] - w[0])
            .filter(|&g| g > 0.0)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Sorted, disjoint closed intervals inside `[-1, 1]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalSet {
    intervals: Vec<[f64; 2]>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    pub fn single(lo: f64, hi: f64) -> Self {
        let lo = lo.max(-1.0);
        let hi = hi.min(1.0);
        if hi > lo {
            IntervalSet { intervals: vec![[lo, hi]] }
        } else {
            IntervalSet::empty()
        }
    }

    pub fn whole() -> Self {
        IntervalSet::single(-1.0, 1.0)
    }

    /// Builds from arbitrary intervals; degenerate ones are dropped and
    /// overlapping ones merged.
    pub fn from_intervals(mut raw: Vec<[f64; 2]>) -> Self {
        raw.retain(|iv| iv[1] > iv[0]);
        raw.sort_by(|a, b| a[0].total_cmp(&b[0]));
        let mut out: Vec<[f64; 2]> = Vec::with_capacity(raw.len());
        for iv in raw {
            match out.last_mut() {
                Some(last) if iv[0] <= last[1] => last[1] = last[1].max(iv[1]),
                _ => out.push(iv),
            }
        }
        IntervalSet { intervals: out }
    }

    pub fn intervals(&self) -> &[[f64; 2]] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv[0] <= x && x <= iv[1])
    }

    /// Whether `[lo, hi]` lies inside a single component.
    pub fn contains_segment(&self, lo: f64, hi: f64) -> bool {
        // components are sorted; find the last one starting at or before lo
        let idx = self.intervals.partition_point(|iv| iv[0] <= lo);
        idx > 0 && hi <= self.intervals[idx - 1][1]
    }

    /// Total length.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|iv| iv[1] - iv[0]).sum()
    }

    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.intervals.iter().all(|iv| other.contains_segment(iv[0], iv[1]))
    }
}

/// `Z^j_{A,h} = [z_j - Aρ(h, z_j), z_j + Aρ(h, z_j)] ∩ [-1, 1]`, with
/// `j` one-based.
pub fn singular_neighborhood(z: &ZSet, j: usize, a: f64, h: f64) -> Result<[f64; 2]> {
    if j == 0 || j > z.len() {
        return Err(Error::InvalidParameter(format!("index {j} outside 1..={}", z.len())));
    }
    if !(a > 0.0 && h > 0.0) {
        return Err(Error::InvalidParameter(format!("A = {a}, h = {h} must be positive")));
    }
    Ok(neighborhood(z.points()[j - 1], a, h))
}

pub(crate) fn neighborhood(zj: f64, a: f64, h: f64) -> [f64; 2] {
    let r = a * rho(h, zj);
    [(zj - r).max(-1.0), (zj + r).min(1.0)]
}

/// `I_{A,h}`: the closure of `[-1, 1]` minus all singular neighbourhoods.
pub fn main_set(z: &ZSet, a: f64, h: f64) -> IntervalSet {
    let mut holes: Vec<[f64; 2]> = z.points().iter().map(|&zj| neighborhood(zj, a, h)).collect();
    holes.sort_by(|p, q| p[0].total_cmp(&q[0]));
    let mut out = Vec::new();
    let mut cursor = -1.0_f64;
    for [lo, hi] in holes {
        if lo > cursor {
            out.push([cursor, lo]);
        }
        cursor = cursor.max(hi);
    }
    if cursor < 1.0 {
        out.push([cursor, 1.0]);
    }
    IntervalSet::from_intervals(out)
}

/// Grid points `x` whose stencil `[x - rhφ(x)/2, x + rhφ(x)/2]` lies in
/// `I_{A,h}`.
pub fn difference_domain(z: &ZSet, a: f64, h: f64, r: usize, grid: &[f64]) -> Vec<f64> {
    let set = main_set(z, a, h);
    domain_in(&set, h, r, grid)
}

pub(crate) fn domain_in(set: &IntervalSet, h: f64, r: usize, grid: &[f64]) -> Vec<f64> {
    if set.is_empty() {
        return Vec::new();
    }
    grid.iter()
        .copied()
        .filter(|&x| {
            let half = 0.5 * r as f64 * h * phi(x);
            set.contains_segment(x - half, x + half)
        })
        .collect()
}

/// `x_i = cos(iπ/n)`, `i = 0..=n`, decreasing from 1 to -1.
pub fn chebyshev_partition(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("Chebyshev partition needs n ≥ 1".into()));
    }
    Ok((0..=n).map(|i| cheb_node(i, n)).collect())
}

/// `cos(iπ/n)` with exact values at the symmetric points.
fn cheb_node(i: usize, n: usize) -> f64 {
    if 2 * i == n {
        return 0.0;
    }
    if 2 * i > n {
        return -cheb_node(n - i, n);
    }
    // sin form is more accurate near the ends
    let theta = std::f64::consts::PI * (n as f64 - 2.0 * i as f64) / (2.0 * n as f64);
    theta.sin()
}

/// `intervals + 1` Chebyshev extreme points mapped onto `[a, b]`, ascending,
/// endpoints included.
pub fn chebyshev_grid(a: f64, b: f64, intervals: usize) -> Vec<f64> {
    let k = intervals.max(1);
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let mut pts: Vec<f64> = (0..=k).rev().map(|i| c + r * cheb_node(i, k)).collect();
    pts[0] = a;
    pts[k] = b;
    pts
}

/// Shared x-grid for suprema: Chebyshev points on `[-1, 1]` plus geometric
/// clusters approaching every point of `Z` from both sides.
#[derive(Debug, Clone)]
pub struct SampleGrid {
    points: Vec<f64>,
}

/// Ratio between consecutive cluster offsets.
pub const CLUSTER_RATIO: f64 = 0.92;
/// Smallest cluster offset.
pub const CLUSTER_FLOOR: f64 = 1e-9;

impl SampleGrid {
    pub fn new(x_grid: usize, z: &ZSet) -> Self {
        let mut pts = chebyshev_grid(-1.0, 1.0, x_grid.max(2));
        for &zj in z.points() {
            pts.push(zj);
            let mut d = 2.0;
            while d > CLUSTER_FLOOR {
                for p in [zj - d, zj + d] {
                    if (-1.0..=1.0).contains(&p) {
                        pts.push(p);
                    }
                }
                d *= CLUSTER_RATIO;
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        SampleGrid { points: pts }
    }

    pub fn from_points(mut points: Vec<f64>) -> Self {
        points.retain(|p| (-1.0..=1.0).contains(p));
        points.sort_by(f64::total_cmp);
        points.dedup();
        SampleGrid { points }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Grid points in `[lo, hi]`.
    pub fn within(&self, lo: f64, hi: f64) -> &[f64] {
        let s = self.points.partition_point(|&p| p < lo);
        let e = self.points.partition_point(|&p| p <= hi);
        &self.points[s..e.max(s)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_examples() {
        assert_eq!(rho(1.0, 0.0), 2.0);
        assert_eq!(rho_n(7, 1.0), 1.0 / 49.0);
        assert_eq!(rho_n(7, -1.0), 1.0 / 49.0);
        assert_eq!(rho(0.5, 0.0), 0.75);
    }

    #[test]
    fn varphi_examples() {
        assert_eq!(varphi_variants(4, 0.0), (1.0, 1.25, 1.0));
        assert_eq!(varphi_variants(4, 1.0), (0.0, 0.25, 0.25));
        let (p, pn, l) = varphi_variants(2, 3f64.sqrt() / 2.0);
        assert!((p - 0.5).abs() < 1e-15 && (pn - 1.0).abs() < 1e-15 && (l - 0.5).abs() < 1e-15);
    }

    #[test]
    fn neighborhood_examples() {
        let z0 = ZSet::new(vec![0.0]).unwrap();
        let [lo, hi] = singular_neighborhood(&z0, 1, 1.0, 0.1).unwrap();
        assert!((lo + 0.11).abs() < 1e-15 && (hi - 0.11).abs() < 1e-15);
        let z1 = ZSet::new(vec![1.0]).unwrap();
        let [lo, hi] = singular_neighborhood(&z1, 1, 1.0, 0.1).unwrap();
        assert!((lo - 0.99).abs() < 1e-15 && hi == 1.0);
        assert_eq!(singular_neighborhood(&z0, 1, 200.0, 0.1).unwrap(), [-1.0, 1.0]);
        assert!(singular_neighborhood(&z0, 2, 1.0, 0.1).is_err());
    }

    #[test]
    fn main_set_examples() {
        let z0 = ZSet::new(vec![0.0]).unwrap();
        let s = main_set(&z0, 1.0, 0.1);
        assert_eq!(s.intervals().len(), 2);
        assert_eq!(s.intervals()[0][0], -1.0);
        assert!((s.intervals()[0][1] + 0.11).abs() < 1e-15);
        assert!((s.intervals()[1][0] - 0.11).abs() < 1e-15);
        let s = main_set(&ZSet::endpoints(), 1.0, 0.1);
        assert_eq!(s.intervals().len(), 1);
        assert!((s.intervals()[0][0] + 0.99).abs() < 1e-15 && (s.intervals()[0][1] - 0.99).abs() < 1e-15);
        assert!(main_set(&z0, 1.0, 2.0).is_empty());
    }

    #[test]
    fn domain_examples() {
        let d = difference_domain(&ZSet::endpoints(), 1.0, 0.1, 1, &[0.0]);
        assert_eq!(d, vec![0.0]);
        let z0 = ZSet::new(vec![0.0]).unwrap();
        assert!(difference_domain(&z0, 1.0, 0.1, 2, &[0.05]).is_empty());
        let grid = chebyshev_grid(-1.0, 1.0, 64);
        assert!(difference_domain(&z0, 1.0, 2f64.sqrt(), 1, &grid).is_empty());
    }

    #[test]
    fn partition_examples() {
        assert_eq!(chebyshev_partition(2).unwrap(), vec![1.0, 0.0, -1.0]);
        let p = chebyshev_partition(4).unwrap();
        let h = 2f64.sqrt() / 2.0;
        for (a, b) in p.iter().zip([1.0, h, 0.0, -h, -1.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(chebyshev_partition(0).is_err());
    }

    #[test]
    fn spacing_ignores_zero_gaps() {
        let z = ZSet::new(vec![-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(z.spacing(), 1.0);
        let z = ZSet::new(vec![-1.0, 0.5]).unwrap();
        assert_eq!(z.spacing(), 0.5);
        assert!(ZSet::new(vec![0.5, 0.2]).is_err());
        assert!(ZSet::new(vec![]).is_err());
    }

    #[test]
    fn zset_json_is_sorted_array() {
        let z: ZSet = serde_json::from_str("[-1, 0, 1]").unwrap();
        assert_eq!(z.points(), &[-1.0, 0.0, 1.0]);
        assert!(serde_json::from_str::<ZSet>("[1, 0]").is_err());
        let s = serde_json::to_string(&IntervalSet::single(-0.5, 0.5)).unwrap();
        assert_eq!(s, "[[-0.5,0.5]]");
    }

    #[test]
    fn sample_grid_clusters_near_singular_points() {
        let z = ZSet::new(vec![-1.0, 0.0, 1.0]).unwrap();
        let g = SampleGrid::new(64, &z);
        assert!(g.points().windows(2).all(|w| w[0] < w[1]));
        assert!(g.within(-1e-6, 1e-6).len() > 20);
        assert_eq!(g.points()[0], -1.0);
    }
}
