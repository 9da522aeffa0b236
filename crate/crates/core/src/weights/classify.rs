//! Grid estimates of the doubling constant, the adjacent-interval constant
//! `κ`, the A* constant and the W*(Z) comparability constant `c_*`.
//!
//! At resolution `N` the estimators see the nodes `-1 + k/N`, `0 ≤ k ≤ 2N`.
//! Doubling and `κ` are maximised over intervals of length `2^{1-d}`,
//! `0 ≤ d ≤ log₂ N`, starting at every multiple of half their length; this
//! contains the dyadic intervals. The A* estimate uses every pair of nodes.
//! Both families at `N` are contained in those at `2N`, so the estimates are
//! nondecreasing along a doubling ladder.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Weight, DIVERGENCE_GROWTH};
use crate::error::{Error, Result};
use crate::geometry::{chebyshev_grid, main_set, rho_n, ZSet};

const CELL_TOL: f64 = 1e-12;

/// Cell masses of a weight at a fixed resolution.
#[derive(Debug, Clone)]
pub struct MassTable {
    resolution: usize,
    cells: Vec<f64>,
    prefix: Vec<f64>,
    node_values: Vec<f64>,
}

impl MassTable {
    pub fn new(w: &Weight, resolution: usize) -> Result<Self> {
        if resolution < 8 || !resolution.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "resolution {resolution} must be a power of two ≥ 8"
            )));
        }
        let cells_n = 2 * resolution;
        let step = 1.0 / resolution as f64;
        let cells: Vec<f64> = (0..cells_n)
            .into_par_iter()
            .map(|k| {
                let a = -1.0 + k as f64 * step;
                let b = if k + 1 == cells_n { 1.0 } else { -1.0 + (k + 1) as f64 * step };
                w.mass(a, b, CELL_TOL)
            })
            .collect::<Result<_>>()?;
        let mut prefix = Vec::with_capacity(cells_n + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for c in &cells {
            acc += c;
            prefix.push(acc);
        }
        let node_values = (0..=cells_n).map(|k| w.value(node(k, resolution))).collect();
        Ok(MassTable {
            resolution,
            cells,
            prefix,
            node_values,
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Mass between node indices `i ≤ j`, clipped to `[-1, 1]`.
    pub fn mass(&self, i: isize, j: isize) -> f64 {
        let max = self.cells.len() as isize;
        let i = i.clamp(0, max) as usize;
        let j = j.clamp(0, max) as usize;
        if j <= i {
            return 0.0;
        }
        if j - i <= 32 {
            self.cells[i..j].iter().sum()
        } else {
            self.prefix[j] - self.prefix[i]
        }
    }

    pub fn node_value(&self, k: usize) -> f64 {
        self.node_values[k]
    }
}

fn node(k: usize, resolution: usize) -> f64 {
    if k == 2 * resolution {
        1.0
    } else {
        -1.0 + k as f64 / resolution as f64
    }
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    if den > 0.0 {
        Some(num / den)
    } else if num > 0.0 {
        Some(f64::INFINITY)
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublingEstimate {
    pub resolution: usize,
    /// max `w(2I)/w(I)`
    pub doubling: f64,
    /// max `w(I₁)/w(I₂)` over adjacent equal-length pairs
    pub kappa: f64,
    /// an interval of zero mass had a neighbour of positive mass
    pub diverging: bool,
}

/// Doubling and adjacent-interval estimates at one resolution.
pub fn estimate_doubling_constant(w: &Weight, resolution: usize) -> Result<DoublingEstimate> {
    let table = MassTable::new(w, resolution)?;
    Ok(doubling_from_table(&table))
}

fn doubling_from_table(t: &MassTable) -> DoublingEstimate {
    let n = t.resolution as isize;
    let total = 2 * n;
    let mut doubling: f64 = 1.0;
    let mut kappa: f64 = 1.0;
    let mut len = total;
    while len >= 2 {
        let half = len / 2;
        let mut s = 0;
        while s + len <= total {
            let m = t.mass(s, s + len);
            if let Some(r) = ratio(t.mass(s - half, s + len + half), m) {
                doubling = doubling.max(r);
            }
            if s + 2 * len <= total {
                let m2 = t.mass(s + len, s + 2 * len);
                for r in [ratio(m, m2), ratio(m2, m)].into_iter().flatten() {
                    kappa = kappa.max(r);
                }
            }
            s += half;
        }
        len /= 2;
    }
    DoublingEstimate {
        resolution: t.resolution,
        doubling,
        kappa,
        diverging: !(doubling.is_finite() && kappa.is_finite()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AStarEstimate {
    pub resolution: usize,
    /// max over node pairs of `max{w(a), w(b)} (b - a) / w[a, b]`
    pub astar: f64,
    pub diverging: bool,
}

/// A* estimate at one resolution via the endpoint characterisation.
pub fn estimate_astar_constant(w: &Weight, resolution: usize) -> Result<AStarEstimate> {
    let table = MassTable::new(w, resolution)?;
    Ok(astar_from_table(&table))
}

fn astar_from_table(t: &MassTable) -> AStarEstimate {
    let total = 2 * t.resolution;
    let step = 1.0 / t.resolution as f64;
    let astar = (0..total)
        .into_par_iter()
        .map(|i| {
            let mut best: f64 = 0.0;
            let wi = t.node_value(i);
            for j in i + 1..=total {
                let top = wi.max(t.node_value(j));
                if top == 0.0 {
                    continue;
                }
                let len = (j - i) as f64 * step;
                let m = t.mass(i as isize, j as isize);
                best = best.max(if m > 0.0 { top * len / m } else { f64::INFINITY });
            }
            best
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(1.0_f64, f64::max);
    AStarEstimate {
        resolution: t.resolution,
        astar,
        diverging: !astar.is_finite(),
    }
}

/// True when the sequence (indexed by doubling resolutions) is infinite
/// somewhere or grows by more than [`DIVERGENCE_GROWTH`] twice in a row.
pub fn ladder_diverges(values: &[f64]) -> bool {
    if values.iter().any(|v| !v.is_finite()) {
        return true;
    }
    values
        .windows(3)
        .any(|w| w[1] > DIVERGENCE_GROWTH * w[0] && w[2] > DIVERGENCE_GROWTH * w[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderRow {
    pub resolution: usize,
    pub doubling: f64,
    pub kappa: f64,
    pub astar: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_star: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublingLadder {
    pub rows: Vec<DoublingEstimate>,
    pub diverging: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AStarLadder {
    pub rows: Vec<AStarEstimate>,
    pub diverging: bool,
}

fn check_ladder(resolutions: &[usize]) -> Result<()> {
    if resolutions.is_empty() || resolutions.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(format!(
            "resolution ladder {resolutions:?} must be nonempty and increasing"
        )));
    }
    Ok(())
}

pub fn estimate_doubling_ladder(w: &Weight, resolutions: &[usize]) -> Result<DoublingLadder> {
    check_ladder(resolutions)?;
    let rows: Vec<DoublingEstimate> = resolutions
        .iter()
        .map(|&r| estimate_doubling_constant(w, r))
        .collect::<Result<_>>()?;
    let l: Vec<f64> = rows.iter().map(|r| r.doubling).collect();
    let k: Vec<f64> = rows.iter().map(|r| r.kappa).collect();
    let diverging = rows.iter().any(|r| r.diverging) || ladder_diverges(&l) || ladder_diverges(&k);
    Ok(DoublingLadder { rows, diverging })
}

/// A* ladder. Since every A* weight is doubling, the A* estimate is also
/// declared divergent when the doubling ladder diverges.
pub fn estimate_astar_ladder(w: &Weight, resolutions: &[usize]) -> Result<AStarLadder> {
    check_ladder(resolutions)?;
    let mut rows = Vec::new();
    let mut dbl = Vec::new();
    for &r in resolutions {
        let t = MassTable::new(w, r)?;
        rows.push(astar_from_table(&t));
        dbl.push(doubling_from_table(&t));
    }
    let a: Vec<f64> = rows.iter().map(|r| r.astar).collect();
    let l: Vec<f64> = dbl.iter().map(|r| r.doubling).collect();
    let k: Vec<f64> = dbl.iter().map(|r| r.kappa).collect();
    let diverging = ladder_diverges(&a)
        || dbl.iter().any(|d| d.diverging)
        || ladder_diverges(&l)
        || ladder_diverges(&k);
    Ok(AStarLadder { rows, diverging })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WStarCheck {
    pub n: usize,
    /// smallest observed `min(w(x)/w(y), w(y)/w(x))`
    pub c_star: f64,
    pub pairs: usize,
    /// `I_{A,1/n}` was empty
    pub vacuous: bool,
}

const PAIR_OFFSETS: [f64; 10] = [-1.0, -0.75, -0.5, -0.25, -0.125, 0.125, 0.25, 0.5, 0.75, 1.0];

/// Samples pairs `x, y` with `[x, y] ⊂ I_{A,1/n}` and `|x - y| ≤ Bρ_n(x)`
/// and returns the smallest comparability ratio. The weight's own
/// breakpoints inside `I_{A,1/n}` are always sampled, so an undeclared zero
/// there drives the estimate to 0.
pub fn check_wstar_condition(
    w: &Weight,
    z: &ZSet,
    n: usize,
    a: f64,
    b: f64,
    samples: usize,
) -> Result<WStarCheck> {
    if n == 0 || !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidParameter(format!("n = {n}, A = {a}, B = {b}")));
    }
    let set = main_set(z, a, 1.0 / n as f64);
    if set.is_empty() {
        return Ok(WStarCheck {
            n,
            c_star: 1.0,
            pairs: 0,
            vacuous: true,
        });
    }
    let bps = w.breakpoints();
    let mut c_star: f64 = 1.0;
    let mut pairs = 0;
    for &[lo, hi] in set.intervals() {
        let mut xs = chebyshev_grid(lo, hi, samples.max(2));
        xs.extend(bps.iter().copied().filter(|p| (lo..=hi).contains(p)));
        for &x in &xs {
            let reach = b * rho_n(n, x);
            let wx = w.value(x);
            let ys = PAIR_OFFSETS
                .iter()
                .map(|s| x + s * reach)
                .chain(bps.iter().copied().filter(|p| (p - x).abs() <= reach));
            for y in ys {
                if !(lo..=hi).contains(&y) || y == x {
                    continue;
                }
                let wy = w.value(y);
                let r = match (wx > 0.0, wy > 0.0) {
                    (true, true) => (wx / wy).min(wy / wx),
                    (false, false) => continue,
                    _ => 0.0,
                };
                c_star = c_star.min(r);
                pairs += 1;
            }
        }
    }
    Ok(WStarCheck {
        n,
        c_star,
        pairs,
        vacuous: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WStarSweep {
    pub checks: Vec<WStarCheck>,
    pub c_star: f64,
    pub pass: bool,
}

/// `c_*` over a ladder of `n`; passes when every estimate is positive and
/// `1/c_*` does not diverge along the ladder.
pub fn wstar_sweep(w: &Weight, z: &ZSet, ns: &[usize], a: f64, b: f64, samples: usize) -> Result<WStarSweep> {
    let checks: Vec<WStarCheck> = ns
        .iter()
        .map(|&n| check_wstar_condition(w, z, n, a, b, samples))
        .collect::<Result<_>>()?;
    let c_star = checks.iter().map(|c| c.c_star).fold(1.0, f64::min);
    let inv: Vec<f64> = checks
        .iter()
        .filter(|c| !c.vacuous)
        .map(|c| if c.c_star > 0.0 { 1.0 / c.c_star } else { f64::INFINITY })
        .collect();
    let pass = c_star > 0.0 && !ladder_diverges(&inv);
    Ok(WStarSweep { checks, c_star, pass })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightClassReport {
    pub doubling_estimate: f64,
    pub kappa_estimate: f64,
    pub astar_estimate: f64,
    pub wstar_constant_estimate: f64,
    pub resolutions: Vec<usize>,
    pub doubling_diverging: bool,
    pub astar_diverging: bool,
    pub wstar_pass: bool,
    pub diverging: bool,
    pub ladder: Vec<LadderRow>,
}

/// Full classification along a resolution ladder. The W*(Z) check at
/// resolution `N` uses `n = N/8` and `N` samples per component.
pub fn classify_weight(w: &Weight, z: &ZSet, resolutions: &[usize]) -> Result<WeightClassReport> {
    check_ladder(resolutions)?;
    let mut ladder = Vec::new();
    let mut dbl = Vec::new();
    let mut ast = Vec::new();
    for &r in resolutions {
        let t = MassTable::new(w, r)?;
        let d = doubling_from_table(&t);
        let a = astar_from_table(&t);
        dbl.push(d);
        ast.push(a);
        ladder.push(LadderRow {
            resolution: r,
            doubling: d.doubling,
            kappa: d.kappa,
            astar: a.astar,
            c_star: None,
        });
    }
    let ns: Vec<usize> = resolutions.iter().map(|&r| (r / 8).max(1)).collect();
    let sweep = wstar_sweep(w, z, &ns, 1.0, 1.0, resolutions[resolutions.len() - 1].min(512))?;
    for (row, c) in ladder.iter_mut().zip(&sweep.checks) {
        row.c_star = Some(c.c_star);
    }
    let l: Vec<f64> = dbl.iter().map(|d| d.doubling).collect();
    let k: Vec<f64> = dbl.iter().map(|d| d.kappa).collect();
    let a: Vec<f64> = ast.iter().map(|d| d.astar).collect();
    let doubling_diverging = dbl.iter().any(|d| d.diverging) || ladder_diverges(&l) || ladder_diverges(&k);
    let astar_diverging = doubling_diverging || ladder_diverges(&a);
    let last = ladder.len() - 1;
    Ok(WeightClassReport {
        doubling_estimate: ladder[last].doubling,
        kappa_estimate: ladder[last].kappa,
        astar_estimate: ladder[last].astar,
        wstar_constant_estimate: sweep.c_star,
        resolutions: resolutions.to_vec(),
        doubling_diverging,
        astar_diverging,
        wstar_pass: sweep.pass,
        diverging: doubling_diverging || astar_diverging,
        ladder,
    })
}
