//! Discrete weighted minimax approximation `E_n(f, I)_w` by polynomials of
//! degree `≤ n - 1`.
//!
//! The primary solver is a multiple-exchange iteration on the weighted
//! residual over the grid points where `w` does not vanish; a linear program
//! on the whole grid takes over on stagnation.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use serde::{Deserialize, Serialize};

use crate::cheb::ChebPoly;
use crate::error::{Error, Result};
use crate::function::TargetFunction;
use crate::geometry::chebyshev_grid;
use crate::weights::Weight;

/// Weight values below this are treated as zero constraints.
pub const WEIGHT_FLOOR: f64 = 1e-14;
/// Minimum ratio of grid intervals to the dimension `n`.
pub const MIN_GRID_FACTOR: usize = 8;

const MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Interpolation,
    Exchange,
    LinearProgram,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinimaxResult {
    pub poly: ChebPoly,
    /// `max |w (f - p)|` over the grid.
    pub error: f64,
    /// Levelled error of the last reference (equals `error` at convergence).
    pub levelled_error: f64,
    /// One signed extremum per maximal run of constant residual sign.
    pub residual_extrema: Vec<(f64, f64)>,
    pub iterations: usize,
    pub grid_size: usize,
    pub method: Method,
}

impl MinimaxResult {
    /// Length of the longest alternating chain among the residual extrema
    /// whose magnitude is within `tol` of the error.
    pub fn alternations(&self, tol: f64) -> usize {
        let mut count = 0;
        let mut last = 0.0_f64;
        for &(_, r) in &self.residual_extrema {
            if r.abs() < self.error - tol || r == 0.0 {
                continue;
            }
            if count == 0 || r.signum() != last {
                count += 1;
                last = r.signum();
            }
        }
        count
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimaxOptions {
    /// Relative gap between the grid maximum and the levelled error accepted
    /// as converged.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for MinimaxOptions {
    fn default() -> Self {
        MinimaxOptions { tol: 1e-12, max_iter: MAX_ITER }
    }
}

/// `E_n(f, I)_w` on `grid + 1` Chebyshev points of `I` (singular points of
/// `f` removed). Requires `grid ≥ 8n`.
pub fn best_weighted_approx(
    f: &TargetFunction,
    w: &Weight,
    interval: [f64; 2],
    n: usize,
    grid: usize,
    tol: f64,
) -> Result<MinimaxResult> {
    if grid < MIN_GRID_FACTOR * n {
        return Err(Error::InvalidParameter(format!("grid {grid} below {}·n = {}", MIN_GRID_FACTOR, MIN_GRID_FACTOR * n)));
    }
    let [a, b] = interval;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidParameter(format!("degenerate interval [{a}, {b}]")));
    }
    let pts = chebyshev_grid(a, b, grid);
    minimax_on_points(f, w, interval, n, &pts, MinimaxOptions { tol, ..Default::default() })
}

/// Errors at grids `grid`, `2 grid` and `4 grid`.
pub fn refinement_ladder(
    f: &TargetFunction,
    w: &Weight,
    interval: [f64; 2],
    n: usize,
    grid: usize,
) -> Result<Vec<(usize, f64)>> {
    [1usize, 2, 4]
        .iter()
        .map(|&k| best_weighted_approx(f, w, interval, n, k * grid, 1e-12).map(|r| (k * grid, r.error)))
        .collect()
}

struct Samples {
    x: Vec<f64>,
    w: Vec<f64>,
    f: Vec<f64>,
    /// `T_j(u_i)` row-major, `n` per point.
    basis: Vec<f64>,
    n: usize,
}

impl Samples {
    fn row(&self, i: usize) -> &[f64] {
        &self.basis[i * self.n..(i + 1) * self.n]
    }

    fn residual(&self, c: &[f64]) -> Vec<f64> {
        (0..self.x.len())
            .map(|i| {
                let p: f64 = self.row(i).iter().zip(c).map(|(t, c)| t * c).sum();
                self.w[i] * (self.f[i] - p)
            })
            .collect()
    }
}

fn basis_row(u: f64, n: usize, out: &mut Vec<f64>) {
    let (mut t0, mut t1) = (1.0, u);
    for j in 0..n {
        if j == 0 {
            out.push(1.0);
        } else if j == 1 {
            out.push(u);
        } else {
            let t2 = 2.0 * u * t1 - t0;
            out.push(t2);
            t0 = t1;
            t1 = t2;
        }
    }
}

/// Discrete minimax on explicit points (those outside `interval`, at
/// singular points of `f`, or with non-finite `f` are skipped).
pub fn minimax_on_points(
    f: &TargetFunction,
    w: &Weight,
    interval: [f64; 2],
    n: usize,
    points: &[f64],
    opts: MinimaxOptions,
) -> Result<MinimaxResult> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension n must be ≥ 1".into()));
    }
    let [a, b] = interval;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidParameter(format!("degenerate interval [{a}, {b}]")));
    }
    let mut s = Samples { x: Vec::new(), w: Vec::new(), f: Vec::new(), basis: Vec::new(), n };
    for &x in points {
        if x < a || x > b {
            continue;
        }
        let Some(fx) = f.try_eval(x) else { continue };
        let wx = w.eval(x)?;
        s.x.push(x);
        s.w.push(wx);
        s.f.push(fx);
        basis_row((2.0 * x - a - b) / (b - a), n, &mut s.basis);
    }
    let grid_size = s.x.len();
    let active: Vec<usize> = (0..grid_size).filter(|&i| s.w[i] >= WEIGHT_FLOOR).collect();
    if active.is_empty() {
        return Err(Error::Minimax(format!("weight {} vanishes on every grid point of [{a}, {b}]", w.label())));
    }
    if active.len() <= n {
        return interpolate(&s, &active, interval, grid_size);
    }
    match exchange(&s, &active, opts) {
        Ok(it) => finish(&s, interval, it.c, it.level, it.iterations, grid_size, Method::Exchange),
        Err(best) => {
            let lp = linear_program(&s).and_then(|(c, e)| finish(&s, interval, c, e, 0, grid_size, Method::LinearProgram));
            let ex = best.map(|it| finish(&s, interval, it.c, it.level, it.iterations, grid_size, Method::Exchange));
            match (lp, ex) {
                (Ok(a), Some(Ok(b))) => Ok(if b.error <= a.error { b } else { a }),
                (Ok(a), _) => Ok(a),
                (Err(_), Some(b)) => b,
                (Err(e), None) => Err(e),
            }
        }
    }
}

/// One exchange iterate.
struct Iterate {
    c: Vec<f64>,
    level: f64,
    rmax: f64,
    iterations: usize,
}

fn finish(
    s: &Samples,
    interval: [f64; 2],
    c: Vec<f64>,
    levelled: f64,
    iterations: usize,
    grid_size: usize,
    method: Method,
) -> Result<MinimaxResult> {
    let res = s.residual(&c);
    let error = res.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    Ok(MinimaxResult {
        poly: ChebPoly::new(interval, c)?,
        error,
        levelled_error: levelled.abs(),
        residual_extrema: run_extrema(&res).into_iter().map(|(i, r)| (s.x[i], r)).collect(),
        iterations,
        grid_size,
        method,
    })
}

fn interpolate(s: &Samples, active: &[usize], interval: [f64; 2], grid_size: usize) -> Result<MinimaxResult> {
    let m = active.len();
    let mut mat = vec![0.0; m * m];
    let mut rhs = vec![0.0; m];
    for (k, &i) in active.iter().enumerate() {
        mat[k * m..(k + 1) * m].copy_from_slice(&s.row(i)[..m]);
        rhs[k] = s.f[i];
    }
    let mut c = solve_dense(&mut mat, &mut rhs, m).ok_or_else(|| Error::Minimax("singular interpolation system".into()))?;
    c.resize(s.n, 0.0);
    finish(s, interval, c, 0.0, 0, grid_size, Method::Interpolation)
}

/// Indices of the largest `|r|` in each maximal run of constant sign (zero
/// residuals skipped).
fn run_extrema(res: &[f64]) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = Vec::new();
    for (i, &r) in res.iter().enumerate() {
        if r == 0.0 {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.1.signum() == r.signum() => {
                if r.abs() > last.1.abs() {
                    *last = (i, r);
                }
            }
            _ => out.push((i, r)),
        }
    }
    out
}

fn initial_reference(s: &Samples, active: &[usize], n: usize) -> Vec<usize> {
    let m = active.len();
    let lo = s.x[active[0]];
    let hi = s.x[active[m - 1]];
    let targets = chebyshev_grid(lo, hi, n);
    let mut idx: Vec<usize> = targets
        .iter()
        .map(|&t| {
            let k = active.partition_point(|&i| s.x[i] < t);
            if k == 0 {
                0
            } else if k >= m {
                m - 1
            } else if (s.x[active[k]] - t).abs() < (t - s.x[active[k - 1]]).abs() {
                k
            } else {
                k - 1
            }
        })
        .collect();
    for k in 1..idx.len() {
        idx[k] = idx[k].max(idx[k - 1] + 1);
    }
    let last = idx.len() - 1;
    idx[last] = idx[last].min(m - 1);
    for k in (0..last).rev() {
        idx[k] = idx[k].min(idx[k + 1] - 1);
    }
    idx.into_iter().map(|k| active[k]).collect()
}

/// On failure returns the iterate with the smallest residual, if any.
fn exchange(s: &Samples, active: &[usize], opts: MinimaxOptions) -> std::result::Result<Iterate, Option<Iterate>> {
    let n = s.n;
    let mut reference = initial_reference(s, active, n);
    let mut prev_level = -1.0;
    let mut best: Option<Iterate> = None;
    let active_res = |res: &[f64]| active.iter().map(|&i| (i, res[i])).collect::<Vec<_>>();
    for it in 1..=opts.max_iter {
        let dim = n + 1;
        let mut mat = vec![0.0; dim * dim];
        let mut rhs = vec![0.0; dim];
        for (k, &i) in reference.iter().enumerate() {
            let row = &mut mat[k * dim..(k + 1) * dim];
            for (dst, t) in row[..n].iter_mut().zip(s.row(i)) {
                *dst = s.w[i] * t;
            }
            row[n] = if k % 2 == 0 { 1.0 } else { -1.0 };
            rhs[k] = s.w[i] * s.f[i];
        }
        let Some(sol) = solve_dense(&mut mat, &mut rhs, dim) else { return Err(best) };
        let level = sol[n].abs();
        let c = sol[..n].to_vec();
        let res = s.residual(&c);
        let rmax = res.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
        let scale = active.iter().fold(0.0_f64, |m, &i| m.max((s.w[i] * s.f[i]).abs())).max(f64::MIN_POSITIVE);
        let cur = Iterate { c, level, rmax, iterations: it };
        if rmax <= level * (1.0 + opts.tol) + 1e-15 * scale {
            return Ok(cur);
        }
        let stalled = it > 1 && level <= prev_level * (1.0 + 1e-15);
        if stalled && rmax - level <= 1e-9 * rmax {
            return Ok(cur);
        }
        if best.as_ref().is_none_or(|b| cur.rmax < b.rmax) {
            best = Some(cur);
        }
        if stalled {
            return Err(best);
        }
        prev_level = level;
        let runs: Vec<(usize, f64)> = run_extrema(&active_res(&res).iter().map(|p| p.1).collect::<Vec<_>>())
            .into_iter()
            .map(|(k, r)| (active[k], r))
            .collect();
        if runs.len() < n + 1 {
            return Err(best);
        }
        let g = runs
            .iter()
            .enumerate()
            .max_by(|p, q| p.1 .1.abs().total_cmp(&q.1 .1.abs()).then(q.0.cmp(&p.0)))
            .map(|(k, _)| k)
            .unwrap_or(0);
        let lo = g.saturating_sub(n);
        let hi = g.min(runs.len() - (n + 1));
        let mut best = lo;
        let mut best_min = -1.0;
        for start in lo..=hi {
            let mn = runs[start..start + n + 1].iter().fold(f64::INFINITY, |m, r| m.min(r.1.abs()));
            if mn > best_min {
                best_min = mn;
                best = start;
            }
        }
        reference = runs[best..best + n + 1].iter().map(|r| r.0).collect();
    }
    Err(best)
}

/// `min e` subject to `|w_i (f_i - p(x_i))| ≤ e` over the whole grid.
fn linear_program(s: &Samples) -> Result<(Vec<f64>, f64)> {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let coeffs: Vec<_> = (0..s.n).map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    let e = lp.add_var(1.0, (0.0, f64::INFINITY));
    for i in 0..s.x.len() {
        if s.w[i] < WEIGHT_FLOOR {
            continue;
        }
        let wi = s.w[i];
        let plus: Vec<_> = coeffs.iter().zip(s.row(i)).map(|(&v, &t)| (v, wi * t)).chain([(e, -1.0)]).collect();
        let minus: Vec<_> = coeffs.iter().zip(s.row(i)).map(|(&v, &t)| (v, -wi * t)).chain([(e, -1.0)]).collect();
        lp.add_constraint(plus.as_slice(), ComparisonOp::Le, wi * s.f[i]);
        lp.add_constraint(minus.as_slice(), ComparisonOp::Le, -wi * s.f[i]);
    }
    let sol = lp.solve().map_err(|err| Error::Minimax(format!("linear program failed: {err}")))?;
    let c = coeffs.iter().map(|&v| *sol.var_value(v)).collect();
    Ok((c, sol.objective()))
}

/// Gaussian elimination with partial pivoting; `mat` is row-major `dim × dim`.
pub(crate) fn solve_dense(mat: &mut [f64], rhs: &mut [f64], dim: usize) -> Option<Vec<f64>> {
    for col in 0..dim {
        let piv = (col..dim).max_by(|&i, &j| mat[i * dim + col].abs().total_cmp(&mat[j * dim + col].abs()))?;
        let pv = mat[piv * dim + col];
        if pv == 0.0 || !pv.is_finite() {
            return None;
        }
        if piv != col {
            for k in 0..dim {
                mat.swap(piv * dim + k, col * dim + k);
            }
            rhs.swap(piv, col);
        }
        for i in col + 1..dim {
            let m = mat[i * dim + col] / pv;
            if m == 0.0 {
                continue;
            }
            for k in col..dim {
                mat[i * dim + k] -= m * mat[col * dim + k];
            }
            rhs[i] -= m * rhs[col];
        }
    }
    let mut x = vec![0.0; dim];
    for i in (0..dim).rev() {
        let mut acc = rhs[i];
        for k in i + 1..dim {
            acc -= mat[i * dim + k] * x[k];
        }
        x[i] = acc / mat[i * dim + i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct CacheKey {
    f: String,
    w: String,
    interval: [u64; 2],
    n: usize,
    grid: u64,
}

/// Memo of minimax solves keyed by function, weight, interval, dimension
/// and grid.
#[derive(Debug, Default)]
pub struct ApproxCache {
    map: Mutex<HashMap<CacheKey, Arc<MinimaxResult>>>,
}

fn grid_hash(points: &[f64]) -> u64 {
    let mut h = DefaultHasher::new();
    points.len().hash(&mut h);
    for p in points {
        p.to_bits().hash(&mut h);
    }
    h.finish()
}

impl ApproxCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.lock().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// [`minimax_on_points`] through the cache.
    pub fn on_points(
        &self,
        f: &TargetFunction,
        w: &Weight,
        interval: [f64; 2],
        n: usize,
        points: &[f64],
    ) -> Result<Arc<MinimaxResult>> {
        let key = CacheKey {
            f: f.label().to_string(),
            w: w.label(),
            interval: [interval[0].to_bits(), interval[1].to_bits()],
            n,
            grid: grid_hash(points),
        };
        if let Some(hit) = self.map.lock().ok().and_then(|m| m.get(&key).cloned()) {
            return Ok(hit);
        }
        let res = Arc::new(minimax_on_points(f, w, interval, n, points, MinimaxOptions::default())?);
        if let Ok(mut m) = self.map.lock() {
            m.entry(key).or_insert_with(|| res.clone());
        }
        Ok(res)
    }

    /// [`best_weighted_approx`] through the cache.
    pub fn best(&self, f: &TargetFunction, w: &Weight, interval: [f64; 2], n: usize, grid: usize) -> Result<Arc<MinimaxResult>> {
        if grid < MIN_GRID_FACTOR * n {
            return Err(Error::InvalidParameter(format!("grid {grid} below {}·n", MIN_GRID_FACTOR)));
        }
        self.on_points(f, w, interval, n, &chebyshev_grid(interval[0], interval[1], grid))
    }

    /// Error only; zero when the interval is degenerate or holds no usable
    /// points.
    pub fn error_on_points(&self, f: &TargetFunction, w: &Weight, interval: [f64; 2], n: usize, points: &[f64]) -> Result<f64> {
        if !(interval[0] < interval[1]) {
            return Ok(0.0);
        }
        match self.on_points(f, w, interval, n, points) {
            Ok(r) => Ok(r.error),
            Err(Error::Minimax(_)) if points.iter().all(|&x| w.value(x) < WEIGHT_FLOOR || f.try_eval(x).is_none()) => Ok(0.0),
            Err(e) => Err(e),
        }
    }
}
