//! Theorem suites over a shared context: one sample grid, one minimax cache.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cheb::{taylor_at, ChebPoly};
use crate::error::{Error, Result};
use crate::function::TargetFunction;
use crate::geometry::{chebyshev_grid, main_set, phi, SampleGrid, ZSet};
use crate::minimax::{minimax_on_points, ApproxCache, MinimaxOptions, MinimaxResult, MIN_GRID_FACTOR};
use crate::moduli::{
    complete_on, doubling_identity, h_values, main_part_on, mt_constant, mt_on, restricted_on,
    CompleteModulus, ModulusValue,
};
use crate::verify::report::{Criterion, VerdictReport};
use crate::weights::{averaged_weight, Weight};

/// Relative slack for inequalities whose sides contain minimax errors.
pub const SOLVER_SLACK: f64 = 1e-10;
/// Default `max ratio / median ratio` bound.
pub const DEFAULT_THRESHOLD: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grids {
    /// Number of `h` samples per supremum.
    pub h_grid: usize,
    /// Chebyshev intervals of the shared x-grid.
    pub x_grid: usize,
    /// Chebyshev intervals per unit of dimension for local minimax problems.
    pub approx_grid: usize,
}

impl Default for Grids {
    fn default() -> Self {
        Grids { h_grid: 32, x_grid: 2048, approx_grid: 16 }
    }
}

impl Grids {
    pub fn scaled(self, k: f64) -> Self {
        let s = |v: usize| ((v as f64 * k).round() as usize).max(16);
        Grids { h_grid: s(self.h_grid), x_grid: s(self.x_grid), approx_grid: s(self.approx_grid) }
    }
}

/// `min_P ‖w(f - P)‖ + t^r ‖w φ^r P^{(r)}‖` over `candidates`, norms on
/// `grid`.
pub fn realization_functional(
    f: &TargetFunction,
    w: &Weight,
    r: usize,
    t: f64,
    candidates: &[ChebPoly],
    grid: &[f64],
) -> Result<f64> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("realization needs at least one candidate".into()));
    }
    let tr = t.powi(r as i32);
    Ok(candidates
        .iter()
        .map(|p| {
            let d = p.nth_derivative(r);
            let mut err: f64 = 0.0;
            let mut smooth: f64 = 0.0;
            for &x in grid {
                let wx = w.value(x);
                if let Some(fx) = f.try_eval(x) {
                    err = err.max(wx * (fx - p.eval(x)).abs());
                }
                smooth = smooth.max(wx * phi(x).powi(r as i32) * d.eval(x).abs());
            }
            err + tr * smooth
        })
        .fold(f64::INFINITY, f64::min))
}

/// `max_x w(x) φ(x)^ν |p^{(ν)}(x)|` on `grid`.
pub fn weighted_derivative_norm(p: &ChebPoly, w: &Weight, nu: usize, grid: &[f64]) -> f64 {
    let d = p.nth_derivative(nu);
    grid.iter()
        .map(|&x| w.value(x) * phi(x).powi(nu as i32) * d.eval(x).abs())
        .fold(0.0, f64::max)
}

/// `(‖w(f - q)‖_J, E_r(f, J)_w)` with `q` the minimax polynomial of `f`
/// on `I`.
pub fn near_best_pair(
    f: &TargetFunction,
    w: &Weight,
    r: usize,
    i: [f64; 2],
    j: [f64; 2],
    intervals: usize,
) -> Result<(f64, f64)> {
    if !(j[0] <= i[0] && i[1] <= j[1] && i[0] < i[1]) {
        return Err(Error::InvalidParameter(format!("need I ⊂ J, got I = {i:?}, J = {j:?}")));
    }
    let pi = chebyshev_grid(i[0], i[1], intervals);
    let mut pj = chebyshev_grid(j[0], j[1], intervals);
    pj.extend_from_slice(&pi);
    pj.sort_by(f64::total_cmp);
    pj.dedup();
    let q = minimax_on_points(f, w, i, r, &pi, MinimaxOptions::default())?.poly;
    let ext = pj
        .iter()
        .filter_map(|&x| f.try_eval(x).map(|v| w.value(x) * (v - q.eval(x)).abs()))
        .fold(0.0, f64::max);
    let best = minimax_on_points(f, w, j, r, &pj, MinimaxOptions::default())?.error;
    Ok((ext, best))
}

/// Shared state for the theorem suites.
#[derive(Debug)]
pub struct Verifier {
    pub f: TargetFunction,
    pub w: Weight,
    pub z: ZSet,
    pub r: usize,
    pub a: f64,
    pub b: f64,
    pub grids: Grids,
    pub threshold: f64,
    sample: SampleGrid,
    cache: Arc<ApproxCache>,
}

fn timed<T>(run: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let out = run()?;
    Ok((out, start.elapsed().as_secs_f64()))
}

fn stamp(mut reports: Vec<VerdictReport>, secs: f64) -> Vec<VerdictReport> {
    for r in &mut reports {
        r.runtime = secs;
    }
    reports
}

impl Verifier {
    pub fn new(f: TargetFunction, w: Weight, z: ZSet, r: usize, a: f64, b: f64, grids: Grids) -> Result<Self> {
        if r == 0 || r > crate::moduli::MAX_ORDER {
            return Err(Error::InvalidParameter(format!("order r = {r}")));
        }
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidParameter(format!("A = {a}, B = {b} must be positive")));
        }
        if grids.h_grid < 16 || grids.x_grid < 16 || grids.approx_grid < MIN_GRID_FACTOR {
            return Err(Error::InvalidParameter(format!("grids too small: {grids:?}")));
        }
        let sample = SampleGrid::new(grids.x_grid, &z);
        Ok(Verifier { f, w, z, r, a, b, grids, threshold: DEFAULT_THRESHOLD, sample, cache: Arc::new(ApproxCache::new()) })
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    /// Shares one minimax cache between verifiers.
    pub fn with_cache(mut self, cache: Arc<ApproxCache>) -> Self {
        self.cache = cache;
        self
    }

    pub fn sample_grid(&self) -> &SampleGrid {
        &self.sample
    }

    pub fn cache(&self) -> &ApproxCache {
        &self.cache
    }

    fn inputs(&self) -> serde_json::Value {
        json!({
            "f": self.f.label(),
            "w": self.w.label(),
            "z": self.z.points(),
            "r": self.r,
            "A": self.a,
            "B": self.b,
            "grids": self.grids,
        })
    }

    fn inputs_with(&self, extra: serde_json::Value) -> serde_json::Value {
        let mut v = self.inputs();
        if let (Some(m), serde_json::Value::Object(e)) = (v.as_object_mut(), extra) {
            m.extend(e);
        }
        v
    }

    /// `‖w f‖` on the shared grid.
    pub fn wf_norm(&self) -> f64 {
        self.sample
            .points()
            .iter()
            .filter_map(|&x| self.f.try_eval(x).map(|v| (self.w.value(x) * v).abs()))
            .fold(0.0, f64::max)
    }

    pub fn zero_tol(&self) -> f64 {
        1e-11 * self.wf_norm().max(1.0)
    }

    /// `E_n(f, [-1, 1])_w` on the shared grid.
    pub fn e_global(&self, n: usize) -> Result<Arc<MinimaxResult>> {
        if self.grids.x_grid < MIN_GRID_FACTOR * n {
            return Err(Error::InvalidParameter(format!(
                "x_grid {} below {}·n for n = {n}",
                self.grids.x_grid, MIN_GRID_FACTOR
            )));
        }
        self.cache.on_points(&self.f, &self.w, [-1.0, 1.0], n, self.sample.points())
    }

    pub fn main_part(&self, a: f64, hs: &[f64]) -> ModulusValue {
        main_part_on(&self.f, &self.w, &self.z, self.r, a, hs, self.sample.points())
    }

    /// `ω(f, A, B, t)` on explicit main-part `h` samples.
    pub fn omega_hs(&self, a: f64, b: f64, t: f64, hs: &[f64]) -> Result<CompleteModulus> {
        complete_on(&self.f, &self.w, &self.z, self.r, a, b, t, hs, &self.sample, &self.cache)
    }

    /// `ω(f, A, B, t)` with `h` samples from `min(t, √(2/A))`.
    pub fn omega(&self, a: f64, b: f64, t: f64) -> Result<CompleteModulus> {
        let hs = h_values(t.min((2.0 / a).sqrt()), self.grids.h_grid);
        let t_local = t.min((2.0 / a).sqrt().max((2.0 / b).sqrt()));
        self.omega_hs(a, b, t_local, &hs)
    }

    fn ladder_rows<F>(&self, ns: &[usize], row: F) -> Result<Vec<(usize, f64, f64)>>
    where
        F: Fn(usize) -> Result<(f64, f64)> + Sync,
    {
        ns.par_iter().map(|&n| row(n).map(|(l, r)| (n, l, r))).collect()
    }

    /// Direct theorem: `E_n ≲ ω(f, 1, B, 1/n)` and
    /// `n^{-r} ‖w φ^r P_n^{(r)}‖ ≲ ω(f, 1, B, 1/n)`.
    pub fn jackson(&self, ns: &[usize]) -> Result<Vec<VerdictReport>> {
        let (reports, secs) = timed(|| {
            let rows: Vec<(usize, f64, f64, f64)> = ns
                .par_iter()
                .map(|&n| {
                    let e = self.e_global(n)?;
                    let om = self.omega(1.0, self.b, 1.0 / n as f64)?.value;
                    let d = weighted_derivative_norm(&e.poly, &self.w, self.r, self.sample.points()) / (n as f64).powi(self.r as i32);
                    Ok((n, e.error, om, d))
                })
                .collect::<Result<_>>()?;
            let tol = self.zero_tol();
            let crit = Criterion::Bounded { threshold: self.threshold };
            let inputs = self.inputs_with(json!({ "n_ladder": ns }));
            Ok(vec![
                VerdictReport::assemble("jackson", inputs.clone(), &rows.iter().map(|r| (r.0, r.1, r.2)).collect::<Vec<_>>(), crit, tol),
                VerdictReport::assemble("jackson_derivative", inputs, &rows.iter().map(|r| (r.0, r.3, r.2)).collect::<Vec<_>>(), crit, tol),
            ])
        })?;
        Ok(stamp(reports, secs))
    }

    /// `n^{-r} Σ_{k ≤ n} k^{r-1} E_k`.
    pub fn inverse_sum(&self, n: usize) -> Result<f64> {
        let mut s = 0.0;
        for k in 1..=n {
            s += (k as f64).powi(self.r as i32 - 1) * self.e_global(k)?.error;
        }
        Ok(s / (n as f64).powi(self.r as i32))
    }

    fn warm_e(&self, max_n: usize) -> Result<()> {
        (1..=max_n).into_par_iter().map(|k| self.e_global(k).map(|_| ())).collect()
    }

    /// Inverse theorem: `ω(f, A, B, 1/n) ≲ n^{-r} Σ k^{r-1} E_k`.
    pub fn inverse(&self, ns: &[usize]) -> Result<VerdictReport> {
        let (rows, secs) = timed(|| {
            self.warm_e(ns.iter().copied().max().unwrap_or(1))?;
            self.ladder_rows(ns, |n| Ok((self.omega(self.a, self.b, 1.0 / n as f64)?.value, self.inverse_sum(n)?)))
        })?;
        let crit = Criterion::Bounded { threshold: self.threshold };
        Ok(VerdictReport::assemble("inverse", self.inputs_with(json!({ "n_ladder": ns })), &rows, crit, self.zero_tol())
            .with_runtime(secs))
    }

    /// `E_n ≲ n^{-r} Σ k^{r-1} E_k`: the direct and inverse estimates joined
    /// through `ω`.
    pub fn chain(&self, ns: &[usize]) -> Result<VerdictReport> {
        let (rows, secs) = timed(|| {
            self.warm_e(ns.iter().copied().max().unwrap_or(1))?;
            self.ladder_rows(ns, |n| Ok((self.e_global(n)?.error, self.inverse_sum(n)?)))
        })?;
        let crit = Criterion::Bounded { threshold: self.threshold };
        Ok(VerdictReport::assemble("equivalence_chain", self.inputs_with(json!({ "n_ladder": ns })), &rows, crit, self.zero_tol())
            .with_runtime(secs))
    }

    /// Minimax polynomials for `n` and `⌈n/2⌉` and the Taylor sections of
    /// the first at every `z_j`.
    pub fn realization_candidates(&self, n: usize) -> Result<Vec<ChebPoly>> {
        let full = self.e_global(n)?.poly.clone();
        let half = self.e_global(n.div_ceil(2))?.poly.clone();
        let mut out = vec![full.clone(), half];
        for &zj in self.z.points() {
            out.push(taylor_at(&full, zj, self.r.min(n))?);
        }
        Ok(out)
    }

    /// `R(f, 1/n, P_n)` over [`Self::realization_candidates`].
    pub fn realization_value(&self, n: usize) -> Result<f64> {
        let cands = self.realization_candidates(n)?;
        realization_functional(&self.f, &self.w, self.r, 1.0 / n as f64, &cands, self.sample.points())
    }

    /// Realization equivalence `R(f, 1/n, P_n) ∼ ω(f, A, B, c/n)` for
    /// `c ∈ {c1, c2}`.
    pub fn realization(&self, ns: &[usize], c1: f64, c2: f64) -> Result<Vec<VerdictReport>> {
        if !(c2 >= c1 && c1 > 0.0) {
            return Err(Error::InvalidParameter(format!("need c2 ≥ c1 > 0, got {c1}, {c2}")));
        }
        let cs: Vec<f64> = if c1 == c2 { vec![c1] } else { vec![c1, c2] };
        let start = Instant::now();
        let mut reports = Vec::new();
        for c in cs {
            let rows = self.ladder_rows(ns, |n| Ok((self.realization_value(n)?, self.omega(self.a, self.b, c / n as f64)?.value)))?;
            let crit = Criterion::TwoSided { threshold: self.threshold };
            reports.push(VerdictReport::assemble(
                format!("realization_c{c}"),
                self.inputs_with(json!({ "n_ladder": ns, "c": c })),
                &rows,
                crit,
                self.zero_tol(),
            ));
        }
        Ok(stamp(reports, start.elapsed().as_secs_f64()))
    }

    /// `h` samples `t_max θ^k`, `skip ≤ k < skip + h_grid`.
    fn nested_hs(&self, t_max: f64, skip: usize, total: usize) -> Vec<f64> {
        h_values(t_max, total)[skip..].to_vec()
    }

    /// Properties of the main part and complete moduli on shared grids.
    pub fn modulus_properties(&self, ts: &[f64]) -> Result<Vec<VerdictReport>> {
        let start = Instant::now();
        let tol = self.zero_tol();
        let k = self.grids.h_grid;
        let exact = Criterion::AtMost { slack: 0.0 };
        let solver = Criterion::AtMost { slack: SOLVER_SLACK };
        let equal = Criterion::Equal { rel: 1e-12, abs: 0.0 };
        let bounded = Criterion::Bounded { threshold: self.threshold };
        let inputs = self.inputs_with(json!({ "t_ladder": ts }));
        let mut out = Vec::new();
        let (a, b) = (self.a, self.b);

        // saturation of Ω, and vanishing of the terms with h > √(2/A)
        let cap = (2.0 / a).sqrt();
        let base = ModulusValueQ::new(self, a).at(cap);
        let mut rows = Vec::new();
        for (i, m) in [1.0, 2.0, 4.0].iter().enumerate() {
            rows.push((i + 1, ModulusValueQ::new(self, a).at(m * cap), base));
        }
        let above: Vec<f64> = h_values(4.0 * cap, k).into_iter().filter(|&h| h > cap).collect();
        rows.push((4, self.main_part(a, &above).value, 0.0));
        out.push(VerdictReport::assemble("saturation_main_part", inputs.clone(), &rows, equal, tol));

        // saturation of ω and its lower bound M·E_r(f, [-1, 1])
        let t0 = cap.max((2.0 / b).sqrt());
        let w0 = self.omega(a, b, t0)?.value;
        let mut rows = Vec::new();
        for (i, m) in [1.0, 2.0, 4.0].iter().enumerate() {
            rows.push((i + 1, self.omega(a, b, m * t0)?.value, w0));
        }
        out.push(VerdictReport::assemble("saturation_complete", inputs.clone(), &rows, equal, tol));
        let e_all = self.cache.on_points(&self.f, &self.w, [-1.0, 1.0], self.r, self.sample.points())?.error;
        out.push(VerdictReport::assemble(
            "saturation_lower_bound",
            inputs.clone(),
            &[(1, self.z.len() as f64 * e_all, w0)],
            solver,
            tol,
        ));

        // monotonicity in t on nested h samples
        let t_max = ts.iter().copied().fold(0.0, f64::max);
        let step = 4;
        let total = k + step * ts.len();
        let ladder: Vec<(f64, Vec<f64>)> = (0..ts.len())
            .map(|i| {
                let hs = self.nested_hs(t_max, i * step, total);
                (hs[0], hs)
            })
            .collect();
        let mut main_rows = Vec::new();
        let mut comp_rows = Vec::new();
        for i in 1..ladder.len() {
            let (t_small, hs_small) = &ladder[i];
            let (t_big, hs_big) = &ladder[i - 1];
            main_rows.push((i, self.main_part(a, hs_small).value, self.main_part(a, hs_big).value));
            comp_rows.push((i, self.omega_hs(a, b, *t_small, hs_small)?.value, self.omega_hs(a, b, *t_big, hs_big)?.value));
        }
        out.push(VerdictReport::assemble("monotone_t_main_part", inputs.clone(), &main_rows, exact, tol));
        out.push(VerdictReport::assemble("monotone_t_complete", inputs.clone(), &comp_rows, solver, tol));

        // monotonicity in A and B at fixed h samples
        let mut a_main = Vec::new();
        let mut a_comp = Vec::new();
        let mut b_comp = Vec::new();
        let mut row = 0;
        for &t in ts {
            let hs = h_values(t, k);
            for (lo, hi) in [(0.5, 1.0), (1.0, 2.0)] {
                row += 1;
                a_main.push((row, self.main_part(a * hi, &hs).value, self.main_part(a * lo, &hs).value));
                a_comp.push((row, self.omega_hs(a * hi, b, t, &hs)?.value, self.omega_hs(a * lo, b, t, &hs)?.value));
                b_comp.push((row, self.omega_hs(a, b * lo, t, &hs)?.value, self.omega_hs(a, b * hi, t, &hs)?.value));
            }
        }
        out.push(VerdictReport::assemble("monotone_a_main_part", inputs.clone(), &a_main, exact, tol));
        out.push(VerdictReport::assemble("monotone_a_complete", inputs.clone(), &a_comp, exact, tol));
        out.push(VerdictReport::assemble("monotone_b_complete", inputs.clone(), &b_comp, solver, tol));

        // restricted modulus on I_{A,t} against the main part
        let mut rows = Vec::new();
        let mut row = 0;
        for &t in ts {
            let s = main_set(&self.z, a, t);
            for c in [0.5, 1.0, 2.0] {
                row += 1;
                let hs = h_values(c * t, k);
                let lhs = restricted_on(&self.f, &self.w, self.r, &s, &hs, self.sample.points()).value;
                let rhs = self.main_part(a / f64::max(c, c * c), &hs).value;
                rows.push((row, lhs, rhs));
            }
        }
        out.push(VerdictReport::assemble("restricted_inclusion", inputs.clone(), &rows, exact, tol));

        // bounded-constant properties along the t ladder
        let e_r = e_all;
        let wf = self.wf_norm();
        let mut norm_rows = Vec::new();
        let mut best_rows = Vec::new();
        let mut dbl_rows = Vec::new();
        let mut half_rows = Vec::new();
        for (i, &t) in ts.iter().enumerate() {
            let om = self.omega(a, b, t)?.value;
            norm_rows.push((i + 1, om, wf));
            best_rows.push((i + 1, om, e_r));
            let q2 = ModulusValueQ::new(self, a).at(2.0 * t);
            let qs = ModulusValueQ::new(self, 2f64.sqrt() * a).at(2f64.sqrt() * t);
            dbl_rows.push((i + 1, q2, qs));
            half_rows.push((i + 1, ModulusValueQ::new(self, 1.0).at(2.0 * t), ModulusValueQ::new(self, 1.0).at(t)));
        }
        out.push(VerdictReport::assemble("norm_bound", inputs.clone(), &norm_rows, bounded, tol));
        out.push(VerdictReport::assemble("best_approximation_bound", inputs.clone(), &best_rows, bounded, tol));
        out.push(VerdictReport::assemble("doubling_step", inputs.clone(), &dbl_rows, bounded, tol));
        out.push(VerdictReport::assemble("halving_step", inputs.clone(), &half_rows, bounded, tol));

        // inflating and halving B for small t
        let c0 = 1f64.min(self.z.spacing() / (4.0 * b));
        let small: Vec<f64> = ts.iter().copied().filter(|&t| t < c0).collect();
        let infl = b * (1.0 + 1.0 / (2.0 * self.r as f64));
        let mut infl_rows = Vec::new();
        let mut halv_rows = Vec::new();
        for (i, &t) in small.iter().enumerate() {
            let base = self.omega(1.0, b, t)?.value;
            infl_rows.push((i + 1, self.omega(1.0, infl, t)?.value, base));
            halv_rows.push((i + 1, base, self.omega(1.0, 0.5 * b, t)?.value));
        }
        out.push(VerdictReport::assemble("b_inflation", inputs.clone(), &infl_rows, bounded, tol));
        out.push(VerdictReport::assemble("b_halving", inputs.clone(), &halv_rows, bounded, tol));

        // Δ_{2h} as a sum of 2^r shifted Δ_h
        let mut rows = Vec::new();
        let h = 0.05;
        for (i, &x) in [-0.55, -0.2, 0.1, 0.35, 0.6].iter().enumerate() {
            let span = self.r as f64 * h;
            if self.f.singular_points().iter().any(|&s| (s - x).abs() <= span) {
                continue;
            }
            if let Ok((l, r)) = doubling_identity(&self.f, h, self.r, x) {
                let scale = (0..=4 * self.r)
                    .map(|k| self.f.eval(x - span + k as f64 * h / 2.0).abs())
                    .fold(1.0, f64::max);
                rows.push((i + 1, l, r, scale));
            }
        }
        let abs = rows.iter().map(|r| r.3).fold(0.0, f64::max) * 1e-13 * 4f64.powi(self.r as i32);
        let rows: Vec<_> = rows.into_iter().map(|r| (r.0, r.1, r.2)).collect();
        out.push(VerdictReport::assemble(
            "difference_doubling_identity",
            inputs.clone(),
            &rows,
            Criterion::Equal { rel: 1e-12, abs },
            0.0,
        ));

        // local comparability of w, and of w with w_n, on admissible stencils
        let mut rows = Vec::new();
        for (i, &t) in ts.iter().enumerate() {
            rows.push((i + 1, self.locality_constant(t)?, 1.0));
        }
        out.push(VerdictReport::assemble("weight_locality", inputs, &rows, bounded, tol));

        Ok(stamp(out, start.elapsed().as_secs_f64()))
    }

    /// Largest of `w(y)/w(x)`, `w(x)/w(y)`, `w(x)/w_n(x)`, `w_n(x)/w(x)` over
    /// `x ∈ Dom(A, h, r)` and stencil points `y`, `n = ⌈1/h⌉`.
    pub fn locality_constant(&self, h: f64) -> Result<f64> {
        let n = (1.0 / h).ceil() as usize;
        let set = main_set(&self.z, self.a, h);
        let pts = self.sample.points();
        let stride = (pts.len() / 400).max(1);
        let xs: Vec<f64> = pts
            .iter()
            .step_by(stride)
            .copied()
            .filter(|&x| {
                let half = 0.5 * self.r as f64 * h * phi(x);
                set.contains_segment(x - half, x + half)
            })
            .collect();
        let vals = xs
            .par_iter()
            .map(|&x| {
                let wx = self.w.value(x);
                let wn = averaged_weight(&self.w, n, x)?;
                let mut worst = (wx / wn).max(wn / wx);
                let half = 0.5 * self.r as f64 * h * phi(x);
                for k in 0..=2 * self.r {
                    let y = x - half + k as f64 * half / self.r as f64;
                    let wy = self.w.value(y);
                    worst = worst.max(wy / wx).max(wx / wy);
                }
                Ok(if worst.is_nan() { f64::INFINITY } else { worst })
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(vals.into_iter().fold(1.0, f64::max))
    }

    /// Near-best extension along shrinking `(I, J)` pairs at every `z_j` and
    /// at the midpoints between consecutive points of `Z ∪ {±1}`.
    pub fn near_best_extension(&self, levels: usize) -> Result<Vec<VerdictReport>> {
        let start = Instant::now();
        let mut centers: Vec<(f64, f64)> = self.z.points().iter().map(|&z| (z, 0.5)).collect();
        let mut knots = vec![-1.0];
        knots.extend_from_slice(self.z.points());
        knots.push(1.0);
        knots.dedup();
        for p in knots.windows(2) {
            let gap = p[1] - p[0];
            centers.push((0.5 * (p[0] + p[1]), 0.45 * gap));
        }
        let mut out = Vec::new();
        for (c, d0) in centers {
            let pairs: Vec<([f64; 2], [f64; 2])> = (0..levels)
                .map(|k| {
                    let d = d0 * 0.6f64.powi(k as i32);
                    let j = [(c - d).max(-1.0), (c + d).min(1.0)];
                    let i = [j[0] + 0.3 * (j[1] - j[0]), j[1]];
                    (i, j)
                })
                .collect();
            out.push(near_best_report(&self.f, &self.w, self.r, &pairs, self.grids.approx_grid * 8, self.threshold, &format!("near_best_extension@{c}"))?);
        }
        Ok(stamp(out, start.elapsed().as_secs_f64()))
    }

    /// `ω(f, A', 1/2, t) ≤ ω*(f, t) ≤ M ω(f, 1/2, A', t)` on shared grids.
    pub fn mt_sandwich(&self, ts: &[f64]) -> Result<Vec<VerdictReport>> {
        let start = Instant::now();
        let ap = mt_constant(&self.z)?;
        let m = self.z.len() as f64;
        let rows: Vec<(usize, f64, f64, f64)> = ts
            .par_iter()
            .enumerate()
            .map(|(i, &t)| {
                if !(t > 0.0 && t <= 1.0) {
                    return Err(Error::InvalidParameter(format!("sandwich needs 0 < t ≤ 1, got {t}")));
                }
                let hs = h_values(t, self.grids.h_grid);
                let lower = self.omega_hs(ap, 0.5, t, &hs)?.value;
                let star = mt_on(&self.f, &self.w, &self.z, self.r, t, &hs, &self.sample, &self.cache)?.value;
                let upper = m * self.omega_hs(0.5, ap, t, &hs)?.value;
                Ok((i + 1, lower, star, upper))
            })
            .collect::<Result<_>>()?;
        let inputs = self.inputs_with(json!({ "t_ladder": ts, "A_prime": ap }));
        let crit = Criterion::AtMost { slack: SOLVER_SLACK };
        let tol = self.zero_tol();
        let lo: Vec<_> = rows.iter().map(|r| (r.0, r.1, r.2)).collect();
        let hi: Vec<_> = rows.iter().map(|r| (r.0, r.2, r.3)).collect();
        Ok(stamp(
            vec![
                VerdictReport::assemble("mt_sandwich_lower", inputs.clone(), &lo, crit, tol),
                VerdictReport::assemble("mt_sandwich_upper", inputs, &hi, crit, tol),
            ],
            start.elapsed().as_secs_f64(),
        ))
    }
}

/// Near-best extension report over explicit `(I, J)` pairs.
pub fn near_best_report(
    f: &TargetFunction,
    w: &Weight,
    r: usize,
    pairs: &[([f64; 2], [f64; 2])],
    intervals: usize,
    threshold: f64,
    name: &str,
) -> Result<VerdictReport> {
    let start = Instant::now();
    let rows: Vec<(usize, f64, f64)> = pairs
        .par_iter()
        .enumerate()
        .map(|(k, &(i, j))| near_best_pair(f, w, r, i, j, intervals).map(|(l, e)| (k + 1, l, e)))
        .collect::<Result<_>>()?;
    let scale = rows.iter().map(|r| r.1.abs()).fold(0.0, f64::max);
    let inputs = json!({ "f": f.label(), "w": w.label(), "r": r, "pairs": pairs });
    Ok(VerdictReport::assemble(name, inputs, &rows, Criterion::Bounded { threshold }, 1e-12 * scale.max(1e-300))
        .with_runtime(start.elapsed().as_secs_f64()))
}

/// `Ω(f, A, t)` with the saturating `h` samples.
struct ModulusValueQ<'a> {
    v: &'a Verifier,
    a: f64,
}

impl<'a> ModulusValueQ<'a> {
    fn new(v: &'a Verifier, a: f64) -> Self {
        ModulusValueQ { v, a }
    }

    fn at(&self, t: f64) -> f64 {
        let hs = h_values(t.min((2.0 / self.a).sqrt()), self.v.grids.h_grid);
        self.v.main_part(self.a, &hs).value
    }
}
