//! Seeded random-polynomial checks of the weighted polynomial inequalities:
//! Markov–Bernstein, restricted Remez, the `w ~ w_n` norm equivalences, the
//! Taylor-section bound and the modulus bound for polynomials.

use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::cheb::{taylor_at, ChebPoly};
use crate::error::{Error, Result};
use crate::function::TargetFunction;
use crate::geometry::{chebyshev_grid, lambda_n, neighborhood, phi, phi_n, rho_n, ZSet};
use crate::moduli::{h_values, main_part_on};
use crate::verify::report::{Criterion, VerdictReport};
use crate::weights::{averaged_weight_values, Weight};

/// Allowed growth of a worst constant between consecutive rungs.
pub const GROWTH: f64 = 1.5;

/// `P ∈ P_n` with Chebyshev coefficients i.i.d. uniform on `[-1, 1]`.
pub fn random_poly(rng: &mut ChaCha8Rng, n: usize) -> ChebPoly {
    let coeffs = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    ChebPoly { interval: [-1.0, 1.0], coeffs }
}

/// Reproducing kernel `1/2 + Σ_{k<n} T_k(c) T_k(x)` of `P_n`: peaks at `c`.
pub fn kernel_poly(n: usize, c: f64) -> ChebPoly {
    let theta = c.clamp(-1.0, 1.0).acos();
    let coeffs = (0..n).map(|k| if k == 0 { 0.5 } else { (k as f64 * theta).cos() }).collect();
    ChebPoly { interval: [-1.0, 1.0], coeffs }
}

/// Seeded stream for rung `n`.
pub fn rung_rng(seed: u64, n: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn sup(vals: impl Iterator<Item = f64>) -> f64 {
    vals.fold(0.0, f64::max)
}

/// Two-sided worst constant `max(a/b, b/a)` as `(larger, smaller)`.
fn two_sided(a: f64, b: f64) -> (f64, f64) {
    if a >= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Tracks the worst `(lhs, rhs)` by ratio.
#[derive(Clone, Copy)]
struct Worst {
    lhs: f64,
    rhs: f64,
}

impl Worst {
    fn new() -> Self {
        Worst { lhs: 0.0, rhs: 1.0 }
    }

    fn ratio(&self) -> f64 {
        if self.rhs > 0.0 {
            self.lhs / self.rhs
        } else if self.lhs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }

    fn offer(&mut self, lhs: f64, rhs: f64) {
        let cand = Worst { lhs, rhs };
        if cand.ratio() > self.ratio() {
            *self = cand;
        }
    }
}

const NAMES: [&str; 10] = [
    "markov_bernstein_r1",
    "markov_bernstein_r2",
    "markov_bernstein_equivalence",
    "averaged_weight_equivalence",
    "phi_power_equivalence",
    "lambda_power_equivalence",
    "phi_n_equivalence",
    "remez_caps",
    "remez_interior",
    "taylor_remainder",
];
const MODULUS_NAME: &str = "polynomial_modulus";

/// Grid and weight data for one `(w, n)` rung.
struct Rung {
    n: usize,
    x: Vec<f64>,
    w: Vec<f64>,
    wn: Vec<f64>,
    caps: Vec<bool>,
    interior: Vec<bool>,
    center: f64,
    z: ZSet,
    local: Vec<Vec<(f64, f64)>>,
}

fn zset_for(w: &Weight) -> Result<ZSet> {
    let mut pts = w.zero_set();
    pts.extend([-1.0, 1.0]);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    ZSet::new(pts)
}

impl Rung {
    fn new(w: &Weight, n: usize) -> Result<Self> {
        let x = chebyshev_grid(-1.0, 1.0, 16 * n);
        let wv: Vec<f64> = x.iter().map(|&t| w.value(t)).collect();
        let wn = averaged_weight_values(w, n, &x)?;
        // endpoint caps of φ-measure 1/(2n) each
        let cap = (0.5 / n as f64).cos();
        let caps = x.iter().map(|&t| t.abs() >= cap).collect();
        // interval of φ-measure 1/n around an interior zero of w (or 0)
        let c = w.zero_set().into_iter().find(|&p| p.abs() < 1.0).unwrap_or(0.0);
        let alpha = c.acos();
        let (lo, hi) = ((alpha + 0.5 / n as f64).cos(), (alpha - 0.5 / n as f64).cos());
        let interior = x.iter().map(|&t| t >= lo && t <= hi).collect();
        let z = zset_for(w)?;
        let local = z
            .points()
            .iter()
            .map(|&zj| {
                let [a, b] = neighborhood(zj, 1.0, 1.0 / n as f64);
                let mut pts: Vec<f64> = chebyshev_grid(a, b, 64);
                pts.extend(x.iter().copied().filter(|&t| t >= a && t <= b));
                pts.into_iter().map(|t| (t, w.value(t))).collect()
            })
            .collect();
        Ok(Rung { n, x, w: wv, wn, caps, interior, center: c, z, local })
    }
}

/// Per-trial constants in the order of `NAMES`, then the modulus pair.
/// `(lhs, rhs)` of one inequality.
type Pair = (f64, f64);

fn trial(rung: &Rung, wt: &Weight, p: &ChebPoly) -> Result<(Vec<Pair>, Pair)> {
    let n = rung.n;
    let nf = n as f64;
    let d1 = p.derivative();
    let d2 = d1.derivative();
    let pv: Vec<f64> = rung.x.iter().map(|&t| p.eval(t)).collect();
    let v1: Vec<f64> = rung.x.iter().map(|&t| d1.eval(t)).collect();
    let v2: Vec<f64> = rung.x.iter().map(|&t| d2.eval(t)).collect();
    let ph: Vec<f64> = rung.x.iter().map(|&t| phi(t)).collect();
    let idx = 0..rung.x.len();

    let wp = sup(idx.clone().map(|i| rung.w[i] * pv[i].abs()));
    let wnp = sup(idx.clone().map(|i| rung.wn[i] * pv[i].abs()));
    let mb1 = sup(idx.clone().map(|i| rung.w[i] * ph[i] * v1[i].abs())) / nf;
    let mb2 = sup(idx.clone().map(|i| rung.w[i] * ph[i] * ph[i] * v2[i].abs())) / (nf * nf);

    let mb_wn = sup(idx.clone().map(|i| rung.wn[i] * ph[i] * ph[i] * v2[i].abs())) / (nf * nf);
    let mb_wn_rho = sup(idx.clone().map(|i| rung.wn[i] * rho_n(n, rung.x[i]).powi(2) * v2[i].abs()));
    let mb_w_rho = sup(idx.clone().map(|i| rung.w[i] * rho_n(n, rung.x[i]).powi(2) * v2[i].abs()));
    let mut mb_eq = (0.0, 1.0);
    for (a, b) in [(mb2, mb_wn), (mb2, mb_wn_rho), (mb2, mb_w_rho)] {
        let c = two_sided(a, b);
        if c.0 * mb_eq.1 > mb_eq.0 * c.1 {
            mb_eq = c;
        }
    }

    let mut phi_eq = (0.0, 1.0);
    let mut lam_eq = (0.0, 1.0);
    for mu in [0.5, 2.0, nf / 2.0] {
        let a = sup(idx.clone().map(|i| rung.w[i] * ph[i].powf(mu) * pv[i].abs()));
        let b = sup(idx.clone().map(|i| rung.wn[i] * ph[i].powf(mu) * pv[i].abs()));
        let c = two_sided(a, b);
        if c.0 * phi_eq.1 > phi_eq.0 * c.1 {
            phi_eq = c;
        }
        let la = sup(idx.clone().map(|i| rung.w[i] * lambda_n(n, rung.x[i]).powf(mu) * pv[i].abs()));
        let lb = sup(idx.clone().map(|i| rung.wn[i] * lambda_n(n, rung.x[i]).powf(mu) * pv[i].abs()));
        let c = two_sided(la, lb);
        if c.0 * lam_eq.1 > lam_eq.0 * c.1 {
            lam_eq = c;
        }
    }

    let mut four = (0.0, 1.0);
    for mu in [1.0, 2.0] {
        let q = [
            sup(idx.clone().map(|i| rung.w[i] * phi_n(n, rung.x[i]).powf(mu) * pv[i].abs())),
            sup(idx.clone().map(|i| rung.w[i] * ph[i].powf(mu) * pv[i].abs())),
            sup(idx.clone().map(|i| rung.wn[i] * ph[i].powf(mu) * pv[i].abs())),
            sup(idx.clone().map(|i| rung.wn[i] * phi_n(n, rung.x[i]).powf(mu) * pv[i].abs())),
        ];
        for a in 0..4 {
            for b in a + 1..4 {
                let c = two_sided(q[a], q[b]);
                if c.0 * four.1 > four.0 * c.1 {
                    four = c;
                }
            }
        }
    }

    let off_caps = sup(idx.clone().filter(|&i| !rung.caps[i]).map(|i| rung.w[i] * pv[i].abs()));
    let off_interior = sup(idx.clone().filter(|&i| !rung.interior[i]).map(|i| rung.w[i] * pv[i].abs()));

    let mut taylor = (0.0, 1.0);
    let r = 2.min(n);
    let rhs_t = sup(idx.clone().map(|i| rung.w[i] * ph[i].powi(r as i32) * p.nth_derivative(r).eval(rung.x[i]).abs()))
        / nf.powi(r as i32);
    for (j, &zj) in rung.z.points().iter().enumerate() {
        let q = taylor_at(p, zj, r)?;
        let lhs = sup(rung.local[j].iter().map(|&(t, wt)| wt * (p.eval(t) - q.eval(t)).abs()));
        if lhs * taylor.1 > taylor.0 * rhs_t.max(f64::MIN_POSITIVE) || j == 0 {
            taylor = (lhs, rhs_t);
        }
    }

    let f = TargetFunction::from_poly("P", p.clone());
    let t = 1.0 / nf;
    let om = main_part_on(&f, wt, &rung.z, 2, 1.0, &h_values(t, 16), &rung.x).value;
    let modulus = (om, t * t * mb2 * nf * nf);

    Ok((
        vec![
            (mb1, wp),
            (mb2, wp),
            mb_eq,
            two_sided(wp, wnp),
            phi_eq,
            lam_eq,
            four,
            (wp, off_caps),
            (wp, off_interior),
            taylor,
        ],
        modulus,
    ))
}

/// Worst constants over `trials` seeded random `P_n` for every weight and
/// every `n`; one report per inequality and weight, plus the Bernstein
/// extremal case `T_n`, `w ≡ 1`.
pub fn verify_polynomial_inequalities(weights: &[Weight], ns: &[usize], trials: usize, seed: u64) -> Result<Vec<VerdictReport>> {
    if trials < 20 {
        return Err(Error::InvalidParameter(format!("need at least 20 trials, got {trials}")));
    }
    if ns.iter().any(|&n| n < 2) {
        return Err(Error::InvalidParameter("every n must be ≥ 2".into()));
    }
    let start = Instant::now();
    let mut out = Vec::new();
    for wt in weights {
        let per_n: Vec<(usize, Vec<Worst>, Worst)> = ns
            .par_iter()
            .map(|&n| {
                let rung = Rung::new(wt, n)?;
                let mut rng = rung_rng(seed, n);
                let mut polys: Vec<ChebPoly> = (0..trials).map(|_| random_poly(&mut rng, n)).collect();
                let (inner, alpha) = (0.25 / n as f64, rung.center.acos());
                let peaks = [1.0, -1.0, inner.cos(), -inner.cos(), rung.center, (alpha + inner).cos(), (alpha - inner).cos()];
                polys.extend(peaks.map(|c| kernel_poly(n, c)));
                let results = polys.par_iter().map(|p| trial(&rung, wt, p)).collect::<Result<Vec<_>>>()?;
                let mut worst = vec![Worst::new(); NAMES.len()];
                let mut modw = Worst::new();
                for (vals, m) in results {
                    for (k, (l, r)) in vals.into_iter().enumerate() {
                        worst[k].offer(l, r);
                    }
                    modw.offer(m.0, m.1);
                }
                Ok((n, worst, modw))
            })
            .collect::<Result<_>>()?;
        let inputs = json!({ "w": wt.label(), "n_ladder": ns, "trials": trials, "seed": seed });
        let crit = Criterion::Stable { growth: GROWTH };
        for (k, name) in NAMES.iter().enumerate() {
            let rows: Vec<_> = per_n.iter().map(|(n, w, _)| (*n, w[k].lhs, w[k].rhs)).collect();
            out.push(VerdictReport::assemble(format!("{name}[{}]", wt.short_label()), inputs.clone(), &rows, crit, 0.0));
        }
        let rows: Vec<_> = per_n.iter().map(|(n, _, m)| (*n, m.lhs, m.rhs)).collect();
        out.push(VerdictReport::assemble(format!("{MODULUS_NAME}[{}]", wt.short_label()), inputs, &rows, crit, 0.0));
    }
    let rows: Vec<_> = ns
        .iter()
        .map(|&n| {
            let t = ChebPoly::chebyshev_t(n);
            let x = chebyshev_grid(-1.0, 1.0, 16 * n);
            let d = t.derivative();
            let lhs = sup(x.iter().map(|&s| phi(s) * d.eval(s).abs())) / n as f64;
            let rhs = sup(x.iter().map(|&s| t.eval(s).abs()));
            (n, lhs, rhs)
        })
        .collect();
    out.push(VerdictReport::assemble(
        "bernstein_extremal",
        json!({ "w": "1", "n_ladder": ns }),
        &rows,
        Criterion::Equal { rel: 1e-6, abs: 0.0 },
        0.0,
    ));
    let secs = start.elapsed().as_secs_f64();
    for r in &mut out {
        r.runtime = secs;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_polys_repeat() {
        let a = random_poly(&mut rung_rng(7, 8), 8);
        let b = random_poly(&mut rung_rng(7, 8), 8);
        assert_eq!(a.coeffs, b.coeffs);
        assert!(a.coeffs.iter().all(|c| c.abs() <= 1.0));
    }

    #[test]
    fn constant_poly_has_zero_bernstein_side() {
        let w = Weight::phi_power(1.0).unwrap();
        let rung = Rung::new(&w, 8).unwrap();
        let p = ChebPoly { interval: [-1.0, 1.0], coeffs: vec![0.7] };
        let (vals, m) = trial(&rung, &w, &p).unwrap();
        assert_eq!(vals[0].0, 0.0);
        assert_eq!(m.0, 0.0);
    }
}
