//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wapprox::function::{function_registry, TargetFunction};
use wapprox::geometry::{chebyshev_grid, IntervalSet, SampleGrid, ZSet};
use wapprox::minimax::{best_weighted_approx, ApproxCache};
use wapprox::moduli::{complete_modulus, dt_modulus, main_part_modulus, symmetric_difference, ModulusQuery};
use wapprox::verify::polyineq::random_poly;
use wapprox::verify::{near_best_report, verify_polynomial_inequalities, Grids, VerdictReport, Verifier};
use wapprox::weights::{classify_weight, Factor, Weight};

type Outcome = Result<String, String>;
type Criterion = (&'static str, f64, fn() -> Outcome);

fn func(name: &str, params: &[(&str, f64)]) -> TargetFunction {
    let p: BTreeMap<String, f64> = params.iter().map(|&(k, v)| (k.to_string(), v)).collect();
    function_registry(name, &p).unwrap()
}

fn flagship_weight() -> Weight {
    Weight::jacobi(&[(-1.0, 0.5), (0.0, 0.3), (1.0, 0.5)]).unwrap()
}

fn z3() -> ZSet {
    ZSet::new(vec![-1.0, 0.0, 1.0]).unwrap()
}

fn all_pass(reports: &[VerdictReport]) -> Outcome {
    let failed: Vec<String> = reports.iter().filter(|r| !r.pass).map(|r| r.summary_line()).collect();
    if failed.is_empty() {
        let worst = reports.iter().map(|r| r.max_ratio).filter(|v| v.is_finite()).fold(0.0, f64::max);
        Ok(format!("{} reports, largest ratio {worst:.3e}", reports.len()))
    } else {
        Err(failed.join("; "))
    }
}

fn within(secs: f64, limit: f64, out: Outcome) -> Outcome {
    match out {
        Ok(msg) if secs <= limit => Ok(msg),
        Ok(msg) => Err(format!("{msg}, but took {secs:.1}s > {limit}s")),
        e => e,
    }
}

fn annihilation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let w = flagship_weight();
    let z = z3();
    let grid = SampleGrid::new(256, &z);
    let check = chebyshev_grid(-1.0, 1.0, 512);
    let cache = ApproxCache::new();
    let mut worst: f64 = 0.0;
    for r in 1..=4 {
        for k in 0..50 {
            let p = random_poly(&mut rng, r);
            let norm = check.iter().map(|&x| p.eval(x).abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
            let f = TargetFunction::from_poly(format!("p{r}_{k}"), p);
            let q = ModulusQuery { f: f.clone(), w: w.clone(), z: z.clone(), r, a: 1.0, b: 1.0, t: 0.2, h_grid: 16, x_grid: 256 };
            let mut vals = vec![
                main_part_modulus(&q).map_err(|e| e.to_string())?.value,
                complete_modulus(&q, &cache).map_err(|e| e.to_string())?.value,
                dt_modulus(&f, &w, r, 0.2, 16, &grid).map_err(|e| e.to_string())?.value,
            ];
            for &x in &[-0.7, -0.1, 0.0, 0.35, 0.8] {
                vals.push(symmetric_difference(&f, 0.05 * (k as f64 + 1.0) / 50.0, r, x, &IntervalSet::whole()).map_err(|e| e.to_string())?.abs());
            }
            worst = vals.into_iter().fold(worst, |m, v| m.max(v / norm));
        }
    }
    if worst <= 1e-9 {
        Ok(format!("200 polynomials, worst relative residue {worst:.2e}"))
    } else {
        Err(format!("relative residue {worst:.2e} > 1e-9"))
    }
}

fn anchors() -> Outcome {
    let one = Weight::one();
    let cases = [
        (func("monomial", &[("k", 1.0)]), 1, 1.0),
        (func("power_abs", &[("alpha", 1.0)]), 2, 0.5),
        (func("power_abs", &[("alpha", 1.0)]), 3, 0.125),
        (func("monomial", &[("k", 3.0)]), 3, 0.25),
    ];
    let mut worst = [0.0_f64; 2];
    for (f, n, exact) in &cases {
        for (k, (factor, tol)) in [(8, 1e-3), (32, 1e-5)].into_iter().enumerate() {
            let e = best_weighted_approx(f, &one, [-1.0, 1.0], *n, factor * n, 1e-12).map_err(|e| e.to_string())?.error;
            let dev = (e - exact).abs();
            worst[k] = worst[k].max(dev);
            if dev > tol {
                return Err(format!("E_{n}({}) = {e} vs {exact} at grid {}", f.label(), factor * n));
            }
        }
    }
    Ok(format!("worst deviation {:.1e} at 8n, {:.1e} at 32n", worst[0], worst[1]))
}

fn equioscillation() -> Outcome {
    let weights = [Weight::one(), Weight::phi_power(1.0).unwrap()];
    let fs = [
        func("power_abs", &[("alpha", 1.0)]),
        func("power_abs", &[("alpha", 0.6)]),
        func("exp", &[]),
        func("power_abs", &[("z", 0.3), ("alpha", 1.5)]),
    ];
    let (mut solves, mut floor) = (0, 0);
    for w in &weights {
        for f in &fs {
            for n in 1..=16 {
                let res = best_weighted_approx(f, w, [-1.0, 1.0], n, 32 * n, 1e-12).map_err(|e| e.to_string())?;
                // at the rounding floor the residual signs are noise
                if res.error < 1e-13 {
                    floor += 1;
                    continue;
                }
                let alt = res.alternations(1e-6);
                if alt < n + 1 {
                    return Err(format!("{} w = {} n = {n}: {alt} alternations, error {:e}, {:?}", f.label(), w.short_label(), res.error, res.residual_extrema));
                }
                solves += 1;
            }
        }
    }
    Ok(format!("{solves} solves with at least n+1 alternations, {floor} at the rounding floor skipped"))
}

fn modulus_properties() -> Outcome {
    let fs = [
        func("power_abs", &[("alpha", 0.6)]),
        func("log_power", &[("alpha", 0.5), ("beta", 1.0)]),
        func("exp", &[]),
    ];
    let ws = [Weight::one(), flagship_weight()];
    let mut reports = Vec::new();
    for f in &fs {
        for w in &ws {
            let grids = Grids { x_grid: 1024, ..Grids::default() };
            let v = Verifier::new(f.clone(), w.clone(), z3(), 2, 1.0, 1.0, grids).map_err(|e| e.to_string())?;
            reports.extend(v.modulus_properties(&[0.25, 0.125, 0.0625]).map_err(|e| e.to_string())?);
        }
    }
    all_pass(&reports)
}

fn classification() -> Outcome {
    let ladder = [128, 256, 512];
    let one = classify_weight(&Weight::one(), &ZSet::endpoints(), &ladder).map_err(|e| e.to_string())?;
    if one.ladder.iter().any(|r| (r.astar - 1.0).abs() > 1e-12) {
        return Err(format!("A* of the unit weight: {:?}", one.ladder));
    }
    let examples = [
        ("jacobi", flagship_weight()),
        ("phi", Weight::phi_power(1.0).unwrap()),
        ("gdt", Weight::gdt(Weight::one(), vec![Factor::new(0.0, 0.5, 1.0), Factor::new(1.0, 0.25, -1.0)]).unwrap()),
    ];
    for (name, w) in &examples {
        let rep = classify_weight(w, &z3(), &ladder).map_err(|e| e.to_string())?;
        if rep.diverging || !rep.wstar_pass {
            return Err(format!("{name} flagged: {:?}", rep.ladder));
        }
    }
    let non = classify_weight(&Weight::piecewise_nonexample(), &z3(), &ladder).map_err(|e| e.to_string())?;
    if !non.diverging {
        return Err(format!("non-example not flagged: {:?}", non.ladder));
    }
    Ok("unit A* = 1, three admissible weights stable, non-example diverges".into())
}

fn polynomial_inequalities() -> Outcome {
    let weights = [
        Weight::one(),
        Weight::phi_power(1.0).unwrap(),
        Weight::gdt(Weight::phi_power(1.0).unwrap(), vec![Factor::jacobi(0.0, 0.3)]).unwrap(),
    ];
    let reports = verify_polynomial_inequalities(&weights, &[8, 16, 32, 64], 20, 20240607).map_err(|e| e.to_string())?;
    all_pass(&reports)
}

fn flagship() -> Outcome {
    let f = func("power_abs", &[("alpha", 0.6)]);
    let ns = [4, 8, 16, 32, 64];
    let mut reports = Vec::new();
    for r in [1, 2] {
        let v = Verifier::new(f.clone(), flagship_weight(), z3(), r, 1.0, 1.0, Grids::default()).map_err(|e| e.to_string())?;
        let run = || -> wapprox::Result<Vec<VerdictReport>> {
            let mut out = v.jackson(&ns)?;
            out.push(v.inverse(&ns)?);
            out.extend(v.realization(&ns, 1.0, 2.0)?);
            out.extend(v.mt_sandwich(&[1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125])?);
            Ok(out)
        };
        reports.extend(run().map_err(|e| e.to_string())?);
    }
    all_pass(&reports)
}

fn near_best() -> Outcome {
    let f = func("power_abs", &[("alpha", 1.0)]);
    let w = Weight::jacobi(&[(0.0, 0.3)]).unwrap();
    let pairs: Vec<_> = (0..10)
        .map(|k| {
            let d = 0.8 * 0.6_f64.powi(k);
            ([-0.4 * d, d], [-d, d])
        })
        .collect();
    let mut reports = Vec::new();
    for r in [2, 3] {
        reports.push(near_best_report(&f, &w, r, &pairs, 256, 10.0, &format!("near_best_r{r}")).map_err(|e| e.to_string())?);
    }
    all_pass(&reports)
}

fn read_csvs(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

fn determinism() -> Outcome {
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/flagship.json");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = Vec::new();
    for k in 0..2 {
        let out = tmp.path().join(format!("run{k}"));
        let status = Command::new(env!("CARGO_BIN_EXE_wapprox"))
            .args(["verify", config, "--out", out.to_str().unwrap()])
            .output()
            .map_err(|e| e.to_string())?;
        if status.status.code() != Some(0) {
            return Err(format!("flagship run exited with {:?}", status.status.code()));
        }
        runs.push(read_csvs(&out));
    }
    if runs[0].is_empty() {
        return Err("no CSV reports written".into());
    }
    if runs[0] != runs[1] {
        let differ: Vec<_> = runs[0].keys().filter(|k| runs[0].get(*k) != runs[1].get(*k)).collect();
        return Err(format!("CSV files differ: {differ:?}"));
    }
    Ok(format!("{} CSV files byte-identical across two runs", runs[0].len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("annihilation of low-degree polynomials", 10.0, annihilation),
        ("minimax anchors", 5.0, anchors),
        ("equioscillation", 10.0, equioscillation),
        ("modulus properties on shared grids", 60.0, modulus_properties),
        ("weight classification", 60.0, classification),
        ("polynomial inequalities", 180.0, polynomial_inequalities),
        ("flagship equivalences and sandwich", 300.0, flagship),
        ("near-best extension", 60.0, near_best),
        ("determinism of CSV reports", 600.0, determinism),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let secs = start.elapsed().as_secs_f64();
        match within(secs, *limit, out) {
            Ok(msg) => println!("PASS {}. {name}: {msg} ({secs:.2}s)", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {}. {name}: {msg} ({secs:.2}s)", k + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
