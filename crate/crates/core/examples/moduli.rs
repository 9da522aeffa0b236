//! Main part, complete, Ditzian–Totik and Mastroianni–Totik moduli of
//! `|x|^0.6` under a weight vanishing at the singular set.
//!
//! cargo run --release --example moduli

use std::collections::BTreeMap;

use wapprox::function::function_registry;
use wapprox::geometry::ZSet;
use wapprox::minimax::ApproxCache;
use wapprox::moduli::{complete_modulus, dt_modulus, main_part_modulus, mt_constant, mt_modulus, ModulusQuery};
use wapprox::weights::Weight;

fn main() -> wapprox::Result<()> {
    let f = function_registry("power_abs", &BTreeMap::from([("alpha".into(), 0.6)]))?;
    let w = Weight::jacobi(&[(-1.0, 0.5), (0.0, 0.3), (1.0, 0.5)])?;
    let z = ZSet::new(vec![-1.0, 0.0, 1.0])?;
    let cache = ApproxCache::new();
    println!("A' = {:.4}", mt_constant(&z)?);
    println!("{:>8} {:>12} {:>12} {:>12} {:>12}", "t", "Omega", "omega", "omega_phi", "omega*");
    for k in 1..=6 {
        let t = 0.5_f64.powi(k);
        let q = ModulusQuery { f: f.clone(), w: w.clone(), z: z.clone(), r: 2, a: 1.0, b: 1.0, t, h_grid: 32, x_grid: 1024 };
        let grid = q.sample_grid();
        let main = main_part_modulus(&q)?;
        let complete = complete_modulus(&q, &cache)?;
        let dt = dt_modulus(&f, &w, 2, t, 32, &grid)?;
        let mt = mt_modulus(&f, &w, &z, 2, t, 32, &grid, &cache)?;
        println!(
            "{t:>8.5} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
            main.value, complete.value, dt.value, mt.value
        );
    }
    Ok(())
}
