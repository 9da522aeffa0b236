//! Weighted minimax approximation: classical anchors and a weighted case.
//!
//! cargo run --release --example minimax_anchors

use std::collections::BTreeMap;

use wapprox::function::function_registry;
use wapprox::minimax::{best_weighted_approx, refinement_ladder};
use wapprox::weights::Weight;

fn main() -> wapprox::Result<()> {
    let abs = function_registry("power_abs", &BTreeMap::from([("alpha".into(), 1.0)]))?;
    let cube = function_registry("monomial", &BTreeMap::from([("k".into(), 3.0)]))?;
    let one = Weight::one();
    for (label, f, n, exact) in [("|x|", &abs, 2, 0.5), ("|x|", &abs, 3, 0.125), ("x^3", &cube, 3, 0.25)] {
        let ladder = refinement_ladder(f, &one, [-1.0, 1.0], n, 8 * n)?;
        println!("E_{n}({label}) exact {exact}: {ladder:?}");
    }

    let phi = Weight::phi_power(1.0)?;
    let res = best_weighted_approx(&abs, &phi, [-1.0, 1.0], 10, 400, 1e-12)?;
    println!(
        "E_10(|x|)_phi = {:.6e}, {} alternations, {} iterations via {:?}",
        res.error,
        res.alternations(1e-6 * res.error.max(1e-300)),
        res.iterations,
        res.method
    );
    Ok(())
}
