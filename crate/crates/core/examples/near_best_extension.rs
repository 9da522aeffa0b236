//! Extending a near-best polynomial from `I` to a slightly larger `J`.
//!
//! cargo run --release --example near_best_extension

use std::collections::BTreeMap;

use wapprox::function::function_registry;
use wapprox::verify::near_best_report;
use wapprox::weights::Weight;

fn main() -> wapprox::Result<()> {
    let f = function_registry("power_abs", &BTreeMap::from([("alpha".into(), 1.0)]))?;
    let w = Weight::jacobi(&[(0.0, 0.3)])?;
    let pairs: Vec<_> = (0..10)
        .map(|k| {
            let d = 0.8 * 0.6_f64.powi(k);
            ([-0.4 * d, d], [-d, d])
        })
        .collect();
    for r in [2, 3] {
        let rep = near_best_report(&f, &w, r, &pairs, 256, 10.0, &format!("near_best_r{r}"))?;
        println!("{}", rep.summary_line());
        for row in &rep.rows {
            println!("    level {:>2}  extension {:.4e}  best on J {:.4e}", row.n, row.lhs, row.rhs);
        }
    }
    Ok(())
}
