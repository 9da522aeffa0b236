//! The Mastroianni–Totik modulus squeezed between two complete moduli.
//!
//! cargo run --release --example mt_sandwich

use std::collections::BTreeMap;

use wapprox::function::function_registry;
use wapprox::geometry::ZSet;
use wapprox::verify::{Grids, Verifier};
use wapprox::weights::Weight;

fn main() -> wapprox::Result<()> {
    let f = function_registry("power_abs", &BTreeMap::from([("alpha".into(), 0.6)]))?;
    let w = Weight::jacobi(&[(-1.0, 0.5), (0.0, 0.3), (1.0, 0.5)])?;
    let z = ZSet::new(vec![-1.0, 0.0, 1.0])?;
    let v = Verifier::new(f, w, z, 2, 1.0, 1.0, Grids::default())?;
    for rep in v.mt_sandwich(&[1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125])? {
        println!("{}", rep.summary_line());
        for row in &rep.rows {
            println!("    k = {}  lhs {:.4e}  rhs {:.4e}", row.n, row.lhs, row.rhs);
        }
    }
    Ok(())
}
