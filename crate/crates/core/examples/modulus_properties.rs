//! Saturation, monotonicity, doubling and locality of the moduli.
//!
//! cargo run --release --example modulus_properties

use std::collections::BTreeMap;

use wapprox::function::function_registry;
use wapprox::geometry::ZSet;
use wapprox::verify::{Grids, Verifier};
use wapprox::weights::Weight;

fn main() -> wapprox::Result<()> {
    let f = function_registry("log_power", &BTreeMap::from([("alpha".into(), 0.5), ("beta".into(), 1.0)]))?;
    let w = Weight::jacobi(&[(0.0, 0.3)])?;
    let z = ZSet::new(vec![-1.0, 0.0, 1.0])?;
    let grids = Grids { x_grid: 1024, ..Grids::default() };
    let v = Verifier::new(f, w, z, 2, 1.0, 1.0, grids)?;
    for rep in v.modulus_properties(&[0.25, 0.125, 0.0625])? {
        println!("{}", rep.summary_line());
    }
    Ok(())
}
