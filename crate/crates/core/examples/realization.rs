//! The realization functional against the complete modulus.
//!
//! cargo run --release --example realization

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
    for n in [4, 8, 16, 32] {
        println!("n = {n:>3}  R = {:.4e}  omega(1/n) = {:.4e}", v.realization_value(n)?, v.omega(1.0, 1.0, 1.0 / n as f64)?.value);
    }
    for rep in v.realization(&[4, 8, 16, 32], 1.0, 2.0)? {
        println!("{}", rep.summary_line());
    }
    Ok(())
}
