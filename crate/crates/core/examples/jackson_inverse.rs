//! Direct and inverse estimates for `|x|^0.6` with a weight vanishing at
//! `-1, 0, 1`.
//!
//! cargo run --release --example jackson_inverse

use std::collections::BTreeMap;

use wapprox::function::function_registry;
use wapprox::geometry::ZSet;
use wapprox::verify::{Grids, Verifier};
use wapprox::weights::Weight;

fn main() -> wapprox::Result<()> {
    let f = function_registry("power_abs", &BTreeMap::from([("alpha".into(), 0.6)]))?;
    let w = Weight::jacobi(&[(-1.0, 0.5), (0.0, 0.3), (1.0, 0.5)])?;
    let z = ZSet::new(vec![-1.0, 0.0, 1.0])?;
    let ns = [4, 8, 16, 32, 64];
    for r in [1, 2] {
        let v = Verifier::new(f.clone(), w.clone(), z.clone(), r, 1.0, 1.0, Grids::default())?;
        for rep in v.jackson(&ns)?.iter().chain([v.inverse(&ns)?, v.chain(&ns)?].iter()) {
            println!("r = {r}  {}", rep.summary_line());
            for row in &rep.rows {
                println!("    n = {:>3}  lhs {:.4e}  rhs {:.4e}  ratio {:?}", row.n, row.lhs, row.rhs, row.ratio);
            }
        }
    }
    Ok(())
}
