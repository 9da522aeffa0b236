//! Doubling, A* and W*(Z) estimates for a few weights.
//!
//! cargo run --release --example classify_weights

use wapprox::geometry::ZSet;
use wapprox::weights::{classify_weight, Factor, Weight};

fn main() -> wapprox::Result<()> {
    let z = ZSet::new(vec![-1.0, 0.0, 1.0])?;
    let jacobi = Weight::jacobi(&[(-1.0, 0.5), (0.0, 0.3), (1.0, 0.5)])?;
    let gdt = Weight::gdt(Weight::one(), vec![Factor::new(0.0, 0.5, 1.0), Factor::jacobi(1.0, 0.25)])?;
    let weights = [
        ("one", Weight::one(), ZSet::endpoints()),
        ("jacobi", jacobi, z.clone()),
        ("gdt", gdt, z.clone()),
        ("nonexample", Weight::piecewise_nonexample(), z),
    ];
    let ladder = [128, 256, 512];
    println!("{:<12} {:>10} {:>10} {:>10} {:>10} {:>6}", "weight", "N", "doubling", "A*", "kappa", "div");
    for (name, w, z) in &weights {
        let rep = classify_weight(w, z, &ladder)?;
        for row in &rep.ladder {
            println!(
                "{:<12} {:>10} {:>10.4} {:>10.4} {:>10.4} {:>6}",
                name, row.resolution, row.doubling, row.astar, row.kappa, rep.diverging
            );
        }
        println!("{:<12} c_* = {:.4}  W*(Z) {}", "", rep.wstar_constant_estimate, if rep.wstar_pass { "ok" } else { "fails" });
    }
    Ok(())
}
