//! Markov–Bernstein, Remez and equivalence constants for random polynomials.
//!
//! cargo run --release --example polynomial_inequalities

use wapprox::verify::verify_polynomial_inequalities;
use wapprox::weights::{Factor, Weight};

fn main() -> wapprox::Result<()> {
    let weights = [
        Weight::one(),
        Weight::phi_power(1.0)?,
        Weight::gdt(Weight::phi_power(1.0)?, vec![Factor::jacobi(0.0, 0.3)])?,
    ];
    let reports = verify_polynomial_inequalities(&weights, &[8, 16, 32], 20, 7)?;
    for r in &reports {
        println!("{}", r.summary_line());
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    println!("{} reports, {failed} failed", reports.len());
    Ok(())
}
