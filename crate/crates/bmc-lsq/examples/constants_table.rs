//! Print the ergodicity-dependent constants for a few profiles, one on
//! each side of the phase transition and one at the variance boundary.
//!
//! Run with: `cargo run --example constants_table`

use bmc_lsq::cli::constants_report;
use bmc_lsq::constants::{two_point_bounds, ErgodicityProfile};

fn main() -> bmc_lsq::Result<()> {
    for (label, alpha) in [
        ("fast mixing (2a < 1)", 0.3),
        ("phase transition (2a = 1)", 0.5),
        ("variance boundary (2a = sqrt 2)", std::f64::consts::FRAC_1_SQRT_2),
        ("slow mixing", 0.85),
    ] {
        let profile = ErgodicityProfile::new(alpha, 1.0, 10, 1.0)?;
        println!("--- {label}");
        print!("{}", constants_report(&profile));
    }

    // Exact function bounds on the two-point chain instantiate c1 and c2.
    let bounds = two_point_bounds(0.4, |x| x);
    println!("--- two-point identity bounds at a = 0.4");
    println!("sup|Qg^2| = {}", bounds.sup_qg2);
    println!("sup|Qg|  = {}", bounds.sup_qg);
    println!("sup|g~|  = {}", bounds.sup_gtilde);
    Ok(())
}
