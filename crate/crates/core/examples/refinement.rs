//! Exact vs limiting Hamiltonian pieces along λ = 16, 32, 64, 128 for the
//! reference bump on (0.5, 4); the source of the frozen acceptance tolerances.
//!
//! `cargo run --release -p lll-core --example refinement`

use lll_core::asymptotics::{breakdown, Profile};
use lll_core::C64;

fn main() -> lll_core::Result<()> {
    let g = Profile::bump(0.5, 4.0, C64::new(1.0, 0.0))?;
    println!(
        "{:>6} {:>12} {:>12} {:>12}",
        "lambda", "|H2/h2-1|", "|H3/h3-1|", "|H4/h4-1|"
    );
    for lambda in [16usize, 32, 64, 128] {
        let r = breakdown(C64::new(1.0, 0.0), &g, lambda)?.ratios();
        println!(
            "{lambda:>6} {:>12.4e} {:>12.4e} {:>12.4e}",
            (r[0] - 1.0).abs(),
            (r[1] - 1.0).abs(),
            (r[2] - 1.0).abs()
        );
    }
    Ok(())
}
