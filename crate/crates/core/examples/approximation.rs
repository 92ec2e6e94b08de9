//! Truncation surrogates and the strong approximation estimate.
//!
//! `cargo run --release --example approximation -- [A]`

use vilenkin::approximation::{est_chain_excess, ApproxReport, Theorem1Sweep};
use vilenkin::random::random_grid_2d;
use vilenkin::VilenkinGroup;

fn main() -> vilenkin::Result<()> {
    let a: f64 = std::env::args().nth(1).map_or(1.0, |s| s.parse().expect("A"));
    let g = VilenkinGroup::parse("2,3,2,3")?;
    let f = random_grid_2d(g.clone(), g.depth(), 5);
    let report = ApproxReport::new(&f)?;
    report.write_csv(std::io::stdout().lock())?;
    println!("monotone: {}", report.is_monotone_with_slack());
    println!("chain excess: {:.3e}", est_chain_excess(&f)?);
    let sweep = Theorem1Sweep::new(&f, a)?;
    let c = sweep.max_ratio();
    println!("fitted constant for A = {a}: {c:.6}");
    println!("max excess at that constant: {:.3e}", sweep.max_excess(c));
    Ok(())
}
