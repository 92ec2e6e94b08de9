//! Two-dimensional strong means of a smooth and a rough function.
//!
//! `cargo run --release --example strong_means -- [gauge]`

use vilenkin::random::{random_grid_2d, smooth_grid_2d};
use vilenkin::summability::strong_mean_table;
use vilenkin::{Gauge, VilenkinGroup};

fn main() -> vilenkin::Result<()> {
    let gauge = Gauge::parse(&std::env::args().nth(1).unwrap_or_else(|| "exp-sqrt:A=1".into()))?;
    let g = VilenkinGroup::parse("2^6")?;
    let d = g.depth();
    let side = g.scale(d);
    let smooth = smooth_grid_2d(g.clone(), d - 2, d, 1);
    let rough = random_grid_2d(g.clone(), d, 1);
    let ts = strong_mean_table(&smooth, side, side, &gauge)?;
    let tr = strong_mean_table(&rough, side, side, &gauge)?;
    println!("gauge {}", gauge.descriptor());
    println!("{:>4} {:>14} {:>14}", "n=m", "smooth", "rough");
    let mut n = 1;
    while n <= side {
        println!("{n:>4} {:>14.6} {:>14.6}", ts.get(n, n).value, tr.get(n, n).value);
        n *= 2;
    }
    Ok(())
}
