//! Integral of the block kernel product against its (p+1)^2 bound.
//!
//! `cargo run --release --example glukhov -- [moduli]`

use vilenkin::summability::glukhov_integral;
use vilenkin::VilenkinGroup;

fn main() -> vilenkin::Result<()> {
    let text = std::env::args().nth(1).unwrap_or_else(|| "2^5".into());
    let g = VilenkinGroup::parse(&text)?;
    println!("{:>2} {:>2} {:>14} {:>10} {:>8}", "p", "n", "integral", "root", "ratio");
    for p in 1..=2 {
        for n in 0..g.depth().min(4) {
            let v = glukhov_integral(&g, p, n)?;
            println!("{p:>2} {n:>2} {:>14.6} {:>10.6} {:>8.4}", v.integral, v.root, v.ratio);
        }
    }
    Ok(())
}
