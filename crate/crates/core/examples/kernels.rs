//! Dirichlet kernels: direct sum, closed form and the block identity.
//!
//! `cargo run --example kernels -- [moduli]`

use vilenkin::basis::{dirichlet_block, dirichlet_closed, dirichlet_direct};
use vilenkin::VilenkinGroup;

fn main() -> vilenkin::Result<()> {
    let text = std::env::args().nth(1).unwrap_or_else(|| "2,3,2,3".into());
    let g = VilenkinGroup::parse(&text)?;
    let mut worst = 0.0f64;
    for idx in 0..g.order() {
        let x = g.point(idx)?;
        for n in 0..=g.order() {
            let e = (dirichlet_closed(&g, n, &x)? - dirichlet_direct(&g, n, &x)?).norm();
            worst = worst.max(e);
        }
    }
    println!("group {text}, order {}", g.order());
    println!("max |closed - direct| over all n, x: {worst:.3e}");
    let zero = g.zero();
    for j in 0..=g.depth() {
        println!("D_{{M_{j}}}(0) = {:>4}", dirichlet_block(&g, j, &zero)?.re);
    }
    let x = g.point(1)?;
    println!("D_n at the first nonzero cell:");
    for n in 0..=g.scale(2) as u64 {
        let d = dirichlet_closed(&g, n, &x)?;
        println!("  n={n:>2}  {:+.4} {:+.4}i", d.re, d.im);
    }
    Ok(())
}
