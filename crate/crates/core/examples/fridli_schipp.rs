//! One-dimensional strong means along all n up to the group order.
//!
//! `cargo run --release --example fridli_schipp -- [gauge]`

use vilenkin::random::smooth_grid_1d;
use vilenkin::summability::fridli_schipp_table;
use vilenkin::{Gauge, VilenkinGroup};

fn main() -> vilenkin::Result<()> {
    let gauge = Gauge::parse(&std::env::args().nth(1).unwrap_or_else(|| "exp:A=1".into()))?;
    let g = VilenkinGroup::parse("2,3,2,3,2,3")?;
    let k = g.depth();
    let f = smooth_grid_1d(g.clone(), k - 2, k, 3);
    let m = g.scale(k);
    let table = fridli_schipp_table(&f, m, &gauge)?;
    println!("gauge {}, order {m}", gauge.descriptor());
    for j in 0..=k {
        let n = g.scale(j);
        let v = &table[n - 1];
        println!("n = M_{j} = {n:>3}: {:.6}{}", v.value, if v.overflowed { " (overflow)" } else { "" });
    }
    Ok(())
}
