//! Fast transform on a mixed-radix group, checked against the naive sum.
//!
//! `cargo run --example transform -- [moduli] [seed]`

use vilenkin::basis::reference::naive_forward;
use vilenkin::random::random_grid_1d;
use vilenkin::VilenkinGroup;

fn main() -> vilenkin::Result<()> {
    let mut args = std::env::args().skip(1);
    let text = args.next().unwrap_or_else(|| "2,3,5,4".into());
    let seed: u64 = args.next().map_or(7, |s| s.parse().expect("seed"));
    let g = VilenkinGroup::parse(&text)?;
    let f = random_grid_1d(g.clone(), g.depth(), seed);
    let spectrum = f.forward_transform();
    let naive = naive_forward(&f)?;
    let fwd = spectrum
        .coeffs()
        .iter()
        .zip(&naive)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let back = spectrum.inverse_transform();
    let round = back
        .values()
        .iter()
        .zip(f.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    println!("group {text}, {} cells", f.len());
    println!("fast vs naive coefficients: {fwd:.3e}");
    println!("round trip: {round:.3e}");
    let energy: f64 = spectrum.coeffs().iter().map(|c| c.norm_sqr()).sum();
    let mean_sq: f64 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / f.len() as f64;
    println!("Parseval: sum |c|^2 = {energy:.12}, mean |f|^2 = {mean_sq:.12}");
    for n in [1, 2, 6, 30] {
        let s = f.partial_sum(n)?;
        println!("||S_{n:<2} f||_inf = {:.6}", s.sup_norm());
    }
    Ok(())
}
