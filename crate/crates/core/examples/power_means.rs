//! Block power means of rectangular partial sums and the fitted constants.
//!
//! `cargo run --release --example power_means -- [moduli]`

use vilenkin::approximation::lemma4_constant;
use vilenkin::random::random_grid_2d;
use vilenkin::summability::power_mean_all_blocks;
use vilenkin::VilenkinGroup;

fn main() -> vilenkin::Result<()> {
    let text = std::env::args().nth(1).unwrap_or_else(|| "2,3,2,3".into());
    let g = VilenkinGroup::parse(&text)?;
    let d = g.depth();
    let f = random_grid_2d(g.clone(), d, 11);
    for p in [1.0, 2.0, 4.0] {
        let means = power_mean_all_blocks(&f, p)?;
        let worst = means.iter().copied().fold(0.0, f64::max);
        println!(
            "p = {p}: max block mean {worst:.6}, over (p+1)^2 {:.6}, truncation constant {:.6}",
            worst / (p + 1.0).powi(2),
            lemma4_constant(&f, p)?
        );
    }
    Ok(())
}
