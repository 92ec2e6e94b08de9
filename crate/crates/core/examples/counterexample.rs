//! Divergence construction: parameters, J-decomposition and the diagnostic.
//!
//! `cargo run --release --example counterexample -- [c_prime] [blocks]`

use std::time::Instant;

use vilenkin::counterexample::{
    choose_params, kernel_floor, measured_c_prime, phase_alignment_error, report_rows,
    write_report_csv,
};
use vilenkin::{Gauge, ModulusSequence};

fn main() -> vilenkin::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let c_prime: f64 = args.first().map_or(Ok(0.19), |s| s.parse()).expect("c' as a number");
    let blocks: usize = args.get(1).map_or(Ok(2), |s| s.parse()).expect("block count");
    let pattern = ModulusSequence::parse("2,3")?;
    let gauge = Gauge::parse("pow:1.5")?;

    let start = Instant::now();
    let params = choose_params(&gauge, c_prime, blocks, &pattern, 1 << 20)?;
    for (name, ok) in params.constraint_checks() {
        println!("{:<32} {}", name, if ok { "ok" } else { "VIOLATED" });
    }
    for k in 1..=blocks {
        println!(
            "block {k}: kernel floor {:.4}, phase error {:.2e}",
            kernel_floor(&params, k),
            phase_alignment_error(&params, k, 20, k as u64)
        );
    }
    let rows = report_rows(&params);
    write_report_csv(&rows, std::io::stdout())?;
    println!("realised c' = {:.4}", measured_c_prime(&params));
    eprintln!("elapsed {:?}", start.elapsed());
    Ok(())
}
