//! Drives one harness experiment from code and prints its checks.
//!
//! `cargo run --release --example harness_run -- [experiment] [key=value ...]`

use vilenkin::harness::{run, ConfigEntry, Experiment, ExperimentConfig};

fn main() -> vilenkin::Result<()> {
    let mut args = std::env::args().skip(1);
    let experiment: Experiment = args
        .next()
        .unwrap_or_else(|| "lemma-glukhov".into())
        .parse()?;
    let mut entries = vec![ConfigEntry::flag("out", std::env::temp_dir().join("harness-example").display().to_string())];
    for kv in args {
        let (k, v) = kv.split_once('=').expect("key=value");
        entries.push(ConfigEntry::flag(k, v));
    }
    let cfg = ExperimentConfig::from_pairs(experiment, entries)?;
    let outcome = run(&cfg)?;
    for c in &outcome.output.checks {
        println!("{:<5} {} = {}", c.status.label(), c.name, c.value);
    }
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
