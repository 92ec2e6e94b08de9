//! The divergence construction for gauges growing faster than `sqrt(u)`.
//!
//! Blocks `f_j` are phase-aligned with `D_{N_{A_j}}` on disjoint cylinder
//! families, so `|S_{N_{A_k}}(f; 0)|` grows like `A_k / k` while `f` stays
//! continuous. The tensor square `F(x, y) = f(x) f(y)` transfers the growth to
//! the rectangular partial sums at the origin.
//!
//! [`structured`] evaluates everything at arbitrary depth; [`dense`] builds
//! the grids cell by cell for small configurations.

pub mod dense;
mod params;
pub mod structured;

use std::io::Write;

pub use params::{choose_params, format_big, ln_big, CounterexampleParams, SCAN_LIMIT};
pub use structured::{
    divergence_diagnostic, j_decomposition, kernel_floor, measured_c_prime, phase_alignment_error,
    JDecomposition,
};

use crate::error::Result;

/// One report line per block.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleRow {
    pub k: usize,
    pub a_k: usize,
    pub n_a_k: String,
    pub j1: f64,
    pub j2: f64,
    pub j3: f64,
    pub abs_s: f64,
    pub b_k: u64,
    pub diagnostic_log: f64,
}

pub fn report_rows(params: &CounterexampleParams) -> Vec<CounterexampleRow> {
    (1..=params.blocks())
        .map(|k| {
            let d = j_decomposition(params, k);
            CounterexampleRow {
                k,
                a_k: params.a(k),
                n_a_k: format_big(params.n(k)),
                j1: d.j1,
                j2: d.j2,
                j3: d.j3,
                abs_s: d.abs_s(),
                b_k: params.b(k),
                diagnostic_log: structured::log_diagnostic(params, k, d.abs_s()),
            }
        })
        .collect()
}

/// Writes `k,A_k,N_A_k,J1,J2,J3,abs_S,B_k,diagnostic_log` rows.
pub fn write_report_csv<W: Write>(rows: &[CounterexampleRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["k", "A_k", "N_A_k", "J1", "J2", "J3", "abs_S", "B_k", "diagnostic_log"])?;
    for r in rows {
        w.write_record([
            r.k.to_string(),
            r.a_k.to_string(),
            r.n_a_k.clone(),
            r.j1.to_string(),
            r.j2.to_string(),
            r.j3.to_string(),
            r.abs_s.to_string(),
            r.b_k.to_string(),
            r.diagnostic_log.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
