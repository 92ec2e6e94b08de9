//! The kernel integral
//! `(1/M_n) int_{G^p} | sum_{l=M_n}^{M_{n+1}-1} prod_k D_l(s_k) | ds`.
//!
//! Every `D_l` with `l < M_{n+1}` is constant on depth `n + 1` cylinders, so
//! the integral is an exact average over `M_{n+1}^p` cells.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::basis::CharacterTable;
use crate::error::{Error, Result};
use crate::group::VilenkinGroup;

/// Largest admissible `M_{n+1}^p`.
pub const GLUKHOV_CELL_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlukhovValue {
    pub integral: f64,
    /// `integral^{1/p}`.
    pub root: f64,
    /// `root / p`, bounded in `n` and `p`.
    pub ratio: f64,
}

pub fn glukhov_integral(group: &VilenkinGroup, p: usize, n: usize) -> Result<GlukhovValue> {
    if p == 0 {
        return Err(Error::Domain("the product needs p >= 1".into()));
    }
    let depth = n + 1;
    if depth > group.depth() {
        return Err(Error::DepthOutOfRange {
            depth,
            max: group.depth(),
        });
    }
    let cells = group.scale(depth);
    let total = (cells as u128).checked_pow(p as u32).unwrap_or(u128::MAX);
    if total > GLUKHOV_CELL_BUDGET {
        return Err(Error::BudgetExceeded {
            what: format!("kernel integral cells at p = {p}, n = {n}"),
            required: total,
            budget: GLUKHOV_CELL_BUDGET,
        });
    }
    let (lo, hi) = (group.scale(n), cells);
    let chars = CharacterTable::new(group, depth, hi)?;
    // kernels[s * block + (l - lo)] = D_l(s)
    let block = hi - lo;
    let mut kernels = vec![Complex64::new(0.0, 0.0); cells * block];
    for s in 0..cells {
        let mut d = Complex64::new(0.0, 0.0);
        for l in 0..hi {
            if l >= lo {
                kernels[s * block + (l - lo)] = d;
            }
            d += chars.get(l, s);
        }
    }
    // The first coordinate is split across threads; the rest are enumerated.
    let sum: f64 = (0..cells)
        .into_par_iter()
        .map(|s0| {
            let mut stack = vec![kernels[s0 * block..(s0 + 1) * block].to_vec()];
            let mut acc = 0.0;
            accumulate(&kernels, block, cells, p - 1, &mut stack, &mut acc);
            acc
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .sum();
    let integral = sum / (lo as f64 * total as f64);
    let root = integral.powf(1.0 / p as f64);
    Ok(GlukhovValue {
        integral,
        root,
        ratio: root / p as f64,
    })
}

fn accumulate(
    kernels: &[Complex64],
    block: usize,
    cells: usize,
    remaining: usize,
    stack: &mut Vec<Vec<Complex64>>,
    acc: &mut f64,
) {
    let top = stack.last().expect("non-empty stack");
    if remaining == 0 {
        *acc += top.iter().sum::<Complex64>().norm();
        return;
    }
    let top = top.clone();
    for s in 0..cells {
        let row = &kernels[s * block..(s + 1) * block];
        stack.push(top.iter().zip(row).map(|(a, b)| a * b).collect());
        accumulate(kernels, block, cells, remaining - 1, stack, acc);
        stack.pop();
    }
}
