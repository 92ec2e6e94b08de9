//! Strong means and block power means of rectangular partial sums.
//!
//! Everything here needs `S_{lr}(f; x, y)` for many `(l, r)` at every cell.
//! For a fixed cell the whole table `l <= n, r <= m` is built in `O(n m)`
//! from the spectrum by prefix sums over the two coefficient axes, so a sweep
//! over all `(n, m)` costs `O(M_d^2 n m)` instead of one transform per pair.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{CylinderGrid2D, Gauge, Spectrum2D};
use crate::basis::{CharacterTable, CylinderGrid1D};
use crate::error::{Error, Result};

/// Exponents above this mark a strong mean as overflowed.
pub const EXPONENT_LIMIT: f64 = 700.0;

/// A sup-norm mean; `+inf` with `overflowed = true` when an exponent passed
/// [`EXPONENT_LIMIT`] or the accumulation left the finite range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanValue {
    pub value: f64,
    pub overflowed: bool,
}

impl MeanValue {
    fn from_raw(v: f64) -> Self {
        if v.is_finite() {
            Self {
                value: v,
                overflowed: false,
            }
        } else {
            Self {
                value: f64::INFINITY,
                overflowed: true,
            }
        }
    }
}

/// `e^{g(u)} - 1`, or `+inf` past the exponent limit.
pub(crate) fn exp_gauge(g: &Gauge, u: f64) -> f64 {
    let e = g.eval(u);
    if e > EXPONENT_LIMIT {
        f64::INFINITY
    } else {
        e.exp_m1()
    }
}

/// Fills `out[l * (m + 1) + r] = S_{lr}(f; x, y)` for `l <= n, r <= m`.
pub(crate) fn cell_partial_sums(
    spectrum: &Spectrum2D,
    chars: &CharacterTable,
    (x, y): (usize, usize),
    (n, m): (usize, usize),
    out: &mut Vec<Complex64>,
    prefix: &mut Vec<Complex64>,
) {
    let zero = Complex64::new(0.0, 0.0);
    let width = m + 1;
    out.clear();
    out.resize((n + 1) * width, zero);
    prefix.clear();
    prefix.resize(width, zero);
    for i in 0..n {
        let px = chars.get(i, x);
        let mut acc = zero;
        for j in 0..m {
            acc += spectrum.get(i, j) * chars.get(j, y);
            prefix[j + 1] = acc;
        }
        let (done, rest) = out.split_at_mut((i + 1) * width);
        let prev = &done[i * width..];
        for r in 0..width {
            rest[r] = prev[r] + px * prefix[r];
        }
    }
}

/// Sup over cells of `(1/(n m)) sum_{l=1}^{n} sum_{r=1}^{m} h(|S_lr f - f|)`
/// for every `1 <= n <= n_max`, `1 <= m <= m_max`, indexed
/// `(n - 1) * m_max + (m - 1)`.
pub fn average_table(
    f: &CylinderGrid2D,
    n_max: usize,
    m_max: usize,
    integrand: impl Fn(f64) -> f64 + Sync,
) -> Result<Vec<f64>> {
    let side = f.side();
    if n_max == 0 || m_max == 0 || n_max > side || m_max > side {
        return Err(Error::IndexOutOfRange {
            index: n_max.max(m_max) as u64,
            bound: side as u64,
        });
    }
    let spectrum = f.forward_transform();
    let chars = CharacterTable::new(f.group(), f.depth(), n_max.max(m_max))?;
    let width = m_max + 1;
    let init = || {
        (
            vec![0.0f64; n_max * m_max],
            Vec::new(),
            Vec::new(),
            vec![0.0f64; (n_max + 1) * width],
        )
    };
    let (best, ..) = (0..side * side)
        .into_par_iter()
        .fold(init, |(mut best, mut sums, mut prefix, mut acc), c| {
            let (x, y) = (c / side, c % side);
            let fv = f.get(x, y);
            cell_partial_sums(&spectrum, &chars, (x, y), (n_max, m_max), &mut sums, &mut prefix);
            // acc[n][m] = sum_{l<=n, r<=m} h(|S_lr - f|)
            for l in 1..=n_max {
                let mut row = 0.0;
                for r in 1..=m_max {
                    row += integrand((sums[l * width + r] - fv).norm());
                    acc[l * width + r] = acc[(l - 1) * width + r] + row;
                }
            }
            for n in 1..=n_max {
                for m in 1..=m_max {
                    let avg = acc[n * width + m] / (n * m) as f64;
                    let slot = &mut best[(n - 1) * m_max + (m - 1)];
                    if avg > *slot || avg.is_nan() {
                        *slot = avg;
                    }
                }
            }
            (best, sums, prefix, acc)
        })
        .reduce(init, |(mut a, ..), (b, ..)| {
            for (x, y) in a.iter_mut().zip(b) {
                if y > *x || y.is_nan() {
                    *x = y;
                }
            }
            (a, Vec::new(), Vec::new(), Vec::new())
        });
    Ok(best)
}

/// `|| (1/(n m)) sum_{l=1}^{n} sum_{r=1}^{m} (e^{g(|S_lr f - f|)} - 1) ||_C`.
pub fn strong_mean_2d(f: &CylinderGrid2D, n: usize, m: usize, g: &Gauge) -> Result<MeanValue> {
    let table = strong_mean_table(f, n, m, g)?;
    Ok(table.get(n, m))
}

/// All strong means with `n <= n_max`, `m <= m_max` from one pass.
#[derive(Debug, Clone)]
pub struct StrongMeanTable {
    n_max: usize,
    m_max: usize,
    values: Vec<f64>,
}

impl StrongMeanTable {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn get(&self, n: usize, m: usize) -> MeanValue {
        MeanValue::from_raw(self.values[(n - 1) * self.m_max + (m - 1)])
    }
}

pub fn strong_mean_table(
    f: &CylinderGrid2D,
    n_max: usize,
    m_max: usize,
    g: &Gauge,
) -> Result<StrongMeanTable> {
    let values = average_table(f, n_max, m_max, |u| exp_gauge(g, u))?;
    Ok(StrongMeanTable {
        n_max,
        m_max,
        values,
    })
}

/// `sup_x (1/n) sum_{k=1}^{n} g(|S_k f(x) - f(x)|)` for every `n <= n_max`,
/// indexed `n - 1`.
pub fn fridli_schipp_table(f: &CylinderGrid1D, n_max: usize, g: &Gauge) -> Result<Vec<MeanValue>> {
    let cells = f.len();
    if n_max == 0 || n_max > cells {
        return Err(Error::IndexOutOfRange {
            index: n_max as u64,
            bound: cells as u64,
        });
    }
    let spectrum = f.forward_transform();
    let chars = CharacterTable::new(f.group(), f.depth(), n_max)?;
    let best = (0..cells)
        .into_par_iter()
        .map(|x| {
            let fv = f.values()[x];
            let mut s = Complex64::new(0.0, 0.0);
            let mut acc = 0.0;
            (1..=n_max)
                .map(|k| {
                    s += spectrum.coeffs()[k - 1] * chars.get(k - 1, x);
                    acc += g.eval((s - fv).norm());
                    acc / k as f64
                })
                .collect::<Vec<f64>>()
        })
        .reduce(
            || vec![0.0; n_max],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    if y > *x || y.is_nan() {
                        *x = y;
                    }
                }
                a
            },
        );
    Ok(best.into_iter().map(MeanValue::from_raw).collect())
}

/// The one-dimensional strong mean at a single `n`.
pub fn fridli_schipp_mean_1d(f: &CylinderGrid1D, n: usize, g: &Gauge) -> Result<MeanValue> {
    Ok(fridli_schipp_table(f, n, g)?[n - 1])
}

/// Block power mean
/// `{ (M_A M_B)^{-1} sum_{n=M_A}^{M_{A+1}-1} sum_{l=M_B}^{M_{B+1}-1} |S_nl f|^p }^{1/p}`
/// at every cell.
#[derive(Debug, Clone)]
pub struct PowerMean {
    pub block_x: usize,
    pub block_y: usize,
    pub p: f64,
    /// Row-major per-cell values.
    pub cells: Vec<f64>,
    pub sup: f64,
}

fn check_power(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("power mean needs p > 0, got {p}")))
    }
}

pub fn power_mean_block(f: &CylinderGrid2D, a: usize, b: usize, p: f64) -> Result<PowerMean> {
    check_power(p)?;
    let depth = f.depth();
    if a >= depth || b >= depth {
        return Err(Error::DepthOutOfRange {
            depth: a.max(b) + 1,
            max: depth,
        });
    }
    let g = f.group();
    let (lo_x, hi_x) = (g.scale(a), g.scale(a + 1));
    let (lo_y, hi_y) = (g.scale(b), g.scale(b + 1));
    let side = f.side();
    let spectrum = f.forward_transform();
    let chars = CharacterTable::new(g, depth, hi_x.max(hi_y) - 1)?;
    let norm = 1.0 / (lo_x * lo_y) as f64;
    let cells: Vec<f64> = (0..side * side)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(sums, prefix), c| {
                let cell = (c / side, c % side);
                cell_partial_sums(&spectrum, &chars, cell, (hi_x - 1, hi_y - 1), sums, prefix);
                let width = hi_y;
                let mut total = 0.0;
                for n in lo_x..hi_x {
                    for l in lo_y..hi_y {
                        total += sums[n * width + l].norm().powf(p);
                    }
                }
                (total * norm).powf(1.0 / p)
            },
        )
        .collect();
    let sup = cells.iter().copied().fold(0.0, f64::max);
    Ok(PowerMean {
        block_x: a,
        block_y: b,
        p,
        cells,
        sup,
    })
}

/// Sup of the block power mean for every ladder block `(A, B)` with
/// `A, B < d`, from a single pass over the cells. Indexed `A * d + B`.
pub fn power_mean_all_blocks(f: &CylinderGrid2D, p: f64) -> Result<Vec<f64>> {
    check_power(p)?;
    let depth = f.depth();
    if depth == 0 {
        return Ok(Vec::new());
    }
    let g = f.group();
    let side = f.side();
    let spectrum = f.forward_transform();
    let chars = CharacterTable::new(g, depth, side - 1)?;
    let per_cell = |sums: &[Complex64]| -> Vec<f64> {
        let mut out = vec![0.0; depth * depth];
        for a in 0..depth {
            for b in 0..depth {
                let mut total = 0.0;
                for n in g.scale(a)..g.scale(a + 1) {
                    for l in g.scale(b)..g.scale(b + 1) {
                        total += sums[n * side + l].norm().powf(p);
                    }
                }
                let norm = 1.0 / (g.scale(a) * g.scale(b)) as f64;
                out[a * depth + b] = (total * norm).powf(1.0 / p);
            }
        }
        out
    };
    Ok((0..side * side)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(sums, prefix), c| {
                cell_partial_sums(&spectrum, &chars, (c / side, c % side), (side - 1, side - 1), sums, prefix);
                per_cell(sums)
            },
        )
        .reduce(
            || vec![0.0; depth * depth],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x = x.max(y);
                }
                a
            },
        ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_grid_1d, random_grid_2d, smooth_grid_1d, smooth_grid_2d};
    use crate::VilenkinGroup;
    use std::sync::Arc;

    fn group() -> Arc<VilenkinGroup> {
        VilenkinGroup::parse("2,3,2,3").unwrap()
    }

    #[test]
    fn partial_sum_table_matches_transforms() {
        let f = random_grid_2d(group(), 3, 8);
        let spectrum = f.forward_transform();
        let chars = CharacterTable::new(f.group(), 3, 12).unwrap();
        let (mut sums, mut prefix) = (Vec::new(), Vec::new());
        for (x, y) in [(0, 0), (3, 7), (11, 11)] {
            cell_partial_sums(&spectrum, &chars, (x, y), (12, 12), &mut sums, &mut prefix);
            for l in 0..=12 {
                for r in 0..=12 {
                    let s = f.rect_partial_sum(l, r).unwrap().get(x, y);
                    assert!((sums[l * 13 + r] - s).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn constant_function_has_zero_strong_mean() {
        let f = CylinderGrid2D::constant(group(), 4, Complex64::new(0.3, 0.4)).unwrap();
        let g = Gauge::exp_sqrt(1.0).unwrap();
        for (n, m) in [(1, 1), (2, 5), (36, 36)] {
            let v = strong_mean_2d(&f, n, m, &g).unwrap();
            assert!(v.value.abs() < 1e-6 && !v.overflowed);
        }
    }

    #[test]
    fn single_rejected_mode() {
        let f = CylinderGrid2D::character(group(), 4, 1, 1).unwrap();
        let g = Gauge::exp_sqrt(1.5).unwrap();
        let v = strong_mean_2d(&f, 1, 1, &g).unwrap();
        assert!((v.value - (1.5f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn zero_gauge_gives_zero() {
        let f = random_grid_2d(group(), 3, 4);
        let t = strong_mean_table(&f, 12, 12, &Gauge::Zero).unwrap();
        for n in 1..=12 {
            for m in 1..=12 {
                assert_eq!(t.get(n, m).value, 0.0);
            }
        }
    }

    #[test]
    fn table_entries_match_single_evaluations() {
        let f = random_grid_2d(group(), 3, 6);
        let g = Gauge::exp_sqrt(0.7).unwrap();
        let t = strong_mean_table(&f, 12, 9, &g).unwrap();
        for (n, m) in [(1, 1), (4, 9), (12, 2), (7, 7)] {
            // brute force from full transforms
            let mut sup: f64 = 0.0;
            let sums: Vec<Vec<CylinderGrid2D>> = (1..=n)
                .map(|l| (1..=m).map(|r| f.rect_partial_sum(l, r).unwrap()).collect())
                .collect();
            for c in 0..f.values().len() {
                let mut acc = 0.0;
                for row in &sums {
                    for s in row {
                        acc += (g.eval((s.values()[c] - f.values()[c]).norm())).exp() - 1.0;
                    }
                }
                sup = sup.max(acc / (n * m) as f64);
            }
            assert!((t.get(n, m).value - sup).abs() < 1e-12);
        }
    }

    #[test]
    fn smooth_function_trend() {
        let g = group();
        let f = smooth_grid_2d(g.clone(), 2, 4, 9);
        let gauge = Gauge::exp_sqrt(1.0).unwrap();
        let t = strong_mean_table(&f, 36, 36, &gauge).unwrap();
        assert!(t.get(36, 36).value < t.get(2, 2).value);
    }

    #[test]
    fn overflow_is_flagged() {
        let f = CylinderGrid2D::character(group(), 2, 1, 1).unwrap();
        let g = Gauge::power(800.0, 1.0).unwrap();
        let v = strong_mean_2d(&f, 1, 1, &g).unwrap();
        assert!(v.overflowed && v.value.is_infinite());
    }

    #[test]
    fn fridli_schipp_examples() {
        let g = group();
        let gauge = Gauge::exp_minus_one(1.0).unwrap();
        let zero = CylinderGrid1D::zeros(g.clone(), 4).unwrap();
        assert_eq!(fridli_schipp_mean_1d(&zero, 10, &gauge).unwrap().value, 0.0);
        let psi1 = CylinderGrid1D::character(g.clone(), 4, 1).unwrap();
        let v = fridli_schipp_mean_1d(&psi1, 1, &gauge).unwrap();
        assert!((v.value - gauge.eval(1.0)).abs() < 1e-12);
        let smooth = smooth_grid_1d(g.clone(), 2, 4, 3);
        let t = fridli_schipp_table(&smooth, 36, &gauge).unwrap();
        assert!(t[35].value < t[1].value);
        assert!(fridli_schipp_table(&smooth, 37, &gauge).is_err());
    }

    #[test]
    fn power_mean_of_one() {
        let g = VilenkinGroup::parse("2^4").unwrap();
        let f = CylinderGrid2D::constant(g, 4, Complex64::new(1.0, 0.0)).unwrap();
        for p in [1.0, 2.0, 4.0] {
            for (a, b) in [(0, 0), (1, 2), (3, 3)] {
                let pm = power_mean_block(&f, a, b, p).unwrap();
                assert!((pm.sup - 1.0).abs() < 1e-12);
            }
        }
        // with m_A = 3 the block holds (m_A - 1) M_A indices
        let g = group();
        let f = CylinderGrid2D::constant(g, 4, Complex64::new(1.0, 0.0)).unwrap();
        let pm = power_mean_block(&f, 1, 1, 2.0).unwrap();
        assert!((pm.sup - 2.0).abs() < 1e-12);
    }

    #[test]
    fn power_mean_is_homogeneous() {
        let f = random_grid_2d(group(), 4, 12);
        let c = Complex64::new(0.0, 2.5);
        let scaled = CylinderGrid2D::new(
            f.group().clone(),
            4,
            f.values().iter().map(|v| v * c).collect(),
        )
        .unwrap();
        for (a, b) in [(0, 1), (2, 2), (1, 3)] {
            let lo = power_mean_block(&f, a, b, 3.0).unwrap();
            let hi = power_mean_block(&scaled, a, b, 3.0).unwrap();
            assert!((hi.sup - 2.5 * lo.sup).abs() < 1e-10);
        }
    }

    #[test]
    fn all_blocks_match_single_blocks() {
        let f = random_grid_2d(group(), 4, 13);
        let all = power_mean_all_blocks(&f, 2.0).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let single = power_mean_block(&f, a, b, 2.0).unwrap();
                assert!((all[a * 4 + b] - single.sup).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn power_mean_domain() {
        let f = random_grid_2d(group(), 2, 1);
        assert!(matches!(power_mean_block(&f, 0, 0, 0.0), Err(Error::Domain(_))));
        assert!(power_mean_block(&f, 2, 0, 1.0).is_err());
    }

    #[test]
    fn random_1d_grid_is_unit_norm() {
        let f = random_grid_1d(group(), 4, 2);
        assert!((f.sup_norm() - 1.0).abs() < 1e-15);
    }
}
