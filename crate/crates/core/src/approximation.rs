//! Truncation surrogates for sup-norm best approximation.
//!
//! The best approximation `E` by polynomials of given degrees is bracketed by
//! the truncation defect: `E <= ||f - S f||_C <= 2 E`, since truncation on the
//! scale ladder is a contraction that reproduces the competitor polynomial.
//! Every quantity below is a surrogate of that kind.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::basis::CharacterTable;
use crate::error::{Error, Result};
use crate::summability::{
    average_table, cell_partial_sums, strong_mean_table, CylinderGrid2D, Gauge, Spectrum2D,
};

fn check_scale(f: &CylinderGrid2D, scale: usize) -> Result<()> {
    if scale > f.depth() {
        return Err(Error::DepthOutOfRange {
            depth: scale,
            max: f.depth(),
        });
    }
    Ok(())
}

/// `||f - S_{M_L, M_R} f||_C`.
pub fn block_approx_surrogate(f: &CylinderGrid2D, l: usize, r: usize) -> Result<f64> {
    check_scale(f, l)?;
    check_scale(f, r)?;
    let g = f.group();
    f.distance(&f.rect_partial_sum(g.scale(l), g.scale(r))?)
}

/// `||f - S^{(1)}_{M_L} f||_C`.
pub fn marginal_approx_surrogate_1(f: &CylinderGrid2D, l: usize) -> Result<f64> {
    check_scale(f, l)?;
    f.distance(&f.marginal_sum_1(f.group().scale(l))?)
}

/// `||f - S^{(2)}_{M_R} f||_C`.
pub fn marginal_approx_surrogate_2(f: &CylinderGrid2D, r: usize) -> Result<f64> {
    check_scale(f, r)?;
    f.distance(&f.marginal_sum_2(f.group().scale(r))?)
}

/// Surrogates at every ladder scale `0..=d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxReport {
    /// `M_0, ..., M_d`.
    pub scales: Vec<usize>,
    pub e1: Vec<f64>,
    pub e2: Vec<f64>,
    /// Diagonal block surrogate `||f - S_{M_L, M_L} f||_C`.
    pub block: Vec<f64>,
}

impl ApproxReport {
    pub fn new(f: &CylinderGrid2D) -> Result<Self> {
        let d = f.depth();
        let rows: Vec<(f64, f64, f64)> = (0..=d)
            .into_par_iter()
            .map(|s| {
                Ok((
                    marginal_approx_surrogate_1(f, s)?,
                    marginal_approx_surrogate_2(f, s)?,
                    block_approx_surrogate(f, s, s)?,
                ))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            scales: (0..=d).map(|s| f.group().scale(s)).collect(),
            e1: rows.iter().map(|r| r.0).collect(),
            e2: rows.iter().map(|r| r.1).collect(),
            block: rows.iter().map(|r| r.2).collect(),
        })
    }

    fn ladder_position(&self, degree: usize) -> usize {
        self.scales.partition_point(|&m| m <= degree) - 1
    }

    /// Per-degree value `E_l := E(M_L)` for `M_L <= l < M_{L+1}`.
    pub fn e1_degree(&self, l: usize) -> f64 {
        self.e1[self.ladder_position(l)]
    }

    pub fn e2_degree(&self, r: usize) -> f64 {
        self.e2[self.ladder_position(r)]
    }

    /// True when each sequence never grows by more than a factor of 2 and
    /// vanishes at full depth.
    pub fn is_monotone_with_slack(&self) -> bool {
        [&self.e1, &self.e2, &self.block].iter().all(|seq| {
            seq.windows(2).all(|w| w[1] <= 2.0 * w[0] + 1e-12)
                && seq.last().is_some_and(|&v| v < 1e-10)
        })
    }

    /// `(c/n) sum_{l=1}^{n} sqrt(E_l^{(1)}) + (c/m) sum_{r=1}^{m} sqrt(E_r^{(2)})`.
    pub fn theorem1_rhs(&self, n: usize, m: usize, c: f64) -> f64 {
        let s1: f64 = (1..=n).map(|l| self.e1_degree(l).sqrt()).sum();
        let s2: f64 = (1..=m).map(|r| self.e2_degree(r).sqrt()).sum();
        c * (s1 / n as f64 + s2 / m as f64)
    }

    /// `(1/n) sum_{l=1}^{n} (E_l^{(1)})^p + (1/m) sum_{r=1}^{m} (E_r^{(2)})^p`.
    pub fn power_sum(&self, n: usize, m: usize, p: f64) -> f64 {
        let s1: f64 = (1..=n).map(|l| self.e1_degree(l).powf(p)).sum();
        let s2: f64 = (1..=m).map(|r| self.e2_degree(r).powf(p)).sum();
        s1 / n as f64 + s2 / m as f64
    }

    /// Writes `scale,E1,E2,Eblock` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["scale", "E1", "E2", "Eblock"])?;
        for (i, &scale) in self.scales.iter().enumerate() {
            w.write_record([
                scale.to_string(),
                self.e1[i].to_string(),
                self.e2[i].to_string(),
                self.block[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Staircase right-hand side of the strong approximation estimate.
pub fn theorem1_rhs(f: &CylinderGrid2D, n: usize, m: usize, c_fit: f64) -> Result<f64> {
    Ok(ApproxReport::new(f)?.theorem1_rhs(n, m, c_fit))
}

/// Square roots of double roundoff stay below this.
pub const ROUNDOFF_FLOOR: f64 = 1e-6;

/// Ratios of the strong mean with gauge `A sqrt(u)` to the unit-constant
/// right-hand side over `1 <= n, m <= M_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Sweep {
    pub side: usize,
    /// Indexed `(n - 1) * side + (m - 1)`.
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl Theorem1Sweep {
    pub fn new(f: &CylinderGrid2D, a: f64) -> Result<Self> {
        let side = f.side();
        let gauge = Gauge::exp_sqrt(a)?;
        let table = strong_mean_table(f, side, side, &gauge)?;
        let report = ApproxReport::new(f)?;
        let mut lhs = Vec::with_capacity(side * side);
        let mut rhs = Vec::with_capacity(side * side);
        for n in 1..=side {
            for m in 1..=side {
                lhs.push(table.get(n, m).value);
                rhs.push(report.theorem1_rhs(n, m, 1.0));
            }
        }
        Ok(Self { side, lhs, rhs })
    }

    /// Largest `LHS / RHS`; infinite when a positive LHS meets a zero RHS.
    /// Both sides pass through a square root, so values below
    /// [`ROUNDOFF_FLOOR`] count as zero.
    pub fn max_ratio(&self) -> f64 {
        self.lhs
            .iter()
            .zip(&self.rhs)
            .map(|(&l, &r)| match (l <= ROUNDOFF_FLOOR, r <= ROUNDOFF_FLOOR) {
                (true, _) => 0.0,
                (false, true) => f64::INFINITY,
                (false, false) => l / r,
            })
            .fold(0.0, f64::max)
    }

    /// Largest `LHS - c RHS`.
    pub fn max_excess(&self, c: f64) -> f64 {
        self.lhs
            .iter()
            .zip(&self.rhs)
            .map(|(&l, &r)| l - c * r)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// The constant `C` of the power-mean estimate
/// `sup (1/(n k)) sum sum |S_lr f - f|^p <= C^p (p+1)^{2p} (sum of E^p terms)`,
/// taken as the smallest value valid for every `1 <= n, k <= M_d`.
pub fn lemma4_constant(f: &CylinderGrid2D, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::Domain(format!("power needs p > 0, got {p}")));
    }
    let side = f.side();
    let lhs = average_table(f, side, side, |u| u.powf(p))?;
    let report = ApproxReport::new(f)?;
    let scale = (p + 1.0).powf(2.0 * p);
    let mut c: f64 = 0.0;
    for n in 1..=side {
        for k in 1..=side {
            let l = lhs[(n - 1) * side + (k - 1)];
            let r = report.power_sum(n, k, p) * scale;
            if l <= 1e-24 {
                continue;
            }
            c = c.max(if r <= 0.0 {
                f64::INFINITY
            } else {
                (l / r).powf(1.0 / p)
            });
        }
    }
    Ok(c)
}

/// Largest cellwise excess of
/// `|S_lr f - f| <= |S_lr (f - S_{M_L, M_R} f)| + 2 E(L, R)` over
/// `1 <= l, r <= M_d`, with `L, R` the ladder positions of `l, r`.
/// Non-positive when the chain holds.
pub fn est_chain_excess(f: &CylinderGrid2D) -> Result<f64> {
    let g = f.group();
    let (d, side) = (f.depth(), f.side());
    let spectrum = f.forward_transform();
    let chars = CharacterTable::new(g, d, side)?;
    let ladder = |l: usize| (0..=d).rev().find(|&s| g.scale(s) <= l).unwrap_or(0);
    // residual spectra and surrogates per ladder pair
    let mut residuals = Vec::with_capacity((d + 1) * (d + 1));
    let mut surrogate = Vec::with_capacity((d + 1) * (d + 1));
    for lp in 0..=d {
        for rp in 0..=d {
            let (ml, mr) = (g.scale(lp), g.scale(rp));
            let coeffs = (0..side * side)
                .map(|c| {
                    let (i, j) = (c / side, c % side);
                    if i < ml && j < mr {
                        Complex64::new(0.0, 0.0)
                    } else {
                        spectrum.get(i, j)
                    }
                })
                .collect();
            residuals.push(Spectrum2D::new(g.clone(), d, coeffs)?);
            surrogate.push(block_approx_surrogate(f, lp, rp)?);
        }
    }
    let width = side + 1;
    let excess = (0..side * side)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new(), Vec::new()),
            |(sf, sg, prefix), c| {
                let cell = (c / side, c % side);
                let fv = f.get(cell.0, cell.1);
                cell_partial_sums(&spectrum, &chars, cell, (side, side), sf, prefix);
                let mut worst = f64::NEG_INFINITY;
                for lp in 0..=d {
                    for rp in 0..=d {
                        let idx = lp * (d + 1) + rp;
                        cell_partial_sums(&residuals[idx], &chars, cell, (side, side), sg, prefix);
                        for l in 1..=side {
                            if ladder(l) != lp {
                                continue;
                            }
                            for r in 1..=side {
                                if ladder(r) != rp {
                                    continue;
                                }
                                let at = l * width + r;
                                let lhs = (sf[at] - fv).norm();
                                let rhs = sg[at].norm() + 2.0 * surrogate[idx];
                                worst = worst.max(lhs - rhs);
                            }
                        }
                    }
                }
                worst
            },
        )
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(excess)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_grid_2d, smooth_grid_2d};
    use crate::VilenkinGroup;
    use std::sync::Arc;

    fn group() -> Arc<VilenkinGroup> {
        VilenkinGroup::parse("2,3,2,3").unwrap()
    }

    #[test]
    fn full_depth_reproduces() {
        let f = random_grid_2d(group(), 3, 1);
        assert!(block_approx_surrogate(&f, 3, 3).unwrap() < 1e-12);
        assert!(marginal_approx_surrogate_1(&f, 3).unwrap() < 1e-12);
        assert!(marginal_approx_surrogate_2(&f, 3).unwrap() < 1e-12);
        assert!(block_approx_surrogate(&f, 4, 0).is_err());
    }

    #[test]
    fn single_modes() {
        let g = group();
        let f = CylinderGrid2D::character(g.clone(), 3, 2, 0).unwrap();
        assert!((block_approx_surrogate(&f, 1, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((marginal_approx_surrogate_1(&f, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!(marginal_approx_surrogate_1(&f, 2).unwrap() < 1e-12);
        assert!(marginal_approx_surrogate_2(&f, 1).unwrap() < 1e-12);
    }

    #[test]
    fn block_bounded_by_marginals() {
        for seed in 0..5 {
            let f = random_grid_2d(group(), 3, seed);
            for l in 0..=3 {
                for r in 0..=3 {
                    let b = block_approx_surrogate(&f, l, r).unwrap();
                    let m = marginal_approx_surrogate_1(&f, l).unwrap()
                        + marginal_approx_surrogate_2(&f, r).unwrap();
                    assert!(b <= 2.0 * m + 1e-10);
                }
            }
        }
    }

    #[test]
    fn report_shape_and_staircase() {
        let f = random_grid_2d(group(), 3, 5);
        let rep = ApproxReport::new(&f).unwrap();
        assert_eq!(rep.scales, vec![1, 2, 6, 12]);
        assert!(rep.is_monotone_with_slack());
        assert_eq!(rep.e1_degree(1), rep.e1[0]);
        assert_eq!(rep.e1_degree(5), rep.e1[1]);
        assert_eq!(rep.e1_degree(6), rep.e1[2]);
        assert_eq!(rep.e1_degree(12), rep.e1[3]);
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("scale,E1,E2,Eblock\n"));
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn constant_function_has_zero_sides() {
        let f = CylinderGrid2D::constant(group(), 3, Complex64::new(0.5, 0.0)).unwrap();
        let sweep = Theorem1Sweep::new(&f, 1.0).unwrap();
        // square roots lift roundoff near 1e-16 to about 1e-8
        assert!(sweep.rhs.iter().all(|&r| r < 1e-6));
        assert!(sweep.lhs.iter().all(|&l| l < 1e-6));
        assert!(sweep.max_ratio().is_finite());
    }

    #[test]
    fn theorem1_holds_with_own_fit() {
        let f = smooth_grid_2d(group(), 1, 3, 2);
        let sweep = Theorem1Sweep::new(&f, 1.0).unwrap();
        let c = sweep.max_ratio();
        assert!(c.is_finite());
        assert!(sweep.max_excess(c) <= 1e-12);
    }

    #[test]
    fn est_chain_holds() {
        for seed in 0..3 {
            let f = random_grid_2d(group(), 3, seed);
            assert!(est_chain_excess(&f).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn lemma4_constant_is_finite() {
        let f = random_grid_2d(group(), 3, 7);
        for p in [1.0, 2.0] {
            let c = lemma4_constant(&f, p).unwrap();
            assert!(c.is_finite() && c > 0.0);
        }
        assert!(lemma4_constant(&f, 0.0).is_err());
    }
}
