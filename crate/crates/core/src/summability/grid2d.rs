use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::basis::{forward_in_place, inverse_in_place, CylinderGrid1D};
use crate::error::{Error, Result};
use crate::group::VilenkinGroup;

/// A function on `G_m x G_m` constant on products of depth-`d` cylinders.
/// Values are row-major: `values[x * M_d + y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderGrid2D {
    group: Arc<VilenkinGroup>,
    depth: usize,
    values: Vec<Complex64>,
}

/// Coefficients `hat f(i, j)`, row-major in `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2D {
    group: Arc<VilenkinGroup>,
    depth: usize,
    coeffs: Vec<Complex64>,
}

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Inverse,
}

fn check_square(group: &VilenkinGroup, depth: usize, len: usize) -> Result<usize> {
    group.number_system().check_depth(depth)?;
    let side = group.scale(depth);
    if len != side * side {
        return Err(Error::LengthMismatch {
            expected: side * side,
            found: len,
        });
    }
    Ok(side)
}

fn check_bound(n: usize, side: usize) -> Result<()> {
    if n > side {
        return Err(Error::IndexOutOfRange {
            index: n as u64,
            bound: side as u64,
        });
    }
    Ok(())
}

fn transpose(data: &[Complex64], side: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    for x in 0..side {
        for y in 0..side {
            out[y * side + x] = data[x * side + y];
        }
    }
    out
}

/// Transforms every row (the second variable) in parallel.
fn rows(group: &VilenkinGroup, depth: usize, data: &mut [Complex64], dir: Direction) {
    let side = group.scale(depth);
    data.par_chunks_mut(side).for_each(|row| match dir {
        Direction::Forward => forward_in_place(group, depth, row),
        Direction::Inverse => inverse_in_place(group, depth, row),
    });
}

/// Transforms every column (the first variable).
fn columns(group: &VilenkinGroup, depth: usize, data: &mut Vec<Complex64>, dir: Direction) {
    let side = group.scale(depth);
    let mut t = transpose(data, side);
    rows(group, depth, &mut t, dir);
    *data = transpose(&t, side);
}

impl CylinderGrid2D {
    pub fn new(group: Arc<VilenkinGroup>, depth: usize, values: Vec<Complex64>) -> Result<Self> {
        check_square(&group, depth, values.len())?;
        Ok(Self {
            group,
            depth,
            values,
        })
    }

    pub fn from_fn(
        group: Arc<VilenkinGroup>,
        depth: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self> {
        group.number_system().check_depth(depth)?;
        let side = group.scale(depth);
        let values = (0..side * side).map(|c| f(c / side, c % side)).collect();
        Ok(Self {
            group,
            depth,
            values,
        })
    }

    pub fn constant(group: Arc<VilenkinGroup>, depth: usize, c: Complex64) -> Result<Self> {
        Self::from_fn(group, depth, |_, _| c)
    }

    /// `F(x, y) = f(x) g(y)`.
    pub fn tensor(f: &CylinderGrid1D, g: &CylinderGrid1D) -> Result<Self> {
        if f.depth() != g.depth() || f.group() != g.group() {
            return Err(Error::ModulusMismatch);
        }
        Self::from_fn(Arc::clone(f.group()), f.depth(), |x, y| {
            f.values()[x] * g.values()[y]
        })
    }

    /// `psi_a(x) psi_b(y)`.
    pub fn character(group: Arc<VilenkinGroup>, depth: usize, a: usize, b: usize) -> Result<Self> {
        let fx = CylinderGrid1D::character(Arc::clone(&group), depth, a)?;
        let fy = CylinderGrid1D::character(group, depth, b)?;
        Self::tensor(&fx, &fy)
    }

    pub fn group(&self) -> &Arc<VilenkinGroup> {
        &self.group
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `M_d`, the number of cells along each axis.
    pub fn side(&self) -> usize {
        self.group.scale(self.depth)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> Complex64 {
        self.values[x * self.side() + y]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `||self - other||_C`.
    pub fn distance(&self, other: &CylinderGrid2D) -> Result<f64> {
        if self.depth != other.depth || self.group != other.group {
            return Err(Error::ModulusMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn sub(&self, other: &CylinderGrid2D) -> Result<CylinderGrid2D> {
        if self.depth != other.depth || self.group != other.group {
            return Err(Error::ModulusMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            group: Arc::clone(&self.group),
            depth: self.depth,
            values,
        })
    }

    pub fn refine(&self, depth: usize) -> Result<Self> {
        if depth < self.depth {
            return Err(Error::Domain(format!(
                "cannot refine depth {} to coarser depth {depth}",
                self.depth
            )));
        }
        let coarse = self.side();
        Self::from_fn(Arc::clone(&self.group), depth, |x, y| {
            self.get(x % coarse, y % coarse)
        })
    }

    pub fn forward_transform(&self) -> Spectrum2D {
        let mut coeffs = self.values.clone();
        rows(&self.group, self.depth, &mut coeffs, Direction::Forward);
        columns(&self.group, self.depth, &mut coeffs, Direction::Forward);
        Spectrum2D {
            group: Arc::clone(&self.group),
            depth: self.depth,
            coeffs,
        }
    }

    /// `S_{M,N}(f; x, y) = sum_{i<M} sum_{j<N} hat f(i, j) psi_i(x) psi_j(y)`.
    pub fn rect_partial_sum(&self, m: usize, n: usize) -> Result<Self> {
        Ok(self.forward_transform().truncated(m, n)?.inverse_transform())
    }

    /// `S^{(1)}_n`: partial sum in the first variable only.
    pub fn marginal_sum_1(&self, n: usize) -> Result<Self> {
        let side = self.side();
        check_bound(n, side)?;
        let mut t = transpose(&self.values, side);
        rows(&self.group, self.depth, &mut t, Direction::Forward);
        t.par_chunks_mut(side)
            .for_each(|row| row[n..].fill(Complex64::new(0.0, 0.0)));
        rows(&self.group, self.depth, &mut t, Direction::Inverse);
        Ok(Self {
            group: Arc::clone(&self.group),
            depth: self.depth,
            values: transpose(&t, side),
        })
    }

    /// `S^{(2)}_n`: partial sum in the second variable only.
    pub fn marginal_sum_2(&self, n: usize) -> Result<Self> {
        let side = self.side();
        check_bound(n, side)?;
        let mut v = self.values.clone();
        rows(&self.group, self.depth, &mut v, Direction::Forward);
        v.par_chunks_mut(side)
            .for_each(|row| row[n..].fill(Complex64::new(0.0, 0.0)));
        rows(&self.group, self.depth, &mut v, Direction::Inverse);
        Ok(Self {
            group: Arc::clone(&self.group),
            depth: self.depth,
            values: v,
        })
    }

    /// Writes `x,y,re,im` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let side = self.side();
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "y", "re", "im"])?;
        for (c, v) in self.values.iter().enumerate() {
            w.write_record([
                (c / side).to_string(),
                (c % side).to_string(),
                v.re.to_string(),
                v.im.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl Spectrum2D {
    pub fn new(group: Arc<VilenkinGroup>, depth: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        check_square(&group, depth, coeffs.len())?;
        Ok(Self {
            group,
            depth,
            coeffs,
        })
    }

    pub fn group(&self) -> &Arc<VilenkinGroup> {
        &self.group
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn side(&self) -> usize {
        self.group.scale(self.depth)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.coeffs[i * self.side() + j]
    }

    /// Keeps `hat f(i, j)` for `i < m, j < n`.
    pub fn truncated(mut self, m: usize, n: usize) -> Result<Self> {
        let side = self.side();
        check_bound(m, side)?;
        check_bound(n, side)?;
        for (c, v) in self.coeffs.iter_mut().enumerate() {
            if c / side >= m || c % side >= n {
                *v = Complex64::new(0.0, 0.0);
            }
        }
        Ok(self)
    }

    pub fn inverse_transform(&self) -> CylinderGrid2D {
        let mut values = self.coeffs.clone();
        rows(&self.group, self.depth, &mut values, Direction::Inverse);
        columns(&self.group, self.depth, &mut values, Direction::Inverse);
        CylinderGrid2D {
            group: Arc::clone(&self.group),
            depth: self.depth,
            values,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_grid_2d;

    fn group() -> Arc<VilenkinGroup> {
        VilenkinGroup::parse("2,3,2,3").unwrap()
    }

    fn close(a: &CylinderGrid2D, b: &CylinderGrid2D, tol: f64) -> bool {
        a.distance(b).unwrap() < tol
    }

    #[test]
    fn full_band_reproduces() {
        let f = random_grid_2d(group(), 4, 1);
        assert!(close(&f.rect_partial_sum(36, 36).unwrap(), &f, 1e-12));
        assert!(close(&f.marginal_sum_1(36).unwrap(), &f, 1e-12));
        assert!(close(&f.marginal_sum_2(36).unwrap(), &f, 1e-12));
    }

    #[test]
    fn character_modes_are_kept_or_dropped() {
        let g = group();
        for (a, b) in [(0, 0), (5, 7), (12, 3), (35, 35)] {
            let f = CylinderGrid2D::character(g.clone(), 4, a, b).unwrap();
            for (m, n) in [(1, 1), (6, 8), (13, 4), (36, 36), (6, 36)] {
                let s = f.rect_partial_sum(m, n).unwrap();
                if a < m && b < n {
                    assert!(close(&s, &f, 1e-12));
                } else {
                    assert!(s.sup_norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn spectrum_of_tensor_character() {
        let f = CylinderGrid2D::character(group(), 4, 4, 9).unwrap();
        let s = f.forward_transform();
        for i in 0..36 {
            for j in 0..36 {
                let e = if (i, j) == (4, 9) { 1.0 } else { 0.0 };
                assert!((s.get(i, j) - Complex64::new(e, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn marginal_composition_equals_rectangle() {
        let g = group();
        let f = random_grid_2d(g.clone(), 4, 2);
        for m in [0, 1, 5, 6, 20, 36] {
            for n in [0, 2, 7, 12, 36] {
                let composed = f.marginal_sum_2(n).unwrap().marginal_sum_1(m).unwrap();
                assert!(close(&composed, &f.rect_partial_sum(m, n).unwrap(), 1e-10));
            }
        }
    }

    #[test]
    fn marginal_of_x_independent_function() {
        let g = group();
        let f1 = crate::random::random_grid_1d(g.clone(), 4, 3);
        let f = CylinderGrid2D::from_fn(g.clone(), 4, |_, y| f1.values()[y]).unwrap();
        for n in [1, 2, 17, 36] {
            assert!(close(&f.marginal_sum_1(n).unwrap(), &f, 1e-12));
        }
        assert!(f.marginal_sum_1(0).unwrap().sup_norm() == 0.0);
    }

    #[test]
    fn parseval_2d() {
        let f = random_grid_2d(group(), 4, 4);
        let s = f.forward_transform();
        let energy: f64 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / 1296.0;
        let spectrum: f64 = s.coeffs().iter().map(|v| v.norm_sqr()).sum();
        assert!((energy - spectrum).abs() < 1e-10);
    }

    #[test]
    fn out_of_range_indices() {
        let f = random_grid_2d(group(), 2, 5);
        assert!(f.rect_partial_sum(7, 1).is_err());
        assert!(f.marginal_sum_1(7).is_err());
        assert!(f.marginal_sum_2(7).is_err());
    }
}
