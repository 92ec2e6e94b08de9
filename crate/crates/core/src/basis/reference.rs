//! Direct `O(M_d^2)` reference routes, kept deliberately naive.
//!
//! These evaluate every character through [`vilenkin`] on explicit group
//! points and serve as oracles for the fast paths.

use num_complex::Complex64;

use super::{dirichlet_direct, vilenkin, CylinderGrid1D};
use crate::error::Result;
use crate::group::VilenkinGroup;

/// Characters `psi_k(x)` for `k, x < M_d`, evaluated at the first point of
/// each depth-`d` cylinder.
fn naive_characters(group: &VilenkinGroup, depth: usize) -> Result<Vec<Vec<Complex64>>> {
    let cells = group.scale(depth);
    (0..cells)
        .map(|k| {
            (0..cells)
                .map(|x| vilenkin(group, k as u64, &group.point(x as u64)?))
                .collect()
        })
        .collect()
}

/// `hat f(k) = M_d^{-1} sum_x f(x) conj(psi_k(x))` as a double loop.
pub fn naive_forward(f: &CylinderGrid1D) -> Result<Vec<Complex64>> {
    let chars = naive_characters(f.group(), f.depth())?;
    let scale = 1.0 / f.len() as f64;
    Ok(chars
        .iter()
        .map(|row| {
            row.iter()
                .zip(f.values())
                .map(|(c, v)| v * c.conj())
                .sum::<Complex64>()
                * scale
        })
        .collect())
}

/// `f(x) = sum_k c_k psi_k(x)` as a double loop.
pub fn naive_inverse(group: &VilenkinGroup, depth: usize, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let chars = naive_characters(group, depth)?;
    let cells = group.scale(depth);
    Ok((0..cells)
        .map(|x| {
            coeffs
                .iter()
                .zip(&chars)
                .map(|(c, row)| c * row[x])
                .sum()
        })
        .collect())
}

/// `S_n f(x) = int f(t) D_n(x - t) dmu(t)` with the kernel summed directly.
pub fn dirichlet_convolution(f: &CylinderGrid1D, n: u64) -> Result<Vec<Complex64>> {
    let group = f.group();
    let cells = f.len();
    let points = (0..cells as u64)
        .map(|i| group.point(i))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(cells);
    for x in &points {
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, v) in points.iter().zip(f.values()) {
            acc += v * dirichlet_direct(group, n, &x.sub(t)?)?;
        }
        out.push(acc / cells as f64);
    }
    Ok(out)
}
