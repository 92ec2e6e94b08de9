//! Seeded random test functions.
//!
//! Entries have real and imaginary parts uniform in `[-1, 1]` and the grid
//! is rescaled to unit sup norm.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::CylinderGrid1D;
use crate::group::VilenkinGroup;
use crate::summability::CylinderGrid2D;

fn unit_sup_values(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    let mut values: Vec<Complex64> = (0..len)
        .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
        .collect();
    let sup = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if sup > 0.0 {
        values.iter_mut().for_each(|v| *v /= sup);
    }
    values
}

/// Random unit-norm grid at `depth`. Panics if `depth` exceeds the group depth.
pub fn random_grid_1d(group: Arc<VilenkinGroup>, depth: usize, seed: u64) -> CylinderGrid1D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = unit_sup_values(&mut rng, group.scale(depth));
    CylinderGrid1D::new(group, depth, values).expect("depth within group")
}

/// Random unit-norm `M_d x M_d` grid.
pub fn random_grid_2d(group: Arc<VilenkinGroup>, depth: usize, seed: u64) -> CylinderGrid2D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = group.scale(depth);
    let values = unit_sup_values(&mut rng, side * side);
    CylinderGrid2D::new(group, depth, values).expect("depth within group")
}

/// Random function constant on depth `coarse` cylinders, written at `depth`.
pub fn smooth_grid_2d(
    group: Arc<VilenkinGroup>,
    coarse: usize,
    depth: usize,
    seed: u64,
) -> CylinderGrid2D {
    random_grid_2d(group, coarse, seed)
        .refine(depth)
        .expect("coarse depth below target depth")
}

pub fn smooth_grid_1d(
    group: Arc<VilenkinGroup>,
    coarse: usize,
    depth: usize,
    seed: u64,
) -> CylinderGrid1D {
    random_grid_1d(group, coarse, seed)
        .refine(depth)
        .expect("coarse depth below target depth")
}
