//! The Vilenkin character system.
//!
//! `r_k(x) = exp(2 pi i x_k / m_k)` and `psi_n(x) = prod_k r_k(x)^{n_k}`.
//! With all moduli equal to 2 this is the Walsh-Paley system.

mod grid;
mod kernel;
pub mod reference;
mod transform;

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{GroupPoint, ModulusSequence, VilenkinGroup};

pub use grid::{CylinderGrid1D, Spectrum1D};
pub use kernel::{dirichlet_block, dirichlet_closed, dirichlet_direct};
pub use transform::{forward_in_place, inverse_in_place};

pub(crate) use kernel::closed_kernel_flat;

/// Roots of unity `exp(2 pi i q / m_k)`, one exact table per distinct modulus.
#[derive(Debug, Clone)]
pub struct RootTable {
    per_position: Vec<Arc<[Complex64]>>,
}

impl RootTable {
    pub fn new(moduli: &ModulusSequence) -> Self {
        let mut cache: HashMap<u32, Arc<[Complex64]>> = HashMap::new();
        let per_position = moduli
            .as_slice()
            .iter()
            .map(|&m| {
                cache
                    .entry(m)
                    .or_insert_with(|| roots_of_unity(m as usize).into())
                    .clone()
            })
            .collect();
        Self { per_position }
    }

    /// The `m_k` roots for digit position `k`.
    pub fn table(&self, k: usize) -> &[Complex64] {
        &self.per_position[k]
    }

    /// `exp(2 pi i q / m_k)` with `q` reduced modulo `m_k`.
    pub fn root(&self, k: usize, q: usize) -> Complex64 {
        let t = &self.per_position[k];
        t[q % t.len()]
    }
}

/// `exp(2 pi i q / m)` for `q < m`, with the quarter turns written exactly.
pub(crate) fn roots_of_unity(m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|q| {
            if (4 * q) % m == 0 {
                match 4 * q / m {
                    0 => Complex64::new(1.0, 0.0),
                    1 => Complex64::new(0.0, 1.0),
                    2 => Complex64::new(-1.0, 0.0),
                    _ => Complex64::new(0.0, -1.0),
                }
            } else {
                Complex64::from_polar(1.0, TAU * q as f64 / m as f64)
            }
        })
        .collect()
}

/// The generalized Rademacher function `r_k(x)`.
pub fn rademacher(group: &VilenkinGroup, k: usize, x: &GroupPoint) -> Result<Complex64> {
    if k >= group.depth() {
        return Err(Error::DepthOutOfRange {
            depth: k,
            max: group.depth().saturating_sub(1),
        });
    }
    check_point(group, x)?;
    Ok(group.roots().root(k, x.digits()[k] as usize))
}

/// The Vilenkin function `psi_n(x)`, `n < M_K`.
pub fn vilenkin(group: &VilenkinGroup, n: u64, x: &GroupPoint) -> Result<Complex64> {
    check_point(group, x)?;
    let digits = group.decompose_index(n)?;
    Ok(character_from_digits(group, digits.digits(), x.digits()))
}

pub(crate) fn check_point(group: &VilenkinGroup, x: &GroupPoint) -> Result<()> {
    if **x.moduli() != **group.moduli() {
        return Err(Error::ModulusMismatch);
    }
    Ok(())
}

/// `prod_k r_k(x)^{n_k}` over the shorter of the two digit slices.
pub(crate) fn character_from_digits(group: &VilenkinGroup, n: &[u32], x: &[u32]) -> Complex64 {
    let roots = group.roots();
    n.iter()
        .zip(x)
        .enumerate()
        .filter(|(_, (&nk, &xk))| nk != 0 && xk != 0)
        .fold(Complex64::new(1.0, 0.0), |acc, (k, (&nk, &xk))| {
            acc * roots.root(k, nk as usize * xk as usize)
        })
}

/// Dense table of `psi_k(x)` for `k < rows` and the `M_d` cells of depth `d`,
/// stored row-major (`k * M_d + x`).
#[derive(Debug, Clone)]
pub struct CharacterTable {
    cells: usize,
    rows: usize,
    values: Vec<Complex64>,
}

impl CharacterTable {
    pub fn new(group: &VilenkinGroup, depth: usize, rows: usize) -> Result<Self> {
        group.number_system().check_depth(depth)?;
        let cells = group.scale(depth);
        if rows > cells {
            return Err(Error::IndexOutOfRange {
                index: rows as u64,
                bound: cells as u64,
            });
        }
        let mut values = vec![Complex64::new(0.0, 0.0); rows * cells];
        let mut kd = vec![0u32; depth];
        let mut xd = vec![0u32; depth];
        for k in 0..rows {
            group.digits_into(k, depth, &mut kd);
            for x in 0..cells {
                group.digits_into(x, depth, &mut xd);
                values[k * cells + x] = character_from_digits(group, &kd, &xd);
            }
        }
        Ok(Self {
            cells,
            rows,
            values,
        })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn get(&self, k: usize, x: usize) -> Complex64 {
        self.values[k * self.cells + x]
    }

    /// `psi_k` sampled on every cell.
    pub fn row(&self, k: usize) -> &[Complex64] {
        &self.values[k * self.cells..(k + 1) * self.cells]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn rademacher_examples() {
        let g = VilenkinGroup::parse("2,4").unwrap();
        let x = GroupPoint::new(g.moduli().clone(), vec![1, 1]).unwrap();
        assert_eq!(rademacher(&g, 0, &x).unwrap(), Complex64::new(-1.0, 0.0));
        assert_eq!(rademacher(&g, 1, &x).unwrap(), I);
        assert_eq!(rademacher(&g, 0, &g.zero()).unwrap(), Complex64::new(1.0, 0.0));
        assert!(rademacher(&g, 2, &x).is_err());
    }

    #[test]
    fn walsh_paley_case() {
        let g = VilenkinGroup::parse("2^4").unwrap();
        for idx in 0..g.order() {
            let x = g.point(idx).unwrap();
            assert_eq!(vilenkin(&g, 0, &x).unwrap(), Complex64::new(1.0, 0.0));
            let d = x.digits();
            let expected = if (d[0] + d[1]) % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(vilenkin(&g, 3, &x).unwrap(), Complex64::new(expected, 0.0));
        }
    }

    #[test]
    fn character_identities_on_random_samples() {
        let g = VilenkinGroup::parse("2,3,5,4,3,2").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let n = rng.gen_range(0..g.order());
            let x = g.point(rng.gen_range(0..g.order())).unwrap();
            let y = g.point(rng.gen_range(0..g.order())).unwrap();
            let lhs = vilenkin(&g, n, &x.add(&y).unwrap()).unwrap();
            let rhs = vilenkin(&g, n, &x).unwrap() * vilenkin(&g, n, &y).unwrap();
            assert!(close(lhs, rhs, 1e-12));
            let neg = vilenkin(&g, n, &x.neg()).unwrap();
            assert!(close(neg, vilenkin(&g, n, &x).unwrap().conj(), 1e-12));
            assert!((vilenkin(&g, n, &x).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn vilenkin_rejects_foreign_point() {
        let g = VilenkinGroup::parse("2,3").unwrap();
        let h = VilenkinGroup::parse("3,2").unwrap();
        assert_eq!(vilenkin(&g, 1, &h.zero()), Err(Error::ModulusMismatch));
    }

    #[test]
    fn orthonormality_exhaustive() {
        for spectrum in ["2,3,2,3", "2^8", "5,3,4"] {
            let g = VilenkinGroup::parse(spectrum).unwrap();
            let d = g.depth();
            let t = CharacterTable::new(&g, d, g.scale(d)).unwrap();
            let m = t.cells();
            for i in 0..m {
                for j in 0..m {
                    let ip: Complex64 = t
                        .row(i)
                        .iter()
                        .zip(t.row(j))
                        .map(|(a, b)| a * b.conj())
                        .sum::<Complex64>()
                        / m as f64;
                    let delta = if i == j { 1.0 } else { 0.0 };
                    assert!(close(ip, Complex64::new(delta, 0.0), 1e-10), "{spectrum} {i} {j}");
                }
            }
        }
    }

    #[test]
    fn root_table_quarter_turns_are_exact() {
        let r = roots_of_unity(4);
        assert_eq!(r[1], I);
        assert_eq!(r[2], Complex64::new(-1.0, 0.0));
        assert_eq!(r[3], -I);
    }
}
