//! Cell-by-cell construction on a truncated group, for configurations small
//! enough to enumerate.

use std::sync::Arc;

use num_complex::Complex64;
use num_traits::ToPrimitive;

use super::params::CounterexampleParams;
use super::structured::{JDecomposition, PHASE_ZERO};
use crate::basis::{closed_kernel_flat, CylinderGrid1D};
use crate::error::{Error, Result};
use crate::group::VilenkinGroup;
use crate::summability::CylinderGrid2D;

fn check_group(params: &CounterexampleParams, group: &VilenkinGroup, depth: usize) -> Result<()> {
    if group.depth() < depth {
        return Err(Error::DepthOutOfRange {
            depth,
            max: group.depth(),
        });
    }
    if (0..group.depth()).any(|k| group.modulus(k) as u32 != params.modulus(k)) {
        return Err(Error::ModulusMismatch);
    }
    Ok(())
}

fn n_digits(params: &CounterexampleParams, j: usize, depth: usize) -> Vec<u32> {
    (0..depth).map(|k| params.n_digit(j, k)).collect()
}

/// `D_{N_{A_j}}` on every cell of depth `depth`.
pub fn kernel_grid(params: &CounterexampleParams, group: &Arc<VilenkinGroup>, j: usize, depth: usize) -> Result<CylinderGrid1D> {
    check_group(params, group, depth)?;
    let n = n_digits(params, j, group.depth());
    let mut x = vec![0u32; group.depth()];
    let values = (0..group.scale(depth))
        .map(|c| {
            group.digits_into(c, depth, &mut x[..depth]);
            closed_kernel_flat(group, &n, &x)
        })
        .collect();
    CylinderGrid1D::new(Arc::clone(group), depth, values)
}

/// `f_j` at depth `2 A_j`, phases taken from the closed kernel form.
pub fn build_block(params: &CounterexampleParams, group: &Arc<VilenkinGroup>, j: usize) -> Result<CylinderGrid1D> {
    let depth = 2 * params.a(j);
    let kernel = kernel_grid(params, group, j, depth)?;
    let amp = 1.0 / (j + 1) as f64;
    let mut x = vec![0u32; depth];
    let values = kernel
        .values()
        .iter()
        .enumerate()
        .map(|(c, d)| {
            group.digits_into(c, depth, &mut x);
            let Some(p) = x.iter().position(|&v| v != 0) else {
                return Complex64::new(0.0, 0.0);
            };
            let s = p / 2;
            let on_support = p % 2 == 0
                && s >= params.a(j - 1)
                && s < params.a(j)
                && x[p] as usize == group.modulus(p) - 1;
            match (on_support, d.norm() < PHASE_ZERO) {
                (false, _) => Complex64::new(0.0, 0.0),
                (true, true) => Complex64::new(amp, 0.0),
                (true, false) => d / d.norm() * amp,
            }
        })
        .collect();
    CylinderGrid1D::new(Arc::clone(group), depth, values)
}

/// Every block refined to the common depth `2 A_J`.
pub fn build_blocks(params: &CounterexampleParams, group: &Arc<VilenkinGroup>) -> Result<Vec<CylinderGrid1D>> {
    let depth = params.depth();
    check_group(params, group, depth)?;
    (1..=params.blocks())
        .map(|j| build_block(params, group, j)?.refine(depth))
        .collect()
}

/// `f = f_1 + ... + f_J`.
pub fn build_f(params: &CounterexampleParams, group: &Arc<VilenkinGroup>) -> Result<CylinderGrid1D> {
    let depth = params.depth();
    let mut values = vec![Complex64::new(0.0, 0.0); group.scale(depth)];
    for block in build_blocks(params, group)? {
        for (v, b) in values.iter_mut().zip(block.values()) {
            *v += b;
        }
    }
    CylinderGrid1D::new(Arc::clone(group), depth, values)
}

/// `F(x, y) = f(x) f(y)`.
#[allow(non_snake_case)]
pub fn build_F(params: &CounterexampleParams, group: &Arc<VilenkinGroup>) -> Result<CylinderGrid2D> {
    let f = build_f(params, group)?;
    CylinderGrid2D::tensor(&f, &f)
}

/// `int g conj(D)` as a cell average.
fn pairing(g: &CylinderGrid1D, d: &CylinderGrid1D) -> Complex64 {
    let sum: Complex64 = g.values().iter().zip(d.values()).map(|(a, b)| a * b.conj()).sum();
    sum / g.len() as f64
}

/// The decomposition evaluated by enumeration over all cells.
pub fn dense_j_decomposition(params: &CounterexampleParams, group: &Arc<VilenkinGroup>, k: usize) -> Result<JDecomposition> {
    let depth = params.depth();
    let kernel = kernel_grid(params, group, k, depth)?;
    let blocks = build_blocks(params, group)?;
    let parts: Vec<Complex64> = blocks.iter().map(|b| pairing(b, &kernel)).collect();
    let (mut j2, mut j3) = (0.0, 0.0);
    for (i, part) in parts.iter().enumerate() {
        let j = i + 1;
        if j < k {
            j3 += part.norm();
        } else if j > k {
            j2 += part.norm();
        }
    }
    Ok(JDecomposition {
        k,
        j1: parts[k - 1].norm(),
        j2,
        j3,
        partial_sum: parts.iter().sum(),
    })
}

/// `S_n f(0) = sum_{i<n} hat f(i)`, from the spectrum.
pub fn partial_sum_at_zero(f: &CylinderGrid1D, n: usize) -> Complex64 {
    f.forward_transform().coeffs()[..n].iter().sum()
}

/// `S_{n,n} F(0, 0)`, from the two-dimensional spectrum.
#[allow(non_snake_case)]
pub fn rect_partial_sum_at_origin(F: &CylinderGrid2D, n: usize) -> Complex64 {
    let spectrum = F.forward_transform();
    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| spectrum.get(i, j)).sum()
}

/// `N_{A_k}` as a grid index, when it fits.
pub fn n_index(params: &CounterexampleParams, k: usize) -> Result<usize> {
    params
        .n(k)
        .to_usize()
        .ok_or_else(|| Error::BudgetExceeded {
            what: format!("N_A_{k} as an index"),
            required: u128::MAX,
            budget: usize::MAX as u128,
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexample::{choose_params, j_decomposition};
    use crate::summability::Gauge;
    use crate::ModulusSequence;

    fn setup(blocks: usize) -> (CounterexampleParams, Arc<VilenkinGroup>) {
        let m = ModulusSequence::parse("2,3").unwrap();
        let p = choose_params(&Gauge::power(1.0, 1.5).unwrap(), 4.0, blocks, &m, 64).unwrap();
        let g = VilenkinGroup::new(p.moduli(p.depth()).unwrap()).unwrap();
        (p, g)
    }

    #[test]
    fn blocks_are_disjoint_and_bounded() {
        let (p, g) = setup(2);
        let blocks = build_blocks(&p, &g).unwrap();
        for (i, b) in blocks.iter().enumerate() {
            assert!(b.sup_norm() <= 1.0 / (i + 2) as f64 + 1e-15);
        }
        for c in 0..blocks[0].len() {
            let live = blocks.iter().filter(|b| b.values()[c].norm() > 0.0).count();
            assert!(live <= 1);
        }
        let f = build_f(&p, &g).unwrap();
        assert_eq!(f.values()[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn dense_matches_structured() {
        let (p, g) = setup(2);
        for k in 1..=2 {
            let dense = dense_j_decomposition(&p, &g, k).unwrap();
            let fast = j_decomposition(&p, k);
            assert!((dense.j1 - fast.j1).abs() < 1e-10);
            assert!((dense.j2 - fast.j2).abs() < 1e-10);
            assert!(dense.j3 < 1e-12);
            assert!((dense.partial_sum - fast.partial_sum).norm() < 1e-10);
            let f = build_f(&p, &g).unwrap();
            let s = partial_sum_at_zero(&f, n_index(&p, k).unwrap());
            assert!((s - fast.partial_sum).norm() < 1e-10);
        }
    }

    #[test]
    fn tensor_identity() {
        let (p, g) = setup(1);
        #[allow(non_snake_case)]
        let F = build_F(&p, &g).unwrap();
        let f = build_f(&p, &g).unwrap();
        let n = n_index(&p, 1).unwrap();
        let s = partial_sum_at_zero(&f, n);
        assert!((rect_partial_sum_at_origin(&F, n) - s * s).norm() < 1e-12);
        let side = F.side();
        assert!((0..side).all(|x| F.get(x, 0).norm() == 0.0));
    }

    #[test]
    fn mismatched_group() {
        let (p, _) = setup(1);
        let g = VilenkinGroup::parse("3,2,3,2").unwrap();
        assert!(build_block(&p, &g, 1).is_err());
    }
}
