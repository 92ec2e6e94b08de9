use num_complex::Complex64;

use super::{character_from_digits, check_point};
use crate::error::{Error, Result};
use crate::group::{GroupPoint, VilenkinGroup};

fn check_kernel_index(group: &VilenkinGroup, n: u64) -> Result<()> {
    if n > group.order() {
        return Err(Error::IndexOutOfRange {
            index: n,
            bound: group.order() + 1,
        });
    }
    Ok(())
}

/// `D_n(x) = sum_{k<n} psi_k(x)` summed term by term.
pub fn dirichlet_direct(group: &VilenkinGroup, n: u64, x: &GroupPoint) -> Result<Complex64> {
    check_kernel_index(group, n)?;
    check_point(group, x)?;
    let mut digits = vec![0u32; group.depth()];
    let mut sum = Complex64::new(0.0, 0.0);
    for _ in 0..n {
        sum += character_from_digits(group, &digits, x.digits());
        // odometer increment of the mixed-radix index
        for (k, d) in digits.iter_mut().enumerate() {
            *d += 1;
            if (*d as usize) < group.modulus(k) {
                break;
            }
            *d = 0;
        }
    }
    Ok(sum)
}

/// `D_{M_j}(x)`: `M_j` on `I_j`, zero elsewhere.
pub fn dirichlet_block(group: &VilenkinGroup, j: usize, x: &GroupPoint) -> Result<Complex64> {
    group.number_system().check_depth(j)?;
    check_point(group, x)?;
    Ok(block_value(group, j, x.digits()))
}

fn block_value(group: &VilenkinGroup, j: usize, x: &[u32]) -> Complex64 {
    if x[..j].iter().all(|&d| d == 0) {
        Complex64::new(group.scale(j) as f64, 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// `D_n(x)` through the closed form
/// `psi_n(x) sum_j D_{M_j}(x) sum_{q = m_j - n_j}^{m_j - 1} r_j(x)^q`.
///
/// Terms with `j > |n|` have an empty inner sum. For `n = M_K` the top digit
/// lies outside the truncation; its character factor `r_K^{1} r_K^{m_K - 1}`
/// is identically one, leaving `D_{M_K}(x)`.
pub fn dirichlet_closed(group: &VilenkinGroup, n: u64, x: &GroupPoint) -> Result<Complex64> {
    check_kernel_index(group, n)?;
    check_point(group, x)?;
    if n == group.order() {
        return Ok(block_value(group, group.depth(), x.digits()));
    }
    let digits = group.decompose_index(n)?;
    Ok(closed_kernel_flat(group, digits.digits(), x.digits()))
}

/// Closed-form kernel from index digits and point digits (`n < M_K`).
pub(crate) fn closed_kernel_flat(group: &VilenkinGroup, n: &[u32], x: &[u32]) -> Complex64 {
    let Some(order) = n.iter().rposition(|&d| d != 0) else {
        return Complex64::new(0.0, 0.0);
    };
    let roots = group.roots();
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..=order {
        if j > 0 && x[j - 1] != 0 {
            // x left I_j, so D_{M_i}(x) = 0 for every i >= j
            break;
        }
        let nj = n[j] as usize;
        if nj == 0 {
            continue;
        }
        let m = group.modulus(j);
        let xj = x[j] as usize;
        let inner: Complex64 = (m - nj..m).map(|q| roots.root(j, q * xj)).sum();
        sum += inner * group.scale(j) as f64;
    }
    if sum == Complex64::new(0.0, 0.0) {
        return sum;
    }
    character_from_digits(group, n, x) * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_kernels() {
        let g = VilenkinGroup::parse("2^4").unwrap();
        for idx in 0..g.order() {
            let x = g.point(idx).unwrap();
            assert_eq!(dirichlet_direct(&g, 1, &x).unwrap(), Complex64::new(1.0, 0.0));
            let d2 = dirichlet_direct(&g, 2, &x).unwrap();
            let expected = if x.digits()[0] == 0 { 2.0 } else { 0.0 };
            assert_eq!(d2, Complex64::new(expected, 0.0));
            assert_eq!(dirichlet_closed(&g, 0, &x).unwrap(), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn closed_form_matches_direct_sum_exhaustively() {
        for spectrum in ["2,3,2,3", "3,4,2", "5,2,3"] {
            let g = VilenkinGroup::parse(spectrum).unwrap();
            for idx in 0..g.order() {
                let x = g.point(idx).unwrap();
                for n in 0..=g.order() {
                    let direct = dirichlet_direct(&g, n, &x).unwrap();
                    let closed = dirichlet_closed(&g, n, &x).unwrap();
                    assert!((direct - closed).norm() < 1e-10, "{spectrum} n={n} x={idx}");
                }
            }
        }
    }

    #[test]
    fn ladder_kernels_are_scaled_indicators() {
        let g = VilenkinGroup::parse("2,3,2,3").unwrap();
        for idx in 0..g.order() {
            let x = g.point(idx).unwrap();
            for j in 0..=g.depth() {
                let direct = dirichlet_direct(&g, g.scale(j) as u64, &x).unwrap();
                let block = dirichlet_block(&g, j, &x).unwrap();
                assert!((direct - block).norm() < 1e-10);
                let closed = dirichlet_closed(&g, g.scale(j) as u64, &x).unwrap();
                assert!((closed - block).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn kernel_index_is_bounded() {
        let g = VilenkinGroup::parse("2,3").unwrap();
        assert!(dirichlet_direct(&g, 7, &g.zero()).is_err());
        assert!(dirichlet_closed(&g, 7, &g.zero()).is_err());
        assert!(dirichlet_block(&g, 3, &g.zero()).is_err());
    }
}
