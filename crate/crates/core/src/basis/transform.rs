//! Fast character transform for cylinder-constant functions.
//!
//! A function on the `M_d` depth-`d` cylinders is a tensor with one axis per
//! digit, and `psi_k(x)` factors into one root of unity per axis. The
//! transform therefore runs as a small DFT of length `m_j` along every digit
//! axis, `O(M_d * sum m_j)` in total. Axes are processed from the highest
//! digit (outermost, largest stride) down to digit 0.

use num_complex::Complex64;

use crate::group::VilenkinGroup;

/// `hat f(k) = M_d^{-1} sum_x f(x) conj(psi_k(x))`, in place.
pub fn forward_in_place(group: &VilenkinGroup, depth: usize, data: &mut [Complex64]) {
    digit_axes(group, depth, data, false);
    let scale = 1.0 / group.scale(depth) as f64;
    data.iter_mut().for_each(|v| *v *= scale);
}

/// `f(x) = sum_k hat f(k) psi_k(x)`, in place.
pub fn inverse_in_place(group: &VilenkinGroup, depth: usize, data: &mut [Complex64]) {
    digit_axes(group, depth, data, true);
}

fn digit_axes(group: &VilenkinGroup, depth: usize, data: &mut [Complex64], inverse: bool) {
    debug_assert_eq!(data.len(), group.scale(depth));
    let mut gathered = Vec::new();
    for k in (0..depth).rev() {
        let m = group.modulus(k);
        let stride = group.scale(k);
        let block = stride * m;
        if m == 2 {
            for base in (0..data.len()).step_by(block) {
                for o in base..base + stride {
                    let a = data[o];
                    let b = data[o + stride];
                    data[o] = a + b;
                    data[o + stride] = a - b;
                }
            }
            continue;
        }
        let roots = group.roots().table(k);
        gathered.resize(m, Complex64::new(0.0, 0.0));
        for base in (0..data.len()).step_by(block) {
            for o in base..base + stride {
                for (q, slot) in gathered.iter_mut().enumerate() {
                    *slot = data[o + q * stride];
                }
                for p in 0..m {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (q, v) in gathered.iter().enumerate() {
                        let e = (p * q) % m;
                        let w = if inverse { roots[e] } else { roots[(m - e) % m] };
                        acc += v * w;
                    }
                    data[o + p * stride] = acc;
                }
            }
        }
    }
}
