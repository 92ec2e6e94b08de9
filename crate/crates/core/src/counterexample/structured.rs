//! Closed-form evaluation of the construction at arbitrary depth.
//!
//! On the support cylinder of block `j` whose first nonzero digit sits at
//! `p = 2s` (with `x_p = m_p - 1`), the closed kernel form collapses to
//! `D_{N_{A_j}}(x) = psi_{N_{A_j}}(x) M_p c_s` with
//! `c_s = sum_{i<p} n_i M_i / M_p + sum_{t=1}^{n_p} w_p^t`, `w_p = e^{2 pi i / m_p}`.
//! All magnitudes are kept relative to `M_p` or in the log domain, so nothing
//! overflows however deep the blocks go.

use std::sync::OnceLock;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::params::{ln_big, CounterexampleParams};
use crate::basis::roots_of_unity;

/// Kernel values with modulus below this count as zero when taking phases.
pub const PHASE_ZERO: f64 = 1e-9;

/// Moduli up to this size use cached root tables.
const CACHED_MODULI: usize = 64;

fn root(m: u32, q: u64) -> Complex64 {
    static TABLES: OnceLock<Vec<Vec<Complex64>>> = OnceLock::new();
    let tables =
        TABLES.get_or_init(|| (0..=CACHED_MODULI).map(|m| roots_of_unity(m.max(1))).collect());
    let q = (q % m as u64) as usize;
    match tables.get(m as usize) {
        Some(t) => t[q],
        None => roots_of_unity(m as usize)[q],
    }
}

/// `c_s` for every `s` in block `j`, indexed `s - A_{j-1}`.
pub fn kernel_factors(params: &CounterexampleParams, j: usize) -> Vec<Complex64> {
    let mut acc = 0.0;
    (params.a(j - 1)..params.a(j))
        .map(|s| {
            let p = 2 * s;
            let (m, n) = (params.modulus(p), params.n_digit(j, p));
            let tail: Complex64 = (1..=n as u64).map(|t| root(m, t)).sum();
            let c = tail + acc;
            acc = (acc + n as f64) / (m as f64 * params.modulus(p + 1) as f64);
            c
        })
        .collect()
}

/// `ln M_k` for `k = 0..=depth`.
fn ln_scales(params: &CounterexampleParams, depth: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(depth + 1);
    let mut acc = 0.0;
    out.push(acc);
    for k in 0..depth {
        acc += (params.modulus(k) as f64).ln();
        out.push(acc);
    }
    out
}

/// `D_n(x) / M_P` with `P = min(|n|, first nonzero digit of x)`, read off the
/// closed kernel form. Both digit slices run over the same positions.
pub fn scaled_dirichlet(moduli: impl Fn(usize) -> u32, n: &[u32], x: &[u32]) -> Complex64 {
    let Some(order) = n.iter().rposition(|&d| d != 0) else {
        return Complex64::new(0.0, 0.0);
    };
    let first = x.iter().position(|&d| d != 0).unwrap_or(x.len());
    let top = order.min(first);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..=top {
        let m = moduli(j);
        if j > 0 {
            acc /= moduli(j - 1) as f64;
        }
        let q0 = (m - n[j]) as u64;
        acc += (q0..m as u64)
            .map(|q| root(m, q * x[j] as u64))
            .sum::<Complex64>();
    }
    let chi = n
        .iter()
        .zip(x)
        .enumerate()
        .fold(Complex64::new(1.0, 0.0), |c, (k, (&nk, &xk))| {
            c * root(moduli(k), nk as u64 * xk as u64)
        });
    chi * acc
}

/// `f_j(x)` from the digits `x_0, ..., x_{2 A_j - 1}` (longer slices are
/// truncated).
pub fn block_value(params: &CounterexampleParams, j: usize, factors: &[Complex64], x: &[u32]) -> Complex64 {
    let zero = Complex64::new(0.0, 0.0);
    let depth = 2 * params.a(j);
    let x = &x[..depth.min(x.len())];
    let Some(p) = x.iter().position(|&d| d != 0) else {
        return zero;
    };
    let s = p / 2;
    if p % 2 == 1 || s < params.a(j - 1) || s >= params.a(j) || x[p] != params.modulus(p) - 1 {
        return zero;
    }
    let c = factors[s - params.a(j - 1)];
    let amp = 1.0 / (j + 1) as f64;
    if c.norm() < PHASE_ZERO {
        return Complex64::new(amp, 0.0);
    }
    let chi = x
        .iter()
        .enumerate()
        .fold(Complex64::new(1.0, 0.0), |acc, (k, &xk)| {
            acc * root(params.modulus(k), params.n_digit(j, k) as u64 * xk as u64)
        });
    chi * (c / c.norm()) * amp
}

/// The three parts of `|S_{N_{A_k}}(f; 0)|` for the truncated `f = f_1 + ... + f_J`.
#[derive(Debug, Clone, PartialEq)]
pub struct JDecomposition {
    pub k: usize,
    /// `|int f_k conj(D)|`.
    pub j1: f64,
    /// `sum_{j>k} |int f_j conj(D)|`.
    pub j2: f64,
    /// `sum_{j<k} |int f_j conj(D)|`.
    pub j3: f64,
    /// `S_{N_{A_k}}(f; 0)`.
    pub partial_sum: Complex64,
}

impl JDecomposition {
    pub fn abs_s(&self) -> f64 {
        self.partial_sum.norm()
    }

    /// `|S| >= J1 - J2 - J3` up to `tol`.
    pub fn chain_holds(&self, tol: f64) -> bool {
        self.abs_s() >= self.j1 - self.j2 - self.j3 - tol
    }
}

/// `int f_j conj(D_{N_{A_k}})` for `j > k`, where the kernel equals
/// `N_{A_k}` on the support of `f_j`.
fn tail_integral(params: &CounterexampleParams, j: usize, ln_n: f64, ln_m: &[f64]) -> Complex64 {
    let factors = kernel_factors(params, j);
    let amp = 1.0 / (j + 1) as f64;
    let last = params.a(j) - 1;
    let mut total = Complex64::new(0.0, 0.0);
    for (i, c) in factors.iter().enumerate() {
        let s = params.a(j - 1) + i;
        let p = 2 * s;
        let weight = (ln_n - ln_m[p + 1]).exp();
        if c.norm() < PHASE_ZERO {
            total += weight;
        } else if s == last {
            // free digits above p would average the character to zero
            let m = params.modulus(p);
            let chi = root(m, params.n_digit(j, p) as u64 * (m as u64 - 1));
            total += chi * (c / c.norm()) * weight;
        }
    }
    total * amp
}

pub fn j_decomposition(params: &CounterexampleParams, k: usize) -> JDecomposition {
    let ln_m = ln_scales(params, params.depth());
    let factors = kernel_factors(params, k);
    let j1 = factors
        .iter()
        .enumerate()
        .map(|(i, c)| c.norm() / params.modulus(2 * (params.a(k - 1) + i)) as f64)
        .sum::<f64>()
        / (k + 1) as f64;
    let ln_n = ln_big(params.n(k));
    let mut s = Complex64::new(j1, 0.0);
    let mut j2 = 0.0;
    for j in k + 1..=params.blocks() {
        let t = tail_integral(params, j, ln_n, &ln_m);
        j2 += t.norm();
        s += t;
    }
    JDecomposition {
        k,
        j1,
        j2,
        j3: 0.0,
        partial_sum: s,
    }
}

/// `ln` of the single-term lower bound `e^{psi(|S|)} / N_{A_k}^2`;
/// `+inf` once the gauge leaves the finite range.
pub fn divergence_diagnostic(params: &CounterexampleParams, k: usize) -> f64 {
    log_diagnostic(params, k, j_decomposition(params, k).abs_s())
}

pub(crate) fn log_diagnostic(params: &CounterexampleParams, k: usize, abs_s: f64) -> f64 {
    let e = params.gauge().eval(abs_s);
    if e.is_finite() {
        e - 2.0 * ln_big(params.n(k))
    } else {
        f64::INFINITY
    }
}

/// Smallest `|D_{N_{A_k}}| / M_{2s}` over the cylinders
/// `I_{2s+1}(0, ..., 0, m_{2s} - 1)` of block `k`.
pub fn kernel_floor(params: &CounterexampleParams, k: usize) -> f64 {
    kernel_factors(params, k)
        .iter()
        .map(|c| c.norm())
        .fold(f64::INFINITY, f64::min)
}

/// Block positions `s` examined by [`phase_alignment_error`].
pub const PHASE_POSITIONS: usize = 48;

/// Largest deviation of `f_k conj(D) / M_p` from `|D| / ((k+1) M_p)` over
/// `samples` random support points of each examined `s` in block `k`, with
/// the kernel taken from [`scaled_dirichlet`]. Blocks with more than
/// [`PHASE_POSITIONS`] positions are examined at evenly spaced ones, always
/// including both ends.
pub fn phase_alignment_error(params: &CounterexampleParams, k: usize, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let depth = 2 * params.a(k);
    let factors = kernel_factors(params, k);
    let n: Vec<u32> = (0..depth).map(|i| params.n_digit(k, i)).collect();
    let mut worst: f64 = 0.0;
    let mut x = vec![0u32; depth];
    let (lo, hi) = (params.a(k - 1), params.a(k));
    let span = hi - lo;
    let mut positions: Vec<usize> = if span <= PHASE_POSITIONS {
        (lo..hi).collect()
    } else {
        (0..PHASE_POSITIONS)
            .map(|i| lo + i * (span - 1) / (PHASE_POSITIONS - 1))
            .collect()
    };
    positions.dedup();
    for s in positions {
        let p = 2 * s;
        for _ in 0..samples {
            x.iter_mut().for_each(|d| *d = 0);
            x[p] = params.modulus(p) - 1;
            for (i, d) in x.iter_mut().enumerate().skip(p + 1) {
                *d = rng.gen_range(0..params.modulus(i));
            }
            let d = scaled_dirichlet(|i| params.modulus(i), &n, &x);
            let f = block_value(params, k, &factors, &x);
            let expect = d.norm() / (k + 1) as f64;
            worst = worst.max((f * d.conj() - expect).norm());
        }
    }
    worst
}

/// `c'` realised by the construction: `min_k |S_{N_{A_k}}(f;0)| k / A_k`.
pub fn measured_c_prime(params: &CounterexampleParams) -> f64 {
    (1..=params.blocks())
        .map(|k| j_decomposition(params, k).abs_s() * k as f64 / params.a(k) as f64)
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::dirichlet_direct;
    use crate::counterexample::choose_params;
    use crate::summability::Gauge;
    use crate::{ModulusSequence, VilenkinGroup};

    fn desk() -> CounterexampleParams {
        let m = ModulusSequence::parse("2,3").unwrap();
        choose_params(&Gauge::power(1.0, 1.5).unwrap(), 4.0, 2, &m, 64).unwrap()
    }

    #[test]
    fn scaled_kernel_matches_direct_sum() {
        let g = VilenkinGroup::parse("2,3,4,2,3").unwrap();
        let moduli = |k: usize| g.modulus(k) as u32;
        for n in [0u64, 1, 5, 17, 47, 48, 100, 143] {
            let nd = g.decompose_index(n).unwrap();
            for idx in 0..g.order() {
                let x = g.point(idx).unwrap();
                let first = x.digits().iter().position(|&d| d != 0).unwrap_or(5);
                let top = nd.order().map_or(0, |o| o.min(first));
                let got = scaled_dirichlet(moduli, nd.digits(), x.digits()) * g.scale(top) as f64;
                let want = dirichlet_direct(&g, n, &x).unwrap();
                assert!((got - want).norm() < 1e-9, "n={n} x={idx}");
            }
        }
    }

    #[test]
    fn dyadic_factors() {
        let m = ModulusSequence::parse("2").unwrap();
        let p = choose_params(&Gauge::power(1.0, 2.0).unwrap(), 1.0, 1, &m, 100).unwrap();
        let c = kernel_factors(&p, 1);
        // c_s = -1 + sum_{s' < s} 4^{s'-s} over the block
        assert!((c[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((c[1] - Complex64::new(-0.75, 0.0)).norm() < 1e-15);
        assert!(kernel_floor(&p, 1) > 0.66);
    }

    #[test]
    fn decomposition_shape() {
        let p = desk();
        for k in 1..=2 {
            let d = j_decomposition(&p, k);
            assert_eq!(d.j3, 0.0);
            assert!(d.j1 > 0.0);
            assert!(d.chain_holds(1e-12));
        }
        assert_eq!(j_decomposition(&p, 2).j2, 0.0);
        assert!(phase_alignment_error(&p, 1, 50, 1) < 1e-12);
        assert!(phase_alignment_error(&p, 2, 50, 2) < 1e-12);
    }

    #[test]
    fn block_value_support() {
        let p = desk();
        let f = kernel_factors(&p, 2);
        // A_1 = 2, A_2 = 5: block 2 starts at digit 4
        let mut x = vec![0u32; 10];
        assert_eq!(block_value(&p, 2, &f, &x), Complex64::new(0.0, 0.0));
        x[4] = 1;
        assert!((block_value(&p, 2, &f, &x).norm() - 1.0 / 3.0).abs() < 1e-15);
        x[4] = 0;
        x[2] = 1;
        assert_eq!(block_value(&p, 2, &f, &x), Complex64::new(0.0, 0.0));
        x[2] = 0;
        x[5] = 1;
        assert_eq!(block_value(&p, 2, &f, &x), Complex64::new(0.0, 0.0));
    }
}
