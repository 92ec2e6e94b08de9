use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::ModulusSequence;
use crate::summability::{gauge_dominates, Gauge};

/// Largest number of candidates tried for a single `B_j`.
pub const SCAN_LIMIT: u64 = 50_000_000;

/// Gauge values are probed up to this point for superlinear growth.
const SUPERLINEAR_PROBE: f64 = 1e9;

/// Block parameters of the divergence construction.
///
/// Moduli repeat `pattern` cyclically, so `m_k = pattern[k mod len]`.
#[derive(Debug, Clone)]
pub struct CounterexampleParams {
    pattern: ModulusSequence,
    gauge: Gauge,
    c_prime: f64,
    /// `B_0 = 0, B_1, ..., B_J`.
    b: Vec<u64>,
    /// `A_0 = 1, A_1, ..., A_J`.
    a: Vec<usize>,
    /// `N_{A_1}, ..., N_{A_J}` at index `j - 1`.
    n: Vec<BigUint>,
}

/// `ln` of an arbitrarily large integer; `-inf` for zero.
pub fn ln_big(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("finite below 2^1000").ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().expect("64-bit head");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Scientific notation for huge integers, exact digits otherwise.
pub fn format_big(n: &BigUint) -> String {
    let text = n.to_str_radix(10);
    if text.len() <= 30 {
        return text;
    }
    format!("{}.{}e{}", &text[..1], &text[1..13], text.len() - 1)
}

/// Smallest `B_j` with `B_j > 2 B_{j-1}`, `psi(B_j)/B_j > 5 j ln a / c'` and
/// `A_j > A_{j-1}`, for `j = 1..=blocks`. Fails when `2 A_J` passes
/// `depth_budget`.
pub fn choose_params(
    gauge: &Gauge,
    c_prime: f64,
    blocks: usize,
    pattern: &ModulusSequence,
    depth_budget: usize,
) -> Result<CounterexampleParams> {
    if !(c_prime > 0.0 && c_prime.is_finite()) {
        return Err(Error::Domain(format!("c' must be positive, got {c_prime}")));
    }
    let mut params = CounterexampleParams {
        pattern: pattern.clone(),
        gauge: gauge.clone(),
        c_prime,
        b: vec![0],
        a: vec![1],
        n: Vec::new(),
    };
    if blocks == 0 {
        return Ok(params);
    }
    let linear = Gauge::power(1.0, 1.0)?;
    let report = gauge_dominates(gauge, &linear, SUPERLINEAR_PROBE)?;
    if report.dominated {
        return Err(Error::Precondition(format!(
            "gauge {} does not outgrow u on the probe lattice",
            gauge.descriptor()
        )));
    }
    let ln_a = (pattern.bound() as f64).ln();
    for j in 1..=blocks {
        let threshold = 5.0 * j as f64 * ln_a / c_prime;
        let prev_a = params.a[j - 1];
        let start = 2 * params.b[j - 1] + 1;
        let mut found = None;
        for b in start..start.saturating_add(SCAN_LIMIT) {
            let bf = b as f64;
            let a = (j as f64 * bf / c_prime).floor() + 1.0;
            if gauge.eval(bf) / bf > threshold && a > prev_a as f64 {
                found = Some((b, a));
                break;
            }
        }
        let (b, a) = found.ok_or_else(|| {
            Error::Precondition(format!(
                "no B_{j} within {SCAN_LIMIT} candidates above {start}"
            ))
        })?;
        if !(a < 1e15) || 2.0 * a > depth_budget as f64 {
            return Err(Error::BudgetExceeded {
                what: format!("depth 2 A_{j} of block {j}"),
                required: (2.0 * a).min(u128::MAX as f64) as u128,
                budget: depth_budget as u128,
            });
        }
        params.b.push(b);
        params.a.push(a as usize);
    }
    params.n = (1..=blocks).map(|j| params.compute_n(j)).collect();
    Ok(params)
}

impl CounterexampleParams {
    /// Parameters from explicit sequences; used for hand-made configurations.
    pub fn from_parts(
        pattern: ModulusSequence,
        gauge: Gauge,
        c_prime: f64,
        b: Vec<u64>,
        a: Vec<usize>,
    ) -> Result<Self> {
        if b.len() != a.len() || b.first() != Some(&0) || a.first() != Some(&1) {
            return Err(Error::Domain(
                "sequences need B_0 = 0, A_0 = 1 and equal lengths".into(),
            ));
        }
        if a.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("A_j must be strictly increasing".into()));
        }
        let mut params = Self {
            pattern,
            gauge,
            c_prime,
            b,
            a,
            n: Vec::new(),
        };
        params.n = (1..params.a.len()).map(|j| params.compute_n(j)).collect();
        Ok(params)
    }

    fn compute_n(&self, j: usize) -> BigUint {
        let mut scale = BigUint::from(1u32);
        let mut n = BigUint::zero();
        for k in 0..2 * (self.a[j] - 1) + 1 {
            if k % 2 == 0 && k / 2 >= self.a[j - 1] {
                n += &scale * (self.modulus(k) / 2);
            }
            scale *= self.modulus(k);
        }
        n
    }

    pub fn blocks(&self) -> usize {
        self.a.len() - 1
    }

    pub fn gauge(&self) -> &Gauge {
        &self.gauge
    }

    pub fn c_prime(&self) -> f64 {
        self.c_prime
    }

    pub fn pattern(&self) -> &ModulusSequence {
        &self.pattern
    }

    /// `m_k`.
    pub fn modulus(&self, k: usize) -> u32 {
        self.pattern.modulus(k % self.pattern.depth())
    }

    /// `a = sup m_k`.
    pub fn bound(&self) -> u32 {
        self.pattern.bound()
    }

    pub fn b(&self, j: usize) -> u64 {
        self.b[j]
    }

    pub fn a(&self, j: usize) -> usize {
        self.a[j]
    }

    /// `N_{A_j}` for `j >= 1`.
    pub fn n(&self, j: usize) -> &BigUint {
        &self.n[j - 1]
    }

    /// Digit `n_k` of `N_{A_j}`.
    pub fn n_digit(&self, j: usize, k: usize) -> u32 {
        let s = k / 2;
        if k % 2 == 0 && s >= self.a[j - 1] && s < self.a[j] {
            self.modulus(k) / 2
        } else {
            0
        }
    }

    /// Depth `2 A_J` that holds every block.
    pub fn depth(&self) -> usize {
        2 * self.a[self.blocks()]
    }

    /// The moduli `m_0, ..., m_{depth-1}`.
    pub fn moduli(&self, depth: usize) -> Result<ModulusSequence> {
        ModulusSequence::new((0..depth).map(|k| self.modulus(k)).collect::<Vec<_>>())
    }

    /// Named checks of the defining constraints, exact where the quantities
    /// are integers.
    pub fn constraint_checks(&self) -> Vec<(String, bool)> {
        let ln_a = (self.bound() as f64).ln();
        let mut out = Vec::new();
        for j in 1..=self.blocks() {
            let (b, prev) = (self.b[j], self.b[j - 1]);
            out.push((format!("B_{j} > 2 B_{}", j - 1), b > 2 * prev));
            let bf = b as f64;
            out.push((
                format!("psi(B_{j})/B_{j} > 5 j ln a / c'"),
                self.gauge.eval(bf) / bf > 5.0 * j as f64 * ln_a / self.c_prime,
            ));
            let a = (j as f64 * bf / self.c_prime).floor() as usize + 1;
            out.push((format!("A_{j} = [j B_{j} / c'] + 1"), a == self.a[j]));
            out.push((format!("A_{j} > A_{}", j - 1), self.a[j] > self.a[j - 1]));
            let cap = BigUint::from(self.bound()).pow((2 * self.a[j]) as u32);
            out.push((format!("N_A_{j} <= a^(2 A_{j})"), self.n(j) <= &cap));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pow(e: f64) -> Gauge {
        Gauge::power(1.0, e).unwrap()
    }

    #[test]
    fn zero_blocks() {
        let p = choose_params(&pow(2.0), 1.0, 0, &ModulusSequence::parse("2").unwrap(), 10).unwrap();
        assert_eq!(p.blocks(), 0);
        assert!(p.constraint_checks().is_empty());
    }

    #[test]
    fn quadratic_gauge_scan() {
        // psi(B)/B = B > 5 ln 2 = 3.47, so B_1 = 4 and A_1 = 5
        let m = ModulusSequence::parse("2").unwrap();
        let p = choose_params(&pow(2.0), 1.0, 2, &m, 1000).unwrap();
        assert_eq!(p.b(1), 4);
        assert_eq!(p.a(1), 5);
        // B_2 > 8 and B_2 > 10 ln 2 = 6.93
        assert_eq!(p.b(2), 9);
        assert_eq!(p.a(2), 19);
        assert!(p.constraint_checks().iter().all(|(_, ok)| *ok));
        // dyadic N_{A_1} = M_2 + M_4 + M_6 + M_8
        assert_eq!(p.n(1), &BigUint::from(4u32 + 16 + 64 + 256));
    }

    #[test]
    fn desk_configuration() {
        let m = ModulusSequence::parse("2,3").unwrap();
        let p = choose_params(&pow(1.5), 4.0, 2, &m, 64).unwrap();
        assert_eq!((p.a(0), p.a(1), p.a(2)), (1, 2, 5));
        assert_eq!((p.b(1), p.b(2)), (4, 9));
        assert_eq!(p.depth(), 10);
        // N_{A_2} = M_4 + M_6 + M_8 = 36 + 216 + 1296
        assert_eq!(p.n(2), &BigUint::from(1548u32));
        assert_eq!(p.n_digit(2, 4), 1);
        assert_eq!(p.n_digit(2, 5), 0);
        assert_eq!(p.n_digit(2, 2), 0);
    }

    #[test]
    fn errors() {
        let m = ModulusSequence::parse("2,3").unwrap();
        assert!(matches!(
            choose_params(&pow(1.5), 1.0, 2, &m, 100),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(matches!(
            choose_params(&pow(1.0), 1.0, 1, &m, 100),
            Err(Error::Precondition(_))
        ));
        assert!(choose_params(&pow(2.0), 0.0, 1, &m, 100).is_err());
    }

    #[test]
    fn big_helpers() {
        let n = BigUint::from(6u32).pow(500);
        assert!((ln_big(&n) - 500.0 * 6f64.ln()).abs() < 1e-9);
        assert_eq!(format_big(&BigUint::from(1548u32)), "1548");
        assert!(format_big(&n).ends_with("e389"));
    }
}
