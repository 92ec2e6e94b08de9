//! Truncated bounded Vilenkin groups.
//!
//! A group is fixed by a finite modulus sequence `m = (m_0, .., m_{K-1})`. Its
//! elements are digit vectors `x = (x_0, .., x_{K-1})` with `0 <= x_k < m_k`
//! and the group law is digitwise addition modulo `m_k`. The scale ladder
//! `M_0 = 1, M_{k+1} = m_k M_k` gives the mixed-radix number system used both
//! for character indices and for flattening points: the point `x` is stored
//! at flat position `sum x_k M_k`, so the first `d` digits of a point select
//! its depth-`d` cylinder.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::Ratio;

use crate::basis::RootTable;
use crate::error::{Error, Result};

/// The generating sequence `m`, every entry at least 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModulusSequence {
    moduli: Vec<u32>,
    bound: u32,
}

impl ModulusSequence {
    pub fn new(moduli: impl Into<Vec<u32>>) -> Result<Self> {
        let moduli = moduli.into();
        if moduli.is_empty() {
            return Err(Error::EmptyModuli);
        }
        if let Some((position, &value)) = moduli.iter().enumerate().find(|(_, &m)| m < 2) {
            return Err(Error::InvalidModulus {
                position,
                value: value as u64,
            });
        }
        let bound = moduli.iter().copied().max().unwrap_or(2);
        Ok(Self { moduli, bound })
    }

    /// Repeats `pattern` cyclically until `depth` moduli are produced.
    pub fn periodic(pattern: &[u32], depth: usize) -> Result<Self> {
        if pattern.is_empty() || depth == 0 {
            return Err(Error::EmptyModuli);
        }
        Self::new(pattern.iter().copied().cycle().take(depth).collect::<Vec<_>>())
    }

    /// Parses `"2,3,4"`, `"2^10"` (ten moduli equal to 2), mixtures such as
    /// `"2,3^4"`, and a parenthesised repeated group `"(2,3)^4"`.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(parse_moduli(text.trim())?)
    }

    pub fn depth(&self) -> usize {
        self.moduli.len()
    }

    /// `a = max_k m_k`.
    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn modulus(&self, k: usize) -> u32 {
        self.moduli[k]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.moduli
    }

    /// The sequence cut or cyclically extended to exactly `depth` entries.
    pub fn resized(&self, depth: usize) -> Result<Self> {
        Self::periodic(&self.moduli, depth)
    }
}

impl fmt::Display for ModulusSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.moduli.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for ModulusSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

fn parse_moduli(text: &str) -> Result<Vec<u32>> {
    if text.is_empty() {
        return Err(Error::Parse("empty modulus specification".into()));
    }
    if let Some(rest) = text.strip_prefix('(') {
        let (inner, tail) = rest
            .split_once(')')
            .ok_or_else(|| Error::Parse(format!("unbalanced parenthesis in `{text}`")))?;
        let count = match tail.trim() {
            "" => 1,
            t => parse_count(t.strip_prefix('^').ok_or_else(|| {
                Error::Parse(format!("expected `^count` after group in `{text}`"))
            })?)?,
        };
        let group = parse_moduli(inner.trim())?;
        return Ok(group.iter().copied().cycle().take(group.len() * count).collect());
    }
    let mut out = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        let (value, count) = match token.split_once('^') {
            Some((v, c)) => (v.trim(), parse_count(c)?),
            None => (token, 1),
        };
        let value: u32 = value
            .parse()
            .map_err(|_| Error::Parse(format!("bad modulus `{token}`")))?;
        out.extend(std::iter::repeat_n(value, count));
    }
    Ok(out)
}

fn parse_count(text: &str) -> Result<usize> {
    let count: usize = text
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad repetition count `{text}`")))?;
    if count == 0 {
        return Err(Error::Parse("repetition count must be positive".into()));
    }
    Ok(count)
}

/// The scale ladder `M_0, .., M_K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumberSystem {
    scales: Vec<u64>,
}

impl NumberSystem {
    /// Fails with [`Error::ScaleOverflow`] when `M_K` exceeds `u64`.
    pub fn new(moduli: &ModulusSequence) -> Result<Self> {
        let mut scales = Vec::with_capacity(moduli.depth() + 1);
        scales.push(1u64);
        for (k, &m) in moduli.as_slice().iter().enumerate() {
            let next = scales[k]
                .checked_mul(m as u64)
                .ok_or(Error::ScaleOverflow { depth: k + 1 })?;
            scales.push(next);
        }
        Ok(Self { scales })
    }

    /// `K`, the number of digits.
    pub fn depth(&self) -> usize {
        self.scales.len() - 1
    }

    /// `M_k` for `k <= K`.
    pub fn scale(&self, k: usize) -> u64 {
        self.scales[k]
    }

    pub fn scales(&self) -> &[u64] {
        &self.scales
    }

    /// `M_K`, the number of points of the truncated group.
    pub fn order(&self) -> u64 {
        self.scales[self.depth()]
    }

    /// Haar measure `1 / M_d` of a depth-`d` cylinder.
    pub fn haar_measure(&self, d: usize) -> Result<Ratio<u64>> {
        self.check_depth(d)?;
        Ok(Ratio::new(1, self.scales[d]))
    }

    /// Largest ladder index `L` with `M_L <= n`, i.e. `|n|` for `n > 0`.
    pub fn ladder_position(&self, n: u64) -> usize {
        match self.scales.binary_search(&n) {
            Ok(k) => k,
            Err(k) => k.saturating_sub(1),
        }
    }

    pub fn decompose_index(&self, n: u64) -> Result<IndexDigits> {
        if n >= self.order() {
            return Err(Error::IndexOutOfRange {
                index: n,
                bound: self.order(),
            });
        }
        let mut digits = Vec::with_capacity(self.depth());
        let mut rest = n;
        for k in 0..self.depth() {
            let m = self.scales[k + 1] / self.scales[k];
            digits.push((rest % m) as u32);
            rest /= m;
        }
        Ok(IndexDigits { digits })
    }

    pub fn compose_index(&self, digits: &IndexDigits) -> u64 {
        digits
            .digits
            .iter()
            .zip(&self.scales)
            .map(|(&d, &s)| d as u64 * s)
            .sum()
    }

    pub(crate) fn check_depth(&self, d: usize) -> Result<()> {
        if d > self.depth() {
            return Err(Error::DepthOutOfRange {
                depth: d,
                max: self.depth(),
            });
        }
        Ok(())
    }
}

/// Mixed-radix digits `n_j` of an index `n = sum n_j M_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexDigits {
    digits: Vec<u32>,
}

impl IndexDigits {
    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn digit(&self, j: usize) -> u32 {
        self.digits.get(j).copied().unwrap_or(0)
    }

    /// `|n| = max{k : n_k != 0}`; `None` for `n = 0`.
    pub fn order(&self) -> Option<usize> {
        self.digits.iter().rposition(|&d| d != 0)
    }
}

/// An element of the truncated group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPoint {
    moduli: Arc<ModulusSequence>,
    digits: Vec<u32>,
}

impl GroupPoint {
    pub fn new(moduli: Arc<ModulusSequence>, digits: Vec<u32>) -> Result<Self> {
        if digits.len() != moduli.depth() {
            return Err(Error::LengthMismatch {
                expected: moduli.depth(),
                found: digits.len(),
            });
        }
        for (position, (&digit, &modulus)) in digits.iter().zip(moduli.as_slice()).enumerate() {
            if digit >= modulus {
                return Err(Error::DigitOutOfRange {
                    position,
                    digit: digit as u64,
                    modulus: modulus as u64,
                });
            }
        }
        Ok(Self { moduli, digits })
    }

    pub fn zero(moduli: Arc<ModulusSequence>) -> Self {
        let digits = vec![0; moduli.depth()];
        Self { moduli, digits }
    }

    /// `e_n`: digit `n` equal to one, all others zero.
    pub fn unit(moduli: Arc<ModulusSequence>, n: usize) -> Result<Self> {
        let mut digits = vec![0; moduli.depth()];
        *digits.get_mut(n).ok_or(Error::DepthOutOfRange {
            depth: n,
            max: moduli.depth(),
        })? = 1;
        Ok(Self { moduli, digits })
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn moduli(&self) -> &Arc<ModulusSequence> {
        &self.moduli
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    pub fn add(&self, other: &GroupPoint) -> Result<GroupPoint> {
        self.check_same(other)?;
        let digits = self
            .digits
            .iter()
            .zip(&other.digits)
            .zip(self.moduli.as_slice())
            .map(|((&a, &b), &m)| (a + b) % m)
            .collect();
        Ok(GroupPoint {
            moduli: Arc::clone(&self.moduli),
            digits,
        })
    }

    pub fn neg(&self) -> GroupPoint {
        let digits = self
            .digits
            .iter()
            .zip(self.moduli.as_slice())
            .map(|(&a, &m)| (m - a) % m)
            .collect();
        GroupPoint {
            moduli: Arc::clone(&self.moduli),
            digits,
        }
    }

    pub fn sub(&self, other: &GroupPoint) -> Result<GroupPoint> {
        self.add(&other.neg())
    }

    /// Rank of the cylinder `I_d(x)` among the `M_d` cylinders of depth `d`.
    pub fn cylinder_index(&self, d: usize) -> Result<u64> {
        if d > self.digits.len() {
            return Err(Error::DepthOutOfRange {
                depth: d,
                max: self.digits.len(),
            });
        }
        let mut index = 0u64;
        let mut scale = 1u64;
        for k in 0..d {
            index += self.digits[k] as u64 * scale;
            scale *= self.moduli.modulus(k) as u64;
        }
        Ok(index)
    }

    fn check_same(&self, other: &GroupPoint) -> Result<()> {
        if Arc::ptr_eq(&self.moduli, &other.moduli) || self.moduli == other.moduli {
            Ok(())
        } else {
            Err(Error::ModulusMismatch)
        }
    }
}

/// A truncated group together with its scale ladder and root-of-unity
/// tables. Shared by grids and spectra through an `Arc`.
#[derive(Debug, Clone)]
pub struct VilenkinGroup {
    moduli: Arc<ModulusSequence>,
    scales: NumberSystem,
    roots: RootTable,
}

impl PartialEq for VilenkinGroup {
    fn eq(&self, other: &Self) -> bool {
        self.moduli == other.moduli
    }
}

impl VilenkinGroup {
    pub fn new(moduli: ModulusSequence) -> Result<Arc<Self>> {
        let scales = NumberSystem::new(&moduli)?;
        let roots = RootTable::new(&moduli);
        Ok(Arc::new(Self {
            moduli: Arc::new(moduli),
            scales,
            roots,
        }))
    }

    pub fn parse(text: &str) -> Result<Arc<Self>> {
        Self::new(ModulusSequence::parse(text)?)
    }

    pub fn moduli(&self) -> &Arc<ModulusSequence> {
        &self.moduli
    }

    pub fn number_system(&self) -> &NumberSystem {
        &self.scales
    }

    pub fn roots(&self) -> &RootTable {
        &self.roots
    }

    pub fn depth(&self) -> usize {
        self.moduli.depth()
    }

    pub fn modulus(&self, k: usize) -> usize {
        self.moduli.modulus(k) as usize
    }

    pub fn scale(&self, k: usize) -> usize {
        self.scales.scale(k) as usize
    }

    pub fn order(&self) -> u64 {
        self.scales.order()
    }

    pub fn zero(&self) -> GroupPoint {
        GroupPoint::zero(Arc::clone(&self.moduli))
    }

    /// The point stored at flat position `index` (`index < M_K`).
    pub fn point(&self, index: u64) -> Result<GroupPoint> {
        let digits = self.scales.decompose_index(index)?;
        Ok(GroupPoint {
            moduli: Arc::clone(&self.moduli),
            digits: digits.digits,
        })
    }

    /// Flat position of a point; the inverse of [`VilenkinGroup::point`].
    pub fn point_index(&self, x: &GroupPoint) -> Result<u64> {
        if **x.moduli() != *self.moduli {
            return Err(Error::ModulusMismatch);
        }
        x.cylinder_index(self.depth())
    }

    pub fn decompose_index(&self, n: u64) -> Result<IndexDigits> {
        self.scales.decompose_index(n)
    }

    /// Digits of a flat position below `M_d`, written into `out[..d]`.
    pub(crate) fn digits_into(&self, mut index: usize, d: usize, out: &mut [u32]) {
        for (k, slot) in out.iter_mut().enumerate().take(d) {
            let m = self.modulus(k);
            *slot = (index % m) as u32;
            index /= m;
        }
    }
}
