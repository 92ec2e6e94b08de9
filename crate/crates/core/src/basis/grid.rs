use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;

use super::transform::{forward_in_place, inverse_in_place};
use crate::error::{Error, Result};
use crate::group::{GroupPoint, VilenkinGroup};

/// A function constant on the depth-`d` cylinders, one value per cylinder
/// in flat (mixed-radix) order.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderGrid1D {
    group: Arc<VilenkinGroup>,
    depth: usize,
    values: Vec<Complex64>,
}

/// Fourier coefficients `hat f(0), .., hat f(M_d - 1)` of a depth-`d` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum1D {
    group: Arc<VilenkinGroup>,
    depth: usize,
    coeffs: Vec<Complex64>,
}

fn check_len(group: &VilenkinGroup, depth: usize, len: usize) -> Result<()> {
    group.number_system().check_depth(depth)?;
    let expected = group.scale(depth);
    if len != expected {
        return Err(Error::LengthMismatch {
            expected,
            found: len,
        });
    }
    Ok(())
}

impl CylinderGrid1D {
    pub fn new(group: Arc<VilenkinGroup>, depth: usize, values: Vec<Complex64>) -> Result<Self> {
        check_len(&group, depth, values.len())?;
        Ok(Self {
            group,
            depth,
            values,
        })
    }

    pub fn zeros(group: Arc<VilenkinGroup>, depth: usize) -> Result<Self> {
        Self::constant(group, depth, Complex64::new(0.0, 0.0))
    }

    pub fn constant(group: Arc<VilenkinGroup>, depth: usize, c: Complex64) -> Result<Self> {
        group.number_system().check_depth(depth)?;
        let values = vec![c; group.scale(depth)];
        Ok(Self {
            group,
            depth,
            values,
        })
    }

    /// Builds a grid from a function of the flat cell index.
    pub fn from_fn(
        group: Arc<VilenkinGroup>,
        depth: usize,
        f: impl FnMut(usize) -> Complex64,
    ) -> Result<Self> {
        group.number_system().check_depth(depth)?;
        let values = (0..group.scale(depth)).map(f).collect();
        Ok(Self {
            group,
            depth,
            values,
        })
    }

    /// `psi_k` sampled on the depth-`d` cylinders.
    pub fn character(group: Arc<VilenkinGroup>, depth: usize, k: usize) -> Result<Self> {
        let mut s = Spectrum1D::zeros(group, depth)?;
        let len = s.coeffs.len();
        *s.coeffs.get_mut(k).ok_or(Error::IndexOutOfRange {
            index: k as u64,
            bound: len as u64,
        })? = Complex64::new(1.0, 0.0);
        Ok(s.inverse_transform())
    }

    pub fn group(&self) -> &Arc<VilenkinGroup> {
        &self.group
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Value at a point of the full group.
    pub fn value_at(&self, x: &GroupPoint) -> Result<Complex64> {
        super::check_point(&self.group, x)?;
        Ok(self.values[x.cylinder_index(self.depth)? as usize])
    }

    /// `||f||_C`, exact for cylinder-constant functions.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// The same function written on the finer cylinders of `depth`.
    pub fn refine(&self, depth: usize) -> Result<Self> {
        if depth < self.depth {
            return Err(Error::Domain(format!(
                "cannot refine depth {} to coarser depth {depth}",
                self.depth
            )));
        }
        let coarse = self.values.len();
        Self::from_fn(Arc::clone(&self.group), depth, |c| self.values[c % coarse])
    }

    pub fn forward_transform(&self) -> Spectrum1D {
        let mut coeffs = self.values.clone();
        forward_in_place(&self.group, self.depth, &mut coeffs);
        Spectrum1D {
            group: Arc::clone(&self.group),
            depth: self.depth,
            coeffs,
        }
    }

    /// `S_n f = sum_{k<n} hat f(k) psi_k`, with `S_0 f = 0`.
    pub fn partial_sum(&self, n: usize) -> Result<Self> {
        Ok(self.forward_transform().truncated(n)?.inverse_transform())
    }

    /// Writes `index,re,im` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_complex_csv(writer, &self.values)
    }

    /// Reads `index,re,im` rows; the depth is inferred from the row count.
    pub fn read_csv<R: Read>(group: Arc<VilenkinGroup>, reader: R) -> Result<Self> {
        let values = read_complex_csv(reader)?;
        let depth = depth_for_len(&group, values.len())?;
        Self::new(group, depth, values)
    }
}

impl Spectrum1D {
    pub fn new(group: Arc<VilenkinGroup>, depth: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        check_len(&group, depth, coeffs.len())?;
        Ok(Self {
            group,
            depth,
            coeffs,
        })
    }

    pub fn zeros(group: Arc<VilenkinGroup>, depth: usize) -> Result<Self> {
        group.number_system().check_depth(depth)?;
        let coeffs = vec![Complex64::new(0.0, 0.0); group.scale(depth)];
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

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Keeps the coefficients below `n` and zeroes the rest.
    pub fn truncated(mut self, n: usize) -> Result<Self> {
        if n > self.coeffs.len() {
            return Err(Error::IndexOutOfRange {
                index: n as u64,
                bound: self.coeffs.len() as u64,
            });
        }
        self.coeffs[n..].fill(Complex64::new(0.0, 0.0));
        Ok(self)
    }

    pub fn inverse_transform(&self) -> CylinderGrid1D {
        let mut values = self.coeffs.clone();
        inverse_in_place(&self.group, self.depth, &mut values);
        CylinderGrid1D {
            group: Arc::clone(&self.group),
            depth: self.depth,
            values,
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_complex_csv(writer, &self.coeffs)
    }

    pub fn read_csv<R: Read>(group: Arc<VilenkinGroup>, reader: R) -> Result<Self> {
        let coeffs = read_complex_csv(reader)?;
        let depth = depth_for_len(&group, coeffs.len())?;
        Self::new(group, depth, coeffs)
    }
}

fn depth_for_len(group: &VilenkinGroup, len: usize) -> Result<usize> {
    (0..=group.depth())
        .find(|&d| group.scale(d) == len)
        .ok_or_else(|| Error::Parse(format!("{len} rows is not a cylinder count of this group")))
}

pub(crate) fn write_complex_csv<W: Write>(writer: W, values: &[Complex64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["index", "re", "im"])?;
    for (i, v) in values.iter().enumerate() {
        w.write_record([i.to_string(), v.re.to_string(), v.im.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn read_complex_csv<R: Read>(reader: R) -> Result<Vec<Complex64>> {
    let mut r = csv::Reader::from_reader(reader);
    let mut values = Vec::new();
    for (row, record) in r.records().enumerate() {
        let record = record?;
        let field = |i: usize| -> Result<&str> {
            record
                .get(i)
                .ok_or_else(|| Error::Parse(format!("row {}: missing column {i}", row + 1)))
        };
        let index: usize = field(0)?
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("row {}: bad index", row + 1)))?;
        if index != row {
            return Err(Error::Parse(format!(
                "row {}: expected index {row}, found {index}",
                row + 1
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad number `{s}`", row + 1)))
        };
        values.push(Complex64::new(parse(field(1)?)?, parse(field(2)?)?));
    }
    Ok(values)
}
