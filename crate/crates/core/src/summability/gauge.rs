use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A monotone gauge on `[0, inf)` vanishing at zero.
///
/// Used both as the exponent `phi` inside `e^{phi(|S - f|)} - 1` and as the
/// integrand `psi` of one-dimensional strong means.
#[derive(Clone)]
pub enum Gauge {
    Zero,
    /// `A u^alpha`.
    Power { scale: f64, exponent: f64 },
    /// `e^{A u} - 1`.
    ExpMinusOne { rate: f64 },
    /// `u -> g(u^2)`.
    SquaredArgument(Box<Gauge>),
    /// `u -> g(sqrt(u))`.
    SqrtArgument(Box<Gauge>),
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gauge({})", self.descriptor())
    }
}

impl fmt::Display for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

impl Gauge {
    pub fn power(scale: f64, exponent: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite() && exponent > 0.0 && exponent.is_finite()) {
            return Err(Error::Domain(format!(
                "power gauge needs A > 0 and alpha > 0, got A={scale}, alpha={exponent}"
            )));
        }
        Ok(Gauge::Power { scale, exponent })
    }

    /// `A sqrt(u)`, the exponent of the strong approximation estimate.
    pub fn exp_sqrt(a: f64) -> Result<Self> {
        Self::power(a, 0.5)
    }

    pub fn exp_minus_one(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::Domain(format!("exponential gauge needs A > 0, got {rate}")));
        }
        Ok(Gauge::ExpMinusOne { rate })
    }

    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Gauge::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Gauge::Zero => 0.0,
            Gauge::Power { scale, exponent } => scale * u.powf(*exponent),
            Gauge::ExpMinusOne { rate } => (rate * u).exp_m1(),
            Gauge::SquaredArgument(g) => g.eval(u * u),
            Gauge::SqrtArgument(g) => g.eval(u.sqrt()),
            Gauge::Custom { f, .. } => f(u),
        }
    }

    /// `u -> g(u^2)`. For a two-dimensional exponent `phi` this is the
    /// one-dimensional gauge `psi(u) = lambda(u^2) u` with
    /// `lambda(u) = phi(u) / sqrt(u)`.
    pub fn squared_argument(&self) -> Gauge {
        match self {
            Gauge::Zero => Gauge::Zero,
            Gauge::Power { scale, exponent } => Gauge::Power {
                scale: *scale,
                exponent: 2.0 * exponent,
            },
            Gauge::SqrtArgument(g) => (**g).clone(),
            g => Gauge::SquaredArgument(Box::new(g.clone())),
        }
    }

    /// `u -> g(sqrt(u))`, the inverse of [`Gauge::squared_argument`].
    pub fn sqrt_argument(&self) -> Gauge {
        match self {
            Gauge::Zero => Gauge::Zero,
            Gauge::Power { scale, exponent } => Gauge::Power {
                scale: *scale,
                exponent: exponent / 2.0,
            },
            Gauge::SquaredArgument(g) => (**g).clone(),
            g => Gauge::SqrtArgument(Box::new(g.clone())),
        }
    }

    /// `lambda(u) = g(u) / sqrt(u)` for `u > 0`.
    pub fn lambda(&self, u: f64) -> f64 {
        self.eval(u) / u.sqrt()
    }

    /// Stable textual form, also accepted by [`Gauge::parse`] except for
    /// custom gauges.
    pub fn descriptor(&self) -> String {
        match self {
            Gauge::Zero => "zero".into(),
            Gauge::Power { scale, exponent } => format!("pow:A={scale},alpha={exponent}"),
            Gauge::ExpMinusOne { rate } => format!("exp:A={rate}"),
            Gauge::SquaredArgument(g) => format!("sq({})", g.descriptor()),
            Gauge::SqrtArgument(g) => format!("sqrt({})", g.descriptor()),
            Gauge::Custom { name, .. } => format!("custom:{name}"),
        }
    }

    /// Parses `zero`, `linear`, `pow:1.5`, `pow:A=2,alpha=0.5`,
    /// `exp-sqrt:A=1` (meaning `A sqrt(u)`), and `exp:A=1` (meaning
    /// `e^{A u} - 1`). `sq(..)` and `sqrt(..)` wrap another gauge.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some(inner) = text.strip_prefix("sq(").and_then(|r| r.strip_suffix(')')) {
            return Ok(Self::parse(inner)?.squared_argument());
        }
        if let Some(inner) = text.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            return Ok(Self::parse(inner)?.sqrt_argument());
        }
        let (tag, params) = text.split_once(':').unwrap_or((text, ""));
        let params = Params::parse(params)?;
        match tag {
            "zero" => Ok(Gauge::Zero),
            "linear" => Self::power(1.0, 1.0),
            "pow" => {
                let alpha = params.get_or("alpha", params.positional)?;
                Self::power(params.get_or("A", Some(1.0))?, alpha)
            }
            "exp-sqrt" => Self::exp_sqrt(params.get_or("A", params.positional.or(Some(1.0)))?),
            "exp" => Self::exp_minus_one(params.get_or("A", params.positional.or(Some(1.0)))?),
            _ => Err(Error::Parse(format!("unknown gauge `{text}`"))),
        }
    }

    /// Checks membership in the gauge class numerically: `g(0) = 0`,
    /// `g(u) -> 0` as `u -> 0`, and `g` nondecreasing on a log lattice up to
    /// `u_max`.
    pub fn validate(&self, u_max: f64) -> Result<()> {
        let at_zero = self.eval(0.0);
        if at_zero != 0.0 {
            return Err(Error::Domain(format!("{self}: g(0) = {at_zero}, expected 0")));
        }
        if self.eval(1e-12).abs() > 1e-3 {
            return Err(Error::Domain(format!("{self}: g does not vanish continuously at 0")));
        }
        let lattice = log_lattice(u_max, 12, 20);
        for pair in lattice.windows(2) {
            let (a, b) = (self.eval(pair[0]), self.eval(pair[1]));
            if b < a - 1e-12 * a.abs().max(1.0) || a.is_nan() || b.is_nan() {
                return Err(Error::Domain(format!(
                    "{self}: not monotone between {} and {}",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(())
    }
}

struct Params {
    positional: Option<f64>,
    named: Vec<(String, f64)>,
}

impl Params {
    fn parse(text: &str) -> Result<Self> {
        let mut positional = None;
        let mut named = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let num = |s: &str| -> Result<f64> {
                s.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad gauge parameter `{part}`")))
            };
            match part.split_once('=') {
                Some((k, v)) => named.push((k.trim().to_string(), num(v)?)),
                None if positional.is_none() => positional = Some(num(part)?),
                None => return Err(Error::Parse(format!("extra gauge parameter `{part}`"))),
            }
        }
        Ok(Self { positional, named })
    }

    fn get_or(&self, key: &str, default: Option<f64>) -> Result<f64> {
        self.named
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| *v)
            .or(default)
            .ok_or_else(|| Error::Parse(format!("gauge parameter `{key}` is required")))
    }
}

/// `decades * per_decade + 1` points, log-spaced, ending at `u_max`.
pub(crate) fn log_lattice(u_max: f64, decades: usize, per_decade: usize) -> Vec<f64> {
    let n = decades * per_decade;
    (0..=n)
        .map(|i| u_max * 10f64.powf(-((n - i) as f64) / per_decade as f64))
        .collect()
}

/// Numerical estimate of `limsup_{u -> inf} phi(u) / psi(u)` on a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct DominationReport {
    pub dominated: bool,
    /// Largest ratio over the top decade `[u_max / 10, u_max]`.
    pub limsup_estimate: f64,
    /// `ratio(u_max) / ratio(u_max / 10)`.
    pub top_decade_growth: f64,
    /// `(u, phi(u) / psi(u))` on the lattice.
    pub ratios: Vec<(f64, f64)>,
}

/// Largest growth of `phi / psi` over the top decade still read as bounded.
pub const DOMINATION_GROWTH_LIMIT: f64 = 1.5;

/// Tests the hypothesis `limsup phi(u) / psi(u) < inf` of the gauge
/// comparison principle on a log lattice over six decades below `u_max`.
/// The ratio is called bounded when it is finite and grows by at most
/// [`DOMINATION_GROWTH_LIMIT`] across the top decade.
pub fn gauge_dominates(phi: &Gauge, psi: &Gauge, u_max: f64) -> Result<DominationReport> {
    if !(u_max > 0.0 && u_max.is_finite()) {
        return Err(Error::Domain(format!("u_max must be positive, got {u_max}")));
    }
    let per_decade = 40;
    let ratios: Vec<(f64, f64)> = log_lattice(u_max, 6, per_decade)
        .into_iter()
        .map(|u| {
            let (a, b) = (phi.eval(u), psi.eval(u));
            let r = if b > 0.0 {
                a / b
            } else if a == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            (u, r)
        })
        .collect();
    let top = &ratios[ratios.len() - 1 - per_decade..];
    let limsup_estimate = top.iter().map(|&(_, r)| r).fold(0.0, f64::max);
    let (start, end) = (top[0].1, top[top.len() - 1].1);
    let top_decade_growth = if start > 0.0 {
        end / start
    } else if end > 0.0 {
        f64::INFINITY
    } else {
        1.0
    };
    let dominated = limsup_estimate.is_finite() && top_decade_growth <= DOMINATION_GROWTH_LIMIT;
    Ok(DominationReport {
        dominated,
        limsup_estimate,
        top_decade_growth,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_describe() {
        let g = Gauge::parse("exp-sqrt:A=2").unwrap();
        assert_eq!(g.descriptor(), "pow:A=2,alpha=0.5");
        assert!((g.eval(4.0) - 4.0).abs() < 1e-15);
        let g = Gauge::parse("pow:1.5").unwrap();
        assert!((g.eval(4.0) - 8.0).abs() < 1e-12);
        assert_eq!(Gauge::parse(&g.descriptor()).unwrap().descriptor(), g.descriptor());
        let g = Gauge::parse("exp:A=1").unwrap();
        assert!((g.eval(1.0) - (1f64.exp() - 1.0)).abs() < 1e-15);
        assert_eq!(Gauge::parse("zero").unwrap().eval(5.0), 0.0);
        assert!(Gauge::parse("pow").is_err());
        assert!(Gauge::parse("pow:-1").is_err());
        assert!(Gauge::parse("wobble:1").is_err());
        assert!(Gauge::parse("pow:1,2").is_err());
    }

    #[test]
    fn argument_transforms() {
        let phi = Gauge::power(1.0, 0.75).unwrap();
        let psi = phi.squared_argument();
        assert_eq!(psi.descriptor(), "pow:A=1,alpha=1.5");
        for u in [0.1, 1.0, 3.0, 40.0] {
            // psi(u) = lambda(u^2) u
            assert!((psi.eval(u) - phi.lambda(u * u) * u).abs() < 1e-12);
            assert!((psi.sqrt_argument().eval(u) - phi.eval(u)).abs() < 1e-12);
        }
        let e = Gauge::exp_minus_one(1.0).unwrap();
        let back = e.squared_argument().sqrt_argument();
        assert!((back.eval(2.0) - e.eval(2.0)).abs() < 1e-12);
        let nested = Gauge::parse("sq(exp:A=1)").unwrap();
        assert!((nested.eval(2.0) - e.eval(4.0)).abs() < 1e-9);
    }

    #[test]
    fn class_membership() {
        assert!(Gauge::exp_sqrt(1.0).unwrap().validate(1e6).is_ok());
        assert!(Gauge::exp_minus_one(0.5).unwrap().validate(100.0).is_ok());
        assert!(Gauge::Zero.validate(1e6).is_ok());
        assert!(Gauge::custom("shifted", |u| u + 1.0).validate(10.0).is_err());
        assert!(Gauge::custom("decreasing", |u| u * (-u).exp()).validate(10.0).is_err());
    }

    #[test]
    fn domination_examples() {
        let sqrt = Gauge::exp_sqrt(1.0).unwrap();
        let lin = Gauge::parse("linear").unwrap();
        let r = gauge_dominates(&sqrt, &lin, 1e6).unwrap();
        assert!(r.dominated && r.limsup_estimate < 1e-2);
        let r = gauge_dominates(&lin, &lin, 1e6).unwrap();
        assert!(r.dominated);
        assert!(r.ratios.iter().all(|&(_, q)| q == 1.0));
        let r = gauge_dominates(&lin, &sqrt, 1e6).unwrap();
        assert!(!r.dominated && r.top_decade_growth > 3.0);
        assert!(gauge_dominates(&lin, &Gauge::Zero, 10.0).unwrap().limsup_estimate.is_infinite());
        assert!(gauge_dominates(&lin, &sqrt, -1.0).is_err());
    }
}
