//! Experiment configuration from `key=value` entries.
//!
//! Entries come from an optional config file and from command-line flags;
//! later entries override earlier ones, so flags given after the file win.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{ModulusSequence, VilenkinGroup};
use crate::summability::Gauge;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    Kernels,
    Transform,
    LemmaGlukhov,
    Lemma3,
    Lemma4,
    Theorem1,
    StrongMeans,
    FridliSchipp,
    Counterexample,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::Kernels,
        Experiment::Transform,
        Experiment::LemmaGlukhov,
        Experiment::Lemma3,
        Experiment::Lemma4,
        Experiment::Theorem1,
        Experiment::StrongMeans,
        Experiment::FridliSchipp,
        Experiment::Counterexample,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Kernels => "kernels",
            Experiment::Transform => "transform",
            Experiment::LemmaGlukhov => "lemma-glukhov",
            Experiment::Lemma3 => "lemma3",
            Experiment::Lemma4 => "lemma4",
            Experiment::Theorem1 => "theorem1",
            Experiment::StrongMeans => "strong-means",
            Experiment::FridliSchipp => "fridli-schipp",
            Experiment::Counterexample => "counterexample",
        }
    }

    /// Modulus sequence used when none is given.
    pub fn default_moduli(self) -> &'static str {
        match self {
            Experiment::LemmaGlukhov => "2^5",
            Experiment::StrongMeans | Experiment::FridliSchipp => "2^8",
            Experiment::Counterexample => "2,3",
            _ => "2,3,2,3",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown experiment `{s}`")))
    }
}

/// Which `(n, m)` pairs a strong-mean table covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    /// Powers of two up to `M_d`.
    Dyadic,
    /// The scale ladder `M_0, ..., M_d`.
    Ladder,
    /// Explicit `n-list` and `m-list`.
    List,
}

impl FromStr for Sweep {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dyadic" => Ok(Sweep::Dyadic),
            "ladder" => Ok(Sweep::Ladder),
            "list" => Ok(Sweep::List),
            _ => Err(Error::Parse(format!("unknown sweep `{s}`"))),
        }
    }
}

/// Test functions for the summability experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFunction {
    /// Independent random cells.
    Random,
    /// Random on depth `d - 2` cylinders.
    Smooth,
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(TestFunction::Random),
            "smooth" => Ok(TestFunction::Smooth),
            _ => Err(Error::Parse(format!("unknown function kind `{s}`"))),
        }
    }
}

/// Where an entry came from, for error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Flag,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigEntry {
    pub key: String,
    pub value: String,
    pub origin: Origin,
}

impl ConfigEntry {
    pub fn flag(key: &str, value: impl Into<String>) -> Self {
        Self {
            key: key.to_string(),
            value: value.into(),
            origin: Origin::Flag,
        }
    }
}

/// Recognised keys.
pub const KEYS: [&str; 16] = [
    "m", "depth", "grid-depth", "gauge", "sweep", "n-list", "m-list", "p", "trials", "A",
    "c-prime", "blocks", "seed", "function", "out", "samples",
];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<Vec<ConfigEntry>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key=value, got `{line}`", i + 1)))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(Error::Parse(format!("line {}: unknown field `{key}`", i + 1)));
        }
        out.push(ConfigEntry {
            key: key.to_string(),
            value: value.trim().to_string(),
            origin: Origin::Line(i + 1),
        });
    }
    Ok(out)
}

/// Everything an experiment run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub moduli: String,
    /// Group depth; `None` uses the length of the modulus string.
    pub depth: Option<usize>,
    /// Depth of two-dimensional grids; `None` picks the largest with `M_d <= 64`.
    pub grid_depth: Option<usize>,
    pub gauge: Option<String>,
    pub sweep: Sweep,
    pub n_list: Vec<usize>,
    pub m_list: Vec<usize>,
    pub p_list: Vec<f64>,
    pub trials: Option<usize>,
    pub a: f64,
    pub c_prime: f64,
    pub blocks: usize,
    pub seed: u64,
    pub function: TestFunction,
    pub samples: usize,
    pub out: PathBuf,
}

/// Largest automatically chosen two-dimensional side.
pub const AUTO_GRID_SIDE: usize = 64;

fn list<T: FromStr>(value: &str) -> std::result::Result<Vec<T>, String> {
    value
        .split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| format!("bad list entry `{s}`")))
        .collect()
}

fn scalar<T: FromStr>(value: &str) -> std::result::Result<T, String> {
    value.trim().parse::<T>().map_err(|_| format!("cannot parse `{value}`"))
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        Self {
            experiment,
            moduli: experiment.default_moduli().to_string(),
            depth: None,
            grid_depth: None,
            gauge: None,
            sweep: Sweep::Dyadic,
            n_list: Vec::new(),
            m_list: Vec::new(),
            p_list: Vec::new(),
            trials: None,
            a: 1.0,
            c_prime: 1.0,
            blocks: 2,
            seed: 0,
            function: TestFunction::Smooth,
            samples: 20,
            out: PathBuf::from("harness-out"),
        }
    }

    /// Applies entries in order over the defaults.
    pub fn from_pairs<I: IntoIterator<Item = ConfigEntry>>(experiment: Experiment, entries: I) -> Result<Self> {
        let mut cfg = Self::defaults(experiment);
        for e in entries {
            cfg.apply(&e).map_err(|msg| {
                let place = match e.origin {
                    Origin::Line(n) => format!("line {n}, field `{}`", e.key),
                    Origin::Flag => format!("flag --{}", e.key),
                };
                Error::Parse(format!("{place}: {msg}"))
            })?;
        }
        Ok(cfg)
    }

    fn apply(&mut self, e: &ConfigEntry) -> std::result::Result<(), String> {
        let v = e.value.as_str();
        match e.key.as_str() {
            "m" => {
                ModulusSequence::parse(v).map_err(|err| err.to_string())?;
                self.moduli = v.to_string();
            }
            "depth" => self.depth = Some(scalar(v)?),
            "grid-depth" => self.grid_depth = Some(scalar(v)?),
            "gauge" => {
                Gauge::parse(v).map_err(|err| err.to_string())?;
                self.gauge = Some(v.to_string());
            }
            "sweep" => self.sweep = v.parse().map_err(|err: Error| err.to_string())?,
            "n-list" => self.n_list = list(v)?,
            "m-list" => self.m_list = list(v)?,
            "p" => self.p_list = list(v)?,
            "trials" => self.trials = Some(scalar(v)?),
            "A" => self.a = scalar(v)?,
            "c-prime" => self.c_prime = scalar(v)?,
            "blocks" => self.blocks = scalar(v)?,
            "seed" => self.seed = scalar(v)?,
            "function" => self.function = v.parse().map_err(|err: Error| err.to_string())?,
            "samples" => self.samples = scalar(v)?,
            "out" => self.out = PathBuf::from(v),
            other => return Err(format!("unknown field `{other}`")),
        }
        Ok(())
    }

    /// The modulus sequence, cycled or cut to `depth` when given.
    pub fn modulus_sequence(&self) -> Result<ModulusSequence> {
        let seq = ModulusSequence::parse(&self.moduli)?;
        match self.depth {
            Some(d) => seq.resized(d),
            None => Ok(seq),
        }
    }

    pub fn group(&self) -> Result<Arc<VilenkinGroup>> {
        VilenkinGroup::new(self.modulus_sequence()?)
    }

    /// Grid depth for two-dimensional experiments.
    pub fn grid_depth_for(&self, group: &VilenkinGroup) -> Result<usize> {
        match self.grid_depth {
            Some(d) if d <= group.depth() => Ok(d),
            Some(d) => Err(Error::DepthOutOfRange {
                depth: d,
                max: group.depth(),
            }),
            None => Ok((0..=group.depth())
                .rev()
                .find(|&d| group.scale(d) <= AUTO_GRID_SIDE)
                .unwrap_or(0)),
        }
    }

    pub fn gauge_or(&self, default: &str) -> Result<Gauge> {
        Gauge::parse(self.gauge.as_deref().unwrap_or(default))
    }

    pub fn p_or(&self, default: &[f64]) -> Vec<f64> {
        if self.p_list.is_empty() {
            default.to_vec()
        } else {
            self.p_list.clone()
        }
    }

    pub fn trials_or(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!("plot".parse::<Experiment>().is_err());
    }

    #[test]
    fn flags_override_file() {
        let mut entries = parse_config_file("# demo\nm = 2^6\ndepth=4\n\ntrials = 3 # few\n").unwrap();
        entries.push(ConfigEntry::flag("depth", "5"));
        let cfg = ExperimentConfig::from_pairs(Experiment::Lemma3, entries).unwrap();
        assert_eq!(cfg.moduli, "2^6");
        assert_eq!(cfg.depth, Some(5));
        assert_eq!(cfg.trials, Some(3));
        assert_eq!(cfg.modulus_sequence().unwrap().depth(), 5);
    }

    #[test]
    fn errors_name_their_place() {
        let err = parse_config_file("m = 2\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
        let entries = parse_config_file("depth = four\n").unwrap();
        let err = ExperimentConfig::from_pairs(Experiment::Kernels, entries).unwrap_err();
        assert!(err.to_string().contains("line 1, field `depth`"));
        let err = ExperimentConfig::from_pairs(Experiment::Kernels, [ConfigEntry::flag("gauge", "wat")])
            .unwrap_err();
        assert!(err.to_string().contains("flag --gauge"));
    }

    #[test]
    fn modulus_cycling_and_grid_depth() {
        let cfg = ExperimentConfig::from_pairs(
            Experiment::StrongMeans,
            [ConfigEntry::flag("m", "2,3"), ConfigEntry::flag("depth", "5")],
        )
        .unwrap();
        let g = cfg.group().unwrap();
        assert_eq!(g.moduli().as_slice(), &[2, 3, 2, 3, 2]);
        // M_3 = 12, M_4 = 36, M_5 = 72
        assert_eq!(cfg.grid_depth_for(&g).unwrap(), 4);
    }
}
