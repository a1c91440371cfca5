//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # Large synthetic grid
//! source = synthetic
//! dim = 4096
//! union = 2048
//! jaccard = 0.2, 0.35, 0.5, 0.65, 0.8
//! bins = 32, 128
//! hashes = 128
//! trials = 100000
//! seed = 7
//! scheme = reden
//! scheme = coph-sigma-pi
//! ```
//!
//! `scheme` and `pair` may repeat; every other key appears at most once.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use coph_core::Scheme;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key {key:?} given twice")]
    Duplicate { line: usize, key: String },
    #[error("missing required key {0:?}")]
    Missing(&'static str),
    #[error("invalid {key}: {msg}")]
    Invalid { key: &'static str, msg: String },
    #[error("infeasible grid point: {0}")]
    Infeasible(String),
    #[error("theory hypotheses: {0}")]
    Hypothesis(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Where the vector pairs come from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// One generated pair per `J`, with `a = round(J·f)` shared coordinates.
    Synthetic {
        dim: usize,
        union: usize,
        jaccard: Vec<f64>,
    },
    /// Term pairs from a corpus: the listed `pairs`, or else the pair of
    /// terms whose similarity is closest to each `jaccard` target.
    Corpus {
        path: PathBuf,
        pairs: Vec<(String, String)>,
        jaccard: Vec<f64>,
        min_nnz: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: DataSource,
    pub schemes: Vec<Scheme>,
    /// `K` values; MinHash-type schemes ignore them.
    pub bins: Vec<usize>,
    /// `M` values crossed with `bins`; `None` means `M = K`.
    pub hashes: Option<Vec<usize>>,
    pub trials: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    /// Where to write closed-form variance reports for synthetic `M = K` points.
    pub theory_out: Option<PathBuf>,
}

const SINGLE_KEYS: [&str; 14] = [
    "source",
    "dim",
    "union",
    "jaccard",
    "corpus",
    "min_nnz",
    "bins",
    "hashes",
    "trials",
    "seed",
    "out",
    "plot",
    "theory_out",
    "name",
];

fn parse_list<T: FromStr>(key: &'static str, value: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse().map_err(|e| ConfigError::Invalid {
                key,
                msg: format!("{s:?}: {e}"),
            })
        })
        .collect()
}

fn parse_one<T: FromStr>(key: &'static str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse().map_err(|e| ConfigError::Invalid {
        key,
        msg: format!("{value:?}: {e}"),
    })
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: Self = text.parse()?;
        // Relative paths in the file are relative to the file itself.
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let DataSource::Corpus { path, .. } = &mut cfg.source {
            rebase(path);
        }
        for p in [&mut cfg.out, &mut cfg.plot, &mut cfg.theory_out].into_iter().flatten() {
            rebase(p);
        }
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.schemes.is_empty() {
            return Err(ConfigError::Missing("scheme"));
        }
        if self.trials < 2 {
            return Err(ConfigError::Invalid {
                key: "trials",
                msg: format!("need at least 2 trials, got {}", self.trials),
            });
        }
        if self.bins.is_empty() || self.bins.contains(&0) {
            return Err(ConfigError::Invalid {
                key: "bins",
                msg: "need one or more positive bin counts".into(),
            });
        }
        if let Some(h) = &self.hashes {
            if h.is_empty() || h.contains(&0) {
                return Err(ConfigError::Invalid {
                    key: "hashes",
                    msg: "need one or more positive hash counts".into(),
                });
            }
        }
        let check_targets = |jaccard: &[f64]| {
            if let Some(j) = jaccard.iter().find(|j| !(0.0..=1.0).contains(*j)) {
                return Err(ConfigError::Invalid {
                    key: "jaccard",
                    msg: format!("{j} is outside [0, 1]"),
                });
            }
            Ok(())
        };
        match &self.source {
            DataSource::Synthetic { dim, union, jaccard } => {
                check_targets(jaccard)?;
                if jaccard.is_empty() {
                    return Err(ConfigError::Missing("jaccard"));
                }
                if *union == 0 || union > dim {
                    return Err(ConfigError::Infeasible(format!(
                        "union {union} must lie in [1, D={dim}]"
                    )));
                }
                for &j in jaccard {
                    let a = intersection_for(j, *union);
                    if a == 0 && *union < 2 {
                        return Err(ConfigError::Infeasible(format!(
                            "J={j} with f={union} leaves one vector empty"
                        )));
                    }
                }
            }
            DataSource::Corpus { pairs, jaccard, .. } => {
                check_targets(jaccard)?;
                if pairs.is_empty() && jaccard.is_empty() {
                    return Err(ConfigError::Missing("pair or jaccard"));
                }
            }
        }
        Ok(())
    }
}

/// `a = round(J·f)`.
pub fn intersection_for(j: f64, union: usize) -> usize {
    (j * union as f64).round() as usize
}

impl FromStr for ExperimentConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, ConfigError> {
        let mut seen = BTreeSet::new();
        let mut source = None;
        let (mut dim, mut union, mut jaccard, mut corpus, mut min_nnz) = (None, None, Vec::new(), None, 1usize);
        let mut pairs = Vec::new();
        let mut schemes = Vec::new();
        let (mut bins, mut hashes, mut trials, mut seed) = (None, None, None, 0u64);
        let (mut out, mut plot, mut theory_out) = (None, None, None);
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or_default().trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                msg: format!("expected key = value, got {content:?}"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if SINGLE_KEYS.contains(&key) && !seen.insert(key.to_string()) {
                return Err(ConfigError::Duplicate { line, key: key.into() });
            }
            match key {
                "name" => {}
                "source" => source = Some(value.to_string()),
                "dim" => dim = Some(parse_one("dim", value)?),
                "union" => union = Some(parse_one("union", value)?),
                "jaccard" => jaccard = parse_list("jaccard", value)?,
                "corpus" => corpus = Some(PathBuf::from(value)),
                "min_nnz" => min_nnz = parse_one("min_nnz", value)?,
                "pair" => {
                    let (x, y) = value.split_once(',').ok_or_else(|| ConfigError::Syntax {
                        line,
                        msg: format!("pair needs two comma-separated terms, got {value:?}"),
                    })?;
                    pairs.push((x.trim().to_lowercase(), y.trim().to_lowercase()));
                }
                "scheme" => schemes.push(value.parse::<Scheme>().map_err(|e| ConfigError::Invalid {
                    key: "scheme",
                    msg: e.to_string(),
                })?),
                "bins" => bins = Some(parse_list("bins", value)?),
                "hashes" => hashes = Some(parse_list("hashes", value)?),
                "trials" => trials = Some(parse_one("trials", value)?),
                "seed" => seed = parse_one("seed", value)?,
                "out" => out = Some(PathBuf::from(value)),
                "plot" => plot = Some(PathBuf::from(value)),
                "theory_out" => theory_out = Some(PathBuf::from(value)),
                _ => return Err(ConfigError::UnknownKey { line, key: key.into() }),
            }
        }
        let kind = source.unwrap_or_else(|| {
            if corpus.is_some() {
                "corpus".into()
            } else {
                "synthetic".into()
            }
        });
        let source = match kind.as_str() {
            "synthetic" => DataSource::Synthetic {
                dim: dim.ok_or(ConfigError::Missing("dim"))?,
                union: union.ok_or(ConfigError::Missing("union"))?,
                jaccard,
            },
            "corpus" => DataSource::Corpus {
                path: corpus.ok_or(ConfigError::Missing("corpus"))?,
                pairs,
                jaccard,
                min_nnz,
            },
            other => {
                return Err(ConfigError::Invalid {
                    key: "source",
                    msg: format!("expected synthetic or corpus, got {other:?}"),
                })
            }
        };
        let cfg = Self {
            source,
            schemes,
            bins: bins.ok_or(ConfigError::Missing("bins"))?,
            hashes,
            trials: trials.ok_or(ConfigError::Missing("trials"))?,
            seed,
            out,
            plot,
            theory_out,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
