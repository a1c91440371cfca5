//! Expands a config into grid points and runs them on a worker pool.

use std::collections::BTreeMap;

use coph_core::estimate::{run_trials, trial_estimates};
use coph_core::randomness::{derive_seed, Role};
use coph_core::theory::REPORT_CSV_HEADER;
use coph_core::vectors::{ingest_texts, jaccard, read_corpus};
use coph_core::{make_pair, BinaryVector, Error, Scheme, TheoryConfig, TrialPair, TrialStats, VarianceReport};
use rayon::prelude::*;

use crate::config::{intersection_for, ConfigError, DataSource, ExperimentConfig};

/// A resolved vector pair with a human-readable label.
#[derive(Debug, Clone)]
pub struct LabelledPair {
    pub label: String,
    pub pair: TrialPair,
}

/// One `(pair, K, M)` cell; every scheme in the cell shares `seed`, so their
/// trials see the same bin splits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridPoint {
    pub pair: usize,
    pub bins: usize,
    pub hashes: usize,
    pub seed: u64,
}

/// A validated, fully expanded experiment.
#[derive(Debug, Clone)]
pub struct Plan {
    pub pairs: Vec<LabelledPair>,
    pub points: Vec<GridPoint>,
    pub schemes: Vec<Scheme>,
    pub trials: u64,
    pub theory: Vec<TheoryConfig>,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    /// One row per `(pair, K, M, scheme)` in grid order.
    pub rows: Vec<TrialStats>,
    pub theory: Vec<VarianceReport>,
}

impl ExperimentOutput {
    pub fn stats_csv(&self) -> String {
        let mut out = String::from(coph_core::estimate::STATS_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.to_csv_row());
            out.push('\n');
        }
        out
    }

    pub fn theory_csv(&self) -> String {
        let mut out = format!("{REPORT_CSV_HEADER}\n");
        for r in &self.theory {
            out.push_str(&r.to_csv());
        }
        out
    }
}

fn resolve_pairs(source: &DataSource, seed: u64) -> Result<Vec<LabelledPair>, ConfigError> {
    let infeasible = |e: Error| ConfigError::Infeasible(e.to_string());
    match source {
        DataSource::Synthetic { dim, union, jaccard } => jaccard
            .iter()
            .map(|&j| {
                let a = intersection_for(j, *union);
                let (v, w) = make_pair(*dim, *union, a, seed).map_err(infeasible)?;
                Ok(LabelledPair {
                    label: format!("synthetic D={dim} f={union} a={a}"),
                    pair: TrialPair::new(&v, &w).map_err(infeasible)?,
                })
            })
            .collect(),
        DataSource::Corpus {
            path,
            pairs,
            jaccard,
            min_nnz,
        } => {
            let docs = read_corpus(path).map_err(|e| match e {
                Error::Io(source) => ConfigError::Read {
                    path: path.clone(),
                    source,
                },
                other => infeasible(other),
            })?;
            let vectors = ingest_texts(docs).map_err(infeasible)?;
            let lookup = |t: &str| {
                vectors
                    .get(t)
                    .ok_or_else(|| ConfigError::Infeasible(format!("term {t:?} does not occur in the corpus")))
            };
            let mut out = Vec::new();
            for (x, y) in pairs {
                out.push(LabelledPair {
                    label: format!("{x},{y}"),
                    pair: TrialPair::new(lookup(x)?, lookup(y)?).map_err(infeasible)?,
                });
            }
            if pairs.is_empty() {
                for (x, y) in nearest_pairs(&vectors, jaccard, *min_nnz)? {
                    out.push(LabelledPair {
                        label: format!("{x},{y}"),
                        pair: TrialPair::new(&vectors[&x], &vectors[&y]).map_err(infeasible)?,
                    });
                }
            }
            Ok(out)
        }
    }
}

/// For each target, the term pair whose Jaccard similarity is closest to it.
fn nearest_pairs(
    vectors: &BTreeMap<String, BinaryVector>,
    targets: &[f64],
    min_nnz: usize,
) -> Result<Vec<(String, String)>, ConfigError> {
    let terms: Vec<(&String, &BinaryVector)> = vectors.iter().filter(|(_, v)| v.nnz() >= min_nnz).collect();
    let mut best: Vec<Option<(f64, usize, usize)>> = vec![None; targets.len()];
    for i in 0..terms.len() {
        for k in i + 1..terms.len() {
            let j = jaccard(terms[i].1, terms[k].1).map_err(|e| ConfigError::Infeasible(e.to_string()))?;
            for (slot, &t) in best.iter_mut().zip(targets) {
                let gap = (j - t).abs();
                if slot.is_none_or(|(g, ..)| gap < g) {
                    *slot = Some((gap, i, k));
                }
            }
        }
    }
    best.into_iter()
        .map(|b| {
            let (_, i, k) = b.ok_or_else(|| {
                ConfigError::Infeasible(format!("fewer than two terms occur in at least {min_nnz} documents"))
            })?;
            Ok((terms[i].0.clone(), terms[k].0.clone()))
        })
        .collect()
}

impl Plan {
    /// Resolves the data and checks every `(pair, K, M, scheme)` combination
    /// before any trial runs.
    pub fn new(cfg: &ExperimentConfig, override_hypotheses: bool) -> Result<Self, ConfigError> {
        let pairs = resolve_pairs(&cfg.source, cfg.seed)?;
        let mut points = Vec::new();
        for (p, lp) in pairs.iter().enumerate() {
            for &bins in &cfg.bins {
                let hashes = cfg.hashes.clone().unwrap_or_else(|| vec![bins]);
                for m in hashes {
                    let idx = points.len() as u64;
                    points.push(GridPoint {
                        pair: p,
                        bins,
                        hashes: m,
                        seed: derive_seed(cfg.seed, Role::Trial, idx),
                    });
                    for scheme in &cfg.schemes {
                        // Zero trials only runs the parameter checks.
                        trial_estimates(&lp.pair, scheme, bins, m, 0, 0).map_err(|e| {
                            ConfigError::Infeasible(format!(
                                "{} with K={bins} M={m} on {}: {e}",
                                scheme.name(),
                                lp.label
                            ))
                        })?;
                    }
                }
            }
        }
        let mut theory = Vec::new();
        if cfg.theory_out.is_some() {
            let DataSource::Synthetic { dim, .. } = &cfg.source else {
                return Err(ConfigError::Invalid {
                    key: "theory_out",
                    msg: "closed-form variances need a synthetic source".into(),
                });
            };
            for pt in points.iter().filter(|p| p.bins == p.hashes) {
                let prof = pairs[pt.pair].pair.profile();
                let t = TheoryConfig::with_override(*dim, pt.bins, prof.intersection, prof.union, override_hypotheses)
                    .map_err(|e| match e {
                        Error::Hypothesis(msg) => ConfigError::Hypothesis(format!(
                            "{msg} (pass --override-theory-hypotheses to evaluate anyway)"
                        )),
                        other => ConfigError::Infeasible(other.to_string()),
                    })?;
                if !theory.contains(&t) {
                    theory.push(t);
                }
            }
        }
        Ok(Self {
            pairs,
            points,
            schemes: cfg.schemes.clone(),
            trials: cfg.trials,
            theory,
        })
    }

    /// Runs every cell, in parallel, returning rows in grid order.
    pub fn execute(&self) -> coph_core::Result<ExperimentOutput> {
        let tasks: Vec<(GridPoint, Scheme)> = self
            .points
            .iter()
            .flat_map(|&pt| self.schemes.iter().map(move |&s| (pt, s)))
            .collect();
        let rows = tasks
            .par_iter()
            .map(|(pt, scheme)| {
                run_trials(
                    &self.pairs[pt.pair].pair,
                    scheme,
                    pt.bins,
                    pt.hashes,
                    self.trials,
                    pt.seed,
                )
            })
            .collect::<coph_core::Result<Vec<_>>>()?;
        let theory = self
            .theory
            .par_iter()
            .map(|&t| VarianceReport::compute(t))
            .collect::<coph_core::Result<Vec<_>>>()?;
        Ok(ExperimentOutput { rows, theory })
    }
}

/// Validates `cfg` and runs it.
pub fn run_experiment(cfg: &ExperimentConfig, override_hypotheses: bool) -> anyhow::Result<ExperimentOutput> {
    let plan = Plan::new(cfg, override_hypotheses)?;
    Ok(plan.execute()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(extra: &str) -> ExperimentConfig {
        format!("dim = 64\nunion = 24\njaccard = 0.25, 0.5\nbins = 4\ntrials = 200\nseed = 3\nscheme = reden\nscheme = coph\n{extra}")
            .parse()
            .unwrap()
    }

    #[test]
    fn rows_follow_grid_order() {
        let out = run_experiment(&config("hashes = 4, 8\n"), false).unwrap();
        let keys: Vec<(String, usize, usize)> =
            out.rows.iter().map(|r| (r.scheme.clone(), r.union, r.hashes)).collect();
        assert_eq!(out.rows.len(), 2 * 2 * 2);
        assert_eq!(keys[0], ("reden".into(), 24, 4));
        assert_eq!(keys[1], ("coph-sigma-pi".into(), 24, 4));
        assert_eq!(keys[2].2, 8);
        assert!((out.rows[4].j_true - 0.5).abs() < 1e-12);
    }

    #[test]
    fn deterministic_regardless_of_pool() {
        let cfg = config("");
        let a = run_experiment(&cfg, false).unwrap().stats_csv();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| run_experiment(&cfg, false).unwrap().stats_csv());
        assert_eq!(a, b);
    }

    #[test]
    fn theory_needs_hypotheses_or_override() {
        let bad: ExperimentConfig =
            "dim = 64\nunion = 24\njaccard = 0.5\nbins = 16\ntrials = 10\nscheme = coph\ntheory_out = t.csv\n"
                .parse()
                .unwrap();
        assert!(matches!(Plan::new(&bad, false), Err(ConfigError::Hypothesis(_))));
        assert_eq!(Plan::new(&bad, true).unwrap().theory.len(), 1);
    }

    #[test]
    fn infeasible_scheme_parameters_fail_validation() {
        let cfg: ExperimentConfig =
            "dim = 64\nunion = 24\njaccard = 0.5\nbins = 4\nhashes = 100\ntrials = 10\nscheme = cminhash-sigma-pi\n"
                .parse()
                .unwrap();
        assert!(matches!(Plan::new(&cfg, false), Err(ConfigError::Infeasible(_))));
    }
}
