use std::fmt::Write as _;

use num_rational::BigRational;

use super::distributions::{empty_bin_dist, to_f64, TheoryConfig};
use super::oracle::{brute_force_variance_exact, monte_carlo};
use super::variance::{variance_coph, variance_exact, variance_reden, DensifiedScheme};
use crate::error::{Error, Result};
use crate::estimate::TrialStats;

/// Closed-form variances for one `(D, K, a, f)`, optionally checked against
/// exhaustive enumeration and Monte Carlo trials.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceReport {
    pub config: TheoryConfig,
    pub jaccard: f64,
    pub variance_coph: f64,
    pub variance_reden: f64,
    /// `P[N_emp = j]` for `j = 0..K`.
    pub empty_bins: Vec<f64>,
    /// Exact rational variances `(C-OPH, ReDen)`.
    pub exact: Option<(BigRational, BigRational)>,
    /// Exhaustive-enumeration variances `(C-OPH, ReDen)`.
    pub oracle: Option<(f64, f64)>,
    /// Monte Carlo statistics for C-OPH and ReDen.
    pub monte_carlo: Vec<TrialStats>,
}

pub const REPORT_CSV_HEADER: &str = "D,K,a,f,J,quantity,value";

impl VarianceReport {
    pub fn compute(config: TheoryConfig) -> Result<Self> {
        Ok(Self {
            config,
            jaccard: config.a as f64 / config.f as f64,
            variance_coph: variance_coph(&config)?,
            variance_reden: variance_reden(&config)?,
            empty_bins: empty_bin_dist(&config).iter().map(to_f64).collect(),
            exact: None,
            oracle: None,
            monte_carlo: Vec::new(),
        })
    }

    /// Adds the exact rational variances.
    pub fn with_exact(mut self) -> Result<Self> {
        self.exact = Some((
            variance_exact(&self.config, DensifiedScheme::Circulant)?,
            variance_exact(&self.config, DensifiedScheme::ReRandomized)?,
        ));
        Ok(self)
    }

    /// Adds the exhaustive oracle when the instance is small enough; a
    /// too-large instance leaves the report unchanged.
    pub fn with_oracle(mut self) -> Result<Self> {
        let run = |s| brute_force_variance_exact(&self.config, s);
        match (run(DensifiedScheme::Circulant), run(DensifiedScheme::ReRandomized)) {
            (Ok(c), Ok(r)) => self.oracle = Some((to_f64(&c), to_f64(&r))),
            (Err(Error::TooLarge(_)), _) | (_, Err(Error::TooLarge(_))) => {}
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
        Ok(self)
    }

    /// Adds Monte Carlo statistics from `trials` end-to-end trials per scheme.
    pub fn with_monte_carlo(mut self, trials: u64, seed: u64) -> Result<Self> {
        let cfg = self.config;
        for (scheme, name) in [
            (DensifiedScheme::Circulant, "coph-sigma-pi"),
            (DensifiedScheme::ReRandomized, "reden"),
        ] {
            let moments = monte_carlo(&cfg, scheme, trials, seed)?;
            self.monte_carlo.push(TrialStats::from_moments(
                name,
                self.jaccard,
                cfg.dim,
                cfg.f,
                cfg.bins,
                cfg.bins,
                &moments,
            ));
        }
        Ok(self)
    }

    /// One `quantity,value` row per reported number.
    pub fn to_csv(&self) -> String {
        let c = &self.config;
        let prefix = format!("{},{},{},{},{}", c.dim, c.bins, c.a, c.f, self.jaccard);
        let mut rows = vec![
            ("variance_coph".to_string(), self.variance_coph.to_string()),
            ("variance_reden".to_string(), self.variance_reden.to_string()),
        ];
        if let Some((x, y)) = &self.exact {
            rows.push(("variance_coph_exact".into(), x.to_string()));
            rows.push(("variance_reden_exact".into(), y.to_string()));
        }
        if let Some((x, y)) = self.oracle {
            rows.push(("oracle_coph".into(), x.to_string()));
            rows.push(("oracle_reden".into(), y.to_string()));
        }
        for s in &self.monte_carlo {
            rows.push((format!("mc_variance_{}", s.scheme), s.variance.to_string()));
            rows.push((format!("mc_bias_{}", s.scheme), s.bias.to_string()));
            rows.push((format!("mc_mse_{}", s.scheme), s.mse.to_string()));
        }
        for (j, p) in self.empty_bins.iter().enumerate() {
            rows.push((format!("p_empty_{j}"), p.to_string()));
        }
        let mut out = String::new();
        for (q, v) in rows {
            let _ = writeln!(out, "{prefix},{q},{v}");
        }
        out
    }

    /// Aligned human-readable summary.
    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "D={} K={} d={} a={} f={} J={:.6}",
            c.dim,
            c.bins,
            c.width(),
            c.a,
            c.f,
            self.jaccard
        );
        let _ = writeln!(out, "{:<24}{:>16.10e}", "variance C-OPH", self.variance_coph);
        let _ = writeln!(out, "{:<24}{:>16.10e}", "variance ReDen", self.variance_reden);
        let order = if self.variance_coph < self.variance_reden {
            "C-OPH < ReDen"
        } else if self.variance_coph > self.variance_reden {
            "C-OPH > ReDen"
        } else {
            "C-OPH = ReDen"
        };
        let _ = writeln!(out, "{:<24}{:>16}", "ordering", order);
        if let Some((x, y)) = &self.exact {
            let _ = writeln!(out, "{:<24}{}", "exact C-OPH", x);
            let _ = writeln!(out, "{:<24}{}", "exact ReDen", y);
        }
        if let Some((x, y)) = self.oracle {
            let _ = writeln!(out, "{:<24}{:>16.10e}", "oracle C-OPH", x);
            let _ = writeln!(out, "{:<24}{:>16.10e}", "oracle ReDen", y);
        }
        for s in &self.monte_carlo {
            let _ = writeln!(
                out,
                "{:<24}{:>16.10e}  (bias {:+.3e}, mse {:.6e}, {} trials)",
                format!("monte carlo {}", s.scheme),
                s.variance,
                s.bias,
                s.mse,
                s.n_trials
            );
        }
        let _ = writeln!(out, "P[N_emp = j]:");
        for (j, p) in self.empty_bins.iter().enumerate() {
            let _ = writeln!(out, "  j={j:<4}{p:.10e}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_for_reference_config() {
        let cfg = TheoryConfig::new(64, 4, 8, 24).unwrap();
        let r = VarianceReport::compute(cfg).unwrap();
        assert!(r.variance_coph < r.variance_reden);
        assert!(r.to_text().contains("C-OPH < ReDen"));
        assert_eq!(r.to_csv().lines().count(), 2 + 4);
    }

    #[test]
    fn identical_sets() {
        let cfg = TheoryConfig::new(16, 4, 5, 5).unwrap();
        let r = VarianceReport::compute(cfg).unwrap().with_exact().unwrap();
        assert_eq!((r.variance_coph, r.variance_reden), (0.0, 0.0));
    }
}
