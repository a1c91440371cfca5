use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::combinatorics::{binomial, HTable};
use crate::error::{Error, Result};

/// A pair profile `(a, f)` in dimension `D` split into `K` bins of width `d = D/K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TheoryConfig {
    pub dim: usize,
    pub bins: usize,
    pub a: usize,
    pub f: usize,
}

impl TheoryConfig {
    /// Validates the profile and the hypotheses `K² ≤ D` and `f ≤ (K−1)D/K`.
    pub fn new(dim: usize, bins: usize, a: usize, f: usize) -> Result<Self> {
        let cfg = Self::exploratory(dim, bins, a, f)?;
        if bins * bins > dim {
            return Err(Error::Hypothesis(format!("K² ≤ D fails: K={bins}, D={dim}")));
        }
        if f * bins > (bins - 1) * dim {
            return Err(Error::Hypothesis(format!(
                "f ≤ (K−1)D/K fails: f={f}, K={bins}, D={dim}"
            )));
        }
        Ok(cfg)
    }

    /// Like [`Self::new`] without the variance hypotheses.
    pub fn exploratory(dim: usize, bins: usize, a: usize, f: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if bins == 0 || dim % bins != 0 {
            return Err(Error::InvalidParameter(format!("bin count {bins} must divide D={dim}")));
        }
        if f == 0 || a > f || f > dim {
            return Err(Error::InfeasibleProfile {
                dim,
                union: f,
                intersection: a,
            });
        }
        Ok(Self { dim, bins, a, f })
    }

    /// Validates with or without the hypotheses.
    pub fn with_override(dim: usize, bins: usize, a: usize, f: usize, override_hypotheses: bool) -> Result<Self> {
        if override_hypotheses {
            Self::exploratory(dim, bins, a, f)
        } else {
            Self::new(dim, bins, a, f)
        }
    }

    pub fn width(&self) -> usize {
        self.dim / self.bins
    }

    pub fn jaccard(&self) -> BigRational {
        ratio(self.a as i64, self.f as i64)
    }

    /// `(a−1)/(f−1)`, taken as 0 when `f = 1`.
    pub fn jaccard_tilde(&self) -> BigRational {
        if self.f == 1 {
            BigRational::zero()
        } else {
            ratio(self.a as i64 - 1, self.f as i64 - 1)
        }
    }
}

pub(crate) fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Law of `(ã, f̃)`, the intersection and union counts inside one non-empty
/// bin, given `m` non-empty bins.
#[derive(Debug, Clone, PartialEq)]
pub struct CondJointDist {
    pub m: usize,
    /// `(a′, f′, probability)` over the feasible set.
    pub entries: Vec<(usize, usize, BigRational)>,
}

impl CondJointDist {
    pub fn get(&self, a_p: usize, f_p: usize) -> BigRational {
        self.entries
            .iter()
            .find(|(x, y, _)| *x == a_p && *y == f_p)
            .map(|e| e.2.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn total(&self) -> BigRational {
        self.entries.iter().fold(BigRational::zero(), |acc, e| acc + &e.2)
    }
}

/// `P[ã=a′, f̃=f′ | m] = C(d,f′)·H(m−1, f−f′)/H(m, f) · C(a,a′)·C(f−a, f′−a′)/C(f, f′)`.
pub fn cond_joint_dist(cfg: &TheoryConfig, m: usize) -> Result<CondJointDist> {
    let table = HTable::new(m, cfg.f, cfg.width());
    cond_joint_dist_with(cfg, m, &table)
}

pub(crate) fn cond_joint_dist_with(cfg: &TheoryConfig, m: usize, table: &HTable) -> Result<CondJointDist> {
    let d = cfg.width();
    let (a, f) = (cfg.a as i64, cfg.f as i64);
    if m == 0 || m > cfg.bins || table.get(m, cfg.f).is_zero() {
        return Err(Error::InfeasibleBinCount { m });
    }
    let total = BigInt::from(table.get(m, cfg.f).clone());
    let mut entries = Vec::new();
    for f_p in 1..=cfg.f.min(d) {
        let rest = table.get(m - 1, cfg.f - f_p);
        if rest.is_zero() {
            continue;
        }
        let occupancy = BigRational::new(BigInt::from(binomial(d as i64, f_p as i64) * rest), total.clone());
        let fp = f_p as i64;
        let denom = BigInt::from(binomial(f, fp));
        for a_p in (fp - (f - a)).max(0)..=a.min(fp) {
            let split = BigInt::from(binomial(a, a_p) * binomial(f - a, fp - a_p));
            let p = &occupancy * BigRational::new(split, denom.clone());
            if !p.is_zero() {
                entries.push((a_p as usize, f_p, p));
            }
        }
    }
    Ok(CondJointDist { m, entries })
}

/// `P[N_emp = j]` for `j = 0..K`, by inclusion-exclusion over empty bins.
pub fn empty_bin_dist(cfg: &TheoryConfig) -> Vec<BigRational> {
    let (k, d, f) = (cfg.bins as i64, cfg.width() as i64, cfg.f as i64);
    let total = BigInt::from(binomial(cfg.dim as i64, f));
    (0..k)
        .map(|j| {
            let mut acc = BigInt::zero();
            for l in 0..=(k - j) {
                let term = BigInt::from(binomial(k, j) * binomial(k - j, l) * binomial((k - j - l) * d, f));
                if l % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            BigRational::new(acc, total.clone())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn config_validation() {
        assert!(TheoryConfig::new(64, 4, 8, 24).is_ok());
        assert!(matches!(TheoryConfig::new(64, 16, 8, 24), Err(Error::Hypothesis(_))));
        assert!(matches!(TheoryConfig::new(64, 4, 8, 60), Err(Error::Hypothesis(_))));
        assert!(TheoryConfig::exploratory(64, 16, 8, 60).is_ok());
        assert!(TheoryConfig::exploratory(64, 5, 8, 24).is_err());
        assert!(TheoryConfig::exploratory(64, 4, 9, 8).is_err());
        assert_eq!(
            TheoryConfig::new(16, 4, 1, 1).unwrap().jaccard_tilde(),
            BigRational::zero()
        );
    }

    #[test]
    fn empty_bins_edge_cases() {
        let full = TheoryConfig::exploratory(12, 3, 5, 12).unwrap();
        assert_eq!(empty_bin_dist(&full)[0], BigRational::one());
        let single = TheoryConfig::exploratory(12, 3, 1, 1).unwrap();
        let dist = empty_bin_dist(&single);
        assert_eq!(dist[2], BigRational::one());
        assert!(dist[..2].iter().all(Zero::is_zero));
    }

    #[test]
    fn degenerate_intersection() {
        let cfg = TheoryConfig::new(32, 4, 6, 6).unwrap();
        for m in 1..=4 {
            let dist = cond_joint_dist(&cfg, m).unwrap();
            assert!(dist.entries.iter().all(|(a, f, _)| a == f));
            assert_eq!(dist.total(), BigRational::one());
        }
        assert!(matches!(
            cond_joint_dist(&cfg, 5),
            Err(Error::InfeasibleBinCount { m: 5 })
        ));
    }

    #[test]
    fn distributions_sum_to_one() {
        for (dim, bins, a, f) in [(16, 4, 2, 6), (36, 6, 3, 10), (64, 4, 8, 24), (64, 8, 0, 9)] {
            let cfg = TheoryConfig::new(dim, bins, a, f).unwrap();
            let emp = empty_bin_dist(&cfg);
            assert_eq!(emp.iter().fold(BigRational::zero(), |x, y| x + y), BigRational::one());
            for (j, p) in emp.iter().enumerate() {
                assert!(*p >= BigRational::zero());
                if !p.is_zero() {
                    assert_eq!(cond_joint_dist(&cfg, bins - j).unwrap().total(), BigRational::one());
                }
            }
        }
    }
}
