use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::combinatorics::HTable;
use super::distributions::{cond_joint_dist_with, empty_bin_dist, ratio, to_f64, TheoryConfig};
use super::etilde::{e_tilde, e_tilde_exact};
use crate::error::Result;

/// Which densification the within-bin pair term models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DensifiedScheme {
    /// Circulant OPH: both slots reuse one shifted within-bin permutation.
    Circulant,
    /// Re-randomized densification: independent within-bin permutations.
    ReRandomized,
}

/// Probability weights below this are dropped on the floating-point path.
const PRUNE: f64 = 1e-20;

/// Shared evaluator for `E1(m)` and the variance, generic over exactness.
struct Engine<'a> {
    cfg: &'a TheoryConfig,
    scheme: DensifiedScheme,
    table: HTable,
}

impl<'a> Engine<'a> {
    fn new(cfg: &'a TheoryConfig, scheme: DensifiedScheme) -> Self {
        Self {
            cfg,
            scheme,
            table: HTable::new(cfg.bins, cfg.f, cfg.width()),
        }
    }

    fn pair_term_exact(&self, a_p: usize, f_p: usize) -> BigRational {
        match self.scheme {
            DensifiedScheme::Circulant => e_tilde_exact(a_p, f_p, self.cfg.width()),
            DensifiedScheme::ReRandomized => {
                let j = ratio(a_p as i64, f_p as i64);
                &j * &j
            }
        }
    }

    fn pair_term(&self, a_p: usize, f_p: usize, cache: &mut HashMap<(usize, usize), f64>) -> f64 {
        match self.scheme {
            DensifiedScheme::Circulant => *cache
                .entry((a_p, f_p))
                .or_insert_with(|| e_tilde(a_p, f_p, self.cfg.width())),
            DensifiedScheme::ReRandomized => {
                let j = a_p as f64 / f_p as f64;
                j * j
            }
        }
    }

    fn e1_exact(&self, m: usize) -> Result<BigRational> {
        let dist = cond_joint_dist_with(self.cfg, m, &self.table)?;
        let within = dist.entries.iter().fold(BigRational::zero(), |acc, (a_p, f_p, p)| {
            acc + self.pair_term_exact(*a_p, *f_p) * p
        });
        let m_r = ratio(m as i64, 1);
        let cross = (&m_r - BigRational::one()) / &m_r * self.cfg.jaccard_tilde() * self.cfg.jaccard();
        Ok(within / m_r + cross)
    }

    fn e1(&self, m: usize, cache: &mut HashMap<(usize, usize), f64>) -> Result<f64> {
        let dist = cond_joint_dist_with(self.cfg, m, &self.table)?;
        let mut within = 0.0;
        for (a_p, f_p, p) in &dist.entries {
            let p = to_f64(p);
            if p >= PRUNE {
                within += self.pair_term(*a_p, *f_p, cache) * p;
            }
        }
        let mf = m as f64;
        let cross = (mf - 1.0) / mf * to_f64(&self.cfg.jaccard_tilde()) * to_f64(&self.cfg.jaccard());
        Ok(within / mf + cross)
    }

    fn variance_exact(&self) -> Result<BigRational> {
        let k = self.cfg.bins as i64;
        let j = self.cfg.jaccard();
        let jj = &j * self.cfg.jaccard_tilde();
        let mut acc = BigRational::zero();
        for (n_emp, p) in empty_bin_dist(self.cfg).iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let e = n_emp as i64;
            let mut inner = ratio(k, 1) * &j + ratio((k - e) * (k - e - 1), 1) * &jj;
            if n_emp > 0 {
                inner += ratio(e * (2 * k - e - 1), 1) * self.e1_exact(self.cfg.bins - n_emp)?;
            }
            acc += p * inner;
        }
        Ok(acc / ratio(k * k, 1) - &j * &j)
    }

    fn variance(&self) -> Result<f64> {
        let k = self.cfg.bins as f64;
        let j = to_f64(&self.cfg.jaccard());
        let jj = j * to_f64(&self.cfg.jaccard_tilde());
        let mut cache = HashMap::new();
        let mut acc = 0.0;
        for (n_emp, p) in empty_bin_dist(self.cfg).iter().enumerate() {
            let p = to_f64(p);
            if p < PRUNE {
                continue;
            }
            let e = n_emp as f64;
            let mut inner = k * j + (k - e) * (k - e - 1.0) * jj;
            if n_emp > 0 {
                inner += e * (2.0 * k - e - 1.0) * self.e1(self.cfg.bins - n_emp, &mut cache)?;
            }
            acc += p * inner;
        }
        Ok((acc / (k * k) - j * j).max(0.0))
    }
}

/// `E1(m)`: probability that an empty slot and another slot both collide,
/// given `m` non-empty bins, under circulant densification.
pub fn e1(cfg: &TheoryConfig, m: usize) -> Result<f64> {
    e1_for(cfg, m, DensifiedScheme::Circulant)
}

/// [`e1`] for either densification.
pub fn e1_for(cfg: &TheoryConfig, m: usize, scheme: DensifiedScheme) -> Result<f64> {
    Engine::new(cfg, scheme).e1(m, &mut HashMap::new())
}

/// Exact rational [`e1_for`].
pub fn e1_exact(cfg: &TheoryConfig, m: usize, scheme: DensifiedScheme) -> Result<BigRational> {
    Engine::new(cfg, scheme).e1_exact(m)
}

/// Variance of the circulant OPH estimator with `K` hashes.
pub fn variance_coph(cfg: &TheoryConfig) -> Result<f64> {
    Engine::new(cfg, DensifiedScheme::Circulant).variance()
}

/// Variance of the re-randomized densification estimator with `K` hashes.
pub fn variance_reden(cfg: &TheoryConfig) -> Result<f64> {
    Engine::new(cfg, DensifiedScheme::ReRandomized).variance()
}

/// Exact rational variance for either scheme.
pub fn variance_exact(cfg: &TheoryConfig, scheme: DensifiedScheme) -> Result<BigRational> {
    Engine::new(cfg, scheme).variance_exact()
}

/// Float variance for either scheme.
pub fn variance_for(cfg: &TheoryConfig, scheme: DensifiedScheme) -> Result<f64> {
    match scheme {
        DensifiedScheme::Circulant => variance_coph(cfg),
        DensifiedScheme::ReRandomized => variance_reden(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_sets_have_zero_variance() {
        let cfg = TheoryConfig::new(64, 4, 24, 24).unwrap();
        assert_eq!(variance_coph(&cfg).unwrap(), 0.0);
        assert_eq!(variance_reden(&cfg).unwrap(), 0.0);
        assert!(variance_exact(&cfg, DensifiedScheme::Circulant).unwrap().is_zero());
    }

    #[test]
    fn float_matches_exact() {
        for (dim, bins, a, f) in [(16, 4, 2, 6), (16, 2, 3, 7), (36, 6, 4, 12), (64, 4, 8, 24)] {
            let cfg = TheoryConfig::new(dim, bins, a, f).unwrap();
            for scheme in [DensifiedScheme::Circulant, DensifiedScheme::ReRandomized] {
                let x = to_f64(&variance_exact(&cfg, scheme).unwrap());
                let y = variance_for(&cfg, scheme).unwrap();
                assert!((x - y).abs() < 1e-12, "{cfg:?} {scheme:?}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn circulant_beats_rerandomized() {
        for (dim, bins, a, f) in [
            (16, 4, 2, 6),
            (36, 6, 4, 12),
            (64, 8, 10, 30),
            (64, 4, 8, 24),
            (100, 10, 30, 60),
        ] {
            let cfg = TheoryConfig::new(dim, bins, a, f).unwrap();
            assert!(variance_coph(&cfg).unwrap() < variance_reden(&cfg).unwrap(), "{cfg:?}");
        }
    }

    #[test]
    fn e1_single_bin_has_no_cross_term() {
        let cfg = TheoryConfig::new(16, 4, 2, 3).unwrap();
        let dist = super::super::cond_joint_dist(&cfg, 1).unwrap();
        let direct: f64 = dist
            .entries
            .iter()
            .map(|(a, f, p)| e_tilde(*a, *f, 4) * to_f64(p))
            .sum();
        assert!((e1(&cfg, 1).unwrap() - direct).abs() < 1e-15);
        for m in 1..=3 {
            assert!(e1(&cfg, m).unwrap() > 0.0);
        }
    }
}
