//! Brute-force checks for the closed forms: exhaustive enumeration where the
//! instance is tiny, direct simulation otherwise.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use super::distributions::{ratio, to_f64, CondJointDist, TheoryConfig};
use super::variance::DensifiedScheme;
use crate::error::{Error, Result};
use crate::estimate::{trial_estimates, Moments, Scheme, TrialPair};
use crate::oph::OphScheme;
use crate::randomness::{stream_rng, Role};
use crate::vectors::make_pair;

/// Position type in a typed arrangement: shared, in exactly one set, or absent.
const SHARED: u8 = 0;
const SINGLE: u8 = 1;
const ABSENT: u8 = 2;

/// Largest dimension the exhaustive variance oracle accepts.
pub const EXHAUSTIVE_MAX_DIM: usize = 12;
const WORK_BUDGET: u128 = 4_000_000_000;

/// How [`brute_force_variance`] evaluates the estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    /// Every split of the pair and every within-bin permutation and donor order.
    Exhaustive,
    /// Independent end-to-end trials of the hashing pipeline.
    MonteCarlo { trials: u64, seed: u64 },
}

/// Lexicographic successor of `v` in place; `false` once `v` is the last ordering.
fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("successor exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// All distinct typed arrangements of `a` shared, `f − a` single and `D − f` absent positions.
fn for_each_arrangement(dim: usize, a: usize, f: usize, mut visit: impl FnMut(&[u8])) {
    let mut types: Vec<u8> = std::iter::repeat_n(SHARED, a)
        .chain(std::iter::repeat_n(SINGLE, f - a))
        .chain(std::iter::repeat_n(ABSENT, dim - f))
        .collect();
    loop {
        visit(&types);
        if !next_permutation(&mut types) {
            break;
        }
    }
}

fn arrangement_count(dim: usize, a: usize, f: usize) -> u128 {
    factorial(dim) / (factorial(a) * factorial(f - a) * factorial(dim - f))
}

/// Type at the minimum of `π((o − shift) mod d)` over the occupied offsets of `bin`.
fn circulant_winner(bin: &[u8], pi: &[usize], shift: usize) -> Option<u8> {
    let d = bin.len();
    let back = d - shift % d;
    bin.iter()
        .enumerate()
        .filter(|(_, &t)| t != ABSENT)
        .min_by_key(|(o, _)| pi[(o + back) % d])
        .map(|(_, &t)| t)
}

/// Probability that two slots shifted by `1` and `1 + gap` both pick a
/// shared offset, over every arrangement of one bin and every `π ∈ S_d`.
pub fn within_bin_pair_collision(a_p: usize, f_p: usize, d: usize, gap: usize) -> Result<BigRational> {
    if f_p == 0 || a_p > f_p || f_p > d {
        return Err(Error::InfeasibleProfile {
            dim: d,
            union: f_p,
            intersection: a_p,
        });
    }
    if factorial(d) * arrangement_count(d, a_p, f_p) * d as u128 > WORK_BUDGET {
        return Err(Error::TooLarge(format!("within-bin enumeration at d={d}")));
    }
    let mut hits = 0u128;
    let mut total = 0u128;
    for_each_arrangement(d, a_p, f_p, |bin| {
        let mut pi: Vec<usize> = (0..d).collect();
        loop {
            let first = circulant_winner(bin, &pi, 1) == Some(SHARED);
            if first && circulant_winner(bin, &pi, 1 + gap) == Some(SHARED) {
                hits += 1;
            }
            total += 1;
            if !next_permutation(&mut pi) {
                break;
            }
        }
    });
    Ok(BigRational::new(BigInt::from(hits), BigInt::from(total)))
}

fn check_placement_size(cfg: &TheoryConfig) -> Result<()> {
    if arrangement_count(cfg.dim, cfg.a, cfg.f) > 50_000_000 {
        return Err(Error::TooLarge(format!("placement enumeration at D={}", cfg.dim)));
    }
    Ok(())
}

/// `P[N_emp = j]` by counting every placement of the union.
pub fn placement_empty_bin_dist(cfg: &TheoryConfig) -> Result<Vec<BigRational>> {
    check_placement_size(cfg)?;
    let d = cfg.width();
    let mut counts = vec![0u128; cfg.bins];
    let mut total = 0u128;
    for_each_arrangement(cfg.dim, cfg.a, cfg.f, |types| {
        let empty = types.chunks(d).filter(|b| b.iter().all(|&t| t == ABSENT)).count();
        counts[empty] += 1;
        total += 1;
    });
    Ok(counts
        .into_iter()
        .map(|c| BigRational::new(BigInt::from(c), BigInt::from(total)))
        .collect())
}

/// Law of `(ã, f̃)` in a uniformly chosen non-empty bin, given `m` non-empty
/// bins, by counting every placement of the pair.
pub fn placement_cond_joint_dist(cfg: &TheoryConfig, m: usize) -> Result<CondJointDist> {
    check_placement_size(cfg)?;
    let d = cfg.width();
    let mut weights: HashMap<(usize, usize), u128> = HashMap::new();
    let mut matching = 0u128;
    for_each_arrangement(cfg.dim, cfg.a, cfg.f, |types| {
        let occupied: Vec<&[u8]> = types.chunks(d).filter(|b| b.iter().any(|&t| t != ABSENT)).collect();
        if occupied.len() != m {
            return;
        }
        matching += 1;
        for bin in occupied {
            let a_p = bin.iter().filter(|&&t| t == SHARED).count();
            let f_p = bin.iter().filter(|&&t| t != ABSENT).count();
            *weights.entry((a_p, f_p)).or_default() += 1;
        }
    });
    if matching == 0 {
        return Err(Error::InfeasibleBinCount { m });
    }
    let denom = BigInt::from(matching * m as u128);
    let mut entries: Vec<_> = weights
        .into_iter()
        .map(|((a_p, f_p), w)| (a_p, f_p, BigRational::new(BigInt::from(w), denom.clone())))
        .collect();
    entries.sort_by_key(|e| (e.1, e.0));
    Ok(CondJointDist { m, entries })
}

/// Variance of the `K`-slot densified estimator, bypassing every closed form.
pub fn brute_force_variance(cfg: &TheoryConfig, scheme: DensifiedScheme, mode: OracleMode) -> Result<f64> {
    match mode {
        OracleMode::Exhaustive => Ok(to_f64(&brute_force_variance_exact(cfg, scheme)?)),
        OracleMode::MonteCarlo { trials, seed } => Ok(monte_carlo(cfg, scheme, trials, seed)?.variance()),
    }
}

/// Moments of end-to-end trial estimates on a pair with the profile of `cfg`.
pub fn monte_carlo(cfg: &TheoryConfig, scheme: DensifiedScheme, trials: u64, seed: u64) -> Result<Moments> {
    if trials < 2 {
        return Err(Error::InvalidParameter("need at least two trials".into()));
    }
    let (v, w) = make_pair(cfg.dim, cfg.f, cfg.a, seed)?;
    let pair = TrialPair::new(&v, &w)?;
    let scheme = Scheme::Oph(match scheme {
        DensifiedScheme::Circulant => OphScheme::coph(),
        DensifiedScheme::ReRandomized => OphScheme::reden(),
    });
    Ok(trial_estimates(&pair, &scheme, cfg.bins, cfg.bins, trials, seed)?
        .into_iter()
        .collect())
}

/// Exact variance over every arrangement, within-bin permutation and donor order.
///
/// Slots are conditionally independent given the arrangement (and, for the
/// circulant scheme, the shared `π`), so each contributes a hit count `q_k`
/// over `L` equally likely choices; then `E[ΣC] = Σq/L` and
/// `E[(ΣC)²] = (L·Σq + (Σq)² − Σq²)/L²`.
pub fn brute_force_variance_exact(cfg: &TheoryConfig, scheme: DensifiedScheme) -> Result<BigRational> {
    let (dim, k, d) = (cfg.dim, cfg.bins, cfg.width());
    if dim > EXHAUSTIVE_MAX_DIM {
        return Err(Error::TooLarge(format!(
            "exhaustive oracle needs D ≤ {EXHAUSTIVE_MAX_DIM}, got {dim}"
        )));
    }
    let arrangements = arrangement_count(dim, cfg.a, cfg.f);
    if arrangements * factorial(d) * (k * k * d) as u128 > WORK_BUDGET {
        return Err(Error::TooLarge(format!("exhaustive oracle at D={dim}, K={k}")));
    }
    let orders = factorial(k);
    let mut s1 = 0u128;
    let mut s2 = 0u128;
    let mut outer = 0u128;
    let mut q = vec![0u128; k];
    let mut accumulate = |q: &[u128], l: u128| {
        let sum: u128 = q.iter().sum();
        let sq: u128 = q.iter().map(|x| x * x).sum();
        s1 += sum;
        s2 += l * sum + sum * sum - sq;
    };
    let scale = match scheme {
        DensifiedScheme::Circulant => {
            let mut hit = vec![false; k * k];
            for_each_arrangement(dim, cfg.a, cfg.f, |types| {
                let bins: Vec<&[u8]> = types.chunks(d).collect();
                let occupied: Vec<usize> = (0..k).filter(|&b| bins[b].iter().any(|&t| t != ABSENT)).collect();
                let share = orders / occupied.len() as u128;
                let mut pi: Vec<usize> = (0..d).collect();
                loop {
                    for slot in 0..k {
                        for &b in &occupied {
                            hit[slot * k + b] = circulant_winner(bins[b], &pi, slot + 1) == Some(SHARED);
                        }
                    }
                    for (slot, qk) in q.iter_mut().enumerate() {
                        *qk = if occupied.contains(&slot) {
                            orders * hit[slot * k + slot] as u128
                        } else {
                            share * occupied.iter().filter(|&&b| hit[slot * k + b]).count() as u128
                        };
                    }
                    accumulate(&q, orders);
                    outer += 1;
                    if !next_permutation(&mut pi) {
                        break;
                    }
                }
            });
            orders
        }
        DensifiedScheme::ReRandomized => {
            let perms = factorial(d);
            let l = perms * orders;
            let mut cache: HashMap<Vec<u8>, u128> = HashMap::new();
            for_each_arrangement(dim, cfg.a, cfg.f, |types| {
                let bins: Vec<&[u8]> = types.chunks(d).collect();
                let occupied: Vec<usize> = (0..k).filter(|&b| bins[b].iter().any(|&t| t != ABSENT)).collect();
                let share = orders / occupied.len() as u128;
                let hits: Vec<u128> = (0..k)
                    .map(|b| {
                        *cache
                            .entry(bins[b].to_vec())
                            .or_insert_with(|| independent_hits(bins[b]))
                    })
                    .collect();
                for (slot, qk) in q.iter_mut().enumerate() {
                    *qk = if occupied.contains(&slot) {
                        orders * hits[slot]
                    } else {
                        share * occupied.iter().map(|&b| hits[b]).sum::<u128>()
                    };
                }
                accumulate(&q, l);
                outer += 1;
            });
            l
        }
    };
    let big = |x: u128| BigRational::from_integer(BigInt::from(x));
    let n = big(outer);
    let l = big(scale);
    let mean = big(s1) / (&n * &l);
    let second = big(s2) / (&n * &l * &l);
    let kk = ratio((k * k) as i64, 1);
    let var = (second - &mean * &mean) / kk;
    debug_assert!(var >= BigRational::zero());
    Ok(var)
}

/// Number of `π ∈ S_d` whose first occupied offset of `bin` is shared.
fn independent_hits(bin: &[u8]) -> u128 {
    let mut pi: Vec<usize> = (0..bin.len()).collect();
    let mut hits = 0;
    loop {
        if circulant_winner(bin, &pi, 0) == Some(SHARED) {
            hits += 1;
        }
        if !next_permutation(&mut pi) {
            break;
        }
    }
    hits
}

/// Direct simulation of `P[C_i = C_j = 1 | m non-empty bins]` for an empty
/// slot `i` and a neighbouring slot `j = i ± 1` under circulant densification.
pub fn conditional_pair_collision(cfg: &TheoryConfig, m: usize, trials: u64, seed: u64) -> Result<Moments> {
    let (k, d) = (cfg.bins, cfg.width());
    if m == 0 || m >= k || k < 2 {
        return Err(Error::InfeasibleBinCount { m });
    }
    let mut rng = stream_rng(seed, Role::Trial, 0);
    let mut types: Vec<u8> = std::iter::repeat_n(SHARED, cfg.a)
        .chain(std::iter::repeat_n(SINGLE, cfg.f - cfg.a))
        .chain(std::iter::repeat_n(ABSENT, cfg.dim - cfg.f))
        .collect();
    let mut pi: Vec<usize> = (0..d).collect();
    let mut moments = Moments::new();
    let mut attempts = 0u64;
    while moments.count() < trials {
        attempts += 1;
        if attempts > trials.saturating_mul(10_000) {
            return Err(Error::InfeasibleBinCount { m });
        }
        types.shuffle(&mut rng);
        let bins: Vec<&[u8]> = types.chunks(d).collect();
        let occupied: Vec<usize> = (0..k).filter(|&b| bins[b].iter().any(|&t| t != ABSENT)).collect();
        if occupied.len() != m {
            continue;
        }
        pi.shuffle(&mut rng);
        let empty: Vec<usize> = (0..k).filter(|b| !occupied.contains(b)).collect();
        let i = empty[rng.random_range(0..empty.len())];
        let j = if i == 0 || (i + 1 < k && rng.random_bool(0.5)) {
            i + 1
        } else {
            i - 1
        };
        let mut collide = |slot: usize| {
            let bin = if occupied.contains(&slot) {
                slot
            } else {
                occupied[rng.random_range(0..occupied.len())]
            };
            circulant_winner(bins[bin], &pi, slot + 1) == Some(SHARED)
        };
        let both = collide(i) && collide(j);
        moments.push(both as u8 as f64);
    }
    Ok(moments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{cond_joint_dist, e1, e_tilde_exact, empty_bin_dist, variance_exact};

    #[test]
    fn successor_enumerates_multiset_orderings() {
        let mut v = [0, 0, 1, 2];
        let mut n = 1;
        while next_permutation(&mut v) {
            n += 1;
        }
        assert_eq!(n, 12);
        assert_eq!(arrangement_count(4, 2, 3), 12);
    }

    #[test]
    fn pair_term_matches_within_bin_enumeration() {
        for d in 2..=6 {
            for f in 1..=d {
                for a in 0..=f {
                    let oracle = within_bin_pair_collision(a, f, d, 1).unwrap();
                    assert_eq!(e_tilde_exact(a, f, d), oracle, "a′={a} f′={f} d={d}");
                }
            }
        }
    }

    #[test]
    fn placements_match_closed_forms() {
        let cfg = TheoryConfig::new(8, 2, 1, 3).unwrap();
        assert_eq!(placement_empty_bin_dist(&cfg).unwrap(), empty_bin_dist(&cfg));
        for m in 1..=2 {
            let mut closed = cond_joint_dist(&cfg, m).unwrap();
            closed.entries.sort_by_key(|e| (e.1, e.0));
            assert_eq!(placement_cond_joint_dist(&cfg, m).unwrap(), closed);
        }
    }

    #[test]
    fn exhaustive_ordering_at_small_scale() {
        for (a, f) in [(1, 3), (2, 4), (1, 2), (3, 4)] {
            let cfg = TheoryConfig::new(8, 2, a, f).unwrap();
            let c = brute_force_variance_exact(&cfg, DensifiedScheme::Circulant).unwrap();
            let r = brute_force_variance_exact(&cfg, DensifiedScheme::ReRandomized).unwrap();
            assert!(c < r, "a={a} f={f}");
            assert_eq!(c, variance_exact(&cfg, DensifiedScheme::Circulant).unwrap());
            assert_eq!(r, variance_exact(&cfg, DensifiedScheme::ReRandomized).unwrap());
        }
    }

    #[test]
    fn exhaustive_matches_theory_at_twelve() {
        let cfg = TheoryConfig::new(12, 2, 2, 5).unwrap();
        for scheme in [DensifiedScheme::Circulant, DensifiedScheme::ReRandomized] {
            assert_eq!(
                brute_force_variance_exact(&cfg, scheme).unwrap(),
                variance_exact(&cfg, scheme).unwrap(),
                "{scheme:?}"
            );
        }
    }

    #[test]
    fn identical_sets_have_zero_oracle_variance() {
        let cfg = TheoryConfig::new(8, 2, 3, 3).unwrap();
        assert!(brute_force_variance_exact(&cfg, DensifiedScheme::Circulant)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn exhaustive_refuses_large_instances() {
        let cfg = TheoryConfig::new(16, 4, 2, 6).unwrap();
        assert!(matches!(
            brute_force_variance(&cfg, DensifiedScheme::Circulant, OracleMode::Exhaustive),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn conditional_pair_collision_matches_e1() {
        let cfg = TheoryConfig::new(16, 4, 2, 6).unwrap();
        let m = conditional_pair_collision(&cfg, 3, 400_000, 11).unwrap();
        let theory = e1(&cfg, 3).unwrap();
        assert!(
            (m.mean() - theory).abs() < 3.0 * m.std_error(),
            "{} vs {theory} (se {})",
            m.mean(),
            m.std_error()
        );
    }

    #[test]
    fn monte_carlo_tracks_exhaustive() {
        let cfg = TheoryConfig::new(8, 2, 2, 4).unwrap();
        for scheme in [DensifiedScheme::Circulant, DensifiedScheme::ReRandomized] {
            let exact = to_f64(&brute_force_variance_exact(&cfg, scheme).unwrap());
            let m = monte_carlo(&cfg, scheme, 200_000, 5).unwrap();
            assert!(
                (m.variance() - exact).abs() < 4.0 * m.variance_std_error(),
                "{scheme:?}: {} vs {exact}",
                m.variance()
            );
        }
    }
}
