use rand::seq::{index, SliceRandom};

use super::{estimate_slots, Moments, Scheme, TrialStats};
use crate::error::{Error, Result};
use crate::minhash::{circulant_values, MinHashKind, Pi, PiSource, SigmaSource};
use crate::oph::{
    bin_width, scan_order, two_universal_place, BinLayout, DensifyValue, DonorPlan, DonorSelection, Engine, SlotHashes,
    SplitterKind,
};
use crate::randomness::{derive_seed, stream_rng, Permutation, Role, TwoUniversalHash};
use crate::sketch::Slot;
use crate::vectors::{BinaryVector, PairProfile};

/// A pair of vectors in union coordinates: `union[c]` is the original index of
/// union element `c`, and each vector lists the union elements it holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialPair {
    dim: usize,
    union: Vec<usize>,
    v: Vec<usize>,
    w: Vec<usize>,
    intersection: usize,
}

impl TrialPair {
    pub fn new(v: &BinaryVector, w: &BinaryVector) -> Result<Self> {
        let profile = PairProfile::of(v, w)?;
        if profile.union == 0 {
            return Err(Error::EmptyUnion);
        }
        if v.is_empty() || w.is_empty() {
            return Err(Error::EmptyVector);
        }
        let mut union: Vec<usize> = v.support().iter().chain(w.support()).copied().collect();
        union.sort_unstable();
        union.dedup();
        let locate = |x: &BinaryVector| -> Vec<usize> {
            x.support()
                .iter()
                .map(|i| union.binary_search(i).expect("index in union"))
                .collect()
        };
        Ok(Self {
            dim: v.dim(),
            v: locate(v),
            w: locate(w),
            union,
            intersection: profile.intersection,
        })
    }

    pub fn profile(&self) -> PairProfile {
        PairProfile {
            dim: self.dim,
            union: self.union.len(),
            intersection: self.intersection,
        }
    }

    pub fn jaccard(&self) -> f64 {
        self.intersection as f64 / self.union.len() as f64
    }
}

#[derive(Debug, Default)]
struct Scratch {
    positions: Vec<usize>,
    pos_v: Vec<usize>,
    pos_w: Vec<usize>,
    vals_v: Vec<u64>,
    vals_w: Vec<u64>,
    layout_v: BinLayout,
    layout_w: BinLayout,
    slots_v: Vec<Slot>,
    slots_w: Vec<Slot>,
}

fn validate(pair: &TrialPair, scheme: &Scheme, bins: usize, hashes: usize) -> Result<()> {
    match scheme.minhash(hashes) {
        Some(s) => s.validate(pair.dim),
        None => {
            if hashes == 0 {
                return Err(Error::InvalidParameter("need at least one hash value".into()));
            }
            if bins == 0 || bins > pair.dim {
                return Err(Error::InvalidParameter(format!(
                    "bin count {bins} must lie in [1, {}]",
                    pair.dim
                )));
            }
            if let Scheme::Oph(o) = scheme {
                let d = bin_width(pair.dim, bins);
                if o.fill == DensifyValue::Circulant && !o.periodic_shift && hashes > d {
                    return Err(Error::InvalidParameter(
                        "M·K exceeds the dimension without the periodic shift".into(),
                    ));
                }
            }
            Ok(())
        }
    }
}

fn collisions(a: &[u64], b: &[u64]) -> f64 {
    a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / a.len() as f64
}

fn gather(table: &[usize], idx: &[usize], out: &mut Vec<usize>) {
    out.clear();
    out.extend(idx.iter().map(|&c| table[c]));
}

/// One estimate with all randomness derived from `seed`.
///
/// Exact permutations are only materialized on the union: their restriction
/// to `f` elements is a uniformly random injection, sampled directly.
fn trial_estimate(
    pair: &TrialPair,
    scheme: &Scheme,
    bins: usize,
    hashes: usize,
    seed: u64,
    s: &mut Scratch,
) -> Result<f64> {
    let dim = pair.dim;
    let f = pair.union.len();
    match *scheme {
        Scheme::MinHash {
            kind: MinHashKind::Standard,
            ..
        } => {
            // Only the relative order of permuted union elements affects collisions.
            s.positions.clear();
            s.positions.extend(0..f);
            let mut hits = 0usize;
            for k in 0..hashes {
                s.positions
                    .shuffle(&mut stream_rng(seed, Role::SlotPermutation, k as u64));
                let hv = pair.v.iter().map(|&c| s.positions[c]).min();
                let hw = pair.w.iter().map(|&c| s.positions[c]).min();
                hits += (hv == hw) as usize;
            }
            Ok(hits as f64 / hashes as f64)
        }
        Scheme::MinHash { sigma, pi, .. } => {
            let pi_perm;
            let pi_hashes: Vec<TwoUniversalHash>;
            let pi_ref = match pi {
                PiSource::ExactPermutation => {
                    pi_perm = Permutation::random(dim, &mut stream_rng(seed, Role::Pi, 0))?;
                    Pi::Permutation(&pi_perm)
                }
                PiSource::TwoUniversal => {
                    pi_hashes = (0..hashes as u64)
                        .map(|k| TwoUniversalHash::new(dim, derive_seed(seed, Role::Pi, k)))
                        .collect::<Result<_>>()?;
                    Pi::TwoUniversal(&pi_hashes)
                }
            };
            s.positions.clear();
            match sigma {
                SigmaSource::ExactPermutation => {
                    s.positions
                        .extend(index::sample(&mut stream_rng(seed, Role::Sigma, 0), dim, f).iter());
                }
                SigmaSource::ReusePi => {
                    let Pi::Permutation(p) = pi_ref else {
                        unreachable!("reusing pi requires an exact pi")
                    };
                    s.positions.extend(pair.union.iter().map(|&i| p.apply(i)));
                }
                SigmaSource::TwoUniversal => {
                    let h = TwoUniversalHash::new(dim, derive_seed(seed, Role::Sigma, 0))?;
                    for &i in &pair.union {
                        s.positions.push(h.rank(i)?);
                    }
                }
            }
            gather(&s.positions, &pair.v, &mut s.pos_v);
            gather(&s.positions, &pair.w, &mut s.pos_w);
            circulant_values(&s.pos_v, pi_ref, hashes, &mut s.vals_v);
            circulant_values(&s.pos_w, pi_ref, hashes, &mut s.vals_w);
            Ok(collisions(&s.vals_v, &s.vals_w))
        }
        Scheme::Oph(o) => {
            let d = bin_width(dim, bins);
            s.positions.clear();
            match o.splitter {
                SplitterKind::ExactPermutation => {
                    let picks = index::sample(&mut stream_rng(seed, Role::Sigma, 0), bins * d, f);
                    s.positions.extend(picks.iter());
                }
                SplitterKind::TwoUniversal => {
                    let h = TwoUniversalHash::new(dim, derive_seed(seed, Role::Sigma, 0))?;
                    s.positions.extend(pair.union.iter().map(|&i| {
                        let (b, off) = two_universal_place(h.eval_unchecked(i as u64), h.p(), bins, d);
                        b * d + off
                    }));
                }
            }
            let slot_hashes = if o.fill == DensifyValue::Circulant {
                SlotHashes::circulant(
                    Permutation::random(d, &mut stream_rng(seed, Role::Pi, 0))?,
                    bins,
                    o.periodic_shift,
                )
            } else {
                SlotHashes::Seeded { seed, width: d }
            };
            let donors = match o.donor {
                DonorSelection::ClockwiseRotation => DonorPlan::Clockwise,
                DonorSelection::UniformRandom2U => DonorPlan::Uniform { seed },
            };
            let scan = scan_order(o.scan, bins, hashes, seed);
            let engine = Engine::new(&o, bins, d, scan, slot_hashes, donors)?;
            let positions = &s.positions;
            s.layout_v
                .refill(bins, d, pair.v.iter().map(|&c| (positions[c] / d, positions[c] % d)))?;
            s.layout_w
                .refill(bins, d, pair.w.iter().map(|&c| (positions[c] / d, positions[c] % d)))?;
            engine.sketch_layout(&s.layout_v, &mut s.slots_v)?;
            engine.sketch_layout(&s.layout_w, &mut s.slots_w)?;
            estimate_slots(&s.slots_v, &s.slots_w)
        }
    }
}

fn for_each_estimate(
    pair: &TrialPair,
    scheme: &Scheme,
    bins: usize,
    hashes: usize,
    n_trials: u64,
    seed: u64,
    mut sink: impl FnMut(f64),
) -> Result<()> {
    validate(pair, scheme, bins, hashes)?;
    let mut scratch = Scratch::default();
    for t in 0..n_trials {
        let ts = derive_seed(seed, Role::Trial, t);
        sink(trial_estimate(pair, scheme, bins, hashes, ts, &mut scratch)?);
    }
    Ok(())
}

/// Per-trial estimates; trial `t` uses the stream `(seed, Trial, t)`, so
/// schemes run with the same seed share their bin splits trial by trial.
pub fn trial_estimates(
    pair: &TrialPair,
    scheme: &Scheme,
    bins: usize,
    hashes: usize,
    n_trials: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n_trials as usize);
    for_each_estimate(pair, scheme, bins, hashes, n_trials, seed, |x| out.push(x))?;
    Ok(out)
}

/// Bias, variance and MSE of the estimator over `n_trials` independent trials.
///
/// `bins` is ignored by MinHash-type schemes, which report `K = M = hashes`.
pub fn run_trials(
    pair: &TrialPair,
    scheme: &Scheme,
    bins: usize,
    hashes: usize,
    n_trials: u64,
    seed: u64,
) -> Result<TrialStats> {
    if n_trials < 2 {
        return Err(Error::InvalidParameter("need at least two trials".into()));
    }
    let mut moments = Moments::new();
    for_each_estimate(pair, scheme, bins, hashes, n_trials, seed, |x| moments.push(x))?;
    let p = pair.profile();
    let bins = if scheme.is_minhash() { hashes } else { bins };
    Ok(TrialStats::from_moments(
        scheme.name(),
        pair.jaccard(),
        p.dim,
        p.union,
        bins,
        hashes,
        &moments,
    ))
}

/// Paired test on squared errors: `d_t = (a_t − J)² − (b_t − J)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedComparison {
    pub n: u64,
    /// `MSE(a) − MSE(b)`.
    pub mean_diff: f64,
    pub std_error: f64,
    /// `mean_diff / std_error`; negative when `a` is more accurate.
    pub z: f64,
}

pub fn paired_comparison(a: &[f64], b: &[f64], j_true: f64) -> Result<PairedComparison> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::InvalidParameter(
            "paired comparison needs two equally long runs of at least two trials".into(),
        ));
    }
    let m: Moments = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - j_true).powi(2) - (y - j_true).powi(2))
        .collect();
    let se = m.std_error();
    Ok(PairedComparison {
        n: m.count(),
        mean_diff: m.mean(),
        std_error: se,
        z: if se > 0.0 { m.mean() / se } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vectors::make_pair;

    fn pair(d: usize, f: usize, a: usize) -> TrialPair {
        let (v, w) = make_pair(d, f, a, 1).unwrap();
        TrialPair::new(&v, &w).unwrap()
    }

    #[test]
    fn identical_vectors_give_exact_estimates() {
        let v = BinaryVector::new(64, (0..64).step_by(3).collect()).unwrap();
        let p = TrialPair::new(&v, &v).unwrap();
        for name in Scheme::NAMES {
            let scheme: Scheme = name.parse().unwrap();
            let s = run_trials(&p, &scheme, 4, 4, 50, 7).unwrap();
            assert_eq!(s.mean, 1.0, "{name}");
            assert_eq!(s.variance, 0.0, "{name}");
        }
    }

    #[test]
    fn reproducible_and_validated() {
        let p = pair(128, 40, 10);
        let scheme: Scheme = "coph-sigma-pi".parse().unwrap();
        let a = trial_estimates(&p, &scheme, 8, 8, 100, 3).unwrap();
        assert_eq!(a, trial_estimates(&p, &scheme, 8, 8, 100, 3).unwrap());
        assert!(a.iter().all(|x| (0.0..=1.0).contains(x)));
        assert!(run_trials(&p, &scheme, 8, 8, 1, 3).is_err());
        assert!(run_trials(&p, &scheme, 200, 8, 10, 3).is_err());
        let circ: Scheme = "cminhash-sigma-pi".parse().unwrap();
        assert!(run_trials(&p, &circ, 0, 129, 10, 3).is_err());
    }

    #[test]
    fn standard_minhash_binomial_variance() {
        let p = pair(256, 60, 21);
        let j = p.jaccard();
        let k = 16;
        let s = run_trials(&p, &"minhash".parse().unwrap(), 0, k, 40_000, 5).unwrap();
        let expect = j * (1.0 - j) / k as f64;
        let m: Moments = trial_estimates(&p, &"minhash".parse().unwrap(), 0, k, 40_000, 5)
            .unwrap()
            .into_iter()
            .collect();
        assert!(
            (s.variance - expect).abs() < 3.0 * m.variance_std_error(),
            "{} vs {expect}",
            s.variance
        );
        assert!(s.bias.abs() < 3.0 * s.std_error);
    }

    #[test]
    fn paired_comparison_signs() {
        let a = [0.5, 0.5, 0.5];
        let b = [0.4, 0.6, 0.5];
        let c = paired_comparison(&a, &b, 0.5).unwrap();
        assert!(c.mean_diff < 0.0);
        assert!(paired_comparison(&a, &b[..2], 0.5).is_err());
    }
}
