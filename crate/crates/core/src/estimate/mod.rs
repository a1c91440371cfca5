//! The collision estimator, streaming moments, named schemes and the Monte
//! Carlo trial harness.

mod moments;
mod scheme;
mod stats;
mod trials;

pub use moments::Moments;
pub use scheme::Scheme;
pub use stats::{read_stats_csv, write_stats_csv, TrialStats, STATS_CSV_HEADER};
pub use trials::{paired_comparison, run_trials, trial_estimates, PairedComparison, TrialPair};

use crate::error::{Error, Result};
use crate::sketch::{Sketch, Slot};

/// Fraction of colliding slots.
///
/// Sketches containing empty markers are compared in raw mode: slots empty in
/// both sketches are skipped and a slot empty in only one counts as a
/// non-collision.
pub fn estimate_jaccard(s1: &Sketch, s2: &Sketch) -> Result<f64> {
    if s1.meta() != s2.meta() {
        return Err(Error::SketchMismatch(format!("{:?} vs {:?}", s1.meta(), s2.meta())));
    }
    estimate_slots(s1.slots(), s2.slots())
}

pub(crate) fn estimate_slots(a: &[Slot], b: &[Slot]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::SketchMismatch(format!("lengths {} and {}", a.len(), b.len())));
    }
    let (mut usable, mut hits) = (0usize, 0usize);
    for (x, y) in a.iter().zip(b) {
        if x.is_empty() && y.is_empty() {
            continue;
        }
        usable += 1;
        hits += (x == y) as usize;
    }
    if usable == 0 {
        return Err(Error::NoUsableSlots);
    }
    Ok(hits as f64 / usable as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sketch::SketchMeta;

    fn sk(values: &[Option<u64>]) -> Sketch {
        let meta = SketchMeta {
            scheme: "reden".into(),
            dim: 64,
            bins: Some(4),
            hashes: values.len(),
            seed: Some(1),
            prime: None,
        };
        let slots = values.iter().map(|v| v.map_or(Slot::EMPTY, Slot::value)).collect();
        Sketch::new(meta, slots).unwrap()
    }

    #[test]
    fn estimator_examples() {
        let a = sk(&[Some(1), Some(2), Some(3), Some(4)]);
        assert_eq!(estimate_jaccard(&a, &a).unwrap(), 1.0);
        let b = sk(&[Some(5), Some(6), Some(7), Some(8)]);
        assert_eq!(estimate_jaccard(&a, &b).unwrap(), 0.0);
        let c = sk(&[Some(1), Some(6), Some(7), Some(8)]);
        assert_eq!(estimate_jaccard(&a, &c).unwrap(), 0.25);
    }

    #[test]
    fn raw_mode() {
        let a = sk(&[None, Some(2), None, Some(4)]);
        let b = sk(&[None, Some(2), Some(9), Some(5)]);
        assert!((estimate_jaccard(&a, &b).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let e = sk(&[None, None]);
        assert!(matches!(estimate_jaccard(&e, &e), Err(Error::NoUsableSlots)));
    }

    #[test]
    fn mismatch() {
        let a = sk(&[Some(1)]);
        let b = sk(&[Some(1), Some(2)]);
        assert!(matches!(estimate_jaccard(&a, &b), Err(Error::SketchMismatch(_))));
    }
}
