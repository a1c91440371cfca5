use std::cell::RefCell;

use super::{BinLayout, DensifyValue};
use crate::error::{Error, Result};
use crate::randomness::{derive_seed, splitmix64, Permutation, Role};
use crate::sketch::Slot;

/// The bin-width hash family used by each output slot.
#[derive(Debug, Clone)]
pub enum SlotHashes {
    /// One explicit permutation of `[0, d)` per slot.
    Independent(Vec<Permutation>),
    /// One permutation of `[0, d)` per slot, generated lazily: `π^(k)` is the
    /// Fisher-Yates ordering driven by the counter stream `(seed, k)`, and a
    /// bin minimum only unrolls the ordering until it meets an occupied offset.
    Seeded { seed: u64, width: usize },
    /// Within-bin orders induced by the split permutation `σ`.
    ///
    /// Slot `k < K` maps offset `o` of bin `b` to `τ_k(τ_b⁻¹(o))`, where
    /// `τ_b(r)` is the offset that `σ` gives the `r`-th smallest preimage of
    /// bin `b`. Slots `k ≥ K` use `extra[k − K]`.
    Implicit {
        bins: usize,
        width: usize,
        tau: Vec<usize>,
        tau_inv: Vec<usize>,
        extra: Vec<Permutation>,
    },
    /// Slot `k` uses `π` shifted rightwards by `k + 1` (plus `⌊(k+1)/K⌋` when
    /// the periodic shift is active).
    Circulant {
        pi: Permutation,
        bins: usize,
        periodic: bool,
    },
}

impl SlotHashes {
    pub fn independent(perms: Vec<Permutation>) -> Result<Self> {
        let width = perms
            .first()
            .map(Permutation::len)
            .ok_or_else(|| Error::InvalidParameter("need at least one permutation".into()))?;
        if let Some(p) = perms.iter().find(|p| p.len() != width) {
            return Err(Error::DimensionMismatch {
                left: width,
                right: p.len(),
            });
        }
        Ok(Self::Independent(perms))
    }

    /// Derives per-bin orders from `sigma`, a permutation of `bins · width`.
    pub fn implicit(sigma: &Permutation, bins: usize, extra: Vec<Permutation>) -> Result<Self> {
        if bins == 0 || sigma.len() % bins != 0 {
            return Err(Error::InvalidParameter(format!(
                "{} positions do not split into {bins} bins",
                sigma.len()
            )));
        }
        let width = sigma.len() / bins;
        if let Some(p) = extra.iter().find(|p| p.len() != width) {
            return Err(Error::DimensionMismatch {
                left: width,
                right: p.len(),
            });
        }
        let mut tau = vec![0; sigma.len()];
        let mut tau_inv = vec![0; sigma.len()];
        let mut filled = vec![0; bins];
        for &q in sigma.table() {
            let (b, o) = (q / width, q % width);
            let r = filled[b];
            filled[b] += 1;
            tau[b * width + r] = o;
            tau_inv[b * width + o] = r;
        }
        Ok(Self::Implicit {
            bins,
            width,
            tau,
            tau_inv,
            extra,
        })
    }

    pub fn circulant(pi: Permutation, bins: usize, periodic: bool) -> Self {
        Self::Circulant { pi, bins, periodic }
    }

    pub fn width(&self) -> usize {
        match self {
            Self::Independent(p) => p[0].len(),
            Self::Seeded { width, .. } => *width,
            Self::Implicit { width, .. } => *width,
            Self::Circulant { pi, .. } => pi.len(),
        }
    }

    /// Number of slots this family can serve; `None` if unbounded.
    pub fn capacity(&self) -> Option<usize> {
        match self {
            Self::Independent(p) => Some(p.len()),
            Self::Seeded { .. } => None,
            Self::Implicit { bins, extra, .. } => Some(bins + extra.len()),
            Self::Circulant { .. } => None,
        }
    }

    /// Rightward shift of slot `k` (0-indexed) for a sketch of `hashes` values.
    pub fn circulant_shift(&self, slot: usize, hashes: usize) -> Option<usize> {
        match self {
            Self::Circulant { pi, bins, periodic } => {
                let kappa = slot + 1;
                let extra = if *periodic && hashes * bins > bins * pi.len() {
                    kappa / bins
                } else {
                    0
                };
                Some(kappa + extra)
            }
            _ => None,
        }
    }

    /// Hash of local offset `o` in bin `b` under slot `k`; `hashes` is the sketch length.
    #[inline]
    pub fn local(&self, slot: usize, bin: usize, offset: usize, hashes: usize) -> usize {
        match self {
            Self::Independent(p) => p[slot].apply(offset),
            Self::Seeded { seed, width } => {
                seeded_first_hit(*seed, slot, *width, |o| o == offset).expect("offset below width")
            }
            Self::Implicit {
                bins,
                width,
                tau,
                tau_inv,
                extra,
            } => {
                if slot < *bins {
                    tau[slot * width + tau_inv[bin * width + offset]]
                } else {
                    extra[slot - bins].apply(offset)
                }
            }
            Self::Circulant { pi, .. } => {
                let shift = self.circulant_shift(slot, hashes).unwrap_or(0);
                pi.rotated(shift).apply(offset)
            }
        }
    }

    /// `min` of [`Self::local`] over the offsets of bin `b`; `None` if the bin is empty.
    #[inline]
    pub(crate) fn bin_min(&self, slot: usize, bin: usize, offsets: &[usize], hashes: usize) -> Option<usize> {
        match self {
            Self::Circulant { pi, .. } => {
                let d = pi.len();
                let back = d - self.circulant_shift(slot, hashes).unwrap_or(0) % d;
                let table = pi.table();
                offsets
                    .iter()
                    .map(|&o| {
                        let mut i = o + back;
                        if i >= d {
                            i -= d;
                        }
                        table[i]
                    })
                    .min()
            }
            Self::Independent(p) => {
                let t = p[slot].table();
                offsets.iter().map(|&o| t[o]).min()
            }
            Self::Seeded { seed, width } => {
                if offsets.is_empty() {
                    return None;
                }
                MASK.with(|m| {
                    let mut mask = m.borrow_mut();
                    mask.clear();
                    mask.resize(*width, false);
                    for &o in offsets {
                        mask[o] = true;
                    }
                    seeded_first_hit(*seed, slot, *width, |o| mask[o])
                })
            }
            _ => offsets.iter().map(|&o| self.local(slot, bin, o, hashes)).min(),
        }
    }
}

thread_local! {
    static ORDER: RefCell<Vec<usize>> = const { RefCell::new(Vec::new()) };
    static MASK: RefCell<Vec<bool>> = const { RefCell::new(Vec::new()) };
}

/// Smallest `t` with `hit(π⁻¹(t))` under the seeded permutation of slot `slot`.
fn seeded_first_hit(seed: u64, slot: usize, width: usize, hit: impl Fn(usize) -> bool) -> Option<usize> {
    let base = derive_seed(seed, Role::SlotPermutation, slot as u64);
    ORDER.with(|cell| {
        let mut order = cell.borrow_mut();
        order.clear();
        order.extend(0..width);
        for t in 0..width {
            let j = t + reduce(splitmix64(base.wrapping_add(t as u64)), width - t);
            order.swap(t, j);
            if hit(order[t]) {
                return Some(t);
            }
        }
        None
    })
}

/// How densification picks a donor bin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DonorPlan {
    /// Scan `i+1, i+2, …` (mod K) from the slot's own bin `i`.
    Clockwise,
    /// Rejection over a uniform candidate stream keyed by `(seed, slot)`.
    Uniform { seed: u64 },
    /// Explicit candidate sequence per slot; the first non-empty bin wins.
    Orders(Vec<Vec<usize>>),
}

#[inline]
fn reduce(x: u64, n: usize) -> usize {
    ((x as u128 * n as u128) >> 64) as usize
}

impl DonorPlan {
    /// Donor for `slot`, whose scanned bin `scanned` is empty in `layout`.
    pub fn pick(&self, slot: usize, scanned: usize, layout: &BinLayout) -> Option<usize> {
        let k = layout.bins();
        match self {
            DonorPlan::Clockwise => (1..k)
                .map(|step| (scanned + step) % k)
                .find(|&b| !layout.is_bin_empty(b)),
            DonorPlan::Uniform { seed } => {
                if layout.total() == 0 {
                    return None;
                }
                let base = derive_seed(*seed, Role::Donor, slot as u64);
                (0..(64 * k as u64).max(1 << 16))
                    .map(|t| reduce(splitmix64(base.wrapping_add(t)), k))
                    .find(|&b| !layout.is_bin_empty(b))
                    .or_else(|| DonorPlan::Clockwise.pick(slot, scanned, layout))
            }
            DonorPlan::Orders(orders) => orders
                .get(slot)?
                .iter()
                .copied()
                .find(|&b| b < k && !layout.is_bin_empty(b)),
        }
    }
}

/// First pass: slot `k` min-hashes bin `scan[k]`, offset into `[b·d, (b+1)·d)`; empty bins give `E`.
pub fn oph_first_scan(layout: &BinLayout, scan: &[usize], hashes: &SlotHashes, out: &mut Vec<Slot>) {
    let d = layout.width();
    let m = scan.len();
    out.clear();
    out.extend(
        scan.iter()
            .enumerate()
            .map(|(k, &b)| match hashes.bin_min(k, b, layout.bin(b), m) {
                Some(h) => Slot::value((h + b * d) as u64),
                None => Slot::EMPTY,
            }),
    );
}

/// Fills every `E` slot from a donor bin according to `fill`.
pub fn densify(
    slots: &mut [Slot],
    layout: &BinLayout,
    scan: &[usize],
    fill: DensifyValue,
    hashes: &SlotHashes,
    donors: &DonorPlan,
) -> Result<()> {
    if layout.total() == 0 {
        return Err(Error::EmptyVector);
    }
    if fill == DensifyValue::None {
        return Ok(());
    }
    let d = layout.width();
    let m = slots.len();
    for k in 0..m {
        if !slots[k].is_empty() {
            continue;
        }
        let b = donors
            .pick(k, scan[k], layout)
            .ok_or_else(|| Error::InvalidParameter(format!("no donor available for slot {k}")))?;
        let hash_slot = if fill == DensifyValue::Copy { b % m } else { k };
        let h = hashes
            .bin_min(hash_slot, b, layout.bin(b), m)
            .expect("donor bins are non-empty");
        slots[k] = Slot::value((h + b * d) as u64);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn implicit_is_identity_on_own_bin() {
        let sigma = Permutation::from_seed(12, 5).unwrap();
        let h = SlotHashes::implicit(&sigma, 3, vec![]).unwrap();
        for b in 0..3 {
            for o in 0..4 {
                assert_eq!(h.local(b, b, o, 3), o);
            }
        }
        // Cross-bin maps are bijections.
        for k in 0..3 {
            for b in 0..3 {
                let mut img: Vec<usize> = (0..4).map(|o| h.local(k, b, o, 3)).collect();
                img.sort_unstable();
                assert_eq!(img, vec![0, 1, 2, 3]);
            }
        }
        assert_eq!(h.capacity(), Some(3));
    }

    #[test]
    fn seeded_slots_are_uniform_permutations() {
        let h = SlotHashes::Seeded { seed: 4, width: 5 };
        let mut counts = std::collections::HashMap::new();
        for slot in 0..24_000 {
            let img: Vec<usize> = (0..5).map(|o| h.local(slot, 0, o, 1)).collect();
            let mut sorted = img.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, vec![0, 1, 2, 3, 4]);
            assert_eq!(h.bin_min(slot, 0, &[1, 3], 1), Some(img[1].min(img[3])));
            *counts.entry(img).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 120);
        // 200 expected per permutation; 5 standard deviations is about 70.
        assert!(counts.values().all(|&c| (130..=270).contains(&c)), "{counts:?}");
    }

    #[test]
    fn periodic_shift_example() {
        // M = 2K and d = M/2: bin 0 is visited by slots 0 and K.
        let k = 8;
        let d = k;
        let pi = Permutation::from_seed(d, 1).unwrap();
        let with = SlotHashes::circulant(pi.clone(), k, true);
        let without = SlotHashes::circulant(pi.clone(), k, false);
        let m = 2 * k;
        assert_eq!(with.circulant_shift(0, m), Some(1));
        assert_eq!(with.circulant_shift(k, m), Some(d + 2));
        assert_eq!(without.circulant_shift(k, m), Some(d + 1));
        let first: Vec<usize> = (0..d).map(|o| with.local(0, 0, o, m)).collect();
        let second: Vec<usize> = (0..d).map(|o| with.local(k, 0, o, m)).collect();
        let repeated: Vec<usize> = (0..d).map(|o| without.local(k, 0, o, m)).collect();
        assert_ne!(first, second);
        assert_eq!(first, repeated);
        // Gated off when M·K fits in the dimension.
        assert_eq!(with.circulant_shift(k - 1, k), Some(k));
    }

    #[test]
    fn donor_rules() {
        let layout = BinLayout::from_placements(4, 2, [(1, 0), (3, 1)]).unwrap();
        assert_eq!(DonorPlan::Clockwise.pick(0, 0, &layout), Some(1));
        assert_eq!(DonorPlan::Clockwise.pick(2, 2, &layout), Some(3));
        let orders = DonorPlan::Orders(vec![vec![2, 0, 3, 1]]);
        assert_eq!(orders.pick(0, 0, &layout), Some(3));
        let uniform = DonorPlan::Uniform { seed: 9 };
        let mut seen = [0usize; 4];
        for slot in 0..2000 {
            seen[uniform.pick(slot, 0, &layout).unwrap()] += 1;
        }
        assert_eq!(seen[0] + seen[2], 0);
        assert!(seen[1] > 900 && seen[3] > 900, "{seen:?}");
    }

    #[test]
    fn first_scan_and_densify() {
        let layout = BinLayout::from_placements(4, 4, [(1, 2), (2, 0), (2, 3), (3, 1)]).unwrap();
        let hashes = SlotHashes::implicit(&Permutation::identity(16).unwrap(), 4, vec![]).unwrap();
        let scan = [0, 1, 2, 3];
        let mut slots = Vec::new();
        oph_first_scan(&layout, &scan, &hashes, &mut slots);
        assert_eq!(format!("{slots:?}"), "[E, 6, 8, 13]");
        let mut raw = slots.clone();
        densify(
            &mut raw,
            &layout,
            &scan,
            DensifyValue::None,
            &hashes,
            &DonorPlan::Clockwise,
        )
        .unwrap();
        assert_eq!(raw, slots);
        densify(
            &mut slots,
            &layout,
            &scan,
            DensifyValue::Copy,
            &hashes,
            &DonorPlan::Clockwise,
        )
        .unwrap();
        assert_eq!(format!("{slots:?}"), "[6, 6, 8, 13]");
        let empty = BinLayout::from_placements(4, 4, []).unwrap();
        assert!(densify(
            &mut slots,
            &empty,
            &scan,
            DensifyValue::Copy,
            &hashes,
            &DonorPlan::Clockwise
        )
        .is_err());
    }
}
