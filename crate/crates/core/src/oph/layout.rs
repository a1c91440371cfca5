use crate::error::{Error, Result};
use crate::randomness::{derive_seed, stream_rng, Permutation, Role, TwoUniversalHash};
use crate::vectors::BinaryVector;

/// Bin width after padding `dim` up to a multiple of `bins`.
pub fn bin_width(dim: usize, bins: usize) -> usize {
    dim.div_ceil(bins)
}

/// Occupied local offsets of each bin, in CSR form.
///
/// Offsets are 0-indexed: the element at permuted position `q` lies in bin
/// `q / d` at offset `q % d`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BinLayout {
    bins: usize,
    width: usize,
    starts: Vec<usize>,
    offsets: Vec<usize>,
}

impl BinLayout {
    /// Builds a layout from `(bin, offset)` pairs.
    pub fn from_placements<I>(bins: usize, width: usize, placements: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
        I::IntoIter: Clone,
    {
        let mut layout = Self::default();
        layout.refill(bins, width, placements)?;
        Ok(layout)
    }

    /// Rebuilds in place, reusing the allocations.
    pub fn refill<I>(&mut self, bins: usize, width: usize, placements: I) -> Result<()>
    where
        I: IntoIterator<Item = (usize, usize)>,
        I::IntoIter: Clone,
    {
        if bins == 0 || width == 0 {
            return Err(Error::InvalidParameter("bin count and width must be positive".into()));
        }
        let iter = placements.into_iter();
        self.bins = bins;
        self.width = width;
        self.starts.clear();
        self.starts.resize(bins + 1, 0);
        let mut n = 0;
        for (b, o) in iter.clone() {
            if b >= bins || o >= width {
                return Err(Error::IndexOutOfRange {
                    index: b * width + o,
                    dim: bins * width,
                });
            }
            self.starts[b + 1] += 1;
            n += 1;
        }
        for b in 0..bins {
            self.starts[b + 1] += self.starts[b];
        }
        self.offsets.clear();
        self.offsets.resize(n, 0);
        let mut cursor: Vec<usize> = self.starts[..bins].to_vec();
        for (b, o) in iter {
            self.offsets[cursor[b]] = o;
            cursor[b] += 1;
        }
        Ok(())
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Local offsets occupied in bin `b`, in insertion order.
    #[inline]
    pub fn bin(&self, b: usize) -> &[usize] {
        &self.offsets[self.starts[b]..self.starts[b + 1]]
    }

    #[inline]
    pub fn is_bin_empty(&self, b: usize) -> bool {
        self.starts[b] == self.starts[b + 1]
    }

    pub fn occupancy(&self) -> Vec<usize> {
        self.starts.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn non_empty_bins(&self) -> usize {
        (0..self.bins).filter(|&b| !self.is_bin_empty(b)).count()
    }

    pub fn total(&self) -> usize {
        self.offsets.len()
    }
}

/// How split randomness is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplitterKind {
    ExactPermutation,
    TwoUniversal,
}

#[derive(Debug, Clone)]
enum SplitMap {
    Permutation(Permutation),
    TwoUniversal(TwoUniversalHash),
}

/// Maps each index of `[0, D)` to a `(bin, offset)` pair.
#[derive(Debug, Clone)]
pub struct Splitter {
    dim: usize,
    bins: usize,
    width: usize,
    map: SplitMap,
}

fn check_bins(dim: usize, bins: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    if bins == 0 || bins > dim {
        return Err(Error::InvalidParameter(format!(
            "bin count {bins} must lie in [1, {dim}]"
        )));
    }
    Ok(())
}

impl Splitter {
    /// Exact split by `sigma`, a permutation of the padded dimension `K·⌈D/K⌉`.
    pub fn permutation(dim: usize, bins: usize, sigma: Permutation) -> Result<Self> {
        check_bins(dim, bins)?;
        let width = bin_width(dim, bins);
        if sigma.len() != bins * width {
            return Err(Error::DimensionMismatch {
                left: bins * width,
                right: sigma.len(),
            });
        }
        Ok(Self {
            dim,
            bins,
            width,
            map: SplitMap::Permutation(sigma),
        })
    }

    /// Split by `H(j)`: bin `⌊H·K/p⌋`, offset from the remainder scaled to `[0, d)`.
    pub fn two_universal(dim: usize, bins: usize, hash: TwoUniversalHash) -> Result<Self> {
        check_bins(dim, bins)?;
        if hash.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: hash.dim(),
            });
        }
        Ok(Self {
            dim,
            bins,
            width: bin_width(dim, bins),
            map: SplitMap::TwoUniversal(hash),
        })
    }

    pub fn from_seed(kind: SplitterKind, dim: usize, bins: usize, seed: u64) -> Result<Self> {
        check_bins(dim, bins)?;
        match kind {
            SplitterKind::ExactPermutation => {
                let padded = bins * bin_width(dim, bins);
                let sigma = Permutation::random(padded, &mut stream_rng(seed, Role::Sigma, 0))?;
                Self::permutation(dim, bins, sigma)
            }
            SplitterKind::TwoUniversal => {
                let h = TwoUniversalHash::new(dim, derive_seed(seed, Role::Sigma, 0))?;
                Self::two_universal(dim, bins, h)
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn kind(&self) -> SplitterKind {
        match self.map {
            SplitMap::Permutation(_) => SplitterKind::ExactPermutation,
            SplitMap::TwoUniversal(_) => SplitterKind::TwoUniversal,
        }
    }

    pub fn sigma(&self) -> Option<&Permutation> {
        match &self.map {
            SplitMap::Permutation(p) => Some(p),
            SplitMap::TwoUniversal(_) => None,
        }
    }

    pub fn prime(&self) -> Option<u64> {
        match &self.map {
            SplitMap::Permutation(_) => None,
            SplitMap::TwoUniversal(h) => Some(h.p()),
        }
    }

    /// `(bin, offset)` of index `i < dim`.
    #[inline]
    pub fn place(&self, i: usize) -> (usize, usize) {
        match &self.map {
            SplitMap::Permutation(p) => {
                let q = p.apply(i);
                (q / self.width, q % self.width)
            }
            SplitMap::TwoUniversal(h) => two_universal_place(h.eval_unchecked(i as u64), h.p(), self.bins, self.width),
        }
    }
}

#[inline]
pub(crate) fn two_universal_place(hash: u64, p: u64, bins: usize, width: usize) -> (usize, usize) {
    let u = hash as u128 * bins as u128;
    let p = p as u128;
    let bin = (u / p) as usize;
    let offset = ((u % p) * width as u128 / p) as usize;
    (bin, offset)
}

/// Splits the support of `v` into bins.
pub fn bin_split(v: &BinaryVector, splitter: &Splitter) -> Result<BinLayout> {
    if v.dim() != splitter.dim {
        return Err(Error::DimensionMismatch {
            left: splitter.dim,
            right: v.dim(),
        });
    }
    BinLayout::from_placements(
        splitter.bins,
        splitter.width,
        v.support().iter().map(|&i| splitter.place(i)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_bin_holds_everything() {
        let v = BinaryVector::new(10, vec![1, 4, 9]).unwrap();
        let s = Splitter::from_seed(SplitterKind::ExactPermutation, 10, 1, 3).unwrap();
        let layout = bin_split(&v, &s).unwrap();
        assert_eq!(layout.occupancy(), vec![3]);
    }

    #[test]
    fn identity_split() {
        let s = Splitter::permutation(8, 4, Permutation::identity(8).unwrap()).unwrap();
        let v = BinaryVector::new(8, vec![0, 1, 3, 6]).unwrap();
        let layout = bin_split(&v, &s).unwrap();
        assert_eq!(layout.bin(0), &[0, 1]);
        assert_eq!(layout.bin(1), &[1]);
        assert!(layout.is_bin_empty(2));
        assert_eq!(layout.bin(3), &[0]);
        for i in 0..8 {
            assert_eq!(s.place(i), (i / 2, i % 2));
        }
    }

    #[test]
    fn padding_and_errors() {
        assert_eq!(bin_width(10, 4), 3);
        let s = Splitter::from_seed(SplitterKind::ExactPermutation, 10, 4, 1).unwrap();
        assert_eq!(s.sigma().unwrap().len(), 12);
        assert!(Splitter::from_seed(SplitterKind::ExactPermutation, 4, 5, 1).is_err());
        assert!(Splitter::permutation(10, 4, Permutation::identity(10).unwrap()).is_err());
        assert!(BinLayout::from_placements(2, 2, [(2, 0)]).is_err());
    }

    #[test]
    fn two_universal_places_in_range() {
        let h = TwoUniversalHash::new(1000, 4).unwrap();
        let s = Splitter::two_universal(1000, 7, h).unwrap();
        let mut counts = vec![0; 7];
        for i in 0..1000 {
            let (b, o) = s.place(i);
            assert!(o < s.width());
            counts[b] += 1;
        }
        // Contiguous hash ranges of width p/K.
        for c in counts {
            assert!((135..=145).contains(&c), "{c}");
        }
    }

    proptest! {
        #[test]
        fn occupancy_sums_to_support(
            dim in 1usize..200,
            bins_frac in 0.0f64..1.0,
            seed in any::<u64>(),
            two_u in any::<bool>(),
        ) {
            let bins = 1 + ((dim - 1) as f64 * bins_frac) as usize;
            let kind = if two_u { SplitterKind::TwoUniversal } else { SplitterKind::ExactPermutation };
            let s = Splitter::from_seed(kind, dim, bins, seed).unwrap();
            let support: Vec<usize> = (0..dim).filter(|i| (i * 7 + seed as usize) % 3 == 0).collect();
            let v = BinaryVector::new(dim, support).unwrap();
            let layout = bin_split(&v, &s).unwrap();
            prop_assert_eq!(layout.occupancy().iter().sum::<usize>(), v.nnz());
            if !two_u {
                // An exact split never puts two indices at one position.
                let mut seen = std::collections::HashSet::new();
                for b in 0..bins {
                    for &o in layout.bin(b) {
                        prop_assert!(seen.insert((b, o)));
                    }
                }
            }
        }
    }
}
