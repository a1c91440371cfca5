use super::{
    bin_split, densify, oph_first_scan, BinLayout, DensifyValue, DonorPlan, DonorSelection, OphScheme, ScanOrder,
    SlotHashes, Splitter, SplitterKind,
};
use crate::error::{Error, Result};
use crate::randomness::{derive_seed, splitmix64, stream_rng, Permutation, Role};
use crate::sketch::{Sketch, SketchMeta, Slot};
use crate::vectors::BinaryVector;

/// Bin scanned first by each of the `hashes` slots.
pub fn scan_order(scan: ScanOrder, bins: usize, hashes: usize, seed: u64) -> Vec<usize> {
    match scan {
        ScanOrder::RoundRobin => (0..hashes).map(|k| k % bins).collect(),
        ScanOrder::UniformRandom => {
            let base = derive_seed(seed, Role::Scan, 0);
            (0..hashes)
                .map(|k| ((splitmix64(base.wrapping_add(k as u64)) as u128 * bins as u128) >> 64) as usize)
                .collect()
        }
    }
}

/// Everything downstream of the bin split.
#[derive(Debug, Clone)]
pub(crate) struct Engine {
    pub fill: DensifyValue,
    pub scan: Vec<usize>,
    pub hashes: SlotHashes,
    pub donors: DonorPlan,
}

impl Engine {
    pub fn new(
        scheme: &OphScheme,
        bins: usize,
        width: usize,
        scan: Vec<usize>,
        hashes: SlotHashes,
        donors: DonorPlan,
    ) -> Result<Self> {
        let m = scan.len();
        if m == 0 {
            return Err(Error::InvalidParameter("need at least one hash value".into()));
        }
        if let Some(&b) = scan.iter().find(|&&b| b >= bins) {
            return Err(Error::IndexOutOfRange { index: b, dim: bins });
        }
        if hashes.width() != width {
            return Err(Error::DimensionMismatch {
                left: width,
                right: hashes.width(),
            });
        }
        if let Some(cap) = hashes.capacity() {
            if cap < m {
                return Err(Error::InvalidParameter(format!(
                    "slot hash family serves {cap} slots, {m} requested"
                )));
            }
        }
        let circulant = matches!(hashes, SlotHashes::Circulant { .. });
        if circulant != (scheme.fill == DensifyValue::Circulant) {
            return Err(Error::InvalidParameter(
                "circulant densification needs exactly one circulant permutation".into(),
            ));
        }
        if let SlotHashes::Circulant { periodic, .. } = &hashes {
            if !periodic && m > width {
                return Err(Error::InvalidParameter(format!(
                    "M·K exceeds the dimension ({m} > {width} hashes per bin) without the periodic shift"
                )));
            }
        }
        Ok(Self {
            fill: scheme.fill,
            scan,
            hashes,
            donors,
        })
    }

    pub fn hashes(&self) -> usize {
        self.scan.len()
    }

    pub fn sketch_layout(&self, layout: &BinLayout, out: &mut Vec<Slot>) -> Result<()> {
        if layout.total() == 0 {
            return Err(Error::EmptyVector);
        }
        oph_first_scan(layout, &self.scan, &self.hashes, out);
        densify(out, layout, &self.scan, self.fill, &self.hashes, &self.donors)
    }
}

/// An OPH-type scheme with all of its randomness fixed.
#[derive(Debug, Clone)]
pub struct OphHasher {
    scheme: OphScheme,
    splitter: Splitter,
    engine: Engine,
    seed: Option<u64>,
}

impl OphHasher {
    /// Draws `σ` (or the 2-universal split), the slot permutations and the donor
    /// stream from one master seed.
    ///
    /// With an exact split and non-circulant fill, the first `K` slots use the
    /// within-bin orders induced by `σ` and any further slots get independent
    /// permutations.
    pub fn from_seed(scheme: OphScheme, dim: usize, bins: usize, hashes: usize, seed: u64) -> Result<Self> {
        let splitter = Splitter::from_seed(scheme.splitter, dim, bins, seed)?;
        let width = splitter.width();
        let slot_perm = |k: usize| Permutation::random(width, &mut stream_rng(seed, Role::SlotPermutation, k as u64));
        let slot_hashes = match (scheme.fill, splitter.sigma()) {
            (DensifyValue::Circulant, _) => SlotHashes::circulant(
                Permutation::random(width, &mut stream_rng(seed, Role::Pi, 0))?,
                bins,
                scheme.periodic_shift,
            ),
            (_, Some(sigma)) => {
                let extra = (bins..hashes.max(bins)).map(slot_perm).collect::<Result<_>>()?;
                SlotHashes::implicit(sigma, bins, extra)?
            }
            (_, None) => SlotHashes::independent((0..hashes.max(1)).map(slot_perm).collect::<Result<_>>()?)?,
        };
        let donors = match scheme.donor {
            DonorSelection::ClockwiseRotation => DonorPlan::Clockwise,
            DonorSelection::UniformRandom2U => DonorPlan::Uniform { seed },
        };
        let scan = scan_order(scheme.scan, bins, hashes, seed);
        let mut hasher = Self::from_parts(scheme, splitter, slot_hashes, donors, scan)?;
        hasher.seed = Some(seed);
        Ok(hasher)
    }

    /// Assembles a hasher from explicit randomness, e.g. for exhaustive enumeration.
    pub fn from_parts(
        scheme: OphScheme,
        splitter: Splitter,
        slot_hashes: SlotHashes,
        donors: DonorPlan,
        scan: Vec<usize>,
    ) -> Result<Self> {
        if splitter.kind() != scheme.splitter {
            return Err(Error::InvalidParameter("splitter does not match the scheme".into()));
        }
        let engine = Engine::new(&scheme, splitter.bins(), splitter.width(), scan, slot_hashes, donors)?;
        Ok(Self {
            scheme,
            splitter,
            engine,
            seed: None,
        })
    }

    pub fn scheme(&self) -> &OphScheme {
        &self.scheme
    }

    pub fn splitter(&self) -> &Splitter {
        &self.splitter
    }

    pub fn slot_hashes(&self) -> &SlotHashes {
        &self.engine.hashes
    }

    pub fn hashes(&self) -> usize {
        self.engine.hashes()
    }

    pub fn layout(&self, v: &BinaryVector) -> Result<BinLayout> {
        bin_split(v, &self.splitter)
    }

    /// First pass only; empty bins stay `E`.
    pub fn first_scan(&self, layout: &BinLayout) -> Vec<Slot> {
        let mut out = Vec::with_capacity(self.hashes());
        oph_first_scan(layout, &self.engine.scan, &self.engine.hashes, &mut out);
        out
    }

    pub fn densify(&self, layout: &BinLayout, slots: &mut [Slot]) -> Result<()> {
        densify(
            slots,
            layout,
            &self.engine.scan,
            self.engine.fill,
            &self.engine.hashes,
            &self.engine.donors,
        )
    }

    pub fn meta(&self) -> SketchMeta {
        SketchMeta {
            scheme: self.scheme.name(),
            dim: self.splitter.dim(),
            bins: Some(self.splitter.bins()),
            hashes: self.hashes(),
            seed: self.seed,
            prime: self.splitter.prime(),
        }
    }

    pub fn sketch(&self, v: &BinaryVector) -> Result<Sketch> {
        let layout = self.layout(v)?;
        let mut slots = Vec::with_capacity(self.hashes());
        self.engine.sketch_layout(&layout, &mut slots)?;
        Sketch::new(self.meta(), slots)
    }
}

/// Bin split, first scan and densification in one call.
pub fn oph_sketch(v: &BinaryVector, scheme: OphScheme, bins: usize, hashes: usize, seed: u64) -> Result<Sketch> {
    OphHasher::from_seed(scheme, v.dim(), bins, hashes, seed)?.sketch(v)
}

impl OphScheme {
    /// Whether the split is an exact permutation.
    pub fn exact_split(&self) -> bool {
        self.splitter == SplitterKind::ExactPermutation
    }
}
