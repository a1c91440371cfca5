//! One permutation hashing: bin split, first scan, and densification by
//! copying, independent re-randomization, or circulant shifts of one
//! bin-width permutation.

mod hasher;
mod hashing;
mod layout;

pub use hasher::{oph_sketch, scan_order, OphHasher};
pub use hashing::{densify, oph_first_scan, DonorPlan, SlotHashes};
pub use layout::{bin_split, bin_width, BinLayout, Splitter, SplitterKind};

pub(crate) use hasher::Engine;
pub(crate) use layout::two_universal_place;

/// Which bin each output slot scans first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScanOrder {
    /// Slot `k` scans bin `k mod K`.
    RoundRobin,
    /// Slot `k` scans a bin drawn uniformly from `[K]`.
    UniformRandom,
}

/// How a donor bin is chosen for an empty slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DonorSelection {
    /// Nearest non-empty bin to the right, wrapping around.
    ClockwiseRotation,
    /// First non-empty bin in a seeded uniform candidate stream keyed by slot.
    UniformRandom2U,
}

/// How an empty slot is filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DensifyValue {
    /// Keep the empty marker.
    None,
    /// Copy the donor bin's own hash value.
    Copy,
    /// Hash the donor bin with the slot's independent permutation.
    ReRandomize,
    /// Hash the donor bin with the slot's circulant shift of one permutation.
    Circulant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OphScheme {
    pub scan: ScanOrder,
    pub donor: DonorSelection,
    pub fill: DensifyValue,
    pub splitter: SplitterKind,
    /// Adds `⌊k/K⌋` to the `k`-th circulant shift when `M·K` exceeds the padded dimension.
    pub periodic_shift: bool,
}

impl OphScheme {
    const fn base(fill: DensifyValue, donor: DonorSelection) -> Self {
        Self {
            scan: ScanOrder::RoundRobin,
            donor,
            fill,
            splitter: SplitterKind::ExactPermutation,
            periodic_shift: true,
        }
    }

    /// OPH without densification.
    pub const fn raw() -> Self {
        Self::base(DensifyValue::None, DonorSelection::ClockwiseRotation)
    }

    /// Rotation densification copying the nearest non-empty bin.
    pub const fn copy() -> Self {
        Self::base(DensifyValue::Copy, DonorSelection::ClockwiseRotation)
    }

    /// Re-randomized densification.
    pub const fn reden() -> Self {
        Self::base(DensifyValue::ReRandomize, DonorSelection::UniformRandom2U)
    }

    /// Circulant OPH.
    pub const fn coph() -> Self {
        Self::base(DensifyValue::Circulant, DonorSelection::UniformRandom2U)
    }

    pub const fn with_splitter(mut self, splitter: SplitterKind) -> Self {
        self.splitter = splitter;
        self
    }

    pub const fn with_scan(mut self, scan: ScanOrder) -> Self {
        self.scan = scan;
        self
    }

    pub const fn with_donor(mut self, donor: DonorSelection) -> Self {
        self.donor = donor;
        self
    }

    pub const fn with_periodic_shift(mut self, on: bool) -> Self {
        self.periodic_shift = on;
        self
    }

    fn default_donor(&self) -> DonorSelection {
        match self.fill {
            DensifyValue::None | DensifyValue::Copy => DonorSelection::ClockwiseRotation,
            _ => DonorSelection::UniformRandom2U,
        }
    }

    /// Canonical name; non-default options are appended as `+option`.
    pub fn name(&self) -> String {
        let two_u = self.splitter == SplitterKind::TwoUniversal;
        let mut name = match (self.fill, two_u) {
            (DensifyValue::None, false) => "oph-raw",
            (DensifyValue::None, true) => "oph-raw-2u",
            (DensifyValue::Copy, false) => "oph-copy",
            (DensifyValue::Copy, true) => "oph-copy-2u",
            (DensifyValue::ReRandomize, false) => "reden",
            (DensifyValue::ReRandomize, true) => "reden-2u",
            (DensifyValue::Circulant, false) => "coph-sigma-pi",
            (DensifyValue::Circulant, true) => "coph-2u-pi",
        }
        .to_string();
        if self.scan == ScanOrder::UniformRandom {
            name.push_str("+uniform-scan");
        }
        if self.fill != DensifyValue::None && self.donor != self.default_donor() {
            name.push_str(match self.donor {
                DonorSelection::ClockwiseRotation => "+clockwise",
                DonorSelection::UniformRandom2U => "+uniform-donor",
            });
        }
        if self.fill == DensifyValue::Circulant && !self.periodic_shift {
            name.push_str("+no-periodic-shift");
        }
        name
    }
}
