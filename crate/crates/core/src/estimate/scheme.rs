use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::minhash::{MinHashKind, MinHashScheme, PiSource, SigmaSource};
use crate::oph::{DonorSelection, OphScheme, ScanOrder, SplitterKind};

/// Any supported hashing scheme, independent of `K` and `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    MinHash {
        kind: MinHashKind,
        sigma: SigmaSource,
        pi: PiSource,
    },
    Oph(OphScheme),
}

impl Scheme {
    /// Canonical names of the base schemes.
    pub const NAMES: [&'static str; 11] = [
        "minhash",
        "cminhash-sigma-pi",
        "cminhash-pi-pi",
        "cminhash-2u-pi",
        "cminhash-sigma-2u",
        "oph-raw",
        "oph-copy",
        "reden",
        "reden-2u",
        "coph-sigma-pi",
        "coph-2u-pi",
    ];

    pub fn name(&self) -> String {
        match self {
            Scheme::MinHash { .. } => self.minhash(1).expect("minhash variant").name().to_string(),
            Scheme::Oph(s) => s.name(),
        }
    }

    /// The MinHash scheme with `hashes` outputs, if this is a MinHash variant.
    pub fn minhash(&self, hashes: usize) -> Option<MinHashScheme> {
        match *self {
            Scheme::MinHash { kind, sigma, pi } => Some(MinHashScheme {
                kind,
                sigma,
                pi,
                hashes,
            }),
            Scheme::Oph(_) => None,
        }
    }

    pub fn is_minhash(&self) -> bool {
        matches!(self, Scheme::MinHash { .. })
    }

    /// Whether the scheme's collision indicators are unbiased for `J` by construction.
    pub fn is_unbiased(&self) -> bool {
        match self {
            Scheme::MinHash { kind, sigma, pi } => {
                *kind == MinHashKind::Standard
                    || (*sigma == SigmaSource::ExactPermutation && *pi == PiSource::ExactPermutation)
            }
            Scheme::Oph(s) => {
                s.exact_split()
                    && matches!(
                        s.fill,
                        crate::oph::DensifyValue::ReRandomize | crate::oph::DensifyValue::Circulant
                    )
            }
        }
    }
}

impl From<OphScheme> for Scheme {
    fn from(s: OphScheme) -> Self {
        Scheme::Oph(s)
    }
}

impl From<MinHashScheme> for Scheme {
    fn from(s: MinHashScheme) -> Self {
        Scheme::MinHash {
            kind: s.kind,
            sigma: s.sigma,
            pi: s.pi,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split('+');
        let base = parts.next().unwrap_or_default();
        let circ = |sigma, pi| {
            Ok(Scheme::MinHash {
                kind: MinHashKind::Circulant,
                sigma,
                pi,
            })
        };
        let oph = |scheme: OphScheme| Ok::<_, Error>(Scheme::Oph(scheme));
        use PiSource as P;
        use SigmaSource as S;
        let two_u = SplitterKind::TwoUniversal;
        let mut scheme = match base {
            "minhash" => Ok(Scheme::MinHash {
                kind: MinHashKind::Standard,
                sigma: S::ExactPermutation,
                pi: P::ExactPermutation,
            }),
            "cminhash-sigma-pi" => circ(S::ExactPermutation, P::ExactPermutation),
            "cminhash-pi-pi" => circ(S::ReusePi, P::ExactPermutation),
            "cminhash-2u-pi" => circ(S::TwoUniversal, P::ExactPermutation),
            "cminhash-sigma-2u" => circ(S::ExactPermutation, P::TwoUniversal),
            "cminhash-2u-2u" => circ(S::TwoUniversal, P::TwoUniversal),
            "oph-raw" => oph(OphScheme::raw()),
            "oph-raw-2u" => oph(OphScheme::raw().with_splitter(two_u)),
            "oph-copy" => oph(OphScheme::copy()),
            "oph-copy-2u" => oph(OphScheme::copy().with_splitter(two_u)),
            "reden" => oph(OphScheme::reden()),
            "reden-2u" => oph(OphScheme::reden().with_splitter(two_u)),
            "coph-sigma-pi" | "coph" => oph(OphScheme::coph()),
            "coph-2u-pi" => oph(OphScheme::coph().with_splitter(two_u)),
            _ => Err(Error::InvalidParameter(format!("unknown scheme {base:?}"))),
        }?;
        for option in parts {
            let Scheme::Oph(o) = &mut scheme else {
                return Err(Error::InvalidParameter(format!(
                    "option {option:?} applies only to OPH schemes"
                )));
            };
            *o = match option {
                "uniform-scan" => o.with_scan(ScanOrder::UniformRandom),
                "clockwise" => o.with_donor(DonorSelection::ClockwiseRotation),
                "uniform-donor" => o.with_donor(DonorSelection::UniformRandom2U),
                "no-periodic-shift" => o.with_periodic_shift(false),
                _ => return Err(Error::InvalidParameter(format!("unknown scheme option {option:?}"))),
            };
        }
        Ok(scheme)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_roundtrip() {
        for name in Scheme::NAMES {
            let s: Scheme = name.parse().unwrap();
            assert_eq!(s.name(), name);
        }
        for name in [
            "coph-sigma-pi+uniform-scan+clockwise",
            "coph-2u-pi+no-periodic-shift",
            "oph-copy+uniform-donor",
        ] {
            let s: Scheme = name.parse().unwrap();
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("nope".parse::<Scheme>().is_err());
        assert!("minhash+clockwise".parse::<Scheme>().is_err());
        assert!("reden+bogus".parse::<Scheme>().is_err());
    }

    #[test]
    fn unbiased_flags() {
        let unbiased: Vec<&str> = Scheme::NAMES
            .iter()
            .copied()
            .filter(|n| n.parse::<Scheme>().unwrap().is_unbiased())
            .collect();
        assert_eq!(unbiased, vec!["minhash", "cminhash-sigma-pi", "reden", "coph-sigma-pi"]);
    }
}
