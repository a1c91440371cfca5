//! Standard MinHash and circulant MinHash with exact or 2-universal randomness.

use crate::error::{Error, Result};
use crate::randomness::{derive_seed, stream_rng, Permutation, Role, TwoUniversalHash};
use crate::sketch::{Sketch, SketchMeta, Slot};
use crate::vectors::BinaryVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MinHashKind {
    /// `K` independent permutations.
    Standard,
    /// One initial permutation `σ`, then `K` circulant shifts of `π`.
    Circulant,
}

/// Source of the initial relocation `σ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SigmaSource {
    ExactPermutation,
    /// Ordering of `[0, D)` by a 2-universal hash.
    TwoUniversal,
    /// Use `π` itself as `σ`.
    ReusePi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PiSource {
    ExactPermutation,
    /// A fresh 2-universal hash per output value.
    TwoUniversal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MinHashScheme {
    pub kind: MinHashKind,
    pub sigma: SigmaSource,
    pub pi: PiSource,
    pub hashes: usize,
}

impl MinHashScheme {
    pub fn standard(hashes: usize) -> Self {
        Self {
            kind: MinHashKind::Standard,
            sigma: SigmaSource::ExactPermutation,
            pi: PiSource::ExactPermutation,
            hashes,
        }
    }

    pub fn circulant(sigma: SigmaSource, pi: PiSource, hashes: usize) -> Result<Self> {
        if sigma == SigmaSource::ReusePi && pi != PiSource::ExactPermutation {
            return Err(Error::InvalidParameter(
                "reusing pi as sigma requires an exact pi".into(),
            ));
        }
        Ok(Self {
            kind: MinHashKind::Circulant,
            sigma,
            pi,
            hashes,
        })
    }

    pub fn name(&self) -> &'static str {
        use PiSource as P;
        use SigmaSource as S;
        match (self.kind, self.sigma, self.pi) {
            (MinHashKind::Standard, _, _) => "minhash",
            (_, S::ExactPermutation, P::ExactPermutation) => "cminhash-sigma-pi",
            (_, S::ReusePi, _) => "cminhash-pi-pi",
            (_, S::TwoUniversal, P::ExactPermutation) => "cminhash-2u-pi",
            (_, S::ExactPermutation, P::TwoUniversal) => "cminhash-sigma-2u",
            (_, S::TwoUniversal, P::TwoUniversal) => "cminhash-2u-2u",
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if self.hashes == 0 {
            return Err(Error::InvalidParameter("need at least one hash".into()));
        }
        if self.kind == MinHashKind::Circulant && self.hashes > dim {
            return Err(Error::InvalidParameter(format!(
                "K={} exceeds D={dim}: circulant shifts would repeat",
                self.hashes
            )));
        }
        Ok(())
    }
}

/// Initial relocation applied before circulant hashing.
#[derive(Debug, Clone, Copy)]
pub enum Sigma<'a> {
    Permutation(&'a Permutation),
    TwoUniversal(&'a TwoUniversalHash),
}

impl Sigma<'_> {
    fn dim(&self) -> usize {
        match self {
            Sigma::Permutation(p) => p.len(),
            Sigma::TwoUniversal(h) => h.dim(),
        }
    }

    #[inline]
    pub(crate) fn relocate(&self, i: usize) -> usize {
        match self {
            Sigma::Permutation(p) => p.apply(i),
            Sigma::TwoUniversal(h) => h.rank(i).expect("index checked against dim"),
        }
    }
}

/// Hash family shifted (or replaced) per output value.
#[derive(Debug, Clone, Copy)]
pub enum Pi<'a> {
    Permutation(&'a Permutation),
    TwoUniversal(&'a [TwoUniversalHash]),
}

/// `h_k = min_i tables[k][coords[i]]`.
pub(crate) fn standard_values<T: AsRef<[usize]>>(coords: &[usize], tables: &[T], out: &mut Vec<u64>) {
    out.clear();
    out.extend(tables.iter().map(|t| {
        let t = t.as_ref();
        coords.iter().map(|&c| t[c]).min().expect("non-empty support") as u64
    }));
}

/// `h_k = min_i π((p_i − k) mod D)` for `k = 1..=hashes`, given relocated positions.
pub(crate) fn circulant_values(positions: &[usize], pi: Pi<'_>, hashes: usize, out: &mut Vec<u64>) {
    out.clear();
    match pi {
        Pi::Permutation(p) => {
            let n = p.len();
            let table = p.table();
            for k in 1..=hashes {
                let back = n - k % n;
                let h = positions
                    .iter()
                    .map(|&q| {
                        let mut idx = q + back;
                        if idx >= n {
                            idx -= n;
                        }
                        table[idx]
                    })
                    .min()
                    .expect("non-empty support");
                out.push(h as u64);
            }
        }
        Pi::TwoUniversal(hs) => {
            for h in &hs[..hashes] {
                let v = positions
                    .iter()
                    .map(|&q| h.eval_unchecked(q as u64))
                    .min()
                    .expect("non-empty support");
                out.push(v);
            }
        }
    }
}

fn to_sketch(meta: SketchMeta, values: Vec<u64>) -> Result<Sketch> {
    Sketch::new(meta, values.into_iter().map(Slot::value).collect())
}

/// Standard MinHash: `h_k = min_{i ∈ v} perms[k](i)`.
pub fn minhash_standard(v: &BinaryVector, perms: &[Permutation]) -> Result<Sketch> {
    if v.is_empty() {
        return Err(Error::EmptyVector);
    }
    if perms.is_empty() {
        return Err(Error::InvalidParameter("need at least one permutation".into()));
    }
    for p in perms {
        if p.len() != v.dim() {
            return Err(Error::DimensionMismatch {
                left: v.dim(),
                right: p.len(),
            });
        }
    }
    let tables: Vec<&[usize]> = perms.iter().map(Permutation::table).collect();
    let mut values = Vec::new();
    standard_values(v.support(), &tables, &mut values);
    let meta = SketchMeta {
        scheme: "minhash".into(),
        dim: v.dim(),
        bins: None,
        hashes: perms.len(),
        seed: None,
        prime: None,
    };
    to_sketch(meta, values)
}

/// Circulant MinHash: relocate the support by `sigma`, then hash with `π` shifted by `1..=hashes`.
pub fn cminhash(v: &BinaryVector, sigma: Sigma<'_>, pi: Pi<'_>, hashes: usize) -> Result<Sketch> {
    let dim = v.dim();
    if v.is_empty() {
        return Err(Error::EmptyVector);
    }
    if sigma.dim() != dim {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: sigma.dim(),
        });
    }
    let (pi_scheme, prime) = match pi {
        Pi::Permutation(p) => {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: p.len(),
                });
            }
            (PiSource::ExactPermutation, None)
        }
        Pi::TwoUniversal(hs) => {
            if hs.len() < hashes {
                return Err(Error::InvalidParameter(format!(
                    "{} hash functions for {hashes} values",
                    hs.len()
                )));
            }
            if let Some(h) = hs.iter().find(|h| h.dim() != dim) {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: h.dim(),
                });
            }
            (PiSource::TwoUniversal, hs.first().map(TwoUniversalHash::p))
        }
    };
    let sigma_scheme = match sigma {
        Sigma::Permutation(_) => SigmaSource::ExactPermutation,
        Sigma::TwoUniversal(_) => SigmaSource::TwoUniversal,
    };
    let scheme = MinHashScheme::circulant(sigma_scheme, pi_scheme, hashes)?;
    scheme.validate(dim)?;
    let positions: Vec<usize> = v.support().iter().map(|&i| sigma.relocate(i)).collect();
    let mut values = Vec::with_capacity(hashes);
    circulant_values(&positions, pi, hashes, &mut values);
    let prime = match sigma {
        Sigma::TwoUniversal(h) => Some(h.p()),
        Sigma::Permutation(_) => prime,
    };
    let meta = SketchMeta {
        scheme: scheme.name().into(),
        dim,
        bins: None,
        hashes,
        seed: None,
        prime,
    };
    to_sketch(meta, values)
}

#[derive(Debug, Clone)]
enum SigmaDraw {
    Permutation(Permutation),
    TwoUniversal(TwoUniversalHash),
    ReusePi,
}

#[derive(Debug, Clone)]
enum PiDraw {
    Permutation(Permutation),
    TwoUniversal(Vec<TwoUniversalHash>),
}

#[derive(Debug, Clone)]
enum Draw {
    Standard(Vec<Permutation>),
    Circulant { sigma: SigmaDraw, pi: PiDraw },
}

/// A MinHash-type scheme with its randomness drawn from one master seed.
///
/// Two vectors sketched by the same hasher (or by hashers built from the same
/// scheme, dimension and seed) produce comparable sketches.
#[derive(Debug, Clone)]
pub struct MinHasher {
    scheme: MinHashScheme,
    dim: usize,
    seed: u64,
    draw: Draw,
}

impl MinHasher {
    pub fn from_seed(scheme: MinHashScheme, dim: usize, seed: u64) -> Result<Self> {
        scheme.validate(dim)?;
        let draw = match scheme.kind {
            MinHashKind::Standard => Draw::Standard(
                (0..scheme.hashes as u64)
                    .map(|k| Permutation::random(dim, &mut stream_rng(seed, Role::SlotPermutation, k)))
                    .collect::<Result<_>>()?,
            ),
            MinHashKind::Circulant => {
                let pi = match scheme.pi {
                    PiSource::ExactPermutation => {
                        PiDraw::Permutation(Permutation::random(dim, &mut stream_rng(seed, Role::Pi, 0))?)
                    }
                    PiSource::TwoUniversal => PiDraw::TwoUniversal(
                        (0..scheme.hashes as u64)
                            .map(|k| TwoUniversalHash::new(dim, derive_seed(seed, Role::Pi, k)))
                            .collect::<Result<_>>()?,
                    ),
                };
                let sigma = match scheme.sigma {
                    SigmaSource::ExactPermutation => {
                        SigmaDraw::Permutation(Permutation::random(dim, &mut stream_rng(seed, Role::Sigma, 0))?)
                    }
                    SigmaSource::TwoUniversal => {
                        SigmaDraw::TwoUniversal(TwoUniversalHash::new(dim, derive_seed(seed, Role::Sigma, 0))?)
                    }
                    SigmaSource::ReusePi => SigmaDraw::ReusePi,
                };
                Draw::Circulant { sigma, pi }
            }
        };
        Ok(Self {
            scheme,
            dim,
            seed,
            draw,
        })
    }

    pub fn scheme(&self) -> &MinHashScheme {
        &self.scheme
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sketch(&self, v: &BinaryVector) -> Result<Sketch> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: v.dim(),
            });
        }
        let sketch = match &self.draw {
            Draw::Standard(perms) => minhash_standard(v, perms)?,
            Draw::Circulant { sigma, pi } => {
                let pi_ref = match pi {
                    PiDraw::Permutation(p) => Pi::Permutation(p),
                    PiDraw::TwoUniversal(hs) => Pi::TwoUniversal(hs),
                };
                let sigma_ref = match sigma {
                    SigmaDraw::Permutation(p) => Sigma::Permutation(p),
                    SigmaDraw::TwoUniversal(h) => Sigma::TwoUniversal(h),
                    SigmaDraw::ReusePi => match pi {
                        PiDraw::Permutation(p) => Sigma::Permutation(p),
                        PiDraw::TwoUniversal(_) => unreachable!("rejected by MinHashScheme::circulant"),
                    },
                };
                cminhash(v, sigma_ref, pi_ref, self.scheme.hashes)?
            }
        };
        let mut meta = sketch.meta().clone();
        meta.scheme = self.scheme.name().into();
        meta.seed = Some(self.seed);
        Sketch::new(meta, sketch.into_slots())
    }
}
