//! Hash sketches with out-of-band empty-bin markers and a binary file format.

use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// One sketch entry: a hash value or the empty-bin marker `E`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot(u64);

impl Slot {
    /// Encoded as the all-ones word, which no hash value can reach.
    pub const EMPTY: Slot = Slot(u64::MAX);

    pub fn value(v: u64) -> Self {
        debug_assert!(v != u64::MAX);
        Slot(v)
    }

    pub fn is_empty(self) -> bool {
        self == Self::EMPTY
    }

    pub fn get(self) -> Option<u64> {
        (!self.is_empty()).then_some(self.0)
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn from_raw(raw: u64) -> Self {
        Slot(raw)
    }
}

impl fmt::Debug for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.get() {
            Some(v) => write!(f, "{v}"),
            None => f.write_str("E"),
        }
    }
}

/// Everything needed to decide whether two sketches are comparable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SketchMeta {
    /// Canonical scheme name, e.g. `coph-sigma-pi`.
    pub scheme: String,
    pub dim: usize,
    /// Bin count for OPH-type schemes.
    pub bins: Option<usize>,
    /// Number of hash values `M` (or `K` for MinHash-type schemes).
    pub hashes: usize,
    /// Master seed, absent when the randomness was supplied explicitly.
    pub seed: Option<u64>,
    /// Modulus of any 2-universal hash involved.
    pub prime: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sketch {
    meta: SketchMeta,
    slots: Vec<Slot>,
}

const MAGIC: &str = "coph-sketch 1";

impl Sketch {
    pub fn new(meta: SketchMeta, slots: Vec<Slot>) -> Result<Self> {
        if slots.len() != meta.hashes {
            return Err(Error::SketchMismatch(format!(
                "{} slots but metadata declares {}",
                slots.len(),
                meta.hashes
            )));
        }
        Ok(Self { meta, slots })
    }

    pub fn meta(&self) -> &SketchMeta {
        &self.meta
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn empty_count(&self) -> usize {
        self.slots.iter().filter(|s| s.is_empty()).count()
    }

    pub fn into_slots(self) -> Vec<Slot> {
        self.slots
    }

    /// Text header of `key=value` lines, a blank line, then the slots as little-endian `u64`.
    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        let m = &self.meta;
        writeln!(out, "{MAGIC}")?;
        writeln!(out, "scheme={}", m.scheme)?;
        writeln!(out, "dim={}", m.dim)?;
        if let Some(k) = m.bins {
            writeln!(out, "bins={k}")?;
        }
        writeln!(out, "hashes={}", m.hashes)?;
        if let Some(s) = m.seed {
            writeln!(out, "seed={s}")?;
        }
        if let Some(p) = m.prime {
            writeln!(out, "prime={p}")?;
        }
        writeln!(out)?;
        for s in &self.slots {
            out.write_all(&s.raw().to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(input: &mut R) -> Result<Self> {
        let mut line = String::new();
        input.read_line(&mut line)?;
        if line.trim_end() != MAGIC {
            return Err(Error::Format("missing sketch header".into()));
        }
        let (mut scheme, mut dim, mut bins, mut hashes, mut seed, mut prime) = (None, None, None, None, None, None);
        loop {
            line.clear();
            if input.read_line(&mut line)? == 0 {
                return Err(Error::Format("truncated sketch header".into()));
            }
            let entry = line.trim_end();
            if entry.is_empty() {
                break;
            }
            let (key, value) = entry
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("bad header line {entry:?}")))?;
            let num = || {
                value
                    .parse::<u64>()
                    .map_err(|_| Error::Format(format!("bad number in {entry:?}")))
            };
            match key {
                "scheme" => scheme = Some(value.to_string()),
                "dim" => dim = Some(num()? as usize),
                "bins" => bins = Some(num()? as usize),
                "hashes" => hashes = Some(num()? as usize),
                "seed" => seed = Some(num()?),
                "prime" => prime = Some(num()?),
                _ => return Err(Error::Format(format!("unknown header key {key:?}"))),
            }
        }
        let missing = |k: &str| Error::Format(format!("header lacks {k}"));
        let meta = SketchMeta {
            scheme: scheme.ok_or_else(|| missing("scheme"))?,
            dim: dim.ok_or_else(|| missing("dim"))?,
            bins,
            hashes: hashes.ok_or_else(|| missing("hashes"))?,
            seed,
            prime,
        };
        let mut slots = Vec::with_capacity(meta.hashes.min(1 << 20));
        let mut word = [0u8; 8];
        for _ in 0..meta.hashes {
            input.read_exact(&mut word)?;
            slots.push(Slot::from_raw(u64::from_le_bytes(word)));
        }
        Sketch::new(meta, slots)
    }
}
