use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::Rng;

use super::{stream_rng, Role};
use crate::error::{Error, Result};

/// A bijection on `[0, n)` stored as an explicit table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    table: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self {
            table: (0..n).collect(),
        })
    }

    /// Uniform permutation of `[0, n)` drawn by Fisher-Yates from `rng`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        let mut p = Self::identity(n)?;
        p.table.shuffle(rng);
        Ok(p)
    }

    /// Uniform permutation determined by `seed` alone.
    pub fn from_seed(n: usize, seed: u64) -> Result<Self> {
        Self::random(n, &mut stream_rng(seed, Role::Pi, 0))
    }

    pub fn from_table(table: Vec<usize>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut seen = vec![false; n];
        for &x in &table {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::NotAPermutation(n));
            }
        }
        Ok(Self { table })
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.table[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.table.iter().enumerate() {
            inv[x] = i;
        }
        Self { table: inv }
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(Self {
            table: other.table.iter().map(|&i| self.table[i]).collect(),
        })
    }

    /// The view rotated rightwards by `shift` (reduced mod n).
    pub fn rotated(&self, shift: usize) -> CirculantView<'_> {
        CirculantView {
            base: self,
            shift: shift % self.len(),
        }
    }

    /// Writes `n` followed by the table, all as little-endian `u64`.
    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        out.write_all(&(self.len() as u64).to_le_bytes())?;
        for &x in &self.table {
            out.write_all(&(x as u64).to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let mut word = [0u8; 8];
        input.read_exact(&mut word)?;
        let n = usize::try_from(u64::from_le_bytes(word))
            .map_err(|_| Error::Format("permutation length overflows usize".into()))?;
        let mut table = Vec::with_capacity(n.min(1 << 24));
        for _ in 0..n {
            input.read_exact(&mut word)?;
            let x = usize::try_from(u64::from_le_bytes(word)).map_err(|_| Error::NotAPermutation(n))?;
            table.push(x);
        }
        Self::from_table(table)
    }
}

/// Lazy circulant shift of a base permutation: `i ↦ base((i − shift) mod n)`.
///
/// With the 1-indexed table `[3,2,4,1]` a shift of one gives `[1,3,2,4]`.
#[derive(Debug, Clone, Copy)]
pub struct CirculantView<'a> {
    base: &'a Permutation,
    shift: usize,
}

impl<'a> CirculantView<'a> {
    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        let n = self.base.len();
        self.base.table[(i + n - self.shift) % n]
    }

    pub fn to_permutation(&self) -> Permutation {
        Permutation {
            table: (0..self.len()).map(|i| self.apply(i)).collect(),
        }
    }
}
