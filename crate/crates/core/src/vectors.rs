//! Sparse binary vectors, exact resemblance, synthetic pairs and corpus ingestion.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use num_rational::Ratio;
use rand::seq::index;

use crate::error::{Error, Result};
use crate::randomness::{stream_rng, Role};

/// A point of `{0,1}^D` stored as the sorted set of its non-zero coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryVector {
    dim: usize,
    support: Vec<usize>,
}

impl BinaryVector {
    /// Builds a vector from a strictly increasing support.
    pub fn new(dim: usize, support: Vec<usize>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::UnsortedSupport);
        }
        if let Some(&last) = support.last() {
            if last >= dim {
                return Err(Error::IndexOutOfRange { index: last, dim });
            }
        }
        Ok(Self { dim, support })
    }

    /// Builds a vector from indices in any order; duplicates are merged.
    pub fn from_indices<I: IntoIterator<Item = usize>>(dim: usize, indices: I) -> Result<Self> {
        let mut support: Vec<usize> = indices.into_iter().collect();
        support.sort_unstable();
        support.dedup();
        Self::new(dim, support)
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new())
    }

    pub fn ones(dim: usize) -> Result<Self> {
        Self::new(dim, (0..dim).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Number of non-zero coordinates.
    pub fn nnz(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.support.binary_search(&index).is_ok()
    }
}

/// Dimension, union size `f` and intersection size `a` of a pair of vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairProfile {
    pub dim: usize,
    pub union: usize,
    pub intersection: usize,
}

impl PairProfile {
    pub fn new(dim: usize, union: usize, intersection: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if intersection > union || union > dim {
            return Err(Error::InfeasibleProfile {
                dim,
                union,
                intersection,
            });
        }
        Ok(Self {
            dim,
            union,
            intersection,
        })
    }

    pub fn of(v: &BinaryVector, w: &BinaryVector) -> Result<Self> {
        if v.dim != w.dim {
            return Err(Error::DimensionMismatch {
                left: v.dim,
                right: w.dim,
            });
        }
        let intersection = intersection_size(&v.support, &w.support);
        Ok(Self {
            dim: v.dim,
            union: v.nnz() + w.nnz() - intersection,
            intersection,
        })
    }

    /// `a / f`; `None` when the union is empty.
    pub fn jaccard(&self) -> Option<Ratio<usize>> {
        (self.union > 0).then(|| Ratio::new(self.intersection, self.union))
    }
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Exact resemblance `|v ∩ w| / |v ∪ w|`.
pub fn jaccard_exact(v: &BinaryVector, w: &BinaryVector) -> Result<Ratio<usize>> {
    PairProfile::of(v, w)?.jaccard().ok_or(Error::EmptyUnion)
}

/// Float view of [`jaccard_exact`].
pub fn jaccard(v: &BinaryVector, w: &BinaryVector) -> Result<f64> {
    let r = jaccard_exact(v, w)?;
    Ok(*r.numer() as f64 / *r.denom() as f64)
}

/// Generates a pair with profile exactly `(dim, union, intersection)`.
///
/// The `union` positions are drawn uniformly from `[0, dim)`; the first
/// `intersection` of them go to both vectors and the remaining ones alternate
/// between `v` and `w`, so `v` holds the extra element when `union -
/// intersection` is odd.
pub fn make_pair(dim: usize, union: usize, intersection: usize, seed: u64) -> Result<(BinaryVector, BinaryVector)> {
    PairProfile::new(dim, union, intersection)?;
    let mut rng = stream_rng(seed, Role::Pair, 0);
    let positions = index::sample(&mut rng, dim, union).into_vec();
    let mut v = Vec::with_capacity(union);
    let mut w = Vec::with_capacity(union);
    for (rank, &pos) in positions.iter().enumerate() {
        if rank < intersection {
            v.push(pos);
            w.push(pos);
        } else if (rank - intersection) % 2 == 0 {
            v.push(pos);
        } else {
            w.push(pos);
        }
    }
    Ok((BinaryVector::from_indices(dim, v)?, BinaryVector::from_indices(dim, w)?))
}

/// Splits text into lowercase alphanumeric tokens.
pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

/// Term-document incidence: for every term, the set of documents containing it.
///
/// Each document is a stream of tokens; tokens are lowercased and empty tokens
/// are dropped. Terms that occur in no document never appear in the map.
pub fn ingest_corpus<I, D, T>(documents: I) -> Result<BTreeMap<String, BinaryVector>>
where
    I: IntoIterator<Item = D>,
    D: IntoIterator<Item = T>,
    T: AsRef<str>,
{
    let mut postings: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut n_docs = 0;
    for (doc, tokens) in documents.into_iter().enumerate() {
        n_docs = doc + 1;
        for token in tokens {
            let term = token.as_ref().to_lowercase();
            if term.is_empty() {
                continue;
            }
            let list = postings.entry(term).or_default();
            if list.last() != Some(&doc) {
                list.push(doc);
            }
        }
    }
    if n_docs == 0 {
        return Err(Error::EmptyCorpus);
    }
    postings
        .into_iter()
        .map(|(term, docs)| Ok((term, BinaryVector::new(n_docs, docs)?)))
        .collect()
}

/// Tokenizes raw documents with [`tokenize`] and ingests them.
pub fn ingest_texts<I, S>(texts: I) -> Result<BTreeMap<String, BinaryVector>>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let docs: Vec<Vec<String>> = texts.into_iter().map(|t| tokenize(t.as_ref()).collect()).collect();
    ingest_corpus(docs)
}

/// Reads a corpus: a directory yields one document per file (sorted by file
/// name), a file yields one document per line.
pub fn read_corpus(path: &Path) -> Result<Vec<String>> {
    if path.is_dir() {
        let mut files: Vec<_> = fs::read_dir(path)?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        files.retain(|p| p.is_file());
        files.sort();
        files
            .iter()
            .map(|p| Ok(String::from_utf8_lossy(&fs::read(p)?).into_owned()))
            .collect()
    } else {
        let reader = BufReader::new(fs::File::open(path)?);
        Ok(reader.lines().collect::<std::io::Result<_>>()?)
    }
}

/// Writes vectors as `term,dim,idx1;idx2;...` rows after a header line.
pub fn write_vectors_csv<W: Write>(out: &mut W, vectors: &BTreeMap<String, BinaryVector>) -> Result<()> {
    writeln!(out, "term,dim,support")?;
    for (term, v) in vectors {
        let support: Vec<String> = v.support.iter().map(usize::to_string).collect();
        writeln!(out, "{},{},{}", term, v.dim, support.join(";"))?;
    }
    Ok(())
}

pub fn read_vectors_csv<R: Read>(input: R) -> Result<BTreeMap<String, BinaryVector>> {
    let mut map = BTreeMap::new();
    for (lineno, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        if lineno == 0 && line.starts_with("term,") || line.trim().is_empty() {
            continue;
        }
        let bad = || Error::Format(format!("line {}: {line:?}", lineno + 1));
        let mut fields = line.splitn(3, ',');
        let term = fields.next().ok_or_else(bad)?.to_string();
        let dim: usize = fields.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let support = fields.next().unwrap_or("");
        let support = support
            .split(';')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        map.insert(term, BinaryVector::new(dim, support)?);
    }
    Ok(map)
}
