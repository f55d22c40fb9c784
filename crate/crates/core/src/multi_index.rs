//! Sparse multi-indices `k = (k_1, ..., k_s)` with non-negative entries.
//!
//! A multi-index indexes one tensor-product Hermite polynomial and one
//! Hermite coefficient. Most indices of interest have very few nonzero
//! entries, so only those are stored; coordinates absent from the map are
//! zero. Coordinates are 1-based to match the usual `j = 1..s` convention
//! for weight sequences.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse multi-index in `N_0^s`.
///
/// Invariants maintained by construction:
/// - stored exponents are all >= 1 (zeros are never stored),
/// - stored coordinates `j` satisfy `1 <= j <= dim`.
///
/// Two multi-indices are equal iff their dimensions and sparse maps are
/// equal. The `Ord` implementation is graded lexicographic: lower total
/// degree sorts first, and among equal degrees the index whose leading
/// coordinates carry larger exponents sorts first, so `(1,0) < (0,1)` and
/// the all-ones prefix is minimal among same-degree 0/1 vectors. This is
/// the tie-break order used when selecting worst-case indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "DenseRepr", into = "DenseRepr")]
pub struct MultiIndex {
    dim: usize,
    entries: BTreeMap<usize, u32>,
}

/// Serialized form: the dense exponent vector `[k_1, ..., k_s]`.
#[derive(Serialize, Deserialize)]
struct DenseRepr(Vec<u32>);

impl TryFrom<DenseRepr> for MultiIndex {
    type Error = Error;
    fn try_from(value: DenseRepr) -> Result<Self> {
        MultiIndex::from_dense(&value.0)
    }
}

impl From<MultiIndex> for DenseRepr {
    fn from(value: MultiIndex) -> Self {
        DenseRepr(value.to_dense())
    }
}

impl MultiIndex {
    /// The zero index in dimension `dim`.
    pub fn zero(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "dimension must be >= 1"));
        }
        Ok(Self {
            dim,
            entries: BTreeMap::new(),
        })
    }

    /// Builds an index from sparse `(coordinate, exponent)` pairs.
    /// Zero exponents are dropped; coordinates are 1-based.
    pub fn from_sparse(dim: usize, pairs: &[(usize, u32)]) -> Result<Self> {
        let mut idx = Self::zero(dim)?;
        for &(j, k) in pairs {
            if j == 0 || j > dim {
                return Err(Error::param(
                    "coordinate",
                    format!("coordinate {j} outside 1..={dim}"),
                ));
            }
            if k > 0 {
                idx.entries.insert(j, k);
            }
        }
        Ok(idx)
    }

    /// Builds an index from the dense exponent vector `(k_1, ..., k_s)`.
    pub fn from_dense(exponents: &[u32]) -> Result<Self> {
        let mut idx = Self::zero(exponents.len())?;
        for (i, &k) in exponents.iter().enumerate() {
            if k > 0 {
                idx.entries.insert(i + 1, k);
            }
        }
        Ok(idx)
    }

    /// The unit index `e_j` (1-based coordinate).
    pub fn unit(dim: usize, j: usize) -> Result<Self> {
        Self::from_sparse(dim, &[(j, 1)])
    }

    /// The index `(1, ..., 1, 0, ..., 0)` with ones on the first `m` coordinates.
    pub fn ones_prefix(dim: usize, m: usize) -> Result<Self> {
        if m > dim {
            return Err(Error::param("m", format!("prefix length {m} exceeds dim {dim}")));
        }
        let pairs: Vec<(usize, u32)> = (1..=m).map(|j| (j, 1)).collect();
        Self::from_sparse(dim, &pairs)
    }

    /// Dimension `s` of the ambient space.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Exponent `k_j` for a 1-based coordinate; zero when not stored.
    pub fn exponent(&self, j: usize) -> u32 {
        debug_assert!(j >= 1 && j <= self.dim);
        self.entries.get(&j).copied().unwrap_or(0)
    }

    /// Iterates over the stored `(coordinate, exponent)` pairs in coordinate order.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.entries.iter().map(|(&j, &k)| (j, k))
    }

    /// Number of nonzero entries.
    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    /// Total degree `|k| = sum_j k_j`.
    pub fn total_degree(&self) -> u64 {
        self.entries.values().map(|&k| u64::from(k)).sum()
    }

    /// True iff all exponents are zero.
    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Dense exponent vector `(k_1, ..., k_s)`.
    pub fn to_dense(&self) -> Vec<u32> {
        let mut dense = vec![0u32; self.dim];
        for (&j, &k) in &self.entries {
            dense[j - 1] = k;
        }
        dense
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.dim, other.dim, "comparing indices of different dimension");
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // Same degree: at the first coordinate where they differ, the larger
        // exponent sorts first, so mass on leading coordinates wins ties.
        let mut a = self.entries.iter();
        let mut b = other.entries.iter();
        loop {
            match (a.next(), b.next()) {
                (Some((&ja, &ka)), Some((&jb, &kb))) => {
                    if ja != jb {
                        // The index with the earlier nonzero coordinate is smaller.
                        return ja.cmp(&jb);
                    }
                    if ka != kb {
                        return kb.cmp(&ka);
                    }
                }
                (None, None) => return Ordering::Equal,
                // Exhausted first: remaining mass of the other sits on later
                // coordinates, so the exhausted one had larger leading entries.
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
            }
        }
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.to_dense().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}
