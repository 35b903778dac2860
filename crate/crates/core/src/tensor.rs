//! Completely symmetric tensors stored by canonical multi-index.
//!
//! A component `T[i_1..i_r]` is stored once, under the non-decreasing
//! reordering of its indices (the canonical key). Absent keys are zero.

use std::collections::BTreeMap;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{factorial_u64, Scalar};

/// An ordered index tuple `(i_1, ..., i_r)`.
pub type MultiIndex = Vec<usize>;

/// Sorted multi-index together with the number of distinct orderings it stands for.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey {
    sorted: Vec<usize>,
}

impl CanonicalKey {
    pub fn from_index(index: &[usize]) -> Self {
        let mut sorted = index.to_vec();
        sorted.sort_unstable();
        CanonicalKey { sorted }
    }

    pub fn sorted(&self) -> &[usize] {
        &self.sorted
    }

    pub fn multiplicity(&self) -> u64 {
        multiplicity(&self.sorted)
    }
}

/// Number of distinct orderings of `index`: `r! / Π_v m_v!`.
pub fn multiplicity(index: &[usize]) -> u64 {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &i in index {
        *counts.entry(i).or_default() += 1;
    }
    let denom: u64 = counts.values().map(|&m| factorial_u64(m)).product();
    factorial_u64(index.len()) / denom
}

/// All canonical keys of a rank-`rank` tensor in dimension `dim`, lexicographic.
pub fn canonical_keys(rank: usize, dim: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..dim).combinations_with_replacement(rank)
}

/// Row-major flat offset of `index` in a dense `dim^rank` array.
pub(crate) fn flat_offset(index: &[usize], dim: usize) -> usize {
    index.iter().fold(0, |acc, &i| acc * dim + i)
}

/// A completely symmetric tensor of rank `r` over dimension `d`.
///
/// Covariant and contravariant tensors share this type; variance is tracked by
/// the caller.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor<T> {
    rank: usize,
    dim: usize,
    entries: BTreeMap<Vec<usize>, T>,
}

impl<T> SymTensor<T> {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stored (nonzero) components in lexicographic key order.
    pub fn iter(&self) -> impl Iterator<Item = (&[usize], &T)> {
        self.entries.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn stored_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.rank == other.rank && self.dim == other.dim
    }
}

impl<T: Scalar> SymTensor<T> {
    pub fn zeros(rank: usize, dim: usize) -> Result<Self> {
        if rank == 0 || dim == 0 {
            return Err(Error::InvalidShape { rank, dim });
        }
        Ok(SymTensor {
            rank,
            dim,
            entries: BTreeMap::new(),
        })
    }

    /// The rank-2 identity `δ_ij`.
    pub fn identity(dim: usize) -> Result<Self> {
        let mut t = Self::zeros(2, dim)?;
        for i in 0..dim {
            t.set(&[i, i], T::one())?;
        }
        Ok(t)
    }

    /// Builds a tensor from `(index, value)` pairs; later entries overwrite earlier ones
    /// sharing a canonical key.
    pub fn from_entries<I>(rank: usize, dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, T)>,
    {
        let mut t = Self::zeros(rank, dim)?;
        for (idx, v) in entries {
            t.set(&idx, v)?;
        }
        Ok(t)
    }

    fn check_index(&self, index: &[usize]) -> Result<()> {
        if index.len() != self.rank || index.iter().any(|&i| i >= self.dim) {
            return Err(Error::IndexOutOfRange {
                index: index.to_vec(),
                rank: self.rank,
                dim: self.dim,
            });
        }
        Ok(())
    }

    /// Component at any ordering of the indices.
    pub fn component(&self, index: &[usize]) -> Result<T> {
        self.check_index(index)?;
        let key = CanonicalKey::from_index(index);
        Ok(self.canonical(key.sorted()))
    }

    /// Component at an already sorted key. No bounds checking.
    pub fn canonical(&self, sorted: &[usize]) -> T {
        self.entries.get(sorted).cloned().unwrap_or_else(T::zero)
    }

    pub(crate) fn canonical_ref(&self, sorted: &[usize]) -> Option<&T> {
        self.entries.get(sorted)
    }

    /// Sets the component at `index` (and therefore at every reordering of it).
    pub fn set(&mut self, index: &[usize], value: T) -> Result<()> {
        self.check_index(index)?;
        let key = CanonicalKey::from_index(index).sorted;
        if value.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
        Ok(())
    }

    fn require_same_shape(&self, other: &Self, op: &str) -> Result<()> {
        if !self.same_shape(other) {
            return Err(Error::ShapeMismatch(format!(
                "{op}: rank {} dim {} vs rank {} dim {}",
                self.rank, self.dim, other.rank, other.dim
            )));
        }
        Ok(())
    }

    pub fn map<U: Scalar>(&self, mut f: impl FnMut(&T) -> U) -> SymTensor<U> {
        let entries = self
            .entries
            .iter()
            .map(|(k, v)| (k.clone(), f(v)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        SymTensor {
            rank: self.rank,
            dim: self.dim,
            entries,
        }
    }

    pub fn scale(&self, factor: &T) -> Self {
        self.map(|v| {
            let mut v = v.clone();
            v *= factor;
            v
        })
    }

    /// `self + factor · other`.
    pub fn add_scaled(&self, other: &Self, factor: &T) -> Result<Self> {
        self.require_same_shape(other, "add_scaled")?;
        let mut out = self.clone();
        for (k, v) in &other.entries {
            let mut term = v.clone();
            term *= factor;
            let slot = out.entries.entry(k.clone()).or_insert_with(T::zero);
            *slot += &term;
            if slot.is_zero() {
                out.entries.remove(k);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, &T::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, &-T::one())
    }

    /// Dense row-major copy with all `d^r` ordered components.
    pub fn to_dense(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim.pow(self.rank as u32)];
        for (key, value) in &self.entries {
            for perm in key.iter().copied().permutations(self.rank).unique() {
                out[flat_offset(&perm, self.dim)] = value.clone();
            }
        }
        out
    }

    /// Reads a symmetric tensor back out of a dense row-major array. Only the
    /// entries at canonical keys are consulted.
    pub fn from_dense(rank: usize, dim: usize, dense: &[T]) -> Result<Self> {
        let mut t = Self::zeros(rank, dim)?;
        if dense.len() != dim.pow(rank as u32) {
            return Err(Error::ShapeMismatch(format!(
                "dense array of length {} for rank {rank} dim {dim}",
                dense.len()
            )));
        }
        for key in canonical_keys(rank, dim) {
            let v = &dense[flat_offset(&key, dim)];
            if !v.is_zero() {
                t.entries.insert(key, v.clone());
            }
        }
        Ok(t)
    }

    /// Complete symmetrization of a dense array: each canonical component is the
    /// mean over all orderings of its indices.
    pub fn symmetrize_dense(rank: usize, dim: usize, dense: &[T]) -> Result<Self> {
        let mut t = Self::zeros(rank, dim)?;
        for key in canonical_keys(rank, dim) {
            let orderings: Vec<Vec<usize>> =
                key.iter().copied().permutations(rank).unique().collect();
            let mut acc = T::zero();
            for o in &orderings {
                acc += &dense[flat_offset(o, dim)];
            }
            let mean = acc / T::from_u64(orderings.len() as u64);
            if !mean.is_zero() {
                t.entries.insert(key, mean);
            }
        }
        Ok(t)
    }
}

/// Complete symmetrization of the outer product `X ⊗ Y`.
///
/// Each component is the arithmetic mean over all `(p+q)!` orderings of the
/// index tuple. Averaging over orderings equals averaging over the `C(p+q, p)`
/// choices of which positions feed `X`, which is how it is evaluated.
pub fn sym_outer<T: Scalar>(x: &SymTensor<T>, y: &SymTensor<T>) -> Result<SymTensor<T>> {
    if x.dim != y.dim {
        return Err(Error::ShapeMismatch(format!(
            "sym_outer: dim {} vs dim {}",
            x.dim, y.dim
        )));
    }
    let (p, q) = (x.rank, y.rank);
    let n = p + q;
    let mut out = SymTensor::zeros(n, x.dim)?;
    let subsets: Vec<Vec<usize>> = (0..n).combinations(p).collect();
    let count = T::from_u64(subsets.len() as u64);
    let mut left = Vec::with_capacity(p);
    let mut right = Vec::with_capacity(q);
    for key in canonical_keys(n, x.dim) {
        let mut acc = T::zero();
        for subset in &subsets {
            left.clear();
            right.clear();
            let mut pick = subset.iter().peekable();
            for (pos, &v) in key.iter().enumerate() {
                if pick.peek() == Some(&&pos) {
                    pick.next();
                    left.push(v);
                } else {
                    right.push(v);
                }
            }
            // `key` is sorted, so both halves are already canonical.
            if let (Some(a), Some(b)) = (x.canonical_ref(&left), y.canonical_ref(&right)) {
                let mut term = a.clone();
                term *= b;
                acc += &term;
            }
        }
        if !acc.is_zero() {
            out.entries.insert(key, acc / count.clone());
        }
    }
    Ok(out)
}

/// Full contraction `Σ_idx X[idx]·Y[idx]` over all `d^r` ordered tuples.
pub fn contract_full<T: Scalar>(x: &SymTensor<T>, y: &SymTensor<T>) -> Result<T> {
    x.require_same_shape(y, "contract_full")?;
    let mut acc = T::zero();
    for (key, a) in &x.entries {
        if let Some(b) = y.entries.get(key) {
            let mut term = a.clone();
            term *= b;
            term *= &T::from_u64(multiplicity(key));
            acc += &term;
        }
    }
    Ok(acc)
}

/// Contraction on all but the first index: `T[i][j] = Σ_k X[i,k..]·Y[j,k..]`.
pub fn contract_one_free<T: Scalar>(x: &SymTensor<T>, y: &SymTensor<T>) -> Result<Matrix<T>> {
    x.require_same_shape(y, "contract_one_free")?;
    if x.rank < 2 {
        return Err(Error::UnsupportedRank {
            expected: "rank >= 2",
            rank: x.rank,
        });
    }
    let d = x.dim;
    let mut out = Matrix::zeros(d);
    let mut xi = Vec::with_capacity(x.rank);
    let mut yj = Vec::with_capacity(x.rank);
    for rest in canonical_keys(x.rank - 1, d) {
        let mu = T::from_u64(multiplicity(&rest));
        for i in 0..d {
            xi.clear();
            xi.push(i);
            xi.extend_from_slice(&rest);
            xi.sort_unstable();
            let Some(a) = x.canonical_ref(&xi) else { continue };
            for j in 0..d {
                yj.clear();
                yj.push(j);
                yj.extend_from_slice(&rest);
                yj.sort_unstable();
                if let Some(b) = y.canonical_ref(&yj) {
                    let mut term = a.clone();
                    term *= b;
                    term *= &mu;
                    out.add_at(i, j, &term);
                }
            }
        }
    }
    Ok(out)
}

/// Deterministic pseudo-random symmetric tensor.
///
/// Canonical keys are visited in lexicographic order; each draws a numerator
/// uniformly from `[-bound, bound]` and a denominator from `[1, bound]` out of a
/// ChaCha8 stream seeded with `seed` (via `SeedableRng::seed_from_u64`).
pub fn random_symmetric<T: Scalar>(
    rank: usize,
    dim: usize,
    seed: u64,
    bound: u32,
) -> Result<SymTensor<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_symmetric_from(&mut rng, rank, dim, bound)
}

pub(crate) fn random_symmetric_from<T: Scalar>(
    rng: &mut ChaCha8Rng,
    rank: usize,
    dim: usize,
    bound: u32,
) -> Result<SymTensor<T>> {
    if bound == 0 {
        return Err(Error::Precondition("bound must be at least 1".into()));
    }
    let b = i64::from(bound);
    let mut t = SymTensor::zeros(rank, dim)?;
    for key in canonical_keys(rank, dim) {
        let num = rng.gen_range(-b..=b);
        let den = rng.gen_range(1..=b);
        let v = T::from_ratio(num, den);
        if !v.is_zero() {
            t.entries.insert(key, v);
        }
    }
    Ok(t)
}
