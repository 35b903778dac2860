//! Multi-epsilon contractions.
//!
//! Every determinant, discriminant and permutation tensor in this crate is an
//! instance of one sum: for `d` symmetric factors `F_0..F_{d-1}` of rank `r`
//! over dimension `d`,
//!
//! ```text
//! E = Σ_{π_1..π_r ∈ S_d} Π_a sign(π_a) · Π_t F_t[π_1(t), ..., π_r(t)]
//! ```
//!
//! i.e. `r` Levi-Civita symbols contracted against the `d` factors, with no
//! factorial normalization. Callers apply `1/d!` or `1/(s!(d-s)!)`.
//!
//! # Derivative convention
//!
//! Gradients are *formal*: all `d^r` ordered components of a factor are treated
//! as independent variables. The formal derivative of a symmetric polynomial is
//! itself symmetric, so it is returned as a [`SymTensor`]. The derivative with
//! respect to a stored canonical component `K` is `multiplicity(K)` times the
//! formal one, because `K` occupies that many ordered slots.

use crate::error::{Error, Result};
use crate::permutation::{all_permutations, SignedPermutation};
use crate::scalar::{binomial, factorial, Scalar};
use crate::tensor::SymTensor;

/// Upper bound on the number of entries a materialized permutation tensor may hold.
pub const PERMUTATION_TENSOR_CAP: u128 = 1_000_000;

/// The ordered list of `d` factors entering an epsilon sum.
#[derive(Clone, Debug)]
pub struct EpsilonProduct<'a, T> {
    rank: usize,
    dim: usize,
    factors: Vec<&'a SymTensor<T>>,
}

struct Walk<'p> {
    rank: usize,
    dim: usize,
    perms: &'p [SignedPermutation],
    /// Permutations allowed for `π_1`; the rest range over all of `S_d`.
    first: Vec<usize>,
}

impl Walk<'_> {
    fn stride(&self, level: usize) -> usize {
        self.dim.pow((self.rank - 1 - level) as u32)
    }

    /// Calls `visit(offsets, sign)` once per permutation tuple, where
    /// `offsets[t]` is the row-major offset of `(π_1(t), ..., π_r(t))`.
    fn run(&self, visit: &mut impl FnMut(&[usize], i8)) {
        let mut offsets = vec![0usize; self.dim];
        self.level(0, &mut offsets, 1, visit);
    }

    fn level(&self, level: usize, offsets: &mut [usize], sign: i8, visit: &mut impl FnMut(&[usize], i8)) {
        if level == self.rank {
            visit(offsets, sign);
            return;
        }
        let stride = self.stride(level);
        let mut step = |p: &SignedPermutation, offsets: &mut [usize]| {
            for (o, &m) in offsets.iter_mut().zip(&p.mapping) {
                *o += m * stride;
            }
            self.level(level + 1, offsets, sign * p.sign, visit);
            for (o, &m) in offsets.iter_mut().zip(&p.mapping) {
                *o -= m * stride;
            }
        };
        if level == 0 {
            for &k in &self.first {
                step(&self.perms[k], offsets);
            }
        } else {
            for p in self.perms {
                step(p, offsets);
            }
        }
    }
}

/// Dense copies of the distinct factors plus the slot → copy mapping.
struct DenseFactors<T> {
    copies: Vec<Vec<T>>,
    slot: Vec<usize>,
}

impl<T: Scalar> DenseFactors<T> {
    fn new(factors: &[&SymTensor<T>]) -> Self {
        let mut copies: Vec<Vec<T>> = Vec::new();
        let mut seen: Vec<*const SymTensor<T>> = Vec::new();
        let mut slot = Vec::with_capacity(factors.len());
        for f in factors {
            let ptr = *f as *const SymTensor<T>;
            match seen.iter().position(|&p| p == ptr) {
                Some(i) => slot.push(i),
                None => {
                    seen.push(ptr);
                    copies.push(f.to_dense());
                    slot.push(copies.len() - 1);
                }
            }
        }
        DenseFactors { copies, slot }
    }

    fn at(&self, t: usize, offset: usize) -> &T {
        &self.copies[self.slot[t]][offset]
    }
}

/// Accumulates signed terms in two halves to avoid negating every product.
struct SignedSum<T> {
    pos: T,
    neg: T,
}

impl<T: Scalar> SignedSum<T> {
    fn new() -> Self {
        SignedSum {
            pos: T::zero(),
            neg: T::zero(),
        }
    }

    fn add(&mut self, sign: i8, term: &T) {
        if sign > 0 {
            self.pos += term;
        } else {
            self.neg += term;
        }
    }

    fn total(self) -> T {
        self.pos - self.neg
    }
}

impl<'a, T: Scalar> EpsilonProduct<'a, T> {
    /// `factors` must hold exactly `d` tensors sharing rank `r` and dimension `d`.
    pub fn new(factors: Vec<&'a SymTensor<T>>) -> Result<Self> {
        let first = factors
            .first()
            .ok_or_else(|| Error::ShapeMismatch("epsilon product needs at least one factor".into()))?;
        let (rank, dim) = (first.rank(), first.dim());
        if factors.len() != dim {
            return Err(Error::ShapeMismatch(format!(
                "epsilon product in dimension {dim} needs {dim} factors, got {}",
                factors.len()
            )));
        }
        if let Some(bad) = factors.iter().find(|f| f.rank() != rank || f.dim() != dim) {
            return Err(Error::ShapeMismatch(format!(
                "factor of rank {} dim {} among rank {rank} dim {dim}",
                bad.rank(),
                bad.dim()
            )));
        }
        Ok(EpsilonProduct { rank, dim, factors })
    }

    /// `copies` of `x` followed by `d - copies` of `y`.
    pub fn blocks(x: &'a SymTensor<T>, copies: usize, y: &'a SymTensor<T>) -> Result<Self> {
        let dim = x.dim();
        if copies > dim {
            return Err(Error::OrderExceedsDimension { order: copies, dim });
        }
        let mut factors = vec![x; copies];
        factors.extend(std::iter::repeat_n(y, dim - copies));
        Self::new(factors)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn walk<'p>(&self, perms: &'p [SignedPermutation]) -> Walk<'p> {
        Walk {
            rank: self.rank,
            dim: self.dim,
            perms,
            first: (0..perms.len()).collect(),
        }
    }

    fn sum_over(&self, walk: &Walk<'_>) -> (T, u64) {
        let dense = DenseFactors::new(&self.factors);
        let mut sum = SignedSum::new();
        let mut terms = 0u64;
        walk.run(&mut |offsets, sign| {
            terms += 1;
            let mut prod = dense.at(0, offsets[0]).clone();
            if prod.is_zero() {
                return;
            }
            for (t, &off) in offsets.iter().enumerate().skip(1) {
                let f = dense.at(t, off);
                if f.is_zero() {
                    return;
                }
                prod *= f;
            }
            sum.add(sign, &prod);
        });
        (sum.total(), terms)
    }

    /// The full, unnormalized epsilon sum over all `(d!)^r` permutation tuples.
    pub fn value(&self) -> T {
        self.value_counted().0
    }

    /// [`value`](Self::value) together with the number of tuples enumerated.
    pub fn value_counted(&self) -> (T, u64) {
        let perms = all_permutations(self.dim);
        self.sum_over(&self.walk(&perms))
    }

    /// Same value as [`value`](Self::value), enumerating one representative per
    /// block-relabeling orbit.
    ///
    /// Requires even rank, `factors[0..block]` identical and
    /// `factors[block..d]` identical. Relabeling slots within a block by `σ`
    /// composes every `π_a` with `σ` and multiplies the sign by
    /// `sign(σ)^r = 1`, so each orbit has `block!·(d-block)!` equal terms.
    /// `π_1` is restricted to the `C(d, block)` permutations increasing on
    /// both blocks.
    pub fn coset_restricted(&self, block: usize) -> Result<T> {
        Ok(self.coset_restricted_counted(block)?.0)
    }

    pub fn coset_restricted_counted(&self, block: usize) -> Result<(T, u64)> {
        let d = self.dim;
        if !self.rank.is_multiple_of(2) {
            return Err(Error::Precondition(format!(
                "coset restriction needs even rank, got {}",
                self.rank
            )));
        }
        if block > d {
            return Err(Error::OrderExceedsDimension { order: block, dim: d });
        }
        let uniform = |range: std::ops::Range<usize>| {
            self.factors[range.clone()]
                .windows(2)
                .all(|w| std::ptr::eq(w[0], w[1]) || w[0] == w[1])
        };
        if !uniform(0..block) || !uniform(block..d) {
            return Err(Error::Precondition(
                "coset restriction needs identical factors within each block".into(),
            ));
        }
        let perms = all_permutations(d);
        let mut walk = self.walk(&perms);
        walk.first = perms
            .iter()
            .enumerate()
            .filter(|(_, p)| {
                p.mapping[..block].windows(2).all(|w| w[0] < w[1])
                    && p.mapping[block..].windows(2).all(|w| w[0] < w[1])
            })
            .map(|(k, _)| k)
            .collect();
        debug_assert_eq!(walk.first.len() as u64, binomial(d, block));
        let (partial, terms) = self.sum_over(&walk);
        let mut total = partial;
        total *= &factorial::<T>(block);
        total *= &factorial::<T>(d - block);
        Ok((total, terms))
    }

    /// Formal derivative of the epsilon sum with respect to the factor in slot
    /// `position` (the sum with that slot freed on every epsilon).
    pub fn slot_gradient(&self, position: usize) -> Result<SymTensor<T>> {
        self.gradient_over(&[position])
    }

    /// Sum of slot gradients over `positions`: the formal derivative with respect
    /// to a tensor that occupies exactly those slots.
    pub fn gradient_over(&self, positions: &[usize]) -> Result<SymTensor<T>> {
        if let Some(&p) = positions.iter().find(|&&p| p >= self.dim) {
            return Err(Error::Precondition(format!(
                "slot {p} out of range for {} factors",
                self.dim
            )));
        }
        let dense = DenseFactors::new(&self.factors);
        let size = self.dim.pow(self.rank as u32);
        let mut pos = vec![T::zero(); size];
        let mut neg = vec![T::zero(); size];
        let perms = all_permutations(self.dim);
        let mut zeros = Vec::with_capacity(self.dim);
        self.walk(&perms).run(&mut |offsets, sign| {
            zeros.clear();
            zeros.extend((0..offsets.len()).filter(|&t| dense.at(t, offsets[t]).is_zero()));
            if zeros.len() > 1 {
                return;
            }
            let target = if sign > 0 { &mut pos } else { &mut neg };
            for &t in positions {
                if zeros.len() == 1 && zeros[0] != t {
                    continue;
                }
                let mut prod = T::one();
                for (u, &off) in offsets.iter().enumerate() {
                    if u != t {
                        prod *= dense.at(u, off);
                    }
                }
                target[offsets[t]] += &prod;
            }
        });
        let diff: Vec<T> = pos.into_iter().zip(neg).map(|(p, n)| p - n).collect();
        SymTensor::from_dense(self.rank, self.dim, &diff)
    }
}

/// Explicit permutation tensor `Q_s(G)` as a dense array with `r·s` indices.
///
/// Indices are laid out epsilon-major: the `s` indices carried by the first
/// Levi-Civita symbol, then the `s` of the second, and so on. For rank 2 that
/// is `q[i_1..i_s, j_1..j_s]`. Slot `u` of the tensor (the `u`-th copy of the
/// contracted matrix) is the multi-index `(i_u, j_u, ...)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PermutationTensor<T> {
    order: usize,
    rank: usize,
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> PermutationTensor<T> {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn offset(&self, flat: &[usize]) -> usize {
        flat.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    /// Entry at `r·s` epsilon-major indices.
    pub fn get(&self, flat: &[usize]) -> Result<&T> {
        if flat.len() != self.rank * self.order || flat.iter().any(|&i| i >= self.dim) {
            return Err(Error::IndexOutOfRange {
                index: flat.to_vec(),
                rank: self.rank * self.order,
                dim: self.dim,
            });
        }
        Ok(&self.data[self.offset(flat)])
    }

    /// Entry addressed by one rank-`r` multi-index per contracted slot.
    pub fn at_slots(&self, slots: &[&[usize]]) -> Result<&T> {
        if slots.len() != self.order || slots.iter().any(|s| s.len() != self.rank) {
            return Err(Error::ShapeMismatch(format!(
                "expected {} slots of rank {}",
                self.order, self.rank
            )));
        }
        let flat: Vec<usize> = (0..self.rank)
            .flat_map(|a| slots.iter().map(move |s| s[a]))
            .collect();
        self.get(&flat)
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    /// `Q_s^{...} A_{slot 1} ··· A_{slot s}`: the discriminant of order `s`.
    pub fn contract(&self, a: &SymTensor<T>) -> Result<T> {
        if a.rank() != self.rank || a.dim() != self.dim {
            return Err(Error::ShapeMismatch("tensor does not match permutation tensor".into()));
        }
        let dense = a.to_dense();
        let (r, s, d) = (self.rank, self.order, self.dim);
        let mut digits = vec![0usize; r * s];
        let mut acc = T::zero();
        for (flat, q) in self.data.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let mut rem = flat;
            for k in (0..r * s).rev() {
                digits[k] = rem % d;
                rem /= d;
            }
            let mut term = q.clone();
            for u in 0..s {
                let off = (0..r).fold(0, |acc, a| acc * d + digits[a * s + u]);
                term *= &dense[off];
            }
            acc += &term;
        }
        Ok(acc)
    }
}

/// Materializes `Q_s(G) = 1/(s!(d-s)!·det G) · ε···ε · G_{slot s+1} ··· G_{slot d}`.
///
/// `det G` is the rank-`r` epsilon determinant of `G` itself. Orders above `d`
/// vanish identically and are rejected.
pub fn materialize_permutation_tensor<T: Scalar>(
    order: usize,
    g: &SymTensor<T>,
) -> Result<PermutationTensor<T>> {
    let (r, d) = (g.rank(), g.dim());
    if order > d {
        return Err(Error::OrderExceedsDimension { order, dim: d });
    }
    let entries = (d as u128).pow((r * order) as u32);
    if entries > PERMUTATION_TENSOR_CAP {
        return Err(Error::SizeCapExceeded {
            entries,
            cap: PERMUTATION_TENSOR_CAP,
        });
    }
    let det_g = EpsilonProduct::new(vec![g; d])?.value() / factorial::<T>(d);
    let inv_g = det_g.checked_recip().ok_or(Error::Singular { what: "metric" })?;

    let perms = all_permutations(d);
    let walk = Walk {
        rank: r,
        dim: d,
        perms: &perms,
        first: (0..perms.len()).collect(),
    };
    let dense_g = g.to_dense();
    let mut pos = vec![T::zero(); entries as usize];
    let mut neg = vec![T::zero(); entries as usize];
    let mut digits = vec![0usize; r];
    walk.run(&mut |offsets, sign| {
        let mut prod = T::one();
        for &off in &offsets[order..] {
            let v = &dense_g[off];
            if v.is_zero() {
                return;
            }
            prod *= v;
        }
        // epsilon-major flat index from the per-slot offsets of the free slots
        let mut flat_digits = vec![0usize; r * order];
        for (u, &off) in offsets[..order].iter().enumerate() {
            let mut rem = off;
            for k in (0..r).rev() {
                digits[k] = rem % d;
                rem /= d;
            }
            for a in 0..r {
                flat_digits[a * order + u] = digits[a];
            }
        }
        let flat = flat_digits.iter().fold(0, |acc, &i| acc * d + i);
        if sign > 0 {
            pos[flat] += &prod;
        } else {
            neg[flat] += &prod;
        }
    });
    let mut norm = factorial::<T>(order);
    norm *= &factorial::<T>(d - order);
    let scale = inv_g / norm;
    let data = pos
        .into_iter()
        .zip(neg)
        .map(|(p, n)| {
            let mut v = p - n;
            v *= &scale;
            v
        })
        .collect();
    Ok(PermutationTensor {
        order,
        rank: r,
        dim: d,
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::random_symmetric;
    use crate::ExactScalar;

    fn q(n: i64, d: i64) -> ExactScalar {
        ExactScalar::from_ratio(n, d)
    }

    fn sym2(rows: &[&[i64]]) -> SymTensor<ExactScalar> {
        let d = rows.len();
        let mut t = SymTensor::zeros(2, d).unwrap();
        for i in 0..d {
            for j in i..d {
                t.set(&[i, j], q(rows[i][j], 1)).unwrap();
            }
        }
        t
    }

    fn example_a() -> SymTensor<ExactScalar> {
        SymTensor::from_entries(
            4,
            2,
            [
                (vec![0, 0, 0, 0], q(1, 1)),
                (vec![1, 1, 1, 1], q(1, 1)),
                (vec![0, 0, 1, 1], q(1, 1)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn basic_values() {
        let id = SymTensor::<ExactScalar>::identity(2).unwrap();
        assert_eq!(EpsilonProduct::new(vec![&id, &id]).unwrap().value(), q(2, 1));
        let a = example_a();
        assert_eq!(EpsilonProduct::new(vec![&a, &a]).unwrap().value(), q(8, 1));
        let s: SymTensor<ExactScalar> = random_symmetric(3, 2, 9, 7).unwrap();
        assert_eq!(EpsilonProduct::new(vec![&s, &s]).unwrap().value(), q(0, 1));
    }

    #[test]
    fn shape_errors() {
        let a: SymTensor<ExactScalar> = SymTensor::zeros(2, 3).unwrap();
        let b: SymTensor<ExactScalar> = SymTensor::zeros(4, 3).unwrap();
        assert!(EpsilonProduct::new(vec![&a, &a]).is_err());
        assert!(EpsilonProduct::new(vec![&a, &a, &b]).is_err());
        assert!(EpsilonProduct::<ExactScalar>::new(vec![]).is_err());
    }

    #[test]
    fn matrix_gradient_is_cofactor() {
        let a = sym2(&[&[2, 1], &[1, 3]]);
        let grad = EpsilonProduct::new(vec![&a, &a]).unwrap().slot_gradient(0).unwrap();
        assert_eq!(grad, sym2(&[&[3, -1], &[-1, 2]]));
    }

    #[test]
    fn fourth_rank_gradient_gives_inverse_components() {
        let a = example_a();
        let grad = EpsilonProduct::new(vec![&a, &a]).unwrap().slot_gradient(0).unwrap();
        // 1/(d-1)! = 1 and det = 4
        let inv = grad.scale(&q(1, 4));
        assert_eq!(inv.canonical(&[0, 0, 0, 0]), q(1, 4));
        assert_eq!(inv.canonical(&[0, 0, 0, 1]), q(0, 1));
        assert_eq!(inv.canonical(&[0, 0, 1, 1]), q(1, 4));
    }

    #[test]
    fn zero_factor_annihilates_gradient() {
        let z: SymTensor<ExactScalar> = SymTensor::zeros(4, 3).unwrap();
        let a: SymTensor<ExactScalar> = random_symmetric(4, 3, 2, 4).unwrap();
        let grad = EpsilonProduct::new(vec![&z, &a, &z]).unwrap().slot_gradient(0).unwrap();
        assert!(grad.is_zero());
    }

    #[test]
    fn coset_path_matches_full_sum() {
        let a = example_a();
        let product = EpsilonProduct::new(vec![&a, &a]).unwrap();
        assert_eq!(product.coset_restricted(2).unwrap(), q(8, 1));

        let a3: SymTensor<ExactScalar> = random_symmetric(4, 3, 3, 5).unwrap();
        let g3: SymTensor<ExactScalar> = random_symmetric(4, 3, 103, 5).unwrap();
        let product = EpsilonProduct::blocks(&a3, 1, &g3).unwrap();
        let (fast, terms) = product.coset_restricted_counted(1).unwrap();
        let (slow, all_terms) = product.value_counted();
        assert_eq!(fast, slow);
        assert_eq!(terms, 3 * 6u64.pow(3));
        assert_eq!(all_terms, 6u64.pow(4));

        let m = sym2(&[&[2, 1, 0], &[1, 3, -1], &[0, -1, 4]]);
        let product = EpsilonProduct::new(vec![&m, &m, &m]).unwrap();
        // det = 2(12-1) - 1(4-0) = 18
        assert_eq!(product.coset_restricted(3).unwrap(), q(6 * 18, 1));
    }

    #[test]
    fn coset_preconditions() {
        let s: SymTensor<ExactScalar> = random_symmetric(3, 2, 1, 3).unwrap();
        assert!(EpsilonProduct::new(vec![&s, &s]).unwrap().coset_restricted(1).is_err());
        let a: SymTensor<ExactScalar> = random_symmetric(2, 3, 1, 3).unwrap();
        let b: SymTensor<ExactScalar> = random_symmetric(2, 3, 2, 3).unwrap();
        let mixed = EpsilonProduct::new(vec![&a, &b, &a]).unwrap();
        assert!(mixed.coset_restricted(2).is_err());
        assert!(mixed.coset_restricted(1).is_err());
    }

    #[test]
    fn rank_two_permutation_tensors() {
        let g = SymTensor::<ExactScalar>::identity(2).unwrap();
        let q1 = materialize_permutation_tensor(1, &g).unwrap();
        assert_eq!(*q1.get(&[0, 0]).unwrap(), q(1, 1));
        assert_eq!(*q1.get(&[0, 1]).unwrap(), q(0, 1));
        assert_eq!(*q1.get(&[1, 1]).unwrap(), q(1, 1));

        let q2 = materialize_permutation_tensor(2, &g).unwrap();
        assert_eq!(*q2.get(&[0, 1, 0, 1]).unwrap(), q(1, 2));
        assert_eq!(*q2.get(&[0, 1, 1, 0]).unwrap(), q(-1, 2));
        assert_eq!(*q2.get(&[0, 0, 0, 0]).unwrap(), q(0, 1));
        assert_eq!(*q2.at_slots(&[&[0, 0], &[1, 1]]).unwrap(), q(1, 2));

        assert!(matches!(
            materialize_permutation_tensor(3, &g),
            Err(Error::OrderExceedsDimension { order: 3, dim: 2 })
        ));
        let singular = sym2(&[&[1, 1], &[1, 1]]);
        assert!(matches!(
            materialize_permutation_tensor(1, &singular),
            Err(Error::Singular { .. })
        ));
        let big: SymTensor<ExactScalar> = SymTensor::identity(4).unwrap();
        let big4 = crate::tensor::sym_outer(&big, &big).unwrap();
        assert!(matches!(
            materialize_permutation_tensor(3, &big4),
            Err(Error::SizeCapExceeded { .. })
        ));
    }
}
