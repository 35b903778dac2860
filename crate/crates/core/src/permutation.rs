//! Signed permutations and the Levi-Civita symbol.

/// A bijection on `{0, ..., d-1}` with its sign (+1 even, −1 odd).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedPermutation {
    pub mapping: Vec<usize>,
    pub sign: i8,
}

/// Lexicographic enumeration of `S_d` with parity tracked incrementally.
///
/// Each step of the next-permutation algorithm is one swap followed by a
/// reversal of the suffix; the reversal of `m` elements is `⌊m/2⌋` swaps.
pub struct Permutations {
    current: Vec<usize>,
    sign: i8,
    done: bool,
}

impl Permutations {
    pub fn new(d: usize) -> Self {
        Permutations {
            current: (0..d).collect(),
            sign: 1,
            done: false,
        }
    }
}

impl Iterator for Permutations {
    type Item = SignedPermutation;

    fn next(&mut self) -> Option<SignedPermutation> {
        if self.done {
            return None;
        }
        let out = SignedPermutation {
            mapping: self.current.clone(),
            sign: self.sign,
        };
        let p = &mut self.current;
        let n = p.len();
        match (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) {
            None => self.done = true,
            Some(i) => {
                let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
                p.swap(i, j);
                p[i + 1..].reverse();
                let swaps = 1 + (n - i - 1) / 2;
                if swaps % 2 == 1 {
                    self.sign = -self.sign;
                }
            }
        }
        Some(out)
    }
}

/// All of `S_d` in lexicographic order.
pub fn all_permutations(d: usize) -> Vec<SignedPermutation> {
    Permutations::new(d).collect()
}

/// Sign of a permutation by cycle decomposition; 0 if `mapping` is not a bijection.
pub fn levi_civita(indices: &[usize]) -> i8 {
    let n = indices.len();
    let mut seen = vec![false; n];
    for &i in indices {
        if i >= n || seen[i] {
            return 0;
        }
        seen[i] = true;
    }
    let mut visited = vec![false; n];
    let mut sign = 1i8;
    for start in 0..n {
        if visited[start] {
            continue;
        }
        let mut len = 0;
        let mut k = start;
        while !visited[k] {
            visited[k] = true;
            k = indices[k];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inversion_sign(p: &[usize]) -> i8 {
        let mut s = 1;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] > p[j] {
                    s = -s;
                }
            }
        }
        s
    }

    #[test]
    fn enumerates_lexicographically_with_correct_parity() {
        for d in 0..=6 {
            let perms = all_permutations(d);
            assert_eq!(perms.len(), crate::scalar::factorial_u64(d) as usize);
            for w in perms.windows(2) {
                assert!(w[0].mapping < w[1].mapping);
            }
            for p in &perms {
                assert_eq!(p.sign, inversion_sign(&p.mapping), "{:?}", p.mapping);
                assert_eq!(p.sign, levi_civita(&p.mapping));
            }
        }
    }

    #[test]
    fn levi_civita_vanishes_on_repeats() {
        assert_eq!(levi_civita(&[0, 0, 1]), 0);
        assert_eq!(levi_civita(&[0, 3, 1]), 0);
        assert_eq!(levi_civita(&[1, 0]), -1);
        assert_eq!(levi_civita(&[1, 2, 0]), 1);
    }
}
