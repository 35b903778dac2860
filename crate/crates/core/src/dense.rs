//! Square dense matrices over a [`Scalar`].

use crate::scalar::Scalar;
use crate::tensor::SymTensor;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = T::one();
        }
        m
    }

    /// All `d²` components of a rank-2 symmetric tensor.
    pub fn from_sym(t: &SymTensor<T>) -> Self {
        assert_eq!(t.rank(), 2, "Matrix::from_sym needs a rank-2 tensor");
        Matrix {
            dim: t.dim(),
            data: t.to_dense(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.dim + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: &T) {
        self.data[i * self.dim + j] += v;
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let mut term = a.clone();
                    term *= other.get(k, j);
                    out.add_at(i, j, &term);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// `self + factor · other`.
    pub fn add_scaled(&self, other: &Self, factor: &T) -> Self {
        let mut out = self.clone();
        for (o, v) in out.data.iter_mut().zip(&other.data) {
            let mut term = v.clone();
            term *= factor;
            *o += &term;
        }
        out
    }

    pub fn trace(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.dim {
            acc += self.get(i, i);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    /// Inverse by Gauss–Jordan elimination, `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.dim;
        let mut a = self.clone();
        let mut inv = Self::identity(d);
        for col in 0..d {
            let pivot = (col..d).find(|&r| !a.get(r, col).is_zero())?;
            if pivot != col {
                for j in 0..d {
                    a.data.swap(pivot * d + j, col * d + j);
                    inv.data.swap(pivot * d + j, col * d + j);
                }
            }
            let scale = a.get(col, col).checked_recip()?;
            for j in 0..d {
                a.data[col * d + j] *= &scale;
                inv.data[col * d + j] *= &scale;
            }
            for r in 0..d {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = -a.get(r, col).clone();
                for j in 0..d {
                    let mut t = a.get(col, j).clone();
                    t *= &factor;
                    a.data[r * d + j] += &t;
                    let mut t = inv.get(col, j).clone();
                    t *= &factor;
                    inv.data[r * d + j] += &t;
                }
            }
        }
        Some(inv)
    }
}
