//! Sparse formal sums and exact row reduction.

use std::collections::btree_map::{self, BTreeMap};

use crate::scalar::{Scalar, Sign};

/// A finite formal sum `Σ c_k k` with nonzero coefficients only.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Comb<K: Ord, S> {
    terms: BTreeMap<K, S>,
}

impl<K: Ord, S> Default for Comb<K, S> {
    fn default() -> Self {
        Comb { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone, S: Scalar> Comb<K, S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(k: K, c: S) -> Self {
        let mut out = Self::new();
        out.add_term(k, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, K, S> {
        self.terms.iter()
    }

    pub fn get(&self, k: &K) -> Option<&S> {
        self.terms.get(k)
    }

    pub fn coeff(&self, k: &K) -> S {
        self.terms.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn add_term(&mut self, k: K, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(k) {
            btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_signed(&mut self, k: K, c: S, sign: Sign) {
        self.add_term(k, sign.apply(c));
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, other: &Self, c: &S) {
        if c.is_zero() {
            return;
        }
        for (k, v) in other.iter() {
            self.add_term(k.clone(), v.clone() * c.clone());
        }
    }

    pub fn add_comb(&mut self, other: &Self) {
        for (k, v) in other.iter() {
            self.add_term(k.clone(), v.clone());
        }
    }

    pub fn sub_comb(&mut self, other: &Self) {
        for (k, v) in other.iter() {
            self.add_term(k.clone(), -v.clone());
        }
    }

    pub fn scaled(&self, c: &S) -> Self {
        let mut out = Self::new();
        out.add_scaled(self, c);
        out
    }

    pub fn signed(&self, sign: Sign) -> Self {
        if sign.is_minus() {
            self.scaled(&-S::one())
        } else {
            self.clone()
        }
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.sub_comb(other);
        out
    }

    /// Apply a linear map given on keys.
    pub fn map_linear<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> Comb<K2, S>) -> Comb<K2, S> {
        let mut out = Comb::new();
        for (k, c) in self.iter() {
            out.add_scaled(&f(k), c);
        }
        out
    }
}

impl<K: Ord, S> IntoIterator for Comb<K, S> {
    type Item = (K, S);
    type IntoIter = btree_map::IntoIter<K, S>;
    fn into_iter(self) -> Self::IntoIter {
        self.terms.into_iter()
    }
}

impl<'a, K: Ord, S> IntoIterator for &'a Comb<K, S> {
    type Item = (&'a K, &'a S);
    type IntoIter = btree_map::Iter<'a, K, S>;
    fn into_iter(self) -> Self::IntoIter {
        self.terms.iter()
    }
}

impl<K: Ord + Clone, S: Scalar> FromIterator<(K, S)> for Comb<K, S> {
    fn from_iter<I: IntoIterator<Item = (K, S)>>(iter: I) -> Self {
        let mut out = Comb::new();
        for (k, c) in iter {
            out.add_term(k, c);
        }
        out
    }
}

/// Reduce `rows` (each of length `ncols`) to reduced row echelon form in
/// place; returns the pivot columns.
pub fn row_reduce<S: Scalar>(rows: &mut Vec<Vec<S>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = S::one() / rows[r][col].clone();
        for v in rows[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in 0..ncols {
                    if !rows[r][j].is_zero() {
                        let t = rows[r][j].clone() * f.clone();
                        rows[i][j] = rows[i][j].clone() - t;
                    }
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn rank<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    row_reduce(&mut m, ncols).len()
}

/// A basis of `{x : A x = 0}`.
pub fn nullspace<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> Vec<Vec<S>> {
    let mut m = rows.to_vec();
    let pivots = row_reduce(&mut m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![S::zero(); ncols];
            x[f] = S::one();
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = -m[r][f].clone();
            }
            x
        })
        .collect()
}

/// Dense matrix product `a (m×k) * b (k×n)`.
pub fn mat_mul<S: Scalar>(a: &[Vec<S>], b: &[Vec<S>], n: usize) -> Vec<Vec<S>> {
    a.iter()
        .map(|row| {
            let mut out = vec![S::zero(); n];
            for (k, x) in row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, y) in b[k].iter().enumerate() {
                    if !y.is_zero() {
                        out[j] = out[j].clone() + x.clone() * y.clone();
                    }
                }
            }
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    fn q(n: i64) -> Q {
        Q::int(n)
    }

    #[test]
    fn comb_cancels_zeros() {
        let mut c: Comb<u8, Q> = Comb::single(1, q(2));
        c.add_term(1, q(-2));
        assert!(c.is_zero());
        c.add_term(3, q(0));
        assert!(c.is_zero());
    }

    #[test]
    fn rank_and_kernel() {
        let m = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)], vec![q(0), q(1), q(1)]];
        assert_eq!(rank(&m, 3), 2);
        let ker = nullspace(&m, 3);
        assert_eq!(ker.len(), 1);
        for row in &m {
            let dot: Q = row.iter().zip(&ker[0]).map(|(a, b)| a.clone() * b.clone()).sum();
            assert_eq!(dot, q(0));
        }
    }

    #[test]
    fn product_of_matrices() {
        let a = vec![vec![q(0), q(1)], vec![q(0), q(0)]];
        assert_eq!(mat_mul(&a, &a, 2), vec![vec![q(0), q(0)], vec![q(0), q(0)]]);
    }
}
