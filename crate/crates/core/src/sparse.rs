//! Sparse vectors with exact rational coefficients over an ordered basis.

use alloc::collections::btree_map::{self, BTreeMap};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::lattice::Rational;

/// A finite linear combination of basis elements `K`. Zero coefficients are
/// never stored, so structural equality is equality of vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparseVec<K: Ord> {
    terms: BTreeMap<K, Rational>,
}

impl<K: Ord> Default for SparseVec<K> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> SparseVec<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `1 * key`.
    pub fn basis(key: K) -> Self {
        Self::term(key, Rational::one())
    }

    pub fn term(key: K, coeff: Rational) -> Self {
        let mut v = Self::zero();
        v.add_term(key, coeff);
        v
    }

    /// Adds `coeff * key`, dropping the entry if it cancels.
    pub fn add_term(&mut self, key: K, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn get(&self, key: &K) -> Option<&Rational> {
        self.terms.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Rational)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.is_empty()
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect() }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in other.iter() {
            out.add_term(k.clone(), v.clone());
        }
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in other.iter() {
            out.add_term(k.clone(), -v);
        }
        out
    }

    /// Applies a basis relabelling.
    pub fn map_keys<L: Ord + Clone>(&self, mut f: impl FnMut(&K) -> L) -> SparseVec<L> {
        let mut out = SparseVec::zero();
        for (k, v) in self.iter() {
            out.add_term(f(k), v.clone());
        }
        out
    }
}

impl<K: Ord + Clone> FromIterator<(K, Rational)> for SparseVec<K> {
    fn from_iter<I: IntoIterator<Item = (K, Rational)>>(iter: I) -> Self {
        let mut v = Self::zero();
        for (k, c) in iter {
            v.add_term(k, c);
        }
        v
    }
}

/// `[C(l, 0), ..., C(l, l)]`.
pub fn binomial_row(l: u64) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(l as usize + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for j in 0..l {
        c = c * BigInt::from(l - j) / BigInt::from(j + 1);
        row.push(c.clone());
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rat;

    #[test]
    fn cancellation_removes_entries() {
        let mut v: SparseVec<u32> = SparseVec::basis(3);
        v.add_term(3, rat(-1, 1));
        assert!(v.is_zero());
        v.add_term(1, rat(0, 1));
        assert!(v.is_zero());
    }

    #[test]
    fn arithmetic() {
        let a: SparseVec<u32> = [(1, rat(1, 2)), (2, rat(3, 1))].into_iter().collect();
        let b: SparseVec<u32> = [(2, rat(-3, 1)), (5, rat(1, 1))].into_iter().collect();
        let s = a.plus(&b);
        assert_eq!(s.len(), 2);
        assert_eq!(s.get(&1), Some(&rat(1, 2)));
        assert_eq!(a.minus(&a), SparseVec::zero());
        assert_eq!(a.scaled(&rat(2, 1)).get(&1), Some(&rat(1, 1)));
    }

    #[test]
    fn binomials() {
        let row = binomial_row(5);
        let expect: Vec<BigInt> = [1, 5, 10, 10, 5, 1].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(row, expect);
        assert_eq!(binomial_row(0), alloc::vec![BigInt::one()]);
        for l in 0..30u64 {
            let row = binomial_row(l);
            for (j, c) in row.iter().enumerate() {
                assert_eq!(*c, num_integer::binomial(BigInt::from(l), BigInt::from(j)));
            }
        }
    }
}
