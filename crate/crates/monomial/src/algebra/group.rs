//! Vectors of Z_p^d under componentwise addition mod p, and rank
//! computation over Z_p.

use crate::algebra::field::PrimeModulus;
use crate::error::{Error, Result};

/// An element of the group Z_p^d. The group operation is written
/// multiplicatively but is componentwise addition mod p.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupVector {
    pub p: u64,
    pub coords: Vec<u64>,
}

impl GroupVector {
    pub fn new(p: PrimeModulus, coords: Vec<u64>) -> Self {
        let p = p.get();
        let coords = coords.into_iter().map(|c| c % p).collect();
        GroupVector { p, coords }
    }

    pub fn zero(p: PrimeModulus, d: usize) -> Self {
        GroupVector { p: p.get(), coords: vec![0; d] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// Group product: componentwise sum mod p.
    pub fn mul(&self, other: &GroupVector) -> Result<GroupVector> {
        if self.p != other.p || self.dim() != other.dim() {
            return Err(Error::Mismatch(format!(
                "group vectors over (p={}, d={}) and (p={}, d={})",
                self.p,
                self.dim(),
                other.p,
                other.dim()
            )));
        }
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a + b) % self.p)
            .collect();
        Ok(GroupVector { p: self.p, coords })
    }

    /// i-th power: every coordinate scaled by i mod p. Powers 0 and p
    /// both give the zero vector.
    pub fn pow(&self, i: u64) -> GroupVector {
        let s = i % self.p;
        GroupVector {
            p: self.p,
            coords: self.coords.iter().map(|&c| c * s % self.p).collect(),
        }
    }

    /// Mixed-radix (base-p) index of the vector, coordinate 0 least
    /// significant.
    pub fn index(&self) -> usize {
        let mut idx = 0usize;
        for &c in self.coords.iter().rev() {
            idx = idx * self.p as usize + c as usize;
        }
        idx
    }

    pub fn from_index(p: PrimeModulus, d: usize, mut idx: usize) -> Self {
        let p = p.get();
        let mut coords = Vec::with_capacity(d);
        for _ in 0..d {
            coords.push((idx % p as usize) as u64);
            idx /= p as usize;
        }
        GroupVector { p, coords }
    }
}

/// Rank of a set of vectors over Z_p via Gaussian elimination with
/// first-nonzero pivot selection.
pub fn rank_mod_p(vectors: &[GroupVector]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let p = vectors[0].p;
    let d = vectors[0].dim();
    let mut rows: Vec<Vec<u64>> = vectors.iter().map(|v| v.coords.clone()).collect();
    let mut rank = 0usize;
    for col in 0..d {
        let pivot = (rank..rows.len()).find(|&r| rows[r][col] != 0);
        let Some(pr) = pivot else { continue };
        rows.swap(rank, pr);
        let inv = crate::algebra::field::pow_mod(rows[rank][col], p - 2, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let factor = rows[r][col] * inv % p;
                for c in col..d {
                    let sub = factor * rows[rank][c] % p;
                    rows[r][c] = (rows[r][c] + p - sub) % p;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// True iff the vectors are linearly independent over Z_p.
pub fn independent(vectors: &[GroupVector]) -> bool {
    rank_mod_p(vectors) == vectors.len()
}
