//! Degree-graded wrapper around any evaluation ring.
//!
//! A value is the vector of its homogeneous components in the x-degree
//! grading, truncated above `top`. Substituted x-values are placed in
//! component 1 by the caller; y-values and constants in component 0.
//! After evaluation, component k isolates the degree-k part of the
//! polynomial, which keeps the testers from reacting to monomials of
//! other degrees.

use super::EvalRing;

#[derive(Clone)]
pub struct Graded<E: EvalRing> {
    pub inner: E,
    pub top: usize,
}

impl<E: EvalRing> Graded<E> {
    pub fn new(inner: E, top: usize) -> Self {
        Graded { inner, top }
    }

    /// Lift an inner value into one homogeneous component.
    pub fn component(&self, value: E::Value, degree: usize) -> Vec<E::Value> {
        assert!(degree <= self.top);
        let mut out = vec![self.inner.zero(); self.top + 1];
        out[degree] = value;
        out
    }
}

impl<E: EvalRing> EvalRing for Graded<E> {
    type Value = Vec<E::Value>;

    fn zero(&self) -> Self::Value {
        vec![self.inner.zero(); self.top + 1]
    }

    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value {
        a.iter().zip(b).map(|(x, y)| self.inner.add(x, y)).collect()
    }

    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value {
        let mut out = self.zero();
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if i + j > self.top {
                    break;
                }
                let prod = self.inner.mul(x, y);
                out[i + j] = self.inner.add(&out[i + j], &prod);
            }
        }
        out
    }

    fn constant(&self, c: u64) -> Self::Value {
        self.component(self.inner.constant(c), 0)
    }
}
