//! The group algebra F[Z_p^d]: dense coefficient tables indexed by the
//! p^d group vectors in mixed-radix order, with a naive convolution
//! engine and a lift-and-NTT engine that must agree bit-exactly.

use std::sync::Arc;

use crate::algebra::field::{PrimeField, PrimeModulus, Ring};
use crate::algebra::group::{independent, GroupVector};
use crate::algebra::ntt::NttPlan;
use crate::error::{Error, Result};

/// Table size above which the NTT engine is preferred (when the
/// coefficient ring is Z_p itself).
pub const NTT_THRESHOLD: usize = 1 << 10;

/// Context for F[Z_p^d] over a coefficient ring of characteristic p.
/// All element operations go through a context; elements themselves are
/// plain coefficient tables.
#[derive(Clone)]
pub struct GroupAlgebra<R: Ring> {
    pub p: u64,
    pub dim: usize,
    pub ring: R,
    size: usize,
    ntt: Option<Arc<NttPlan>>,
}

/// An element of the group algebra: exactly p^d coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct GaElement<R: Ring> {
    pub coeffs: Vec<R::Elem>,
}

impl<R: Ring> GroupAlgebra<R> {
    pub fn new(p: PrimeModulus, dim: usize, ring: R) -> Self {
        assert_eq!(ring.p(), p.get(), "coefficient ring characteristic");
        let size = (p.get() as usize)
            .checked_pow(dim as u32)
            .expect("p^d overflows addressable memory");
        let use_ntt = size >= NTT_THRESHOLD && ring.residue(&ring.one()).is_some();
        let ntt = use_ntt.then(|| Arc::new(NttPlan::new(p.get(), dim)));
        GroupAlgebra { p: p.get(), dim, ring, size, ntt }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    fn add_index(&self, i: usize, j: usize) -> usize {
        let p = self.p as usize;
        let (mut x, mut y) = (i, j);
        let mut k = 0usize;
        let mut mult = 1usize;
        for _ in 0..self.dim {
            k += (x % p + y % p) % p * mult;
            mult *= p;
            x /= p;
            y /= p;
        }
        k
    }

    fn check(&self, u: &GaElement<R>) -> Result<()> {
        if u.coeffs.len() != self.size {
            return Err(Error::Mismatch(format!(
                "element has {} coefficients, algebra expects {}",
                u.coeffs.len(),
                self.size
            )));
        }
        Ok(())
    }

    pub fn zero(&self) -> GaElement<R> {
        GaElement { coeffs: vec![self.ring.zero(); self.size] }
    }

    /// The multiplicative identity: coefficient 1 at the zero vector.
    pub fn one(&self) -> GaElement<R> {
        self.scalar(self.ring.one())
    }

    /// A scalar embedded at the zero vector.
    pub fn scalar(&self, w: R::Elem) -> GaElement<R> {
        let mut e = self.zero();
        e.coeffs[0] = w;
        e
    }

    /// The basis element for one group vector index.
    pub fn basis(&self, index: usize) -> GaElement<R> {
        let mut e = self.zero();
        e.coeffs[index] = self.ring.one();
        e
    }

    pub fn from_pairs(&self, pairs: &[(R::Elem, &GroupVector)]) -> Result<GaElement<R>> {
        let mut e = self.zero();
        for (w, v) in pairs {
            if v.p != self.p || v.dim() != self.dim {
                return Err(Error::Mismatch("vector outside this algebra".into()));
            }
            let idx = v.index();
            e.coeffs[idx] = self.ring.add(&e.coeffs[idx], w);
        }
        Ok(e)
    }

    /// The variable substitution element ((p-1) at v, 1 at the zero
    /// vector), the form the annihilation and survival laws hold for.
    pub fn substitution_element(&self, vec_index: usize) -> GaElement<R> {
        let mut e = self.zero();
        e.coeffs[0] = self.ring.one();
        let pm1 = self.ring.from_residue(self.p - 1);
        e.coeffs[vec_index] = self.ring.add(&e.coeffs[vec_index], &pm1);
        e
    }

    pub fn is_zero(&self, u: &GaElement<R>) -> bool {
        u.coeffs.iter().all(|c| self.ring.is_zero(c))
    }

    pub fn add(&self, u: &GaElement<R>, v: &GaElement<R>) -> Result<GaElement<R>> {
        self.check(u)?;
        self.check(v)?;
        Ok(GaElement {
            coeffs: u
                .coeffs
                .iter()
                .zip(&v.coeffs)
                .map(|(a, b)| self.ring.add(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, w: &R::Elem, u: &GaElement<R>) -> GaElement<R> {
        GaElement { coeffs: u.coeffs.iter().map(|a| self.ring.mul(w, a)).collect() }
    }

    /// Group convolution. Dispatches to the NTT engine for large Z_p
    /// tables, naive convolution otherwise.
    pub fn mul(&self, u: &GaElement<R>, v: &GaElement<R>) -> Result<GaElement<R>> {
        self.check(u)?;
        self.check(v)?;
        if let Some(plan) = &self.ntt {
            let a: Vec<u64> = u.coeffs.iter().map(|c| self.ring.residue(c).unwrap()).collect();
            let b: Vec<u64> = v.coeffs.iter().map(|c| self.ring.residue(c).unwrap()).collect();
            let out = plan.convolve(&a, &b);
            return Ok(GaElement {
                coeffs: out.into_iter().map(|r| self.ring.from_residue(r)).collect(),
            });
        }
        Ok(self.mul_naive_unchecked(u, v))
    }

    /// Reference engine: direct convolution over nonzero coefficient
    /// pairs.
    pub fn mul_naive(&self, u: &GaElement<R>, v: &GaElement<R>) -> Result<GaElement<R>> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.mul_naive_unchecked(u, v))
    }

    fn mul_naive_unchecked(&self, u: &GaElement<R>, v: &GaElement<R>) -> GaElement<R> {
        let mut out = self.zero();
        let nz_u: Vec<usize> =
            (0..self.size).filter(|&i| !self.ring.is_zero(&u.coeffs[i])).collect();
        let nz_v: Vec<usize> =
            (0..self.size).filter(|&i| !self.ring.is_zero(&v.coeffs[i])).collect();
        for &i in &nz_u {
            for &j in &nz_v {
                let k = self.add_index(i, j);
                let prod = self.ring.mul(&u.coeffs[i], &v.coeffs[j]);
                out.coeffs[k] = self.ring.add(&out.coeffs[k], &prod);
            }
        }
        out
    }

    pub fn pow(&self, u: &GaElement<R>, e: u64) -> Result<GaElement<R>> {
        self.check(u)?;
        let mut acc = self.one();
        let mut base = u.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base)?;
            }
        }
        Ok(acc)
    }

    /// Nonzero support of an element as (coefficient, vector) pairs.
    pub fn support(&self, u: &GaElement<R>) -> Vec<(R::Elem, GroupVector)> {
        let pm = PrimeModulus::new(self.p).unwrap();
        (0..self.size)
            .filter(|&i| !self.ring.is_zero(&u.coeffs[i]))
            .map(|i| (u.coeffs[i].clone(), GroupVector::from_index(pm, self.dim, i)))
            .collect()
    }
}

/// Nonzero support of a product of substitution elements with linearly
/// independent vectors.
#[derive(Debug, Clone)]
pub struct SurvivalExpansion {
    pub entries: Vec<(u64, GroupVector)>,
}

impl SurvivalExpansion {
    pub fn identity_coefficient(&self) -> Option<u64> {
        self.entries.iter().find(|(_, v)| v.is_zero()).map(|(c, _)| *c)
    }
}

impl GroupAlgebra<PrimeField> {
    /// Expand prod_i ((p-1)v_i + v_0)^{m_i} for linearly independent
    /// vectors and exponents in [1, p). The support has exactly
    /// prod(m_i + 1) entries and the identity vector carries
    /// coefficient 1.
    pub fn survival_expand(
        &self,
        vectors: &[GroupVector],
        exponents: &[u64],
    ) -> Result<SurvivalExpansion> {
        if vectors.len() != exponents.len() {
            return Err(Error::Usage("one exponent per vector".into()));
        }
        if exponents.iter().any(|&m| m == 0 || m >= self.p) {
            return Err(Error::Usage(format!("exponents must lie in [1, {})", self.p)));
        }
        for v in vectors {
            if v.p != self.p || v.dim() != self.dim {
                return Err(Error::Mismatch("vector outside this algebra".into()));
            }
        }
        if !independent(vectors) {
            return Err(Error::Precondition(
                "substitution vectors must be linearly independent over Z_p".into(),
            ));
        }
        let mut acc = self.one();
        for (v, &m) in vectors.iter().zip(exponents) {
            let factor = self.substitution_element(v.index());
            acc = self.mul(&acc, &self.pow(&factor, m)?)?;
        }
        Ok(SurvivalExpansion { entries: self.support(&acc) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pm(v: u64) -> PrimeModulus {
        PrimeModulus::new(v).unwrap()
    }

    fn zp_algebra(p: u64, d: usize) -> GroupAlgebra<PrimeField> {
        GroupAlgebra::new(pm(p), d, PrimeField { p })
    }

    fn random_elem(ga: &GroupAlgebra<PrimeField>, rng: &mut ChaCha8Rng) -> GaElement<PrimeField> {
        GaElement { coeffs: (0..ga.size()).map(|_| rng.gen_range(0..ga.p)).collect() }
    }

    #[test]
    fn add_zero_and_char() {
        let ga = zp_algebra(2, 1);
        let u = ga.from_pairs(&[
            (1, &GroupVector::new(pm(2), vec![0])),
            (1, &GroupVector::new(pm(2), vec![1])),
        ])
        .unwrap();
        let z = ga.zero();
        assert_eq!(ga.add(&u, &z).unwrap(), u);
        // characteristic 2: u + u = 0
        assert!(ga.is_zero(&ga.add(&u, &u).unwrap()));

        let ga3 = zp_algebra(3, 1);
        let two = ga3.scalar(2);
        let sum = ga3.add(&two, &two).unwrap();
        assert_eq!(sum, ga3.scalar(1));
    }

    #[test]
    fn mul_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ga = zp_algebra(3, 2);
        let u = random_elem(&ga, &mut rng);
        assert_eq!(ga.mul(&u, &ga.one()).unwrap(), u);
    }

    #[test]
    fn square_annihilates_mod2() {
        // (0 + 1)^2 = 0 in Z_2[Z_2]
        let ga = zp_algebra(2, 1);
        let u = ga.substitution_element(1);
        assert!(ga.is_zero(&ga.mul(&u, &u).unwrap()));
    }

    #[test]
    fn square_expansion_mod3() {
        // (2*(1) + (0))^2 = (2) + (1) + (0) in Z_3[Z_3]
        let ga = zp_algebra(3, 1);
        let u = ga.substitution_element(1);
        let sq = ga.mul(&u, &u).unwrap();
        assert_eq!(sq.coeffs, vec![1, 1, 1]);
        let viapow = ga.pow(&u, 2).unwrap();
        assert_eq!(viapow, sq);
    }

    #[test]
    fn scale_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ga = zp_algebra(3, 2);
        let u = random_elem(&ga, &mut rng);
        assert!(ga.is_zero(&ga.scale(&0, &u)));
        assert_eq!(ga.scale(&1, &u), u);
        assert_eq!(ga.scale(&2, &ga.scalar(2)), ga.scalar(1));
    }

    #[test]
    fn pow_zero_gives_one() {
        let ga = zp_algebra(3, 2);
        let u = ga.substitution_element(4);
        assert_eq!(ga.pow(&u, 0).unwrap(), ga.one());
    }

    #[test]
    fn substitution_pth_power_vanishes() {
        let ga = zp_algebra(3, 2);
        let v = GroupVector::new(pm(3), vec![1, 0]);
        let u = ga.substitution_element(v.index());
        assert!(ga.is_zero(&ga.pow(&u, 3).unwrap()));
    }

    #[test]
    fn survival_examples() {
        // p=2, two independent vectors, exponents (1,1): 4 entries
        let ga = zp_algebra(2, 2);
        let e1 = GroupVector::new(pm(2), vec![1, 0]);
        let e2 = GroupVector::new(pm(2), vec![0, 1]);
        let s = ga.survival_expand(&[e1, e2], &[1, 1]).unwrap();
        assert_eq!(s.entries.len(), 4);
        assert_eq!(s.identity_coefficient(), Some(1));

        // p=3, single vector, exponent 2: 3 entries
        let ga = zp_algebra(3, 1);
        let v = GroupVector::new(pm(3), vec![1]);
        let s = ga.survival_expand(&[v], &[2]).unwrap();
        assert_eq!(s.entries.len(), 3);

        // p=3, standard basis of Z_3^2, exponents (2,2): 9 entries
        let ga = zp_algebra(3, 2);
        let e1 = GroupVector::new(pm(3), vec![1, 0]);
        let e2 = GroupVector::new(pm(3), vec![0, 1]);
        let s = ga.survival_expand(&[e1, e2], &[2, 2]).unwrap();
        assert_eq!(s.entries.len(), 9);
        assert_eq!(s.identity_coefficient(), Some(1));
    }

    #[test]
    fn survival_rejects_dependent_vectors() {
        let ga = zp_algebra(3, 2);
        let v = GroupVector::new(pm(3), vec![1, 2]);
        let w = v.pow(2);
        assert!(matches!(
            ga.survival_expand(&[v, w], &[1, 1]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn ring_axioms_randomized() {
        for &(p, d) in &[(2u64, 3usize), (3, 2), (5, 3)] {
            let ga = zp_algebra(p, d);
            let mut rng = ChaCha8Rng::seed_from_u64(p * 100 + d as u64);
            for _ in 0..1000 {
                let a = random_elem(&ga, &mut rng);
                let b = random_elem(&ga, &mut rng);
                let c = random_elem(&ga, &mut rng);
                let ab_c = ga.mul(&ga.mul(&a, &b).unwrap(), &c).unwrap();
                let a_bc = ga.mul(&a, &ga.mul(&b, &c).unwrap()).unwrap();
                assert_eq!(ab_c, a_bc, "associativity p={p} d={d}");
                assert_eq!(
                    ga.mul(&a, &b).unwrap(),
                    ga.mul(&b, &a).unwrap(),
                    "commutativity p={p} d={d}"
                );
                let lhs = ga.mul(&a, &ga.add(&b, &c).unwrap()).unwrap();
                let rhs = ga
                    .add(&ga.mul(&a, &b).unwrap(), &ga.mul(&a, &c).unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs, "distributivity p={p} d={d}");
            }
        }
    }

    #[test]
    fn engines_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for &(p, d) in &[(2u64, 2usize), (2, 5), (3, 3), (5, 2), (5, 3)] {
            let ga = zp_algebra(p, d);
            let plan = crate::algebra::ntt::NttPlan::new(p, d);
            for _ in 0..100 {
                let a = random_elem(&ga, &mut rng);
                let b = random_elem(&ga, &mut rng);
                let naive = ga.mul_naive(&a, &b).unwrap();
                let fast = plan.convolve(&a.coeffs, &b.coeffs);
                assert_eq!(naive.coeffs, fast, "p={p} d={d}");
            }
        }
    }
}
