//! Coefficient rings: the prime field `Z_p`, extension fields `GF(p^l)`
//! built from an irreducible modulus polynomial, and the quotient ring
//! `Z_p[y]/r(y)` used by the modulus-polynomial identity test.

use crate::error::{Error, Result};
use rand::Rng;

/// A verified small prime modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(PrimeModulus(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }
}

/// Deterministic trial-division primality check; moduli here are tiny.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn next_prime(mut n: u64) -> u64 {
    loop {
        n += 1;
        if is_prime(n) {
            return n;
        }
    }
}

/// A commutative coefficient ring of characteristic p. Group-algebra
/// elements and circuit evaluation are generic over this.
pub trait Ring: Clone + Send + Sync {
    type Elem: Clone + PartialEq + std::fmt::Debug + Send + Sync;

    fn p(&self) -> u64;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Embed a Z_p residue.
    fn from_residue(&self, r: u64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// For Z_p itself, the residue back; rings where this is `Some`
    /// qualify for the lift-and-NTT convolution engine.
    fn residue(&self, _a: &Self::Elem) -> Option<u64> {
        None
    }
}

/// The prime field Z_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    pub p: u64,
}

impl PrimeField {
    pub fn new(p: PrimeModulus) -> Self {
        PrimeField { p: p.get() }
    }

    pub fn inv(&self, a: u64) -> u64 {
        // Fermat: a^(p-2) mod p.
        debug_assert!(a % self.p != 0);
        pow_mod(a, self.p - 2, self.p)
    }
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

impl Ring for PrimeField {
    type Elem = u64;

    fn p(&self) -> u64 {
        self.p
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        (a * b) % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a % self.p) % self.p
    }
    fn from_residue(&self, r: u64) -> u64 {
        r % self.p
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn residue(&self, a: &u64) -> Option<u64> {
        Some(*a)
    }
}

/// Dense polynomial over Z_p, low-order coefficient first.
pub type Poly = Vec<u64>;

fn poly_trim(v: &mut Poly) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

pub fn poly_add(p: u64, a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0);
        out[i] = x % p;
    }
    poly_trim(&mut out);
    out
}

pub fn poly_mul(p: u64, a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    poly_trim(&mut out);
    out
}

/// Remainder of `a` modulo the monic polynomial `m`.
pub fn poly_rem(p: u64, a: &Poly, m: &Poly) -> Poly {
    debug_assert_eq!(*m.last().unwrap(), 1, "modulus must be monic");
    let mut r = a.clone();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + (p - 1) * lead % p * c) % p;
            }
        }
        r.pop();
        poly_trim(&mut r);
        if r.len() <= dm {
            break;
        }
    }
    poly_trim(&mut r);
    r
}

fn poly_eval(p: u64, a: &Poly, x: u64) -> u64 {
    let mut acc = 0u64;
    for &c in a.iter().rev() {
        acc = (acc * x + c) % p;
    }
    acc
}

/// Check irreducibility of a monic polynomial over Z_p by root search
/// plus trial division over all monic factors of degree <= deg/2.
pub fn poly_is_irreducible(p: u64, f: &Poly) -> bool {
    let deg = f.len() - 1;
    if deg == 0 {
        return false;
    }
    if deg == 1 {
        return true;
    }
    for x in 0..p {
        if poly_eval(p, f, x) == 0 {
            return false;
        }
    }
    for d in 2..=deg / 2 {
        // all monic polynomials of degree d
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut g: Poly = Vec::with_capacity(d + 1);
            let mut v = idx;
            for _ in 0..d {
                g.push(v % p);
                v /= p;
            }
            g.push(1);
            if poly_rem(p, f, &g).is_empty() {
                return false;
            }
        }
    }
    true
}

/// The extension field GF(p^l) with a deterministically chosen modulus
/// polynomial (the lexicographically smallest monic irreducible, reading
/// low-order coefficients as the least significant base-p digits).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtField {
    pub p: u64,
    pub ell: usize,
    pub modulus: Poly,
}

impl ExtField {
    pub fn new(p: PrimeModulus, ell: usize) -> Self {
        assert!(ell >= 1);
        let p = p.get();
        let modulus = (0..p.pow(ell as u32))
            .map(|idx| {
                let mut f: Poly = Vec::with_capacity(ell + 1);
                let mut v = idx;
                for _ in 0..ell {
                    f.push(v % p);
                    v /= p;
                }
                f.push(1);
                f
            })
            .find(|f| poly_is_irreducible(p, f))
            .expect("an irreducible polynomial of every degree exists");
        ExtField { p, ell, modulus }
    }

    pub fn size(&self) -> u64 {
        self.p.pow(self.ell as u32)
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Poly {
        let mut v: Poly = (0..self.ell).map(|_| rng.gen_range(0..self.p)).collect();
        poly_trim(&mut v);
        v
    }

    pub fn pow(&self, a: &Poly, mut e: u64) -> Poly {
        let mut acc = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &Poly) -> Poly {
        assert!(!a.is_empty(), "zero has no inverse");
        self.pow(a, self.size() - 2)
    }
}

impl Ring for ExtField {
    type Elem = Poly;

    fn p(&self) -> u64 {
        self.p
    }
    fn zero(&self) -> Poly {
        vec![]
    }
    fn one(&self) -> Poly {
        vec![1]
    }
    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        poly_add(self.p, a, b)
    }
    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        poly_rem(self.p, &poly_mul(self.p, a, b), &self.modulus)
    }
    fn neg(&self, a: &Poly) -> Poly {
        a.iter().map(|&c| (self.p - c) % self.p).collect::<Poly>()
    }
    fn from_residue(&self, r: u64) -> Poly {
        let r = r % self.p;
        if r == 0 {
            vec![]
        } else {
            vec![r]
        }
    }
    fn is_zero(&self, a: &Poly) -> bool {
        a.is_empty()
    }
}

/// The quotient ring Z_p[y]/r(y) for a monic (not necessarily
/// irreducible) r, as used by the Agrawal-Biswas style identity test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyQuotient {
    pub p: u64,
    pub modulus: Poly,
}

impl PolyQuotient {
    pub fn new(p: PrimeModulus, modulus: Poly) -> Self {
        assert!(modulus.len() >= 2 && *modulus.last().unwrap() == 1);
        PolyQuotient { p: p.get(), modulus }
    }

    /// y^e mod r(y), for the Kronecker substitution exponents.
    pub fn y_pow(&self, e: u128) -> Poly {
        let mut acc: Poly = vec![1];
        let mut b: Poly = vec![0, 1];
        b = poly_rem(self.p, &b, &self.modulus);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }
}

impl Ring for PolyQuotient {
    type Elem = Poly;

    fn p(&self) -> u64 {
        self.p
    }
    fn zero(&self) -> Poly {
        vec![]
    }
    fn one(&self) -> Poly {
        vec![1]
    }
    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        poly_add(self.p, a, b)
    }
    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        poly_rem(self.p, &poly_mul(self.p, a, b), &self.modulus)
    }
    fn neg(&self, a: &Poly) -> Poly {
        a.iter().map(|&c| (self.p - c) % self.p).collect::<Poly>()
    }
    fn from_residue(&self, r: u64) -> Poly {
        let r = r % self.p;
        if r == 0 {
            vec![]
        } else {
            vec![r]
        }
    }
    fn is_zero(&self, a: &Poly) -> bool {
        a.is_empty()
    }
}
