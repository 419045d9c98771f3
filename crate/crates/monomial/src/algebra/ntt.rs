//! Exact d-dimensional cyclic convolution for the group Z_p^d.
//!
//! Z_p^d in characteristic p has no p-th roots of unity, so the fast
//! convolution lifts coefficients to integers and works modulo an
//! auxiliary prime q = 1 (mod p) with q > p^2 * p^d, which makes every
//! integer result exact before the final reduction mod p.

use crate::algebra::field::{is_prime, mul_mod, pow_mod};

/// Parameters for a fixed (p, d) configuration.
pub struct NttPlan {
    p: u64,
    d: usize,
    size: usize,
    q: u64,
    /// powers of the p-th root of unity mod q: root[i*j mod p]
    root_pow: Vec<u64>,
    inv_root_pow: Vec<u64>,
    inv_size: u64,
}

impl NttPlan {
    pub fn new(p: u64, d: usize) -> Self {
        let size = (p as usize).pow(d as u32);
        let bound = p * p * size as u64;
        let mut q = bound / p * p + 1;
        while q <= bound || q % p != 1 || !is_prime(q) {
            q += p;
        }
        let root = find_root_of_unity(q, p);
        let inv_root = pow_mod(root, q - 2, q);
        let root_pow: Vec<u64> = (0..p).map(|i| pow_mod(root, i, q)).collect();
        let inv_root_pow: Vec<u64> = (0..p).map(|i| pow_mod(inv_root, i, q)).collect();
        let inv_size = pow_mod(size as u64 % q, q - 2, q);
        NttPlan { p, d, size, q, root_pow, inv_root_pow, inv_size }
    }

    fn transform(&self, data: &mut [u64], inverse: bool) {
        let p = self.p as usize;
        let table = if inverse { &self.inv_root_pow } else { &self.root_pow };
        let mut stride = 1usize;
        let mut line = vec![0u64; p];
        for _axis in 0..self.d {
            let block = stride * p;
            for start in (0..self.size).step_by(block) {
                for off in 0..stride {
                    let base = start + off;
                    for j in 0..p {
                        line[j] = data[base + j * stride];
                    }
                    for out_i in 0..p {
                        let mut acc = 0u64;
                        for (j, &x) in line.iter().enumerate() {
                            let w = table[out_i * j % p];
                            acc = (acc + mul_mod(x, w, self.q)) % self.q;
                        }
                        data[base + out_i * stride] = acc;
                    }
                }
            }
            stride = block;
        }
    }

    /// Convolve two coefficient tables over Z_p (indexed mixed-radix).
    pub fn convolve(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        assert_eq!(a.len(), self.size);
        assert_eq!(b.len(), self.size);
        let mut fa: Vec<u64> = a.to_vec();
        let mut fb: Vec<u64> = b.to_vec();
        self.transform(&mut fa, false);
        self.transform(&mut fb, false);
        for i in 0..self.size {
            fa[i] = mul_mod(fa[i], fb[i], self.q);
        }
        self.transform(&mut fa, true);
        fa.iter()
            .map(|&x| mul_mod(x, self.inv_size, self.q) % self.p)
            .collect()
    }
}

fn find_root_of_unity(q: u64, p: u64) -> u64 {
    // q = 1 (mod p) and p prime, so an element of order p exists.
    for g in 2..q {
        let w = pow_mod(g, (q - 1) / p, q);
        if w != 1 {
            debug_assert_eq!(pow_mod(w, p, q), 1);
            return w;
        }
    }
    unreachable!("no element of order {p} mod {q}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_convolve(p: u64, d: usize, a: &[u64], b: &[u64]) -> Vec<u64> {
        let size = (p as usize).pow(d as u32);
        let mut out = vec![0u64; size];
        for i in 0..size {
            for j in 0..size {
                let mut k = 0usize;
                let (mut x, mut y) = (i, j);
                let mut mult = 1usize;
                for _ in 0..d {
                    let c = (x % p as usize + y % p as usize) % p as usize;
                    k += c * mult;
                    mult *= p as usize;
                    x /= p as usize;
                    y /= p as usize;
                }
                out[k] = (out[k] + a[i] * b[j]) % p;
            }
        }
        out
    }

    #[test]
    fn matches_naive_small() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for &(p, d) in &[(2u64, 3usize), (3, 2), (5, 2), (7, 1)] {
            let plan = NttPlan::new(p, d);
            let size = (p as usize).pow(d as u32);
            for _ in 0..20 {
                let a: Vec<u64> = (0..size).map(|_| rng.gen_range(0..p)).collect();
                let b: Vec<u64> = (0..size).map(|_| rng.gen_range(0..p)).collect();
                assert_eq!(plan.convolve(&a, &b), naive_convolve(p, d, &a, &b));
            }
        }
    }
}
