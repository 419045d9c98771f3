//! (n,k)-perfect hash families: colorings of [n] with k colors such
//! that every k-subset receives all-distinct colors under at least one
//! coloring.
//!
//! Small n: deterministic greedy cover over a seeded candidate stream,
//! with a targeted fallback that guarantees termination. Large n: a
//! two-level composition — modular maps [n] -> [k^2] (for every
//! k-subset, some multiplier is injective into [k^2]) composed with a
//! recursively built (k^2, k)-family.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::field::next_prime;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerfectHashFamily {
    pub n: usize,
    pub k: usize,
    pub functions: Vec<Vec<u32>>,
}

/// Cache filename for a family.
pub fn phf_filename(n: usize, k: usize) -> String {
    format!("phf-n{k}-{n}.txt")
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc.checked_mul(n - i)?;
        acc /= i + 1;
    }
    Some(acc)
}

/// Call `f` with every k-subset of [n]; stop early when `f` returns
/// false. Returns true iff no call returned false.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !f(&idx) {
            return false;
        }
        // next combination in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return true;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn injective_on(coloring: &[u32], subset: &[usize], k: usize) -> bool {
    let mut seen = vec![false; k];
    for &x in subset {
        let c = coloring[x] as usize;
        if seen[c] {
            return false;
        }
        seen[c] = true;
    }
    true
}

impl PerfectHashFamily {
    /// Exhaustive separation check over all k-subsets.
    pub fn verify(&self) -> bool {
        for_each_subset(self.n, self.k, |subset| {
            self.functions.iter().any(|f| injective_on(f, subset, self.k))
        })
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for f in &self.functions {
            let row: Vec<String> = f.iter().map(u32::to_string).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse(n: usize, k: usize, text: &str) -> Result<Self> {
        let mut functions = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: Vec<u32> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<u32>().map_err(|_| Error::Parse {
                        line: lineno + 1,
                        msg: format!("bad color `{t}`"),
                    })
                })
                .collect::<Result<_>>()?;
            if row.len() != n || row.iter().any(|&c| c as usize >= k) {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("expected {n} colors below {k}"),
                });
            }
            functions.push(row);
        }
        Ok(PerfectHashFamily { n, k, functions })
    }
}

/// Threshold on C(n,k) below which subsets are enumerated directly.
const DIRECT_LIMIT: usize = 200_000;

pub fn build_phf(n: usize, k: usize) -> Result<PerfectHashFamily> {
    if k == 0 || k > n {
        return Err(Error::Usage(format!("need 1 <= k <= n, got k={k} n={n}")));
    }
    if k == n {
        return Ok(PerfectHashFamily {
            n,
            k,
            functions: vec![(0..n as u32).collect()],
        });
    }
    if k == 1 {
        return Ok(PerfectHashFamily { n, k, functions: vec![vec![0; n]] });
    }
    match binomial(n, k) {
        Some(c) if c <= DIRECT_LIMIT => Ok(build_direct(n, k)),
        _ => build_composed(n, k),
    }
}

/// Greedy cover: seeded pseudorandom candidates scored by newly covered
/// subsets, then one tailor-made coloring per remaining subset.
fn build_direct(n: usize, k: usize) -> PerfectHashFamily {
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    for_each_subset(n, k, |s| {
        subsets.push(s.to_vec());
        true
    });
    let mut covered = vec![false; subsets.len()];
    let mut remaining = subsets.len();
    let mut functions: Vec<Vec<u32>> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c01);

    while remaining > 0 {
        let mut best: Option<(usize, Vec<u32>)> = None;
        for _ in 0..48 {
            let cand: Vec<u32> = (0..n).map(|_| rng.gen_range(0..k as u32)).collect();
            let gain = subsets
                .iter()
                .zip(&covered)
                .filter(|(s, &c)| !c && injective_on(&cand, s, k))
                .count();
            if best.as_ref().map_or(true, |(g, _)| gain > *g) {
                best = Some((gain, cand));
            }
        }
        let (gain, cand) = best.unwrap();
        if gain == 0 {
            break;
        }
        for (s, c) in subsets.iter().zip(covered.iter_mut()) {
            if !*c && injective_on(&cand, s, k) {
                *c = true;
                remaining -= 1;
            }
        }
        functions.push(cand);
    }
    // targeted fallback: separate each leftover subset directly
    for (s, c) in subsets.iter().zip(covered.iter_mut()) {
        if *c {
            continue;
        }
        let mut cand: Vec<u32> = (0..n).map(|x| (x % k) as u32).collect();
        for (color, &x) in s.iter().enumerate() {
            cand[x] = color as u32;
        }
        *c = true;
        functions.push(cand);
    }
    PerfectHashFamily { n, k, functions }
}

fn build_composed(n: usize, k: usize) -> Result<PerfectHashFamily> {
    let m = k * k;
    if binomial(m, k).map_or(true, |c| c > DIRECT_LIMIT) {
        return Err(Error::Resource(format!(
            "perfect hash family for k={k} at n={n} is beyond the supported construction"
        )));
    }
    let inner = build_direct(m, k);
    let prime = next_prime(n.max(m) as u64) as usize;
    // For every k-subset, over half the multipliers a avoid collisions
    // into [k^2]; taking all of them keeps the construction
    // deterministic.
    let mut functions = Vec::new();
    for a in 1..prime {
        for g in &inner.functions {
            let f: Vec<u32> = (0..n).map(|x| g[(a * x) % prime % m]).collect();
            functions.push(f);
        }
    }
    Ok(PerfectHashFamily { n, k, functions })
}
