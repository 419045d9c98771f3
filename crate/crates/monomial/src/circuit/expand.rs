//! Brute-force sum-product expansion oracle: exact monomial tables mod
//! p, computed bottom-up on sparse maps with a hard entry cap.

use std::collections::HashMap;

use super::{Circuit, Gate, Monomial};
use crate::algebra::PrimeModulus;
use crate::error::{Error, Result};

pub const DEFAULT_EXPANSION_CAP: usize = 1_000_000;

/// Exact expansion: monomial -> nonzero coefficient in Z_p.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionTable {
    pub p: u64,
    pub entries: HashMap<Monomial, u64>,
}

impl ExpansionTable {
    /// True plus a witness iff some entry has degree k and every
    /// exponent in [1, p); p-monomial existence with c = p.
    pub fn has_p_monomial(&self, k: u64) -> Option<&Monomial> {
        self.entries
            .keys()
            .filter(|m| m.degree() == k && m.is_c_monomial(self.p))
            .min()
    }

    pub fn has_multilinear(&self, k: u64) -> Option<&Monomial> {
        self.entries
            .keys()
            .filter(|m| m.degree() == k && m.is_multilinear())
            .min()
    }

    /// Evaluate the table at a scalar point mod p.
    pub fn eval_at(&self, point: &[u64]) -> u64 {
        let mut acc = 0u64;
        for (m, &c) in &self.entries {
            let mut term = c;
            for (&v, &e) in &m.0 {
                for _ in 0..e {
                    term = term * (point[v] % self.p) % self.p;
                }
            }
            acc = (acc + term) % self.p;
        }
        acc
    }

    pub fn max_degree(&self) -> u64 {
        self.entries.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// p-monomial witness counting only the first `n_base` variables;
    /// later variables (the augmentation y's) ride along freely.
    pub fn has_base_p_monomial(&self, k: u64, n_base: usize) -> Option<&Monomial> {
        self.entries
            .keys()
            .filter(|m| {
                let base = m.0.iter().filter(|(&v, _)| v < n_base);
                base.clone().map(|(_, &e)| e as u64).sum::<u64>() == k
                    && base.clone().all(|(_, &e)| (e as u64) < self.p)
            })
            .min()
    }
}

/// Whether the commutative expansion of the y-augmented circuit keeps
/// some entry whose x-part is a degree-k p-monomial. This is the
/// quantity the substitution testers actually probe: a base monomial
/// whose derivations cancel only across different multiplication-gate
/// sets is still present here.
pub fn augmented_presence(
    circuit: &super::Circuit,
    p: PrimeModulus,
    k: u64,
    cap: usize,
) -> Result<bool> {
    let ac = super::augment_circuit(circuit);
    let tbl = expand_oracle(&ac.circuit, p, cap)?;
    Ok(tbl.has_base_p_monomial(k, ac.base_vars).is_some())
}

type Table = HashMap<Monomial, u64>;

fn table_add(p: u64, cap: usize, a: &Table, b: &Table) -> Result<Table> {
    let mut out = a.clone();
    for (m, &c) in b {
        let e = out.entry(m.clone()).or_insert(0);
        *e = (*e + c) % p;
        if *e == 0 {
            out.remove(m);
        }
    }
    check_cap(cap, out.len())?;
    Ok(out)
}

fn table_mul(p: u64, cap: usize, a: &Table, b: &Table) -> Result<Table> {
    let mut out: Table = HashMap::new();
    for (ma, &ca) in a {
        for (mb, &cb) in b {
            let m = ma.product(mb);
            let e = out.entry(m).or_insert(0);
            *e = (*e + ca * cb) % p;
        }
        check_cap(cap, out.len())?;
    }
    out.retain(|_, c| *c != 0);
    Ok(out)
}

fn check_cap(cap: usize, len: usize) -> Result<()> {
    if len > cap {
        Err(Error::Resource(format!(
            "expansion exceeds the {cap}-monomial cap; instance too large for the oracle"
        )))
    } else {
        Ok(())
    }
}

/// Expand the circuit into its exact monomial table mod p.
pub fn expand_oracle(circuit: &Circuit, p: PrimeModulus, cap: usize) -> Result<ExpansionTable> {
    let p = p.get();
    let mut tables: Vec<Table> = Vec::with_capacity(circuit.gates.len());
    for gate in &circuit.gates {
        let t = match gate {
            Gate::Input(i) => HashMap::from([(Monomial::var(*i), 1u64)]),
            Gate::Const(c) => {
                let c = *c % p;
                if c == 0 {
                    HashMap::new()
                } else {
                    HashMap::from([(Monomial::one(), c)])
                }
            }
            Gate::Add(cs) => {
                let mut acc = tables[cs[0]].clone();
                for &child in &cs[1..] {
                    acc = table_add(p, cap, &acc, &tables[child])?;
                }
                acc
            }
            Gate::Mul(a, b) => table_mul(p, cap, &tables[*a], &tables[*b])?,
        };
        tables.push(t);
    }
    Ok(ExpansionTable { p, entries: tables.swap_remove(circuit.output) })
}
