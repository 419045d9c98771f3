//! Clause/term representation of structured polynomials (products of
//! clause sums), their textual format, and conversion to circuits.
//!
//! File format: one clause per line; a clause is terms joined by `+`;
//! a term is variables joined by `*`, each with an optional `^<exp>`.
//! In product form a line `---` separates the general clause list from
//! the single-variable clause list.

use std::collections::HashMap;

use super::{Circuit, Monomial};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub terms: Vec<Monomial>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeTag {
    /// Every term is a single variable.
    PiSigma,
    /// Terms are bounded-degree products.
    PiSigmaPi,
    /// A general clause list times a single-variable clause list.
    Product,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuredPoly {
    pub clauses: Vec<Clause>,
    /// In product form, clauses[..split] is the general factor and
    /// clauses[split..] the single-variable factor.
    pub split: Option<usize>,
    pub var_names: Vec<String>,
}

impl StructuredPoly {
    pub fn shape(&self) -> ShapeTag {
        if self.split.is_some() {
            return ShapeTag::Product;
        }
        let single_vars = self
            .clauses
            .iter()
            .flat_map(|c| &c.terms)
            .all(|t| t.degree() == 1);
        if single_vars {
            ShapeTag::PiSigma
        } else {
            ShapeTag::PiSigmaPi
        }
    }

    /// m = clause count, s = max terms per clause, t = max term degree.
    pub fn bounds(&self) -> (usize, usize, u64) {
        let m = self.clauses.len();
        let s = self.clauses.iter().map(|c| c.terms.len()).max().unwrap_or(0);
        let t = self
            .clauses
            .iter()
            .flat_map(|c| &c.terms)
            .map(|m| m.degree())
            .max()
            .unwrap_or(0);
        (m, s, t)
    }

    /// Check the declared bounds for one factor range.
    pub fn validate_shape(&self, max_terms: usize, single_var_only: bool, range: std::ops::Range<usize>) -> Result<()> {
        for (i, clause) in self.clauses[range].iter().enumerate() {
            if clause.terms.len() > max_terms {
                return Err(Error::Validation(format!(
                    "clause {} has {} terms, at most {max_terms} allowed",
                    i + 1,
                    clause.terms.len()
                )));
            }
            if single_var_only {
                if let Some(t) = clause.terms.iter().find(|t| t.degree() != 1) {
                    return Err(Error::Validation(format!(
                        "clause {} contains the non-single-variable term of degree {}",
                        i + 1,
                        t.degree()
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn parse_structured(text: &str) -> Result<StructuredPoly> {
    let mut clauses = Vec::new();
    let mut split = None;
    let mut var_names: Vec<String> = Vec::new();
    let mut var_ids: HashMap<String, usize> = HashMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line == "---" {
            if split.is_some() {
                return Err(Error::Parse { line: lineno, msg: "duplicate `---` separator".into() });
            }
            split = Some(clauses.len());
            continue;
        }
        let mut terms = Vec::new();
        for term_text in line.split('+') {
            let term_text = term_text.trim();
            if term_text.is_empty() {
                return Err(Error::Parse { line: lineno, msg: "empty term".into() });
            }
            let mut mono = Monomial::one();
            for factor in term_text.split('*') {
                let factor = factor.trim();
                let (name, exp) = match factor.split_once('^') {
                    Some((n, e)) => {
                        let exp: u32 = e.trim().parse().map_err(|_| Error::Parse {
                            line: lineno,
                            msg: format!("bad exponent `{e}`"),
                        })?;
                        if exp == 0 {
                            return Err(Error::Parse {
                                line: lineno,
                                msg: "exponent must be positive".into(),
                            });
                        }
                        (n.trim(), exp)
                    }
                    None => (factor, 1),
                };
                if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("invalid variable name `{name}`"),
                    });
                }
                let id = *var_ids.entry(name.to_string()).or_insert_with(|| {
                    var_names.push(name.to_string());
                    var_names.len() - 1
                });
                *mono.0.entry(id).or_insert(0) += exp;
            }
            terms.push(mono);
        }
        clauses.push(Clause { terms });
    }
    if clauses.is_empty() {
        return Err(Error::Parse { line: 1, msg: "no clauses".into() });
    }
    Ok(StructuredPoly { clauses, split, var_names })
}

pub fn serialize_structured(sp: &StructuredPoly) -> String {
    let mut out = String::new();
    for (i, clause) in sp.clauses.iter().enumerate() {
        if sp.split == Some(i) {
            out.push_str("---\n");
        }
        let terms: Vec<String> = clause
            .terms
            .iter()
            .map(|m| {
                m.0.iter()
                    .map(|(&v, &e)| {
                        if e == 1 {
                            sp.var_names[v].clone()
                        } else {
                            format!("{}^{}", sp.var_names[v], e)
                        }
                    })
                    .collect::<Vec<_>>()
                    .join("*")
            })
            .collect();
        out.push_str(&terms.join(" + "));
        out.push('\n');
    }
    out
}

/// Build a circuit computing the clause product; its expansion equals
/// the product's expansion mod p.
pub fn structured_to_circuit(sp: &StructuredPoly) -> Circuit {
    let mut circuit = Circuit::new();
    let inputs: Vec<usize> = sp.var_names.iter().map(|n| circuit.input(n)).collect();
    let mut clause_gates = Vec::with_capacity(sp.clauses.len());
    for clause in &sp.clauses {
        let mut term_gates = Vec::with_capacity(clause.terms.len());
        for term in &clause.terms {
            let mut factors: Vec<usize> = Vec::new();
            for (&v, &e) in &term.0 {
                for _ in 0..e {
                    factors.push(inputs[v]);
                }
            }
            let gate = match factors.len() {
                0 => circuit.constant(1),
                _ => {
                    let mut acc = factors[0];
                    for &f in &factors[1..] {
                        acc = circuit.mul(acc, f);
                    }
                    acc
                }
            };
            term_gates.push(gate);
        }
        let gate = if term_gates.len() == 1 {
            term_gates[0]
        } else {
            circuit.add(term_gates)
        };
        clause_gates.push(gate);
    }
    let mut acc = clause_gates[0];
    for &g in &clause_gates[1..] {
        acc = circuit.mul(acc, g);
    }
    circuit.set_output(acc);
    circuit
}
