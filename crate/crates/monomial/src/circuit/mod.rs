//! Arithmetic-circuit IR: DAG of + gates (unbounded fan-in) and x gates
//! (fan-in two) over named variables, with a generic ring evaluator,
//! the y-variable augmentation, and a brute-force expansion oracle.

pub mod expand;
pub mod graded;
pub mod parse;
pub mod structured;

use std::collections::BTreeMap;

use crate::algebra::field::{PrimeField, Ring};
use crate::algebra::ga::{GaElement, GroupAlgebra};
use crate::error::{Error, Result};

pub use expand::ExpansionTable;
pub use graded::Graded;
pub use structured::{Clause, ShapeTag, StructuredPoly};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gate {
    Input(usize),
    Const(u64),
    Add(Vec<usize>),
    Mul(usize, usize),
}

/// An arithmetic circuit. Gates are stored in topological order:
/// children strictly precede parents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    pub gates: Vec<Gate>,
    pub output: usize,
    pub var_names: Vec<String>,
    pub gate_names: Vec<String>,
}

impl Circuit {
    pub fn new() -> Self {
        Circuit { gates: vec![], output: 0, var_names: vec![], gate_names: vec![] }
    }

    pub fn n_vars(&self) -> usize {
        self.var_names.len()
    }

    /// Gate count s(n).
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    fn push(&mut self, gate: Gate, name: Option<String>) -> usize {
        let id = self.gates.len();
        let name = name.unwrap_or_else(|| format!("g{}", id + 1));
        self.gates.push(gate);
        self.gate_names.push(name);
        id
    }

    pub fn input(&mut self, name: &str) -> usize {
        if let Some(var) = self.var_names.iter().position(|n| n == name) {
            // reuse the existing input gate for this variable
            if let Some(gid) = self
                .gates
                .iter()
                .position(|g| matches!(g, Gate::Input(v) if *v == var))
            {
                return gid;
            }
            return self.push(Gate::Input(var), Some(name.to_string()));
        }
        let var = self.var_names.len();
        self.var_names.push(name.to_string());
        self.push(Gate::Input(var), Some(name.to_string()))
    }

    /// A fresh gate reading an already-declared variable, for formulas
    /// that mention a variable more than once while keeping every gate
    /// fan-out 1.
    pub fn input_copy(&mut self, var: usize) -> usize {
        assert!(var < self.var_names.len(), "unknown variable id");
        let id = self.gates.len();
        let name = format!("{}_r{}", self.var_names[var], id + 1);
        self.push(Gate::Input(var), Some(name))
    }

    pub fn constant(&mut self, c: u64) -> usize {
        self.push(Gate::Const(c), None)
    }

    pub fn add(&mut self, children: Vec<usize>) -> usize {
        assert!(!children.is_empty(), "add fan-in must be >= 1");
        self.push(Gate::Add(children), None)
    }

    pub fn mul(&mut self, a: usize, b: usize) -> usize {
        self.push(Gate::Mul(a, b), None)
    }

    pub fn set_output(&mut self, id: usize) {
        self.output = id;
    }

    pub fn children(&self, id: usize) -> Vec<usize> {
        match &self.gates[id] {
            Gate::Input(_) | Gate::Const(_) => vec![],
            Gate::Add(cs) => cs.clone(),
            Gate::Mul(a, b) => vec![*a, *b],
        }
    }

    /// True iff every gate has fan-out at most one (the underlying DAG
    /// is a tree).
    pub fn is_formula(&self) -> bool {
        let mut fanout = vec![0usize; self.gates.len()];
        for id in 0..self.gates.len() {
            for c in self.children(id) {
                fanout[c] += 1;
            }
        }
        fanout.iter().all(|&f| f <= 1)
    }

    /// Upper bound on the output degree via interval arithmetic.
    pub fn degree_bound(&self) -> u64 {
        let mut deg = vec![0u64; self.gates.len()];
        for id in 0..self.gates.len() {
            deg[id] = match &self.gates[id] {
                Gate::Input(_) => 1,
                Gate::Const(_) => 0,
                Gate::Add(cs) => cs.iter().map(|&c| deg[c]).max().unwrap_or(0),
                Gate::Mul(a, b) => deg[*a] + deg[*b],
            };
        }
        deg[self.output]
    }

    pub fn mul_gate_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Mul(_, _))).count()
    }
}

impl Default for Circuit {
    fn default() -> Self {
        Self::new()
    }
}

/// Ring interface the evaluator needs: add, mul, and embedding of Z_p
/// constants.
pub trait EvalRing: Sync {
    type Value: Clone + Send;
    fn zero(&self) -> Self::Value;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn constant(&self, c: u64) -> Self::Value;
}

impl EvalRing for PrimeField {
    type Value = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        (a * b) % self.p
    }
    fn constant(&self, c: u64) -> u64 {
        c % self.p
    }
}

impl<R: Ring> EvalRing for GroupAlgebra<R> {
    type Value = GaElement<R>;
    fn zero(&self) -> GaElement<R> {
        GroupAlgebra::zero(self)
    }
    fn add(&self, a: &GaElement<R>, b: &GaElement<R>) -> GaElement<R> {
        GroupAlgebra::add(self, a, b).expect("elements from the same algebra")
    }
    fn mul(&self, a: &GaElement<R>, b: &GaElement<R>) -> GaElement<R> {
        GroupAlgebra::mul(self, a, b).expect("elements from the same algebra")
    }
    fn constant(&self, c: u64) -> GaElement<R> {
        self.scalar(self.ring.from_residue(c))
    }
}

/// Evaluate the circuit in one topological pass. The assignment must
/// cover every variable.
pub fn eval_circuit<E: EvalRing>(
    circuit: &Circuit,
    ring: &E,
    assignment: &[E::Value],
) -> Result<E::Value> {
    if assignment.len() < circuit.n_vars() {
        return Err(Error::Usage(format!(
            "assignment covers {} of {} variables",
            assignment.len(),
            circuit.n_vars()
        )));
    }
    let mut values: Vec<E::Value> = Vec::with_capacity(circuit.gates.len());
    for gate in &circuit.gates {
        let v = match gate {
            Gate::Input(i) => assignment[*i].clone(),
            Gate::Const(c) => ring.constant(*c),
            Gate::Add(cs) => {
                let mut acc = values[cs[0]].clone();
                for &c in &cs[1..] {
                    acc = ring.add(&acc, &values[c]);
                }
                acc
            }
            Gate::Mul(a, b) => ring.mul(&values[*a], &values[*b]),
        };
        values.push(v);
    }
    Ok(values.swap_remove(circuit.output))
}

/// The circuit C' of the substitution testers: every multiplication
/// gate gains a companion multiplication by a fresh y-variable.
#[derive(Debug, Clone)]
pub struct AugmentedCircuit {
    pub circuit: Circuit,
    pub base_vars: usize,
    pub h: usize,
}

impl AugmentedCircuit {
    /// Split an assignment into the x-part and y-part this circuit
    /// expects (x values first, then y values).
    pub fn assemble<V: Clone>(&self, xs: &[V], ys: &[V]) -> Vec<V> {
        let mut out = Vec::with_capacity(self.base_vars + self.h);
        out.extend_from_slice(xs);
        out.extend_from_slice(ys);
        out
    }
}

pub fn augment_circuit(base: &Circuit) -> AugmentedCircuit {
    let mut out = Circuit::new();
    out.var_names = base.var_names.clone();
    let n = base.n_vars();
    let mut map = vec![0usize; base.gates.len()];
    let mut h = 0usize;
    for (id, gate) in base.gates.iter().enumerate() {
        let new_id = match gate {
            Gate::Input(i) => out.push(Gate::Input(*i), Some(base.gate_names[id].clone())),
            Gate::Const(c) => out.push(Gate::Const(*c), Some(base.gate_names[id].clone())),
            Gate::Add(cs) => {
                let cs = cs.iter().map(|&c| map[c]).collect();
                out.push(Gate::Add(cs), Some(base.gate_names[id].clone()))
            }
            Gate::Mul(a, b) => {
                let g = out.push(Gate::Mul(map[*a], map[*b]), Some(base.gate_names[id].clone()));
                h += 1;
                let y_var = out.var_names.len();
                out.var_names.push(format!("y{h}"));
                let y_gate = out.push(Gate::Input(y_var), Some(format!("y{h}")));
                out.push(Gate::Mul(g, y_gate), Some(format!("{}'", base.gate_names[id])))
            }
        };
        map[id] = new_id;
    }
    out.output = map[base.output];
    AugmentedCircuit { circuit: out, base_vars: n, h }
}

/// A monomial: sparse exponent map, variable id -> positive exponent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(pub BTreeMap<usize, u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn var(id: usize) -> Self {
        Monomial(BTreeMap::from([(id, 1)]))
    }

    pub fn degree(&self) -> u64 {
        self.0.values().map(|&e| e as u64).sum()
    }

    pub fn is_multilinear(&self) -> bool {
        self.0.values().all(|&e| e == 1)
    }

    /// All exponents in [1, c).
    pub fn is_c_monomial(&self, c: u64) -> bool {
        self.0.values().all(|&e| (e as u64) < c)
    }

    pub fn product(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (&v, &e) in &other.0 {
            *out.entry(v).or_insert(0) += e;
        }
        Monomial(out)
    }

    pub fn shares_variable(&self, other: &Monomial) -> bool {
        self.0.keys().any(|v| other.0.contains_key(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PrimeModulus;

    fn xy_times_z() -> Circuit {
        // (x1+x2)*x3
        let mut c = Circuit::new();
        let x1 = c.input("x1");
        let x2 = c.input("x2");
        let x3 = c.input("x3");
        let s = c.add(vec![x1, x2]);
        let m = c.mul(s, x3);
        c.set_output(m);
        c
    }

    #[test]
    fn eval_scalar() {
        let c = xy_times_z();
        let f = PrimeField { p: 5 };
        assert_eq!(eval_circuit(&c, &f, &[1, 2, 3]).unwrap(), 4);
    }

    #[test]
    fn eval_all_zero() {
        let c = xy_times_z();
        let f = PrimeField { p: 3 };
        assert_eq!(eval_circuit(&c, &f, &[0, 0, 0]).unwrap(), 0);
    }

    #[test]
    fn eval_missing_assignment() {
        let c = xy_times_z();
        let f = PrimeField { p: 5 };
        assert!(eval_circuit(&c, &f, &[1, 2]).is_err());
    }

    #[test]
    fn eval_dependent_substitution_annihilates() {
        // (x1+x2)^2 over Z_2[Z_2] with x1 = x2 = (1) + (0) gives 0
        let mut c = Circuit::new();
        let x1 = c.input("x1");
        let x2 = c.input("x2");
        let s = c.add(vec![x1, x2]);
        let m = c.mul(s, s);
        c.set_output(m);
        let p = PrimeModulus::new(2).unwrap();
        let ga = GroupAlgebra::new(p, 1, PrimeField { p: 2 });
        let sub = ga.substitution_element(1);
        let out = eval_circuit(&c, &ga, &[sub.clone(), sub]).unwrap();
        assert!(ga.is_zero(&out));
    }

    #[test]
    fn degree_bounds() {
        let mut c = Circuit::new();
        let x1 = c.input("x1");
        let x2 = c.input("x2");
        let m = c.mul(x1, x2);
        c.set_output(m);
        assert_eq!(c.degree_bound(), 2);

        let mut c = Circuit::new();
        let x1 = c.input("x1");
        let x2 = c.input("x2");
        let s = c.add(vec![x1, x2]);
        let m = c.mul(s, s);
        c.set_output(m);
        assert_eq!(c.degree_bound(), 2);
    }

    #[test]
    fn augmentation_counts_and_neutrality() {
        // x1*x2 -> one y; (x1*x2)*x3 -> two y's
        let mut c = Circuit::new();
        let x1 = c.input("x1");
        let x2 = c.input("x2");
        let m1 = c.mul(x1, x2);
        let x3 = c.input("x3");
        let m2 = c.mul(m1, x3);
        c.set_output(m2);
        let ac = augment_circuit(&c);
        assert_eq!(ac.h, 2);
        assert_eq!(ac.circuit.n_vars(), 5);

        let f = PrimeField { p: 5 };
        for asg in [[1u64, 2, 3], [4, 0, 2], [3, 3, 3]] {
            let base = eval_circuit(&c, &f, &asg).unwrap();
            let full = ac.assemble(&asg, &[1, 1]);
            let aug = eval_circuit(&ac.circuit, &f, &full).unwrap();
            assert_eq!(base, aug);
        }
    }

    #[test]
    fn augmentation_no_muls() {
        let mut c = Circuit::new();
        let x1 = c.input("x1");
        let x2 = c.input("x2");
        let s = c.add(vec![x1, x2]);
        c.set_output(s);
        let ac = augment_circuit(&c);
        assert_eq!(ac.h, 0);
        assert_eq!(ac.circuit.gates.len(), c.gates.len());
    }

    #[test]
    fn formula_flag() {
        let mut c = Circuit::new();
        let x1 = c.input("x1");
        let x2 = c.input("x2");
        let s = c.add(vec![x1, x2]);
        let m = c.mul(s, s); // s has fan-out 2
        c.set_output(m);
        assert!(!c.is_formula());

        let c2 = xy_times_z();
        assert!(c2.is_formula());
    }
}
