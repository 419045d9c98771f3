//! Layered branching programs over noncommutative y-letters, built from
//! formulas by series/parallel composition, and a deterministic exact
//! identity test.
//!
//! Edge labels are linear forms c0 + Σ ci·yi over Z_p. A path spells a
//! word: at each edge either the constant part (no letter) or one
//! letter is taken. Distinct words never cancel, so the program is zero
//! iff every word's sink coefficient vanishes.

use std::collections::HashMap;
use std::sync::Arc;

use crate::algebra::field::pow_mod;
use crate::algebra::{GroupAlgebra, PrimeField};
use crate::circuit::graded::Graded;
use crate::circuit::{Circuit, EvalRing, Gate};

/// Homogeneous x-degree components of a group-algebra value; the
/// scalar coefficients the program is weighted with before expansion.
pub type GradedElem = Vec<crate::algebra::GaElement<PrimeField>>;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinForm {
    pub c0: u64,
    pub terms: Vec<(usize, u64)>,
}

/// Expanded program over Z_p. `widths[l]` nodes at level l; `edges[l]`
/// joins level l to l+1. `source` indexes level 0, `sinks` the last
/// level.
#[derive(Debug, Clone)]
pub struct Abp {
    pub p: u64,
    pub h: usize,
    pub widths: Vec<usize>,
    pub edges: Arc<Vec<Vec<(usize, usize, LinForm)>>>,
    pub source: usize,
    pub sinks: Vec<usize>,
}

/// Pre-expansion label: a graded group-algebra scalar or one letter.
#[derive(Debug, Clone)]
pub enum Label {
    Scalar(GradedElem),
    Letter(usize),
}

/// Scalar-weighted program produced from a formula; single source and
/// sink (node 0 of the first and last level).
#[derive(Debug, Clone)]
pub struct Prog {
    pub widths: Vec<usize>,
    pub edges: Vec<Vec<(usize, usize, Label)>>,
}

impl Prog {
    fn leaf(label: Label) -> Prog {
        Prog { widths: vec![1, 1], edges: vec![vec![(0, 0, label)]] }
    }

    fn len(&self) -> usize {
        self.edges.len()
    }

    fn series(mut self, other: Prog) -> Prog {
        self.widths.pop();
        self.widths.extend(other.widths);
        self.edges.extend(other.edges);
        self
    }

    fn pad(&mut self, to: usize, one: &GradedElem) {
        while self.len() < to {
            self.widths.push(1);
            self.edges.push(vec![(0, 0, Label::Scalar(one.clone()))]);
        }
    }

    fn parallel(mut children: Vec<Prog>, one: &GradedElem) -> Prog {
        let target = children.iter().map(Prog::len).max().unwrap();
        for ch in &mut children {
            ch.pad(target, one);
        }
        let mut widths = vec![0usize; target + 1];
        widths[0] = 1;
        widths[target] = 1;
        let mut edges: Vec<Vec<(usize, usize, Label)>> = vec![Vec::new(); target];
        let mut offsets = vec![0usize; target + 1];
        for ch in children {
            for l in 0..target {
                for (from, to, label) in &ch.edges[l] {
                    let f = if l == 0 { 0 } else { offsets[l] + from };
                    let t = if l + 1 == target { 0 } else { offsets[l + 1] + to };
                    edges[l].push((f, t, label.clone()));
                }
            }
            for l in 1..target {
                offsets[l] += ch.widths[l];
                widths[l] += ch.widths[l];
            }
        }
        Prog { widths, edges }
    }
}

/// Series/parallel translation of a formula. `leaf` labels each input
/// variable (x's as scalars, y's as letters).
pub fn formula_prog(
    c: &Circuit,
    ring: &Graded<GroupAlgebra<PrimeField>>,
    leaf: &dyn Fn(usize) -> Label,
) -> Prog {
    let one = ring.constant(1);
    build(c, c.output, ring, leaf, &one)
}

fn build(
    c: &Circuit,
    id: usize,
    ring: &Graded<GroupAlgebra<PrimeField>>,
    leaf: &dyn Fn(usize) -> Label,
    one: &GradedElem,
) -> Prog {
    match &c.gates[id] {
        Gate::Input(v) => Prog::leaf(leaf(*v)),
        Gate::Const(w) => Prog::leaf(Label::Scalar(ring.constant(*w))),
        Gate::Add(cs) => Prog::parallel(
            cs.iter().map(|&ch| build(c, ch, ring, leaf, one)).collect(),
            one,
        ),
        Gate::Mul(a, b) => {
            build(c, *a, ring, leaf, one).series(build(c, *b, ring, leaf, one))
        }
    }
}

fn add_group_index(p: usize, dim: usize, mut a: usize, mut b: usize) -> usize {
    let mut out = 0;
    let mut mult = 1;
    for _ in 0..dim {
        out += (a % p + b % p) % p * mult;
        mult *= p;
        a /= p;
        b /= p;
    }
    out
}

/// Expand the scalar weights away: each program node splits into one
/// node per (x-degree, group element) pair, leaving a Z_p-weighted
/// program whose sink states carry the graded coefficients.
pub fn expand_prog(
    prog: &Prog,
    ring: &Graded<GroupAlgebra<PrimeField>>,
    h: usize,
) -> (Abp, usize) {
    let p = ring.inner.p as usize;
    let dim = ring.inner.dim;
    let size = ring.inner.size();
    let top = ring.top;
    let m = (top + 1) * size;
    let state = |node: usize, deg: usize, g: usize| node * m + deg * size + g;

    let widths: Vec<usize> = prog.widths.iter().map(|w| w * m).collect();
    let mut edges: Vec<Vec<(usize, usize, LinForm)>> = Vec::with_capacity(prog.edges.len());
    for layer in &prog.edges {
        let mut out = Vec::new();
        for (u, v, label) in layer {
            match label {
                Label::Letter(i) => {
                    for deg in 0..=top {
                        for g in 0..size {
                            out.push((
                                state(*u, deg, g),
                                state(*v, deg, g),
                                LinForm { c0: 0, terms: vec![(*i, 1)] },
                            ));
                        }
                    }
                }
                Label::Scalar(s) => {
                    for (dstep, comp) in s.iter().enumerate() {
                        for (gstep, &c) in comp.coeffs.iter().enumerate() {
                            if c == 0 {
                                continue;
                            }
                            for deg in 0..=(top - dstep) {
                                for g in 0..size {
                                    out.push((
                                        state(*u, deg, g),
                                        state(*v, deg + dstep, add_group_index(p, dim, g, gstep)),
                                        LinForm { c0: c, terms: Vec::new() },
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
        edges.push(out);
    }
    let abp = Abp {
        p: p as u64,
        h,
        widths,
        edges: Arc::new(edges),
        source: state(0, 0, 0),
        sinks: Vec::new(),
    };
    (abp, size)
}

/// One program per group-algebra coordinate: shared layers, sink =
/// (top x-degree, that coordinate).
pub fn formula_to_abp(
    c: &Circuit,
    ring: &Graded<GroupAlgebra<PrimeField>>,
    leaf: &dyn Fn(usize) -> Label,
    h: usize,
) -> Vec<Abp> {
    let prog = formula_prog(c, ring, leaf);
    let (abp, size) = expand_prog(&prog, ring, h);
    (0..size)
        .map(|g| {
            let mut a = abp.clone();
            a.sinks = vec![ring.top * size + g];
            a
        })
        .collect()
}

/// As above but a single program whose sinks cover every coordinate;
/// one identity-test sweep decides "any coordinate nonzero".
pub fn formula_to_abp_combined(
    c: &Circuit,
    ring: &Graded<GroupAlgebra<PrimeField>>,
    leaf: &dyn Fn(usize) -> Label,
    h: usize,
) -> Abp {
    let prog = formula_prog(c, ring, leaf);
    let (mut abp, size) = expand_prog(&prog, ring, h);
    abp.sinks = (0..size).map(|g| ring.top * size + g).collect();
    abp
}

struct Flat {
    n: usize,
    scalar_out: Vec<Vec<(usize, u64)>>,
    letter_out: Vec<Vec<(usize, usize, u64)>>,
    sink_globals: Vec<usize>,
    source_global: usize,
}

fn flatten(a: &Abp) -> Flat {
    let mut offsets = vec![0usize];
    for w in &a.widths {
        offsets.push(offsets.last().unwrap() + w);
    }
    let n = *offsets.last().unwrap();
    let mut scalar_out = vec![Vec::new(); n];
    let mut letter_out = vec![Vec::new(); n];
    for (l, layer) in a.edges.iter().enumerate() {
        for (u, v, lf) in layer {
            let gu = offsets[l] + u;
            let gv = offsets[l + 1] + v;
            if lf.c0 % a.p != 0 {
                scalar_out[gu].push((gv, lf.c0 % a.p));
            }
            for &(i, c) in &lf.terms {
                if c % a.p != 0 {
                    letter_out[gu].push((gv, i, c % a.p));
                }
            }
        }
    }
    let last = a.widths.len() - 1;
    Flat {
        n,
        source_global: a.source,
        sink_globals: a.sinks.iter().map(|s| offsets[last] + s).collect(),
        scalar_out,
        letter_out,
    }
}

/// Push a coefficient vector through every scalar-only suffix path.
/// Nodes are in topological (level) order, so one forward pass closes.
fn scalar_closure(f: &Flat, p: u64, vec: &mut [u64]) {
    for u in 0..f.n {
        if vec[u] == 0 {
            continue;
        }
        for &(v, c) in &f.scalar_out[u] {
            vec[v] = (vec[v] + vec[u] * c) % p;
        }
    }
}

/// Row-reduce `candidate` against `basis`; push and return true if
/// independent.
fn absorb(p: u64, basis: &mut Vec<(usize, Vec<u64>)>, mut cand: Vec<u64>) -> bool {
    for (pivot, row) in basis.iter() {
        if cand[*pivot] != 0 {
            let factor = cand[*pivot] * pow_mod(row[*pivot], p - 2, p) % p;
            for (c, r) in cand.iter_mut().zip(row) {
                *c = (*c + (p - factor) * r) % p;
            }
        }
    }
    if let Some(pivot) = cand.iter().position(|&c| c != 0) {
        basis.push((pivot, cand));
        true
    } else {
        false
    }
}

/// Deterministic exact zero test: word lengths are handled separately
/// (per length, every word has a unique last letter, so span
/// propagation is exact), and a word class is nonzero iff its realized
/// span touches a sink coordinate.
pub fn rs_identity_test(a: &Abp) -> bool {
    let p = a.p;
    let f = flatten(a);
    let mut start = vec![0u64; f.n];
    start[f.source_global] = 1;
    scalar_closure(&f, p, &mut start);

    let hits_sink = |vecs: &[(usize, Vec<u64>)]| {
        vecs.iter().any(|(_, v)| f.sink_globals.iter().any(|&s| v[s] != 0))
    };

    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    absorb(p, &mut basis, start);
    if hits_sink(&basis) {
        return true;
    }
    for _len in 1..=a.edges.len() {
        let mut next: Vec<(usize, Vec<u64>)> = Vec::new();
        for (_, b) in &basis {
            let mut images: HashMap<usize, Vec<u64>> = HashMap::new();
            for u in 0..f.n {
                if b[u] == 0 {
                    continue;
                }
                for &(v, i, c) in &f.letter_out[u] {
                    let img = images.entry(i).or_insert_with(|| vec![0u64; f.n]);
                    img[v] = (img[v] + b[u] * c) % p;
                }
            }
            for (_, mut img) in images {
                scalar_closure(&f, p, &mut img);
                absorb(p, &mut next, img);
            }
        }
        if next.is_empty() {
            return false;
        }
        if hits_sink(&next) {
            return true;
        }
        basis = next;
    }
    false
}

/// Exponential reference expansion: word -> coefficient vector over the
/// final level. Test-scale only.
pub fn word_expansion(a: &Abp) -> HashMap<Vec<usize>, Vec<u64>> {
    let p = a.p;
    let last_width = *a.widths.last().unwrap();
    let mut out: HashMap<Vec<usize>, Vec<u64>> = HashMap::new();
    let mut stack = vec![(0usize, a.source, 1u64, Vec::<usize>::new())];
    while let Some((level, node, coeff, word)) = stack.pop() {
        if level == a.edges.len() {
            let entry = out.entry(word).or_insert_with(|| vec![0; last_width]);
            entry[node] = (entry[node] + coeff) % p;
            continue;
        }
        for (u, v, lf) in &a.edges[level] {
            if *u != node {
                continue;
            }
            if lf.c0 % p != 0 {
                stack.push((level + 1, *v, coeff * (lf.c0 % p) % p, word.clone()));
            }
            for &(i, c) in &lf.terms {
                if c % p != 0 {
                    let mut w = word.clone();
                    w.push(i);
                    stack.push((level + 1, *v, coeff * (c % p) % p, w));
                }
            }
        }
    }
    out.retain(|_, v| v.iter().any(|&c| c != 0));
    out
}

/// Reference verdict from the word expansion, for cross-checking the
/// deterministic test.
pub fn word_nonzero(a: &Abp) -> bool {
    word_expansion(a)
        .values()
        .any(|v| a.sinks.iter().any(|&s| v[s] != 0))
}
