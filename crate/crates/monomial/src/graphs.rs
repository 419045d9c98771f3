//! Graph reductions: k-path and k-clique detection as monomial tests,
//! with exhaustive oracles for cross-checking.
//!
//! Graph file format: first line is the vertex count, then one
//! `i j` edge per line with 1-based endpoints; round trips bit-exact.

use std::collections::HashSet;

use crate::circuit::expand::ExpansionTable;
use crate::circuit::{Circuit, Monomial};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub n: usize,
    /// 0-based endpoint pairs, kept in input order.
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(Error::Validation(format!(
                    "edge ({}, {}) exceeds vertex count {n}",
                    a + 1,
                    b + 1
                )));
            }
            if a == b {
                return Err(Error::Validation(format!("self-loop at vertex {}", a + 1)));
            }
        }
        Ok(Graph { n, edges })
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges
            .iter()
            .any(|&(u, v)| (u, v) == (a, b) || (v, u) == (a, b))
    }

    /// Undirected edges as ordered (min, max) pairs, sorted; the i-th
    /// pair is variable i of the clique encoding.
    pub fn sorted_edges(&self) -> Vec<(usize, usize)> {
        let mut es: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        es.sort_unstable();
        es.dedup();
        es
    }
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = text.lines().enumerate();
    let (_, first) = lines
        .next()
        .ok_or(Error::Parse { line: 1, msg: "empty graph file".into() })?;
    let n: usize = first.trim().parse().map_err(|_| Error::Parse {
        line: 1,
        msg: format!("expected vertex count, got `{}`", first.trim()),
    })?;
    let mut edges = Vec::new();
    for (idx, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let parse_end = |tok: Option<&str>| -> Result<usize> {
            let tok = tok.ok_or(Error::Parse {
                line: idx + 1,
                msg: "expected `i j`".into(),
            })?;
            let v: usize = tok.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                msg: format!("bad vertex `{tok}`"),
            })?;
            if v == 0 {
                return Err(Error::Parse { line: idx + 1, msg: "vertices are 1-based".into() });
            }
            Ok(v - 1)
        };
        let a = parse_end(it.next())?;
        let b = parse_end(it.next())?;
        if it.next().is_some() {
            return Err(Error::Parse { line: idx + 1, msg: "trailing tokens".into() });
        }
        edges.push((a, b));
    }
    Graph::new(n, edges)
}

pub fn serialize_graph(g: &Graph) -> String {
    let mut out = format!("{}\n", g.n);
    for &(a, b) in &g.edges {
        out.push_str(&format!("{} {}\n", a + 1, b + 1));
    }
    out
}

/// Circuit computing p(G,k) = Σ_i p_{k,i} over vertex variables, where
/// p_{1,i} = x_i^c and p_{k+1,i} = x_i^c · Σ_{(i,j)∈E} p_{k,j}.
/// Levels share gates (a DAG, not a tree); an empty neighbor sum is the
/// constant 0. A k-path contributes a multilinear (c = 1) monomial of
/// degree c·k.
pub fn encode_kpath(g: &Graph, k: u64, c: u32) -> Circuit {
    assert!(k >= 1 && c >= 1);
    let mut circuit = Circuit::new();
    let inputs: Vec<usize> = (0..g.n).map(|i| circuit.input(&format!("x{}", i + 1))).collect();
    let powers: Vec<usize> = inputs
        .iter()
        .map(|&x| {
            let mut acc = x;
            for _ in 1..c {
                acc = circuit.mul(acc, x);
            }
            acc
        })
        .collect();
    let adj = g.adjacency();
    let mut level = powers.clone();
    for _ in 1..k {
        level = (0..g.n)
            .map(|i| {
                let nb: Vec<usize> = adj[i].iter().map(|&j| level[j]).collect();
                let sum = if nb.is_empty() { circuit.constant(0) } else { circuit.add(nb) };
                circuit.mul(powers[i], sum)
            })
            .collect();
    }
    let out = if level.is_empty() { circuit.constant(0) } else { circuit.add(level) };
    circuit.set_output(out);
    circuit
}

/// Circuit over edge variables computing f(G,k) with f(G,1) = 1,
/// f(G,2) = Σ x_{ij}, f(G,t+1) = Σ_i (Σ_{(i,j)∈E} x_{ij})^t · f(G,t).
/// Edge variable order follows `sorted_edges`; degree is k(k−1)/2.
pub fn encode_kclique(g: &Graph, k: u64) -> Circuit {
    assert!(k >= 1);
    let mut circuit = Circuit::new();
    let es = g.sorted_edges();
    let edge_vars: Vec<usize> = es
        .iter()
        .map(|&(a, b)| circuit.input(&format!("x{}_{}", a + 1, b + 1)))
        .collect();
    let mut incident = vec![Vec::new(); g.n];
    for (e, &(a, b)) in es.iter().enumerate() {
        incident[a].push(edge_vars[e]);
        incident[b].push(edge_vars[e]);
    }
    let mut f = circuit.constant(1);
    for t in 1..k {
        f = if t == 1 {
            if edge_vars.is_empty() {
                circuit.constant(0)
            } else {
                circuit.add(edge_vars.clone())
            }
        } else {
            let summands: Vec<usize> = (0..g.n)
                .filter(|&i| !incident[i].is_empty())
                .map(|i| {
                    let s = circuit.add(incident[i].clone());
                    let mut pow = s;
                    for _ in 1..t {
                        pow = circuit.mul(pow, s);
                    }
                    circuit.mul(pow, f)
                })
                .collect();
            if summands.is_empty() { circuit.constant(0) } else { circuit.add(summands) }
        };
    }
    circuit.set_output(f);
    circuit
}

/// The specific multilinear monomial Π_{j<ℓ} x_{v_j v_ℓ} of degree
/// k(k−1)/2 appears with nonzero coefficient.
pub fn clique_monomial_check(tbl: &ExpansionTable, g: &Graph, vertices: &[usize]) -> bool {
    let es = g.sorted_edges();
    let mut mono = Monomial::one();
    for (j, &a) in vertices.iter().enumerate() {
        for &b in &vertices[j + 1..] {
            let key = (a.min(b), a.max(b));
            let Ok(e) = es.binary_search(&key) else { return false };
            *mono.0.entry(e).or_insert(0) += 1;
        }
    }
    let k = vertices.len() as u64;
    mono.degree() == k * k.saturating_sub(1) / 2 && tbl.entries.get(&mono).is_some_and(|&c| c != 0)
}

fn size_guard(g: &Graph) -> Result<()> {
    if g.n > 16 {
        return Err(Error::Resource(format!(
            "oracle enumeration limited to 16 vertices, got {}",
            g.n
        )));
    }
    Ok(())
}

/// Exhaustive DFS: does a simple path on exactly k vertices exist?
pub fn path_oracle(g: &Graph, k: u64) -> Result<bool> {
    size_guard(g)?;
    if k == 0 || k as usize > g.n {
        return Ok(false);
    }
    let adj = g.adjacency();
    let mut visited = vec![false; g.n];
    fn dfs(v: usize, left: u64, adj: &[Vec<usize>], visited: &mut [bool]) -> bool {
        if left == 1 {
            return true;
        }
        visited[v] = true;
        let found = adj[v]
            .iter()
            .any(|&w| !visited[w] && dfs(w, left - 1, adj, visited));
        visited[v] = false;
        found
    }
    Ok((0..g.n).any(|s| dfs(s, k, &adj, &mut visited)))
}

/// Exhaustive subset enumeration: does a k-clique exist?
pub fn clique_oracle(g: &Graph, k: u64) -> Result<bool> {
    size_guard(g)?;
    let k = k as usize;
    if k == 0 || k > g.n {
        return Ok(k == 0);
    }
    let edgeset: HashSet<(usize, usize)> = g.sorted_edges().into_iter().collect();
    let mut chosen = Vec::with_capacity(k);
    fn rec(
        start: usize,
        n: usize,
        k: usize,
        chosen: &mut Vec<usize>,
        edges: &HashSet<(usize, usize)>,
    ) -> bool {
        if chosen.len() == k {
            return true;
        }
        (start..n).any(|v| {
            if !chosen.iter().all(|&u| edges.contains(&(u.min(v), u.max(v)))) {
                return false;
            }
            chosen.push(v);
            let ok = rec(v + 1, n, k, chosen, edges);
            chosen.pop();
            ok
        })
    }
    Ok(rec(0, g.n, k, &mut chosen, &edgeset))
}

/// All graphs on n labeled vertices, enumerated by edge bitmask.
pub fn all_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
        .collect();
    let count = 1u64 << pairs.len();
    (0..count).map(move |mask| {
        let edges = pairs
            .iter()
            .enumerate()
            .filter(|&(e, _)| mask >> e & 1 == 1)
            .map(|(_, &p)| p)
            .collect();
        Graph { n, edges }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PrimeModulus;
    use crate::circuit::expand::expand_oracle;
    use crate::randomized::{rt_mlm, RtConfig};

    fn triangle() -> Graph {
        Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn graph_roundtrip_bit_exact() {
        let text = "4\n1 2\n2 3\n1 4\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(g.n, 4);
        assert_eq!(serialize_graph(&g), text);
        assert!(parse_graph("2\n1 3\n").is_err());
        assert!(parse_graph("2\n1 1\n").is_err());
        assert!(parse_graph("x\n").is_err());
    }

    #[test]
    fn triangle_two_path_detected_by_rt() {
        let c = encode_kpath(&triangle(), 2, 1);
        assert_eq!(c.degree_bound(), 2);
        assert!(path_oracle(&triangle(), 2).unwrap());
        let r = rt_mlm(&c, &RtConfig::new(pm(2), 2, 11).unwrap()).unwrap();
        assert!(r.yes());
    }

    #[test]
    fn single_vertex_has_no_two_path() {
        let g = Graph::new(1, vec![]).unwrap();
        let c = encode_kpath(&g, 2, 1);
        let tbl = expand_oracle(&c, pm(101), 1000).unwrap();
        assert!(tbl.has_multilinear(2).is_none());
        assert!(!path_oracle(&g, 2).unwrap());
    }

    #[test]
    fn three_path_is_hamiltonian_path() {
        let g = parse_graph("3\n1 2\n2 3\n").unwrap();
        let c = encode_kpath(&g, 3, 1);
        let tbl = expand_oracle(&c, pm(101), 10_000).unwrap();
        assert!(tbl.has_multilinear(3).is_some());
        assert!(path_oracle(&g, 3).unwrap());
        // k above the vertex count
        assert!(!path_oracle(&g, 5).unwrap());
    }

    #[test]
    fn kpath_gate_count_linear_per_level() {
        let g = triangle();
        for k in 1..=5u64 {
            let c = encode_kpath(&g, k, 1);
            let bound = g.n + k as usize * (2 * g.n + 2) + 1;
            assert!(c.gates.len() <= bound, "k={k}: {} gates", c.gates.len());
        }
    }

    #[test]
    fn path_reduction_matches_oracle_small() {
        for n in 1..=4usize {
            for g in all_graphs(n) {
                for k in 1..=4u64 {
                    let c = encode_kpath(&g, k, 1);
                    let tbl = expand_oracle(&c, pm(101), 200_000).unwrap();
                    let got = tbl.has_multilinear(k).is_some();
                    assert_eq!(got, path_oracle(&g, k).unwrap(), "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn triangle_clique_monomial_present() {
        let c = encode_kclique(&triangle(), 3);
        assert_eq!(c.degree_bound(), 3);
        let tbl = expand_oracle(&c, pm(101), 10_000).unwrap();
        assert!(clique_monomial_check(&tbl, &triangle(), &[0, 1, 2]));
        // vertex 4 does not exist: no such edge variables
        assert!(!clique_monomial_check(&tbl, &triangle(), &[0, 1, 3]));
    }

    #[test]
    fn path_graph_has_no_triangle_monomial() {
        let g = parse_graph("3\n1 2\n2 3\n").unwrap();
        let tbl = expand_oracle(&encode_kclique(&g, 3), pm(101), 10_000).unwrap();
        assert!(!clique_monomial_check(&tbl, &g, &[0, 1, 2]));
        assert!(!clique_oracle(&g, 3).unwrap());
    }

    #[test]
    fn one_clique_is_constant_one() {
        let g = parse_graph("2\n\n").unwrap();
        let c = encode_kclique(&g, 1);
        let tbl = expand_oracle(&c, pm(101), 10).unwrap();
        assert_eq!(tbl.entries.get(&Monomial::one()), Some(&1));
    }

    #[test]
    fn clique_reduction_matches_oracle_small() {
        for n in 2..=5usize {
            for g in all_graphs(n) {
                let tbl = expand_oracle(&encode_kclique(&g, 3), pm(101), 200_000).unwrap();
                let found = subsets3(n).any(|s| clique_monomial_check(&tbl, &g, &s));
                assert_eq!(found, clique_oracle(&g, 3).unwrap(), "n={n}");
            }
        }
    }

    fn subsets3(n: usize) -> impl Iterator<Item = [usize; 3]> {
        (0..n).flat_map(move |a| {
            ((a + 1)..n).flat_map(move |b| ((b + 1)..n).map(move |c| [a, b, c]))
        })
    }

    #[test]
    fn oracle_basics() {
        assert!(clique_oracle(&triangle(), 3).unwrap());
        assert!(path_oracle(&triangle(), 3).unwrap());
        let star = parse_graph("4\n1 2\n1 3\n1 4\n").unwrap();
        assert!(!path_oracle(&star, 4).unwrap());
        let empty = Graph::new(3, vec![]).unwrap();
        assert!(!path_oracle(&empty, 2).unwrap());
        assert!(!clique_oracle(&empty, 2).unwrap());
        let big = Graph::new(30, vec![]).unwrap();
        assert!(matches!(path_oracle(&big, 2), Err(Error::Resource(_))));
    }
}
