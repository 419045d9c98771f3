//! Multilinear-monomial testers for clause products: the polynomial
//! Σ2-selection base case (2-SAT), an exact branch-and-bound for
//! Σ2-product × Σ3-product instances, and a randomized clause-narrowing
//! tester.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::time::Instant;

use crate::circuit::{Clause, Monomial, StructuredPoly};
use crate::error::{Error, Result};
use crate::report::{TestReport, TrialOutcome};

/// A Π_mΣ_2Π_t factor times a Π_kΣ_3 factor, sharing one variable
/// table. `split` is the first Σ3 clause index.
#[derive(Debug, Clone)]
pub struct ProductInstance {
    pub poly: StructuredPoly,
    pub split: usize,
}

impl ProductInstance {
    pub fn new(poly: StructuredPoly) -> Result<Self> {
        let split = poly.split.ok_or_else(|| {
            Error::Validation("product form requires a `---` separator".into())
        })?;
        poly.validate_shape(2, false, 0..split)?;
        poly.validate_shape(3, true, split..poly.clauses.len())?;
        Ok(ProductInstance { poly, split })
    }

    pub fn f1(&self) -> &[Clause] {
        &self.poly.clauses[..self.split]
    }

    /// Σ3 clauses as variable lists, duplicates collapsed.
    pub fn f2_vars(&self) -> Vec<Vec<usize>> {
        self.poly.clauses[self.split..]
            .iter()
            .map(|c| {
                let mut vars: Vec<usize> =
                    c.terms.iter().flat_map(|t| t.0.keys().copied()).collect();
                vars.sort_unstable();
                vars.dedup();
                vars
            })
            .collect()
    }

    pub fn m(&self) -> usize {
        self.split
    }

    pub fn k(&self) -> usize {
        self.poly.clauses.len() - self.split
    }
}

/// Implication-graph 2-SAT: clauses are (literal OR literal), literal
/// 2v for b_v, 2v+1 for ¬b_v. Returns a satisfying assignment if any.
fn two_sat(nvars: usize, clauses: &[(usize, usize)]) -> Option<Vec<bool>> {
    let n = 2 * nvars;
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in clauses {
        adj[a ^ 1].push(b);
        adj[b ^ 1].push(a);
    }
    // Kosaraju: order by completion on the forward graph
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        // iterative DFS with an explicit edge cursor
        let mut stack = vec![(s, 0usize)];
        seen[s] = true;
        while let Some(&mut (u, ref mut cursor)) = stack.last_mut() {
            if *cursor < adj[u].len() {
                let v = adj[u][*cursor];
                *cursor += 1;
                if !seen[v] {
                    seen[v] = true;
                    stack.push((v, 0));
                }
            } else {
                order.push(u);
                stack.pop();
            }
        }
    }
    let mut radj = vec![Vec::new(); n];
    for (u, vs) in adj.iter().enumerate() {
        for &v in vs {
            radj[v].push(u);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut c = 0;
    for &s in order.iter().rev() {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = c;
        while let Some(u) = stack.pop() {
            for &v in &radj[u] {
                if comp[v] == usize::MAX {
                    comp[v] = c;
                    stack.push(v);
                }
            }
        }
        c += 1;
    }
    let mut assignment = vec![false; nvars];
    for v in 0..nvars {
        if comp[2 * v] == comp[2 * v + 1] {
            return None;
        }
        // higher Kosaraju component index = later in topological order
        assignment[v] = comp[2 * v] > comp[2 * v + 1];
    }
    Some(assignment)
}

fn term_multilinear(t: &Monomial) -> bool {
    t.0.values().all(|&e| e == 1)
}

/// Pick one term per Σ2 clause so the product of picks is multilinear;
/// returns the per-clause term indices if possible.
pub fn sigma2_select(clauses: &[Clause]) -> Result<Option<Vec<usize>>> {
    for (i, c) in clauses.iter().enumerate() {
        if c.terms.is_empty() || c.terms.len() > 2 {
            return Err(Error::Validation(format!(
                "clause {} has {} terms; the base case needs 1 or 2",
                i + 1,
                c.terms.len()
            )));
        }
    }
    let m = clauses.len();
    // literal for "clause i selects term t": b_i when t=0, ¬b_i when t=1
    let lit = |i: usize, t: usize| 2 * i + t;
    let mut sat: Vec<(usize, usize)> = Vec::new();
    for (i, c) in clauses.iter().enumerate() {
        if c.terms.len() == 1 {
            sat.push((lit(i, 0), lit(i, 0)));
        }
        for (t, term) in c.terms.iter().enumerate() {
            if !term_multilinear(term) {
                let not = lit(i, t) ^ 1;
                sat.push((not, not));
            }
        }
    }
    for i in 0..m {
        for ti in 0..clauses[i].terms.len() {
            for j in i + 1..m {
                for tj in 0..clauses[j].terms.len() {
                    if clauses[i].terms[ti].shares_variable(&clauses[j].terms[tj]) {
                        sat.push((lit(i, ti) ^ 1, lit(j, tj) ^ 1));
                    }
                }
            }
        }
    }
    Ok(two_sat(m, &sat).map(|assignment| {
        assignment
            .iter()
            .enumerate()
            .map(|(i, &b)| if b || clauses[i].terms.len() == 1 { 0 } else { 1 })
            .collect()
    }))
}

pub fn base_case_sigma2(f: &StructuredPoly) -> Result<TestReport> {
    let start = Instant::now();
    f.validate_shape(2, false, 0..f.clauses.len())?;
    let selection = sigma2_select(&f.clauses)?;
    let verdict = selection.is_some();
    let trials = vec![TrialOutcome { seed: 0, verdict, micros: 0 }];
    let mut report = TestReport::from_trials(
        json!({"algorithm": "sigma2-base", "m": f.clauses.len()}),
        trials,
        0,
    );
    report.witness = selection.map(|sel| {
        let picks: Vec<String> = sel.iter().map(usize::to_string).collect();
        format!("selected term indices: {}", picks.join(" "))
    });
    report.elapsed_micros = start.elapsed().as_micros() as u64;
    Ok(report)
}

fn clause_from_vars(vars: &[usize]) -> Clause {
    Clause { terms: vars.iter().map(|&v| Monomial::var(v)).collect() }
}

fn eliminate(f2: &[Vec<usize>], x: usize) -> Vec<Vec<usize>> {
    f2.iter()
        .map(|c| c.iter().copied().filter(|&v| v != x).collect())
        .collect()
}

fn bb_rec(f1: &mut Vec<Clause>, f2: &[Vec<usize>], leaves: &mut usize) -> Result<bool> {
    let Some(g1) = f2.first() else {
        *leaves += 1;
        return Ok(sigma2_select(f1)?.is_some());
    };
    let x = g1[0];
    // branch 1: g1 does not select x; g1 shrinks to ≤2 variables and
    // joins the Σ2 part, later clauses are untouched
    let g1p: Vec<usize> = g1.iter().copied().filter(|&v| v != x).collect();
    let b1 = if g1p.is_empty() {
        // the clause lost every variable: unsatisfiable branch
        false
    } else {
        f1.push(clause_from_vars(&g1p));
        let r = bb_rec(f1, &f2[1..], leaves)?;
        f1.pop();
        r
    };
    if b1 {
        return Ok(true);
    }
    // branch 2: g1 selects x, so no later clause may; x is eliminated
    // from the rest
    let rest = eliminate(&f2[1..], x);
    debug_assert!(rest.iter().all(|c| !c.contains(&x)));
    if rest.iter().any(Vec::is_empty) {
        return Ok(false);
    }
    f1.push(clause_from_vars(&[x]));
    let r = bb_rec(f1, &rest, leaves)?;
    f1.pop();
    Ok(r)
}

/// Exact deterministic branch-and-bound; at most 2^k base-case leaves.
pub fn bb_test(inst: &ProductInstance) -> Result<TestReport> {
    let start = Instant::now();
    let mut f1: Vec<Clause> = inst.f1().to_vec();
    let f2 = inst.f2_vars();
    if f2.iter().any(Vec::is_empty) {
        return Err(Error::Validation("empty Σ3 clause".into()));
    }
    let mut leaves = 0usize;
    let verdict = bb_rec(&mut f1, &f2, &mut leaves)?;
    debug_assert!(leaves <= 1usize << inst.k());
    let trials = vec![TrialOutcome { seed: leaves as u64, verdict, micros: 0 }];
    let mut report = TestReport::from_trials(
        json!({"algorithm": "bb", "m": inst.m(), "k": inst.k(), "leaves": leaves}),
        trials,
        0,
    );
    if verdict {
        report.witness = Some(format!("found after {leaves} base-case leaves"));
    }
    report.elapsed_micros = start.elapsed().as_micros() as u64;
    Ok(report)
}

/// Number of base-case leaves the last bb run needed (exposed for the
/// branch-count property tests).
pub fn bb_leaf_count(inst: &ProductInstance) -> Result<usize> {
    let mut f1: Vec<Clause> = inst.f1().to_vec();
    let f2 = inst.f2_vars();
    let mut leaves = 0usize;
    bb_rec(&mut f1, &f2, &mut leaves)?;
    Ok(leaves)
}

pub fn default_reps(k: usize) -> usize {
    (1.5f64.powi(k as i32)).ceil() as usize
}

/// Randomized narrowing: each repetition keeps 2 random variables of
/// every Σ3 clause and runs the base case. One-sided.
pub fn narrow_test(inst: &ProductInstance, seed: u64, reps: usize) -> Result<TestReport> {
    let start = Instant::now();
    if reps == 0 {
        return Err(Error::Usage("reps must be at least 1".into()));
    }
    let f2 = inst.f2_vars();
    if f2.iter().any(Vec::is_empty) {
        return Err(Error::Validation("empty Σ3 clause".into()));
    }
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    let mut trials = Vec::with_capacity(reps);
    let mut witness = None;
    for _ in 0..reps {
        let trial_seed: u64 = seeder.gen();
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        let mut clauses: Vec<Clause> = inst.f1().to_vec();
        for vars in &f2 {
            let narrowed: Vec<usize> = if vars.len() <= 2 {
                vars.clone()
            } else {
                let a = rng.gen_range(0..vars.len());
                let b = {
                    let mut b = rng.gen_range(0..vars.len() - 1);
                    if b >= a {
                        b += 1;
                    }
                    b
                };
                vec![vars[a.min(b)], vars[a.max(b)]]
            };
            clauses.push(clause_from_vars(&narrowed));
        }
        let verdict = sigma2_select(&clauses)?.is_some();
        trials.push(TrialOutcome { seed: trial_seed, verdict, micros: 0 });
        if verdict {
            witness = Some(format!("repetition {} succeeded", trials.len()));
            break;
        }
    }
    let mut report = TestReport::from_trials(
        json!({"algorithm": "narrow", "m": inst.m(), "k": inst.k(), "reps": reps, "seed": seed}),
        trials,
        0,
    );
    report.witness = witness;
    report.elapsed_micros = start.elapsed().as_micros() as u64;
    Ok(report)
}

/// Exhaustive selection oracle over all term choices (2^m · 3^k).
pub fn enumeration_oracle(inst: &ProductInstance) -> bool {
    let f1 = inst.f1();
    let f2 = inst.f2_vars();
    let mut choice = Vec::new();
    enumerate(f1, &f2, &mut choice)
}

fn enumerate(f1: &[Clause], f2: &[Vec<usize>], picked: &mut Vec<Monomial>) -> bool {
    if let Some((c, rest)) = f1.split_first() {
        return c.terms.iter().any(|t| {
            picked.push(t.clone());
            let ok = enumerate(rest, f2, picked);
            picked.pop();
            ok
        });
    }
    if let Some((vars, rest)) = f2.split_first() {
        return vars.iter().any(|&v| {
            picked.push(Monomial::var(v));
            let ok = enumerate(&[], rest, picked);
            picked.pop();
            ok
        });
    }
    let mut product = Monomial::one();
    for t in picked.iter() {
        product = product.product(t);
    }
    product.is_multilinear()
}

/// 2^m oracle for a plain Σ2 clause list.
pub fn selection_oracle(clauses: &[Clause]) -> bool {
    let mut picked = Vec::new();
    enumerate(clauses, &[], &mut picked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::structured::parse_structured;

    fn inst(text: &str) -> ProductInstance {
        ProductInstance::new(parse_structured(text).unwrap()).unwrap()
    }

    #[test]
    fn base_case_examples() {
        // (x1+x2)(x1+x2) -> yes
        let f = parse_structured("x1 + x2\nx1 + x2\n").unwrap();
        let sel = sigma2_select(&f.clauses).unwrap().unwrap();
        assert_ne!(sel[0], sel[1]);
        // (x1+x1)(x1+x1) -> no
        let f = parse_structured("x1 + x1\nx1 + x1\n").unwrap();
        assert!(sigma2_select(&f.clauses).unwrap().is_none());
        // (x1*x1 + x2)(x2 + x3) -> yes via x2*x3
        let f = parse_structured("x1*x1 + x2\nx2 + x3\n").unwrap();
        let sel = sigma2_select(&f.clauses).unwrap().unwrap();
        assert_eq!(sel, vec![1, 1]);
    }

    #[test]
    fn base_case_report_has_witness() {
        let f = parse_structured("x1 + x2\nx3 + x4\n").unwrap();
        let r = base_case_sigma2(&f).unwrap();
        assert!(r.yes());
        assert!(r.witness.unwrap().starts_with("selected term indices"));
    }

    #[test]
    fn base_case_matches_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(7001);
        for _ in 0..500 {
            let m = rng.gen_range(1..=15usize);
            let nvars = rng.gen_range(1..=10usize);
            let clauses: Vec<Clause> = (0..m)
                .map(|_| {
                    let terms = (0..rng.gen_range(1..=2u32))
                        .map(|_| {
                            let deg = rng.gen_range(1..=3u32);
                            let mut t = Monomial::one();
                            for _ in 0..deg {
                                *t.0.entry(rng.gen_range(0..nvars)).or_insert(0) += 1;
                            }
                            t
                        })
                        .collect();
                    Clause { terms }
                })
                .collect();
            let fast = sigma2_select(&clauses).unwrap();
            let slow = selection_oracle(&clauses);
            assert_eq!(fast.is_some(), slow);
            if let Some(sel) = fast {
                // the witness really is a multilinear selection
                let mut prod = Monomial::one();
                for (c, &t) in clauses.iter().zip(&sel) {
                    prod = prod.product(&c.terms[t]);
                }
                assert!(prod.is_multilinear());
            }
        }
    }

    #[test]
    fn bb_examples() {
        let i = inst("x4 + x5\n---\nx1 + x2 + x3\n");
        let r = bb_test(&i).unwrap();
        assert!(r.yes());
        assert!(bb_leaf_count(&i).unwrap() <= 2);

        let i = inst("x1 + x1\n---\nx1 + x1 + x1\n");
        assert!(!bb_test(&i).unwrap().yes());
    }

    #[test]
    fn bb_matches_enumeration_on_corpus() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(7002);
        for case in 0..300 {
            let k = rng.gen_range(0..=4usize);
            let m = rng.gen_range(1..=(12 - k).min(6));
            let nvars = rng.gen_range(2..=8usize);
            let mut lines = Vec::new();
            for _ in 0..m {
                let t1 = format!("x{}", rng.gen_range(0..nvars));
                let t2 = format!("x{}", rng.gen_range(0..nvars));
                lines.push(format!("{t1} + {t2}"));
            }
            lines.push("---".into());
            for _ in 0..k {
                let vs: Vec<String> =
                    (0..3).map(|_| format!("x{}", rng.gen_range(0..nvars))).collect();
                lines.push(vs.join(" + "));
            }
            if k == 0 {
                lines.push(format!("x{} + x{}", nvars, nvars + 1));
            }
            let i = inst(&format!("{}\n", lines.join("\n")));
            let got = bb_test(&i).unwrap().yes();
            let want = enumeration_oracle(&i);
            assert_eq!(got, want, "case {case}");
            assert!(bb_leaf_count(&i).unwrap() <= 1 << i.k());
        }
    }

    #[test]
    fn narrow_one_sided_and_complete() {
        // negative instance: never yes
        let neg = inst("x1 + x1\n---\nx1 + x1 + x1\n");
        for seed in 0..30 {
            assert!(!narrow_test(&neg, seed, 8).unwrap().yes());
        }
        // positive instance with ample reps: overwhelmingly found
        let pos = inst("x4 + x5\n---\nx1 + x2 + x3\nx1 + x2 + x6\n");
        assert!(enumeration_oracle(&pos));
        let r = narrow_test(&pos, 1, default_reps(2) * 8).unwrap();
        assert!(r.yes());
    }

    #[test]
    fn narrow_single_usable_variable_rate() {
        // only x1 usable in the Σ3 clause: per-rep success exactly 2/3
        let i = inst("x2 + x3\nx2 + x3\n---\nx1 + x2 + x3\n");
        assert!(enumeration_oracle(&i));
        let mut hits = 0;
        let total = 3000;
        for seed in 0..total {
            if narrow_test(&i, seed, 1).unwrap().yes() {
                hits += 1;
            }
        }
        let rate = hits as f64 / total as f64;
        assert!((rate - 2.0 / 3.0).abs() < 0.05, "rate {rate}");
    }

    #[test]
    fn product_shape_enforced() {
        assert!(ProductInstance::new(parse_structured("x1 + x2\n").unwrap()).is_err());
        let four = parse_structured("x1 + x2\n---\nx1 + x2 + x3 + x4\n").unwrap();
        assert!(ProductInstance::new(four).is_err());
    }
}
