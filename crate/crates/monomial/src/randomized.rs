//! Randomized p-monomial tester for circuits.
//!
//! Each trial substitutes every variable by ((p-1)·v⃗_i + v⃗_0) for a
//! uniform random nonzero v⃗_i ∈ Z_p^d, evaluates the augmented circuit
//! over a degree-graded group algebra, and runs a one-sided polynomial
//! identity test on the degree-k component. Non-p-monomials are
//! annihilated unconditionally, so a yes answer is always correct.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::time::Instant;

use crate::algebra::{ExtField, GaElement, GroupAlgebra, PolyQuotient, PrimeField, PrimeModulus, Ring};
use crate::algebra::field::Poly;
use crate::circuit::graded::Graded;
use crate::circuit::{augment_circuit, eval_circuit, AugmentedCircuit, Circuit};
use crate::error::{Error, Result};
use crate::report::{TestReport, TrialOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PitKind {
    #[serde(rename = "extension-field-evaluation")]
    Eval,
    #[serde(rename = "modulus-polynomial")]
    ModPoly,
}

#[derive(Debug, Clone, Copy)]
pub struct RtConfig {
    pub p: PrimeModulus,
    pub k: u64,
    pub d: usize,
    pub trials: usize,
    pub pit: PitKind,
    pub seed: u64,
    /// Evaluation memory estimate cap, in MiB; None = unlimited.
    pub mem_mb: Option<usize>,
}

/// Smallest t with p^t >= k.
fn ceil_log(p: u64, k: u64) -> usize {
    let mut t = 0;
    let mut pw = 1u64;
    while pw < k {
        pw *= p;
        t += 1;
    }
    t
}

pub fn default_d(p: PrimeModulus, k: u64) -> usize {
    k as usize + ceil_log(p.get(), k) + 1
}

impl RtConfig {
    pub fn new(p: PrimeModulus, k: u64, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Usage("target degree k must be positive".into()));
        }
        Ok(RtConfig {
            p,
            k,
            d: default_d(p, k),
            trials: 20,
            pit: PitKind::Eval,
            seed,
            mem_mb: None,
        })
    }

    pub fn echo(&self) -> serde_json::Value {
        json!({
            "algorithm": "rt-mlm",
            "p": self.p.get(),
            "k": self.k,
            "d": self.d,
            "trials": self.trials,
            "pit": serde_json::to_value(self.pit).unwrap(),
            "seed": self.seed,
        })
    }
}

/// Uniform nonzero vector indices in Z_p^d, one per variable.
pub fn sample_vector_indices(n: usize, cfg: &RtConfig, rng: &mut impl Rng) -> Vec<usize> {
    let size = (cfg.p.get() as usize).pow(cfg.d as u32);
    (0..n).map(|_| rng.gen_range(1..size)).collect()
}

/// The substitution elements themselves, over Z_p: (p-1) at v⃗_i plus 1
/// at the zero vector.
pub fn sample_substitution(
    n: usize,
    cfg: &RtConfig,
    rng: &mut impl Rng,
) -> Vec<GaElement<PrimeField>> {
    let ga = GroupAlgebra::new(cfg.p, cfg.d, PrimeField { p: cfg.p.get() });
    sample_vector_indices(n, cfg, rng)
        .into_iter()
        .map(|v| ga.substitution_element(v))
        .collect()
}

/// Re-embed a Z_p substitution element into an algebra over `ring`.
fn embed<R: Ring>(e: &GaElement<PrimeField>, target: &GroupAlgebra<R>) -> GaElement<R> {
    GaElement { coeffs: e.coeffs.iter().map(|&c| target.ring.from_residue(c)).collect() }
}

/// Evaluate the augmented circuit over the graded algebra and return
/// whether the degree-k component is nonzero.
fn graded_nonzero<R: Ring>(
    ac: &AugmentedCircuit,
    subs: &[GaElement<PrimeField>],
    ys: &[R::Elem],
    ga: GroupAlgebra<R>,
    k: u64,
) -> Result<bool> {
    let ring = Graded::new(ga, k as usize);
    let xs: Vec<_> = subs
        .iter()
        .map(|e| ring.component(embed(e, &ring.inner), 1))
        .collect();
    let ys: Vec<_> = ys
        .iter()
        .map(|w| ring.component(ring.inner.scalar(w.clone()), 0))
        .collect();
    let assignment = ac.assemble(&xs, &ys);
    let out = eval_circuit(&ac.circuit, &ring, &assignment)?;
    Ok(!ring.inner.is_zero(&out[k as usize]))
}

/// Smallest ell with p^ell >= 4(h+1); keeps the false-zero rate of the
/// y-sampling at most 1/4.
pub fn min_ell(p: u64, h: usize) -> usize {
    let target = 4 * (h as u64 + 1);
    let mut ell = 1;
    let mut pw = p;
    while pw < target {
        pw = pw.saturating_mul(p);
        ell += 1;
    }
    ell
}

/// One-sided PIT by evaluation: each y_i gets a uniform element of
/// GF(p^ell); nonzero output certifies a nonzero polynomial.
pub fn identity_test_eval(
    ac: &AugmentedCircuit,
    subs: &[GaElement<PrimeField>],
    cfg: &RtConfig,
    field: &ExtField,
    rng: &mut impl Rng,
) -> Result<bool> {
    if field.size() < 4 * (ac.h as u64 + 1) {
        return Err(Error::Precondition(format!(
            "extension field of size {} is below 4(h+1) = {}",
            field.size(),
            4 * (ac.h + 1)
        )));
    }
    let ys: Vec<Poly> = (0..ac.h).map(|_| field.sample(rng)).collect();
    let ga = GroupAlgebra::new(cfg.p, cfg.d, field.clone());
    graded_nonzero(ac, subs, &ys, ga, cfg.k)
}

/// One-sided PIT modulo a random monic polynomial: Kronecker-substitute
/// y_i -> y^{(D+1)^{i-1}} and reduce mod a random monic r(y).
pub fn identity_test_modpoly(
    ac: &AugmentedCircuit,
    subs: &[GaElement<PrimeField>],
    cfg: &RtConfig,
    rng: &mut impl Rng,
) -> Result<bool> {
    let p = cfg.p.get();
    let h = ac.h as u128;
    // Per-variable y-degree bound: 1 along any path of a formula,
    // h in a general circuit.
    let dvar: u128 = if ac.circuit.is_formula() { 1 } else { h.max(1) };
    let s = ac.circuit.size() as u64;
    // Substituted degree bound: h * (D+1)^(h-1); r must have degree
    // ceil(log2(6 * s * (h+1))) + 1 so that at most a 1/6 fraction of
    // monic r of that degree divide any fixed nonzero coefficient.
    let target = 6u64.saturating_mul(s.max(1)).saturating_mul(ac.h as u64 + 1);
    let deg = (64 - target.leading_zeros() as usize) + 1;
    let mut r: Poly = (0..deg).map(|_| rng.gen_range(0..p)).collect();
    r.push(1);
    let quot = PolyQuotient::new(cfg.p, r);
    let ys: Vec<Poly> = (0..ac.h)
        .map(|i| quot.y_pow((dvar + 1).pow(i as u32)))
        .collect();
    let ga = GroupAlgebra::new(cfg.p, cfg.d, quot);
    graded_nonzero(ac, subs, &ys, ga, cfg.k)
}

fn check_budget(cfg: &RtConfig, ac: &AugmentedCircuit, elem_bytes: usize) -> Result<()> {
    let Some(mb) = cfg.mem_mb else { return Ok(()) };
    let size = (cfg.p.get() as usize).pow(cfg.d as u32);
    let per_value = (cfg.k as usize + 1) * size * elem_bytes;
    let estimate = per_value.saturating_mul(ac.circuit.size());
    if estimate > mb.saturating_mul(1 << 20) {
        return Err(Error::Resource(format!(
            "evaluation needs about {} bytes, over the {mb} MiB budget",
            estimate
        )));
    }
    Ok(())
}

pub fn rt_mlm(c: &Circuit, cfg: &RtConfig) -> Result<TestReport> {
    let start = Instant::now();
    if c.degree_bound() < cfg.k {
        // No degree-k monomial can exist; answer without trials.
        let mut report = TestReport::from_trials(cfg.echo(), Vec::new(), 0);
        report.witness = Some("degree bound below k".into());
        report.elapsed_micros = start.elapsed().as_micros() as u64;
        return Ok(report);
    }
    let ac = augment_circuit(c);
    check_budget(cfg, &ac, 16)?;
    let field = match cfg.pit {
        PitKind::Eval => Some(ExtField::new(cfg.p, min_ell(cfg.p.get(), ac.h))),
        PitKind::ModPoly => None,
    };
    let mut seeder = ChaCha8Rng::seed_from_u64(cfg.seed);
    let seeds: Vec<u64> = (0..cfg.trials).map(|_| seeder.gen()).collect();
    let trials: Vec<TrialOutcome> = seeds
        .into_par_iter()
        .map(|seed| {
            let t0 = Instant::now();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let subs = sample_substitution(c.n_vars(), cfg, &mut rng);
            let verdict = match cfg.pit {
                PitKind::Eval => {
                    identity_test_eval(&ac, &subs, cfg, field.as_ref().unwrap(), &mut rng)
                }
                PitKind::ModPoly => identity_test_modpoly(&ac, &subs, cfg, &mut rng),
            }?;
            Ok(TrialOutcome { seed, verdict, micros: t0.elapsed().as_micros() as u64 })
        })
        .collect::<Result<_>>()?;
    Ok(TestReport::from_trials(cfg.echo(), trials, start.elapsed().as_micros() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{independent, GroupVector};
    use crate::circuit::parse::parse_circuit;

    fn cfg(p: u64, k: u64, seed: u64) -> RtConfig {
        RtConfig::new(PrimeModulus::new(p).unwrap(), k, seed).unwrap()
    }

    #[test]
    fn default_dimension() {
        assert_eq!(default_d(PrimeModulus::new(2).unwrap(), 1), 2);
        assert_eq!(default_d(PrimeModulus::new(2).unwrap(), 2), 4);
        assert_eq!(default_d(PrimeModulus::new(2).unwrap(), 3), 6);
        assert_eq!(default_d(PrimeModulus::new(3).unwrap(), 3), 5);
    }

    #[test]
    fn substitution_shape() {
        let cfg = cfg(3, 2, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let subs = sample_substitution(5, &cfg, &mut rng);
        for e in &subs {
            let nonzero: Vec<(usize, u64)> = e
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| (i, c))
                .collect();
            assert_eq!(nonzero[0], (0, 1));
            assert_eq!(nonzero.len(), 2);
            assert_eq!(nonzero[1].1, 2);
        }
        let mut rng2 = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(subs, sample_substitution(5, &cfg, &mut rng2));
    }

    #[test]
    fn product_detected() {
        let c = parse_circuit("input x1\ninput x2\nmul g = x1 x2\noutput g\n").unwrap();
        let r = rt_mlm(&c, &cfg(2, 2, 42)).unwrap();
        assert!(r.yes());
    }

    #[test]
    fn square_always_rejected() {
        let c = parse_circuit("input x1\nmul g = x1 x1\noutput g\n").unwrap();
        let mut cfg = cfg(2, 2, 42);
        cfg.trials = 50;
        let r = rt_mlm(&c, &cfg).unwrap();
        assert!(!r.yes());
        assert!(r.trials.iter().all(|t| !t.verdict));
    }

    #[test]
    fn cancellation_mod2_vs_mod3() {
        let text = "input x1\ninput x2\nadd s = x1 x2\nmul g = s s\noutput g\n";
        let c = parse_circuit(text).unwrap();
        let mut c2 = cfg(2, 2, 5);
        c2.trials = 50;
        assert!(!rt_mlm(&c, &c2).unwrap().yes());
        // mod 3 the expansion keeps x1^2, a valid 3-monomial of degree 2
        assert!(rt_mlm(&c, &cfg(3, 2, 5)).unwrap().yes());
    }

    #[test]
    fn modpoly_route_agrees_on_basics() {
        let yes = parse_circuit("input x1\ninput x2\nmul g = x1 x2\noutput g\n").unwrap();
        let no = parse_circuit("input x1\nmul g = x1 x1\noutput g\n").unwrap();
        let mut c = cfg(2, 2, 9);
        c.pit = PitKind::ModPoly;
        c.trials = 30;
        assert!(rt_mlm(&yes, &c).unwrap().yes());
        assert!(!rt_mlm(&no, &c).unwrap().yes());
    }

    #[test]
    fn degree_bound_short_circuit() {
        let c = parse_circuit("input x1\ninput x2\nadd s = x1 x2\noutput s\n").unwrap();
        let r = rt_mlm(&c, &cfg(2, 2, 1)).unwrap();
        assert!(!r.yes());
        assert!(r.trials.is_empty());
    }

    #[test]
    fn reports_reproducible() {
        let text = "input x1\ninput x2\ninput x3\nadd s = x1 x2\nmul g = s x3\noutput g\n";
        let c = parse_circuit(text).unwrap();
        let a = rt_mlm(&c, &cfg(2, 2, 77)).unwrap();
        let b = rt_mlm(&c, &cfg(2, 2, 77)).unwrap();
        assert_eq!(a.canonical_json(), b.canonical_json());
        assert_ne!(
            a.canonical_json(),
            rt_mlm(&c, &cfg(2, 2, 78)).unwrap().canonical_json()
        );
    }

    #[test]
    fn budget_enforced() {
        let c = parse_circuit("input x1\nmul g = x1 x1\noutput g\n").unwrap();
        let mut cfg = cfg(2, 2, 1);
        cfg.mem_mb = Some(0);
        assert!(matches!(rt_mlm(&c, &cfg), Err(Error::Resource(_))));
    }

    #[test]
    fn independence_probability_at_least_three_quarters() {
        for &(p, k) in &[(2u64, 4u64), (3, 3), (2, 6), (3, 6)] {
            let cfg = cfg(p, k, 0);
            let mut rng = ChaCha8Rng::seed_from_u64(2024);
            let mut hits = 0;
            let samples = 10_000;
            for _ in 0..samples {
                let vecs: Vec<GroupVector> = sample_vector_indices(k as usize, &cfg, &mut rng)
                    .into_iter()
                    .map(|i| GroupVector::from_index(cfg.p, cfg.d, i))
                    .collect();
                if independent(&vecs) {
                    hits += 1;
                }
            }
            let rate = hits as f64 / samples as f64;
            assert!(rate >= 0.75, "p={p} k={k} rate={rate}");
        }
    }
}
