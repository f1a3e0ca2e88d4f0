//! Independent recomputations used to cross-check the main routes.
//!
//! * redundant generating sets must give the same Čech cohomology;
//! * every piece must match the reduced cohomology of the induced subcomplex
//!   of the Alexander dual (`H^k_I(S)_σ = H~^{k-2}((Δ^∨)|_σ)` for `σ ≠ ∅`);
//! * associated primes from socles must match a brute-force scan.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cech::{graded_cech, graded_cech_from_generators};
use crate::exactlinalg::{complex_cohomology, FinAbGroup};
use crate::lcmod::{associated_primes, associated_primes_by_scan, iterated_lc, IteratedAt, LcContext};
use crate::monomial::{all_degree_classes, random_squarefree_ideal, DegreeClass, MonomialIdeal};
use crate::Result;

fn groups(c: &crate::exactlinalg::FreeComplex) -> Result<Vec<FinAbGroup>> {
    Ok(complex_cohomology(c)?
        .iter()
        .map(|h| h.group().without_lift())
        .collect())
}

fn same(a: &[FinAbGroup], b: &[FinAbGroup]) -> bool {
    let len = a.len().max(b.len());
    let zero = FinAbGroup::zero();
    (0..len).all(|k| {
        a.get(k)
            .unwrap_or(&zero)
            .same_isomorphism_type(b.get(k).unwrap_or(&zero))
    })
}

/// Generators plus `extra` random squarefree multiples of them, shuffled.
pub fn redundant_generators<R: Rng>(rng: &mut R, ideal: &MonomialIdeal, extra: usize) -> Vec<u32> {
    let mut gens = ideal.generators().to_vec();
    let full = DegreeClass::full(ideal.n()).mask();
    for _ in 0..extra {
        if let Some(&g) = ideal.generators().choose(rng) {
            gens.push(g | (rng.gen::<u32>() & full));
        }
    }
    gens.shuffle(rng);
    gens
}

/// Classes where the Čech cohomology on `gens` differs from the canonical one.
pub fn generator_set_mismatches(ideal: &MonomialIdeal, gens: &[u32]) -> Result<Vec<DegreeClass>> {
    let mut bad = Vec::new();
    for s in all_degree_classes(ideal.n()) {
        let a = groups(graded_cech(ideal, s).complex())?;
        let b = groups(graded_cech_from_generators(ideal.n(), gens, s)?.complex())?;
        if !same(&a, &b) {
            bad.push(s);
        }
    }
    Ok(bad)
}

/// `H^k` at `σ` from the Alexander dual, `k = 0..=r`.
pub fn alexander_dual_piece(ideal: &MonomialIdeal, sigma: DegreeClass) -> Result<Vec<FinAbGroup>> {
    let r = ideal.num_generators();
    let mut out = vec![FinAbGroup::zero(); r + 1];
    if sigma.is_empty() || ideal.is_zero() || ideal.is_unit() {
        return Ok(out);
    }
    let dual = ideal.stanley_reisner_complex().alexander_dual().induced(sigma);
    // term t of the augmented cochain complex is H~^{t-1}, which sits in H^{t+1}
    for (t, g) in groups(&dual.reduced_cochain_complex())?.into_iter().enumerate() {
        if !g.is_zero() {
            out[t + 1] = g;
        }
    }
    Ok(out)
}

pub fn alexander_dual_mismatches(ideal: &MonomialIdeal) -> Result<Vec<DegreeClass>> {
    let mut bad = Vec::new();
    for s in all_degree_classes(ideal.n()) {
        let a = groups(graded_cech(ideal, s).complex())?;
        if !same(&a, &alexander_dual_piece(ideal, s)?) {
            bad.push(s);
        }
    }
    Ok(bad)
}

/// Modules `H^j_I(S)`, `H^i_m H^j_I(S)` on which socle-based and scanned associated primes differ.
pub fn associated_prime_mismatches(ctx: &LcContext, p: u64) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    for (j, h) in ctx.all_local_cohomology()?.iter().enumerate() {
        if associated_primes(h)? != associated_primes_by_scan(h)? {
            bad.push(format!("H^{j}_I"));
        }
        for i in 0..=ctx.n() + 1 {
            let x = iterated_lc(h, IteratedAt::M(p), i, None)?.module;
            if associated_primes(&x)? != associated_primes_by_scan(&x)? {
                bad.push(format!("H^{i}_m H^{j}_I"));
            }
        }
    }
    Ok(bad)
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleCase {
    pub ideal: String,
    pub generator_set: Vec<DegreeClass>,
    pub alexander_dual: Vec<DegreeClass>,
    pub associated_primes: Vec<String>,
}

impl OracleCase {
    pub fn passed(&self) -> bool {
        self.generator_set.is_empty() && self.alexander_dual.is_empty() && self.associated_primes.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub seed: u64,
    pub cases: Vec<OracleCase>,
    pub failures: usize,
}

pub fn check_ideal<R: Rng>(rng: &mut R, ideal: &MonomialIdeal, p: u64) -> Result<OracleCase> {
    let gens = redundant_generators(rng, ideal, 2);
    let ctx = LcContext::new(ideal)?;
    Ok(OracleCase {
        ideal: ideal.to_string(),
        generator_set: generator_set_mismatches(ideal, &gens)?,
        alexander_dual: alexander_dual_mismatches(ideal)?,
        associated_primes: associated_prime_mismatches(&ctx, p)?,
    })
}

/// `count` random squarefree ideals in at most `max_vars` variables, seeded.
pub fn oracle_check(seed: u64, count: usize, max_vars: usize, p: u64) -> Result<OracleReport> {
    let cases: Vec<OracleCase> = (0..count)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            let n = rng.gen_range(1..=max_vars);
            let r = rng.gen_range(1..=n + 1);
            let ideal = random_squarefree_ideal(&mut rng, n, r);
            check_ideal(&mut rng, &ideal, p)
        })
        .collect::<Result<_>>()?;
    let failures = cases.iter().filter(|c| !c.passed()).count();
    Ok(OracleReport { seed, cases, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monomial::{builtin_reisner, builtin_three_points};

    #[test]
    fn dual_formula_on_builtins() {
        for i in [builtin_reisner(), builtin_three_points(), MonomialIdeal::maximal(3)] {
            assert!(alexander_dual_mismatches(&i).unwrap().is_empty(), "{i}");
        }
    }

    #[test]
    fn small_seeded_run() {
        let r = oracle_check(7, 8, 4, 2).unwrap();
        assert_eq!(r.failures, 0, "{:#?}", r.cases);
    }
}
