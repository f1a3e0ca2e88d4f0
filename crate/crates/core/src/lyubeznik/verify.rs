//! Identity checks relating integral, mod-p and mixed Bass numbers, and the
//! injective-dimension counterexample built on the Reisner ideal.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::Serialize;

use super::{bass_numbers, bass_numbers_mod_p, injective_dimension_report};
use crate::cech::check_prime;
use crate::exactlinalg::{FinAbGroup, MixedAbGroup};
use crate::lcmod::{iterated_lc, mult_p_status, support, GradedPrime, IteratedAt, LcContext, Piece, WindowModule};
use crate::monomial::{builtin_reisner, DegreeClass};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Hypothesis not met; `detail` records what was observed anyway.
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub statement: &'static str,
    pub status: CheckStatus,
    pub comparisons: usize,
    pub detail: String,
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub p: u64,
    /// Primes that are zero divisors on some `H^j_I(S)`.
    pub bad_primes: Vec<u64>,
    /// Adds the primes that are zero divisors on some `H^i_n H^j_I(S)`.
    pub iterated_bad_primes: Vec<u64>,
    pub checks: Vec<Check>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn status(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

/// Compares two index-aligned Bass sequences; returns mismatch descriptions.
fn compare(label: &str, lhs: &[usize], rhs: &[usize]) -> Vec<String> {
    let len = lhs.len().max(rhs.len());
    (0..len)
        .filter_map(|i| {
            let (a, b) = (lhs.get(i).copied().unwrap_or(0), rhs.get(i).copied().unwrap_or(0));
            (a != b).then(|| format!("{label} i={i}: {a} vs {b}"))
        })
        .collect()
}

fn top_piece(h: &WindowModule) -> Piece {
    h.piece(DegreeClass::full(h.n()))
}

/// Evaluates the integral/mod-p/mixed Bass-number identities and the injectivity criterion at `m = (p, x)`.
pub fn verify_identities(ctx: &LcContext, p: u64) -> Result<IdentityReport> {
    check_prime(p)?;
    let n = ctx.n();
    let top = ctx.top();
    let full = DegreeClass::full(n);
    let m = GradedPrime::new(full, p);
    let bad = ctx.bad_primes();
    let integral = ctx.all_local_cohomology()?;
    let modp: Vec<WindowModule> = (0..=top)
        .map(|j| ctx.local_cohomology_mod_p(j, p))
        .collect::<Result<_>>()?;
    let plus = ctx.local_cohomology_plus_p(p, None)?;

    let mut ibad: BTreeSet<u64> = bad.iter().copied().collect();
    for h in &integral {
        for x in h.koszul(full)? {
            ibad.extend(x.torsion_primes());
        }
    }
    let good = !bad.contains(&p);
    let igood = !ibad.contains(&p);
    let mut checks = Vec::new();

    // integral Bass numbers shift by one against F_p Bass numbers
    let mut mism = Vec::new();
    let mut count = 0;
    for j in 0..=top {
        let a = bass_numbers(&integral[j], m)?.mu;
        let b = bass_numbers_mod_p(&modp[j], full)?;
        let shifted: Vec<usize> = std::iter::once(0).chain(b).collect();
        count += a.len();
        mism.extend(compare(&format!("j={j}"), &a, &shifted));
    }
    checks.push(Check {
        name: "ext_nonzerodivisor",
        statement: "dim Ext^i_T(k, H^j_a(T)) = dim Ext^{i-1}_{T/pT}(k, H^j_a(T/pT)) when p is not a zero divisor",
        status: if good {
            status(mism.is_empty())
        } else {
            CheckStatus::Skipped
        },
        comparisons: count,
        detail: if good {
            format!("{count} entries compared")
        } else {
            format!(
                "p = {p} is a zero divisor on some H^j_I(S); observed {} mismatching entries",
                mism.len()
            )
        },
        witnesses: mism,
    });

    // Bass numbers of H^j_{I+pS} against F_p Bass numbers of H^{j-1}
    let mut mism = Vec::new();
    let mut count = 0;
    for (j, w) in plus.iter().enumerate() {
        let a = bass_numbers(w, m)?.mu;
        let b = if j == 0 {
            Vec::new()
        } else {
            bass_numbers_mod_p(&modp[j - 1], full)?
        };
        count += a.len();
        mism.extend(compare(&format!("j={j}"), &a, &b));
    }
    checks.push(Check {
        name: "ext_plus_p",
        statement: "dim Ext^i_T(k, H^j_b(T)) = dim Ext^i_{T/pT}(k, H^{j-1}_a(T/pT)) for b = a + pT",
        status: if good {
            status(mism.is_empty())
        } else {
            CheckStatus::Skipped
        },
        comparisons: count,
        detail: if good {
            format!("{count} entries compared")
        } else {
            format!(
                "p = {p} is a zero divisor on some H^j_I(S); observed {} mismatching entries",
                mism.len()
            )
        },
        witnesses: mism,
    });

    // H^i_m H^j_{I+pS} against H^{i+1}_m H^{j-1}_I
    let mut mism = Vec::new();
    let mut count = 0;
    let mut outer_integral: Vec<Vec<MixedAbGroup>> = Vec::new();
    for h in &integral {
        let mut row = Vec::new();
        for i in 0..=n + 1 {
            let r = iterated_lc(h, IteratedAt::M(p), i, None)?;
            row.push(r.full_cone.expect("integral input"));
        }
        outer_integral.push(row);
    }
    let mut outer_plus: Vec<Vec<MixedAbGroup>> = Vec::new();
    for w in &plus {
        let mut row = Vec::new();
        for i in 0..=n {
            match top_piece(&iterated_lc(w, IteratedAt::M(p), i, None)?.module) {
                Piece::Mixed(g) => row.push(g),
                _ => unreachable!("mixed input stays mixed"),
            }
        }
        outer_plus.push(row);
    }
    for (j, row) in outer_plus.iter().enumerate().skip(1) {
        for (i, a) in row.iter().enumerate() {
            let b = outer_integral.get(j - 1).and_then(|r| r.get(i + 1));
            count += 1;
            let same = match b {
                Some(b) => a.same_isomorphism_type(b),
                None => a.is_zero(),
            };
            if !same {
                let shown = b.map_or("0".to_string(), |b| b.to_string());
                mism.push(format!(
                    "H^{i}_m H^{j}_(I+pS) = {a} but H^{}_m H^{}_I = {shown}",
                    i + 1,
                    j - 1
                ));
            }
        }
    }
    checks.push(Check {
        name: "iterated_shift",
        statement: "H^i_m H^j_{I+pS}(S) = H^{i+1}_m H^{j-1}_I(S) for p outside the iterated bad primes",
        status: if igood {
            status(mism.is_empty())
        } else {
            CheckStatus::Skipped
        },
        comparisons: count,
        detail: if igood {
            format!("{count} module pairs compared")
        } else {
            format!(
                "p = {p} is an iterated bad prime; observed {} differing pairs",
                mism.len()
            )
        },
        witnesses: mism,
    });

    // m-supported modules: injective iff p acts surjectively iff μ^1 = 0
    let mut witnesses = Vec::new();
    let mut inconsistent = Vec::new();
    let mut count = 0;
    let mut probe = |label: String, g: &MixedAbGroup| -> Result<()> {
        let w = WindowModule::concentrated_mixed(n, g);
        let st = mult_p_status(&w, p);
        let mu = bass_numbers(&w, m)?;
        count += 1;
        if st.surjective != (mu.get(1) == 0) || mu.mu.iter().skip(2).any(|&x| x != 0) {
            inconsistent.push(format!(
                "{label}: surjective={} but Bass vector {:?}",
                st.surjective, mu.mu
            ));
        }
        if !st.surjective {
            let wit = st.surjective_witness.map(|w| w.element).unwrap_or_default();
            witnesses.push(format!("{label} = {g} is not injective: {wit}"));
        }
        Ok(())
    };
    for (j, row) in outer_integral.iter().enumerate() {
        for (i, g) in row.iter().enumerate() {
            probe(format!("H^{i}_m H^{j}_I"), g)?;
        }
    }
    for (j, row) in outer_plus.iter().enumerate() {
        for (i, g) in row.iter().enumerate() {
            probe(format!("H^{i}_m H^{j}_(I+pS)"), g)?;
        }
    }
    let ok = inconsistent.is_empty() && (!igood || witnesses.is_empty());
    let detail = if !inconsistent.is_empty() {
        inconsistent.join("; ")
    } else if igood {
        format!("{count} iterated modules, all divisible and injective")
    } else {
        format!(
            "{count} iterated modules; {} fail the criterion at the bad prime {p}",
            witnesses.len()
        )
    };
    checks.push(Check {
        name: "injectivity_criterion",
        statement: "an m-supported module is injective iff multiplication by p on it is surjective",
        status: status(ok),
        comparisons: count,
        detail,
        witnesses,
    });

    Ok(IdentityReport {
        p,
        bad_primes: bad,
        iterated_bad_primes: ibad.into_iter().collect(),
        checks,
    })
}

/// Per-class audit of `0 -> H^{j-1} -> H^{j-1}[1/p] -> H^j_{I+pS} -> H^j -> 0`.
#[derive(Clone, Debug, Serialize)]
pub struct ClassAudit {
    pub class: DegreeClass,
    pub lower: String,
    pub plus_p: String,
    pub upper: String,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SequenceAudit {
    pub p: u64,
    pub j: usize,
    /// `H^k_I(S) ⊗ Q = 0` for every `k ∉ {j-1}`.
    pub rational_concentration: bool,
    pub classes: Vec<ClassAudit>,
    pub exact: bool,
}

/// Exactness of the four-term sequence class by class:
/// `H^{j-1}` has no `p`-torsion, `H^j` is a finite `p`-group, and
/// `H^j_{I+pS} = Z(p^inf)^{rank H^{j-1}} + H^j`.
pub fn sequence_ce_audit(ctx: &LcContext, p: u64, j: usize) -> Result<SequenceAudit> {
    check_prime(p)?;
    let plus = ctx.local_cohomology_plus_p(p, None)?;
    let lower = ctx.local_cohomology(j - 1)?;
    let upper = ctx.local_cohomology(j)?;
    let mut rational_concentration = true;
    for k in 0..=ctx.top() {
        if k != j - 1 {
            let h = ctx.local_cohomology(k)?;
            rational_concentration &= h.classes().all(|s| h.piece(s).rational_rank() == 0);
        }
    }
    let pb = BigInt::from(p);
    let is_p_power = |d: &BigInt| {
        let mut x = d.clone();
        while &x % &pb == BigInt::from(0) {
            x /= &pb;
        }
        x == BigInt::from(1)
    };
    let mut classes = Vec::new();
    for sigma in crate::monomial::all_degree_classes(ctx.n()) {
        let a: &FinAbGroup = lower.integral_group(sigma).unwrap();
        let c: &FinAbGroup = upper.integral_group(sigma).unwrap();
        let b = plus[j].mixed_group(sigma).unwrap();
        let injective = !a.has_torsion_at(p);
        let finite_p = c.free_rank() == 0 && c.torsion().iter().all(is_p_power);
        let middle = b.divisible_corank() == a.free_rank() && b.torsion() == c.torsion();
        classes.push(ClassAudit {
            class: sigma,
            lower: a.to_string(),
            plus_p: b.to_string(),
            upper: c.to_string(),
            exact: injective && finite_p && middle,
        });
    }
    let exact = classes.iter().all(|c| c.exact);
    Ok(SequenceAudit {
        p,
        j,
        rational_concentration,
        classes,
        exact,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimResult {
    pub name: &'static str,
    pub statement: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub p: u64,
    /// Set when `p ≠ 2`: the prime-dependent claims are expected to fail.
    pub expected_fail_mode: bool,
    pub claims: Vec<ClaimResult>,
    pub all_passed: bool,
    /// All claims pass at `p = 2`; at other primes exactly the prime-dependent ones fail.
    pub as_expected: bool,
}

fn show(x: Option<usize>) -> String {
    x.map_or("undetermined".into(), |v| v.to_string())
}

const PRIME_DEPENDENT: [&str; 4] = [
    "support_is_m",
    "mult_p_not_surjective",
    "bass_vector",
    "injdim_exceeds_dimsupp",
];

/// Runs every claim of the counterexample on the built-in Reisner ideal at `p`.
pub fn verify_counterexample(p: u64) -> Result<CounterexampleReport> {
    check_prime(p)?;
    let ctx = LcContext::new(&builtin_reisner())?;
    let n = ctx.n();
    let full = DegreeClass::full(n);
    let m = GradedPrime::new(full, p);
    let mut claims = Vec::new();

    let ranks: Vec<usize> = (0..=ctx.top())
        .map(|j| {
            ctx.local_cohomology(j)
                .map(|h| h.classes().map(|s| h.piece(s).rational_rank()).sum())
        })
        .collect::<Result<_>>()?;
    claims.push(ClaimResult {
        name: "rational_vanishing",
        statement: "H^j_I(S) ⊗ Q = 0 unless j = 3",
        passed: ranks.iter().enumerate().all(|(j, &r)| (r > 0) == (j == 3)),
        detail: format!("total rational rank per j: {ranks:?}"),
    });

    let plus = ctx.local_cohomology_plus_p(p, None)?;
    let nonzero: Vec<usize> = plus
        .iter()
        .enumerate()
        .filter(|(_, w)| !w.is_zero())
        .map(|(j, _)| j)
        .collect();
    claims.push(ClaimResult {
        name: "plus_p_vanishing",
        statement: "H^j_{I+pS}(S) vanishes unless j = 4",
        passed: nonzero == vec![4],
        detail: format!("nonzero for j in {nonzero:?}"),
    });

    let h4 = ctx.local_cohomology(4)?;
    let supp = support(&h4);
    let shown: Vec<String> = supp.primes.iter().map(|q| q.to_string()).collect();
    claims.push(ClaimResult {
        name: "support_is_m",
        statement: "Supp H^4_I(S) = {m}, m = (p, x1..x6)",
        passed: supp.primes == vec![m],
        detail: format!(
            "support: {}",
            if shown.is_empty() {
                "empty".into()
            } else {
                shown.join(", ")
            }
        ),
    });

    let st = mult_p_status(&h4, p);
    claims.push(ClaimResult {
        name: "mult_p_not_surjective",
        statement: "multiplication by p on H^4_I(S) is not surjective; in particular H^4_I(S) ≠ 0",
        passed: !st.surjective && !h4.is_zero(),
        detail: match &st.surjective_witness {
            Some(w) => format!("witness at class {}: {}", w.class, w.element),
            None => "multiplication by p is surjective".into(),
        },
    });

    let bass = bass_numbers(&h4, m)?;
    claims.push(ClaimResult {
        name: "bass_vector",
        statement: "graded-model Bass numbers of H^4_I(S) at m: μ^0 ≥ 1, μ^1 ≥ 1, μ^i = 0 for i ≥ 2",
        passed: bass.get(0) >= 1 && bass.get(1) >= 1 && bass.mu.iter().skip(2).all(|&x| x == 0),
        detail: format!("μ = {:?}", bass.mu),
    });

    let (passed, detail) = if h4.is_zero() {
        (false, "H^4_I(S) is zero".to_string())
    } else {
        let r = injective_dimension_report(&h4, p)?;
        let local_zero = !r.supported_only_at_m || r.injdim_lower.is_none();
        let ok = r.injdim_upper == Some(1) && r.dimsupp_local == Some(0) && !local_zero;
        (
            ok,
            format!(
                "injdim at m = {}, dim Supp at m = {}, supported only at m: {}",
                show(r.injdim_upper),
                show(r.dimsupp_local),
                r.supported_only_at_m
            ),
        )
    };
    claims.push(ClaimResult {
        name: "injdim_exceeds_dimsupp",
        statement: "inj.dim H^4_I(S)_m = 1 > 0 = dim Supp H^4_I(S)_m",
        passed,
        detail,
    });

    let all_passed = claims.iter().all(|c| c.passed);
    let expected_fail_mode = p != 2;
    let as_expected = if expected_fail_mode {
        claims.iter().all(|c| c.passed != PRIME_DEPENDENT.contains(&c.name))
    } else {
        all_passed
    };
    Ok(CounterexampleReport {
        p,
        expected_fail_mode,
        claims,
        all_passed,
        as_expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monomial::MonomialIdeal;

    #[test]
    fn counterexample_at_two() {
        let r = verify_counterexample(2).unwrap();
        for c in &r.claims {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
        let r = verify_counterexample(3).unwrap();
        assert!(r.expected_fail_mode && r.as_expected && !r.all_passed);
    }

    #[test]
    fn sequence_is_exact() {
        let ctx = LcContext::new(&crate::monomial::builtin_reisner()).unwrap();
        let a = sequence_ce_audit(&ctx, 2, 4).unwrap();
        assert!(a.exact && a.rational_concentration);
    }

    #[test]
    fn identities_for_one_variable() {
        let ctx = LcContext::new(&MonomialIdeal::from_supports(2, &[vec![1]]).unwrap()).unwrap();
        let r = verify_identities(&ctx, 3).unwrap();
        assert!(r.checks.iter().all(|c| c.status == CheckStatus::Pass), "{r:#?}");
    }
}
