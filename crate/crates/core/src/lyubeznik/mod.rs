//! Bass numbers by Koszul cohomology, Lyubeznik tables in equal and mixed
//! characteristic, injective-dimension estimates and identity checks.
//!
//! All values are graded-model quantities: Bass numbers are taken at graded
//! primes of `Z[x_1..x_n]` (or `F_p[x_1..x_n]`), never over a completion.

mod verify;

use serde::Serialize;

use crate::cech::check_prime;
use crate::lcmod::{support, Coefficients, GradedPrime, LcContext, WindowModule};
use crate::monomial::{DegreeClass, MonomialIdeal};
use crate::{Error, Result};

pub use verify::{
    sequence_ce_audit, verify_counterexample, verify_identities, Check, CheckStatus, ClaimResult, CounterexampleReport,
    IdentityReport, SequenceAudit,
};

/// Bass numbers `μ^0, μ^1, ...` of a module at one graded prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BassVector {
    pub location: GradedPrime,
    pub mu: Vec<usize>,
}

impl BassVector {
    /// Largest `i` with `μ^i ≠ 0`.
    pub fn top(&self) -> Option<usize> {
        self.mu.iter().rposition(|&m| m != 0)
    }

    pub fn get(&self, i: usize) -> usize {
        self.mu.get(i).copied().unwrap_or(0)
    }
}

/// Bass numbers at `P_τ` (characteristic 0) or `P_τ + (ℓ)`.
///
/// At `P_τ + (ℓ)` both the two-step rule on `H^•(x_τ; M)` and the Koszul complex on
/// `(ℓ, x_τ)` are evaluated; a disagreement is an internal error.
pub fn bass_numbers(h: &WindowModule, location: GradedPrime) -> Result<BassVector> {
    let tau = location.tau;
    let l = location.characteristic;
    let mu = if l == 0 {
        h.koszul(tau)?.iter().map(|x| x.rational_rank()).collect()
    } else {
        check_prime(l)?;
        match h.coefficients() {
            Coefficients::ModPrime(p) | Coefficients::Mixed(p) if p != l => {
                return Err(Error::CoefficientMismatch(format!(
                    "{p}-primary module at a prime containing {l}"
                )));
            }
            _ => {}
        }
        let a = h.koszul_with_prime(tau, l)?;
        let b = h.koszul_with_prime_direct(tau, l)?;
        if a != b {
            return Err(Error::Internal(format!(
                "Bass numbers at {location}: two-step rule {a:?}, direct Koszul {b:?}"
            )));
        }
        a
    };
    Ok(BassVector { location, mu })
}

/// Bass numbers of a module over `F_p[x]` at `(x_τ)`, i.e. over the ring of characteristic `p`.
pub fn bass_numbers_mod_p(h: &WindowModule, tau: DegreeClass) -> Result<Vec<usize>> {
    let Coefficients::ModPrime(p) = h.coefficients() else {
        return Err(Error::CoefficientMismatch(
            "equal-characteristic Bass numbers need an F_p module".into(),
        ));
    };
    Ok(h.koszul(tau)?.iter().map(|x| x.ker_dim(p)).collect())
}

/// For `pM = 0`: Bass numbers over `Z[x]` at `P_τ + (p)` against the sum of adjacent
/// Bass numbers over `F_p[x]`. `None` when `M` is not killed by `p`.
pub fn comp_ext_sum_rule(h: &WindowModule, p: u64, tau: DegreeClass) -> Result<Option<bool>> {
    let (integral, modp) = match h.coefficients() {
        Coefficients::Integral => match h.reduce_mod_p(p) {
            Some(m) => (h.clone(), m),
            None => return Ok(None),
        },
        Coefficients::ModPrime(q) if q == p => (h.as_integral().expect("mod-p module"), h.clone()),
        _ => return Ok(None),
    };
    let mixed = bass_numbers(&integral, GradedPrime::new(tau, p))?.mu;
    let bar = bass_numbers_mod_p(&modp, tau)?;
    let ok = (0..mixed.len()).all(|i| {
        let s = bar.get(i).copied().unwrap_or(0) + if i > 0 { bar.get(i - 1).copied().unwrap_or(0) } else { 0 };
        s == mixed[i]
    });
    Ok(Some(ok))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    /// `λ_{i,j}(A)`, `A = (S/(I+pS))` at `m`, over `F_p[x]`.
    Standard,
    /// `λ̃_{i,j}(A)` from `H^{n+1-j}_{I+pS}(S)` over `Z[x]`.
    MixedQuotient,
    /// `λ̃_{i,j}(R_Q)` from `H^{n+1-j}_I(S)` over `Z[x]`.
    MixedRing,
}

/// Square table `λ[i][j]`, `0 ≤ i, j < size`; `size` is one more than the dimension of the ambient local model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LyubeznikTable {
    pub kind: TableKind,
    pub p: u64,
    pub n: usize,
    /// Dimension of the local ring the table belongs to.
    pub dim: usize,
    pub entries: Vec<Vec<usize>>,
}

impl LyubeznikTable {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.entries.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0)
    }

    /// Zero outside column `dim`.
    pub fn is_concentrated(&self) -> bool {
        (0..self.size()).all(|i| (0..self.size()).all(|j| j == self.dim || self.get(i, j) == 0))
    }

    /// Rows as text, `i` down and `j` across.
    pub fn render(&self) -> String {
        let w = self
            .entries
            .iter()
            .flatten()
            .map(|x| x.to_string().len())
            .max()
            .unwrap_or(1)
            .max(1);
        let mut out = String::new();
        out.push_str(&format!("{:>4}", "i\\j"));
        for j in 0..self.size() {
            out.push_str(&format!(" {j:>w$}"));
        }
        out.push('\n');
        for (i, row) in self.entries.iter().enumerate() {
            out.push_str(&format!("{i:>4}"));
            for x in row {
                out.push_str(&format!(" {x:>w$}"));
            }
            out.push('\n');
        }
        out
    }
}

fn dim_a(ideal: &MonomialIdeal) -> Result<usize> {
    ideal.quotient_dimension().ok_or(Error::UnitIdeal)
}

/// `λ_{i,j}(A) = μ^i` of `H^{n-j}_I(S/pS)` at `(x_1..x_n)` over `F_p[x]`.
#[allow(clippy::needless_range_loop)]
pub fn standard_lyubeznik_table(ctx: &LcContext, p: u64) -> Result<LyubeznikTable> {
    check_prime(p)?;
    let n = ctx.n();
    let d = dim_a(ctx.ideal())?;
    let full = DegreeClass::full(n);
    let mut entries = vec![vec![0; n + 1]; n + 1];
    for j in 0..=n {
        let m = ctx.local_cohomology_mod_p(n - j, p)?;
        for (i, mu) in bass_numbers_mod_p(&m, full)?.into_iter().enumerate() {
            entries[i][j] = mu;
        }
        if let Some(ok) = comp_ext_sum_rule(&m, p, full)? {
            if !ok {
                return Err(Error::Internal(format!("sum rule fails for H^{}_I(S/{p}S)", n - j)));
            }
        }
    }
    let t = LyubeznikTable {
        kind: TableKind::Standard,
        p,
        n,
        dim: d,
        entries,
    };
    if (0..=n).any(|i| (d + 1..=n).any(|j| t.get(i, j) != 0)) {
        return Err(Error::Internal(
            "standard table has entries beyond the dimension".into(),
        ));
    }
    if t.get(d, d) == 0 {
        return Err(Error::Internal(format!(
            "highest Lyubeznik number λ[{d}][{d}] vanishes"
        )));
    }
    Ok(t)
}

/// `λ̃(A)` and `λ̃(R_Q)` at `m = (p, x_1..x_n)`.
#[derive(Clone, Debug, Serialize)]
pub struct MixedTables {
    pub quotient: LyubeznikTable,
    pub ring: LyubeznikTable,
    pub trunc_exponent: u32,
    /// Number of `p`-killed integral modules on which the sum rule was checked.
    pub sum_rule_checks: usize,
}

pub fn mixed_lyubeznik_table(ctx: &LcContext, p: u64, trunc: Option<u32>) -> Result<MixedTables> {
    check_prime(p)?;
    let n = ctx.n();
    let d = dim_a(ctx.ideal())?;
    let full = DegreeClass::full(n);
    let m = GradedPrime::new(full, p);
    let trunc = trunc.unwrap_or_else(|| ctx.trunc_exponent(p));
    let plus = ctx.local_cohomology_plus_p(p, Some(trunc))?;
    let mut qa = vec![vec![0; n + 2]; n + 2];
    let mut rq = vec![vec![0; n + 2]; n + 2];
    let mut checks = 0;
    for j in 0..=n + 1 {
        let k = n + 1 - j;
        if let Some(w) = plus.get(k) {
            for (i, mu) in bass_numbers(w, m)?.mu.into_iter().enumerate() {
                qa[i][j] = mu;
            }
        }
        if k <= ctx.top() {
            let h = ctx.local_cohomology(k)?;
            for (i, mu) in bass_numbers(&h, m)?.mu.into_iter().enumerate() {
                rq[i][j] = mu;
            }
            if let Some(ok) = comp_ext_sum_rule(&h, p, full)? {
                checks += 1;
                if !ok {
                    return Err(Error::Internal(format!(
                        "sum rule fails for the p-killed module H^{k}_I(S)"
                    )));
                }
            }
        }
    }
    Ok(MixedTables {
        quotient: LyubeznikTable {
            kind: TableKind::MixedQuotient,
            p,
            n,
            dim: d,
            entries: qa,
        },
        ring: LyubeznikTable {
            kind: TableKind::MixedRing,
            p,
            n,
            dim: d + 1,
            entries: rq,
        },
        trunc_exponent: trunc,
        sum_rule_checks: checks,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableDifference {
    pub i: usize,
    pub j: usize,
    pub standard: usize,
    pub mixed: usize,
}

/// Entrywise comparison of `λ(A)` with `λ̃(A)` and with the shifted `λ̃(R_Q)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Agreement {
    pub quotient_agrees: bool,
    pub ring_agrees: bool,
    pub quotient_differences: Vec<TableDifference>,
    /// `(i, j)` indexes `λ̃_{i,j}(R_Q)`, compared with `λ_{i-1,j-1}(A)` (zero when `i` or `j` is 0).
    pub ring_differences: Vec<TableDifference>,
}

impl Agreement {
    pub fn all_agree(&self) -> bool {
        self.quotient_agrees && self.ring_agrees
    }
}

pub fn compare_tables(standard: &LyubeznikTable, mixed: &MixedTables) -> Agreement {
    let size = mixed.quotient.size();
    let mut qd = Vec::new();
    for i in 0..size {
        for j in 0..size {
            let (a, b) = (standard.get(i, j), mixed.quotient.get(i, j));
            if a != b {
                qd.push(TableDifference {
                    i,
                    j,
                    standard: a,
                    mixed: b,
                });
            }
        }
    }
    let mut rd = Vec::new();
    for i in 0..size {
        for j in 0..size {
            let a = if i > 0 && j > 0 { standard.get(i - 1, j - 1) } else { 0 };
            let b = mixed.ring.get(i, j);
            if a != b {
                rd.push(TableDifference {
                    i,
                    j,
                    standard: a,
                    mixed: b,
                });
            }
        }
    }
    Agreement {
        quotient_agrees: qd.is_empty(),
        ring_agrees: rd.is_empty(),
        quotient_differences: qd,
        ring_differences: rd,
    }
}

/// Both table kinds with their comparison.
#[derive(Clone, Debug, Serialize)]
pub struct LyubeznikReport {
    pub p: u64,
    pub good_prime: bool,
    pub standard: LyubeznikTable,
    pub mixed: Option<MixedTables>,
    pub agreement: Option<Agreement>,
}

pub fn lyubeznik_report(ctx: &LcContext, p: u64, mixed: bool, trunc: Option<u32>) -> Result<LyubeznikReport> {
    let standard = standard_lyubeznik_table(ctx, p)?;
    let good_prime = !ctx.bad_primes().contains(&p);
    let (mixed, agreement) = if mixed {
        let m = mixed_lyubeznik_table(ctx, p, trunc)?;
        let a = compare_tables(&standard, &m);
        if good_prime && !a.all_agree() {
            return Err(Error::Internal(format!("tables disagree at the good prime {p}: {a:?}")));
        }
        (Some(m), Some(a))
    } else {
        (None, None)
    };
    Ok(LyubeznikReport {
        p,
        good_prime,
        standard,
        mixed,
        agreement,
    })
}

/// Injective dimension of a module localized at `m = (p, x_1..x_n)`, graded-model reading.
#[derive(Clone, Debug, Serialize)]
pub struct InjDimReport {
    pub p: u64,
    /// Largest `i` with `μ^i ≠ 0` at some graded prime inside `m`.
    pub injdim_lower: Option<usize>,
    /// Equal to the lower bound when the localized module is supported only at `m`; otherwise unknown.
    pub injdim_upper: Option<usize>,
    pub dimsupp_local: Option<usize>,
    pub dimsupp_ambient: Option<usize>,
    pub supported_only_at_m: bool,
    /// `injdim ≤ dim Supp` (evaluated on the lower bound).
    pub bound_holds: bool,
    pub bass: Vec<BassVector>,
}

pub fn injective_dimension_report(h: &WindowModule, p: u64) -> Result<InjDimReport> {
    check_prime(p)?;
    if h.is_zero() {
        return Err(Error::Malformed("injective dimension of the zero module".into()));
    }
    let n = h.n();
    let supp = support(h);
    let mut bass = Vec::new();
    for tau in crate::monomial::all_degree_classes(n) {
        for c in [0, p] {
            if !supp.contains(tau, c) {
                continue;
            }
            if c == 0 && h.coefficients() != Coefficients::Integral {
                continue;
            }
            bass.push(bass_numbers(h, GradedPrime::new(tau, c))?);
        }
    }
    let injdim_lower = bass.iter().filter_map(BassVector::top).max();
    let m = GradedPrime::new(DegreeClass::full(n), p);
    let only_m = bass.iter().all(|b| b.location == m || b.top().is_none());
    let dimsupp_local = supp.dim_local(p);
    let bound_holds = match (injdim_lower, dimsupp_local) {
        (Some(i), Some(d)) => i <= d,
        _ => true,
    };
    Ok(InjDimReport {
        p,
        injdim_lower,
        injdim_upper: if only_m { injdim_lower } else { None },
        dimsupp_local,
        dimsupp_ambient: supp.dim_ambient(),
        supported_only_at_m: only_m,
        bound_holds,
        bass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monomial::{builtin_reisner, builtin_three_points};

    #[test]
    fn top_cohomology_of_the_maximal_ideal() {
        let ctx = LcContext::new(&MonomialIdeal::maximal(3)).unwrap();
        let h = ctx.local_cohomology(3).unwrap();
        let b = bass_numbers(&h, GradedPrime::new(DegreeClass::full(3), 5)).unwrap();
        assert_eq!(b.mu, vec![0, 1, 0, 0, 0]);
        let r = injective_dimension_report(&h, 5).unwrap();
        assert_eq!((r.injdim_lower, r.dimsupp_local), (Some(1), Some(1)));
    }

    #[test]
    fn reisner_bass_vector() {
        let ctx = LcContext::new(&builtin_reisner()).unwrap();
        let h4 = ctx.local_cohomology(4).unwrap();
        let b = bass_numbers(&h4, GradedPrime::new(DegreeClass::full(6), 2)).unwrap();
        assert!(b.get(0) >= 1 && b.get(1) >= 1 && b.mu[2..].iter().all(|&x| x == 0));
        assert_eq!(comp_ext_sum_rule(&h4, 2, DegreeClass::full(6)).unwrap(), Some(true));
        let r = injective_dimension_report(&h4, 2).unwrap();
        assert_eq!(
            (r.injdim_lower, r.injdim_upper, r.dimsupp_local),
            (Some(1), Some(1), Some(0))
        );
        assert!(!r.bound_holds);
    }

    #[test]
    fn three_points_table() {
        let ctx = LcContext::new(&builtin_three_points()).unwrap();
        let rep = lyubeznik_report(&ctx, 7, true, None).unwrap();
        assert!(rep.agreement.unwrap().all_agree());
        // one-dimensional, so the table is trivial
        assert_eq!(rep.standard.get(1, 1), 1);
        assert_eq!(rep.standard.get(0, 1), 0);
        assert!(rep.standard.is_concentrated());
    }
}
