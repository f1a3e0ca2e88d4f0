use std::fmt::Write as _;

use serde::Serialize;

use gradedlc::lcmod::{
    associated_primes, is_injective_m_supported, iterated_lc, mult_p_status, support, GradedPrime, IteratedAt,
    IteratedPath, LcContext, MultPWitness, PieceShape, WindowModule,
};
use gradedlc::lyubeznik::{
    lyubeznik_report, sequence_ce_audit, verify_counterexample, verify_identities, CheckStatus, CounterexampleReport,
    IdentityReport, LyubeznikReport, SequenceAudit,
};
use gradedlc::monomial::{all_degree_classes, auxiliary_ideals, builtin, DegreeClass, MonomialIdeal};
use gradedlc::oracle::oracle_check;

use crate::report::{hash, output, CliError, Output, Warning};
use crate::{At, Cmd};

type Res<T> = std::result::Result<T, CliError>;

struct Loaded {
    ideal: MonomialIdeal,
    hash: String,
    warnings: Vec<Warning>,
}

fn load(source: &str, max_vars: usize) -> Res<Loaded> {
    let ideal = if let Some(name) = source.strip_prefix("builtin:") {
        builtin(name).ok_or_else(|| CliError::Input(format!("unknown built-in ideal '{name}'")))?
    } else {
        let text = std::fs::read_to_string(source).map_err(|e| CliError::Io(source.to_string(), e))?;
        MonomialIdeal::parse(&text)?
    };
    if ideal.n() > max_vars {
        return Err(CliError::Input(format!(
            "{} variables exceeds --max-vars {max_vars} (2^n degree classes)",
            ideal.n()
        )));
    }
    let mut warnings = Vec::new();
    if ideal.radical_taken() {
        warnings.push(Warning::new(
            "RADICAL_TAKEN",
            format!("non-squarefree generators replaced by their radical {ideal}"),
        ));
    }
    if ideal.is_unit() {
        warnings.push(Warning::new(
            "TRIVIAL_IDEAL",
            "unit ideal: every local cohomology module is zero",
        ));
    } else if ideal.is_zero() {
        warnings.push(Warning::new(
            "TRIVIAL_IDEAL",
            "zero ideal: H^0 is the ring and nothing else survives",
        ));
    }
    Ok(Loaded {
        hash: hash(&ideal.to_json()),
        ideal,
        warnings,
    })
}

fn parse_class(s: &str, n: usize) -> Res<DegreeClass> {
    let t = s.trim().trim_start_matches('{').trim_end_matches('}');
    let mut vars = Vec::new();
    for part in t.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let v: usize = part
            .parse()
            .map_err(|_| CliError::Input(format!("bad variable number '{part}'")))?;
        if v == 0 || v > n {
            return Err(CliError::Input(format!("variable {v} out of range 1..={n}")));
        }
        vars.push(v);
    }
    Ok(DegreeClass::from_vars(&vars))
}

fn check_prime(p: u64) -> Res<u64> {
    if p < 2 || (2..).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
        return Err(gradedlc::Error::NotPrime(p).into());
    }
    Ok(p)
}

fn need_prime(p: Option<u64>) -> Res<u64> {
    check_prime(p.ok_or_else(|| CliError::Input("--prime is required here".into()))?)
}

pub fn run(cmd: &Cmd, max_vars: usize) -> Res<Output> {
    match cmd {
        Cmd::Lc { ideal, j, class } => lc(cmd, load(ideal, max_vars)?, *j, class.as_deref()),
        Cmd::Support { ideal, j } => supp(cmd, load(ideal, max_vars)?, *j),
        Cmd::BadPrimes { ideal } => bad(cmd, load(ideal, max_vars)?),
        Cmd::Lyubeznik {
            ideal,
            prime,
            mixed,
            trunc,
            identities,
        } => lyub(
            cmd,
            load(ideal, max_vars)?,
            check_prime(*prime)?,
            *mixed,
            *trunc,
            *identities,
        ),
        Cmd::Iterated {
            ideal,
            i,
            j,
            prime,
            at,
            plus_p,
            trunc,
        } => iterated(cmd, load(ideal, max_vars)?, *i, *j, *prime, *at, *plus_p, *trunc),
        Cmd::VerifyCounterexample { prime } => counterexample(cmd, check_prime(*prime)?),
        Cmd::OracleCheck {
            seed,
            count,
            max_n,
            prime,
        } => oracle(cmd, *seed, *count, (*max_n).min(max_vars), check_prime(*prime)?),
    }
}

#[derive(Serialize)]
struct PieceOut {
    j: usize,
    class: DegreeClass,
    group: PieceShape,
    text: String,
}

#[derive(Serialize)]
struct LcOut {
    ideal: String,
    n: usize,
    pieces: Vec<PieceOut>,
}

fn lc(cmd: &Cmd, l: Loaded, j: Option<usize>, class: Option<&str>) -> Res<Output> {
    let n = l.ideal.n();
    let ctx = LcContext::new(&l.ideal)?;
    let class = class.map(|c| parse_class(c, n)).transpose()?;
    if let Some(j) = j {
        if j > ctx.top() {
            return Err(CliError::Input(format!(
                "j = {j} exceeds the number of generators {}",
                ctx.top()
            )));
        }
    }
    let mut pieces = Vec::new();
    let ring = if n == 1 {
        "Z[x1]".to_string()
    } else {
        format!("Z[x1..x{n}]")
    };
    let mut text = format!("local cohomology of {} in {ring}\n", l.ideal);
    for (k, h) in ctx.all_local_cohomology()?.iter().enumerate() {
        if j.is_some_and(|j| j != k) {
            continue;
        }
        for s in all_degree_classes(n) {
            if class.is_some_and(|c| c != s) {
                continue;
            }
            let p = h.piece(s);
            if p.is_zero() && class.is_none() {
                continue;
            }
            writeln!(text, "H^{k} {s}: {p}").unwrap();
            pieces.push(PieceOut {
                j: k,
                class: s,
                group: p.shape(),
                text: p.to_string(),
            });
        }
    }
    if pieces.is_empty() {
        text.push_str("all zero\n");
    }
    let res = LcOut {
        ideal: l.ideal.to_string(),
        n,
        pieces,
    };
    Ok(output(cmd, Some(&l.hash), &res, text, l.warnings, 0))
}

#[derive(Serialize)]
struct SupportOut {
    j: usize,
    support: Vec<GradedPrime>,
    support_text: Vec<String>,
    minimal: Vec<String>,
    dim_ambient: Option<usize>,
    associated_primes: Vec<String>,
}

fn names(ps: &[GradedPrime]) -> Vec<String> {
    ps.iter().map(ToString::to_string).collect()
}

fn supp(cmd: &Cmd, l: Loaded, j: Option<usize>) -> Res<Output> {
    let ctx = LcContext::new(&l.ideal)?;
    let mut out = Vec::new();
    let mut text = String::new();
    for (k, h) in ctx.all_local_cohomology()?.iter().enumerate() {
        if j.is_some_and(|j| j != k) || (j.is_none() && h.is_zero()) {
            continue;
        }
        let s = support(h);
        let ass = associated_primes(h)?;
        writeln!(text, "H^{k}: Supp = {{{}}}", names(&s.primes).join(", ")).unwrap();
        writeln!(text, "     Ass  = {{{}}}", names(&ass.primes).join(", ")).unwrap();
        out.push(SupportOut {
            j: k,
            support_text: names(&s.primes),
            minimal: names(&s.minimal()),
            dim_ambient: s.dim_ambient(),
            associated_primes: names(&ass.primes),
            support: s.primes,
        });
    }
    Ok(output(cmd, Some(&l.hash), &out, text, l.warnings, 0))
}

#[derive(Serialize)]
struct BadOut {
    bad_primes: Vec<u64>,
}

fn bad(cmd: &Cmd, l: Loaded) -> Res<Output> {
    let ctx = LcContext::new(&l.ideal)?;
    let w = ctx.bad_primes();
    let text = format!(
        "W = {{{}}}\n",
        w.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
    );
    Ok(output(
        cmd,
        Some(&l.hash),
        &BadOut { bad_primes: w },
        text,
        l.warnings,
        0,
    ))
}

#[derive(Serialize)]
struct LyubOut {
    #[serde(flatten)]
    report: LyubeznikReport,
    verdict: Option<&'static str>,
    identities: Option<IdentityReport>,
}

fn bump_trunc(ctx: &LcContext, p: u64, trunc: Option<u32>, warnings: &mut Vec<Warning>) -> Option<u32> {
    let need = ctx.trunc_exponent(p);
    match trunc {
        Some(t) if t < need => {
            warnings.push(Warning::new(
                "TRUNC_BUMPED",
                format!("--trunc {t} is below 1 + the largest {p}-valuation; using {need}"),
            ));
            Some(need)
        }
        t => t,
    }
}

fn lyub(cmd: &Cmd, mut l: Loaded, p: u64, mixed: bool, trunc: Option<u32>, ids: bool) -> Res<Output> {
    let ctx = LcContext::new(&l.ideal)?;
    let trunc = bump_trunc(&ctx, p, trunc, &mut l.warnings);
    let report = lyubeznik_report(&ctx, p, mixed, trunc)?;
    let mut text = format!(
        "standard Lyubeznik table at p = {p} (i down, j across):\n{}",
        report.standard.render()
    );
    let verdict = report
        .agreement
        .as_ref()
        .map(|a| if a.all_agree() { "agree" } else { "disagree" });
    if let (Some(m), Some(a)) = (&report.mixed, &report.agreement) {
        write!(
            text,
            "\nmixed table of A:\n{}\nmixed table of R_Q:\n{}",
            m.quotient.render(),
            m.ring.render()
        )
        .unwrap();
        writeln!(text, "\nverdict: {}", if a.all_agree() { "agree" } else { "disagree" }).unwrap();
        for d in &a.quotient_differences {
            writeln!(
                text,
                "  A   [{}][{}]: standard {}, mixed {}",
                d.i, d.j, d.standard, d.mixed
            )
            .unwrap();
        }
        for d in &a.ring_differences {
            writeln!(
                text,
                "  R_Q [{}][{}]: shifted standard {}, mixed {}",
                d.i, d.j, d.standard, d.mixed
            )
            .unwrap();
        }
    }
    let identities = if ids { Some(verify_identities(&ctx, p)?) } else { None };
    let mut exit = 0;
    if let Some(r) = &identities {
        text.push_str("\nidentities:\n");
        for c in &r.checks {
            writeln!(text, "  {:<22} {:?}: {}", c.name, c.status, c.detail).unwrap();
            if c.status == CheckStatus::Fail {
                exit = 3;
            }
        }
    }
    let res = LyubOut {
        report,
        verdict,
        identities,
    };
    Ok(output(cmd, Some(&l.hash), &res, text, l.warnings, exit))
}

#[derive(Serialize)]
struct IteratedOut {
    source: String,
    at: String,
    path: IteratedPath,
    pieces: Vec<PieceOut>,
    localization_injective: Option<bool>,
    injective: Option<bool>,
    witness: Option<MultPWitness>,
    associated_primes: Vec<String>,
}

#[allow(clippy::too_many_arguments)]
fn iterated(
    cmd: &Cmd,
    mut l: Loaded,
    i: usize,
    j: usize,
    prime: Option<u64>,
    at: At,
    plus_p: bool,
    trunc: Option<u32>,
) -> Res<Output> {
    let ctx = LcContext::new(&l.ideal)?;
    let n = ctx.n();
    let (h, source): (WindowModule, String) = if plus_p {
        let p = need_prime(prime)?;
        let t = bump_trunc(&ctx, p, trunc, &mut l.warnings);
        let all = ctx.local_cohomology_plus_p(p, t)?;
        let h = all
            .get(j)
            .cloned()
            .ok_or_else(|| CliError::Input(format!("j = {j} out of range")))?;
        (h, format!("H^{j}_(I+{p}S)"))
    } else {
        if j > ctx.top() {
            return Err(CliError::Input(format!(
                "j = {j} exceeds the number of generators {}",
                ctx.top()
            )));
        }
        (ctx.local_cohomology(j)?, format!("H^{j}_I"))
    };
    let (which, at_text) = match at {
        At::N => (IteratedAt::N, "n".to_string()),
        At::M => {
            let p = need_prime(prime)?;
            (IteratedAt::M(p), format!("m = ({p}, x1..x{n})"))
        }
    };
    let t = match which {
        IteratedAt::M(p) => bump_trunc(&ctx, p, trunc, &mut l.warnings),
        IteratedAt::N => trunc,
    };
    let r = iterated_lc(&h, which, i, t)?;
    let (injective, witness) = match which {
        IteratedAt::M(p) => {
            let st = mult_p_status(&r.module, p);
            (Some(is_injective_m_supported(&r.module, p)), st.surjective_witness)
        }
        IteratedAt::N => (None, None),
    };
    let ass = associated_primes(&r.module)?;
    let mut pieces = Vec::new();
    let mut text = format!("H^{i}_{} {source}:\n", if at == At::N { "n" } else { "m" });
    for s in r.module.nonzero_classes() {
        let p = r.module.piece(s);
        writeln!(text, "  {s}: {p}").unwrap();
        pieces.push(PieceOut {
            j,
            class: s,
            group: p.shape(),
            text: p.to_string(),
        });
    }
    if pieces.is_empty() {
        text.push_str("  0\n");
    }
    if let Some(inj) = injective {
        writeln!(text, "injective (p acts surjectively): {inj}").unwrap();
    }
    if let Some(w) = &witness {
        writeln!(text, "witness at {}: {}", w.class, w.element).unwrap();
    }
    writeln!(text, "Ass = {{{}}}", names(&ass.primes).join(", ")).unwrap();
    let res = IteratedOut {
        source,
        at: at_text,
        path: r.path,
        pieces,
        localization_injective: r.localization_injective,
        injective,
        witness,
        associated_primes: names(&ass.primes),
    };
    Ok(output(cmd, Some(&l.hash), &res, text, l.warnings, 0))
}

#[derive(Serialize)]
struct CounterOut {
    #[serde(flatten)]
    report: CounterexampleReport,
    sequence: SequenceAudit,
}

fn counterexample(cmd: &Cmd, p: u64) -> Res<Output> {
    let report = verify_counterexample(p)?;
    let ctx = LcContext::new(&gradedlc::monomial::builtin_reisner())?;
    let sequence = sequence_ce_audit(&ctx, p, 4)?;
    let mut warnings = Vec::new();
    for d in auxiliary_ideals().1 {
        warnings.push(Warning::new(
            "PAPER_TEXT_DISCREPANCY",
            format!(
                "{}: the source text lists generators {:?}, its definition gives {:?}; the definition is used",
                d.label, d.stated, d.by_definition
            ),
        ));
    }
    let mut text = format!(
        "Reisner ideal at p = {p}{}\n",
        if report.expected_fail_mode {
            " (expected-fail mode)"
        } else {
            ""
        }
    );
    for c in &report.claims {
        writeln!(
            text,
            "[{}] {}: {}\n       {}",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.statement,
            c.detail
        )
        .unwrap();
    }
    writeln!(
        text,
        "four-term sequence 0 -> H^3 -> H^3[1/p] -> H^4_(I+pS) -> H^4 -> 0 exact in every class: {}",
        sequence.exact
    )
    .unwrap();
    writeln!(
        text,
        "{}",
        if report.as_expected {
            "outcome as expected"
        } else {
            "UNEXPECTED OUTCOME"
        }
    )
    .unwrap();
    let exit = if report.as_expected { 0 } else { 3 };
    let res = CounterOut { report, sequence };
    Ok(output(cmd, None, &res, text, warnings, exit))
}

fn oracle(cmd: &Cmd, seed: u64, count: usize, max_n: usize, p: u64) -> Res<Output> {
    let report = oracle_check(seed, count, max_n.max(1), p)?;
    let mut text = format!(
        "{} random ideals (seed {seed}), {} failures\n",
        report.cases.len(),
        report.failures
    );
    for c in report.cases.iter().filter(|c| !c.passed()) {
        writeln!(
            text,
            "  {}: {:?} {:?} {:?}",
            c.ideal, c.generator_set, c.alexander_dual, c.associated_primes
        )
        .unwrap();
    }
    let exit = if report.failures == 0 { 0 } else { 3 };
    Ok(output(cmd, None, &report, text, Vec::new(), exit))
}
