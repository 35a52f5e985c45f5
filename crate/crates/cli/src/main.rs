mod output;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use output::{prefixed, render, Format};
use ringdense::counting::count_free_modules;
use ringdense::density::{
    classify_n_limit, classify_q_limit, classify_rank_q, density_bounds, exact_density, graph_audit, gv_experiment,
    gv_n_limit_bounds, gv_rate, mc_density, NLimitRule, VolumeSource,
};
use ringdense::metrics::{metric_axiom_audit, volume_report, AuditMode, BallDomain, MetricId, VolumeMethod};
use ringdense::report::fmt_ratio;
use ringdense::ring::fp_poly::prime_power;
use ringdense::ring::{build_ring, Budget, RingCtx, RingSpec};
use ringdense::suite::{default_manifest, parse_manifest, run_micro_suite};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 2024;

#[derive(Parser, Debug)]
#[command(
    name = "ringdense",
    version,
    about = "Densities of free linear codes over Galois rings, checked against brute-force oracles",
    after_help = "Ring flags default to Z4 (p=2, s=2, r=1, m=1, ell=1). Exact integers and rationals are printed as \
                  decimal strings. CSV output flattens nested fields into dotted column names and always has a header."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug, Clone)]
struct Opts {
    #[arg(long, global = true, default_value_t = 2)]
    p: u64,
    #[arg(long, global = true, default_value_t = 2)]
    s: u32,
    #[arg(long, global = true, default_value_t = 1)]
    r: u32,
    #[arg(long, global = true, default_value_t = 1)]
    m: usize,
    #[arg(long, global = true, default_value_t = 1)]
    ell: usize,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true)]
    d: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = MetricArg::Hamming)]
    metric: MetricArg,
    #[arg(long, global = true)]
    radius: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = DomainArg::Punctured)]
    domain: DomainArg,
    /// Volume source: `volume` defaults to all, other commands to oracle.
    #[arg(long, global = true, value_enum)]
    method: Option<MethodArg>,
    #[arg(long, global = true, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 0.0)]
    eps: f64,
    /// Defaults to csv for `sweep`, json otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Enumeration budget; overrides RINGDENSE_BUDGET.
    #[arg(long, global = true)]
    budget: Option<u128>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Findings manifest for `verify`, one id per line.
    #[arg(long, global = true)]
    findings: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    Hamming,
    Rank,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DomainArg {
    Ambient,
    Punctured,
    Quotient,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Oracle,
    Paper,
    Corrected,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LimitArg {
    /// q -> infinity, exponent comparison.
    Q,
    /// n -> infinity along the sequence chosen by --rule.
    N,
    /// Rank-metric theta table.
    Theta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RuleArg {
    Rate,
    HammingMdr,
    RankMax,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GvMode {
    Rate,
    Experiment,
    Bounds,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AuditKind {
    Graph,
    Axioms,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SweepParam {
    Q,
    N,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SweepInner {
    Count,
    Volume,
    Bounds,
    Density,
    /// Quotient-to-ambient ball volume ratio.
    Probe,
}

#[derive(Subcommand, Debug, Clone)]
enum Cmd {
    /// Describe the ring tower.
    Ring,
    /// Number of free rank-k submodules of length N/ell.
    Count,
    /// Ball volume by exhaustive count and closed forms.
    Volume,
    /// Lower and upper density bounds.
    Bounds,
    /// Exact and Monte-Carlo density.
    Density,
    /// Asymptotic verdict.
    Classify {
        #[arg(long, value_enum, default_value_t = LimitArg::Q)]
        limit: LimitArg,
        #[arg(long, value_enum, default_value_t = RuleArg::Rate)]
        rule: RuleArg,
        /// Rate for `--rule rate`, as a decimal or `num/den`.
        #[arg(long)]
        rate: Option<String>,
    },
    /// Gilbert-Varshamov rate, sampling experiment, or n-limit bounds.
    Gv {
        #[arg(long, value_enum, default_value_t = GvMode::Rate)]
        mode: GvMode,
    },
    /// Bipartite-graph audit, or metric-axiom audit.
    Audit {
        #[arg(long, value_enum, default_value_t = AuditKind::Graph)]
        kind: AuditKind,
    },
    /// One row per sweep value. Columns: sweep_value, status, error, then the inner command's fields.
    Sweep {
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Comma-separated; empty gives a header-only table.
        #[arg(long, default_value = "")]
        values: String,
        #[arg(long, value_enum, default_value_t = SweepInner::Density)]
        inner: SweepInner,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, default_value = "micro")]
        suite: String,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(ringdense::Error),
    Mismatch(String),
}

impl From<ringdense::Error> for Failure {
    fn from(e: ringdense::Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Core(ringdense::Error::BudgetExceeded { .. }) => 2,
            Failure::Core(_) => 1,
            Failure::Mismatch(_) => 3,
        }
    }
}

type Outcome<T> = Result<T, Failure>;

fn metric(o: &Opts) -> MetricId {
    match o.metric {
        MetricArg::Hamming => MetricId::Hamming,
        MetricArg::Rank => MetricId::Rank,
    }
}

fn need(v: Option<usize>, flag: &str) -> Outcome<usize> {
    v.ok_or_else(|| Failure::Usage(format!("--{flag} is required")))
}

fn source(o: &Opts) -> Outcome<VolumeSource> {
    match o.method {
        None | Some(MethodArg::Oracle) => Ok(VolumeSource::Oracle),
        Some(MethodArg::Paper) => Ok(VolumeSource::Paper),
        Some(MethodArg::Corrected) => Ok(VolumeSource::Corrected),
        Some(MethodArg::All) => Err(Failure::Usage("--method all is only valid for volume and bounds".into())),
    }
}

fn budget(o: &Opts) -> Budget {
    let mut b = Budget::from_env();
    if let Some(e) = o.budget {
        b.enumeration = e;
    }
    b
}

fn spec(o: &Opts) -> RingSpec {
    RingSpec::new(o.p, o.s, o.r, o.m, o.ell)
}

fn ctx(o: &Opts) -> Outcome<RingCtx> {
    Ok(build_ring(spec(o))?.with_budget(budget(o)))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn parse_rate(s: &str) -> Outcome<BigRational> {
    let bad = || Failure::Usage(format!("cannot parse rate '{s}'"));
    if let Some((a, b)) = s.split_once('/') {
        let (a, b): (BigInt, BigInt) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if b == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (int, frac) = s.trim().split_once('.').unwrap_or((s.trim(), ""));
    if frac.chars().any(|c| !c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    Ok(BigRational::new(digits, BigInt::from(10u32).pow(frac.len() as u32)))
}

fn parse_values(s: &str) -> Outcome<Vec<u64>> {
    s.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse().map_err(|_| Failure::Usage(format!("cannot parse sweep value '{v}'"))))
        .collect()
}

fn cmd_count(o: &Opts) -> Outcome<Vec<Value>> {
    spec(o).validate()?;
    let (n, k) = (need(o.n, "n")?, need(o.k, "k")?);
    let width = (n * o.m / o.ell) as i64;
    let c = count_free_modules(width, k as i64, spec(o).q().pow(o.ell as u32), o.s);
    Ok(vec![json!({ "count": c.exact.to_string() })])
}

fn cmd_volume(o: &Opts) -> Outcome<Vec<Value>> {
    let c = ctx(o)?;
    let n = need(o.n, "n")?;
    let radius = need(o.radius.or(o.d), "radius")?;
    let domain = match o.domain {
        DomainArg::Ambient => BallDomain::Ambient,
        DomainArg::Punctured => BallDomain::Punctured,
        DomainArg::Quotient => BallDomain::Quotient,
    };
    let method = match o.method {
        None | Some(MethodArg::All) => VolumeMethod::All,
        Some(MethodArg::Oracle) => VolumeMethod::Oracle,
        Some(MethodArg::Paper) => VolumeMethod::Paper,
        Some(MethodArg::Corrected) => VolumeMethod::Corrected,
    };
    Ok(vec![to_value(&volume_report(metric(o), &c, n, radius, domain, method)?)])
}

fn cmd_bounds(o: &Opts) -> Outcome<Vec<Value>> {
    let c = ctx(o)?;
    let (n, k, d) = (need(o.n, "n")?, need(o.k, "k")?, need(o.d, "d")?);
    if o.method == Some(MethodArg::All) {
        let mut out = Vec::new();
        for s in [VolumeSource::Oracle, VolumeSource::Paper, VolumeSource::Corrected] {
            match density_bounds(&c, metric(o), n, k, o.ell, d, s) {
                Ok(b) => out.push(to_value(&b)),
                Err(ringdense::Error::Unsupported(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
        return Ok(out);
    }
    Ok(vec![to_value(&density_bounds(&c, metric(o), n, k, o.ell, d, source(o)?)?)])
}

fn cmd_density(o: &Opts) -> Outcome<Vec<Value>> {
    let c = ctx(o)?;
    let (n, k, d) = (need(o.n, "n")?, need(o.k, "k")?, need(o.d, "d")?);
    let exact = match exact_density(&c, metric(o), n, k, o.ell, d) {
        Ok(e) => Some(e.density),
        Err(ringdense::Error::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let mut est = mc_density(&c, metric(o), n, k, o.ell, d, o.samples, o.seed)?;
    est.exact = exact;
    let params = vec![
        ("metric", json!(metric(o))),
        ("n", json!(n)),
        ("k", json!(k)),
        ("ell", json!(o.ell)),
        ("d", json!(d)),
    ];
    Ok(vec![prefixed(params, to_value(&est))])
}

fn cmd_classify(o: &Opts, limit: LimitArg, rule: RuleArg, rate: Option<&str>) -> Outcome<Vec<Value>> {
    let d = need(o.d, "d")?;
    let v = match limit {
        LimitArg::Q => classify_q_limit(metric(o), need(o.n, "n")?, need(o.k, "k")?, o.ell, d, o.s, o.m)?,
        LimitArg::Theta => classify_rank_q(o.m, need(o.n, "n")?, o.ell, d)?,
        LimitArg::N => {
            let rule = match rule {
                RuleArg::Rate => {
                    let r = rate.ok_or_else(|| Failure::Usage("--rate is required with --rule rate".into()))?;
                    NLimitRule::Rate(parse_rate(r)?)
                }
                RuleArg::HammingMdr => NLimitRule::HammingMdr,
                RuleArg::RankMax => NLimitRule::RankMax,
            };
            let q = spec(o).q();
            classify_n_limit(metric(o), q, o.s, o.m, o.ell, d, rule)?
        }
    };
    Ok(vec![to_value(&v)])
}

fn cmd_gv(o: &Opts, mode: GvMode) -> Outcome<Vec<Value>> {
    if mode == GvMode::Bounds {
        spec(o).validate()?;
        let (lo, hi) = gv_n_limit_bounds(spec(o).q(), o.s, o.ell);
        return Ok(vec![json!({ "lower": fmt_ratio(&lo), "upper": fmt_ratio(&hi) })]);
    }
    let c = ctx(o)?;
    let (n, d) = (need(o.n, "n")?, need(o.d, "d")?);
    Ok(vec![match mode {
        GvMode::Rate => to_value(&gv_rate(&c, metric(o), n, d, source(o)?)?),
        _ => to_value(&gv_experiment(&c, metric(o), n, d, o.eps, o.samples, o.seed, o.k, source(o)?)?),
    }])
}

fn cmd_audit(o: &Opts, kind: AuditKind) -> Outcome<Vec<Value>> {
    let c = ctx(o)?;
    let n = need(o.n, "n")?;
    Ok(vec![match kind {
        AuditKind::Graph => to_value(&graph_audit(&c, metric(o), n, need(o.k, "k")?, o.ell, need(o.d, "d")?)?),
        AuditKind::Axioms => {
            let mode = AuditMode::Auto { samples: o.samples, seed: o.seed };
            to_value(&metric_axiom_audit(metric(o), &c, n, mode)?)
        }
    }])
}

fn probe_row(o: &Opts) -> Outcome<Value> {
    let c = ctx(o)?;
    let (n, d) = (need(o.n, "n")?, need(o.d, "d")?);
    let rep = ringdense::density::gv_condition_probe(&[(0, &c, n)], metric(o), d)?;
    let row = &rep.rows[0];
    Ok(json!({
        "v_quotient": row.v_quotient.to_string(),
        "v_ambient": row.v_ambient.to_string(),
        "ratio": fmt_ratio(&row.ratio),
        "quotient_convention": row.quotient_convention,
    }))
}

fn cmd_sweep(o: &Opts, param: SweepParam, values: &[u64], inner: SweepInner) -> Outcome<Vec<Value>> {
    let mut rows = Vec::new();
    let mut prev_ratio: Option<BigRational> = None;
    for &value in values {
        let mut point = o.clone();
        match param {
            SweepParam::Q => {
                let (p, r) = prime_power(value).ok_or_else(|| Failure::Usage(format!("{value} is not a prime power")))?;
                point.p = p;
                point.r = r;
            }
            SweepParam::N => point.n = Some(value as usize),
        }
        let result = match inner {
            SweepInner::Count => cmd_count(&point),
            SweepInner::Volume => cmd_volume(&point),
            SweepInner::Bounds => cmd_bounds(&point),
            SweepInner::Density => cmd_density(&point),
            SweepInner::Probe => probe_row(&point).map(|v| vec![v]),
        };
        let head = |status: &str, error: String| vec![("sweep_value", json!(value)), ("status", json!(status)), ("error", json!(error))];
        match result {
            Ok(records) => {
                for mut r in records {
                    if inner == SweepInner::Probe {
                        let ratio = parse_rate(r["ratio"].as_str().unwrap_or("0"))?;
                        let flag = prev_ratio.as_ref().is_some_and(|p| ratio >= *p);
                        r["non_decreasing"] = json!(flag);
                        prev_ratio = Some(ratio);
                    }
                    rows.push(prefixed(head("ok", String::new()), r));
                }
            }
            Err(Failure::Core(e @ ringdense::Error::BudgetExceeded { .. })) => {
                rows.push(prefixed(head("budget_exceeded", e.to_string()), json!({})));
            }
            Err(Failure::Core(e)) => rows.push(prefixed(head("error", e.to_string()), json!({}))),
            Err(f) => return Err(f),
        }
    }
    Ok(rows)
}

fn cmd_verify(o: &Opts, suite: &str) -> Outcome<(Vec<Value>, bool, Vec<String>)> {
    if suite != "micro" {
        return Err(Failure::Usage(format!("unknown suite '{suite}'")));
    }
    let manifest: BTreeSet<String> = match &o.findings {
        Some(path) => parse_manifest(
            &std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        ),
        None => default_manifest(),
    };
    let report = run_micro_suite(budget(o), &manifest);
    let lines = report.summary_lines();
    let records = match o.format {
        Some(Format::Csv) => report
            .criteria
            .iter()
            .map(|c| json!({"criterion": c.id, "name": c.name, "passed": c.passed, "checks": c.checks.len()}))
            .collect(),
        _ => vec![to_value(&report)],
    };
    Ok((records, report.passed, lines))
}

fn run(cli: Cli) -> Outcome<()> {
    let o = &cli.opts;
    if let Some(t) = o.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Usage(format!("--threads: {e}")))?;
    }
    let mut format = o.format.unwrap_or(Format::Json);
    let mut leading: &[&str] = &[];
    let mut mismatch = None;
    let records = match &cli.cmd {
        Cmd::Ring => vec![to_value(&ctx(o)?.describe())],
        Cmd::Count => cmd_count(o)?,
        Cmd::Volume => cmd_volume(o)?,
        Cmd::Bounds => cmd_bounds(o)?,
        Cmd::Density => cmd_density(o)?,
        Cmd::Classify { limit, rule, rate } => cmd_classify(o, *limit, *rule, rate.as_deref())?,
        Cmd::Gv { mode } => cmd_gv(o, *mode)?,
        Cmd::Audit { kind } => cmd_audit(o, *kind)?,
        Cmd::Sweep { param, values, inner } => {
            format = o.format.unwrap_or(Format::Csv);
            leading = &["sweep_value", "status", "error"];
            cmd_sweep(o, *param, &parse_values(values)?, *inner)?
        }
        Cmd::Verify { suite } => {
            let (records, passed, lines) = cmd_verify(o, suite)?;
            if format == Format::Table {
                let mut text = lines.join("\n");
                text.push('\n');
                emit(o, &text)?;
                return if passed { Ok(()) } else { Err(Failure::Mismatch("suite micro failed".into())) };
            }
            for l in &lines {
                eprintln!("{l}");
            }
            if !passed {
                mismatch = Some(Failure::Mismatch("suite micro failed".into()));
            }
            records
        }
    };
    emit(o, &render(&records, format, leading))?;
    mismatch.map_or(Ok(()), Err)
}

fn emit(o: &Opts, text: &str) -> Outcome<()> {
    match &o.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Mismatch(m) => eprintln!("{m}"),
            }
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_parsing() {
        assert_eq!(parse_rate("0.75").unwrap(), BigRational::new(3.into(), 4.into()));
        assert_eq!(parse_rate("3/4").unwrap(), BigRational::new(3.into(), 4.into()));
        assert_eq!(parse_rate("1").unwrap(), BigRational::from_integer(1.into()));
        assert!(parse_rate("x").is_err());
        assert!(parse_rate("1/0").is_err());
        assert_eq!(parse_values(" 2, 3 ,5").unwrap(), vec![2, 3, 5]);
        assert!(parse_values("").unwrap().is_empty());
        assert!(parse_values("2,x").is_err());
        assert_eq!(parse_rate("0.125").unwrap(), BigRational::new(1.into(), 8.into()));
    }

    #[test]
    fn cli_definition_is_valid() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
