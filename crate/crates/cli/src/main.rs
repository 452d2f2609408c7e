use std::fs;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use facprod::audit::{self, AuditFinding};
use facprod::density::{self, RatioMode, RegionSpec};
use facprod::equations::{classification_note, to_delta_form, verify, FactorialEquation, Pairing};
use facprod::report::{self, RunHeader};
use facprod::search::{
    self, census_report, DeltaSearchSpec, ResourceGuards, SearchError, SearchSpec,
};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(
    name = "facprod",
    version,
    about = "Exact arithmetic for products of factorials"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Seed for every randomized computation.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, env = "FACPROD_WORKERS", default_value_t = 0)]
    workers: usize,
    /// Output directory. Files are appended to, one metadata line per run.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true, default_value_t = 2_000_000_000)]
    max_nodes: u64,
    #[arg(long, global = true, default_value_t = 600)]
    max_seconds: u64,
    /// Ceiling on the largest right-hand entry a search may request.
    #[arg(long, global = true, default_value_t = 100)]
    max_n1: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Check {
    Theta,
    Mertens,
    Stirling,
    Erdos,
    Window,
    Chain,
    AbcScan,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Bounded,
    Dropped,
    Exceeded,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check one identity, e.g. `7,6=10`.
    Verify { literal: String },
    /// Enumerate every identity within the bounds.
    Search {
        #[arg(long)]
        n1_max: u64,
        #[arg(long)]
        t_max: usize,
        #[arg(long, default_value_t = 1)]
        s_max: usize,
        #[arg(long)]
        c: Option<u64>,
        #[arg(long)]
        nontrivial_only: bool,
        #[arg(long)]
        include_cancelling: bool,
    },
    /// Solutions of `∏ aᵢ! = ∏ Δ(xⱼ, kⱼ)` for fixed block lengths.
    DeltaSearch {
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u64>,
        #[arg(long)]
        x_max: u64,
        #[arg(long)]
        t_max: usize,
        #[arg(long)]
        c: Option<u64>,
    },
    /// Volume of the gap-constrained ordering region.
    Density {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        /// `i₂,…,i_s`; defaults to `2,…,s`.
        #[arg(long, value_delimiter = ',')]
        pairing: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value_t = Mode::Bounded)]
        mode: Mode,
        #[arg(long, default_value_t = density::DEFAULT_RESOLUTION)]
        resolution: usize,
        #[arg(long)]
        no_quadrature: bool,
    },
    /// Evaluate lemma and proof inequalities.
    Audit {
        #[arg(long, value_enum)]
        check: Check,
        #[arg(long, allow_negative_numbers = true)]
        nu_max: Option<f64>,
        #[arg(long)]
        n_max: Option<u64>,
        /// `lo:hi`
        #[arg(long)]
        k: Option<String>,
        /// `lo:hi`
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        m1_max: Option<u64>,
        #[arg(long)]
        eq: Option<String>,
        /// 1-based lhs index for each rhs entry after the first.
        #[arg(long, value_delimiter = ',')]
        pairing: Option<Vec<usize>>,
        #[arg(long, default_value_t = 1)]
        c: u64,
        #[arg(long, default_value_t = 2)]
        kappa: u64,
    },
    /// Smallest-radical abc triple of the window `m1, …, m1+k1−1`.
    AbcReport {
        #[arg(long)]
        m1: u64,
        #[arg(long)]
        k1: u64,
        #[arg(long)]
        a2: Option<u64>,
    },
}

/// Failure classes, mapped to exit codes 2 and 3.
enum Failure {
    Validation(anyhow::Error),
    Guard(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Validation(e.into())
    }
}

/// Exit status of a completed command.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Positive,
    Negative,
}

impl Outcome {
    fn from_ok(ok: bool) -> Self {
        if ok {
            Outcome::Positive
        } else {
            Outcome::Negative
        }
    }
}

struct Ctx {
    global: Global,
    header: RunHeader,
}

impl Ctx {
    /// Writes an output artifact: appended under `--out` when given,
    /// otherwise printed to stdout after the metadata line.
    fn emit(&self, name: &str, payload: &str) -> anyhow::Result<()> {
        match &self.global.out {
            Some(dir) => {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                let path = dir.join(name);
                report::append_run(&path, &self.header, payload)
                    .with_context(|| format!("writing {}", path.display()))?;
                eprintln!("wrote {}", path.display());
            }
            None => {
                let kind = report::FileKind::for_path(Path::new(name));
                let mut out = io::stdout().lock();
                out.write_all(report::header_line(&self.header, kind).as_bytes())?;
                out.write_all(payload.as_bytes())?;
            }
        }
        Ok(())
    }

    fn format_or(&self, default: Format) -> Format {
        self.global.format.unwrap_or(default)
    }

    fn guards(&self) -> ResourceGuards {
        ResourceGuards {
            max_n1: self.global.max_n1,
            max_nodes: self.global.max_nodes,
            max_wall: Some(Duration::from_secs(self.global.max_seconds)),
        }
    }
}

fn parse_range(flag: &str, value: Option<&str>) -> anyhow::Result<RangeInclusive<u64>> {
    let v = value.ok_or_else(|| anyhow!("--{flag} lo:hi is required"))?;
    let (lo, hi) = v
        .split_once(':')
        .ok_or_else(|| anyhow!("--{flag} expects lo:hi, got {v:?}"))?;
    let lo: u64 = lo
        .trim()
        .parse()
        .with_context(|| format!("--{flag} lower bound"))?;
    let hi: u64 = hi
        .trim()
        .parse()
        .with_context(|| format!("--{flag} upper bound"))?;
    if lo > hi {
        bail!("--{flag} range {lo}:{hi} is empty");
    }
    Ok(lo..=hi)
}

fn parse_equation(flag: &str, value: Option<&str>) -> anyhow::Result<FactorialEquation> {
    let lit = value.ok_or_else(|| anyhow!("--{flag} is required"))?;
    Ok(lit.parse()?)
}

/// 1-based CLI pairing to the 0-based assignment (`i₁ = 1` implied).
fn cli_pairing(eq: &FactorialEquation, pairing: Option<&[usize]>) -> anyhow::Result<Pairing> {
    let p = match pairing {
        None => Pairing::head_only(),
        Some(p) => {
            if p.contains(&0) {
                bail!("pairing indices are 1-based");
            }
            let mut a = vec![0];
            a.extend(p.iter().map(|i| i - 1));
            Pairing::new(a)
        }
    };
    if eq.s() > 1 && pairing.is_none() {
        return Pairing::enumerate(eq)
            .into_iter()
            .next()
            .ok_or_else(|| anyhow!("no valid pairing exists for {eq}"));
    }
    p.validate(eq)?;
    Ok(p)
}

fn cmd_verify(ctx: &Ctx, literal: &str) -> Result<Outcome, Failure> {
    let eq: FactorialEquation = literal.parse()?;
    let rec = verify(&eq)?;
    let mut payload = rec.to_json_line() + "\n";
    let note = classification_note(&eq);
    if let Some(n) = &note {
        payload.push_str(&json!({ "note": n }).to_string());
        payload.push('\n');
    }
    ctx.emit("verify.jsonl", &payload)?;
    let class = rec.classification.map_or("-", |c| c.as_str());
    eprintln!(
        "{eq}: {}{}",
        if rec.holds {
            "holds, "
        } else {
            "does not hold"
        },
        if rec.holds { class } else { "" }
    );
    if let Some(n) = note {
        eprintln!("note: {n}");
    }
    Ok(Outcome::from_ok(rec.holds))
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    ctx: &Ctx,
    n1_max: u64,
    t_max: usize,
    s_max: usize,
    c: Option<u64>,
    nontrivial_only: bool,
    include_cancelling: bool,
) -> Result<Outcome, Failure> {
    let mut spec = SearchSpec::new(n1_max, t_max, s_max)
        .nontrivial_only(nontrivial_only)
        .with_c(c);
    spec.include_cancelling = include_cancelling;
    let records = match search::search_factorial_products(&spec, &ctx.guards()) {
        Ok(r) => r,
        Err(SearchError::Guard {
            kind,
            partial,
            frontier,
        }) => {
            if ctx.global.out.is_some() {
                ctx.emit("census_partial.jsonl", &report::records_jsonl(&partial))?;
            }
            return Err(Failure::Guard(anyhow!(
                "{kind}; {} records from {} completed right-hand sides",
                partial.len(),
                frontier.len()
            )));
        }
        Err(e) => return Err(e.into()),
    };
    let summary = census_report(&records, c);
    let jsonl = report::records_jsonl(&records);
    let csv = report::census_csv(&summary);
    if ctx.global.out.is_some() {
        ctx.emit("census.jsonl", &jsonl)?;
        ctx.emit("census_summary.csv", &csv)?;
    } else {
        match ctx.format_or(Format::Json) {
            Format::Json => ctx.emit("census.jsonl", &jsonl)?,
            Format::Csv => ctx.emit("census_summary.csv", &csv)?,
        }
    }
    eprintln!(
        "{} records, {} nontrivial, extremal n1 = {}",
        records.len(),
        summary.nontrivial_count(),
        summary.extremal_n1.map_or("-".into(), |n| n.to_string())
    );
    for lit in &summary.nontrivial {
        eprintln!("  nontrivial: {lit}");
    }
    Ok(Outcome::Positive)
}

fn cmd_delta_search(
    ctx: &Ctx,
    k: Vec<u64>,
    x_max: u64,
    t_max: usize,
    c: Option<u64>,
) -> Result<Outcome, Failure> {
    let spec = DeltaSearchSpec {
        k_list: k,
        x_max,
        t_max,
        c,
    };
    let sols = match search::search_delta(&spec, &ctx.guards()) {
        Ok(s) => s,
        Err(SearchError::Guard { kind, frontier, .. }) => {
            return Err(Failure::Guard(anyhow!(
                "{kind}; {} units completed",
                frontier.len()
            )))
        }
        Err(e) => return Err(e.into()),
    };
    ctx.emit("delta.jsonl", &report::jsonl(&sols))?;
    eprintln!("{} solutions", sols.len());
    Ok(Outcome::Positive)
}

#[allow(clippy::too_many_arguments)]
fn cmd_density(
    ctx: &Ctx,
    t: usize,
    s: usize,
    c: f64,
    samples: u64,
    pairing: Option<Vec<usize>>,
    mode: Mode,
    resolution: usize,
    no_quadrature: bool,
) -> Result<Outcome, Failure> {
    let spec = match pairing {
        Some(p) => RegionSpec::with_pairing(t, s, c, p)?,
        None => RegionSpec::new(t, s, c)?,
    };
    let spec = spec.with_mode(match mode {
        Mode::Bounded => RatioMode::Bounded,
        Mode::Dropped => RatioMode::Dropped,
        Mode::Exceeded => RatioMode::Exceeded,
    })?;
    let mut est = density::mc_only(&spec, samples, ctx.global.seed)?;
    let mut quad_error = None;
    if !no_quadrature && spec.dim() <= density::QUADRATURE_MAX_DIM {
        let q = density::quadrature_with_error(&spec, resolution)?;
        est.quadrature = Some(q.value);
        quad_error = Some(q.error);
    }
    let mut value = serde_json::to_value(&est).expect("serializable");
    value["quadrature_error"] = json!(quad_error);
    value["region"] = serde_json::to_value(&spec).expect("serializable");
    ctx.emit("density.jsonl", &format!("{value}\n"))?;
    eprintln!("{est}");
    Ok(Outcome::Positive)
}

fn findings_outcome(ctx: &Ctx, name: &str, findings: &[AuditFinding]) -> Result<Outcome, Failure> {
    let payload = match ctx.format_or(Format::Csv) {
        Format::Csv => report::findings_csv(findings),
        Format::Json => report::jsonl(findings),
    };
    let ext = if ctx.format_or(Format::Csv) == Format::Csv {
        "csv"
    } else {
        "jsonl"
    };
    ctx.emit(&format!("audit_{name}.{ext}"), &payload)?;
    let bad = audit::violations(findings);
    eprintln!("{name}: {} findings, {bad} violations", findings.len());
    Ok(Outcome::from_ok(bad == 0))
}

#[allow(clippy::too_many_arguments)]
fn cmd_audit(
    ctx: &Ctx,
    check: Check,
    nu_max: Option<f64>,
    n_max: Option<u64>,
    k: Option<String>,
    x: Option<String>,
    m1_max: Option<u64>,
    eq: Option<String>,
    pairing: Option<Vec<usize>>,
    c: u64,
    kappa: u64,
) -> Result<Outcome, Failure> {
    let need_nu = || nu_max.ok_or_else(|| anyhow!("--nu-max is required"));
    match check {
        Check::Theta => findings_outcome(ctx, "theta", &audit::audit_theta(need_nu()?)?),
        Check::Mertens => findings_outcome(ctx, "mertens", &audit::audit_mertens(need_nu()?)?),
        Check::Stirling => {
            let n = n_max.ok_or_else(|| anyhow!("--n-max is required"))?;
            findings_outcome(ctx, "stirling", &audit::audit_stirling_lower(n)?)
        }
        Check::Window => {
            let eq = parse_equation("eq", eq.as_deref())?;
            let df = to_delta_form(&eq, &cli_pairing(&eq, pairing.as_deref())?)?;
            findings_outcome(ctx, "window", &audit::audit_solution_window(&df)?)
        }
        Check::Chain => {
            let eq = parse_equation("eq", eq.as_deref())?;
            let df = to_delta_form(&eq, &cli_pairing(&eq, pairing.as_deref())?)?;
            let chain = audit::audit_proof_chain(&df, c, kappa)?;
            eprintln!(
                "branch: {}",
                serde_json::to_value(chain.branch).expect("serializable")
            );
            findings_outcome(ctx, "chain", &chain.findings)
        }
        Check::Erdos => {
            let xr = parse_range("x", x.as_deref())?;
            let kr = parse_range("k", k.as_deref())?;
            let scan = audit::audit_erdos_pdelta(xr, kr)?;
            if ctx.global.out.is_some() {
                ctx.emit("audit_erdos.csv", &report::findings_csv(&scan.findings))?;
            }
            ctx.emit("erdos_min_ratio.csv", &erdos_table(&scan))?;
            match scan.min {
                Some((r, x, k)) => eprintln!(
                    "{} windows; minimum ratio {r:.6} at x = {x}, k = {k}",
                    scan.findings.len()
                ),
                None => eprintln!("no all-composite windows in range"),
            }
            Ok(Outcome::Positive)
        }
        Check::AbcScan => {
            let m1 = m1_max.ok_or_else(|| anyhow!("--m1-max is required"))?;
            let kr = parse_range("k", k.as_deref())?;
            let s = audit::abc_scan(m1, kr)?;
            ctx.emit(
                "abc_scan.jsonl",
                &format!("{}\n", serde_json::to_string(&s)?),
            )?;
            eprintln!(
                "{} windows, {} structural failures, {} selection failures, {} explicit-abc violations",
                s.windows,
                s.structural_failures,
                s.selection_failures,
                s.explicit_violations.len()
            );
            Ok(Outcome::from_ok(
                s.structural_failures == 0
                    && s.selection_failures == 0
                    && s.explicit_violations.is_empty(),
            ))
        }
    }
}

fn erdos_table(scan: &audit::ErdosScan) -> String {
    let mut out = String::from("k,windows,min_ratio,x_at_min\n");
    for row in &scan.per_k {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.k, row.windows, row.min_ratio, row.x_at_min
        ));
    }
    out
}

fn cmd_abc_report(ctx: &Ctx, m1: u64, k1: u64, a2: Option<u64>) -> Result<Outcome, Failure> {
    let r = audit::abc_window_report(m1, k1, a2)?;
    ctx.emit("abc.jsonl", &format!("{}\n", serde_json::to_string(&r)?))?;
    eprintln!(
        "({}, {}, {}) radical {} quality {:.6}, explicit abc {}",
        r.a,
        r.b,
        r.c,
        r.radical_abc,
        r.quality,
        if r.explicit_ok { "ok" } else { "violated" }
    );
    Ok(Outcome::from_ok(
        r.explicit_ok && audit::violations(&r.findings) == 0,
    ))
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    let command_name = match &cli.command {
        Command::Verify { .. } => "verify",
        Command::Search { .. } => "search",
        Command::DeltaSearch { .. } => "delta-search",
        Command::Density { .. } => "density",
        Command::Audit { .. } => "audit",
        Command::AbcReport { .. } => "abc-report",
    };
    let config = json!({
        "args": std::env::args().skip(1).collect::<Vec<_>>(),
        "seed": cli.global.seed,
        "workers": cli.global.workers,
    });
    let ctx = Ctx {
        header: RunHeader::new(command_name, config),
        global: cli.global,
    };
    match cli.command {
        Command::Verify { literal } => cmd_verify(&ctx, &literal),
        Command::Search {
            n1_max,
            t_max,
            s_max,
            c,
            nontrivial_only,
            include_cancelling,
        } => cmd_search(
            &ctx,
            n1_max,
            t_max,
            s_max,
            c,
            nontrivial_only,
            include_cancelling,
        ),
        Command::DeltaSearch { k, x_max, t_max, c } => cmd_delta_search(&ctx, k, x_max, t_max, c),
        Command::Density {
            t,
            s,
            c,
            samples,
            pairing,
            mode,
            resolution,
            no_quadrature,
        } => cmd_density(
            &ctx,
            t,
            s,
            c,
            samples,
            pairing,
            mode,
            resolution,
            no_quadrature,
        ),
        Command::Audit {
            check,
            nu_max,
            n_max,
            k,
            x,
            m1_max,
            eq,
            pairing,
            c,
            kappa,
        } => cmd_audit(
            &ctx, check, nu_max, n_max, k, x, m1_max, eq, pairing, c, kappa,
        ),
        Command::AbcReport { m1, k1, a2 } => cmd_abc_report(&ctx, m1, k1, a2),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli.global.workers;
    match facprod::par::with_workers(workers, || run(cli)) {
        Ok(Outcome::Positive) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(1),
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Guard(e)) => {
            eprintln!("resource guard: {e:#}");
            ExitCode::from(3)
        }
    }
}
