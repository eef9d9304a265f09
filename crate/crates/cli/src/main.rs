use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use levelraise_core::census::{
    diagonal_check, load_conductor_cached, run_census, scan_conductors, CensusOutput, CensusRow, ConductorData,
};
use levelraise_core::config::{cache_dir, checkpoints_up_to, Config};
use levelraise_core::model::{simulate_line_model_par, simulate_unramified_probability_par, LineModel};
use levelraise_core::stats::{density_report, parse_csv, render_csv, render_table};
use levelraise_core::Error as CoreError;

const GOLDEN: [(u64, &str); 3] = [
    (163, include_str!("../../../golden/ell163.csv")),
    (277, include_str!("../../../golden/ell277.csv")),
    (349, include_str!("../../../golden/ell349.csv")),
];

const DIAGONAL_PAIRS: [(u64, u64); 5] = [(7, 13), (7, 19), (7, 31), (7, 37), (13, 19)];

#[derive(Parser)]
#[command(name = "levelraise", version, about = "Level-raising prime census for tetrahedral conductors")]
struct Cli {
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Output file (standard output when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Text,
    Jsonl,
}

#[derive(Subcommand)]
enum Command {
    /// Class groups of cyclic cubic fields of prime conductor up to a bound.
    Scan {
        #[arg(long, default_value_t = 2000)]
        max_ell: u64,
        /// Supplied answer for a condition not computed here, as ELL:NAME=BOOL.
        #[arg(long = "external")]
        external: Vec<String>,
    },
    /// Count auxiliary primes up to a bound.
    Census {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        max_v: Option<u64>,
        /// Comma-separated checkpoints (defaults to the standard list up to max-v).
        #[arg(long, value_delimiter = ',')]
        checkpoints: Option<Vec<u64>>,
        /// Compare rows against the stored tables and fail on any difference.
        #[arg(long)]
        check_golden: bool,
    },
    /// Density statistics from census counts.
    Stats {
        /// CSV written by `census`; runs a census when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        max_v: Option<u64>,
    },
    /// Monte Carlo runs of the line model and the unramified-lift model.
    Simulate {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also run the unramified-lift model with this many levels.
        #[arg(long)]
        levels: Option<u32>,
    },
    /// Construct and verify the fields for a conductor.
    VerifyField {
        #[command(flatten)]
        target: Target,
    },
    /// 2-ranks of the diagonal cubic fields of conductor l1·l2.
    Diagonal {
        #[arg(long, requires = "l2")]
        l1: Option<u64>,
        #[arg(long, requires = "l1")]
        l2: Option<u64>,
    },
}

#[derive(Args)]
struct Target {
    #[arg(long, conflicts_with = "config")]
    ell: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Errors caused by the invocation rather than by the mathematics.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return 2;
        }
        if let Some(CoreError::Config(_) | CoreError::InvalidArgument(_)) = cause.downcast_ref::<CoreError>() {
            return 2;
        }
    }
    1
}

/// Returns whether every check passed.
fn run(cli: Cli) -> anyhow::Result<bool> {
    if cli.jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    let out = Output { path: cli.out.clone() };
    match cli.cmd {
        Command::Scan { max_ell, external } => scan(&out, cli.format, max_ell, &external),
        Command::Census { target, max_v, checkpoints, check_golden } => {
            let config = resolve_config(&target, max_v, checkpoints, cli.jobs)?;
            census(&out, cli.format, &config, check_golden)
        }
        Command::Stats { input, target, max_v } => stats(&out, cli.format, input.as_deref(), &target, max_v, cli.jobs),
        Command::Simulate { p, trials, seed, levels } => simulate(&out, cli.format, p, trials, seed, levels, cli.jobs),
        Command::VerifyField { target } => verify_field(&out, &resolve_config(&target, None, None, cli.jobs)?),
        Command::Diagonal { l1, l2 } => diagonal(&out, cli.format, l1.zip(l2)),
    }
}

struct Output {
    path: Option<PathBuf>,
}

impl Output {
    fn emit(&self, text: &str) -> anyhow::Result<()> {
        match &self.path {
            Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }
}

fn resolve_config(t: &Target, max_v: Option<u64>, checkpoints: Option<Vec<u64>>, jobs: usize) -> anyhow::Result<Config> {
    let mut config = match (&t.config, t.ell) {
        (Some(path), _) => Config::load(path).with_context(|| format!("loading {}", path.display()))?,
        (None, Some(ell)) => Config::new(ell),
        (None, None) => return Err(usage("give --ell or --config")),
    };
    if let Some(m) = max_v {
        config.max_v = m;
        if checkpoints.is_none() {
            config.checkpoints = Some(checkpoints_up_to(m));
        }
    }
    if let Some(c) = checkpoints {
        if let Some(&last) = c.last() {
            config.max_v = config.max_v.max(last);
        }
        config.checkpoints = Some(c);
    }
    config.workers = jobs.max(config.workers);
    config.validate()?;
    Ok(config)
}

fn load(config: &Config) -> anyhow::Result<ConductorData> {
    let cache = cache_dir();
    if let Some(dir) = &cache {
        fs::create_dir_all(dir).with_context(|| format!("creating cache directory {}", dir.display()))?;
    }
    load_conductor_cached(config, cache.as_deref()).with_context(|| format!("conductor {}", config.ell))
}

fn run_rows(config: &Config, records: bool) -> anyhow::Result<(ConductorData, CensusOutput)> {
    let cd = load(config)?;
    let out = run_census(&cd, &config.effective_checkpoints(), config.workers, records)?;
    if !out.skipped.is_empty() {
        log::warn!("ℓ = {}: skipped primes {:?}", config.ell, out.skipped);
    }
    Ok((cd, out))
}

fn census(out: &Output, format: Option<Format>, config: &Config, check_golden: bool) -> anyhow::Result<bool> {
    let format = format.unwrap_or(Format::Csv);
    let records = format == Format::Jsonl || config.output.jsonl.is_some();
    let (_, result) = run_rows(config, records)?;
    let text = match format {
        Format::Csv => render_csv(&result.rows),
        Format::Text => render_table(&result.rows),
        Format::Jsonl => jsonl(&result)?,
    };
    if out.path.is_none() && config.output.csv.is_some() {
        // configured output files replace standard output
        write_configured(config, &result)?;
    } else {
        out.emit(&text)?;
        write_configured(config, &result)?;
    }
    if check_golden {
        return golden_check(config.ell, &result.rows);
    }
    Ok(true)
}

fn jsonl(result: &CensusOutput) -> anyhow::Result<String> {
    let mut s = String::new();
    for r in &result.records {
        s.push_str(&serde_json::to_string(r)?);
        s.push('\n');
    }
    Ok(s)
}

fn write_configured(config: &Config, result: &CensusOutput) -> anyhow::Result<()> {
    let o = &config.output;
    for (path, text) in [
        (&o.csv, render_csv(&result.rows)),
        (&o.text, render_table(&result.rows)),
        (&o.jsonl, if o.jsonl.is_some() { jsonl(result)? } else { String::new() }),
    ] {
        if let Some(p) = path {
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
        }
    }
    Ok(())
}

fn golden_rows(ell: u64) -> anyhow::Result<Vec<CensusRow>> {
    let (_, text) = GOLDEN.iter().find(|(e, _)| *e == ell).ok_or_else(|| usage(format!("no stored table for ℓ = {ell}")))?;
    Ok(parse_csv(text)?)
}

fn golden_check(ell: u64, rows: &[CensusRow]) -> anyhow::Result<bool> {
    let golden = golden_rows(ell)?;
    let mut compared = 0;
    let mut ok = true;
    for g in &golden {
        let Some(r) = rows.iter().find(|r| r.n == g.n) else { continue };
        compared += 1;
        let same = (r.c3, r.c_lambda, r.c_taubar, r.c_both) == (g.c3, g.c_lambda, g.c_taubar, g.c_both);
        if !same {
            ok = false;
            eprintln!("golden mismatch at n = {}: got {:?}, stored {:?}", g.n, r, g);
        }
    }
    if compared == 0 {
        return Err(usage("no checkpoint coincides with the stored table"));
    }
    eprintln!("golden check: {compared} rows compared, {}", if ok { "all match" } else { "MISMATCH" });
    Ok(ok)
}

fn stats(
    out: &Output,
    format: Option<Format>,
    input: Option<&Path>,
    target: &Target,
    max_v: Option<u64>,
    jobs: usize,
) -> anyhow::Result<bool> {
    let rows = match input {
        Some(p) => parse_csv(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?,
        None => run_rows(&resolve_config(target, max_v, None, jobs)?, false)?.1.rows,
    };
    let report = density_report(&rows)?;
    let text = match format.unwrap_or(Format::Text) {
        Format::Jsonl => serde_json::to_string(&report)? + "\n",
        Format::Csv => {
            let mut s = String::from("test,statistic,p_value\n");
            for t in &report.tests {
                let p = t.p_value.map(|p| format!("{p:.6}")).unwrap_or_default();
                s.push_str(&format!("\"{}\",{:.6},{p}\n", t.name, t.statistic));
            }
            s
        }
        Format::Text => {
            let mut s = render_table(&report.rows);
            s.push('\n');
            for t in &report.tests {
                let p = t.p_value.map(|p| format!("  p = {p:.4}")).unwrap_or_default();
                s.push_str(&format!("{:<44} {:>10.5}{p}\n", t.name, t.statistic));
            }
            s
        }
    };
    out.emit(&text)?;
    Ok(true)
}

fn simulate(
    out: &Output,
    format: Option<Format>,
    p: u64,
    trials: u64,
    seed: u64,
    levels: Option<u32>,
    jobs: usize,
) -> anyhow::Result<bool> {
    let est = simulate_line_model_par(p, trials, seed, jobs)?;
    let expected = LineModel::new(p)?.probability();
    let levels = levels.map(|n| simulate_unramified_probability_par(n, trials, seed, jobs)).transpose()?;
    let text = match format.unwrap_or(Format::Text) {
        Format::Jsonl => {
            let mut s = serde_json::to_string(&serde_json::json!({
                "model": "line", "p": p, "seed": seed, "expected": expected, "result": est
            }))? + "\n";
            for l in levels.iter().flatten() {
                s += &(serde_json::to_string(&serde_json::json!({"model": "unramified", "seed": seed, "result": l}))? + "\n");
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("model,parameter,trials,hits,estimate,expected\n");
            s += &format!("line,{p},{},{},{:.6},{:.6}\n", est.trials, est.successes, est.estimate, expected);
            for l in levels.iter().flatten() {
                s += &format!("unramified,{},{},{},{:.6},{:.6}\n", l.level, l.trials, l.hits, l.frequency, l.expected);
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "line model p = {p}, trials = {trials}, seed = {seed}\n  estimate {:.6}  95% CI [{:.6}, {:.6}]  expected (p-1)/p = {:.6}\n",
                est.estimate, est.ci_low, est.ci_high, expected
            );
            for l in levels.iter().flatten() {
                s += &format!("unramified level {}: frequency {:.6}, expected 3^-{} = {:.6}\n", l.level, l.frequency, l.level, l.expected);
            }
            s
        }
    };
    out.emit(&text)?;
    Ok(true)
}

fn verify_field(out: &Output, config: &Config) -> anyhow::Result<bool> {
    let cd = load(config)?;
    let mut s = String::new();
    let poly = |f: &levelraise_core::IntPoly| {
        f.coeffs().iter().rev().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
    };
    s += &format!("conductor ℓ = {}\n", cd.ell);
    s += &format!("L: [{}]  disc {}  index {}\n", poly(cd.l.poly()), cd.l.field_disc(), cd.l.index());
    s += &format!("   class group {:?}  h = {}\n", cd.class_l.divisors(), cd.class_l.class_number());
    s += &format!("F: [{}]  disc {}  index {}\n", poly(cd.f.poly()), cd.f.field_disc(), cd.f.index());
    s += &format!("   class group {:?}  h = {}\n", cd.class_f.divisors(), cd.class_f.class_number());
    s += &format!("   units {:?}  regulator {:.6}\n", cd.units_f.units, cd.units_f.regulator);
    let lab = &cd.labels;
    for (name, q) in [("3_1", &lab.three1), ("3_2", &lab.three2), ("l_1", &lab.ell1), ("l_2", &lab.ell2)] {
        s += &format!("   {name}: over {} with e = {}, f = {}, norm {}\n", q.p, q.e, q.f, q.norm());
    }
    s += &format!("ray class quotient for 3_1^2 l_2: dimension {}\n", cd.tau_quotient().dimension());
    s += "exponent at 3_1 stable between 2 and 3: yes\n";
    match &cd.shanks {
        Some(a) => s += &format!("Shanks prime: a = {a}\n"),
        None => s += "Shanks prime: no\n",
    }
    s += &format!("excluded primes {:?}\n", cd.excluded_primes());
    if cd.external_flags.is_empty() {
        s += "remaining conditions: external\n";
    }
    for (k, v) in &cd.external_flags {
        s += &format!("external {k} = {v}\n");
    }
    s += "all checks passed\n";
    out.emit(&s)?;
    Ok(true)
}

fn scan(out: &Output, format: Option<Format>, max_ell: u64, external: &[String]) -> anyhow::Result<bool> {
    let mut flags: Vec<(u64, String, bool)> = Vec::new();
    for e in external {
        let parsed = e.split_once(':').and_then(|(ell, rest)| {
            let (name, val) = rest.split_once('=')?;
            Some((ell.trim().parse().ok()?, name.trim().to_string(), val.trim().parse().ok()?))
        });
        flags.push(parsed.ok_or_else(|| usage(format!("--external expects ELL:NAME=BOOL, got {e:?}")))?);
    }
    let entries = scan_conductors(max_ell)?;
    let ext = |ell: u64| {
        let f: Vec<String> = flags.iter().filter(|(l, _, _)| *l == ell).map(|(_, n, v)| format!("{n}={v}")).collect();
        if f.is_empty() { "external".to_string() } else { f.join(";") }
    };
    let text = match format.unwrap_or(Format::Text) {
        Format::Jsonl => {
            let mut s = String::new();
            for e in &entries {
                let mut v = serde_json::to_value(e)?;
                v["other_conditions"] = serde_json::Value::String(ext(e.ell));
                s += &(v.to_string() + "\n");
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("ell,class_number,class_group,two_rank,shanks_param,passes,other_conditions\n");
            for e in &entries {
                s += &format!(
                    "{},{},{},{},{},{},{}\n",
                    e.ell,
                    e.class_number,
                    e.class_group.join(" "),
                    e.two_rank,
                    e.shanks_param.clone().unwrap_or_default(),
                    e.passes,
                    ext(e.ell)
                );
            }
            s
        }
        Format::Text => {
            let mut s = format!("{:>6} {:>4} {:<12} {:>6} {:>7} {:>6}  other\n", "ell", "h_L", "group", "2-rank", "shanks", "4|h_L");
            for e in &entries {
                s += &format!(
                    "{:>6} {:>4} {:<12} {:>6} {:>7} {:>6}  {}\n",
                    e.ell,
                    e.class_number,
                    format!("[{}]", e.class_group.join(",")),
                    e.two_rank,
                    e.shanks_param.clone().unwrap_or_else(|| "-".into()),
                    if e.passes { "yes" } else { "no" },
                    ext(e.ell)
                );
            }
            let pass: Vec<String> = entries.iter().filter(|e| e.passes).map(|e| e.ell.to_string()).collect();
            s += &format!("passing: {}\n", pass.join(", "));
            s
        }
    };
    out.emit(&text)?;
    Ok(true)
}

fn diagonal(out: &Output, format: Option<Format>, pair: Option<(u64, u64)>) -> anyhow::Result<bool> {
    let pairs: Vec<(u64, u64)> = match pair {
        Some(p) => vec![p],
        None => DIAGONAL_PAIRS.to_vec(),
    };
    let mut ok = true;
    let mut s = String::new();
    for (l1, l2) in pairs {
        if l1 == l2 || l1 % 3 != 1 || l2 % 3 != 1 {
            bail!(usage(format!("need distinct primes ≡ 1 mod 3, got ({l1}, {l2})")));
        }
        let r = diagonal_check(l1, l2)?;
        ok &= r.passes;
        match format.unwrap_or(Format::Text) {
            Format::Jsonl => s += &(serde_json::to_string(&r)? + "\n"),
            Format::Csv => {
                if s.is_empty() {
                    s += "l1,l2,field,poly,disc,class_group,two_rank\n";
                }
                for (i, d) in r.fields.iter().enumerate() {
                    s += &format!("{l1},{l2},{},{},{},{},{}\n", i + 1, d.poly.join(" "), d.disc, d.class_group.join(" "), d.two_rank);
                }
            }
            Format::Text => {
                s += &format!("({l1}, {l2}):\n");
                for (i, d) in r.fields.iter().enumerate() {
                    s += &format!(
                        "  D{}: [{}] disc {} class group [{}] 2-rank {}\n",
                        i + 1,
                        d.poly.join(", "),
                        d.disc,
                        d.class_group.join(","),
                        d.two_rank
                    );
                }
                s += &format!("  both 2-ranks < 2: {}\n", if r.passes { "yes" } else { "no" });
            }
        }
    }
    out.emit(&s)?;
    Ok(ok)
}
