//! Command-line front end with text/JSON output and an on-disk report cache.
//!
//! Exit statuses: 0 pass, 1 counterexample found (witness included in the
//! output), 2 usage error, 3 refused by a feasibility guard or inconclusive.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
use crate::group::{standard_basis, Element, GroupCtx};
use crate::report::{SearchReport, SCHEMA_VERSION};
use crate::search::{self, SearchConfig};
use crate::sequence::Sequence;
use crate::structure::{conjecture_item, construct_conjectured, ConjectureParams};

pub const CACHE_ENV: &str = "ZEROSUM_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".zerosum-cache";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_COUNTEREXAMPLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InvariantKind {
    Davenport,
    Eta,
    SLe,
}

impl InvariantKind {
    fn name(self) -> &'static str {
        match self {
            InvariantKind::Davenport => "davenport",
            InvariantKind::Eta => "eta",
            InvariantKind::SLe => "s-le",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "zerosum", version, about = "Zero-sum subsequences of bounded length over C_n + C_n")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Report cache location [env: ZEROSUM_CACHE_DIR, default: ./.zerosum-cache]
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Always recompute and never touch the cache
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Largest modulus accepted by exhaustive searches
    #[arg(long, global = true)]
    pub max_n: Option<u32>,
    /// Largest mn for the exhaustive tier of verify-mult
    #[arg(long, global = true)]
    pub max_mn: Option<u32>,
    /// Largest modulus whose automorphism group is enumerated
    #[arg(long, global = true)]
    pub aut_guard: Option<u32>,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SeqInput {
    /// Sequence inline, e.g. "(1,0)^2 (0,1)"
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    pub seq: Option<String>,
    /// File holding a sequence in the same grammar
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute D, η or s_≤ℓ by exhaustive search
    Invariant {
        #[arg(long, value_enum)]
        kind: InvariantKind,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        ell: Option<u32>,
    },
    /// List orbit representatives of extremal sequences of length 2n-2+k
    Enumerate {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
    },
    /// Match every extremal orbit against the conjectured shapes
    VerifyConjecture {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
    },
    /// Check the multiplicative step on C_{mn} + C_{mn}
    VerifyMult {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k_m: u32,
        #[arg(long)]
        k_n: u32,
    },
    /// Randomized check of the |Σ_{|G|}(S)| lower bound
    VerifyHamidoune {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    /// Classify zero-sum sequences of length sn-1 without short zero-sums
    VerifyFixedprop {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        s: u32,
    },
    /// Build and check a block decomposition of one sequence over C_{mn} + C_{mn}
    Decompose {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k_m: u32,
        #[arg(long)]
        k_n: u32,
        #[command(flatten)]
        input: SeqInput,
        /// Report the augmented form (needs k_n >= 2)
        #[arg(long)]
        augment: bool,
    },
    /// Print a sequence of conjectured shape
    Construct {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        /// Shape number; defaults to the one that applies to (n, k)
        #[arg(long)]
        item: Option<u8>,
        /// Basis as two terms, e.g. "(1,0) (0,1)"
        #[arg(long)]
        basis: Option<String>,
        /// Coefficient of the repeated term in shape 4
        #[arg(long)]
        x: Option<u32>,
        /// Comma-separated coset coefficients for shapes 1 and 2
        #[arg(long, value_delimiter = ',')]
        xs: Option<Vec<u32>>,
        /// Term removed from the shape-2 sequence in shape 1
        #[arg(long)]
        appended: Option<String>,
    },
    /// Statistics, zero-sum class and structure of one sequence
    Classify {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        input: SeqInput,
    },
    /// Extension and removal round trips between levels k and k+1
    Lemmas {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
    },
}

impl Command {
    /// Canonical parameter tuple for cacheable commands.
    fn cache_key(&self, g: &GlobalArgs, cfg: &SearchConfig) -> Option<String> {
        let tail = format!("seed={};max_mn={}", g.seed, cfg.max_mn_exhaustive);
        let head = match self {
            Command::Invariant { kind, n, ell } => {
                format!("invariant;kind={};n={n};ell={}", kind.name(), ell.map_or("-".into(), |l| l.to_string()))
            }
            Command::Enumerate { n, k } => format!("enumerate;n={n};k={k}"),
            Command::VerifyConjecture { n, k } => format!("verify-conjecture;n={n};k={k}"),
            Command::VerifyMult { m, n, k_m, k_n } => format!("verify-mult;m={m};n={n};k_m={k_m};k_n={k_n}"),
            Command::VerifyHamidoune { n, trials } => format!("verify-hamidoune;n={n};trials={trials}"),
            Command::VerifyFixedprop { n, s } => format!("verify-fixedprop;n={n};s={s}"),
            Command::Lemmas { n, k } => format!("lemmas;n={n};k={k}"),
            Command::Decompose { .. } | Command::Construct { .. } | Command::Classify { .. } => return None,
        };
        Some(format!("{head};{tail}"))
    }
}

/// A stored report; entries with another schema version are ignored.
#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    schema_version: u32,
    key: String,
    report: SearchReport,
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: PathBuf) -> Cache {
        Cache { dir }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        let name: String = key
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
            .collect();
        self.dir.join(format!("{name}.json"))
    }

    /// `Ok(None)` on a miss; `Err` carries a warning for an unreadable entry.
    pub fn load(&self, key: &str) -> Result<Option<SearchReport>, String> {
        let path = self.path_for(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(format!("cannot read cache entry {}: {e}", path.display())),
        };
        let entry: CacheEntry = serde_json::from_str(&text)
            .map_err(|e| format!("corrupt cache entry {}: {e}", path.display()))?;
        if entry.schema_version != SCHEMA_VERSION || entry.report.schema_version != SCHEMA_VERSION {
            return Ok(None);
        }
        if entry.key != key {
            return Err(format!("cache entry {} belongs to another key", path.display()));
        }
        Ok(Some(entry.report))
    }

    pub fn store(&self, key: &str, report: &SearchReport) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let entry = CacheEntry { schema_version: SCHEMA_VERSION, key: key.to_string(), report: report.clone() };
        let path = self.path_for(key);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_string_pretty(&entry).expect("entry serializes"))?;
        fs::rename(tmp, path)
    }
}

/// Parses `argv` (program name first), runs the command and writes the
/// result. Returns the exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_PASS;
            }
            if wants_json(&argv) {
                emit_error(out, "usage", &e.to_string(), EXIT_USAGE);
            } else {
                let _ = write!(err, "{e}");
            }
            return EXIT_USAGE;
        }
    };
    run_cli(&cli, out, err)
}

fn wants_json(argv: &[OsString]) -> bool {
    argv.windows(2).any(|w| w[0] == "--format" && w[1] == "json") || argv.iter().any(|a| a == "--format=json")
}

pub fn run_cli(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let g = &cli.global;
    let cache_dir = g
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR));
    let mut cfg = SearchConfig { threads: g.threads, ..SearchConfig::default() };
    if let Some(v) = g.max_n {
        cfg.max_n = v;
    }
    if let Some(v) = g.max_mn {
        cfg.max_mn_exhaustive = v;
    }
    if let Some(v) = g.aut_guard {
        cfg.aut_guard = v;
    }
    if g.threads == Some(0) {
        return fail(out, err, g.format, &Error::InvalidArgument("--threads must be at least 1".into()));
    }
    let cache = (!g.no_cache).then(|| Cache::new(cache_dir));
    if let Some(c) = &cache {
        cfg.checkpoint_dir = Some(c.dir().join("checkpoints"));
    }

    if let Command::Construct { n, k, item, basis, x, xs, appended } = &cli.command {
        return match construct(*n, *k, *item, basis.as_deref(), *x, xs.as_deref(), appended.as_deref()) {
            Ok((s, params)) => {
                match g.format {
                    Format::Text => {
                        let _ = writeln!(out, "{s}");
                    }
                    Format::Json => {
                        let mut r = SearchReport::new(
                            "construct",
                            crate::report::Params { n: Some(*n), k: Some(*k), seed: Some(g.seed), ..Default::default() },
                        );
                        r.witnesses.push(s.to_string());
                        r.details = json!({ "sequence": s.to_string(), "length": s.len(), "form": params });
                        let _ = writeln!(out, "{}", r.to_json());
                    }
                }
                EXIT_PASS
            }
            Err(e) => fail(out, err, g.format, &e),
        };
    }

    let key = cli.command.cache_key(g, &cfg);
    if let (Some(c), Some(key)) = (&cache, &key) {
        match c.load(key) {
            Ok(Some(report)) => {
                let _ = writeln!(err, "cache hit: {}", c.path_for(key).display());
                return emit_report(out, g.format, &report);
            }
            Ok(None) => {}
            Err(w) => {
                let _ = writeln!(err, "warning: {w}; recomputing");
            }
        }
    }

    let report = match execute(&cli.command, &cfg, g.seed) {
        Ok(mut r) => {
            r.params.seed = Some(g.seed);
            r
        }
        Err(e) => return fail(out, err, g.format, &e),
    };
    if let (Some(c), Some(key)) = (&cache, &key) {
        if let Err(e) = c.store(key, &report) {
            let _ = writeln!(err, "warning: could not write cache entry: {e}");
        }
    }
    emit_report(out, g.format, &report)
}

fn execute(cmd: &Command, cfg: &SearchConfig, seed: u64) -> crate::error::Result<SearchReport> {
    match cmd {
        Command::Invariant { kind, n, ell } => {
            if *kind != InvariantKind::SLe && ell.is_some() {
                return Err(Error::InvalidArgument("--ell only applies to --kind s-le".into()));
            }
            search::invariant_report(kind.name(), *n, *ell, cfg)
        }
        Command::Enumerate { n, k } => search::enumerate_report(*n, *k, cfg),
        Command::VerifyConjecture { n, k } => search::verify_conjecture(*n, *k, cfg),
        Command::VerifyMult { m, n, k_m, k_n } => search::verify_multiplicative(*m, *n, *k_m, *k_n, cfg),
        Command::VerifyHamidoune { n, trials } => search::verify_hamidoune(*n, *trials, seed, cfg),
        Command::VerifyFixedprop { n, s } => search::verify_fixedprop(*n, *s, cfg),
        Command::Lemmas { n, k } => search::round_trip_lemmas(*n, *k, cfg),
        Command::Decompose { m, n, k_m, k_n, input, augment } => {
            let ctx = GroupCtx::new(m.saturating_mul(*n))?;
            let s = read_sequence(ctx, input)?;
            search::decompose_report(&s, *m, *n, *k_m, *k_n, *augment)
        }
        Command::Classify { n, input } => {
            let ctx = GroupCtx::new(*n)?;
            let s = read_sequence(ctx, input)?;
            search::classify_report(&s)
        }
        Command::Construct { .. } => unreachable!("handled before dispatch"),
    }
}

fn read_sequence(ctx: GroupCtx, input: &SeqInput) -> crate::error::Result<Sequence> {
    let text = match (&input.seq, &input.file) {
        (Some(s), _) => s.clone(),
        (None, Some(p)) => fs::read_to_string(p)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", p.display())))?,
        (None, None) => return Err(Error::InvalidArgument("give --seq or --file".into())),
    };
    Sequence::parse(ctx, text.trim())
}

fn construct(
    n: u32,
    k: u32,
    item: Option<u8>,
    basis: Option<&str>,
    x: Option<u32>,
    xs: Option<&[u32]>,
    appended: Option<&str>,
) -> crate::error::Result<(Sequence, ConjectureParams)> {
    let ctx = GroupCtx::new(n)?;
    if n < 2 || k >= n {
        return Err(Error::InvalidArgument(format!("need n >= 2 and k in [0, n-1], got n = {n}, k = {k}")));
    }
    let basis = match basis {
        None => standard_basis(ctx),
        Some(text) => {
            let terms: Vec<&str> = text.split_whitespace().collect();
            match terms.as_slice() {
                [a, b] => (ctx.check(a.parse::<Element>()?)?, ctx.check(b.parse::<Element>()?)?),
                _ => return Err(Error::InvalidArgument(format!("basis needs two terms, got {text:?}"))),
            }
        }
    };
    let item = item.unwrap_or_else(|| conjecture_item(n, k));
    // default coset coefficients (1, 0, ..., 0)
    let default_xs = || {
        let mut v = vec![0; n as usize];
        v[0] = 1;
        v
    };
    let params = match item {
        1 => {
            let xs = xs.map(<[u32]>::to_vec).unwrap_or_else(default_xs);
            let appended = match appended {
                Some(t) => ctx.check(t.parse::<Element>()?)?,
                None => basis.1,
            };
            ConjectureParams::Item1 { appended, xs }
        }
        2 => {
            let xs = xs.map(<[u32]>::to_vec).unwrap_or_else(default_xs);
            let sum_class = (xs.iter().map(|&v| v as u64).sum::<u64>() % n as u64) as u32;
            ConjectureParams::Item2 { xs, sum_class }
        }
        3 => ConjectureParams::Item3,
        4 => ConjectureParams::Item4 { x: x.unwrap_or(1) },
        other => return Err(Error::InvalidArgument(format!("item must be 1..=4, got {other}"))),
    };
    let s = construct_conjectured(ctx, k, basis, &params)?;
    Ok((s, params))
}

/// Fail with a witness is 1; fail without one is inconclusive.
pub fn exit_for(report: &SearchReport) -> i32 {
    if report.passed() {
        EXIT_PASS
    } else if !report.counterexamples.is_empty() {
        EXIT_COUNTEREXAMPLE
    } else {
        EXIT_INFEASIBLE
    }
}

fn emit_report(out: &mut dyn Write, format: Format, report: &SearchReport) -> i32 {
    let _ = match format {
        Format::Json => writeln!(out, "{}", report.to_json()),
        Format::Text => write!(out, "{}", render_text(report)),
    };
    exit_for(report)
}

pub fn render_text(r: &SearchReport) -> String {
    let mut s = String::new();
    let p = serde_json::to_value(&r.params).unwrap_or(Value::Null);
    let params = p
        .as_object()
        .map(|o| o.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" "))
        .unwrap_or_default();
    s.push_str(&format!("task: {}\nparams: {params}\n", r.task));
    s.push_str(&format!("verdict: {}\n", if r.passed() { "pass" } else { "fail" }));
    if let Some(v) = r.value {
        s.push_str(&format!("value: {v}\n"));
    }
    if let Some(o) = r.orbits {
        s.push_str(&format!("orbits: {o}\n"));
    }
    list(&mut s, "witnesses", &r.witnesses);
    list(&mut s, "counterexamples", &r.counterexamples);
    if let Value::Object(o) = &r.details {
        for (k, v) in o {
            let v = match v {
                Value::String(t) => t.clone(),
                other => other.to_string(),
            };
            s.push_str(&format!("{k}: {v}\n"));
        }
    }
    for n in &r.notes {
        s.push_str(&format!("note: {n}\n"));
    }
    s.push_str(&format!(
        "nodes: {}  zero-pruned: {}  canon-pruned: {}  elapsed: {} ms\n",
        r.counters.nodes, r.counters.zero_pruned, r.counters.canon_pruned, r.elapsed_ms
    ));
    s
}

fn list(s: &mut String, name: &str, items: &[String]) {
    if items.is_empty() {
        s.push_str(&format!("{name}: none\n"));
        return;
    }
    s.push_str(&format!("{name}:\n"));
    for w in items {
        s.push_str(&format!("  {w}\n"));
    }
}

fn error_kind(e: &Error) -> (&'static str, i32) {
    match e {
        Error::Infeasible { .. } => ("infeasible", EXIT_INFEASIBLE),
        Error::Syntax { .. } => ("syntax", EXIT_USAGE),
        Error::OutOfRange { .. } => ("out_of_range", EXIT_USAGE),
        Error::ContextMismatch { .. } => ("context_mismatch", EXIT_USAGE),
        Error::NotSubsequence(..) => ("not_subsequence", EXIT_USAGE),
        Error::InvalidArgument(_) => ("invalid_argument", EXIT_USAGE),
        Error::NotInKernel(_) => ("not_in_kernel", EXIT_USAGE),
        Error::DecompositionFailed { .. } => ("decomposition_failed", EXIT_USAGE),
        Error::Invariant(_) => ("invariant", EXIT_USAGE),
    }
}

fn fail(out: &mut dyn Write, err: &mut dyn Write, format: Format, e: &Error) -> i32 {
    let (kind, code) = error_kind(e);
    match format {
        Format::Json => emit_error(out, kind, &e.to_string(), code),
        Format::Text => {
            let _ = writeln!(err, "error: {e}");
        }
    }
    code
}

fn emit_error(out: &mut dyn Write, kind: &str, message: &str, code: i32) {
    let obj = json!({
        "schema_version": SCHEMA_VERSION,
        "error": { "kind": kind, "message": message.trim_end(), "exit_code": code },
    });
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&obj).expect("serializes"));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{Params, Verdict};

    #[test]
    fn exit_statuses() {
        let mut r = SearchReport::new("classify", Params::default());
        assert_eq!(exit_for(&r), EXIT_PASS);
        r.verdict = Verdict::Fail;
        assert_eq!(exit_for(&r), EXIT_INFEASIBLE);
        r.counterexamples.push("(1,0)".into());
        assert_eq!(exit_for(&r), EXIT_COUNTEREXAMPLE);
    }

    #[test]
    fn counterexample_text_lists_the_witness() {
        let mut r = SearchReport::new("verify-conjecture", Params { n: Some(3), ..Params::default() });
        r.verdict = Verdict::Fail;
        r.counterexamples.push("(1,0)^2 (0,1)^2".into());
        let text = render_text(&r);
        assert!(text.contains("verdict: fail"));
        assert!(text.contains("counterexamples:\n  (1,0)^2 (0,1)^2"));
    }

    #[test]
    fn cache_paths_are_flat_file_names() {
        let c = Cache::new(PathBuf::from("/tmp/x"));
        let p = c.path_for("verify-mult;m=2;n=3;k_m=0;k_n=2;seed=0;max_mn=4");
        assert_eq!(p.parent(), Some(Path::new("/tmp/x")));
        assert!(!p.file_name().unwrap().to_str().unwrap().contains(';'));
    }
}
