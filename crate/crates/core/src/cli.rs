//! The `forge` command line.
//!
//! Exit codes: 0 for a definite answer, 2 when a budget ran out first,
//! 1 for errors. Certificates are replayed before they are reported.

use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bundle::{self, Bundle, BundleError, BundleItem};
use crate::equalizer::{self, EqualizerError, PairWord, TSV_HEADER};
use crate::group::{self, build_group_presentation, GLetter, GroupError, Model};
use crate::machines::{self, HaltingMode, Machine, MachineError, MinskyConfig, MinskyMachine, RunStatus, TuringMachine};
use crate::rewriting::{self, AnyWord, Area, Kind, McKinseyOptions, Presentation, RewriteError};
use crate::semigroup::{self, CanonicalWord, SemigroupError};
use crate::transforms;
use crate::Tri;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Equalizer(#[from] EqualizerError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("emitted certificate failed its replay: {0}")]
    Replay(String),
}

impl CliError {
    // Budget exhaustion surfaces as exit code 2, never as a "No".
    fn is_unknown(&self) -> bool {
        matches!(
            self,
            CliError::Semigroup(SemigroupError::Unresolved(_))
                | CliError::Group(GroupError::Unresolved(_))
                | CliError::Group(GroupError::Semigroup(SemigroupError::Unresolved(_)))
                | CliError::Equalizer(EqualizerError::Unknown(_))
                | CliError::Equalizer(EqualizerError::Group(GroupError::Unresolved(_)))
        )
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Definite,
    Unknown,
}

impl From<Tri> for Outcome {
    fn from(t: Tri) -> Self {
        if t.is_definite() {
            Outcome::Definite
        } else {
            Outcome::Unknown
        }
    }
}

fn positive(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Parser)]
#[command(name = "forge", version, about = "Minsky machines, their semigroups and groups, and word-problem certificates")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Args)]
struct Opts {
    /// Node budget of every search.
    #[arg(long, global = true, default_value = "200000", value_parser = positive)]
    budget_nodes: usize,
    /// Step budget of machine runs.
    #[arg(long, global = true, default_value = "1000000", value_parser = positive)]
    budget_steps: usize,
    /// Largest finite quotient to enumerate.
    #[arg(long, global = true, default_value = "4", value_parser = positive)]
    quotient_cap: usize,
    /// Rows computed in parallel.
    #[arg(long, global = true, default_value = "1", value_parser = positive)]
    jobs: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file: a certificate bundle, or the transformed machine.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Run and inspect machines.
    #[command(subcommand)]
    Machine(MachineCmd),
    /// Transform a machine.
    Transform {
        #[arg(long, value_enum)]
        kind: TransformKind,
        #[arg(long = "in")]
        input: PathBuf,
        /// Keep the empty-glass bookkeeping of the 3-glass compilation.
        #[arg(long)]
        empty_glasses: bool,
    },
    /// The semigroup S(M).
    #[command(subcommand)]
    Sgp(SgpCmd),
    /// Generic presentations.
    #[command(subcommand)]
    Rw(RwCmd),
    /// The group G(M) and its normal subgroup T.
    #[command(subcommand)]
    Grp(GrpCmd),
    /// Equalizer subgroups of G x G.
    #[command(subcommand)]
    Eq(EqCmd),
    /// Replay every certificate in a bundle.
    Verify { bundle: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TransformKind {
    Symuniv,
    Onetape,
    Minsky3,
    Augment,
}

#[derive(Debug, Subcommand)]
enum MachineCmd {
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
    },
    Run {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        config: String,
        /// Step limit; defaults to --budget-steps.
        #[arg(long)]
        max: Option<usize>,
    },
    /// Sym-equivalence of two configurations.
    Equiv {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        c1: String,
        #[arg(long)]
        c2: String,
    },
    /// Time, co-time and space on the inputs of size 0..=nmax.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        nmax: usize,
    },
    /// Universal halting on all configurations up to a size.
    Halting {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        size: usize,
        /// Check Sym-classes instead of forward runs.
        #[arg(long)]
        sym: bool,
    },
}

#[derive(Debug, Subcommand)]
enum SgpCmd {
    Build {
        #[arg(long)]
        machine: PathBuf,
    },
    Canon {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        word: String,
    },
    Equal {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        w1: String,
        #[arg(long)]
        w2: String,
    },
    Zero {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        word: String,
    },
    Divisors {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        word: String,
    },
    Separate {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        w1: String,
        #[arg(long)]
        w2: String,
    },
    /// Derivation witness on the augmented machine.
    Depth {
        /// Source machine; it is augmented first.
        #[arg(long)]
        machine: PathBuf,
        /// Input configuration of the source machine.
        #[arg(long)]
        input: String,
        #[arg(long)]
        d: u64,
    },
}

#[derive(Debug, Subcommand)]
enum RwCmd {
    /// McKinsey decision of `w1 = w2`.
    Decide {
        #[arg(long)]
        pres: PathBuf,
        #[arg(long)]
        w1: String,
        #[arg(long)]
        w2: String,
    },
    /// Minimal number of relator applications reducing a group word to 1.
    Area {
        #[arg(long)]
        pres: PathBuf,
        #[arg(long)]
        word: String,
    },
}

#[derive(Debug, Args)]
struct GrpTarget {
    #[arg(long)]
    machine: PathBuf,
    #[arg(long, default_value_t = 2)]
    p: u32,
}

#[derive(Debug, Subcommand)]
enum GrpCmd {
    Build {
        #[command(flatten)]
        t: GrpTarget,
    },
    /// Evaluate an element of T, optionally acted on by letters.
    Eval {
        #[command(flatten)]
        t: GrpTarget,
        #[arg(long, conflicts_with_all = ["word", "elem"])]
        config: Option<String>,
        #[arg(long, conflicts_with = "elem")]
        word: Option<String>,
        #[arg(long)]
        elem: Option<String>,
        /// Drop A0 from config and word elements.
        #[arg(long)]
        no_a0: bool,
        /// Letters applied in order, e.g. "a1 A1^-1 ta2'".
        #[arg(long)]
        letters: Option<String>,
    },
    Star {
        #[command(flatten)]
        t: GrpTarget,
        #[arg(long)]
        elem: String,
        #[arg(long)]
        letter: String,
    },
    Equal {
        #[command(flatten)]
        t: GrpTarget,
        #[arg(long)]
        e1: String,
        #[arg(long)]
        e2: String,
    },
    Separate {
        #[command(flatten)]
        t: GrpTarget,
        #[arg(long)]
        elem: String,
    },
    /// Check the relators on a seeded sample of basis vectors.
    Check {
        #[command(flatten)]
        t: GrpTarget,
        #[arg(long, default_value_t = 1)]
        coins: u64,
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
}

#[derive(Debug, Subcommand)]
enum EqCmd {
    Gens {
        #[arg(long)]
        pres: PathBuf,
    },
    Member {
        #[arg(long)]
        pres: PathBuf,
        #[arg(long)]
        pair: String,
    },
    Express {
        #[arg(long)]
        pres: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Area against D-length of `([x^n, y^n], 1)`.
    Distort {
        #[arg(long)]
        pres: PathBuf,
        #[arg(long)]
        nmax: usize,
    },
    Separate {
        #[arg(long)]
        pres: PathBuf,
        #[arg(long)]
        pair: String,
    },
}

/// Parse `argv` (program name first), run, and return the exit code.
pub fn run_cli(argv: &[String]) -> i32 {
    run_cli_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

pub fn run_cli_with(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let help = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = if help { write!(out, "{}", e.render()) } else { write!(err, "{}", e.render()) };
            return if help { 0 } else { 1 };
        }
    };
    match dispatch(&cli, out) {
        Ok(Outcome::Definite) => 0,
        Ok(Outcome::Unknown) => 2,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            if e.is_unknown() {
                let _ = writeln!(out, "Unknown");
                2
            } else {
                1
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn emit(out: &mut dyn Write, line: impl Display) -> Result<()> {
    writeln!(out, "{}", line).map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })
}

enum AnyMachine {
    Minsky(MinskyMachine),
    Turing(TuringMachine),
}

fn load_machine(path: &Path) -> Result<AnyMachine> {
    let text = read(path)?;
    let first = text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).find(|l| !l.is_empty()).unwrap_or("");
    if first.starts_with("tm") || first.starts_with("tape") {
        Ok(AnyMachine::Turing(TuringMachine::parse(&text)?))
    } else {
        Ok(AnyMachine::Minsky(MinskyMachine::parse(&text)?))
    }
}

fn load_minsky(path: &Path) -> Result<MinskyMachine> {
    match load_machine(path)? {
        AnyMachine::Minsky(m) => Ok(m),
        AnyMachine::Turing(_) => Err(CliError::Usage(format!("{} is not a Minsky machine", path.display()))),
    }
}

fn load_turing(path: &Path) -> Result<TuringMachine> {
    match load_machine(path)? {
        AnyMachine::Turing(m) => Ok(m),
        AnyMachine::Minsky(_) => Err(CliError::Usage(format!("{} is not a Turing machine", path.display()))),
    }
}

fn load_pres(path: &Path) -> Result<Presentation> {
    Ok(Presentation::parse(&read(path)?)?)
}

fn save_bundle(opts: &Opts, name: String, item: BundleItem, out: &mut dyn Write) -> Result<()> {
    let mut b = Bundle::default();
    b.push(name, item);
    let report = bundle::verify(&b);
    if !report.passed() {
        return Err(CliError::Replay(report.to_string()));
    }
    if let Some(path) = &opts.out {
        b.write(path)?;
        emit(out, format!("certificate written to {}", path.display()))?;
    }
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<Outcome> {
    let opts = &cli.opts;
    match &cli.cmd {
        Cmd::Machine(c) => machine_cmd(opts, c, out),
        Cmd::Transform { kind, input, empty_glasses } => transform_cmd(opts, *kind, input, *empty_glasses, out),
        Cmd::Sgp(c) => sgp_cmd(opts, c, out),
        Cmd::Rw(c) => rw_cmd(opts, c, out),
        Cmd::Grp(c) => grp_cmd(opts, c, out),
        Cmd::Eq(c) => eq_cmd(opts, c, out),
        Cmd::Verify { bundle } => {
            let report = bundle::verify_bundle(bundle)?;
            write!(out, "{}", report).map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })?;
            if report.passed() {
                Ok(Outcome::Definite)
            } else {
                Err(CliError::Replay(format!("{} item(s) failed", report.items.iter().filter(|i| i.result.is_err()).count())))
            }
        }
    }
}

// Machine subcommands work for both machine kinds through these helpers.
fn run_any<M: Machine>(m: &M, c: &M::Config, max: usize, show: &dyn Fn(&M::Config) -> String, out: &mut dyn Write) -> Result<Outcome> {
    let r = machines::run(m, c, max)?;
    match &r.status {
        RunStatus::Accepted => {
            emit(out, format!("Accepted after {} steps", r.len()))?;
            Ok(Outcome::Definite)
        }
        RunStatus::HaltedNonAccepting(end) => {
            emit(out, format!("Halted without accepting at {} after {} steps", show(end), r.len()))?;
            Ok(Outcome::Definite)
        }
        RunStatus::BoundExceeded => {
            emit(out, format!("Unknown: no halt within {} steps", max))?;
            Ok(Outcome::Unknown)
        }
    }
}

fn equiv_any<M: Machine>(m: &M, c1: &M::Config, c2: &M::Config, bound: usize, show: &dyn Fn(&M::Config) -> String, out: &mut dyn Write) -> Result<Outcome> {
    let a = machines::sym_equivalent(m, c1, c2, bound);
    emit(out, a.answer)?;
    if let Some(path) = &a.witness {
        emit(out, path.iter().map(show).collect::<Vec<_>>().join(" ~ "))?;
    }
    Ok(a.answer.into())
}

fn stats_any<M: Machine>(m: &M, nmax: usize, steps: usize, input: impl Fn(usize) -> M::Config, out: &mut dyn Write) -> Result<Outcome> {
    let s = machines::stats(m, nmax, steps, input)?;
    let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
    emit(out, "n\ttime\tcotime\tspace\tT\tPsi")?;
    let (t, psi) = (s.time_function(), s.cotime_function());
    let mut unknown = false;
    for (i, r) in s.rows.iter().enumerate() {
        unknown |= r.bound_exceeded;
        let space = if r.bound_exceeded { "?".to_string() } else { r.space.to_string() };
        emit(out, format!("{}\t{}\t{}\t{}\t{}\t{}", r.n, opt(r.time), opt(r.cotime), space, t[i], psi[i]))?;
    }
    Ok(if unknown { Outcome::Unknown } else { Outcome::Definite })
}

fn halting_any<M: Machine>(m: &M, configs: Vec<M::Config>, steps: usize, sym: bool, show: &dyn Fn(&M::Config) -> String, out: &mut dyn Write) -> Result<Outcome> {
    let mode = if sym { HaltingMode::Sym } else { HaltingMode::Forward };
    let r = machines::check_halting(m, configs, steps, mode);
    emit(out, format!("examined {} configurations, {} without a bounded run", r.examined, r.counterexamples.len()))?;
    for c in r.counterexamples.iter().take(20) {
        emit(out, format!("  {}", show(c)))?;
    }
    // A bounded search cannot refute halting, only fail to confirm it.
    Ok(if r.counterexamples.is_empty() { Outcome::Definite } else { Outcome::Unknown })
}

fn machine_cmd(opts: &Opts, c: &MachineCmd, out: &mut dyn Write) -> Result<Outcome> {
    match c {
        MachineCmd::Validate { input } => {
            let r = match load_machine(input)? {
                AnyMachine::Minsky(m) => m.validate()?,
                AnyMachine::Turing(m) => m.validate()?,
            };
            emit(out, if r.deterministic { "deterministic" } else { "nondeterministic" })?;
            for v in &r.violations {
                emit(out, format!("  {}", v))?;
            }
            Ok(Outcome::Definite)
        }
        MachineCmd::Run { input, config, max } => {
            let max = max.unwrap_or(opts.budget_steps);
            match load_machine(input)? {
                AnyMachine::Minsky(m) => {
                    let c = MinskyConfig::parse(config)?;
                    m.check_config(&c)?;
                    run_any(&m, &c, max, &|c| c.to_string(), out)
                }
                AnyMachine::Turing(m) => {
                    let c = m.parse_config(config)?;
                    run_any(&m, &c, max, &|c| m.config_text(c), out)
                }
            }
        }
        MachineCmd::Equiv { input, c1, c2 } => match load_machine(input)? {
            AnyMachine::Minsky(m) => {
                let (a, b) = (MinskyConfig::parse(c1)?, MinskyConfig::parse(c2)?);
                m.check_config(&a)?;
                m.check_config(&b)?;
                equiv_any(&m, &a, &b, opts.budget_nodes, &|c| c.to_string(), out)
            }
            AnyMachine::Turing(m) => {
                let (a, b) = (m.parse_config(c1)?, m.parse_config(c2)?);
                equiv_any(&m, &a, &b, opts.budget_nodes, &|c| m.config_text(c), out)
            }
        },
        MachineCmd::Stats { input, nmax } => match load_machine(input)? {
            AnyMachine::Minsky(m) => stats_any(&m, *nmax, opts.budget_steps, |n| m.input(n as u64), out),
            AnyMachine::Turing(m) => stats_any(&m, *nmax, opts.budget_steps, |n| m.unary_input(n), out),
        },
        MachineCmd::Halting { input, size, sym } => match load_machine(input)? {
            AnyMachine::Minsky(m) => halting_any(&m, m.configs_up_to(*size as u64), opts.budget_steps, *sym, &|c| c.to_string(), out),
            AnyMachine::Turing(m) => halting_any(&m, m.configs_up_to(*size), opts.budget_steps, *sym, &|c| m.config_text(c), out),
        },
    }
}

fn transform_cmd(opts: &Opts, kind: TransformKind, input: &Path, empty_glasses: bool, out: &mut dyn Write) -> Result<Outcome> {
    let text = match kind {
        TransformKind::Symuniv => transforms::to_sym_universal(&load_turing(input)?)?.machine.to_text(),
        TransformKind::Onetape => transforms::to_one_tape(&load_turing(input)?)?.machine.to_text(),
        TransformKind::Minsky3 => transforms::tm_to_minsky3(&load_turing(input)?, empty_glasses)?.machine.to_text(),
        TransformKind::Augment => transforms::augment_for_depth(&load_minsky(input)?)?.machine.to_text(),
    };
    match &opts.out {
        Some(path) => write_file(path, &text)?,
        None => write!(out, "{}", text).map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })?,
    }
    Ok(Outcome::Definite)
}

fn sgp_cmd(opts: &Opts, c: &SgpCmd, out: &mut dyn Write) -> Result<Outcome> {
    let bound = opts.budget_nodes;
    match c {
        SgpCmd::Build { machine } => {
            let m = load_minsky(machine)?;
            write!(out, "{}", semigroup::build_presentation(&m).to_text()).map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })?;
            Ok(Outcome::Definite)
        }
        SgpCmd::Canon { machine, word } => {
            let m = load_minsky(machine)?;
            emit(out, semigroup::parse_word(&m, word)?)?;
            Ok(Outcome::Definite)
        }
        SgpCmd::Equal { machine, w1, w2 } => {
            let m = load_minsky(machine)?;
            let (a, b) = (semigroup::parse_word(&m, w1)?, semigroup::parse_word(&m, w2)?);
            let t = semigroup::equal(&m, &a, &b, bound);
            emit(out, t)?;
            if t == Tri::No && opts.out.is_some() {
                let cert = semigroup::separating_quotient(&m, &a, &b, bound)?;
                save_bundle(opts, format!("{} != {}", a, b), BundleItem::SemigroupQuotient { machine: m.to_text(), certificate: cert }, out)?;
            }
            Ok(t.into())
        }
        SgpCmd::Zero { machine, word } => {
            let m = load_minsky(machine)?;
            let t = semigroup::is_zero(&m, &semigroup::parse_word(&m, word)?, bound);
            emit(out, t)?;
            Ok(t.into())
        }
        SgpCmd::Divisors { machine, word } => {
            let m = load_minsky(machine)?;
            let d = semigroup::divisors(&m, &semigroup::parse_word(&m, word)?, bound)?;
            emit(out, format!("{} divisors{}", d.words.len(), if d.complete { "" } else { " found (incomplete)" }))?;
            for w in &d.words {
                emit(out, w)?;
            }
            Ok(if d.complete { Outcome::Definite } else { Outcome::Unknown })
        }
        SgpCmd::Separate { machine, w1, w2 } => {
            let m = load_minsky(machine)?;
            let (a, b) = (semigroup::parse_word(&m, w1)?, semigroup::parse_word(&m, w2)?);
            let cert = semigroup::separating_quotient(&m, &a, &b, bound)?;
            cert.check(&m).map_err(CliError::Replay)?;
            emit(out, format!("quotient of size {} separates: images {} and {}", cert.quotient.size(), cert.images.0, cert.images.1))?;
            save_bundle(opts, format!("{} != {}", a, b), BundleItem::SemigroupQuotient { machine: m.to_text(), certificate: cert }, out)?;
            Ok(Outcome::Definite)
        }
        SgpCmd::Depth { machine, input, d } => {
            let aug = transforms::augment_for_depth(&load_minsky(machine)?)?;
            let c = MinskyConfig::parse(input)?;
            let w = semigroup::depth_witness(&aug, &c, *d)?;
            w.replay().map_err(|i| CliError::Replay(format!("step {}", i)))?;
            let psi = w.psi.map(|p| p.to_string()).unwrap_or_else(|| "-".into());
            emit(out, format!("depth {} verified: {} steps, halting time {}, Psi(n) = {}", d, w.steps.len(), w.halting_time, psi))?;
            save_bundle(opts, format!("depth {} from {}", d, c), BundleItem::DepthWitness { witness: w }, out)?;
            Ok(Outcome::Definite)
        }
    }
}

fn any_word(pres: &Presentation, s: &str) -> Result<AnyWord> {
    Ok(match pres.kind {
        Kind::Semigroup => AnyWord::S(pres.parse_sword(s)?),
        Kind::Group => AnyWord::G(pres.parse_gword(s)?),
    })
}

fn rw_cmd(opts: &Opts, c: &RwCmd, out: &mut dyn Write) -> Result<Outcome> {
    match c {
        RwCmd::Decide { pres, w1, w2 } => {
            let p = load_pres(pres)?;
            let (a, b) = (any_word(&p, w1)?, any_word(&p, w2)?);
            let o = McKinseyOptions { yes_budget: opts.budget_nodes, quotient_cap: opts.quotient_cap, ..McKinseyOptions::default() };
            let r = rewriting::mckinsey_decide(&p, &a, &b, o)?;
            emit(out, r.answer)?;
            if let Some(cert) = r.certificate {
                if !cert.check(&p, &a, &b) {
                    return Err(CliError::Replay("McKinsey certificate".into()));
                }
                let item = BundleItem::WordProblem { presentation: p.to_text(), w1: w1.clone(), w2: w2.clone(), certificate: cert };
                save_bundle(opts, format!("{} vs {}", w1, w2), item, out)?;
            }
            Ok(r.answer.into())
        }
        RwCmd::Area { pres, word } => {
            let p = load_pres(pres)?;
            let w = p.parse_gword(word)?;
            match rewriting::area(&p, &w, opts.budget_nodes, None)? {
                Area::Exact(a, _) => {
                    emit(out, a)?;
                    Ok(Outcome::Definite)
                }
                Area::Unknown => {
                    emit(out, "Unknown")?;
                    Ok(Outcome::Unknown)
                }
            }
        }
    }
}

fn parse_letters(s: &str) -> Result<Vec<(GLetter, i8)>> {
    s.split_whitespace()
        .map(|t| {
            let (name, sign) = match t.strip_suffix("^-1") {
                Some(n) => (n, -1),
                None => (t, 1),
            };
            Ok((name.parse::<GLetter>()?, sign))
        })
        .collect()
}

fn grp_cmd(opts: &Opts, c: &GrpCmd, out: &mut dyn Write) -> Result<Outcome> {
    let model = |t: &GrpTarget| -> Result<Model> { Ok(Model::new(&load_minsky(&t.machine)?, t.p)?) };
    match c {
        GrpCmd::Build { t } => {
            let data = build_group_presentation(&load_minsky(&t.machine)?, t.p)?;
            write!(out, "{}", data.to_text()).map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })?;
            Ok(Outcome::Definite)
        }
        GrpCmd::Eval { t, config, word, elem, no_a0, letters } => {
            let md = model(t)?;
            let mut e = match (config, word, elem) {
                (Some(c), _, _) => md.config_element(&MinskyConfig::parse(c)?, !no_a0)?,
                (_, Some(w), _) => match semigroup::parse_word(&md.machine, w)? {
                    CanonicalWord::Word(x) => md.word_element(&x, !no_a0)?,
                    CanonicalWord::Zero => return Err(CliError::Usage("the word is zero in S(M)".into())),
                },
                (_, _, Some(e)) => md.parse_element(e)?,
                _ => return Err(CliError::Usage("one of --config, --word, --elem is required".into())),
            };
            if let Some(l) = letters {
                e = md.apply_word(&e, &parse_letters(l)?)?;
            }
            emit(out, &e)?;
            Ok(Outcome::Definite)
        }
        GrpCmd::Star { t, elem, letter } => {
            let md = model(t)?;
            emit(out, md.star(&md.parse_element(elem)?, letter.parse()?)?)?;
            Ok(Outcome::Definite)
        }
        GrpCmd::Equal { t, e1, e2 } => {
            let md = model(t)?;
            let eq = group::equal_elements(&md.parse_element(e1)?, &md.parse_element(e2)?);
            emit(out, Tri::from_bool(eq))?;
            Ok(Outcome::Definite)
        }
        GrpCmd::Separate { t, elem } => {
            let md = model(t)?;
            let cert = group::separate_element(&md, &md.parse_element(elem)?)?;
            cert.check(&md).map_err(CliError::Replay)?;
            let index = cert.quotient.index().map(|i| i.to_string()).unwrap_or_else(|| format!("{}^{}", md.p, cert.quotient.index_exponent));
            emit(out, format!("quotient by {} of index {} separates", cert.quotient.spec, index))?;
            let item = BundleItem::GroupSeparation { machine: md.machine.to_text(), certificate: cert };
            save_bundle(opts, elem.clone(), item, out)?;
            Ok(Outcome::Definite)
        }
        GrpCmd::Check { t, coins, samples } => {
            let md = model(t)?;
            let data = build_group_presentation(&md.machine, md.p)?;
            let mut basis = md.sample_basis(*coins)?;
            basis.shuffle(&mut ChaCha8Rng::seed_from_u64(opts.seed));
            basis.truncate(*samples);
            let failed: Vec<usize> = (0..data.presentation.relators.len())
                .filter_map(|i| match data.relator_holds(&md, &data.presentation.relators[i], &basis) {
                    Ok(true) => None,
                    _ => Some(i),
                })
                .collect();
            emit(out, format!("{} relators checked on {} basis vectors, {} failed", data.presentation.relators.len(), basis.len(), failed.len()))?;
            for i in failed.iter().take(20) {
                emit(out, format!("  {} {}", data.tags[*i], data.presentation.gword_text(&data.presentation.relators[*i])))?;
            }
            if failed.is_empty() {
                Ok(Outcome::Definite)
            } else {
                Err(CliError::Usage(format!("{} relators fail in the model", failed.len())))
            }
        }
    }
}

fn eq_cmd(opts: &Opts, c: &EqCmd, out: &mut dyn Write) -> Result<Outcome> {
    let budget = opts.budget_nodes;
    match c {
        EqCmd::Gens { pres } => {
            let p = load_pres(pres)?;
            let eq = equalizer::equalizer_generators(&p)?;
            for g in eq.gens() {
                emit(out, format!("{}\t{}", g, eq.value(g).text(&p)))?;
            }
            Ok(Outcome::Definite)
        }
        EqCmd::Member { pres, pair } => {
            let p = load_pres(pres)?;
            let t = equalizer::member(&p, &PairWord::parse(&p, pair)?, budget)?;
            emit(out, t)?;
            Ok(t.into())
        }
        EqCmd::Express { pres, word } => {
            let p = load_pres(pres)?;
            let eq = equalizer::equalizer_generators(&p)?;
            let w = rewriting::free_reduce(&p.parse_gword(word)?);
            let d = equalizer::express(&eq, &w, budget)?;
            emit(out, format!("{}\t{}", d.len(), eq.dword_text(&d)))?;
            let item = BundleItem::Expression { presentation: p.to_text(), pair: PairWord::new(&w, &[]), dword: d };
            save_bundle(opts, word.clone(), item, out)?;
            Ok(Outcome::Definite)
        }
        EqCmd::Distort { pres, nmax } => {
            let p = load_pres(pres)?;
            if p.generators.len() < 2 {
                return Err(CliError::Usage("the commutator family needs two generators".into()));
            }
            let eq = equalizer::equalizer_generators(&p)?;
            let rows = equalizer::distortion_table(&eq, &equalizer::commutator_family, *nmax, budget, opts.jobs);
            emit(out, TSV_HEADER)?;
            for r in &rows {
                emit(out, r.tsv())?;
            }
            Ok(Outcome::Definite)
        }
        EqCmd::Separate { pres, pair } => {
            let p = load_pres(pres)?;
            let pw = PairWord::parse(&p, pair)?;
            let cert = equalizer::separate_pair(&p, &pw, opts.quotient_cap, budget)?;
            cert.check(&p).map_err(CliError::Replay)?;
            emit(out, "separated")?;
            save_bundle(opts, pair.clone(), BundleItem::PairSeparation { presentation: p.to_text(), certificate: cert }, out)?;
            Ok(Outcome::Definite)
        }
    }
}
