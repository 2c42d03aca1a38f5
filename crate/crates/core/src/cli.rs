//! Command-line front end. Every subcommand returns a [`CommandResult`];
//! the exit code is 0 for pass, 1 for fail and 2 for invalid input.

use std::ffi::OsString;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{compute_constants, displacement, verify_bounded_cycles, BoundReport};
use crate::cycles::{cycle_type_on_window, nth_root_of_perm, trace_cycle, CycleTrace, FinitePerm};
use crate::demo::{ordinal, q_search, SearchBounds};
use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, Label, SepQuery, SpaceSpec};
use crate::perm::{PermSpec, Window};
use crate::tree::{
    minimal_m, preimage_bound_check, separator_from_tree, verify_qi, CertificateSpec, QiCertificate, DEFAULT_M_MAX,
};
use crate::zoo::{commute_on_window, make_combined, make_shift, make_tower, tower_check, GroupSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    InvalidInput,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::InvalidInput => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandResult {
    pub status: Status,
    pub payload: Value,
    pub summary: String,
}

impl CommandResult {
    fn verdict(ok: bool, payload: Value, summary: String) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        CommandResult { status, payload, summary }
    }

    fn pass(payload: Value, summary: String) -> Self {
        Self::verdict(true, payload, summary)
    }

    fn from_error(e: &Error) -> Self {
        let status = if is_input_error(e) { Status::InvalidInput } else { Status::Fail };
        CommandResult { status, payload: json!({ "error": e.to_string() }), summary: format!("error: {e}") }
    }

    /// Summary text, or the whole result as JSON.
    pub fn render(&self, json: bool) -> String {
        if json {
            serde_json::to_string_pretty(self).expect("results serialize")
        } else {
            self.summary.clone()
        }
    }
}

/// Malformed or inconsistent input, as opposed to a well-posed question
/// whose answer is negative.
fn is_input_error(e: &Error) -> bool {
    !matches!(
        e,
        Error::NotInvariant { .. }
            | Error::NoRoot { .. }
            | Error::TooClose { .. }
            | Error::GeodesicTooShort { .. }
            | Error::BudgetExceeded { .. }
            | Error::Overflow { .. }
            | Error::EmptyInterior
    )
}

#[derive(Debug, Parser)]
#[command(name = "bdperm", version, about = "Bounded displacement permutations and their verifiers")]
struct Cli {
    /// Print the full result as JSON instead of the summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate permutation expressions.
    #[command(subcommand)]
    Perm(PermCmd),
    /// Build the standard examples.
    #[command(subcommand)]
    Zoo(ZooCmd),
    /// Check identities on a window.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// The separation predicate.
    #[command(subcommand)]
    Sep(SepCmd),
    /// Quasi-isometric embeddings into trees.
    #[command(subcommand)]
    Qi(QiCmd),
    /// Constants and the bounded-cycles check.
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// n-th roots on an invariant window.
    #[command(subcommand)]
    Roots(RootsCmd),
    /// Bounded-effort demonstrations.
    #[command(subcommand)]
    Demo(DemoCmd),
}

/// A permutation: inline JSON, a file, or one of `shift`, `tower:N`,
/// `combined:h`, `combined:N`.
#[derive(Debug, Args)]
struct SpecArg {
    #[arg(long)]
    spec: String,
}

#[derive(Debug, Subcommand)]
enum PermCmd {
    /// Image of a point.
    Eval {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        x: u64,
        /// Apply the inverse instead.
        #[arg(long)]
        inverse: bool,
    },
    /// Displacement on a window, plus the symbolic bound when one exists.
    Disp {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        window: u64,
    },
    /// Cycle type on an invariant window, or the orbit of one point.
    Cycles {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        window: u64,
        #[arg(long)]
        x: Option<u64>,
    },
}

#[derive(Debug, Subcommand)]
enum ZooCmd {
    /// Level n of the tower.
    Tower {
        #[arg(long)]
        n: u32,
    },
    /// The commuting pair h and h_n.
    Combined {
        #[arg(long)]
        n: Option<u32>,
    },
    /// The shift permutation.
    Shift {
        /// Tabulate images on [1, window].
        #[arg(long, default_value_t = 12)]
        window: u64,
    },
}

#[derive(Debug, Subcommand)]
enum VerifyCmd {
    /// g_{n+1}^{n+1} = g_n on [1, window].
    Tower {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        window: u64,
    },
    /// ab = ba on [1, window].
    Commute {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        window: u64,
    },
}

#[derive(Debug, Subcommand)]
enum SepCmd {
    /// Whether Y separates x from y.
    Check {
        #[arg(long)]
        space: String,
        /// JSON array of point labels.
        #[arg(long = "Y")]
        y_set: String,
        #[arg(long)]
        r1: u64,
        #[arg(long)]
        r2: u64,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
}

#[derive(Debug, Subcommand)]
enum QiCmd {
    /// Check a certificate and report the least working m.
    Verify {
        #[arg(long)]
        cert: String,
        #[arg(long, default_value_t = DEFAULT_M_MAX)]
        m_max: u64,
        /// Also check the preimage bound at every vertex for radii up to this.
        #[arg(long, default_value_t = 0)]
        preimage_radius: u64,
    },
    /// Build a separator from the tree and check it.
    Separator {
        #[arg(long)]
        cert: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        r1: u64,
        #[arg(long)]
        r2: u64,
    },
}

#[derive(Debug, Subcommand)]
enum BoundsCmd {
    /// Constants t, r3 and s for a certificate.
    Compute {
        #[arg(long)]
        cert: String,
        #[arg(long)]
        r1: u64,
        #[arg(long = "r2p")]
        r2_prime: u64,
        #[arg(long)]
        n: u64,
    },
    /// Premises and conclusion of the bounded-cycles statement.
    Verify {
        #[arg(long)]
        instance: String,
    },
}

#[derive(Debug, Subcommand)]
enum RootsCmd {
    /// An n-th root on an invariant window.
    Find {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        window: u64,
        #[arg(long)]
        n: u64,
    },
}

#[derive(Debug, Subcommand)]
enum DemoCmd {
    /// Search windows [1, N] for an n-th root with small displacement.
    QSearch {
        /// `shift` or `tower:K`.
        #[arg(long, default_value = "shift")]
        g: String,
        #[arg(long)]
        n: u64,
        /// Displacement budget.
        #[arg(long)]
        r: u64,
        #[arg(long, default_value_t = 1)]
        min_window: u64,
        #[arg(long)]
        max_window: u64,
    },
}

/// Parses and runs one command line (including the program name).
pub fn run<I, T>(args: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(cli.command),
        Err(e) => usage_error(&e),
    }
}

/// Runs, prints and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    match Cli::try_parse_from(&args) {
        Ok(cli) => {
            let result = dispatch(cli.command);
            println!("{}", result.render(cli.json));
            result.status.exit_code()
        }
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            0
        }
        Err(e) => {
            let json = args.iter().any(|a| a == "--json");
            let result = usage_error(&e);
            if json {
                println!("{}", result.render(true));
            } else {
                eprint!("{e}");
            }
            result.status.exit_code()
        }
    }
}

fn usage_error(e: &clap::Error) -> CommandResult {
    let text = e.to_string();
    let first = text.lines().next().unwrap_or_default().to_string();
    CommandResult { status: Status::InvalidInput, payload: json!({ "error": first }), summary: text }
}

fn dispatch(command: Command) -> CommandResult {
    let outcome = match command {
        Command::Perm(c) => perm(c),
        Command::Zoo(c) => zoo(c),
        Command::Verify(c) => verify(c),
        Command::Sep(SepCmd::Check { space, y_set, r1, r2, x, y }) => sep_check(&space, &y_set, r1, r2, &x, &y),
        Command::Qi(c) => qi(c),
        Command::Bounds(c) => bounds(c),
        Command::Roots(RootsCmd::Find { spec, window, n }) => roots_find(&spec.spec, window, n),
        Command::Demo(DemoCmd::QSearch { g, n, r, min_window, max_window }) => {
            demo(&g, SearchBounds { n, displacement_budget: r, min_window, max_window })
        }
    };
    outcome.unwrap_or_else(|e| CommandResult::from_error(&e))
}

/// Inline JSON when the argument starts with `{` or `[`, otherwise a file path.
fn read_json_arg(arg: &str) -> Result<String> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|e| Error::Precondition(format!("cannot read `{arg}`: {e}")))
}

fn load_perm(arg: &str) -> Result<PermSpec> {
    if arg == "shift" {
        return Ok(make_shift());
    }
    if let Some(k) = arg.strip_prefix("tower:") {
        return Ok(make_tower(parse_level(k)?)?.spec);
    }
    if let Some(k) = arg.strip_prefix("combined:") {
        let combined = make_combined();
        return if k == "h" { Ok(combined.h) } else { combined.h_n(parse_level(k)?) };
    }
    PermSpec::from_json(&read_json_arg(arg)?)
}

fn parse_level(k: &str) -> Result<u32> {
    k.parse().map_err(|_| Error::Precondition(format!("bad level `{k}`")))
}

/// A space: `interval N`, `cycle N`, `cyclic N`, `free RANK RADIUS`, or JSON.
fn load_space(arg: &str) -> Result<FiniteMetricSpace> {
    let words: Vec<&str> = arg.split_whitespace().collect();
    let num = |s: &str| s.parse::<usize>().map_err(|_| Error::Precondition(format!("bad number `{s}`")));
    let spec = match words.as_slice() {
        ["interval", n] => SpaceSpec::Interval { n: num(n)? },
        ["cycle", n] => SpaceSpec::Cycle { n: num(n)? },
        ["cyclic", n] => SpaceSpec::WordMetric { group: GroupSpec::Cyclic { order: num(n)? } },
        ["free", rank, radius] => SpaceSpec::WordMetric {
            group: GroupSpec::Free {
                rank: num(rank)?.try_into().map_err(|_| Error::InvalidGroup("rank too large".into()))?,
                radius: num(radius)?.try_into().map_err(|_| Error::InvalidGroup("radius too large".into()))?,
            },
        },
        _ => serde_json::from_str(&read_json_arg(arg)?)?,
    };
    FiniteMetricSpace::from_spec(&spec)
}

fn load_cert(arg: &str) -> Result<QiCertificate> {
    QiCertificate::from_json(&read_json_arg(arg)?)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("payloads serialize")
}

fn perm(c: PermCmd) -> Result<CommandResult> {
    match c {
        PermCmd::Eval { spec, x, inverse } => {
            let g = load_perm(&spec.spec)?;
            let image = if inverse { g.apply_inverse(x)? } else { g.apply(x)? };
            Ok(CommandResult::pass(json!({ "x": x, "inverse": inverse, "image": image }), image.to_string()))
        }
        PermCmd::Disp { spec, window } => {
            let g = load_perm(&spec.spec)?;
            let report = g.displacement_bound(Window::new(window)?)?;
            let symbolic = report.symbolic.map_or("none".to_string(), |b| b.to_string());
            let summary =
                format!("max displacement on [1, {window}]: {}, symbolic bound: {symbolic}", report.window_sup);
            Ok(CommandResult::pass(to_value(&report), summary))
        }
        PermCmd::Cycles { spec, window, x } => {
            let g = load_perm(&spec.spec)?;
            let w = Window::new(window)?;
            if let Some(x) = x {
                let trace = trace_cycle(&g, x, w, None)?;
                let summary = match &trace {
                    CycleTrace::Closed { cycle } => {
                        format!("({})", cycle.iter().map(u64::to_string).collect::<Vec<_>>().join(" "))
                    }
                    CycleTrace::EscapesWindow { last } => format!("orbit of {x} leaves [1, {window}] after {last}"),
                    CycleTrace::BudgetExceeded { steps } => format!("orbit of {x} not closed after {steps} steps"),
                };
                let closed = matches!(trace, CycleTrace::Closed { .. });
                return Ok(CommandResult::verdict(closed, to_value(&trace), summary));
            }
            let perm = FinitePerm::from_spec(&g, w)?;
            let ct = perm.cycle_type();
            let order = ct.order();
            let payload = json!({
                "window": window,
                "cycle_type": to_value(&ct),
                "order": order.to_string(),
                "cycles": perm.to_string(),
            });
            Ok(CommandResult::pass(payload, format!("cycle type {ct}, order {order}")))
        }
    }
}

fn zoo(c: ZooCmd) -> Result<CommandResult> {
    match c {
        ZooCmd::Tower { n } => {
            let level = make_tower(n)?;
            let size = level.blocks().size();
            let first = FinitePerm::from_spec(&level.spec, Window::new(size)?)?;
            let payload = json!({
                "n": n,
                "block_size": size,
                "spec": to_value(&level.spec),
                "first_block": first.to_string(),
            });
            Ok(CommandResult::pass(payload, format!("g_{n}: blocks of size {size}, first block {first}")))
        }
        ZooCmd::Combined { n } => {
            let combined = make_combined();
            let mut payload = json!({ "h": to_value(&combined.h) });
            let mut summary = format!("h = {}", combined.h.to_json());
            if let Some(n) = n {
                let hn = combined.h_n(n)?;
                payload["h_n"] = to_value(&hn);
                payload["n"] = json!(n);
                let _ = write!(summary, "\nh_{n} = {}", hn.to_json());
            }
            Ok(CommandResult::pass(payload, summary))
        }
        ZooCmd::Shift { window } => {
            let g = make_shift();
            let images = g.window_images(Window::new(window)?)?;
            let table: Vec<String> = images.iter().enumerate().map(|(i, y)| format!("{}→{y}", i + 1)).collect();
            let payload = json!({ "spec": to_value(&g), "images": images });
            Ok(CommandResult::pass(payload, table.join(" ")))
        }
    }
}

fn verify(c: VerifyCmd) -> Result<CommandResult> {
    match c {
        VerifyCmd::Tower { n, window } => {
            let ok = tower_check(n, Window::new(window)?)?;
            let payload = json!({ "n": n, "window": window, "holds": ok });
            let summary = format!("g_{}^{} {} g_{n} on [1, {window}]", n + 1, n + 1, if ok { "=" } else { "≠" });
            Ok(CommandResult::verdict(ok, payload, summary))
        }
        VerifyCmd::Commute { a, b, window } => {
            let ok = commute_on_window(&load_perm(&a)?, &load_perm(&b)?, Window::new(window)?)?;
            let payload = json!({ "window": window, "commute": ok });
            let summary = format!("{} on [1, {window}]", if ok { "commute" } else { "do not commute" });
            Ok(CommandResult::verdict(ok, payload, summary))
        }
    }
}

fn sep_check(space: &str, y_set: &str, r1: u64, r2: u64, x: &str, y: &str) -> Result<CommandResult> {
    let space = load_space(space)?;
    let labels: Vec<Label> = serde_json::from_str(y_set)?;
    let separator = labels.iter().map(|l| space.point(&l.0)).collect::<Result<Vec<_>>>()?;
    let query = SepQuery { separator, r1, r2, x: space.point(x)?, y: space.point(y)? };
    let ok = space.sep_check(&query);
    let payload = json!({
        "separates": ok,
        "Y": labels.iter().map(|l| l.0.clone()).collect::<Vec<_>>(),
        "r1": r1,
        "r2": r2,
        "x": x,
        "y": y,
    });
    let summary = if ok {
        format!("Y separates {x} from {y} at scale {r1} with fuzz {r2}")
    } else {
        format!("an {r1}-chain from B({x}, {r2}) to B({y}, {r2}) avoids Y")
    };
    Ok(CommandResult::verdict(ok, payload, summary))
}

fn qi(c: QiCmd) -> Result<CommandResult> {
    match c {
        QiCmd::Verify { cert, m_max, preimage_radius } => {
            let cert = load_cert(&cert)?;
            let verdict = verify_qi(&cert);
            let least = minimal_m(cert.space(), cert.tree(), cert.map(), m_max);
            let mut preimage_ok = true;
            let mut worst = Vec::new();
            for radius in 1..=preimage_radius {
                for p in 0..cert.tree().len() {
                    let count = preimage_bound_check(&cert, p, radius);
                    if !count.holds {
                        preimage_ok = false;
                        worst.push(to_value(&count));
                    }
                }
            }
            let ok = verdict.holds && preimage_ok;
            let payload = json!({
                "verdict": to_value(&verdict),
                "ell": cert.ell(),
                "m": cert.m(),
                "q": cert.q(),
                "minimal_m": least,
                "preimage_radius": preimage_radius,
                "preimage_failures": worst,
            });
            let mut summary = match &verdict.violation {
                None => format!("certificate holds with ell = {}, m = {}, q = {}", cert.ell(), cert.m(), cert.q()),
                Some(v) => format!("certificate fails: {}", serde_json::to_string(v).expect("serializes")),
            };
            match least {
                Some(m) => {
                    let _ = write!(summary, "\nleast m for the distance bounds: {m}");
                }
                None => {
                    let _ = write!(summary, "\nno m ≤ {m_max} satisfies the distance bounds");
                }
            }
            if preimage_radius > 0 {
                let _ = write!(
                    summary,
                    "\npreimage bound for R ≤ {preimage_radius}: {}",
                    if preimage_ok { "holds at every vertex" } else { "fails" }
                );
            }
            Ok(CommandResult::verdict(ok, payload, summary))
        }
        QiCmd::Separator { cert, x, y, r1, r2 } => {
            let cert = load_cert(&cert)?;
            let space = cert.space();
            let (xi, yi) = (space.point(&x)?, space.point(&y)?);
            let sep = separator_from_tree(&cert, xi, yi, r1, r2)?;
            let query = SepQuery { separator: sep.indices.clone(), r1, r2, x: xi, y: yi };
            let separates = space.sep_check(&query);
            let within = num_bigint::BigUint::from(sep.points.len()) <= sep.budget;
            let ok = separates && within;
            let payload = json!({
                "separator": to_value(&sep),
                "size": sep.points.len(),
                "separates": separates,
                "within_budget": within,
            });
            let summary = format!(
                "Y = preimage of B({}, {}): {} points (budget {}), {}",
                sep.midpoint,
                sep.radius,
                sep.points.len(),
                sep.budget,
                if separates { "separates" } else { "does not separate" }
            );
            Ok(CommandResult::verdict(ok, payload, summary))
        }
    }
}

fn constants_table(r: &BoundReport) -> String {
    let rows = [
        ("r2", "n·r2'", r.r2.to_string()),
        ("t", "ell^(m·r1 + m + 2)·q", r.t.to_string()),
        ("r3", "m²·(2·r1 + 2·r2 + 3)", r.r3.to_string()),
        ("s", "max_x |B(x, r3)|", r.s.to_string()),
        ("n ≥ t+1", "n > t", if r.triggers { "yes".into() } else { "no".into() }),
    ];
    let mut out = format!("r1 = {}, r2' = {}, n = {}", r.r1, r.r2_prime, r.n);
    for (name, formula, value) in rows {
        let _ = write!(out, "\n{name:<8} {formula:<24} {value}");
    }
    out
}

/// `g1` and `g2` in a bounds instance: cycles of point labels, or a
/// permutation of `[1, N]` for spaces labelled `1, …, N` in order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PermInput {
    Cycles(Vec<Vec<Label>>),
    Named(String),
    Spec(PermSpec),
}

/// Input of `bounds verify`. Omitted `r1`, `r2_prime` default to the
/// measured displacements rounded up (at least 1).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsInstance {
    pub certificate: CertificateSpec,
    pub g1: PermInput,
    pub g2: PermInput,
    pub n: u64,
    #[serde(default)]
    pub r1: Option<u64>,
    #[serde(default)]
    pub r2_prime: Option<u64>,
}

fn resolve_perm(space: &FiniteMetricSpace, input: &PermInput) -> Result<FinitePerm> {
    match input {
        PermInput::Cycles(cycles) => {
            let cycles = cycles
                .iter()
                .map(|c| c.iter().map(|l| space.point(&l.0)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            FinitePerm::from_cycles(space.len(), &cycles)
        }
        PermInput::Named(_) | PermInput::Spec(_) => {
            let numbered = space.labels().iter().enumerate().all(|(i, l)| *l == (i + 1).to_string());
            if !numbered {
                return Err(Error::Precondition("permutation specs need points labelled 1, …, N".into()));
            }
            let spec = match input {
                PermInput::Named(name) => load_perm(name)?,
                PermInput::Spec(spec) => spec.clone(),
                PermInput::Cycles(_) => unreachable!(),
            };
            FinitePerm::from_spec(&spec, Window::new(space.len() as u64)?)
        }
    }
}

fn bounds(c: BoundsCmd) -> Result<CommandResult> {
    match c {
        BoundsCmd::Compute { cert, r1, r2_prime, n } => {
            let cert = load_cert(&cert)?;
            let report = compute_constants(&cert, r1, r2_prime, n)?;
            Ok(CommandResult::pass(to_value(&report), constants_table(&report)))
        }
        BoundsCmd::Verify { instance } => {
            let inst: BoundsInstance = serde_json::from_str(&read_json_arg(&instance)?)?;
            let cert = QiCertificate::from_spec(&inst.certificate)?;
            let space = cert.space();
            let g1 = resolve_perm(space, &inst.g1)?;
            let g2 = resolve_perm(space, &inst.g2)?;
            let measured = |g: &FinitePerm| displacement(space, g).halves().div_ceil(2).max(1);
            let r1 = inst.r1.unwrap_or_else(|| measured(&g1));
            let r2_prime = inst.r2_prime.unwrap_or_else(|| measured(&g2));
            let report = compute_constants(&cert, r1, r2_prime, inst.n)?;
            let verdict = verify_bounded_cycles(&cert, &g1, &g2, inst.n, &report)?;
            let mut summary = constants_table(&report);
            for p in &verdict.premises {
                let _ = write!(summary, "\n[{}] {}: {}", if p.holds { "ok" } else { "no" }, p.premise, p.detail);
            }
            let _ = write!(
                summary,
                "\nlargest cycle support {} {} s = {}; premises {}",
                verdict.max_cycle_support,
                if verdict.conclusion_holds { "≤" } else { ">" },
                verdict.s,
                if verdict.all_premises { "all hold" } else { "not all hold" }
            );
            let payload = json!({ "constants": to_value(&report), "verdict": to_value(&verdict) });
            Ok(CommandResult::verdict(verdict.conclusion_holds, payload, summary))
        }
    }
}

fn roots_find(spec: &str, window: u64, n: u64) -> Result<CommandResult> {
    let g = load_perm(spec)?;
    let w = Window::new(window)?;
    let ct = cycle_type_on_window(&g, w)?;
    match nth_root_of_perm(&g, w, n) {
        Ok(root) => {
            let perm = FinitePerm::from_spec(&root, w)?;
            let payload = json!({ "n": n, "window": window, "cycle_type": to_value(&ct), "root": to_value(&root) });
            Ok(CommandResult::pass(payload, format!("{} root on [1, {window}]: {perm}", ordinal(n))))
        }
        Err(Error::NoRoot { .. }) => {
            let payload = json!({ "n": n, "window": window, "cycle_type": to_value(&ct), "root": null });
            Ok(CommandResult::verdict(false, payload, format!("cycle type {ct} has no {} root", ordinal(n))))
        }
        Err(e) => Err(e),
    }
}

fn demo(g: &str, bounds: SearchBounds) -> Result<CommandResult> {
    let spec = match g {
        "shift" => make_shift(),
        _ => match g.strip_prefix("tower:") {
            Some(k) => make_tower(parse_level(k)?)?.spec,
            None => return Err(Error::Precondition(format!("q-search takes `shift` or `tower:K`, got `{g}`"))),
        },
    };
    let report = q_search(g, &spec, bounds)?;
    // NOT-FOUND is the expected outcome of the demonstration, not a failure
    Ok(CommandResult::pass(to_value(&report), report.statement.clone()))
}
