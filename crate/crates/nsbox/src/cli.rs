//! The `nsbox` command line: argument parsing, dispatch and exit codes.

use std::io::{Read, Write};

use clap::{Parser, Subcommand, ValueEnum};
use nsbox_core::boxes::{make_family, make_vertex};
use nsbox_core::inequalities::{chsh_report, violation_report};
use nsbox_core::membership::{classify, lp_feasible, verify_witness, Polytope};
use nsbox_core::strengths::{g_quantity, q_quantity, strength_lp, StrengthReport};
use nsbox_core::superlocality::{
    appendix_decomposition, bipartite_flatten, bipartite_verdict, genuine_report, superlocality_verdict,
    verify_bipartite_verdict, verify_rank_certificate, verify_verdict, AppendixKind, GenuineReport, RankCertificate,
    Status,
};
use nsbox_core::{AnyBox, Cut, Family, Scalar, TripartiteBox, VertexLabel};
use serde_json::Value;

use crate::json;
use crate::quantum::{born_box, gghz_state, preset_settings, snap_to_exact, Preset, SnapOptions};

#[derive(Debug, Parser)]
#[command(name = "nsbox", version, about = "Exact analysis of tripartite nonsignaling boxes")]
pub struct Cli {
    /// Print a human-readable summary on stderr.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit a family box, a polytope vertex or an appendix decomposition.
    Gen {
        /// svf, mf, white, bb84 or chsh.
        #[arg(long, conflicts_with_all = ["vertex", "appendix"])]
        family: Option<String>,
        /// Exact parameter such as 1/2 or 0+1/2*sqrt2.
        #[arg(long)]
        param: Option<String>,
        /// Vertex label such as D:000000, T23:01101, S:0000 or M:1110.
        #[arg(long, conflicts_with = "appendix")]
        vertex: Option<String>,
        #[arg(long, value_enum)]
        appendix: Option<AppendixArg>,
    },
    /// Svetlichny and Mermin values (CHSH for a two-party box).
    Eval {
        #[arg(long = "in", value_name = "FILE")]
        input: String,
    },
    /// Membership in L, L2 and R with exact witnesses.
    Membership {
        #[arg(long = "in", value_name = "FILE")]
        input: String,
        /// Test a single polytope: L, L2 or R.
        #[arg(long)]
        polytope: Option<String>,
    },
    /// Svetlichny and Mermin strengths of a box in R.
    Strength {
        #[arg(long = "in", value_name = "FILE")]
        input: String,
    },
    /// Superlocality verdicts at shared-randomness dimension `d`.
    Superlocal {
        #[arg(long = "in", value_name = "FILE")]
        input: String,
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Restrict to one cut: A|BC, B|AC or C|AB.
        #[arg(long)]
        cut: Option<String>,
    },
    /// Born-rule box of a three-qubit state, snapped to exact values.
    Quantum {
        /// GGHZ angle: a number, or pi/N, K*pi/N.
        #[arg(long, conflicts_with = "state", required_unless_present = "state")]
        theta: Option<String>,
        /// State JSON file with amplitudes or a density matrix.
        #[arg(long)]
        state: Option<String>,
        #[arg(long, value_enum, default_value_t = PresetArg::Svetlichny, conflicts_with = "settings")]
        preset: PresetArg,
        /// Settings JSON file with Bloch vectors per party and input.
        #[arg(long)]
        settings: Option<String>,
        #[arg(long, default_value_t = SnapOptions::default().denominator)]
        denominator: u32,
        #[arg(long, default_value_t = SnapOptions::default().tolerance)]
        tolerance: f64,
        /// Emit the unsnapped floating-point box.
        #[arg(long)]
        float: bool,
    },
    /// Check a witness, certificate or report against a box.
    Verify {
        #[arg(long, value_name = "FILE")]
        witness: String,
        #[arg(long = "in", value_name = "FILE")]
        input: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AppendixArg {
    /// Svetlichny family with CHSH-local pair factors.
    A,
    /// Mermin family with CHSH-local pair factors.
    C,
    /// Mermin family with noisy PR-box pair factors.
    D,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PresetArg {
    Svetlichny,
    Mermin,
    MerminGhz,
}

#[derive(Debug)]
pub enum CliError {
    /// Malformed flags or input files; exit code 2.
    Usage(String),
    /// Well-formed input the analysis rejects; exit code 1.
    Domain(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => m,
        }
    }
}

impl From<json::JsonError> for CliError {
    fn from(e: json::JsonError) -> Self {
        CliError::Usage(e.0)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn domain(msg: impl ToString) -> CliError {
    CliError::Domain(msg.to_string())
}

/// Standard streams, injectable for tests.
pub struct Io<'a> {
    pub stdin: &'a mut dyn Read,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = io.stderr.write_all(text.as_bytes());
                2
            } else {
                let _ = io.stdout.write_all(text.as_bytes());
                0
            };
        }
    };
    match dispatch(&cli, io) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.stderr, "error: {}", e.message());
            e.code()
        }
    }
}

fn read_source(path: &str, stdin: &mut dyn Read) -> Result<String, CliError> {
    let mut text = String::new();
    if path == "-" {
        stdin.read_to_string(&mut text).map_err(|e| usage(format!("reading stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| usage(format!("reading {path}: {e}")))?;
    }
    Ok(text)
}

fn read_json(path: &str, stdin: &mut dyn Read) -> Result<Value, CliError> {
    let text = read_source(path, stdin)?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{path}: {e}")))
}

fn read_box(path: &str, stdin: &mut dyn Read) -> Result<AnyBox, CliError> {
    Ok(json::box_from_json(&read_json(path, stdin)?)?)
}

fn read_tripartite(path: &str, stdin: &mut dyn Read) -> Result<TripartiteBox, CliError> {
    match read_box(path, stdin)? {
        AnyBox::Tripartite(b) => Ok(b),
        AnyBox::Bipartite(_) => Err(usage("this command needs a three-party box")),
    }
}

fn parse_scalar(s: &str) -> Result<Scalar, CliError> {
    s.parse().map_err(|_| usage(format!("malformed exact number {s:?}; use p/q or p/q+r/s*sqrt2")))
}

/// A float, or `pi`, `pi/N`, `K*pi/N`.
fn parse_angle(s: &str) -> Result<f64, CliError> {
    let bad = || usage(format!("malformed angle {s:?}"));
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (s, 1.0),
    };
    let k = match num.strip_suffix("pi") {
        Some("") => 1.0,
        Some(k) => k.strip_suffix('*').unwrap_or(k).parse::<f64>().map_err(|_| bad())?,
        None => return Err(bad()),
    };
    Ok(k * std::f64::consts::PI / den)
}

fn emit(io: &mut Io<'_>, v: &Value) -> Result<(), CliError> {
    io.stdout.write_all(json::to_text(v).as_bytes()).map_err(|e| usage(format!("writing output: {e}")))
}

fn note(io: &mut Io<'_>, verbose: bool, msg: impl std::fmt::Display) {
    if verbose {
        let _ = writeln!(io.stderr, "{msg}");
    }
}

fn dispatch(cli: &Cli, io: &mut Io<'_>) -> Result<i32, CliError> {
    let verbose = cli.verbose;
    match &cli.command {
        Command::Gen { family, param, vertex, appendix } => {
            let param = param.as_deref().map(parse_scalar).transpose()?;
            let out = if let Some(f) = family {
                let f: Family = f.parse().map_err(|_| usage(format!("unknown family {f:?}")))?;
                json::box_to_json(&make_family(f, param.as_ref()).map_err(domain)?)
            } else if let Some(v) = vertex {
                let label: VertexLabel = v.parse().map_err(|_| usage(format!("malformed vertex label {v:?}")))?;
                json::tripartite_to_json(&make_vertex(&label))
            } else if let Some(a) = appendix {
                let kind = match a {
                    AppendixArg::A => AppendixKind::SvfA,
                    AppendixArg::C => AppendixKind::MfC,
                    AppendixArg::D => AppendixKind::MfD,
                };
                let p = param.ok_or_else(|| usage("--appendix needs --param"))?;
                json::decomposition_to_json(&appendix_decomposition(kind, &p).map_err(domain)?)
            } else {
                return Err(usage("gen needs one of --family, --vertex or --appendix"));
            };
            emit(io, &out)?;
        }
        Command::Eval { input } => {
            let values = match read_box(input, io.stdin)? {
                AnyBox::Tripartite(b) => violation_report(&b),
                AnyBox::Bipartite(b) => chsh_report(&b),
            };
            let violated = values.iter().filter(|v| v.violated).count();
            note(io, verbose, format!("{violated} of {} inequalities violated", values.len()));
            emit(io, &json::inequalities_to_json(&values))?;
        }
        Command::Membership { input, polytope } => {
            let b = read_tripartite(input, io.stdin)?;
            if let Some(p) = polytope {
                let p: Polytope = p.parse().map_err(|_| usage(format!("unknown polytope {p:?}; use L, L2 or R")))?;
                if !b.validate().is_valid() {
                    return Err(domain("box is not a valid nonsignaling box"));
                }
                let w = lp_feasible(&b, p);
                note(io, verbose, format!("{} {p}", if w.feasible { "in" } else { "not in" }));
                emit(io, &json::witness_to_json(&w))?;
            } else {
                let r = classify(&b);
                note(io, verbose, format!("NS {} R {} L2 {} L {}", r.nonsignaling, r.in_r, r.in_l2, r.in_l));
                emit(io, &json::membership_report_to_json(&r))?;
            }
        }
        Command::Strength { input } => {
            let b = read_tripartite(input, io.stdin)?;
            let r = strength_lp(&b).map_err(domain)?;
            note(io, verbose, format!("Svetlichny {} Mermin {}", r.svetlichny_strength, r.mermin_strength));
            emit(io, &json::strength_to_json(&r))?;
        }
        Command::Superlocal { input, d, cut } => {
            if *d == 0 {
                return Err(usage("--d must be at least 1"));
            }
            match read_box(input, io.stdin)? {
                AnyBox::Tripartite(b) => {
                    if !b.validate().is_valid() {
                        return Err(domain("box is not a valid nonsignaling box"));
                    }
                    if let Some(c) = cut {
                        let c: Cut = c.parse().map_err(|_| usage(format!("unknown cut {c:?}")))?;
                        emit(io, &json::verdict_to_json(&superlocality_verdict(&b, c, *d)))?;
                    } else {
                        let r = genuine_report(&b, *d);
                        note(io, verbose, format!("genuine {} absolute {}", r.genuine, r.absolute));
                        emit(io, &json::genuine_to_json(&r))?;
                    }
                }
                AnyBox::Bipartite(b) => {
                    if cut.is_some() {
                        return Err(usage("--cut applies to three-party boxes"));
                    }
                    if !b.validate().is_valid() {
                        return Err(domain("box is not a valid nonsignaling box"));
                    }
                    emit(io, &json::bipartite_verdict_to_json(&bipartite_verdict(&b, *d)))?;
                }
            }
        }
        Command::Quantum { theta, state, preset, settings, denominator, tolerance, float } => {
            let state = match (theta, state) {
                (Some(t), _) => gghz_state(parse_angle(t)?),
                (None, Some(path)) => json::state_from_json(&read_json(path, io.stdin)?)?,
                (None, None) => return Err(usage("quantum needs --theta or --state")),
            };
            let settings = match settings {
                Some(path) => json::settings_from_json(&read_json(path, io.stdin)?)?,
                None => preset_settings(match preset {
                    PresetArg::Svetlichny => Preset::Svetlichny,
                    PresetArg::Mermin => Preset::Mermin,
                    PresetArg::MerminGhz => Preset::MerminGhz,
                }),
            };
            let fbox = born_box(&state, &settings);
            if *float {
                emit(io, &json::float_box_to_json(&fbox))?;
            } else {
                let opts = SnapOptions { denominator: *denominator, tolerance: *tolerance };
                let exact = snap_to_exact(&fbox, opts).map_err(domain)?;
                emit(io, &json::tripartite_to_json(&exact))?;
            }
        }
        Command::Verify { witness, input } => {
            if witness == "-" && input == "-" {
                return Err(usage("only one of --witness and --in can read stdin"));
            }
            let doc = read_json(witness, io.stdin)?;
            let b = read_box(input, io.stdin)?;
            let ok = verify_document(&doc, &b)?;
            note(io, verbose, if ok { "valid" } else { "INVALID" });
            return Ok(if ok { 0 } else { 1 });
        }
    }
    Ok(0)
}

fn need_tripartite(b: &AnyBox) -> Result<&TripartiteBox, CliError> {
    match b {
        AnyBox::Tripartite(t) => Ok(t),
        AnyBox::Bipartite(_) => Err(usage("this witness refers to a three-party box")),
    }
}

/// Exact check of any document the CLI emits, or a bare rank certificate,
/// against `b`.
pub fn verify_document(doc: &Value, b: &AnyBox) -> Result<bool, CliError> {
    let has = |k: &str| doc.get(k).is_some();
    if has("inequalities") {
        let claimed = json::inequalities_from_json(doc)?;
        let actual = match b {
            AnyBox::Tripartite(t) => violation_report(t),
            AnyBox::Bipartite(p) => chsh_report(p),
        };
        return Ok(claimed == actual.iter().map(json::inequality_key).collect::<Vec<_>>());
    }
    if has("witnesses") {
        let r = json::membership_report_from_json(doc)?;
        let t = need_tripartite(b)?;
        return Ok(verify_membership_report(t, &r));
    }
    if has("polytope") {
        return Ok(verify_witness(need_tripartite(b)?, &json::witness_from_json(doc)?));
    }
    if has("svetlichny_strength") {
        return Ok(verify_strength(need_tripartite(b)?, &json::strength_from_json(doc)?));
    }
    if has("verdicts") {
        return Ok(verify_genuine(need_tripartite(b)?, &json::genuine_from_json(doc)?));
    }
    if has("status") {
        return Ok(match b {
            AnyBox::Tripartite(t) => verify_verdict(t, &json::verdict_from_json(doc)?),
            AnyBox::Bipartite(p) => verify_bipartite_verdict(p, &json::bipartite_verdict_from_json(doc)?),
        });
    }
    if has("terms") {
        return Ok(if has("cut") {
            json::decomposition_from_json(doc)?.verify(need_tripartite(b)?)
        } else {
            match b {
                AnyBox::Bipartite(p) => json::bipartite_decomposition_from_json(doc)?.verify(p),
                AnyBox::Tripartite(_) => return Err(usage("a cut-free decomposition refers to a two-party box")),
            }
        });
    }
    if has("rank") {
        let cert = RankCertificate {
            rank: doc["rank"].as_u64().ok_or_else(|| usage("\"rank\" must be an integer"))? as usize,
            d: doc.get("d").and_then(Value::as_u64).ok_or_else(|| usage("\"d\" must be an integer"))? as usize,
        };
        return Ok(match b {
            AnyBox::Tripartite(t) => {
                // without a cut the certificate claims every cut
                let cuts = match doc.get("cut").and_then(Value::as_str) {
                    Some(c) => vec![c.parse::<Cut>().map_err(|_| usage(format!("unknown cut {c:?}")))?],
                    None => Cut::ALL.to_vec(),
                };
                cuts.iter().all(|&c| verify_rank_certificate(t, c, &cert))
            }
            AnyBox::Bipartite(p) => cert.rank > cert.d && bipartite_flatten(p).rank_by_columns() == cert.rank,
        });
    }
    if has("parties") {
        return Ok(json::box_from_json(doc)? == *b);
    }
    Err(usage("unrecognized witness document"))
}

fn verify_membership_report(b: &TripartiteBox, r: &nsbox_core::membership::MembershipReport) -> bool {
    if r.nonsignaling != b.validate().is_valid() {
        return false;
    }
    if !r.nonsignaling {
        return r.witnesses.is_empty() && !r.in_r && !r.in_l2 && !r.in_l;
    }
    let expected = [(Polytope::SvetlichnyBox, r.in_r), (Polytope::TwoLocal, r.in_l2), (Polytope::Local, r.in_l)];
    r.witnesses.len() == 3
        && r.witnesses.iter().zip(expected).all(|(w, (p, flag))| w.polytope == p && w.feasible == flag && verify_witness(b, w))
}

/// The report must recompose the box from its two components and a residual
/// that carries a valid R witness.
fn verify_strength(b: &TripartiteBox, r: &StrengthReport) -> bool {
    let mu = &r.svetlichny_strength;
    let nu = &r.mermin_strength;
    let rest = Scalar::one() - mu - nu;
    if mu.is_negative() || nu.is_negative() || rest.is_negative() {
        return false;
    }
    let component = |w: &Scalar, label: Option<VertexLabel>| match label {
        Some(l) => Some(make_vertex(&l)),
        None if w.is_zero() => Some(nsbox_core::boxes::white_noise()),
        None => None,
    };
    let (Some(sv), Some(m)) = (
        component(mu, r.svetlichny_label.map(VertexLabel::Svetlichny)),
        component(nu, r.mermin_label.map(VertexLabel::Mermin)),
    ) else {
        return false;
    };
    let w = &r.residual_witness;
    if !(w.feasible && w.polytope == Polytope::SvetlichnyBox && verify_witness(&r.residual, w)) {
        return false;
    }
    if r.balanced && !(g_quantity(&r.residual).is_zero() && q_quantity(&r.residual).is_zero()) {
        return false;
    }
    TripartiteBox::combine(&[(mu, &sv), (nu, &m), (&rest, &r.residual)]) == *b
}

fn verify_genuine(b: &TripartiteBox, r: &GenuineReport) -> bool {
    r.verdicts.len() == 3
        && r.verdicts.iter().zip(Cut::ALL).all(|(v, c)| v.cut == Some(c) && v.d == r.d && verify_verdict(b, v))
        && r.genuine == r.verdicts.iter().all(|v| v.status == Status::Superlocal)
        && r.absolute == r.verdicts.iter().any(|v| v.status == Status::Superlocal)
}
