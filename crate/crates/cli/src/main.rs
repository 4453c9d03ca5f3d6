//! `opensess`: batch front end for the open multiparty session workbench.
//!
//! Exit codes: 0 when the checked property holds, 1 when the input is fine
//! but the answer is negative, 2 for unreadable or ill-formed input.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use opensess::compose::{
    compatible, compatible_globals, compatible_sessions, connect_sessions, verify_connection, ComposeError,
};
use opensess::parser::{
    parse_global_in, parse_process_in, parse_session_in, print_global, print_process, print_session,
};
use opensess::semantics::{explore, lock_report, simulate, ExploreOptions, RunStatus, DEFAULT_STATE_BOUND};
use opensess::typing::{project, typecheck, well_formed, TypingError, TypingMode};
use opensess::{GlobalType, Participant, Process, Session, Store};

const STATE_BOUND_VAR: &str = "MPST_STATE_BOUND";

#[derive(Parser)]
#[command(name = "opensess", version, about = "Check, run and compose multiparty sessions")]
struct Cli {
    /// Print a JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Standard,
    Plus,
}

impl From<ModeArg> for TypingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Standard => TypingMode::Standard,
            ModeArg::Plus => TypingMode::Plus,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check that a global type is well formed.
    Check { file: PathBuf },
    /// Project a global type onto a participant.
    Project {
        file: PathBuf,
        #[arg(long, short)]
        participant: String,
    },
    /// Check a session against a global type.
    Type {
        file: PathBuf,
        #[arg(long)]
        against: PathBuf,
        #[arg(long, value_enum, default_value = "standard")]
        mode: ModeArg,
    },
    /// Check two processes for interface compatibility.
    Compat { left: PathBuf, right: PathBuf },
    /// Connect two sessions by turning two interface participants into gateways.
    Compose {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        /// Interface participants as `h,k`.
        #[arg(long)]
        via: String,
        #[arg(long, requires = "right_type")]
        left_type: Option<PathBuf>,
        #[arg(long, requires = "left_type")]
        right_type: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "standard")]
        mode: ModeArg,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run a session for a bounded number of steps.
    Simulate {
        file: PathBuf,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the full reachable state graph in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Decide lock-freedom by exploring every reachable state.
    Lockfree { file: PathBuf },
}

struct Outcome {
    code: u8,
    text: String,
    json: Value,
}

impl Outcome {
    fn new(holds: bool, text: String, json: Value) -> Self {
        Outcome { code: if holds { 0 } else { 1 }, text, json }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli.command).unwrap_or_else(|e| Outcome {
        code: 2,
        text: format!("error: {e:#}"),
        json: json!({ "ok": false, "error": format!("{e:#}") }),
    });
    let mut out = std::io::stdout().lock();
    let _ = if cli.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&outcome.json).expect("values serialize"))
    } else if outcome.code == 2 {
        writeln!(std::io::stderr(), "{}", outcome.text)
    } else {
        writeln!(out, "{}", outcome.text.trim_end())
    };
    ExitCode::from(outcome.code)
}

fn run(command: &Command) -> Result<Outcome> {
    let mut st = Store::new();
    match command {
        Command::Check { file } => check(&mut st, file),
        Command::Project { file, participant } => project_cmd(&mut st, file, participant),
        Command::Type { file, against, mode } => type_cmd(&mut st, file, against, (*mode).into()),
        Command::Compat { left, right } => compat(&mut st, left, right),
        Command::Compose { left, right, via, left_type, right_type, mode, out_dir } => {
            let (h, k) = parse_via(via)?;
            let types = left_type.as_deref().zip(right_type.as_deref());
            compose(&mut st, left, right, &h, &k, types, (*mode).into(), out_dir)
        }
        Command::Simulate { file, steps, seed, dot } => simulate_cmd(&mut st, file, *steps, *seed, dot.as_deref()),
        Command::Lockfree { file } => lockfree(&mut st, file),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_process(st: &mut Store, path: &Path) -> Result<Process> {
    Ok(parse_process_in(st, &read(path)?, path)?)
}

fn load_global(st: &mut Store, path: &Path) -> Result<GlobalType> {
    Ok(parse_global_in(st, &read(path)?, path)?)
}

fn load_session(st: &mut Store, path: &Path) -> Result<Session> {
    Ok(parse_session_in(st, &read(path)?, path)?)
}

fn participant(name: &str) -> Result<Participant> {
    Participant::try_new(name).ok_or_else(|| anyhow!("`{name}` is not a participant name"))
}

fn parse_via(via: &str) -> Result<(Participant, Participant)> {
    let Some((h, k)) = via.split_once(',') else {
        bail!("--via expects two participants separated by a comma, got `{via}`");
    };
    Ok((participant(h.trim())?, participant(k.trim())?))
}

fn explore_options() -> Result<ExploreOptions> {
    let max_states = match std::env::var(STATE_BOUND_VAR) {
        Ok(v) => v.parse().with_context(|| format!("{STATE_BOUND_VAR} must be a number, got `{v}`"))?,
        Err(_) => DEFAULT_STATE_BOUND,
    };
    Ok(ExploreOptions { max_states })
}

fn check(st: &mut Store, file: &Path) -> Result<Outcome> {
    let g = load_global(st, file)?;
    let report = well_formed(st, g);
    let mut text = String::new();
    for c in &report.participants {
        let projection = match &c.projection {
            Ok(_) => "projectable".to_string(),
            Err(e) => format!("not projectable ({:?})", e.reason),
        };
        text.push_str(&format!("{}: depth {}, {projection}\n", c.participant, c.depth));
    }
    if report.ok {
        text.push_str("well formed\n");
    } else {
        let reasons: Vec<String> = report
            .participants
            .iter()
            .filter(|c| !c.ok())
            .map(|c| match &c.projection {
                Ok(_) => format!("depth({})={}", c.participant, c.depth),
                Err(e) => format!("projection({}): {:?}", c.participant, e.reason),
            })
            .collect();
        text.push_str(&format!("not well formed: {}\n", reasons.join(", ")));
    }
    Ok(Outcome::new(report.ok, text, report.to_json(st)))
}

fn project_cmd(st: &mut Store, file: &Path, who: &str) -> Result<Outcome> {
    let g = load_global(st, file)?;
    let p = participant(who)?;
    Ok(match project(st, g, &p) {
        Ok(local) => {
            let text = print_process(st, local);
            let json = json!({ "ok": true, "participant": p, "projection": text });
            Outcome::new(true, text, json)
        }
        Err(e) => {
            let json = json!({
                "ok": false,
                "participant": p,
                "error": e.reason,
                "global_node": e.global_node.index(),
            });
            Outcome::new(false, e.to_string(), json)
        }
    })
}

fn type_cmd(st: &mut Store, file: &Path, against: &Path, mode: TypingMode) -> Result<Outcome> {
    let m = load_session(st, file)?;
    let g = load_global(st, against)?;
    let report = match typecheck(st, &m, g, mode) {
        Ok(r) => r,
        Err(TypingError::IllFormedGlobalType(wf)) => {
            let bad: Vec<String> = wf.participants.iter().filter(|c| !c.ok()).map(|c| c.participant.to_string()).collect();
            bail!("{} is not well formed (participants: {})", against.display(), bad.join(", "));
        }
    };
    let mut text = String::new();
    for f in &report.failures {
        text.push_str(&format!(
            "{}: {} is not below the projection {}\n",
            f.participant,
            print_process(st, f.actual),
            print_process(st, f.expected)
        ));
    }
    for p in &report.missing {
        text.push_str(&format!("{p}: participant of the global type has no process\n"));
    }
    text.push_str(if report.ok { "typed\n" } else { "not typed\n" });
    Ok(Outcome::new(report.ok, text, report.to_json(st)))
}

fn compat(st: &mut Store, left: &Path, right: &Path) -> Result<Outcome> {
    let a = load_process(st, left)?;
    let b = load_process(st, right)?;
    let holds = compatible(st, a, b);
    let text = if holds { "compatible" } else { "not compatible" };
    Ok(Outcome::new(holds, text.to_string(), json!({ "ok": holds })))
}

#[allow(clippy::too_many_arguments)]
fn compose(
    st: &mut Store,
    left: &Path,
    right: &Path,
    h: &Participant,
    k: &Participant,
    types: Option<(&Path, &Path)>,
    mode: TypingMode,
    out_dir: &Path,
) -> Result<Outcome> {
    let m = load_session(st, left)?;
    let m2 = load_session(st, right)?;
    let globals = match types {
        Some((l, r)) => Some((load_global(st, l)?, load_global(st, r)?)),
        None => None,
    };
    if !compatible_sessions(st, &m, h, &m2, k) {
        let reason = if !m.participants().is_disjoint(&m2.participants()) {
            "the sessions share participants".to_string()
        } else if m.get(h).is_none() || m2.get(k).is_none() {
            format!("{h} or {k} is not bound")
        } else {
            format!("the processes of {h} and {k} are not compatible")
        };
        let json = json!({ "ok": false, "reason": reason });
        return Ok(Outcome::new(false, format!("cannot connect: {reason}"), json));
    }
    std::fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    let write = |name: &str, contents: String| -> Result<PathBuf> {
        let path = out_dir.join(name);
        std::fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    };

    let Some((g, g2)) = globals else {
        let composed = connect_sessions(st, &m, h, &m2, k)?;
        let text = print_session(st, &composed);
        let path = write("composed.sess", format!("{text}\n"))?;
        let json = json!({ "ok": true, "composed_session": text, "files": [path] });
        return Ok(Outcome::new(true, format!("{text}\nwritten to {}", path.display()), json));
    };

    if !compatible_globals(st, g, h, g2, k)? {
        let json = json!({ "ok": false, "reason": "the global types are not compatible" });
        return Ok(Outcome::new(false, "cannot connect: the global types are not compatible".into(), json));
    }
    let report = match verify_connection(st, &m, g, &m2, g2, h, k, mode) {
        Ok(r) => r,
        Err(ComposeError::UntypedComponent(r)) => bail!("a component is not typed: {}", r.to_json(st)),
        Err(e) => return Err(e.into()),
    };
    let session_text = print_session(st, &report.composed_session);
    let global_text = print_global(st, report.composed_global);
    let json = report.to_json(st);
    let files = vec![
        write("composed.sess", format!("{session_text}\n"))?,
        write("composed.gt", format!("{global_text}\n"))?,
        write("report.json", serde_json::to_string_pretty(&json)? + "\n")?,
    ];
    let mut text = format!("session:\n{session_text}\n\nglobal type:\n{global_text}\n\n");
    text.push_str(&format!("composed typing: {}\n", if report.typing.ok { "holds" } else { "fails" }));
    for c in &report.projection_checks {
        text.push_str(&format!("projection check for {}: {}\n", c.participant, if c.holds { "holds" } else { "fails" }));
    }
    let d = &report.depth_bound;
    text.push_str(&format!(
        "largest depth {} against bound {}: {}\n",
        d.max_depth,
        d.bound,
        if d.holds { "within" } else { "exceeded" }
    ));
    let names: Vec<String> = files.iter().map(|f| f.display().to_string()).collect();
    text.push_str(&format!("written: {}\n", names.join(", ")));
    let mut json = json;
    json["files"] = json!(files);
    Ok(Outcome::new(report.ok(), text, json))
}

fn simulate_cmd(st: &mut Store, file: &Path, steps: usize, seed: u64, dot: Option<&Path>) -> Result<Outcome> {
    let m = load_session(st, file)?;
    let run = simulate(st, &m, steps, seed);
    let mut text: String = run.trace.iter().map(|a| format!("{a}\n")).collect();
    let status = match run.status {
        RunStatus::Final => "terminated",
        RunStatus::Stuck => "stuck",
        RunStatus::StepLimit => "step limit reached",
    };
    text.push_str(&format!("{status} after {} steps\n", run.trace.len()));
    if !run.final_session.is_final(st) {
        text.push_str(&format!("{}\n", print_session(st, &run.final_session)));
    }
    if let Some(path) = dot {
        let graph = explore(st, &m, &explore_options()?)?;
        std::fs::write(path, graph.to_dot(st)).with_context(|| format!("cannot write {}", path.display()))?;
    }
    let trace: Vec<String> = run.trace.iter().map(ToString::to_string).collect();
    let json = json!({
        "ok": run.status != RunStatus::Stuck,
        "status": run.status,
        "trace": trace,
        "final_session": print_session(st, &run.final_session),
    });
    Ok(Outcome::new(run.status != RunStatus::Stuck, text, json))
}

fn lockfree(st: &mut Store, file: &Path) -> Result<Outcome> {
    let m = load_session(st, file)?;
    let graph = explore(st, &m, &explore_options()?)?;
    let report = lock_report(&graph);
    let path_text = |path: &[opensess::semantics::CommAction]| {
        if path.is_empty() {
            "the initial state".to_string()
        } else {
            path.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
        }
    };
    let mut text = format!("{} states, {} transitions\n", report.states, report.transitions);
    if let Some(path) = &report.deadlock_witness {
        text.push_str(&format!("deadlock reached after {}\n", path_text(path)));
    }
    if let Some(s) = &report.starvation_witness {
        text.push_str(&format!("{} can never communicate after {}\n", s.participant, path_text(&s.path)));
    }
    text.push_str(if report.ok { "lock-free\n" } else { "not lock-free\n" });
    let json = serde_json::to_value(&report)?;
    Ok(Outcome::new(report.ok, text, json))
}
