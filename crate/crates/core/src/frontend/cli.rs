//! The `sqclp` command line.

use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use super::json::{proofs_in, solution_to_json};
use super::parser::{load_program, parse_constraints, parse_goal};
use super::presets::Preset;
use crate::semantics::{lfp_bounded, GroundScope};
use crate::sqchl::{check_proof, solve, PiMode, SearchOptions};
use crate::syntax::{ConstraintSet, Program};

#[derive(Parser, Debug)]
#[command(
    name = "sqclp",
    version,
    about = "Qualified proximity-based constraint logic programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a goal against a program.
    Run {
        file: PathBuf,
        #[arg(long)]
        goal: String,
        /// Maximal nesting of clause applications.
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long)]
        limit: Option<usize>,
        /// Add primitive body atoms to the solution's constraints instead of
        /// requiring the goal constraints to entail them.
        #[arg(long)]
        collect_pi: bool,
        /// Bind variables only to the terms met during unification.
        #[arg(long)]
        no_proximity_bindings: bool,
        #[arg(long)]
        json: bool,
    },
    /// Iterate the immediate consequence operator over a finite ground scope.
    Fixpoint {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        universe_depth: usize,
        #[arg(long, default_value_t = 10)]
        iters: usize,
        /// Constraint set of a scope cell; repeat for several cells.
        #[arg(long)]
        pi: Vec<String>,
    },
    /// Validate proof trees stored as JSON.
    Check { file: PathBuf, proof: PathBuf },
    /// Interactive goal solving.
    Repl { file: PathBuf },
    /// List the named instances of the scheme.
    Presets,
}

fn read(path: &Path, err: &mut dyn Write) -> Option<String> {
    match std::fs::read_to_string(path) {
        Ok(s) => Some(s),
        Err(e) => {
            let _ = writeln!(err, "{}: {e}", path.display());
            None
        }
    }
}

fn load(path: &Path, err: &mut dyn Write) -> Option<Program> {
    let text = read(path, err)?;
    match load_program(&text) {
        Ok(p) => Some(p),
        Err(diags) => {
            for d in diags {
                let _ = writeln!(err, "{}:{d}", path.display());
            }
            None
        }
    }
}

struct RunOptions {
    opts: SearchOptions,
    json: bool,
}

/// Returns the number of solutions, or `None` on a goal error.
fn run_goal(
    program: &Program,
    goal_text: &str,
    run: &RunOptions,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<Option<usize>> {
    let goal = match parse_goal(goal_text, &program.qdom) {
        Ok(g) => g,
        Err(e) => {
            writeln!(err, "goal:{e}")?;
            return Ok(None);
        }
    };
    let solutions = match solve(program, &goal, &run.opts) {
        Ok(s) => s,
        Err(e) => {
            writeln!(err, "goal: {e}")?;
            return Ok(None);
        }
    };
    let mut count = 0;
    let mut docs = Vec::new();
    for s in solutions {
        count += 1;
        if run.json {
            docs.push(solution_to_json(&s));
        } else {
            writeln!(out, "{s}")?;
        }
    }
    if run.json {
        let text = serde_json::to_string_pretty(&serde_json::Value::Array(docs))
            .expect("JSON values serialize");
        writeln!(out, "{text}")?;
    } else if count == 0 {
        writeln!(out, "no")?;
    }
    Ok(Some(count))
}

fn fixpoint(
    program: &Program,
    universe_depth: usize,
    iters: usize,
    pis: &[String],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<i32> {
    let mut sets = Vec::new();
    for text in pis {
        match parse_constraints(text) {
            Ok(s) => sets.push(s),
            Err(e) => {
                writeln!(err, "--pi:{e}")?;
                return Ok(2);
            }
        }
    }
    if sets.is_empty() {
        sets.push(ConstraintSet::new());
    }
    let scope = match GroundScope::new(program, universe_depth, sets) {
        Ok(s) => s,
        Err(e) => {
            writeln!(err, "{e}")?;
            return Ok(2);
        }
    };
    let fix = match lfp_bounded(program, &scope, iters) {
        Ok(f) => f,
        Err(e) => {
            writeln!(err, "{e}")?;
            return Ok(2);
        }
    };
    let qdom = &program.qdom;
    for k in 1..fix.stages.len() {
        let (prev, cur) = (&fix.stages[k - 1], &fix.stages[k]);
        for (atom, cell, values) in cur.iter() {
            for d in values {
                let old = prev.get(atom, cell);
                let mut dominated = false;
                for e in old {
                    if qdom.leq(d, e).expect("degrees are in the program's domain") {
                        dominated = true;
                    }
                }
                if !dominated {
                    let pi = &scope.cells()[cell].constraints;
                    writeln!(out, "iteration {k}: {atom}#{d} <= {pi}")?;
                }
            }
        }
    }
    let status = if fix.converged {
        "converged"
    } else {
        "stopped"
    };
    writeln!(out, "{status} after {} iterations", fix.iterations())?;
    Ok(0)
}

fn check(
    program: &Program,
    path: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<i32> {
    let Some(text) = read(path, err) else {
        return Ok(2);
    };
    let doc: serde_json::Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => {
            writeln!(err, "{}: {e}", path.display())?;
            return Ok(2);
        }
    };
    let trees = match proofs_in(&program.qdom, &doc) {
        Ok(t) => t,
        Err(e) => {
            writeln!(err, "{}: {e}", path.display())?;
            return Ok(2);
        }
    };
    let mut failed = false;
    for (i, tree) in trees.iter().enumerate() {
        match check_proof(program, tree) {
            Ok(()) => writeln!(out, "proof {i}: valid ({})", tree.conclusion())?,
            Err(e) => {
                writeln!(err, "proof {i}: {e}")?;
                failed = true;
            }
        }
    }
    Ok(if failed { 2 } else { 0 })
}

fn repl(
    path: &Path,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<i32> {
    let Some(mut program) = load(path, err) else {
        return Ok(2);
    };
    let mut run = RunOptions {
        opts: SearchOptions::default(),
        json: false,
    };
    let mut line = String::new();
    loop {
        write!(out, "?- ")?;
        out.flush()?;
        line.clear();
        if input.read_line(&mut line)? == 0 {
            writeln!(out)?;
            return Ok(0);
        }
        let cmd = line.trim();
        let mut words = cmd.split_whitespace();
        match words.next() {
            None => {}
            Some(":quit") | Some(":q") => return Ok(0),
            Some(":reload") => {
                if let Some(p) = load(path, err) {
                    program = p;
                    writeln!(out, "reloaded {} clauses", program.clauses.len())?;
                }
            }
            Some(":depth") => match words.next().and_then(|n| n.parse().ok()) {
                Some(n) => run.opts.depth = n,
                None => writeln!(err, "usage: :depth N")?,
            },
            Some(":limit") => {
                run.opts.limit = words.next().and_then(|n| n.parse().ok());
            }
            Some(":collect") => {
                run.opts.pi_mode = match run.opts.pi_mode {
                    PiMode::Fixed => PiMode::Collect,
                    PiMode::Collect => PiMode::Fixed,
                };
                writeln!(out, "constraint mode: {:?}", run.opts.pi_mode)?;
            }
            Some(":help") => writeln!(
                out,
                ":depth N, :limit [N], :collect, :reload, :quit; anything else is a goal"
            )?,
            Some(_) => {
                run_goal(&program, cmd, &run, out, err)?;
            }
        }
    }
}

/// Runs the command line with explicit streams. Exit codes: 0 success, 1 no
/// solution (`run`), 2 diagnostics.
pub fn run_cli<I, S>(
    args: I,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Run {
            file,
            goal,
            depth,
            limit,
            collect_pi,
            no_proximity_bindings,
            json,
        } => {
            let Some(program) = load(&file, err) else {
                return 2;
            };
            let run = RunOptions {
                opts: SearchOptions {
                    depth,
                    limit,
                    pi_mode: if collect_pi {
                        PiMode::Collect
                    } else {
                        PiMode::Fixed
                    },
                    proximity_bindings: !no_proximity_bindings,
                    ..SearchOptions::default()
                },
                json,
            };
            run_goal(&program, &goal, &run, out, err).map(|n| match n {
                None => 2,
                Some(0) => 1,
                Some(_) => 0,
            })
        }
        Command::Fixpoint {
            file,
            universe_depth,
            iters,
            pi,
        } => {
            let Some(program) = load(&file, err) else {
                return 2;
            };
            fixpoint(&program, universe_depth, iters, &pi, out, err)
        }
        Command::Check { file, proof } => {
            let Some(program) = load(&file, err) else {
                return 2;
            };
            check(&program, &proof, out, err)
        }
        Command::Repl { file } => repl(&file, input, out, err),
        Command::Presets => (|| {
            for p in Preset::ALL {
                writeln!(out, "{:<6} {}", p.name(), p.signature())?;
            }
            Ok(0)
        })(),
    };
    result.unwrap_or_else(|e| {
        let _ = writeln!(err, "{e}");
        2
    })
}

/// Runs the command line on the process's standard streams.
pub fn cli_main<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdin = io::stdin();
    let mut input = stdin.lock();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let stderr = io::stderr();
    let mut err = stderr.lock();
    run_cli(args, &mut input, &mut out, &mut err)
}
