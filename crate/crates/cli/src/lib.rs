//! The `prefplan` command line: plan, compare, emit and check.
//!
//! Exit codes: 0 success, 1 bad input (syntax, resolution, invalid plan,
//! I/O), 2 no trajectory reaches the goal, 3 `check` found problems.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use prefplan::asp::{encode_problem, EncodeOptions};
use prefplan::patterns::{
    cheapest_transform, parse_costs, shortest_action_transform, shortest_formula,
};
use prefplan::planner::{format_plan, parse_plan, replay, PlanQuery, Trajectory};
use prefplan::pp::{parse_preference, GeneralPreference};
use prefplan::semantics::{compare_atomic_detail, compare_general, Comparison};
use prefplan::solver::{solve, Mode, SolveError};
use prefplan::theory::domain::load_domain;
use prefplan::{ActionTheory, State};

#[derive(Parser)]
#[command(
    name = "prefplan",
    version,
    about = "Planning with temporal preferences over bounded trajectories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Horizon {
    /// Maximal plan length.
    #[arg(long, short = 'n', env = "PREFPLAN_LENGTH", default_value_t = 5)]
    length: usize,
    /// Forbid actions after the goal has been reached.
    #[arg(long)]
    no_post_goal_actions: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Find a most preferred plan.
    Plan {
        domain: PathBuf,
        /// Preference file; optional when --pattern is given.
        pref: Option<PathBuf>,
        #[command(flatten)]
        horizon: Horizon,
        #[arg(long, value_enum, default_value_t = CliMode::Weight)]
        mode: CliMode,
        /// Print the weight tree of the selected plan as JSON.
        #[arg(long)]
        explain: bool,
        /// Skip trajectories that revisit a state.
        #[arg(long)]
        prune_visited: bool,
        /// Ready-made preference; ranked before the preference file if both are given.
        #[arg(long, value_enum)]
        pattern: Option<Pattern>,
        /// Action costs for --pattern cheapest.
        #[arg(long)]
        costs: Option<PathBuf>,
        /// Reserved; planning is deterministic.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare two plans under a preference.
    Compare {
        domain: PathBuf,
        pref: PathBuf,
        plan_a: PathBuf,
        plan_b: PathBuf,
    },
    /// Write the logic program for the planning problem and preference.
    Emit {
        domain: PathBuf,
        pref: PathBuf,
        #[command(flatten)]
        horizon: Horizon,
        #[arg(long, short = 'o')]
        out: Option<PathBuf>,
    },
    /// Check that every executable action has a successor state.
    Check {
        domain: PathBuf,
        /// Audit the states reachable within this many steps.
        #[arg(long, short = 'n', env = "PREFPLAN_LENGTH", default_value_t = 5)]
        length: usize,
        /// Audit every state instead of the reachable ones.
        #[arg(long)]
        all_states: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CliMode {
    Weight,
    Dominance,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pattern {
    ShortestFormula,
    ShortestAction,
    Cheapest,
}

enum Outcome {
    Ok,
    NoPlan,
    Problems,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn domain(path: &Path) -> Result<ActionTheory> {
    load_domain(&read(path)?).with_context(|| path.display().to_string())
}

fn preference(theory: &ActionTheory, path: &Path) -> Result<GeneralPreference> {
    let file =
        parse_preference(theory, &read(path)?).with_context(|| path.display().to_string())?;
    Ok(file
        .root()
        .with_context(|| path.display().to_string())?
        .clone())
}

fn plan_file(theory: &ActionTheory, path: &Path) -> Result<Trajectory> {
    let actions = parse_plan(theory, &read(path)?).with_context(|| path.display().to_string())?;
    replay(theory, &actions).with_context(|| path.display().to_string())
}

fn digest(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

fn file_name(path: &Path) -> String {
    path.file_name().map_or_else(
        || path.display().to_string(),
        |n| n.to_string_lossy().into_owned(),
    )
}

fn with_pattern(pattern: GeneralPreference, user: Option<GeneralPreference>) -> GeneralPreference {
    match user {
        Some(u) => GeneralPreference::Chain(vec![pattern, u]),
        None => pattern,
    }
}

/// The first `len` steps of `t` restricted to the fluents and actions of
/// `original`, which a pattern transform only appends to.
fn project(original: &ActionTheory, t: &Trajectory, len: usize) -> Trajectory {
    let n = original.num_fluents();
    let states = t.states()[..=len]
        .iter()
        .map(|s| State::from_true(n, original.fluent_ids().filter(|&f| s.value(f))))
        .collect();
    Trajectory::new(states, t.actions()[..len].to_vec())
}

#[allow(clippy::too_many_arguments)]
fn cmd_plan(
    domain_path: &Path,
    pref_path: Option<&Path>,
    horizon: &Horizon,
    mode: CliMode,
    explain: bool,
    prune_visited: bool,
    pattern: Option<Pattern>,
    costs: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Outcome> {
    let original = domain(domain_path)?;
    if pattern.is_none() && pref_path.is_none() {
        bail!("a preference file is required unless --pattern is given");
    }
    if costs.is_some() && !matches!(pattern, Some(Pattern::Cheapest)) {
        bail!("--costs only applies to --pattern cheapest");
    }
    let mut theory = original.clone();
    let mut length = horizon.length;
    let mut shortest_action = None;
    let mut cheapest = None;
    let pattern_pref: Option<GeneralPreference> = match pattern {
        None => None,
        Some(Pattern::ShortestFormula) => Some(shortest_formula(length, &original.goal()).into()),
        Some(Pattern::ShortestAction) => {
            let sa = shortest_action_transform(&original)?;
            theory = sa.theory.clone();
            // room for the final stop
            length += 1;
            let p = sa.desire.clone().into();
            shortest_action = Some(sa);
            Some(p)
        }
        Some(Pattern::Cheapest) => {
            let path = costs.context("--pattern cheapest needs --costs")?;
            let costs =
                parse_costs(&original, &read(path)?).with_context(|| path.display().to_string())?;
            let max = costs
                .iter()
                .max()
                .copied()
                .unwrap_or(0)
                .checked_mul(length as u64)
                .context("cost bound overflows")?;
            let ch = cheapest_transform(&original, &costs, 0, max)?;
            theory = ch.theory.clone();
            let p = ch.preference.clone().into();
            cheapest = Some(ch);
            Some(p)
        }
    };
    let user = pref_path.map(|p| preference(&theory, p)).transpose()?;
    let pref = match pattern_pref {
        Some(p) => with_pattern(p, user),
        None => user.expect("checked above"),
    };

    let query = PlanQuery::new(&theory, length)
        .post_goal_actions(!horizon.no_post_goal_actions)
        .prune_visited(prune_visited);
    if let Some(ch) = &cheapest {
        ch.check_overflow(&query)?;
    }
    let mode = match mode {
        CliMode::Weight => Mode::Weight,
        CliMode::Dominance => Mode::Dominance,
    };
    let sol = match solve(&query, &pref, mode) {
        Ok(sol) => sol,
        Err(SolveError::NoPlan { max_length }) => {
            writeln!(err, "no trajectory achieves G within {max_length} steps")?;
            return Ok(Outcome::NoPlan);
        }
        Err(e) => return Err(e.into()),
    };

    // patterns add fluents and actions; show the plan in the original domain
    let shown = match (&shortest_action, pattern) {
        (Some(sa), _) => project(&original, &sol.best, sa.strip_padding(&sol.best).len()),
        (None, Some(_)) => project(&original, &sol.best, sol.best.len()),
        (None, None) => sol.best.clone(),
    };
    write!(out, "{}", format_plan(&original, &shown))?;
    writeln!(
        out,
        "% weight {} of {}",
        sol.weight.weight, sol.weight.max_bound
    )?;
    if let Some(ch) = &cheapest {
        if let Some(c) = ch.cost_of(&sol.best) {
            writeln!(out, "% cost {c}")?;
        }
    }
    writeln!(out, "% {} trajectories examined", sol.examined)?;
    if mode == Mode::Dominance {
        writeln!(
            out,
            "% {} dominance-maximal trajectories",
            sol.maximal.len()
        )?;
    }
    if explain {
        writeln!(out, "{}", serde_json::to_string_pretty(&sol.weight.tree)?)?;
    }
    Ok(Outcome::Ok)
}

fn cmd_compare(
    domain_path: &Path,
    pref_path: &Path,
    a: &Path,
    b: &Path,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let theory = domain(domain_path)?;
    let pref = preference(&theory, pref_path)?;
    let (ta, tb) = (plan_file(&theory, a)?, plan_file(&theory, b)?);
    let outcome = compare_general(&ta, &tb, &pref)?;
    writeln!(
        out,
        "{}",
        match outcome {
            Comparison::LeftPreferred => "A preferred",
            Comparison::RightPreferred => "B preferred",
            Comparison::Indistinguishable => "indistinguishable",
            Comparison::Incomparable => "incomparable",
        }
    )?;
    if let GeneralPreference::Atomic(ap) = &pref {
        if let Some(i) = compare_atomic_detail(&ta, &tb, ap)?.deciding_index {
            writeln!(
                out,
                "decided by chain element {} of {}",
                i + 1,
                ap.chain.len()
            )?;
        }
    }
    Ok(Outcome::Ok)
}

fn cmd_emit(
    domain_path: &Path,
    pref_path: &Path,
    horizon: &Horizon,
    target: Option<&Path>,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let theory = domain(domain_path)?;
    let pref = preference(&theory, pref_path)?;
    let mut program = encode_problem(
        &theory,
        &pref,
        EncodeOptions {
            length: horizon.length,
            post_goal_actions: !horizon.no_post_goal_actions,
        },
    )?;
    program.header = vec![
        format!("prefplan {}", env!("CARGO_PKG_VERSION")),
        format!(
            "domain {} sha256:{}",
            file_name(domain_path),
            digest(domain_path)?
        ),
        format!(
            "preference {} sha256:{}",
            file_name(pref_path),
            digest(pref_path)?
        ),
        format!(
            "length {}{}",
            horizon.length,
            if horizon.no_post_goal_actions {
                ", no post-goal actions"
            } else {
                ""
            }
        ),
    ];
    let text = program.to_string();
    match target {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))?,
        None => write!(out, "{text}")?,
    }
    Ok(Outcome::Ok)
}

fn cmd_check(domain_path: &Path, length: Option<usize>, out: &mut dyn Write) -> Result<Outcome> {
    let theory = domain(domain_path)?;
    let report = theory.audit(length)?;
    writeln!(
        out,
        "{} fluents, {} actions, {} states checked, max branching {}",
        theory.num_fluents(),
        theory.actions().len(),
        report.states_checked,
        report.max_branching
    )?;
    for p in &report.problems {
        writeln!(out, "problem: {p}")?;
    }
    Ok(if report.is_ok() {
        writeln!(out, "ok")?;
        Outcome::Ok
    } else {
        Outcome::Problems
    })
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    match &cli.command {
        Command::Plan {
            domain,
            pref,
            horizon,
            mode,
            explain,
            prune_visited,
            pattern,
            costs,
            seed: _,
        } => cmd_plan(
            domain,
            pref.as_deref(),
            horizon,
            *mode,
            *explain,
            *prune_visited,
            *pattern,
            costs.as_deref(),
            out,
            err,
        ),
        Command::Compare {
            domain,
            pref,
            plan_a,
            plan_b,
        } => cmd_compare(domain, pref, plan_a, plan_b, out),
        Command::Emit {
            domain,
            pref,
            horizon,
            out: target,
        } => cmd_emit(domain, pref, horizon, target.as_deref(), out),
        Command::Check {
            domain,
            length,
            all_states,
        } => cmd_check(domain, (!all_states).then_some(*length), out),
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::NoPlan) => 2,
        Ok(Outcome::Problems) => 3,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            1
        }
    }
}
