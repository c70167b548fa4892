//! End-to-end runs of the `prefplan` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use prefplan::planner::{parse_plan, replay};
use prefplan::pp::parse_preference;
use prefplan::theory::domain::load_domain;
use prefplan::weights;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn prefplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prefplan"))
        .args(args)
        .current_dir(data(""))
        .env_remove("PREFPLAN_LENGTH")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn plan_prints_the_walk_plan() {
    let o = prefplan(&["plan", "travel.dom", "travel_cost_time.pref", "-n", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(
        out.starts_with("occ(walk(home,school),0).\n% 1: -at(home) at(school)\n"),
        "{out}"
    );
}

#[test]
fn plan_output_is_a_plan_file() {
    let dir = tempfile::tempdir().unwrap();
    let taxi = dir.path().join("taxi.plan");
    let o = prefplan(&["plan", "travel.dom", "travel_time_cost.pref", "-n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    std::fs::write(&taxi, o.stdout).unwrap();
    let taxi = taxi.to_str().unwrap();

    let o = prefplan(&[
        "compare",
        "travel.dom",
        "travel_cost_time.pref",
        "plans/travel_walk.plan",
        taxi,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "A preferred\ndecided by chain element 1 of 2\n");

    let o = prefplan(&[
        "compare",
        "travel.dom",
        "travel_time_cost.pref",
        "plans/travel_walk.plan",
        taxi,
    ]);
    assert_eq!(stdout(&o), "B preferred\ndecided by chain element 1 of 2\n");

    let o = prefplan(&["compare", "travel.dom", "travel_time_cost.pref", taxi, taxi]);
    assert_eq!(stdout(&o), "indistinguishable\n");
}

#[test]
fn compare_coffee_plans() {
    let run = |pref| {
        let o = prefplan(&[
            "compare",
            "coffee.dom",
            pref,
            "plans/coffee_walk.plan",
            "plans/coffee_taxi.plan",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        stdout(&o)
    };
    assert_eq!(run("coffee_time_and_cost.pref"), "incomparable\n");
    assert_eq!(run("coffee_time_or_cost.pref"), "A preferred\n");
}

#[test]
fn coffee_without_money_still_plans() {
    let o = prefplan(&["plan", "coffee_nomoney.dom", "coffee.pref", "-n", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(!out.contains("buy_coffee"), "{out}");
    assert!(out.contains("% weight 0 of 2"), "{out}");
}

#[test]
fn unreachable_goal_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let dom = dir.path().join("stuck.dom");
    std::fs::write(&dom, "fluent p, q. action a. a causes p. goal q.\n").unwrap();
    let pref = dir.path().join("p.pref");
    std::fs::write(&pref, "desire d = eventually(p). optimize d.\n").unwrap();
    let o = prefplan(&[
        "plan",
        dom.to_str().unwrap(),
        pref.to_str().unwrap(),
        "-n",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("no trajectory achieves G"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn syntax_errors_exit_1_with_a_position() {
    let dir = tempfile::tempdir().unwrap();
    let pref = dir.path().join("bad.pref");
    std::fs::write(&pref, "desire d = eventually(at(school).\noptimize d.\n").unwrap();
    let o = prefplan(&["plan", "travel.dom", pref.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("1:"), "{}", stderr(&o));

    std::fs::write(&pref, "desire d = eventually(at(mars)).\noptimize d.\n").unwrap();
    let o = prefplan(&["plan", "travel.dom", pref.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("at(mars)"), "{}", stderr(&o));
}

#[test]
fn compare_rejects_a_non_executable_plan() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("bad.plan");
    std::fs::write(&plan, "occ(take_taxi(home,school),0).\n").unwrap();
    let o = prefplan(&[
        "compare",
        "travel.dom",
        "travel_walk.pref",
        plan.to_str().unwrap(),
        "plans/travel_walk.plan",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not executable"), "{}", stderr(&o));
}

#[test]
fn explain_matches_the_weights_module() {
    let o = prefplan(&[
        "plan",
        "coffee.dom",
        "coffee_mixed.pref",
        "-n",
        "4",
        "--explain",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let json_start = out.find('{').unwrap();
    let tree: serde_json::Value = serde_json::from_str(&out[json_start..]).unwrap();

    let t = load_domain(&std::fs::read_to_string(data("coffee.dom")).unwrap()).unwrap();
    let pref = parse_preference(
        &t,
        &std::fs::read_to_string(data("coffee_mixed.pref")).unwrap(),
    )
    .unwrap()
    .root()
    .unwrap()
    .clone();
    let traj = replay(&t, &parse_plan(&t, &out[..json_start]).unwrap()).unwrap();
    let report = weights::weight(&traj, &pref).unwrap();
    assert_eq!(tree, serde_json::to_value(&report.tree).unwrap());
    assert_eq!(tree["kind"], "chain");
}

#[test]
fn length_from_environment() {
    let run = |env: &str| {
        Command::new(env!("CARGO_BIN_EXE_prefplan"))
            .args(["plan", "travel.dom", "travel_time_cost.pref"])
            .current_dir(data(""))
            .env("PREFPLAN_LENGTH", env)
            .output()
            .unwrap()
    };
    // the taxi needs two steps
    assert!(stdout(&run("1")).starts_with("occ(walk"));
    assert!(stdout(&run("2")).starts_with("occ(call_taxi"));
}

#[test]
fn dominance_mode_agrees_on_travel() {
    let o = prefplan(&[
        "plan",
        "travel.dom",
        "travel_cost_time.pref",
        "-n",
        "3",
        "--mode",
        "dominance",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("occ(walk(home,school),0)."), "{out}");
    assert!(out.contains("dominance-maximal"), "{out}");
}

#[test]
fn patterns_from_the_command_line() {
    let o = prefplan(&[
        "plan",
        "travel.dom",
        "-n",
        "3",
        "--pattern",
        "cheapest",
        "--costs",
        "travel.costs",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("% cost 0"));
    let o = prefplan(&[
        "plan",
        "monkey.dom",
        "-n",
        "6",
        "--pattern",
        "cheapest",
        "--costs",
        "monkey.costs",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(!stdout(&o).contains("sCost"), "{}", stdout(&o));
    assert!(stdout(&o).contains("% cost 1"), "{}", stdout(&o));

    let o = prefplan(&[
        "plan",
        "monkey.dom",
        "-n",
        "6",
        "--pattern",
        "shortest-formula",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        stdout(&o).lines().filter(|l| l.starts_with("occ(")).count(),
        4
    );

    // padding is stripped, so the output replays in the original domain
    let o = prefplan(&[
        "plan",
        "travel.dom",
        "-n",
        "3",
        "--pattern",
        "shortest-action",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(!out.contains("stop") && !out.contains("noop"), "{out}");
    let t = load_domain(&std::fs::read_to_string(data("travel.dom")).unwrap()).unwrap();
    replay(&t, &parse_plan(&t, &out).unwrap()).unwrap();

    let o = prefplan(&[
        "plan",
        "travel.dom",
        "-n",
        "3",
        "--pattern",
        "shortest-formula",
        "--costs",
        "travel.costs",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = prefplan(&["plan", "travel.dom", "-n", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn pattern_then_preference() {
    // among the cheapest plans, prefer one that walks
    let o = prefplan(&[
        "plan",
        "travel.dom",
        "travel_walk.pref",
        "-n",
        "3",
        "--pattern",
        "cheapest",
        "--costs",
        "travel.costs",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("occ(walk(home,school),0)."));
}

#[test]
fn emit_is_deterministic_and_matches_goldens() {
    let dir = tempfile::tempdir().unwrap();
    for (name, dom, pref, extra) in [
        (
            "travel",
            "travel.dom",
            "travel_cost_time.pref",
            &["-n", "3"][..],
        ),
        (
            "coffee",
            "coffee.dom",
            "coffee_mixed.pref",
            &["-n", "4"][..],
        ),
        (
            "monkey",
            "monkey.dom",
            "monkey.pref",
            &["-n", "6", "--no-post-goal-actions"][..],
        ),
    ] {
        let out = dir.path().join(format!("{name}.lp"));
        let mut args = vec!["emit", dom, pref, "-o", out.to_str().unwrap()];
        args.extend(extra);
        let o = prefplan(&args);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let first = std::fs::read(&out).unwrap();
        let o = prefplan(
            &args[..args.len() - extra.len() - 2]
                .iter()
                .chain(extra)
                .copied()
                .collect::<Vec<_>>(),
        );
        assert_eq!(o.stdout, first, "{name}: stdout and --out differ");
        let golden = std::fs::read(data(&format!("golden/{name}.lp"))).unwrap();
        assert!(first == golden, "{name}.lp differs from the golden file");
    }
}

#[test]
fn check_reports_missing_successors() {
    let o = prefplan(&["check", "travel.dom"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).ends_with("ok\n"));
    // unreachable road layouts break drive(home,home)
    let o = prefplan(&["check", "travel.dom", "--all-states"]);
    assert_eq!(o.status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let dom = dir.path().join("clash.dom");
    std::fs::write(
        &dom,
        "fluent p, q. action a. a causes p. a executable_if q. caused -p if q. initially q.\n",
    )
    .unwrap();
    let o = prefplan(&["check", dom.to_str().unwrap(), "--length", "2"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("problem: a has no successor"),
        "{}",
        stdout(&o)
    );
}
