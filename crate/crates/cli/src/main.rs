use std::fmt::Write as _;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use pinwheel_core::checker::{verify, CheckError, Verdict};
use pinwheel_core::constructions::{
    classify_case, five_sixths, schedule, three_period_schedule, ConstructionError, TraceStep,
};
use pinwheel_core::model::{parse_instance, parse_schedule, CyclicSchedule, Instance, Rational};
use pinwheel_core::regions::{cover_check, CoverResult, Point, Region};
use pinwheel_core::search::{find_schedule, prove_unschedulable, SearchError, SearchOutcome};
use serde::Serialize;
use serde_json::json;

const OK: u8 = 0;
const NO: u8 = 1;
const UNDECIDED: u8 = 2;
const USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "pinwheel", version, about = "Real-period pinwheel scheduling")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for parallel steps; results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a valid schedule (at most 3 distinct periods, density <= 5/6).
    Schedule {
        #[arg(long, value_parser = instance_arg)]
        instance: Instance,
    },
    /// Check a schedule against an instance.
    Verify {
        #[arg(long, value_parser = schedule_arg)]
        schedule: CyclicSchedule,
        #[arg(long, value_parser = instance_arg)]
        instance: Instance,
    },
    /// Sum of reciprocal periods.
    Density {
        #[arg(long, value_parser = instance_arg)]
        instance: Instance,
    },
    /// Which three-period case handles (a1, a2, 1/(5/6 - 1/a1 - 1/a2)).
    Classify {
        #[arg(long, value_parser = rational_arg)]
        a1: Rational,
        #[arg(long, value_parser = rational_arg)]
        a2: Rational,
    },
    /// Check that J is covered by M1..M7, optionally without some of them.
    CoverCheck {
        #[arg(long, value_delimiter = ',', value_parser = region_arg, value_name = "Mi,...")]
        drop: Vec<usize>,
    },
    /// Look for a cyclic schedule of length at most max-period.
    Search {
        #[arg(long, value_parser = instance_arg)]
        instance: Instance,
        #[arg(long)]
        max_period: usize,
    },
    /// Decide schedulability exhaustively.
    Prove {
        #[arg(long, value_parser = instance_arg)]
        instance: Instance,
        #[arg(long, default_value_t = 10_000_000)]
        state_cap: usize,
    },
    /// Constraints and vertices of J and M1..M7.
    RegionsDump,
}

fn instance_arg(s: &str) -> Result<Instance, String> {
    parse_instance(s).map_err(|e| e.to_string())
}

fn schedule_arg(s: &str) -> Result<CyclicSchedule, String> {
    parse_schedule(s).map_err(|e| e.to_string())
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    let r = parse_instance(s).map_err(|e| e.to_string())?;
    if r.k() != 1 {
        return Err("expected a single rational".into());
    }
    Ok(r.period(1).clone())
}

fn region_arg(s: &str) -> Result<usize, String> {
    s.trim()
        .strip_prefix('M')
        .and_then(|i| i.parse().ok())
        .filter(|i| (1..=7).contains(i))
        .ok_or_else(|| format!("`{s}` is not one of M1..M7"))
}

struct Report {
    code: u8,
    text: String,
    stderr: bool,
}

impl Report {
    fn new(code: u8, json: bool, human: String, machine: impl Serialize) -> Self {
        let text = if json {
            serde_json::to_string_pretty(&machine).expect("serializable report") + "\n"
        } else {
            human
        };
        Report {
            code,
            text,
            stderr: false,
        }
    }

    fn error(code: u8, json: bool, msg: impl std::fmt::Display) -> Self {
        let msg = msg.to_string();
        let mut r = Report::new(
            code,
            json,
            format!("error: {msg}\n"),
            json!({ "error": msg }),
        );
        r.stderr = !json;
        r
    }
}

fn trace_line(step: &TraceStep) -> String {
    match step {
        TraceStep::Fold {
            period,
            multiplicity,
            folded_period,
        } => format!("fold {multiplicity} x {period} -> {folded_period}"),
        TraceStep::Distinct { periods } => format!("distinct ({periods})"),
        TraceStep::Shrink { from, to } => format!("shrink {from} -> {to}"),
        TraceStep::Lower { from, to } => format!("lower {from} -> {to}"),
        TraceStep::Single => "single task".into(),
        TraceStep::Case { case } => format!("case {case:?}"),
    }
}

fn construction_error(json: bool, e: ConstructionError) -> Report {
    let code = match e {
        ConstructionError::Check(CheckError::TaskIndexOutOfRange { .. }) => USAGE,
        _ => UNDECIDED,
    };
    Report::error(code, json, e)
}

fn run_schedule(json: bool, a: &Instance) -> Report {
    match schedule(a) {
        Ok((s, trace)) => {
            let mut human = format!("schedule: {s}\nlength: {}\ntrace:\n", s.len());
            for step in &trace.steps {
                let _ = writeln!(human, "  {}", trace_line(step));
            }
            Report::new(
                OK,
                json,
                human,
                json!({ "instance": a, "schedule": s, "trace": trace.steps }),
            )
        }
        Err(e) => construction_error(json, e),
    }
}

fn run_verify(json: bool, s: &CyclicSchedule, a: &Instance) -> Report {
    match verify(s, a) {
        Ok(Verdict::Valid) => Report::new(OK, json, "VALID\n".into(), Verdict::Valid),
        Ok(v @ Verdict::Counterexample(_)) => {
            let c = v.counterexample().unwrap();
            let human = format!(
                "INVALID\n(task, l, m, window, found) = ({}, {}, {}, {}, {})\n",
                c.task, c.l, c.m, c.window_length, c.found
            );
            Report::new(NO, json, human, &v)
        }
        Err(e @ CheckError::TaskIndexOutOfRange { .. }) => Report::error(USAGE, json, e),
        Err(e) => Report::error(UNDECIDED, json, e),
    }
}

fn run_density(json: bool, a: &Instance) -> Report {
    let d = a.density();
    let within = d <= five_sixths();
    let human = format!(
        "density: {d} (~{:.6})\n{}\n",
        d.to_f64(),
        if within { "<= 5/6" } else { "> 5/6" }
    );
    Report::new(
        OK,
        json,
        human,
        json!({ "density": d, "at_most_five_sixths": within }),
    )
}

fn run_classify(json: bool, a1: &Rational, a2: &Rational) -> Report {
    let case = match classify_case(a1, a2) {
        Ok(c) => c,
        Err(e) => return construction_error(json, e),
    };
    let a3 = (five_sixths() - a1.recip() - a2.recip()).recip();
    match three_period_schedule(a1, a2) {
        Ok((_, s)) => {
            let human = format!("case {case:?}\na3: {a3}\nschedule: {s}\n");
            Report::new(
                OK,
                json,
                human,
                json!({ "case": case, "a3": a3, "schedule": s }),
            )
        }
        Err(e) => construction_error(json, e),
    }
}

fn union_label(kept: &[Region]) -> String {
    if kept.len() == 7 {
        "M1∪…∪M7".into()
    } else {
        kept.iter()
            .map(|r| r.name.as_str())
            .collect::<Vec<_>>()
            .join("∪")
    }
}

fn run_cover_check(json: bool, drop: &[usize]) -> Report {
    let kept: Vec<Region> = (1..=7)
        .filter(|i| !drop.contains(i))
        .map(Region::m)
        .collect();
    let label = union_label(&kept);
    match cover_check(&Region::j(), &kept) {
        CoverResult::Covered => Report::new(
            OK,
            json,
            format!("COVERED (J ⊆ {label})\n"),
            json!({ "result": "covered", "regions": kept.iter().map(|r| &r.name).collect::<Vec<_>>() }),
        ),
        CoverResult::Witness(p) => {
            let human = format!(
                "NOT COVERED (J ⊄ {label})\nwitness: {p}\nperiods: ({}, {})\n",
                p.x.recip(),
                p.y.recip()
            );
            Report::new(
                NO,
                json,
                human,
                json!({ "result": "witness", "witness": p }),
            )
        }
    }
}

fn search_report(json: bool, out: Result<SearchOutcome, SearchError>) -> Report {
    let out = match out {
        Ok(o) => o,
        Err(e @ SearchError::StateCapExceeded { .. }) => return Report::error(UNDECIDED, json, e),
        Err(e) => return Report::error(USAGE, json, e),
    };
    let (code, human) = match &out {
        SearchOutcome::Schedulable { certificate } => {
            (OK, format!("SCHEDULABLE\nschedule: {certificate}\n"))
        }
        SearchOutcome::Unschedulable { states_explored } => (
            NO,
            format!("UNSCHEDULABLE\nstates explored: {states_explored}\n"),
        ),
        SearchOutcome::Inconclusive { nodes_explored } => (
            UNDECIDED,
            format!("INCONCLUSIVE\nnodes explored: {nodes_explored}\n"),
        ),
    };
    Report::new(code, json, human, &out)
}

#[derive(Serialize)]
struct RegionDump<'a> {
    name: &'a str,
    constraints: Vec<String>,
    vertices: Vec<Point>,
}

fn run_regions_dump(json: bool) -> Report {
    let regions: Vec<Region> = std::iter::once(Region::j())
        .chain(Region::all_m())
        .collect();
    let dumps: Vec<RegionDump> = regions
        .iter()
        .map(|r| RegionDump {
            name: &r.name,
            constraints: r.constraints.iter().map(|c| c.to_string()).collect(),
            vertices: r.vertices(),
        })
        .collect();
    let mut human = String::new();
    for d in &dumps {
        let vs: Vec<String> = d.vertices.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(human, "{}: {}", d.name, vs.join(" "));
    }
    Report::new(OK, json, human, &dumps)
}

fn run(cli: Cli) -> Report {
    let json = cli.json;
    if let Some(n) = cli.threads {
        // a pool that is already set up is fine; the hint never changes results
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match &cli.command {
        Command::Schedule { instance } => run_schedule(json, instance),
        Command::Verify { schedule, instance } => run_verify(json, schedule, instance),
        Command::Density { instance } => run_density(json, instance),
        Command::Classify { a1, a2 } => run_classify(json, a1, a2),
        Command::CoverCheck { drop } => run_cover_check(json, drop),
        Command::Search {
            instance,
            max_period,
        } => search_report(json, find_schedule(instance, *max_period)),
        Command::Prove {
            instance,
            state_cap,
        } => search_report(json, prove_unschedulable(instance, *state_cap)),
        Command::RegionsDump => run_regions_dump(json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(USAGE),
            };
        }
    };
    let report = run(cli);
    if report.stderr {
        eprint!("{}", report.text);
    } else {
        print!("{}", report.text);
    }
    ExitCode::from(report.code)
}
