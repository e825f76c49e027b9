use std::fmt::Write as _;
use std::path::Path;

use graphlog::graph::io;
use graphlog::solvers::{
    exhaustion_study, mountain_pass, nehari_descent, ExhaustionRecord, Method, SolveSummary,
    Termination,
};
use graphlog::variational::energy;
use graphlog::verify::{
    c_epsilon_estimate, example1_verify, example2_default_shells, example2_verify, ExampleReport,
};
use graphlog::VertexFunction;
use serde::Serialize;

use crate::config::{load_graph_data, read_file, write_file, GraphSource, PotentialSource, RunConfig};
use crate::{ExhaustionArgs, ExportDotArgs, Failure, RunArgs, SeriesArgs, SolveArgs, VerifyCommand};

/// Exit code for a run that finished without converging.
pub const NOT_CONVERGED: u8 = 2;
/// Exit code for a verification whose schedule is too short to decide.
pub const INCONCLUSIVE: u8 = 3;

/// Largest `N` accepted by the series checks.
const MAX_N: f64 = 1e8;

fn runtime(e: graphlog::Error) -> Failure {
    Failure {
        code: NOT_CONVERGED,
        message: e.to_string(),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(Failure::config)
}

fn load_run(args: &RunArgs) -> Result<RunConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(g) = &args.graph {
        cfg.graph = Some(GraphSource::parse(g)?);
    }
    if let Some(p) = &args.potential {
        cfg.potential = Some(PotentialSource::Family(p.parse().map_err(Failure::config)?));
    }
    let s = &mut cfg.solver;
    if let Some(seed) = args.seed {
        s.seed = seed;
    }
    if let Some(init) = &args.init {
        s.init = init.parse().map_err(Failure::config)?;
    }
    if let Some(n) = args.max_iters {
        s.max_iters = n;
    }
    if let Some(t) = args.grad_tol {
        s.grad_tol = t;
    }
    if let Some(out) = &args.out {
        cfg.outputs.dir = out.clone();
    }
    cfg.outputs.dot |= args.dot;
    Ok(cfg)
}

#[derive(Debug, Serialize)]
struct Comparison {
    reference: String,
    reference_method: Method,
    reference_level: f64,
    difference: f64,
    relative: f64,
}

#[derive(Debug, Serialize)]
struct RunSummary {
    #[serde(flatten)]
    summary: SolveSummary,
    graph: String,
    potential: String,
    vertices: usize,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    compare: Option<Comparison>,
}

fn read_summary(path: &Path) -> Result<SolveSummary, Failure> {
    serde_json::from_str(&read_file(path)?)
        .map_err(|e| Failure::config(format!("{}: {e}", path.display())))
}

pub fn solve(args: SolveArgs) -> Result<u8, Failure> {
    let mut cfg = load_run(&args.run)?;
    if let Some(m) = &args.method {
        cfg.solver.method = m.parse().map_err(Failure::config)?;
    }
    cfg.solver.validate().map_err(Failure::config)?;
    let reference = args.compare.as_deref().map(read_summary).transpose()?;
    let (g, a) = cfg.instance()?;

    let (u, traces, summary) = match cfg.solver.method {
        Method::NehariDescent => {
            let (u, trace) = nehari_descent(&g, &a, &cfg.solver).map_err(runtime)?;
            let report = energy(&g, &a, &u).map_err(runtime)?;
            let summary = SolveSummary {
                method: Method::NehariDescent,
                d_hat: Some(report.j),
                c_hat: None,
                residual_linf: report.residual_linf,
                iters: trace.iterations(),
                terminated: trace.termination,
            };
            (u, vec![("trace", trace)], summary)
        }
        Method::MountainPass => {
            let out = mountain_pass(&g, &a, &cfg.solver).map_err(runtime)?;
            let report = energy(&g, &a, &out.u).map_err(runtime)?;
            let terminated = match out.trace.termination {
                Termination::Converged => out.polish.termination,
                other => other,
            };
            let summary = SolveSummary {
                method: Method::MountainPass,
                d_hat: None,
                c_hat: Some(out.c_hat),
                residual_linf: report.residual_linf,
                iters: out.trace.iterations(),
                terminated,
            };
            (out.u, vec![("trace", out.trace), ("polish", out.polish)], summary)
        }
    };

    let compare = match (reference, &args.compare) {
        (Some(r), Some(path)) => {
            let level = r.level();
            let difference = summary.level() - level;
            Some(Comparison {
                reference: path.display().to_string(),
                reference_method: r.method,
                reference_level: level,
                difference,
                relative: difference.abs() / level.abs().max(f64::MIN_POSITIVE),
            })
        }
        _ => None,
    };
    let run = RunSummary {
        summary,
        graph: cfg.graph.as_ref().map(ToString::to_string).unwrap_or_default(),
        potential: cfg.potential.as_ref().map_or_else(|| "graph file".to_string(), ToString::to_string),
        vertices: g.len(),
        seed: cfg.solver.seed,
        compare,
    };

    let dir = &cfg.outputs.dir;
    if cfg.outputs.json {
        let doc = io::to_json(&g, Some(a.values()), Some(&u)).map_err(Failure::config)?;
        write_file(&dir.join("solution.json"), &doc)?;
    }
    if cfg.outputs.csv {
        for (name, trace) in &traces {
            write_file(&dir.join(format!("{name}.csv")), &trace.to_csv())?;
        }
    }
    if cfg.outputs.dot {
        write_file(&dir.join("solution.dot"), &io::to_dot(&g, Some(&u)).map_err(Failure::config)?)?;
    }
    let text = to_json(&run)?;
    write_file(&dir.join("summary.json"), &text)?;
    print!("{text}");
    if let Some(c) = &run.compare {
        eprintln!(
            "{} level {:.12} vs {} level {:.12} ({}): difference {:.3e}",
            run.summary.method, run.summary.level(), c.reference_method, c.reference_level, c.reference, c.difference
        );
    }
    Ok(converged_code(run.summary.terminated))
}

fn converged_code(terminated: Termination) -> u8 {
    if terminated == Termination::Converged {
        0
    } else {
        eprintln!("solver stopped without converging: {terminated}");
        NOT_CONVERGED
    }
}

fn exhaustion_csv(rows: &[ExhaustionRecord]) -> String {
    let mut out = String::from(
        "radius,vertices,d_hat,iters,terminated,residual_linf,mass,tail_mass,center_of_mass,error\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.radius,
            r.vertices,
            r.d_hat,
            r.iters,
            r.terminated.map(|t| t.to_string()).unwrap_or_default(),
            r.residual_linf,
            r.mass,
            r.tail_mass,
            r.center_of_mass,
            r.error.as_deref().unwrap_or("").replace(',', ";")
        );
    }
    out
}

pub fn exhaustion(args: ExhaustionArgs) -> Result<u8, Failure> {
    let mut cfg = load_run(&args.run)?;
    if let Some(radii) = args.radii {
        cfg.solver.radius_schedule = radii;
    }
    let generator = match &cfg.graph {
        Some(GraphSource::Family(spec)) => spec.clone(),
        Some(GraphSource::File(path)) => {
            return Err(Failure::config(format!(
                "exhaustion needs a family spec, not the graph file {}",
                path.display()
            )))
        }
        None => return Err(Failure::config("no graph given; use --graph or the config 'graph' field")),
    };
    let a_spec = match &cfg.potential {
        Some(PotentialSource::Family(spec)) => spec.clone(),
        Some(PotentialSource::Inline(_)) => {
            return Err(Failure::config("exhaustion needs a potential spec; inline values have a fixed size"))
        }
        None => return Err(Failure::config("no potential given; use --potential")),
    };
    if cfg.solver.radius_schedule.is_empty() {
        return Err(Failure::config("no radius schedule; use --radii or solver.radius_schedule"));
    }
    let rows = exhaustion_study(&generator, &a_spec, &cfg.solver).map_err(Failure::config)?;

    let dir = &cfg.outputs.dir;
    if cfg.outputs.csv {
        write_file(&dir.join("exhaustion.csv"), &exhaustion_csv(&rows))?;
    }
    if cfg.outputs.json {
        write_file(&dir.join("exhaustion.json"), &to_json(&rows)?)?;
    }
    println!("{:>7} {:>8} {:>20} {:>11} {:>7} {:>11}", "radius", "vertices", "d_hat", "|change|", "iters", "tail_mass");
    let mut previous: Option<f64> = None;
    for r in &rows {
        let change = previous.map_or("-".to_string(), |p| format!("{:.3e}", (r.d_hat - p).abs()));
        println!(
            "{:>7} {:>8} {:>20.12} {:>11} {:>7} {:>11.3e}",
            r.radius, r.vertices, r.d_hat, change, r.iters, r.tail_mass
        );
        if let Some(e) = &r.error {
            println!("        error: {e}");
        }
        previous = Some(r.d_hat);
    }
    if rows.iter().all(|r| r.terminated == Some(Termination::Converged)) {
        Ok(0)
    } else {
        eprintln!("some radii did not converge");
        Ok(NOT_CONVERGED)
    }
}

/// Decades from `10^3` below `n`, then `n`.
fn decade_schedule(n: u64) -> Vec<u64> {
    let mut schedule: Vec<u64> = std::iter::successors(Some(1_000u64), |d| d.checked_mul(10))
        .take_while(|d| *d < n)
        .collect();
    schedule.push(n);
    schedule
}

fn parse_n(text: &str) -> Result<u64, Failure> {
    let n: f64 = text
        .trim()
        .parse()
        .map_err(|_| Failure::config(format!("--n expects a number such as 1e6, got '{text}'")))?;
    if !(n.is_finite() && n >= 3.0 && n.fract() == 0.0 && n <= MAX_N) {
        return Err(Failure::config(format!("--n must be an integer in [3, {MAX_N:e}], got {text}")));
    }
    Ok(n as u64)
}

fn series_report(
    args: &SeriesArgs,
    run: impl Fn(&[u64]) -> graphlog::Result<ExampleReport>,
) -> Result<u8, Failure> {
    let schedule = match &args.schedule {
        Some(s) => s.clone(),
        None => decade_schedule(parse_n(&args.n)?),
    };
    if schedule.last().is_some_and(|n| *n as f64 > MAX_N) {
        return Err(Failure::config(format!("schedule entries must not exceed {MAX_N:e}")));
    }
    let report = run(&schedule).map_err(Failure::config)?;
    println!("{report}");
    if let Some(dir) = &args.out {
        write_file(&dir.join(format!("{}.json", short_name(&report))), &to_json(&report)?)?;
        for s in [&report.l2, &report.grad, &report.logneg] {
            write_file(&dir.join(format!("{}_{}.csv", short_name(&report), s.series)), &s.to_csv())?;
        }
    }
    let verdicts = report.verdicts().map(|v| v.to_string()).join(", ");
    if report.confirms_counterexample() {
        println!("verdicts ({verdicts}) match: finite energy, divergent logarithmic energy");
        Ok(0)
    } else if report.is_inconclusive() {
        eprintln!("verdicts ({verdicts}) are inconclusive; raise --n or add schedule points");
        Ok(INCONCLUSIVE)
    } else {
        eprintln!("verdicts ({verdicts}) do not match the expected (convergent, convergent, divergent)");
        Ok(NOT_CONVERGED)
    }
}

fn short_name(report: &ExampleReport) -> &str {
    report.example.split(':').next().unwrap_or("report")
}

pub fn verify(cmd: VerifyCommand) -> Result<u8, Failure> {
    match cmd {
        VerifyCommand::Example1(args) => series_report(&args, example1_verify),
        VerifyCommand::Example2(args) => {
            series_report(&args, |s| example2_verify(&example2_default_shells(s), s))
        }
        VerifyCommand::Cepsilon(args) => {
            let eps: f64 = args
                .eps
                .trim()
                .parse()
                .map_err(|_| Failure::config(format!("--eps expects a number in (0, 1), got '{}'", args.eps)))?;
            let c = c_epsilon_estimate(eps, args.seed).map_err(Failure::config)?;
            println!("C_{} = {:.9} (grid max {:.9} at s = {:.6e})", c.eps, c.value, c.grid_max, c.argmax);
            println!("validated on {} samples: {} violations", c.samples, c.violations);
            Ok(if c.violations == 0 { 0 } else { NOT_CONVERGED })
        }
    }
}

pub fn export_dot(args: ExportDotArgs) -> Result<u8, Failure> {
    let (g, mut solution) = match GraphSource::parse(&args.graph)? {
        GraphSource::Family(spec) => (spec.generate().map_err(Failure::config)?, None),
        GraphSource::File(path) => {
            let data = load_graph_data(&path)?;
            (data.graph, data.solution)
        }
    };
    if let Some(path) = &args.solution {
        let data = load_graph_data(path)?;
        solution = Some(data.solution.ok_or_else(|| {
            Failure::config(format!("{}: no 'u' values in the solution file", path.display()))
        })?);
    }
    let u = solution
        .map(|values| VertexFunction::new(&g, values))
        .transpose()
        .map_err(Failure::config)?;
    let dot = io::to_dot(&g, u.as_ref()).map_err(Failure::config)?;
    match &args.out {
        Some(path) => write_file(path, &dot)?,
        None => print!("{dot}"),
    }
    Ok(0)
}
