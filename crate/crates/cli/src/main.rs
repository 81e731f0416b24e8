//! `dri`: synthesize, verify and stress-test robust deferred-inspection
//! mechanisms from the command line.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dri_core::adversary::{
    dirac_bound, three_point_worst_case, two_agent_upper_bound, two_agent_worst_case,
    two_point_worst_case,
};
use dri_core::experiments::{
    comparison_csv, contamination, default_guarantee_grid, guarantee_curves, guarantees_csv, uniform_comparison,
};
use dri_core::io::{artifact_kind, mechanism_from_json, mechanism_to_json};
use dri_core::multi_agent::{check_table, solve_multi_agent, table_surfaces, ConstraintSet, MultiAgentTable, MuContext};
use dri_core::single_agent::{
    blended_mechanism, clipped_linear_mechanism, linear_mechanism, maximal_payment_mechanism, moment_frontier_lp,
    mu_prime, mu_prime_objective, three_point_maximal, three_point_value, three_point_mechanism, z_star,
};
use dri_core::verify::{check_feasibility, SLACK_TOL};
use dri_core::{Error, GridDistribution, MomentSet};
use serde_json::json;

const EXIT_DOMAIN: u8 = 1;
const EXIT_NUMERIC: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "dri", version, about = "Robust mechanisms with deferred inspection")]
struct Cli {
    /// Report failures as a JSON object on stderr.
    #[arg(long, global = true)]
    json_errors: bool,

    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RuleArg {
    Linear,
    Clipped,
    Blended,
    Maximal,
    ThreePoint,
    ThreePointMaximal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Experiment {
    Contamination,
    UniformTable,
    Guarantees,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SweepWhat {
    Zstar,
    MuPrime,
    TwoAgentBound,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a closed-form mechanism and print it as JSON.
    #[command(after_help = "Example:\n  dri synth --mu 0.5 --rule linear")]
    Synth {
        #[arg(long)]
        mu: f64,
        #[arg(long, value_enum)]
        rule: RuleArg,
        /// Weight on the linear payment for `--rule blended`.
        #[arg(long, default_value_t = 0.5)]
        weight: f64,
    },
    /// Worst-case distribution and value for a given mean.
    #[command(after_help = "Example:\n  dri worst-case --mu 0.5 --agents 1 --points 2")]
    WorstCase {
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
        agents: u8,
        /// Support size of the single-agent adversary.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
        points: u8,
    },
    /// Re-check a mechanism or multi-agent table written by this tool.
    #[command(after_help = "Example:\n  dri verify mech.json --grid 2001 --strict")]
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 2001)]
        grid: usize,
        /// Also require ordered breakpoints and a nondecreasing allocation.
        #[arg(long)]
        strict: bool,
    },
    /// Discretized moment-frontier program for a single agent.
    #[command(after_help = "Example:\n  dri frontier --moments 0.5,0.3333333333 --grid 201")]
    Frontier {
        #[arg(long, value_delimiter = ',', required = true)]
        moments: Vec<f64>,
        #[arg(long, default_value_t = 201)]
        grid: usize,
    },
    /// Solve the multi-agent program and print the table.
    #[command(after_help = "Example:\n  dri multi-agent --agents 2 --grid 15 --flags published,p_monotone_other_down")]
    MultiAgent {
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
        agents: u8,
        #[arg(long)]
        grid: usize,
        /// Constraint flags, comma separated; `published` expands to the published set.
        #[arg(long, value_delimiter = ',', default_value = "published")]
        flags: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Grid index of agent 3 for the CSV slice.
        #[arg(long, default_value_t = 0)]
        fix_third: usize,
    },
    /// Reproduce one of the numerical studies.
    #[command(after_help = "Example:\n  dri experiment contamination --grid 100 --eps-steps 101 --format csv")]
    Experiment {
        #[arg(value_enum)]
        which: Experiment,
        #[arg(long, default_value_t = 100)]
        grid: usize,
        #[arg(long, default_value_t = 101)]
        eps_steps: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Tabulate a scalar quantity over an interval as CSV.
    #[command(after_help = "Example:\n  dri sweep --what zstar --from 0.3 --to 0.9 --steps 7")]
    Sweep {
        #[arg(long, value_enum)]
        what: SweepWhat,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::TooLarge { .. } => (EXIT_DOMAIN, "too_large"),
            Error::Parse { .. } => (EXIT_DOMAIN, "parse"),
            e if e.is_domain() => (EXIT_DOMAIN, "domain"),
            _ => (EXIT_NUMERIC, "numeric"),
        };
        Failure { code, kind, message: e.to_string() }
    }
}

fn domain(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_DOMAIN, kind: "domain", message: message.into() }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = run(&cli.command).and_then(|text| emit(cli.output.as_ref(), &text));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if cli.json_errors {
                eprintln!("{}", json!({ "error": f.kind, "message": f.message, "exit_code": f.code }));
            } else {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| domain(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cmd: &Command) -> Outcome {
    match *cmd {
        Command::Synth { mu, rule, weight } => synth(mu, rule, weight),
        Command::WorstCase { mu, agents, points } => worst_case(mu, agents, points),
        Command::Verify { ref file, grid, strict } => verify(file, grid, strict),
        Command::Frontier { ref moments, grid } => {
            let k = MomentSet::new(1, moments.clone())?;
            let f = moment_frontier_lp(&k, grid)?;
            Ok(pretty(&f))
        }
        Command::MultiAgent { agents, grid, ref flags, format, fix_third } => {
            multi_agent(agents as usize, grid, flags, format, fix_third)
        }
        Command::Experiment { which, grid, eps_steps, format } => experiment(which, grid, eps_steps, format),
        Command::Sweep { what, from, to, steps } => sweep(what, from, to, steps),
    }
}

fn pretty<T: serde::Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn synth(mu: f64, rule: RuleArg, weight: f64) -> Outcome {
    let built = match rule {
        RuleArg::Linear => linear_mechanism(mu),
        RuleArg::Clipped => clipped_linear_mechanism(mu),
        RuleArg::Blended => blended_mechanism(mu, weight),
        RuleArg::Maximal => maximal_payment_mechanism(mu),
        RuleArg::ThreePoint => three_point_mechanism(mu),
        RuleArg::ThreePointMaximal => three_point_maximal(mu),
    };
    let m = built.map_err(|e| {
        let mut f = Failure::from(e);
        if f.code == EXIT_DOMAIN && mu > 0.0 && mu < mu_prime().mu_prime {
            f.message.push_str("; try `--rule three-point`");
        }
        f
    })?;
    Ok(mechanism_to_json(&m) + "\n")
}

fn worst_case(mu: f64, agents: u8, points: u8) -> Outcome {
    let (value, dist) = match (agents, points) {
        (1, 2) => (z_star(mu)?, two_point_worst_case(mu)?),
        (1, _) => (three_point_value(mu), three_point_worst_case(mu)?),
        (2, _) => {
            let w = two_agent_worst_case(mu)?;
            (w.f_mu, w.distribution)
        }
        _ => (dirac_bound(mu, 3)?, GridDistribution::new(3, vec![vec![mu; 3]], vec![1.0])?),
    };
    Ok(pretty(&json!({ "kind": "worst_case", "mu": mu, "agents": agents, "value": value, "distribution": dist })))
}

fn verify(file: &PathBuf, grid: usize, strict: bool) -> Outcome {
    let text = fs::read_to_string(file).map_err(|e| domain(format!("cannot read {}: {e}", file.display())))?;
    match artifact_kind(&text)?.as_str() {
        "single_agent" => {
            let m = mechanism_from_json(&text)?;
            let rep = check_feasibility(&m, grid)?;
            let mut problems = Vec::new();
            if !rep.is_feasible(SLACK_TOL) {
                problems.push(format!(
                    "IC slack {:e} at {:?}, IR slack {:e} at {}",
                    rep.min_ic_slack, rep.ic_argmin, rep.min_ir_slack, rep.ir_argmin
                ));
            }
            if strict {
                if !m.params.breakpoints_ordered() {
                    problems.push("breakpoints out of order".into());
                }
                let nu = dri_core::grid::uniform_grid(grid)?;
                let x = m.allocation.sample(&nu);
                if x.windows(2).any(|w| w[1] < w[0] - SLACK_TOL) {
                    problems.push("allocation decreases".into());
                }
            }
            finish_verify(pretty(&json!({ "kind": "single_agent", "report": rep, "problems": problems })), &problems)
        }
        "multi_agent" => {
            let t = MultiAgentTable::from_json(&text)?;
            if !t.is_feasible() {
                return Ok(pretty(&json!({ "kind": "multi_agent", "status": t.status, "problems": [] })));
            }
            let c = check_table(&t)?;
            let worst = [c.ds_ic, c.ep_ir, c.allocation, c.aggregate, c.dominance, c.symmetry, c.monotone];
            let mut problems = Vec::new();
            if worst.iter().any(|v| *v > 1e-7) {
                problems.push(format!("residuals above 1e-7: {c:?}"));
            }
            finish_verify(pretty(&json!({ "kind": "multi_agent", "residuals": c, "problems": problems })), &problems)
        }
        other => Err(domain(format!("cannot verify artifacts of kind {other:?}"))),
    }
}

fn finish_verify(report: String, problems: &[String]) -> Outcome {
    if problems.is_empty() {
        Ok(report)
    } else {
        print!("{report}");
        Err(domain(format!("verification failed: {}", problems.join("; "))))
    }
}

fn multi_agent(agents: usize, grid: usize, flags: &[String], format: Format, fix_third: usize) -> Outcome {
    let mut cs = ConstraintSet::default();
    let mut named = Vec::new();
    for f in flags {
        if f == "published" {
            let p = ConstraintSet::published(agents);
            named.extend(p.names());
        } else if !f.is_empty() {
            named.push(f.clone());
        }
    }
    if !named.is_empty() {
        cs = ConstraintSet::from_names(&named)?;
    }
    let ctx = if agents == 2 { MuContext::two_agent_default()? } else { MuContext::ThreeAgent };
    let t = solve_multi_agent(agents, grid, &ctx, &cs)?;
    match format {
        Format::Json => Ok(t.to_json() + "\n"),
        Format::Csv => {
            if !t.is_feasible() {
                return Err(domain(format!("program is {:?}; no surfaces to write", t.status)));
            }
            let fixed: Vec<Option<usize>> = if agents == 2 { vec![None, None] } else { vec![None, None, Some(fix_third)] };
            Ok(table_surfaces(&t, &fixed)?)
        }
        Format::Svg => Err(domain("multi-agent output is json or csv")),
    }
}

fn experiment(which: Experiment, grid: usize, eps_steps: usize, format: Format) -> Outcome {
    match which {
        Experiment::Contamination => {
            let run = contamination(grid, eps_steps)?;
            Ok(match format {
                Format::Csv => run.csv(),
                Format::Json => run.summary_json() + "\n",
                Format::Svg => run.svg(),
            })
        }
        Experiment::UniformTable => {
            let rows = uniform_comparison()?;
            match format {
                Format::Csv => Ok(comparison_csv(&rows)),
                Format::Json => Ok(pretty(&rows)),
                Format::Svg => Err(domain("uniform-table output is csv or json")),
            }
        }
        Experiment::Guarantees => {
            let rows = guarantee_curves(&default_guarantee_grid())?;
            match format {
                Format::Csv => Ok(guarantees_csv(&rows)),
                Format::Json => Ok(pretty(&rows)),
                Format::Svg => Err(domain("guarantees output is csv or json")),
            }
        }
    }
}

fn sweep(what: SweepWhat, from: f64, to: f64, steps: usize) -> Outcome {
    if steps < 2 || from.partial_cmp(&to) != Some(std::cmp::Ordering::Less) {
        return Err(domain("sweep needs --from < --to and at least 2 steps"));
    }
    let pts: Vec<f64> = (0..steps).map(|k| from + (to - from) * k as f64 / (steps - 1) as f64).collect();
    let mut out = String::new();
    match what {
        SweepWhat::Zstar => {
            out.push_str("mu,z_star\n");
            for &mu in &pts {
                out.push_str(&format!("{mu},{}\n", z_star(mu)?));
            }
        }
        SweepWhat::MuPrime => {
            out.push_str("t,z\n");
            for &t in &pts {
                let z = mu_prime_objective(t).map_or_else(|| "nan".to_string(), |z| z.to_string());
                out.push_str(&format!("{t},{z}\n"));
            }
        }
        SweepWhat::TwoAgentBound => {
            let b = two_agent_upper_bound(&pts)?;
            out.push_str("mu,f,g,hull\n");
            for p in &b.curve {
                out.push_str(&format!("{},{},{},{}\n", p.mu, p.f, p.g, p.hull));
            }
        }
    }
    Ok(out)
}
