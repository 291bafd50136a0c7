//! Command-line front end.
//!
//! Results go to stdout as `key=value` lines and diagnostics go to stderr.
//! Exit codes: 0 success, 1 verification or self-test failure, 2 bad
//! input, 3 internal invariant violation.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::thread;

use clap::{Parser, Subcommand};

use crate::certificate::{verify_certificate, DualCertificate};
use crate::error::Error;
use crate::generators::{
    desk_instance, from_set_cover, greedy_hard, random_quasi_bipartite, random_set_cover, RandomParams,
};
use crate::instance::{parse_instance, serialize_instance, Instance};
use crate::oracle::{brute_force_opt, exact_opt, DEFAULT_K_LIMIT, DEFAULT_M_LIMIT};
use crate::rational::Rational;
use crate::solver::{solve_with, SolveOptions, SolveResult};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "quasi-dst", version, about = "Directed Steiner trees on quasi-bipartite graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve an instance and print cost, lower bound and guarantee.
    Solve {
        instance: PathBuf,
        /// Write the dual certificate (JSON) here.
        #[arg(long)]
        cert: Option<PathBuf>,
        /// Write the chosen arcs here, one `tail head cost` line each.
        #[arg(long)]
        solution: Option<PathBuf>,
        /// Check every engine invariant after every event (slow).
        #[arg(long)]
        checked: bool,
    },
    /// Check a certificate against an instance.
    Verify { instance: PathBuf, certificate: PathBuf },
    /// Compute the exact optimum of a small instance.
    Exact {
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_K_LIMIT)]
        k_limit: usize,
        /// Enumerate arc subsets instead of running the subset DP.
        #[arg(long)]
        brute: bool,
        #[arg(long, default_value_t = DEFAULT_M_LIMIT)]
        m_limit: usize,
    },
    /// Write a generated instance.
    Gen {
        #[command(subcommand)]
        family: Family,
        #[arg(long, global = true, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Solve, verify and compare against the exact optimum on random instances.
    Selftest {
        #[arg(long, default_value_t = 200)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum Family {
    /// Random set system reduced to a two-layer instance.
    Setcover { universe: usize, sets: usize },
    /// Random quasi-bipartite instance.
    Random {
        terminals: usize,
        steiner: usize,
        /// Arc probability in (0, 1], e.g. `0.3` or `3/10`.
        density: Rational,
        min_cost: u64,
        max_cost: u64,
    },
    /// Singletons of cost 1/i plus the full set of cost 1 + 1/n.
    Greedyhard { n: usize },
}

/// Runs the CLI with explicit streams and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Solve { instance, cert, solution, checked } => {
            cmd_solve(&instance, cert.as_deref(), solution.as_deref(), checked, out)
        }
        Command::Verify { instance, certificate } => cmd_verify(&instance, &certificate, out, err),
        Command::Exact { instance, k_limit, brute, m_limit } => cmd_exact(&instance, k_limit, brute, m_limit, out),
        Command::Gen { family, seed, output } => cmd_gen(family, seed, output.as_deref(), out),
        Command::Selftest { count, seed, threads } => cmd_selftest(count, seed, threads, out, err),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Invariant { .. } => EXIT_INTERNAL,
            _ => EXIT_INPUT,
        };
        Failure(code, e.to_string())
    }
}

type CmdResult = Result<i32, Failure>;

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure(EXIT_INPUT, format!("{}: {e}", path.display()))
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    parse_instance(&text).map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key}={value}");
}

/// One `tail head cost` line per arc, 1-based node ids, ascending arc order.
pub fn solution_text(inst: &Instance, result: &SolveResult) -> String {
    result
        .solution_arcs
        .iter()
        .map(|&a| {
            let arc = inst.arc(a);
            format!("{} {} {}\n", arc.tail, arc.head, arc.cost)
        })
        .collect()
}

fn cmd_solve(
    path: &Path,
    cert: Option<&Path>,
    solution: Option<&Path>,
    checked: bool,
    out: &mut dyn Write,
) -> CmdResult {
    let inst = read_instance(path)?;
    let result = solve_with(&inst, SolveOptions { checked })?;
    emit(out, "cost", &result.total_cost);
    emit(out, "lb", &result.dual_lower_bound);
    emit(out, "bound", &result.harmonic_bound);
    emit(out, "phases", result.phase_count());
    emit(out, "arcs", result.solution_arcs.len());
    if let Some(p) = cert {
        fs::write(p, result.certificate.to_json() + "\n").map_err(|e| io_failure(p, e))?;
    }
    if let Some(p) = solution {
        fs::write(p, solution_text(&inst, &result)).map_err(|e| io_failure(p, e))?;
    }
    Ok(EXIT_OK)
}

fn cmd_verify(inst_path: &Path, cert_path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let inst = read_instance(inst_path)?;
    let text = fs::read_to_string(cert_path).map_err(|e| io_failure(cert_path, e))?;
    let cert = DualCertificate::from_json(&text)
        .map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", cert_path.display())))?;
    let report = verify_certificate(&inst, &cert);
    let _ = write!(out, "{report}");
    emit(out, "lb", &report.lower_bound);
    emit(out, "bound", &report.bound);
    for c in report.checks.iter().filter(|c| !c.ok()) {
        for f in &c.failures {
            let _ = writeln!(err, "{}: {f}", c.name);
        }
    }
    Ok(if report.ok() { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_exact(path: &Path, k_limit: usize, brute: bool, m_limit: usize, out: &mut dyn Write) -> CmdResult {
    let inst = read_instance(path)?;
    let res = if brute { brute_force_opt(&inst, m_limit)? } else { exact_opt(&inst, k_limit)? };
    emit(out, "opt", &res.opt_cost);
    emit(out, "arcs", res.opt_arcs.len());
    Ok(EXIT_OK)
}

fn cmd_gen(family: Family, seed: u64, output: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    let inst = match family {
        Family::Setcover { universe, sets } => from_set_cover(&random_set_cover(universe, sets, seed)?)?,
        Family::Random { terminals, steiner, density, min_cost, max_cost } => {
            let params = RandomParams::new(terminals, steiner, density, (min_cost, max_cost));
            random_quasi_bipartite(&params, seed)?
        }
        Family::Greedyhard { n } => from_set_cover(&greedy_hard(n)?)?,
    };
    let text = serialize_instance(&inst);
    match output {
        Some(p) => fs::write(p, text).map_err(|e| io_failure(p, e))?,
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    Ok(EXIT_OK)
}

/// Outcome of the sandwich check on one generated instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelftestCase {
    pub seed: u64,
    pub cost: Rational,
    pub opt: Rational,
    pub lower_bound: Rational,
    pub problems: Vec<String>,
}

/// Checks `LB <= OPT <= cost <= 2 H_k LB`, certificate validity and the
/// per-phase bound on the desk instance for `seed`, in checked mode.
pub fn selftest_case(seed: u64) -> SelftestCase {
    let inst = desk_instance(seed);
    let mut problems = Vec::new();
    let zero = Rational::zero();
    let result = match solve_with(&inst, SolveOptions { checked: true }) {
        Ok(r) => r,
        Err(e) => {
            return SelftestCase {
                seed,
                cost: zero.clone(),
                opt: zero.clone(),
                lower_bound: zero,
                problems: vec![format!("solve: {e}")],
            }
        }
    };
    let report = verify(&inst, &result);
    if !report.ok() {
        problems.push(format!("verify failed: {:?}", report.failed()));
    }
    for (p, ph) in result.phases.iter().enumerate() {
        let added = &ph.cost_after - &ph.cost_before;
        if added > ph.allowance() {
            problems.push(format!("phase {p}: added {added} > {}", ph.allowance()));
        }
    }
    let opt = match exact_opt(&inst, DEFAULT_K_LIMIT) {
        Ok(r) => r.opt_cost,
        Err(e) => {
            problems.push(format!("exact: {e}"));
            zero
        }
    };
    let lb = &result.dual_lower_bound;
    if !(lb <= &opt && opt <= result.total_cost && result.total_cost <= result.harmonic_bound) {
        problems.push(format!(
            "sandwich broken: lb {lb}, opt {opt}, cost {}, bound {}",
            result.total_cost, result.harmonic_bound
        ));
    }
    SelftestCase { seed, cost: result.total_cost, opt, lower_bound: lb.clone(), problems }
}

/// Runs [`selftest_case`] for `count` consecutive seeds on worker threads.
/// Results come back in seed order.
pub fn run_selftest(count: u64, seed: u64, threads: usize) -> Vec<SelftestCase> {
    let seeds: Vec<u64> = (0..count).map(|i| seed.wrapping_add(i)).collect();
    let threads = threads.max(1).min(seeds.len().max(1));
    let chunk = seeds.len().div_ceil(threads).max(1);
    thread::scope(|s| {
        let handles: Vec<_> = seeds
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|&sd| selftest_case(sd)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("selftest worker panicked")).collect()
    })
}

fn cmd_selftest(count: u64, seed: u64, threads: Option<usize>, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let threads = threads.unwrap_or_else(|| thread::available_parallelism().map_or(1, |n| n.get()));
    let cases = run_selftest(count, seed, threads);
    let mut failures = 0;
    let mut worst: Option<Rational> = None;
    for c in &cases {
        if !c.problems.is_empty() {
            failures += 1;
            for p in &c.problems {
                let _ = writeln!(err, "seed {}: {p}", c.seed);
            }
        } else if c.opt.is_positive() {
            let ratio = &c.cost / &c.opt;
            if worst.as_ref().is_none_or(|w| &ratio > w) {
                worst = Some(ratio);
            }
        }
    }
    emit(out, "instances", cases.len());
    emit(out, "failures", failures);
    emit(out, "max_ratio", worst.unwrap_or_else(Rational::one));
    Ok(if failures == 0 { EXIT_OK } else { EXIT_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("quasi-dst").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn bad_arguments_exit_two() {
        let (code, _, err) = run_capture(&["solve"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(!err.is_empty());
        assert_eq!(run_capture(&["frobnicate"]).0, EXIT_INPUT);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("selftest"));
    }

    #[test]
    fn missing_file_exits_two() {
        let (code, _, err) = run_capture(&["solve", "/nonexistent/instance.txt"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("nonexistent"));
    }

    #[test]
    fn greedy_hard_to_stdout() {
        let (code, out, _) = run_capture(&["gen", "greedyhard", "2"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.starts_with("Nodes 6\n"));
        assert!(out.contains("A 1 3 1/2\n"));
    }

    #[test]
    fn small_selftest() {
        let cases = run_selftest(6, 11, 3);
        assert_eq!(cases.iter().map(|c| c.seed).collect::<Vec<_>>(), (11..17).collect::<Vec<_>>());
        assert!(cases.iter().all(|c| c.problems.is_empty()), "{cases:?}");
    }
}
