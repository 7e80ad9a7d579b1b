//! Command-line entry point: one-off analysis and computation subcommands
//! plus the suite verification driver.
//!
//! Exit codes: 0 when everything passes, 1 when an assertion fails, 2 on
//! usage or spec errors.  The `WORKBENCH_OUT` environment variable may set
//! the output directory; explicit flags and spec files take precedence.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gowers_core::averages::{multilinear_average, reduction_pipeline};
use gowers_core::gowers::{norm_cyclic, norm_subset, Method, SubsetDomain};
use gowers_core::linear_systems::{LinearForm, LinearSystem};
use gowers_core::regions::{pack_cubes, preimage_region, Halfspace, LatticeRegion};
use gowers_core::series::{generate, GeneratorKind, GeneratorSpec, Series};
use gowers_workbench::corpus::ap_system;
use gowers_workbench::plot::emit_plotdata;
use gowers_workbench::report::ExperimentSpec;
use gowers_workbench::suites::{default_spec, run_suite, RunContext, SUITE_NAMES};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "workbench",
    version,
    about = "Computational workbench for linear-form systems, uniformity norms, and multilinear averages"
)]
struct Cli {
    /// Default seed for generators given without one.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Parallelism bound for suite cases (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Override the generic tolerance of approximate assertions.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SystemArgs {
    /// Arithmetic-progression system with this many terms.
    #[arg(long, conflicts_with = "row")]
    ap: Option<usize>,
    /// Coefficient row "c1,c2,..."; repeat once per form.
    #[arg(long = "row")]
    row: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Structural analysis of a linear-form system.
    Analyze {
        #[command(flatten)]
        system: SystemArgs,
        /// Largest power degree probed by the flag check.
        #[arg(long, default_value_t = 6)]
        kmax: u32,
        /// Shell radius bound for the rescaling-witness search.
        #[arg(long, default_value_t = 16)]
        search_bound: i64,
    },
    /// Uniformity norm of a generated series on a domain.
    Norm {
        /// "cyclic:M", "interval:LO..HI", or "prog:START,STEP,LEN".
        #[arg(long)]
        domain: String,
        /// Norm order parameter: computes the order-(s+1) norm.
        #[arg(long, default_value_t = 1)]
        s: u32,
        /// "fast" or "oracle".
        #[arg(long, default_value = "fast")]
        method: String,
        /// Generator: "uni[:SEED]", "pm1[:SEED]", "const:RE,IM",
        /// "poly:C0,C1,...", "bracket:ALPHA,BETA", "indicator:START,STEP".
        #[arg(long = "gen")]
        generator: String,
    },
    /// Multilinear average of generated series over the preimage region.
    Average {
        #[command(flatten)]
        system: SystemArgs,
        /// Region radius: forms are constrained to [-n, n].
        #[arg(long)]
        n: i64,
        /// Constant shift added to every form evaluation.
        #[arg(long, default_value_t = 0)]
        c: i64,
        /// One generator per form (a single one is reused for all forms).
        #[arg(long = "gen", required = true)]
        generators: Vec<String>,
        /// Also run the rescaling reduction and report its trace.
        #[arg(long)]
        pipeline: bool,
    },
    /// Pack a lattice region into dilated cubes and summarize the partition.
    Pack {
        /// Arithmetic-progression preimage region with this many terms.
        #[arg(long, conflicts_with = "halfspace")]
        ap: Option<usize>,
        /// Halfspace "c1,c2,..:BOUND"; repeat as needed (with --dim).
        #[arg(long = "halfspace")]
        halfspace: Vec<String>,
        /// Ambient dimension when building from halfspaces.
        #[arg(long)]
        dim: Option<usize>,
        /// Region radius.
        #[arg(long)]
        n: i64,
        /// Dilation modulus of the cells.
        #[arg(long, default_value_t = 1)]
        q: i64,
        /// Cube side fraction.
        #[arg(long, default_value_t = 0.25)]
        eps_prime: f64,
    },
    /// Run verification suites and write reports plus plot CSVs.
    Verify {
        /// Suite name; repeat to run several (see --list).
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Run every suite in acceptance order.
        #[arg(long)]
        all: bool,
        /// List available suites and exit.
        #[arg(long)]
        list: bool,
        /// JSON experiment-spec file overriding the suite defaults.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Output directory for reports and CSVs.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Corrupt one computed value to exercise the failure path.
        #[arg(long, hide = true)]
        self_test_fault: bool,
    },
    /// Run the qualitative norm-versus-average demo.
    Demo {
        /// Window radius schedule (each entry at most 512).
        #[arg(long = "size")]
        sizes: Vec<i64>,
        /// Output directory for the report and scatter CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = RunContext {
        jobs: cli.jobs,
        tolerance: cli.tolerance,
        fault: false,
    };
    match dispatch(cli.command, cli.seed, ctx) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command, seed: u64, mut ctx: RunContext) -> Result<ExitCode, String> {
    match command {
        Command::Analyze {
            system,
            kmax,
            search_bound,
        } => analyze(&system.build()?, kmax, search_bound),
        Command::Norm {
            domain,
            s,
            method,
            generator,
        } => norm(&domain, s, &method, &generator, seed),
        Command::Average {
            system,
            n,
            c,
            generators,
            pipeline,
        } => average(&system.build()?, n, c, &generators, pipeline, seed),
        Command::Pack {
            ap,
            halfspace,
            dim,
            n,
            q,
            eps_prime,
        } => pack(ap, &halfspace, dim, n, q, eps_prime),
        Command::Verify {
            suites,
            all,
            list,
            spec,
            out,
            self_test_fault,
        } => {
            ctx.fault = self_test_fault;
            verify(&suites, all, list, spec.as_deref(), out, &ctx)
        }
        Command::Demo { sizes, out } => demo(&sizes, out, &ctx),
    }
}

impl SystemArgs {
    fn build(&self) -> Result<LinearSystem, String> {
        if let Some(k) = self.ap {
            if k < 2 {
                return Err("a progression system needs at least 2 terms".to_string());
            }
            return Ok(ap_system(k));
        }
        if self.row.is_empty() {
            return Err("give either --ap K or at least one --row".to_string());
        }
        let rows: Vec<Vec<i64>> = self
            .row
            .iter()
            .map(|r| parse_i64_list(r))
            .collect::<Result<_, _>>()?;
        let forms: Vec<LinearForm> = rows
            .into_iter()
            .map(|coeffs| LinearForm::new(coeffs).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        LinearSystem::new(forms).map_err(|e| e.to_string())
    }
}

fn parse_i64_list(text: &str) -> Result<Vec<i64>, String> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<i64>()
                .map_err(|e| format!("bad integer `{part}`: {e}"))
        })
        .collect()
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number `{part}`: {e}"))
        })
        .collect()
}

fn parse_generator(text: &str, default_seed: u64) -> Result<GeneratorSpec, String> {
    let (kind, rest) = match text.split_once(':') {
        Some((k, r)) => (k, Some(r)),
        None => (text, None),
    };
    let seed_from = |rest: Option<&str>| -> Result<u64, String> {
        match rest {
            None => Ok(default_seed),
            Some(r) => r.parse::<u64>().map_err(|e| format!("bad seed `{r}`: {e}")),
        }
    };
    fn need<'a>(kind: &str, rest: Option<&'a str>) -> Result<&'a str, String> {
        rest.ok_or_else(|| format!("generator `{kind}` needs `:` arguments"))
    }
    let spec = match kind {
        "uni" => GeneratorSpec::new(GeneratorKind::RandomUnimodular, seed_from(rest)?),
        "pm1" => GeneratorSpec::new(GeneratorKind::RandomPm1, seed_from(rest)?),
        "const" => {
            let parts = parse_f64_list(need(kind, rest)?)?;
            if parts.len() != 2 {
                return Err("const generator needs `re,im`".to_string());
            }
            GeneratorSpec::new(
                GeneratorKind::Constant {
                    value: (parts[0], parts[1]),
                },
                0,
            )
        }
        "poly" => GeneratorSpec::new(
            GeneratorKind::PolynomialPhase {
                coeffs: parse_f64_list(need(kind, rest)?)?,
            },
            0,
        ),
        "bracket" => {
            let parts = parse_f64_list(need(kind, rest)?)?;
            if parts.len() != 2 {
                return Err("bracket generator needs `alpha,beta`".to_string());
            }
            GeneratorSpec::new(
                GeneratorKind::BracketPhase {
                    alpha: parts[0],
                    beta: parts[1],
                },
                0,
            )
        }
        "indicator" => {
            let parts = parse_i64_list(need(kind, rest)?)?;
            if parts.len() != 2 {
                return Err("indicator generator needs `start,step`".to_string());
            }
            GeneratorSpec::new(
                GeneratorKind::Indicator {
                    start: parts[0],
                    step: parts[1],
                },
                0,
            )
        }
        other => return Err(format!("unknown generator kind `{other}`")),
    };
    Ok(spec)
}

fn make_series(spec: &GeneratorSpec, lo: i64, hi: i64) -> Result<Series, String> {
    generate(spec, lo, hi).map_err(|e| e.to_string())
}

fn print_json(value: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("reports serialize")
    );
}

fn analyze(system: &LinearSystem, kmax: u32, search_bound: i64) -> Result<ExitCode, String> {
    let flag = system.is_flag(kmax).map_err(|e| e.to_string())?;
    let independence = system.independence_degree(kmax).map_err(|e| e.to_string())?;
    let complexity = system.cs_complexity().map(|c| json!(c)).unwrap_or(json!(null));
    let flagification = match system.flagify(search_bound) {
        Ok(f) => serde_json::to_value(&f).map_err(|e| e.to_string())?,
        Err(e) => json!({ "error": e.to_string() }),
    };
    print_json(&json!({
        "system": serde_json::to_value(system).map_err(|e| e.to_string())?,
        "flag_report": serde_json::to_value(&flag).map_err(|e| e.to_string())?,
        "independence_degree": independence,
        "cs_complexity": complexity,
        "flagification": flagification,
    }));
    Ok(ExitCode::SUCCESS)
}

fn parse_method(text: &str) -> Result<Method, String> {
    match text {
        "fast" => Ok(Method::Fast),
        "oracle" => Ok(Method::Oracle),
        other => Err(format!("unknown method `{other}` (use fast|oracle)")),
    }
}

fn norm(
    domain: &str,
    s: u32,
    method: &str,
    generator: &str,
    seed: u64,
) -> Result<ExitCode, String> {
    let method = parse_method(method)?;
    let spec = parse_generator(generator, seed)?;
    let (kind, rest) = domain
        .split_once(':')
        .ok_or_else(|| format!("bad domain `{domain}`"))?;
    let report = match kind {
        "cyclic" => {
            let modulus: i64 = rest.parse().map_err(|e| format!("bad modulus: {e}"))?;
            if modulus < 2 {
                return Err("cyclic modulus must be at least 2".to_string());
            }
            let f = make_series(&spec, 0, modulus - 1)?;
            norm_cyclic(&f, s).map_err(|e| e.to_string())?
        }
        "interval" => {
            let (lo, hi) = rest
                .split_once("..")
                .ok_or_else(|| format!("bad interval `{rest}` (use LO..HI)"))?;
            let lo: i64 = lo.parse().map_err(|e| format!("bad bound: {e}"))?;
            let hi: i64 = hi.parse().map_err(|e| format!("bad bound: {e}"))?;
            if lo > hi {
                return Err("interval is empty".to_string());
            }
            let f = make_series(&spec, lo, hi)?;
            norm_subset(&f, &SubsetDomain::Interval { lo, hi }, s, method)
                .map_err(|e| e.to_string())?
        }
        "prog" => {
            let parts = parse_i64_list(rest)?;
            if parts.len() != 3 || parts[1] == 0 || parts[2] < 1 {
                return Err("progression domain needs `start,step,len`".to_string());
            }
            let (start, step, len) = (parts[0], parts[1], parts[2] as u64);
            let last = start + step * (len as i64 - 1);
            let f = make_series(&spec, start.min(last), start.max(last))?;
            norm_subset(
                &f,
                &SubsetDomain::Progression { start, step, len },
                s,
                method,
            )
            .map_err(|e| e.to_string())?
        }
        other => return Err(format!("unknown domain kind `{other}`")),
    };
    print_json(&json!({
        "generator": serde_json::to_value(&spec).map_err(|e| e.to_string())?,
        "report": serde_json::to_value(&report).map_err(|e| e.to_string())?,
    }));
    Ok(ExitCode::SUCCESS)
}

fn average(
    system: &LinearSystem,
    n: i64,
    c: i64,
    generators: &[String],
    pipeline: bool,
    seed: u64,
) -> Result<ExitCode, String> {
    let t = system.forms().len();
    let specs: Vec<GeneratorSpec> = if generators.len() == 1 {
        let spec = parse_generator(&generators[0], seed)?;
        vec![spec; t]
    } else if generators.len() == t {
        generators
            .iter()
            .map(|g| parse_generator(g, seed))
            .collect::<Result<_, _>>()?
    } else {
        return Err(format!(
            "give exactly 1 or {t} generators, got {}",
            generators.len()
        ));
    };
    let functions: Vec<Series> = specs
        .iter()
        .map(|spec| make_series(spec, -n, n))
        .collect::<Result<_, _>>()?;
    let region = preimage_region(system, n).map_err(|e| e.to_string())?;
    let report = multilinear_average(system, &functions, &region, c).map_err(|e| e.to_string())?;
    let mut body = json!({
        "average": { "re": report.value.re, "im": report.value.im, "abs": report.value.norm() },
        "report": serde_json::to_value(&report).map_err(|e| e.to_string())?,
    });
    if pipeline {
        let trace = reduction_pipeline(system, &functions, n).map_err(|e| e.to_string())?;
        body["pipeline"] = serde_json::to_value(&trace).map_err(|e| e.to_string())?;
    }
    print_json(&body);
    Ok(ExitCode::SUCCESS)
}

fn pack(
    ap: Option<usize>,
    halfspace: &[String],
    dim: Option<usize>,
    n: i64,
    q: i64,
    eps_prime: f64,
) -> Result<ExitCode, String> {
    let region = if let Some(k) = ap {
        preimage_region(&ap_system(k), n).map_err(|e| e.to_string())?
    } else {
        let dim = dim.ok_or("give --dim with --halfspace (or use --ap)")?;
        let halfspaces: Vec<Halfspace> = halfspace
            .iter()
            .map(|text| {
                let (coeffs, bound) = text
                    .split_once(':')
                    .ok_or_else(|| format!("bad halfspace `{text}` (use c1,c2:BOUND)"))?;
                Ok::<_, String>(Halfspace::new(
                    parse_i64_list(coeffs)?,
                    bound.parse::<i64>().map_err(|e| format!("bad bound: {e}"))?,
                ))
            })
            .collect::<Result<_, _>>()?;
        LatticeRegion::new(dim, n, halfspaces).map_err(|e| e.to_string())?
    };
    let partition = pack_cubes(&region, q, eps_prime, n).map_err(|e| e.to_string())?;
    let cell_points: u64 = partition
        .cells
        .iter()
        .map(|cell| cell.point_count())
        .sum();
    print_json(&json!({
        "dimension": partition.dimension,
        "spacing": partition.spacing,
        "side_count": partition.side_count,
        "cells": partition.cells.len(),
        "cell_points": cell_points,
        "boundary_points": partition.boundary.len(),
        "region_points": cell_points + partition.boundary.len() as u64,
    }));
    Ok(ExitCode::SUCCESS)
}

fn resolve_out(cli_out: Option<PathBuf>, spec_out: Option<&PathBuf>) -> PathBuf {
    cli_out
        .or_else(|| spec_out.cloned())
        .or_else(|| std::env::var_os("WORKBENCH_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("workbench-out"))
}

fn run_and_report(
    spec: &ExperimentSpec,
    out: &PathBuf,
    ctx: &RunContext,
) -> Result<bool, String> {
    let report = run_suite(spec, ctx).map_err(|e| e.to_string())?;
    report.write_json(out).map_err(|e| e.to_string())?;
    emit_plotdata(&report, out).map_err(|e| e.to_string())?;
    if report.all_pass() {
        println!(
            "{}: PASS — {} cases, {} ms",
            report.suite,
            report.cases.len(),
            report.wall_ms
        );
    } else {
        println!(
            "{}: FAIL — {}/{} cases failed ({}), {} ms",
            report.suite,
            report.failed,
            report.cases.len(),
            report.failing_cases().join(", "),
            report.wall_ms
        );
    }
    Ok(report.all_pass())
}

fn verify(
    suites: &[String],
    all: bool,
    list: bool,
    spec_path: Option<&std::path::Path>,
    out: Option<PathBuf>,
    ctx: &RunContext,
) -> Result<ExitCode, String> {
    if list {
        for name in SUITE_NAMES {
            println!("{name}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let specs: Vec<ExperimentSpec> = if let Some(path) = spec_path {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let spec: ExperimentSpec =
            serde_json::from_str(&text).map_err(|e| format!("bad spec file: {e}"))?;
        if !suites.is_empty() && !suites.contains(&spec.suite) {
            return Err(format!(
                "spec file is for suite `{}`, which is not in the --suite list",
                spec.suite
            ));
        }
        vec![spec]
    } else {
        let names: Vec<&str> = if all {
            SUITE_NAMES.to_vec()
        } else {
            suites.iter().map(String::as_str).collect()
        };
        if names.is_empty() {
            return Err("choose --all, --suite NAME, or --spec FILE".to_string());
        }
        names
            .into_iter()
            .map(|name| default_spec(name).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?
    };
    let mut all_pass = true;
    for spec in &specs {
        let out_dir = resolve_out(out.clone(), spec.output.as_ref());
        all_pass &= run_and_report(spec, &out_dir, ctx)?;
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn demo(sizes: &[i64], out: Option<PathBuf>, ctx: &RunContext) -> Result<ExitCode, String> {
    let mut spec = default_spec("qualitative-demo").map_err(|e| e.to_string())?;
    if !sizes.is_empty() {
        spec.sizes = sizes.to_vec();
    }
    let out_dir = resolve_out(out, spec.output.as_ref());
    let pass = run_and_report(&spec, &out_dir, ctx)?;
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
