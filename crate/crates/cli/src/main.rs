use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use hypermatch::bench::{
    default_quality_grid, default_time_grid, effectiveness_report, parse_manifest, quality_profile, run_pipeline,
    time_profile, CapacitySource, InputFormat, LocalSearch, ProfileCurve, ProfileRecord, Report, RunConfig, RunRecord,
    SolveConfig, WeightSpec,
};
use hypermatch::{export_lp, IlsConfig, PriorityFunction, ReductionConfig, RuleSet};

#[derive(Parser)]
#[command(name = "hypermatch", version, about = "Weighted hypergraph b-matching: reduce, solve, evaluate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce an instance, solve the kernel and map the solution back.
    Solve(SolveArgs),
    /// Performance profile points from a records file.
    Profile(ProfileArgs),
    /// Kernel sizes and rule effects per instance class.
    Effectiveness(EffectivenessArgs),
}

#[derive(clap::Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "hmetis")]
    format: InputFormat,
    /// const:<k>, rand or file:<path>
    #[arg(long = "b", default_value = "const:1")]
    capacities: CapacitySource,
    /// file or uniform:<lo>:<hi>
    #[arg(long, default_value = "file")]
    weights: WeightSpec,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// all, none or a comma separated subset of av,nr,wier,wd,wef,wt
    #[arg(long, default_value = "all")]
    reductions: RuleSet,
    #[arg(long, default_value = "pin")]
    initial: PriorityFunction,
    #[arg(long, default_value = "none")]
    ls: LocalSearch,
    #[arg(long, default_value_t = 15)]
    ils_k: usize,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    /// Write the kernel as an LP file.
    #[arg(long)]
    export_lp: Option<PathBuf>,
    /// Write a JSON report.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Append the record as one JSON line.
    #[arg(long)]
    records: Option<PathBuf>,
    /// Leave wall times out so reports are reproducible byte for byte.
    #[arg(long)]
    omit_timings: bool,
    /// Algorithm name in the record; derived from the settings by default.
    #[arg(long)]
    label: Option<String>,
    #[arg(long)]
    class: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Quality,
    Time,
}

#[derive(clap::Args)]
struct ProfileArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long)]
    records: PathBuf,
    /// CSV output with columns algorithm,tau,fraction.
    #[arg(long)]
    out: PathBuf,
    /// Comma separated τ values; defaults to 100 points on [0.8, 1] for
    /// quality and on [1, 64] (log spaced) for time.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
}

#[derive(clap::Args)]
struct EffectivenessArgs {
    #[arg(long)]
    records: PathBuf,
    /// Lines of `<instance> <class>`.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn json_lines<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    read(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("{}:{}", path.display(), i + 1)))
        .collect()
}

fn solve(args: SolveArgs) -> Result<()> {
    let cfg = RunConfig {
        input: args.input,
        format: args.format,
        weights: args.weights,
        capacities: args.capacities,
        solve: SolveConfig {
            reductions: ReductionConfig::with_rules(args.reductions),
            initial: args.initial,
            local_search: args.ls,
            ils: IlsConfig {
                k: args.ils_k,
                ..Default::default()
            },
            seed: args.seed,
            reps: args.reps,
            timings: !args.omit_timings,
        },
        label: args.label,
        class: args.class,
    };
    let out = run_pipeline(&cfg)?;
    let rec = &out.record;
    if let Some(path) = &args.export_lp {
        write(path, &export_lp(&out.kernel.kernel, &out.kernel.capacities))?;
    }
    if let Some(path) = &args.report {
        let report = Report {
            records: vec![rec.clone()],
        };
        write(path, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    }
    if let Some(path) = &args.records {
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .with_context(|| format!("cannot open {}", path.display()))?;
        writeln!(file, "{}", serde_json::to_string(rec)?)?;
    }
    let r = &rec.reduction;
    println!(
        "{} {} weight {} (mean {:.2}) kernel {}/{} edges {}/{} vertices, offset {}, feasible",
        rec.instance,
        rec.algorithm,
        rec.best_weight,
        rec.weight,
        r.edges_after,
        r.edges_before,
        r.vertices_after,
        r.vertices_before,
        rec.weight_offset,
    );
    Ok(())
}

fn profile(args: ProfileArgs) -> Result<()> {
    let records: Vec<ProfileRecord> = json_lines(&args.records)?;
    let curves: Vec<ProfileCurve> = match args.mode {
        Mode::Quality => quality_profile(&records, &args.grid.unwrap_or_else(default_quality_grid))?,
        Mode::Time => time_profile(&records, &args.grid.unwrap_or_else(default_time_grid))?,
    };
    let mut csv = String::from("algorithm,tau,fraction\n");
    for c in &curves {
        for (tau, frac) in &c.points {
            csv.push_str(&format!("{},{tau},{frac}\n", c.algorithm));
        }
    }
    write(&args.out, &csv)?;
    println!("{} curves, {} points each", curves.len(), curves.first().map_or(0, |c| c.points.len()));
    Ok(())
}

fn effectiveness(args: EffectivenessArgs) -> Result<()> {
    let records: Vec<RunRecord> = json_lines(&args.records)?;
    if records.is_empty() {
        bail!("{} holds no records", args.records.display());
    }
    let manifest = match &args.manifest {
        Some(path) => parse_manifest(&read(path)?)?,
        None => Default::default(),
    };
    let summary = effectiveness_report(&records, &manifest);
    println!("class instances edges(before->after) vertices(before->after) rel_edges rel_vertices geo_speedup");
    for s in &summary {
        println!(
            "{} {} {:.1}->{:.1} {:.1}->{:.1} {:.3} {:.3} {}",
            s.class,
            s.instances,
            s.edges_before,
            s.edges_after,
            s.vertices_before,
            s.vertices_after,
            s.relative_edges,
            s.relative_vertices,
            s.geometric_speedup.map_or_else(|| "-".to_string(), |g| format!("{g:.2}")),
        );
    }
    if let Some(path) = &args.out {
        write(path, &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let result = match Cli::parse().command {
        Command::Solve(args) => solve(args),
        Command::Profile(args) => profile(args),
        Command::Effectiveness(args) => effectiveness(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // Library errors already embed their source in the message.
            let mut msg = e.to_string();
            for cause in e.chain().skip(1) {
                let cause = cause.to_string();
                if !msg.contains(&cause) {
                    msg = format!("{msg}: {cause}");
                }
            }
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
