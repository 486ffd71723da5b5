//! `grasp`: command-line front end for the grasp-maps library.
//!
//! Thin shell over the library: every subcommand parses arguments (angles
//! in degrees, lengths unitless), calls the corresponding library routine,
//! and writes deterministic artifacts.
//!
//! Exit codes: 0 success, 1 validation/usage error, 2 sweep finished with
//! quarantined pairs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use grasp_maps::caging::{map_trajectories, score_trajectories, write_trajectories};
use grasp_maps::contact_solver::ActuationCommand;
use grasp_maps::energy_map::{build_energy_map, EnergyMap, GridSpec};
use grasp_maps::kinematics::{GrasperDesign, ObjectSpec};
use grasp_maps::manipulation::{compare_scenarios, ScenarioComparison};
use grasp_maps::plot;
use grasp_maps::sweep::{
    cage_vs_tip_table, load_store, run_sweep, SweepConfig, SweepResult,
};

const PARALLELISM_ENV: &str = "GRASP_PARALLELISM";

#[derive(Parser)]
#[command(name = "grasp", version, about = "Energy-map analysis of two-phalanx underactuated graspers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build one energy map and write CSV, JSON header, and SVG heatmap.
    Map(MapArgs),
    /// Build a map, follow all descent trajectories, and score caging.
    Cage(MapArgs),
    /// Run or resume a design-space sweep.
    Sweep(SweepArgs),
    /// Evaluate the manipulation metric for both scenarios from a sweep store.
    Manip(ManipArgs),
    /// Print design rankings from a sweep store.
    Rank(RankArgs),
    /// Render sweep figures.
    Plot(PlotArgs),
}

#[derive(Args)]
struct GeometryArgs {
    #[arg(long)]
    l1: f64,
    #[arg(long)]
    l2: f64,
    #[arg(long)]
    r1: f64,
    #[arg(long)]
    r2: f64,
    #[arg(long)]
    w: f64,
    /// Object radius.
    #[arg(long)]
    object_r: f64,
    /// Static friction coefficient.
    #[arg(long)]
    object_mu: f64,
    /// Proximal joint limits in degrees.
    #[arg(long, default_value_t = 0.0)]
    theta1_min_deg: f64,
    #[arg(long, default_value_t = 180.0)]
    theta1_max_deg: f64,
    /// Distal joint limits in degrees.
    #[arg(long, default_value_t = -5.0)]
    theta2_min_deg: f64,
    #[arg(long, default_value_t = 90.0)]
    theta2_max_deg: f64,
}

impl GeometryArgs {
    fn build(&self) -> Result<(GrasperDesign<f64>, ObjectSpec<f64>), String> {
        let mut design = GrasperDesign::new(self.l1, self.l2, self.r1, self.r2, self.w)
            .map_err(|e| e.to_string())?;
        design.theta1_limits = (
            self.theta1_min_deg.to_radians(),
            self.theta1_max_deg.to_radians(),
        );
        design.theta2_limits = (
            self.theta2_min_deg.to_radians(),
            self.theta2_max_deg.to_radians(),
        );
        design.validate().map_err(|e| e.to_string())?;
        let object = ObjectSpec::new(self.object_r, self.object_mu).map_err(|e| e.to_string())?;
        Ok((design, object))
    }
}

#[derive(Args)]
struct MapArgs {
    #[command(flatten)]
    geometry: GeometryArgs,
    #[arg(long, default_value_t = 1.0)]
    f_left: f64,
    #[arg(long, default_value_t = 1.0)]
    f_right: f64,
    /// Grid spacing of the map.
    #[arg(long, default_value_t = 0.05)]
    resolution: f64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

impl MapArgs {
    fn build_map(&self) -> Result<EnergyMap<f64>, String> {
        let (design, object) = self.geometry.build()?;
        let command =
            ActuationCommand::new(self.f_left, self.f_right).map_err(|e| e.to_string())?;
        let grid = GridSpec::with_resolution(&design, &object, self.resolution);
        build_energy_map(&design, &object, &command, grid).map_err(|e| e.to_string())
    }
}

#[derive(Args)]
struct SweepArgs {
    /// Scale preset used as the configuration base.
    #[arg(long, value_enum, default_value_t = PresetArg::Desk)]
    preset: PresetArg,
    /// JSON configuration file replacing the preset entirely.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dotted-path overrides, e.g. --set map_resolution=0.3 or --set l1.step=0.4.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Output directory (overrides the configuration's output_dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 = library default. Falls back to $GRASP_PARALLELISM.
    #[arg(long)]
    parallelism: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Paper,
    Desk,
    Smoke,
}

#[derive(Args)]
struct ManipArgs {
    /// Sweep store directory.
    #[arg(long)]
    store: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Number of best caging designs used as Scenario A bases.
    #[arg(long, default_value_t = 5)]
    top_k: usize,
    /// Total actuation force shared by both fingers in Scenario A.
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.2)]
    force_step: f64,
    /// Restrict evaluation to these object indices (repeatable).
    #[arg(long = "object")]
    objects: Vec<usize>,
    /// Override the store's map resolution for metric grids.
    #[arg(long)]
    resolution: Option<f64>,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long)]
    store: PathBuf,
    /// Only print this object index.
    #[arg(long)]
    object: Option<usize>,
    /// Show this many designs per object.
    #[arg(long, default_value_t = 5)]
    top: usize,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    store: PathBuf,
    #[arg(long, value_enum)]
    figure: FigureArg,
    #[arg(long)]
    out: PathBuf,
    /// Manipulation report (from `grasp manip`); required for param-ranges.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureArg {
    CageVsTip,
    ParamRanges,
    BestDesigns,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), String> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| e.to_string())?;
    }
    fs::write(path, bytes).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_map(args: &MapArgs) -> Result<u8, String> {
    let map = args.build_map()?;
    let header = serde_json::json!({
        "design": map.design,
        "object": map.object,
        "command": map.command,
        "grid": map.grid,
        "reachable_cells": map.reachable_count(),
        "equilibrium_cells": map.equilibrium_count(),
    });
    write_file(&args.out.join("map.csv"), map.to_csv().as_bytes())?;
    write_file(
        &args.out.join("map.json"),
        serde_json::to_string_pretty(&header)
            .map_err(|e| e.to_string())?
            .as_bytes(),
    )?;
    write_file(&args.out.join("map.svg"), plot::energy_heatmap(&map).as_bytes())?;
    println!(
        "map: {} cells, {} reachable, {} equilibrium",
        map.grid.len(),
        map.reachable_count(),
        map.equilibrium_count()
    );
    Ok(0)
}

fn cmd_cage(args: &MapArgs) -> Result<u8, String> {
    let map = args.build_map()?;
    let trajectories = map_trajectories(&map);
    let score = score_trajectories(&map.object, &trajectories);
    let mut jsonl = Vec::new();
    write_trajectories(&mut jsonl, &trajectories).map_err(|e| e.to_string())?;
    write_file(&args.out.join("trajectories.jsonl"), &jsonl)?;
    let summary = serde_json::json!({
        "design": map.design,
        "object": map.object,
        "command": map.command,
        "score": score,
        "normalized": score.normalized(),
    });
    write_file(
        &args.out.join("caging.json"),
        serde_json::to_string_pretty(&summary)
            .map_err(|e| e.to_string())?
            .as_bytes(),
    )?;
    println!(
        "caging: lambda={:.6} caged={} tip={} ejected={}",
        score.lambda, score.n_caged, score.n_tip, score.n_ejected
    );
    Ok(0)
}

fn apply_override(config: &mut serde_json::Value, assignment: &str) -> Result<(), String> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| format!("override '{assignment}' is not KEY=VALUE"))?;
    let pointer = format!("/{}", path.replace('.', "/"));
    let slot = config
        .pointer_mut(&pointer)
        .ok_or_else(|| format!("unknown configuration key '{path}'"))?;
    *slot = serde_json::from_str(raw)
        .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
    Ok(())
}

fn sweep_config(args: &SweepArgs) -> Result<SweepConfig<f64>, String> {
    let base = match (&args.config, args.preset) {
        (Some(path), _) => serde_json::from_str::<SweepConfig<f64>>(
            &fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?,
        )
        .map_err(|e| e.to_string())?,
        (None, PresetArg::Paper) => SweepConfig::paper(),
        (None, PresetArg::Desk) => SweepConfig::desk(),
        (None, PresetArg::Smoke) => SweepConfig::smoke(),
    };
    let mut value = serde_json::to_value(&base).map_err(|e| e.to_string())?;
    for assignment in &args.sets {
        apply_override(&mut value, assignment)?;
    }
    let mut config: SweepConfig<f64> =
        serde_json::from_value(value).map_err(|e| format!("invalid override: {e}"))?;
    if let Some(out) = &args.out {
        config.output_dir = out.to_string_lossy().into_owned();
    }
    if let Some(n) = args.parallelism {
        config.parallelism = n;
    } else if let Ok(env) = std::env::var(PARALLELISM_ENV) {
        config.parallelism = env
            .parse()
            .map_err(|_| format!("{PARALLELISM_ENV}='{env}' is not a thread count"))?;
    }
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

fn cmd_sweep(args: &SweepArgs) -> Result<u8, String> {
    let config = sweep_config(args)?;
    println!("sweep -> {}", config.output_dir);
    let result = run_sweep(&config).map_err(|e| e.to_string())?;
    let quarantined = result.quarantined();
    println!(
        "sweep done: {} pairs, {} quarantined",
        result.records.len(),
        quarantined
    );
    Ok(if quarantined > 0 { 2 } else { 0 })
}

fn open_store(dir: &Path) -> Result<(SweepConfig<f64>, SweepResult<f64>), String> {
    load_store::<f64>(dir).map_err(|e| format!("{}: {e}", dir.display()))
}

fn cmd_manip(args: &ManipArgs) -> Result<u8, String> {
    let (mut config, result) = open_store(&args.store)?;
    if let Some(res) = args.resolution {
        config.map_resolution = res;
    }
    let filter = (!args.objects.is_empty()).then_some(args.objects.as_slice());
    let comparisons = compare_scenarios(
        &result,
        &config,
        args.top_k,
        args.alpha,
        args.force_step,
        filter,
    )
    .map_err(|e| e.to_string())?;
    write_file(
        &args.out.join("manip_report.json"),
        serde_json::to_string_pretty(&comparisons)
            .map_err(|e| e.to_string())?
            .as_bytes(),
    )?;
    let groups: Vec<plot::BarGroup> = comparisons
        .iter()
        .map(|cmp| plot::BarGroup {
            label: format!("r={} mu={}", cmp.object.r, cmp.object.mu_s),
            bars: vec![
                ("A".into(), cmp.scenario_a.metric),
                ("B".into(), cmp.scenario_b.metric),
            ],
        })
        .collect();
    write_file(
        &args.out.join("manip_bars.svg"),
        plot::metric_bars(&groups).as_bytes(),
    )?;
    for cmp in &comparisons {
        println!(
            "object {} (r={}, mu={}): A={:.6} B={:.6}",
            cmp.object_index, cmp.object.r, cmp.object.mu_s, cmp.scenario_a.metric,
            cmp.scenario_b.metric
        );
    }
    Ok(0)
}

fn cmd_rank(args: &RankArgs) -> Result<u8, String> {
    let (_, result) = open_store(&args.store)?;
    for ranking in &result.rankings {
        if let Some(only) = args.object {
            if ranking.object_index != only {
                continue;
            }
        }
        println!(
            "object {} (r={}, mu={}):",
            ranking.object_index, ranking.object.r, ranking.object.mu_s
        );
        for &di in ranking.ranked_designs.iter().take(args.top) {
            let d = &result.designs[di];
            let lambda = result
                .record(di, ranking.object_index)
                .and_then(|r| r.score.as_ref())
                .map(|s| s.lambda)
                .unwrap_or(f64::NAN);
            println!(
                "  design {di}: l1={} l2={} r1={} r2={} w={} lambda={lambda:.6}",
                d.l1, d.l2, d.r1, d.r2, d.w
            );
        }
    }
    Ok(0)
}

fn cmd_plot(args: &PlotArgs) -> Result<u8, String> {
    let (config, result) = open_store(&args.store)?;
    match args.figure {
        FigureArg::CageVsTip => {
            let rows = cage_vs_tip_table(&result);
            write_file(
                &args.out.join("cage_vs_tip.svg"),
                plot::cage_tip_scatter(&rows).as_bytes(),
            )?;
        }
        FigureArg::ParamRanges => {
            let report_path = args
                .report
                .as_ref()
                .ok_or("--report <manip_report.json> is required for param-ranges")?;
            let comparisons: Vec<ScenarioComparison<f64>> = serde_json::from_str(
                &fs::read_to_string(report_path).map_err(|e| e.to_string())?,
            )
            .map_err(|e| e.to_string())?;
            let rows: Vec<plot::RangeRow<f64>> = comparisons
                .iter()
                .flat_map(|cmp| {
                    let label = |s: &str| {
                        format!("r={} mu={} {s}", cmp.object.r, cmp.object.mu_s)
                    };
                    [
                        plot::RangeRow {
                            label: label("A"),
                            ranges: cmp.scenario_a.parameter_ranges,
                        },
                        plot::RangeRow {
                            label: label("B"),
                            ranges: cmp.scenario_b.parameter_ranges,
                        },
                    ]
                })
                .collect();
            write_file(
                &args.out.join("param_ranges.svg"),
                plot::parameter_range_grid(&rows).as_bytes(),
            )?;
        }
        FigureArg::BestDesigns => {
            let mut items = Vec::new();
            for ranking in &result.rankings {
                let Some(&best) = ranking.ranked_designs.first() else {
                    continue;
                };
                let design = result.designs[best].clone();
                let object = ranking.object;
                let grid = GridSpec::with_resolution(&design, &object, config.map_resolution);
                let map = build_energy_map(&design, &object, &config.command, grid)
                    .map_err(|e| e.to_string())?;
                items.push((
                    format!("r={} mu={} -> design {best}", object.r, object.mu_s),
                    design,
                    Some(map),
                ));
            }
            let borrowed: Vec<(String, GrasperDesign<f64>, Option<&EnergyMap<f64>>)> = items
                .iter()
                .map(|(label, design, map)| (label.clone(), design.clone(), map.as_ref()))
                .collect();
            write_file(
                &args.out.join("best_designs.svg"),
                plot::best_design_gallery(&borrowed).as_bytes(),
            )?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help/version requests are successful exits; everything else
            // is a usage error.
            let benign = err.use_stderr();
            let _ = err.print();
            return if benign { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match &cli.command {
        Command::Map(args) => cmd_map(args),
        Command::Cage(args) => cmd_cage(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Manip(args) => cmd_manip(args),
        Command::Rank(args) => cmd_rank(args),
        Command::Plot(args) => cmd_plot(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
