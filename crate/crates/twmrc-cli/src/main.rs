//! Batch front-end for the two-way relay rate-region library.
//!
//! Subcommands: `rankings` (enumerate valid rank assignments), `region`
//! (achievable region to CSV/JSON), `bounds` (achievable vs nested vs
//! cut-set comparison), `schedule` (delay tables, block schedule, causality
//! audit) and `verify` (seeded property sweeps).
//!
//! Exit codes: 0 success, 1 input error, 2 verification failure.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use twmrc::geometry::concave_hull;
use twmrc::ranking::enumerate_valid;
use twmrc::region::{
    achievable_region, bmarc_cover_check, cd_region, cutset_region, MemberReport, PathUniverse,
    RegionReport,
};
use twmrc::schedule::{build_schedule, verify_causality, DelayTable, ThresholdMode};
use twmrc::{ChannelModel, GaussianNetwork, RankAssignment, ValidPairing};

#[derive(Parser)]
#[command(
    name = "twmrc",
    version,
    about = "Achievable-rate regions, bounds and block schedules for two-way multiple-relay networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List every valid rank assignment for an M-node network, one tuple per line
    Rankings {
        /// Number of nodes M
        #[arg(long)]
        nodes: usize,
    },
    /// Compute the achievable region of a channel and write frontier.csv + members.json
    Region {
        /// Channel description (JSON)
        #[arg(long)]
        channel: PathBuf,
        /// Restrict to a single rank assignment, e.g. "(3,2,1)"
        #[arg(long)]
        ranking: Option<String>,
        /// Post-process the frontier into its least concave majorant
        #[arg(long)]
        convexify: bool,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the achievable union, nested-conditioning pentagon and cut-set rectangle
    Bounds {
        /// Channel description (JSON)
        #[arg(long)]
        channel: PathBuf,
        /// Cut universe: "canonical" or "all"
        #[arg(long, default_value = "canonical")]
        path_universe: String,
        /// Output directory (bounds.json); prints to stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        /// Containment tolerance
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Compute delay tables and an unrolled block schedule for one ranking
    Schedule {
        /// Number of nodes M
        #[arg(long)]
        nodes: usize,
        /// Rank assignment, e.g. "(4,2,1,3)"
        #[arg(long)]
        ranking: String,
        /// Horizon in blocks (default: shortest horizon that delivers a message end to end)
        #[arg(long)]
        blocks: Option<u64>,
        /// Delay recursion threshold: "strict_self" or "literal"
        #[arg(long, default_value = "strict_self")]
        threshold_mode: String,
        /// JSON file overriding decoding delays, e.g. {"3,1": 4}
        #[arg(long)]
        dtilde: Option<PathBuf>,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a seeded verification sweep
    Verify {
        /// Suite: "lemma1", "cutset" or "exhaustive-schedule"
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Number of random instances (lemma1/cutset)
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Simulated horizon for the schedule suite
        #[arg(long, default_value_t = 50)]
        blocks: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code: u8 = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<u8, String> {
    match command {
        Command::Rankings { nodes } => cmd_rankings(nodes),
        Command::Region { channel, ranking, convexify, out } => {
            cmd_region(&channel, ranking.as_deref(), convexify, &out)
        }
        Command::Bounds { channel, path_universe, out, tol } => {
            cmd_bounds(&channel, &path_universe, out.as_deref(), tol)
        }
        Command::Schedule { nodes, ranking, blocks, threshold_mode, dtilde, out } => {
            cmd_schedule(nodes, &ranking, blocks, &threshold_mode, dtilde.as_deref(), &out)
        }
        Command::Verify { suite, seed, count, tol, blocks } => {
            cmd_verify(&suite, seed, count, tol, blocks)
        }
    }
}

fn load_channel(path: &Path) -> Result<ChannelModel, String> {
    ChannelModel::from_path(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_ranking(text: &str, nodes: usize) -> Result<ValidPairing, String> {
    let ranks: RankAssignment = text.parse().map_err(|e| format!("--ranking: {e}"))?;
    if ranks.node_count() != nodes {
        return Err(format!(
            "--ranking names {} nodes but the network has {nodes}",
            ranks.node_count()
        ));
    }
    ValidPairing::from_ranks(ranks).map_err(|e| e.to_string())
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| format!("{}: {e}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn frontier_csv(frontier: &[(f64, f64)]) -> String {
    let mut out = String::from("r1,rm\n");
    for &(x, y) in frontier {
        out.push_str(&format!("{x},{y}\n"));
    }
    out
}

fn to_pretty(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn cmd_rankings(nodes: usize) -> Result<u8, String> {
    for pairing in enumerate_valid(nodes).map_err(|e| e.to_string())? {
        println!("{}", pairing.ranks());
    }
    Ok(0)
}

fn cmd_region(
    channel: &Path,
    ranking: Option<&str>,
    convexify: bool,
    out: &Path,
) -> Result<u8, String> {
    let model = load_channel(channel)?;
    let m = model.node_count();
    let mut report = match ranking {
        Some(text) => {
            let pairing = parse_ranking(text, m)?;
            let pent =
                twmrc::region::scheme_region(&model, &pairing).map_err(|e| e.to_string())?;
            RegionReport {
                members: vec![MemberReport {
                    ranks: pairing.ranks().as_slice().to_vec(),
                    caps: pent.caps(),
                }],
                frontier: pent.frontier().map_err(|e| e.to_string())?,
            }
        }
        None => achievable_region(&model, m).map_err(|e| e.to_string())?.report(),
    };
    if convexify {
        report.frontier = concave_hull(&report.frontier);
    }
    write_out(out, "frontier.csv", &frontier_csv(&report.frontier))?;
    write_out(out, "members.json", &to_pretty(&report))?;
    Ok(0)
}

fn cmd_bounds(
    channel: &Path,
    path_universe: &str,
    out: Option<&Path>,
    tol: f64,
) -> Result<u8, String> {
    let universe: PathUniverse = path_universe.parse().map_err(|e: twmrc::Error| e.to_string())?;
    let model = load_channel(channel)?;
    let m = model.node_count();

    let ach = achievable_region(&model, m).map_err(|e| e.to_string())?;
    let nested = cd_region(&model, m).map_err(|e| e.to_string())?;
    let cut = cutset_region(&model, m, universe).map_err(|e| e.to_string())?;

    let inside = |region_contains: &dyn Fn(f64, f64) -> bool| {
        ach.frontier().iter().all(|&(x, y)| region_contains(x, y))
    };
    let ach_in_cut = inside(&|x, y| cut.contains(x, y, tol));
    let ach_in_nested = inside(&|x, y| nested.contains(x, y, tol));
    let nested_frontier = nested.frontier().map_err(|e| e.to_string())?;
    let nested_in_cut = nested_frontier.iter().all(|&(x, y)| cut.contains(x, y, tol));
    let min_margin = ach
        .frontier()
        .iter()
        .map(|&(x, y)| (cut.max_r1() - x).min(cut.max_rm() - y))
        .fold(f64::INFINITY, f64::min);

    let report = json!({
        "nodes": m,
        "path_universe": path_universe,
        "achievable": {
            "area": ach.area(),
            "max_r1": ach.max_r1(),
            "max_rm": ach.max_rm(),
            "frontier": ach.frontier(),
        },
        "nested": {
            "area": nested.area().map_err(|e| e.to_string())?,
            "max_r1": nested.max_r1(),
            "max_rm": nested.max_rm(),
        },
        "cutset": {
            "area": cut.area().map_err(|e| e.to_string())?,
            "max_r1": cut.max_r1(),
            "max_rm": cut.max_rm(),
        },
        "containment": {
            "achievable_in_cutset": ach_in_cut,
            "achievable_in_nested": ach_in_nested,
            "nested_in_cutset": nested_in_cut,
        },
        "gaps": {
            "r1": cut.max_r1() - ach.max_r1(),
            "rm": cut.max_rm() - ach.max_rm(),
            "min_margin": min_margin,
        },
    });
    let text = {
        let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
        s.push('\n');
        s
    };
    match out {
        Some(dir) => write_out(dir, "bounds.json", &text)?,
        None => print!("{text}"),
    }
    if !ach_in_cut {
        eprintln!("verification failure: achievable region escapes the cut-set bound");
        return Ok(2);
    }
    Ok(0)
}

fn parse_dtilde_file(path: &Path) -> Result<BTreeMap<(usize, usize), u64>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let raw: BTreeMap<String, u64> =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut map = BTreeMap::new();
    for (key, value) in raw {
        let (node, source) = key
            .split_once(',')
            .and_then(|(n, s)| Some((n.trim().parse().ok()?, s.trim().parse().ok()?)))
            .ok_or_else(|| format!("{}: key {key:?} is not \"node,source\"", path.display()))?;
        map.insert((node, source), value);
    }
    Ok(map)
}

fn cmd_schedule(
    nodes: usize,
    ranking: &str,
    blocks: Option<u64>,
    threshold_mode: &str,
    dtilde: Option<&Path>,
    out: &Path,
) -> Result<u8, String> {
    let pairing = parse_ranking(ranking, nodes)?;
    let mode: ThresholdMode = threshold_mode.parse().map_err(|e: twmrc::Error| e.to_string())?;
    let mut delays = DelayTable::compute(&pairing, mode).map_err(|e| e.to_string())?;
    if let Some(path) = dtilde {
        let overrides = parse_dtilde_file(path)?;
        delays = delays.with_dtilde_overrides(&overrides).map_err(|e| e.to_string())?;
    }
    let blocks = blocks.unwrap_or_else(|| delays.max_latency() + 1);
    let schedule = build_schedule(&delays, blocks).map_err(|e| e.to_string())?;
    let causality = verify_causality(&delays, blocks).map_err(|e| e.to_string())?;

    write_out(out, "delays.json", &to_pretty(&delays.report()))?;
    write_out(out, "schedule.csv", &schedule.to_csv())?;
    write_out(out, "causality.json", &to_pretty(&causality))?;

    if !causality.ok {
        for v in &causality.violations {
            eprintln!("causality: {v}");
        }
        return Ok(2);
    }
    Ok(0)
}

fn cmd_verify(suite: &str, seed: u64, count: usize, tol: f64, blocks: u64) -> Result<u8, String> {
    match suite {
        "lemma1" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut failures = 0usize;
            let mut worst_gap = 0.0f64;
            for k in 0..count {
                let m = 3 + (k % 4);
                let net = GaussianNetwork::random(m, &mut rng).map_err(|e| e.to_string())?;
                let model = ChannelModel::Gaussian(net);
                let report = bmarc_cover_check(&model, m).map_err(|e| e.to_string())?;
                let area_gap = (report.union_area - report.node2_area).abs();
                worst_gap = worst_gap.max(area_gap).max(report.max_frontier_gap);
                if !report.covered || area_gap > tol || report.max_frontier_gap > tol {
                    failures += 1;
                    eprintln!(
                        "instance {k} (M={m}): covered={} area_gap={area_gap:.3e} witness={:?}",
                        report.covered, report.witness
                    );
                }
            }
            let verdict = if failures == 0 { "PASS" } else { "FAIL" };
            println!(
                "lemma1: {}/{count} decompositions cover the receiver pentagon \
                 (worst gap {worst_gap:.3e}) {verdict}",
                count - failures
            );
            Ok(if failures == 0 { 0 } else { 2 })
        }
        "cutset" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut failures = 0usize;
            let mut min_margin = f64::INFINITY;
            for k in 0..count {
                let m = 3 + (k % 4);
                let net = GaussianNetwork::random(m, &mut rng).map_err(|e| e.to_string())?;
                let model = ChannelModel::Gaussian(net);
                let ach = achievable_region(&model, m).map_err(|e| e.to_string())?;
                let cut =
                    cutset_region(&model, m, PathUniverse::All).map_err(|e| e.to_string())?;
                let margin = ach
                    .frontier()
                    .iter()
                    .map(|&(x, y)| (cut.max_r1() - x).min(cut.max_rm() - y))
                    .fold(f64::INFINITY, f64::min);
                min_margin = min_margin.min(margin);
                if margin < -tol {
                    failures += 1;
                    eprintln!("instance {k} (M={m}): margin {margin:.3e}");
                }
            }
            let verdict = if failures == 0 { "PASS" } else { "FAIL" };
            println!(
                "cutset: {}/{count} achievable regions inside the outer bound \
                 (min margin {min_margin:.3e}) {verdict}",
                count - failures
            );
            Ok(if failures == 0 { 0 } else { 2 })
        }
        "exhaustive-schedule" => {
            let mut checked = 0usize;
            let mut failures = 0usize;
            for m in 3..=8usize {
                for pairing in enumerate_valid(m).map_err(|e| e.to_string())? {
                    checked += 1;
                    let outcome = DelayTable::compute(&pairing, ThresholdMode::StrictSelf)
                        .and_then(|dt| verify_causality(&dt, blocks));
                    match outcome {
                        Ok(report) if report.ok => {}
                        Ok(report) => {
                            failures += 1;
                            eprintln!("{pairing}: {:?}", report.violations);
                        }
                        Err(e) => {
                            failures += 1;
                            eprintln!("{pairing}: {e}");
                        }
                    }
                }
            }
            let verdict = if failures == 0 { "PASS" } else { "FAIL" };
            println!(
                "exhaustive-schedule: {}/{checked} rankings causal over {blocks} blocks {verdict}",
                checked - failures
            );
            Ok(if failures == 0 { 0 } else { 2 })
        }
        other => Err(format!(
            "--suite must be \"lemma1\", \"cutset\" or \"exhaustive-schedule\", got {other:?}"
        )),
    }
}
