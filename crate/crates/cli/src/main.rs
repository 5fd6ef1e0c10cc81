//! `deadend`: reproducible ball, depth and metric experiments.
//!
//! Exit status is 0 on success, 1 when a checked inequality fails on the
//! data, and 2 for bad input or an exhausted element budget.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use deadend_core::abelian::{EuclideanGroup, EuclideanSpec, WeightedGenSet};
use deadend_core::geolang::{regbound_check, verify_language, Dfa};
use deadend_core::heis::{heis_family, FamilyReport, Heisenberg};
use deadend_core::search::{ball, deadend_scan, default_budget};
use deadend_core::sol::wreath::WreathZ2Z;
use deadend_core::sol::{bdiff_gap, HypMatrix, RepSolver, SolGroup};
use deadend_core::{FreeAbelian, FreeGroup};

#[derive(Parser)]
#[command(name = "deadend", version, about = "Dead-end depth and word-metric experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct Common {
    /// Group description (JSON).
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    radius: u64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// `json` also writes a JSON file mirroring the CSV plus metadata.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Sphere sizes of a Cayley ball.
    Ball {
        #[command(flatten)]
        common: Common,
    },
    /// Every ball element of depth at least `--min-depth`.
    DepthScan {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        min_depth: u64,
    },
    /// Distance and depth of `[a,b]^{n²+1}` in the Heisenberg group for n = 3..=n_max.
    HeisFamily {
        #[arg(long)]
        n_max: i64,
        /// Depth search cap.
        #[arg(long, default_value_t = 10)]
        cap: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Gap between the Sol pseudo-norm and the word metric over a ball.
    SolGap {
        #[command(flatten)]
        common: Common,
        /// Length cap for minimal representations (default 2·radius + 8).
        #[arg(long)]
        cap: Option<u32>,
    },
    /// Check an automaton of geodesics against a ball, then the depth bound 2n.
    Dfa {
        #[arg(long)]
        dfa: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

/// A group on its standard generators, tagged by `kind`.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum GroupSpecFile {
    Heisenberg,
    Sol {
        #[serde(alias = "R")]
        r: HypMatrix,
    },
    ZnWeighted(WeightedGenSet),
    Euclidean(EuclideanSpec),
    #[serde(rename = "wreath_z2_z")]
    WreathZ2Z,
    Free {
        rank: usize,
    },
    Zn {
        n: usize,
    },
}

impl GroupSpecFile {
    fn kind(&self) -> &'static str {
        match self {
            GroupSpecFile::Heisenberg => "heisenberg",
            GroupSpecFile::Sol { .. } => "sol",
            GroupSpecFile::ZnWeighted(_) => "zn_weighted",
            GroupSpecFile::Euclidean(_) => "euclidean",
            GroupSpecFile::WreathZ2Z => "wreath_z2_z",
            GroupSpecFile::Free { .. } => "free",
            GroupSpecFile::Zn { .. } => "zn",
        }
    }
}

enum AnyGroup {
    Heis(Heisenberg),
    Sol(SolGroup),
    Weighted(WeightedGenSet),
    Euclid(EuclideanGroup),
    Wreath(WreathZ2Z),
    Free(FreeGroup),
    Zn(FreeAbelian),
}

macro_rules! with_group {
    ($g:expr, $x:ident => $body:expr) => {
        match $g {
            AnyGroup::Heis($x) => $body,
            AnyGroup::Sol($x) => $body,
            AnyGroup::Weighted($x) => $body,
            AnyGroup::Euclid($x) => $body,
            AnyGroup::Wreath($x) => $body,
            AnyGroup::Free($x) => $body,
            AnyGroup::Zn($x) => $body,
        }
    };
}

struct Loaded {
    spec: GroupSpecFile,
    group: AnyGroup,
    sha256: String,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn load_spec(path: &Path) -> Result<Loaded> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let spec: GroupSpecFile = serde_json::from_slice(&bytes).with_context(|| format!("invalid group spec {}", path.display()))?;
    let group = match &spec {
        GroupSpecFile::Heisenberg => AnyGroup::Heis(Heisenberg::new()),
        GroupSpecFile::Sol { r } => AnyGroup::Sol(SolGroup::new(r.clone())),
        GroupSpecFile::ZnWeighted(ws) => AnyGroup::Weighted(ws.clone()),
        GroupSpecFile::Euclidean(e) => AnyGroup::Euclid(EuclideanGroup::new(e)?),
        GroupSpecFile::WreathZ2Z => AnyGroup::Wreath(WreathZ2Z::new()),
        GroupSpecFile::Free { rank } if *rank > 0 && *rank <= 26 => AnyGroup::Free(FreeGroup::new(*rank)),
        GroupSpecFile::Zn { n } if *n > 0 && *n <= 26 => AnyGroup::Zn(FreeAbelian::new(*n)),
        _ => bail!("rank must be between 1 and 26"),
    };
    Ok(Loaded { spec, group, sha256: hex(&Sha256::digest(&bytes)) })
}

#[derive(Serialize)]
struct Metadata<'a> {
    command: &'a str,
    kind: &'a str,
    spec_sha256: &'a str,
    radius: u64,
    cap: Option<u64>,
    budget: usize,
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    metadata: Metadata<'a>,
    #[serde(flatten)]
    body: T,
}

enum Outcome {
    Ok,
    Violation(String),
}

fn create_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

fn write_csv<R: IntoIterator<Item = Vec<String>>>(path: &Path, header: &[&str], rows: R) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn metadata<'a>(command: &'a str, l: &'a Loaded, radius: u64, cap: Option<u64>) -> Metadata<'a> {
    Metadata { command, kind: l.spec.kind(), spec_sha256: &l.sha256, radius, cap, budget: default_budget() }
}

fn cmd_ball(c: &Common) -> Result<Outcome> {
    let l = load_spec(&c.spec)?;
    create_out(&c.out)?;
    with_group!(&l.group, g => {
        let b = ball(g, c.radius)?;
        let rows = b.spheres().iter().enumerate().map(|(d, n)| vec![d.to_string(), n.to_string()]);
        write_csv(&c.out.join("spheres.csv"), &["distance", "count"], rows)?;
        if c.format == Format::Json {
            let doc = Document { metadata: metadata("ball", &l, c.radius, None), body: &b };
            write_json(&c.out.join("ball.json"), &doc)?;
        }
        println!("{} elements within radius {}", b.len(), c.radius);
    });
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct ScanBody<T: Serialize> {
    min_depth: u64,
    deadends: Vec<T>,
}

fn cmd_depth_scan(c: &Common, min_depth: u64) -> Result<Outcome> {
    let l = load_spec(&c.spec)?;
    create_out(&c.out)?;
    with_group!(&l.group, g => {
        let b = ball(g, c.radius)?;
        let found = deadend_scan(g, &b, min_depth);
        let rows = found.iter().map(|r| vec![r.element.to_string(), r.distance_from_identity.to_string(), r.depth.to_string()]);
        write_csv(&c.out.join("deadends.csv"), &["element", "distance", "depth"], rows)?;
        println!("{} elements of depth >= {min_depth} within radius {}", found.len(), c.radius);
        if c.format == Format::Json {
            let doc = Document { metadata: metadata("depth-scan", &l, c.radius, None), body: ScanBody { min_depth, deadends: found } };
            write_json(&c.out.join("deadends.json"), &doc)?;
        }
    });
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct FamilyDoc {
    command: &'static str,
    radius: u64,
    cap: u64,
    budget: usize,
    rows: Vec<FamilyReport>,
}

fn cmd_heis_family(n_max: i64, cap: u64, out: &Path, format: Format) -> Result<Outcome> {
    create_out(out)?;
    let ns: Vec<i64> = (3..=n_max).collect();
    let mut rows = Vec::new();
    let mut radius = 0;
    if let Some(&top) = ns.last() {
        radius = (4 * top + 2) as u64;
        let h = Heisenberg::new();
        let b = ball(&h, radius)?;
        for &n in &ns {
            rows.push(heis_family(n, &b, cap)?);
        }
    }
    let mut text = format!("{}\n", FamilyReport::csv_header());
    for r in &rows {
        text.push_str(&r.csv_row());
        text.push('\n');
    }
    fs::write(out.join("heis_family.csv"), text)?;
    if format == Format::Json {
        let doc = FamilyDoc { command: "heis-family", radius, cap, budget: default_budget(), rows: rows.clone() };
        write_json(&out.join("heis_family.json"), &doc)?;
    }
    let failed: Vec<String> = rows.iter().filter(|r| !r.holds()).map(|r| r.n.to_string()).collect();
    if failed.is_empty() {
        Ok(Outcome::Ok)
    } else {
        Ok(Outcome::Violation(format!("family bound fails for n = {}", failed.join(", "))))
    }
}

#[derive(Serialize)]
struct GapSummary {
    max_gap: i64,
    min_gap: i64,
    elements: usize,
    skipped: usize,
    upper_half_holds: bool,
}

fn cmd_sol_gap(c: &Common, cap: Option<u32>) -> Result<Outcome> {
    let l = load_spec(&c.spec)?;
    let AnyGroup::Sol(g) = &l.group else {
        bail!("sol-gap needs a spec of kind sol, got {}", l.spec.kind());
    };
    create_out(&c.out)?;
    let cap = cap.unwrap_or(2 * c.radius as u32 + 8);
    let b = ball(g, c.radius)?;
    let mut solver = RepSolver::new(g.matrix());
    let rep = bdiff_gap(&mut solver, &b, cap);
    let rows =
        rep.rows.iter().map(|r| vec![r.element.to_string(), r.distance.to_string(), r.norm.to_string(), r.gap.to_string()]);
    write_csv(&c.out.join("sol_gap.csv"), &["element", "distance", "norm", "gap"], rows)?;
    let summary = GapSummary {
        max_gap: rep.max_gap,
        min_gap: rep.min_gap,
        elements: rep.rows.len(),
        skipped: rep.skipped,
        upper_half_holds: rep.upper_half_holds(),
    };
    println!("max gap {} min gap {} over {} elements ({} skipped)", rep.max_gap, rep.min_gap, rep.rows.len(), rep.skipped);
    write_json(
        &c.out.join("sol_gap_summary.json"),
        &Document { metadata: metadata("sol-gap", &l, c.radius, Some(cap.into())), body: &summary },
    )?;
    if c.format == Format::Json {
        write_json(
            &c.out.join("sol_gap.json"),
            &Document { metadata: metadata("sol-gap", &l, c.radius, Some(cap.into())), body: &rep },
        )?;
    }
    if rep.upper_half_holds() {
        Ok(Outcome::Ok)
    } else {
        Ok(Outcome::Violation(format!("pseudo-norm below the word metric (min gap {})", rep.min_gap)))
    }
}

#[derive(Serialize)]
struct DfaBody {
    dfa_sha256: String,
    states: usize,
    sound: bool,
    complete: bool,
    counterexample: Option<String>,
    missing: Option<String>,
    bound: u64,
    max_depth: Option<u64>,
    checked: usize,
    violations: Vec<String>,
}

fn cmd_dfa(dfa_path: &Path, c: &Common) -> Result<Outcome> {
    let l = load_spec(&c.spec)?;
    let bytes = fs::read(dfa_path).with_context(|| format!("reading {}", dfa_path.display()))?;
    let dfa: Dfa = serde_json::from_slice(&bytes).with_context(|| format!("invalid automaton {}", dfa_path.display()))?;
    create_out(&c.out)?;
    let body = with_group!(&l.group, g => {
        let b = ball(g, c.radius)?;
        let v = verify_language(&dfa, g, &b)?;
        let reg = v.verified.as_ref().map(|vd| regbound_check(vd, g, &b)).transpose()?;
        let lang = v.report;
        DfaBody {
            dfa_sha256: hex(&Sha256::digest(&bytes)),
            states: lang.states,
            sound: lang.sound,
            complete: lang.complete,
            counterexample: lang.counterexample,
            missing: lang.missing,
            bound: 2 * dfa.states() as u64,
            max_depth: reg.as_ref().map(|r| r.max_depth),
            checked: reg.as_ref().map_or(0, |r| r.checked),
            violations: reg.map(|r| r.violations).unwrap_or_default(),
        }
    });
    match &body.counterexample {
        Some(w) => println!("unsound: `{w}` is accepted but not geodesic"),
        None => {
            let depth = body.max_depth.map_or_else(|| "-".to_string(), |d| d.to_string());
            println!("sound {} complete {} max depth {depth} bound {}", body.sound, body.complete, body.bound)
        }
    }
    let outcome = if body.violations.is_empty() {
        Outcome::Ok
    } else {
        Outcome::Violation(format!("{} elements deeper than {}", body.violations.len(), body.bound))
    };
    write_json(&c.out.join("dfa_report.json"), &Document { metadata: metadata("dfa", &l, c.radius, None), body })?;
    Ok(outcome)
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.cmd {
        Command::Ball { common } => cmd_ball(&common),
        Command::DepthScan { common, min_depth } => cmd_depth_scan(&common, min_depth),
        Command::HeisFamily { n_max, cap, out, format } => cmd_heis_family(n_max, cap, &out, format),
        Command::SolGap { common, cap } => cmd_sol_gap(&common, cap),
        Command::Dfa { dfa, common } => cmd_dfa(&dfa, &common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violation(msg)) => {
            eprintln!("violation: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
