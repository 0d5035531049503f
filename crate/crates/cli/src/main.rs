//! Command-line surface over the exact unit-commitment polytope library.
//! Every subcommand is deterministic given its inputs and the recorded
//! seed. Exit codes: 0 = command succeeded and every checked claim holds;
//! 1 = a refutation or violation was found (with a re-checkable witness in
//! the output); 2 = usage or input error.

mod jsonio;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ucpoly_core::cutloop::{run_cut_loop, CutLoopCaps};
use ucpoly_core::cuts::{
    assemble_hull, enumerate_family, generate, CutFamily, CutParams, HullId,
};
use ucpoly_core::formulation::VariantId;
use ucpoly_core::model::UCInstance;
use ucpoly_core::oracle::{candidate_points, hull_extreme_points};
use ucpoly_core::rational::fmt_rat;
use ucpoly_core::separation::separate_all;
use ucpoly_core::verify::{
    check_base_relaxation_is_hull, check_facet, check_hull_equality, hull_variant,
    instance_summary, random_objective_equivalence, Status, VerificationReport,
};

/// Default seed for randomized procedures; fixed so reports reproduce.
const DEFAULT_SEED: u64 = 271828;

#[derive(Parser)]
#[command(
    name = "ucpoly",
    version,
    about = "Exact-rational verification toolkit for single-generator unit-commitment polytopes"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output format: text is a human summary, json is the stable contract.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for randomized procedures (fixed default for reproducibility).
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Verification pool width; execution is sequential and output is
    /// identical for every value.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Full,
    Up,
    Down,
}

impl From<VariantArg> for VariantId {
    fn from(v: VariantArg) -> VariantId {
        match v {
            VariantArg::Full => VariantId::Full,
            VariantArg::Up => VariantId::Up,
            VariantArg::Down => VariantId::Down,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WhichArg {
    #[value(name = "q-k1")]
    QK1,
    #[value(name = "q-k2")]
    QK2,
    #[value(name = "q-up")]
    QUp,
    #[value(name = "q-down")]
    QDown,
    /// The plain base relaxation (integrality claim for the sub-hull
    /// regime), not a cut assembly.
    Base,
}

impl WhichArg {
    fn hull(self) -> Option<HullId> {
        match self {
            WhichArg::QK1 => Some(HullId::K1),
            WhichArg::QK2 => Some(HullId::K2),
            WhichArg::QUp => Some(HullId::Up),
            WhichArg::QDown => Some(HullId::Down),
            WhichArg::Base => None,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate an instance document against the model assumptions.
    CheckInstance { inst: PathBuf },
    /// Print one family member, or stream a whole family with --all.
    Generate(GenerateArgs),
    /// Stream the extreme points of a variant's hull.
    Enumerate {
        inst: PathBuf,
        #[arg(long, value_enum, default_value_t = VariantArg::Full)]
        variant: VariantArg,
        /// Stream the candidate superset (all fiber vertices) with
        /// provenance instead of the filtered extreme points.
        #[arg(long)]
        candidates: bool,
    },
    /// Check a hull-equality claim (or base-relaxation integrality).
    VerifyHull {
        inst: PathBuf,
        #[arg(long, value_enum)]
        which: WhichArg,
        /// Instead of the double-description check, compare the LP optimum
        /// of the assembly against the exact optimum on this many random
        /// objectives (integer coefficients in [-10, 10], seeded).
        #[arg(long)]
        objectives: Option<usize>,
    },
    /// Check facet-definingness for every member of a family.
    Facets {
        inst: PathBuf,
        #[arg(long)]
        family: String,
        /// Polytope to check against; defaults to the hull the family
        /// belongs to (F7/F9 up, F8/F10 down, otherwise full).
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
    },
    /// Exactly separate all admissible families at a query point.
    Separate {
        inst: PathBuf,
        #[arg(long, value_enum, default_value_t = VariantArg::Full)]
        variant: VariantArg,
        #[arg(long)]
        point: PathBuf,
    },
    /// Run the cutting-plane loop for one objective.
    Cutloop {
        inst: PathBuf,
        #[arg(long, value_enum, default_value_t = VariantArg::Full)]
        variant: VariantArg,
        #[arg(long)]
        objective: PathBuf,
        /// Comma-separated families, e.g. F7,F9. Default: every family
        /// admissible for the variant and regime.
        #[arg(long, value_delimiter = ',')]
        families: Vec<String>,
        #[arg(long, default_value_t = CutLoopCaps::default().cuts_per_iteration)]
        max_cuts: usize,
        #[arg(long, default_value_t = CutLoopCaps::default().iterations)]
        max_iterations: usize,
        #[arg(long, default_value_t = CutLoopCaps::default().stall_rounds)]
        stall_rounds: usize,
    },
    /// Run a suite file of (instance, claim) cases and aggregate.
    Report { suite: PathBuf },
}

#[derive(Args)]
struct GenerateArgs {
    inst: PathBuf,
    #[arg(long)]
    family: String,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long, default_value_t = 0)]
    m: usize,
    /// Comma-separated node set for set-parameterized families.
    #[arg(long, value_delimiter = ',')]
    set: Vec<usize>,
    /// Stream every member of the family instead of a single one.
    #[arg(long)]
    all: bool,
}

fn parse_family(s: &str) -> Result<CutFamily> {
    let up = s.to_ascii_uppercase();
    for f in ucpoly_core::cuts::ALL_FAMILIES {
        if f.to_string() == up {
            return Ok(f);
        }
    }
    bail!("unknown family {s}; expected one of F2, F5, F6U, F6D, F7..F13")
}

/// The polytope on which a family's facet claim is made.
fn family_home_variant(f: CutFamily) -> VariantId {
    match f {
        CutFamily::F7 | CutFamily::F9 => VariantId::Up,
        CutFamily::F8 | CutFamily::F10 => VariantId::Down,
        _ => VariantId::Full,
    }
}

/// Exit status from a batch of verification reports: any refuted -> 1,
/// else any skipped (check not performable) -> 2, else 0.
fn reports_exit(reports: &[VerificationReport]) -> u8 {
    if reports.iter().any(|r| r.status == Status::Refuted) {
        1
    } else if reports.iter().any(|r| r.status == Status::Skipped) {
        2
    } else {
        0
    }
}

fn emit_reports(
    format: Format,
    inst: &UCInstance,
    reports: &[VerificationReport],
) -> u8 {
    match format {
        Format::Text => {
            for r in reports {
                println!("{r}");
            }
        }
        Format::Json => {
            let arr: Vec<Value> = reports.iter().map(|r| jsonio::report_json(inst, r)).collect();
            println!("{}", serde_json::to_string_pretty(&Value::Array(arr)).unwrap());
        }
    }
    reports_exit(reports)
}

fn cmd_check_instance(format: Format, path: &Path) -> Result<u8> {
    let inst = jsonio::load_instance(path)?;
    match format {
        Format::Text => println!("{}", instance_summary(&inst)),
        Format::Json => {
            let mut doc = jsonio::instance_json(&inst);
            let obj = doc.as_object_mut().unwrap();
            obj.insert("regime".into(), json!(format!("{:?}", inst.regime())));
            obj.insert("dim".into(), json!(inst.space().dim()));
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
    }
    Ok(0)
}

fn cmd_generate(format: Format, a: &GenerateArgs) -> Result<u8> {
    let inst = jsonio::load_instance(&a.inst)?;
    let family = parse_family(&a.family)?;
    let space = inst.space();
    if a.all {
        let e = enumerate_family(&inst, family).map_err(|e| anyhow!("{e}"))?;
        match format {
            Format::Text => {
                for member in &e.members {
                    println!("{}", member.row.dump(&space));
                }
            }
            Format::Json => {
                let arr: Vec<Value> = e
                    .members
                    .iter()
                    .map(|member| {
                        json!({
                            "params": member.params.iter().map(jsonio::params_json).collect::<Vec<_>>(),
                            "row": jsonio::row_json(&space, &member.row),
                        })
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&Value::Array(arr)).unwrap());
            }
        }
        return Ok(0);
    }
    let t = a
        .t
        .ok_or_else(|| anyhow!("--t is required unless --all is given"))?;
    let params = CutParams::new(family, t, a.m, a.set.clone());
    let row = generate(&inst, &params).map_err(|e| anyhow!("{e}"))?;
    match format {
        Format::Text => println!("{}", row.dump(&space)),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&jsonio::row_json(&space, &row)).unwrap()
        ),
    }
    Ok(0)
}

fn cmd_enumerate(
    format: Format,
    path: &Path,
    variant: VariantId,
    candidates: bool,
) -> Result<u8> {
    let inst = jsonio::load_instance(path)?;
    if candidates {
        let set = candidate_points(&inst, variant).map_err(|e| anyhow!("{e}"))?;
        match format {
            Format::Text => {
                for (p, (pi, vi)) in set.points.iter().zip(&set.provenance) {
                    println!(
                        "pattern {pi} vertex {vi}: {}",
                        serde_json::to_string(&jsonio::point_json(&inst, p)).unwrap()
                    );
                }
            }
            Format::Json => {
                let arr: Vec<Value> = set
                    .points
                    .iter()
                    .zip(&set.provenance)
                    .map(|(p, (pi, vi))| {
                        json!({
                            "pattern": pi,
                            "vertex": vi,
                            "point": jsonio::point_json(&inst, p),
                        })
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&Value::Array(arr)).unwrap());
            }
        }
        return Ok(0);
    }
    let points = hull_extreme_points(&inst, variant).map_err(|e| anyhow!("{e}"))?;
    match format {
        Format::Text => {
            for p in &points {
                println!(
                    "{}",
                    serde_json::to_string(&jsonio::point_json(&inst, p)).unwrap()
                );
            }
        }
        Format::Json => {
            let arr: Vec<Value> = points.iter().map(|p| jsonio::point_json(&inst, p)).collect();
            println!("{}", serde_json::to_string_pretty(&Value::Array(arr)).unwrap());
        }
    }
    Ok(0)
}

fn cmd_verify_hull(
    format: Format,
    seed: u64,
    path: &Path,
    which: WhichArg,
    objectives: Option<usize>,
) -> Result<u8> {
    let inst = jsonio::load_instance(path)?;
    let report = match (which.hull(), objectives) {
        (None, _) => check_base_relaxation_is_hull(&inst),
        (Some(hull), None) => check_hull_equality(&inst, hull),
        (Some(hull), Some(trials)) => {
            let sys = assemble_hull(&inst, hull).map_err(|e| anyhow!("{e}"))?;
            random_objective_equivalence(&inst, &sys, hull_variant(hull), trials, seed)
        }
    };
    Ok(emit_reports(format, &inst, std::slice::from_ref(&report)))
}

fn cmd_facets(
    format: Format,
    path: &Path,
    family: &str,
    variant: Option<VariantArg>,
) -> Result<u8> {
    let inst = jsonio::load_instance(path)?;
    let family = parse_family(family)?;
    let variant = variant.map_or_else(|| family_home_variant(family), VariantId::from);
    let e = enumerate_family(&inst, family).map_err(|e| anyhow!("{e}"))?;
    let reports: Vec<VerificationReport> = e
        .members
        .iter()
        .map(|m| check_facet(&m.row, &inst, variant))
        .collect();
    Ok(emit_reports(format, &inst, &reports))
}

fn cmd_separate(format: Format, path: &Path, variant: VariantId, point: &Path) -> Result<u8> {
    let inst = jsonio::load_instance(path)?;
    let p = jsonio::load_point(point, &inst)?;
    let results = separate_all(&inst, variant, &p);
    let any_found = results.iter().any(|r| r.found);
    match format {
        Format::Text => {
            for r in &results {
                match &r.best {
                    Some(best) => println!(
                        "{}: violation {} at t={} m={} set={:?}",
                        r.family,
                        fmt_rat(&r.violation),
                        best.t,
                        best.m,
                        best.set
                    ),
                    None => println!("{}: no violated member", r.family),
                }
            }
        }
        Format::Json => {
            let arr: Vec<Value> = results
                .iter()
                .map(jsonio::separation_json)
                .collect();
            println!("{}", serde_json::to_string_pretty(&Value::Array(arr)).unwrap());
        }
    }
    Ok(u8::from(any_found))
}

#[allow(clippy::too_many_arguments)]
fn cmd_cutloop(
    format: Format,
    path: &Path,
    variant: VariantId,
    objective: &Path,
    families: &[String],
    caps: CutLoopCaps,
) -> Result<u8> {
    let inst = jsonio::load_instance(path)?;
    let obj = jsonio::load_objective(objective, &inst)?;
    let families: Vec<CutFamily> = if families.is_empty() {
        ucpoly_core::separation::admissible_families(&inst, variant)
    } else {
        families
            .iter()
            .map(|s| parse_family(s))
            .collect::<Result<_>>()?
    };
    let report = run_cut_loop(&inst, variant, &obj, &families, caps)
        .map_err(|e| anyhow!("cut loop failed: {e:?}"))?;
    use num_traits::Zero;
    match format {
        Format::Text => {
            println!(
                "{} iterations, status {:?}, gap {}",
                report.iterations.len(),
                report.status,
                fmt_rat(&report.gap)
            );
            for (f, n) in report.cut_counts() {
                println!("  {f}: {n} cuts");
            }
        }
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&jsonio::cutloop_json(&inst, &report)).unwrap()
        ),
    }
    Ok(u8::from(!report.gap.is_zero()))
}

fn run_claim(inst: &UCInstance, claim: &str, seed: u64) -> Result<Vec<VerificationReport>> {
    let hull_of = |name: &str| -> Result<HullId> {
        match name {
            "q-k1" => Ok(HullId::K1),
            "q-k2" => Ok(HullId::K2),
            "q-up" => Ok(HullId::Up),
            "q-down" => Ok(HullId::Down),
            other => bail!("unknown hull {other}"),
        }
    };
    match claim.split(':').collect::<Vec<_>>().as_slice() {
        ["base"] => Ok(vec![check_base_relaxation_is_hull(inst)]),
        [hull] => Ok(vec![check_hull_equality(inst, hull_of(hull)?)]),
        ["facets", hull] => Ok(ucpoly_core::verify::check_all_members(
            inst,
            hull_of(hull)?,
        )),
        ["objectives", hull, trials] => {
            let hull = hull_of(hull)?;
            let trials: usize = trials.parse()?;
            let sys = assemble_hull(inst, hull).map_err(|e| anyhow!("{e}"))?;
            Ok(vec![random_objective_equivalence(
                inst,
                &sys,
                hull_variant(hull),
                trials,
                seed,
            )])
        }
        _ => bail!(
            "unknown claim {claim}; expected base, q-k1, q-k2, q-up, q-down, \
             facets:<hull>, or objectives:<hull>:<trials>"
        ),
    }
}

fn cmd_report(format: Format, seed: u64, suite: &Path) -> Result<u8> {
    let doc = jsonio::load_json(suite)?;
    let cases = doc
        .as_array()
        .or_else(|| doc.get("cases").and_then(Value::as_array))
        .ok_or_else(|| anyhow!("suite must be a JSON array of cases or {{\"cases\": [...]}}"))?;
    let base = suite.parent().unwrap_or_else(|| Path::new("."));
    let mut out: Vec<Value> = Vec::new();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut text_lines: Vec<String> = Vec::new();
    for case in cases {
        let inst_path = case
            .get("instance")
            .and_then(Value::as_str)
            .ok_or_else(|| anyhow!("case missing \"instance\""))?;
        let claim = case
            .get("claim")
            .and_then(Value::as_str)
            .ok_or_else(|| anyhow!("case missing \"claim\""))?;
        let inst = jsonio::load_instance(&base.join(inst_path))?;
        for report in run_claim(&inst, claim, seed)? {
            *counts
                .entry(match report.status {
                    Status::Confirmed => "confirmed",
                    Status::Refuted => "refuted",
                    Status::Skipped => "skipped",
                })
                .or_insert(0) += 1;
            text_lines.push(format!("{inst_path} {claim}: {report}"));
            let mut entry = jsonio::report_json(&inst, &report);
            let obj = entry.as_object_mut().unwrap();
            obj.insert("file".into(), json!(inst_path));
            obj.insert("case_claim".into(), json!(claim));
            out.push(entry);
        }
    }
    let refuted = counts.get("refuted").copied().unwrap_or(0);
    match format {
        Format::Text => {
            for line in &text_lines {
                println!("{line}");
            }
            println!(
                "total {}: {} confirmed, {} refuted, {} skipped",
                out.len(),
                counts.get("confirmed").copied().unwrap_or(0),
                refuted,
                counts.get("skipped").copied().unwrap_or(0)
            );
        }
        Format::Json => {
            let doc = json!({
                "cases": out,
                "confirmed": counts.get("confirmed").copied().unwrap_or(0),
                "refuted": refuted,
                "skipped": counts.get("skipped").copied().unwrap_or(0),
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
    }
    Ok(u8::from(refuted > 0))
}

fn dispatch(cli: &Cli) -> Result<u8> {
    match &cli.cmd {
        Cmd::CheckInstance { inst } => cmd_check_instance(cli.format, inst),
        Cmd::Generate(a) => cmd_generate(cli.format, a),
        Cmd::Enumerate {
            inst,
            variant,
            candidates,
        } => cmd_enumerate(cli.format, inst, (*variant).into(), *candidates),
        Cmd::VerifyHull {
            inst,
            which,
            objectives,
        } => cmd_verify_hull(cli.format, cli.seed, inst, *which, *objectives),
        Cmd::Facets {
            inst,
            family,
            variant,
        } => cmd_facets(cli.format, inst, family, *variant),
        Cmd::Separate {
            inst,
            variant,
            point,
        } => cmd_separate(cli.format, inst, (*variant).into(), point),
        Cmd::Cutloop {
            inst,
            variant,
            objective,
            families,
            max_cuts,
            max_iterations,
            stall_rounds,
        } => cmd_cutloop(
            cli.format,
            inst,
            (*variant).into(),
            objective,
            families,
            CutLoopCaps {
                cuts_per_iteration: *max_cuts,
                iterations: *max_iterations,
                stall_rounds: *stall_rounds,
            },
        ),
        Cmd::Report { suite } => cmd_report(cli.format, cli.seed, suite),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
