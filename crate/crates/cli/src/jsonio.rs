//! JSON artifacts shared by the subcommands: instance, point and objective
//! documents plus serialization of reports. Rationals travel as integers or
//! "p/q" strings so every round trip is bit exact; emission always uses the
//! string form.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Map, Value};

use ucpoly_core::cutloop::{CutLoopReport, CutLoopStatus};
use ucpoly_core::cuts::CutParams;
use ucpoly_core::model::{LinearInequality, Point, UCInstance, Var, VariableSpace};
use ucpoly_core::rational::{fmt_rat, parse_rat};
use ucpoly_core::separation::SeparationResult;
use ucpoly_core::verify::{VerificationReport, Witness};
use ucpoly_core::Rat;

pub fn load_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{} is not valid JSON", path.display()))
}

pub fn rat_from_value(v: &Value, key: &str) -> Result<Rat> {
    match v {
        Value::Number(n) => {
            let i = n
                .as_i64()
                .ok_or_else(|| anyhow!("{key}: numeric values must be integers, got {n}"))?;
            Ok(Rat::from_integer(i.into()))
        }
        Value::String(s) => {
            parse_rat(s).map_err(|e| anyhow!("{key}: {e}"))
        }
        other => bail!("{key}: expected an integer or a \"p/q\" string, got {other}"),
    }
}

pub fn rat_value(r: &Rat) -> Value {
    Value::String(fmt_rat(r))
}

fn usize_field(obj: &Map<String, Value>, key: &str) -> Result<usize> {
    obj.get(key)
        .and_then(Value::as_u64)
        .map(|n| n as usize)
        .ok_or_else(|| anyhow!("{key}: expected a nonnegative integer"))
}

fn rat_field(obj: &Map<String, Value>, key: &str) -> Result<Rat> {
    let v = obj
        .get(key)
        .ok_or_else(|| anyhow!("missing instance field {key}"))?;
    rat_from_value(v, key)
}

/// Instance document: keys T, L, ell, Cmin, Cmax, Vbar, V.
pub fn instance_from_json(v: &Value) -> Result<UCInstance> {
    let obj = v
        .as_object()
        .ok_or_else(|| anyhow!("instance document must be a JSON object"))?;
    UCInstance::new(
        usize_field(obj, "T")?,
        usize_field(obj, "L")?,
        usize_field(obj, "ell")?,
        rat_field(obj, "Cmin")?,
        rat_field(obj, "Cmax")?,
        rat_field(obj, "Vbar")?,
        rat_field(obj, "V")?,
    )
    .map_err(|e| anyhow!("invalid instance: {e}"))
}

pub fn load_instance(path: &Path) -> Result<UCInstance> {
    instance_from_json(&load_json(path)?)
        .with_context(|| format!("in {}", path.display()))
}

pub fn instance_json(inst: &UCInstance) -> Value {
    json!({
        "T": inst.periods,
        "L": inst.min_up,
        "ell": inst.min_down,
        "Cmin": rat_value(&inst.c_min),
        "Cmax": rat_value(&inst.c_max),
        "Vbar": rat_value(&inst.startup_ramp),
        "V": rat_value(&inst.ramp),
    })
}

fn rat_array(v: &Value, key: &str, len: usize) -> Result<Vec<Rat>> {
    let arr = v
        .as_array()
        .ok_or_else(|| anyhow!("{key}: expected an array"))?;
    if arr.len() != len {
        bail!("{key}: expected {len} entries, got {}", arr.len());
    }
    arr.iter().map(|e| rat_from_value(e, key)).collect()
}

/// Point document: {"x": [T], "y": [T], "u": [T-1]} with u covering
/// periods 2..T.
pub fn point_from_json(v: &Value, inst: &UCInstance) -> Result<Point> {
    let obj = v
        .as_object()
        .ok_or_else(|| anyhow!("point document must be a JSON object"))?;
    let t_count = inst.periods;
    let space = inst.space();
    let mut p = Point::zero(space.dim());
    for (key, lo, var) in [
        ("x", 1usize, Var::X as fn(usize) -> Var),
        ("y", 1, Var::Y as fn(usize) -> Var),
        ("u", 2, Var::U as fn(usize) -> Var),
    ] {
        let field = obj
            .get(key)
            .ok_or_else(|| anyhow!("missing point field {key}"))?;
        let vals = rat_array(field, key, t_count + 1 - lo)?;
        for (i, val) in vals.into_iter().enumerate() {
            p.set(&space, var(lo + i), val);
        }
    }
    Ok(p)
}

pub fn load_point(path: &Path, inst: &UCInstance) -> Result<Point> {
    point_from_json(&load_json(path)?, inst)
        .with_context(|| format!("in {}", path.display()))
}

pub fn point_json(inst: &UCInstance, p: &Point) -> Value {
    let space = inst.space();
    let slice = |lo: usize, var: fn(usize) -> Var| -> Value {
        Value::Array(
            (lo..=inst.periods)
                .map(|t| rat_value(&p.values[space.id(var(t))]))
                .collect(),
        )
    };
    json!({
        "x": slice(1, Var::X),
        "y": slice(1, Var::Y),
        "u": slice(2, Var::U),
    })
}

/// Objective document: same shape as a point; entries are coefficients and
/// missing arrays mean zero everywhere.
pub fn objective_from_json(v: &Value, inst: &UCInstance) -> Result<BTreeMap<usize, Rat>> {
    use num_traits::Zero;
    let obj = v
        .as_object()
        .ok_or_else(|| anyhow!("objective document must be a JSON object"))?;
    let space = inst.space();
    let mut out = BTreeMap::new();
    for (key, lo, var) in [
        ("x", 1usize, Var::X as fn(usize) -> Var),
        ("y", 1, Var::Y as fn(usize) -> Var),
        ("u", 2, Var::U as fn(usize) -> Var),
    ] {
        let Some(field) = obj.get(key) else { continue };
        let vals = rat_array(field, key, inst.periods + 1 - lo)?;
        for (i, val) in vals.into_iter().enumerate() {
            if !val.is_zero() {
                out.insert(space.id(var(lo + i)), val);
            }
        }
    }
    Ok(out)
}

pub fn load_objective(path: &Path, inst: &UCInstance) -> Result<BTreeMap<usize, Rat>> {
    objective_from_json(&load_json(path)?, inst)
        .with_context(|| format!("in {}", path.display()))
}

pub fn params_json(p: &CutParams) -> Value {
    json!({
        "family": p.family.to_string(),
        "t": p.t,
        "m": p.m,
        "set": p.set,
    })
}

pub fn row_json(space: &VariableSpace, row: &LinearInequality) -> Value {
    let terms: Vec<Value> = row
        .coeffs()
        .map(|(id, c)| json!({"var": space.name(id), "coeff": rat_value(c)}))
        .collect();
    json!({
        "tag": row.tag,
        "terms": terms,
        "sense": row.sense.to_string(),
        "rhs": rat_value(&row.rhs),
        "text": row.dump(space),
    })
}

fn witness_json(inst: &UCInstance, w: &Witness) -> Value {
    match w {
        Witness::ViolatingPoint {
            point,
            row_tag,
            violation,
        } => json!({
            "kind": "violating-point",
            "point": point_json(inst, point),
            "row": row_tag,
            "violation": rat_value(violation),
        }),
        Witness::LowRank {
            tight_count,
            rank,
            expected,
        } => json!({
            "kind": "low-rank",
            "tight_count": tight_count,
            "rank": rank,
            "expected": expected,
        }),
        Witness::FractionalVertex { point } => json!({
            "kind": "fractional-vertex",
            "point": point_json(inst, point),
        }),
        Witness::InfeasibleVertex { point, row_tag } => json!({
            "kind": "infeasible-vertex",
            "point": point_json(inst, point),
            "row": row_tag,
        }),
        Witness::ObjectiveGap {
            objective,
            relaxed_value,
            exact_value,
        } => {
            let space = inst.space();
            let obj: Vec<Value> = objective
                .iter()
                .map(|(id, c)| json!({"var": space.name(*id), "coeff": rat_value(c)}))
                .collect();
            json!({
                "kind": "objective-gap",
                "objective": obj,
                "relaxed_value": rat_value(relaxed_value),
                "exact_value": rat_value(exact_value),
            })
        }
    }
}

pub fn report_json(inst: &UCInstance, r: &VerificationReport) -> Value {
    let mut obj = Map::new();
    obj.insert("claim".into(), json!(r.claim));
    obj.insert("instance".into(), json!(r.instance));
    obj.insert("status".into(), json!(r.status.to_string()));
    obj.insert("points_checked".into(), json!(r.points_checked));
    obj.insert("tight_count".into(), json!(r.tight_count));
    if let Some(rank) = r.rank {
        obj.insert("rank".into(), json!(rank));
    }
    if let Some(note) = &r.note {
        obj.insert("note".into(), json!(note));
    }
    if let Some(w) = &r.witness {
        obj.insert("witness".into(), witness_json(inst, w));
    }
    Value::Object(obj)
}

pub fn separation_json(r: &SeparationResult) -> Value {
    let mut obj = Map::new();
    obj.insert("family".into(), json!(r.family.to_string()));
    obj.insert("found".into(), json!(r.found));
    obj.insert("violation".into(), rat_value(&r.violation));
    if let Some(best) = &r.best {
        obj.insert("best".into(), params_json(best));
    }
    Value::Object(obj)
}

pub fn cutloop_json(inst: &UCInstance, r: &CutLoopReport) -> Value {
    let status = match r.status {
        CutLoopStatus::IntegralOptimal => "integral-optimal",
        CutLoopStatus::Exhausted => "exhausted",
        CutLoopStatus::Stalled => "stalled",
        CutLoopStatus::IterationCap => "iteration-cap",
    };
    let iterations: Vec<Value> = r
        .iterations
        .iter()
        .map(|it| {
            json!({
                "objective": rat_value(&it.objective),
                "cuts": it.cuts.iter().map(params_json).collect::<Vec<_>>(),
            })
        })
        .collect();
    let counts: Map<String, Value> = r
        .cut_counts()
        .into_iter()
        .map(|(f, n)| (f.to_string(), json!(n)))
        .collect();
    json!({
        "status": status,
        "gap": rat_value(&r.gap),
        "iterations": iterations,
        "cut_counts": counts,
        "final_solution": point_json(inst, &r.final_solution),
    })
}
