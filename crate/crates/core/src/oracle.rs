//! Ground-truth enumeration: binary commitment patterns, per-pattern fiber
//! vertices, extreme points of each variant's hull, the closed-form point
//! characterizations, and brute-force optimization over extreme points.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::formulation::{build_mud_hull_base, InequalitySystem, VariantId};
use crate::model::{
    LinearInequality, Point, RegimeClass, Sense, UCInstance, Var, VariableSpace,
};
use crate::polycore::{dd_enumerate, in_convex_hull};
use crate::rational::Rat;

/// Default horizon cap for the `2^(2T-1)` pattern sweep.
pub const DEFAULT_PATTERN_CAP: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    /// The sweep would exceed the pattern cap.
    CapExceeded { periods: usize, cap: usize },
    /// A characterization was requested outside its regime.
    Regime {
        required: &'static str,
        found: RegimeClass,
    },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::CapExceeded { periods, cap } => {
                write!(f, "T={periods} exceeds the enumeration cap T<={cap}")
            }
            OracleError::Regime { required, found } => {
                write!(f, "characterization requires {required}, instance is {found}")
            }
        }
    }
}

/// One integer-feasible commitment schedule: `y` over periods `1..T`, `u`
/// over periods `2..T` (index 0 of `u` is period 2).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BinaryPattern {
    pub y: Vec<bool>,
    pub u: Vec<bool>,
}

impl BinaryPattern {
    pub fn periods(&self) -> usize {
        self.y.len()
    }

    pub fn commitment_point(&self) -> Point {
        let mut values: Vec<Rat> = Vec::with_capacity(2 * self.y.len() - 1);
        let bit = |b: bool| if b { Rat::one() } else { Rat::zero() };
        values.extend(self.y.iter().map(|&b| bit(b)));
        values.extend(self.u.iter().map(|&b| bit(b)));
        Point::from_values(values)
    }

    /// Maximal online runs as 1-based inclusive `(start, end)` pairs, in
    /// increasing order.
    pub fn online_intervals(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start = None;
        for (idx, &on) in self.y.iter().enumerate() {
            match (on, start) {
                (true, None) => start = Some(idx + 1),
                (false, Some(s)) => {
                    out.push((s, idx));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push((s, self.y.len()));
        }
        out
    }
}

/// All integer-feasible `(y, u)` patterns in mask-sweep order, under the
/// default cap.
pub fn enumerate_patterns(inst: &UCInstance) -> Result<Vec<BinaryPattern>, OracleError> {
    enumerate_patterns_with_cap(inst, DEFAULT_PATTERN_CAP)
}

pub fn enumerate_patterns_with_cap(
    inst: &UCInstance,
    cap: usize,
) -> Result<Vec<BinaryPattern>, OracleError> {
    let t_count = inst.periods;
    if t_count > cap {
        return Err(OracleError::CapExceeded {
            periods: t_count,
            cap,
        });
    }
    let base = build_mud_hull_base(inst);
    let nbits = 2 * t_count - 1;
    let mut out = Vec::new();
    for mask in 0u64..1 << nbits {
        let y: Vec<bool> = (0..t_count).map(|b| mask >> b & 1 == 1).collect();
        let u: Vec<bool> = (t_count..nbits).map(|b| mask >> b & 1 == 1).collect();
        let pattern = BinaryPattern { y, u };
        if base.is_feasible(&pattern.commitment_point()) {
            out.push(pattern);
        }
    }
    Ok(out)
}

/// The x-polytope of one pattern as a generation-layout system: fixed-`y`
/// generation bounds plus the variant's ramp rows.
fn fiber_system(inst: &UCInstance, pattern: &BinaryPattern, variant: VariantId) -> InequalitySystem {
    let space = VariableSpace::generation(inst.periods);
    let mut sys = InequalitySystem::new(space, format!("fiber_{variant}"));
    let bit = |t: usize| {
        if pattern.y[t - 1] {
            Rat::one()
        } else {
            Rat::zero()
        }
    };
    for t in 1..=inst.periods {
        let mut lo = LinearInequality::new(format!("xlb_t{t}"), Sense::Ge, &inst.c_min * bit(t));
        lo.add_var(&space, Var::X(t), Rat::one());
        sys.push(lo);
        let mut hi = LinearInequality::new(format!("xub_t{t}"), Sense::Le, &inst.c_max * bit(t));
        hi.add_var(&space, Var::X(t), Rat::one());
        sys.push(hi);
    }
    let band = &inst.startup_ramp - &inst.ramp;
    if variant != VariantId::Down {
        for t in 2..=inst.periods {
            let rhs = &inst.startup_ramp - &band * bit(t - 1);
            let mut row = LinearInequality::new(format!("rampup_t{t}"), Sense::Le, rhs);
            row.add_var(&space, Var::X(t), Rat::one());
            row.add_var(&space, Var::X(t - 1), -Rat::one());
            sys.push(row);
        }
    }
    if variant != VariantId::Up {
        for t in 2..=inst.periods {
            let rhs = &inst.startup_ramp - &band * bit(t);
            let mut row = LinearInequality::new(format!("rampdn_t{t}"), Sense::Le, rhs);
            row.add_var(&space, Var::X(t - 1), Rat::one());
            row.add_var(&space, Var::X(t), -Rat::one());
            sys.push(row);
        }
    }
    sys
}

fn lift(inst: &UCInstance, pattern: &BinaryPattern, x: &Point) -> Point {
    let mut values = x.values.clone();
    let bit = |b: bool| if b { Rat::one() } else { Rat::zero() };
    values.extend(pattern.y.iter().map(|&b| bit(b)));
    values.extend(pattern.u.iter().map(|&b| bit(b)));
    debug_assert_eq!(values.len(), inst.space().dim());
    Point::from_values(values)
}

/// Vertices of the x-fiber of one pattern, lifted to full points. Empty if
/// the fiber is empty.
pub fn fiber_vertices(
    inst: &UCInstance,
    pattern: &BinaryPattern,
    variant: VariantId,
) -> Vec<Point> {
    let sys = fiber_system(inst, pattern, variant);
    let vs = dd_enumerate(&sys).expect("x-fiber is a bounded polytope");
    vs.points.iter().map(|x| lift(inst, pattern, x)).collect()
}

/// Union of fiber vertices over all patterns, with per-point provenance.
/// Contains every extreme point of the variant's convex hull: any convex
/// combination hitting binary (y, u) values pins all participants to the
/// same pattern, so hull vertices are fiber vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    pub variant: VariantId,
    pub points: Vec<Point>,
    /// Per-point: index into `patterns`, fiber-vertex index.
    pub provenance: Vec<(usize, usize)>,
    pub patterns: Vec<BinaryPattern>,
}

pub fn candidate_points(
    inst: &UCInstance,
    variant: VariantId,
) -> Result<CandidateSet, OracleError> {
    let patterns = enumerate_patterns(inst)?;
    let mut points = Vec::new();
    let mut provenance = Vec::new();
    for (pi, pattern) in patterns.iter().enumerate() {
        for (vi, p) in fiber_vertices(inst, pattern, variant).into_iter().enumerate() {
            points.push(p);
            provenance.push((pi, vi));
        }
    }
    Ok(CandidateSet {
        variant,
        points,
        provenance,
        patterns,
    })
}

/// Drops every candidate lying in the convex hull of the others. The
/// membership LP only needs the candidate's own pattern class: points of a
/// different class cannot participate in a combination that reproduces the
/// binary coordinates.
pub fn extreme_points(candidates: &CandidateSet) -> Vec<Point> {
    let t_count = candidates
        .patterns
        .first()
        .map_or(0, BinaryPattern::periods);
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (idx, (pi, _)) in candidates.provenance.iter().enumerate() {
        by_class.entry(*pi).or_default().push(idx);
    }
    let project = |idx: usize| Point::from_values(candidates.points[idx].values[..t_count].to_vec());
    let mut keep = vec![true; candidates.points.len()];
    for class in by_class.values() {
        if class.len() < 2 {
            continue;
        }
        for &idx in class {
            let others: Vec<Point> = class
                .iter()
                .filter(|&&o| o != idx)
                .map(|&o| project(o))
                .collect();
            let (inside, _) = in_convex_hull(&project(idx), &others);
            keep[idx] = !inside;
        }
    }
    candidates
        .points
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(p, _)| p.clone())
        .collect()
}

/// Extreme points of the variant's hull in deterministic order.
pub fn hull_extreme_points(
    inst: &UCInstance,
    variant: VariantId,
) -> Result<Vec<Point>, OracleError> {
    Ok(extreme_points(&candidate_points(inst, variant)?))
}

/// Closed-form K1 extreme-point superset: per online interval the boundary
/// periods take values in `{Cmin, Vbar}` (plus `Cmax` when the boundary is
/// the horizon itself, where no start-up or shut-down ramp binds), strict
/// interior periods take `{Cmin, Cmax}`, offline periods are 0.
pub fn k1_characterized_points(inst: &UCInstance) -> Result<Vec<Point>, OracleError> {
    if inst.regime() != RegimeClass::K1 {
        return Err(OracleError::Regime {
            required: "K1",
            found: inst.regime(),
        });
    }
    let t_count = inst.periods;
    let allowed = |interval: (usize, usize), t: usize| -> Vec<Rat> {
        let (a, b) = interval;
        let mut vals = vec![inst.c_min.clone()];
        if t == a || t == b {
            vals.push(inst.startup_ramp.clone());
        }
        let ramp_binds = (t == a && a > 1) || (t == b && b < t_count);
        if !ramp_binds {
            vals.push(inst.c_max.clone());
        }
        vals.sort();
        vals.dedup();
        vals
    };
    let mut out = Vec::new();
    for pattern in enumerate_patterns(inst)? {
        let intervals = pattern.online_intervals();
        let mut choices: Vec<Vec<Rat>> = vec![vec![Rat::zero()]; t_count];
        for &iv in &intervals {
            for t in iv.0..=iv.1 {
                choices[t - 1] = allowed(iv, t);
            }
        }
        cartesian(&choices, &mut |x| {
            out.push(lift(inst, &pattern, &Point::from_values(x.to_vec())));
        });
    }
    Ok(out)
}

fn cartesian(choices: &[Vec<Rat>], emit: &mut impl FnMut(&[Rat])) {
    let mut current: Vec<Rat> = Vec::with_capacity(choices.len());
    fn rec(choices: &[Vec<Rat>], current: &mut Vec<Rat>, emit: &mut impl FnMut(&[Rat])) {
        if current.len() == choices.len() {
            emit(current);
            return;
        }
        let slot = current.len();
        for v in &choices[slot] {
            current.push(v.clone());
            rec(choices, current, emit);
            current.pop();
        }
    }
    rec(choices, &mut current, emit);
}

/// Scenario-tree point generation for the ramp-up polytope when
/// `Cmax = Cmin + 2V`. Within one online interval the generation level walks
/// the five-letter alphabet `{Cmin, Cmin+V, Vbar, Vbar+V, Cmax}` under the
/// tree rules: upward moves are ramp-limited; a start-up interior to the
/// horizon opens at `Cmin` or `Vbar`; `Vbar` appears only at an interval
/// start; `Vbar+V` only directly after `Vbar`; `Cmin+V` only next to a
/// `Cmin` predecessor or a `Cmax` successor (or at the truncated start).
pub fn scenario_tree_points_k2up(inst: &UCInstance) -> Result<Vec<Point>, OracleError> {
    let two_steps = &inst.c_min + &inst.ramp + &inst.ramp;
    if inst.c_max != two_steps {
        return Err(OracleError::Regime {
            required: "Cmax = Cmin + 2V",
            found: inst.regime(),
        });
    }
    let mut alphabet: Vec<Rat> = vec![
        inst.c_min.clone(),
        &inst.c_min + &inst.ramp,
        inst.startup_ramp.clone(),
        &inst.startup_ramp + &inst.ramp,
        inst.c_max.clone(),
    ];
    alphabet.sort();
    alphabet.dedup();
    let mid = &inst.c_min + &inst.ramp;

    let interval_paths = |a: usize, b: usize| -> Vec<Vec<Rat>> {
        let len = b - a + 1;
        let mut paths: Vec<Vec<Rat>> = Vec::new();
        let mut stack: Vec<Vec<Rat>> = if a == 1 {
            alphabet.iter().map(|v| vec![v.clone()]).collect()
        } else {
            vec![vec![inst.c_min.clone()], vec![inst.startup_ramp.clone()]]
        };
        while let Some(path) = stack.pop() {
            if path.len() == len {
                paths.push(path);
                continue;
            }
            let last = path.last().unwrap();
            for v in &alphabet {
                if v - last > inst.ramp {
                    continue; // ramp-up limit
                }
                if *v == inst.startup_ramp && *v != inst.c_min {
                    continue; // Vbar only at the interval start
                }
                if *v == &inst.startup_ramp + &inst.ramp && *last != inst.startup_ramp {
                    continue; // Vbar+V only directly after Vbar
                }
                let mut next = path.clone();
                next.push(v.clone());
                stack.push(next);
            }
        }
        // Cmin+V needs a Cmin predecessor or a Cmax successor; the rule is
        // waived at a truncated start (a = 1) and for Vbar+V when that
        // value coincides with Cmin+V.
        paths.retain(|path| {
            path.iter().enumerate().all(|(k, v)| {
                if *v != mid {
                    return true;
                }
                if k == 0 {
                    return a == 1 || mid == &inst.startup_ramp + &inst.ramp;
                }
                if path[k - 1] == inst.c_min || path[k - 1] == inst.startup_ramp {
                    return true;
                }
                k + 1 < path.len() && path[k + 1] == inst.c_max
            })
        });
        paths.sort();
        paths
    };

    let mut out = Vec::new();
    for pattern in enumerate_patterns(inst)? {
        let intervals = pattern.online_intervals();
        let per_interval: Vec<Vec<Vec<Rat>>> = intervals
            .iter()
            .map(|&(a, b)| interval_paths(a, b))
            .collect();
        let mut x = vec![Rat::zero(); inst.periods];
        compose(&intervals, &per_interval, 0, &mut x, &mut |x| {
            out.push(lift(inst, &pattern, &Point::from_values(x.to_vec())));
        });
    }
    Ok(out)
}

fn compose(
    intervals: &[(usize, usize)],
    per_interval: &[Vec<Vec<Rat>>],
    k: usize,
    x: &mut Vec<Rat>,
    emit: &mut impl FnMut(&[Rat]),
) {
    if k == intervals.len() {
        emit(x);
        return;
    }
    let (a, _) = intervals[k];
    for path in &per_interval[k] {
        for (off, v) in path.iter().enumerate() {
            x[a - 1 + off] = v.clone();
        }
        compose(intervals, per_interval, k + 1, x, emit);
    }
}

/// One grid violation: the point, the offending period, and its value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridViolation {
    pub point_index: usize,
    pub period: usize,
    pub value: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridReport {
    pub checked: usize,
    pub violations: Vec<GridViolation>,
}

impl GridReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every `x_t` coordinate of every point lies on the instance's
/// reachable-level grid.
pub fn grid_check(points: &[Point], inst: &UCInstance) -> GridReport {
    let grid: &BTreeSet<Rat> = &inst.derived().grid;
    let mut violations = Vec::new();
    for (idx, p) in points.iter().enumerate() {
        for t in 1..=inst.periods {
            let v = &p.values[t - 1];
            if !grid.contains(v) {
                violations.push(GridViolation {
                    point_index: idx,
                    period: t,
                    value: v.clone(),
                });
            }
        }
    }
    GridReport {
        checked: points.len(),
        violations,
    }
}

/// Ground-truth optimum of a linear objective over the mixed-integer
/// feasible region, by scanning extreme points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleOptimum {
    pub value: Rat,
    pub argmax: Point,
}

pub fn oracle_optimize(
    inst: &UCInstance,
    variant: VariantId,
    objective: &BTreeMap<usize, Rat>,
) -> Result<OracleOptimum, OracleError> {
    let points = hull_extreme_points(inst, variant)?;
    let score = |p: &Point| -> Rat {
        objective
            .iter()
            .map(|(id, c)| c * &p.values[*id])
            .fold(Rat::zero(), |acc, v| acc + v)
    };
    let mut best: Option<OracleOptimum> = None;
    for p in points {
        let value = score(&p);
        let better = match &best {
            None => true,
            Some(b) => value > b.value || (value == b.value && p < b.argmax),
        };
        if better {
            best = Some(OracleOptimum { value, argmax: p });
        }
    }
    Ok(best.expect("feasible region is never empty: all-off is a point"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulation::{build_base, relax_integrality};
    use crate::rational::{rat, ratio};

    fn k1_t2() -> UCInstance {
        UCInstance::new(2, 1, 1, rat(1), rat(3), rat(2), rat(2)).unwrap()
    }

    fn k1_t3() -> UCInstance {
        UCInstance::new(3, 1, 1, rat(1), rat(3), rat(2), rat(2)).unwrap()
    }

    fn two_step_t4() -> UCInstance {
        UCInstance::new(4, 1, 1, rat(1), rat(3), ratio(3, 2), rat(1)).unwrap()
    }

    #[test]
    fn pattern_sweep_t2_golden() {
        let patterns = enumerate_patterns(&k1_t2()).unwrap();
        assert_eq!(patterns.len(), 4);
        assert!(patterns.iter().any(|p| !p.y[0] && !p.y[1] && !p.u[0]));
        // y=(0,1) with u2=0 breaks the start-up link
        assert!(!patterns.iter().any(|p| !p.y[0] && p.y[1] && !p.u[0]));
    }

    #[test]
    fn pattern_cap_enforced() {
        let inst = UCInstance::new(8, 1, 1, rat(1), rat(3), rat(2), rat(2)).unwrap();
        assert!(matches!(
            enumerate_patterns(&inst),
            Err(OracleError::CapExceeded { .. })
        ));
        assert!(enumerate_patterns_with_cap(&inst, 8).is_ok());
    }

    #[test]
    fn online_intervals_extracted() {
        let p = BinaryPattern {
            y: vec![true, false, true, true],
            u: vec![false, true, false],
        };
        assert_eq!(p.online_intervals(), vec![(1, 1), (3, 4)]);
    }

    #[test]
    fn fiber_vertices_box_band() {
        let inst = k1_t2();
        let pattern = BinaryPattern {
            y: vec![true, true],
            u: vec![false],
        };
        let verts = fiber_vertices(&inst, &pattern, VariantId::Full);
        assert_eq!(verts.len(), 4);
        let xs: BTreeSet<(Rat, Rat)> = verts
            .iter()
            .map(|p| (p.values[0].clone(), p.values[1].clone()))
            .collect();
        for (a, b) in [(1, 1), (1, 3), (3, 1), (3, 3)] {
            assert!(xs.contains(&(rat(a), rat(b))));
        }
    }

    #[test]
    fn fiber_vertices_variant_sensitive() {
        let inst = k1_t2();
        let pattern = BinaryPattern {
            y: vec![false, true],
            u: vec![true],
        };
        // start-up at t=2: the up-ramp caps x2 at Vbar=2, the down variant
        // does not
        let full = fiber_vertices(&inst, &pattern, VariantId::Full);
        let down = fiber_vertices(&inst, &pattern, VariantId::Down);
        let max_x2 = |pts: &[Point]| pts.iter().map(|p| p.values[1].clone()).max().unwrap();
        assert_eq!(max_x2(&full), rat(2));
        assert_eq!(max_x2(&down), rat(3));
    }

    #[test]
    fn offline_pattern_single_zero_vertex() {
        let inst = k1_t3();
        let pattern = BinaryPattern {
            y: vec![false; 3],
            u: vec![false; 2],
        };
        let verts = fiber_vertices(&inst, &pattern, VariantId::Full);
        assert_eq!(verts, vec![Point::zero(8)]);
    }

    #[test]
    fn candidates_are_feasible_and_contain_extremes() {
        let inst = k1_t3();
        for variant in [VariantId::Full, VariantId::Up, VariantId::Down] {
            let cs = candidate_points(&inst, variant).unwrap();
            let sys = relax_integrality(&build_base(&inst, variant));
            for p in &cs.points {
                assert!(sys.is_feasible(p));
            }
            let ex = extreme_points(&cs);
            assert!(!ex.is_empty());
            assert!(ex.iter().all(|p| cs.points.contains(p)));
        }
    }

    #[test]
    fn extreme_count_k1_t3_golden() {
        let inst = k1_t3();
        let ex = hull_extreme_points(&inst, VariantId::Full).unwrap();
        // frozen from the enumeration itself; guards against regressions
        assert_eq!(ex.len(), 27);
    }

    #[test]
    fn k1_characterization_contains_extremes() {
        let inst = k1_t3();
        let characterized = k1_characterized_points(&inst).unwrap();
        let sys = relax_integrality(&build_base(&inst, VariantId::Full));
        for p in &characterized {
            assert!(sys.is_feasible(p), "characterized point infeasible");
        }
        let characterized: BTreeSet<Point> = characterized.into_iter().collect();
        for p in hull_extreme_points(&inst, VariantId::Full).unwrap() {
            assert!(characterized.contains(&p), "extreme point missing: {p:?}");
        }
    }

    #[test]
    fn k1_characterization_rejects_other_regimes() {
        assert!(matches!(
            k1_characterized_points(&two_step_t4()),
            Err(OracleError::Regime { .. })
        ));
    }

    #[test]
    fn scenario_tree_contains_up_extremes() {
        let inst = two_step_t4();
        let tree: BTreeSet<Point> = scenario_tree_points_k2up(&inst)
            .unwrap()
            .into_iter()
            .collect();
        for p in hull_extreme_points(&inst, VariantId::Up).unwrap() {
            assert!(tree.contains(&p), "extreme point missing from tree: {p:?}");
        }
    }

    #[test]
    fn scenario_tree_regime_guard() {
        assert!(matches!(
            scenario_tree_points_k2up(&k1_t3()),
            Err(OracleError::Regime { .. })
        ));
    }

    #[test]
    fn grid_membership_and_negative_control() {
        let inst = two_step_t4();
        let ex = hull_extreme_points(&inst, VariantId::Up).unwrap();
        assert!(grid_check(&ex, &inst).passed());
        let bad = Point::from_values(vec![ratio(7, 4); inst.space().dim()]);
        let report = grid_check(&[bad], &inst);
        assert!(!report.passed());
        assert_eq!(report.violations[0].value, ratio(7, 4));
    }

    #[test]
    fn oracle_optimum_examples() {
        let inst = k1_t3();
        let zero = BTreeMap::new();
        let r = oracle_optimize(&inst, VariantId::Full, &zero).unwrap();
        assert_eq!(r.value, rat(0));
        let space = inst.space();
        let mut obj = BTreeMap::new();
        for t in 1..=3 {
            obj.insert(space.id(Var::X(t)), rat(1));
        }
        let r = oracle_optimize(&inst, VariantId::Full, &obj).unwrap();
        assert_eq!(r.value, rat(9));
    }

    #[test]
    fn enumeration_is_deterministic() {
        let inst = two_step_t4();
        let a = hull_extreme_points(&inst, VariantId::Up).unwrap();
        let b = hull_extreme_points(&inst, VariantId::Up).unwrap();
        assert_eq!(a, b);
    }
}
