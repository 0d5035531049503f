//! Exact separation: given an arbitrary query point, find the most violated
//! member of each cut family. The chain families F7/F8/F9 decompose over
//! their telescoping predecessor structure and are solved by cheapest-chain
//! dynamic programs, one per anchor/shift pair; every other family has a
//! small parameter space and is enumerated outright. Query points need not
//! be feasible: cutting-plane callers hand in LP-relaxation iterates that
//! may violate bounds transiently.

use alloc::string::ToString;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::cuts::{enumerate_family, generate, hull_families, CutError, CutFamily, CutParams, HullId};
use crate::formulation::VariantId;
use crate::model::{Point, RegimeClass, UCInstance, Var, VariableSpace};
use crate::rational::{rat, Rat};

/// Outcome of separating one family at one query point. `violation` is
/// `lhs - rhs` of the best member's row at the point; `found` iff it is
/// strictly positive. `best` is the maximizing parameter choice (present
/// whenever the family has any member on the instance), and regenerating
/// the row from it reproduces `violation` exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationResult {
    pub family: CutFamily,
    pub best: Option<CutParams>,
    pub violation: Rat,
    pub found: bool,
}

impl SeparationResult {
    fn empty(family: CutFamily) -> Self {
        SeparationResult {
            family,
            best: None,
            violation: Rat::zero(),
            found: false,
        }
    }

    fn from_best(family: CutFamily, best: Option<(CutParams, Rat)>) -> Self {
        match best {
            None => SeparationResult::empty(family),
            Some((params, violation)) => {
                let found = violation > Rat::zero();
                SeparationResult {
                    family,
                    best: Some(params),
                    violation,
                    found,
                }
            }
        }
    }
}

fn is_chain_family(family: CutFamily) -> bool {
    matches!(family, CutFamily::F7 | CutFamily::F8 | CutFamily::F9)
}

/// Strictly-better update; ties keep the earlier (lexicographically first
/// in enumeration order) candidate for reproducibility.
fn consider(best: &mut Option<(CutParams, Rat)>, params: CutParams, violation: Rat) {
    let better = match best {
        None => true,
        Some((_, v)) => violation > *v,
    };
    if better {
        *best = Some((params, violation));
    }
}

/// The point's value of `y_i - sum_{j=0}^{jmax} u_{i-j}` under the same
/// horizon convention as the row builder (`y_{T+1} = y_T`, `u` only for
/// periods in `[2, T]`); `jmax < 0` keeps only the `y` term.
fn window_val(
    inst: &UCInstance,
    space: &VariableSpace,
    point: &Point,
    i: usize,
    jmax: i64,
) -> Rat {
    let t_count = inst.periods;
    let mut v = point.values[space.id(Var::Y(i.min(t_count)))].clone();
    if jmax >= 0 {
        for j in 0..=jmax as usize {
            let idx = i - j;
            if (2..=t_count).contains(&idx) {
                v -= &point.values[space.id(Var::U(idx))];
            }
        }
    }
    v
}

/// Cheapest free set for F7 at fixed (t, m): minimizes the chain cost
/// `sum_{i in S ∪ {t}} (i - d_i) w(i)` over ascending chains from the
/// anchor `t-m` to `t` with inner nodes in `[t-m+1, t-1]`.
fn dp_f7(
    inst: &UCInstance,
    space: &VariableSpace,
    point: &Point,
    t: usize,
    m: usize,
) -> Vec<usize> {
    if m == 0 {
        return Vec::new();
    }
    let l = inst.min_up as i64;
    let kappa = inst.derived().kappa as i64;
    let jcap = |i: usize| (l - 1).min(i as i64 - 2).min(kappa);
    let anchor = t - m;
    let nodes: Vec<usize> = (anchor + 1..=t).collect();
    let w: Vec<Rat> = nodes
        .iter()
        .map(|&i| window_val(inst, space, point, i, jcap(i)))
        .collect();
    let mut cost: Vec<Rat> = Vec::with_capacity(nodes.len());
    let mut prev: Vec<usize> = Vec::with_capacity(nodes.len());
    for (k, &i) in nodes.iter().enumerate() {
        // direct link from the anchor, then every earlier inner node;
        // the terminal t is last and never serves as a predecessor
        let mut bc = rat((i - anchor) as i64) * &w[k];
        let mut bp = usize::MAX;
        for p in 0..k {
            let c = &cost[p] + rat((i - nodes[p]) as i64) * &w[k];
            if c < bc {
                bc = c;
                bp = p;
            }
        }
        cost.push(bc);
        prev.push(bp);
    }
    let mut set = Vec::new();
    let mut k = nodes.len() - 1;
    while prev[k] != usize::MAX {
        k = prev[k];
        set.push(nodes[k]);
    }
    set.reverse();
    set
}

/// Cheapest free set for F8 at fixed (t, m): minimizes
/// `sum_{i in S ∪ {t+L}} (d_i - i) w(i)` over descending-from-the-anchor
/// chains `t+L -> ... -> t+m+1` with free nodes in `[t+L+1, t+m]`. Below
/// `m = L` the set is forced empty.
fn dp_f8(
    inst: &UCInstance,
    space: &VariableSpace,
    point: &Point,
    t: usize,
    m: usize,
) -> Vec<usize> {
    let l = inst.min_up;
    if m < l {
        return Vec::new();
    }
    let mcap = m.min(l - 1) as i64;
    let anchor = t + m + 1;
    let nodes: Vec<usize> = (t + l..=t + m).collect();
    let w: Vec<Rat> = nodes
        .iter()
        .map(|&i| window_val(inst, space, point, i, mcap))
        .collect();
    let n = nodes.len();
    let mut cost: Vec<Rat> = alloc::vec![Rat::zero(); n];
    let mut next: Vec<usize> = alloc::vec![usize::MAX; n];
    for k in (0..n).rev() {
        let i = nodes[k];
        let mut bc = rat((anchor - i) as i64) * &w[k];
        let mut bn = usize::MAX;
        for p in k + 1..n {
            let c = rat((nodes[p] - i) as i64) * &w[k] + &cost[p];
            if c < bc {
                bc = c;
                bn = p;
            }
        }
        cost[k] = bc;
        next[k] = bn;
    }
    // walk from the mandatory first node t+L; only the free tail is S
    let mut set = Vec::new();
    let mut k = 0;
    while next[k] != usize::MAX {
        k = next[k];
        set.push(nodes[k]);
    }
    set
}

/// Cheapest free set for F9 at fixed (t, m). The first chosen element `q`
/// carries the extra `(Cmin + V - Vbar) w(q)` term, which breaks pure chain
/// decomposability; a single backward chain DP toward `t` plus a sweep over
/// `q` stays exact. For `m <= L` the set is forced empty.
fn dp_f9(
    inst: &UCInstance,
    space: &VariableSpace,
    point: &Point,
    t: usize,
    m: usize,
) -> Vec<usize> {
    let l = inst.min_up;
    if m <= l {
        return Vec::new();
    }
    let delta = ((l - 1).min(m - 1)) as i64;
    let anchor = t - m + l;
    let gap = &inst.c_min + &inst.ramp - &inst.startup_ramp;
    let v = &inst.ramp;
    let free: Vec<usize> = (anchor..t).collect();
    let wt = window_val(inst, space, point, t, delta);
    let wf: Vec<Rat> = free
        .iter()
        .map(|&i| window_val(inst, space, point, i, delta))
        .collect();
    let n = free.len();
    // cost[k]: cheapest chain from free[k] to t, weight on the later node
    let mut cost: Vec<Rat> = alloc::vec![Rat::zero(); n];
    let mut next: Vec<usize> = alloc::vec![usize::MAX; n];
    for k in (0..n).rev() {
        let i = free[k];
        let mut bc = rat((t - i) as i64) * &wt;
        let mut bn = usize::MAX;
        for p in k + 1..n {
            let c = rat((free[p] - i) as i64) * &wf[p] + &cost[p];
            if c < bc {
                bc = c;
                bn = p;
            }
        }
        cost[k] = bc;
        next[k] = bn;
    }
    // q = t means S0 = ∅; otherwise q = min S0 and the chain runs q -> t
    let mut best_total = &gap * &wt + v * rat((t - anchor) as i64) * &wt;
    let mut best_q = usize::MAX;
    for k in 0..n {
        let total =
            &gap * &wf[k] + v * (rat((free[k] - anchor) as i64) * &wf[k] + &cost[k]);
        if total < best_total {
            best_total = total;
            best_q = k;
        }
    }
    if best_q == usize::MAX {
        return Vec::new();
    }
    let mut set = alloc::vec![free[best_q]];
    let mut k = best_q;
    while next[k] != usize::MAX {
        k = next[k];
        set.push(free[k]);
    }
    set
}

/// Exact separation of a chain family (F7, F8, F9): for every admissible
/// (t, m) the best free set is found by dynamic programming, the member is
/// regenerated, and its violation at the point is compared exactly.
pub fn separate_chain_family(
    inst: &UCInstance,
    family: CutFamily,
    point: &Point,
) -> Result<SeparationResult, CutError> {
    if !is_chain_family(family) {
        return Err(CutError::Param {
            family,
            reason: "not a chain family; use separate_finite_family".to_string(),
        });
    }
    let space = inst.space();
    let t_count = inst.periods;
    let mut best: Option<(CutParams, Rat)> = None;
    for t in 1..=t_count {
        for m in 0..=t_count {
            let empty = CutParams::new(family, t, m, Vec::new());
            let row = match generate(inst, &empty) {
                Ok(row) => row,
                // out-of-range (t, m); the admissible window differs per t
                Err(CutError::Param { .. }) => continue,
                Err(e) => return Err(e),
            };
            let violation = row.violation(point).expect("space dimension matches");
            consider(&mut best, empty, violation);
            let set = match family {
                CutFamily::F7 => dp_f7(inst, &space, point, t, m),
                CutFamily::F8 => dp_f8(inst, &space, point, t, m),
                _ => dp_f9(inst, &space, point, t, m),
            };
            if set.is_empty() {
                continue;
            }
            let params = CutParams::new(family, t, m, set);
            let row = generate(inst, &params).expect("DP emits admissible sets");
            let violation = row.violation(point).expect("space dimension matches");
            consider(&mut best, params, violation);
        }
    }
    Ok(SeparationResult::from_best(family, best))
}

/// Exact separation of a finite family by evaluating every enumerated
/// member. Fails on chain families (their parameter space is exponential)
/// and on regimes where the family has no members.
pub fn separate_finite_family(
    inst: &UCInstance,
    family: CutFamily,
    point: &Point,
) -> Result<SeparationResult, CutError> {
    if is_chain_family(family) {
        return Err(CutError::Param {
            family,
            reason: "chain family; use separate_chain_family".to_string(),
        });
    }
    let e = enumerate_family(inst, family)?;
    let mut best: Option<(CutParams, Rat)> = None;
    for member in e.members {
        let violation = member.row.violation(point).expect("space dimension matches");
        let params = member.params.into_iter().next().expect("members have params");
        consider(&mut best, params, violation);
    }
    Ok(SeparationResult::from_best(family, best))
}

/// The families whose rows are valid for the given variant's polytope on
/// this instance: the one-sided families for their own variant, everything
/// (in the regime-matching mix) for the full polytope.
pub fn admissible_families(inst: &UCInstance, variant: VariantId) -> Vec<CutFamily> {
    match variant {
        VariantId::Up => hull_families(HullId::Up).to_vec(),
        VariantId::Down => hull_families(HullId::Down).to_vec(),
        VariantId::Full => {
            let mut out: Vec<CutFamily> = Vec::new();
            match inst.regime() {
                RegimeClass::K1 => out.push(CutFamily::F2),
                RegimeClass::K2 => {
                    out.extend([CutFamily::F5, CutFamily::F6U, CutFamily::F6D]);
                }
                _ => {}
            }
            // the one-sided families stay valid on the intersection
            out.extend([
                CutFamily::F7,
                CutFamily::F8,
                CutFamily::F9,
                CutFamily::F10,
            ]);
            if inst.regime() == RegimeClass::K2 {
                out.extend([CutFamily::F11, CutFamily::F12, CutFamily::F13]);
            }
            out.sort_unstable();
            out
        }
    }
}

/// Separates one family, dispatching to the chain DP or the finite
/// enumeration as appropriate.
pub fn separate_family(
    inst: &UCInstance,
    family: CutFamily,
    point: &Point,
) -> Result<SeparationResult, CutError> {
    if is_chain_family(family) {
        separate_chain_family(inst, family, point)
    } else {
        separate_finite_family(inst, family, point)
    }
}

/// Separates every family admissible for the variant and sorts the results
/// by violation descending, ties by family then parameters. Families whose
/// members do not exist on this instance are skipped.
pub fn separate_all(inst: &UCInstance, variant: VariantId, point: &Point) -> Vec<SeparationResult> {
    let mut out = Vec::new();
    for family in admissible_families(inst, variant) {
        let res = if is_chain_family(family) {
            separate_chain_family(inst, family, point)
        } else {
            separate_finite_family(inst, family, point)
        };
        if let Ok(r) = res {
            out.push(r);
        }
    }
    out.sort_by(|a, b| {
        b.violation
            .cmp(&a.violation)
            .then_with(|| a.family.cmp(&b.family))
            .then_with(|| a.best.cmp(&b.best))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulation::{build_base, relax_integrality};
    use crate::model::Sense;
    use crate::oracle::hull_extreme_points;
    use crate::polycore::{lp_solve, LpSense, LpStatus};
    use crate::rational::ratio;
    use alloc::collections::BTreeMap;
    use alloc::vec;
    use rand_core::{RngCore, SeedableRng};

    fn wide_t5() -> UCInstance {
        UCInstance::new(5, 1, 1, rat(1), rat(4), ratio(3, 2), rat(1)).unwrap()
    }

    fn wide_t6_l2() -> UCInstance {
        UCInstance::new(6, 2, 1, rat(1), rat(4), ratio(3, 2), rat(1)).unwrap()
    }

    fn k2_t5_l2() -> UCInstance {
        UCInstance::new(5, 2, 1, rat(1), rat(3), rat(1), rat(1)).unwrap()
    }

    fn k1_t3() -> UCInstance {
        UCInstance::new(3, 1, 1, rat(1), rat(3), rat(2), rat(2)).unwrap()
    }

    fn random_point(inst: &UCInstance, rng: &mut rand_chacha::ChaCha8Rng) -> Point {
        // arbitrary fractional coordinates, deliberately not confined to
        // the feasible box
        let dim = inst.space().dim();
        let mut p = Point::zero(dim);
        for k in 0..dim {
            let num = (rng.next_u64() % 17) as i64 - 2;
            let den = (rng.next_u64() % 3) as i64 + 1;
            p.values[k] = ratio(num, den);
        }
        p
    }

    fn brute_force_max(inst: &UCInstance, family: CutFamily, point: &Point) -> Option<Rat> {
        let e = enumerate_family(inst, family).unwrap();
        e.members
            .iter()
            .map(|m| m.row.violation(point).unwrap())
            .max()
    }

    #[test]
    fn chain_dp_matches_brute_force() {
        let cases = [wide_t5(), wide_t6_l2(), k2_t5_l2()];
        for inst in &cases {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
            for _ in 0..20 {
                let p = random_point(inst, &mut rng);
                for family in [CutFamily::F7, CutFamily::F8, CutFamily::F9] {
                    let r = separate_chain_family(inst, family, &p).unwrap();
                    let bf = brute_force_max(inst, family, &p);
                    match bf {
                        None => assert!(r.best.is_none(), "{family}"),
                        Some(v) => assert_eq!(r.violation, v, "{family} on {inst:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn best_params_regenerate_the_violation() {
        let inst = wide_t6_l2();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let p = random_point(&inst, &mut rng);
            for r in separate_all(&inst, VariantId::Full, &p) {
                let params = r.best.as_ref().expect("families have members here");
                let row = generate(&inst, params).unwrap();
                assert_eq!(row.violation(&p).unwrap(), r.violation);
                assert_eq!(r.found, r.violation > Rat::zero());
            }
        }
    }

    #[test]
    fn nothing_found_at_extreme_points() {
        let cases = [
            (wide_t5(), VariantId::Up),
            (wide_t5(), VariantId::Down),
            (k2_t5_l2(), VariantId::Full),
            (k1_t3(), VariantId::Full),
        ];
        for (inst, variant) in cases {
            for p in hull_extreme_points(&inst, variant).unwrap() {
                for r in separate_all(&inst, variant, &p) {
                    assert!(!r.found, "{} cut off by {:?}", r.family, r.best);
                }
            }
        }
    }

    #[test]
    fn lp_relaxation_gap_yields_a_cut() {
        // whenever a random objective has a strict gap between the plain
        // ramp-up relaxation and the true optimum, separation must find a
        // violated row at the LP iterate
        let inst = UCInstance::new(5, 2, 1, rat(1), rat(4), ratio(3, 2), rat(1)).unwrap();
        let sys = relax_integrality(&build_base(&inst, VariantId::Up));
        let space = inst.space();
        let pts = hull_extreme_points(&inst, VariantId::Up).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut gaps = 0;
        for _ in 0..10 {
            let mut obj: BTreeMap<usize, Rat> = BTreeMap::new();
            for k in 0..space.dim() {
                obj.insert(k, rat((rng.next_u64() % 21) as i64 - 10));
            }
            let lp = lp_solve(&sys, &obj, LpSense::Max);
            assert_eq!(lp.status, LpStatus::Optimal);
            let score = |p: &Point| -> Rat {
                obj.iter().map(|(k, c)| c * &p.values[*k]).sum()
            };
            let exact = pts.iter().map(score).max().unwrap();
            assert!(lp.objective >= exact);
            if lp.objective > exact {
                gaps += 1;
                let results = separate_all(&inst, VariantId::Up, &lp.solution);
                assert!(results.iter().any(|r| r.found));
            }
        }
        assert!(gaps > 0, "no objective exposed the relaxation");
    }

    #[test]
    fn results_sorted_and_deterministic() {
        let inst = k2_t5_l2();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let p = random_point(&inst, &mut rng);
        let a = separate_all(&inst, VariantId::Full, &p);
        let b = separate_all(&inst, VariantId::Full, &p);
        assert_eq!(a, b);
        assert_eq!(a.len(), admissible_families(&inst, VariantId::Full).len());
        for w in a.windows(2) {
            assert!(w[0].violation >= w[1].violation);
        }
    }

    #[test]
    fn infeasible_query_points_are_allowed() {
        // y=(1,1,1), u=0, x=(4,3,3): only the first period's bound breaks
        let inst = k1_t3();
        let space = inst.space();
        let mut p = Point::zero(space.dim());
        for t in 1..=3 {
            p.set(&space, Var::Y(t), rat(1));
            p.set(&space, Var::X(t), rat(3));
        }
        p.set(&space, Var::X(1), rat(4));
        let r = separate_finite_family(&inst, CutFamily::F2, &p).unwrap();
        assert!(r.found);
        assert_eq!(r.violation, rat(1));
        assert_eq!(r.best.unwrap().t, 1);
    }

    #[test]
    fn family_kind_mismatch_errors() {
        let inst = k1_t3();
        let p = Point::zero(inst.space().dim());
        assert!(separate_finite_family(&inst, CutFamily::F7, &p).is_err());
        assert!(separate_chain_family(&inst, CutFamily::F2, &p).is_err());
    }

    #[test]
    fn admissible_families_track_variant_and_regime() {
        assert_eq!(
            admissible_families(&k1_t3(), VariantId::Full),
            vec![
                CutFamily::F2,
                CutFamily::F7,
                CutFamily::F8,
                CutFamily::F9,
                CutFamily::F10
            ]
        );
        assert_eq!(
            admissible_families(&k1_t3(), VariantId::Up),
            vec![CutFamily::F7, CutFamily::F9]
        );
        assert_eq!(admissible_families(&k2_t5_l2(), VariantId::Full).len(), 10);
        // a regime matching no special family still gets the one-sided ones
        let general =
            UCInstance::new(4, 1, 1, rat(1), rat(4), ratio(3, 2), rat(1)).unwrap();
        assert_eq!(
            admissible_families(&general, VariantId::Full),
            vec![CutFamily::F7, CutFamily::F8, CutFamily::F9, CutFamily::F10]
        );
        let _ = Sense::Le;
    }
}
