//! Computational verification of the structural claims: validity,
//! facet-definingness, full dimension, hull equality, and random-objective
//! equivalence as the cheap necessary condition.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};
use rand_core::{RngCore, SeedableRng};

use crate::cuts::{assemble_hull, hull_families, HullId};
use crate::formulation::{build_base, relax_integrality, InequalitySystem, VariantId};
use crate::model::{LinearInequality, Point, RegimeClass, UCInstance};
use crate::oracle::{hull_extreme_points, OracleError};
use crate::polycore::{affine_rank, dd_enumerate, lp_solve, DdError, LpSense, LpStatus};
use crate::rational::{fmt_rat, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Confirmed,
    Refuted,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Confirmed => "confirmed",
            Status::Refuted => "refuted",
            Status::Skipped => "skipped",
        })
    }
}

/// Exactly re-checkable refutation evidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// An extreme point violating a row.
    ViolatingPoint {
        point: Point,
        row_tag: String,
        violation: Rat,
    },
    /// The tight set spans less than the required affine dimension.
    LowRank {
        tight_count: usize,
        rank: usize,
        expected: usize,
    },
    /// A vertex of the assembled system with a non-binary y or u value.
    FractionalVertex { point: Point },
    /// An integral vertex of the assembled system outside the base region.
    InfeasibleVertex { point: Point, row_tag: String },
    /// An objective on which the assembled system is strictly looser than
    /// the mixed-integer optimum.
    ObjectiveGap {
        objective: Vec<(usize, Rat)>,
        relaxed_value: Rat,
        exact_value: Rat,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub claim: String,
    pub instance: String,
    pub status: Status,
    pub witness: Option<Witness>,
    /// Extreme points (or trials) examined.
    pub points_checked: usize,
    pub tight_count: usize,
    pub rank: Option<usize>,
    pub note: Option<String>,
}

impl VerificationReport {
    fn new(claim: impl Into<String>, inst: &UCInstance) -> Self {
        VerificationReport {
            claim: claim.into(),
            instance: instance_summary(inst),
            status: Status::Confirmed,
            witness: None,
            points_checked: 0,
            tight_count: 0,
            rank: None,
            note: None,
        }
    }

    pub fn confirmed(&self) -> bool {
        self.status == Status::Confirmed
    }

    fn refute(mut self, witness: Witness) -> Self {
        self.status = Status::Refuted;
        self.witness = Some(witness);
        self
    }

    fn skip(mut self, reason: impl Into<String>) -> Self {
        self.status = Status::Skipped;
        self.note = Some(reason.into());
        self
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}]: {} (points={}, tight={}",
            self.claim, self.instance, self.status, self.points_checked, self.tight_count
        )?;
        if let Some(r) = self.rank {
            write!(f, ", rank={r}")?;
        }
        write!(f, ")")?;
        if let Some(n) = &self.note {
            write!(f, " — {n}")?;
        }
        Ok(())
    }
}

pub fn instance_summary(inst: &UCInstance) -> String {
    format!(
        "T={} L={} ell={} Cmin={} Cmax={} Vbar={} V={} {}",
        inst.periods,
        inst.min_up,
        inst.min_down,
        fmt_rat(&inst.c_min),
        fmt_rat(&inst.c_max),
        fmt_rat(&inst.startup_ramp),
        fmt_rat(&inst.ramp),
        inst.regime()
    )
}

fn oracle_skip(report: VerificationReport, e: OracleError) -> VerificationReport {
    report.skip(format!("oracle unavailable: {e}"))
}

/// Confirmed iff no extreme point of the variant's hull violates the row.
pub fn check_validity(
    ineq: &LinearInequality,
    inst: &UCInstance,
    variant: VariantId,
) -> VerificationReport {
    let mut report = VerificationReport::new(format!("valid({})", ineq.tag), inst);
    let points = match hull_extreme_points(inst, variant) {
        Ok(p) => p,
        Err(e) => return oracle_skip(report, e),
    };
    report.points_checked = points.len();
    for p in &points {
        let e = ineq.eval(p).expect("row and point share the space");
        if e.tight {
            report.tight_count += 1;
        }
        if !e.satisfied {
            let violation = ineq.violation(p).expect("dimension checked");
            return report.refute(Witness::ViolatingPoint {
                point: p.clone(),
                row_tag: ineq.tag.clone(),
                violation,
            });
        }
    }
    report
}

/// Confirmed iff the row is valid and its tight extreme points span an
/// affine space of dimension `3T - 2`.
pub fn check_facet(
    ineq: &LinearInequality,
    inst: &UCInstance,
    variant: VariantId,
) -> VerificationReport {
    let mut report = VerificationReport::new(format!("facet({})", ineq.tag), inst);
    let points = match hull_extreme_points(inst, variant) {
        Ok(p) => p,
        Err(e) => return oracle_skip(report, e),
    };
    report.points_checked = points.len();
    let mut tight: Vec<Point> = Vec::new();
    for p in points {
        let e = ineq.eval(&p).expect("row and point share the space");
        if !e.satisfied {
            let violation = ineq.violation(&p).expect("dimension checked");
            return report.refute(Witness::ViolatingPoint {
                point: p,
                row_tag: ineq.tag.clone(),
                violation,
            });
        }
        if e.tight {
            tight.push(p);
        }
    }
    report.tight_count = tight.len();
    let expected = inst.space().dim() - 1;
    let rank = if tight.is_empty() {
        0
    } else {
        affine_rank(&tight)
    };
    report.rank = Some(rank);
    if rank == expected {
        report
    } else {
        report.refute(Witness::LowRank {
            tight_count: tight.len(),
            rank,
            expected,
        })
    }
}

/// Confirmed iff the extreme points span the whole space (affine rank
/// `3T - 1`).
pub fn check_full_dimension(inst: &UCInstance, variant: VariantId) -> VerificationReport {
    let mut report = VerificationReport::new(format!("full_dim({variant})"), inst);
    let points = match hull_extreme_points(inst, variant) {
        Ok(p) => p,
        Err(e) => return oracle_skip(report, e),
    };
    report.points_checked = points.len();
    let expected = inst.space().dim();
    let rank = affine_rank(&points);
    report.rank = Some(rank);
    if rank == expected {
        report
    } else {
        report.refute(Witness::LowRank {
            tight_count: points.len(),
            rank,
            expected,
        })
    }
}

fn is_binary(v: &Rat) -> bool {
    v.is_zero() || v.is_one()
}

/// Both hull-equality directions for an arbitrary candidate system:
/// (a) every extreme point of the variant satisfies every row;
/// (b) every vertex of the system has binary (y, u) and lies in the base
/// region. Confirmed iff both hold.
pub fn check_system_is_hull(
    inst: &UCInstance,
    sys: &InequalitySystem,
    variant: VariantId,
    claim: impl Into<String>,
) -> VerificationReport {
    let mut report = VerificationReport::new(claim, inst);
    let points = match hull_extreme_points(inst, variant) {
        Ok(p) => p,
        Err(e) => return oracle_skip(report, e),
    };
    report.points_checked = points.len();
    for p in &points {
        if let Some(row) = sys.first_violated(p) {
            let violation = row.violation(p).expect("dimension checked");
            return report.refute(Witness::ViolatingPoint {
                point: p.clone(),
                row_tag: row.tag.clone(),
                violation,
            });
        }
    }
    let vs = match dd_enumerate(sys) {
        Ok(vs) => vs,
        Err(DdError::Unbounded) => return report.skip("system is unbounded"),
        Err(e) => return report.skip(format!("vertex enumeration failed: {e}")),
    };
    report.tight_count = vs.points.len();
    let space = inst.space();
    let base = relax_integrality(&build_base(inst, variant));
    for v in &vs.points {
        let binary = (inst.periods..space.dim()).all(|id| is_binary(&v.values[id]));
        if !binary {
            return report.refute(Witness::FractionalVertex { point: v.clone() });
        }
        if let Some(row) = base.first_violated(v) {
            return report.refute(Witness::InfeasibleVertex {
                point: v.clone(),
                row_tag: row.tag.clone(),
            });
        }
    }
    report
}

/// Default horizon caps for the vertex-enumeration direction.
pub fn hull_dd_cap(which: HullId) -> usize {
    match which {
        HullId::K1 | HullId::K2 => 6,
        HullId::Up | HullId::Down => 5,
    }
}

pub fn hull_variant(which: HullId) -> VariantId {
    match which {
        HullId::K1 | HullId::K2 => VariantId::Full,
        HullId::Up => VariantId::Up,
        HullId::Down => VariantId::Down,
    }
}

fn hull_regime_matches(inst: &UCInstance, which: HullId) -> bool {
    match which {
        HullId::K1 => inst.regime() == RegimeClass::K1,
        HullId::K2 => inst.regime() == RegimeClass::K2,
        HullId::Up | HullId::Down => true,
    }
}

/// Hull equality for one of the four assemblies.
pub fn check_hull_equality(inst: &UCInstance, which: HullId) -> VerificationReport {
    let claim = format!("hull({which})");
    if !hull_regime_matches(inst, which) {
        return VerificationReport::new(claim, inst)
            .skip(format!("{which} does not apply to regime {}", inst.regime()));
    }
    if inst.periods > hull_dd_cap(which) {
        return VerificationReport::new(claim, inst).skip(format!(
            "T={} exceeds the vertex-enumeration cap {}",
            inst.periods,
            hull_dd_cap(which)
        ));
    }
    let sys = match assemble_hull(inst, which) {
        Ok(sys) => sys,
        Err(e) => return VerificationReport::new(claim, inst).skip(format!("assembly failed: {e}")),
    };
    check_system_is_hull(inst, &sys, hull_variant(which), claim)
}

/// The claim that the plain linear relaxation of the full formulation is
/// already the convex hull when `V < Cmax - Cmin` (excluding the K2
/// boundary, which has its own assembly).
pub fn check_base_relaxation_is_hull(inst: &UCInstance) -> VerificationReport {
    let claim = "hull(base_relaxation)".to_string();
    if inst.regime() != RegimeClass::SubHull {
        return VerificationReport::new(claim, inst).skip(format!(
            "claim applies to the strict sub-hull regime, instance is {}",
            inst.regime()
        ));
    }
    let sys = relax_integrality(&build_base(inst, VariantId::Full));
    check_system_is_hull(inst, &sys, VariantId::Full, claim)
}

/// Draws `trials` integer objectives with coefficients in `[-10, 10]` from
/// a seeded generator and compares the LP optimum over `sys` with the
/// exact optimum over the variant's extreme points. Confirmed iff all
/// trials agree.
pub fn random_objective_equivalence(
    inst: &UCInstance,
    sys: &InequalitySystem,
    variant: VariantId,
    trials: usize,
    seed: u64,
) -> VerificationReport {
    let mut report = VerificationReport::new(
        format!("objective_equivalence({}, trials={trials}, seed={seed})", sys.name),
        inst,
    );
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let dim = inst.space().dim();
    // the extreme points serve every trial; enumerate them once
    let points = match hull_extreme_points(inst, variant) {
        Ok(p) => p,
        Err(e) => return oracle_skip(report, e),
    };
    for trial in 0..trials {
        let mut objective: BTreeMap<usize, Rat> = BTreeMap::new();
        for id in 0..dim {
            let c = (rng.next_u32() % 21) as i64 - 10;
            if c != 0 {
                objective.insert(id, Rat::from_integer(c.into()));
            }
        }
        let score = |p: &Point| -> Rat {
            objective
                .iter()
                .map(|(id, c)| c * &p.values[*id])
                .fold(Rat::zero(), |acc, v| acc + v)
        };
        let exact = points
            .iter()
            .map(score)
            .max()
            .expect("feasible region is never empty");
        let relaxed = lp_solve(sys, &objective, LpSense::Max);
        report.points_checked = trial + 1;
        if relaxed.status != LpStatus::Optimal {
            return report.skip(format!("LP not optimal on trial {trial}"));
        }
        if relaxed.objective != exact {
            return report.refute(Witness::ObjectiveGap {
                objective: objective.into_iter().collect(),
                relaxed_value: relaxed.objective,
                exact_value: exact,
            });
        }
    }
    report
}

/// Validity and facet reports for every enumerated member of the
/// assembly's families.
pub fn check_all_members(inst: &UCInstance, which: HullId) -> Vec<VerificationReport> {
    let variant = hull_variant(which);
    let mut out = Vec::new();
    for &family in hull_families(which) {
        let enumeration = match crate::cuts::enumerate_family(inst, family) {
            Ok(e) => e,
            Err(e) => {
                out.push(
                    VerificationReport::new(format!("facet({family})"), inst)
                        .skip(format!("enumeration failed: {e}")),
                );
                continue;
            }
        };
        for member in &enumeration.members {
            out.push(check_facet(&member.row, inst, variant));
        }
    }
    out
}
