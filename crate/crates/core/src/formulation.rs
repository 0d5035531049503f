//! Base constraint systems for the polytopes P, P^U, P^D, and the
//! minimum-up/-down hull base.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::model::{
    LinearInequality, Point, Sense, UCInstance, Var, VariableSpace,
};
use crate::rational::Rat;

/// Which ramp rows the base system keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantId {
    /// Full polytope P: ramp-up and ramp-down.
    Full,
    /// P^U: drops the ramp-down rows.
    Up,
    /// P^D: drops the ramp-up rows.
    Down,
}

impl fmt::Display for VariantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VariantId::Full => "P_FULL",
            VariantId::Up => "P_UP",
            VariantId::Down => "P_DOWN",
        })
    }
}

/// Ordered list of rows over one variable space. `integral` records whether
/// y and u carry integrality as metadata; it is never a row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InequalitySystem {
    pub space: VariableSpace,
    pub rows: Vec<LinearInequality>,
    pub name: String,
    pub integral: bool,
}

impl InequalitySystem {
    pub fn new(space: VariableSpace, name: impl Into<String>) -> Self {
        InequalitySystem {
            space,
            rows: Vec::new(),
            name: name.into(),
            integral: false,
        }
    }

    pub fn push(&mut self, row: LinearInequality) {
        debug_assert!(
            self.rows.iter().all(|r| r.tag != row.tag),
            "duplicate row tag {}",
            row.tag
        );
        self.rows.push(row);
    }

    /// First row violated by `p`, if any.
    pub fn first_violated(&self, p: &Point) -> Option<&LinearInequality> {
        self.rows
            .iter()
            .find(|r| !r.eval(p).expect("dimension checked by caller").satisfied)
    }

    pub fn is_feasible(&self, p: &Point) -> bool {
        self.first_violated(p).is_none()
    }

    /// One row per line in the stable dump format.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            out.push_str(&row.dump(&self.space));
            out.push('\n');
        }
        out
    }

    /// Rows whose removal leaves every listed point feasible and every
    /// remaining row unchanged — an empirical redundancy report against a
    /// finite point set. Rows are never dropped here.
    pub fn redundancy_report(&self, vertices: &[Point]) -> Vec<(String, bool)> {
        self.rows
            .iter()
            .map(|row| {
                let tight_somewhere = vertices
                    .iter()
                    .any(|v| row.eval(v).map(|e| e.tight).unwrap_or(false));
                (row.tag.clone(), !tight_somewhere)
            })
            .collect()
    }
}

fn le(tag: String) -> LinearInequality {
    LinearInequality::new(tag, Sense::Le, Rat::zero())
}

/// Rows (1a): sum_{i=t-L+1}^{t} u_i <= y_t for t in [L+1, T].
pub(crate) fn push_min_up(sys: &mut InequalitySystem, inst: &UCInstance) {
    let s = sys.space;
    for t in inst.min_up + 1..=inst.periods {
        let mut row = le(format!("1a_t{t}"));
        for i in t - inst.min_up + 1..=t {
            row.add_var(&s, Var::U(i), Rat::one());
        }
        row.add_var(&s, Var::Y(t), -Rat::one());
        sys.push(row);
    }
}

/// Rows (1b): sum_{i=t-ell+1}^{t} u_i + y_{t-ell} <= 1 for t in [ell+1, T].
pub(crate) fn push_min_down(sys: &mut InequalitySystem, inst: &UCInstance) {
    let s = sys.space;
    for t in inst.min_down + 1..=inst.periods {
        let mut row = LinearInequality::new(format!("1b_t{t}"), Sense::Le, Rat::one());
        for i in t - inst.min_down + 1..=t {
            row.add_var(&s, Var::U(i), Rat::one());
        }
        row.add_var(&s, Var::Y(t - inst.min_down), Rat::one());
        sys.push(row);
    }
}

/// Rows (1c): y_t - y_{t-1} - u_t <= 0 for t in [2, T].
pub(crate) fn push_logical(sys: &mut InequalitySystem, inst: &UCInstance) {
    let s = sys.space;
    for t in 2..=inst.periods {
        let mut row = le(format!("1c_t{t}"));
        row.add_var(&s, Var::Y(t), Rat::one());
        row.add_var(&s, Var::Y(t - 1), -Rat::one());
        row.add_var(&s, Var::U(t), -Rat::one());
        sys.push(row);
    }
}

pub(crate) fn push_commitment_bounds(sys: &mut InequalitySystem, inst: &UCInstance) {
    let s = sys.space;
    for t in 1..=inst.periods {
        let mut lo = LinearInequality::new(format!("ylb_t{t}"), Sense::Ge, Rat::zero());
        lo.add_var(&s, Var::Y(t), Rat::one());
        sys.push(lo);
        let mut hi = LinearInequality::new(format!("yub_t{t}"), Sense::Le, Rat::one());
        hi.add_var(&s, Var::Y(t), Rat::one());
        sys.push(hi);
    }
    for t in 2..=inst.periods {
        let mut lo = LinearInequality::new(format!("ulb_t{t}"), Sense::Ge, Rat::zero());
        lo.add_var(&s, Var::U(t), Rat::one());
        sys.push(lo);
        let mut hi = LinearInequality::new(format!("uub_t{t}"), Sense::Le, Rat::one());
        hi.add_var(&s, Var::U(t), Rat::one());
        sys.push(hi);
    }
}

/// Builds the base constraint system for the requested variant, rows in the
/// stated order, with explicit variable bounds appended. Integrality of y
/// and u is metadata on the system, not a row.
pub fn build_base(inst: &UCInstance, variant: VariantId) -> InequalitySystem {
    let space = inst.space();
    let mut sys = InequalitySystem::new(space, format!("base_{variant}"));
    sys.integral = true;

    push_min_up(&mut sys, inst);
    push_min_down(&mut sys, inst);
    push_logical(&mut sys, inst);

    // (1d), (1e): generation bounds.
    for t in 1..=inst.periods {
        let mut lo = le(format!("1d_t{t}"));
        lo.add_var(&space, Var::X(t), -Rat::one());
        lo.add_var(&space, Var::Y(t), inst.c_min.clone());
        sys.push(lo);
        let mut hi = le(format!("1e_t{t}"));
        hi.add_var(&space, Var::X(t), Rat::one());
        hi.add_var(&space, Var::Y(t), -inst.c_max.clone());
        sys.push(hi);
    }

    // (1f): x_t - x_{t-1} + (Vbar - V) y_{t-1} <= Vbar.
    if variant != VariantId::Down {
        for t in 2..=inst.periods {
            let mut row =
                LinearInequality::new(format!("1f_t{t}"), Sense::Le, inst.startup_ramp.clone());
            row.add_var(&space, Var::X(t), Rat::one());
            row.add_var(&space, Var::X(t - 1), -Rat::one());
            row.add_var(&space, Var::Y(t - 1), &inst.startup_ramp - &inst.ramp);
            sys.push(row);
        }
    }

    // (1g): x_{t-1} - x_t + (Vbar - V) y_t <= Vbar.
    if variant != VariantId::Up {
        for t in 2..=inst.periods {
            let mut row =
                LinearInequality::new(format!("1g_t{t}"), Sense::Le, inst.startup_ramp.clone());
            row.add_var(&space, Var::X(t - 1), Rat::one());
            row.add_var(&space, Var::X(t), -Rat::one());
            row.add_var(&space, Var::Y(t), &inst.startup_ramp - &inst.ramp);
            sys.push(row);
        }
    }

    // Bound rows: x >= 0, 0 <= y <= 1, 0 <= u <= 1.
    for t in 1..=inst.periods {
        let mut lo = LinearInequality::new(format!("xlb_t{t}"), Sense::Ge, Rat::zero());
        lo.add_var(&space, Var::X(t), Rat::one());
        sys.push(lo);
    }
    push_commitment_bounds(&mut sys, inst);
    sys
}

/// Minimum-up/-down time hull base over (y, u): rows (1a), (1b), (1c),
/// u >= 0, plus the y bounds and u <= 1.
pub fn build_mud_hull_base(inst: &UCInstance) -> InequalitySystem {
    let space = VariableSpace::commitment(inst.periods);
    let mut sys = InequalitySystem::new(space, "mud_hull_base");
    push_min_up(&mut sys, inst);
    push_min_down(&mut sys, inst);
    push_logical(&mut sys, inst);
    push_commitment_bounds(&mut sys, inst);
    sys
}

/// Same rows, integrality metadata cleared. Idempotent.
pub fn relax_integrality(sys: &InequalitySystem) -> InequalitySystem {
    let mut out = sys.clone();
    out.integral = false;
    out
}
