//! Strengthened valid inequalities for the ramping polytopes, their
//! parameterized enumeration, and the four convex-hull assemblies.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::formulation::{
    push_commitment_bounds, push_logical, push_min_down, push_min_up, InequalitySystem,
};
use crate::model::{LinearInequality, RegimeClass, Sense, UCInstance, Var, VariableSpace};
use crate::rational::{floor_int, rat_usize, Rat};

/// The cut families. F2 tightens the K1 regime; F5/F6U/F6D the K2 regime;
/// F7/F9 describe the ramp-up hull and F8/F10 the ramp-down hull. F11, F12
/// and F13 close the remaining K2 facet classes that mix evidence from both
/// ramping directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CutFamily {
    F2,
    F5,
    F6U,
    F6D,
    F7,
    F8,
    F9,
    F10,
    F11,
    F12,
    F13,
}

impl fmt::Display for CutFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CutFamily::F2 => "F2",
            CutFamily::F5 => "F5",
            CutFamily::F6U => "F6U",
            CutFamily::F6D => "F6D",
            CutFamily::F7 => "F7",
            CutFamily::F8 => "F8",
            CutFamily::F9 => "F9",
            CutFamily::F10 => "F10",
            CutFamily::F11 => "F11",
            CutFamily::F12 => "F12",
            CutFamily::F13 => "F13",
        })
    }
}

pub const ALL_FAMILIES: [CutFamily; 11] = [
    CutFamily::F2,
    CutFamily::F5,
    CutFamily::F6U,
    CutFamily::F6D,
    CutFamily::F7,
    CutFamily::F8,
    CutFamily::F9,
    CutFamily::F10,
    CutFamily::F11,
    CutFamily::F12,
    CutFamily::F13,
];

/// One parameter choice of a family: anchor period `t`, shift `m` (0 when
/// the family has none), and the free index set `set` (sorted ascending,
/// empty when the family has none).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CutParams {
    pub family: CutFamily,
    pub t: usize,
    pub m: usize,
    pub set: Vec<usize>,
}

impl CutParams {
    pub fn of_t(family: CutFamily, t: usize) -> Self {
        CutParams {
            family,
            t,
            m: 0,
            set: Vec::new(),
        }
    }

    pub fn new(family: CutFamily, t: usize, m: usize, mut set: Vec<usize>) -> Self {
        set.sort_unstable();
        set.dedup();
        CutParams { family, t, m, set }
    }

    fn uses_m(&self) -> bool {
        matches!(
            self.family,
            CutFamily::F2 | CutFamily::F7 | CutFamily::F8 | CutFamily::F9 | CutFamily::F10
        )
    }

    fn uses_set(&self) -> bool {
        matches!(
            self.family,
            CutFamily::F5
                | CutFamily::F7
                | CutFamily::F8
                | CutFamily::F9
                | CutFamily::F10
                | CutFamily::F12
                | CutFamily::F13
        )
    }
}

impl fmt::Display for CutParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[t={}", self.family, self.t)?;
        if self.uses_m() {
            write!(f, ",m={}", self.m)?;
        }
        if self.uses_set() {
            write!(f, ",S={{")?;
            for (k, i) in self.set.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{i}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "]")
    }
}

/// Why a parameter choice produced no row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CutError {
    /// The family is only admissible in a specific regime.
    Regime {
        family: CutFamily,
        required: &'static str,
        found: RegimeClass,
    },
    /// A parameter is outside its admissible range.
    Param { family: CutFamily, reason: String },
    /// The member would reference a period past the horizon; it is skipped.
    Horizon { params: CutParams },
}

impl fmt::Display for CutError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutError::Regime {
                family,
                required,
                found,
            } => write!(f, "{family} requires regime {required}, instance is {found}"),
            CutError::Param { family, reason } => write!(f, "{family}: {reason}"),
            CutError::Horizon { params } => {
                write!(f, "{params} references a period past the horizon")
            }
        }
    }
}

fn param_err(family: CutFamily, reason: impl Into<String>) -> CutError {
    CutError::Param {
        family,
        reason: reason.into(),
    }
}

/// Sparse row under construction in the full variable layout. All terms are
/// moved to the left side of a `<= 0` row.
struct Builder {
    space: VariableSpace,
    periods: usize,
    row: LinearInequality,
}

impl Builder {
    fn new(inst: &UCInstance, tag: String) -> Self {
        Builder {
            space: inst.space(),
            periods: inst.periods,
            row: LinearInequality::new(tag, Sense::Le, Rat::from_integer(0.into())),
        }
    }

    fn x(&mut self, t: usize, c: Rat) {
        self.row.add_var(&self.space, Var::X(t), c);
    }

    fn y(&mut self, t: usize, c: Rat) {
        self.row.add_var(&self.space, Var::Y(t), c);
    }

    fn u(&mut self, t: usize, c: Rat) {
        self.row.add_var(&self.space, Var::U(t), c);
    }

    /// Adds `c * (y_i - sum_{j=0}^{jmax} u_{i-j})`; `jmax < 0` keeps only
    /// the `y_i` term. Periods are clamped by the horizon convention
    /// `y_{T+1} = y_T`, `u_{T+1} = 0`; callers never pass indices beyond
    /// `T + 1`.
    fn window(&mut self, i: usize, jmax: i64, c: &Rat) {
        debug_assert!(i <= self.periods + 1);
        self.y(i.min(self.periods), c.clone());
        if jmax >= 0 {
            for j in 0..=jmax as usize {
                let idx = i - j;
                if idx <= self.periods {
                    self.u(idx, -c.clone());
                }
            }
        }
    }

    fn finish(self) -> LinearInequality {
        self.row
    }
}

fn min3(a: i64, b: i64, c: i64) -> i64 {
    a.min(b).min(c)
}

/// `min{a in set ∪ {anchor} : a > i}`; the anchor always qualifies.
fn chain_next(set: &[usize], anchor: usize, i: usize) -> usize {
    debug_assert!(anchor > i);
    set.iter()
        .copied()
        .filter(|&a| a > i)
        .min()
        .map_or(anchor, |s| s.min(anchor))
}

/// `max{a in set ∪ {anchor} : a < i}`; the anchor always qualifies.
fn chain_prev(set: &[usize], anchor: usize, i: usize) -> usize {
    debug_assert!(anchor < i);
    set.iter()
        .copied()
        .filter(|&a| a < i)
        .max()
        .map_or(anchor, |s| s.max(anchor))
}

/// `floor((Cmax - Vbar) / V)`, the maximum number of full ramp steps that
/// fit above the start-up level.
fn steps_above_startup(inst: &UCInstance) -> usize {
    let q = (&inst.c_max - &inst.startup_ramp) / &inst.ramp;
    floor_int(&q)
        .try_into()
        .expect("Cmax > Vbar for valid instances")
}

fn check_t(family: CutFamily, t: usize, lo: usize, hi: usize) -> Result<(), CutError> {
    if t < lo || t > hi {
        return Err(param_err(family, format!("t={t} outside [{lo},{hi}]")));
    }
    Ok(())
}

fn check_set(family: CutFamily, set: &[usize], lo: usize, hi: usize) -> Result<(), CutError> {
    // hi < lo means the only admissible set is the empty one.
    if set.iter().any(|&i| i < lo || i > hi) {
        return Err(param_err(
            family,
            format!("index set not contained in [{lo},{hi}]"),
        ));
    }
    Ok(())
}

/// K1 upper-bound row:
/// `x_t <= Vbar y_t + (Cmax - Vbar)(y_s - sum_{i=0}^{j} u_{s-i})`
/// with `s = min(t+m, T)`, `m in {0, 1}`, and `j = min(1, L-1, s-2, s-t)`.
/// The `s = t` member carries the start-up indicator `u_t`, which the
/// `s = t+1` window only picks up when `L >= 2`; both are needed at `L = 1`.
fn gen_f2(inst: &UCInstance, p: &CutParams) -> Result<LinearInequality, CutError> {
    if inst.regime() != RegimeClass::K1 {
        return Err(CutError::Regime {
            family: CutFamily::F2,
            required: "K1",
            found: inst.regime(),
        });
    }
    let t_count = inst.periods;
    check_t(CutFamily::F2, p.t, 1, t_count)?;
    if p.m > 1 {
        return Err(param_err(CutFamily::F2, format!("m={} outside [0,1]", p.m)));
    }
    if p.m == 0 && p.t == 1 {
        // empty start-up window: the member degrades to the capacity bound
        return Err(param_err(CutFamily::F2, "m=0 requires t >= 2"));
    }
    let t = p.t;
    let s = (t + p.m).min(t_count);
    let j = min3(1, inst.min_up as i64 - 1, s as i64 - 2).min(s as i64 - t as i64);
    let mut b = Builder::new(inst, p.to_string());
    b.x(t, Rat::one());
    b.y(t, -inst.startup_ramp.clone());
    let gap = &inst.c_max - &inst.startup_ramp;
    b.window(s, j, &-gap);
    Ok(b.finish())
}

/// K2 upper-bound row with an optional second chain node at
/// `min(t+2, T)`:
/// `x_t <= Vbar y_t + V sum_{i in C}(d_i - i)(y_i - sum u) + V sum j u_{t-j}`
/// where `C = S ∪ {min(t+1,T)}` and `d_i = min{a in S ∪ {t+3} : a > i}`.
fn gen_f5(inst: &UCInstance, p: &CutParams) -> Result<LinearInequality, CutError> {
    if inst.regime() != RegimeClass::K2 {
        return Err(CutError::Regime {
            family: CutFamily::F5,
            required: "K2",
            found: inst.regime(),
        });
    }
    let t_count = inst.periods;
    check_t(CutFamily::F5, p.t, 1, t_count)?;
    let t = p.t;
    let s2 = (t + 2).min(t_count);
    check_set(CutFamily::F5, &p.set, s2, s2)?;
    let l = inst.min_up as i64;
    let jcap = |i: usize| min3(l - 1, i as i64 - 2, i64::MAX);

    let mut b = Builder::new(inst, p.to_string());
    b.x(t, Rat::one());
    b.y(t, -inst.startup_ramp.clone());
    let mut chain: Vec<usize> = p.set.clone();
    let s1 = (t + 1).min(t_count);
    if !chain.contains(&s1) {
        chain.push(s1);
    }
    chain.sort_unstable();
    for &i in &chain {
        let d = chain_next(&p.set, t + 3, i);
        let c = rat_usize(d - i) * &inst.ramp;
        b.window(i, jcap(i), &-c);
    }
    let jt = jcap(t);
    if jt >= 1 {
        for j in 1..=jt as usize {
            b.u(t - j, -rat_usize(j) * &inst.ramp);
        }
    }
    Ok(b.finish())
}

/// K2 two-period ramp-up row:
/// `x_{t+1} - x_t <= Vbar y_{t+1} - Cmin y_t + V(y_s - sum_{i=0}^{j1} u_{s-i})`
/// with `s = min(t+2, T)` and `j1 = min(s-2, 1, L-1, s-t-1)`.
fn gen_f6u(inst: &UCInstance, p: &CutParams) -> Result<LinearInequality, CutError> {
    if inst.regime() != RegimeClass::K2 {
        return Err(CutError::Regime {
            family: CutFamily::F6U,
            required: "K2",
            found: inst.regime(),
        });
    }
    let t_count = inst.periods;
    check_t(CutFamily::F6U, p.t, 1, t_count - 1)?;
    let t = p.t;
    let s = (t + 2).min(t_count);
    let j1 = min3(s as i64 - 2, 1, inst.min_up as i64 - 1).min(s as i64 - t as i64 - 1);
    let mut b = Builder::new(inst, p.to_string());
    b.x(t + 1, Rat::one());
    b.x(t, -Rat::one());
    b.y(t + 1, -inst.startup_ramp.clone());
    b.y(t, inst.c_min.clone());
    b.window(s, j1, &-inst.ramp.clone());
    Ok(b.finish())
}

/// K2 two-period ramp-down row:
/// `x_t - x_{t+1} <= Vbar y_t - Cmin y_{t+1} + V(y_{t+1} - sum_{i=0}^{j2} u_{t+1-i})`
/// with `j2 = min(1, t-2, L-1)`.
fn gen_f6d(inst: &UCInstance, p: &CutParams) -> Result<LinearInequality, CutError> {
    if inst.regime() != RegimeClass::K2 {
        return Err(CutError::Regime {
            family: CutFamily::F6D,
            required: "K2",
            found: inst.regime(),
        });
    }
    let t_count = inst.periods;
    check_t(CutFamily::F6D, p.t, 1, t_count - 1)?;
    let t = p.t;
    let j2 = min3(1, t as i64 - 2, inst.min_up as i64 - 1);
    let mut b = Builder::new(inst, p.to_string());
    b.x(t, Rat::one());
    b.x(t + 1, -Rat::one());
    b.y(t, -inst.startup_ramp.clone());
    b.y(t + 1, inst.c_min.clone());
    b.window(t + 1, j2, &-inst.ramp.clone());
    Ok(b.finish())
}

/// Ramp-up hull upper-bound row. With anchor `t - m`, free set
/// `S ⊆ [t-m+1, t-1]` and backward chain `d_i = max{a in S ∪ {t-m} : a < i}`:
/// `x_t <= Vbar y_t + (L-1)V w(t) + V sum_{i in S ∪ {t}} (i - d_i) w(i)`
/// `      + (Cmax - Vbar - (m+L-1)V) w(t-m) + V sum_j j u_{t-j}`
/// where `w(i) = y_i - sum_{j=0}^{min(L-1, i-2, kappa)} u_{i-j}`. The last
/// admissible shift is `m = min(t-L-1, floor((Cmax-Vbar)/V), kappa+1-L)`;
/// the third bound is a ceiling, so one shift beyond the last full ramp
/// step is admissible and carries the fractional remainder
/// `Cmax - Vbar - (m+L-1)V` on the anchor window.
///
/// The `m = 0` member is built directly from the ramp bound as a function
/// of the observable time on: window `n` (over `u_t..u_{t-n+1}`) carries
/// the increment `min(Vbar + nV, Cmax) - min(Vbar + (n-1)V, Cmax)` and the
/// deepest window absorbs the whole remainder up to capacity. Clamping at
/// `Cmax` matters when `Vbar + nV` overshoots it before the window depth
/// runs out; without clamping the shallower members are dominated.
fn gen_f7(inst: &UCInstance, p: &CutParams) -> Result<LinearInequality, CutError> {
    let fam = CutFamily::F7;
    let t_count = inst.periods;
    check_t(fam, p.t, 1, t_count)?;
    let t = p.t;
    let d = inst.derived();
    let l = inst.min_up as i64;
    let m_hi = min3(
        (t as i64 - l - 1).max(0),
        steps_above_startup(inst) as i64,
        (d.kappa as i64 + 1 - l).max(0),
    ) as usize;
    if p.m > m_hi {
        return Err(param_err(fam, format!("m={} outside [0,{m_hi}]", p.m)));
    }
    let m = p.m;
    check_set(fam, &p.set, t - m + 1, t.saturating_sub(1))?;
    let jcap = |i: usize| min3(l - 1, i as i64 - 2, d.kappa as i64);

    let mut b = Builder::new(inst, p.to_string());
    b.x(t, Rat::one());
    b.y(t, -inst.startup_ramp.clone());
    if m == 0 {
        let n_max = min3(l, t as i64 - 1, d.kappa as i64 + 1).max(0) as usize;
        let level = |n: usize| -> Rat {
            let v = &inst.startup_ramp + rat_usize(n) * &inst.ramp;
            if v < inst.c_max {
                v
            } else {
                inst.c_max.clone()
            }
        };
        for n in 1..=n_max {
            let c = if n == n_max {
                &inst.c_max - level(n - 1)
            } else {
                level(n) - level(n - 1)
            };
            if !c.is_zero() {
                b.window(t, n as i64 - 1, &-c);
            }
        }
        if n_max == 0 {
            // t = 1 carries no start-up evidence; the member degrades to
            // the capacity bound
            b.y(t, -(&inst.c_max - &inst.startup_ramp));
        }
        return Ok(b.finish());
    }
    let lead = rat_usize(inst.min_up - 1) * &inst.ramp;
    b.window(t, jcap(t), &-lead);
    let mut nodes = p.set.clone();
    if !nodes.contains(&t) {
        nodes.push(t);
    }
    nodes.sort_unstable();
    for &i in &nodes {
        let di = chain_prev(&p.set, t - m, i);
        let c = rat_usize(i - di) * &inst.ramp;
        b.window(i, jcap(i), &-c);
    }
    let closing = &inst.c_max - &inst.startup_ramp - rat_usize(m + inst.min_up - 1) * &inst.ramp;
    b.window(t - m, jcap(t - m), &-closing);
    let jt = jcap(t);
    if jt >= 1 {
        for j in 1..=jt as usize {
            b.u(t - j, -rat_usize(j) * &inst.ramp);
        }
    }
    Ok(b.finish())
}

/// Ramp-down hull upper-bound row. With anchor `t + m + 1`, free set
/// `S ⊆ [t+L+1, t+m]` and forward chain `d_i = min{a in S ∪ {t+m+1} : a > i}`
/// (with `d_{t+L} = t+L` when `m <= L-1`):
/// `x_t <= Vbar y_t + V sum_{i=1}^{min(m,L-1)} (y_{t+i} - sum_{j=1}^{i} u_{t+j})`
/// `      + V sum_{i in S ∪ {t+L}} (d_i - i) w(i) + (Cmax - Vbar - mV) w(t+m+1)`
/// where `w(i) = y_i - sum_{j=0}^{min(m, L-1)} u_{i-j}`. At `t = T` the
/// closing term uses `y_{T+1} = y_T`, `u_{T+1} = 0`.
fn gen_f8(inst: &UCInstance, p: &CutParams) -> Result<LinearInequality, CutError> {
    let fam = CutFamily::F8;
    let t_count = inst.periods;
    check_t(fam, p.t, 1, t_count)?;
    let t = p.t;
    let l = inst.min_up;
    let fl = steps_above_startup(inst);
    let tcap = (t_count as i64 - t as i64 - 1).max(0) as usize;
    let m_lo = tcap.min(l - 1).min(fl);
    let m_hi = tcap.min(fl);
    if p.m < m_lo || p.m > m_hi {
        return Err(param_err(fam, format!("m={} outside [{m_lo},{m_hi}]", p.m)));
    }
    let m = p.m;
    check_set(fam, &p.set, t + l + 1, t + m)?;
    let mcap = m.min(l - 1);

    let mut b = Builder::new(inst, p.to_string());
    b.x(t, Rat::one());
    b.y(t, -inst.startup_ramp.clone());
    for i in 1..=mcap {
        b.y(t + i, -inst.ramp.clone());
        for j in 1..=i {
            b.u(t + j, inst.ramp.clone());
        }
    }
    let mut nodes = p.set.clone();
    if m >= l {
        // below that shift the t+L node has zero coefficient and may sit
        // past the horizon, so it is dropped entirely
        nodes.push(t + l);
        nodes.sort_unstable();
    }
    for &i in &nodes {
        let di = chain_next(&p.set, t + m + 1, i);
        let c = rat_usize(di - i) * &inst.ramp;
        b.window(i, mcap as i64, &-c);
    }
    let closing = &inst.c_max - &inst.startup_ramp - rat_usize(m) * &inst.ramp;
    b.window(t + m + 1, mcap as i64, &-closing);
    Ok(b.finish())
}

/// Ramp-up hull difference row over a shift of `m` periods. With
/// `S = S0 ∪ {t}`, `q = min S`, `delta = min(L-1, m-1)`, anchor `t-m+L`,
/// and backward chain `d_i = max{a in S ∪ {t-m+L} : a < i}` (`d_t = t` when
/// `m <= L`):
/// `x_t - x_{t-m} <= Vbar y_t - Cmin y_{t-m} + V sum_{i in S \ {t-m+L}} (i - d_i) w(i)`
/// `      + delta V w(t) + (Cmin + V - Vbar) w(q) + V sum_j j u_{t-j}`
/// where `w(i) = y_i - sum_{j=0}^{delta} u_{i-j}` and `S0 ⊆ [t-m+L, t-1]`.
fn gen_f9(inst: &UCInstance, p: &CutParams) -> Result<LinearInequality, CutError> {
    let fam = CutFamily::F9;
    let t_count = inst.periods;
    check_t(fam, p.t, 2, t_count)?;
    let t = p.t;
    let kappa = inst.derived().kappa;
    let l = inst.min_up;
    let m_hi = (t - 1).min(kappa);
    if p.m < 1 || p.m > m_hi {
        return Err(param_err(fam, format!("m={} outside [1,{m_hi}]", p.m)));
    }
    let m = p.m;
    let anchor = t - m + l;
    check_set(fam, &p.set, anchor, t.saturating_sub(1))?;
    let delta = (l - 1).min(m - 1);

    let mut b = Builder::new(inst, p.to_string());
    b.x(t, Rat::one());
    b.x(t - m, -Rat::one());
    b.y(t, -inst.startup_ramp.clone());
    b.y(t - m, inst.c_min.clone());
    let mut s_all = p.set.clone();
    if !s_all.contains(&t) {
        s_all.push(t);
        s_all.sort_unstable();
    }
    for &i in &s_all {
        if i == anchor {
            continue;
        }
        let di = if m <= l && i == t {
            t
        } else {
            chain_prev(&p.set, anchor, i)
        };
        let c = rat_usize(i - di) * &inst.ramp;
        b.window(i, delta as i64, &-c);
    }
    let c = rat_usize(delta) * &inst.ramp;
    b.window(t, delta as i64, &-c);
    let q = *s_all.first().expect("S contains t");
    let step_gap = &inst.c_min + &inst.ramp - &inst.startup_ramp;
    b.window(q, delta as i64, &-step_gap);
    for j in 1..=delta {
        b.u(t - j, -rat_usize(j) * &inst.ramp);
    }
    Ok(b.finish())
}

/// Ramp-down hull difference row over a shift of `m` periods, parameterized
/// by a node set `P`. With `delta = min(L-1, m-1)` and
/// `w(i) = y_i - sum_{j=0}^{delta} u_{i-j}`:
/// `x_t - x_{t+m} <= Vbar y_t - Cmin y_{t+m}`
/// `      + V sum_{i=1}^{delta} (y_{t+i} - sum_{j=1}^{i} u_{t+j})`
/// `      + V sum_{i in P, i < t+m} (d_i - i) w(i) + (Cmin + V - Vbar) w(max P)`
/// with forward chain `d_i = min{a in P ∪ {t+m} : a > i}`. Admissible node
/// sets: `{t+m}` alone when `m <= L`; otherwise `t+L`, any subset of
/// `[t+L+1, t+m-1]`, and optionally `t+m`. Every referenced index stays
/// inside `[t+1, t+m]`, so no horizon convention is needed.
fn gen_f10(inst: &UCInstance, p: &CutParams) -> Result<LinearInequality, CutError> {
    let fam = CutFamily::F10;
    let t_count = inst.periods;
    check_t(fam, p.t, 1, t_count - 1)?;
    let t = p.t;
    let kappa = inst.derived().kappa;
    let l = inst.min_up;
    let m_hi = (t_count - t).min(kappa);
    if p.m < 1 || p.m > m_hi {
        return Err(param_err(fam, format!("m={} outside [1,{m_hi}]", p.m)));
    }
    let m = p.m;
    if m <= l {
        if p.set.as_slice() != [t + m] {
            return Err(param_err(fam, format!("node set must be {{{}}}", t + m)));
        }
    } else {
        if p.set.first() != Some(&(t + l)) {
            return Err(param_err(fam, format!("node set must start at {}", t + l)));
        }
        if p.set.iter().any(|&i| i > t + m) {
            return Err(param_err(fam, format!("node set must stay within [{},{}]", t + l, t + m)));
        }
    }
    let delta = (l - 1).min(m - 1);

    let mut b = Builder::new(inst, p.to_string());
    b.x(t, Rat::one());
    b.x(t + m, -Rat::one());
    b.y(t, -inst.startup_ramp.clone());
    b.y(t + m, inst.c_min.clone());
    for i in 1..=delta {
        b.y(t + i, -inst.ramp.clone());
        for j in 1..=i {
            b.u(t + j, inst.ramp.clone());
        }
    }
    for &i in &p.set {
        if i == t + m {
            continue;
        }
        let di = chain_next(&p.set, t + m, i);
        let c = rat_usize(di - i) * &inst.ramp;
        b.window(i, delta as i64, &-c);
    }
    let step_gap = &inst.c_min + &inst.ramp - &inst.startup_ramp;
    b.window(*p.set.last().expect("node set is never empty"), delta as i64, &-step_gap);
    Ok(b.finish())
}

/// K2 two-period ramp-down row with start-up evidence, valid only on the
/// full polytope (its proof spends the ramp-up rows). For `L = 1`:
/// `x_t - x_{t+1} <= Vbar y_t - Cmin y_{t+1} + V(y_t - u_t)`, `t in [2, T-1]`.
/// For `L >= 2` the evidence window sits one period later and reaches back
/// to the start of the horizon, leaving `t = 2` as the only member:
/// `x_2 - x_3 <= Vbar y_2 - Cmin y_3 + V(y_3 - u_3 - u_2)`.
fn gen_f11(inst: &UCInstance, p: &CutParams) -> Result<LinearInequality, CutError> {
    let fam = CutFamily::F11;
    if inst.regime() != RegimeClass::K2 {
        return Err(CutError::Regime {
            family: fam,
            required: "K2",
            found: inst.regime(),
        });
    }
    let t_count = inst.periods;
    check_t(fam, p.t, 2, t_count - 1)?;
    if inst.min_up >= 2 && p.t != 2 {
        return Err(param_err(fam, "t=2 is the only member when L >= 2"));
    }
    let t = p.t;
    let mut b = Builder::new(inst, p.to_string());
    b.x(t, Rat::one());
    b.x(t + 1, -Rat::one());
    b.y(t, -inst.startup_ramp.clone());
    b.y(t + 1, inst.c_min.clone());
    if inst.min_up == 1 {
        b.window(t, 0, &-inst.ramp.clone());
    } else {
        b.window(t + 1, 1, &-inst.ramp.clone());
    }
    Ok(b.finish())
}

/// K2 upper-bound row spending one ramp step on each of two evidence
/// windows around `t`, with `W(i) = y_i - sum_{j=0}^{min(L-1, i-2)} u_{i-j}`:
/// `x_t <= Vbar y_t + V W(a) + V W(b)`.
/// Admissible pairs `{a, b}`: for `L = 1`, `{t-1, t+1}` with `t in [3, T-1]`
/// and `{t, t+2}` with `t in [2, T-2]`; for `L = 2`, `{t, t+1}` with
/// `t in [3, T-1]`. No members exist when `L >= 3`.
fn gen_f12(inst: &UCInstance, p: &CutParams) -> Result<LinearInequality, CutError> {
    let fam = CutFamily::F12;
    if inst.regime() != RegimeClass::K2 {
        return Err(CutError::Regime {
            family: fam,
            required: "K2",
            found: inst.regime(),
        });
    }
    let t_count = inst.periods;
    let t = p.t;
    let l = inst.min_up;
    let (a, b) = match p.set.as_slice() {
        [a, b] => (*a, *b),
        _ => return Err(param_err(fam, "index set must be a pair")),
    };
    let ok = match l {
        1 => {
            (a + 1 == t && b == t + 1 && t >= 3 && t < t_count)
                || (a == t && b == t + 2 && t >= 2 && t + 2 <= t_count)
        }
        2 => a == t && b == t + 1 && t >= 3 && t < t_count,
        _ => false,
    };
    if !ok {
        return Err(param_err(
            fam,
            format!("pair {{{a},{b}}} not admissible at t={t}"),
        ));
    }
    let mut bld = Builder::new(inst, p.to_string());
    bld.x(t, Rat::one());
    bld.y(t, -inst.startup_ramp.clone());
    for &i in &[a, b] {
        let j = (l as i64 - 1).min(i as i64 - 2);
        bld.window(i, j, &-inst.ramp.clone());
    }
    Ok(bld.finish())
}

/// K2 upper-bound row: the corresponding F5 member with the outermost
/// trailing start-up term (`(L-1)V u_{t-L+1}`) removed. A start-up that far
/// back already grants the full ramp budget at `t`, so the compensation is
/// redundant and dropping it tightens the row. Needs `L >= 2` and
/// `t in [L+1, T-1]`; the free set is `S ⊆ {min(t+2, T)}` as for F5.
fn gen_f13(inst: &UCInstance, p: &CutParams) -> Result<LinearInequality, CutError> {
    let fam = CutFamily::F13;
    if inst.regime() != RegimeClass::K2 {
        return Err(CutError::Regime {
            family: fam,
            required: "K2",
            found: inst.regime(),
        });
    }
    let l = inst.min_up;
    if l < 2 {
        return Err(param_err(fam, "L >= 2 required"));
    }
    let t_count = inst.periods;
    check_t(fam, p.t, l + 1, t_count - 1)?;
    let t = p.t;
    let s2 = (t + 2).min(t_count);
    check_set(fam, &p.set, s2, s2)?;
    let jcap = |i: usize| (l as i64 - 1).min(i as i64 - 2);
    let mut b = Builder::new(inst, p.to_string());
    b.x(t, Rat::one());
    b.y(t, -inst.startup_ramp.clone());
    let mut chain: Vec<usize> = p.set.clone();
    let s1 = t + 1;
    if !chain.contains(&s1) {
        chain.push(s1);
    }
    chain.sort_unstable();
    for &i in &chain {
        let d = chain_next(&p.set, t + 3, i);
        let c = rat_usize(d - i) * &inst.ramp;
        b.window(i, jcap(i), &-c);
    }
    // t >= L+1 makes the trailing window run its full depth L-1; emit all
    // but the last term.
    for j in 1..l - 1 {
        b.u(t - j, -rat_usize(j) * &inst.ramp);
    }
    Ok(b.finish())
}

/// Builds the row for one parameter choice.
pub fn generate(inst: &UCInstance, p: &CutParams) -> Result<LinearInequality, CutError> {
    // Every family's start-up windows lean on the minimum-up/-down rows,
    // which exist only when L <= T-1 and ell <= T-1. At L = T (or ell = T)
    // those rows vanish, spurious start-ups become feasible and the windows
    // cut them off, so no family is admissible there.
    if inst.min_up >= inst.periods || inst.min_down >= inst.periods {
        return Err(param_err(
            p.family,
            "requires L <= T-1 and ell <= T-1",
        ));
    }
    match p.family {
        CutFamily::F2 => gen_f2(inst, p),
        CutFamily::F5 => gen_f5(inst, p),
        CutFamily::F6U => gen_f6u(inst, p),
        CutFamily::F6D => gen_f6d(inst, p),
        CutFamily::F7 => gen_f7(inst, p),
        CutFamily::F8 => gen_f8(inst, p),
        CutFamily::F9 => gen_f9(inst, p),
        CutFamily::F10 => gen_f10(inst, p),
        CutFamily::F11 => gen_f11(inst, p),
        CutFamily::F12 => gen_f12(inst, p),
        CutFamily::F13 => gen_f13(inst, p),
    }
}

/// One deduplicated row together with every parameter choice that produced
/// it. The row tag joins the individual tags with `;`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyMember {
    pub params: Vec<CutParams>,
    pub row: LinearInequality,
}

/// Full enumeration of one family on one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyEnumeration {
    pub family: CutFamily,
    pub members: Vec<FamilyMember>,
    /// Parameter choices skipped for horizon reasons.
    pub skipped: Vec<CutParams>,
}

fn subsets(lo: usize, hi: usize) -> Vec<Vec<usize>> {
    let n = if hi >= lo { hi - lo + 1 } else { 0 };
    debug_assert!(n < 63);
    (0u64..1 << n)
        .map(|mask| {
            (0..n)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| lo + b)
                .collect()
        })
        .collect()
}

fn family_param_grid(inst: &UCInstance, family: CutFamily) -> Vec<CutParams> {
    let t_count = inst.periods;
    let l = inst.min_up;
    let d = inst.derived();
    let fl = steps_above_startup(inst);
    let mut out = Vec::new();
    match family {
        CutFamily::F2 => {
            for t in 1..=t_count {
                for m in 0..=1 {
                    // interior m = 0 members are facets only at L = 1; at
                    // L >= 2 the s = t+1 window subsumes them. The t = T
                    // member survives because the window cannot shift.
                    if m == 0 && (t == 1 || (l >= 2 && t != t_count)) {
                        continue;
                    }
                    out.push(CutParams::new(family, t, m, Vec::new()));
                }
            }
        }
        CutFamily::F5 => {
            for t in 1..=t_count {
                let s2 = (t + 2).min(t_count);
                for set in subsets(s2, s2) {
                    out.push(CutParams::new(family, t, 0, set));
                }
            }
        }
        CutFamily::F6U | CutFamily::F6D => {
            for t in 1..t_count {
                out.push(CutParams::of_t(family, t));
            }
        }
        CutFamily::F7 => {
            for t in 1..=t_count {
                let m_hi = min3(
                    (t as i64 - l as i64 - 1).max(0),
                    fl as i64,
                    (d.kappa as i64 + 1 - l as i64).max(0),
                ) as usize;
                for m in 0..=m_hi {
                    for set in subsets(t - m + 1, t.saturating_sub(1)) {
                        out.push(CutParams::new(family, t, m, set));
                    }
                }
            }
        }
        CutFamily::F8 => {
            for t in 1..=t_count {
                let tcap = (t_count as i64 - t as i64 - 1).max(0) as usize;
                let m_lo = tcap.min(l - 1).min(fl);
                let m_hi = tcap.min(fl);
                for m in m_lo..=m_hi {
                    for set in subsets(t + l + 1, t + m) {
                        out.push(CutParams::new(family, t, m, set));
                    }
                }
            }
        }
        CutFamily::F9 => {
            for t in 2..=t_count {
                for m in 1..=(t - 1).min(d.kappa) {
                    for set in subsets(t - m + l, t - 1) {
                        out.push(CutParams::new(family, t, m, set));
                    }
                }
            }
        }
        CutFamily::F10 => {
            for t in 1..t_count {
                for m in 1..=(t_count - t).min(d.kappa) {
                    if m <= l {
                        out.push(CutParams::new(family, t, m, alloc::vec![t + m]));
                        continue;
                    }
                    for s0 in subsets(t + l + 1, t + m - 1) {
                        for with_far in [false, true] {
                            let mut set = alloc::vec![t + l];
                            set.extend(s0.iter().copied());
                            if with_far {
                                set.push(t + m);
                            }
                            out.push(CutParams::new(family, t, m, set));
                        }
                    }
                }
            }
        }
        CutFamily::F11 => {
            if l == 1 {
                for t in 2..t_count {
                    out.push(CutParams::of_t(family, t));
                }
            } else if t_count >= 3 {
                out.push(CutParams::of_t(family, 2));
            }
        }
        CutFamily::F12 => match l {
            1 => {
                for t in 3..t_count {
                    out.push(CutParams::new(family, t, 0, alloc::vec![t - 1, t + 1]));
                }
                for t in 2..=t_count.saturating_sub(2) {
                    out.push(CutParams::new(family, t, 0, alloc::vec![t, t + 2]));
                }
            }
            2 => {
                for t in 3..t_count {
                    out.push(CutParams::new(family, t, 0, alloc::vec![t, t + 1]));
                }
            }
            _ => {}
        },
        CutFamily::F13 => {
            if l >= 2 {
                for t in l + 1..t_count {
                    let s2 = (t + 2).min(t_count);
                    for set in subsets(s2, s2) {
                        out.push(CutParams::new(family, t, 0, set));
                    }
                }
            }
        }
    }
    out
}

/// Enumerates every admissible parameter choice of `family` in a fixed
/// deterministic order (t, then m, then set), deduplicating coinciding rows
/// by their canonical form. Regime-restricted families fail fast on the
/// wrong regime.
pub fn enumerate_family(
    inst: &UCInstance,
    family: CutFamily,
) -> Result<FamilyEnumeration, CutError> {
    let mut members: Vec<FamilyMember> = Vec::new();
    let mut seen: BTreeMap<(Vec<(usize, Rat)>, Rat, bool), usize> = BTreeMap::new();
    let mut skipped = Vec::new();
    for params in family_param_grid(inst, family) {
        let row = match generate(inst, &params) {
            Ok(row) => row,
            Err(CutError::Horizon { params }) => {
                skipped.push(params);
                continue;
            }
            Err(e) => return Err(e),
        };
        let key = row.normalized_key();
        match seen.get(&key) {
            Some(&idx) => {
                let member = &mut members[idx];
                member.row.tag.push(';');
                member.row.tag.push_str(&params.to_string());
                member.params.push(params);
            }
            None => {
                seen.insert(key, members.len());
                members.push(FamilyMember {
                    params: alloc::vec![params],
                    row,
                });
            }
        }
    }
    Ok(FamilyEnumeration {
        family,
        members,
        skipped,
    })
}

/// The four hull assemblies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HullId {
    /// K1 regime, full polytope: F2.
    K1,
    /// K2 regime, full polytope: F5, F6U, F6D, the one-sided families
    /// F7-F10 (valid for the full polytope as well), and the mixed families
    /// F11-F13. Verified complete for L <= 3; at L >= 4 additional facets
    /// with alternating generation terms (x_t - x_{t+1} + x_{t+2} ...)
    /// appear that no implemented family covers.
    K2,
    /// Ramp-up polytope, any regime: F7, F9.
    Up,
    /// Ramp-down polytope, any regime: F8, F10.
    Down,
}

impl fmt::Display for HullId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HullId::K1 => "Q_K1",
            HullId::K2 => "Q_K2",
            HullId::Up => "Q_UP",
            HullId::Down => "Q_DOWN",
        })
    }
}

/// The polytope a family's validity and facet claims are stated for. The
/// one-sided families are valid on the full polytope too (it is contained
/// in both one-sided ones), but their facet status is a claim about their
/// home.
pub fn family_home_variant(family: CutFamily) -> VariantId {
    match family {
        CutFamily::F7 | CutFamily::F9 => VariantId::Up,
        CutFamily::F8 | CutFamily::F10 => VariantId::Down,
        _ => VariantId::Full,
    }
}

pub fn hull_families(which: HullId) -> &'static [CutFamily] {
    match which {
        HullId::K1 => &[CutFamily::F2],
        HullId::K2 => &[
            CutFamily::F5,
            CutFamily::F6U,
            CutFamily::F6D,
            CutFamily::F7,
            CutFamily::F8,
            CutFamily::F9,
            CutFamily::F10,
            CutFamily::F11,
            CutFamily::F12,
            CutFamily::F13,
        ],
        HullId::Up => &[CutFamily::F7, CutFamily::F9],
        HullId::Down => &[CutFamily::F8, CutFamily::F10],
    }
}

/// Builds the linear system whose feasible region is the claimed convex
/// hull: commitment rows (1a)-(1c), the generation lower bound, every
/// member of the assembly's families, and the variable bounds. No
/// integrality metadata is set.
pub fn assemble_hull(inst: &UCInstance, which: HullId) -> Result<InequalitySystem, CutError> {
    let space = inst.space();
    let mut sys = InequalitySystem::new(space, which.to_string());
    push_min_up(&mut sys, inst);
    push_min_down(&mut sys, inst);
    push_logical(&mut sys, inst);
    for t in 1..=inst.periods {
        let mut lo = LinearInequality::new(format!("1d_t{t}"), Sense::Le, Rat::from_integer(0.into()));
        lo.add_var(&space, Var::X(t), -Rat::one());
        lo.add_var(&space, Var::Y(t), inst.c_min.clone());
        sys.push(lo);
    }
    for &family in hull_families(which) {
        let enumeration = enumerate_family(inst, family)?;
        for member in enumeration.members {
            sys.push(member.row);
        }
    }
    for t in 1..=inst.periods {
        let mut lo = LinearInequality::new(format!("xlb_t{t}"), Sense::Ge, Rat::from_integer(0.into()));
        lo.add_var(&space, Var::X(t), Rat::one());
        sys.push(lo);
    }
    push_commitment_bounds(&mut sys, inst);
    Ok(sys)
}
