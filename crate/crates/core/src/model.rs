//! Instance representation, parameter validation, variable indexing, and
//! exact rational linear-form algebra.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use num_traits::{Signed, Zero};

use crate::rational::{ceil_int, floor_int, fmt_rat, rat_usize, Rat};

/// Validation failure for an instance, or a dimension mismatch during
/// evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    /// A stated parameter assumption does not hold. Carries the assumption
    /// name and the two offending values.
    Assumption {
        assumption: &'static str,
        left: String,
        right: String,
    },
    DimensionMismatch { expected: usize, got: usize },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::Assumption {
                assumption,
                left,
                right,
            } => write!(
                f,
                "{assumption} violated (values {left} and {right})"
            ),
            ModelError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
        }
    }
}

/// The seven generator parameters of one unit-commitment instance.
///
/// Times are discrete period counts; generation bounds and ramp rates are
/// exact rationals (MW).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UCInstance {
    /// Number of time periods `T`.
    pub periods: usize,
    /// Minimum-up time `L`.
    pub min_up: usize,
    /// Minimum-down time `ℓ`.
    pub min_down: usize,
    /// Generation lower bound when online.
    pub c_min: Rat,
    /// Generation upper bound when online.
    pub c_max: Rat,
    /// Start-up/shut-down ramp rate.
    pub startup_ramp: Rat,
    /// Ramp rate in the stable generation region (per period).
    pub ramp: Rat,
}

/// Parameter regime the instance falls into, as a pure function of the
/// instance data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeClass {
    /// `V = Cmax - Cmin`.
    K1,
    /// `Cmax = Cmin + 2V` and `Vbar = Cmin`.
    K2,
    /// `V < Cmax - Cmin` and not K2.
    SubHull,
    General,
}

impl fmt::Display for RegimeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RegimeClass::K1 => "K1",
            RegimeClass::K2 => "K2",
            RegimeClass::SubHull => "SUBHULL",
            RegimeClass::General => "GENERAL",
        };
        f.write_str(s)
    }
}

impl UCInstance {
    /// Builds a validated instance. Every stated parameter assumption is
    /// checked; the error names the violated assumption and the two
    /// offending values.
    ///
    /// `Vbar = Cmin` is accepted only in the K2 setting `Cmax = Cmin + 2V`,
    /// where that equality is part of the regime definition; everywhere else
    /// the strict assumption `Cmin < Vbar` applies.
    pub fn new(
        periods: usize,
        min_up: usize,
        min_down: usize,
        c_min: Rat,
        c_max: Rat,
        startup_ramp: Rat,
        ramp: Rat,
    ) -> Result<Self, ModelError> {
        let err = |assumption, l: &Rat, r: &Rat| ModelError::Assumption {
            assumption,
            left: fmt_rat(l),
            right: fmt_rat(r),
        };
        let count_err = |assumption, l: usize, r: usize| ModelError::Assumption {
            assumption,
            left: format!("{l}"),
            right: format!("{r}"),
        };
        if periods < 2 {
            return Err(count_err("T >= 2", periods, 2));
        }
        if min_up < 1 {
            return Err(count_err("L >= 1", min_up, 1));
        }
        if min_down < 1 {
            return Err(count_err("ell >= 1", min_down, 1));
        }
        if min_up > periods {
            return Err(count_err("L <= T", min_up, periods));
        }
        if min_down > periods {
            return Err(count_err("ell <= T", min_down, periods));
        }
        if c_min.is_negative() {
            return Err(err("Cmin >= 0", &c_min, &Rat::zero()));
        }
        if !ramp.is_positive() {
            return Err(err("V > 0", &ramp, &Rat::zero()));
        }
        let k2_boundary = c_max == &c_min + &ramp + &ramp && startup_ramp == c_min;
        if startup_ramp <= c_min && !k2_boundary {
            return Err(err("Cmin < Vbar", &c_min, &startup_ramp));
        }
        let cv = &c_min + &ramp;
        if startup_ramp >= cv {
            return Err(err("Vbar < Cmin + V", &startup_ramp, &cv));
        }
        let slack = &c_max - &c_min - &ramp;
        if slack.is_negative() {
            return Err(err("Cmax - Cmin - V >= 0", &c_max, &cv));
        }
        Ok(UCInstance {
            periods,
            min_up,
            min_down,
            c_min,
            c_max,
            startup_ramp,
            ramp,
        })
    }

    pub fn space(&self) -> VariableSpace {
        VariableSpace::full(self.periods)
    }

    pub fn regime(&self) -> RegimeClass {
        let gap = &self.c_max - &self.c_min;
        if self.ramp == gap {
            RegimeClass::K1
        } else if gap == &self.ramp + &self.ramp && self.startup_ramp == self.c_min {
            RegimeClass::K2
        } else if self.ramp < gap {
            RegimeClass::SubHull
        } else {
            RegimeClass::General
        }
    }

    pub fn derived(&self) -> DerivedConstants {
        DerivedConstants::of(self)
    }
}

/// Constants derived from an instance: `kappa`, `gamma`, `alpha1`, `alpha2`,
/// and the grid of reachable extreme generation levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedConstants {
    /// `ceil((Cmax - Cmin)/V) - 1`.
    pub kappa: usize,
    /// `floor((Cmax - Cmin)/V)`.
    pub gamma: usize,
    /// `max{n in [1,T]: Cmin + nV <= Cmax}`.
    pub alpha1: usize,
    /// `max{n in [1,T]: Vbar + nV <= Cmax}`, or 0 if no such `n`.
    pub alpha2: usize,
    /// `{0} ∪ {Cmin + nV} ∪ {Vbar + nV} ∪ {Cmax - nV}` over the ranges above
    /// (sequences taken from n = 0).
    pub grid: BTreeSet<Rat>,
}

impl DerivedConstants {
    pub fn of(inst: &UCInstance) -> Self {
        let gap = &inst.c_max - &inst.c_min;
        let q = &gap / &inst.ramp;
        let kappa = (ceil_int(&q) - 1i32)
            .try_into()
            .expect("kappa is nonnegative for valid instances");
        let gamma = floor_int(&q)
            .try_into()
            .expect("gamma is nonnegative for valid instances");
        let bounded_max = |base: &Rat| -> usize {
            // max n in [1,T] with base + nV <= Cmax, else 0
            let mut best = 0usize;
            for n in 1..=inst.periods {
                if base + rat_usize(n) * &inst.ramp <= inst.c_max {
                    best = n;
                } else {
                    break;
                }
            }
            best
        };
        let alpha1 = bounded_max(&inst.c_min);
        let alpha2 = bounded_max(&inst.startup_ramp);
        let mut grid = BTreeSet::new();
        grid.insert(Rat::zero());
        for n in 0..=alpha1 {
            grid.insert(&inst.c_min + rat_usize(n) * &inst.ramp);
            grid.insert(&inst.c_max - rat_usize(n) * &inst.ramp);
        }
        for n in 0..=alpha2 {
            grid.insert(&inst.startup_ramp + rat_usize(n) * &inst.ramp);
        }
        DerivedConstants {
            kappa,
            gamma,
            alpha1,
            alpha2,
            grid,
        }
    }
}

/// Which block of variables a system is formulated over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarLayout {
    /// `x_1..x_T, y_1..y_T, u_2..u_T` — dimension `3T - 1`.
    Full,
    /// `y_1..y_T, u_2..u_T` — dimension `2T - 1`.
    Commitment,
    /// `x_1..x_T` — dimension `T`.
    Generation,
}

/// Bijection between variable ids `0..dim-1` and the symbols
/// `x_t`, `y_t`, `u_t` (with `u` starting at period 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariableSpace {
    pub periods: usize,
    pub layout: VarLayout,
}

/// A symbolic variable, 1-based in the period index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Var {
    X(usize),
    Y(usize),
    U(usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(t) => write!(f, "x{t}"),
            Var::Y(t) => write!(f, "y{t}"),
            Var::U(t) => write!(f, "u{t}"),
        }
    }
}

impl VariableSpace {
    pub fn full(periods: usize) -> Self {
        VariableSpace {
            periods,
            layout: VarLayout::Full,
        }
    }

    pub fn commitment(periods: usize) -> Self {
        VariableSpace {
            periods,
            layout: VarLayout::Commitment,
        }
    }

    pub fn generation(periods: usize) -> Self {
        VariableSpace {
            periods,
            layout: VarLayout::Generation,
        }
    }

    pub fn dim(&self) -> usize {
        match self.layout {
            VarLayout::Full => 3 * self.periods - 1,
            VarLayout::Commitment => 2 * self.periods - 1,
            VarLayout::Generation => self.periods,
        }
    }

    /// Id of a variable in this layout. Panics on a variable that does not
    /// exist here (x in a commitment space, u_1, out-of-horizon period).
    pub fn id(&self, v: Var) -> usize {
        let t_count = self.periods;
        let check = |t: usize, lo: usize| {
            assert!(t >= lo && t <= t_count, "period {t} out of range for {v:?}");
        };
        match (self.layout, v) {
            (VarLayout::Full, Var::X(t)) => {
                check(t, 1);
                t - 1
            }
            (VarLayout::Full, Var::Y(t)) => {
                check(t, 1);
                t_count + t - 1
            }
            (VarLayout::Full, Var::U(t)) => {
                check(t, 2);
                2 * t_count + t - 2
            }
            (VarLayout::Commitment, Var::Y(t)) => {
                check(t, 1);
                t - 1
            }
            (VarLayout::Commitment, Var::U(t)) => {
                check(t, 2);
                t_count + t - 2
            }
            (VarLayout::Generation, Var::X(t)) => {
                check(t, 1);
                t - 1
            }
            (_, v) => panic!("variable {v:?} not present in this layout"),
        }
    }

    pub fn var(&self, id: usize) -> Var {
        let t = self.periods;
        assert!(id < self.dim(), "variable id {id} out of range");
        match self.layout {
            VarLayout::Full => {
                if id < t {
                    Var::X(id + 1)
                } else if id < 2 * t {
                    Var::Y(id - t + 1)
                } else {
                    Var::U(id - 2 * t + 2)
                }
            }
            VarLayout::Commitment => {
                if id < t {
                    Var::Y(id + 1)
                } else {
                    Var::U(id - t + 2)
                }
            }
            VarLayout::Generation => Var::X(id + 1),
        }
    }

    pub fn name(&self, id: usize) -> String {
        format!("{}", self.var(id))
    }
}

/// Inequality sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

/// One sparse exact-rational row `a · z (sense) b`, with a provenance tag
/// identifying the generating rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearInequality {
    coeffs: BTreeMap<usize, Rat>,
    pub sense: Sense,
    pub rhs: Rat,
    pub tag: String,
}

/// Result of evaluating an inequality at a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub lhs: Rat,
    pub satisfied: bool,
    pub tight: bool,
}

impl LinearInequality {
    pub fn new(tag: impl Into<String>, sense: Sense, rhs: Rat) -> Self {
        LinearInequality {
            coeffs: BTreeMap::new(),
            sense,
            rhs,
            tag: tag.into(),
        }
    }

    /// Accumulates `c` onto the coefficient of variable id `id`; zero
    /// entries are dropped so the sparse map never stores zeros.
    pub fn add(&mut self, id: usize, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(id).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&id);
        }
    }

    pub fn add_var(&mut self, space: &VariableSpace, v: Var, c: Rat) {
        self.add(space.id(v), c);
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (usize, &Rat)> {
        self.coeffs.iter().map(|(k, v)| (*k, v))
    }

    pub fn coeff(&self, id: usize) -> Rat {
        self.coeffs.get(&id).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.len()
    }

    pub fn max_var_id(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn lhs_at(&self, p: &Point) -> Result<Rat, ModelError> {
        if let Some(max) = self.max_var_id() {
            if max >= p.values.len() {
                return Err(ModelError::DimensionMismatch {
                    expected: max + 1,
                    got: p.values.len(),
                });
            }
        }
        let mut acc = Rat::zero();
        for (id, c) in &self.coeffs {
            acc += c * &p.values[*id];
        }
        Ok(acc)
    }

    /// Exact evaluation: `satisfied` per the sense, `tight` iff lhs = rhs.
    pub fn eval(&self, p: &Point) -> Result<Evaluation, ModelError> {
        let lhs = self.lhs_at(p)?;
        let tight = lhs == self.rhs;
        let satisfied = match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Ge => lhs >= self.rhs,
            Sense::Eq => tight,
        };
        Ok(Evaluation {
            lhs,
            satisfied,
            tight,
        })
    }

    /// Signed violation: positive iff the point violates the row.
    pub fn violation(&self, p: &Point) -> Result<Rat, ModelError> {
        let lhs = self.lhs_at(p)?;
        Ok(match self.sense {
            Sense::Le => lhs - &self.rhs,
            Sense::Ge => &self.rhs - lhs,
            Sense::Eq => (lhs - &self.rhs).abs(),
        })
    }

    /// Canonical form for duplicate detection: senses mapped to `<=`,
    /// coefficients scaled to a primitive integer vector with a fixed sign
    /// convention (leading nonzero coefficient positive is NOT imposed —
    /// inequalities only admit positive scaling).
    pub fn normalized_key(&self) -> (Vec<(usize, Rat)>, Rat, bool) {
        use num_bigint::BigInt;
        use num_integer::Integer;
        // Orient Ge rows as negated Le rows; Eq rows keep a marker.
        let (mult, is_eq) = match self.sense {
            Sense::Le => (1i32, false),
            Sense::Ge => (-1i32, false),
            Sense::Eq => (1i32, true),
        };
        let mut denom_lcm = BigInt::from(1);
        for c in self.coeffs.values() {
            denom_lcm = denom_lcm.lcm(c.denom());
        }
        denom_lcm = denom_lcm.lcm(self.rhs.denom());
        let scaled: Vec<(usize, BigInt)> = self
            .coeffs
            .iter()
            .map(|(id, c)| (*id, c.numer() * &denom_lcm / c.denom() * mult))
            .collect();
        let rhs_scaled = self.rhs.numer() * &denom_lcm / self.rhs.denom() * mult;
        let mut content = rhs_scaled.abs();
        for (_, c) in &scaled {
            content = content.gcd(c);
        }
        if content.is_zero() {
            content = BigInt::from(1);
        }
        (
            scaled
                .into_iter()
                .map(|(id, c)| (id, Rat::from_integer(c / &content)))
                .collect(),
            Rat::from_integer(rhs_scaled / &content),
            is_eq,
        )
    }

    /// Dump-format line: `tag: c*var + ... <= rhs` with rationals as `p/q`.
    pub fn dump(&self, space: &VariableSpace) -> String {
        let mut terms = String::new();
        let mut first = true;
        for (id, c) in &self.coeffs {
            if first {
                first = false;
            } else {
                terms.push_str(" + ");
            }
            terms.push_str(&format!("{}*{}", fmt_rat(c), space.name(*id)));
        }
        if first {
            terms.push('0');
        }
        format!("{}: {} {} {}", self.tag, terms, self.sense, fmt_rat(&self.rhs))
    }
}

/// An exact-rational assignment to all variables of a space.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Point {
    pub values: Vec<Rat>,
}

impl Point {
    pub fn zero(dim: usize) -> Self {
        Point {
            values: vec![Rat::zero(); dim],
        }
    }

    pub fn from_values(values: Vec<Rat>) -> Self {
        Point { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, space: &VariableSpace, v: Var) -> &Rat {
        &self.values[space.id(v)]
    }

    pub fn set(&mut self, space: &VariableSpace, v: Var, value: Rat) {
        self.values[space.id(v)] = value;
    }
}
