//! Exact primal simplex (two-phase, Bland's anti-cycling rule) over
//! arbitrary-precision rationals, plus LP-based convex-membership testing.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::formulation::InequalitySystem;
use crate::model::{Point, Sense};
use crate::rational::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpSense {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// A dense constraint row for the low-level solver.
#[derive(Debug, Clone)]
pub struct RawRow {
    pub coeffs: Vec<Rat>,
    pub sense: Sense,
    pub rhs: Rat,
}

/// Outcome of an exact LP solve.
///
/// For `Optimal`, `duals` holds one multiplier per input row, satisfying
/// (for maximization) `sum_i duals[i] * a_i = c`, `sum_i duals[i] * b_i =
/// objective`, with `duals[i] >= 0` on `<=` rows, `<= 0` on `>=` rows, free
/// on `=` rows. Minimization results carry the analogous certificate with
/// all signs flipped. For `Unbounded`, `ray` is an improving feasible
/// direction; for `Infeasible`, `farkas` aggregates the rows into `0 <
/// negative`.
#[derive(Debug, Clone)]
pub struct LpResult {
    pub status: LpStatus,
    pub objective: Rat,
    pub solution: Point,
    pub duals: Vec<Rat>,
    pub ray: Option<Vec<Rat>>,
    pub farkas: Option<Vec<Rat>>,
}

impl LpResult {
    fn of_status(status: LpStatus, dim: usize, nrows: usize) -> Self {
        LpResult {
            status,
            objective: Rat::zero(),
            solution: Point::zero(dim),
            duals: vec![Rat::zero(); nrows],
            ray: None,
            farkas: None,
        }
    }
}

struct Tableau {
    /// rows[i] has ncols entries; the last is the rhs.
    rows: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, prow: usize, pcol: usize, obj: &mut Vec<Rat>, objval: &mut Rat) {
        let pivot = self.rows[prow][pcol].clone();
        debug_assert!(!pivot.is_zero());
        for c in 0..self.ncols {
            self.rows[prow][c] = &self.rows[prow][c] / &pivot;
        }
        for r in 0..self.rows.len() {
            if r == prow || self.rows[r][pcol].is_zero() {
                continue;
            }
            let factor = self.rows[r][pcol].clone();
            for c in 0..self.ncols {
                let delta = &factor * &self.rows[prow][c];
                self.rows[r][c] -= delta;
            }
        }
        if !obj[pcol].is_zero() {
            let factor = obj[pcol].clone();
            for c in 0..self.ncols - 1 {
                let delta = &factor * &self.rows[prow][c];
                obj[c] -= delta;
            }
            let delta = &factor * &self.rows[prow][self.ncols - 1];
            *objval += delta;
        }
        self.basis[prow] = pcol;
    }

    /// Bland's rule simplex for maximization of the given reduced-cost row.
    /// Returns `Err(entering)` if unbounded in the entering column.
    fn run(&mut self, obj: &mut Vec<Rat>, objval: &mut Rat, banned: &[bool]) -> Result<(), usize> {
        loop {
            // Entering: smallest-index improving, Bland.
            let Some(entering) = (0..self.ncols - 1)
                .find(|&j| !banned[j] && obj[j].is_positive())
            else {
                return Ok(());
            };
            // Leaving: min ratio, ties by smallest basic column index.
            let mut leave: Option<(usize, Rat)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][entering];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rows[r][self.ncols - 1] / a;
                let better = match &leave {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < *lratio || (ratio == *lratio && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, entering, obj, objval),
                None => return Err(entering),
            }
        }
    }
}

/// Exact two-phase simplex over free variables. Rows are taken as given
/// (`<=`, `>=`, `=` all allowed); variables are unrestricted in sign.
pub fn lp_solve_rows(rows: &[RawRow], objective: &[Rat], sense: LpSense) -> LpResult {
    let dim = objective.len();
    let nrows = rows.len();
    debug_assert!(rows.iter().all(|r| r.coeffs.len() == dim));

    // Maximize throughout; minimization negates in and out.
    let obj_mult = match sense {
        LpSense::Max => Rat::one(),
        LpSense::Min => -Rat::one(),
    };

    // Orient >= rows as <=; remember the flip for dual recovery.
    let mut oriented: Vec<(Vec<Rat>, Rat, bool)> = Vec::with_capacity(nrows); // (coeffs, rhs, is_eq)
    let mut orient_mult: Vec<Rat> = Vec::with_capacity(nrows);
    for row in rows {
        match row.sense {
            Sense::Ge => {
                oriented.push((
                    row.coeffs.iter().map(|c| -c).collect(),
                    -row.rhs.clone(),
                    false,
                ));
                orient_mult.push(-Rat::one());
            }
            Sense::Le => {
                oriented.push((row.coeffs.clone(), row.rhs.clone(), false));
                orient_mult.push(Rat::one());
            }
            Sense::Eq => {
                oriented.push((row.coeffs.clone(), row.rhs.clone(), true));
                orient_mult.push(Rat::one());
            }
        }
    }

    // Column layout: 2*dim split vars, one slack per inequality row,
    // artificials appended as needed, then rhs.
    let nslack = oriented.iter().filter(|(_, _, is_eq)| !is_eq).count();
    let mut nart = 0usize;
    // First pass to count artificials: eq rows always; ineq rows with rhs < 0.
    for (_, rhs, is_eq) in &oriented {
        if *is_eq || rhs.is_negative() {
            nart += 1;
        }
    }
    let ncols = 2 * dim + nslack + nart + 1;
    let rhs_col = ncols - 1;

    let mut tab = Tableau {
        rows: Vec::with_capacity(nrows),
        basis: vec![0; nrows],
        ncols,
    };
    // sign_flip[i]: the tableau equation is flip * (oriented row + slack).
    let mut sign_flip: Vec<Rat> = Vec::with_capacity(nrows);
    let mut marker_col: Vec<usize> = Vec::with_capacity(nrows);
    let mut marker_is_slack: Vec<bool> = Vec::with_capacity(nrows);
    let mut slack_idx = 0usize;
    let mut art_idx = 0usize;
    let mut art_cols: Vec<usize> = Vec::new();

    for (i, (coeffs, rhs, is_eq)) in oriented.iter().enumerate() {
        let mut row = vec![Rat::zero(); ncols];
        for (j, c) in coeffs.iter().enumerate() {
            row[2 * j] = c.clone();
            row[2 * j + 1] = -c.clone();
        }
        let mut scol = None;
        if !is_eq {
            let col = 2 * dim + slack_idx;
            slack_idx += 1;
            row[col] = Rat::one();
            scol = Some(col);
        }
        row[rhs_col] = rhs.clone();
        let flip = if rhs.is_negative() {
            for c in row.iter_mut() {
                *c = -c.clone();
            }
            -Rat::one()
        } else {
            Rat::one()
        };
        sign_flip.push(flip.clone());
        let needs_art = *is_eq || flip.is_negative();
        let basis_col = if needs_art {
            let col = 2 * dim + nslack + art_idx;
            art_idx += 1;
            row[col] = Rat::one();
            art_cols.push(col);
            col
        } else {
            scol.expect("inequality row with nonnegative rhs keeps its slack basic")
        };
        // Marker column: the slack if present (its tableau coefficient
        // carries the row's sign flip), else the artificial (coefficient 1).
        marker_is_slack.push(scol.is_some());
        marker_col.push(scol.unwrap_or(basis_col));
        tab.basis[i] = basis_col;
        tab.rows.push(row);
    }
    debug_assert_eq!(art_idx, nart);

    let is_art = {
        let mut v = vec![false; ncols - 1];
        for &c in &art_cols {
            v[c] = true;
        }
        v
    };

    // Phase 1: maximize -sum(artificials).
    if nart > 0 {
        let mut cost = vec![Rat::zero(); ncols - 1];
        for &c in &art_cols {
            cost[c] = -Rat::one();
        }
        let mut obj = reduced_costs(&tab, &cost);
        let mut objval = basic_cost(&tab, &cost);
        let banned = vec![false; ncols - 1];
        tab.run(&mut obj, &mut objval, &banned)
            .expect("phase 1 objective is bounded above by zero");
        if objval.is_negative() {
            // Infeasible; build the Farkas certificate from phase-1 duals.
            let mut res = LpResult::of_status(LpStatus::Infeasible, dim, nrows);
            let mut farkas = Vec::with_capacity(nrows);
            for i in 0..nrows {
                // c_marker - reduced_cost(marker) gives y·E_marker. A slack
                // marker already carries the row's sign flip; an artificial
                // marker has coefficient 1, so the flip is applied here.
                let ym = &cost[marker_col[i]] - &obj[marker_col[i]];
                let mu = if marker_is_slack[i] {
                    ym
                } else {
                    ym * &sign_flip[i]
                };
                farkas.push(mu * &orient_mult[i]);
            }
            res.farkas = Some(farkas);
            return res;
        }
        // Pivot artificials out of the basis where possible.
        for r in 0..nrows {
            if !is_art[tab.basis[r]] {
                continue;
            }
            if let Some(col) = (0..ncols - 1)
                .find(|&j| !is_art[j] && !tab.rows[r][j].is_zero())
            {
                let mut dummy_obj = vec![Rat::zero(); ncols - 1];
                let mut dummy_val = Rat::zero();
                tab.pivot(r, col, &mut dummy_obj, &mut dummy_val);
            }
            // Otherwise the row is redundant; the artificial stays basic at 0.
        }
    }

    // Phase 2.
    let mut cost = vec![Rat::zero(); ncols - 1];
    for j in 0..dim {
        cost[2 * j] = &objective[j] * &obj_mult;
        cost[2 * j + 1] = -(&objective[j] * &obj_mult);
    }
    let mut obj = reduced_costs(&tab, &cost);
    let mut objval = basic_cost(&tab, &cost);
    match tab.run(&mut obj, &mut objval, &is_art) {
        Ok(()) => {}
        Err(entering) => {
            let mut res = LpResult::of_status(LpStatus::Unbounded, dim, nrows);
            // Improving direction: entering = 1, basics move by -column.
            let mut dir = vec![Rat::zero(); 2 * dim];
            if entering < 2 * dim {
                dir[entering] = Rat::one();
            }
            for r in 0..nrows {
                let b = tab.basis[r];
                if b < 2 * dim {
                    dir[b] = -tab.rows[r][entering].clone();
                }
            }
            let ray: Vec<Rat> = (0..dim).map(|j| &dir[2 * j] - &dir[2 * j + 1]).collect();
            res.ray = Some(ray);
            return res;
        }
    }

    // Extract primal solution.
    let mut split = vec![Rat::zero(); 2 * dim];
    for r in 0..nrows {
        let b = tab.basis[r];
        if b < 2 * dim {
            split[b] = tab.rows[r][rhs_col].clone();
        }
    }
    let solution: Vec<Rat> = (0..dim).map(|j| &split[2 * j] - &split[2 * j + 1]).collect();

    // Duals via marker columns: y_i = c_marker - reduced_cost(marker).
    let mut duals = Vec::with_capacity(nrows);
    for i in 0..nrows {
        let ym = &cost[marker_col[i]] - &obj[marker_col[i]];
        let mu = if marker_is_slack[i] {
            ym
        } else {
            ym * &sign_flip[i]
        };
        duals.push(mu * &orient_mult[i] * &obj_mult);
    }

    LpResult {
        status: LpStatus::Optimal,
        objective: &objval * &obj_mult,
        solution: Point::from_values(solution),
        duals,
        ray: None,
        farkas: None,
    }
}

fn reduced_costs(tab: &Tableau, cost: &[Rat]) -> Vec<Rat> {
    let mut obj = cost.to_vec();
    for r in 0..tab.rows.len() {
        let cb = &cost[tab.basis[r]];
        if cb.is_zero() {
            continue;
        }
        for j in 0..tab.ncols - 1 {
            let delta = cb * &tab.rows[r][j];
            obj[j] -= delta;
        }
    }
    obj
}

fn basic_cost(tab: &Tableau, cost: &[Rat]) -> Rat {
    let mut v = Rat::zero();
    for r in 0..tab.rows.len() {
        v += &cost[tab.basis[r]] * &tab.rows[r][tab.ncols - 1];
    }
    v
}

/// Solves `max/min objective` over an inequality system. The objective is a
/// sparse coefficient map over the system's variable ids.
pub fn lp_solve(sys: &InequalitySystem, objective: &BTreeMap<usize, Rat>, sense: LpSense) -> LpResult {
    let dim = sys.space.dim();
    let mut dense = vec![Rat::zero(); dim];
    for (id, c) in objective {
        dense[*id] = c.clone();
    }
    let rows: Vec<RawRow> = sys
        .rows
        .iter()
        .map(|r| {
            let mut coeffs = vec![Rat::zero(); dim];
            for (id, c) in r.coeffs() {
                coeffs[id] = c.clone();
            }
            RawRow {
                coeffs,
                sense: r.sense,
                rhs: r.rhs.clone(),
            }
        })
        .collect();
    lp_solve_rows(&rows, &dense, sense)
}

/// Exact convex-membership test. Returns `(true, None)` if `p` lies in the
/// convex hull of `generators`; otherwise `(false, Some((a, b)))` with a
/// functional satisfying `a·g <= b` for every generator and `a·p > b`.
pub fn in_convex_hull(p: &Point, generators: &[Point]) -> (bool, Option<(Vec<Rat>, Rat)>) {
    assert!(!generators.is_empty(), "membership test needs generators");
    let d = p.dim();
    // Variables: a_1..a_d (boxed to [-1,1]), b (free).
    // max a·p - b  s.t.  a·g - b <= 0 for every generator.
    let mut rows: Vec<RawRow> = Vec::with_capacity(generators.len() + 2 * d);
    for g in generators {
        let mut coeffs: Vec<Rat> = g.values.clone();
        coeffs.push(-Rat::one());
        rows.push(RawRow {
            coeffs,
            sense: Sense::Le,
            rhs: Rat::zero(),
        });
    }
    for k in 0..d {
        let mut up = vec![Rat::zero(); d + 1];
        up[k] = Rat::one();
        rows.push(RawRow {
            coeffs: up.clone(),
            sense: Sense::Le,
            rhs: Rat::one(),
        });
        up[k] = -Rat::one();
        rows.push(RawRow {
            coeffs: up,
            sense: Sense::Le,
            rhs: Rat::one(),
        });
    }
    let mut objective: Vec<Rat> = p.values.clone();
    objective.push(-Rat::one());
    let res = lp_solve_rows(&rows, &objective, LpSense::Max);
    debug_assert_eq!(res.status, LpStatus::Optimal);
    if res.objective.is_positive() {
        let a = res.solution.values[..d].to_vec();
        let b = res.solution.values[d].clone();
        (false, Some((a, b)))
    } else {
        (true, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn row(coeffs: Vec<Rat>, sense: Sense, rhs: Rat) -> RawRow {
        RawRow { coeffs, sense, rhs }
    }

    fn unit_cube(d: usize) -> Vec<RawRow> {
        let mut rows = Vec::new();
        for k in 0..d {
            let mut c = vec![rat(0); d];
            c[k] = rat(1);
            rows.push(row(c.clone(), Sense::Le, rat(1)));
            rows.push(row(c, Sense::Ge, rat(0)));
        }
        rows
    }

    #[test]
    fn max_over_unit_cube() {
        let mut obj = vec![rat(0); 3];
        obj[0] = rat(1);
        let res = lp_solve_rows(&unit_cube(3), &obj, LpSense::Max);
        assert_eq!(res.status, LpStatus::Optimal);
        assert_eq!(res.objective, rat(1));
        assert_eq!(res.solution.values[0], rat(1));
        // dual certificate: sum duals*b = objective, sum duals*a = c
        check_duals(&unit_cube(3), &obj, &res, LpSense::Max);
    }

    fn check_duals(rows: &[RawRow], obj: &[Rat], res: &LpResult, sense: LpSense) {
        let d = obj.len();
        let mut agg = vec![rat(0); d];
        let mut aggb = rat(0);
        for (i, r) in rows.iter().enumerate() {
            let y = &res.duals[i];
            match (sense, r.sense) {
                (LpSense::Max, Sense::Le) => assert!(y >= &rat(0), "dual sign on <= row"),
                (LpSense::Max, Sense::Ge) => assert!(y <= &rat(0), "dual sign on >= row"),
                (LpSense::Min, Sense::Le) => assert!(y <= &rat(0)),
                (LpSense::Min, Sense::Ge) => assert!(y >= &rat(0)),
                (_, Sense::Eq) => {}
            }
            for k in 0..d {
                agg[k] += y * &r.coeffs[k];
            }
            aggb += y * &r.rhs;
        }
        assert_eq!(agg, obj.to_vec(), "duals aggregate rows to the objective");
        assert_eq!(aggb, res.objective, "strong duality");
    }

    #[test]
    fn min_with_equality_row() {
        // min x + y s.t. x + y = 2, x >= 0, y >= 0 -> 2
        let rows = vec![
            row(vec![rat(1), rat(1)], Sense::Eq, rat(2)),
            row(vec![rat(1), rat(0)], Sense::Ge, rat(0)),
            row(vec![rat(0), rat(1)], Sense::Ge, rat(0)),
        ];
        let obj = vec![rat(1), rat(1)];
        let res = lp_solve_rows(&rows, &obj, LpSense::Min);
        assert_eq!(res.status, LpStatus::Optimal);
        assert_eq!(res.objective, rat(2));
        check_duals(&rows, &obj, &res, LpSense::Min);
    }

    #[test]
    fn infeasible_with_farkas() {
        // z <= 0 and z >= 1
        let rows = vec![
            row(vec![rat(1)], Sense::Le, rat(0)),
            row(vec![rat(1)], Sense::Ge, rat(1)),
        ];
        let res = lp_solve_rows(&rows, &[rat(1)], LpSense::Max);
        assert_eq!(res.status, LpStatus::Infeasible);
        let farkas = res.farkas.unwrap();
        // The multipliers aggregate the rows into 0*z <= negative:
        // lam_le >= 0, lam_ge <= 0, lam_le + lam_ge = 0 on coefficients,
        // lam_le*0 + lam_ge*1 < 0 on the right-hand sides.
        assert!(farkas[0] >= rat(0) && farkas[1] <= rat(0));
        assert_eq!(&farkas[0] * rat(1) + &farkas[1] * rat(1), rat(0));
        assert!(&farkas[0] * rat(0) + &farkas[1] * rat(1) < rat(0));
    }

    #[test]
    fn unbounded_with_ray() {
        // max x, x >= 0 only
        let rows = vec![row(vec![rat(1), rat(0)], Sense::Ge, rat(0))];
        let res = lp_solve_rows(&rows, &[rat(1), rat(0)], LpSense::Max);
        assert_eq!(res.status, LpStatus::Unbounded);
        let ray = res.ray.unwrap();
        // The ray improves the objective and respects the constraint.
        assert!(ray[0] > rat(0));
    }

    #[test]
    fn fractional_optimum() {
        // max x + y s.t. 2x + y <= 1, x + 2y <= 1, x,y >= 0 -> 2/3 at (1/3,1/3)
        let rows = vec![
            row(vec![rat(2), rat(1)], Sense::Le, rat(1)),
            row(vec![rat(1), rat(2)], Sense::Le, rat(1)),
            row(vec![rat(1), rat(0)], Sense::Ge, rat(0)),
            row(vec![rat(0), rat(1)], Sense::Ge, rat(0)),
        ];
        let obj = vec![rat(1), rat(1)];
        let res = lp_solve_rows(&rows, &obj, LpSense::Max);
        assert_eq!(res.objective, ratio(2, 3));
        assert_eq!(res.solution.values, vec![ratio(1, 3), ratio(1, 3)]);
        check_duals(&rows, &obj, &res, LpSense::Max);
    }

    #[test]
    fn membership_segment() {
        let g = vec![
            Point::from_values(vec![rat(0), rat(0)]),
            Point::from_values(vec![rat(2), rat(2)]),
        ];
        let mid = Point::from_values(vec![rat(1), rat(1)]);
        let (inside, sep) = in_convex_hull(&mid, &g);
        assert!(inside && sep.is_none());

        let out = Point::from_values(vec![rat(3), rat(0)]);
        let (inside, sep) = in_convex_hull(&out, &g);
        assert!(!inside);
        let (a, b) = sep.unwrap();
        for gen in &g {
            let dot: Rat = a.iter().zip(&gen.values).map(|(x, y)| x * y).sum();
            assert!(dot <= b);
        }
        let dot: Rat = a.iter().zip(&out.values).map(|(x, y)| x * y).sum();
        assert!(dot > b);
    }
}
