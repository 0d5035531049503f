//! Exact double-description vertex enumeration for bounded H-polytopes.
//!
//! The system is homogenized into a pointed cone over integer row vectors;
//! rays are maintained as primitive integer vectors with per-ray tight-row
//! bitsets. Insertion order and all tie-breaks are deterministic.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::formulation::InequalitySystem;
use crate::model::{Point, Sense};
use crate::polycore::linalg::solve_square;
use crate::rational::Rat;

/// Vertices (and rays, expected empty for bounded systems) of a polytope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    pub points: Vec<Point>,
    pub rays: Vec<Vec<Rat>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DdError {
    /// The homogenized cone is not pointed: some variable is unbounded
    /// (bound rows missing).
    Unbounded,
    /// Internal consistency failure; carries a description.
    Inconsistent(String),
}

impl fmt::Display for DdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DdError::Unbounded => f.write_str("polytope is unbounded (bound rows missing)"),
            DdError::Inconsistent(msg) => write!(f, "double description inconsistency: {msg}"),
        }
    }
}

/// Homogenized integer row: feasible rays satisfy `dot(row, ray) <= 0`.
struct IntRow {
    coeffs: Vec<BigInt>,
    tag: String,
}

fn to_int_rows(sys: &InequalitySystem) -> Vec<IntRow> {
    let dim = sys.space.dim();
    let mut out = Vec::new();
    for row in &sys.rows {
        // Scale to integers: multiply by the lcm of denominators.
        let mut denom_lcm = BigInt::from(1);
        for (_, c) in row.coeffs() {
            denom_lcm = denom_lcm.lcm(c.denom());
        }
        denom_lcm = denom_lcm.lcm(row.rhs.denom());
        let mut base = vec![BigInt::zero(); dim + 1];
        for (id, c) in row.coeffs() {
            base[id] = c.numer() * &denom_lcm / c.denom();
        }
        // a·z <= b  ->  a·z - b·w <= 0
        base[dim] = -(row.rhs.numer() * &denom_lcm / row.rhs.denom());
        match row.sense {
            Sense::Le => out.push(IntRow {
                coeffs: base,
                tag: row.tag.clone(),
            }),
            Sense::Ge => out.push(IntRow {
                coeffs: base.iter().map(|c| -c).collect(),
                tag: row.tag.clone(),
            }),
            Sense::Eq => {
                out.push(IntRow {
                    coeffs: base.iter().map(|c| -c).collect(),
                    tag: alloc::format!("{}#ge", row.tag),
                });
                out.push(IntRow {
                    coeffs: base,
                    tag: row.tag.clone(),
                });
            }
        }
    }
    // w >= 0.
    let mut wrow = vec![BigInt::zero(); dim + 1];
    wrow[dim] = BigInt::from(-1);
    out.push(IntRow {
        coeffs: wrow,
        tag: String::from("#homog_w"),
    });
    out
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let mut acc = BigInt::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// Divides by the content so the vector is primitive. Zero vectors stay zero.
fn make_primitive(v: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for c in v.iter() {
        g = g.gcd(c);
    }
    if g.is_zero() || g == BigInt::from(1) {
        return;
    }
    for c in v.iter_mut() {
        *c = &*c / &g;
    }
}

#[derive(Clone)]
struct Ray {
    coords: Vec<BigInt>,
    /// Bit i set iff the ray is tight on processed row i.
    tight: Vec<u64>,
}

fn bit_set(words: &mut [u64], i: usize) {
    words[i / 64] |= 1 << (i % 64);
}

fn words_and(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn words_count(a: &[u64]) -> usize {
    a.iter().map(|w| w.count_ones() as usize).sum()
}

fn words_superset(sup: &[u64], sub: &[u64]) -> bool {
    sup.iter().zip(sub).all(|(s, t)| s & t == *t)
}

/// Exact double-description enumeration of the vertices of a bounded
/// H-polytope. The empty polytope yields an empty vertex set; an unbounded
/// system is an error.
pub fn dd_enumerate(sys: &InequalitySystem) -> Result<VertexSet, DdError> {
    let dim = sys.space.dim();
    let cone_dim = dim + 1;
    let mut rows = to_int_rows(sys);
    // Deterministic insertion order: nonzero count, then tag.
    rows.sort_by(|a, b| {
        let na = a.coeffs.iter().filter(|c| !c.is_zero()).count();
        let nb = b.coeffs.iter().filter(|c| !c.is_zero()).count();
        na.cmp(&nb).then_with(|| a.tag.cmp(&b.tag))
    });
    let nrows = rows.len();
    let words = nrows.div_ceil(64);

    // Initial simplicial basis: the first cone_dim linearly independent rows
    // in insertion order.
    let mut basis_rows: Vec<usize> = Vec::new();
    {
        let mut chosen: Vec<Vec<Rat>> = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            let cand: Vec<Rat> = row.coeffs.iter().map(|c| Rat::from_integer(c.clone())).collect();
            chosen.push(cand);
            if crate::polycore::linalg::matrix_rank(&chosen) == chosen.len() {
                basis_rows.push(i);
                if basis_rows.len() == cone_dim {
                    break;
                }
            } else {
                chosen.pop();
            }
        }
        if basis_rows.len() < cone_dim {
            return Err(DdError::Unbounded);
        }
    }

    // Rays of the simplicial cone: solve B r_j = -e_j.
    let b_mat: Vec<Vec<Rat>> = basis_rows
        .iter()
        .map(|&i| {
            rows[i]
                .coeffs
                .iter()
                .map(|c| Rat::from_integer(c.clone()))
                .collect()
        })
        .collect();
    let rhs: Vec<Vec<Rat>> = (0..cone_dim)
        .map(|j| {
            let mut e = vec![Rat::zero(); cone_dim];
            e[j] = -Rat::from_integer(BigInt::from(1));
            e
        })
        .collect();
    let sols = solve_square(&b_mat, &rhs)
        .ok_or_else(|| DdError::Inconsistent(String::from("singular initial basis")))?;

    let mut rays: Vec<Ray> = Vec::new();
    for sol in sols {
        // Scale the rational ray to a primitive integer vector.
        let mut denom_lcm = BigInt::from(1);
        for c in &sol {
            denom_lcm = denom_lcm.lcm(c.denom());
        }
        let mut coords: Vec<BigInt> = sol
            .iter()
            .map(|c| c.numer() * &denom_lcm / c.denom())
            .collect();
        make_primitive(&mut coords);
        rays.push(Ray {
            coords,
            tight: vec![0u64; words],
        });
    }
    // Tight sets over the basis rows (and any other row that happens to be
    // tight gets recorded when that row is processed).
    let in_basis = |i: usize| basis_rows.contains(&i);
    for ray in rays.iter_mut() {
        for &bi in &basis_rows {
            if dot(&rows[bi].coeffs, &ray.coords).is_zero() {
                bit_set(&mut ray.tight, bi);
            }
        }
    }

    // Incremental insertion.
    for i in 0..nrows {
        if in_basis(i) {
            continue;
        }
        if rays.is_empty() {
            break; // cone already degenerated to {0}
        }
        let row = &rows[i].coeffs;
        let dots: Vec<BigInt> = rays.iter().map(|r| dot(row, &r.coords)).collect();
        let mut keep: Vec<Ray> = Vec::new();
        let mut pos_idx: Vec<usize> = Vec::new();
        let mut neg_idx: Vec<usize> = Vec::new();
        for (k, d) in dots.iter().enumerate() {
            if d.is_zero() {
                bit_set(&mut rays[k].tight, i);
            }
            if d.is_positive() {
                pos_idx.push(k);
            } else if d.is_negative() {
                neg_idx.push(k);
            }
        }
        if pos_idx.is_empty() {
            continue; // all rays feasible for this row
        }
        let mut new_rays: Vec<Ray> = Vec::new();
        for &p in &pos_idx {
            for &n in &neg_idx {
                let common = words_and(&rays[p].tight, &rays[n].tight);
                // Necessary condition: adjacent rays share >= cone_dim - 2
                // tight rows.
                if words_count(&common) + 2 < cone_dim {
                    continue;
                }
                // Combinatorial adjacency: no third ray's tight set contains
                // the common set.
                let adjacent = rays.iter().enumerate().all(|(k, r)| {
                    k == p || k == n || !words_superset(&r.tight, &common)
                });
                if !adjacent {
                    continue;
                }
                // new = d_p * ray_n - d_n * ray_p  (both coefficients > 0)
                let mut coords: Vec<BigInt> = (0..cone_dim)
                    .map(|c| &dots[p] * &rays[n].coords[c] - &dots[n] * &rays[p].coords[c])
                    .collect();
                make_primitive(&mut coords);
                // Exact tight set over all rows processed so far.
                let mut tight = vec![0u64; words];
                for (j, r) in rows.iter().enumerate().take(i + 1) {
                    if (in_basis(j) || j <= i) && dot(&r.coeffs, &coords).is_zero() {
                        bit_set(&mut tight, j);
                    }
                }
                for &bj in &basis_rows {
                    if bj > i && dot(&rows[bj].coeffs, &coords).is_zero() {
                        bit_set(&mut tight, bj);
                    }
                }
                if new_rays.iter().any(|r| r.coords == coords) {
                    continue;
                }
                new_rays.push(Ray { coords, tight });
            }
        }
        for (k, ray) in rays.drain(..).enumerate() {
            if !dots[k].is_positive() {
                keep.push(ray);
            }
        }
        keep.extend(new_rays);
        rays = keep;
    }

    // Extract vertices: rays with positive homogenizing coordinate.
    let mut points: Vec<Point> = Vec::new();
    let mut free_rays: Vec<Vec<Rat>> = Vec::new();
    for ray in &rays {
        let w = &ray.coords[dim];
        if w.is_zero() {
            if ray.coords.iter().any(|c| !c.is_zero()) {
                free_rays.push(
                    ray.coords[..dim]
                        .iter()
                        .map(|c| Rat::from_integer(c.clone()))
                        .collect(),
                );
            }
            continue;
        }
        debug_assert!(w.is_positive(), "w >= 0 is enforced as a cone row");
        let values: Vec<Rat> = ray.coords[..dim]
            .iter()
            .map(|c| Rat::new(c.clone(), w.clone()))
            .collect();
        points.push(Point::from_values(values));
    }
    if !free_rays.is_empty() {
        return Err(DdError::Unbounded);
    }
    points.sort();
    points.dedup();

    // Every returned point must satisfy the source system exactly.
    for p in &points {
        if let Some(row) = sys.first_violated(p) {
            return Err(DdError::Inconsistent(alloc::format!(
                "vertex violates row {}",
                row.tag
            )));
        }
    }
    Ok(VertexSet {
        points,
        rays: free_rays,
    })
}
