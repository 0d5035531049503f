//! Exact Gaussian elimination: matrix rank, affine rank, linear solves.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::model::Point;
use crate::rational::Rat;

/// Rank of a rational matrix given as rows. Consumes a working copy.
pub fn matrix_rank(rows: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let nrows = m.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = m[0].len();
    let mut rank = 0;
    let mut pivot_row = 0;
    for col in 0..ncols {
        let Some(src) = (pivot_row..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, src);
        let pivot = m[pivot_row][col].clone();
        for r in pivot_row + 1..nrows {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &pivot;
            for c in col..ncols {
                let delta = &factor * &m[pivot_row][c];
                m[r][c] -= delta;
            }
        }
        rank += 1;
        pivot_row += 1;
        if pivot_row == nrows {
            break;
        }
    }
    rank
}

/// Dimension of the affine hull of a nonempty point set (0 for one point),
/// computed as the rank of differences against the first point.
pub fn affine_rank(points: &[Point]) -> usize {
    assert!(!points.is_empty(), "affine_rank of an empty set");
    let base = &points[0];
    let diffs: Vec<Vec<Rat>> = points[1..]
        .iter()
        .map(|p| {
            p.values
                .iter()
                .zip(&base.values)
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect();
    matrix_rank(&diffs)
}

/// Solves the square system `m x = rhs` exactly. Returns None if singular.
pub fn solve_square(m: &[Vec<Rat>], rhs: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let k = rhs.len(); // number of right-hand sides
    debug_assert!(m.iter().all(|r| r.len() == n));
    debug_assert!(rhs.iter().all(|r| r.len() == n));
    // Augment [m | rhs^T] and reduce.
    let mut a: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> = m[i].clone();
            for r in rhs {
                row.push(r[i].clone());
            }
            row
        })
        .collect();
    for col in 0..n {
        let src = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, src);
        let pivot = a[col][col].clone();
        for c in col..n + k {
            a[col][c] = &a[col][c] / &pivot;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in col..n + k {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
        }
    }
    Some(
        (0..k)
            .map(|j| (0..n).map(|i| a[i][n + j].clone()).collect())
            .collect(),
    )
}
