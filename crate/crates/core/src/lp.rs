//! Exact phase-one simplex: feasibility of `A x >= b, x >= 0` over the rationals.
//!
//! Dense tableau with Bland's rule, so it terminates on degenerate input. Only
//! meant for the small systems produced by coherence checks.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::lattice::Rational;

/// Returns some `x >= 0` with `A x >= b`, or `None` if the system is infeasible.
pub fn feasible_point(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = a.len();
    assert_eq!(rows, b.len(), "row count mismatch");
    let nx = a.first().map_or(0, Vec::len);
    if rows == 0 {
        return Some(vec![Rational::zero(); nx]);
    }
    // Columns: x (nx), surplus s (rows), artificial (rows), rhs.
    let width = nx + 2 * rows + 1;
    let rhs = width - 1;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(rows);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        assert_eq!(row.len(), nx, "ragged constraint matrix");
        let mut r = vec![Rational::zero(); width];
        let flip = bi.is_negative();
        for (j, v) in row.iter().enumerate() {
            r[j] = if flip { -v } else { v.clone() };
        }
        r[nx + i] = if flip { Rational::from_integer(1.into()) } else { Rational::from_integer((-1).into()) };
        r[nx + rows + i] = Rational::from_integer(1.into());
        r[rhs] = bi.abs();
        t.push(r);
    }
    let mut basis: Vec<usize> = (0..rows).map(|i| nx + rows + i).collect();

    // Reduced costs of the phase-one objective (sum of artificials).
    let mut cost = vec![Rational::zero(); width];
    for r in &t {
        for j in 0..nx + rows {
            cost[j] -= &r[j];
        }
        cost[rhs] -= &r[rhs];
    }

    while let Some(entering) = (0..nx + 2 * rows).find(|&j| cost[j].is_negative()) {
        let mut leaving: Option<(usize, Rational)> = None;
        for i in 0..rows {
            if t[i][entering].is_positive() {
                let ratio = &t[i][rhs] / &t[i][entering];
                let better = match &leaving {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        // Phase one is bounded below, so a pivot row always exists.
        let (pr, _) = leaving?;
        pivot(&mut t, &mut cost, pr, entering);
        basis[pr] = entering;
    }

    // cost[rhs] holds minus the objective value.
    if !cost[rhs].is_zero() {
        return None;
    }
    let mut x = vec![Rational::zero(); nx];
    for (i, &col) in basis.iter().enumerate() {
        if col < nx {
            x[col] = t[i][rhs].clone();
        }
    }
    Some(x)
}

fn pivot(t: &mut [Vec<Rational>], cost: &mut [Rational], pr: usize, pc: usize) {
    let p = t[pr][pc].clone();
    for v in t[pr].iter_mut() {
        *v /= &p;
    }
    let pivot_row = t[pr].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == pr || row[pc].is_zero() {
            continue;
        }
        let f = row[pc].clone();
        for (v, pv) in row.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
    if !cost[pc].is_zero() {
        let f = cost[pc].clone();
        for (v, pv) in cost.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
}
