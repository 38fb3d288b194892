//! Dense two-phase simplex for the cone-gauge program
//!
//! ```text
//!     minimize   sum_j lambda_j
//!     subject to sum_j lambda_j p_j = target,   lambda >= 0
//! ```
//!
//! With `p_j` the vertices of a body containing the origin this is the gauge
//! of `target`; with `p_j` facet normals it is the support function of the
//! H-body in direction `target`, by LP duality. Redundancy removal, extreme
//! point filtering, enclosing boxes and V-gauges all reduce to it. The
//! constraint matrix has only `dim <= 6` rows, so a dense tableau is cheap.

use crate::scalar::Scalar;

struct Tableau<S> {
    rows: usize,
    width: usize,
    cells: Vec<S>,
    basis: Vec<usize>,
}

impl<S: Scalar> Tableau<S> {
    fn at(&self, r: usize, c: usize) -> S {
        self.cells[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> S {
        self.at(r, self.width - 1)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let p = self.at(pr, pc);
        for c in 0..w {
            self.cells[pr * w + c] = self.cells[pr * w + c] / p;
        }
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let f = self.at(r, pc);
            if f == S::zero() {
                continue;
            }
            for c in 0..w {
                let v = self.cells[pr * w + c];
                self.cells[r * w + c] = self.cells[r * w + c] - f * v;
            }
            self.cells[r * w + pc] = S::zero();
        }
        self.basis[pr] = pc;
    }

    fn reduced_costs(&self, cost: &[S], allowed: usize) -> Vec<S> {
        (0..allowed)
            .map(|j| {
                let mut rc = cost[j];
                for r in 0..self.rows {
                    rc = rc - cost[self.basis[r]] * self.at(r, j);
                }
                rc
            })
            .collect()
    }

    /// Minimizes `cost` over columns `0..allowed`; `false` on unboundedness
    /// or iteration exhaustion.
    fn optimize(&mut self, cost: &[S], allowed: usize) -> bool {
        let eps_cost = S::tol(1e-11);
        let eps_piv = S::tol(1e-11);
        let bland_after = 20 * (allowed + self.rows);
        let max_iter = 200 * (allowed + self.rows) + 1000;
        for iter in 0..max_iter {
            let rc = self.reduced_costs(cost, allowed);
            let entering = if iter < bland_after {
                rc.iter()
                    .enumerate()
                    .filter(|(_, &v)| v < -eps_cost)
                    .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                    .map(|(j, _)| j)
            } else {
                rc.iter().position(|&v| v < -eps_cost)
            };
            let Some(pc) = entering else {
                return true;
            };
            let mut leave: Option<(usize, S)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > eps_piv {
                    let ratio = self.rhs(r).max(S::zero()) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio || (ratio == lratio && self.basis[r] < self.basis[lr])
                            {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    }
                }
            }
            let Some((pr, _)) = leave else {
                return false;
            };
            self.pivot(pr, pc);
        }
        false
    }
}

/// Outcome of the cone-gauge program.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConeGauge<S> {
    /// Optimal value `min sum lambda`.
    Finite(S),
    /// `target` is not in the cone generated by the points.
    Outside,
}

impl<S: Scalar> ConeGauge<S> {
    pub fn value(self) -> Option<S> {
        match self {
            ConeGauge::Finite(v) => Some(v),
            ConeGauge::Outside => None,
        }
    }
}

/// Solves the cone-gauge program over `points` (each of length `target.len()`).
pub fn cone_gauge<S: Scalar>(points: &[&[S]], target: &[S]) -> ConeGauge<S> {
    let d = target.len();
    let k = points.len();
    if crate::scalar::max_abs(target) == S::zero() {
        return ConeGauge::Finite(S::zero());
    }
    if k == 0 {
        return ConeGauge::Outside;
    }
    let width = k + d + 1;
    let mut t = Tableau {
        rows: d,
        width,
        cells: vec![S::zero(); d * width],
        basis: (k..k + d).collect(),
    };
    for r in 0..d {
        let sign = if target[r] < S::zero() {
            -S::one()
        } else {
            S::one()
        };
        for (j, p) in points.iter().enumerate() {
            t.cells[r * width + j] = sign * p[r];
        }
        t.cells[r * width + k + r] = S::one();
        t.cells[r * width + width - 1] = sign * target[r];
    }

    // Phase 1: drive the artificials out.
    let mut cost1 = vec![S::zero(); k + d];
    cost1[k..].iter_mut().for_each(|c| *c = S::one());
    if !t.optimize(&cost1, k + d) {
        return ConeGauge::Outside;
    }
    let infeasibility: S = (0..d)
        .filter(|&r| t.basis[r] >= k)
        .map(|r| t.rhs(r).abs())
        .sum();
    let feas_tol = S::tol(1e-9) * (S::one() + crate::scalar::max_abs(target));
    if infeasibility > feas_tol {
        return ConeGauge::Outside;
    }
    let eps_piv = S::tol(1e-11);
    for r in 0..d {
        if t.basis[r] >= k {
            if let Some(c) = (0..k).find(|&c| t.at(r, c).abs() > eps_piv) {
                t.pivot(r, c);
            }
        }
    }

    // Phase 2 over the real columns only.
    let mut cost2 = vec![S::one(); k + d];
    cost2[k..].iter_mut().for_each(|c| *c = S::zero());
    if !t.optimize(&cost2, k) {
        return ConeGauge::Outside;
    }
    let value = (0..d)
        .filter(|&r| t.basis[r] < k)
        .map(|r| t.rhs(r).max(S::zero()))
        .sum();
    ConeGauge::Finite(value)
}
