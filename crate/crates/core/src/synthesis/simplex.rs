//! Two-phase primal simplex for the feasibility programs produced by the
//! synthesis layer.
//!
//! Free variables are split as `x = x⁺ − x⁻`, every constraint gets a
//! slack, and rows whose right-hand side is negative after normalization
//! get an artificial variable. Phase 1 minimizes the artificial sum; a
//! positive optimum is a certificate of infeasibility. Phase 2 (optional)
//! minimizes a caller-supplied linear cost over the original variables.
//! Pivoting uses Bland's rule throughout, which precludes cycling at the
//! price of speed — fine at the sizes the synthesis layer produces.

use super::SynthesisError;
use crate::synthesis::lp::{LinearProgram, Relation};

/// Verdict of the feasibility solve. `Infeasible` carries the phase-1
/// optimum (the smallest attainable total constraint violation): it is
/// strictly positive and useful for diagnostics.
#[derive(Debug, Clone)]
pub enum SolveOutcome {
    Feasible(Vec<f64>),
    Infeasible { phase1_objective: f64 },
}

const PIVOT_TOL: f64 = 1e-9;
/// Phase-1 optima at or below this are treated as (numerically) zero.
const FEAS_TOL: f64 = 1e-7;

struct Tableau {
    /// `rows × (ncols + 1)`; the extra column is the right-hand side.
    tab: Vec<Vec<f64>>,
    /// Reduced-cost row, same width; its rhs cell holds −objective.
    obj: Vec<f64>,
    basis: Vec<usize>,
    ncols: usize,
    /// Columns that may never enter the basis (phase-1 artificials
    /// during phase 2).
    banned_from: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.tab[r][self.ncols]
    }

    fn objective(&self) -> f64 {
        -self.obj[self.ncols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.tab[row][col];
        for v in self.tab[row].iter_mut() {
            *v /= piv;
        }
        for r in 0..self.tab.len() {
            if r == row {
                continue;
            }
            let factor = self.tab[r][col];
            if factor != 0.0 {
                for c in 0..=self.ncols {
                    self.tab[r][c] -= factor * self.tab[row][c];
                }
            }
        }
        let factor = self.obj[col];
        if factor != 0.0 {
            for c in 0..=self.ncols {
                self.obj[c] -= factor * self.tab[row][c];
            }
        }
        self.basis[row] = col;
    }

    /// Runs simplex to optimality with Bland's rule. Returns false if the
    /// objective is unbounded below.
    fn run(&mut self, max_iters: usize) -> Result<bool, SynthesisError> {
        for iter in 0..max_iters {
            // Bland: smallest eligible column index.
            let entering = (0..self.banned_from).find(|&j| self.obj[j] < -PIVOT_TOL);
            let Some(col) = entering else {
                return Ok(true);
            };
            // Minimum-ratio leaving row; ties broken by smallest basis
            // index (the other half of Bland's rule).
            let mut best: Option<(usize, f64)> = None;
            for r in 0..self.tab.len() {
                let a = self.tab[r][col];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r) / a;
                    best = match best {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            if ratio < bratio - PIVOT_TOL
                                || ((ratio - bratio).abs() <= PIVOT_TOL
                                    && self.basis[r] < self.basis[br])
                            {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = best else {
                return Ok(false);
            };
            self.pivot(row, col);
            let _ = iter;
        }
        Err(SynthesisError::Stalled { iterations: max_iters })
    }

    fn value_of(&self, col: usize) -> f64 {
        self.basis
            .iter()
            .position(|&b| b == col)
            .map_or(0.0, |r| self.rhs(r))
    }
}

/// Solves `lp` for feasibility; if `minimize` is given (dense cost over
/// the original variables) a phase-2 pass minimizes it over the feasible
/// region afterwards.
pub fn solve_feasibility(
    lp: &LinearProgram,
    minimize: Option<&[f64]>,
) -> Result<SolveOutcome, SynthesisError> {
    let nv = lp.num_vars();
    let nrows = lp.constraints.len();
    if let Some(c) = minimize {
        assert_eq!(c.len(), nv, "cost vector length must match variable count");
    }
    if nrows == 0 {
        return Ok(SolveOutcome::Feasible(vec![0.0; nv]));
    }

    // Column layout: [x⁺ pairs | x⁻ pairs | slacks | artificials | rhs].
    let slack0 = 2 * nv;
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::with_capacity(nrows);
    let mut art_rows = Vec::new();
    for (r, c) in lp.constraints.iter().enumerate() {
        let sign = match c.relation {
            Relation::Le => 1.0,
            Relation::Ge => -1.0,
        };
        let mut dense = vec![0.0; slack0 + nrows];
        for &(j, coef) in &c.coeffs {
            dense[j] += sign * coef;
            dense[nv + j] -= sign * coef;
        }
        dense[slack0 + r] = 1.0;
        let mut rhs = sign * c.bound;
        if rhs < 0.0 {
            for v in dense.iter_mut() {
                *v = -*v;
            }
            rhs = -rhs;
            art_rows.push(r);
        }
        rows.push((dense, rhs));
    }

    let nart = art_rows.len();
    let ncols = slack0 + nrows + nart;
    let mut tab = Vec::with_capacity(nrows);
    let mut basis = vec![usize::MAX; nrows];
    for (r, (dense, rhs)) in rows.into_iter().enumerate() {
        let mut full = vec![0.0; ncols + 1];
        full[..dense.len()].copy_from_slice(&dense);
        full[ncols] = rhs;
        tab.push(full);
        basis[r] = slack0 + r;
    }
    for (k, &r) in art_rows.iter().enumerate() {
        let col = slack0 + nrows + k;
        tab[r][col] = 1.0;
        basis[r] = col;
    }

    // Phase 1: minimize the artificial sum. Price out the basic
    // artificials so the reduced-cost row starts consistent.
    let mut obj = vec![0.0; ncols + 1];
    for k in 0..nart {
        obj[slack0 + nrows + k] = 1.0;
    }
    let mut t = Tableau { tab, obj, basis, ncols, banned_from: ncols };
    for &r in &art_rows {
        for c in 0..=ncols {
            let v = t.tab[r][c];
            t.obj[c] -= v;
        }
    }
    let iter_cap = 50_000 + 200 * (nrows + ncols);
    let bounded = t.run(iter_cap)?;
    debug_assert!(bounded, "phase-1 objective is bounded below by zero");
    let phase1 = t.objective();
    if phase1 > FEAS_TOL {
        return Ok(SolveOutcome::Infeasible { phase1_objective: phase1 });
    }

    if let Some(cost) = minimize {
        // Phase 2 over the same tableau; artificial columns are banned
        // from re-entering (any still basic sit at value zero).
        t.banned_from = slack0 + nrows;
        let mut obj = vec![0.0; ncols + 1];
        for j in 0..nv {
            obj[j] = cost[j];
            obj[nv + j] = -cost[j];
        }
        t.obj = obj;
        for r in 0..nrows {
            let b = t.basis[r];
            let cb = t.obj[b];
            if cb != 0.0 {
                for c in 0..=ncols {
                    let v = t.tab[r][c];
                    t.obj[c] -= cb * v;
                }
            }
        }
        // An unbounded phase 2 just means the cost has no minimum on the
        // feasible set; the point reached is still feasible, so keep it.
        let _ = t.run(iter_cap)?;
    }

    let mut x = vec![0.0; nv];
    for (j, xv) in x.iter_mut().enumerate() {
        *xv = t.value_of(j) - t.value_of(nv + j);
    }
    Ok(SolveOutcome::Feasible(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::lp::{LinearProgram, Relation};
    use approx::assert_relative_eq;

    fn feasible_point(outcome: SolveOutcome) -> Vec<f64> {
        match outcome {
            SolveOutcome::Feasible(x) => x,
            SolveOutcome::Infeasible { phase1_objective } => {
                panic!("expected feasible, got infeasible ({phase1_objective})")
            }
        }
    }

    #[test]
    fn box_interval_feasible() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x");
        lp.constrain("lo", vec![(x, 1.0)], Relation::Ge, 1.0);
        lp.constrain("hi", vec![(x, 1.0)], Relation::Le, 2.0);
        let p = feasible_point(solve_feasibility(&lp, None).unwrap());
        assert!((1.0..=2.0).contains(&p[0]), "x = {}", p[0]);
        assert!(lp.min_slack(&p).0 >= -1e-12);
    }

    #[test]
    fn contradictory_bounds_infeasible() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x");
        lp.constrain("lo", vec![(x, 1.0)], Relation::Ge, 1.0);
        lp.constrain("hi", vec![(x, 1.0)], Relation::Le, 0.0);
        match solve_feasibility(&lp, None).unwrap() {
            SolveOutcome::Infeasible { phase1_objective } => {
                assert!(phase1_objective > 0.5, "violation mass {phase1_objective}")
            }
            SolveOutcome::Feasible(x) => panic!("feasible at {x:?}?"),
        }
    }

    #[test]
    fn free_variables_can_go_negative() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x");
        let y = lp.add_var("y");
        lp.constrain("sum", vec![(x, 1.0), (y, 1.0)], Relation::Le, -3.0);
        lp.constrain("gap", vec![(x, 1.0), (y, -1.0)], Relation::Ge, 1.0);
        let p = feasible_point(solve_feasibility(&lp, None).unwrap());
        assert!(p[0] + p[1] <= -3.0 + 1e-9);
        assert!(p[0] - p[1] >= 1.0 - 1e-9);
    }

    #[test]
    fn infeasible_system_with_three_rows() {
        // x ≤ 0, y ≥ 3 − x implies y ≥ 3, but y ≤ x + 1 ≤ 1.
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x");
        let y = lp.add_var("y");
        lp.constrain("c0", vec![(x, 1.0)], Relation::Le, 0.0);
        lp.constrain("c1", vec![(x, 1.0), (y, 1.0)], Relation::Ge, 3.0);
        lp.constrain("c2", vec![(y, -1.0), (x, 1.0)], Relation::Ge, -1.0);
        assert!(matches!(
            solve_feasibility(&lp, None).unwrap(),
            SolveOutcome::Infeasible { .. }
        ));
    }

    #[test]
    fn equality_pinch() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x");
        lp.constrain("lo", vec![(x, 1.0)], Relation::Ge, 2.0);
        lp.constrain("hi", vec![(x, 1.0)], Relation::Le, 2.0);
        let p = feasible_point(solve_feasibility(&lp, None).unwrap());
        assert_relative_eq!(p[0], 2.0, epsilon = 1e-9);
    }

    #[test]
    fn phase2_minimizes_cost() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x");
        let y = lp.add_var("y");
        lp.constrain("lo_x", vec![(x, 1.0)], Relation::Ge, 1.5);
        lp.constrain("lo_y", vec![(y, 1.0), (x, 1.0)], Relation::Ge, 4.0);
        let p = feasible_point(solve_feasibility(&lp, Some(&[1.0, 1.0])).unwrap());
        assert_relative_eq!(p[0] + p[1], 4.0, epsilon = 1e-9);
        assert!(p[0] >= 1.5 - 1e-9);
    }

    #[test]
    fn phase2_handles_unbounded_cost_gracefully() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x");
        lp.constrain("hi", vec![(x, 1.0)], Relation::Le, 5.0);
        // min x is unbounded below; the solve must still return a
        // feasible point.
        let p = feasible_point(solve_feasibility(&lp, Some(&[1.0])).unwrap());
        assert!(p[0] <= 5.0 + 1e-9);
    }

    #[test]
    fn empty_program_is_trivially_feasible() {
        let mut lp = LinearProgram::new();
        lp.add_var("x");
        let p = feasible_point(solve_feasibility(&lp, None).unwrap());
        assert_eq!(p, vec![0.0]);
    }

    #[test]
    fn redundant_rows_do_not_confuse_the_basis() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x");
        let y = lp.add_var("y");
        for k in 0..4 {
            lp.constrain(format!("dup{k}"), vec![(x, 1.0), (y, 1.0)], Relation::Ge, 2.0);
        }
        lp.constrain("cap", vec![(x, 1.0)], Relation::Le, 0.5);
        lp.constrain("cap_y", vec![(y, 1.0)], Relation::Le, 1.6);
        let p = feasible_point(solve_feasibility(&lp, None).unwrap());
        assert!(lp.min_slack(&p).0 >= -1e-9, "slack {:?}", lp.min_slack(&p));
    }

    #[test]
    fn moderately_sized_random_feasible_programs_round_trip() {
        // Random LPs built around a known interior point must come back
        // feasible, and the returned point must satisfy every row.
        let mut rng = crate::oracle::Rng::new(31337);
        for _ in 0..25 {
            let nv = 3 + rng.below(5);
            let mut lp = LinearProgram::new();
            for j in 0..nv {
                lp.add_var(format!("v{j}"));
            }
            let center: Vec<f64> = (0..nv).map(|_| rng.uniform(-2.0, 2.0)).collect();
            for r in 0..(2 * nv) {
                let coeffs: Vec<(usize, f64)> =
                    (0..nv).map(|j| (j, rng.uniform(-1.0, 1.0))).collect();
                let lhs: f64 = coeffs.iter().map(|&(j, c)| c * center[j]).sum();
                let slackful = rng.uniform(0.1, 1.0);
                if rng.coin() {
                    lp.constrain(format!("r{r}"), coeffs, Relation::Le, lhs + slackful);
                } else {
                    lp.constrain(format!("r{r}"), coeffs, Relation::Ge, lhs - slackful);
                }
            }
            let p = feasible_point(solve_feasibility(&lp, None).unwrap());
            assert!(lp.min_slack(&p).0 >= -1e-9);
        }
    }
}
