//! Scalar bounds on the real parts of eigenvalues.
//!
//! Four variants are provided, all reading off row/column radius sums:
//!
//! * `plain` — unscaled row and column disc bounds, combined by min/max;
//! * `scaled` — the same with radii reweighted by a positive diagonal `D`;
//! * `alpha` — one blended radius `R_i^α · C_i^{1-α}` per row (no scaling);
//! * `scaled_alpha` — the blend applied to the `D`-weighted radii.
//!
//! Each variant extends verbatim to interval matrices: the diagonal centers
//! move to the worst end of their interval and the radii absorb the
//! off-diagonal magnitude bounds, so the result holds for every realization.
//!
//! [`optimize_scaling`] searches over `(D, α)`. Every piece of the search
//! objective is convex in the logs of the scaling weights (each branch is a
//! max of sums of exponentials of linear functions), so coordinate descent
//! with exact line searches is reliable; min/max combinations across the
//! row and column branches are handled by optimizing each branch
//! combination separately, which commutes with the outer min.

use serde::{Deserialize, Serialize};

use crate::matrix::{IntervalMatrix, RealMatrix, Scaling};

/// Which bound formula a report came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundVariant {
    Plain,
    Scaled,
    Alpha,
    ScaledAlpha,
}

impl std::fmt::Display for BoundVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            BoundVariant::Plain => "plain",
            BoundVariant::Scaled => "scaled",
            BoundVariant::Alpha => "alpha",
            BoundVariant::ScaledAlpha => "scaled_alpha",
        };
        f.write_str(s)
    }
}

/// A certified interval `[sigma_min, sigma_max]` containing the real parts
/// of all eigenvalues (of every realization, for interval inputs).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsReport {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub variant: BoundVariant,
    pub scaling_used: Option<Scaling>,
}

/// Blended radius `r^α · c^(1-α)` with IEEE `powf` endpoint semantics:
/// `0^0 = 1`, so at `α = 0` the blend is exactly `c` and at `α = 1` exactly
/// `r`, even when the other radius vanishes. This reproduces the row-only /
/// column-only bounds at the endpoints, which is the convention that keeps
/// the endpoint cases sound.
pub(crate) fn blend(r: f64, c: f64, alpha: f64) -> f64 {
    r.powf(alpha) * c.powf(1.0 - alpha)
}

/// Shared evaluation data: interval centers per diagonal entry and the
/// nonnegative magnitude matrix the radii are summed from. A constant
/// matrix is the degenerate case `center_lo == center_hi`, `mag = |q|`.
struct BoundData {
    n: usize,
    center_lo: Vec<f64>,
    center_hi: Vec<f64>,
    /// `mag[i][j] = |q0_ij| + m_ij` off the diagonal, 0 on it.
    mag: RealMatrix,
}

impl BoundData {
    fn from_constant(q: &RealMatrix) -> Self {
        let n = q.n();
        let mut mag = RealMatrix::zeros(n);
        let mut centers = Vec::with_capacity(n);
        for i in 0..n {
            centers.push(q.get(i, i));
            for j in 0..n {
                if i != j {
                    mag.set(i, j, q.get(i, j).abs());
                }
            }
        }
        BoundData { n, center_lo: centers.clone(), center_hi: centers, mag }
    }

    fn from_interval(m: &IntervalMatrix) -> Self {
        let n = m.n();
        let mut mag = RealMatrix::zeros(n);
        let mut lo = Vec::with_capacity(n);
        let mut hi = Vec::with_capacity(n);
        for i in 0..n {
            let q0 = m.nominal().get(i, i);
            lo.push(q0 + m.diag_lo()[i]);
            hi.push(q0 + m.diag_hi()[i]);
            for j in 0..n {
                if i != j {
                    mag.set(i, j, m.nominal().get(i, j).abs() + m.offdiag_mag().get(i, j));
                }
            }
        }
        BoundData { n, center_lo: lo, center_hi: hi, mag }
    }

    fn row_rad(&self, i: usize, d: &[f64]) -> f64 {
        let inv = 1.0 / d[i];
        let mut s = 0.0;
        for j in 0..self.n {
            if j != i {
                s += d[j] * inv * self.mag.get(i, j);
            }
        }
        s
    }

    fn col_rad(&self, j: usize, d: &[f64]) -> f64 {
        let inv = 1.0 / d[j];
        let mut s = 0.0;
        for i in 0..self.n {
            if i != j {
                s += d[i] * inv * self.mag.get(i, j);
            }
        }
        s
    }

    fn blend_rad(&self, i: usize, d: &[f64], alpha: f64) -> f64 {
        blend(self.row_rad(i, d), self.col_rad(i, d), alpha)
    }

    /// Row/column disc bounds: the min/max over both sum directions.
    fn lemma_bounds(&self, d: &[f64]) -> (f64, f64) {
        let mut rows_max = f64::NEG_INFINITY;
        let mut cols_max = f64::NEG_INFINITY;
        let mut rows_min = f64::INFINITY;
        let mut cols_min = f64::INFINITY;
        for i in 0..self.n {
            let r = self.row_rad(i, d);
            let c = self.col_rad(i, d);
            rows_max = rows_max.max(self.center_hi[i] + r);
            cols_max = cols_max.max(self.center_hi[i] + c);
            rows_min = rows_min.min(self.center_lo[i] - r);
            cols_min = cols_min.min(self.center_lo[i] - c);
        }
        (rows_min.max(cols_min), rows_max.min(cols_max))
    }

    /// Blended-radius bounds: one disc per row, no column counterpart.
    fn blend_bounds(&self, d: &[f64], alpha: f64) -> (f64, f64) {
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        for i in 0..self.n {
            let b = self.blend_rad(i, d, alpha);
            hi = hi.max(self.center_hi[i] + b);
            lo = lo.min(self.center_lo[i] - b);
        }
        (lo, hi)
    }
}

fn assert_scaling_len(n: usize, scaling: &Scaling) {
    assert_eq!(
        scaling.len(),
        n,
        "scaling has {} weights but the matrix is {n}x{n}",
        scaling.len()
    );
}

fn uniform_d(n: usize) -> Vec<f64> {
    vec![1.0; n]
}

fn report(data: &BoundData, variant: BoundVariant, scaling: Option<&Scaling>) -> BoundsReport {
    let d_store;
    let d: &[f64] = match scaling {
        Some(s) => s.d(),
        None => {
            d_store = uniform_d(data.n);
            &d_store
        }
    };
    let (sigma_min, sigma_max) = match variant {
        BoundVariant::Plain | BoundVariant::Scaled => data.lemma_bounds(d),
        BoundVariant::Alpha | BoundVariant::ScaledAlpha => {
            let alpha = scaling.map_or(0.5, Scaling::alpha);
            data.blend_bounds(d, alpha)
        }
    };
    BoundsReport { sigma_min, sigma_max, variant, scaling_used: scaling.cloned() }
}

/// Classifies a blended-variant scaling: uniform weights mean the pure
/// exponent variant, anything else the scaled one.
fn alpha_variant(scaling: &Scaling) -> BoundVariant {
    if scaling.d().iter().all(|&v| v == 1.0) {
        BoundVariant::Alpha
    } else {
        BoundVariant::ScaledAlpha
    }
}

/// Row/column disc bounds for a constant matrix, optionally `D`-scaled.
///
/// # Panics
/// If the scaling length does not match the matrix dimension.
pub fn gershgorin_bounds(q: &RealMatrix, scaling: Option<&Scaling>) -> BoundsReport {
    if let Some(s) = scaling {
        assert_scaling_len(q.n(), s);
    }
    let variant = if scaling.is_some() { BoundVariant::Scaled } else { BoundVariant::Plain };
    report(&BoundData::from_constant(q), variant, scaling)
}

/// Blended-radius bounds `q_ii ± [R_i^D]^α [C_i^D]^(1-α)` for a constant
/// matrix. The exponent and weights both come from `scaling`.
///
/// # Panics
/// If the scaling length does not match the matrix dimension.
pub fn ostrowski_bounds(q: &RealMatrix, scaling: &Scaling) -> BoundsReport {
    assert_scaling_len(q.n(), scaling);
    report(&BoundData::from_constant(q), alpha_variant(scaling), Some(scaling))
}

/// Bounds valid for **every** realization of an interval matrix: diagonal
/// centers move to the worst interval end and radii absorb the magnitude
/// bounds. With `use_alpha` the blended radius replaces the row/column pair
/// (a missing scaling then defaults to uniform weights with `α = 0.5`).
///
/// # Panics
/// If the scaling length does not match the matrix dimension.
pub fn interval_bounds(
    m: &IntervalMatrix,
    scaling: Option<&Scaling>,
    use_alpha: bool,
) -> BoundsReport {
    if let Some(s) = scaling {
        assert_scaling_len(m.n(), s);
    }
    let data = BoundData::from_interval(m);
    match (scaling, use_alpha) {
        (None, false) => report(&data, BoundVariant::Plain, None),
        (Some(s), false) => report(&data, BoundVariant::Scaled, Some(s)),
        (None, true) => {
            let s = Scaling::uniform(m.n());
            report(&data, BoundVariant::Alpha, Some(&s))
        }
        (Some(s), true) => report(&data, alpha_variant(s), Some(s)),
    }
}

/// What the scaling search targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizeObjective {
    /// Push `sigma_max` as low as possible.
    MaxBound,
    /// Push `sigma_min` as high as possible.
    MinBound,
    /// Minimize the width `sigma_max - sigma_min` with a single scaling.
    Both,
}

/// Search knobs: coordinate-descent pass budget and the stopping tolerance
/// on per-pass objective improvement.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OptimizerBudget {
    pub passes: usize,
    pub tol: f64,
}

impl Default for OptimizerBudget {
    fn default() -> Self {
        OptimizerBudget { passes: 40, tol: 1e-6 }
    }
}

/// Input to the scaling search.
#[derive(Debug, Clone, Copy)]
pub enum BoundTarget<'a> {
    Constant(&'a RealMatrix),
    Interval(&'a IntervalMatrix),
}

impl<'a> BoundTarget<'a> {
    fn data(&self) -> BoundData {
        match self {
            BoundTarget::Constant(q) => BoundData::from_constant(q),
            BoundTarget::Interval(m) => BoundData::from_interval(m),
        }
    }
}

impl<'a> From<&'a RealMatrix> for BoundTarget<'a> {
    fn from(q: &'a RealMatrix) -> Self {
        BoundTarget::Constant(q)
    }
}

impl<'a> From<&'a IntervalMatrix> for BoundTarget<'a> {
    fn from(m: &'a IntervalMatrix) -> Self {
        BoundTarget::Interval(m)
    }
}

/// One monotone piece of the objective: which radius feeds the disc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Rows,
    Cols,
    Blend,
}

/// A (upper-branch, lower-branch) pair; unused sides are `None`. The outer
/// min/max over row and column branches commutes with the search, so each
/// combination is optimized on its own and only then compared.
#[derive(Debug, Clone, Copy)]
struct Combo {
    upper: Option<Branch>,
    lower: Option<Branch>,
}

fn branch_rad(data: &BoundData, b: Branch, i: usize, d: &[f64], alpha: f64) -> f64 {
    match b {
        Branch::Rows => data.row_rad(i, d),
        Branch::Cols => data.col_rad(i, d),
        Branch::Blend => data.blend_rad(i, d, alpha),
    }
}

/// Cost to minimize: upper bound minus lower bound, restricted to the
/// branches present.
fn combo_cost(data: &BoundData, combo: Combo, d: &[f64], alpha: f64) -> f64 {
    let mut cost = 0.0;
    if let Some(b) = combo.upper {
        let mut v = f64::NEG_INFINITY;
        for i in 0..data.n {
            v = v.max(data.center_hi[i] + branch_rad(data, b, i, d, alpha));
        }
        cost += v;
    }
    if let Some(b) = combo.lower {
        let mut v = f64::INFINITY;
        for i in 0..data.n {
            v = v.min(data.center_lo[i] - branch_rad(data, b, i, d, alpha));
        }
        cost -= v;
    }
    cost
}

fn combos(variant: BoundVariant, objective: OptimizeObjective) -> Vec<Combo> {
    match variant {
        BoundVariant::Alpha | BoundVariant::ScaledAlpha => {
            let (u, l) = match objective {
                OptimizeObjective::MaxBound => (Some(Branch::Blend), None),
                OptimizeObjective::MinBound => (None, Some(Branch::Blend)),
                OptimizeObjective::Both => (Some(Branch::Blend), Some(Branch::Blend)),
            };
            vec![Combo { upper: u, lower: l }]
        }
        _ => {
            let sides = [Branch::Rows, Branch::Cols];
            match objective {
                OptimizeObjective::MaxBound => {
                    sides.iter().map(|&b| Combo { upper: Some(b), lower: None }).collect()
                }
                OptimizeObjective::MinBound => {
                    sides.iter().map(|&b| Combo { upper: None, lower: Some(b) }).collect()
                }
                OptimizeObjective::Both => {
                    let mut out = Vec::new();
                    for &u in &sides {
                        for &l in &sides {
                            out.push(Combo { upper: Some(u), lower: Some(l) });
                        }
                    }
                    out
                }
            }
        }
    }
}

const GOLDEN_ITERS: usize = 64;

/// Golden-section minimizer; exact enough for the convex sections the
/// search produces (the bracket shrinks below 1e-12 of its width).
fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const INVPHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..GOLDEN_ITERS {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Line search with a sliding window, so ratios far from 1 stay reachable
/// without starting from an enormous bracket.
fn line_min(f: &dyn Fn(f64) -> f64, start: f64) -> (f64, f64) {
    let half = 4.0;
    let mut center = start;
    let mut best = (start, f(start));
    for _ in 0..8 {
        let (x, fx) = golden_min(f, center - half, center + half);
        if fx < best.1 {
            best = (x, fx);
        }
        if x < center - half + 0.1 {
            center -= 1.5 * half;
        } else if x > center + half - 0.1 {
            center += 1.5 * half;
        } else {
            return best;
        }
    }
    best
}

/// For 2x2 targets the per-branch optimum solves a quadratic in the weight
/// ratio `u = d_1/d_0` (equalize the two disc edges); seed the descent with
/// those roots so the known analytic optima are hit exactly.
fn balance_seeds(data: &BoundData, combo: Combo, alpha: f64) -> Vec<Vec<f64>> {
    if data.n != 2 {
        return Vec::new();
    }
    let m01 = data.mag.get(0, 1);
    let m10 = data.mag.get(1, 0);
    let mut seeds = Vec::new();
    // Effective radii as a function of the ratio u: disc 0 grows like
    // u·g0, disc 1 like g1/u; equalizing the tracked edges gives
    // g0·u² + c·u − g1 = 0 whose positive root we seed.
    let mut push_root = |g0: f64, g1: f64, c: f64| {
        if g0 > 0.0 {
            let disc = c * c + 4.0 * g0 * g1;
            let u = (-c + disc.sqrt()) / (2.0 * g0);
            if u.is_finite() && u > 0.0 {
                seeds.push(vec![1.0, u]);
            }
        }
    };
    let gains = |b: Branch| match b {
        Branch::Rows => (m01, m10),
        Branch::Cols => (m10, m01),
        Branch::Blend => (blend(m01, m10, alpha), blend(m10, m01, alpha)),
    };
    if let Some(b) = combo.upper {
        let (g0, g1) = gains(b);
        push_root(g0, g1, data.center_hi[0] - data.center_hi[1]);
    }
    if let Some(b) = combo.lower {
        let (g0, g1) = gains(b);
        push_root(g0, g1, data.center_lo[1] - data.center_lo[0]);
    }
    seeds
}

/// Rough radius-equalizing start: weight each row by the square root of
/// its column-to-row radius ratio.
fn osborne_seed(data: &BoundData) -> Vec<f64> {
    let ones = uniform_d(data.n);
    (0..data.n)
        .map(|i| {
            let r = data.row_rad(i, &ones);
            let c = data.col_rad(i, &ones);
            if r > 0.0 && c > 0.0 {
                (c / r).sqrt()
            } else {
                1.0
            }
        })
        .collect()
}

struct Refined {
    d: Vec<f64>,
    alpha: f64,
    cost: f64,
}

fn refine(
    data: &BoundData,
    combo: Combo,
    vary_d: bool,
    vary_alpha: bool,
    mut d: Vec<f64>,
    mut alpha: f64,
    budget: &OptimizerBudget,
) -> Refined {
    let mut cost = combo_cost(data, combo, &d, alpha);
    for _ in 0..budget.passes {
        let before = cost;
        if vary_alpha {
            let dd = d.clone();
            let f = |a: f64| combo_cost(data, combo, &dd, a);
            let (a_in, c_in) = golden_min(&f, 0.0, 1.0);
            for (a, c) in [(0.0, f(0.0)), (1.0, f(1.0)), (a_in, c_in)] {
                if c < cost {
                    cost = c;
                    alpha = a;
                }
            }
        }
        if vary_d {
            for i in 0..data.n {
                let d_fixed = d.clone();
                let f = |t: f64| {
                    let mut dt = d_fixed.clone();
                    dt[i] = t.exp();
                    combo_cost(data, combo, &dt, alpha)
                };
                let (t_best, c_best) = line_min(&f, d[i].ln());
                if c_best < cost {
                    cost = c_best;
                    d[i] = t_best.exp();
                }
            }
        }
        if before - cost < budget.tol {
            break;
        }
    }
    Refined { d, alpha, cost }
}

/// Searches for a `(D, α)` scaling optimizing the chosen objective, with
/// the default budget. The result is never worse than the unscaled bound
/// for the same objective: uniform weights are always among the starting
/// points and descent only ever improves.
pub fn optimize_scaling(
    target: BoundTarget<'_>,
    variant: BoundVariant,
    objective: OptimizeObjective,
) -> (Scaling, BoundsReport) {
    optimize_scaling_with(target, variant, objective, &OptimizerBudget::default())
}

/// [`optimize_scaling`] with an explicit budget.
pub fn optimize_scaling_with(
    target: BoundTarget<'_>,
    variant: BoundVariant,
    objective: OptimizeObjective,
    budget: &OptimizerBudget,
) -> (Scaling, BoundsReport) {
    let data = target.data();
    let n = data.n;
    if variant == BoundVariant::Plain {
        // Nothing to optimize; report the plain bounds unchanged.
        let rep = report(&data, BoundVariant::Plain, None);
        return (Scaling::uniform(n), rep);
    }
    let vary_d = matches!(variant, BoundVariant::Scaled | BoundVariant::ScaledAlpha);
    let vary_alpha = matches!(variant, BoundVariant::Alpha | BoundVariant::ScaledAlpha);

    // Seed the blended search with the best pure-scaling weights. The blend
    // collapses to the row radius at α=1 and the column radius at α=0, and
    // the α line search always evaluates both endpoints, so with this start
    // the blended optimum is provably no worse than the scaled one.
    let scaled_seed: Option<Vec<f64>> = if variant == BoundVariant::ScaledAlpha {
        Some(optimize_scaling_with(target, BoundVariant::Scaled, objective, budget).0.d().to_vec())
    } else {
        None
    };

    let mut best: Option<Refined> = None;
    for combo in combos(variant, objective) {
        let mut starts = vec![(uniform_d(n), 0.5)];
        if vary_d {
            starts.push((osborne_seed(&data), 0.5));
            for s in balance_seeds(&data, combo, 0.5) {
                starts.push((s, 0.5));
            }
            if let Some(d) = &scaled_seed {
                starts.push((d.clone(), 0.5));
            }
        }
        for (d0, a0) in starts {
            let r = refine(&data, combo, vary_d, vary_alpha, d0, a0, budget);
            if best.as_ref().map_or(true, |b| r.cost < b.cost) {
                best = Some(r);
            }
        }
    }
    let mut best = best.expect("at least one combo");

    // Normalize so the first weight is 1 (pure gauge freedom).
    let d0 = best.d[0];
    for v in best.d.iter_mut() {
        *v /= d0;
    }
    let alpha = best.alpha.clamp(0.0, 1.0);
    let scaling = Scaling::new(best.d, alpha).expect("positive finite weights");
    let rep = match variant {
        BoundVariant::Scaled => report(&data, BoundVariant::Scaled, Some(&scaling)),
        _ => report(&data, alpha_variant(&scaling), Some(&scaling)),
    };
    (scaling, rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{IntervalMatrix, RealMatrix, Scaling};
    use approx::assert_relative_eq;

    fn mat(rows: &[Vec<f64>]) -> RealMatrix {
        RealMatrix::from_rows(rows).unwrap()
    }

    fn example1() -> RealMatrix {
        mat(&[vec![-1.0, -2.5], vec![-0.5, -2.0]])
    }

    fn example2_model() -> IntervalMatrix {
        let q0 = mat(&[vec![-1.0, 0.0], vec![0.0, -1.5]]);
        let mag = mat(&[vec![0.0, 2.0], vec![3.0, 0.0]]);
        IntervalMatrix::new(q0, vec![-1.0, -4.0], vec![1.0, 4.0], mag).unwrap()
    }

    #[test]
    fn plain_bounds_on_worked_example() {
        let rep = gershgorin_bounds(&example1(), None);
        assert_eq!(rep.variant, BoundVariant::Plain);
        assert_eq!(rep.sigma_min, -3.5);
        assert_eq!(rep.sigma_max, 0.5);
        assert!(rep.scaling_used.is_none());
    }

    #[test]
    fn scaled_bounds_match_reference_weights() {
        // Symmetrized system matrix of the LTV example with the published
        // weights (1, 0.711); both sum directions agree by symmetry.
        let abar = mat(&[vec![-2.0, 0.5], vec![0.5, -4.0]]);
        let s = Scaling::new(vec![1.0, 0.711], 0.5).unwrap();
        let rep = gershgorin_bounds(&abar, Some(&s));
        assert_eq!(rep.variant, BoundVariant::Scaled);
        assert_relative_eq!(rep.sigma_max, -1.6445, epsilon = 1e-12);
    }

    #[test]
    fn diagonal_matrix_is_exact() {
        let q = mat(&[vec![-1.0, 0.0], vec![0.0, -2.0]]);
        let rep = gershgorin_bounds(&q, None);
        assert_eq!((rep.sigma_min, rep.sigma_max), (-2.0, -1.0));
    }

    #[test]
    fn transpose_invariance_of_plain_bounds() {
        let q = mat(&[
            vec![1.0, -3.0, 0.2],
            vec![0.0, -2.0, 1.5],
            vec![4.0, 0.1, -0.5],
        ]);
        let a = gershgorin_bounds(&q, None);
        let b = gershgorin_bounds(&q.transpose(), None);
        assert_eq!(a.sigma_min, b.sigma_min);
        assert_eq!(a.sigma_max, b.sigma_max);
    }

    #[test]
    fn blend_endpoints_collapse_to_row_and_column_bounds() {
        let q = mat(&[
            vec![1.0, -3.0, 0.0],
            vec![0.5, -2.0, 1.5],
            vec![4.0, 0.1, -0.5],
        ]);
        let rows = ostrowski_bounds(&q, &Scaling::new(vec![1.0; 3], 1.0).unwrap());
        let cols = ostrowski_bounds(&q, &Scaling::new(vec![1.0; 3], 0.0).unwrap());
        // α = 1 reads only row radii; α = 0 only column radii.
        let mut row_hi = f64::NEG_INFINITY;
        let mut col_hi = f64::NEG_INFINITY;
        for i in 0..3 {
            row_hi = row_hi.max(q.get(i, i) + q.row_radius(i, None));
            col_hi = col_hi.max(q.get(i, i) + q.col_radius(i, None));
        }
        assert_eq!(rows.sigma_max, row_hi);
        assert_eq!(cols.sigma_max, col_hi);
        assert_eq!(rows.variant, BoundVariant::Alpha);
    }

    #[test]
    fn blend_balance_point_on_worked_example() {
        // Equalizing the two blended discs of the 2x2 example solves
        // u² + 2u − 5 = 0 with u = 5^α, giving α ≈ 0.2306 and the bound
        // (−3+√6)/2 ≈ −0.2753.
        let u = -1.0 + 6.0_f64.sqrt();
        let alpha = u.ln() / 5.0_f64.ln();
        let rep = ostrowski_bounds(&example1(), &Scaling::new(vec![1.0, 1.0], alpha).unwrap());
        assert_relative_eq!(rep.sigma_max, (-3.0 + 6.0_f64.sqrt()) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_radius_with_endpoint_exponent_keeps_the_other_radius() {
        // Row 0 has no off-diagonal entries, so its row radius is 0; at
        // α = 0 the blend must still report the column radius.
        let q = mat(&[vec![1.0, 0.0], vec![2.0, -1.0]]);
        let rep = ostrowski_bounds(&q, &Scaling::new(vec![1.0, 1.0], 0.0).unwrap());
        assert_eq!(rep.sigma_max, 3.0); // 1 + C_0 = 1 + 2
        let rep = ostrowski_bounds(&q, &Scaling::new(vec![1.0, 1.0], 1.0).unwrap());
        assert_eq!(rep.sigma_max, 1.0); // radius exactly 0 at α = 1
    }

    #[test]
    fn interval_bounds_on_uncertain_example() {
        let rep = interval_bounds(&example2_model(), None, false);
        assert_eq!(rep.sigma_max, 4.5);
        assert_eq!(rep.sigma_min, -7.5);
    }

    #[test]
    fn degenerate_interval_equals_constant_bounds() {
        let q = example1();
        let m = IntervalMatrix::degenerate(q.clone());
        let a = interval_bounds(&m, None, false);
        let b = gershgorin_bounds(&q, None);
        assert_eq!(a.sigma_min, b.sigma_min);
        assert_eq!(a.sigma_max, b.sigma_max);
        let s = Scaling::new(vec![1.0, 0.4], 0.3).unwrap();
        let a = interval_bounds(&m, Some(&s), true);
        let b = ostrowski_bounds(&q, &s);
        assert_eq!(a.sigma_min, b.sigma_min);
        assert_eq!(a.sigma_max, b.sigma_max);
    }

    #[test]
    fn network_style_model_bound() {
        // Nominal −10·I with unit off-diagonal magnitudes and certain
        // diagonal: σ_max = −10 + 2.
        let q0 = RealMatrix::identity(3).scale(-10.0);
        let mut mag = RealMatrix::zeros(3);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    mag.set(i, j, 1.0);
                }
            }
        }
        let m = IntervalMatrix::new(q0, vec![0.0; 3], vec![0.0; 3], mag).unwrap();
        let rep = interval_bounds(&m, None, false);
        assert_eq!(rep.sigma_max, -8.0);
    }

    #[test]
    fn interval_bounds_monotone_in_magnitudes() {
        let base = example2_model();
        let mut bigger_mag = base.offdiag_mag().clone();
        bigger_mag.set(0, 1, 3.5);
        let bigger = IntervalMatrix::new(
            base.nominal().clone(),
            base.diag_lo().to_vec(),
            base.diag_hi().to_vec(),
            bigger_mag,
        )
        .unwrap();
        for use_alpha in [false, true] {
            let a = interval_bounds(&base, None, use_alpha);
            let b = interval_bounds(&bigger, None, use_alpha);
            assert!(b.sigma_max >= a.sigma_max);
            assert!(b.sigma_min <= a.sigma_min);
        }
    }

    #[test]
    fn optimizer_reaches_known_scaled_optima() {
        let q = example1();
        let (_, rep) =
            optimize_scaling(BoundTarget::Constant(&q), BoundVariant::Scaled, OptimizeObjective::MaxBound);
        // Balancing the row discs: optimum (−3+√6)/2.
        assert_relative_eq!(rep.sigma_max, (-3.0 + 6.0_f64.sqrt()) / 2.0, epsilon = 1e-6);

        let (_, rep) =
            optimize_scaling(BoundTarget::Constant(&q), BoundVariant::Scaled, OptimizeObjective::MinBound);
        assert_relative_eq!(rep.sigma_min, -(3.0 + 6.0_f64.sqrt()) / 2.0, epsilon = 1e-6);
    }

    #[test]
    fn blended_optimum_is_pinned_by_the_radius_product() {
        // For any (D, α) on a 2x2 matrix the product of the two blended
        // radii equals |q01·q10|, so the best reachable σ_max solves the
        // same balance equation as the scaled variant: (−3+√6)/2. The
        // search must find it and cannot beat it.
        let q = example1();
        let (_, rep) = optimize_scaling(
            BoundTarget::Constant(&q),
            BoundVariant::ScaledAlpha,
            OptimizeObjective::MaxBound,
        );
        assert_relative_eq!(rep.sigma_max, (-3.0 + 6.0_f64.sqrt()) / 2.0, epsilon = 1e-6);

        let (_, rep) = optimize_scaling(
            BoundTarget::Constant(&q),
            BoundVariant::ScaledAlpha,
            OptimizeObjective::MinBound,
        );
        assert_relative_eq!(rep.sigma_min, -(3.0 + 6.0_f64.sqrt()) / 2.0, epsilon = 1e-6);
    }

    #[test]
    fn width_objective_balances_the_discs() {
        // Minimizing the width pushes both blended radii to √1.25, the
        // geometric mean of the off-diagonal magnitudes.
        let q = example1();
        let (scaling, rep) = optimize_scaling(
            BoundTarget::Constant(&q),
            BoundVariant::ScaledAlpha,
            OptimizeObjective::Both,
        );
        let root = 1.25_f64.sqrt();
        assert_relative_eq!(rep.sigma_max, -1.0 + root, epsilon = 1e-4);
        assert_relative_eq!(rep.sigma_min, -2.0 - root, epsilon = 1e-4);
        // The two blended radii are equal at the optimum.
        let data_r0 = q.row_radius(0, Some(&scaling));
        let data_c0 = q.col_radius(0, Some(&scaling));
        let b0 = blend(data_r0, data_c0, scaling.alpha());
        assert_relative_eq!(b0, root, epsilon = 1e-3);
    }

    #[test]
    fn optimizer_never_worse_than_plain() {
        let q = mat(&[
            vec![-1.0, 2.0, -0.3],
            vec![0.7, -4.0, 1.1],
            vec![-2.0, 0.4, -2.5],
        ]);
        let plain = gershgorin_bounds(&q, None);
        for variant in [BoundVariant::Scaled, BoundVariant::Alpha, BoundVariant::ScaledAlpha] {
            let (_, hi) = optimize_scaling(BoundTarget::Constant(&q), variant, OptimizeObjective::MaxBound);
            let (_, lo) = optimize_scaling(BoundTarget::Constant(&q), variant, OptimizeObjective::MinBound);
            assert!(hi.sigma_max <= plain.sigma_max + 1e-12, "{variant}: {}", hi.sigma_max);
            assert!(lo.sigma_min >= plain.sigma_min - 1e-12, "{variant}: {}", lo.sigma_min);
        }
    }

    #[test]
    fn optimizer_is_deterministic() {
        let m = example2_model();
        let (s1, r1) = optimize_scaling(BoundTarget::Interval(&m), BoundVariant::ScaledAlpha, OptimizeObjective::MaxBound);
        let (s2, r2) = optimize_scaling(BoundTarget::Interval(&m), BoundVariant::ScaledAlpha, OptimizeObjective::MaxBound);
        assert_eq!(s1.d(), s2.d());
        assert_eq!(s1.alpha(), s2.alpha());
        assert_eq!(r1.sigma_max, r2.sigma_max);
    }

    #[test]
    fn optimizer_on_diagonal_matrix_returns_exact_extremes() {
        let q = mat(&[vec![-1.0, 0.0], vec![0.0, -2.0]]);
        let (_, rep) =
            optimize_scaling(BoundTarget::Constant(&q), BoundVariant::Scaled, OptimizeObjective::Both);
        assert_eq!((rep.sigma_min, rep.sigma_max), (-2.0, -1.0));
    }

    #[test]
    fn interval_optimizer_not_worse_than_plain_interval_bound() {
        let m = example2_model();
        let plain = interval_bounds(&m, None, false);
        let (_, rep) = optimize_scaling(BoundTarget::Interval(&m), BoundVariant::Scaled, OptimizeObjective::MaxBound);
        assert!(rep.sigma_max <= plain.sigma_max + 1e-12);
    }
}
