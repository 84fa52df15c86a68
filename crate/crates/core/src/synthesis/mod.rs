//! State-feedback gain synthesis for `ẋ = A(t)x + b(t)B₀u + F(t)f` via an
//! elementwise-linear feasibility program.
//!
//! With `Ψ = QAᵀ + AQ + YᵀBᵀ + BY + αQ + βFFᵀ`, the constraints
//!
//! * (a) `Ψ_ij ≥ 0` for `i ≠ j`,
//! * (b) `Ψ_ii + Σ_{j≠i} Ψ_ij ≤ −ε`,
//! * (c) `−s_ij ≤ Q_ij ≤ s_ij`,
//! * (d) `Q_ii − Σ_{j≠i} s_ij ≥ ε`,
//! * (e) `β ≥ ε`,
//! * (f) `Q_ii ≤ scale_cap`
//!
//! are linear in `(Q, Y, β, s)`. (a)+(b) force the disc upper bound of the
//! symmetric matrix `Ψ` below `−ε` (hence `Ψ ≺ 0`), and (c)+(d) force the
//! disc lower bound of `Q` above `ε` (hence `Q ≻ 0`); then `K = YQ⁻¹`
//! stabilizes the loop with decay rate `α/2`. Note (b) is deliberately
//! stronger than requiring negative diagonal entries alone, which would
//! not pin the sign of `λ_max(Ψ)`; the row-sum form is linear precisely
//! because (a) already fixes the off-diagonal signs. The normalization cap
//! (f) exists because (a)–(e) are invariant under scaling a feasible point
//! by any `c > 1`.
//!
//! Uncertain problems (`|ΔA_ij| ≤ m_ij`, `b ∈ [b̲, b̄]`) instantiate the
//! block at every parameter vertex — sufficient by convexity since the
//! constraints are affine in the parameters. Past `vertex_cap` uncertain
//! entries, a documented conservative fallback bounds each `ΔA`
//! contribution entrywise instead of enumerating vertices.

pub mod lp;
mod simplex;

pub use simplex::{solve_feasibility, SolveOutcome};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{MatrixError, RealMatrix};
use crate::oracle;
use lp::{LinearProgram, Relation};

pub const DEFAULT_SCALE_CAP: f64 = 1000.0;
pub const DEFAULT_VERTEX_CAP: usize = 16;

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error("ill-posed synthesis problem: {0}")]
    BadProblem(String),
    #[error(
        "{uncertain} uncertain entries exceed the vertex cap {cap} \
         (2^{uncertain} vertices); use the conservative per-entry mode"
    )]
    VertexExplosion { uncertain: usize, cap: usize },
    #[error("simplex stalled after {iterations} iterations")]
    Stalled { iterations: usize },
    #[error("feasibility program is infeasible (phase-1 violation mass {phase1_objective})")]
    Infeasible { phase1_objective: f64 },
    #[error("Q from the solver is numerically singular; certificate violated")]
    SingularQ,
    #[error("gain extraction residual {residual} exceeds tolerance")]
    GainResidual { residual: f64 },
    #[error("oracle failure during verification: {0}")]
    Oracle(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

fn default_scale_cap() -> f64 {
    DEFAULT_SCALE_CAP
}

fn default_vertex_cap() -> usize {
    DEFAULT_VERTEX_CAP
}

/// Synthesis input: `ẋ = (A₀ + ΔA(t))x + b(t)·B₀·u + F(t)f(t)` with
/// `|ΔA_ij(t)| ≤ deltaA_mag_ij`, `b(t) ∈ b_range`, `‖F(t)‖ ≤ F̄`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthesisProblem {
    #[serde(rename = "A0")]
    pub a0: RealMatrix,
    #[serde(rename = "deltaA_mag")]
    pub delta_a_mag: RealMatrix,
    #[serde(rename = "B0")]
    pub b0: Vec<Vec<f64>>,
    /// Scalar input-gain interval `[b̲, b̄]`; must not straddle zero.
    pub b_range: (f64, f64),
    #[serde(rename = "F_bar")]
    pub f_bar: f64,
    /// Decay rate `α` in `V̇ + αV + γfᵀf < 0`.
    pub alpha_rate: f64,
    /// Strictness margin `ε` for every inequality.
    pub epsilon: f64,
    #[serde(default = "default_scale_cap")]
    pub scale_cap: f64,
    /// Maximum number of uncertain `ΔA` entries enumerated as vertices.
    #[serde(default = "default_vertex_cap")]
    pub vertex_cap: usize,
}

impl SynthesisProblem {
    pub fn n(&self) -> usize {
        self.a0.n()
    }

    pub fn m_in(&self) -> usize {
        self.b0.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<(), SynthesisError> {
        let bad = |msg: String| Err(SynthesisError::BadProblem(msg));
        let n = self.n();
        if self.delta_a_mag.n() != n {
            return bad(format!("deltaA_mag is {}x{} but A0 is {n}x{n}", self.delta_a_mag.n(), self.delta_a_mag.n()));
        }
        if self.b0.len() != n {
            return bad(format!("B0 has {} rows, expected {n}", self.b0.len()));
        }
        let m = self.m_in();
        if m == 0 || self.b0.iter().any(|row| row.len() != m) {
            return bad("B0 must be a rectangular n x m matrix with m >= 1".into());
        }
        if self.b0.iter().flatten().any(|v| !v.is_finite()) {
            return bad("B0 entries must be finite".into());
        }
        for i in 0..n {
            for j in 0..n {
                if self.delta_a_mag.get(i, j) < 0.0 {
                    return bad(format!("deltaA_mag[{i},{j}] is negative"));
                }
            }
        }
        let (lo, hi) = self.b_range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return bad(format!("b_range [{lo}, {hi}] is not a valid interval"));
        }
        if !(lo > 0.0 || hi < 0.0) {
            return bad("b_range must be sign-definite (not contain 0)".into());
        }
        if !(self.f_bar >= 0.0 && self.f_bar.is_finite()) {
            return bad(format!("F_bar must be nonnegative, got {}", self.f_bar));
        }
        if !(self.alpha_rate > 0.0 && self.alpha_rate.is_finite()) {
            return bad(format!("alpha_rate must be positive, got {}", self.alpha_rate));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.scale_cap > 0.0 && self.scale_cap.is_finite()) {
            return bad(format!("scale_cap must be positive, got {}", self.scale_cap));
        }
        Ok(())
    }

    /// Positions `(i, j)` with a nonzero uncertainty magnitude, row-major.
    pub fn uncertain_entries(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.delta_a_mag.get(i, j) > 0.0 {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Deterministic variable layout shared by builders, decoders, and the
/// verifier: `Q` upper triangle (row-major, diagonal included), then `Y`
/// row-major, then `β`, then ordered off-diagonal `s_ij`.
#[derive(Debug, Clone)]
pub struct VarMap {
    n: usize,
    m_in: usize,
    q: Vec<Vec<usize>>,
    y: Vec<Vec<usize>>,
    beta: usize,
    s: Vec<Vec<Option<usize>>>,
    nvars: usize,
}

impl VarMap {
    pub fn new(n: usize, m_in: usize) -> Self {
        let mut q = vec![vec![0; n]; n];
        let mut idx = 0;
        for i in 0..n {
            for j in i..n {
                q[i][j] = idx;
                q[j][i] = idx;
                idx += 1;
            }
        }
        let mut y = vec![vec![0; n]; m_in];
        for yr in y.iter_mut() {
            for v in yr.iter_mut() {
                *v = idx;
                idx += 1;
            }
        }
        let beta = idx;
        idx += 1;
        let mut s = vec![vec![None; n]; n];
        for (i, si) in s.iter_mut().enumerate() {
            for (j, v) in si.iter_mut().enumerate() {
                if i != j {
                    *v = Some(idx);
                    idx += 1;
                }
            }
        }
        VarMap { n, m_in, q, y, beta, s, nvars: idx }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    fn q(&self, i: usize, j: usize) -> usize {
        self.q[i][j]
    }

    fn y(&self, r: usize, j: usize) -> usize {
        self.y[r][j]
    }

    fn s(&self, i: usize, j: usize) -> usize {
        self.s[i][j].expect("no s variable on the diagonal")
    }

    /// `|Q_kj|` bound as a variable: `s_kj` off the diagonal, `Q_jj` on it
    /// (sound because constraint (d) keeps the diagonal positive).
    fn s_tilde(&self, k: usize, j: usize) -> usize {
        if k == j {
            self.q(j, j)
        } else {
            self.s(k, j)
        }
    }

    fn declare(&self, lp: &mut LinearProgram) {
        for i in 0..self.n {
            for j in i..self.n {
                lp.add_var(format!("Q[{i},{j}]"));
            }
        }
        for r in 0..self.m_in {
            for j in 0..self.n {
                lp.add_var(format!("Y[{r},{j}]"));
            }
        }
        lp.add_var("beta");
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    lp.add_var(format!("s[{i},{j}]"));
                }
            }
        }
        debug_assert_eq!(lp.num_vars(), self.nvars);
    }

    /// Splits a solver assignment into `(Q, Y, β)`.
    pub fn decode(&self, x: &[f64]) -> (RealMatrix, Vec<Vec<f64>>, f64) {
        let mut q = RealMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                q.set(i, j, x[self.q(i, j)]);
            }
        }
        let y = (0..self.m_in)
            .map(|r| (0..self.n).map(|j| x[self.y(r, j)]).collect())
            .collect();
        (q, y, x[self.beta])
    }

    /// Inverse of `decode` with the minimal auxiliary choice
    /// `s_ij = |Q_ij|`.
    pub fn encode(&self, q: &RealMatrix, y: &[Vec<f64>], beta: f64) -> Vec<f64> {
        let mut x = vec![0.0; self.nvars];
        for i in 0..self.n {
            for j in i..self.n {
                x[self.q(i, j)] = 0.5 * (q.get(i, j) + q.get(j, i));
            }
        }
        for r in 0..self.m_in {
            for j in 0..self.n {
                x[self.y(r, j)] = y[r][j];
            }
        }
        x[self.beta] = beta;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    x[self.s(i, j)] = q.get(i, j).abs();
                }
            }
        }
        x
    }
}

fn sparse(dense: &[f64]) -> Vec<(usize, f64)> {
    dense.iter().enumerate().filter(|&(_, &c)| c != 0.0).map(|(j, &c)| (j, c)).collect()
}

/// Accumulates the coefficients of `Ψ_ij` into `dense`.
#[allow(clippy::too_many_arguments)]
fn add_psi(
    dense: &mut [f64],
    vm: &VarMap,
    a: &RealMatrix,
    b0: &[Vec<f64>],
    bscale: f64,
    fft: &RealMatrix,
    alpha_rate: f64,
    i: usize,
    j: usize,
) {
    for k in 0..vm.n {
        dense[vm.q(i, k)] += a.get(j, k); // (QAᵀ)_ij
        dense[vm.q(k, j)] += a.get(i, k); // (AQ)_ij
    }
    for r in 0..vm.m_in {
        dense[vm.y(r, j)] += bscale * b0[i][r]; // (BY)_ij
        dense[vm.y(r, i)] += bscale * b0[j][r]; // (YᵀBᵀ)_ij
    }
    dense[vm.q(i, j)] += alpha_rate;
    dense[vm.beta] += fft.get(i, j);
}

/// Accumulates `sign ×` (entrywise worst-case bound on the `ΔA`
/// contribution to `Φ_ij`): `Σ_k m_ik s̃_kj + Σ_k m_jk s̃_ki`.
fn add_worst(dense: &mut [f64], vm: &VarMap, mag: &RealMatrix, i: usize, j: usize, sign: f64) {
    for k in 0..vm.n {
        let mik = mag.get(i, k);
        if mik != 0.0 {
            dense[vm.s_tilde(k, j)] += sign * mik;
        }
        let mjk = mag.get(j, k);
        if mjk != 0.0 {
            dense[vm.s_tilde(k, i)] += sign * mjk;
        }
    }
}

/// Emits constraints (a) and (b) for one parameter realization.
#[allow(clippy::too_many_arguments)]
fn block_constraints(
    lp: &mut LinearProgram,
    vm: &VarMap,
    prefix: &str,
    a: &RealMatrix,
    b0: &[Vec<f64>],
    bscale: f64,
    fft: &RealMatrix,
    alpha_rate: f64,
    eps: f64,
    worst_mag: Option<&RealMatrix>,
) {
    let n = vm.n;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut dense = vec![0.0; vm.nvars];
            add_psi(&mut dense, vm, a, b0, bscale, fft, alpha_rate, i, j);
            if let Some(mag) = worst_mag {
                add_worst(&mut dense, vm, mag, i, j, -1.0);
            }
            lp.constrain(format!("{prefix}psi[{i},{j}]"), sparse(&dense), Relation::Ge, 0.0);
        }
    }
    for i in 0..n {
        let mut dense = vec![0.0; vm.nvars];
        for j in 0..n {
            add_psi(&mut dense, vm, a, b0, bscale, fft, alpha_rate, i, j);
            if let Some(mag) = worst_mag {
                add_worst(&mut dense, vm, mag, i, j, 1.0);
            }
        }
        lp.constrain(format!("{prefix}row[{i}]"), sparse(&dense), Relation::Le, -eps);
    }
}

/// Emits the parameter-independent constraints (c)–(f).
fn shared_constraints(lp: &mut LinearProgram, vm: &VarMap, eps: f64, scale_cap: f64) {
    let n = vm.n;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let q = vm.q(i, j);
            let s = vm.s(i, j);
            lp.constrain(format!("abs_hi[{i},{j}]"), vec![(q, 1.0), (s, -1.0)], Relation::Le, 0.0);
            lp.constrain(format!("abs_lo[{i},{j}]"), vec![(q, -1.0), (s, -1.0)], Relation::Le, 0.0);
        }
    }
    for i in 0..n {
        let mut coeffs = vec![(vm.q(i, i), 1.0)];
        for j in 0..n {
            if j != i {
                coeffs.push((vm.s(i, j), -1.0));
            }
        }
        lp.constrain(format!("qdom[{i}]"), coeffs, Relation::Ge, eps);
    }
    lp.constrain("beta_min", vec![(vm.beta, 1.0)], Relation::Ge, eps);
    for i in 0..n {
        lp.constrain(format!("qcap[{i}]"), vec![(vm.q(i, i), 1.0)], Relation::Le, scale_cap);
    }
}

fn outer_product(f: &[Vec<f64>], n: usize) -> Result<RealMatrix, SynthesisError> {
    if f.len() != n {
        return Err(SynthesisError::BadProblem(format!("F has {} rows, expected {n}", f.len())));
    }
    let p = f.first().map_or(0, Vec::len);
    if f.iter().any(|row| row.len() != p) {
        return Err(SynthesisError::BadProblem("F must be rectangular".into()));
    }
    let mut fft = RealMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            fft.set(i, j, (0..p).map(|k| f[i][k] * f[j][k]).sum());
        }
    }
    Ok(fft)
}

/// Feasibility program for constant `A`, `B` and disturbance matrix `F`
/// (`FFᵀ` enters the diagonal load). Uses the default normalization cap.
pub fn build_constant_program(
    a: &RealMatrix,
    b0: &[Vec<f64>],
    f: &[Vec<f64>],
    alpha_rate: f64,
    eps: f64,
) -> Result<LinearProgram, SynthesisError> {
    let n = a.n();
    let m_in = b0.first().map_or(0, Vec::len);
    if b0.len() != n || m_in == 0 || b0.iter().any(|row| row.len() != m_in) {
        return Err(SynthesisError::BadProblem("B must be a rectangular n x m matrix".into()));
    }
    if !(alpha_rate > 0.0 && eps > 0.0) {
        return Err(SynthesisError::BadProblem("alpha_rate and eps must be positive".into()));
    }
    let fft = outer_product(f, n)?;
    let vm = VarMap::new(n, m_in);
    let mut lp = LinearProgram::new();
    vm.declare(&mut lp);
    block_constraints(&mut lp, &vm, "", a, b0, 1.0, &fft, alpha_rate, eps, None);
    shared_constraints(&mut lp, &vm, eps, DEFAULT_SCALE_CAP);
    Ok(lp)
}

fn b_endpoints(p: &SynthesisProblem) -> Vec<f64> {
    let (lo, hi) = p.b_range;
    if lo == hi {
        vec![lo]
    } else {
        vec![lo, hi]
    }
}

/// Vertex program: the (a)+(b) block at every extreme point of the
/// parameter box (each uncertain `ΔA` entry at `±m_ij`, `b` at both ends).
pub fn build_vertex_program(p: &SynthesisProblem) -> Result<LinearProgram, SynthesisError> {
    p.validate()?;
    let uncertain = p.uncertain_entries();
    if uncertain.len() > p.vertex_cap {
        return Err(SynthesisError::VertexExplosion {
            uncertain: uncertain.len(),
            cap: p.vertex_cap,
        });
    }
    let n = p.n();
    let vm = VarMap::new(n, p.m_in());
    let mut lp = LinearProgram::new();
    vm.declare(&mut lp);
    let fft = RealMatrix::identity(n).scale(p.f_bar * p.f_bar);
    for mask in 0..(1usize << uncertain.len()) {
        let mut a = p.a0.clone();
        for (bit, &(i, j)) in uncertain.iter().enumerate() {
            let sign = if mask >> bit & 1 == 1 { 1.0 } else { -1.0 };
            a.set(i, j, a.get(i, j) + sign * p.delta_a_mag.get(i, j));
        }
        for (bi, bscale) in b_endpoints(p).into_iter().enumerate() {
            let prefix = format!("v{mask}b{bi}/");
            block_constraints(
                &mut lp, &vm, &prefix, &a, &p.b0, bscale, &fft, p.alpha_rate, p.epsilon, None,
            );
        }
    }
    shared_constraints(&mut lp, &vm, p.epsilon, p.scale_cap);
    Ok(lp)
}

/// Conservative fallback when vertex enumeration would explode: each
/// `ΔA` contribution to `Φ_ij` is bounded entrywise through the `s̃`
/// variables, so only the `b` endpoints are enumerated. Strictly more
/// conservative than the vertex program, but block count is 2 instead of
/// `2^(k+1)`.
pub fn build_per_entry_program(p: &SynthesisProblem) -> Result<LinearProgram, SynthesisError> {
    p.validate()?;
    let n = p.n();
    let vm = VarMap::new(n, p.m_in());
    let mut lp = LinearProgram::new();
    vm.declare(&mut lp);
    let fft = RealMatrix::identity(n).scale(p.f_bar * p.f_bar);
    let has_unc = !p.uncertain_entries().is_empty();
    let worst = has_unc.then_some(&p.delta_a_mag);
    for (bi, bscale) in b_endpoints(p).into_iter().enumerate() {
        let prefix = format!("pe_b{bi}/");
        block_constraints(
            &mut lp, &vm, &prefix, &p.a0, &p.b0, bscale, &fft, p.alpha_rate, p.epsilon, worst,
        );
    }
    shared_constraints(&mut lp, &vm, p.epsilon, p.scale_cap);
    Ok(lp)
}

/// Solves `A·x = rhs` for each right-hand side by Gaussian elimination
/// with partial pivoting; `None` when a pivot collapses.
fn solve_columns(a: &RealMatrix, rhs: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.n();
    let ncols = rhs.len();
    let mut aug = vec![vec![0.0; n + ncols]; n];
    for i in 0..n {
        for j in 0..n {
            aug[i][j] = a.get(i, j);
        }
        for (c, col) in rhs.iter().enumerate() {
            aug[i][n + c] = col[i];
        }
    }
    let scale = a.max_abs().max(1.0);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| aug[r1][col].abs().total_cmp(&aug[r2][col].abs()))
            .unwrap();
        if aug[pivot_row][col].abs() < 1e-12 * scale {
            return None;
        }
        aug.swap(col, pivot_row);
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = aug[r][col] / aug[col][col];
            if factor != 0.0 {
                for c in col..(n + ncols) {
                    aug[r][c] -= factor * aug[col][c];
                }
            }
        }
    }
    let mut out = vec![vec![0.0; n]; ncols];
    for (c, col) in out.iter_mut().enumerate() {
        for (i, v) in col.iter_mut().enumerate() {
            *v = aug[i][n + c] / aug[i][i];
        }
    }
    Some(out)
}

/// `K = YQ⁻¹` and `P = Q⁻¹` from a certificate `(Q, Y)`. Fails if `Q` is
/// numerically singular or the solve residual `‖KQ − Y‖` exceeds
/// `1e−9·max(1, ‖Y‖)`.
pub fn extract_gain(
    q: &RealMatrix,
    y: &[Vec<f64>],
) -> Result<(Vec<Vec<f64>>, RealMatrix), SynthesisError> {
    let n = q.n();
    // K rows: Q kᵣᵀ = yᵣᵀ (Q symmetric), plus the n unit columns for P.
    let mut rhs: Vec<Vec<f64>> = y.to_vec();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        rhs.push(e);
    }
    let solved = solve_columns(q, &rhs).ok_or(SynthesisError::SingularQ)?;
    let k: Vec<Vec<f64>> = solved[..y.len()].to_vec();
    let mut p_inv = RealMatrix::zeros(n);
    for (c, col) in solved[y.len()..].iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            // Symmetrize against elimination roundoff.
            p_inv.set(i, c, v);
        }
    }
    let p_inv = p_inv.add(&p_inv.transpose()).scale(0.5);

    let mut residual = 0.0_f64;
    let mut y_norm = 0.0_f64;
    for (r, yr) in y.iter().enumerate() {
        for j in 0..n {
            let kq: f64 = (0..n).map(|l| k[r][l] * q.get(l, j)).sum();
            residual += (kq - yr[j]).powi(2);
            y_norm += yr[j] * yr[j];
        }
    }
    let residual = residual.sqrt();
    if residual > 1e-9 * y_norm.sqrt().max(1.0) {
        return Err(SynthesisError::GainResidual { residual });
    }
    Ok((k, p_inv))
}

/// Which program the solution came from; `PerEntry` results carry extra
/// conservatism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ProgramMode {
    Vertex { blocks: usize },
    PerEntry,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlackRecord {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthesisResult {
    /// Feedback gain `K = YQ⁻¹` (m×n).
    pub k: Vec<Vec<f64>>,
    pub q: RealMatrix,
    pub y: Vec<Vec<f64>>,
    pub beta: f64,
    /// Independently re-evaluated slack of every program constraint at
    /// the returned point (all ≥ 0 up to solver tolerance).
    pub slacks: Vec<SlackRecord>,
    pub mode: ProgramMode,
    /// `trace(Q⁻¹)`, reported for reference.
    pub trace_p: f64,
}

impl SynthesisResult {
    pub fn min_slack(&self) -> f64 {
        self.slacks.iter().map(|s| s.value).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SynthesisOptions {
    /// Run a phase-2 pass minimizing `Σ Q_ii` (heuristic normalization;
    /// plain feasibility is the default).
    pub minimize_trace: bool,
    /// Use the conservative per-entry program even when vertex
    /// enumeration would fit the cap.
    pub force_per_entry: bool,
}

pub fn synthesize(p: &SynthesisProblem) -> Result<SynthesisResult, SynthesisError> {
    synthesize_with(p, SynthesisOptions::default())
}

pub fn synthesize_with(
    p: &SynthesisProblem,
    opts: SynthesisOptions,
) -> Result<SynthesisResult, SynthesisError> {
    p.validate()?;
    let (lp, mode) = if opts.force_per_entry {
        (build_per_entry_program(p)?, ProgramMode::PerEntry)
    } else {
        let lp = build_vertex_program(p)?;
        let blocks = (1usize << p.uncertain_entries().len()) * b_endpoints(p).len();
        (lp, ProgramMode::Vertex { blocks })
    };
    let vm = VarMap::new(p.n(), p.m_in());
    let cost = opts.minimize_trace.then(|| {
        let mut c = vec![0.0; vm.nvars()];
        for i in 0..p.n() {
            c[vm.q(i, i)] = 1.0;
        }
        c
    });
    let x = match solve_feasibility(&lp, cost.as_deref())? {
        SolveOutcome::Feasible(x) => x,
        SolveOutcome::Infeasible { phase1_objective } => {
            return Err(SynthesisError::Infeasible { phase1_objective });
        }
    };
    let (q, y, beta) = vm.decode(&x);
    let (k, p_inv) = extract_gain(&q, &y)?;
    let slacks = lp
        .constraints
        .iter()
        .map(|c| SlackRecord { label: c.label.clone(), value: c.slack(&x) })
        .collect();
    let trace_p = (0..p.n()).map(|i| p_inv.get(i, i)).sum();
    Ok(SynthesisResult { k, q, y, beta, slacks, mode, trace_p })
}

/// Independent check of a synthesis result: certificate consistency
/// (`KQ = Y`), re-evaluated program slacks, and sampled closed-loop
/// spectra through the eigenvalue oracle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub certificate_ok: bool,
    pub min_slack: f64,
    pub tight_constraint: Option<String>,
    /// Labels of violated checks (empty for a sound certificate).
    pub broken: Vec<String>,
    pub samples: usize,
    pub unstable_samples: usize,
    pub max_closed_loop_re: f64,
    /// `‖K·Q − Y‖` — nonzero when the gain was tampered with.
    pub gain_consistency: f64,
}

/// Closed-loop matrix `A₀ + ΔA + b·B₀K` for one realization of the
/// uncertainty (`delta` entrywise inside the magnitude bounds, `b` inside
/// the input-gain interval).
pub fn closed_loop(p: &SynthesisProblem, delta: &RealMatrix, b: f64, k: &[Vec<f64>]) -> RealMatrix {
    let n = p.n();
    let mut a = p.a0.add(delta);
    for i in 0..n {
        for j in 0..n {
            let bk: f64 = (0..p.m_in()).map(|r| p.b0[i][r] * k[r][j]).sum();
            a.set(i, j, a.get(i, j) + b * bk);
        }
    }
    a
}

pub fn verify_synthesis(
    p: &SynthesisProblem,
    result: &SynthesisResult,
    seed: u64,
    samples: usize,
) -> Result<VerificationReport, SynthesisError> {
    p.validate()?;
    let lp = match result.mode {
        ProgramMode::Vertex { .. } => build_vertex_program(p)?,
        ProgramMode::PerEntry => build_per_entry_program(p)?,
    };
    let vm = VarMap::new(p.n(), p.m_in());
    let x = vm.encode(&result.q, &result.y, result.beta);
    let mut broken = Vec::new();

    // (1) The stored gain must actually be Y·Q⁻¹.
    let mut gain_consistency = 0.0_f64;
    let mut y_norm = 0.0_f64;
    for (r, yr) in result.y.iter().enumerate() {
        for j in 0..p.n() {
            let kq: f64 = (0..p.n()).map(|l| result.k[r][l] * result.q.get(l, j)).sum();
            gain_consistency += (kq - yr[j]).powi(2);
            y_norm += yr[j] * yr[j];
        }
    }
    let gain_consistency = gain_consistency.sqrt();
    if gain_consistency > 1e-6 * y_norm.sqrt().max(1.0) {
        broken.push("gain/KQ=Y consistency".into());
    }

    // (2) Every program constraint re-evaluated at the certificate.
    let mut min_slack = f64::INFINITY;
    let mut tight_constraint = None;
    for c in &lp.constraints {
        let s = c.slack(&x);
        if s < min_slack {
            min_slack = s;
            tight_constraint = Some(c.label.clone());
        }
        if s < -1e-9 {
            broken.push(c.label.clone());
        }
    }

    // (3) Sampled interior realizations must be closed-loop stable.
    let mut rng = oracle::Rng::new(seed);
    let mut unstable_samples = 0;
    let mut max_closed_loop_re = f64::NEG_INFINITY;
    let (blo, bhi) = p.b_range;
    for _ in 0..samples {
        let mut delta = RealMatrix::zeros(p.n());
        for i in 0..p.n() {
            for j in 0..p.n() {
                let m = p.delta_a_mag.get(i, j);
                if m > 0.0 {
                    delta.set(i, j, rng.uniform(-m, m));
                }
            }
        }
        let b = if blo < bhi { rng.uniform(blo, bhi) } else { blo };
        let a_cl = closed_loop(p, &delta, b, &result.k);
        let max_re = oracle::eigenvalues_fast(&a_cl)
            .map_err(|e| SynthesisError::Oracle(e.to_string()))?
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        max_closed_loop_re = max_closed_loop_re.max(max_re);
        if max_re >= 0.0 {
            unstable_samples += 1;
        }
    }
    if max_closed_loop_re == f64::NEG_INFINITY {
        max_closed_loop_re = f64::NAN;
    }

    Ok(VerificationReport {
        certificate_ok: broken.is_empty() && unstable_samples == 0,
        min_slack,
        tight_constraint,
        broken,
        samples,
        unstable_samples,
        max_closed_loop_re,
        gain_consistency,
    })
}
