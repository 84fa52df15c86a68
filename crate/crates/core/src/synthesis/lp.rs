//! A tiny linear-program container: named variables, labeled `≤`/`≥`
//! constraints with sparse coefficient rows. Deliberately solver-agnostic;
//! `simplex` consumes it.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Le,
    Ge,
}

/// `Σ coeffs[k].1 · x[coeffs[k].0]  REL  bound`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Constraint {
    pub label: String,
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub bound: f64,
}

impl Constraint {
    pub fn lhs(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, c)| c * x[j]).sum()
    }

    /// Nonnegative iff the constraint is satisfied at `x`.
    pub fn slack(&self, x: &[f64]) -> f64 {
        match self.relation {
            Relation::Le => self.bound - self.lhs(x),
            Relation::Ge => self.lhs(x) - self.bound,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LinearProgram {
    variables: Vec<String>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>) -> usize {
        self.variables.push(name.into());
        self.variables.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.variables
    }

    /// Adds a constraint, merging duplicate variable indices and dropping
    /// exact zero coefficients.
    pub fn constrain(
        &mut self,
        label: impl Into<String>,
        coeffs: Vec<(usize, f64)>,
        relation: Relation,
        bound: f64,
    ) {
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(coeffs.len());
        for (j, c) in coeffs {
            assert!(j < self.variables.len(), "coefficient on undeclared variable {j}");
            assert!(c.is_finite(), "non-finite coefficient {c} on variable {j}");
            match merged.iter_mut().find(|(k, _)| *k == j) {
                Some((_, acc)) => *acc += c,
                None => merged.push((j, c)),
            }
        }
        merged.retain(|&(_, c)| c != 0.0);
        merged.sort_by_key(|&(j, _)| j);
        assert!(bound.is_finite(), "non-finite bound {bound}");
        self.constraints.push(Constraint { label: label.into(), coeffs: merged, relation, bound });
    }

    /// Smallest slack over all constraints at `x` (∞ when empty), paired
    /// with the label of the tightest constraint.
    pub fn min_slack(&self, x: &[f64]) -> (f64, Option<&str>) {
        let mut best = f64::INFINITY;
        let mut label = None;
        for c in &self.constraints {
            let s = c.slack(x);
            if s < best {
                best = s;
                label = Some(c.label.as_str());
            }
        }
        (best, label)
    }
}
