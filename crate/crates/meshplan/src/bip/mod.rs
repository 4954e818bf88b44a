//! Exact solver for bounded-size 0/1 integer linear programs.
//!
//! Models are plain binary programs: every variable is 0/1, the objective
//! and constraints are linear. [`BinaryProgram::solve_exact`] runs
//! best-first branch-and-bound over the simplex relaxation and returns a
//! provably optimal assignment; [`BinaryProgram::solve_bruteforce`] is an
//! independent exhaustive oracle for small models;
//! [`BinaryProgram::lp_relax`] exposes the relaxation itself. Solves are
//! deterministic: identical model and config give identical assignments,
//! node counts, and iteration counts.

mod branch_bound;
mod brute;
mod simplex;

use std::fmt;
use std::time::Duration;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid solver config: {0}")]
    InvalidConfig(String),
    #[error("brute force refused: {num_vars} variables exceeds the {limit}-variable guard")]
    TooManyVariables { num_vars: usize, limit: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// Objective direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Constraint relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

/// Sparse linear constraint `sum(coeff * x[index]) relation rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint<F> {
    terms: Vec<(usize, F)>,
    relation: Relation,
    rhs: F,
}

impl<F: Scalar> LinearConstraint<F> {
    /// Builds a constraint, sorting terms by variable index. Duplicate
    /// indices and non-finite numbers are rejected.
    pub fn new(
        mut terms: Vec<(usize, F)>,
        relation: Relation,
        rhs: F,
    ) -> Result<Self, SolverError> {
        if !rhs.is_finite() {
            return Err(SolverError::InvalidModel("constraint rhs is not finite".into()));
        }
        terms.sort_by_key(|&(index, _)| index);
        for pair in terms.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(SolverError::InvalidModel(format!(
                    "duplicate variable x{} in one constraint",
                    pair[0].0
                )));
            }
        }
        if let Some(&(index, _)) = terms.iter().find(|&&(_, c)| !c.is_finite()) {
            return Err(SolverError::InvalidModel(format!(
                "non-finite coefficient on x{index}"
            )));
        }
        Ok(Self { terms, relation, rhs })
    }

    pub fn le(terms: Vec<(usize, F)>, rhs: F) -> Result<Self, SolverError> {
        Self::new(terms, Relation::Le, rhs)
    }

    pub fn eq(terms: Vec<(usize, F)>, rhs: F) -> Result<Self, SolverError> {
        Self::new(terms, Relation::Eq, rhs)
    }

    pub fn ge(terms: Vec<(usize, F)>, rhs: F) -> Result<Self, SolverError> {
        Self::new(terms, Relation::Ge, rhs)
    }

    pub fn terms(&self) -> &[(usize, F)] {
        &self.terms
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn rhs(&self) -> F {
        self.rhs
    }
}

/// A 0/1 integer linear program.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryProgram<F> {
    num_vars: usize,
    sense: Sense,
    objective: Vec<F>,
    constraints: Vec<LinearConstraint<F>>,
    var_labels: Option<Vec<String>>,
}

impl<F: Scalar> BinaryProgram<F> {
    pub fn new(num_vars: usize, sense: Sense) -> Self {
        Self {
            num_vars,
            sense,
            objective: vec![F::zero(); num_vars],
            constraints: Vec::new(),
            var_labels: None,
        }
    }

    pub fn maximize(num_vars: usize) -> Self {
        Self::new(num_vars, Sense::Maximize)
    }

    pub fn minimize(num_vars: usize) -> Self {
        Self::new(num_vars, Sense::Minimize)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn objective(&self) -> &[F] {
        &self.objective
    }

    pub fn constraints(&self) -> &[LinearConstraint<F>] {
        &self.constraints
    }

    pub fn set_objective_coeff(&mut self, index: usize, coeff: F) -> Result<(), SolverError> {
        if index >= self.num_vars {
            return Err(SolverError::InvalidModel(format!(
                "objective index x{index} out of range for {} variables",
                self.num_vars
            )));
        }
        if !coeff.is_finite() {
            return Err(SolverError::InvalidModel(format!(
                "non-finite objective coefficient on x{index}"
            )));
        }
        self.objective[index] = coeff;
        Ok(())
    }

    pub fn add_constraint(&mut self, constraint: LinearConstraint<F>) -> Result<(), SolverError> {
        if let Some(&(index, _)) = constraint.terms.iter().find(|&&(i, _)| i >= self.num_vars) {
            return Err(SolverError::InvalidModel(format!(
                "constraint references x{index}, model has {} variables",
                self.num_vars
            )));
        }
        self.constraints.push(constraint);
        Ok(())
    }

    /// Attaches one label per variable, used by the text dump and decoders.
    pub fn set_var_labels(&mut self, labels: Vec<String>) -> Result<(), SolverError> {
        if labels.len() != self.num_vars {
            return Err(SolverError::InvalidModel(format!(
                "{} labels for {} variables",
                labels.len(),
                self.num_vars
            )));
        }
        self.var_labels = Some(labels);
        Ok(())
    }

    pub fn var_labels(&self) -> Option<&[String]> {
        self.var_labels.as_deref()
    }

    /// True when every objective coefficient, constraint coefficient, and
    /// rhs is an exact integer, which lets feasibility and objective checks
    /// run in integer arithmetic.
    pub fn has_integral_data(&self) -> bool {
        let is_int = |v: F| v.fract() == F::zero();
        self.objective.iter().all(|&c| is_int(c))
            && self.constraints.iter().all(|c| {
                is_int(c.rhs) && c.terms.iter().all(|&(_, coeff)| is_int(coeff))
            })
    }

    /// Solves the LP relaxation (variables in `[0, 1]`).
    pub fn lp_relax(&self, config: &SolverConfig<F>) -> Result<LpRelaxation<F>, SolverError> {
        config.validate()?;
        let objective = self.max_sense_objective();
        let lower = vec![F::zero(); self.num_vars];
        let upper = vec![F::one(); self.num_vars];
        let outcome = simplex::maximize(
            &self.constraints,
            &objective,
            &lower,
            &upper,
            config.lp_feasibility_tolerance,
            false,
        )?;
        Ok(match outcome.feasible {
            false => LpRelaxation::Infeasible,
            true => LpRelaxation::Optimal {
                bound: self.restore_sense(outcome.objective),
                assignment: outcome.x,
            },
        })
    }

    /// Exact optimum by best-first branch-and-bound.
    pub fn solve_exact(&self, config: &SolverConfig<F>) -> Result<Solution<F>, SolverError> {
        branch_bound::solve(self, config)
    }

    /// Exhaustive oracle over all `2^num_vars` assignments. Refused above
    /// [`BRUTE_FORCE_VAR_LIMIT`] variables.
    pub fn solve_bruteforce(&self) -> Result<Solution<F>, SolverError> {
        brute::solve(self)
    }

    /// Recomputes the objective of a full assignment.
    pub fn objective_of(&self, assignment: &[bool]) -> F {
        self.objective
            .iter()
            .zip(assignment)
            .filter(|&(_, &set)| set)
            .map(|(&c, _)| c)
            .sum()
    }

    /// Checks an assignment against every constraint. For integral models
    /// this is an exact integer-arithmetic check; otherwise a small
    /// tolerance absorbs floating-point noise.
    pub fn is_feasible(&self, assignment: &[bool]) -> bool {
        if assignment.len() != self.num_vars {
            return false;
        }
        if self.has_integral_data() {
            self.constraints.iter().all(|c| {
                let lhs: i128 = c
                    .terms
                    .iter()
                    .filter(|&&(index, _)| assignment[index])
                    .map(|&(_, coeff)| coeff.to_f64().unwrap().round() as i128)
                    .sum();
                let rhs = c.rhs.to_f64().unwrap().round() as i128;
                match c.relation {
                    Relation::Le => lhs <= rhs,
                    Relation::Eq => lhs == rhs,
                    Relation::Ge => lhs >= rhs,
                }
            })
        } else {
            let tol = F::from_f64(1e-6).unwrap();
            self.constraints.iter().all(|c| {
                let lhs: F = c
                    .terms
                    .iter()
                    .filter(|&&(index, _)| assignment[index])
                    .map(|&(_, coeff)| coeff)
                    .sum();
                let slack = tol * (F::one() + c.rhs.abs());
                match c.relation {
                    Relation::Le => lhs <= c.rhs + slack,
                    Relation::Eq => (lhs - c.rhs).abs() <= slack,
                    Relation::Ge => lhs >= c.rhs - slack,
                }
            })
        }
    }

    /// Plain-text dump of the model, loosely following LP file syntax.
    /// Intended for eyeballing and external cross-checks; the exact syntax
    /// is not a stable interface.
    pub fn to_lp_text(&self) -> String {
        use std::fmt::Write;

        fn push_terms<F: Scalar>(out: &mut String, terms: &mut dyn Iterator<Item = (usize, F)>) {
            let mut any = false;
            for (index, coeff) in terms {
                if coeff == F::zero() {
                    continue;
                }
                let magnitude = coeff.abs();
                if any {
                    out.push_str(if coeff < F::zero() { " - " } else { " + " });
                } else if coeff < F::zero() {
                    out.push_str("- ");
                }
                if magnitude != F::one() {
                    let _ = write!(out, "{} ", magnitude);
                }
                let _ = write!(out, "x{index}");
                any = true;
            }
            if !any {
                out.push('0');
            }
        }

        let mut out = String::new();
        out.push_str(match self.sense {
            Sense::Maximize => "Maximize\n obj: ",
            Sense::Minimize => "Minimize\n obj: ",
        });
        push_terms(&mut out, &mut self.objective.iter().copied().enumerate());
        out.push_str("\nSubject To\n");
        for (row, c) in self.constraints.iter().enumerate() {
            let _ = write!(out, " c{row}: ");
            push_terms(&mut out, &mut c.terms.iter().copied());
            let _ = writeln!(out, " {} {}", c.relation, c.rhs);
        }
        out.push_str("Binaries\n");
        for index in 0..self.num_vars {
            let _ = write!(out, " x{index}");
        }
        out.push_str("\nEnd\n");
        if let Some(labels) = &self.var_labels {
            for (index, label) in labels.iter().enumerate() {
                let _ = writeln!(out, "\\ x{index} = {label}");
            }
        }
        out
    }

    /// Objective coefficients flipped so the solver can always maximize.
    fn max_sense_objective(&self) -> Vec<F> {
        match self.sense {
            Sense::Maximize => self.objective.clone(),
            Sense::Minimize => self.objective.iter().map(|&c| -c).collect(),
        }
    }

    fn restore_sense(&self, max_sense_value: F) -> F {
        match self.sense {
            Sense::Maximize => max_sense_value,
            Sense::Minimize => -max_sense_value,
        }
    }
}

/// Result of [`BinaryProgram::lp_relax`].
#[derive(Debug, Clone, PartialEq)]
pub enum LpRelaxation<F> {
    /// Relaxation optimum; `bound` caps the integer optimum from the
    /// objective-sense side (above for maximize, below for minimize).
    Optimal { assignment: Vec<F>, bound: F },
    Infeasible,
}

/// Hard cap for [`BinaryProgram::solve_bruteforce`].
pub const BRUTE_FORCE_VAR_LIMIT: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    NodeLimit,
    TimeLimit,
}

impl SolveStatus {
    pub fn is_optimal(self) -> bool {
        self == SolveStatus::Optimal
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::NodeLimit => "node_limit",
            SolveStatus::TimeLimit => "time_limit",
        })
    }
}

/// Search statistics of one solve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Branch-and-bound nodes whose relaxation was solved (enumerated
    /// assignments for the brute-force oracle).
    pub nodes: u64,
    pub lp_iterations: u64,
    pub wall: Duration,
}

/// Outcome of an exact or brute-force solve.
///
/// `assignment`/`objective_value` hold the optimum when the status is
/// optimal, the best incumbent found when a limit stopped the search, and
/// nothing when the model is infeasible.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<F> {
    pub status: SolveStatus,
    pub assignment: Option<Vec<bool>>,
    pub objective_value: Option<F>,
    pub stats: SolveStats,
}

/// Branching variable selection inside branch-and-bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchRule {
    /// Branch on the variable closest to one half.
    MostFractional,
    /// Branch on the lowest-index fractional variable.
    #[default]
    FirstFractional,
}

/// Tolerances and limits for [`BinaryProgram::solve_exact`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<F> {
    /// A relaxation value within this distance of 0 or 1 counts as integral.
    pub integrality_tolerance: F,
    /// Feasibility slack used inside the simplex.
    pub lp_feasibility_tolerance: F,
    pub max_nodes: u64,
    pub max_seconds: f64,
    pub branching_rule: BranchRule,
}

impl<F: Scalar> Default for SolverConfig<F> {
    fn default() -> Self {
        Self {
            integrality_tolerance: F::from_f64(1e-6).unwrap(),
            lp_feasibility_tolerance: F::from_f64(1e-6).unwrap(),
            max_nodes: 20_000_000,
            max_seconds: 3_600.0,
            branching_rule: BranchRule::default(),
        }
    }
}

impl<F: Scalar> SolverConfig<F> {
    pub fn validate(&self) -> Result<(), SolverError> {
        let max_tol = F::from_f64(1e-4).unwrap();
        for (name, tol) in [
            ("integrality_tolerance", self.integrality_tolerance),
            ("lp_feasibility_tolerance", self.lp_feasibility_tolerance),
        ] {
            if !(tol > F::zero() && tol <= max_tol) {
                return Err(SolverError::InvalidConfig(format!(
                    "{name} must lie in (0, 1e-4], got {tol}"
                )));
            }
        }
        if self.max_nodes == 0 {
            return Err(SolverError::InvalidConfig("max_nodes must be positive".into()));
        }
        if !(self.max_seconds > 0.0) {
            return Err(SolverError::InvalidConfig("max_seconds must be positive".into()));
        }
        Ok(())
    }
}
