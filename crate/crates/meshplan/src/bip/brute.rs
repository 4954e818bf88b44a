//! Exhaustive reference solver.
//!
//! Walks all `2^n` assignments in lexicographic order (`x0` is the most
//! significant position), keeping the first assignment that attains the
//! best objective. It shares no code with the simplex path, which makes it
//! a genuinely independent oracle for cross-checking branch-and-bound on
//! small models.

use std::time::Instant;

use super::{
    BinaryProgram, Relation, Sense, Solution, SolveStats, SolveStatus, SolverError,
    BRUTE_FORCE_VAR_LIMIT,
};
use crate::scalar::Scalar;

pub(crate) fn solve<F: Scalar>(model: &BinaryProgram<F>) -> Result<Solution<F>, SolverError> {
    let n = model.num_vars();
    if n > BRUTE_FORCE_VAR_LIMIT {
        return Err(SolverError::TooManyVariables {
            num_vars: n,
            limit: BRUTE_FORCE_VAR_LIMIT,
        });
    }
    let start = Instant::now();
    let integral = model.has_integral_data();

    // x_j sits at bit n-1-j, so counting the code upward enumerates
    // assignments in lexicographic order and strict improvement keeps the
    // lexicographically smallest optimum.
    let bit = |code: u64, j: usize| (code >> (n - 1 - j)) & 1 == 1;

    struct IntRow {
        terms: Vec<(usize, i64)>,
        relation: Relation,
        rhs: i64,
    }
    let int_rows: Option<Vec<IntRow>> = integral.then(|| {
        model
            .constraints()
            .iter()
            .map(|c| IntRow {
                terms: c
                    .terms()
                    .iter()
                    .map(|&(j, coeff)| (j, coeff.to_f64().unwrap().round() as i64))
                    .collect(),
                relation: c.relation(),
                rhs: c.rhs().to_f64().unwrap().round() as i64,
            })
            .collect()
    });

    let feasible = |code: u64| -> bool {
        match &int_rows {
            Some(rows) => rows.iter().all(|row| {
                let lhs: i128 = row
                    .terms
                    .iter()
                    .filter(|&&(j, _)| bit(code, j))
                    .map(|&(_, coeff)| coeff as i128)
                    .sum();
                match row.relation {
                    Relation::Le => lhs <= row.rhs as i128,
                    Relation::Eq => lhs == row.rhs as i128,
                    Relation::Ge => lhs >= row.rhs as i128,
                }
            }),
            None => {
                let tol = F::from_f64(1e-6).unwrap();
                model.constraints().iter().all(|c| {
                    let lhs: F = c
                        .terms()
                        .iter()
                        .filter(|&&(j, _)| bit(code, j))
                        .map(|&(_, coeff)| coeff)
                        .sum();
                    let slack = tol * (F::one() + c.rhs().abs());
                    match c.relation() {
                        Relation::Le => lhs <= c.rhs() + slack,
                        Relation::Eq => (lhs - c.rhs()).abs() <= slack,
                        Relation::Ge => lhs >= c.rhs() - slack,
                    }
                })
            }
        }
    };

    let objective_of = |code: u64| -> F {
        model
            .objective()
            .iter()
            .enumerate()
            .filter(|&(j, _)| bit(code, j))
            .map(|(_, &c)| c)
            .sum()
    };

    let mut best: Option<(u64, F)> = None;
    let count: u64 = 1 << n;
    for code in 0..count {
        if !feasible(code) {
            continue;
        }
        let objective = objective_of(code);
        let better = match (best, model.sense()) {
            (None, _) => true,
            (Some((_, so_far)), Sense::Maximize) => objective > so_far,
            (Some((_, so_far)), Sense::Minimize) => objective < so_far,
        };
        if better {
            best = Some((code, objective));
        }
    }

    let stats = SolveStats { nodes: count, lp_iterations: 0, wall: start.elapsed() };
    Ok(match best {
        Some((code, objective)) => Solution {
            status: SolveStatus::Optimal,
            assignment: Some((0..n).map(|j| bit(code, j)).collect()),
            objective_value: Some(objective),
            stats,
        },
        None => Solution {
            status: SolveStatus::Infeasible,
            assignment: None,
            objective_value: None,
            stats,
        },
    })
}
