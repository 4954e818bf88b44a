//! Best-first branch-and-bound.
//!
//! Internally everything is maximized; minimize models enter with a
//! negated objective and leave with the sign restored. Nodes are ranked by
//! relaxation bound, with ties broken by branch variable index, branch
//! value one before zero, and finally recency, so two runs on the same
//! model expand the same tree. Candidate assignments only become
//! incumbents after an exact feasibility re-check, independent of the
//! floating-point relaxation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::{
    simplex, BinaryProgram, BranchRule, Solution, SolveStats, SolveStatus, SolverConfig,
    SolverError,
};
use crate::scalar::Scalar;

pub(crate) fn solve<F: Scalar>(
    model: &BinaryProgram<F>,
    config: &SolverConfig<F>,
) -> Result<Solution<F>, SolverError> {
    config.validate()?;
    let start = Instant::now();
    let objective = model.max_sense_objective();
    let integral = model.has_integral_data();

    let mut incumbent: Option<(Vec<bool>, F)> = None;
    let mut nodes = 0u64;
    let mut lp_iterations = 0u64;
    let mut heap: BinaryHeap<Open<F>> = BinaryHeap::new();
    let mut next_id = 0u64;
    let mut hit_limit = None;

    nodes += 1;
    let root_fixed = vec![Fix::Free; model.num_vars()];
    match evaluate(model, &objective, &root_fixed, None, config, &mut lp_iterations)? {
        NodeEval::Infeasible => {}
        NodeEval::Integral { assignment, objective } => incumbent = Some((assignment, objective)),
        NodeEval::Fractional { bound, branch_var } => heap.push(Open {
            bound,
            fixed: root_fixed,
            branch_var,
            came_var: 0,
            came_val: 1,
            id: 0,
        }),
    }

    'search: while let Some(node) = heap.pop() {
        if !improves(node.bound, &incumbent, integral, config.integrality_tolerance) {
            continue;
        }
        for val in [Fix::One, Fix::Zero] {
            if nodes >= config.max_nodes {
                hit_limit = Some(SolveStatus::NodeLimit);
                break 'search;
            }
            if start.elapsed().as_secs_f64() >= config.max_seconds {
                hit_limit = Some(SolveStatus::TimeLimit);
                break 'search;
            }
            let mut fixed = node.fixed.clone();
            fixed[node.branch_var] = val;
            nodes += 1;
            match evaluate(model, &objective, &fixed, Some(node.bound), config, &mut lp_iterations)? {
                NodeEval::Infeasible => {}
                NodeEval::Integral { assignment, objective } => {
                    let better = incumbent.as_ref().map_or(true, |&(_, best)| objective > best);
                    if better {
                        incumbent = Some((assignment, objective));
                    }
                }
                NodeEval::Fractional { bound, branch_var } => {
                    if improves(bound, &incumbent, integral, config.integrality_tolerance) {
                        next_id += 1;
                        heap.push(Open {
                            bound,
                            fixed,
                            branch_var,
                            came_var: node.branch_var,
                            came_val: if val == Fix::One { 1 } else { 0 },
                            id: next_id,
                        });
                    }
                }
            }
        }
    }

    let status = match hit_limit {
        Some(status) => status,
        None if incumbent.is_some() => SolveStatus::Optimal,
        None => SolveStatus::Infeasible,
    };
    let (assignment, objective_value) = match incumbent {
        Some((a, obj)) => (Some(a), Some(model.restore_sense(obj))),
        None => (None, None),
    };
    Ok(Solution {
        status,
        assignment,
        objective_value,
        stats: SolveStats { nodes, lp_iterations, wall: start.elapsed() },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fix {
    Free,
    Zero,
    One,
}

enum NodeEval<F> {
    Infeasible,
    Integral { assignment: Vec<bool>, objective: F },
    Fractional { bound: F, branch_var: usize },
}

/// Solves one node's relaxation and classifies the result.
///
/// The relaxation runs plain first. Should it hit its iteration guard
/// (heavily degenerate vertices can pin the pricing into enormous tie
/// blocks), it is retried once with perturbed variable bounds, which
/// separates the ties at the cost of a slightly looser bound. If even that
/// fails, the node falls back to branching on its first free variable under
/// the parent's bound, which stays valid and keeps the search exact; only a
/// root-level failure is a hard error.
fn evaluate<F: Scalar>(
    model: &BinaryProgram<F>,
    objective: &[F],
    fixed: &[Fix],
    parent_bound: Option<F>,
    config: &SolverConfig<F>,
    lp_iterations: &mut u64,
) -> Result<NodeEval<F>, SolverError> {
    let n = model.num_vars();
    let mut lower = vec![F::zero(); n];
    let mut upper = vec![F::one(); n];
    for (j, &fix) in fixed.iter().enumerate() {
        match fix {
            Fix::Free => {}
            Fix::Zero => upper[j] = F::zero(),
            Fix::One => lower[j] = F::one(),
        }
    }
    let mut attempt = simplex::maximize(
        model.constraints(),
        objective,
        &lower,
        &upper,
        config.lp_feasibility_tolerance,
        false,
    );
    if matches!(attempt, Err(SolverError::Numerical(_))) {
        attempt = simplex::maximize(
            model.constraints(),
            objective,
            &lower,
            &upper,
            config.lp_feasibility_tolerance,
            true,
        );
    }
    let lp = match attempt {
        Ok(lp) => lp,
        Err(SolverError::Numerical(detail)) => {
            let unresolved = parent_bound.and_then(|bound| {
                let branch_var = fixed.iter().position(|&f| f == Fix::Free)?;
                Some(NodeEval::Fractional { bound, branch_var })
            });
            return match unresolved {
                Some(eval) => Ok(eval),
                None => Err(SolverError::Numerical(detail)),
            };
        }
        Err(other) => return Err(other),
    };
    *lp_iterations += lp.iterations;
    if !lp.feasible {
        return Ok(NodeEval::Infeasible);
    }

    let int_tol = config.integrality_tolerance;
    match select_branch_var(&lp.x, int_tol, config.branching_rule) {
        Some(branch_var) => Ok(NodeEval::Fractional { bound: lp.objective, branch_var }),
        None => {
            let assignment: Vec<bool> =
                lp.x.iter().map(|&v| v > F::from_f64(0.5).unwrap()).collect();
            if model.is_feasible(&assignment) {
                let objective_value = objective
                    .iter()
                    .zip(&assignment)
                    .filter(|&(_, &set)| set)
                    .map(|(&c, _)| c)
                    .sum();
                Ok(NodeEval::Integral { assignment, objective: objective_value })
            } else {
                // The relaxation looked integral within tolerance but the
                // rounded point fails the exact check. Branch on the least
                // settled variable instead of accepting it.
                let fallback = least_settled(&lp.x, fixed);
                match fallback {
                    Some(branch_var) => {
                        Ok(NodeEval::Fractional { bound: lp.objective, branch_var })
                    }
                    None => Err(SolverError::Numerical(
                        "relaxation returned an integral point that fails exact \
                         feasibility"
                            .into(),
                    )),
                }
            }
        }
    }
}

fn select_branch_var<F: Scalar>(x: &[F], int_tol: F, rule: BranchRule) -> Option<usize> {
    let half = F::from_f64(0.5).unwrap();
    let mut best: Option<(F, usize)> = None;
    for (j, &v) in x.iter().enumerate() {
        if (v - v.round()).abs() <= int_tol {
            continue;
        }
        match rule {
            BranchRule::FirstFractional => return Some(j),
            BranchRule::MostFractional => {
                let score = (v - half).abs();
                if best.map_or(true, |(s, _)| score < s) {
                    best = Some((score, j));
                }
            }
        }
    }
    best.map(|(_, j)| j)
}

/// Fallback branching target: the free variable farthest from an integer.
fn least_settled<F: Scalar>(x: &[F], fixed: &[Fix]) -> Option<usize> {
    let mut best: Option<(F, usize)> = None;
    for (j, &v) in x.iter().enumerate() {
        if fixed[j] != Fix::Free {
            continue;
        }
        let dist = (v - v.round()).abs();
        if dist > F::zero() && best.map_or(true, |(s, _)| dist > s) {
            best = Some((dist, j));
        }
    }
    best.map(|(_, j)| j)
}

/// Could a node with this relaxation bound still beat the incumbent? With
/// all-integer data the bound is first rounded down, which prunes nodes
/// whose fractional headroom is less than one.
fn improves<F: Scalar>(
    bound: F,
    incumbent: &Option<(Vec<bool>, F)>,
    integral: bool,
    int_tol: F,
) -> bool {
    match incumbent {
        None => true,
        Some((_, best)) => {
            let best = *best;
            if integral {
                (bound + int_tol).floor() > best
            } else {
                bound > best + F::from_f64(1e-9).unwrap()
            }
        }
    }
}

struct Open<F> {
    bound: F,
    fixed: Vec<Fix>,
    branch_var: usize,
    came_var: usize,
    came_val: u8,
    id: u64,
}

impl<F: Scalar> Ord for Open<F> {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.bound.partial_cmp(&other.bound).unwrap_or(Ordering::Equal) {
            Ordering::Equal => {}
            ord => return ord,
        }
        match other.came_var.cmp(&self.came_var) {
            Ordering::Equal => {}
            ord => return ord,
        }
        match self.came_val.cmp(&other.came_val) {
            Ordering::Equal => {}
            ord => return ord,
        }
        self.id.cmp(&other.id)
    }
}

impl<F: Scalar> PartialOrd for Open<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<F: Scalar> PartialEq for Open<F> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<F: Scalar> Eq for Open<F> {}
