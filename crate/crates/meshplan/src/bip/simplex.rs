//! Bounded-variable primal simplex on a dense tableau.
//!
//! Two phases share one tableau: phase one drives artificial variables to
//! zero (or proves infeasibility), phase two maximizes the real objective.
//! Variables live between explicit bounds, so 0/1 boxes and branch fixings
//! need no extra constraint rows. Pricing uses Devex reference weights with
//! a switch to Bland's rule after a run of degenerate steps, which keeps
//! the method finite. Every choice breaks ties by index, making the
//! iteration sequence a pure function of the input.

use super::{LinearConstraint, Relation, SolverError};
use crate::scalar::Scalar;

pub(crate) struct LpOutcome<F> {
    pub feasible: bool,
    /// Structural variable values; empty when infeasible.
    pub x: Vec<F>,
    /// Maximized objective value; zero when infeasible.
    pub objective: F,
    pub iterations: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColState {
    Basic,
    AtLower,
    AtUpper,
}

/// How many consecutive degenerate pivots trigger Bland's rule.
const DEGENERATE_RUN_LIMIT: u32 = 100;

struct Tableau<F> {
    width: usize,
    rows: usize,
    /// Row-major `rows x width` coefficient matrix, kept equal to
    /// `B^-1 A` for the current basis.
    a: Vec<F>,
    /// Reduced costs of the phase-one objective (minus the artificial sum).
    d1: Vec<F>,
    /// Reduced costs of the real objective.
    d2: Vec<F>,
    lower: Vec<F>,
    upper: Vec<F>,
    state: Vec<ColState>,
    /// Basic column per row.
    basis: Vec<usize>,
    /// Current values of the basic columns.
    x_b: Vec<F>,
    is_artificial: Vec<bool>,
}

/// Maximizes `objective` over the constraints and variable bounds.
///
/// With `perturb` set, every non-artificial column's bounds are widened by
/// a unique tiny offset before solving. That leaves almost no basic
/// solution degenerate, so the ratio test makes strictly positive steps
/// instead of stalling on massive tie blocks. The reported objective is
/// taken at the perturbed optimum (a valid upper bound on the true one,
/// since the box only grew), while the returned point is clamped back into
/// the true bounds.
pub(crate) fn maximize<F: Scalar>(
    constraints: &[LinearConstraint<F>],
    objective: &[F],
    lower: &[F],
    upper: &[F],
    feas_tol: F,
    perturb: bool,
) -> Result<LpOutcome<F>, SolverError> {
    let n = objective.len();
    debug_assert_eq!(lower.len(), n);
    debug_assert_eq!(upper.len(), n);
    if lower.iter().zip(upper).any(|(&l, &u)| l > u) {
        return Ok(LpOutcome { feasible: false, x: Vec::new(), objective: F::zero(), iterations: 0 });
    }

    let widened: Option<(Vec<F>, Vec<F>)> = perturb.then(|| {
        let delta = offset_sequence::<F>(n);
        let wl = lower.iter().zip(&delta).map(|(&l, &d)| l - d).collect();
        let wu = upper.iter().zip(&delta).map(|(&u, &d)| u + d).collect();
        (wl, wu)
    });
    let (solve_lower, solve_upper): (&[F], &[F]) = match &widened {
        Some((wl, wu)) => (wl, wu),
        None => (lower, upper),
    };

    let mut t = build_tableau(constraints, objective, solve_lower, solve_upper);
    let mut iterations = 0u64;
    // The plain pass gets a short leash: a healthy solve finishes in a few
    // multiples of the tableau size, and a stall is better spent retrying
    // perturbed. The perturbed pass is the stall-breaker of last resort, so
    // it gets a generous budget.
    let size = t.rows as u64 + t.width as u64;
    let max_iterations = if perturb { 60 * size + 10_000 } else { 12 * size + 3_000 };

    run_phase(&mut t, Phase::One, feas_tol, &mut iterations, max_iterations)?;
    let infeasibility: F = (0..t.rows)
        .filter(|&i| t.is_artificial[t.basis[i]])
        .map(|i| t.x_b[i].abs())
        .sum();
    if infeasibility > feas_tol {
        return Ok(LpOutcome { feasible: false, x: Vec::new(), objective: F::zero(), iterations });
    }

    // Pin every artificial at zero for phase two. Those still basic sit at
    // (numerically) zero and get pivoted out degenerately if their row is
    // ever needed.
    for col in 0..t.width {
        if t.is_artificial[col] {
            t.upper[col] = F::zero();
        }
    }
    for i in 0..t.rows {
        if t.is_artificial[t.basis[i]] {
            t.x_b[i] = F::zero();
        }
    }

    run_phase(&mut t, Phase::Two, feas_tol, &mut iterations, max_iterations)?;

    let mut x = vec![F::zero(); n];
    for j in 0..n {
        x[j] = match t.state[j] {
            ColState::AtLower => t.lower[j],
            ColState::AtUpper => t.upper[j],
            ColState::Basic => F::zero(),
        };
    }
    for i in 0..t.rows {
        if t.basis[i] < n {
            x[t.basis[i]] = t.x_b[i];
        }
    }
    // The objective is read at the solved optimum, before clamping: under
    // perturbation the clamped point can score below the true relaxation
    // optimum, which would make the value unsafe as a search bound.
    let objective_value = objective.iter().zip(&x).map(|(&c, &v)| c * v).sum();
    for j in 0..n {
        x[j] = x[j].max(lower[j]).min(upper[j]);
    }
    Ok(LpOutcome { feasible: true, x, objective: objective_value, iterations })
}

/// Deterministic, well-spread tiny offsets (golden-ratio low-discrepancy
/// sequence scaled to about 1e-7) used to widen variable bounds.
fn offset_sequence<F: Scalar>(n: usize) -> Vec<F> {
    let phi = 0.618_033_988_749_894_9_f64;
    let base = 1e-7_f64;
    (0..n)
        .map(|j| {
            let spread = ((j + 1) as f64 * phi).fract();
            F::from_f64(base * (0.5 + spread)).unwrap()
        })
        .collect()
}

fn build_tableau<F: Scalar>(
    constraints: &[LinearConstraint<F>],
    objective: &[F],
    lower: &[F],
    upper: &[F],
) -> Tableau<F> {
    let n = objective.len();
    let m = constraints.len();

    // Residual of each row at the initial point (structurals at lower bound)
    // decides whether its slack can start basic or an artificial is needed.
    let mut residual = Vec::with_capacity(m);
    for c in constraints {
        let dot: F = c.terms().iter().map(|&(j, a)| a * lower[j]).sum();
        residual.push(c.rhs() - dot);
    }

    let mut slack_col = vec![usize::MAX; m];
    let mut art_col = vec![usize::MAX; m];
    let mut next = n;
    for (i, c) in constraints.iter().enumerate() {
        if c.relation() != Relation::Eq {
            slack_col[i] = next;
            next += 1;
        }
    }
    let needs_artificial = |i: usize| match constraints[i].relation() {
        Relation::Eq => true,
        Relation::Le => residual[i] < F::zero(),
        Relation::Ge => residual[i] > F::zero(),
    };
    for i in 0..m {
        if needs_artificial(i) {
            art_col[i] = next;
            next += 1;
        }
    }
    let width = next;

    let mut t = Tableau {
        width,
        rows: m,
        a: vec![F::zero(); m * width],
        d1: vec![F::zero(); width],
        d2: vec![F::zero(); width],
        lower: vec![F::zero(); width],
        upper: vec![F::zero(); width],
        state: vec![ColState::AtLower; width],
        basis: vec![usize::MAX; m],
        x_b: vec![F::zero(); m],
        is_artificial: vec![false; width],
    };
    t.lower[..n].copy_from_slice(lower);
    t.upper[..n].copy_from_slice(upper);
    for i in 0..m {
        let c = &constraints[i];
        if slack_col[i] != usize::MAX {
            let s = slack_col[i];
            match c.relation() {
                Relation::Le => {
                    t.lower[s] = F::zero();
                    t.upper[s] = F::infinity();
                }
                Relation::Ge => {
                    t.lower[s] = F::neg_infinity();
                    t.upper[s] = F::zero();
                }
                Relation::Eq => unreachable!(),
            }
        }
        if art_col[i] != usize::MAX {
            let a = art_col[i];
            t.lower[a] = F::zero();
            t.upper[a] = F::infinity();
            t.is_artificial[a] = true;
        }
    }

    for (i, c) in constraints.iter().enumerate() {
        // Rows starting with a basic artificial are stored scaled by the
        // violation sign so the basic entry is +1 and its value |residual|.
        let sigma = if art_col[i] != usize::MAX && residual[i] < F::zero() {
            -F::one()
        } else {
            F::one()
        };
        let row = &mut t.a[i * t.width..(i + 1) * t.width];
        for &(j, coeff) in c.terms() {
            row[j] = sigma * coeff;
        }
        if slack_col[i] != usize::MAX {
            row[slack_col[i]] = sigma;
        }
        if art_col[i] != usize::MAX {
            row[art_col[i]] = F::one();
            t.basis[i] = art_col[i];
            t.x_b[i] = residual[i].abs();
            t.state[art_col[i]] = ColState::Basic;
            let s = slack_col[i];
            if s != usize::MAX {
                t.state[s] = match c.relation() {
                    Relation::Le => ColState::AtLower,
                    Relation::Ge => ColState::AtUpper,
                    Relation::Eq => unreachable!(),
                };
            }
        } else {
            t.basis[i] = slack_col[i];
            t.x_b[i] = residual[i];
            t.state[slack_col[i]] = ColState::Basic;
        }
    }

    // Reduced costs for the initial basis. Phase one maximizes minus the
    // artificial sum; each basic artificial row contributes its tableau row.
    for i in 0..m {
        if art_col[i] != usize::MAX {
            let row = &t.a[i * t.width..(i + 1) * t.width];
            for (dj, &aj) in t.d1.iter_mut().zip(row) {
                *dj += aj;
            }
        }
    }
    for j in 0..width {
        if t.is_artificial[j] {
            t.d1[j] -= F::one();
        }
    }
    t.d2[..n].copy_from_slice(objective);
    t
}

#[derive(Clone, Copy, PartialEq)]
enum Phase {
    One,
    Two,
}

fn run_phase<F: Scalar>(
    t: &mut Tableau<F>,
    phase: Phase,
    feas_tol: F,
    iterations: &mut u64,
    max_iterations: u64,
) -> Result<(), SolverError> {
    let d_tol = F::from_f64(1e-9).unwrap().max(F::epsilon() * F::from_f64(64.0).unwrap());
    let pivot_tol = F::from_f64(1e-9).unwrap().max(F::epsilon() * F::from_f64(256.0).unwrap());
    let mut bland = false;
    let mut degenerate_run = 0u32;
    let mut column = vec![F::zero(); t.rows];
    let mut pivot_row_copy = vec![F::zero(); t.width];
    // Devex reference weights; reset whenever they grow stale.
    let mut weights = vec![F::one(); t.width];
    let weight_cap = F::from_f64(1e12).unwrap();

    loop {
        if *iterations > max_iterations {
            return Err(SolverError::Numerical(format!(
                "simplex exceeded {max_iterations} iterations"
            )));
        }
        // Phase one only has to reach feasibility, not reduced-cost
        // optimality: once every artificial sits at zero, stop. Equality
        // rows whose artificial starts at zero would otherwise invite long
        // runs of degenerate shuffling.
        if phase == Phase::One {
            let infeasibility: F = (0..t.rows)
                .filter(|&i| t.is_artificial[t.basis[i]])
                .map(|i| t.x_b[i].abs())
                .sum();
            if infeasibility <= feas_tol {
                return Ok(());
            }
        }
        let d: &[F] = match phase {
            Phase::One => &t.d1,
            Phase::Two => &t.d2,
        };
        let entering = choose_entering(t, d, &weights, d_tol, bland);
        let Some(q) = entering else {
            return Ok(());
        };
        let dir = match t.state[q] {
            ColState::AtLower => F::one(),
            ColState::AtUpper => -F::one(),
            ColState::Basic => unreachable!("basic column priced"),
        };
        for i in 0..t.rows {
            column[i] = t.a[i * t.width + q];
        }

        // Ratio test: the entering variable moves by `step` until its own
        // opposite bound or some basic variable's bound blocks it.
        let own_cap = t.upper[q] - t.lower[q];
        let mut best: Option<Block<F>> = None;
        for i in 0..t.rows {
            let a = column[i];
            if a.abs() <= pivot_tol {
                continue;
            }
            let delta = -dir * a;
            let bi = t.basis[i];
            let (limit, to_upper) = if delta < F::zero() {
                (t.lower[bi], false)
            } else {
                (t.upper[bi], true)
            };
            if limit.is_infinite() {
                continue;
            }
            let room = if to_upper { limit - t.x_b[i] } else { t.x_b[i] - limit };
            let ratio = (room / delta.abs()).max(F::zero());
            let candidate = Block { ratio, pivot_abs: a.abs(), row: i, var: bi, to_upper };
            best = Some(match best {
                None => candidate,
                Some(b) => pick_block(b, candidate, pivot_tol, bland),
            });
        }

        let step = match &best {
            Some(b) => b.ratio.min(own_cap),
            None if own_cap.is_infinite() => {
                return Err(SolverError::Numerical(
                    "unbounded improving direction in relaxation".into(),
                ))
            }
            None => own_cap,
        };

        *iterations += 1;
        // Any strictly positive step raises the objective, which already
        // rules out cycling; Bland's rule is needed only against runs of
        // exactly-zero steps.
        if step > F::zero() {
            degenerate_run = 0;
            bland = false;
        } else {
            degenerate_run += 1;
            if degenerate_run >= DEGENERATE_RUN_LIMIT {
                bland = true;
            }
        }

        for i in 0..t.rows {
            t.x_b[i] = t.x_b[i] - dir * step * column[i];
        }
        match best {
            Some(b) if b.ratio <= own_cap => {
                // Basis change: the blocking variable leaves to the bound it
                // hit, the entering column is eliminated everywhere else.
                let enter_val = match t.state[q] {
                    ColState::AtLower => t.lower[q] + step,
                    ColState::AtUpper => t.upper[q] - step,
                    ColState::Basic => unreachable!(),
                };
                t.state[b.var] = if b.to_upper { ColState::AtUpper } else { ColState::AtLower };
                t.state[q] = ColState::Basic;
                t.basis[b.row] = q;
                t.x_b[b.row] = enter_val;

                let piv = column[b.row];
                let row_start = b.row * t.width;
                pivot_row_copy.copy_from_slice(&t.a[row_start..row_start + t.width]);
                let inv = F::one() / piv;
                for v in pivot_row_copy.iter_mut() {
                    *v *= inv;
                }
                t.a[row_start..row_start + t.width].copy_from_slice(&pivot_row_copy);
                for i in 0..t.rows {
                    if i == b.row {
                        continue;
                    }
                    let f = column[i];
                    if f == F::zero() {
                        continue;
                    }
                    let row = &mut t.a[i * t.width..(i + 1) * t.width];
                    for (dst, &src) in row.iter_mut().zip(&pivot_row_copy) {
                        *dst = *dst - f * src;
                    }
                    row[q] = F::zero();
                }
                if phase == Phase::One {
                    eliminate_cost_row(&mut t.d1, &pivot_row_copy, q);
                }
                eliminate_cost_row(&mut t.d2, &pivot_row_copy, q);

                // Devex update (Forrest-Goldfarb): the normalized pivot row
                // carries the entering column's alignment with every other
                // column in the new basis.
                let w_q = weights[q];
                let mut stale = false;
                for (w, &r) in weights.iter_mut().zip(&pivot_row_copy) {
                    let grown = r * r * w_q;
                    if grown > *w {
                        *w = grown;
                        if grown > weight_cap {
                            stale = true;
                        }
                    }
                }
                weights[b.var] = (w_q / (piv * piv)).max(F::one());
                if stale {
                    for w in weights.iter_mut() {
                        *w = F::one();
                    }
                }
            }
            _ => {
                // The entering variable reached its opposite bound first; a
                // bound flip changes no basis column.
                t.state[q] = match t.state[q] {
                    ColState::AtLower => ColState::AtUpper,
                    ColState::AtUpper => ColState::AtLower,
                    ColState::Basic => unreachable!(),
                };
            }
        }
    }
}

fn eliminate_cost_row<F: Scalar>(d: &mut [F], pivot_row: &[F], q: usize) {
    let f = d[q];
    if f != F::zero() {
        for (dst, &src) in d.iter_mut().zip(pivot_row) {
            *dst = *dst - f * src;
        }
        d[q] = F::zero();
    }
}

struct Block<F> {
    ratio: F,
    pivot_abs: F,
    row: usize,
    var: usize,
    to_upper: bool,
}

/// Chooses between two blocking rows with (numerically) tied ratios:
/// prefer clearly larger pivots for stability, otherwise the lower
/// variable index. Under Bland's rule the index decides alone.
// Ratios within `tie_tol` of each other count as one tie block; inside it a
// clearly larger pivot wins for stability. The window has to stay at noise
// scale: every extra bit of it is slack the blocking variable's bound gets
// overshot by, and phase one's feasibility verdict eats that slack.
fn pick_block<F: Scalar>(best: Block<F>, cand: Block<F>, tie_tol: F, bland: bool) -> Block<F> {
    if cand.ratio < best.ratio - tie_tol {
        return cand;
    }
    if cand.ratio > best.ratio + tie_tol {
        return best;
    }
    if bland {
        return if cand.var < best.var { cand } else { best };
    }
    let growth = F::from_f64(1.5).unwrap();
    if cand.pivot_abs > best.pivot_abs * growth {
        return cand;
    }
    if best.pivot_abs > cand.pivot_abs * growth {
        return best;
    }
    if cand.var < best.var {
        cand
    } else {
        best
    }
}

fn choose_entering<F: Scalar>(
    t: &Tableau<F>,
    d: &[F],
    weights: &[F],
    d_tol: F,
    bland: bool,
) -> Option<usize> {
    let mut best: Option<(F, usize)> = None;
    for j in 0..t.width {
        if t.is_artificial[j] || t.lower[j] == t.upper[j] {
            continue;
        }
        let improvement = match t.state[j] {
            ColState::Basic => continue,
            ColState::AtLower => d[j],
            ColState::AtUpper => -d[j],
        };
        if improvement <= d_tol {
            continue;
        }
        if bland {
            return Some(j);
        }
        let score = improvement * improvement / weights[j];
        if best.map_or(true, |(s, _)| score > s) {
            best = Some((score, j));
        }
    }
    best.map(|(_, j)| j)
}
