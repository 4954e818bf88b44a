//! Builds the three planning programs and decodes their solutions.
//!
//! Static placement maximizes weighted unique coverage; the two mobile
//! programs either maximize coverage of the statically uncovered cells
//! within a fixed horizon (every node occupies a cell at every timestep)
//! or minimize occupied node-timesteps subject to a coverage floor (nodes
//! may halt). [`plan_network`] chains them: place static nodes, compute
//! what they miss, route the mobile nodes over the remainder, and score
//! the combined plan.
//!
//! All model coefficients are integers, so the solver's exact feasibility
//! checks apply, and a decoded plan's re-evaluation on the grid reproduces
//! the objective value bit for bit.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::bip::{
    BinaryProgram, LinearConstraint, Sense, Solution, SolveStats, SolveStatus, SolverConfig,
    SolverError,
};
use crate::grid::{CellCoord, GridError, GridSpec, MobilePlan, PlanEvaluation, StaticPlan, TravelRange};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("cannot decode a solution with status {0}")]
    NotOptimal(SolveStatus),
    #[error("solver output is internally inconsistent: {0}")]
    Inconsistent(String),
}

/// Everything that defines one planning scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub grid: GridSpec,
    pub num_static: usize,
    pub num_mobile: usize,
    /// Mission horizon in timesteps.
    pub max_steps: usize,
    pub travel_range: TravelRange,
    /// Most static nodes allowed to cover one cell.
    pub static_overlap_limit: u32,
    /// Most mobile coverage events allowed per statically uncovered cell.
    pub mobile_overlap_limit: u32,
    /// Required fraction of all cells covered by static and mobile nodes
    /// combined; only the movement-minimizing program enforces it.
    pub coverage_ratio_target: f64,
}

impl ScenarioParams {
    pub fn new(grid: GridSpec) -> Self {
        Self {
            grid,
            num_static: 1,
            num_mobile: 1,
            max_steps: 2,
            travel_range: TravelRange::uniform(2),
            static_overlap_limit: 2,
            mobile_overlap_limit: 2,
            coverage_ratio_target: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        let cr = self.coverage_ratio_target;
        if !(cr > 0.0 && cr <= 1.0) {
            return Err(PlanError::InvalidScenario(format!(
                "coverage_ratio_target must lie in (0, 1], got {cr}"
            )));
        }
        Ok(())
    }
}

/// Index layout of a static placement model: per-node position variables
/// `x`, per-cell unique-coverage indicators `y`, per-node coverage
/// variables `c`, in that block order.
#[derive(Debug, Clone)]
pub struct StaticModelInfo {
    grid: GridSpec,
    num_static: usize,
}

impl StaticModelInfo {
    fn cells(&self) -> usize {
        self.grid.cell_count() as usize
    }

    fn x(&self, node: usize, cell: usize) -> usize {
        node * self.cells() + cell
    }

    fn y(&self, cell: usize) -> usize {
        self.num_static * self.cells() + cell
    }

    fn c(&self, node: usize, cell: usize) -> usize {
        (self.num_static + 1) * self.cells() + node * self.cells() + cell
    }

    fn num_vars(&self) -> usize {
        (2 * self.num_static + 1) * self.cells()
    }
}

/// Static placement program: each node occupies exactly one cell, per-node
/// coverage follows from the occupied cell's sensing square, at most
/// `static_overlap_limit` nodes may cover one cell, and the objective
/// rewards each covered cell once, with boundary cells weighted up by the
/// grid's boundary bonus.
///
/// The objective is scaled by the bonus denominator so every coefficient
/// is an integer: a covered interior cell scores `den`, a covered boundary
/// cell `den + num`.
pub fn build_static_model<F: Scalar>(
    params: &ScenarioParams,
) -> Result<(BinaryProgram<F>, StaticModelInfo), PlanError> {
    params.validate()?;
    if params.num_static < 1 {
        return Err(PlanError::InvalidScenario(
            "static placement needs at least one node".into(),
        ));
    }
    let info = StaticModelInfo { grid: params.grid.clone(), num_static: params.num_static };
    let grid = &info.grid;
    let cells = info.cells();
    let mut model = BinaryProgram::new(info.num_vars(), Sense::Maximize);

    let alpha = grid.boundary_weight();
    let den = *alpha.denom();
    let num = *alpha.numer();
    for cell in grid.cells() {
        let weight = if grid.is_boundary(cell) { den + num } else { den };
        model.set_objective_coeff(info.y(grid.cell_index(cell)), from_i64(weight))?;
    }

    for node in 0..params.num_static {
        let terms = (0..cells).map(|cell| (info.x(node, cell), F::one())).collect();
        model.add_constraint(LinearConstraint::eq(terms, F::one())?)?;
    }

    for cell in grid.cells() {
        let ci = grid.cell_index(cell);
        let sensing: Vec<usize> = grid
            .neighborhood(cell, grid.sensing_radius())?
            .iter()
            .map(|&p| grid.cell_index(p))
            .collect();
        for node in 0..params.num_static {
            let mut terms = vec![(info.c(node, ci), F::one())];
            terms.extend(sensing.iter().map(|&p| (info.x(node, p), -F::one())));
            model.add_constraint(LinearConstraint::eq(terms, F::zero())?)?;
        }

        let overlap = (0..params.num_static).map(|n| (info.c(n, ci), F::one())).collect();
        model.add_constraint(LinearConstraint::le(
            overlap,
            from_i64(params.static_overlap_limit as i64),
        )?)?;

        let mut unique = vec![(info.y(ci), F::one())];
        unique.extend((0..params.num_static).map(|n| (info.c(n, ci), -F::one())));
        model.add_constraint(LinearConstraint::le(unique, F::zero())?)?;
    }

    let mut labels = vec![String::new(); info.num_vars()];
    for cell in grid.cells() {
        let ci = grid.cell_index(cell);
        labels[info.y(ci)] = format!("y{cell}");
        for node in 0..params.num_static {
            labels[info.x(node, ci)] = format!("x[s{node},{cell}]");
            labels[info.c(node, ci)] = format!("c[s{node},{cell}]");
        }
    }
    model.set_var_labels(labels)?;

    Ok((model, info))
}

/// Reads node positions back out of a placement solution. Any solution
/// carrying an assignment decodes, including the best incumbent of a run
/// that hit a node or time limit; check the status to learn whether the
/// plan is proven optimal.
pub fn decode_static<F: Scalar>(
    solution: &Solution<F>,
    info: &StaticModelInfo,
) -> Result<StaticPlan, PlanError> {
    let assignment = usable_assignment(solution)?;
    let cells = info.cells();
    let mut positions = Vec::with_capacity(info.num_static);
    for node in 0..info.num_static {
        let occupied: Vec<usize> =
            (0..cells).filter(|&cell| assignment[info.x(node, cell)]).collect();
        match occupied.as_slice() {
            [cell] => positions.push(info.grid.cell_at(*cell)),
            _ => {
                return Err(PlanError::Inconsistent(format!(
                    "node {node} occupies {} cells",
                    occupied.len()
                )))
            }
        }
    }
    Ok(StaticPlan::new(positions))
}

/// Index layout of a mobile routing model: position variables `x` per
/// (node, timestep, cell) over the whole grid, then one aggregate coverage
/// variable per statically uncovered cell, then per-(node, timestep)
/// coverage variables over those same cells.
#[derive(Debug, Clone)]
pub struct MobileModelInfo {
    grid: GridSpec,
    num_mobile: usize,
    max_steps: usize,
    travel_range: TravelRange,
    uncovered: Vec<CellCoord>,
    /// Whether each node must occupy a cell at every timestep (coverage
    /// maximization) or may be absent (movement minimization).
    every_step_occupied: bool,
}

impl MobileModelInfo {
    fn cells(&self) -> usize {
        self.grid.cell_count() as usize
    }

    fn x(&self, node: usize, step: usize, cell: usize) -> usize {
        (node * self.max_steps + step) * self.cells() + cell
    }

    fn position_vars(&self) -> usize {
        self.num_mobile * self.max_steps * self.cells()
    }

    fn ctot(&self, u: usize) -> usize {
        self.position_vars() + u
    }

    fn cev(&self, node: usize, step: usize, u: usize) -> usize {
        self.position_vars()
            + self.uncovered.len()
            + (node * self.max_steps + step) * self.uncovered.len()
            + u
    }

    fn num_vars(&self) -> usize {
        self.position_vars() + (self.num_mobile * self.max_steps + 1) * self.uncovered.len()
    }

    pub fn uncovered(&self) -> &[CellCoord] {
        &self.uncovered
    }
}

/// Coverage-maximizing routing program over the statically uncovered
/// cells. Every node occupies exactly one cell per timestep, consecutive
/// positions are linked by the travel range, coverage events are capped
/// per cell, and the objective counts uncovered cells reached at least
/// once.
pub fn build_cov_model<F: Scalar>(
    params: &ScenarioParams,
    uncovered: &BTreeSet<CellCoord>,
) -> Result<(BinaryProgram<F>, MobileModelInfo), PlanError> {
    build_mobile_model(params, uncovered, MobileObjective::MaximizeCoverage)
}

/// Movement-minimizing routing program: same constraint families as
/// [`build_cov_model`], but a node may be absent from a timestep (all its
/// position variables zero), combined coverage must reach the scenario's
/// ratio target, and the objective counts occupied node-timesteps.
pub fn build_mov_model<F: Scalar>(
    params: &ScenarioParams,
    uncovered: &BTreeSet<CellCoord>,
    static_covered_count: usize,
) -> Result<(BinaryProgram<F>, MobileModelInfo), PlanError> {
    build_mobile_model(
        params,
        uncovered,
        MobileObjective::MinimizeVisits { static_covered_count },
    )
}

enum MobileObjective {
    MaximizeCoverage,
    MinimizeVisits { static_covered_count: usize },
}

fn build_mobile_model<F: Scalar>(
    params: &ScenarioParams,
    uncovered: &BTreeSet<CellCoord>,
    objective: MobileObjective,
) -> Result<(BinaryProgram<F>, MobileModelInfo), PlanError> {
    params.validate()?;
    if params.num_mobile < 1 || params.max_steps < 1 {
        return Err(PlanError::InvalidScenario(
            "mobile routing needs at least one node and one timestep".into(),
        ));
    }
    for &cell in uncovered {
        if !params.grid.contains(cell) {
            return Err(PlanError::InvalidScenario(format!(
                "uncovered cell {cell} is outside the grid"
            )));
        }
    }
    let every_step_occupied = matches!(objective, MobileObjective::MaximizeCoverage);
    let info = MobileModelInfo {
        grid: params.grid.clone(),
        num_mobile: params.num_mobile,
        max_steps: params.max_steps,
        travel_range: params.travel_range,
        uncovered: uncovered.iter().copied().collect(),
        every_step_occupied,
    };
    let grid = &info.grid;
    let cells = info.cells();
    let nodes = info.num_mobile;
    let steps = info.max_steps;
    let sense = match objective {
        MobileObjective::MaximizeCoverage => Sense::Maximize,
        MobileObjective::MinimizeVisits { .. } => Sense::Minimize,
    };
    let mut model = BinaryProgram::new(info.num_vars(), sense);

    match objective {
        MobileObjective::MaximizeCoverage => {
            for u in 0..info.uncovered.len() {
                model.set_objective_coeff(info.ctot(u), F::one())?;
            }
        }
        MobileObjective::MinimizeVisits { .. } => {
            for var in 0..info.position_vars() {
                model.set_objective_coeff(var, F::one())?;
            }
        }
    }

    // One position per node and timestep; an equality when every step must
    // be occupied, otherwise an upper bound that lets the node be absent.
    for node in 0..nodes {
        for step in 0..steps {
            let terms: Vec<_> =
                (0..cells).map(|cell| (info.x(node, step, cell), F::one())).collect();
            let row = if every_step_occupied {
                LinearConstraint::eq(terms, F::one())?
            } else {
                LinearConstraint::le(terms, F::one())?
            };
            model.add_constraint(row)?;
        }
    }

    // A cell is occupiable at step k+1 only if some cell within travel
    // range was occupied at step k. With one position per step this pins
    // consecutive positions inside the travel box; after an absent step it
    // forces the node to stay absent.
    for cell in grid.cells() {
        let ci = grid.cell_index(cell);
        let sources: Vec<usize> = grid
            .reachable_from(cell, info.travel_range)?
            .iter()
            .map(|&p| grid.cell_index(p))
            .collect();
        for node in 0..nodes {
            for step in 0..steps.saturating_sub(1) {
                let mut terms = vec![(info.x(node, step + 1, ci), F::one())];
                terms.extend(sources.iter().map(|&p| (info.x(node, step, p), -F::one())));
                model.add_constraint(LinearConstraint::le(terms, F::zero())?)?;
            }
        }
    }

    for (u, &cell) in info.uncovered.iter().enumerate() {
        let sensing: Vec<usize> = grid
            .neighborhood(cell, grid.sensing_radius())?
            .iter()
            .map(|&p| grid.cell_index(p))
            .collect();

        // Per-step coverage equals the sensing-square occupancy, which the
        // position constraint keeps at 0 or 1.
        for node in 0..nodes {
            for step in 0..steps {
                let mut terms = vec![(info.cev(node, step, u), F::one())];
                terms.extend(sensing.iter().map(|&p| (info.x(node, step, p), -F::one())));
                model.add_constraint(LinearConstraint::eq(terms, F::zero())?)?;

                model.add_constraint(LinearConstraint::le(
                    vec![(info.cev(node, step, u), F::one()), (info.ctot(u), -F::one())],
                    F::zero(),
                )?)?;
            }
        }

        let mut events = Vec::with_capacity(nodes * steps);
        for node in 0..nodes {
            for step in 0..steps {
                events.push(info.cev(node, step, u));
            }
        }

        let mut total = vec![(info.ctot(u), F::one())];
        total.extend(events.iter().map(|&v| (v, -F::one())));
        model.add_constraint(LinearConstraint::le(total, F::zero())?)?;

        model.add_constraint(LinearConstraint::le(
            events.iter().map(|&v| (v, F::one())).collect(),
            from_i64(params.mobile_overlap_limit as i64),
        )?)?;
    }

    if let MobileObjective::MinimizeVisits { static_covered_count } = objective {
        let required =
            (params.coverage_ratio_target * f64::from(grid.cell_count()) - 1e-9).ceil() as i64;
        let rhs = required - static_covered_count as i64;
        let terms = (0..info.uncovered.len()).map(|u| (info.ctot(u), F::one())).collect();
        model.add_constraint(LinearConstraint::ge(terms, from_i64(rhs))?)?;
    }

    let mut labels = vec![String::new(); info.num_vars()];
    for node in 0..nodes {
        for step in 0..steps {
            for cell in grid.cells() {
                labels[info.x(node, step, grid.cell_index(cell))] =
                    format!("x[m{node},t{},{cell}]", step + 1);
            }
            for (u, &cell) in info.uncovered.iter().enumerate() {
                labels[info.cev(node, step, u)] = format!("c[m{node},t{},{cell}]", step + 1);
            }
        }
    }
    for (u, &cell) in info.uncovered.iter().enumerate() {
        labels[info.ctot(u)] = format!("c{cell}");
    }
    model.set_var_labels(labels)?;

    Ok((model, info))
}

/// Reads trajectories back out of a routing solution, optimal or the best
/// incumbent of a limited run. A timestep with no occupied cell decodes as
/// `None` (halted node); that can only happen in movement-minimizing models.
pub fn decode_mobile<F: Scalar>(
    solution: &Solution<F>,
    info: &MobileModelInfo,
) -> Result<MobilePlan, PlanError> {
    let assignment = usable_assignment(solution)?;
    let cells = info.cells();
    let mut trajectories = Vec::with_capacity(info.num_mobile);
    for node in 0..info.num_mobile {
        let mut steps = Vec::with_capacity(info.max_steps);
        for step in 0..info.max_steps {
            let occupied: Vec<usize> =
                (0..cells).filter(|&cell| assignment[info.x(node, step, cell)]).collect();
            let position = match occupied.as_slice() {
                [] if !info.every_step_occupied => None,
                [cell] => Some(info.grid.cell_at(*cell)),
                _ => {
                    return Err(PlanError::Inconsistent(format!(
                        "node {node} occupies {} cells at timestep {}",
                        occupied.len(),
                        step + 1
                    )))
                }
            };
            steps.push(position);
        }
        trajectories.push(steps);
    }

    for (node, steps) in trajectories.iter().enumerate() {
        for pair in steps.windows(2) {
            let (Some(a), Some(b)) = (pair[0], pair[1]) else { continue };
            let di = a.i.abs_diff(b.i);
            let dj = a.j.abs_diff(b.j);
            if di > info.travel_range.max_row_step || dj > info.travel_range.max_col_step {
                return Err(PlanError::Inconsistent(format!(
                    "node {node} jumps {a} -> {b}, beyond the travel range"
                )));
            }
        }
    }

    Ok(MobilePlan::new(trajectories, info.travel_range))
}

fn usable_assignment<F: Scalar>(solution: &Solution<F>) -> Result<&[bool], PlanError> {
    solution.assignment.as_deref().ok_or(PlanError::NotOptimal(solution.status))
}

/// Which mobile program [`plan_network`] runs after static placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MobileMode {
    /// Maximize coverage of the statically uncovered cells.
    Cov,
    /// Minimize occupied node-timesteps subject to the coverage target.
    Mov,
}

/// Outcome of one solver stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageReport<F> {
    pub status: SolveStatus,
    pub objective: Option<F>,
    pub stats: SolveStats,
}

impl<F: Scalar> StageReport<F> {
    fn from_solution(solution: &Solution<F>) -> Self {
        Self {
            status: solution.status,
            objective: solution.objective_value,
            stats: solution.stats,
        }
    }
}

/// Full result of the two-stage pipeline. A stage that hits a limit still
/// contributes its best plan found so far; a stage that produced no plan
/// at all (infeasible, or a limit hit before any candidate) contributes an
/// empty one. Either way the stage's report carries its status and `notes`
/// says what happened.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkPlan<F> {
    pub static_plan: StaticPlan,
    pub mobile_plan: MobilePlan,
    pub evaluation: PlanEvaluation,
    /// Absent when the scenario has no static nodes.
    pub static_stage: Option<StageReport<F>>,
    /// Absent when the scenario has no mobile nodes or no timesteps.
    pub mobile_stage: Option<StageReport<F>>,
    pub notes: Vec<String>,
}

impl<F: Scalar> NetworkPlan<F> {
    /// True when every stage that ran finished with a proven optimum.
    pub fn is_optimal(&self) -> bool {
        self.static_stage.iter().chain(&self.mobile_stage).all(|s| s.status.is_optimal())
    }
}

/// Places static nodes, routes mobile nodes over what they miss, and
/// scores the combined plan.
pub fn plan_network<F: Scalar>(
    params: &ScenarioParams,
    mode: MobileMode,
    solver: &SolverConfig<F>,
) -> Result<NetworkPlan<F>, PlanError> {
    params.validate()?;
    let mut notes = Vec::new();
    let mut static_plan = StaticPlan::empty();
    let mut static_stage = None;

    if params.num_static >= 1 {
        let (model, info) = build_static_model::<F>(params)?;
        let solution = model.solve_exact(solver)?;
        static_stage = Some(StageReport::from_solution(&solution));
        if solution.assignment.is_some() {
            static_plan = decode_static(&solution, &info)?;
            if !solution.status.is_optimal() {
                notes.push(format!(
                    "static placement ended with status {}; using its best placement",
                    solution.status
                ));
            }
        } else {
            notes.push(format!("static placement ended with status {}", solution.status));
            let evaluation = params.grid.static_coverage(&static_plan)?;
            return Ok(NetworkPlan {
                static_plan,
                mobile_plan: MobilePlan::empty(params.travel_range),
                evaluation,
                static_stage,
                mobile_stage: None,
                notes,
            });
        }
    }

    let static_eval = params.grid.static_coverage(&static_plan)?;
    let uncovered: BTreeSet<CellCoord> = static_eval.uncovered_cells.clone();

    let mut mobile_plan = MobilePlan::empty(params.travel_range);
    let mut mobile_stage = None;
    if params.num_mobile >= 1 && params.max_steps >= 1 {
        let (model, info) = match mode {
            MobileMode::Cov => build_cov_model::<F>(params, &uncovered)?,
            MobileMode::Mov => {
                build_mov_model::<F>(params, &uncovered, static_eval.covered_count())?
            }
        };
        let solution = model.solve_exact(solver)?;
        mobile_stage = Some(StageReport::from_solution(&solution));
        if solution.assignment.is_some() {
            mobile_plan = decode_mobile(&solution, &info)?;
            if !solution.status.is_optimal() {
                notes.push(format!(
                    "mobile routing ended with status {}; using its best plan",
                    solution.status
                ));
            }
        } else if solution.status == SolveStatus::Infeasible && mode == MobileMode::Mov {
            notes.push("coverage target unreachable with the given mobile fleet".into());
        } else {
            notes.push(format!("mobile routing ended with status {}", solution.status));
        }
    }

    let evaluation = params.grid.evaluate_combined(&static_plan, &mobile_plan)?;
    Ok(NetworkPlan { static_plan, mobile_plan, evaluation, static_stage, mobile_stage, notes })
}

fn from_i64<F: Scalar>(value: i64) -> F {
    F::from_i64(value).expect("model coefficients fit any float width")
}

#[cfg(test)]
mod tests;
