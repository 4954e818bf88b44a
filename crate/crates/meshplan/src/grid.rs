//! Grid geometry, sensing neighborhoods, and plan evaluation.
//!
//! Cells are addressed 1-based, row first: `(i, j)` with `1 <= i <= rows`
//! and `1 <= j <= cols`. A node at a cell senses the Chebyshev square of
//! radius `sensing_radius` around it, clipped at the grid edges (no
//! wraparound). Evaluation is pure accounting and accepts any structurally
//! valid plan, including plans an optimizer would reject for overlap.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("grid needs at least one row and one column")]
    EmptyGrid,
    #[error("boundary weight must be non-negative")]
    NegativeBoundaryWeight,
    #[error("cell ({i}, {j}) is outside the {rows}x{cols} grid")]
    OutOfBounds { i: u32, j: u32, rows: u32, cols: u32 },
    #[error(
        "node {node} moves by ({di}, {dj}) into timestep {step}, exceeding travel range ({max_di}, {max_dj})"
    )]
    TravelRangeViolation {
        node: usize,
        step: usize,
        di: i64,
        dj: i64,
        max_di: u32,
        max_dj: u32,
    },
    #[error("node {node} has {got} timesteps, expected {expected}")]
    RaggedTrajectory { node: usize, got: usize, expected: usize },
}

/// 1-based grid cell, row `i` then column `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellCoord {
    pub i: u32,
    pub j: u32,
}

impl CellCoord {
    pub const fn new(i: u32, j: u32) -> Self {
        Self { i, j }
    }

    /// Chebyshev distance to another cell.
    pub fn chebyshev(self, other: CellCoord) -> u32 {
        let di = (self.i as i64 - other.i as i64).unsigned_abs();
        let dj = (self.j as i64 - other.j as i64).unsigned_abs();
        di.max(dj) as u32
    }
}

impl fmt::Display for CellCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// Per-timestep movement limits for mobile nodes: a step from `(i, j)` may
/// change the row by at most `max_row_step` and the column by at most
/// `max_col_step`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TravelRange {
    pub max_row_step: u32,
    pub max_col_step: u32,
}

impl TravelRange {
    pub const fn new(max_row_step: u32, max_col_step: u32) -> Self {
        Self { max_row_step, max_col_step }
    }

    /// Same limit on both axes.
    pub const fn uniform(range: u32) -> Self {
        Self { max_row_step: range, max_col_step: range }
    }
}

/// Positions of the static nodes. Duplicates are legal at this level;
/// whether they are acceptable is the optimizer's concern.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StaticPlan {
    pub positions: Vec<CellCoord>,
}

impl StaticPlan {
    pub fn new(positions: Vec<CellCoord>) -> Self {
        Self { positions }
    }

    pub fn empty() -> Self {
        Self { positions: Vec::new() }
    }
}

/// Trajectories of the mobile nodes, one entry per node and timestep.
///
/// `None` marks a timestep where the node is halted and out of the mission:
/// it senses nothing and its (non-)moves are not counted. Plans decoded from
/// the movement-minimizing program use this for nodes that stop early; plans
/// from the coverage program and the baselines are fully active.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MobilePlan {
    pub trajectories: Vec<Vec<Option<CellCoord>>>,
    pub travel_range: TravelRange,
}

impl MobilePlan {
    pub fn new(trajectories: Vec<Vec<Option<CellCoord>>>, travel_range: TravelRange) -> Self {
        Self { trajectories, travel_range }
    }

    /// Plan with no mobile nodes at all.
    pub fn empty(travel_range: TravelRange) -> Self {
        Self { trajectories: Vec::new(), travel_range }
    }

    /// Fully active plan from plain per-node position lists.
    pub fn from_positions(trajectories: Vec<Vec<CellCoord>>, travel_range: TravelRange) -> Self {
        let trajectories = trajectories
            .into_iter()
            .map(|t| t.into_iter().map(Some).collect())
            .collect();
        Self { trajectories, travel_range }
    }

    pub fn num_nodes(&self) -> usize {
        self.trajectories.len()
    }

    pub fn num_steps(&self) -> usize {
        self.trajectories.first().map_or(0, Vec::len)
    }
}

/// Coverage and movement accounting for a plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanEvaluation {
    pub covered_cells: BTreeSet<CellCoord>,
    pub uncovered_cells: BTreeSet<CellCoord>,
    /// Sensing events per cell. Static nodes count once per node on every
    /// cell they cover; mobile nodes count once per active timestep, and
    /// only on cells the static layer left uncovered (the overlap the
    /// mobile program constrains). Cells with no events are absent.
    pub overlap_histogram: BTreeMap<CellCoord, u32>,
    /// Cell-change transitions between consecutive active timesteps.
    pub total_movements: u32,
    /// Occupied (node, timestep) pairs, i.e. cells-visited counting revisits.
    pub active_node_steps: u32,
    /// All (node, timestep) pairs of the mission, active or not.
    pub mobile_node_steps: u32,
    total_cells: u32,
}

impl PlanEvaluation {
    pub fn covered_count(&self) -> usize {
        self.covered_cells.len()
    }

    pub fn total_cells(&self) -> u32 {
        self.total_cells
    }

    pub fn coverage_ratio(&self) -> f64 {
        self.covered_cells.len() as f64 / self.total_cells as f64
    }

    pub fn is_fully_covered(&self) -> bool {
        self.uncovered_cells.is_empty()
    }
}

/// Rectangular grid together with the sensing radius and the boundary
/// weight used by the static-placement objective.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    rows: u32,
    cols: u32,
    sensing_radius: u32,
    boundary_weight: Ratio<i64>,
}

impl GridSpec {
    /// Weight the static objective gives each covered boundary cell on top
    /// of its base value, unless overridden.
    pub fn default_boundary_weight() -> Ratio<i64> {
        Ratio::new(1, 2)
    }

    pub fn new(
        rows: u32,
        cols: u32,
        sensing_radius: u32,
        boundary_weight: Ratio<i64>,
    ) -> Result<Self, GridError> {
        if rows == 0 || cols == 0 {
            return Err(GridError::EmptyGrid);
        }
        if boundary_weight < Ratio::new(0, 1) {
            return Err(GridError::NegativeBoundaryWeight);
        }
        Ok(Self { rows, cols, sensing_radius, boundary_weight })
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn cols(&self) -> u32 {
        self.cols
    }

    pub fn sensing_radius(&self) -> u32 {
        self.sensing_radius
    }

    pub fn boundary_weight(&self) -> Ratio<i64> {
        self.boundary_weight
    }

    pub fn cell_count(&self) -> u32 {
        self.rows * self.cols
    }

    pub fn contains(&self, cell: CellCoord) -> bool {
        (1..=self.rows).contains(&cell.i) && (1..=self.cols).contains(&cell.j)
    }

    fn check_contains(&self, cell: CellCoord) -> Result<(), GridError> {
        if self.contains(cell) {
            Ok(())
        } else {
            Err(GridError::OutOfBounds {
                i: cell.i,
                j: cell.j,
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    /// Row-major index of a cell, `0..cell_count()`.
    pub fn cell_index(&self, cell: CellCoord) -> usize {
        debug_assert!(self.contains(cell));
        ((cell.i - 1) * self.cols + (cell.j - 1)) as usize
    }

    /// Inverse of [`GridSpec::cell_index`].
    pub fn cell_at(&self, index: usize) -> CellCoord {
        debug_assert!(index < self.cell_count() as usize);
        CellCoord::new(index as u32 / self.cols + 1, index as u32 % self.cols + 1)
    }

    /// All cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = CellCoord> + '_ {
        (1..=self.rows).flat_map(move |i| (1..=self.cols).map(move |j| CellCoord::new(i, j)))
    }

    /// True when the cell lies on the outer rim of the grid.
    pub fn is_boundary(&self, cell: CellCoord) -> bool {
        cell.i == 1 || cell.i == self.rows || cell.j == 1 || cell.j == self.cols
    }

    /// The outer rim. Grids one cell wide or tall are all boundary.
    pub fn boundary_cells(&self) -> BTreeSet<CellCoord> {
        self.cells().filter(|&c| self.is_boundary(c)).collect()
    }

    /// Cells within Chebyshev row distance `row_radius` and column distance
    /// `col_radius` of `center`, clipped to the grid.
    pub fn chebyshev_box(
        &self,
        center: CellCoord,
        row_radius: u32,
        col_radius: u32,
    ) -> Result<BTreeSet<CellCoord>, GridError> {
        self.check_contains(center)?;
        let lo_i = center.i.saturating_sub(row_radius).max(1);
        let hi_i = center.i.saturating_add(row_radius).min(self.rows);
        let lo_j = center.j.saturating_sub(col_radius).max(1);
        let hi_j = center.j.saturating_add(col_radius).min(self.cols);
        let mut cells = BTreeSet::new();
        for i in lo_i..=hi_i {
            for j in lo_j..=hi_j {
                cells.insert(CellCoord::new(i, j));
            }
        }
        Ok(cells)
    }

    /// Sensing region of a node at `center`: the Chebyshev square of the
    /// given radius, clipped to the grid.
    pub fn neighborhood(
        &self,
        center: CellCoord,
        radius: u32,
    ) -> Result<BTreeSet<CellCoord>, GridError> {
        self.chebyshev_box(center, radius, radius)
    }

    /// Cells a node at `center` may occupy one timestep later.
    pub fn reachable_from(
        &self,
        center: CellCoord,
        range: TravelRange,
    ) -> Result<BTreeSet<CellCoord>, GridError> {
        self.chebyshev_box(center, range.max_row_step, range.max_col_step)
    }

    /// Coverage of the static nodes alone.
    pub fn static_coverage(&self, plan: &StaticPlan) -> Result<PlanEvaluation, GridError> {
        let mut covered = BTreeSet::new();
        let mut histogram: BTreeMap<CellCoord, u32> = BTreeMap::new();
        for &pos in &plan.positions {
            for cell in self.neighborhood(pos, self.sensing_radius)? {
                covered.insert(cell);
                *histogram.entry(cell).or_insert(0) += 1;
            }
        }
        let uncovered = self.cells().filter(|c| !covered.contains(c)).collect();
        Ok(PlanEvaluation {
            covered_cells: covered,
            uncovered_cells: uncovered,
            overlap_histogram: histogram,
            total_movements: 0,
            active_node_steps: 0,
            mobile_node_steps: 0,
            total_cells: self.cell_count(),
        })
    }

    /// Cells the static nodes leave uncovered; the whole grid for an empty
    /// plan.
    pub fn uncovered_after_static(
        &self,
        plan: &StaticPlan,
    ) -> Result<BTreeSet<CellCoord>, GridError> {
        Ok(self.static_coverage(plan)?.uncovered_cells)
    }

    /// Joint coverage of a static plan and a mobile plan.
    ///
    /// Movement counts cell changes between consecutive active timesteps;
    /// halted steps neither move nor sense. Each move is validated against
    /// the plan's travel range.
    pub fn evaluate_combined(
        &self,
        static_plan: &StaticPlan,
        mobile_plan: &MobilePlan,
    ) -> Result<PlanEvaluation, GridError> {
        let mut eval = self.static_coverage(static_plan)?;
        let static_uncovered = eval.uncovered_cells.clone();
        let expected_steps = mobile_plan.num_steps();
        eval.mobile_node_steps = (mobile_plan.num_nodes() * expected_steps) as u32;

        for (node, trajectory) in mobile_plan.trajectories.iter().enumerate() {
            if trajectory.len() != expected_steps {
                return Err(GridError::RaggedTrajectory {
                    node,
                    got: trajectory.len(),
                    expected: expected_steps,
                });
            }
            for (step, pos) in trajectory.iter().enumerate() {
                let Some(pos) = *pos else { continue };
                self.check_contains(pos)?;
                eval.active_node_steps += 1;
                if step > 0 {
                    if let Some(prev) = trajectory[step - 1] {
                        let di = pos.i as i64 - prev.i as i64;
                        let dj = pos.j as i64 - prev.j as i64;
                        let range = mobile_plan.travel_range;
                        if di.unsigned_abs() > u64::from(range.max_row_step)
                            || dj.unsigned_abs() > u64::from(range.max_col_step)
                        {
                            return Err(GridError::TravelRangeViolation {
                                node,
                                step: step + 1,
                                di,
                                dj,
                                max_di: range.max_row_step,
                                max_dj: range.max_col_step,
                            });
                        }
                        if pos != prev {
                            eval.total_movements += 1;
                        }
                    }
                }
                for cell in self.neighborhood(pos, self.sensing_radius)? {
                    eval.covered_cells.insert(cell);
                    if static_uncovered.contains(&cell) {
                        *eval.overlap_histogram.entry(cell).or_insert(0) += 1;
                    }
                }
            }
        }
        eval.uncovered_cells = self.cells().filter(|c| !eval.covered_cells.contains(c)).collect();
        Ok(eval)
    }
}
