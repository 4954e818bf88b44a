//! Benchmark harness: expands a scenario configuration into planning jobs,
//! runs them, and serializes the outcomes as CSV plus a comparison report.
//!
//! A configuration names the sweep axes (lists of fleet sizes, horizons,
//! ranges and so on), the strategy matrix to pair over them, and the seeds
//! for the stochastic strategies. Every job is independent, so the runner
//! may fan out over a thread pool; rows are sorted by a total order over
//! their axis values before emission, which keeps the output bytes
//! independent of scheduling. Deterministic strategy pairs collapse the
//! seed axis to a single row per sweep point; stochastic pairs get one row
//! per seed plus mean and sample-stddev summary rows.
//!
//! Wall-clock columns are the one escape hatch from byte determinism:
//! they are off by default and only filled in when `include_timing` asks
//! for them.

pub mod canned;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::fs::File;
use std::io;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baseline::{greedy_mobile_path, random_static_placement, random_walk_path, RngSeed};
use crate::bip::{SolveStatus, SolverError};
use crate::grid::{GridError, GridSpec, MobilePlan, StaticPlan, TravelRange};
use crate::planner::{
    build_cov_model, build_mov_model, build_static_model, decode_mobile, decode_static, PlanError,
    ScenarioParams,
};
use crate::{BinaryProgram, Solution, SolverConfig};

/// Value the `schema` field of every config document must carry.
pub const SCHEMA_VERSION: &str = "meshplan-bench/1";

/// Seeds used when the config names neither a list nor a count.
pub const DEFAULT_SEED_COUNT: u64 = 20;

/// The random walk draws from its own stream, decorrelated from the
/// placement draws made under the same row seed.
const WALK_SEED_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config {path}: {reason}")]
    Config { path: String, reason: String },
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(String),
    #[error("no rows to write")]
    EmptyRows,
    #[error("comparison needs rows from at least two strategy pairs, got {0}")]
    SingleStrategy(usize),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// How the static nodes get their positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StaticStrategy {
    /// Uniform draw of distinct cells.
    Random,
    /// Exact boundary-weighted coverage maximization.
    Milp,
}

impl fmt::Display for StaticStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StaticStrategy::Random => "random",
            StaticStrategy::Milp => "milp",
        })
    }
}

/// How the mobile nodes get their trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MobileStrategy {
    /// Seeded random walk, always active.
    Random,
    /// Most-new-cells-first heuristic.
    Greedy,
    /// Exact coverage maximization over the cells the static stage missed.
    MilpCov,
    /// Exact visited-cell minimization subject to the coverage target.
    MilpMov,
}

impl fmt::Display for MobileStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MobileStrategy::Random => "random",
            MobileStrategy::Greedy => "greedy",
            MobileStrategy::MilpCov => "milp-cov",
            MobileStrategy::MilpMov => "milp-mov",
        })
    }
}

/// A strategy pair depends on the seed exactly when either side draws
/// random numbers; everything else in the pipeline is deterministic.
fn is_stochastic(static_strategy: StaticStrategy, mobile_strategy: MobileStrategy) -> bool {
    static_strategy == StaticStrategy::Random || mobile_strategy == MobileStrategy::Random
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub rows: u32,
    pub cols: u32,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { rows: 7, cols: 7 }
    }
}

/// Sweep axes. The runner takes their Cartesian product, so every listed
/// value of one axis is combined with every listed value of the others.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Axes {
    pub num_static: Vec<usize>,
    pub num_mobile: Vec<usize>,
    pub max_steps: Vec<usize>,
    /// Per-timestep travel limit, applied to both grid axes.
    pub travel_range: Vec<u32>,
    pub sensing_radius: Vec<u32>,
    /// Required covered fraction; only the movement-minimizing strategy
    /// constrains on it.
    pub coverage_target: Vec<f64>,
}

impl Default for Axes {
    fn default() -> Self {
        Self {
            num_static: vec![1],
            num_mobile: vec![1],
            max_steps: vec![2],
            travel_range: vec![2],
            sensing_radius: vec![1],
            coverage_target: vec![1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StrategyMatrix {
    #[serde(rename = "static")]
    pub static_strategies: Vec<StaticStrategy>,
    #[serde(rename = "mobile")]
    pub mobile_strategies: Vec<MobileStrategy>,
}

impl Default for StrategyMatrix {
    fn default() -> Self {
        Self {
            static_strategies: vec![StaticStrategy::Milp],
            mobile_strategies: vec![MobileStrategy::MilpCov],
        }
    }
}

/// Per-cell coverage-event caps, passed straight into the models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OverlapLimits {
    #[serde(rename = "static")]
    pub static_limit: u32,
    #[serde(rename = "mobile")]
    pub mobile_limit: u32,
}

impl Default for OverlapLimits {
    fn default() -> Self {
        Self { static_limit: 2, mobile_limit: 2 }
    }
}

/// Optional caps layered over the solver defaults. A capped solve that
/// runs out of budget reports its best plan so far under a non-optimal
/// status; the sweep keeps going.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOverrides {
    pub max_nodes: Option<u64>,
    pub max_seconds: Option<f64>,
}

/// One benchmark run, as read from a JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Must equal [`SCHEMA_VERSION`].
    pub schema: String,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub axes: Axes,
    #[serde(default)]
    pub strategies: StrategyMatrix,
    /// Explicit seed list. Mutually exclusive with `seed_count`.
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    /// Shorthand for seeds 1..=n. Mutually exclusive with `seeds`.
    #[serde(default)]
    pub seed_count: Option<u64>,
    #[serde(default)]
    pub overlap: OverlapLimits,
    #[serde(default)]
    pub solver: SolverOverrides,
    #[serde(default)]
    pub include_timing: bool,
    /// Where the CLI writes the CSV; `--out` overrides it.
    #[serde(default)]
    pub output: Option<String>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            schema: SCHEMA_VERSION.to_string(),
            grid: GridConfig::default(),
            axes: Axes::default(),
            strategies: StrategyMatrix::default(),
            seeds: None,
            seed_count: None,
            overlap: OverlapLimits::default(),
            solver: SolverOverrides::default(),
            include_timing: false,
            output: None,
        }
    }
}

fn invalid(path: &str, reason: impl Into<String>) -> BenchError {
    BenchError::Config { path: path.to_string(), reason: reason.into() }
}

impl ScenarioConfig {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses and validates a config document.
    pub fn from_json(text: &str) -> Result<Self, BenchError> {
        let config: ScenarioConfig = serde_json::from_str(text)
            .map_err(|error| invalid("document", error.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.schema != SCHEMA_VERSION {
            return Err(invalid(
                "schema",
                format!("expected \"{SCHEMA_VERSION}\", got \"{}\"", self.schema),
            ));
        }
        if self.grid.rows == 0 || self.grid.cols == 0 {
            return Err(invalid("grid", "rows and cols must be at least 1"));
        }
        let axis_lengths = [
            ("axes.num_static", self.axes.num_static.len()),
            ("axes.num_mobile", self.axes.num_mobile.len()),
            ("axes.max_steps", self.axes.max_steps.len()),
            ("axes.travel_range", self.axes.travel_range.len()),
            ("axes.sensing_radius", self.axes.sensing_radius.len()),
            ("axes.coverage_target", self.axes.coverage_target.len()),
        ];
        for (path, len) in axis_lengths {
            if len == 0 {
                return Err(invalid(path, "axis must list at least one value"));
            }
        }
        for &target in &self.axes.coverage_target {
            if !(target > 0.0 && target <= 1.0) {
                return Err(invalid(
                    "axes.coverage_target",
                    format!("values must lie in (0, 1], got {target}"),
                ));
            }
        }
        if self.strategies.static_strategies.is_empty() {
            return Err(invalid("strategies.static", "list at least one strategy"));
        }
        if self.strategies.mobile_strategies.is_empty() {
            return Err(invalid("strategies.mobile", "list at least one strategy"));
        }
        if let Some(dup) = first_duplicate(&self.strategies.static_strategies) {
            return Err(invalid("strategies.static", format!("duplicate entry {dup}")));
        }
        if let Some(dup) = first_duplicate(&self.strategies.mobile_strategies) {
            return Err(invalid("strategies.mobile", format!("duplicate entry {dup}")));
        }
        if self.seeds.is_some() && self.seed_count.is_some() {
            return Err(invalid("seeds", "give either an explicit list or seed_count, not both"));
        }
        if let Some(seeds) = &self.seeds {
            if let Some(dup) = first_duplicate(seeds) {
                return Err(invalid("seeds", format!("duplicate entry {dup}")));
            }
        }
        if self.seed_count == Some(0) {
            return Err(invalid("seed_count", "must be at least 1"));
        }
        if self.has_stochastic_pair() && self.effective_seeds().is_empty() {
            return Err(invalid("seeds", "stochastic strategies need at least one seed"));
        }
        if self.solver.max_nodes == Some(0) {
            return Err(invalid("solver.max_nodes", "must be at least 1"));
        }
        if let Some(seconds) = self.solver.max_seconds {
            if !(seconds > 0.0 && seconds.is_finite()) {
                return Err(invalid(
                    "solver.max_seconds",
                    format!("must be a positive number, got {seconds}"),
                ));
            }
        }
        Ok(())
    }

    /// The seed list the stochastic strategy pairs run over.
    pub fn effective_seeds(&self) -> Vec<u64> {
        match &self.seeds {
            Some(seeds) => seeds.clone(),
            None => (1..=self.seed_count.unwrap_or(DEFAULT_SEED_COUNT)).collect(),
        }
    }

    fn strategy_pairs(&self) -> Vec<(StaticStrategy, MobileStrategy)> {
        let mut pairs = Vec::new();
        for &static_strategy in &self.strategies.static_strategies {
            for &mobile_strategy in &self.strategies.mobile_strategies {
                pairs.push((static_strategy, mobile_strategy));
            }
        }
        pairs
    }

    fn has_stochastic_pair(&self) -> bool {
        self.strategy_pairs().iter().any(|&(s, m)| is_stochastic(s, m))
    }

    fn solver_config(&self) -> SolverConfig {
        let mut solver = SolverConfig::default();
        if let Some(max_nodes) = self.solver.max_nodes {
            solver.max_nodes = max_nodes;
        }
        if let Some(max_seconds) = self.solver.max_seconds {
            solver.max_seconds = max_seconds;
        }
        solver
    }
}

fn first_duplicate<T: PartialEq + fmt::Display>(values: &[T]) -> Option<&T> {
    values
        .iter()
        .enumerate()
        .find(|(index, value)| values[..*index].contains(value))
        .map(|(_, value)| value)
}

/// Which role a row plays: a direct measurement, or a statistic summarizing
/// the per-seed measurements of one sweep point and strategy pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Statistic {
    Sample,
    Mean,
    StdDev,
}

impl Statistic {
    fn as_csv(self) -> &'static str {
        match self {
            Statistic::Sample => "",
            Statistic::Mean => "mean",
            Statistic::StdDev => "stddev",
        }
    }

    fn from_csv(text: &str) -> Option<Self> {
        match text {
            "" => Some(Statistic::Sample),
            "mean" => Some(Statistic::Mean),
            "stddev" => Some(Statistic::StdDev),
            _ => None,
        }
    }
}

/// One line of benchmark output.
///
/// Metric fields are `f64` so that the same shape carries both exact
/// per-run counts and the summary statistics over them; sample rows always
/// hold integers. `coverage_percent` stays unrounded in memory and is cut
/// to two decimals at serialization only.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub rows: u32,
    pub cols: u32,
    pub sensing_radius: u32,
    pub num_static: usize,
    pub num_mobile: usize,
    pub max_steps: usize,
    pub travel_range_x: u32,
    pub travel_range_y: u32,
    pub coverage_target: f64,
    pub static_strategy: StaticStrategy,
    pub mobile_strategy: MobileStrategy,
    /// Absent on deterministic pairs and on summary rows.
    pub seed: Option<u64>,
    pub statistic: Statistic,
    /// Status of the exact solver, when one ran: the first non-optimal
    /// stage wins, otherwise the last stage. Absent on heuristic-only rows
    /// and on summary rows.
    pub status: Option<SolveStatus>,
    pub covered_cells: f64,
    pub coverage_percent: f64,
    pub total_movements: f64,
    pub visited_cells: f64,
    /// Objective of the mobile-stage solver, when one ran.
    pub objective_value: Option<f64>,
    /// Summed solver wall time; only filled under `include_timing`.
    pub solve_ms: Option<f64>,
}

/// Column order of the CSV files, frozen.
pub const CSV_HEADER: [&str; 20] = [
    "rows",
    "cols",
    "sensing_radius",
    "num_static",
    "num_mobile",
    "max_steps",
    "travel_range_x",
    "travel_range_y",
    "coverage_target",
    "static_strategy",
    "mobile_strategy",
    "seed",
    "statistic",
    "status",
    "covered_cells",
    "coverage_percent",
    "total_movements",
    "visited_cells",
    "objective_value",
    "solve_ms",
];

impl ResultRow {
    fn to_fields(&self) -> [String; 20] {
        // Counts are exact integers on sample rows; statistics keep two
        // decimals like the percent columns.
        let count = |value: f64| match self.statistic {
            Statistic::Sample => format!("{value:.0}"),
            _ => format!("{value:.2}"),
        };
        [
            self.rows.to_string(),
            self.cols.to_string(),
            self.sensing_radius.to_string(),
            self.num_static.to_string(),
            self.num_mobile.to_string(),
            self.max_steps.to_string(),
            self.travel_range_x.to_string(),
            self.travel_range_y.to_string(),
            self.coverage_target.to_string(),
            self.static_strategy.to_string(),
            self.mobile_strategy.to_string(),
            self.seed.map(|seed| seed.to_string()).unwrap_or_default(),
            self.statistic.as_csv().to_string(),
            self.status.map(|status| status.to_string()).unwrap_or_default(),
            count(self.covered_cells),
            format!("{:.2}", self.coverage_percent),
            count(self.total_movements),
            count(self.visited_cells),
            self.objective_value.map(|v| format!("{v:.2}")).unwrap_or_default(),
            self.solve_ms.map(|v| format!("{v:.1}")).unwrap_or_default(),
        ]
    }
}

/// Total order the rows are emitted in: axis values, then strategies, then
/// samples by seed, then the summary statistics.
fn row_order(a: &ResultRow, b: &ResultRow) -> Ordering {
    a.rows
        .cmp(&b.rows)
        .then(a.cols.cmp(&b.cols))
        .then(a.sensing_radius.cmp(&b.sensing_radius))
        .then(a.num_static.cmp(&b.num_static))
        .then(a.num_mobile.cmp(&b.num_mobile))
        .then(a.max_steps.cmp(&b.max_steps))
        .then(a.travel_range_x.cmp(&b.travel_range_x))
        .then(a.travel_range_y.cmp(&b.travel_range_y))
        .then(a.coverage_target.total_cmp(&b.coverage_target))
        .then(a.static_strategy.cmp(&b.static_strategy))
        .then(a.mobile_strategy.cmp(&b.mobile_strategy))
        .then(a.statistic.cmp(&b.statistic))
        .then(a.seed.cmp(&b.seed))
}

struct Job {
    params: ScenarioParams,
    static_strategy: StaticStrategy,
    mobile_strategy: MobileStrategy,
    seed: Option<u64>,
    solver: SolverConfig,
    include_timing: bool,
}

/// Expands the config into one job per sweep point, strategy pair and,
/// for stochastic pairs, seed. Deterministic pairs get a single job with
/// no seed, whatever the seed list says.
fn expand(config: &ScenarioConfig) -> Result<Vec<Job>, BenchError> {
    let solver = config.solver_config();
    let seeds = config.effective_seeds();
    let pairs = config.strategy_pairs();
    let mut jobs = Vec::new();
    for &sensing_radius in &config.axes.sensing_radius {
        let grid = GridSpec::new(
            config.grid.rows,
            config.grid.cols,
            sensing_radius,
            GridSpec::default_boundary_weight(),
        )?;
        for &num_static in &config.axes.num_static {
            for &num_mobile in &config.axes.num_mobile {
                for &max_steps in &config.axes.max_steps {
                    for &travel_range in &config.axes.travel_range {
                        for &coverage_target in &config.axes.coverage_target {
                            let mut params = ScenarioParams::new(grid.clone());
                            params.num_static = num_static;
                            params.num_mobile = num_mobile;
                            params.max_steps = max_steps;
                            params.travel_range = TravelRange::uniform(travel_range);
                            params.static_overlap_limit = config.overlap.static_limit;
                            params.mobile_overlap_limit = config.overlap.mobile_limit;
                            params.coverage_ratio_target = coverage_target;
                            for &(static_strategy, mobile_strategy) in &pairs {
                                let job_seeds: Vec<Option<u64>> =
                                    if is_stochastic(static_strategy, mobile_strategy) {
                                        seeds.iter().map(|&s| Some(s)).collect()
                                    } else {
                                        vec![None]
                                    };
                                for seed in job_seeds {
                                    jobs.push(Job {
                                        params: params.clone(),
                                        static_strategy,
                                        mobile_strategy,
                                        seed,
                                        solver,
                                        include_timing: config.include_timing,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(jobs)
}

fn timed_solve(
    model: &BinaryProgram,
    solver: &SolverConfig,
    total_ms: &mut f64,
) -> Result<Solution, BenchError> {
    let started = Instant::now();
    let solution = model.solve_exact(solver)?;
    *total_ms += started.elapsed().as_secs_f64() * 1e3;
    Ok(solution)
}

/// The first stage to end non-optimal is the row's story; otherwise the
/// latest stage speaks.
fn record_status(slot: &mut Option<SolveStatus>, status: SolveStatus) {
    match slot {
        Some(existing) if !existing.is_optimal() => {}
        _ => *slot = Some(status),
    }
}

fn run_job(job: &Job) -> Result<ResultRow, BenchError> {
    let params = &job.params;
    let grid = &params.grid;
    let mut status = None;
    let mut objective = None;
    let mut solver_ms = 0.0_f64;

    let static_plan = if params.num_static == 0 {
        StaticPlan::empty()
    } else {
        match job.static_strategy {
            StaticStrategy::Random => {
                let seed = job.seed.expect("stochastic jobs carry a seed");
                random_static_placement(params, RngSeed(seed))?
            }
            StaticStrategy::Milp => {
                let (model, info) = build_static_model::<f64>(params)?;
                let solution = timed_solve(&model, &job.solver, &mut solver_ms)?;
                record_status(&mut status, solution.status);
                match decode_static(&solution, &info) {
                    Ok(plan) => plan,
                    Err(PlanError::NotOptimal(_)) => StaticPlan::empty(),
                    Err(error) => return Err(error.into()),
                }
            }
        }
    };

    let static_eval = grid.static_coverage(&static_plan)?;

    let mobile_plan = if params.num_mobile == 0 || params.max_steps == 0 {
        MobilePlan::empty(params.travel_range)
    } else {
        match job.mobile_strategy {
            MobileStrategy::Random => {
                let seed = job.seed.expect("stochastic jobs carry a seed");
                random_walk_path(params, RngSeed(seed ^ WALK_SEED_SALT))
            }
            MobileStrategy::Greedy => {
                greedy_mobile_path(params, &static_eval.uncovered_cells, RngSeed(0))
            }
            MobileStrategy::MilpCov | MobileStrategy::MilpMov => {
                let (model, info) = if job.mobile_strategy == MobileStrategy::MilpCov {
                    build_cov_model::<f64>(params, &static_eval.uncovered_cells)?
                } else {
                    build_mov_model::<f64>(
                        params,
                        &static_eval.uncovered_cells,
                        static_eval.covered_count(),
                    )?
                };
                let solution = timed_solve(&model, &job.solver, &mut solver_ms)?;
                record_status(&mut status, solution.status);
                objective = solution.objective_value;
                match decode_mobile(&solution, &info) {
                    Ok(plan) => plan,
                    Err(PlanError::NotOptimal(_)) => MobilePlan::empty(params.travel_range),
                    Err(error) => return Err(error.into()),
                }
            }
        }
    };

    let evaluation = grid.evaluate_combined(&static_plan, &mobile_plan)?;
    let covered = evaluation.covered_count() as f64;
    let total = grid.cell_count() as f64;
    Ok(ResultRow {
        rows: grid.rows(),
        cols: grid.cols(),
        sensing_radius: grid.sensing_radius(),
        num_static: params.num_static,
        num_mobile: params.num_mobile,
        max_steps: params.max_steps,
        travel_range_x: params.travel_range.max_row_step,
        travel_range_y: params.travel_range.max_col_step,
        coverage_target: params.coverage_ratio_target,
        static_strategy: job.static_strategy,
        mobile_strategy: job.mobile_strategy,
        seed: job.seed,
        statistic: Statistic::Sample,
        status,
        covered_cells: covered,
        coverage_percent: 100.0 * covered / total,
        total_movements: evaluation.total_movements as f64,
        visited_cells: evaluation.active_node_steps as f64,
        objective_value: objective,
        solve_ms: job.include_timing.then_some(solver_ms),
    })
}

fn execute(jobs: &[Job], workers: Option<usize>) -> Result<Vec<ResultRow>, BenchError> {
    match workers {
        Some(count) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(count)
                .build()
                .map_err(|error| BenchError::Pool(error.to_string()))?;
            pool.install(|| jobs.par_iter().map(run_job).collect())
        }
        None => jobs.par_iter().map(run_job).collect(),
    }
}

type GroupKey = (
    u32,
    u32,
    u32,
    usize,
    usize,
    usize,
    u32,
    u32,
    u64,
    StaticStrategy,
    MobileStrategy,
);

fn group_key(row: &ResultRow) -> GroupKey {
    (
        row.rows,
        row.cols,
        row.sensing_radius,
        row.num_static,
        row.num_mobile,
        row.max_steps,
        row.travel_range_x,
        row.travel_range_y,
        row.coverage_target.to_bits(),
        row.static_strategy,
        row.mobile_strategy,
    )
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation; a single observation has none.
fn stddev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let center = mean(values);
    let variance = values.iter().map(|v| (v - center).powi(2)).sum::<f64>()
        / (values.len() - 1) as f64;
    variance.sqrt()
}

/// Builds the mean and stddev rows over each stochastic group's samples.
fn summarize(rows: &[ResultRow]) -> Vec<ResultRow> {
    let mut groups: BTreeMap<GroupKey, Vec<&ResultRow>> = BTreeMap::new();
    for row in rows.iter().filter(|row| row.seed.is_some()) {
        groups.entry(group_key(row)).or_default().push(row);
    }
    let mut summaries = Vec::new();
    for members in groups.values() {
        let template = members[0];
        let metrics = |f: fn(&ResultRow) -> f64| -> Vec<f64> { members.iter().map(|r| f(r)).collect() };
        let covered = metrics(|r| r.covered_cells);
        let percent = metrics(|r| r.coverage_percent);
        let movements = metrics(|r| r.total_movements);
        let visited = metrics(|r| r.visited_cells);
        for (statistic, reduce) in
            [(Statistic::Mean, mean as fn(&[f64]) -> f64), (Statistic::StdDev, stddev)]
        {
            summaries.push(ResultRow {
                seed: None,
                statistic,
                status: None,
                covered_cells: reduce(&covered),
                coverage_percent: reduce(&percent),
                total_movements: reduce(&movements),
                visited_cells: reduce(&visited),
                objective_value: None,
                solve_ms: None,
                ..template.clone()
            });
        }
    }
    summaries
}

/// Runs the full sweep and returns the rows in emission order.
///
/// `workers` sizes a dedicated thread pool; `None` uses the process-wide
/// default. The output is the same either way.
pub fn run_scenario(
    config: &ScenarioConfig,
    workers: Option<usize>,
) -> Result<Vec<ResultRow>, BenchError> {
    config.validate()?;
    let jobs = expand(config)?;
    let mut rows = execute(&jobs, workers)?;
    rows.extend(summarize(&rows));
    rows.sort_by(row_order);
    Ok(rows)
}

/// Runs several configs and merges their rows into one ordered table.
pub fn run_suite(
    configs: &[ScenarioConfig],
    workers: Option<usize>,
) -> Result<Vec<ResultRow>, BenchError> {
    let mut rows = Vec::new();
    for config in configs {
        rows.extend(run_scenario(config, workers)?);
    }
    rows.sort_by(row_order);
    Ok(rows)
}

fn csv_error(error: csv::Error) -> BenchError {
    BenchError::Csv(error.to_string())
}

/// Serializes rows to CSV. Refuses an empty table so that a misconfigured
/// run cannot masquerade as a finished one.
pub fn write_csv<W: io::Write>(rows: &[ResultRow], writer: W) -> Result<(), BenchError> {
    if rows.is_empty() {
        return Err(BenchError::EmptyRows);
    }
    let mut writer = csv::Writer::from_writer(writer);
    writer.write_record(CSV_HEADER).map_err(csv_error)?;
    for row in rows {
        writer.write_record(row.to_fields()).map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<(), BenchError> {
    let file = File::create(path)?;
    write_csv(rows, io::BufWriter::new(file))
}

fn parse_status(text: &str) -> Option<Option<SolveStatus>> {
    match text {
        "" => Some(None),
        "optimal" => Some(Some(SolveStatus::Optimal)),
        "infeasible" => Some(Some(SolveStatus::Infeasible)),
        "node_limit" => Some(Some(SolveStatus::NodeLimit)),
        "time_limit" => Some(Some(SolveStatus::TimeLimit)),
        _ => None,
    }
}

fn parse_static_strategy(text: &str) -> Option<StaticStrategy> {
    match text {
        "random" => Some(StaticStrategy::Random),
        "milp" => Some(StaticStrategy::Milp),
        _ => None,
    }
}

fn parse_mobile_strategy(text: &str) -> Option<MobileStrategy> {
    match text {
        "random" => Some(MobileStrategy::Random),
        "greedy" => Some(MobileStrategy::Greedy),
        "milp-cov" => Some(MobileStrategy::MilpCov),
        "milp-mov" => Some(MobileStrategy::MilpMov),
        _ => None,
    }
}

/// Reads rows back from a CSV file produced by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>, BenchError> {
    let mut reader = csv::Reader::from_path(path).map_err(csv_error)?;
    let headers = reader.headers().map_err(csv_error)?;
    if !headers.iter().eq(CSV_HEADER) {
        return Err(BenchError::Csv(format!(
            "unexpected header {:?} in {}",
            headers,
            path.display()
        )));
    }
    let mut rows = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error)?;
        rows.push(parse_record(&record, index + 2)?);
    }
    Ok(rows)
}

fn parse_record(record: &csv::StringRecord, line: usize) -> Result<ResultRow, BenchError> {
    let bad = |column: &str, detail: String| {
        BenchError::Csv(format!("line {line}, column {column}: {detail}"))
    };
    if record.len() != CSV_HEADER.len() {
        return Err(BenchError::Csv(format!(
            "line {line}: expected {} fields, got {}",
            CSV_HEADER.len(),
            record.len()
        )));
    }
    let text = |index: usize| record.get(index).unwrap_or("");
    fn number<T: std::str::FromStr>(value: &str) -> Result<T, String>
    where
        T::Err: fmt::Display,
    {
        value.parse().map_err(|e: T::Err| e.to_string())
    }
    let optional = |value: &str| -> Result<Option<f64>, String> {
        if value.is_empty() { Ok(None) } else { number(value).map(Some) }
    };
    Ok(ResultRow {
        rows: number(text(0)).map_err(|e| bad("rows", e))?,
        cols: number(text(1)).map_err(|e| bad("cols", e))?,
        sensing_radius: number(text(2)).map_err(|e| bad("sensing_radius", e))?,
        num_static: number(text(3)).map_err(|e| bad("num_static", e))?,
        num_mobile: number(text(4)).map_err(|e| bad("num_mobile", e))?,
        max_steps: number(text(5)).map_err(|e| bad("max_steps", e))?,
        travel_range_x: number(text(6)).map_err(|e| bad("travel_range_x", e))?,
        travel_range_y: number(text(7)).map_err(|e| bad("travel_range_y", e))?,
        coverage_target: number(text(8)).map_err(|e| bad("coverage_target", e))?,
        static_strategy: parse_static_strategy(text(9))
            .ok_or_else(|| bad("static_strategy", format!("unknown value {:?}", text(9))))?,
        mobile_strategy: parse_mobile_strategy(text(10))
            .ok_or_else(|| bad("mobile_strategy", format!("unknown value {:?}", text(10))))?,
        seed: if text(11).is_empty() {
            None
        } else {
            Some(number(text(11)).map_err(|e| bad("seed", e))?)
        },
        statistic: Statistic::from_csv(text(12))
            .ok_or_else(|| bad("statistic", format!("unknown value {:?}", text(12))))?,
        status: parse_status(text(13))
            .ok_or_else(|| bad("status", format!("unknown value {:?}", text(13))))?,
        covered_cells: number(text(14)).map_err(|e| bad("covered_cells", e))?,
        coverage_percent: number(text(15)).map_err(|e| bad("coverage_percent", e))?,
        total_movements: number(text(16)).map_err(|e| bad("total_movements", e))?,
        visited_cells: number(text(17)).map_err(|e| bad("visited_cells", e))?,
        objective_value: optional(text(18)).map_err(|e| bad("objective_value", e))?,
        solve_ms: optional(text(19)).map_err(|e| bad("solve_ms", e))?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct SweepPoint {
    rows: u32,
    cols: u32,
    sensing_radius: u32,
    num_static: usize,
    num_mobile: usize,
    max_steps: usize,
    travel_range_x: u32,
    travel_range_y: u32,
    coverage_target: f64,
}

type PointKey = (u32, u32, u32, usize, usize, usize, u32, u32, u64);

impl SweepPoint {
    fn of(row: &ResultRow) -> Self {
        Self {
            rows: row.rows,
            cols: row.cols,
            sensing_radius: row.sensing_radius,
            num_static: row.num_static,
            num_mobile: row.num_mobile,
            max_steps: row.max_steps,
            travel_range_x: row.travel_range_x,
            travel_range_y: row.travel_range_y,
            coverage_target: row.coverage_target,
        }
    }

    fn key(&self) -> PointKey {
        (
            self.rows,
            self.cols,
            self.sensing_radius,
            self.num_static,
            self.num_mobile,
            self.max_steps,
            self.travel_range_x,
            self.travel_range_y,
            self.coverage_target.to_bits(),
        )
    }
}

impl fmt::Display for SweepPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}x{} r_s={} N_s={} N_m={} K={} range={}x{} target={}",
            self.rows,
            self.cols,
            self.sensing_radius,
            self.num_static,
            self.num_mobile,
            self.max_steps,
            self.travel_range_x,
            self.travel_range_y,
            self.coverage_target
        )
    }
}

/// The single value a strategy pair stands on at one sweep point: the mean
/// row when the pair is stochastic, the lone sample otherwise.
#[derive(Debug, Clone, Copy)]
struct Representative {
    covered_cells: f64,
    coverage_percent: f64,
    total_movements: f64,
    visited_cells: f64,
}

type Pair = (StaticStrategy, MobileStrategy);

fn representatives(rows: &[ResultRow]) -> BTreeMap<PointKey, (SweepPoint, BTreeMap<Pair, Representative>)> {
    let mut by_point: BTreeMap<PointKey, (SweepPoint, BTreeMap<Pair, Representative>)> =
        BTreeMap::new();
    // Mean rows win over samples; bare samples are averaged on the fly so
    // that hand-trimmed CSV files still compare.
    let mut sample_bins: BTreeMap<(PointKey, Pair), Vec<&ResultRow>> = BTreeMap::new();
    for row in rows {
        let point = SweepPoint::of(row);
        let pair = (row.static_strategy, row.mobile_strategy);
        match row.statistic {
            Statistic::Mean => {
                by_point.entry(point.key()).or_insert_with(|| (point, BTreeMap::new())).1.insert(
                    pair,
                    Representative {
                        covered_cells: row.covered_cells,
                        coverage_percent: row.coverage_percent,
                        total_movements: row.total_movements,
                        visited_cells: row.visited_cells,
                    },
                );
            }
            Statistic::Sample => sample_bins.entry((point.key(), pair)).or_default().push(row),
            Statistic::StdDev => {}
        }
    }
    for ((key, pair), samples) in sample_bins {
        let point = SweepPoint::of(samples[0]);
        let slot = by_point.entry(key).or_insert_with(|| (point, BTreeMap::new()));
        slot.1.entry(pair).or_insert_with(|| Representative {
            covered_cells: mean(&samples.iter().map(|r| r.covered_cells).collect::<Vec<_>>()),
            coverage_percent: mean(&samples.iter().map(|r| r.coverage_percent).collect::<Vec<_>>()),
            total_movements: mean(&samples.iter().map(|r| r.total_movements).collect::<Vec<_>>()),
            visited_cells: mean(&samples.iter().map(|r| r.visited_cells).collect::<Vec<_>>()),
        });
    }
    by_point
}

fn savings_fraction(cov_metric: f64, mov_metric: f64) -> f64 {
    if cov_metric == 0.0 {
        0.0
    } else {
        1.0 - mov_metric / cov_metric
    }
}

/// Renders a plain-text comparison of every strategy pair in the rows:
/// a per-point ranking with coverage deltas, movement savings where both
/// exact mobile strategies are present, and warnings for any violated
/// dominance or monotonicity expectations.
pub fn compare_report(rows: &[ResultRow]) -> Result<String, BenchError> {
    let pairs: BTreeSet<Pair> =
        rows.iter().map(|row| (row.static_strategy, row.mobile_strategy)).collect();
    if pairs.len() < 2 {
        return Err(BenchError::SingleStrategy(pairs.len()));
    }
    let by_point = representatives(rows);
    let mut report = String::new();
    let _ = writeln!(
        report,
        "strategy comparison: {} sweep points, {} strategy pairs",
        by_point.len(),
        pairs.len()
    );

    for (point, reps) in by_point.values() {
        let _ = writeln!(report, "\n{point}");
        let mut ranked: Vec<(&Pair, &Representative)> = reps.iter().collect();
        ranked.sort_by(|a, b| {
            b.1.coverage_percent
                .total_cmp(&a.1.coverage_percent)
                .then(a.1.total_movements.total_cmp(&b.1.total_movements))
                .then(a.0.cmp(b.0))
        });
        let best = ranked[0].1.coverage_percent;
        for (position, ((static_strategy, mobile_strategy), rep)) in ranked.iter().enumerate() {
            let gap = best - rep.coverage_percent;
            let behind =
                if gap > 0.0 { format!(", {gap:.2} pp behind") } else { String::new() };
            let _ = writeln!(
                report,
                "  {}. {static_strategy}+{mobile_strategy}: coverage {:.2}% ({:.2} cells), movements {:.2}, visited {:.2}{behind}",
                position + 1,
                rep.coverage_percent,
                rep.covered_cells,
                rep.total_movements,
                rep.visited_cells,
            );
        }
        for &static_strategy in &[StaticStrategy::Random, StaticStrategy::Milp] {
            let cov = reps.get(&(static_strategy, MobileStrategy::MilpCov));
            let mov = reps.get(&(static_strategy, MobileStrategy::MilpMov));
            if let (Some(cov), Some(mov)) = (cov, mov) {
                if mov.covered_cells + 1e-9 < cov.covered_cells {
                    let _ = writeln!(
                        report,
                        "  savings milp-mov vs milp-cov ({static_strategy}): not comparable, coverage regressed",
                    );
                } else {
                    let _ = writeln!(
                        report,
                        "  savings milp-mov vs milp-cov ({static_strategy}): transitions {:.2}%, visited cells {:.2}%",
                        100.0 * savings_fraction(cov.total_movements, mov.total_movements),
                        100.0 * savings_fraction(cov.visited_cells, mov.visited_cells),
                    );
                }
            }
        }
    }

    let mut warnings = Vec::new();
    dominance_warnings(&by_point, &mut warnings);
    monotonicity_warnings(&by_point, &mut warnings);
    if !warnings.is_empty() {
        let _ = writeln!(report);
        for warning in &warnings {
            let _ = writeln!(report, "warning: {warning}");
        }
    }
    let _ = writeln!(report, "\nviolations: {}", warnings.len());
    Ok(report)
}

/// The exact coverage maximizer should never trail a heuristic run under
/// the same static strategy; a capped solve can, and deserves the flag.
fn dominance_warnings(
    by_point: &BTreeMap<PointKey, (SweepPoint, BTreeMap<Pair, Representative>)>,
    warnings: &mut Vec<String>,
) {
    for (point, reps) in by_point.values() {
        for &static_strategy in &[StaticStrategy::Random, StaticStrategy::Milp] {
            let Some(exact) = reps.get(&(static_strategy, MobileStrategy::MilpCov)) else {
                continue;
            };
            for heuristic in [MobileStrategy::Greedy, MobileStrategy::Random] {
                if let Some(rival) = reps.get(&(static_strategy, heuristic)) {
                    if exact.covered_cells + 1e-9 < rival.covered_cells {
                        warnings.push(format!(
                            "milp-cov trails {heuristic} at {point} ({:.2} vs {:.2} cells)",
                            exact.covered_cells, rival.covered_cells
                        ));
                    }
                }
            }
        }
    }
}

/// At a full-coverage target, adding nodes must never cost movements.
fn monotonicity_warnings(
    by_point: &BTreeMap<PointKey, (SweepPoint, BTreeMap<Pair, Representative>)>,
    warnings: &mut Vec<String>,
) {
    // Key: everything but the axis under test, plus the strategy pair.
    let mut by_static_axis: BTreeMap<(PointKey, Pair), Vec<(usize, f64)>> = BTreeMap::new();
    let mut by_mobile_axis: BTreeMap<(PointKey, Pair), Vec<(usize, f64)>> = BTreeMap::new();
    for (point, reps) in by_point.values() {
        if point.coverage_target != 1.0 {
            continue;
        }
        for (pair, rep) in reps {
            if pair.1 != MobileStrategy::MilpMov {
                continue;
            }
            let mut minus_static = *point;
            minus_static.num_static = 0;
            by_static_axis
                .entry((minus_static.key(), *pair))
                .or_default()
                .push((point.num_static, rep.total_movements));
            let mut minus_mobile = *point;
            minus_mobile.num_mobile = 0;
            by_mobile_axis
                .entry((minus_mobile.key(), *pair))
                .or_default()
                .push((point.num_mobile, rep.total_movements));
        }
    }
    for (axis_name, groups) in
        [("static", by_static_axis), ("mobile", by_mobile_axis)]
    {
        for mut series in groups.into_values() {
            series.sort_by_key(|&(count, _)| count);
            for window in series.windows(2) {
                let (low_count, low_movements) = window[0];
                let (high_count, high_movements) = window[1];
                if high_movements > low_movements + 1e-9 {
                    warnings.push(format!(
                        "movements rose from {low_movements:.2} to {high_movements:.2} \
                         when {axis_name} nodes grew {low_count} -> {high_count}"
                    ));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests;
