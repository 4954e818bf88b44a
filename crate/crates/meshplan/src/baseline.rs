//! Reference strategies the optimizing planners are judged against:
//! random static placement, a greedy mobile path, and a random walk.
//!
//! Everything here is reproducible: a [`RngSeed`] pins the full output of
//! the stochastic strategies, and greedy is deterministic outright.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::grid::{CellCoord, GridSpec, MobilePlan, StaticPlan};
use crate::planner::{PlanError, ScenarioParams};

/// Seed for the baselines' random streams.
///
/// All randomness flows through the ChaCha8 generator, so the same seed
/// reproduces the same plan on any platform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RngSeed(pub u64);

impl From<u64> for RngSeed {
    fn from(seed: u64) -> Self {
        RngSeed(seed)
    }
}

impl RngSeed {
    fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

/// Places the static nodes on distinct cells drawn uniformly without
/// replacement.
pub fn random_static_placement(
    params: &ScenarioParams,
    seed: RngSeed,
) -> Result<StaticPlan, PlanError> {
    let grid = &params.grid;
    let cells = grid.cell_count() as usize;
    if params.num_static > cells {
        return Err(PlanError::InvalidScenario(format!(
            "cannot place {} static nodes on {} cells",
            params.num_static, cells
        )));
    }
    let mut rng = seed.rng();
    let positions = rand::seq::index::sample(&mut rng, cells, params.num_static)
        .into_iter()
        .map(|index| grid.cell_at(index))
        .collect();
    Ok(StaticPlan::new(positions))
}

/// Routes each mobile node to the position covering the most not yet
/// covered cells, one node at a time in index order within each timestep.
///
/// Initial positions are picked the same way over the whole grid; later
/// steps are restricted to the travel range. A position whose sensing
/// square would push some cell past the overlap limit is avoided while an
/// alternative exists. Ties always go to the smallest (row, column) cell,
/// which makes the routing deterministic; the seed parameter exists so
/// every baseline shares one calling convention.
pub fn greedy_mobile_path(
    params: &ScenarioParams,
    uncovered: &BTreeSet<CellCoord>,
    _seed: RngSeed,
) -> MobilePlan {
    let grid = &params.grid;
    let mut events: BTreeMap<CellCoord, u32> = uncovered
        .iter()
        .copied()
        .filter(|&cell| grid.contains(cell))
        .map(|cell| (cell, 0))
        .collect();

    let mut trajectories: Vec<Vec<Option<CellCoord>>> =
        vec![Vec::with_capacity(params.max_steps); params.num_mobile];
    for step in 0..params.max_steps {
        for node in 0..params.num_mobile {
            let choice = match step {
                0 => pick_position(grid, grid.cells(), &events, params.mobile_overlap_limit),
                _ => {
                    let prev: CellCoord =
                        trajectories[node][step - 1].expect("greedy keeps every step occupied");
                    let reachable = grid
                        .reachable_from(prev, params.travel_range)
                        .expect("previous position is on the grid");
                    pick_position(
                        grid,
                        reachable.into_iter(),
                        &events,
                        params.mobile_overlap_limit,
                    )
                }
            };
            for covered in grid
                .neighborhood(choice, grid.sensing_radius())
                .expect("chosen position is on the grid")
            {
                if let Some(count) = events.get_mut(&covered) {
                    *count += 1;
                }
            }
            trajectories[node].push(Some(choice));
        }
    }
    MobilePlan::new(trajectories, params.travel_range)
}

/// Ranks candidates by fewest overlap violations, then most newly covered
/// cells. Iterating in ascending (row, column) order and replacing only on
/// strict improvement leaves ties with the smallest cell.
fn pick_position(
    grid: &GridSpec,
    candidates: impl Iterator<Item = CellCoord>,
    events: &BTreeMap<CellCoord, u32>,
    overlap_limit: u32,
) -> CellCoord {
    let mut best: Option<(u32, usize, CellCoord)> = None;
    for candidate in candidates {
        let mut violations = 0;
        let mut gain = 0;
        for cell in grid
            .neighborhood(candidate, grid.sensing_radius())
            .expect("candidate is on the grid")
        {
            match events.get(&cell) {
                Some(0) => gain += 1,
                Some(&count) if count >= overlap_limit => violations += 1,
                _ => {}
            }
        }
        let better = match best {
            None => true,
            Some((v, g, _)) => violations < v || (violations == v && gain > g),
        };
        if better {
            best = Some((violations, gain, candidate));
        }
    }
    best.expect("grids have at least one cell").2
}

/// Starts each node on a uniform cell and moves it to a uniform member of
/// the reachable set every step. A zero travel range therefore pins the
/// node in place.
pub fn random_walk_path(params: &ScenarioParams, seed: RngSeed) -> MobilePlan {
    let grid = &params.grid;
    let mut rng = seed.rng();
    let cells: Vec<CellCoord> = grid.cells().collect();

    let mut trajectories: Vec<Vec<Option<CellCoord>>> =
        vec![Vec::with_capacity(params.max_steps); params.num_mobile];
    for node in 0..params.num_mobile {
        for step in 0..params.max_steps {
            let choice = match step {
                0 => cells[rng.gen_range(0..cells.len())],
                _ => {
                    let prev: CellCoord =
                        trajectories[node][step - 1].expect("walk keeps every step occupied");
                    let options: Vec<CellCoord> = grid
                        .reachable_from(prev, params.travel_range)
                        .expect("previous position is on the grid")
                        .into_iter()
                        .collect();
                    options[rng.gen_range(0..options.len())]
                }
            };
            trajectories[node].push(Some(choice));
        }
    }
    MobilePlan::new(trajectories, params.travel_range)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TravelRange;

    fn travel_legal(plan: &MobilePlan, range: TravelRange) -> bool {
        plan.trajectories.iter().all(|path| {
            path.windows(2).all(|pair| match (pair[0], pair[1]) {
                (Some(a), Some(b)) => {
                    a.i.abs_diff(b.i) <= range.max_row_step
                        && a.j.abs_diff(b.j) <= range.max_col_step
                }
                _ => true,
            })
        })
    }
    use crate::bip::SolverConfig;
    use crate::grid::GridSpec;
    use crate::planner::{plan_network, MobileMode};
    use num_rational::Ratio;

    fn params(rows: u32, cols: u32) -> ScenarioParams {
        let grid = GridSpec::new(rows, cols, 1, Ratio::new(1, 2)).unwrap();
        ScenarioParams::new(grid)
    }

    #[test]
    fn single_cell_grid_has_one_possible_placement() {
        let p = params(1, 1);
        for seed in 0..5 {
            let plan = random_static_placement(&p, RngSeed(seed)).unwrap();
            assert_eq!(plan.positions, vec![CellCoord { i: 1, j: 1 }]);
        }
    }

    #[test]
    fn placement_is_reproducible_and_distinct() {
        let mut p = params(7, 7);
        p.num_static = 20;
        let a = random_static_placement(&p, RngSeed(99)).unwrap();
        let b = random_static_placement(&p, RngSeed(99)).unwrap();
        assert_eq!(a.positions, b.positions);

        let unique: BTreeSet<_> = a.positions.iter().copied().collect();
        assert_eq!(unique.len(), 20);
        assert!(a.positions.iter().all(|&c| p.grid.contains(c)));
    }

    #[test]
    fn placement_rejects_more_nodes_than_cells() {
        let mut p = params(2, 2);
        p.num_static = 5;
        assert!(random_static_placement(&p, RngSeed(0)).is_err());
    }

    #[test]
    fn placement_positions_are_uniform() {
        let p = params(7, 7);
        let mut counts = vec![0u32; 49];
        let draws = 10_000;
        for seed in 0..draws {
            let plan = random_static_placement(&p, RngSeed(seed)).unwrap();
            counts[p.grid.cell_index(plan.positions[0])] += 1;
        }
        // Chi-squared against the uniform law, 48 degrees of freedom. The
        // 99.9th percentile is about 84; a uniform sampler lands near 48.
        let expected = draws as f64 / 49.0;
        let chi2: f64 =
            counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < 85.0, "chi-squared {chi2:.1} too extreme for uniform sampling");
    }

    #[test]
    fn greedy_with_nothing_to_cover_stays_put() {
        let mut p = params(5, 5);
        p.num_mobile = 2;
        p.max_steps = 3;
        let plan = greedy_mobile_path(&p, &BTreeSet::new(), RngSeed(0));
        for path in &plan.trajectories {
            assert!(path.iter().all(|&pos| pos == Some(CellCoord { i: 1, j: 1 })));
        }
    }

    #[test]
    fn greedy_heads_for_a_lone_uncovered_cell() {
        let mut p = params(7, 7);
        p.num_mobile = 1;
        p.max_steps = 2;
        let target = CellCoord { i: 5, j: 5 };
        let uncovered: BTreeSet<_> = [target].into_iter().collect();
        let plan = greedy_mobile_path(&p, &uncovered, RngSeed(0));
        let first = plan.trajectories[0][0].unwrap();
        assert!(first.chebyshev(target) <= p.grid.sensing_radius());
        // Smallest qualifying position wins the tie.
        assert_eq!(first, CellCoord { i: 4, j: 4 });
    }

    #[test]
    fn greedy_is_deterministic_and_travel_legal() {
        let mut p = params(6, 4);
        p.num_mobile = 3;
        p.max_steps = 4;
        p.travel_range = TravelRange::uniform(1);
        let uncovered: BTreeSet<_> = p.grid.cells().collect();
        let a = greedy_mobile_path(&p, &uncovered, RngSeed(1));
        let b = greedy_mobile_path(&p, &uncovered, RngSeed(2));
        assert_eq!(a.trajectories, b.trajectories);
        assert!(travel_legal(&a, p.travel_range));
    }

    #[test]
    fn greedy_cumulative_coverage_never_drops() {
        let mut p = params(5, 5);
        p.num_mobile = 2;
        p.max_steps = 4;
        p.travel_range = TravelRange::uniform(1);
        let uncovered: BTreeSet<_> = p.grid.cells().collect();
        let plan = greedy_mobile_path(&p, &uncovered, RngSeed(0));

        let mut covered = BTreeSet::new();
        let mut last = 0;
        for step in 0..p.max_steps {
            for path in &plan.trajectories {
                let pos = path[step].unwrap();
                covered.extend(p.grid.neighborhood(pos, p.grid.sensing_radius()).unwrap());
            }
            assert!(covered.len() >= last);
            last = covered.len();
        }
        assert!(last > 0);
    }

    #[test]
    fn greedy_respects_the_overlap_limit_when_it_can() {
        let mut p = params(5, 5);
        p.num_mobile = 2;
        p.max_steps = 3;
        p.mobile_overlap_limit = 2;
        let uncovered: BTreeSet<_> = p.grid.cells().collect();
        let plan = greedy_mobile_path(&p, &uncovered, RngSeed(0));

        let mut events: BTreeMap<CellCoord, u32> = BTreeMap::new();
        for path in &plan.trajectories {
            for &pos in path {
                for cell in p.grid.neighborhood(pos.unwrap(), 1).unwrap() {
                    *events.entry(cell).or_default() += 1;
                }
            }
        }
        assert!(events.values().all(|&count| count <= 2));
    }

    #[test]
    fn walk_with_zero_range_never_moves() {
        let mut p = params(4, 4);
        p.num_mobile = 2;
        p.max_steps = 5;
        p.travel_range = TravelRange::uniform(0);
        let plan = random_walk_path(&p, RngSeed(7));
        for path in &plan.trajectories {
            assert!(path.iter().all(|&pos| pos == path[0]));
        }
    }

    #[test]
    fn walk_is_reproducible_and_travel_legal() {
        let mut p = params(6, 6);
        p.num_mobile = 3;
        p.max_steps = 6;
        p.travel_range = TravelRange::new(1, 2);
        let a = random_walk_path(&p, RngSeed(123));
        let b = random_walk_path(&p, RngSeed(123));
        assert_eq!(a.trajectories, b.trajectories);
        assert!(travel_legal(&a, p.travel_range));
        assert!(a
            .trajectories
            .iter()
            .flatten()
            .all(|pos| p.grid.contains(pos.unwrap())));
    }

    /// Optimal routing can only beat the heuristics: greedy per instance,
    /// the walk on average.
    #[test]
    fn optimizer_dominates_greedy_and_mean_random_walk() {
        let mut p = params(7, 7);
        p.num_static = 1;
        p.num_mobile = 1;
        p.max_steps = 2;

        let solver = SolverConfig::<f64>::default();
        let outcome = plan_network(&p, MobileMode::Cov, &solver).unwrap();
        assert!(outcome.is_optimal());
        let optimal = outcome.evaluation.covered_count();
        let static_plan = outcome.static_plan.clone();
        let uncovered =
            p.grid.uncovered_after_static(&static_plan).unwrap();

        let greedy = greedy_mobile_path(&p, &uncovered, RngSeed(0));
        let greedy_covered = p
            .grid
            .evaluate_combined(&static_plan, &greedy)
            .unwrap()
            .covered_count();
        assert!(greedy_covered <= optimal);

        let mut total = 0usize;
        let seeds = 100;
        for seed in 0..seeds {
            let walk = random_walk_path(&p, RngSeed(seed));
            total += p
                .grid
                .evaluate_combined(&static_plan, &walk)
                .unwrap()
                .covered_count();
        }
        let mean = total as f64 / seeds as f64;
        assert!(
            mean < optimal as f64,
            "mean random-walk coverage {mean:.2} should trail the optimum {optimal}"
        );
        assert!(greedy_covered as f64 >= mean);
    }
}
