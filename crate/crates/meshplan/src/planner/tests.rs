use std::collections::BTreeSet;

use num_rational::Ratio;

use super::*;
use crate::bip::{SolveStatus, SolverConfig};
use crate::grid::{CellCoord, GridSpec};

fn cfg() -> SolverConfig<f64> {
    SolverConfig::default()
}

fn grid(rows: u32, cols: u32, sensing_radius: u32, alpha: Ratio<i64>) -> GridSpec {
    GridSpec::new(rows, cols, sensing_radius, alpha).unwrap()
}

fn no_bonus() -> Ratio<i64> {
    Ratio::new(0, 1)
}

fn at(i: u32, j: u32) -> CellCoord {
    CellCoord::new(i, j)
}

#[test]
fn static_model_centers_a_single_node_on_3x3() {
    let mut params = ScenarioParams::new(grid(3, 3, 1, no_bonus()));
    params.num_static = 1;
    let (model, info) = build_static_model::<f64>(&params).unwrap();
    let solution = model.solve_exact(&cfg()).unwrap();
    assert_eq!(solution.status, SolveStatus::Optimal);
    assert_eq!(solution.objective_value, Some(9.0));
    let plan = decode_static(&solution, &info).unwrap();
    assert_eq!(plan.positions, vec![at(2, 2)]);
}

#[test]
fn boundary_bonus_pulls_the_node_toward_the_edge() {
    // With the default half bonus, the best single placement still covers
    // 9 cells but stands next to a corner, touching 5 boundary cells:
    // objective 2*9 + 1*5 = 23.
    let params = ScenarioParams::new(grid(7, 7, 1, GridSpec::default_boundary_weight()));
    let (model, info) = build_static_model::<f64>(&params).unwrap();
    let solution = model.solve_exact(&cfg()).unwrap();
    assert_eq!(solution.objective_value, Some(23.0));
    let plan = decode_static(&solution, &info).unwrap();
    let eval = params.grid.static_coverage(&plan).unwrap();
    assert_eq!(eval.covered_count(), 9);
    let boundary_covered = eval
        .covered_cells
        .iter()
        .filter(|&&c| params.grid.is_boundary(c))
        .count();
    assert_eq!(boundary_covered, 5);
}

#[test]
fn tight_overlap_limit_forces_disjoint_patches() {
    let mut params = ScenarioParams::new(grid(7, 7, 1, no_bonus()));
    params.num_static = 2;
    params.static_overlap_limit = 1;
    let (model, info) = build_static_model::<f64>(&params).unwrap();
    let solution = model.solve_exact(&cfg()).unwrap();
    assert_eq!(solution.objective_value, Some(18.0));
    let plan = decode_static(&solution, &info).unwrap();
    let eval = params.grid.static_coverage(&plan).unwrap();
    assert_eq!(eval.covered_count(), 18);
    assert!(eval.overlap_histogram.values().all(|&n| n == 1));
}

#[test]
fn static_model_requires_a_node() {
    let mut params = ScenarioParams::new(grid(3, 3, 1, no_bonus()));
    params.num_static = 0;
    assert!(matches!(
        build_static_model::<f64>(&params),
        Err(PlanError::InvalidScenario(_))
    ));
}

#[test]
fn decode_accepts_limit_hit_incumbents() {
    let params = ScenarioParams::new(grid(3, 3, 1, no_bonus()));
    let (model, info) = build_static_model::<f64>(&params).unwrap();
    let mut solution = model.solve_exact(&cfg()).unwrap();
    solution.status = SolveStatus::NodeLimit;
    let plan = decode_static(&solution, &info).unwrap();
    assert_eq!(plan.positions.len(), 1);
}

#[test]
fn decode_refuses_solutions_without_a_plan() {
    let params = ScenarioParams::new(grid(3, 3, 1, no_bonus()));
    let (model, info) = build_static_model::<f64>(&params).unwrap();
    let mut solution = model.solve_exact(&cfg()).unwrap();
    solution.status = SolveStatus::NodeLimit;
    solution.assignment = None;
    assert!(matches!(
        decode_static(&solution, &info),
        Err(PlanError::NotOptimal(SolveStatus::NodeLimit))
    ));
}

#[test]
fn cov_model_reaches_a_single_uncovered_cell() {
    let mut params = ScenarioParams::new(grid(3, 3, 1, no_bonus()));
    params.num_mobile = 1;
    params.max_steps = 1;
    let uncovered: BTreeSet<CellCoord> = [at(1, 1)].into_iter().collect();
    let (model, info) = build_cov_model::<f64>(&params, &uncovered).unwrap();
    let solution = model.solve_exact(&cfg()).unwrap();
    assert_eq!(solution.objective_value, Some(1.0));
    let plan = decode_mobile(&solution, &info).unwrap();
    let pos = plan.trajectories[0][0].expect("coverage nodes occupy every step");
    assert!(pos.chebyshev(at(1, 1)) <= 1);
}

#[test]
fn cov_model_with_nothing_uncovered_is_trivially_feasible() {
    let mut params = ScenarioParams::new(grid(3, 3, 1, no_bonus()));
    params.num_mobile = 2;
    params.max_steps = 2;
    let (model, info) = build_cov_model::<f64>(&params, &BTreeSet::new()).unwrap();
    let solution = model.solve_exact(&cfg()).unwrap();
    assert_eq!(solution.status, SolveStatus::Optimal);
    assert_eq!(solution.objective_value, Some(0.0));
    let plan = decode_mobile(&solution, &info).unwrap();
    assert_eq!(plan.num_nodes(), 2);
    assert_eq!(plan.num_steps(), 2);
    assert!(plan.trajectories.iter().flatten().all(|p| p.is_some()));
}

#[test]
fn cov_trajectories_respect_travel_range() {
    let mut params = ScenarioParams::new(grid(4, 4, 0, no_bonus()));
    params.num_mobile = 1;
    params.max_steps = 3;
    params.travel_range = TravelRange::uniform(1);
    let uncovered: BTreeSet<CellCoord> = params.grid.cells().collect();
    let (model, info) = build_cov_model::<f64>(&params, &uncovered).unwrap();
    let solution = model.solve_exact(&cfg()).unwrap();
    // r_s = 0 means a node covers only the cell it stands on.
    assert_eq!(solution.objective_value, Some(3.0));
    let plan = decode_mobile(&solution, &info).unwrap();
    params.grid.evaluate_combined(&StaticPlan::empty(), &plan).unwrap();
}

#[test]
fn mov_model_with_met_target_stays_home() {
    let mut params = ScenarioParams::new(grid(3, 3, 1, no_bonus()));
    params.num_mobile = 1;
    params.max_steps = 2;
    let (model, info) = build_mov_model::<f64>(&params, &BTreeSet::new(), 9).unwrap();
    let solution = model.solve_exact(&cfg()).unwrap();
    assert_eq!(solution.objective_value, Some(0.0));
    let plan = decode_mobile(&solution, &info).unwrap();
    assert!(plan.trajectories.iter().flatten().all(|p| p.is_none()));
}

#[test]
fn mov_model_covers_3x3_with_one_visit() {
    let mut params = ScenarioParams::new(grid(3, 3, 1, no_bonus()));
    params.num_static = 0;
    params.num_mobile = 1;
    params.max_steps = 2;
    params.travel_range = TravelRange::uniform(1);
    let uncovered: BTreeSet<CellCoord> = params.grid.cells().collect();
    let (model, info) = build_mov_model::<f64>(&params, &uncovered, 0).unwrap();
    let solution = model.solve_exact(&cfg()).unwrap();
    assert_eq!(solution.objective_value, Some(1.0));
    let plan = decode_mobile(&solution, &info).unwrap();
    let eval = params.grid.evaluate_combined(&StaticPlan::empty(), &plan).unwrap();
    assert_eq!(eval.active_node_steps, 1);
    assert_eq!(eval.total_movements, 0);
    assert!(eval.is_fully_covered());
}

#[test]
fn mov_model_reports_unreachable_targets_as_infeasible() {
    let mut params = ScenarioParams::new(grid(5, 5, 0, no_bonus()));
    params.num_mobile = 1;
    params.max_steps = 1;
    params.coverage_ratio_target = 1.0;
    let uncovered: BTreeSet<CellCoord> = params.grid.cells().collect();
    let (model, _) = build_mov_model::<f64>(&params, &uncovered, 0).unwrap();
    let solution = model.solve_exact(&cfg()).unwrap();
    assert_eq!(solution.status, SolveStatus::Infeasible);
}

#[test]
fn mobile_models_reject_empty_fleets() {
    let mut params = ScenarioParams::new(grid(3, 3, 1, no_bonus()));
    params.num_mobile = 0;
    assert!(build_cov_model::<f64>(&params, &BTreeSet::new()).is_err());
    params.num_mobile = 1;
    params.max_steps = 0;
    assert!(build_cov_model::<f64>(&params, &BTreeSet::new()).is_err());
}

#[test]
fn scenario_validation_rejects_bad_coverage_targets() {
    let mut params = ScenarioParams::new(grid(3, 3, 1, no_bonus()));
    params.coverage_ratio_target = 0.0;
    assert!(params.validate().is_err());
    params.coverage_ratio_target = 1.2;
    assert!(params.validate().is_err());
    params.coverage_ratio_target = 1.0;
    assert!(params.validate().is_ok());
}

/// The 2x3 placement model has 18 binaries, small enough for the
/// exhaustive solver to cross-check the whole encoding.
#[test]
fn static_encoding_matches_brute_force() {
    let mut params = ScenarioParams::new(grid(2, 3, 1, GridSpec::default_boundary_weight()));
    params.num_static = 1;
    let (model, _) = build_static_model::<f64>(&params).unwrap();
    assert!(model.num_vars() <= 20);
    let exact = model.solve_exact(&cfg()).unwrap();
    let brute = model.solve_bruteforce().unwrap();
    assert_eq!(exact.status, brute.status);
    assert_eq!(exact.objective_value, brute.objective_value);
}

#[test]
fn cov_encoding_matches_brute_force() {
    let mut params = ScenarioParams::new(grid(2, 2, 1, no_bonus()));
    params.num_mobile = 1;
    params.max_steps = 1;
    params.travel_range = TravelRange::uniform(1);
    let uncovered: BTreeSet<CellCoord> = params.grid.cells().collect();
    let (model, _) = build_cov_model::<f64>(&params, &uncovered).unwrap();
    assert!(model.num_vars() <= 20);
    let exact = model.solve_exact(&cfg()).unwrap();
    let brute = model.solve_bruteforce().unwrap();
    assert_eq!(exact.objective_value, brute.objective_value);
}

#[test]
fn mov_encoding_matches_brute_force() {
    let mut params = ScenarioParams::new(grid(2, 2, 1, no_bonus()));
    params.num_mobile = 1;
    params.max_steps = 1;
    params.travel_range = TravelRange::uniform(1);
    params.coverage_ratio_target = 1.0;
    let uncovered: BTreeSet<CellCoord> = params.grid.cells().collect();
    let (model, _) = build_mov_model::<f64>(&params, &uncovered, 0).unwrap();
    assert!(model.num_vars() <= 20);
    let exact = model.solve_exact(&cfg()).unwrap();
    let brute = model.solve_bruteforce().unwrap();
    assert_eq!(exact.objective_value, brute.objective_value);
}

#[test]
fn pipeline_without_mobile_nodes_equals_static_coverage() {
    let mut params = ScenarioParams::new(grid(5, 5, 1, no_bonus()));
    params.num_static = 1;
    params.num_mobile = 0;
    let plan = plan_network::<f64>(&params, MobileMode::Cov, &cfg()).unwrap();
    assert!(plan.is_optimal());
    assert!(plan.mobile_stage.is_none());
    let static_eval = params.grid.static_coverage(&plan.static_plan).unwrap();
    assert_eq!(plan.evaluation, static_eval);
}

#[test]
fn pipeline_without_static_nodes_routes_over_the_whole_grid() {
    let mut params = ScenarioParams::new(grid(3, 3, 1, no_bonus()));
    params.num_static = 0;
    params.num_mobile = 1;
    params.max_steps = 1;
    let plan = plan_network::<f64>(&params, MobileMode::Cov, &cfg()).unwrap();
    assert!(plan.static_stage.is_none());
    assert!(plan.static_plan.positions.is_empty());
    assert_eq!(plan.evaluation.covered_count(), 9);
}

#[test]
fn pipeline_flags_unreachable_coverage_targets() {
    let mut params = ScenarioParams::new(grid(5, 5, 0, no_bonus()));
    params.num_static = 1;
    params.num_mobile = 1;
    params.max_steps = 1;
    params.coverage_ratio_target = 1.0;
    let plan = plan_network::<f64>(&params, MobileMode::Mov, &cfg()).unwrap();
    assert!(!plan.is_optimal());
    assert_eq!(plan.mobile_stage.as_ref().unwrap().status, SolveStatus::Infeasible);
    assert!(plan.notes.iter().any(|n| n.contains("unreachable")));
    // The static half of the plan is still returned and scored.
    assert_eq!(plan.evaluation.covered_count(), 1);
}

#[test]
fn cov_coverage_grows_with_the_horizon() {
    let mut covered = Vec::new();
    for max_steps in 1..=3 {
        let mut params = ScenarioParams::new(grid(4, 4, 1, no_bonus()));
        params.num_static = 0;
        params.num_mobile = 1;
        params.max_steps = max_steps;
        params.travel_range = TravelRange::uniform(2);
        let plan = plan_network::<f64>(&params, MobileMode::Cov, &cfg()).unwrap();
        covered.push(plan.evaluation.covered_count());
    }
    assert!(covered.windows(2).all(|w| w[0] <= w[1]), "{covered:?}");
}

/// Manual timing probe for the full-size 7x7 configurations; run with
/// `cargo test -p meshplan probe_full_size -- --ignored --nocapture`.
#[test]
#[ignore]
fn probe_full_size_solves() {
    let defaults = GridSpec::default_boundary_weight();
    for (num_mobile, num_static) in [(1usize, 1usize), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2)] {
        let mut params = ScenarioParams::new(grid(7, 7, 1, defaults));
        params.num_static = num_static;
        params.num_mobile = num_mobile;
        params.max_steps = 2;
        params.travel_range = TravelRange::uniform(2);
        let started = std::time::Instant::now();
        let plan = plan_network::<f64>(&params, MobileMode::Cov, &cfg()).unwrap();
        let stage = plan.mobile_stage.as_ref().unwrap();
        println!(
            "cov N_m={num_mobile} N_s={num_static}: covered={}/49 nodes={} lp_iters={} \
             elapsed={:.2?}",
            plan.evaluation.covered_count(),
            stage.stats.nodes,
            stage.stats.lp_iterations,
            started.elapsed(),
        );
    }
    for (rho, max_steps) in [(1u32, 2usize), (3, 2), (5, 2), (5, 3)] {
        let mut params = ScenarioParams::new(grid(7, 7, 1, defaults));
        params.num_static = 1;
        params.num_mobile = 2;
        params.max_steps = max_steps;
        params.travel_range = TravelRange::uniform(rho);
        let started = std::time::Instant::now();
        let plan = plan_network::<f64>(&params, MobileMode::Cov, &cfg()).unwrap();
        let stage = plan.mobile_stage.as_ref().unwrap();
        println!(
            "cov rho={rho} K={max_steps}: covered={}/49 nodes={} lp_iters={} elapsed={:.2?}",
            plan.evaluation.covered_count(),
            stage.stats.nodes,
            stage.stats.lp_iterations,
            started.elapsed(),
        );
    }
    for (num_mobile, num_static) in [(3usize, 1usize), (3, 2), (2, 1), (2, 2)] {
        let mut params = ScenarioParams::new(grid(7, 7, 1, defaults));
        params.num_static = num_static;
        params.num_mobile = num_mobile;
        params.max_steps = 2;
        params.travel_range = TravelRange::uniform(2);
        let mut config = cfg();
        config.max_seconds = 60.0;
        for seed in 1..=3u64 {
            let placement = crate::baseline::random_static_placement(
                &params,
                crate::baseline::RngSeed(seed),
            )
            .unwrap();
            let uncovered = params.grid.uncovered_after_static(&placement).unwrap();
            let lap = std::time::Instant::now();
            let (model, _info) = build_cov_model::<f64>(&params, &uncovered).unwrap();
            match model.solve_exact(&config) {
                Ok(solution) => println!(
                    "rand+cov N_m={num_mobile} N_s={num_static} seed={seed}: status={} \
                     obj={:?} nodes={} elapsed={:.2?}",
                    solution.status,
                    solution.objective_value,
                    solution.stats.nodes,
                    lap.elapsed(),
                ),
                Err(err) => println!(
                    "rand+cov N_m={num_mobile} N_s={num_static} seed={seed}: ERROR {err} \
                     elapsed={:.2?}",
                    lap.elapsed(),
                ),
            }
        }
    }
}

#[test]
#[ignore = "diagnostic: per-node cost on a hard random instance"]
fn probe_hard_instance() {
    let defaults = GridSpec::default_boundary_weight();
    let mut params = ScenarioParams::new(grid(7, 7, 1, defaults));
    params.num_static = 1;
    params.num_mobile = 3;
    params.max_steps = 2;
    params.travel_range = TravelRange::uniform(2);
    let placement =
        crate::baseline::random_static_placement(&params, crate::baseline::RngSeed(1)).unwrap();
    let uncovered = params.grid.uncovered_after_static(&placement).unwrap();
    let (model, _info) = build_cov_model::<f64>(&params, &uncovered).unwrap();
    println!(
        "model: vars={} constraints={} uncovered={}",
        model.num_vars(),
        model.constraints().len(),
        uncovered.len()
    );
    for max_nodes in [1u64, 2, 4, 8, 16] {
        let mut config = cfg();
        config.max_nodes = max_nodes;
        let started = std::time::Instant::now();
        let solution = model.solve_exact(&config).unwrap();
        println!(
            "max_nodes={max_nodes}: status={} nodes={} lp_iters={} obj={:?} elapsed={:.2?}",
            solution.status,
            solution.stats.nodes,
            solution.stats.lp_iterations,
            solution.objective_value,
            started.elapsed(),
        );
    }
}

#[test]
fn mov_never_visits_more_than_cov_occupies() {
    let mut params = ScenarioParams::new(grid(4, 4, 1, no_bonus()));
    params.num_static = 1;
    params.num_mobile = 1;
    params.max_steps = 2;
    params.travel_range = TravelRange::uniform(1);
    let cov = plan_network::<f64>(&params, MobileMode::Cov, &cfg()).unwrap();
    params.coverage_ratio_target = cov.evaluation.coverage_ratio();
    let mov = plan_network::<f64>(&params, MobileMode::Mov, &cfg()).unwrap();
    assert!(mov.is_optimal());
    assert!(mov.evaluation.covered_count() >= cov.evaluation.covered_count());
    assert!(mov.evaluation.active_node_steps <= cov.evaluation.active_node_steps);
}
