use super::*;

fn tiny_config() -> ScenarioConfig {
    ScenarioConfig {
        grid: GridConfig { rows: 3, cols: 3 },
        axes: Axes {
            num_static: vec![1],
            num_mobile: vec![1],
            max_steps: vec![2],
            travel_range: vec![1],
            sensing_radius: vec![1],
            coverage_target: vec![1.0],
        },
        ..ScenarioConfig::new()
    }
}

fn sample_row() -> ResultRow {
    ResultRow {
        rows: 7,
        cols: 7,
        sensing_radius: 1,
        num_static: 2,
        num_mobile: 1,
        max_steps: 2,
        travel_range_x: 2,
        travel_range_y: 2,
        coverage_target: 1.0,
        static_strategy: StaticStrategy::Milp,
        mobile_strategy: MobileStrategy::MilpCov,
        seed: None,
        statistic: Statistic::Sample,
        status: Some(SolveStatus::Optimal),
        covered_cells: 34.0,
        coverage_percent: 100.0 * 34.0 / 49.0,
        total_movements: 2.0,
        visited_cells: 4.0,
        objective_value: Some(16.0),
        solve_ms: None,
    }
}

#[test]
fn minimal_document_fills_defaults() {
    let config = ScenarioConfig::from_json(r#"{"schema": "meshplan-bench/1"}"#).unwrap();
    assert_eq!(config.grid, GridConfig { rows: 7, cols: 7 });
    assert_eq!(config.axes, Axes::default());
    assert_eq!(config.strategies.static_strategies, vec![StaticStrategy::Milp]);
    assert_eq!(config.strategies.mobile_strategies, vec![MobileStrategy::MilpCov]);
    assert_eq!(config.effective_seeds(), (1..=20).collect::<Vec<_>>());
    assert!(!config.include_timing);
}

#[test]
fn unknown_fields_are_rejected_by_name() {
    let error = ScenarioConfig::from_json(r#"{"schema": "meshplan-bench/1", "grdi": {}}"#)
        .unwrap_err();
    assert!(error.to_string().contains("grdi"), "{error}");
}

#[test]
fn wrong_schema_is_rejected() {
    let error =
        ScenarioConfig::from_json(r#"{"schema": "meshplan-bench/0"}"#).unwrap_err();
    assert!(matches!(error, BenchError::Config { ref path, .. } if path == "schema"), "{error}");
}

#[test]
fn seed_list_and_seed_count_are_mutually_exclusive() {
    let config = ScenarioConfig {
        seeds: Some(vec![1, 2]),
        seed_count: Some(2),
        ..ScenarioConfig::new()
    };
    let error = config.validate().unwrap_err();
    assert!(matches!(error, BenchError::Config { ref path, .. } if path == "seeds"), "{error}");
}

#[test]
fn empty_axes_are_rejected_with_their_path() {
    let config = ScenarioConfig {
        axes: Axes { num_static: vec![], ..Axes::default() },
        ..ScenarioConfig::new()
    };
    let error = config.validate().unwrap_err();
    assert!(
        matches!(error, BenchError::Config { ref path, .. } if path == "axes.num_static"),
        "{error}"
    );
}

#[test]
fn coverage_targets_outside_the_unit_interval_are_rejected() {
    for target in [0.0, -0.5, 1.5] {
        let config = ScenarioConfig {
            axes: Axes { coverage_target: vec![target], ..Axes::default() },
            ..ScenarioConfig::new()
        };
        assert!(config.validate().is_err(), "target {target} slipped through");
    }
}

#[test]
fn duplicate_strategies_are_rejected() {
    let config = ScenarioConfig {
        strategies: StrategyMatrix {
            static_strategies: vec![StaticStrategy::Milp, StaticStrategy::Milp],
            mobile_strategies: vec![MobileStrategy::Greedy],
        },
        ..ScenarioConfig::new()
    };
    assert!(config.validate().is_err());
}

#[test]
fn stochastic_strategies_need_a_seed() {
    let config = ScenarioConfig {
        strategies: StrategyMatrix {
            static_strategies: vec![StaticStrategy::Random],
            mobile_strategies: vec![MobileStrategy::Greedy],
        },
        seeds: Some(vec![]),
        ..ScenarioConfig::new()
    };
    let error = config.validate().unwrap_err();
    assert!(matches!(error, BenchError::Config { ref path, .. } if path == "seeds"), "{error}");
}

#[test]
fn deterministic_pairs_collapse_the_seed_axis() {
    let config = ScenarioConfig {
        strategies: StrategyMatrix {
            static_strategies: vec![StaticStrategy::Milp],
            mobile_strategies: vec![MobileStrategy::Greedy],
        },
        seeds: Some(vec![1, 2, 3]),
        ..tiny_config()
    };
    let rows = run_scenario(&config, None).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].seed, None);
    assert_eq!(rows[0].statistic, Statistic::Sample);
    assert_eq!(rows[0].status, Some(SolveStatus::Optimal));
}

#[test]
fn stochastic_pairs_fan_out_and_summarize() {
    let config = ScenarioConfig {
        strategies: StrategyMatrix {
            static_strategies: vec![StaticStrategy::Random],
            mobile_strategies: vec![MobileStrategy::Greedy],
        },
        seeds: Some(vec![1, 2, 3]),
        ..tiny_config()
    };
    let rows = run_scenario(&config, None).unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0].seed, Some(1));
    assert_eq!(rows[1].seed, Some(2));
    assert_eq!(rows[2].seed, Some(3));
    assert_eq!(rows[3].statistic, Statistic::Mean);
    assert_eq!(rows[4].statistic, Statistic::StdDev);

    let samples: Vec<f64> = rows[..3].iter().map(|r| r.covered_cells).collect();
    let expected_mean = samples.iter().sum::<f64>() / 3.0;
    assert_eq!(rows[3].covered_cells, expected_mean);
    let expected_var =
        samples.iter().map(|v| (v - expected_mean).powi(2)).sum::<f64>() / 2.0;
    assert!((rows[4].covered_cells - expected_var.sqrt()).abs() < 1e-12);
    assert_eq!(rows[3].seed, None);
    assert_eq!(rows[3].status, None);
}

#[test]
fn a_single_seed_has_zero_spread() {
    let config = ScenarioConfig {
        strategies: StrategyMatrix {
            static_strategies: vec![StaticStrategy::Random],
            mobile_strategies: vec![MobileStrategy::Greedy],
        },
        seeds: Some(vec![7]),
        ..tiny_config()
    };
    let rows = run_scenario(&config, None).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2].statistic, Statistic::StdDev);
    assert_eq!(rows[2].covered_cells, 0.0);
    assert_eq!(rows[2].coverage_percent, 0.0);
}

#[test]
fn no_sweep_point_is_dropped() {
    // Two axis points, one deterministic pair and one stochastic pair
    // with two seeds: 2 x (1 + 2) samples plus 2 x 2 summary rows.
    let config = ScenarioConfig {
        axes: Axes { num_mobile: vec![1, 2], ..tiny_config().axes },
        strategies: StrategyMatrix {
            static_strategies: vec![StaticStrategy::Random, StaticStrategy::Milp],
            mobile_strategies: vec![MobileStrategy::Greedy],
        },
        seeds: Some(vec![1, 2]),
        ..tiny_config()
    };
    let rows = run_scenario(&config, None).unwrap();
    assert_eq!(rows.len(), 10);
}

#[test]
fn scheduling_does_not_change_the_bytes() {
    let config = ScenarioConfig {
        axes: Axes { num_mobile: vec![1, 2], ..tiny_config().axes },
        strategies: StrategyMatrix {
            static_strategies: vec![StaticStrategy::Random, StaticStrategy::Milp],
            mobile_strategies: vec![MobileStrategy::Greedy, MobileStrategy::MilpCov],
        },
        seeds: Some(vec![1, 2, 3]),
        ..tiny_config()
    };
    let mut narrow = Vec::new();
    write_csv(&run_scenario(&config, Some(1)).unwrap(), &mut narrow).unwrap();
    let mut wide = Vec::new();
    write_csv(&run_scenario(&config, Some(4)).unwrap(), &mut wide).unwrap();
    assert_eq!(narrow, wide);
}

#[test]
fn one_row_serializes_to_header_plus_line() {
    let mut bytes = Vec::new();
    write_csv(&[sample_row()], &mut bytes).unwrap();
    let text = String::from_utf8(bytes).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(
        lines.next().unwrap(),
        "7,7,1,2,1,2,2,2,1,milp,milp-cov,,,optimal,34,69.39,2,4,16.00,"
    );
    assert_eq!(lines.next(), None);
    assert!(text.ends_with('\n'));
}

#[test]
fn summary_rows_serialize_with_fixed_precision() {
    let row = ResultRow {
        statistic: Statistic::Mean,
        seed: None,
        status: None,
        covered_cells: 31.5,
        coverage_percent: 64.28571,
        total_movements: 2.25,
        visited_cells: 4.0,
        objective_value: None,
        ..sample_row()
    };
    let fields = row.to_fields();
    assert_eq!(fields[12], "mean");
    assert_eq!(fields[14], "31.50");
    assert_eq!(fields[15], "64.29");
    assert_eq!(fields[16], "2.25");
    assert_eq!(fields[17], "4.00");
}

#[test]
fn empty_tables_are_refused() {
    let mut bytes = Vec::new();
    assert!(matches!(write_csv(&[], &mut bytes), Err(BenchError::EmptyRows)));
}

#[test]
fn csv_reserialization_is_lossless() {
    let config = ScenarioConfig {
        strategies: StrategyMatrix {
            static_strategies: vec![StaticStrategy::Random, StaticStrategy::Milp],
            mobile_strategies: vec![MobileStrategy::Greedy, MobileStrategy::MilpCov],
        },
        seeds: Some(vec![1, 2]),
        ..tiny_config()
    };
    let rows = run_scenario(&config, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    emit_csv(&rows, &path).unwrap();
    let parsed = read_csv(&path).unwrap();
    assert_eq!(parsed.len(), rows.len());
    // Parsed rows hold the serialized (rounded) numbers, so the honest
    // roundtrip check is on the canonical bytes.
    let mut first = Vec::new();
    write_csv(&rows, &mut first).unwrap();
    let mut second = Vec::new();
    write_csv(&parsed, &mut second).unwrap();
    assert_eq!(first, second);
}

#[test]
fn coverage_percent_recomputes_from_covered_cells() {
    let config = ScenarioConfig {
        strategies: StrategyMatrix {
            static_strategies: vec![StaticStrategy::Random],
            mobile_strategies: vec![MobileStrategy::Random],
        },
        seeds: Some(vec![1, 2, 3, 4]),
        ..tiny_config()
    };
    for row in run_scenario(&config, None).unwrap() {
        if row.statistic == Statistic::Sample {
            let total = f64::from(row.rows * row.cols);
            assert_eq!(row.coverage_percent, 100.0 * row.covered_cells / total);
        }
    }
}

#[test]
fn capped_solves_keep_the_run_going() {
    let config = ScenarioConfig {
        solver: SolverOverrides { max_nodes: Some(1), max_seconds: None },
        ..tiny_config()
    };
    let rows = run_scenario(&config, None).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].status.is_some());
}

#[test]
fn timing_column_is_opt_in() {
    let timed = ScenarioConfig { include_timing: true, ..tiny_config() };
    let rows = run_scenario(&timed, None).unwrap();
    assert!(rows[0].solve_ms.is_some());
    let untimed = tiny_config();
    let rows = run_scenario(&untimed, None).unwrap();
    assert!(rows[0].solve_ms.is_none());
}

#[test]
fn exact_coverage_never_trails_greedy_here() {
    let config = ScenarioConfig {
        grid: GridConfig { rows: 4, cols: 4 },
        axes: Axes {
            num_static: vec![1],
            num_mobile: vec![1],
            max_steps: vec![2],
            travel_range: vec![1],
            sensing_radius: vec![1],
            coverage_target: vec![1.0],
        },
        strategies: StrategyMatrix {
            static_strategies: vec![StaticStrategy::Milp],
            mobile_strategies: vec![MobileStrategy::Greedy, MobileStrategy::MilpCov],
        },
        ..ScenarioConfig::new()
    };
    let rows = run_scenario(&config, None).unwrap();
    let coverage = |strategy| {
        rows.iter()
            .find(|r| r.mobile_strategy == strategy)
            .map(|r| r.covered_cells)
            .unwrap()
    };
    assert!(coverage(MobileStrategy::MilpCov) >= coverage(MobileStrategy::Greedy));
    let report = compare_report(&rows).unwrap();
    assert!(report.contains("violations: 0"), "{report}");
}

#[test]
fn comparison_needs_two_strategies() {
    let rows = vec![sample_row()];
    assert!(matches!(compare_report(&rows), Err(BenchError::SingleStrategy(1))));
}

#[test]
fn comparison_ranks_by_coverage() {
    let exact = sample_row();
    let greedy = ResultRow {
        mobile_strategy: MobileStrategy::Greedy,
        covered_cells: 30.0,
        coverage_percent: 100.0 * 30.0 / 49.0,
        total_movements: 4.0,
        visited_cells: 4.0,
        status: None,
        objective_value: None,
        ..sample_row()
    };
    let report = compare_report(&[greedy, exact]).unwrap();
    let exact_at = report.find("1. milp+milp-cov").expect("exact ranks first");
    let greedy_at = report.find("2. milp+greedy").expect("greedy ranks second");
    assert!(exact_at < greedy_at, "{report}");
    assert!(report.contains("8.16 pp behind"), "{report}");
    assert!(report.contains("violations: 0"), "{report}");
}

#[test]
fn comparison_flags_a_beaten_exact_solver() {
    let capped = ResultRow {
        status: Some(SolveStatus::NodeLimit),
        covered_cells: 20.0,
        coverage_percent: 100.0 * 20.0 / 49.0,
        ..sample_row()
    };
    let greedy = ResultRow {
        mobile_strategy: MobileStrategy::Greedy,
        covered_cells: 30.0,
        coverage_percent: 100.0 * 30.0 / 49.0,
        status: None,
        objective_value: None,
        ..sample_row()
    };
    let report = compare_report(&[capped, greedy]).unwrap();
    assert!(report.contains("milp-cov trails greedy"), "{report}");
    assert!(report.contains("violations: 1"), "{report}");
}

#[test]
fn comparison_reports_movement_savings() {
    let cov = ResultRow { total_movements: 10.0, visited_cells: 8.0, ..sample_row() };
    let mov = ResultRow {
        mobile_strategy: MobileStrategy::MilpMov,
        total_movements: 6.0,
        visited_cells: 6.0,
        ..sample_row()
    };
    let report = compare_report(&[cov, mov]).unwrap();
    assert!(report.contains("transitions 40.00%"), "{report}");
    assert!(report.contains("visited cells 25.00%"), "{report}");
}

#[test]
fn comparison_refuses_savings_after_a_coverage_regression() {
    let cov = sample_row();
    let mov = ResultRow {
        mobile_strategy: MobileStrategy::MilpMov,
        covered_cells: 30.0,
        coverage_percent: 100.0 * 30.0 / 49.0,
        total_movements: 0.0,
        visited_cells: 0.0,
        ..sample_row()
    };
    let report = compare_report(&[cov, mov]).unwrap();
    assert!(report.contains("not comparable, coverage regressed"), "{report}");
}

#[test]
fn comparison_flags_movements_that_rise_with_fleet_size() {
    let small = ResultRow {
        mobile_strategy: MobileStrategy::MilpMov,
        num_static: 2,
        total_movements: 2.0,
        ..sample_row()
    };
    let large = ResultRow {
        mobile_strategy: MobileStrategy::MilpMov,
        num_static: 3,
        total_movements: 3.0,
        ..sample_row()
    };
    // A second strategy pair so the comparison accepts the input.
    let other = ResultRow { mobile_strategy: MobileStrategy::Greedy, ..sample_row() };
    let report = compare_report(&[small, large, other]).unwrap();
    assert!(report.contains("movements rose"), "{report}");
    assert!(report.contains("violations: 1"), "{report}");
}

#[test]
fn mean_rows_outrank_recomputed_samples_in_comparisons() {
    // A mean row and disagreeing samples: the mean row must win.
    let mean_row = ResultRow {
        statistic: Statistic::Mean,
        seed: None,
        covered_cells: 25.0,
        coverage_percent: 100.0 * 25.0 / 49.0,
        ..sample_row()
    };
    let stray_sample = ResultRow { seed: Some(1), covered_cells: 10.0, ..sample_row() };
    let greedy = ResultRow {
        mobile_strategy: MobileStrategy::Greedy,
        covered_cells: 20.0,
        coverage_percent: 100.0 * 20.0 / 49.0,
        ..sample_row()
    };
    let report = compare_report(&[mean_row, stray_sample, greedy]).unwrap();
    assert!(report.contains("coverage 51.02% (25.00 cells)"), "{report}");
    assert!(report.contains("violations: 0"), "{report}");
}

#[test]
fn rows_sort_by_axes_then_strategy_then_seed() {
    let mut rows = vec![
        ResultRow { num_static: 2, seed: Some(2), ..sample_row() },
        ResultRow { statistic: Statistic::Mean, seed: None, ..sample_row() },
        ResultRow { num_static: 2, seed: Some(1), ..sample_row() },
        ResultRow { seed: Some(5), ..sample_row() },
        ResultRow { num_static: 1, ..sample_row() },
    ];
    rows.sort_by(row_order);
    assert_eq!(rows[0].num_static, 1);
    assert_eq!(rows[1].seed, Some(1));
    assert_eq!(rows[2].seed, Some(2));
    assert_eq!(rows[3].seed, Some(5));
    assert_eq!(rows[4].statistic, Statistic::Mean);
}

#[test]
fn zero_fleets_are_legal_sweep_points() {
    let config = ScenarioConfig {
        axes: Axes {
            num_static: vec![0],
            num_mobile: vec![0],
            ..tiny_config().axes
        },
        ..tiny_config()
    };
    let rows = run_scenario(&config, None).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].covered_cells, 0.0);
    assert_eq!(rows[0].status, None);
}
