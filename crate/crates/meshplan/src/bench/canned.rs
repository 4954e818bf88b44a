//! Stock sweep configurations behind the `table2`, `table3` and `fig4`
//! subcommands.
//!
//! All three pin every knob, including solver node caps, so their output
//! is byte-reproducible anywhere. The caps are sized for the hardest
//! instance each sweep contains; a capped run still reports its best plan
//! under a `node_limit` status instead of stalling the whole table.

use super::{
    Axes, GridConfig, MobileStrategy, OverlapLimits, ScenarioConfig, SolverOverrides,
    StaticStrategy, StrategyMatrix, SCHEMA_VERSION,
};

fn base() -> ScenarioConfig {
    ScenarioConfig {
        schema: SCHEMA_VERSION.to_string(),
        grid: GridConfig { rows: 7, cols: 7 },
        overlap: OverlapLimits { static_limit: 2, mobile_limit: 2 },
        include_timing: false,
        ..ScenarioConfig::default()
    }
}

/// Static placement comparison: random versus exact placement, each
/// finished by the coverage-maximizing mobile stage, across six fleet
/// sizes on the 7x7 grid.
pub fn table2() -> ScenarioConfig {
    ScenarioConfig {
        axes: Axes {
            num_static: vec![1, 2],
            num_mobile: vec![1, 2, 3],
            max_steps: vec![2],
            travel_range: vec![2],
            sensing_radius: vec![1],
            coverage_target: vec![1.0],
        },
        strategies: StrategyMatrix {
            static_strategies: vec![StaticStrategy::Random, StaticStrategy::Milp],
            mobile_strategies: vec![MobileStrategy::MilpCov],
        },
        seed_count: Some(20),
        solver: SolverOverrides { max_nodes: Some(250), max_seconds: None },
        output: Some("table2.csv".to_string()),
        ..base()
    }
}

/// Travel-range sweep for one static and two mobile nodes: ranges 1
/// through 5 over two timesteps, plus the top range with a third
/// timestep. Two configs because the extra-timestep point would otherwise
/// cross-product with every range.
pub fn table3() -> Vec<ScenarioConfig> {
    let solver = SolverOverrides { max_nodes: Some(3000), max_seconds: None };
    let ranges = ScenarioConfig {
        axes: Axes {
            num_static: vec![1],
            num_mobile: vec![2],
            max_steps: vec![2],
            travel_range: vec![1, 2, 3, 4, 5],
            sensing_radius: vec![1],
            coverage_target: vec![1.0],
        },
        solver,
        output: Some("table3.csv".to_string()),
        ..base()
    };
    let longer_horizon = ScenarioConfig {
        axes: Axes {
            travel_range: vec![5],
            max_steps: vec![3],
            ..ranges.axes.clone()
        },
        ..ranges.clone()
    };
    vec![ranges, longer_horizon]
}

/// Movement-minimization sweep at the full-coverage target with growing
/// static and mobile fleets. Fleets start where full coverage first
/// becomes reachable for the exact pipeline.
pub fn fig4() -> ScenarioConfig {
    ScenarioConfig {
        axes: Axes {
            num_static: vec![5, 6, 7],
            num_mobile: vec![2, 3],
            max_steps: vec![2],
            travel_range: vec![5],
            sensing_radius: vec![1],
            coverage_target: vec![1.0],
        },
        strategies: StrategyMatrix {
            static_strategies: vec![StaticStrategy::Milp],
            mobile_strategies: vec![MobileStrategy::MilpMov],
        },
        solver: SolverOverrides { max_nodes: Some(3000), max_seconds: None },
        output: Some("fig4.csv".to_string()),
        ..base()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canned_configs_validate() {
        table2().validate().unwrap();
        fig4().validate().unwrap();
        for config in table3() {
            config.validate().unwrap();
        }
    }

    #[test]
    fn table2_covers_six_fleet_sizes_with_both_static_strategies() {
        let config = table2();
        assert_eq!(config.axes.num_static.len() * config.axes.num_mobile.len(), 6);
        assert_eq!(config.strategies.static_strategies.len(), 2);
        assert_eq!(config.effective_seeds().len(), 20);
    }

    #[test]
    fn table3_sweeps_five_ranges_plus_a_longer_horizon() {
        let configs = table3();
        assert_eq!(configs.len(), 2);
        assert_eq!(configs[0].axes.travel_range, vec![1, 2, 3, 4, 5]);
        assert_eq!(configs[1].axes.travel_range, vec![5]);
        assert_eq!(configs[1].axes.max_steps, vec![3]);
    }

    #[test]
    fn canned_output_stays_deterministic() {
        assert!(!table2().include_timing);
        assert!(table2().solver.max_seconds.is_none());
        assert!(!fig4().include_timing);
        for config in table3() {
            assert!(!config.include_timing);
            assert!(config.solver.max_seconds.is_none());
        }
    }
}
