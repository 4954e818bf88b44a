//! Planning toolkit for grid-deployed sensor meshes.
//!
//! The crate covers the whole pipeline: grid geometry and coverage
//! accounting ([`grid`]), an exact 0/1 integer-program solver ([`bip`]),
//! optimization models for static placement and mobile-node trajectories
//! ([`planner`]), randomized and greedy baselines ([`baseline`]), radio
//! energy accounting ([`energy`]), and a benchmark harness ([`bench`])
//! driven by the `meshplan` binary.

pub mod baseline;
pub mod bench;
pub mod bip;
pub mod energy;
pub mod grid;
pub mod planner;
pub mod scalar;

pub use baseline::RngSeed;
pub use bench::{ResultRow, ScenarioConfig};
pub use energy::{DutyCycle, EnergyReport, MovementSavings, RadioPowerProfile};
pub use grid::{CellCoord, GridSpec, MobilePlan, PlanEvaluation, StaticPlan, TravelRange};
pub use planner::ScenarioParams;
pub use scalar::Scalar;

/// Scalar used by the CLI and everything above the solver core.
pub type DefaultScalar = f64;

pub type BinaryProgram = bip::BinaryProgram<DefaultScalar>;
pub type Solution = bip::Solution<DefaultScalar>;
pub type SolverConfig = bip::SolverConfig<DefaultScalar>;
