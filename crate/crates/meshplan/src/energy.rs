//! Energy accounting for finished plans.
//!
//! Radio consumption comes from a bench-measured power table for the radio
//! module at a 5 V supply, split across transmit, receive, idle, and sleep
//! time by a [`DutyCycle`]. Locomotion has no measured per-cell figure, so
//! it stays an abstract per-move cost, and reports keep the two side by
//! side rather than folding them into a single joule number.
//!
//! [`movement_savings`] compares two evaluated plans of the same scenario,
//! quantifying how much cheaper the halting plan travels for at least the
//! same coverage.

use thiserror::Error;

use crate::grid::PlanEvaluation;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnergyError {
    #[error("duty-cycle fractions must be non-negative and sum to 1, got {tx} + {rx} + {idle} + {sleep}")]
    InvalidDutyCycle { tx: f64, rx: f64, idle: f64, sleep: f64 },
    #[error("{name} must be non-negative, got {value}")]
    NegativeArgument { name: &'static str, value: f64 },
    #[error(
        "savings comparison refused: the halting plan covers {mov_covered} cells, \
         the moving plan {cov_covered}"
    )]
    CoverageRegression { cov_covered: usize, mov_covered: usize },
    #[error("savings comparison refused: evaluations come from grids of {0} and {1} cells")]
    MismatchedGrids(u32, u32),
}

/// Power draw of the radio module per mode, in milliwatts and milliamps.
///
/// Both columns are carried so a profile can be cross-checked against the
/// supply voltage it was measured at; see [`RadioPowerProfile::is_consistent`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioPowerProfile<F> {
    pub tx_mw: F,
    pub rx_mw: F,
    pub idle_mw: F,
    pub sleep_mw: F,
    pub tx_ma: F,
    pub rx_ma: F,
    pub idle_ma: F,
    pub sleep_ma: F,
}

impl<F: Scalar> RadioPowerProfile<F> {
    /// Bench measurements of the Zigbee module on a 5 V supply.
    pub fn zigbee_5v() -> Self {
        let c = |v: f64| F::from_f64(v).unwrap();
        Self {
            tx_mw: c(173.5),
            rx_mw: c(179.5),
            idle_mw: c(175.5),
            sleep_mw: c(0.5),
            tx_ma: c(34.7),
            rx_ma: c(35.9),
            idle_ma: c(35.1),
            sleep_ma: c(0.1),
        }
    }

    /// True when every mode's power column equals its current column times
    /// a 5 V rail. Values are compared in integer tenths (the measurement
    /// resolution), so the check is exact rather than epsilon-based.
    pub fn is_consistent(&self) -> bool {
        let pairs = [
            (self.tx_ma, self.tx_mw),
            (self.rx_ma, self.rx_mw),
            (self.idle_ma, self.idle_mw),
            (self.sleep_ma, self.sleep_mw),
        ];
        pairs.into_iter().all(|(ma, mw)| match (tenths(ma), tenths(mw)) {
            (Some(ma), Some(mw)) => ma * 5 == mw,
            _ => false,
        })
    }
}

/// Reads a value as a whole number of tenths, refusing anything that is
/// not one to within rounding noise.
fn tenths<F: Scalar>(value: F) -> Option<i64> {
    let scaled = value.to_f64()? * 10.0;
    let nearest = scaled.round();
    if (scaled - nearest).abs() < 1e-6 {
        Some(nearest as i64)
    } else {
        None
    }
}

/// How a powered node splits its time across the four radio modes.
///
/// Fractions are validated at construction: each non-negative, summing to
/// one within 1e-9.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DutyCycle<F> {
    tx: F,
    rx: F,
    idle: F,
    sleep: F,
}

impl<F: Scalar> DutyCycle<F> {
    pub fn new(tx: F, rx: F, idle: F, sleep: F) -> Result<Self, EnergyError> {
        let zero = F::zero();
        let sum = tx + rx + idle + sleep;
        let tolerance = F::from_f64(1e-9).unwrap();
        let valid = tx >= zero
            && rx >= zero
            && idle >= zero
            && sleep >= zero
            && (sum - F::one()).abs() <= tolerance;
        if !valid {
            let f = |v: F| v.to_f64().unwrap_or(f64::NAN);
            return Err(EnergyError::InvalidDutyCycle {
                tx: f(tx),
                rx: f(rx),
                idle: f(idle),
                sleep: f(sleep),
            });
        }
        Ok(Self { tx, rx, idle, sleep })
    }

    pub fn all_tx() -> Self {
        Self { tx: F::one(), rx: F::zero(), idle: F::zero(), sleep: F::zero() }
    }

    pub fn all_rx() -> Self {
        Self { tx: F::zero(), rx: F::one(), idle: F::zero(), sleep: F::zero() }
    }

    pub fn all_idle() -> Self {
        Self { tx: F::zero(), rx: F::zero(), idle: F::one(), sleep: F::zero() }
    }

    pub fn all_sleep() -> Self {
        Self { tx: F::zero(), rx: F::zero(), idle: F::zero(), sleep: F::one() }
    }

    pub fn tx(&self) -> F {
        self.tx
    }

    pub fn rx(&self) -> F {
        self.rx
    }

    pub fn idle(&self) -> F {
        self.idle
    }

    pub fn sleep(&self) -> F {
        self.sleep
    }
}

/// Idle around the clock, the sensible default for a mains-free node that
/// is deployed but not scheduled.
impl<F: Scalar> Default for DutyCycle<F> {
    fn default() -> Self {
        Self::all_idle()
    }
}

/// Energy totals of one evaluated plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport<F> {
    /// Radio energy over the whole mission, milliwatt-hours.
    pub radio_mwh: F,
    /// Total movements weighted by the per-move cost, abstract units.
    pub locomotion_units: F,
    pub duty_cycle: DutyCycle<F>,
}

/// Radio energy of one node powered for `mission_hours` under the given
/// duty cycle: the sum of mode power times mode share times hours.
pub fn radio_energy<F: Scalar>(
    profile: &RadioPowerProfile<F>,
    duty_cycle: DutyCycle<F>,
    mission_hours: F,
) -> Result<F, EnergyError> {
    if mission_hours < F::zero() {
        return Err(EnergyError::NegativeArgument {
            name: "mission_hours",
            value: mission_hours.to_f64().unwrap_or(f64::NAN),
        });
    }
    let per_hour = profile.tx_mw * duty_cycle.tx
        + profile.rx_mw * duty_cycle.rx
        + profile.idle_mw * duty_cycle.idle
        + profile.sleep_mw * duty_cycle.sleep;
    Ok(per_hour * mission_hours)
}

/// Scores an evaluated plan: radio energy for every mobile node powered
/// over every timestep of the mission (halted or not), plus locomotion at
/// `per_move_cost` per cell transition.
pub fn plan_energy<F: Scalar>(
    evaluation: &PlanEvaluation,
    profile: &RadioPowerProfile<F>,
    per_move_cost: F,
    timestep_hours: F,
    duty_cycle: DutyCycle<F>,
) -> Result<EnergyReport<F>, EnergyError> {
    for (name, value) in [("per_move_cost", per_move_cost), ("timestep_hours", timestep_hours)] {
        if value < F::zero() {
            return Err(EnergyError::NegativeArgument {
                name,
                value: value.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let mission_hours = F::from_u32(evaluation.mobile_node_steps).unwrap() * timestep_hours;
    let radio_mwh = radio_energy(profile, duty_cycle, mission_hours)?;
    let locomotion_units = F::from_u32(evaluation.total_movements).unwrap() * per_move_cost;
    Ok(EnergyReport { radio_mwh, locomotion_units, duty_cycle })
}

/// Fractional travel-cost reduction of a halting plan against a moving
/// plan, by two metrics of travel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MovementSavings<F> {
    /// One minus the ratio of cell transitions.
    pub by_transitions: F,
    /// One minus the ratio of occupied node-timesteps.
    pub by_visited_cells: F,
}

/// Compares two evaluations of the same scenario, `cov_eval` from the plan
/// that keeps moving and `mov_eval` from the one allowed to halt.
///
/// Each metric reports `1 - mov / cov`, or zero when the moving plan's
/// count is already zero. The comparison is refused unless the halting
/// plan covers at least as many cells, since saved travel at the price of
/// lost coverage is not a saving.
pub fn movement_savings<F: Scalar>(
    cov_eval: &PlanEvaluation,
    mov_eval: &PlanEvaluation,
) -> Result<MovementSavings<F>, EnergyError> {
    if cov_eval.total_cells() != mov_eval.total_cells() {
        return Err(EnergyError::MismatchedGrids(cov_eval.total_cells(), mov_eval.total_cells()));
    }
    if mov_eval.covered_count() < cov_eval.covered_count() {
        return Err(EnergyError::CoverageRegression {
            cov_covered: cov_eval.covered_count(),
            mov_covered: mov_eval.covered_count(),
        });
    }
    let fraction = |mov: u32, cov: u32| {
        if cov == 0 {
            F::zero()
        } else {
            F::one() - F::from_u32(mov).unwrap() / F::from_u32(cov).unwrap()
        }
    };
    Ok(MovementSavings {
        by_transitions: fraction(mov_eval.total_movements, cov_eval.total_movements),
        by_visited_cells: fraction(mov_eval.active_node_steps, cov_eval.active_node_steps),
    })
}
