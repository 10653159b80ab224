//! Heat-kernel regularized local times: Monte Carlo estimates on sampled fields and
//! closed-form second moments from covariance data.

mod moments;
mod montecarlo;

pub use moments::{
    cauchy_gap, gap_ladder, moment_ladder, pair_moment, second_moment_closed, LadderReport,
    PairQuadrature, DEFAULT_EPS_LADDER,
};
pub use montecarlo::{grid_points, heat_kernel, l_eps_mc, GridSpec, LEpsEstimate};

use serde::{Deserialize, Serialize};

use crate::criteria::{scenario_kernel, BaseModel, Scenario};
use crate::error::Result;

/// How [`scenario_localtime`] evaluates `L_ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Estimator {
    MonteCarlo {
        grid: GridSpec,
        replicates: usize,
        seed: u64,
    },
    ClosedForm {
        quadrature: PairQuadrature,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ScenarioEstimate {
    MonteCarlo(LEpsEstimate),
    ClosedForm { eps: f64, second_moment: f64 },
}

/// Builds the scenario's field and evaluates its regularized local time at level 0
/// (or at the scenario's level for plain local times).
pub fn scenario_localtime(
    scenario: &Scenario,
    model: BaseModel,
    eps: f64,
    estimator: &Estimator,
) -> Result<ScenarioEstimate> {
    let kernel = scenario_kernel(scenario, model)?;
    let level = scenario.level();
    match estimator {
        Estimator::MonteCarlo {
            grid,
            replicates,
            seed,
        } => l_eps_mc(&kernel, scenario.d, &level, eps, grid, *replicates, *seed)
            .map(ScenarioEstimate::MonteCarlo),
        Estimator::ClosedForm { quadrature } => {
            let second_moment = second_moment_closed(&kernel, scenario.d, &level, eps, quadrature)?;
            Ok(ScenarioEstimate::ClosedForm { eps, second_moment })
        }
    }
}
