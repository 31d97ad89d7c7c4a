//! Bicriteria approximation: delay at most `(1 + 4 eps) * deadline` at cost
//! within `8 + 4 / eps` of the optimum.

mod merge;
mod split;
mod two_level;

pub use merge::{chain_length, merge_vehicles};
pub use split::{farthest_item, hamiltonian_path, split_tour, Group, Grouping};
pub use two_level::build_two_level;

use serde::{Deserialize, Serialize};

use crate::bounds::{cost_lower_bound, LowerBounds};
use crate::error::{Error, Result};
use crate::eval::{schedule_cost, schedule_delay, CostBreakdown};
use crate::instance::Instance;
use crate::schedule::Schedule;
use crate::tolerance::{le_rel, ratio};
use crate::transforms::min_delay;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub schedule: Schedule,
    pub delay: f64,
    pub cost: CostBreakdown,
    pub bounds: LowerBounds,
    pub epsilon: f64,
    /// Items per delivery chain.
    pub m: u64,
    /// `delay / deadline`.
    pub delay_ratio: f64,
    /// `travel / mst`.
    pub length_ratio: f64,
    /// Upper bound on the vehicle count, `1 + (2 / eps)(mst + n delta) / deadline`.
    pub vehicle_bound: f64,
    /// `cost / cost_lb`.
    pub cost_ratio: f64,
    pub guarantees_ok: bool,
}

/// The four certified inequalities, each at relative tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Guarantees {
    pub delay: bool,
    pub travel: bool,
    pub vehicles: bool,
    pub cost: bool,
}

impl Guarantees {
    pub fn all(&self) -> bool {
        self.delay && self.travel && self.vehicles && self.cost
    }
}

impl SolveReport {
    /// Re-checks the guarantees from the stored fields.
    pub fn guarantees(&self, deadline: f64) -> Guarantees {
        let eps = self.epsilon;
        Guarantees {
            delay: le_rel(self.delay, (1.0 + 4.0 * eps) * deadline),
            travel: le_rel(self.cost.travel, (4.0 + 2.0 / eps) * self.bounds.mst),
            vehicles: le_rel(self.cost.vehicle_count as f64, self.vehicle_bound),
            cost: le_rel(self.cost.total, (8.0 + 4.0 / eps) * self.bounds.cost_lb),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

/// Runs the full pipeline: tour splitting, the two-level caterpillar and
/// vehicle merging, and certifies the result against the lower bounds.
pub fn approx_schedule(instance: &Instance, epsilon: f64) -> Result<SolveReport> {
    split::check_epsilon(epsilon)?;
    let md = min_delay(instance);
    if !le_rel(md, instance.deadline()) {
        return Err(Error::Infeasible {
            min_delay: md,
            deadline: instance.deadline(),
        });
    }
    let bounds = cost_lower_bound(instance);
    if instance.deadline() > bounds.mst {
        log::warn!(
            "deadline {} exceeds the spanning tree length {}; the grouping bounds are not tight here",
            instance.deadline(),
            bounds.mst
        );
    }

    let grouping = split_tour(instance, epsilon)?;
    let s1 = build_two_level(instance, &grouping)?;
    let schedule = merge_vehicles(instance, &s1, &grouping, epsilon)?;

    let delay = schedule_delay(instance, &schedule);
    let cost = schedule_cost(instance, &schedule);
    let deadline = instance.deadline();
    let n = instance.n() as f64;
    let mut report = SolveReport {
        schedule,
        delay,
        cost,
        bounds,
        epsilon,
        m: chain_length(instance, epsilon),
        delay_ratio: ratio(delay, deadline),
        length_ratio: ratio(cost.travel, bounds.mst),
        vehicle_bound: 1.0 + (2.0 / epsilon) * (bounds.mst + n * instance.delta()) / deadline,
        cost_ratio: ratio(cost.total, bounds.cost_lb),
        guarantees_ok: false,
    };
    report.guarantees_ok = report.guarantees(deadline).all();
    Ok(report)
}

/// Targets a delay of at most `(1 + slack) * deadline` by running the
/// pipeline with `eps = slack / 4`.
pub fn approx_schedule_with_slack(instance: &Instance, slack: f64) -> Result<SolveReport> {
    approx_schedule(instance, slack / 4.0)
}
