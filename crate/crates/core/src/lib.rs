//! Vehicle routing with subtours: a fleet leaves a depot with all items on one
//! vehicle, which may hand items over to further vehicles on the way. This
//! crate evaluates such schedules exactly, decides feasibility of a deadline,
//! and computes schedules whose delay exceeds the deadline by at most a
//! factor `1 + 4 eps` at a cost within `8 + 4 / eps` of the optimum.

pub mod approx;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod eval;
pub mod generators;
pub mod instance;
pub mod metric;
pub mod oracle;
pub mod schedule;
pub mod shortcut;
pub mod tolerance;
pub mod transforms;

pub use approx::{approx_schedule, approx_schedule_with_slack, SolveReport};
pub use bounds::{cost_lower_bound, delay_lower_bound, mst_length, LowerBounds};
pub use error::{Error, Result};
pub use eval::{schedule_cost, schedule_delay, validate_schedule, vertex_delay, CostBreakdown, ValidationReport};
pub use instance::{Instance, Item};
pub use metric::{ExplicitMetric, Location, Metric};
pub use schedule::{Schedule, Vertex, VertexId, VertexKind};
pub use transforms::{fastest_caterpillar, is_feasible, min_delay};
