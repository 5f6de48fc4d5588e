//! Scale schedules and the discrete filter transform of a sampled path.

mod schedule;
#[allow(clippy::module_inception)]
mod transform;

pub use schedule::{
    geometric_schedule, paper_schedule, GammaMode, Level, ScaleSchedule, ScheduleConfig, ScheduleRule, ShiftRule,
};
pub use transform::{filter_transform, panel_from_path, required_extent, TransformRequest};
