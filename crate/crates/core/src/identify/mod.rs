//! Parameter identification: objectives, optimizers and landscape scans.

mod family;
mod landscape;
mod nelder_mead;
mod objective;

pub use family::{FamilyKind, ModelFamily, ParamBox};
pub use landscape::{grid_1d, product_grid, scan_landscape, self_distance_floor, LandscapeRow};
pub use nelder_mead::{
    gradient_descent_fd, multi_start, nelder_mead, uniform_start, NelderMeadOptions, OptResult, Termination, TraceEntry,
};
pub use objective::{
    observe_run, pointwise_objective, Breakdown, Objective, ObjectiveKind, ObjectiveSpec, DEFAULT_PENALTY, DEFAULT_SAMPLES,
};
