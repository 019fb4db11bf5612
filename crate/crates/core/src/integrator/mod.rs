//! Adaptive three-stage exponential integrator.

mod controller;
mod driver;
mod step;
mod system;

pub use controller::{controller_update, scaled_error_norm, ClampMode, ControllerConfig};
pub use driver::{
    integrate_adaptive, integrate_fixed, integrate_fixed_exp_euler, Method, SolverError, SolverOptions,
    SolverOutput, StepRecord,
};
pub use step::{epi3v_step, exp_euler_step, Epi3vStep, PhiSettings, StepError, StepInput};
pub use system::{FnSystem, LinearSystem, OdeSystem, SystemError};
