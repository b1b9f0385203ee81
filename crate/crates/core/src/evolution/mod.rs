//! Per-mode simulation of the linearized problem: radial solvers, a time
//! stepper, the transform-domain solution with numerical inversion, rate
//! fitting and the split of initial data into modes.

pub mod decompose;
pub mod grid;
pub mod laplace;
pub mod rate;
pub mod stepper;

pub use decompose::{conjugate_defect, decompose_initial, require_mode, Decomposition, ModeInitial};
pub use grid::{bvp_solve_radial, RadialGrid, RadialOperator, RadialSolution, Robin};
pub use laplace::{laplace_mode_solution, talbot, ModeInit, ModeTransform, TalbotOptions};
pub use rate::{decay_rate, RateFit};
pub use stepper::{
    elliptic_q, evolve_mode, step_mode, ExponentialForcing, LaplaceForcing, ModeForcing, ModeState, ModeStepper,
    NoForcing, Trajectory,
};
