//! Time integration of the `u`- and `v`-equations, exact free propagation and
//! the Duhamel operator.

pub mod data;
pub mod free;
pub mod rhs;
pub mod state;
pub mod stepper;

pub use data::{initial_data, DataFamily, DataParams, InitialData, Velocity};
pub use free::{duhamel, free_energy, free_propagate, propagate_spectrum};
pub use rhs::{discrete_energy, rhs_u, rhs_v, DiscreteEnergy};
pub use state::{companion_grid, FieldState, Form, Scheme, SolverConfig, Status, Trajectory, CFL_LIMIT};
pub use stepper::evolve;
