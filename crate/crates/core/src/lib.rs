//! Periodic medium-access scheduling for networked control systems.
//!
//! Given `N` plants sharing a network that only `M` of them can use at a
//! time, this crate builds per-plant quadratic certificates for the
//! closed-loop and open-loop modes, searches the plant-access digraph for a
//! cycle whose dwell durations make every plant's Lyapunov budget
//! contract, turns that cycle into a periodic schedule, and verifies the
//! schedule by exact piecewise-LTI simulation.

pub mod certificates;
pub mod cycle_search;
pub mod linalg;
pub mod ncs_graph;
pub mod scheduling;
pub mod simulator;
