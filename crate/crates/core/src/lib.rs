//! Pulse-area theorem for photon echoes in a single-mode ring cavity.
//!
//! * [`area`] solves the driven area equation for input pulses.
//! * [`echo`] builds phasing seeds and solves the echo equations, with linear
//!   and cubic approximations.
//! * [`oracle`] integrates the Maxwell-Bloch equations directly and checks the
//!   theorem against the simulated pulse areas.

pub mod area;
pub mod echo;
pub mod error;
pub mod oracle;
pub mod params;
pub mod roots;

pub use area::{
    impedance_matched, solve_area_equation, solve_composite_total, solve_first_pulse,
    solve_second_pulse, weak_signal_transmission, AreaEquationProblem, AreaSolution, Branch,
    BranchMode, BranchPolicy,
};
pub use error::{Error, Result};
pub use params::{
    decoherence_factor, from_normalized, to_normalized, BlochSeed, CavityParams, CouplingRatios,
    DecoherenceModel, ExteriorArea, InteriorArea,
};
