//! Maxwell-Bloch simulation used as an independent check of the area theorem.

mod grid;
mod sim;
mod verify;

pub use grid::{lorentzian_grid, GridSpec, LineGrid};
pub use sim::{
    simulate, windowed_area, InputPulse, MBSimConfig, MBSimResult, PulseShape, Side, Window,
    WindowLabel, DT_WARNING_THRESHOLD,
};
pub use verify::{
    verify_against_theorem, Tolerances, TwoPulseExperiment, VerificationReport, WindowCheck,
};
