//! Simulation and asymptotic theory for INAR(∞) count processes
//! `X_t = ε_t + Σ_{k>=1} Σ_{l=1}^{X_{t-k}} ξ_l^{(t,k)}` started from an
//! empty history.
//!
//! The numeric modules are generic over [`num::Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which is what the tolerances in
//! the documentation assume.

pub mod asymptotics;
pub mod distributions;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod num;
pub mod oracle;
pub mod recursions;
mod roots;
pub mod simulator;
pub mod stream;

pub use error::{Error, Result};
pub use model::{Assumption, AssumptionReport, Status};
pub use montecarlo::{Check, Theorem, ValidationReport};
pub use num::Real;
pub use simulator::{CompoundSampling, MartingaleDiagnostic, ReplicationSummary, Trajectory};
pub use stream::RandomStream;

pub type Distribution = distributions::CountDistribution<f64>;
pub type Decay = model::DecayLaw<f64>;
pub type Offspring = model::OffspringSequence<f64>;
pub type Model = model::InarModel<f64>;
pub type Theory = asymptotics::TheorySummary<f64>;
pub type CriticalTilt = asymptotics::CriticalTilt<f64>;
pub type ExactLaw = oracle::ExactLaw<f64>;
pub type GbarTables = recursions::GbarTables<f64>;
pub type MdpSchedule = recursions::MdpSchedule<f64>;
pub type MdpPoint = recursions::MdpPoint<f64>;
pub type MgfRecursion = recursions::MgfRecursion<f64>;
