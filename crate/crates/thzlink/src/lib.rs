//! Link-budget and coverage simulation for outdoor sub-terahertz radio.
//!
//! The crate models a line-of-sight THz link end to end: water-vapor
//! absorption and spreading loss, transmission-window discovery, Shannon
//! capacity over a selected band, device sway and the resulting beam
//! misalignment, and the deployment scenarios built on top (street-level
//! backhaul chains, kiosk downlinks, aerial coverage).
//!
//! Modules build on each other in roughly that order:
//!
//! - [`atmosphere`]: humidity-driven absorption coefficient k(f) in Np/m.
//! - [`channel`]: path loss in dB and loss-limited transmission windows.
//! - [`link`]: cone-antenna gain, noise, SNR, and capacity.
//! - [`mobility`]: orientation sway classes and alignment statistics.
//! - [`scenarios`]: backhaul, kiosk, and aerial deployment studies.

pub mod atmosphere;
pub mod channel;
pub mod config;
pub mod constants;
pub mod link;
pub mod mobility;
pub mod report;
pub mod scenarios;

pub use atmosphere::{AbsorptionModel, Atmosphere};
pub use channel::{Band, PathLossBreakdown, TransmissionWindow, WindowScan};
pub use link::{BeamConfig, RadioHardware};
pub use mobility::{AlignmentStats, MobilityClass, OrientationTrajectory};
pub use scenarios::{best_coverage_index, BackhaulPlan, CoverageResult, LinkEnv, UserField};
