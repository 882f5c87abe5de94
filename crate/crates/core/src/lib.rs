//! System-level simulator of a beamformed cellular network with mobile
//! users, outage-session analytics and reliability KPIs.
//!
//! The signal path (geometry, propagation, shadowing, fading, filtering,
//! SINR) is generic over the scalar type via [`float::Float`], so the same
//! math runs in `f32` or `f64`. Event times, outage intervals, sessions
//! and KPI accounting are always `f64`: the contiguity and identity
//! contracts of the analytics layer are defined at `f64` precision. The
//! type aliases at the crate root pin the default `f64` instantiation;
//! reach into the modules for the generic forms.

pub mod analytics;
pub mod config;
pub mod deployment;
pub mod float;
pub mod geometry;
pub mod kpi;
pub mod measurement;
pub mod procedures;
pub mod radio;
pub mod report;
pub mod runner;
pub mod sim;

pub use analytics::{
    classify, merge_sessions, mobility_failure_count, AnalyticsError, OutageInterval,
    OutageSession, SessionClass,
};
pub use config::{load_config, parse_config, ConfigError, PanelId, ScenarioConfig};
pub use kpi::{build_report, mobility_rate, mot, mtbo, outage_percentage, KpiReport};
pub use procedures::{LinkView, OutageCause, ProcMode, UeProcedures};
pub use report::{emit_reports, verify_dir, EmitOptions, ReportError, RunTrace, VerifyOutcome};
pub use runner::{run_experiment, RunResult, SweepPoint};

/// Default scalar type for simulations.
pub type Scalar = f64;

/// `f64` instantiations of the generic core types.
pub type Vec2 = geometry::Vec2<Scalar>;
pub type CellPlan = deployment::CellPlan<Scalar>;
pub type UeKinematics = deployment::UeKinematics<Scalar>;
pub type BeamPattern = radio::BeamPattern<Scalar>;
pub type ShadowField = radio::ShadowField<Scalar>;
pub type RadioModel = radio::RadioModel<Scalar>;
pub type LinkTable = radio::LinkTable<Scalar>;
pub type FilterBank = measurement::FilterBank<Scalar>;
pub type Simulation = sim::Simulation<Scalar>;
