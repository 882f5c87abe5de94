//! Radio model: propagation, antenna patterns, shadowing, fading and SINR.

pub mod beams;
pub mod fading;
pub mod link;
pub mod pathloss;
pub mod shadow;

pub use beams::{beam_gain, beam_grid, lobe_gain, panel_gain, BeamGridError, BeamPattern};
pub use fading::Ar1Fade;
pub use link::{sinr_db, LinkGain, LinkTable, RadioError, RadioModel};
pub use pathloss::{los_probability, path_loss, PathLossError};
pub use shadow::ShadowField;
