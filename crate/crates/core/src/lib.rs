//! Pedestrian pose and gait forecasting in SMPL-style body parameters.
//!
//! Given past frames of body parameters (global translation, per-joint
//! axis-angle pose, shape) in a metric frame, this crate predicts the next
//! frame and multi-second rollouts with a small recurrent network trained
//! under a biomechanics-informed objective: gait periodicity on frame
//! differences, left/right mirror symmetry, and a foot-to-ground contact
//! volume. It also ships the comparison baselines, the data pipeline with a
//! synthetic gait generator, and the evaluation metrics.

pub mod autodiff;
pub mod bio_objective;
pub mod body_model;
pub mod data_pipeline;
pub mod error;
pub mod evaluator;
pub mod predictor;
pub mod sequence_net;

pub use error::{Error, Result};
