//! Vision and control for a four-legged line follower robot.
//!
//! The crate covers the whole perception-to-action loop of a small legged
//! robot that follows a painted line:
//!
//! - [`imagecore`]: pixel buffers, binary PGM/PPM I/O, gray and HSV conversion.
//! - [`segmentation`]: Otsu's threshold selection and linear RGB rule
//!   classification, plus a per-scenario success-rate report.
//! - [`colortrack`]: hue/saturation signatures, boolean class matrices and a
//!   single-pass, row-streaming region tracker.
//! - [`control`]: line-center extraction and the three-band steering law.
//! - [`gait`]: the servo phase sequence of each step and the dead-reckoned
//!   pose update.
//! - [`sim`]: synthetic tracks, a top-down camera renderer, a sample
//!   generator, and the closed loop that ties everything together.
//! - [`cli`]: the `linefollow` command-line front end.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod cli;
pub mod colortrack;
pub mod control;
mod error;
pub mod gait;
pub mod imagecore;
pub mod segmentation;
pub mod sim;

pub use error::{Error, Result};
