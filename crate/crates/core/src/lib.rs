//! Radar micro-Doppler toolkit: point-scatterer simulation, spectrogram and
//! range-Doppler processing, fractal complexity analysis, handcrafted feature
//! extraction and classification.

mod codec;
pub mod complexity;
pub mod dsp;
mod error;
pub mod features;
pub mod learn;
pub mod pipeline;
pub mod sim;

pub use error::{Error, Result};
