//! Handcrafted micro-Doppler features.
//!
//! Every 65×65 spectrogram yields 932 values per sensor:
//!
//! | family | count | content                                            |
//! |--------|-------|----------------------------------------------------|
//! | ENV    | 7     | upper/lower envelope max, min, mean + mean spread  |
//! | DCT    | 500   | zigzag-ordered orthonormal 2-D DCT-II coefficients |
//! | FWCC   | 325   | 5 cepstra × 65 frames from a triangular filter bank |
//! | LPC    | 100   | order-50 predictors of the mean column and mean row |

mod dct;
mod envelope;
mod filterbank;
mod fwcc;
mod ga;
mod lpc;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dsp::{Spectrogram, DEFAULT_SIZE};
use crate::error::{Error, Result};

pub use dct::{dct2_orthonormal, dct_features, zigzag_order, DCT_COUNT};
pub use envelope::{envelope_features, envelopes, DEFAULT_PERCENTILE, ENVELOPE_COUNT};
pub use filterbank::{FilterBank, TriangularFilter};
pub use fwcc::{fwcc, fwcc_matrix, CEPSTRA, LOG_FLOOR};
pub use ga::{bank_fitness, optimize_filterbank_ga, GaParams, GaResult};
pub use lpc::{lpc, lpc_features, lpc_least_squares, LPC_ORDER};

/// Filter count of the default FWCC bank.
pub const DEFAULT_FILTERS: usize = 16;

/// Per-sensor feature vector length.
pub const FEATURES_PER_SENSOR: usize = ENVELOPE_COUNT + DCT_COUNT + CEPSTRA * DEFAULT_SIZE + 2 * LPC_ORDER;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FeatureFamily {
    Env,
    Dct,
    Fwcc,
    Lpc,
}

impl FeatureFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Env => "ENV",
            Self::Dct => "DCT",
            Self::Fwcc => "FWCC",
            Self::Lpc => "LPC",
        }
    }
}

impl FromStr for FeatureFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ENV" => Ok(Self::Env),
            "DCT" => Ok(Self::Dct),
            "FWCC" => Ok(Self::Fwcc),
            "LPC" => Ok(Self::Lpc),
            other => Err(Error::Parse(format!("unknown feature family '{other}'"))),
        }
    }
}

/// Provenance of one feature column: `FAMILY_index_sensor`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureTag {
    pub family: FeatureFamily,
    pub index: usize,
    pub sensor: String,
}

impl fmt::Display for FeatureTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}_{}", self.family.as_str(), self.index, self.sensor)
    }
}

impl FromStr for FeatureTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.splitn(3, '_');
        let (Some(family), Some(index), Some(sensor)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse(format!("feature name '{s}' is not FAMILY_index_sensor")));
        };
        let index = index
            .parse()
            .map_err(|_| Error::Parse(format!("feature name '{s}' has a bad index")))?;
        Ok(Self { family: family.parse()?, index, sensor: sensor.to_string() })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub tags: Vec<FeatureTag>,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn extend(&mut self, family: FeatureFamily, sensor: &str, values: Vec<f64>) {
        let start = self.values.len();
        self.tags.extend((0..values.len()).map(|i| FeatureTag { family, index: i, sensor: sensor.to_string() }));
        debug_assert_eq!(start + values.len(), self.tags.len());
        self.values.extend(values);
    }

    pub fn family_count(&self, family: FeatureFamily) -> usize {
        self.tags.iter().filter(|t| t.family == family).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    pub percentile: f64,
    pub dct_count: usize,
    pub cepstra: usize,
    pub lpc_order: usize,
    /// Filter count of the default uniform FWCC bank.
    pub filters: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            percentile: DEFAULT_PERCENTILE,
            dct_count: DCT_COUNT,
            cepstra: CEPSTRA,
            lpc_order: LPC_ORDER,
            filters: DEFAULT_FILTERS,
        }
    }
}

/// All four families for one 65×65 spectrogram, in ENV, DCT, FWCC, LPC order.
pub fn extract_features(spec: &Spectrogram, bank: &FilterBank, sensor: &str, cfg: &FeatureConfig) -> Result<FeatureVector> {
    let mut fv = FeatureVector { values: Vec::with_capacity(FEATURES_PER_SENSOR), tags: Vec::new() };
    fv.extend(FeatureFamily::Env, sensor, envelope_features(spec, cfg.percentile)?.to_vec());
    fv.extend(FeatureFamily::Dct, sensor, dct_features(spec, cfg.dct_count)?);
    fv.extend(FeatureFamily::Fwcc, sensor, fwcc(spec, bank, cfg.cepstra)?);
    fv.extend(FeatureFamily::Lpc, sensor, lpc_features(spec, cfg.lpc_order, cfg.lpc_order)?);
    if let Some(bad) = fv.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::domain(format!("feature {} is not finite", fv.tags[bad])));
    }
    Ok(fv)
}
