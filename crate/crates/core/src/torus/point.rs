use serde::{Deserialize, Serialize};

use crate::error::{Result, TwdError};

/// Dimension and fixed-point precision shared by every point of a run.
///
/// Coordinates are integers in `[0, 2^q)` standing for `x / 2^q` on the unit torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionConfig {
    pub dim: usize,
    pub q: u32,
}

impl PrecisionConfig {
    pub const DEFAULT_Q: u32 = 20;

    pub fn new(dim: usize, q: u32) -> Result<Self> {
        if dim == 0 {
            return Err(TwdError::Config("dimension must be positive".into()));
        }
        if !(2..=31).contains(&q) {
            return Err(TwdError::Config(format!("precision q={q} outside 2..=31")));
        }
        // Squared distances are bounded by d * 2^(2q-2) and must fit in i64.
        let per_axis = 1i128 << (2 * q - 2);
        if (dim as i128) * per_axis > i64::MAX as i128 {
            return Err(TwdError::Config(format!(
                "d={dim} with q={q} overflows exact squared distances"
            )));
        }
        Ok(Self { dim, q })
    }

    /// `2^q`, the number of representable positions per axis.
    #[inline]
    pub fn modulus(&self) -> i64 {
        1i64 << self.q
    }

    #[inline]
    pub fn half(&self) -> i64 {
        1i64 << (self.q - 1)
    }

    /// Real length to fixed-point units, rounded to nearest.
    pub fn to_units(&self, x: f64) -> i64 {
        (x * self.modulus() as f64).round() as i64
    }

    pub fn to_units_floor(&self, x: f64) -> i64 {
        (x * self.modulus() as f64).floor() as i64
    }

    pub fn to_units_ceil(&self, x: f64) -> i64 {
        (x * self.modulus() as f64).ceil() as i64
    }

    pub fn from_units(&self, u: i64) -> f64 {
        u as f64 / self.modulus() as f64
    }

    /// Squared real length to squared units, rounded down (for strict upper tests).
    pub fn sq_units_floor(&self, r: f64) -> i64 {
        let m = self.modulus() as f64;
        let v = (r * m) * (r * m);
        if v >= i64::MAX as f64 {
            i64::MAX
        } else {
            v.floor() as i64
        }
    }

    /// Squared real length to squared units, rounded up.
    pub fn sq_units_ceil(&self, r: f64) -> i64 {
        let m = self.modulus() as f64;
        let v = (r * m) * (r * m);
        if v >= i64::MAX as f64 {
            i64::MAX
        } else {
            v.ceil() as i64
        }
    }

    /// Squared units to a real length.
    pub fn sq_units_to_len(&self, s: i64) -> f64 {
        (s as f64).sqrt() / self.modulus() as f64
    }
}

/// A point of the torus in fixed-point coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusPoint {
    pub coords: Vec<i64>,
}

impl TorusPoint {
    /// Builds a point, reducing every coordinate modulo `2^q`.
    pub fn new(cfg: &PrecisionConfig, coords: Vec<i64>) -> Self {
        let m = cfg.modulus();
        Self {
            coords: coords.into_iter().map(|c| c.rem_euclid(m)).collect(),
        }
    }

    /// Builds a point from coordinates that must already lie in `[0, 2^q)`.
    pub fn checked(cfg: &PrecisionConfig, coords: Vec<i64>) -> Result<Self> {
        if coords.len() != cfg.dim {
            return Err(TwdError::Format(format!(
                "expected {} coordinates, got {}",
                cfg.dim,
                coords.len()
            )));
        }
        let m = cfg.modulus();
        if let Some(c) = coords.iter().find(|&&c| c < 0 || c >= m) {
            return Err(TwdError::Format(format!("coordinate {c} outside [0, {m})")));
        }
        Ok(Self { coords })
    }

    /// Quantizes real coordinates onto the fixed-point lattice.
    pub fn from_reals(cfg: &PrecisionConfig, x: &[f64]) -> Self {
        Self::new(cfg, x.iter().map(|&v| cfg.to_units(v)).collect())
    }

    pub fn to_reals(&self, cfg: &PrecisionConfig) -> Vec<f64> {
        self.coords.iter().map(|&c| cfg.from_units(c)).collect()
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// A distance offset in fixed-point units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FixedOffset(pub i64);

impl FixedOffset {
    pub const ZERO: FixedOffset = FixedOffset(0);

    pub fn floor(cfg: &PrecisionConfig, a: f64) -> Self {
        FixedOffset(cfg.to_units_floor(a).max(0))
    }

    pub fn ceil(cfg: &PrecisionConfig, a: f64) -> Self {
        FixedOffset(cfg.to_units_ceil(a).max(0))
    }

    pub fn units(self) -> i64 {
        self.0
    }
}
