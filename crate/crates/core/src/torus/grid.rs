use serde::{Deserialize, Serialize};

use super::point::{PrecisionConfig, TorusPoint};
use crate::error::{Result, TwdError};

/// The dyadic witness grid: centers of the cells of side `2^-level`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessGrid {
    pub cfg: PrecisionConfig,
    pub level: u32,
}

impl WitnessGrid {
    /// Any level that leaves the cell side an even number of units.
    pub fn with_level(cfg: PrecisionConfig, level: u32) -> Result<Self> {
        if level == 0 || level >= cfg.q {
            return Err(TwdError::Config(format!(
                "grid level {level} must lie in 1..{}",
                cfg.q
            )));
        }
        Ok(Self { cfg, level })
    }

    /// The coarsest grid whose cell diameter `sqrt(d) 2^-level` is at most `epsilon`.
    ///
    /// Also requires the coordinate quantum to be negligible against `epsilon`.
    pub fn for_epsilon(cfg: PrecisionConfig, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(TwdError::Config(format!("epsilon {epsilon} must be positive")));
        }
        let root_d = (cfg.dim as f64).sqrt();
        let level = (root_d / epsilon).log2().ceil().max(1.0) as u32;
        let quantum = root_d / 2.0 / cfg.modulus() as f64;
        if quantum > epsilon / 100.0 {
            return Err(TwdError::Config(format!(
                "precision q={} too coarse for epsilon={epsilon}",
                cfg.q
            )));
        }
        Self::with_level(cfg, level)
    }

    /// Cell side in fixed-point units.
    #[inline]
    pub fn side_units(&self) -> i64 {
        1i64 << (self.cfg.q - self.level)
    }

    pub fn side(&self) -> f64 {
        (0.5f64).powi(self.level as i32)
    }

    /// Cell diameter, the effective `epsilon` of the grid.
    pub fn epsilon(&self) -> f64 {
        (self.cfg.dim as f64).sqrt() * self.side()
    }

    pub fn cells_per_axis(&self) -> i64 {
        1i64 << self.level
    }

    pub fn len(&self) -> u128 {
        1u128 << (self.level as u128 * self.cfg.dim as u128).min(127)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Center of the cell with integer index vector `idx` (taken modulo the grid).
    pub fn center(&self, idx: &[i64]) -> TorusPoint {
        let h = self.side_units();
        let n = self.cells_per_axis();
        TorusPoint::new(
            &self.cfg,
            idx.iter().map(|&i| i.rem_euclid(n) * h + h / 2).collect(),
        )
    }

    pub fn cell_of(&self, p: &TorusPoint) -> Vec<i64> {
        let h = self.side_units();
        p.coords.iter().map(|&c| c / h).collect()
    }

    /// Grid center nearest to `p`.
    pub fn snap(&self, p: &TorusPoint) -> TorusPoint {
        self.center(&self.cell_of(p))
    }

    /// All grid points, for grids small enough to enumerate.
    pub fn points(&self) -> Result<Vec<TorusPoint>> {
        if self.len() > 1 << 24 {
            return Err(TwdError::Config(format!(
                "grid with {} points is too large to enumerate",
                self.len()
            )));
        }
        let n = self.cells_per_axis();
        let d = self.cfg.dim;
        let total = self.len() as usize;
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0i64; d];
        for _ in 0..total {
            out.push(self.center(&idx));
            for k in 0..d {
                idx[k] += 1;
                if idx[k] < n {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_matches_epsilon() {
        let cfg = PrecisionConfig::new(2, 20).unwrap();
        let g = WitnessGrid::for_epsilon(cfg, 0.08 / 256.0).unwrap();
        assert!(g.epsilon() <= 0.08 / 256.0);
        let coarser = WitnessGrid::with_level(cfg, g.level - 1).unwrap();
        assert!(coarser.epsilon() > 0.08 / 256.0);
    }

    #[test]
    fn coarse_precision_is_rejected() {
        let cfg = PrecisionConfig::new(2, 12).unwrap();
        assert!(WitnessGrid::for_epsilon(cfg, 1e-4).is_err());
    }

    #[test]
    fn enumeration_covers_each_cell_once() {
        let cfg = PrecisionConfig::new(2, 8).unwrap();
        let g = WitnessGrid::with_level(cfg, 3).unwrap();
        let pts = g.points().unwrap();
        assert_eq!(pts.len(), 64);
        let mut cells: Vec<_> = pts.iter().map(|p| g.cell_of(p)).collect();
        cells.sort();
        cells.dedup();
        assert_eq!(cells.len(), 64);
        for p in &pts {
            assert_eq!(&g.snap(p), p);
        }
    }
}
