//! Integer time base.
//!
//! All model quantities are integer ticks. The mapping from physical time to
//! ticks is a [`Resolution`], which is configuration and never part of a
//! model.

use serde::{Deserialize, Serialize};

/// Model time in ticks.
pub type Ticks = i64;

const MS_PER_MINUTE: f64 = 60_000.0;

/// Relative tolerance used when deciding whether a physical value lands on
/// the tick grid.
const GRID_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    ticks_per_ms: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ResolutionError {
    #[error("resolution must be a positive finite number of ticks per ms, got {0}")]
    InvalidResolution(f64),
    #[error("{ms} ms is {ticks} ticks at {ticks_per_ms} ticks/ms, which is not an integer")]
    NotRepresentable { ms: f64, ticks: f64, ticks_per_ms: f64 },
    #[error("{0} ms does not fit the tick representation")]
    OutOfRange(f64),
}

impl Resolution {
    pub fn new(ticks_per_ms: f64) -> Result<Self, ResolutionError> {
        if ticks_per_ms.is_finite() && ticks_per_ms > 0.0 {
            Ok(Resolution { ticks_per_ms })
        } else {
            Err(ResolutionError::InvalidResolution(ticks_per_ms))
        }
    }

    pub fn ticks_per_ms(&self) -> f64 {
        self.ticks_per_ms
    }

    /// Converts milliseconds to ticks, failing unless the value is an exact
    /// multiple of one tick.
    pub fn ms_to_ticks(&self, ms: f64) -> Result<Ticks, ResolutionError> {
        let ticks = ms * self.ticks_per_ms;
        if !ticks.is_finite() || ticks.abs() > (1u64 << 53) as f64 {
            return Err(ResolutionError::OutOfRange(ms));
        }
        let rounded = ticks.round();
        if (ticks - rounded).abs() > GRID_TOLERANCE * rounded.abs().max(1.0) {
            return Err(ResolutionError::NotRepresentable {
                ms,
                ticks,
                ticks_per_ms: self.ticks_per_ms,
            });
        }
        Ok(rounded as Ticks)
    }

    pub fn ticks_to_ms(&self, ticks: Ticks) -> f64 {
        ticks as f64 / self.ticks_per_ms
    }

    pub fn ticks_per_minute(&self) -> f64 {
        self.ticks_per_ms * MS_PER_MINUTE
    }

    /// Largest whole number of ticks not exceeding `minutes`.
    ///
    /// Values within the grid tolerance below a tick boundary are snapped up
    /// to it, so an exact slack of 2.5 min is not lost to float rounding.
    pub fn floor_minutes_to_ticks(&self, minutes: f64) -> Ticks {
        let ticks = minutes * self.ticks_per_minute();
        let snapped = ticks.round();
        if (ticks - snapped).abs() <= GRID_TOLERANCE * snapped.abs().max(1.0) {
            snapped as Ticks
        } else {
            ticks.floor() as Ticks
        }
    }

    pub fn ticks_to_minutes(&self, ticks: Ticks) -> f64 {
        ticks as f64 / self.ticks_per_minute()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_conversion() {
        let r = Resolution::new(10.0).unwrap();
        assert_eq!(r.ms_to_ticks(0.1), Ok(1));
        assert_eq!(r.ms_to_ticks(2.5), Ok(25));
        assert_eq!(r.ms_to_ticks(0.3), Ok(3));
    }

    #[test]
    fn half_tick_is_rejected() {
        let r = Resolution::new(10.0).unwrap();
        assert!(matches!(
            r.ms_to_ticks(0.05),
            Err(ResolutionError::NotRepresentable { .. })
        ));
    }

    #[test]
    fn minutes_floor_snaps_to_boundary() {
        let r = Resolution::new(1.0).unwrap();
        assert_eq!(r.floor_minutes_to_ticks(2.5), 150_000);
        assert_eq!(r.floor_minutes_to_ticks(0.015 / 6.0), 150);
        assert_eq!(r.floor_minutes_to_ticks(0.0000251), 1);
    }

    #[test]
    fn bad_resolution() {
        assert!(Resolution::new(0.0).is_err());
        assert!(Resolution::new(f64::NAN).is_err());
    }
}
