//! Square-wave drive signal.
//!
//! The pump is driven by a two-level voltage waveform: `v_max_kv` for
//! the first `duty` fraction of each period, `v_min_kv` for the rest.
//! Throttling happens through the duty cycle rather than the voltage
//! level, which keeps the pump at its most effective operating point
//! while it is on.

use crate::error::{Error, Result};

/// Two-level periodic drive waveform. Voltages are in kV, never
/// negative, and `v_max_kv >= v_min_kv` so duty = 1 is "full on".
#[derive(Debug, Clone, PartialEq)]
pub struct DriveSignal {
    pub v_max_kv: f64,
    pub v_min_kv: f64,
    /// Fraction of each period spent at `v_max_kv`, in [0, 1].
    pub duty: f64,
    pub frequency_hz: f64,
    /// Shifts the waveform later in time by this many seconds.
    pub phase_s: f64,
}

impl Default for DriveSignal {
    fn default() -> Self {
        DriveSignal {
            v_max_kv: 4.5,
            v_min_kv: 0.0,
            duty: 0.7,
            frequency_hz: 5.0,
            phase_s: 0.0,
        }
    }
}

impl DriveSignal {
    /// Waveform period in seconds, derived from the stored frequency.
    pub fn period(&self) -> f64 {
        1.0 / self.frequency_hz
    }

    /// Checks the field invariants, reporting the offending field by name.
    pub fn validate(&self) -> Result<()> {
        if !self.v_max_kv.is_finite() || !self.v_min_kv.is_finite() {
            return Err(Error::InvalidInput("drive voltages must be finite".into()));
        }
        if self.v_min_kv < 0.0 {
            return Err(Error::InvalidInput(format!(
                "v_min_kv must be non-negative, got {}",
                self.v_min_kv
            )));
        }
        if self.v_max_kv < self.v_min_kv {
            return Err(Error::InvalidInput(format!(
                "v_max_kv ({}) must be at least v_min_kv ({})",
                self.v_max_kv, self.v_min_kv
            )));
        }
        if !(0.0..=1.0).contains(&self.duty) || !self.duty.is_finite() {
            return Err(Error::InvalidInput(format!("duty must lie in [0, 1], got {}", self.duty)));
        }
        if !self.frequency_hz.is_finite() || self.frequency_hz <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "frequency_hz must be finite and positive, got {}",
                self.frequency_hz
            )));
        }
        if !self.phase_s.is_finite() {
            return Err(Error::InvalidInput("phase_s must be finite".into()));
        }
        Ok(())
    }
}

/// Instantaneous drive voltage at time `t` (s).
///
/// The on-interval is half-open: closed at its start, open at its end.
/// At full duty the signal therefore reads `v_max_kv` everywhere, and at
/// zero duty `v_min_kv` everywhere. Times before the phase offset wrap
/// periodically.
pub fn voltage_at(signal: &DriveSignal, t: f64) -> f64 {
    let p = signal.period();
    let local = (t - signal.phase_s).rem_euclid(p);
    if local < signal.duty * p {
        signal.v_max_kv
    } else {
        signal.v_min_kv
    }
}

/// Duty-weighted mean voltage over one period.
pub fn effective_voltage(signal: &DriveSignal) -> f64 {
    signal.duty * signal.v_max_kv + (1.0 - signal.duty) * signal.v_min_kv
}
