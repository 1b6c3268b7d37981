//! Time-series output of the integrator.

use crate::drive::DriveSignal;
use crate::dynamics::{SimOptions, State};
use crate::error::{Error, Result};
use crate::statics::RobotParams;

/// One integrator step boundary: the state plus the voltage applied at
/// that instant (right-continuous across waveform switches).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub state: State,
    pub v_kv: f64,
}

/// Provenance of a run, carried alongside the samples so downstream
/// analysis never has to guess which options produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetadata {
    pub run_id: String,
    pub options: SimOptions,
}

/// Full record of one simulation run: every accepted step, the exact
/// inputs that produced it, and the nominal step size. Steps shortened
/// to land on waveform switches appear as closer-spaced samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub params: RobotParams,
    pub signal: DriveSignal,
    /// Nominal step size, s. Individual intervals may be shorter.
    pub dt: f64,
    pub metadata: RunMetadata,
}

impl Trajectory {
    /// Builds a trajectory from pre-computed samples, enforcing the
    /// structural invariants (non-empty, strictly increasing times,
    /// finite values). Used by synthetic-series tests and analysis code.
    pub fn from_samples(
        samples: Vec<Sample>,
        params: RobotParams,
        signal: DriveSignal,
        dt: f64,
        metadata: RunMetadata,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput("trajectory must contain at least one sample".into()));
        }
        for pair in samples.windows(2) {
            if !(pair[1].state.t > pair[0].state.t) {
                return Err(Error::InvalidInput(format!(
                    "sample times must be strictly increasing, got {} then {}",
                    pair[0].state.t, pair[1].state.t
                )));
            }
        }
        for s in &samples {
            if !s.state.is_finite() || !s.v_kv.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite sample at t = {}", s.state.t)));
            }
        }
        Ok(Trajectory { samples, params, signal, dt, metadata })
    }

    pub fn start_time(&self) -> f64 {
        self.samples[0].state.t
    }

    pub fn end_time(&self) -> f64 {
        self.samples[self.samples.len() - 1].state.t
    }

    pub fn duration(&self) -> f64 {
        self.end_time() - self.start_time()
    }
}
