use crate::error::Result;
use crate::numerics::{norms, GridFunction, NormReport};

/// Solution value and time derivative at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub u: GridFunction,
    pub ut: GridFunction,
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Status {
    Completed,
    /// The sup norm reached the blowup threshold at `time`.
    BlowupDetected { time: f64 },
    /// The data came too close to the edge of the computational domain for
    /// the requested horizon.
    TruncationWarning,
}

/// Time-ordered solver output. `norm_history[i]` holds the norms of
/// `states[i].u`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<SolverState>,
    pub step: f64,
    pub norm_history: Vec<NormReport>,
    pub status: Status,
    pub p: f64,
    pub t_end: f64,
}

impl Trajectory {
    pub fn new(step: f64, p: f64, t_end: f64) -> Self {
        Self {
            states: Vec::new(),
            step,
            norm_history: Vec::new(),
            status: Status::Completed,
            p,
            t_end,
        }
    }

    pub fn push(&mut self, state: SolverState) -> Result<()> {
        debug_assert!(self
            .states
            .last()
            .map_or(true, |last| last.time < state.time));
        let report = norms(&state.u, self.p)?;
        self.norm_history.push(report);
        self.states.push(state);
        Ok(())
    }

    pub fn last(&self) -> Option<&SolverState> {
        self.states.last()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().map(|s| s.time)
    }

    /// Stored state closest to `t`.
    pub fn nearest(&self, t: f64) -> Option<&SolverState> {
        self.states
            .iter()
            .min_by(|a, b| (a.time - t).abs().total_cmp(&(b.time - t).abs()))
    }

    pub fn blowup_time(&self) -> Option<f64> {
        match self.status {
            Status::BlowupDetected { time } => Some(time),
            _ => None,
        }
    }
}
