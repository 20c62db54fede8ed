//! Key-rate curves along a transmission axis.

use rayon::prelude::*;

use super::{evaluate, Method, Methods, SweepAxis};
use crate::channel::ChannelParams;
use crate::error::{invalid, Result};
use crate::keyrate::{KeyRateBreakdown, ProtocolSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepGrid {
    pub spec: ProtocolSpec,
    pub v: f64,
    pub w1: f64,
    pub w2: f64,
    pub axis: SweepAxis,
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
}

impl SweepGrid {
    /// `t_start == t_end` is accepted and yields identical rows.
    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.t_start && self.t_start <= self.t_end && self.t_end <= 1.0) {
            return Err(invalid(format!(
                "sweep range must satisfy 0 <= t_start <= t_end <= 1, got [{}, {}]",
                self.t_start, self.t_end
            )));
        }
        if self.steps < 2 {
            return Err(invalid(format!("sweep needs at least 2 steps, got {}", self.steps)));
        }
        self.axis.params(self.v, self.w1, self.w2, self.t_end)?;
        Ok(())
    }

    /// Evenly spaced, ascending, endpoints included.
    pub fn t_values(&self) -> Vec<f64> {
        let span = self.t_end - self.t_start;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.t_end
                } else {
                    self.t_start + span * k as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub t: f64,
    pub params: ChannelParams,
    pub closed: Option<KeyRateBreakdown>,
    pub generic: Option<KeyRateBreakdown>,
}

impl SweepRow {
    pub fn get(&self, method: Method) -> Option<&KeyRateBreakdown> {
        match method {
            Method::Closed => self.closed.as_ref(),
            Method::Generic => self.generic.as_ref(),
        }
    }
}

/// One row per grid point, ascending in `t`. Rows are computed in parallel;
/// the output order does not depend on scheduling.
pub fn sweep(grid: &SweepGrid, methods: Methods) -> Result<Vec<SweepRow>> {
    grid.validate()?;
    grid.t_values()
        .into_par_iter()
        .map(|t| {
            let params = grid.axis.params(grid.v, grid.w1, grid.w2, t)?;
            let run = |m: Method| -> Result<Option<KeyRateBreakdown>> {
                if methods.includes(m) {
                    evaluate(m, &grid.spec, &params).map(Some)
                } else {
                    Ok(None)
                }
            };
            Ok(SweepRow {
                t,
                params,
                closed: run(Method::Closed)?,
                generic: run(Method::Generic)?,
            })
        })
        .collect()
}
