use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Profile of the 0 -> 1 ramp of a switch function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ramp {
    /// `(1 - cos(pi t)) / 2`.
    Cosine,
    /// `t^3 (10 - 15 t + 6 t^2)`.
    Quintic,
}

/// Non-decreasing switch `g` with `g = 0` below `delta_min`, `g = 1` above
/// `delta_max` and the chosen ramp in between.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwitchFunction {
    delta_min: f64,
    delta_max: f64,
    ramp: Ramp,
}

impl SwitchFunction {
    pub fn new(delta_min: f64, delta_max: f64, ramp: Ramp) -> Result<Self> {
        if !(delta_min.is_finite() && delta_max.is_finite() && delta_min < delta_max) {
            return Err(Error::InvalidArgument(format!(
                "switch window needs delta_min < delta_max, got [{delta_min}, {delta_max}]"
            )));
        }
        Ok(SwitchFunction { delta_min, delta_max, ramp })
    }

    pub fn cosine(delta_min: f64, delta_max: f64) -> Result<Self> {
        Self::new(delta_min, delta_max, Ramp::Cosine)
    }

    pub fn delta(&self) -> (f64, f64) {
        (self.delta_min, self.delta_max)
    }

    pub fn ramp(&self) -> Ramp {
        self.ramp
    }

    pub fn with_ramp(&self, ramp: Ramp) -> Self {
        SwitchFunction { ramp, ..*self }
    }

    /// The same ramp over the middle half of the window.
    pub fn middle_half(&self) -> Self {
        let w = self.delta_max - self.delta_min;
        SwitchFunction {
            delta_min: self.delta_min + w / 4.0,
            delta_max: self.delta_max - w / 4.0,
            ramp: self.ramp,
        }
    }

    /// Whether `e` lies strictly inside the ramp window.
    pub fn is_active(&self, e: f64) -> bool {
        e > self.delta_min && e < self.delta_max
    }

    pub fn value(&self, e: f64) -> f64 {
        if e <= self.delta_min {
            return 0.0;
        }
        if e >= self.delta_max {
            return 1.0;
        }
        let t = (e - self.delta_min) / (self.delta_max - self.delta_min);
        match self.ramp {
            Ramp::Cosine => 0.5 * (1.0 - (PI * t).cos()),
            Ramp::Quintic => t * t * t * (10.0 - 15.0 * t + 6.0 * t * t),
        }
    }

    pub fn derivative(&self, e: f64) -> f64 {
        if !self.is_active(e) {
            return 0.0;
        }
        let w = self.delta_max - self.delta_min;
        let t = (e - self.delta_min) / w;
        match self.ramp {
            Ramp::Cosine => 0.5 * PI * (PI * t).sin() / w,
            Ramp::Quintic => 30.0 * t * t * (1.0 - t) * (1.0 - t) / w,
        }
    }
}
