use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncation budget for zonal-polynomial series.
///
/// A series is summed weight by weight (all partitions of `k` form one
/// layer). Summation stops early once three consecutive layers contribute
/// less than the tolerance, and fails loudly when layers keep growing past
/// the midpoint of the budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    /// Largest partition weight `K` that will be summed.
    pub max_degree: usize,
    pub tol: f64,
    pub policy: TolPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TolPolicy {
    Absolute,
    Relative,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation {
            max_degree: 30,
            tol: 1e-10,
            policy: TolPolicy::Relative,
        }
    }
}

impl Truncation {
    pub fn new(max_degree: usize, tol: f64, policy: TolPolicy) -> Self {
        Truncation {
            max_degree,
            tol,
            policy,
        }
    }

    pub fn with_max_degree(self, max_degree: usize) -> Self {
        Truncation { max_degree, ..self }
    }

    fn threshold(&self, acc_magnitude: f64) -> f64 {
        match self.policy {
            TolPolicy::Absolute => self.tol,
            TolPolicy::Relative => self.tol * acc_magnitude.max(f64::MIN_POSITIVE),
        }
    }
}

/// A truncated series value together with its convergence diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue<T> {
    pub value: T,
    /// Number of weight layers actually summed (highest weight + 1).
    pub terms_used: usize,
    pub last_layer_magnitude: f64,
    pub converged: bool,
}

impl<T> SeriesValue<T> {
    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> SeriesValue<U> {
        SeriesValue {
            value: f(self.value),
            terms_used: self.terms_used,
            last_layer_magnitude: self.last_layer_magnitude,
            converged: self.converged,
        }
    }
}

/// Scalar types a series can accumulate.
pub trait LayerScalar: Copy {
    fn zero() -> Self;
    fn accumulate(&mut self, layer: Self);
    fn magnitude(self) -> f64;
}

impl LayerScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn accumulate(&mut self, layer: Self) {
        *self += layer;
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl LayerScalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn accumulate(&mut self, layer: Self) {
        *self += layer;
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Behaviour switches for [`LayerAccum`].
#[derive(Debug, Clone, Copy)]
pub struct SeriesOptions {
    /// Exhausting the budget without convergence is a hard error.
    pub strict_truncation: bool,
    /// Require two consecutive non-increasing layers before an early exit,
    /// and fail if the final layers grow (tail bound for alternating sums).
    pub alternating_guard: bool,
    /// Error out when layers grow for three consecutive weights past K/2.
    pub divergence_check: bool,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions {
            strict_truncation: false,
            alternating_guard: false,
            divergence_check: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerStep {
    Continue,
    Converged,
}

/// Weight-layer accumulator implementing the shared truncation policy.
pub struct LayerAccum<T: LayerScalar> {
    trunc: Truncation,
    opts: SeriesOptions,
    acc: T,
    layers: usize,
    last_mag: f64,
    prev_mag: f64,
    small_streak: usize,
    grow_streak: usize,
    converged: bool,
}

const SMALL_STREAK_EXIT: usize = 3;
const GROW_STREAK_FAIL: usize = 3;

impl<T: LayerScalar> LayerAccum<T> {
    pub fn new(trunc: Truncation, opts: SeriesOptions) -> Self {
        LayerAccum {
            trunc,
            opts,
            acc: T::zero(),
            layers: 0,
            last_mag: f64::NAN,
            prev_mag: f64::NAN,
            small_streak: 0,
            grow_streak: 0,
            converged: false,
        }
    }

    pub fn value(&self) -> T {
        self.acc
    }

    /// Feed the layer for the next weight. Returns `Converged` once the
    /// stopping rule fires; the caller should then stop iterating.
    pub fn push(&mut self, layer: T) -> Result<LayerStep> {
        let mag = layer.magnitude();
        self.acc.accumulate(layer);
        self.prev_mag = self.last_mag;
        self.last_mag = mag;
        self.layers += 1;

        if self.opts.divergence_check
            && self.layers > self.trunc.max_degree / 2
            && !self.prev_mag.is_nan()
            && mag > self.prev_mag
        {
            self.grow_streak += 1;
            if self.grow_streak >= GROW_STREAK_FAIL {
                return Err(Error::DivergenceSuspected {
                    from_degree: self.layers - 1 - self.grow_streak,
                    growing: self.grow_streak,
                });
            }
        } else {
            self.grow_streak = 0;
        }

        let thr = self.trunc.threshold(self.acc.magnitude());
        if mag <= thr {
            self.small_streak += 1;
        } else {
            self.small_streak = 0;
        }

        let alternating_ok =
            !self.opts.alternating_guard || (!self.prev_mag.is_nan() && mag <= self.prev_mag);
        if self.small_streak >= SMALL_STREAK_EXIT && alternating_ok {
            self.converged = true;
            return Ok(LayerStep::Converged);
        }
        Ok(LayerStep::Continue)
    }

    /// Close the series and apply the truncation policy.
    pub fn finish(self) -> Result<SeriesValue<T>> {
        let thr = self.trunc.threshold(self.acc.magnitude());
        let tail_small = self.last_mag.is_nan() || self.last_mag <= thr;
        let converged = self.converged || tail_small;
        if !converged {
            if self.opts.alternating_guard && self.last_mag > self.prev_mag {
                return Err(Error::AlternatingSeriesNotConverged {
                    a: self.prev_mag,
                    b: self.last_mag,
                });
            }
            if self.opts.strict_truncation {
                return Err(Error::TruncationExceeded {
                    terms_used: self.layers,
                    last_layer: self.last_mag,
                });
            }
        }
        Ok(SeriesValue {
            value: self.acc,
            terms_used: self.layers,
            last_layer_magnitude: if self.last_mag.is_nan() {
                0.0
            } else {
                self.last_mag
            },
            converged,
        })
    }
}
