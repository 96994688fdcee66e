//! Cycle-count model of a generic FPGA pipeline.
//!
//! Everything is generic over [`PipelineNum`], so the same formulas run on
//! `f64` and on exact rationals such as `num_rational::Ratio<i64>`.
//! Initiation intervals are lower bounds and are never rounded.

use std::fmt::Debug;

use num_traits::Num;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numeric type accepted by the pipeline model.
pub trait PipelineNum: Num + Copy + PartialOrd + Debug {}

impl<T: Num + Copy + PartialOrd + Debug> PipelineNum for T {}

/// Single pipeline description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineSpec<T> {
    /// Pipeline depth in cycles.
    pub p: T,
    /// Trip count (loop iterations or work-items).
    pub l: T,
    /// Stall cycles per iteration of a single work-item loop.
    pub n_d: T,
    /// Barriers in an NDRange kernel.
    pub n_b: T,
    /// Bytes of external memory accessed per cycle.
    pub n_m: T,
    /// External memory bandwidth in bytes per cycle.
    pub bw: T,
    /// Operating frequency in Hz.
    pub f_max: T,
}

/// Widened pipeline processing `n_p` inputs per cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParallelSpec<T> {
    pub p_prime: T,
    pub n_p: T,
}

fn nonneg<T: PipelineNum>(name: &str, v: T) -> Result<()> {
    if v < T::zero() {
        Err(Error::InvalidPipeline(format!(
            "{name} must be nonnegative, got {v:?}"
        )))
    } else {
        Ok(())
    }
}

fn at_least_one<T: PipelineNum>(name: &str, v: T) -> Result<()> {
    if v < T::one() {
        Err(Error::InvalidPipeline(format!(
            "{name} must be at least 1, got {v:?}"
        )))
    } else {
        Ok(())
    }
}

impl<T: PipelineNum> PipelineSpec<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("P", self.p),
            ("N_d", self.n_d),
            ("N_b", self.n_b),
            ("N_m", self.n_m),
            ("BW", self.bw),
        ] {
            nonneg(name, v)?;
        }
        at_least_one("L", self.l)?;
        if self.f_max <= T::zero() {
            return Err(Error::InvalidPipeline("f_max must be positive".into()));
        }
        Ok(())
    }

    pub fn cycles_swi(&self) -> Result<T> {
        cycles_swi(self.p, self.n_d, self.l)
    }

    pub fn cycles_ndrange(&self) -> Result<T> {
        cycles_ndrange(self.p, self.n_b, self.l)
    }
}

impl<T: PipelineNum> ParallelSpec<T> {
    pub fn validate(&self) -> Result<()> {
        nonneg("P'", self.p_prime)?;
        at_least_one("N_p", self.n_p)
    }
}

/// Cycles of a single work-item pipeline: `P + (N_d + 1)(L - 1)`.
pub fn cycles_swi<T: PipelineNum>(p: T, n_d: T, l: T) -> Result<T> {
    nonneg("P", p)?;
    nonneg("N_d", n_d)?;
    at_least_one("L", l)?;
    Ok(p + (n_d + T::one()) * (l - T::one()))
}

/// Cycles of an NDRange pipeline: `P + (N_b + 1)(L - 1)`.
pub fn cycles_ndrange<T: PipelineNum>(p: T, n_b: T, l: T) -> Result<T> {
    nonneg("P", p)?;
    nonneg("N_b", n_b)?;
    at_least_one("L", l)?;
    Ok(p + (n_b + T::one()) * (l - T::one()))
}

/// Wall-clock time of `cycles` at `f_max` Hz.
pub fn seconds<T: PipelineNum>(cycles: T, f_max: T) -> Result<T> {
    nonneg("cycles", cycles)?;
    if f_max <= T::zero() {
        return Err(Error::InvalidPipeline("f_max must be positive".into()));
    }
    Ok(cycles / f_max)
}

/// Lower bound on the initiation interval: `max(dep + 1, N_m * N_p / BW)`.
///
/// `dep` is the stall count (`N_d`) or barrier count (`N_b`); `n_p`
/// defaults to 1.
pub fn ii_lower_bound<T: PipelineNum>(dep: T, n_m: T, bw: T, n_p: Option<T>) -> Result<T> {
    nonneg("dependency stalls", dep)?;
    nonneg("N_m", n_m)?;
    if bw <= T::zero() {
        return Err(Error::InvalidPipeline("BW must be positive".into()));
    }
    let n_p = n_p.unwrap_or_else(T::one);
    at_least_one("N_p", n_p)?;
    let ii_c = dep + T::one();
    let ii_r = n_m * n_p / bw;
    Ok(if ii_r > ii_c { ii_r } else { ii_c })
}

/// Cycles of a pipeline widened by `n_p`: `P' + II (L - N_p) / N_p`.
pub fn cycles_parallel<T: PipelineNum>(p_prime: T, ii: T, l: T, n_p: T) -> Result<T> {
    nonneg("P'", p_prime)?;
    nonneg("II", ii)?;
    at_least_one("N_p", n_p)?;
    if l < n_p {
        return Err(Error::InvalidPipeline(format!(
            "trip count {l:?} smaller than parallelism {n_p:?}"
        )));
    }
    Ok(p_prime + ii * (l - n_p) / n_p)
}
