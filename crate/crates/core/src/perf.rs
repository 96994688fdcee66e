//! Bandwidth, run time, throughput and redundancy prediction.
//!
//! Throughputs are in GB/s with 1 GB = 10^9 bytes.

use serde::{Deserialize, Serialize};

use crate::device::DeviceSpec;
use crate::error::{Error, Result};
use crate::geometry::{traffic_for, AccelConfig, BlockGeometry};
use crate::grid::Dims;
use crate::stencil::{StencilKind, StencilSpec, SIZE_CELL};
use crate::Scalar;

/// Peak external memory bandwidth of a device.
pub fn th_max(device: &DeviceSpec) -> f64 {
    device.num_banks as f64 * device.size_bus as f64 * device.f_mem / 8e9
}

/// Bandwidth the kernel's memory ports can request, ignoring the device cap.
pub fn th_mem_requested(kind: StencilKind, config: &AccelConfig) -> f64 {
    config.f_max * config.par_vec as f64 * kind.num_acc() as f64 * SIZE_CELL as f64 / 1e9
}

/// Utilized bandwidth before the memory-controller efficiency correction:
/// the requested bandwidth capped at the device peak.
pub fn th_mem_uncorrected(device: &DeviceSpec, kind: StencilKind, config: &AccelConfig) -> f64 {
    th_max(device).min(th_mem_requested(kind, config))
}

/// Effective bandwidth `efficiency * min(th_max, requested)`.
pub fn th_mem(
    device: &DeviceSpec,
    kind: StencilKind,
    config: &AccelConfig,
    efficiency: f64,
) -> f64 {
    efficiency * th_mem_uncorrected(device, kind, config)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictOptions {
    /// Memory-controller efficiency in (0, 1].
    pub efficiency: f64,
    /// Lift the `th_max` cap (diagnostics only).
    pub uncapped: bool,
}

impl Default for PredictOptions {
    fn default() -> Self {
        PredictOptions {
            efficiency: 1.0,
            uncapped: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerfEstimate {
    pub th_max: f64,
    /// Effective bandwidth after the efficiency correction.
    pub th_mem: f64,
    /// Bandwidth requested by the kernel, capped at `th_max` but not
    /// corrected for efficiency.
    pub bandwidth_used: f64,
    pub run_time: f64,
    pub throughput: f64,
    pub gflops: f64,
    pub gcells: f64,
    /// Redundant fraction of external traffic.
    pub redundancy: f64,
    /// `th_mem / th_max`.
    pub utilized_bw: f64,
    pub passes: usize,
    pub geometry: BlockGeometry,
}

impl PerfEstimate {
    /// `bandwidth_used / th_max`.
    pub fn bandwidth_used_frac(&self) -> f64 {
        self.bandwidth_used / self.th_max
    }
}

/// Redundant fraction of a pass's traffic:
/// `(t_read + t_write) / (num_acc * size_input) - 1`. Both counts already
/// cover every input or output buffer.
pub fn redundancy(geom: &BlockGeometry, kind: StencilKind) -> f64 {
    let ideal = (kind.num_acc() * geom.size_input) as f64;
    (geom.t_read + geom.t_write) as f64 / ideal - 1.0
}

pub fn predict_for(
    device: &DeviceSpec,
    kind: StencilKind,
    rad: usize,
    config: &AccelConfig,
    dims: Dims,
    iter: usize,
    opts: PredictOptions,
) -> Result<PerfEstimate> {
    if iter == 0 {
        return Err(Error::InvalidConfig("iter must be at least 1".into()));
    }
    if config.f_max.is_nan() || config.f_max <= 0.0 {
        return Err(Error::InvalidConfig("f_max must be positive".into()));
    }
    if !(opts.efficiency > 0.0 && opts.efficiency <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "efficiency {} outside (0, 1]",
            opts.efficiency
        )));
    }
    device.validate()?;
    let geom = traffic_for(kind, rad, config, dims)?;
    let peak = th_max(device);
    let requested = th_mem_requested(kind, config);
    let bandwidth_used = if opts.uncapped {
        requested
    } else {
        peak.min(requested)
    };
    let th_mem = opts.efficiency * bandwidth_used;
    let passes = iter.div_ceil(config.par_time);
    let cell = SIZE_CELL as f64;
    let run_time = passes as f64 * (geom.t_read + geom.t_write) as f64 * cell / (1e9 * th_mem);
    let throughput =
        (kind.num_acc() * geom.size_input) as f64 * cell * iter as f64 / (1e9 * run_time);
    let gcells = throughput / (kind.num_acc() * SIZE_CELL) as f64;
    let flop = kind.flop_per_cell(rad);
    Ok(PerfEstimate {
        th_max: peak,
        th_mem,
        bandwidth_used,
        run_time,
        throughput,
        gflops: gcells * flop as f64,
        gcells,
        redundancy: redundancy(&geom, kind),
        utilized_bw: th_mem / peak,
        passes,
        geometry: geom,
    })
}

pub fn predict<T: Scalar>(
    device: &DeviceSpec,
    spec: &StencilSpec<T>,
    config: &AccelConfig,
    dims: Dims,
    iter: usize,
    efficiency: f64,
) -> Result<PerfEstimate> {
    predict_for(
        device,
        spec.kind(),
        spec.rad(),
        config,
        dims,
        iter,
        PredictOptions {
            efficiency,
            uncapped: false,
        },
    )
}
