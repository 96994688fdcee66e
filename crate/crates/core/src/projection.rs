//! Resource extrapolation from a measured reference design and performance
//! projection onto another device.
//!
//! Block RAM on the target is scaled from the reference by the ratio of
//! on-chip buffering (`par_time` times the block plane) and by the ratio of
//! the two devices' BRAM capacities, after removing the reference board's
//! BSP share and adding the target's. Block usage is the larger of that
//! size-driven estimate and a port-driven one (one port per shift-register
//! read per vector lane and PE).

use serde::{Deserialize, Serialize};

use crate::device::DeviceSpec;
use crate::error::{Error, Result};
use crate::geometry::AccelConfig;
use crate::grid::Dims;
use crate::perf::{predict_for, PerfEstimate, PredictOptions};
use crate::stencil::{StencilKind, StencilSpec};
use crate::tuner::dsp_usage_for;
use crate::Scalar;

/// Highest bits utilisation considered routable, in percent.
pub const MAX_BITS_PCT: f64 = 95.0;

/// Measured resource usage of one compiled design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferencePoint {
    pub device: DeviceSpec,
    pub kind: StencilKind,
    pub rad: usize,
    pub config: AccelConfig,
    /// Block RAM bits used, in percent, BSP included.
    pub bits_used: f64,
    /// Block RAM blocks used, in percent, BSP included.
    pub blocks_used: f64,
}

impl ReferencePoint {
    pub fn validate(&self) -> Result<()> {
        self.device.validate()?;
        self.config.validate_for(self.kind, self.rad)?;
        for (what, v) in [("bits", self.bits_used), ("blocks", self.blocks_used)] {
            if !(v > 0.0 && v <= 100.0) {
                return Err(Error::InvalidConfig(format!(
                    "reference {what} usage {v}% outside (0, 100]"
                )));
            }
        }
        Ok(())
    }
}

/// Shift-register reads per cell update.
pub fn num_read_local<T: Scalar>(spec: &StencilSpec<T>) -> usize {
    spec.num_read_local()
}

/// Block RAM estimate for a target design, all values in percent of the
/// target device (BSP included).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BramProjection {
    pub bits: f64,
    /// Blocks implied by buffer size, capped at 100.
    pub blocks_size: f64,
    /// Blocks implied by the number of read ports.
    pub blocks_ports: f64,
    /// `max(blocks_size, blocks_ports)`.
    pub blocks: f64,
}

impl BramProjection {
    pub fn is_feasible(&self) -> bool {
        self.bits <= MAX_BITS_PCT && self.blocks_ports <= 100.0
    }
}

/// Unchecked BRAM projection; see [`extrapolate_bram`].
pub fn bram_projection(
    reference: &ReferencePoint,
    target_config: &AccelConfig,
    target_device: &DeviceSpec,
    target_bsp: f64,
) -> BramProjection {
    let rc = &reference.config;
    let ratio = (target_config.par_time * target_config.block_area()) as f64
        / (rc.par_time * rc.block_area()) as f64;
    let ref_bsp = reference.device.bsp_bram_overhead;
    let bits_scale = reference.device.bram_bits as f64 / target_device.bram_bits as f64;
    let blocks_scale = reference.device.bram_blocks as f64 / target_device.bram_blocks as f64;

    let bits = (ratio * bits_scale * (reference.bits_used - ref_bsp)).ceil() + target_bsp;
    let blocks_size =
        ((ratio * blocks_scale * (reference.blocks_used - ref_bsp)).ceil() + target_bsp).min(100.0);
    let ports = target_config.par_time
        * target_config.par_vec
        * reference.kind.num_read_local(reference.rad);
    let blocks_ports =
        (ports as f64 / target_device.bram_blocks as f64 * 100.0).ceil() + target_bsp;
    BramProjection {
        bits,
        blocks_size,
        blocks_ports,
        blocks: blocks_size.max(blocks_ports),
    }
}

/// BRAM bits and blocks (percent) of `target_config` on `target_device`,
/// extrapolated from `reference`.
pub fn extrapolate_bram(
    reference: &ReferencePoint,
    kind: StencilKind,
    rad: usize,
    target_config: &AccelConfig,
    target_device: &DeviceSpec,
    target_bsp: f64,
) -> Result<BramProjection> {
    if reference.kind != kind || reference.rad != rad {
        return Err(Error::InvalidConfig(format!(
            "reference is {} rad {}, target is {kind} rad {rad}",
            reference.kind, reference.rad
        )));
    }
    reference.validate()?;
    target_device.validate()?;
    target_config.validate_for(kind, rad)?;
    let p = bram_projection(reference, target_config, target_device, target_bsp);
    if p.bits > MAX_BITS_PCT {
        return Err(Error::InfeasibleProjection(format!(
            "{:.0}% of block RAM bits exceeds {MAX_BITS_PCT}%",
            p.bits
        )));
    }
    if p.blocks_ports > 100.0 {
        return Err(Error::InfeasibleProjection(format!(
            "{:.0}% of block RAM blocks needed for read ports",
            p.blocks_ports
        )));
    }
    Ok(p)
}

/// Conservative assumptions for a device that has not been measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionAssumptions {
    pub efficiency: f64,
    /// Kernel clock in Hz.
    pub f_max: f64,
    /// Target BSP share of block RAM, in percent.
    pub target_bsp: f64,
}

impl ProjectionAssumptions {
    /// 85% efficiency at 450 MHz for 2D, 60% at 400 MHz for 3D, 10% BSP.
    pub fn defaults(is_3d: bool) -> Self {
        if is_3d {
            ProjectionAssumptions {
                efficiency: 0.60,
                f_max: 400e6,
                target_bsp: 10.0,
            }
        } else {
            ProjectionAssumptions {
                efficiency: 0.85,
                f_max: 450e6,
                target_bsp: 10.0,
            }
        }
    }
}

/// Projected performance and resources of one design on a target device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub kind: StencilKind,
    pub rad: usize,
    pub config: AccelConfig,
    pub dims: Dims,
    pub iter: usize,
    pub perf: PerfEstimate,
    pub bram: BramProjection,
    pub dsp_used: usize,
    /// DSP usage in percent.
    pub dsp_pct: f64,
}

/// Projects `config` (its `f_max` is replaced by the assumed one) onto
/// `target`.
#[allow(clippy::too_many_arguments)]
pub fn project_for(
    kind: StencilKind,
    rad: usize,
    target: &DeviceSpec,
    config: &AccelConfig,
    dims: Dims,
    iter: usize,
    reference: &ReferencePoint,
    assumptions: &ProjectionAssumptions,
) -> Result<ProjectionReport> {
    let config = config.with_f_max(assumptions.f_max);
    let bram = extrapolate_bram(
        reference,
        kind,
        rad,
        &config,
        target,
        assumptions.target_bsp,
    )?;
    let dsp_used = dsp_usage_for(kind, rad, &config, target);
    if dsp_used > target.dsp_total {
        return Err(Error::InfeasibleProjection(format!(
            "{dsp_used} DSPs needed, {} available",
            target.dsp_total
        )));
    }
    let perf = predict_for(
        target,
        kind,
        rad,
        &config,
        dims,
        iter,
        PredictOptions {
            efficiency: assumptions.efficiency,
            uncapped: false,
        },
    )?;
    Ok(ProjectionReport {
        kind,
        rad,
        config,
        dims,
        iter,
        perf,
        bram,
        dsp_used,
        dsp_pct: dsp_used as f64 / target.dsp_total as f64 * 100.0,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn project<T: Scalar>(
    spec: &StencilSpec<T>,
    target: &DeviceSpec,
    config: &AccelConfig,
    dims: Dims,
    iter: usize,
    reference: &ReferencePoint,
    assumptions: &ProjectionAssumptions,
) -> Result<ProjectionReport> {
    project_for(
        spec.kind(),
        spec.rad(),
        target,
        config,
        dims,
        iter,
        reference,
        assumptions,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a10_d2_ref() -> ReferencePoint {
        ReferencePoint {
            device: DeviceSpec::arria_10(),
            kind: StencilKind::Diffusion2D,
            rad: 1,
            config: AccelConfig::d2(4096, 72, 4, 306.06e6),
            bits_used: 65.0,
            blocks_used: 100.0,
        }
    }

    #[test]
    fn read_local_counts() {
        let d2 = StencilSpec::<f32>::builtin(StencilKind::Diffusion2D, 1).unwrap();
        let h3 = StencilSpec::<f32>::builtin(StencilKind::Hotspot3D, 1).unwrap();
        let d3 = StencilSpec::<f32>::builtin(StencilKind::Diffusion3D, 4).unwrap();
        assert_eq!(num_read_local(&d2), 5);
        assert_eq!(num_read_local(&h3), 8);
        assert_eq!(num_read_local(&d3), 25);
    }

    #[test]
    fn mx2100_ports() {
        let cfg = AccelConfig::d2(16320, 8, 96, 450e6);
        let p = extrapolate_bram(
            &a10_d2_ref(),
            StencilKind::Diffusion2D,
            1,
            &cfg,
            &DeviceSpec::stratix_10_mx(),
            10.0,
        )
        .unwrap();
        assert_eq!(p.blocks_ports, 67.0);
        assert_eq!(p.bits, 20.0);
        assert_eq!(p.blocks, 67.0);
    }

    #[test]
    fn identity_projection() {
        let r = a10_d2_ref();
        let p = extrapolate_bram(&r, r.kind, r.rad, &r.config, &r.device, 12.0).unwrap();
        assert_eq!(p.bits, 65.0);
        assert_eq!(p.blocks_size, 100.0);
        assert!(p.blocks >= p.blocks_size && p.blocks >= p.blocks_ports);
    }

    #[test]
    fn bits_scale_linearly_with_par_time() {
        let mut r = a10_d2_ref();
        r.bits_used = 32.0; // 20% above the 12% BSP share
        let target = DeviceSpec::arria_10();
        let one = bram_projection(&r, &AccelConfig::d2(4096, 72, 1, 1.0), &target, 0.0);
        let two = bram_projection(&r, &AccelConfig::d2(4096, 144, 1, 1.0), &target, 0.0);
        assert_eq!(one.bits, 20.0);
        assert_eq!(two.bits, 40.0);
    }

    #[test]
    fn infeasible_and_mismatched() {
        let r = a10_d2_ref();
        let big = AccelConfig::d2(4096, 200, 4, 1.0);
        assert!(matches!(
            extrapolate_bram(&r, r.kind, 1, &big, &r.device, 12.0),
            Err(Error::InfeasibleProjection(_))
        ));
        assert!(
            extrapolate_bram(&r, StencilKind::Diffusion2D, 2, &r.config, &r.device, 12.0).is_err()
        );
    }

    #[test]
    fn project_applies_assumptions() {
        let a = ProjectionAssumptions::defaults(false);
        let rep = project_for(
            StencilKind::Diffusion2D,
            1,
            &DeviceSpec::stratix_10_mx(),
            &AccelConfig::d2(16320, 8, 96, 1.0),
            Dims::d2(32608, 32608),
            5000,
            &a10_d2_ref(),
            &a,
        )
        .unwrap();
        assert_eq!(rep.config.f_max, 450e6);
        assert!((rep.perf.bandwidth_used - 345.6).abs() < 1e-9);
        assert!((rep.perf.throughput - 2349.504).abs() / 2349.504 < 5e-3);
    }
}
