//! Design-space enumeration under DSP and block RAM budgets.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::device::{DeviceSpec, MemoryKind, M20K_BITS};
use crate::error::{Error, Result};
use crate::geometry::{
    compute_block, config_alignment, halo_width, shift_reg_size_for, AccelConfig, Alignment,
    AlignmentStatus,
};
use crate::grid::Dims;
use crate::perf::{predict_for, PerfEstimate, PredictOptions};
use crate::projection::{bram_projection, ReferencePoint};
use crate::stencil::{StencilKind, StencilSpec, SIZE_CELL};
use crate::Scalar;

/// DSPs per cell update as implemented by the compiler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DspCostModel {
    /// DSPs per vector lane per PE.
    pub per_lane: usize,
    /// Extra DSPs per PE independent of the vector width.
    pub per_pe: usize,
    /// Address-calculation overhead of the read and write kernels.
    pub overhead: usize,
}

impl DspCostModel {
    pub fn new(kind: StencilKind, rad: usize, device: &DeviceSpec) -> Self {
        let (per_lane, per_pe) = match kind {
            StencilKind::Diffusion2D => (4 * rad + 1, 0),
            StencilKind::Diffusion3D => (6 * rad + 1, 0),
            StencilKind::Hotspot2D => (10, 0),
            StencilKind::Hotspot3D => (9, 1),
        };
        DspCostModel {
            per_lane,
            per_pe,
            overhead: device.dsp_overhead(kind.is_3d()),
        }
    }

    pub fn usage(&self, par_time: usize, par_vec: usize) -> usize {
        par_time * (par_vec * self.per_lane + self.per_pe) + self.overhead
    }
}

pub fn dsp_usage_for(
    kind: StencilKind,
    rad: usize,
    config: &AccelConfig,
    device: &DeviceSpec,
) -> usize {
    DspCostModel::new(kind, rad, device).usage(config.par_time, config.par_vec)
}

pub fn dsp_usage<T: Scalar>(
    spec: &StencilSpec<T>,
    config: &AccelConfig,
    device: &DeviceSpec,
) -> usize {
    dsp_usage_for(spec.kind(), spec.rad(), config, device)
}

/// Upper bound on `par_time * par_vec`: DSPs left after the address
/// overhead, divided by the per-lane cost.
pub fn par_total_for(kind: StencilKind, rad: usize, device: &DeviceSpec) -> usize {
    let m = DspCostModel::new(kind, rad, device);
    device.dsp_total.saturating_sub(m.overhead) / m.per_lane
}

pub fn par_total<T: Scalar>(spec: &StencilSpec<T>, device: &DeviceSpec) -> usize {
    par_total_for(spec.kind(), spec.rad(), device)
}

/// How block RAM usage is estimated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BramModel {
    /// Shift-register bits from the buffer sizes alone.
    Analytical,
    /// Scaled from a measured design of the same stencil.
    Reference(Box<ReferencePoint>),
}

/// Block RAM usage as fractions of the device, BSP included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BramEstimate {
    pub bits_frac: f64,
    pub blocks_frac: f64,
    /// Blocks needed for read ports alone.
    pub ports_frac: f64,
}

/// Highest bits fraction the tuner accepts.
pub const MAX_BITS_FRAC: f64 = 0.95;

impl BramEstimate {
    pub fn is_feasible(&self) -> bool {
        self.bits_frac <= MAX_BITS_FRAC && self.ports_frac <= 1.0 && self.blocks_frac <= 1.0
    }
}

/// Analytical estimate: every PE holds one shift register (plus a
/// radius-free one for the Hotspot power input), and each shift-register
/// read of each vector lane needs its own block port.
pub fn bram_estimate_for(
    kind: StencilKind,
    rad: usize,
    config: &AccelConfig,
    device: &DeviceSpec,
) -> Result<BramEstimate> {
    let main = shift_reg_size_for(kind, rad, config)?;
    let power = if kind.is_hotspot() {
        config.block_area() + config.par_vec
    } else {
        0
    };
    let kernel_bits = (config.par_time * (main + power) * SIZE_CELL * 8) as f64;
    let bsp = device.bsp_bram_overhead / 100.0;
    let bits_frac = kernel_bits / device.bram_bits as f64 + bsp;
    let blocks_total = device.bram_blocks as f64;
    let size_blocks = (kernel_bits / M20K_BITS as f64).ceil() / blocks_total + bsp;
    let ports = (config.par_time * config.par_vec * kind.num_read_local(rad)) as f64;
    let ports_frac = ports / blocks_total + bsp;
    Ok(BramEstimate {
        bits_frac,
        blocks_frac: size_blocks.max(ports_frac),
        ports_frac,
    })
}

pub fn bram_estimate<T: Scalar>(
    spec: &StencilSpec<T>,
    config: &AccelConfig,
    device: &DeviceSpec,
) -> Result<BramEstimate> {
    bram_estimate_for(spec.kind(), spec.rad(), config, device)
}

fn bram_with_model(
    model: &BramModel,
    kind: StencilKind,
    rad: usize,
    config: &AccelConfig,
    device: &DeviceSpec,
) -> Result<BramEstimate> {
    match model {
        BramModel::Analytical => bram_estimate_for(kind, rad, config, device),
        BramModel::Reference(r) => {
            let p = bram_projection(r, config, device, device.bsp_bram_overhead);
            Ok(BramEstimate {
                bits_frac: p.bits / 100.0,
                blocks_frac: p.blocks / 100.0,
                ports_frac: p.blocks_ports / 100.0,
            })
        }
    }
}

/// How the input size of each candidate is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DimsPolicy {
    /// Same input for every candidate.
    Fixed(Dims),
    /// Each blocked dimension is the multiple of `csize` closest to the
    /// target (the lower one on ties); the streamed dimension is the target.
    FitToBlock { target_2d: usize, target_3d: usize },
}

impl Default for DimsPolicy {
    fn default() -> Self {
        DimsPolicy::FitToBlock {
            target_2d: 16000,
            target_3d: 700,
        }
    }
}

/// Multiple of `csize` closest to `target` (at least `csize`).
pub fn closest_multiple(csize: usize, target: usize) -> usize {
    let lo = (target / csize).max(1) * csize;
    let hi = lo + csize;
    if target.abs_diff(lo) <= target.abs_diff(hi) {
        lo
    } else {
        hi
    }
}

impl DimsPolicy {
    pub fn dims_for(&self, kind: StencilKind, rad: usize, config: &AccelConfig) -> Result<Dims> {
        match *self {
            DimsPolicy::Fixed(d) => Ok(d),
            DimsPolicy::FitToBlock {
                target_2d,
                target_3d,
            } => {
                let h = halo_width(rad, config.par_time);
                let cx = compute_block(config.bsize_x, h)?;
                match config.bsize_y.filter(|_| kind.is_3d()) {
                    Some(by) => {
                        let cy = compute_block(by, h)?;
                        Ok(Dims::d3(
                            closest_multiple(cx, target_3d),
                            closest_multiple(cy, target_3d),
                            target_3d,
                        ))
                    }
                    None => {
                        let d = closest_multiple(cx, target_2d);
                        Ok(Dims::d2(d, d))
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneConstraints {
    /// Assumed kernel clock in Hz.
    pub f_max: f64,
    /// Candidate `(bsize_x, bsize_y)` shapes.
    pub bsizes: Vec<(usize, Option<usize>)>,
    /// Candidate vector widths; empty means every power of two (DDR) or
    /// multiple of four (HBM) that divides `bsize_x`.
    pub par_vecs: Vec<usize>,
    /// Overrides the device's `par_time_cap`.
    pub par_time_cap: Option<usize>,
    pub dims: DimsPolicy,
    pub iter: usize,
    pub efficiency: f64,
    pub bram: BramModel,
    /// Keep only candidates whose alignment is `Full`.
    pub aligned_only: bool,
}

impl TuneConstraints {
    /// 4096-wide blocks for 2D; `bsize_x >= bsize_y` powers of two from 128
    /// to 512 for 3D.
    pub fn new(kind: StencilKind, f_max: f64) -> Self {
        let bsizes = if kind.is_3d() {
            default_bsizes_3d()
        } else {
            vec![(4096, None)]
        };
        TuneConstraints {
            f_max,
            bsizes,
            par_vecs: Vec::new(),
            par_time_cap: None,
            dims: DimsPolicy::default(),
            iter: 1000,
            efficiency: 1.0,
            bram: BramModel::Analytical,
            aligned_only: false,
        }
    }
}

pub fn default_bsizes_3d() -> Vec<(usize, Option<usize>)> {
    let sides = [128, 256, 512];
    sides
        .iter()
        .flat_map(|&x| {
            sides
                .iter()
                .filter(move |&&y| y <= x)
                .map(move |&y| (x, Some(y)))
        })
        .collect()
}

/// One feasible design point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub config: AccelConfig,
    pub dims: Dims,
    pub dsp_used: usize,
    pub dsp_frac: f64,
    pub bram: BramEstimate,
    pub predicted: PerfEstimate,
    pub alignment: Alignment,
}

/// Ranking order: higher predicted throughput first; at equal throughput,
/// fully aligned first, then smaller `par_time`, larger `par_vec`, smaller
/// block.
pub fn rank_order(a: &Candidate, b: &Candidate) -> Ordering {
    let aligned = |c: &Candidate| c.alignment.status != AlignmentStatus::Full;
    b.predicted
        .throughput
        .total_cmp(&a.predicted.throughput)
        .then_with(|| aligned(a).cmp(&aligned(b)))
        .then_with(|| a.config.par_time.cmp(&b.config.par_time))
        .then_with(|| b.config.par_vec.cmp(&a.config.par_vec))
        .then_with(|| a.config.block_area().cmp(&b.config.block_area()))
        .then_with(|| a.config.bsize_x.cmp(&b.config.bsize_x))
}

fn par_vec_candidates(
    device: &DeviceSpec,
    bsize_x: usize,
    limit: usize,
    given: &[usize],
) -> Vec<usize> {
    let all: Vec<usize> = if !given.is_empty() {
        given.to_vec()
    } else {
        match device.memory {
            MemoryKind::Ddr => std::iter::successors(Some(1usize), |v| v.checked_mul(2))
                .take_while(|&v| v <= limit)
                .collect(),
            MemoryKind::Hbm => (1..=limit / 4).map(|k| 4 * k).collect(),
        }
    };
    all.into_iter()
        .filter(|&v| v >= 1 && v <= limit && bsize_x.is_multiple_of(v))
        .collect()
}

/// All feasible design points, ranked by [`rank_order`].
pub fn enumerate_for(
    kind: StencilKind,
    rad: usize,
    device: &DeviceSpec,
    constraints: &TuneConstraints,
) -> Result<Vec<Candidate>> {
    device.validate()?;
    if constraints.f_max.is_nan() || constraints.f_max <= 0.0 {
        return Err(Error::InvalidConfig(
            "assumed f_max must be positive".into(),
        ));
    }
    let limit = par_total_for(kind, rad, device);
    let cap = constraints.par_time_cap.or(device.par_time_cap);
    let dsp = DspCostModel::new(kind, rad, device);

    let shapes: Vec<(usize, Option<usize>, usize)> = constraints
        .bsizes
        .iter()
        .filter(|(_, by)| by.is_some() == kind.is_3d())
        .flat_map(|&(bx, by)| {
            par_vec_candidates(device, bx, limit, &constraints.par_vecs)
                .into_iter()
                .map(move |pv| (bx, by, pv))
        })
        .collect();

    let per_shape: Vec<Result<Vec<Candidate>>> = shapes
        .par_iter()
        .map(|&(bx, by, pv)| {
            let mut out = Vec::new();
            let max_pt = (limit / pv).min(cap.unwrap_or(usize::MAX));
            for pt in 1..=max_pt {
                let config = AccelConfig {
                    bsize_x: bx,
                    bsize_y: by,
                    par_time: pt,
                    par_vec: pv,
                    f_max: constraints.f_max,
                };
                if config.validate_for(kind, rad).is_err() {
                    // larger par_time only shrinks the compute block further
                    break;
                }
                let dsp_used = dsp.usage(pt, pv);
                if dsp_used > device.dsp_total {
                    continue;
                }
                let bram = bram_with_model(&constraints.bram, kind, rad, &config, device)?;
                if !bram.is_feasible() {
                    continue;
                }
                let dims = constraints.dims.dims_for(kind, rad, &config)?;
                let alignment = config_alignment(kind, rad, &config, dims, SIZE_CELL, true);
                if constraints.aligned_only && alignment.status != AlignmentStatus::Full {
                    continue;
                }
                let predicted = predict_for(
                    device,
                    kind,
                    rad,
                    &config,
                    dims,
                    constraints.iter,
                    PredictOptions {
                        efficiency: constraints.efficiency,
                        uncapped: false,
                    },
                )?;
                out.push(Candidate {
                    config,
                    dims,
                    dsp_used,
                    dsp_frac: dsp_used as f64 / device.dsp_total as f64,
                    bram,
                    predicted,
                    alignment,
                });
            }
            Ok(out)
        })
        .collect();

    let mut all = Vec::new();
    for r in per_shape {
        all.extend(r?);
    }
    if all.is_empty() {
        return Err(Error::EmptyResult(format!(
            "{kind} rad {rad} does not fit on {}",
            device.name
        )));
    }
    all.sort_by(rank_order);
    Ok(all)
}

pub fn enumerate<T: Scalar>(
    spec: &StencilSpec<T>,
    device: &DeviceSpec,
    constraints: &TuneConstraints,
) -> Result<Vec<Candidate>> {
    enumerate_for(spec.kind(), spec.rad(), device, constraints)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dsp_examples() {
        let a10 = DeviceSpec::arria_10();
        let d2 = StencilKind::Diffusion2D;
        assert_eq!(
            dsp_usage_for(d2, 1, &AccelConfig::d2(4096, 36, 8, 1.0), &a10),
            1444
        );
        assert_eq!(
            dsp_usage_for(d2, 2, &AccelConfig::d2(4096, 42, 4, 1.0), &a10),
            1516
        );
        let h3 = AccelConfig::d3(128, 128, 2, 1, 1.0);
        assert_eq!(dsp_usage_for(StencilKind::Hotspot3D, 1, &h3, &a10), 28);
    }

    #[test]
    fn par_total_examples() {
        let a10 = DeviceSpec::arria_10();
        assert_eq!(par_total_for(StencilKind::Diffusion2D, 1, &a10), 302);
        assert_eq!(par_total_for(StencilKind::Diffusion2D, 2, &a10), 168);
        assert_eq!(par_total_for(StencilKind::Diffusion3D, 1, &a10), 215);
        let mut none = a10.clone();
        none.dsp_total = 0;
        assert_eq!(par_total_for(StencilKind::Diffusion2D, 1, &none), 0);
    }

    #[test]
    fn analytical_bram() {
        let a10 = DeviceSpec::arria_10();
        let e = bram_estimate_for(
            StencilKind::Diffusion2D,
            1,
            &AccelConfig::d2(4096, 36, 8, 1.0),
            &a10,
        )
        .unwrap();
        assert!(e.is_feasible());
        let e = bram_estimate_for(
            StencilKind::Diffusion2D,
            1,
            &AccelConfig::d2(4096, 500, 1, 1.0),
            &a10,
        )
        .unwrap();
        assert!(!e.is_feasible());
    }

    #[test]
    fn closest_multiples() {
        assert_eq!(closest_multiple(4024, 16000), 16096);
        assert_eq!(closest_multiple(3952, 16000), 15808);
        assert_eq!(closest_multiple(10, 15), 10);
        assert_eq!(closest_multiple(5000, 100), 5000);
    }

    #[test]
    fn zero_dsp_device_is_empty() {
        let mut d = DeviceSpec::arria_10();
        d.dsp_total = 0;
        let c = TuneConstraints::new(StencilKind::Diffusion2D, 300e6);
        assert!(matches!(
            enumerate_for(StencilKind::Diffusion2D, 1, &d, &c),
            Err(Error::EmptyResult(_))
        ));
    }

    #[test]
    fn hbm_vectors_are_multiples_of_four() {
        let mx = DeviceSpec::stratix_10_mx();
        let v = par_vec_candidates(&mx, 16320, 200, &[]);
        assert!(v.iter().all(|p| p % 4 == 0 && 16320 % p == 0));
        assert!(v.contains(&96));
    }
}
