//! Design-space exploration for FPGA stencil accelerators.
//!
//! The crate models an accelerator that streams one spatial dimension,
//! blocks the remaining ones with overlapped (halo) tiles, and chains
//! `par_time` processing elements to compute several time steps on-chip
//! before writing back. It provides:
//!
//! - [`stencil`]: the four benchmark stencils and a naive reference executor.
//! - [`pipeline`]: the generic pipeline cycle/initiation-interval model.
//! - [`geometry`]: halo, block and exact external-memory traffic counts.
//! - [`sim`]: a functional block-at-a-time simulator with traffic counters.
//! - [`perf`]: bandwidth, run time, throughput and redundancy prediction.
//! - [`tuner`]: enumeration and ranking of feasible design points.
//! - [`projection`]: resource extrapolation and projection to a new device.
//! - [`io`]: grid binary files, JSON configuration and CSV reports.
//!
//! Numeric kernels are generic over [`Scalar`] (`f32` and `f64`); the
//! pipeline model additionally accepts exact rationals. The accelerator
//! itself works on single precision, so the concrete aliases at the crate
//! root use `f32`.

pub mod device;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod perf;
pub mod pipeline;
pub mod projection;
pub mod sim;
pub mod stencil;
pub mod tuner;

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub use device::{DeviceSpec, MemoryKind};
pub use error::{Error, Result};
pub use geometry::{AccelConfig, AlignmentStatus, BlockGeometry};
pub use grid::{Dims, Grid};
pub use perf::PerfEstimate;
pub use sim::SimResult;
pub use stencil::{StencilKind, StencilSpec};

/// Floating-point cell type accepted by the stencil kernels and simulator.
pub trait Scalar:
    Float
    + FromPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Single-precision grid, the cell type used by the accelerator.
pub type Grid32 = Grid<f32>;
/// Single-precision stencil description.
pub type StencilSpec32 = StencilSpec<f32>;
/// Single-precision simulation result.
pub type SimResult32 = SimResult<f32>;
/// Double-precision grid, handy for error analysis against the `f32` path.
pub type Grid64 = Grid<f64>;
/// Double-precision stencil description.
pub type StencilSpec64 = StencilSpec<f64>;
