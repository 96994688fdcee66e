//! Overlapped spatial and temporal blocking: halos, compute blocks, block
//! counts and exact external-memory traffic.
//!
//! 2D inputs block x and stream y; 3D inputs block x and y and stream z.
//! Block `b` along a blocked axis covers `[b * csize - halo, b * csize -
//! halo + bsize)`; only the in-grid part of that window is read, and only
//! its compute block (the window minus both halos) is written.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Dims;
use crate::stencil::{StencilKind, StencilSpec};
use crate::Scalar;

/// Accelerator parameters of one design point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccelConfig {
    pub bsize_x: usize,
    /// Block height; only meaningful (and required) for 3D stencils.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bsize_y: Option<usize>,
    pub par_time: usize,
    pub par_vec: usize,
    /// Kernel clock in Hz.
    pub f_max: f64,
}

impl AccelConfig {
    pub fn d2(bsize_x: usize, par_time: usize, par_vec: usize, f_max: f64) -> Self {
        AccelConfig {
            bsize_x,
            bsize_y: None,
            par_time,
            par_vec,
            f_max,
        }
    }

    pub fn d3(bsize_x: usize, bsize_y: usize, par_time: usize, par_vec: usize, f_max: f64) -> Self {
        AccelConfig {
            bsize_x,
            bsize_y: Some(bsize_y),
            par_time,
            par_vec,
            f_max,
        }
    }

    /// Same design point at another clock.
    pub fn with_f_max(self, f_max: f64) -> Self {
        AccelConfig { f_max, ..self }
    }

    /// Cells per block plane (`bsize_x`, or `bsize_x * bsize_y` in 3D).
    pub fn block_area(&self) -> usize {
        self.bsize_x * self.bsize_y.unwrap_or(1)
    }

    /// Checks the configuration against a stencil of the given kind/radius.
    pub fn validate_for(&self, kind: StencilKind, rad: usize) -> Result<()> {
        if self.par_time == 0 {
            return Err(Error::InvalidConfig("par_time must be at least 1".into()));
        }
        if self.par_vec == 0 {
            return Err(Error::InvalidConfig("par_vec must be at least 1".into()));
        }
        if !self.f_max.is_finite() || self.f_max < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "f_max {} Hz is not valid",
                self.f_max
            )));
        }
        if !self.bsize_x.is_multiple_of(self.par_vec) {
            return Err(Error::InvalidConfig(format!(
                "bsize_x {} is not divisible by par_vec {}",
                self.bsize_x, self.par_vec
            )));
        }
        match (kind.is_3d(), self.bsize_y) {
            (true, None) => {
                return Err(Error::InvalidConfig(format!("{kind} needs bsize_y")));
            }
            (false, Some(_)) => {
                return Err(Error::InvalidConfig(format!("{kind} takes no bsize_y")));
            }
            _ => {}
        }
        let halo = halo_width(rad, self.par_time);
        compute_block(self.bsize_x, halo)?;
        if let Some(by) = self.bsize_y {
            compute_block(by, halo)?;
        }
        Ok(())
    }

    pub fn validate<T: Scalar>(&self, spec: &StencilSpec<T>) -> Result<()> {
        self.validate_for(spec.kind(), spec.rad())
    }
}

/// Width of each halo: `rad * par_time`.
pub fn halo_width(rad: usize, par_time: usize) -> usize {
    rad * par_time
}

/// Compute-block size `bsize - 2 * halo`.
pub fn compute_block(bsize: usize, size_halo: usize) -> Result<usize> {
    if bsize <= 2 * size_halo {
        return Err(Error::BlockTooSmallForHalo {
            bsize,
            halo: size_halo,
        });
    }
    Ok(bsize - 2 * size_halo)
}

/// Number of blocks along one axis, `ceil(dim / csize)`.
///
/// # Panics
/// If `csize` is zero.
pub fn block_count(dim: usize, csize: usize) -> usize {
    dim.div_ceil(csize)
}

/// Cells held by one PE's shift register: `2 * rad` rows (2D) or planes
/// (3D) of the block plus one vector.
pub fn shift_reg_size_for(kind: StencilKind, rad: usize, config: &AccelConfig) -> Result<usize> {
    let plane = if kind.is_3d() {
        let by = config
            .bsize_y
            .ok_or_else(|| Error::InvalidConfig(format!("{kind} needs bsize_y")))?;
        config.bsize_x * by
    } else {
        config.bsize_x
    };
    Ok(2 * rad * plane + config.par_vec)
}

pub fn shift_reg_size<T: Scalar>(spec: &StencilSpec<T>, config: &AccelConfig) -> Result<usize> {
    shift_reg_size_for(spec.kind(), spec.rad(), config)
}

/// Memory-access alignment class of a design point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlignmentStatus {
    /// Every block start and stride is on a 512-bit boundary.
    Full,
    /// Halo is an even number of cells but the full requirement fails.
    Half,
    /// Halo is an odd number of cells.
    Unaligned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alignment {
    pub status: AlignmentStatus,
    /// Cells of device-buffer padding, `(rad * par_time) mod` cells per
    /// 512 bits.
    pub padding: usize,
}

/// Bytes per aligned external-memory access.
pub const ACCESS_BYTES: usize = 64;

/// Classifies alignment of the halo, the block sizes and the blocked dims.
///
/// With `padded`, the device buffers are shifted so the first compute block
/// starts aligned and the halo only needs to be a multiple of 256 bits;
/// without it, the halo itself must be a multiple of 512 bits.
pub fn alignment_status(
    rad: usize,
    par_time: usize,
    bsizes: &[usize],
    dims: &[usize],
    size_cell: usize,
    padded: bool,
) -> Alignment {
    let halo_bytes = rad * par_time * size_cell;
    let halo_unit = if padded {
        ACCESS_BYTES / 2
    } else {
        ACCESS_BYTES
    };
    let aligned = |cells: &usize| (cells * size_cell).is_multiple_of(ACCESS_BYTES);
    let cells_per_access = (ACCESS_BYTES / size_cell.max(1)).max(1);
    let padding = (rad * par_time) % cells_per_access;
    let status = if halo_bytes.is_multiple_of(halo_unit)
        && bsizes.iter().all(aligned)
        && dims.iter().all(aligned)
    {
        AlignmentStatus::Full
    } else if (rad * par_time).is_multiple_of(2) {
        AlignmentStatus::Half
    } else {
        AlignmentStatus::Unaligned
    };
    Alignment { status, padding }
}

/// [`alignment_status`] over the blocked axes of a design point.
pub fn config_alignment(
    kind: StencilKind,
    rad: usize,
    config: &AccelConfig,
    dims: Dims,
    size_cell: usize,
    padded: bool,
) -> Alignment {
    let (bsizes, blocked): (Vec<usize>, Vec<usize>) = match (kind.is_3d(), config.bsize_y) {
        (true, Some(by)) => (vec![config.bsize_x, by], vec![dims.x, dims.y]),
        _ => (vec![config.bsize_x], vec![dims.x]),
    };
    alignment_status(rad, config.par_time, &bsizes, &blocked, size_cell, padded)
}

/// Memory-controller efficiency per alignment class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignmentBands {
    pub full: f64,
    pub half: f64,
    pub unaligned: f64,
}

impl Default for AlignmentBands {
    fn default() -> Self {
        AlignmentBands {
            full: 0.86,
            half: 0.73,
            unaligned: 0.66,
        }
    }
}

impl AlignmentBands {
    pub fn efficiency(&self, status: AlignmentStatus) -> f64 {
        match status {
            AlignmentStatus::Full => self.full,
            AlignmentStatus::Half => self.half,
            AlignmentStatus::Unaligned => self.unaligned,
        }
    }
}

/// Blocking of one blocked axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisBlocking {
    pub dim: usize,
    pub bsize: usize,
    pub csize: usize,
    pub bnum: usize,
    /// `bnum * csize + 2 * halo`.
    pub trav: usize,
    /// In-grid cells covered by all block windows along this axis, counted
    /// with multiplicity.
    pub read_extent: usize,
}

impl AxisBlocking {
    pub fn new(dim: usize, bsize: usize, size_halo: usize) -> Result<Self> {
        let csize = compute_block(bsize, size_halo)?;
        let bnum = block_count(dim, csize);
        Ok(AxisBlocking {
            dim,
            bsize,
            csize,
            bnum,
            trav: bnum * csize + 2 * size_halo,
            read_extent: read_extent(dim, bsize, csize, size_halo),
        })
    }

    /// Extent implied by the closed-form read equations:
    /// `bnum * bsize - (trav - dim)`. Equals [`AxisBlocking::read_extent`]
    /// unless some window overshoots the grid on both of its sides.
    pub fn read_extent_closed_form(&self) -> usize {
        (self.bnum * self.bsize + self.dim) - self.trav
    }
}

/// Exact number of in-grid cells covered by the windows
/// `[b * csize - halo, b * csize - halo + bsize)`, `b < ceil(dim / csize)`.
pub fn read_extent(dim: usize, bsize: usize, csize: usize, size_halo: usize) -> usize {
    let dim_i = dim as i64;
    (0..block_count(dim, csize) as i64)
        .map(|b| {
            let lo = (b * csize as i64 - size_halo as i64).max(0);
            let hi = (b * csize as i64 - size_halo as i64 + bsize as i64).min(dim_i);
            (hi - lo).max(0) as usize
        })
        .sum()
}

/// Geometry and exact per-pass external traffic of one design point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockGeometry {
    pub size_halo: usize,
    pub x: AxisBlocking,
    /// Second blocked axis (3D only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<AxisBlocking>,
    /// Length of the streamed dimension (`dim_y` in 2D, `dim_z` in 3D).
    pub stream: usize,
    pub size_input: usize,
    /// Cells processed per pass, including redundant and out-of-grid ones.
    pub t_cell: usize,
    /// Cells read from external memory per pass, over all input buffers.
    pub t_read: usize,
    /// Cells written to external memory per pass, over all output buffers.
    pub t_write: usize,
    /// Device-buffer padding in cells.
    pub padding: usize,
}

impl BlockGeometry {
    pub fn bnum_total(&self) -> usize {
        self.x.bnum * self.y.map_or(1, |y| y.bnum)
    }
}

/// Exact per-pass traffic for a stencil kind and radius.
pub fn traffic_for(
    kind: StencilKind,
    rad: usize,
    config: &AccelConfig,
    dims: Dims,
) -> Result<BlockGeometry> {
    config.validate_for(kind, rad)?;
    if !dims.is_positive() {
        return Err(Error::DimsMismatch(format!(
            "non-positive dimensions {dims}"
        )));
    }
    if dims.is_3d() != kind.is_3d() {
        return Err(Error::DimsMismatch(format!(
            "{kind} needs {}D dimensions, got {dims}",
            if kind.is_3d() { 3 } else { 2 }
        )));
    }
    let size_halo = halo_width(rad, config.par_time);
    let x = AxisBlocking::new(dims.x, config.bsize_x, size_halo)?;
    let (y, stream) = match config.bsize_y.filter(|_| kind.is_3d()) {
        Some(by) => (
            Some(AxisBlocking::new(dims.y, by, size_halo)?),
            dims.z_or_one(),
        ),
        None => (None, dims.y),
    };
    let plane_cells = x.bnum * x.bsize * y.map_or(1, |y| y.bnum * y.bsize);
    let plane_reads = x.read_extent * y.map_or(1, |y| y.read_extent);
    let cells_per_access = ACCESS_BYTES / crate::stencil::SIZE_CELL;
    Ok(BlockGeometry {
        size_halo,
        x,
        y,
        stream,
        size_input: dims.size(),
        t_cell: plane_cells * stream,
        t_read: kind.num_read() * plane_reads * stream,
        t_write: kind.num_write() * dims.size(),
        padding: size_halo % cells_per_access,
    })
}

pub fn traffic<T: Scalar>(
    spec: &StencilSpec<T>,
    config: &AccelConfig,
    dims: Dims,
) -> Result<BlockGeometry> {
    traffic_for(spec.kind(), spec.rad(), config, dims)
}

/// Reads per pass from the closed-form equations, transcribed term by term
/// (including the `num_read` factor on the 3D expression). Agrees with
/// [`BlockGeometry::t_read`] whenever no window overshoots the grid on both
/// sides.
pub fn t_read_closed_form(geom: &BlockGeometry, kind: StencilKind) -> i128 {
    let num_read = kind.num_read() as i128;
    let t_cell = geom.t_cell as i128;
    let h = geom.size_halo as i128;
    let (tx, dx, bx) = (geom.x.trav as i128, geom.x.dim as i128, geom.x.bnum as i128);
    match geom.y {
        None => {
            let dim_y = geom.stream as i128;
            (t_cell - (tx - dx) * dim_y) * num_read
        }
        Some(y) => {
            let (ty, dy, by) = (y.trav as i128, y.dim as i128, y.bnum as i128);
            let dz = geom.stream as i128;
            let inner = (bx - 1 + by - 1) * (2 * h) * h
                + ((tx - h - dx) * (by - 1) + (ty - h - dy) * (bx - 1)) * (2 * h);
            (t_cell - (tx * ty - dx * dy) * dz - inner * dz) * num_read
        }
    }
}
