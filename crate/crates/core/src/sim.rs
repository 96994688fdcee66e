//! Functional block-at-a-time simulator of the streaming accelerator.
//!
//! Each pass walks the spatial blocks, loads the in-grid part of every
//! block window (out-of-grid positions hold a NaN sentinel), runs up to
//! `par_time` time steps over the whole window and writes back only the
//! in-grid compute block. Neighbours are addressed by clamped global
//! coordinates; a neighbour that falls outside the window reads NaN, so
//! any halo that is too thin shows up as NaN in the output.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{compute_block, halo_width, AccelConfig};
use crate::grid::{Dims, Grid};
use crate::stencil::{evaluate, StencilSpec};
use crate::Scalar;

/// External-memory traffic of one pass, in cells.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassCounters {
    pub reads: usize,
    pub writes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult<T> {
    pub output: Grid<T>,
    /// Cells read over all passes and input buffers.
    pub reads: usize,
    /// Cells written over all passes and output buffers.
    pub writes: usize,
    /// Passes executed, `ceil(iter / par_time)`.
    pub passes: usize,
    pub per_pass: Vec<PassCounters>,
}

/// Knobs for fault injection.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SimOptions {
    /// Cells removed from the halo when placing blocks. Anything above zero
    /// makes neighbouring blocks overlap too little for `par_time` steps.
    pub halo_shrink: usize,
}

/// True iff the output carries no NaN sentinel.
pub fn poison_check<T: Scalar>(result: &SimResult<T>) -> bool {
    !result.output.contains_nan()
}

pub fn simulate<T: Scalar>(
    spec: &StencilSpec<T>,
    config: &AccelConfig,
    field: &Grid<T>,
    power: Option<&Grid<T>>,
    iter: usize,
) -> Result<SimResult<T>> {
    simulate_with(spec, config, field, power, iter, SimOptions::default())
}

pub fn simulate_with<T: Scalar>(
    spec: &StencilSpec<T>,
    config: &AccelConfig,
    field: &Grid<T>,
    power: Option<&Grid<T>>,
    iter: usize,
    opts: SimOptions,
) -> Result<SimResult<T>> {
    config.validate(spec)?;
    spec.check_inputs(field, power)?;
    if iter == 0 {
        return Err(Error::InvalidConfig("iter must be at least 1".into()));
    }
    let halo_full = halo_width(spec.rad(), config.par_time);
    if opts.halo_shrink > halo_full {
        return Err(Error::InvalidConfig(format!(
            "halo shrink {} exceeds halo {halo_full}",
            opts.halo_shrink
        )));
    }
    let halo = halo_full - opts.halo_shrink;
    let dims = field.dims();
    let bsize = [config.bsize_x, config.bsize_y.unwrap_or(dims.y)];
    let csize = [
        compute_block(bsize[0], halo)?,
        if spec.is_3d() {
            compute_block(bsize[1], halo)?
        } else {
            dims.y
        },
    ];
    let bnum = [
        dims.x.div_ceil(csize[0]),
        if spec.is_3d() {
            dims.y.div_ceil(csize[1])
        } else {
            1
        },
    ];

    let passes = iter.div_ceil(config.par_time);
    let mut cur = field.clone();
    let mut per_pass = Vec::with_capacity(passes);
    for p in 0..passes {
        let steps = (iter - p * config.par_time).min(config.par_time);
        let ctx = PassCtx {
            spec,
            dims,
            field: &cur,
            power,
            bsize,
            csize,
            halo,
            steps,
        };
        let tiles: Vec<Tile<T>> = (0..bnum[1])
            .flat_map(|by| (0..bnum[0]).map(move |bx| (bx, by)))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(bx, by)| ctx.run_block(bx, by))
            .collect();

        let mut next = Grid::filled(dims, T::nan());
        let mut counters = PassCounters::default();
        for t in &tiles {
            counters.reads += t.reads;
            counters.writes += t.writes;
            t.store(&mut next);
        }
        per_pass.push(counters);
        cur = next;
    }

    Ok(SimResult {
        output: cur,
        reads: per_pass.iter().map(|c| c.reads).sum(),
        writes: per_pass.iter().map(|c| c.writes).sum(),
        passes,
        per_pass,
    })
}

struct PassCtx<'a, T> {
    spec: &'a StencilSpec<T>,
    dims: Dims,
    field: &'a Grid<T>,
    power: Option<&'a Grid<T>>,
    /// Window extent along x and y (y is the full height in 2D).
    bsize: [usize; 2],
    csize: [usize; 2],
    halo: usize,
    steps: usize,
}

/// Compute-block output of one block, z-major then y then x.
struct Tile<T> {
    x: std::ops::Range<usize>,
    y: std::ops::Range<usize>,
    values: Vec<T>,
    reads: usize,
    writes: usize,
}

impl<T: Scalar> Tile<T> {
    fn store(&self, out: &mut Grid<T>) {
        let dims = out.dims();
        let cells = out.cells_mut();
        let w = self.x.len();
        let mut src = 0;
        for z in 0..dims.z_or_one() {
            for y in self.y.clone() {
                let row = dims.index(self.x.start, y, z);
                cells[row..row + w].copy_from_slice(&self.values[src..src + w]);
                src += w;
            }
        }
    }
}

impl<T: Scalar> PassCtx<'_, T> {
    fn run_block(&self, bx: usize, by: usize) -> Tile<T> {
        let is_3d = self.spec.is_3d();
        let [ex, ey, ez] = self.dims.extents();
        let ox = (bx * self.csize[0]) as isize - self.halo as isize;
        let oy = if is_3d {
            (by * self.csize[1]) as isize - self.halo as isize
        } else {
            0
        };
        let wx = self.bsize[0];
        let wy = if is_3d { self.bsize[1] } else { ey };
        let wz = ez;
        let local = |lx: usize, ly: usize, lz: usize| (lz * wy + ly) * wx + lx;
        let global = |lx: usize, ly: usize| -> Option<(usize, usize)> {
            let gx = ox + lx as isize;
            let gy = oy + ly as isize;
            (gx >= 0 && gy >= 0 && (gx as usize) < ex && (gy as usize) < ey)
                .then_some((gx as usize, gy as usize))
        };

        // load the window from external memory
        let mut buf = vec![T::nan(); wx * wy * wz];
        let mut pbuf = self.power.map(|_| vec![T::nan(); wx * wy * wz]);
        let mut in_grid = 0usize;
        for lz in 0..wz {
            for ly in 0..wy {
                for lx in 0..wx {
                    if let Some((gx, gy)) = global(lx, ly) {
                        let i = local(lx, ly, lz);
                        buf[i] = self.field.get(gx, gy, lz);
                        if let (Some(pb), Some(p)) = (pbuf.as_mut(), self.power) {
                            pb[i] = p.get(gx, gy, lz);
                        }
                        in_grid += 1;
                    }
                }
            }
        }
        let reads = in_grid * self.spec.num_read();

        // PE chain; PEs beyond `steps` pass data through unchanged
        let mut nxt = vec![T::nan(); buf.len()];
        for _ in 0..self.steps {
            for lz in 0..wz {
                for ly in 0..wy {
                    for lx in 0..wx {
                        let i = local(lx, ly, lz);
                        let Some((gx, gy)) = global(lx, ly) else {
                            nxt[i] = T::nan();
                            continue;
                        };
                        let cur = &buf;
                        let fetch = |dx: isize, dy: isize, dz: isize| {
                            let nx = (gx as isize + dx).clamp(0, ex as isize - 1) - ox;
                            let ny = (gy as isize + dy).clamp(0, ey as isize - 1) - oy;
                            let nz = (lz as isize + dz).clamp(0, ez as isize - 1);
                            if nx < 0 || ny < 0 || nx as usize >= wx || ny as usize >= wy {
                                T::nan()
                            } else {
                                cur[local(nx as usize, ny as usize, nz as usize)]
                            }
                        };
                        let pc = pbuf.as_ref().map_or(T::zero(), |pb| pb[i]);
                        nxt[i] = evaluate(self.spec, fetch, pc);
                    }
                }
            }
            std::mem::swap(&mut buf, &mut nxt);
        }

        // write back the in-grid compute block
        let x0 = bx * self.csize[0];
        let xr = x0..(x0 + self.csize[0]).min(ex);
        let yr = if is_3d {
            let y0 = by * self.csize[1];
            y0..(y0 + self.csize[1]).min(ey)
        } else {
            0..ey
        };
        let mut values = Vec::with_capacity(xr.len() * yr.len() * wz);
        for lz in 0..wz {
            for gy in yr.clone() {
                let ly = (gy as isize - oy) as usize;
                let lx0 = (xr.start as isize - ox) as usize;
                let row = local(lx0, ly, lz);
                values.extend_from_slice(&buf[row..row + xr.len()]);
            }
        }
        let writes = values.len() * self.spec.num_write();
        Tile {
            x: xr,
            y: yr,
            values,
            reads,
            writes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::traffic;
    use crate::stencil::{oracle_run, StencilKind};

    fn ramp(dims: Dims) -> Grid<f32> {
        Grid::from_fn(dims, |x, y, z| {
            ((x * 31 + y * 17 + z * 7) % 23) as f32 * 0.37 - 2.0
        })
    }

    #[test]
    fn single_block_small_grid() {
        let spec = StencilSpec::<f32>::builtin(StencilKind::Diffusion2D, 1).unwrap();
        let cfg = AccelConfig::d2(8, 1, 1, 1.0);
        let g = ramp(Dims::d2(8, 8));
        let r = simulate(&spec, &cfg, &g, None, 1).unwrap();
        let o = oracle_run(&spec, &g, None, 1).unwrap();
        assert!(r.output.bit_eq(&o));
        // csize 6 splits 8 columns into two windows of 7 and 3 in-grid columns
        assert_eq!(r.reads, 80);
        assert_eq!(r.writes, 64);
        assert!(poison_check(&r));
    }

    #[test]
    fn hotspot3d_counters_match_geometry() {
        let spec = StencilSpec::<f32>::builtin(StencilKind::Hotspot3D, 1).unwrap();
        let cfg = AccelConfig::d3(16, 16, 2, 4, 1.0);
        let dims = Dims::d3(48, 48, 48);
        let t = ramp(dims);
        let p = Grid::from_fn(dims, |x, y, _| ((x + y) % 5) as f32 * 0.01);
        let r = simulate(&spec, &cfg, &t, Some(&p), 4).unwrap();
        let o = oracle_run(&spec, &t, Some(&p), 4).unwrap();
        assert!(r.output.bit_eq(&o));
        let g = traffic(&spec, &cfg, dims).unwrap();
        assert_eq!(r.passes, 2);
        assert_eq!(r.reads, 2 * g.t_read);
        assert_eq!(r.writes, 2 * g.t_write);
    }

    #[test]
    fn partial_last_pass() {
        let spec = StencilSpec::<f32>::builtin(StencilKind::Diffusion2D, 2).unwrap();
        let cfg = AccelConfig::d2(32, 3, 2, 1.0);
        let g = ramp(Dims::d2(50, 20));
        let r = simulate(&spec, &cfg, &g, None, 7).unwrap();
        assert_eq!(r.passes, 3);
        let o = oracle_run(&spec, &g, None, 7).unwrap();
        assert!(r.output.bit_eq(&o));
    }

    #[test]
    fn shrunken_halo_is_poisoned() {
        let spec = StencilSpec::<f32>::builtin(StencilKind::Diffusion2D, 1).unwrap();
        let cfg = AccelConfig::d2(16, 3, 1, 1.0);
        let g = ramp(Dims::d2(40, 10));
        let r = simulate_with(&spec, &cfg, &g, None, 3, SimOptions { halo_shrink: 1 }).unwrap();
        assert!(!poison_check(&r));
    }

    #[test]
    fn rejects_bad_inputs() {
        let spec = StencilSpec::<f32>::builtin(StencilKind::Diffusion2D, 1).unwrap();
        let g = ramp(Dims::d2(10, 10));
        assert!(matches!(
            simulate(&spec, &AccelConfig::d2(16, 1, 1, 1.0), &g, None, 0),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            simulate(&spec, &AccelConfig::d2(4, 2, 1, 1.0), &g, None, 1),
            Err(Error::BlockTooSmallForHalo { .. })
        ));
        let g3 = ramp(Dims::d3(4, 4, 4));
        assert!(matches!(
            simulate(&spec, &AccelConfig::d2(16, 1, 1, 1.0), &g3, None, 1),
            Err(Error::DimsMismatch(_))
        ));
    }
}
