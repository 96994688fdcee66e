//! Independent reference implementations shared by the integration tests.
//!
//! Nothing here calls into the crate's evaluator or geometry code: the
//! stencil update rules are written out again by hand, and traffic is
//! counted by walking every block window cell by cell.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stencil_dse::stencil::{builtin_spec, CoefficientMap};
use stencil_dse::{AccelConfig, Dims, Grid, StencilKind, StencilSpec};

/// Second, independently written reference executor over plain vectors.
pub fn naive_run(
    kind: StencilKind,
    rad: usize,
    coeffs: &CoefficientMap<f32>,
    dims: Dims,
    field: &[f32],
    power: Option<&[f32]>,
    iter: usize,
) -> Vec<f32> {
    let (nx, ny, nz) = (dims.x as i64, dims.y as i64, dims.z.unwrap_or(1) as i64);
    let c = |k: &str| coeffs[k];
    let mut cur = field.to_vec();
    for _ in 0..iter {
        let mut next = vec![0.0f32; cur.len()];
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    let at = |dx: i64, dy: i64, dz: i64| -> f32 {
                        let xx = (x + dx).max(0).min(nx - 1);
                        let yy = (y + dy).max(0).min(ny - 1);
                        let zz = (z + dz).max(0).min(nz - 1);
                        cur[((zz * ny + yy) * nx + xx) as usize]
                    };
                    let idx = ((z * ny + y) * nx + x) as usize;
                    next[idx] = match kind {
                        StencilKind::Diffusion2D | StencilKind::Diffusion3D => {
                            let mut v = c("c_c") * at(0, 0, 0);
                            for i in 1..=rad as i64 {
                                let k = |d: &str| c(&format!("c_{d}{i}"));
                                let mut s = k("w") * at(-i, 0, 0) + k("e") * at(i, 0, 0);
                                s += k("s") * at(0, i, 0);
                                s += k("n") * at(0, -i, 0);
                                if kind == StencilKind::Diffusion3D {
                                    s += k("b") * at(0, 0, i);
                                    s += k("a") * at(0, 0, -i);
                                }
                                v += s;
                            }
                            v
                        }
                        StencilKind::Hotspot2D => {
                            let p = power.unwrap()[idx];
                            let fc = at(0, 0, 0);
                            let t = p
                                + (at(0, -1, 0) + at(0, 1, 0) - 2.0 * fc) * c("r_y")
                                + (at(1, 0, 0) + at(-1, 0, 0) - 2.0 * fc) * c("r_x")
                                + (c("temp_amb") - fc) * c("r_z");
                            fc + c("sdc") * t
                        }
                        StencilKind::Hotspot3D => {
                            let p = power.unwrap()[idx];
                            c("c_c") * at(0, 0, 0)
                                + c("c_n") * at(0, -1, 0)
                                + c("c_s") * at(0, 1, 0)
                                + c("c_e") * at(1, 0, 0)
                                + c("c_w") * at(-1, 0, 0)
                                + c("c_a") * at(0, 0, -1)
                                + c("c_b") * at(0, 0, 1)
                                + c("sdc") * (p + c("c_a") * c("temp_amb"))
                        }
                    };
                }
            }
        }
        cur = next;
    }
    cur
}

/// Cells of `[0, dim)` covered by the windows of every block on one axis,
/// counted one cell at a time.
pub fn brute_axis_reads(dim: usize, bsize: usize, halo: usize) -> usize {
    let csize = bsize - 2 * halo;
    let mut count = 0;
    let mut start = -(halo as i64);
    // a block exists while its compute region starts inside the grid
    while start + (halo as i64) < dim as i64 {
        for p in start..start + bsize as i64 {
            if p >= 0 && p < dim as i64 {
                count += 1;
            }
        }
        start += csize as i64;
    }
    count
}

/// Per-pass external reads and writes by brute force.
pub fn brute_traffic(
    kind: StencilKind,
    rad: usize,
    config: &AccelConfig,
    dims: Dims,
) -> (usize, usize) {
    let halo = rad * config.par_time;
    let rx = brute_axis_reads(dims.x, config.bsize_x, halo);
    let plane = match (kind.is_3d(), config.bsize_y) {
        (true, Some(by)) => rx * brute_axis_reads(dims.y, by, halo),
        _ => rx,
    };
    let stream = if kind.is_3d() {
        dims.z.unwrap()
    } else {
        dims.y
    };
    let inputs = if kind.is_hotspot() { 2 } else { 1 };
    (
        inputs * plane * stream,
        dims.x * dims.y * dims.z.unwrap_or(1),
    )
}

/// Random coefficients, distinct per direction and distance so that any
/// swapped neighbour shows up.
pub fn random_coeffs(kind: StencilKind, rad: usize, rng: &mut impl Rng) -> CoefficientMap<f32> {
    let mut m = CoefficientMap::new();
    match kind {
        StencilKind::Diffusion2D | StencilKind::Diffusion3D => {
            let dirs: &[&str] = if kind.is_3d() {
                &["w", "e", "s", "n", "b", "a"]
            } else {
                &["w", "e", "s", "n"]
            };
            m.insert("c_c".into(), rng.gen_range(0.2f32..0.5));
            for d in dirs {
                for i in 1..=rad {
                    m.insert(format!("c_{d}{i}"), rng.gen_range(0.0f32..0.1));
                }
            }
        }
        StencilKind::Hotspot2D => {
            m.insert("sdc".into(), rng.gen_range(0.1f32..0.4));
            m.insert("r_x".into(), rng.gen_range(0.05f32..0.15));
            m.insert("r_y".into(), rng.gen_range(0.05f32..0.15));
            m.insert("r_z".into(), rng.gen_range(1e-4f32..1e-3));
            m.insert("temp_amb".into(), 80.0);
        }
        StencilKind::Hotspot3D => {
            for k in ["c_n", "c_s", "c_e", "c_w"] {
                m.insert(k.into(), rng.gen_range(0.02f32..0.05));
            }
            m.insert("c_a".into(), rng.gen_range(1e-5f32..1e-4));
            m.insert("c_b".into(), rng.gen_range(1e-5f32..1e-4));
            m.insert("c_c".into(), rng.gen_range(0.7f32..0.85));
            m.insert("sdc".into(), rng.gen_range(0.1f32..0.4));
            m.insert("temp_amb".into(), 80.0);
        }
    }
    m
}

pub fn random_field(kind: StencilKind, dims: Dims, rng: &mut impl Rng) -> Grid<f32> {
    if kind.is_hotspot() {
        Grid::from_fn(dims, |_, _, _| rng.gen_range(320.0f32..345.0))
    } else {
        Grid::from_fn(dims, |_, _, _| rng.gen_range(0.0f32..1.0))
    }
}

pub fn random_power(kind: StencilKind, dims: Dims, rng: &mut impl Rng) -> Option<Grid<f32>> {
    kind.is_hotspot()
        .then(|| Grid::from_fn(dims, |_, _, _| rng.gen_range(0.0f32..0.01)))
}

/// One simulator test case.
#[derive(Debug, Clone)]
pub struct Instance {
    pub spec: StencilSpec<f32>,
    pub config: AccelConfig,
    pub dims: Dims,
    pub iter: usize,
    pub field: Grid<f32>,
    pub power: Option<Grid<f32>>,
}

impl Instance {
    pub fn kind(&self) -> StencilKind {
        self.spec.kind()
    }

    pub fn label(&self) -> String {
        let c = &self.config;
        format!(
            "{} rad {} bsize {}{} pt {} pv {} dims {} iter {}",
            self.spec.kind(),
            self.spec.rad(),
            c.bsize_x,
            c.bsize_y.map(|y| format!("x{y}")).unwrap_or_default(),
            c.par_time,
            c.par_vec,
            self.dims,
            self.iter
        )
    }
}

fn block_side(halo: usize, pv: usize, rng: &mut impl Rng, max_csize: usize) -> usize {
    let want = 2 * halo + rng.gen_range(1..=max_csize);
    want.div_ceil(pv) * pv
}

/// Deterministic matrix of small valid instances. Sizes stay within 256 per
/// axis in 2D and 64 per axis in 3D; radius 1 to 4 for Diffusion and 1 for
/// Hotspot; `par_time` and `par_vec` 1 to 4; `iter` 1 to 8, including
/// values that are not multiples of `par_time`.
pub fn instance_matrix(count: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let kind = StencilKind::ALL[i % 4];
            let rad = if kind.is_hotspot() {
                1
            } else {
                1 + (i / 4) % 4
            };
            let pt = 1 + (i / 16) % 4;
            let pv = rng.gen_range(1..=4);
            let iter = rng.gen_range(1..=8);
            let halo = rad * pt;
            let coeffs = random_coeffs(kind, rad, &mut rng);
            let spec = builtin_spec(kind, rad, &coeffs).unwrap();
            let (config, dims) = if kind.is_3d() {
                let bx = block_side(halo, pv, &mut rng, 24);
                let by = block_side(halo, 1, &mut rng, 24);
                let dims = Dims::d3(
                    rng.gen_range(1..=64),
                    rng.gen_range(1..=64),
                    rng.gen_range(1..=24),
                );
                (AccelConfig::d3(bx, by, pt, pv, 300e6), dims)
            } else {
                let bx = block_side(halo, pv, &mut rng, 96);
                let dims = Dims::d2(rng.gen_range(1..=256), rng.gen_range(1..=256));
                (AccelConfig::d2(bx, pt, pv, 300e6), dims)
            };
            let field = random_field(kind, dims, &mut rng);
            let power = random_power(kind, dims, &mut rng);
            Instance {
                spec,
                config,
                dims,
                iter,
                field,
                power,
            }
        })
        .collect()
}

/// True when only the last block's window on each blocked axis extends past
/// the far edge of the grid, the shape the closed-form read count assumes.
pub fn single_overshoot(config: &AccelConfig, dims: Dims, halo: usize, is_3d: bool) -> bool {
    let ok = |dim: usize, bsize: usize| {
        let csize = bsize - 2 * halo;
        let bnum = dim.div_ceil(csize);
        bnum < 2 || (bnum - 1) * csize + halo <= dim
    };
    ok(dims.x, config.bsize_x) && (!is_3d || ok(dims.y, config.bsize_y.unwrap()))
}
