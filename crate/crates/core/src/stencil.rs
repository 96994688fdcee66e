//! Benchmark stencils and the naive reference executor.
//!
//! Every stencil is evaluated in one fixed floating-point order (a single
//! left-to-right accumulation chain), so any executor that feeds the same
//! neighbour values through [`evaluate`] produces bit-identical results.
//! Out-of-grid neighbours fall back on the nearest boundary cell.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Dims, Grid};
use crate::Scalar;

/// Highest supported radius for the diffusion stencils.
pub const MAX_RAD: usize = 4;

/// Bytes per grid cell (single precision).
pub const SIZE_CELL: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StencilKind {
    #[serde(rename = "diffusion2d", alias = "Diffusion2D")]
    Diffusion2D,
    #[serde(rename = "diffusion3d", alias = "Diffusion3D")]
    Diffusion3D,
    #[serde(rename = "hotspot2d", alias = "Hotspot2D")]
    Hotspot2D,
    #[serde(rename = "hotspot3d", alias = "Hotspot3D")]
    Hotspot3D,
}

impl StencilKind {
    pub const ALL: [StencilKind; 4] = [
        StencilKind::Diffusion2D,
        StencilKind::Diffusion3D,
        StencilKind::Hotspot2D,
        StencilKind::Hotspot3D,
    ];

    pub fn is_3d(self) -> bool {
        matches!(self, StencilKind::Diffusion3D | StencilKind::Hotspot3D)
    }

    pub fn is_hotspot(self) -> bool {
        matches!(self, StencilKind::Hotspot2D | StencilKind::Hotspot3D)
    }

    pub fn max_rad(self) -> usize {
        if self.is_hotspot() {
            1
        } else {
            MAX_RAD
        }
    }

    /// External-memory input buffers read per cell update.
    pub fn num_read(self) -> usize {
        if self.is_hotspot() {
            2
        } else {
            1
        }
    }

    /// External-memory output buffers written per cell update.
    pub fn num_write(self) -> usize {
        1
    }

    pub fn num_acc(self) -> usize {
        self.num_read() + self.num_write()
    }

    pub fn flop_per_cell(self, rad: usize) -> usize {
        match self {
            StencilKind::Diffusion2D => 8 * rad + 1,
            StencilKind::Diffusion3D => 12 * rad + 1,
            StencilKind::Hotspot2D => 15,
            StencilKind::Hotspot3D => 17,
        }
    }

    /// Reads from the on-chip shift register(s) per cell update.
    pub fn num_read_local(self, rad: usize) -> usize {
        match self {
            StencilKind::Diffusion2D => 4 * rad + 1,
            StencilKind::Diffusion3D => 6 * rad + 1,
            StencilKind::Hotspot2D => 6,
            StencilKind::Hotspot3D => 8,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StencilKind::Diffusion2D => "diffusion2d",
            StencilKind::Diffusion3D => "diffusion3d",
            StencilKind::Hotspot2D => "hotspot2d",
            StencilKind::Hotspot3D => "hotspot3d",
        }
    }
}

impl fmt::Display for StencilKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StencilKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        match norm.as_str() {
            "diffusion2d" => Ok(StencilKind::Diffusion2D),
            "diffusion3d" => Ok(StencilKind::Diffusion3D),
            "hotspot2d" => Ok(StencilKind::Hotspot2D),
            "hotspot3d" => Ok(StencilKind::Hotspot3D),
            _ => Err(Error::UnknownBuiltin(s.to_string())),
        }
    }
}

/// Per-direction coefficients of a star-shaped diffusion stencil; entry
/// `i - 1` of each list belongs to the neighbour at distance `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionCoeffs<T> {
    pub center: T,
    pub west: Vec<T>,
    pub east: Vec<T>,
    pub south: Vec<T>,
    pub north: Vec<T>,
    /// Empty for 2D stencils.
    pub below: Vec<T>,
    /// Empty for 2D stencils.
    pub above: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hotspot2DParams<T> {
    pub sdc: T,
    pub r_x: T,
    pub r_y: T,
    pub r_z: T,
    pub temp_amb: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hotspot3DParams<T> {
    pub c_c: T,
    pub c_n: T,
    pub c_s: T,
    pub c_e: T,
    pub c_w: T,
    pub c_a: T,
    pub c_b: T,
    pub sdc: T,
    pub temp_amb: T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients<T> {
    Diffusion(DiffusionCoeffs<T>),
    Hotspot2D(Hotspot2DParams<T>),
    Hotspot3D(Hotspot3DParams<T>),
}

/// Named coefficient values as they appear in configuration files:
/// `c_c`, `c_w1`..`c_w4`, `c_e*`, `c_s*`, `c_n*`, `c_b*`, `c_a*` for the
/// diffusion stencils; `sdc`, `r_x`, `r_y`, `r_z`, `temp_amb` for Hotspot 2D;
/// `c_c`, `c_n`, `c_s`, `c_e`, `c_w`, `c_a`, `c_b`, `sdc`, `temp_amb` for
/// Hotspot 3D.
pub type CoefficientMap<T> = BTreeMap<String, T>;

const DIFFUSION_DIRS_2D: [&str; 4] = ["w", "e", "s", "n"];
const DIFFUSION_DIRS_3D: [&str; 6] = ["w", "e", "s", "n", "b", "a"];
const HOTSPOT2D_KEYS: [&str; 5] = ["sdc", "r_x", "r_y", "r_z", "temp_amb"];
const HOTSPOT3D_KEYS: [&str; 9] = [
    "c_c", "c_n", "c_s", "c_e", "c_w", "c_a", "c_b", "sdc", "temp_amb",
];

/// One stencil: kind, radius and run-time coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "StencilFile<T>",
    into = "StencilFile<T>",
    bound = "T: Scalar"
)]
pub struct StencilSpec<T> {
    kind: StencilKind,
    rad: usize,
    coeffs: Coefficients<T>,
}

/// On-disk (JSON) form of a [`StencilSpec`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct StencilFile<T> {
    pub kind: StencilKind,
    pub rad: usize,
    #[serde(default)]
    pub coeffs: CoefficientMap<T>,
}

impl<T: Scalar> TryFrom<StencilFile<T>> for StencilSpec<T> {
    type Error = Error;

    fn try_from(f: StencilFile<T>) -> Result<Self> {
        builtin_spec(f.kind, f.rad, &f.coeffs)
    }
}

impl<T: Scalar> From<StencilSpec<T>> for StencilFile<T> {
    fn from(s: StencilSpec<T>) -> Self {
        StencilFile {
            kind: s.kind,
            rad: s.rad,
            coeffs: s.coefficient_map(),
        }
    }
}

fn check_radius(kind: StencilKind, rad: usize) -> Result<()> {
    if kind.is_hotspot() && rad != 1 {
        return Err(Error::HotspotWithHighOrder(rad));
    }
    if rad == 0 || rad > kind.max_rad() {
        return Err(Error::RadiusOutOfRange {
            rad,
            max: kind.max_rad(),
        });
    }
    Ok(())
}

fn expected_keys(kind: StencilKind, rad: usize) -> Vec<String> {
    match kind {
        StencilKind::Diffusion2D | StencilKind::Diffusion3D => {
            let dirs: &[&str] = if kind.is_3d() {
                &DIFFUSION_DIRS_3D
            } else {
                &DIFFUSION_DIRS_2D
            };
            let mut keys = vec!["c_c".to_string()];
            for d in dirs {
                for i in 1..=rad {
                    keys.push(format!("c_{d}{i}"));
                }
            }
            keys
        }
        StencilKind::Hotspot2D => HOTSPOT2D_KEYS.iter().map(|s| s.to_string()).collect(),
        StencilKind::Hotspot3D => HOTSPOT3D_KEYS.iter().map(|s| s.to_string()).collect(),
    }
}

/// Builds a stencil from named coefficients.
pub fn builtin_spec<T: Scalar>(
    kind: StencilKind,
    rad: usize,
    params: &CoefficientMap<T>,
) -> Result<StencilSpec<T>> {
    check_radius(kind, rad)?;
    let keys = expected_keys(kind, rad);
    if let Some(extra) = params.keys().find(|k| !keys.contains(k)) {
        return Err(Error::UnknownCoefficient(extra.clone()));
    }
    let get = |k: &str| -> Result<T> {
        params
            .get(k)
            .copied()
            .ok_or_else(|| Error::MissingCoefficient(k.to_string()))
    };
    let list =
        |d: &str| -> Result<Vec<T>> { (1..=rad).map(|i| get(&format!("c_{d}{i}"))).collect() };

    let coeffs = match kind {
        StencilKind::Diffusion2D | StencilKind::Diffusion3D => {
            let (below, above) = if kind.is_3d() {
                (list("b")?, list("a")?)
            } else {
                (Vec::new(), Vec::new())
            };
            Coefficients::Diffusion(DiffusionCoeffs {
                center: get("c_c")?,
                west: list("w")?,
                east: list("e")?,
                south: list("s")?,
                north: list("n")?,
                below,
                above,
            })
        }
        StencilKind::Hotspot2D => Coefficients::Hotspot2D(Hotspot2DParams {
            sdc: get("sdc")?,
            r_x: get("r_x")?,
            r_y: get("r_y")?,
            r_z: get("r_z")?,
            temp_amb: get("temp_amb")?,
        }),
        StencilKind::Hotspot3D => Coefficients::Hotspot3D(Hotspot3DParams {
            c_c: get("c_c")?,
            c_n: get("c_n")?,
            c_s: get("c_s")?,
            c_e: get("c_e")?,
            c_w: get("c_w")?,
            c_a: get("c_a")?,
            c_b: get("c_b")?,
            sdc: get("sdc")?,
            temp_amb: get("temp_amb")?,
        }),
    };
    Ok(StencilSpec { kind, rad, coeffs })
}

fn lit<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("literal representable")
}

/// Default coefficients for the built-in fixtures.
///
/// Diffusion keeps half of the weight on the centre and spreads the rest
/// evenly over the neighbours. The Hotspot constants are those of the
/// classic thermal simulation on a 16 mm x 16 mm, 0.5 mm thick chip
/// discretised on a 512 x 512 grid.
pub fn default_coefficients<T: Scalar>(kind: StencilKind, rad: usize) -> Result<CoefficientMap<T>> {
    check_radius(kind, rad)?;
    let mut m = CoefficientMap::new();
    match kind {
        StencilKind::Diffusion2D | StencilKind::Diffusion3D => {
            let dirs: &[&str] = if kind.is_3d() {
                &DIFFUSION_DIRS_3D
            } else {
                &DIFFUSION_DIRS_2D
            };
            let neighbour = 0.5 / (dirs.len() * rad) as f64;
            m.insert("c_c".into(), lit(0.5));
            for d in dirs {
                for i in 1..=rad {
                    m.insert(format!("c_{d}{i}"), lit(neighbour));
                }
            }
        }
        StencilKind::Hotspot2D => {
            m.insert("sdc".into(), lit(0.341_333_33));
            m.insert("r_x".into(), lit(0.1));
            m.insert("r_y".into(), lit(0.1));
            m.insert("r_z".into(), lit(1.953_125e-4));
            m.insert("temp_amb".into(), lit(80.0));
        }
        StencilKind::Hotspot3D => {
            let side = 0.034_133_33;
            let vertical = 6.666_667e-5;
            m.insert("c_c".into(), lit(1.0 - (4.0 * side + 3.0 * vertical)));
            for k in ["c_n", "c_s", "c_e", "c_w"] {
                m.insert(k.into(), lit(side));
            }
            m.insert("c_a".into(), lit(vertical));
            m.insert("c_b".into(), lit(vertical));
            m.insert("sdc".into(), lit(0.341_333_33));
            m.insert("temp_amb".into(), lit(80.0));
        }
    }
    Ok(m)
}

impl<T: Scalar> StencilSpec<T> {
    /// Built-in fixture with [`default_coefficients`].
    pub fn builtin(kind: StencilKind, rad: usize) -> Result<Self> {
        builtin_spec(kind, rad, &default_coefficients(kind, rad)?)
    }

    pub fn kind(&self) -> StencilKind {
        self.kind
    }

    pub fn rad(&self) -> usize {
        self.rad
    }

    pub fn coeffs(&self) -> &Coefficients<T> {
        &self.coeffs
    }

    pub fn is_3d(&self) -> bool {
        self.kind.is_3d()
    }

    pub fn num_read(&self) -> usize {
        self.kind.num_read()
    }

    pub fn num_write(&self) -> usize {
        self.kind.num_write()
    }

    pub fn num_acc(&self) -> usize {
        self.kind.num_acc()
    }

    pub fn size_cell(&self) -> usize {
        SIZE_CELL
    }

    pub fn flop_per_cell(&self) -> usize {
        self.kind.flop_per_cell(self.rad)
    }

    /// External-memory bytes per cell update with full spatial reuse.
    pub fn bytes_per_cell(&self) -> usize {
        self.num_acc() * SIZE_CELL
    }

    /// Reads from the on-chip shift register(s) per cell update.
    pub fn num_read_local(&self) -> usize {
        self.kind.num_read_local(self.rad)
    }

    /// Inverse of [`builtin_spec`].
    pub fn coefficient_map(&self) -> CoefficientMap<T> {
        let mut m = CoefficientMap::new();
        match &self.coeffs {
            Coefficients::Diffusion(d) => {
                m.insert("c_c".into(), d.center);
                let lists: [(&str, &Vec<T>); 6] = [
                    ("w", &d.west),
                    ("e", &d.east),
                    ("s", &d.south),
                    ("n", &d.north),
                    ("b", &d.below),
                    ("a", &d.above),
                ];
                for (dir, vals) in lists {
                    for (i, v) in vals.iter().enumerate() {
                        m.insert(format!("c_{dir}{}", i + 1), *v);
                    }
                }
            }
            Coefficients::Hotspot2D(h) => {
                m.insert("sdc".into(), h.sdc);
                m.insert("r_x".into(), h.r_x);
                m.insert("r_y".into(), h.r_y);
                m.insert("r_z".into(), h.r_z);
                m.insert("temp_amb".into(), h.temp_amb);
            }
            Coefficients::Hotspot3D(h) => {
                for (k, v) in [
                    ("c_c", h.c_c),
                    ("c_n", h.c_n),
                    ("c_s", h.c_s),
                    ("c_e", h.c_e),
                    ("c_w", h.c_w),
                    ("c_a", h.c_a),
                    ("c_b", h.c_b),
                    ("sdc", h.sdc),
                    ("temp_amb", h.temp_amb),
                ] {
                    m.insert(k.into(), v);
                }
            }
        }
        m
    }

    /// Checks that `field` (and `power`, for Hotspot) fit this stencil.
    pub fn check_inputs(&self, field: &Grid<T>, power: Option<&Grid<T>>) -> Result<()> {
        let dims = field.dims();
        if dims.is_3d() != self.is_3d() {
            return Err(Error::DimsMismatch(format!(
                "{} stencil applied to a {}D grid",
                self.kind,
                dims.ndim()
            )));
        }
        match (self.kind.is_hotspot(), power) {
            (true, None) => Err(Error::DimsMismatch(format!(
                "{} needs a power grid",
                self.kind
            ))),
            (true, Some(p)) if p.dims() != dims => Err(Error::DimsMismatch(format!(
                "power grid {} differs from temperature grid {dims}",
                p.dims()
            ))),
            _ => Ok(()),
        }
    }
}

/// Evaluates one cell update.
///
/// `fetch(dx, dy, dz)` returns the neighbour at the given offset from the
/// centre; `power_c` is the centre of the power input (ignored by the
/// diffusion stencils). Directions: west/east are -x/+x, north/south are
/// -y/+y, above/below are -z/+z.
#[inline]
pub fn evaluate<T: Scalar>(
    spec: &StencilSpec<T>,
    fetch: impl Fn(isize, isize, isize) -> T,
    power_c: T,
) -> T {
    match &spec.coeffs {
        Coefficients::Diffusion(c) => {
            // each distance's neighbours are summed as one group, then added
            let mut acc = c.center * fetch(0, 0, 0);
            for i in 0..spec.rad {
                let d = (i + 1) as isize;
                let mut group = c.west[i] * fetch(-d, 0, 0);
                group = group + c.east[i] * fetch(d, 0, 0);
                group = group + c.south[i] * fetch(0, d, 0);
                group = group + c.north[i] * fetch(0, -d, 0);
                if spec.is_3d() {
                    group = group + c.below[i] * fetch(0, 0, d);
                    group = group + c.above[i] * fetch(0, 0, -d);
                }
                acc = acc + group;
            }
            acc
        }
        Coefficients::Hotspot2D(h) => {
            let two = T::one() + T::one();
            let fc = fetch(0, 0, 0);
            let fnorth = fetch(0, -1, 0);
            let fsouth = fetch(0, 1, 0);
            let feast = fetch(1, 0, 0);
            let fwest = fetch(-1, 0, 0);
            let inner = power_c + (fnorth + fsouth - two * fc) * h.r_y;
            let inner = inner + (feast + fwest - two * fc) * h.r_x;
            let inner = inner + (h.temp_amb - fc) * h.r_z;
            fc + h.sdc * inner
        }
        Coefficients::Hotspot3D(h) => {
            let mut acc = h.c_c * fetch(0, 0, 0);
            acc = acc + h.c_n * fetch(0, -1, 0);
            acc = acc + h.c_s * fetch(0, 1, 0);
            acc = acc + h.c_e * fetch(1, 0, 0);
            acc = acc + h.c_w * fetch(-1, 0, 0);
            acc = acc + h.c_a * fetch(0, 0, -1);
            acc = acc + h.c_b * fetch(0, 0, 1);
            acc + h.sdc * (power_c + h.c_a * h.temp_amb)
        }
    }
}

#[inline]
fn clamp_axis(c: usize, d: isize, extent: usize) -> usize {
    (c as isize + d).clamp(0, extent as isize - 1) as usize
}

#[inline]
fn point_unchecked<T: Scalar>(
    spec: &StencilSpec<T>,
    field: &Grid<T>,
    power: Option<&Grid<T>>,
    [x, y, z]: [usize; 3],
) -> T {
    let dims = field.dims();
    let [ex, ey, ez] = dims.extents();
    let cells = field.cells();
    let fetch = |dx: isize, dy: isize, dz: isize| {
        cells[dims.index(
            clamp_axis(x, dx, ex),
            clamp_axis(y, dy, ey),
            clamp_axis(z, dz, ez),
        )]
    };
    let pc = power.map_or(T::zero(), |p| p.get(x, y, z));
    evaluate(spec, fetch, pc)
}

/// Evaluates the stencil at `coord` (`[x, y, z]`, `z = 0` for 2D).
pub fn apply_point<T: Scalar>(
    spec: &StencilSpec<T>,
    field: &Grid<T>,
    power: Option<&Grid<T>>,
    coord: [usize; 3],
) -> Result<T> {
    spec.check_inputs(field, power)?;
    let dims = field.dims();
    let [ex, ey, ez] = dims.extents();
    if coord[0] >= ex || coord[1] >= ey || coord[2] >= ez {
        return Err(Error::CoordOutOfBounds {
            coord,
            dims: dims.to_string(),
        });
    }
    Ok(point_unchecked(spec, field, power, coord))
}

/// Reference executor: `iter` double-buffered sweeps of [`apply_point`]
/// over the whole grid. The power grid stays constant.
pub fn oracle_run<T: Scalar>(
    spec: &StencilSpec<T>,
    field: &Grid<T>,
    power: Option<&Grid<T>>,
    iter: usize,
) -> Result<Grid<T>> {
    spec.check_inputs(field, power)?;
    let dims: Dims = field.dims();
    let mut cur = field.clone();
    let mut next = Grid::zeros(dims);
    for _ in 0..iter {
        for z in 0..dims.z_or_one() {
            for y in 0..dims.y {
                for x in 0..dims.x {
                    let v = point_unchecked(spec, &cur, power, [x, y, z]);
                    next.set(x, y, z, v);
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(cur)
}
