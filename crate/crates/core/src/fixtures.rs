//! Published design points and measurements used as regression targets and
//! as projection references.
//!
//! Input sizes of the projected Stratix 10 designs were not published; each
//! one is reconstructed from the rule the designs were sized by (each
//! blocked dimension is the multiple of `csize` closest to 32000 in 2D or
//! 2000 in 3D, with `dim_z = 2000`). Three rows only match their published
//! figures with a different multiple; those carry a note.

use crate::device::DeviceSpec;
use crate::geometry::AccelConfig;
use crate::grid::Dims;
use crate::projection::ReferencePoint;
use crate::stencil::StencilKind;
use crate::tuner::BramModel;

use StencilKind::{Diffusion2D as D2, Diffusion3D as D3, Hotspot2D as H2, Hotspot3D as H3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Board {
    StratixV,
    Arria10,
    Mx2100,
    Gx2800,
}

impl Board {
    pub fn spec(self) -> DeviceSpec {
        match self {
            Board::StratixV => DeviceSpec::stratix_v(),
            Board::Arria10 => DeviceSpec::arria_10(),
            Board::Mx2100 => DeviceSpec::stratix_10_mx(),
            Board::Gx2800 => DeviceSpec::stratix_10_gx(),
        }
    }
}

/// A compiled design with its model estimate and measured resources.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasuredRow {
    pub kind: StencilKind,
    pub rad: usize,
    pub board: Board,
    pub bsize: (usize, Option<usize>),
    pub par_time: usize,
    pub par_vec: usize,
    pub dims: Dims,
    pub f_max_mhz: f64,
    /// Model estimate at `iter = 1000`, efficiency 1, in GB/s.
    pub estimated_gbps: f64,
    /// Block RAM bits and blocks in percent, where measured.
    pub bits_pct: Option<u32>,
    pub blocks_pct: Option<u32>,
    /// DSP usage in percent, where the per-update DSP costs apply.
    pub dsp_pct: Option<u32>,
}

impl MeasuredRow {
    pub fn config(&self) -> AccelConfig {
        AccelConfig {
            bsize_x: self.bsize.0,
            bsize_y: self.bsize.1,
            par_time: self.par_time,
            par_vec: self.par_vec,
            f_max: self.f_max_mhz * 1e6,
        }
    }
}

#[allow(clippy::too_many_arguments)]
const fn row(
    kind: StencilKind,
    rad: usize,
    board: Board,
    bsize: (usize, Option<usize>),
    par_time: usize,
    par_vec: usize,
    dims: Dims,
    f_max_mhz: f64,
    estimated_gbps: f64,
    mem: Option<(u32, u32)>,
    dsp_pct: Option<u32>,
) -> MeasuredRow {
    let (bits_pct, blocks_pct) = match mem {
        Some((b, k)) => (Some(b), Some(k)),
        None => (None, None),
    };
    MeasuredRow {
        kind,
        rad,
        board,
        bsize,
        par_time,
        par_vec,
        dims,
        f_max_mhz,
        estimated_gbps,
        bits_pct,
        blocks_pct,
        dsp_pct,
    }
}

const SV: Board = Board::StratixV;
const A10: Board = Board::Arria10;
const B2: (usize, Option<usize>) = (4096, None);
const fn b3(x: usize, y: usize) -> (usize, Option<usize>) {
    (x, Some(y))
}
const fn sq(d: usize) -> Dims {
    Dims::d2(d, d)
}
const fn cube(d: usize) -> Dims {
    Dims::d3(d, d, d)
}

/// First-order stencils on Stratix V and Arria 10.
///
/// Hotspot DSP usage on Stratix V does not follow the Arria 10 per-update
/// costs (its DSPs lack native floating-point addition), and the 5 x 8
/// Diffusion 3D design on Stratix V needs more DSPs than the device has, so
/// those rows carry no DSP figure.
pub const FIRST_ORDER: [MeasuredRow; 21] = [
    row(
        D2,
        1,
        SV,
        B2,
        6,
        8,
        sq(16336),
        303.39,
        116.141,
        Some((9, 33)),
        Some(95),
    ),
    row(
        D2,
        1,
        SV,
        B2,
        12,
        4,
        sq(16288),
        303.49,
        115.360,
        Some((14, 40)),
        Some(95),
    ),
    row(
        D2,
        1,
        SV,
        B2,
        24,
        2,
        sq(16192),
        292.39,
        110.894,
        Some((22, 52)),
        Some(95),
    ),
    row(
        D2,
        1,
        A10,
        B2,
        36,
        8,
        sq(16096),
        337.78,
        766.918,
        Some((38, 83)),
        Some(95),
    ),
    row(
        D2,
        1,
        A10,
        B2,
        72,
        4,
        sq(15808),
        306.06,
        690.137,
        Some((65, 100)),
        Some(95),
    ),
    row(
        H2,
        1,
        SV,
        B2,
        6,
        8,
        sq(16336),
        272.47,
        153.068,
        Some((13, 43)),
        None,
    ),
    row(
        H2,
        1,
        SV,
        B2,
        12,
        4,
        sq(16288),
        231.64,
        131.977,
        Some((21, 53)),
        None,
    ),
    row(
        H2,
        1,
        A10,
        B2,
        18,
        8,
        sq(16240),
        318.52,
        543.622,
        Some((30, 46)),
        Some(95),
    ),
    row(
        H2,
        1,
        A10,
        B2,
        36,
        4,
        sq(16096),
        333.33,
        566.361,
        Some((53, 86)),
        Some(95),
    ),
    row(
        H2,
        1,
        A10,
        B2,
        72,
        2,
        sq(15808),
        317.95,
        535.303,
        Some((90, 100)),
        Some(95),
    ),
    row(
        D3,
        1,
        SV,
        b3(512, 256),
        4,
        8,
        Dims::d3(504, 744, 504),
        256.14,
        64.874,
        Some((68, 100)),
        Some(91),
    ),
    row(
        D3,
        1,
        SV,
        b3(256, 256),
        4,
        8,
        cube(744),
        296.12,
        74.194,
        Some((36, 67)),
        Some(91),
    ),
    row(
        D3,
        1,
        SV,
        b3(256, 256),
        5,
        8,
        cube(738),
        194.36,
        60.533,
        Some((44, 81)),
        None,
    ),
    row(
        D3,
        1,
        A10,
        b3(256, 256),
        12,
        16,
        cube(696),
        285.71,
        378.345,
        Some((94, 100)),
        Some(89),
    ),
    row(
        D3,
        1,
        A10,
        b3(256, 128),
        20,
        8,
        Dims::d3(648, 704, 648),
        300.00,
        298.799,
        Some((81, 100)),
        Some(74),
    ),
    row(
        D3,
        1,
        A10,
        b3(256, 128),
        24,
        8,
        Dims::d3(832, 720, 832),
        300.00,
        326.680,
        Some((94, 100)),
        Some(89),
    ),
    row(
        H3,
        1,
        SV,
        b3(256, 256),
        4,
        8,
        cube(496),
        259.47,
        97.522,
        Some((68, 100)),
        None,
    ),
    row(
        H3,
        1,
        SV,
        b3(256, 128),
        8,
        4,
        Dims::d3(720, 560, 720),
        263.08,
        91.077,
        Some((68, 100)),
        None,
    ),
    row(
        H3,
        1,
        A10,
        b3(256, 128),
        8,
        16,
        Dims::d3(720, 560, 720),
        250.98,
        245.569,
        Some((67, 100)),
        Some(77),
    ),
    row(
        H3,
        1,
        A10,
        b3(256, 128),
        10,
        16,
        Dims::d3(708, 540, 708),
        261.91,
        298.144,
        Some((81, 100)),
        Some(96),
    ),
    row(
        H3,
        1,
        A10,
        b3(128, 128),
        20,
        8,
        cube(528),
        311.11,
        373.169,
        Some((81, 100)),
        Some(97),
    ),
];

/// Best Diffusion designs for radius 1 to 4. The radius-3 and radius-4 3D
/// designs on Stratix V never compiled; their figures are estimates only.
pub const HIGH_ORDER: [MeasuredRow; 16] = [
    row(
        D2,
        1,
        SV,
        B2,
        12,
        4,
        sq(16288),
        303.49,
        115.360,
        Some((14, 40)),
        Some(95),
    ),
    row(
        D2,
        2,
        SV,
        B2,
        6,
        4,
        sq(16288),
        303.39,
        58.006,
        Some((14, 37)),
        Some(86),
    ),
    row(
        D2,
        3,
        SV,
        B2,
        4,
        4,
        sq(16288),
        304.50,
        38.890,
        Some((14, 36)),
        Some(83),
    ),
    row(
        D2,
        4,
        SV,
        B2,
        7,
        2,
        sq(16160),
        303.58,
        33.791,
        Some((29, 55)),
        Some(95),
    ),
    row(
        D2,
        1,
        A10,
        B2,
        36,
        8,
        sq(16096),
        337.78,
        766.918,
        Some((38, 83)),
        Some(95),
    ),
    row(
        D2,
        2,
        A10,
        B2,
        42,
        4,
        sq(15712),
        322.22,
        422.848,
        Some((75, 100)),
        Some(100),
    ),
    row(
        D2,
        3,
        A10,
        B2,
        28,
        4,
        sq(15712),
        302.56,
        264.700,
        Some((75, 100)),
        Some(96),
    ),
    row(
        D2,
        4,
        A10,
        B2,
        22,
        4,
        sq(15680),
        300.00,
        205.240,
        Some((78, 100)),
        Some(99),
    ),
    row(
        D3,
        1,
        SV,
        b3(256, 256),
        4,
        8,
        cube(744),
        296.12,
        74.194,
        Some((36, 67)),
        Some(91),
    ),
    row(
        D3,
        2,
        SV,
        b3(256, 256),
        2,
        8,
        cube(744),
        259.33,
        32.488,
        Some((52, 89)),
        Some(84),
    ),
    row(
        D3,
        3,
        SV,
        b3(256, 128),
        4,
        2,
        Dims::d3(696, 624, 696),
        250.00,
        14.069,
        None,
        Some(63),
    ),
    row(
        D3,
        4,
        SV,
        b3(256, 256),
        1,
        8,
        cube(744),
        250.00,
        15.660,
        None,
        Some(81),
    ),
    row(
        D3,
        1,
        A10,
        b3(256, 256),
        12,
        16,
        cube(696),
        285.71,
        378.345,
        Some((94, 100)),
        Some(89),
    ),
    row(
        D3,
        2,
        A10,
        b3(256, 128),
        6,
        16,
        Dims::d3(696, 728, 696),
        262.75,
        176.622,
        Some((73, 87)),
        Some(83),
    ),
    row(
        D3,
        3,
        A10,
        b3(256, 128),
        4,
        16,
        Dims::d3(696, 728, 696),
        255.07,
        114.538,
        Some((81, 99)),
        Some(81),
    ),
    row(
        D3,
        4,
        A10,
        b3(256, 128),
        3,
        16,
        Dims::d3(696, 728, 696),
        242.67,
        81.563,
        Some((85, 100)),
        Some(80),
    ),
];

/// Published projection of one design onto a Stratix 10 device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedRow {
    pub kind: StencilKind,
    pub rad: usize,
    pub board: Board,
    pub bsize: (usize, Option<usize>),
    pub par_time: usize,
    pub par_vec: usize,
    pub dims: Dims,
    /// Set when `dims` deviates from the closest-multiple rule.
    pub dims_note: Option<&'static str>,
    pub gbps: f64,
    pub gflops: f64,
    pub gcells: f64,
    pub redundancy_pct: f64,
    /// Utilised bandwidth before the efficiency correction, GB/s and percent.
    pub used_bw_gbps: f64,
    pub used_bw_pct: u32,
    pub bits_pct: u32,
    pub blocks_pct: u32,
}

impl ProjectedRow {
    /// Configuration at the projection clock (450 MHz 2D, 400 MHz 3D).
    pub fn config(&self) -> AccelConfig {
        let f = if self.kind.is_3d() { 400e6 } else { 450e6 };
        AccelConfig {
            bsize_x: self.bsize.0,
            bsize_y: self.bsize.1,
            par_time: self.par_time,
            par_vec: self.par_vec,
            f_max: f,
        }
    }
}

#[allow(clippy::too_many_arguments)]
const fn proj(
    board: Board,
    kind: StencilKind,
    rad: usize,
    bsize: (usize, Option<usize>),
    par_time: usize,
    par_vec: usize,
    dims: Dims,
    dims_note: Option<&'static str>,
    perf: (f64, f64, f64, f64),
    used: (f64, u32),
    mem: (u32, u32),
) -> ProjectedRow {
    ProjectedRow {
        kind,
        rad,
        board,
        bsize,
        par_time,
        par_vec,
        dims,
        dims_note,
        gbps: perf.0,
        gflops: perf.1,
        gcells: perf.2,
        redundancy_pct: perf.3,
        used_bw_gbps: used.0,
        used_bw_pct: used.1,
        bits_pct: mem.0,
        blocks_pct: mem.1,
    }
}

const MX: Board = Board::Mx2100;
const GX: Board = Board::Gx2800;
const fn b2(x: usize) -> (usize, Option<usize>) {
    (x, None)
}

pub const PROJECTED: [ProjectedRow; 20] = [
    proj(MX, D2, 1, b2(16320), 8, 96, sq(32608), None, (2349.504, 2643.192, 293.688, 0.02), (345.6, 68), (20, 67)),
    proj(MX, D2, 2, b2(16308), 4, 108, sq(32584), None, (1321.596, 2808.390, 165.199, 0.02), (388.8, 76), (20, 67)),
    proj(MX, D2, 3, b2(16340), 4, 76, sq(32632), None, (929.898, 2905.931, 116.237, 0.04), (273.6, 53), (25, 68)),
    proj(MX, D2, 4, b2(16356), 2, 116, sq(32680), None, (709.746, 2927.703, 88.718, 0.02), (417.6, 82), (20, 68)),
    proj(MX, D3, 1, b3(980, 512), 4, 140, Dims::d3(1944, 2016, 2000), None, (1066.630, 1733.274, 133.329, 0.80), (448.0, 88), (94, 100)),
    proj(
        MX, D3, 2, b3(592, 512), 2, 148, Dims::d3(2336, 2016, 2000),
        Some("dim_x = 4 * csize_x, the multiple just above 2000; the closest one (1752) misses the published redundancy"),
        (562.053, 1756.415, 70.257, 1.12), (473.6, 93), (85, 100),
    ),
    proj(MX, D3, 3, b3(364, 256), 4, 52, Dims::d3(2040, 2088, 2000), None, (370.432, 1713.247, 46.304, 7.81), (166.4, 33), (88, 100)),
    proj(
        MX, D3, 4, b3(468, 512), 1, 156, Dims::d3(2300, 2016, 2000),
        Some("dim_x = 5 * csize_x, the multiple just above 2000; the closest one (1840) misses the published redundancy"),
        (295.679, 1811.032, 36.960, 1.30), (499.2, 98), (81, 96),
    ),
    proj(
        MX, H2, 1, b2(16368), 8, 48, sq(32720),
        Some("2 * (bsize - halo) = 32720, one halo past two compute blocks, which yields three blocks"),
        (1761.412, 2201.764, 146.784, 0.07), (259.2, 51), (24, 44),
    ),
    proj(MX, H3, 1, b3(972, 256), 4, 108, Dims::d3(1928, 1984, 2000), None, (1202.747, 1703.891, 100.229, 2.17), (512.0, 100), (94, 100)),
    proj(GX, D2, 1, b2(8192), 140, 8, sq(31648), None, (3355.470, 3774.903, 419.434, 1.33), (28.8, 38), (59, 90)),
    proj(GX, D2, 2, b2(8192), 78, 8, sq(31520), None, (1855.527, 3942.994, 231.941, 1.48), (28.8, 38), (65, 86)),
    proj(GX, D2, 3, b2(8192), 52, 8, sq(31520), None, (1243.394, 3885.607, 155.424, 1.48), (28.8, 38), (65, 86)),
    proj(GX, D2, 4, b2(16384), 21, 16, sq(32432), None, (1021.622, 4214.190, 127.703, 0.26), (57.6, 75), (69, 88)),
    proj(GX, D3, 1, b3(544, 256), 24, 32, Dims::d3(1984, 2080, 2000), None, (960.545, 1560.886, 120.068, 14.77), (76.8, 100), (91, 97)),
    proj(GX, D3, 2, b3(352, 256), 12, 32, Dims::d3(2128, 2080, 2000), None, (466.036, 1456.362, 58.254, 18.56), (76.8, 100), (88, 100)),
    proj(GX, D3, 3, b3(320, 256), 8, 32, Dims::d3(1904, 2080, 2000), None, (308.438, 1426.525, 38.555, 19.52), (76.8, 100), (90, 100)),
    proj(GX, D3, 4, b3(256, 256), 7, 32, cube(2000), None, (251.012, 1537.451, 31.377, 28.38), (76.8, 100), (89, 100)),
    proj(GX, H2, 1, b2(8192), 140, 4, sq(31648), None, (2505.663, 3132.079, 208.805, 1.77), (21.6, 28), (81, 90)),
    proj(GX, H3, 1, b3(272, 256), 24, 16, Dims::d3(2016, 2080, 2000), None, (853.364, 1208.933, 71.114, 29.18), (76.8, 100), (92, 100)),
];

/// Most area-consuming Arria 10 design per stencil, used as the BRAM
/// reference for projections.
pub fn a10_reference(kind: StencilKind, rad: usize) -> Option<ReferencePoint> {
    let (bsize, pt, pv, f, bits, blocks) = match (kind, rad) {
        (D2, 1) => (B2, 72, 4, 306.06, 65.0, 100.0),
        (D2, 2) => (B2, 42, 4, 322.22, 75.0, 100.0),
        (D2, 3) => (B2, 28, 4, 302.56, 75.0, 100.0),
        (D2, 4) => (B2, 22, 4, 300.00, 78.0, 100.0),
        (D3, 1) => (b3(256, 256), 12, 16, 285.71, 94.0, 100.0),
        (D3, 2) => (b3(256, 128), 6, 16, 262.75, 73.0, 87.0),
        (D3, 3) => (b3(256, 128), 4, 16, 255.07, 81.0, 99.0),
        (D3, 4) => (b3(256, 128), 3, 16, 242.67, 85.0, 100.0),
        (H2, 1) => (B2, 72, 2, 317.95, 90.0, 100.0),
        (H3, 1) => (b3(128, 128), 20, 8, 311.11, 81.0, 100.0),
        _ => return None,
    };
    Some(ReferencePoint {
        device: DeviceSpec::arria_10(),
        kind,
        rad,
        config: AccelConfig {
            bsize_x: bsize.0,
            bsize_y: bsize.1,
            par_time: pt,
            par_vec: pv,
            f_max: f * 1e6,
        },
        bits_used: bits,
        blocks_used: blocks,
    })
}

/// BRAM model for tuning on `device`: the Arria 10 reference when one
/// exists and the device has a known BSP share, else the analytical model.
pub fn default_bram_model(kind: StencilKind, rad: usize, device: &DeviceSpec) -> BramModel {
    match a10_reference(kind, rad) {
        Some(r) if device.bsp_bram_overhead > 0.0 => BramModel::Reference(Box::new(r)),
        _ => BramModel::Analytical,
    }
}

/// Best measured design for a stencil on a board, with the clock it ran at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunerCase {
    pub kind: StencilKind,
    pub rad: usize,
    pub board: Board,
    pub f_max_mhz: f64,
    pub bsize: (usize, Option<usize>),
    pub par_time: usize,
    pub par_vec: usize,
}

const fn case(
    kind: StencilKind,
    rad: usize,
    board: Board,
    f_max_mhz: f64,
    bsize: (usize, Option<usize>),
    par_time: usize,
    par_vec: usize,
) -> TunerCase {
    TunerCase {
        kind,
        rad,
        board,
        f_max_mhz,
        bsize,
        par_time,
        par_vec,
    }
}

pub const TUNER_CASES: [TunerCase; 12] = [
    case(D2, 1, SV, 303.49, B2, 12, 4),
    case(D2, 2, SV, 303.39, B2, 6, 4),
    case(D2, 3, SV, 304.50, B2, 4, 4),
    case(D2, 4, SV, 303.58, B2, 7, 2),
    case(D2, 1, A10, 337.78, B2, 36, 8),
    case(D2, 2, A10, 322.22, B2, 42, 4),
    case(D2, 3, A10, 302.56, B2, 28, 4),
    case(D2, 4, A10, 300.00, B2, 22, 4),
    case(D3, 1, A10, 285.71, b3(256, 256), 12, 16),
    case(D3, 2, A10, 262.75, b3(256, 128), 6, 16),
    case(D3, 3, A10, 255.07, b3(256, 128), 4, 16),
    case(D3, 4, A10, 242.67, b3(256, 128), 3, 16),
];
