//! Grid files, JSON configuration and tabular reports.
//!
//! Grid file layout (little-endian): the magic `b"SGR"`, one byte with the
//! number of dimensions (2 or 3), three `u32` extents `x, y, z` (`z = 0`
//! for 2D), then `x * y * z` single-precision cells with x fastest.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{AccelConfig, BlockGeometry};
use crate::grid::{Dims, Grid};
use crate::perf::PerfEstimate;
use crate::projection::ProjectionReport;
use crate::sim::PassCounters;
use crate::stencil::StencilKind;
use crate::tuner::Candidate;

pub const GRID_MAGIC: &[u8; 3] = b"SGR";
pub const GRID_HEADER_LEN: usize = 16;

pub fn encode_grid(grid: &Grid<f32>) -> Vec<u8> {
    let dims = grid.dims();
    let mut out = Vec::with_capacity(GRID_HEADER_LEN + 4 * dims.size());
    out.extend_from_slice(GRID_MAGIC);
    out.push(dims.ndim() as u8);
    for d in [dims.x, dims.y, dims.z.unwrap_or(0)] {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for c in grid.cells() {
        out.extend_from_slice(&c.to_le_bytes());
    }
    out
}

pub fn decode_grid(bytes: &[u8]) -> Result<Grid<f32>> {
    if bytes.len() < GRID_HEADER_LEN {
        return Err(Error::GridFormat("truncated header".into()));
    }
    if &bytes[..3] != GRID_MAGIC {
        return Err(Error::GridFormat("bad magic".into()));
    }
    let word =
        |i: usize| u32::from_le_bytes(bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap()) as usize;
    let dims = match bytes[3] {
        2 => Dims::d2(word(0), word(1)),
        3 => Dims::d3(word(0), word(1), word(2)),
        n => {
            return Err(Error::GridFormat(format!(
                "unsupported dimension count {n}"
            )))
        }
    };
    if !dims.is_positive() {
        return Err(Error::GridFormat(format!("non-positive dimensions {dims}")));
    }
    let body = &bytes[GRID_HEADER_LEN..];
    if body.len() != 4 * dims.size() {
        return Err(Error::GridFormat(format!(
            "{} payload bytes for a {dims} grid ({} expected)",
            body.len(),
            4 * dims.size()
        )));
    }
    let cells = body
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Grid::new(dims, cells)
}

pub fn write_grid(path: &Path, grid: &Grid<f32>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&encode_grid(grid))?;
    w.flush()?;
    Ok(())
}

pub fn read_grid(path: &Path) -> Result<Grid<f32>> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    decode_grid(&bytes)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::InvalidConfig(format!("unknown format `{s}`"))),
        }
    }
}

/// Writes report rows as CSV (with a header) or a JSON array.
pub fn write_rows<R: Serialize, W: Write>(rows: &[R], format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r).map_err(csv_err)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidConfig(format!("csv: {other:?}")),
    }
}

fn bsize_label(c: &AccelConfig) -> String {
    match c.bsize_y {
        Some(y) => format!("{}x{}", c.bsize_x, y),
        None => c.bsize_x.to_string(),
    }
}

fn f3(v: f64) -> String {
    format!("{v:.3}")
}

/// Integer percentage rounded half up.
pub fn pct(frac: f64) -> u32 {
    (frac * 100.0 + 0.5 + 1e-9).floor() as u32
}

/// One performance estimate, in the column layout of a measured-results
/// table.
#[derive(Debug, Clone, Serialize)]
pub struct PredictRow {
    #[serde(rename = "Benchmark")]
    pub benchmark: String,
    #[serde(rename = "Device")]
    pub device: String,
    #[serde(rename = "rad")]
    pub rad: usize,
    #[serde(rename = "bsize")]
    pub bsize: String,
    #[serde(rename = "par_time")]
    pub par_time: usize,
    #[serde(rename = "par_vec")]
    pub par_vec: usize,
    #[serde(rename = "Input Size")]
    pub input_size: String,
    #[serde(rename = "Estimated Perf. (GB/s)")]
    pub gbps: String,
    #[serde(rename = "GFLOP/s")]
    pub gflops: String,
    #[serde(rename = "GCell/s")]
    pub gcells: String,
    #[serde(rename = "f_max (MHz)")]
    pub f_max_mhz: String,
    #[serde(rename = "Redundancy (%)")]
    pub redundancy_pct: String,
    #[serde(rename = "th_mem (GB/s)")]
    pub th_mem: String,
    #[serde(rename = "th_max (GB/s)")]
    pub th_max: String,
    #[serde(rename = "Run Time (s)")]
    pub run_time: String,
    pub t_read: usize,
    pub t_write: usize,
}

impl PredictRow {
    pub fn new(
        kind: StencilKind,
        rad: usize,
        device: &str,
        config: &AccelConfig,
        dims: Dims,
        p: &PerfEstimate,
    ) -> Self {
        PredictRow {
            benchmark: kind.to_string(),
            device: device.to_string(),
            rad,
            bsize: bsize_label(config),
            par_time: config.par_time,
            par_vec: config.par_vec,
            input_size: dims.to_string(),
            gbps: f3(p.throughput),
            gflops: f3(p.gflops),
            gcells: f3(p.gcells),
            f_max_mhz: format!("{:.2}", config.f_max / 1e6),
            redundancy_pct: format!("{:.2}", p.redundancy * 100.0),
            th_mem: f3(p.th_mem),
            th_max: f3(p.th_max),
            run_time: format!("{:.6}", p.run_time),
            t_read: p.geometry.t_read,
            t_write: p.geometry.t_write,
        }
    }
}

/// One ranked tuner candidate.
#[derive(Debug, Clone, Serialize)]
pub struct CandidateRow {
    #[serde(rename = "Rank")]
    pub rank: usize,
    #[serde(rename = "bsize")]
    pub bsize: String,
    #[serde(rename = "par_time")]
    pub par_time: usize,
    #[serde(rename = "par_vec")]
    pub par_vec: usize,
    #[serde(rename = "Input Size")]
    pub input_size: String,
    #[serde(rename = "Estimated Perf. (GB/s)")]
    pub gbps: String,
    #[serde(rename = "GFLOP/s")]
    pub gflops: String,
    #[serde(rename = "GCell/s")]
    pub gcells: String,
    #[serde(rename = "DSP")]
    pub dsp: String,
    #[serde(rename = "Memory Bits")]
    pub bits: String,
    #[serde(rename = "Memory Blocks")]
    pub blocks: String,
    #[serde(rename = "Alignment")]
    pub alignment: String,
    #[serde(rename = "Padding")]
    pub padding: usize,
    #[serde(rename = "Redundancy (%)")]
    pub redundancy_pct: String,
}

impl CandidateRow {
    pub fn new(rank: usize, c: &Candidate) -> Self {
        let p = &c.predicted;
        CandidateRow {
            rank,
            bsize: bsize_label(&c.config),
            par_time: c.config.par_time,
            par_vec: c.config.par_vec,
            input_size: c.dims.to_string(),
            gbps: f3(p.throughput),
            gflops: f3(p.gflops),
            gcells: f3(p.gcells),
            dsp: format!("{}%", pct(c.dsp_frac)),
            bits: format!("{}%", pct(c.bram.bits_frac)),
            blocks: format!("{}%", pct(c.bram.blocks_frac)),
            alignment: format!("{:?}", c.alignment.status).to_lowercase(),
            padding: c.alignment.padding,
            redundancy_pct: format!("{:.2}", p.redundancy * 100.0),
        }
    }
}

/// One projected design, in the column layout of a projection table.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectionRow {
    #[serde(rename = "Benchmark")]
    pub benchmark: String,
    #[serde(rename = "Device")]
    pub device: String,
    #[serde(rename = "rad")]
    pub rad: usize,
    #[serde(rename = "bsize")]
    pub bsize: String,
    #[serde(rename = "par_time")]
    pub par_time: usize,
    #[serde(rename = "par_vec")]
    pub par_vec: usize,
    #[serde(rename = "Input Size")]
    pub input_size: String,
    #[serde(rename = "Estimated Perf. (GB/s)")]
    pub gbps: String,
    #[serde(rename = "GFLOP/s")]
    pub gflops: String,
    #[serde(rename = "GCell/s")]
    pub gcells: String,
    #[serde(rename = "Redundancy")]
    pub redundancy: String,
    #[serde(rename = "Utilized Memory Bandwidth (GB/s)")]
    pub used_bw: String,
    #[serde(rename = "Utilized Memory Bandwidth (%)")]
    pub used_bw_pct: String,
    #[serde(rename = "Memory Bits")]
    pub bits: String,
    #[serde(rename = "Memory Blocks")]
    pub blocks: String,
    #[serde(rename = "DSP")]
    pub dsp: String,
}

impl ProjectionRow {
    pub fn new(device: &str, r: &ProjectionReport) -> Self {
        let p = &r.perf;
        ProjectionRow {
            benchmark: r.kind.to_string(),
            device: device.to_string(),
            rad: r.rad,
            bsize: bsize_label(&r.config),
            par_time: r.config.par_time,
            par_vec: r.config.par_vec,
            input_size: r.dims.to_string(),
            gbps: f3(p.throughput),
            gflops: f3(p.gflops),
            gcells: f3(p.gcells),
            redundancy: format!("{:.2}%", p.redundancy * 100.0),
            used_bw: format!("{:.1}", p.bandwidth_used),
            used_bw_pct: format!("{}%", pct(p.bandwidth_used_frac())),
            bits: format!("{:.0}%", r.bram.bits),
            blocks: format!("{:.0}%", r.bram.blocks),
            dsp: format!("{}%", pct(r.dsp_pct / 100.0)),
        }
    }
}

/// Simulator counters of one pass next to the analytical counts.
#[derive(Debug, Clone, Serialize)]
pub struct CounterRow {
    pub pass: usize,
    pub reads: usize,
    pub writes: usize,
    pub expected_reads: usize,
    pub expected_writes: usize,
    pub matches: bool,
}

pub fn counter_rows(per_pass: &[PassCounters], geom: &BlockGeometry) -> Vec<CounterRow> {
    per_pass
        .iter()
        .enumerate()
        .map(|(i, c)| CounterRow {
            pass: i,
            reads: c.reads,
            writes: c.writes,
            expected_reads: geom.t_read,
            expected_writes: geom.t_write,
            matches: c.reads == geom.t_read && c.writes == geom.t_write,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_round_trip() {
        let g = Grid::from_fn(Dims::d3(3, 2, 4), |x, y, z| {
            (x + 10 * y + 100 * z) as f32 - 0.5
        });
        let bytes = encode_grid(&g);
        assert_eq!(bytes.len(), 16 + 4 * 24);
        assert_eq!(decode_grid(&bytes).unwrap(), g);
        let g2 = Grid::from_fn(Dims::d2(5, 1), |x, _, _| x as f32);
        assert_eq!(decode_grid(&encode_grid(&g2)).unwrap(), g2);
    }

    #[test]
    fn grid_rejects_garbage() {
        let g = Grid::filled(Dims::d2(2, 2), 1.0f32);
        let mut bytes = encode_grid(&g);
        assert!(decode_grid(&bytes[..10]).is_err());
        assert!(decode_grid(&bytes[..bytes.len() - 1]).is_err());
        bytes[0] = b'X';
        assert!(decode_grid(&bytes).is_err());
        let mut bytes = encode_grid(&g);
        bytes[3] = 4;
        assert!(decode_grid(&bytes).is_err());
    }

    #[test]
    fn percent_rounds_half_up() {
        assert_eq!(pct(0.325), 33);
        assert_eq!(pct(0.925), 93);
        assert_eq!(pct(0.675), 68);
        assert_eq!(pct(0.6749), 67);
    }

    #[test]
    fn csv_has_report_headers() {
        let rows = vec![CounterRow {
            pass: 0,
            reads: 1,
            writes: 2,
            expected_reads: 1,
            expected_writes: 2,
            matches: true,
        }];
        let mut buf = Vec::new();
        write_rows(&rows, Format::Csv, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("pass,reads,writes,expected_reads,expected_writes,matches\n"));
    }
}
