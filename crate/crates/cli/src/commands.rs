use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use stencil_dse::fixtures::{a10_reference, default_bram_model};
use stencil_dse::geometry::traffic;
use stencil_dse::io::{
    counter_rows, read_grid, read_json, write_grid, write_rows, CandidateRow, Format, PredictRow,
    ProjectionRow,
};
use stencil_dse::perf;
use stencil_dse::pipeline::{cycles_ndrange, cycles_parallel, cycles_swi, ii_lower_bound, seconds};
use stencil_dse::projection::{self, ProjectionAssumptions, ReferencePoint};
use stencil_dse::sim;
use stencil_dse::stencil::{oracle_run, StencilFile};
use stencil_dse::tuner::{enumerate, DimsPolicy, TuneConstraints};
use stencil_dse::{
    AccelConfig, BlockGeometry, DeviceSpec, Dims, Error, Grid32, SimResult32, StencilKind,
    StencilSpec32,
};

use crate::exit::CliError;
use crate::{AccelArgs, GridArgs, ModelArgs, PipelineArgs, ReportArgs, StencilArgs};

type Result<T> = std::result::Result<T, CliError>;

fn looks_like_file(arg: &str) -> bool {
    arg.ends_with(".json") || Path::new(arg).is_file()
}

fn load_stencil(a: &StencilArgs) -> Result<StencilSpec32> {
    if looks_like_file(&a.stencil) {
        let file: StencilFile<f32> = read_json(Path::new(&a.stencil))?;
        return Ok(file.try_into()?);
    }
    let kind: StencilKind = a.stencil.parse()?;
    Ok(StencilSpec32::builtin(kind, a.rad)?)
}

fn load_device(arg: &str) -> Result<DeviceSpec> {
    let dev: DeviceSpec = if looks_like_file(arg) {
        read_json(Path::new(arg))?
    } else {
        arg.parse()?
    };
    dev.validate()?;
    Ok(dev)
}

fn parse_format(s: &str) -> Result<Format> {
    s.parse().map_err(|e: Error| CliError::Usage(e.to_string()))
}

fn parse_dims(s: &str) -> Result<Dims> {
    Dims::parse(s).map_err(|e| CliError::Usage(e.to_string()))
}

fn accel_config(a: &AccelArgs, default_mhz: f64) -> AccelConfig {
    let mhz = a.fmax_mhz.unwrap_or(default_mhz);
    AccelConfig {
        bsize_x: a.bsize_x,
        bsize_y: a.bsize_y,
        par_time: a.par_time,
        par_vec: a.par_vec,
        f_max: mhz * 1e6,
    }
}

fn emit<R: Serialize>(rows: &[R], format: &str, out: Option<&Path>) -> Result<()> {
    let format = parse_format(format)?;
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_rows(rows, format, &mut w)?;
            w.flush()?;
        }
        None => write_rows(rows, format, io::stdout().lock())?,
    }
    Ok(())
}

/// Deterministic field used when no input grid is given.
fn default_field(dims: Dims) -> Grid32 {
    Grid32::from_fn(dims, |x, y, z| {
        300.0 + ((x * 7 + y * 13 + z * 17) % 101) as f32 / 10.0
    })
}

fn default_power(dims: Dims) -> Grid32 {
    Grid32::from_fn(dims, |x, y, z| {
        ((x * 3 + y * 5 + z * 11) % 17) as f32 / 34.0
    })
}

struct Inputs {
    spec: StencilSpec32,
    field: Grid32,
    power: Option<Grid32>,
}

fn load_inputs(g: &GridArgs) -> Result<Inputs> {
    let spec = load_stencil(&g.stencil)?;
    let field = match (&g.input, &g.dims) {
        (Some(p), _) => read_grid(p)?,
        (None, Some(d)) => default_field(parse_dims(d)?),
        (None, None) => {
            return Err(CliError::Usage(
                "either --input or --dims is required".into(),
            ))
        }
    };
    let power = match (&g.power, spec.kind().is_hotspot()) {
        (Some(p), true) => Some(read_grid(p)?),
        (None, true) => Some(default_power(field.dims())),
        (Some(_), false) => {
            return Err(CliError::Usage(
                "--power only applies to Hotspot stencils".into(),
            ))
        }
        (None, false) => None,
    };
    spec.check_inputs(&field, power.as_ref())?;
    Ok(Inputs { spec, field, power })
}

pub fn oracle(g: &GridArgs, out: &Path) -> Result<()> {
    let inp = load_inputs(g)?;
    let res = oracle_run(&inp.spec, &inp.field, inp.power.as_ref(), g.iter)?;
    Ok(write_grid(out, &res)?)
}

/// Runs the simulator; the clock does not affect functional results.
fn run_simulator(g: &GridArgs, a: &AccelArgs) -> Result<(Inputs, SimResult32, BlockGeometry)> {
    let inp = load_inputs(g)?;
    let cfg = accel_config(a, 1.0);
    let res = sim::simulate(&inp.spec, &cfg, &inp.field, inp.power.as_ref(), g.iter)?;
    let geom = traffic(&inp.spec, &cfg, inp.field.dims())?;
    Ok((inp, res, geom))
}

pub fn simulate(
    g: &GridArgs,
    a: &AccelArgs,
    out: Option<&Path>,
    oracle: Option<&Path>,
    r: &ReportArgs,
) -> Result<()> {
    let (_, res, geom) = run_simulator(g, a)?;
    if let Some(out) = out {
        write_grid(out, &res.output)?;
    }
    emit(
        &counter_rows(&res.per_pass, &geom),
        &r.format,
        r.out.as_deref(),
    )?;
    if let Some(path) = oracle {
        let want = read_grid(path)?;
        match res.output.bit_diff_count(&want) {
            Some(0) => eprintln!("output matches {}", path.display()),
            Some(n) => {
                return Err(CliError::Verify(format!(
                    "{n} cells differ from {}",
                    path.display()
                )))
            }
            None => {
                return Err(CliError::Verify(format!(
                    "{} has other dimensions",
                    path.display()
                )))
            }
        }
    }
    Ok(())
}

pub fn validate(g: &GridArgs, a: &AccelArgs, report: &ReportArgs) -> Result<()> {
    let (inp, res, geom) = run_simulator(g, a)?;
    let rows = counter_rows(&res.per_pass, &geom);
    emit(&rows, &report.format, report.out.as_deref())?;
    if let Some(bad) = rows.iter().find(|r| !r.matches) {
        return Err(CliError::Verify(format!(
            "pass {} moved {}/{} cells, expected {}/{}",
            bad.pass, bad.reads, bad.writes, bad.expected_reads, bad.expected_writes
        )));
    }
    let want = oracle_run(&inp.spec, &inp.field, inp.power.as_ref(), g.iter)?;
    if !res.output.bit_eq(&want) {
        let n = res.output.bit_diff_count(&want).unwrap_or(0);
        return Err(CliError::Verify(format!(
            "{n} cells differ from the reference executor"
        )));
    }
    eprintln!(
        "counters match over {} passes; output identical to the reference",
        res.passes
    );
    Ok(())
}

pub fn predict(
    m: &ModelArgs,
    a: &AccelArgs,
    dims: &str,
    efficiency: f64,
    r: &ReportArgs,
) -> Result<()> {
    let spec = load_stencil(&m.stencil)?;
    let dev = load_device(&m.device)?;
    let Some(_) = a.fmax_mhz else {
        return Err(CliError::Usage("--fmax-mhz is required".into()));
    };
    let cfg = accel_config(a, 0.0);
    let dims = parse_dims(dims)?;
    let p = perf::predict(&dev, &spec, &cfg, dims, m.iter, efficiency)?;
    let row = PredictRow::new(spec.kind(), spec.rad(), &dev.name, &cfg, dims, &p);
    emit(&[row], &r.format, r.out.as_deref())
}

#[allow(clippy::too_many_arguments)]
pub fn tune(
    m: &ModelArgs,
    fmax_mhz: f64,
    dims: Option<&str>,
    efficiency: f64,
    aligned_only: bool,
    top: Option<usize>,
    r: &ReportArgs,
) -> Result<()> {
    let spec = load_stencil(&m.stencil)?;
    let dev = load_device(&m.device)?;
    let mut c = TuneConstraints::new(spec.kind(), fmax_mhz * 1e6);
    c.iter = m.iter;
    c.efficiency = efficiency;
    c.aligned_only = aligned_only;
    c.bram = default_bram_model(spec.kind(), spec.rad(), &dev);
    if let Some(d) = dims {
        c.dims = DimsPolicy::Fixed(parse_dims(d)?);
    }
    let list = enumerate(&spec, &dev, &c)?;
    let rows: Vec<CandidateRow> = list
        .iter()
        .take(top.unwrap_or(usize::MAX))
        .enumerate()
        .map(|(i, cand)| CandidateRow::new(i + 1, cand))
        .collect();
    emit(&rows, &r.format, r.out.as_deref())
}

pub fn project(
    m: &ModelArgs,
    a: &AccelArgs,
    dims: &str,
    reference: Option<&Path>,
    efficiency: Option<f64>,
    target_bsp: Option<f64>,
    r: &ReportArgs,
) -> Result<()> {
    let spec = load_stencil(&m.stencil)?;
    let target = load_device(&m.device)?;
    let reference: ReferencePoint = match reference {
        Some(p) => read_json(p)?,
        None => a10_reference(spec.kind(), spec.rad()).ok_or_else(|| {
            CliError::Usage(format!(
                "no built-in reference for {} rad {}",
                spec.kind(),
                spec.rad()
            ))
        })?,
    };
    reference.validate()?;
    let mut assume = ProjectionAssumptions::defaults(spec.is_3d());
    if let Some(e) = efficiency {
        assume.efficiency = e;
    }
    if let Some(f) = a.fmax_mhz {
        assume.f_max = f * 1e6;
    }
    if let Some(b) = target_bsp {
        assume.target_bsp = b;
    }
    let cfg = accel_config(a, assume.f_max / 1e6);
    let rep = projection::project(
        &spec,
        &target,
        &cfg,
        parse_dims(dims)?,
        m.iter,
        &reference,
        &assume,
    )?;
    if !rep.bram.is_feasible() {
        return Err(Error::InfeasibleProjection(format!(
            "block RAM bits {:.0}%, port-bound blocks {:.0}%",
            rep.bram.bits, rep.bram.blocks_ports
        ))
        .into());
    }
    emit(
        &[ProjectionRow::new(&target.name, &rep)],
        &r.format,
        r.out.as_deref(),
    )
}

#[derive(Serialize)]
struct PipelineRow {
    cycles_single_work_item: f64,
    cycles_ndrange: f64,
    seconds_single_work_item: f64,
    seconds_ndrange: f64,
    ii_lower_bound: f64,
    cycles_parallel: f64,
    seconds_parallel: f64,
}

pub fn pipeline(a: &PipelineArgs) -> Result<()> {
    let f = a.fmax_mhz * 1e6;
    let swi = cycles_swi(a.p, a.n_d, a.l)?;
    let ndr = cycles_ndrange(a.p, a.n_b, a.l)?;
    let ii = match a.bw {
        Some(bw) => ii_lower_bound(a.n_d, a.n_m, bw, Some(a.n_p))?,
        None => a.n_d + 1.0,
    };
    let par = cycles_parallel(a.p_prime.unwrap_or(a.p), ii, a.l, a.n_p)?;
    let row = PipelineRow {
        cycles_single_work_item: swi,
        cycles_ndrange: ndr,
        seconds_single_work_item: seconds(swi, f)?,
        seconds_ndrange: seconds(ndr, f)?,
        ii_lower_bound: ii,
        cycles_parallel: par,
        seconds_parallel: seconds(par, f)?,
    };
    emit(&[row], &a.report.format, a.report.out.as_deref())
}
