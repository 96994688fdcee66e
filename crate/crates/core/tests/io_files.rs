use stencil_dse::io::{
    counter_rows, read_grid, read_json, write_grid, write_json, write_rows, Format, PredictRow,
};
use stencil_dse::perf::predict;
use stencil_dse::sim::simulate;
use stencil_dse::{AccelConfig, DeviceSpec, Dims, Grid, StencilKind, StencilSpec};

#[test]
fn grid_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.bin");
    let g = Grid::from_fn(Dims::d3(5, 3, 2), |x, y, z| {
        x as f32 - 0.25 * y as f32 + 10.0 * z as f32
    });
    write_grid(&path, &g).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(&bytes[..4], b"SGR\x03");
    assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 5);
    assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 2);
    assert_eq!(f32::from_le_bytes(bytes[20..24].try_into().unwrap()), 1.0);
    assert_eq!(read_grid(&path).unwrap(), g);
    assert!(read_grid(&dir.path().join("missing.bin")).is_err());
}

#[test]
fn config_files() {
    let dir = tempfile::tempdir().unwrap();
    let spec = StencilSpec::<f32>::builtin(StencilKind::Diffusion3D, 3).unwrap();
    let sp = dir.path().join("s.json");
    write_json(&sp, &spec).unwrap();
    assert_eq!(read_json::<StencilSpec<f32>>(&sp).unwrap(), spec);
    let dp = dir.path().join("d.json");
    for dev in DeviceSpec::builtins() {
        write_json(&dp, &dev).unwrap();
        assert_eq!(read_json::<DeviceSpec>(&dp).unwrap(), dev);
    }
}

#[test]
fn reports_are_deterministic() {
    let spec = StencilSpec::<f32>::builtin(StencilKind::Diffusion2D, 1).unwrap();
    let cfg = AccelConfig::d2(4096, 36, 8, 337.78e6);
    let dims = Dims::d2(16096, 16096);
    let render = || {
        let p = predict(&DeviceSpec::arria_10(), &spec, &cfg, dims, 1000, 1.0).unwrap();
        let row = PredictRow::new(spec.kind(), 1, "arria_10", &cfg, dims, &p);
        let mut out = Vec::new();
        write_rows(&[row], Format::Csv, &mut out).unwrap();
        String::from_utf8(out).unwrap()
    };
    let a = render();
    assert_eq!(a, render());
    assert!(a.contains("Estimated Perf. (GB/s)"));
    assert!(a.contains(",766.9"), "{a}");
}

#[test]
fn counter_report() {
    let spec = StencilSpec::<f32>::builtin(StencilKind::Diffusion2D, 1).unwrap();
    let cfg = AccelConfig::d2(16, 2, 1, 1.0);
    let dims = Dims::d2(32, 32);
    let g = Grid::filled(dims, 0.5f32);
    let r = simulate(&spec, &cfg, &g, None, 4).unwrap();
    let geom = stencil_dse::geometry::traffic(&spec, &cfg, dims).unwrap();
    let rows = counter_rows(&r.per_pass, &geom);
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.matches));
    let mut out = Vec::new();
    write_rows(&rows, Format::Json, &mut out).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
}
