use std::path::Path;
use std::process::{Command, Output};

use stencil_dse::io::{read_grid, write_json};
use stencil_dse::DeviceSpec;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stencil-dse"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const PREDICT_A10: [&str; 16] = [
    "predict",
    "--stencil",
    "diffusion2d",
    "--device",
    "arria10",
    "--bsize-x",
    "4096",
    "--par-time",
    "36",
    "--par-vec",
    "8",
    "--fmax-mhz",
    "337.78",
    "--dims",
    "16096x16096",
    "--iter=1000",
];

#[test]
fn validate_small_diffusion() {
    let o = run(&[
        "validate",
        "--stencil",
        "diffusion2d",
        "--rad",
        "1",
        "--dims",
        "32x32",
        "--bsize-x",
        "16",
        "--par-time",
        "2",
        "--iter",
        "4",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.ends_with(",true")), "{text}");
}

#[test]
fn predict_reports_the_arria10_estimate() {
    let o = run(&PREDICT_A10);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with(
        "Benchmark,Device,rad,bsize,par_time,par_vec,Input Size,Estimated Perf. (GB/s)"
    ));
    assert!(text.contains(",766.9"), "{text}");
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let render = |name: &str| {
        let path = dir.path().join(name);
        let o = run(&[
            "tune",
            "--stencil",
            "diffusion3d",
            "--device",
            "a10",
            "--fmax-mhz",
            "285.71",
            "--format",
            "json",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(path).unwrap()
    };
    let a = render("a.json");
    assert!(!a.is_empty());
    assert_eq!(a, render("b.json"));
    assert_eq!(stdout(&run(&PREDICT_A10)), stdout(&run(&PREDICT_A10)));
}

#[test]
fn zero_dsp_device_yields_an_empty_result() {
    let dir = tempfile::tempdir().unwrap();
    let dev = dir.path().join("nodsp.json");
    write_json(
        &dev,
        &DeviceSpec {
            dsp_total: 0,
            ..DeviceSpec::arria_10()
        },
    )
    .unwrap();
    let o = run(&[
        "tune",
        "--stencil",
        "hotspot2d",
        "--device",
        dev.to_str().unwrap(),
        "--fmax-mhz",
        "300",
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no feasible design point"));
}

#[test]
fn oracle_and_simulate_agree_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let common = ["--stencil", "hotspot3d", "--dims", "20x18x6", "--iter", "5"];
    let o = run(&[&["oracle"][..], &common, &["--out", &p("want.bin")]].concat());
    assert_eq!(o.status.code(), Some(0));
    let accel = [
        "--bsize-x",
        "12",
        "--bsize-y",
        "10",
        "--par-time",
        "2",
        "--par-vec",
        "2",
    ];
    let o = run(&[
        &["simulate"][..],
        &common,
        &accel,
        &[
            "--out",
            &p("got.bin"),
            "--oracle",
            &p("want.bin"),
            "--report",
            &p("c.json"),
            "--format",
            "json",
        ],
    ]
    .concat());
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(
        read_grid(Path::new(&p("got.bin"))).unwrap(),
        read_grid(Path::new(&p("want.bin"))).unwrap()
    );
    let counters: serde_json::Value =
        serde_json::from_slice(&std::fs::read(p("c.json")).unwrap()).unwrap();
    assert_eq!(counters.as_array().unwrap().len(), 3);

    // a reference from a different iteration count must be rejected
    let o = run(&[
        &["oracle"][..],
        &["--stencil", "hotspot3d", "--dims", "20x18x6", "--iter", "4"],
        &["--out", &p("other.bin")],
    ]
    .concat());
    assert_eq!(o.status.code(), Some(0));
    let o = run(&[
        &["simulate"][..],
        &common,
        &accel,
        &["--oracle", &p("other.bin"), "--report", &p("c2.csv")],
    ]
    .concat());
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn failures_map_to_distinct_codes() {
    // unknown flag
    assert_eq!(run(&["predict", "--bogus"]).status.code(), Some(2));
    // malformed dimensions
    let mut bad_dims = PREDICT_A10.to_vec();
    bad_dims[14] = "16096by16096";
    assert_eq!(run(&bad_dims).status.code(), Some(2));
    // block too small for the halo
    let mut small = PREDICT_A10.to_vec();
    small[6] = "64";
    assert_eq!(run(&small).status.code(), Some(3));
    // unknown device
    let mut dev = PREDICT_A10.to_vec();
    dev[4] = "virtex";
    assert_eq!(run(&dev).status.code(), Some(3));
    // more DSPs than the target has
    let o = run(&[
        "project",
        "--stencil",
        "diffusion2d",
        "--device",
        "gx",
        "--bsize-x",
        "16384",
        "--par-time",
        "16",
        "--par-vec",
        "128",
        "--dims",
        "32000x32000",
    ]);
    assert_eq!(o.status.code(), Some(4));
    // missing input grid
    let o = run(&[
        "oracle",
        "--stencil",
        "diffusion2d",
        "--input",
        "/nonexistent/g.bin",
        "--iter",
        "1",
        "--out",
        "/tmp/x.bin",
    ]);
    assert_eq!(o.status.code(), Some(6));
}

#[test]
fn pipeline_command() {
    let o = run(&[
        "pipeline",
        "--p",
        "100",
        "--l",
        "1000",
        "--n-d",
        "2",
        "--fmax-mhz",
        "250",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["cycles_single_work_item"], 100.0 + 3.0 * 999.0);
    assert_eq!(v[0]["ii_lower_bound"], 3.0);
    let o = run(&[
        "pipeline",
        "--p",
        "10",
        "--l",
        "2",
        "--n-p",
        "4",
        "--fmax-mhz",
        "250",
    ]);
    assert_eq!(o.status.code(), Some(3));
}
