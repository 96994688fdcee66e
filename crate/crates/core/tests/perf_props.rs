use proptest::prelude::*;
use stencil_dse::perf::{predict, predict_for, th_max, th_mem, PredictOptions};
use stencil_dse::{AccelConfig, DeviceSpec, Dims, MemoryKind, StencilKind, StencilSpec};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn device() -> impl Strategy<Value = DeviceSpec> {
    (
        1usize..=8,
        prop_oneof![Just(64usize), Just(128), Just(256)],
        800e6..3200e6,
        any::<bool>(),
    )
        .prop_map(|(banks, bus, f_mem, hbm)| DeviceSpec {
            name: "synthetic".into(),
            num_banks: banks,
            size_bus: bus,
            f_mem,
            memory: if hbm {
                MemoryKind::Hbm
            } else {
                MemoryKind::Ddr
            },
            ..DeviceSpec::arria_10()
        })
}

#[test]
fn peak_bandwidth_examples() {
    assert!((th_max(&DeviceSpec::arria_10()) - 34.128).abs() < 1e-9);
    assert!((th_max(&DeviceSpec::stratix_v()) - 25.6).abs() < 1e-9);
}

#[test]
fn arria10_diffusion_estimate() {
    let spec = StencilSpec::<f32>::builtin(StencilKind::Diffusion2D, 1).unwrap();
    let cfg = AccelConfig::d2(4096, 36, 8, 337.78e6);
    let p = predict(
        &DeviceSpec::arria_10(),
        &spec,
        &cfg,
        Dims::d2(16096, 16096),
        1000,
        1.0,
    )
    .unwrap();
    // independent evaluation of the run-time formula from the exact counts
    let bw = 337.78e6 * 8.0 * 2.0 * 4.0 / 1e9;
    let passes = 1000f64 / 36.0;
    let rt = passes.ceil() * (262_557_952.0 + 259_081_216.0) * 4.0 / (1e9 * bw);
    let thr = 2.0 * 16096f64 * 16096.0 * 4.0 * 1000.0 / (1e9 * rt);
    assert!(rel(p.throughput, thr) < 1e-12);
    assert!(rel(p.throughput, 766.918) < 1e-3);
    assert!((p.th_mem - 21.618).abs() < 1e-3);
}

#[test]
fn mx2100_projection_numbers() {
    let cfg = AccelConfig::d2(16320, 8, 96, 450e6);
    let mx = DeviceSpec::stratix_10_mx();
    assert!((th_mem(&mx, StencilKind::Diffusion2D, &cfg, 1.0) - 345.6).abs() < 1e-9);
    let opts = PredictOptions {
        efficiency: 0.85,
        uncapped: false,
    };
    let p = predict_for(
        &mx,
        StencilKind::Diffusion2D,
        1,
        &cfg,
        Dims::d2(32608, 32608),
        5000,
        opts,
    )
    .unwrap();
    assert!(rel(p.throughput, 2349.504) < 5e-3);
    assert!(rel(p.gflops, 2643.192) < 5e-3);
    assert!(rel(p.gcells, 293.688) < 5e-3);
}

proptest! {
    #[test]
    fn bandwidth_never_exceeds_peak(
        dev in device(),
        pv_log in 0u32..8,
        f in 100e6..600e6,
        eff in 0.01f64..=1.0,
        kind in prop_oneof![Just(StencilKind::Diffusion2D), Just(StencilKind::Hotspot2D)],
    ) {
        let pv = 1usize << pv_log;
        let cfg = AccelConfig::d2(4096, 4, pv, f);
        let t = th_mem(&dev, kind, &cfg, eff);
        prop_assert!(t <= th_max(&dev) + 1e-12);
        let p = predict_for(&dev, kind, 1, &cfg, Dims::d2(8000, 300), 10, PredictOptions { efficiency: eff, uncapped: false }).unwrap();
        prop_assert!(p.th_mem <= p.th_max + 1e-12);
        prop_assert!(p.utilized_bw <= 1.0 + 1e-12);
        prop_assert!(p.redundancy >= 0.0);
    }

    #[test]
    fn metric_ratios(
        kind in prop_oneof![Just(StencilKind::Diffusion2D), Just(StencilKind::Hotspot2D)],
        rad in 1usize..=4,
        pt in 1usize..40,
        pv_log in 0u32..5,
        dim in 1000usize..20000,
        iter in 1usize..3000,
    ) {
        let rad = if kind.is_hotspot() { 1 } else { rad };
        let spec = StencilSpec::<f32>::builtin(kind, rad).unwrap();
        let cfg = AccelConfig::d2(4096, pt, 1 << pv_log, 300e6);
        let p = predict(&DeviceSpec::arria_10(), &spec, &cfg, Dims::d2(dim, dim), iter, 0.9).unwrap();
        prop_assert!(rel(p.gflops / p.gcells, spec.flop_per_cell() as f64) < 1e-12);
        prop_assert!(rel(p.throughput / p.gcells, spec.bytes_per_cell() as f64) < 1e-12);
        prop_assert_eq!(p.passes, iter.div_ceil(pt));
    }

    #[test]
    fn redundancy_grows_with_par_time(
        kind in prop_oneof![Just(StencilKind::Diffusion2D), Just(StencilKind::Hotspot2D)],
        rad in 1usize..=4,
        pt in 1usize..60,
        more in 1usize..20,
        blocks in 2usize..8,
        extra in 0usize..4000,
    ) {
        let rad = if kind.is_hotspot() { 1 } else { rad };
        let a = AccelConfig::d2(4096, pt, 4, 300e6);
        let b = AccelConfig { par_time: pt + more, ..a };
        prop_assume!(b.validate_for(kind, rad).is_ok());
        let dims = Dims::d2(blocks * 4096 + extra, 1000);
        let dev = DeviceSpec::arria_10();
        let pa = predict_for(&dev, kind, rad, &a, dims, 100, PredictOptions::default()).unwrap();
        let pb = predict_for(&dev, kind, rad, &b, dims, 100, PredictOptions::default()).unwrap();
        prop_assert!(pb.redundancy > pa.redundancy);
    }

    #[test]
    fn halving_par_time_only_moves_the_halo_term(pt_half in 1usize..60, k in 1usize..10, dim in 5000usize..20000) {
        let pt = 2 * pt_half;
        let iter = k * pt;
        let dev = DeviceSpec::arria_10();
        let full = AccelConfig::d2(4096, pt, 8, 300e6);
        let half = AccelConfig { par_time: pt_half, ..full };
        let dims = Dims::d2(dim, dim);
        let opts = PredictOptions::default();
        let pf = predict_for(&dev, StencilKind::Diffusion2D, 1, &full, dims, iter, opts).unwrap();
        let ph = predict_for(&dev, StencilKind::Diffusion2D, 1, &half, dims, iter, opts).unwrap();
        prop_assert_eq!(ph.passes, 2 * pf.passes);
        let traffic = |p: &stencil_dse::PerfEstimate| (p.geometry.t_read + p.geometry.t_write) as f64;
        prop_assert!(rel(ph.run_time / pf.run_time, 2.0 * traffic(&ph) / traffic(&pf)) < 1e-12);
        prop_assert_eq!(ph.geometry.t_write, pf.geometry.t_write);
        prop_assert!(ph.geometry.t_read <= pf.geometry.t_read);
    }
}
