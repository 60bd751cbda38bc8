//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints a PASS/FAIL line; exits non-zero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use oscillaton::analysis::{
    error_factor, fit_gaussian, full_pipeline, null_noise_for_peak_sigma, ratio_bound,
    ExperimentParams, GaussianModel,
};
use oscillaton::fock::{
    bogoliubov_transform, build_annihilation, build_photon_ops, commutator, GaussHermite,
    InteriorProjector, MixingParams, ModeSpace,
};
use oscillaton::scattering::{
    angular_frequency_from_wavelength, decompose_channels, inelastic_frequency, Kinematics,
    SPEED_OF_LIGHT,
};
use oscillaton::trace::{generate_trace, read_trace, write_trace, Polarity, ScanTrace, TraceSpec};
use oscillaton::Error;
use oscillaton_cli::{dispatch, RunReport};

const N_SAMPLES: usize = 501;
const SPAN: f64 = 5.0;
const WIDTH: f64 = 0.6;
const PEAK_780: f64 = 1.18;
const NOISE_780: f64 = 0.001;
const SIGMA_1560: f64 = 0.0012;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<f64, String> {
    let t = start.elapsed();
    check(t < limit, || {
        format!(
            "runtime {:.2} s exceeds {:.0} s",
            t.as_secs_f64(),
            limit.as_secs_f64()
        )
    })?;
    Ok(t.as_secs_f64())
}

fn table_bound() -> RunReport {
    let (code, report) = dispatch(["bound"]);
    assert_eq!(code, 0, "{:?}", report.message);
    report
}

fn bound_reproduction() -> Outcome {
    let start = Instant::now();
    let report = table_bound();
    let f_e = report.value("f_e").unwrap();
    let r = report.value("r_bound").unwrap();
    let g = report.value("gamma_bound").unwrap();
    let t = within_time(start, Duration::from_secs(1))?;
    check((f_e - 1.17).abs() <= 0.005, || format!("f_e = {f_e}"))?;
    check((r / 1.48e-7 - 1.0).abs() <= 0.01, || {
        format!("r_bound = {r:e}")
    })?;
    check((1.90e-4..=1.95e-4).contains(&g), || {
        format!("gamma_bound = {g:e}")
    })?;
    Ok(format!(
        "f_e={f_e:.4} r_bound={r:.4e} gamma_bound={g:.4e} rad ({t:.3} s)"
    ))
}

fn synthetic_pair(seed: u64, noise_1560: f64) -> (ScanTrace, ScanTrace) {
    let emission = GaussianModel::new(PEAK_780, 0.0, WIDTH, 0.0).unwrap();
    let mut spec = TraceSpec::new(emission, NOISE_780, N_SAMPLES, seed);
    spec.span = SPAN;
    let t780 = generate_trace(&spec).unwrap();
    let null = GaussianModel::new(0.0, 0.0, WIDTH, 0.0).unwrap();
    let mut spec = TraceSpec::new(null, noise_1560, N_SAMPLES, seed + (1 << 32));
    spec.span = SPAN;
    (t780, generate_trace(&spec).unwrap())
}

fn end_to_end_pipeline() -> Outcome {
    let reference = table_bound().value("gamma_bound").unwrap();
    let start = Instant::now();
    let noise =
        null_noise_for_peak_sigma(SIGMA_1560, N_SAMPLES, SPAN, WIDTH, Some(0.0), 200, 1 << 40)
            .map_err(|e| e.to_string())?;
    let params = ExperimentParams::table_one();
    let mut gammas = Vec::with_capacity(100);
    for seed in 0..100u64 {
        let (a, b) = synthetic_pair(seed, noise);
        let report = full_pipeline(&a, &b, &params).map_err(|e| format!("seed {seed}: {e}"))?;
        gammas.push(report.bound.gamma_bound);
    }
    let t = within_time(start, Duration::from_secs(30))?;
    gammas.sort_by(f64::total_cmp);
    let (lo, hi) = (gammas[0], gammas[99]);
    check(lo >= 1.8e-4 && hi <= 2.1e-4, || {
        format!("gamma range [{lo:e}, {hi:e}]")
    })?;
    let median = 0.5 * (gammas[49] + gammas[50]);
    let dev = (median / reference - 1.0).abs();
    check(dev <= 0.03, || {
        format!("median {median:e} deviates {:.2}%", dev * 100.0)
    })?;
    Ok(format!(
        "100 seeds in [{lo:.4e}, {hi:.4e}], median {median:.4e} ({:+.2}% vs bound) ({t:.2} s)",
        (median / reference - 1.0) * 100.0
    ))
}

fn commutation_preservation() -> Outcome {
    let start = Instant::now();
    let space = ModeSpace::new(6, 4).unwrap();
    let interior = InteriorProjector::new(&space, 1).unwrap();
    let mut worst = 0.0f64;
    for k in 0..20 {
        let gamma = -0.5 + k as f64 / 19.0;
        let params = MixingParams::new(gamma).unwrap();
        for n in 0..space.level_cutoff() {
            let c = build_annihilation(&space, n).unwrap();
            let (m, md) = bogoliubov_transform(&c, &c.adjoint(), &params).unwrap();
            worst = worst.max(
                commutator(&m, &md)
                    .unwrap()
                    .interior_identity_deviation(&interior),
            );
        }
    }
    let t = within_time(start, Duration::from_secs(10))?;
    check(worst < 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!(
        "20 angles x {} levels, max deviation {worst:.2e} ({t:.3} s)",
        space.level_cutoff()
    ))
}

fn single_oscillaton_equivalence() -> Outcome {
    let space = ModeSpace::new(6, 4).unwrap();
    let (a, _) = build_photon_ops(&space).unwrap();
    let sector = space.single_sector();
    let mut worst = 0.0f64;
    for (n, &col) in sector.iter().enumerate() {
        for (m, &row) in sector.iter().enumerate() {
            let expected = if m + 1 == n { (n as f64).sqrt() } else { 0.0 };
            worst = worst.max((a.get(row, col) - expected).norm());
        }
    }
    check(worst == 0.0, || format!("max deviation {worst:e}"))?;
    Ok(format!(
        "{}x{} sector block equals sqrt(n) ladder exactly",
        sector.len(),
        sector.len()
    ))
}

fn quadratic_channel_scaling() -> Outcome {
    let space = ModeSpace::new(6, 4).unwrap();
    let gammas = [1e-3, 3e-3, 1e-2];
    let mut scaled = Vec::new();
    let mut ground = Vec::new();
    for &g in &gammas {
        let dec = decompose_channels(&space, &MixingParams::new(g).unwrap(), 0).unwrap();
        scaled.push(
            dec.channel_ratios()
                .iter()
                .map(|(_, r)| r / (g * g))
                .collect::<Vec<_>>(),
        );
        ground.push(dec.ratio_for(dec.lowest_pair_channel().unwrap()) / (g * g));
    }
    let mut spread = 0.0f64;
    for k in 0..scaled[0].len() {
        let lo = scaled.iter().map(|s| s[k]).fold(f64::INFINITY, f64::min);
        let hi = scaled.iter().map(|s| s[k]).fold(0.0, f64::max);
        spread = spread.max((hi - lo) / lo);
    }
    check(spread < 0.01, || {
        format!("ratio/gamma^2 spread {:.3}%", spread * 100.0)
    })?;
    for &c in &ground {
        check((c - 2.0).abs() <= 0.02, || {
            format!("ground channel ratio/gamma^2 = {c}")
        })?;
    }
    let (code, report) = dispatch(["predict", "--gamma", "0.001"]);
    check(code == 0, || {
        format!("predict failed: {:?}", report.message)
    })?;
    let coeff = report.value("ratio_over_gamma2").unwrap();
    let cli_ground = report
        .value("channel_ratio_over_gamma2[2,1,0,0,0,0,0]")
        .unwrap();
    check((coeff - 4.0).abs() < 1e-9, || {
        format!("predict R/gamma^2 = {coeff}")
    })?;
    check((cli_ground - 2.0).abs() <= 0.02, || {
        format!("predict ground = {cli_ground}")
    })?;
    Ok(format!(
        "{} channels, spread {:.2e}, ground {:.6}; predict reports R/gamma^2={coeff} and ground {cli_ground:.6}",
        scaled[0].len(),
        spread,
        ground[0]
    ))
}

fn kinematics() -> Outcome {
    let omega = angular_frequency_from_wavelength(780e-9);
    let w0 = inelastic_frequency(&Kinematics::new(omega, 0.0).unwrap()).unwrap();
    check(w0 == omega / 2.0, || {
        format!("m=0 gives {w0:e}, expected {:e}", omega / 2.0)
    })?;

    let threshold_mass = Kinematics::new(omega, 0.0).unwrap().photon_energy()
        / (2.0 * SPEED_OF_LIGHT * SPEED_OF_LIGHT);
    for m in [threshold_mass, 2.0 * threshold_mass, 1e-30] {
        let res = inelastic_frequency(&Kinematics::new(omega, m).unwrap());
        check(matches!(res, Err(Error::BelowThreshold { .. })), || {
            format!("mass {m:e} gave {res:?}")
        })?;
    }
    let (code, _) = dispatch([
        "predict", "--gamma", "0.0001", "--mass", "1e-30", "--omega", "2.4e15",
    ]);
    check(code == 1, || format!("CLI threshold path exit {code}"))?;

    let freqs: Vec<f64> = (0..10)
        .map(|j| {
            let m = 0.99 * threshold_mass * j as f64 / 9.0;
            inelastic_frequency(&Kinematics::new(omega, m).unwrap()).unwrap()
        })
        .collect();
    check(freqs.windows(2).all(|w| w[1] < w[0]), || {
        format!("not monotone: {freqs:?}")
    })?;
    Ok("omega'(0)=omega/2 exactly, threshold errors raised, 10-point grid monotone".to_string())
}

fn fitter_soundness() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for truth in [
        GaussianModel::new(PEAK_780, 0.0, WIDTH, 0.0).unwrap(),
        GaussianModel::new(-0.35, 0.8, 0.45, 0.12).unwrap(),
        GaussianModel::new(2.5, -1.1, 0.3, -0.4).unwrap(),
    ] {
        let mut spec = TraceSpec::new(truth, 0.0, N_SAMPLES, 0);
        if truth.peak < 0.0 {
            spec.model.peak = -truth.peak;
            spec.polarity = Polarity::Absorption;
        }
        let trace = generate_trace(&spec).unwrap();
        let fit = fit_gaussian(&trace, &GaussianModel::initial_guess(&trace), None)
            .map_err(|e| e.to_string())?;
        for (got, want) in [
            (fit.model.peak, truth.peak),
            (fit.model.center, truth.center),
            (fit.model.width, truth.width),
            (fit.model.baseline, truth.baseline),
        ] {
            let err = if want == 0.0 {
                got.abs()
            } else {
                (got / want - 1.0).abs()
            };
            worst = worst.max(err);
        }
    }
    check(worst < 1e-9, || {
        format!("noiseless recovery error {worst:e}")
    })?;

    let null = GaussianModel::new(0.0, 0.0, WIDTH, 0.0).unwrap();
    let mut covered = 0;
    for seed in 0..1000u64 {
        let trace = generate_trace(&TraceSpec::new(null, SIGMA_1560, N_SAMPLES, seed)).unwrap();
        let fit = fit_gaussian(&trace, &GaussianModel::initial_guess(&trace), Some(WIDTH))
            .map_err(|e| format!("seed {seed}: {e}"))?;
        if fit.model.peak.abs() < 3.0 * fit.sigma.peak {
            covered += 1;
        }
    }
    let t = within_time(start, Duration::from_secs(60))?;
    check(covered >= 980, || format!("coverage {covered}/1000"))?;
    Ok(format!(
        "noiseless error {worst:.1e}, coverage {covered}/1000 ({t:.2} s)"
    ))
}

fn eigenfunction_orthonormality() -> Outcome {
    let gram = GaussHermite::new(40).unwrap().gram_matrix(10).unwrap();
    let mut worst = 0.0f64;
    for i in 0..=10 {
        for j in 0..=10 {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).abs());
        }
    }
    check(gram.nrows() == 11, || {
        format!("gram is {}x{}", gram.nrows(), gram.ncols())
    })?;
    check(worst < 1e-10, || format!("max deviation {worst:e}"))?;
    Ok(format!("11x11 gram, max deviation {worst:.2e}"))
}

fn serialization() -> Outcome {
    for seed in 0..100u64 {
        let model = GaussianModel::new(0.5 + 0.01 * seed as f64, 0.1, WIDTH, 0.02).unwrap();
        let mut spec = TraceSpec::new(model, 0.01, 257, seed);
        if seed % 2 == 1 {
            spec.polarity = Polarity::Absorption;
        }
        let trace = generate_trace(&spec)
            .unwrap()
            .with_meta(format!("seed {seed}"))
            .unwrap();
        let mut buf = Vec::new();
        write_trace(&trace, &mut buf).unwrap();
        let back = read_trace(buf.as_slice()).map_err(|e| e.to_string())?;
        let same = back.meta() == trace.meta()
            && back.len() == trace.len()
            && back.samples().iter().zip(trace.samples()).all(|(a, b)| {
                a.detuning.to_bits() == b.detuning.to_bits()
                    && a.voltage.to_bits() == b.voltage.to_bits()
            });
        check(same, || format!("trace {seed} changed in round trip"))?;
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let params_path = dir.path().join("params.json");
    let report_path = dir.path().join("report.json");
    let params = ExperimentParams::table_one();
    params.save(&params_path).map_err(|e| e.to_string())?;
    let reloaded = ExperimentParams::load(&params_path).map_err(|e| e.to_string())?;
    check(reloaded == params, || {
        "parameter file changed in round trip".into()
    })?;

    let status = Command::new(env!("CARGO_BIN_EXE_oscillaton"))
        .arg("bound")
        .arg("--params")
        .arg(&params_path)
        .arg("--report")
        .arg(&report_path)
        .output()
        .map_err(|e| e.to_string())?;
    check(status.status.success(), || {
        String::from_utf8_lossy(&status.stderr).into_owned()
    })?;
    let text = std::fs::read_to_string(&report_path).map_err(|e| e.to_string())?;
    let from_file = RunReport::from_json(&text).map_err(|e| e.to_string())?;

    let reference = table_bound();
    let direct = ratio_bound(&params, error_factor(&params)).unwrap();
    for key in ["f_e", "r_bound", "gamma_bound"] {
        let a = from_file.value(key).unwrap();
        let b = reference.value(key).unwrap();
        check(a.to_bits() == b.to_bits(), || {
            format!("{key}: {a:e} vs {b:e}")
        })?;
    }
    check(
        direct.gamma_bound.to_bits() == from_file.value("gamma_bound").unwrap().to_bits(),
        || "library and CLI bound differ".into(),
    )?;
    Ok(
        "100 traces bit-identical; params JSON through the binary reproduces the bound bit for bit"
            .into(),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("bound reproduction", bound_reproduction),
        ("end-to-end pipeline", end_to_end_pipeline),
        ("commutation preservation", commutation_preservation),
        (
            "single-oscillaton equivalence",
            single_oscillaton_equivalence,
        ),
        ("quadratic channel scaling", quadratic_channel_scaling),
        ("kinematics", kinematics),
        ("fitter soundness", fitter_soundness),
        ("eigenfunction orthonormality", eigenfunction_orthonormality),
        ("serialization", serialization),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|payload| {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(msg)
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
