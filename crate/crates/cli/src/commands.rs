use std::fmt;
use std::path::Path;

use oscillaton::analysis::{
    error_factor, fit_gaussian, full_pipeline, ratio_bound, BoundResult, ExperimentParams,
    FitResult, GaussianModel,
};
use oscillaton::fock::{
    bogoliubov_transform, build_annihilation, build_photon_ops, commutator, GaussHermite,
    InteriorProjector, MixingParams, ModeSpace,
};
use oscillaton::scattering::{
    angular_frequency_from_wavelength, decompose_channels, inelastic_frequency, predicted_ratio,
    Kinematics,
};
use oscillaton::trace::{generate_trace, load_trace, save_trace, Polarity, TraceSpec};
use serde_json::json;

use crate::report::RunReport;
use crate::{BoundArgs, Command, FitArgs, GenArgs, PipelineArgs, PredictArgs, VerifyArgs};

const COMMUTATOR_TOLERANCE: f64 = 1e-12;
const GRAM_TOLERANCE: f64 = 1e-10;
const GRAM_MAX_LEVEL: usize = 10;
const GRAM_NODES: usize = 40;
const REFERENCE_WAVELENGTH: f64 = 780e-9;

enum Failure {
    Domain(oscillaton::Error),
    Check(String),
}

impl From<oscillaton::Error> for Failure {
    fn from(e: oscillaton::Error) -> Self {
        Failure::Domain(e)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Domain(e) => e.fmt(f),
            Failure::Check(msg) => f.write_str(msg),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

pub(crate) fn run(command: &Command) -> RunReport {
    let (mut report, outcome) = match command {
        Command::Verify(a) => with_report("verify", verify_inputs(a), |r| verify(a, r)),
        Command::Predict(a) => {
            let omega = a
                .omega
                .unwrap_or_else(|| angular_frequency_from_wavelength(REFERENCE_WAVELENGTH));
            let inputs = json!({
                "gamma": a.gamma, "mass": a.mass, "omega": omega,
                "levels": a.levels, "osc": a.osc, "initial_level": a.initial_level,
            });
            with_report("predict", inputs, |r| predict(a, omega, r))
        }
        Command::Fit(a) => {
            let inputs = json!({ "trace": a.trace, "fix_width": a.fix_width });
            with_report("fit", inputs, |r| fit(a, r))
        }
        Command::Bound(a) => with_report("bound", json!({}), |r| bound(a, r)),
        Command::Gen(a) => with_report("gen", gen_inputs(a), |r| gen(a, r)),
        Command::Pipeline(a) => with_report("pipeline", json!({}), |r| pipeline(a, r)),
    };
    if let Err(e) = outcome {
        report.fail(e.to_string());
    }
    report
}

fn with_report<F>(command: &str, inputs: serde_json::Value, body: F) -> (RunReport, Outcome)
where
    F: FnOnce(&mut RunReport) -> Outcome,
{
    let mut report = RunReport::new(command, inputs);
    let outcome = body(&mut report);
    (report, outcome)
}

fn verify_inputs(a: &VerifyArgs) -> serde_json::Value {
    json!({ "gamma_grid": a.gamma_grid, "levels": a.levels, "osc": a.osc })
}

fn gamma_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| -0.5 + k as f64 / (n - 1) as f64).collect(),
    }
}

fn verify(a: &VerifyArgs, report: &mut RunReport) -> Outcome {
    if a.gamma_grid == 0 {
        return Err(Failure::Check("gamma grid needs at least one point".into()));
    }
    let space = ModeSpace::new(a.levels, a.osc)?;
    let interior = InteriorProjector::new(&space, 1)?;

    let mut comm_dev = 0.0f64;
    for gamma in gamma_grid(a.gamma_grid) {
        let params = MixingParams::new(gamma)?;
        for n in 0..space.level_cutoff() {
            let c = build_annihilation(&space, n)?;
            let (mixed, mixed_dag) = bogoliubov_transform(&c, &c.adjoint(), &params)?;
            let comm = commutator(&mixed, &mixed_dag)?;
            comm_dev = comm_dev.max(comm.interior_identity_deviation(&interior));
        }
    }

    let (photon, _) = build_photon_ops(&space)?;
    let sector = space.single_sector();
    let mut ladder_dev = 0.0f64;
    for (n, &col) in sector.iter().enumerate() {
        for (m, &row) in sector.iter().enumerate() {
            let expected = if m + 1 == n { (n as f64).sqrt() } else { 0.0 };
            ladder_dev = ladder_dev.max((photon.get(row, col) - expected).norm());
        }
    }

    let gram = GaussHermite::new(GRAM_NODES)?.gram_matrix(GRAM_MAX_LEVEL)?;
    let mut gram_dev = 0.0f64;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            gram_dev = gram_dev.max((gram[(i, j)] - target).abs());
        }
    }

    report.push("dim", space.dim() as f64, "count");
    report.push(
        "interior_dim",
        interior.kept_indices().len() as f64,
        "count",
    );
    report.push("max_commutator_deviation", comm_dev, "1");
    report.push("max_single_sector_deviation", ladder_dev, "1");
    report.push("max_gram_deviation", gram_dev, "1");

    let mut failed = Vec::new();
    if comm_dev.is_nan() || comm_dev >= COMMUTATOR_TOLERANCE {
        failed.push(format!("commutator deviation {comm_dev:e}"));
    }
    if ladder_dev != 0.0 {
        failed.push(format!("single-sector deviation {ladder_dev:e}"));
    }
    if gram_dev.is_nan() || gram_dev >= GRAM_TOLERANCE {
        failed.push(format!("gram deviation {gram_dev:e}"));
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "invariant check failed: {}",
            failed.join(", ")
        )))
    }
}

fn occupation_key(occ: &[u32]) -> String {
    occ.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

fn predict(a: &PredictArgs, omega: f64, report: &mut RunReport) -> Outcome {
    let gamma = a.gamma;
    let prediction = predicted_ratio(gamma)?;
    report.push("ratio", prediction.ratio, "1");
    if gamma != 0.0 {
        report.push("ratio_over_gamma2", prediction.ratio / (gamma * gamma), "1");
    }

    let params = MixingParams::new(gamma)?;
    report.push("beta", params.beta(), "1");
    let space = ModeSpace::new(a.levels, a.osc)?;
    let dec = decompose_channels(&space, &params, a.initial_level)?;
    report.push("elastic_amplitude", dec.elastic_amplitude, "1");
    for (ch, ratio) in dec.channel_ratios() {
        let key = occupation_key(&ch.occupation);
        report.push(format!("channel_ratio[{key}]"), ratio, "1");
        if gamma != 0.0 {
            report.push(
                format!("channel_ratio_over_gamma2[{key}]"),
                ratio / (gamma * gamma),
                "1",
            );
        }
    }

    let kin = Kinematics::new(omega, a.mass)?;
    report.push("omega_in", omega, "rad/s");
    report.push("photon_energy", kin.photon_energy(), "J");
    report.push("pair_rest_energy", kin.pair_rest_energy(), "J");
    report.push("inelastic_frequency", inelastic_frequency(&kin)?, "rad/s");
    Ok(())
}

fn push_fit(report: &mut RunReport, prefix: &str, fit: &FitResult) {
    let m = &fit.model;
    let s = &fit.sigma;
    for (name, value, sigma, unit) in [
        ("peak", m.peak, s.peak, "V"),
        ("center", m.center, s.center, "GHz"),
        ("width", m.width, s.width, "GHz"),
        ("baseline", m.baseline, s.baseline, "V"),
    ] {
        report.push(format!("{prefix}{name}"), value, unit);
        report.push(format!("{prefix}sigma_{name}"), sigma, unit);
    }
    report.push(format!("{prefix}residual_rms"), fit.residual_rms, "V");
    report.push(
        format!("{prefix}iterations"),
        fit.iterations as f64,
        "count",
    );
}

fn fit(a: &FitArgs, report: &mut RunReport) -> Outcome {
    let trace = load_trace(&a.trace)?;
    report.inputs["n_samples"] = json!(trace.len());
    let result = fit_gaussian(&trace, &GaussianModel::initial_guess(&trace), a.fix_width)?;
    push_fit(report, "", &result);
    Ok(())
}

fn load_params(path: Option<&Path>) -> Result<ExperimentParams, Failure> {
    Ok(match path {
        Some(p) => ExperimentParams::load(p)?,
        None => ExperimentParams::table_one(),
    })
}

fn push_bound(report: &mut RunReport, params: &ExperimentParams, bound: &BoundResult) {
    report.push("f_e", bound.f_e, "1");
    report.push("r_bound", bound.r_bound, "1");
    report.push("gamma_bound", bound.gamma_bound, "rad");
    report.push(
        "confidence_multiplier",
        params.confidence_multiplier,
        "sigma",
    );
    report.inputs["confidence"] = json!(bound.confidence_label);
}

fn bound(a: &BoundArgs, report: &mut RunReport) -> Outcome {
    let mut params = load_params(a.params.as_deref())?;
    if let Some(v) = a.v780 {
        params.v_780.value = v;
    }
    if let Some(v) = a.v1560 {
        params.v_1560.value = v;
    }
    report.inputs = json!({
        "params_file": a.params,
        "v780": a.v780,
        "v1560": a.v1560,
        "params": params,
    });
    params.validate()?;
    let result = ratio_bound(&params, error_factor(&params))?;
    push_bound(report, &params, &result);
    Ok(())
}

fn gen_inputs(a: &GenArgs) -> serde_json::Value {
    json!({
        "peak": a.peak, "width": a.width, "noise": a.noise, "seed": a.seed,
        "out": a.out, "dip": a.dip, "center": a.center, "baseline": a.baseline,
        "samples": a.samples, "span": a.span, "label": a.label,
    })
}

fn gen(a: &GenArgs, report: &mut RunReport) -> Outcome {
    let model = GaussianModel::new(a.peak, a.center, a.width, a.baseline)?;
    let mut spec = TraceSpec::new(model, a.noise, a.samples, a.seed);
    spec.span = a.span;
    if a.dip {
        spec.polarity = Polarity::Absorption;
    }
    let mut trace = generate_trace(&spec)?;
    if let Some(label) = &a.label {
        trace = trace.with_meta(label.clone())?;
    }
    save_trace(&trace, &a.out)?;
    let (lo, hi) = trace
        .voltages()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    report.push("n_samples", trace.len() as f64, "count");
    report.push("span", trace.span(), "GHz");
    report.push("voltage_min", lo, "V");
    report.push("voltage_max", hi, "V");
    Ok(())
}

fn pipeline(a: &PipelineArgs, report: &mut RunReport) -> Outcome {
    let params = load_params(a.params.as_deref())?;
    report.inputs = json!({
        "trace780": a.trace780,
        "trace1560": a.trace1560,
        "params_file": a.params,
        "params": params,
    });
    let t780 = load_trace(&a.trace780)?;
    let t1560 = load_trace(&a.trace1560)?;
    let result = full_pipeline(&t780, &t1560, &params)?;
    push_fit(report, "fit_780.", &result.fit_780);
    push_fit(report, "fit_1560.", &result.fit_1560);
    report.push("v_780", result.params.v_780.value, "V");
    report.push("v_1560", result.params.v_1560.value, "V");
    push_bound(report, &result.params, &result.bound);
    Ok(())
}
