use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use dephase::criteria::{decide_with, CriterionReport, Verdict};
use dephase::evolution::{joint_state, propagators};
use dephase::fixtures;
use dephase::linalg::{partial_transpose, Subsystem};
use dephase::model::io::{load_model, model_to_json};
use dephase::model::{random_instance, validate, Dynamics, EnsembleSpec, Family, ValidatedModel};
use dephase::witnesses::{negativity, pt_spectrum, witness_scan, Witness};
use rayon::prelude::*;
use serde_json::json;

use crate::format::{list, matrix, sig6};

pub const EXIT_SEPARABLE: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_ENTANGLED: u8 = 3;

pub const SWEEP_HEADER: [&str; 6] = [
    "t",
    "max_qubit_like_norm",
    "max_cross_norm",
    "min_pt_eig",
    "negativity",
    "verdict",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

fn exit_for(verdict: Verdict) -> u8 {
    match verdict {
        Verdict::Separable => EXIT_SEPARABLE,
        Verdict::Entangled => EXIT_ENTANGLED,
    }
}

pub fn load(path: &Path) -> Result<ValidatedModel> {
    load_model(path).with_context(|| format!("cannot load model {}", path.display()))
}

/// Everything `check` reports about one instant.
struct Evaluation {
    report: CriterionReport,
    spectrum: Vec<f64>,
    witnesses: Vec<Witness>,
}

impl Evaluation {
    fn new(model: &ValidatedModel, t: f64, tol_comm: f64) -> Result<Self> {
        let props = propagators(model, t)?;
        let report = decide_with(model, &props, tol_comm)?;
        let spectrum = pt_spectrum(&joint_state(model, &props)?, Subsystem::System)?;
        let witnesses = witness_scan(model, &props, &report)?;
        Ok(Self {
            report,
            spectrum,
            witnesses,
        })
    }

    fn json(&self) -> serde_json::Value {
        json!({
            "report": self.report,
            "pt": {
                "min_eigenvalue": self.spectrum[0],
                "negativity": negativity(&self.spectrum),
                "spectrum": self.spectrum,
            },
            "minor_witnesses": self.witnesses,
        })
    }

    fn text(&self) -> String {
        let r = &self.report;
        let mut out = format!("t = {}\nverdict: {}\n", sig6(r.t), r.verdict);
        out += &format!(
            "qubit-like norms (reference level {}, threshold {}):\n",
            r.reference,
            sig6(r.qubit_like_threshold)
        );
        for rec in &r.qubit_like {
            let note = if rec.active { "" } else { "  (unpopulated)" };
            out += &format!("  j={}  {}{note}\n", rec.j, sig6(rec.norm));
        }
        if r.cross.is_empty() {
            out += "cross norms: none\n";
        } else {
            out += &format!("cross norms (threshold {}):\n", sig6(r.cross_threshold));
            for rec in &r.cross {
                let note = if rec.active { "" } else { "  (unpopulated)" };
                out += &format!("  j={} l={}  {}{note}\n", rec.j, rec.l, sig6(rec.norm));
            }
        }
        if let Some(m) = r.margin {
            out += &format!("margin: {}\n", sig6(m));
        }
        if !r.witnesses.is_empty() {
            out += &format!("violated: {}\n", r.witnesses.join(" "));
        }
        out += &format!(
            "partial transpose: min eigenvalue {}, negativity {}\n",
            sig6(self.spectrum[0]),
            sig6(negativity(&self.spectrum))
        );
        for w in &self.witnesses {
            out += &format!(
                "witness {:?} {:?}: closed form {}, determinant {}\n",
                w.class,
                w.indices,
                sig6(w.closed_form),
                sig6(w.determinant)
            );
        }
        out
    }
}

fn default_time(model: &ValidatedModel, t: Option<f64>) -> Result<f64> {
    match (t, model.dynamics()) {
        (Some(t), _) => Ok(t),
        (None, Dynamics::Propagators { instant, .. }) => Ok(*instant),
        (None, Dynamics::Hamiltonian { .. }) => {
            bail!("--t is required for hamiltonian-mode models")
        }
    }
}

pub fn check(
    model_path: &Path,
    t: Option<f64>,
    format: Format,
    tol_comm: f64,
    out: &mut dyn Write,
) -> Result<u8> {
    let model = load(model_path)?;
    let t = default_time(&model, t)?;
    let eval = Evaluation::new(&model, t, tol_comm)?;
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&eval.json())?)?,
        Format::Text => write!(out, "{}", eval.text())?,
    }
    Ok(exit_for(eval.report.verdict))
}

pub struct SweepRow {
    pub t: f64,
    pub max_qubit_like_norm: f64,
    pub max_cross_norm: f64,
    pub min_pt_eig: f64,
    pub negativity: f64,
    pub verdict: Verdict,
}

pub fn sweep_grid(t_start: f64, t_end: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        bail!("--steps must be at least 2, got {steps}");
    }
    if t_start.is_nan() || t_end.is_nan() || t_start >= t_end {
        bail!("--t-start must be below --t-end, got {t_start} and {t_end}");
    }
    let h = (t_end - t_start) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i == steps - 1 {
                t_end
            } else {
                t_start + i as f64 * h
            }
        })
        .collect())
}

pub fn sweep_rows(model: &ValidatedModel, grid: &[f64], tol_comm: f64) -> Result<Vec<SweepRow>> {
    grid.par_iter()
        .map(|&t| {
            let props = propagators(model, t)?;
            let report = decide_with(model, &props, tol_comm)?;
            let spectrum = pt_spectrum(&joint_state(model, &props)?, Subsystem::System)?;
            Ok(SweepRow {
                t,
                max_qubit_like_norm: report.max_qubit_like_norm(),
                max_cross_norm: report.max_cross_norm(),
                min_pt_eig: spectrum[0],
                negativity: negativity(&spectrum),
                verdict: report.verdict,
            })
        })
        .collect()
}

/// Shortest round-trip form, in exponent notation outside `[1e-4, 1e16)`.
pub fn csv_float(x: f64) -> String {
    if x != 0.0 && x.is_finite() && !(1e-4..1e16).contains(&x.abs()) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

pub fn write_sweep_csv(rows: &[SweepRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            csv_float(r.t),
            csv_float(r.max_qubit_like_norm),
            csv_float(r.max_cross_norm),
            csv_float(r.min_pt_eig),
            csv_float(r.negativity),
            r.verdict.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub struct SweepArgs<'a> {
    pub model: &'a Path,
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
    pub out: Option<&'a Path>,
    pub tol_comm: f64,
}

pub fn sweep(args: SweepArgs<'_>, stdout: &mut dyn Write) -> Result<u8> {
    let grid = sweep_grid(args.t_start, args.t_end, args.steps)?;
    let model = load(args.model)?;
    let rows = sweep_rows(&model, &grid, args.tol_comm)?;
    match args.out {
        Some(path) => {
            let file = fs::File::create(path)
                .with_context(|| format!("cannot write {}", path.display()))?;
            write_sweep_csv(&rows, file)?;
        }
        None => write_sweep_csv(&rows, stdout)?,
    }
    Ok(EXIT_SEPARABLE)
}

/// Rebuilds the built-in qutrit fixture, prints it and checks its
/// partial-transpose spectrum. Returns exit 0 when the check passes.
pub fn example(format: Format, tol_comm: f64, out: &mut dyn Write) -> Result<u8> {
    let model = validate(fixtures::qutrit_mixed_environment())?;
    let t = fixtures::QUTRIT_EXAMPLE_INSTANT;
    let state = joint_state(&model, &propagators(&model, t)?)?;
    let sigma_te = partial_transpose(&state.sigma, 3, 2, Subsystem::Environment)?;
    let spectrum = pt_spectrum(&state, Subsystem::Environment)?;
    let deviation = spectrum
        .iter()
        .zip(fixtures::QUTRIT_EXAMPLE_PT_SPECTRUM)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let passed = deviation <= 1e-10;
    let eval = Evaluation::new(&model, t, tol_comm)?;

    match format {
        Format::Json => {
            let mut value = eval.json();
            value["sigma"] = json!(state
                .sigma
                .to_rows()
                .iter()
                .map(|r| r.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
                .collect::<Vec<_>>());
            value["pt_environment_spectrum"] = json!(spectrum);
            value["expected_spectrum"] = json!(fixtures::QUTRIT_EXAMPLE_PT_SPECTRUM);
            value["max_deviation"] = json!(deviation);
            value["check_passed"] = json!(passed);
            writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
        }
        Format::Text => {
            writeln!(
                out,
                "qutrit (|0> + |1> + |2>)/sqrt(3) with a maximally mixed qubit environment"
            )?;
            writeln!(
                out,
                "w_0 = 1, w_1 = diag(1, -1), w_2 = [[0, i], [-i, 0]], R(0) = 1/2\n"
            )?;
            writeln!(out, "sigma, basis |00>, |01>, |10>, |11>, |20>, |21>:")?;
            write!(out, "{}", matrix(&state.sigma, "  "))?;
            writeln!(out, "\nsigma with the environment transposed:")?;
            write!(out, "{}", matrix(&sigma_te, "  "))?;
            writeln!(out, "\npartial-transpose eigenvalues: {}", list(&spectrum))?;
            writeln!(
                out,
                "expected:                      {}",
                list(&fixtures::QUTRIT_EXAMPLE_PT_SPECTRUM)
            )?;
            writeln!(
                out,
                "max deviation: {deviation:.1e} ({})\n",
                if passed { "ok" } else { "FAILED" }
            )?;
            write!(out, "{}", eval.text())?;
        }
    }
    if !passed {
        bail!("partial-transpose spectrum deviates from the expected values by {deviation:.3e}");
    }
    Ok(EXIT_SEPARABLE)
}

pub struct RandomArgs<'a> {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub count: usize,
    pub seed: u64,
    pub out: &'a Path,
    pub t: f64,
    pub tol_comm: f64,
}

pub fn random(args: RandomArgs<'_>) -> Result<u8> {
    let spec = EnsembleSpec {
        seed: args.seed,
        count: args.count,
        n: args.n,
        m: args.m,
        family: args.family,
    };
    fs::create_dir_all(args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    let summary_path: PathBuf = args.out.join("summary.csv");
    let mut summary = csv::Writer::from_path(&summary_path)
        .with_context(|| format!("cannot write {}", summary_path.display()))?;
    summary.write_record([
        "index",
        "file",
        "t",
        "verdict",
        "max_qubit_like_norm",
        "max_cross_norm",
        "min_pt_eig",
    ])?;
    for index in 0..args.count {
        let raw = random_instance(&spec, index)?;
        let name = format!("instance_{index:03}.json");
        let path = args.out.join(&name);
        fs::write(&path, model_to_json(&raw) + "\n")
            .with_context(|| format!("cannot write {}", path.display()))?;
        let model = validate(raw)?;
        let props = propagators(&model, args.t)?;
        let report = decide_with(&model, &props, args.tol_comm)?;
        let min_pt = pt_spectrum(&joint_state(&model, &props)?, Subsystem::System)?[0];
        summary.write_record([
            index.to_string(),
            name,
            csv_float(args.t),
            report.verdict.to_string(),
            csv_float(report.max_qubit_like_norm()),
            csv_float(report.max_cross_norm()),
            csv_float(min_pt),
        ])?;
    }
    summary.flush()?;
    Ok(EXIT_SEPARABLE)
}
