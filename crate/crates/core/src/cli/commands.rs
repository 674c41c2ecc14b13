use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{CommandKind, InitKind, RunConfig};
use super::CliError;
use crate::model::{Model, ModelParams, SampleBox, StructuralReport, Violation};
use crate::singular_ivp::{run_oracle_suite, OracleOptions, OracleOutcome};
use crate::stationary::{assemble_stationary, find_r_star, BracketOptions, Residuals, StationarySolution};
use crate::timedep::{
    convergence_verdict, simulate, Distances, InitialData, Perturbation, RadialProfile, SimOptions, TransformForm,
};

/// Violations listed verbatim in reports; the rest are only counted.
const LISTED_VIOLATIONS: usize = 10;

pub fn run_command(command: CommandKind, cfg: &RunConfig, jobs: Option<usize>) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.output_dir)?;
    match command {
        CommandKind::Check => cmd_check(cfg),
        CommandKind::Stationary => cmd_stationary(cfg),
        CommandKind::Simulate => cmd_simulate(cfg),
        CommandKind::Sweep => cmd_sweep(cfg, jobs),
        CommandKind::Oracles => cmd_oracles(cfg),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("plain data serializes");
    std::fs::write(path, text + "\n")?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path)?))
}

#[derive(Debug, Clone, Serialize)]
struct StructuralSummary {
    holds: bool,
    samples: usize,
    violation_count: usize,
    violations: Vec<Violation>,
}

impl From<StructuralReport> for StructuralSummary {
    fn from(r: StructuralReport) -> Self {
        Self {
            holds: r.holds(),
            samples: r.samples,
            violation_count: r.violations.len(),
            violations: r.violations.into_iter().take(LISTED_VIOLATIONS).collect(),
        }
    }
}

#[derive(Serialize)]
struct CheckReport<'a> {
    command: &'static str,
    params: &'a ModelParams,
    valid: bool,
    warnings: Vec<String>,
    structural: StructuralSummary,
}

fn cmd_check(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.params.validate()?;
    let model = Model::new(cfg.params);
    let report = CheckReport {
        command: "check",
        params: &cfg.params,
        valid: true,
        warnings: cfg.params.range_warnings(),
        structural: model.check_structural(&SampleBox::default()).into(),
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "parameters valid; structural conditions {}",
        if report.structural.holds { "hold" } else { "violated" }
    );
    write_json(&cfg.output_dir.join("check_report.json"), &report)
}

fn stationary_at(model: &Model, cfg: &RunConfig, n: usize) -> Result<StationarySolution, CliError> {
    let opts = BracketOptions {
        tol_r: cfg.numerics.tol_r,
        ..BracketOptions::with_n(n)
    };
    let r_star = find_r_star(model, &opts)?;
    Ok(assemble_stationary(model, r_star, n)?)
}

#[derive(Serialize)]
struct StationaryMeta<'a> {
    command: &'static str,
    #[serde(rename = "R_star")]
    r_star: f64,
    grid_n: usize,
    params: &'a ModelParams,
    residuals: Residuals,
    i_center: f64,
    viability: bool,
    structural: StructuralSummary,
    warnings: Vec<String>,
}

fn cmd_stationary(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.params.validate()?;
    let model = Model::new(cfg.params);
    let sol = stationary_at(&model, cfg, cfg.numerics.stationary_n)?;
    sol.write_csv(create(&cfg.output_dir.join("stationary_profile.csv"))?)?;
    let meta = StationaryMeta {
        command: "stationary",
        r_star: sol.r_star,
        grid_n: sol.grid_n(),
        params: &cfg.params,
        residuals: sol.residuals,
        i_center: sol.i_center,
        viability: model.viability(sol.r_star),
        structural: model.check_structural(&SampleBox::default()).into(),
        warnings: cfg.params.range_warnings(),
    };
    println!("R_star = {}", sol.r_star);
    write_json(&cfg.output_dir.join("stationary_meta.json"), &meta)
}

fn read_profile_csv(path: &Path) -> Result<(RadialProfile, RadialProfile, RadialProfile), CliError> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Config(format!("{}: missing column {name}", path.display())))
    };
    let (ir, is, im, ie) = (col("r")?, col("sigma")?, col("m")?, col("E")?);
    let (mut r, mut s, mut m, mut e) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for rec in reader.records() {
        let rec = rec?;
        let get = |i: usize| -> Result<f64, CliError> {
            rec.get(i)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| CliError::Config(format!("{}: unparsable number", path.display())))
        };
        r.push(get(ir)?);
        s.push(get(is)?);
        m.push(get(im)?);
        e.push(get(ie)?);
    }
    let n = r.len().saturating_sub(1);
    if n < 2 {
        return Err(CliError::Config(format!("{}: need at least three rows", path.display())));
    }
    if r.iter().enumerate().any(|(i, x)| (x - i as f64 / n as f64).abs() > 1e-9) {
        return Err(CliError::Config(format!(
            "{}: r must be the uniform grid i/n on [0, 1]",
            path.display()
        )));
    }
    Ok((RadialProfile::new(s), RadialProfile::new(m), RadialProfile::new(e)))
}

fn initial_data(cfg: &RunConfig, reference: &StationarySolution) -> Result<InitialData, CliError> {
    let n = cfg.numerics.grid_n;
    let mut init = match cfg.init.kind {
        InitKind::Stationary => InitialData::from_stationary(reference, n),
        InitKind::Perturbed => {
            let p = cfg.init.perturbation().expect("perturbed kind");
            InitialData::perturbed(reference, n, &p)
        }
        InitKind::File => {
            let path = cfg.init.path.as_deref().expect("validated");
            let (s, m, e) = read_profile_csv(path)?;
            InitialData {
                r0: cfg.init.r0.expect("validated"),
                sigma0: s,
                m0: m,
                e0: e,
            }
        }
    };
    if let Some(m0) = cfg.init.m0 {
        init.m0 = RadialProfile::constant(init.m0.n(), m0);
    }
    init.check()?;
    Ok(init)
}

/// Outcome of one simulation run against its stationary reference.
#[derive(Debug, Clone, Serialize)]
pub struct SimSummary {
    #[serde(rename = "R_star")]
    pub r_star: f64,
    pub converged: bool,
    pub monotone_tail: bool,
    pub final_t: f64,
    #[serde(rename = "final_R")]
    pub final_r: f64,
    pub final_distances: Distances,
    #[serde(rename = "min_R")]
    pub min_r: f64,
    #[serde(rename = "E_final_min")]
    pub e_final_min: f64,
    #[serde(rename = "E_final_max")]
    pub e_final_max: f64,
    #[serde(rename = "E_stationary_min")]
    pub e_stationary_min: f64,
    #[serde(rename = "E_stationary_max")]
    pub e_stationary_max: f64,
    pub steps: usize,
    pub snapshots: usize,
    pub seed: Option<u64>,
    pub perturbation: Option<Perturbation>,
    pub transform: TransformForm,
}

fn run_simulation(model: &Model, cfg: &RunConfig, dir: &Path) -> Result<SimSummary, CliError> {
    let reference = stationary_at(model, cfg, cfg.numerics.reference_n)?;
    let init = initial_data(cfg, &reference)?;
    let num = &cfg.numerics;
    let opts = SimOptions {
        dt: num.dt,
        t_end: num.t_end,
        cadence: num.cadence,
        transform: num.transform,
        interpolation: num.interpolation,
        check_invariants: true,
        pin_radius: false,
    };
    let series = simulate(model, &init, &opts, Some(&reference))?;
    series.write_series_csv(create(&dir.join("series.csv"))?)?;
    series.write_snapshots_csv(create(&dir.join("snapshots.csv"))?)?;
    let verdict = convergence_verdict(&series, num.converge_tol, num.monotone_noise).expect("reference supplied");
    let last = series.scalars.last().expect("initial record");
    let snap = series.last_snapshot().expect("initial snapshot");
    let fold = |v: &[f64], f: fn(f64, f64) -> f64, init: f64| v.iter().copied().fold(init, f);
    Ok(SimSummary {
        r_star: reference.r_star,
        converged: verdict.converged,
        monotone_tail: verdict.monotone_tail,
        final_t: last.t,
        final_r: last.radius,
        final_distances: last.distance.expect("reference supplied"),
        min_r: series.min_radius(),
        e_final_min: snap.e.min(),
        e_final_max: snap.e.max(),
        e_stationary_min: fold(&reference.e, f64::min, f64::INFINITY),
        e_stationary_max: fold(&reference.e, f64::max, f64::NEG_INFINITY),
        steps: series.scalars.len() - 1,
        snapshots: series.snapshots.len(),
        seed: cfg.init.seed.filter(|_| cfg.init.kind == InitKind::Perturbed),
        perturbation: cfg.init.perturbation(),
        transform: num.transform,
    })
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    command: &'static str,
    params: &'a ModelParams,
    #[serde(flatten)]
    summary: SimSummary,
}

fn cmd_simulate(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.params.validate()?;
    let model = Model::new(cfg.params);
    let summary = run_simulation(&model, cfg, &cfg.output_dir)?;
    println!(
        "converged = {}, final sup-distance = {:e}, min R = {}",
        summary.converged,
        summary.final_distances.sup(),
        summary.min_r
    );
    write_json(
        &cfg.output_dir.join("simulate_summary.json"),
        &SimulateReport {
            command: "simulate",
            params: &cfg.params,
            summary,
        },
    )
}

/// One sweep value; failed rows carry `error` and leave the rest empty.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub value: f64,
    #[serde(rename = "R_star")]
    pub r_star: Option<f64>,
    pub viability: Option<bool>,
    pub simulation: Option<SimSummary>,
    pub error: Option<String>,
}

fn sweep_row(cfg: &RunConfig, index: usize, value: f64) -> SweepRow {
    let mut row = SweepRow {
        index,
        value,
        r_star: None,
        viability: None,
        simulation: None,
        error: None,
    };
    let result = (|| -> Result<(), CliError> {
        let mut params = cfg.params;
        params.set(&cfg.sweep.param, value).expect("checked before the sweep");
        params.validate()?;
        let model = Model::new(params);
        let dir = cfg.output_dir.join(format!("row_{index}"));
        std::fs::create_dir_all(&dir)?;
        let sol = stationary_at(&model, cfg, cfg.numerics.stationary_n)?;
        sol.write_csv(create(&dir.join("stationary_profile.csv"))?)?;
        row.r_star = Some(sol.r_star);
        row.viability = Some(model.viability(sol.r_star));
        if cfg.sweep.simulate {
            let row_cfg = RunConfig { params, ..cfg.clone() };
            row.simulation = Some(run_simulation(&model, &row_cfg, &dir)?);
        }
        Ok(())
    })();
    if let Err(e) = result {
        row.error = Some(format!("{}: {e}", e.kind()));
    }
    row
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Serialize)]
struct SweepMeta<'a> {
    command: &'static str,
    param: &'a str,
    values: &'a [f64],
    params: &'a ModelParams,
    succeeded: usize,
    rows: &'a [SweepRow],
}

fn cmd_sweep(cfg: &RunConfig, jobs: Option<usize>) -> Result<(), CliError> {
    let spec = &cfg.sweep;
    if spec.values.is_empty() {
        return Err(CliError::Config("sweep.values is empty".into()));
    }
    if cfg.params.clone().set(&spec.param, 1.0).is_none() {
        return Err(CliError::Config(format!("unknown sweep parameter '{}'", spec.param)));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        spec.values
            .par_iter()
            .enumerate()
            .map(|(i, &v)| sweep_row(cfg, i, v))
            .collect()
    });

    let mut out = csv::Writer::from_writer(create(&cfg.output_dir.join("sweep.csv"))?);
    out.write_record([
        "param",
        "value",
        "R_star",
        "viability",
        "converged",
        "final_sup",
        "dist_sigma",
        "dist_E",
        "dist_m",
        "min_R",
        "error",
    ])?;
    for row in &rows {
        let sim = row.simulation.as_ref();
        out.write_record([
            spec.param.clone(),
            row.value.to_string(),
            opt(row.r_star),
            opt(row.viability),
            opt(sim.map(|s| s.converged)),
            opt(sim.map(|s| s.final_distances.sup())),
            opt(sim.map(|s| s.final_distances.sup_sigma)),
            opt(sim.map(|s| s.final_distances.sup_e)),
            opt(sim.map(|s| s.final_distances.sup_m)),
            opt(sim.map(|s| s.min_r)),
            row.error.clone().unwrap_or_default(),
        ])?;
    }
    out.flush()?;
    let succeeded = rows.iter().filter(|r| r.error.is_none()).count();
    for row in &rows {
        println!(
            "{}={}: R_star={} {}",
            spec.param,
            row.value,
            opt(row.r_star),
            row.error.as_deref().unwrap_or("ok")
        );
    }
    write_json(
        &cfg.output_dir.join("sweep_meta.json"),
        &SweepMeta {
            command: "sweep",
            param: &spec.param,
            values: &spec.values,
            params: &cfg.params,
            succeeded,
            rows: &rows,
        },
    )?;
    if succeeded == 0 {
        return Err(CliError::SweepFailed);
    }
    Ok(())
}

#[derive(Serialize)]
struct OracleReport<'a> {
    command: &'static str,
    tol: f64,
    theta_shift: f64,
    all_passed: bool,
    outcomes: &'a [OracleOutcome],
}

fn cmd_oracles(cfg: &RunConfig) -> Result<(), CliError> {
    let opts = OracleOptions {
        tol: cfg.oracles.tol,
        theta_shift: cfg.oracles.theta_shift,
    };
    let outcomes = run_oracle_suite(&opts);
    for o in &outcomes {
        println!(
            "{} {:<22} metric={:e} threshold={} {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.metric,
            o.threshold,
            o.detail
        );
    }
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name.to_string()).collect();
    write_json(
        &cfg.output_dir.join("oracles_report.json"),
        &OracleReport {
            command: "oracles",
            tol: opts.tol,
            theta_shift: opts.theta_shift,
            all_passed: failed.is_empty(),
            outcomes: &outcomes,
        },
    )?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::OracleFailure(failed))
    }
}
