//! The four subcommands. Each returns the text for stdout and whether its
//! checks passed; files go to `config.output.dir`.

use std::fs;
use std::path::{Path, PathBuf};

use hyperturb_core::diagnostics::{
    convergence_report, field_totals, run_sweep_case, structural_sweep, Check, ConvergenceReport, FieldTotals,
    SweepCase, SweepReport,
};
use hyperturb_core::incompressible::{run_limit, LimitControls, LimitTrajectory};
use hyperturb_core::model::wave_speeds;
use hyperturb_core::solver::{run_simulation, StepRecord, Trajectory};
use hyperturb_core::spectral::Spectral;

use crate::config::{parse_config, ConfigError, Mode, RunConfig};
use crate::error::CliError;
use crate::output::{fields_csv, fmt_f64, Json, Obj};
use crate::scenario::{initial_field, limit_state};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    /// `false` when a check or acceptance criterion failed (exit code 4).
    pub passed: bool,
}

/// Read `path`, apply the command-line overrides and validate for `mode`.
/// A `mode` key in the file must agree with the subcommand.
pub fn load_config(path: &Path, mode: Mode, out: Option<PathBuf>, seed: Option<u64>) -> Result<RunConfig, CliError> {
    let text =
        fs::read_to_string(path).map_err(|source| CliError::ConfigFile { path: path.to_path_buf(), source })?;
    let mut cfg = parse_config(&text)?;
    if let Some(m) = cfg.mode {
        if m != mode {
            return Err(ConfigError::Invalid(format!("config has mode = {m} but the subcommand is {mode}")).into());
        }
    }
    cfg.mode = Some(mode);
    if let Some(dir) = out {
        cfg.output.dir = dir;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.mode {
        Some(Mode::Run) | None => run(cfg),
        Some(Mode::Sweep) => sweep(cfg),
        Some(Mode::Check) => check(cfg),
        Some(Mode::Eigen) => eigen(cfg),
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Io { path: path.clone(), source })?;
    Ok(path)
}

fn totals_json(t: &FieldTotals) -> Json {
    Obj::new()
        .with("mass", t.mass)
        .with("momentum", t.momentum.to_vec())
        .with("entropy", t.entropy)
        .with("max_sigma", t.max_sigma)
        .with("constraint_violations", t.constraint_violations)
        .with("min_production", t.min_production)
        .build()
}

fn record_json(r: &StepRecord) -> Json {
    Obj::new()
        .with("step", r.step)
        .with("time", r.time)
        .with("dt", r.dt)
        .with("clamps", r.clamps)
        .with("totals", totals_json(&r.totals))
        .build()
}

/// Integrate the configured initial condition and save snapshots.
pub fn simulate(cfg: &RunConfig) -> Result<Trajectory, CliError> {
    let initial = initial_field(&cfg.init, &cfg.grid, &cfg.model)?;
    Ok(run_simulation(&initial, &cfg.model, &cfg.time)?)
}

/// Writes `snapshot_NNN.csv` per requested time, `final.csv`, `report.json`
/// and the normalized `config.txt`.
fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let tr = simulate(cfg)?;
    let dir = &cfg.output.dir;
    let mut snaps = Vec::new();
    for (i, s) in tr.snapshots.iter().enumerate() {
        let name = format!("snapshot_{i:03}.csv");
        write_file(dir, &name, &fields_csv(&s.field))?;
        snaps.push(Obj::new().with("time", s.time).with("file", name).build());
    }
    write_file(dir, "final.csv", &fields_csv(&tr.field))?;
    write_file(dir, "config.txt", &cfg.to_config_string())?;
    let final_totals = field_totals(&tr.field, &cfg.model)?;
    let report = Obj::new()
        .with("mode", "run")
        .with("init", cfg.init.kind.as_str())
        .with("steps", tr.steps)
        .with("time", tr.time)
        .with("clamp_count", tr.clamp_count())
        .with("entropy_decreases", tr.entropy_decreases(hyperturb_core::diagnostics::ENTROPY_REL_TOL))
        .with("initial", totals_json(&tr.log[0].totals))
        .with("final", totals_json(&final_totals))
        .with("snapshots", Json::List(snaps))
        .with("log", Json::List(tr.log.iter().map(record_json).collect()))
        .build();
    write_file(dir, "report.json", &report.render())?;
    Ok(Outcome {
        stdout: format!(
            "run: {} steps to t = {}, clamp_count = {}, {} snapshots written to {}\n",
            tr.steps,
            fmt_f64(tr.time),
            tr.clamp_count(),
            tr.snapshots.len(),
            dir.display()
        ),
        passed: true,
    })
}

/// Result of the low-Mach convergence study.
#[derive(Debug, Clone)]
pub struct SweepStudy {
    pub reference: LimitTrajectory,
    /// One case per configured epsilon, in configuration order.
    pub cases: Vec<SweepCase>,
    /// `None` when a rate cannot be fitted (some error is exactly zero).
    pub fit: Option<ConvergenceReport>,
}

impl SweepStudy {
    pub fn passed(&self) -> bool {
        self.fit.as_ref().is_some_and(|f| f.passed)
    }
}

/// Run the incompressible reference once, then every epsilon on its own
/// thread. Results come back in epsilon order.
pub fn sweep_study(cfg: &RunConfig) -> Result<SweepStudy, CliError> {
    let sp = Spectral::new(&cfg.grid);
    let initial = limit_state(&cfg.init, &sp, &cfg.model)?;
    let controls = LimitControls {
        cfl: cfg.sweep.reference_cfl,
        dt_max: cfg.sweep.reference_dt_max,
        t_final: cfg.time.t_final,
        ..Default::default()
    };
    let reference = run_limit(&initial, &sp, &cfg.model, &controls)?;
    let results: Vec<hyperturb_core::Result<SweepCase>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cfg
            .sweep
            .epsilons
            .iter()
            .map(|&eps| {
                let (sp, initial, reference) = (&sp, &initial, &reference.state);
                scope.spawn(move || {
                    run_sweep_case(initial, reference, sp, &cfg.model, eps, &cfg.time).map(|(case, _)| case)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let cases = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let fit = convergence_report(cases.clone()).ok();
    Ok(SweepStudy { reference, cases, fit })
}

fn sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let study = sweep_study(cfg)?;
    let rows: Vec<Json> = study
        .cases
        .iter()
        .map(|c| {
            Obj::new()
                .with("epsilon", c.epsilon)
                .with("e_core_m0", c.errors[0].core)
                .with("e_relax_m0", c.errors[0].relax)
                .with("e_core_m1", c.errors[1].core)
                .with("e_relax_m1", c.errors[1].relax)
                .with("steps", c.steps)
                .with("clamps", c.clamps)
                .with("entropy_decreases", c.entropy_decreases)
                .with("constraint_violations", c.constraint_violations)
                .with("min_production", c.min_production)
                .build()
        })
        .collect();
    let fit = study.fit.as_ref();
    let report = Obj::new()
        .with("mode", "sweep")
        .with("init", cfg.init.kind.as_str())
        .with("t_final", cfg.time.t_final)
        .with(
            "reference",
            Obj::new()
                .with("steps", study.reference.steps)
                .with("time", study.reference.time)
                .with("max_divergence", study.reference.max_divergence)
                .build(),
        )
        .with("cases", Json::List(rows))
        .with("core_slope_m0", fit.map(|f| f.core_slope[0]))
        .with("core_slope_m1", fit.map(|f| f.core_slope[1]))
        .with("relax_slope_m0", fit.map(|f| f.relax_slope[0]))
        .with("relax_slope_m1", fit.map(|f| f.relax_slope[1]))
        .with("relax_monotone", fit.map(|f| f.relax_monotone))
        .with("passed", study.passed())
        .build();
    let path = write_file(&cfg.output.dir, "sweep.json", &report.render())?;
    let mut stdout = String::new();
    for c in &study.cases {
        stdout.push_str(&format!(
            "eps = {}: E_core = {}, E_relax = {}\n",
            fmt_f64(c.epsilon),
            fmt_f64(c.errors[0].core),
            fmt_f64(c.errors[0].relax)
        ));
    }
    match fit {
        Some(f) => stdout.push_str(&format!(
            "core slope = {}, relax monotone = {}\n",
            fmt_f64(f.core_slope[0]),
            f.relax_monotone
        )),
        None => stdout.push_str("no rate could be fitted\n"),
    }
    stdout.push_str(&format!("{}: report written to {}\n", pass_word(study.passed()), path.display()));
    Ok(Outcome { stdout, passed: study.passed() })
}

fn pass_word(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

const CHECKS: [(Check, &str); 6] = [
    (Check::Symmetry, "symmetry"),
    (Check::Spectrum, "spectrum"),
    (Check::Production, "production"),
    (Check::PdConsistency, "pd_consistency"),
    (Check::Concavity, "concavity"),
    (Check::Evaluation, "evaluation"),
];

fn check_json(r: &SweepReport, seed: u64) -> Json {
    let counts = CHECKS.iter().fold(Obj::new(), |o, (c, name)| o.with(name, r.count(*c)));
    let first: Vec<Json> = r
        .violations
        .iter()
        .take(20)
        .map(|v| {
            let name = CHECKS.iter().find(|(c, _)| *c == v.check).map_or("?", |(_, n)| n);
            Obj::new().with("check", name).with("sample", v.sample).with("value", v.value).build()
        })
        .collect();
    Obj::new()
        .with("mode", "check")
        .with("seed", seed)
        .with("samples", r.samples)
        .with("constrained", r.constrained)
        .with("worst_asymmetry", r.worst_asymmetry)
        .with("min_production", r.min_production)
        .with("violations", counts.build())
        .with("first_violations", Json::List(first))
        .with("passed", r.passed())
        .build()
}

fn check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let r = structural_sweep(cfg.check.samples, cfg.seed, &cfg.model);
    let path = write_file(&cfg.output.dir, "check.json", &check_json(&r, cfg.seed).render())?;
    Ok(Outcome {
        stdout: format!(
            "{}: {} samples, {} violations, report written to {}\n",
            pass_word(r.passed()),
            r.samples,
            r.violations.len(),
            path.display()
        ),
        passed: r.passed(),
    })
}

/// Prints the 14 characteristic speeds, ascending, one per line.
fn eigen(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let speeds = wave_speeds(&cfg.eigen.state, &cfg.eigen.direction, &cfg.model)?;
    let stdout = speeds.iter().map(|&s| fmt_f64(s) + "\n").collect();
    Ok(Outcome { stdout, passed: true })
}
