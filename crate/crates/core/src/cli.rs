//! The `ans2d` command line.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::det::{h01_certificate, run_det, uniqueness_experiment, DiagnosticsSeries};
use crate::ensemble::{moment_bound_report, run_ensemble, EnsembleConfig, MomentEstimates};
use crate::error::{Error, Result};
use crate::io::csv::{read_table, write_long, write_table};
use crate::io::snapshot::write_snapshot;
use crate::io::{parse_config, Config, RunManifest};
use crate::noise::{condition_c_bounds, condition_c_empirical_check, condition_c_gate};
use crate::norms::{check_anisotropic_embedding, check_minkowski, h01_inner, NormReport};
use crate::sde::{pathwise_uniqueness_experiment, run_sde, StochasticDiagnostics};
use crate::spectral::fft::inverse_unchecked;
use crate::spectral::random::{random_band_limited, random_solenoidal};
use crate::spectral::{basis_element, enumerate_basis, nonlinear_term, nonlinear_term_oracle, GalerkinSpace, SpectralField};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ans2d", version, about = "Anisotropic 2D Navier-Stokes simulator and estimate checker")]
struct Cli {
    /// Configuration file with `section.key = value` lines.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "ans2d-out")]
    out: PathBuf,
    /// Overrides `run.seed`.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Run even when the noise constants fail the admissibility gates.
    #[arg(long, global = true)]
    force: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Deterministic run: diagnostics, snapshots and certificates.
    RunDet,
    /// One stochastic Galerkin path.
    RunSde,
    /// Moment estimates across Galerkin levels.
    Ensemble,
    /// Inequality, basis, certificate and noise-condition audits.
    Verify,
    /// Pseudospectral nonlinearity against direct convolution.
    OracleCheck,
    /// Deterministic and pathwise uniqueness experiments.
    Uniqueness,
    /// Converts a CSV table to long format `series,x,value`.
    PlotData {
        /// Table to convert; defaults to the diagnostics in the output directory.
        #[arg(long, value_name = "PATH")]
        input: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::RunDet => "run-det",
            Self::RunSde => "run-sde",
            Self::Ensemble => "ensemble",
            Self::Verify => "verify",
            Self::OracleCheck => "oracle-check",
            Self::Uniqueness => "uniqueness",
            Self::PlotData { .. } => "plot-data",
        }
    }
}

/// Exit code and short tag for an error.
pub fn classify(e: &Error) -> (i32, &'static str) {
    match e {
        Error::Config(_) => (EXIT_USAGE, "config"),
        Error::InvalidArgument(_) => (EXIT_USAGE, "argument"),
        Error::InvalidGrid { .. } | Error::InvalidMode { .. } | Error::LevelTooLarge { .. } | Error::OracleTooLarge { .. } => {
            (EXIT_USAGE, "argument")
        }
        Error::Gate(_) => (EXIT_VIOLATION, "gate"),
        Error::BlowUp { .. } => (EXIT_RUNTIME, "blow-up"),
        Error::Trajectory { source, .. } => (classify(source).0, "trajectory"),
        Error::Io(_) | Error::Json(_) | Error::Snapshot(_) => (EXIT_RUNTIME, "io"),
        Error::GridMismatch { .. } | Error::SymmetryViolation { .. } => (EXIT_RUNTIME, "runtime"),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_USAGE,
            };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            let (code, tag) = classify(&e);
            eprintln!("error[{tag}]: {e}");
            code
        }
    }
}

fn load_config(cli: &Cli) -> Result<Config> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            parse_config(&text)?
        }
        None => Config::default(),
    };
    if let Some(s) = cli.seed {
        cfg.run_seed = s;
    }
    cfg.run_force |= cli.force;
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<i32> {
    let cfg = load_config(cli)?;
    let out = cli.out.as_path();
    fs::create_dir_all(out)?;
    let mut m = RunManifest::start(cli.command.name(), cfg.echo(), cfg.run_seed, cfg.run_force);
    if let Some(w) = cfg.gate_warning() {
        eprintln!("warning: {w}");
        m.warn(w);
    }
    // plot-data shares a directory with the run it converts
    let manifest = out.join(match cli.command {
        Command::PlotData { .. } => "plot_manifest.json",
        _ => "manifest.json",
    });
    let result = match &cli.command {
        Command::RunDet => cmd_run_det(&cfg, out, &mut m),
        Command::RunSde => cmd_run_sde(&cfg, out, &mut m),
        Command::Ensemble => cmd_ensemble(&cfg, out, &mut m),
        Command::Verify => cmd_verify(&cfg, out, &mut m),
        Command::OracleCheck => cmd_oracle(&cfg, out, &mut m),
        Command::Uniqueness => cmd_uniqueness(&cfg, out, &mut m),
        Command::PlotData { input } => cmd_plot(input.as_deref(), out, &mut m),
    };
    match result {
        Ok(()) => {
            for v in &m.verdicts {
                println!("{} {}: {}", if v.passed { "PASS" } else { "FAIL" }, v.check, v.detail);
            }
            let code = if m.all_passed() { EXIT_PASS } else { EXIT_VIOLATION };
            m.finish(&manifest, code)?;
            Ok(code)
        }
        Err(e) => {
            m.warn(format!("aborted: {e}"));
            let _ = m.finish(&manifest, classify(&e).0);
            Err(e)
        }
    }
}

fn write_snapshots(out: &Path, times: &[f64], states: &[SpectralField], m: &mut RunManifest) -> Result<()> {
    fs::create_dir_all(out.join("snapshots"))?;
    for (i, (t, u)) in times.iter().zip(states).enumerate() {
        let name = format!("snapshots/snap_{i:06}.ans2");
        write_snapshot(u, *t, out.join(&name))?;
        m.output(name);
    }
    Ok(())
}

fn table(out: &Path, name: &str, header: &str, rows: &[String], m: &mut RunManifest) -> Result<()> {
    write_table(out.join(name), header, rows)?;
    m.output(name);
    Ok(())
}

fn cmd_run_det(cfg: &Config, out: &Path, m: &mut RunManifest) -> Result<()> {
    let u0 = cfg.initial_field()?;
    let traj = run_det(&u0, &cfg.det_config())?;
    let d = &traj.diagnostics;
    table(out, "diagnostics.csv", DiagnosticsSeries::CSV_HEADER, &d.csv_rows(), m)?;
    write_snapshots(out, &traj.times, &traj.states, m)?;
    let r = d.energy_residual().iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let e0 = d.l2_sq.first().copied().unwrap_or(0.0);
    m.verdict("energy_identity", r <= 1e-4 * e0, format!("max |R| = {r:e}, 1e-4 |u0|^2 = {:e}", 1e-4 * e0));
    let h = h01_certificate(&traj, 1e-6);
    m.verdict(
        "h01_certificate",
        h.passed(),
        format!("C = {:e}, max increase = {:e}, bound ratio = {:.6}", h.constant, h.max_increase, h.bound_ratio),
    );
    Ok(())
}

fn require_gate(cfg: &Config, uniqueness: bool) -> Result<()> {
    let gate = condition_c_gate(&condition_c_bounds(&cfg.noise_model()?));
    let ok = if uniqueness { gate.uniqueness } else { gate.existence };
    if ok || cfg.run_force {
        return Ok(());
    }
    Err(Error::Gate(cfg.gate_warning().unwrap_or_default() + "; pass --force to run anyway"))
}

fn cmd_run_sde(cfg: &Config, out: &Path, m: &mut RunManifest) -> Result<()> {
    require_gate(cfg, false)?;
    let model = cfg.noise_model()?;
    let traj = run_sde(&cfg.initial_field()?, &model, &cfg.sde_config())?;
    table(out, "sde_diagnostics.csv", StochasticDiagnostics::CSV_HEADER, &traj.diagnostics.csv_rows(), m)?;
    write_snapshots(out, &traj.times, &traj.states, m)
}

fn cmd_ensemble(cfg: &Config, out: &Path, m: &mut RunManifest) -> Result<()> {
    let model = cfg.noise_model()?;
    let u0 = cfg.initial_field()?;
    let mut estimates = Vec::new();
    for &level in &cfg.ensemble_levels {
        let sde = crate::sde::SdeConfig { galerkin_n: level, ..cfg.sde_config() };
        let ens = EnsembleConfig { force: cfg.run_force, ..EnsembleConfig::new(cfg.ensemble_paths, cfg.run_seed, sde) };
        estimates.push(run_ensemble(&u0, &model, &ens)?);
    }
    let rows: Vec<String> = estimates.iter().map(MomentEstimates::csv_row).collect();
    table(out, "ensemble_summary.csv", MomentEstimates::CSV_HEADER, &rows, m)?;
    let rep = moment_bound_report(&estimates);
    m.verdict("moment_uniformity", rep.uniform, format!("C_T = {:?}, spread = {:.4}", rep.c_hat, rep.spread));
    Ok(())
}

fn sample_seed(base: u64, i: usize) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64)
}

fn cmd_verify(cfg: &Config, out: &Path, m: &mut RunManifest) -> Result<()> {
    let grid = cfg.grid()?;
    let mut reports: Vec<NormReport> = Vec::new();
    let band = grid.band1().min(grid.band2()).max(1);

    // embedding in both orientations, worst case over the samples
    let mut worst: [Option<NormReport>; 2] = [None, None];
    let mut violations = 0;
    for i in 0..cfg.verify_samples {
        let u = random_band_limited(grid, sample_seed(cfg.init_seed, i), 1 + i as i64 % band, cfg.init_decay, 1.0);
        let a = check_anisotropic_embedding(&u)?;
        for (slot, r) in worst.iter_mut().zip([a.horizontal, a.vertical]) {
            violations += usize::from(!r.satisfied);
            if slot.as_ref().is_none_or(|w| r.ratio() > w.ratio()) {
                *slot = Some(r);
            }
        }
        if i < 20 {
            let f = inverse_unchecked(&u);
            for (p, q) in [(4.0, 2.0), (f64::INFINITY, 2.0)] {
                let r = check_minkowski(&f, p, q)?;
                violations += usize::from(!r.satisfied);
                if i == 0 || !r.satisfied {
                    reports.push(r);
                }
            }
        }
    }
    reports.extend(worst.into_iter().flatten());

    // orthonormal basis and the two Galerkin projections
    let modes: Vec<_> = enumerate_basis(grid).into_iter().take(32).collect();
    let elems = modes.iter().map(|&b| basis_element(grid, b)).collect::<Result<Vec<_>>>()?;
    let (mut gram_l2, mut gram_h01) = (0.0f64, 0.0f64);
    for (i, a) in elems.iter().enumerate() {
        for (j, b) in elems.iter().enumerate() {
            let delta = if i == j { 1.0 } else { 0.0 };
            gram_l2 = gram_l2.max((a.inner(b) - delta).abs());
            if i != j {
                gram_h01 = gram_h01.max(h01_inner(a, b)?.abs());
            }
        }
    }
    reports.push(NormReport::new("basis_gram_l2", gram_l2, 1.0, 1e-12, 0.0));
    reports.push(NormReport::new("basis_gram_h01", gram_h01, 1.0, 1e-12, 0.0));
    let space = GalerkinSpace::new(grid, cfg.galerkin_n)?;
    let mut proj = 0.0f64;
    for i in 0..50 {
        let u = random_solenoidal(grid, sample_seed(cfg.init_seed ^ 0x5bd1, i), 1.0);
        proj = proj.max(space.project(&u).max_abs_diff(&space.project_h01(&u)) / u.max_abs());
    }
    reports.push(NormReport::new("projection_l2_vs_h01", proj, 1.0, 1e-12, 0.0));

    // deterministic certificates on the configured data
    let u0 = cfg.initial_field()?;
    let traj = run_det(&u0, &cfg.det_config())?;
    let d = &traj.diagnostics;
    let r = d.energy_residual().iter().fold(0.0f64, |a, x| a.max(x.abs()));
    reports.push(NormReport::new("energy_identity", r, d.l2_sq[0], 1e-4, 0.0));
    let h = h01_certificate(&traj, 1e-6);
    reports.push(NormReport::new("h01_monotone", h.max_increase, h.tolerance, 1.0, 0.0));
    reports.push(NormReport::new("h01_bound", h.bound_ratio, 1.0 + 1e-6, 1.0, 0.0));

    // noise growth and Lipschitz conditions on sampled fields
    let audit = condition_c_empirical_check(&cfg.noise_model()?, grid, cfg.verify_samples, cfg.run_seed)?;
    violations += audit.violations;
    reports.extend(audit.reports);

    table(out, "verify.csv", NormReport::CSV_HEADER, &reports.iter().map(NormReport::csv_row).collect::<Vec<_>>(), m)?;
    for r in &reports {
        m.verdict(r.check.clone(), r.satisfied, format!("lhs = {:e}, bound = {:e}", r.lhs, r.constant * r.rhs + r.slack));
    }
    m.verdict("sample_violations", violations == 0, format!("{violations} violations over {} samples", cfg.verify_samples));
    Ok(())
}

fn cmd_oracle(cfg: &Config, out: &Path, m: &mut RunManifest) -> Result<()> {
    let grid = cfg.grid()?;
    let mut rows = Vec::with_capacity(cfg.oracle_fields);
    let mut worst = 0.0f64;
    for i in 0..cfg.oracle_fields {
        let seed = sample_seed(cfg.init_seed, i);
        let u = random_solenoidal(grid, seed, 1.0);
        let slow = nonlinear_term_oracle(&u)?;
        let diff = nonlinear_term(&u).max_abs_diff(&slow);
        let rel = if slow.max_abs() > 0.0 { diff / slow.max_abs() } else { diff };
        worst = worst.max(rel);
        rows.push(format!("{i},{seed},{diff:?},{rel:?}"));
    }
    table(out, "oracle.csv", "field,seed,max_abs_diff,rel_deviation", &rows, m)?;
    println!("max relative deviation: {worst:e}");
    m.verdict("oracle_equivalence", worst <= 1e-12, format!("max relative deviation {worst:e} over {} fields", cfg.oracle_fields));
    Ok(())
}

fn cmd_uniqueness(cfg: &Config, out: &Path, m: &mut RunManifest) -> Result<()> {
    let grid = cfg.grid()?;
    let u0 = cfg.initial_field()?;
    let w0 = random_band_limited(grid, cfg.init_seed.wrapping_add(1), 2, 1.0, cfg.uniqueness_perturbation);
    let mut v0 = u0.clone();
    v0.add_scaled(1.0, &w0);
    let tol = cfg.uniqueness_tolerance;

    let det = uniqueness_experiment(&u0, &v0, &cfg.det_config(), tol)?;
    let rows: Vec<String> = (0..det.t.len())
        .map(|i| format!("{:?},{:?},{:?},{:?}", det.t[i], det.w_sq[i], det.c_emp[i], det.exponent[i]))
        .collect();
    table(out, "uniqueness_det.csv", "t,w_sq,c_emp,exponent", &rows, m)?;
    m.verdict("det_uniqueness", det.holds, format!("worst ratio {:.6}, C0 = {:e}", det.worst_ratio, det.c0));

    let model = cfg.noise_model()?;
    if !model.is_zero() {
        require_gate(cfg, true)?;
        let sde = cfg.sde_config();
        let p = pathwise_uniqueness_experiment(&u0, &v0, &model, &sde, &sde, tol)?;
        let rows: Vec<String> = (0..p.t.len())
            .map(|i| format!("{:?},{:?},{:?},{:?},{:?},{:?}", p.t[i], p.w_sq[i], p.c_emp[i], p.q[i], p.g[i], p.weighted[i]))
            .collect();
        table(out, "uniqueness_pathwise.csv", "t,w_sq,c_emp,q,g,weighted", &rows, m)?;
        m.verdict(
            "pathwise_uniqueness",
            p.holds,
            format!("worst ratio {:.6}, beta_hat = {:.4}, C(alpha_hat) = {:e}", p.worst_ratio, p.beta_hat, p.c_alpha_hat),
        );
    }
    Ok(())
}

fn cmd_plot(input: Option<&Path>, out: &Path, m: &mut RunManifest) -> Result<()> {
    let input = match input {
        Some(p) => p.to_path_buf(),
        None => ["diagnostics.csv", "sde_diagnostics.csv", "ensemble_summary.csv"]
            .iter()
            .map(|n| out.join(n))
            .find(|p| p.exists())
            .ok_or_else(|| Error::InvalidArgument(format!("no diagnostics table in {}; pass --input", out.display())))?,
    };
    let t = read_table(&input)?;
    let x = t.columns.first().cloned().ok_or_else(|| Error::InvalidArgument(format!("{} is empty", input.display())))?;
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("table");
    let name = format!("plot_{stem}.csv");
    let n = write_long(out.join(&name), &t, &x)?;
    m.output(name.clone());
    println!("{n} points written to {}", out.join(name).display());
    Ok(())
}
