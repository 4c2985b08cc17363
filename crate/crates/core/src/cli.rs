//! Command line interface: configuration parsing, run and study execution.
//!
//! Configuration is a line-based `key = value` file with `#` comments;
//! command line flags override file values. Exit codes: 0 success,
//! 2 configuration error, 3 solver failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::analysis::{
    l2_diff_p0, l2_diff_p1vec_bdm, study_exact_h, study_exact_tau, study_nonsmooth_h,
    study_nonsmooth_tau, ConvergenceTable, ManufacturedTestCase, NonsmoothTestCase, SmoothTestCase,
};
use crate::mesh::{build_lshape, mesh_stats, refine_uniform};
use crate::postprocess::{postprocess_halfstep, HalfStepContext};
use crate::projections::{project_p0, project_p1_vector, ScalarFunction, VectorFunction};
use crate::timestepper::{energy, Simulation, TimeGrid, WaveProblem};
use crate::vtk::{write_mesh_vtk, write_p1_vtk};
use crate::{Error, Result};

/// Mesh levels above this need the `deep` flag; the finest default runs
/// keep the whole table suite at desk scale.
const MAX_DESK_LEVEL: usize = 32;

#[derive(Parser, Debug)]
#[command(
    name = "mixedwave",
    about = "Mixed BDM1-P0 finite element solver for the acoustic wave system",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a single simulation and export its fields.
    Run(ConfigArgs),
    /// Run a convergence study and emit its table as CSV and text.
    Convergence(ConfigArgs),
    /// Print mesh statistics, optionally exporting the mesh as VTK.
    MeshInfo(MeshInfoArgs),
}

#[derive(Args, Debug, Default)]
pub struct ConfigArgs {
    /// Configuration file (key = value lines, # comments).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Test case: smooth | nonsmooth | manufactured.
    #[arg(long)]
    pub case: Option<String>,
    /// Study kind: single | h | tau.
    #[arg(long)]
    pub study: Option<String>,
    /// Mesh levels (cells per unit length) for h-studies, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<usize>>,
    /// Mesh level for single runs and tau-studies.
    #[arg(long)]
    pub n: Option<usize>,
    /// Time step.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Number of time steps (alternative to tau).
    #[arg(long)]
    pub nsteps: Option<usize>,
    /// Time horizon.
    #[arg(long = "T")]
    pub t_final: Option<f64>,
    /// Time steps for tau-studies, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub tau_levels: Option<Vec<f64>>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Export final fields as VTK.
    #[arg(long)]
    pub export_fields: bool,
    /// Write a per-step CSV log with time and energy.
    #[arg(long)]
    pub energy_log: bool,
    /// Dump assembled matrices in coordinate text format.
    #[arg(long)]
    pub export_matrices: bool,
    /// Worker threads for independent study rows.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Unlock mesh levels beyond the desk-scale default.
    #[arg(long)]
    pub deep: bool,
}

#[derive(Args, Debug)]
pub struct MeshInfoArgs {
    /// Cells per unit length.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Number of uniform refinements to apply.
    #[arg(long, default_value_t = 0)]
    pub refine: usize,
    /// Write the mesh to this VTK file.
    #[arg(long)]
    pub vtk: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseKind {
    Smooth,
    Nonsmooth,
    Manufactured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StudyKind {
    Single,
    H,
    Tau,
}

/// Validated run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub case: CaseKind,
    pub study: StudyKind,
    pub levels: Vec<usize>,
    pub n: usize,
    pub tau: f64,
    pub nsteps: usize,
    pub t_final: f64,
    pub tau_levels: Vec<f64>,
    pub out: PathBuf,
    pub export_fields: bool,
    pub energy_log: bool,
    pub export_matrices: bool,
    pub threads: usize,
    pub deep: bool,
}

#[derive(Default)]
struct RawConfig {
    case: Option<String>,
    study: Option<String>,
    levels: Option<Vec<usize>>,
    n: Option<usize>,
    tau: Option<f64>,
    nsteps: Option<usize>,
    t_final: Option<f64>,
    tau_levels: Option<Vec<f64>>,
    out: Option<PathBuf>,
    export_fields: Option<bool>,
    energy_log: Option<bool>,
    export_matrices: Option<bool>,
    threads: Option<usize>,
    deep: Option<bool>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| Error::config(key, format!("cannot parse value '{value}'")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split([' ', ','])
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::config(
            key,
            format!("expected a boolean, got '{value}'"),
        )),
    }
}

impl RawConfig {
    fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(
                    format!("line {}", lineno + 1),
                    format!("expected 'key = value', got '{line}'"),
                ));
            };
            let key = key.trim();
            let value = value.trim();
            match key {
                "case" => self.case = Some(value.to_string()),
                "study" => self.study = Some(value.to_string()),
                "levels" => self.levels = Some(parse_list(key, value)?),
                "n" => self.n = Some(parse_value(key, value)?),
                "tau" => self.tau = Some(parse_value(key, value)?),
                "nsteps" => self.nsteps = Some(parse_value(key, value)?),
                "T" => self.t_final = Some(parse_value(key, value)?),
                "tau_levels" => self.tau_levels = Some(parse_list(key, value)?),
                "out" => self.out = Some(PathBuf::from(value)),
                "export_fields" => self.export_fields = Some(parse_bool(key, value)?),
                "energy_log" => self.energy_log = Some(parse_bool(key, value)?),
                "export_matrices" => self.export_matrices = Some(parse_bool(key, value)?),
                "threads" => self.threads = Some(parse_value(key, value)?),
                "deep" => self.deep = Some(parse_bool(key, value)?),
                _ => return Err(Error::config(key, "unknown key")),
            }
        }
        Ok(())
    }

    fn apply_flags(&mut self, args: &ConfigArgs) {
        if let Some(v) = &args.case {
            self.case = Some(v.clone());
        }
        if let Some(v) = &args.study {
            self.study = Some(v.clone());
        }
        if let Some(v) = &args.levels {
            self.levels = Some(v.clone());
        }
        if let Some(v) = args.n {
            self.n = Some(v);
        }
        if let Some(v) = args.tau {
            self.tau = Some(v);
        }
        if let Some(v) = args.nsteps {
            self.nsteps = Some(v);
        }
        if let Some(v) = args.t_final {
            self.t_final = Some(v);
        }
        if let Some(v) = &args.tau_levels {
            self.tau_levels = Some(v.clone());
        }
        if let Some(v) = &args.out {
            self.out = Some(v.clone());
        }
        if args.export_fields {
            self.export_fields = Some(true);
        }
        if args.energy_log {
            self.energy_log = Some(true);
        }
        if args.export_matrices {
            self.export_matrices = Some(true);
        }
        if let Some(v) = args.threads {
            self.threads = Some(v);
        }
        if args.deep {
            self.deep = Some(true);
        }
    }

    fn validate(self) -> Result<RunConfig> {
        let case = match self.case.as_deref().unwrap_or("smooth") {
            "smooth" => CaseKind::Smooth,
            "nonsmooth" => CaseKind::Nonsmooth,
            "manufactured" => CaseKind::Manufactured,
            other => {
                return Err(Error::config(
                    "case",
                    format!("unknown case '{other}' (smooth | nonsmooth | manufactured)"),
                ))
            }
        };
        let study = match self.study.as_deref().unwrap_or("single") {
            "single" => StudyKind::Single,
            "h" => StudyKind::H,
            "tau" => StudyKind::Tau,
            other => {
                return Err(Error::config(
                    "study",
                    format!("unknown study '{other}' (single | h | tau)"),
                ))
            }
        };
        let t_final = self.t_final.unwrap_or(1.0);
        if !(t_final > 0.0) {
            return Err(Error::config("T", "time horizon must be positive"));
        }
        let (tau, nsteps) = match (self.tau, self.nsteps) {
            (Some(tau), None) => {
                if !(tau > 0.0) {
                    return Err(Error::config("tau", "time step must be positive"));
                }
                let nsteps = (t_final / tau).round() as usize;
                if nsteps == 0 || (nsteps as f64 * tau - t_final).abs() > 1e-12 {
                    return Err(Error::config(
                        "tau",
                        format!("tau = {tau} does not divide T = {t_final}"),
                    ));
                }
                (tau, nsteps)
            }
            (None, Some(nsteps)) => {
                if nsteps == 0 {
                    return Err(Error::config("nsteps", "step count must be at least 1"));
                }
                (t_final / nsteps as f64, nsteps)
            }
            (Some(tau), Some(nsteps)) => {
                if !(tau > 0.0) || nsteps == 0 || (nsteps as f64 * tau - t_final).abs() > 1e-12 {
                    return Err(Error::config(
                        "tau",
                        "tau and nsteps are inconsistent with T (tau * nsteps must equal T)",
                    ));
                }
                (tau, nsteps)
            }
            (None, None) => {
                let tau = 0.001;
                (
                    (t_final / (t_final / tau).round()),
                    (t_final / tau).round() as usize,
                )
            }
        };
        let levels = self.levels.unwrap_or_else(|| vec![4, 8, 16, 32]);
        if levels.is_empty() {
            return Err(Error::config("levels", "at least one level is required"));
        }
        if levels.contains(&0) {
            return Err(Error::config("levels", "levels must be at least 1"));
        }
        if levels.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config(
                "levels",
                "levels must be strictly increasing",
            ));
        }
        let deep = self.deep.unwrap_or(false);
        let n = self.n.unwrap_or(match study {
            StudyKind::Tau => 32,
            _ => 4,
        });
        if n == 0 {
            return Err(Error::config("n", "mesh level must be at least 1"));
        }
        if !deep {
            if let Some(&max) = levels.iter().max() {
                if max > MAX_DESK_LEVEL {
                    return Err(Error::config(
                        "levels",
                        format!("level {max} exceeds the desk-scale cap {MAX_DESK_LEVEL}; pass deep = true to unlock"),
                    ));
                }
            }
            if n > MAX_DESK_LEVEL {
                return Err(Error::config(
                    "n",
                    format!("level {n} exceeds the desk-scale cap {MAX_DESK_LEVEL}; pass deep = true to unlock"),
                ));
            }
        }
        let tau_levels = self
            .tau_levels
            .unwrap_or_else(|| vec![0.25, 0.125, 0.0625, 0.03125]);
        if tau_levels.is_empty() {
            return Err(Error::config(
                "tau_levels",
                "at least one time step is required",
            ));
        }
        for &t in &tau_levels {
            if !(t > 0.0) {
                return Err(Error::config("tau_levels", "time steps must be positive"));
            }
            let k = (t_final / t).round();
            if k < 1.0 || (k * t - t_final).abs() > 1e-12 {
                return Err(Error::config(
                    "tau_levels",
                    format!("tau = {t} does not divide T = {t_final}"),
                ));
            }
        }
        if tau_levels.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::config(
                "tau_levels",
                "time steps must be strictly decreasing",
            ));
        }
        let threads = self.threads.unwrap_or(1);
        if threads == 0 {
            return Err(Error::config("threads", "thread count must be at least 1"));
        }
        Ok(RunConfig {
            case,
            study,
            levels,
            n,
            tau,
            nsteps,
            t_final,
            tau_levels,
            out: self.out.unwrap_or_else(|| PathBuf::from(".")),
            export_fields: self.export_fields.unwrap_or(false),
            energy_log: self.energy_log.unwrap_or(false),
            export_matrices: self.export_matrices.unwrap_or(false),
            threads,
            deep,
        })
    }
}

/// Parses and validates the configuration from an optional file plus flag
/// overrides.
pub fn parse_config(args: &ConfigArgs) -> Result<RunConfig> {
    let mut raw = RawConfig::default();
    if let Some(path) = &args.config {
        raw.apply_file(path)?;
    }
    raw.apply_flags(args);
    raw.validate()
}

fn case_problem(case: CaseKind) -> (WaveProblem, Option<(ScalarFunction, VectorFunction)>) {
    match case {
        CaseKind::Smooth => {
            let c = SmoothTestCase::new();
            (c.problem, Some((c.exact_p, c.exact_u)))
        }
        CaseKind::Nonsmooth => (NonsmoothTestCase::new().problem, None),
        CaseKind::Manufactured => {
            let c = ManufacturedTestCase::new();
            (c.problem, Some((c.exact_p, c.exact_u)))
        }
    }
}

fn case_name(case: CaseKind) -> &'static str {
    match case {
        CaseKind::Smooth => "smooth",
        CaseKind::Nonsmooth => "nonsmooth",
        CaseKind::Manufactured => "manufactured",
    }
}

/// Executes a single simulation and writes the requested artifacts.
pub fn cmd_run(config: &RunConfig) -> Result<()> {
    if config.study != StudyKind::Single {
        return Err(Error::config(
            "study",
            "the run command expects study = single; use the convergence command for studies",
        ));
    }
    fs::create_dir_all(&config.out)?;
    let (problem, exact) = case_problem(config.case);
    let mesh = Arc::new(build_lshape(config.n)?);
    let grid = TimeGrid::new(config.t_final, config.nsteps)?;
    let mut sim = Simulation::new(problem.clone(), &mesh, grid)?;

    if config.export_matrices {
        for (name, matrix) in [
            ("ma", sim.mass_p0()),
            ("mb", sim.mass_bdm1()),
            ("d", sim.divergence()),
        ] {
            let mut file = fs::File::create(config.out.join(format!("{name}.coo.txt")))?;
            matrix.dump_coo(&mut file)?;
        }
    }

    // Per-step log rows: energy plus, when an exact solution is known,
    // the projected velocity and pressure errors.
    let log_row = |sim: &Simulation| -> (usize, f64, f64, Option<(f64, f64)>) {
        let state = sim.state();
        let errors = exact.as_ref().map(|(exact_p, exact_u)| {
            let (px, py) = project_p1_vector(exact_u, state.time, &mesh);
            let pp = project_p0(exact_p, state.time, &mesh);
            (
                l2_diff_p1vec_bdm(&px, &py, &state.u),
                l2_diff_p0(&pp, &state.p),
            )
        });
        (state.step, state.time, sim.energy(), errors)
    };
    let mut energy_rows = Vec::new();
    if config.energy_log {
        energy_rows.push(log_row(&sim));
    }
    let mut last_pair = None;
    while !sim.is_done() {
        let prev = sim.state().clone();
        sim.advance()?;
        if config.energy_log {
            energy_rows.push(log_row(&sim));
        }
        last_pair = Some((prev, sim.state().clone()));
    }

    if config.energy_log {
        let mut csv = String::from(if exact.is_some() {
            "step,time,energy,err_u,err_p\n"
        } else {
            "step,time,energy\n"
        });
        for (step, time, e, errors) in &energy_rows {
            match errors {
                Some((eu, ep)) => {
                    csv.push_str(&format!("{step},{time},{e:.12e},{eu:.6e},{ep:.6e}\n"))
                }
                None => csv.push_str(&format!("{step},{time},{e:.12e}\n")),
            }
        }
        fs::write(config.out.join("energy.csv"), csv)?;
    }

    if config.export_fields {
        let state = sim.state();
        let mut file = fs::File::create(config.out.join("fields.vtk"))?;
        write_mesh_vtk(
            &mut file,
            &mesh,
            Some(&state.p),
            Some(&state.u),
            &format!("{} case at t = {}", case_name(config.case), state.time),
        )?;
        if let Some((prev, next)) = &last_pair {
            let ctx = HalfStepContext {
                u_prev: &prev.u,
                u_next: &next.u,
                p_prev: &prev.p,
                p_next: &next.p,
                tau: grid.tau(),
                t_prev: prev.time,
                t_next: next.time,
                g: &problem.g,
            };
            let ptilde = postprocess_halfstep(&ctx, &problem.coeffs.b)?;
            let mut file = fs::File::create(config.out.join("ptilde.vtk"))?;
            write_p1_vtk(
                &mut file,
                &ptilde.field,
                &format!("post-processed pressure at t = {}", ptilde.time),
            )?;
        }
    }

    let state = sim.state();
    println!(
        "{} case: {} triangles, {} steps to t = {}, energy {:.6e}",
        case_name(config.case),
        mesh.num_triangles(),
        state.step,
        state.time,
        energy(sim.mass_p0(), sim.mass_bdm1(), state),
    );
    Ok(())
}

/// Executes the convergence study selected by (case, study kind); writes the
/// table as CSV and prints it as text.
pub fn cmd_convergence(config: &RunConfig) -> Result<()> {
    fs::create_dir_all(&config.out)?;
    let table: ConvergenceTable = match (config.case, config.study) {
        (CaseKind::Smooth, StudyKind::H) => {
            let c = SmoothTestCase::new();
            study_exact_h(
                &c.problem,
                &c.exact_p,
                &c.exact_u,
                &config.levels,
                config.tau,
                config.threads,
            )?
        }
        (CaseKind::Smooth, StudyKind::Tau) => {
            let c = SmoothTestCase::new();
            study_exact_tau(
                &c.problem,
                &c.exact_p,
                &c.exact_u,
                config.n,
                &config.tau_levels,
                config.threads,
            )?
        }
        (CaseKind::Manufactured, StudyKind::H) => {
            let c = ManufacturedTestCase::new();
            study_exact_h(
                &c.problem,
                &c.exact_p,
                &c.exact_u,
                &config.levels,
                config.tau,
                config.threads,
            )?
        }
        (CaseKind::Manufactured, StudyKind::Tau) => {
            let c = ManufacturedTestCase::new();
            study_exact_tau(
                &c.problem,
                &c.exact_p,
                &c.exact_u,
                config.n,
                &config.tau_levels,
                config.threads,
            )?
        }
        (CaseKind::Nonsmooth, StudyKind::H) => study_nonsmooth_h(
            &NonsmoothTestCase::new().problem,
            &config.levels,
            config.tau,
            config.threads,
        )?,
        (CaseKind::Nonsmooth, StudyKind::Tau) => study_nonsmooth_tau(
            &NonsmoothTestCase::new().problem,
            config.n,
            &config.tau_levels,
            config.threads,
        )?,
        (_, StudyKind::Single) => {
            return Err(Error::config(
                "study",
                "the convergence command expects study = h or study = tau",
            ))
        }
    };
    let study_name = match config.study {
        StudyKind::H => "h",
        StudyKind::Tau => "tau",
        StudyKind::Single => unreachable!(),
    };
    let csv_path = config.out.join(format!(
        "table_{}_{}.csv",
        case_name(config.case),
        study_name
    ));
    fs::write(&csv_path, table.to_csv())?;
    print!("{}", table.to_text());
    println!("table written to {}", csv_path.display());
    Ok(())
}

/// Prints mesh statistics, optionally exporting the mesh.
pub fn cmd_mesh_info(args: &MeshInfoArgs) -> Result<()> {
    let mut mesh = Arc::new(build_lshape(args.n)?);
    for _ in 0..args.refine {
        mesh = Arc::new(refine_uniform(&mesh));
    }
    mesh.validate()?;
    let (h, gamma) = mesh_stats(&mesh);
    println!(
        "level {} mesh: {} vertices, {} edges, {} triangles",
        mesh.level,
        mesh.num_vertices(),
        mesh.num_edges(),
        mesh.num_triangles()
    );
    println!(
        "h_max = {h:.6}, shape regularity gamma = {gamma:.6}, Euler characteristic = {}",
        mesh.num_vertices() as i64 - mesh.num_edges() as i64 + mesh.num_triangles() as i64
    );
    if let Some(path) = &args.vtk {
        let mut file = fs::File::create(path)?;
        write_mesh_vtk(&mut file, &mesh, None, None, "mesh")?;
        println!("mesh written to {}", path.display());
    }
    Ok(())
}

/// Dispatches a parsed command line.
pub fn main_entry(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Run(args) => cmd_run(&parse_config(args)?),
        Command::Convergence(args) => cmd_convergence(&parse_config(args)?),
        Command::MeshInfo(args) => cmd_mesh_info(args),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args_from(pairs: &str) -> ConfigArgs {
        // helper: write a config file in a temp dir and parse it
        let dir = std::env::temp_dir().join(format!(
            "mixedwave-test-{}-{}",
            std::process::id(),
            pairs.len()
        ));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("config.txt");
        fs::write(&path, pairs).unwrap();
        ConfigArgs {
            config: Some(path),
            ..Default::default()
        }
    }

    #[test]
    fn parses_table_one_configuration() {
        let args = args_from(
            "# reference configuration\ncase = smooth\nstudy = h\nlevels = 4 8 16 32\ntau = 0.001\nT = 1\n",
        );
        let config = parse_config(&args).unwrap();
        assert_eq!(config.case, CaseKind::Smooth);
        assert_eq!(config.study, StudyKind::H);
        assert_eq!(config.levels, vec![4, 8, 16, 32]);
        assert_eq!(config.nsteps, 1000);
        assert!((config.tau - 0.001).abs() < 1e-15);
        assert!((config.t_final - 1.0).abs() < 1e-15);
    }

    #[test]
    fn missing_horizon_defaults_to_one() {
        let args = args_from("case = smooth\n");
        let config = parse_config(&args).unwrap();
        assert_eq!(config.t_final, 1.0);
    }

    #[test]
    fn rejects_negative_tau() {
        let args = args_from("tau = -1\n");
        let err = parse_config(&args).unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "tau"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn rejects_unknown_keys_by_name() {
        let args = args_from("velocity = 3\n");
        let err = parse_config(&args).unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "velocity"));
    }

    #[test]
    fn rejects_non_increasing_levels() {
        let args = args_from("levels = 8 4\n");
        assert!(parse_config(&args).is_err());
    }

    #[test]
    fn deep_gate_guards_fine_levels() {
        let args = args_from("levels = 4 64\n");
        assert!(parse_config(&args).is_err());
        let args = args_from("levels = 4 64\ndeep = true\n");
        assert!(parse_config(&args).is_ok());
    }

    #[test]
    fn flags_override_file_values() {
        let mut args = args_from("tau = 0.001\nn = 4\n");
        args.tau = Some(0.01);
        args.n = Some(8);
        let config = parse_config(&args).unwrap();
        assert!((config.tau - 0.01).abs() < 1e-15);
        assert_eq!(config.n, 8);
        assert_eq!(config.nsteps, 100);
    }

    #[test]
    fn tau_levels_must_divide_horizon() {
        let args = args_from("study = tau\ntau_levels = 0.25 0.15\n");
        assert!(parse_config(&args).is_err());
        let args = args_from("study = tau\ntau_levels = 0.25 0.125\n");
        let config = parse_config(&args).unwrap();
        assert_eq!(config.tau_levels, vec![0.25, 0.125]);
        assert_eq!(config.n, 32);
    }
}
