//! Error norms, convergence-rate computation and the four study drivers.
//!
//! The error measure is the tracking norm max over recorded times of the
//! spatial L2 norm. Smooth studies compare against L2 projections of the
//! known exact solution (piecewise constants for the pressure, piecewise
//! linears for the velocity and the post-processed pressure). Non-smooth
//! studies measure the distance to the solution on the next finer mesh or
//! the next smaller time step.

use std::sync::Arc;

use crate::assembly::ProblemCoefficients;
use crate::elements::{bdm1, quadrature, AffineMap};
use crate::mesh::{build_lshape, refine_uniform, Mesh};
use crate::postprocess::{postprocess_halfstep, HalfStepContext, PostprocessedPressure};
use crate::projections::{
    diff_norm_nested, project_p0, project_p1, project_p1_nested, project_p1_vector, restrict_p0,
    FieldBDM1, FieldP0, FieldP1, FieldView, ScalarFunction, Smoothness, VectorFunction,
};
use crate::timestepper::{Simulation, SolutionState, TimeGrid, WaveProblem};
use crate::{Error, Result};

use std::f64::consts::PI;

/// One study row: (parameter, err_u, err_p, err_pt).
type StudyRow = (f64, f64, f64, f64);
/// Deferred computation of one study row.
type RowJob = Box<dyn FnOnce() -> Result<StudyRow> + Send>;

/// Smooth standing-wave benchmark: a = 2, b = 1, f = g = 0, T = 1 with
/// p(x,y,t) = sin(pi x) sin(pi y) cos(pi t) and
/// u(x,y,t) = -(cos(pi x) sin(pi y), sin(pi x) cos(pi y)) sin(pi t).
pub struct SmoothTestCase {
    pub problem: WaveProblem,
    pub exact_p: ScalarFunction,
    pub exact_u: VectorFunction,
}

impl SmoothTestCase {
    pub fn new() -> Self {
        let exact_p =
            ScalarFunction::new(|x, y, t| (PI * x).sin() * (PI * y).sin() * (PI * t).cos());
        let exact_u = VectorFunction::new(|x, y, t| {
            let s = -(PI * t).sin();
            [
                s * (PI * x).cos() * (PI * y).sin(),
                s * (PI * x).sin() * (PI * y).cos(),
            ]
        });
        let problem = WaveProblem {
            coeffs: ProblemCoefficients::constant(2.0, 1.0),
            f: ScalarFunction::zero(),
            g: VectorFunction::zero(),
            p0: ScalarFunction::new(|x, y, _| (PI * x).sin() * (PI * y).sin()),
            u0: VectorFunction::zero(),
        };
        Self {
            problem,
            exact_p,
            exact_u,
        }
    }
}

impl Default for SmoothTestCase {
    fn default() -> Self {
        Self::new()
    }
}

/// Non-smooth benchmark: same coefficients, but the initial pressure has a
/// kink along the lines x = 0 and y = 0 (which are mesh lines at every
/// level) and no closed-form solution.
pub struct NonsmoothTestCase {
    pub problem: WaveProblem,
}

impl NonsmoothTestCase {
    pub fn new() -> Self {
        let p0 = ScalarFunction::new(|x, y, _| {
            if x <= 0.0 && y <= 0.0 {
                (PI * x).sin() * (PI * y).sin()
            } else {
                0.0
            }
        })
        .with_smoothness(Smoothness::PiecewiseAxisAligned);
        let problem = WaveProblem {
            coeffs: ProblemCoefficients::constant(2.0, 1.0),
            f: ScalarFunction::zero(),
            g: VectorFunction::zero(),
            p0,
            u0: VectorFunction::zero(),
        };
        Self { problem }
    }
}

impl Default for NonsmoothTestCase {
    fn default() -> Self {
        Self::new()
    }
}

/// Manufactured solution that is linear in time: p = t P(x, y) with the
/// polynomial P = x y (1 - x^2)(1 - y^2) (zero on the whole boundary) and a
/// time-constant polynomial velocity. All assembly quadratures are exact
/// for these integrands, so the discrete evolution is exactly linear in
/// time and Crank-Nicolson reproduces it for every step size; time-step
/// studies sit at the spatial error floor.
pub struct ManufacturedTestCase {
    pub problem: WaveProblem,
    pub exact_p: ScalarFunction,
    pub exact_u: VectorFunction,
}

impl ManufacturedTestCase {
    pub fn new() -> Self {
        let p_spatial = |x: f64, y: f64| x * y * (1.0 - x * x) * (1.0 - y * y);
        let grad_p = |x: f64, y: f64| {
            [
                y * (1.0 - y * y) * (1.0 - 3.0 * x * x),
                x * (1.0 - x * x) * (1.0 - 3.0 * y * y),
            ]
        };
        let spatial_u = |x: f64, y: f64| [x * x * y, x * y * y];
        let div_u = |x: f64, y: f64| 4.0 * x * y;
        let exact_p = ScalarFunction::new(move |x, y, t| t * p_spatial(x, y));
        let exact_u = VectorFunction::new(move |x, y, _| spatial_u(x, y));
        let problem = WaveProblem {
            coeffs: ProblemCoefficients::constant(2.0, 1.0),
            // f = a dp/dt + div u, g = b du/dt + grad p with du/dt = 0.
            f: ScalarFunction::new(move |x, y, _| 2.0 * p_spatial(x, y) + div_u(x, y)),
            g: VectorFunction::new(move |x, y, t| {
                let gp = grad_p(x, y);
                [t * gp[0], t * gp[1]]
            }),
            p0: ScalarFunction::zero(),
            u0: VectorFunction::new(move |x, y, _| spatial_u(x, y)),
        };
        Self {
            problem,
            exact_p,
            exact_u,
        }
    }
}

impl Default for ManufacturedTestCase {
    fn default() -> Self {
        Self::new()
    }
}

/// Tracking norm: max over the recorded time samples.
pub fn tracking_norm(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyRecord);
    }
    Ok(values.iter().cloned().fold(f64::MIN, f64::max))
}

/// Experimental orders of convergence for consecutive rows:
/// eoc_i = log(e_{i-1} / e_i) / log(param_{i-1} / param_i).
/// Nonpositive errors produce a NaN sentinel (error below measurement floor).
pub fn eoc(errors: &[f64], params: &[f64]) -> Result<Vec<f64>> {
    if errors.len() != params.len() {
        return Err(Error::LengthMismatch {
            left: errors.len(),
            right: params.len(),
        });
    }
    if params.len() < 2
        || params.iter().any(|&p| p <= 0.0)
        || params.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::BadParameters);
    }
    Ok(errors
        .windows(2)
        .zip(params.windows(2))
        .map(|(e, p)| {
            if e[0] <= 0.0 || e[1] <= 0.0 {
                f64::NAN
            } else {
                (e[0] / e[1]).ln() / (p[0] / p[1]).ln()
            }
        })
        .collect())
}

/// One convergence table: parameter column plus three error columns.
#[derive(Clone, Debug)]
pub struct ConvergenceTable {
    pub param_name: &'static str,
    pub params: Vec<f64>,
    pub err_u: Vec<f64>,
    pub err_p: Vec<f64>,
    pub err_pt: Vec<f64>,
}

impl ConvergenceTable {
    fn rates(&self, errors: &[f64]) -> Vec<Option<f64>> {
        let mut out = vec![None; self.params.len()];
        if self.params.len() >= 2 {
            if let Ok(rates) = eoc(errors, &self.params) {
                for (i, r) in rates.into_iter().enumerate() {
                    out[i + 1] = Some(r);
                }
            }
        }
        out
    }

    pub fn eoc_u(&self) -> Vec<Option<f64>> {
        self.rates(&self.err_u)
    }

    pub fn eoc_p(&self) -> Vec<Option<f64>> {
        self.rates(&self.err_p)
    }

    pub fn eoc_pt(&self) -> Vec<Option<f64>> {
        self.rates(&self.err_pt)
    }

    /// CSV with header "param,err_u,eoc_u,err_p,eoc_p,err_pt,eoc_pt";
    /// eoc cells of the first row are empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("param,err_u,eoc_u,err_p,eoc_p,err_pt,eoc_pt\n");
        let fmt_rate = |r: Option<f64>| match r {
            Some(v) if v.is_nan() => "nan".to_string(),
            Some(v) => format!("{v:.2}"),
            None => String::new(),
        };
        let (eu, ep, ept) = (self.eoc_u(), self.eoc_p(), self.eoc_pt());
        for i in 0..self.params.len() {
            out.push_str(&format!(
                "{},{:.6e},{},{:.6e},{},{:.6e},{}\n",
                self.params[i],
                self.err_u[i],
                fmt_rate(eu[i]),
                self.err_p[i],
                fmt_rate(ep[i]),
                self.err_pt[i],
                fmt_rate(ept[i]),
            ));
        }
        out
    }

    /// Aligned plain-text rendering for terminals.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:>10}  {:>12} {:>6}  {:>12} {:>6}  {:>12} {:>6}\n",
            self.param_name, "err_u", "eoc", "err_p", "eoc", "err_pt", "eoc"
        );
        let fmt_rate = |r: Option<f64>| match r {
            Some(v) if v.is_nan() => "  nan".to_string(),
            Some(v) => format!("{v:5.2}"),
            None => "    -".to_string(),
        };
        let (eu, ep, ept) = (self.eoc_u(), self.eoc_p(), self.eoc_pt());
        for i in 0..self.params.len() {
            out.push_str(&format!(
                "{:>10.6} {:>13.6} {:>6}  {:>12.6} {:>6}  {:>12.6} {:>6}\n",
                self.params[i],
                self.err_u[i],
                fmt_rate(eu[i]),
                self.err_p[i],
                fmt_rate(ep[i]),
                self.err_pt[i],
                fmt_rate(ept[i]),
            ));
        }
        out
    }
}

/// L2 norm of the difference of two same-mesh P0 fields.
pub fn l2_diff_p0(a: &FieldP0, b: &FieldP0) -> f64 {
    debug_assert!(Arc::ptr_eq(&a.mesh, &b.mesh));
    let mut total = 0.0;
    for k in 0..a.mesh.num_triangles() {
        let d = a.coeffs[k] - b.coeffs[k];
        total += a.mesh.tri_area(k) * d * d;
    }
    total.sqrt()
}

/// L2 norm of the difference of two same-mesh P1 fields (degree-6 rule,
/// exact for the quadratic integrand).
pub fn l2_diff_p1(a: &FieldP1, b: &FieldP1) -> f64 {
    debug_assert!(Arc::ptr_eq(&a.mesh, &b.mesh));
    let rule = quadrature(6).expect("builtin rule");
    let mut total = 0.0;
    for k in 0..a.mesh.num_triangles() {
        let map = AffineMap::from_triangle(a.mesh.tri_coords(k)).expect("valid mesh");
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let x = map.to_physical(*p);
            let d = a.eval(k, x[0], x[1]) - b.eval(k, x[0], x[1]);
            total += w * map.det * d * d;
        }
    }
    total.sqrt()
}

/// L2 norm of (projected vector field - BDM field) on one mesh.
pub fn l2_diff_p1vec_bdm(px: &FieldP1, py: &FieldP1, u: &FieldBDM1) -> f64 {
    let mesh = &px.mesh;
    debug_assert!(Arc::ptr_eq(mesh, u.mesh()));
    let rule = quadrature(6).expect("builtin rule");
    let basis = bdm1();
    let ref_vals: Vec<[[f64; 2]; 6]> = rule.points.iter().map(|p| basis.eval(*p).0).collect();
    let mut total = 0.0;
    for k in 0..mesh.num_triangles() {
        let map = AffineMap::from_triangle(mesh.tri_coords(k)).expect("valid mesh");
        let c = u.local_coeffs(k);
        for (qi, w) in rule.weights.iter().enumerate() {
            let x = map.to_physical(rule.points[qi]);
            let mut v = [0.0, 0.0];
            for loc in 0..6 {
                v[0] += c[loc] * ref_vals[qi][loc][0];
                v[1] += c[loc] * ref_vals[qi][loc][1];
            }
            let v = map.piola(v);
            let dx = px.eval(k, x[0], x[1]) - v[0];
            let dy = py.eval(k, x[0], x[1]) - v[1];
            total += w * map.det * (dx * dx + dy * dy);
        }
    }
    total.sqrt()
}

/// Per-step error records of a smooth-case run against the projected exact
/// solution. The post-processed pressure is compared at half steps.
struct SmoothErrors {
    err_u: Vec<f64>,
    err_p: Vec<f64>,
    err_pt: Vec<f64>,
}

fn record_smooth_errors(
    case_p: &ScalarFunction,
    case_u: &VectorFunction,
    problem: &WaveProblem,
    mesh: &Arc<Mesh>,
    grid: TimeGrid,
) -> Result<SmoothErrors> {
    let mut sim = Simulation::new(problem.clone(), mesh, grid)?;
    let mut errors = SmoothErrors {
        err_u: Vec::with_capacity(grid.nsteps + 1),
        err_p: Vec::with_capacity(grid.nsteps + 1),
        err_pt: Vec::with_capacity(grid.nsteps),
    };
    let record_nodes = |state: &SolutionState, errors: &mut SmoothErrors| {
        let (px, py) = project_p1_vector(case_u, state.time, mesh);
        errors.err_u.push(l2_diff_p1vec_bdm(&px, &py, &state.u));
        let pp = project_p0(case_p, state.time, mesh);
        errors.err_p.push(l2_diff_p0(&pp, &state.p));
    };
    record_nodes(sim.state(), &mut errors);
    while !sim.is_done() {
        let prev = sim.state().clone();
        sim.advance()?;
        let next = sim.state();
        record_nodes(next, &mut errors);
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
        let reference = project_p1(case_p, ptilde.time, mesh);
        errors.err_pt.push(l2_diff_p1(&reference, &ptilde.field));
    }
    Ok(errors)
}

/// Runs independent jobs with at most `threads` worker threads, preserving
/// the job order in the results.
fn run_rows<T: Send>(
    jobs: Vec<Box<dyn FnOnce() -> Result<T> + Send>>,
    threads: usize,
) -> Result<Vec<T>> {
    let threads = threads.max(1);
    if threads == 1 {
        return jobs.into_iter().map(|job| job()).collect();
    }
    let mut results: Vec<Option<Result<T>>> = Vec::new();
    for _ in 0..jobs.len() {
        results.push(None);
    }
    let mut jobs: Vec<Option<_>> = jobs.into_iter().map(Some).collect();
    for chunk_start in (0..jobs.len()).step_by(threads) {
        let chunk_end = (chunk_start + threads).min(jobs.len());
        let (jobs_chunk, results_chunk) = {
            let jobs_slice = &mut jobs[chunk_start..chunk_end];
            let results_slice = &mut results[chunk_start..chunk_end];
            (jobs_slice, results_slice)
        };
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for job in jobs_chunk.iter_mut() {
                let job = job.take().unwrap();
                handles.push(scope.spawn(job));
            }
            for (slot, handle) in results_chunk.iter_mut().zip(handles) {
                *slot = Some(handle.join().expect("study row panicked"));
            }
        });
    }
    results.into_iter().map(|r| r.unwrap()).collect()
}

/// Mesh-refinement study against the projected exact solution of `problem`.
pub fn study_exact_h(
    problem: &WaveProblem,
    exact_p: &ScalarFunction,
    exact_u: &VectorFunction,
    levels: &[usize],
    tau: f64,
    threads: usize,
) -> Result<ConvergenceTable> {
    let jobs: Vec<RowJob> = levels
        .iter()
        .map(|&n| {
            let problem = problem.clone();
            let exact_p = exact_p.clone();
            let exact_u = exact_u.clone();
            Box::new(move || {
                let mesh = Arc::new(build_lshape(n)?);
                let grid = TimeGrid::from_tau(1.0, tau)?;
                let errors = record_smooth_errors(&exact_p, &exact_u, &problem, &mesh, grid)?;
                Ok((
                    1.0 / n as f64,
                    tracking_norm(&errors.err_u)?,
                    tracking_norm(&errors.err_p)?,
                    tracking_norm(&errors.err_pt)?,
                ))
            }) as RowJob
        })
        .collect();
    let rows = run_rows(jobs, threads)?;
    Ok(ConvergenceTable {
        param_name: "h",
        params: rows.iter().map(|r| r.0).collect(),
        err_u: rows.iter().map(|r| r.1).collect(),
        err_p: rows.iter().map(|r| r.2).collect(),
        err_pt: rows.iter().map(|r| r.3).collect(),
    })
}

/// Time-step study against the projected exact solution on a fixed mesh.
pub fn study_exact_tau(
    problem: &WaveProblem,
    exact_p: &ScalarFunction,
    exact_u: &VectorFunction,
    n_fixed: usize,
    tau_levels: &[f64],
    threads: usize,
) -> Result<ConvergenceTable> {
    let jobs: Vec<RowJob> = tau_levels
        .iter()
        .map(|&tau| {
            let problem = problem.clone();
            let exact_p = exact_p.clone();
            let exact_u = exact_u.clone();
            Box::new(move || {
                let mesh = Arc::new(build_lshape(n_fixed)?);
                let grid = TimeGrid::from_tau(1.0, tau)?;
                let errors = record_smooth_errors(&exact_p, &exact_u, &problem, &mesh, grid)?;
                Ok((
                    tau,
                    tracking_norm(&errors.err_u)?,
                    tracking_norm(&errors.err_p)?,
                    tracking_norm(&errors.err_pt)?,
                ))
            }) as RowJob
        })
        .collect();
    let rows = run_rows(jobs, threads)?;
    Ok(ConvergenceTable {
        param_name: "tau",
        params: rows.iter().map(|r| r.0).collect(),
        err_u: rows.iter().map(|r| r.1).collect(),
        err_p: rows.iter().map(|r| r.2).collect(),
        err_pt: rows.iter().map(|r| r.3).collect(),
    })
}

/// Mesh-refinement study for the smooth benchmark (reference experiment).
pub fn study_smooth_h(levels: &[usize], tau: f64, threads: usize) -> Result<ConvergenceTable> {
    let case = SmoothTestCase::new();
    study_exact_h(
        &case.problem,
        &case.exact_p,
        &case.exact_u,
        levels,
        tau,
        threads,
    )
}

/// Time-step study for the smooth benchmark on a fixed mesh.
pub fn study_smooth_tau(
    n_fixed: usize,
    tau_levels: &[f64],
    threads: usize,
) -> Result<ConvergenceTable> {
    let case = SmoothTestCase::new();
    study_exact_tau(
        &case.problem,
        &case.exact_p,
        &case.exact_u,
        n_fixed,
        tau_levels,
        threads,
    )
}

/// Builds the half-step reconstruction for a step of one simulation.
fn reconstruct(
    prev: &SolutionState,
    next: &SolutionState,
    tau: f64,
    problem: &WaveProblem,
) -> Result<PostprocessedPressure> {
    let ctx = HalfStepContext {
        u_prev: &prev.u,
        u_next: &next.u,
        p_prev: &prev.p,
        p_next: &next.p,
        tau,
        t_prev: prev.time,
        t_next: next.time,
        g: &problem.g,
    };
    postprocess_halfstep(&ctx, &problem.coeffs.b)
}

/// Mesh-refinement study without an exact solution: each row runs the case
/// on the level mesh and on its uniform refinement with the same time step
/// and records the distance between the two solutions.
pub fn study_nonsmooth_h(
    problem: &WaveProblem,
    levels: &[usize],
    tau: f64,
    threads: usize,
) -> Result<ConvergenceTable> {
    let jobs: Vec<RowJob> = levels
        .iter()
        .map(|&n| {
            let problem = problem.clone();
            Box::new(move || {
                let coarse = Arc::new(build_lshape(n)?);
                let fine = Arc::new(refine_uniform(&coarse));
                let grid = TimeGrid::from_tau(1.0, tau)?;
                let mut sim_c = Simulation::new(problem.clone(), &coarse, grid)?;
                let mut sim_f = Simulation::new(problem.clone(), &fine, grid)?;
                let mut err_u = Vec::with_capacity(grid.nsteps + 1);
                let mut err_p = Vec::with_capacity(grid.nsteps + 1);
                let mut err_pt = Vec::with_capacity(grid.nsteps);
                let record_nodes = |c: &SolutionState,
                                    f: &SolutionState,
                                    err_u: &mut Vec<f64>,
                                    err_p: &mut Vec<f64>|
                 -> Result<()> {
                    err_u.push(diff_norm_nested(
                        FieldView::Bdm(&f.u),
                        FieldView::Bdm(&c.u),
                    )?);
                    let restricted = restrict_p0(&f.p, &coarse)?;
                    err_p.push(l2_diff_p0(&restricted, &c.p));
                    Ok(())
                };
                record_nodes(sim_c.state(), sim_f.state(), &mut err_u, &mut err_p)?;
                while !sim_c.is_done() {
                    let prev_c = sim_c.state().clone();
                    let prev_f = sim_f.state().clone();
                    sim_c.advance()?;
                    sim_f.advance()?;
                    record_nodes(sim_c.state(), sim_f.state(), &mut err_u, &mut err_p)?;
                    let pt_c = reconstruct(&prev_c, sim_c.state(), grid.tau(), &problem)?;
                    let pt_f = reconstruct(&prev_f, sim_f.state(), grid.tau(), &problem)?;
                    let projected = project_p1_nested(&pt_f.field, &coarse)?;
                    err_pt.push(l2_diff_p1(&projected, &pt_c.field));
                }
                Ok((
                    1.0 / n as f64,
                    tracking_norm(&err_u)?,
                    tracking_norm(&err_p)?,
                    tracking_norm(&err_pt)?,
                ))
            }) as RowJob
        })
        .collect();
    let rows = run_rows(jobs, threads)?;
    Ok(ConvergenceTable {
        param_name: "h",
        params: rows.iter().map(|r| r.0).collect(),
        err_u: rows.iter().map(|r| r.1).collect(),
        err_p: rows.iter().map(|r| r.2).collect(),
        err_pt: rows.iter().map(|r| r.3).collect(),
    })
}

/// Time-step study without an exact solution: each row compares the run at
/// tau with the run at tau/2 on the same mesh. Pressure and velocity are
/// compared at coincident full steps; the post-processed pressures live on
/// staggered half-step grids, so each coarse half step is compared against
/// the average of the two adjacent fine reconstructions.
pub fn study_nonsmooth_tau(
    problem: &WaveProblem,
    n_fixed: usize,
    tau_levels: &[f64],
    threads: usize,
) -> Result<ConvergenceTable> {
    let jobs: Vec<RowJob> = tau_levels
        .iter()
        .map(|&tau| {
            let problem = problem.clone();
            Box::new(move || {
                let mesh = Arc::new(build_lshape(n_fixed)?);
                let grid_c = TimeGrid::from_tau(1.0, tau)?;
                let grid_f = TimeGrid::from_tau(1.0, tau / 2.0)?;
                let mut sim_c = Simulation::new(problem.clone(), &mesh, grid_c)?;
                let mut sim_f = Simulation::new(problem.clone(), &mesh, grid_f)?;
                let mut err_u = vec![0.0];
                let mut err_p = vec![0.0];
                let mut err_pt = Vec::with_capacity(grid_c.nsteps);
                while !sim_c.is_done() {
                    let prev_c = sim_c.state().clone();
                    sim_c.advance()?;
                    let prev_f1 = sim_f.state().clone();
                    sim_f.advance()?;
                    let mid_f = sim_f.state().clone();
                    let pt_f1 = reconstruct(&prev_f1, &mid_f, grid_f.tau(), &problem)?;
                    sim_f.advance()?;
                    let pt_f2 = reconstruct(&mid_f, sim_f.state(), grid_f.tau(), &problem)?;
                    err_u.push(diff_norm_nested(
                        FieldView::Bdm(&sim_f.state().u),
                        FieldView::Bdm(&sim_c.state().u),
                    )?);
                    err_p.push(l2_diff_p0(&sim_f.state().p, &sim_c.state().p));
                    let pt_c = reconstruct(&prev_c, sim_c.state(), grid_c.tau(), &problem)?;
                    let averaged = FieldP1 {
                        mesh: Arc::clone(&mesh),
                        coeffs: pt_f1
                            .field
                            .coeffs
                            .iter()
                            .zip(&pt_f2.field.coeffs)
                            .map(|(a, b)| 0.5 * (a + b))
                            .collect(),
                    };
                    err_pt.push(l2_diff_p1(&averaged, &pt_c.field));
                }
                Ok((
                    tau,
                    tracking_norm(&err_u)?,
                    tracking_norm(&err_p)?,
                    tracking_norm(&err_pt)?,
                ))
            }) as RowJob
        })
        .collect();
    let rows = run_rows(jobs, threads)?;
    Ok(ConvergenceTable {
        param_name: "tau",
        params: rows.iter().map(|r| r.0).collect(),
        err_u: rows.iter().map(|r| r.1).collect(),
        err_p: rows.iter().map(|r| r.2).collect(),
        err_pt: rows.iter().map(|r| r.3).collect(),
    })
}
