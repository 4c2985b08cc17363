//! Crank-Nicolson time integration with a factor-once step operator.
//!
//! One step solves the block system
//!
//! ```text
//!   [ M_a / tau    D / 2   ] [p]   [rhs_p]
//!   [ -D^T / 2     M_b/tau ] [u] = [rhs_u]
//! ```
//!
//! for the new state. Since M_a is diagonal, the pressure is eliminated
//! exactly and the velocity solves the symmetric positive definite Schur
//! system S = M_b/tau + (tau/4) D^T M_a^-1 D, factorized once per
//! (mesh, tau) pair with a sparse Cholesky decomposition. Every solve is
//! verified against the block residual contract and refined if necessary.

use std::sync::Arc;
use std::sync::Once;

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};

use crate::assembly::{
    assemble_div, assemble_load_bdm1, assemble_load_p0, assemble_mass_bdm1, assemble_mass_p0,
    ProblemCoefficients, SparseMatrix,
};
use crate::elements::{build_dofmap, DofMap};
use crate::mesh::Mesh;
use crate::projections::{
    interpolate_bdm1, project_p0, FieldBDM1, FieldP0, ScalarFunction, VectorFunction,
};
use crate::{Error, Result};

/// Relative block residual required of every solve.
pub const RESIDUAL_CONTRACT: f64 = 1e-11;
/// Internal refinement target, tighter than the contract.
const RESIDUAL_TARGET: f64 = 1e-13;

fn sequential_faer() {
    static INIT: Once = Once::new();
    INIT.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

/// Uniform time grid on [0, T].
#[derive(Clone, Copy, Debug)]
pub struct TimeGrid {
    pub t_final: f64,
    pub nsteps: usize,
}

impl TimeGrid {
    pub fn new(t_final: f64, nsteps: usize) -> Result<Self> {
        if nsteps == 0 || !(t_final > 0.0) {
            return Err(Error::config(
                "T",
                "time horizon and step count must be positive",
            ));
        }
        Ok(Self { t_final, nsteps })
    }

    /// Grid with step count rounded from `tau`; `tau` must divide T to
    /// within 1e-12.
    pub fn from_tau(t_final: f64, tau: f64) -> Result<Self> {
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
        Self::new(t_final, nsteps)
    }

    pub fn tau(&self) -> f64 {
        self.t_final / self.nsteps as f64
    }

    /// Time node t^n.
    pub fn node(&self, n: usize) -> f64 {
        n as f64 * self.tau()
    }

    /// Intermediate time t^{n-1/2}.
    pub fn half(&self, n: usize) -> f64 {
        (n as f64 - 0.5) * self.tau()
    }
}

/// Discrete solution snapshot.
#[derive(Clone)]
pub struct SolutionState {
    pub step: usize,
    pub time: f64,
    pub p: FieldP0,
    pub u: FieldBDM1,
}

/// Projects the initial data: p from the P0 projection, u from the BDM1
/// interpolation.
pub fn init_state(p0: &ScalarFunction, u0: &VectorFunction, dofmap: &Arc<DofMap>) -> SolutionState {
    SolutionState {
        step: 0,
        time: 0.0,
        p: project_p0(p0, 0.0, &dofmap.mesh),
        u: interpolate_bdm1(u0, 0.0, dofmap),
    }
}

/// Factorized Crank-Nicolson step matrix, reusable across all steps.
pub struct LinearStepOperator {
    dofmap: Arc<DofMap>,
    tau: f64,
    ma_diag: Vec<f64>,
    mb: Arc<SparseMatrix>,
    d: Arc<SparseMatrix>,
    llt: faer::sparse::linalg::solvers::Llt<usize, f64>,
}

/// Builds and factorizes the step operator for time step `tau` (negative
/// values integrate backwards; the Schur matrix of |tau| is factorized and
/// the sign handled during solves).
pub fn build_step_operator(
    ma: &SparseMatrix,
    mb: &Arc<SparseMatrix>,
    d: &Arc<SparseMatrix>,
    tau: f64,
    dofmap: &Arc<DofMap>,
) -> Result<LinearStepOperator> {
    if tau == 0.0 || !tau.is_finite() {
        return Err(Error::SingularSystem("time step must be nonzero".into()));
    }
    sequential_faer();
    let n = dofmap.num_bdm;
    let mut ma_diag = vec![0.0; dofmap.num_p0];
    for (k, v) in ma_diag.iter_mut().enumerate() {
        *v = ma.get(k, k);
        if *v <= 0.0 {
            return Err(Error::SingularSystem(format!(
                "pressure mass diagonal entry {k} is not positive"
            )));
        }
    }
    let abs_tau = tau.abs();
    // S = M_b/|tau| + (|tau|/4) D^T M_a^-1 D; the second term assembles from
    // the per-row outer products of D.
    let mut triplets = Vec::with_capacity(mb.nnz() + 36 * dofmap.num_p0);
    for r in 0..mb.nrows {
        for idx in mb.row_ptr[r]..mb.row_ptr[r + 1] {
            triplets.push(Triplet::new(r, mb.col_idx[idx], mb.values[idx] / abs_tau));
        }
    }
    for k in 0..d.nrows {
        let row = d.row_ptr[k]..d.row_ptr[k + 1];
        let scale = abs_tau / (4.0 * ma_diag[k]);
        for i in row.clone() {
            for j in row.clone() {
                triplets.push(Triplet::new(
                    d.col_idx[i],
                    d.col_idx[j],
                    scale * d.values[i] * d.values[j],
                ));
            }
        }
    }
    let schur = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::SingularSystem(format!("Schur matrix assembly failed: {e:?}")))?;
    let llt = schur
        .as_ref()
        .sp_cholesky(faer::Side::Lower)
        .map_err(|e| Error::SingularSystem(format!("Cholesky factorization failed: {e:?}")))?;
    Ok(LinearStepOperator {
        dofmap: Arc::clone(dofmap),
        tau,
        ma_diag,
        mb: Arc::clone(mb),
        d: Arc::clone(d),
        llt,
    })
}

impl LinearStepOperator {
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn dofmap(&self) -> &Arc<DofMap> {
        &self.dofmap
    }

    /// Applies S(tau) x = M_b x / tau + (tau/4) D^T M_a^-1 (D x).
    fn apply_schur(&self, x: &[f64], out: &mut [f64], work_p: &mut [f64]) {
        self.mb.matvec(x, out);
        for v in out.iter_mut() {
            *v /= self.tau;
        }
        self.d.matvec(x, work_p);
        for (k, v) in work_p.iter_mut().enumerate() {
            *v *= self.tau / (4.0 * self.ma_diag[k]);
        }
        let mut dt = vec![0.0; x.len()];
        self.d.matvec_transpose(work_p, &mut dt);
        for (o, dv) in out.iter_mut().zip(&dt) {
            *o += dv;
        }
    }

    /// Solves the coupled block system for (p, u) given the right hand
    /// sides, enforcing the residual contract.
    pub fn solve(&self, rhs_p: &[f64], rhs_u: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let np = rhs_p.len();
        let nu = rhs_u.len();
        let sign = self.tau.signum();

        // Schur right hand side: rhs_u + (tau/2) D^T M_a^-1 rhs_p.
        let mut scaled_p: Vec<f64> = rhs_p
            .iter()
            .zip(&self.ma_diag)
            .map(|(r, m)| self.tau / 2.0 * r / m)
            .collect();
        let mut schur_rhs = vec![0.0; nu];
        self.d.matvec_transpose(&scaled_p, &mut schur_rhs);
        for (s, r) in schur_rhs.iter_mut().zip(rhs_u) {
            *s += r;
        }

        // Factorization is of S(|tau|) = sign * S(tau).
        let mut u: Vec<f64> = schur_rhs.iter().map(|r| sign * r).collect();
        self.llt
            .solve_in_place(faer::MatMut::from_column_major_slice_mut(&mut u, nu, 1));

        // Iterative refinement on the Schur system.
        let rhs_norm = norm2(&schur_rhs).max(1e-300);
        let mut work = vec![0.0; nu];
        for _ in 0..4 {
            self.apply_schur(&u, &mut work, &mut scaled_p);
            let mut res: Vec<f64> = schur_rhs.iter().zip(&work).map(|(r, s)| r - s).collect();
            if norm2(&res) / rhs_norm <= RESIDUAL_TARGET {
                break;
            }
            for r in res.iter_mut() {
                *r *= sign;
            }
            self.llt
                .solve_in_place(faer::MatMut::from_column_major_slice_mut(&mut res, nu, 1));
            for (uv, dv) in u.iter_mut().zip(&res) {
                *uv += dv;
            }
        }

        // Exact pressure elimination: p = tau M_a^-1 (rhs_p - (1/2) D u).
        let mut du = vec![0.0; np];
        self.d.matvec(&u, &mut du);
        let p: Vec<f64> = (0..np)
            .map(|k| self.tau / self.ma_diag[k] * (rhs_p[k] - 0.5 * du[k]))
            .collect();

        // Residual contract on the full block system.
        let mut res_p = vec![0.0; np];
        for k in 0..np {
            res_p[k] = self.ma_diag[k] / self.tau * p[k] + 0.5 * du[k] - rhs_p[k];
        }
        let mut res_u = vec![0.0; nu];
        self.mb.matvec(&u, &mut res_u);
        let mut dtp = vec![0.0; nu];
        self.d.matvec_transpose(&p, &mut dtp);
        for i in 0..nu {
            res_u[i] = res_u[i] / self.tau - 0.5 * dtp[i] - rhs_u[i];
        }
        let rhs_total = (norm2(rhs_p).powi(2) + norm2(rhs_u).powi(2)).sqrt();
        let res_total = (norm2(&res_p).powi(2) + norm2(&res_u).powi(2)).sqrt();
        let relative = if rhs_total == 0.0 {
            0.0
        } else {
            res_total / rhs_total
        };
        if relative > RESIDUAL_CONTRACT {
            return Err(Error::ResidualContract { residual: relative });
        }
        Ok((p, u))
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// One Crank-Nicolson step with precomputed midpoint load vectors.
pub fn step_with_loads(
    op: &LinearStepOperator,
    state: &SolutionState,
    load_p_half: &[f64],
    load_u_half: &[f64],
) -> Result<SolutionState> {
    let tau = op.tau;
    let np = op.ma_diag.len();
    let nu = op.mb.nrows;

    let mut rhs_p = vec![0.0; np];
    op.d.matvec(&state.u.coeffs, &mut rhs_p);
    for k in 0..np {
        rhs_p[k] = load_p_half[k] + op.ma_diag[k] / tau * state.p.coeffs[k] - 0.5 * rhs_p[k];
    }
    let mut rhs_u = vec![0.0; nu];
    op.mb.matvec(&state.u.coeffs, &mut rhs_u);
    let mut dtp = vec![0.0; nu];
    op.d.matvec_transpose(&state.p.coeffs, &mut dtp);
    for i in 0..nu {
        rhs_u[i] = load_u_half[i] + rhs_u[i] / tau + 0.5 * dtp[i];
    }

    let (p, u) = op.solve(&rhs_p, &rhs_u)?;
    Ok(SolutionState {
        step: state.step + 1,
        time: state.time + tau,
        p: FieldP0 {
            mesh: Arc::clone(&state.p.mesh),
            coeffs: p,
        },
        u: FieldBDM1 {
            dofmap: Arc::clone(&state.u.dofmap),
            coeffs: u,
        },
    })
}

/// One Crank-Nicolson step; the midpoint loads use the average of the
/// endpoint evaluations f^{n-1/2} = (f(t^n) + f(t^{n-1})) / 2.
pub fn step(
    op: &LinearStepOperator,
    state: &SolutionState,
    f: &ScalarFunction,
    g: &VectorFunction,
) -> Result<SolutionState> {
    let dofmap = &op.dofmap;
    let t_prev = state.time;
    let t_next = state.time + op.tau;
    let average = |a: Vec<f64>, b: Vec<f64>| -> Vec<f64> {
        a.into_iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect()
    };
    let load_p = average(
        assemble_load_p0(f, t_prev, dofmap),
        assemble_load_p0(f, t_next, dofmap),
    );
    let load_u = average(
        assemble_load_bdm1(g, t_prev, dofmap),
        assemble_load_bdm1(g, t_next, dofmap),
    );
    step_with_loads(op, state, &load_p, &load_u)
}

/// Problem data for one wave simulation.
#[derive(Clone)]
pub struct WaveProblem {
    pub coeffs: ProblemCoefficients,
    pub f: ScalarFunction,
    pub g: VectorFunction,
    pub p0: ScalarFunction,
    pub u0: VectorFunction,
}

/// Observer invoked after every completed step.
pub trait StepObserver {
    /// Called once with the initial state before stepping starts.
    fn on_start(&mut self, _initial: &SolutionState) {}
    /// Called after each step with the previous and the new state.
    fn on_step(&mut self, prev: &SolutionState, next: &SolutionState, tau: f64);
}

/// Assembled simulation with its factorized step operator and load cache.
pub struct Simulation {
    dofmap: Arc<DofMap>,
    grid: TimeGrid,
    ma: Arc<SparseMatrix>,
    mb: Arc<SparseMatrix>,
    d: Arc<SparseMatrix>,
    op: LinearStepOperator,
    state: SolutionState,
    problem: WaveProblem,
    load_p_prev: Vec<f64>,
    load_u_prev: Vec<f64>,
}

impl Simulation {
    pub fn new(problem: WaveProblem, mesh: &Arc<Mesh>, grid: TimeGrid) -> Result<Self> {
        let dofmap = Arc::new(build_dofmap(mesh));
        let ma = Arc::new(assemble_mass_p0(&problem.coeffs, &dofmap)?);
        let mb = Arc::new(assemble_mass_bdm1(&problem.coeffs, &dofmap)?);
        let d = Arc::new(assemble_div(&dofmap));
        let op = build_step_operator(&ma, &mb, &d, grid.tau(), &dofmap)?;
        let state = init_state(&problem.p0, &problem.u0, &dofmap);
        let load_p_prev = assemble_load_p0(&problem.f, 0.0, &dofmap);
        let load_u_prev = assemble_load_bdm1(&problem.g, 0.0, &dofmap);
        Ok(Self {
            dofmap,
            grid,
            ma,
            mb,
            d,
            op,
            state,
            problem,
            load_p_prev,
            load_u_prev,
        })
    }

    pub fn dofmap(&self) -> &Arc<DofMap> {
        &self.dofmap
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn mass_p0(&self) -> &Arc<SparseMatrix> {
        &self.ma
    }

    pub fn mass_bdm1(&self) -> &Arc<SparseMatrix> {
        &self.mb
    }

    pub fn divergence(&self) -> &Arc<SparseMatrix> {
        &self.d
    }

    pub fn problem(&self) -> &WaveProblem {
        &self.problem
    }

    pub fn state(&self) -> &SolutionState {
        &self.state
    }

    pub fn is_done(&self) -> bool {
        self.state.step >= self.grid.nsteps
    }

    /// Discrete energy (M_a p, p) + (M_b u, u) of the current state.
    pub fn energy(&self) -> f64 {
        energy(&self.ma, &self.mb, &self.state)
    }

    /// Advances by one step, reusing cached endpoint loads.
    pub fn advance(&mut self) -> Result<()> {
        let t_next = self.grid.node(self.state.step + 1);
        let load_p_next = assemble_load_p0(&self.problem.f, t_next, &self.dofmap);
        let load_u_next = assemble_load_bdm1(&self.problem.g, t_next, &self.dofmap);
        let load_p_half: Vec<f64> = self
            .load_p_prev
            .iter()
            .zip(&load_p_next)
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        let load_u_half: Vec<f64> = self
            .load_u_prev
            .iter()
            .zip(&load_u_next)
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        self.state = step_with_loads(&self.op, &self.state, &load_p_half, &load_u_half)?;
        self.load_p_prev = load_p_next;
        self.load_u_prev = load_u_next;
        Ok(())
    }
}

/// Discrete energy (M_a p, p) + (M_b u, u).
pub fn energy(ma: &SparseMatrix, mb: &SparseMatrix, state: &SolutionState) -> f64 {
    let mut tmp = vec![0.0; ma.nrows];
    ma.matvec(&state.p.coeffs, &mut tmp);
    let ep: f64 = tmp.iter().zip(&state.p.coeffs).map(|(a, b)| a * b).sum();
    let mut tmp = vec![0.0; mb.nrows];
    mb.matvec(&state.u.coeffs, &mut tmp);
    let eu: f64 = tmp.iter().zip(&state.u.coeffs).map(|(a, b)| a * b).sum();
    ep + eu
}

/// Runs the full time integration, invoking the observers after each step.
pub fn run(
    problem: &WaveProblem,
    mesh: &Arc<Mesh>,
    grid: TimeGrid,
    observers: &mut [&mut dyn StepObserver],
) -> Result<SolutionState> {
    let mut sim = Simulation::new(problem.clone(), mesh, grid)?;
    for obs in observers.iter_mut() {
        obs.on_start(sim.state());
    }
    while !sim.is_done() {
        let prev = sim.state().clone();
        sim.advance()?;
        for obs in observers.iter_mut() {
            obs.on_step(&prev, sim.state(), grid.tau());
        }
    }
    Ok(sim.state().clone())
}
