//! Implicit-explicit time integration: Crank-Nicolson for the diffusion
//! operator, second-order Adams-Bashforth for the reaction (explicit Euler
//! on the first step). The Helmholtz-type system (M - dt/2 L) u = rhs is
//! factored once per run with a sparse LU and reused every step.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::SparseColMat;
use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::mesh::{ScalarField, SurfaceMesh};

use super::operator::LdgOperator;
use super::reaction::{ap_reaction, ApParams};
use super::ApState;

/// Time-stepping configuration.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_final: f64,
    pub flux: super::FluxParams,
    /// Times at which snapshots of u are recorded.
    pub snapshot_times: Vec<f64>,
    /// Disable the reaction for pure-diffusion runs.
    pub reaction_enabled: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 0.01,
            t_final: 1.0,
            flux: super::FluxParams::default(),
            snapshot_times: Vec::new(),
            reaction_enabled: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !(self.t_final >= 0.0) {
            return Err(Error::Config(format!(
                "dt = {} and t_final = {} must be positive",
                self.dt, self.t_final
            )));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

/// Reusable IMEX stepper holding the factored implicit system and the
/// modal state of the membrane potential.
pub struct ImexStepper<'a> {
    op: LdgOperator<'a>,
    lu: Lu<usize, f64>,
    params: ApParams,
    pub config: SolverConfig,
    uc: Vec<DVector<f64>>,
    pub u_pts: ScalarField,
    pub v: ScalarField,
    pub t: f64,
    pub step: usize,
    prev_reaction: Option<(ScalarField, ScalarField)>,
    pub guard_events: usize,
}

impl<'a> ImexStepper<'a> {
    pub fn new(
        mesh: &'a SurfaceMesh,
        dframes: &super::DFrames,
        params: ApParams,
        config: SolverConfig,
        state: ApState,
    ) -> Result<Self> {
        params.validate()?;
        config.validate()?;
        mesh.check_field_len(state.u.len())?;
        let op = LdgOperator::new(mesh, dframes, config.flux)?;

        let n = op.n_modal();
        let trips = op.assemble_helmholtz(0.5 * config.dt);
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trips)
            .map_err(|e| Error::Solver(format!("failed to assemble implicit matrix: {e:?}")))?;
        let symbolic = SymbolicLu::try_new(mat.symbolic())
            .map_err(|e| Error::Solver(format!("symbolic factorization failed: {e:?}")))?;
        let lu = Lu::try_new_with_symbolic(symbolic, mat.as_ref())
            .map_err(|e| Error::Solver(format!("numeric factorization failed: {e:?}")))?;

        let uc = op.to_modal(&state.u);
        let u_pts = op.to_points(&uc);
        Ok(ImexStepper {
            op,
            lu,
            params,
            config,
            uc,
            u_pts,
            v: state.v,
            t: state.t,
            step: state.step,
            prev_reaction: None,
            guard_events: 0,
        })
    }

    pub fn operator(&self) -> &LdgOperator<'a> {
        &self.op
    }

    pub fn state(&self) -> ApState {
        ApState {
            u: self.u_pts.clone(),
            v: self.v.clone(),
            t: self.t,
            step: self.step,
        }
    }

    /// Advance one step. Returns the previous membrane potential so callers
    /// can form du/dt by backward difference.
    pub fn advance(&mut self) -> Result<ScalarField> {
        let dt = self.config.dt;
        let (r_du, r_dv) = if self.config.reaction_enabled {
            let r = ap_reaction(&self.u_pts, &self.v, &self.params);
            self.guard_events += r.guarded;
            (r.du, r.dv)
        } else {
            (
                ScalarField::zeros(self.u_pts.len()),
                ScalarField::zeros(self.u_pts.len()),
            )
        };

        // Adams-Bashforth 2 weights (Euler on the first step)
        let (c_now, c_prev) = if self.prev_reaction.is_some() {
            (1.5, -0.5)
        } else {
            (1.0, 0.0)
        };

        let mut expl_u = ScalarField::zeros(self.u_pts.len());
        for i in 0..expl_u.len() {
            expl_u.data[i] = c_now * r_du.data[i]
                + c_prev * self.prev_reaction.as_ref().map_or(0.0, |(du, _)| du.data[i]);
        }
        for i in 0..self.v.len() {
            let prev = self.prev_reaction.as_ref().map_or(0.0, |(_, dv)| dv.data[i]);
            self.v.data[i] += dt * (c_now * r_dv.data[i] + c_prev * prev);
        }

        // rhs = M uc + dt/2 Lw uc + dt * load(explicit reaction)
        let m_uc = self.op.apply_mass_modal(&self.uc);
        let lw_uc = self.op.apply_weak_modal(&self.uc);
        let load = self.op.load_modal(&expl_u);
        let n = self.op.n_modal();
        let mut rhs = faer::Mat::<f64>::zeros(n, 1);
        let off = self.op.modal_offsets();
        for e in 0..m_uc.len() {
            for i in 0..m_uc[e].len() {
                rhs[(off[e] + i, 0)] = m_uc[e][i] + 0.5 * dt * lw_uc[e][i] + dt * load[e][i];
            }
        }

        let sol = self.lu.solve(rhs.as_ref());
        for e in 0..self.uc.len() {
            for i in 0..self.uc[e].len() {
                self.uc[e][i] = sol[(off[e] + i, 0)];
            }
        }

        let u_prev = std::mem::replace(&mut self.u_pts, self.op.to_points(&self.uc));
        self.prev_reaction = Some((r_du, r_dv));
        self.step += 1;
        self.t = self.step as f64 * dt;

        if self.u_pts.has_nan() || self.v.has_nan() {
            return Err(Error::Numerical(format!(
                "solution became non-finite at t = {:.6} (last good t = {:.6})",
                self.t,
                self.t - dt
            )));
        }
        Ok(u_prev)
    }
}

/// Single-step convenience form of the IMEX scheme. Builds the operator and
/// the factorization, advances once, and returns the new state; prefer
/// [`ImexStepper`] for time loops.
pub fn step_imex(
    mesh: &SurfaceMesh,
    state: &ApState,
    dframes: &super::DFrames,
    params: ApParams,
    config: SolverConfig,
) -> Result<ApState> {
    let mut stepper = ImexStepper::new(mesh, dframes, params, config, state.clone())?;
    stepper.advance()?;
    Ok(stepper.state())
}
