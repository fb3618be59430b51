//! Mixed (local DG) discretization of the anisotropic surface diffusion
//! operator div(d grad u) expanded on diffusivity-scaled frames.
//!
//! Stage one recovers the frame components q_m of the gradient from the
//! weak form
//!   int d^mm q_m phi = -int (grad phi . d^m) u - int (div d^m) u phi
//!                      + bnd u~ (n . d^m) phi,
//! stage two assembles the weak divergence
//!   int f phi = -sum_m int q_m (grad phi . d^m) + bnd (n . q^) phi.
//!
//! Numerical fluxes alternate: u~ is taken from the face owner (the side
//! with the smaller element id), the gradient flux q^ from the other side,
//! plus an interior-penalty jump term. The flux through a face is built
//! once per face and applied with opposite signs to both sides, so the
//! scheme is exactly conservative; boundary faces impose zero normal flux.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::mesh::{ScalarField, SurfaceMesh};

use super::dframes::DFrames;

/// Numerical-flux parameters. The interior-penalty coefficient is scaled by
/// (p+1)^2 d / h per face.
#[derive(Debug, Clone, Copy)]
pub struct FluxParams {
    pub penalty: f64,
}

impl Default for FluxParams {
    fn default() -> Self {
        FluxParams { penalty: 1.0 }
    }
}

struct ElemOp {
    mass: DMatrix<f64>,
    m_chol: Cholesky<f64, Dyn>,
    mdm_chol: [Cholesky<f64, Dyn>; 2],
    /// Volume gradient matrix: int (grad phi_n . d^m) phi_j.
    cm: [DMatrix<f64>; 2],
    /// Stage-one volume matrix: cm + int (div d^m) phi_n phi_j.
    cma: [DMatrix<f64>; 2],
    /// Face ids with this element's side index on each face.
    face_sides: Vec<(usize, usize)>,
}

struct SideOp {
    elem: usize,
    /// Trace to face quadrature values in global face order: nfq x nm.
    t: DMatrix<f64>,
    /// n . d^m of this side at the face points.
    f_m: [Vec<f64>; 2],
}

struct FaceOp {
    sides: Vec<SideOp>,
    wjf: Vec<f64>,
    eta: f64,
}

/// Precomputed discrete diffusion operator for one mesh + frame/diffusivity
/// configuration.
pub struct LdgOperator<'a> {
    mesh: &'a SurfaceMesh,
    elems: Vec<ElemOp>,
    faces: Vec<FaceOp>,
    modal_offsets: Vec<usize>,
    n_modal: usize,
}

impl<'a> LdgOperator<'a> {
    pub fn new(mesh: &'a SurfaceMesh, dframes: &DFrames, flux: FluxParams) -> Result<Self> {
        let n = mesh.n_points();
        if dframes.len() != n {
            return Err(Error::invalid("dframes do not match mesh layout"));
        }
        let div_d1 = mesh.surface_divergence(&dframes.d1_field());
        let div_d2 = mesh.surface_divergence(&dframes.d2_field());

        let ne = mesh.n_elements();
        let mut modal_offsets = Vec::with_capacity(ne + 1);
        let mut n_modal = 0usize;
        for e in 0..ne {
            modal_offsets.push(n_modal);
            n_modal += mesh.elem_ref(e).n_modes;
        }
        modal_offsets.push(n_modal);

        let mut elems = Vec::with_capacity(ne);
        for e in 0..ne {
            let re = mesh.elem_ref(e);
            let g = mesh.geom(e);
            let nm = re.n_modes;
            let rng = mesh.elem_points(e);

            let mut mass = DMatrix::zeros(nm, nm);
            let mut cm = [DMatrix::zeros(nm, nm), DMatrix::zeros(nm, nm)];
            let mut dm = [DMatrix::zeros(nm, nm), DMatrix::zeros(nm, nm)];
            let mut mdm = [DMatrix::zeros(nm, nm), DMatrix::zeros(nm, nm)];
            for (q, idx) in rng.clone().enumerate() {
                let w = g.wj[q];
                let dvecs = [dframes.d1[idx], dframes.d2[idx]];
                for mi in 0..2 {
                    let dr_coef = w * dvecs[mi].dot(&g.a_r[q]);
                    let ds_coef = w * dvecs[mi].dot(&g.a_s[q]);
                    let dmm = dvecs[mi].norm();
                    let divd = if mi == 0 { div_d1.data[idx] } else { div_d2.data[idx] };
                    for nrow in 0..nm {
                        let gphi = dr_coef * re.br[(q, nrow)] + ds_coef * re.bs[(q, nrow)];
                        for jcol in 0..nm {
                            cm[mi][(nrow, jcol)] += gphi * re.b[(q, jcol)];
                            dm[mi][(nrow, jcol)] += w * divd * re.b[(q, nrow)] * re.b[(q, jcol)];
                            mdm[mi][(nrow, jcol)] += w * dmm * re.b[(q, nrow)] * re.b[(q, jcol)];
                        }
                    }
                }
                for nrow in 0..nm {
                    for jcol in 0..nm {
                        mass[(nrow, jcol)] += w * re.b[(q, nrow)] * re.b[(q, jcol)];
                    }
                }
            }
            let m_chol = Cholesky::new(mass.clone())
                .ok_or_else(|| Error::Config(format!("singular mass matrix on element {e}")))?;
            let mdm_chol = [
                Cholesky::new(mdm[0].clone()).ok_or_else(|| {
                    Error::Config(format!("singular weighted mass matrix (m=1) on element {e}"))
                })?,
                Cholesky::new(mdm[1].clone()).ok_or_else(|| {
                    Error::Config(format!("singular weighted mass matrix (m=2) on element {e}"))
                })?,
            ];
            let cma = [&cm[0] + &dm[0], &cm[1] + &dm[1]];
            elems.push(ElemOp {
                mass,
                m_chol,
                mdm_chol,
                cm: [cm[0].clone(), cm[1].clone()],
                cma,
                face_sides: Vec::new(),
            });
        }

        // Face operators
        let mut faces = Vec::with_capacity(mesh.faces().len());
        for (fid, face) in mesh.faces().iter().enumerate() {
            let nfq = face.xf.len();
            let h_f: f64 = face.wj.iter().sum();
            let mut sides = Vec::with_capacity(face.sides.len());
            let mut dmax = 0.0f64;
            for side in &face.sides {
                let e = side.elem;
                let re = mesh.elem_ref(e);
                let rf = &re.faces[side.local_face];
                // global-ordered trace: compose the local trace with the
                // projector so it acts on point values, then reorder rows
                let t_modal = if side.flip {
                    let mut t = DMatrix::zeros(nfq, re.n_modes);
                    for i in 0..nfq {
                        t.set_row(i, &rf.trace.row(nfq - 1 - i));
                    }
                    t
                } else {
                    rf.trace.clone()
                };
                // d^m on the face: interpolate the Cartesian components
                let rng = mesh.elem_points(e);
                let mut f_m = [vec![0.0; nfq], vec![0.0; nfq]];
                for (mi, dvec) in [&dframes.d1, &dframes.d2].iter().enumerate() {
                    for c in 0..3 {
                        let comp = DVector::from_iterator(
                            rng.len(),
                            rng.clone().map(|idx| dvec[idx][c]),
                        );
                        let coef = &re.proj * &comp;
                        let vals = &t_modal * &coef;
                        for i in 0..nfq {
                            f_m[mi][i] += side.conormal[i][c] * vals[i];
                        }
                    }
                }
                for i in 0..nfq {
                    dmax = dmax.max(f_m[0][i].abs()).max(f_m[1][i].abs());
                }
                elems[e].face_sides.push((fid, sides.len()));
                sides.push(SideOp {
                    elem: e,
                    t: t_modal,
                    f_m,
                });
            }
            let p = mesh.elem_ref(face.sides[0].elem).order as f64;
            let eta = if face.sides.len() == 2 {
                flux.penalty * (p + 1.0) * (p + 1.0) * dmax.max(1e-300) / h_f
            } else {
                0.0
            };
            faces.push(FaceOp {
                sides,
                wjf: face.wj.clone(),
                eta,
            });
        }

        Ok(LdgOperator {
            mesh,
            elems,
            faces,
            modal_offsets,
            n_modal,
        })
    }

    pub fn mesh(&self) -> &SurfaceMesh {
        self.mesh
    }

    pub fn n_modal(&self) -> usize {
        self.n_modal
    }

    pub fn modal_offsets(&self) -> &[usize] {
        &self.modal_offsets
    }

    /// Project point values to modal coefficients per element.
    pub fn to_modal(&self, u: &ScalarField) -> Vec<DVector<f64>> {
        let mesh = self.mesh;
        (0..mesh.n_elements())
            .map(|e| {
                let re = mesh.elem_ref(e);
                let rng = mesh.elem_points(e);
                &re.proj * DVector::from_column_slice(&u.data[rng])
            })
            .collect()
    }

    /// Evaluate modal coefficients at the solution points.
    pub fn to_points(&self, uc: &[DVector<f64>]) -> ScalarField {
        let mesh = self.mesh;
        let mut out = ScalarField::zeros(mesh.n_points());
        for e in 0..mesh.n_elements() {
            let re = mesh.elem_ref(e);
            let vals = &re.b * &uc[e];
            for (q, idx) in mesh.elem_points(e).enumerate() {
                out.data[idx] = vals[q];
            }
        }
        out
    }

    /// Stage one: modal gradient components q_m per element.
    fn gradient_stage(&self, uc: &[DVector<f64>], face_u: &[Vec<f64>]) -> Vec<[DVector<f64>; 2]> {
        let ne = self.elems.len();
        let mut q = Vec::with_capacity(ne);
        for (e, el) in self.elems.iter().enumerate() {
            let mut qm: [DVector<f64>; 2] = [
                DVector::zeros(uc[e].len()),
                DVector::zeros(uc[e].len()),
            ];
            for mi in 0..2 {
                let mut rhs = -(&el.cma[mi] * &uc[e]);
                for &(fid, sidx) in &el.face_sides {
                    let fop = &self.faces[fid];
                    let side = &fop.sides[sidx];
                    let ut = &face_u[fid];
                    let nfq = ut.len();
                    let mut lift = DVector::zeros(nfq);
                    for i in 0..nfq {
                        lift[i] = fop.wjf[i] * ut[i] * side.f_m[mi][i];
                    }
                    rhs += side.t.transpose() * lift;
                }
                qm[mi] = el.mdm_chol[mi].solve(&rhs);
            }
            q.push(qm);
        }
        q
    }

    /// Single-valued u~ per face (owner side).
    fn face_u(&self, uc: &[DVector<f64>]) -> Vec<Vec<f64>> {
        self.faces
            .iter()
            .map(|fop| {
                let owner = &fop.sides[0];
                let vals = &owner.t * &uc[owner.elem];
                vals.as_slice().to_vec()
            })
            .collect()
    }

    /// Apply the operator: point values of div(d grad u).
    pub fn apply(&self, u: &ScalarField) -> ScalarField {
        let uc = self.to_modal(u);
        let wk = self.apply_weak_modal(&uc);
        let mut out = ScalarField::zeros(self.mesh.n_points());
        for (e, el) in self.elems.iter().enumerate() {
            let fc = el.m_chol.solve(&wk[e]);
            let re = self.mesh.elem_ref(e);
            let vals = &re.b * &fc;
            for (qi, idx) in self.mesh.elem_points(e).enumerate() {
                out.data[idx] = vals[qi];
            }
        }
        out
    }

    /// Weak form of the operator on modal coefficients: returns per-element
    /// vectors L_w u with int f phi = (L_w u)_n, i.e. M f = L_w u.
    pub fn apply_weak_modal(&self, uc: &[DVector<f64>]) -> Vec<DVector<f64>> {
        let face_u = self.face_u(uc);
        let q = self.gradient_stage(uc, &face_u);

        // numerical flux n.q^ per face, seen from each side
        let mut face_flux: Vec<Vec<Vec<f64>>> = Vec::with_capacity(self.faces.len());
        for fop in &self.faces {
            let nfq = fop.wjf.len();
            if fop.sides.len() == 1 {
                face_flux.push(vec![vec![0.0; nfq]]);
                continue;
            }
            let flux_side = &fop.sides[1];
            let mut base = vec![0.0; nfq];
            for mi in 0..2 {
                let vals = &flux_side.t * &q[flux_side.elem][mi];
                for i in 0..nfq {
                    base[i] += vals[i] * flux_side.f_m[mi][i];
                }
            }
            let u0 = &fop.sides[0].t * &uc[fop.sides[0].elem];
            let u1 = &fop.sides[1].t * &uc[fop.sides[1].elem];
            let mut fv0 = vec![0.0; nfq];
            let mut fv1 = vec![0.0; nfq];
            for i in 0..nfq {
                let jump10 = u1[i] - u0[i];
                fv1[i] = base[i] - fop.eta * jump10;
                fv0[i] = -base[i] + fop.eta * jump10;
            }
            face_flux.push(vec![fv0, fv1]);
        }

        let mut out = Vec::with_capacity(self.elems.len());
        for (e, el) in self.elems.iter().enumerate() {
            let mut acc = DVector::zeros(uc[e].len());
            for mi in 0..2 {
                acc -= &el.cm[mi] * &q[e][mi];
            }
            for &(fid, sidx) in &el.face_sides {
                let fop = &self.faces[fid];
                let side = &fop.sides[sidx];
                let fv = &face_flux[fid][sidx];
                let nfq = fv.len();
                let mut lift = DVector::zeros(nfq);
                for i in 0..nfq {
                    lift[i] = fop.wjf[i] * fv[i];
                }
                acc += side.t.transpose() * lift;
            }
            out.push(acc);
        }
        out
    }

    /// Weak mass action per element: M u_c.
    pub fn apply_mass_modal(&self, uc: &[DVector<f64>]) -> Vec<DVector<f64>> {
        self.elems
            .iter()
            .enumerate()
            .map(|(e, el)| &el.mass * &uc[e])
            .collect()
    }

    /// Weak load vector of point values: per element B^T (w r).
    pub fn load_modal(&self, r: &ScalarField) -> Vec<DVector<f64>> {
        let mesh = self.mesh;
        (0..mesh.n_elements())
            .map(|e| {
                let re = mesh.elem_ref(e);
                let g = mesh.geom(e);
                let rng = mesh.elem_points(e);
                let weighted = DVector::from_iterator(
                    rng.len(),
                    rng.clone().enumerate().map(|(q, idx)| g.wj[q] * r.data[idx]),
                );
                re.b.transpose() * weighted
            })
            .collect()
    }

    /// Per-element L2 projection solve: given weak vectors, return modal
    /// coefficients (applies M^-1).
    pub fn mass_solve(&self, weak: &[DVector<f64>]) -> Vec<DVector<f64>> {
        self.elems
            .iter()
            .enumerate()
            .map(|(e, el)| el.m_chol.solve(&weak[e]))
            .collect()
    }

    /// Assemble the global sparse matrix of M - c L_w on modal coefficients.
    pub fn assemble_helmholtz(&self, c: f64) -> Vec<faer::sparse::Triplet<usize, usize, f64>> {
        use std::collections::BTreeMap;
        let ne = self.elems.len();
        let off = &self.modal_offsets;

        // stage-one dependency blocks: q_m(e) = sum_J Q[e][m][J] uc(J)
        let mut qdeps: Vec<[BTreeMap<usize, DMatrix<f64>>; 2]> = Vec::with_capacity(ne);
        for (e, el) in self.elems.iter().enumerate() {
            let mut maps: [BTreeMap<usize, DMatrix<f64>>; 2] = [BTreeMap::new(), BTreeMap::new()];
            for mi in 0..2 {
                add_block(&mut maps[mi], e, -el.cma[mi].clone());
                for &(fid, sidx) in &el.face_sides {
                    let fop = &self.faces[fid];
                    let side = &fop.sides[sidx];
                    let owner = &fop.sides[0];
                    let lifted = scale_rows(&side.t.transpose(), &fop.wjf, &side.f_m[mi]);
                    add_block(&mut maps[mi], owner.elem, lifted * &owner.t);
                }
                for blk in maps[mi].values_mut() {
                    *blk = el.mdm_chol[mi].solve(blk);
                }
            }
            qdeps.push(maps);
        }

        let mut trips = Vec::new();
        for (e, el) in self.elems.iter().enumerate() {
            let mut fdeps: BTreeMap<usize, DMatrix<f64>> = BTreeMap::new();
            // mass term
            add_block(&mut fdeps, e, el.mass.clone());
            // volume: -c * (-sum_m cm q_m)
            for mi in 0..2 {
                for (j, blk) in &qdeps[e][mi] {
                    add_block(&mut fdeps, *j, &el.cm[mi] * blk * c);
                }
            }
            for &(fid, sidx) in &el.face_sides {
                let fop = &self.faces[fid];
                let side = &fop.sides[sidx];
                if fop.sides.len() == 2 {
                    let flux_side = &fop.sides[1];
                    let sgn = if sidx == 1 { 1.0 } else { -1.0 };
                    for mi in 0..2 {
                        let lifted = scale_rows(&side.t.transpose(), &fop.wjf, &flux_side.f_m[mi]);
                        let face_mat = lifted * &flux_side.t * sgn;
                        for (j, blk) in &qdeps[flux_side.elem][mi] {
                            add_block(&mut fdeps, *j, -c * (&face_mat * blk));
                        }
                    }
                    // penalty: from side s the flux carries -eta (u_s - u_other)
                    let other = &fop.sides[1 - sidx];
                    let ones = vec![1.0; fop.wjf.len()];
                    let tw = scale_rows(&side.t.transpose(), &fop.wjf, &ones);
                    add_block(&mut fdeps, side.elem, c * fop.eta * (&tw * &side.t));
                    add_block(&mut fdeps, other.elem, -c * fop.eta * (&tw * &other.t));
                }
            }
            for (j, blk) in fdeps {
                let (r0, c0) = (off[e], off[j]);
                for rr in 0..blk.nrows() {
                    for cc in 0..blk.ncols() {
                        let v = blk[(rr, cc)];
                        if v != 0.0 {
                            trips.push(faer::sparse::Triplet::new(r0 + rr, c0 + cc, v));
                        }
                    }
                }
            }
        }
        trips
    }
}

fn add_block(map: &mut std::collections::BTreeMap<usize, DMatrix<f64>>, j: usize, blk: DMatrix<f64>) {
    map.entry(j)
        .and_modify(|b| *b += &blk)
        .or_insert(blk);
}

/// (T^T) scaled columnwise by w .* f: returns a matrix whose product with a
/// face-value vector integrates it against the test functions.
fn scale_rows(tt: &DMatrix<f64>, w: &[f64], f: &[f64]) -> DMatrix<f64> {
    let mut out = tt.clone();
    for cc in 0..out.ncols() {
        let s = w[cc] * f[cc];
        for rr in 0..out.nrows() {
            out[(rr, cc)] *= s;
        }
    }
    out
}

/// One-call weak divergence of d grad u (the discrete surface diffusion
/// operator applied to a point-sampled field).
pub fn mmf_laplacian(
    mesh: &SurfaceMesh,
    dframes: &DFrames,
    flux: FluxParams,
    u: &ScalarField,
) -> Result<ScalarField> {
    mesh.check_field_len(u.len())?;
    Ok(LdgOperator::new(mesh, dframes, flux)?.apply(u))
}
