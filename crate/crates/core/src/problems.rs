//! Cone constrained problems `min f(x) s.t. G(x) ∈ K, x ∈ A` with derivatives.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::cones::{BlockVector, ConeSpec};
use crate::error::{Error, Result};
use crate::numdiff;

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type MatrixFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;
pub type MatricesFn = Arc<dyn Fn(&[f64]) -> Vec<DMatrix<f64>> + Send + Sync>;

/// Tie tolerance for the active set of a max-type objective.
pub const ACTIVE_TOL: f64 = 1e-10;

/// A smooth scalar function with optional analytic derivatives.
#[derive(Clone)]
pub struct SmoothFunction {
    value: ScalarFn,
    gradient: Option<VectorFn>,
    hessian: Option<MatrixFn>,
}

impl SmoothFunction {
    pub fn new(value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> SmoothFunction {
        SmoothFunction { value: Arc::new(value), gradient: None, hessian: None }
    }

    pub fn with_gradient(mut self, g: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> SmoothFunction {
        self.gradient = Some(Arc::new(g));
        self
    }

    pub fn with_hessian(mut self, h: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static) -> SmoothFunction {
        self.hessian = Some(Arc::new(h));
        self
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    /// Analytic gradient, or central differences when none was supplied.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match &self.gradient {
            Some(g) => g(x),
            None => numdiff::gradient(|z| (self.value)(z), x, numdiff::default_step()),
        }
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn has_hessian(&self) -> bool {
        self.hessian.is_some()
    }

    pub fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.hessian
            .as_ref()
            .map(|h| h(x))
            .ok_or_else(|| Error::MissingDerivative("objective Hessian".into()))
    }
}

impl fmt::Debug for SmoothFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmoothFunction {{ gradient: {}, hessian: {} }}", self.has_gradient(), self.has_hessian())
    }
}

/// `f = max_k f_k`.
#[derive(Clone, Debug)]
pub struct Objective {
    pieces: Vec<SmoothFunction>,
}

impl Objective {
    pub fn smooth(f: SmoothFunction) -> Objective {
        Objective { pieces: vec![f] }
    }

    pub fn max_of(pieces: Vec<SmoothFunction>) -> Result<Objective> {
        if pieces.is_empty() {
            return Err(Error::InvalidParameter("objective needs at least one piece".into()));
        }
        Ok(Objective { pieces })
    }

    pub fn pieces(&self) -> &[SmoothFunction] {
        &self.pieces
    }

    pub fn is_smooth(&self) -> bool {
        self.pieces.len() == 1
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.pieces.iter().map(|p| p.value(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Indices `k` with `f_k(x)` within `tol·max(1, |f|)` of the maximum.
    pub fn active_set(&self, x: &[f64], tol: f64) -> Vec<usize> {
        let vals: Vec<f64> = self.pieces.iter().map(|p| p.value(x)).collect();
        let m = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let t = tol * m.abs().max(1.0);
        (0..vals.len()).filter(|&k| vals[k] >= m - t).collect()
    }

    /// Gradient of a smooth objective; errors when the active set is not a singleton.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let act = self.active_set(x, ACTIVE_TOL);
        if act.len() != 1 {
            return Err(Error::NonsmoothObjective(format!("{} active pieces", act.len())));
        }
        Ok(self.pieces[act[0]].gradient(x))
    }

    pub fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let act = self.active_set(x, ACTIVE_TOL);
        if act.len() != 1 {
            return Err(Error::NonsmoothObjective(format!("{} active pieces", act.len())));
        }
        self.pieces[act[0]].hessian(x)
    }
}

/// `G : ℝ^d → Y` in packed coordinates, with Jacobian rows indexed by packed entries.
#[derive(Clone)]
pub struct ConstraintMap {
    dim_y: usize,
    value: VectorFn,
    jacobian: Option<MatrixFn>,
    hessians: Option<MatricesFn>,
}

impl ConstraintMap {
    pub fn new(dim_y: usize, value: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> ConstraintMap {
        ConstraintMap { dim_y, value: Arc::new(value), jacobian: None, hessians: None }
    }

    pub fn empty() -> ConstraintMap {
        ConstraintMap::new(0, |_| Vec::new())
            .with_jacobian(|x| DMatrix::zeros(0, x.len()))
            .with_hessians(|_| Vec::new())
    }

    pub fn with_jacobian(mut self, j: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static) -> ConstraintMap {
        self.jacobian = Some(Arc::new(j));
        self
    }

    /// One `d × d` Hessian per packed output coordinate.
    pub fn with_hessians(
        mut self,
        h: impl Fn(&[f64]) -> Vec<DMatrix<f64>> + Send + Sync + 'static,
    ) -> ConstraintMap {
        self.hessians = Some(Arc::new(h));
        self
    }

    pub fn dim_y(&self) -> usize {
        self.dim_y
    }

    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        (self.value)(x)
    }

    pub fn has_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    pub fn has_hessians(&self) -> bool {
        self.hessians.is_some()
    }

    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        match &self.jacobian {
            Some(j) => j(x),
            None => numdiff::jacobian(|z| (self.value)(z), x, numdiff::default_step()),
        }
    }

    /// `DG(x)h`.
    pub fn jacobian_apply(&self, x: &[f64], h: &[f64]) -> Vec<f64> {
        (self.jacobian(x) * DVector::from_column_slice(h)).as_slice().to_vec()
    }

    /// `[DG(x)]* w`.
    pub fn adjoint_apply(&self, x: &[f64], w: &[f64]) -> Vec<f64> {
        (self.jacobian(x).transpose() * DVector::from_column_slice(w)).as_slice().to_vec()
    }

    pub fn hessians(&self, x: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        self.hessians
            .as_ref()
            .map(|h| h(x))
            .ok_or_else(|| Error::MissingDerivative("constraint Hessians".into()))
    }

    /// `D²G(x)(h, h)`.
    pub fn second_derivative(&self, x: &[f64], h: &[f64]) -> Result<Vec<f64>> {
        let hv = DVector::from_column_slice(h);
        Ok(self.hessians(x)?.iter().map(|m| hv.dot(&(m * &hv))).collect())
    }
}

impl fmt::Debug for ConstraintMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ConstraintMap {{ dim_y: {}, jacobian: {}, hessians: {} }}",
            self.dim_y,
            self.has_jacobian(),
            self.has_hessians()
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum FeasibleSet {
    WholeSpace,
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

impl FeasibleSet {
    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<FeasibleSet> {
        if lower.len() != upper.len() || lower.iter().zip(&upper).any(|(l, u)| !(l <= u)) {
            return Err(Error::InvalidParameter("box needs lower ≤ upper of equal length".into()));
        }
        Ok(FeasibleSet::Box { lower, upper })
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        match self {
            FeasibleSet::WholeSpace => true,
            FeasibleSet::Box { lower, upper } => {
                x.iter().zip(lower.iter().zip(upper)).all(|(v, (l, u))| *v >= l - tol && *v <= u + tol)
            }
        }
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        match self {
            FeasibleSet::WholeSpace => x.to_vec(),
            FeasibleSet::Box { lower, upper } => {
                x.iter().zip(lower.iter().zip(upper)).map(|(v, (l, u))| v.clamp(*l, *u)).collect()
            }
        }
    }

    /// Projection of `v` onto the tangent cone `T_A(x)`; bounds within `tol` count as active.
    pub fn project_tangent(&self, x: &[f64], v: &[f64], tol: f64) -> Vec<f64> {
        match self {
            FeasibleSet::WholeSpace => v.to_vec(),
            FeasibleSet::Box { lower, upper } => (0..v.len())
                .map(|i| {
                    let mut d = v[i];
                    if x[i] <= lower[i] + tol {
                        d = d.max(0.0);
                    }
                    if x[i] >= upper[i] - tol {
                        d = d.min(0.0);
                    }
                    d
                })
                .collect(),
        }
    }

    /// Outward normal generators at `x`: `−e_i` at lower bounds, `+e_i` at upper bounds.
    pub fn normal_generators(&self, x: &[f64], tol: f64) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        if let FeasibleSet::Box { lower, upper } = self {
            for i in 0..x.len() {
                if x[i] <= lower[i] + tol {
                    let mut e = vec![0.0; x.len()];
                    e[i] = -1.0;
                    out.push(e);
                }
                if x[i] >= upper[i] - tol {
                    let mut e = vec![0.0; x.len()];
                    e[i] = 1.0;
                    out.push(e);
                }
            }
        }
        out
    }
}

/// Known solution of a catalog problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    pub f: f64,
    /// Danskin–Demyanov weights over active pieces, when the objective is a max.
    pub weights: Option<Vec<f64>>,
    /// False for multipliers that are saddle multipliers but not elements of `K*`.
    pub lambda_in_polar: bool,
    pub note: String,
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub name: String,
    pub description: String,
    pub dim: usize,
    pub objective: Objective,
    pub constraints: ConstraintMap,
    pub cone: ConeSpec,
    pub set: FeasibleSet,
    pub reference: Option<Reference>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub f: f64,
    pub active: Vec<usize>,
    pub g: BlockVector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdReport {
    /// Max relative gradient error per objective piece.
    pub piece_gradient: Vec<f64>,
    /// Max relative Hessian error per piece (`None` without an analytic Hessian).
    pub piece_hessian: Vec<Option<f64>>,
    /// Max relative Jacobian error per cone block.
    pub constraint_block: Vec<f64>,
    /// Max relative error of constraint Hessians (`None` without analytic Hessians).
    pub constraint_hessian: Option<f64>,
}

impl FdReport {
    pub fn max_error(&self) -> f64 {
        self.piece_gradient
            .iter()
            .chain(self.constraint_block.iter())
            .chain(self.piece_hessian.iter().flatten())
            .chain(self.constraint_hessian.iter())
            .cloned()
            .fold(0.0, f64::max)
    }
}

fn rel_err_mat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    numdiff::max_rel_error(a.as_slice(), b.as_slice())
}

impl Problem {
    /// Checks dimensions of the pieces against `dim` and `cone`.
    pub fn validate(&self) -> Result<()> {
        if self.constraints.dim_y() != self.cone.dim() {
            return Err(Error::ShapeMismatch(format!(
                "constraint map has {} outputs, cone {} has dimension {}",
                self.constraints.dim_y(),
                self.cone,
                self.cone.dim()
            )));
        }
        if let FeasibleSet::Box { lower, .. } = &self.set {
            if lower.len() != self.dim {
                return Err(Error::ShapeMismatch("box dimension".into()));
            }
        }
        Ok(())
    }

    fn check_x(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::ShapeMismatch(format!("x has {} entries, problem dimension {}", x.len(), self.dim)));
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("x".into()));
        }
        Ok(())
    }

    pub fn g(&self, x: &[f64]) -> Result<BlockVector> {
        self.check_x(x)?;
        let g = self.constraints.evaluate(x);
        if !g.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite(format!("G(x) at {x:?}")));
        }
        self.cone.vector(g)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Evaluation> {
        self.check_x(x)?;
        let f = self.objective.value(x);
        if !f.is_finite() {
            return Err(Error::NonFinite(format!("f(x) at {x:?}")));
        }
        Ok(Evaluation { f, active: self.objective.active_set(x, ACTIVE_TOL), g: self.g(x)? })
    }

    pub fn multiplier(&self, lambda: Vec<f64>) -> Result<BlockVector> {
        self.cone.vector(lambda)
    }

    /// `D_x L(x, λ) = Σ_k w_k ∇f_k(x) + [DG(x)]* λ`, with weights over the active set
    /// (uniform when not supplied).
    pub fn lagrangian_gradient(&self, x: &[f64], lambda: &[f64], weights: Option<&[f64]>) -> Result<Vec<f64>> {
        self.check_x(x)?;
        let mut grad = vec![0.0; self.dim];
        let act = self.objective.active_set(x, ACTIVE_TOL);
        let w: Vec<f64> = match weights {
            Some(w) if w.len() == act.len() => w.to_vec(),
            Some(w) if w.len() == self.objective.pieces().len() => act.iter().map(|&k| w[k]).collect(),
            Some(_) => return Err(Error::ShapeMismatch("objective weights".into())),
            None => vec![1.0 / act.len() as f64; act.len()],
        };
        for (&k, wk) in act.iter().zip(&w) {
            for (g, v) in grad.iter_mut().zip(self.objective.pieces()[k].gradient(x)) {
                *g += wk * v;
            }
        }
        if self.cone.dim() > 0 {
            for (g, v) in grad.iter_mut().zip(self.constraints.adjoint_apply(x, lambda)) {
                *g += v;
            }
        }
        Ok(grad)
    }

    /// Compares supplied derivatives with central differences of step `step`.
    pub fn fd_check(&self, x: &[f64], step: f64) -> Result<FdReport> {
        self.check_x(x)?;
        if !(step > 0.0) {
            return Err(Error::InvalidParameter(format!("finite-difference step {step}")));
        }
        let mut piece_gradient = Vec::new();
        let mut piece_hessian = Vec::new();
        for p in self.objective.pieces() {
            let fd = numdiff::gradient(|z| p.value(z), x, step);
            piece_gradient.push(numdiff::max_rel_error(&p.gradient(x), &fd));
            piece_hessian.push(if p.has_hessian() {
                let fd = numdiff::hessian_from_gradient(|z| p.gradient(z), x, step);
                Some(rel_err_mat(&p.hessian(x)?, &fd))
            } else {
                None
            });
        }
        let jac = self.constraints.jacobian(x);
        let fd = numdiff::jacobian(|z| self.constraints.evaluate(z), x, step);
        let mut constraint_block = Vec::new();
        let mut o = 0;
        for n in self.cone.sizes() {
            let a = jac.rows(o, n).into_owned();
            let b = fd.rows(o, n).into_owned();
            constraint_block.push(rel_err_mat(&a, &b));
            o += n;
        }
        let constraint_hessian = if self.constraints.has_hessians() && self.cone.dim() > 0 {
            let hs = self.constraints.hessians(x)?;
            let mut err: f64 = 0.0;
            for (k, h) in hs.iter().enumerate() {
                let fd = numdiff::hessian_from_gradient(
                    |z| self.constraints.jacobian(z).row(k).iter().cloned().collect(),
                    x,
                    step,
                );
                err = err.max(rel_err_mat(h, &fd));
            }
            Some(err)
        } else {
            None
        };
        Ok(FdReport { piece_gradient, piece_hessian, constraint_block, constraint_hessian })
    }
}
