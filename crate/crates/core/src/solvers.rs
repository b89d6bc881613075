//! Projected L-BFGS minimization, the classical multiplier method over `ℒ(x, λ, c)`, and joint
//! `(x, λ)` minimization of `ℒ_e` with penalty escalation.

use std::collections::VecDeque;

use log::{debug, info};
use serde::{Deserialize, Serialize};

use crate::analysis::{kkt_residual, KktOptions, KktResidual};
use crate::aug_lagrangians::{lagrangian_grad_x, lagrangian_value, MultiplierCone, PhiFamily};
use crate::cones::{BlockVector, ConeSpec};
use crate::error::{Error, Result};
use crate::exact_al::ExactAlInstance;
use crate::problems::{FeasibleSet, Problem};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MinimizerConfig {
    pub max_iter: usize,
    /// Tolerance on the projected-gradient stationarity measure.
    pub grad_tol: f64,
    pub armijo: f64,
    pub backtrack: f64,
    pub max_backtracks: usize,
    /// Number of stored curvature pairs; 0 gives projected steepest descent.
    pub memory: usize,
    pub stall_window: usize,
    pub stall_rel: f64,
    /// Values below `−divergence_bound` count as unbounded descent.
    pub divergence_bound: f64,
}

impl Default for MinimizerConfig {
    fn default() -> Self {
        MinimizerConfig {
            max_iter: 2000,
            grad_tol: 1e-9,
            armijo: 1e-4,
            backtrack: 0.5,
            max_backtracks: 60,
            memory: 10,
            stall_window: 10,
            stall_rel: 1e-12,
            divergence_bound: 1e15,
        }
    }
}

impl MinimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.max_iter > 0
            && self.grad_tol > 0.0
            && self.armijo > 0.0
            && self.armijo < 1.0
            && self.backtrack > 0.0
            && self.backtrack < 1.0
            && self.max_backtracks > 0
            && self.stall_window > 0
            && self.stall_rel >= 0.0
            && self.divergence_bound > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("minimizer configuration {self:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Converged,
    IterationLimit,
    /// No sufficient decrease over the stall window, or the line search failed.
    Stalled,
    Diverged,
    LeftDomain,
}

/// Where the iterates live.
#[derive(Clone, Copy, Debug)]
pub enum Region<'a> {
    Free,
    Set(&'a FeasibleSet),
    /// The polar cone `K*` of the given cone.
    Polar(&'a ConeSpec),
}

impl Region<'_> {
    fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            Region::Free => Ok(x.to_vec()),
            Region::Set(s) => Ok(s.project(x)),
            Region::Polar(k) => Ok(k.project_polar(&k.vector(x.to_vec())?)?.into_vec()),
        }
    }

    fn stationarity(&self, x: &[f64], g: &[f64]) -> Result<f64> {
        if let Region::Free = self {
            return Ok(norm(g));
        }
        let trial: Vec<f64> = x.iter().zip(g).map(|(a, b)| a - b).collect();
        let p = self.project(&trial)?;
        Ok(x.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
    }

    /// Variables held at a bound because the gradient pushes outward.
    fn free_mask(&self, x: &[f64], g: &[f64]) -> Vec<bool> {
        match self {
            Region::Set(FeasibleSet::Box { lower, upper }) => (0..x.len())
                .map(|i| {
                    let at_lo = x[i] <= lower[i] + 1e-12 * lower[i].abs().max(1.0);
                    let at_hi = x[i] >= upper[i] - 1e-12 * upper[i].abs().max(1.0);
                    !((at_lo && g[i] > 0.0) || (at_hi && g[i] < 0.0))
                })
                .collect(),
            _ => vec![true; x.len()],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimizeReport {
    pub x: Vec<f64>,
    #[serde(with = "crate::ext::serde_f64")]
    pub f: f64,
    pub stationarity: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub status: SolveStatus,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn lbfgs_direction(g: &[f64], mem: &VecDeque<(Vec<f64>, Vec<f64>)>, free: &[bool]) -> Vec<f64> {
    let mask = |v: &[f64]| -> Vec<f64> { v.iter().zip(free).map(|(a, f)| if *f { *a } else { 0.0 }).collect() };
    let mut q = mask(g);
    let mut alphas = Vec::with_capacity(mem.len());
    for (s, y) in mem.iter().rev() {
        let (s, y) = (mask(s), mask(y));
        let sy = dot(&s, &y);
        if sy <= 0.0 {
            alphas.push(None);
            continue;
        }
        let a = dot(&s, &q) / sy;
        for (qi, yi) in q.iter_mut().zip(&y) {
            *qi -= a * yi;
        }
        alphas.push(Some((a, sy)));
    }
    if let Some((s, y)) = mem.back() {
        let (s, y) = (mask(s), mask(y));
        let (sy, yy) = (dot(&s, &y), dot(&y, &y));
        if sy > 0.0 && yy > 0.0 {
            let gamma = sy / yy;
            q.iter_mut().for_each(|v| *v *= gamma);
        }
    }
    for ((s, y), a) in mem.iter().zip(alphas.into_iter().rev()) {
        if let Some((a, sy)) = a {
            let (s, y) = (mask(s), mask(y));
            let b = dot(&y, &q) / sy;
            for (qi, si) in q.iter_mut().zip(&s) {
                *qi += (a - b) * si;
            }
        }
    }
    q.iter().zip(free).map(|(v, f)| if *f { -v } else { 0.0 }).collect()
}

/// Minimizes `value` over `region` from `x0`. `value` returns `+∞` outside its domain; such
/// trial points are rejected by the line search.
pub fn minimize(
    value: &dyn Fn(&[f64]) -> f64,
    grad: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    x0: &[f64],
    region: Region<'_>,
    cfg: &MinimizerConfig,
) -> Result<MinimizeReport> {
    cfg.validate()?;
    let eval = |x: &[f64]| {
        let v = value(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut x = region.project(x0)?;
    let mut f = eval(&x);
    let mut evaluations = 1;
    let report = |x: Vec<f64>, f: f64, st: f64, it: usize, ev: usize, status| MinimizeReport {
        x,
        f,
        stationarity: st,
        iterations: it,
        evaluations: ev,
        status,
    };
    if f == f64::INFINITY {
        return Err(Error::OutsideDomain(format!("objective is +∞ at {x:?}")));
    }
    if f < -cfg.divergence_bound {
        return Ok(report(x, f, f64::NAN, 0, evaluations, SolveStatus::Diverged));
    }
    let check_grad = |g: Vec<f64>| -> Result<Vec<f64>> {
        if g.iter().all(|v| v.is_finite()) {
            Ok(g)
        } else {
            Err(Error::NonFinite("gradient".into()))
        }
    };
    let mut g = check_grad(grad(&x)?)?;
    let mut mem: VecDeque<(Vec<f64>, Vec<f64>)> = VecDeque::new();
    let mut slow = 0usize;
    for it in 0..cfg.max_iter {
        let st = region.stationarity(&x, &g)?;
        if st <= cfg.grad_tol {
            return Ok(report(x, f, st, it, evaluations, SolveStatus::Converged));
        }
        let free = region.free_mask(&x, &g);
        let mut use_memory = !mem.is_empty() && cfg.memory > 0;
        let step = loop {
            let (d, t0) = if use_memory {
                (lbfgs_direction(&g, &mem, &free), 1.0)
            } else {
                let d: Vec<f64> = g.iter().zip(&free).map(|(v, fr)| if *fr { -v } else { 0.0 }).collect();
                let n = norm(&d).max(st);
                (d, (1.0 / n).min(1.0))
            };
            let found = if dot(&d, &g) < 0.0 || !use_memory {
                line_search(&eval, &region, &x, f, &g, &d, t0, cfg, &mut evaluations)?
            } else {
                None
            };
            match found {
                Some(s) => break Some(s),
                None if use_memory => {
                    mem.clear();
                    use_memory = false;
                }
                None => break None,
            }
        };
        let Some((xn, fnew)) = step else {
            debug!("line search failed at iteration {it}");
            return Ok(report(x, f, st, it, evaluations, SolveStatus::Stalled));
        };
        if fnew < -cfg.divergence_bound {
            return Ok(report(xn, fnew, f64::NAN, it + 1, evaluations, SolveStatus::Diverged));
        }
        let gn = check_grad(grad(&xn)?)?;
        if cfg.memory > 0 {
            let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
            if dot(&s, &y) > 1e-12 * norm(&s) * norm(&y) {
                if mem.len() == cfg.memory {
                    mem.pop_front();
                }
                mem.push_back((s, y));
            }
        }
        if (f - fnew) / f.abs().max(1.0) < cfg.stall_rel {
            slow += 1;
        } else {
            slow = 0;
        }
        x = xn;
        f = fnew;
        g = gn;
        if slow >= cfg.stall_window {
            let st = region.stationarity(&x, &g)?;
            let status = if st <= cfg.grad_tol { SolveStatus::Converged } else { SolveStatus::Stalled };
            return Ok(report(x, f, st, it + 1, evaluations, status));
        }
    }
    let st = region.stationarity(&x, &g)?;
    let status = if st <= cfg.grad_tol { SolveStatus::Converged } else { SolveStatus::IterationLimit };
    Ok(report(x, f, st, cfg.max_iter, evaluations, status))
}

#[allow(clippy::too_many_arguments)]
fn line_search(
    eval: &dyn Fn(&[f64]) -> f64,
    region: &Region<'_>,
    x: &[f64],
    f: f64,
    g: &[f64],
    d: &[f64],
    t0: f64,
    cfg: &MinimizerConfig,
    evaluations: &mut usize,
) -> Result<Option<(Vec<f64>, f64)>> {
    let mut t = t0;
    for _ in 0..cfg.max_backtracks {
        let trial: Vec<f64> = x.iter().zip(d).map(|(a, b)| a + t * b).collect();
        let xt = region.project(&trial)?;
        let slope = dot(g, &xt.iter().zip(x).map(|(a, b)| a - b).collect::<Vec<_>>());
        if xt == x {
            return Ok(None);
        }
        let ft = eval(&xt);
        *evaluations += 1;
        if ft == f64::NEG_INFINITY || (ft.is_finite() && slope < 0.0 && ft <= f + cfg.armijo * slope) {
            return Ok(Some((xt, ft)));
        }
        t *= cfg.backtrack;
    }
    Ok(None)
}

/// Minimizes `ℒ(·, λ, c)` over the problem's set `A`.
pub fn minimize_lagrangian(
    problem: &Problem,
    family: &PhiFamily,
    lambda: &BlockVector,
    c: f64,
    x0: &[f64],
    cfg: &MinimizerConfig,
) -> Result<MinimizeReport> {
    if !problem.objective.is_smooth() {
        return Err(Error::NonsmoothObjective(format!("{} has a max-type objective", problem.name)));
    }
    family.check_cone(&problem.cone)?;
    let value = |x: &[f64]| match lagrangian_value(problem, family, x, lambda, c) {
        Ok(v) => v.to_f64(),
        Err(_) => f64::INFINITY,
    };
    let grad = |x: &[f64]| lagrangian_grad_x(problem, family, x, lambda, c);
    minimize(&value, &grad, x0, Region::Set(&problem.set), cfg)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlmConfig {
    pub c0: f64,
    /// Penalty growth when feasibility does not improve enough; 1 keeps `c` fixed.
    pub c_factor: f64,
    pub c_max: f64,
    pub max_outer: usize,
    pub tol: f64,
    /// Required ratio of consecutive feasibility measures before `c` is left unchanged.
    pub feasibility_ratio: f64,
    pub x0: Option<Vec<f64>>,
    pub lambda0: Option<Vec<f64>>,
    pub inner: MinimizerConfig,
}

impl Default for AlmConfig {
    fn default() -> Self {
        AlmConfig {
            c0: 10.0,
            c_factor: 10.0,
            c_max: 1e8,
            max_outer: 50,
            tol: 1e-6,
            feasibility_ratio: 0.25,
            x0: None,
            lambda0: None,
            inner: MinimizerConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub status: SolveStatus,
    pub x: Vec<f64>,
    /// The method's own multiplier variable.
    pub lambda: Vec<f64>,
    /// The Lagrange multiplier estimate the KKT residual is evaluated with.
    pub multiplier: Vec<f64>,
    #[serde(with = "crate::ext::serde_f64")]
    pub value: f64,
    pub f: f64,
    pub kkt: KktResidual,
    pub eta: Option<f64>,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub c_trajectory: Vec<f64>,
    pub notes: Vec<String>,
}

/// Classical multiplier method: inner minimization of `ℒ(·, λ_k, c_k)` followed by
/// `λ_{k+1} = Φ₀⁻¹(D_yΦ(G(x_k), λ_k, c_k))`, projected onto `K*` when `Λ = K*`.
pub fn alm_solve(problem: &Problem, family: &PhiFamily, cfg: &AlmConfig) -> Result<SolverReport> {
    if !(cfg.c0 > 0.0 && cfg.c_factor >= 1.0 && cfg.c_max >= cfg.c0 && cfg.tol > 0.0 && cfg.max_outer > 0) {
        return Err(Error::InvalidParameter(format!("ALM configuration c0 = {}, factor = {}", cfg.c0, cfg.c_factor)));
    }
    family.check_cone(&problem.cone)?;
    let cone = &problem.cone;
    let mut x = problem.set.project(&cfg.x0.clone().unwrap_or_else(|| vec![0.0; problem.dim]));
    let mut lambda = match &cfg.lambda0 {
        Some(l) => cone.vector(l.clone())?,
        None => cone.zeros(),
    };
    if !family.multiplier_admissible(cone, &lambda)? {
        return Err(Error::MultiplierOutsideCone);
    }
    let kkt_opts = KktOptions { multiplier_cone: Some(family.multiplier_cone), ..KktOptions::default() };
    let mut c = cfg.c0;
    let mut c_traj = Vec::new();
    let mut notes = Vec::new();
    let mut inner_total = 0;
    let mut prev_feas = f64::INFINITY;
    let mut last: Option<(KktResidual, BlockVector, f64)> = None;
    for k in 0..cfg.max_outer {
        c_traj.push(c);
        let inner = match minimize_lagrangian(problem, family, &lambda, c, &x, &cfg.inner) {
            Ok(r) => r,
            Err(Error::OutsideDomain(m)) => {
                notes.push(format!("outer {k}: start outside dom ℒ: {m}"));
                return Ok(finish(problem, SolveStatus::LeftDomain, x, &lambda, None, f64::INFINITY, k, inner_total, c_traj, notes));
            }
            Err(e) => return Err(e.context(format!("inner solve at outer iteration {k}"))),
        };
        inner_total += inner.iterations;
        x = inner.x;
        if inner.status == SolveStatus::Diverged {
            notes.push(format!("outer {k}: ℒ(·, λ, {c}) unbounded below"));
            return Ok(finish(problem, SolveStatus::Diverged, x, &lambda, None, inner.f, k + 1, inner_total, c_traj, notes));
        }
        let g = problem.g(&x)?;
        let mult = match family.grad_y(cone, &g, &lambda, c) {
            Ok(mut m) => {
                if family.multiplier_cone == MultiplierCone::PolarK {
                    m = cone.project_polar(&m)?;
                }
                let next = family.phi0_inverse(cone, &m)?;
                lambda = if family.multiplier_cone == MultiplierCone::PolarK { cone.project_polar(&next)? } else { next };
                m
            }
            Err(Error::NonDifferentiable(m)) => {
                notes.push(format!("outer {k}: Φ not differentiable at G(x) ({m}); λ kept"));
                family.phi0(cone, &lambda)?
            }
            Err(e) => return Err(e),
        };
        let kkt = kkt_residual(problem, &x, &mult, &kkt_opts)?;
        debug!("ALM outer {k}: c = {c}, kkt = {:e}", kkt.total);
        last = Some((kkt.clone(), mult.clone(), inner.f));
        if kkt.total <= cfg.tol {
            info!("ALM converged after {} outer iterations", k + 1);
            return Ok(finish(problem, SolveStatus::Converged, x, &lambda, Some((kkt, mult)), inner.f, k + 1, inner_total, c_traj, notes));
        }
        if kkt.feasibility > cfg.feasibility_ratio * prev_feas {
            c = (c * cfg.c_factor).min(cfg.c_max);
        }
        prev_feas = kkt.feasibility;
    }
    let (kkt, mult, v) = last.expect("at least one outer iteration");
    Ok(finish(problem, SolveStatus::IterationLimit, x, &lambda, Some((kkt, mult)), v, cfg.max_outer, inner_total, c_traj, notes))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    problem: &Problem,
    status: SolveStatus,
    x: Vec<f64>,
    lambda: &BlockVector,
    kkt: Option<(KktResidual, BlockVector)>,
    value: f64,
    outer: usize,
    inner: usize,
    c_trajectory: Vec<f64>,
    notes: Vec<String>,
) -> SolverReport {
    let (kkt, mult) = match kkt {
        Some(k) => k,
        None => {
            let k = kkt_residual(problem, &x, lambda, &KktOptions::default()).unwrap_or_else(|_| KktResidual::undefined());
            (k, lambda.clone())
        }
    };
    SolverReport {
        status,
        f: problem.objective.value(&x),
        x,
        lambda: lambda.as_slice().to_vec(),
        multiplier: mult.into_vec(),
        value,
        kkt,
        eta: None,
        outer_iterations: outer,
        inner_iterations: inner,
        c_trajectory,
        notes,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExactSolveConfig {
    pub c0: f64,
    pub c_factor: f64,
    pub c_max: f64,
    pub tol: f64,
    pub eta_tol: f64,
    pub x0: Option<Vec<f64>>,
    pub lambda0: Option<Vec<f64>>,
    pub inner: MinimizerConfig,
}

impl Default for ExactSolveConfig {
    fn default() -> Self {
        ExactSolveConfig {
            c0: 1.0,
            c_factor: 10.0,
            c_max: 1e8,
            tol: 1e-6,
            eta_tol: 1e-8,
            x0: None,
            lambda0: None,
            inner: MinimizerConfig { grad_tol: 1e-10, max_iter: 5000, ..MinimizerConfig::default() },
        }
    }
}

/// Joint minimization of `ℒ_e(·, ·, c)` over `A × Y*`, escalating `c` until the recovered pair
/// passes the KKT and `η` tolerances.
pub fn exact_al_solve(inst: &ExactAlInstance<'_>, cfg: &ExactSolveConfig) -> Result<SolverReport> {
    if !(cfg.c0 > 0.0 && cfg.c_factor > 1.0 && cfg.c_max >= cfg.c0 && cfg.tol > 0.0 && cfg.eta_tol > 0.0) {
        return Err(Error::InvalidParameter("exact solve configuration".into()));
    }
    let problem = inst.problem();
    let n = problem.dim;
    let m = problem.cone.dim();
    let x0 = problem.set.project(&cfg.x0.clone().unwrap_or_else(|| vec![0.0; n]));
    let l0 = cfg.lambda0.clone().unwrap_or_else(|| vec![0.0; m]);
    if l0.len() != m {
        return Err(Error::ShapeMismatch(format!("λ₀ has {} entries, expected {m}", l0.len())));
    }
    let mut notes = Vec::new();
    let lam0 = problem.cone.vector(l0.clone())?;
    let x0 = if inst.barriers(&x0, &lam0)?.in_omega {
        x0
    } else {
        let x = restore_feasibility(problem, &x0, &cfg.inner)?;
        notes.push(format!("start moved into Ω_α at x = {x:?}"));
        x
    };
    let z0: Vec<f64> = x0.iter().chain(&l0).copied().collect();
    let set = match &problem.set {
        FeasibleSet::WholeSpace => FeasibleSet::WholeSpace,
        FeasibleSet::Box { lower, upper } => FeasibleSet::boxed(
            lower.iter().copied().chain(std::iter::repeat_n(f64::NEG_INFINITY, m)).collect(),
            upper.iter().copied().chain(std::iter::repeat_n(f64::INFINITY, m)).collect(),
        )?,
    };
    let split = |z: &[f64]| -> Result<(Vec<f64>, BlockVector)> {
        Ok((z[..n].to_vec(), problem.cone.vector(z[n..].to_vec())?))
    };
    let mut c = cfg.c0;
    let mut z = z0.clone();
    let mut c_traj = Vec::new();
    let mut inner_total = 0;
    let mut outer = 0;
    loop {
        outer += 1;
        c_traj.push(c);
        let value = |z: &[f64]| match split(z).and_then(|(x, l)| inst.value(&x, &l, c)) {
            Ok(v) => v.to_f64(),
            Err(_) => f64::INFINITY,
        };
        let grad = |z: &[f64]| -> Result<Vec<f64>> {
            let (x, l) = split(z)?;
            let (gx, gl) = inst.gradient(&x, &l, c)?;
            Ok(gx.into_iter().chain(gl.into_vec()).collect())
        };
        // Warm start from the previous iterate, falling back to the initial point.
        let mut best: Option<MinimizeReport> = None;
        let mut starts = vec![z.clone()];
        if z != z0 {
            starts.push(z0.clone());
        }
        for s in &starts {
            match minimize(&value, &grad, s, Region::Set(&set), &cfg.inner) {
                Ok(r) => {
                    inner_total += r.iterations;
                    if best.as_ref().is_none_or(|b| r.f < b.f) {
                        best = Some(r);
                    }
                }
                Err(Error::OutsideDomain(msg)) => notes.push(format!("c = {c}: start outside Ω_α ({msg})")),
                Err(e) => return Err(e.context(format!("joint minimization at c = {c}"))),
            }
        }
        let Some(r) = best else {
            let (x, l) = split(&z)?;
            let mut rep = finish(problem, SolveStatus::LeftDomain, x, &l, None, f64::INFINITY, outer, inner_total, c_traj, notes);
            rep.eta = None;
            return Ok(rep);
        };
        let (x, l) = split(&r.x)?;
        if r.status == SolveStatus::Diverged {
            notes.push(format!("c = {c}: ℒ_e unbounded below"));
            return Ok(finish(problem, SolveStatus::Diverged, x, &l, None, r.f, outer, inner_total, c_traj, notes));
        }
        let mult = inst.kkt_multiplier(&l)?;
        let kkt = kkt_residual(problem, &x, &mult, &KktOptions::default())?;
        let eta = inst.eta(&x, &l)?;
        debug!("exact AL c = {c}: value {}, kkt {:e}, η {eta:e}", r.f, kkt.total);
        z = r.x.clone();
        if kkt.total <= cfg.tol && eta <= cfg.eta_tol {
            let mut rep = finish(problem, SolveStatus::Converged, x, &l, Some((kkt, mult)), r.f, outer, inner_total, c_traj, notes);
            rep.eta = Some(eta);
            return Ok(rep);
        }
        if c * cfg.c_factor > cfg.c_max * (1.0 + 1e-12) {
            let mut rep = finish(problem, SolveStatus::IterationLimit, x, &l, Some((kkt, mult)), r.f, outer, inner_total, c_traj, notes);
            rep.eta = Some(eta);
            return Ok(rep);
        }
        c *= cfg.c_factor;
    }
}

/// Minimizes `½ dist²(G(x), K)` from `x0`; used to find a start inside `Ω_α`.
fn restore_feasibility(problem: &Problem, x0: &[f64], cfg: &MinimizerConfig) -> Result<Vec<f64>> {
    let residual = |x: &[f64]| -> Result<BlockVector> {
        let g = problem.g(x)?;
        let p = problem.cone.project(&g)?;
        g.axpy(-1.0, &p)
    };
    let value = |x: &[f64]| residual(x).map_or(f64::INFINITY, |r| 0.5 * r.norm().powi(2));
    let grad = |x: &[f64]| -> Result<Vec<f64>> { Ok(problem.constraints.adjoint_apply(x, residual(x)?.as_slice())) };
    Ok(minimize(&value, &grad, x0, Region::Set(&problem.set), cfg)?.x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn convex_quadratic() {
        // f = (x−1)² + 10(y+2)² + xy
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2) + x[0] * x[1];
        let g = |x: &[f64]| Ok(vec![2.0 * (x[0] - 1.0) + x[1], 20.0 * (x[1] + 2.0) + x[0]]);
        let r = minimize(&f, &g, &[5.0, 5.0], Region::Free, &MinimizerConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        // 2x + y = 2, x + 20y = −40
        let det = 2.0 * 20.0 - 1.0;
        assert_relative_eq!(r.x[0], (2.0 * 20.0 + 40.0) / det, epsilon = 1e-8);
        assert_relative_eq!(r.x[1], (-80.0 - 2.0) / det, epsilon = 1e-8);
    }

    #[test]
    fn barrier_keeps_iterates_inside() {
        let f = |x: &[f64]| if x[0] < 1.0 { -(1.0 - x[0]).ln() - 2.0 * x[0] } else { f64::INFINITY };
        let g = |x: &[f64]| Ok(vec![1.0 / (1.0 - x[0]) - 2.0]);
        let r = minimize(&f, &g, &[0.0], Region::Free, &MinimizerConfig::default()).unwrap();
        assert!(r.x[0] < 1.0);
        assert_relative_eq!(r.x[0], 0.5, epsilon = 1e-8);
    }

    #[test]
    fn zero_function_returns_start() {
        let f = |_: &[f64]| 0.0;
        let g = |x: &[f64]| Ok(vec![0.0; x.len()]);
        let r = minimize(&f, &g, &[3.0, -1.0], Region::Free, &MinimizerConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert_eq!(r.x, vec![3.0, -1.0]);
    }

    #[test]
    fn box_constrained_minimum() {
        let set = FeasibleSet::boxed(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let f = |x: &[f64]| (x[0] - 3.0).powi(2) + (x[1] + 0.5).powi(2);
        let g = |x: &[f64]| Ok(vec![2.0 * (x[0] - 3.0), 2.0 * (x[1] + 0.5)]);
        let r = minimize(&f, &g, &[0.0, 0.0], Region::Set(&set), &MinimizerConfig::default()).unwrap();
        assert_relative_eq!(r.x[0], 1.0, epsilon = 1e-10);
        assert_relative_eq!(r.x[1], -0.5, epsilon = 1e-8);
    }

    #[test]
    fn start_outside_domain_is_an_error() {
        let f = |_: &[f64]| f64::INFINITY;
        let g = |x: &[f64]| Ok(vec![0.0; x.len()]);
        assert!(matches!(
            minimize(&f, &g, &[0.0], Region::Free, &MinimizerConfig::default()),
            Err(Error::OutsideDomain(_))
        ));
    }
}
