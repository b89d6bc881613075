//! KKT residuals, saddle-point checks, dual-function estimates, sublevel probes, second-order
//! checks on polyhedral cones, and alternance checks for minimax problems.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aug_lagrangians::{lagrangian_grad_x, lagrangian_value, MultiplierCone, PhiFamily};
use crate::cones::{inner, BlockVector, ConeBlock};
use crate::error::{Error, Result};
use crate::numdiff;
use crate::problems::{FeasibleSet, Problem};
use crate::solvers::{minimize, minimize_lagrangian, MinimizerConfig, Region, SolveStatus};

/// Activity tolerance for constraints, bounds and objective pieces.
pub const ACTIVITY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KktOptions {
    /// Weights over the active objective pieces; uniform when absent.
    pub weights: Option<Vec<f64>>,
    /// With `FullDual` the dual-feasibility component is reported as zero.
    pub multiplier_cone: Option<MultiplierCone>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KktResidual {
    pub stationarity: f64,
    pub feasibility: f64,
    pub complementarity: f64,
    pub dual_feasibility: f64,
    pub total: f64,
    /// `λ ∉ K*` although the residual treats the multiplier as given.
    pub multiplier_outside_polar: bool,
    /// Objective weights were not supplied and several pieces are active.
    pub heuristic_weights: bool,
}

impl KktResidual {
    pub fn undefined() -> KktResidual {
        KktResidual {
            stationarity: f64::NAN,
            feasibility: f64::NAN,
            complementarity: f64::NAN,
            dual_feasibility: f64::NAN,
            total: f64::NAN,
            multiplier_outside_polar: false,
            heuristic_weights: false,
        }
    }
}

pub fn kkt_residual(problem: &Problem, x: &[f64], lambda: &BlockVector, opts: &KktOptions) -> Result<KktResidual> {
    problem.cone.check_shape(lambda)?;
    let g = problem.g(x)?;
    let grad = problem.lagrangian_gradient(x, lambda.as_slice(), opts.weights.as_deref())?;
    let neg: Vec<f64> = grad.iter().map(|v| -v).collect();
    let stationarity = norm(&problem.set.project_tangent(x, &neg, ACTIVITY_TOL));
    let feasibility = problem.cone.distance(&g)?;
    let complementarity = inner(lambda, &g)?.abs();
    let polar_dist = problem.cone.polar_distance(lambda)?;
    let dual_feasibility = match opts.multiplier_cone {
        Some(MultiplierCone::FullDual) => 0.0,
        _ => polar_dist,
    };
    let total = stationarity.max(feasibility).max(complementarity).max(dual_feasibility);
    let heuristic_weights = opts.weights.is_none() && problem.objective.active_set(x, ACTIVITY_TOL).len() > 1;
    Ok(KktResidual {
        stationarity,
        feasibility,
        complementarity,
        dual_feasibility,
        total,
        multiplier_outside_polar: polar_dist > 1e-10 * lambda.norm().max(1.0),
        heuristic_weights,
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let r = norm(&v);
        if r > 1e-12 {
            return v.into_iter().map(|a| a / r).collect();
        }
    }
}

/// Uniform point in the ball of the given radius.
fn in_ball(rng: &mut ChaCha8Rng, center: &[f64], radius: f64) -> Vec<f64> {
    let u = unit(rng, center.len());
    let r = radius * rng.gen::<f64>().powf(1.0 / center.len().max(1) as f64);
    center.iter().zip(&u).map(|(c, d)| c + r * d).collect()
}

// ---------------------------------------------------------------------------------------------
// Saddle points

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SaddleOptions {
    pub c_list: Vec<f64>,
    /// Half-width of the box neighbourhood `U` around `x*`.
    pub radius: f64,
    pub lambda_samples: usize,
    pub ascent_restarts: usize,
    pub lambda_radius: f64,
    pub ray_lengths: Vec<f64>,
    pub inf_starts: usize,
    pub tol: f64,
    pub seed: u64,
    pub inner: MinimizerConfig,
}

impl Default for SaddleOptions {
    fn default() -> Self {
        SaddleOptions {
            c_list: vec![0.5, 1.0, 2.0, 5.0],
            radius: 3.0,
            lambda_samples: 10_000,
            ascent_restarts: 64,
            lambda_radius: 10.0,
            ray_lengths: vec![1.0, 10.0, 100.0, 1e3, 1e4],
            inf_starts: 32,
            tol: 1e-8,
            seed: 0,
            inner: MinimizerConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaddleEntry {
    pub c: f64,
    pub reference_value: f64,
    /// Largest `ℒ(x*, λ, c)` found.
    #[serde(with = "crate::ext::serde_f64")]
    pub sup: f64,
    pub sup_point: Vec<f64>,
    /// `ℒ(x*, λ*, c) − sup`; negative means an improving multiplier was found.
    #[serde(with = "crate::ext::serde_f64")]
    pub sup_margin: f64,
    /// Smallest `ℒ(x, λ*, c)` found on `U ∩ A`.
    #[serde(with = "crate::ext::serde_f64")]
    pub inf: f64,
    pub inf_point: Vec<f64>,
    #[serde(with = "crate::ext::serde_f64")]
    pub inf_margin: f64,
    /// A ray `λ* + t e` along which the value exceeded the reference.
    pub divergent_ray: Option<Vec<f64>>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaddleCheckReport {
    pub family: String,
    pub problem: String,
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    pub entries: Vec<SaddleEntry>,
    pub pass: bool,
    pub lambda_samples: usize,
    pub ascent_restarts: usize,
    pub inf_starts: usize,
    pub radius: f64,
    pub seed: u64,
}

/// Local saddle check on the box neighbourhood `U = x* + [−r, r]^d`.
pub fn local_saddle_check(
    problem: &Problem,
    family: &PhiFamily,
    x_star: &[f64],
    lambda_star: &BlockVector,
    opts: &SaddleOptions,
) -> Result<SaddleCheckReport> {
    family.check_cone(&problem.cone)?;
    if !(opts.radius > 0.0 && opts.tol >= 0.0 && opts.c_list.iter().all(|c| *c > 0.0)) {
        return Err(Error::InvalidParameter("saddle options need positive radius and penalties".into()));
    }
    let entries: Vec<SaddleEntry> = opts
        .c_list
        .par_iter()
        .enumerate()
        .map(|(k, &c)| saddle_at(problem, family, x_star, lambda_star, c, opts, opts.seed.wrapping_add(k as u64)))
        .collect::<Result<_>>()?;
    Ok(SaddleCheckReport {
        family: family.to_string(),
        problem: problem.name.clone(),
        x: x_star.to_vec(),
        lambda: lambda_star.as_slice().to_vec(),
        pass: entries.iter().all(|e| e.pass),
        entries,
        lambda_samples: opts.lambda_samples,
        ascent_restarts: opts.ascent_restarts,
        inf_starts: opts.inf_starts,
        radius: opts.radius,
        seed: opts.seed,
    })
}

fn saddle_at(
    problem: &Problem,
    family: &PhiFamily,
    x_star: &[f64],
    lambda_star: &BlockVector,
    c: f64,
    opts: &SaddleOptions,
    seed: u64,
) -> Result<SaddleEntry> {
    let cone = &problem.cone;
    let reference = lagrangian_value(problem, family, x_star, lambda_star, c)?
        .finite()
        .ok_or_else(|| Error::OutsideDomain(format!("ℒ(x*, λ*, {c}) = +∞")))?;
    let scale = reference.abs().max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let polar = family.multiplier_cone == MultiplierCone::PolarK;
    let admissible = |v: Vec<f64>| -> Result<BlockVector> {
        let b = cone.vector(v)?;
        if polar {
            cone.project_polar(&b)
        } else {
            Ok(b)
        }
    };
    let lval = |l: &BlockVector| -> f64 {
        lagrangian_value(problem, family, x_star, l, c).map(|v| v.to_f64()).unwrap_or(f64::NEG_INFINITY)
    };

    // Sup side.
    let mut sup = reference;
    let mut sup_point = lambda_star.as_slice().to_vec();
    let consider = |v: f64, p: &[f64], sup: &mut f64, sup_point: &mut Vec<f64>| {
        if v > *sup {
            *sup = v;
            *sup_point = p.to_vec();
        }
    };
    let mut restarts: Vec<(f64, Vec<f64>)> = Vec::new();
    for _ in 0..opts.lambda_samples {
        let l = admissible(in_ball(&mut rng, lambda_star.as_slice(), opts.lambda_radius))?;
        let v = lval(&l);
        consider(v, l.as_slice(), &mut sup, &mut sup_point);
        restarts.push((v, l.into_vec()));
    }
    let mut divergent_ray = None;
    for i in 0..cone.dim() {
        for sign in [1.0, -1.0] {
            let mut vals = Vec::new();
            for &t in &opts.ray_lengths {
                let mut v = lambda_star.as_slice().to_vec();
                v[i] += sign * t;
                let l = admissible(v)?;
                let val = lval(&l);
                consider(val, l.as_slice(), &mut sup, &mut sup_point);
                vals.push(val);
            }
            let increasing = vals.windows(2).all(|w| w[1] >= w[0]);
            if divergent_ray.is_none() && increasing && vals.last().is_some_and(|v| *v > reference + opts.tol * scale) {
                let mut e = vec![0.0; cone.dim()];
                e[i] = sign;
                divergent_ray = Some(e);
            }
        }
    }
    // Local ascent from λ* and from the best samples.
    restarts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let g = problem.g(x_star)?;
    let f_star = problem.objective.value(x_star);
    let neg = |l: &[f64]| -> f64 {
        match cone.vector(l.to_vec()).and_then(|b| family.value(cone, &g, &b, c)) {
            Ok(v) => -(f_star + v.to_f64()),
            Err(_) => f64::INFINITY,
        }
    };
    let neg_grad = |l: &[f64]| -> Result<Vec<f64>> {
        let b = cone.vector(l.to_vec())?;
        Ok(family.grad_lambda(cone, &g, &b, c)?.into_vec().into_iter().map(|v| -v).collect())
    };
    let region = if polar { Region::Polar(cone) } else { Region::Free };
    let starts = std::iter::once(lambda_star.as_slice().to_vec())
        .chain(restarts.into_iter().take(opts.ascent_restarts).map(|r| r.1));
    for s in starts {
        if cone.dim() == 0 {
            break;
        }
        match minimize(&neg, &neg_grad, &s, region, &opts.inner) {
            Ok(r) if r.status == SolveStatus::Diverged => {
                sup = f64::INFINITY;
                sup_point = r.x;
                break;
            }
            Ok(r) => consider(-r.f, &r.x, &mut sup, &mut sup_point),
            Err(_) => continue,
        }
    }

    // Inf side over U ∩ A.
    let (lo, hi) = neighbourhood(&problem.set, x_star, opts.radius);
    let u = FeasibleSet::boxed(lo.clone(), hi.clone())?;
    let value = |x: &[f64]| match lagrangian_value(problem, family, x, lambda_star, c) {
        Ok(v) => v.to_f64(),
        Err(_) => f64::INFINITY,
    };
    let grad = |x: &[f64]| lagrangian_grad_x(problem, family, x, lambda_star, c);
    if !problem.objective.is_smooth() {
        return Err(Error::NonsmoothObjective("saddle inf side needs a smooth objective".into()));
    }
    let mut inf = reference;
    let mut inf_point = x_star.to_vec();
    let mut xs = vec![x_star.to_vec()];
    for _ in 0..opts.inf_starts {
        xs.push((0..x_star.len()).map(|i| rng.gen_range(lo[i]..=hi[i])).collect());
    }
    for s in xs {
        let v0 = value(&s);
        if v0 < inf {
            inf = v0;
            inf_point = s.clone();
        }
        if !v0.is_finite() {
            continue;
        }
        if let Ok(r) = minimize(&value, &grad, &s, Region::Set(&u), &opts.inner) {
            if r.f < inf {
                inf = r.f;
                inf_point = r.x;
            }
        }
    }
    let sup_margin = reference - sup;
    let inf_margin = inf - reference;
    let pass = divergent_ray.is_none() && sup_margin >= -opts.tol * scale && inf_margin >= -opts.tol * scale;
    Ok(SaddleEntry {
        c,
        reference_value: reference,
        sup,
        sup_point,
        sup_margin,
        inf,
        inf_point,
        inf_margin,
        divergent_ray,
        pass,
    })
}

fn neighbourhood(set: &FeasibleSet, x: &[f64], r: f64) -> (Vec<f64>, Vec<f64>) {
    let mut lo: Vec<f64> = x.iter().map(|v| v - r).collect();
    let mut hi: Vec<f64> = x.iter().map(|v| v + r).collect();
    if let FeasibleSet::Box { lower, upper } = set {
        for i in 0..x.len() {
            lo[i] = lo[i].max(lower[i]);
            hi[i] = hi[i].min(upper[i]);
        }
    }
    (lo, hi)
}

// ---------------------------------------------------------------------------------------------
// Dual function

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DualOptions {
    pub starts: usize,
    /// Random starts are drawn from `[−radius, radius]^d ∩ A`.
    pub radius: f64,
    pub seed: u64,
    pub inner: MinimizerConfig,
}

impl Default for DualOptions {
    fn default() -> Self {
        DualOptions { starts: 16, radius: 5.0, seed: 0, inner: MinimizerConfig::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualCandidate {
    pub start: Vec<f64>,
    pub x: Vec<f64>,
    #[serde(with = "crate::ext::serde_f64")]
    pub value: f64,
    pub status: SolveStatus,
}

/// Best multistart value of `ℒ(·, λ, c)` over `A`: an upper estimate of `Θ(λ, c)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualEstimate {
    #[serde(with = "crate::ext::serde_f64")]
    pub value: f64,
    pub argmin: Vec<f64>,
    pub candidates: Vec<DualCandidate>,
}

pub fn dual_value(
    problem: &Problem,
    family: &PhiFamily,
    lambda: &BlockVector,
    c: f64,
    opts: &DualOptions,
) -> Result<DualEstimate> {
    if !(c > 0.0) {
        return Err(Error::NonPositivePenalty(c));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts = Vec::new();
    if let Some(r) = &problem.reference {
        starts.push(r.x.clone());
    }
    starts.push(problem.set.project(&vec![0.0; problem.dim]));
    for _ in 0..opts.starts {
        let p: Vec<f64> = (0..problem.dim).map(|_| rng.gen_range(-opts.radius..=opts.radius)).collect();
        starts.push(problem.set.project(&p));
    }
    let candidates: Vec<DualCandidate> = starts
        .into_par_iter()
        .map(|s| match minimize_lagrangian(problem, family, lambda, c, &s, &opts.inner) {
            Ok(r) => Ok(DualCandidate { start: s, x: r.x, value: r.f, status: r.status }),
            Err(Error::OutsideDomain(_)) => {
                Ok(DualCandidate { x: s.clone(), start: s, value: f64::INFINITY, status: SolveStatus::LeftDomain })
            }
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, cand) in candidates.iter().enumerate() {
        let v = if cand.status == SolveStatus::Diverged { f64::NEG_INFINITY } else { cand.value };
        let b = if candidates[best].status == SolveStatus::Diverged { f64::NEG_INFINITY } else { candidates[best].value };
        if v < b {
            best = i;
        }
    }
    let c0 = &candidates[best];
    let value = if c0.status == SolveStatus::Diverged { f64::NEG_INFINITY } else { c0.value };
    Ok(DualEstimate { value, argmin: c0.x.clone(), candidates })
}

// ---------------------------------------------------------------------------------------------
// Sublevel probes

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeOptions {
    pub radii: Vec<f64>,
    pub samples_per_shell: usize,
    /// Threshold for the sublevel set; the reference optimal value when absent.
    pub level: Option<f64>,
    pub tol: f64,
    pub seed: u64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            radii: vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0],
            samples_per_shell: 256,
            level: None,
            tol: 1e-9,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SublevelWitness {
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    pub c: f64,
    pub value: f64,
    pub level: f64,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "verdict")]
pub enum ProbeVerdict {
    /// All sampled points below the level lie within `radius` of the centre.
    BoundedWithin { radius: f64, hits: usize },
    EscapeDetected { witness: SublevelWitness },
    Inconclusive { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub verdict: ProbeVerdict,
    pub center: Vec<f64>,
    pub hits_per_shell: Vec<(f64, usize)>,
    pub seed: u64,
}

pub(crate) fn probe_level(problem: &Problem, level: Option<f64>) -> Result<f64> {
    level
        .or_else(|| problem.reference.as_ref().map(|r| r.f))
        .ok_or_else(|| Error::InvalidParameter(format!("{} has no reference value; give a level", problem.name)))
}

/// Samples shells around the reference point for `ℒ(x, λ, c) < level`.
pub fn sublevel_probe(
    problem: &Problem,
    family: &PhiFamily,
    lambda: &BlockVector,
    c: f64,
    opts: &ProbeOptions,
) -> Result<ProbeReport> {
    if !(c > 0.0) {
        return Err(Error::NonPositivePenalty(c));
    }
    family.check_cone(&problem.cone)?;
    let level = probe_level(problem, opts.level)?;
    let center = problem.reference.as_ref().map(|r| r.x.clone()).unwrap_or_else(|| vec![0.0; problem.dim]);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut hits_per_shell = Vec::new();
    let mut last_hit: Option<(f64, Vec<f64>, f64)> = None;
    let mut evaluated = 0usize;
    let mut max_hit_radius = 0.0;
    let mut hits_total = 0;
    for &r in &opts.radii {
        let mut hits = 0;
        let mut best: Option<(f64, Vec<f64>)> = None;
        for _ in 0..opts.samples_per_shell {
            let u = unit(&mut rng, problem.dim);
            let x = problem.set.project(&center.iter().zip(&u).map(|(a, b)| a + r * b).collect::<Vec<_>>());
            let Ok(v) = lagrangian_value(problem, family, &x, lambda, c) else { continue };
            evaluated += 1;
            let v = v.to_f64();
            if v < level - opts.tol * level.abs().max(1.0) {
                hits += 1;
                if best.as_ref().is_none_or(|b| v < b.0) {
                    best = Some((v, x));
                }
            }
        }
        hits_per_shell.push((r, hits));
        hits_total += hits;
        if let Some((v, x)) = best {
            max_hit_radius = r;
            last_hit = Some((v, x, r));
        } else {
            last_hit = None;
        }
    }
    let verdict = if evaluated == 0 {
        ProbeVerdict::Inconclusive { reason: "no sample could be evaluated".into() }
    } else if let Some((value, x, radius)) = last_hit {
        ProbeVerdict::EscapeDetected {
            witness: SublevelWitness { x, lambda: lambda.as_slice().to_vec(), c, value, level, radius },
        }
    } else {
        ProbeVerdict::BoundedWithin { radius: max_hit_radius, hits: hits_total }
    };
    Ok(ProbeReport { verdict, center, hits_per_shell, seed: opts.seed })
}

/// Re-evaluates a sublevel witness; true when the point is still below the level.
pub fn replay_sublevel(problem: &Problem, family: &PhiFamily, w: &SublevelWitness) -> Result<bool> {
    let lambda = problem.cone.vector(w.lambda.clone())?;
    let v = lagrangian_value(problem, family, &w.x, &lambda, w.c)?;
    Ok(v.to_f64() < w.level)
}

// ---------------------------------------------------------------------------------------------
// Second-order sufficient conditions

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SecondOrderOptions {
    pub samples: usize,
    pub weights: Option<Vec<f64>>,
    pub seed: u64,
}

impl Default for SecondOrderOptions {
    fn default() -> Self {
        SecondOrderOptions { samples: 2000, weights: None, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "verdict")]
pub enum SecondOrderVerdict {
    /// `margin` is the smallest curvature found on unit critical directions (`inf` when the
    /// critical cone is `{0}`).
    SufficientHolds {
        #[serde(with = "crate::ext::serde_f64")]
        margin: f64,
        critical_dim: usize,
    },
    ViolationFound { h: Vec<f64>, value: f64 },
    Inapplicable { reason: String },
}

/// Hessian in `x` of `Σ w_k f_k + ⟨λ, G⟩`.
pub fn lagrangian_hessian(problem: &Problem, x: &[f64], lambda: &[f64], weights: &[(usize, f64)]) -> Result<DMatrix<f64>> {
    let n = problem.dim;
    let h = numdiff::default_step();
    let mut hess = DMatrix::zeros(n, n);
    for &(k, w) in weights {
        let p = &problem.objective.pieces()[k];
        let hk = match p.hessian(x) {
            Ok(m) => m,
            Err(_) => numdiff::hessian_from_gradient(|z| p.gradient(z), x, h),
        };
        hess += hk * w;
    }
    if problem.cone.dim() > 0 {
        match problem.constraints.hessians(x) {
            Ok(hs) => {
                for (m, l) in hs.iter().zip(lambda) {
                    hess += m * *l;
                }
            }
            Err(_) => {
                hess += numdiff::hessian_from_gradient(|z| problem.constraints.adjoint_apply(z, lambda), x, h);
            }
        }
    }
    Ok((&hess + hess.transpose()) * 0.5)
}

fn objective_weights(problem: &Problem, x: &[f64], weights: Option<&[f64]>) -> Result<Vec<(usize, f64)>> {
    let act = problem.objective.active_set(x, ACTIVITY_TOL);
    let w: Vec<f64> = match weights {
        Some(w) if w.len() == act.len() => w.to_vec(),
        Some(w) if w.len() == problem.objective.pieces().len() => act.iter().map(|&k| w[k]).collect(),
        Some(_) => return Err(Error::ShapeMismatch("objective weights".into())),
        None => vec![1.0 / act.len() as f64; act.len()],
    };
    Ok(act.into_iter().zip(w).collect())
}

/// Samples unit directions of the critical cone and checks the curvature of the Lagrangian.
pub fn second_order_check(
    problem: &Problem,
    x: &[f64],
    lambda: &BlockVector,
    opts: &SecondOrderOptions,
) -> Result<SecondOrderVerdict> {
    if !problem.cone.is_polyhedral() {
        return Ok(SecondOrderVerdict::Inapplicable { reason: "second-order cone or PSD block present".into() });
    }
    problem.cone.check_shape(lambda)?;
    let n = problem.dim;
    let g = problem.g(x)?;
    let jac = problem.constraints.jacobian(x);
    let mut eq_rows: Vec<Vec<f64>> = Vec::new();
    let mut ineq_rows: Vec<Vec<f64>> = Vec::new();
    let mut offset = 0;
    for b in problem.cone.blocks() {
        let size = b.size();
        for i in offset..offset + size {
            let row: Vec<f64> = (0..n).map(|j| jac[(i, j)]).collect();
            match b {
                ConeBlock::Zero(_) => eq_rows.push(row),
                ConeBlock::NegativeOrthant(_) => {
                    if g.as_slice()[i].abs() <= ACTIVITY_TOL {
                        if lambda.as_slice()[i] > ACTIVITY_TOL {
                            eq_rows.push(row);
                        } else {
                            ineq_rows.push(row);
                        }
                    }
                }
                _ => unreachable!("polyhedral cone"),
            }
        }
        offset += size;
    }
    // Box: outward normals n with ⟨n, h⟩ ≤ 0.
    for nrm in problem.set.normal_generators(x, ACTIVITY_TOL) {
        ineq_rows.push(nrm);
    }
    let weights = objective_weights(problem, x, opts.weights.as_deref())?;
    if weights.len() > 1 {
        // max_k ⟨∇f_k, h⟩ ≤ 0 on the critical cone.
        for &(k, _) in &weights {
            ineq_rows.push(problem.objective.pieces()[k].gradient(x));
        }
    }
    let hess = lagrangian_hessian(problem, x, lambda.as_slice(), &weights)?;
    let basis = null_space(&eq_rows, n);
    let dim = basis.ncols();
    if dim == 0 {
        return Ok(SecondOrderVerdict::SufficientHolds { margin: f64::INFINITY, critical_dim: 0 });
    }
    let reduced = basis.transpose() * &hess * &basis;
    let min_eig = reduced.symmetric_eigenvalues().min();
    if min_eig > 0.0 {
        return Ok(SecondOrderVerdict::SufficientHolds { margin: min_eig, critical_dim: dim });
    }
    // The nullspace is indefinite; search the cone cut out by the inequalities.
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut margin = f64::INFINITY;
    let mut samples: Vec<DVector<f64>> = Vec::new();
    for j in 0..dim {
        samples.push(basis.column(j).into_owned());
        samples.push(-basis.column(j).into_owned());
    }
    for _ in 0..opts.samples {
        let z = DVector::from_vec(unit(&mut rng, dim));
        samples.push(&basis * z);
    }
    let mut accepted = 0;
    for h in samples {
        let hn = h.norm();
        if hn < 1e-12 {
            continue;
        }
        let h = h / hn;
        if ineq_rows.iter().any(|r| DVector::from_column_slice(r).dot(&h) > ACTIVITY_TOL) {
            continue;
        }
        accepted += 1;
        let q = h.dot(&(&hess * &h));
        if q <= 0.0 {
            return Ok(SecondOrderVerdict::ViolationFound { h: h.as_slice().to_vec(), value: q });
        }
        margin = margin.min(q);
    }
    if accepted == 0 {
        return Ok(SecondOrderVerdict::SufficientHolds { margin: f64::INFINITY, critical_dim: 0 });
    }
    Ok(SecondOrderVerdict::SufficientHolds { margin, critical_dim: dim })
}

/// Orthonormal basis of `{h : ⟨r, h⟩ = 0 for all rows r}`.
fn null_space(rows: &[Vec<f64>], n: usize) -> DMatrix<f64> {
    if rows.is_empty() {
        return DMatrix::identity(n, n);
    }
    let a = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
    let svd = (a.transpose() * &a).symmetric_eigen();
    let scale = svd.eigenvalues.iter().cloned().fold(0.0, f64::max).max(1.0);
    let cols: Vec<DVector<f64>> = (0..n)
        .filter(|&j| svd.eigenvalues[j] <= 1e-10 * scale)
        .map(|j| svd.eigenvectors.column(j).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

// ---------------------------------------------------------------------------------------------
// Alternance

pub const MAX_ALTERNANCE_DIM: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlternanceReport {
    /// A complete (`d + 1`-point) alternance exists.
    pub found: bool,
    /// Largest `p` for which a `p`-point alternance was found; 0 when none.
    pub p: usize,
    /// The `d + 1` columns of the selection achieving `p`.
    pub vectors: Vec<Vec<f64>>,
    pub determinants: Vec<f64>,
    pub signs: Vec<i8>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Pool {
    Gradient,
    Constraint,
    Normal,
}

/// Searches selections of `d + 1` columns from the gradient, constraint and normal pools,
/// padded by `Z` (the identity when absent), for alternating determinant signs.
pub fn alternance_check(problem: &Problem, x: &[f64], z: Option<&[Vec<f64>]>, tol: f64) -> Result<AlternanceReport> {
    let d = problem.dim;
    if d > MAX_ALTERNANCE_DIM {
        return Err(Error::DimensionTooLarge(d));
    }
    if !problem.cone.is_polyhedral() {
        return Err(Error::IncompatibleCone("alternance pools need orthant or zero blocks".into()));
    }
    let zs: Vec<Vec<f64>> = match z {
        Some(z) => {
            if z.len() != d || z.iter().any(|v| v.len() != d) {
                return Err(Error::ShapeMismatch(format!("Z must hold {d} vectors of length {d}")));
            }
            z.to_vec()
        }
        None => (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect(),
    };
    let mut pool: Vec<(Pool, Vec<f64>)> = Vec::new();
    for k in problem.objective.active_set(x, ACTIVITY_TOL) {
        pool.push((Pool::Gradient, problem.objective.pieces()[k].gradient(x)));
    }
    if problem.cone.dim() > 0 {
        let g = problem.g(x)?;
        let jac = problem.constraints.jacobian(x);
        let mut offset = 0;
        for b in problem.cone.blocks() {
            for i in offset..offset + b.size() {
                let row: Vec<f64> = (0..d).map(|j| jac[(i, j)]).collect();
                match b {
                    ConeBlock::NegativeOrthant(_) if g.as_slice()[i].abs() <= ACTIVITY_TOL => {
                        pool.push((Pool::Constraint, row))
                    }
                    ConeBlock::Zero(_) => {
                        pool.push((Pool::Constraint, row.iter().map(|v| -v).collect()));
                        pool.push((Pool::Constraint, row));
                    }
                    _ => {}
                }
            }
            offset += b.size();
        }
    }
    for nrm in problem.set.normal_generators(x, ACTIVITY_TOL) {
        pool.push((Pool::Normal, nrm));
    }
    let mut best: Option<AlternanceReport> = None;
    for p in (1..=d + 1).rev() {
        let mut found: Option<AlternanceReport> = None;
        ordered_selections(pool.len(), p, &mut |sel| {
            // Pool order: gradients, then constraint images, then normals; at least one gradient.
            let kinds: Vec<Pool> = sel.iter().map(|&i| pool[i].0).collect();
            if kinds[0] != Pool::Gradient || !kinds.windows(2).all(|w| rank(w[0]) <= rank(w[1])) {
                return false;
            }
            let head: Vec<Vec<f64>> = sel.iter().map(|&i| pool[i].1.clone()).collect();
            let mut hit = false;
            ordered_selections(zs.len(), d + 1 - p, &mut |zsel| {
                let cols: Vec<Vec<f64>> = head.iter().cloned().chain(zsel.iter().map(|&j| zs[j].clone())).collect();
                let dets = minors(&cols, d);
                if alternates(&dets, p, tol) {
                    found = Some(AlternanceReport {
                        found: p == d + 1,
                        p,
                        signs: dets.iter().map(|v| sign(*v, tol)).collect(),
                        vectors: cols,
                        determinants: dets,
                    });
                    hit = true;
                }
                hit
            });
            hit
        });
        if found.is_some() {
            best = found;
            break;
        }
    }
    Ok(best.unwrap_or(AlternanceReport { found: false, p: 0, vectors: Vec::new(), determinants: Vec::new(), signs: Vec::new() }))
}

fn rank(p: Pool) -> u8 {
    match p {
        Pool::Gradient => 0,
        Pool::Constraint => 1,
        Pool::Normal => 2,
    }
}

fn sign(v: f64, tol: f64) -> i8 {
    if v > tol {
        1
    } else if v < -tol {
        -1
    } else {
        0
    }
}

/// `Δ_s`: determinant of the columns with column `s` removed.
fn minors(cols: &[Vec<f64>], d: usize) -> Vec<f64> {
    (0..cols.len())
        .map(|s| {
            if d == 0 {
                return 1.0;
            }
            let kept: Vec<&Vec<f64>> = cols.iter().enumerate().filter(|(i, _)| *i != s).map(|(_, c)| c).collect();
            DMatrix::from_fn(d, d, |i, j| kept[j][i]).determinant()
        })
        .collect()
}

fn alternates(dets: &[f64], p: usize, tol: f64) -> bool {
    let signs: Vec<i8> = dets.iter().map(|v| sign(*v, tol)).collect();
    signs[..p].iter().all(|s| *s != 0)
        && signs[..p].windows(2).all(|w| w[0] == -w[1])
        && signs[p..].iter().all(|s| *s == 0)
}

/// Calls `f` on every ordered selection of `k` distinct indices from `0..n` until it returns true.
fn ordered_selections(n: usize, k: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn rec(n: usize, k: usize, cur: &mut Vec<usize>, used: &mut Vec<bool>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for i in 0..n {
            if used[i] {
                continue;
            }
            used[i] = true;
            cur.push(i);
            let stop = rec(n, k, cur, used, f);
            cur.pop();
            used[i] = false;
            if stop {
                return true;
            }
        }
        false
    }
    if k > n {
        return false;
    }
    rec(n, k, &mut Vec::with_capacity(k), &mut vec![false; n], f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aug_lagrangians::{make_family, FamilyParams};
    use crate::catalog;
    use approx::assert_relative_eq;

    #[test]
    fn nlp1d_reference_is_kkt() {
        let p = catalog::get("nlp1d").unwrap();
        let r = kkt_residual(&p, &[1.0], &p.multiplier(vec![2.0]).unwrap(), &KktOptions::default()).unwrap();
        assert!(r.total <= 1e-12);
    }

    #[test]
    fn interior_point_zero_multiplier() {
        let p = catalog::get("qp2").unwrap();
        let x = [0.3, -0.2];
        let lam = p.cone.zeros();
        let r = kkt_residual(&p, &x, &lam, &KktOptions::default()).unwrap();
        let g = p.objective.gradient(&x).unwrap();
        assert_relative_eq!(r.stationarity, norm(&g), epsilon = 1e-12);
    }

    #[test]
    fn exmpl_exp_multiplier_outside_polar() {
        let p = catalog::get("exmpl-exp").unwrap();
        let r = kkt_residual(&p, &[-1.0, -1.0], &p.multiplier(vec![-1.0, 3.0]).unwrap(), &KktOptions::default()).unwrap();
        assert_eq!(r.complementarity, 0.0);
        assert!(r.dual_feasibility > 0.0);
        assert!(r.multiplier_outside_polar);
    }

    #[test]
    fn second_order_examples() {
        for name in ["nlp1d", "qp2", "indef-eq"] {
            let p = catalog::get(name).unwrap();
            let r = p.reference.clone().unwrap();
            let v = second_order_check(&p, &r.x, &p.multiplier(r.lambda).unwrap(), &SecondOrderOptions::default()).unwrap();
            assert!(matches!(v, SecondOrderVerdict::SufficientHolds { .. }), "{name}: {v:?}");
        }
    }

    #[test]
    fn alternance_minimax_abs() {
        let p = catalog::get("minimax-abs").unwrap();
        let r = alternance_check(&p, &[0.0], None, 1e-10).unwrap();
        assert!(r.found);
        assert_eq!(r.p, 2);
        assert_eq!(r.signs, vec![-1, 1]);
        let r = alternance_check(&p, &[0.5], None, 1e-10).unwrap();
        assert!(!r.found);
    }

    #[test]
    fn sublevel_escape_for_exponential_at_zero_multiplier() {
        let p = catalog::get("lin1d").unwrap();
        let fam = make_family("exp", &FamilyParams::default()).unwrap();
        let r = sublevel_probe(&p, &fam, &p.cone.zeros(), 1.0, &ProbeOptions::default()).unwrap();
        match r.verdict {
            ProbeVerdict::EscapeDetected { witness } => assert!(replay_sublevel(&p, &fam, &witness).unwrap()),
            v => panic!("{v:?}"),
        }
    }
}
