//! Penalized exact augmented Lagrangians `ℒ_e = ℒ + η` with the barrier terms `a`, `b`, `p`,
//! `q` and the domain `Ω_α`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::analysis::{probe_level, ProbeOptions, ProbeReport, ProbeVerdict, SublevelWitness};
use crate::cones::{pack_sym, unpack_sym, BlockVector, ConeBlock};
use crate::error::{Error, Result};
use crate::ext::ExtendedReal;
use crate::numdiff;
use crate::problems::Problem;
use crate::solvers::{minimize, MinimizerConfig, Region as SolverRegion};
use crate::spectral::{lowner_matrix, sym_eig, ScalarFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    Hpr,
    Cubic,
    PenalizedExp,
    HeWuMeng,
    SocRw,
    SdpRw,
    SdpPenalizedRescale,
}

impl Construction {
    pub const ALL: [Construction; 7] = [
        Construction::Hpr,
        Construction::Cubic,
        Construction::PenalizedExp,
        Construction::HeWuMeng,
        Construction::SocRw,
        Construction::SdpRw,
        Construction::SdpPenalizedRescale,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Construction::Hpr => "hpr",
            Construction::Cubic => "cubic",
            Construction::PenalizedExp => "penalized-exp",
            Construction::HeWuMeng => "he-wu-meng",
            Construction::SocRw => "soc-rw",
            Construction::SdpRw => "sdp-rw",
            Construction::SdpPenalizedRescale => "sdp-penalized-rescale",
        }
    }

    /// The `η` variant the construction is paired with.
    pub fn eta(self) -> EtaVariant {
        match self {
            Construction::Hpr => EtaVariant::Eta1Nlp,
            Construction::Cubic | Construction::PenalizedExp | Construction::HeWuMeng => EtaVariant::Eta2Nlp,
            Construction::SocRw => EtaVariant::EtaSoc,
            Construction::SdpRw | Construction::SdpPenalizedRescale => EtaVariant::EtaSdp,
        }
    }

    /// Whether the multiplier enters through `ζ(λ)` (componentwise or Löwner square).
    pub fn uses_zeta(self) -> bool {
        matches!(
            self,
            Construction::Cubic | Construction::PenalizedExp | Construction::HeWuMeng | Construction::SdpPenalizedRescale
        )
    }

    /// A catalog problem the construction applies to.
    pub fn default_problem(self) -> &'static str {
        match self {
            Construction::Hpr | Construction::Cubic | Construction::PenalizedExp | Construction::HeWuMeng => "nlp1d",
            Construction::SocRw => "soc-toy",
            Construction::SdpRw | Construction::SdpPenalizedRescale => "sdp-toy",
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Construction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Construction> {
        Construction::ALL
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| Error::UnknownConstruction(s.into()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EtaVariant {
    Eta1Nlp,
    Eta2Nlp,
    EtaSoc,
    EtaSdp,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BarrierConfig {
    pub alpha: f64,
    pub kappa: f64,
}

impl Default for BarrierConfig {
    fn default() -> Self {
        BarrierConfig { alpha: 1.0, kappa: 3.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExactAlParams {
    pub barrier: BarrierConfig,
    /// `φ` of the penalized exponential-type construction.
    pub phi: ScalarFunction,
    /// `ψ` of the SDP penalized rescaling construction.
    pub psi: ScalarFunction,
    pub xi: ScalarFunction,
}

impl Default for ExactAlParams {
    fn default() -> Self {
        ExactAlParams {
            barrier: BarrierConfig::default(),
            phi: ScalarFunction::ExpM1,
            psi: ScalarFunction::ExpM1,
            xi: ScalarFunction::CubicPositive,
        }
    }
}

/// Values of the barrier terms at `(x, λ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Barriers {
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub q: f64,
    pub in_omega: bool,
}

pub struct ExactAlInstance<'a> {
    problem: &'a Problem,
    pub construction: Construction,
    pub eta_variant: EtaVariant,
    pub params: ExactAlParams,
    /// The (only) matrix block, for SDP constructions.
    sdp_order: Option<usize>,
}

impl fmt::Debug for ExactAlInstance<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExactAlInstance")
            .field("problem", &self.problem.name)
            .field("construction", &self.construction)
            .field("params", &self.params)
            .finish()
    }
}

impl<'a> ExactAlInstance<'a> {
    pub fn new(problem: &'a Problem, construction: Construction, params: ExactAlParams) -> Result<Self> {
        let BarrierConfig { alpha, kappa } = params.barrier;
        let sdp = matches!(construction, Construction::SdpRw | Construction::SdpPenalizedRescale);
        let kappa_min = if sdp { 1.0 } else { 2.0 };
        if !(alpha > 0.0 && alpha.is_finite() && kappa > kappa_min && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "barrier needs α > 0 and ϰ > {kappa_min}, got α = {alpha}, ϰ = {kappa}"
            )));
        }
        if !problem.objective.is_smooth() {
            return Err(Error::NonsmoothObjective("exact augmented Lagrangians need a smooth objective".into()));
        }
        let blocks = problem.cone.blocks();
        let fits = |ok: fn(&ConeBlock) -> bool| blocks.iter().all(|b| ok(b) || matches!(b, ConeBlock::Zero(_)));
        let compatible = match construction.eta() {
            EtaVariant::Eta1Nlp | EtaVariant::Eta2Nlp => fits(|b| matches!(b, ConeBlock::NegativeOrthant(_))),
            EtaVariant::EtaSoc => fits(|b| matches!(b, ConeBlock::SecondOrder(_))),
            EtaVariant::EtaSdp => {
                fits(|b| matches!(b, ConeBlock::NegSemidefinite(_)))
                    && blocks.iter().filter(|b| matches!(b, ConeBlock::NegSemidefinite(_))).count() == 1
            }
        };
        if !compatible {
            return Err(Error::IncompatibleCone(format!("{construction} cannot be assembled on {}", problem.cone)));
        }
        if construction == Construction::PenalizedExp {
            let f = params.phi;
            let ok = f.value(0.0) == 0.0
                && f.derivative(0.0) == 1.0
                && f.second_derivative(0.0) > 0.0
                && f.is_strictly_convex()
                && f.is_nondecreasing();
            if !ok {
                return Err(Error::InvalidParameter(format!("φ = {} violates φ(0) = 0, φ′(0) = 1, φ″(0) > 0", f.name())));
            }
        }
        if construction == Construction::SdpPenalizedRescale {
            let f = params.psi;
            let ok = f.value(0.0) == 0.0 && f.derivative(0.0) == 1.0 && f.is_convex() && f.is_nondecreasing() && f.eps0().is_infinite();
            if !ok {
                return Err(Error::InvalidParameter(format!("ψ = {} must be a rescaling function with ε₀ = +∞", f.name())));
            }
        }
        if matches!(construction, Construction::PenalizedExp | Construction::SdpPenalizedRescale) {
            let x = params.xi;
            let ok = x.value(-1.0) == 0.0 && x.value(0.0) == 0.0 && x.value(1.0) > 0.0 && x.is_strictly_convex_on_nonnegatives();
            if !ok {
                return Err(Error::InvalidParameter(format!("ξ = {} must vanish on ℝ₋ and be strictly convex on ℝ₊", x.name())));
            }
        }
        let sdp_order = blocks.iter().find_map(|b| match b {
            ConeBlock::NegSemidefinite(n) => Some(*n),
            _ => None,
        });
        Ok(ExactAlInstance { problem, construction, eta_variant: construction.eta(), params, sdp_order })
    }

    pub fn problem(&self) -> &'a Problem {
        self.problem
    }

    fn alpha(&self) -> f64 {
        self.params.barrier.alpha
    }

    /// Splits the packed coordinates into `(constraint-block ranges, equality indices)`.
    fn layout(&self) -> (Vec<(ConeBlock, std::ops::Range<usize>)>, Vec<usize>) {
        let mut blocks = Vec::new();
        let mut eq = Vec::new();
        let mut off = 0;
        for b in self.problem.cone.blocks() {
            let n = b.ambient_dim();
            match b {
                ConeBlock::Zero(_) => eq.extend(off..off + n),
                _ => blocks.push((*b, off..off + n)),
            }
            off += n;
        }
        (blocks, eq)
    }

    /// `ζ(λ)` on the non-equality blocks (identity when the construction does not use it).
    pub fn kkt_multiplier(&self, lambda: &BlockVector) -> Result<BlockVector> {
        self.problem.cone.check_shape(lambda)?;
        if !self.construction.uses_zeta() {
            return Ok(lambda.clone());
        }
        let mut out = lambda.as_slice().to_vec();
        for (b, r) in self.layout().0 {
            match b {
                ConeBlock::NegativeOrthant(_) => {
                    for v in &mut out[r] {
                        *v *= *v;
                    }
                }
                ConeBlock::NegSemidefinite(n) => {
                    let m = unpack_sym(n, &out[r.clone()]);
                    out[r].copy_from_slice(&pack_sym(&(&m * &m)));
                }
                _ => unreachable!("checked at assembly"),
            }
        }
        self.problem.cone.vector(out)
    }

    /// A preimage of the reference multiplier under `ζ` (square roots on `K*`).
    pub fn reference_multiplier(&self) -> Result<Option<BlockVector>> {
        let Some(r) = &self.problem.reference else { return Ok(None) };
        let mut out = r.lambda.clone();
        if self.construction.uses_zeta() {
            for (b, rg) in self.layout().0 {
                match b {
                    ConeBlock::NegativeOrthant(_) => {
                        for v in &mut out[rg] {
                            *v = v.max(0.0).sqrt();
                        }
                    }
                    ConeBlock::NegSemidefinite(n) => {
                        let eig = sym_eig(&unpack_sym(n, &out[rg.clone()]))?;
                        out[rg].copy_from_slice(&pack_sym(&eig.map(|t| t.max(0.0).sqrt())));
                    }
                    _ => unreachable!(),
                }
            }
        }
        Ok(Some(self.problem.cone.vector(out)?))
    }

    pub fn barriers(&self, x: &[f64], lambda: &BlockVector) -> Result<Barriers> {
        let g = self.problem.g(x)?;
        self.barriers_at(g.as_slice(), lambda.as_slice())
    }

    fn barriers_at(&self, g: &[f64], lambda: &[f64]) -> Result<Barriers> {
        let (blocks, eq) = self.layout();
        let kappa = self.params.barrier.kappa;
        let mut viol = 0.0;
        let mut lam_sq = 0.0;
        for (b, r) in &blocks {
            let gb = &g[r.clone()];
            match b {
                ConeBlock::NegativeOrthant(_) => viol += gb.iter().map(|v| v.max(0.0).powf(kappa)).sum::<f64>(),
                ConeBlock::SecondOrder(_) => viol += dist(*b, gb)?.powf(kappa),
                ConeBlock::NegSemidefinite(_) => viol += dist(*b, gb)?.powi(2).powf(kappa),
                ConeBlock::Zero(_) => {}
            }
            lam_sq += if self.construction == Construction::Cubic {
                lambda[r.clone()].iter().map(|v| v.powi(4)).sum::<f64>()
            } else {
                lambda[r.clone()].iter().map(|v| v * v).sum::<f64>()
            };
        }
        let h_sq: f64 = eq.iter().map(|&j| g[j] * g[j]).sum();
        let mu_sq: f64 = eq.iter().map(|&j| lambda[j] * lambda[j]).sum();
        let a = self.alpha() - viol;
        let b = self.alpha() - h_sq;
        Ok(Barriers { a, b, p: a / (1.0 + lam_sq), q: b / (1.0 + mu_sq), in_omega: a > 0.0 && b > 0.0 })
    }

    /// `D_x L(x, μ)` with the multiplier that `η` pairs with.
    fn stationarity(&self, x: &[f64], mult: &[f64]) -> Result<Vec<f64>> {
        self.problem.lagrangian_gradient(x, mult, None)
    }

    /// The penalty term `η(x, λ) ≥ 0`.
    pub fn eta(&self, x: &[f64], lambda: &BlockVector) -> Result<f64> {
        self.problem.cone.check_shape(lambda)?;
        let g = self.problem.g(x)?;
        let g = g.as_slice();
        let l = lambda.as_slice();
        let (blocks, eq) = self.layout();
        let v = match self.eta_variant {
            EtaVariant::Eta1Nlp | EtaVariant::Eta2Nlp => {
                let squared = self.eta_variant == EtaVariant::Eta2Nlp;
                let mult = self.kkt_multiplier(lambda)?;
                let dl = self.stationarity(x, mult.as_slice())?;
                let jac = self.problem.constraints.jacobian(x);
                let proj = |i: usize| (0..x.len()).map(|k| dl[k] * jac[(i, k)]).sum::<f64>();
                let mut s = 0.0;
                for (_, r) in &blocks {
                    for i in r.clone() {
                        if squared {
                            s += proj(i).powi(2) + (g[i] * l[i]).powi(2);
                        } else {
                            s += (proj(i) + g[i] * g[i] * l[i]).powi(2);
                        }
                    }
                }
                for &j in &eq {
                    s += proj(j).powi(2);
                }
                s
            }
            EtaVariant::EtaSoc => {
                let dl = self.stationarity(x, l)?;
                let mut s: f64 = dl.iter().map(|v| v * v).sum();
                for (_, r) in &blocks {
                    let (gb, lb) = (&g[r.clone()], &l[r.clone()]);
                    s += dot(gb, lb).powi(2);
                    s += (1..gb.len()).map(|k| (lb[0] * gb[k] + gb[0] * lb[k]).powi(2)).sum::<f64>();
                }
                s
            }
            EtaVariant::EtaSdp => {
                let mult = self.kkt_multiplier(lambda)?;
                let dl = self.stationarity(x, mult.as_slice())?;
                let mut s: f64 = dl.iter().map(|v| v * v).sum();
                let n = self.sdp_order.expect("SDP instance");
                let (_, r) = &blocks[0];
                let lm = unpack_sym(n, &l[r.clone()]);
                let gm = unpack_sym(n, &g[r.clone()]);
                // trace(λ₀² G₀²) = ‖λ₀ G₀‖_F²
                s += (&lm * &gm).norm_squared();
                s
            }
        };
        Ok(v)
    }

    /// `ℒ_e(x, λ, c)`; `+∞` outside `Ω_α`.
    pub fn value(&self, x: &[f64], lambda: &BlockVector, c: f64) -> Result<ExtendedReal> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::NonPositivePenalty(c));
        }
        self.problem.cone.check_shape(lambda)?;
        if !lambda.is_finite() {
            return Err(Error::NonFinite("λ".into()));
        }
        let ev = self.problem.evaluate(x)?;
        let g = ev.g.as_slice();
        let l = lambda.as_slice();
        let bar = self.barriers_at(g, l)?;
        if !bar.in_omega {
            return Ok(ExtendedReal::PosInf);
        }
        let (blocks, eq) = self.layout();
        let (p, q) = (bar.p, bar.q);
        let mut phi = 0.0;
        for &j in &eq {
            phi += l[j] * g[j] + c / (2.0 * q) * g[j] * g[j];
        }
        match self.construction {
            Construction::Hpr => {
                for (_, r) in &blocks {
                    for i in r.clone() {
                        let m = g[i].max(-p / c * l[i]);
                        phi += l[i] * m + c / (2.0 * p) * m * m;
                    }
                }
            }
            Construction::Cubic => {
                for (_, r) in &blocks {
                    for i in r.clone() {
                        let pl = p * l[i];
                        phi += ((c * g[i] + pl).max(0.0).powi(3) - pl.abs().powi(3)) / (3.0 * c * p * p);
                    }
                }
            }
            Construction::PenalizedExp => {
                let (fphi, fxi) = (self.params.phi, self.params.xi);
                for (_, r) in &blocks {
                    for i in r.clone() {
                        let t = c * g[i] / p;
                        phi += p / c * (l[i] * l[i] * fphi.value(t) + fxi.value(t));
                    }
                }
            }
            Construction::HeWuMeng => {
                for (_, r) in &blocks {
                    for i in r.clone() {
                        phi += hwm_integral(c * g[i], p * l[i] * l[i]) / (c * p);
                    }
                }
            }
            Construction::SocRw | Construction::SdpRw => {
                for (b, r) in &blocks {
                    let shifted: Vec<f64> = r.clone().map(|i| g[i] + p / c * l[i]).collect();
                    let d = dist(*b, &shifted)?;
                    let ln: f64 = l[r.clone()].iter().map(|v| v * v).sum();
                    phi += c / (2.0 * p) * (d * d - p * p / (c * c) * ln);
                }
            }
            Construction::SdpPenalizedRescale => {
                let n = self.sdp_order.expect("SDP instance");
                let (_, r) = &blocks[0];
                let lm = unpack_sym(n, &l[r.clone()]);
                let gm = unpack_sym(n, &g[r.clone()]) * (c / p);
                let Some(psi) = lowner_matrix(self.params.psi, &gm)? else { return Ok(ExtendedReal::PosInf) };
                let Some(xi) = lowner_matrix(self.params.xi, &gm)? else { return Ok(ExtendedReal::PosInf) };
                let l2 = &lm * &lm;
                phi += p / c * (l2.component_mul(&psi).sum() + xi.trace());
            }
        }
        let v = ev.f + phi + self.eta(x, lambda)?;
        if v.is_nan() || v == f64::NEG_INFINITY {
            return Err(Error::NonFinite(format!("ℒ_e at x = {x:?}")));
        }
        Ok(ExtendedReal::from_f64(v))
    }

    /// Central-difference gradient in `(x, λ)`, one-sided next to the boundary of `Ω_α`.
    pub fn gradient(&self, x: &[f64], lambda: &BlockVector, c: f64) -> Result<(Vec<f64>, BlockVector)> {
        let n = x.len();
        let z: Vec<f64> = x.iter().chain(lambda.as_slice()).copied().collect();
        let f = |z: &[f64]| -> f64 {
            match self.problem.cone.vector(z[n..].to_vec()).and_then(|l| self.value(&z[..n], &l, c)) {
                Ok(v) => v.to_f64(),
                Err(_) => f64::INFINITY,
            }
        };
        let f0 = f(&z);
        if !f0.is_finite() {
            return Err(Error::NonDifferentiable("outside Ω_α".into()));
        }
        let mut zp = z.clone();
        let mut grad = Vec::with_capacity(z.len());
        for i in 0..z.len() {
            let h = FD_STEP * z[i].abs().max(1.0);
            zp[i] = z[i] + h;
            let fp = f(&zp);
            zp[i] = z[i] - h;
            let fm = f(&zp);
            zp[i] = z[i];
            let d = match (fp.is_finite(), fm.is_finite()) {
                (true, true) => (fp - fm) / (2.0 * h),
                (true, false) => (fp - f0) / h,
                (false, true) => (f0 - fm) / h,
                (false, false) => return Err(Error::NonDifferentiable("Ω_α too thin for differencing".into())),
            };
            grad.push(d);
        }
        let gl = self.problem.cone.vector(grad.split_off(n))?;
        Ok((grad, gl))
    }

    /// Finite-difference Hessian of `η(x, ·)`.
    pub fn eta_lambda_hessian(&self, x: &[f64], lambda: &BlockVector) -> Result<DMatrix<f64>> {
        let cone = &self.problem.cone;
        let f = |l: &[f64]| cone.vector(l.to_vec()).and_then(|b| self.eta(x, &b)).unwrap_or(f64::NAN);
        let h = numdiff::hessian(f, lambda.as_slice(), 1e-4);
        if h.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("η Hessian".into()));
        }
        Ok(h)
    }
}

const FD_STEP: f64 = 1e-6;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist(b: ConeBlock, v: &[f64]) -> Result<f64> {
    let p = b.project(v)?;
    Ok(v.iter().zip(&p).map(|(a, q)| (a - q) * (a - q)).sum::<f64>().sqrt())
}

/// `∫₀ᵘ (√(t² + A²) + t) dt`, written to avoid cancellation for negative `u`.
fn hwm_integral(u: f64, a: f64) -> f64 {
    let a = a.abs();
    let s = (u * u + a * a).sqrt();
    let tail = if a > 0.0 { a * a * (u / a).asinh() } else { 0.0 };
    let head = if u < 0.0 { u * a * a / (s - u) } else { u * s + u * u };
    0.5 * (head + tail)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExactProbeOptions {
    pub probe: ProbeOptions,
    /// Radius of the `x`-ball used by the mixed shells (`λ` on the shell, `x` near the centre).
    pub x_radius: f64,
    /// Descent steps in `x` applied to the mixed samples; 0 disables.
    pub descent_iterations: usize,
}

impl Default for ExactProbeOptions {
    fn default() -> Self {
        ExactProbeOptions {
            probe: ProbeOptions { radii: vec![1.0, 4.0, 16.0, 64.0, 256.0, 1024.0], ..ProbeOptions::default() },
            x_radius: 0.5,
            descent_iterations: 50,
        }
    }
}

/// Samples shells in `(x, λ)` around the reference pair for `ℒ_e < level`.
pub fn exact_sublevel_probe(inst: &ExactAlInstance<'_>, c: f64, opts: &ExactProbeOptions) -> Result<ProbeReport> {
    if !(c > 0.0) {
        return Err(Error::NonPositivePenalty(c));
    }
    let problem = inst.problem();
    let level = probe_level(problem, opts.probe.level)?;
    let n = problem.dim;
    let m = problem.cone.dim();
    let cx = problem.reference.as_ref().map(|r| r.x.clone()).unwrap_or_else(|| vec![0.0; n]);
    let cl = inst.reference_multiplier()?.map(|b| b.into_vec()).unwrap_or_else(|| vec![0.0; m]);
    let center: Vec<f64> = cx.iter().chain(&cl).copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.probe.seed);
    let mut hits_per_shell = Vec::new();
    let mut last: Option<(f64, Vec<f64>, f64)> = None;
    let mut evaluated = 0;
    let mut max_hit = 0.0;
    let mut total = 0;
    let tol = opts.probe.tol * level.abs().max(1.0);
    for &r in &opts.probe.radii {
        let mut hits = 0;
        let mut best: Option<(f64, Vec<f64>)> = None;
        for k in 0..opts.probe.samples_per_shell {
            let z: Vec<f64> = if k % 2 == 0 || m == 0 {
                let u = unit(&mut rng, n + m);
                center.iter().zip(&u).map(|(a, b)| a + r * b).collect()
            } else {
                let ux = unit(&mut rng, n);
                let rx = opts.x_radius.min(r) * rng.gen::<f64>();
                let ul = unit(&mut rng, m);
                cx.iter()
                    .zip(&ux)
                    .map(|(a, b)| a + rx * b)
                    .chain(cl.iter().zip(&ul).map(|(a, b)| a + r * b))
                    .collect()
            };
            let mut x = problem.set.project(&z[..n]);
            let Ok(l) = problem.cone.vector(z[n..].to_vec()) else { continue };
            if k % 2 == 1 && opts.descent_iterations > 0 {
                // the escape directions can be thin in x, so follow ℒ_e downhill in x first
                let f = |x: &[f64]| inst.value(x, &l, c).map_or(f64::INFINITY, |v| v.to_f64());
                let g = |x: &[f64]| inst.gradient(x, &l, c).map(|(gx, _)| gx);
                let cfg = MinimizerConfig { max_iter: opts.descent_iterations, ..MinimizerConfig::default() };
                if let Ok(rep) = minimize(&f, &g, &x, SolverRegion::Set(&problem.set), &cfg) {
                    x = rep.x;
                }
            }
            let Ok(v) = inst.value(&x, &l, c) else { continue };
            evaluated += 1;
            let v = v.to_f64();
            if v < level - tol {
                hits += 1;
                if best.as_ref().is_none_or(|b| v < b.0) {
                    best = Some((v, x.into_iter().chain(l.into_vec()).collect()));
                }
            }
        }
        hits_per_shell.push((r, hits));
        total += hits;
        last = best.map(|(v, z)| (v, z, r));
        if last.is_some() {
            max_hit = r;
        }
    }
    let verdict = if evaluated == 0 {
        ProbeVerdict::Inconclusive { reason: "no sample inside Ω_α".into() }
    } else if let Some((value, z, radius)) = last {
        ProbeVerdict::EscapeDetected {
            witness: SublevelWitness { x: z[..n].to_vec(), lambda: z[n..].to_vec(), c, value, level, radius },
        }
    } else {
        ProbeVerdict::BoundedWithin { radius: max_hit, hits: total }
    };
    Ok(ProbeReport { verdict, center, hits_per_shell, seed: opts.probe.seed })
}

pub fn replay_exact_sublevel(inst: &ExactAlInstance<'_>, w: &SublevelWitness) -> Result<bool> {
    let l = inst.problem().cone.vector(w.lambda.clone())?;
    Ok(inst.value(&w.x, &l, w.c)?.to_f64() < w.level)
}

fn unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if r > 1e-12 {
            return v.into_iter().map(|a| a / r).collect();
        }
    }
}
