//! Sampling audit of the axioms against each family's declared claims.
//!
//! Pointwise axioms are checked at sampled points, A11 by finite differences at complementary
//! pairs, and the limit axioms on escalating grids. A pass only means no counterexample was seen.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aug_lagrangians::{MultiplierCone, PhiFamily};
use crate::claims::{AxiomId, Expectation};
use crate::cones::{BlockVector, ConeSpec};
use crate::error::{Error, Result};
use crate::ext::{serde_f64, ExtendedReal};
use crate::numdiff;

/// Divergence threshold for the limit axioms.
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;
/// Decay threshold for A12 at the last grid point.
pub const DECAY_THRESHOLD: f64 = 1e-6;
/// Relative tolerance for the A11 derivative identity.
pub const GRADIENT_TOL: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingPlan {
    pub seed: u64,
    /// Half-width of the box `y` is drawn from.
    pub y_half_width: f64,
    /// Half-width of the box `λ` is drawn from.
    pub lambda_half_width: f64,
    /// Increasing grid for the limit axioms in `c`.
    pub c_grid: Vec<f64>,
    /// Penalties used by the pointwise axioms.
    pub pointwise_c: Vec<f64>,
    /// Increasing grid of multiplier scalings for A3.
    pub t_grid: Vec<f64>,
    /// `c₀` for A6, A6s and A7.
    pub c0: f64,
    pub pointwise_samples: usize,
    /// Outer samples `(y, λ)` for the limit axioms.
    pub limit_samples: usize,
    /// Samples per ball (or far region) infimum.
    pub ball_samples: usize,
    pub complementary_pairs: usize,
    /// Minimum distance to `K` of points drawn outside `K`.
    pub outside_distance: f64,
    /// `r` in A7.
    pub far_distance: f64,
    pub far_half_width: f64,
    /// Width of the neighbourhood of `K` used by A13.
    pub near_width: f64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan {
            seed: 20240917,
            y_half_width: 3.0,
            lambda_half_width: 2.0,
            c_grid: (0..=8).map(|k| 10f64.powi(k)).collect(),
            pointwise_c: vec![0.5, 1.0, 10.0, 100.0, 1000.0],
            t_grid: (0..=8).map(|k| 10f64.powi(k)).collect(),
            c0: 0.1,
            pointwise_samples: 200,
            limit_samples: 24,
            ball_samples: 512,
            complementary_pairs: 50,
            outside_distance: 0.5,
            far_distance: 2.0,
            far_half_width: 6.0,
            near_width: 1e-3,
        }
    }
}

impl SamplingPlan {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(format!("sampling plan: {m}")));
        let increasing = |g: &[f64]| !g.is_empty() && g.windows(2).all(|w| w[0] < w[1]) && g.iter().all(|v| *v > 0.0);
        if !(self.y_half_width > 0.0 && self.lambda_half_width > 0.0 && self.far_half_width > self.far_distance) {
            return bad("boxes must be nonempty");
        }
        if !increasing(&self.c_grid) || !increasing(&self.t_grid) || !increasing(&self.pointwise_c) {
            return bad("grids must be positive and increasing");
        }
        if self.c_grid.len() < 3 || self.t_grid.len() < 3 {
            return bad("limit grids need at least three points");
        }
        if !(self.c0 > 0.0 && self.c0 < self.c_grid[0]) {
            return bad("c0 must be positive and below the c-grid");
        }
        if self.pointwise_samples == 0 || self.limit_samples == 0 || self.ball_samples == 0 || self.complementary_pairs == 0 {
            return bad("sample counts must be positive");
        }
        if !(self.outside_distance > 0.0 && self.outside_distance < self.y_half_width) || !(self.near_width > 0.0) {
            return bad("distances out of range");
        }
        Ok(())
    }

    fn c_last(&self) -> f64 {
        *self.c_grid.last().expect("validated")
    }
}

/// Where a limit-axiom infimum was taken.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "region", rename_all = "kebab-case")]
pub enum Region {
    /// A single point (A12) or a ray `t·λ` (A3).
    Point,
    Ball { radius: f64, perturb_lambda: bool },
    Far { distance: f64, half_width: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// One evaluation violating a pointwise inequality.
    Point { y: Vec<f64>, lambda: Vec<f64>, c: f64, value: ExtendedReal },
    /// `y1 − y2 ∈ K` with `Φ(y1) > Φ(y2)`.
    Pair { y1: Vec<f64>, y2: Vec<f64>, lambda: Vec<f64>, c: f64, v1: ExtendedReal, v2: ExtendedReal },
    /// `c1 < c2` with a monotonicity violation.
    CPair { y: Vec<f64>, lambda: Vec<f64>, c1: f64, c2: f64, v1: ExtendedReal, v2: ExtendedReal },
    Gradient {
        y: Vec<f64>,
        lambda: Vec<f64>,
        c: f64,
        finite_difference: Vec<f64>,
        phi0: Vec<f64>,
        #[serde(with = "serde_f64")]
        rel_error: f64,
    },
    /// Values along a grid that neither diverge nor decay as required.
    Trend { y: Vec<f64>, lambda: Vec<f64>, region: Region, grid: Vec<f64>, values: Vec<ExtendedReal>, ball_seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    ConsistentPass,
    CounterexampleFound { witness: Box<Witness> },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn is_counterexample(&self) -> bool {
        matches!(self, Verdict::CounterexampleFound { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::CounterexampleFound { witness } => Some(witness),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    Match,
    Mismatch,
    /// The verdict was inconclusive on a stated claim.
    Unresolved,
    /// Nothing is claimed.
    Unclaimed,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparison::Match => "match",
            Comparison::Mismatch => "mismatch",
            Comparison::Unresolved => "unresolved",
            Comparison::Unclaimed => "unclaimed",
        })
    }
}

pub fn compare(expectation: Expectation, verdict: &Verdict) -> Comparison {
    match (expectation, verdict) {
        (Expectation::Unstated, _) => Comparison::Unclaimed,
        (_, Verdict::Inconclusive { .. }) => Comparison::Unresolved,
        (Expectation::Holds, Verdict::ConsistentPass) | (Expectation::Fails, Verdict::CounterexampleFound { .. }) => {
            Comparison::Match
        }
        _ => Comparison::Mismatch,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomEntry {
    pub axiom: AxiomId,
    pub claim: String,
    pub expectation: Expectation,
    #[serde(flatten)]
    pub verdict: Verdict,
    pub comparison: Comparison,
    pub evaluations: usize,
    /// Samples skipped because evaluation failed.
    pub skipped: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub family: String,
    pub family_id: String,
    pub cone: ConeSpec,
    pub plan: SamplingPlan,
    pub mismatches: usize,
    /// Mismatches first, then axiom order.
    pub entries: Vec<AxiomEntry>,
}

impl AxiomReport {
    pub fn entry(&self, axiom: AxiomId) -> Option<&AxiomEntry> {
        self.entries.iter().find(|e| e.axiom == axiom)
    }
}

/// Per-axiom seed derived from the plan seed.
pub fn axiom_seed(plan_seed: u64, axiom: AxiomId) -> u64 {
    let k = AxiomId::ALL.iter().position(|a| *a == axiom).unwrap_or(0) as u64 + 1;
    plan_seed ^ k.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Runs every axiom in parallel and merges the results.
pub fn check_all(family: &PhiFamily, cone: &ConeSpec, plan: &SamplingPlan) -> Result<AxiomReport> {
    plan.validate()?;
    family.check_cone(cone)?;
    let mut entries: Vec<AxiomEntry> =
        AxiomId::ALL.par_iter().map(|&a| check_axiom(family, cone, a, plan)).collect::<Result<_>>()?;
    entries.sort_by_key(|e| (e.comparison != Comparison::Mismatch, e.axiom));
    let mismatches = entries.iter().filter(|e| e.comparison == Comparison::Mismatch).count();
    Ok(AxiomReport {
        family: family.to_string(),
        family_id: family.id.clone(),
        cone: cone.clone(),
        plan: plan.clone(),
        mismatches,
        entries,
    })
}

pub fn check_axiom(family: &PhiFamily, cone: &ConeSpec, axiom: AxiomId, plan: &SamplingPlan) -> Result<AxiomEntry> {
    plan.validate()?;
    family.check_cone(cone)?;
    let seed = axiom_seed(plan.seed, axiom);
    let mut ctx = Ctx { family, cone, plan, rng: ChaCha8Rng::seed_from_u64(seed), evaluations: 0, skipped: 0 };
    let verdict = ctx.run(axiom)?;
    let expectation = family.expectation(axiom, cone);
    Ok(AxiomEntry {
        axiom,
        claim: family.claim(axiom).to_string(),
        expectation,
        comparison: compare(expectation, &verdict),
        verdict,
        evaluations: ctx.evaluations,
        skipped: ctx.skipped,
        seed,
    })
}

struct Ctx<'a> {
    family: &'a PhiFamily,
    cone: &'a ConeSpec,
    plan: &'a SamplingPlan,
    rng: ChaCha8Rng,
    evaluations: usize,
    skipped: usize,
}

fn counterexample(w: Witness) -> Result<Verdict> {
    Ok(Verdict::CounterexampleFound { witness: Box::new(w) })
}

fn scale(vals: &[ExtendedReal]) -> f64 {
    vals.iter().filter_map(|v| v.finite()).fold(1.0, |m, v| m.max(v.abs()))
}

impl<'a> Ctx<'a> {
    fn eval(&mut self, y: &BlockVector, l: &BlockVector, c: f64) -> Option<ExtendedReal> {
        self.evaluations += 1;
        match self.family.value(self.cone, y, l, c) {
            Ok(v) => Some(v),
            Err(_) => {
                self.skipped += 1;
                None
            }
        }
    }

    fn vec(&self, data: Vec<f64>) -> BlockVector {
        self.cone.vector(data).expect("sampler keeps the cone shape")
    }

    fn boxed(&mut self, half: f64) -> BlockVector {
        let d = self.cone.dim();
        let v = (0..d).map(|_| self.rng.gen_range(-half..=half)).collect();
        self.vec(v)
    }

    /// Box sample with some coordinates zeroed, so faces get hit.
    fn sparse_box(&mut self, half: f64) -> BlockVector {
        let mut v = self.boxed(half);
        for b in 0..v.num_blocks() {
            let whole = self.rng.gen_bool(0.25);
            for x in v.block_mut(b) {
                if whole || self.rng.gen_bool(0.2) {
                    *x = 0.0;
                }
            }
        }
        v
    }

    /// Point just outside `K`: a point of `K` pushed along a normal direction.
    fn just_outside(&mut self) -> BlockVector {
        let v = self.sparse_box(self.plan.y_half_width);
        let p = self.cone.project(&v).expect("projection");
        let n = v.axpy(-1.0, &p).expect("shape");
        let nn = n.norm();
        if nn < 1e-12 {
            return p;
        }
        let t = self.rng.gen_range(0.0..0.5);
        p.axpy(t / nn, &n).expect("shape")
    }

    fn in_k(&mut self) -> BlockVector {
        let v = self.sparse_box(self.plan.y_half_width);
        self.cone.project(&v).expect("projection")
    }

    fn in_polar(&mut self, half: f64) -> BlockVector {
        let v = self.sparse_box(half);
        self.cone.project_polar(&v).expect("projection")
    }

    /// `λ ∈ Λ`; the first draw is `λ = 0`.
    fn multiplier(&mut self, k: usize) -> BlockVector {
        if k.is_multiple_of(8) {
            return self.cone.zeros();
        }
        let h = self.plan.lambda_half_width;
        match self.family.multiplier_cone {
            MultiplierCone::PolarK => self.in_polar(h),
            MultiplierCone::FullDual => {
                if self.rng.gen_bool(0.3) {
                    self.in_polar(h)
                } else {
                    self.sparse_box(h)
                }
            }
        }
    }

    fn project_lambda(&self, l: &BlockVector) -> BlockVector {
        match self.family.multiplier_cone {
            MultiplierCone::PolarK => self.cone.project_polar(l).expect("projection"),
            MultiplierCone::FullDual => l.clone(),
        }
    }

    fn outside_k(&mut self) -> Option<BlockVector> {
        let d_min = self.plan.outside_distance;
        for _ in 0..1000 {
            let v = self.sparse_box(self.plan.y_half_width);
            if self.cone.distance(&v).ok()? >= d_min {
                return Some(v);
            }
        }
        None
    }

    /// `λ ∈ Λ \ K*` at distance at least 0.1 from `K*`.
    fn outside_polar(&mut self) -> Option<BlockVector> {
        if self.family.multiplier_cone == MultiplierCone::PolarK {
            return None;
        }
        for _ in 0..1000 {
            let v = self.sparse_box(self.plan.lambda_half_width);
            if self.cone.polar_distance(&v).ok()? >= 0.1 {
                return Some(v);
            }
        }
        None
    }

    /// Complementary pair from the Moreau decomposition of a random point, rescaled per block.
    fn complementary(&mut self) -> (BlockVector, BlockVector) {
        let v = self.sparse_box(self.plan.y_half_width);
        let y = self.cone.project(&v).expect("projection");
        let mut l = v.axpy(-1.0, &y).expect("shape");
        for b in 0..l.num_blocks() {
            let s = self.rng.gen_range(0.2..1.0) * self.plan.lambda_half_width / self.plan.y_half_width;
            for x in l.block_mut(b) {
                *x *= s;
            }
        }
        (y, l)
    }

    fn near_k(&mut self) -> BlockVector {
        let k = self.in_k();
        let u = unit(&mut self.rng, k.len());
        let r = self.plan.near_width * self.rng.gen::<f64>();
        let data = k.as_slice().iter().zip(&u).map(|(a, b)| a + r * b).collect();
        self.vec(data)
    }

    fn run(&mut self, axiom: AxiomId) -> Result<Verdict> {
        match axiom {
            AxiomId::A1 => self.a1(),
            AxiomId::A2 => self.a2(),
            AxiomId::A3 => self.a3(),
            AxiomId::A4 => self.a4(false),
            AxiomId::A4s => self.a4(true),
            AxiomId::A5 => self.a5(),
            AxiomId::A6 => self.limit_ball(false),
            AxiomId::A6s => self.limit_ball(true),
            AxiomId::A7 => self.a7(),
            AxiomId::A8 => self.a8(),
            AxiomId::A9 => self.a9(),
            AxiomId::A10 => self.a10(),
            AxiomId::A11 => self.a11(),
            AxiomId::A12 => self.a12(),
            AxiomId::A13 => self.a13(),
        }
    }

    fn cs(&self) -> Vec<f64> {
        self.plan.pointwise_c.clone()
    }

    fn point(y: &BlockVector, l: &BlockVector, c: f64, value: ExtendedReal) -> Witness {
        Witness::Point { y: y.as_slice().to_vec(), lambda: l.as_slice().to_vec(), c, value }
    }

    fn a1(&mut self) -> Result<Verdict> {
        let z = self.cone.zeros();
        for k in 0..self.plan.pointwise_samples {
            let y = if k == 0 { self.cone.zeros() } else { self.in_k() };
            for c in self.cs() {
                let Some(v) = self.eval(&y, &z, c) else { continue };
                if !a1_holds(v) {
                    return counterexample(Self::point(&y, &z, c, v));
                }
            }
        }
        Ok(Verdict::ConsistentPass)
    }

    fn a2(&mut self) -> Result<Verdict> {
        for k in 0..self.plan.pointwise_samples {
            let y = self.in_k();
            let l = self.multiplier(k);
            for c in self.cs() {
                let Some(v) = self.eval(&y, &l, c) else { continue };
                if !a2_holds(v) {
                    return counterexample(Self::point(&y, &l, c, v));
                }
            }
        }
        Ok(Verdict::ConsistentPass)
    }

    fn a3(&mut self) -> Result<Verdict> {
        let t_grid = self.plan.t_grid.clone();
        for _ in 0..self.plan.limit_samples {
            let Some(y) = self.outside_k() else { continue };
            let n = self.cone.project_polar(&y)?;
            let n = n.scaled(1.0 / n.norm());
            let mut dirs = vec![n];
            for k in 1..4 {
                let d = self.multiplier(k);
                if d.norm() > 1e-8 {
                    dirs.push(d.scaled(1.0 / d.norm()));
                }
            }
            for c in self.cs() {
                let mut first: Option<(BlockVector, Vec<ExtendedReal>)> = None;
                let mut ok = false;
                for d in &dirs {
                    let vals: Option<Vec<ExtendedReal>> = t_grid.iter().map(|&t| self.eval(&y, &d.scaled(t), c)).collect();
                    let Some(vals) = vals else { continue };
                    if diverges(&vals) {
                        ok = true;
                        break;
                    }
                    first.get_or_insert((d.clone(), vals));
                }
                if !ok {
                    if let Some((d, values)) = first {
                        return counterexample(Witness::Trend {
                            y: y.as_slice().to_vec(),
                            lambda: d.as_slice().to_vec(),
                            region: Region::Point,
                            grid: t_grid,
                            values,
                            ball_seed: c.to_bits(),
                        });
                    }
                }
            }
        }
        Ok(Verdict::ConsistentPass)
    }

    fn a4(&mut self, strict: bool) -> Result<Verdict> {
        let cs = self.cs();
        for k in 0..self.plan.pointwise_samples {
            let y = match k % 3 {
                0 => self.boxed(self.plan.y_half_width),
                1 => self.in_k(),
                _ => self.just_outside(),
            };
            let l = self.multiplier(k);
            for &c1 in &cs {
                let c2 = if strict { 2.0 * c1 } else { c1 * 3.0 };
                let (Some(v1), Some(v2)) = (self.eval(&y, &l, c1), self.eval(&y, &l, c2)) else { continue };
                let bad = if strict {
                    !a4s_holds(v1, v2, self.cone.contains(&y, 1e-12)?)
                } else {
                    !a4_holds(v1, v2)
                };
                if bad {
                    return counterexample(Witness::CPair {
                        y: y.as_slice().to_vec(),
                        lambda: l.as_slice().to_vec(),
                        c1,
                        c2,
                        v1,
                        v2,
                    });
                }
            }
        }
        Ok(Verdict::ConsistentPass)
    }

    fn a5(&mut self) -> Result<Verdict> {
        for k in 0..self.plan.pointwise_samples {
            let y2 = self.boxed(self.plan.y_half_width);
            let kk = self.in_k();
            let y1 = y2.axpy(1.0, &kk)?;
            let l = self.multiplier(k);
            for c in self.cs() {
                let (Some(v1), Some(v2)) = (self.eval(&y1, &l, c), self.eval(&y2, &l, c)) else { continue };
                if !a5_holds(v1, v2) {
                    return counterexample(Witness::Pair {
                        y1: y1.into_vec(),
                        y2: y2.into_vec(),
                        lambda: l.into_vec(),
                        c,
                        v1,
                        v2,
                    });
                }
            }
        }
        Ok(Verdict::ConsistentPass)
    }

    /// Infimum of `Φ(z, μ, c) − Φ(z, μ, c₀)` over seeded samples of a region, for each `c` in the grid.
    fn region_infimum(&mut self, y: &BlockVector, l: &BlockVector, region: &Region, seed: u64) -> Vec<ExtendedReal> {
        let grid = self.plan.c_grid.clone();
        let c0 = self.plan.c0;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut inf = vec![ExtendedReal::PosInf; grid.len()];
        let m = self.cone.dim();
        for s in 0..self.plan.ball_samples {
            let (z, mu) = match region {
                Region::Point => (y.clone(), l.clone()),
                Region::Ball { radius, perturb_lambda } => {
                    let z = if s == 0 { y.clone() } else { self.vec(ball_point(&mut rng, y.as_slice(), *radius)) };
                    let mu = if *perturb_lambda && s > 0 {
                        let raw = self.vec(ball_point(&mut rng, l.as_slice(), *radius));
                        self.project_lambda(&raw)
                    } else {
                        l.clone()
                    };
                    (z, mu)
                }
                Region::Far { distance, half_width } => {
                    let z = if s % 2 == 0 {
                        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-half_width..=*half_width)).collect();
                        let v = self.vec(v);
                        let proj = self.cone.project(&v).expect("projection");
                        let d = v.axpy(-1.0, &proj).expect("shape");
                        let dn = d.norm();
                        if dn >= *distance {
                            v
                        } else if dn > 1e-12 {
                            proj.axpy(distance * rng.gen_range(1.0..1.5) / dn, &d).expect("shape")
                        } else {
                            continue;
                        }
                    } else {
                        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-half_width..=*half_width)).collect();
                        let v = self.vec(v);
                        if self.cone.distance(&v).map_or(true, |d| d < *distance) {
                            continue;
                        }
                        v
                    };
                    (z, l.clone())
                }
            };
            let Some(base) = self.eval(&z, &mu, c0) else { continue };
            let Some(base) = base.finite() else { continue };
            for (i, &c) in grid.iter().enumerate() {
                let Some(v) = self.eval(&z, &mu, c) else { continue };
                let d = v.sub_finite(base);
                if d < inf[i] {
                    inf[i] = d;
                }
            }
            if matches!(region, Region::Point) {
                break;
            }
        }
        inf
    }

    fn limit_ball(&mut self, perturb_lambda: bool) -> Result<Verdict> {
        for k in 0..self.plan.limit_samples {
            let Some(y) = self.outside_k() else { continue };
            let l = self.multiplier(k);
            let dist = self.cone.distance(&y)?;
            let radius = (0.1 * (1.0 + y.norm())).min(dist / 2.0);
            let region = Region::Ball { radius, perturb_lambda };
            let seed: u64 = self.rng.gen();
            let values = self.region_infimum(&y, &l, &region, seed);
            if !diverges(&values) {
                return counterexample(Witness::Trend {
                    y: y.into_vec(),
                    lambda: l.into_vec(),
                    region,
                    grid: self.plan.c_grid.clone(),
                    values,
                    ball_seed: seed,
                });
            }
        }
        Ok(Verdict::ConsistentPass)
    }

    fn a7(&mut self) -> Result<Verdict> {
        let region = Region::Far { distance: self.plan.far_distance, half_width: self.plan.far_half_width };
        let y = self.cone.zeros();
        for k in 0..self.plan.limit_samples {
            let l = self.multiplier(k);
            let seed: u64 = self.rng.gen();
            let values = self.region_infimum(&y, &l, &region, seed);
            if !diverges(&values) {
                return counterexample(Witness::Trend {
                    y: y.into_vec(),
                    lambda: l.into_vec(),
                    region,
                    grid: self.plan.c_grid.clone(),
                    values,
                    ball_seed: seed,
                });
            }
        }
        Ok(Verdict::ConsistentPass)
    }

    fn a8(&mut self) -> Result<Verdict> {
        for _ in 0..self.plan.pointwise_samples {
            let Some(l) = self.outside_polar() else { return Ok(Verdict::ConsistentPass) };
            let y = self.in_k();
            for c in self.cs() {
                let Some(v) = self.eval(&y, &l, c) else { continue };
                if !strictly_negative(v) {
                    return counterexample(Self::point(&y, &l, c, v));
                }
            }
        }
        Ok(Verdict::ConsistentPass)
    }

    fn a9(&mut self) -> Result<Verdict> {
        for k in 0..self.plan.pointwise_samples {
            let y = self.in_k();
            let l = self.multiplier(k);
            if crate::cones::inner(&l, &y)?.abs() <= 1e-6 {
                continue;
            }
            for c in self.cs() {
                let Some(v) = self.eval(&y, &l, c) else { continue };
                if !strictly_negative(v) {
                    return counterexample(Self::point(&y, &l, c, v));
                }
            }
        }
        Ok(Verdict::ConsistentPass)
    }

    fn a10(&mut self) -> Result<Verdict> {
        for _ in 0..self.plan.pointwise_samples {
            let (y, l) = self.complementary();
            let tol = 1e-10 * (y.norm() * l.norm()).max(1.0);
            for c in self.cs() {
                let Some(v) = self.eval(&y, &l, c) else { continue };
                if !matches!(v, ExtendedReal::Finite(x) if x.abs() <= tol) {
                    return counterexample(Self::point(&y, &l, c, v));
                }
            }
        }
        Ok(Verdict::ConsistentPass)
    }

    fn a11(&mut self) -> Result<Verdict> {
        for _ in 0..self.plan.complementary_pairs {
            let (y, l) = self.complementary();
            for c in self.cs() {
                self.evaluations += 2 * y.len();
                match a11_error(self.family, self.cone, &y, &l, c) {
                    Ok((fd, phi0, err)) => {
                        if !(err <= GRADIENT_TOL) {
                            return counterexample(Witness::Gradient {
                                y: y.into_vec(),
                                lambda: l.into_vec(),
                                c,
                                finite_difference: fd,
                                phi0,
                                rel_error: err,
                            });
                        }
                    }
                    Err(_) => self.skipped += 1,
                }
            }
        }
        Ok(Verdict::ConsistentPass)
    }

    fn a12(&mut self) -> Result<Verdict> {
        let grid = self.plan.c_grid.clone();
        let mut slow = None;
        for k in 0..self.plan.pointwise_samples {
            let y = self.in_k();
            let l = self.multiplier(k);
            let vals: Option<Vec<ExtendedReal>> = grid.iter().map(|&c| self.eval(&y, &l, c)).collect();
            let Some(values) = vals else { continue };
            match decay(&values) {
                Decay::Below => {}
                Decay::Decreasing => {
                    slow.get_or_insert_with(|| format!("|Φ| still decreasing at c = {:e} for y = {:?}", grid[grid.len() - 1], y.as_slice()));
                }
                Decay::No => {
                    return counterexample(Witness::Trend {
                        y: y.into_vec(),
                        lambda: l.into_vec(),
                        region: Region::Point,
                        grid,
                        values,
                        ball_seed: 0,
                    });
                }
            }
        }
        Ok(match slow {
            Some(reason) => Verdict::Inconclusive { reason },
            None => Verdict::ConsistentPass,
        })
    }

    fn a13(&mut self) -> Result<Verdict> {
        let c = self.plan.c_last();
        for k in 0..self.plan.pointwise_samples {
            let l = self.multiplier(k);
            for _ in 0..4 {
                let y = self.near_k();
                let Some(v) = self.eval(&y, &l, c) else { continue };
                if !a13_holds(v) {
                    return counterexample(Self::point(&y, &l, c, v));
                }
            }
        }
        Ok(Verdict::ConsistentPass)
    }
}

fn a1_holds(v: ExtendedReal) -> bool {
    v.to_f64() >= -1e-10
}

fn a2_holds(v: ExtendedReal) -> bool {
    matches!(v, ExtendedReal::Finite(x) if x <= 1e-12 * x.abs().max(1.0))
}

fn a4_holds(v1: ExtendedReal, v2: ExtendedReal) -> bool {
    let tol = 1e-10 * scale(&[v1, v2]);
    match (v1, v2) {
        (_, ExtendedReal::PosInf) => true,
        (ExtendedReal::PosInf, _) => false,
        (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => a <= b + tol,
    }
}

fn a4s_holds(v1: ExtendedReal, v2: ExtendedReal, y_in_k: bool) -> bool {
    match (v1, v2) {
        (ExtendedReal::PosInf, _) => true,
        (_, ExtendedReal::PosInf) => true,
        (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => b > a || (a.abs() <= 1e-12 && y_in_k),
    }
}

fn a5_holds(v1: ExtendedReal, v2: ExtendedReal) -> bool {
    a4_holds(v1, v2)
}

fn strictly_negative(v: ExtendedReal) -> bool {
    matches!(v, ExtendedReal::Finite(x) if x < 0.0)
}

fn a13_holds(v: ExtendedReal) -> bool {
    v.to_f64() > -1e-6
}

/// Last value above the threshold and increasing over the last three points (`+∞` counts).
pub fn diverges(values: &[ExtendedReal]) -> bool {
    let n = values.len();
    if n < 3 || values[n - 1].to_f64() <= DIVERGENCE_THRESHOLD {
        return false;
    }
    values[n - 3..].windows(2).all(|w| match (w[0], w[1]) {
        (_, ExtendedReal::PosInf) => true,
        (ExtendedReal::PosInf, _) => false,
        (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => b > a,
    })
}

enum Decay {
    Below,
    Decreasing,
    No,
}

fn decay(values: &[ExtendedReal]) -> Decay {
    let n = values.len();
    let last = values[n - 1].to_f64().abs();
    if last <= DECAY_THRESHOLD {
        return Decay::Below;
    }
    let tail: Vec<f64> = values[n.saturating_sub(3)..].iter().map(|v| v.to_f64().abs()).collect();
    if tail.iter().all(|v| v.is_finite()) && tail.windows(2).all(|w| w[1] < w[0]) {
        Decay::Decreasing
    } else {
        Decay::No
    }
}

/// Relative error between the finite-difference `D_yΦ` and `Φ₀(λ)`.
pub fn a11_error(
    family: &PhiFamily,
    cone: &ConeSpec,
    y: &BlockVector,
    l: &BlockVector,
    c: f64,
) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let phi0 = family.phi0(cone, l)?.into_vec();
    let h = 1e-6 / c.max(1.0);
    let failed = std::cell::RefCell::new(None);
    let fd = numdiff::gradient(
        |z| match cone.vector(z.to_vec()).and_then(|zb| family.value(cone, &zb, l, c)) {
            Ok(v) => v.to_f64(),
            Err(e) => {
                failed.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        y.as_slice(),
        h,
    );
    if let Some(e) = failed.into_inner() {
        return Err(e);
    }
    if fd.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonDifferentiable("Φ is infinite next to y".into()));
    }
    let err = fd.iter().zip(&phi0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let nrm = phi0.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok((fd, phi0, err / nrm.max(1.0)))
}

/// Re-evaluates a witness; `true` when the violation is reproduced.
pub fn replay(family: &PhiFamily, cone: &ConeSpec, axiom: AxiomId, w: &Witness, plan: &SamplingPlan) -> Result<bool> {
    let v = |y: &[f64]| cone.vector(y.to_vec());
    let val = |y: &[f64], l: &[f64], c: f64| family.value(cone, &v(y)?, &v(l)?, c);
    Ok(match (axiom, w) {
        (AxiomId::A1, Witness::Point { y, lambda, c, .. }) => !a1_holds(val(y, lambda, *c)?),
        (AxiomId::A2, Witness::Point { y, lambda, c, .. }) => !a2_holds(val(y, lambda, *c)?),
        (AxiomId::A8 | AxiomId::A9, Witness::Point { y, lambda, c, .. }) => !strictly_negative(val(y, lambda, *c)?),
        (AxiomId::A10, Witness::Point { y, lambda, c, .. }) => {
            let tol = 1e-10 * (norm(y) * norm(lambda)).max(1.0);
            !matches!(val(y, lambda, *c)?, ExtendedReal::Finite(x) if x.abs() <= tol)
        }
        (AxiomId::A13, Witness::Point { y, lambda, c, .. }) => !a13_holds(val(y, lambda, *c)?),
        (AxiomId::A4, Witness::CPair { y, lambda, c1, c2, .. }) => !a4_holds(val(y, lambda, *c1)?, val(y, lambda, *c2)?),
        (AxiomId::A4s, Witness::CPair { y, lambda, c1, c2, .. }) => {
            !a4s_holds(val(y, lambda, *c1)?, val(y, lambda, *c2)?, cone.contains(&v(y)?, 1e-12)?)
        }
        (AxiomId::A5, Witness::Pair { y1, y2, lambda, c, .. }) => !a5_holds(val(y1, lambda, *c)?, val(y2, lambda, *c)?),
        (AxiomId::A11, Witness::Gradient { y, lambda, c, .. }) => {
            a11_error(family, cone, &v(y)?, &v(lambda)?, *c)?.2 > GRADIENT_TOL
        }
        (AxiomId::A3, Witness::Trend { y, lambda, grid, ball_seed, .. }) => {
            let c = f64::from_bits(*ball_seed);
            let d = v(lambda)?;
            let vals: Vec<ExtendedReal> =
                grid.iter().map(|&t| family.value(cone, &v(y)?, &d.scaled(t), c)).collect::<Result<_>>()?;
            !diverges(&vals)
        }
        (AxiomId::A12, Witness::Trend { y, lambda, grid, .. }) => {
            let vals: Vec<ExtendedReal> = grid.iter().map(|&c| val(y, lambda, c)).collect::<Result<_>>()?;
            matches!(decay(&vals), Decay::No)
        }
        (AxiomId::A6 | AxiomId::A6s | AxiomId::A7, Witness::Trend { y, lambda, region, ball_seed, grid, .. }) => {
            let plan = SamplingPlan { c_grid: grid.clone(), ..plan.clone() };
            let mut ctx =
                Ctx { family, cone, plan: &plan, rng: ChaCha8Rng::seed_from_u64(0), evaluations: 0, skipped: 0 };
            !diverges(&ctx.region_infimum(&v(y)?, &v(lambda)?, region, *ball_seed))
        }
        _ => return Err(Error::InvalidParameter(format!("witness kind does not fit axiom {axiom}"))),
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
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

/// Uniform point of the closed ball.
fn ball_point(rng: &mut ChaCha8Rng, center: &[f64], r: f64) -> Vec<f64> {
    let n = center.len();
    let u = unit(rng, n);
    let s = r * rng.gen::<f64>().powf(1.0 / n as f64);
    center.iter().zip(&u).map(|(c, d)| c + s * d).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aug_lagrangians::{make_family, FamilyParams};

    fn fam(id: &str) -> PhiFamily {
        make_family(id, &FamilyParams::default()).unwrap()
    }

    fn small() -> SamplingPlan {
        SamplingPlan { pointwise_samples: 40, limit_samples: 6, ball_samples: 64, complementary_pairs: 10, ..Default::default() }
    }

    #[test]
    fn hpr_a2_passes_and_matches() {
        let k: ConeSpec = "orthant:2".parse().unwrap();
        let e = check_axiom(&fam("hpr"), &k, AxiomId::A2, &small()).unwrap();
        assert_eq!(e.verdict, Verdict::ConsistentPass);
        assert_eq!(e.comparison, Comparison::Match);
    }

    #[test]
    fn exponential_a6_zero_multiplier_witness() {
        let k: ConeSpec = "orthant:2".parse().unwrap();
        let f = fam("exp");
        let plan = small();
        let e = check_axiom(&f, &k, AxiomId::A6, &plan).unwrap();
        let w = e.verdict.witness().expect("counterexample");
        match w {
            Witness::Trend { lambda, .. } => assert!(lambda.iter().all(|v| *v == 0.0)),
            other => panic!("unexpected witness {other:?}"),
        }
        assert!(replay(&f, &k, AxiomId::A6, w, &plan).unwrap());
        assert_eq!(e.comparison, Comparison::Match);
    }

    #[test]
    fn a1_at_origin() {
        for id in ["hpr", "exp", "cubic", "he-wu-meng", "modified-frisch"] {
            let k: ConeSpec = "orthant:1".parse().unwrap();
            let v = fam(id).value(&k, &k.zeros(), &k.zeros(), 3.0).unwrap();
            assert!(v.to_f64() >= -1e-10);
        }
    }

    #[test]
    fn divergence_rule() {
        use ExtendedReal::{Finite as F, PosInf};
        assert!(diverges(&[F(1.0), F(1e5), F(1e7)]));
        assert!(diverges(&[F(1.0), PosInf, PosInf]));
        assert!(!diverges(&[F(1e7), F(2e7), F(2e7)]));
        assert!(!diverges(&[F(0.0), F(0.0), F(0.0)]));
    }

    #[test]
    fn deterministic() {
        let k: ConeSpec = "orthant:2".parse().unwrap();
        let a = check_all(&fam("cubic"), &k, &small()).unwrap();
        let b = check_all(&fam("cubic"), &k, &small()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn plan_validation() {
        let bad = SamplingPlan { c_grid: vec![10.0, 1.0, 100.0], ..Default::default() };
        assert!(bad.validate().is_err());
        assert!(SamplingPlan::default().validate().is_ok());
    }
}
