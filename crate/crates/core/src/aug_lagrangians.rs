//! The `Φ(y, λ, c)` families: values, gradients, the `Φ₀` map, declared claims, and the
//! assembled `ℒ(x, λ, c) = f(x) + Φ(G(x), λ, c)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::claims::{AxiomId, Claim, Cond, Expectation};
use crate::cones::{pack_sym, unpack_sym, BlockVector, ConeBlock, ConeSpec};
use crate::error::{Error, Result};
use crate::ext::ExtendedReal;
use crate::problems::Problem;
use crate::spectral::{lowner_matrix_derivative, lowner_soc, lowner_soc_jacobian, sym_eig, ScalarFunction};

/// Membership tolerance for multipliers checked against `K*`.
pub const MULTIPLIER_TOL: f64 = 1e-10;

/// The multiplier set `Λ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MultiplierCone {
    /// `Λ = Y*`
    FullDual,
    /// `Λ = K*`
    PolarK,
}

impl fmt::Display for MultiplierCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultiplierCone::FullDual => write!(f, "full-dual"),
            MultiplierCone::PolarK => write!(f, "polar-k"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    RockafellarWets,
    SocQuadratic,
    SdpQuadratic,
    EssentiallyQuadratic,
    Cubic,
    Mangasarian,
    Exponential,
    PenalizedExponential,
    ModifiedBarrier,
    PthPower,
    HeWuMeng,
    SocRescale,
    SdpRescale,
    SdpPenalizedRescale,
}

impl FamilyKind {
    fn is_scalar(self) -> bool {
        matches!(
            self,
            FamilyKind::EssentiallyQuadratic
                | FamilyKind::Cubic
                | FamilyKind::Mangasarian
                | FamilyKind::Exponential
                | FamilyKind::PenalizedExponential
                | FamilyKind::ModifiedBarrier
                | FamilyKind::PthPower
                | FamilyKind::HeWuMeng
        )
    }
}

pub const FAMILY_IDS: &[&str] = &[
    "rw-quadratic",
    "hpr",
    "essentially-quadratic",
    "cubic",
    "mangasarian",
    "exp",
    "log-sigmoid",
    "penalized-exp",
    "modified-frisch",
    "modified-carroll",
    "pth-power",
    "he-wu-meng",
    "soc-rw",
    "sdp-rw",
    "soc-rescale",
    "sdp-rescale",
    "sdp-penalized-rescale",
];

/// `α − dist(y, K)^ϰ` wrapping.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrierParams {
    pub alpha: f64,
    pub kappa: f64,
}

/// Optional overrides accepted by [`make_family`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyParams {
    pub phi: Option<ScalarFunction>,
    pub psi: Option<ScalarFunction>,
    pub xi: Option<ScalarFunction>,
    pub b: Option<f64>,
    pub multiplier_cone: Option<MultiplierCone>,
    pub barrier: Option<BarrierParams>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiFamily {
    pub id: String,
    pub kind: FamilyKind,
    pub multiplier_cone: MultiplierCone,
    pub phi: Option<ScalarFunction>,
    pub psi: Option<ScalarFunction>,
    pub xi: Option<ScalarFunction>,
    pub b: Option<f64>,
    pub barrier: Option<BarrierParams>,
}

impl fmt::Display for PhiFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (Λ = {}", self.id, self.multiplier_cone)?;
        if let Some(p) = self.phi {
            write!(f, ", φ = {}", p.name())?;
        }
        if let Some(p) = self.psi {
            write!(f, ", ψ = {}", p.name())?;
        }
        if let Some(p) = self.xi {
            write!(f, ", ξ = {}", p.name())?;
        }
        if let Some(b) = self.b {
            write!(f, ", b = {b}")?;
        }
        if let Some(w) = self.barrier {
            write!(f, ", barrier α = {}, ϰ = {}", w.alpha, w.kappa)?;
        }
        write!(f, ")")
    }
}

pub fn family_ids() -> &'static [&'static str] {
    FAMILY_IDS
}

/// Builds a family by id with default parameters, then applies overrides.
pub fn make_family(id: &str, params: &FamilyParams) -> Result<PhiFamily> {
    use FamilyKind as K;
    use MultiplierCone::{FullDual, PolarK};
    use ScalarFunction as F;
    let (kind, phi, psi, xi, b, cone) = match id {
        "rw-quadratic" => (K::RockafellarWets, None, None, None, None, FullDual),
        "soc-rw" => (K::SocQuadratic, None, None, None, None, FullDual),
        "sdp-rw" => (K::SdpQuadratic, None, None, None, None, FullDual),
        "hpr" => (K::EssentiallyQuadratic, Some(F::HalfSquare), None, None, None, FullDual),
        "essentially-quadratic" => (K::EssentiallyQuadratic, Some(F::QuadQuartic), None, None, None, FullDual),
        "cubic" => (K::Cubic, None, None, None, None, FullDual),
        "mangasarian" => (K::Mangasarian, Some(F::QuadQuartic), None, None, None, FullDual),
        "exp" => (K::Exponential, Some(F::ExpM1), None, None, None, PolarK),
        "log-sigmoid" => (K::Exponential, Some(F::LogSigmoid), None, None, None, PolarK),
        "penalized-exp" => (K::PenalizedExponential, Some(F::ExpM1), None, Some(F::CubicPositive), None, PolarK),
        "modified-frisch" => (K::ModifiedBarrier, Some(F::Frisch), None, None, None, PolarK),
        "modified-carroll" => (K::ModifiedBarrier, Some(F::Carroll), None, None, None, PolarK),
        "pth-power" => (K::PthPower, Some(F::PositivePart), None, None, Some(1.0), PolarK),
        "he-wu-meng" => (K::HeWuMeng, None, None, None, None, FullDual),
        "soc-rescale" => (K::SocRescale, None, Some(F::Frisch), None, None, PolarK),
        "sdp-rescale" => (K::SdpRescale, None, Some(F::Frisch), None, None, PolarK),
        "sdp-penalized-rescale" => {
            (K::SdpPenalizedRescale, None, Some(F::ExpM1), Some(F::CubicPositive), None, PolarK)
        }
        _ => return Err(Error::UnknownFamily(id.into())),
    };
    let slot = |name: &str, default: Option<ScalarFunction>, given: Option<ScalarFunction>| match (default, given) {
        (_, None) => Ok(default),
        (Some(_), Some(g)) => Ok(Some(g)),
        (None, Some(_)) => Err(Error::InvalidParameter(format!("family {id} takes no {name} parameter"))),
    };
    let fam = PhiFamily {
        id: id.into(),
        kind,
        multiplier_cone: params.multiplier_cone.unwrap_or(cone),
        phi: slot("phi", phi, params.phi)?,
        psi: slot("psi", psi, params.psi)?,
        xi: slot("xi", xi, params.xi)?,
        b: match (b, params.b) {
            (_, None) => b,
            (Some(_), Some(v)) => Some(v),
            (None, Some(_)) => return Err(Error::InvalidParameter(format!("family {id} takes no b parameter"))),
        },
        barrier: None,
    };
    fam.validate()?;
    match params.barrier {
        Some(w) => barrier_wrap(&fam, w.alpha, w.kappa),
        None => Ok(fam),
    }
}

/// `Φ̂(y, λ, c) = s·Φ(y/s, λ, c)` with `s = α − dist(y, K)^ϰ`, `+∞` when `s ≤ 0`.
pub fn barrier_wrap(family: &PhiFamily, alpha: f64, kappa: f64) -> Result<PhiFamily> {
    if !(alpha > 0.0 && alpha.is_finite() && kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidParameter(format!("barrier needs α > 0 and ϰ > 0, got α = {alpha}, ϰ = {kappa}")));
    }
    if family.barrier.is_some() {
        return Err(Error::InvalidParameter(format!("family {} is already wrapped", family.id)));
    }
    let mut out = family.clone();
    out.barrier = Some(BarrierParams { alpha, kappa });
    Ok(out)
}

fn is_c2(f: ScalarFunction) -> bool {
    !matches!(f, ScalarFunction::PositivePart)
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}

fn valid_penalty_xi(x: ScalarFunction) -> bool {
    is_c2(x) && x.is_nondecreasing() && x.value(-1.0) == 0.0 && x.value(0.0) == 0.0 && x.value(1e-3) > 0.0
}

fn valid_rescale_psi(p: ScalarFunction) -> bool {
    is_c2(p)
        && p.is_nondecreasing()
        && p.is_convex()
        && p.value(0.0) == 0.0
        && p.derivative(0.0) == 1.0
        && (p.eps0().is_finite() || p.is_superlinear_at_plus_infinity())
}

impl PhiFamily {
    fn phi(&self) -> ScalarFunction {
        self.phi.expect("family has φ")
    }

    fn psi(&self) -> ScalarFunction {
        self.psi.expect("family has ψ")
    }

    fn xi(&self) -> ScalarFunction {
        self.xi.expect("family has ξ")
    }

    fn validate(&self) -> Result<()> {
        use FamilyKind as K;
        let id = &self.id;
        match self.kind {
            K::EssentiallyQuadratic | K::Mangasarian => {
                let f = self.phi();
                check(
                    is_c2(f)
                        && f.is_strictly_convex()
                        && f.value(0.0) == 0.0
                        && f.derivative(0.0) == 0.0
                        && f.eps0().is_infinite()
                        && !f.is_nondecreasing(),
                    || format!("{id}: φ must be C², strictly convex, φ(0) = φ′(0) = 0 with surjective φ′"),
                )
            }
            K::Exponential | K::PenalizedExponential => {
                let f = self.phi();
                check(
                    is_c2(f) && f.is_nondecreasing() && f.derivative(0.0) > 0.0 && f.value(0.0) == 0.0 && f.eps0().is_infinite(),
                    || format!("{id}: φ must be C², strictly increasing on ℝ with φ(0) = 0"),
                )?;
                if self.kind == K::PenalizedExponential {
                    check(valid_penalty_xi(self.xi()), || {
                        format!("{id}: ξ must be C², non-decreasing, zero on ℝ₋ and positive on (0, ∞)")
                    })?;
                }
                Ok(())
            }
            K::ModifiedBarrier => {
                let f = self.phi();
                check(
                    f.eps0() == 1.0 && f.is_nondecreasing() && f.derivative(0.0) > 0.0 && f.value(0.0) == 0.0,
                    || format!("{id}: φ must be strictly increasing on (−∞, 1) with φ(0) = 0"),
                )
            }
            K::PthPower => {
                let f = self.phi();
                let b = self.b.unwrap_or(f64::NAN);
                check(
                    b >= 0.0
                        && b.is_finite()
                        && matches!(f, ScalarFunction::Exp | ScalarFunction::PositivePart | ScalarFunction::CubicPositive)
                        && f.value(b) > 0.0,
                    || format!("{id}: need b ≥ 0 and a non-decreasing φ ≥ 0 with φ(b) > 0"),
                )
            }
            K::SocRescale | K::SdpRescale => check(valid_rescale_psi(self.psi()), || {
                format!("{id}: ψ must be C², convex, non-decreasing, ψ(0) = 0, ψ′(0) = 1 and superlinear if ε₀ = ∞")
            }),
            K::SdpPenalizedRescale => {
                check(valid_rescale_psi(self.psi()) && self.psi().eps0().is_infinite(), || {
                    format!("{id}: ψ must satisfy the rescaling hypotheses with ε₀ = +∞")
                })?;
                check(valid_penalty_xi(self.xi()) && self.xi().is_convex(), || {
                    format!("{id}: ξ must be C², convex, non-decreasing, zero on ℝ₋ and positive on (0, ∞)")
                })
            }
            K::RockafellarWets | K::SocQuadratic | K::SdpQuadratic | K::Cubic | K::HeWuMeng => Ok(()),
        }
    }

    pub fn supports(&self, block: ConeBlock) -> bool {
        use FamilyKind as K;
        match (self.kind, block) {
            (K::RockafellarWets, _) => true,
            (K::SocQuadratic | K::SocRescale, ConeBlock::SecondOrder(_) | ConeBlock::Zero(_)) => true,
            (K::SdpQuadratic | K::SdpRescale | K::SdpPenalizedRescale, ConeBlock::NegSemidefinite(_) | ConeBlock::Zero(_)) => {
                true
            }
            (K::Mangasarian, ConeBlock::Zero(_)) => true,
            (k, ConeBlock::NegativeOrthant(_)) => k.is_scalar(),
            _ => false,
        }
    }

    /// Checks the cone is made of supported blocks.
    pub fn check_cone(&self, cone: &ConeSpec) -> Result<()> {
        for b in cone.blocks() {
            if !self.supports(*b) {
                return Err(Error::UnsupportedBlock { family: self.id.clone(), block: b.kind_name().into() });
            }
        }
        Ok(())
    }

    /// Whether `λ` lies in `Λ`.
    pub fn multiplier_admissible(&self, cone: &ConeSpec, lambda: &BlockVector) -> Result<bool> {
        cone.check_shape(lambda)?;
        match self.multiplier_cone {
            MultiplierCone::FullDual => Ok(lambda.is_finite()),
            MultiplierCone::PolarK => cone.polar_contains(lambda, MULTIPLIER_TOL * lambda.norm().max(1.0)),
        }
    }

    fn check_inputs(&self, cone: &ConeSpec, y: &BlockVector, lambda: &BlockVector, c: f64) -> Result<()> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::NonPositivePenalty(c));
        }
        cone.check_shape(y)?;
        cone.check_shape(lambda)?;
        self.check_cone(cone)?;
        if !y.is_finite() || !lambda.is_finite() {
            return Err(Error::NonFinite("non-finite y or λ".into()));
        }
        if !self.multiplier_admissible(cone, lambda)? {
            return Err(Error::MultiplierOutsideCone);
        }
        Ok(())
    }

    /// `Φ(y, λ, c)`.
    pub fn value(&self, cone: &ConeSpec, y: &BlockVector, lambda: &BlockVector, c: f64) -> Result<ExtendedReal> {
        self.check_inputs(cone, y, lambda, c)?;
        let v = match self.barrier {
            None => self.base_value(cone, y.as_slice(), lambda.as_slice(), c)?,
            Some(w) => {
                let s = w.alpha - cone.distance(y)?.powf(w.kappa);
                if s <= 0.0 {
                    f64::INFINITY
                } else {
                    let u: Vec<f64> = y.as_slice().iter().map(|v| v / s).collect();
                    s * self.base_value(cone, &u, lambda.as_slice(), c)?
                }
            }
        };
        to_extended(v)
    }

    /// `D_yΦ(y, λ, c)`.
    pub fn grad_y(&self, cone: &ConeSpec, y: &BlockVector, lambda: &BlockVector, c: f64) -> Result<BlockVector> {
        self.check_inputs(cone, y, lambda, c)?;
        let g = match self.barrier {
            None => self.base_grad_y(cone, y.as_slice(), lambda.as_slice(), c)?,
            Some(w) => {
                let proj = cone.project(y)?;
                let r = y.axpy(-1.0, &proj)?;
                let d = r.norm();
                let s = w.alpha - d.powf(w.kappa);
                if s <= 0.0 {
                    return Err(Error::NonDifferentiable("outside the barrier domain".into()));
                }
                let ds: Vec<f64> = if d > 0.0 {
                    let k = -w.kappa * d.powf(w.kappa - 1.0) / d;
                    r.as_slice().iter().map(|v| k * v).collect()
                } else if w.kappa > 1.0 {
                    vec![0.0; y.len()]
                } else {
                    return Err(Error::NonDifferentiable("dist^ϰ with ϰ ≤ 1 at a point of K".into()));
                };
                let u: Vec<f64> = y.as_slice().iter().map(|v| v / s).collect();
                let phi_u = self.base_value(cone, &u, lambda.as_slice(), c)?;
                let gu = self.base_grad_y(cone, &u, lambda.as_slice(), c)?;
                let gy: f64 = gu.iter().zip(y.as_slice()).map(|(a, b)| a * b).sum::<f64>() / s;
                gu.iter().zip(&ds).map(|(g, d)| g + d * (phi_u - gy)).collect()
            }
        };
        finite_vec(g, "gradient in y").and_then(|g| BlockVector::from_flat(cone.sizes(), g))
    }

    /// `D_λΦ(y, λ, c)`; analytic where the formula is simple, central differences otherwise.
    pub fn grad_lambda(&self, cone: &ConeSpec, y: &BlockVector, lambda: &BlockVector, c: f64) -> Result<BlockVector> {
        self.check_inputs(cone, y, lambda, c)?;
        let g = match self.barrier {
            None => self.base_grad_lambda(cone, y.as_slice(), lambda.as_slice(), c)?,
            Some(w) => {
                let s = w.alpha - cone.distance(y)?.powf(w.kappa);
                if s <= 0.0 {
                    return Err(Error::NonDifferentiable("outside the barrier domain".into()));
                }
                let u: Vec<f64> = y.as_slice().iter().map(|v| v / s).collect();
                self.base_grad_lambda(cone, &u, lambda.as_slice(), c)?.into_iter().map(|v| s * v).collect()
            }
        };
        finite_vec(g, "gradient in λ").and_then(|g| BlockVector::from_flat(cone.sizes(), g))
    }

    /// The map `Φ₀` with `D_yΦ(y, λ, c) = Φ₀(λ)` at complementary pairs.
    pub fn phi0(&self, cone: &ConeSpec, lambda: &BlockVector) -> Result<BlockVector> {
        cone.check_shape(lambda)?;
        let data: Vec<f64> = match self.kind {
            FamilyKind::Mangasarian => lambda.as_slice().iter().map(|&l| self.phi().derivative(l)).collect(),
            _ => {
                let k = self.phi0_scale();
                lambda.as_slice().iter().map(|l| k * l).collect()
            }
        };
        BlockVector::from_flat(cone.sizes(), data)
    }

    /// Inverse of `Φ₀`, used by multiplier updates.
    pub fn phi0_inverse(&self, cone: &ConeSpec, v: &BlockVector) -> Result<BlockVector> {
        cone.check_shape(v)?;
        let data: Vec<f64> = match self.kind {
            FamilyKind::Mangasarian => v.as_slice().iter().map(|&t| solve_derivative(self.phi(), t)).collect(),
            _ => {
                let k = self.phi0_scale();
                if k == 0.0 {
                    return Err(Error::InvalidParameter(format!("Φ₀ of {} is not invertible", self.id)));
                }
                v.as_slice().iter().map(|t| t / k).collect()
            }
        };
        BlockVector::from_flat(cone.sizes(), data)
    }

    /// `Φ₀(λ) = kλ` for the linear cases.
    fn phi0_scale(&self) -> f64 {
        match self.kind {
            FamilyKind::Exponential | FamilyKind::PenalizedExponential | FamilyKind::ModifiedBarrier => {
                self.phi().derivative(0.0)
            }
            FamilyKind::PthPower => {
                let b = self.b.unwrap_or(1.0);
                self.phi().derivative(b) / self.phi().value(b)
            }
            _ => 1.0,
        }
    }

    fn base_value(&self, cone: &ConeSpec, y: &[f64], l: &[f64], c: f64) -> Result<f64> {
        let mut total = 0.0;
        let mut o = 0;
        for &blk in cone.blocks() {
            let n = blk.ambient_dim();
            let v = self.block_value(blk, &y[o..o + n], &l[o..o + n], c)?;
            if v == f64::INFINITY {
                return Ok(f64::INFINITY);
            }
            total += v;
            o += n;
        }
        Ok(total)
    }

    fn base_grad_y(&self, cone: &ConeSpec, y: &[f64], l: &[f64], c: f64) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(y.len());
        let mut o = 0;
        for &blk in cone.blocks() {
            let n = blk.ambient_dim();
            out.extend(self.block_grad_y(blk, &y[o..o + n], &l[o..o + n], c)?);
            o += n;
        }
        Ok(out)
    }

    fn base_grad_lambda(&self, cone: &ConeSpec, y: &[f64], l: &[f64], c: f64) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(y.len());
        let mut o = 0;
        for &blk in cone.blocks() {
            let n = blk.ambient_dim();
            out.extend(self.block_grad_lambda(blk, &y[o..o + n], &l[o..o + n], c)?);
            o += n;
        }
        Ok(out)
    }

    fn block_value(&self, blk: ConeBlock, y: &[f64], l: &[f64], c: f64) -> Result<f64> {
        use FamilyKind as K;
        match (self.kind, blk) {
            (K::SdpQuadratic, ConeBlock::NegSemidefinite(n)) => {
                let w: Vec<f64> = y.iter().zip(l).map(|(a, b)| c * a + b).collect();
                let eig = sym_eig(&unpack_sym(n, &w))?;
                let pos: f64 = eig.eigenvalues.iter().map(|r| r.max(0.0).powi(2)).sum();
                Ok((pos - dot(l, l)) / (2.0 * c))
            }
            (K::RockafellarWets | K::SocQuadratic | K::SdpQuadratic, _)
            | (K::SocRescale | K::SdpRescale | K::SdpPenalizedRescale, ConeBlock::Zero(_)) => {
                let w: Vec<f64> = y.iter().zip(l).map(|(a, b)| a + b / c).collect();
                let p = blk.project(&w)?;
                let d2: f64 = w.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum();
                Ok(0.5 * c * (d2 - dot(l, l) / (c * c)))
            }
            (K::SocRescale, ConeBlock::SecondOrder(_)) => {
                let v: Vec<f64> = y.iter().map(|t| -c * t).collect();
                Ok(match lowner_soc(self.psi(), &v)? {
                    None => f64::INFINITY,
                    Some(p) => -dot(l, &p) / c,
                })
            }
            (K::SdpRescale | K::SdpPenalizedRescale, ConeBlock::NegSemidefinite(n)) => {
                let cy: Vec<f64> = y.iter().map(|t| c * t).collect();
                let eig = sym_eig(&unpack_sym(n, &cy))?;
                let psi = self.psi();
                if eig.eigenvalues[0] >= psi.eps0() {
                    return Ok(f64::INFINITY);
                }
                // ⟨λ, Ψ(cy)⟩ = Σ ψ(tᵢ) qᵢᵀλqᵢ, which stays meaningful when some ψ(tᵢ) overflows
                let lm = unpack_sym(n, l);
                let mut v = 0.0;
                for (i, &t) in eig.eigenvalues.iter().enumerate() {
                    let q = eig.eigenvectors.column(i);
                    let w = (q.transpose() * &lm * q)[(0, 0)];
                    if w.abs() > MULTIPLIER_TOL * dot(l, l).sqrt().max(1.0) {
                        v += w * psi.value(t);
                    }
                }
                v /= c;
                if self.kind == K::SdpPenalizedRescale {
                    let xi = self.xi();
                    v += eig.eigenvalues.iter().map(|&t| xi.value(t)).sum::<f64>() / c;
                }
                Ok(v)
            }
            (K::Mangasarian, ConeBlock::Zero(_)) => {
                let f = self.phi();
                Ok(y.iter().zip(l).map(|(&z, &m)| (f.value(c * z + m) - f.value(m)) / c).sum())
            }
            _ => {
                let mut total = 0.0;
                for (&yi, &li) in y.iter().zip(l) {
                    let v = self.scalar_value(yi, li, c)?;
                    if v == f64::INFINITY {
                        return Ok(f64::INFINITY);
                    }
                    total += v;
                }
                Ok(total)
            }
        }
    }

    fn scalar_value(&self, y: f64, l: f64, c: f64) -> Result<f64> {
        use FamilyKind as K;
        let cy = c * y;
        let v = match self.kind {
            K::EssentiallyQuadratic => eq_value(self.phi(), cy, l) / c,
            K::Cubic => {
                let s = l.signum() * l.abs().sqrt();
                ((s + cy).max(0.0).powi(3) - l.abs().powf(1.5)) / (3.0 * c)
            }
            K::Mangasarian => {
                let f = self.phi();
                (f.value((cy + l).max(0.0)) - f.value(l)) / c
            }
            K::Exponential | K::PenalizedExponential => {
                let mut v = if l == 0.0 { 0.0 } else { l / c * self.phi().value(cy) };
                if self.kind == K::PenalizedExponential {
                    v += self.xi().value(cy) / c;
                }
                v
            }
            K::ModifiedBarrier => {
                if cy >= 1.0 {
                    f64::INFINITY
                } else if l == 0.0 {
                    0.0
                } else {
                    l / c * self.phi().value(cy)
                }
            }
            K::PthPower => {
                if l == 0.0 {
                    0.0
                } else {
                    let f = self.phi();
                    let b = self.b.unwrap_or(1.0);
                    l / c * ((f.value(y + b) / f.value(b)).powf(c) - 1.0)
                }
            }
            K::HeWuMeng => hwm_value(y, l, c),
            _ => unreachable!("non-scalar family"),
        };
        if v.is_nan() || v == f64::NEG_INFINITY {
            return Err(Error::NonFinite(format!("{} at y = {y}, λ = {l}, c = {c}", self.id)));
        }
        Ok(v)
    }

    fn block_grad_y(&self, blk: ConeBlock, y: &[f64], l: &[f64], c: f64) -> Result<Vec<f64>> {
        use FamilyKind as K;
        match (self.kind, blk) {
            (K::SdpQuadratic, ConeBlock::NegSemidefinite(n)) => {
                let w: Vec<f64> = y.iter().zip(l).map(|(a, b)| c * a + b).collect();
                let eig = sym_eig(&unpack_sym(n, &w))?;
                Ok(pack_sym(&eig.map(|r| r.max(0.0))))
            }
            (K::RockafellarWets | K::SocQuadratic | K::SdpQuadratic, _)
            | (K::SocRescale | K::SdpRescale | K::SdpPenalizedRescale, ConeBlock::Zero(_)) => {
                let w: Vec<f64> = y.iter().zip(l).map(|(a, b)| a + b / c).collect();
                let p = blk.project(&w)?;
                Ok(w.iter().zip(&p).map(|(a, b)| c * (a - b)).collect())
            }
            (K::SocRescale, ConeBlock::SecondOrder(_)) => {
                let v: Vec<f64> = y.iter().map(|t| -c * t).collect();
                let j = lowner_soc_jacobian(self.psi(), &v)?
                    .ok_or_else(|| Error::NonDifferentiable("outside the domain of Ψ".into()))?;
                let lv = nalgebra::DVector::from_column_slice(l);
                Ok((j * lv).iter().copied().collect())
            }
            (K::SdpRescale | K::SdpPenalizedRescale, ConeBlock::NegSemidefinite(n)) => {
                let cy: Vec<f64> = y.iter().map(|t| c * t).collect();
                let eig = sym_eig(&unpack_sym(n, &cy))?;
                let psi = self.psi();
                if eig.eigenvalues[0] >= psi.eps0() {
                    return Err(Error::NonDifferentiable("outside the domain of Ψ".into()));
                }
                let mut g = lowner_matrix_derivative(psi, &eig, &unpack_sym(n, l));
                if self.kind == K::SdpPenalizedRescale {
                    let xi = self.xi();
                    g += eig.map(|t| xi.derivative(t));
                }
                Ok(pack_sym(&g))
            }
            (K::Mangasarian, ConeBlock::Zero(_)) => {
                let f = self.phi();
                Ok(y.iter().zip(l).map(|(&z, &m)| f.derivative(c * z + m)).collect())
            }
            _ => y.iter().zip(l).map(|(&a, &b)| self.scalar_grad_y(a, b, c)).collect(),
        }
    }

    fn scalar_grad_y(&self, y: f64, l: f64, c: f64) -> Result<f64> {
        use FamilyKind as K;
        let cy = c * y;
        let g = match self.kind {
            K::EssentiallyQuadratic => {
                let d = l + self.phi().derivative(cy);
                if d >= 0.0 {
                    d
                } else {
                    0.0
                }
            }
            K::Cubic => {
                let s = l.signum() * l.abs().sqrt();
                (s + cy).max(0.0).powi(2)
            }
            K::Mangasarian => self.phi().derivative((cy + l).max(0.0)),
            K::Exponential | K::PenalizedExponential => {
                let mut g = if l == 0.0 { 0.0 } else { l * self.phi().derivative(cy) };
                if self.kind == K::PenalizedExponential {
                    g += self.xi().derivative(cy);
                }
                g
            }
            K::ModifiedBarrier => {
                if cy >= 1.0 {
                    return Err(Error::NonDifferentiable("c·y ≥ 1".into()));
                }
                l * self.phi().derivative(cy)
            }
            K::PthPower => {
                let f = self.phi();
                let b = self.b.unwrap_or(1.0);
                let d = f.derivative(y + b);
                if l == 0.0 || d == 0.0 {
                    0.0
                } else {
                    let r = f.value(y + b) / f.value(b);
                    if r == 0.0 {
                        if c > 1.0 {
                            0.0
                        } else {
                            return Err(Error::NonDifferentiable("kink of φ at y + b = 0".into()));
                        }
                    } else {
                        l * r.powf(c - 1.0) * d / f.value(b)
                    }
                }
            }
            K::HeWuMeng => hwm_slope(y, l, c),
            _ => unreachable!("non-scalar family"),
        };
        if !g.is_finite() {
            return Err(Error::NonFinite(format!("{} gradient at y = {y}, λ = {l}, c = {c}", self.id)));
        }
        Ok(g)
    }

    fn block_grad_lambda(&self, blk: ConeBlock, y: &[f64], l: &[f64], c: f64) -> Result<Vec<f64>> {
        use FamilyKind as K;
        match (self.kind, blk) {
            (K::SdpQuadratic, ConeBlock::NegSemidefinite(n)) => {
                let w: Vec<f64> = y.iter().zip(l).map(|(a, b)| c * a + b).collect();
                let eig = sym_eig(&unpack_sym(n, &w))?;
                let p = pack_sym(&eig.map(|r| r.max(0.0)));
                Ok(p.iter().zip(l).map(|(a, b)| (a - b) / c).collect())
            }
            (K::RockafellarWets | K::SocQuadratic | K::SdpQuadratic, _)
            | (K::SocRescale | K::SdpRescale | K::SdpPenalizedRescale, ConeBlock::Zero(_)) => {
                let w: Vec<f64> = y.iter().zip(l).map(|(a, b)| a + b / c).collect();
                let p = blk.project(&w)?;
                Ok(w.iter().zip(&p).zip(l).map(|((a, b), m)| a - b - m / c).collect())
            }
            (K::SocRescale, ConeBlock::SecondOrder(_)) => {
                let v: Vec<f64> = y.iter().map(|t| -c * t).collect();
                let p = lowner_soc(self.psi(), &v)?
                    .ok_or_else(|| Error::NonDifferentiable("outside the domain of Ψ".into()))?;
                Ok(p.iter().map(|t| -t / c).collect())
            }
            (K::SdpRescale | K::SdpPenalizedRescale, ConeBlock::NegSemidefinite(n)) => {
                let cy: Vec<f64> = y.iter().map(|t| c * t).collect();
                let eig = sym_eig(&unpack_sym(n, &cy))?;
                let psi = self.psi();
                if eig.eigenvalues[0] >= psi.eps0() {
                    return Err(Error::NonDifferentiable("outside the domain of Ψ".into()));
                }
                Ok(pack_sym(&eig.map(|t| psi.value(t))).iter().map(|t| t / c).collect())
            }
            (K::Mangasarian, ConeBlock::Zero(_)) => {
                let f = self.phi();
                Ok(y.iter().zip(l).map(|(&z, &m)| (f.derivative(c * z + m) - f.derivative(m)) / c).collect())
            }
            _ => y.iter().zip(l).map(|(&a, &b)| self.scalar_grad_lambda(a, b, c)).collect(),
        }
    }

    fn scalar_grad_lambda(&self, y: f64, l: f64, c: f64) -> Result<f64> {
        use FamilyKind as K;
        let cy = c * y;
        let g = match self.kind {
            K::EssentiallyQuadratic => {
                let f = self.phi();
                if l + f.derivative(cy) >= 0.0 {
                    y
                } else {
                    solve_derivative(f, -l) / c
                }
            }
            K::Mangasarian => {
                let f = self.phi();
                (f.derivative((cy + l).max(0.0)) - f.derivative(l)) / c
            }
            K::Exponential | K::PenalizedExponential => self.phi().value(cy) / c,
            K::ModifiedBarrier => {
                if cy >= 1.0 {
                    return Err(Error::NonDifferentiable("c·y ≥ 1".into()));
                }
                self.phi().value(cy) / c
            }
            K::PthPower => {
                let f = self.phi();
                let b = self.b.unwrap_or(1.0);
                ((f.value(y + b) / f.value(b)).powf(c) - 1.0) / c
            }
            K::Cubic | K::HeWuMeng => {
                let h = 1e-6 * l.abs().max(1.0);
                (self.scalar_value(y, l + h, c)? - self.scalar_value(y, l - h, c)?) / (2.0 * h)
            }
            _ => unreachable!("non-scalar family"),
        };
        if !g.is_finite() {
            return Err(Error::NonFinite(format!("{} λ-gradient at y = {y}, λ = {l}, c = {c}", self.id)));
        }
        Ok(g)
    }

    /// The declared claims, in axiom order. Wrapped families carry no claims.
    pub fn claims(&self) -> Vec<(AxiomId, Claim)> {
        use Claim::{Fails, Holds, HoldsIf, HoldsIff};
        use FamilyKind as K;
        if self.barrier.is_some() {
            return AxiomId::ALL.iter().map(|&a| (a, Claim::Unstated)).collect();
        }
        let lip = |c: Claim| Claim::requires(Cond::MultipliersInPolar, c);
        let only_if_several = |c: Cond| {
            Claim::requires(Cond::Any(vec![Cond::Not(Box::new(Cond::MoreThanOneConstraint)), c.clone()]), HoldsIf(c))
        };
        let table: Vec<Claim> = match self.kind {
            K::RockafellarWets | K::SocQuadratic | K::SdpQuadratic | K::EssentiallyQuadratic | K::Cubic | K::Mangasarian => {
                vec![Holds; 15]
            }
            K::Exponential => vec![
                Holds,
                lip(Holds),
                Holds,
                lip(HoldsIf(Cond::PhiConvex)),
                lip(Holds),
                Fails,
                Fails,
                lip(Holds),
                lip(Holds),
                Holds,
                HoldsIff(Cond::PhiSlopeAtZeroNonzero),
                HoldsIff(Cond::SublinearAtMinusInfinity),
                HoldsIf(Cond::BoundedBelowOrBoundedImage),
                Fails,
                Fails,
            ],
            K::PenalizedExponential => vec![
                Holds,
                lip(Holds),
                Holds,
                lip(HoldsIf(Cond::PhiAndXiConvex)),
                lip(Holds),
                lip(only_if_several(Cond::XiSuperlinearAndBoundedBelow)),
                lip(only_if_several(Cond::XiSuperlinearAndBoundedBelow)),
                lip(Holds),
                lip(Holds),
                Holds,
                HoldsIff(Cond::PhiSlopeAtZeroNonzero),
                HoldsIff(Cond::SublinearAtMinusInfinity),
                HoldsIf(Cond::BoundedBelowOrBoundedImage),
                lip(HoldsIf(Cond::StrictConvexity)),
                lip(Holds),
            ],
            K::ModifiedBarrier => vec![
                Holds,
                lip(Holds),
                Holds,
                lip(HoldsIf(Cond::PhiConvex)),
                lip(Holds),
                Holds,
                Holds,
                lip(Holds),
                lip(Holds),
                Holds,
                HoldsIff(Cond::PhiSlopeAtZeroNonzero),
                HoldsIf(Cond::SublinearAtMinusInfinity),
                HoldsIf(Cond::BoundedBelowOrBoundedImage),
                Fails,
                Holds,
            ],
            K::PthPower => vec![
                Holds,
                lip(Holds),
                Holds,
                lip(Holds),
                lip(Holds),
                Fails,
                Fails,
                lip(Holds),
                lip(Holds),
                Holds,
                HoldsIf(Cond::PhiSlopeAtBNonzero),
                Holds,
                Holds,
                Fails,
                Fails,
            ],
            K::HeWuMeng => vec![
                Holds,
                Holds,
                Holds,
                Holds,
                Holds,
                Holds,
                Claim::FailsIf(Cond::MoreThanOneConstraint),
                HoldsIff(Cond::MultipliersInPolar),
                Holds,
                Holds,
                Holds,
                Holds,
                HoldsIf(Cond::BoundedBelowOrBoundedImage),
                Holds,
                Holds,
            ],
            K::SocRescale => vec![
                Holds,
                lip(Holds),
                Holds,
                lip(Holds),
                Fails,
                HoldsIf(Cond::FiniteDomainBound),
                HoldsIf(Cond::FiniteDomainBound),
                lip(Holds),
                lip(Holds),
                Holds,
                Holds,
                HoldsIf(Cond::SublinearAtMinusInfinity),
                HoldsIf(Cond::BoundedBelowOrBoundedImage),
                Fails,
                HoldsIf(Cond::FiniteDomainBound),
            ],
            K::SdpRescale => vec![
                Holds,
                lip(Holds),
                Holds,
                lip(Holds),
                lip(HoldsIf(Cond::PsiOperatorMonotone)),
                HoldsIf(Cond::FiniteDomainBound),
                HoldsIf(Cond::FiniteDomainBound),
                lip(Holds),
                lip(Holds),
                Holds,
                Holds,
                HoldsIff(Cond::SublinearAtMinusInfinity),
                HoldsIf(Cond::BoundedBelowOrBoundedImage),
                Fails,
                HoldsIf(Cond::FiniteDomainBound),
            ],
            K::SdpPenalizedRescale => vec![
                Holds,
                Holds,
                Holds,
                Holds,
                HoldsIf(Cond::PsiAndXiOperatorMonotone),
                only_if_several(Cond::XiSuperlinearAndBoundedBelow),
                only_if_several(Cond::XiSuperlinearAndBoundedBelow),
                Holds,
                Holds,
                Holds,
                Holds,
                HoldsIff(Cond::SublinearAtMinusInfinity),
                HoldsIf(Cond::BoundedBelowOrBoundedImage),
                HoldsIf(Cond::StrictConvexity),
                Holds,
            ],
        };
        AxiomId::ALL.iter().copied().zip(table).collect()
    }

    pub fn claim(&self, axiom: AxiomId) -> Claim {
        self.claims().into_iter().find(|(a, _)| *a == axiom).map(|(_, c)| c).unwrap_or(Claim::Unstated)
    }

    /// Resolves the declared claim for `axiom` on `cone`.
    pub fn expectation(&self, axiom: AxiomId, cone: &ConeSpec) -> Expectation {
        self.claim(axiom).resolve(&|c| self.condition_holds(c, cone))
    }

    /// Evaluates a claim hypothesis for this family's parameters on `cone`.
    pub fn condition_holds(&self, cond: &Cond, cone: &ConeSpec) -> bool {
        let f = self.phi.or(self.psi);
        let xi = self.xi;
        match cond {
            Cond::MultipliersInPolar => self.multiplier_cone == MultiplierCone::PolarK,
            Cond::PhiConvex => f.is_none_or(|f| f.is_convex()),
            Cond::PhiAndXiConvex => f.is_none_or(|f| f.is_convex()) && xi.is_none_or(|x| x.is_convex()),
            Cond::PhiSlopeAtZeroNonzero => f.is_none_or(|f| f.derivative(0.0) != 0.0),
            Cond::PhiSlopeAtBNonzero => f.is_none_or(|f| f.derivative(self.b.unwrap_or(0.0)) != 0.0),
            Cond::SublinearAtMinusInfinity => f.is_none_or(|f| f.is_sublinear_at_minus_infinity()),
            Cond::XiSuperlinearAndBoundedBelow => {
                xi.is_some_and(|x| x.is_superlinear_at_plus_infinity()) && f.is_none_or(|f| f.is_bounded_below())
            }
            // Audits sample constraint values from a bounded box.
            Cond::BoundedBelowOrBoundedImage => true,
            Cond::MoreThanOneConstraint => {
                cone.orthant_dim() > 1
                    || cone.blocks().iter().filter(|b| matches!(b, ConeBlock::SecondOrder(_))).count() > 1
                    || cone.blocks().iter().any(|b| matches!(b, ConeBlock::NegSemidefinite(n) if *n > 1))
            }
            Cond::FiniteDomainBound => f.is_some_and(|f| f.eps0().is_finite()),
            Cond::PsiOperatorMonotone => f.is_some_and(|f| f.is_operator_monotone()),
            Cond::PsiAndXiOperatorMonotone => {
                f.is_some_and(|f| f.is_operator_monotone()) && xi.is_some_and(|x| x.is_operator_monotone())
            }
            Cond::StrictConvexity => {
                f.is_some_and(|f| f.is_strictly_convex()) && xi.is_some_and(|x| x.is_strictly_convex_on_nonnegatives())
            }
            Cond::Not(c) => !self.condition_holds(c, cone),
            Cond::Any(cs) => cs.iter().any(|c| self.condition_holds(c, cone)),
        }
    }

    /// Default audit cone for the family.
    pub fn default_cone(&self) -> ConeSpec {
        let s = match self.kind {
            FamilyKind::RockafellarWets => "orthant:1,soc:3,nsd:2,zero:1",
            FamilyKind::SocQuadratic => "soc:3,zero:1",
            FamilyKind::SocRescale => "soc:3",
            FamilyKind::SdpQuadratic | FamilyKind::SdpRescale | FamilyKind::SdpPenalizedRescale => "nsd:2,zero:1",
            _ => "orthant:2",
        };
        s.parse().expect("static cone")
    }
}

fn to_extended(v: f64) -> Result<ExtendedReal> {
    if v.is_nan() || v == f64::NEG_INFINITY {
        return Err(Error::NonFinite(format!("Φ evaluated to {v}")));
    }
    Ok(ExtendedReal::from_f64(v))
}

fn finite_vec(v: Vec<f64>, what: &str) -> Result<Vec<f64>> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(v)
    } else {
        Err(Error::NonFinite(what.into()))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `φ′(τ) = target` for strictly convex `φ` with surjective derivative.
pub(crate) fn solve_derivative(phi: ScalarFunction, target: f64) -> f64 {
    if phi == ScalarFunction::HalfSquare {
        return target;
    }
    let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
    while phi.derivative(lo) > target {
        lo *= 2.0;
    }
    while phi.derivative(hi) < target {
        hi *= 2.0;
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let d = phi.derivative(t) - target;
        if d == 0.0 {
            return t;
        }
        if d > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let mut next = t - d / phi.second_derivative(t);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() <= 4.0 * f64::EPSILON * (1.0 + t.abs()) {
            return next;
        }
        t = next;
    }
    t
}

/// `P(t, λ)` of the essentially quadratic family.
fn eq_value(phi: ScalarFunction, t: f64, l: f64) -> f64 {
    if l + phi.derivative(t) >= 0.0 {
        l * t + phi.value(t)
    } else {
        let tau = solve_derivative(phi, -l);
        l * tau + phi.value(tau)
    }
}

/// `√(c²y² + λ²) + cy`, cancellation-free for `y < 0`.
fn hwm_slope(y: f64, l: f64, c: f64) -> f64 {
    let cy = c * y;
    let r = cy.hypot(l);
    if cy >= 0.0 {
        r + cy
    } else {
        l * l / (r - cy)
    }
}

fn hwm_value(y: f64, l: f64, c: f64) -> f64 {
    if l == 0.0 {
        return c * y * (y.abs() + y) / 2.0;
    }
    0.5 * y * hwm_slope(y, l, c) + l * l / (2.0 * c) * (c * y / l.abs()).asinh()
}

/// `ℒ(x, λ, c) = f(x) + Φ(G(x), λ, c)`.
pub fn lagrangian_value(
    problem: &Problem,
    family: &PhiFamily,
    x: &[f64],
    lambda: &BlockVector,
    c: f64,
) -> Result<ExtendedReal> {
    let ev = problem.evaluate(x)?;
    Ok(ExtendedReal::Finite(ev.f) + family.value(&problem.cone, &ev.g, lambda, c)?)
}

/// `∇_x ℒ = ∇f + DG(x)* D_yΦ`; needs a single active objective piece.
pub fn lagrangian_grad_x(
    problem: &Problem,
    family: &PhiFamily,
    x: &[f64],
    lambda: &BlockVector,
    c: f64,
) -> Result<Vec<f64>> {
    let g = problem.g(x)?;
    let gy = family.grad_y(&problem.cone, &g, lambda, c)?;
    let mut grad = problem.objective.gradient(x)?;
    if !g.is_empty() {
        for (a, b) in grad.iter_mut().zip(problem.constraints.adjoint_apply(x, gy.as_slice())) {
            *a += b;
        }
    }
    Ok(grad)
}

pub fn lagrangian_grad_lambda(
    problem: &Problem,
    family: &PhiFamily,
    x: &[f64],
    lambda: &BlockVector,
    c: f64,
) -> Result<BlockVector> {
    let g = problem.g(x)?;
    family.grad_lambda(&problem.cone, &g, lambda, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fam(id: &str) -> PhiFamily {
        make_family(id, &FamilyParams::default()).unwrap()
    }

    fn scalar(f: &PhiFamily, y: f64, l: f64, c: f64) -> ExtendedReal {
        let k: ConeSpec = "orthant:1".parse().unwrap();
        f.value(&k, &k.vector(vec![y]).unwrap(), &k.vector(vec![l]).unwrap(), c).unwrap()
    }

    #[test]
    fn hpr_branch_value() {
        assert_eq!(scalar(&fam("hpr"), -1.0, 2.0, 1.0), ExtendedReal::Finite(-1.5));
    }

    #[test]
    fn hwm_zero_multiplier() {
        assert_relative_eq!(scalar(&fam("he-wu-meng"), 1.0, 0.0, 2.0).to_f64(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn modified_frisch_outside_domain() {
        assert_eq!(scalar(&fam("modified-frisch"), 0.5, 1.0, 2.0), ExtendedReal::PosInf);
        assert_eq!(scalar(&fam("modified-frisch"), 0.5, 0.0, 2.0), ExtendedReal::PosInf);
    }

    #[test]
    fn exponential_vanishes_at_zero() {
        for l in [0.0, 0.5, 3.0] {
            assert_eq!(scalar(&fam("exp"), 0.0, l, 7.0), ExtendedReal::ZERO);
        }
    }

    #[test]
    fn polar_multiplier_enforced() {
        let f = fam("exp");
        let k: ConeSpec = "orthant:1".parse().unwrap();
        let err = f.value(&k, &k.vector(vec![0.0]).unwrap(), &k.vector(vec![-1.0]).unwrap(), 1.0);
        assert_eq!(err, Err(Error::MultiplierOutsideCone));
    }

    #[test]
    fn nonpositive_penalty_rejected() {
        let f = fam("hpr");
        let k: ConeSpec = "orthant:1".parse().unwrap();
        let v = k.vector(vec![0.0]).unwrap();
        assert_eq!(f.value(&k, &v, &v, 0.0), Err(Error::NonPositivePenalty(0.0)));
    }

    #[test]
    fn unsupported_block_rejected() {
        let f = fam("exp");
        let k: ConeSpec = "soc:3".parse().unwrap();
        let v = k.zeros();
        assert!(matches!(f.value(&k, &v, &v, 1.0), Err(Error::UnsupportedBlock { .. })));
    }

    #[test]
    fn invalid_parameters_rejected() {
        let bad = FamilyParams { phi: Some(ScalarFunction::Exp), ..Default::default() };
        assert!(make_family("hpr", &bad).is_err());
        let bad = FamilyParams { psi: Some(ScalarFunction::LogSigmoid), ..Default::default() };
        assert!(make_family("soc-rescale", &bad).is_err());
        assert!(make_family("nope", &FamilyParams::default()).is_err());
        let bad = FamilyParams { phi: Some(ScalarFunction::Frisch), ..Default::default() };
        assert!(make_family("cubic", &bad).is_err());
    }

    #[test]
    fn solve_derivative_quad_quartic() {
        let t = solve_derivative(ScalarFunction::QuadQuartic, -10.0);
        assert_relative_eq!(t + t.powi(3), -10.0, epsilon = 1e-12);
    }

    #[test]
    fn declared_claims_examples() {
        let k: ConeSpec = "orthant:2".parse().unwrap();
        let hpr = fam("hpr");
        for a in &AxiomId::ALL[..12] {
            assert_eq!(hpr.expectation(*a, &k), Expectation::Holds);
        }
        assert_eq!(fam("exp").expectation(AxiomId::A6, &k), Expectation::Fails);
        let mb = fam("modified-frisch");
        assert_eq!(mb.expectation(AxiomId::A6, &k), Expectation::Holds);
        assert_eq!(mb.expectation(AxiomId::A7, &k), Expectation::Holds);
        assert_eq!(fam("he-wu-meng").expectation(AxiomId::A7, &k), Expectation::Fails);
        assert_eq!(fam("he-wu-meng").expectation(AxiomId::A8, &k), Expectation::Fails);
        let one: ConeSpec = "orthant:1".parse().unwrap();
        assert_eq!(fam("he-wu-meng").expectation(AxiomId::A7, &one), Expectation::Unstated);
        let full = make_family(
            "exp",
            &FamilyParams { multiplier_cone: Some(MultiplierCone::FullDual), ..Default::default() },
        )
        .unwrap();
        assert_eq!(full.expectation(AxiomId::A2, &k), Expectation::Fails);
        assert_eq!(full.expectation(AxiomId::A3, &k), Expectation::Holds);
        let sdp: ConeSpec = "nsd:2,zero:1".parse().unwrap();
        assert_eq!(fam("sdp-penalized-rescale").expectation(AxiomId::A5, &sdp), Expectation::Unstated);
        assert_eq!(fam("sdp-rescale").expectation(AxiomId::A5, &sdp), Expectation::Holds);
    }

    #[test]
    fn barrier_wrap_domain() {
        let w = barrier_wrap(&fam("hpr"), 1.0, 3.0).unwrap();
        let k: ConeSpec = "orthant:1".parse().unwrap();
        let l = k.vector(vec![1.0]).unwrap();
        assert_eq!(w.value(&k, &k.vector(vec![1.5]).unwrap(), &l, 1.0).unwrap(), ExtendedReal::PosInf);
        let inside = w.value(&k, &k.vector(vec![-0.4]).unwrap(), &l, 2.0).unwrap().to_f64();
        let base = scalar(&fam("hpr"), -0.4, 1.0, 2.0).to_f64();
        assert_relative_eq!(inside, base, epsilon = 1e-14);
    }
}
