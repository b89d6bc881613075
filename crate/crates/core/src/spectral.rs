//! Symmetric eigendecomposition (cyclic Jacobi) and Löwner operators for symmetric
//! matrices and second-order-cone vectors.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 8;
const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug)]
pub struct EigDecomposition {
    /// Sorted in decreasing order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, matching `eigenvalues`.
    pub eigenvectors: DMatrix<f64>,
}

impl EigDecomposition {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.map(|t| t)
    }

    /// `E diag(f(ρ)) Eᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let n = self.eigenvalues.len();
        let e = &self.eigenvectors;
        let mut out = DMatrix::zeros(n, n);
        for k in 0..n {
            let fk = f(self.eigenvalues[k]);
            if fk == 0.0 {
                continue;
            }
            for i in 0..n {
                let eik = e[(i, k)] * fk;
                for j in 0..n {
                    out[(i, j)] += eik * e[(j, k)];
                }
            }
        }
        out
    }
}

fn frobenius(a: &DMatrix<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Relative asymmetry `‖Y − Yᵀ‖_F / ‖Y‖_F` (zero for the zero matrix).
pub fn asymmetry(y: &DMatrix<f64>) -> f64 {
    let norm = frobenius(y);
    if norm == 0.0 {
        return 0.0;
    }
    frobenius(&(y - y.transpose())) / norm
}

/// Cyclic Jacobi eigensolver for symmetric matrices of order at most 8.
pub fn sym_eig(y: &DMatrix<f64>) -> Result<EigDecomposition> {
    let n = y.nrows();
    if y.ncols() != n {
        return Err(Error::ShapeMismatch(format!("{}x{} matrix is not square", n, y.ncols())));
    }
    if n > MAX_ORDER {
        return Err(Error::OrderTooLarge(n));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix passed to sym_eig".into()));
    }
    let asym = asymmetry(y);
    if asym > 1e-10 {
        return Err(Error::NotSymmetric(asym));
    }
    let mut a = (y + y.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = frobenius(&a);
    let off = |a: &DMatrix<f64>| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)] * a[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    loop {
        let mass = off(&a);
        if mass <= JACOBI_TOL * scale || mass == 0.0 {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNonConvergence { sweeps, residual: mass });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].partial_cmp(&a[(i, i)]).unwrap());
    let eigenvalues = order.iter().map(|&i| a[(i, i)]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        eigenvectors.set_column(col, &v.column(i));
    }
    Ok(EigDecomposition { eigenvalues, eigenvectors })
}

/// Scalar functions used as φ, ψ or ξ by the augmented Lagrangian families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalarFunction {
    /// `t`
    Identity,
    /// `max{0, t}`
    PositivePart,
    /// `eᵗ`
    Exp,
    /// `eᵗ − 1`
    ExpM1,
    /// `2(ln(1 + eᵗ) − ln 2)`
    LogSigmoid,
    /// `−ln(1 − t)` on `(−∞, 1)`
    Frisch,
    /// `1/(1 − t) − 1` on `(−∞, 1)`
    Carroll,
    /// `t²/2`
    HalfSquare,
    /// `t²/2 + t⁴/4`
    QuadQuartic,
    /// `max{0, t}³`
    CubicPositive,
}

impl ScalarFunction {
    pub const ALL: [ScalarFunction; 10] = [
        ScalarFunction::Identity,
        ScalarFunction::PositivePart,
        ScalarFunction::Exp,
        ScalarFunction::ExpM1,
        ScalarFunction::LogSigmoid,
        ScalarFunction::Frisch,
        ScalarFunction::Carroll,
        ScalarFunction::HalfSquare,
        ScalarFunction::QuadQuartic,
        ScalarFunction::CubicPositive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScalarFunction::Identity => "identity",
            ScalarFunction::PositivePart => "positive-part",
            ScalarFunction::Exp => "exp",
            ScalarFunction::ExpM1 => "exp-m1",
            ScalarFunction::LogSigmoid => "log-sigmoid",
            ScalarFunction::Frisch => "frisch",
            ScalarFunction::Carroll => "carroll",
            ScalarFunction::HalfSquare => "half-square",
            ScalarFunction::QuadQuartic => "quad-quartic",
            ScalarFunction::CubicPositive => "cubic-positive",
        }
    }

    pub fn parse(name: &str) -> Option<ScalarFunction> {
        ScalarFunction::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Right end `ε₀` of the domain `(−∞, ε₀)`.
    pub fn eps0(self) -> f64 {
        match self {
            ScalarFunction::Frisch | ScalarFunction::Carroll => 1.0,
            _ => f64::INFINITY,
        }
    }

    pub fn in_domain(self, t: f64) -> bool {
        t < self.eps0()
    }

    /// Value, `+inf` outside the domain.
    pub fn value(self, t: f64) -> f64 {
        if !self.in_domain(t) {
            return f64::INFINITY;
        }
        match self {
            ScalarFunction::Identity => t,
            ScalarFunction::PositivePart => t.max(0.0),
            ScalarFunction::Exp => t.exp(),
            ScalarFunction::ExpM1 => t.exp_m1(),
            ScalarFunction::LogSigmoid => 2.0 * (softplus(t) - std::f64::consts::LN_2),
            ScalarFunction::Frisch => -(-t).ln_1p(),
            ScalarFunction::Carroll => t / (1.0 - t),
            ScalarFunction::HalfSquare => 0.5 * t * t,
            ScalarFunction::QuadQuartic => 0.5 * t * t + 0.25 * t.powi(4),
            ScalarFunction::CubicPositive => t.max(0.0).powi(3),
        }
    }

    /// First derivative (the right derivative at kinks).
    pub fn derivative(self, t: f64) -> f64 {
        if !self.in_domain(t) {
            return f64::INFINITY;
        }
        match self {
            ScalarFunction::Identity => 1.0,
            ScalarFunction::PositivePart => {
                if t >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            ScalarFunction::Exp | ScalarFunction::ExpM1 => t.exp(),
            ScalarFunction::LogSigmoid => 2.0 * sigmoid(t),
            ScalarFunction::Frisch => 1.0 / (1.0 - t),
            ScalarFunction::Carroll => 1.0 / ((1.0 - t) * (1.0 - t)),
            ScalarFunction::HalfSquare => t,
            ScalarFunction::QuadQuartic => t + t.powi(3),
            ScalarFunction::CubicPositive => 3.0 * t.max(0.0).powi(2),
        }
    }

    pub fn second_derivative(self, t: f64) -> f64 {
        if !self.in_domain(t) {
            return f64::INFINITY;
        }
        match self {
            ScalarFunction::Identity | ScalarFunction::PositivePart => 0.0,
            ScalarFunction::Exp | ScalarFunction::ExpM1 => t.exp(),
            ScalarFunction::LogSigmoid => {
                let s = sigmoid(t);
                2.0 * s * (1.0 - s)
            }
            ScalarFunction::Frisch => 1.0 / ((1.0 - t) * (1.0 - t)),
            ScalarFunction::Carroll => 2.0 / (1.0 - t).powi(3),
            ScalarFunction::HalfSquare => 1.0,
            ScalarFunction::QuadQuartic => 1.0 + 3.0 * t * t,
            ScalarFunction::CubicPositive => 6.0 * t.max(0.0),
        }
    }

    pub fn is_convex(self) -> bool {
        true
    }

    pub fn is_strictly_convex(self) -> bool {
        !matches!(self, ScalarFunction::Identity | ScalarFunction::PositivePart | ScalarFunction::CubicPositive)
    }

    /// Strict convexity on `[0, ∞)`.
    pub fn is_strictly_convex_on_nonnegatives(self) -> bool {
        self.is_strictly_convex() || matches!(self, ScalarFunction::CubicPositive)
    }

    pub fn is_nondecreasing(self) -> bool {
        !matches!(self, ScalarFunction::HalfSquare | ScalarFunction::QuadQuartic)
    }

    pub fn is_bounded_below(self) -> bool {
        !matches!(self, ScalarFunction::Identity | ScalarFunction::Frisch)
    }

    /// `f(t)/t → 0` as `t → −∞`.
    pub fn is_sublinear_at_minus_infinity(self) -> bool {
        !matches!(
            self,
            ScalarFunction::Identity | ScalarFunction::HalfSquare | ScalarFunction::QuadQuartic
        )
    }

    /// `f(t)/t → +∞` as `t → +∞` (vacuous for bounded domains).
    pub fn is_superlinear_at_plus_infinity(self) -> bool {
        matches!(
            self,
            ScalarFunction::Exp
                | ScalarFunction::ExpM1
                | ScalarFunction::HalfSquare
                | ScalarFunction::QuadQuartic
                | ScalarFunction::CubicPositive
        )
    }

    /// Known operator (matrix) monotonicity on the domain.
    pub fn is_operator_monotone(self) -> bool {
        matches!(self, ScalarFunction::Identity | ScalarFunction::Frisch | ScalarFunction::Carroll)
    }
}

fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Löwner operator with an arbitrary scalar map and domain bound `eps0`; `None` is the
/// `+∞` flag (some eigenvalue `≥ eps0`).
pub fn lowner_matrix_with(
    f: impl Fn(f64) -> f64,
    eps0: f64,
    y: &DMatrix<f64>,
) -> Result<Option<DMatrix<f64>>> {
    let eig = sym_eig(y)?;
    if eig.eigenvalues.iter().any(|&r| r >= eps0) {
        return Ok(None);
    }
    Ok(Some(eig.map(f)))
}

/// `Ψ(Y) = E diag(ψ(ρ)) Eᵀ`; `None` flags `+∞`.
pub fn lowner_matrix(psi: ScalarFunction, y: &DMatrix<f64>) -> Result<Option<DMatrix<f64>>> {
    lowner_matrix_with(|t| psi.value(t), psi.eps0(), y)
}

/// First divided differences `Γ` of `ψ` at the eigenvalues (Daleckii–Krein kernel).
fn divided_differences(psi: ScalarFunction, rho: &[f64]) -> DMatrix<f64> {
    let n = rho.len();
    DMatrix::from_fn(n, n, |i, j| {
        let (a, b) = (rho[i], rho[j]);
        let gap = (a - b).abs();
        if gap <= 1e-9 * (1.0 + a.abs().max(b.abs())) {
            psi.derivative(0.5 * (a + b))
        } else {
            (psi.value(a) - psi.value(b)) / (a - b)
        }
    })
}

/// Directional derivative `DΨ(Y)[H]` given the eigendecomposition of `Y` (which must lie in
/// the domain).
pub fn lowner_matrix_derivative(psi: ScalarFunction, eig: &EigDecomposition, h: &DMatrix<f64>) -> DMatrix<f64> {
    let e = &eig.eigenvectors;
    let gamma = divided_differences(psi, &eig.eigenvalues);
    let inner = e.transpose() * h * e;
    let mixed = inner.component_mul(&gamma);
    e * mixed * e.transpose()
}

/// Spectral values `(y⁰ + ‖ȳ‖, y⁰ − ‖ȳ‖)` of a second-order-cone vector.
pub fn soc_spectral_values(y: &[f64]) -> (f64, f64) {
    let n = norm(&y[1..]);
    (y[0] + n, y[0] - n)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Löwner operator on a second-order-cone vector; `None` flags `+∞`.
pub fn lowner_soc(psi: ScalarFunction, y: &[f64]) -> Result<Option<Vec<f64>>> {
    lowner_soc_with(|t| psi.value(t), psi.eps0(), y)
}

pub fn lowner_soc_with(f: impl Fn(f64) -> f64, eps0: f64, y: &[f64]) -> Result<Option<Vec<f64>>> {
    if y.len() < 2 {
        return Err(Error::ShapeMismatch(format!("second-order vector of length {}", y.len())));
    }
    let nb = norm(&y[1..]);
    let (hi, lo) = (y[0] + nb, y[0] - nb);
    if hi >= eps0 {
        return Ok(None);
    }
    let mut out = vec![0.0; y.len()];
    if nb == 0.0 {
        out[0] = f(y[0]);
        return Ok(Some(out));
    }
    let (fh, fl) = (f(hi), f(lo));
    out[0] = 0.5 * (fh + fl);
    let scale = 0.5 * (fh - fl) / nb;
    for (o, v) in out[1..].iter_mut().zip(&y[1..]) {
        *o = scale * v;
    }
    Ok(Some(out))
}

/// Jacobian of the second-order-cone Löwner operator (symmetric). `None` outside the domain.
pub fn lowner_soc_jacobian(psi: ScalarFunction, y: &[f64]) -> Result<Option<DMatrix<f64>>> {
    if y.len() < 2 {
        return Err(Error::ShapeMismatch(format!("second-order vector of length {}", y.len())));
    }
    let n = y.len();
    let nb = norm(&y[1..]);
    let (hi, lo) = (y[0] + nb, y[0] - nb);
    if hi >= psi.eps0() {
        return Ok(None);
    }
    if nb <= 1e-12 * (1.0 + y[0].abs()) {
        return Ok(Some(DMatrix::identity(n, n) * psi.derivative(y[0])));
    }
    let w: Vec<f64> = y[1..].iter().map(|v| v / nb).collect();
    let b = 0.5 * (psi.derivative(hi) + psi.derivative(lo));
    let c = 0.5 * (psi.derivative(hi) - psi.derivative(lo));
    let a = (psi.value(hi) - psi.value(lo)) / (hi - lo);
    let mut j = DMatrix::zeros(n, n);
    j[(0, 0)] = b;
    for i in 1..n {
        j[(0, i)] = c * w[i - 1];
        j[(i, 0)] = c * w[i - 1];
        for k in 1..n {
            let delta = if i == k { a } else { 0.0 };
            j[(i, k)] = delta + (b - a) * w[i - 1] * w[k - 1];
        }
    }
    Ok(Some(j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sym(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
        let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-2.0..2.0));
        (&a + a.transpose()) * 0.5
    }

    #[test]
    fn diagonal_matrix_eigenvalues() {
        let y = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 5.0]));
        let eig = sym_eig(&y).unwrap();
        assert_eq!(eig.eigenvalues, vec![5.0, -1.0]);
        assert_relative_eq!(eig.eigenvectors[(1, 0)].abs(), 1.0);
        assert_relative_eq!(eig.eigenvectors[(0, 1)].abs(), 1.0);
    }

    #[test]
    fn swap_matrix_eigenvalues() {
        let y = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let eig = sym_eig(&y).unwrap();
        assert_relative_eq!(eig.eigenvalues[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(eig.eigenvalues[1], -1.0, epsilon = 1e-14);
    }

    #[test]
    fn reconstruction_and_orthogonality() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=8 {
            for _ in 0..20 {
                let y = random_sym(&mut rng, n);
                let eig = sym_eig(&y).unwrap();
                let fro = frobenius(&y).max(1.0);
                assert!(frobenius(&(eig.reconstruct() - &y)) <= 1e-10 * fro);
                let e = &eig.eigenvectors;
                let gram = e.transpose() * e - DMatrix::identity(n, n);
                assert!(frobenius(&gram) <= 1e-10);
                assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
            }
        }
    }

    #[test]
    fn rejects_large_and_asymmetric() {
        assert!(matches!(sym_eig(&DMatrix::zeros(9, 9)), Err(Error::OrderTooLarge(9))));
        let y = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(sym_eig(&y), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn repeated_eigenvalues() {
        let y = DMatrix::identity(4, 4) * 2.5;
        let eig = sym_eig(&y).unwrap();
        assert!(eig.eigenvalues.iter().all(|&r| (r - 2.5).abs() < 1e-15));
    }

    #[test]
    fn identity_lowner_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let y = random_sym(&mut rng, 4);
            let out = lowner_matrix(ScalarFunction::Identity, &y).unwrap().unwrap();
            assert!(frobenius(&(out - &y)) <= 1e-12 * frobenius(&y).max(1.0));
            let v: Vec<f64> = (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let out = lowner_soc(ScalarFunction::Identity, &v).unwrap().unwrap();
            for (a, b) in out.iter().zip(&v) {
                assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
            }
        }
    }

    #[test]
    fn frisch_domain_flag() {
        let y = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -2.0]));
        assert!(lowner_matrix(ScalarFunction::Frisch, &y).unwrap().is_none());
        let y = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.999, -2.0]));
        assert!(lowner_matrix(ScalarFunction::Frisch, &y).unwrap().is_some());
    }

    #[test]
    fn soc_positive_part_example() {
        let out = lowner_soc(ScalarFunction::PositivePart, &[0.0, 2.0]).unwrap().unwrap();
        assert_relative_eq!(out[0], 1.0);
        assert_relative_eq!(out[1], 1.0);
    }

    #[test]
    fn soc_zero_tail_branch() {
        let out = lowner_soc(ScalarFunction::ExpM1, &[0.3, 0.0, 0.0]).unwrap().unwrap();
        assert_relative_eq!(out[0], 0.3f64.exp_m1());
        assert_eq!(&out[1..], &[0.0, 0.0]);
    }

    #[test]
    fn composition_of_lowner_operators() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let y = random_sym(&mut rng, 3);
            let inner = lowner_matrix(ScalarFunction::ExpM1, &y).unwrap().unwrap();
            let outer = lowner_matrix(ScalarFunction::LogSigmoid, &inner).unwrap().unwrap();
            let direct = lowner_matrix_with(
                |t| ScalarFunction::LogSigmoid.value(ScalarFunction::ExpM1.value(t)),
                f64::INFINITY,
                &y,
            )
            .unwrap()
            .unwrap();
            assert!(frobenius(&(outer - direct)) <= 1e-8);
        }
    }

    #[test]
    fn soc_jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for psi in [ScalarFunction::ExpM1, ScalarFunction::Frisch, ScalarFunction::LogSigmoid] {
            for _ in 0..30 {
                let y: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..0.3)).collect();
                let Some(j) = lowner_soc_jacobian(psi, &y).unwrap() else { continue };
                let h = 1e-6;
                for k in 0..4 {
                    let mut yp = y.clone();
                    let mut ym = y.clone();
                    yp[k] += h;
                    ym[k] -= h;
                    let (Some(p), Some(m)) = (lowner_soc(psi, &yp).unwrap(), lowner_soc(psi, &ym).unwrap()) else {
                        continue;
                    };
                    for i in 0..4 {
                        let fd = (p[i] - m[i]) / (2.0 * h);
                        assert!((fd - j[(i, k)]).abs() <= 1e-6 * (1.0 + fd.abs()), "{psi:?} {fd} {}", j[(i, k)]);
                    }
                }
            }
        }
    }

    #[test]
    fn matrix_derivative_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let y = random_sym(&mut rng, 3) * 0.3;
            let h = random_sym(&mut rng, 3);
            let eig = sym_eig(&y).unwrap();
            let d = lowner_matrix_derivative(ScalarFunction::ExpM1, &eig, &h);
            let s = 1e-6;
            let p = lowner_matrix(ScalarFunction::ExpM1, &(&y + &h * s)).unwrap().unwrap();
            let m = lowner_matrix(ScalarFunction::ExpM1, &(&y - &h * s)).unwrap().unwrap();
            let fd = (p - m) / (2.0 * s);
            assert!(frobenius(&(fd - d)) <= 1e-6);
        }
    }

    #[test]
    fn rescaling_functions_are_normalized() {
        for psi in [ScalarFunction::ExpM1, ScalarFunction::LogSigmoid, ScalarFunction::Frisch, ScalarFunction::Carroll] {
            assert_eq!(psi.value(0.0), 0.0);
            assert_relative_eq!(psi.derivative(0.0), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn scalar_derivatives_match_finite_differences() {
        for f in ScalarFunction::ALL {
            for &t in &[-2.0, -0.4, 0.3, 0.7] {
                let h = 1e-6;
                let fd = (f.value(t + h) - f.value(t - h)) / (2.0 * h);
                assert!((fd - f.derivative(t)).abs() < 1e-6 * (1.0 + fd.abs()), "{f:?} at {t}");
                let fd2 = (f.derivative(t + h) - f.derivative(t - h)) / (2.0 * h);
                assert!((fd2 - f.second_derivative(t)).abs() < 1e-5 * (1.0 + fd2.abs()), "{f:?}'' at {t}");
            }
        }
    }
}
