//! Central finite differences.

use nalgebra::DMatrix;

/// Default relative step, `cbrt(machine epsilon)`.
pub fn default_step() -> f64 {
    f64::EPSILON.cbrt()
}

fn step_for(x: f64, h: f64) -> f64 {
    h * x.abs().max(1.0)
}

pub fn gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|i| {
            let s = step_for(x[i], h);
            xp[i] = x[i] + s;
            let fp = f(&xp);
            xp[i] = x[i] - s;
            let fm = f(&xp);
            xp[i] = x[i];
            (fp - fm) / (2.0 * s)
        })
        .collect()
}

/// Jacobian of a vector map, rows indexed by outputs.
pub fn jacobian(f: impl Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> DMatrix<f64> {
    let m = f(x).len();
    let mut jac = DMatrix::zeros(m, x.len());
    let mut xp = x.to_vec();
    for j in 0..x.len() {
        let s = step_for(x[j], h);
        xp[j] = x[j] + s;
        let fp = f(&xp);
        xp[j] = x[j] - s;
        let fm = f(&xp);
        xp[j] = x[j];
        for i in 0..m {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * s);
        }
    }
    jac
}

/// Hessian by differencing an analytic gradient, symmetrized.
pub fn hessian_from_gradient(g: impl Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> DMatrix<f64> {
    let j = jacobian(g, x, h);
    (&j + j.transpose()) * 0.5
}

/// Hessian from function values only.
pub fn hessian(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> DMatrix<f64> {
    let n = x.len();
    let mut hess = DMatrix::zeros(n, n);
    let mut xp = x.to_vec();
    let f0 = f(x);
    for i in 0..n {
        let si = step_for(x[i], h);
        xp[i] = x[i] + si;
        let fp = f(&xp);
        xp[i] = x[i] - si;
        let fm = f(&xp);
        xp[i] = x[i];
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (si * si);
        for j in 0..i {
            let sj = step_for(x[j], h);
            let mut eval = |a: f64, b: f64| {
                xp[i] = x[i] + a * si;
                xp[j] = x[j] + b * sj;
                let v = f(&xp);
                xp[i] = x[i];
                xp[j] = x[j];
                v
            };
            let v = (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0) + eval(-1.0, -1.0)) / (4.0 * si * sj);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    hess
}

/// `max |a − b| / max(1, |b|)` entrywise.
pub fn max_rel_error(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / y.abs().max(1.0))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn quadratic_derivatives() {
        let f = |x: &[f64]| x[0] * x[0] + 3.0 * x[0] * x[1] - x[1] * x[1];
        let g = gradient(f, &[1.0, 2.0], 1e-5);
        assert_relative_eq!(g[0], 8.0, epsilon = 1e-7);
        assert_relative_eq!(g[1], -1.0, epsilon = 1e-7);
        let h = hessian(f, &[1.0, 2.0], 1e-4);
        assert_relative_eq!(h[(0, 1)], 3.0, epsilon = 1e-5);
        assert_relative_eq!(h[(1, 1)], -2.0, epsilon = 1e-5);
    }
}
