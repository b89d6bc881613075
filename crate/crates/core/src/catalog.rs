//! Reference problems with known solutions and multipliers.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::analysis::{kkt_residual, KktOptions};
use crate::cones::ConeSpec;
use crate::error::{Error, Result};
use crate::problems::{ConstraintMap, FeasibleSet, Objective, Problem, Reference, SmoothFunction};

pub const NAMES: &[&str] = &[
    "exmpl-exp",
    "qp2",
    "nlp1d",
    "minimax-abs",
    "soc-toy",
    "sdp-toy",
    "indef-eq",
    "lin1d",
    "tight-ball",
    "box-qp",
];

/// Stationarity/complementarity budget a stored reference pair must meet.
pub const REFERENCE_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    pub dim: usize,
    pub cone: String,
    pub set: FeasibleSet,
    pub reference: Option<Reference>,
}

pub fn list() -> Vec<CatalogEntry> {
    NAMES
        .iter()
        .map(|n| {
            let p = build(n).expect("catalog names are valid");
            CatalogEntry {
                name: p.name.clone(),
                description: p.description.clone(),
                dim: p.dim,
                cone: p.cone.to_string(),
                set: p.set.clone(),
                reference: p.reference.clone(),
            }
        })
        .collect()
}

/// Looks up a problem and verifies its reference data.
pub fn get(name: &str) -> Result<Problem> {
    let p = build(name)?;
    p.validate()?;
    if let Some(r) = &p.reference {
        let lam = p.multiplier(r.lambda.clone())?;
        let opts = KktOptions { weights: r.weights.clone(), ..KktOptions::default() };
        let res = kkt_residual(&p, &r.x, &lam, &opts)?;
        let budget = res.stationarity.max(res.feasibility).max(res.complementarity);
        if budget > REFERENCE_TOL {
            return Err(Error::InvalidParameter(format!("reference of {name} fails KKT check: {budget:e}")));
        }
        if r.lambda_in_polar && res.dual_feasibility > REFERENCE_TOL {
            return Err(Error::InvalidParameter(format!("reference multiplier of {name} not in K*")));
        }
    }
    Ok(p)
}

fn cone(s: &str) -> ConeSpec {
    s.parse().expect("static cone spec")
}

fn diag(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(v))
}

fn zeros(d: usize) -> DMatrix<f64> {
    DMatrix::zeros(d, d)
}

fn reference(x: &[f64], lambda: &[f64], f: f64, note: &str) -> Option<Reference> {
    Some(Reference {
        x: x.to_vec(),
        lambda: lambda.to_vec(),
        f,
        weights: None,
        lambda_in_polar: true,
        note: note.into(),
    })
}

fn build(name: &str) -> Result<Problem> {
    let s2 = std::f64::consts::SQRT_2;
    let p = match name {
        "exmpl-exp" => Problem {
            name: name.into(),
            description: "x1²+x2² s.t. x1+x2+2 ≤ 0, ½(x1+2)²+½(x2+2)²−1 ≤ 0".into(),
            dim: 2,
            objective: Objective::smooth(
                SmoothFunction::new(|x| x[0] * x[0] + x[1] * x[1])
                    .with_gradient(|x| vec![2.0 * x[0], 2.0 * x[1]])
                    .with_hessian(|_| diag(&[2.0, 2.0])),
            ),
            constraints: ConstraintMap::new(2, |x| {
                vec![
                    x[0] + x[1] + 2.0,
                    0.5 * (x[0] + 2.0).powi(2) + 0.5 * (x[1] + 2.0).powi(2) - 1.0,
                ]
            })
            .with_jacobian(|x| DMatrix::from_row_slice(2, 2, &[1.0, 1.0, x[0] + 2.0, x[1] + 2.0]))
            .with_hessians(|_| vec![zeros(2), diag(&[1.0, 1.0])]),
            cone: cone("orthant:2"),
            set: FeasibleSet::WholeSpace,
            reference: Some(Reference {
                x: vec![-1.0, -1.0],
                lambda: vec![-1.0, 3.0],
                f: 2.0,
                weights: None,
                lambda_in_polar: false,
                note: "saddle multiplier of the exponential penalty with full multiplier space, not a K*-multiplier"
                    .into(),
            }),
        },
        "qp2" => Problem {
            name: name.into(),
            description: "(x1−2)²+(x2−1)² s.t. x1+x2−1 ≤ 0, −x1−5 ≤ 0".into(),
            dim: 2,
            objective: Objective::smooth(
                SmoothFunction::new(|x| (x[0] - 2.0).powi(2) + (x[1] - 1.0).powi(2))
                    .with_gradient(|x| vec![2.0 * (x[0] - 2.0), 2.0 * (x[1] - 1.0)])
                    .with_hessian(|_| diag(&[2.0, 2.0])),
            ),
            constraints: ConstraintMap::new(2, |x| vec![x[0] + x[1] - 1.0, -x[0] - 5.0])
                .with_jacobian(|_| DMatrix::from_row_slice(2, 2, &[1.0, 1.0, -1.0, 0.0]))
                .with_hessians(|_| vec![zeros(2), zeros(2)]),
            cone: cone("orthant:2"),
            set: FeasibleSet::WholeSpace,
            reference: reference(&[1.0, 0.0], &[2.0, 0.0], 2.0, "projection of (2,1) onto x1+x2 ≤ 1"),
        },
        "nlp1d" => Problem {
            name: name.into(),
            description: "x² s.t. 1−x ≤ 0".into(),
            dim: 1,
            objective: Objective::smooth(
                SmoothFunction::new(|x| x[0] * x[0])
                    .with_gradient(|x| vec![2.0 * x[0]])
                    .with_hessian(|_| diag(&[2.0])),
            ),
            constraints: ConstraintMap::new(1, |x| vec![1.0 - x[0]])
                .with_jacobian(|_| DMatrix::from_element(1, 1, -1.0))
                .with_hessians(|_| vec![zeros(1)]),
            cone: cone("orthant:1"),
            set: FeasibleSet::WholeSpace,
            reference: reference(&[1.0], &[2.0], 1.0, "stationarity 2x − λ = 0 at x = 1"),
        },
        "minimax-abs" => Problem {
            name: name.into(),
            description: "max(x, −x), unconstrained".into(),
            dim: 1,
            objective: Objective::max_of(vec![
                SmoothFunction::new(|x| x[0]).with_gradient(|_| vec![1.0]).with_hessian(|_| zeros(1)),
                SmoothFunction::new(|x| -x[0]).with_gradient(|_| vec![-1.0]).with_hessian(|_| zeros(1)),
            ])?,
            constraints: ConstraintMap::empty(),
            cone: ConeSpec::empty(),
            set: FeasibleSet::WholeSpace,
            reference: Some(Reference {
                x: vec![0.0],
                lambda: vec![],
                f: 0.0,
                weights: Some(vec![0.5, 0.5]),
                lambda_in_polar: true,
                note: "kink of |x|".into(),
            }),
        },
        "soc-toy" => Problem {
            name: name.into(),
            description: "½‖x−(1.2,1.6)‖² s.t. (1, x1, x2) ∈ Q3".into(),
            dim: 2,
            objective: Objective::smooth(
                SmoothFunction::new(|x| 0.5 * ((x[0] - 1.2).powi(2) + (x[1] - 1.6).powi(2)))
                    .with_gradient(|x| vec![x[0] - 1.2, x[1] - 1.6])
                    .with_hessian(|_| diag(&[1.0, 1.0])),
            ),
            constraints: ConstraintMap::new(3, |x| vec![1.0, x[0], x[1]])
                .with_jacobian(|_| DMatrix::from_row_slice(3, 2, &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0]))
                .with_hessians(|_| vec![zeros(2); 3]),
            cone: cone("soc:3"),
            set: FeasibleSet::WholeSpace,
            reference: reference(
                &[0.6, 0.8],
                &[-1.0, 0.6, 0.8],
                0.5,
                "projection onto the unit disc; multiplier on the boundary of −Q3",
            ),
        },
        "sdp-toy" => Problem {
            name: name.into(),
            description: "½‖x−(2.2,0.4)‖² s.t. [[−1+x1, x2],[x2, −1−x1]] ⪯ 0, 3x1−4x2 = 0".into(),
            dim: 2,
            objective: Objective::smooth(
                SmoothFunction::new(|x| 0.5 * ((x[0] - 2.2).powi(2) + (x[1] - 0.4).powi(2)))
                    .with_gradient(|x| vec![x[0] - 2.2, x[1] - 0.4])
                    .with_hessian(|_| diag(&[1.0, 1.0])),
            ),
            constraints: ConstraintMap::new(4, move |x| {
                vec![-1.0 + x[0], s2 * x[1], -1.0 - x[0], 3.0 * x[0] - 4.0 * x[1]]
            })
            .with_jacobian(move |_| {
                DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 0.0, s2, -1.0, 0.0, 3.0, -4.0])
            })
            .with_hessians(|_| vec![zeros(2); 4]),
            cone: cone("nsd:2,zero:1"),
            set: FeasibleSet::WholeSpace,
            reference: reference(
                &[0.8, 0.6],
                &[0.9, 0.3 * s2, 0.1, 0.2],
                1.0,
                "λ0 = [[0.9,0.3],[0.3,0.1]] (rank one), μ = 0.2; G0(x*) has eigenvalues 0, −2",
            ),
        },
        "indef-eq" => Problem {
            name: name.into(),
            description: "x1² − x2² s.t. x2 = 0".into(),
            dim: 2,
            objective: Objective::smooth(
                SmoothFunction::new(|x| x[0] * x[0] - x[1] * x[1])
                    .with_gradient(|x| vec![2.0 * x[0], -2.0 * x[1]])
                    .with_hessian(|_| diag(&[2.0, -2.0])),
            ),
            constraints: ConstraintMap::new(1, |x| vec![x[1]])
                .with_jacobian(|_| DMatrix::from_row_slice(1, 2, &[0.0, 1.0]))
                .with_hessians(|_| vec![zeros(2)]),
            cone: cone("zero:1"),
            set: FeasibleSet::WholeSpace,
            reference: reference(&[0.0, 0.0], &[0.0], 0.0, "critical cone is the x1 axis"),
        },
        "lin1d" => Problem {
            name: name.into(),
            description: "x s.t. −x ≤ 0".into(),
            dim: 1,
            objective: Objective::smooth(
                SmoothFunction::new(|x| x[0]).with_gradient(|_| vec![1.0]).with_hessian(|_| zeros(1)),
            ),
            constraints: ConstraintMap::new(1, |x| vec![-x[0]])
                .with_jacobian(|_| DMatrix::from_element(1, 1, -1.0))
                .with_hessians(|_| vec![zeros(1)]),
            cone: cone("orthant:1"),
            set: FeasibleSet::WholeSpace,
            reference: reference(&[0.0], &[1.0], 0.0, "linear objective, one active bound"),
        },
        "tight-ball" => Problem {
            name: name.into(),
            description: "x s.t. x² − 0.01 ≤ 0".into(),
            dim: 1,
            objective: Objective::smooth(
                SmoothFunction::new(|x| x[0]).with_gradient(|_| vec![1.0]).with_hessian(|_| zeros(1)),
            ),
            constraints: ConstraintMap::new(1, |x| vec![x[0] * x[0] - 0.01])
                .with_jacobian(|x| DMatrix::from_element(1, 1, 2.0 * x[0]))
                .with_hessians(|_| vec![diag(&[2.0])]),
            cone: cone("orthant:1"),
            set: FeasibleSet::WholeSpace,
            reference: reference(&[-0.1], &[5.0], -0.1, "1 + 2λx = 0 at x = −0.1"),
        },
        "box-qp" => Problem {
            name: name.into(),
            description: "(x1−2)²+(x2+1)² over [−1,1]²".into(),
            dim: 2,
            objective: Objective::smooth(
                SmoothFunction::new(|x| (x[0] - 2.0).powi(2) + (x[1] + 1.0).powi(2))
                    .with_gradient(|x| vec![2.0 * (x[0] - 2.0), 2.0 * (x[1] + 1.0)])
                    .with_hessian(|_| diag(&[2.0, 2.0])),
            ),
            constraints: ConstraintMap::empty(),
            cone: ConeSpec::empty(),
            set: FeasibleSet::boxed(vec![-1.0, -1.0], vec![1.0, 1.0])?,
            reference: reference(&[1.0, -1.0], &[], 1.0, "clipped unconstrained minimizer"),
        },
        other => return Err(Error::UnknownProblem(other.into())),
    };
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn every_entry_loads() {
        for n in NAMES {
            get(n).unwrap_or_else(|e| panic!("{n}: {e}"));
        }
        assert!(matches!(get("nope"), Err(Error::UnknownProblem(_))));
    }

    #[test]
    fn exmpl_exp_at_reference() {
        let p = get("exmpl-exp").unwrap();
        let e = p.evaluate(&[-1.0, -1.0]).unwrap();
        assert_relative_eq!(e.f, 2.0);
        assert_eq!(e.g.as_slice(), &[0.0, 0.0]);
        assert_eq!(e.active, vec![0]);
    }

    #[test]
    fn qp2_value_at_reference() {
        let p = get("qp2").unwrap();
        let r = p.reference.clone().unwrap();
        assert_relative_eq!(p.evaluate(&r.x).unwrap().f, r.f);
    }
}
