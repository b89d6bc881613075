use proptest::prelude::*;

use cone_auglag::aug_lagrangians::{make_family, FamilyParams};
use cone_auglag::axioms::SamplingPlan;
use cone_auglag::cones::{inner, pack_sym, unpack_sym, BlockVector, ConeBlock, ConeSpec};
use cone_auglag::numdiff;
use cone_auglag::spectral::{lowner_matrix, ScalarFunction};
use cone_auglag::ExtendedReal;

fn block() -> impl Strategy<Value = ConeBlock> {
    prop_oneof![
        (1usize..4).prop_map(ConeBlock::NegativeOrthant),
        (1usize..3).prop_map(ConeBlock::Zero),
        (2usize..6).prop_map(ConeBlock::SecondOrder),
        (1usize..4).prop_map(ConeBlock::NegSemidefinite),
    ]
}

fn cone_and_point() -> impl Strategy<Value = (ConeSpec, Vec<f64>)> {
    prop::collection::vec(block(), 1..4).prop_flat_map(|blocks| {
        let cone = ConeSpec::new(blocks).unwrap();
        let n = cone.dim();
        (Just(cone), prop::collection::vec(-5.0..5.0f64, n))
    })
}

fn sym(n: usize) -> impl Strategy<Value = nalgebra::DMatrix<f64>> {
    prop::collection::vec(-3.0..3.0f64, n * n).prop_map(move |v| {
        let m = nalgebra::DMatrix::from_vec(n, n, v);
        (&m + m.transpose()) * 0.5
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn projection_is_idempotent_and_lands_in_cone((cone, v) in cone_and_point()) {
        let v = cone.vector(v).unwrap();
        let p = cone.project(&v).unwrap();
        prop_assert!(cone.contains(&p, 1e-9).unwrap());
        let pp = cone.project(&p).unwrap();
        for (a, b) in p.as_slice().iter().zip(pp.as_slice()) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn moreau_decomposition((cone, v) in cone_and_point()) {
        let v = cone.vector(v).unwrap();
        let p = cone.project(&v).unwrap();
        let q = cone.project_polar(&v).unwrap();
        prop_assert!(cone.polar_contains(&q, 1e-9).unwrap());
        let sum = p.axpy(1.0, &q).unwrap();
        for (a, b) in sum.as_slice().iter().zip(v.as_slice()) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
        prop_assert!(inner(&p, &q).unwrap().abs() <= 1e-8 * (1.0 + v.norm() * v.norm()));
        prop_assert!((cone.distance(&v).unwrap() - q.norm()).abs() <= 1e-9);
    }

    #[test]
    fn packing_round_trips(m in (1usize..5).prop_flat_map(sym)) {
        let n = m.nrows();
        let packed = pack_sym(&m);
        prop_assert_eq!(packed.len(), n * (n + 1) / 2);
        // packing is an isometry for the Frobenius norm
        let norm: f64 = packed.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!((norm - m.norm()).abs() <= 1e-9);
        let back = unpack_sym(n, &packed);
        prop_assert!((back - m).abs().max() <= 1e-12);
    }

    #[test]
    fn lowner_positive_part_is_psd_projection(m in (1usize..5).prop_flat_map(sym)) {
        let n = m.nrows();
        let plus = lowner_matrix(ScalarFunction::PositivePart, &m).unwrap().unwrap();
        // P_{S+}(Y) = −P_{S−}(−Y)
        let cone = ConeSpec::new(vec![ConeBlock::NegSemidefinite(n)]).unwrap();
        let neg = BlockVector::new(vec![pack_sym(&(-&m))]);
        let proj = unpack_sym(n, cone.project(&neg).unwrap().as_slice());
        prop_assert!((plus + proj).abs().max() <= 1e-9);
        let id = lowner_matrix(ScalarFunction::Identity, &m).unwrap().unwrap();
        prop_assert!((id - &m).abs().max() <= 1e-9);
    }

    #[test]
    fn cone_spec_text_round_trips(blocks in prop::collection::vec(block(), 0..5)) {
        let cone = ConeSpec::new(blocks).unwrap();
        let back: ConeSpec = cone.to_string().parse().unwrap();
        prop_assert_eq!(back, cone);
    }

    #[test]
    fn extended_reals_round_trip(v in prop::option::of(-1e300..1e300f64)) {
        let e = v.map(ExtendedReal::Finite).unwrap_or(ExtendedReal::PosInf);
        let s = serde_json::to_string(&e).unwrap();
        let back: ExtendedReal = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn smooth_family_gradients_match_differences(
        id in prop::sample::select(vec!["exp", "log-sigmoid", "rw-quadratic", "mangasarian"]),
        y in prop::collection::vec(-1.5..1.5f64, 2),
        l in prop::collection::vec(0.0..2.0f64, 2),
        c in 0.5..4.0f64,
    ) {
        let fam = make_family(id, &FamilyParams::default()).unwrap();
        let cone = ConeSpec::new(vec![ConeBlock::NegativeOrthant(2)]).unwrap();
        let lam = cone.vector(l).unwrap();
        let yv = cone.vector(y.clone()).unwrap();
        let value = |v: &[f64]| {
            fam.value(&cone, &cone.vector(v.to_vec()).unwrap(), &lam, c).unwrap().to_f64()
        };
        prop_assume!(value(&y).is_finite());
        let fd = numdiff::gradient(value, &y, 1e-6);
        let g = fam.grad_y(&cone, &yv, &lam, c).unwrap();
        prop_assert!(numdiff::max_rel_error(g.as_slice(), &fd) <= 1e-4, "{id}: {:?} vs {:?}", g.as_slice(), fd);
    }

    #[test]
    fn penalty_term_vanishes_at_the_origin(
        id in prop::sample::select(vec!["hpr", "exp", "log-sigmoid", "rw-quadratic", "cubic", "mangasarian"]),
        l in prop::collection::vec(0.0..3.0f64, 3),
        c in 0.1..100.0f64,
    ) {
        let fam = make_family(id, &FamilyParams::default()).unwrap();
        let cone = ConeSpec::new(vec![ConeBlock::NegativeOrthant(3)]).unwrap();
        let v = fam.value(&cone, &cone.zeros(), &cone.vector(l).unwrap(), c).unwrap();
        prop_assert!(v.finite().is_some_and(|v| v.abs() <= 1e-12), "{id}: {v}");
    }
}

#[test]
fn sampling_plan_round_trips() {
    let plan = SamplingPlan { seed: 99, ..SamplingPlan::default() };
    let s = serde_json::to_string(&plan).unwrap();
    let back: SamplingPlan = serde_json::from_str(&s).unwrap();
    assert_eq!(back, plan);
    assert!(serde_json::from_str::<SamplingPlan>(r#"{"seeed": 1}"#).is_err());
}
