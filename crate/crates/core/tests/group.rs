mod common;

use common::{closure, extend_to_isomorphism, order_histogram, Dic, Sd};
use k2local::group::{
    central_element, element_a, g24_generators, reduced_det, sd16_generators, subgroup_closure, subgroup_structure, verify_group,
    G2Element, O2Element,
};
use k2local::padic::{OmegaRoot, Precision, Residue, WittElement};
use proptest::prelude::*;
use std::collections::BTreeMap;

fn prec(n: u32) -> Precision {
    Precision::new(n).unwrap()
}

const ROOTS: [OmegaRoot; 2] = [OmegaRoot::Primary, OmegaRoot::Conjugate];

#[test]
fn g24_is_isomorphic_to_the_abstract_model() {
    for n in [4, 6, 8] {
        for root in ROOTS {
            let size = extend_to_isomorphism(
                &g24_generators(prec(n), root),
                &Dic::generators(),
                G2Element::identity(prec(n)),
                Dic::identity(),
                |x, y| x.checked_mul(y).unwrap(),
                Dic::mul,
            )
            .unwrap();
            assert_eq!(size, 24, "N = {n}");
        }
    }
}

#[test]
fn sd16_is_isomorphic_to_the_abstract_model() {
    for n in [4, 6, 8] {
        for root in ROOTS {
            let size = extend_to_isomorphism(
                &sd16_generators(prec(n), root),
                &Sd::generators(),
                G2Element::identity(prec(n)),
                Sd::identity(),
                |x, y| x.checked_mul(y).unwrap(),
                Sd::mul,
            )
            .unwrap();
            assert_eq!(size, 16);
        }
    }
}

#[test]
fn order_statistics_agree_with_the_models() {
    let dic = closure(&Dic::generators(), Dic::mul, Dic::identity());
    let sd = closure(&Sd::generators(), Sd::mul, Sd::identity());
    let dic_hist = order_histogram(&dic, Dic::mul, Dic::identity());
    let sd_hist = order_histogram(&sd, Sd::mul, Sd::identity());
    assert_eq!(dic_hist, BTreeMap::from([(1, 1), (2, 1), (3, 2), (4, 14), (6, 2), (12, 4)]));
    for root in ROOTS {
        let p = prec(8);
        let g24 = subgroup_closure("G24", &g24_generators(p, root), 48).unwrap();
        let sd16 = subgroup_closure("SD16", &sd16_generators(p, root), 32).unwrap();
        let s24 = subgroup_structure(&g24, root);
        let s16 = subgroup_structure(&sd16, root);
        assert_eq!(s24.order_histogram, dic_hist);
        assert_eq!(s16.order_histogram, sd_hist);
        assert_eq!(s24.center_size, 2);
        assert_eq!(s16.center_size, 2);
        assert!(s24.relations.iter().all(|r| r.holds));
        assert!(s16.relations.iter().all(|r| r.holds));
    }
}

#[test]
fn intersection_of_the_finite_subgroups_is_q8() {
    let p = prec(6);
    let g24 = subgroup_closure("G24", &g24_generators(p, OmegaRoot::Primary), 48).unwrap();
    let sd16 = subgroup_closure("SD16", &sd16_generators(p, OmegaRoot::Primary), 32).unwrap();
    let common = g24.elements.iter().filter(|g| sd16.contains(g)).count();
    assert_eq!(common, 8);
}

#[test]
fn closure_bound_is_enforced() {
    let p = prec(6);
    assert!(subgroup_closure("G24", &g24_generators(p, OmegaRoot::Primary), 23).is_err());
    assert!(subgroup_closure("empty", &[], 10).is_err());
}

#[test]
fn a_has_order_three_and_reduced_norm_one() {
    for n in [4, 8, 16] {
        for root in ROOTS {
            let a = element_a(prec(n), root);
            assert_eq!(a.order(10), Some(3));
            assert_eq!(a.unit().reduced_norm().value(), 1);
        }
    }
}

#[test]
fn reduced_det_landmarks() {
    let p = prec(8);
    let four = central_element(Residue::new(4, p)).unwrap();
    assert_eq!(reduced_det(&four).unwrap().value(), 2);
    assert_eq!(reduced_det(&G2Element::phi(p)).unwrap().value(), 0);
    let minus_one = central_element(Residue::new(-1, p)).unwrap();
    assert_eq!(reduced_det(&minus_one).unwrap().value(), 0);
    for root in ROOTS {
        for gens in [g24_generators(p, root), sd16_generators(p, root)] {
            let h = subgroup_closure("h", &gens, 48).unwrap();
            assert!(h.elements.iter().all(|g| reduced_det(g).unwrap().is_zero()));
        }
    }
}

#[test]
fn gate_passes_and_rejects_low_precision() {
    for n in [6, 8] {
        for root in ROOTS {
            let r = verify_group(prec(n), root).unwrap();
            assert!(r.pass, "{:?}", r.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
        }
    }
    let low = verify_group(prec(3), OmegaRoot::Primary).unwrap();
    assert!(!low.pass);
}

/// `x + yS -> [[x, 3y], [y^sigma, x^sigma]]`, a faithful matrix model of `O_2`.
fn matrix(g: &O2Element) -> [[WittElement; 2]; 2] {
    let (x, y) = g.parts();
    [[x, y.scale(3)], [y.frobenius(), x.frobenius()]]
}

fn mat_mul(a: &[[WittElement; 2]; 2], b: &[[WittElement; 2]; 2]) -> [[WittElement; 2]; 2] {
    let e = |i: usize, j: usize| a[i][0].checked_mul(&b[0][j]).unwrap().checked_add(&a[i][1].checked_mul(&b[1][j]).unwrap()).unwrap();
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn o2(n: u32) -> impl Strategy<Value = O2Element> {
    (any::<i32>(), any::<i32>(), any::<i32>(), any::<i32>()).prop_map(move |(a, b, c, d)| {
        let p = prec(n);
        O2Element::new(WittElement::new(a as i64, b as i64, p), WittElement::new(c as i64, d as i64, p)).unwrap()
    })
}

fn g2(n: u32) -> impl Strategy<Value = G2Element> {
    (o2(n), any::<bool>()).prop_filter_map("unit", |(u, g)| G2Element::new(u, g).ok())
}

proptest! {
    #[test]
    fn o2_matches_matrix_model(x in o2(8), y in o2(8)) {
        prop_assert_eq!(matrix(&x.checked_mul(&y).unwrap()), mat_mul(&matrix(&x), &matrix(&y)));
        let m = matrix(&x);
        let det = m[0][0].checked_mul(&m[1][1]).unwrap().checked_sub(&m[0][1].checked_mul(&m[1][0]).unwrap()).unwrap();
        prop_assert_eq!(WittElement::from_residue(x.reduced_norm()), det);
    }

    #[test]
    fn g2_is_a_group(x in g2(7), y in g2(7), z in g2(7)) {
        let p = prec(7);
        prop_assert_eq!(x.checked_mul(&y).unwrap().checked_mul(&z).unwrap(), x.checked_mul(&y.checked_mul(&z).unwrap()).unwrap());
        prop_assert_eq!(x.checked_mul(&x.inverse()).unwrap(), G2Element::identity(p));
        prop_assert_eq!(x.inverse().checked_mul(&x).unwrap(), G2Element::identity(p));
    }

    #[test]
    fn reduced_det_is_a_homomorphism(x in g2(8), y in g2(8)) {
        let lhs = reduced_det(&x.checked_mul(&y).unwrap()).unwrap();
        let rhs = reduced_det(&x).unwrap().add(reduced_det(&y).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn results_stable_under_raising_precision(x in g2(10), y in g2(10), n in 1u32..=8) {
        let p = prec(n);
        prop_assert_eq!(
            x.checked_mul(&y).unwrap().reduce(p).unwrap(),
            x.reduce(p).unwrap().checked_mul(&y.reduce(p).unwrap()).unwrap()
        );
    }

    #[test]
    fn scalars_have_twice_the_log(c in any::<u32>()) {
        let p = prec(8);
        let r = Residue::new(3 * c as i64 + 1, p);
        let d = reduced_det(&central_element(r).unwrap()).unwrap();
        let l = k2local::padic::log_base4(k2local::padic::UnitOnePlus3::new(r).unwrap()).unwrap();
        prop_assert_eq!(d, l.add(l).unwrap());
    }
}
