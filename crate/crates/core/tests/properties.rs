use motive_workbench::chow_ring::{degree, multiply};
use motive_workbench::correspondence::{compose, diagonal, intersection, reduce_mod, transpose};
use motive_workbench::ring::int;
use motive_workbench::{ChowClass, CoefficientRing, GrassmannSpace, ProductClass};
use proptest::prelude::*;

fn spaces() -> [GrassmannSpace; 3] {
    [GrassmannSpace::new(2, 5).unwrap(), GrassmannSpace::projective(4).unwrap(), GrassmannSpace::new(2, 4).unwrap()]
}

fn space_strategy() -> impl Strategy<Value = GrassmannSpace> {
    (0..3usize).prop_map(|i| spaces()[i])
}

fn class_on(left: GrassmannSpace, right: GrassmannSpace) -> impl Strategy<Value = ProductClass> {
    let pairs: Vec<_> = left
        .basis()
        .into_iter()
        .flat_map(|l| right.basis().into_iter().map(move |r| (l.clone(), r)))
        .collect();
    let n = pairs.len();
    prop::collection::vec((0..n, -4i64..=4), 0..6).prop_map(move |picks| {
        ProductClass::from_terms(
            left,
            right,
            CoefficientRing::Integers,
            picks.into_iter().map(|(i, c)| (pairs[i].clone(), int(c))),
        )
        .unwrap()
    })
}

fn homogeneous_on(left: GrassmannSpace, right: GrassmannSpace, codim: u32) -> impl Strategy<Value = ProductClass> {
    class_on(left, right).prop_map(move |c| c.homogeneous_part(codim))
}

fn single_class(space: GrassmannSpace) -> impl Strategy<Value = ChowClass> {
    let basis = space.basis();
    let n = basis.len();
    prop::collection::vec((0..n, -5i64..=5), 0..5).prop_map(move |picks| {
        ChowClass::from_terms(space, CoefficientRing::Integers, picks.into_iter().map(|(i, c)| (basis[i].clone(), int(c))))
            .unwrap()
    })
}

fn triple() -> impl Strategy<Value = (ProductClass, ProductClass, ProductClass)> {
    (space_strategy(), space_strategy(), space_strategy(), space_strategy()).prop_flat_map(|(x, y, z, w)| {
        (class_on(x, y), class_on(y, z), class_on(z, w))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_associative((a, b, c) in triple()) {
        let left = compose(&c, &compose(&b, &a).unwrap()).unwrap();
        let right = compose(&compose(&c, &b).unwrap(), &a).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn transpose_reverses_composition((a, b, _) in triple()) {
        let lhs = transpose(&compose(&b, &a).unwrap());
        let rhs = compose(&transpose(&a), &transpose(&b)).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(transpose(&transpose(&a)), a);
    }

    #[test]
    fn diagonal_is_a_two_sided_unit((a, _, _) in triple()) {
        prop_assert_eq!(compose(&diagonal(a.right()), &a).unwrap(), a.clone());
        prop_assert_eq!(compose(&a, &diagonal(a.left())).unwrap(), a);
    }

    #[test]
    fn composition_codimension_law(
        (a, b, ca, cb) in (space_strategy(), space_strategy(), space_strategy(), 0u32..=10, 0u32..=10)
            .prop_flat_map(|(x, y, z, ca, cb)| (homogeneous_on(x, y, ca), homogeneous_on(y, z, cb), Just(ca), Just(cb)))
    ) {
        let c = compose(&b, &a).unwrap();
        let expected = (ca + cb).checked_sub(a.right().dim());
        match c.homogeneous_degree().unwrap() {
            None => {}
            Some(k) => prop_assert_eq!(Some(k), expected),
        }
    }

    #[test]
    fn reduction_is_a_ring_homomorphism((a, b, _) in triple(), m in 2u64..=7) {
        let reduce_then = compose(&reduce_mod(&b, m).unwrap(), &reduce_mod(&a, m).unwrap()).unwrap();
        let then_reduce = reduce_mod(&compose(&b, &a).unwrap(), m).unwrap();
        prop_assert_eq!(reduce_then, then_reduce);
        let c = a.scale_int(m as i64 + 1);
        prop_assert_eq!(reduce_mod(&a.add(&c).unwrap(), m).unwrap(), reduce_mod(&a, m).unwrap().add(&reduce_mod(&c, m).unwrap()).unwrap());
        prop_assert_eq!(reduce_mod(&c, m).unwrap(), reduce_mod(&a, m).unwrap());
    }

    #[test]
    fn intersection_is_commutative(
        (a, b) in (space_strategy(), space_strategy()).prop_flat_map(|(x, y)| (class_on(x, y), class_on(x, y)))
    ) {
        prop_assert_eq!(intersection(&a, &b).unwrap(), intersection(&b, &a).unwrap());
    }

    #[test]
    fn chow_ring_is_commutative_and_associative(
        (x, y, z) in space_strategy().prop_flat_map(|s| (single_class(s), single_class(s), single_class(s)))
    ) {
        prop_assert_eq!(multiply(&x, &y).unwrap(), multiply(&y, &x).unwrap());
        let lhs = multiply(&multiply(&x, &y).unwrap(), &z).unwrap();
        let rhs = multiply(&x, &multiply(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        let distributes = multiply(&x, &y.add(&z).unwrap()).unwrap();
        prop_assert_eq!(distributes, multiply(&x, &y).unwrap().add(&multiply(&x, &z).unwrap()).unwrap());
    }
}

#[test]
fn schubert_basis_is_self_dual() {
    for space in spaces() {
        for lambda in space.basis() {
            for mu in space.basis() {
                let a = ChowClass::basis(space, lambda.clone()).unwrap();
                let b = ChowClass::basis(space, mu.clone()).unwrap();
                let expected = int(space.pairing(&lambda, &mu) as i64);
                assert_eq!(degree(&multiply(&a, &b).unwrap()), expected, "{space}: {lambda}, {mu}");
            }
        }
    }
}
