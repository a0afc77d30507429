//! Property tests for the exact polynomial scalar ring: the algebraic laws
//! everything else leans on.

use fnlie::scalar::{ratio, Chart, Rat, ScalarField};
use proptest::prelude::*;

fn chart() -> Chart {
    Chart::base(&["x", "y"])
}

/// A random polynomial in x, y with small integer coefficients and
/// exponents up to 3.
fn scalar_strategy() -> impl Strategy<Value = ScalarField> {
    prop::collection::vec(((0u32..4, 0u32..4), -5i64..=5), 0..6).prop_map(|terms| {
        let chart = chart();
        let mut f = ScalarField::zero(&chart);
        for ((ex, ey), c) in terms {
            f = f.add(&ScalarField::monomial(&chart, vec![ex, ey], ratio(c, 1)));
        }
        f
    })
}

fn point_strategy() -> impl Strategy<Value = Vec<Rat>> {
    prop::collection::vec((-4i64..=4, 1i64..=3).prop_map(|(p, q)| ratio(p, q)), 2)
}

proptest! {
    #[test]
    fn addition_is_commutative_and_associative(
        a in scalar_strategy(),
        b in scalar_strategy(),
        c in scalar_strategy(),
    ) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.sub(&a), ScalarField::zero(a.chart()));
    }

    #[test]
    fn multiplication_is_a_commutative_ring(
        a in scalar_strategy(),
        b in scalar_strategy(),
        c in scalar_strategy(),
    ) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&ScalarField::one(a.chart())), a.clone());
    }

    #[test]
    fn differentiation_satisfies_leibniz(
        a in scalar_strategy(),
        b in scalar_strategy(),
    ) {
        for idx in 0..2 {
            let product_rule = a.diff_idx(idx).mul(&b).add(&a.mul(&b.diff_idx(idx)));
            prop_assert_eq!(a.mul(&b).diff_idx(idx), product_rule);
        }
        // partials commute
        prop_assert_eq!(a.diff_idx(0).diff_idx(1), a.diff_idx(1).diff_idx(0));
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(
        a in scalar_strategy(),
        b in scalar_strategy(),
        p in point_strategy(),
    ) {
        let ea = a.eval(&p).unwrap();
        let eb = b.eval(&p).unwrap();
        prop_assert_eq!(a.add(&b).eval(&p).unwrap(), ea.clone() + eb.clone());
        prop_assert_eq!(a.mul(&b).eval(&p).unwrap(), ea * eb);
    }
}
