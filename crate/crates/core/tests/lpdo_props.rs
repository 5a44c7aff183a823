use darboux_core::lpdo::Lpdo;
use darboux_core::Expr;
use proptest::prelude::*;

fn monomials() -> Vec<Expr> {
    ["1", "x", "y", "x*y", "x^2", "y^2", "a", "a_x*y"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
}

/// Polynomial coefficient from small integer weights on a fixed monomial list.
fn coeff() -> impl Strategy<Value = Expr> {
    prop::collection::vec(-2i64..=2, 8).prop_map(|w| {
        monomials()
            .iter()
            .zip(w)
            .fold(Expr::zero(), |acc, (m, k)| acc.add(&m.mul(&Expr::integer(k))))
    })
}

fn operator(max_order: u32) -> impl Strategy<Value = Lpdo> {
    let keys: Vec<(u32, u32)> = (0..=max_order)
        .flat_map(|i| (0..=max_order - i).map(move |j| (i, j)))
        .collect();
    prop::collection::vec(coeff(), keys.len())
        .prop_map(move |cs| Lpdo::from_terms(keys.iter().copied().zip(cs)))
}

fn alpha() -> impl Strategy<Value = Expr> {
    coeff()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn composition_is_associative(a in operator(1), b in operator(2), c in operator(1)) {
        prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
    }

    #[test]
    fn apply_respects_composition(a in operator(2), b in operator(1), f in coeff()) {
        prop_assert_eq!(a.compose(&b).apply(&f), a.apply(&b.apply(&f)));
    }

    #[test]
    fn gauge_round_trip(a in operator(2), al in alpha()) {
        prop_assert_eq!(a.gauge(&al).gauge(&al.neg()), a);
    }

    #[test]
    fn gauge_is_multiplicative(a in operator(1), b in operator(2), al in alpha()) {
        prop_assert_eq!(a.compose(&b).gauge(&al), a.gauge(&al).compose(&b.gauge(&al)));
    }

    #[test]
    fn gauge_keeps_the_symbol(a in operator(2), al in alpha()) {
        prop_assume!(!a.is_zero());
        prop_assert_eq!(a.gauge(&al).symbol().unwrap(), a.symbol().unwrap());
    }

    #[test]
    fn symbol_is_multiplicative(a in operator(2), b in operator(2)) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let sa = a.symbol().unwrap();
        let sb = b.symbol().unwrap();
        prop_assert_eq!(a.compose(&b).symbol().unwrap(), sa.mul(&sb));
    }

    #[test]
    fn json_terms_round_trip(a in operator(2)) {
        prop_assert_eq!(Lpdo::from_json_terms(&a.to_json_terms()), a);
    }
}

#[test]
fn gauge_of_plain_hyperbolic_operator() {
    let l = Lpdo::parse("Dx*Dy").unwrap();
    let expected = Lpdo::parse("Dx*Dy + alpha_y*Dx + alpha_x*Dy + alpha_xy + alpha_x*alpha_y").unwrap();
    assert_eq!(l.gauge(&"alpha".parse().unwrap()), expected);
}
