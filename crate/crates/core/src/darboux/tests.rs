use super::*;
use crate::invariants::gauge_invariants;

fn e(s: &str) -> Expr {
    s.parse().unwrap()
}

fn op(s: &str) -> Lpdo {
    s.parse().unwrap()
}

fn l(s: &str) -> HyperbolicL {
    HyperbolicL::parse(s).unwrap()
}

fn m(s: &str) -> FirstOrderM {
    FirstOrderM::parse(s).unwrap()
}

#[test]
fn lpdo_round_trip() {
    let g = HyperbolicL::generic();
    assert_eq!(HyperbolicL::from_lpdo(&g.to_lpdo()).unwrap(), g);
    assert!(HyperbolicL::parse("Dx^2 + Dy").is_err());
    assert!(HyperbolicL::parse("2*Dx*Dy").is_err());
    assert_eq!(m("Dx - Dy"), FirstOrderM::new(e("-1"), e("0")));
    assert!(FirstOrderM::parse("Dx*Dy").is_err());
}

#[test]
fn reduce_mixed_examples() {
    let g = HyperbolicL::generic();
    assert_eq!(reduce_mixed(&g, &op("Dx*Dy")), op("-a*Dx - b*Dy - c"));
    assert_eq!(reduce_mixed(&g, &op("Dx + q*Dy + r")), op("Dx + q*Dy + r"));
    assert_eq!(reduce_mixed(&HyperbolicL::plain(), &op("Dx^2 + Dx*Dy")), op("Dx^2"));
    let deep = op("x*Dx^2*Dy^2 + Dx*Dy^3 + y*Dx^3*Dy");
    let red = reduce_mixed(&g, &deep);
    assert!(red.terms().all(|((i, j), _)| *i == 0 || *j == 0));
}

#[test]
fn reduce_mixed_is_confluent() {
    // Eliminating smallest mixed index first reaches the same normal form.
    let g = HyperbolicL::generic();
    let start = op("x*Dx^2*Dy^2 + q*Dx*Dy^3 + Dx^3*Dy + Dx*Dy");
    let mut alt = start.clone();
    loop {
        let next = alt
            .terms()
            .filter(|((i, j), _)| *i >= 1 && *j >= 1)
            .map(|(&(i, j), c)| ((i + j, j), i, c.clone()))
            .min_by(|a, b| a.0.cmp(&b.0));
        let Some(((_, j), i, c)) = next else { break };
        alt = alt.sub(&Lpdo::monomial(i - 1, j - 1, c).compose(&g.to_lpdo()));
    }
    assert_eq!(alt, reduce_mixed(&g, &start));
}

#[test]
fn bidegree_examples() {
    let g = HyperbolicL::generic();
    assert_eq!(bidegree(&g, &op("Dx + q*Dy + r")).unwrap(), (1, 1));
    assert_eq!(bidegree(&g, &op("Dx^2 + Dx")).unwrap(), (2, 0));
    assert_eq!(bidegree(&g, &op("Dx*Dy")).unwrap(), (1, 1));
    assert!(bidegree(&g, &g.to_lpdo()).is_err());
}

#[test]
fn expand_examples() {
    let g = HyperbolicL::generic();
    let mm = op("Dx - Dy");
    assert_eq!(expand(&mm, &Lpdo::zero(), &g), mm);
    assert_eq!(
        expand(&op("Dx"), &Lpdo::one(), &HyperbolicL::plain()),
        op("Dx + Dx*Dy")
    );
    let a = op("x*Dx^2 + y*Dy + q");
    assert_eq!(reduce_mixed(&g, &expand(&mm, &a, &g)), reduce_mixed(&g, &mm));
}

#[test]
fn expansion_keeps_l1() {
    let lp = l("Dx*Dy + y*Dx + x*Dy + (x*y + 1)");
    let mp = m("Dx + Dy + x + y");
    let w = solve_intertwining(&lp, &mp).unwrap();
    assert!(w.residuals_vanish());
    // N' = N + L1 ∘ A pairs with M' = M + A ∘ L.
    let a = op("x*Dy + 1");
    let expanded = DarbouxWitness {
        m: expand(&w.m, &a, &lp),
        n: w.n.add(&w.l1.to_lpdo().compose(&a)),
        ..w.clone()
    };
    assert!(expanded.defect().is_zero());
}

#[test]
fn laplace_examples() {
    let w = laplace(&HyperbolicL::plain(), Var::Y).unwrap();
    assert_eq!((w.m.clone(), w.n.clone()), (op("Dx"), op("Dx")));
    assert_eq!(w.l1, HyperbolicL::plain());
    assert!(w.residuals.is_empty());

    let g = HyperbolicL::generic();
    let wx = laplace(&g, Var::X).unwrap();
    let wy = laplace(&g, Var::Y).unwrap();
    assert!(wx.is_valid() && wy.is_valid());
    assert_eq!(reduce_mixed(&g, &wx.m.compose(&wy.m)), op("b_y - c + a*b"));
    assert_eq!(reduce_mixed(&g, &wy.m.compose(&wx.m)), op("a_x - c + a*b"));
}

#[test]
fn laplace_on_concrete_operators() {
    for s in ["Dx*Dy + y*Dx + x*Dy + (x*y + 1)", "Dx*Dy + x^2*Dx - 1/y*Dy + exp(x)"] {
        let lp = l(s);
        for dir in [Var::X, Var::Y] {
            assert!(laplace(&lp, dir).unwrap().is_valid(), "{s} {dir:?}");
        }
    }
}

#[test]
fn witness_symbols_and_json() {
    let w = solve_intertwining(&HyperbolicL::plain(), &m("Dx - Dy")).unwrap();
    assert_eq!(w.n, op("Dx - Dy"));
    assert_eq!(w.l1, HyperbolicL::plain());
    assert_eq!(w.residuals, vec![e("0"), e("0")]);
    assert!(w.is_valid());
    let v = serde_json::to_value(&w).unwrap();
    assert_eq!(v["L"], serde_json::json!({"a":"0","b":"0","c":"0"}));
    assert_eq!(v["residuals"], serde_json::json!(["0", "0"]));
    assert_eq!(v["M"][0], serde_json::json!({"dx":1,"dy":0,"coeff":"1"}));
    let back: DarbouxWitness = serde_json::from_value(v).unwrap();
    assert_eq!(back, w);
}

#[test]
fn solve_intertwining_generic() {
    let g = HyperbolicL::generic();
    let mg = FirstOrderM::generic();
    let w = solve_intertwining(&g, &mg).unwrap();
    assert_eq!(w.n, op("Dx + q*Dy + r - q_x/q + q_y"));
    let (e1, e2) = existence_conditions(&g, &mg);
    assert_eq!(w.residuals, vec![e1, e2]);
    assert_eq!(w.l1.a, e("a"));
    assert_eq!(w.l1.b, e("b - q_x/q"));
    assert!(matches!(
        solve_intertwining(&g, &FirstOrderM::new(e("0"), e("r"))),
        Err(DarbouxError::ZeroQ)
    ));
}

#[test]
fn existence_condition_examples() {
    let z = (e("0"), e("0"));
    assert_eq!(existence_conditions(&HyperbolicL::plain(), &m("Dx - Dy")), z);
    let lp = l("Dx*Dy + y*Dx + x*Dy + (x*y + 1)");
    assert_eq!(existence_conditions(&lp, &m("Dx + Dy + x + y")), z);
    assert!(solve_intertwining(&lp, &m("Dx + Dy + x + y")).unwrap().is_valid());
    assert_eq!(
        existence_conditions(&HyperbolicL::plain(), &m("Dx + Dy + x")),
        (e("-1"), e("0"))
    );
    let w = solve_intertwining(&HyperbolicL::plain(), &m("Dx + Dy + x")).unwrap();
    assert!(!w.residuals_vanish());
    assert!(!w.is_valid());
}

#[test]
fn left_scale_examples() {
    let w = solve_intertwining(&HyperbolicL::plain(), &m("Dx - Dy")).unwrap();
    assert_eq!(left_scale(&w, &e("1")).unwrap(), w);
    let s = left_scale(&w, &e("-1")).unwrap();
    assert_eq!(s.m, op("-Dx + Dy"));
    assert!(s.is_valid() && s.residuals_vanish());
    let lp = l("Dx*Dy + y*Dx + x*Dy + (x*y + 1)");
    let w = solve_intertwining(&lp, &m("Dx + Dy + x + y")).unwrap();
    let s = left_scale(&w, &e("x^2 + y")).unwrap();
    assert!(s.is_valid());
    assert_eq!(s.l1.to_lpdo().symbol(), w.l1.to_lpdo().symbol());
    assert_eq!(left_scale(&w, &e("x - x")), Err(DarbouxError::ZeroScale));
}

#[test]
fn compose_dt_examples() {
    let g = HyperbolicL::generic();
    let wx = laplace(&g, Var::X).unwrap();
    let wy = laplace(&wx.l1, Var::Y).unwrap();
    let c = compose_dt(&wx, &wy).unwrap();
    assert!(c.residuals.is_empty() && c.is_valid());
    assert_eq!(bidegree(&g, &c.m).unwrap(), (0, 0));

    let w = solve_intertwining(&HyperbolicL::plain(), &m("Dx - Dy")).unwrap();
    let id = compose_dt(&w, &DarbouxWitness::identity(&w.l1)).unwrap();
    assert_eq!((&id.l, &id.m, &id.n, &id.l1), (&w.l, &w.m, &w.n, &w.l1));
    assert!(id.residuals.is_empty());

    assert!(matches!(
        compose_dt(&w, &DarbouxWitness::identity(&g)),
        Err(DarbouxError::ChainingMismatch { .. })
    ));
}

#[test]
fn chained_wronskian_witnesses() {
    let plain = HyperbolicL::plain();
    let m1 = darboux11(&plain, &e("1"), &e("x + y")).unwrap();
    let w1 = solve_intertwining(&plain, &m1).unwrap();
    // M maps kernel elements of L to kernel elements of L1.
    let (p1, p2) = (w1.m.apply(&e("x^2")), w1.m.apply(&e("y^2")));
    assert_eq!((p1.clone(), p2.clone()), (e("2*x"), e("-2*y")));
    let m2 = darboux11(&w1.l1, &p1, &p2).unwrap();
    let w2 = solve_intertwining(&w1.l1, &m2).unwrap();
    assert!(w2.residuals_vanish());
    let c = compose_dt(&w1, &w2).unwrap();
    assert!(c.residuals.is_empty() && c.is_valid());
}

#[test]
fn wronskian_examples() {
    let plain = HyperbolicL::plain();
    assert_eq!(wronskian_mn(&plain, &[e("1"), e("x + y")], 1, 1).unwrap(), op("-Dx + Dy"));
    assert_eq!(wronskian_mn(&plain, &[e("1")], 1, 0).unwrap(), op("-Dx"));
    let w = wronskian_mn(&plain, &[e("x"), e("y^2")], 1, 1).unwrap();
    assert!(w.apply(&e("3*x - 5*y^2")).is_zero());
    assert!(matches!(
        wronskian_mn(&plain, &[e("x*y"), e("1")], 1, 1),
        Err(DarbouxError::NotInKernel { index: 0, .. })
    ));
    assert!(matches!(
        wronskian_mn(&plain, &[e("1"), e("2")], 1, 1),
        Err(DarbouxError::Degenerate(_))
    ));
    assert!(matches!(
        wronskian_mn(&plain, &[e("1")], 1, 1),
        Err(DarbouxError::SolutionCount { expected: 2, got: 1 })
    ));
}

#[test]
fn wronskian_of_order_two_and_three() {
    let plain = HyperbolicL::plain();
    let sols = [e("x"), e("y"), e("x^2")];
    let w = wronskian_mn(&plain, &sols, 2, 1).unwrap();
    for s in &sols {
        assert!(w.apply(s).is_zero());
    }
    let lp = l("Dx*Dy - 1/y*Dx");
    let w = wronskian_mn(&lp, &[e("1"), e("x*y")], 2, 0).unwrap();
    assert!(w.apply(&e("1")).is_zero() && w.apply(&e("x*y")).is_zero());
}

#[test]
fn darboux11_examples() {
    let plain = HyperbolicL::plain();
    let mm = darboux11(&plain, &e("1"), &e("x + y")).unwrap();
    assert_eq!(mm, m("Dx - Dy"));
    let lp = l("Dx*Dy - 1/y*Dx");
    let mm = darboux11(&lp, &e("1"), &e("x*y")).unwrap();
    assert_eq!(mm, m("Dx - y/x*Dy"));
    assert_eq!(existence_conditions(&lp, &mm), (e("0"), e("0")));
    assert!(matches!(
        darboux11(&plain, &e("1"), &e("x*y")),
        Err(DarbouxError::NotInKernel { index: 1, .. })
    ));
    assert!(matches!(
        darboux11(&plain, &e("1"), &e("x")),
        Err(DarbouxError::Degenerate(_))
    ));
}

#[test]
fn darboux11_matches_ratio_form() {
    let lp = l("Dx*Dy - 1/y*Dx");
    let (p1, p2) = (e("1"), e("x*y"));
    let mm = darboux11(&lp, &p1, &p2).unwrap();
    let psi = p2.div(&p1).unwrap();
    let q = psi.dx().div(&psi.dy()).unwrap().neg();
    let r = p1.dy().mul(&psi.dx()).div(&p1.mul(&psi.dy())).unwrap()
        - p1.dx().div(&p1).unwrap();
    assert_eq!(mm, FirstOrderM::new(q, r));
}

#[test]
fn darboux11_invariant_under_row_operation() {
    let lp = l("Dx*Dy - 1/y*Dx");
    let a = darboux11(&lp, &e("1"), &e("x*y")).unwrap();
    let b = darboux11(&lp, &e("1"), &e("x*y + 7/2")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn wronskian_is_d_times_darboux11() {
    let lp = l("Dx*Dy - 1/y*Dx");
    let (p1, p2) = (e("1"), e("x*y"));
    let w = wronskian_mn(&lp, &[p1.clone(), p2.clone()], 1, 1).unwrap();
    let d = p2.mul(&p1.dy()).sub(&p1.mul(&p2.dy()));
    let mm = darboux11(&lp, &p1, &p2).unwrap();
    assert_eq!(w, mm.to_lpdo().scale(&d));
    let sw = left_scale(&solve_intertwining(&lp, &mm).unwrap(), &d).unwrap();
    assert_eq!(sw.m, w);
    assert!(sw.is_valid());
}

#[test]
fn kernel_builder() {
    let lp = hyperbolic_with_kernel(&e("x"), &e("x*y^2"), &e("y")).unwrap();
    assert!(lp.apply(&e("x")).is_zero());
    assert!(lp.apply(&e("x*y^2")).is_zero());
    assert_eq!(lp.c, e("y"));
    assert!(hyperbolic_with_kernel(&e("x"), &e("2*x"), &e("0")).is_err());
}

#[test]
fn reconstruct_pair_recovers_invariants() {
    let targets = gauge_invariants(&HyperbolicL::plain(), &m("Dx - Dy"));
    let (lp, mp) = reconstruct_pair(&targets, &e("x + y"), &e("x")).unwrap();
    let g = gauge_invariants(&lp, &mp);
    assert_eq!((g.q, g.m, g.h, g.r), (e("-1"), e("0"), e("0"), e("0")));
    assert!(lp.apply(&e("x")).is_zero());
    assert!(lp.apply(&e("x*(x + y)")).is_zero());
}

#[test]
fn reconstruct_pair_degenerate_inputs() {
    let targets = gauge_invariants(&HyperbolicL::plain(), &m("Dx - Dy"));
    assert!(matches!(
        reconstruct_pair(&targets, &e("x + y"), &e("1")),
        Err(DarbouxError::Degenerate(_))
    ));
    assert!(matches!(
        reconstruct_pair(&targets, &e("3"), &e("x")),
        Err(DarbouxError::Degenerate(_))
    ));
    // z = x*y cannot produce q = -1.
    assert!(matches!(
        reconstruct_pair(&targets, &e("x*y"), &e("x")),
        Err(DarbouxError::ReconstructionMismatch { .. })
    ));
}
