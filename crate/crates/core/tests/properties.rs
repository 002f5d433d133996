use std::sync::Arc;

use groupoid_conv::coeffs::text::format_coeff;
use groupoid_conv::coeffs::{CoeffFn, FlatFn, Poly};
use groupoid_conv::conv::ConvElement;
use groupoid_conv::groupoid::Registry;
use groupoid_conv::lie_rinehart::LieRinehart;
use groupoid_conv::number::{qr, ExpNum};
use groupoid_conv::parse::{parse_coeff, parse_conv, parse_uea};
use groupoid_conv::phi::phi;
use groupoid_conv::uea::UEAElement;
use proptest::prelude::*;

fn poly(nvars: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((prop::collection::vec(0u32..3, nvars), -4i64..=4, 1i64..=3), 0..4)
        .prop_map(move |terms| Poly::from_terms(nvars, terms.into_iter().map(|(m, n, d)| (m, qr(n, d)))))
}

fn coeff() -> impl Strategy<Value = CoeffFn> {
    prop_oneof![
        poly(1).prop_map(CoeffFn::Poly),
        (poly(1), 1i64..=3).prop_map(|(p, a)| CoeffFn::flat(FlatFn::phi().scale_arg(&qr(a, 1)).mul_poly(&p))),
    ]
}

fn uea(lie: Arc<LieRinehart>) -> impl Strategy<Value = UEAElement> {
    let (r, n) = (lie.rank(), lie.dim());
    prop::collection::vec((prop::collection::vec(0u32..3, r), poly(n)), 1..3)
        .prop_map(move |terms| UEAElement::from_terms(&lie, terms.into_iter().map(|(e, p)| (e, CoeffFn::Poly(p)))))
}

fn pair_element(reg: Arc<Registry>) -> impl Strategy<Value = ConvElement> {
    let ids = ["1", "T1", "D2", "A3", "H"];
    let lie = reg.model.lie.clone();
    prop::collection::vec((0..ids.len(), uea(lie)), 1..3).prop_map(move |terms| {
        terms.into_iter().fold(ConvElement::zero(&reg), |acc, (k, u)| {
            acc.add(&ConvElement::term(&reg, u, ids[k]).unwrap()).unwrap()
        })
    })
}

fn t() -> Vec<String> {
    vec!["t".to_string()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coefficient_text_round_trips(f in coeff()) {
        let text = format_coeff(&f, &t());
        prop_assert_eq!(parse_coeff(&text, &t()).unwrap(), f, "{}", text);
    }

    #[test]
    fn derivative_is_a_derivation(f in coeff(), g in coeff()) {
        let lhs = (&f * &g).derive(0);
        let rhs = &(&f.derive(0) * &g) + &(&f * &g.derive(0));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn germ_equality_is_symmetric(f in coeff(), g in coeff(), x in -2i64..=2) {
        let p = [ExpNum::rational(qr(x, 1))];
        prop_assert!(f.germ_eq(&f, &p).unwrap());
        prop_assert_eq!(f.germ_eq(&g, &p).unwrap(), g.germ_eq(&f, &p).unwrap());
    }

    #[test]
    fn enveloping_product_is_associative(
        x in uea(Arc::new(LieRinehart::tangent_line())),
        y in uea(Arc::new(LieRinehart::tangent_line())),
        z in uea(Arc::new(LieRinehart::tangent_line())),
    ) {
        prop_assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
    }

    #[test]
    fn enveloping_text_round_trips(x in uea(Arc::new(LieRinehart::heisenberg()))) {
        let lie = Arc::new(LieRinehart::heisenberg());
        let back = parse_uea(&x.to_text(), &lie).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn coproduct_is_multiplicative(
        x in uea(Arc::new(LieRinehart::tangent_line())),
        y in uea(Arc::new(LieRinehart::tangent_line())),
    ) {
        prop_assert_eq!(x.mul(&y).unwrap().coproduct(), x.coproduct().mul(&y.coproduct()).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn convolution_is_associative_and_phi_multiplicative(
        (a, b, c) in {
            let reg = Arc::new(Registry::pair_standard());
            (pair_element(reg.clone()), pair_element(reg.clone()), pair_element(reg))
        }
    ) {
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(ab.mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(phi(&ab).unwrap(), phi(&a).unwrap().mul(&phi(&b).unwrap()).unwrap());
    }

    #[test]
    fn convolution_text_round_trips(a in pair_element(Arc::new(Registry::pair_standard()))) {
        let back = parse_conv(&a.to_text(), &a.reg).unwrap();
        prop_assert_eq!(back, a);
    }
}
