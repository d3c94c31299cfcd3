//! Property tests for invariants that hold for arbitrary forms, points and group elements.

use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

use crate::characters::GenusCharacter;
use crate::qforms::{ExactPoint, GroupElement, QForm};
use crate::series::{
    eis_hat, translate_sum_fourier, translate_sum_partial_fractions, EisParams, EvalBudget, HatRoute,
};

fn word(steps: &[u8]) -> GroupElement {
    steps.iter().fold(GroupElement::IDENTITY, |g, s| {
        let step = match s {
            0 => GroupElement::S,
            1 => GroupElement::T,
            _ => GroupElement::t_pow(-1),
        };
        g.mul(&step).unwrap()
    })
}

/// Indefinite forms with a non-square discriminant.
fn form() -> impl Strategy<Value = QForm> {
    (-9i64..=9, -9i64..=9, -9i64..=9)
        .prop_map(|(a, b, c)| QForm::new(a, b, c))
        .prop_filter("indefinite, non-square", |q| {
            let d = q.disc();
            d > 0 && (d as f64).sqrt().round().powi(2) as i64 != d && q.a != 0 && q.c != 0
        })
}

fn point() -> impl Strategy<Value = ExactPoint> {
    (-40i64..=40, 1i64..=12, 1i64..=40, 1i64..=12).prop_map(|(un, ud, vn, vd)| ExactPoint::from_ratios(un, ud, vn, vd).unwrap())
}

fn steps() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..3, 1..7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn qtau_is_invariant_under_the_action(q in form(), tau in point(), w in steps()) {
        let g = word(&w);
        let moved = q.act(&g).unwrap();
        prop_assert_eq!(moved.qtau_exact(&tau), q.qtau_exact(&g.apply_exact(&tau)));
    }

    #[test]
    fn squared_modulus_identity(q in form(), tau in point()) {
        let z = q.value_exact(&tau);
        let lhs = &z.re * &z.re + &z.im * &z.im;
        let qt = q.qtau_exact(&tau);
        let d = BigRational::from_integer(q.disc().into());
        prop_assert_eq!(lhs, &tau.v * &tau.v * (&qt * &qt + d));
    }

    #[test]
    fn indicator_matches_sign_of_qtau(q in form(), tau in point()) {
        let qt = q.qtau_exact(&tau);
        prop_assume!(qt != BigRational::from_integer(0.into()));
        let ind = q.indicator_exact(&tau).unwrap() as i32;
        let sgn = if qt > BigRational::from_integer(0.into()) { 1 } else { -1 };
        prop_assert_eq!(sgn, q.sign().unwrap() * (1 - 2 * ind));
    }

    #[test]
    fn class_key_is_a_class_invariant(q in form(), w in steps()) {
        let moved = q.act(&word(&w)).unwrap();
        prop_assert_eq!(q.class_key().unwrap(), moved.class_key().unwrap());
    }

    #[test]
    fn automorph_fixes_the_form(q in form()) {
        let g = q.automorph().unwrap();
        prop_assert_eq!(q.act(&g).unwrap(), q);
        prop_assert!(g != GroupElement::IDENTITY && g.neg() != GroupElement::IDENTITY);
    }

    #[test]
    fn genus_character_is_a_class_function(w in steps(), pick in 0usize..4) {
        let (q, d) = [(QForm::new(1, 1, -1), 5), (QForm::new(1, 6, -6), -4), (QForm::new(1, 6, -1), 8), (QForm::new(1, 3, -1), 13)][pick];
        let chi = GenusCharacter::new(d, q.disc()).unwrap();
        let moved = q.act(&word(&w)).unwrap();
        prop_assert_eq!(chi.eval(&q).unwrap(), chi.eval(&moved).unwrap());
    }

    #[test]
    fn translate_sum_routes_agree(xr in -1.0f64..1.0, ar in -1.0f64..1.0, ai in 0.1f64..1.5, gap in 0.05f64..1.5, k in 2u32..8) {
        let a = Complex64::new(ar, ai);
        let x = Complex64::new(xr, ai + gap);
        let pf = translate_sum_partial_fractions(x, a, k);
        let fo = translate_sum_fourier(x, a, k);
        prop_assert!((pf - fo).norm() <= 1e-9 * pf.norm().max(1e-300), "{} vs {}", pf, fo);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn hat_routes_agree(u in -0.5f64..0.5, v in 0.3f64..1.5) {
        let tau = Complex64::new(u, v);
        prop_assume!(crate::qforms::net_clearance(5, tau).unwrap() > 1e-3);
        let p = EisParams::at_zero(6, 5, 1).unwrap();
        let b = EvalBudget { r: 60.0, ..EvalBudget::default() };
        let a = eis_hat(&p, tau, &b, HatRoute::Direct).unwrap().value;
        let c = eis_hat(&p, tau, &b, HatRoute::Identity).unwrap().value;
        prop_assert!((a - c).norm() <= 1e-12 * a.norm(), "{} vs {}", a, c);
    }
}
