//! Property tests for the arithmetic substrate: valuation laws, residue
//! homomorphism, additive-character multiplicativity and Teichmueller
//! idempotency on randomized inputs.

use num_rational::BigRational;
use padic_cusp_core::cyclotomic::Cyc;
use padic_cusp_core::local_field::{teichmuller_part, AdditiveCharacter, LocalField};
use padic_cusp_core::rat::rat_int;
use proptest::prelude::*;

fn q7() -> LocalField {
    LocalField::qp(7, 6)
}

prop_compose! {
    /// Nonzero rationals with 7-smooth-free small parts.
    fn small_rational()(num in -300i64..300, den in 1i64..60) -> (i64, i64) {
        (if num == 0 { 1 } else { num }, den)
    }
}

proptest! {
    #[test]
    fn valuation_is_multiplicative((an, ad) in small_rational(), (bn, bd) in small_rational()) {
        let f = q7();
        let x = f.rational(an, ad);
        let y = f.rational(bn, bd);
        let vx = x.val().unwrap().unwrap();
        let vy = y.val().unwrap().unwrap();
        let vxy = x.mul_ref(&y).val().unwrap().unwrap();
        prop_assert_eq!(vxy, vx + vy);
    }

    #[test]
    fn valuation_ultrametric((an, ad) in small_rational(), (bn, bd) in small_rational()) {
        let f = q7();
        let x = f.rational(an, ad);
        let y = f.rational(bn, bd);
        let vx = x.val().unwrap().unwrap();
        let vy = y.val().unwrap().unwrap();
        let sum = x.add_ref(&y);
        match sum.val().unwrap() {
            None => prop_assert!(vx == vy, "exact cancellation needs equal valuations"),
            Some(vs) => {
                prop_assert!(vs >= vx.min(vy));
                if vx != vy {
                    prop_assert_eq!(vs, vx.min(vy));
                }
            }
        }
    }

    #[test]
    fn residue_is_a_ring_homomorphism(a in 0i64..200, b in 0i64..200) {
        let f = q7();
        let x = f.int(a);
        let y = f.int(b);
        let rx = x.residue().unwrap();
        let ry = y.residue().unwrap();
        prop_assert_eq!(x.add_ref(&y).residue().unwrap(), rx.add(&ry));
        prop_assert_eq!(x.mul_ref(&y).residue().unwrap(), rx.mul(&ry));
    }

    #[test]
    fn additive_character_is_multiplicative((an, ad) in small_rational(), (bn, bd) in small_rational()) {
        let f = q7();
        let phi = AdditiveCharacter::new(f);
        let x = f.rational(an, ad * 7);
        let y = f.rational(bn, bd);
        let lhs = phi.eval(&x).unwrap() * phi.eval(&y).unwrap();
        let rhs = phi.eval(&x.add_ref(&y)).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        // |value| = 1 exactly
        prop_assert!(lhs.is_unit_modulus());
    }

    #[test]
    fn teichmuller_has_prime_to_p_order(u in 1i64..48) {
        let f = q7();
        let unit = f.int(if u % 7 == 0 { u + 1 } else { u });
        let t = teichmuller_part(&unit, 3).unwrap();
        let tq = t.pow_mod(6, 3);
        prop_assert!(tq.sub_ref(&f.one().truncate(3)).certify_val_at_least(3).unwrap());
        // congruent to the unit mod pi
        prop_assert!(t.sub_ref(&unit).certify_val_at_least(1).unwrap());
    }

    #[test]
    fn cyclotomic_field_axioms(a in -6i64..6, b in -6i64..6, k in 0i64..12, l in 0i64..12) {
        let x = Cyc::from_int(a) + Cyc::zeta(12, k);
        let y = Cyc::from_int(b) + Cyc::zeta(12, l);
        // distributivity against a third element
        let z = Cyc::zeta(8, 3);
        let lhs = (x.clone() + y.clone()) * z.clone();
        let rhs = x.clone() * z.clone() + y.clone() * z.clone();
        prop_assert_eq!(lhs, rhs);
        // inverses when nonzero
        if !x.is_zero() {
            prop_assert_eq!(x.clone() * x.inv().unwrap(), Cyc::one());
        }
        // conjugation is a ring map
        prop_assert_eq!((x.clone() * y.clone()).conj(), x.conj() * y.conj());
    }

    #[test]
    fn inner_product_shape(n in 1usize..5) {
        // <chi, chi> of a sum of roots of unity is rational
        let chi: Vec<Cyc> = (0..n as i64).map(|k| Cyc::zeta(5, k)).collect();
        let ip = padic_cusp_core::finrep::inner_product(&chi, &chi);
        prop_assert!(ip >= BigRational::from_integer(0.into()));
    }
}

#[test]
fn val_of_uniformizer_normalized() {
    let e = LocalField::ramified_quadratic(5, 6);
    assert_eq!(
        e.uniformizer().val().unwrap(),
        Some(padic_cusp_core::rat::rat(1, 2))
    );
    assert_eq!(e.int(5).val().unwrap(), Some(rat_int(1)));
}
