use courant::scalar::{random_polynomial, Poly};
use courant::{Scalar, ScalarRing};
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const N: usize = 2;

fn poly(seed: u64, d: u32) -> Scalar {
    random_polynomial(N, d, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// A rational function with a nonconstant denominator most of the time.
fn ratfun(seed: u64) -> Scalar {
    let num = poly(seed, 2);
    let den = poly(seed.wrapping_mul(31).wrapping_add(7), 1);
    num.checked_div(&den).unwrap()
}

fn point(a: i64, b: i64) -> Vec<BigRational> {
    vec![BigRational::from_integer(a.into()), BigRational::from_integer(b.into())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn field_axioms(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (a, b, c) = (ratfun(a), ratfun(b), ratfun(c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.inverse().unwrap()).is_one());
        }
    }

    #[test]
    fn partials_commute_and_obey_leibniz(a in any::<u64>(), b in any::<u64>()) {
        let (a, b) = (ratfun(a), ratfun(b));
        prop_assert_eq!(a.derivative(0).derivative(1), a.derivative(1).derivative(0));
        let lhs = (&a * &b).derivative(0);
        let rhs = &a.derivative(0) * &b + &a * &b.derivative(0);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn canonical_form_is_idempotent(a in any::<u64>()) {
        let a = ratfun(a);
        let again = Scalar::from_fraction(a.numerator().clone(), a.denominator().clone()).unwrap();
        prop_assert_eq!(&again, &a);
        let text: Scalar = a.to_string().parse().unwrap();
        prop_assert_eq!(text, a);
    }

    #[test]
    fn arithmetic_agrees_with_pointwise_evaluation(
        a in any::<u64>(), b in any::<u64>(), x in -4i64..5, y in -4i64..5,
    ) {
        let ring = ScalarRing::new(N).unwrap();
        let (a, b) = (ratfun(a), ratfun(b));
        let pt = point(x, y);
        if let (Ok(va), Ok(vb)) = (ring.evaluate(&a, &pt), ring.evaluate(&b, &pt)) {
            prop_assert_eq!(ring.evaluate(&(&a + &b), &pt).unwrap(), &va + &vb);
            prop_assert_eq!(ring.evaluate(&(&a * &b), &pt).unwrap(), &va * &vb);
            if !vb.is_zero() {
                prop_assert_eq!(ring.evaluate(&a.checked_div(&b).unwrap(), &pt).unwrap(), &va / &vb);
            }
        }
    }

    #[test]
    fn gcd_divides_both_and_absorbs_common_factor(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let pa = poly(a, 2).numerator().clone();
        let pb = poly(b, 2).numerator().clone();
        let f = poly(c, 1).numerator().clone();
        let (x, y) = (pa.mul(&f), pb.mul(&f));
        let g = x.gcd(&y);
        prop_assert!(x.div_exact(&g).is_some());
        prop_assert!(y.div_exact(&g).is_some());
        prop_assert!(g.div_exact(&f.monic()).is_some() || f.is_constant());
        prop_assert_eq!(g.clone(), y.gcd(&x));
        prop_assert!(g.leading_coefficient() == BigRational::from_integer(1.into()) || g == Poly::zero());
    }
}
