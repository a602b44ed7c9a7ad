use num_bigint::BigInt;
use num_rational::BigRational;

/// Exact rational number with arbitrary-precision numerator and denominator,
/// always stored in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Builds `num/den` in canonical form. Panics on a zero denominator.
pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Renders a rational as `p/q`, or `p` for integers.
pub fn fraction_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    #[test]
    fn canonical_form() {
        let r = rational(4, -8);
        assert_eq!(*r.numer(), BigInt::from(-1));
        assert_eq!(*r.denom(), BigInt::from(2));
        assert_eq!(fraction_string(&r), "-1/2");
        assert_eq!(fraction_string(&rational(6, 3)), "2");
    }

    #[test]
    fn no_overflow_on_large_denominators() {
        let mut acc = Rational::zero();
        for k in 1..200i64 {
            acc += rational(1, k * (k + 1));
        }
        // telescoping sum 1 - 1/200
        assert_eq!(acc, Rational::one() - rational(1, 200));
        let big = rational(i64::MAX, 3) * rational(i64::MAX, 7);
        assert!(big > Rational::from_integer(BigInt::from(i64::MAX)));
    }

    fn arb() -> impl Strategy<Value = Rational> {
        (-1000i64..1000, 1i64..1000).prop_map(|(n, d)| rational(n, d))
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb(), b in arb(), c in arb()) {
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        }

        #[test]
        fn total_order_is_consistent(a in arb(), b in arb()) {
            let lt = a < b;
            let gt = a > b;
            let eq = a == b;
            prop_assert_eq!(u8::from(lt) + u8::from(gt) + u8::from(eq), 1);
        }
    }
}
