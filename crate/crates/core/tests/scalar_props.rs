use pingpong_core::field::Valuation;
use pingpong_core::{LocalField, Padic, PadicField, C64};
use proptest::prelude::*;

fn q5() -> PadicField {
    PadicField::new(5, 12).unwrap()
}

fn padic() -> impl Strategy<Value = Padic> {
    (-3i64..4, 1i128..5i128.pow(8), prop::bool::ANY).prop_map(|(v, u, neg)| {
        let f = q5();
        let u = f.int(if neg { -u } else { u });
        u * f.uniformizer_pow(v)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn padic_abs_is_ultrametric(x in padic(), y in padic()) {
        let s = (x + y).abs_val();
        let (ax, ay) = (x.abs_val(), y.abs_val());
        let m = if ax >= ay { ax } else { ay };
        prop_assert!(s <= m);
        if ax != ay {
            prop_assert_eq!(s, m);
        }
    }

    #[test]
    fn padic_abs_is_multiplicative(x in padic(), y in padic()) {
        prop_assert_eq!((x * y).abs_val(), x.abs_val() * y.abs_val());
    }

    #[test]
    fn valuation_is_additive(x in padic(), y in padic()) {
        let (Valuation::Finite(a), Valuation::Finite(b)) = (x.valuation().unwrap(), y.valuation().unwrap()) else {
            panic!("nonzero inputs have finite valuation");
        };
        prop_assert_eq!((x * y).valuation().unwrap(), Valuation::Finite(a + b));
    }

    #[test]
    fn archimedean_abs_is_multiplicative(a in -1e6f64..1e6, b in -1e6f64..1e6, c in -1e3f64..1e3, d in -1e3f64..1e3) {
        let prod = (a * b).abs_val();
        prop_assert!((prod - a.abs_val() * b.abs_val()).abs() <= 1e-12 * prod.max(f64::MIN_POSITIVE));
        let (z, w) = (C64::new(a, c), C64::new(b, d));
        let prod = (z * w).abs_val();
        prop_assert!((prod - z.abs_val() * w.abs_val()).abs() <= 1e-12 * prod.max(f64::MIN_POSITIVE));
    }
}
