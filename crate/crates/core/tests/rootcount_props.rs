use kaclab::rootcount::*;
use kaclab::{IntervalSpec, Polynomial};
use proptest::prelude::*;

fn interval_strategy() -> impl Strategy<Value = IntervalSpec> {
    (-8i32..8, 1i32..9, any::<bool>(), any::<bool>()).prop_map(|(a, w, lc, hc)| {
        let lo = f64::from(a) / 4.0;
        IntervalSpec::new(lo, lo + f64::from(w) / 4.0, lc, hc).unwrap()
    })
}

fn small_ints(max_len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, 2..max_len).prop_filter("nonzero", |c| c.iter().any(|&x| x != 0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn bisection_agrees_with_sturm(coeffs in small_ints(30), interval in interval_strategy()) {
        let p = Polynomial::from_integers(&coeffs);
        let z = p.multiplicity_at_zero().tau;
        let q = p.shift_down(z).trimmed();
        let exact = sturm_count(&q, &interval).unwrap();
        let b = bisection_count(&q, &interval, FLOAT_BITS).unwrap();
        if b.certified {
            prop_assert_eq!(b.count, exact.count);
        }
        let opts = CountOptions::default();
        let c = count_roots(&p, &interval, &opts).unwrap();
        prop_assert!(c.certified);
        let zero = if interval.contains_zero() { z as u64 } else { 0 };
        prop_assert_eq!(c.count, exact.count + zero);
    }

    #[test]
    fn negate_and_reciprocal_identities(coeffs in small_ints(20), a in 1i32..8, w in 1i32..8) {
        let p = Polynomial::from_integers(&coeffs);
        let q = p.shift_down(p.multiplicity_at_zero().tau).trimmed();
        let lo = f64::from(a) / 8.0;
        let hi = lo + f64::from(w) / 8.0;
        let pos = IntervalSpec::closed(lo, hi).unwrap();
        let neg = IntervalSpec::closed(-hi, -lo).unwrap();
        prop_assert_eq!(
            sturm_count(&q, &neg).unwrap().count,
            sturm_count(&transform_negate(&q), &pos).unwrap().count
        );
        // [1, b] for P against [1/b, 1] for the reversed polynomial; b is a
        // power of two so that 1/b is a binary64 endpoint
        let b = f64::from(1u32 << (w % 4 + 1));
        let outer = IntervalSpec::closed(1.0, b).unwrap();
        let inner = IntervalSpec::closed(1.0 / b, 1.0).unwrap();
        prop_assert_eq!(
            sturm_count(&q, &outer).unwrap().count,
            sturm_count(&transform_reciprocal(&q), &inner).unwrap().count
        );
    }

    #[test]
    fn f64_path_matches_exact_path(coeffs in prop::collection::vec(-1.0f64..1.0, 2..40), interval in interval_strategy()) {
        let opts = CountOptions::default();
        let fast = count_roots_f64(&coeffs, &interval, &opts).unwrap();
        let exact = count_roots(&Polynomial::from_f64(coeffs.clone()).unwrap(), &interval, &opts).unwrap();
        if fast.certified && exact.certified {
            prop_assert_eq!(fast.count, exact.count);
        }
    }
}

#[test]
fn repeated_root_is_counted_once() {
    // (x - 1/2)^2 (x + 1) = x^3 - 3/4 x + 1/4
    let p = Polynomial::from_integers(&[1, -3, 0, 4]);
    let r = count_roots(&p, &IntervalSpec::whole_line(), &CountOptions::default()).unwrap();
    assert_eq!(r.count, 2);
    assert!(r.certified);
}

#[test]
fn origin_counted_by_multiplicity() {
    // x^3 (x - 1/2)
    let p = Polynomial::from_integers(&[0, 0, 0, -1, 2]);
    let opts = CountOptions::default();
    assert_eq!(count_roots(&p, &IntervalSpec::zero_point(), &opts).unwrap().count, 3);
    assert_eq!(count_roots(&p, &"[0,1]".parse().unwrap(), &opts).unwrap().count, 4);
    assert_eq!(count_roots(&p, &"(0,1]".parse().unwrap(), &opts).unwrap().count, 1);
}
