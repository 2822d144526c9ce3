use num_bigint::BigUint;
use num_traits::{One, Zero};
use proptest::prelude::*;

use digitwitness::fracpow::{self, frac_params, DEFAULT_MAX_PRECISION};
use digitwitness::oracle::{self, LogBase};
use digitwitness::radix::{digit_count, digit_sum, expand, from_pattern, pow, split_digit_sum};
use digitwitness::report::ReportJson;
use digitwitness::solver::{self, amplify_chain, chain_params};
use digitwitness::{
    floor_pow_rational, floor_pow_real, integer_root, patterns, verify_witness, Exponent, Natural,
    RatioTarget, RefinableReal,
};

fn big(bits: u64) -> impl Strategy<Value = BigUint> {
    prop::collection::vec(any::<u8>(), 1..=(bits as usize).div_ceil(8))
        .prop_map(|b| BigUint::from_bytes_le(&b))
}

fn base() -> impl Strategy<Value = u32> {
    prop_oneof![Just(2u32), Just(3), Just(4), Just(5), Just(7), Just(10), 2u32..300]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn expand_round_trip(n in big(300), q in base()) {
        let ds = expand(&n, q).unwrap();
        prop_assert_eq!(ds.value(), n.clone());
        if !n.is_zero() {
            prop_assert_ne!(ds.digits()[0], 0);
            prop_assert_eq!(from_pattern(&ds.run_length()).unwrap(), n);
        }
    }

    #[test]
    fn digit_sum_congruent_mod_q_minus_1(n in big(256), q in 3u32..40) {
        let s = digit_sum(&n, q).unwrap();
        prop_assert_eq!(BigUint::from(s) % (q - 1), &n % (q - 1));
    }

    #[test]
    fn shift_invariance(n in big(256), q in base()) {
        prop_assert_eq!(digit_sum(&(&n * q), q).unwrap(), digit_sum(&n, q).unwrap());
    }

    #[test]
    fn split_sums_add_up(n in big(256), q in base(), k in 0u64..120) {
        let (lo, hi) = split_digit_sum(&n, q, k).unwrap();
        prop_assert_eq!(lo + hi, digit_sum(&n, q).unwrap());
        let qk = pow(q, k);
        prop_assert_eq!(lo, digit_sum(&(&n % &qk), q).unwrap());
    }

    #[test]
    fn pattern_text_round_trip(n in big(200), q in base()) {
        prop_assume!(!n.is_zero());
        let p = expand(&n, q).unwrap().run_length();
        let text = p.to_string();
        let back: digitwitness::RunLengthPattern = text.parse().unwrap();
        prop_assert_eq!(back.value(), n);
    }

    #[test]
    fn integer_root_brackets(n in big(512), m in 1u64..=9) {
        let x = integer_root(&n, m).unwrap();
        let m32 = m as u32;
        prop_assert!(x.pow(m32) <= n);
        prop_assert!((&x + 1u32).pow(m32) > n);
    }

    #[test]
    fn base2_amplification(u in big(512)) {
        prop_assume!(!u.is_zero());
        let v = solver::amplify_base2(&u).unwrap();
        prop_assert_eq!(v.count_ones(), 2 * u.count_ones());
        prop_assert_eq!((&v * &v).count_ones(), 3 * (&u * &u).count_ones());
    }

    #[test]
    fn chain_counts_digits(u in big(128), q in 3u32..12, d in 1u64..8) {
        prop_assume!(!u.is_zero());
        let v = amplify_chain(q, &u, d).unwrap();
        prop_assert_eq!(digit_sum(&v, q).unwrap(), d * digit_sum(&u, q).unwrap());
        let p = chain_params(q, &u, d).unwrap();
        prop_assert!(pow(q, p.m) > u);
        prop_assert_eq!(p.m, digit_count(&u, q).unwrap());
    }

    #[test]
    fn chain_square_splits_into_blocks(u in big(96), q in 3u32..12, d in 1u64..7) {
        // s(v^2) = d s(u^2) + C(d,2) s(2u^2), whether or not u has the
        // doubled-square property.
        prop_assume!(!u.is_zero());
        let v = amplify_chain(q, &u, d).unwrap();
        let sq = &u * &u;
        let expect = d * digit_sum(&sq, q).unwrap()
            + d * (d - 1) / 2 * digit_sum(&(&sq * 2u32), q).unwrap();
        prop_assert_eq!(digit_sum(&(&v * &v), q).unwrap(), expect);
    }

    #[test]
    fn rational_real_powers_agree(u in 1u64..1_000_000, h in 1u64..5, m in 1u64..7) {
        let alpha: RefinableReal = format!("rat:{h}/{m}").parse().unwrap();
        let u = Natural::from(u);
        prop_assert_eq!(
            floor_pow_real(&u, &alpha, DEFAULT_MAX_PRECISION).unwrap(),
            floor_pow_rational(&u, h, m).unwrap()
        );
    }

    #[test]
    fn sqrt_powers_match_f64(u in 2u64..5000) {
        let f = floor_pow_real(&Natural::from(u), &RefinableReal::sqrt(2), DEFAULT_MAX_PRECISION).unwrap();
        let approx = (u as f64).powf(2f64.sqrt());
        let f = f.to_string().parse::<f64>().unwrap();
        prop_assert!((f - approx.floor()).abs() <= 1.0);
    }
}

#[test]
fn radix_round_trip_exhaustive() {
    use rayon::prelude::*;
    for q in [2u32, 3, 4, 5, 10] {
        (0..=1_000_000u64).into_par_iter().for_each(|n| {
            let nat = Natural::from(n);
            let ds = expand(&nat, q).unwrap();
            assert_eq!(ds.value(), nat);
            if n > 0 {
                assert_eq!(from_pattern(&ds.run_length()).unwrap(), nat);
            }
        });
    }
}

#[test]
fn integer_root_random_sample() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for _ in 0..10_000 {
        let bits = rng.gen_range(1..512u64);
        let bytes: Vec<u8> = (0..bits.div_ceil(8)).map(|_| rng.gen()).collect();
        let n = BigUint::from_bytes_le(&bytes) % (BigUint::one() << bits);
        let m = rng.gen_range(1..=9u32);
        let x = integer_root(&n, u64::from(m)).unwrap();
        assert!(x.pow(m) <= n && (&x + 1u32).pow(m) > n);
    }
}

#[test]
fn spec_examples_radix() {
    let n = Natural::from(10214u32);
    assert_eq!(digit_sum(&n, 3).unwrap(), 8);
    assert_eq!(expand(&n, 3).unwrap().digits(), &[1, 1, 2, 0, 0, 0, 0, 2, 2]);
    assert!(expand(&Natural::zero(), 2).unwrap().is_empty());
    assert_eq!(expand(&Natural::from(49u32), 2).unwrap().digits(), &[1, 1, 0, 0, 0, 1]);
    let p: digitwitness::RunLengthPattern = "b3:1^2 2^1 0^4 2^2".parse().unwrap();
    assert_eq!(from_pattern(&p).unwrap(), n);
    let p: digitwitness::RunLengthPattern = "b2:1^4 0^1 1^5 0^1 1^13".parse().unwrap();
    assert_eq!(from_pattern(&p).unwrap(), Natural::from(16244735u32));
    assert_eq!(split_digit_sum(&Natural::from(49u32), 2, 3).unwrap(), (1, 2));
    assert_eq!(split_digit_sum(&n, 3, 9).unwrap(), (8, 0));
    assert!(digit_sum(&n, 1).is_err());
}

#[test]
fn pattern_general_counts() {
    assert_eq!(patterns::pattern_general(2, 1, 4, 13).unwrap(), Natural::from(16244735u32));
    assert_eq!(patterns::pattern_general(2, 0, 1, 1).unwrap(), Natural::from(5u32));
    let u = patterns::pattern_general(3, 1, 2, 3).unwrap();
    assert_eq!(expand(&u, 3).unwrap().digits(), &[2, 2, 1, 2, 2, 2, 1, 2, 2, 2]);
    for q in [2u32, 3, 4, 7] {
        for m in 0..4u64 {
            for k in 1..6u64 {
                for n in 1..12u64 {
                    let u = patterns::pattern_general(q, m, k, n).unwrap();
                    let unit = u64::from(q - 1);
                    let e2 = patterns::ladder_e2(q, m) as u64;
                    assert_eq!(digit_sum(&u, q).unwrap(), unit * (k * (m + 1) + n) + e2);
                }
            }
        }
    }
}

#[test]
fn calibration_records() {
    let rec = patterns::calibrate(2, 1).unwrap();
    assert_eq!((rec.constants.e1, rec.constants.e2, rec.constants.d), (0, 1, 4));
    let rec = patterns::calibrate(2, 0).unwrap();
    assert_eq!((rec.constants.e2, rec.constants.d), (0, 2));
    let rec = patterns::calibrate(3, 2);
    assert!(rec.is_err(), "base 3 needs 2 | m+1");
    let rec = patterns::calibrate(3, 1).unwrap();
    assert_eq!(rec.constants.e2, 1 * 2 + 2);
    assert_eq!(rec.constants.e3, Some(2));
}

#[test]
fn melfi_is_monotone() {
    let mut prev = 0;
    for n in (1..=20_000u64).step_by(97) {
        let c = oracle::melfi_count(n);
        assert!(c >= prev);
        prev = c;
    }
}

#[test]
fn scan_is_chunk_independent() {
    for q in [2u32, 3, 10] {
        let whole = oracle::scan_chunked(q, 50_000, 50_000).unwrap();
        for chunk in [1u64, 3, 999, 1 << 16] {
            assert_eq!(oracle::scan_chunked(q, 50_000, chunk).unwrap(), whole);
        }
        let total: u64 = whole.entries.values().map(|e| e.count).sum();
        assert_eq!(total, 50_000);
        for (r, e) in &whole.entries {
            let rep = verify_witness(&Natural::from(e.min_witness), q, Exponent::Square).unwrap();
            assert_eq!(rep.ratio, *r);
        }
    }
}

#[test]
fn bounds_violations_recheck() {
    let rep = oracle::stolarsky_check(20_000, 3, LogBase::E).unwrap();
    for &n in &rep.violations_left_eq1 {
        assert!(!oracle::left_eq1_holds(n, LogBase::E));
    }
    for &n in &rep.violations_right_eq11 {
        assert!(oracle::right_eq11_violated(n, 3, LogBase::E));
    }
}

#[test]
fn witnesses_replay_and_round_trip_json() {
    let ratios = [(1, 2), (2, 3), (1, 1), (7, 2), (1, 12), (12, 1), (5, 7)];
    for q in [2u32, 3, 4, 5, 10] {
        for (a, c) in ratios {
            let r = RatioTarget::new(a, c).unwrap();
            let rep = solver::witness(q, r).unwrap();
            let again = solver::witness(q, r).unwrap();
            assert_eq!(rep, again);
            assert_eq!(solver::replay(q, Exponent::Square, &rep.trace).unwrap(), rep.witness);
            let js = serde_json::to_string(&rep.to_json()).unwrap();
            let back: ReportJson = serde_json::from_str(&js).unwrap();
            assert_eq!(back.into_report().unwrap(), rep);
        }
    }
}

#[test]
fn fractional_layout_and_d_expansion() {
    for (q, h, m) in [(2u32, 1u64, 3u64), (2, 1, 4), (3, 2, 5), (10, 1, 3), (5, 3, 7), (4, 1, 5)] {
        for (a, c) in [(1, 2), (1, 1), (2, 3), (3, 1), (5, 4)] {
            let r = RatioTarget::new(a, c).unwrap();
            let p = frac_params(q, h, m, r).unwrap();
            let unit = u64::from(q - 1);
            let wa = p.w * a;
            // d = (q-1)^(j-1) (q-2) (q-1)^(wa-j)
            let d_digits = expand(&p.d, q).unwrap();
            let mut expect = vec![q - 1; (p.j - 1) as usize];
            expect.push(q - 2);
            expect.extend(std::iter::repeat_n(q - 1, (wa - p.j) as usize));
            if expect[0] == 0 {
                expect.remove(0);
            }
            assert_eq!(d_digits.digits(), expect.as_slice(), "q={q} j={} wa={wa}", p.j);
            assert_eq!(digit_sum(&p.d, q).unwrap(), unit * wa - 1);

            let top = p.n * m / h;
            let mid = Natural::from(m) * (&p.d + 1u32) / h * pow(q, top - p.n);
            let u = p.witness().unwrap();
            assert_eq!(
                digit_sum(&u, q).unwrap(),
                1 + digit_sum(&mid, q).unwrap() + digit_sum(&p.e, q).unwrap()
            );
            assert_eq!(digit_sum(&u, q).unwrap(), unit * p.w * c);
            assert_eq!(floor_pow_rational(&u, h, m).unwrap(), pow(q, p.n) + &p.d);

            let rep = fracpow::witness_frac(q, h, m, r).unwrap();
            assert_eq!(rep.witness, u);
            let replayed = solver::replay(q, rep.exponent, &rep.trace).unwrap();
            assert_eq!(replayed, u);
        }
    }
}

#[test]
fn square_route_for_half_exponent() {
    let r = RatioTarget::new(2, 3).unwrap();
    let rep = fracpow::witness_frac(2, 1, 2, r).unwrap();
    let v = solver::witness(2, r.inverse()).unwrap().witness;
    assert_eq!(rep.witness, &v * &v);
    assert_eq!(integer_root(&rep.witness, 2).unwrap(), v);
    assert_eq!(solver::replay(2, rep.exponent, &rep.trace).unwrap(), rep.witness);
}

#[test]
fn demo_points_hold_their_bounds() {
    let s2 = RefinableReal::sqrt(2);
    for (q, target) in [(2u32, 0u64), (2, 10), (3, 1), (5, 7)] {
        let p = fracpow::limsup_demo(q, &s2, target, DEFAULT_MAX_PRECISION).unwrap();
        assert!(p.bound_holds());
        assert_eq!(p.s_n, 1);
        assert!(p.s_f > target);
    }
    let p = fracpow::limsup_demo(3, &s2, 1, DEFAULT_MAX_PRECISION).unwrap();
    assert_eq!((p.k, p.f_value.clone()), (2, Natural::from(22u32)));
    let p = fracpow::limsup_demo(2, &s2, 10, DEFAULT_MAX_PRECISION).unwrap();
    assert_eq!(p.k, 2378);

    let inv = RefinableReal::inv_sqrt(2);
    let p = fracpow::liminf_demo(2, &inv, 10, DEFAULT_MAX_PRECISION).unwrap();
    assert_eq!(p.k, 55);
    assert!(p.s_n >= 11 && p.s_f == 1);
    let golden: RefinableReal = "surd:-1/2,1/2,5".parse().unwrap();
    let p = fracpow::liminf_demo(3, &golden, 6, DEFAULT_MAX_PRECISION).unwrap();
    assert!(p.bound_holds());
    assert!(fracpow::liminf_demo(2, &s2, 3, DEFAULT_MAX_PRECISION).is_err());
    assert!(fracpow::limsup_demo(2, &"rat:3/2".parse().unwrap(), 3, DEFAULT_MAX_PRECISION).is_err());
}

#[test]
fn trivial_anchor() {
    for q in [2u32, 3, 7, 10] {
        let rep = verify_witness(&Natural::from(q), q, Exponent::Square).unwrap();
        assert_eq!(rep.ratio, RatioTarget::new(1, 1).unwrap());
        assert!(Natural::one() <= rep.witness);
    }
}
