use num_rational::Rational64;
use proptest::prelude::*;
use rtheta::core_numerics::Cx;
use rtheta::periodic::{twist_multiplier_period, Parity, PeriodicFunction};

const P: u32 = 192;
const TOL: f64 = 1e-45;

fn function() -> impl Strategy<Value = PeriodicFunction> {
    (1usize..=24)
        .prop_flat_map(|m| prop::collection::vec((-1000.0f64..1000.0, -1000.0f64..1000.0), m))
        .prop_map(|v| PeriodicFunction::from_f64(P, &v).unwrap())
}

fn pair() -> impl Strategy<Value = (PeriodicFunction, PeriodicFunction)> {
    (1usize..=24).prop_flat_map(|m| {
        let vals = || prop::collection::vec((-50i64..50, -50i64..50), m);
        (vals(), vals()).prop_map(|(a, b)| {
            let mk = |v: Vec<(i64, i64)>| {
                PeriodicFunction::from_fn(v.len(), |n| {
                    let (re, im) = v[n as usize];
                    Cx::from_int(P, re) + Cx::from_int(P, im).mul_i()
                })
                .unwrap()
            };
            (mk(a), mk(b))
        })
    })
}

fn beta() -> impl Strategy<Value = Rational64> {
    (-40i64..40, 1i64..13).prop_map(|(u, v)| Rational64::new(u, v))
}

fn scale(f: &PeriodicFunction) -> f64 {
    f.norm_inf().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dft_is_unitary((f, g) in pair()) {
        let lhs = f.dft().inner(&g.dft());
        let rhs = f.inner(&g);
        prop_assert!((&lhs - &rhs).abs_f64() < TOL * scale(&f) * scale(&g) * f.period() as f64);
    }

    #[test]
    fn dft_squared_is_reflection_and_fourth_power_is_identity(f in function()) {
        let two = f.dft().dft();
        prop_assert!(two.max_diff(&f.reflect()) < TOL * scale(&f));
        prop_assert!(two.dft().dft().max_diff(&f) < TOL * scale(&f));
    }

    #[test]
    fn dft_keeps_parity(f in function()) {
        let (ev, od) = f.parity_split();
        prop_assert!(ev.add(&od).max_diff(&f) < TOL * scale(&f));
        prop_assert!(matches!(ev.dft().parity(1e-40), Parity::Even | Parity::Zero));
        prop_assert!(matches!(od.dft().parity(1e-40), Parity::Odd | Parity::Zero));
    }

    #[test]
    fn twist_depends_on_beta_mod_two(f in function(), b in beta()) {
        let (a, pa) = f.twist_beta(b);
        let (c, pc) = f.twist_beta(b + Rational64::from_integer(2));
        prop_assert_eq!(pa, pc);
        prop_assert!(a.max_diff(&c) < TOL * scale(&f));
    }

    #[test]
    fn twists_compose(f in function(), b1 in beta(), b2 in beta()) {
        let (once, _) = f.twist_beta(b1);
        let (twice, p2) = once.twist_beta(b2);
        let (direct, pd) = f.twist_beta(b1 + b2);
        let common = p2.max(pd);
        prop_assert_eq!(common % pd, 0);
        prop_assert!(twice.resample(common).unwrap().max_diff(&direct.resample(common).unwrap()) < TOL * scale(&f));
    }

    #[test]
    fn twist_period_is_minimal(b in beta()) {
        let q = twist_multiplier_period(b);
        let ones = PeriodicFunction::from_i64(P, &[1]).unwrap();
        let (t, period) = ones.twist_beta(b);
        prop_assert_eq!(period, q);
        for d in 1..q {
            if q % d == 0 {
                let shifted = PeriodicFunction::from_fn(q, |n| t.at(n + d as i64).clone()).unwrap();
                prop_assert!(shifted.max_diff(&t) > 1e-10, "period {} is not minimal: {} works", q, d);
            }
        }
    }

    #[test]
    fn resampling_keeps_mean_and_values(f in function(), k in 1usize..5) {
        let r = f.resample(f.period() * k).unwrap();
        prop_assert!((&r.mean() - &f.mean()).abs_f64() < TOL * scale(&f));
        for n in -30i64..30 {
            prop_assert!((r.at(n) - f.at(n)).abs_f64() == 0.0);
        }
    }

    #[test]
    fn json_round_trip(f in function()) {
        let back = PeriodicFunction::from_json_str(&f.to_json_string(), P).unwrap();
        prop_assert_eq!(back.max_diff(&f), 0.0);
    }
}
