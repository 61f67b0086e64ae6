use num_integer::Integer;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rtheta::core_numerics::{Cx, PrecisionContext};
use rtheta::modular::{
    boundary_asymptotics, builtin_modularity_residual, congruence_lambda, eval_tail, gauss_mean,
    gauss_reciprocity_residual, h_function, jacobi_symbol, quantum_obstruction, quantum_obstruction_direct, quantum_obstruction_on_ray,
    verify_exact_relation, verify_gamma_relation, CongruenceCase, ModularMatrix, QuantumForm, Sign,
};
use rtheta::periodic::{catalog, PeriodicFunction, VectorForm, CATALOG_NAMES};
use rtheta::resummation::stokes_difference_closed;
use rtheta::theta::{boundary_value, qbar_membership, ThetaSpec};

const P: u32 = 256;

fn ctx() -> PrecisionContext {
    PrecisionContext::new(P, 1e-40).unwrap()
}

fn spec(name: &str, nu: u32) -> ThetaSpec {
    ThetaSpec::new(nu, catalog(name, P).unwrap().1)
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// A matrix with the given bottom row, `gcd(c, d) = 1`.
fn with_bottom_row(c: i64, d: i64) -> ModularMatrix {
    let e = d.extended_gcd(&c);
    // e.x·d + e.y·c = 1, so (x, −y; c, d) has determinant 1.
    ModularMatrix::new(e.x, -e.y, c, d).unwrap()
}

#[test]
fn action_examples() {
    let g = ModularMatrix::new(1, 0, 2, 1).unwrap();
    let v = g.act(&Cx::i(P)).unwrap();
    assert!((&v - &Cx::from_ratio(P, 2, 5)).re.to_f64().abs() < 1e-70);
    assert!((v.im.to_f64() - 0.2).abs() < 1e-15);
    assert!((&v - &(&Cx::from_int(P, 2) + &Cx::i(P)).div_i64(5)).abs_f64() < 1e-70);
    let t = ModularMatrix::t(3).act(&Cx::i(P)).unwrap();
    assert!((&t - &(&Cx::from_int(P, 3) + &Cx::i(P))).is_zero());
    assert!(ModularMatrix::new(2, 0, 0, 1).is_err());
}

#[test]
fn jacobi_symbol_examples_and_multiplicativity() {
    assert_eq!(jacobi_symbol(2, 15).unwrap(), 1);
    assert_eq!(jacobi_symbol(3, 7).unwrap(), -1);
    assert_eq!(jacobi_symbol(6, 9).unwrap(), 0);
    assert!(jacobi_symbol(1, 0).is_err() && jacobi_symbol(1, -3).is_err());
    for n in (1..=99).step_by(2) {
        for a in -20..20 {
            for b in -20..20 {
                let lhs = jacobi_symbol(a * b, n).unwrap();
                assert_eq!(lhs, jacobi_symbol(a, n).unwrap() * jacobi_symbol(b, n).unwrap());
            }
        }
        for m in (1..=99).step_by(2) {
            for a in [-7, -1, 2, 5, 12] {
                let lhs = jacobi_symbol(a, m * n).unwrap();
                assert_eq!(lhs, jacobi_symbol(a, m).unwrap() * jacobi_symbol(a, n).unwrap());
            }
        }
    }
}

#[test]
fn h_for_inversion_is_the_dft() {
    for name in ["dedekind_eta_char", "rr_f51", "poincare_fplus"] {
        let s = spec(name, 0);
        let h = h_function(&ModularMatrix::s(), &s).unwrap();
        assert!(h.max_diff(&s.f.dft()) < 1e-60, "{name}");
    }
    let odd_period = ThetaSpec::new(0, PeriodicFunction::from_i64(P, &[0, 1, -1]).unwrap());
    assert!(h_function(&ModularMatrix::s(), &odd_period).is_err());
    assert!(h_function(&ModularMatrix::s(), &spec("dedekind_eta_char", 2)).is_err());
}

#[test]
fn h_keeps_parity_for_random_gamma() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let even = spec("dedekind_eta_char", 0);
    let odd = spec("poincare_fplus", 1);
    let mut count = 0;
    while count < 50 {
        let c = rng.gen_range(1..8);
        let d = rng.gen_range(-15..15);
        if c.gcd(&d) != 1 {
            continue;
        }
        let g = with_bottom_row(c, d);
        assert!(h_function(&g, &even).unwrap().is_even(), "{g:?}");
        if count % 5 == 0 {
            assert!(h_function(&g, &odd).unwrap().is_odd(), "{g:?}");
        }
        count += 1;
    }
}

#[test]
fn congruence_lambda_examples() {
    let chi = spec("dedekind_eta_char", 1);
    let g = ModularMatrix::new(1, 0, 24, 1).unwrap();
    let (l, case) = congruence_lambda(&g, &chi).unwrap().unwrap();
    assert_eq!(case, CongruenceCase::Principal);
    assert!((&l - &Cx::root_of_unity(P, 1, 4)).abs_f64() < 1e-60);

    let (l, case) = congruence_lambda(&ModularMatrix::t(24), &chi).unwrap().unwrap();
    assert_eq!(case, CongruenceCase::Principal);
    assert!((&l - &Cx::one(P)).abs_f64() < 1e-60);

    // d ≡ 3 (mod 4) in Γ₀⁰(24): ad = 1 + bc with b, c ≡ 0 (mod 24).
    let g = ModularMatrix::new(-25, -24, 24, 23).unwrap();
    let (l, _) = congruence_lambda(&g, &chi).unwrap().unwrap();
    let h = h_function(&g, &chi).unwrap();
    assert!(h.max_diff(&chi.f.scale(&l)) < 1e-50);
    let g = ModularMatrix::new(5, -24, 24, -115).unwrap();
    let (l, case) = congruence_lambda(&g, &chi).unwrap().unwrap();
    assert_eq!(case, CongruenceCase::Gamma00);
    assert!(h_function(&g, &chi).unwrap().max_diff(&chi.f.scale(&l)) < 1e-50);

    // χ₁₂ is supported on n² ≡ 1 (mod 24): T^b acts by e^{iπb/12}.
    let (l, case) = congruence_lambda(&ModularMatrix::t(5), &chi).unwrap().unwrap();
    assert_eq!(case, CongruenceCase::Gamma1);
    assert!((&l - &Cx::root_of_unity(P, 5, 12)).abs_f64() < 1e-60);

    assert!(congruence_lambda(&ModularMatrix::s(), &chi).unwrap().is_none());
}

#[test]
fn exact_relations_hold_for_the_catalog() {
    let c = ctx();
    for name in CATALOG_NAMES {
        for nu in 0..2 {
            let s = spec(name, nu);
            for tau in [Cx::i(P), Cx::from_f64(P, 0.3, 0.7)] {
                let res = verify_exact_relation(&s, &tau, &c).unwrap();
                assert!(res.passed() && res.residual < 1e-30, "{name} ν={nu}: {res:?}");
            }
        }
    }
    let mixed = ThetaSpec::new(0, PeriodicFunction::from_i64(P, &[2, 5, -1, 7, 3, 0]).unwrap());
    assert!(verify_exact_relation(&mixed, &Cx::from_f64(P, 0.2, 0.9), &c).unwrap().passed());
    assert!(verify_exact_relation(&spec("rr_f51", 2), &Cx::i(P), &c).is_err());
}

#[test]
fn gamma_relation_chi12_at_i() {
    let c = ctx();
    let g = ModularMatrix::new(1, 0, 24, 1).unwrap();
    let res = verify_gamma_relation(&g, &spec("dedekind_eta_char", 1), &Cx::i(P), &c).unwrap();
    assert!(res.residual < 1e-20, "{res:?}");
}

#[test]
fn gamma_relations_all_parities() {
    let c = ctx();
    let tau = Cx::from_f64(P, 0.1, 0.8);
    let cases = [("dedekind_eta_char", 0), ("dedekind_eta_char", 1), ("poincare_fplus", 0), ("poincare_fplus", 1)];
    for g in [ModularMatrix::new(1, 0, 2, 1).unwrap(), with_bottom_row(3, -2), ModularMatrix::s()] {
        for (name, nu) in cases {
            let res = verify_gamma_relation(&g, &spec(name, nu), &tau, &c).unwrap();
            assert!(res.passed() && res.residual < 1e-20, "{g:?} {name} ν={nu}: {res:?}");
        }
    }
    let mixed = ThetaSpec::new(0, PeriodicFunction::from_i64(P, &[2, 5, -1, 7]).unwrap());
    assert!(verify_gamma_relation(&ModularMatrix::s(), &mixed, &tau, &c).is_err());
}

fn forms() -> Vec<(&'static str, QuantumForm)> {
    vec![
        ("χ₁₂", QuantumForm::from_spec(&spec("dedekind_eta_char", 1)).unwrap()),
        ("F*", QuantumForm::from_vector(0, VectorForm::catalog("poincare", P).unwrap()).unwrap()),
        ("(f, f̂)", QuantumForm::from_spec(&spec("poincare_fminus", 0)).unwrap()),
        ("rr", QuantumForm::from_vector(1, VectorForm::catalog("rogers_ramanujan", P).unwrap()).unwrap()),
    ]
}

#[test]
fn obstruction_borel_matches_definition() {
    let c = ctx();
    for (name, q) in forms() {
        for tau in [Cx::i(P), Cx::from_f64(P, 0.4, 0.3), Cx::from_f64(P, -0.5, 0.2)] {
            for sign in [Sign::Plus, Sign::Minus] {
                let direct = quantum_obstruction_direct(&q, sign, &tau, &c).unwrap();
                let borel = quantum_obstruction(&q, sign, &tau, &c).unwrap();
                for (a, b) in direct.iter().zip(&borel) {
                    assert!((a - &b.value).abs_f64() < 1e-25, "{name} {sign:?} τ={tau}: {a} vs {}", b.value);
                }
            }
        }
    }
    assert!(QuantumForm::from_spec(&spec("dedekind_eta_char", 0)).is_err());
}

#[test]
fn obstruction_difference_is_the_stokes_jump() {
    let c = ctx();
    for (name, nu) in [("dedekind_eta_char", 1), ("poincare_fplus", 0)] {
        let s = spec(name, nu);
        let q = QuantumForm::from_spec(&s).unwrap();
        let tau = Cx::from_f64(P, 0.2, 0.6);
        let plus = quantum_obstruction(&q, Sign::Plus, &tau, &c).unwrap();
        let minus = quantum_obstruction(&q, Sign::Minus, &tau, &c).unwrap();
        let d = stokes_difference_closed(&s, &tau, &c).unwrap();
        let diff = &plus[0].value - &minus[0].value;
        assert!((&diff - &d.value).abs_f64() < 1e-25, "{name}: {diff} vs {}", d.value);
    }
}

#[test]
fn builtin_modularity() {
    let c = ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let forms = forms();
    for n in 0..10 {
        let arg = rng.gen_range(0.3..std::f64::consts::PI - 0.3);
        let rad = rng.gen_range(0.4f64.ln()..2.5f64.ln()).exp();
        let tau = Cx::from_f64(P, rad * arg.cos(), rad * arg.sin());
        let (name, q) = &forms[n % forms.len()];
        for sign in [Sign::Plus, Sign::Minus] {
            let res = builtin_modularity_residual(q, sign, &tau, &c).unwrap();
            assert!(res.passed() && res.residual < 1e-25, "{name} {sign:?} τ={tau}: {res:?}");
        }
    }
    let with_mean = QuantumForm::from_spec(&spec("jacobi_theta3", 1)).unwrap();
    assert!(builtin_modularity_residual(&with_mean, Sign::Plus, &Cx::i(P), &c).is_err());
}

#[test]
fn obstruction_is_continuous_across_the_positive_axis() {
    let c = ctx();
    let q = QuantumForm::from_vector(0, VectorForm::catalog("poincare", P).unwrap()).unwrap();
    let from_h = std::f64::consts::FRAC_PI_2 - std::f64::consts::PI / 12.0;
    for arg in [-0.1, 0.0, 0.1] {
        let tau = Cx::from_f64(P, 0.2 * f64::cos(arg), 0.2 * f64::sin(arg));
        let cont = quantum_obstruction(&q, Sign::Plus, &tau, &c).unwrap();
        let upper = quantum_obstruction_on_ray(&q, from_h, &tau, &c).unwrap();
        for (a, b) in cont.iter().zip(&upper) {
            assert!((&a.value - &b.value).abs_f64() < 1e-25, "arg={arg}");
        }
    }
    let at = |arg: f64| {
        let tau = Cx::from_f64(P, 1.3 * arg.cos(), 1.3 * arg.sin());
        quantum_obstruction(&q, Sign::Plus, &tau, &c).unwrap()[0].value.clone()
    };
    let centre = at(0.0);
    let mut prev = f64::INFINITY;
    for delta in [1e-2, 1e-4, 1e-6] {
        let jump = (&at(delta) - &at(-delta)).abs_f64();
        let off = (&at(delta) - &centre).abs_f64();
        assert!(jump < prev && jump < 50.0 * delta && off < 50.0 * delta, "δ={delta}: {jump:e}");
        prev = jump;
    }
    assert!(quantum_obstruction(&q, Sign::Plus, &Cx::from_f64(P, 0.0, -1.0), &c).is_err());
    assert!(quantum_obstruction(&q, Sign::Minus, &Cx::from_f64(P, 1.0, 0.0), &c).is_err());
}

#[test]
fn zero_function_cases() {
    let c = ctx();
    let zero = ThetaSpec::new(1, PeriodicFunction::zero(P, 6));
    let tau = Cx::from_f64(P, 0.2, 0.9);
    assert!(h_function(&ModularMatrix::new(1, 0, 2, 1).unwrap(), &zero).unwrap().norm_inf() == 0.0);
    assert!(verify_exact_relation(&zero, &tau, &c).unwrap().residual == 0.0);
    assert!(verify_gamma_relation(&ModularMatrix::s(), &zero, &tau, &c).unwrap().residual == 0.0);
    assert!(gauss_reciprocity_residual(&zero.f, r(1, 3)).unwrap() == 0.0);
    let q = QuantumForm::from_spec(&zero).unwrap();
    let b = boundary_asymptotics(&q, 3, Sign::Minus, 4, &c).unwrap();
    assert!(b.exact.iter().chain(&b.predicted).all(Cx::is_zero));
}

#[test]
fn integer_boundary_values_depend_on_k_mod_2m() {
    for (name, nu) in [("dedekind_eta_char", 1), ("poincare_fplus", 0)] {
        let s = spec(name, nu);
        let m2 = 2 * s.period() as i64;
        for k in [1, 5, 7] {
            let a = boundary_value(&s, r(k, 1)).unwrap().unwrap();
            let b = boundary_value(&s, r(k + m2, 1)).unwrap().unwrap();
            assert!((&a - &b).abs_f64() < 1e-60, "{name} k={k}");
        }
    }
}

#[test]
fn gauss_reciprocity() {
    let ones = PeriodicFunction::from_i64(P, &[1]).unwrap();
    assert!(gauss_reciprocity_residual(&ones, r(1, 1)).unwrap() < 1e-70);
    // m(1_{1/1}) = e^{iπ·0}/2 + e^{iπ}/2 = 0.
    assert!(gauss_mean(&ones, r(1, 1)).abs_f64() < 1e-70);
    let chi = catalog("dedekind_eta_char", P).unwrap().1;
    for alpha in [r(1, 1), r(-1, 2), r(3, 5), r(7, 3), r(-11, 4)] {
        assert!(gauss_reciprocity_residual(&chi, alpha).unwrap() < 1e-25, "α={alpha}");
    }
    let f = PeriodicFunction::from_i64(P, &[2, 5, -1, 7, 3, 0]).unwrap();
    for alpha in [r(1, 1), r(2, 3), r(-5, 7)] {
        assert!(gauss_reciprocity_residual(&f, alpha).unwrap() < 1e-25, "α={alpha}");
    }
    assert!(gauss_reciprocity_residual(&chi, r(0, 1)).is_err());
}

#[test]
fn boundary_asymptotics_chi12() {
    let c = ctx();
    let q = QuantumForm::from_spec(&spec("dedekind_eta_char", 1)).unwrap();
    for sign in [Sign::Minus, Sign::Plus] {
        let b = boundary_asymptotics(&q, 5, sign, 8, &c).unwrap();
        let diff = (&b.exact[0] - &b.predicted[0]).abs_f64();
        assert!(diff < 1e-15, "{sign:?}: {} vs {}", b.exact[0], b.predicted[0]);
    }
}

#[test]
fn boundary_asymptotics_vector_forms() {
    let c = ctx();
    for (name, q) in forms() {
        for k in [1, 3, 7] {
            for sign in [Sign::Plus, Sign::Minus] {
                let b = boundary_asymptotics(&q, k, sign, 6, &c).unwrap();
                for (e, p) in b.exact.iter().zip(&b.predicted) {
                    assert!((e - p).abs_f64() < 1e-20, "{name} k={k} {sign:?}: {e} vs {p}");
                }
            }
        }
    }
}

#[test]
fn tail_approximates_the_obstruction() {
    // G±(±1/k) − Θ̃(±1/k), truncated at order k/8, shrinks as k grows; the
    // opposite sign convention for the odd powers does not.
    let c = ctx();
    let q = QuantumForm::from_spec(&spec("dedekind_eta_char", 1)).unwrap();
    for sign in [Sign::Plus, Sign::Minus] {
        let mut prev = f64::INFINITY;
        for k in [20, 40, 80] {
            let b = boundary_asymptotics(&q, k, sign, k as usize / 8, &c).unwrap();
            let err = (&b.obstruction[0] - &eval_tail(&b.tail[0], k)).abs_f64();
            let flipped = eval_tail(&b.tail[0], -k);
            let wrong = (&b.obstruction[0] - &flipped).abs_f64();
            assert!(err < prev && wrong > 5.0 * err, "{sign:?} k={k}: {err:e} vs {wrong:e}");
            prev = err;
        }
        assert!(prev < 1e-4, "{sign:?}: {prev:e}");
    }
}

#[test]
fn qbar_is_stable_under_inversion() {
    for name in CATALOG_NAMES {
        let f = catalog(name, P).unwrap().1;
        let s = ThetaSpec::new(0, f.clone());
        let hat = ThetaSpec::new(0, f.dft());
        for n in -12..=12i64 {
            for d in 1..=9 {
                if n == 0 || n.gcd(&d) != 1 {
                    continue;
                }
                let a = r(n, d);
                assert_eq!(qbar_membership(&s, a).unwrap(), qbar_membership(&hat, -a.recip()).unwrap(), "{name} α={a}");
            }
        }
    }
}

#[test]
fn chi12_qbar_is_everything() {
    let s = spec("dedekind_eta_char", 0);
    for n in -30..=30 {
        for d in 1..=15 {
            assert!(qbar_membership(&s, r(n, d)).unwrap(), "α={n}/{d}");
        }
    }
}
