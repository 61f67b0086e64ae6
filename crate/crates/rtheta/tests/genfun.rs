use num_rational::Rational64;
use rtheta::core_numerics::Cx;
use rtheta::genfun::{
    lvalue, lvalue_bernoulli, BorelIntegrand, GenFun, SingularityMode,
};
use rtheta::periodic::{catalog, PeriodicFunction, CATALOG_NAMES};

const P: u32 = 256;

fn diff(a: &Cx, b: &Cx) -> f64 {
    (a - b).abs_f64()
}

#[test]
fn laurent_lvalues_match_bernoulli_oracle() {
    for name in CATALOG_NAMES {
        let f = catalog(name, P).unwrap().1;
        for k in 0..=20 {
            let a = lvalue(&f, k);
            let b = lvalue_bernoulli(&f, k);
            let scale = b.abs_f64().max(1.0);
            assert!(diff(&a, &b) / scale < 1e-25, "{name} k={k}: {a} vs {b}");
        }
    }
}

#[test]
fn lvalue_parity_rules() {
    let chi = catalog("dedekind_eta_char", P).unwrap().1;
    assert!(lvalue(&chi, 0).abs_f64() < 1e-60);
    let f = PeriodicFunction::from_i64(P, &[3, 1, 4, 4, 1]).unwrap();
    assert!((lvalue(&f, 0).to_f64().0 + 1.5).abs() < 1e-60);
    let odd = catalog("poincare_fplus", P).unwrap().1;
    for k in [1, 3, 5] {
        assert!(lvalue(&odd, k).abs_f64() < 1e-40, "k={k}");
    }
}

#[test]
fn generating_function_matches_direct_sum() {
    for name in CATALOG_NAMES {
        let f = catalog(name, P).unwrap().1;
        for nu in 0..3 {
            let g = GenFun::build(nu, &f);
            for t in [Cx::from_f64(P, 1.0, 0.0), Cx::from_f64(P, 2.0, 0.3)] {
                let mut direct = Cx::zero(P);
                for n in 1..400i64 {
                    let w = (&t.scale_i64(-n)).exp().scale_i64(n.pow(nu));
                    direct += &(&w * f.at(n));
                }
                assert!(diff(&g.eval(&t).unwrap(), &direct) < 1e-60, "{name} ν={nu}");
            }
        }
    }
}

#[test]
fn negative_real_part_uses_reflected_form() {
    // F(−t) for f ≡ 1, ν = 0 is e^{t}/(1 − e^{t}) = −1 − F(t).
    let g = GenFun::build(0, &PeriodicFunction::from_i64(P, &[1]).unwrap());
    let t = Cx::from_f64(P, 0.8, 0.4);
    let lhs = g.eval(&-&t).unwrap();
    let rhs = -(&g.eval(&t).unwrap() + &Cx::one(P));
    assert!(diff(&lhs, &rhs) < 1e-70);
}

#[test]
fn pole_coefficient_and_vanishing_intermediate_terms() {
    for name in CATALOG_NAMES {
        let f = catalog(name, P).unwrap().1;
        for nu in 0..4u32 {
            let g = GenFun::build(nu, &f);
            let polar = g.polar_part();
            let fact: i64 = (1..=nu as i64).product();
            assert!(diff(&polar[0], &f.mean().scale_i64(fact)) < 1e-60);
            for c in &polar[1..] {
                assert!(c.abs_f64() < 1e-60, "{name} ν={nu}");
            }
        }
    }
}

#[test]
fn borel_taylor_and_direct_branches_agree() {
    for name in ["jacobi_theta3", "dedekind_eta_char", "poincare_fplus"] {
        let f = catalog(name, P).unwrap().1;
        for nu in 0..3 {
            let g = GenFun::build(nu, &f);
            let r = std::f64::consts::PI / (16.0 * f.period() as f64);
            for arg in [0.3, 1.9, -2.5] {
                let inside = Cx::from_f64(P, 0.999 * r * f64::cos(arg), 0.999 * r * f64::sin(arg));
                let outside = Cx::from_f64(P, 1.001 * r * f64::cos(arg), 1.001 * r * f64::sin(arg));
                let (a0, b0) = g.borel_pair(&inside).unwrap();
                let (a1, b1) = g.borel_pair(&outside).unwrap();
                // Continuity across the switch: the difference is O(|Δξ|·φ̂′).
                let scale = a0.abs_f64().max(b0.abs_f64()).max(1.0);
                assert!(diff(&a0, &a1) < 0.1 * scale && diff(&b0, &b1) < 0.1 * scale);
            }
        }
    }
}

#[test]
fn borel_series_value_at_origin() {
    // ν=0, f≡1: c₁ = 1/12, so φ̂⁻(0) = π^{−1/2} C/12.
    let g = GenFun::build(0, &PeriodicFunction::from_i64(P, &[1]).unwrap());
    let tiny = Cx::from_f64(P, 1e-40, 0.0);
    let got = g.borel_minus(&tiny).unwrap();
    let c = g.borel_constant(P);
    let sqrt_pi = rug::Float::with_val(P, rtheta::core_numerics::pi(P).sqrt());
    let expect = c.div_i64(12).scale(&sqrt_pi.recip());
    assert!(diff(&got, &expect) < 1e-35);
    // φ̂⁺(0) = π^{−1/2} c₀ = −π^{−1/2}/2.
    let got = g.borel_plus(&Cx::zero(P)).unwrap();
    assert!((got.to_f64().0 + 0.5 / std::f64::consts::PI.sqrt()).abs() < 1e-15);
}

#[test]
fn borel_evaluation_rejects_singular_points() {
    let f = catalog("dedekind_eta_char", P).unwrap().1;
    let g = GenFun::build(0, &f);
    assert!(g.borel_pair(&g.xi_n(1, P)).is_err());
    assert!(g.borel_pair(&g.xi_n(2, P)).is_err());
}

#[test]
fn numeric_principal_parts_match_closed_forms() {
    for name in CATALOG_NAMES {
        let f = catalog(name, P).unwrap().1;
        for nu in 0..2 {
            let g = GenFun::build(nu, &f);
            for which in [BorelIntegrand::HalfMinus, BorelIntegrand::StrippedPlus] {
                for n in 1..=3 {
                    let a = g.singularity_data(n, which, SingularityMode::ClosedForm).unwrap();
                    let b = g.singularity_data(n, which, SingularityMode::Numeric).unwrap();
                    for (x, y) in a.principal_coeffs.iter().zip(&b.principal_coeffs) {
                        assert!(diff(x, y) < 1e-20, "{name} ν={nu} {which:?} n={n}: {x} vs {y}");
                    }
                }
            }
        }
    }
}

#[test]
fn closed_form_example_for_eta_character() {
    let f = catalog("dedekind_eta_char", P).unwrap().1;
    let g = GenFun::build(0, &f);
    let d = g.singularity_data(1, BorelIntegrand::HalfMinus, SingularityMode::ClosedForm).unwrap();
    let two_pi_i = Cx::new(rug::Float::new(P), rug::Float::with_val(P, rtheta::core_numerics::pi(P) * 2u32));
    assert!(diff(&d.principal_coeffs[0], &(&Cx::root_of_unity(P, 1, 4) / &two_pi_i)) < 1e-70);
    assert!(g.singularity_data(0, BorelIntegrand::HalfMinus, SingularityMode::ClosedForm).is_err());
    assert!(GenFun::build(2, &f)
        .singularity_data(1, BorelIntegrand::HalfMinus, SingularityMode::ClosedForm)
        .is_err());
}

#[test]
fn poles_are_higher_order_only_up_to_nu_plus_one() {
    let f = catalog("rr_f51", P).unwrap().1;
    for nu in 0..3u32 {
        let g = GenFun::build(nu, &f);
        let parts = g.principal_parts_numeric(1, BorelIntegrand::StrippedPlus, nu as usize + 3).unwrap();
        for a in &parts[nu as usize + 1..] {
            assert!(a.abs_f64() < 1e-30);
        }
    }
}

#[test]
fn singularities_sit_at_xi_n() {
    for name in ["dedekind_eta_char", "rr_f52", "poincare_fminus"] {
        let f = catalog(name, P).unwrap().1;
        for nu in 0..2 {
            let g = GenFun::build(nu, &f);
            for which in [BorelIntegrand::HalfMinus, BorelIntegrand::StrippedPlus] {
                for n in 1..=3 {
                    if let Some(p) = g.locate_singularity(n, which).unwrap() {
                        assert!(diff(&p, &g.xi_n(n, P)) < 1e-20, "{name} ν={nu} {which:?} n={n}");
                    }
                }
            }
        }
    }
}

#[test]
fn no_other_singularities_in_disc() {
    let f = catalog("dedekind_eta_char", P).unwrap().1;
    let m = f.period() as f64;
    for nu in 0..2 {
        let g = GenFun::build(nu, &f);
        // Radius 12π/M lies between ξ₃ and ξ₄ and covers |ξ| ≤ 10π/M.
        let res = g.enclosed_singularity_residual(12.0 * std::f64::consts::PI / m, 400).unwrap();
        assert!(res < 1e-20, "ν={nu}: {res}");
    }
}

#[test]
fn alien_closed_forms_match_stokes_data() {
    for name in ["dedekind_eta_char", "poincare_fplus", "rr_f51"] {
        let f = catalog(name, P).unwrap().1;
        for nu in 0..=4u32 {
            let g = GenFun::build(nu, &f);
            for n in 1..=2 {
                let closed = g.alien_derivative(n).unwrap();
                let numeric = g.alien_derivative_numeric(n).unwrap();
                for t in &numeric {
                    let c = closed
                        .iter()
                        .find(|c| c.power == t.power)
                        .map(|c| c.coeff.clone())
                        .unwrap_or_else(|| Cx::zero(P));
                    let scale = c.abs_f64().max(1.0);
                    assert!(diff(&c, &t.coeff) / scale < 1e-18, "{name} ν={nu} n={n} power {}", t.power);
                }
                for c in &closed {
                    assert!(numeric.iter().any(|t| t.power == c.power));
                }
            }
        }
    }
}

#[test]
fn alien_examples() {
    let chi = catalog("dedekind_eta_char", P).unwrap().1;
    assert!(GenFun::build(0, &chi).alien_derivative(1).unwrap().is_empty());
    let odd = catalog("poincare_fplus", P).unwrap().1;
    let g = GenFun::build(2, &odd);
    let terms = g.alien_derivative(1).unwrap();
    let powers: Vec<Rational64> = terms.iter().map(|t| t.power).collect();
    assert_eq!(powers, vec![Rational64::new(-5, 2), Rational64::new(-3, 2)]);
    assert!(GenFun::build(5, &odd).alien_derivative(1).is_err());
}
