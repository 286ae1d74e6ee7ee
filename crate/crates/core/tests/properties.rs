use fracmap::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn trig(coefs: &[f64], x: f64) -> f64 {
    coefs
        .iter()
        .enumerate()
        .map(|(k, c)| c * ((k + 1) as f64 * std::f64::consts::PI * x).sin())
        .sum()
}

fn sampled(coefs: &[f64], n: usize) -> SampledFunction {
    sample(|x| trig(coefs, x) + 0.3 * x, UniformGrid::new(0.0, 1.0, n).unwrap()).unwrap()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = b.iter().skip(1).fold(1.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).skip(1).all(|(x, y)| (x - y).abs() <= tol * scale)
}

fn coefs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 1..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operators_are_linear(c1 in coefs(), c2 in coefs(), a in -3.0..3.0f64, b in -3.0..3.0f64, alpha in 0.05..0.95f64) {
        let n = 64;
        let f = sampled(&c1, n);
        let g = sampled(&c2, n);
        let h = SampledFunction::linear_combination(a, &f, b, &g).unwrap();
        for kind in OperatorKind::ALL {
            let params = FracParams::with_alpha(alpha).unwrap();
            let tail = TailPolicy::AnalyticConstantTail;
            let with = |s: &SampledFunction| match kind {
                OperatorKind::MarchaudPlus => s.clone().with_outside(OutsideBehavior::Zero),
                _ => s.clone(),
            };
            let lhs = apply(kind, &with(&h), &params, tail).unwrap();
            let of = apply(kind, &with(&f), &params, tail).unwrap();
            let og = apply(kind, &with(&g), &params, tail).unwrap();
            let rhs: Vec<f64> = of.values().iter().zip(og.values()).map(|(x, y)| a * x + b * y).collect();
            prop_assert!(close(lhs.values(), &rhs, 1e-10), "{kind:?}");
        }
    }

    #[test]
    fn extend_then_restrict_is_identity(c in coefs(), k in 1usize..40, kind_ix in 0usize..3) {
        let n = 32;
        let f = sampled(&c, n);
        let kind = [OutsideBehavior::Zero, OutsideBehavior::HoldLeftValue, OutsideBehavior::MirrorEven][kind_ix];
        let k = if kind == OutsideBehavior::MirrorEven { k.min(n) } else { k };
        let h = f.grid().h();
        let window = UniformGrid::new(-(k as f64) * h, 1.0, n + k).unwrap();
        let e = extend(&f, kind, window).unwrap();
        let back = restrict(&e, *f.grid()).unwrap();
        prop_assert_eq!(back.values(), f.values());
    }

    #[test]
    fn mirror_extension_is_even(c in coefs()) {
        let n = 40;
        let f = sampled(&c, n);
        let e = extend(&f, OutsideBehavior::MirrorEven, UniformGrid::new(-1.0, 1.0, 2 * n).unwrap()).unwrap();
        let v = e.values();
        for i in 0..=2 * n {
            prop_assert_eq!(v[i], v[2 * n - i]);
        }
    }

    #[test]
    fn norms_are_homogeneous_and_subadditive(
        c1 in coefs(), c2 in coefs(), lam in -4.0..4.0f64,
        p_ix in 0usize..3, order in 0.1..0.9f64, unit in any::<bool>(),
    ) {
        let n = 48;
        let f = sampled(&c1, n);
        let g = sampled(&c2, n);
        let p = [Exponent::Finite(1.0), Exponent::Finite(2.5), Exponent::Infinity][p_ix];
        let w = if unit { WeightFunction::Unit } else { WeightFunction::inverse_power(0.3).unwrap() };
        let norm = |s: &SampledFunction| sobolev_norm_with_order(s, p, order, w).unwrap().total;
        let scaled = norm(&f.scaled(lam));
        prop_assert!((scaled - lam.abs() * norm(&f)).abs() <= 1e-11 * (1.0 + scaled));
        let sum = SampledFunction::linear_combination(1.0, &f, 1.0, &g).unwrap();
        prop_assert!(norm(&sum) <= (norm(&f) + norm(&g)) * (1.0 + 1e-12));
    }

    #[test]
    fn holder_seminorm_grows_under_refinement(c in coefs(), beta in 0.1..1.0f64) {
        let coarse = holder_seminorm(&sampled(&c, 32), beta).unwrap();
        let fine = holder_seminorm(&sampled(&c, 64), beta).unwrap();
        prop_assert!(fine >= coarse * (1.0 - 1e-12));
    }

    #[test]
    fn gagliardo_scales_under_dilation(c in coefs(), lam in 0.25..4.0f64, p in 1.0..3.0f64, beta in 0.1..0.9f64) {
        let n = 48;
        let f = sampled(&c, n);
        let g = sample(|x| trig(&c, lam * x) + 0.3 * lam * x, UniformGrid::new(0.0, 1.0 / lam, n).unwrap()).unwrap();
        let a = gagliardo_seminorm(&f, p, beta).unwrap();
        let b = gagliardo_seminorm(&g, p, beta).unwrap();
        let expected = lam.powf(beta - 1.0 / p) * a;
        prop_assert!((b - expected).abs() <= 0.03 * expected);
    }

    #[test]
    fn mellin_is_linear_and_dilates(lam in 0.5..3.0f64, t in -4.0..4.0f64, re in 0.3..2.0f64, a in -2.0..2.0f64) {
        let z = Complex64::new(re, t);
        let cut = (1e-30, 200.0);
        let m = |f: &dyn Fn(f64) -> f64| mellin_transform(f, z, cut).unwrap().value;
        let f = |x: f64| (-x).exp();
        let g = |x: f64| x * (-2.0 * x).exp();
        let both = m(&|x| a * f(x) + g(x));
        let sep = m(&f) * a + m(&g);
        prop_assert!((both - sep).norm() <= 1e-8 * (1.0 + sep.norm()));
        let dilated = m(&|x| f(lam * x));
        let expected = m(&f) * Complex64::new(lam, 0.0).powc(-z);
        prop_assert!((dilated - expected).norm() <= 1e-8 * (1.0 + expected.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn convolution_theorem_for_exponential(t in -3.0..3.0f64, alpha in 0.2..0.8f64) {
        // u = α x^α ∫ e^{-y} (x + y)^{-1-α} dy has 𝓜u = α Γ(z) B(1 - z, α + z).
        let re = 0.5;
        let z = Complex64::new(re, t);
        let u = |x: f64| synthesize_u_from_v(|y| (-y).exp(), alpha, &[x]).unwrap()[0];
        let got = mellin_transform(u, z, (1e-40, 1e40)).unwrap().value;
        let expected = gamma_complex(z).unwrap() * kernel_mellin_closed_form(z, alpha).unwrap() * alpha;
        prop_assert!((got - expected).norm() <= 1e-5 * expected.norm());
    }
}

#[test]
fn reconstruction_inverts_synthesis() {
    let alpha = 0.5;
    let v = |y: f64| (-y).exp();
    let xs = [0.5, 1.0, 2.0, 3.0];
    let u = |x: f64| Ok(synthesize_u_from_v(v, alpha, &[x])?[0]);
    let rec = reconstruct_left_extension_adaptive(u, alpha, 0.05, &xs).unwrap();
    for (x, got) in xs.iter().zip(&rec.values) {
        assert!((got - v(*x)).abs() <= 1e-2 * v(*x), "x = {x}: {got}");
    }
}

#[test]
fn reports_are_deterministic() {
    let params = FracParams::with_alpha(0.4).unwrap();
    let fam = TestFunctionFamily::trig(11, 6, 1).unwrap();
    let a = identity_suite(&params, &fam, &[32, 64]).unwrap();
    let b = identity_suite(&params, &fam, &[32, 64]).unwrap();
    let mut ra = VerificationReport::new();
    ra.extend(a);
    let mut rb = VerificationReport::new();
    rb.extend(b);
    assert_eq!(ra.to_csv_string().unwrap(), rb.to_csv_string().unwrap());
}

#[test]
fn identity_discrepancies_do_not_grow_for_smooth_families() {
    let params = FracParams::with_alpha(0.35).unwrap();
    for seed in [1, 2, 3] {
        let fam = TestFunctionFamily::trig(seed, 5, 1).unwrap();
        let rows = identity_suite(&params, &fam, &[32, 64, 128]).unwrap();
        for name in ["killing_rl", "sticky_caputo", "even_mirror"] {
            let seq: Vec<f64> = rows
                .iter()
                .filter(|r| r.probe.starts_with(&format!("identity_{name}[")))
                .map(|r| r.discrepancy)
                .collect();
            assert_eq!(seq.len(), 3);
            assert!(seq.windows(2).all(|w| w[1] <= 1.05 * w[0]), "{name}: {seq:?}");
        }
    }
}

#[test]
fn mapping_routes_agree_with_the_direct_derivative() {
    let params = FracParams::new(0.25, 0.6, Exponent::Finite(2.0), 1.0).unwrap();
    let fams: Vec<_> = (0..3).map(|s| TestFunctionFamily::trig(s, 4, 1).unwrap()).collect();
    let rows = sobolev_mapping_probe(&params, WeightFunction::Unit, &fams, &[64, 128]).unwrap();
    let agree: Vec<_> = rows
        .iter()
        .filter(|r| r.probe.starts_with("mapping_killing_vs_rl"))
        .collect();
    assert_eq!(agree.len(), 3);
    assert!(agree.iter().all(|r| r.pass && r.discrepancy <= 1e-10));
}

#[test]
fn zero_function_maps_to_zero_ratio() {
    let params = FracParams::new(0.25, 0.6, Exponent::Finite(2.0), 1.0).unwrap();
    let zero = TestFunctionFamily::trig(0, 0, 1).unwrap();
    let rows = sobolev_mapping_probe(&params, WeightFunction::Unit, &[zero], &[32, 64]).unwrap();
    assert!(rows
        .iter()
        .filter(|r| r.probe.starts_with("mapping_killing["))
        .all(|r| r.ratio == Some(0.0)));
}

#[test]
fn weighted_ratio_stays_near_the_unweighted_one() {
    let params = FracParams::new(0.25, 0.6, Exponent::Finite(2.0), 1.0).unwrap();
    let fam = [TestFunctionFamily::trig(7, 8, 1).unwrap()];
    let finest = |w| {
        sobolev_mapping_probe(&params, w, &fam, &[256, 512])
            .unwrap()
            .into_iter()
            .find(|r| r.probe.starts_with("mapping_killing[") && r.n == Some(512))
            .and_then(|r| r.ratio)
            .unwrap()
    };
    let plain = finest(WeightFunction::Unit);
    let weighted = finest(WeightFunction::inverse_power(0.2).unwrap());
    assert!(weighted.is_finite() && weighted / plain < 2.0 && plain / weighted < 2.0);
}

#[test]
fn monomial_oracle_examples() {
    let f = sample(|x| x, UniformGrid::new(0.0, 1.0, 1024).unwrap()).unwrap();
    let i = rl_integral(&f, 0.5).unwrap();
    assert!((i.values()[1024] - 0.7523).abs() < 1e-4);
    let alpha = 0.3;
    let f = sample(|x: f64| x.powf(alpha), UniformGrid::new(0.0, 1.0, 1024).unwrap()).unwrap();
    let d = rl_derivative(&f, alpha).unwrap();
    let c = gamma(alpha + 1.0).unwrap();
    assert!(d.values()[102..].iter().all(|v| (v - c).abs() < 1e-3 * c));
}
