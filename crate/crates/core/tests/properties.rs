use std::sync::OnceLock;

use proptest::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use gibbs_core::cardinal::{
    as_kernel, cardinal_from_generator, compute_symbol, CardinalConfig, CardinalFunction,
    Generator,
};
use gibbs_core::gibbs::{
    constant_gibbs, gibbs_value, normalize_jump, reduced_gibbs_bounded, JumpSpec,
};
use gibbs_core::kernel::{
    full_lattice_sum, make_bspline, make_gaussian, make_inverse_multiquadric, make_poisson,
    make_sinc, one_sided_sum_lower, one_sided_sum_upper, Kernel, TruncationPolicy,
};
use gibbs_core::sampling::{
    rescaled_series, sampling_series, SampledSignal, SeriesEvalConfig,
};

fn pol() -> TruncationPolicy {
    TruncationPolicy::default()
}

fn cubic_cardinal() -> &'static CardinalFunction {
    static L: OnceLock<CardinalFunction> = OnceLock::new();
    L.get_or_init(|| {
        cardinal_from_generator(&Generator::bspline(4).unwrap(), &CardinalConfig::default())
            .unwrap()
    })
}

/// Kernels that are partitions of unity.
fn unity_kernels() -> Vec<Kernel> {
    let mut v: Vec<Kernel> = (1..=8).map(|n| make_bspline(n).unwrap()).collect();
    v.push(make_sinc());
    v.push(as_kernel(cubic_cardinal()).unwrap());
    v
}

fn even_kernels() -> Vec<Kernel> {
    let mut v: Vec<Kernel> = (2..=8).map(|n| make_bspline(n).unwrap()).collect();
    v.push(make_sinc());
    v.push(make_poisson());
    v.push(make_inverse_multiquadric(2.0).unwrap());
    v.push(make_gaussian(1.3).unwrap());
    v.push(as_kernel(cubic_cardinal()).unwrap());
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn even_kernels_are_symmetric(t in -20.0f64..20.0) {
        for k in even_kernels() {
            prop_assert!((k.evaluate(t) - k.evaluate(-t)).abs() <= 1e-12, "{}", k.name());
        }
    }

    #[test]
    fn compact_kernels_vanish_outside(order in 1i64..=20, excess in 1e-9f64..50.0) {
        let k = make_bspline(order).unwrap();
        let r = k.support_radius().unwrap();
        prop_assert_eq!(k.evaluate(r + excess), 0.0);
        prop_assert_eq!(k.evaluate(-r - excess), 0.0);
    }

    #[test]
    fn compact_one_sided_sums_are_exact(order in 1i64..=12, t in -10.0f64..10.0) {
        let k = make_bspline(order).unwrap();
        let lo = one_sided_sum_lower(&k, t, &pol()).unwrap();
        let up = one_sided_sum_upper(&k, t, &pol()).unwrap();
        prop_assert_eq!(lo.error_bound, 0.0);
        prop_assert_eq!(up.error_bound, 0.0);
        prop_assert!(lo.value >= -1e-15 && up.value >= -1e-15);
    }

    #[test]
    fn complement_identity(t in -6.0f64..6.0) {
        for k in unity_kernels() {
            let lo = one_sided_sum_lower(&k, t, &pol()).unwrap();
            let up = one_sided_sum_upper(&k, t, &pol()).unwrap();
            let tau = 1e-12;
            prop_assert!(
                (lo.value + up.value - 1.0).abs() <= 2.0 * pol().target_abs_error() + tau,
                "{} at {}", k.name(), t
            );
        }
    }

    #[test]
    fn reflection_identity(t in -6.0f64..6.0) {
        for k in even_kernels() {
            let lo = one_sided_sum_lower(&k, -t - 1.0, &pol()).unwrap();
            let up = one_sided_sum_upper(&k, t, &pol()).unwrap();
            prop_assert!(
                (lo.value - up.value).abs() <= lo.error_bound + up.error_bound + 1e-13,
                "{} at {}", k.name(), t
            );
        }
    }

    #[test]
    fn gibbs_is_linear_in_the_jump(
        a in -5.0f64..5.0, b in -5.0f64..5.0,
        p in -5.0f64..5.0, q in -5.0f64..5.0,
        c in -5.0f64..5.0, t in -4.0f64..4.0,
    ) {
        for k in unity_kernels() {
            let g = |l: f64, r: f64| gibbs_value(&k, l, r, t, &pol()).unwrap().value;
            let f = g(a, b);
            prop_assert!((g(a + c, b + c) - (f + c)).abs() <= 1e-9);
            prop_assert!((g(a + p, b + q) - (f + g(p, q))).abs() <= 1e-9);
            prop_assert!((g(a - p, b - q) - (f - g(p, q))).abs() <= 1e-9);
            prop_assert!((constant_gibbs(&k, c, t, &pol()).unwrap() - c).abs() <= 1e-9);
        }
    }

    #[test]
    fn normalization_reduction(a in -5.0f64..5.0, h in 0.1f64..5.0, t in -4.0f64..4.0) {
        let b = a + 2.0 * h;
        let (d, c) = normalize_jump(a, b).unwrap();
        prop_assert!((d * (a + c) + 1.0).abs() < 1e-12);
        prop_assert!((d * (b + c) - 1.0).abs() < 1e-12);
        let m = (a + b) / 2.0;
        let jump = JumpSpec::new(a, b).unwrap();
        for k in unity_kernels() {
            let g = gibbs_core::gibbs::gibbs_function(&k, &jump, t, &pol()).unwrap();
            let r = reduced_gibbs_bounded(&k, t, &pol()).unwrap();
            prop_assert!((g - (m + h * r.value)).abs() <= 1e-9);
        }
    }

    #[test]
    fn gibbs_equals_twice_lower_minus_one(t in -6.0f64..6.0) {
        for k in unity_kernels() {
            let g = reduced_gibbs_bounded(&k, t, &pol()).unwrap();
            let lo = one_sided_sum_lower(&k, t, &pol()).unwrap();
            prop_assert!(
                (g.value - (2.0 * lo.value - 1.0)).abs()
                    <= g.error_bound + 2.0 * lo.error_bound + 1e-12
            );
        }
    }

    #[test]
    fn even_functional_equation(t in -6.0f64..6.0) {
        for k in even_kernels() {
            let a = reduced_gibbs_bounded(&k, t, &pol()).unwrap();
            let b = reduced_gibbs_bounded(&k, -t, &pol()).unwrap();
            prop_assert!(
                (a.value + b.value - 2.0 * k.evaluate(t)).abs()
                    <= a.error_bound + b.error_bound + 1e-12,
                "{} at {}", k.name(), t
            );
        }
    }

    #[test]
    fn rescale_identity(i in -64i32..=64, e in 0u32..8) {
        let n = 1usize << e;
        let xi = i as f64 / 16.0;
        let f = SampledSignal::ramp_step();
        let k = make_bspline(3).unwrap();
        let cfg = SeriesEvalConfig::new(n as f64, pol()).unwrap();
        prop_assert_eq!(
            sampling_series(&k, &f, &cfg, xi / n as f64).unwrap(),
            rescaled_series(&k, &f, n, xi, &pol()).unwrap()
        );
    }

    #[test]
    fn sign_series_is_independent_of_rate(n in 1usize..500, xi in -4.0f64..4.0) {
        for k in unity_kernels() {
            let v = rescaled_series(&k, &SampledSignal::sign(), n, xi, &pol()).unwrap();
            let g = reduced_gibbs_bounded(&k, xi, &pol()).unwrap();
            prop_assert!((v - g.value).abs() <= 1e-12);
        }
    }

    #[test]
    fn constants_are_reproduced(c in -10.0f64..10.0, w in 0.1f64..50.0, t in -3.0f64..3.0) {
        let f = SampledSignal::constant(c);
        let cfg = SeriesEvalConfig::new(w, pol()).unwrap();
        for k in unity_kernels() {
            let v = sampling_series(&k, &f, &cfg, t).unwrap();
            prop_assert!((v - c).abs() <= 1e-9 * c.abs().max(1.0), "{}", k.name());
        }
    }

    #[test]
    fn cardinal_is_even(t in -100.0f64..100.0) {
        let k = as_kernel(cubic_cardinal()).unwrap();
        prop_assert!((k.evaluate(t) - k.evaluate(-t)).abs() <= 1e-12);
    }
}

#[test]
fn tail_bounds_decrease_to_zero() {
    for k in [
        make_poisson(),
        make_gaussian(0.7).unwrap(),
        make_inverse_multiquadric(4.0).unwrap(),
    ] {
        let b: Vec<f64> = (1..=4096).map(|r| k.lattice_tail_bound(r).unwrap()).collect();
        assert!(b.windows(2).all(|w| w[1] <= w[0]), "{}", k.name());
        assert!(b[4095] < 1e-2 * b[0]);
    }
}

#[test]
fn bspline_integer_samples_sum_to_one() {
    for n in 1..=16 {
        let k = make_bspline(n).unwrap();
        let direct: f64 = (-10..=10).map(|j| k.evaluate(j as f64)).sum();
        let s = full_lattice_sum(&k, 0.0, &pol()).unwrap();
        assert!((direct - 1.0).abs() < 1e-14);
        assert!((s.value - 1.0).abs() < 1e-14);
        assert_eq!(s.error_bound, 0.0);
    }
}

#[test]
fn symbol_coefficient_duality() {
    for g in [
        Generator::bspline(4).unwrap(),
        Generator::bspline(9).unwrap(),
        Generator::inverse_multiquadric(1.0).unwrap(),
        Generator::gaussian(1.0).unwrap(),
    ] {
        let cfg = CardinalConfig::default();
        let l = cardinal_from_generator(&g, &cfg).unwrap();
        let p = l.period();
        let half = p / 2;
        let symbol = compute_symbol(&g, p, &cfg.policy).unwrap();
        let mut buf: Vec<Complex64> = (0..p)
            .map(|m| Complex64::new(l.coefficients()[(m + half) % p], 0.0))
            .collect();
        FftPlanner::new().plan_fft_forward(p).process(&mut buf);
        for (c, s) in buf.iter().zip(&symbol.dft_values) {
            assert!((c * s - 1.0).norm() < 1e-12, "{}", g.name());
        }
        for n in 1..half as i64 {
            assert!((l.coefficient(n) - l.coefficient(-n)).abs() <= 1e-12);
        }
    }
}

#[test]
fn shipped_interpolation_defects() {
    for g in [
        Generator::bspline(2).unwrap(),
        Generator::bspline(4).unwrap(),
        Generator::bspline(10).unwrap(),
        Generator::inverse_multiquadric(1.0).unwrap(),
        Generator::inverse_multiquadric(2.0).unwrap(),
    ] {
        let l = cardinal_from_generator(&g, &CardinalConfig::default()).unwrap();
        assert_eq!(l.period(), 4096, "{}", g.name());
        assert!(l.diagnostics().interpolation_defect <= 1e-8, "{}", g.name());
    }
}
