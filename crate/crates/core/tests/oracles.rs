//! Frozen reference values. Unless stated otherwise they were computed
//! with mpmath at 40 digits (series summation, `gammainc`, adaptive
//! quadrature of the pointwise kernels), independently of this crate.

use approx::assert_relative_eq;
use hawkes_core::kernels::{grid_weights, resolvent_grid_weights};
use hawkes_core::specfun::{lower_incomplete_gamma, mittag_leffler, upper_incomplete_gamma};
use hawkes_core::*;

fn ml(alpha: f64, beta: f64, z: f64) -> f64 {
    mittag_leffler(MLParams::new(alpha, beta).unwrap(), z).unwrap()
}

#[test]
fn mittag_leffler_reference_values() {
    assert_relative_eq!(ml(1.0, 1.0, 1.0), std::f64::consts::E, max_relative = 1e-14);
    assert_relative_eq!(
        ml(2.0, 1.0, 1.0),
        1.543_080_634_815_243_8,
        max_relative = 1e-13
    );
    assert_relative_eq!(
        ml(0.5, 0.5, 0.0),
        0.564_189_583_547_756_3,
        max_relative = 1e-14
    );
    assert_relative_eq!(
        ml(0.6, 0.6, 2.0),
        63.329_920_771_678_306,
        max_relative = 1e-12
    );
    assert_relative_eq!(
        ml(0.6, 1.6, -3.0),
        0.280_098_839_911_636_26,
        max_relative = 1e-9
    );
    assert_relative_eq!(
        ml(1.5, 1.0, -10.0),
        -0.109_713_054_252_740_15,
        max_relative = 1e-9
    );
    // intermediate negative arguments, where neither expansion is accurate
    assert_relative_eq!(
        ml(0.585_498_654_329_308_1, 0.3, -4.906_161_117_468_453),
        -0.037_490_503_285_691_121,
        max_relative = 1e-9
    );
    assert_relative_eq!(
        ml(1.5, 1.2, -7.0),
        -0.186_915_135_420_340_86,
        max_relative = 1e-9
    );
    assert_relative_eq!(
        ml(1.0, 0.5, -6.0),
        -0.068_989_946_469_163_509,
        max_relative = 1e-9
    );
    assert_relative_eq!(
        ml(1.95, 0.7, -20.0),
        0.553_474_686_434_963_06,
        max_relative = 1e-9
    );
    assert_relative_eq!(
        ml(0.7, 0.7, -12.0),
        0.001_848_087_132_373_878_4,
        max_relative = 1e-9
    );
    // large positive argument, asymptotic regime
    assert_relative_eq!(
        ml(0.9, 1.2, 30.0),
        5.365_509_238_557_308e18,
        max_relative = 1e-9
    );
}

#[test]
fn mittag_leffler_errors() {
    let p = MLParams::new(0.5, 1.0).unwrap();
    assert!(matches!(
        mittag_leffler(p, f64::NAN),
        Err(HawkesError::Domain(_))
    ));
    assert!(matches!(
        mittag_leffler(p, 1e6),
        Err(HawkesError::Overflow(_))
    ));
    assert!(MLParams::new(0.0, 1.0).is_err());
}

#[test]
fn incomplete_gamma_reference_values() {
    assert_relative_eq!(
        lower_incomplete_gamma(1.0, 1.0).unwrap(),
        0.632_120_558_828_557_7,
        max_relative = 1e-14
    );
    assert_eq!(lower_incomplete_gamma(3.7, 0.0).unwrap(), 0.0);
    assert_relative_eq!(
        lower_incomplete_gamma(2.0, 2.0).unwrap(),
        0.593_994_150_290_161_9,
        max_relative = 1e-14
    );
    assert_relative_eq!(
        upper_incomplete_gamma(2.0, 10.0).unwrap(),
        11.0 * (-10.0f64).exp(),
        max_relative = 1e-13
    );
    assert!(lower_incomplete_gamma(0.0, 1.0).is_err());
}

#[test]
fn kernel_reference_values() {
    let k = KernelSpec::exponential(2.0, 3.0).unwrap();
    assert_eq!(kernel_eval(&k, 0.0).unwrap(), 2.0);
    let k = KernelSpec::fractional(1.0, 0.6).unwrap();
    assert_relative_eq!(
        kernel_eval(&k, 1.0).unwrap(),
        0.671_504_972_442_073_4,
        max_relative = 1e-14
    );
    let k = KernelSpec::gamma(0.9 * 9.0, 3.0, 2.0).unwrap();
    assert_relative_eq!(
        kernel_eval(&k, 1.0).unwrap(),
        0.403_275_253_779_697_9,
        max_relative = 1e-14
    );

    let k = KernelSpec::exponential(1.0, 1.0).unwrap();
    assert_relative_eq!(
        integrated_kernel(&k, 1.0).unwrap(),
        0.632_120_558_828_557_7,
        max_relative = 1e-15
    );
    let k = KernelSpec::fractional(0.1, 0.6).unwrap();
    assert_relative_eq!(
        integrated_kernel(&k, 1.0).unwrap(),
        0.111_917_495_407_012_23,
        max_relative = 1e-14
    );
    assert_eq!(integrated_kernel(&k, 0.0).unwrap(), 0.0);
}

#[test]
fn mittag_leffler_kernel_integrals() {
    let k = KernelSpec::mittag_leffler(0.1, 0.2, 0.6).unwrap();
    assert_relative_eq!(
        k.integrated(2.0).unwrap(),
        0.221_308_784_153_573_24,
        max_relative = 1e-12
    );
    // resolvent of the gamma kernel
    let k = KernelSpec::tempered_mittag_leffler(8.1, 8.1, 3.0, 2.0).unwrap();
    assert_relative_eq!(
        k.integrated(1.0).unwrap(),
        1.076_186_076_631_349_3,
        max_relative = 1e-12
    );
    assert_relative_eq!(
        k.double_integrated(1.0).unwrap(),
        0.474_463_986_752_785_55,
        max_relative = 1e-12
    );
}

#[test]
fn grid_weight_reference_values() {
    let g = grid_weights(&KernelSpec::exponential(1.0, 1.0).unwrap(), 1.0, 2).unwrap();
    assert_relative_eq!(
        g.weights()[0],
        0.393_469_340_287_366_6,
        max_relative = 1e-15
    );
    assert_relative_eq!(
        g.weights()[1],
        0.238_651_218_541_191_1,
        max_relative = 1e-15
    );

    let g = resolvent_grid_weights(&KernelSpec::exponential(0.5, 1.0).unwrap(), 1.0, 1).unwrap();
    assert_relative_eq!(
        g.weights()[0],
        0.393_469_340_287_366_6,
        max_relative = 1e-15
    );
    let g = resolvent_grid_weights(&KernelSpec::fractional(0.1, 0.6).unwrap(), 1.0, 1).unwrap();
    assert_relative_eq!(
        g.weights()[0],
        0.121_625_304_346_031_01,
        max_relative = 1e-13
    );
}

#[test]
fn g0r_reference_values() {
    let inc = g0r_increments(
        &Baseline::constant(1.0).unwrap(),
        &KernelSpec::exponential(0.5, 1.0).unwrap(),
        1.0,
        1,
    )
    .unwrap();
    assert_relative_eq!(inc[0], 1.213_061_319_425_266_8, max_relative = 1e-14);
}

#[test]
fn exponential_resolvent_satisfies_resolvent_equation() {
    // ‖R*K - (R-K)‖ in L¹[0,1] with a 10⁴-step trapezoidal convolution
    let (c, b) = (0.5, 1.0);
    let k = KernelSpec::exponential(c, b).unwrap();
    let r = resolvent_of(&k).unwrap();
    let m = 10_000;
    let h = 1.0 / m as f64;
    let kv: Vec<f64> = (0..=m).map(|i| k.eval(i as f64 * h).unwrap()).collect();
    let rv: Vec<f64> = (0..=m).map(|i| r.eval(i as f64 * h).unwrap()).collect();
    let mut l1 = 0.0;
    for i in 0..=m {
        // trapezoid for ∫_0^t R(t-s) K(s) ds
        let mut conv = 0.0;
        if i > 0 {
            conv = 0.5 * (rv[i] * kv[0] + rv[0] * kv[i]);
            for j in 1..i {
                conv += rv[i - j] * kv[j];
            }
            conv *= h;
        }
        let resid = conv - (rv[i] - kv[i]);
        let weight = if i == 0 || i == m { 0.5 } else { 1.0 };
        l1 += weight * resid.abs() * h;
    }
    assert!(l1 < 1e-8, "L1 residual {l1}");
}
