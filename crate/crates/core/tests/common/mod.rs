#![allow(dead_code)]

use fdeseries::auxiliary::ProblemInstance;
use fdeseries::gamma::GammaSpec;
use fdeseries::scalar::Complex;
use fdeseries::series::Series;

pub fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::from_f64s(re, im)
}

pub fn assert_close(label: &str, actual: &Complex<f64>, re: f64, im: f64, tol: f64) {
    let d = (actual - &Complex::from_f64s(re, im)).abs();
    assert!(
        d <= tol,
        "{label}: expected ({re}, {im}), got {actual}, |diff| = {d:e}"
    );
}

pub fn assert_rel_close(label: &str, actual: &Complex<f64>, expected: &Complex<f64>, tol: f64) {
    let scale = 1.0_f64.max(expected.abs());
    let d = (actual - expected).abs();
    assert!(
        d <= tol * scale,
        "{label}: expected {expected}, got {actual}, |diff| = {d:e} (scale {scale:e})"
    );
}

/// The worked instance exercised throughout the suites:
///
/// (1−2i)·x″ + (1+i)·x′ + 3i·x = x((2+i) + 2i·z + z² + (1+i)·x′) + 2 + (2−i)·z + z².
pub fn worked_instance(
    gamma: GammaSpec<f64>,
    eta: Complex<f64>,
    order: usize,
) -> ProblemInstance<f64> {
    ProblemInstance::new(
        c(0.0, 3.0),
        c(1.0, 1.0),
        c(1.0, -2.0),
        c(1.0, 1.0),
        Series::from_f64_pairs(&[(2.0, 1.0), (0.0, 2.0), (1.0, 0.0)]),
        Series::from_f64_pairs(&[(2.0, 0.0), (2.0, -1.0), (1.0, 0.0)]),
        gamma,
        eta,
        order,
        None,
    )
}

/// The worked instance at the interior multiplier γ = 1/2, η = 1.
pub fn worked_half(order: usize) -> ProblemInstance<f64> {
    worked_instance(
        GammaSpec::InsideDisk {
            value: c(0.5, 0.0),
        },
        c(1.0, 0.0),
        order,
    )
}
