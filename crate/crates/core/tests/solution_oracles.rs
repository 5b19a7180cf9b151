//! Oracles for solution assembly: the conjugation y = g(γ·g⁻¹), recovery of
//! x by integration, the closed-form leading coefficients, and the residual
//! checks that substitute everything back into the original equation.

mod common;

use common::{assert_close, assert_rel_close, c, worked_half, worked_instance};
use fdeseries::scalar::{Complex, RealScalar};
use fdeseries::series::Series;
use fdeseries::solution::{
    build_bundle, build_x, build_y, leading_x_closed_forms, residual_fde, x0_closed_form,
    BuildError,
};
use fdeseries::gamma::GammaSpec;

#[test]
fn conjugating_a_linear_g_gives_the_multiplier() {
    // g = ηz conjugates to y = γz exactly.
    let g = Series::new(vec![Complex::zero(), c(2.0, 1.0)]).zero_extended(5);
    let gamma = c(0.3, -0.4);
    let y = build_y(&g, &gamma).unwrap();
    assert_close("y0", &y.coeff(0), 0.0, 0.0, 0.0);
    assert_close("y1", &y.coeff(1), 0.3, -0.4, 1e-15);
    for k in 2..=5 {
        assert!(y.coeff(k).abs() <= 1e-14, "y[{k}] should vanish");
    }
}

#[test]
fn conjugating_with_multiplier_one_is_the_identity() {
    let g = Series::from_f64_pairs(&[(0.0, 0.0), (1.5, 0.5), (0.3, -0.2), (0.0, 0.7), (0.1, 0.0)]);
    let y = build_y(&g, &Complex::one()).unwrap();
    let id = Series::<f64>::identity(g.order());
    let diff = y.sub(&id).max_abs();
    assert!(diff <= 1e-12, "g(g⁻¹(z)) − z = {diff:e}");
}

#[test]
fn x0_worked_instance_frozen_value() {
    // (a₁p₀ − a₂(γ − p₁) + b·h₀)/(b(a₀ − 1)) = (6.5 + 8i)/(−4 + 2i)
    //                                        = −0.5 − 2.25i at γ = 1/2.
    let x0 = x0_closed_form(&worked_half(8)).unwrap();
    assert_close("x0", &x0, -0.5, -2.25, 1e-13);
}

#[test]
fn x0_rejects_unit_a0() {
    let mut inst = worked_half(6);
    inst.a0 = Complex::one();
    assert!(matches!(x0_closed_form(&inst), Err(BuildError::DegenerateA0)));
}

#[test]
fn leading_solution_coefficients_frozen_values() {
    // Hand-evaluated closed forms at γ = 1/2:
    // x₁ = −(2+i)/(1+i) = −1.5 + 0.5i,
    // x₂ = (γ − 2i)/(2(1+i)) = −0.375 − 0.625i,
    // x₃ = (−3.5 + 8i)/(18 − 6i) = (−111 + 123i)/360.
    let inst = worked_half(8);
    let lead = leading_x_closed_forms(&inst).unwrap();
    assert_close("x0", &lead[0], -0.5, -2.25, 1e-13);
    assert_close("x1", &lead[1], -1.5, 0.5, 1e-13);
    assert_close("x2", &lead[2], -0.375, -0.625, 1e-13);
    assert_close("x3", &lead[3], -111.0 / 360.0, 123.0 / 360.0, 1e-13);
}

#[test]
fn built_solution_matches_closed_forms() {
    let inst = worked_half(8);
    let bundle = build_bundle(&inst).unwrap();
    let lead = leading_x_closed_forms(&inst).unwrap();
    for (k, expected) in lead.iter().enumerate() {
        assert_rel_close(
            &format!("x[{k}]"),
            &bundle.x.coeff(k),
            expected,
            1e-12,
        );
    }
    // y carries the multiplier in its linear coefficient.
    assert_close("y0", &bundle.y.coeff(0), 0.0, 0.0, 1e-13);
    assert_close("y1", &bundle.y.coeff(1), 0.5, 0.0, 1e-12);
}

#[test]
fn worked_instance_residuals_are_small() {
    let inst = worked_half(8);
    let bundle = build_bundle(&inst).unwrap();
    let r = &bundle.residuals;
    // Residual rounding noise scales with products of the conjugator's
    // coefficients (the worked instance grows to ~1e2 by order 8); the
    // extended-precision companion test pins the same numbers at 1e-40, so
    // anything structural would show up orders of magnitude above these bounds.
    let scale = (1.0 + bundle.g().max_abs()).powi(2);
    assert!(
        r.fde_defect <= 1e-12 * scale,
        "fde defect {:e} (scale {scale:e})",
        r.fde_defect
    );
    assert!(
        r.y_equation_defect <= 1e-12 * scale,
        "y-equation defect {:e} (scale {scale:e})",
        r.y_equation_defect
    );
    assert!(
        r.delay_closure_defect <= 1e-10,
        "closure defect {:e}",
        r.delay_closure_defect
    );
    assert!(
        r.aux_integral_defect <= 1e-12 * (1.0 + bundle.g().max_abs()).powi(2),
        "integral-form defect {:e}",
        r.aux_integral_defect
    );
    assert!(
        r.aux_differential_defect <= 1e-12 * (1.0 + bundle.g().max_abs()).powi(2),
        "differential-form defect {:e}",
        r.aux_differential_defect
    );
}

#[test]
fn extended_precision_shrinks_residuals() {
    use fdeseries::scalar::{set_extended_precision_digits, BigReal};
    use fdeseries::auxiliary::ProblemInstance;

    set_extended_precision_digits(60);
    let two = |re: f64, im: f64| Complex::<BigReal>::from_f64s(re, im);
    let p = Series::new(vec![two(2.0, 1.0), two(0.0, 2.0), two(1.0, 0.0)]);
    let h = Series::new(vec![two(2.0, 0.0), two(2.0, -1.0), two(1.0, 0.0)]);
    let inst = ProblemInstance::new(
        two(0.0, 3.0),
        two(1.0, 1.0),
        two(1.0, -2.0),
        two(1.0, 1.0),
        p,
        h,
        GammaSpec::InsideDisk { value: two(0.5, 0.0) },
        two(1.0, 0.0),
        8,
        Some(60),
    );
    let bundle = build_bundle(&inst).unwrap();
    let r = &bundle.residuals;
    for (label, v) in [
        ("fde", r.fde_defect.to_f64()),
        ("y-equation", r.y_equation_defect.to_f64()),
        ("closure", r.delay_closure_defect.to_f64()),
        ("integral", r.aux_integral_defect.to_f64()),
        ("differential", r.aux_differential_defect.to_f64()),
    ] {
        assert!(
            v <= 1e-40,
            "{label} defect should collapse at 60 digits, got {v:e}"
        );
    }
    // The leading coefficients still match the double-precision closed forms.
    let x0 = bundle.x.coeff(0);
    assert!(
        (x0.re.to_f64() + 0.5).abs() <= 1e-14 && (x0.im.to_f64() + 2.25).abs() <= 1e-14,
        "x0 at extended precision"
    );
}

#[test]
fn integrating_y_equal_p_gives_a_constant() {
    let inst = worked_half(6);
    let x0 = c(0.7, -0.2);
    let x = build_x(&inst.p_series, &inst, &x0);
    assert_close("x0", &x.coeff(0), 0.7, -0.2, 0.0);
    for k in 1..=x.order() {
        assert!(x.coeff(k).is_zero(), "x[{k}] should vanish");
    }
}

#[test]
fn fde_residual_rejects_foreign_series() {
    // A series that does not satisfy x′(0) = −p₀/b leaves the deviated
    // argument with a nonzero constant term, which composition must refuse.
    let inst = worked_half(6);
    let foreign = Series::<f64>::identity(6);
    match residual_fde(&foreign, &inst) {
        Err(BuildError::InnerConstantNonzero { abs }) => {
            assert!(abs > 0.1, "worked p₀ is far from zero, got {abs:e}");
        }
        other => panic!("expected InnerConstantNonzero, got {other:?}"),
    }
}

#[test]
fn trivial_eta_cannot_build_a_bundle() {
    let inst = worked_instance(
        GammaSpec::InsideDisk { value: c(0.5, 0.0) },
        Complex::zero(),
        6,
    );
    assert!(matches!(
        build_bundle(&inst),
        Err(BuildError::TrivialAuxiliary)
    ));
}
