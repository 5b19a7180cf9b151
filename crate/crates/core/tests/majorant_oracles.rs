//! Oracle tests for the majorant recurrence, the implicit-equation radius,
//! and the empirical decay fit.
//!
//! The recurrence cross-check reimplements the five structural groups as
//! plain nested power sums (direct convolution of coefficient slices), with
//! no shared code with the series engine, and demands agreement to 1e-12.

mod common;

use common::{c, worked_half, worked_instance};
use fdeseries::gamma::GammaSpec;
use fdeseries::majorant::{
    empirical_radius, implicit_equation_residual, implicit_radius, majorant_coeffs, psi,
    psi_prime, radius_report, MajorantConfig, MajorantError,
};
use fdeseries::scalar::Complex;
use fdeseries::{c2_closed_form, solve_g};

fn cfg(bound_constant: f64, d1: f64, d2: f64, order: usize) -> MajorantConfig {
    MajorantConfig {
        bound_constant,
        d1,
        d2,
        gamma_cap: None,
        order,
    }
}

/// d₃ by hand: with d₁ = 1, d₂ = 0 the partial sum is D = z, so the five
/// groups contribute 2·[z³]D³ = 2, 6·[z³]D² = 0, and the three partition
/// sums collapse to their m = 1 terms 2·1 + 2·2 + 3·2 = 12; total 14·M.
#[test]
fn third_coefficient_frozen_value() {
    let d = majorant_coeffs(&cfg(1.0, 1.0, 0.0, 3)).unwrap();
    assert_eq!(d, vec![1.0, 0.0, 14.0]);
    let d = majorant_coeffs(&cfg(2.5, 1.0, 0.0, 3)).unwrap();
    assert_eq!(d, vec![1.0, 0.0, 35.0]);
    // With d₂ = 1 the partial sum is z + z²: [z³]D³ = 1, [z³]D² = 2, and the
    // m = 1 partition weight 12 multiplies [z³]D³ = 1: total 2 + 12 + 12 = 26.
    let d = majorant_coeffs(&cfg(1.0, 1.0, 1.0, 3)).unwrap();
    assert_eq!(d, vec![1.0, 1.0, 26.0]);
}

/// Independent evaluator: powers of the partial sum by plain convolution,
/// partition groups as explicit weighted sums of [zᵗ]D^{m+2}.
fn direct_power_sums(m: f64, d1: f64, d2: f64, order: usize) -> Vec<f64> {
    let mut d = vec![0.0; order + 1];
    d[1] = d1;
    d[2] = d2;
    for t in 3..=order {
        let base: Vec<f64> = d[..t].to_vec();
        let mut powers: Vec<Vec<f64>> = vec![vec![0.0; t + 1]; t + 1];
        powers[0][0] = 1.0;
        for e in 1..=t {
            let prev = powers[e - 1].clone();
            for (i, bi) in base.iter().enumerate() {
                if *bi == 0.0 {
                    continue;
                }
                for (j, pj) in prev.iter().enumerate() {
                    if i + j <= t {
                        powers[e][i + j] += bi * pj;
                    }
                }
            }
        }
        let mut total = 2.0 * powers[3][t] + 6.0 * powers[2][t];
        for mm in 1..=t.saturating_sub(2) {
            let w = 2.0 + 2.0 * (mm as f64 + 1.0) + (mm as f64 + 2.0) * (mm as f64 + 1.0);
            total += w * powers[mm + 2][t];
        }
        d[t] = m * total;
    }
    d[1..].to_vec()
}

#[test]
fn recurrence_matches_direct_power_sums() {
    let config = cfg(0.9, 0.7, 1.3, 8);
    let got = majorant_coeffs(&config).unwrap();
    let want = direct_power_sums(0.9, 0.7, 1.3, 8);
    assert_eq!(got.len(), want.len());
    for (n, (g, w)) in got.iter().zip(&want).enumerate() {
        let tol = 1e-12 * w.abs().max(1.0);
        assert!(
            (g - w).abs() <= tol,
            "d_{}: recurrence {g:e} vs direct {w:e}",
            n + 1
        );
    }
    // Γ folds into the constant: (M, Γ) and (M·Γ, none) are the same sequence.
    let capped = MajorantConfig {
        bound_constant: 0.45,
        gamma_cap: Some(2.0),
        ..cfg(0.0, 0.7, 1.3, 8)
    };
    assert_eq!(majorant_coeffs(&capped).unwrap(), got);
}

/// With M = 0 the implicit equation degenerates to D = d₁z + d₂z² and the
/// radius is set by the pole at D = 1.
#[test]
fn zero_constant_reduces_to_pole_bounded_radius() {
    let d = majorant_coeffs(&cfg(0.0, 1.0, 0.0, 8)).unwrap();
    assert_eq!(d, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let r = implicit_radius(&cfg(0.0, 1.0, 0.0, 2), 1.0).unwrap();
    assert!((r - 1.0).abs() <= 1e-6, "pole radius {r}");
    // d₁ = d₂ = 1: z + z² = 1 at the reciprocal golden ratio.
    let r = implicit_radius(&cfg(0.0, 1.0, 1.0, 2), 1.0).unwrap();
    assert!((r - 0.618_033_988_7).abs() <= 1e-6, "pole radius {r}");
}

#[test]
fn coefficients_and_radius_are_monotone_in_the_constant() {
    let lo = cfg(0.5, 1.0, 0.5, 10);
    let hi = cfg(1.0, 1.0, 0.5, 10);
    let d_lo = majorant_coeffs(&lo).unwrap();
    let d_hi = majorant_coeffs(&hi).unwrap();
    for n in 0..d_lo.len() {
        assert!(d_hi[n] >= d_lo[n], "d_{} not monotone", n + 1);
        if n >= 2 {
            assert!(d_hi[n] > d_lo[n], "d_{} should grow strictly", n + 1);
        }
    }
    let r_lo = implicit_radius(&lo, 1.0).unwrap();
    let r_hi = implicit_radius(&hi, 1.0).unwrap();
    assert!(
        r_hi < r_lo,
        "larger constant must shrink the radius ({r_hi} vs {r_lo})"
    );
}

/// The instance-derived configuration dominates the solved coefficients:
/// |c_n| ≤ d_n for every computed order (equality at n = 1, 2 by seeding).
#[test]
fn majorant_dominates_the_worked_instance() {
    let inst = worked_half(12);
    let sol = solve_g(&inst).unwrap();
    let config = MajorantConfig::for_instance(&inst).unwrap();
    let d = majorant_coeffs(&config).unwrap();
    for n in 1..=12 {
        let cn = sol.g.coeff(n).abs();
        assert!(
            cn <= d[n - 1] * (1.0 + 1e-9),
            "order {n}: |c_n| = {cn:e} exceeds majorant {dn:e}",
            dn = d[n - 1]
        );
    }
}

#[test]
fn derived_config_for_the_worked_instance() {
    // Interior multiplier: the binding slot is the weight-1 partition group,
    // (1 + |a₀|)·max_j |p_j| / 2 = (1 + 3)·2/2 = 4, and the divisor floor over
    // m = 2..11 is |γ² − 1| = 3/4, so M = 4 / (|a₂|·|γ|·3/4) = 4/(√5·0.375).
    let inst = worked_half(12);
    let config = MajorantConfig::for_instance(&inst).unwrap();
    let expected_m = 4.0 / (5.0_f64.sqrt() * 0.5 * 0.75);
    assert!(
        (config.bound_constant - expected_m).abs() <= 1e-12 * expected_m,
        "bound constant {} vs {expected_m}",
        config.bound_constant
    );
    assert_eq!(config.d1, 1.0);
    let c2_abs = 14.6_f64.sqrt();
    assert!(
        (config.d2 - c2_abs).abs() <= 1e-12 * c2_abs,
        "d2 {} vs |c₂| {c2_abs}",
        config.d2
    );
    assert!(config.gamma_cap.is_none());
    assert_eq!(config.order, 12);

    // Root-of-unity multiplier γ = −1: the divisor floor is replaced by the
    // uniform cap Γ = 1/(2·sin(π/2)) = 1/2 and d₂ picks up Γ·|γ − 1| = 1.
    let inst = worked_instance(GammaSpec::RootOfUnity { q: 1, p: 2 }, c(1.0, 0.0), 8);
    let config = MajorantConfig::for_instance(&inst).unwrap();
    let cap = config.gamma_cap.expect("root-of-unity cap");
    assert!((cap - 0.5).abs() <= 1e-15, "gamma cap {cap}");
    let expected_m = 4.0 / 5.0_f64.sqrt();
    assert!(
        (config.bound_constant - expected_m).abs() <= 1e-12 * expected_m,
        "bound constant {} vs {expected_m}",
        config.bound_constant
    );
    let c2_abs = c2_closed_form(&inst).unwrap().abs();
    let expected_d2 = 0.5 * c2_abs * 2.0;
    assert!(
        (config.d2 - expected_d2).abs() <= 1e-12 * expected_d2.max(1.0),
        "d2 {} vs Γ·|c₂|·|γ−1| = {expected_d2}",
        config.d2
    );
}

#[test]
fn derivative_matches_finite_differences() {
    let h = 1e-6;
    for d in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let fd = (psi(d + h) - psi(d - h)) / (2.0 * h);
        let exact = psi_prime(d);
        let tol = 1e-5 * (1.0 + exact.abs());
        assert!(
            (fd - exact).abs() <= tol,
            "Ψ′({d}): finite difference {fd} vs {exact}"
        );
    }
}

/// Inside the reported radius the residual has a root on the analytic branch;
/// past the fold it is negative for every D up to the pole.
#[test]
fn implicit_branch_solves_inside_and_vanishes_outside() {
    let config = cfg(0.2, 1.0, 0.0, 2);
    assert_eq!(implicit_equation_residual(&config, 1.0, 0.0, 0.0), 0.0);

    let r = implicit_radius(&config, 1.0).unwrap();
    assert!(r > 0.05 && r < 0.62, "radius {r} out of expected range");

    // Inside: bracket the sign change in D by scanning, then bisect.
    let z = 0.5 * r;
    let mut hi = None;
    let mut d = 0.0;
    while d < 1.0 - 1e-6 {
        if implicit_equation_residual(&config, 1.0, z, d) > 0.0 {
            hi = Some(d);
            break;
        }
        d += 1e-3;
    }
    let mut hi = hi.expect("residual must turn positive inside the radius");
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if implicit_equation_residual(&config, 1.0, z, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    let res = implicit_equation_residual(&config, 1.0, z, root).abs();
    assert!(res <= 1e-10, "branch residual {res:e} at z = {z}");
    assert!(root > 0.0 && root < 1.0);

    // Outside: no root for any D — the branch has folded away.
    let z = 1.05 * r;
    for k in 0..=9_999 {
        let d = k as f64 * 1e-4;
        let res = implicit_equation_residual(&config, 1.0, z, d);
        assert!(
            res < 0.0,
            "residual {res:e} at D = {d} past the fold (z = {z})"
        );
    }
}

#[test]
fn geometric_coefficients_fit_their_radius() {
    let coeffs: Vec<Complex<f64>> = (0..=24).map(|n| c(2.0_f64.powi(n), 0.0)).collect();
    let fit = empirical_radius(&coeffs, 10).unwrap();
    assert!(
        (fit.radius - 0.5).abs() <= 1e-9,
        "radius {} for 2ⁿ growth",
        fit.radius
    );
    assert!((fit.r_squared - 1.0).abs() <= 1e-12);
    assert!(!fit.oscillatory && !fit.superlinear_decay);
    assert_eq!(fit.window, 10);
}

#[test]
fn factorial_decay_flags_superlinear() {
    let mut coeffs = Vec::new();
    let mut f = 1.0_f64;
    for n in 0..=21 {
        if n > 0 {
            f *= n as f64;
        }
        coeffs.push(c(1.0 / f, 0.0));
    }
    let fit = empirical_radius(&coeffs, 12).unwrap();
    assert!(
        fit.superlinear_decay,
        "1/n! must flag superlinear decay (slope halves {})",
        fit.slope
    );
    assert!(!fit.oscillatory);
}

#[test]
fn alternating_magnitudes_flag_oscillatory() {
    let coeffs: Vec<Complex<f64>> = (0..=31)
        .map(|n| c(if n % 2 == 0 { 1.0_f64.exp() } else { (-1.0_f64).exp() }, 0.0))
        .collect();
    let fit = empirical_radius(&coeffs, 16).unwrap();
    assert!(fit.oscillatory, "R² = {} should flag oscillatory", fit.r_squared);
    assert!(fit.slope.abs() < 0.05);
    assert!((fit.radius - 1.0).abs() < 0.2);
}

#[test]
fn too_few_nonzero_coefficients_is_an_error() {
    // Zero coefficients are filtered out before the window check.
    let coeffs: Vec<Complex<f64>> = (0..10)
        .map(|n| if n % 2 == 0 { c(3.0, 0.0) } else { c(0.0, 0.0) })
        .collect();
    match empirical_radius(&coeffs, 10) {
        Err(MajorantError::InsufficientData { needed, found }) => {
            assert_eq!((needed, found), (10, 5));
        }
        other => panic!("expected InsufficientData, got {other:?}"),
    }
    assert!(matches!(
        empirical_radius(&coeffs[..1], 1),
        Err(MajorantError::InvalidConfig(_))
    ));
}

#[test]
fn report_on_the_worked_instance_is_complete() {
    let inst = worked_half(16);
    let sol = solve_g(&inst).unwrap();
    let report = radius_report(&inst, &sol.g, 8);
    let emp = report.empirical_radius.expect("empirical radius");
    let maj = report.majorant_radius.expect("majorant radius");
    assert!(maj > 0.0);
    assert!(
        maj <= emp * 1.05,
        "majorant lower bound {maj} must not exceed the empirical estimate {emp}"
    );
    assert!(report.majorant_growth.is_some());
    assert!(report.config.is_some());
    // Interior multiplier: no rotation-number diagnostics.
    assert!(report.brjuno_radius_scale.is_none());
    assert!(report.empirical.is_some());
}

#[test]
fn validate_rejects_bad_configs() {
    let bad = [
        cfg(-1.0, 1.0, 0.0, 4),
        cfg(1.0, 0.0, 0.0, 4),
        cfg(1.0, 1.0, f64::NAN, 4),
        cfg(1.0, 1.0, 0.0, 1),
        MajorantConfig {
            gamma_cap: Some(0.0),
            ..cfg(1.0, 1.0, 0.0, 4)
        },
    ];
    for (i, config) in bad.iter().enumerate() {
        assert!(
            matches!(config.validate(), Err(MajorantError::InvalidConfig(_))),
            "case {i} must be rejected"
        );
    }
    assert!(cfg(0.0, 1.0, 0.0, 2).validate().is_ok());
}
