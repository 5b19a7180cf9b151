//! Oracle tests for eigenvalue classification, certified continued fractions,
//! Brjuno partial sums, and small-divisor profiles.
//!
//! The golden-mean fixtures are self-validating: an all-ones quotient stream
//! must produce Fibonacci convergents, and the Brjuno sum over them has an
//! independent closed recurrence checked in-test.

mod common;

use common::c;
use fdeseries::gamma::{
    brjuno_partial_sum, continued_fraction, continued_fraction_rational, small_divisor_profile,
    ContinuedFraction, GammaError, GammaSpec, Regime, Theta,
};
use num_bigint::BigInt;
use num_traits::ToPrimitive;

/// φ − 1 to 40 fractional digits.
const GOLDEN_40: &str = "0.6180339887498948482045868343656381177203";
/// √2 − 1 to 50 fractional digits.
const SQRT2_50: &str = "0.41421356237309504880168872420969807856967187537694";

fn fibonacci(count: usize) -> Vec<u64> {
    let mut f = vec![1u64, 1];
    while f.len() < count {
        f.push(f[f.len() - 1] + f[f.len() - 2]);
    }
    f
}

#[test]
fn golden_mean_digits_certify_all_ones_with_fibonacci_convergents() {
    let cf = continued_fraction(GOLDEN_40, 30).unwrap();
    assert_eq!(cf.partial_quotients(), vec![1u64; 30].as_slice());
    assert!(!cf.is_exact());
    // Convergents p_n/q_n are ratios of consecutive Fibonacci numbers.
    let f = fibonacci(40);
    for (n, (p, q)) in cf.convergents().iter().enumerate() {
        assert_eq!(p, &BigInt::from(f[n]), "p_{}", n + 1);
        assert_eq!(q, &BigInt::from(f[n + 1]), "q_{}", n + 1);
    }
    // Denominators strictly increase from the second convergent on.
    for w in cf.convergents().windows(2).skip(1) {
        assert!(w[0].1 < w[1].1);
    }
}

#[test]
fn forty_digits_certify_about_ninety_golden_quotients_then_stop() {
    match continued_fraction(GOLDEN_40, 200) {
        Err(GammaError::PrecisionExhausted {
            certified,
            requested_depth,
        }) => {
            assert_eq!(requested_depth, 200);
            let qs = certified.partial_quotients();
            assert!(
                qs.len() >= 90,
                "only {} quotients certified from 40 digits",
                qs.len()
            );
            assert!(qs.iter().all(|&a| a == 1), "non-golden quotient certified");
        }
        other => panic!("expected precision exhaustion, got {other:?}"),
    }
}

#[test]
fn sqrt2_digits_certify_all_twos() {
    let cf = continued_fraction(SQRT2_50, 40).unwrap();
    assert_eq!(cf.partial_quotients(), vec![2u64; 40].as_slice());
}

/// One decimal digit cannot certify even the first quotient of "0.5": the
/// interval [0.4, 0.6] straddles 1/2, where ⌊1/θ⌋ jumps.
#[test]
fn a_single_digit_certifies_nothing() {
    match continued_fraction("0.5", 5) {
        Err(GammaError::PrecisionExhausted {
            certified,
            requested_depth,
        }) => {
            assert_eq!(requested_depth, 5);
            assert!(certified.partial_quotients().is_empty());
        }
        other => panic!("expected precision exhaustion, got {other:?}"),
    }
}

#[test]
fn rational_expansions_terminate_exactly() {
    let cf = continued_fraction_rational(1, 3, 10).unwrap();
    assert_eq!(cf.partial_quotients(), &[3]);
    assert!(cf.is_exact());

    // 113/355 (the reciprocal of the classical π approximant).
    let cf = continued_fraction_rational(113, 355, 10).unwrap();
    assert_eq!(cf.partial_quotients(), &[3, 7, 16]);
    assert!(cf.is_exact());
    let last = cf.convergents().last().unwrap();
    assert_eq!((&last.0, &last.1), (&BigInt::from(113), &BigInt::from(355)));

    // Truncation below the full expansion is not exact.
    let cf = continued_fraction_rational(113, 355, 2).unwrap();
    assert_eq!(cf.partial_quotients(), &[3, 7]);
    assert!(!cf.is_exact());

    for (num, den) in [(0, 3), (3, 3), (5, 3)] {
        assert!(matches!(
            continued_fraction_rational(num, den, 4),
            Err(GammaError::InvalidGamma(_))
        ));
    }
}

#[test]
fn convergents_approximate_to_quadratic_order() {
    let theta = (5.0_f64.sqrt() - 1.0) / 2.0;
    let cf = ContinuedFraction::from_quotients(&vec![1; 25]).unwrap();
    for w in cf.convergents().windows(2) {
        let (p, q) = (w[0].0.to_f64().unwrap(), w[0].1.to_f64().unwrap());
        let q_next = w[1].1.to_f64().unwrap();
        let err = (theta - p / q).abs();
        assert!(
            err < 1.0 / (q * q_next),
            "convergent {p}/{q}: error {err:e} vs bound {:e}",
            1.0 / (q * q_next)
        );
    }
}

/// The library's Brjuno partial sum against an independent Fibonacci-based
/// recurrence: B_K = Σ_{n=0}^{K} ln(q_{n+1})/q_n with q₀ = 1.
#[test]
fn brjuno_sum_matches_independent_fibonacci_recurrence() {
    let cf = ContinuedFraction::from_quotients(&vec![1; 30]).unwrap();
    // q₀ = 1 and q_{n+1} = convergent denominators = Fibonacci numbers.
    let f = fibonacci(32);
    let mut q = vec![1.0f64];
    q.extend(f.iter().skip(1).map(|&x| x as f64)); // q₁ = 1, q₂ = 2, q₃ = 3, ...
    for terms in [5usize, 12, 25] {
        let mut want = 0.0;
        for n in 0..=terms {
            want += (q[n + 1]).ln() / q[n];
        }
        let got = brjuno_partial_sum(&cf, terms);
        assert!(
            (got - want).abs() <= 1e-12 * want,
            "terms {terms}: {got} vs {want}"
        );
    }
}

/// Frozen magnitude of the golden-mean Brjuno tail between 30 and 40 terms:
/// the increments decay like ln(q)/q ≈ n·ln φ·φ⁻ⁿ, summing to ≈ 1.9e-5.
#[test]
fn golden_brjuno_tail_between_30_and_40_terms() {
    let cf = ContinuedFraction::from_quotients(&vec![1; 45]).unwrap();
    let tail = brjuno_partial_sum(&cf, 40) - brjuno_partial_sum(&cf, 30);
    assert!(
        (1.7e-5..=2.1e-5).contains(&tail),
        "tail {tail:e} outside the frozen band"
    );
}

#[test]
#[should_panic(expected = "needs")]
fn brjuno_sum_panics_without_enough_convergents() {
    let cf = ContinuedFraction::from_quotients(&[1, 1, 1, 1, 1]).unwrap();
    brjuno_partial_sum(&cf, 5);
}

#[test]
fn quotient_lists_reject_degenerate_input() {
    assert!(matches!(
        ContinuedFraction::from_quotients(&[]),
        Err(GammaError::InvalidGamma(_))
    ));
    assert!(matches!(
        ContinuedFraction::from_quotients(&[3, 0, 2]),
        Err(GammaError::InvalidGamma(_))
    ));
}

#[test]
fn gamma_validation_enforces_regime_invariants() {
    let bad: Vec<GammaSpec<f64>> = vec![
        GammaSpec::InsideDisk { value: c(1.0, 0.0) },
        GammaSpec::InsideDisk { value: c(0.0, 0.0) },
        GammaSpec::InsideDisk { value: c(0.8, 0.7) },
        GammaSpec::RootOfUnity { q: 1, p: 1 },
        GammaSpec::RootOfUnity { q: 0, p: 3 },
        GammaSpec::RootOfUnity { q: 2, p: 4 },
        GammaSpec::IrrationalRotation {
            theta: Theta::Decimal("0.12.3".into()),
        },
        GammaSpec::IrrationalRotation {
            theta: Theta::Decimal("1.5".into()),
        },
        GammaSpec::IrrationalRotation {
            theta: Theta::Quotients(vec![]),
        },
        GammaSpec::IrrationalRotation {
            theta: Theta::Quotients(vec![2, 0]),
        },
    ];
    for (i, spec) in bad.iter().enumerate() {
        assert!(
            matches!(spec.validate(), Err(GammaError::InvalidGamma(_))),
            "case {i} must be rejected"
        );
        assert!(spec.classify().is_err(), "case {i} must not classify");
    }
    let good: GammaSpec<f64> = GammaSpec::RootOfUnity { q: -3, p: 7 };
    assert_eq!(good.classify().unwrap(), Regime::RootOfUnity);
}

/// γ = i: powers cycle exactly through the cardinal points with integer
/// residue reduction, so resonances carry no rounding fuzz at all.
#[test]
fn fourth_root_of_unity_powers_are_exact() {
    let spec: GammaSpec<f64> = GammaSpec::RootOfUnity { q: 1, p: 4 };
    let expect = [
        (1.0, 0.0), // k = 0
        (0.0, 1.0),
        (-1.0, 0.0),
        (0.0, -1.0),
        (1.0, 0.0),
        (0.0, 1.0), // k = 5 reduces to 1
    ];
    for (k, (re, im)) in expect.iter().enumerate() {
        let v = spec.power(k as u64).unwrap();
        assert_eq!((v.re, v.im), (*re, *im), "power {k}");
    }
    assert_eq!(spec.divisor_abs(2).unwrap(), 2.0);
    for m in 1..=12u64 {
        assert_eq!(spec.divisor_vanishes(m), m % 4 == 0, "index {m}");
    }
}

#[test]
fn divisor_profiles_by_regime() {
    // Interior point: divisors grow toward 1, minimum at the first power.
    let profile = small_divisor_profile(
        &GammaSpec::InsideDisk {
            value: c(0.5, 0.0),
        },
        6,
    )
    .unwrap();
    assert_eq!(profile.regime, Regime::InsideDisk);
    assert_eq!(profile.min_divisor, 0.5);
    assert_eq!(profile.divisors[0], 0.5);
    assert_eq!(profile.divisors[1], 0.75);
    assert!(profile.resonant_indices.is_empty());
    assert!(profile.gamma_cap.is_none() && profile.brjuno_partial.is_none());

    // Primitive fifth root (γ = e^{4πi/5}): Γ = 1/(2 sin(π/5)), resonances at
    // multiples of 5, and the resonant divisors are exactly zero.
    let profile =
        small_divisor_profile(&GammaSpec::<f64>::RootOfUnity { q: 2, p: 5 }, 10).unwrap();
    let cap = profile.gamma_cap.expect("root-of-unity cap");
    assert!(
        (cap - 0.850_650_808_352_04).abs() <= 1e-12,
        "fifth-root cap {cap}"
    );
    assert_eq!(profile.resonant_indices, vec![5, 10]);
    assert_eq!(profile.divisors[4], 0.0);
    assert_eq!(profile.divisors[9], 0.0);
    assert_eq!(profile.min_divisor, 0.0);

    // γ = −1: divisors alternate 2, 0, 2, 0, ... and Γ = 1/2.
    let profile =
        small_divisor_profile(&GammaSpec::<f64>::RootOfUnity { q: 1, p: 2 }, 6).unwrap();
    assert_eq!(profile.divisors, vec![2.0, 0.0, 2.0, 0.0, 2.0, 0.0]);
    assert_eq!(profile.resonant_indices, vec![2, 4, 6]);
    assert_eq!(profile.gamma_cap, Some(0.5));

    // Golden rotation: divisors dip along the Fibonacci subsequence of powers
    // (the convergent denominators), the hallmark of a Liouville-free number.
    let profile = small_divisor_profile(
        &GammaSpec::<f64>::IrrationalRotation {
            theta: Theta::Quotients(vec![1; 40]),
        },
        21,
    )
    .unwrap();
    assert_eq!(profile.regime, Regime::IrrationalRotation);
    let d = |n: usize| profile.divisors[n - 1];
    for w in [1, 2, 3, 5, 8, 13, 21].windows(2) {
        assert!(
            d(w[1]) < d(w[0]),
            "divisor at power {} should undercut power {}",
            w[1],
            w[0]
        );
    }
    assert!(profile.min_divisor > 0.0);
    let b = profile.brjuno_partial.expect("rotation profile carries B_K");
    assert!(b.is_finite() && b > 0.0);

    // A decimal rotation number works through the certified-prefix fallback.
    let profile = small_divisor_profile(
        &GammaSpec::<f64>::IrrationalRotation {
            theta: Theta::Decimal(GOLDEN_40.into()),
        },
        5,
    )
    .unwrap();
    assert!(profile.brjuno_partial.is_some());
}
