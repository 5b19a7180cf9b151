//! Oracle tests for complex arithmetic, the precision switch, and the
//! extended-precision backend.

mod common;

use common::{assert_close, assert_rel_close, c};
use fdeseries::scalar::{
    default_zero_tol, extended_precision_bits, set_extended_precision_digits, BigReal, Complex,
    RealScalar,
};

#[test]
fn complex_division_frozen_value() {
    let q = &c(3.0, 4.0) / &c(1.0, 2.0);
    assert_close("(3+4i)/(1+2i)", &q, 2.2, -0.4, 1e-15);
    let back = &q * &c(1.0, 2.0);
    assert_close("roundtrip", &back, 3.0, 4.0, 1e-15);
}

#[test]
fn principal_square_roots() {
    assert_close("sqrt(-4)", &c(-4.0, 0.0).sqrt(), 0.0, 2.0, 0.0);
    assert_close("sqrt(3+4i)", &c(3.0, 4.0).sqrt(), 2.0, 1.0, 1e-15);
    assert_close("sqrt(-2i)", &c(0.0, -2.0).sqrt(), 1.0, -1.0, 1e-15);
    assert!(c(0.0, 0.0).sqrt().is_zero());
    // Squaring undoes the root on both half-planes.
    for z in [c(-5.0, 0.3), c(0.25, -7.0), c(-1e-8, -2e-8), c(1e8, 3e7)] {
        let r = z.sqrt();
        assert!(r.re >= 0.0, "principal branch has Re ≥ 0");
        let sq = &r * &r;
        assert_rel_close("sqrt square", &sq, &z, 1e-14);
    }
}

#[test]
fn modulus_resists_overflow_and_underflow() {
    // Naive |z|² would overflow to infinity here.
    let big = c(3e200, 4e200).abs();
    assert!((big / 5e200 - 1.0).abs() <= 1e-15, "big modulus {big:e}");
    // ... and underflow to zero here.
    let tiny = c(3e-280, 4e-280).abs();
    assert!((tiny - 5e-280).abs() <= 1e-292, "tiny modulus {tiny:e}");
    assert_eq!(c(0.0, 0.0).abs(), 0.0);
}

#[test]
fn integer_powers_are_exact_on_gaussian_integers() {
    // (1+i)² = 2i, (1+i)⁴ = −4, (1+i)⁸ = 16, all exact in binary arithmetic.
    assert_close("(1+i)^8", &c(1.0, 1.0).powu(8), 16.0, 0.0, 0.0);
    assert_close("i³", &Complex::<f64>::i().powu(3), 0.0, -1.0, 0.0);
    assert_close("z⁰", &c(7.0, -3.0).powu(0), 1.0, 0.0, 0.0);
}

#[test]
fn reciprocal_inverts_multiplication() {
    let z = c(2.0, -3.0);
    let p = &z.recip() * &z;
    assert_close("z·z⁻¹", &p, 1.0, 0.0, 1e-15);
}

#[test]
fn decimal_parser_accepts_literals_and_rejects_trailing_garbage() {
    for (s, want) in [
        ("0.5", 0.5),
        ("+.5", 0.5),
        ("-2.5e-3", -0.0025),
        (" 42 ", 42.0),
        ("1E2", 100.0),
    ] {
        assert_eq!(f64::parse_decimal(s), Some(want), "parsing {s:?}");
    }
    for s in ["0.12.3", "1e5x", "", "1e", "abc", "--3", ".", "0x10", "1.0f64"] {
        assert_eq!(f64::parse_decimal(s), None, "parsing {s:?}");
    }
}

#[test]
fn extended_precision_digit_mapping() {
    set_extended_precision_digits(30);
    assert_eq!(extended_precision_bits(), 30 * 3322 / 1000 + 40);
    // A floor keeps degenerate requests usable.
    set_extended_precision_digits(1);
    assert_eq!(extended_precision_bits(), 64);
    set_extended_precision_digits(100);
    assert_eq!(extended_precision_bits(), 100 * 3322 / 1000 + 40);
}

#[test]
fn default_zero_tolerances_track_the_precision_mode() {
    assert_eq!(default_zero_tol::<f64>(None), 1e-12);
    let t = default_zero_tol::<f64>(Some(60));
    assert!((t / 1e-50 - 1.0).abs() <= 1e-14, "double tolerance {t:e}");
    set_extended_precision_digits(60);
    let tol: BigReal = default_zero_tol(Some(60));
    let ratio = tol.to_f64() / 1e-50;
    assert!((ratio - 1.0).abs() <= 1e-6, "extended tolerance ratio {ratio}");
}

#[test]
fn extended_reals_roundtrip_and_refine() {
    set_extended_precision_digits(50);
    // Dyadic doubles convert exactly in both directions.
    assert_eq!(BigReal::from_f64(0.5).to_f64(), 0.5);
    assert_eq!(BigReal::from_f64(-1.25).to_f64(), -1.25);
    assert_eq!(BigReal::from_i64(317).to_f64(), 317.0);
    // (√2)² − 2 collapses at working precision, far below double rounding.
    let two = BigReal::from_i64(2);
    let defect = (two.sqrt() * two.sqrt() - two).abs();
    assert!(defect.to_f64() <= 1e-45, "sqrt defect {:e}", defect.to_f64());
    // cos(π) = −1 at working precision.
    let cos_pi = (BigReal::pi().cos() + BigReal::one()).abs();
    assert!(cos_pi.to_f64() <= 1e-45, "cos(π) defect {:e}", cos_pi.to_f64());
    // Parsing runs at working precision and survives the f64 projection.
    let x = BigReal::parse_decimal("0.1").expect("plain decimal");
    assert!((x.to_f64() - 0.1).abs() <= 1e-17);
    assert_eq!(BigReal::parse_decimal("0.12.3"), None);
    // Small magnitudes survive the diagnostic projection.
    let small = BigReal::from_f64(1e-300);
    assert!((small.to_f64() / 1e-300 - 1.0).abs() <= 1e-10);
}

#[test]
fn extended_complex_square_root() {
    set_extended_precision_digits(50);
    let z: Complex<BigReal> = Complex::from_f64s(3.0, 4.0);
    let r = z.sqrt();
    let defect = (&(&r * &r) - &z).abs();
    assert!(defect.to_f64() <= 1e-45, "defect {:e}", defect.to_f64());
    assert!((r.re.to_f64() - 2.0).abs() <= 1e-15);
    assert!((r.im.to_f64() - 1.0).abs() <= 1e-15);
}
