//! Property-based invariants of truncated series arithmetic: reversion
//! roundtrips, the product and chain rules, dilation multiplicativity, and
//! composition associativity, over randomized tame inputs.

use fdeseries::scalar::Complex;
use fdeseries::series::Series;
use proptest::prelude::*;

fn coeff(mag: f64) -> impl Strategy<Value = Complex<f64>> {
    (-mag..mag, -mag..mag).prop_map(|(re, im)| Complex::from_f64s(re, im))
}

/// Series with f(0) = 0 (composable on the right).
fn pinned(len: std::ops::RangeInclusive<usize>, mag: f64) -> impl Strategy<Value = Series<f64>> {
    proptest::collection::vec(coeff(mag), len).prop_map(|mut v| {
        v[0] = Complex::zero();
        Series::new(v)
    })
}

/// Invertible series: f(0) = 0 and |f′(0)| ∈ [0.7, 1.4], with small higher
/// coefficients so the inverse stays numerically tame.
fn invertible() -> impl Strategy<Value = Series<f64>> {
    (
        proptest::collection::vec(coeff(0.5), 4..=7),
        0.7f64..1.4,
        0.0f64..std::f64::consts::TAU,
    )
        .prop_map(|(mut v, mag, angle)| {
            v[0] = Complex::zero();
            v[1] = Complex::from_f64s(mag * angle.cos(), mag * angle.sin());
            Series::new(v)
        })
}

fn assert_series_close(
    label: &str,
    a: &Series<f64>,
    b: &Series<f64>,
    power: i32,
) -> Result<(), TestCaseError> {
    prop_assert_eq!(a.order(), b.order(), "{} order mismatch", label);
    let scale = (1.0 + a.max_abs().max(b.max_abs())).powi(power);
    for k in 0..=a.order() {
        let d = (&a.coeff(k) - &b.coeff(k)).abs();
        prop_assert!(
            d <= 1e-12 * scale,
            "{} coefficient {}: |diff| = {:e} (scale {:e})",
            label,
            k,
            d,
            scale
        );
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reversion_roundtrips(f in invertible()) {
        let q = f.invert().unwrap();
        let id = Series::identity(f.order());
        assert_series_close("f∘f⁻¹", &f.compose(&q).unwrap(), &id.truncated(f.order()), 3)?;
        assert_series_close("f⁻¹∘f", &q.compose(&f).unwrap(), &id.truncated(f.order()), 3)?;
    }

    #[test]
    fn product_rule(f in pinned(3..=8, 1.0), g in pinned(3..=8, 1.0)) {
        let lhs = f.mul(&g).differentiate();
        let rhs = f.differentiate().mul(&g).add(&f.mul(&g.differentiate()));
        assert_series_close("(fg)′ = f′g + fg′", &lhs, &rhs.truncated(lhs.order()), 2)?;
    }

    #[test]
    fn chain_rule(f in pinned(3..=7, 1.0), g in pinned(3..=7, 1.0)) {
        let lhs = f.compose(&g).unwrap().differentiate();
        let rhs = f.differentiate().compose(&g).unwrap().mul(&g.differentiate());
        assert_series_close("(f∘g)′ = (f′∘g)·g′", &lhs, &rhs.truncated(lhs.order()), 3)?;
    }

    #[test]
    fn dilation_is_multiplicative(
        f in pinned(2..=8, 1.0),
        a in coeff(1.0),
        b in coeff(1.0),
    ) {
        let twice = f.dilate(&a).dilate(&b);
        let once = f.dilate(&(&a * &b));
        assert_series_close("dilate(a)∘dilate(b) = dilate(ab)", &twice, &once, 2)?;
    }

    #[test]
    fn composition_is_associative(
        f in pinned(3..=6, 0.8),
        g in pinned(3..=6, 0.8),
        h in pinned(3..=6, 0.8),
    ) {
        let left = f.compose(&g).unwrap().compose(&h).unwrap();
        let right = f.compose(&g.compose(&h).unwrap()).unwrap();
        assert_series_close("(f∘g)∘h = f∘(g∘h)", &left, &right, 3)?;
    }
}
