//! Delay-parameter classification and small-divisor diagnostics.
//!
//! The solvability of the auxiliary equation is governed by the eigenvalue γ
//! of the linearization: every new series coefficient is divided by a factor
//! proportional to `γ^{n+1} − 1`.  Three regimes are distinguished:
//!
//! * **inside the unit disk** (`0 < |γ| < 1`): divisors tend to 1, no
//!   obstruction;
//! * **irrational rotation** (`γ = e^{2πiθ}`, θ irrational): divisors come
//!   arbitrarily close to zero; convergence hinges on θ being a Brjuno number,
//!   i.e. on the partial sums `Σ log(q_{n+1})/q_n` over the continued-fraction
//!   denominators staying bounded;
//! * **root of unity** (`γ = e^{2πiq/p}`): divisors vanish *exactly* at every
//!   resonant index, and solvability becomes a sequence of compatibility
//!   conditions.
//!
//! Brjuno-ness of a numerically given θ is undecidable from finitely many
//! digits, so this module never returns a boolean verdict; it reports partial
//! sums and certified continued-fraction data instead.  Quotient certification
//! uses exact rational interval arithmetic: a decimal input with `d` fractional
//! digits denotes the interval `[t − 10^{-d}, t + 10^{-d}]`, and a partial
//! quotient is emitted only when the whole interval agrees on it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::scalar::{Complex, RealScalar};

/// Errors from γ classification and continued-fraction analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GammaError {
    /// The specification violates its regime's invariants.
    #[error("invalid gamma specification: {0}")]
    InvalidGamma(String),
    /// The input's precision cannot certify the next partial quotient.  The
    /// quotients certified so far are returned; callers wanting more depth
    /// must supply more digits.
    #[error(
        "precision exhausted after {} certified partial quotients (requested depth {requested_depth})",
        .certified.partial_quotients().len()
    )]
    PrecisionExhausted {
        certified: ContinuedFraction,
        requested_depth: usize,
    },
}

/// The three analytic regimes for the eigenvalue γ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `0 < |γ| < 1`.
    InsideDisk,
    /// `γ = e^{2πiθ}` with θ declared irrational; Brjuno diagnostics apply.
    IrrationalRotation,
    /// `γ = e^{2πiq/p}`, a primitive p-th root of unity; exact resonances.
    RootOfUnity,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::InsideDisk => "inside_disk",
            Regime::IrrationalRotation => "irrational_rotation",
            Regime::RootOfUnity => "root_of_unity",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Rotation number input for the irrational-rotation regime.
///
/// A decimal string carries implicit uncertainty in its last digit; a partial
/// quotient list is exact by construction and sidesteps precision questions
/// entirely (the classic fixtures — golden mean, quadratic irrationals — are
/// exact in quotient form).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Theta {
    /// Plain decimal in (0,1), e.g. `"0.6180339887"`.
    Decimal(String),
    /// Partial quotients `a₁, a₂, ...` of `θ = 1/(a₁ + 1/(a₂ + ...))`.
    Quotients(Vec<u64>),
}

/// Declared regime and data for the eigenvalue γ.
#[derive(Clone, Debug, PartialEq)]
pub enum GammaSpec<R> {
    /// `γ` given directly, with `0 < |γ| < 1`.
    InsideDisk { value: Complex<R> },
    /// `γ = e^{2πiθ}` with θ ∈ (0,1) declared irrational.
    IrrationalRotation { theta: Theta },
    /// `γ = e^{2πiq/p}` with `q ≠ 0`, `p ≥ 2`, `gcd(|q|, p) = 1`.
    RootOfUnity { q: i64, p: u64 },
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Evaluate θ from its description at working precision.
fn theta_value<R: RealScalar>(theta: &Theta) -> Result<R, GammaError> {
    match theta {
        Theta::Decimal(s) => {
            let v = R::parse_decimal(s)
                .ok_or_else(|| GammaError::InvalidGamma(format!("unparseable theta {s:?}")))?;
            if !(v > R::zero() && v < R::one()) {
                return Err(GammaError::InvalidGamma(format!(
                    "theta {s:?} outside the open interval (0,1)"
                )));
            }
            Ok(v)
        }
        Theta::Quotients(qs) => {
            if qs.is_empty() || qs.iter().any(|&a| a == 0) {
                return Err(GammaError::InvalidGamma(
                    "quotient list must be nonempty with all entries >= 1".into(),
                ));
            }
            // Backward recurrence; evaluates the terminating continued
            // fraction, i.e. the final convergent of the intended irrational.
            let mut acc = R::zero();
            for &a in qs.iter().rev() {
                acc = R::one() / (R::from_i64(a as i64) + acc);
            }
            Ok(acc)
        }
    }
}

impl<R: RealScalar> GammaSpec<R> {
    /// Check the regime invariants.
    pub fn validate(&self) -> Result<(), GammaError> {
        match self {
            GammaSpec::InsideDisk { value } => {
                if !value.is_finite() {
                    return Err(GammaError::InvalidGamma("gamma must be finite".into()));
                }
                let m = value.abs();
                if !(m > R::zero() && m < R::one()) {
                    return Err(GammaError::InvalidGamma(format!(
                        "inside-disk gamma needs 0 < |gamma| < 1, got |gamma| = {m}"
                    )));
                }
                Ok(())
            }
            GammaSpec::IrrationalRotation { theta } => theta_value::<R>(theta).map(|_| ()),
            GammaSpec::RootOfUnity { q, p } => {
                if *p < 2 {
                    return Err(GammaError::InvalidGamma(format!(
                        "root-of-unity denominator must be >= 2, got {p}"
                    )));
                }
                if *q == 0 {
                    return Err(GammaError::InvalidGamma(
                        "root-of-unity numerator must be nonzero".into(),
                    ));
                }
                if gcd_u64(q.unsigned_abs(), *p) != 1 {
                    return Err(GammaError::InvalidGamma(format!(
                        "{q}/{p} is not in lowest terms"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Classify into a regime (after validation).
    pub fn classify(&self) -> Result<Regime, GammaError> {
        self.validate()?;
        Ok(match self {
            GammaSpec::InsideDisk { .. } => Regime::InsideDisk,
            GammaSpec::IrrationalRotation { .. } => Regime::IrrationalRotation,
            GammaSpec::RootOfUnity { .. } => Regime::RootOfUnity,
        })
    }

    /// Materialize γ at working precision.
    pub fn value(&self) -> Result<Complex<R>, GammaError> {
        self.validate()?;
        match self {
            GammaSpec::InsideDisk { value } => Ok(value.clone()),
            GammaSpec::IrrationalRotation { theta } => {
                let t = theta_value::<R>(theta)?;
                Ok(unit_circle_point(t))
            }
            GammaSpec::RootOfUnity { q, p } => Ok(root_of_unity_power(*q, *p, 1)),
        }
    }

    /// Compute γ^k.  For roots of unity the exponent is reduced modulo p in
    /// integer arithmetic first, so resonant powers are exactly 1.
    pub fn power(&self, k: u64) -> Result<Complex<R>, GammaError> {
        self.validate()?;
        match self {
            GammaSpec::InsideDisk { value } => Ok(value.powu(k)),
            GammaSpec::IrrationalRotation { theta } => {
                let t = theta_value::<R>(theta)?;
                Ok(unit_circle_point(t * R::from_i64(k as i64)))
            }
            GammaSpec::RootOfUnity { q, p } => Ok(root_of_unity_power(*q, *p, k)),
        }
    }

    /// `|γ^n − 1|`, the small divisor at index n.  Exact zero for resonant
    /// roots of unity (decided by the integer test `p | n`), and computed from
    /// the sine form `2|sin(πnθ)|` on the unit circle.
    pub fn divisor_abs(&self, n: u64) -> Result<R, GammaError> {
        self.validate()?;
        match self {
            GammaSpec::InsideDisk { value } => {
                Ok((&value.powu(n) - &Complex::one()).abs())
            }
            GammaSpec::IrrationalRotation { theta } => {
                let t = theta_value::<R>(theta)?;
                let two = R::from_i64(2);
                Ok(two * (R::pi() * t * R::from_i64(n as i64)).sin().abs())
            }
            GammaSpec::RootOfUnity { q, p } => {
                let s = reduced_residue(*q, *p, n);
                if s == 0 {
                    return Ok(R::zero());
                }
                let two = R::from_i64(2);
                let angle = R::pi() * R::from_i64(s as i64) / R::from_i64(*p as i64);
                Ok(two * angle.sin().abs())
            }
        }
    }

    /// Does the divisor `γ^m − 1` vanish exactly?  True only for roots of
    /// unity at multiples of the period; decided in integer arithmetic.
    pub fn divisor_vanishes(&self, m: u64) -> bool {
        match self {
            GammaSpec::RootOfUnity { p, .. } => m % p == 0,
            _ => false,
        }
    }

    /// Period p for roots of unity.
    pub fn root_period(&self) -> Option<u64> {
        match self {
            GammaSpec::RootOfUnity { p, .. } => Some(*p),
            _ => None,
        }
    }
}

/// `(k·q) mod p` with the sign convention of a true residue in `0..p`.
fn reduced_residue(q: i64, p: u64, k: u64) -> u64 {
    ((k as i128 * q as i128).rem_euclid(p as i128)) as u64
}

/// `e^{2πi t}` at working precision.
fn unit_circle_point<R: RealScalar>(t: R) -> Complex<R> {
    let angle = R::from_i64(2) * R::pi() * t;
    Complex::new(angle.cos(), angle.sin())
}

/// `e^{2πi (k·q/p)}` with exact residue reduction; the four cardinal points
/// come out exactly so that γ = −1 and γ = ±i are free of rounding fuzz.
fn root_of_unity_power<R: RealScalar>(q: i64, p: u64, k: u64) -> Complex<R> {
    let s = reduced_residue(q, p, k);
    if s == 0 {
        return Complex::one();
    }
    if 2 * s == p {
        return Complex::new(-R::one(), R::zero());
    }
    if 4 * s == p {
        return Complex::i();
    }
    if 4 * s == 3 * p {
        return Complex::new(R::zero(), -R::one());
    }
    let angle = R::from_i64(2) * R::pi() * R::from_i64(s as i64) / R::from_i64(p as i64);
    Complex::new(angle.cos(), angle.sin())
}

// ---------------------------------------------------------------------------
// Continued fractions.
// ---------------------------------------------------------------------------

/// A certified prefix of a continued-fraction expansion `[0; a₁, a₂, ...]`
/// together with its convergents `p_n/q_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFraction {
    partial_quotients: Vec<u64>,
    convergents: Vec<(BigInt, BigInt)>,
    exact: bool,
}

impl ContinuedFraction {
    fn from_parts(partial_quotients: Vec<u64>, exact: bool) -> Self {
        // Standard convergent recurrence seeded with p₋₁/q₋₁ = 1/0 and
        // p₀/q₀ = 0/1 (the expansion has zero integer part).
        let mut convergents = Vec::with_capacity(partial_quotients.len());
        let (mut p_prev, mut q_prev) = (BigInt::from(1), BigInt::from(0));
        let (mut p_cur, mut q_cur) = (BigInt::from(0), BigInt::from(1));
        for &a in &partial_quotients {
            let a = BigInt::from(a);
            let p_next = &a * &p_cur + &p_prev;
            let q_next = &a * &q_cur + &q_prev;
            convergents.push((p_next.clone(), q_next.clone()));
            p_prev = p_cur;
            q_prev = q_cur;
            p_cur = p_next;
            q_cur = q_next;
        }
        ContinuedFraction {
            partial_quotients,
            convergents,
            exact,
        }
    }

    /// Build from an explicit quotient list (all entries ≥ 1).  The list is
    /// treated as a certified prefix of an expansion, not as a terminating
    /// (rational) one.
    pub fn from_quotients(quotients: &[u64]) -> Result<Self, GammaError> {
        if quotients.is_empty() || quotients.iter().any(|&a| a == 0) {
            return Err(GammaError::InvalidGamma(
                "quotient list must be nonempty with all entries >= 1".into(),
            ));
        }
        Ok(Self::from_parts(quotients.to_vec(), false))
    }

    pub fn partial_quotients(&self) -> &[u64] {
        &self.partial_quotients
    }

    /// Convergents `(p_n, q_n)` for n = 1, 2, ... aligned with the quotients.
    pub fn convergents(&self) -> &[(BigInt, BigInt)] {
        &self.convergents
    }

    /// True when the expansion terminated (the input was exactly rational).
    pub fn is_exact(&self) -> bool {
        self.exact
    }
}

/// Expand a decimal θ ∈ (0,1) to at most `depth` partial quotients, emitting
/// only quotients certified by the input's precision interval.
///
/// A decimal with `d` fractional digits is read as `t ± 10^{-d}`; the Gauss
/// map is applied to the whole interval in exact rational arithmetic, and a
/// quotient is accepted only when both endpoints agree on it.  When they
/// disagree the expansion stops with [`GammaError::PrecisionExhausted`]
/// carrying everything certified so far.
pub fn continued_fraction(theta_decimal: &str, depth: usize) -> Result<ContinuedFraction, GammaError> {
    if depth == 0 {
        return Err(GammaError::InvalidGamma("depth must be >= 1".into()));
    }
    let (t, u) = parse_decimal_interval(theta_decimal)?;
    if !(t > BigRational::zero() && t < BigRational::from_integer(1.into())) {
        return Err(GammaError::InvalidGamma(format!(
            "theta {theta_decimal:?} outside the open interval (0,1)"
        )));
    }
    let mut lo = &t - &u;
    let mut hi = &t + &u;
    let mut quotients: Vec<u64> = Vec::new();
    let exhausted = |quotients: Vec<u64>| GammaError::PrecisionExhausted {
        certified: ContinuedFraction::from_parts(quotients, false),
        requested_depth: depth,
    };
    while quotients.len() < depth {
        if lo <= BigRational::zero() || hi >= BigRational::from_integer(1.into()) {
            // The interval could contain a rational boundary or spill out of
            // (0,1): the next quotient cannot be certified.
            return Err(exhausted(quotients));
        }
        // θ ∈ [lo, hi] ⊂ (0,1); the next quotient is ⌊1/θ⌋ and 1/θ is
        // decreasing, so its range is [1/hi, 1/lo].
        let a_from_hi = hi.recip().floor();
        let a_from_lo = lo.recip().floor();
        if a_from_hi != a_from_lo {
            return Err(exhausted(quotients));
        }
        let a = a_from_hi
            .to_integer()
            .to_u64()
            .ok_or_else(|| GammaError::InvalidGamma("partial quotient overflows u64".into()))?;
        quotients.push(a);
        let a_rat = BigRational::from_integer(a.into());
        let new_lo = hi.recip() - &a_rat;
        let new_hi = lo.recip() - &a_rat;
        lo = new_lo;
        hi = new_hi;
    }
    Ok(ContinuedFraction::from_parts(quotients, false))
}

/// Expand an exact rational θ = num/den ∈ (0,1) by the Euclidean algorithm.
/// Terminates with `is_exact() = true` if the expansion ends within `depth`.
pub fn continued_fraction_rational(
    num: u64,
    den: u64,
    depth: usize,
) -> Result<ContinuedFraction, GammaError> {
    if depth == 0 {
        return Err(GammaError::InvalidGamma("depth must be >= 1".into()));
    }
    if num == 0 || num >= den {
        return Err(GammaError::InvalidGamma(format!(
            "rational theta {num}/{den} outside the open interval (0,1)"
        )));
    }
    let mut quotients = Vec::new();
    let (mut n, mut d) = (num, den);
    let mut exact = false;
    while quotients.len() < depth {
        // θ = n/d, quotient = ⌊d/n⌋, remainder fraction = (d mod n)/n.
        let a = d / n;
        quotients.push(a);
        let r = d % n;
        if r == 0 {
            exact = true;
            break;
        }
        d = n;
        n = r;
    }
    Ok(ContinuedFraction::from_parts(quotients, exact))
}

/// Natural log of a positive big integer, robust to values beyond f64 range.
fn ln_big(x: &BigInt) -> f64 {
    debug_assert!(x.is_positive());
    if let Some(f) = x.to_f64().filter(|f| f.is_finite()) {
        return f.ln();
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(53);
    let top = (x >> shift).to_f64().unwrap_or(f64::MAX);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Partial Brjuno sum `Σ_{n=0}^{terms} log(q_{n+1})/q_n` with q₀ = 1, over the
/// convergent denominators of `cf`.  Requires at least `terms + 1` convergents.
pub fn brjuno_partial_sum(cf: &ContinuedFraction, terms: usize) -> f64 {
    assert!(
        cf.convergents.len() >= terms + 1,
        "brjuno_partial_sum needs {} convergents, continued fraction has {}",
        terms + 1,
        cf.convergents.len()
    );
    let mut sum = 0.0;
    let mut q_n = 1.0f64; // q₀
    for n in 0..=terms {
        let q_next = &cf.convergents[n].1;
        if q_n.is_finite() {
            sum += ln_big(q_next) / q_n;
        }
        // else: q_n > 1e308 makes the term < 1e-300; drop it.
        q_n = q_next.to_f64().unwrap_or(f64::INFINITY);
    }
    sum
}

/// Parse `±?digits[.digits]` into `(value, uncertainty)` as exact rationals,
/// with uncertainty one unit in the last fractional place.
fn parse_decimal_interval(s: &str) -> Result<(BigRational, BigRational), GammaError> {
    let t = s.trim();
    let bad = || GammaError::InvalidGamma(format!("unparseable decimal {s:?}"));
    let (int_part, frac_part) = match t.split_once('.') {
        Some((i, f)) => (i, f),
        None => (t, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let digits = if digits.is_empty() { "0".to_string() } else { digits };
    let numer: BigInt = digits.parse().map_err(|_| bad())?;
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    let value = BigRational::new(numer, denom.clone());
    let uncertainty = BigRational::new(BigInt::from(1), denom);
    Ok((value, uncertainty))
}

// ---------------------------------------------------------------------------
// Small-divisor profile.
// ---------------------------------------------------------------------------

/// Diagnostic table of the divisors `|γ^n − 1|` together with regime-specific
/// summary quantities.
#[derive(Clone, Debug)]
pub struct SmallDivisorProfile<R> {
    pub gamma: Complex<R>,
    pub regime: Regime,
    /// `|γ^n − 1|` for n = 1..=n_max (index i holds n = i+1).
    pub divisors: Vec<R>,
    /// Smallest divisor over the whole table (exactly 0 when a resonance is
    /// in range).
    pub min_divisor: R,
    /// Indices n with `γ^n = 1` exactly (root-of-unity regime only).
    pub resonant_indices: Vec<u64>,
    /// Γ = max_{1≤k≤p−1} 1/|γ^k − 1|; the uniform factor controlling
    /// non-resonant divisors in the root-of-unity regime.
    pub gamma_cap: Option<R>,
    /// Partial Brjuno sum over the certified quotients (irrational rotation
    /// only; absent when no quotients could be certified).
    pub brjuno_partial: Option<f64>,
}

/// Default expansion depth used when a Brjuno partial sum is computed from a
/// decimal θ inside [`small_divisor_profile`].
const PROFILE_CF_DEPTH: usize = 64;

/// Tabulate `|γ^n − 1|` for n = 1..=n_max plus the regime's summary data.
pub fn small_divisor_profile<R: RealScalar>(
    spec: &GammaSpec<R>,
    n_max: u64,
) -> Result<SmallDivisorProfile<R>, GammaError> {
    assert!(n_max >= 1, "small_divisor_profile needs n_max >= 1");
    let regime = spec.classify()?;
    let gamma = spec.value()?;
    let mut divisors = Vec::with_capacity(n_max as usize);
    let mut resonant_indices = Vec::new();
    let mut min_divisor: Option<R> = None;
    for n in 1..=n_max {
        let d = spec.divisor_abs(n)?;
        if spec.divisor_vanishes(n) {
            resonant_indices.push(n);
        }
        min_divisor = Some(match min_divisor {
            None => d.clone(),
            Some(m) => R::min_of(m, d.clone()),
        });
        divisors.push(d);
    }
    let gamma_cap = match spec {
        GammaSpec::RootOfUnity { q, p } => {
            // |γ^k − 1| = 2 sin(πs/p) with s = kq mod p running over all
            // nonzero residues (q is coprime to p), so the maximum reciprocal
            // is attained at s = 1.
            let _ = q;
            let angle = R::pi() / R::from_i64(*p as i64);
            Some(R::one() / (R::from_i64(2) * angle.sin()))
        }
        _ => None,
    };
    let brjuno_partial = match spec {
        GammaSpec::IrrationalRotation { theta } => {
            let cf = match theta {
                Theta::Quotients(qs) => Some(ContinuedFraction::from_quotients(qs)?),
                Theta::Decimal(s) => match continued_fraction(s, PROFILE_CF_DEPTH) {
                    Ok(cf) => Some(cf),
                    Err(GammaError::PrecisionExhausted { certified, .. }) => {
                        if certified.partial_quotients().is_empty() {
                            None
                        } else {
                            Some(certified)
                        }
                    }
                    Err(e) => return Err(e),
                },
            };
            cf.map(|cf| brjuno_partial_sum(&cf, cf.partial_quotients().len() - 1))
        }
        _ => None,
    };
    Ok(SmallDivisorProfile {
        gamma,
        regime,
        divisors,
        min_divisor: min_divisor.expect("n_max >= 1"),
        resonant_indices,
        gamma_cap,
        brjuno_partial,
    })
}
