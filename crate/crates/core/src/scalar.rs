//! Scalar arithmetic layer.
//!
//! Every quantity in the solver is a complex number whose real and imaginary
//! parts live in one of two precision modes: machine doubles (`f64`) or a
//! software extended-precision float ([`BigReal`]).  The [`RealScalar`] trait
//! abstracts over the two so the series pipeline, the auxiliary-equation
//! solver and the diagnostics are written once.  Small divisors on the unit
//! circle cause catastrophic cancellation at moderate series orders, which is
//! why the extended mode (target: fifty significant digits or more) exists at
//! all.
//!
//! [`Complex`] is finite-field-free plain data; finiteness of stored values is
//! enforced where values enter or leave the pipeline (instance validation and
//! per-order solver checks), not on every elementary operation.

use std::cell::{Cell, RefCell};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

const RM: RoundingMode = RoundingMode::ToEven;

/// Real number abstraction over the two coefficient precision modes.
///
/// Implementations must behave like a subfield of the reals: the usual ring
/// operations plus square root, exponential/logarithm and the circular
/// functions needed to materialize `e^{2 pi i theta}`.
pub trait RealScalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Sized
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn from_i64(x: i64) -> Self;
    /// Best-effort conversion back to a machine double (diagnostics only).
    fn to_f64(&self) -> f64;
    /// Parse a plain decimal literal (optionally signed, optional exponent) at
    /// working precision.  Returns `None` for anything else.
    fn parse_decimal(s: &str) -> Option<Self>;
    fn sqrt(&self) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn pi() -> Self;
    fn abs(&self) -> Self;
    fn is_finite(&self) -> bool;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    /// Integer power by binary exponentiation.
    fn powi(&self, n: i32) -> Self {
        if n < 0 {
            return Self::one() / self.powi(-n);
        }
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }

    /// Ten to an integer power, exact in spirit (used for tolerances).
    fn pow10(e: i32) -> Self {
        Self::from_i64(10).powi(e)
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if a <= b {
            a
        } else {
            b
        }
    }
}

impl RealScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_i64(x: i64) -> Self {
        x as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        if !looks_like_decimal(s) {
            return None;
        }
        s.trim().parse::<f64>().ok().filter(|x| x.is_finite())
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
}

/// Syntactic pre-check for decimal literals; the underlying parsers are
/// lenient about trailing garbage, so reject anything suspicious up front.
fn looks_like_decimal(s: &str) -> bool {
    let s = s.trim();
    if s.is_empty() {
        return false;
    }
    let mut chars = s.chars().peekable();
    if matches!(chars.peek(), Some('+') | Some('-')) {
        chars.next();
    }
    let mut digits = 0usize;
    let mut dot = false;
    while let Some(c) = chars.next() {
        match c {
            '0'..='9' => digits += 1,
            '.' if !dot => dot = true,
            // The exponent part consumes the rest of the string and returns.
            'e' | 'E' if digits > 0 => {
                if matches!(chars.peek(), Some('+') | Some('-')) {
                    chars.next();
                }
                let mut exp_digits = 0usize;
                for c in chars.by_ref() {
                    if c.is_ascii_digit() {
                        exp_digits += 1;
                    } else {
                        return false;
                    }
                }
                return exp_digits > 0;
            }
            _ => return false,
        }
    }
    digits > 0
}

// ---------------------------------------------------------------------------
// Extended precision backed by astro-float.
// ---------------------------------------------------------------------------

thread_local! {
    static PRECISION_BITS: Cell<usize> = const { Cell::new(256) };
    static CONSTS: RefCell<Consts> =
        RefCell::new(Consts::new().expect("constants cache allocation"));
}

/// Set the working precision for subsequently created [`BigReal`] values on
/// this thread, expressed in significant decimal digits.
pub fn set_extended_precision_digits(digits: usize) {
    // digits * log2(10), rounded up, plus guard bits for intermediate rounding.
    let bits = digits * 3322 / 1000 + 40;
    PRECISION_BITS.with(|p| p.set(bits.max(64)));
}

/// Current working precision of the thread in bits.
pub fn extended_precision_bits() -> usize {
    PRECISION_BITS.with(|p| p.get())
}

/// Default zero-threshold for the active precision mode: `1e-12` for doubles,
/// `10^(-digits+10)` in extended mode.
pub fn default_zero_tol<R: RealScalar>(extended_digits: Option<usize>) -> R {
    match extended_digits {
        None => R::from_f64(1e-12),
        Some(d) => R::pow10(-(d as i32) + 10),
    }
}

/// Extended-precision real number.  A thin wrapper over `astro_float::BigFloat`
/// that pins the rounding mode and routes precision through a thread-local so
/// call sites stay arithmetic-shaped.
#[derive(Clone)]
pub struct BigReal(BigFloat);

impl BigReal {
    fn prec(&self) -> usize {
        self.0
            .mantissa_max_bit_len()
            .unwrap_or_else(extended_precision_bits)
    }

    fn join_prec(&self, other: &Self) -> usize {
        self.prec().max(other.prec())
    }

    pub fn inner(&self) -> &BigFloat {
        &self.0
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl Add for BigReal {
    type Output = BigReal;
    fn add(self, rhs: Self) -> Self {
        let p = self.join_prec(&rhs);
        BigReal(self.0.add(&rhs.0, p, RM))
    }
}

impl Sub for BigReal {
    type Output = BigReal;
    fn sub(self, rhs: Self) -> Self {
        let p = self.join_prec(&rhs);
        BigReal(self.0.sub(&rhs.0, p, RM))
    }
}

impl Mul for BigReal {
    type Output = BigReal;
    fn mul(self, rhs: Self) -> Self {
        let p = self.join_prec(&rhs);
        BigReal(self.0.mul(&rhs.0, p, RM))
    }
}

impl Div for BigReal {
    type Output = BigReal;
    fn div(self, rhs: Self) -> Self {
        let p = self.join_prec(&rhs);
        BigReal(self.0.div(&rhs.0, p, RM))
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> Self {
        BigReal(self.0.neg())
    }
}

impl RealScalar for BigReal {
    fn zero() -> Self {
        BigReal(BigFloat::from_i64(0, extended_precision_bits()))
    }
    fn one() -> Self {
        BigReal(BigFloat::from_i64(1, extended_precision_bits()))
    }
    fn from_f64(x: f64) -> Self {
        BigReal(BigFloat::from_f64(x, extended_precision_bits()))
    }
    fn from_i64(x: i64) -> Self {
        BigReal(BigFloat::from_i64(x, extended_precision_bits()))
    }
    fn to_f64(&self) -> f64 {
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf() {
            return if self.0.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            };
        }
        // Round-trip through the decimal printer; Rust's parser rounds
        // correctly to nearest.
        format!("{}", self.0).parse::<f64>().unwrap_or(f64::NAN)
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        if !looks_like_decimal(s) {
            return None;
        }
        let p = extended_precision_bits();
        let v = CONSTS.with(|cc| BigFloat::parse(s.trim(), Radix::Dec, p, RM, &mut cc.borrow_mut()));
        if v.is_nan() {
            None
        } else {
            Some(BigReal(v))
        }
    }
    fn sqrt(&self) -> Self {
        BigReal(self.0.sqrt(self.prec(), RM))
    }
    fn ln(&self) -> Self {
        let p = self.prec();
        BigReal(CONSTS.with(|cc| self.0.ln(p, RM, &mut cc.borrow_mut())))
    }
    fn exp(&self) -> Self {
        let p = self.prec();
        BigReal(CONSTS.with(|cc| self.0.exp(p, RM, &mut cc.borrow_mut())))
    }
    fn sin(&self) -> Self {
        let p = self.prec();
        BigReal(CONSTS.with(|cc| self.0.sin(p, RM, &mut cc.borrow_mut())))
    }
    fn cos(&self) -> Self {
        let p = self.prec();
        BigReal(CONSTS.with(|cc| self.0.cos(p, RM, &mut cc.borrow_mut())))
    }
    fn pi() -> Self {
        let p = extended_precision_bits();
        BigReal(CONSTS.with(|cc| cc.borrow_mut().pi(p, RM)))
    }
    fn abs(&self) -> Self {
        BigReal(self.0.abs())
    }
    fn is_finite(&self) -> bool {
        !self.0.is_nan() && !self.0.is_inf()
    }
}

// ---------------------------------------------------------------------------
// Complex numbers over a RealScalar.
// ---------------------------------------------------------------------------

/// Complex number with parts in `R`.  The coefficient field of every series in
/// the crate.
#[derive(Clone, Debug, PartialEq)]
pub struct Complex<R> {
    pub re: R,
    pub im: R,
}

impl<R: RealScalar> Complex<R> {
    pub fn new(re: R, im: R) -> Self {
        Complex { re, im }
    }

    pub fn zero() -> Self {
        Complex::new(R::zero(), R::zero())
    }

    pub fn one() -> Self {
        Complex::new(R::one(), R::zero())
    }

    pub fn i() -> Self {
        Complex::new(R::zero(), R::one())
    }

    pub fn from_f64s(re: f64, im: f64) -> Self {
        Complex::new(R::from_f64(re), R::from_f64(im))
    }

    pub fn real(re: R) -> Self {
        Complex::new(re, R::zero())
    }

    pub fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }

    pub fn abs_sqr(&self) -> R {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    /// Modulus, scaled to stay robust when one part dwarfs the other.
    pub fn abs(&self) -> R {
        let ar = self.re.abs();
        let ai = self.im.abs();
        let m = R::max_of(ar.clone(), ai.clone());
        if m.is_zero() {
            return R::zero();
        }
        let x = ar / m.clone();
        let y = ai / m.clone();
        m * (x.clone() * x + y.clone() * y).sqrt()
    }

    pub fn scale(&self, s: &R) -> Self {
        Complex::new(self.re.clone() * s.clone(), self.im.clone() * s.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Integer power by binary exponentiation.
    pub fn powu(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Complex::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn recip(&self) -> Self {
        &Complex::one() / self
    }

    /// Principal square root via the stable half-angle construction.
    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return Complex::zero();
        }
        let m = self.abs();
        let two = R::from_i64(2);
        if self.re >= R::zero() {
            let w = ((m + self.re.clone()) / two.clone()).sqrt();
            let v = self.im.clone() / (two * w.clone());
            Complex::new(w, v)
        } else {
            let t = ((m - self.re.clone()) / two.clone()).sqrt();
            let w = self.im.abs() / (two * t.clone());
            let v = if self.im >= R::zero() { t } else { -t };
            Complex::new(w, v)
        }
    }
}

impl<'a, 'b, R: RealScalar> Add<&'b Complex<R>> for &'a Complex<R> {
    type Output = Complex<R>;
    fn add(self, rhs: &'b Complex<R>) -> Complex<R> {
        Complex::new(
            self.re.clone() + rhs.re.clone(),
            self.im.clone() + rhs.im.clone(),
        )
    }
}

impl<'a, 'b, R: RealScalar> Sub<&'b Complex<R>> for &'a Complex<R> {
    type Output = Complex<R>;
    fn sub(self, rhs: &'b Complex<R>) -> Complex<R> {
        Complex::new(
            self.re.clone() - rhs.re.clone(),
            self.im.clone() - rhs.im.clone(),
        )
    }
}

impl<'a, 'b, R: RealScalar> Mul<&'b Complex<R>> for &'a Complex<R> {
    type Output = Complex<R>;
    fn mul(self, rhs: &'b Complex<R>) -> Complex<R> {
        Complex::new(
            self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone(),
            self.re.clone() * rhs.im.clone() + self.im.clone() * rhs.re.clone(),
        )
    }
}

/// Smith's algorithm: avoids overflow of `|rhs|^2` and stays generic (needs
/// only comparisons and division).
impl<'a, 'b, R: RealScalar> Div<&'b Complex<R>> for &'a Complex<R> {
    type Output = Complex<R>;
    fn div(self, rhs: &'b Complex<R>) -> Complex<R> {
        if rhs.re.abs() >= rhs.im.abs() {
            let t = rhs.im.clone() / rhs.re.clone();
            let den = rhs.re.clone() + rhs.im.clone() * t.clone();
            Complex::new(
                (self.re.clone() + self.im.clone() * t.clone()) / den.clone(),
                (self.im.clone() - self.re.clone() * t) / den,
            )
        } else {
            let t = rhs.re.clone() / rhs.im.clone();
            let den = rhs.re.clone() * t.clone() + rhs.im.clone();
            Complex::new(
                (self.re.clone() * t.clone() + self.im.clone()) / den.clone(),
                (self.im.clone() * t - self.re.clone()) / den,
            )
        }
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl<R: RealScalar> $trait<Complex<R>> for Complex<R> {
            type Output = Complex<R>;
            fn $method(self, rhs: Complex<R>) -> Complex<R> {
                (&self).$method(&rhs)
            }
        }
        impl<'a, R: RealScalar> $trait<&'a Complex<R>> for Complex<R> {
            type Output = Complex<R>;
            fn $method(self, rhs: &'a Complex<R>) -> Complex<R> {
                (&self).$method(rhs)
            }
        }
        impl<'a, R: RealScalar> $trait<Complex<R>> for &'a Complex<R> {
            type Output = Complex<R>;
            fn $method(self, rhs: Complex<R>) -> Complex<R> {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);
forward_owned_binop!(Div, div);

impl<R: RealScalar> Neg for Complex<R> {
    type Output = Complex<R>;
    fn neg(self) -> Complex<R> {
        Complex::new(-self.re, -self.im)
    }
}

impl<'a, R: RealScalar> Neg for &'a Complex<R> {
    type Output = Complex<R>;
    fn neg(self) -> Complex<R> {
        Complex::new(-self.re.clone(), -self.im.clone())
    }
}

impl<R: RealScalar> fmt::Display for Complex<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.re, self.im)
    }
}
