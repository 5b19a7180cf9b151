//! Truncated formal power series over complex coefficients.
//!
//! A [`Series`] stores the coefficients `c_0, ..., c_N` of a power series
//! known through order `N`.  All binary operations truncate to the *minimum*
//! of the operand orders: that is the largest order through which the result
//! is actually determined by the inputs, so truncation bookkeeping is a proof
//! of correctness rather than a convention.  Derivative lowers the known order
//! by one, antiderivative raises it by one, and composition `f ∘ g` (defined
//! only when `g(0) = 0` exactly) is known through `min(ord f, ord g)`.
//!
//! Compositional inversion (series reversion) solves `f(q(z)) = z` one
//! coefficient at a time by a triangular solve: with `q` known through order
//! `n-1`, the order-`n` coefficient of `f ∘ q` is `f_1 q_n` plus terms that
//! only involve known data, so each step costs one composition at order `n`.

use thiserror::Error;

use crate::scalar::{Complex, RealScalar};

/// Errors from structurally invalid series operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    /// Composition `f ∘ g` requires `g(0) = 0` exactly; a formal power series
    /// cannot be evaluated at a nonzero constant term.
    #[error("inner series of a composition must have zero constant term")]
    NonzeroInnerConstant,
    /// Reversion requires zero constant term and a nonzero linear coefficient.
    #[error("series is not invertible under composition (need f(0) = 0 and f'(0) != 0)")]
    NotInvertible,
}

/// A power series truncated at a known order, with complex coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<R> {
    coeffs: Vec<Complex<R>>,
}

impl<R: RealScalar> Series<R> {
    /// Build from explicit coefficients `c_0, ..., c_N`.  Panics on an empty
    /// list; a series always knows at least its constant term.
    pub fn new(coeffs: Vec<Complex<R>>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least a constant term");
        Series { coeffs }
    }

    /// The zero series known through `order`.
    pub fn zero(order: usize) -> Self {
        Series {
            coeffs: vec![Complex::zero(); order + 1],
        }
    }

    /// The constant series `c` known through `order`.
    pub fn constant(c: Complex<R>, order: usize) -> Self {
        let mut coeffs = vec![Complex::zero(); order + 1];
        coeffs[0] = c;
        Series { coeffs }
    }

    /// The identity series `z` known through `order` (at least 1).
    pub fn identity(order: usize) -> Self {
        assert!(order >= 1, "identity needs order >= 1");
        let mut coeffs = vec![Complex::zero(); order + 1];
        coeffs[1] = Complex::one();
        Series { coeffs }
    }

    /// Convenience constructor from `(re, im)` pairs, mostly for tests and
    /// polynomial problem data.
    pub fn from_f64_pairs(pairs: &[(f64, f64)]) -> Self {
        assert!(!pairs.is_empty());
        Series {
            coeffs: pairs
                .iter()
                .map(|&(re, im)| Complex::from_f64s(re, im))
                .collect(),
        }
    }

    /// Highest power index through which the series is known.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `z^k`, zero-extended beyond the known order.
    pub fn coeff(&self, k: usize) -> Complex<R> {
        self.coeffs.get(k).cloned().unwrap_or_else(Complex::zero)
    }

    /// Coefficient of `z^k` if within the known order.
    pub fn get(&self, k: usize) -> Option<&Complex<R>> {
        self.coeffs.get(k)
    }

    /// Borrow all stored coefficients `c_0, ..., c_N`.
    pub fn coeffs(&self) -> &[Complex<R>] {
        &self.coeffs
    }

    /// Overwrite the coefficient of `z^k`; `k` must be within the known order.
    pub fn set_coeff(&mut self, k: usize, c: Complex<R>) {
        assert!(k < self.coeffs.len(), "coefficient index beyond known order");
        self.coeffs[k] = c;
    }

    /// Keep coefficients through `min(order, self.order())`.
    pub fn truncated(&self, order: usize) -> Self {
        let keep = (order + 1).min(self.coeffs.len());
        Series {
            coeffs: self.coeffs[..keep].to_vec(),
        }
    }

    /// Extend the *claimed* order with zero coefficients.  Used to build
    /// partial sums where higher unknowns are placeholders; callers take
    /// responsibility for the knowledge claim.
    pub fn zero_extended(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() < order + 1 {
            coeffs.push(Complex::zero());
        }
        Series { coeffs }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        Series {
            coeffs: (0..n).map(|k| &self.coeffs[k] + &rhs.coeffs[k]).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        Series {
            coeffs: (0..n).map(|k| &self.coeffs[k] - &rhs.coeffs[k]).collect(),
        }
    }

    /// Cauchy product, truncated to the minimum operand order.
    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let mut coeffs = vec![Complex::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n - i) {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        Series { coeffs }
    }

    /// Multiply every coefficient by a complex scalar.
    pub fn scale(&self, s: &Complex<R>) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// Derivative; the known order drops by one (a constant differentiates to
    /// the zero series of order 0).
    pub fn differentiate(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Series::zero(0);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.scale(&R::from_i64(k as i64)))
            .collect();
        Series { coeffs }
    }

    /// Antiderivative vanishing at the origin; the known order rises by one.
    pub fn integrate(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.scale(&(R::one() / R::from_i64((k + 1) as i64))));
        }
        Series { coeffs }
    }

    /// The dilation `z -> f(s z)`: coefficient `c_k` becomes `c_k s^k`.
    pub fn dilate(&self, s: &Complex<R>) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        let mut pow = Complex::one();
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                pow = &pow * s;
            }
            coeffs.push(c * &pow);
        }
        Series { coeffs }
    }

    /// Composition `self ∘ inner` by Horner's scheme, truncated to the
    /// minimum operand order.  Fails unless `inner(0) = 0` exactly; callers
    /// holding an inner series with a merely *small* constant term must decide
    /// for themselves whether zeroing it is sound.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        if !inner.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroInnerConstant);
        }
        let target = self.order().min(inner.order());
        let g = inner.truncated(target);
        let mut acc = Series::constant(self.coeffs[self.coeffs.len() - 1].clone(), target);
        for k in (0..self.coeffs.len() - 1).rev() {
            acc = acc.mul(&g);
            acc.coeffs[0] = &acc.coeffs[0] + &self.coeffs[k];
        }
        Ok(acc)
    }

    /// Compositional inverse: the series `q` with `self(q(z)) = z` through the
    /// known order.  Requires `self(0) = 0` and `self'(0) != 0`.
    pub fn invert(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        if self.coeffs.len() < 2 || self.coeffs[1].is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        let n = self.order();
        let f1_inv = self.coeffs[1].recip();
        let mut q = Series {
            coeffs: vec![Complex::zero(), f1_inv.clone()],
        };
        for m in 2..=n {
            // With q_m unknown, [z^m] self(q) = f_1 * q_m + known terms; the
            // target coefficient of the identity is zero for m >= 2.
            let q_ext = q.zero_extended(m);
            let comp = self
                .truncated(m)
                .compose(&q_ext)
                .expect("inner constant is zero by construction");
            let known = comp.coeff(m);
            q.coeffs.push(&(-known) * &f1_inv);
        }
        Ok(q)
    }

    /// Evaluate the truncation at a point by Horner's rule.
    pub fn evaluate(&self, z: &Complex<R>) -> Complex<R> {
        let mut acc = Complex::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + c;
        }
        acc
    }

    /// Largest coefficient modulus (diagnostic norm).
    pub fn max_abs(&self) -> R {
        let mut m = R::zero();
        for c in &self.coeffs {
            m = R::max_of(m, c.abs());
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
}
