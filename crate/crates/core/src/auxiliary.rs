//! Order-by-order construction of the auxiliary-equation solution.
//!
//! The delay equation `a₂x″ + a₁x′ + a₀x = x(p(z) + b·x′(z)) + h(z)` is
//! attacked through an auxiliary unknown `g` that conjugates the delay map to
//! the rotation `z ↦ γz`.  In integral form the auxiliary equation reads
//!
//! ```text
//! a₂γ·g′(γz) = g′(z)·[ a₂γ + ∫₀^z F(s) ds ]
//! F(s) = (g(γ²s) − p(g(γs)))·γ·g′(γs)
//!        + (a₂·p″(g(s)) + a₁·p′(g(s)) + a₀·p(g(s)))·g′(s)
//!        − a₁γ·g′(γs) − a₀·g(γs)·g′(s) + b·h′(g(s))·g′(s)
//! ```
//!
//! with `g(0) = 0`, `g′(0) = η`.  Writing `g = Σ c_n zⁿ` and comparing the
//! coefficient of `z^{n+1}` gives a triangular system: the unknown `c_{n+2}`
//! enters linearly with factor `(n+2)·a₂γ·(γ^{n+1} − 1)`, and everything else
//! — call it `Θ(n,γ)` — involves only `c_1..c_{n+1}`.  [`solve_g`] therefore
//! evaluates the whole defect with the unknown zeroed (through the series
//! pipeline, cost polynomial in the order) and divides by the known factor.
//!
//! When γ is a p-th root of unity the divisor vanishes *exactly* at every
//! index `n = vp − 1`; solvability requires `Θ(n,γ) = 0` there, and the
//! matching coefficient `c_{vp+1}` becomes a free choice.  The literal
//! nested-sum form of `Θ` (thirteen summation groups over compositions
//! `l₁+⋯+l_m = k−i+1`) is implemented in [`theta_resonance_literal`] as an
//! independent oracle; it costs `O(2ⁿ)` and is capped at small `n`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::gamma::{GammaError, GammaSpec, Regime};
use crate::scalar::{default_zero_tol, Complex, RealScalar};
use crate::series::{Series, SeriesError};

/// Largest index accepted by the exponential-cost literal Θ oracle.
pub const THETA_ORACLE_CAP: usize = 8;

/// Errors from the auxiliary-equation solver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    /// A root-of-unity resonance is obstructed: the divisor vanishes exactly
    /// but the numerator does not, so no analytic solution exists.
    #[error(
        "no analytic solution: resonance at index n = {n} (occurrence v = {v}) has |Theta(n)| = {theta_abs:e} above the zero tolerance"
    )]
    NoAnalyticSolution { n: usize, v: u64, theta_abs: f64 },
    /// γ = 1 (or another degeneracy) makes the closed-form denominators vanish.
    #[error("degenerate gamma: {0}")]
    DegenerateGamma(String),
    /// The instance violates its invariants.
    #[error("invalid problem instance: {0}")]
    InvalidInstance(String),
    /// A non-finite value appeared while computing the given coefficient.
    #[error("numeric failure: non-finite value at coefficient index {index}")]
    NonFinite { index: usize },
    /// The literal oracle's exponential enumeration was refused.
    #[error("literal Theta oracle limited to n <= {cap}, got n = {n}")]
    OracleTooLarge { n: usize, cap: usize },
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Complete description of one solve: equation constants, delay data, the
/// eigenvalue regime, the seed derivative η, and numeric policy.
#[derive(Clone, Debug)]
pub struct ProblemInstance<R> {
    pub a0: Complex<R>,
    pub a1: Complex<R>,
    pub a2: Complex<R>,
    pub b: Complex<R>,
    /// Delay shift p(z); must be known through `order` (polynomial data is
    /// zero-extended, which is exact).
    pub p_series: Series<R>,
    /// Forcing term h(z); same order requirement as `p_series`.
    pub h_series: Series<R>,
    pub gamma: GammaSpec<R>,
    /// Seed derivative g′(0) = η.  Zero is allowed and produces the trivial
    /// solution g ≡ 0, flagged on the output.
    pub eta: Complex<R>,
    /// Truncation order N of the computed g.
    pub order: usize,
    /// Significant decimal digits of the extended mode, if active; `None`
    /// means machine doubles.  Informational (drives default tolerances).
    pub precision_digits: Option<usize>,
    /// Threshold below which a resonance numerator |Θ| counts as zero.
    pub zero_tol: R,
    /// Conditioning threshold: non-resonant divisors below it are reported.
    pub divisor_warn_tol: R,
    /// Values for the free coefficients `c_{vp+1}` at resonances, keyed by
    /// the occurrence count v; absent entries default to zero.
    pub free_coeffs: BTreeMap<u64, Complex<R>>,
}

impl<R: RealScalar> ProblemInstance<R> {
    /// Assemble an instance with default numeric policy.  `p` and `h` are
    /// zero-extended through `order`: the tail coefficients of polynomial
    /// data are exactly zero, so the extension is knowledge, not a guess.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a0: Complex<R>,
        a1: Complex<R>,
        a2: Complex<R>,
        b: Complex<R>,
        p_series: Series<R>,
        h_series: Series<R>,
        gamma: GammaSpec<R>,
        eta: Complex<R>,
        order: usize,
        precision_digits: Option<usize>,
    ) -> Self {
        ProblemInstance {
            a0,
            a1,
            a2,
            b,
            p_series: p_series.zero_extended(order),
            h_series: h_series.zero_extended(order),
            gamma,
            eta,
            order,
            precision_digits,
            zero_tol: default_zero_tol::<R>(precision_digits),
            divisor_warn_tol: R::from_f64(1e-8),
            free_coeffs: BTreeMap::new(),
        }
    }

    /// Check the structural invariants every operation relies on.
    pub fn validate(&self) -> Result<(), SolveError> {
        let bad = |msg: &str| Err(SolveError::InvalidInstance(msg.to_string()));
        for (name, v) in [
            ("a0", &self.a0),
            ("a1", &self.a1),
            ("a2", &self.a2),
            ("b", &self.b),
            ("eta", &self.eta),
        ] {
            if !v.is_finite() {
                return bad(&format!("{name} is not finite"));
            }
        }
        if self.a2.is_zero() {
            return bad("a2 must be nonzero (it divides every coefficient)");
        }
        if self.b.is_zero() {
            return bad("b must be nonzero (the delay substitution divides by b)");
        }
        if self.order < 2 {
            return bad("order must be at least 2");
        }
        if self.p_series.order() < self.order || self.h_series.order() < self.order {
            return bad("p and h must be known through the requested order");
        }
        if !self.p_series.is_finite() || !self.h_series.is_finite() {
            return bad("p and h coefficients must be finite");
        }
        if !(self.zero_tol > R::zero()) {
            return bad("zero_tol must be positive");
        }
        self.gamma.validate()?;
        Ok(())
    }
}

/// What was done at one exactly-resonant index.
#[derive(Clone, Debug)]
pub struct ResonanceEvent<R> {
    /// Resonance index n = vp − 1 (the divisor `γ^{n+1} − 1` vanishes).
    pub n: usize,
    /// Occurrence count v ≥ 1.
    pub v: u64,
    /// |Θ(n,γ)| — must be (numerically) zero for the solve to continue.
    pub theta_abs: R,
    /// The free value assigned to `c_{vp+1}`.
    pub assigned: Complex<R>,
}

/// A non-resonant step whose divisor was dangerously small.
#[derive(Clone, Debug)]
pub struct DivisorWarning<R> {
    /// Power m = n+1 with `|γ^m − 1|` below the warning threshold.
    pub power: usize,
    pub divisor_abs: R,
}

/// Output of [`solve_g`]: the series plus the audit trail of the resonance
/// and conditioning decisions taken along the way.
#[derive(Clone, Debug)]
pub struct AuxiliarySolution<R> {
    /// g through the instance order, with `c₀ = 0` and `c₁ = η` exactly.
    pub g: Series<R>,
    pub regime: Regime,
    pub resonance_log: Vec<ResonanceEvent<R>>,
    pub divisor_warnings: Vec<DivisorWarning<R>>,
    /// Set when η = 0 forced the trivial solution g ≡ 0.
    pub trivial: bool,
    /// Resonance occurrences v whose compatibility condition was verified
    /// (root-of-unity regime); nothing is claimed beyond the computed order.
    pub verified_resonances: Vec<u64>,
}

/// The closed form of the first nontrivial coefficient,
/// `c₂ = (p₀a₀ + p₁a₁ + 2p₂a₂ + bh₁ − p₀γ − a₁γ)·η² / (2a₂γ(γ−1))`.
pub fn c2_closed_form<R: RealScalar>(inst: &ProblemInstance<R>) -> Result<Complex<R>, SolveError> {
    inst.validate()?;
    let gamma = inst.gamma.value()?;
    let one = Complex::one();
    let gm1 = &gamma - &one;
    if gm1.is_zero() {
        return Err(SolveError::DegenerateGamma(
            "gamma = 1 makes the c2 denominator vanish".into(),
        ));
    }
    let p0 = inst.p_series.coeff(0);
    let p1 = inst.p_series.coeff(1);
    let p2 = inst.p_series.coeff(2);
    let h1 = inst.h_series.coeff(1);
    let two = Complex::from_f64s(2.0, 0.0);
    let numerator = &(&(&(&(&(&p0 * &inst.a0) + &(&p1 * &inst.a1)) + &(&(&two * &p2) * &inst.a2))
        + &(&inst.b * &h1))
        - &(&p0 * &gamma))
        - &(&inst.a1 * &gamma);
    let denominator = &(&(&two * &inst.a2) * &gamma) * &gm1;
    let eta_sq = &inst.eta * &inst.eta;
    Ok(&(&numerator * &eta_sq) / &denominator)
}

/// Evaluate the full defect of the integral-form auxiliary equation for a
/// partial sum of g:
///
/// `E(g) = g′(z)·[a₂γ + ∫₀^z F(s) ds] − a₂γ·g′(γz)`.
///
/// With g claimed through order m, the result is determined through order
/// m−1.  Feeding a partial sum whose top coefficient `c_{n+2}` is a zero
/// placeholder makes coefficient n+1 of the result exactly the resonance
/// numerator Θ(n,γ); feeding a fully solved g makes every coefficient a
/// residual that should vanish.
pub fn rhs_accumulate<R: RealScalar>(
    g_partial: &Series<R>,
    inst: &ProblemInstance<R>,
) -> Result<Series<R>, SolveError> {
    let gamma = inst.gamma.value()?;
    let gamma_sq = &gamma * &gamma;
    let a2_gamma = &inst.a2 * &gamma;

    let gp = g_partial.differentiate();
    let g_dil = g_partial.dilate(&gamma); // g(γs)
    let g_dil2 = g_partial.dilate(&gamma_sq); // g(γ²s)
    let gp_dil = gp.dilate(&gamma); // g′(γs)

    let p1 = inst.p_series.differentiate();
    let p2 = p1.differentiate();
    let h1 = inst.h_series.differentiate();

    // F(s), term by term.
    let f_shift = g_dil2
        .sub(&inst.p_series.compose(&g_dil)?)
        .mul(&gp_dil.scale(&gamma));
    let f_poly = p2
        .compose(g_partial)?
        .scale(&inst.a2)
        .add(&p1.compose(g_partial)?.scale(&inst.a1))
        .add(&inst.p_series.compose(g_partial)?.scale(&inst.a0))
        .mul(&gp);
    let f_rot = gp_dil.scale(&(&inst.a1 * &gamma));
    let f_damp = g_dil.mul(&gp).scale(&inst.a0);
    let f_force = h1.compose(g_partial)?.mul(&gp).scale(&inst.b);
    let f = f_shift.add(&f_poly).sub(&f_rot).sub(&f_damp).add(&f_force);

    let bracket = f
        .integrate()
        .add(&Series::constant(a2_gamma.clone(), f.order() + 1));
    Ok(gp.mul(&bracket).sub(&gp.dilate(&gamma).scale(&a2_gamma)))
}

/// Residual of the integral-form auxiliary equation for a solved g; all
/// coefficients (through order of g minus one) should be numerically zero.
pub fn defect_integral_form<R: RealScalar>(
    g: &Series<R>,
    inst: &ProblemInstance<R>,
) -> Result<Series<R>, SolveError> {
    rhs_accumulate(g, inst)
}

/// Residual of the differentiated auxiliary equation
///
/// `a₂γ²·g″(γz)·g′(z) = [g(γ²z) − p(g(γz))]·γ·g′(γz)·g′(z)²
///   + b·h′(g)·g′³ + (a₂p″(g) + a₁p′(g) + a₀p(g))·g′³
///   − a₁γ·g′(γz)·g′² − a₀·g(γz)·g′³ + a₂γ·g′(γz)·g″(z)`
///
/// determined through order of g minus two.  This is an independent check:
/// the solver works from the integral form, never from this one.
pub fn defect_differential_form<R: RealScalar>(
    g: &Series<R>,
    inst: &ProblemInstance<R>,
) -> Result<Series<R>, SolveError> {
    let gamma = inst.gamma.value()?;
    let gamma_sq = &gamma * &gamma;

    let gp = g.differentiate();
    let gpp = gp.differentiate();
    let g_dil = g.dilate(&gamma);
    let g_dil2 = g.dilate(&gamma_sq);
    let gp_dil = gp.dilate(&gamma);
    let gpp_dil = gpp.dilate(&gamma);

    let p1 = inst.p_series.differentiate();
    let p2 = p1.differentiate();
    let h1 = inst.h_series.differentiate();

    let gp2 = gp.mul(&gp);
    let gp3 = gp2.mul(&gp);

    let lhs = gpp_dil.mul(&gp).scale(&(&inst.a2 * &gamma_sq));
    let rhs = g_dil2
        .sub(&inst.p_series.compose(&g_dil)?)
        .mul(&gp_dil)
        .mul(&gp2)
        .scale(&gamma)
        .add(&h1.compose(g)?.mul(&gp3).scale(&inst.b))
        .add(
            &p2.compose(g)?
                .scale(&inst.a2)
                .add(&p1.compose(g)?.scale(&inst.a1))
                .add(&inst.p_series.compose(g)?.scale(&inst.a0))
                .mul(&gp3),
        )
        .sub(&gp_dil.mul(&gp2).scale(&(&inst.a1 * &gamma)))
        .sub(&g_dil.mul(&gp3).scale(&inst.a0))
        .add(&gp_dil.mul(&gpp).scale(&(&inst.a2 * &gamma)));
    Ok(lhs.sub(&rhs))
}

/// Construct g order by order.
///
/// `c₁ = η` and `c₂` comes from its closed form; each later coefficient is
/// `c_{n+2} = Θ(n,γ) / ((n+2)·a₂γ·(γ^{n+1} − 1))` where Θ is read off the
/// defect of the integral form with the unknown zeroed.  Root-of-unity
/// resonances (`γ^{n+1} = 1` exactly, decided in integer arithmetic) instead
/// require `|Θ| ≤ zero_tol` and assign the configured free coefficient.
pub fn solve_g<R: RealScalar>(
    inst: &ProblemInstance<R>,
) -> Result<AuxiliarySolution<R>, SolveError> {
    inst.validate()?;
    let regime = inst.gamma.classify()?;
    let n_target = inst.order;

    if inst.eta.is_zero() {
        return Ok(AuxiliarySolution {
            g: Series::zero(n_target),
            regime,
            resonance_log: Vec::new(),
            divisor_warnings: Vec::new(),
            trivial: true,
            verified_resonances: Vec::new(),
        });
    }

    let gamma = inst.gamma.value()?;
    let a2_gamma = &inst.a2 * &gamma;
    let mut coeffs = vec![Complex::zero(), inst.eta.clone()];
    coeffs.push(c2_closed_form(inst)?);
    if !coeffs[2].is_finite() {
        return Err(SolveError::NonFinite { index: 2 });
    }

    let mut resonance_log = Vec::new();
    let mut divisor_warnings = Vec::new();
    let mut verified_resonances = Vec::new();

    for n in 1..=n_target.saturating_sub(2) {
        let index = n + 2;
        let g_partial = Series::new(coeffs.clone()).zero_extended(index);
        let defect = rhs_accumulate(&g_partial, inst)?;
        let theta = defect.coeff(n + 1);
        if !theta.is_finite() {
            return Err(SolveError::NonFinite { index });
        }

        let power = (n + 1) as u64;
        let c_next = if inst.gamma.divisor_vanishes(power) {
            let p = inst.gamma.root_period().expect("vanishing divisor implies root of unity");
            let v = power / p;
            let theta_abs = theta.abs();
            if theta_abs > inst.zero_tol {
                return Err(SolveError::NoAnalyticSolution {
                    n,
                    v,
                    theta_abs: theta_abs.to_f64(),
                });
            }
            let assigned = inst
                .free_coeffs
                .get(&v)
                .cloned()
                .unwrap_or_else(Complex::zero);
            resonance_log.push(ResonanceEvent {
                n,
                v,
                theta_abs,
                assigned: assigned.clone(),
            });
            verified_resonances.push(v);
            assigned
        } else {
            let divisor = &inst.gamma.power(power)? - &Complex::one();
            let divisor_abs = divisor.abs();
            if divisor_abs < inst.divisor_warn_tol {
                divisor_warnings.push(DivisorWarning {
                    power: power as usize,
                    divisor_abs,
                });
            }
            let denom = (&a2_gamma * &divisor).scale(&R::from_i64(index as i64));
            &theta / &denom
        };
        if !c_next.is_finite() {
            return Err(SolveError::NonFinite { index });
        }
        coeffs.push(c_next);
    }

    Ok(AuxiliarySolution {
        g: Series::new(coeffs),
        regime,
        resonance_log,
        divisor_warnings,
        trivial: false,
        verified_resonances,
    })
}

/// Sum over all compositions `l₁ + ⋯ + l_m = j` (parts ≥ 1, every m) of
/// `weight(m) · c_{l₁} ⋯ c_{l_m}`.  Exponential in j; oracle use only.
fn composition_sum<R: RealScalar>(
    j: usize,
    c: &[Complex<R>],
    weight: &dyn Fn(usize) -> Complex<R>,
) -> Complex<R> {
    fn recurse<R: RealScalar>(
        remaining: usize,
        parts: usize,
        product: &Complex<R>,
        c: &[Complex<R>],
        weight: &dyn Fn(usize) -> Complex<R>,
        acc: &mut Complex<R>,
    ) {
        if remaining == 0 {
            *acc = &*acc + &(product * &weight(parts));
            return;
        }
        for l in 1..=remaining {
            recurse(remaining - l, parts + 1, &(product * &c[l - 1]), c, weight, acc);
        }
    }
    let mut acc = Complex::zero();
    recurse(j, 0, &Complex::one(), c, weight, &mut acc);
    acc
}

/// The resonance numerator Θ(n,γ) evaluated from its literal nested-sum form
/// (thirteen summation groups, with the inner partition sums enumerated
/// composition by composition).  `coeffs` supplies `c₁..c_{n+1}`.  This is a
/// test oracle: cost grows exponentially, so n is capped.
pub fn theta_resonance_literal<R: RealScalar>(
    n: usize,
    inst: &ProblemInstance<R>,
    coeffs: &[Complex<R>],
) -> Result<Complex<R>, SolveError> {
    if n > THETA_ORACLE_CAP {
        return Err(SolveError::OracleTooLarge {
            n,
            cap: THETA_ORACLE_CAP,
        });
    }
    assert!(n >= 1, "Theta(n) is defined for n >= 1");
    assert!(
        coeffs.len() >= n + 1,
        "need c1..c{} but got {} coefficients",
        n + 1,
        coeffs.len()
    );
    let gamma = inst.gamma.value()?;
    let c = |idx: usize| coeffs[idx - 1].clone();
    let p = &inst.p_series;
    let h = &inst.h_series;
    let p0 = p.coeff(0);
    let p1 = p.coeff(1);
    let p2 = p.coeff(2);
    let h1 = h.coeff(1);
    let int = |k: usize| Complex::<R>::from_f64s(k as f64, 0.0);

    let mut theta = Complex::zero();

    // Pairwise groups: Σ_{k=1}^{n+1} k·c_k·c_{n−k+2}·W_k with
    // W_k = 2p₂a₂ + p₁a₁ + p₀a₀ + b·h₁ − (p₀ + a₁)·γ^{n−k+2}.
    let w_const = &(&(&(&int(2) * &p2) * &inst.a2) + &(&p1 * &inst.a1))
        + &(&(&p0 * &inst.a0) + &(&inst.b * &h1));
    for k in 1..=n + 1 {
        let base = (&c(k) * &c(n + 2 - k)).scale(&R::from_i64(k as i64));
        let rot = (&p0 + &inst.a1) * gamma.powu((n + 2 - k) as u64);
        theta = &theta + &(&base * &(&w_const - &rot));
    }

    for k in 1..=n {
        for i in 1..=k {
            let frac = R::from_i64((i * (n - k + 1)) as i64) / R::from_i64((k + 1) as i64);
            let j = k - i + 1;

            // Triple-product groups: γ^{2k−i+2}·c_i·c_{k−i+1}·c_{n−k+1} and
            // −a₀·γ^{k−i+1}·c_i·c_{k−i+1}·c_{n−k+1}.
            let triple = (&(&c(i) * &c(k - i + 1)) * &c(n - k + 1)).scale(&frac);
            let w_triple =
                &gamma.powu((2 * k - i + 2) as u64) - &(&inst.a0 * &gamma.powu(j as u64));
            theta = &theta + &(&triple * &w_triple);

            // Partition groups over compositions of j = k−i+1:
            //   −γ^{k+1}·Σ p_m·c_{l₁}⋯   + a₂·Σ (m+2)(m+1)p_{m+2}·c_{l₁}⋯
            //   + a₁·Σ (m+1)p_{m+1}·c_{l₁}⋯ + a₀·Σ p_m·c_{l₁}⋯
            //   + b·Σ (m+1)h_{m+1}·c_{l₁}⋯
            let ps_p = composition_sum(j, coeffs, &|m| p.coeff(m));
            let ps_p2 = composition_sum(j, coeffs, &|m| {
                p.coeff(m + 2).scale(&R::from_i64(((m + 2) * (m + 1)) as i64))
            });
            let ps_p1 = composition_sum(j, coeffs, &|m| {
                p.coeff(m + 1).scale(&R::from_i64((m + 1) as i64))
            });
            let ps_h1 = composition_sum(j, coeffs, &|m| {
                h.coeff(m + 1).scale(&R::from_i64((m + 1) as i64))
            });
            let w_partition = &(&(&(&inst.a2 * &ps_p2) + &(&inst.a1 * &ps_p1))
                + &(&(&inst.a0 * &ps_p) + &(&inst.b * &ps_h1)))
                - &(&gamma.powu((k + 1) as u64) * &ps_p);
            let pair = (&c(i) * &c(n - k + 1)).scale(&frac);
            theta = &theta + &(&pair * &w_partition);
        }
    }
    Ok(theta)
}

/// The solver-implied numerator `Θ(n,γ) = (n+2)·a₂γ·(γ^{n+1} − 1)·c_{n+2}`,
/// reconstructed from a solved series; the cross-check partner of
/// [`theta_resonance_literal`].
pub fn theta_from_solution<R: RealScalar>(
    n: usize,
    inst: &ProblemInstance<R>,
    g: &Series<R>,
) -> Result<Complex<R>, SolveError> {
    let gamma = inst.gamma.value()?;
    let divisor = &inst.gamma.power((n + 1) as u64)? - &Complex::one();
    let factor = (&(&inst.a2 * &gamma) * &divisor).scale(&R::from_i64((n + 2) as i64));
    Ok(&factor * &g.coeff(n + 2))
}
