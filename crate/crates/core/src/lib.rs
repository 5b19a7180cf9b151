//! Truncated power-series solutions of a second-order functional
//! differential equation whose argument deviation depends on the state
//! derivative:
//!
//! ```text
//! a₂·x″(z) + a₁·x′(z) + a₀·x(z) = x(p(z) + b·x′(z)) + h(z).
//! ```
//!
//! The construction runs through an auxiliary conjugation: a series
//! `g` with `g(0) = 0`, `g′(0) = η ≠ 0` is sought so that
//! `y(z) = g(γ·g⁻¹(z))` linearizes the deviated argument, after which the
//! solution is recovered by integrating `x′(z) = (y(z) − p(z))/b`.  The
//! coefficients of `g` satisfy a triangular recurrence whose divisors are
//! `γⁿ − 1`, so the analysis splits by where the multiplier γ lives:
//!
//! * strictly inside the unit disk (`0 < |γ| < 1`) — divisors bounded away
//!   from zero, plain geometric estimates;
//! * on the unit circle with irrational rotation number — small divisors,
//!   quantified through continued fractions and partial Brjuno sums;
//! * at a root of unity — infinitely many exact resonances, each imposing a
//!   closed-form obstruction on the data and contributing a free parameter
//!   when it is satisfied.
//!
//! Modules: [`scalar`] (double/extended real and complex arithmetic),
//! [`series`] (truncated power-series algebra), [`gamma`] (multiplier
//! classification, continued fractions, small-divisor profiles),
//! [`auxiliary`] (the recurrence solver and its literal resonance oracle),
//! [`solution`] (assembly of x and residual verification), [`majorant`]
//! (domination sequences and convergence-radius diagnostics).

pub mod auxiliary;
pub mod gamma;
pub mod majorant;
pub mod scalar;
pub mod series;
pub mod solution;

pub use auxiliary::{
    c2_closed_form, rhs_accumulate, solve_g, theta_from_solution, theta_resonance_literal,
    AuxiliarySolution, DivisorWarning, ProblemInstance, ResonanceEvent, SolveError,
    THETA_ORACLE_CAP,
};
pub use gamma::{
    brjuno_partial_sum, continued_fraction, continued_fraction_rational, small_divisor_profile,
    ContinuedFraction, GammaError, GammaSpec, Regime, SmallDivisorProfile, Theta,
};
pub use majorant::{
    empirical_radius, implicit_equation_residual, implicit_radius, majorant_coeffs, psi,
    psi_prime, radius_report, EmpiricalFit, MajorantConfig, MajorantError, RadiusReport,
};
pub use scalar::{
    default_zero_tol, extended_precision_bits, set_extended_precision_digits, BigReal, Complex,
    RealScalar,
};
pub use series::{Series, SeriesError};
pub use solution::{
    build_bundle, build_x, build_y, leading_x_closed_forms, residual_delay_closure, residual_fde,
    residual_y_equation, x0_closed_form, BuildError, ResidualReport, SolutionBundle,
};
