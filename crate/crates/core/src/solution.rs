//! Assembly of the delay-equation solution from the auxiliary series.
//!
//! With g solving the auxiliary equation, `y(z) = g(γ·g⁻¹(z))` solves the
//! transformed equation obtained by eliminating x:
//!
//! ```text
//! a₂(y″−p″) + a₁(y′−p′) + a₀(y−p) = (y(y(z)) − p(y(z)))·y′(z) + b·h′(z),
//! ```
//!
//! and the substitution `y = p + b·x′` is then undone by one integration:
//! `x(z) = x(0) + (1/b)·∫₀^z (y(s) − p(s)) ds`, with `x(0)` pinned by the
//! closed form `(a₀p₀ − a₂(γ−p₁) + b·h₀)/(b(a₀−1))`.
//!
//! Nothing here is trusted without a check: the bundle carries the residuals
//! of the original delay equation, of the transformed y-equation, of the
//! substitution identity, and of both forms of the auxiliary equation, each
//! evaluated through the order the truncated data actually determines.

use thiserror::Error;

use crate::auxiliary::{
    defect_differential_form, defect_integral_form, solve_g, AuxiliarySolution, ProblemInstance,
    SolveError,
};
use crate::gamma::GammaError;
use crate::scalar::{Complex, RealScalar};
use crate::series::{Series, SeriesError};

/// Errors from solution assembly and residual verification.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuildError {
    /// The x(0) closed form divides by a₀ − 1.
    #[error("x(0) closed form is singular at a0 = 1; x(0) must be supplied externally")]
    DegenerateA0,
    /// A verification composition would sit at a nonzero base point: the
    /// inner series' constant term exceeds the zero tolerance, and truncated
    /// composition at a shifted base point is not meaningful termwise.
    #[error("delay argument has constant term of magnitude {abs:e}; expected zero (within tolerance)")]
    InnerConstantNonzero { abs: f64 },
    /// η = 0 produced the trivial auxiliary solution g ≡ 0, which does not
    /// induce a solution of the delay equation.
    #[error("trivial auxiliary solution (eta = 0) does not induce a delay-equation solution")]
    TrivialAuxiliary,
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
}

/// Maximum residual coefficient magnitudes, each over the order range the
/// truncation determines (N = order of g).
#[derive(Clone, Debug)]
pub struct ResidualReport<R> {
    /// Original delay equation `a₂x″+a₁x′+a₀x − x∘(p+bx′) − h`, through N−3.
    pub fde_defect: R,
    /// Transformed y-equation, through N−3.
    pub y_equation_defect: R,
    /// Substitution identity `p + b·x′ − y`, through N−1.
    pub delay_closure_defect: R,
    /// Integral form of the auxiliary equation, through N−1.
    pub aux_integral_defect: R,
    /// Differentiated form of the auxiliary equation, through N−2.
    pub aux_differential_defect: R,
}

/// Everything produced by one end-to-end solve.
#[derive(Clone, Debug)]
pub struct SolutionBundle<R> {
    /// Auxiliary solution (g plus its resonance/conditioning audit trail).
    pub aux: AuxiliarySolution<R>,
    pub g_inverse: Series<R>,
    /// `y = g(γ·g⁻¹(z))`; y₀ = 0 exactly, y₁ = γ up to rounding.
    pub y: Series<R>,
    /// The delay-equation solution, one order longer than y (integration).
    pub x: Series<R>,
    pub x0: Complex<R>,
    pub residuals: ResidualReport<R>,
}

impl<R: RealScalar> SolutionBundle<R> {
    pub fn g(&self) -> &Series<R> {
        &self.aux.g
    }
}

/// Conjugate the rotation by g: `y = (g ∘ γ·) ∘ g⁻¹`, truncated at the order
/// of g.  Requires `g(0) = 0` and `g′(0) ≠ 0`.
pub fn build_y<R: RealScalar>(g: &Series<R>, gamma: &Complex<R>) -> Result<Series<R>, SeriesError> {
    let g_inverse = g.invert()?;
    g.dilate(gamma).compose(&g_inverse)
}

/// Closed form of the solution value at the origin.
///
/// The constant coefficient of the equation reads
/// `2a₂x₂ + a₁x₁ + a₀x₀ = x₀ + h₀` (the deviated argument vanishes at 0), and
/// substituting `x₁ = −p₀/b`, `2x₂ = (γ−p₁)/b` gives the unique value
///
/// ```text
/// x(0) = (a₁p₀ − a₂(γ − p₁) + b·h₀) / (b(a₀ − 1)).
/// ```
///
/// Note the `a₁p₀` term: it is the `a₁·x′(0)` contribution, the analogue of
/// the `a₀p₀ = −a₀x₁·b` term appearing one order up in the x‴(0) form.
pub fn x0_closed_form<R: RealScalar>(inst: &ProblemInstance<R>) -> Result<Complex<R>, BuildError> {
    let a0m1 = &inst.a0 - &Complex::one();
    if a0m1.is_zero() {
        return Err(BuildError::DegenerateA0);
    }
    let gamma = inst.gamma.value()?;
    let p0 = inst.p_series.coeff(0);
    let p1 = inst.p_series.coeff(1);
    let h0 = inst.h_series.coeff(0);
    let numerator = &(&(&inst.a1 * &p0) - &(&inst.a2 * &(&gamma - &p1))) + &(&inst.b * &h0);
    Ok(&numerator / &(&inst.b * &a0m1))
}

/// Undo the substitution: `x = x0 + (1/b)·∫₀^z (y − p)`.  The result is one
/// order longer than y.
pub fn build_x<R: RealScalar>(
    y: &Series<R>,
    inst: &ProblemInstance<R>,
    x0: &Complex<R>,
) -> Series<R> {
    let b_inv = inst.b.recip();
    let integral = y.sub(&inst.p_series).scale(&b_inv).integrate();
    let order = integral.order();
    integral.add(&Series::constant(x0.clone(), order))
}

/// The first four solution coefficients from their closed forms:
/// `x₀` as in [`x0_closed_form`], `x₁ = −p₀/b`, `x₂ = (γ−p₁)/(2b)`,
/// `x₃ = (a₀p₀ − p₀γ − a₁(γ−p₁) + b·h₁)/(6·b·a₂)`.
pub fn leading_x_closed_forms<R: RealScalar>(
    inst: &ProblemInstance<R>,
) -> Result<[Complex<R>; 4], BuildError> {
    let gamma = inst.gamma.value()?;
    let p0 = inst.p_series.coeff(0);
    let p1 = inst.p_series.coeff(1);
    let h1 = inst.h_series.coeff(1);
    let x0 = x0_closed_form(inst)?;
    let x1 = &(-&p0) / &inst.b;
    let gm_p1 = &gamma - &p1;
    let x2 = &gm_p1 / &inst.b.scale(&R::from_i64(2));
    let x3_num = &(&(&(&inst.a0 * &p0) - &(&p0 * &gamma)) - &(&inst.a1 * &gm_p1))
        + &(&inst.b * &h1);
    let x3 = &x3_num / &(&inst.b.scale(&R::from_i64(6)) * &inst.a2);
    Ok([x0, x1, x2, x3])
}

/// Residual of the substitution identity `p + b·x′ = y`.
pub fn residual_delay_closure<R: RealScalar>(
    x: &Series<R>,
    y: &Series<R>,
    inst: &ProblemInstance<R>,
) -> Series<R> {
    inst.p_series
        .add(&x.differentiate().scale(&inst.b))
        .sub(y)
}

/// Residual of the transformed y-equation
/// `a₂(y″−p″) + a₁(y′−p′) + a₀(y−p) − (y∘y − p∘y)·y′ − b·h′`.
pub fn residual_y_equation<R: RealScalar>(
    y: &Series<R>,
    inst: &ProblemInstance<R>,
) -> Result<Series<R>, BuildError> {
    let p = &inst.p_series;
    let yp = y.differentiate();
    let lhs = y
        .differentiate()
        .differentiate()
        .sub(&p.differentiate().differentiate())
        .scale(&inst.a2)
        .add(&yp.sub(&p.differentiate()).scale(&inst.a1))
        .add(&y.sub(p).scale(&inst.a0));
    let rhs = y
        .compose(y)?
        .sub(&p.compose(y)?)
        .mul(&yp)
        .add(&inst.h_series.differentiate().scale(&inst.b));
    Ok(lhs.sub(&rhs))
}

/// Residual of the original delay equation
/// `a₂x″ + a₁x′ + a₀x − x(p + b·x′) − h`.
///
/// The delay argument `w = p + b·x′` must vanish at 0 for the truncated
/// composition to be meaningful; a constant term within `zero_tol` (pure
/// rounding residue of the substitution) is flattened to exact zero, anything
/// larger is rejected.
pub fn residual_fde<R: RealScalar>(
    x: &Series<R>,
    inst: &ProblemInstance<R>,
) -> Result<Series<R>, BuildError> {
    let xp = x.differentiate();
    let mut w = inst.p_series.add(&xp.scale(&inst.b));
    let w0 = w.coeff(0);
    if !w0.is_zero() {
        let abs = w0.abs();
        if abs > inst.zero_tol {
            return Err(BuildError::InnerConstantNonzero { abs: abs.to_f64() });
        }
        w.set_coeff(0, Complex::zero());
    }
    let lhs = xp
        .differentiate()
        .scale(&inst.a2)
        .add(&xp.scale(&inst.a1))
        .add(&x.scale(&inst.a0));
    Ok(lhs.sub(&x.compose(&w)?).sub(&inst.h_series))
}

/// Run the full pipeline: solve the auxiliary equation, conjugate, integrate,
/// and verify every identity the construction rests on.
pub fn build_bundle<R: RealScalar>(
    inst: &ProblemInstance<R>,
) -> Result<SolutionBundle<R>, BuildError> {
    let aux = solve_g(inst)?;
    if aux.trivial {
        return Err(BuildError::TrivialAuxiliary);
    }
    let gamma = inst.gamma.value()?;
    let g_inverse = aux.g.invert()?;
    let y = aux.g.dilate(&gamma).compose(&g_inverse)?;
    let x0 = x0_closed_form(inst)?;
    let x = build_x(&y, inst, &x0);

    let n = inst.order;
    let residuals = ResidualReport {
        fde_defect: residual_fde(&x, inst)?
            .truncated(n.saturating_sub(3))
            .max_abs(),
        y_equation_defect: residual_y_equation(&y, inst)?
            .truncated(n.saturating_sub(3))
            .max_abs(),
        delay_closure_defect: residual_delay_closure(&x, &y, inst)
            .truncated(n.saturating_sub(1))
            .max_abs(),
        aux_integral_defect: defect_integral_form(&aux.g, inst)?.max_abs(),
        aux_differential_defect: defect_differential_form(&aux.g, inst)?.max_abs(),
    };

    Ok(SolutionBundle {
        aux,
        g_inverse,
        y,
        x,
        x0,
        residuals,
    })
}
