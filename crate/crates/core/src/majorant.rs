//! Convergence diagnostics: majorant sequences and radius estimates.
//!
//! The coefficient recurrence for g is dominated, term by term, by a positive
//! recurrence built from five structural groups (one triple product, one
//! pairwise product, and three partition sums with weights `1`, `m+1`,
//! `(m+2)(m+1)`), all scaled by one constant:
//!
//! ```text
//! d_{n+2} = M·[ 2·[zⁿ⁺²]D³ + 6·[zⁿ⁺²]D² + 2·[zⁿ⁺²](D²·U)
//!               + 2·[zⁿ⁺²](D²·V) + [zⁿ⁺²](D²·W) ],   D = Σ d_j z^j,
//! ```
//!
//! where U, V, W are the compositions of the weight series `Σ zᵐ`,
//! `Σ (m+1)zᵐ`, `Σ (m+2)(m+1)zᵐ` with D — the partition sums are exactly the
//! coefficients of those compositions.  The generating function consequently
//! satisfies an implicit equation `T(z, D(z)) = 0` whose closed form is
//!
//! ```text
//! T(z,D) = D − |η|z − d₂z² − M·[ 2D³ + 6D² − 6|η|²z²
//!          + 2D³/(1−D) + 2(2−D)D³/(1−D)² + 2D³(3−3D+D²)/(1−D)³ ],
//! ```
//!
//! and the radius of the majorant series is the first positive z at which the
//! analytic branch D(z) loses the implicit-function condition (a fold,
//! `∂T/∂D = 0`) or runs into the pole at `D = 1`.
//!
//! The bound constant M is never exhibited in closed form by the derivation
//! that motivates this module; [`MajorantConfig::for_instance`] documents and
//! computes a sufficient value per instance (see `bound_constant` notes), so
//! the domination claim `|c_n| ≤ d_n` is reproducible and testable.
//! A data-driven counterpart, [`empirical_radius`], fits `log|c_n|` against n
//! and reports its own radius estimate with quality flags.

use thiserror::Error;

use crate::auxiliary::{c2_closed_form, ProblemInstance, SolveError};
use crate::gamma::{small_divisor_profile, GammaError, GammaSpec, Regime};
use crate::scalar::{Complex, RealScalar};
use crate::series::Series;

/// Guard distance from the `D = 1` pole of the rational majorant terms.
const POLE_GUARD: f64 = 1e-9;
/// Continuation gives up (reporting a lower bound) beyond this z.
const Z_MAX: f64 = 1e15;
/// Relative tolerance of the fold-locating bisection.
const FOLD_REL_TOL: f64 = 1e-8;

/// Errors from majorant construction and radius estimation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MajorantError {
    #[error("invalid majorant configuration: {0}")]
    InvalidConfig(String),
    /// The continuation ran past `z_max` without losing the implicit-function
    /// condition; `z_max` is a certified lower bound for the radius.
    #[error("no fold found below z = {z_max:e}; the majorant radius is at least that large")]
    NoFoldFound { z_max: f64 },
    /// Too few nonzero trailing coefficients for the requested fit window.
    #[error("insufficient data: need {needed} nonzero coefficients, found {found}")]
    InsufficientData { needed: usize, found: usize },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
}

/// Parameters of one majorant sequence.  Diagnostics run in machine doubles
/// regardless of the solver's coefficient precision.
#[derive(Clone, Debug, PartialEq)]
pub struct MajorantConfig {
    /// The uniform constant M (or N for the unit-circle regimes) multiplying
    /// the five-group recurrence.
    pub bound_constant: f64,
    /// d₁ = |η|.
    pub d1: f64,
    /// d₂, normally |c₂| (root-of-unity regime: Γ·|c₂|·|γ−1|).
    pub d2: f64,
    /// Γ, the uniform reciprocal-divisor cap of the root-of-unity regime;
    /// multiplies `bound_constant` in the effective recurrence factor.
    pub gamma_cap: Option<f64>,
    /// Number of majorant coefficients to produce.
    pub order: usize,
}

impl MajorantConfig {
    fn effective_constant(&self) -> f64 {
        self.bound_constant * self.gamma_cap.unwrap_or(1.0)
    }

    /// Structural checks.  Degenerate (zero) values of `bound_constant` and
    /// `d2` are allowed — they arise for genuinely degenerate instances and
    /// keep the recurrence meaningful.
    pub fn validate(&self) -> Result<(), MajorantError> {
        let bad = |m: &str| Err(MajorantError::InvalidConfig(m.to_string()));
        for (name, v) in [
            ("bound_constant", self.bound_constant),
            ("d1", self.d1),
            ("d2", self.d2),
        ] {
            if !v.is_finite() || v < 0.0 {
                return bad(&format!("{name} must be finite and nonnegative"));
            }
        }
        if self.d1 == 0.0 {
            return bad("d1 (= |eta|) must be positive");
        }
        if let Some(g) = self.gamma_cap {
            if !g.is_finite() || g <= 0.0 {
                return bad("gamma_cap must be finite and positive");
            }
        }
        if self.order < 2 {
            return bad("order must be at least 2");
        }
        Ok(())
    }

    /// Derive a provably sufficient configuration for an instance.
    ///
    /// The recurrence bound is obtained by dividing the coefficient identity
    /// by `(n+2)·a₂γ·(γ^{n+1}−1)` and bounding each of the thirteen numerator
    /// groups against its majorant slot; the per-slot requirements are
    ///
    /// ```text
    /// s₁ = (1 + |a₀|)/2                   (triple products; the  i(n−k+1)/((k+1)(n+2))
    ///                                      factor is ≤ 1 and |γ^j| ≤ 1)
    /// s₂ = (|p₀| + 2|p₂a₂| + |p₁a₁| + |p₀a₀| + |a₁| + |b·h₁|)/6   (pairwise)
    /// s₃ = (1 + |a₀|)·max_{j≥1}|p_j| / 2   (weight-1 partition sums)
    /// s₄ = (|a₁|·max_{j≥2}|p_j| + |b|·max_{j≥2}|h_j|)/2   (weight m+1)
    /// s₅ = |a₂|·max_{j≥3}|p_j|             (weight (m+2)(m+1))
    /// ```
    ///
    /// and `bound_constant = max(s₁..s₅)/(|a₂||γ|·δ)` with δ the smallest
    /// divisor `|γ^m − 1|` over the computed range (root-of-unity regime:
    /// δ-handling moves into `gamma_cap = Γ` and the divisor is dropped).
    pub fn for_instance<R: RealScalar>(
        inst: &ProblemInstance<R>,
    ) -> Result<MajorantConfig, MajorantError> {
        inst.validate()?;
        let regime = inst.gamma.classify()?;
        let gamma_abs = inst.gamma.value()?.abs().to_f64();
        let n = inst.order;

        let abs_at = |s: &Series<R>, j: usize| s.coeff(j).abs().to_f64();
        let max_abs_from = |s: &Series<R>, lo: usize| {
            let mut m = 0.0_f64;
            for j in lo..=s.order() {
                m = m.max(s.coeff(j).abs().to_f64());
            }
            m
        };
        let a0 = inst.a0.abs().to_f64();
        let a1 = inst.a1.abs().to_f64();
        let a2 = inst.a2.abs().to_f64();
        let b = inst.b.abs().to_f64();
        let p = &inst.p_series;
        let h = &inst.h_series;

        let s1 = (1.0 + a0) / 2.0;
        let s2 = (abs_at(p, 0) + 2.0 * abs_at(p, 2) * a2 + abs_at(p, 1) * a1
            + abs_at(p, 0) * a0
            + a1
            + b * abs_at(h, 1))
            / 6.0;
        let s3 = (1.0 + a0) * max_abs_from(p, 1) / 2.0;
        let s4 = (a1 * max_abs_from(p, 2) + b * max_abs_from(h, 2)) / 2.0;
        let s5 = a2 * max_abs_from(p, 3);
        let slot_max = s1.max(s2).max(s3).max(s4).max(s5);

        let c2_abs = c2_closed_form(inst)?.abs().to_f64();
        let (bound_constant, gamma_cap, d2) = match regime {
            Regime::RootOfUnity => {
                let profile = small_divisor_profile(&inst.gamma, 1)?;
                let cap = profile
                    .gamma_cap
                    .expect("root-of-unity profile carries gamma_cap")
                    .to_f64();
                let gm1 = (&inst.gamma.value()? - &Complex::one()).abs().to_f64();
                (slot_max / (a2 * gamma_abs), Some(cap), cap * c2_abs * gm1)
            }
            _ => {
                // Divisors actually used: |γ^m − 1| for m = 2..=N−1.
                let mut delta = f64::INFINITY;
                for m in 2..=n.saturating_sub(1).max(2) {
                    delta = delta.min(inst.gamma.divisor_abs(m as u64)?.to_f64());
                }
                if !delta.is_finite() {
                    delta = 1.0;
                }
                (slot_max / (a2 * gamma_abs * delta), None, c2_abs)
            }
        };

        let cfg = MajorantConfig {
            bound_constant,
            d1: inst.eta.abs().to_f64(),
            d2,
            gamma_cap,
            order: n,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// The weight series `Σ_{m≥1} w(m)·zᵐ` truncated at `order`.
fn weight_series(order: usize, w: impl Fn(usize) -> f64) -> Series<f64> {
    let coeffs = (0..=order)
        .map(|m| {
            if m == 0 {
                Complex::zero()
            } else {
                Complex::real(w(m))
            }
        })
        .collect();
    Series::new(coeffs)
}

/// The majorant sequence `d₁..d_order` (index 0 holds d₁) via the five-group
/// recurrence, with the partition groups realized as compositions of the
/// weight series with the partial sum `D`.
pub fn majorant_coeffs(cfg: &MajorantConfig) -> Result<Vec<f64>, MajorantError> {
    cfg.validate()?;
    let m_eff = cfg.effective_constant();
    let order = cfg.order;
    let mut d = vec![0.0_f64; order + 1];
    d[1] = cfg.d1;
    d[2] = cfg.d2;
    for target in 3..=order {
        // Partial sum with a zero placeholder at `target`; D(0) = 0 keeps
        // the placeholder out of every coefficient read below.
        let partial = Series::new(
            (0..=target)
                .map(|j| Complex::real(if j < target { d[j] } else { 0.0 }))
                .collect::<Vec<_>>(),
        );
        let sq = partial.mul(&partial);
        let cube = sq.mul(&partial);
        let u = weight_series(target, |_| 1.0)
            .compose(&partial)
            .expect("D(0) = 0");
        let v = weight_series(target, |m| (m + 1) as f64)
            .compose(&partial)
            .expect("D(0) = 0");
        let w = weight_series(target, |m| ((m + 2) * (m + 1)) as f64)
            .compose(&partial)
            .expect("D(0) = 0");
        let total = 2.0 * cube.coeff(target).re
            + 6.0 * sq.coeff(target).re
            + 2.0 * sq.mul(&u).coeff(target).re
            + 2.0 * sq.mul(&v).coeff(target).re
            + sq.mul(&w).coeff(target).re;
        d[target] = m_eff * total;
    }
    Ok(d[1..].to_vec())
}

/// Ψ(D): the D-only part of the implicit equation, `T(z,D) = ω(D) − τ(z)`
/// with `ω(D) = D − M·Ψ(D)`.
pub fn psi(d: f64) -> f64 {
    let om = 1.0 - d;
    2.0 * d.powi(3)
        + 6.0 * d.powi(2)
        + 2.0 * d.powi(3) / om
        + 2.0 * (2.0 - d) * d.powi(3) / om.powi(2)
        + 2.0 * d.powi(3) * (3.0 - 3.0 * d + d * d) / om.powi(3)
}

/// Ψ′(D), hand-differentiated (checked against finite differences in tests).
pub fn psi_prime(d: f64) -> f64 {
    let om = 1.0 - d;
    6.0 * d.powi(2)
        + 12.0 * d
        + (6.0 * d.powi(2) - 4.0 * d.powi(3)) / om.powi(2)
        + (12.0 * d.powi(2) - 12.0 * d.powi(3) + 4.0 * d.powi(4)) / om.powi(3)
        + (18.0 * d.powi(2) - 24.0 * d.powi(3) + 16.0 * d.powi(4) - 4.0 * d.powi(5))
            / om.powi(4)
}

/// Full residual of the implicit majorant equation at a point `(z, D)`.
pub fn implicit_equation_residual(cfg: &MajorantConfig, eta_abs: f64, z: f64, d: f64) -> f64 {
    let m = cfg.effective_constant();
    d - eta_abs * z - cfg.d2 * z * z - m * (psi(d) - 6.0 * eta_abs * eta_abs * z * z)
}

struct FoldProblem {
    m_eff: f64,
    eta_abs: f64,
    d2: f64,
    /// End of the increasing branch of ω (fold location in D, or the pole
    /// guard when the equation is too weak to fold).
    d_star: f64,
    /// ω(d_star): the largest value the branch can reach.
    omega_max: f64,
}

impl FoldProblem {
    fn new(cfg: &MajorantConfig, eta_abs: f64) -> Self {
        let m_eff = cfg.effective_constant();
        let d_cap = 1.0 - POLE_GUARD;
        let omega_prime = |d: f64| 1.0 - m_eff * psi_prime(d);
        let d_star = if m_eff == 0.0 || omega_prime(d_cap) > 0.0 {
            d_cap
        } else {
            // ω′ decreases from 1 at D = 0 to a negative value at the cap;
            // bisect its sign change.
            let (mut lo, mut hi) = (0.0, d_cap);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if omega_prime(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let omega_max = d_star - m_eff * psi(d_star);
        FoldProblem {
            m_eff,
            eta_abs,
            d2: cfg.d2,
            d_star,
            omega_max,
        }
    }

    fn omega(&self, d: f64) -> f64 {
        d - self.m_eff * psi(d)
    }

    fn tau(&self, z: f64) -> f64 {
        self.eta_abs * z + (self.d2 - 6.0 * self.m_eff * self.eta_abs * self.eta_abs) * z * z
    }

    /// z past which τ stops increasing (the branch cannot fold later than
    /// this, so continuation never needs to look beyond it).
    fn tau_peak(&self) -> f64 {
        let quad = self.d2 - 6.0 * self.m_eff * self.eta_abs * self.eta_abs;
        if quad < 0.0 {
            self.eta_abs / (-2.0 * quad)
        } else {
            f64::INFINITY
        }
    }

    /// Solve ω(D) = τ(z) on the increasing branch, if the branch reaches it.
    fn branch_solve(&self, z: f64) -> Option<f64> {
        let target = self.tau(z);
        if !(0.0..=self.omega_max).contains(&target) {
            return None;
        }
        let (mut lo, mut hi) = (0.0, self.d_star);
        for _ in 0..120 {
            let mid = 0.5 * (lo + hi);
            if self.omega(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }

    /// Does the analytic branch still exist (with margin from the fold and
    /// the pole) at this z?
    fn solvable(&self, z: f64) -> bool {
        match self.branch_solve(z) {
            None => false,
            Some(d) => {
                let omega_prime = 1.0 - self.m_eff * psi_prime(d);
                omega_prime > 0.0 && d < 1.0 - POLE_GUARD
            }
        }
    }
}

/// Locate the radius of the majorant generating function: continuation in z
/// with a one-dimensional solve for the branch D(z), a fold detector on
/// `∂T/∂D`, a pole guard at `D → 1`, and a final bisection to relative
/// tolerance 1e-8.
pub fn implicit_radius(cfg: &MajorantConfig, eta_abs: f64) -> Result<f64, MajorantError> {
    cfg.validate()?;
    if !(eta_abs > 0.0 && eta_abs.is_finite()) {
        return Err(MajorantError::InvalidConfig(
            "eta_abs must be positive and finite".into(),
        ));
    }
    let fold = FoldProblem::new(cfg, eta_abs);
    // τ is increasing up to its peak and |ω| is capped by omega_max, so the
    // first failure of the continuation brackets the fold; capping the sweep
    // at the peak makes the failure predicate monotone over the whole sweep.
    let z_cap = fold.tau_peak().min(Z_MAX);
    let mut z_prev = 0.0_f64;
    let mut z = (0.25 * fold.omega_max / eta_abs).min(z_cap);
    if !(z > 0.0) {
        return Err(MajorantError::InvalidConfig(
            "degenerate fold problem (omega_max = 0)".into(),
        ));
    }
    loop {
        if fold.solvable(z) {
            if z >= Z_MAX {
                return Err(MajorantError::NoFoldFound { z_max: Z_MAX });
            }
            z_prev = z;
            if z >= z_cap {
                // τ peaked without reaching ω_max; on the exact model this
                // cannot happen (the peak always clears ω_max), so treat it
                // as rounding noise at the boundary and stop here.
                return Ok(z_cap);
            }
            z = (z * 1.25).min(z_cap.min(Z_MAX));
        } else {
            // Fold (or pole) bracketed in (z_prev, z]; bisect.
            let (mut lo, mut hi) = (z_prev, z);
            while hi - lo > FOLD_REL_TOL * hi {
                let mid = 0.5 * (lo + hi);
                if fold.solvable(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
    }
}

/// Least-squares fit of `log|c_n|` against n over a trailing window.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalFit {
    /// `e^{−slope}` — the geometric-decay radius estimate.
    pub radius: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Fit quality too poor (R² < 0.9) for the radius to mean much.
    pub oscillatory: bool,
    /// Decay steepens within the window (factorial-type / entire behavior);
    /// the radius estimate is then only a lower bound.
    pub superlinear_decay: bool,
    /// Number of points actually fitted.
    pub window: usize,
}

fn least_squares(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    let r2 = if ss_tot < 1e-18 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    (slope, intercept, r2)
}

/// Fit the trailing `window` nonzero coefficients of a series and estimate a
/// convergence radius from the decay slope.
pub fn empirical_radius<R: RealScalar>(
    coeffs: &[Complex<R>],
    window: usize,
) -> Result<EmpiricalFit, MajorantError> {
    if window < 2 {
        return Err(MajorantError::InvalidConfig("window must be >= 2".into()));
    }
    let points: Vec<(f64, f64)> = coeffs
        .iter()
        .enumerate()
        .filter_map(|(n, c)| {
            let a = c.abs().to_f64();
            (a.is_finite() && a > 0.0).then(|| (n as f64, a.ln()))
        })
        .collect();
    if points.len() < window {
        return Err(MajorantError::InsufficientData {
            needed: window,
            found: points.len(),
        });
    }
    let tail = &points[points.len() - window..];
    let (slope, intercept, r_squared) = least_squares(tail);
    let superlinear_decay = if window >= 4 {
        let half = window / 2;
        let (s_lo, _, _) = least_squares(&tail[..half]);
        let (s_hi, _, _) = least_squares(&tail[half..]);
        s_hi - s_lo < -0.15
    } else {
        false
    };
    Ok(EmpiricalFit {
        radius: (-slope).exp(),
        slope,
        intercept,
        r_squared,
        oscillatory: r_squared < 0.9,
        superlinear_decay,
        window,
    })
}

/// All radius diagnostics for one solved series, with soft failures recorded
/// as notes instead of aborting the report.
#[derive(Clone, Debug)]
pub struct RadiusReport {
    pub empirical: Option<EmpiricalFit>,
    pub empirical_radius: Option<f64>,
    /// Fold/pole location of the implicit majorant equation; a lower bound
    /// for the radius of g whenever the majorant dominates.
    pub majorant_radius: Option<f64>,
    /// T = max_n d_n^{1/n}: the geometric-growth constant of the majorant.
    pub majorant_growth: Option<f64>,
    /// Parametric rotation-regime bound `(T·e^{B_K})⁻¹`: multiply by `e^{−ξ}`
    /// with the (existential, uncomputed) constant ξ to get the certified
    /// form; B_K is a partial Brjuno sum over certified quotients.
    pub brjuno_radius_scale: Option<f64>,
    pub config: Option<MajorantConfig>,
    pub notes: Vec<String>,
}

/// Assemble the radius report for a solved auxiliary series.
pub fn radius_report<R: RealScalar>(
    inst: &ProblemInstance<R>,
    g: &Series<R>,
    window: usize,
) -> RadiusReport {
    let mut notes = Vec::new();
    let (empirical, empirical_radius) = match empirical_radius::<R>(g.coeffs(), window) {
        Ok(fit) => {
            let r = fit.radius;
            (Some(fit), Some(r))
        }
        Err(e) => {
            notes.push(format!("empirical fit unavailable: {e}"));
            (None, None)
        }
    };

    let mut majorant_radius = None;
    let mut majorant_growth = None;
    let mut brjuno_radius_scale = None;
    let config = match MajorantConfig::for_instance(inst) {
        Ok(cfg) => {
            match majorant_coeffs(&cfg) {
                Ok(d) => {
                    let mut t: f64 = 0.0;
                    for (i, dn) in d.iter().enumerate() {
                        if *dn > 0.0 {
                            t = t.max(dn.powf(1.0 / (i + 1) as f64));
                        }
                    }
                    if t > 0.0 {
                        majorant_growth = Some(t);
                    }
                }
                Err(e) => notes.push(format!("majorant sequence unavailable: {e}")),
            }
            match implicit_radius(&cfg, cfg.d1) {
                Ok(r) => majorant_radius = Some(r),
                Err(MajorantError::NoFoldFound { z_max }) => {
                    notes.push(format!(
                        "implicit equation shows no singularity below {z_max:e}; majorant radius at least that large"
                    ));
                }
                Err(e) => notes.push(format!("implicit radius unavailable: {e}")),
            }
            Some(cfg)
        }
        Err(e) => {
            notes.push(format!("majorant configuration unavailable: {e}"));
            None
        }
    };

    if matches!(inst.gamma, GammaSpec::IrrationalRotation { .. }) {
        if let (Some(t), Ok(profile)) = (majorant_growth, small_divisor_profile(&inst.gamma, 1)) {
            if let Some(b) = profile.brjuno_partial {
                brjuno_radius_scale = Some(1.0 / (t * b.exp()));
            }
        }
    }

    RadiusReport {
        empirical,
        empirical_radius,
        majorant_radius,
        majorant_growth,
        brjuno_radius_scale,
        config,
        notes,
    }
}
