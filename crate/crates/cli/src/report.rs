//! The JSON run report: everything a solve, classify, verify, or radius run
//! learned, in a deterministic layout.
//!
//! Determinism contract: the same configuration produces a byte-identical
//! report.  Field order is fixed by declaration order, maps are sorted,
//! floating-point values use the shortest round-tripping decimal form, and
//! nothing time- or machine-dependent is emitted unless timing is requested
//! explicitly.
//!
//! Complex numbers appear as `[re, im]` pairs of *strings* (the scalar's
//! full-precision display form) so extended-precision coefficients survive
//! the trip through JSON readers that would otherwise truncate them to
//! doubles.  Residual norms and radius diagnostics are plain numbers: they
//! are diagnostics, not data to compute with.

use serde::Serialize;

use fdeseries::scalar::{Complex, RealScalar};
use fdeseries::{
    AuxiliarySolution, EmpiricalFit, MajorantConfig, RadiusReport, ResidualReport,
    SmallDivisorProfile,
};

use crate::config::Precision;

/// A complex number rendered for the report: `[re, im]` display strings.
pub type PairString = [String; 2];

/// Render one scalar with full precision.
pub fn scalar_string<R: RealScalar>(v: &R) -> String {
    v.to_string()
}

/// Render a complex number as its `[re, im]` string pair.
pub fn complex_pair<R: RealScalar>(c: &Complex<R>) -> PairString {
    [scalar_string(&c.re), scalar_string(&c.im)]
}

/// Render every coefficient of a slice.
pub fn series_pairs<R: RealScalar>(coeffs: &[Complex<R>]) -> Vec<PairString> {
    coeffs.iter().map(complex_pair).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct PrecisionMeta {
    /// `"double"` or `"extended"`.
    pub mode: String,
    /// Significant decimal digits when extended.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub digits: Option<usize>,
}

impl From<Precision> for PrecisionMeta {
    fn from(p: Precision) -> Self {
        match p {
            Precision::Double => PrecisionMeta {
                mode: "double".into(),
                digits: None,
            },
            Precision::Extended(d) => PrecisionMeta {
                mode: "extended".into(),
                digits: Some(d),
            },
        }
    }
}

/// The solved series, lowest coefficient first.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientBlock {
    /// x(0) from its closed form.
    pub x0: PairString,
    /// Conjugator g (g₀ = 0, g₁ = η).
    pub g: Vec<PairString>,
    /// Linearized composition y = g(γ·g⁻¹(z)).
    pub y: Vec<PairString>,
    /// The delay-equation solution x.
    pub x: Vec<PairString>,
}

/// Max-norm defects of the five verification identities.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualBlock {
    pub fde_defect: f64,
    pub y_equation_defect: f64,
    pub delay_closure_defect: f64,
    pub aux_integral_defect: f64,
    pub aux_differential_defect: f64,
}

impl ResidualBlock {
    pub fn from_report<R: RealScalar>(r: &ResidualReport<R>) -> Self {
        ResidualBlock {
            fde_defect: r.fde_defect.to_f64(),
            y_equation_defect: r.y_equation_defect.to_f64(),
            delay_closure_defect: r.delay_closure_defect.to_f64(),
            aux_integral_defect: r.aux_integral_defect.to_f64(),
            aux_differential_defect: r.aux_differential_defect.to_f64(),
        }
    }
}

/// One satisfied resonance: the divisor vanished, the numerator was checked
/// against zero, and the free coefficient received `assigned`.
#[derive(Debug, Clone, Serialize)]
pub struct ResonanceEntry {
    /// Coefficient index n with γ^{n+1} = 1.
    pub n: usize,
    /// Occurrence count v ≥ 1 (the free coefficient is c_{vp+1}).
    pub v: u64,
    /// |Θ(n, γ)| as measured; zero up to tolerance.
    pub theta_abs: f64,
    pub assigned: PairString,
}

/// A non-resonant step whose divisor |γ^m − 1| fell below the warning level.
#[derive(Debug, Clone, Serialize)]
pub struct DivisorWarningEntry {
    pub power: usize,
    pub divisor_abs: f64,
}

/// Cross-check of the recurrence against the literal resonance numerator.
#[derive(Debug, Clone, Serialize)]
pub struct OracleCheckBlock {
    /// Indices n = 1..=depth were compared.
    pub depth: usize,
    /// |Θ_recurrence(n) − Θ_literal(n)| per index.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalBlock {
    pub radius: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub oscillatory: bool,
    pub superlinear_decay: bool,
    pub window: usize,
}

impl From<&EmpiricalFit> for EmpiricalBlock {
    fn from(f: &EmpiricalFit) -> Self {
        EmpiricalBlock {
            radius: f.radius,
            slope: f.slope,
            intercept: f.intercept,
            r_squared: f.r_squared,
            oscillatory: f.oscillatory,
            superlinear_decay: f.superlinear_decay,
            window: f.window,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MajorantConfigBlock {
    pub bound_constant: f64,
    pub d1: f64,
    pub d2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_cap: Option<f64>,
    pub order: usize,
}

impl From<&MajorantConfig> for MajorantConfigBlock {
    fn from(c: &MajorantConfig) -> Self {
        MajorantConfigBlock {
            bound_constant: c.bound_constant,
            d1: c.d1,
            d2: c.d2,
            gamma_cap: c.gamma_cap,
            order: c.order,
        }
    }
}

/// Convergence-radius diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct RadiusBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical: Option<EmpiricalBlock>,
    /// `e^{−slope}` of the log-coefficient fit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical_radius: Option<f64>,
    /// Fold point of the implicit majorant equation (a lower bound while the
    /// majorant dominates).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub majorant_radius: Option<f64>,
    /// max_n d_n^{1/n} of the domination sequence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub majorant_growth: Option<f64>,
    /// Rotation-regime parametric scale (T·e^{B_K})⁻¹; multiply by the
    /// uncomputed e^{−ξ} to get the certified bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub brjuno_radius_scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub majorant_config: Option<MajorantConfigBlock>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl From<&RadiusReport> for RadiusBlock {
    fn from(r: &RadiusReport) -> Self {
        RadiusBlock {
            empirical: r.empirical.as_ref().map(EmpiricalBlock::from),
            empirical_radius: r.empirical_radius,
            majorant_radius: r.majorant_radius,
            majorant_growth: r.majorant_growth,
            brjuno_radius_scale: r.brjuno_radius_scale,
            majorant_config: r.config.as_ref().map(MajorantConfigBlock::from),
            notes: r.notes.clone(),
        }
    }
}

/// Small-divisor landscape of the eigenvalue.
#[derive(Debug, Clone, Serialize)]
pub struct ClassificationBlock {
    pub regime: String,
    pub gamma: PairString,
    /// |γ^n − 1| for n = 1..=depth.
    pub divisors: Vec<f64>,
    pub min_divisor: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub resonant_indices: Vec<u64>,
    /// Γ = max 1/|γ^k − 1| over the nonzero divisors of one period.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_cap: Option<f64>,
    /// Certified partial quotients of θ (irrational rotation only).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub partial_quotients: Vec<u64>,
    /// Whether the quotient expansion terminated exactly.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotients_exact: Option<bool>,
    /// Partial Brjuno sums B_K = Σ_{n=0}^{K} ln(q_{n+1})/q_n for each
    /// certified prefix length K.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub brjuno_prefix_sums: Vec<f64>,
    /// The deepest partial Brjuno sum available.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub brjuno_partial: Option<f64>,
}

/// Side-by-side of computed leading solution coefficients and their closed
/// forms.
#[derive(Debug, Clone, Serialize)]
pub struct ExampleBlock {
    /// x₀..x₃ as solved from the power-series pipeline.
    pub computed: Vec<PairString>,
    /// x₀..x₃ evaluated from their closed-form expressions.
    pub closed_forms: Vec<PairString>,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorBlock {
    /// Stable machine-readable tag, e.g. `"no_analytic_solution"`.
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
    /// For obstructed resonances: the index n, occurrence v, and |Θ|.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resonance: Option<ObstructionDetail>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObstructionDetail {
    pub n: usize,
    pub v: u64,
    pub theta_abs: f64,
}

/// Wall-clock timing; only emitted on request since it breaks byte-for-byte
/// determinism.
#[derive(Debug, Clone, Serialize)]
pub struct TimingBlock {
    pub total_ms: f64,
}

/// The full report.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    /// Which subcommand produced this report.
    pub command: String,
    /// `"ok"` or `"error"`.
    pub status: String,
    pub precision: PrecisionMeta,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<PairString>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<PairString>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<CoefficientBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residuals: Option<ResidualBlock>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub resonance_log: Vec<ResonanceEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub verified_resonances: Vec<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub divisor_warnings: Vec<DivisorWarningEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_check: Option<OracleCheckBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<RadiusBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassificationBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub example: Option<ExampleBlock>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<TimingBlock>,
}

impl RunReport {
    pub fn new(command: &str, precision: Precision) -> Self {
        RunReport {
            command: command.to_string(),
            status: "ok".into(),
            precision: precision.into(),
            regime: None,
            gamma: None,
            eta: None,
            order: None,
            coefficients: None,
            residuals: None,
            resonance_log: Vec::new(),
            verified_resonances: Vec::new(),
            divisor_warnings: Vec::new(),
            oracle_check: None,
            radius: None,
            classification: None,
            example: None,
            notes: Vec::new(),
            error: None,
            timing: None,
        }
    }

    /// Absorb the solver's audit trail (resonances, warnings, verified
    /// occurrence counts).
    pub fn absorb_audit<R: RealScalar>(&mut self, aux: &AuxiliarySolution<R>) {
        self.resonance_log = aux
            .resonance_log
            .iter()
            .map(|e| ResonanceEntry {
                n: e.n,
                v: e.v,
                theta_abs: e.theta_abs.to_f64(),
                assigned: complex_pair(&e.assigned),
            })
            .collect();
        self.verified_resonances = aux.verified_resonances.clone();
        self.divisor_warnings = aux
            .divisor_warnings
            .iter()
            .map(|w| DivisorWarningEntry {
                power: w.power,
                divisor_abs: w.divisor_abs.to_f64(),
            })
            .collect();
    }

    /// Absorb a small-divisor profile plus optional continued-fraction data.
    pub fn absorb_profile<R: RealScalar>(
        &mut self,
        profile: &SmallDivisorProfile<R>,
        quotients: Option<(Vec<u64>, bool)>,
        brjuno_prefix_sums: Vec<f64>,
    ) {
        let (partial_quotients, quotients_exact) = match quotients {
            Some((q, exact)) => (q, Some(exact)),
            None => (Vec::new(), None),
        };
        self.classification = Some(ClassificationBlock {
            regime: profile.regime.as_str().to_string(),
            gamma: complex_pair(&profile.gamma),
            divisors: profile.divisors.iter().map(|d| d.to_f64()).collect(),
            min_divisor: profile.min_divisor.to_f64(),
            resonant_indices: profile.resonant_indices.clone(),
            gamma_cap: profile.gamma_cap.as_ref().map(|g| g.to_f64()),
            partial_quotients,
            quotients_exact,
            brjuno_prefix_sums,
            brjuno_partial: profile.brjuno_partial,
        });
        self.regime = Some(profile.regime.as_str().to_string());
        self.gamma = Some(complex_pair(&profile.gamma));
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports always serialize");
        text.push('\n');
        text
    }
}
