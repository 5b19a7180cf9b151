//! The run pipeline: configuration → typed instance → solve → verification →
//! diagnostics → report.
//!
//! Every command funnels through the same stages so that reports stay
//! uniform: build a [`ProblemInstance`] at the requested precision, run the
//! auxiliary solve and conjugation, recompute the residual norms, and attach
//! whatever diagnostics the command asked for (small-divisor profiles,
//! literal-numerator cross-checks, majorant radii).
//!
//! Exit-code policy
//! ----------------
//! * `0` — the run completed;
//! * `1` — the configuration or its data are unusable (bad TOML, invalid γ,
//!   η = 0, a₀ = 1, a free-coefficient choice that breaks domination);
//! * `2` — the instance has no analytic solution of the assumed form: an
//!   exact resonance γ^{n+1} = 1 met a nonzero numerator Θ(n, γ);
//! * `3` — a numeric failure (non-finite coefficients, a verification
//!   composition at a shifted base point).

use std::collections::BTreeMap;
use std::time::Instant;

use fdeseries::auxiliary::{
    defect_differential_form, defect_integral_form, theta_from_solution, theta_resonance_literal,
    ProblemInstance, SolveError, THETA_ORACLE_CAP,
};
use fdeseries::gamma::{
    brjuno_partial_sum, continued_fraction, small_divisor_profile, ContinuedFraction, GammaError,
    GammaSpec, Theta,
};
use fdeseries::majorant::{majorant_coeffs, radius_report, MajorantConfig};
use fdeseries::scalar::{set_extended_precision_digits, BigReal, Complex, RealScalar};
use fdeseries::series::{Series, SeriesError};
use fdeseries::solution::{
    build_bundle, build_x, build_y, leading_x_closed_forms, residual_delay_closure, residual_fde,
    residual_y_equation, x0_closed_form, BuildError, ResidualReport, SolutionBundle,
};

use crate::config::{
    ComplexPair, ConfigError, GammaConfig, InstanceConfig, Precision, RunConfig,
};
use crate::report::{
    complex_pair, series_pairs, CoefficientBlock, ErrorBlock, ExampleBlock, ObstructionDetail,
    OracleCheckBlock, RadiusBlock, ResidualBlock, RunReport, TimingBlock,
};

/// Slack for the domination comparison: the majorant is derived in doubles
/// while coefficients may carry more precision, so allow rounding headroom.
const DOMINATION_SLACK: f64 = 1e-9;

/// A failed run, already mapped to the exit-code policy.
#[derive(Debug, Clone)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
    pub resonance: Option<ObstructionDetail>,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            kind: "config".into(),
            message: message.into(),
            exit_code: 1,
            resonance: None,
        }
    }

    fn data(kind: &str, message: impl Into<String>) -> Self {
        CliError {
            kind: kind.into(),
            message: message.into(),
            exit_code: 1,
            resonance: None,
        }
    }

    fn numeric(kind: &str, message: impl Into<String>) -> Self {
        CliError {
            kind: kind.into(),
            message: message.into(),
            exit_code: 3,
            resonance: None,
        }
    }

    pub fn error_block(&self) -> ErrorBlock {
        ErrorBlock {
            kind: self.kind.clone(),
            message: self.message.clone(),
            exit_code: self.exit_code,
            resonance: self.resonance.clone(),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::config(e.to_string())
    }
}

impl From<GammaError> for CliError {
    fn from(e: GammaError) -> Self {
        match &e {
            GammaError::InvalidGamma(_) => CliError::data("invalid_gamma", e.to_string()),
            GammaError::PrecisionExhausted { .. } => {
                CliError::data("precision_exhausted", e.to_string())
            }
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        CliError::numeric("series", e.to_string())
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match &e {
            SolveError::NoAnalyticSolution { n, v, theta_abs } => CliError {
                kind: "no_analytic_solution".into(),
                message: e.to_string(),
                exit_code: 2,
                resonance: Some(ObstructionDetail {
                    n: *n,
                    v: *v,
                    theta_abs: *theta_abs,
                }),
            },
            SolveError::DegenerateGamma(_) | SolveError::InvalidInstance(_) => {
                CliError::data("invalid_instance", e.to_string())
            }
            SolveError::OracleTooLarge { .. } => CliError::data("oracle_depth", e.to_string()),
            SolveError::NonFinite { .. } => CliError::numeric("non_finite", e.to_string()),
            SolveError::Gamma(g) => g.clone().into(),
            SolveError::Series(s) => s.clone().into(),
        }
    }
}

impl From<BuildError> for CliError {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::DegenerateA0 => CliError::data("degenerate_a0", e.to_string()),
            BuildError::TrivialAuxiliary => CliError::data("trivial_solution", e.to_string()),
            BuildError::InnerConstantNonzero { .. } => {
                CliError::numeric("inner_constant", e.to_string())
            }
            BuildError::Solve(s) => s.into(),
            BuildError::Series(s) => s.into(),
            BuildError::Gamma(g) => g.into(),
        }
    }
}

/// Everything a command run produces.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub exit_code: i32,
    /// Rendered coefficient CSV, when the configuration asked for one.
    pub csv: Option<String>,
    /// Human-readable stdout lines.
    pub summary: Vec<String>,
}

/// Translate the wire form of γ into the solver's tagged type.
pub fn gamma_spec<R: RealScalar>(g: &GammaConfig) -> GammaSpec<R> {
    match g {
        GammaConfig::InsideDisk { value } => GammaSpec::InsideDisk {
            value: Complex::from_f64s(value[0], value[1]),
        },
        GammaConfig::IrrationalRotation { theta, quotients } => GammaSpec::IrrationalRotation {
            theta: match (theta, quotients) {
                (Some(t), _) => Theta::Decimal(t.clone()),
                (None, Some(q)) => Theta::Quotients(q.clone()),
                (None, None) => unreachable!("validated: theta or quotients present"),
            },
        },
        GammaConfig::RootOfUnity { q, p } => GammaSpec::RootOfUnity { q: *q, p: *p },
    }
}

/// Materialize the instance at working precision.  The wire form carries
/// doubles; converting them to extended scalars is exact.
pub fn build_instance<R: RealScalar>(
    ic: &InstanceConfig,
    precision: Precision,
) -> ProblemInstance<R> {
    let cpx = |v: &ComplexPair| Complex::<R>::from_f64s(v[0], v[1]);
    let series = |v: &[ComplexPair]| Series::new(v.iter().map(&cpx).collect());
    let mut inst = ProblemInstance::new(
        cpx(&ic.a0),
        cpx(&ic.a1),
        cpx(&ic.a2),
        cpx(&ic.b),
        series(&ic.p),
        series(&ic.h),
        gamma_spec(&ic.gamma),
        cpx(&ic.eta),
        ic.order,
        precision.digits(),
    );
    for (key, value) in &ic.free_coeffs {
        let occurrence: u64 = key.parse().expect("config validation checked the keys");
        inst.free_coeffs.insert(occurrence, cpx(value));
    }
    inst
}

/// The built-in worked instance
/// `(1−2i)x″ + (1+i)x′ + 3i·x = x((2+i) + 2iz + z² + (1+i)x′) + 2 + (2−i)z + z²`
/// with γ = 1/2 and η = 1.
pub fn example_instance() -> InstanceConfig {
    InstanceConfig {
        a0: [0.0, 3.0],
        a1: [1.0, 1.0],
        a2: [1.0, -2.0],
        b: [1.0, 1.0],
        p: vec![[2.0, 1.0], [0.0, 2.0], [1.0, 0.0]],
        h: vec![[2.0, 0.0], [2.0, -1.0], [1.0, 0.0]],
        gamma: GammaConfig::InsideDisk { value: [0.5, 0.0] },
        eta: [1.0, 0.0],
        order: 12,
        free_coeffs: BTreeMap::new(),
    }
}

/// A full run configuration around [`example_instance`].
pub fn example_config() -> RunConfig {
    RunConfig {
        instance: example_instance(),
        precision: Precision::default(),
        outputs: Default::default(),
        toggles: Default::default(),
    }
}

/// Render the conjugator coefficients as CSV (`index,re,im,abs`); `re` and
/// `im` keep the scalar's full display precision so the file round-trips.
pub fn render_csv<R: RealScalar>(g: &Series<R>) -> String {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["index", "re", "im", "abs"])
        .expect("writing to a Vec cannot fail");
    for (i, c) in g.coeffs().iter().enumerate() {
        wtr.write_record([
            i.to_string(),
            c.re.to_string(),
            c.im.to_string(),
            c.abs().to_f64().to_string(),
        ])
        .expect("writing to a Vec cannot fail");
    }
    String::from_utf8(wtr.into_inner().expect("no buffering failure"))
        .expect("CSV output is UTF-8")
}

/// Parse a coefficient CSV produced by [`render_csv`] back into a series at
/// working precision.
pub fn parse_csv_series<R: RealScalar>(text: &str) -> Result<Series<R>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    {
        let headers = rdr
            .headers()
            .map_err(|e| CliError::config(format!("CSV header error: {e}")))?;
        let fields: Vec<&str> = headers.iter().collect();
        if fields.len() < 3 || fields[0] != "index" || fields[1] != "re" || fields[2] != "im" {
            return Err(CliError::config(format!(
                "CSV header must start with index,re,im (got {})",
                fields.join(",")
            )));
        }
    }
    let mut coeffs: Vec<Complex<R>> = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| CliError::config(format!("CSV row error: {e}")))?;
        let field = |i: usize| record.get(i).unwrap_or("");
        let index: usize = field(0)
            .parse()
            .map_err(|_| CliError::config(format!("bad index '{}' in CSV row {}", field(0), row)))?;
        if index != row {
            return Err(CliError::config(format!(
                "CSV indices must be consecutive from 0; row {row} has index {index}"
            )));
        }
        let parse = |i: usize, what: &str| {
            R::parse_decimal(field(i)).ok_or_else(|| {
                CliError::config(format!("bad {what} '{}' in CSV row {}", field(i), row))
            })
        };
        coeffs.push(Complex::new(parse(1, "re")?, parse(2, "im")?));
    }
    if coeffs.is_empty() {
        return Err(CliError::config("CSV contains no coefficients"));
    }
    Ok(Series::new(coeffs))
}

fn fmt_defect(v: f64) -> String {
    format!("{v:.3e}")
}

/// What a solve-like command wants attached to its report.
struct SolveOptions {
    include_coefficients: bool,
    radius: bool,
    window: Option<usize>,
}

fn default_window(order: usize) -> usize {
    (order / 2).clamp(4, 16)
}

/// Solve, verify, and attach diagnostics; shared by `solve`, `radius`, and
/// `example`.
fn solve_core<R: RealScalar>(
    cfg: &RunConfig,
    opts: &SolveOptions,
    report: &mut RunReport,
    summary: &mut Vec<String>,
) -> Result<(ProblemInstance<R>, SolutionBundle<R>), CliError> {
    let inst = build_instance::<R>(&cfg.instance, cfg.precision);
    let bundle = build_bundle(&inst)?;
    let gamma = inst.gamma.value()?;

    report.regime = Some(bundle.aux.regime.as_str().to_string());
    report.gamma = Some(complex_pair(&gamma));
    report.eta = Some(complex_pair(&inst.eta));
    report.order = Some(inst.order);
    report.absorb_audit(&bundle.aux);

    summary.push(format!(
        "regime: {}   gamma = {}   order = {}   precision = {}",
        bundle.aux.regime.as_str(),
        gamma,
        inst.order,
        cfg.precision
    ));

    if opts.include_coefficients {
        report.coefficients = Some(CoefficientBlock {
            x0: complex_pair(&bundle.x0),
            g: series_pairs(bundle.g().coeffs()),
            y: series_pairs(bundle.y.coeffs()),
            x: series_pairs(bundle.x.coeffs()),
        });
        summary.push(format!("x(0) = {}", bundle.x0));
    }

    if cfg.toggles.verify {
        report.residuals = Some(ResidualBlock::from_report(&bundle.residuals));
        summary.push("residual max-norms:".into());
        push_residual_lines(&bundle.residuals, summary);
    }

    if !bundle.aux.resonance_log.is_empty() {
        let occurrences: Vec<String> = bundle
            .aux
            .resonance_log
            .iter()
            .map(|e| e.v.to_string())
            .collect();
        summary.push(format!(
            "resonances satisfied: {} (occurrences {})",
            bundle.aux.resonance_log.len(),
            occurrences.join(", ")
        ));
    }
    if !bundle.aux.divisor_warnings.is_empty() {
        summary.push(format!(
            "small-divisor warnings: {}",
            bundle.aux.divisor_warnings.len()
        ));
    }

    if cfg.toggles.oracle_check_depth > 0 {
        let block = oracle_check(&inst, bundle.g(), cfg.toggles.oracle_check_depth, report)?;
        summary.push(format!(
            "numerator cross-check: max deviation {} over n = 1..={}",
            fmt_defect(block.max_deviation),
            block.depth
        ));
        report.oracle_check = Some(block);
    }

    if opts.radius {
        let window = opts.window.unwrap_or_else(|| default_window(inst.order));
        let rr = radius_report(&inst, bundle.g(), window);
        let block = RadiusBlock::from(&rr);
        let fmt_opt = |v: Option<f64>| match v {
            Some(x) => format!("{x}"),
            None => "n/a".to_string(),
        };
        summary.push(format!(
            "radius: empirical {}   majorant lower bound {}   growth constant {}",
            fmt_opt(block.empirical_radius),
            fmt_opt(block.majorant_radius),
            fmt_opt(block.majorant_growth),
        ));
        if let Some(scale) = block.brjuno_radius_scale {
            summary.push(format!(
                "rotation-regime parametric radius scale: {scale} (multiply by e^-xi)"
            ));
        }
        report.radius = Some(block);
        domination_check(&inst, bundle.g())?;
    }

    Ok((inst, bundle))
}

fn push_residual_lines<R: RealScalar>(r: &ResidualReport<R>, summary: &mut Vec<String>) {
    summary.push(format!(
        "  delay equation:    {}",
        fmt_defect(r.fde_defect.to_f64())
    ));
    summary.push(format!(
        "  y-equation:        {}",
        fmt_defect(r.y_equation_defect.to_f64())
    ));
    summary.push(format!(
        "  delay closure:     {}",
        fmt_defect(r.delay_closure_defect.to_f64())
    ));
    summary.push(format!(
        "  aux integral:      {}",
        fmt_defect(r.aux_integral_defect.to_f64())
    ));
    summary.push(format!(
        "  aux differential:  {}",
        fmt_defect(r.aux_differential_defect.to_f64())
    ));
}

/// Compare the recurrence's implied numerator against the literal nested-sum
/// form for n = 1..=depth (clamped to the oracle's cost cap and the computed
/// order).
fn oracle_check<R: RealScalar>(
    inst: &ProblemInstance<R>,
    g: &Series<R>,
    requested_depth: usize,
    report: &mut RunReport,
) -> Result<OracleCheckBlock, CliError> {
    let depth = requested_depth
        .min(THETA_ORACLE_CAP)
        .min(inst.order.saturating_sub(2));
    if depth < requested_depth {
        report.notes.push(format!(
            "numerator cross-check depth clamped from {requested_depth} to {depth} \
             (cost cap {THETA_ORACLE_CAP}, order {})",
            inst.order
        ));
    }
    let mut deviations = Vec::with_capacity(depth);
    let mut max_deviation = 0.0_f64;
    for n in 1..=depth {
        let literal = theta_resonance_literal(n, inst, &g.coeffs()[1..])?;
        let solved = theta_from_solution(n, inst, g)?;
        let dev = (&solved - &literal).abs().to_f64();
        max_deviation = max_deviation.max(dev);
        deviations.push(dev);
    }
    Ok(OracleCheckBlock {
        depth,
        deviations,
        max_deviation,
    })
}

/// Check the instance-derived majorant against the solved coefficients.  A
/// violation caused by user-assigned free coefficients is a configuration
/// error; with none present it would contradict the domination argument and
/// is reported as a numeric failure.
fn domination_check<R: RealScalar>(
    inst: &ProblemInstance<R>,
    g: &Series<R>,
) -> Result<(), CliError> {
    let mcfg = match MajorantConfig::for_instance(inst) {
        Ok(c) => c,
        // Already surfaced as a note by `radius_report`.
        Err(_) => return Ok(()),
    };
    let d = match majorant_coeffs(&mcfg) {
        Ok(d) => d,
        Err(_) => return Ok(()),
    };
    let mut first_violation: Option<(usize, f64, f64)> = None;
    for n in 1..=inst.order.min(d.len()) {
        let cn = g.coeff(n).abs().to_f64();
        let bound = d[n - 1] * (1.0 + DOMINATION_SLACK);
        if cn > bound {
            first_violation = Some((n, cn, d[n - 1]));
            break;
        }
    }
    let Some((n, cn, bound)) = first_violation else {
        return Ok(());
    };
    let msg = format!(
        "majorant domination fails at n = {n}: |c_n| = {cn:e} exceeds d_n = {bound:e}"
    );
    if inst.free_coeffs.is_empty() {
        Err(CliError::numeric("majorant_violation", msg))
    } else {
        Err(CliError::data(
            "free_coefficient_breaks_domination",
            format!("{msg}; the assigned free coefficients are not dominated"),
        ))
    }
}

/// Run `body` at the configured precision, wiring errors and timing into the
/// report.
fn with_precision<F2, FB>(
    cfg: &RunConfig,
    command: &str,
    timing: bool,
    double_body: F2,
    extended_body: FB,
) -> RunOutcome
where
    F2: FnOnce(&mut RunReport, &mut Vec<String>) -> Result<Option<String>, CliError>,
    FB: FnOnce(&mut RunReport, &mut Vec<String>) -> Result<Option<String>, CliError>,
{
    let start = Instant::now();
    let mut report = RunReport::new(command, cfg.precision);
    let mut summary = Vec::new();
    let result = match cfg.precision {
        Precision::Double => double_body(&mut report, &mut summary),
        Precision::Extended(digits) => {
            set_extended_precision_digits(digits);
            extended_body(&mut report, &mut summary)
        }
    };
    finish(report, summary, result, timing, start)
}

fn finish(
    mut report: RunReport,
    mut summary: Vec<String>,
    result: Result<Option<String>, CliError>,
    timing: bool,
    start: Instant,
) -> RunOutcome {
    let (exit_code, csv) = match result {
        Ok(csv) => (0, csv),
        Err(e) => {
            report.status = "error".into();
            summary.push(format!("error: {}", e.message));
            report.error = Some(e.error_block());
            (e.exit_code, None)
        }
    };
    if timing {
        report.timing = Some(TimingBlock {
            total_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    RunOutcome {
        report,
        exit_code,
        csv,
        summary,
    }
}

fn solve_like<R: RealScalar>(
    cfg: &RunConfig,
    opts: &SolveOptions,
    report: &mut RunReport,
    summary: &mut Vec<String>,
) -> Result<Option<String>, CliError> {
    let (_, bundle) = solve_core::<R>(cfg, opts, report, summary)?;
    Ok(cfg
        .outputs
        .csv
        .is_some()
        .then(|| render_csv(bundle.g())))
}

/// `solve`: the full pipeline with coefficients in the report.
pub fn run_solve(cfg: &RunConfig, timing: bool) -> RunOutcome {
    let opts = SolveOptions {
        include_coefficients: true,
        radius: cfg.toggles.majorant,
        window: None,
    };
    with_precision(
        cfg,
        "solve",
        timing,
        |r, s| solve_like::<f64>(cfg, &opts, r, s),
        |r, s| solve_like::<BigReal>(cfg, &opts, r, s),
    )
}

/// `radius`: solve, then focus the report on convergence diagnostics.
pub fn run_radius(cfg: &RunConfig, window: Option<usize>, timing: bool) -> RunOutcome {
    let opts = SolveOptions {
        include_coefficients: false,
        radius: true,
        window,
    };
    with_precision(
        cfg,
        "radius",
        timing,
        |r, s| solve_like::<f64>(cfg, &opts, r, s),
        |r, s| solve_like::<BigReal>(cfg, &opts, r, s),
    )
}

fn example_typed<R: RealScalar>(
    cfg: &RunConfig,
    report: &mut RunReport,
    summary: &mut Vec<String>,
) -> Result<Option<String>, CliError> {
    let opts = SolveOptions {
        include_coefficients: true,
        radius: cfg.toggles.majorant,
        window: None,
    };
    let (inst, bundle) = solve_core::<R>(cfg, &opts, report, summary)?;
    let closed = leading_x_closed_forms(&inst)?;
    let computed: Vec<Complex<R>> = (0..4).map(|k| bundle.x.coeff(k)).collect();
    let max_deviation = computed
        .iter()
        .zip(closed.iter())
        .map(|(a, b)| (a - b).abs().to_f64())
        .fold(0.0_f64, f64::max);

    let symbolic = [
        "(a1*p0 - a2*(g-p1) + b*h0) / (b*(a0-1))",
        "-p0 / b",
        "(g - p1) / (2b)",
        "(a0*p0 - p0*g - a1*(g-p1) + b*h1) / (6*b*a2)",
    ];
    summary.push("leading solution coefficients against their closed forms:".into());
    for k in 0..4 {
        summary.push(format!(
            "  x{} = {}   closed form {}   [{}]",
            k, computed[k], closed[k], symbolic[k]
        ));
    }
    summary.push(format!(
        "max closed-form deviation: {}",
        fmt_defect(max_deviation)
    ));

    report.example = Some(ExampleBlock {
        computed: computed.iter().map(complex_pair).collect(),
        closed_forms: closed.iter().map(complex_pair).collect(),
        max_deviation,
    });
    Ok(cfg
        .outputs
        .csv
        .is_some()
        .then(|| render_csv(bundle.g())))
}

/// `example`: the built-in worked instance with closed-form comparison.
pub fn run_example(cfg: &RunConfig, timing: bool) -> RunOutcome {
    with_precision(
        cfg,
        "example",
        timing,
        |r, s| example_typed::<f64>(cfg, r, s),
        |r, s| example_typed::<BigReal>(cfg, r, s),
    )
}

fn verify_typed<R: RealScalar>(
    cfg: &RunConfig,
    csv_text: &str,
    report: &mut RunReport,
    summary: &mut Vec<String>,
) -> Result<Option<String>, CliError> {
    let g = parse_csv_series::<R>(csv_text)?;
    if !g.coeff(0).is_zero() {
        return Err(CliError::config(
            "imported conjugator must have zero constant term",
        ));
    }
    if g.coeff(1).is_zero() {
        return Err(CliError::config(
            "imported conjugator must have a nonzero linear coefficient",
        ));
    }
    if g.order() < 4 {
        return Err(CliError::config(format!(
            "imported conjugator is known through order {}, need at least 4",
            g.order()
        )));
    }
    let mut icfg = cfg.instance.clone();
    if g.order() != cfg.instance.order {
        report.notes.push(format!(
            "instance order {} overridden by imported coefficient count (order {})",
            cfg.instance.order,
            g.order()
        ));
        icfg.order = g.order();
    }
    let inst = build_instance::<R>(&icfg, cfg.precision);
    inst.validate().map_err(CliError::from)?;
    let gamma = inst.gamma.value()?;

    // Rebuild the solution from the imported conjugator and recompute every
    // residual over exactly the ranges the solver itself reports.
    let y = build_y(&g, &gamma)?;
    let x0 = x0_closed_form(&inst)?;
    let x = build_x(&y, &inst, &x0);
    let n = inst.order;
    let residuals = ResidualReport {
        fde_defect: residual_fde(&x, &inst)?
            .truncated(n.saturating_sub(3))
            .max_abs(),
        y_equation_defect: residual_y_equation(&y, &inst)?
            .truncated(n.saturating_sub(3))
            .max_abs(),
        delay_closure_defect: residual_delay_closure(&x, &y, &inst)
            .truncated(n.saturating_sub(1))
            .max_abs(),
        aux_integral_defect: defect_integral_form(&g, &inst)?.max_abs(),
        aux_differential_defect: defect_differential_form(&g, &inst)?.max_abs(),
    };

    report.regime = Some(inst.gamma.classify()?.as_str().to_string());
    report.gamma = Some(complex_pair(&gamma));
    report.eta = Some(complex_pair(&inst.eta));
    report.order = Some(n);
    report.residuals = Some(ResidualBlock::from_report(&residuals));
    report
        .notes
        .push(format!("conjugator imported from CSV ({} coefficients)", n + 1));

    summary.push(format!(
        "verified imported coefficients: regime {}, order {}",
        inst.gamma.classify()?.as_str(),
        n
    ));
    summary.push("residual max-norms:".into());
    push_residual_lines(&residuals, summary);
    Ok(None)
}

/// `verify`: re-import a coefficient CSV and recompute the residual norms.
pub fn run_verify(cfg: &RunConfig, csv_text: &str, timing: bool) -> RunOutcome {
    with_precision(
        cfg,
        "verify",
        timing,
        |r, s| verify_typed::<f64>(cfg, csv_text, r, s),
        |r, s| verify_typed::<BigReal>(cfg, csv_text, r, s),
    )
}

/// Continued-fraction data for the classification report: certified partial
/// quotients plus the prefix Brjuno sums they support.
fn quotient_diagnostics(
    gamma: &GammaConfig,
    depth: usize,
    report: &mut RunReport,
) -> Result<Option<(ContinuedFraction, Vec<f64>)>, CliError> {
    let cf = match gamma {
        GammaConfig::IrrationalRotation {
            theta: Some(t), ..
        } => match continued_fraction(t, depth) {
            Ok(cf) => cf,
            Err(GammaError::PrecisionExhausted { certified, .. }) => {
                report.notes.push(format!(
                    "theta's digits certify only {} partial quotients (requested {})",
                    certified.partial_quotients().len(),
                    depth
                ));
                certified
            }
            Err(e) => return Err(e.into()),
        },
        GammaConfig::IrrationalRotation {
            quotients: Some(qs),
            ..
        } => ContinuedFraction::from_quotients(qs)?,
        _ => return Ok(None),
    };
    let terms = cf.convergents().len();
    let sums: Vec<f64> = (0..terms).map(|k| brjuno_partial_sum(&cf, k)).collect();
    Ok(Some((cf, sums)))
}

/// `classify`: the small-divisor landscape of γ, no solving.  Diagnostics are
/// computed in doubles; decimal rotation numbers are handled exactly through
/// interval arithmetic inside the continued-fraction expansion.
pub fn run_classify(cfg: &RunConfig, depth: u64, timing: bool) -> RunOutcome {
    let start = Instant::now();
    let mut report = RunReport::new("classify", cfg.precision);
    let mut summary = Vec::new();
    let result = classify_body(cfg, depth, &mut report, &mut summary);
    finish(report, summary, result, timing, start)
}

fn classify_body(
    cfg: &RunConfig,
    depth: u64,
    report: &mut RunReport,
    summary: &mut Vec<String>,
) -> Result<Option<String>, CliError> {
    if depth == 0 {
        return Err(CliError::config("classification depth must be at least 1"));
    }
    let spec = gamma_spec::<f64>(&cfg.instance.gamma);
    // Cover at least two resonance periods for roots of unity so the exact
    // zeros are visible in the table.
    let n_max = match spec.root_period() {
        Some(p) => depth.max(2 * p),
        None => depth,
    };
    let profile = small_divisor_profile(&spec, n_max)?;
    let quotients = quotient_diagnostics(&cfg.instance.gamma, 64, report)?;

    summary.push(format!(
        "regime: {}   gamma = {}",
        profile.regime.as_str(),
        profile.gamma
    ));
    summary.push(format!(
        "divisors |gamma^n - 1| for n = 1..={}: min {}",
        n_max, profile.min_divisor
    ));
    if !profile.resonant_indices.is_empty() {
        let idx: Vec<String> = profile
            .resonant_indices
            .iter()
            .map(|n| n.to_string())
            .collect();
        summary.push(format!("exact resonances at n = {}", idx.join(", ")));
    }
    if let Some(cap) = &profile.gamma_cap {
        summary.push(format!("uniform reciprocal-divisor cap: {cap}"));
    }
    if let Some((cf, sums)) = &quotients {
        let qs: Vec<String> = cf
            .partial_quotients()
            .iter()
            .take(24)
            .map(|a| a.to_string())
            .collect();
        let ellipsis = if cf.partial_quotients().len() > 24 {
            ", ..."
        } else {
            ""
        };
        summary.push(format!(
            "certified partial quotients ({}{}): [{}{}]",
            cf.partial_quotients().len(),
            if cf.is_exact() { ", exact" } else { "" },
            qs.join(", "),
            ellipsis
        ));
        if let Some(last) = sums.last() {
            summary.push(format!(
                "partial Brjuno sums: B_0 = {}, ..., B_{} = {}",
                sums[0],
                sums.len() - 1,
                last
            ));
        }
    }

    let quotient_info = quotients
        .as_ref()
        .map(|(cf, _)| (cf.partial_quotients().to_vec(), cf.is_exact()));
    let sums = quotients.map(|(_, s)| s).unwrap_or_default();
    report.absorb_profile(&profile, quotient_info, sums);
    Ok(None)
}
