//! Run configuration: the TOML schema, command-line override parsing, and
//! the structural checks a run needs before any arithmetic starts.
//!
//! A configuration names one problem instance
//!
//! ```text
//! a₂·x″(z) + a₁·x′(z) + a₀·x(z) = x(p(z) + b·x′(z)) + h(z)
//! ```
//!
//! through the coefficients `a₀, a₁, a₂, b`, the polynomials `p` and `h`
//! (coefficient lists, constant term first), the eigenvalue γ (tagged by
//! regime), the seed derivative η, and the truncation order.  Complex
//! numbers travel as two-element arrays `[re, im]`; γ is a tagged table so
//! the declared regime is part of the input, never an inference.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Wire form of a complex number: `[re, im]`.
pub type ComplexPair = [f64; 2];

/// A malformed configuration (file, TOML value, or flag override).
#[derive(Debug, Error)]
#[error("invalid configuration: {0}")]
pub struct ConfigError(pub String);

fn bad<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// Working precision: machine doubles or software floats with a requested
/// number of significant decimal digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Precision {
    Double,
    Extended(usize),
}

impl Precision {
    /// The digit count the solver core expects (`None` = doubles).
    pub fn digits(self) -> Option<usize> {
        match self {
            Precision::Double => None,
            Precision::Extended(d) => Some(d),
        }
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::Double
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Double => write!(f, "double"),
            Precision::Extended(d) => write!(f, "extended:{d}"),
        }
    }
}

impl FromStr for Precision {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "double" {
            return Ok(Precision::Double);
        }
        if let Some(rest) = s.strip_prefix("extended:") {
            let digits: usize = rest
                .trim()
                .parse()
                .map_err(|_| ConfigError(format!("bad digit count in precision '{s}'")))?;
            if digits == 0 {
                return bad("extended precision needs at least one digit");
            }
            return Ok(Precision::Extended(digits));
        }
        bad(format!(
            "precision must be 'double' or 'extended:DIGITS', got '{s}'"
        ))
    }
}

impl TryFrom<String> for Precision {
    type Error = ConfigError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Precision> for String {
    fn from(p: Precision) -> String {
        p.to_string()
    }
}

/// The eigenvalue γ, tagged by declared regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GammaConfig {
    /// `0 < |γ| < 1`, given directly.
    InsideDisk { value: ComplexPair },
    /// `γ = e^{2πiθ}` with θ declared irrational, given either as a decimal
    /// string (every written digit is trusted) or as a partial-quotient
    /// list.  Exactly one of the two fields must be present.
    IrrationalRotation {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        quotients: Option<Vec<u64>>,
    },
    /// `γ = e^{2πiq/p}`, a primitive p-th root of unity.
    RootOfUnity { q: i64, p: u64 },
}

/// The problem instance as written in the `[instance]` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub a0: ComplexPair,
    pub a1: ComplexPair,
    pub a2: ComplexPair,
    pub b: ComplexPair,
    /// Coefficients of p(z), constant term first; `[[2,1],[0,2],[1,0]]`
    /// means `(2+i) + 2i·z + z²`.
    pub p: Vec<ComplexPair>,
    /// Coefficients of h(z), same layout as `p`.
    pub h: Vec<ComplexPair>,
    pub gamma: GammaConfig,
    pub eta: ComplexPair,
    /// Truncation order N of the auxiliary series g.
    pub order: usize,
    /// Values for the free coefficients `c_{vp+1}` at satisfied resonances,
    /// keyed by the occurrence count v (TOML keys are strings).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub free_coeffs: BTreeMap<String, ComplexPair>,
}

/// Where results go; both sinks are optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputsConfig {
    /// JSON run report.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    /// CSV dump of the g coefficients.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

/// Switches that change how much work a run does.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TogglesConfig {
    /// Recompute all residual norms after the solve (on by default).
    pub verify: bool,
    /// Derive the domination sequence and radius diagnostics.
    pub majorant: bool,
    /// Cross-check the recurrence against the literal resonance numerator
    /// Θ(n, γ) for n = 1..=depth; 0 disables the check.
    pub oracle_check_depth: usize,
}

impl Default for TogglesConfig {
    fn default() -> Self {
        TogglesConfig {
            verify: true,
            majorant: false,
            oracle_check_depth: 4,
        }
    }
}

/// A full run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub instance: InstanceConfig,
    #[serde(default)]
    pub precision: Precision,
    #[serde(default)]
    pub outputs: OutputsConfig,
    #[serde(default)]
    pub toggles: TogglesConfig,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| ConfigError(format!("TOML parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("a RunConfig always serializes")
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Structural invariants a run relies on.  Deeper numeric checks (γ in
    /// range, coprimality, nonzero pivots) belong to the solver core and are
    /// reported through its own error types.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let inst = &self.instance;
        if inst.order < 4 {
            return bad(format!(
                "order must be at least 4 (got {}): the pipeline reports \
                 residuals through order N−3",
                inst.order
            ));
        }
        if inst.p.is_empty() || inst.h.is_empty() {
            return bad("p and h need at least one coefficient (use [[0, 0]] for zero)");
        }
        let finite_pair = |name: &str, v: &ComplexPair| {
            if v[0].is_finite() && v[1].is_finite() {
                Ok(())
            } else {
                bad(format!("{name} must be finite"))
            }
        };
        finite_pair("a0", &inst.a0)?;
        finite_pair("a1", &inst.a1)?;
        finite_pair("a2", &inst.a2)?;
        finite_pair("b", &inst.b)?;
        finite_pair("eta", &inst.eta)?;
        for (j, c) in inst.p.iter().enumerate() {
            finite_pair(&format!("p[{j}]"), c)?;
        }
        for (j, c) in inst.h.iter().enumerate() {
            finite_pair(&format!("h[{j}]"), c)?;
        }
        match &inst.gamma {
            GammaConfig::InsideDisk { value } => finite_pair("gamma", value)?,
            GammaConfig::IrrationalRotation { theta, quotients } => {
                match (theta, quotients) {
                    (Some(_), Some(_)) => {
                        return bad("gamma: give either theta or quotients, not both")
                    }
                    (None, None) => return bad("gamma: irrational_rotation needs theta or quotients"),
                    _ => {}
                }
            }
            GammaConfig::RootOfUnity { .. } => {}
        }
        for (key, value) in &inst.free_coeffs {
            let v: u64 = key.parse().map_err(|_| {
                ConfigError(format!("free_coeffs key '{key}' is not a positive integer"))
            })?;
            if v == 0 {
                return bad("free_coeffs keys count resonance occurrences and start at 1");
            }
            finite_pair(&format!("free_coeffs[{key}]"), value)?;
        }
        Ok(())
    }
}

/// Command-line overrides, applied on top of a file (or built-in) config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub order: Option<usize>,
    pub eta: Option<String>,
    pub gamma: Option<String>,
    pub precision: Option<String>,
    pub report: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub free_coeffs: Option<String>,
    pub verify: Option<bool>,
    pub majorant: Option<bool>,
    pub oracle_check_depth: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<(), ConfigError> {
        if let Some(order) = self.order {
            cfg.instance.order = order;
        }
        if let Some(eta) = &self.eta {
            cfg.instance.eta = parse_complex_pair(eta)?;
        }
        if let Some(gamma) = &self.gamma {
            cfg.instance.gamma = parse_gamma_flag(gamma)?;
        }
        if let Some(precision) = &self.precision {
            cfg.precision = precision.parse()?;
        }
        if let Some(report) = &self.report {
            cfg.outputs.report = Some(report.clone());
        }
        if let Some(csv) = &self.csv {
            cfg.outputs.csv = Some(csv.clone());
        }
        if let Some(free) = &self.free_coeffs {
            cfg.instance.free_coeffs = parse_free_coeffs(free)?;
        }
        if let Some(verify) = self.verify {
            cfg.toggles.verify = verify;
        }
        if let Some(majorant) = self.majorant {
            cfg.toggles.majorant = majorant;
        }
        if let Some(depth) = self.oracle_check_depth {
            cfg.toggles.oracle_check_depth = depth;
        }
        cfg.validate()
    }
}

/// `"re,im"` or a plain real `"re"`.
pub fn parse_complex_pair(s: &str) -> Result<ComplexPair, ConfigError> {
    let s = s.trim();
    let parse_part = |part: &str, what: &str| {
        part.trim()
            .parse::<f64>()
            .map_err(|_| ConfigError(format!("bad {what} '{part}' in complex value '{s}'")))
    };
    match s.split_once(',') {
        Some((re, im)) => Ok([parse_part(re, "real part")?, parse_part(im, "imaginary part")?]),
        None => Ok([parse_part(s, "real value")?, 0.0]),
    }
}

/// The `--gamma` forms:
///
/// * `0.5` or `0.3,-0.2` — a point strictly inside the unit disk;
/// * `Q/P` (e.g. `-1/5`) — the root of unity `e^{2πiQ/P}`;
/// * `theta:0.6180339887…` — a rotation number as a trusted decimal;
/// * `theta:[1,1,1,1]` — a rotation number by partial quotients.
pub fn parse_gamma_flag(s: &str) -> Result<GammaConfig, ConfigError> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("theta:") {
        let rest = rest.trim();
        if let Some(inner) = rest.strip_prefix('[') {
            let inner = inner
                .strip_suffix(']')
                .ok_or_else(|| ConfigError(format!("unclosed quotient list in '{s}'")))?;
            let mut quotients = Vec::new();
            for part in inner.split(',') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                let a: u64 = part.parse().map_err(|_| {
                    ConfigError(format!("bad partial quotient '{part}' in '{s}'"))
                })?;
                quotients.push(a);
            }
            if quotients.is_empty() {
                return bad(format!("empty quotient list in '{s}'"));
            }
            return Ok(GammaConfig::IrrationalRotation {
                theta: None,
                quotients: Some(quotients),
            });
        }
        if rest.is_empty() {
            return bad("theta: needs a decimal or a quotient list");
        }
        return Ok(GammaConfig::IrrationalRotation {
            theta: Some(rest.to_string()),
            quotients: None,
        });
    }
    if let Some((q, p)) = s.split_once('/') {
        let q: i64 = q
            .trim()
            .parse()
            .map_err(|_| ConfigError(format!("bad numerator '{q}' in root of unity '{s}'")))?;
        let p: u64 = p
            .trim()
            .parse()
            .map_err(|_| ConfigError(format!("bad denominator '{p}' in root of unity '{s}'")))?;
        return Ok(GammaConfig::RootOfUnity { q, p });
    }
    Ok(GammaConfig::InsideDisk {
        value: parse_complex_pair(s)?,
    })
}

/// `--free-coeffs "1=[re,im],3=[re,im]"`.
pub fn parse_free_coeffs(s: &str) -> Result<BTreeMap<String, ComplexPair>, ConfigError> {
    let mut out = BTreeMap::new();
    let mut rest = s.trim();
    if rest.is_empty() {
        return bad("empty free-coefficient list");
    }
    while !rest.is_empty() {
        let (key, after_eq) = rest
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("expected 'v=[re,im]' near '{rest}'")))?;
        let key = key.trim();
        let v: u64 = key
            .parse()
            .map_err(|_| ConfigError(format!("bad occurrence count '{key}' in free coefficients")))?;
        if v == 0 {
            return bad("free-coefficient occurrence counts start at 1");
        }
        let after_eq = after_eq.trim_start();
        let inner = after_eq
            .strip_prefix('[')
            .ok_or_else(|| ConfigError(format!("expected '[' after '{key}=' in free coefficients")))?;
        let (pair_text, tail) = inner
            .split_once(']')
            .ok_or_else(|| ConfigError(format!("unclosed '[' after '{key}=' in free coefficients")))?;
        let pair = parse_complex_pair(pair_text)?;
        if out.insert(key.to_string(), pair).is_some() {
            return bad(format!("occurrence count {key} listed twice in free coefficients"));
        }
        rest = tail.trim_start();
        if let Some(t) = rest.strip_prefix(',') {
            rest = t.trim_start();
            if rest.is_empty() {
                return bad("trailing ',' in free coefficients");
            }
        } else if !rest.is_empty() {
            return bad(format!("expected ',' between free coefficients near '{rest}'"));
        }
    }
    Ok(out)
}
