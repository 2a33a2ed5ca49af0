//! Scenario documents: the JSON input format, load-time validation with
//! line-anchored errors, and the inverse emitter.
//!
//! A scenario file looks like:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "time_unit": "months",
//!   "player_a": {
//!     "initial_delay": { "kind": "deterministic", "value": 0.0 },
//!     "cycle": { "kind": "deterministic", "value": 6.0 }
//!   },
//!   "player_b": {
//!     "initial_delay": { "kind": "deterministic", "value": 5.0 },
//!     "cycle": { "kind": "deterministic", "value": 4.0 }
//!   },
//!   "t_star": 17.95,
//!   "mode": "deterministic",
//!   "replications": 1,
//!   "seed": 0
//! }
//! ```
//!
//! Each player block may also carry a `"curve"` object (kinds
//! `exponential-saturation`, `logistic`, `linear-ramp`, `tabulated`, each
//! with an optional `t_max` horizon). `t_star` may then be omitted and is
//! computed from the curves; when either curve is absent the file must pin
//! `t_star` directly. Duration laws are `{"kind": "deterministic",
//! "value": x}` or `{"kind": "exponential", "rate": r}`.
//!
//! Every invariant is checked at load time and reported with the line and
//! column of the offending value.

use duel_core::curves::{CurveKind, SuccessCurve};
use duel_core::engine::{DuelScenario, PlayerSpec};
use duel_core::renewal::{Distribution, RenewalSpec};
use serde::ser::Error as _;
use serde::{Deserialize, Serialize, Serializer};

/// The schema generation this build reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

/// A scenario-file problem, anchored to its position in the source text.
///
/// Syntax errors and scalar-valued validation failures anchor on the
/// offending token; validation failures of an inline object (a
/// distribution or curve) anchor on the first token after that object,
/// which for pretty-printed files is the line below it.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ScenarioError {
    /// 1-based line of the offending value.
    pub line: usize,
    /// 1-based column of the offending value.
    pub column: usize,
    /// What is wrong with it.
    pub message: String,
}

/// Version marker; only [`SCHEMA_VERSION`] deserializes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct SchemaVersion(u32);

impl SchemaVersion {
    /// The marker this build writes.
    pub const CURRENT: SchemaVersion = SchemaVersion(SCHEMA_VERSION);
}

impl TryFrom<u32> for SchemaVersion {
    type Error = String;

    fn try_from(version: u32) -> Result<SchemaVersion, String> {
        if version == SCHEMA_VERSION {
            Ok(SchemaVersion(version))
        } else {
            Err(format!(
                "unsupported schema_version {version}; this build reads version {SCHEMA_VERSION}"
            ))
        }
    }
}

impl From<SchemaVersion> for u32 {
    fn from(version: SchemaVersion) -> u32 {
        version.0
    }
}

/// Execution mode a scenario file declares. Subcommands pick the actual
/// route; the declared mode records intent and drives validation (sampling
/// modes require a positive replication count).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    /// Exact arithmetic on deterministic durations.
    Deterministic,
    /// Seeded sampling.
    MonteCarlo,
    /// Closed-form/transform evaluation.
    Analytic,
    /// Whatever route the invoked operation prefers.
    All,
}

impl RunMode {
    /// The on-disk spelling.
    pub fn label(self) -> &'static str {
        match self {
            RunMode::Deterministic => "deterministic",
            RunMode::MonteCarlo => "monte-carlo",
            RunMode::Analytic => "analytic",
            RunMode::All => "all",
        }
    }
}

/// On-disk form of a duration law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum RawDistribution {
    Deterministic { value: f64 },
    Exponential { rate: f64 },
}

/// A duration law as stored in a file; parsing rejects invalid parameters
/// at the place they appear.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct DistSpec(pub Distribution);

impl TryFrom<RawDistribution> for DistSpec {
    type Error = String;

    fn try_from(raw: RawDistribution) -> Result<DistSpec, String> {
        let law = match raw {
            RawDistribution::Deterministic { value } => Distribution::Deterministic { value },
            RawDistribution::Exponential { rate } => Distribution::Exponential { rate },
        };
        law.validate().map_err(|e| e.to_string())?;
        Ok(DistSpec(law))
    }
}

impl Serialize for DistSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let raw = match &self.0 {
            Distribution::Deterministic { value } => {
                RawDistribution::Deterministic { value: *value }
            }
            Distribution::Exponential { rate } => RawDistribution::Exponential { rate: *rate },
            _ => return Err(S::Error::custom("unsupported duration law")),
        };
        raw.serialize(serializer)
    }
}

/// On-disk form of a success curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum RawCurve {
    ExponentialSaturation {
        rate: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t_max: Option<f64>,
    },
    Logistic {
        midpoint: f64,
        steepness: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t_max: Option<f64>,
    },
    LinearRamp {
        t_ramp: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t_max: Option<f64>,
    },
    Tabulated {
        knots: Vec<(f64, f64)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t_max: Option<f64>,
    },
}

/// A success curve as stored in a file; parsing rejects invalid parameters
/// (non-positive rates, non-monotone knots, bad horizons) at the place they
/// appear.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(try_from = "RawCurve")]
pub struct CurveSpec(pub SuccessCurve);

impl TryFrom<RawCurve> for CurveSpec {
    type Error = String;

    fn try_from(raw: RawCurve) -> Result<CurveSpec, String> {
        let (kind, t_max) = match raw {
            RawCurve::ExponentialSaturation { rate, t_max } => {
                (CurveKind::ExponentialSaturation { rate }, t_max)
            }
            RawCurve::Logistic {
                midpoint,
                steepness,
                t_max,
            } => (
                CurveKind::Logistic {
                    midpoint,
                    steepness,
                },
                t_max,
            ),
            RawCurve::LinearRamp { t_ramp, t_max } => (CurveKind::LinearRamp { t_ramp }, t_max),
            RawCurve::Tabulated { knots, t_max } => (CurveKind::Tabulated { knots }, t_max),
        };
        SuccessCurve::new(kind, t_max)
            .map(CurveSpec)
            .map_err(|e| e.to_string())
    }
}

impl Serialize for CurveSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let t_max = self.0.t_max();
        let raw = match self.0.kind() {
            CurveKind::ExponentialSaturation { rate } => RawCurve::ExponentialSaturation {
                rate: *rate,
                t_max,
            },
            CurveKind::Logistic {
                midpoint,
                steepness,
            } => RawCurve::Logistic {
                midpoint: *midpoint,
                steepness: *steepness,
                t_max,
            },
            CurveKind::LinearRamp { t_ramp } => RawCurve::LinearRamp {
                t_ramp: *t_ramp,
                t_max,
            },
            CurveKind::Tabulated { knots } => RawCurve::Tabulated {
                knots: knots.clone(),
                t_max,
            },
            _ => return Err(S::Error::custom("unsupported curve kind")),
        };
        raw.serialize(serializer)
    }
}

/// One player's block in a scenario file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayerBlock {
    /// Success curve; omit when the file pins `t_star`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveSpec>,
    /// Law of the first decision epoch.
    pub initial_delay: DistSpec,
    /// Law of every later inter-decision gap.
    pub cycle: DistSpec,
}

/// A parsed and validated scenario document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    /// Must equal [`SCHEMA_VERSION`].
    pub schema_version: SchemaVersion,
    /// Unit of every time-valued quantity (a label; not interpreted).
    pub time_unit: String,
    /// Player A (wins ties).
    pub player_a: PlayerBlock,
    /// Player B.
    pub player_b: PlayerBlock,
    /// Pinned crossing moment; required when either curve is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_star: Option<f64>,
    /// Declared execution mode.
    pub mode: RunMode,
    /// Replication count for sampling runs (default 1).
    #[serde(default = "default_replications")]
    pub replications: u64,
    /// Root seed for sampling runs (default 0).
    #[serde(default)]
    pub seed: u64,
}

fn default_replications() -> u64 {
    1
}

impl ScenarioFile {
    /// Builds the engine scenario. Infallible on a loaded file: every
    /// constraint the engine constructors check was already validated by
    /// [`load_scenario`].
    pub fn to_duel(&self) -> DuelScenario {
        let player = |block: &PlayerBlock| PlayerSpec {
            curve: block.curve.as_ref().map(|c| c.0.clone()),
            renewal: RenewalSpec::new(block.initial_delay.0.clone(), block.cycle.0.clone())
                .expect("duration laws were validated at load"),
        };
        DuelScenario::new(
            player(&self.player_a),
            player(&self.player_b),
            self.t_star,
            None,
        )
        .expect("cross-field constraints were validated at load")
    }
}

/// Parses and fully validates a scenario document.
///
/// # Errors
///
/// [`ScenarioError`] carrying the line and column of the first problem:
/// syntax errors, type mismatches, unknown keys, invalid curve or
/// distribution parameters, an unsupported `schema_version`, a sampling
/// mode without replications, or a missing `t_star` when a curve is absent.
pub fn load_scenario(text: &str) -> Result<ScenarioFile, ScenarioError> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(from_serde)?;
    if matches!(file.mode, RunMode::MonteCarlo | RunMode::All) && file.replications == 0 {
        return Err(anchored(
            text,
            "replications",
            format!("{} mode needs replications >= 1", file.mode.label()),
        ));
    }
    if file.t_star.is_none() {
        for (key, block) in [("player_a", &file.player_a), ("player_b", &file.player_b)] {
            if block.curve.is_none() {
                return Err(anchored(
                    text,
                    key,
                    format!("{key} has no curve, so the file must pin t_star"),
                ));
            }
        }
    }
    if let Some(t_star) = file.t_star {
        if !t_star.is_finite() || t_star < 0.0 {
            return Err(anchored(text, "t_star", "t_star must be finite and >= 0"));
        }
    }
    Ok(file)
}

/// Serializes a scenario document; [`load_scenario`] of the result gives
/// back an equal [`ScenarioFile`].
pub fn emit_scenario(file: &ScenarioFile) -> String {
    let mut text =
        serde_json::to_string_pretty(file).expect("scenario documents always serialize");
    text.push('\n');
    text
}

/// Converts a serde_json error, stripping its own position suffix (the
/// position moves into the structured fields).
fn from_serde(err: serde_json::Error) -> ScenarioError {
    let line = err.line().max(1);
    let column = err.column().max(1);
    let mut message = err.to_string();
    if let Some(at) = message.rfind(" at line ") {
        message.truncate(at);
    }
    ScenarioError {
        line,
        column,
        message,
    }
}

/// Error anchored at the first occurrence of `"key"` in the text (line 1
/// when the key is absent).
fn anchored(text: &str, key: &str, message: impl Into<String>) -> ScenarioError {
    let needle = format!("\"{key}\"");
    let (line, column) = match text.find(&needle) {
        Some(byte) => {
            let prefix = &text[..byte];
            let line = prefix.bytes().filter(|&b| b == b'\n').count() + 1;
            let column = byte - prefix.rfind('\n').map_or(0, |i| i + 1) + 1;
            (line, column)
        }
        None => (1, 1),
    };
    ScenarioError {
        line,
        column,
        message: message.into(),
    }
}
