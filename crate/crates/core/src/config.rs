//! Network description: cycle geometry, slices, traffic rates, and the
//! key-value config file format.

use std::fmt;
use std::path::Path;

use crate::scalar::{fl, Scalar};

/// Static description of the PON under simulation.
///
/// Time-like fields (`cycle_length`, `guards`, `unit_time`, `delta_t`) share
/// one abstract unit; with the default `cycle_length = 1.0` they read as
/// fractions of a cycle. Arrival rates are packets per cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct PonConfig<F> {
    /// Number of ONUs `N`.
    pub num_onus: usize,
    /// Cycle length `C`.
    pub cycle_length: F,
    /// Guard window after each ONU's transmission window.
    pub guards: Vec<F>,
    /// Slice index of each ONU. Every ONU belongs to exactly one slice.
    pub slice_of: Vec<usize>,
    /// Priority weight `p_j` per slice; all positive.
    pub slice_weights: Vec<F>,
    /// Poisson arrival rate per ONU, packets per cycle.
    pub lambdas: Vec<F>,
    /// Transmission time of one packet.
    pub unit_time: F,
    /// Lag between an ONU's queue report and its window. Traffic arriving
    /// inside the lag is invisible to the report of that cycle.
    pub delta_t: F,
}

impl<F: Scalar> PonConfig<F> {
    /// Capacity left for transmission windows once guards are paid.
    pub fn capacity(&self) -> F {
        self.cycle_length - self.guards.iter().fold(F::zero(), |a, &d| a + d)
    }

    /// Priority weight of the slice owning `onu`.
    pub fn weight_of(&self, onu: usize) -> F {
        self.slice_weights[self.slice_of[onu]]
    }

    pub fn builder(num_onus: usize) -> PonConfigBuilder<F> {
        PonConfigBuilder {
            config: PonConfig {
                num_onus,
                cycle_length: F::one(),
                guards: vec![F::zero(); num_onus],
                slice_of: vec![0; num_onus],
                slice_weights: vec![F::one()],
                lambdas: vec![F::one(); num_onus],
                unit_time: fl(0.01),
                delta_t: F::zero(),
            },
        }
    }

    /// Checks every structural invariant, collecting all violations rather
    /// than stopping at the first.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut violations = Vec::new();
        let n = self.num_onus;
        if n == 0 {
            violations.push(ConfigViolation::NoOnus);
        }
        if self.cycle_length <= F::zero() {
            violations.push(ConfigViolation::NonPositiveCycleLength(to_f64(
                self.cycle_length,
            )));
        }
        for (field, len) in [
            ("guards", self.guards.len()),
            ("slice_of", self.slice_of.len()),
            ("lambdas", self.lambdas.len()),
        ] {
            if len != n {
                violations.push(ConfigViolation::WrongLength {
                    field,
                    expected: n,
                    got: len,
                });
            }
        }
        for (i, &d) in self.guards.iter().enumerate() {
            if d < F::zero() {
                violations.push(ConfigViolation::NegativeGuard {
                    onu: i,
                    guard: to_f64(d),
                });
            }
        }
        let guard_total = self.guards.iter().fold(F::zero(), |a, &d| a + d);
        if guard_total >= self.cycle_length {
            violations.push(ConfigViolation::CapacityExhausted {
                guard_total: to_f64(guard_total),
                cycle_length: to_f64(self.cycle_length),
            });
        }
        if self.slice_of.len() == n {
            for (i, &j) in self.slice_of.iter().enumerate() {
                if j >= self.slice_weights.len() {
                    violations.push(ConfigViolation::SlicePartitionBroken(format!(
                        "onu {i} maps to slice {j} but only {} slice weights are given",
                        self.slice_weights.len()
                    )));
                }
            }
        } else {
            violations.push(ConfigViolation::SlicePartitionBroken(format!(
                "slice map covers {} of {n} onus",
                self.slice_of.len()
            )));
        }
        for (j, &p) in self.slice_weights.iter().enumerate() {
            if p <= F::zero() {
                violations.push(ConfigViolation::NonPositiveWeight {
                    slice: j,
                    weight: to_f64(p),
                });
            }
        }
        for (i, &l) in self.lambdas.iter().enumerate() {
            if l < F::zero() {
                violations.push(ConfigViolation::NegativeRate {
                    onu: i,
                    rate: to_f64(l),
                });
            }
        }
        if self.unit_time <= F::zero() {
            violations.push(ConfigViolation::NonPositiveUnitTime(to_f64(self.unit_time)));
        }
        if self.delta_t < F::zero() {
            violations.push(ConfigViolation::NegativeDelta(to_f64(self.delta_t)));
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(violations))
        }
    }

    /// Parses the key-value config format. `source_name` labels error
    /// positions (usually the file path).
    ///
    /// Syntax: one `key = value` pair per line; `#` starts a comment;
    /// vector values are whitespace- or comma-separated; a single number
    /// given for a per-ONU vector is broadcast to all ONUs.
    ///
    /// Keys: `num_onus` (required, first), `cycle_length`, `unit_time`,
    /// `delta_t`, `guards`, `lambdas`, `slices`, `slice_weights`.
    pub fn from_key_value_str(text: &str, source_name: &str) -> Result<Self, ConfigError> {
        let parse_err = |line: usize, message: String| ConfigError::Parse {
            source_name: source_name.to_string(),
            line,
            message,
        };
        let mut entries: Vec<(usize, &str, &str)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let stripped = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if stripped.is_empty() {
                continue;
            }
            let (key, value) = stripped
                .split_once('=')
                .ok_or_else(|| parse_err(line_no, "expected `key = value`".into()))?;
            let key = key.trim();
            let value = value.trim();
            if entries.iter().any(|&(_, k, _)| k == key) {
                return Err(parse_err(line_no, format!("duplicate key `{key}`")));
            }
            entries.push((line_no, key, value));
        }

        let lookup = |key: &str| entries.iter().find(|&&(_, k, _)| k == key).copied();
        let (n_line, _, n_str) = lookup("num_onus")
            .ok_or_else(|| parse_err(text.lines().count().max(1), "missing key `num_onus`".into()))?;
        let num_onus: usize = n_str
            .parse()
            .map_err(|_| parse_err(n_line, format!("num_onus: expected an integer, got `{n_str}`")))?;

        let mut config = PonConfig::<F>::builder(num_onus).build();
        for &(line, key, value) in &entries {
            match key {
                "num_onus" => {}
                "cycle_length" => config.cycle_length = parse_scalar(value, key, line, &parse_err)?,
                "unit_time" => config.unit_time = parse_scalar(value, key, line, &parse_err)?,
                "delta_t" => config.delta_t = parse_scalar(value, key, line, &parse_err)?,
                "guards" => {
                    config.guards = parse_vector(value, key, num_onus, true, line, &parse_err)?
                }
                "lambdas" => {
                    config.lambdas = parse_vector(value, key, num_onus, true, line, &parse_err)?
                }
                "slices" => {
                    let raw: Vec<F> =
                        parse_vector(value, key, num_onus, false, line, &parse_err)?;
                    config.slice_of = raw
                        .iter()
                        .map(|&v| {
                            let as_f64 = to_f64(v);
                            if as_f64.fract() != 0.0 || as_f64 < 0.0 {
                                Err(parse_err(
                                    line,
                                    format!("slices: expected non-negative integers, got `{value}`"),
                                ))
                            } else {
                                Ok(as_f64 as usize)
                            }
                        })
                        .collect::<Result<_, _>>()?;
                }
                "slice_weights" => {
                    config.slice_weights = split_values(value)
                        .map(|tok| {
                            tok.parse::<f64>().map(fl).map_err(|_| {
                                parse_err(line, format!("slice_weights: bad number `{tok}`"))
                            })
                        })
                        .collect::<Result<_, _>>()?;
                }
                other => {
                    return Err(parse_err(line, format!("unknown key `{other}`")));
                }
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_key_value_str(&text, &path.display().to_string())
    }
}

fn split_values(value: &str) -> impl Iterator<Item = &str> {
    value
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
}

fn parse_scalar<F: Scalar>(
    value: &str,
    key: &str,
    line: usize,
    err: &impl Fn(usize, String) -> ConfigError,
) -> Result<F, ConfigError> {
    value
        .parse::<f64>()
        .map(fl)
        .map_err(|_| err(line, format!("{key}: expected a number, got `{value}`")))
}

fn parse_vector<F: Scalar>(
    value: &str,
    key: &str,
    n: usize,
    broadcast: bool,
    line: usize,
    err: &impl Fn(usize, String) -> ConfigError,
) -> Result<Vec<F>, ConfigError> {
    let vals: Vec<F> = split_values(value)
        .map(|tok| {
            tok.parse::<f64>()
                .map(fl)
                .map_err(|_| err(line, format!("{key}: bad number `{tok}`")))
        })
        .collect::<Result<_, _>>()?;
    if vals.len() == n {
        Ok(vals)
    } else if vals.len() == 1 && broadcast {
        Ok(vec![vals[0]; n])
    } else {
        Err(err(
            line,
            format!("{key}: expected {n} values (or 1 to broadcast), got {}", vals.len()),
        ))
    }
}

fn to_f64<F: Scalar>(v: F) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

pub struct PonConfigBuilder<F> {
    config: PonConfig<F>,
}

impl<F: Scalar> PonConfigBuilder<F> {
    pub fn cycle_length(mut self, c: F) -> Self {
        self.config.cycle_length = c;
        self
    }
    pub fn guards(mut self, d: Vec<F>) -> Self {
        self.config.guards = d;
        self
    }
    pub fn slice_of(mut self, s: Vec<usize>) -> Self {
        self.config.slice_of = s;
        self
    }
    pub fn slice_weights(mut self, p: Vec<F>) -> Self {
        self.config.slice_weights = p;
        self
    }
    pub fn lambdas(mut self, l: Vec<F>) -> Self {
        self.config.lambdas = l;
        self
    }
    pub fn unit_time(mut self, s: F) -> Self {
        self.config.unit_time = s;
        self
    }
    pub fn delta_t(mut self, dt: F) -> Self {
        self.config.delta_t = dt;
        self
    }
    pub fn build(self) -> PonConfig<F> {
        self.config
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigViolation {
    #[error("guard windows consume the whole cycle: sum(d) = {guard_total}, C = {cycle_length}")]
    CapacityExhausted { guard_total: f64, cycle_length: f64 },
    #[error("slice partition broken: {0}")]
    SlicePartitionBroken(String),
    #[error("slice weight p[{slice}] = {weight} must be positive")]
    NonPositiveWeight { slice: usize, weight: f64 },
    #[error("arrival rate lambda[{onu}] = {rate} must be non-negative")]
    NegativeRate { onu: usize, rate: f64 },
    #[error("guard d[{onu}] = {guard} must be non-negative")]
    NegativeGuard { onu: usize, guard: f64 },
    #[error("unit_time = {0} must be positive")]
    NonPositiveUnitTime(f64),
    #[error("delta_t = {0} must be non-negative")]
    NegativeDelta(f64),
    #[error("{field}: expected {expected} entries, got {got}")]
    WrongLength {
        field: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("num_onus must be positive")]
    NoOnus,
    #[error("cycle_length = {0} must be positive")]
    NonPositiveCycleLength(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Invalid(Vec<ConfigViolation>),
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },
    Io {
        path: String,
        message: String,
    },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Invalid(violations) => {
                write!(f, "invalid configuration:")?;
                for v in violations {
                    write!(f, "\n  - {v}")?;
                }
                Ok(())
            }
            ConfigError::Parse {
                source_name,
                line,
                message,
            } => write!(f, "{source_name}:{line}: {message}"),
            ConfigError::Io { path, message } => write!(f, "{path}: {message}"),
        }
    }
}

impl std::error::Error for ConfigError {}
