use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::DensityMatrix;

/// Axis spacing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::Linear => "linear",
            Scale::Log => "log",
        })
    }
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lin" | "linear" => Ok(Scale::Linear),
            "log" => Ok(Scale::Log),
            _ => Err(Error::InvalidInput(format!("unknown axis scale '{s}' (expected linear or log)"))),
        }
    }
}

/// One sweep axis: `count` points from `min` to `max` inclusive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub scale: Scale,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize, scale: Scale) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::InvalidInput(format!("axis bounds must be finite, got {min}:{max}")));
        }
        if count == 0 {
            return Err(Error::InvalidInput("axis count must be at least 1".into()));
        }
        if min > max {
            return Err(Error::InvalidInput(format!("axis min {min} exceeds max {max}")));
        }
        if scale == Scale::Log && min <= 0.0 {
            return Err(Error::InvalidInput(format!("log axis needs min > 0, got {min}")));
        }
        Ok(Self { min, max, count, scale })
    }

    pub fn single(value: f64) -> Result<Self> {
        Self::new(value, value, 1, Scale::Linear)
    }

    /// Axis points; the end points are reproduced exactly.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i + 1 == self.count {
                    return self.max;
                }
                let u = i as f64 / last;
                match self.scale {
                    Scale::Linear => self.min + u * (self.max - self.min),
                    Scale::Log => (self.min.ln() + u * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.min, self.max, self.count, self.scale)
    }
}

impl FromStr for Axis {
    type Err = Error;

    /// `min:max:count:scale`, `min:max:count` (linear) or a single value.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let num = |x: &str| {
            x.parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad number '{x}' in axis '{s}'")))
        };
        match parts.as_slice() {
            [v] => Self::single(num(v)?),
            [lo, hi, n] | [lo, hi, n, _] => {
                let count = n
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidInput(format!("bad count '{n}' in axis '{s}'")))?;
                let scale = match parts.get(3) {
                    Some(sc) => sc.parse()?,
                    None => Scale::Linear,
                };
                Self::new(num(lo)?, num(hi)?, count, scale)
            }
            _ => Err(Error::InvalidInput(format!("cannot parse axis '{s}' (expected min:max:count:scale)"))),
        }
    }
}

/// Initial state selector: `x+|x-|y+|y-|z+|z-` or `bloch:x,y,z`.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialState {
    label: String,
    rho: DensityMatrix,
}

impl InitialState {
    pub fn x_plus() -> Self {
        Self { label: "x+".into(), rho: DensityMatrix::x_plus() }
    }

    pub fn rho(&self) -> DensityMatrix {
        self.rho
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

impl FromStr for InitialState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let rho = match s {
            "x+" => DensityMatrix::x_plus(),
            "x-" => DensityMatrix::x_minus(),
            "y+" => DensityMatrix::y_plus(),
            "y-" => DensityMatrix::y_minus(),
            "z+" => DensityMatrix::z_plus(),
            "z-" => DensityMatrix::z_minus(),
            _ => {
                let coords = s.strip_prefix("bloch:").ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "unknown initial state '{s}' (expected x+|x-|y+|y-|z+|z- or bloch:x,y,z)"
                    ))
                })?;
                let r: Vec<f64> = coords
                    .split(',')
                    .map(|c| c.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::InvalidInput(format!("bad Bloch vector '{coords}'")))?;
                let [x, y, z] = r[..] else {
                    return Err(Error::InvalidInput(format!("Bloch vector '{coords}' needs three components")));
                };
                DensityMatrix::from_bloch(&crate::BlochVector::new(x, y, z)?)
            }
        };
        Ok(Self { label: s.to_string(), rho })
    }
}

/// A rectangular grid over `(gamma0/lambda, delta/lambda)` at one final time.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub gamma0: Axis,
    pub delta: Axis,
    pub lambda_t_final: f64,
    pub initial: InitialState,
}

pub const DEFAULT_GAMMA0_AXIS: Axis = Axis { min: 1e-1, max: 1e4, count: 40, scale: Scale::Log };
pub const DEFAULT_DELTA_AXIS: Axis = Axis { min: 1e-1, max: 1e2, count: 40, scale: Scale::Log };

impl GridSpec {
    pub fn new(gamma0: Axis, delta: Axis, lambda_t_final: f64, initial: InitialState) -> Result<Self> {
        if !(lambda_t_final.is_finite() && lambda_t_final > 0.0) {
            return Err(Error::InvalidInput(format!("final time must be positive, got {lambda_t_final}")));
        }
        Ok(Self { gamma0, delta, lambda_t_final, initial })
    }

    /// The default 40x40 log grid used by the figure presets.
    pub fn figure_default(lambda_t_final: f64, initial: InitialState) -> Result<Self> {
        Self::new(DEFAULT_GAMMA0_AXIS, DEFAULT_DELTA_AXIS, lambda_t_final, initial)
    }

    /// Grid points in row-major order (`gamma0` outer, `delta` inner).
    pub fn points(&self) -> Vec<(f64, f64)> {
        let deltas = self.delta.values();
        self.gamma0
            .values()
            .into_iter()
            .flat_map(|g| deltas.iter().map(move |&d| (g, d)))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.gamma0.count * self.delta.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Applies `key=value` settings on top of `self`.
    ///
    /// Keys are `gamma0`, `delta`, `tmax` and `initial`. Inline settings are
    /// separated by commas; a config file has one setting per line and `#`
    /// comments.
    pub fn with_settings(&self, text: &str) -> Result<Self> {
        let mut spec = self.clone();
        for (key, value) in split_settings(text)? {
            match key.as_str() {
                "gamma0" => spec.gamma0 = value.parse()?,
                "delta" => spec.delta = value.parse()?,
                "tmax" | "lambda_t" => {
                    spec.lambda_t_final = value
                        .parse()
                        .map_err(|_| Error::InvalidInput(format!("bad final time '{value}'")))?
                }
                "initial" => spec.initial = value.parse()?,
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "unknown grid key '{key}' (expected gamma0, delta, tmax, initial)"
                    )))
                }
            }
        }
        Self::new(spec.gamma0, spec.delta, spec.lambda_t_final, spec.initial)
    }

    /// Like [`GridSpec::with_settings`], reading `arg` as a file when it names one.
    pub fn with_argument(&self, arg: &str) -> Result<Self> {
        let path = Path::new(arg);
        if path.is_file() {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Io(format!("cannot read grid file {arg}: {e}")))?;
            self.with_settings(&text)
        } else {
            self.with_settings(arg)
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "gamma0={},delta={},tmax={},initial={}",
            self.gamma0, self.delta, self.lambda_t_final, self.initial
        )
    }
}

fn split_settings(text: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        for piece in line.split(',') {
            let piece = piece.trim();
            if piece.is_empty() {
                continue;
            }
            match piece.split_once('=') {
                Some((k, v)) => out.push((k.trim().to_string(), v.trim().to_string())),
                // continuation of a comma-separated value such as bloch:x,y,z
                None => match out.last_mut() {
                    Some((_, v)) => {
                        v.push(',');
                        v.push_str(piece);
                    }
                    None => return Err(Error::InvalidInput(format!("expected key=value, got '{piece}'"))),
                },
            }
        }
    }
    Ok(out)
}
