//! Command-line plumbing: parameter-plane sweeps, single-point series and
//! figure presets, serialized as CSV or JSON.

mod grid;
mod presets;
mod table;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

pub use grid::{Axis, GridSpec, InitialState, Scale, DEFAULT_DELTA_AXIS, DEFAULT_GAMMA0_AXIS};
pub use presets::{run_preset, Preset, PresetOptions};
pub use table::{format_float, sidecar_path, step_policy, Cell, Format, Metadata, Table};

use crate::bounds::{bounds_report, bounds_series};
use crate::djc::{propagator, rates};
use crate::error::{Error, Result};
use crate::non_markov::{blp_measure, path_measure};
use crate::{BoundsReport, DensityMatrix, DjcPath, ModelParams, PathAnalysis, TimeGrid};

/// Quantities a sweep can tabulate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantity {
    TauMin,
    TauAv,
    TauOp,
    TauHs,
    TauTr,
    TauQuant,
    BlpN,
    PathNTilde,
}

impl Quantity {
    pub const ALL: [Quantity; 8] = [
        Quantity::TauMin,
        Quantity::TauAv,
        Quantity::TauOp,
        Quantity::TauHs,
        Quantity::TauTr,
        Quantity::TauQuant,
        Quantity::BlpN,
        Quantity::PathNTilde,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::TauMin => "tau_min",
            Quantity::TauAv => "tau_av",
            Quantity::TauOp => "tau_op",
            Quantity::TauHs => "tau_hs",
            Quantity::TauTr => "tau_tr",
            Quantity::TauQuant => "tau_quant",
            Quantity::BlpN => "blp_N",
            Quantity::PathNTilde => "path_N_tilde",
        }
    }

    fn is_bound(self) -> bool {
        !matches!(self, Quantity::BlpN | Quantity::PathNTilde)
    }

    /// Parses a comma-separated list; duplicates are rejected.
    pub fn parse_list(s: &str) -> Result<Vec<Quantity>> {
        let mut out = Vec::new();
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            let q: Quantity = name.parse()?;
            if out.contains(&q) {
                return Err(Error::InvalidInput(format!("quantity '{name}' listed twice")));
            }
            out.push(q);
        }
        if out.is_empty() {
            return Err(Error::InvalidInput("no quantities requested".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL.into_iter().find(|q| q.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Quantity::ALL.iter().map(|q| q.name()).collect();
            Error::InvalidInput(format!("unknown quantity '{s}' (expected one of {})", names.join(", ")))
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub gamma0_over_lambda: f64,
    pub delta_over_lambda: f64,
    pub lambda_t: f64,
    pub quantity: Quantity,
    /// `NaN` when `flag` is set.
    pub value: f64,
    pub flag: Option<&'static str>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub grid: GridSpec,
    pub quantities: Vec<Quantity>,
    pub rows: Vec<SweepRow>,
}

pub const SWEEP_COLUMNS: [&str; 6] =
    ["gamma0_over_lambda", "delta_over_lambda", "lambda_t", "quantity", "value", "flag"];

impl SweepTable {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&SWEEP_COLUMNS);
        for r in &self.rows {
            t.push(vec![
                r.gamma0_over_lambda.into(),
                r.delta_over_lambda.into(),
                r.lambda_t.into(),
                r.quantity.name().into(),
                r.value.into(),
                r.flag.unwrap_or("ok").into(),
            ]);
        }
        t
    }

    /// Rows of a single quantity, in grid order.
    pub fn only(&self, q: Quantity) -> SweepTable {
        SweepTable {
            grid: self.grid.clone(),
            quantities: vec![q],
            rows: self.rows.iter().filter(|r| r.quantity == q).cloned().collect(),
        }
    }

    /// Values of `q` in grid order (`NaN` for flagged points).
    pub fn values(&self, q: Quantity) -> Vec<f64> {
        self.rows.iter().filter(|r| r.quantity == q).map(|r| r.value).collect()
    }

    pub fn metadata(&self, preset: Option<&str>) -> Metadata {
        Metadata {
            preset: preset.map(str::to_string),
            grid: Some(self.grid.to_string()),
            lambda_t: Some(self.grid.lambda_t_final),
            initial: Some(self.grid.initial.to_string()),
            quantities: self.quantities.iter().map(|q| q.name().to_string()).collect(),
            ..Metadata::new("sweep")
        }
    }
}

fn bound_value(report: &BoundsReport, q: Quantity) -> f64 {
    match q {
        Quantity::TauMin => report.tau_min,
        Quantity::TauAv => report.tau_av,
        Quantity::TauOp => report.tau_op,
        Quantity::TauHs => report.tau_hs,
        Quantity::TauTr => report.tau_tr,
        Quantity::TauQuant => report.tau_quant,
        Quantity::BlpN | Quantity::PathNTilde => unreachable!("not a bound"),
    }
}

fn checked_measure(value: Result<f64>) -> Result<f64> {
    let v = value?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(Error::InternalConsistency(format!("measure evaluated to {v}")))
    }
}

/// Evaluates the requested quantities at one parameter point.
///
/// The bounds share one sampled path; failures are returned per quantity.
pub fn evaluate_point(
    gamma0: f64,
    delta: f64,
    rho0: &DensityMatrix,
    lambda_t: f64,
    quantities: &[Quantity],
) -> Vec<Result<f64>> {
    let params = ModelParams::new(gamma0, delta);
    let report = if quantities.iter().any(|q| q.is_bound()) {
        Some(params.clone().and_then(|p| bounds_report(&p, rho0, lambda_t)))
    } else {
        None
    };
    quantities
        .iter()
        .map(|&q| {
            let p = params.clone()?;
            match q {
                Quantity::BlpN => checked_measure(blp_measure(&p, lambda_t)),
                Quantity::PathNTilde => checked_measure(path_measure(&p, rho0, lambda_t)),
                _ => report.clone().expect("report computed for bounds").map(|r| bound_value(&r, q)),
            }
        })
        .collect()
}

/// Evaluates every grid point on a pool of `jobs` workers (all cores when
/// `None`). Rows come out in row-major grid order regardless of scheduling.
pub fn run_sweep(grid: &GridSpec, quantities: &[Quantity], jobs: Option<usize>) -> Result<SweepTable> {
    if quantities.is_empty() {
        return Err(Error::InvalidInput("no quantities requested".into()));
    }
    if jobs == Some(0) {
        return Err(Error::InvalidInput("--jobs must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
    let rho0 = grid.initial.rho();
    let t = grid.lambda_t_final;
    let points = grid.points();
    let results: Vec<Vec<Result<f64>>> = pool.install(|| {
        points
            .par_iter()
            .map(|&(g, d)| evaluate_point(g, d, &rho0, t, quantities))
            .collect()
    });
    let rows = points
        .iter()
        .zip(results)
        .flat_map(|(&(g, d), values)| {
            quantities.iter().zip(values).map(move |(&quantity, value)| {
                let (value, flag) = match value {
                    Ok(v) => (v, None),
                    Err(e) => (f64::NAN, Some(e.kind())),
                };
                SweepRow { gamma0_over_lambda: g, delta_over_lambda: d, lambda_t: t, quantity, value, flag }
            })
        })
        .collect();
    Ok(SweepTable { grid: grid.clone(), quantities: quantities.to_vec(), rows })
}

/// One row of an `evolve` series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveRow {
    pub lambda_t: f64,
    pub trace_dist_to_stationary: f64,
    pub abs_g: f64,
    /// `NaN` when the rate is singular.
    pub gamma_t_over_lambda: f64,
    pub gamma_valid: bool,
}

pub const EVOLVE_COLUMNS: [&str; 5] =
    ["lambda_t", "trace_dist_to_stationary", "abs_G", "gamma_t_over_lambda", "gamma_valid"];

/// Time grid for a single-point series: `steps` uniform intervals, or the
/// default step policy when `steps` is `None`.
pub fn series_grid(params: &ModelParams, lambda_t_max: f64, steps: Option<usize>) -> Result<TimeGrid> {
    match steps {
        Some(n) => TimeGrid::uniform(lambda_t_max, n),
        None => TimeGrid::for_rate(lambda_t_max, params.omega().im.abs()),
    }
}

pub fn evolve_series(params: &ModelParams, rho0: &DensityMatrix, grid: &TimeGrid) -> Result<Vec<EvolveRow>> {
    let stationary = DensityMatrix::z_minus();
    grid.times()
        .iter()
        .map(|&t| {
            let g = propagator(params, t)?.g;
            let rho = crate::djc::evolve(params, rho0, t)?;
            let rate = rates(params, t)?;
            let row = EvolveRow {
                lambda_t: t,
                trace_dist_to_stationary: crate::qubit::trace_distance(&rho, &stationary),
                abs_g: g.norm(),
                gamma_t_over_lambda: if rate.valid { rate.gamma_t_over_lambda } else { f64::NAN },
                gamma_valid: rate.valid,
            };
            if !(row.trace_dist_to_stationary.is_finite() && row.abs_g.is_finite()) {
                return Err(Error::InternalConsistency(format!("non-finite evolve sample at lambda_t = {t}")));
            }
            Ok(row)
        })
        .collect()
}

pub fn evolve_table(rows: &[EvolveRow]) -> Table {
    let mut t = Table::new(&EVOLVE_COLUMNS);
    for r in rows {
        t.push(vec![
            r.lambda_t.into(),
            r.trace_dist_to_stationary.into(),
            r.abs_g.into(),
            r.gamma_t_over_lambda.into(),
            r.gamma_valid.into(),
        ]);
    }
    t
}

pub const BOUNDS_COLUMNS: [&str; 16] = [
    "lambda_t",
    "bures_angle_l",
    "sin2_l",
    "quantumness_target",
    "tau_min",
    "tau_av",
    "tau_op",
    "tau_hs",
    "tau_tr",
    "tau_quant",
    "v_min",
    "v_av",
    "v_op",
    "v_hs",
    "v_tr",
    "v_quant",
];

pub fn bounds_row(r: &BoundsReport) -> Vec<Cell> {
    [
        r.lambda_t_final,
        r.bures_angle_l,
        r.sin2_l,
        r.quantumness_target,
        r.tau_min,
        r.tau_av,
        r.tau_op,
        r.tau_hs,
        r.tau_tr,
        r.tau_quant,
        r.v_min,
        r.v_av,
        r.v_op,
        r.v_hs,
        r.v_tr,
        r.v_quant,
    ]
    .into_iter()
    .map(Cell::from)
    .collect()
}

pub fn bounds_table(reports: &[BoundsReport]) -> Table {
    let mut t = Table::new(&BOUNDS_COLUMNS);
    for r in reports {
        t.push(bounds_row(r));
    }
    t
}

/// Bounds at every grid time up to `lambda_t_final`, thinned to about
/// `points` rows when given. The final time is always included.
pub fn bounds_time_series(
    params: &ModelParams,
    rho0: &DensityMatrix,
    lambda_t_final: f64,
    points: Option<usize>,
) -> Result<Vec<BoundsReport>> {
    if !rho0.is_pure() {
        // same message as the single-time report
        bounds_report(params, rho0, lambda_t_final)?;
    }
    let path = PathAnalysis::with_default_grid(&DjcPath::new(*params, *rho0), lambda_t_final)?;
    let intervals = path.samples.len() - 1;
    let stride = match points {
        Some(0) => return Err(Error::InvalidInput("--steps must be at least 1".into())),
        Some(n) => intervals.div_ceil(n),
        None => 1,
    };
    bounds_series(&path, stride)
}
