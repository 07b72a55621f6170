use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::{
    bounds_row, bounds_time_series, evolve_series, evolve_table, run_sweep, series_grid, GridSpec,
    InitialState, Metadata, Quantity, Table, Format, BOUNDS_COLUMNS,
};
use crate::error::{Error, Result};
use crate::{BoundsReport, ModelParams};

/// Final time of the BLP grid.
pub const FIG1_LAMBDA_T: f64 = 1000.0;
/// Final time of the stationary-approach series.
pub const FIG2_LAMBDA_T: f64 = 150.0;
/// Final time of the bound and velocity series.
pub const FIG34_LAMBDA_T: f64 = 1000.0;
/// Row count of the bound and velocity series unless `--steps` is given.
pub const FIG34_DEFAULT_POINTS: usize = 1000;

/// The two parameter points of the single-point figures: weak and strong coupling.
pub const SERIES_POINTS: [(f64, f64); 2] = [(0.1, 0.1), (1e4, 0.1)];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5a,
    Fig5b,
    Fig6,
    Fig7,
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::Fig1,
        Preset::Fig2,
        Preset::Fig3,
        Preset::Fig4,
        Preset::Fig5a,
        Preset::Fig5b,
        Preset::Fig6,
        Preset::Fig7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5a => "fig5a",
            Preset::Fig5b => "fig5b",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
        }
    }

    /// Grid used by the parameter-plane presets, before any `--grid` override.
    pub fn default_grid(self) -> Option<GridSpec> {
        let (t, _) = self.grid_setup()?;
        Some(GridSpec::figure_default(t, InitialState::x_plus()).expect("valid default grid"))
    }

    fn grid_setup(self) -> Option<(f64, &'static [Quantity])> {
        const FOUR_BOUNDS: &[Quantity] =
            &[Quantity::TauQuant, Quantity::TauOp, Quantity::TauAv, Quantity::TauMin];
        match self {
            Preset::Fig1 => Some((FIG1_LAMBDA_T, &[Quantity::BlpN])),
            Preset::Fig5a => Some((1.0, &[Quantity::PathNTilde])),
            Preset::Fig5b => Some((100.0, &[Quantity::PathNTilde])),
            Preset::Fig6 => Some((1.0, FOUR_BOUNDS)),
            Preset::Fig7 => Some((100.0, FOUR_BOUNDS)),
            Preset::Fig2 | Preset::Fig3 | Preset::Fig4 => None,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
            Error::InvalidInput(format!("unknown preset '{s}' (available: {})", names.join(", ")))
        })
    }
}

#[derive(Clone, Debug)]
pub struct PresetOptions {
    pub out_dir: PathBuf,
    pub format: Format,
    pub jobs: Option<usize>,
    /// Row count for the series presets.
    pub steps: Option<usize>,
    /// `key=value` overrides of the grid axes; the preset keeps its final
    /// time and initial state.
    pub grid: Option<String>,
}

fn point_tag(g: f64, d: f64) -> String {
    format!("gamma0_{g}_delta_{d}")
}

/// Writes the data files of `preset` into `opts.out_dir` and returns their paths.
pub fn run_preset(preset: Preset, opts: &PresetOptions) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(&opts.out_dir)
        .map_err(|e| Error::Io(format!("cannot create {}: {e}", opts.out_dir.display())))?;
    let file = |stem: String| opts.out_dir.join(format!("{stem}.{}", opts.format.extension()));
    let mut written = Vec::new();
    match preset {
        Preset::Fig2 => {
            for (g, d) in SERIES_POINTS {
                let p = ModelParams::new(g, d)?;
                let init = InitialState::x_plus();
                let grid = series_grid(&p, FIG2_LAMBDA_T, opts.steps)?;
                let table = evolve_table(&evolve_series(&p, &init.rho(), &grid)?);
                let meta = series_meta("evolve", preset, g, d, FIG2_LAMBDA_T, &init);
                written.extend(emit(&table, &meta, opts.format, &file(format!("fig2_evolve_{}", point_tag(g, d))))?);
            }
        }
        Preset::Fig3 | Preset::Fig4 => {
            let (kind, columns) = if preset == Preset::Fig3 {
                ("bounds", &BOUNDS_COLUMNS[..10])
            } else {
                ("velocities", &velocity_columns()[..])
            };
            for (g, d) in SERIES_POINTS {
                let p = ModelParams::new(g, d)?;
                let init = InitialState::x_plus();
                let points = opts.steps.unwrap_or(FIG34_DEFAULT_POINTS);
                let reports = bounds_time_series(&p, &init.rho(), FIG34_LAMBDA_T, Some(points))?;
                let table = select_columns(&reports, columns);
                let meta = series_meta("bounds", preset, g, d, FIG34_LAMBDA_T, &init);
                let stem = format!("{}_{kind}_{}", preset.name(), point_tag(g, d));
                written.extend(emit(&table, &meta, opts.format, &file(stem))?);
            }
        }
        _ => {
            let (_, quantities) = preset.grid_setup().expect("grid preset");
            let mut grid = preset.default_grid().expect("grid preset");
            if let Some(arg) = &opts.grid {
                let (t, init) = (grid.lambda_t_final, grid.initial.clone());
                grid = grid.with_argument(arg)?;
                grid.lambda_t_final = t;
                grid.initial = init;
            }
            let sweep = run_sweep(&grid, quantities, opts.jobs)?;
            for &q in quantities {
                let part = sweep.only(q);
                let meta = part.metadata(Some(preset.name()));
                let stem = format!("{}_{}", preset.name(), q.name());
                written.extend(emit(&part.to_table(), &meta, opts.format, &file(stem))?);
            }
        }
    }
    Ok(written)
}

fn velocity_columns() -> Vec<&'static str> {
    let mut cols = vec![BOUNDS_COLUMNS[0], BOUNDS_COLUMNS[1]];
    cols.extend_from_slice(&BOUNDS_COLUMNS[10..]);
    cols
}

fn select_columns(reports: &[BoundsReport], columns: &[&str]) -> Table {
    let idx: Vec<usize> =
        columns.iter().map(|c| BOUNDS_COLUMNS.iter().position(|b| b == c).expect("known column")).collect();
    let mut t = Table::new(columns);
    for r in reports {
        let row = bounds_row(r);
        t.push(idx.iter().map(|&i| row[i].clone()).collect());
    }
    t
}

fn series_meta(command: &str, preset: Preset, g: f64, d: f64, t: f64, init: &InitialState) -> Metadata {
    Metadata {
        preset: Some(preset.name().into()),
        gamma0_over_lambda: Some(g),
        delta_over_lambda: Some(d),
        lambda_t: Some(t),
        initial: Some(init.to_string()),
        ..Metadata::new(command)
    }
}

fn emit(table: &Table, meta: &Metadata, format: Format, path: &Path) -> Result<Vec<PathBuf>> {
    table.emit(meta, format, Some(path))
}
