use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use djc_qsl::bounds::bounds_report;
use djc_qsl::sweep::{
    bounds_table, bounds_time_series, evolve_series, evolve_table, run_preset, run_sweep, series_grid,
    Format, GridSpec, InitialState, Metadata, Preset, PresetOptions, Quantity, DEFAULT_DELTA_AXIS,
    DEFAULT_GAMMA0_AXIS,
};
use djc_qsl::{Error, ModelParams};

#[derive(Parser, Debug)]
#[command(name = "djc-qsl", version, about = "Speed limits and non-Markovianity of the damped Jaynes-Cummings qubit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distance to the stationary state, |G| and the decay rate over time.
    Evolve(PointArgs),
    /// Every speed-limit bound at the final time, or along the path with --series.
    Bounds {
        #[command(flatten)]
        point: PointArgs,
        /// Emit the bounds and velocities at every grid time.
        #[arg(long)]
        series: bool,
    },
    /// Tabulate quantities over a (gamma0, delta) grid.
    Sweep {
        /// Inline spec (gamma0=1e-1:1e4:40:log,delta=...,tmax=1,initial=x+) or a key=value file.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        tmax: Option<f64>,
        #[arg(long)]
        initial: Option<InitialState>,
        /// Comma-separated subset of tau_min,tau_av,tau_op,tau_hs,tau_tr,tau_quant,blp_N,path_N_tilde.
        #[arg(long, default_value = "tau_min,tau_av,tau_op,tau_hs,tau_tr,tau_quant")]
        quantities: String,
        /// Worker threads (default: available parallelism).
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Write the data files of a figure preset into --out.
    Figure {
        /// fig1, fig2, fig3, fig4, fig5a, fig5b, fig6 or fig7.
        preset: Preset,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: Format,
        #[arg(long)]
        jobs: Option<usize>,
        /// Rows of the series presets.
        #[arg(long)]
        steps: Option<usize>,
        /// Axis overrides for the grid presets.
        #[arg(long)]
        grid: Option<String>,
    },
}

#[derive(Args, Debug)]
struct PointArgs {
    /// gamma0 / lambda.
    #[arg(long)]
    gamma0: f64,
    /// delta / lambda.
    #[arg(long)]
    delta: f64,
    /// Final lambda t.
    #[arg(long)]
    tmax: f64,
    /// Uniform intervals (evolve) or approximate rows (bounds --series).
    #[arg(long)]
    steps: Option<usize>,
    /// x+|x-|y+|y-|z+|z- or bloch:x,y,z.
    #[arg(long, default_value = "x+")]
    initial: InitialState,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: Format,
}

impl PointArgs {
    fn params(&self) -> Result<ModelParams, Error> {
        ModelParams::new(self.gamma0, self.delta)
    }

    fn metadata(&self, command: &str) -> Metadata {
        Metadata {
            gamma0_over_lambda: Some(self.gamma0),
            delta_over_lambda: Some(self.delta),
            lambda_t: Some(self.tmax),
            initial: Some(self.initial.to_string()),
            ..Metadata::new(command)
        }
    }
}

fn sweep_grid(grid: Option<&str>, tmax: Option<f64>, initial: Option<InitialState>) -> Result<GridSpec, Error> {
    let mut spec = GridSpec {
        gamma0: DEFAULT_GAMMA0_AXIS,
        delta: DEFAULT_DELTA_AXIS,
        lambda_t_final: f64::NAN,
        initial: InitialState::x_plus(),
    };
    if let Some(arg) = grid {
        // validation of the final time waits until --tmax is applied
        spec.lambda_t_final = tmax.unwrap_or(spec.lambda_t_final);
        if spec.lambda_t_final.is_nan() && !arg.contains("tmax") && !std::path::Path::new(arg).is_file() {
            return Err(Error::InvalidInput("missing final time: pass --tmax or tmax= in --grid".into()));
        }
        spec = spec.with_argument(arg)?;
    }
    if let Some(t) = tmax {
        spec.lambda_t_final = t;
    }
    if let Some(init) = initial {
        spec.initial = init;
    }
    if spec.lambda_t_final.is_nan() {
        return Err(Error::InvalidInput("missing final time: pass --tmax or tmax= in --grid".into()));
    }
    GridSpec::new(spec.gamma0, spec.delta, spec.lambda_t_final, spec.initial)
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Evolve(args) => {
            let p = args.params()?;
            let grid = series_grid(&p, args.tmax, args.steps)?;
            let rows = evolve_series(&p, &args.initial.rho(), &grid)?;
            evolve_table(&rows).emit(&args.metadata("evolve"), args.output.format, args.output.out.as_deref())?;
        }
        Command::Bounds { point, series } => {
            let p = point.params()?;
            let rho0 = point.initial.rho();
            let reports = if series {
                bounds_time_series(&p, &rho0, point.tmax, point.steps)?
            } else {
                vec![bounds_report(&p, &rho0, point.tmax)?]
            };
            bounds_table(&reports).emit(&point.metadata("bounds"), point.output.format, point.output.out.as_deref())?;
        }
        Command::Sweep { grid, tmax, initial, quantities, jobs, output } => {
            let spec = sweep_grid(grid.as_deref(), tmax, initial)?;
            let quantities = Quantity::parse_list(&quantities)?;
            let table = run_sweep(&spec, &quantities, jobs)?;
            table.to_table().emit(&table.metadata(None), output.format, output.out.as_deref())?;
        }
        Command::Figure { preset, out, format, jobs, steps, grid } => {
            let opts = PresetOptions { out_dir: out, format, jobs, steps, grid };
            for path in run_preset(preset, &opts)? {
                eprintln!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}
