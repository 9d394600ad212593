mod commands;
mod error;
mod output;
mod source;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::error::CliError;
use crate::output::Format;
use crate::source::Source;

/// Potential theory and Dirichlet spectral theory on weighted graphs.
///
/// Every command reads one graph source: `--graph FILE` or `--generator SPEC`
/// with SPEC one of `lattice:d=D[,r=R]`, `tree:k=K[,depth=N]`,
/// `ball:file=F,root=V[,n=N]`, each optionally followed by `,c=VALUE` for a
/// constant killing term.
#[derive(Debug, Parser)]
#[command(name = "royden", version, propagate_version = true)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Graph file in the line format (`E u v w`, `C v c`, `M v m`, `D v`, `L v label`).
    #[arg(long, global = true, value_name = "FILE")]
    graph: Option<PathBuf>,
    /// Inline generator spec, e.g. `lattice:d=3,r=8`.
    #[arg(long, global = true, value_name = "SPEC")]
    generator: Option<String>,
    #[arg(long, global = true, value_enum)]
    output: Option<Format>,
    /// Capacity positivity tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomised commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel sweeps; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// TOML file with defaults for the global flags and `levels`.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    graph: Option<PathBuf>,
    generator: Option<String>,
    output: Option<Format>,
    tol: Option<f64>,
    seed: Option<u64>,
    threads: Option<usize>,
    levels: Option<String>,
}

/// Vertex function input: a `<vertex> <value>` file or a built-in tree fixture.
#[derive(Debug, Clone, Args)]
pub struct FnArgs {
    /// Function file, one `<vertex> <value>` per line; missing vertices are 0.
    #[arg(long = "fn", value_name = "FILE", conflicts_with = "fixture")]
    pub function: Option<PathBuf>,
    /// Tree fixture: `ray` (unbounded finite energy), `branch` (shell data on
    /// one subtree) or `harmonic` (its harmonic extension).
    #[arg(long, value_parser = ["ray", "branch", "harmonic"])]
    pub fixture: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate the section and summarise it.
    Validate,
    /// Write the section in the graph file format.
    Gen {
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Point capacity cap(x) and equilibrium potential, u(x) = 1 and u = 0 on the mask.
    Cap {
        #[arg(long, allow_hyphen_values = true)]
        vertex: Option<String>,
        /// Include the potential in the output.
        #[arg(long)]
        potential: bool,
    },
    /// cap_n(x) along an exhaustion with plateau and log-decay fits.
    CapProfile {
        #[arg(long, allow_hyphen_values = true)]
        vertex: Option<String>,
        #[arg(long)]
        levels: Option<String>,
    },
    /// Transient / recurrent verdict from the capacity profile.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        vertex: Option<String>,
        #[arg(long)]
        levels: Option<String>,
    },
    /// γ(x, y), the dual norm of e_x − e_y for the energy with wired mask.
    Gamma {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// γ_o(x, y) for the norm ‖φ‖_o² = Q̃(φ) + φ(o)².
    #[command(name = "gamma-o")]
    GammaO {
        #[arg(long, allow_hyphen_values = true)]
        o: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Free effective resistance, mask and killing ignored.
    Resistance {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Uniform transience: inf cap > 0, sup-norm constant C and γ-diameter bound 2C.
    UtReport {
        /// Root vertex when exhausting a graph file by balls.
        #[arg(long, allow_hyphen_values = true)]
        vertex: Option<String>,
        #[arg(long)]
        levels: Option<String>,
        #[arg(long, default_value_t = 2)]
        window_level: usize,
        /// Levels for the spectral-gap route; defaults to `levels` off lattices.
        #[arg(long)]
        gap_levels: Option<String>,
        /// Also run the Liouville probe and report the one-point diagnosis.
        #[arg(long)]
        liouville_levels: Option<String>,
    },
    /// Dirichlet problem: harmonic f with prescribed values on the mask.
    Dirichlet {
        /// `<vertex> <value>` file covering every masked vertex.
        #[arg(long, value_name = "FILE")]
        values: PathBuf,
        /// Also write the solution as a function file.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Royden decomposition f = f0 + fh with f0 = 0 on the mask, fh harmonic.
    Decompose {
        #[command(flatten)]
        input: FnArgs,
        #[arg(long, value_name = "FILE")]
        out_f0: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        out_fh: Option<PathBuf>,
    },
    /// Maximum principle check for a harmonic function.
    Maxcheck {
        #[command(flatten)]
        input: FnArgs,
    },
    /// Harmonic boundary emptiness: c summable and (b, 0) recurrent.
    Hbempty {
        /// Root vertex when exhausting a graph file by balls.
        #[arg(long, allow_hyphen_values = true)]
        vertex: Option<String>,
        #[arg(long)]
        levels: Option<String>,
    },
    /// Clamp a harmonic f to [−n, n] and decompose the result.
    TruncateHarmonic {
        #[command(flatten)]
        input: FnArgs,
        /// Clamp level; defaults to half the sup norm.
        #[arg(long)]
        n: Option<f64>,
    },
    /// Oscillation of harmonic extensions of random sector data near the root.
    Liouville {
        /// Root vertex when exhausting a graph file by balls.
        #[arg(long, allow_hyphen_values = true)]
        vertex: Option<String>,
        #[arg(long)]
        levels: Option<String>,
    },
    /// Eigenvalues of the Dirichlet Laplacian A v = λ M v.
    Spectrum {
        /// Only the k smallest.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Eigenvalue lower bounds 1/(C² m(X ∖ {x_1..x_n})) ≤ λ_{n+1}.
    Bounds {
        /// Enumeration of the interior; repeat the flag. Default: decreasing measure.
        #[arg(long, allow_hyphen_values = true)]
        order: Vec<String>,
    },
    /// Heat semigroup e^{−tL} f.
    Heat {
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        input: FnArgs,
    },
    /// Heat trace Σ e^{−tλ} for one or more t.
    Trace {
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
    },
    /// Spectral gap criterion ‖φ‖∞² ≤ Q̃(φ)/(δλ₀), or its trend along `--levels`.
    Gapcheck {
        /// Root vertex when exhausting a graph file by balls.
        #[arg(long, allow_hyphen_values = true)]
        vertex: Option<String>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        levels: Option<String>,
    },
    /// Random-walk escape probability; π(o)·p̂ estimates cap(o).
    Walk {
        #[arg(long, allow_hyphen_values = true)]
        vertex: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Energy Q̃(f), optionally Q̃(f, g), ‖f‖_o and the formal Laplacian.
    Energy {
        #[command(flatten)]
        input: FnArgs,
        #[arg(long, value_name = "FILE")]
        g: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        o: Option<String>,
        /// Include 𝓛f in the output.
        #[arg(long)]
        laplacian: bool,
    },
    /// Ultracontractivity ‖e^{−tL} f‖∞ ≤ C (2et)^{−1/2} ‖f‖_M on random f.
    Ultra {
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
}

/// Global settings after merging flags over the config file.
pub struct Settings {
    pub source: Option<Source>,
    pub format: Format,
    pub tol: f64,
    pub seed: Option<u64>,
    pub levels: Option<String>,
}

impl Settings {
    pub fn source(&self) -> Result<&Source, CliError> {
        self.source
            .as_ref()
            .ok_or_else(|| CliError::Usage("need exactly one of --graph or --generator".into()))
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::Usage("this command is randomised and requires --seed".into()))
    }
}

fn settings(global: Global) -> Result<Settings, CliError> {
    let config: Config = match &global.config {
        Some(path) => toml::from_str(&source::read_text(path)?)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?,
        None => Config::default(),
    };
    let (graph, generator) = match (global.graph, global.generator) {
        (None, None) => (config.graph, config.generator),
        flags => flags,
    };
    let source = match (graph, generator) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "give only one of --graph and --generator".into(),
            ));
        }
        (Some(p), None) => Some(Source::File(p)),
        (None, Some(g)) => Some(Source::Generator(g)),
        (None, None) => None,
    };
    let tol = global
        .tol
        .or(config.tol)
        .unwrap_or(royden::potential::DEFAULT_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Usage(format!(
            "--tol must be positive, got {tol}"
        )));
    }
    if let Some(n) = global.threads.or(config.threads) {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(Settings {
        source,
        format: global.output.or(config.output).unwrap_or(Format::Json),
        tol,
        seed: global.seed.or(config.seed),
        levels: config.levels,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.global.output.unwrap_or(Format::Json);
    let result = settings(cli.global).and_then(|s| {
        let out = commands::run(cli.command, &s)?;
        Ok(out.render(s.format))
    });
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let record = serde_json::to_string(&e.record()).unwrap();
            match (&e, format) {
                (CliError::Usage(msg), _) => eprintln!("error: {msg}"),
                (_, Format::Csv) => eprintln!("error: {e}"),
                _ => {}
            }
            println!("{record}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
