use std::path::PathBuf;
use std::process::ExitCode;

use bergman_cli::{report_schema, run, Format, RunConfig, Verb, EXIT_PARSE};
use bergman_core::Normalization;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bergman-lab", version, about = "Verification runs for Bergman kernels, transforms and reflections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the Bergman kernel on a point set.
    Kernel(Common),
    /// Evaluate transforms of functions at exterior points.
    Transform(Common),
    /// Reflect points across the boundary and check the involution.
    Reflect(Common),
    /// Estimate bi-Lipschitz constants of the reflection.
    Lipschitz(Common),
    /// Finite-rank operator models.
    Operators {
        #[command(subcommand)]
        action: OperatorsAction,
    },
    /// Run the full verification battery.
    Suite(Common),
    /// Print the report schema.
    Schema,
}

#[derive(Subcommand)]
enum OperatorsAction {
    Build(Common),
    Verify(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Lebesgue,
    LebesgueOverPi,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Catalogue name (halfplane, quadrant, disk, exterior-disk, cusp) or a TOML/JSON file.
    #[arg(long)]
    domain: Option<String>,
    /// Function descriptor, e.g. `rational:0,-1` or `kernel:0.5,1`. Repeatable.
    #[arg(long = "fn")]
    functions: Vec<String>,
    /// Point file or `gen:annulus:N`.
    #[arg(long)]
    points: Option<String>,
    /// Check tolerance; quadratures run 100 times tighter.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 20)]
    seed: u64,
    #[arg(long, value_enum, default_value = "lebesgue")]
    norm: NormArg,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
}

impl Common {
    fn into_config(self, verb: Verb) -> RunConfig {
        RunConfig {
            verb,
            domain: self.domain,
            functions: self.functions,
            points: self.points,
            tol: self.tol,
            seed: self.seed,
            norm: match self.norm {
                NormArg::Lebesgue => Normalization::Lebesgue,
                NormArg::LebesgueOverPi => Normalization::LebesgueOverPi,
            },
            out: self.out,
            format: match self.format {
                FormatArg::Json => Format::Json,
                FormatArg::Csv => Format::Csv,
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE as u8 } else { 0 });
        }
    };
    let config = match cli.command {
        Command::Kernel(c) => c.into_config(Verb::Kernel),
        Command::Transform(c) => c.into_config(Verb::Transform),
        Command::Reflect(c) => c.into_config(Verb::Reflect),
        Command::Lipschitz(c) => c.into_config(Verb::Lipschitz),
        Command::Operators { action: OperatorsAction::Build(c) } => c.into_config(Verb::OperatorsBuild),
        Command::Operators { action: OperatorsAction::Verify(c) } => c.into_config(Verb::OperatorsVerify),
        Command::Suite(c) => c.into_config(Verb::Suite),
        Command::Schema => {
            println!("{}", serde_json::to_string_pretty(&report_schema()).expect("schema serializes"));
            return ExitCode::SUCCESS;
        }
    };
    let outcome = run(&config);
    if let Some(msg) = &outcome.diagnostic {
        eprintln!("bergman-lab: {msg}");
    }
    if config.out.is_none() {
        print!("{}", outcome.output);
    }
    ExitCode::from(outcome.exit_code as u8)
}
