use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use orbicoh::cohomology::ResolutionChoice;
use orbicoh::compat::ActionSource;
use orbicoh_cli::{emit_report, run_command, CliError, Coefficients, Command, Format, JobSpec, ModelSource};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CommandArg {
    Cohomology,
    Verify,
    Gerbes,
    FixedPoints,
    Classes,
    Abelianization,
    Compat,
    BrownCheck,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Self {
        match c {
            CommandArg::Cohomology => Command::Cohomology,
            CommandArg::Verify => Command::Verify,
            CommandArg::Gerbes => Command::Gerbes,
            CommandArg::FixedPoints => Command::FixedPoints,
            CommandArg::Classes => Command::Classes,
            CommandArg::Abelianization => Command::Abelianization,
            CommandArg::Compat => Command::Compat,
            CommandArg::BrownCheck => Command::BrownCheck,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ResolutionArg {
    Auto,
    Bar,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SourceArg {
    Catalog,
    Solver,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

/// Integral cohomology and orbifold invariants of Z^n x| G.
#[derive(Debug, Parser)]
#[command(name = "orbicoh", version)]
struct Cli {
    command: CommandArg,
    /// Built-in model (Y1, Y2) or path to a JSON model file.
    #[arg(long)]
    model: String,
    #[arg(long)]
    max_degree: Option<usize>,
    /// Z or F<p>.
    #[arg(long, default_value = "Z")]
    coeff: String,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    /// Assemble E2 even when the Sylow block hypothesis is not verified.
    #[arg(long)]
    force: bool,
    /// Cross-check integral cohomology against the total complex.
    #[arg(long)]
    verify: bool,
    #[arg(long, value_enum, default_value = "auto")]
    resolution: ResolutionArg,
    /// Source of rank-two block actions.
    #[arg(long, value_enum, default_value = "catalog")]
    action: SourceArg,
    /// Subgroup as comma-separated words in t (or t1, t2, ...).
    #[arg(long)]
    subgroup: Option<String>,
    /// Prime for the classes command.
    #[arg(long, default_value_t = 2)]
    prime: u64,
    /// Single degree for brown-check.
    #[arg(long)]
    degree: Option<usize>,
    /// 2x2 matrix for compat, as JSON rows.
    #[arg(long)]
    matrix: Option<String>,
}

fn spec_from(cli: &Cli) -> Result<JobSpec, CliError> {
    let mut spec = JobSpec::new(ModelSource::parse(&cli.model), cli.command.into());
    spec.max_degree = cli.max_degree;
    spec.coefficients = cli.coeff.parse::<Coefficients>()?;
    spec.force = cli.force;
    spec.verify = cli.verify;
    spec.resolution = match cli.resolution {
        ResolutionArg::Auto => ResolutionChoice::Auto,
        ResolutionArg::Bar => ResolutionChoice::Bar,
    };
    spec.action_source = match cli.action {
        SourceArg::Catalog => ActionSource::Catalog,
        SourceArg::Solver => ActionSource::Solver,
    };
    spec.subgroup = cli.subgroup.clone();
    spec.prime = cli.prime;
    spec.degree = cli.degree;
    spec.matrix = match &cli.matrix {
        Some(m) => Some(serde_json::from_str(m).map_err(|e| CliError::Malformed(format!("--matrix: {e}")))?),
        None => None,
    };
    Ok(spec)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.format {
        FormatArg::Text => Format::Text,
        FormatArg::Json => Format::Json,
    };
    let result = spec_from(&cli).and_then(|spec| run_command(&spec));
    match result {
        Ok(doc) => {
            print!("{}", emit_report(&doc, format));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
