use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod files;
mod render;

use files::CliError;

/// Build, seed, audit and grade small spreadsheet models.
#[derive(Parser)]
#[command(name = "sheetaudit", version)]
struct Cli {
    /// Print structured JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a grid file and print the values.
    Eval { grid: PathBuf },
    /// Seed known errors into a correct model.
    Seed {
        grid: PathBuf,
        #[arg(long)]
        count: usize,
        /// Comma-separated error kinds; all six when omitted.
        #[arg(long, value_delimiter = ',')]
        kinds: Vec<String>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
        /// Cells that must not be seeded, e.g. script inputs.
        #[arg(long, value_delimiter = ',')]
        exclude: Vec<String>,
    },
    /// List cells where a subject model diverges from its reference.
    Diff {
        reference: PathBuf,
        subject: PathBuf,
    },
    /// Report the builder's self-audit checklist against the evidence.
    SelfAudit {
        grid: PathBuf,
        /// JSON checklist of declarations.
        #[arg(long)]
        declare: PathBuf,
        /// JSON risk assessment table.
        #[arg(long)]
        risk: Option<PathBuf>,
    },
    /// Run an audit script against a subject and write the report.
    PeerAudit {
        subject: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        auditor: String,
        #[arg(long)]
        audited: String,
        /// Report date, YYYY-MM-DD.
        #[arg(long)]
        date: chrono::NaiveDate,
        /// Cells the auditor believes are wrong.
        #[arg(long, value_delimiter = ',')]
        flag: Vec<String>,
        #[arg(long)]
        note: Option<String>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Shuffle a roster into an audit ring.
    Pair {
        roster: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Output file; defaults to <roster stem>.pairing.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grade an audit report against the seed manifest.
    Grade {
        report: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        subject: PathBuf,
    },
    /// Error rates over a directory of <stem>.ref.grid files, each paired
    /// with <stem>.manifest.json or <stem>.grid.
    Metrics { results_dir: PathBuf },
    /// Tally five-question feedback responses.
    Tally { responses: PathBuf },
    /// Check that every manifest and script in a directory is consistent.
    VerifyBundle { dir: PathBuf },
}

fn run(cli: Cli) -> Result<String, CliError> {
    let json = cli.json;
    match cli.command {
        Command::Eval { grid } => commands::eval(&grid, json),
        Command::Seed {
            grid,
            count,
            kinds,
            seed,
            out_dir,
            exclude,
        } => commands::seed(&grid, count, &kinds, seed, &out_dir, &exclude, json),
        Command::Diff { reference, subject } => commands::diff(&reference, &subject, json),
        Command::SelfAudit {
            grid,
            declare,
            risk,
        } => commands::self_audit(&grid, &declare, risk.as_deref(), json),
        Command::PeerAudit {
            subject,
            reference,
            script,
            auditor,
            audited,
            date,
            flag,
            note,
            out_dir,
        } => {
            let args = commands::PeerAuditArgs {
                subject,
                reference,
                script,
                auditor,
                audited,
                date,
                flag,
                note,
                out_dir,
            };
            commands::peer_audit(&args, json)
        }
        Command::Pair { roster, seed, out } => commands::pair(&roster, seed, out, json),
        Command::Grade {
            report,
            manifest,
            reference,
            subject,
        } => commands::grade(&report, &manifest, &reference, &subject, json),
        Command::Metrics { results_dir } => commands::metrics(&results_dir, json),
        Command::Tally { responses } => commands::tally(&responses, json),
        Command::VerifyBundle { dir } => commands::verify_bundle(&dir, json),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("sheetaudit: {e}");
            ExitCode::FAILURE
        }
    }
}
