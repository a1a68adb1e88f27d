//! `transteg` — plan, simulate and apply RTP transcoding steganography.
//!
//! Exit codes: 0 success; 2 usage or configuration problem (unknown codec,
//! infeasible pair, bad ledger, no matching flow); 3 data-quality problem
//! (bit errors, hidden data truncated); 4 I/O problem.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod fail;

#[derive(Parser)]
#[command(name = "transteg", version, about = "RTP transcoding steganography toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlanFormat {
    Table,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Print the feasibility/bandwidth/cost matrix with recommendations.
    Plan {
        /// Quality ledger file (default: built-in copy, or $TRANSTEG_LEDGER).
        #[arg(long)]
        ledger: Option<PathBuf>,
        /// Measured mean bitrate of the lossless covert codec in kbps.
        #[arg(long = "lossless-kbps")]
        lossless_kbps: Option<f64>,
        #[arg(long, value_enum, default_value = "table")]
        format: PlanFormat,
    },
    /// Run a simulated call and print its metrics.
    Simulate {
        /// S1..S4: placement of the hidden-data sender and receiver.
        #[arg(long, default_value = "S4")]
        scenario: String,
        #[arg(long, required_unless_present = "sweep")]
        overt: Option<String>,
        #[arg(long, required_unless_present = "sweep")]
        covert: Option<String>,
        /// 8 kHz mono 16-bit WAV input (default: synthetic speech-shaped noise).
        #[arg(long)]
        wav: Option<PathBuf>,
        /// File whose bytes form the hidden stream (default: seeded random).
        #[arg(long)]
        steg: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 60.0)]
        duration: f64,
        /// Voice activity ratio of the synthetic source.
        #[arg(long = "activity-ratio", default_value_t = 0.465)]
        activity_ratio: f64,
        /// Append metrics rows to this CSV file.
        #[arg(long = "out-csv")]
        out_csv: Option<PathBuf>,
        /// Write the covert-segment packets as a pcap.
        #[arg(long = "out-pcap", conflicts_with = "sweep")]
        out_pcap: Option<PathBuf>,
        /// Run every feasible pair in the chosen scenario.
        #[arg(long, conflicts_with_all = ["overt", "covert"])]
        sweep: bool,
    },
    /// Rewrite a capture: hide a file inside an RTP flow.
    Embed {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
        #[arg(long)]
        overt: String,
        #[arg(long)]
        covert: String,
        /// File whose bytes are hidden in the flow.
        #[arg(long)]
        steg: PathBuf,
    },
    /// Recover hidden bytes from a rewritten capture.
    Extract {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
        #[arg(long)]
        overt: String,
        #[arg(long)]
        covert: String,
    },
    /// List RTP flows in a capture with codec guesses.
    Inspect {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Plan {
            ledger,
            lossless_kbps,
            format,
        } => commands::plan(ledger, lossless_kbps, format),
        Command::Simulate {
            scenario,
            overt,
            covert,
            wav,
            steg,
            seed,
            duration,
            activity_ratio,
            out_csv,
            out_pcap,
            sweep,
        } => commands::simulate(commands::SimulateArgs {
            scenario,
            overt,
            covert,
            wav,
            steg,
            seed,
            duration,
            activity_ratio,
            out_csv,
            out_pcap,
            sweep,
        }),
        Command::Embed {
            input,
            output,
            overt,
            covert,
            steg,
        } => commands::embed(&input, &output, &overt, &covert, &steg),
        Command::Extract {
            input,
            output,
            overt,
            covert,
        } => commands::extract(&input, &output, &overt, &covert),
        Command::Inspect { input } => commands::inspect(&input),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("transteg: {}", failure.message);
            ExitCode::from(failure.exit_code)
        }
    }
}
