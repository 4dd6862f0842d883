use clap::Parser;
use relmix::frontend::{error_exit_code, error_json, parse_problem, run, RunFlags};
use std::path::PathBuf;
use std::process::ExitCode;

/// Length functions and multiplicities of multigraded algebra pairs:
/// relative mixed multiplicities, their stable values, finiteness and
/// birationality verdicts, and projective degrees of rational maps.
#[derive(Parser, Debug)]
#[command(name = "relmix", version)]
struct Cli {
    /// Problem file (see README for the grammar)
    #[arg(long)]
    input: PathBuf,

    /// Override the document's field characteristic
    #[arg(long)]
    prime: Option<u64>,

    /// Prime for the independent verifier (default 65521)
    #[arg(long)]
    second_prime: Option<u64>,

    /// Largest window origin the stabilization search is allowed to reach
    #[arg(long)]
    max_origin: Option<i64>,

    /// Write the JSON report here as well as to stdout
    #[arg(long)]
    json: Option<PathBuf>,

    /// Replay every computed dimension through the brute-force verifier;
    /// mismatches set exit code 4
    #[arg(long)]
    oracle: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let flags = RunFlags {
        prime_override: cli.prime,
        second_prime: cli.second_prime,
        max_origin: cli.max_origin,
        oracle: cli.oracle,
    };
    let outcome = std::fs::read_to_string(&cli.input)
        .map_err(relmix::Error::from)
        .and_then(|text| parse_problem(&text))
        .and_then(|doc| run(&doc, &flags));
    match outcome {
        Ok(output) => {
            let rendered = serde_json::to_string_pretty(&output.json)
                .expect("report serialization cannot fail");
            println!("{}", rendered);
            if let Some(path) = &cli.json {
                if let Err(e) = std::fs::write(path, rendered + "\n") {
                    eprintln!("{}", error_json(&relmix::Error::from(e)));
                    return ExitCode::from(1);
                }
            }
            ExitCode::from(output.exit_code as u8)
        }
        Err(err) => {
            eprintln!("{}", error_json(&err));
            ExitCode::from(error_exit_code(&err) as u8)
        }
    }
}
