use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use dglift::frontend::{run_command, Along, CommandOptions};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Verb {
    Validate,
    Atiyah,
    Lift,
    Ks,
    Fesox,
    Exactseq,
    H0nu,
    Omega,
    Random,
}

impl Verb {
    fn name(self) -> &'static str {
        match self {
            Verb::Validate => "validate",
            Verb::Atiyah => "atiyah",
            Verb::Lift => "lift",
            Verb::Ks => "ks",
            Verb::Fesox => "fesox",
            Verb::Exactseq => "exactseq",
            Verb::H0nu => "h0nu",
            Verb::Omega => "omega",
            Verb::Random => "random",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlongArg {
    #[value(name = "B")]
    B,
    #[value(name = "J")]
    J,
    #[value(name = "Omega")]
    Omega,
}

/// Liftability of semifree DG modules along free extensions.
#[derive(Debug, Parser)]
#[command(name = "dglift", version)]
struct Cli {
    /// Command to run.
    #[arg(value_enum)]
    verb: Verb,
    /// Instance document (`-` for stdin). Not used by `random`.
    file: Option<PathBuf>,
    /// Module to operate on; optional when the document declares one.
    #[arg(long)]
    module: Option<String>,
    /// Coefficient target for `exactseq`.
    #[arg(long, value_enum, default_value = "B")]
    along: AlongArg,
    /// Degree window `LO..HI` for `exactseq`.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    degrees: Option<(i32, i32)>,
    /// Write the lifting witness (f and ψ) as JSON to this path.
    #[arg(long)]
    witness: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Generator profile: tiny, corpus or zero-ext.
    #[arg(long, default_value = "tiny")]
    profile: String,
    /// Emit the JSON report instead of text.
    #[arg(long)]
    json: bool,
    /// Worker threads for corpus experiments.
    #[arg(long)]
    jobs: Option<usize>,
    /// With `random`: cross-tabulate lifting against the classical Atiyah
    /// and Kodaira-Spencer conditions on a seeded corpus.
    #[arg(long)]
    experiment: bool,
    /// Corpus size for `--experiment`.
    #[arg(long, default_value_t = 100)]
    count: usize,
}

fn parse_window(s: &str) -> Result<(i32, i32), String> {
    let (lo, hi) = s.split_once("..").ok_or("expected LO..HI")?;
    let lo = lo.trim().parse().map_err(|e| format!("bad LO: {e}"))?;
    let hi = hi.trim().parse().map_err(|e| format!("bad HI: {e}"))?;
    Ok((lo, hi))
}

fn read_document(path: &PathBuf) -> std::io::Result<String> {
    if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin())
    } else {
        std::fs::read_to_string(path)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let document = match &cli.file {
        Some(p) => match read_document(p) {
            Ok(t) => Some(t),
            Err(e) => {
                eprintln!("cannot read {}: {e}", p.display());
                return ExitCode::from(1);
            }
        },
        None => None,
    };
    let opts = CommandOptions {
        module: cli.module.clone(),
        along: match cli.along {
            AlongArg::B => Along::B,
            AlongArg::J => Along::J,
            AlongArg::Omega => Along::Omega,
        },
        degrees: cli.degrees,
        seed: cli.seed,
        profile: cli.profile.clone(),
        count: cli.count,
        jobs: cli.jobs,
        experiment: cli.experiment,
    };
    let out = run_command(cli.verb.name(), document.as_deref(), &opts);
    if let Some(path) = &cli.witness {
        let w = serde_json::json!({
            "verdict": out.json.get("verdict"),
            "witness_f": out.json.get("witness_f"),
            "witness_psi": out.json.get("witness_psi"),
        });
        if let Err(e) = std::fs::write(path, serde_json::to_string_pretty(&w).expect("json")) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&out.json).expect("json"));
    } else if out.exit_code == 0 {
        print!("{}", out.text);
    } else {
        eprint!("{}", out.text);
    }
    ExitCode::from(out.exit_code as u8)
}
