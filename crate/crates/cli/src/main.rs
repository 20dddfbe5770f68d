use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hsc_cli::{catalog, presets, resolve_config, run, CliError, Command, Outcome};
use serde_json::json;

#[derive(Parser)]
#[command(name = "hsc", version, about = "Stem cell delay model: stability, simulation and chaos diagnostics")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON run configuration, laid over the preset when both are given
    #[arg(long)]
    config: Option<PathBuf>,
    /// Start from a named preset
    #[arg(long)]
    preset: Option<String>,
    /// Override one key, e.g. --set adjust.kappa=0.865
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (takes precedence over HSC_OUTPUT_DIR)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Steady states and existence bounds
    Steady(RunArgs),
    /// Linearisation, stability class, C0 boundary and critical delays
    Stability(RunArgs),
    /// Real and complex characteristic roots
    Roots(RunArgs),
    /// Hopf points along one parameter
    Hopf(RunArgs),
    /// Trajectory, events and period estimates
    Simulate(RunArgs),
    /// Delay embedding of a trajectory
    Embed(RunArgs),
    /// Poincare section crossings
    Poincare(RunArgs),
    /// Orbit diagram over a parameter mesh
    Sweep(RunArgs),
    /// Lyapunov spectrum and Kaplan-Yorke dimension
    Lyapunov(RunArgs),
    /// Slow manifold, nullcline and landmarks
    Slowman(RunArgs),
    /// List the reproduction presets
    Presets {
        /// Print the full catalog, configs included, as JSON
        #[arg(long)]
        json: bool,
    },
    /// Run presets by name; several names run in parallel
    Preset {
        #[arg(required = true)]
        names: Vec<String>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn fail(e: &CliError) -> i32 {
    eprintln!("{}", e.to_json());
    e.exit_code()
}

fn report(command: Command, preset: Option<&str>, outcome: &Outcome) {
    println!(
        "{}",
        json!({
            "command": command,
            "preset": preset,
            "status": if outcome.flags.is_empty() { "ok" } else { "unconverged" },
            "flags": outcome.flags,
            "manifest": outcome.manifest,
        })
    );
}

fn run_one(command: Command, args: &RunArgs) -> i32 {
    let document = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match hsc_cli::config::parse_document(&text, &path.display().to_string()) {
                Ok(v) => Some(v),
                Err(e) => return fail(&e),
            },
            Err(e) => return fail(&CliError::config("", format!("{}: {e}", path.display()))),
        },
        None => None,
    };
    let result = resolve_config(args.preset.as_deref(), document, &args.set, args.out.as_deref())
        .and_then(|cfg| run(command, args.preset.as_deref(), &cfg));
    match result {
        Ok(outcome) => {
            report(command, args.preset.as_deref(), &outcome);
            outcome.exit_code()
        }
        Err(e) => fail(&e),
    }
}

fn list_presets(full: bool) -> i32 {
    let cat = catalog();
    if full {
        match serde_json::to_string_pretty(&cat) {
            Ok(s) => println!("{s}"),
            Err(e) => return fail(&CliError::Output(e.to_string())),
        }
        return 0;
    }
    for p in &cat {
        let checks: Vec<String> = p.checks.iter().map(|c| format!("{}={}", c.quantity, c.expected)).collect();
        println!("{:<22} {:<10} {}  [{}]", p.name, p.command.as_str(), p.description, checks.join(", "));
    }
    0
}

fn run_presets(names: &[String], set: &[String], out: Option<PathBuf>) -> i32 {
    for name in names {
        if presets::find(name).is_none() {
            return fail(&CliError::config("preset", format!("unknown preset `{name}`")));
        }
    }
    let codes: Vec<i32> = std::thread::scope(|s| {
        let handles: Vec<_> = names
            .iter()
            .map(|name| {
                let args = RunArgs {
                    config: None,
                    preset: Some(name.clone()),
                    set: set.to_vec(),
                    out: out.clone(),
                };
                let command = presets::find(name).expect("checked above").command;
                s.spawn(move || run_one(command, &args))
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap_or(3)).collect()
    });
    // errors outrank flagged results, which outrank success
    codes
        .into_iter()
        .max_by_key(|&c| match c {
            0 => 0,
            4 => 1,
            _ => 2 + c,
        })
        .unwrap_or(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let code = fail(&CliError::Usage(e.render().to_string().trim().to_string()));
            return ExitCode::from(code as u8);
        }
    };
    let code = match cli.cmd {
        Cmd::Steady(a) => run_one(Command::Steady, &a),
        Cmd::Stability(a) => run_one(Command::Stability, &a),
        Cmd::Roots(a) => run_one(Command::Roots, &a),
        Cmd::Hopf(a) => run_one(Command::Hopf, &a),
        Cmd::Simulate(a) => run_one(Command::Simulate, &a),
        Cmd::Embed(a) => run_one(Command::Embed, &a),
        Cmd::Poincare(a) => run_one(Command::Poincare, &a),
        Cmd::Sweep(a) => run_one(Command::Sweep, &a),
        Cmd::Lyapunov(a) => run_one(Command::Lyapunov, &a),
        Cmd::Slowman(a) => run_one(Command::Slowman, &a),
        Cmd::Presets { json } => list_presets(json),
        Cmd::Preset { names, set, out } => run_presets(&names, &set, out),
    };
    ExitCode::from(code as u8)
}
