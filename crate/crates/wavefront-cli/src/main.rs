use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wavefront::model::BirthSpec;
use wavefront_cli::commands::{self, CliError, CliResult};
use wavefront_cli::config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "wavefront", version, about = "Fronts of delayed monostable reaction-diffusion equations")]
struct Cli {
    /// TOML or JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Birth function preset (hadeler_rothe, kpp).
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Delay.
    #[arg(long, global = true, allow_negative_numbers = true)]
    h: Option<f64>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Print the effective configuration as TOML and exit.
    #[arg(long)]
    dump_defaults: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimal linear speed and decay rates.
    Spectrum,
    /// Wave profile at the minimal or a fixed speed.
    Profile,
    /// Minimal speed over a list of delays.
    SpeedSweep,
    /// Time integration with snapshots and level-set tracking.
    Simulate,
    /// Run a named scenario and report PASS/FAIL per criterion.
    Verify {
        /// stability | global-front | two-front | spreading | envelope | origin-approach
        scenario: String,
    },
}

fn effective_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(p) = &cli.preset {
        cfg.model = BirthSpec::Preset(p.clone());
    }
    if let Some(h) = cli.h {
        cfg.h = h;
    }
    if let Some(d) = &cli.out_dir {
        cfg.out_dir = d.clone();
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> CliResult<()> {
    let cfg = effective_config(cli)?;
    if cli.dump_defaults {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    let Some(command) = &cli.command else {
        return Err(CliError::Validation("no subcommand given (see --help)".into()));
    };
    match command {
        Command::Spectrum => {
            let r = commands::spectrum(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&r).expect("report serializes"));
        }
        Command::Profile => {
            let m = commands::profile(&cfg)?;
            println!("model {} h {} c {:.8}", m.model, m.h, m.c);
            println!("c_sharp {:.8}", m.c_sharp);
            if let Some(kind) = &m.kind {
                println!("kind {kind}");
            }
            println!("residual {:.3e}", m.residual);
        }
        Command::SpeedSweep => {
            let rows = commands::speed_sweep(&cfg)?;
            println!("h,c_sharp,c_star,kind,note");
            let opt = |v: Option<f64>| v.map(|x| format!("{x:.8}")).unwrap_or_default();
            for r in rows {
                println!(
                    "{},{},{},{},{}",
                    r.h,
                    opt(r.c_sharp),
                    opt(r.c_star),
                    r.kind.unwrap_or_default(),
                    r.note.unwrap_or_default()
                );
            }
        }
        Command::Simulate => {
            let s = commands::simulate(&cfg)?;
            println!("model {} h {} dt {} T {} on [{}, {}]", s.model, s.h, s.dt, s.t_final, s.x_min, s.x_max);
            for (level, e) in cfg.diagnostics.levels.iter().zip(&s.spreading) {
                match e {
                    Some(e) => println!("level {level}: speed left {:?} right {:?}", e.c_left, e.c_right),
                    None => println!("level {level}: no speed estimate"),
                }
            }
            println!("wrote {} snapshots to {}", s.snapshots, cfg.out_dir.display());
        }
        Command::Verify { scenario } => {
            let v = commands::verify(&cfg, scenario, cli.h)?;
            for c in &v.criteria {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!("{tag} {}: {}", c.name, c.detail);
            }
            if !v.passed {
                let failing: Vec<&str> = v.criteria.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
                return Err(CliError::Failure(format!(
                    "scenario {} failed: {}",
                    v.scenario,
                    failing.join("; ")
                )));
            }
            println!("PASS {}", v.scenario);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
