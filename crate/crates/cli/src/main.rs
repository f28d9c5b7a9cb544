use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use folia_cli::{
    cmd_blowup, cmd_classify, cmd_holonomy, cmd_resolve, cmd_timeform, parse_var, BlowupArgs, Center, CliError, CliResult,
    ResolveArgs, SeparatrixArg, ZflowArgs, DEFAULT_TRUNC,
};
use num_complex::Complex64;

#[derive(Parser, Debug)]
#[command(name = "folia", version, about = "Blow-ups and separatrices of foliations on (C^3, 0)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit JSON (the default and only format).
    #[arg(long, global = true)]
    json: bool,
    /// Indent the JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    /// Write the report to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify the singular point at the origin.
    Classify {
        /// Field as "[F, G, H]".
        field: String,
        #[arg(long, default_value_t = DEFAULT_TRUNC)]
        trunc: u32,
    },
    /// Blow up a point, a coordinate axis or (weight 2) the x-axis.
    Blowup {
        field: String,
        #[arg(long, default_value_t = DEFAULT_TRUNC)]
        trunc: u32,
        #[arg(long, value_enum, default_value_t = CenterArg::Point)]
        center: CenterArg,
        /// Point center: the chart variable. Curve center: the transverse variable that is divided.
        #[arg(long, default_value = "z")]
        chart: String,
        /// Axis blown up for a curve center.
        #[arg(long, default_value = "x")]
        axis: String,
        #[arg(long, default_value_t = 1)]
        weight: u32,
    },
    /// Resolve along a separatrix and test for persistent nilpotent normal forms.
    Resolve {
        field: String,
        #[arg(long, default_value_t = DEFAULT_TRUNC)]
        trunc: u32,
        #[arg(long, value_enum, default_value_t = SepArg::Solve)]
        separatrix: SepArg,
        /// Axis for `--separatrix axis`.
        #[arg(long, default_value = "z")]
        axis: String,
        /// Curve file for `--separatrix file`, holding "[x(t), y(t), z(t)]".
        #[arg(long, value_name = "PATH")]
        curve: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        max_steps: u32,
        /// Separatrix degree (default trunc - 2).
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Holonomy of the invariant axis for the (alpha, beta) family.
    Holonomy {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        /// Also integrate the leaf equations once around x0 (format RE[,IM]).
        #[arg(long, allow_hyphen_values = true)]
        zflow_x0: Option<String>,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        y0: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        z0: String,
    },
    /// Integral of dx / rho(x) along x0 * exp(2 pi i turns t), t in [0, 1].
    Timeform {
        /// rho as a polynomial in x.
        #[arg(long)]
        rho: String,
        /// Base point, RE[,IM].
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        turns: String,
        #[arg(long, default_value_t = DEFAULT_TRUNC)]
        trunc: u32,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CenterArg {
    Point,
    Curve,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SepArg {
    Solve,
    Axis,
    File,
}

fn parse_complex(name: &str, s: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Parse(format!("argument {}: '{}' is not RE[,IM]", name, s));
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

fn run(cmd: Command) -> CliResult {
    match cmd {
        Command::Classify { field, trunc } => cmd_classify(&field, trunc),
        Command::Blowup { field, trunc, center, chart, axis, weight } => {
            let args = BlowupArgs {
                center: match center {
                    CenterArg::Point => Center::Point,
                    CenterArg::Curve => Center::Curve,
                },
                chart: parse_var("--chart", &chart)?,
                axis: parse_var("--axis", &axis)?,
                weight,
            };
            cmd_blowup(&field, trunc, &args)
        }
        Command::Resolve { field, trunc, separatrix, axis, curve, max_steps, degree } => {
            let separatrix = match separatrix {
                SepArg::Solve => SeparatrixArg::Solve,
                SepArg::Axis => SeparatrixArg::Axis(parse_var("--axis", &axis)?),
                SepArg::File => {
                    let path = curve.ok_or_else(|| CliError::Parse("argument --curve: required with --separatrix file".into()))?;
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| CliError::Parse(format!("argument --curve: {}: {}", path.display(), e)))?;
                    SeparatrixArg::Curve(text.trim().to_string())
                }
            };
            cmd_resolve(&field, trunc, &ResolveArgs { separatrix, max_steps, degree })
        }
        Command::Holonomy { alpha, beta, zflow_x0, y0, z0 } => {
            let zflow = match zflow_x0 {
                Some(x0) => Some(ZflowArgs {
                    x0: parse_complex("--zflow-x0", &x0)?,
                    y0: parse_complex("--y0", &y0)?,
                    z0: parse_complex("--z0", &z0)?,
                }),
                None => None,
            };
            cmd_holonomy(&alpha, &beta, zflow.as_ref())
        }
        Command::Timeform { rho, x0, turns, trunc } => cmd_timeform(&rho, parse_complex("--x0", &x0)?, &turns, trunc),
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, format!("{}\n", text))?,
        None => writeln!(std::io::stdout().lock(), "{}", text)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (value, code) = match run(cli.command) {
        Ok(v) => (v, 0),
        Err(e) => {
            eprintln!("error: {}", e);
            (e.to_json(), e.exit_code())
        }
    };
    let text = if cli.pretty {
        serde_json::to_string_pretty(&value).expect("serializable")
    } else {
        serde_json::to_string(&value).expect("serializable")
    };
    if let Err(e) = emit(&text, cli.out.as_ref()) {
        eprintln!("error: {:#}", e);
        return ExitCode::from(1);
    }
    ExitCode::from(code as u8)
}
