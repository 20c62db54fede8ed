//! `cvqkd`: key rates, sweeps, thresholds and the self-verification suite.

mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cvqkd_core::oracle::suite::{run_suite, SuiteConfig};
use cvqkd_core::oracle::{evaluate, sweep, threshold_transmission, SweepGrid};
use cvqkd_core::{
    ChannelParams, Error, Measurement, Method, Methods, ProtocolSpec, Reconciliation, StatePrep, SweepAxis,
};

use output::{Record, ThresholdRecord};

#[derive(Parser, Debug)]
#[command(
    name = "cvqkd",
    version,
    about = "Secret key rates of Gaussian CV-QKD protocols with an untrusted source"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Key rate at a single channel point.
    Keyrate {
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[arg(long = "V")]
        v: f64,
        #[arg(long = "T1")]
        t1: f64,
        #[arg(long = "T2")]
        t2: f64,
        #[command(flatten)]
        noise: NoiseArgs,
        #[command(flatten)]
        display: DisplayArgs,
    },
    /// Key rates along a transmission axis.
    Sweep {
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[arg(long = "V")]
        v: f64,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long, value_enum)]
        axis: AxisArg,
        #[arg(long)]
        t_start: f64,
        #[arg(long)]
        t_end: f64,
        #[arg(long)]
        steps: usize,
        #[command(flatten)]
        display: DisplayArgs,
    },
    /// Smallest transmission with a positive key rate.
    Threshold {
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[arg(long = "V")]
        v: f64,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long, value_enum)]
        axis: AxisArg,
        #[arg(long, value_enum, default_value_t = MethodArg::Closed)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the property suite and print a pass/fail table.
    Verify {
        #[arg(long, default_value_t = SuiteConfig::default().seed)]
        seed: u64,
        /// Monte Carlo samples per point.
        #[arg(long, default_value_t = SuiteConfig::default().mc_samples)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args, Debug)]
struct ProtocolArgs {
    #[arg(long, value_enum)]
    state: StateArg,
    #[arg(long, value_enum)]
    meas: MeasArg,
    #[arg(long, value_enum)]
    recon: ReconArg,
}

impl ProtocolArgs {
    fn spec(&self) -> ProtocolSpec {
        let prep = match self.state {
            StateArg::Squeezed => StatePrep::Squeezed,
            StateArg::Coherent => StatePrep::Coherent,
        };
        let meas = match self.meas {
            MeasArg::Homodyne => Measurement::Homodyne,
            MeasArg::Heterodyne => Measurement::Heterodyne,
        };
        let recon = match self.recon {
            ReconArg::Direct => Reconciliation::Direct,
            ReconArg::Reverse => Reconciliation::Reverse,
        };
        ProtocolSpec::new(prep, meas, recon)
    }
}

/// `--W` sets both cloner variances; `--W1` and `--W2` override it.
#[derive(Args, Debug)]
struct NoiseArgs {
    #[arg(long = "W")]
    w: Option<f64>,
    #[arg(long = "W1")]
    w1: Option<f64>,
    #[arg(long = "W2")]
    w2: Option<f64>,
}

impl NoiseArgs {
    fn resolve(&self) -> Result<(f64, f64), Error> {
        match (self.w1.or(self.w), self.w2.or(self.w)) {
            (Some(w1), Some(w2)) => Ok((w1, w2)),
            _ => Err(Error::InvalidArgument(
                "cloner variance missing: pass --W or both --W1 and --W2".into(),
            )),
        }
    }
}

#[derive(Args, Debug)]
struct DisplayArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Closed)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Print negative key rates as 0.
    #[arg(long)]
    floor_zero: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum StateArg {
    Squeezed,
    Coherent,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MeasArg {
    #[value(alias = "hom")]
    Homodyne,
    #[value(alias = "het")]
    Heterodyne,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ReconArg {
    #[value(alias = "dr")]
    Direct,
    #[value(alias = "rr")]
    Reverse,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum AxisArg {
    /// T1 = T2 = √t; t is the effective transmission.
    Symmetric,
    /// T1 = 1, T2 = t.
    Trusted,
    /// T1 = T2 = t.
    PerArm,
}

impl From<AxisArg> for SweepAxis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::Symmetric => SweepAxis::EffectiveSymmetric,
            AxisArg::Trusted => SweepAxis::EffectiveTrusted,
            AxisArg::PerArm => SweepAxis::PerArm,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MethodArg {
    Closed,
    Generic,
    Both,
}

impl MethodArg {
    fn methods(self) -> Methods {
        match self {
            MethodArg::Closed => Methods::Closed,
            MethodArg::Generic => Methods::Generic,
            MethodArg::Both => Methods::Both,
        }
    }

    fn each(self) -> Vec<Method> {
        [Method::Closed, Method::Generic]
            .into_iter()
            .filter(|&m| self.methods().includes(m))
            .collect()
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Text,
}

/// What a successful run prints, and whether it counts as a failure.
struct Report {
    text: String,
    failed: bool,
}

fn render(records: Vec<Record>, display: &DisplayArgs) -> String {
    let records: Vec<Record> = records
        .into_iter()
        .map(|r| if display.floor_zero { r.floor_zero() } else { r })
        .collect();
    match display.format {
        Format::Csv => output::emit_csv(&records),
        Format::Text => output::emit_text(&records),
    }
}

fn execute(command: Command) -> Result<Report, Error> {
    let text = match command {
        Command::Keyrate {
            protocol,
            v,
            t1,
            t2,
            noise,
            display,
        } => {
            let spec = protocol.spec();
            let (w1, w2) = noise.resolve()?;
            let params = ChannelParams::new(v, t1, t2, w1, w2)?;
            let records = display
                .method
                .each()
                .into_iter()
                .map(|method| {
                    Ok(Record {
                        spec,
                        params,
                        method,
                        breakdown: evaluate(method, &spec, &params)?,
                    })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            render(records, &display)
        }
        Command::Sweep {
            protocol,
            v,
            noise,
            axis,
            t_start,
            t_end,
            steps,
            display,
        } => {
            let spec = protocol.spec();
            let (w1, w2) = noise.resolve()?;
            let grid = SweepGrid {
                spec,
                v,
                w1,
                w2,
                axis: axis.into(),
                t_start,
                t_end,
                steps,
            };
            let rows = sweep(&grid, display.method.methods())?;
            let records = rows
                .iter()
                .flat_map(|row| {
                    display.method.each().into_iter().filter_map(move |method| {
                        row.get(method).map(|k| Record {
                            spec,
                            params: row.params,
                            method,
                            breakdown: *k,
                        })
                    })
                })
                .collect();
            render(records, &display)
        }
        Command::Threshold {
            protocol,
            v,
            noise,
            axis,
            method,
            format,
        } => {
            let spec = protocol.spec();
            let (w1, w2) = noise.resolve()?;
            let axis: SweepAxis = axis.into();
            let records = method
                .each()
                .into_iter()
                .map(|m| {
                    let threshold = threshold_transmission(&spec, v, w1, w2, axis, m)?;
                    Ok(ThresholdRecord {
                        spec,
                        v,
                        w1,
                        w2,
                        axis,
                        method: m,
                        threshold,
                    })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            match format {
                Format::Csv => output::emit_threshold_csv(&records),
                Format::Text => output::emit_threshold_text(&records),
            }
        }
        Command::Verify { seed, samples, format } => {
            let checks = run_suite(&SuiteConfig {
                mc_samples: samples,
                seed,
            });
            let failed = checks.iter().any(|c| !c.passed);
            let text = match format {
                Format::Csv => output::emit_verify_csv(&checks),
                Format::Text => output::emit_verify_text(&checks),
            };
            return Ok(Report { text, failed });
        }
    };
    Ok(Report { text, failed: false })
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidArgument(_) => 1,
        Error::Numerical(_) | Error::Precondition(_) => 2,
    }
}

fn one_line(message: &str) -> String {
    let line = message.split_whitespace().collect::<Vec<_>>().join(" ");
    line.strip_prefix("error: ").unwrap_or(&line).to_string()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let summary: Vec<&str> = rendered
                .lines()
                .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
                .collect();
            eprintln!("error: {}", one_line(&summary.join(" ")));
            return ExitCode::from(1);
        }
    };
    match execute(cli.command) {
        Ok(report) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(report.text.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(1);
            }
            if report.failed {
                eprintln!("error: verification suite reported failing checks");
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(err) => {
            eprintln!("error: {}", one_line(&err.to_string()));
            ExitCode::from(exit_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("cvqkd").chain(args.iter().copied()))
    }

    #[test]
    fn noise_override() {
        let n = NoiseArgs {
            w: Some(1.1),
            w1: None,
            w2: Some(1.3),
        };
        assert_eq!(n.resolve().unwrap(), (1.1, 1.3));
        let n = NoiseArgs {
            w: None,
            w1: Some(1.0),
            w2: None,
        };
        assert!(n.resolve().is_err());
    }

    #[test]
    fn parses_uppercase_flags_and_aliases() {
        let cli = parse(&[
            "keyrate", "--state", "coherent", "--meas", "hom", "--recon", "rr", "--V", "20", "--T1", "0.5", "--T2",
            "1", "--W", "1",
        ])
        .unwrap();
        let Command::Keyrate {
            protocol,
            v,
            t1,
            display,
            ..
        } = cli.command
        else {
            panic!()
        };
        assert_eq!(protocol.spec().to_string(), "coherent-hom/rr");
        assert_eq!((v, t1), (20.0, 0.5));
        assert_eq!(display.format, Format::Csv);
    }

    #[test]
    fn missing_and_bad_arguments() {
        assert!(parse(&["keyrate", "--state", "coherent"]).is_err());
        assert!(parse(&["sweep", "--state", "bright", "--meas", "hom", "--recon", "dr"]).is_err());
        assert!(parse(&["frobnicate"]).is_err());
    }

    #[test]
    fn error_messages_fit_on_one_line() {
        assert_eq!(one_line("error: bad\n\n  value  here\n"), "bad value here");
        assert_eq!(exit_code(&Error::Precondition("x".into())), 2);
        assert_eq!(exit_code(&Error::InvalidArgument("x".into())), 1);
    }

    #[test]
    fn method_expansion() {
        assert_eq!(MethodArg::Both.each(), vec![Method::Closed, Method::Generic]);
        assert_eq!(MethodArg::Generic.each(), vec![Method::Generic]);
    }
}
