#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use igflow::analysis::exact_riemann;
use igflow::analysis::fourier::{operator_closed, operator_numeric, resolvable_wavenumbers, FourierScheme};
use igflow::analysis::riemann::Wave;
use igflow::cases::{convergence_study, make_case};
use igflow::io::{parse_config, run};
use igflow::reconstruction::ReconScheme;
use igflow::state::PrimitiveState;
use igflow::{Error, Result};

#[derive(Parser)]
#[command(name = "igflow", version, about = "Compressible flow solver with implicit-gradient reconstruction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a case described by a key=value config file.
    Run {
        config: PathBuf,
        /// Overrides the thread count of the config.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Convergence table against the exact solution, as CSV.
    Ooa {
        #[arg(long)]
        case: String,
        #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
        grids: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "IG4MP,IG6MP")]
        schemes: Vec<String>,
    },
    /// Modified-wavenumber table (beta, Re, Im) of the linear schemes, as CSV.
    Fourier {
        #[arg(long, value_delimiter = ',', default_value = "EG,IG4,IG6")]
        schemes: Vec<String>,
        /// Cells of the periodic test line.
        #[arg(long, default_value_t = 256)]
        n: usize,
        /// Evaluate the closed forms instead of the discrete operator.
        #[arg(long)]
        closed: bool,
    },
    /// Exact Riemann solution: star state, or a sampled profile with --time.
    Riemann {
        /// Left state rho,u,p.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        left: Vec<f64>,
        /// Right state rho,u,p.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        right: Vec<f64>,
        #[arg(long, default_value_t = 1.4)]
        gamma: f64,
        #[arg(long)]
        time: Option<f64>,
        #[arg(long, default_value_t = 0.5)]
        x0: f64,
        #[arg(long, default_value_t = 200)]
        cells: usize,
        #[arg(long, default_value_t = 0.0)]
        lower: f64,
        #[arg(long, default_value_t = 1.0)]
        upper: f64,
    },
}

fn state(v: &[f64]) -> Result<PrimitiveState> {
    match v {
        [rho, u, p] => Ok(PrimitiveState::new_1d(*rho, *u, *p)),
        _ => Err(Error::Config("a state needs three values rho,u,p".into())),
    }
}

fn wave(w: &Wave) -> serde_json::Value {
    match *w {
        Wave::Shock { speed } => serde_json::json!({ "kind": "shock", "speed": speed }),
        Wave::Rarefaction { head, tail } => serde_json::json!({ "kind": "rarefaction", "head": head, "tail": tail }),
    }
}

fn stdout_error(e: std::io::Error) -> Error {
    Error::Io { path: "<stdout>".into(), source: e }
}

fn execute(cmd: Command, out: &mut impl Write) -> Result<()> {
    macro_rules! emit {
        ($($arg:tt)*) => { writeln!(out, $($arg)*).map_err(stdout_error)? };
    }
    match cmd {
        Command::Run { config, threads } => {
            let text = std::fs::read_to_string(&config).map_err(|e| Error::Io { path: config.clone(), source: e })?;
            let mut cfg = parse_config(&text)?;
            if let Some(t) = threads {
                cfg.threads = t;
            }
            let summary = run(&cfg)?;
            emit!(
                "{}",
                serde_json::json!({
                    "output": summary.output,
                    "steps": summary.steps,
                    "time": summary.time,
                    "files": summary.files.len(),
                    "fallback_fraction": summary.fallbacks.fraction(),
                })
            );
        }
        Command::Ooa { case, grids, schemes } => {
            let spec = make_case(&case)?;
            emit!("scheme,n,error,order");
            for s in schemes {
                let scheme: ReconScheme = s.parse()?;
                for r in convergence_study(&spec, scheme, &grids)? {
                    let order = r.order.map(|o| format!("{o:.4}")).unwrap_or_default();
                    emit!("{scheme},{},{:.6e},{order}", r.n, r.error);
                }
            }
        }
        Command::Fourier { schemes, n, closed } => {
            let schemes: Vec<FourierScheme> = schemes.iter().map(|s| s.parse()).collect::<Result<_>>()?;
            emit!("scheme,beta,re,im");
            for s in schemes {
                for beta in resolvable_wavenumbers(n) {
                    let f = if closed { operator_closed(s, beta) } else { operator_numeric(s, beta, n)? };
                    emit!("{s},{beta:.16e},{:.16e},{:.16e}", f.re, f.im);
                }
            }
        }
        Command::Riemann { left, right, gamma, time, x0, cells, lower, upper } => {
            let r = exact_riemann(state(&left)?, state(&right)?, gamma)?;
            match time {
                None => emit!(
                    "{}",
                    serde_json::json!({
                        "p_star": r.p_star,
                        "u_star": r.u_star,
                        "rho_star_left": r.rho_star_left,
                        "rho_star_right": r.rho_star_right,
                        "left_wave": wave(&r.left_wave),
                        "right_wave": wave(&r.right_wave),
                    })
                ),
                Some(t) => {
                    if cells == 0 || !(upper > lower) {
                        return Err(Error::Config("need cells > 0 and upper > lower".into()));
                    }
                    emit!("x,rho,u,p");
                    let h = (upper - lower) / cells as f64;
                    for j in 0..cells {
                        let x = lower + (j as f64 + 0.5) * h;
                        let s = r.at(x, t, x0);
                        emit!("{x:.16e},{:.16e},{:.16e},{:.16e}", s.rho, s.u, s.p);
                    }
                }
            }
        }
    }
    out.flush().map_err(stdout_error)
}

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    eprintln!("{}", serde_json::json!({ "error": kind, "message": message, "exit_code": code }));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.to_string().trim(), 2),
    };
    let mut out = BufWriter::new(std::io::stdout().lock());
    match execute(cli.command, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io { source, .. }) if source.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), &e.to_string(), e.exit_code() as u8),
    }
}
