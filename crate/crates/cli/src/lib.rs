//! Command-line front end for the root-statistics library: flag parsing
//! into a [`RunConfig`], dispatch to the library, and deterministic CSV or
//! JSON rendering (every float with 17 significant digits, so identical
//! invocations are byte-identical).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kss::asymptotics::{self, Sigma2Method};
use kss::rootcount::DEFAULT_MAX_ROUNDS;
use kss::{kernels, montecarlo, rice, Error, Result};

/// Root statistics of Kostlan–Shub–Smale random polynomials.
#[derive(Debug, Parser)]
#[command(name = "kss", version, about)]
pub struct Cli {
    #[command(subcommand)]
    command: CliCommand,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Csv)]
    format: OutFormat,

    /// Write the output to this file (atomically: a temporary file is
    /// renamed into place, so a failed run never leaves a partial file).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Limit constant σ² of Var(N_d)/√d, by quadrature or Hermite series.
    Sigma2 {
        #[arg(long, value_enum, default_value_t = MethodArg::Direct)]
        method: MethodArg,
        /// Series truncation order (mehler method only).
        #[arg(long, default_value_t = 64)]
        terms: u32,
        /// Absolute quadrature tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Exact moments of the root count at one degree: E N(N−1), Var, Var/√d.
    Rice {
        #[arg(long)]
        degree: u32,
        /// Absolute quadrature tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Monte Carlo summary of the root count at one degree.
    Simulate {
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Standardized root-count samples (N − √d)/d^{1/4}; JSON output also
    /// carries the full summary.
    Clt {
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Table of the scaled kernel, its derivatives, and the two-point
    /// factors on a lag grid (fields outside their domain stay empty/null).
    Kernel {
        #[arg(long)]
        degree: u32,
        /// Largest scaled lag in the table.
        #[arg(long, default_value_t = 6.0)]
        tmax: f64,
        /// Lag increment of the table.
        #[arg(long, default_value_t = 0.05)]
        step: f64,
    },
}

#[derive(Debug, Args)]
struct SimArgs {
    #[arg(long)]
    degree: u32,
    #[arg(long)]
    samples: u64,
    /// Master seed; every derived stream is a pure function of it.
    #[arg(long)]
    seed: u64,
    /// Worker threads (affects scheduling only, never results).
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Initial scaled-time grid step of the root counter.
    #[arg(long, default_value_t = 0.05)]
    grid_step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Direct,
    Mehler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
}

/// What to run, with the subcommand-specific parameters attached.
#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Sigma2 { method: Sigma2Method, terms: u32 },
    Rice,
    Simulate,
    Clt,
    Kernel { tmax: f64, step: f64 },
}

/// A fully resolved invocation. Fields not consumed by the subcommand hold
/// their documented defaults (tol 10⁻⁹, grid_step 0.05, workers 1, CSV to
/// standard output).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Action,
    pub degree: u32,
    pub samples: u64,
    pub seed: u64,
    pub tol: f64,
    pub grid_step: f64,
    pub workers: usize,
    pub out_format: OutFormat,
    pub out_path: Option<PathBuf>,
}

impl Cli {
    pub fn into_config(self) -> RunConfig {
        let mut config = RunConfig {
            subcommand: Action::Rice,
            degree: 0,
            samples: 0,
            seed: 0,
            tol: 1e-9,
            grid_step: 0.05,
            workers: 1,
            out_format: self.format,
            out_path: self.out,
        };
        match self.command {
            CliCommand::Sigma2 { method, terms, tol } => {
                config.subcommand = Action::Sigma2 {
                    method: match method {
                        MethodArg::Direct => Sigma2Method::Direct,
                        MethodArg::Mehler => Sigma2Method::Mehler,
                    },
                    terms,
                };
                config.tol = tol;
            }
            CliCommand::Rice { degree, tol } => {
                config.subcommand = Action::Rice;
                config.degree = degree;
                config.tol = tol;
            }
            CliCommand::Simulate { sim } => {
                config.subcommand = Action::Simulate;
                config.apply_sim(sim);
            }
            CliCommand::Clt { sim } => {
                config.subcommand = Action::Clt;
                config.apply_sim(sim);
            }
            CliCommand::Kernel { degree, tmax, step } => {
                config.subcommand = Action::Kernel { tmax, step };
                config.degree = degree;
            }
        }
        config
    }
}

impl RunConfig {
    fn apply_sim(&mut self, sim: SimArgs) {
        self.degree = sim.degree;
        self.samples = sim.samples;
        self.seed = sim.seed;
        self.workers = sim.workers;
        self.grid_step = sim.grid_step;
    }
}

/// Run the configured computation and render its output. The caller decides
/// where the bytes go; numerical failures come back as errors (exit code 2
/// in the binary), usage-class problems as domain errors (exit code 1).
pub fn dispatch(config: &RunConfig) -> Result<Vec<u8>> {
    match config.subcommand {
        Action::Sigma2 { method, terms } => sigma2_output(config, method, terms),
        Action::Rice => rice_output(config),
        Action::Simulate => simulate_output(config),
        Action::Clt => clt_output(config),
        Action::Kernel { tmax, step } => kernel_output(config, tmax, step),
    }
}

/// 17-significant-digit float rendering: round-trips f64 exactly and is
/// valid in both CSV and JSON.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn require_converged(q: &kss::quad::QuadratureResult, requested: f64) -> Result<()> {
    if q.converged {
        Ok(())
    } else {
        Err(Error::NonConvergence {
            achieved: q.abs_error_estimate,
            requested,
            n_evals: q.n_evals,
        })
    }
}

fn sigma2_output(config: &RunConfig, method: Sigma2Method, terms: u32) -> Result<Vec<u8>> {
    let r = match method {
        Sigma2Method::Direct => asymptotics::sigma2_direct(config.tol)?,
        Sigma2Method::Mehler => asymptotics::sigma2_mehler(terms, config.tol)?,
    };
    require_converged(&r.quadrature, config.tol)?;
    let mut out = String::new();
    match config.out_format {
        OutFormat::Csv => {
            out.push_str("value,abs_error_estimate,method,terms\n");
            out.push_str(&fmt(r.value));
            out.push(',');
            out.push_str(&fmt(r.quadrature.abs_error_estimate));
            out.push(',');
            out.push_str(r.method.as_str());
            out.push(',');
            if let Some(l) = r.series_terms_used {
                out.push_str(&l.to_string());
            }
            out.push('\n');
        }
        OutFormat::Json => {
            out.push_str("{\n");
            out.push_str(&format!("  \"value\": {},\n", fmt(r.value)));
            out.push_str(&format!("  \"method\": \"{}\",\n", r.method.as_str()));
            match r.series_terms_used {
                Some(l) => out.push_str(&format!("  \"series_terms_used\": {l},\n")),
                None => out.push_str("  \"series_terms_used\": null,\n"),
            }
            out.push_str(&format!(
                "  \"quadrature\": {{ \"value\": {}, \"abs_error_estimate\": {}, \"n_evals\": {}, \"converged\": {} }}\n",
                fmt(r.quadrature.value),
                fmt(r.quadrature.abs_error_estimate),
                r.quadrature.n_evals,
                r.quadrature.converged
            ));
            out.push_str("}\n");
        }
    }
    Ok(out.into_bytes())
}

fn rice_output(config: &RunConfig) -> Result<Vec<u8>> {
    let d = config.degree;
    let sfm = rice::second_factorial_moment(d, config.tol)?;
    require_converged(&sfm, config.tol)?;
    let variance = rice::variance_exact(d, config.tol)?;
    let ratio = variance / f64::from(d).sqrt();
    let mut out = String::new();
    match config.out_format {
        OutFormat::Csv => {
            out.push_str("degree,second_factorial_moment,variance,variance_over_sqrt_d\n");
            out.push_str(&format!("{d},{},{},{}\n", fmt(sfm.value), fmt(variance), fmt(ratio)));
        }
        OutFormat::Json => {
            out.push_str(&format!(
                "{{\n  \"degree\": {d},\n  \"second_factorial_moment\": {},\n  \"variance\": {},\n  \"variance_over_sqrt_d\": {}\n}}\n",
                fmt(sfm.value),
                fmt(variance),
                fmt(ratio)
            ));
        }
    }
    Ok(out.into_bytes())
}

fn summary_fields(s: &montecarlo::MonteCarloSummary) -> Vec<(&'static str, String)> {
    vec![
        ("d", s.d.to_string()),
        ("n_samples", s.n_samples.to_string()),
        ("master_seed", s.master_seed.to_string()),
        ("mean", fmt(s.mean)),
        ("variance", fmt(s.variance)),
        ("se_mean", fmt(s.se_mean)),
        ("se_variance", fmt(s.se_variance)),
        ("skewness", fmt(s.skewness)),
        ("excess_kurtosis", fmt(s.excess_kurtosis)),
        ("ks_distance", fmt(s.ks_distance)),
        ("sigma2_ref", fmt(s.sigma2_ref)),
    ]
}

fn simulate_output(config: &RunConfig) -> Result<Vec<u8>> {
    let s = montecarlo::run_with_grid(
        config.degree,
        config.samples,
        config.seed,
        config.workers,
        config.grid_step,
        DEFAULT_MAX_ROUNDS,
    )?;
    let fields = summary_fields(&s);
    let mut out = String::new();
    match config.out_format {
        OutFormat::Csv => {
            let names: Vec<&str> = fields.iter().map(|(n, _)| *n).collect();
            let values: Vec<&str> = fields.iter().map(|(_, v)| v.as_str()).collect();
            out.push_str(&names.join(","));
            out.push('\n');
            out.push_str(&values.join(","));
            out.push('\n');
        }
        OutFormat::Json => {
            out.push_str("{\n");
            let body: Vec<String> =
                fields.iter().map(|(n, v)| format!("  \"{n}\": {v}")).collect();
            out.push_str(&body.join(",\n"));
            out.push_str("\n}\n");
        }
    }
    Ok(out.into_bytes())
}

fn clt_output(config: &RunConfig) -> Result<Vec<u8>> {
    let (s, z) = montecarlo::run_with_samples(
        config.degree,
        config.samples,
        config.seed,
        config.workers,
        config.grid_step,
        DEFAULT_MAX_ROUNDS,
    )?;
    let mut out = String::new();
    match config.out_format {
        OutFormat::Csv => {
            out.push_str("z\n");
            for x in &z {
                out.push_str(&fmt(*x));
                out.push('\n');
            }
        }
        OutFormat::Json => {
            out.push_str("{\n");
            for (n, v) in summary_fields(&s) {
                out.push_str(&format!("  \"{n}\": {v},\n"));
            }
            let zs: Vec<String> = z.iter().map(|&x| fmt(x)).collect();
            out.push_str(&format!("  \"z\": [{}]\n", zs.join(", ")));
            out.push_str("}\n");
        }
    }
    Ok(out.into_bytes())
}

fn kernel_output(config: &RunConfig, tmax: f64, step: f64) -> Result<Vec<u8>> {
    let d = config.degree;
    if d == 0 {
        return Err(Error::Domain("degree must be at least 1".into()));
    }
    if !(step > 0.0) || !tmax.is_finite() || tmax < 0.0 {
        return Err(Error::Domain(format!(
            "need step > 0 and tmax ≥ 0, got step={step}, tmax={tmax}"
        )));
    }
    let sd = f64::from(d).sqrt();
    let kernel_max = sd * std::f64::consts::PI;
    let factor_max = sd * std::f64::consts::FRAC_PI_2;

    struct Row {
        t: f64,
        r: Option<f64>,
        r1: Option<f64>,
        r2: Option<f64>,
        v: Option<f64>,
        p: Option<f64>,
        rho: Option<f64>,
        g: Option<f64>,
    }

    let mut rows = Vec::new();
    let n_rows = (tmax / step * (1.0 + 1e-12)).floor() as u64;
    for k in 0..=n_rows {
        let t = step * k as f64;
        let mut row =
            Row { t, r: None, r1: None, r2: None, v: None, p: None, rho: None, g: None };
        if t <= kernel_max {
            row.r = Some(kernels::covariance(d, t)?);
            row.r1 = Some(kernels::covariance_d1(d, t)?);
            if d >= 2 {
                row.r2 = Some(kernels::covariance_d2(d, t)?);
            }
        }
        if d >= 2 && t > 0.0 && t <= factor_max {
            match kss::rice::RiceIntegrand::evaluate(d, t) {
                Ok(f) => {
                    row.v = Some(f.v);
                    row.p = Some(f.p);
                    row.rho = Some(f.rho);
                    row.g = Some(f.g);
                }
                Err(Error::Domain(_)) => {}
                Err(e) => return Err(e),
            }
        }
        rows.push(row);
    }

    let cell = |x: Option<f64>| x.map_or(String::new(), fmt);
    let json_cell = |x: Option<f64>| x.map_or_else(|| "null".to_string(), fmt);
    let mut out = String::new();
    match config.out_format {
        OutFormat::Csv => {
            out.push_str("t,r,r1,r2,v,p,rho,g\n");
            for row in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    fmt(row.t),
                    cell(row.r),
                    cell(row.r1),
                    cell(row.r2),
                    cell(row.v),
                    cell(row.p),
                    cell(row.rho),
                    cell(row.g)
                ));
            }
        }
        OutFormat::Json => {
            out.push_str("{\n  \"rows\": [\n");
            let body: Vec<String> = rows
                .iter()
                .map(|row| {
                    format!(
                        "    {{ \"t\": {}, \"r\": {}, \"r1\": {}, \"r2\": {}, \"v\": {}, \"p\": {}, \"rho\": {}, \"g\": {} }}",
                        fmt(row.t),
                        json_cell(row.r),
                        json_cell(row.r1),
                        json_cell(row.r2),
                        json_cell(row.v),
                        json_cell(row.p),
                        json_cell(row.rho),
                        json_cell(row.g)
                    )
                })
                .collect();
            out.push_str(&body.join(",\n"));
            out.push_str("\n  ]\n}\n");
        }
    }
    Ok(out.into_bytes())
}

/// Exit code for a library error: domain problems are usage errors (1),
/// everything else is a numerical failure (2).
pub fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Domain(_) => 1,
        _ => 2,
    }
}
