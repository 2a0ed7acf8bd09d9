use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use framecalc::maxwell::{self, Potential};
use framecalc::report::fmt_num;
use framecalc::spectra::{self, AtomParams, Model};
use framecalc::suites::{self, OutputFormat, RunConfig};
use framecalc::twobody::{self, Body, MksBody, UnitSystem};
use framecalc::Error;

#[derive(Parser)]
#[command(
    name = "framecalc",
    version,
    about = "Exterior calculus of frame fields: verification suites and calculators"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// JSON run configuration with keys suites, tolerances, seed, output.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Override a named tolerance; repeatable.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE", value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    /// Seed for sampled checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites.
    Verify {
        /// Suite name or `all`; repeatable.
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Print engine results as LaTeX where available.
        #[arg(long)]
        latex: bool,
    },
    /// Print the engine's result for a derivation target.
    Render {
        target: String,
        #[arg(long)]
        latex: bool,
    },
    /// Energy-level tables.
    Spectra {
        #[arg(long = "Z", default_value_t = 1)]
        z: u32,
        #[arg(long, default_value = "dirac")]
        model: Model,
        /// Principal quantum numbers, `N` or `A..B`.
        #[arg(long, default_value = "1..3", value_parser = parse_range)]
        n: (u32, u32),
    },
    /// Force law for a body near a body at the origin.
    Twobody {
        #[arg(long = "m", allow_hyphen_values = true)]
        m: f64,
        #[arg(long = "q", default_value_t = 0.0, allow_hyphen_values = true)]
        q: f64,
        #[arg(long = "M", allow_hyphen_values = true)]
        big_m: f64,
        #[arg(long = "Q", default_value_t = 0.0, allow_hyphen_values = true)]
        big_q: f64,
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        pos: [f64; 3],
        /// Inputs in kg, C and m instead of geometric units.
        #[arg(long)]
        mks: bool,
    },
    /// Residual norms of the field equations for a potential.
    Maxwell {
        /// `coulomb`, `planewave`, or a JSON potential file.
        #[arg(long, default_value = "coulomb")]
        potential: String,
        #[arg(long, default_value_t = 4)]
        grid: usize,
    },
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let v: f64 = v.parse().map_err(|e| format!("{v}: {e}"))?;
    Ok((k.to_string(), v))
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let bad = |e: std::num::ParseIntError| e.to_string();
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a.parse().map_err(bad)?, b.parse().map_err(bad)?),
        None => (1, s.parse().map_err(bad)?),
    };
    if a == 0 || a > b {
        return Err(format!("empty or invalid range `{s}`"));
    }
    Ok((a, b))
}

fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> =
        s.split(',').map(|x| x.trim().parse::<f64>().map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| "expected x,y,z".to_string())
}

/// Potential file: one list of `{coeff, powers}` monomials per component.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PotentialFile {
    #[serde(rename = "A0", default)]
    a0: Vec<Monomial>,
    #[serde(rename = "A1", default)]
    a1: Vec<Monomial>,
    #[serde(rename = "A2", default)]
    a2: Vec<Monomial>,
    #[serde(rename = "A3", default)]
    a3: Vec<Monomial>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Monomial {
    coeff: f64,
    powers: [u32; 4],
}

fn load_potential(spec: &str) -> Result<Potential, Error> {
    match spec {
        "coulomb" => Ok(Potential::coulomb(1.0, [0.0; 3])),
        "planewave" => Ok(Potential::plane_wave(1, 1.0, [1.0, 0.0, 0.0, -1.0], 0.0)),
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{path}: {e}")))?;
            let file: PotentialFile = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{path}: {e}")))?;
            let conv = |v: Vec<Monomial>| v.into_iter().map(|m| (m.coeff, m.powers)).collect();
            Ok(Potential::polynomial([conv(file.a0), conv(file.a1), conv(file.a2), conv(file.a3)]))
        }
    }
}

fn run_config(g: &Global) -> Result<RunConfig, Error> {
    let mut cfg = match &g.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    for (k, v) in &g.tol {
        cfg.set_tolerance(k, *v)?;
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if g.json {
        cfg.output = OutputFormat::Json;
    }
    Ok(cfg)
}

fn fmt3(v: &[f64; 3]) -> String {
    v.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(", ")
}

fn print_json<T: Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn verify(g: &Global, names: &[String], latex: bool) -> Result<ExitCode, Error> {
    let mut cfg = run_config(g)?;
    if !names.is_empty() {
        cfg.set_suites(names)?;
    }
    if latex {
        cfg.output = OutputFormat::Latex;
    }
    let reports = suites::verify(&cfg);
    match cfg.output {
        OutputFormat::Json => print_json(&reports),
        fmt => {
            for s in &reports {
                println!("== {} ({} ms)", s.suite, s.elapsed_ms);
                for r in &s.reports {
                    println!("{}", r.line());
                    let shown = match fmt {
                        OutputFormat::Latex => suites::render_target(&r.id, true).unwrap_or_else(|_| r.actual.clone()),
                        _ => r.actual.clone(),
                    };
                    if r.status != framecalc::report::Status::Pass || fmt == OutputFormat::Latex {
                        println!("    expected: {}\n    engine:   {}", r.expected, shown);
                    }
                    for n in &r.notes {
                        println!("    note: {n}");
                    }
                }
            }
            let counts = suites::tally(&reports);
            let summary: Vec<String> = counts.iter().map(|(k, v)| format!("{v} {k}")).collect();
            println!("-- {}", summary.join(", "));
        }
    }
    Ok(ExitCode::from(suites::exit_code(&reports) as u8))
}

fn spectra_cmd(g: &Global, z: u32, model: Model, (lo, hi): (u32, u32)) -> Result<ExitCode, Error> {
    let p = AtomParams::hydrogen_like(z)?;
    let rows: Vec<_> = spectra::level_table(&p, model, hi)?.into_iter().filter(|r| r.n >= lo).collect();
    if g.json {
        print_json(&rows);
        return Ok(ExitCode::SUCCESS);
    }
    let opt = |x: Option<f64>| x.map(fmt_num).unwrap_or_else(|| "-".into());
    println!(
        "{:>3} {:>4} {:>20} {:>20} {:>20} {:>20} {:>20}",
        "n", "l|k", "energy [eV]", "series [eV]", "closed [eV]", "lambda (shoot)", "diagnostic"
    );
    for r in rows {
        println!(
            "{:>3} {:>4} {:>20} {:>20} {:>20} {:>20} {:>20}",
            r.n,
            r.angular,
            fmt_num(r.energy),
            opt(r.series),
            opt(r.closed),
            opt(r.shooting_lambda),
            opt(r.diagnostic)
        );
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct TwobodyOut {
    units: &'static str,
    acceleration: [f64; 3],
    residual: [f64; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    force: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    force_direct: Option<[f64; 3]>,
}

fn twobody_cmd(
    g: &Global,
    m: f64,
    q: f64,
    big_m: f64,
    big_q: f64,
    pos: [f64; 3],
    mks: bool,
) -> Result<ExitCode, Error> {
    let units = UnitSystem::default();
    let out = if mks {
        let b1 = MksBody { m, q, position: pos };
        let b2 = MksBody { m: big_m, q: big_q, position: [0.0; 3] };
        let g1 = Body::at_rest(units.mass(m), units.charge(q), pos);
        let g2 = Body::at_rest(units.mass(big_m), units.charge(big_q), [0.0; 3]);
        let acc = twobody::force_law(&g1, &g2)?;
        TwobodyOut {
            units: "mks",
            acceleration: acc.map(|a| units.per_time_squared(a)),
            residual: twobody::matched_residual(&g1.with_acceleration(acc), &g2)?,
            force: Some(twobody::mks_force(&b1, &b2, &units)?),
            force_direct: Some(twobody::mks_force_direct(&b1, &b2, &units)),
        }
    } else {
        let b1 = Body::at_rest(m, q, pos);
        let b2 = Body::at_rest(big_m, big_q, [0.0; 3]);
        let acc = twobody::force_law(&b1, &b2)?;
        let residual = twobody::matched_residual(&b1.with_acceleration(acc), &b2)?;
        TwobodyOut { units: "geometric", acceleration: acc, residual, force: None, force_direct: None }
    };
    if g.json {
        print_json(&out);
    } else {
        println!("acceleration ({}): {}", out.units, fmt3(&out.acceleration));
        println!("interaction residual: {}", fmt3(&out.residual));
        if let (Some(f), Some(d)) = (out.force, out.force_direct) {
            println!("force via geometric units [N]: {}", fmt3(&f));
            println!("force from k, K directly [N]: {}", fmt3(&d));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn maxwell_cmd(g: &Global, potential: &str, grid: usize) -> Result<ExitCode, Error> {
    let cfg = run_config(g)?;
    if grid == 0 {
        return Err(Error::Config("grid must be positive".into()));
    }
    let p = load_potential(potential)?;
    let s = maxwell::sweep(&p, grid, cfg.tol("fd_step"))?;
    if g.json {
        print_json(&s);
    } else {
        println!("grid points: {}", s.points);
        println!("first pair (curl E + dH/dt, div H): {}", fmt_num(s.first_pair));
        println!("source vs (curl H - dE/dt, div E): {}", fmt_num(s.source_mismatch));
        println!("max |j|: {}", fmt_num(s.max_j));
        println!("max |rho|: {}", fmt_num(s.max_rho));
    }
    let tol = cfg.tol("maxwell");
    Ok(if s.first_pair <= tol && s.source_mismatch <= tol { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let result = match &cli.command {
        Command::Verify { suites, latex } => verify(g, suites, *latex),
        Command::Render { target, latex } => suites::render_target(target, *latex).map(|s| {
            println!("{s}");
            ExitCode::SUCCESS
        }),
        Command::Spectra { z, model, n } => spectra_cmd(g, *z, *model, *n),
        Command::Twobody { m, q, big_m, big_q, pos, mks } => twobody_cmd(g, *m, *q, *big_m, *big_q, *pos, *mks),
        Command::Maxwell { potential, grid } => maxwell_cmd(g, potential, *grid),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        match e {
            Error::Config(_) | Error::UnknownTarget(_) | Error::InvalidArgument(_) => ExitCode::from(2),
            _ => ExitCode::from(1),
        }
    })
}
