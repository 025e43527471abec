//! `ptds`: sample, verify and analyse exact solutions of the nonlocal
//! Davey–Stewartson equations.
//!
//! Exit codes: 0 success, 2 configuration error, 3 degenerate output (every
//! node singular), 4 verification failure.

mod config;
mod fail;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use ptds::catalog::{CatalogSolution, FamilyId};
use ptds::singularity::{analyze, blowup_window, critical_time_search, locate_blowup, Kind, SearchBox, SingularityReport};
use ptds::solution::{ConstantSeed, Corrupted};
use ptds::verify::{convergence_order, sample_grid, Convergence, GridSpec, Order, ResidualReport};
use ptds::{Error, Flag, GlobalParams64, Solution};

use config::{linspace, parse_counts, parse_list, parse_real, Overrides, RunConfig, Source};
use fail::{config_error, degenerate, verification_failed};

// ── CLI ──

#[derive(Parser)]
#[command(name = "ptds", version, about = "Exact rogue waves of the nonlocal Davey-Stewartson equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON run configuration
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Time to evaluate at (repeatable; overrides the config)
    #[arg(long = "time", global = true, value_name = "T", value_parser = parse_real, allow_hyphen_values = true)]
    times: Vec<f64>,
    /// Node counts for sampling
    #[arg(long, global = true, value_name = "NX,NY", value_parser = parse_counts)]
    grid: Option<(usize, usize)>,
    /// Spatial box
    #[arg(long = "box", global = true, value_name = "XMIN,XMAX,YMIN,YMAX", value_parser = parse_list::<4>, allow_hyphen_values = true)]
    bbox: Option<[f64; 4]>,
    /// Grid spacing
    #[arg(long, global = true, value_name = "SPACING", value_parser = parse_real)]
    h: Option<f64>,
    /// Also write |u| heatmaps
    #[arg(long, global = true)]
    png: bool,
    /// Verify the constant seed first; its residual must sit at the rounding floor
    #[arg(long, global = true)]
    seed_check: bool,
    /// Add AMP * x to u before verifying (a negative control)
    #[arg(long, global = true, hide = true, value_name = "AMP", value_parser = parse_real)]
    corrupt: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// List the solution families with their parameter schemas
    Catalog,
    /// Sample u and w on a grid, one CSV (and optional PNG) per time
    Sample,
    /// Finite-difference residuals and convergence order
    Verify,
    /// Analytic blow-up diagnostics of a catalog family
    Singularity {
        /// Cross-check with the numeric blow-up search
        #[arg(long)]
        numeric: bool,
    },
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides { times: self.times.clone(), grid: self.grid, bbox: self.bbox, h: self.h }
    }

    fn load(&self) -> Result<RunConfig> {
        let path = self.config.as_deref().ok_or_else(|| config_error("--config is required"))?;
        RunConfig::load(path)
    }

    fn out_dir(&self) -> Result<&Path> {
        fs::create_dir_all(&self.out).with_context(|| format!("creating {}", self.out.display()))?;
        Ok(&self.out)
    }
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

// ── catalog ──

fn catalog(common: &Common) -> Result<()> {
    let families: Vec<Value> = FamilyId::ALL
        .iter()
        .map(|&id| {
            let params: Vec<Value> = id
                .schema()
                .iter()
                .map(|p| json!({ "name": p.name, "default": p.default, "doc": p.doc }))
                .collect();
            json!({
                "id": id.as_str(),
                "equation": if id.alpha_sq() > 0.0 { "ds1" } else { "ds2" },
                "nonlocal": id.is_nonlocal(),
                "travelling": id.is_travelling(),
                "has_w": id.prints_w(),
                "description": id.description(),
                "params": params,
                "notes": id.notes(),
            })
        })
        .collect();
    let listing = json!({ "families": families });
    println!("{}", serde_json::to_string_pretty(&listing)?);
    if common.config.is_some() || common.out != Path::new("out") {
        write_json(&common.out_dir()?.join("catalog.json"), &listing)?;
    }
    Ok(())
}

// ── sample ──

fn sample(common: &Common) -> Result<()> {
    let cfg = common.load()?;
    let o = common.overrides();
    let src = cfg.source()?;
    let b = cfg.bbox(&o)?;
    let (nx, ny) = cfg.counts(&o)?;
    let (xs, ys) = (linspace(b[0], b[1], nx), linspace(b[2], b[3], ny));
    let png = common.png || cfg.output.png;
    let out = common.out_dir()?;
    for t in cfg.times(&o) {
        let samples = sample_grid(&src.solution, &xs, &ys, t);
        let singular = samples.iter().filter(|s| s.flag == Flag::Singular).count();
        if singular == samples.len() {
            return Err(degenerate(format!("{}: every node is singular at t = {t}", src.label)));
        }
        let stem = output::time_stem(t);
        if cfg.output.csv {
            output::write_csv(&out.join(format!("{stem}.csv")), &xs, &ys, &samples)?;
        }
        if png {
            output::write_png(&out.join(format!("{stem}.png")), nx, ny, &samples, cfg.output.clip)?;
        }
        println!("{}: t = {t}, {nx} x {ny} nodes, {singular} singular -> {}", src.label, out.join(&stem).display());
    }
    Ok(())
}

// ── verify ──

fn order_json(o: Order<f64>) -> Value {
    match o {
        Order::Floor => json!("floor"),
        Order::Value(v) => json!(v),
    }
}

fn max_eq1(r: &ResidualReport<f64>) -> Option<f64> {
    r.eq1.map(|n| n.max)
}

fn check_json(t: f64, c: &Convergence<f64>, passed: bool) -> Value {
    json!({
        "t": t,
        "h": c.coarse.h,
        "max_residual_eq1": max_eq1(&c.coarse),
        "max_residual_eq2": c.coarse.eq2.max,
        "mean_residual_eq1": c.coarse.eq1.map(|n| n.mean),
        "mean_residual_eq2": c.coarse.eq2.mean,
        "max_residual_eq1_fine": max_eq1(&c.fine),
        "max_residual_eq2_fine": c.fine.eq2.max,
        "order": c.worst().map_or(json!("floor"), |v| json!(v)),
        "order_eq1": c.eq1.map(order_json),
        "order_eq2": order_json(c.eq2),
        "masked_fraction": c.coarse.masked_fraction(),
        "w_reconstructed": c.coarse.w_reconstructed,
        "passed": passed,
    })
}

fn check_text(v: &Value) -> String {
    let Value::Object(m) = v else { return String::new() };
    m.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
}

fn converge(sol: &dyn Solution<f64>, gp: &GlobalParams64, label: &str, grid: &GridSpec<f64>, t: f64) -> Result<Convergence<f64>> {
    convergence_order(sol, gp, grid, t).map_err(|e| match e {
        Error::AllMasked => degenerate(format!("{label}: every stencil is masked at t = {t}")),
        e => config_error(format!("{label}: {e}")),
    })
}

const ORDER_RANGE: (f64, f64) = (1.7, 2.3);

fn verify(common: &Common) -> Result<()> {
    let cfg = common.load()?;
    let o = common.overrides();
    let Source { solution, global: gp, label, params } = cfg.source()?;
    if params.as_ref().is_some_and(|p| !p.family().is_nonlocal()) {
        return Err(config_error(format!("{label} solves the local equation; the verifier checks the nonlocal system")));
    }
    let b = cfg.bbox(&o)?;
    let grid = GridSpec::new((b[0], b[1]), (b[2], b[3]), cfg.spacing(&o)?);
    let times = cfg.times(&o);
    let out = common.out_dir()?;

    let mut text = format!("source: {label}\n");
    let seed = if common.seed_check {
        let c = converge(&ConstantSeed::new(gp), &gp, &label, &grid, times[0])?;
        let at_floor = c.eq1.map_or(true, |o| o == Order::Floor) && c.eq2 == Order::Floor;
        let v = check_json(times[0], &c, at_floor);
        text += &format!("-- seed check\n{}", check_text(&v));
        if !at_floor {
            println!("{text}");
            return Err(verification_failed("the constant seed is not at the rounding floor; the stencil is broken"));
        }
        Some(v)
    } else {
        None
    };

    let sol: Box<dyn Solution<f64>> = match common.corrupt {
        Some(amp) => Box::new(Corrupted::new(solution, amp)),
        None => solution,
    };
    let mut checks = Vec::new();
    let mut all_pass = true;
    for &t in &times {
        let c = converge(&sol, &gp, &label, &grid, t)?;
        let passed = c.passes(ORDER_RANGE.0, ORDER_RANGE.1);
        all_pass &= passed;
        let v = check_json(t, &c, passed);
        text += &format!("-- t = {t}\n{}", check_text(&v));
        checks.push(v);
    }
    // analytic critical time and interval, when the family has them
    let report = params.as_ref().and_then(|p| analyze(p).ok());
    let report = json!({
        "source": label,
        "equation": if gp.is_ds2() { "ds2" } else { "ds1" },
        "epsilon": gp.epsilon,
        "t_c": report.as_ref().and_then(|r| r.t_c),
        "interval": report.as_ref().and_then(|r| r.interval),
        "seed_check": seed,
        "checks": checks,
        "passed": all_pass,
    });
    write_json(&out.join("verify.json"), &report)?;
    print!("{text}");
    println!("passed: {all_pass}");
    if !all_pass {
        return Err(verification_failed(format!(
            "{label}: convergence order outside [{}, {}]",
            ORDER_RANGE.0, ORDER_RANGE.1
        )));
    }
    Ok(())
}

// ── singularity ──

fn numeric_check(sol: &CatalogSolution<f64>, r: &SingularityReport<f64>, bx: &SearchBox<f64>) -> Value {
    if let Some((a, b)) = r.interval {
        let window = blowup_window(sol, (a - 0.5, b + 0.5), bx, 41, 60, 1e-7);
        let gap = window.map(|(lo, hi)| (lo - a).abs().max((hi - b).abs()));
        json!({ "interval": window, "interval_gap": gap })
    } else if let Some(tc) = r.t_c {
        let (t, min_den) = critical_time_search(sol, (tc - 0.5, tc + 0.5), bx, 21, 60);
        let zeros = locate_blowup(sol, tc, bx);
        let locus_gap = r.locus.as_ref().map(|l| zeros.iter().map(|&(x, y)| l.distance(x, y)).fold(0.0, f64::max));
        json!({
            "t_c": t,
            "t_c_gap": (t - tc).abs(),
            "min_denominator": min_den,
            "zeros": zeros.len(),
            "max_locus_distance": locus_gap,
        })
    } else {
        Value::Null
    }
}

fn singularity(common: &Common, numeric: bool) -> Result<()> {
    let cfg = common.load()?;
    let p = cfg.catalog_params()?;
    let r = analyze(&p).map_err(|e| config_error(format!("{}: {e}", p.family())))?;
    let locus = r.locus.as_ref().map(|l| json!({ "kind": l.kind().as_str(), "coefficients": l.coefficients() }));
    let numeric = if numeric && r.kind != Kind::None {
        let b = cfg.bbox(&common.overrides())?;
        let sol = CatalogSolution::new(p.clone()).map_err(|e| config_error(e.to_string()))?;
        numeric_check(&sol, &r, &SearchBox::new((b[0], b[1]), (b[2], b[3])))
    } else {
        Value::Null
    };
    let report = json!({
        "family": p.family().as_str(),
        "kind": r.kind.as_str(),
        "t_c": r.t_c,
        "interval": r.interval,
        "locus": locus,
        "notes": r.notes,
        "numeric": numeric,
    });
    write_json(&common.out_dir()?.join("singularity.json"), &report)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Catalog => catalog(&cli.common),
        Command::Sample => sample(&cli.common),
        Command::Verify => verify(&cli.common),
        Command::Singularity { numeric } => singularity(&cli.common, *numeric),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(fail::exit_code(&e) as u8)
        }
    }
}
