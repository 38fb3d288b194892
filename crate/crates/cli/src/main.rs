use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use santalo_core::bodies::{random_symmetric_polytope, HPolytope};
use santalo_core::integrate::{unit_ball_volume, VolumeEstimate};
use santalo_core::io::{write_reports_csv, BodyFile};
use santalo_core::symmetrize::{steiner, unconditionalize};
use santalo_core::verify::{ProductMeasure, Verifier};

mod config;
mod run;

use config::{ExperimentConfig, MeasureSpec};

/// Exit status when some inequality check failed.
const EXIT_FAILED_CHECK: u8 = 2;

#[derive(Parser)]
#[command(
    name = "santalo",
    version,
    about = "Volume products of symmetric convex bodies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunFlags {
    /// Experiment configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    quad_tol: Option<f64>,
    #[arg(long)]
    mc_samples: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured checks and write reports.csv.
    Verify(RunFlags),
    /// Steiner-symmetrize a body along an axis (1-based) or all of them.
    Symmetrize {
        body: PathBuf,
        /// Axis number starting at 1, or "all" for the full pipeline.
        #[arg(long, default_value = "all")]
        axis: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print or write the polar body.
    Polar {
        body: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact volume of a polytope, or of a ball.
    Volume { body: PathBuf },
    /// Volume product, Lebesgue by default.
    Product {
        body: PathBuf,
        /// `lebesgue` or a measure such as `gaussian:1,1`.
        #[arg(long, default_value = "lebesgue")]
        measure: String,
        #[arg(long, default_value_t = 1e-6)]
        quad_tol: f64,
    },
    /// Products of dilated balls and log-masses `log μ(e^t B)` over grids.
    Sweep(RunFlags),
    /// Write random symmetric polytopes as body files.
    Generate {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 5)]
        vertex_pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(flags: &RunFlags) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&flags.config)?;
    if let Some(s) = flags.seed {
        cfg.seed = s;
    }
    if let Some(t) = flags.quad_tol {
        cfg.tolerances.quad_tol = t;
    }
    if let Some(m) = flags.mc_samples {
        cfg.tolerances.mc_samples = m;
    }
    if let Some(o) = &flags.out {
        cfg.output = Some(o.clone());
    } else if let Some(o) = &cfg.output {
        cfg.output = Some(cfg.base.join(o));
    }
    Ok(cfg)
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    Ok(builder.build().context("building thread pool")?.install(f))
}

fn output_dir(cfg: &ExperimentConfig) -> Result<PathBuf> {
    let dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn cmd_verify(flags: &RunFlags) -> Result<bool> {
    let cfg = load(flags)?;
    let outcome = with_jobs(flags.jobs, || run::run(&cfg))??;
    let dir = output_dir(&cfg)?;
    let path = dir.join("reports.csv");
    let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    write_reports_csv(std::io::BufWriter::new(file), &outcome.reports)?;
    for (check, (passed, total)) in &outcome.summary {
        println!("{}: {passed}/{total} passed", check_name(*check));
    }
    for r in outcome.reports.iter().filter(|r| !r.passed) {
        eprintln!("{r}");
    }
    println!("wrote {} rows to {}", outcome.reports.len(), path.display());
    Ok(outcome.all_passed())
}

fn check_name(c: config::CheckKind) -> &'static str {
    use config::CheckKind::*;
    match c {
        Santalo => "santalo",
        SymmetralFactors => "claim1",
        Chain => "chain",
        Main => "main",
        PairingBound => "corollary",
        MeyerPajor => "meyer_pajor",
        GeometricMean => "prop8",
        BallLogconcavity => "ball_logconcavity",
    }
}

fn read_polytope(path: &Path) -> Result<HPolytope<f64>> {
    BodyFile::read(path)?
        .to_hpolytope()
        .with_context(|| format!("{}: expected a polytope", path.display()))?
        .map_err(Into::into)
}

fn emit(body: &BodyFile, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => {
            body.write(p)?;
            println!("wrote {}", p.display());
        }
        None => print!("{}", body.to_toml()),
    }
    Ok(())
}

fn cmd_symmetrize(path: &Path, axis: &str, out: Option<&Path>) -> Result<()> {
    let k = read_polytope(path)?;
    let s = if axis == "all" {
        unconditionalize(&k)?
    } else {
        let a: usize = axis
            .parse()
            .with_context(|| format!("axis must be a number or \"all\", got {axis:?}"))?;
        if a == 0 || a > k.dim() {
            bail!("axis {a} out of range 1..={}", k.dim());
        }
        steiner(&k, a - 1)?
    };
    println!("facets {} -> {}", k.facet_count(), s.facet_count());
    println!("volume {:?} -> {:?}", k.volume(), s.volume());
    if out.is_some() {
        emit(&BodyFile::H(s), out)?;
    }
    Ok(())
}

fn cmd_polar(path: &Path, out: Option<&Path>) -> Result<()> {
    let polar = match BodyFile::read(path)? {
        BodyFile::Ball { dim, radius } => BodyFile::Ball {
            dim,
            radius: 1.0 / radius,
        },
        BodyFile::H(h) => BodyFile::V(h.polar()?),
        BodyFile::V(v) => BodyFile::H(v.polar()?),
    };
    emit(&polar, out)
}

fn cmd_volume(path: &Path) -> Result<()> {
    let v = match BodyFile::read(path)? {
        BodyFile::Ball { dim, radius } => unit_ball_volume(dim) * radius.powi(dim as i32),
        b => b.to_hpolytope().expect("polytope")?.volume(),
    };
    println!("{v:?} ± 0");
    Ok(())
}

fn cmd_product(path: &Path, measure: &str, quad_tol: f64) -> Result<()> {
    let body = BodyFile::read(path)?;
    let verifier = Verifier::new(quad_tol, 1_000_000);
    let p: VolumeEstimate = match (&body, measure) {
        (BodyFile::Ball { dim, radius }, "lebesgue") => {
            let k = unit_ball_volume(*dim);
            VolumeEstimate::exact(k * radius.powi(*dim as i32) * k * radius.powi(-(*dim as i32)))
        }
        (BodyFile::Ball { dim, radius }, spec) => {
            let mu = MeasureSpec::parse(spec)?.build(*dim, Path::new("."))?;
            let a = verifier.ball_measure(&mu, *radius)?;
            let b = verifier.ball_measure(&mu, 1.0 / radius)?;
            a.times(&b)
        }
        (_, "lebesgue") => {
            verifier
                .volume_product(
                    &body.to_hpolytope().expect("polytope")?,
                    ProductMeasure::Lebesgue,
                )?
                .value
        }
        (_, spec) => {
            let h = body.to_hpolytope().expect("polytope")?;
            let mu = MeasureSpec::parse(spec)?.build(h.dim(), Path::new("."))?;
            verifier
                .volume_product(&h, ProductMeasure::Measure(&mu))?
                .value
        }
    };
    println!("P = {:?} ± {:e}", p.value, p.err);
    Ok(())
}

fn cmd_sweep(flags: &RunFlags) -> Result<()> {
    let cfg = load(flags)?;
    let sweep = cfg.sweep.clone().context("config has no [sweep] section")?;
    if sweep.radii.is_empty() && sweep.t_grid.is_empty() {
        bail!("sweep needs `radii` or `t_grid`");
    }
    let mu = sweep.measure.build(cfg.dim, &cfg.base)?;
    let verifier = Verifier::new(cfg.tolerances.quad_tol, cfg.tolerances.mc_samples);
    let dir = output_dir(&cfg)?;
    let path = dir.join("sweep.csv");
    let mut out = std::io::BufWriter::new(
        fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?,
    );
    writeln!(out, "quantity,x,value,err")?;
    let rows = with_jobs(flags.jobs, || -> Result<Vec<String>> {
        let mut rows = Vec::new();
        for &r in &sweep.radii {
            let a = verifier.ball_measure(&mu, r)?;
            let b = verifier.ball_measure(&mu, 1.0 / r)?;
            let p = a.times(&b);
            rows.push(format!(
                "p_mu_ball,{r:.16e},{:.16e},{:.16e}",
                p.value, p.err
            ));
        }
        for &t in &sweep.t_grid {
            let m = verifier.ball_measure(&mu, t.exp())?;
            rows.push(format!(
                "log_mu_ball,{t:.16e},{:.16e},{:.16e}",
                m.value.ln(),
                m.err / m.value
            ));
        }
        Ok(rows)
    })??;
    for row in &rows {
        writeln!(out, "{row}")?;
    }
    println!("wrote {} rows to {}", rows.len(), path.display());
    Ok(())
}

fn cmd_generate(dim: usize, count: usize, pairs: usize, seed: u64, out: &Path) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    for i in 0..count {
        let v = random_symmetric_polytope::<f64>(dim, pairs, seed.wrapping_add(i as u64))?;
        BodyFile::V(v).write(&out.join(format!("rand-{seed}-{i:04}.toml")))?;
    }
    println!("wrote {count} bodies to {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify(flags) => cmd_verify(flags).map(|ok| {
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILED_CHECK)
            }
        }),
        Command::Symmetrize { body, axis, out } => {
            cmd_symmetrize(body, axis, out.as_deref()).map(|_| ExitCode::SUCCESS)
        }
        Command::Polar { body, out } => cmd_polar(body, out.as_deref()).map(|_| ExitCode::SUCCESS),
        Command::Volume { body } => cmd_volume(body).map(|_| ExitCode::SUCCESS),
        Command::Product {
            body,
            measure,
            quad_tol,
        } => cmd_product(body, measure, *quad_tol).map(|_| ExitCode::SUCCESS),
        Command::Sweep(flags) => cmd_sweep(flags).map(|_| ExitCode::SUCCESS),
        Command::Generate {
            dim,
            count,
            vertex_pairs,
            seed,
            out,
        } => cmd_generate(*dim, *count, *vertex_pairs, *seed, out).map(|_| ExitCode::SUCCESS),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
