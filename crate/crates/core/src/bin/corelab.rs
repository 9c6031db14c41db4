use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use corelab::experiment::{self, report, ExperimentConfig, Kind};
use corelab::rng::{derive_seed, seeded, trial_rng};
use corelab::walks::{self, Variant, WalkParams};
use corelab::{analytic, degseq, graphgen, ode, peel, Result};

#[derive(Parser)]
#[command(name = "corelab", version, about = "Edge-deletion cascades in random k-cores")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV; defaults to the configured path, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    /// Allocation degree sequence, then a uniform pairing.
    Pairing,
    /// Allocation model k-core.
    Allocation,
    /// Uniform graph with `n` vertices and `m` edges.
    Gnm,
    /// Uniform simple k-core.
    SimpleKcore,
}

#[derive(Subcommand)]
enum Command {
    /// Thresholds c_k, μ*, c_k′ and q at c_k′.
    Thresholds {
        #[arg(long, default_value_t = 3)]
        k_min: usize,
        #[arg(long, default_value_t = 10)]
        k_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Degree sequences from the allocation model, one per line.
    Degseq {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Edge list, one `u v` pair per line.
    Gen {
        #[arg(long, value_enum, default_value_t = Model::SimpleKcore)]
        model: Model,
        /// Minimum degree; ignored by `gnm`.
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = experiment::DEFAULT_MAX_RETRIES)]
        max_retries: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Point-level deletion procedure traces.
    Peel {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        /// Per-iteration rows `trial,j,Zj,Yj,pj,pj_prime`.
        #[arg(long)]
        trace_out: Option<PathBuf>,
        /// Summary rows `trial,W,terminated`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Walk death times.
    Walk {
        #[arg(long, default_value = "exact")]
        variant: Variant,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 0.0)]
        xi: f64,
        #[arg(long, default_value_t = 1)]
        y0: i64,
        #[arg(long, default_value_t = 10_000)]
        horizon: usize,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form fluid-limit trajectory inside D_γ.
    Trajectory {
        #[arg(long)]
        k: usize,
        #[arg(long = "C", visible_alias = "c")]
        c: f64,
        #[arg(long, default_value_t = experiment::DEFAULT_GAMMA)]
        gamma: f64,
        #[arg(long, default_value_t = ode::DEFAULT_STEP)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regime sweep over (n, c).
    Sweep(ConfigArgs),
    /// Surviving core sizes after the cascade.
    Gap(ConfigArgs),
    /// k-cores of G(n, m).
    Gnm(ConfigArgs),
    /// Heavy/light peel against the fluid limit.
    Compare(ConfigArgs),
    /// Peel traces against coupled walks.
    WalkVsPeel(ConfigArgs),
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Writes the main table to `out` and the summary next to it (or after it
/// on stdout).
fn emit_pair(out: Option<&Path>, main: &str, summary: &str) -> Result<()> {
    match out {
        Some(p) => {
            std::fs::write(p, main)?;
            std::fs::write(summary_path(p), summary)?;
        }
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(main.as_bytes())?;
            so.write_all(b"\r\n")?;
            so.write_all(summary.as_bytes())?;
        }
    }
    Ok(())
}

fn summary_path(p: &Path) -> PathBuf {
    let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    p.with_file_name(format!("{stem}.summary.csv"))
}

fn load(args: &ConfigArgs, kind: Option<Kind>) -> Result<(ExperimentConfig, Option<PathBuf>)> {
    let mut cfg = ExperimentConfig::from_path(&args.config)?;
    if let Some(kind) = kind {
        cfg.require_kind(kind)?;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let out = args.out.clone().or_else(|| cfg.output_path.clone().map(PathBuf::from));
    Ok((cfg, out))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Thresholds { k_min, k_max, out } => {
            let mut rows = Vec::new();
            for k in k_min..=k_max {
                let th = analytic::thresholds(k)?;
                rows.push(vec![
                    k.to_string(),
                    report::float(th.c_k),
                    report::float(th.mu_star),
                    report::float(th.c_k_prime),
                    report::float(th.q_at_c_k_prime()?),
                ]);
            }
            let csv = report::table_string(&["k", "c_k", "mu_star", "c_k_prime", "q_at_ckp"], &rows)?;
            emit(out.as_deref(), &csv)
        }
        Command::Degseq { k, n, m, trials, seed, out } => {
            let mut text = String::new();
            for trial in 0..trials {
                let d = degseq::sample_degree_sequence(k, n, m, &mut trial_rng(seed, k, n, m, trial))?;
                let line: Vec<String> = d.degrees().iter().map(|x| x.to_string()).collect();
                text.push_str(&line.join(" "));
                text.push('\n');
            }
            emit(out.as_deref(), &text)
        }
        Command::Gen { model, k, n, m, seed, max_retries, out } => {
            let mut rng = seeded(seed);
            let g = match model {
                Model::Pairing => {
                    let d = degseq::sample_degree_sequence(k, n, m, &mut rng)?;
                    graphgen::pairing_multigraph(&d, &mut rng).1
                }
                Model::Allocation => graphgen::allocation_kcore(k, n, m, &mut rng)?,
                Model::Gnm => graphgen::gnm(n, m, &mut rng)?,
                Model::SimpleKcore => graphgen::uniform_simple_kcore(k, n, m, &mut rng, max_retries)?,
            };
            let mut text = String::new();
            for &(u, v) in g.edges() {
                text.push_str(&format!("{u} {v}\n"));
            }
            emit(out.as_deref(), &text)
        }
        Command::Peel { k, n, m, seed, trials, trace_out, out } => {
            let mut trace_rows = Vec::new();
            let mut summary = Vec::new();
            for trial in 0..trials {
                let mut rng = trial_rng(seed, k, n, m, trial);
                let d = degseq::sample_degree_sequence(k, n, m, &mut rng)?;
                let t = peel::deletion_procedure_points(&d, &mut rng);
                for j in 0..t.z.len() {
                    let (p, pp) = if j == 0 {
                        (String::new(), String::new())
                    } else {
                        (report::float(t.p_hat[j - 1].0), report::float(t.p_hat[j - 1].1))
                    };
                    trace_rows.push(vec![
                        trial.to_string(),
                        j.to_string(),
                        t.z[j].to_string(),
                        t.y[j].to_string(),
                        p,
                        pp,
                    ]);
                }
                summary.push(vec![trial.to_string(), t.w.to_string(), t.terminated.as_str().to_string()]);
            }
            if let Some(path) = trace_out {
                let csv = report::table_string(&["trial", "j", "Zj", "Yj", "pj", "pj_prime"], &trace_rows)?;
                std::fs::write(path, csv)?;
            }
            emit(out.as_deref(), &report::table_string(&["trial", "W", "terminated"], &summary)?)
        }
        Command::Walk { variant, k, c, xi, y0, horizon, trials, seed, out } => {
            let p = WalkParams::new(variant, k, c, xi, y0)?;
            let rows: Vec<Vec<String>> = (0..trials)
                .map(|trial| {
                    let mut rng = seeded(derive_seed(seed, &[k as u64, horizon as u64, trial as u64]));
                    let died = walks::death_time(&p, horizon, &mut rng);
                    vec![trial.to_string(), report::opt(died), died.is_none().to_string()]
                })
                .collect();
            emit(out.as_deref(), &report::table_string(&["trial", "died_at", "survived"], &rows)?)
        }
        Command::Trajectory { k, c, gamma, step, out } => {
            let near_k = (c - k as f64).abs() < 0.01;
            let mut rows = Vec::new();
            if near_k {
                let dom = ode::DomainSpec::c_to_k(k, gamma)?;
                let mut i = 0usize;
                loop {
                    let x = i as f64 * step;
                    if 2.0 * x >= k as f64 - gamma {
                        break;
                    }
                    let y = ode::trajectory_c_to_k(k, x)?;
                    if dom.exit_face(x, y, 0.0).is_some() {
                        break;
                    }
                    rows.push(vec![report::float(x), report::float(y), String::new(), String::new()]);
                    i += 1;
                }
            } else {
                let dom = ode::DomainSpec::general(k, c, gamma)?;
                for s in ode::closed_form_path(k, c, &dom, step)?.states {
                    rows.push(vec![
                        report::float(s.x),
                        report::float(s.y),
                        report::float(s.z),
                        report::float(s.mu),
                    ]);
                }
            }
            emit(out.as_deref(), &report::table_string(&["x", "y_star", "z_star", "mu"], &rows)?)
        }
        Command::Sweep(args) => {
            let (cfg, out) = load(&args, Some(Kind::Sweep))?;
            let r = experiment::run_regime_sweep(&cfg)?;
            emit_pair(out.as_deref(), &r.records_csv()?, &r.summary_csv()?)
        }
        Command::Gap(args) => {
            let (cfg, out) = load(&args, Some(Kind::Sweep))?;
            let (rows, _) = experiment::gap_statistic(&cfg)?;
            emit(out.as_deref(), &experiment::gap_csv(&rows)?)
        }
        Command::Gnm(args) => {
            let (cfg, out) = load(&args, Some(Kind::Gnm))?;
            let (recs, sums) = experiment::run_gnm_experiment(&cfg)?;
            emit_pair(out.as_deref(), &experiment::gnm_csv(&recs)?, &experiment::gnm_summary_csv(&sums)?)
        }
        Command::Compare(args) => {
            let (cfg, out) = load(&args, Some(Kind::TrajectoryCompare))?;
            let (recs, sums) = experiment::run_trajectory_compare(&cfg)?;
            emit_pair(
                out.as_deref(),
                &experiment::trajectory_csv(&recs)?,
                &experiment::trajectory_summary_csv(&sums)?,
            )
        }
        Command::WalkVsPeel(args) => {
            let (cfg, out) = load(&args, Some(Kind::WalkVsPeel))?;
            let (recs, sums) = experiment::run_walk_vs_peel(&cfg)?;
            emit_pair(
                out.as_deref(),
                &experiment::walk_peel_csv(&recs)?,
                &experiment::walk_peel_summary_csv(&sums)?,
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("corelab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
