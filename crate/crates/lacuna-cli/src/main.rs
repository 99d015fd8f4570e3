use clap::{Parser, Subcommand};
use lacuna_cli::config::Config;
use lacuna_cli::report::{svg_line_plot, write_json};
use lacuna_cli::{
    baselines::Baselines, decomp, ensure_out_dir, ineqrun, props, stress, sweep, verify,
    write_timings, CliError,
};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "lacuna",
    about = "Lacunary partial-sum maximal operator laboratory: tile decompositions, \
             covering rounds, and inequality regressions on a discretized torus"
)]
struct Cli {
    /// TOML configuration file (defaults are used when omitted).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV/JSON/SVG artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Override the run seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (also honored via LACUNA_THREADS); 0 = library default.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Emit SVG plots where a subcommand supports them.
    #[arg(long, global = true)]
    svg: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Weak-L¹ ratio sweep for the lacunary maximal function.
    Sweep,
    /// Grouped adjoint masses against their bound shapes.
    Props,
    /// Tile classification report for one (f, λ) configuration.
    Decompose,
    /// Randomized greedy-covering stress corpus.
    CoverStress,
    /// Inequality ratio corpora with recorded maxima.
    Ineq,
    /// Fixed invariant battery; exit 0 iff everything passes.
    Verify,
}

fn load_config(cli: &Cli) -> Result<Config, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path).map_err(CliError::Config)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.run.seed = seed;
    }
    if let Some(threads) = cli.threads {
        cfg.run.threads = threads;
    } else if let Ok(value) = std::env::var("LACUNA_THREADS") {
        cfg.run.threads = value
            .parse()
            .map_err(|_| CliError::Config(format!("bad LACUNA_THREADS value: {value}")))?;
    }
    cfg.validate().map_err(CliError::Config)?;
    Ok(cfg)
}

fn init_threads(threads: usize) {
    if threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

fn write_artifact(
    path: &Path,
    write: impl FnOnce(&Path) -> std::io::Result<()>,
) -> Result<(), CliError> {
    write(path).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = load_config(cli)?;
    init_threads(cfg.run.threads);
    ensure_out_dir(&cli.out)?;
    let out = &cli.out;
    let baselines = Baselines::load();

    match cli.cmd {
        Cmd::Sweep => {
            let outcome = sweep::run_sweep(&cfg).map_err(CliError::Config)?;
            write_artifact(&out.join("sweep.csv"), |p| sweep::sweep_csv(&outcome).write_to(p))?;
            write_artifact(&out.join("sweep.json"), |p| write_json(p, &outcome))?;
            if cli.svg {
                let series = sweep::sweep_svg_series(&outcome);
                write_artifact(&out.join("sweep.svg"), |p| {
                    svg_line_plot(
                        p,
                        "weak-L1 ratio vs loglog(10 + 1/|F|)",
                        "loglog(10 + 1/|F|)",
                        "ratio",
                        &series,
                    )
                })?;
            }
            let timings: Vec<String> = outcome
                .rows
                .iter()
                .map(|r| format!("{} {} {}ms", r.family, r.id, r.runtime_ms))
                .collect();
            write_timings(out, "sweep", &timings);
            println!(
                "sweep: {} rows, c_main = {:.6}, refine drift = {:?}",
                outcome.rows.len(),
                outcome.c_main,
                outcome.refine_drift
            );
            if outcome.rows.iter().any(|r| !r.domination_ok) {
                return Err(CliError::Check(
                    "lacunary maximal exceeded the full maximal somewhere".into(),
                ));
            }
            if outcome.c_main > baselines.sweep.c_main {
                return Err(CliError::Check(format!(
                    "c_main {} exceeds frozen baseline {}",
                    outcome.c_main, baselines.sweep.c_main
                )));
            }
            Ok(())
        }
        Cmd::Props => {
            let outcome = props::run_props(&cfg).map_err(CliError::Check)?;
            write_artifact(&out.join("props.csv"), |p| props::props_csv(&outcome).write_to(p))?;
            write_artifact(&out.join("props.json"), |p| write_json(p, &outcome))?;
            let timings: Vec<String> = outcome
                .rows
                .iter()
                .map(|r| format!("instance{} {}ms", r.id, r.runtime_ms))
                .collect();
            write_timings(out, "props", &timings);
            println!(
                "props: {} instances, ratios cluster {:.4} p2 {:.4} p1 {:.4} residual {:.4}",
                outcome.rows.len(),
                outcome.max_cluster_ratio,
                outcome.max_p2_ratio,
                outcome.max_p1_ratio,
                outcome.max_residual_ratio
            );
            let caps = &baselines.props;
            let violations = [
                ("cluster", outcome.max_cluster_ratio, caps.cluster_ratio),
                ("p2", outcome.max_p2_ratio, caps.p2_ratio),
                ("p1", outcome.max_p1_ratio, caps.p1_ratio),
                ("residual", outcome.max_residual_ratio, caps.residual_ratio),
            ];
            for (name, got, cap) in violations {
                if got > cap {
                    return Err(CliError::Check(format!(
                        "{name} ratio {got} exceeds frozen baseline {cap}"
                    )));
                }
            }
            Ok(())
        }
        Cmd::Decompose => {
            let report = decomp::run_decompose(&cfg).map_err(CliError::Config)?;
            write_artifact(&out.join("decompose.json"), |p| write_json(p, &report))?;
            let table = decomp::decompose_csv(&report, &cfg).map_err(CliError::Config)?;
            write_artifact(&out.join("decompose.csv"), |p| table.write_to(p))?;
            let f = decomp::decompose_function(&cfg);
            write_artifact(&out.join("function.csv"), |p| {
                decomp::function_csv(&f).write_to(p)
            })?;
            write_artifact(&out.join("function.json"), |p| write_json(p, &f))?;
            println!(
                "decompose: {} labels, coverage {}, multiplicity {} (max {})",
                report.labels.len(),
                report.stats.coverage_ok,
                report.stats.multiplicity_ok,
                report.stats.max_multiplicity
            );
            if !(report.stats.coverage_ok
                && report.stats.multiplicity_ok
                && report.stats.shells_ok)
            {
                return Err(CliError::Check("decomposition invariants failed".into()));
            }
            Ok(())
        }
        Cmd::CoverStress => {
            let outcome = stress::run_stress(&cfg).map_err(CliError::Config)?;
            write_artifact(&out.join("cover_stress.csv"), |p| {
                stress::stress_csv(&outcome).write_to(p)
            })?;
            write_artifact(&out.join("cover_stress.json"), |p| write_json(p, &outcome))?;
            println!(
                "cover-stress: {} instances, worst round ratio {:.6}, max msum {:.4}",
                outcome.instances, outcome.worst_round_ratio, outcome.max_msum_ratio
            );
            if outcome.failures > 0 {
                return Err(CliError::Check(format!(
                    "{} covering instances violated partition/disjointness/round bounds",
                    outcome.failures
                )));
            }
            if outcome.max_msum_ratio > baselines.cover.msum_cap {
                return Err(CliError::Check(format!(
                    "msum ratio {} exceeds cap {}",
                    outcome.max_msum_ratio, baselines.cover.msum_cap
                )));
            }
            Ok(())
        }
        Cmd::Ineq => {
            let outcome = ineqrun::run_ineq(&cfg).map_err(CliError::Config)?;
            write_artifact(&out.join("ineq.csv"), |p| ineqrun::ineq_csv(&outcome).write_to(p))?;
            write_artifact(&out.join("ineq.json"), |p| write_json(p, &outcome))?;
            println!(
                "ineq: {} rows, C_Z {:.4} C_K {:.4} C_D(1/2) {:.4} C_D(1) {:.4} C_B {:.4} C_G {:.4}",
                outcome.rows.len(),
                outcome.maxima.c_z,
                outcome.maxima.c_k,
                outcome.maxima.c_d_half,
                outcome.maxima.c_d_one,
                outcome.maxima.c_b,
                outcome.maxima.c_g
            );
            if outcome.khinchin_p2_error > 1e-12 {
                return Err(CliError::Check("khinchin p=2 spot value drifted".into()));
            }
            if outcome.zygmund_single_error > 1e-6 {
                return Err(CliError::Check(
                    "zygmund single-coefficient value drifted".into(),
                ));
            }
            let caps = &baselines.ineq;
            let pairs = [
                ("c_z", outcome.maxima.c_z, caps.c_z),
                ("c_k", outcome.maxima.c_k, caps.c_k),
                ("c_d_half", outcome.maxima.c_d_half, caps.c_d_half),
                ("c_d_one", outcome.maxima.c_d_one, caps.c_d_one),
                ("c_b", outcome.maxima.c_b, caps.c_b),
                ("c_g", outcome.maxima.c_g, caps.c_g),
            ];
            for (name, got, cap) in pairs {
                if got > cap {
                    return Err(CliError::Check(format!(
                        "{name} = {got} exceeds frozen baseline {cap}"
                    )));
                }
            }
            if let Some(drift) = outcome.max_drift {
                if drift > caps.refine_drift {
                    return Err(CliError::Check(format!(
                        "corpus maxima drift {drift} exceeds {}",
                        caps.refine_drift
                    )));
                }
            }
            Ok(())
        }
        Cmd::Verify => {
            let outcome = verify::run_verify(cfg.run.seed);
            write_artifact(&out.join("verify.csv"), |p| {
                verify::verify_csv(&outcome).write_to(p)
            })?;
            write_artifact(&out.join("verify.json"), |p| write_json(p, &outcome))?;
            for check in &outcome.checks {
                println!(
                    "{}: {} (value {:.3e})",
                    check.name,
                    if check.pass { "pass" } else { "FAIL" },
                    check.value
                );
            }
            println!(
                "t_vs_maximal gap: max {:.3e}, mean {:.3e} (recorded, no asserted tolerance)",
                outcome.t_vs_maximal_max_gap, outcome.t_vs_maximal_mean_gap
            );
            if outcome.all_pass {
                Ok(())
            } else {
                Err(CliError::Check("verify battery reported failures".into()))
            }
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("{err}");
            std::process::exit(err.exit_code());
        }
    }
}
