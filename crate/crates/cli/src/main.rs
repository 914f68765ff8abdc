#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use apsl::config::parse_override;
use apsl::harness::problems::{build_1d, build_2d};
use apsl::harness::study::{rows_to_table, write_study};
use apsl::harness::{convergence_study, DtRule, ProblemId};
use apsl::solver1d::RunStats;
use apsl::stability::{self, CMatrix, SweepGrid, Tolerances};
use apsl::{Config, KineticState, Order, VelocitySpace};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(name = "apsl", version, about = "Asymptotic-preserving semi-Lagrangian kinetic solvers")]
struct Cli {
    /// Worker threads (1 gives bit-reproducible output).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one simulation from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override a config entry, e.g. `--set grid.n=400`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Spatial or temporal convergence study.
    Converge {
        #[arg(long)]
        problem: String,
        #[arg(long, value_parser = parse_order)]
        order: Order,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// `Δt = cfl·Δx` on every mesh.
        #[arg(long, conflicts_with = "dt_list")]
        cfl: Option<f64>,
        /// Time steps on a single mesh.
        #[arg(long, value_delimiter = ',')]
        dt_list: Option<Vec<f64>>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Fourier stability sweep of the amplification matrices.
    Stability {
        #[arg(long, value_parser = parse_order)]
        order: Order,
        /// `default` or a JSON file with `dx`, `dt_factor` and `eps` lists.
        #[arg(long, default_value = "default")]
        grid: String,
        #[arg(long, default_value_t = 500)]
        omegas: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Check the matrices in a JSON file (list of real square matrices) instead.
        #[arg(long, hide = true)]
        inject: Option<PathBuf>,
    },
    /// Riemann problem presets.
    Riemann {
        #[arg(long, value_enum)]
        preset: Preset,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        cfl: f64,
        #[arg(long, value_parser = parse_order, default_value = "1")]
        order: Order,
        #[arg(long)]
        limiter: bool,
        #[arg(long)]
        t_final: Option<f64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Parse and validate a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Telegraph,
    Advdiff,
    Burgers,
    OnegroupIsotropic,
}

impl Preset {
    fn problem(self) -> ProblemId {
        match self {
            Preset::Telegraph => ProblemId::RiemannTelegraph,
            Preset::Advdiff => ProblemId::RiemannAdvdiff,
            Preset::Burgers => ProblemId::RiemannBurgers,
            Preset::OnegroupIsotropic => ProblemId::OnegroupIsotropic,
        }
    }
}

fn parse_order(s: &str) -> Result<Order, String> {
    s.parse::<u8>().map_err(|e| e.to_string()).and_then(|v| Order::try_from(v).map_err(|e| e.to_string()))
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        let code = match err.downcast_ref::<apsl::Error>() {
            Some(e) if e.is_usage() => 2,
            _ => 1,
        };
        Self { code, err }
    }
}

impl From<apsl::Error> for Failure {
    fn from(e: apsl::Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, err: anyhow::anyhow!(msg.into()) }
}

fn sci(v: f64) -> String {
    format!("{v:.6e}")
}

fn write_fields(
    dir: &Path,
    x: &[[f64; 2]],
    two_d: bool,
    vs: &VelocitySpace,
    st: &KineticState,
    with_f: bool,
) -> anyhow::Result<()> {
    let mut rho = String::from(if two_d { "x,y,rho\n" } else { "x,rho\n" });
    for (p, r) in x.iter().zip(&st.rho) {
        if two_d {
            rho.push_str(&format!("{},{},{}\n", sci(p[0]), sci(p[1]), sci(*r)));
        } else {
            rho.push_str(&format!("{},{}\n", sci(p[0]), sci(*r)));
        }
    }
    std::fs::write(dir.join("rho.csv"), rho)?;
    if with_f {
        let mut f = String::from(if two_d { "x,y,xi,eta,gamma,f\n" } else { "x,v,f\n" });
        for k in 0..vs.len() {
            let v = vs.nodes[k];
            for (p, val) in x.iter().zip(st.f_slice(k)) {
                if two_d {
                    f.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        sci(p[0]),
                        sci(p[1]),
                        sci(v[0]),
                        sci(v[1]),
                        sci(v[2]),
                        sci(*val)
                    ));
                } else {
                    f.push_str(&format!("{},{},{}\n", sci(p[0]), sci(v[0]), sci(*val)));
                }
            }
        }
        std::fs::write(dir.join("f.csv"), f)?;
    }
    Ok(())
}

fn simulate(cfg: &Config, out: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let id: ProblemId = cfg.problem.parse()?;
    let start = Instant::now();
    let (stats, points, cell, vs, state): (RunStats, Vec<[f64; 2]>, f64, VelocitySpace, KineticState) = if id.is_2d() {
        let mut s = build_2d(cfg)?;
        let stats = s.solver.run(&mut s.state, cfg.t_final)?;
        let (ax, ay) = (s.solver.grid.x, s.solver.grid.y.expect("2D grid"));
        let pts = (0..ay.n).flat_map(|j| (0..ax.n).map(move |i| [ax.x(i), ay.x(j)])).collect();
        (stats, pts, s.solver.grid.cell_measure(), s.solver.vs, s.state)
    } else {
        let mut s = build_1d(cfg)?;
        let stats = s.solver.run(&mut s.state, cfg.t_final)?;
        let pts = s.solver.axis.nodes().into_iter().map(|x| [x, 0.0]).collect();
        (stats, pts, s.solver.axis.dx(), s.solver.vs, s.state)
    };
    let wall = start.elapsed().as_secs_f64();
    let two_d = id.is_2d();
    write_fields(out, &points, two_d, &vs, &state, cfg.write_f)?;
    let picard = if stats.picard.is_empty() {
        serde_json::Value::Null
    } else {
        let n = stats.picard.len() as f64;
        json!({
            "per_step": stats.picard,
            "min": stats.picard.iter().min(),
            "max": stats.picard.iter().max(),
            "mean": stats.picard.iter().sum::<usize>() as f64 / n,
        })
    };
    let manifest = json!({
        "config": cfg,
        "wall_seconds": wall,
        "steps": stats.steps,
        "t_final": state.t,
        "mass": state.mass(cell),
        "picard": picard,
    });
    std::fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest).map_err(anyhow::Error::from)?)
        .map_err(anyhow::Error::from)?;
    println!("{} steps in {wall:.3} s, output in {}", stats.steps, out.display());
    Ok(())
}

fn overrides(set: &[String]) -> Result<Vec<(String, String)>, Failure> {
    Ok(set.iter().map(|s| parse_override(s)).collect::<apsl::Result<_>>()?)
}

fn stability_cmd(order: Order, grid: &str, omegas: usize, out: &Path, inject: Option<&Path>) -> Result<(), Failure> {
    if let Some(path) = inject {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        let mats: Vec<Vec<Vec<f64>>> = serde_json::from_str(&text).map_err(|e| usage(e.to_string()))?;
        if mats.is_empty() {
            return Err(usage("no matrices to check"));
        }
        let mut unstable = 0;
        for m in &mats {
            let flat: Vec<f64> = m.iter().flatten().copied().collect();
            let g = CMatrix::from_real(m.len(), &flat)?;
            let v = stability::verdict_for([g], &Tolerances::default())?;
            println!("max modulus {}, stable {}", sci(v.max_modulus), v.stable);
            if !v.stable {
                unstable += 1;
            }
        }
        return if unstable > 0 {
            Err(Failure { code: 3, err: anyhow::anyhow!("{unstable} of {} matrices unstable", mats.len()) })
        } else {
            Ok(())
        };
    }
    let sweep_grid = if grid == "default" {
        SweepGrid::standard()
    } else {
        let text = std::fs::read_to_string(grid).map_err(|e| usage(format!("cannot read {grid}: {e}")))?;
        serde_json::from_str(&text).map_err(|e| usage(format!("bad sweep grid: {e}")))?
    };
    let rows = stability::sweep(&[order], &sweep_grid, omegas)?;
    std::fs::create_dir_all(out).map_err(anyhow::Error::from)?;
    let path = out.join(format!("stability_order{}.csv", u8::from(order)));
    std::fs::write(&path, stability::rows_to_csv(&rows)).map_err(anyhow::Error::from)?;
    let unstable = rows.iter().filter(|r| !r.stable).count();
    let worst = rows.iter().map(|r| r.max_modulus).fold(0.0, f64::max);
    println!("{} tuples, {unstable} unstable, max modulus {}; written to {}", rows.len(), sci(worst), path.display());
    if unstable > 0 {
        return Err(Failure { code: 3, err: anyhow::anyhow!("{unstable} unstable tuples") });
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(anyhow::Error::from)?;
    }
    match cli.cmd {
        Cmd::Run { config, out, set } => {
            let cfg = Config::from_path_with_overrides(&config, &overrides(&set)?)?;
            simulate(&cfg, &out)
        }
        Cmd::Validate { config } => {
            let cfg = Config::from_path_with_overrides(&config, &[])?;
            if cfg.problem.parse::<ProblemId>()?.is_2d() != (cfg.grid.dim == 2) {
                return Err(usage(format!("problem {} does not match grid.dim = {}", cfg.problem, cfg.grid.dim)));
            }
            println!("{}: ok", config.display());
            Ok(())
        }
        Cmd::Converge { problem, order, eps, n, cfl, dt_list, out } => {
            let id: ProblemId = problem.parse()?;
            let rule = match dt_list {
                Some(list) => DtRule::List(list),
                None => DtRule::Cfl(cfl.unwrap_or(3.0)),
            };
            let rows = convergence_study(id, order, eps, &n, &rule)?;
            let path = write_study(&out, id, order, eps, &rows)?;
            print!("{}", rows_to_table(&rows));
            println!("written to {}", path.display());
            Ok(())
        }
        Cmd::Stability { order, grid, omegas, out, inject } => {
            stability_cmd(order, &grid, omegas, &out, inject.as_deref())
        }
        Cmd::Riemann { preset, eps, n, cfl, order, limiter, t_final, out } => {
            let id = preset.problem();
            if n < 4 {
                return Err(usage("--n must be at least 4"));
            }
            if !(cfl > 0.0) {
                return Err(usage("--cfl must be positive"));
            }
            let mut cfg = id.preset(eps, order, n, cfl * id.dx(n));
            cfg.limiter = limiter;
            if let Some(t) = t_final {
                cfg.t_final = t;
            }
            cfg.validate()?;
            simulate(&cfg, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
