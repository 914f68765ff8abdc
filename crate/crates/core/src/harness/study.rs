//! Convergence studies against exact or reference solutions.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::exact;
use super::norms::{error_norms, observed_order_ratio};
use super::problems::{build_1d, build_2d, ProblemId};
use crate::config::Order;
use crate::error::{Error, Result};
use crate::grid::Axis;

/// Velocity index whose `f` is reported (the first node of the set).
pub const REPORTED_VELOCITY: usize = 0;

#[derive(Debug, Clone, PartialEq)]
pub enum DtRule {
    /// `Δt = c Δx` for every mesh.
    Cfl(f64),
    /// One row per time step on a single mesh.
    List(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub dt: f64,
    pub rho_linf: f64,
    pub rho_linf_order: Option<f64>,
    pub f_linf: f64,
    pub f_linf_order: Option<f64>,
    pub rho_l1: f64,
    pub rho_l1_order: Option<f64>,
    pub f_l1: f64,
    pub f_l1_order: Option<f64>,
}

/// Errors of one run: `(ρ L∞, ρ L1, f L∞, f L1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunErrors {
    pub rho_linf: f64,
    pub rho_l1: f64,
    pub f_linf: f64,
    pub f_l1: f64,
}

/// Fine-mesh solution on a 1D axis, sampled by linear interpolation.
#[derive(Debug, Clone)]
pub struct Reference {
    pub axis: Axis,
    pub rho: Vec<f64>,
    /// `f` at [`REPORTED_VELOCITY`].
    pub f: Vec<f64>,
}

impl Reference {
    /// Linear interpolation of `values` (on `self.axis`) at `x`.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let a = &self.axis;
        let s = (x - a.lo) / a.dx();
        let i = s.floor();
        let t = s - i;
        let i = i as i64;
        let (p, q) = (a.resolve(i), a.resolve(i + 1));
        if !a.is_periodic() && i + 1 >= a.n as i64 {
            return values[a.n - 1];
        }
        (1.0 - t) * values[p] + t * values[q]
    }

    pub fn sample(&self, xs: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let rho = xs.iter().map(|&x| self.interpolate(&self.rho, x)).collect();
        let f = xs.iter().map(|&x| self.interpolate(&self.f, x)).collect();
        (rho, f)
    }
}

/// Mesh and step of the fine reference run: second order with `N = 5120`,
/// `Δt = 5e-4` for `onegroup_smooth`, first order with `N = 5000`,
/// `Δt = 0.2 Δx` otherwise.
pub fn reference_parameters(id: ProblemId) -> (Order, usize, f64) {
    match id {
        ProblemId::OnegroupSmooth => (Order::Second, 5120, 5e-4),
        _ => (Order::First, 5000, 0.2 * id.dx(5000)),
    }
}

/// Runs the fine reference for a 1D problem up to `t_final`.
pub fn reference_solution(id: ProblemId, eps: f64, t_final: f64) -> Result<Reference> {
    let (order, n, dt) = reference_parameters(id);
    reference_with(id, eps, t_final, order, n, dt)
}

pub fn reference_with(id: ProblemId, eps: f64, t_final: f64, order: Order, n: usize, dt: f64) -> Result<Reference> {
    if id.is_2d() {
        return Err(Error::Unsupported("reference solutions are 1D only".into()));
    }
    let mut cfg = id.preset(eps, order, n, dt);
    cfg.t_final = t_final;
    let mut s = build_1d(&cfg)?;
    s.solver.run(&mut s.state, t_final)?;
    Ok(Reference { axis: s.solver.axis, rho: s.state.rho.clone(), f: s.state.f_slice(REPORTED_VELOCITY).to_vec() })
}

fn errors(rho: &[f64], f: &[f64], rho_ex: &[f64], f_ex: &[f64], cell: f64) -> Result<RunErrors> {
    let (rho_l1, rho_linf) = error_norms(rho, rho_ex, cell)?;
    let (f_l1, f_linf) = error_norms(f, f_ex, cell)?;
    Ok(RunErrors { rho_linf, rho_l1, f_linf, f_l1 })
}

/// Runs one mesh/step pair and measures the errors at the final time.
pub fn run_errors(
    id: ProblemId,
    order: Order,
    eps: f64,
    n: usize,
    dt: f64,
    reference: Option<&Reference>,
) -> Result<RunErrors> {
    let cfg = id.preset(eps, order, n, dt);
    let t = cfg.t_final;
    if id.is_2d() {
        if id != ProblemId::TwodManufactured {
            return Err(Error::Unsupported(format!("{id} has no exact solution")));
        }
        let mut s = build_2d(&cfg)?;
        s.solver.run(&mut s.state, t)?;
        let grid = &s.solver.grid;
        let (ax, ay) = (grid.x, grid.y.expect("2D grid"));
        let v = s.solver.vs.nodes[REPORTED_VELOCITY];
        let mut rho_ex = Vec::with_capacity(ax.n * ay.n);
        let mut f_ex = Vec::with_capacity(ax.n * ay.n);
        for j in 0..ay.n {
            for i in 0..ax.n {
                let (x, y) = (ax.x(i), ay.x(j));
                rho_ex.push(exact::manufactured_rho(t, x, y));
                f_ex.push(exact::manufactured_f(t, x, y, &v, eps));
            }
        }
        return errors(&s.state.rho, s.state.f_slice(REPORTED_VELOCITY), &rho_ex, &f_ex, grid.cell_measure());
    }
    let mut s = build_1d(&cfg)?;
    s.solver.run(&mut s.state, t)?;
    let xs = s.solver.axis.nodes();
    let (rho_ex, f_ex) = match reference {
        Some(r) => r.sample(&xs),
        None => {
            let v = s.solver.vs.v(REPORTED_VELOCITY);
            let mut rho = Vec::with_capacity(xs.len());
            let mut f = Vec::with_capacity(xs.len());
            for &x in &xs {
                let (r, fv) = id
                    .exact_1d(eps, x, t, v)
                    .ok_or_else(|| Error::Unsupported(format!("{id} has no exact solution")))?;
                rho.push(r);
                f.push(fv);
            }
            (rho, f)
        }
    };
    errors(&s.state.rho, s.state.f_slice(REPORTED_VELOCITY), &rho_ex, &f_ex, s.solver.axis.dx())
}

/// Builds rows with observed orders from per-run errors. The order of a row
/// is taken against the previous row, with the refinement ratio `N'/N` (or
/// `Δt/Δt'` on a fixed mesh) as the base of the logarithm.
pub fn rows_from_errors(runs: &[(usize, f64, RunErrors)]) -> Vec<ConvergenceRow> {
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(runs.len());
    for (idx, &(n, dt, e)) in runs.iter().enumerate() {
        let prev = idx.checked_sub(1).map(|p| runs[p]);
        let ord = |cur: f64, old: Option<f64>| {
            prev.zip(old).map(|((pn, pdt, _), o)| {
                let ratio = if pn != n { n as f64 / pn as f64 } else { pdt / dt };
                observed_order_ratio(o, cur, ratio)
            })
        };
        let pe = prev.map(|p| p.2);
        rows.push(ConvergenceRow {
            n,
            dt,
            rho_linf: e.rho_linf,
            rho_linf_order: ord(e.rho_linf, pe.map(|p| p.rho_linf)),
            f_linf: e.f_linf,
            f_linf_order: ord(e.f_linf, pe.map(|p| p.f_linf)),
            rho_l1: e.rho_l1,
            rho_l1_order: ord(e.rho_l1, pe.map(|p| p.rho_l1)),
            f_l1: e.f_l1,
            f_l1_order: ord(e.f_l1, pe.map(|p| p.f_l1)),
        });
    }
    rows
}

/// Runs a study: one row per mesh (`DtRule::Cfl`) or per step on the single
/// mesh in `ns` (`DtRule::List`). Rows run in parallel.
pub fn convergence_study(
    id: ProblemId,
    order: Order,
    eps: f64,
    ns: &[usize],
    rule: &DtRule,
) -> Result<Vec<ConvergenceRow>> {
    if !id.has_study() {
        return Err(Error::Config(format!("no convergence study for {id}")));
    }
    let plan: Vec<(usize, f64)> = match rule {
        DtRule::Cfl(c) => {
            if !(*c > 0.0) {
                return Err(Error::Config(format!("cfl must be positive, got {c}")));
            }
            ns.iter().map(|&n| (n, c * id.dx(n))).collect()
        }
        DtRule::List(dts) => {
            if ns.len() != 1 {
                return Err(Error::Config("a time-step list needs exactly one mesh size".into()));
            }
            dts.iter().map(|&dt| (ns[0], dt)).collect()
        }
    };
    if plan.is_empty() {
        return Err(Error::Config("empty study".into()));
    }
    let reference = match id {
        ProblemId::OnegroupSmooth => Some(reference_solution(id, eps, id.default_t_final(eps))?),
        _ => None,
    };
    let runs: Vec<(usize, f64, RunErrors)> = plan
        .par_iter()
        .map(|&(n, dt)| run_errors(id, order, eps, n, dt, reference.as_ref()).map(|e| (n, dt, e)))
        .collect::<Result<_>>()?;
    Ok(rows_from_errors(&runs))
}

fn sci(v: f64) -> String {
    format!("{v:.6e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(|o| format!("{o:.4}")).unwrap_or_default()
}

pub const CSV_HEADER: &str = "n,dt,rho_linf,rho_linf_order,f_linf,f_linf_order,rho_l1,rho_l1_order,f_l1,f_l1_order";

pub fn rows_to_csv(rows: &[ConvergenceRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.n,
            sci(r.dt),
            sci(r.rho_linf),
            opt(r.rho_linf_order),
            sci(r.f_linf),
            opt(r.f_linf_order),
            sci(r.rho_l1),
            opt(r.rho_l1_order),
            sci(r.f_l1),
            opt(r.f_l1_order)
        );
    }
    s
}

pub fn rows_to_table(rows: &[ConvergenceRow]) -> String {
    let o = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "--".into());
    let mut s = format!(
        "{:>6} {:>10} {:>10} {:>6} {:>10} {:>6} {:>10} {:>6} {:>10} {:>6}\n",
        "N", "dt", "Linf rho", "order", "Linf f", "order", "L1 rho", "order", "L1 f", "order"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:>6} {:>10.3e} {:>10.3e} {:>6} {:>10.3e} {:>6} {:>10.3e} {:>6} {:>10.3e} {:>6}",
            r.n,
            r.dt,
            r.rho_linf,
            o(r.rho_linf_order),
            r.f_linf,
            o(r.f_linf_order),
            r.rho_l1,
            o(r.rho_l1_order),
            r.f_l1,
            o(r.f_l1_order)
        );
    }
    s
}

/// `{problem}_{order}_{eps}.csv`.
pub fn study_file_name(id: ProblemId, order: Order, eps: f64) -> String {
    format!("{}_{}_{:e}.csv", id.name(), u8::from(order), eps)
}

/// Writes the CSV and the aligned table (`.txt`) into `dir`; returns the CSV path.
pub fn write_study(dir: &Path, id: ProblemId, order: Order, eps: f64, rows: &[ConvergenceRow]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let csv = dir.join(study_file_name(id, order, eps));
    std::fs::write(&csv, rows_to_csv(rows))?;
    let mut txt = std::fs::File::create(csv.with_extension("txt"))?;
    txt.write_all(rows_to_table(rows).as_bytes())?;
    Ok(csv)
}
