//! `projlog` — command-line front end over the projlog-core library.
//!
//! Every command maps to pure library calls; no hidden global state.
//! Exit codes: 0 success (and all verification checks passing), 1 a failed
//! verification check, 2 invalid input or setup error.

mod config;
mod output;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use projlog_core::geometry::{from_chart, AffinePoint};
use projlog_core::measures::load_measure;
use projlog_core::potentials::{atom_mass_diagnostic, eval_g, eval_u, eval_v, lift_to_projective};
use projlog_core::quadrature::alpha_n;
use projlog_core::riesz::{critical_exponents, lp_threshold_probe, riesz_j};
use projlog_core::{run_suite, CVec, ChartIndex, MaNormalization, Measure, PotentialField, RegEps};

use config::{parse_config, Cli, CommandKind, Format, PotKind, RunConfig};
use output::{Cell, Table};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                print!("{e}");
                std::process::exit(0);
            }
            _ => {
                let raw = e.to_string();
                let line = raw.lines().next().unwrap_or("invalid arguments");
                eprintln!("error: {}", line.strip_prefix("error: ").unwrap_or(line));
                std::process::exit(2);
            }
        },
    };
    let code = match parse_config(cli).and_then(run) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    };
    std::process::exit(code);
}

fn run(rc: RunConfig) -> Result<i32, String> {
    match rc.command {
        CommandKind::Verify => {
            let report = run_suite(rc.suite, rc.seed).map_err(|e| e.to_string())?;
            emit(&rc, &report.render())?;
            Ok(if report.all_pass() { 0 } else { 1 })
        }
        CommandKind::Potential => finish(&rc, potential_table(&rc)?),
        CommandKind::MaDensity => finish(&rc, ma_density_table(&rc)?),
        CommandKind::AtomScan => finish(&rc, atom_scan_table(&rc)?),
        CommandKind::Riesz => finish(&rc, riesz_table(&rc)?),
        CommandKind::Dimension => finish(&rc, dimension_table(&rc)?),
        CommandKind::Exponents => finish(&rc, exponents_table(&rc)?),
        CommandKind::Constants => finish(&rc, constants_table()?),
    }
}

fn finish(rc: &RunConfig, table: Table) -> Result<i32, String> {
    let text = match rc.format {
        Format::Csv => table.render_csv(),
        Format::Json => table.render_json(),
    };
    emit(rc, &text)?;
    Ok(0)
}

fn emit(rc: &RunConfig, text: &str) -> Result<(), String> {
    match &rc.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Load the measure file (required by the data commands).
fn load_mu(rc: &RunConfig) -> Result<Measure, String> {
    let path = rc
        .measure
        .as_ref()
        .ok_or("this command requires --measure <FILE>")?;
    load_measure(path).map_err(|e| format!("{}: {e}", path.display()))
}

/// Load the measure and settle the complex dimension against --n.
fn load_mu_complex(rc: &RunConfig) -> Result<(Measure, usize), String> {
    let mu = load_mu(rc)?;
    let n = mu.complex_dim().map_err(|e| e.to_string())?;
    if !(1..=3).contains(&n) {
        return Err(format!(
            "measure has complex dimension {n}; supported: 1, 2, 3"
        ));
    }
    if let Some(flag_n) = rc.n {
        if flag_n != n {
            return Err(format!(
                "measure has complex dimension {n} but --n {flag_n} was given"
            ));
        }
    }
    Ok((mu, n))
}

const COORD_NAMES: [&str; 6] = ["re1", "im1", "re2", "im2", "re3", "im3"];

/// Grid evaluation scaffold shared by potential / ma-density / riesz:
/// row-major over the (Re z1, Im z1) window with Re z1 varying fastest,
/// remaining coordinates pinned by --fix.
fn grid_table<F>(
    rc: &RunConfig,
    command: &'static str,
    n: usize,
    extra: &[&'static str],
    mut f: F,
) -> Result<Table, String>
where
    F: FnMut(&CVec) -> Result<Vec<Cell>, String>,
{
    let fix = match &rc.fix {
        Some(fix) => {
            if fix.len() != 2 * n - 2 {
                return Err(format!(
                    "--fix needs {} coordinates for n = {n}, got {}",
                    2 * n - 2,
                    fix.len()
                ));
            }
            fix.clone()
        }
        None => vec![0.0; 2 * n - 2],
    };
    let mut columns: Vec<&'static str> = COORD_NAMES[..2 * n].to_vec();
    columns.extend_from_slice(extra);
    let mut table = Table::new(command, columns);
    table.push_meta("n", json!(n));
    table.push_meta(
        "grid",
        json!(format!("{}:{}:{}", rc.grid.lo, rc.grid.hi, rc.grid.points)),
    );
    let mut coords = vec![0.0; 2 * n];
    coords[2..].copy_from_slice(&fix);
    for iy in 0..rc.grid.points {
        for ix in 0..rc.grid.points {
            coords[0] = rc.grid.axis(ix);
            coords[1] = rc.grid.axis(iy);
            let z = CVec::from_real_coords(&coords).map_err(|e| e.to_string())?;
            let mut row: Vec<Cell> = coords.iter().map(|&c| Cell::F(c)).collect();
            row.extend(f(&z)?);
            table.push(row);
        }
    }
    Ok(table)
}

fn potential_table(rc: &RunConfig) -> Result<Table, String> {
    let (mu, n) = load_mu_complex(rc)?;
    let eps = RegEps::new(rc.eps).map_err(|e| e.to_string())?;
    let mut table = match rc.kind {
        PotKind::U => grid_table(rc, "potential", n, &["value"], |z| {
            Ok(vec![Cell::F(eval_u(&mu, z).map_err(|e| e.to_string())?)])
        })?,
        PotKind::V => grid_table(rc, "potential", n, &["value"], |z| {
            Ok(vec![Cell::F(
                eval_v(&mu, z, eps).map_err(|e| e.to_string())?,
            )])
        })?,
        PotKind::G => {
            if rc.chart > n {
                return Err(format!("chart must be in 0..={n}, got {}", rc.chart));
            }
            let chart = ChartIndex(rc.chart);
            let lifted = lift_to_projective(&mu, chart).map_err(|e| e.to_string())?;
            grid_table(rc, "potential", n, &["value"], |z| {
                let p = from_chart(&AffinePoint {
                    z: z.clone(),
                    chart,
                })
                .map_err(|e| e.to_string())?;
                Ok(vec![Cell::F(
                    eval_g(&lifted, &p).map_err(|e| e.to_string())?,
                )])
            })?
        }
    };
    table.push_meta(
        "kind",
        json!(match rc.kind {
            PotKind::U => "u",
            PotKind::V => "v",
            PotKind::G => "g",
        }),
    );
    table.push_meta("eps", json!(rc.eps));
    if rc.kind == PotKind::G {
        table.push_meta("chart", json!(rc.chart));
    }
    Ok(table)
}

fn ma_density_table(rc: &RunConfig) -> Result<Table, String> {
    let (mu, n) = load_mu_complex(rc)?;
    let eps = RegEps::new(rc.eps).map_err(|e| e.to_string())?;
    let k = rc.k.unwrap_or(n);
    let field = PotentialField::new(mu, eps).map_err(|e| e.to_string())?;
    let mut table = grid_table(rc, "ma-density", n, &["value", "clamped"], |z| {
        let d = field.ma_density(z, k).map_err(|e| e.to_string())?;
        Ok(vec![Cell::F(d.value), Cell::I(d.clamped as i64)])
    })?;
    table.push_meta("eps", json!(rc.eps));
    table.push_meta("k", json!(k));
    Ok(table)
}

fn atom_scan_table(rc: &RunConfig) -> Result<Table, String> {
    let (mu, n) = load_mu_complex(rc)?;
    let center_coords: Vec<f64> = match &rc.at {
        Some(at) => {
            if at.len() != 2 * n {
                return Err(format!(
                    "--at needs {} coordinates for n = {n}, got {}",
                    2 * n,
                    at.len()
                ));
            }
            at.clone()
        }
        None => {
            // Default to the heaviest atom (first one on ties).
            let weights = mu.weights();
            let mut best = 0;
            for i in 1..weights.len() {
                if weights[i] > weights[best] {
                    best = i;
                }
            }
            mu.point_real(best).to_vec()
        }
    };
    let center = CVec::from_real_coords(&center_coords).map_err(|e| e.to_string())?;
    let eps_list: Vec<f64> = if rc.radii.is_empty() {
        vec![0.2, 0.1, 0.05]
    } else {
        rc.radii.clone()
    };
    let factor = rc.radius_factor;
    let scans =
        atom_mass_diagnostic(&mu, &center, &eps_list, |e| factor * e).map_err(|e| e.to_string())?;
    let mut table = Table::new("atom-scan", vec!["eps", "radius", "mass"]);
    table.push_meta("n", json!(n));
    table.push_meta("center", json!(center_coords));
    table.push_meta("radius_factor", json!(factor));
    for s in scans {
        table.push(vec![Cell::F(s.eps), Cell::F(s.radius), Cell::F(s.mass)]);
    }
    Ok(table)
}

fn riesz_table(rc: &RunConfig) -> Result<Table, String> {
    let alpha = rc.alpha.ok_or("riesz requires --alpha")?;
    if rc.p.is_empty() {
        let (mu, n) = load_mu_complex(rc)?;
        let mut table = grid_table(rc, "riesz", n, &["value"], |z| {
            Ok(vec![Cell::F(
                riesz_j(&mu, z, alpha).map_err(|e| e.to_string())?,
            )])
        })?;
        table.push_meta("alpha", json!(alpha));
        return Ok(table);
    }
    // Probe mode: p-th power masses of J over refining grids on a fixed box.
    let mu = load_mu(rc)?;
    let probe =
        lp_threshold_probe(&mu, alpha, &rc.p, &rc.resolutions).map_err(|e| e.to_string())?;
    let mut table = Table::new(
        "riesz",
        vec!["p", "resolution", "norm", "ratio", "diagnosis"],
    );
    table.push_meta("alpha", json!(alpha));
    table.push_meta("box_center", json!(probe.box_center));
    table.push_meta("box_half_width", json!(probe.box_half_width));
    let last_res = *rc.resolutions.last().expect("validated nonempty");
    for row in &probe.rows {
        let diagnosis = if row.resolution == last_res {
            probe
                .diagnosis(row.p)
                .map(|d| Cell::S(d.into()))
                .unwrap_or(Cell::Empty)
        } else {
            Cell::Empty
        };
        table.push(vec![
            Cell::F(row.p),
            Cell::I(row.resolution as i64),
            Cell::F(row.norm),
            row.ratio.map(Cell::F).unwrap_or(Cell::Empty),
            diagnosis,
        ]);
    }
    Ok(table)
}

fn dimension_table(rc: &RunConfig) -> Result<Table, String> {
    let mu = load_mu(rc)?;
    let (r_lo, r_hi) = match rc.radii.as_slice() {
        [] => (0.01, 0.3),
        [lo, hi, ..] => (*lo, *hi),
        [_] => return Err("dimension needs --radii r_lo,r_hi".into()),
    };
    let est = projlog_core::measures::dimension_estimate(&mu, r_lo, r_hi, rc.num_radii)
        .map_err(|e| e.to_string())?;
    let mut table = Table::new(
        "dimension",
        vec!["r_lo", "r_hi", "num_radii", "gamma", "residual", "flat"],
    );
    table.push_meta("samples", json!(mu.len()));
    table.push(vec![
        Cell::F(r_lo),
        Cell::F(r_hi),
        Cell::I(rc.num_radii as i64),
        Cell::F(est.gamma),
        Cell::F(est.residual),
        Cell::I(est.flat as i64),
    ]);
    Ok(table)
}

fn exponents_table(rc: &RunConfig) -> Result<Table, String> {
    let gamma = rc.gamma.ok_or("exponents requires --gamma")?;
    let n = rc.n.ok_or("exponents requires --n")?;
    let report = critical_exponents(gamma, n, 2 * n, rc.alpha).map_err(|e| e.to_string())?;
    let mut table = Table::new(
        "exponents",
        vec![
            "gamma",
            "n",
            "ambient",
            "p1_star",
            "alpha_star",
            "p2_star",
            "q_star",
            "alpha",
            "riesz_p_star",
        ],
    );
    table.push(vec![
        Cell::F(report.gamma),
        Cell::I(report.n as i64),
        Cell::I(report.ambient as i64),
        Cell::F(report.p1_star),
        Cell::F(report.alpha_star),
        Cell::F(report.p2_star),
        Cell::F(report.q_star),
        report.alpha.map(Cell::F).unwrap_or(Cell::Empty),
        report.riesz_p_star.map(Cell::F).unwrap_or(Cell::Empty),
    ]);
    Ok(table)
}

fn constants_table() -> Result<Table, String> {
    let mut table = Table::new("constants", vec!["name", "n", "value", "crosscheck"]);
    for n in 1..=3usize {
        table.push(vec![
            Cell::S("alpha_n".into()),
            Cell::I(n as i64),
            Cell::F(alpha_n(n).map_err(|e| e.to_string())?),
            Cell::F(1.0 / (2.0 * n as f64)),
        ]);
    }
    for n in 1..=3usize {
        table.push(vec![
            Cell::S("ma_normalization".into()),
            Cell::I(n as i64),
            Cell::F(MaNormalization::for_dim(n).map_err(|e| e.to_string())?.cma),
            Cell::Empty,
        ]);
    }
    table.push(vec![
        Cell::S("gradient_bound_coefficient".into()),
        Cell::Empty,
        Cell::F(std::f64::consts::SQRT_2 / 2.0),
        Cell::Empty,
    ]);
    table.push(vec![
        Cell::S("hessian_entry_bound_coefficient".into()),
        Cell::Empty,
        Cell::F(2.0 * projlog_core::kernels::HESSIAN_ENTRY_CONST),
        Cell::Empty,
    ]);
    Ok(table)
}
