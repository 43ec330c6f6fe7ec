//! Command-line interface: validation, tables, diagrams, simulations and
//! ergodic measurements over a JSON-configured polygon/potential pair.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain/validation error, 3 I/O
//! error. Outputs are deterministic for a fixed seed and independent of the
//! worker count.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::process::ExitCode;

use impact_billiards::ergodic::{equidistribution_test, sample_phase_points, GridSpec};
use impact_billiards::flow::{physical_flow, LevelSet, PhaseState};
use impact_billiards::geometry::{genus, StarPolygon};
use impact_billiards::iembd;
use impact_billiards::parallel::map_indices;
use impact_billiards::potential::{Potential, SampleGrid};
use impact_billiards::quadrature::QuadratureSpec;
use impact_billiards::resonance::{
    classify_u, delta_colour, scenario, Colour, ResonanceSpec, Scenario, UKind,
};
use impact_billiards::svg::SvgCanvas;
use impact_billiards::{action_angle, Error as CoreError};

enum CliError {
    Usage(String),
    Domain(String),
    Io(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Domain(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

const USAGE: &str = "\
impact-billiards <command> [flags]

commands:
  validate     --config <file>
  psi-table    --config <file> [--which v1|v2] (--E <val> | --e-min --e-max --e-steps) [--x-steps N] [--out file]
  genus        --config <file> --E <val> --e1-steps N [--out file]
  iembd        --config <file> --emax <val> --res N --out out.svg,out.csv
  resonance    --config <file> --m M --n N --c C --E <val> [--grid-points N] --out scenario.csv
  simulate     --config <file> --E <val> --E1 <val> --start \"x,y,sx,sy\" --t <time> --sample-dt <dt> --out traj.csv [--events-out file] [--dt-ctrl h]
  ergodic-test --config <file> --E <val> --E1 <val> --T <time> [--grid N] [--starts N] [--seed S] [--tol e] [--out-json f] [--out-csv f] [--out-svg f]
  sweep        --config <file> --E <val> --e1-steps N [--m M --n N --c C] [--seed S] [--workers W] [--out file]

config JSON:
  {\"polygon\": {\"quadrants\": {\"++\": {\"xs\": [..], \"ys\": [..]}, \"-+\": .., \"--\": .., \"+-\": ..}},
   \"v1\": {\"kind\": \"quadratic\", \"omega\": 1.0},
   \"v2\": {\"kind\": \"even_poly\", \"coeffs\": [0.5, 1.0]}}
  potential kinds: quadratic {omega}, even_poly {coeffs of x^2, x^4, ...},
  exp_glued {m} for |x|^m e^(-1/|x|)
";

struct Flags {
    values: BTreeMap<String, String>,
}

impl Flags {
    fn parse(args: &[String], allowed: &[&str]) -> CliResult<Flags> {
        let mut values = BTreeMap::new();
        let mut i = 0;
        while i < args.len() {
            let a = &args[i];
            let Some(name) = a.strip_prefix("--") else {
                return Err(CliError::Usage(format!("unexpected argument '{a}'")));
            };
            if !allowed.contains(&name) {
                return Err(CliError::Usage(format!("unknown flag --{name}")));
            }
            let Some(v) = args.get(i + 1) else {
                return Err(CliError::Usage(format!("flag --{name} needs a value")));
            };
            values.insert(name.to_string(), v.clone());
            i += 2;
        }
        Ok(Flags { values })
    }

    fn get(&self, name: &str) -> Option<&str> {
        self.values.get(name).map(|s| s.as_str())
    }

    fn require(&self, name: &str) -> CliResult<&str> {
        self.get(name)
            .ok_or_else(|| CliError::Usage(format!("missing required flag --{name}")))
    }

    fn f64_of(&self, name: &str) -> CliResult<f64> {
        self.require(name)?
            .parse()
            .map_err(|_| CliError::Usage(format!("--{name} must be a number")))
    }

    fn f64_opt(&self, name: &str, default: f64) -> CliResult<f64> {
        match self.get(name) {
            None => Ok(default),
            Some(s) => s
                .parse()
                .map_err(|_| CliError::Usage(format!("--{name} must be a number"))),
        }
    }

    fn usize_of(&self, name: &str) -> CliResult<usize> {
        self.require(name)?
            .parse()
            .map_err(|_| CliError::Usage(format!("--{name} must be a positive integer")))
    }

    fn usize_opt(&self, name: &str, default: usize) -> CliResult<usize> {
        match self.get(name) {
            None => Ok(default),
            Some(s) => s
                .parse()
                .map_err(|_| CliError::Usage(format!("--{name} must be a positive integer"))),
        }
    }

    fn u64_opt(&self, name: &str, default: u64) -> CliResult<u64> {
        match self.get(name) {
            None => Ok(default),
            Some(s) => s
                .parse()
                .map_err(|_| CliError::Usage(format!("--{name} must be an integer"))),
        }
    }
}

#[derive(serde::Deserialize)]
struct Config {
    polygon: StarPolygon,
    v1: Option<Potential>,
    v2: Option<Potential>,
}

fn load_config(path: &str) -> CliResult<Config> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::Domain(format!("bad config {path}: {e}")))
}

fn potentials(cfg: &Config) -> CliResult<(Potential, Potential)> {
    match (&cfg.v1, &cfg.v2) {
        (Some(a), Some(b)) => Ok((a.clone(), b.clone())),
        _ => Err(CliError::Domain(
            "config must declare v1 and v2 for this command".to_string(),
        )),
    }
}

fn write_out(path: &str, content: &str) -> CliResult<()> {
    std::fs::write(path, content).map_err(|e| CliError::Io(format!("cannot write {path}: {e}")))
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n\n{USAGE}");
            ExitCode::from(1)
        }
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn dispatch(args: &[String]) -> CliResult<()> {
    let Some(cmd) = args.first() else {
        return Err(CliError::Usage("no command given".to_string()));
    };
    let rest = &args[1..];
    match cmd.as_str() {
        "validate" => cmd_validate(rest),
        "psi-table" => cmd_psi_table(rest),
        "genus" => cmd_genus(rest),
        "iembd" => cmd_iembd(rest),
        "resonance" => cmd_resonance(rest),
        "simulate" => cmd_simulate(rest),
        "ergodic-test" => cmd_ergodic_test(rest),
        "sweep" => cmd_sweep(rest),
        other => Err(CliError::Usage(format!("unknown command '{other}'"))),
    }
}

fn cmd_validate(args: &[String]) -> CliResult<()> {
    let f = Flags::parse(args, &["config"])?;
    let cfg = load_config(f.require("config")?)?;
    cfg.polygon.validate()?;
    println!(
        "polygon ok: steps per quadrant = {:?}, {} steps total",
        impact_billiards::geometry::Quadrant::ALL
            .iter()
            .map(|&q| cfg.polygon.quadrant(q).k())
            .collect::<Vec<_>>(),
        cfg.polygon.total_steps()
    );
    for (name, p) in [("v1", &cfg.v1), ("v2", &cfg.v2)] {
        if let Some(p) = p {
            let hi = p.x_max(10.0).unwrap_or(10.0).max(1.0);
            p.check_unimodal(SampleGrid::new(hi, 2000)?)?;
            let sc = p.check_square_convex(SampleGrid::new(hi, 2000)?);
            println!(
                "{name} ok: monotone confining well; square-convex = {}, strictly = {}",
                sc.satisfies_v, sc.satisfies_vi
            );
        }
    }
    Ok(())
}

fn cmd_psi_table(args: &[String]) -> CliResult<()> {
    let f = Flags::parse(
        args,
        &[
            "config", "which", "E", "e-min", "e-max", "e-steps", "x-steps", "out",
        ],
    )?;
    let cfg = load_config(f.require("config")?)?;
    let (v1, v2) = potentials(&cfg)?;
    let p = match f.get("which").unwrap_or("v1") {
        "v1" => v1,
        "v2" => v2,
        other => {
            return Err(CliError::Usage(format!(
                "--which must be v1 or v2, got {other}"
            )))
        }
    };
    let energies: Vec<f64> = if f.get("E").is_some() {
        vec![f.f64_of("E")?]
    } else {
        let lo = f.f64_of("e-min")?;
        let hi = f.f64_of("e-max")?;
        let n = f.usize_of("e-steps")?;
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64)
            .collect()
    };
    let x_steps = f.usize_opt("x-steps", 64)?;
    let q = QuadratureSpec::default();
    let mut out = String::from("x,E,psi,dpsi_dE\n");
    for &e in &energies {
        let xm = p.x_max(e)?;
        for i in 0..=x_steps {
            let x = xm * i as f64 / x_steps as f64;
            let ps = action_angle::psi(&p, x, e, q)?;
            let d = if e - p.eval(x) > 1e-12 * e {
                format!("{}", action_angle::dpsi_de(&p, x, e, q)?)
            } else {
                "-inf".to_string()
            };
            let _ = writeln!(out, "{x},{e},{ps},{d}");
        }
    }
    match f.get("out") {
        Some(path) => write_out(path, &out)?,
        None => print!("{out}"),
    }
    Ok(())
}

fn cmd_genus(args: &[String]) -> CliResult<()> {
    let f = Flags::parse(args, &["config", "E", "e1-steps", "out"])?;
    let cfg = load_config(f.require("config")?)?;
    let (v1, v2) = potentials(&cfg)?;
    let e = f.f64_of("E")?;
    let steps = f.usize_of("e1-steps")?;
    let rows = map_indices(steps, |i| {
        let e1 = e * (i + 1) as f64 / (steps + 1) as f64;
        genus(&cfg.polygon, &v1, &v2, e, e1).map(|g| (e1, g))
    });
    let mut out = String::from("E1,genus\n");
    for r in rows {
        let (e1, g) = r?;
        let _ = writeln!(out, "{e1},{g}");
    }
    match f.get("out") {
        Some(path) => write_out(path, &out)?,
        None => print!("{out}"),
    }
    Ok(())
}

fn cmd_iembd(args: &[String]) -> CliResult<()> {
    let f = Flags::parse(args, &["config", "emax", "res", "out"])?;
    let cfg = load_config(f.require("config")?)?;
    let (v1, v2) = potentials(&cfg)?;
    let emax = f.f64_of("emax")?;
    let res = f.usize_of("res")?;
    let d = iembd::diagram(&cfg.polygon, &v1, &v2, emax, res)?;
    for path in f.require("out")?.split(',') {
        let path = path.trim();
        if path.ends_with(".svg") {
            write_out(path, &d.to_svg(900.0, 900.0))?;
        } else if path.ends_with(".csv") {
            write_out(path, &d.to_csv())?;
        } else {
            return Err(CliError::Usage(format!(
                "--out entries must end in .svg or .csv, got {path}"
            )));
        }
    }
    println!(
        "diagram: {} wedges, {} cells",
        d.wedges.len(),
        d.cells.len()
    );
    Ok(())
}

fn scenario_name(s: Scenario) -> &'static str {
    match s {
        Scenario::Ue => "ue",
        Scenario::Cp => "cp",
        Scenario::Coex => "coex",
        Scenario::UeExtremal => "ue_extremal",
        Scenario::Unknown => "unknown",
    }
}

fn cmd_resonance(args: &[String]) -> CliResult<()> {
    let f = Flags::parse(args, &["config", "m", "n", "c", "E", "grid-points", "out"])?;
    let cfg = load_config(f.require("config")?)?;
    let m = f.usize_of("m")? as u32;
    let n = f.usize_of("n")? as u32;
    let c = f.f64_of("c")?;
    let e = f.f64_of("E")?;
    let grid_points = f.usize_opt("grid-points", 1000)?;
    let spec = ResonanceSpec::new(m, n, c)?;
    spec.check_consistency(QuadratureSpec::default())?;
    let (v1, v2) = (spec.v1(), spec.v2());
    let polygon = &cfg.polygon;
    let part = iembd::partition(polygon, &v1, &v2, e)?;
    let intimp = iembd::interior_impact_set(polygon, &v1, &v2, e);

    let mut out = String::from("e1_lo,e1_hi,scenario,genus,delta_green,delta_red,periodic_frac\n");
    let mut emit = |lo: f64, hi: f64, g: usize| -> CliResult<()> {
        let mid = 0.5 * (lo + hi);
        let sc = scenario(polygon, &v1, &v2, e, (lo, hi), Some(spec))?;
        let (dg, dr) = (
            delta_colour(polygon, spec, e, mid, Colour::Green)?,
            delta_colour(polygon, spec, e, mid, Colour::Red)?,
        );
        let pf = if sc == Scenario::Coex {
            format!(
                "{}",
                (std::f64::consts::PI - dg - dr) / std::f64::consts::PI
            )
        } else {
            String::new()
        };
        let _ = writeln!(out, "{lo},{hi},{},{g},{dg},{dr},{pf}", scenario_name(sc));
        Ok(())
    };
    for iv in &part.intervals {
        let inside_intimp = intimp.iter().any(|&(a, b)| iv.lo >= a && iv.hi <= b);
        if inside_intimp {
            for sub in classify_u(polygon, spec, e, (iv.lo, iv.hi), grid_points)? {
                debug_assert!(matches!(sub.kind, UKind::UPlus | UKind::UMinus));
                emit(sub.lo, sub.hi, iv.genus)?;
            }
        } else {
            emit(iv.lo, iv.hi, iv.genus)?;
        }
    }
    match f.get("out") {
        Some(path) => write_out(path, &out)?,
        None => print!("{out}"),
    }
    Ok(())
}

fn cmd_simulate(args: &[String]) -> CliResult<()> {
    let f = Flags::parse(
        args,
        &[
            "config",
            "E",
            "E1",
            "start",
            "t",
            "sample-dt",
            "out",
            "events-out",
            "dt-ctrl",
        ],
    )?;
    let cfg = load_config(f.require("config")?)?;
    let (v1, v2) = potentials(&cfg)?;
    let e = f.f64_of("E")?;
    let e1 = f.f64_of("E1")?;
    let t_end = f.f64_of("t")?;
    let sample_dt = f.f64_of("sample-dt")?;
    let dt_ctrl = f.f64_opt("dt-ctrl", 0.01)?;
    let start_spec = f.require("start")?;
    let parts: Vec<f64> = start_spec
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage("--start must be \"x,y,sx,sy\"".to_string()))?;
    if parts.len() != 4 {
        return Err(CliError::Usage("--start must be \"x,y,sx,sy\"".to_string()));
    }
    let level = LevelSet::new(cfg.polygon, v1, v2, e, e1, QuadratureSpec::default())?;
    let start = PhaseState::from_position(
        parts[0], parts[1], parts[2], parts[3], &level.v1, &level.v2, e, e1,
    )?;
    let traj = physical_flow(&level, &start, t_end, dt_ctrl, Some(sample_dt))?;
    let mut out = String::from("t,x,y,px,py\n");
    for (t, s) in &traj.samples {
        let _ = writeln!(out, "{t},{},{},{},{}", s.x, s.y, s.px, s.py);
    }
    write_out(f.require("out")?, &out)?;
    if let Some(path) = f.get("events-out") {
        let boundary = level.table.boundary_xy();
        let mut ev = String::from("index,t,wall,quadrant,axis,extremal_side\n");
        for (i, event) in traj.events.iter().enumerate() {
            let w = &boundary.walls[event.wall];
            let _ = writeln!(
                ev,
                "{i},{},{},{},{},{}",
                event.time,
                w.id,
                w.quadrant.label(),
                match w.axis {
                    impact_billiards::geometry::WallAxis::Vertical => "v",
                    impact_billiards::geometry::WallAxis::Horizontal => "h",
                },
                w.extremal_side as u8
            );
        }
        write_out(path, &ev)?;
    }
    println!(
        "simulated to t = {}: {} samples, {} impacts, termination {:?}",
        traj.end_time,
        traj.samples.len(),
        traj.events.len(),
        traj.termination
    );
    Ok(())
}

fn heat_panel(
    canvas: &mut SvgCanvas,
    grid: &GridSpec,
    values: &[f64],
    v_hi: f64,
    x_off: f64,
    label: &str,
) {
    let (nx, ny) = (grid.nx, grid.ny);
    for j in 0..ny {
        for i in 0..nx {
            let v = (values[j * nx + i] / v_hi).clamp(0.0, 1.0);
            let r = (255.0 * v) as u8;
            let b = (255.0 * (1.0 - v)) as u8;
            let fill = format!("#{r:02x}40{b:02x}");
            canvas.rect(
                x_off + i as f64,
                j as f64,
                x_off + (i + 1) as f64,
                (j + 1) as f64,
                &fill,
                1.0,
            );
        }
    }
    canvas.text(x_off + 1.0, ny as f64 + 1.0, 10.0, label);
}

fn cmd_ergodic_test(args: &[String]) -> CliResult<()> {
    let f = Flags::parse(
        args,
        &[
            "config", "E", "E1", "T", "grid", "starts", "seed", "tol", "out-json", "out-csv",
            "out-svg",
        ],
    )?;
    let cfg = load_config(f.require("config")?)?;
    let (v1, v2) = potentials(&cfg)?;
    let e = f.f64_of("E")?;
    let e1 = f.f64_of("E1")?;
    let horizon = f.f64_of("T")?;
    let n_grid = f.usize_opt("grid", 64)?;
    let n_starts = f.usize_opt("starts", 32)?;
    let seed = f.u64_opt("seed", 0)?;
    let tol = f.f64_opt("tol", 5e-2)?;
    let level = LevelSet::new(cfg.polygon, v1, v2, e, e1, QuadratureSpec::default())?;
    let starts = sample_phase_points(&level, n_starts, seed)?;
    let grid = GridSpec::over_level_set(&level, n_grid, n_grid)?;
    let rep = equidistribution_test(&level, &starts, &grid, horizon, tol)?;

    let summary = serde_json::json!({
        "sup_cell_error": rep.sup_cell_error,
        "passed": rep.passed,
        "tolerance": rep.tolerance,
        "total_time": rep.total_time,
        "starts": n_starts,
        "grid": n_grid,
        "seed": seed,
    });
    let json_text = format!("{}\n", serde_json::to_string_pretty(&summary).unwrap());
    match f.get("out-json") {
        Some(path) => write_out(path, &json_text)?,
        None => print!("{json_text}"),
    }
    if let Some(path) = f.get("out-csv") {
        let mut out = String::from("i,j,x,y,empirical,reference\n");
        for idx in 0..grid.n_cells() {
            let (x, y) = grid.cell_center(idx);
            let _ = writeln!(
                out,
                "{},{},{x},{y},{},{}",
                idx % grid.nx,
                idx / grid.nx,
                rep.empirical.weights[idx],
                rep.reference.weights[idx]
            );
        }
        write_out(path, &out)?;
    }
    if let Some(path) = f.get("out-svg") {
        let nx = grid.nx as f64;
        let ny = grid.ny as f64;
        let mut canvas = SvgCanvas::new(960.0, 340.0, (0.0, 3.0 * nx + 20.0), (0.0, ny + 4.0));
        let v_hi = rep.reference.weights.iter().cloned().fold(0.0f64, f64::max);
        heat_panel(
            &mut canvas,
            &grid,
            &rep.empirical.weights,
            v_hi,
            0.0,
            "empirical",
        );
        heat_panel(
            &mut canvas,
            &grid,
            &rep.reference.weights,
            v_hi,
            nx + 10.0,
            "invariant",
        );
        let ratio: Vec<f64> = rep
            .empirical
            .weights
            .iter()
            .zip(rep.reference.weights.iter())
            .map(|(a, b)| if *b > 0.0 { a / b / 2.0 } else { 0.0 })
            .collect();
        heat_panel(
            &mut canvas,
            &grid,
            &ratio,
            1.0,
            2.0 * (nx + 10.0),
            "ratio/2",
        );
        write_out(path, &canvas.render())?;
    }
    Ok(())
}

fn cmd_sweep(args: &[String]) -> CliResult<()> {
    let f = Flags::parse(
        args,
        &[
            "config", "E", "e1-steps", "m", "n", "c", "seed", "workers", "out",
        ],
    )?;
    let cfg = load_config(f.require("config")?)?;
    let _seed = f.u64_opt("seed", 0)?;
    if let Some(w) = f.get("workers") {
        configure_workers(w)?;
    }
    let e = f.f64_of("E")?;
    let steps = f.usize_of("e1-steps")?;
    let spec = match (f.get("m"), f.get("n"), f.get("c")) {
        (None, None, None) => None,
        _ => Some(ResonanceSpec::new(
            f.usize_of("m")? as u32,
            f.usize_of("n")? as u32,
            f.f64_of("c")?,
        )?),
    };
    let (v1, v2) = match spec {
        Some(s) => (s.v1(), s.v2()),
        None => potentials(&cfg)?,
    };
    let polygon = cfg.polygon;
    let rows = map_indices(steps, |i| -> Result<String, CoreError> {
        let e1 = e * (i + 1) as f64 / (steps + 1) as f64;
        let g = genus(&polygon, &v1, &v2, e, e1)?;
        match spec {
            None => Ok(format!("{e1},{g},,,")),
            Some(s) => {
                let dg = delta_colour(&polygon, s, e, e1, Colour::Green)?;
                let dr = delta_colour(&polygon, s, e, e1, Colour::Red)?;
                let sign = if dg + dr > std::f64::consts::PI {
                    "U+"
                } else {
                    "U-"
                };
                Ok(format!("{e1},{g},{dg},{dr},{sign}"))
            }
        }
    });
    let mut out = String::from("E1,genus,delta_green,delta_red,u_sign\n");
    for r in rows {
        out.push_str(&r?);
        out.push('\n');
    }
    match f.get("out") {
        Some(path) => write_out(path, &out)?,
        None => print!("{out}"),
    }
    Ok(())
}

#[cfg(feature = "parallel")]
fn configure_workers(w: &str) -> CliResult<()> {
    let n: usize = w
        .parse()
        .map_err(|_| CliError::Usage("--workers must be a positive integer".to_string()))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n.max(1))
        .build_global()
        .map_err(|e| CliError::Domain(format!("worker pool: {e}")))
}

#[cfg(not(feature = "parallel"))]
fn configure_workers(_w: &str) -> CliResult<()> {
    eprintln!("note: built without the parallel feature; --workers ignored");
    Ok(())
}
