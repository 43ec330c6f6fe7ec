//! Ergodic statistics on one level set: the invariant configuration-space
//! density, time-weighted occupancy of simulated orbits, Birkhoff averages,
//! equidistribution tests, periodicity detection and the per-colour
//! occupancy analysis of resonant coexistence regimes.
//!
//! The invariant measure projects to the configuration space with density
//! g(x, y) proportional to [(E1 - V1(x)) (E - E1 - V2(y))]^(-1/2) on P ∩ R,
//! which diverges (integrably) on the rectangle boundary. Cell masses are
//! computed exactly through the travel-time antiderivative
//! ∫ dx (E1 - V1)^(-1/2) = sqrt(2) psi(x), so edge cells need no special
//! casing.

use crate::error::Error;
use crate::flow::{
    billiard_flow_on, first_impact, psi_sigma_from_theta, LevelSet, PsiState, Termination,
    Trajectory,
};
use crate::geometry::Quadrant;
use crate::parallel::map_indices;
use crate::resonance::{Colour, ColourPartition, ResonanceSpec};
use crate::rng::member_rng;
use rand::Rng;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// A rectangular cell mesh over the level-set rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl GridSpec {
    /// Mesh covering the projected rectangle of the level set.
    pub fn over_level_set(level: &LevelSet, nx: usize, ny: usize) -> Result<GridSpec, Error> {
        if nx == 0 || ny == 0 {
            return Err(Error::validation("grid needs at least one cell per axis"));
        }
        let xm = level.v1.x_max(level.partial)?;
        let ym = level.v2.x_max(level.e2())?;
        Ok(GridSpec {
            nx,
            ny,
            x_lo: -xm,
            x_hi: xm,
            y_lo: -ym,
            y_hi: ym,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn cell_of(&self, x: f64, y: f64) -> Option<usize> {
        if x < self.x_lo || x > self.x_hi || y < self.y_lo || y > self.y_hi {
            return None;
        }
        let i = (((x - self.x_lo) / (self.x_hi - self.x_lo) * self.nx as f64) as usize)
            .min(self.nx - 1);
        let j = (((y - self.y_lo) / (self.y_hi - self.y_lo) * self.ny as f64) as usize)
            .min(self.ny - 1);
        Some(j * self.nx + i)
    }

    pub fn cell_bounds(&self, idx: usize) -> (f64, f64, f64, f64) {
        let i = idx % self.nx;
        let j = idx / self.nx;
        let dx = (self.x_hi - self.x_lo) / self.nx as f64;
        let dy = (self.y_hi - self.y_lo) / self.ny as f64;
        (
            self.x_lo + i as f64 * dx,
            self.x_lo + (i + 1) as f64 * dx,
            self.y_lo + j as f64 * dy,
            self.y_lo + (j + 1) as f64 * dy,
        )
    }

    pub fn cell_center(&self, idx: usize) -> (f64, f64) {
        let (x0, x1, y0, y1) = self.cell_bounds(idx);
        (0.5 * (x0 + x1), 0.5 * (y0 + y1))
    }
}

/// Normalized cell weights on a grid.
#[derive(Debug, Clone)]
pub struct EmpiricalMeasure {
    pub grid: GridSpec,
    pub weights: Vec<f64>,
}

/// Unnormalized invariant cell masses and their total. Cells are cut along
/// the polygon's wall lines, every sub-rectangle is integrated exactly via
/// the travel-time antiderivative, and pieces outside P are dropped.
pub fn liouville_cells(level: &LevelSet, grid: &GridSpec) -> Result<(Vec<f64>, f64), Error> {
    let e1 = level.partial;
    let e2 = level.e2();
    let xm = level.v1.x_max(e1)?;
    let ym = level.v2.x_max(e2)?;
    // signed antiderivative F(x) = sqrt(2) sign(x) psi(|x|)
    let f1 = |x: f64| -> Result<f64, Error> {
        let c = x.clamp(-xm, xm);
        Ok(SQRT_2 * c.signum() * crate::action_angle::psi(&level.v1, c.abs(), e1, level.quad)?)
    };
    let f2 = |y: f64| -> Result<f64, Error> {
        let c = y.clamp(-ym, ym);
        Ok(SQRT_2 * c.signum() * crate::action_angle::psi(&level.v2, c.abs(), e2, level.quad)?)
    };
    // wall lines of the polygon (both signs)
    let mut x_cuts: Vec<f64> = level.polygon.all_x();
    x_cuts.extend(level.polygon.all_x().iter().map(|v| -v));
    let mut y_cuts: Vec<f64> = level.polygon.all_y();
    y_cuts.extend(level.polygon.all_y().iter().map(|v| -v));

    let mut weights = vec![0.0; grid.n_cells()];
    let mut total = 0.0;
    for (idx, w) in weights.iter_mut().enumerate() {
        let (x0, x1, y0, y1) = grid.cell_bounds(idx);
        let mut xs = vec![x0.max(-xm), x1.min(xm)];
        if xs[0] >= xs[1] {
            continue;
        }
        for &c in &x_cuts {
            if c > xs[0] && c < xs[1] {
                xs.push(c);
            }
        }
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut ys = vec![y0.max(-ym), y1.min(ym)];
        if ys[0] >= ys[1] {
            continue;
        }
        for &c in &y_cuts {
            if c > ys[0] && c < ys[1] {
                ys.push(c);
            }
        }
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut mass = 0.0;
        for xw in xs.windows(2) {
            for yw in ys.windows(2) {
                let cx = 0.5 * (xw[0] + xw[1]);
                let cy = 0.5 * (yw[0] + yw[1]);
                if level.polygon.contains(cx, cy) {
                    mass += (f1(xw[1])? - f1(xw[0])?) * (f2(yw[1])? - f2(yw[0])?);
                }
            }
        }
        *w = mass;
        total += mass;
    }
    Ok((weights, total))
}

/// Normalized invariant cell measure.
pub fn liouville_density(level: &LevelSet, grid: &GridSpec) -> Result<EmpiricalMeasure, Error> {
    let (mut weights, total) = liouville_cells(level, grid)?;
    if !(total > 0.0) {
        return Err(Error::domain(
            "level set has empty configuration area".to_string(),
        ));
    }
    for w in &mut weights {
        *w /= total;
    }
    Ok(EmpiricalMeasure {
        grid: *grid,
        weights,
    })
}

/// Precomputed travel-time coordinates of the grid lines, enabling exact
/// per-cell time deposits: within one billiard segment each coordinate moves
/// linearly and monotonically, so cell-boundary crossing times are exact.
#[derive(Debug, Clone)]
pub struct CellCrossings {
    grid: GridSpec,
    /// Signed psi of the interior vertical grid lines (length nx - 1),
    /// strictly increasing.
    psi_x: Vec<f64>,
    /// Signed psi of the interior horizontal grid lines (length ny - 1).
    psi_y: Vec<f64>,
}

impl CellCrossings {
    pub fn new(level: &LevelSet, grid: &GridSpec) -> Result<CellCrossings, Error> {
        let e1 = level.partial;
        let e2 = level.e2();
        let xm = level.v1.x_max(e1)?;
        let ym = level.v2.x_max(e2)?;
        let mut psi_x = Vec::with_capacity(grid.nx - 1);
        for i in 1..grid.nx {
            let x =
                (grid.x_lo + (grid.x_hi - grid.x_lo) * i as f64 / grid.nx as f64).clamp(-xm, xm);
            psi_x.push(x.signum() * crate::action_angle::psi(&level.v1, x.abs(), e1, level.quad)?);
        }
        let mut psi_y = Vec::with_capacity(grid.ny - 1);
        for j in 1..grid.ny {
            let y =
                (grid.y_lo + (grid.y_hi - grid.y_lo) * j as f64 / grid.ny as f64).clamp(-ym, ym);
            psi_y.push(y.signum() * crate::action_angle::psi(&level.v2, y.abs(), e2, level.quad)?);
        }
        Ok(CellCrossings {
            grid: *grid,
            psi_x,
            psi_y,
        })
    }

    fn x_index(&self, p1: f64) -> usize {
        self.psi_x.partition_point(|&v| v < p1)
    }

    fn y_index(&self, p2: f64) -> usize {
        self.psi_y.partition_point(|&v| v < p2)
    }
}

/// Deposits the exact time-in-cell of every linear segment of a billiard
/// trajectory (configuration-space cells, true time weights). Returns the
/// total deposited time.
pub fn deposit_occupancy(
    marks: &CellCrossings,
    traj: &Trajectory,
    weights: &mut [f64],
) -> Result<f64, Error> {
    let grid = &marks.grid;
    let mut deposited = 0.0;
    for (t0, t1, pos, dir) in traj.segments() {
        let span = t1 - t0;
        if span <= 0.0 {
            continue;
        }
        let mut i = marks.x_index(pos.0);
        let mut j = marks.y_index(pos.1);
        let mut t = 0.0f64;
        loop {
            let cur1 = pos.0 + dir.0 * t;
            let cur2 = pos.1 + dir.1 * t;
            // time to the next grid line in the direction of travel
            let t_nx = if dir.0 > 0.0 {
                if i < marks.psi_x.len() {
                    marks.psi_x[i] - cur1
                } else {
                    f64::INFINITY
                }
            } else if i > 0 {
                cur1 - marks.psi_x[i - 1]
            } else {
                f64::INFINITY
            };
            let t_ny = if dir.1 > 0.0 {
                if j < marks.psi_y.len() {
                    marks.psi_y[j] - cur2
                } else {
                    f64::INFINITY
                }
            } else if j > 0 {
                cur2 - marks.psi_y[j - 1]
            } else {
                f64::INFINITY
            };
            let step = t_nx.min(t_ny).max(0.0);
            let t_hit = (t + step).min(span);
            weights[j * grid.nx + i] += t_hit - t;
            deposited += t_hit - t;
            if t_hit >= span {
                break;
            }
            if t_nx <= t_ny {
                if dir.0 > 0.0 {
                    i += 1;
                } else {
                    i -= 1;
                }
            } else if dir.1 > 0.0 {
                j += 1;
            } else {
                j -= 1;
            }
            t = t_hit;
        }
    }
    Ok(deposited)
}

/// Time average of a configuration-space observable along a trajectory,
/// with true time weights. A corner death is an error carrying the reached
/// time: the average over a clipped orbit is not the intended limit.
pub fn birkhoff_average<F: Fn(f64, f64) -> f64>(
    level: &LevelSet,
    traj: &Trajectory,
    f: F,
    dt: f64,
) -> Result<f64, Error> {
    if let Termination::CornerDeath { time, .. } = traj.termination {
        return Err(Error::domain(format!(
            "trajectory died at a corner at t = {time}; average undefined"
        )));
    }
    let mut acc = 0.0;
    let mut total = 0.0;
    for (t0, t1, pos, dir) in traj.segments() {
        let span = t1 - t0;
        if span <= 0.0 {
            continue;
        }
        let steps = (span / dt).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        for k in 0..steps {
            let tm = (k as f64 + 0.5) * h;
            let ps = PsiState {
                p1: pos.0 + dir.0 * tm,
                p2: pos.1 + dir.1 * tm,
                s1: dir.0,
                s2: dir.1,
            };
            let s = level.from_psi(&ps)?;
            acc += f(s.x, s.y) * h;
            total += h;
        }
    }
    Ok(acc / total)
}

#[derive(Debug, Clone)]
pub struct EquidistributionReport {
    pub sup_cell_error: f64,
    pub passed: bool,
    pub tolerance: f64,
    pub total_time: f64,
    pub empirical: EmpiricalMeasure,
    pub reference: EmpiricalMeasure,
}

/// Runs the ensemble for time `horizon` each, merges the time-weighted
/// occupancies in member order, and compares cellwise against the invariant
/// measure. The error is reported in units of the uniform cell mass
/// (sup |empirical - reference| times the cell count), so a measure
/// concentrating on a curve fails loudly.
pub fn equidistribution_test(
    level: &LevelSet,
    starts: &[PsiState],
    grid: &GridSpec,
    horizon: f64,
    tolerance: f64,
) -> Result<EquidistributionReport, Error> {
    let reference = liouville_density(level, grid)?;
    let boundary = level.table.boundary_psi();
    let marks = CellCrossings::new(level, grid)?;
    let runs = map_indices(starts.len(), |i| -> Result<(Vec<f64>, f64), Error> {
        let traj = billiard_flow_on(&boundary, &level.table, &starts[i], horizon)?;
        let mut w = vec![0.0; grid.n_cells()];
        let t = deposit_occupancy(&marks, &traj, &mut w)?;
        Ok((w, t))
    });
    let mut weights = vec![0.0; grid.n_cells()];
    let mut total_time = 0.0;
    for r in runs {
        let (w, t) = r?;
        for (acc, v) in weights.iter_mut().zip(w) {
            *acc += v;
        }
        total_time += t;
    }
    if !(total_time > 0.0) {
        return Err(Error::domain("ensemble produced no occupancy".to_string()));
    }
    for w in &mut weights {
        *w /= total_time;
    }
    let n = grid.n_cells() as f64;
    let sup = weights
        .iter()
        .zip(reference.weights.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max)
        * n;
    Ok(EquidistributionReport {
        sup_cell_error: sup,
        passed: sup < tolerance,
        tolerance,
        total_time,
        empirical: EmpiricalMeasure {
            grid: *grid,
            weights,
        },
        reference,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct PeriodicityReport {
    pub periodic: bool,
    pub period: Option<f64>,
    /// Largest recurrence defect seen at the detected period.
    pub defect: f64,
}

/// Checks recurrence of the full state at integer multiples of
/// `period_guess`; the smallest recurring multiple is reported. Requires the
/// trajectory to span at least three guessed periods.
pub fn periodic_detect(
    traj: &Trajectory,
    period_guess: f64,
    tol: f64,
) -> Result<PeriodicityReport, Error> {
    if !(period_guess > 0.0) {
        return Err(Error::domain("period guess must be positive".to_string()));
    }
    if traj.end_time < 3.0 * period_guess {
        return Err(Error::domain(format!(
            "trajectory spans {} < 3 periods",
            traj.end_time / period_guess
        )));
    }
    let start = traj.start;
    let k_max = (traj.end_time / period_guess).floor() as usize;
    for k in 1..=k_max {
        let t = k as f64 * period_guess;
        if t > traj.end_time {
            break;
        }
        let s = traj.state_at(t);
        let defect = (s.p1 - start.p1).abs() + (s.p2 - start.p2).abs();
        if defect <= tol && s.s1 == start.s1 && s.s2 == start.s2 {
            return Ok(PeriodicityReport {
                periodic: true,
                period: Some(t),
                defect,
            });
        }
    }
    Ok(PeriodicityReport {
        periodic: false,
        period: None,
        defect: f64::NAN,
    })
}

/// Stratified-jittered sample of phase points, uniform for the invariant
/// measure: the two oscillation circles carry uniform angle measure, so
/// jittered cells on the (theta1, theta2) torus are mapped down and points
/// outside the polygon (or inside an eps-neighborhood of a 270-degree
/// corner) rejected.
pub fn sample_phase_points(level: &LevelSet, n: usize, seed: u64) -> Result<Vec<PsiState>, Error> {
    let t1 = 4.0 * level.table.quarter_width;
    let t2 = 4.0 * level.table.quarter_height;
    let corners: Vec<(f64, f64)> = level
        .table
        .boundary_psi()
        .corners
        .iter()
        .filter(|c| c.concave)
        .map(|c| c.pos)
        .collect();
    let eps = 1e-9 * (t1 + t2);
    let n1 = (n as f64).sqrt().ceil() as usize;
    let n2 = n.div_ceil(n1);
    let mut out = Vec::with_capacity(n);
    let mut round = 0u64;
    while out.len() < n {
        let mut rng = member_rng(seed, 0x5eed_0000 + round);
        for i in 0..n1 {
            for j in 0..n2 {
                if out.len() >= n {
                    break;
                }
                let th1 = (i as f64 + rng.gen::<f64>()) / n1 as f64 * t1;
                let th2 = (j as f64 + rng.gen::<f64>()) / n2 as f64 * t2;
                let (p1, s1) = psi_sigma_from_theta(th1, t1);
                let (p2, s2) = psi_sigma_from_theta(th2, t2);
                let near_corner = corners
                    .iter()
                    .any(|&(cx, cy)| (p1 - cx).abs() + (p2 - cy).abs() < eps);
                if level.table.contains_psi(p1, p2) && !near_corner {
                    out.push(PsiState { p1, p2, s1, s2 });
                }
            }
        }
        round += 1;
        if round > 64 {
            return Err(Error::domain(
                "sampling failed: polygon occupies a vanishing fraction".to_string(),
            ));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Default)]
pub struct CensusReport {
    pub total: usize,
    pub never_impacting: usize,
    pub green_first: usize,
    pub red_first: usize,
    pub corner_deaths: usize,
}

impl CensusReport {
    pub fn never_fraction(&self) -> f64 {
        self.never_impacting as f64 / self.total as f64
    }

    pub fn green_fraction(&self) -> f64 {
        self.green_first as f64 / self.total as f64
    }

    pub fn red_fraction(&self) -> f64 {
        self.red_first as f64 / self.total as f64
    }
}

/// Classifies each start by its first impacted wall (colour of the wall's
/// quadrant) or as never impacting within the horizon.
pub fn impact_census(
    level: &LevelSet,
    partition: &ColourPartition,
    starts: &[PsiState],
    horizon: f64,
) -> Result<CensusReport, Error> {
    let boundary = level.table.boundary_psi();
    let outcomes = map_indices(starts.len(), |i| -> Result<Option<Quadrant>, Error> {
        match first_impact(&boundary, &level.table, &starts[i], horizon)? {
            Some((_, wall)) => Ok(Some(boundary.walls[wall].quadrant)),
            None => Ok(None),
        }
    });
    let mut report = CensusReport {
        total: starts.len(),
        ..Default::default()
    };
    for o in outcomes {
        match o? {
            None => report.never_impacting += 1,
            Some(q) => match partition.colour_of(q) {
                Colour::Green => report.green_first += 1,
                Colour::Red => report.red_first += 1,
            },
        }
    }
    Ok(report)
}

/// Support classification of one grid cell for a colour component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellSupport {
    Outside,
    /// The cell straddles a component boundary; excluded from ratio stats.
    Mixed,
    /// Exactly one of the (+,+)/(+,-) momentum branches lies in the colour
    /// component over this cell.
    Single,
    /// Both branches do: the component density doubles here.
    Double,
}

#[derive(Debug, Clone)]
pub struct SupportMaps {
    pub grid: GridSpec,
    /// Indicator of the component on the (sigma1, sigma2) = (+,+) branch.
    pub branch_pp: Vec<bool>,
    /// ... on the (+,-) branch.
    pub branch_pm: Vec<bool>,
    /// ... on the (-,-) branch (equals `branch_pp` by central symmetry).
    pub branch_mm: Vec<bool>,
    pub class: Vec<CellSupport>,
}

/// Computes the per-branch support indicators of a colour component from the
/// torus offset of each phase branch, and classifies cells (a cell is Mixed
/// when center and corner probes disagree).
pub fn colour_support_maps(
    level: &LevelSet,
    spec: ResonanceSpec,
    colour: Colour,
    delta_green: f64,
    delta_red: f64,
    grid: &GridSpec,
) -> Result<SupportMaps, Error> {
    let member = |x: f64, y: f64, s1: f64, s2: f64| -> Result<Option<bool>, Error> {
        if !level.polygon.contains(x, y) {
            return Ok(None);
        }
        let e1 = level.partial;
        let e2 = level.e2();
        if level.v1.eval(x) > e1 || level.v2.eval(y) > e2 {
            return Ok(None);
        }
        let p1 = x.signum() * crate::action_angle::psi(&level.v1, x.abs(), e1, level.quad)?;
        let p2 = y.signum() * crate::action_angle::psi(&level.v2, y.abs(), e2, level.quad)?;
        Ok(Some(
            spec.colour_of_phase(p1, s1, p2, s2, delta_green, delta_red) == Some(colour),
        ))
    };
    let n = grid.n_cells();
    let mut branch_pp = vec![false; n];
    let mut branch_pm = vec![false; n];
    let mut branch_mm = vec![false; n];
    let mut class = vec![CellSupport::Outside; n];
    for idx in 0..n {
        let (cx, cy) = grid.cell_center(idx);
        let Some(pp) = member(cx, cy, 1.0, 1.0)? else {
            continue;
        };
        let pm = member(cx, cy, 1.0, -1.0)?.unwrap_or(false);
        let mm = member(cx, cy, -1.0, -1.0)?.unwrap_or(false);
        branch_pp[idx] = pp;
        branch_pm[idx] = pm;
        branch_mm[idx] = mm;
        // probe near the cell corners for boundary-straddling cells
        let (x0, x1, y0, y1) = grid.cell_bounds(idx);
        let fx = 0.98;
        let probes = [
            (x0 + (1.0 - fx) * (x1 - x0), y0 + (1.0 - fx) * (y1 - y0)),
            (x0 + fx * (x1 - x0), y0 + (1.0 - fx) * (y1 - y0)),
            (x0 + (1.0 - fx) * (x1 - x0), y0 + fx * (y1 - y0)),
            (x0 + fx * (x1 - x0), y0 + fx * (y1 - y0)),
        ];
        let mut mixed = false;
        for (px, py) in probes {
            let cpp = member(px, py, 1.0, 1.0)?;
            let cpm = member(px, py, 1.0, -1.0)?;
            if cpp != Some(pp) || cpm != Some(pm) {
                mixed = true;
                break;
            }
        }
        class[idx] = if mixed {
            CellSupport::Mixed
        } else {
            match (pp, pm) {
                (true, true) => CellSupport::Double,
                (true, false) | (false, true) => CellSupport::Single,
                (false, false) => CellSupport::Outside,
            }
        };
    }
    Ok(SupportMaps {
        grid: *grid,
        branch_pp,
        branch_pm,
        branch_mm,
        class,
    })
}

#[derive(Debug, Clone)]
pub struct RedGreenReport {
    pub colour: Colour,
    pub support: SupportMaps,
    pub empirical: EmpiricalMeasure,
    pub reference: EmpiricalMeasure,
    /// Mean of (empirical / g) over clean double-support cells divided by
    /// the mean over clean single-support cells; 2 in the coexistence limit.
    pub double_single_ratio: f64,
    /// Fraction of in-support cells where the (+,+) and (+,-) branch
    /// indicators differ.
    pub symmetric_difference_fraction: f64,
    pub total_time: f64,
}

/// Runs an ensemble confined to one colour component and measures its
/// g-normalized occupancy against the support classification.
pub fn red_green_occupancy(
    level: &LevelSet,
    spec: ResonanceSpec,
    colour: Colour,
    n_starts: usize,
    horizon: f64,
    grid: &GridSpec,
    seed: u64,
) -> Result<RedGreenReport, Error> {
    let polygon = &level.polygon;
    let dg =
        crate::resonance::delta_colour(polygon, spec, level.energy, level.partial, Colour::Green)?;
    let dr =
        crate::resonance::delta_colour(polygon, spec, level.energy, level.partial, Colour::Red)?;
    let support = colour_support_maps(level, spec, colour, dg, dr, grid)?;

    // starts inside the colour component
    let pool = sample_phase_points(level, n_starts * 12, seed)?;
    let starts: Vec<PsiState> = pool
        .into_iter()
        .filter(|s| spec.colour_of_phase(s.p1, s.s1, s.p2, s.s2, dg, dr) == Some(colour))
        .take(n_starts)
        .collect();
    if starts.len() < n_starts.max(1) / 2 {
        return Err(Error::domain(format!(
            "could not sample enough {colour:?}-component starts ({} of {n_starts})",
            starts.len()
        )));
    }

    let boundary = level.table.boundary_psi();
    let marks = CellCrossings::new(level, grid)?;
    let runs = map_indices(starts.len(), |i| -> Result<(Vec<f64>, f64), Error> {
        let traj = billiard_flow_on(&boundary, &level.table, &starts[i], horizon)?;
        let mut w = vec![0.0; grid.n_cells()];
        let t = deposit_occupancy(&marks, &traj, &mut w)?;
        Ok((w, t))
    });
    let mut weights = vec![0.0; grid.n_cells()];
    let mut total_time = 0.0;
    for r in runs {
        let (w, t) = r?;
        for (acc, v) in weights.iter_mut().zip(w) {
            *acc += v;
        }
        total_time += t;
    }
    for w in &mut weights {
        *w /= total_time;
    }
    let reference = liouville_density(level, grid)?;

    let mut single = (0.0, 0usize);
    let mut double = (0.0, 0usize);
    let g_floor = 0.25 / grid.n_cells() as f64;
    for (idx, &g) in reference.weights.iter().enumerate() {
        if g < g_floor {
            continue;
        }
        let ratio = weights[idx] / g;
        match support.class[idx] {
            CellSupport::Single => {
                single.0 += ratio;
                single.1 += 1;
            }
            CellSupport::Double => {
                double.0 += ratio;
                double.1 += 1;
            }
            _ => {}
        }
    }
    if single.1 == 0 || double.1 == 0 {
        return Err(Error::domain(format!(
            "no clean support cells to compare ({} single, {} double)",
            single.1, double.1
        )));
    }
    let ratio = (double.0 / double.1 as f64) / (single.0 / single.1 as f64);

    let mut diff = 0usize;
    let mut in_support = 0usize;
    for (pp, pm) in support.branch_pp.iter().zip(support.branch_pm.iter()) {
        if *pp || *pm {
            in_support += 1;
            if pp != pm {
                diff += 1;
            }
        }
    }
    Ok(RedGreenReport {
        colour,
        support,
        empirical: EmpiricalMeasure {
            grid: *grid,
            weights,
        },
        reference,
        double_single_ratio: ratio,
        symmetric_difference_fraction: diff as f64 / in_support.max(1) as f64,
        total_time,
    })
}
