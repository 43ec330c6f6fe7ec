//! Level-set dynamics: the exact 45-degree billiard in travel-time
//! coordinates, a direct ODE integration of the impact flow for
//! cross-validation, the coordinate transforms between the two frames, and
//! a saddle-connection search.
//!
//! In the unit-speed frame both coordinates advance at rate one, so the
//! billiard evolution between reflections is exact linear arithmetic: a wall
//! hit is a one-dimensional solve per candidate segment and the nearest
//! positive time wins. Orbits passing within `EPS_CORNER` of a 270-degree
//! corner (or hitting two non-collinear walls at indistinguishable times)
//! terminate: the flow is undefined through corners, and silently grazing
//! them corrupts long-run statistics.

use crate::action_angle::{psi, x_of_psi};
use crate::error::Error;
use crate::geometry::{BilliardTable, StarPolygon, TableBoundary, Wall, WallAxis};
use crate::potential::{Potential, SampleGrid};
use crate::quadrature::QuadratureSpec;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Termination margin around corners, in unit-speed length.
pub const EPS_CORNER: f64 = 1e-10;
const T_FLOOR: f64 = 1e-13;

/// A phase-space state in physical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub x: f64,
    pub y: f64,
    pub px: f64,
    pub py: f64,
}

impl PhaseState {
    /// Builds the state on the level set from a position and momentum signs.
    #[allow(clippy::too_many_arguments)]
    pub fn from_position(
        x: f64,
        y: f64,
        sx: f64,
        sy: f64,
        v1: &Potential,
        v2: &Potential,
        energy: f64,
        partial: f64,
    ) -> Result<PhaseState, Error> {
        let k1 = partial - v1.eval(x);
        let k2 = (energy - partial) - v2.eval(y);
        if k1 < -1e-12 * energy || k2 < -1e-12 * energy {
            return Err(Error::domain(format!(
                "position ({x}, {y}) outside the level-set rectangle"
            )));
        }
        Ok(PhaseState {
            x,
            y,
            px: sx.signum() * (2.0 * k1.max(0.0)).sqrt(),
            py: sy.signum() * (2.0 * k2.max(0.0)).sqrt(),
        })
    }

    pub fn h1(&self, v1: &Potential) -> f64 {
        0.5 * self.px * self.px + v1.eval(self.x)
    }

    pub fn h2(&self, v2: &Potential) -> f64 {
        0.5 * self.py * self.py + v2.eval(self.y)
    }
}

/// A state of the billiard in the unit-speed frame: signed travel-time
/// coordinates plus the direction signs (each coordinate moves at rate one).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiState {
    pub p1: f64,
    pub p2: f64,
    pub s1: f64,
    pub s2: f64,
}

/// Maps a circle coordinate theta in [0, T) of one oscillation to the signed
/// travel-time coordinate and direction sign.
pub fn psi_sigma_from_theta(theta: f64, period: f64) -> (f64, f64) {
    let th = theta.rem_euclid(period);
    if th <= 0.5 * period {
        (th - 0.25 * period, 1.0)
    } else {
        (0.75 * period - th, -1.0)
    }
}

/// Everything needed to simulate one level set.
///
/// Construction is the simulation gate: it validates the polygon, checks
/// both potentials are monotone confining wells on the relevant range, and
/// requires 0 < E1 < E.
pub struct LevelSet {
    pub polygon: StarPolygon,
    pub v1: Potential,
    pub v2: Potential,
    pub energy: f64,
    pub partial: f64,
    pub table: BilliardTable,
    pub quad: QuadratureSpec,
}

impl LevelSet {
    pub fn new(
        polygon: StarPolygon,
        v1: Potential,
        v2: Potential,
        energy: f64,
        partial: f64,
        quad: QuadratureSpec,
    ) -> Result<LevelSet, Error> {
        polygon.validate()?;
        if !(partial > 0.0 && partial < energy) {
            return Err(Error::domain(format!(
                "level set requires 0 < E1 < E, got E1 = {partial}, E = {energy}"
            )));
        }
        let x_hi = v1
            .x_max(energy)?
            .max(polygon.all_x().last().copied().unwrap_or(1.0));
        let y_hi = v2
            .x_max(energy)?
            .max(polygon.all_y().last().copied().unwrap_or(1.0));
        v1.check_unimodal(SampleGrid::new(x_hi, 1000)?)?;
        v2.check_unimodal(SampleGrid::new(y_hi, 1000)?)?;
        let table = crate::geometry::build_table(&polygon, &v1, &v2, energy, partial, quad)?;
        Ok(LevelSet {
            polygon,
            v1,
            v2,
            energy,
            partial,
            table,
            quad,
        })
    }

    pub fn e2(&self) -> f64 {
        self.energy - self.partial
    }

    /// Transform to the unit-speed frame. The state must sit on the level
    /// set to one part in 1e10.
    pub fn to_psi(&self, s: &PhaseState) -> Result<PsiState, Error> {
        let scale = 1.0 + self.energy;
        if (s.h1(&self.v1) - self.partial).abs() > 1e-10 * scale
            || (s.h2(&self.v2) - self.e2()).abs() > 1e-10 * scale
        {
            return Err(Error::domain(format!(
                "state off the level set: H1 = {}, H2 = {}",
                s.h1(&self.v1),
                s.h2(&self.v2)
            )));
        }
        let p1 = s.x.signum() * psi(&self.v1, s.x.abs(), self.partial, self.quad)?;
        let p2 = s.y.signum() * psi(&self.v2, s.y.abs(), self.e2(), self.quad)?;
        Ok(PsiState {
            p1,
            p2,
            s1: if s.px >= 0.0 { 1.0 } else { -1.0 },
            s2: if s.py >= 0.0 { 1.0 } else { -1.0 },
        })
    }

    /// Inverse transform.
    pub fn from_psi(&self, s: &PsiState) -> Result<PhaseState, Error> {
        let x = s.p1.signum() * x_of_psi(&self.v1, s.p1.abs(), self.partial, self.quad)?;
        let y = s.p2.signum() * x_of_psi(&self.v2, s.p2.abs(), self.e2(), self.quad)?;
        PhaseState::from_position(
            x,
            y,
            s.s1,
            s.s2,
            &self.v1,
            &self.v2,
            self.energy,
            self.partial,
        )
    }
}

/// One reflection event of the billiard.
#[derive(Debug, Clone, Copy)]
pub struct BilliardEvent {
    pub time: f64,
    pub wall: usize,
    pub pos: (f64, f64),
    /// Direction signs after the reflection.
    pub dir: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Horizon,
    CornerDeath { time: f64, pos: (f64, f64) },
}

/// One linear piece of a trajectory: (t0, t1, start position, direction).
pub type Segment = (f64, f64, (f64, f64), (f64, f64));

/// A billiard trajectory: the start state, every reflection event in order,
/// and how the run ended. Positions between events follow by linear motion.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub start: PsiState,
    pub events: Vec<BilliardEvent>,
    pub end_time: f64,
    pub termination: Termination,
}

impl Trajectory {
    /// State at time t (piecewise linear between events).
    pub fn state_at(&self, t: f64) -> PsiState {
        let t = t.min(self.end_time);
        // last event with time <= t
        let idx = self.events.partition_point(|e| e.time <= t);
        let (t0, pos, dir) = if idx == 0 {
            (
                0.0,
                (self.start.p1, self.start.p2),
                (self.start.s1, self.start.s2),
            )
        } else {
            let e = &self.events[idx - 1];
            (e.time, e.pos, e.dir)
        };
        let dt = t - t0;
        PsiState {
            p1: pos.0 + dir.0 * dt,
            p2: pos.1 + dir.1 * dt,
            s1: dir.0,
            s2: dir.1,
        }
    }

    /// Linear segments (t0, t1, start position, direction).
    pub fn segments(&self) -> Vec<Segment> {
        let mut out = Vec::with_capacity(self.events.len() + 1);
        let mut t0 = 0.0;
        let mut pos = (self.start.p1, self.start.p2);
        let mut dir = (self.start.s1, self.start.s2);
        for e in &self.events {
            out.push((t0, e.time, pos, dir));
            t0 = e.time;
            pos = e.pos;
            dir = e.dir;
        }
        if self.end_time > t0 {
            out.push((t0, self.end_time, pos, dir));
        }
        out
    }

    /// Wall-id sequence of the impact (non-turning) events.
    pub fn impact_walls(&self, boundary: &TableBoundary) -> Vec<usize> {
        self.events
            .iter()
            .filter(|e| !boundary.walls[e.wall].turning)
            .map(|e| e.wall)
            .collect()
    }
}

struct Candidate {
    t: f64,
    wall: usize,
}

fn wall_hit(w: &Wall, pos: (f64, f64), dir: (f64, f64)) -> Option<Candidate> {
    let (a, da, c, dc) = match w.axis {
        WallAxis::Vertical => (pos.0, dir.0, pos.1, dir.1),
        WallAxis::Horizontal => (pos.1, dir.1, pos.0, dir.0),
    };
    let t = (w.fixed - a) / da;
    if !(t > T_FLOOR) {
        return None;
    }
    let run = c + dc * t;
    if run < w.lo - EPS_CORNER || run > w.hi + EPS_CORNER {
        return None;
    }
    Some(Candidate { t, wall: w.id })
}

/// Exact event-driven billiard flow at directions (+-1, +-1) on the table.
///
/// The start must lie inside the table (or on a wall with inward velocity).
pub fn billiard_flow(
    table: &BilliardTable,
    start: &PsiState,
    t_end: f64,
) -> Result<Trajectory, Error> {
    let boundary = table.boundary_psi();
    billiard_flow_on(&boundary, table, start, t_end)
}

/// As [`billiard_flow`] but reusing a prebuilt boundary (ensemble runs).
pub fn billiard_flow_on(
    boundary: &TableBoundary,
    table: &BilliardTable,
    start: &PsiState,
    t_end: f64,
) -> Result<Trajectory, Error> {
    if !table.contains_psi(start.p1, start.p2) {
        return Err(Error::domain(format!(
            "billiard start ({}, {}) outside the table",
            start.p1, start.p2
        )));
    }
    if !(t_end > 0.0) {
        return Err(Error::domain(
            "billiard horizon must be positive".to_string(),
        ));
    }
    let mut pos = (start.p1, start.p2);
    let mut dir = (start.s1.signum(), start.s2.signum());
    let mut t_abs = 0.0f64;
    let mut events = Vec::new();
    let concave: Vec<(f64, f64)> = boundary
        .corners
        .iter()
        .filter(|c| c.concave)
        .map(|c| c.pos)
        .collect();

    loop {
        // nearest wall hit
        let mut best: Option<Candidate> = None;
        let mut tie = false;
        for w in &boundary.walls {
            if let Some(c) = wall_hit(w, pos, dir) {
                match &best {
                    Some(b) if (c.t - b.t).abs() <= EPS_CORNER => {
                        let bw = &boundary.walls[b.wall];
                        let cw = &boundary.walls[c.wall];
                        let collinear = bw.axis == cw.axis && bw.fixed == cw.fixed;
                        if !collinear {
                            tie = true;
                        }
                        if c.t < b.t {
                            best = Some(c);
                        }
                    }
                    Some(b) if c.t < b.t => {
                        best = Some(c);
                        tie = false;
                    }
                    None => best = Some(c),
                    _ => {}
                }
            }
        }
        let Some(hit) = best else {
            return Err(Error::domain(format!(
                "billiard escaped the table at ({}, {})",
                pos.0, pos.1
            )));
        };

        // passage within EPS_CORNER of a 270-degree corner kills the orbit
        let mut death: Option<(f64, (f64, f64))> = None;
        for &(cx, cy) in &concave {
            let along = 0.5 * ((cx - pos.0) * dir.0 + (cy - pos.1) * dir.1);
            let offset = (cx - pos.0) * dir.0 - (cy - pos.1) * dir.1;
            if offset.abs() <= EPS_CORNER
                && along > T_FLOOR
                && along <= hit.t + EPS_CORNER
                && death.is_none_or(|(t, _)| along < t)
            {
                death = Some((along, (cx, cy)));
            }
        }
        if let Some((t, corner)) = death {
            return Ok(Trajectory {
                start: *start,
                events,
                end_time: t_abs + t,
                termination: Termination::CornerDeath {
                    time: t_abs + t,
                    pos: corner,
                },
            });
        }
        if tie {
            let t = hit.t;
            return Ok(Trajectory {
                start: *start,
                events,
                end_time: t_abs + t,
                termination: Termination::CornerDeath {
                    time: t_abs + t,
                    pos: (pos.0 + dir.0 * t, pos.1 + dir.1 * t),
                },
            });
        }
        if t_abs + hit.t >= t_end {
            return Ok(Trajectory {
                start: *start,
                events,
                end_time: t_end,
                termination: Termination::Horizon,
            });
        }

        // advance and reflect; land exactly on the wall line
        let w = &boundary.walls[hit.wall];
        t_abs += hit.t;
        match w.axis {
            WallAxis::Vertical => {
                pos = (w.fixed, pos.1 + dir.1 * hit.t);
                dir = (-dir.0, dir.1);
            }
            WallAxis::Horizontal => {
                pos = (pos.0 + dir.0 * hit.t, w.fixed);
                dir = (dir.0, -dir.1);
            }
        }
        events.push(BilliardEvent {
            time: t_abs,
            wall: hit.wall,
            pos,
            dir,
        });
    }
}

/// Runs until the first impact with a non-turning wall; returns the event
/// time and wall id, or None at the horizon. A lean census kernel: it skips
/// the corner-death bookkeeping of [`billiard_flow`] (exact corner passages
/// have measure zero among sampled ensembles, whose starts already exclude
/// corner neighborhoods).
pub fn first_impact(
    boundary: &TableBoundary,
    table: &BilliardTable,
    start: &PsiState,
    horizon: f64,
) -> Result<Option<(f64, usize)>, Error> {
    let mut pos = (start.p1, start.p2);
    let mut dir = (start.s1.signum(), start.s2.signum());
    if !table.contains_psi(pos.0, pos.1) {
        return Err(Error::domain("census start outside the table".to_string()));
    }
    let mut t_abs = 0.0f64;
    while t_abs < horizon {
        let mut best: Option<Candidate> = None;
        for w in &boundary.walls {
            if let Some(c) = wall_hit(w, pos, dir) {
                if best.as_ref().is_none_or(|b| c.t < b.t) {
                    best = Some(c);
                }
            }
        }
        let Some(hit) = best else {
            return Err(Error::domain("census orbit escaped the table".to_string()));
        };
        t_abs += hit.t;
        if t_abs >= horizon {
            return Ok(None);
        }
        let w = &boundary.walls[hit.wall];
        if !w.turning {
            return Ok(Some((t_abs, hit.wall)));
        }
        match w.axis {
            WallAxis::Vertical => {
                pos = (w.fixed, pos.1 + dir.1 * hit.t);
                dir = (-dir.0, dir.1);
            }
            WallAxis::Horizontal => {
                pos = (pos.0 + dir.0 * hit.t, w.fixed);
                dir = (dir.0, -dir.1);
            }
        }
    }
    Ok(None)
}

/// One reflection event of the ODE flow.
#[derive(Debug, Clone, Copy)]
pub struct OdeEvent {
    pub time: f64,
    pub wall: usize,
    pub state: PhaseState,
}

#[derive(Debug, Clone)]
pub struct OdeTrajectory {
    pub events: Vec<OdeEvent>,
    pub samples: Vec<(f64, PhaseState)>,
    pub end_time: f64,
    pub termination: Termination,
}

fn rk4_step(v1: &Potential, v2: &Potential, s: &PhaseState, h: f64) -> PhaseState {
    let f = |s: &PhaseState| PhaseState {
        x: s.px,
        y: s.py,
        px: -v1.deriv(s.x),
        py: -v2.deriv(s.y),
    };
    let add = |a: &PhaseState, b: &PhaseState, c: f64| PhaseState {
        x: a.x + c * b.x,
        y: a.y + c * b.y,
        px: a.px + c * b.px,
        py: a.py + c * b.py,
    };
    let k1 = f(s);
    let k2 = f(&add(s, &k1, 0.5 * h));
    let k3 = f(&add(s, &k2, 0.5 * h));
    let k4 = f(&add(s, &k3, h));
    PhaseState {
        x: s.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
        y: s.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
        px: s.px + h / 6.0 * (k1.px + 2.0 * k2.px + 2.0 * k3.px + k4.px),
        py: s.py + h / 6.0 * (k1.py + 2.0 * k2.py + 2.0 * k3.py + k4.py),
    }
}

/// Signed distance to the wall line, negative on the interior side (the
/// kernel of the star polygon contains the origin, so the interior is always
/// the origin side).
fn wall_gap(w: &Wall, s: &PhaseState) -> f64 {
    let coord = match w.axis {
        WallAxis::Vertical => s.x,
        WallAxis::Horizontal => s.y,
    };
    w.fixed.signum() * (coord - w.fixed)
}

fn wall_run(w: &Wall, s: &PhaseState) -> f64 {
    match w.axis {
        WallAxis::Vertical => s.y,
        WallAxis::Horizontal => s.x,
    }
}

/// Direct adaptive 4th-order integration of the impact flow with
/// wall-crossing event localization (bisection to 1e-12 on the crossing
/// coordinate). Exists as a cross-validation oracle for the exact billiard
/// and to produce true-time configuration samples.
pub fn physical_flow(
    level: &LevelSet,
    start: &PhaseState,
    t_end: f64,
    dt_ctrl: f64,
    sample_dt: Option<f64>,
) -> Result<OdeTrajectory, Error> {
    let scale = 1.0 + level.energy;
    if (start.h1(&level.v1) - level.partial).abs() > 1e-10 * scale
        || (start.h2(&level.v2) - level.e2()).abs() > 1e-10 * scale
    {
        return Err(Error::domain("start off the level set".to_string()));
    }
    if !level.polygon.contains(start.x, start.y) {
        return Err(Error::domain(format!(
            "start ({}, {}) outside the polygon",
            start.x, start.y
        )));
    }
    let boundary = level.table.boundary_xy();
    let walls: Vec<&Wall> = boundary.walls.iter().filter(|w| !w.turning).collect();
    let corners: Vec<(f64, f64)> = boundary
        .corners
        .iter()
        .filter(|c| c.concave)
        .map(|c| c.pos)
        .collect();
    let eps_xy = 1e-9 * scale;

    let mut state = *start;
    let mut t = 0.0f64;
    let mut h = dt_ctrl.min(t_end);
    let mut events = Vec::new();
    let mut samples = Vec::new();
    let mut next_sample = f64::INFINITY;
    let tol = 1e-12;

    if let Some(dt) = sample_dt {
        samples.push((0.0, state));
        next_sample = dt;
    }

    let mut guard = 0usize;
    while t < t_end {
        guard += 1;
        if guard > 500_000_000 {
            return Err(Error::domain(
                "physical_flow step budget exhausted".to_string(),
            ));
        }
        let h_try = h.min(t_end - t).max(1e-14);
        // step doubling error control
        let full = rk4_step(&level.v1, &level.v2, &state, h_try);
        let half = rk4_step(&level.v1, &level.v2, &state, 0.5 * h_try);
        let two = rk4_step(&level.v1, &level.v2, &half, 0.5 * h_try);
        let err = (full.x - two.x)
            .abs()
            .max((full.y - two.y).abs())
            .max((full.px - two.px).abs())
            .max((full.py - two.py).abs());
        if err > tol * scale && h_try > 1e-12 {
            h = 0.5 * h_try;
            continue;
        }
        let mut t_next = t + h_try;
        let mut s_next = two;

        // earliest wall crossing inside this step, if any
        let mut hit: Option<(f64, PhaseState, usize)> = None;
        for w in &walls {
            let g0 = wall_gap(w, &state);
            let g1 = wall_gap(w, &s_next);
            if !(g0 <= 0.0 && g1 > 0.0) {
                continue;
            }
            // bisect the step; re-integrate from the step start each probe
            let (mut lo, mut hi) = (0.0, h_try);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let s_mid = rk4_step(&level.v1, &level.v2, &state, mid);
                if wall_gap(w, &s_mid) <= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if (hi - lo) * state.px.abs().max(state.py.abs()).max(1.0) < 1e-12 {
                    break;
                }
            }
            let t_hit = 0.5 * (lo + hi);
            let s_hit = rk4_step(&level.v1, &level.v2, &state, t_hit);
            let run = wall_run(w, &s_hit);
            if run < w.lo - eps_xy || run > w.hi + eps_xy {
                continue; // crossed the wall line beyond the segment
            }
            if hit.as_ref().is_none_or(|(tb, _, _)| t_hit < *tb) {
                hit = Some((t_hit, s_hit, w.id));
            }
        }

        if let Some((t_hit, mut s_hit, wid)) = hit {
            let w = &boundary.walls[wid];
            // corner death when the impact lands near a 270-degree corner
            let near_corner = corners
                .iter()
                .any(|&(cx, cy)| (s_hit.x - cx).abs() <= eps_xy && (s_hit.y - cy).abs() <= eps_xy);
            if near_corner {
                return Ok(OdeTrajectory {
                    events,
                    samples,
                    end_time: t + t_hit,
                    termination: Termination::CornerDeath {
                        time: t + t_hit,
                        pos: (s_hit.x, s_hit.y),
                    },
                });
            }
            // land exactly on the wall and reflect the normal momentum
            match w.axis {
                WallAxis::Vertical => {
                    s_hit.x = w.fixed;
                    s_hit.px = -s_hit.px;
                }
                WallAxis::Horizontal => {
                    s_hit.y = w.fixed;
                    s_hit.py = -s_hit.py;
                }
            }
            t_next = t + t_hit;
            s_next = s_hit;
            events.push(OdeEvent {
                time: t_next,
                wall: wid,
                state: s_next,
            });
        } else {
            h = (h_try * 1.3).min(dt_ctrl);
        }

        if let Some(dt) = sample_dt {
            // linear interpolation inside the accepted step is adequate for
            // plotting-grade samples
            while next_sample <= t_next && next_sample <= t_end {
                let frac = (next_sample - t) / (t_next - t).max(1e-300);
                let interp = PhaseState {
                    x: state.x + frac * (s_next.x - state.x),
                    y: state.y + frac * (s_next.y - state.y),
                    px: state.px + frac * (s_next.px - state.px),
                    py: state.py + frac * (s_next.py - state.py),
                };
                samples.push((next_sample, interp));
                next_sample += dt;
            }
        }
        state = s_next;
        t = t_next;
    }
    Ok(OdeTrajectory {
        events,
        samples,
        end_time: t_end,
        termination: Termination::Horizon,
    })
}

/// A straight orbit segment joining two 270-degree corners of the table.
#[derive(Debug, Clone, Copy)]
pub struct SaddleConnection {
    /// Index into the concave-corner list of the boundary.
    pub from: usize,
    pub to: usize,
    /// Launch direction signs at the start corner.
    pub dir: (f64, f64),
    /// Travel time (equal per-axis advance).
    pub duration: f64,
    /// Euclidean length in the unit-speed frame.
    pub length: f64,
}

/// Traces the three inward separatrix germs of every 270-degree corner up to
/// `t_max` and reports those that terminate at a 270-degree corner.
pub fn saddle_connection_search(
    table: &BilliardTable,
    t_max: f64,
) -> Result<Vec<SaddleConnection>, Error> {
    let boundary = table.boundary_psi();
    let corners: Vec<_> = boundary.corners.iter().filter(|c| c.concave).collect();
    let mut out = Vec::new();
    for (ci, c) in corners.iter().enumerate() {
        let (sx, sy) = c.quadrant.signs();
        // all sign pairs except the one pointing into the removed region
        for dir in [(-sx, -sy), (sx, -sy), (-sx, sy)] {
            let start = PsiState {
                p1: c.pos.0,
                p2: c.pos.1,
                s1: dir.0,
                s2: dir.1,
            };
            let traj = billiard_flow_on(&boundary, table, &start, t_max)?;
            if let Termination::CornerDeath { time, pos } = traj.termination {
                if let Some(to) = corners.iter().position(|k| {
                    (k.pos.0 - pos.0).abs() <= 10.0 * EPS_CORNER
                        && (k.pos.1 - pos.1).abs() <= 10.0 * EPS_CORNER
                }) {
                    out.push(SaddleConnection {
                        from: ci,
                        to,
                        dir,
                        duration: time,
                        length: SQRT_2 * time,
                    });
                }
            }
        }
    }
    Ok(out)
}
