//! Resonant quadratic level sets: colour pairing, cylinder widths and the
//! per-interval dynamical scenario.
//!
//! With both wells quadratic and frequency ratio n/m (coprime), the level-set
//! flow unfolds to the straight-line flow on a flat torus of dimensions
//! 2 pi m C by 2 pi n C, C = 1/(m n c), with four marked half-period points.
//! Exactly two diagonal periodic orbits pass through the marked points; they
//! pair the quadrant labels into a green and a red class. The angle
//!
//!   delta_colour(E1) = max over exposed corners of the colour's quadrants of
//!       m arccos sqrt(V1(x_k)/E1) + n arccos sqrt(V2(y_{k+1})/(E - E1))
//!
//! measures (after scaling by C) the farthest taxicab distance from the
//! colour's periodic orbit to its removed corner polygons. When the two
//! colour cylinders cover the torus (delta sum above pi) almost every level
//! set in the interval is uniquely ergodic; when they do not (delta sum
//! below pi) two ribbons of non-impacting periodic orbits survive between
//! them and coexist with two uniquely ergodic components.

use serde::{Deserialize, Serialize};

use crate::action_angle::quarter_period;
use crate::error::Error;
use crate::geometry::{active_corners, Quadrant, StarPolygon};
use crate::iembd;
use crate::potential::{Potential, SampleGrid};
use crate::quadrature::QuadratureSpec;

use std::f64::consts::PI;

/// Rational frequency data: Omega = omega1/omega2 = n/m with
/// V1 = n^2 c^2 x^2 / 2 and V2 = m^2 c^2 y^2 / 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceSpec {
    pub m: u32,
    pub n: u32,
    pub c: f64,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl ResonanceSpec {
    pub fn new(m: u32, n: u32, c: f64) -> Result<Self, Error> {
        if m == 0 || n == 0 {
            return Err(Error::validation("resonance orders must be positive"));
        }
        if gcd(m, n) != 1 {
            return Err(Error::validation(format!(
                "resonance orders must be coprime, got m = {m}, n = {n}"
            )));
        }
        if !(c > 0.0) {
            return Err(Error::validation("resonance scale c must be positive"));
        }
        Ok(ResonanceSpec { m, n, c })
    }

    /// C = 1/(m n c), the common length scale of the torus lattice.
    pub fn big_c(self) -> f64 {
        1.0 / (self.m as f64 * self.n as f64 * self.c)
    }

    pub fn omega1(self) -> f64 {
        self.n as f64 * self.c
    }

    pub fn omega2(self) -> f64 {
        self.m as f64 * self.c
    }

    pub fn v1(self) -> Potential {
        Potential::Quadratic {
            omega: self.omega1(),
        }
    }

    pub fn v2(self) -> Potential {
        Potential::Quadratic {
            omega: self.omega2(),
        }
    }

    /// T1/4 = m C pi / 2, independent of the energy.
    pub fn quarter_width(self) -> f64 {
        self.m as f64 * self.big_c() * PI / 2.0
    }

    /// T2/4 = n C pi / 2.
    pub fn quarter_height(self) -> f64 {
        self.n as f64 * self.big_c() * PI / 2.0
    }

    pub fn period1(self) -> f64 {
        4.0 * self.quarter_width()
    }

    pub fn period2(self) -> f64 {
        4.0 * self.quarter_height()
    }

    /// Common period of every diagonal torus orbit:
    /// 2 pi m n C = n T1 = m T2.
    pub fn torus_period(self) -> f64 {
        2.0 * PI * self.m as f64 * self.n as f64 * self.big_c()
    }

    /// Verifies the closed-form quarter periods against the action-angle
    /// route to 1e-12.
    pub fn check_consistency(self, q: QuadratureSpec) -> Result<(), Error> {
        let t1 = quarter_period(&self.v1(), 1.0, q)?;
        let t2 = quarter_period(&self.v2(), 1.0, q)?;
        if (t1 - self.quarter_width()).abs() > 1e-12 * t1
            || (t2 - self.quarter_height()).abs() > 1e-12 * t2
        {
            return Err(Error::domain(format!(
                "resonance spec inconsistent with oscillation periods: {t1} vs {}, {t2} vs {}",
                self.quarter_width(),
                self.quarter_height()
            )));
        }
        Ok(())
    }

    /// Circle coordinate of the horizontal oscillation: position in
    /// [0, T1) advancing at unit speed, with the turning points at 0 and
    /// T1/2 (sign of the label = sign of x at the turning point).
    pub fn theta1(self, psi1: f64, sigma1: f64) -> f64 {
        let t1 = self.period1();
        let th = if sigma1 >= 0.0 {
            psi1 + 0.25 * t1
        } else {
            0.75 * t1 - psi1
        };
        th.rem_euclid(t1)
    }

    pub fn theta2(self, psi2: f64, sigma2: f64) -> f64 {
        let t2 = self.period2();
        let th = if sigma2 >= 0.0 {
            psi2 + 0.25 * t2
        } else {
            0.75 * t2 - psi2
        };
        th.rem_euclid(t2)
    }

    /// Anti-diagonal offset u = theta1 - theta2 of a phase point, reduced to
    /// [0, 2 pi C). Diagonal orbits keep u fixed; the marked points sit at
    /// u = 0 or pi C depending on parity.
    pub fn diagonal_offset(self, psi1: f64, sigma1: f64, psi2: f64, sigma2: f64) -> f64 {
        let u = self.theta1(psi1, sigma1) - self.theta2(psi2, sigma2);
        u.rem_euclid(2.0 * PI * self.big_c())
    }

    /// Offset of the green periodic orbit (the one through the ++ marked
    /// point).
    pub fn green_offset(self) -> f64 {
        let u = 0.5 * self.period1() - 0.5 * self.period2();
        u.rem_euclid(2.0 * PI * self.big_c())
    }

    pub fn red_offset(self) -> f64 {
        (self.green_offset() + PI * self.big_c()).rem_euclid(2.0 * PI * self.big_c())
    }

    /// Distance on the offset circle R / (2 pi C Z).
    pub fn offset_distance(self, a: f64, b: f64) -> f64 {
        let circ = 2.0 * PI * self.big_c();
        let d = (a - b).rem_euclid(circ);
        d.min(circ - d)
    }

    /// Which colour cylinder the phase point belongs to, given the current
    /// cylinder half-widths; `None` means the point lies in a non-impacting
    /// periodic ribbon.
    pub fn colour_of_phase(
        self,
        psi1: f64,
        sigma1: f64,
        psi2: f64,
        sigma2: f64,
        delta_green: f64,
        delta_red: f64,
    ) -> Option<Colour> {
        let u = self.diagonal_offset(psi1, sigma1, psi2, sigma2);
        let c = self.big_c();
        if self.offset_distance(u, self.green_offset()) <= c * delta_green {
            Some(Colour::Green)
        } else if self.offset_distance(u, self.red_offset()) <= c * delta_red {
            Some(Colour::Red)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Colour {
    Green,
    Red,
}

impl Colour {
    pub fn other(self) -> Colour {
        match self {
            Colour::Green => Colour::Red,
            Colour::Red => Colour::Green,
        }
    }
}

/// The pairing of quadrant labels by the two marked diagonal orbits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColourPartition {
    pub green: [Quadrant; 2],
    pub red: [Quadrant; 2],
}

impl ColourPartition {
    pub fn colour_of(&self, q: Quadrant) -> Colour {
        if self.green.contains(&q) {
            Colour::Green
        } else {
            Colour::Red
        }
    }

    pub fn members(&self, colour: Colour) -> [Quadrant; 2] {
        match colour {
            Colour::Green => self.green,
            Colour::Red => self.red,
        }
    }
}

/// Green always contains ++; its partner depends on the parities of (m, n).
pub fn green_partition(m: u32, n: u32) -> Result<ColourPartition, Error> {
    if m == 0 || n == 0 || gcd(m, n) != 1 {
        return Err(Error::validation(format!(
            "green_partition requires coprime positive orders, got ({m}, {n})"
        )));
    }
    let green = match (m % 2, n % 2) {
        (1, 0) => [Quadrant::PP, Quadrant::PM],
        (0, 1) => [Quadrant::PP, Quadrant::MP],
        (1, 1) => [Quadrant::PP, Quadrant::MM],
        _ => unreachable!("coprime orders cannot both be even"),
    };
    let red: Vec<Quadrant> = Quadrant::ALL
        .iter()
        .copied()
        .filter(|q| !green.contains(q))
        .collect();
    Ok(ColourPartition {
        green,
        red: [red[0], red[1]],
    })
}

/// delta_colour(E1): the largest corner angle sum over the colour's exposed
/// corners; zero when the colour has no exposed corner (its cylinder
/// degenerates to the bare closed orbit).
pub fn delta_colour(
    polygon: &StarPolygon,
    spec: ResonanceSpec,
    energy: f64,
    partial: f64,
    colour: Colour,
) -> Result<f64, Error> {
    if !(partial > 0.0 && partial < energy) {
        return Err(Error::domain(format!(
            "delta_colour requires 0 < E1 < E, got E1 = {partial}"
        )));
    }
    let partition = green_partition(spec.m, spec.n)?;
    let members = partition.members(colour);
    let (v1, v2) = (spec.v1(), spec.v2());
    let e2 = energy - partial;
    let mut best = 0.0f64;
    for (q, k) in active_corners(polygon, &v1, &v2, energy, partial) {
        if !members.contains(&q) {
            continue;
        }
        let s = polygon.quadrant(q);
        let a = (v1.eval(s.xs[k - 1]) / partial).sqrt().min(1.0).acos();
        let b = (v2.eval(s.ys[k]) / e2).sqrt().min(1.0).acos();
        best = best.max(spec.m as f64 * a + spec.n as f64 * b);
    }
    Ok(best)
}

/// delta_green + delta_red at one partial energy.
pub fn delta_sum(
    polygon: &StarPolygon,
    spec: ResonanceSpec,
    energy: f64,
    partial: f64,
) -> Result<f64, Error> {
    Ok(delta_colour(polygon, spec, energy, partial, Colour::Green)?
        + delta_colour(polygon, spec, energy, partial, Colour::Red)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UKind {
    /// delta sum above pi: the colour cylinders cover the torus.
    UPlus,
    /// delta sum below pi: periodic ribbons survive.
    UMinus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct USubInterval {
    pub lo: f64,
    pub hi: f64,
    pub kind: UKind,
}

/// Splits an interior-impact interval by the sign of delta sum minus pi.
/// Sign changes are located on a `grid_points` scan and bisected to 1e-10.
pub fn classify_u(
    polygon: &StarPolygon,
    spec: ResonanceSpec,
    energy: f64,
    interval: (f64, f64),
    grid_points: usize,
) -> Result<Vec<USubInterval>, Error> {
    let (lo, hi) = interval;
    if !(lo < hi) {
        return Err(Error::domain("classify_u requires lo < hi".to_string()));
    }
    let n = grid_points.max(8);
    let f = |e1: f64| delta_sum(polygon, spec, energy, e1).map(|s| s - PI);
    // sample strictly inside to dodge endpoint degeneracies
    let pad = (hi - lo) * 1e-9;
    let at = |i: usize| lo + pad + (hi - lo - 2.0 * pad) * i as f64 / (n - 1) as f64;
    let mut roots = Vec::new();
    let mut prev = f(at(0))?;
    for i in 1..n {
        let cur = f(at(i))?;
        if prev == 0.0 || prev.signum() != cur.signum() {
            let (mut a, mut b) = (at(i - 1), at(i));
            let mut fa = prev;
            for _ in 0..60 {
                let mid = 0.5 * (a + b);
                let fm = f(mid)?;
                if fa.signum() == fm.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
                if b - a < 1e-10 {
                    break;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev = cur;
    }
    let mut edges = vec![lo];
    edges.extend(roots);
    edges.push(hi);
    let mut out = Vec::new();
    for w in edges.windows(2) {
        if w[1] - w[0] <= 1e-10 {
            continue;
        }
        let mid = 0.5 * (w[0] + w[1]);
        let kind = if f(mid)? > 0.0 {
            UKind::UPlus
        } else {
            UKind::UMinus
        };
        out.push(USubInterval {
            lo: w[0],
            hi: w[1],
            kind,
        });
    }
    Ok(out)
}

/// Measure fractions of the level set in the coexistence regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CylinderFractions {
    pub red: f64,
    pub green: f64,
    pub periodic: f64,
}

/// red = delta_red/pi, green = delta_green/pi, periodic the remainder;
/// defined only below the covering threshold (delta sum < pi).
pub fn cylinder_fractions(
    polygon: &StarPolygon,
    spec: ResonanceSpec,
    energy: f64,
    partial: f64,
) -> Result<CylinderFractions, Error> {
    let dg = delta_colour(polygon, spec, energy, partial, Colour::Green)?;
    let dr = delta_colour(polygon, spec, energy, partial, Colour::Red)?;
    if dg + dr >= PI {
        return Err(Error::domain(format!(
            "cylinder_fractions requires delta sum < pi, got {}",
            dg + dr
        )));
    }
    let red = dr / PI;
    let green = dg / PI;
    Ok(CylinderFractions {
        red,
        green,
        periodic: 1.0 - (red + green),
    })
}

/// Predicted dynamics on one partition interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Uniquely ergodic for almost every partial energy in the interval.
    Ue,
    /// Completely periodic on the whole interval (resonant non-impacting).
    Cp,
    /// Two periodic ribbons coexisting with two uniquely ergodic components.
    Coex,
    /// Uniquely ergodic a.e. via impacts with an outermost side.
    UeExtremal,
    Unknown,
}

/// Classifies the interval. For resonant quadratic data pass the spec; for
/// anything else the routing falls back on the potential class (at least one
/// strictly non-quadratic well, or quadratic wells declared non-resonant by
/// omitting the spec).
pub fn scenario(
    polygon: &StarPolygon,
    v1: &Potential,
    v2: &Potential,
    energy: f64,
    interval: (f64, f64),
    spec: Option<ResonanceSpec>,
) -> Result<Scenario, Error> {
    let (lo, hi) = interval;
    if !(lo >= 0.0 && hi <= energy && lo < hi) {
        return Err(Error::domain(format!(
            "scenario requires 0 <= lo < hi <= E, got ({lo}, {hi})"
        )));
    }
    // Non-impacting: identical to the free resonant flow.
    if energy <= iembd::low_energy_bound(polygon, v1, v2) {
        return Ok(Scenario::Cp);
    }
    let nonimp = iembd::nonimpacting_set(polygon, v1, v2, energy);
    if nonimp.iter().any(|&(a, b)| lo >= a && hi <= b) {
        return Ok(Scenario::Cp);
    }

    // Impacts with an outermost side on the whole interval.
    let ext_v = iembd::min_extremal_vertical(polygon, v1);
    let ext_h = iembd::min_extremal_horizontal(polygon, v2);
    if hi <= energy - ext_h || lo >= ext_v {
        return Ok(Scenario::UeExtremal);
    }

    // Resonant quadratic interior-impact intervals split by the delta sum.
    if let Some(s) = spec {
        let matches = v1
            .quadratic_frequency()
            .is_some_and(|w| (w - s.omega1()).abs() <= 1e-12 * w)
            && v2
                .quadratic_frequency()
                .is_some_and(|w| (w - s.omega2()).abs() <= 1e-12 * w);
        if matches {
            let intimp = iembd::interior_impact_set(polygon, v1, v2, energy);
            if intimp.iter().any(|&(a, b)| lo >= a && hi <= b) {
                // probe at uneven fractions; the delta sum touches pi at
                // isolated points (symmetric polygons put one at the exact
                // midpoint), so values inside the degeneracy floor are
                // ignored rather than counted as a sign
                let probes: Result<Vec<f64>, Error> =
                    [1e-9, 0.234, 0.411, 0.589, 0.766, 1.0 - 1e-9]
                        .iter()
                        .map(|&fr| {
                            delta_sum(polygon, s, energy, lo + fr * (hi - lo)).map(|d| d - PI)
                        })
                        .collect();
                let signs: Vec<f64> = probes?.into_iter().filter(|v| v.abs() > 1e-12).collect();
                if !signs.is_empty() {
                    if signs.iter().all(|&v| v > 0.0) {
                        return Ok(Scenario::Ue);
                    }
                    if signs.iter().all(|&v| v < 0.0) {
                        return Ok(Scenario::Coex);
                    }
                }
            }
            return Ok(Scenario::Unknown);
        }
        return Ok(Scenario::Unknown);
    }

    // No resonance declared: route on the potential class.
    let convexity = |p: &Potential| -> Result<_, Error> {
        let x_hi = p.x_max(energy)?;
        Ok(p.check_square_convex(SampleGrid::new(x_hi, 1024)?))
    };
    let c1 = convexity(v1)?;
    let c2 = convexity(v2)?;
    if !(c1.satisfies_v && c2.satisfies_v) {
        return Ok(Scenario::Unknown);
    }
    let q1 = v1.is_quadratic_function();
    let q2 = v2.is_quadratic_function();
    if (!q1 && c1.satisfies_vi) || (!q2 && c2.satisfies_vi) {
        return Ok(Scenario::Ue); // at least one strictly non-quadratic well
    }
    if q1 && q2 {
        // Quadratic pair with no declared resonance: treated as irrational.
        return Ok(Scenario::Ue);
    }
    Ok(Scenario::Unknown)
}
