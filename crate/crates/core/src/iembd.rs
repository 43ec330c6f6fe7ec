//! Partition of the partial-energy interval and the impact bifurcation
//! diagram over the (E, E1) plane.
//!
//! For a fixed total energy E the interval (0, E) splits at the critical
//! values {V1(x), E - V2(y)} into finitely many open intervals on which the
//! table combinatorics (and hence the genus) are constant. Scanning E as
//! well yields the diagram: each exposed 270-degree corner paints a wedge
//! with a vertical boundary E1 = V1(x_k) and a unit-slope boundary
//! E1 = E - V2(y_{k+1}), emanating from the apex E = V1(x_k) + V2(y_{k+1}).

use crate::error::Error;
use crate::geometry::{active_corners, Quadrant, StarPolygon};
use crate::parallel::map_indices;
use crate::potential::Potential;
use crate::svg::SvgCanvas;

/// A deduplicated critical partial energy; `multiplicity` counts how many
/// staircase entries (across quadrants) produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakpoint {
    pub value: f64,
    pub multiplicity: usize,
}

/// One open interval of the partition with its constant labels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalLabel {
    pub lo: f64,
    pub hi: f64,
    pub genus: usize,
    pub nonimpacting: bool,
    pub interior_impact: bool,
    pub touches_extremal_vertical: bool,
    pub touches_extremal_horizontal: bool,
}

impl IntervalLabel {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

#[derive(Debug, Clone)]
pub struct EnergyPartition {
    pub energy: f64,
    pub breakpoints: Vec<Breakpoint>,
    pub intervals: Vec<IntervalLabel>,
}

/// Smallest total energy at which any staircase corner (including the axis
/// endpoints x_0 = 0, y_{k+1} = 0) becomes reachable; below it no level set
/// ever impacts a wall.
pub fn low_energy_bound(polygon: &StarPolygon, v1: &Potential, v2: &Potential) -> f64 {
    let mut bound = f64::INFINITY;
    for q in Quadrant::ALL {
        let s = polygon.quadrant(q);
        let k = s.k();
        bound = bound.min(v2.eval(s.ys[0]));
        for j in 1..k {
            bound = bound.min(v1.eval(s.xs[j - 1]) + v2.eval(s.ys[j]));
        }
        bound = bound.min(v1.eval(s.xs[k - 1]));
    }
    bound
}

/// Above this total energy the partial-energy interval is entirely covered
/// by level sets that reach an outermost polygon side.
pub fn extremal_cover_bound(polygon: &StarPolygon, v1: &Potential, v2: &Potential) -> f64 {
    min_extremal_vertical(polygon, v1) + min_extremal_horizontal(polygon, v2)
}

/// min over quadrants of V1(x_k): partial energies above reach an outermost
/// vertical side.
pub fn min_extremal_vertical(polygon: &StarPolygon, v1: &Potential) -> f64 {
    Quadrant::ALL
        .iter()
        .map(|&q| v1.eval(polygon.quadrant(q).width()))
        .fold(f64::INFINITY, f64::min)
}

/// min over quadrants of V2(y_1).
pub fn min_extremal_horizontal(polygon: &StarPolygon, v2: &Potential) -> f64 {
    Quadrant::ALL
        .iter()
        .map(|&q| v2.eval(polygon.quadrant(q).height()))
        .fold(f64::INFINITY, f64::min)
}

/// Union of closed intervals of E1 in [0, E] on which no impacts occur:
/// for each choice of one step index per quadrant, the intersection
/// ∩ [E - V2(y_l), V1(x_l)] is impact-free; the union runs over all choices.
pub fn nonimpacting_set(
    polygon: &StarPolygon,
    v1: &Potential,
    v2: &Potential,
    energy: f64,
) -> Vec<(f64, f64)> {
    let ks: Vec<usize> = Quadrant::ALL
        .iter()
        .map(|&q| polygon.quadrant(q).k())
        .collect();
    let mut raw: Vec<(f64, f64)> = Vec::new();
    let mut choice = [1usize; 4];
    loop {
        let mut lo = 0.0f64;
        let mut hi = energy;
        for (qi, &q) in Quadrant::ALL.iter().enumerate() {
            let s = polygon.quadrant(q);
            let l = choice[qi];
            lo = lo.max(energy - v2.eval(s.ys[l - 1]));
            hi = hi.min(v1.eval(s.xs[l - 1]));
        }
        if lo <= hi {
            raw.push((lo.max(0.0), hi.min(energy)));
        }
        // next index tuple
        let mut carry = true;
        for qi in 0..4 {
            if carry {
                choice[qi] += 1;
                if choice[qi] > ks[qi] {
                    choice[qi] = 1;
                } else {
                    carry = false;
                }
            }
        }
        if carry {
            break;
        }
    }
    merge_closed_intervals(raw, 1e-12 * energy.max(1.0))
}

fn merge_closed_intervals(mut v: Vec<(f64, f64)>, tol: f64) -> Vec<(f64, f64)> {
    v.retain(|(a, b)| b >= a);
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 + tol => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// Open intervals on which impacts occur but never with an outermost side:
/// the window (E - min V2(y_1), min V1(x_k)) minus the non-impacting set.
pub fn interior_impact_set(
    polygon: &StarPolygon,
    v1: &Potential,
    v2: &Potential,
    energy: f64,
) -> Vec<(f64, f64)> {
    let lo = (energy - min_extremal_horizontal(polygon, v2)).max(0.0);
    let hi = min_extremal_vertical(polygon, v1).min(energy);
    if lo >= hi {
        return Vec::new();
    }
    let tol = 1e-12 * energy.max(1.0);
    let mut pieces = vec![(lo, hi)];
    for (a, b) in nonimpacting_set(polygon, v1, v2, energy) {
        let mut next = Vec::new();
        for (plo, phi) in pieces {
            if b <= plo || a >= phi {
                next.push((plo, phi));
            } else {
                if a > plo + tol {
                    next.push((plo, a));
                }
                if b < phi - tol {
                    next.push((b, phi));
                }
            }
        }
        pieces = next;
    }
    pieces.retain(|(a, b)| b - a > tol);
    pieces
}

fn point_in_closed(sets: &[(f64, f64)], x: f64) -> bool {
    sets.iter().any(|&(a, b)| x >= a && x <= b)
}

fn point_in_open(sets: &[(f64, f64)], x: f64) -> bool {
    sets.iter().any(|&(a, b)| x > a && x < b)
}

/// Splits (0, E) at the critical values and labels each interval. The table
/// combinatorics are verified constant by sampling three interior points.
pub fn partition(
    polygon: &StarPolygon,
    v1: &Potential,
    v2: &Potential,
    energy: f64,
) -> Result<EnergyPartition, Error> {
    if !(energy > 0.0) {
        return Err(Error::domain(format!(
            "partition requires E > 0, got {energy}"
        )));
    }
    let mut candidates: Vec<f64> = Vec::new();
    for x in polygon.all_x() {
        candidates.push(v1.eval(x));
    }
    for y in polygon.all_y() {
        candidates.push(energy - v2.eval(y));
    }
    let tol = 1e-12 * energy;
    candidates.retain(|&c| c > tol && c < energy - tol);
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut breakpoints: Vec<Breakpoint> = Vec::new();
    for c in candidates {
        match breakpoints.last_mut() {
            Some(bp) if (c - bp.value).abs() <= tol => bp.multiplicity += 1,
            _ => breakpoints.push(Breakpoint {
                value: c,
                multiplicity: 1,
            }),
        }
    }

    let nonimp = nonimpacting_set(polygon, v1, v2, energy);
    let intimp = interior_impact_set(polygon, v1, v2, energy);
    let ext_v = min_extremal_vertical(polygon, v1);
    let ext_h = min_extremal_horizontal(polygon, v2);

    let mut edges = vec![0.0];
    edges.extend(breakpoints.iter().map(|b| b.value));
    edges.push(energy);
    let mut intervals = Vec::with_capacity(edges.len() - 1);
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = 0.5 * (lo + hi);
        // combinatorics must be constant across the interval
        let reference = active_corners(polygon, v1, v2, energy, mid);
        for frac in [0.25, 0.75] {
            let e1 = lo + frac * (hi - lo);
            if active_corners(polygon, v1, v2, energy, e1) != reference {
                return Err(Error::domain(format!(
                    "table combinatorics not constant on ({lo}, {hi}) at E = {energy}"
                )));
            }
        }
        intervals.push(IntervalLabel {
            lo,
            hi,
            genus: 1 + reference.len(),
            nonimpacting: point_in_closed(&nonimp, mid),
            interior_impact: point_in_open(&intimp, mid),
            touches_extremal_vertical: mid > ext_v,
            touches_extremal_horizontal: mid < energy - ext_h,
        });
    }
    Ok(EnergyPartition {
        energy,
        breakpoints,
        intervals,
    })
}

/// One wedge of the diagram: the region V1(x_k) < E1 < E - V2(y_{k+1}) for a
/// staircase corner with partial energies (a, b) = (V1(x_k), V2(y_{k+1})).
#[derive(Debug, Clone)]
pub struct Wedge {
    pub v1_at_corner: f64,
    pub v2_at_corner: f64,
    pub multiplicity: usize,
    pub quadrants: Vec<Quadrant>,
}

impl Wedge {
    pub fn apex_energy(&self) -> f64 {
        self.v1_at_corner + self.v2_at_corner
    }

    pub fn covers(&self, energy: f64, partial: f64) -> bool {
        partial > self.v1_at_corner && partial < energy - self.v2_at_corner
    }

    /// The two boundary polylines up to `e_max`: the vertical-boundary line
    /// E1 = V1(x_k) and the unit-slope line E1 = E - V2(y_{k+1}), both
    /// emanating from the apex.
    pub fn boundary_polylines(&self, e_max: f64) -> [[(f64, f64); 2]; 2] {
        let apex = (self.apex_energy(), self.v1_at_corner);
        [
            [apex, (e_max, self.v1_at_corner)],
            [apex, (e_max, e_max - self.v2_at_corner)],
        ]
    }
}

/// Distinct wedges of the polygon (corners with equal critical energies are
/// merged, with their multiplicity recorded).
pub fn wedges(polygon: &StarPolygon, v1: &Potential, v2: &Potential) -> Vec<Wedge> {
    let mut out: Vec<Wedge> = Vec::new();
    for q in Quadrant::ALL {
        let s = polygon.quadrant(q);
        for k in 1..s.k() {
            let a = v1.eval(s.xs[k - 1]);
            let b = v2.eval(s.ys[k]);
            let tol = 1e-12 * (1.0 + a.abs() + b.abs());
            match out
                .iter_mut()
                .find(|w| (w.v1_at_corner - a).abs() <= tol && (w.v2_at_corner - b).abs() <= tol)
            {
                Some(w) => {
                    w.multiplicity += 1;
                    w.quadrants.push(q);
                }
                None => out.push(Wedge {
                    v1_at_corner: a,
                    v2_at_corner: b,
                    multiplicity: 1,
                    quadrants: vec![q],
                }),
            }
        }
    }
    out
}

/// One grid cell of the diagram.
#[derive(Debug, Clone, Copy)]
pub struct DiagramCell {
    pub energy: f64,
    pub partial: f64,
    pub genus: usize,
    pub wedge_count: usize,
    pub extremal_vertical: bool,
    pub extremal_horizontal: bool,
    pub nonimpacting: bool,
}

#[derive(Debug, Clone)]
pub struct Diagram {
    pub e_max: f64,
    pub resolution: usize,
    pub wedges: Vec<Wedge>,
    pub cells: Vec<DiagramCell>,
    pub extremal_vertical_threshold: f64,
    pub extremal_horizontal_offset: f64,
}

/// Samples the (E, E1) plane at cell centers; rows are computed in parallel.
pub fn diagram(
    polygon: &StarPolygon,
    v1: &Potential,
    v2: &Potential,
    e_max: f64,
    resolution: usize,
) -> Result<Diagram, Error> {
    if !(e_max > 0.0) || resolution == 0 {
        return Err(Error::domain(
            "diagram requires e_max > 0 and resolution >= 1".to_string(),
        ));
    }
    let ws = wedges(polygon, v1, v2);
    let ext_v = min_extremal_vertical(polygon, v1);
    let ext_h = min_extremal_horizontal(polygon, v2);
    let rows = map_indices(resolution, |i| {
        let energy = e_max * (i as f64 + 0.5) / resolution as f64;
        let nonimp = nonimpacting_set(polygon, v1, v2, energy);
        let mut row = Vec::with_capacity(resolution);
        for j in 0..resolution {
            let partial = energy * (j as f64 + 0.5) / resolution as f64;
            let wedge_count: usize = ws
                .iter()
                .filter(|w| w.covers(energy, partial))
                .map(|w| w.multiplicity)
                .sum();
            row.push(DiagramCell {
                energy,
                partial,
                genus: 1 + wedge_count,
                wedge_count,
                extremal_vertical: partial > ext_v,
                extremal_horizontal: partial < energy - ext_h,
                nonimpacting: point_in_closed(&nonimp, partial),
            });
        }
        row
    });
    Ok(Diagram {
        e_max,
        resolution,
        wedges: ws,
        cells: rows.into_iter().flatten().collect(),
        extremal_vertical_threshold: ext_v,
        extremal_horizontal_offset: ext_h,
    })
}

impl Diagram {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "E,E1,genus,wedge_count,extremal_vertical,extremal_horizontal,nonimpacting\n",
        );
        for c in &self.cells {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                c.energy,
                c.partial,
                c.genus,
                c.wedge_count,
                c.extremal_vertical as u8,
                c.extremal_horizontal as u8,
                c.nonimpacting as u8
            ));
        }
        s
    }

    /// Renders the analytic regions: grey allowed triangle, one translucent
    /// blue wedge per distinct corner (multiplicity in a data attribute),
    /// pink for level sets reaching an outermost vertical side and light
    /// green for the outermost horizontal sides.
    pub fn to_svg(&self, width: f64, height: f64) -> String {
        let e = self.e_max;
        let mut c = SvgCanvas::new(width, height, (0.0, e * 1.02), (0.0, e * 1.02));
        c.polygon(&[(0.0, 0.0), (e, 0.0), (e, e)], "grey", 0.25, "");
        // pink: E1 > min V1(x_k)
        let tv = self.extremal_vertical_threshold;
        if tv < e {
            c.polygon(&[(tv, tv), (e, tv), (e, e)], "#ff9ecb", 0.45, "");
        }
        // light green: E1 < E - min V2(y_1)
        let th = self.extremal_horizontal_offset;
        if th < e {
            c.polygon(&[(th, 0.0), (e, 0.0), (e, e - th)], "#a8e6a1", 0.45, "");
        }
        for w in &self.wedges {
            let apex = (w.apex_energy(), w.v1_at_corner);
            if apex.0 <= e {
                let pts = [apex, (e, w.v1_at_corner), (e, e - w.v2_at_corner)];
                let attrs = format!("data-multiplicity=\"{}\"", w.multiplicity);
                c.polygon(&pts, "#3b6fd4", 0.18 * w.multiplicity as f64, &attrs);
                for line in w.boundary_polylines(e) {
                    c.line(line[0].0, line[0].1, line[1].0, line[1].1, "#1d4ed8", 0.6);
                }
            }
        }
        c.line(0.0, 0.0, e, 0.0, "black", 1.0);
        c.line(0.0, 0.0, e, e, "black", 1.0);
        c.text(e * 0.9, e * 0.02, 11.0, "E");
        c.text(e * 0.03, e * 0.9, 11.0, "E1");
        c.render()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{g_max, genus};

    fn quad(omega: f64) -> Potential {
        Potential::quadratic(omega).unwrap()
    }

    fn cross() -> StarPolygon {
        StarPolygon::symmetric(vec![1.0, 2.0], vec![2.0, 1.0]).unwrap()
    }

    #[test]
    fn partition_symmetric_cross() {
        let p = cross();
        let v = quad(1.0);
        let part = partition(&p, &v, &v, 2.0).unwrap();
        // V1(1) = 0.5 and E - V2(1) = 1.5 survive in (0, 2); V1(2) = 2 and
        // E - V2(2) = 0 are clipped.
        assert_eq!(part.breakpoints.len(), 2);
        assert!((part.breakpoints[0].value - 0.5).abs() < 1e-12);
        assert!((part.breakpoints[1].value - 1.5).abs() < 1e-12);
        assert_eq!(part.breakpoints[0].multiplicity, 4);
        let genera: Vec<usize> = part.intervals.iter().map(|i| i.genus).collect();
        assert_eq!(genera, vec![1, 5, 1]);
        assert!(part.breakpoints.len() <= 2 * p.total_steps());
    }

    #[test]
    fn partition_low_energy_single_interval() {
        let p = cross();
        let v = quad(1.0);
        let bound = low_energy_bound(&p, &v, &v);
        // min of V2(2) = 2, V1(1) + V2(1) = 1, V1(2) = 2
        assert!((bound - 1.0).abs() < 1e-14);
        let part = partition(&p, &v, &v, 0.4).unwrap();
        assert_eq!(part.intervals.len(), 1);
        let i = part.intervals[0];
        assert!(i.nonimpacting);
        assert_eq!(i.genus, 1);
    }

    #[test]
    fn genus_constant_on_intervals() {
        let p = StarPolygon::symmetric(vec![0.7, 1.3, 1.9], vec![1.7, 1.2, 0.6]).unwrap();
        let v1 = quad(1.0);
        let v2 = quad(0.8);
        for &e in &[0.9, 2.3, 4.1] {
            let part = partition(&p, &v1, &v2, e).unwrap();
            for iv in &part.intervals {
                for f in [0.1, 0.35, 0.5, 0.8, 0.95] {
                    let e1 = iv.lo + f * (iv.hi - iv.lo);
                    assert_eq!(
                        genus(&p, &v1, &v2, e, e1).unwrap(),
                        iv.genus,
                        "E {e}, interval {iv:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn nonimpacting_small_and_large_energy() {
        let p = cross();
        let v = quad(1.0);
        // below the low-energy bound: all of [0, E]
        let set = nonimpacting_set(&p, &v, &v, 0.4);
        assert_eq!(set.len(), 1);
        assert!(set[0].0 <= 1e-15 && (set[0].1 - 0.4).abs() < 1e-12);
        // far above the extremal cover bound: empty
        let big = extremal_cover_bound(&p, &v, &v) + 3.0;
        assert!(nonimpacting_set(&p, &v, &v, big).is_empty());
    }

    #[test]
    fn nonimpacting_two_components_intermediate() {
        // Two-step symmetric cross between the concave apex (E = 1) and the
        // convex-corner energies (E = 2.5): one impact-free component per
        // staircase choice.
        let p = cross();
        let v = quad(1.0);
        let e = 2.0;
        let set = nonimpacting_set(&p, &v, &v, e);
        assert!(
            set.len() >= 2,
            "expected >= 2 components at E = {e}, got {set:?}"
        );
        // components are inside [0, E] and disjoint
        for w in set.windows(2) {
            assert!(w[0].1 < w[1].0);
        }
    }

    #[test]
    fn interior_impact_examples() {
        let p = cross();
        let v = quad(1.0);
        // above the extremal cover bound the window degenerates
        let big = extremal_cover_bound(&p, &v, &v) + 1.0;
        assert!(interior_impact_set(&p, &v, &v, big).is_empty());
        // low-energy regime: no impacts at all
        assert!(interior_impact_set(&p, &v, &v, 0.4).is_empty());
        // between the wedge apex and the extremal thresholds: nonempty
        let mid = interior_impact_set(&p, &v, &v, 1.4);
        assert!(!mid.is_empty(), "expected interior-impact window at E=1.4");
        for (a, b) in &mid {
            let m = 0.5 * (a + b);
            assert!(genus(&p, &v, &v, 1.4, m).unwrap() > 1);
        }
    }

    #[test]
    fn wedge_apexes_and_multiplicity() {
        let p = cross();
        let v = quad(1.0);
        let ws = wedges(&p, &v, &v);
        assert_eq!(ws.len(), 1, "symmetric cross merges into one wedge");
        assert_eq!(ws[0].multiplicity, 4);
        assert!((ws[0].apex_energy() - 1.0).abs() < 1e-14); // V1(1) + V2(1)
    }

    #[test]
    fn diagram_labels_consistent() {
        let p = cross();
        let v = quad(1.0);
        let d = diagram(&p, &v, &v, 4.0, 24).unwrap();
        assert_eq!(d.cells.len(), 24 * 24);
        for c in &d.cells {
            // genus channel equals one plus covering wedge count
            assert_eq!(c.genus, 1 + c.wedge_count);
            assert_eq!(
                c.genus,
                genus(&p, &v, &v, c.energy, c.partial).unwrap(),
                "cell at ({}, {})",
                c.energy,
                c.partial
            );
            if c.wedge_count == 0 {
                assert_eq!(c.genus, 1);
            }
            if c.nonimpacting {
                assert_eq!(c.wedge_count, 0);
            }
        }
        assert!(d.cells.iter().any(|c| c.wedge_count == 4));
        let csv = d.to_csv();
        assert!(csv.starts_with("E,E1,genus"));
        let svg = d.to_svg(640.0, 640.0);
        assert!(svg.contains("data-multiplicity=\"4\""));
        let _ = g_max(&p);
    }
}
