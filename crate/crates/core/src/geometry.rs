//! Star-shaped right-angled polygons and the transformed billiard tables cut
//! out by a level set.
//!
//! A polygon is four staircase quadrants with matching widths along the x
//! axis and matching heights along the y axis. Fixing energies (E, E1)
//! confines the motion to the rectangle R = [-x_max, x_max] x [-y_max, y_max];
//! mapping P ∩ R through the travel-time coordinates of [`crate::action_angle`]
//! produces another star-shaped right-angled polygon in which the flow is a
//! billiard at 45 degrees. The genus of the level set is one plus the number
//! of polygon corners of interior angle 270 degrees that survive inside R.

use serde::{Deserialize, Serialize};

use crate::action_angle::{psi, quarter_period};
use crate::error::Error;
use crate::potential::Potential;
use crate::quadrature::QuadratureSpec;

/// Quadrant labels; the first sign is the sign of x, the second of y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quadrant {
    PP,
    MP,
    MM,
    PM,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [Quadrant::PP, Quadrant::MP, Quadrant::MM, Quadrant::PM];

    pub fn signs(self) -> (f64, f64) {
        match self {
            Quadrant::PP => (1.0, 1.0),
            Quadrant::MP => (-1.0, 1.0),
            Quadrant::MM => (-1.0, -1.0),
            Quadrant::PM => (1.0, -1.0),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Quadrant::PP => "++",
            Quadrant::MP => "-+",
            Quadrant::MM => "--",
            Quadrant::PM => "+-",
        }
    }

    pub fn index(self) -> usize {
        match self {
            Quadrant::PP => 0,
            Quadrant::MP => 1,
            Quadrant::MM => 2,
            Quadrant::PM => 3,
        }
    }

    pub fn from_signs(sx: f64, sy: f64) -> Quadrant {
        match (sx >= 0.0, sy >= 0.0) {
            (true, true) => Quadrant::PP,
            (false, true) => Quadrant::MP,
            (false, false) => Quadrant::MM,
            (true, false) => Quadrant::PM,
        }
    }
}

/// One quadrant staircase: lengths x_1 < ... < x_k and heights
/// y_1 > ... > y_k, all positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaircaseData {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl StaircaseData {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, Error> {
        let s = StaircaseData { xs, ys };
        s.check("staircase")?;
        Ok(s)
    }

    pub fn k(&self) -> usize {
        self.xs.len()
    }

    /// Width x_k of the staircase.
    pub fn width(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    /// Height y_1 of the staircase.
    pub fn height(&self) -> f64 {
        self.ys[0]
    }

    fn check(&self, ctx: &str) -> Result<(), Error> {
        if self.xs.is_empty() || self.xs.len() != self.ys.len() {
            return Err(Error::validation(format!(
                "{ctx}: xs and ys must be non-empty and of equal length (got {} and {})",
                self.xs.len(),
                self.ys.len()
            )));
        }
        let mut prev = 0.0;
        for (i, &x) in self.xs.iter().enumerate() {
            if !(x > 0.0) || !x.is_finite() {
                return Err(Error::validation(format!(
                    "{ctx}: xs[{i}] must be positive, got {x}"
                )));
            }
            if x - prev <= 1e-12 * x.max(1.0) {
                return Err(Error::validation(format!(
                    "{ctx}: xs[{i}] = {x} does not strictly increase past {prev}"
                )));
            }
            prev = x;
        }
        let mut prev = f64::INFINITY;
        for (i, &y) in self.ys.iter().enumerate() {
            if !(y > 0.0) || !y.is_finite() {
                return Err(Error::validation(format!(
                    "{ctx}: ys[{i}] must be positive, got {y}"
                )));
            }
            if prev - y <= 1e-12 * y.max(1.0) {
                return Err(Error::validation(format!(
                    "{ctx}: ys[{i}] = {y} does not strictly decrease below {prev}"
                )));
            }
            prev = y;
        }
        Ok(())
    }
}

/// Serialized quadrant map with the axis-sign labels as JSON keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct QuadrantMap {
    #[serde(rename = "++")]
    pp: StaircaseData,
    #[serde(rename = "-+")]
    mp: StaircaseData,
    #[serde(rename = "--")]
    mm: StaircaseData,
    #[serde(rename = "+-")]
    pm: StaircaseData,
}

/// A star-shaped right-angled polygon: four staircases whose widths agree
/// across the x axis and whose heights agree across the y axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StarPolygonJson", into = "StarPolygonJson")]
pub struct StarPolygon {
    quadrants: [StaircaseData; 4],
}

#[derive(Serialize, Deserialize)]
struct StarPolygonJson {
    quadrants: QuadrantMap,
}

impl TryFrom<StarPolygonJson> for StarPolygon {
    type Error = Error;
    fn try_from(j: StarPolygonJson) -> Result<Self, Error> {
        StarPolygon::new([
            j.quadrants.pp,
            j.quadrants.mp,
            j.quadrants.mm,
            j.quadrants.pm,
        ])
    }
}

impl From<StarPolygon> for StarPolygonJson {
    fn from(p: StarPolygon) -> Self {
        let [pp, mp, mm, pm] = p.quadrants;
        StarPolygonJson {
            quadrants: QuadrantMap { pp, mp, mm, pm },
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

impl StarPolygon {
    /// Quadrant order: ++, -+, --, +-.
    pub fn new(quadrants: [StaircaseData; 4]) -> Result<Self, Error> {
        let p = StarPolygon { quadrants };
        p.validate()?;
        Ok(p)
    }

    /// All four quadrants share the same staircase.
    pub fn symmetric(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, Error> {
        let s = StaircaseData::new(xs, ys)?;
        StarPolygon::new([s.clone(), s.clone(), s.clone(), s])
    }

    pub fn quadrant(&self, q: Quadrant) -> &StaircaseData {
        &self.quadrants[q.index()]
    }

    /// Checks every staircase plus the four matching conditions.
    pub fn validate(&self) -> Result<(), Error> {
        for q in Quadrant::ALL {
            self.quadrant(q).check(&format!("quadrant {}", q.label()))?;
        }
        let pairs = [
            (Quadrant::PP, Quadrant::MP, "height y_1", true),
            (Quadrant::PM, Quadrant::MM, "height y_1", true),
            (Quadrant::PP, Quadrant::PM, "width x_k", false),
            (Quadrant::MP, Quadrant::MM, "width x_k", false),
        ];
        for (a, b, what, is_height) in pairs {
            let (va, vb) = if is_height {
                (self.quadrant(a).height(), self.quadrant(b).height())
            } else {
                (self.quadrant(a).width(), self.quadrant(b).width())
            };
            if !close(va, vb) {
                return Err(Error::validation(format!(
                    "matching condition violated: {what} of quadrant {} ({va}) != quadrant {} ({vb})",
                    a.label(),
                    b.label()
                )));
            }
        }
        Ok(())
    }

    /// All staircase lengths across quadrants.
    pub fn all_x(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.quadrants.iter().flat_map(|s| s.xs.clone()).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    /// All staircase heights across quadrants.
    pub fn all_y(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.quadrants.iter().flat_map(|s| s.ys.clone()).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    pub fn total_steps(&self) -> usize {
        self.quadrants.iter().map(|s| s.k()).sum()
    }

    /// Is the configuration-space point inside the polygon (closed)?
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let q = Quadrant::from_signs(x, y);
        let s = self.quadrant(q);
        let (ax, ay) = (x.abs(), y.abs());
        if ax > s.width() || ay > s.height() {
            return false;
        }
        for i in 0..s.k() {
            if ax <= s.xs[i] {
                return ay <= s.ys[i];
            }
        }
        false
    }
}

/// One quadrant of the transformed table.
///
/// `psi_steps` are the corner coordinates (increasing first component,
/// decreasing second) in the unit-speed frame; `xy_steps` the matching
/// configuration-space coordinates. `k_bar`/`k_under` are the 1-based
/// staircase indices delimiting the steps that survive inside the level-set
/// rectangle.
#[derive(Debug, Clone)]
pub struct QuadrantTable {
    pub k_bar: usize,
    pub k_under: usize,
    pub psi_steps: Vec<(f64, f64)>,
    pub xy_steps: Vec<(f64, f64)>,
    pub width_is_extremal: bool,
    pub height_is_extremal: bool,
}

impl QuadrantTable {
    pub fn corner_count(&self) -> usize {
        self.psi_steps.len()
    }

    pub fn concave_count(&self) -> usize {
        self.psi_steps.len() - 1
    }

    pub fn width(&self) -> f64 {
        self.psi_steps.last().unwrap().0
    }

    pub fn height(&self) -> f64 {
        self.psi_steps[0].1
    }
}

/// The transformed billiard table for one level set.
#[derive(Debug, Clone)]
pub struct BilliardTable {
    pub quadrants: [QuadrantTable; 4],
    /// T1(E1)/4: half the table width when the width is extremal.
    pub quarter_width: f64,
    /// T2(E-E1)/4.
    pub quarter_height: f64,
    pub energy: f64,
    pub partial_energy: f64,
}

impl BilliardTable {
    pub fn quadrant(&self, q: Quadrant) -> &QuadrantTable {
        &self.quadrants[q.index()]
    }

    /// A bare w x h rectangle table (every quadrant trivial). Useful for
    /// direct billiard experiments and benches.
    pub fn rectangle(w: f64, h: f64) -> BilliardTable {
        let quad = QuadrantTable {
            k_bar: 1,
            k_under: 1,
            psi_steps: vec![(w, h)],
            xy_steps: vec![(w, h)],
            width_is_extremal: true,
            height_is_extremal: true,
        };
        BilliardTable {
            quadrants: [quad.clone(), quad.clone(), quad.clone(), quad],
            quarter_width: w,
            quarter_height: h,
            energy: f64::NAN,
            partial_energy: f64::NAN,
        }
    }

    pub fn genus(&self) -> usize {
        1 + self
            .quadrants
            .iter()
            .map(QuadrantTable::concave_count)
            .sum::<usize>()
    }

    /// Is a unit-speed-frame point inside the table (closed)?
    pub fn contains_psi(&self, p1: f64, p2: f64) -> bool {
        let q = Quadrant::from_signs(p1, p2);
        let steps = &self.quadrants[q.index()].psi_steps;
        let (a1, a2) = (p1.abs(), p2.abs());
        for &(sx, sy) in steps.iter() {
            if a1 <= sx {
                return a2 <= sy;
            }
        }
        false
    }
}

/// Builds the transformed table for energies 0 < E1 < E.
pub fn build_table(
    polygon: &StarPolygon,
    v1: &Potential,
    v2: &Potential,
    energy: f64,
    partial: f64,
    q: QuadratureSpec,
) -> Result<BilliardTable, Error> {
    if !(partial > 0.0 && partial < energy) {
        return Err(Error::domain(format!(
            "build_table requires 0 < E1 < E, got E1 = {partial}, E = {energy}"
        )));
    }
    let e2 = energy - partial;
    let quarter_width = quarter_period(v1, partial, q)?;
    let quarter_height = quarter_period(v2, e2, q)?;
    let x_max = v1.x_max(partial)?;
    let y_max = v2.x_max(e2)?;

    let mut quads = Vec::with_capacity(4);
    for qd in Quadrant::ALL {
        let s = polygon.quadrant(qd);
        let k = s.k();
        let k_bar =
            s.xs.iter()
                .position(|&x| v1.eval(x) >= partial)
                .map(|i| i + 1)
                .unwrap_or(k);
        let k_under =
            s.ys.iter()
                .rposition(|&y| v2.eval(y) >= e2)
                .map(|i| i + 1)
                .unwrap_or(1);

        // Outer vertical boundary: polygon side at x_{k_bar} or the turning
        // line, whichever is closer in.
        let width_entry = |idx: usize| -> Result<((f64, f64), bool), Error> {
            let xk = s.xs[idx - 1];
            if v1.eval(xk) < partial {
                Ok(((psi(v1, xk, partial, q)?, xk), false))
            } else {
                Ok(((quarter_width, x_max), true))
            }
        };
        let height_entry = |idx: usize| -> Result<((f64, f64), bool), Error> {
            let yk = s.ys[idx - 1];
            if v2.eval(yk) < e2 {
                Ok(((psi(v2, yk, e2, q)?, yk), false))
            } else {
                Ok(((quarter_height, y_max), true))
            }
        };

        let (psi_steps, xy_steps, width_is_extremal, height_is_extremal) = if k_bar > k_under {
            let mut psi_steps = Vec::with_capacity(k_bar - k_under + 1);
            let mut xy_steps = Vec::with_capacity(k_bar - k_under + 1);
            let ((w_psi, w_xy), w_ext) = width_entry(k_bar)?;
            let ((h_psi, h_xy), h_ext) = height_entry(k_under)?;
            for idx in k_under..=k_bar {
                let (p1, x1) = if idx < k_bar {
                    let xk = s.xs[idx - 1];
                    (psi(v1, xk, partial, q)?, xk)
                } else {
                    (w_psi, w_xy)
                };
                let (p2, y2) = if idx > k_under {
                    let yk = s.ys[idx - 1];
                    (psi(v2, yk, e2, q)?, yk)
                } else {
                    (h_psi, h_xy)
                };
                psi_steps.push((p1, p2));
                xy_steps.push((x1, y2));
            }
            (psi_steps, xy_steps, w_ext, h_ext)
        } else {
            let ((w_psi, w_xy), w_ext) = width_entry(k_bar)?;
            let ((h_psi, h_xy), h_ext) = height_entry(k_under)?;
            (vec![(w_psi, h_psi)], vec![(w_xy, h_xy)], w_ext, h_ext)
        };

        quads.push(QuadrantTable {
            k_bar,
            k_under,
            psi_steps,
            xy_steps,
            width_is_extremal,
            height_is_extremal,
        });
    }
    let quadrants: [QuadrantTable; 4] = quads.try_into().expect("four quadrants");
    Ok(BilliardTable {
        quadrants,
        quarter_width,
        quarter_height,
        energy,
        partial_energy: partial,
    })
}

/// The staircase corners strictly exposed by the level set: entries (q, k)
/// with V1(x_k) < E1 < E - V2(y_{k+1}), 1-based k < k(q). Each contributes
/// one 270-degree corner to the table.
pub fn active_corners(
    polygon: &StarPolygon,
    v1: &Potential,
    v2: &Potential,
    energy: f64,
    partial: f64,
) -> Vec<(Quadrant, usize)> {
    let mut out = Vec::new();
    for qd in Quadrant::ALL {
        let s = polygon.quadrant(qd);
        for k in 1..s.k() {
            if v1.eval(s.xs[k - 1]) < partial && partial < energy - v2.eval(s.ys[k]) {
                out.push((qd, k));
            }
        }
    }
    out
}

/// Genus of the level set: one plus the number of exposed 270-degree corners.
pub fn genus(
    polygon: &StarPolygon,
    v1: &Potential,
    v2: &Potential,
    energy: f64,
    partial: f64,
) -> Result<usize, Error> {
    if !(partial > 0.0 && partial < energy) {
        return Err(Error::domain(format!(
            "genus requires 0 < E1 < E, got E1 = {partial}, E = {energy}"
        )));
    }
    Ok(1 + active_corners(polygon, v1, v2, energy, partial).len())
}

/// Largest genus the polygon can produce over all level sets.
pub fn g_max(polygon: &StarPolygon) -> usize {
    polygon.total_steps() - 3
}

/// A translation-surface singularity produced by one 270-degree corner of
/// the table; the unfolding turns it into a cone point of total angle 6 pi,
/// i.e. multiplicity 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singularity {
    pub quadrant: Quadrant,
    /// Position of the corner inside its quadrant (unsigned psi frame).
    pub psi_pos: (f64, f64),
    pub multiplicity: usize,
    pub total_angle: f64,
}

/// One singularity of multiplicity 2 (cone angle 6 pi) per concave corner;
/// their multiplicities sum to 2g - 2.
pub fn singularity_data(table: &BilliardTable) -> Vec<Singularity> {
    let mut out = Vec::new();
    for q in Quadrant::ALL {
        let steps = &table.quadrant(q).psi_steps;
        for i in 0..steps.len().saturating_sub(1) {
            out.push(Singularity {
                quadrant: q,
                psi_pos: (steps[i].0, steps[i + 1].1),
                multiplicity: 2,
                total_angle: 6.0 * std::f64::consts::PI,
            });
        }
    }
    out
}

/// Axis orientation of a wall segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WallAxis {
    /// Constant first coordinate.
    Vertical,
    /// Constant second coordinate.
    Horizontal,
}

/// One boundary segment of the table.
#[derive(Debug, Clone, Copy)]
pub struct Wall {
    pub id: usize,
    pub axis: WallAxis,
    /// The constant coordinate (signed).
    pub fixed: f64,
    /// Range of the running coordinate, lo < hi (signed).
    pub lo: f64,
    pub hi: f64,
    pub quadrant: Quadrant,
    /// True when the segment lies on the turning line |psi| = T/4: the
    /// oscillator reverses smoothly there, no physical impact occurs.
    pub turning: bool,
    /// True when the segment is the image of the polygon's outermost
    /// vertical (x_k) or horizontal (y_1) side.
    pub extremal_side: bool,
}

/// A corner of the table boundary (axis-crossing flat junctions excluded).
#[derive(Debug, Clone, Copy)]
pub struct Corner {
    pub pos: (f64, f64),
    pub concave: bool,
    pub quadrant: Quadrant,
}

/// Boundary of a table in one coordinate frame.
#[derive(Debug, Clone)]
pub struct TableBoundary {
    pub walls: Vec<Wall>,
    pub corners: Vec<Corner>,
}

impl BilliardTable {
    /// Boundary in the unit-speed (billiard) frame.
    pub fn boundary_psi(&self) -> TableBoundary {
        self.boundary_from(|q| &self.quadrant(q).psi_steps)
    }

    /// Boundary in configuration space. Walls flagged `turning` do not exist
    /// physically (they are the smooth turning lines |x| = x_max, |y| = y_max)
    /// but keep their ids so event streams match the billiard frame.
    pub fn boundary_xy(&self) -> TableBoundary {
        self.boundary_from(|q| &self.quadrant(q).xy_steps)
    }

    fn boundary_from<'a, F>(&'a self, steps_of: F) -> TableBoundary
    where
        F: Fn(Quadrant) -> &'a Vec<(f64, f64)>,
    {
        let mut walls = Vec::new();
        let mut corners = Vec::new();
        let mut id = 0usize;
        for q in Quadrant::ALL {
            let (sx, sy) = q.signs();
            let steps = steps_of(q);
            let qt = self.quadrant(q);
            let l = steps.len();
            let mut push_wall =
                |axis: WallAxis, fixed: f64, a: f64, b: f64, turning: bool, extremal: bool| {
                    walls.push(Wall {
                        id,
                        axis,
                        fixed,
                        lo: a.min(b),
                        hi: a.max(b),
                        quadrant: q,
                        turning,
                        extremal_side: extremal,
                    });
                    id += 1;
                };
            // Outer vertical side.
            push_wall(
                WallAxis::Vertical,
                sx * steps[l - 1].0,
                0.0,
                sy * steps[l - 1].1,
                qt.width_is_extremal,
                !qt.width_is_extremal,
            );
            // Staircase treads and risers, outermost step first.
            for i in (1..l).rev() {
                push_wall(
                    WallAxis::Horizontal,
                    sy * steps[i].1,
                    sx * steps[i].0,
                    sx * steps[i - 1].0,
                    false,
                    false,
                );
                push_wall(
                    WallAxis::Vertical,
                    sx * steps[i - 1].0,
                    sy * steps[i].1,
                    sy * steps[i - 1].1,
                    false,
                    false,
                );
            }
            // Top horizontal side.
            push_wall(
                WallAxis::Horizontal,
                sy * steps[0].1,
                sx * steps[0].0,
                0.0,
                qt.height_is_extremal,
                !qt.height_is_extremal,
            );
            for (i, &(a, b)) in steps.iter().enumerate() {
                corners.push(Corner {
                    pos: (sx * a, sy * b),
                    concave: false,
                    quadrant: q,
                });
                if i + 1 < l {
                    corners.push(Corner {
                        pos: (sx * a, sy * steps[i + 1].1),
                        concave: true,
                        quadrant: q,
                    });
                }
            }
        }
        TableBoundary { walls, corners }
    }
}
