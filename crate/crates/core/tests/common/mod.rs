//! Shared test oracles, independent of the library's own genus route.
//!
//! The Euler oracle rebuilds the unfolded surface as a glued cell complex:
//! four reflected copies of the table boundary polygon, edges identified in
//! pairs across the reflections, vertices identified by union-find. The
//! genus then comes from chi = V - E + F, with no reference to corner
//! counting.

#![allow(dead_code)] // each test binary uses a different subset

use impact_billiards::geometry::{BilliardTable, Quadrant, StaircaseData, StarPolygon};
use rand::Rng;

/// Closed boundary cycle of the table (counterclockwise), axis junction
/// points included.
pub fn boundary_cycle(table: &BilliardTable) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = Vec::new();
    let steps = |q: Quadrant| &table.quadrant(q).psi_steps;

    let pp = steps(Quadrant::PP);
    let mp = steps(Quadrant::MP);
    let mm = steps(Quadrant::MM);
    let pm = steps(Quadrant::PM);

    // east axis point
    v.push((pp.last().unwrap().0, 0.0));
    // ++ staircase from east to north
    for i in (0..pp.len()).rev() {
        v.push((pp[i].0, pp[i].1));
        if i > 0 {
            v.push((pp[i - 1].0, pp[i].1));
        }
    }
    v.push((0.0, mp[0].1)); // north axis point
                            // -+ staircase from north to west
    for i in 0..mp.len() {
        v.push((-mp[i].0, mp[i].1));
        if i + 1 < mp.len() {
            v.push((-mp[i].0, mp[i + 1].1));
        }
    }
    v.push((-mm.last().unwrap().0, 0.0)); // west axis point
                                          // -- staircase from west to south
    for i in (0..mm.len()).rev() {
        v.push((-mm[i].0, -mm[i].1));
        if i > 0 {
            v.push((-mm[i - 1].0, -mm[i].1));
        }
    }
    v.push((0.0, -pm[0].1)); // south axis point
                             // +- staircase from south to east
    for i in 0..pm.len() {
        v.push((pm[i].0, -pm[i].1));
        if i + 1 < pm.len() {
            v.push((pm[i].0, -pm[i + 1].1));
        }
    }
    v
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    fn count_roots(&mut self, n: usize) -> usize {
        let mut roots = std::collections::HashSet::new();
        for i in 0..n {
            let r = self.find(i);
            roots.insert(r);
        }
        roots.len()
    }
}

/// Genus of the unfolded surface by Euler characteristic. Four copies of the
/// table polygon (one per direction class) are glued: a vertical edge of
/// copy s identifies with the same edge of the copy with the first sign
/// flipped, a horizontal edge with the second sign flipped. chi = V - E + F
/// with F = 4, and g = 1 - chi/2.
pub fn euler_genus(table: &BilliardTable) -> usize {
    let cycle = boundary_cycle(table);
    let n = cycle.len();
    // orientation of edge i: true when vertical (x constant)
    let vertical: Vec<bool> = (0..n)
        .map(|i| {
            let a = cycle[i];
            let b = cycle[(i + 1) % n];
            (a.0 - b.0).abs() <= 1e-12 * (1.0 + a.0.abs())
        })
        .collect();
    // copies indexed 0..4: bit 0 = horizontal flip applied, bit 1 = vertical
    let flip_v = |s: usize| s ^ 1;
    let flip_h = |s: usize| s ^ 2;
    let vid = |s: usize, i: usize| s * n + i;
    let eid = |s: usize, i: usize| s * n + i;

    let mut verts = UnionFind::new(4 * n);
    let mut edges = UnionFind::new(4 * n);
    for s in 0..4 {
        for (i, &is_vertical) in vertical.iter().enumerate() {
            let partner = if is_vertical { flip_v(s) } else { flip_h(s) };
            edges.union(eid(s, i), eid(partner, i));
            verts.union(vid(s, i), vid(partner, i));
            verts.union(vid(s, (i + 1) % n), vid(partner, (i + 1) % n));
        }
    }
    let v = verts.count_roots(4 * n) as i64;
    let e = edges.count_roots(4 * n) as i64;
    let chi = v - e + 4;
    assert!(chi <= 2 && chi % 2 == 0, "bad Euler characteristic {chi}");
    ((2 - chi) / 2) as usize
}

/// Random staircase polygon with k <= `k_max` steps per quadrant, honoring
/// the matching conditions. Coordinates keep a minimum spacing so the
/// staircases stay strictly monotone.
pub fn random_polygon<R: Rng>(rng: &mut R, k_max: usize) -> StarPolygon {
    let w_e = 1.0 + 2.0 * rng.gen::<f64>();
    let w_w = 1.0 + 2.0 * rng.gen::<f64>();
    let h_n = 1.0 + 2.0 * rng.gen::<f64>();
    let h_s = 1.0 + 2.0 * rng.gen::<f64>();
    let mut stair = |width: f64, height: f64| -> StaircaseData {
        let k = rng.gen_range(1..=k_max);
        let mut xs = Vec::with_capacity(k);
        let mut ys = Vec::with_capacity(k);
        // interior lengths strictly below the shared width
        let mut cuts: Vec<f64> = (0..k - 1)
            .map(|_| width * (0.15 + 0.7 * rng.gen::<f64>()))
            .collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup_by(|a, b| (*a - *b).abs() < 0.05 * width);
        xs.extend(cuts.iter());
        xs.push(width);
        let k = xs.len();
        let mut hs: Vec<f64> = (0..k - 1)
            .map(|_| height * (0.15 + 0.7 * rng.gen::<f64>()))
            .collect();
        hs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        hs.dedup_by(|a, b| (*a - *b).abs() < 0.05 * height);
        ys.push(height);
        ys.extend(hs.iter());
        let xs = xs.into_iter().take(ys.len()).collect::<Vec<_>>();
        let ys = ys.into_iter().take(xs.len()).collect::<Vec<_>>();
        let mut xs = xs;
        *xs.last_mut().unwrap() = width;
        StaircaseData::new(xs, ys).expect("random staircase must validate")
    };
    StarPolygon::new([
        stair(w_e, h_n),
        stair(w_w, h_n),
        stair(w_w, h_s),
        stair(w_e, h_s),
    ])
    .expect("random polygon must validate")
}
