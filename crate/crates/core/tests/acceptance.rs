//! Acceptance suite: one test per shipping criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them). Criteria 5-8 are
//! factored into seeded report builders so the determinism criterion can
//! re-run them byte-for-byte.

mod common;

use std::fmt::Write as _;
use std::time::Instant;

use impact_billiards::action_angle::{dt_de, psi_quadrature, quarter_period};
use impact_billiards::ergodic::{
    birkhoff_average, equidistribution_test, periodic_detect, red_green_occupancy,
    sample_phase_points, CellSupport, GridSpec,
};
use impact_billiards::flow::{billiard_flow, first_impact, physical_flow, LevelSet, Termination};
use impact_billiards::geometry::{
    build_table, g_max, genus, singularity_data, StaircaseData, StarPolygon,
};
use impact_billiards::iembd;
use impact_billiards::potential::Potential;
use impact_billiards::quadrature::QuadratureSpec;
use impact_billiards::resonance::{delta_colour, green_partition, Colour, ResonanceSpec};
use impact_billiards::rng::member_rng;
use rand::Rng;

fn report(n: usize, name: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {n:02} {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn quad(omega: f64) -> Potential {
    Potential::quadratic(omega).unwrap()
}

fn cross() -> StarPolygon {
    StarPolygon::symmetric(vec![1.0, 2.0], vec![2.0, 1.0]).unwrap()
}

#[test]
fn criterion_01_quadrature_exactness() {
    let t0 = Instant::now();
    let q = QuadratureSpec::default();
    let mut worst = 0.0f64;
    for (oi, &omega) in [0.5, 1.0, 2.0].iter().enumerate() {
        let p = quad(omega);
        let mut rng = member_rng(1001, oi as u64);
        for _ in 0..1000 {
            let e = 10f64.powf(rng.gen_range(-2.0..2.0));
            let xm = p.x_max(e).unwrap();
            let x = xm * rng.gen::<f64>();
            let exact = ((p.eval(x) / e).sqrt().min(1.0)).asin() / omega;
            let got = psi_quadrature(&p, x, e, q).unwrap();
            worst = worst.max((got - exact).abs());
        }
    }
    let pass = worst < 1e-10;
    let elapsed = t0.elapsed().as_secs_f64();
    report(
        1,
        "quadrature exactness",
        pass,
        &format!("worst |psi_quad - closed form| = {worst:.3e}, {elapsed:.2} s"),
    );
    assert!(pass, "worst deviation {worst:e}");
    assert!(elapsed < 5.0, "took {elapsed} s");
}

#[test]
fn criterion_02_genus_euler_oracle() {
    let t0 = Instant::now();
    let mut rng = member_rng(2002, 0);
    let q = QuadratureSpec::default();
    let mut cases = 0usize;
    for _ in 0..100 {
        let poly = common::random_polygon(&mut rng, 3);
        let v1 = quad(rng.gen_range(0.6..1.4));
        let v2 = quad(rng.gen_range(0.6..1.4));
        let e_cap = v1.eval(poly.all_x().last().copied().unwrap())
            + v2.eval(poly.all_y().last().copied().unwrap());
        for _ in 0..20 {
            let e = rng.gen_range(0.05..1.3 * e_cap);
            let e1 = e * rng.gen_range(0.02..0.98);
            let g_formula = genus(&poly, &v1, &v2, e, e1).unwrap();
            let table = build_table(&poly, &v1, &v2, e, e1, q).unwrap();
            assert_eq!(table.genus(), g_formula, "table corner count diverges");
            let g_euler = common::euler_genus(&table);
            assert_eq!(
                g_formula, g_euler,
                "formula {g_formula} vs Euler {g_euler} at E={e}, E1={e1}"
            );
            let mult_sum: usize = singularity_data(&table)
                .iter()
                .map(|s| s.multiplicity)
                .sum();
            assert_eq!(mult_sum, 2 * g_formula - 2, "multiplicity sum");
            assert!(g_formula <= g_max(&poly));
            cases += 1;
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    report(
        2,
        "genus vs Euler-characteristic oracle",
        true,
        &format!("{cases} randomized cases matched exactly, {elapsed:.2} s"),
    );
    assert!(elapsed < 30.0, "took {elapsed} s");
}

#[test]
fn criterion_03_conjugacy() {
    let t0 = Instant::now();
    let poly = cross();
    // non-resonant pair so generic orbits impact forever
    let v1 = quad(1.0);
    let v2 = quad(0.8 * std::f64::consts::SQRT_2);
    let q = QuadratureSpec::default();
    let mut rng = member_rng(3003, 0);
    let mut done = 0usize;
    let mut worst_dt = 0.0f64;
    while done < 10 {
        let e = rng.gen_range(1.2..2.6);
        let e1 = e * rng.gen_range(0.15..0.85);
        if iembd::nonimpacting_set(&poly, &v1, &v2, e)
            .iter()
            .any(|&(a, b)| e1 >= a && e1 <= b)
        {
            continue; // needs impacts
        }
        let level = LevelSet::new(poly.clone(), v1.clone(), v2.clone(), e, e1, q).unwrap();
        // a start whose orbit does impact soon
        let starts = sample_phase_points(&level, 8, 3100 + done as u64).unwrap();
        let boundary = level.table.boundary_psi();
        let Some(start) = starts.iter().find(|s| {
            first_impact(&boundary, &level.table, s, 40.0)
                .ok()
                .flatten()
                .is_some()
        }) else {
            continue;
        };
        let phys_start = level.from_psi(start).unwrap();
        // grow the horizon until the billiard shows > 50 impacts
        let mut t_end = 150.0;
        let bt = loop {
            let bt = billiard_flow(&level.table, start, t_end).unwrap();
            if matches!(bt.termination, Termination::CornerDeath { .. }) {
                break None;
            }
            if bt.impact_walls(&boundary).len() > 52 {
                break Some(bt);
            }
            t_end *= 2.0;
            if t_end > 3000.0 {
                break None;
            }
        };
        let Some(bt) = bt else {
            continue;
        };
        let pt = physical_flow(&level, &phys_start, bt.end_time, 2e-2, None).unwrap();
        let b_imp: Vec<(f64, usize)> = bt
            .events
            .iter()
            .filter(|ev| !boundary.walls[ev.wall].turning)
            .map(|ev| (ev.time, ev.wall))
            .collect();
        let p_imp: Vec<(f64, usize)> = pt.events.iter().map(|ev| (ev.time, ev.wall)).collect();
        assert!(b_imp.len() > 50, "only {} impacts", b_imp.len());
        assert!(
            p_imp.len() >= b_imp.len().min(51),
            "ODE flow saw {} impacts, billiard {}",
            p_imp.len(),
            b_imp.len()
        );
        for k in 0..50 {
            assert_eq!(b_imp[k].1, p_imp[k].1, "wall id mismatch at event {k}");
            let dt = (b_imp[k].0 - p_imp[k].0).abs();
            worst_dt = worst_dt.max(dt);
            assert!(dt < 1e-6, "impact time deviation {dt:e} at event {k}");
        }
        done += 1;
    }
    let elapsed = t0.elapsed().as_secs_f64();
    report(
        3,
        "billiard/ODE conjugacy",
        true,
        &format!("10 level sets, 50 events each, worst dt = {worst_dt:.2e}, {elapsed:.1} s"),
    );
    assert!(elapsed < 60.0, "took {elapsed} s");
}

/// Asymmetric cross with four distinct corner energies a = V1(x_c) in
/// {0.2, 0.35, 0.5, 0.65} and b = V2(y_c) in {0.75, 0.6, 0.45, 0.3}.
fn asymmetric_cross_for_profile() -> (StarPolygon, Potential, Potential) {
    let v1 = quad(1.0);
    let v2 = quad(0.8 * std::f64::consts::SQRT_2); // omega2^2 = 1.28
    let xc = |a: f64| (2.0 * a).sqrt();
    let yc = |b: f64| (2.0 * b / 1.28).sqrt();
    let pp = StaircaseData::new(vec![xc(0.2), 2.0], vec![1.9, yc(0.75)]).unwrap();
    let mp = StaircaseData::new(vec![xc(0.35), 2.1], vec![1.9, yc(0.6)]).unwrap();
    let mm = StaircaseData::new(vec![xc(0.5), 2.1], vec![1.8, yc(0.45)]).unwrap();
    let pm = StaircaseData::new(vec![xc(0.65), 2.0], vec![1.8, yc(0.3)]).unwrap();
    (StarPolygon::new([pp, mp, mm, pm]).unwrap(), v1, v2)
}

#[test]
fn criterion_04_genus_profile_shape() {
    let t0 = Instant::now();
    let (poly, v1, v2) = asymmetric_cross_for_profile();
    let target = g_max(&poly);
    assert_eq!(target, 5);
    let q = QuadratureSpec::default();
    let mut found: Option<(f64, Vec<usize>)> = None;
    for i in 0..56 {
        let e = 0.5 + 0.05 * i as f64;
        let part = iembd::partition(&poly, &v1, &v2, e).unwrap();
        let profile: Vec<usize> = part.intervals.iter().map(|iv| iv.genus).collect();
        let distinct = {
            let mut d = profile.clone();
            d.sort();
            d.dedup();
            d.len()
        };
        let ok = profile.first() == Some(&1)
            && profile.last() == Some(&1)
            && profile.iter().max() == Some(&target)
            && distinct >= 4;
        if ok {
            // brute-force check: the built table's corner count per interval
            for iv in &part.intervals {
                let table = build_table(&poly, &v1, &v2, e, iv.midpoint(), q).unwrap();
                assert_eq!(table.genus(), iv.genus, "table corner count");
            }
            // spot-check the maximal interval against the Euler oracle
            let top = part.intervals.iter().find(|iv| iv.genus == target).unwrap();
            let table = build_table(&poly, &v1, &v2, e, top.midpoint(), q).unwrap();
            assert_eq!(common::euler_genus(&table), target);
            found = Some((e, profile));
            break;
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let pass = found.is_some();
    let detail = match &found {
        Some((e, profile)) => format!("E = {e}: genus profile {profile:?}, {elapsed:.2} s"),
        None => "no energy produced the required profile".to_string(),
    };
    report(4, "genus profile shape", pass, &detail);
    assert!(pass);
    assert!(elapsed < 10.0, "took {elapsed} s");
}

// ---------------------------------------------------------------------------
// criteria 5-8 as seeded report builders (criterion 10 replays them)
// ---------------------------------------------------------------------------

fn criterion_05_core(seed: u64) -> (String, bool) {
    let spec = ResonanceSpec::new(1, 1, 1.0).unwrap();
    let poly = cross(); // low-energy bound = V1(1) + V2(1) = 1
    let (v1, v2) = (spec.v1(), spec.v2());
    let bound = iembd::low_energy_bound(&poly, &v1, &v2);
    let e = 0.9 * bound;
    let t1 = spec.period1();
    let q = QuadratureSpec::default();
    let mut out = String::new();
    let mut pass = true;
    let mut orbits = 0usize;
    for (j, frac) in [0.25, 0.5, 0.65, 0.8].iter().enumerate() {
        let e1 = e * frac;
        let level = LevelSet::new(poly.clone(), v1.clone(), v2.clone(), e, e1, q).unwrap();
        let starts = sample_phase_points(&level, 8, seed ^ (j as u64)).unwrap();
        let boundary = level.table.boundary_psi();
        for s in &starts {
            let traj = billiard_flow(&level.table, s, 4.2 * t1).unwrap();
            let impacts = traj.impact_walls(&boundary).len();
            let rep = periodic_detect(&traj, t1, 1e-9).unwrap();
            let ok = impacts == 0 && rep.periodic && rep.period == Some(t1);
            pass &= ok;
            orbits += 1;
            let _ = writeln!(
                out,
                "E1={e1} orbit={orbits} impacts={impacts} periodic={} defect={:e}",
                rep.periodic, rep.defect
            );
        }
    }
    let _ = writeln!(out, "orbits={orbits} all_periodic={pass}");
    (out, pass)
}

#[test]
fn criterion_05_low_energy_periodicity() {
    let t0 = Instant::now();
    let (rep, pass) = criterion_05_core(5005);
    let elapsed = t0.elapsed().as_secs_f64();
    report(
        5,
        "low-energy periodicity",
        pass,
        &format!("32 orbits periodic at T1 within 1e-9, {elapsed:.2} s"),
    );
    assert!(pass, "{rep}");
    assert!(elapsed < 10.0, "took {elapsed} s");
}

/// Symmetric thin-corner construction in a coexistence window: corner
/// energies (0.13, 0.9996) keep the removed polygons near 1% of the torus
/// so the cylinder-measure formulas match the sampled level set within the
/// stated tolerance.
fn census_level() -> (LevelSet, ResonanceSpec, f64, f64) {
    let spec = ResonanceSpec::new(1, 1, 1.0).unwrap();
    let x_c = (2.0f64 * 0.13).sqrt();
    let y_c = (2.0f64 * 0.9996).sqrt();
    let poly = StarPolygon::symmetric(vec![x_c, 2.6], vec![2.6, y_c]).unwrap();
    let (e, e1) = (2.0, 1.0);
    let level =
        LevelSet::new(poly, spec.v1(), spec.v2(), e, e1, QuadratureSpec::default()).unwrap();
    let dg = delta_colour(&level.polygon, spec, e, e1, Colour::Green).unwrap();
    let dr = delta_colour(&level.polygon, spec, e, e1, Colour::Red).unwrap();
    (level, spec, dg, dr)
}

fn criterion_06_core(seed: u64) -> (String, bool) {
    use std::f64::consts::PI;
    let (level, spec, dg, dr) = census_level();
    assert!(
        dg + dr < PI,
        "construction must sit in a coexistence window"
    );
    let partition = green_partition(spec.m, spec.n).unwrap();
    let t1 = spec.period1();
    let horizon = 1e3 * t1;
    let n = 10_000usize;
    let starts = sample_phase_points(&level, n, seed).unwrap();
    let boundary = level.table.boundary_psi();
    let outcomes = impact_billiards::parallel::map_indices(n, |i| {
        first_impact(&boundary, &level.table, &starts[i], horizon)
            .unwrap()
            .map(|(_, w)| boundary.walls[w].quadrant)
    });
    let mut never = Vec::new();
    let (mut n_green, mut n_red) = (0usize, 0usize);
    for (i, o) in outcomes.iter().enumerate() {
        match o {
            None => never.push(i),
            Some(qd) => match partition.colour_of(*qd) {
                Colour::Green => n_green += 1,
                Colour::Red => n_red += 1,
            },
        }
    }
    let frac_never = never.len() as f64 / n as f64;
    let frac_green = n_green as f64 / n as f64;
    let frac_red = n_red as f64 / n as f64;
    let pred_never = (PI - dg - dr) / PI;
    let pred_green = dg / PI;
    let pred_red = dr / PI;

    // every never-impacting sample must be periodic with period T1
    let periodic_flags = impact_billiards::parallel::map_indices(never.len(), |k| {
        let traj = billiard_flow(&level.table, &starts[never[k]], 3.5 * t1).unwrap();
        let rep = periodic_detect(&traj, t1, 1e-9).unwrap();
        rep.periodic && rep.period == Some(t1)
    });
    let all_periodic = periodic_flags.iter().all(|&b| b);

    let pass = (frac_never - pred_never).abs() < 0.01
        && (frac_green - pred_green).abs() < 0.01
        && (frac_red - pred_red).abs() < 0.01
        && all_periodic;
    let mut out = String::new();
    let _ = writeln!(out, "delta_green={dg} delta_red={dr}");
    let _ = writeln!(out, "never: predicted={pred_never} empirical={frac_never}");
    let _ = writeln!(out, "green: predicted={pred_green} empirical={frac_green}");
    let _ = writeln!(out, "red:   predicted={pred_red} empirical={frac_red}");
    let _ = writeln!(
        out,
        "never_impacting={} all_periodic_at_T1={all_periodic}",
        never.len()
    );
    (out, pass)
}

#[test]
fn criterion_06_coexistence_census() {
    let t0 = Instant::now();
    let (rep, pass) = criterion_06_core(6006);
    let elapsed = t0.elapsed().as_secs_f64();
    report(
        6,
        "coexistence Monte Carlo census",
        pass,
        &format!("{} {elapsed:.1} s", rep.lines().nth(1).unwrap_or("")),
    );
    println!("{rep}");
    assert!(pass, "{rep}");
    assert!(elapsed < 150.0, "took {elapsed} s (budget half of 5 min)");
}

fn criterion_07_core(seed: u64) -> (String, bool) {
    // bare rectangle with frequency ratio sqrt(2)
    let poly = StarPolygon::symmetric(vec![8.0], vec![8.0]).unwrap();
    let v1 = quad(std::f64::consts::SQRT_2);
    let v2 = quad(1.0);
    let (e, e1) = (1.0, 0.5);
    let level = LevelSet::new(poly, v1, v2, e, e1, QuadratureSpec::default()).unwrap();
    let t1 = 4.0 * level.table.quarter_width;
    let horizon = 1e4 * t1;
    let xm = level.v1.x_max(e1).unwrap();
    let ym = level.v2.x_max(level.e2()).unwrap();

    // three smooth separable observables with product arcsine oracles
    let fx1 = move |x: f64| (std::f64::consts::FRAC_PI_2 * x / xm).cos();
    let fy1 = move |y: f64| (std::f64::consts::FRAC_PI_2 * y / ym).cos();
    let fx2 = move |x: f64| (-x * x).exp();
    let fy2 = move |y: f64| (-0.7 * y * y).exp();
    let fx3 = move |x: f64| 1.0 + 0.5 * (1.3 * x).sin();
    let fy3 = move |y: f64| 1.0 - 0.4 * (0.9 * y).cos();
    let arcsine_mean = |g: &dyn Fn(f64) -> f64, amp: f64| -> f64 {
        // (1/pi) * integral of g(amp sin(phi)) over a half period
        let n = 400;
        let mut acc = 0.0;
        for k in 0..n {
            let phi =
                -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
            acc += g(amp * phi.sin());
        }
        acc / n as f64
    };
    let oracles = [
        arcsine_mean(&fx1, xm) * arcsine_mean(&fy1, ym),
        arcsine_mean(&fx2, xm) * arcsine_mean(&fy2, ym),
        arcsine_mean(&fx3, xm) * arcsine_mean(&fy3, ym),
    ];

    let starts = sample_phase_points(&level, 5, seed).unwrap();
    let mut out = String::new();
    let mut pass = true;
    for (si, s) in starts.iter().enumerate() {
        let traj = billiard_flow(&level.table, s, horizon).unwrap();
        let avgs = [
            birkhoff_average(&level, &traj, |x, y| fx1(x) * fy1(y), 0.01).unwrap(),
            birkhoff_average(&level, &traj, |x, y| fx2(x) * fy2(y), 0.01).unwrap(),
            birkhoff_average(&level, &traj, |x, y| fx3(x) * fy3(y), 0.01).unwrap(),
        ];
        for (k, (a, o)) in avgs.iter().zip(oracles.iter()).enumerate() {
            let dev = (a - o).abs();
            pass &= dev < 1e-2;
            let _ = writeln!(out, "orbit={si} f{k}: avg={a} oracle={o} dev={dev:e}");
        }
    }

    let grid = GridSpec::over_level_set(&level, 64, 64).unwrap();
    let rep_t = equidistribution_test(&level, &starts, &grid, horizon, 5e-2).unwrap();
    let rep_2t = equidistribution_test(&level, &starts, &grid, 2.0 * horizon, 5e-2).unwrap();
    let _ = writeln!(
        out,
        "sup_cell_error(T)={} sup_cell_error(2T)={}",
        rep_t.sup_cell_error, rep_2t.sup_cell_error
    );
    pass &= rep_t.passed && rep_2t.passed && rep_2t.sup_cell_error < rep_t.sup_cell_error;
    (out, pass)
}

#[test]
fn criterion_07_nonresonant_equidistribution() {
    let t0 = Instant::now();
    let (rep, pass) = criterion_07_core(7007);
    let elapsed = t0.elapsed().as_secs_f64();
    report(
        7,
        "non-resonant equidistribution",
        pass,
        &format!("{} {elapsed:.1} s", rep.lines().last().unwrap_or("")),
    );
    println!("{rep}");
    assert!(pass, "{rep}");
    assert!(elapsed < 60.0, "took {elapsed} s (budget half of 2 min)");
}

/// Coexistence construction with asymmetric colours: delta_red above pi/2
/// gives the red component a positive-area double-support region.
fn occupancy_level() -> (LevelSet, ResonanceSpec) {
    let spec = ResonanceSpec::new(1, 1, 1.0).unwrap();
    let green = StaircaseData::new(
        vec![(2.0f64 * 0.4854).sqrt(), 2.2],
        vec![2.2, (2.0f64 * 0.9606).sqrt()],
    )
    .unwrap();
    let red = StaircaseData::new(
        vec![(2.0f64 * 0.0009).sqrt(), 2.2],
        vec![2.2, (2.0f64 * 0.8936).sqrt()],
    )
    .unwrap();
    // order ++, -+, --, +-: green = {++, --} for m = n = 1
    let poly = StarPolygon::new([green.clone(), red.clone(), green, red]).unwrap();
    let level = LevelSet::new(
        poly,
        spec.v1(),
        spec.v2(),
        2.0,
        1.0,
        QuadratureSpec::default(),
    )
    .unwrap();
    (level, spec)
}

fn criterion_08_core(seed: u64) -> (String, bool) {
    use std::f64::consts::PI;
    let (level, spec) = occupancy_level();
    let dg = delta_colour(&level.polygon, spec, 2.0, 1.0, Colour::Green).unwrap();
    let dr = delta_colour(&level.polygon, spec, 2.0, 1.0, Colour::Red).unwrap();
    assert!(dg + dr < PI && dr > PI / 2.0, "dg={dg} dr={dr}");
    let grid = GridSpec::over_level_set(&level, 48, 48).unwrap();
    let t1 = spec.period1();
    let mut out = String::new();
    let mut pass = true;
    for colour in [Colour::Red, Colour::Green] {
        let rep =
            red_green_occupancy(&level, spec, colour, 32, 2500.0 * t1 / 4.0, &grid, seed).unwrap();
        // central symmetry of the support
        assert_eq!(rep.support.branch_pp, rep.support.branch_mm);
        let has_double = rep.support.class.contains(&CellSupport::Double);
        let ratio_ok = colour != Colour::Red || (rep.double_single_ratio - 2.0).abs() < 0.2;
        let diff_ok = rep.symmetric_difference_fraction > 0.0;
        if colour == Colour::Red {
            pass &= has_double && ratio_ok && diff_ok;
        } else {
            pass &= diff_ok;
        }
        let _ = writeln!(
            out,
            "{colour:?}: double/single ratio={} symm_diff_fraction={} double_cells={}",
            rep.double_single_ratio,
            rep.symmetric_difference_fraction,
            rep.support
                .class
                .iter()
                .filter(|c| **c == CellSupport::Double)
                .count()
        );
        // green component: same ratio test when it has double cells
        if colour == Colour::Green && has_double {
            pass &= (rep.double_single_ratio - 2.0).abs() < 0.2;
        }
    }
    let _ = writeln!(out, "delta_green={dg} delta_red={dr}");
    (out, pass)
}

#[test]
fn criterion_08_red_green_occupancy() {
    let t0 = Instant::now();
    let (rep, pass) = criterion_08_core(8008);
    let elapsed = t0.elapsed().as_secs_f64();
    report(
        8,
        "red/green non-uniform occupancy",
        pass,
        &format!("{} {elapsed:.1} s", rep.lines().next().unwrap_or("")),
    );
    println!("{rep}");
    assert!(pass, "{rep}");
    assert!(elapsed < 150.0, "took {elapsed} s (budget half of 5 min)");
}

#[test]
fn criterion_09_period_monotonicity() {
    let t0 = Instant::now();
    let p = Potential::even_polynomial(vec![0.5, 1.0]).unwrap();
    let tight = QuadratureSpec {
        nodes: 128,
        tol: 1e-13,
    };
    let mut worst = 0.0f64;
    let mut pass = true;
    for i in 0..100 {
        let e = 0.2 + 2.8 * i as f64 / 99.0;
        let d = dt_de(&p, e, tight).unwrap();
        pass &= d < 0.0;
        let h = 1e-4 * e;
        let fd = 4.0
            * (quarter_period(&p, e + h, tight).unwrap()
                - quarter_period(&p, e - h, tight).unwrap())
            / (2.0 * h);
        let dev = (d - fd).abs();
        worst = worst.max(dev);
        pass &= dev < 1e-6;
    }
    let elapsed = t0.elapsed().as_secs_f64();
    report(
        9,
        "period monotonicity",
        pass,
        &format!("dT/dE < 0 on 100 energies, worst FD deviation {worst:.2e}, {elapsed:.2} s"),
    );
    assert!(pass);
    assert!(elapsed < 10.0, "took {elapsed} s");
}

#[test]
fn criterion_10_determinism() {
    let t0 = Instant::now();
    let mut pass = true;
    for (n, f) in [
        (5usize, criterion_05_core as fn(u64) -> (String, bool)),
        (6, criterion_06_core),
        (7, criterion_07_core),
        (8, criterion_08_core),
    ] {
        let seed = 10_000 + n as u64;
        let (a, _) = f(seed);
        let (b, _) = f(seed);
        if a.as_bytes() != b.as_bytes() {
            pass = false;
            println!("criterion {n} report differs between identical runs");
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    report(
        10,
        "determinism",
        pass,
        &format!("criteria 5-8 byte-identical across reruns, {elapsed:.1} s"),
    );
    assert!(pass);
}
