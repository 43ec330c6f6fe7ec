//! The rescaled travel-time coordinate psi(x, E), quarter periods and their
//! energy derivatives.
//!
//! psi(x, E) = ∫_0^x ds / (sqrt(2) sqrt(E - V(s))) is the time a unit-energy
//! oscillation takes to travel from the origin to x. In this coordinate the
//! level-set flow moves at unit speed per axis, so the confined motion
//! becomes a directional billiard at 45 degrees.
//!
//! For quadratic wells everything is closed form
//! (psi = arcsin(sqrt(V(x)/E)) / omega, quarter period pi / (2 omega)).
//! Otherwise the integral is evaluated by substituting u = V(s)/E, which
//! trades the turning-point singularity for the Jacobi weight (1-u)^(-1/2):
//!
//! * on [0, x_max(E/2)] the original integrand is smooth and Gauss-Legendre
//!   applies directly;
//! * on u in [1/2, 1] (full quarter period) Gauss-Jacobi with weight
//!   (1-u)^(-1/2) absorbs the singularity;
//! * on truncated u-intervals the further substitution u = 1 - v^2 removes
//!   the singularity analytically and tanh-sinh integrates the rest.
//!
//! The plain substituted integrand also blows up at u = 0 whenever V'(0) = 0,
//! which is why the smooth leg below u = 1/2 stays in the original variable.

use crate::error::Error;
use crate::potential::Potential;
use crate::quadrature::{
    adaptive_gauss_jacobi_upper, adaptive_gauss_legendre, tanh_sinh, QuadratureSpec,
};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// psi(x, E): strictly increasing in x, equal to the quarter period at
/// x = x_max(E). Quadratic wells use the closed form.
pub fn psi(p: &Potential, x: f64, energy: f64, q: QuadratureSpec) -> Result<f64, Error> {
    check_psi_domain(p, x, energy)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if let Some(omega) = p.quadratic_frequency() {
        let arg = (omega * x / (2.0 * energy).sqrt()).min(1.0);
        return Ok(arg.asin() / omega);
    }
    psi_quadrature(p, x, energy, q)
}

/// The quadrature path of [`psi`], usable for any potential class. Exposed
/// so the closed-form and quadrature routes can be cross-checked.
pub fn psi_quadrature(p: &Potential, x: f64, energy: f64, q: QuadratureSpec) -> Result<f64, Error> {
    check_psi_domain(p, x, energy)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let u_hi = p.eval(x) / energy;
    if u_hi >= 1.0 {
        return quarter_by_quadrature(p, energy, q);
    }
    let x_half = p.x_max(0.5 * energy)?;
    if x <= x_half {
        let f = |s: f64| (energy - p.eval(s)).max(0.0).sqrt().recip();
        let r = adaptive_gauss_legendre(&f, 0.0, x, q);
        return Ok(r.value / SQRT_2);
    }
    let smooth = smooth_leg(p, energy, x_half, q);
    // Truncated tail: u = 1 - v^2 removes the singularity.
    let v_lo = (1.0 - u_hi).sqrt();
    let f = |v: f64| 2.0 * inverse_branch_slope(p, energy * (1.0 - v * v));
    let tail = tanh_sinh(&f, v_lo, std::f64::consts::FRAC_1_SQRT_2, q.tol).value;
    Ok((smooth + energy.sqrt() * tail) / SQRT_2)
}

/// ∫_0^x_max(E/2) of the regular integrand, by Gauss-Legendre.
fn smooth_leg(p: &Potential, energy: f64, x_half: f64, q: QuadratureSpec) -> f64 {
    let f = |s: f64| (energy - p.eval(s)).max(0.0).sqrt().recip();
    adaptive_gauss_legendre(&f, 0.0, x_half, q).value
}

/// The full quarter period by quadrature: smooth leg plus the Gauss-Jacobi
/// leg over u in [1/2, 1]. Never depends on a rounded turning-point offset.
fn quarter_by_quadrature(p: &Potential, energy: f64, q: QuadratureSpec) -> Result<f64, Error> {
    let x_half = p.x_max(0.5 * energy)?;
    let smooth = smooth_leg(p, energy, x_half, q);
    let f = |u: f64| inverse_branch_slope(p, energy * u);
    let tail = adaptive_gauss_jacobi_upper(&f, 0.5, 1.0, q).value;
    Ok((smooth + energy.sqrt() * tail) / SQRT_2)
}

/// T(E)/4 = psi(x_max(E), E); equal to pi / (2 omega) for quadratic wells.
pub fn quarter_period(p: &Potential, energy: f64, q: QuadratureSpec) -> Result<f64, Error> {
    if !(energy > 0.0) {
        return Err(Error::domain(format!(
            "quarter_period requires E > 0, got {energy}"
        )));
    }
    if let Some(omega) = p.quadratic_frequency() {
        return Ok(std::f64::consts::FRAC_PI_2 / omega);
    }
    quarter_by_quadrature(p, energy, q)
}

/// d psi / dE = -(1/(2 sqrt(2))) ∫_0^x (E - V(s))^(-3/2) ds; requires
/// E > V(x) strictly (the derivative diverges to -inf at the turning point).
pub fn dpsi_de(p: &Potential, x: f64, energy: f64, q: QuadratureSpec) -> Result<f64, Error> {
    if x < 0.0 {
        return Err(Error::domain(format!("psi requires x >= 0, got {x}")));
    }
    if !(energy > p.eval(x)) {
        return Err(Error::domain(format!(
            "dpsi_de requires E > V(x); E = {energy}, V({x}) = {}",
            p.eval(x)
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if let Some(omega) = p.quadratic_frequency() {
        // d/dE arcsin(omega x / sqrt(2E)) / omega
        return Ok(-x / (2.0 * energy * (2.0 * energy - omega * omega * x * x).sqrt()));
    }
    let x_half = p.x_max(0.5 * energy)?;
    let x_smooth = x.min(x_half);
    let smooth = {
        let f = |s: f64| (energy - p.eval(s)).max(f64::MIN_POSITIVE).powf(-1.5);
        adaptive_gauss_legendre(&f, 0.0, x_smooth, q).value
    };
    let tail = if x > x_half {
        let u_hi = p.eval(x) / energy;
        let v_lo = (1.0 - u_hi).max(0.0).sqrt();
        // ∫ (x_max)'(Eu) (1-u)^(-3/2) du = 2 ∫ (x_max)'(E(1-v^2)) v^(-2) dv
        let f = |v: f64| 2.0 * inverse_branch_slope(p, energy * (1.0 - v * v)) / (v * v);
        tanh_sinh(&f, v_lo, std::f64::consts::FRAC_1_SQRT_2, q.tol).value / energy.sqrt()
    } else {
        0.0
    };
    Ok(-(smooth + tail) / (2.0 * SQRT_2))
}

/// dT/dE = (4 / (E sqrt(2))) ∫_0^x_max (E - V)^(-1/2) (1/2 - V V''/(V')^2) dx.
/// Exactly zero for quadratic wells; strictly negative when the squared
/// derivative dominates the curvature product everywhere.
pub fn dt_de(p: &Potential, energy: f64, q: QuadratureSpec) -> Result<f64, Error> {
    if !(energy > 0.0) {
        return Err(Error::domain(format!("dt_de requires E > 0, got {energy}")));
    }
    if p.quadratic_frequency().is_some() {
        return Ok(0.0);
    }
    let x_half = p.x_max(0.5 * energy)?;
    let smooth = {
        let f = |s: f64| {
            p.half_minus_curvature_ratio(s) / (energy - p.eval(s)).max(f64::MIN_POSITIVE).sqrt()
        };
        adaptive_gauss_legendre(&f, 0.0, x_half, q).value
    };
    let tail = {
        let f = |u: f64| {
            let xm = inverse_branch_point(p, energy * u);
            p.half_minus_curvature_ratio(xm) * inverse_branch_slope_at(p, xm)
        };
        energy.sqrt() * adaptive_gauss_jacobi_upper(&f, 0.5, 1.0, q).value
    };
    Ok(4.0 * (smooth + tail) / (energy * SQRT_2))
}

/// Inverse of psi(., E): the x in [0, x_max(E)] with psi(x, E) = target.
pub fn x_of_psi(p: &Potential, target: f64, energy: f64, q: QuadratureSpec) -> Result<f64, Error> {
    if !(energy > 0.0) {
        return Err(Error::domain("x_of_psi requires E > 0".to_string()));
    }
    if target < 0.0 {
        return Err(Error::domain(format!(
            "x_of_psi requires psi >= 0, got {target}"
        )));
    }
    if target == 0.0 {
        return Ok(0.0);
    }
    if let Some(omega) = p.quadratic_frequency() {
        let quarter = std::f64::consts::FRAC_PI_2 / omega;
        let t = target.min(quarter);
        return Ok((2.0 * energy).sqrt() / omega * (omega * t).sin());
    }
    let x_top = p.x_max(energy)?;
    let quarter = psi_quadrature(p, x_top, energy, q)?;
    if target >= quarter {
        return Ok(x_top);
    }
    // Safeguarded Newton: psi is strictly increasing with
    // psi'(x) = 1 / (sqrt(2) sqrt(E - V(x))).
    let (mut lo, mut hi) = (0.0f64, x_top);
    let mut x = x_top * (target / quarter);
    for _ in 0..80 {
        let f = psi_quadrature(p, x, energy, q)? - target;
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let slope_inv = SQRT_2 * (energy - p.eval(x)).max(0.0).sqrt();
        let mut next = x - f * slope_inv;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-13 * x_top {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

fn check_psi_domain(p: &Potential, x: f64, energy: f64) -> Result<(), Error> {
    if x < 0.0 {
        return Err(Error::domain(format!("psi requires x >= 0, got {x}")));
    }
    if !(energy > 0.0) {
        return Err(Error::domain(format!("psi requires E > 0, got {energy}")));
    }
    let v = p.eval(x);
    if v > energy * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "psi requires E >= V(x); E = {energy}, V({x}) = {v}"
        )));
    }
    Ok(())
}

/// (x_max)'(w) = 1 / V'(x_max(w)), the slope of the inverse branch.
fn inverse_branch_slope(p: &Potential, w: f64) -> f64 {
    inverse_branch_slope_at(p, inverse_branch_point(p, w))
}

fn inverse_branch_point(p: &Potential, w: f64) -> f64 {
    p.x_max(w.max(f64::MIN_POSITIVE))
        .expect("inverse branch point inside integration range")
}

fn inverse_branch_slope_at(p: &Potential, x: f64) -> f64 {
    p.deriv(x).recip()
}
