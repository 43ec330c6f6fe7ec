//! Confining potentials for the two oscillators.
//!
//! Three classes are supported: exact quadratic wells, even polynomials, and
//! the flat-bottomed family `|x|^m e^(-1/|x|)`. All are even, vanish at the
//! origin and increase monotonically for x > 0 (the polynomial class admits
//! signed coefficients for curvature experiments; simulation entry points
//! reject such inputs unless monotonicity still holds on a sampled grid).

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Below this |x| the factor e^(-1/|x|) underflows to zero in f64, so the
/// glued family evaluates to exactly 0 (and so do its derivatives).
const EXP_GLUED_CUTOFF: f64 = 1.0 / 746.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Potential {
    /// V(x) = omega^2 x^2 / 2.
    Quadratic { omega: f64 },
    /// V(x) = c_1 x^2 + c_2 x^4 + ... (coefficients of the even powers).
    #[serde(rename = "even_poly")]
    EvenPolynomial { coeffs: Vec<f64> },
    /// V(x) = |x|^m e^(-1/|x|), V(0) = 0.
    ExpGlued { m: u32 },
}

/// Sampling grid for the structural checks on (0, x_hi].
#[derive(Debug, Clone, Copy)]
pub struct SampleGrid {
    pub x_hi: f64,
    pub points: usize,
}

impl SampleGrid {
    pub fn new(x_hi: f64, points: usize) -> Result<Self, Error> {
        if !(x_hi > 0.0) {
            return Err(Error::validation("sample grid upper bound must be > 0"));
        }
        if points < 1000 {
            return Err(Error::validation(format!(
                "sample grid needs >= 1000 points, got {points}"
            )));
        }
        Ok(SampleGrid { x_hi, points })
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.points;
        let hi = self.x_hi;
        (1..=n).map(move |i| hi * (i as f64) / (n as f64))
    }
}

/// Outcome of the curvature test W(x) = V(x) V''(x) - (V'(x))^2 / 2.
///
/// `satisfies_v` holds when W >= -tol on the grid (V is the square of a
/// convex function, period non-increasing in energy); `satisfies_vi` holds
/// when additionally W > tol on a positive fraction of the grid (period
/// strictly decreasing).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SquareConvexity {
    pub satisfies_v: bool,
    pub satisfies_vi: bool,
}

impl Potential {
    pub fn quadratic(omega: f64) -> Result<Self, Error> {
        if !(omega > 0.0) {
            return Err(Error::validation("quadratic frequency must be > 0"));
        }
        Ok(Potential::Quadratic { omega })
    }

    /// Even polynomial from coefficients of x^2, x^4, ... Signed coefficients
    /// are accepted here (for [`Potential::check_square_convex`] experiments);
    /// use [`Potential::check_unimodal`] before simulating.
    pub fn even_polynomial(coeffs: Vec<f64>) -> Result<Self, Error> {
        if coeffs.is_empty() || coeffs.iter().all(|&c| c == 0.0) {
            return Err(Error::validation(
                "even polynomial needs at least one nonzero coefficient",
            ));
        }
        match coeffs.last() {
            Some(&c) if c > 0.0 => {}
            _ => {
                return Err(Error::validation(
                    "even polynomial leading coefficient must be positive",
                ))
            }
        }
        if !coeffs.iter().all(|c| c.is_finite()) {
            return Err(Error::validation("even polynomial coefficient not finite"));
        }
        Ok(Potential::EvenPolynomial { coeffs })
    }

    pub fn exp_glued(m: u32) -> Result<Self, Error> {
        if m < 1 {
            return Err(Error::validation("exp-glued exponent must be >= 1"));
        }
        Ok(Potential::ExpGlued { m })
    }

    /// V(x).
    pub fn eval(&self, x: f64) -> f64 {
        let ax = x.abs();
        match self {
            Potential::Quadratic { omega } => 0.5 * omega * omega * x * x,
            Potential::EvenPolynomial { coeffs } => {
                let x2 = x * x;
                let mut acc = 0.0;
                for &c in coeffs.iter().rev() {
                    acc = acc * x2 + c;
                }
                acc * x2
            }
            Potential::ExpGlued { m } => {
                if ax < EXP_GLUED_CUTOFF {
                    0.0
                } else {
                    ax.powi(*m as i32) * (-1.0 / ax).exp()
                }
            }
        }
    }

    /// V'(x); odd by evenness of V.
    pub fn deriv(&self, x: f64) -> f64 {
        let ax = x.abs();
        let sign = if x < 0.0 { -1.0 } else { 1.0 };
        match self {
            Potential::Quadratic { omega } => omega * omega * x,
            Potential::EvenPolynomial { coeffs } => {
                let x2 = x * x;
                let mut acc = 0.0;
                for (j, &c) in coeffs.iter().enumerate().rev() {
                    let p = 2.0 * (j as f64 + 1.0);
                    acc += p * c * x2.powi(j as i32);
                }
                acc * x
            }
            Potential::ExpGlued { m } => {
                if ax < EXP_GLUED_CUTOFF {
                    0.0
                } else {
                    let m = *m as f64;
                    // d/dx [x^m e^(-1/x)] = e^(-1/x) (m x^(m-1) + x^(m-2))
                    sign * (-1.0 / ax).exp() * (m * ax.powf(m - 1.0) + ax.powf(m - 2.0))
                }
            }
        }
    }

    /// V''(x); even.
    pub fn second_deriv(&self, x: f64) -> f64 {
        let ax = x.abs();
        match self {
            Potential::Quadratic { omega } => omega * omega,
            Potential::EvenPolynomial { coeffs } => {
                let x2 = x * x;
                let mut acc = 0.0;
                for (j, &c) in coeffs.iter().enumerate() {
                    let p = 2.0 * (j as f64 + 1.0);
                    acc += p * (p - 1.0) * c * x2.powi(j as i32);
                }
                acc
            }
            Potential::ExpGlued { m } => {
                if ax < EXP_GLUED_CUTOFF {
                    0.0
                } else {
                    let m = *m as f64;
                    (-1.0 / ax).exp()
                        * (m * (m - 1.0) * ax.powf(m - 2.0)
                            + (2.0 * m - 2.0) * ax.powf(m - 3.0)
                            + ax.powf(m - 4.0))
                }
            }
        }
    }

    /// True when V is exactly a quadratic function of x (possibly expressed
    /// as a one-term even polynomial).
    pub fn is_quadratic_function(&self) -> bool {
        match self {
            Potential::Quadratic { .. } => true,
            Potential::EvenPolynomial { coeffs } => {
                coeffs.len() == 1 || coeffs.iter().skip(1).all(|&c| c == 0.0)
            }
            Potential::ExpGlued { .. } => false,
        }
    }

    /// The frequency omega when [`Self::is_quadratic_function`] holds.
    pub fn quadratic_frequency(&self) -> Option<f64> {
        match self {
            Potential::Quadratic { omega } => Some(*omega),
            Potential::EvenPolynomial { coeffs } if self.is_quadratic_function() => {
                Some((2.0 * coeffs[0]).sqrt())
            }
            _ => None,
        }
    }

    /// Inverse of the positive branch: the x > 0 with V(x) = E.
    ///
    /// Bracketed bisection to a width of `1e-14 * max(1, x)` followed by
    /// three Newton polish steps; V' > 0 keeps the bracket valid.
    pub fn x_max(&self, energy: f64) -> Result<f64, Error> {
        if !(energy > 0.0) {
            return Err(Error::domain(format!("x_max requires E > 0, got {energy}")));
        }
        if let Potential::Quadratic { omega } = self {
            return Ok((2.0 * energy).sqrt() / omega);
        }
        // Bracket [lo, hi] with V(lo) < E <= V(hi).
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        let mut guard = 0;
        while self.eval(hi) < energy {
            hi *= 2.0;
            guard += 1;
            if guard > 2100 {
                return Err(Error::domain("x_max bracket expansion failed"));
            }
        }
        while hi - lo > 1e-14 * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) < energy {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..3 {
            let d = self.deriv(x);
            if d > 0.0 {
                let step = (self.eval(x) - energy) / d;
                let next = x - step;
                if next > 0.0 && next.is_finite() {
                    x = next;
                }
            }
        }
        Ok(x)
    }

    /// Monotone-confinement check (V(0)=0, V even, V' > 0 for sampled x > 0,
    /// V increasing to the grid edge). The gate simulation entry points use.
    pub fn check_unimodal(&self, grid: SampleGrid) -> Result<(), Error> {
        if self.eval(0.0) != 0.0 {
            return Err(Error::validation("potential must vanish at the origin"));
        }
        let mut prev_v = 0.0f64;
        for x in grid.iter() {
            let v = self.eval(x);
            let vm = self.eval(-x);
            if (v - vm).abs() > 1e-12 * (1.0 + v.abs()) {
                return Err(Error::validation(format!("potential not even at x = {x}")));
            }
            // The exp-glued family underflows to an exact plateau near 0;
            // only flag genuine decreases.
            if v < prev_v - 1e-14 * (1.0 + prev_v.abs()) {
                return Err(Error::validation(format!(
                    "potential not increasing at x = {x}"
                )));
            }
            if v > 0.0 && self.deriv(x) <= 0.0 {
                return Err(Error::validation(format!(
                    "potential derivative not positive at x = {x}"
                )));
            }
            prev_v = v;
        }
        Ok(())
    }

    /// Tests W(x) = V V'' - (V')^2 / 2 on the grid with the pointwise
    /// tolerance `1e-10 (1 + |V V''| + |V'|^2)`.
    pub fn check_square_convex(&self, grid: SampleGrid) -> SquareConvexity {
        let mut all_nonneg = true;
        let mut positive = 0usize;
        let mut total = 0usize;
        for x in grid.iter() {
            let v = self.eval(x);
            let dv = self.deriv(x);
            let ddv = self.second_deriv(x);
            let w = v * ddv - 0.5 * dv * dv;
            let tol = 1e-10 * (1.0 + (v * ddv).abs() + dv * dv);
            if w < -tol {
                all_nonneg = false;
            }
            if w > tol {
                positive += 1;
            }
            total += 1;
        }
        let frac = positive as f64 / total.max(1) as f64;
        SquareConvexity {
            satisfies_v: all_nonneg,
            satisfies_vi: all_nonneg && frac > 0.01,
        }
    }

    /// 1/2 - V V'' / (V')^2, the factor in the period-derivative integrand.
    /// Guarded near x = 0 where the ratio has a finite limit.
    pub(crate) fn half_minus_curvature_ratio(&self, x: f64) -> f64 {
        match self {
            Potential::Quadratic { .. } => 0.0,
            Potential::EvenPolynomial { coeffs } => {
                let x2 = x * x;
                // ratio = (sum c_j x^(2j)) (sum p(p-1) c_j x^(2j)) / (sum p c_j x^(2j))^2
                // with p = 2(j+1); the common x^2 factor is cancelled.
                let mut num_v = 0.0;
                let mut num_dd = 0.0;
                let mut den = 0.0;
                for (j, &c) in coeffs.iter().enumerate() {
                    let p = 2.0 * (j as f64 + 1.0);
                    let xj = x2.powi(j as i32);
                    num_v += c * xj;
                    num_dd += p * (p - 1.0) * c * xj;
                    den += p * c * xj;
                }
                if den == 0.0 {
                    return 0.0;
                }
                0.5 - num_v * num_dd / (den * den)
            }
            Potential::ExpGlued { m } => {
                let ax = x.abs().max(EXP_GLUED_CUTOFF);
                let m = *m as f64;
                // ratio = (m(m-1)x^2 + (2m-2)x + 1) / (mx + 1)^2
                let num = m * (m - 1.0) * ax * ax + (2.0 * m - 2.0) * ax + 1.0;
                let den = (m * ax + 1.0).powi(2);
                0.5 - num / den
            }
        }
    }
}
