//! Real roots of the critical-point quartic of `g_A`.
//!
//! Setting `g_A'(τ) = 0` and clearing denominators gives
//! `(λ1+τ)²(λ2+τ)² = A[β1λ1(λ2+τ)² − β2λ2(λ1+τ)²]`. The shift
//! `s = τ + (λ1+λ2)/2` removes the cubic term, and the depressed quartic is
//! solved with Ferrari's factorization driven by a real root of the resolvent
//! cubic.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::regions::{g_double_prime, g_prime, ChemoParams};

/// `s⁴ + p s² + q s + r = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DepressedQuartic {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl DepressedQuartic {
    pub fn new(p: f64, q: f64, r: f64) -> Self {
        Self { p, q, r }
    }

    pub fn eval(&self, s: f64) -> f64 {
        let s2 = s * s;
        (s2 + self.p) * s2 + self.q * s + self.r
    }

    pub fn derivative(&self, s: f64) -> f64 {
        4.0 * s * s * s + 2.0 * self.p * s + self.q
    }

    /// Magnitude used to normalize residuals: `max(1, p², |q|^{4/3}, |r|)`.
    pub fn scale(&self) -> f64 {
        1f64.max(self.p * self.p)
            .max(self.q.abs().powf(4.0 / 3.0))
            .max(self.r.abs())
    }

    /// Residual of the resolvent cubic `q² − 4(y² − r)(2y − p)` at `y`.
    pub fn resolvent_residual(&self, y: f64) -> f64 {
        self.q * self.q - 4.0 * (y * y - self.r) * (2.0 * y - self.p)
    }

    fn is_finite(&self) -> bool {
        self.p.is_finite() && self.q.is_finite() && self.r.is_finite()
    }
}

/// Real roots of a depressed quartic together with the Ferrari factors used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuarticRoots {
    /// Ascending, repeated according to multiplicity.
    pub real_roots: Vec<f64>,
    pub resolvent_y: f64,
    pub factor_a: f64,
    pub factor_b: f64,
    /// Set when a quadratic factor had a (numerically) vanishing discriminant.
    pub multiple_root: bool,
}

/// Coefficients of the depressed critical-point quartic for `(params, A)`.
///
/// The constant term is `(λ1−λ2)⁴/16 − A(β1λ1−β2λ2)(λ1−λ2)²/4`, obtained by
/// substituting `τ = s − (λ1+λ2)/2` into the undepressed equation.
pub fn depressed_coeffs(params: &ChemoParams, amplitude: f64) -> DepressedQuartic {
    let (b1, b2, l1, l2) = params.coefficients();
    let a = amplitude;
    let d = l1 - l2;
    let d2 = d * d;
    let diff = b1 * l1 - b2 * l2;
    let sum = b1 * l1 + b2 * l2;
    DepressedQuartic {
        p: -0.5 * (d2 + 2.0 * a * diff),
        q: a * d * sum,
        r: d2 * d2 / 16.0 - a * diff * d2 / 4.0,
    }
}

/// A real root `y` of `q² − 4(y² − r)(2y − p) = 0`.
///
/// Returns the largest real root, which always satisfies `2y ≥ p`. Cardano's
/// formula is used when the cubic has one real root and the trigonometric form
/// otherwise; the result is polished by Newton's method on the cubic.
pub fn resolvent_cubic_root(dq: &DepressedQuartic) -> f64 {
    let DepressedQuartic { p, q, r } = *dq;
    // Monic form y³ + c2 y² + c1 y + c0.
    let c2 = -0.5 * p;
    let c1 = -r;
    let c0 = 0.5 * p * r - 0.125 * q * q;
    // y = z + p/6 gives z³ + P z + Q = 0.
    let shift = p / 6.0;
    let big_p = c1 - c2 * c2 / 3.0;
    let big_q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
    let disc = big_q * big_q / 4.0 + big_p * big_p * big_p / 27.0;

    let z = if big_p == 0.0 && big_q == 0.0 {
        0.0
    } else if disc >= 0.0 {
        let sq = disc.sqrt();
        // Avoid cancellation: compute the larger-magnitude cube root first.
        let u = (-0.5 * big_q - big_q.signum() * sq).cbrt();
        if u == 0.0 {
            0.0
        } else {
            u - big_p / (3.0 * u)
        }
    } else {
        let m = 2.0 * (-big_p / 3.0).sqrt();
        let arg = (3.0 * big_q / (big_p * m)).clamp(-1.0, 1.0);
        m * (arg.acos() / 3.0).cos()
    };
    let mut y = z + shift;

    let cubic = |y: f64| ((y + c2) * y + c1) * y + c0;
    let cubic_d = |y: f64| (3.0 * y + 2.0 * c2) * y + c1;
    for _ in 0..3 {
        let d = cubic_d(y);
        if d == 0.0 {
            break;
        }
        let next = y - cubic(y) / d;
        if !next.is_finite() || cubic(next).abs() >= cubic(y).abs() {
            break;
        }
        y = next;
    }
    y
}

fn quadratic_real_roots(b: f64, c: f64, tol: f64, out: &mut Vec<f64>) -> bool {
    // s² + b s + c = 0
    let disc = b * b - 4.0 * c;
    if disc < -tol {
        return false;
    }
    if disc <= tol {
        out.push(-0.5 * b);
        out.push(-0.5 * b);
        return true;
    }
    let sq = disc.sqrt();
    let t = -0.5 * (b + b.signum() * sq);
    if t == 0.0 {
        out.push(0.5 * sq);
        out.push(-0.5 * sq);
    } else {
        out.push(t);
        out.push(c / t);
    }
    false
}

/// All real roots of the depressed quartic via Ferrari's factorization
/// `(s² + a s + y + b)(s² − a s + y − b)`.
pub fn ferrari_real_roots(dq: &DepressedQuartic) -> Result<QuarticRoots> {
    if !dq.is_finite() {
        return Err(Error::Solver(format!("non-finite coefficients {dq:?}")));
    }
    let scale = dq.scale();
    let y = resolvent_cubic_root(dq);
    let a_sq = 2.0 * y - dq.p;

    let mut roots = Vec::with_capacity(4);
    let mut multiple = false;
    let (a, b);
    // Discriminant slack for the quadratic factors, relative to their size.
    let tol_of = |lin: f64, cst: f64| 1e-12 * (lin * lin + 4.0 * cst.abs()).max(scale.sqrt());

    if a_sq > 1e-12 * scale.sqrt() {
        a = a_sq.sqrt();
        b = -dq.q / (2.0 * a);
        multiple |= quadratic_real_roots(a, y + b, tol_of(a, y + b), &mut roots);
        multiple |= quadratic_real_roots(-a, y - b, tol_of(a, y - b), &mut roots);
    } else {
        // q ≈ 0: biquadratic w² + p w + r = 0 with w = s².
        a = 0.0;
        b = (y * y - dq.r).max(0.0).sqrt();
        let mut ws = Vec::with_capacity(2);
        multiple |= quadratic_real_roots(dq.p, dq.r, tol_of(dq.p, dq.r), &mut ws);
        for w in ws {
            if w > 0.0 {
                let s = w.sqrt();
                roots.push(-s);
                roots.push(s);
            } else if w >= -1e-12 * scale.sqrt() {
                roots.push(0.0);
                roots.push(0.0);
                multiple = true;
            }
        }
    }

    // One Newton step per root, kept only when it lowers the residual.
    for s in roots.iter_mut() {
        let d = dq.derivative(*s);
        if d != 0.0 {
            let next = *s - dq.eval(*s) / d;
            if next.is_finite() && dq.eval(next).abs() <= dq.eval(*s).abs() {
                *s = next;
            }
        }
    }
    roots.sort_by(f64::total_cmp);

    for &s in &roots {
        let res = dq.eval(s).abs();
        if res > 1e-8 * scale.max(s.abs().powi(4)) {
            return Err(Error::Solver(format!(
                "root {s} of {dq:?} has residual {res} (y = {y}, a = {a}, b = {b})"
            )));
        }
    }

    Ok(QuarticRoots {
        real_roots: roots,
        resolvent_y: y,
        factor_a: a,
        factor_b: b,
        multiple_root: multiple,
    })
}

/// Nonnegative critical points `τ` of `g_A`, ascending and deduplicated.
pub fn critical_points(params: &ChemoParams, amplitude: f64) -> Result<Vec<f64>> {
    let (_, _, l1, l2) = params.coefficients();
    let dq = depressed_coeffs(params, amplitude);
    let roots = ferrari_real_roots(&dq)?;
    let shift = 0.5 * (l1 + l2);

    let mut taus: Vec<f64> = Vec::with_capacity(4);
    for s in roots.real_roots {
        let mut tau = s - shift;
        if tau < -1e-12 {
            continue;
        }
        tau = tau.max(0.0);
        // The shift can cancel digits; refine once against g' itself.
        let d2 = g_double_prime(params, amplitude, tau);
        if d2 != 0.0 {
            let next = tau - g_prime(params, amplitude, tau) / d2;
            if next >= 0.0
                && g_prime(params, amplitude, next).abs() < g_prime(params, amplitude, tau).abs()
            {
                tau = next;
            }
        }
        if taus
            .last()
            .is_some_and(|&prev| (tau - prev).abs() <= 1e-9 * (1.0 + tau.abs()))
        {
            continue;
        }
        taus.push(tau);
    }
    taus.sort_by(f64::total_cmp);

    for &tau in &taus {
        let res = g_prime(params, amplitude, tau).abs();
        if res > 1e-7 * (1.0 + amplitude) {
            return Err(Error::Solver(format!(
                "critical point tau = {tau} leaves |g'| = {res} at A = {amplitude}"
            )));
        }
    }
    Ok(taus)
}
