//! Closed-form analysis of the linearized symbol around the constant state.
//!
//! All scalar functions take `τ = |ξ|²`; the symbol is radial, so this covers
//! every space dimension.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::critical_points;
use crate::error::{Error, Result};

/// The four positive model coefficients `β1, β2, λ1, λ2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ChemoParams {
    beta1: f64,
    beta2: f64,
    lambda1: f64,
    lambda2: f64,
}

#[derive(Deserialize)]
struct RawParams {
    beta1: f64,
    beta2: f64,
    lambda1: f64,
    lambda2: f64,
}

impl TryFrom<RawParams> for ChemoParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        ChemoParams::new(raw.beta1, raw.beta2, raw.lambda1, raw.lambda2)
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite and > 0, got {value}"),
        })
    }
}

/// Validates a steady-state amplitude `A > 0`.
pub fn check_amplitude(amplitude: f64) -> Result<()> {
    check_positive("A", amplitude)
}

impl ChemoParams {
    pub fn new(beta1: f64, beta2: f64, lambda1: f64, lambda2: f64) -> Result<Self> {
        check_positive("beta1", beta1)?;
        check_positive("beta2", beta2)?;
        check_positive("lambda1", lambda1)?;
        check_positive("lambda2", lambda2)?;
        Ok(Self {
            beta1,
            beta2,
            lambda1,
            lambda2,
        })
    }

    pub fn beta1(&self) -> f64 {
        self.beta1
    }
    pub fn beta2(&self) -> f64 {
        self.beta2
    }
    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }
    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    /// `(β1, β2, λ1, λ2)`.
    pub fn coefficients(&self) -> (f64, f64, f64, f64) {
        (self.beta1, self.beta2, self.lambda1, self.lambda2)
    }

    /// `β = β1/β2`.
    pub fn beta(&self) -> f64 {
        self.beta1 / self.beta2
    }

    /// `λ = λ1/λ2`.
    pub fn lambda(&self) -> f64 {
        self.lambda1 / self.lambda2
    }
}

/// A positive real or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    Unbounded,
}

impl Extended {
    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, Extended::Unbounded)
    }

    /// `x ≤ self`.
    pub fn admits(self, x: f64) -> bool {
        match self {
            Extended::Finite(v) => x <= v,
            Extended::Unbounded => true,
        }
    }

    /// `x < self`.
    pub fn strictly_exceeds(self, x: f64) -> bool {
        match self {
            Extended::Finite(v) => x < v,
            Extended::Unbounded => true,
        }
    }

    /// `f64` view, mapping the unbounded variant to `+inf`.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v:.16e}"),
            Extended::Unbounded => f.write_str("inf"),
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(v) => s.serialize_f64(*v),
            Extended::Unbounded => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Extended {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Extended::Finite(v)),
            Repr::Text(t) if t == "inf" => Ok(Extended::Unbounded),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("expected number or \"inf\", got {t:?}"))),
        }
    }
}

/// The three parameter regions distinguishing the threshold formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionCase {
    Case1,
    Case2,
    Case3,
}

impl RegionCase {
    pub fn index(self) -> u8 {
        match self {
            RegionCase::Case1 => 1,
            RegionCase::Case2 => 2,
            RegionCase::Case3 => 3,
        }
    }
}

/// Result of [`classify_case`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub case: RegionCase,
    /// `(β, λ)` lies on one of the curves `β = 1`, `β = λ`, `β = λ²`.
    pub on_boundary: bool,
}

fn nearly_equal(x: f64, y: f64) -> bool {
    (x - y).abs() <= 4.0 * f64::EPSILON * x.abs().max(y.abs())
}

/// Classifies `(β, λ)`; the first matching case wins on shared boundaries.
pub fn classify_case(params: &ChemoParams) -> Classification {
    let beta = params.beta();
    let lambda = params.lambda();
    let lambda_sq = lambda * lambda;
    let case = if beta <= 1.0 && beta <= lambda {
        RegionCase::Case1
    } else if beta > lambda && beta >= lambda_sq {
        RegionCase::Case2
    } else {
        // Remaining points satisfy β < λ² and β > 1.
        RegionCase::Case3
    };
    let on_boundary =
        nearly_equal(beta, 1.0) || nearly_equal(beta, lambda) || nearly_equal(beta, lambda_sq);
    Classification { case, on_boundary }
}

/// `f_A(τ) = −1 + A(β1/(λ1+τ) − β2/(λ2+τ))`.
pub fn f_of_tau(params: &ChemoParams, amplitude: f64, tau: f64) -> f64 {
    let (b1, b2, l1, l2) = params.coefficients();
    -1.0 + amplitude * (b1 / (l1 + tau) - b2 / (l2 + tau))
}

/// `f_A'(τ)` in factored form.
pub fn f_prime(params: &ChemoParams, amplitude: f64, tau: f64) -> f64 {
    let (_, b2, l1, l2) = params.coefficients();
    let sb = params.beta().sqrt();
    let lambda = params.lambda();
    let numer = amplitude
        * b2
        * ((1.0 + sb) * tau + l2 * (lambda + sb))
        * ((1.0 - sb) * tau - l2 * (sb - lambda));
    let d = (l1 + tau) * (l2 + tau);
    numer / (d * d)
}

fn f_double_prime(params: &ChemoParams, amplitude: f64, tau: f64) -> f64 {
    let (b1, b2, l1, l2) = params.coefficients();
    2.0 * amplitude * (b1 / (l1 + tau).powi(3) - b2 / (l2 + tau).powi(3))
}

/// `g_A(τ) = τ f_A(τ)`.
pub fn g_of_tau(params: &ChemoParams, amplitude: f64, tau: f64) -> f64 {
    tau * f_of_tau(params, amplitude, tau)
}

/// `g_A'(τ) = f_A(τ) + τ f_A'(τ)`.
pub fn g_prime(params: &ChemoParams, amplitude: f64, tau: f64) -> f64 {
    f_of_tau(params, amplitude, tau) + tau * f_prime(params, amplitude, tau)
}

/// `g_A''(τ) = 2 f_A'(τ) + τ f_A''(τ)`.
pub fn g_double_prime(params: &ChemoParams, amplitude: f64, tau: f64) -> f64 {
    2.0 * f_prime(params, amplitude, tau) + tau * f_double_prime(params, amplitude, tau)
}

/// The linearized symbol `h_A` at `|ξ|² = xi_sq`.
pub fn symbol_h(params: &ChemoParams, amplitude: f64, xi_sq: f64) -> f64 {
    let (b1, b2, l1, l2) = params.coefficients();
    -xi_sq + b1 * amplitude * xi_sq / (l1 + xi_sq) - b2 * amplitude * xi_sq / (l2 + xi_sq)
}

/// Threshold amplitude `A*` below which the symbol is nonpositive.
pub fn threshold_a_star(params: &ChemoParams) -> Result<Extended> {
    let (b1, b2, l1, l2) = params.coefficients();
    match classify_case(params).case {
        RegionCase::Case1 => Ok(Extended::Unbounded),
        RegionCase::Case2 => {
            let denom = b1 * l2 - b2 * l1;
            if denom <= 0.0 {
                return Err(Error::Internal(format!("Case2 denominator {denom} <= 0")));
            }
            Ok(Extended::Finite(l1 * l2 / denom))
        }
        RegionCase::Case3 => {
            let gap = b1.sqrt() - b2.sqrt();
            let denom = gap * gap;
            if denom <= 0.0 || l1 <= l2 {
                return Err(Error::Internal(format!(
                    "Case3 requires sqrt(beta1) != sqrt(beta2) and lambda1 > lambda2 ({params:?})"
                )));
            }
            Ok(Extended::Finite((l1 - l2) / denom))
        }
    }
}

/// Decay constant `c*` with `h_A(ξ) ≤ −c*|ξ|²` for `0 < A ≤ A*`.
pub fn decay_constant_c_star(params: &ChemoParams, amplitude: f64) -> Result<f64> {
    check_amplitude(amplitude)?;
    let (b1, b2, l1, l2) = params.coefficients();
    let a_star = threshold_a_star(params)?;
    if !a_star.admits(amplitude) {
        return Err(Error::Domain(format!(
            "c* undefined for A > A* (A = {amplitude}, A* = {a_star})"
        )));
    }
    let a_star = match a_star {
        Extended::Unbounded => return Ok(1.0),
        Extended::Finite(v) => v,
    };
    let slope = match classify_case(params).case {
        RegionCase::Case1 => unreachable!("Case1 has unbounded A*"),
        RegionCase::Case2 => (b1 * l2 - b2 * l1) / (l1 * l2),
        RegionCase::Case3 => {
            let gap = b1.sqrt() - b2.sqrt();
            gap * gap / (l1 - l2)
        }
    };
    Ok(slope * (a_star - amplitude))
}

/// Supremum of the symbol and its maximizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralBound {
    pub big_m: f64,
    pub tau_star: Option<f64>,
}

/// `M(A) = max_{τ≥0} g_A(τ)` together with the argmax `τ*` when `M > 0`.
pub fn spectral_bound_m(params: &ChemoParams, amplitude: f64) -> Result<SpectralBound> {
    check_amplitude(amplitude)?;
    if threshold_a_star(params)?.admits(amplitude) {
        return Ok(SpectralBound {
            big_m: 0.0,
            tau_star: None,
        });
    }
    let taus = critical_points(params, amplitude)?;
    let (mut tau_star, mut big_m) = taus
        .iter()
        .map(|&t| (t, g_of_tau(params, amplitude, t)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| {
            Error::Internal(format!(
                "no nonnegative critical point for A = {amplitude} > A* ({params:?})"
            ))
        })?;

    // Safeguarded Newton refinement on g'.
    for _ in 0..2 {
        let d2 = g_double_prime(params, amplitude, tau_star);
        if d2 >= 0.0 {
            break;
        }
        let next = tau_star - g_prime(params, amplitude, tau_star) / d2;
        let value = g_of_tau(params, amplitude, next);
        if next >= 0.0 && value >= big_m {
            tau_star = next;
            big_m = value;
        } else {
            break;
        }
    }

    if big_m <= 0.0 {
        if big_m < -1e-12 * (1.0 + amplitude) {
            return Err(Error::Internal(format!(
                "max g_A = {big_m} at tau = {tau_star} although A = {amplitude} exceeds A*"
            )));
        }
        // Only reachable within rounding of A = A*.
        big_m = f64::MIN_POSITIVE;
    }

    if cfg!(debug_assertions) {
        let grid_max = coarse_grid_max(params, amplitude);
        if grid_max > big_m + 1e-8 * big_m.max(1.0) {
            return Err(Error::Internal(format!(
                "closed-form M = {big_m} below grid maximum {grid_max} ({params:?}, A = {amplitude})"
            )));
        }
    }

    Ok(SpectralBound {
        big_m,
        tau_star: Some(tau_star),
    })
}

// Debug-build cross check: log grid maximum followed by golden-section polish.
fn coarse_grid_max(params: &ChemoParams, amplitude: f64) -> f64 {
    let n = 2000;
    let (lo, hi) = (1e-8f64.ln(), 1e8f64.ln());
    let grid: Vec<f64> = (0..n)
        .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
        .collect();
    let (imax, _) = grid
        .iter()
        .map(|&t| g_of_tau(params, amplitude, t))
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let a = if imax == 0 { 0.0 } else { grid[imax - 1] };
    let b = grid[(imax + 1).min(n - 1)];
    golden_section_max(|t| g_of_tau(params, amplitude, t), a, b, 200).1
}

/// Golden-section search for a maximum of a unimodal function on `[a, b]`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    [(c, fc), (d, fd), (x, fx)]
        .into_iter()
        .max_by(|u, v| u.1.total_cmp(&v.1))
        .unwrap()
}

/// Amplitude bound below which `g_A' < 0` on `[0, ∞)`, keyed on `βλ ⋛ 1`.
pub fn monotone_threshold(params: &ChemoParams) -> Extended {
    let (b1, b2, l1, l2) = params.coefficients();
    let beta = params.beta();
    let lambda = params.lambda();
    if beta * lambda <= 1.0 && beta <= lambda {
        Extended::Unbounded
    } else if beta > lambda && beta >= lambda * lambda {
        Extended::Finite(l1 * l2 / (b1 * l2 - b2 * l1))
    } else {
        let gap = (b1 * l1).cbrt() - (b2 * l2).cbrt();
        Extended::Finite((l1 - l2).powi(2) / gap.powi(3))
    }
}

/// Whether `g_A'(τ) < 0` for every `τ ≥ 0`.
pub fn is_g_monotone(params: &ChemoParams, amplitude: f64) -> bool {
    monotone_threshold(params).strictly_exceeds(amplitude)
}

/// In Case 3 at `A = A*`, the symbol vanishes at this `|ξ|²`.
pub fn threshold_zero_locus(params: &ChemoParams) -> Option<f64> {
    if classify_case(params).case != RegionCase::Case3 {
        return None;
    }
    let (b1, b2, l1, l2) = params.coefficients();
    let (s1, s2) = (b1.sqrt(), b2.sqrt());
    Some((l1 * s2 - l2 * s1) / (s1 - s2))
}

/// Everything the closed-form analysis reports for one `(params, A)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub case: RegionCase,
    pub on_boundary: bool,
    pub a_star: Extended,
    pub c_star: Option<f64>,
    pub monotone_threshold: Extended,
    pub monotone: bool,
    pub big_m: f64,
    pub tau_star: Option<f64>,
    pub amplitude: f64,
}

pub fn analyze(params: &ChemoParams, amplitude: f64) -> Result<RegionReport> {
    check_amplitude(amplitude)?;
    let class = classify_case(params);
    let a_star = threshold_a_star(params)?;
    let c_star = if a_star.admits(amplitude) {
        Some(decay_constant_c_star(params, amplitude)?).filter(|&c| c > 0.0)
    } else {
        None
    };
    let bound = spectral_bound_m(params, amplitude)?;
    Ok(RegionReport {
        case: class.case,
        on_boundary: class.on_boundary,
        a_star,
        c_star,
        monotone_threshold: monotone_threshold(params),
        monotone: is_g_monotone(params, amplitude),
        big_m: bound.big_m,
        tau_star: bound.tau_star,
        amplitude,
    })
}
