//! Numerical kernels: log-gamma, log-Beta, the standard normal CDF and its tail
//! bounds, the exact tail of a sum of two binomials, and adaptive quadrature
//! on `[0, 1]`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("argument {name} = {value} outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("quadrature did not converge: estimate {estimate}, error {error} after {intervals} intervals")]
    NoConvergence {
        estimate: f64,
        error: f64,
        intervals: usize,
    },
}

fn domain(name: &'static str, value: f64, domain: &'static str) -> SpecialError {
    SpecialError::Domain {
        name,
        value,
        domain,
    }
}

const LANCZOS_G: f64 = 10.900511;

#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 11] = [
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];

/// ln(2 * sqrt(e / pi))
const LN_2_SQRT_E_OVER_PI: f64 = 0.620_782_237_635_245_2;
const LN_PI: f64 = 1.144_729_885_849_400_2;

/// `ln Γ(x)` for `x > 0` (Lanczos approximation, reflection below 1/2).
pub fn log_gamma(x: f64) -> Result<f64, SpecialError> {
    if !x.is_finite() || x <= 0.0 {
        return Err(domain("x", x, "x > 0, finite"));
    }
    Ok(log_gamma_unchecked(x))
}

pub(crate) fn log_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        let s = LANCZOS_COEFFS
            .iter()
            .enumerate()
            .skip(1)
            .fold(LANCZOS_COEFFS[0], |s, (i, c)| s + c / (i as f64 - x));
        LN_PI
            - (PI * x).sin().ln()
            - s.ln()
            - LN_2_SQRT_E_OVER_PI
            - (0.5 - x) * ((0.5 - x + LANCZOS_G) / E).ln()
    } else {
        let s = LANCZOS_COEFFS
            .iter()
            .enumerate()
            .skip(1)
            .fold(LANCZOS_COEFFS[0], |s, (i, c)| s + c / (x + i as f64 - 1.0));
        s.ln() + LN_2_SQRT_E_OVER_PI + (x - 0.5) * ((x - 0.5 + LANCZOS_G) / E).ln()
    }
}

/// `ln B(a, b) = ln Γ(a) + ln Γ(b) - ln Γ(a + b)`.
pub fn log_beta(a: f64, b: f64) -> Result<f64, SpecialError> {
    if !a.is_finite() || a <= 0.0 {
        return Err(domain("a", a, "a > 0, finite"));
    }
    if !b.is_finite() || b <= 0.0 {
        return Err(domain("b", b, "b > 0, finite"));
    }
    Ok(log_beta_unchecked(a, b))
}

pub(crate) fn log_beta_unchecked(a: f64, b: f64) -> f64 {
    log_gamma_unchecked(a) + log_gamma_unchecked(b) - log_gamma_unchecked(a + b)
}

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Below this argument erfc is taken as 1 - erf from the power series; above
/// it the continued fraction is used so the tail keeps relative accuracy.
const ERFC_SWITCH: f64 = 2.5;

/// erf(z) for 0 <= z < ERFC_SWITCH from the all-positive series
/// erf(z) = 2/sqrt(pi) e^{-z^2} sum_n (2z^2)^n z / (1*3*...*(2n+1)).
fn erf_series(z: f64) -> f64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    let mut n = 0.0;
    while term > sum * 1e-17 {
        n += 1.0;
        term *= 2.0 * z2 / (2.0 * n + 1.0);
        sum += term;
    }
    2.0 * FRAC_1_SQRT_PI * (-z2).exp() * sum
}

/// erfc(z) for z >= ERFC_SWITCH by the Laplace continued fraction
/// erfc(z) = e^{-z^2}/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))),
/// evaluated with the modified Lentz method.
fn erfc_continued_fraction(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for k in 1..500 {
        let a = k as f64 / 2.0;
        d = z + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = z + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    FRAC_1_SQRT_PI * (-z * z).exp() / f
}

/// Complementary error function for `z >= 0`.
fn erfc_nonneg(z: f64) -> f64 {
    if z < ERFC_SWITCH {
        1.0 - erf_series(z)
    } else {
        erfc_continued_fraction(z)
    }
}

/// Standard normal density.
pub fn std_normal_pdf(t: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * t * t).exp()
}

/// Standard normal CDF `Φ(t)`. The lower tail is evaluated through erfc, so
/// `Φ(-t)` keeps relative accuracy for large `t`.
pub fn std_normal_cdf(t: f64) -> Result<f64, SpecialError> {
    if !t.is_finite() {
        return Err(domain("t", t, "finite"));
    }
    Ok(std_normal_cdf_unchecked(t))
}

pub(crate) fn std_normal_cdf_unchecked(t: f64) -> f64 {
    let z = t.abs() / std::f64::consts::SQRT_2;
    let lower = 0.5 * erfc_nonneg(z);
    if t <= 0.0 {
        lower
    } else {
        1.0 - lower
    }
}

/// Closed interval `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// Non-asymptotic bounds on the normal upper tail:
/// `(1/t - 1/t^3) φ(t) <= Φ(-t) <= φ(t)/t`. The lower end is only informative
/// for `t > 1`.
pub fn normal_tail_bounds(t: f64) -> Result<Interval, SpecialError> {
    if !t.is_finite() || t <= 0.0 {
        return Err(domain("t", t, "t > 0, finite"));
    }
    let density = std_normal_pdf(t);
    Ok(Interval {
        lower: (1.0 / t - 1.0 / (t * t * t)) * density,
        upper: density / t,
    })
}

fn check_probability(name: &'static str, p: f64) -> Result<(), SpecialError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(domain(name, p, "[0, 1]"))
    }
}

/// Probability mass function of Binomial(n, p) as a vector over 0..=n.
pub fn binomial_pmf(n: usize, p: f64) -> Result<Vec<f64>, SpecialError> {
    check_probability("p", p)?;
    if p == 0.0 || p == 1.0 {
        let mut pmf = vec![0.0; n + 1];
        pmf[if p == 0.0 { 0 } else { n }] = 1.0;
        return Ok(pmf);
    }
    let (ln_p, ln_q) = (p.ln(), (-p).ln_1p());
    let nf = n as f64;
    let ln_n_fact = log_gamma_unchecked(nf + 1.0);
    Ok((0..=n)
        .map(|k| {
            let kf = k as f64;
            let ln_choose =
                ln_n_fact - log_gamma_unchecked(kf + 1.0) - log_gamma_unchecked(nf - kf + 1.0);
            (ln_choose + kf * ln_p + (nf - kf) * ln_q).exp()
        })
        .collect())
}

/// Exact `P(A + B >= threshold)` for independent `A ~ Bin(n1, p1)` and
/// `B ~ Bin(n2, p2)`, by convolving the mass functions against a suffix sum.
pub fn binomial_sum_tail(
    n1: usize,
    p1: f64,
    n2: usize,
    p2: f64,
    threshold: usize,
) -> Result<f64, SpecialError> {
    check_probability("p1", p1)?;
    check_probability("p2", p2)?;
    if threshold == 0 {
        return Ok(1.0);
    }
    if threshold > n1 + n2 {
        return Ok(0.0);
    }
    let pmf1 = binomial_pmf(n1, p1)?;
    let pmf2 = binomial_pmf(n2, p2)?;
    // survival2[j] = P(B >= j) for j in 0..=n2+1
    let mut survival2 = vec![0.0; n2 + 2];
    for j in (0..=n2).rev() {
        survival2[j] = survival2[j + 1] + pmf2[j];
    }
    let tail = pmf1
        .iter()
        .enumerate()
        .map(|(k, &mass)| {
            let need = threshold.saturating_sub(k);
            mass * survival2[need.min(n2 + 1)]
        })
        .sum::<f64>();
    Ok(tail.min(1.0))
}

/// Settings for adaptive Gauss-Kronrod integration on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_intervals: 4000,
        }
    }
}

// 15-point Kronrod nodes on [-1, 1] (non-negative half) and weights; the odd
// indices are the embedded 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod_segment<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (k, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let pair = f(center - half * x) + f(center + half * x);
        kronrod += w * pair;
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

impl Quadrature {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }

    /// Integrates `f` over `[lo, hi]`, bisecting the segment with the largest
    /// error estimate until the summed estimate meets the tolerance.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, lo: f64, hi: f64) -> Result<f64, SpecialError> {
        if !(self.abs_tol > 0.0 || self.rel_tol > 0.0) {
            return Err(domain("tol", self.abs_tol, "tol > 0"));
        }
        let mut heap = BinaryHeap::new();
        let first = kronrod_segment(&f, lo, hi);
        let (mut total, mut error) = (first.value, first.error);
        heap.push(first);
        let mut intervals = 1;
        loop {
            if !total.is_finite() {
                return Err(SpecialError::NoConvergence {
                    estimate: total,
                    error,
                    intervals,
                });
            }
            if error <= self.abs_tol.max(self.rel_tol * total.abs()) {
                return Ok(total);
            }
            if intervals >= self.max_intervals {
                return Err(SpecialError::NoConvergence {
                    estimate: total,
                    error,
                    intervals,
                });
            }
            let worst = heap.pop().expect("heap holds every live segment");
            let mid = 0.5 * (worst.a + worst.b);
            let left = kronrod_segment(&f, worst.a, mid);
            let right = kronrod_segment(&f, mid, worst.b);
            total += left.value + right.value - worst.value;
            error += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
            intervals += 1;
            // Re-sum periodically so the running totals do not drift.
            if intervals % 64 == 0 {
                total = heap.iter().map(|s| s.value).sum();
                error = heap.iter().map(|s| s.error).sum();
            }
        }
    }
}

/// Integrates `f` over `[0, 1]` to absolute tolerance `tol`.
pub fn integrate_unit_interval<F: Fn(f64) -> f64>(f: F, tol: f64) -> Result<f64, SpecialError> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(domain("tol", tol, "tol > 0"));
    }
    Quadrature::with_abs_tol(tol).integrate(f, 0.0, 1.0)
}
