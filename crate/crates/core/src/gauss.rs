//! Gaussian tail utilities shared by the quantizer, the dematcher and the
//! state evolution: Q-function, its inverse, Mills ratio, and the first two
//! log-likelihood derivatives of an interval observation of a Gaussian.
//!
//! Everything here must stay finite and well-signed arbitrarily deep in the
//! tails; the quantizer channel is deterministic, so far-tail evaluations are
//! routine rather than exceptional.

use statrs::function::erf::{erfc, erfc_inv};

pub const SQRT_2PI: f64 = 2.506_628_274_631_000_5;
const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Standard normal density.
#[inline]
pub fn phi(x: f64) -> f64 {
    if !x.is_finite() {
        return 0.0;
    }
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// Upper-tail probability Q(x) = P(Z > x) for Z ~ N(0,1).
#[inline]
pub fn q(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return 1.0;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// Inverse of the Q-function, polished with one Newton step on Q(c) = p.
///
/// The polish matters because quantile errors propagate directly into the
/// matched distribution.
pub fn q_inv(p: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "q_inv domain is [0,1], got {p}");
    if p == 0.0 {
        return f64::INFINITY;
    }
    if p == 1.0 {
        return f64::NEG_INFINITY;
    }
    let c0 = std::f64::consts::SQRT_2 * erfc_inv(2.0 * p);
    let d = phi(c0);
    if d > 0.0 {
        c0 + (q(c0) - p) / d
    } else {
        c0
    }
}

/// Mills ratio R(x) = Q(x) / phi(x) for x >= 0.
///
/// Direct division is accurate until phi underflows; past that the asymptotic
/// series takes over (optimal truncation error is negligible for x >= 20).
pub fn mills_ratio(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < 30.0 {
        q(x) / phi(x)
    } else {
        mills_series(x)
    }
}

/// Asymptotic expansion of the Mills ratio, valid for large x.
fn mills_series(x: f64) -> f64 {
    // R(x) = (1/x) (1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8 - 945/x^10)
    let ix2 = 1.0 / (x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    for _ in 0..6 {
        term *= -k * ix2;
        sum += term;
        k += 2.0;
    }
    sum / x
}

/// Series for 1 - x*R(x), the leading cancellation in the tail curvature.
fn one_minus_x_mills(x: f64) -> f64 {
    // 1 - x R(x) = 1/x^2 - 3/x^4 + 15/x^6 - 105/x^8 + ...
    let ix2 = 1.0 / (x * x);
    let mut term = ix2;
    let mut sum = ix2;
    let mut k = 3.0;
    for _ in 0..5 {
        term *= -k * ix2;
        sum += term;
        k += 2.0;
    }
    sum
}

/// Log-likelihood response of observing a standard-normal variable inside the
/// standardized interval `(lo, hi]`.
///
/// For the quantizer channel with pre-quantization mean `p` and variance
/// `eta`, symbol interval `(c_lo, c_hi]`, the standardized bounds are
/// `lo = (c_lo - p)/sqrt(eta)` and `hi = (c_hi - p)/sqrt(eta)`, and
///
/// ```text
/// g_out = score / sqrt(eta)        (d/dp log m)
/// f_out = fisher / eta             (-d^2/dp^2 log m)
/// ```
#[derive(Debug, Clone, Copy)]
pub struct IntervalResponse {
    /// Interval probability mass.
    pub mass: f64,
    /// (phi(lo) - phi(hi)) / mass.
    pub score: f64,
    /// score^2 - (lo phi(lo) - hi phi(hi)) / mass, always > 0.
    pub fisher: f64,
}

const TAIL_SWITCH: f64 = 36.0;

/// Stable interval response for standardized bounds lo < hi.
pub fn interval_response(lo: f64, hi: f64) -> IntervalResponse {
    debug_assert!(lo < hi, "interval_response needs lo < hi, got [{lo}, {hi}]");
    if hi <= -TAIL_SWITCH {
        // Mirror the deep left tail onto the right tail; the score flips
        // sign, the fisher term is mirror-invariant.
        let r = tail_response(-hi, -lo);
        return IntervalResponse {
            mass: r.mass,
            score: -r.score,
            fisher: r.fisher,
        };
    }
    if lo >= TAIL_SWITCH {
        return tail_response(lo, hi);
    }
    // Bulk branch: direct evaluation. erfc keeps full relative accuracy over
    // this range, and the difference only cancels badly once both bounds are
    // beyond TAIL_SWITCH.
    let qlo = q(lo);
    let qhi = q(hi);
    let mass = (qlo - qhi).max(f64::MIN_POSITIVE);
    let plo = phi(lo);
    let phi_hi = phi(hi);
    let score = (plo - phi_hi) / mass;
    let lo_plo = if lo.is_finite() { lo * plo } else { 0.0 };
    let hi_phi = if hi.is_finite() { hi * phi_hi } else { 0.0 };
    let v = (lo_plo - hi_phi) / mass;
    let fisher = (score * score - v).max(f64::MIN_POSITIVE);
    IntervalResponse { mass, score, fisher }
}

/// Right-tail branch: both bounds at or beyond TAIL_SWITCH. Works on scaled
/// quantities so phi(lo) never appears alone.
fn tail_response(lo: f64, hi: f64) -> IntervalResponse {
    let r_lo = mills_ratio(lo);
    // d = phi(hi)/phi(lo) = exp((lo^2 - hi^2)/2)
    let expo = if hi.is_finite() {
        0.5 * (lo - hi) * (lo + hi)
    } else {
        f64::NEG_INFINITY
    };
    let d = if expo < -745.0 { 0.0 } else { expo.exp() };
    if d == 0.0 {
        // Single-sided deep tail: score -> lo (1 + O(lo^-2)), fisher via the
        // cancellation-free series.
        let score = 1.0 / r_lo;
        let fisher = (one_minus_x_mills(lo) / (r_lo * r_lo)).max(f64::MIN_POSITIVE);
        return IntervalResponse {
            mass: phi(lo) * r_lo,
            score,
            fisher,
        };
    }
    let r_hi = mills_ratio(hi);
    let den = r_lo - d * r_hi;
    let score = (1.0 - d) / den;
    let v = (lo - hi * d) / den;
    let fisher = (score * score - v).max(f64::MIN_POSITIVE);
    IntervalResponse {
        mass: phi(lo) * den,
        score,
        fisher,
    }
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on the recurrence.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, 0.0f64);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j as f64 + 1.0) * z * p1 - j as f64 * p2) / (j as f64 + 1.0);
            }
            dp = nf * (z * p0 - p1) / (z * z - 1.0);
            let step = p0 / dp;
            z -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        weights[i] = w;
        nodes[n - 1 - i] = z;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// SplitMix64 mixing step; used to derive independent sub-seeds.
#[inline]
pub(crate) fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a stream seed for substream `index` of `seed`.
#[inline]
pub(crate) fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ index.wrapping_add(1))
}
