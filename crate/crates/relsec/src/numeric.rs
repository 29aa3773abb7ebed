//! Small numeric helpers shared by the analytic engine and the oracles.

/// Relative difference below which two rates are treated as degenerate.
pub(crate) const DEGENERACY_REL_TOL: f64 = 1e-9;

/// Deterministic multiplicative nudge applied to resolve a degeneracy.
pub(crate) const PERTURB_FACTOR: f64 = 1.0 + 1e-7;

/// True when `a` and `b` are too close for the closed forms' difference
/// denominators to be trustworthy.
pub(crate) fn nearly_equal(a: f64, b: f64) -> bool {
    (a - b).abs() < DEGENERACY_REL_TOL * a.abs().max(b.abs())
}

/// `(exp(-a*s) - exp(-b*s)) / (b - a)` for `s >= 0`, symmetric in `(a, b)`,
/// evaluated without cancellation. Tends to `s * exp(-a*s)` as `b -> a`.
pub(crate) fn exp_diff_ratio(a: f64, b: f64, s: f64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let d = hi - lo;
    if d == 0.0 {
        return s * (-lo * s).exp();
    }
    -(-lo * s).exp() * f64::exp_m1(-d * s) / d
}

/// `1 - exp(-x)` without cancellation for small `x`.
pub(crate) fn one_minus_exp_neg(x: f64) -> f64 {
    -f64::exp_m1(-x)
}
