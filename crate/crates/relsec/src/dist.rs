//! Distribution machinery: the two-rate hypoexponential (sum of two
//! independent exponentials) and the signed-exponential expansion of the
//! maximum of independent exponentials.

use crate::error::Error;
use crate::numeric::{nearly_equal, PERTURB_FACTOR};

/// Partial-fraction coefficients of the PDF of `X = X1 + X2` with
/// `X1 ~ Exp(lambda1)`, `X2 ~ Exp(lambda2)`:
///
/// ```text
/// f_X(x) = B1 exp(-lambda1 x) + B2 exp(-lambda2 x)
/// B1 = lambda1 lambda2 / (lambda2 - lambda1),  B2 = -B1
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypoexpCoeffs {
    pub lambda1: f64,
    pub lambda2: f64,
    pub b1: f64,
    pub b2: f64,
}

/// Computes the partial-fraction coefficients, nudging `lambda1` by the
/// deterministic perturbation rule when the two rates are degenerate
/// (the exact-equality case has no two-term expansion).
pub fn hypoexp_coeffs(lambda1: f64, lambda2: f64) -> Result<HypoexpCoeffs, Error> {
    if !(lambda1.is_finite() && lambda1 > 0.0 && lambda2.is_finite() && lambda2 > 0.0) {
        return Err(Error::domain(format!(
            "hypoexponential rates must be strictly positive, got ({lambda1}, {lambda2})"
        )));
    }
    let mut l1 = lambda1;
    while nearly_equal(l1, lambda2) {
        l1 *= PERTURB_FACTOR;
    }
    let b1 = l1 * lambda2 / (lambda2 - l1);
    Ok(HypoexpCoeffs {
        lambda1: l1,
        lambda2,
        b1,
        b2: -b1,
    })
}

impl HypoexpCoeffs {
    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.b1 * (-self.lambda1 * x).exp() + self.b2 * (-self.lambda2 * x).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        1.0 - self.b1 / self.lambda1 * (-self.lambda1 * x).exp()
            - self.b2 / self.lambda2 * (-self.lambda2 * x).exp()
    }
}

/// One signed exponential term of the maximum distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxTerm {
    /// `(-1)^(m+1)` for a sub-multiset of size m.
    pub sign: f64,
    /// Sum of the rates in the sub-multiset.
    pub rate: f64,
    /// Sub-multiset size m.
    pub order: usize,
}

/// Inclusion-exclusion expansion of `max` of independent exponentials with
/// the given rate weights:
///
/// ```text
/// F(y) = prod_i (1 - exp(-w_i y)) = 1 - sum_M sign_M exp(-rate_M y)
/// f(y) = sum_M sign_M rate_M exp(-rate_M y)
/// ```
///
/// over all nonempty sub-multisets M. An empty weight list is the
/// degenerate "max of nothing", a point mass at zero, which callers must
/// special-case.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxDistTerms {
    terms: Vec<MaxTerm>,
}

/// Expands the maximum distribution for the given positive weights.
/// Term count is `2^len - 1`.
pub fn max_pdf_terms(weights: &[f64]) -> Result<MaxDistTerms, Error> {
    for (i, &w) in weights.iter().enumerate() {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::domain(format!(
                "max-distribution weight [{i}] must be strictly positive, got {w}"
            )));
        }
    }
    if weights.len() >= 26 {
        return Err(Error::domain(format!(
            "refusing to expand 2^{} inclusion-exclusion terms",
            weights.len()
        )));
    }
    let n = weights.len();
    let mut terms = Vec::with_capacity((1usize << n) - 1);
    for mask in 1u32..(1u32 << n) {
        let order = mask.count_ones() as usize;
        let rate: f64 = (0..n)
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| weights[i])
            .sum();
        let sign = if order % 2 == 1 { 1.0 } else { -1.0 };
        terms.push(MaxTerm { sign, rate, order });
    }
    Ok(MaxDistTerms { terms })
}

impl MaxDistTerms {
    /// True for the degenerate "max of an empty collection" (point mass
    /// at zero).
    pub fn is_point_mass(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[MaxTerm] {
        &self.terms
    }

    /// Density at `y >= 0`. Meaningless for the point-mass case (returns 0).
    pub fn pdf(&self, y: f64) -> f64 {
        if y < 0.0 {
            return 0.0;
        }
        self.terms
            .iter()
            .map(|t| t.sign * t.rate * (-t.rate * y).exp())
            .sum()
    }

    /// Distribution function at `y`. The point-mass case yields 1 for all
    /// `y >= 0`.
    pub fn cdf(&self, y: f64) -> f64 {
        if y < 0.0 {
            return 0.0;
        }
        1.0 - self
            .terms
            .iter()
            .map(|t| t.sign * (-t.rate * y).exp())
            .sum::<f64>()
    }
}
