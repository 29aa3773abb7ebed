//! Closed-form secrecy outage probabilities.
//!
//! Everything here is exact algebra over the exponential link model:
//! decoding-set probabilities, the per-set conditional outage for the
//! empty set, singleton sets, and the three selection strategies, and the
//! total-probability assembly over all 2^N decoding sets.
//!
//! The closed forms assume pairwise-distinct rates wherever a difference
//! appears in a denominator. Instead of maintaining a second family of
//! confluent-limit formulas, any degenerate difference (relative gap
//! below 1e-9) is resolved by deterministically nudging the
//! lowest-canonical-index operand by a factor (1 + 1e-7); the induced
//! error is orders of magnitude below every validation tolerance.

use rayon::prelude::*;

use crate::channel::{LinkParams, SecrecyConfig};
use crate::dist::hypoexp_coeffs;
use crate::error::Error;
use crate::numeric::{exp_diff_ratio, nearly_equal, one_minus_exp_neg, PERTURB_FACTOR};
use crate::sets::{DecodingSet, MAX_RELAYS};

/// Relay selection strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Traditional selection: highest instantaneous relay-destination SNR.
    Ts,
    /// Improved traditional selection: weights the relay-destination SNR
    /// by the statistical quality of the relay-eavesdropper link
    /// (argmax of `gamma_kd * alpha_ke`).
    Its,
    /// Optimal selection: maximizes the instantaneous secrecy rate.
    Os,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Ts, Scheme::Its, Scheme::Os];

    pub fn label(&self) -> &'static str {
        match self {
            Scheme::Ts => "TS",
            Scheme::Its => "ITS",
            Scheme::Os => "OS",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_uppercase().as_str() {
            "TS" => Ok(Scheme::Ts),
            "ITS" => Ok(Scheme::Its),
            "OS" => Ok(Scheme::Os),
            other => Err(Error::domain(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Per-set decomposition of the total outage probability.
#[derive(Debug, Clone, PartialEq)]
pub struct SetOutcome {
    pub set: DecodingSet,
    /// Probability that exactly this set decodes.
    pub set_prob: f64,
    /// Conditional secrecy outage given this set decoded.
    pub conditional_outage: f64,
}

/// Total secrecy outage probability with its per-set decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct OutageResult {
    pub total: f64,
    /// Ordered by canonical set encoding (mask ascending).
    pub per_set: Vec<SetOutcome>,
}

/// Probability that exactly the relays in `set` decode:
/// members clear the threshold, the complement does not.
pub fn prob_decoding_set(links: &LinkParams, cfg: &SecrecyConfig, set: &DecodingSet) -> f64 {
    let mut p = 1.0;
    for &k in set.members() {
        p *= (-links.beta_sk[k] * cfg.gamma_th).exp();
    }
    for &j in set.complement() {
        p *= one_minus_exp_neg(links.beta_sk[j] * cfg.gamma_th);
    }
    p
}

/// Conditional outage when no relay decoded: only the direct links exist,
/// and the outage event is `gamma_sd < rho(1 + gamma_se) - 1`.
pub fn outage_empty_set(links: &LinkParams, cfg: &SecrecyConfig) -> f64 {
    let (b, a, rho) = (links.beta_sd, links.alpha_se, cfg.rho);
    1.0 - a * (-b * (rho - 1.0)).exp() / (rho * b + a)
}

/// Conditional outage when exactly relay `k` decoded. MRC adds the relay
/// contribution on both sides: the event is
/// `gamma_sd + gamma_kd < rho(1 + gamma_se + gamma_ke) - 1`.
pub fn outage_single_relay(links: &LinkParams, cfg: &SecrecyConfig, k: usize) -> f64 {
    let mut beta_sd = links.beta_sd;
    let beta_kd = links.beta_kd[k];
    while nearly_equal(beta_sd, beta_kd) {
        beta_sd *= PERTURB_FACTOR;
    }
    single_relay_outage_raw(beta_sd, beta_kd, links.alpha_se, links.alpha_ke[k], cfg.rho)
}

/// The singleton closed form, written as
/// `1 - ase*ake*[A(b_sd) + b_sd*(A(b_sd)-A(b_kd))/(b_kd-b_sd)]` with
/// `A(x) = exp(-x(rho-1))/((rho x + ase)(rho x + ake))`; the divided
/// difference is expanded so that no cancelling exponentials remain.
fn single_relay_outage_raw(beta_sd: f64, beta_kd: f64, ase: f64, ake: f64, rho: f64) -> f64 {
    let s = rho - 1.0;
    let d = |x: f64| (rho * x + ase) * (rho * x + ake);
    let a_sd = (-beta_sd * s).exp() / d(beta_sd);
    // (A(b_sd) - A(b_kd)) / (b_kd - b_sd), cancellation-free
    let slope = (d(beta_sd) * exp_diff_ratio(beta_sd, beta_kd, s)
        + (-beta_sd * s).exp() * rho * (rho * (beta_sd + beta_kd) + ase + ake))
        / (d(beta_sd) * d(beta_kd));
    1.0 - ase * ake * (a_sd + beta_sd * slope)
}

/// Rates used by one per-set evaluation after degeneracy resolution.
struct SetRates {
    beta_sd: f64,
    alpha_se: f64,
    /// (beta_kd, alpha_ke) of each set member, in member order.
    relays: Vec<(f64, f64)>,
}

fn collect_set_rates(links: &LinkParams, set: &DecodingSet) -> SetRates {
    SetRates {
        beta_sd: links.beta_sd,
        alpha_se: links.alpha_se,
        relays: set
            .members()
            .iter()
            .map(|&k| (links.beta_kd[k], links.alpha_ke[k]))
            .collect(),
    }
}

impl SetRates {
    /// TS/OS validity: `beta_sd` must differ from every nonempty subset
    /// sum of the members' `beta_kd` (subset sums are exactly the
    /// difference denominators that appear). `beta_sd` is the lowest
    /// canonical index, so it is the operand nudged.
    fn separate_beta_sd_from_subset_sums(&mut self) {
        let k = self.relays.len();
        'outer: loop {
            for mask in 1u32..(1u32 << k) {
                let sum: f64 = (0..k)
                    .filter(|&i| mask & (1 << i) != 0)
                    .map(|i| self.relays[i].0)
                    .sum();
                if nearly_equal(self.beta_sd, sum) {
                    self.beta_sd *= PERTURB_FACTOR;
                    continue 'outer;
                }
            }
            return;
        }
    }

    /// ITS validity: `beta_sd` must differ from
    /// `alpha_ke * sum_{l in M}(beta_ld/alpha_le) + beta_kd` for every
    /// selected relay k and every subset M of the remaining members
    /// (M empty covers the plain `beta_sd != beta_kd` requirement).
    fn separate_beta_sd_for_its(&mut self) {
        let k = self.relays.len();
        let weights: Vec<f64> = self.relays.iter().map(|&(bd, ae)| bd / ae).collect();
        'outer: loop {
            for sel in 0..k {
                let (beta_kd, alpha_ke) = self.relays[sel];
                let others: Vec<f64> = (0..k).filter(|&i| i != sel).map(|i| weights[i]).collect();
                for mask in 0u32..(1u32 << others.len()) {
                    let wsum: f64 = (0..others.len())
                        .filter(|&i| mask & (1 << i) != 0)
                        .map(|i| others[i])
                        .sum();
                    if nearly_equal(self.beta_sd, alpha_ke * wsum + beta_kd) {
                        self.beta_sd *= PERTURB_FACTOR;
                        continue 'outer;
                    }
                }
            }
            return;
        }
    }

    /// The hypoexponential of `gamma_se + gamma_ke` needs
    /// `alpha_se != alpha_ke` for every member; `alpha_se` is the lower
    /// canonical index.
    fn separate_alpha_se(&mut self) {
        'outer: loop {
            for &(_, ake) in &self.relays {
                if nearly_equal(self.alpha_se, ake) {
                    self.alpha_se *= PERTURB_FACTOR;
                    continue 'outer;
                }
            }
            return;
        }
    }
}

/// Conditional outage for traditional selection over a set with K >= 2
/// members; the value is the sum over members of the joint probability
/// that the member is selected (argmax of `gamma_kd`) and the combined
/// link is in outage. Empty and singleton sets route to their dedicated
/// closed forms.
pub fn outage_ts_set(links: &LinkParams, cfg: &SecrecyConfig, set: &DecodingSet) -> f64 {
    match set.len() {
        0 => outage_empty_set(links, cfg),
        1 => outage_single_relay(links, cfg, set.members()[0]),
        _ => ts_relay_split(links, cfg, set).iter().sum(),
    }
}

/// Per-selected-relay decomposition of [`outage_ts_set`], in member
/// order. Requires K >= 2.
pub fn ts_relay_split(links: &LinkParams, cfg: &SecrecyConfig, set: &DecodingSet) -> Vec<f64> {
    assert!(set.len() >= 2, "per-relay TS split needs K >= 2");
    let mut rates = collect_set_rates(links, set);
    rates.separate_alpha_se();
    rates.separate_beta_sd_from_subset_sums();
    let k = rates.relays.len();
    (0..k)
        .map(|sel| {
            let (beta_kd, alpha_ke) = rates.relays[sel];
            let others: Vec<f64> = (0..k)
                .filter(|&i| i != sel)
                .map(|i| rates.relays[i].0)
                .collect();
            let (i1, i2) = ts_selected_terms(
                rates.beta_sd,
                rates.alpha_se,
                cfg.rho,
                beta_kd,
                alpha_ke,
                &others,
            );
            i1 + i2
        })
        .collect()
}

/// The two integral pieces for one selected relay under TS, split at
/// `gamma_sd = rho - 1`. `others` holds the beta_kd of the unselected
/// members; their maximum is expanded by inclusion-exclusion over subset
/// sums `bp`.
fn ts_selected_terms(
    beta_sd: f64,
    alpha_se: f64,
    rho: f64,
    beta_kd: f64,
    alpha_ke: f64,
    others: &[f64],
) -> (f64, f64) {
    let hx = hypoexp_coeffs(alpha_se, alpha_ke).expect("positive rates");
    let s = rho - 1.0;
    let esd = (-beta_sd * s).exp();
    let n = others.len();
    let mut i1 = 0.0;
    let mut i2 = 0.0;
    for mask in 1u32..(1u32 << n) {
        let m = mask.count_ones();
        let bp: f64 = (0..n)
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| others[i])
            .sum();
        let sgn = if m % 2 == 1 { 1.0 } else { -1.0 }; // -(-1)^m
        let b = bp + beta_kd;
        for (bj, aj) in [(hx.b1, hx.lambda1), (hx.b2, hx.lambda2)] {
            i1 += sgn * bj * beta_sd * esd / (aj / rho + beta_sd)
                * (bp / (aj * b) + beta_kd / (b * (rho * b + aj)) - 1.0 / (rho * beta_kd + aj));
            let t_a = bp * one_minus_exp_neg(beta_sd * s) / (aj * b);
            let t_b = -beta_sd * exp_diff_ratio(beta_kd, beta_sd, s) / (rho * beta_kd + aj);
            let t_c = beta_sd * beta_kd * exp_diff_ratio(b, beta_sd, s) / (b * (rho * b + aj));
            i2 += sgn * bj * (t_a + t_b + t_c);
        }
    }
    (i1, i2)
}

/// Conditional outage for improved traditional selection (argmax of
/// `gamma_kd * alpha_ke`) over a set with K >= 2 members. Routing for
/// smaller sets matches [`outage_ts_set`].
pub fn outage_its_set(links: &LinkParams, cfg: &SecrecyConfig, set: &DecodingSet) -> f64 {
    match set.len() {
        0 => outage_empty_set(links, cfg),
        1 => outage_single_relay(links, cfg, set.members()[0]),
        _ => its_relay_split(links, cfg, set).iter().sum(),
    }
}

/// Per-selected-relay decomposition of [`outage_its_set`], in member
/// order. Requires K >= 2.
pub fn its_relay_split(links: &LinkParams, cfg: &SecrecyConfig, set: &DecodingSet) -> Vec<f64> {
    assert!(set.len() >= 2, "per-relay ITS split needs K >= 2");
    let mut rates = collect_set_rates(links, set);
    rates.separate_alpha_se();
    rates.separate_beta_sd_for_its();
    let k = rates.relays.len();
    (0..k)
        .map(|sel| {
            let (beta_kd, alpha_ke) = rates.relays[sel];
            let others: Vec<f64> = (0..k)
                .filter(|&i| i != sel)
                .map(|i| rates.relays[i].0 / rates.relays[i].1)
                .collect();
            let (i3, i4) = its_selected_terms(
                rates.beta_sd,
                rates.alpha_se,
                cfg.rho,
                beta_kd,
                alpha_ke,
                &others,
            );
            i3 + i4
        })
        .collect()
}

/// The two integral pieces for one selected relay under ITS. `others`
/// holds the weighted rates `beta_ld/alpha_le` of the unselected members;
/// the selection threshold rescales each subset sum by `alpha_ke`.
fn its_selected_terms(
    beta_sd: f64,
    alpha_se: f64,
    rho: f64,
    beta_kd: f64,
    alpha_ke: f64,
    others: &[f64],
) -> (f64, f64) {
    let hx = hypoexp_coeffs(alpha_se, alpha_ke).expect("positive rates");
    let s = rho - 1.0;
    let esd = (-beta_sd * s).exp();
    let pairs = [(hx.b1, hx.lambda1), (hx.b2, hx.lambda2)];
    let n = others.len();
    let mut i3 = 0.0;
    let mut i4 = 0.0;
    for mask in 1u32..(1u32 << n) {
        let m = mask.count_ones();
        let wp: f64 = (0..n)
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| others[i])
            .sum();
        let sgn = if m % 2 == 1 { 1.0 } else { -1.0 }; // -(-1)^m
        let bb = alpha_ke * wp + beta_kd;

        let p11 = beta_sd * alpha_ke * wp * esd / bb
            * pairs
                .iter()
                .map(|&(bj, aj)| bj / (aj * (aj / rho + beta_sd)))
                .sum::<f64>();
        let p12 = beta_sd * beta_kd * esd / bb
            * pairs
                .iter()
                .map(|&(bj, aj)| bj / ((aj / rho + beta_sd) * (rho * bb + aj)))
                .sum::<f64>();
        let p13 = beta_sd
            * esd
            * pairs
                .iter()
                .map(|&(bj, aj)| bj / ((aj / rho + beta_sd) * (rho * beta_kd + aj)))
                .sum::<f64>();
        i3 += sgn * (p11 + p12 - p13);

        let p21 = alpha_ke * wp / bb * one_minus_exp_neg(beta_sd * s);
        let p22 = beta_sd * beta_kd / bb
            * pairs
                .iter()
                .map(|&(bj, aj)| bj / (rho * bb + aj))
                .sum::<f64>()
            * exp_diff_ratio(beta_sd, bb, s);
        let p23 = beta_sd
            * pairs
                .iter()
                .map(|&(bj, aj)| bj / (rho * beta_kd + aj))
                .sum::<f64>()
            * exp_diff_ratio(beta_sd, beta_kd, s);
        i4 += sgn * (p21 + p22 - p23);
    }
    (i3, i4)
}

/// Conditional outage for optimal selection over a set with K >= 1
/// members: the probability that *no* member achieves the target rate,
/// which factorizes over members once the direct-link SNRs are fixed.
pub fn outage_os_set(links: &LinkParams, cfg: &SecrecyConfig, set: &DecodingSet) -> f64 {
    if set.is_empty() {
        return outage_empty_set(links, cfg);
    }
    let mut rates = collect_set_rates(links, set);
    rates.separate_beta_sd_from_subset_sums();
    os_set_outage_raw(rates.beta_sd, rates.alpha_se, cfg.rho, &rates.relays)
}

fn os_set_outage_raw(beta_sd: f64, alpha_se: f64, rho: f64, relays: &[(f64, f64)]) -> f64 {
    let s = rho - 1.0;
    let esd = (-beta_sd * s).exp();
    let d_sd = rho * beta_sd + alpha_se;

    // Region gamma_sd > rho*gamma_se + rho - 1: every member factor decays
    // in the direct-link excess.
    let sum_ake: f64 = relays.iter().map(|&(_, a)| a).sum();
    let prod: f64 = relays
        .iter()
        .map(|&(b, a)| rho * b / (rho * b + a))
        .product();
    let i5 = beta_sd * alpha_se * esd / ((sum_ake / rho + beta_sd) * d_sd) * prod;

    // Complementary region: expand the product of per-member factors
    // (1 - c_k exp(-beta_kd v)) over subsets.
    let mut i6 = 1.0 - alpha_se * esd / d_sd;
    let k = relays.len();
    for mask in 1u32..(1u32 << k) {
        let m = mask.count_ones();
        let mut c = 1.0;
        let mut bp = 0.0;
        for (i, &(b, a)) in relays.iter().enumerate() {
            if mask & (1 << i) != 0 {
                c *= a / (rho * b + a);
                bp += b;
            }
        }
        let sgn = if m % 2 == 1 { -1.0 } else { 1.0 }; // (-1)^m
                                                       // (A(beta_sd) - A(bp)) / (bp - beta_sd) with A(x) = exp(-x s)/(rho x + alpha_se),
                                                       // expanded cancellation-free.
        let diff =
            (d_sd * exp_diff_ratio(beta_sd, bp, s) + rho * esd) / (d_sd * (rho * bp + alpha_se));
        i6 += sgn * c * beta_sd * alpha_se * diff;
    }
    i5 + i6
}

/// Conditional outage of `set` under `scheme`, routing the empty set and
/// singletons to their dedicated closed forms.
pub fn outage_for_set(
    links: &LinkParams,
    cfg: &SecrecyConfig,
    scheme: Scheme,
    set: &DecodingSet,
) -> f64 {
    match set.len() {
        0 => outage_empty_set(links, cfg),
        1 => outage_single_relay(links, cfg, set.members()[0]),
        _ => match scheme {
            Scheme::Ts => outage_ts_set(links, cfg, set),
            Scheme::Its => outage_its_set(links, cfg, set),
            Scheme::Os => outage_os_set(links, cfg, set),
        },
    }
}

/// Total secrecy outage probability: exact enumeration of all 2^N
/// decoding sets, each weighted by its occurrence probability.
///
/// Per-set terms are evaluated in parallel and merged in canonical mask
/// order, so the result is bitwise reproducible regardless of thread
/// count. Errors when N exceeds the enumeration cap.
pub fn secrecy_outage(
    links: &LinkParams,
    cfg: &SecrecyConfig,
    scheme: Scheme,
) -> Result<OutageResult, Error> {
    let n = links.relay_count();
    if n > MAX_RELAYS {
        return Err(Error::TooManyRelays { n, max: MAX_RELAYS });
    }
    let masks: Vec<u32> = (0..1u32 << n).collect();
    let eval = |&mask: &u32| {
        let set = DecodingSet::from_mask(n, mask);
        let set_prob = prob_decoding_set(links, cfg, &set);
        let conditional_outage = outage_for_set(links, cfg, scheme, &set);
        SetOutcome {
            set,
            set_prob,
            conditional_outage,
        }
    };
    // Parallelism only pays off once the enumeration is sizable.
    let per_set: Vec<SetOutcome> = if masks.len() >= 64 {
        masks.par_iter().map(eval).collect()
    } else {
        masks.iter().map(eval).collect()
    };
    let total = per_set
        .iter()
        .map(|o| o.set_prob * o.conditional_outage)
        .sum();
    Ok(OutageResult { total, per_set })
}
