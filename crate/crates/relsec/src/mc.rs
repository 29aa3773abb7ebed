//! Seeded link-level Monte Carlo simulator.
//!
//! Every trial draws one exponential SNR per link, forms the decoding set
//! by thresholding the source-relay SNRs, applies the selection rule, and
//! tests the achieved secrecy rate against the target.
//!
//! Reproducibility contract: each trial derives its own random substream
//! from `(seed, trial_index)` through a counter-based generator, and all
//! draws within a trial happen in a fixed order. Estimates are therefore
//! bitwise identical for a given seed regardless of how trials are
//! distributed across threads.

use rayon::prelude::*;

use crate::channel::{secrecy_rate, LinkParams, SecrecyConfig, TrialSnapshot};
use crate::error::Error;
use crate::sets::DecodingSet;
use crate::Scheme;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic splitmix64 stream. Not cryptographic; built for
/// platform-independent reproducibility of simulations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRng {
    state: u64,
}

impl TrialRng {
    /// A plain stream keyed by `seed`.
    pub fn from_seed(seed: u64) -> Self {
        Self::for_trial(seed, 0)
    }

    /// The counter-based substream for one trial: keyed by both the seed
    /// and the trial index, so any trial can be generated independently
    /// of all others.
    pub fn for_trial(seed: u64, trial: u64) -> Self {
        let state = mix64(mix64(seed ^ GOLDEN) ^ trial.wrapping_mul(GOLDEN));
        Self { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform draw in the half-open interval (0, 1].
    pub fn next_f64(&mut self) -> f64 {
        (((self.next_u64() >> 11) + 1) as f64) * (1.0 / 9007199254740992.0)
    }

    /// Exponential draw by inverse CDF: `-ln(u)/rate` with `u in (0, 1]`.
    pub fn sample_exp(&mut self, rate: f64) -> f64 {
        -self.next_f64().ln() / rate
    }
}

/// Raw per-link SNR draws of one trial, before thresholding/selection.
/// Draw order is fixed: direct links first, then per relay (ascending)
/// the source-relay, relay-destination, relay-eavesdropper links.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkSample {
    pub gamma_sd: f64,
    pub gamma_se: f64,
    pub gamma_sk: Vec<f64>,
    pub gamma_kd: Vec<f64>,
    pub gamma_ke: Vec<f64>,
}

/// Draws every link SNR for one trial.
pub fn sample_links(links: &LinkParams, rng: &mut TrialRng) -> LinkSample {
    let n = links.relay_count();
    let gamma_sd = rng.sample_exp(links.beta_sd);
    let gamma_se = rng.sample_exp(links.alpha_se);
    let mut gamma_sk = Vec::with_capacity(n);
    let mut gamma_kd = Vec::with_capacity(n);
    let mut gamma_ke = Vec::with_capacity(n);
    for k in 0..n {
        gamma_sk.push(rng.sample_exp(links.beta_sk[k]));
        gamma_kd.push(rng.sample_exp(links.beta_kd[k]));
        gamma_ke.push(rng.sample_exp(links.alpha_ke[k]));
    }
    LinkSample {
        gamma_sd,
        gamma_se,
        gamma_sk,
        gamma_kd,
        gamma_ke,
    }
}

/// Selection weight of relay `k` under `scheme` for the given draws.
/// Ties are broken toward the lowest relay index by the caller's strict
/// `>` comparison over ascending indices.
fn selection_weight(scheme: Scheme, links: &LinkParams, sample: &LinkSample, k: usize) -> f64 {
    match scheme {
        Scheme::Ts => sample.gamma_kd[k],
        Scheme::Its => sample.gamma_kd[k] * links.alpha_ke[k],
        Scheme::Os => {
            (1.0 + sample.gamma_kd[k] + sample.gamma_sd)
                / (1.0 + sample.gamma_ke[k] + sample.gamma_se)
        }
    }
}

/// Applies threshold decoding and the selection rule to raw draws,
/// producing the round's combined SNRs.
pub fn apply_scheme(
    links: &LinkParams,
    cfg: &SecrecyConfig,
    scheme: Scheme,
    sample: &LinkSample,
) -> TrialSnapshot {
    let mut best: Option<(usize, f64)> = None;
    for k in 0..links.relay_count() {
        if sample.gamma_sk[k] > cfg.gamma_th {
            let w = selection_weight(scheme, links, sample, k);
            // strict > keeps the lowest index on ties
            if best.is_none_or(|(_, bw)| w > bw) {
                best = Some((k, w));
            }
        }
    }
    let (gamma_m, gamma_e) = match best {
        None => (sample.gamma_sd, sample.gamma_se),
        Some((k, _)) => (
            sample.gamma_sd + sample.gamma_kd[k],
            sample.gamma_se + sample.gamma_ke[k],
        ),
    };
    TrialSnapshot {
        gamma_sd: sample.gamma_sd,
        gamma_se: sample.gamma_se,
        gamma_sk: sample.gamma_sk.clone(),
        gamma_kd: sample.gamma_kd.clone(),
        gamma_ke: sample.gamma_ke.clone(),
        gamma_m,
        gamma_e,
    }
}

/// Runs one full trial: sample, threshold, select, and test for outage.
/// The indicator is 1 exactly when the achieved secrecy rate falls below
/// the target.
pub fn mc_trial(
    links: &LinkParams,
    cfg: &SecrecyConfig,
    scheme: Scheme,
    rng: &mut TrialRng,
) -> (bool, TrialSnapshot) {
    let sample = sample_links(links, rng);
    let snapshot = apply_scheme(links, cfg, scheme, &sample);
    (snapshot.secrecy_rate() < cfg.rate_rs, snapshot)
}

/// Allocation-free indicator used by the estimators. Must agree with
/// [`mc_trial`] draw for draw; `mc_matches_streaming_path` in the tests
/// pins that equivalence.
fn trial_indicator(
    links: &LinkParams,
    cfg: &SecrecyConfig,
    scheme: Scheme,
    rng: &mut TrialRng,
) -> bool {
    let gamma_sd = rng.sample_exp(links.beta_sd);
    let gamma_se = rng.sample_exp(links.alpha_se);
    let mut best_w = f64::NEG_INFINITY;
    let mut best: Option<(f64, f64)> = None;
    for k in 0..links.relay_count() {
        let gamma_sk = rng.sample_exp(links.beta_sk[k]);
        let gamma_kd = rng.sample_exp(links.beta_kd[k]);
        let gamma_ke = rng.sample_exp(links.alpha_ke[k]);
        if gamma_sk > cfg.gamma_th {
            let w = match scheme {
                Scheme::Ts => gamma_kd,
                Scheme::Its => gamma_kd * links.alpha_ke[k],
                Scheme::Os => (1.0 + gamma_kd + gamma_sd) / (1.0 + gamma_ke + gamma_se),
            };
            if best.is_none() || w > best_w {
                best_w = w;
                best = Some((gamma_kd, gamma_ke));
            }
        }
    }
    let (gamma_m, gamma_e) = match best {
        None => (gamma_sd, gamma_se),
        Some((kd, ke)) => (gamma_sd + kd, gamma_se + ke),
    };
    secrecy_rate(gamma_m, gamma_e) < cfg.rate_rs
}

/// A Monte Carlo probability estimate with its sampling error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Normal-approximation standard error `sqrt(p(1-p)/n)`.
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

fn estimate_from_count(outages: u64, trials: u64, seed: u64) -> McEstimate {
    let mean = outages as f64 / trials as f64;
    McEstimate {
        mean,
        stderr: (mean * (1.0 - mean) / trials as f64).sqrt(),
        trials,
        seed,
    }
}

/// Estimates the secrecy outage probability over `trials` independent
/// rounds. Deterministic for a fixed seed under any parallelism degree.
pub fn mc_estimate(
    links: &LinkParams,
    cfg: &SecrecyConfig,
    scheme: Scheme,
    trials: u64,
    seed: u64,
) -> Result<McEstimate, Error> {
    if trials == 0 {
        return Err(Error::domain("trial count must be >= 1"));
    }
    let outages: u64 = (0..trials as usize)
        .into_par_iter()
        .with_min_len(1 << 13)
        .map(|i| {
            let mut rng = TrialRng::for_trial(seed, i as u64);
            trial_indicator(links, cfg, scheme, &mut rng) as u64
        })
        .sum();
    Ok(estimate_from_count(outages, trials, seed))
}

/// Estimates all three schemes on the *same* sampled SNRs per trial.
/// Useful both for speed and for per-trial dominance checks.
pub fn mc_estimate_all_schemes(
    links: &LinkParams,
    cfg: &SecrecyConfig,
    trials: u64,
    seed: u64,
) -> Result<[McEstimate; 3], Error> {
    if trials == 0 {
        return Err(Error::domain("trial count must be >= 1"));
    }
    let counts: [u64; 3] = (0..trials as usize)
        .into_par_iter()
        .with_min_len(1 << 13)
        .map(|i| {
            let flags = mc_trial_indicators(links, cfg, seed, i as u64);
            [flags[0] as u64, flags[1] as u64, flags[2] as u64]
        })
        .reduce(|| [0u64; 3], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
    Ok([
        estimate_from_count(counts[0], trials, seed),
        estimate_from_count(counts[1], trials, seed),
        estimate_from_count(counts[2], trials, seed),
    ])
}

/// Per-scheme outage indicators [TS, ITS, OS] for trial `i` on a shared
/// draw stream. The same sampled SNRs feed all three selection rules, so
/// the optimal rule's indicator can never exceed the others'.
pub fn mc_trial_indicators(
    links: &LinkParams,
    cfg: &SecrecyConfig,
    seed: u64,
    trial: u64,
) -> [bool; 3] {
    let mut rng = TrialRng::for_trial(seed, trial);
    let sample = sample_links(links, &mut rng);
    [Scheme::Ts, Scheme::Its, Scheme::Os]
        .map(|scheme| apply_scheme(links, cfg, scheme, &sample).secrecy_rate() < cfg.rate_rs)
}

/// Conditional outage estimate given that exactly `set` decoded. Since
/// all links fade independently, conditioning on the threshold event
/// leaves the remaining links' distributions untouched, so the trial
/// simply skips the source-relay draws and selects within `set`.
/// Draw order: direct links, then per member (ascending) the
/// relay-destination and relay-eavesdropper links.
pub fn mc_conditional_estimate(
    links: &LinkParams,
    cfg: &SecrecyConfig,
    scheme: Scheme,
    set: &DecodingSet,
    trials: u64,
    seed: u64,
) -> Result<McEstimate, Error> {
    if trials == 0 {
        return Err(Error::domain("trial count must be >= 1"));
    }
    let members = set.members().to_vec();
    let outages: u64 = (0..trials as usize)
        .into_par_iter()
        .with_min_len(1 << 13)
        .map(|i| {
            let mut rng = TrialRng::for_trial(seed, i as u64);
            let gamma_sd = rng.sample_exp(links.beta_sd);
            let gamma_se = rng.sample_exp(links.alpha_se);
            let mut best_w = f64::NEG_INFINITY;
            let mut best: Option<(f64, f64)> = None;
            for &k in &members {
                let gamma_kd = rng.sample_exp(links.beta_kd[k]);
                let gamma_ke = rng.sample_exp(links.alpha_ke[k]);
                let w = match scheme {
                    Scheme::Ts => gamma_kd,
                    Scheme::Its => gamma_kd * links.alpha_ke[k],
                    Scheme::Os => (1.0 + gamma_kd + gamma_sd) / (1.0 + gamma_ke + gamma_se),
                };
                if best.is_none() || w > best_w {
                    best_w = w;
                    best = Some((gamma_kd, gamma_ke));
                }
            }
            let (gamma_m, gamma_e) = match best {
                None => (gamma_sd, gamma_se),
                Some((kd, ke)) => (gamma_sd + kd, gamma_se + ke),
            };
            (secrecy_rate(gamma_m, gamma_e) < cfg.rate_rs) as u64
        })
        .sum();
    Ok(estimate_from_count(outages, trials, seed))
}

/// Empirical decoding-set frequencies: counts indexed by set mask.
pub fn mc_decoding_set_counts(
    links: &LinkParams,
    cfg: &SecrecyConfig,
    trials: u64,
    seed: u64,
) -> Result<Vec<u64>, Error> {
    if trials == 0 {
        return Err(Error::domain("trial count must be >= 1"));
    }
    let n = links.relay_count();
    if n >= 26 {
        return Err(Error::domain(
            "mask histogram limited to fewer than 26 relays",
        ));
    }
    let counts = (0..trials as usize)
        .into_par_iter()
        .with_min_len(1 << 13)
        .fold(
            || vec![0u64; 1 << n],
            |mut hist, i| {
                let mut rng = TrialRng::for_trial(seed, i as u64);
                let sample = sample_links(links, &mut rng);
                let mut mask = 0usize;
                for k in 0..n {
                    if sample.gamma_sk[k] > cfg.gamma_th {
                        mask |= 1 << k;
                    }
                }
                hist[mask] += 1;
                hist
            },
        )
        .reduce(
            || vec![0u64; 1 << n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(counts)
}
