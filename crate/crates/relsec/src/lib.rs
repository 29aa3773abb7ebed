//! Secrecy outage probability of cooperative relaying with threshold
//! decode-and-forward relay selection.
//!
//! The system: a source talks to a destination over a direct link and
//! through N relays while a passive eavesdropper listens; all links fade
//! independently (Rayleigh, so exponential SNRs). Relays that decode the
//! first-slot broadcast above an SNR threshold form the decoding set, one
//! of them retransmits, and both receivers combine the two copies by MRC.
//! Three relay selection rules are covered: traditional (best
//! relay-destination SNR), improved traditional (statistically weighted
//! by the eavesdropper links), and optimal (best instantaneous secrecy
//! rate).
//!
//! Three independent evaluation routes are provided and cross-checked:
//!
//! * [`analytic`] — exact closed forms for every decoding set and
//!   selection rule, assembled over all 2^N sets;
//! * [`mc`] — a seeded, bitwise-reproducible link-level Monte Carlo
//!   simulator;
//! * [`quad`] — adaptive quadrature of the defining integrals.
//!
//! [`sweep`] and [`config`] drive parameter sweeps that reproduce the
//! published figure configurations and emit CSV.
//!
//! ```
//! use relsec::{mc_estimate, secrecy_outage, LinkParams, Scheme, SecrecyConfig};
//!
//! // one relay, rates given directly (means in dB also accepted)
//! let links = LinkParams::from_rates(1.0, 1.0, vec![1.0], vec![2.0], vec![2.0])?;
//! let cfg = SecrecyConfig::new(1.0, 1.0)?;
//!
//! let analytic = secrecy_outage(&links, &cfg, Scheme::Os)?.total;
//! let simulated = mc_estimate(&links, &cfg, Scheme::Os, 100_000, 42)?;
//! assert!((analytic - simulated.mean).abs() <= 3.0 * simulated.stderr);
//! # Ok::<(), relsec::Error>(())
//! ```

pub mod analytic;
pub mod channel;
pub mod config;
pub mod dist;
mod error;
pub mod mc;
mod numeric;
pub mod quad;
pub mod sets;
pub mod sweep;

pub use analytic::{
    outage_empty_set, outage_for_set, outage_its_set, outage_os_set, outage_single_relay,
    outage_ts_set, prob_decoding_set, secrecy_outage, OutageResult, Scheme, SetOutcome,
};
pub use channel::{
    db_to_mean, mean_to_db, rate_from_mean_db, rho_from_rate, secrecy_rate, LinkParams,
    SecrecyConfig, TrialSnapshot,
};
pub use config::{emit_config, parse_config, ConfigError};
pub use dist::{hypoexp_coeffs, max_pdf_terms, HypoexpCoeffs, MaxDistTerms, MaxTerm};
pub use error::Error;
pub use mc::{
    mc_conditional_estimate, mc_decoding_set_counts, mc_estimate, mc_estimate_all_schemes,
    mc_trial, mc_trial_indicators, McEstimate, TrialRng,
};
pub use quad::{
    quad_eval, total_outage_quad, Integrand, QuadOracle, QuadOutcome, QuadratureRequest,
};
pub use sets::{enumerate_decoding_sets, DecodingSet, MAX_RELAYS};
pub use sweep::{
    emit_csv, emit_csv_path, run_sweep, Engine, Overrides, Preset, SweepSpec, PRESETS,
};
