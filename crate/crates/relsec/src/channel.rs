//! System configuration and secrecy-rate primitives shared by every
//! selection strategy.
//!
//! All per-link SNRs are exponentially distributed (Rayleigh fading); the
//! canonical internal representation is the exponential *rate*, i.e. the
//! reciprocal of the mean SNR on a linear scale. Public constructors also
//! accept mean SNRs in dB and convert exactly once at ingestion.

use crate::error::Error;

/// Converts a dB value to its linear counterpart: `10^(x/10)`.
pub fn db_to_mean(x_db: f64) -> f64 {
    10.0_f64.powf(x_db / 10.0)
}

/// Converts a positive linear mean back to dB.
pub fn mean_to_db(mean: f64) -> f64 {
    10.0 * mean.log10()
}

/// Exponential rate of a link whose mean SNR is `mean_db` dB.
pub fn rate_from_mean_db(mean_db: f64) -> f64 {
    db_to_mean(-mean_db)
}

/// Rate-threshold factor `rho = 2^(2*Rs)`.
///
/// The factor 2 in the exponent comes from the two-slot half-duplex
/// protocol. Errors on a negative target rate.
pub fn rho_from_rate(rate_rs: f64) -> Result<f64, Error> {
    if !rate_rs.is_finite() || rate_rs < 0.0 {
        return Err(Error::domain(format!(
            "target secrecy rate must be finite and >= 0, got {rate_rs}"
        )));
    }
    Ok(2.0_f64.powf(2.0 * rate_rs))
}

/// Achievable secrecy rate for combined main/eavesdropper SNRs, in bits
/// per channel use: `max(0, 1/2 * log2((1+gamma_m)/(1+gamma_e)))`.
pub fn secrecy_rate(gamma_m: f64, gamma_e: f64) -> f64 {
    (0.5 * ((1.0 + gamma_m) / (1.0 + gamma_e)).log2()).max(0.0)
}

/// Exponential rates of every link in the system.
///
/// `beta_sd`/`alpha_se` are the direct source-destination and
/// source-eavesdropper links; the three lists hold the per-relay
/// source-relay, relay-destination, and relay-eavesdropper rates.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkParams {
    pub beta_sd: f64,
    pub alpha_se: f64,
    pub beta_sk: Vec<f64>,
    pub beta_kd: Vec<f64>,
    pub alpha_ke: Vec<f64>,
}

impl LinkParams {
    /// Builds from raw exponential rates, validating that every rate is
    /// strictly positive and finite and that the lists agree in length.
    pub fn from_rates(
        beta_sd: f64,
        alpha_se: f64,
        beta_sk: Vec<f64>,
        beta_kd: Vec<f64>,
        alpha_ke: Vec<f64>,
    ) -> Result<Self, Error> {
        if beta_sk.len() != beta_kd.len() || beta_sk.len() != alpha_ke.len() {
            return Err(Error::domain(format!(
                "per-relay rate lists must have equal length, got {}/{}/{}",
                beta_sk.len(),
                beta_kd.len(),
                alpha_ke.len()
            )));
        }
        let check = |name: &str, v: f64| -> Result<(), Error> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::domain(format!(
                    "rate {name} must be strictly positive and finite, got {v}"
                )))
            }
        };
        check("beta_sd", beta_sd)?;
        check("alpha_se", alpha_se)?;
        for (i, &v) in beta_sk.iter().enumerate() {
            check(&format!("beta_sk[{i}]"), v)?;
        }
        for (i, &v) in beta_kd.iter().enumerate() {
            check(&format!("beta_kd[{i}]"), v)?;
        }
        for (i, &v) in alpha_ke.iter().enumerate() {
            check(&format!("alpha_ke[{i}]"), v)?;
        }
        Ok(Self {
            beta_sd,
            alpha_se,
            beta_sk,
            beta_kd,
            alpha_ke,
        })
    }

    /// Builds from mean SNRs in dB (the usual way link budgets are quoted);
    /// each rate is the reciprocal of the linear mean.
    pub fn from_means_db(
        sd_db: f64,
        se_db: f64,
        sk_db: &[f64],
        kd_db: &[f64],
        ke_db: &[f64],
    ) -> Result<Self, Error> {
        Self::from_rates(
            rate_from_mean_db(sd_db),
            rate_from_mean_db(se_db),
            sk_db.iter().map(|&d| rate_from_mean_db(d)).collect(),
            kd_db.iter().map(|&d| rate_from_mean_db(d)).collect(),
            ke_db.iter().map(|&d| rate_from_mean_db(d)).collect(),
        )
    }

    pub fn relay_count(&self) -> usize {
        self.beta_sk.len()
    }
}

/// Target secrecy rate plus the derived threshold quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecrecyConfig {
    /// Target secrecy rate in bits per channel use.
    pub rate_rs: f64,
    /// `2^(2*Rs)`, derived once at construction.
    pub rho: f64,
    /// Relay decoding SNR threshold, linear scale.
    pub gamma_th: f64,
}

impl SecrecyConfig {
    /// From a target rate and a *linear* decoding threshold.
    pub fn new(rate_rs: f64, gamma_th: f64) -> Result<Self, Error> {
        let rho = rho_from_rate(rate_rs)?;
        if !gamma_th.is_finite() || gamma_th < 0.0 {
            return Err(Error::domain(format!(
                "decoding threshold must be finite and >= 0, got {gamma_th}"
            )));
        }
        Ok(Self {
            rate_rs,
            rho,
            gamma_th,
        })
    }

    /// From a target rate and a decoding threshold quoted in dB.
    pub fn from_db(rate_rs: f64, gamma_th_db: f64) -> Result<Self, Error> {
        Self::new(rate_rs, db_to_mean(gamma_th_db))
    }
}

/// Realized SNRs of a single protocol round, after relay selection and MRC.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSnapshot {
    pub gamma_sd: f64,
    pub gamma_se: f64,
    pub gamma_sk: Vec<f64>,
    pub gamma_kd: Vec<f64>,
    pub gamma_ke: Vec<f64>,
    /// Combined main-channel SNR at the destination.
    pub gamma_m: f64,
    /// Combined SNR at the eavesdropper.
    pub gamma_e: f64,
}

impl TrialSnapshot {
    /// Achievable secrecy rate of this round.
    pub fn secrecy_rate(&self) -> f64 {
        secrecy_rate(self.gamma_m, self.gamma_e)
    }
}
