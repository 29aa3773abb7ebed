//! Experiment sweeps: figure presets, the sweep runner, and CSV output.
//!
//! A sweep evaluates the total secrecy outage over a list of average-SNR
//! points for a subset of schemes and engines. Presets pin the published
//! configurations verbatim so that a reviewer can diff them; everything
//! is quoted in dB and converted to rates exactly once per point.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::analytic::{secrecy_outage, Scheme};
use crate::channel::{db_to_mean, LinkParams, SecrecyConfig};
use crate::error::Error;
use crate::mc::mc_estimate;
use crate::quad::total_outage_quad;

/// Default Monte Carlo trial count used by presets.
pub const DEFAULT_TRIALS: u64 = 1_000_000;
/// Default Monte Carlo seed used by presets.
pub const DEFAULT_SEED: u64 = 42;
/// Absolute tolerance for the quadrature engine in sweeps.
pub const QUAD_SWEEP_TOL: f64 = 1e-6;

/// Evaluation engine for one sweep row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Engine {
    Analytic,
    Mc,
    Quad,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Analytic, Engine::Mc, Engine::Quad];

    pub fn label(&self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::Mc => "mc",
            Engine::Quad => "quad",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "analytic" => Ok(Engine::Analytic),
            "mc" => Ok(Engine::Mc),
            "quad" => Ok(Engine::Quad),
            other => Err(Error::domain(format!("unknown engine `{other}`"))),
        }
    }
}

/// How a per-relay link list depends on the sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkSpec {
    /// Mean SNR is `coef * (1/beta)` linear, where `1/beta` is the sweep
    /// point's average SNR.
    SweepScaled(&'static [f64]),
    /// Mean SNR fixed in dB, independent of the sweep point.
    FixedDb(&'static [f64]),
}

impl LinkSpec {
    fn means_db(&self, snr_db: f64, n: usize) -> Vec<f64> {
        match self {
            // coef * 10^(snr/10) linear == snr_db + 10 log10(coef) in dB
            LinkSpec::SweepScaled(coefs) => coefs[..n]
                .iter()
                .map(|c| snr_db + 10.0 * c.log10())
                .collect(),
            LinkSpec::FixedDb(db) => db[..n].to_vec(),
        }
    }
}

/// A pinned experiment configuration.
#[derive(Debug, Clone)]
pub struct Preset {
    pub id: &'static str,
    pub description: &'static str,
    pub n: usize,
    pub rate_rs: f64,
    pub gamma_th_db: f64,
    pub beta_sd_db: f64,
    pub alpha_se_db: f64,
    pub sk: LinkSpec,
    pub kd: LinkSpec,
    pub ke: LinkSpec,
    /// Default sweep as (start, stop, step) in dB, inclusive of stop.
    pub default_sweep: (f64, f64, f64),
}

// System-wide defaults: direct links 3 dB / 2 dB, threshold 3 dB,
// four relays, one bit per channel use.
const SD_DB: f64 = 3.0;
const SE_DB: f64 = 2.0;
const TH_DB: f64 = 3.0;

const FIG2_SK: [f64; 4] = [0.2, 0.6, 0.4, 0.8];
const FIG2_KD: [f64; 4] = [0.8, 0.4, 0.6, 0.2];
const FIG2_KE_DB: [f64; 4] = [0.0, 3.0, 6.0, 9.0];
const HALF: [f64; 4] = [0.5, 0.5, 0.5, 0.5];
const UNIT: [f64; 4] = [1.0, 1.0, 1.0, 1.0];
const KE3_DB: [f64; 4] = [3.0, 3.0, 3.0, 3.0];
const KD20_DB: [f64; 4] = [20.0, 20.0, 20.0, 20.0];
const SK10_DB: [f64; 4] = [10.0, 10.0, 10.0, 10.0];

/// All pinned presets, including the per-figure variants.
pub const PRESETS: &[Preset] = &[
    Preset {
        id: "fig2",
        description: "non-identical relay links, eavesdropper means 0/3/6/9 dB, Rs=1",
        n: 4,
        rate_rs: 1.0,
        gamma_th_db: TH_DB,
        beta_sd_db: SD_DB,
        alpha_se_db: SE_DB,
        sk: LinkSpec::SweepScaled(&FIG2_SK),
        kd: LinkSpec::SweepScaled(&FIG2_KD),
        ke: LinkSpec::FixedDb(&FIG2_KE_DB),
        default_sweep: (0.0, 30.0, 2.0),
    },
    Preset {
        id: "fig2-rs2",
        description: "fig2 links at the higher target rate Rs=2",
        n: 4,
        rate_rs: 2.0,
        gamma_th_db: TH_DB,
        beta_sd_db: SD_DB,
        alpha_se_db: SE_DB,
        sk: LinkSpec::SweepScaled(&FIG2_SK),
        kd: LinkSpec::SweepScaled(&FIG2_KD),
        ke: LinkSpec::FixedDb(&FIG2_KE_DB),
        default_sweep: (0.0, 30.0, 2.0),
    },
    Preset {
        id: "fig3",
        description: "identical relay links 0.5/beta, decoding threshold 0 dB",
        n: 4,
        rate_rs: 1.0,
        gamma_th_db: 0.0,
        beta_sd_db: SD_DB,
        alpha_se_db: SE_DB,
        sk: LinkSpec::SweepScaled(&HALF),
        kd: LinkSpec::SweepScaled(&HALF),
        ke: LinkSpec::FixedDb(&FIG2_KE_DB),
        default_sweep: (6.0, 30.0, 2.0),
    },
    Preset {
        id: "fig3-th15",
        description: "fig3 links with the decoding threshold raised to 15 dB",
        n: 4,
        rate_rs: 1.0,
        gamma_th_db: 15.0,
        beta_sd_db: SD_DB,
        alpha_se_db: SE_DB,
        sk: LinkSpec::SweepScaled(&HALF),
        kd: LinkSpec::SweepScaled(&HALF),
        ke: LinkSpec::FixedDb(&FIG2_KE_DB),
        default_sweep: (6.0, 30.0, 2.0),
    },
    Preset {
        id: "fig4-n1",
        description: "identical links 0.5/beta, eavesdropper means 3 dB, N=1",
        n: 1,
        rate_rs: 1.0,
        gamma_th_db: TH_DB,
        beta_sd_db: SD_DB,
        alpha_se_db: SE_DB,
        sk: LinkSpec::SweepScaled(&HALF),
        kd: LinkSpec::SweepScaled(&HALF),
        ke: LinkSpec::FixedDb(&KE3_DB),
        default_sweep: (6.0, 24.0, 2.0),
    },
    Preset {
        id: "fig4-n2",
        description: "identical links 0.5/beta, eavesdropper means 3 dB, N=2",
        n: 2,
        rate_rs: 1.0,
        gamma_th_db: TH_DB,
        beta_sd_db: SD_DB,
        alpha_se_db: SE_DB,
        sk: LinkSpec::SweepScaled(&HALF),
        kd: LinkSpec::SweepScaled(&HALF),
        ke: LinkSpec::FixedDb(&KE3_DB),
        default_sweep: (6.0, 24.0, 2.0),
    },
    Preset {
        id: "fig4-n3",
        description: "identical links 0.5/beta, eavesdropper means 3 dB, N=3",
        n: 3,
        rate_rs: 1.0,
        gamma_th_db: TH_DB,
        beta_sd_db: SD_DB,
        alpha_se_db: SE_DB,
        sk: LinkSpec::SweepScaled(&HALF),
        kd: LinkSpec::SweepScaled(&HALF),
        ke: LinkSpec::FixedDb(&KE3_DB),
        default_sweep: (6.0, 24.0, 2.0),
    },
    Preset {
        id: "fig4",
        description: "identical links 0.5/beta, eavesdropper means 3 dB, N=4",
        n: 4,
        rate_rs: 1.0,
        gamma_th_db: TH_DB,
        beta_sd_db: SD_DB,
        alpha_se_db: SE_DB,
        sk: LinkSpec::SweepScaled(&HALF),
        kd: LinkSpec::SweepScaled(&HALF),
        ke: LinkSpec::FixedDb(&KE3_DB),
        default_sweep: (6.0, 24.0, 2.0),
    },
    Preset {
        id: "fig5",
        description:
            "unbalanced case 1: relay-destination means fixed at 20 dB, source-relay sweeps",
        n: 4,
        rate_rs: 1.0,
        gamma_th_db: TH_DB,
        beta_sd_db: SD_DB,
        alpha_se_db: SE_DB,
        sk: LinkSpec::SweepScaled(&UNIT),
        kd: LinkSpec::FixedDb(&KD20_DB),
        ke: LinkSpec::FixedDb(&KE3_DB),
        default_sweep: (0.0, 40.0, 2.0),
    },
    Preset {
        id: "fig5-bsk10",
        description:
            "unbalanced case 2: source-relay means fixed at 10 dB, relay-destination sweeps",
        n: 4,
        rate_rs: 1.0,
        gamma_th_db: TH_DB,
        beta_sd_db: SD_DB,
        alpha_se_db: SE_DB,
        sk: LinkSpec::FixedDb(&SK10_DB),
        kd: LinkSpec::SweepScaled(&UNIT),
        ke: LinkSpec::FixedDb(&KE3_DB),
        default_sweep: (0.0, 40.0, 2.0),
    },
];

/// Alias accepted for the N=4 fig4 variant.
pub const FIG4_ALIAS: &str = "fig4-n4";
/// Alias accepted for the fig5 case with fixed relay-destination links.
pub const FIG5_ALIAS: &str = "fig5-bkd20";

/// Looks a preset up by id (aliases included).
pub fn preset(id: &str) -> Option<&'static Preset> {
    let id = match id {
        FIG4_ALIAS => "fig4",
        FIG5_ALIAS => "fig5",
        other => other,
    };
    PRESETS.iter().find(|p| p.id == id)
}

/// Per-parameter overrides, everything in dB except the target rate and
/// the relay count. A scalar list entry broadcasts to all relays.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub rate_rs: Option<f64>,
    pub gamma_th_db: Option<f64>,
    pub beta_sd_db: Option<f64>,
    pub alpha_se_db: Option<f64>,
    pub beta_sk_db: Option<Vec<f64>>,
    pub beta_kd_db: Option<Vec<f64>>,
    pub alpha_ke_db: Option<Vec<f64>>,
}

impl Overrides {
    pub fn is_empty(&self) -> bool {
        self == &Overrides::default()
    }

    /// Applies one `key=value` pair as accepted on the command line.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<(), Error> {
        let parse_f = |v: &str| -> Result<f64, Error> {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::domain(format!("override `{key}`: `{v}` is not a number")))
        };
        let parse_list = |v: &str| -> Result<Vec<f64>, Error> {
            v.split(',')
                .map(&parse_f)
                .collect::<Result<Vec<f64>, Error>>()
        };
        match key {
            "n" => {
                self.n = Some(value.trim().parse::<usize>().map_err(|_| {
                    Error::domain(format!("override `n`: `{value}` is not a relay count"))
                })?)
            }
            "rate_rs" => self.rate_rs = Some(parse_f(value)?),
            "gamma_th" => self.gamma_th_db = Some(parse_f(value)?),
            "beta_sd" => self.beta_sd_db = Some(parse_f(value)?),
            "alpha_se" => self.alpha_se_db = Some(parse_f(value)?),
            "beta_sk" => self.beta_sk_db = Some(parse_list(value)?),
            "beta_kd" => self.beta_kd_db = Some(parse_list(value)?),
            "alpha_ke" => self.alpha_ke_db = Some(parse_list(value)?),
            other => {
                return Err(Error::domain(format!(
                    "unknown override key `{other}` (expected n, rate_rs, gamma_th, beta_sd, alpha_se, beta_sk, beta_kd, alpha_ke)"
                )))
            }
        }
        Ok(())
    }
}

/// A fully resolved sweep request.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Preset id, or "custom" for a run assembled purely from overrides.
    pub preset: String,
    /// Average-SNR points `1/beta` in dB, strictly increasing.
    pub snr_db: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub engines: Vec<Engine>,
    pub mc_trials: u64,
    pub mc_seed: u64,
    pub overrides: Overrides,
}

impl SweepSpec {
    /// The default spec for a preset: all schemes, analytic engine only,
    /// the preset's own sweep grid.
    pub fn for_preset(id: &str) -> Result<Self, Error> {
        let p = preset(id).ok_or_else(|| Error::domain(format!("unknown preset `{id}`")))?;
        let (start, stop, step) = p.default_sweep;
        Ok(SweepSpec {
            preset: p.id.to_string(),
            snr_db: snr_range(start, stop, step),
            schemes: Scheme::ALL.to_vec(),
            engines: vec![Engine::Analytic],
            mc_trials: DEFAULT_TRIALS,
            mc_seed: DEFAULT_SEED,
            overrides: Overrides::default(),
        })
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.snr_db.is_empty() {
            return Err(Error::domain("sweep needs at least one SNR point"));
        }
        if self.snr_db.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("SNR points must be strictly increasing"));
        }
        if self.schemes.is_empty() || self.engines.is_empty() {
            return Err(Error::domain("select at least one scheme and one engine"));
        }
        if self.preset != "custom" && preset(&self.preset).is_none() {
            return Err(Error::domain(format!("unknown preset `{}`", self.preset)));
        }
        if self.preset == "custom" {
            let o = &self.overrides;
            if o.beta_sk_db.is_none() || o.beta_kd_db.is_none() || o.alpha_ke_db.is_none() {
                return Err(Error::domain(
                    "custom runs must override beta_sk, beta_kd, and alpha_ke",
                ));
            }
        }
        Ok(())
    }

    /// Materializes the link/secrecy configuration at one sweep point.
    pub fn configure(&self, snr_db: f64) -> Result<(LinkParams, SecrecyConfig), Error> {
        let base = preset(&self.preset);
        let o = &self.overrides;
        // relay count: explicit override, else the preset's, else the
        // longest overridden link list
        let inferred = [&o.beta_sk_db, &o.beta_kd_db, &o.alpha_ke_db]
            .into_iter()
            .flatten()
            .map(|v| v.len())
            .max();
        let n =
            o.n.or(base.map(|p| p.n))
                .or(inferred)
                .ok_or_else(|| Error::domain("custom runs must override n or link lists"))?;
        let expand = |v: &Vec<f64>, what: &str| -> Result<Vec<f64>, Error> {
            if v.len() == 1 {
                Ok(vec![v[0]; n])
            } else if v.len() == n {
                Ok(v.clone())
            } else {
                Err(Error::domain(format!(
                    "override `{what}` has {} entries but N = {n}",
                    v.len()
                )))
            }
        };
        let sk_db = match &o.beta_sk_db {
            Some(v) => expand(v, "beta_sk")?,
            None => base
                .ok_or_else(|| Error::domain("custom runs must override beta_sk"))?
                .sk
                .means_db(snr_db, n),
        };
        let kd_db = match &o.beta_kd_db {
            Some(v) => expand(v, "beta_kd")?,
            None => base
                .ok_or_else(|| Error::domain("custom runs must override beta_kd"))?
                .kd
                .means_db(snr_db, n),
        };
        let ke_db = match &o.alpha_ke_db {
            Some(v) => expand(v, "alpha_ke")?,
            None => base
                .ok_or_else(|| Error::domain("custom runs must override alpha_ke"))?
                .ke
                .means_db(snr_db, n),
        };
        let sd_db = o.beta_sd_db.or(base.map(|p| p.beta_sd_db)).unwrap_or(SD_DB);
        let se_db = o
            .alpha_se_db
            .or(base.map(|p| p.alpha_se_db))
            .unwrap_or(SE_DB);
        let th_db = o
            .gamma_th_db
            .or(base.map(|p| p.gamma_th_db))
            .unwrap_or(TH_DB);
        let rs = o.rate_rs.or(base.map(|p| p.rate_rs)).unwrap_or(1.0);
        let links = LinkParams::from_means_db(sd_db, se_db, &sk_db, &kd_db, &ke_db)?;
        let cfg = SecrecyConfig::new(rs, db_to_mean(th_db))?;
        Ok((links, cfg))
    }
}

/// Builds the inclusive grid `start, start+step, ..., stop`.
pub fn snr_range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0 && stop >= start);
    let count = ((stop - start) / step).round() as usize;
    (0..=count).map(|i| start + i as f64 * step).collect()
}

/// One output row of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub snr_db: f64,
    pub scheme: Scheme,
    pub engine: Engine,
    pub outage: f64,
    pub stderr: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

/// Result table of a sweep, ordered by (SNR, scheme, engine).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

fn scheme_order(s: Scheme) -> u8 {
    match s {
        Scheme::Ts => 0,
        Scheme::Its => 1,
        Scheme::Os => 2,
    }
}

/// Runs the sweep: one row per (SNR point, scheme, engine), emitted in
/// deterministic order. Points evaluate in parallel; ordering is fixed
/// by a final sort on the (point index, scheme, engine) key.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable, Error> {
    spec.validate()?;
    let mut schemes = spec.schemes.clone();
    schemes.sort_by_key(|&s| scheme_order(s));
    schemes.dedup();
    let mut engines = spec.engines.clone();
    engines.sort();
    engines.dedup();

    let points: Vec<(usize, f64)> = spec.snr_db.iter().copied().enumerate().collect();
    let results: Vec<Result<Vec<(usize, SweepRow)>, Error>> = points
        .par_iter()
        .map(|&(idx, snr_db)| {
            let (links, cfg) = spec.configure(snr_db)?;
            let mut rows = Vec::new();
            for &scheme in &schemes {
                for &engine in &engines {
                    let row = match engine {
                        Engine::Analytic => {
                            let r = secrecy_outage(&links, &cfg, scheme)?;
                            SweepRow {
                                snr_db,
                                scheme,
                                engine,
                                outage: r.total,
                                stderr: None,
                                trials: None,
                                seed: None,
                            }
                        }
                        Engine::Mc => {
                            let e =
                                mc_estimate(&links, &cfg, scheme, spec.mc_trials, spec.mc_seed)?;
                            SweepRow {
                                snr_db,
                                scheme,
                                engine,
                                outage: e.mean,
                                stderr: Some(e.stderr),
                                trials: Some(e.trials),
                                seed: Some(e.seed),
                            }
                        }
                        Engine::Quad => {
                            let v = total_outage_quad(&links, &cfg, scheme, QUAD_SWEEP_TOL)?;
                            SweepRow {
                                snr_db,
                                scheme,
                                engine,
                                outage: v,
                                stderr: None,
                                trials: None,
                                seed: None,
                            }
                        }
                    };
                    rows.push((idx, row));
                }
            }
            Ok(rows)
        })
        .collect();

    let mut keyed: Vec<(usize, SweepRow)> = Vec::new();
    for r in results {
        keyed.extend(r?);
    }
    keyed.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(scheme_order(a.1.scheme).cmp(&scheme_order(b.1.scheme)))
            .then(a.1.engine.cmp(&b.1.engine))
    });
    Ok(SweepTable {
        rows: keyed.into_iter().map(|(_, r)| r).collect(),
    })
}

/// CSV header emitted by [`emit_csv`].
pub const CSV_HEADER: &str = "snr_db,scheme,engine,outage,stderr,trials,seed";

/// Formats a float with 12 significant digits.
fn fmt_sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Writes the table as CSV: floating point with 12 significant digits,
/// MC-only columns left empty for the other engines.
pub fn emit_csv<W: Write>(table: &SweepTable, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in &table.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.snr_db,
            r.scheme,
            r.engine,
            fmt_sig12(r.outage),
            r.stderr.map(fmt_sig12).unwrap_or_default(),
            r.trials.map(|t| t.to_string()).unwrap_or_default(),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
        )?;
    }
    Ok(())
}

/// Writes the CSV to a file, tagging I/O failures with the path.
pub fn emit_csv_path(table: &SweepTable, path: &std::path::Path) -> Result<(), String> {
    let mut buf = Vec::new();
    emit_csv(table, &mut buf).map_err(|e| format!("{}: {e}", path.display()))?;
    std::fs::write(path, buf).map_err(|e| format!("{}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_pin_published_parameterizations() {
        let p = preset("fig2").unwrap();
        assert_eq!(p.sk, LinkSpec::SweepScaled(&[0.2, 0.6, 0.4, 0.8]));
        assert_eq!(p.kd, LinkSpec::SweepScaled(&[0.8, 0.4, 0.6, 0.2]));
        assert_eq!(p.ke, LinkSpec::FixedDb(&[0.0, 3.0, 6.0, 9.0]));
        assert_eq!(
            (p.beta_sd_db, p.alpha_se_db, p.gamma_th_db),
            (3.0, 2.0, 3.0)
        );
        assert_eq!(preset("fig2-rs2").unwrap().rate_rs, 2.0);
        assert_eq!(preset("fig3").unwrap().gamma_th_db, 0.0);
        assert_eq!(preset("fig3-th15").unwrap().gamma_th_db, 15.0);
        assert_eq!(preset("fig4-n4").unwrap().n, 4); // alias
        assert_eq!(preset("fig4-n1").unwrap().n, 1);
        assert_eq!(
            preset("fig5-bkd20").unwrap().kd,
            LinkSpec::FixedDb(&[20.0; 4])
        );
        assert_eq!(
            preset("fig5-bsk10").unwrap().sk,
            LinkSpec::FixedDb(&[10.0; 4])
        );
        assert!(preset("fig9").is_none());
    }

    #[test]
    fn sweep_scaled_links_follow_the_sweep() {
        let (links, _) = SweepSpec::for_preset("fig2")
            .unwrap()
            .configure(10.0)
            .unwrap();
        // 1/beta_sk1 = 0.2 * 10 = 2.0 linear
        assert!((1.0 / links.beta_sk[0] - 2.0).abs() < 1e-12);
        assert!((1.0 / links.beta_kd[3] - 2.0).abs() < 1e-12);
        // eavesdropper links stay fixed
        assert!((1.0 / links.alpha_ke[3] - db_to_mean(9.0)).abs() < 1e-12);
    }

    #[test]
    fn snr_range_is_inclusive() {
        assert_eq!(snr_range(0.0, 30.0, 2.0).len(), 16);
        assert_eq!(snr_range(0.0, 0.0, 1.0), vec![0.0]);
    }

    #[test]
    fn override_parsing() {
        let mut o = Overrides::default();
        o.apply_kv("beta_kd", "20,20,20,20").unwrap();
        assert_eq!(o.beta_kd_db.as_deref(), Some(&[20.0; 4][..]));
        o.apply_kv("rate_rs", "2").unwrap();
        o.apply_kv("n", "3").unwrap();
        assert!(o.apply_kv("bogus", "1").is_err());
        assert!(o.apply_kv("beta_kd", "a,b").is_err());
    }

    #[test]
    fn override_broadcast_and_length_check() {
        let mut spec = SweepSpec::for_preset("fig4").unwrap();
        spec.overrides.apply_kv("alpha_ke", "6").unwrap();
        let (links, _) = spec.configure(10.0).unwrap();
        assert!(links
            .alpha_ke
            .iter()
            .all(|&a| (1.0 / a - db_to_mean(6.0)).abs() < 1e-12));
        spec.overrides.apply_kv("alpha_ke", "1,2").unwrap();
        assert!(spec.configure(10.0).is_err());
    }

    #[test]
    fn spec_validation_catches_misuse() {
        let mut spec = SweepSpec::for_preset("fig2").unwrap();
        spec.snr_db = vec![];
        assert!(spec.validate().is_err());
        spec.snr_db = vec![2.0, 1.0];
        assert!(spec.validate().is_err());
        let mut spec = SweepSpec::for_preset("fig2").unwrap();
        spec.preset = "custom".into();
        assert!(spec.validate().is_err()); // needs link overrides
    }

    #[test]
    fn csv_header_only_for_empty_table() {
        let table = SweepTable { rows: vec![] };
        let mut buf = Vec::new();
        emit_csv(&table, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn csv_single_analytic_row_is_two_lines() {
        let table = SweepTable {
            rows: vec![SweepRow {
                snr_db: 10.0,
                scheme: Scheme::Ts,
                engine: Engine::Analytic,
                outage: 0.25,
                stderr: None,
                trials: None,
                seed: None,
            }],
        };
        let mut buf = Vec::new();
        emit_csv(&table, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1], "10,TS,analytic,2.50000000000e-1,,,");
    }

    #[test]
    fn sweep_rows_form_cartesian_product() {
        let mut spec = SweepSpec::for_preset("fig2").unwrap();
        spec.snr_db = vec![0.0, 10.0, 20.0];
        spec.engines = vec![Engine::Analytic];
        let table = run_sweep(&spec).unwrap();
        assert_eq!(table.rows.len(), 3 * 3);
        // ordering: snr ascending, then TS, ITS, OS
        assert_eq!(table.rows[0].scheme, Scheme::Ts);
        assert_eq!(table.rows[1].scheme, Scheme::Its);
        assert_eq!(table.rows[2].scheme, Scheme::Os);
        assert!(table.rows[3].snr_db > table.rows[2].snr_db);
    }

    #[test]
    fn custom_infers_relay_count_from_lists() {
        let mut spec = SweepSpec::for_preset("fig2").unwrap();
        spec.preset = "custom".into();
        spec.overrides.apply_kv("beta_sk", "10,12,8").unwrap();
        spec.overrides.apply_kv("beta_kd", "10,12,8").unwrap();
        spec.overrides.apply_kv("alpha_ke", "3,3,3").unwrap();
        let (links, _) = spec.configure(10.0).unwrap();
        assert_eq!(links.relay_count(), 3);
    }

    #[test]
    fn quad_engine_rows_track_analytic() {
        let mut spec = SweepSpec::for_preset("fig4-n2").unwrap();
        spec.snr_db = vec![12.0];
        spec.schemes = vec![Scheme::Its];
        spec.engines = vec![Engine::Analytic, Engine::Quad];
        let table = run_sweep(&spec).unwrap();
        assert_eq!(table.rows.len(), 2);
        assert_eq!(table.rows[0].engine, Engine::Analytic);
        assert_eq!(table.rows[1].engine, Engine::Quad);
        assert!((table.rows[0].outage - table.rows[1].outage).abs() < 1e-5);
        assert_eq!(table.rows[1].stderr, None);
    }

    #[test]
    fn sweep_is_deterministic() {
        let mut spec = SweepSpec::for_preset("fig4-n2").unwrap();
        spec.snr_db = vec![0.0, 12.0];
        spec.engines = vec![Engine::Analytic, Engine::Mc];
        spec.mc_trials = 20_000;
        let a = run_sweep(&spec).unwrap();
        let b = run_sweep(&spec).unwrap();
        assert_eq!(a, b);
        let mut buf_a = Vec::new();
        let mut buf_b = Vec::new();
        emit_csv(&a, &mut buf_a).unwrap();
        emit_csv(&b, &mut buf_b).unwrap();
        assert_eq!(buf_a, buf_b);
    }
}
