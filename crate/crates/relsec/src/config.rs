//! Flat key/value sweep configuration files.
//!
//! The format is line-oriented: `[section]` headers, `key = value` pairs,
//! `#` comments. Two sections exist: `[sweep]` (preset, grid, schemes,
//! engines, MC controls) and `[overrides]` (per-link dB overrides, same
//! keys as the command-line `--override` flag). Emission is canonical —
//! fixed section and key order, normalized value formatting — so
//! parse/emit round-trips are idempotent.

use std::fmt;

use crate::analytic::Scheme;
use crate::sweep::{Engine, Overrides, SweepSpec, DEFAULT_SEED, DEFAULT_TRIALS};

/// A configuration error tagged with the offending line and field.
#[derive(Debug, Clone, thiserror::Error)]
#[error("config line {line}, field `{field}`: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(line: usize, field: impl Into<String>, message: impl fmt::Display) -> Self {
        ConfigError {
            line,
            field: field.into(),
            message: message.to_string(),
        }
    }
}

/// Parses a config file into a sweep spec. Unknown sections or keys are
/// rejected rather than ignored.
pub fn parse_config(text: &str) -> Result<SweepSpec, ConfigError> {
    let mut preset: Option<String> = None;
    let mut snr_db: Option<Vec<f64>> = None;
    let mut schemes: Option<Vec<Scheme>> = None;
    let mut engines: Option<Vec<Engine>> = None;
    let mut trials: Option<u64> = None;
    let mut seed: Option<u64> = None;
    let mut overrides = Overrides::default();

    let mut section = String::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::new(lineno, line, "unterminated section header"))?;
            match name {
                "sweep" | "overrides" => section = name.to_string(),
                other => {
                    return Err(ConfigError::new(
                        lineno,
                        other,
                        "unknown section (expected [sweep] or [overrides])",
                    ))
                }
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::new(lineno, line, "expected `key = value`"))?;
        let key = key.trim();
        let value = value.trim();
        match section.as_str() {
            "sweep" => match key {
                "preset" => preset = Some(value.to_string()),
                "snr_db" => {
                    snr_db =
                        Some(parse_snr_list(value).map_err(|m| ConfigError::new(lineno, key, m))?)
                }
                "schemes" => {
                    schemes = Some(
                        value
                            .split(',')
                            .map(|s| s.trim().parse::<Scheme>())
                            .collect::<Result<_, _>>()
                            .map_err(|e| ConfigError::new(lineno, key, e))?,
                    )
                }
                "engines" => {
                    engines = Some(
                        value
                            .split(',')
                            .map(|s| s.trim().parse::<Engine>())
                            .collect::<Result<_, _>>()
                            .map_err(|e| ConfigError::new(lineno, key, e))?,
                    )
                }
                "trials" => {
                    trials = Some(
                        value
                            .parse::<u64>()
                            .map_err(|_| ConfigError::new(lineno, key, "not a trial count"))?,
                    )
                }
                "seed" => {
                    seed = Some(
                        value
                            .parse::<u64>()
                            .map_err(|_| ConfigError::new(lineno, key, "not a seed"))?,
                    )
                }
                other => return Err(ConfigError::new(lineno, other, "unknown [sweep] key")),
            },
            "overrides" => overrides
                .apply_kv(key, value)
                .map_err(|e| ConfigError::new(lineno, key, e))?,
            _ => {
                return Err(ConfigError::new(
                    lineno,
                    key,
                    "key appears before any [section] header",
                ))
            }
        }
    }

    let preset =
        preset.ok_or_else(|| ConfigError::new(0, "preset", "missing required [sweep] key"))?;
    let base =
        if preset == "custom" {
            None
        } else {
            Some(crate::sweep::preset(&preset).ok_or_else(|| {
                ConfigError::new(0, "preset", format!("unknown preset `{preset}`"))
            })?)
        };
    let snr_db = match snr_db {
        Some(v) => v,
        None => {
            let p = base.ok_or_else(|| {
                ConfigError::new(0, "snr_db", "custom runs must list the SNR points")
            })?;
            crate::sweep::snr_range(p.default_sweep.0, p.default_sweep.1, p.default_sweep.2)
        }
    };
    let spec = SweepSpec {
        preset,
        snr_db,
        schemes: schemes.unwrap_or_else(|| Scheme::ALL.to_vec()),
        engines: engines.unwrap_or_else(|| vec![Engine::Analytic]),
        mc_trials: trials.unwrap_or(DEFAULT_TRIALS),
        mc_seed: seed.unwrap_or(DEFAULT_SEED),
        overrides,
    };
    spec.validate()
        .map_err(|e| ConfigError::new(0, "sweep", e))?;
    Ok(spec)
}

/// Accepts either a comma list (`0,2,4`) or range syntax (`0:30:2`).
pub fn parse_snr_list(value: &str) -> Result<Vec<f64>, String> {
    if value.contains(':') {
        let parts: Vec<&str> = value.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range `{value}` must be start:stop:step"));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("`{p}` is not a number"))
            })
            .collect::<Result<_, _>>()?;
        if nums[2] <= 0.0 || nums[1] < nums[0] {
            return Err(format!(
                "range `{value}` must have stop >= start and step > 0"
            ));
        }
        Ok(crate::sweep::snr_range(nums[0], nums[1], nums[2]))
    } else {
        value
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("`{tok}` is not a number"))
            })
            .collect()
    }
}

fn fmt_db(x: f64) -> String {
    // plain shortest-roundtrip formatting keeps the file human-editable
    format!("{x}")
}

/// Emits the canonical form of a spec. `parse_config(emit_config(s))`
/// reproduces `s`, and re-emitting yields identical bytes.
pub fn emit_config(spec: &SweepSpec) -> String {
    let mut out = String::new();
    out.push_str("[sweep]\n");
    out.push_str(&format!("preset = {}\n", spec.preset));
    let snr: Vec<String> = spec.snr_db.iter().map(|&x| fmt_db(x)).collect();
    out.push_str(&format!("snr_db = {}\n", snr.join(",")));
    let schemes: Vec<&str> = spec.schemes.iter().map(|s| s.label()).collect();
    out.push_str(&format!("schemes = {}\n", schemes.join(",")));
    let engines: Vec<&str> = spec.engines.iter().map(|e| e.label()).collect();
    out.push_str(&format!("engines = {}\n", engines.join(",")));
    out.push_str(&format!("trials = {}\n", spec.mc_trials));
    out.push_str(&format!("seed = {}\n", spec.mc_seed));
    let o = &spec.overrides;
    if !o.is_empty() {
        out.push_str("\n[overrides]\n");
        if let Some(n) = o.n {
            out.push_str(&format!("n = {n}\n"));
        }
        if let Some(v) = o.rate_rs {
            out.push_str(&format!("rate_rs = {}\n", fmt_db(v)));
        }
        if let Some(v) = o.gamma_th_db {
            out.push_str(&format!("gamma_th = {}\n", fmt_db(v)));
        }
        if let Some(v) = o.beta_sd_db {
            out.push_str(&format!("beta_sd = {}\n", fmt_db(v)));
        }
        if let Some(v) = o.alpha_se_db {
            out.push_str(&format!("alpha_se = {}\n", fmt_db(v)));
        }
        let list = |v: &Vec<f64>| v.iter().map(|&x| fmt_db(x)).collect::<Vec<_>>().join(",");
        if let Some(v) = &o.beta_sk_db {
            out.push_str(&format!("beta_sk = {}\n", list(v)));
        }
        if let Some(v) = &o.beta_kd_db {
            out.push_str(&format!("beta_kd = {}\n", list(v)));
        }
        if let Some(v) = &o.alpha_ke_db {
            out.push_str(&format!("alpha_ke = {}\n", list(v)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal_preset_config() {
        let spec = parse_config("[sweep]\npreset = fig2\n").unwrap();
        assert_eq!(spec.preset, "fig2");
        assert_eq!(spec.snr_db.len(), 16);
        assert_eq!(spec.schemes.len(), 3);
        assert_eq!(spec.engines, vec![Engine::Analytic]);
        assert_eq!(spec.mc_trials, DEFAULT_TRIALS);
    }

    #[test]
    fn parse_full_config_with_overrides() {
        let text = "\
# comment
[sweep]
preset = fig5
snr_db = 0:10:5
schemes = TS,OS
engines = analytic,mc
trials = 5000
seed = 7

[overrides]
beta_kd = 20,20,20,20
";
        let spec = parse_config(text).unwrap();
        assert_eq!(spec.snr_db, vec![0.0, 5.0, 10.0]);
        assert_eq!(spec.schemes, vec![Scheme::Ts, Scheme::Os]);
        assert_eq!(spec.engines, vec![Engine::Analytic, Engine::Mc]);
        assert_eq!(spec.mc_seed, 7);
        assert_eq!(spec.overrides.beta_kd_db.as_deref(), Some(&[20.0; 4][..]));
    }

    #[test]
    fn errors_carry_line_and_field() {
        let err = parse_config("[sweep]\npreset = fig2\ntrials = many\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert_eq!(err.field, "trials");
        let err = parse_config("[sweep]\nbogus_key = 1\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.field, "bogus_key");
        let err = parse_config("preset = fig2\n").unwrap_err();
        assert_eq!(err.line, 1);
        let err = parse_config("[nope]\n").unwrap_err();
        assert_eq!(err.field, "nope");
    }

    #[test]
    fn roundtrip_is_idempotent() {
        let mut spec = SweepSpec::for_preset("fig3-th15").unwrap();
        spec.engines = vec![Engine::Analytic, Engine::Mc];
        spec.mc_trials = 12345;
        spec.overrides.apply_kv("alpha_ke", "1.5,2,2.5,3").unwrap();
        let once = emit_config(&spec);
        let parsed = parse_config(&once).unwrap();
        assert_eq!(parsed, spec);
        assert_eq!(emit_config(&parsed), once);
    }

    #[test]
    fn snr_list_syntaxes() {
        assert_eq!(
            parse_snr_list("0:30:10").unwrap(),
            vec![0.0, 10.0, 20.0, 30.0]
        );
        assert_eq!(parse_snr_list("1,2.5,4").unwrap(), vec![1.0, 2.5, 4.0]);
        assert!(parse_snr_list("0:30").is_err());
        assert!(parse_snr_list("0:30:-2").is_err());
        assert!(parse_snr_list("a,b").is_err());
    }
}
