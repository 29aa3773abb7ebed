//! Wider, slower robustness sweeps. Ignored by default; run with
//! `cargo test -p relsec --test extended_robustness -- --ignored`.

use relsec::quad::QuadOracle;
use relsec::*;

/// 200 random configurations over a wider dB range than the acceptance
/// sweep, including target rates up to 3 bpcu.
#[test]
#[ignore = "extended sweep, several minutes"]
fn closed_forms_match_quadrature_widely() {
    const TOL: f64 = 1e-6;
    let mut rng = TrialRng::from_seed(555);
    let mut configs = 0usize;
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    while configs < 200 {
        let n = 2 + (rng.next_u64() % 2) as usize;
        let mut mean_db = || -5.0 + 23.0 * rng.next_f64();
        let links = LinkParams::from_means_db(
            mean_db(),
            mean_db(),
            &(0..n).map(|_| mean_db()).collect::<Vec<_>>(),
            &(0..n).map(|_| mean_db()).collect::<Vec<_>>(),
            &(0..n).map(|_| mean_db()).collect::<Vec<_>>(),
        )
        .unwrap();
        let rate_rs = [0.25, 0.5, 1.0, 2.0, 3.0][(rng.next_u64() % 5) as usize];
        let cfg = SecrecyConfig::new(rate_rs, 1.0).unwrap();
        if is_degenerate(&links) {
            continue;
        }
        configs += 1;
        let oracle = QuadOracle::new(&links, &cfg);
        if std::env::var("DUMP_CONFIGS").is_ok() {
            println!("config {configs}: rs={rate_rs} links={links:?}");
        }
        for set in enumerate_decoding_sets(n).unwrap() {
            if set.len() < 2 {
                continue;
            }
            let ts = analytic::ts_relay_split(&links, &cfg, &set);
            let its = analytic::its_relay_split(&links, &cfg, &set);
            for (idx, &k) in set.members().iter().enumerate() {
                let q_ts = oracle.ts_region_above(&set, k, TOL / 2.0).unwrap().value
                    + oracle.ts_region_below(&set, k, TOL / 2.0).unwrap().value;
                let q_its = oracle.its_region_above(&set, k, TOL / 2.0).unwrap().value
                    + oracle.its_region_below(&set, k, TOL / 2.0).unwrap().value;
                worst = worst
                    .max((ts[idx] - q_ts).abs())
                    .max((its[idx] - q_its).abs());
                assert!(
                    (ts[idx] - q_ts).abs() <= TOL,
                    "TS {:?}/{k}: {} vs {q_ts}",
                    set.members(),
                    ts[idx]
                );
                assert!(
                    (its[idx] - q_its).abs() <= TOL,
                    "ITS {:?}/{k}: {} vs {q_its}",
                    set.members(),
                    its[idx]
                );
                checked += 2;
            }
            let os = outage_os_set(&links, &cfg, &set);
            let q_os = oracle.os_region_above(&set, TOL / 2.0).unwrap().value
                + oracle.os_region_below(&set, TOL / 2.0).unwrap().value;
            worst = worst.max((os - q_os).abs());
            assert!(
                (os - q_os).abs() <= TOL,
                "OS {:?}: {os} vs {q_os}",
                set.members()
            );
            checked += 1;
        }
    }
    println!("  {checked} comparisons over {configs} configs, worst |diff| {worst:.3e}");
}

fn is_degenerate(links: &LinkParams) -> bool {
    const GAP: f64 = 1e-4;
    let close = |a: f64, b: f64| (a - b).abs() < GAP * a.abs().max(b.abs());
    let n = links.relay_count();
    for mask in 1u32..(1u32 << n) {
        let sum: f64 = (0..n)
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| links.beta_kd[i])
            .sum();
        if close(links.beta_sd, sum) {
            return true;
        }
    }
    for k in 0..n {
        let others: Vec<f64> = (0..n)
            .filter(|&i| i != k)
            .map(|i| links.beta_kd[i] / links.alpha_ke[i])
            .collect();
        for mask in 0u32..(1u32 << others.len()) {
            let wsum: f64 = (0..others.len())
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| others[i])
                .sum();
            if close(links.beta_sd, links.alpha_ke[k] * wsum + links.beta_kd[k]) {
                return true;
            }
        }
    }
    links.alpha_ke.iter().any(|&ake| close(links.alpha_se, ake))
}

/// Analytic totals stay inside [0, 1] and finite over random
/// configurations including the zero-rate edge.
#[test]
#[ignore = "extended sweep"]
fn totals_stay_in_unit_interval() {
    let mut rng = TrialRng::from_seed(808);
    for trial in 0..500 {
        let n = (rng.next_u64() % 5) as usize;
        let mut r = || 0.02 + 8.0 * rng.next_f64();
        let links = LinkParams::from_rates(
            r(),
            r(),
            (0..n).map(|_| r()).collect(),
            (0..n).map(|_| r()).collect(),
            (0..n).map(|_| r()).collect(),
        )
        .unwrap();
        let rate = [0.0, 0.5, 1.0, 2.0, 4.0][(rng.next_u64() % 5) as usize];
        let cfg = SecrecyConfig::new(rate, 3.0 * rng.next_f64()).unwrap();
        for scheme in Scheme::ALL {
            let r = secrecy_outage(&links, &cfg, scheme).unwrap();
            assert!(
                r.total.is_finite() && (-1e-12..=1.0 + 1e-12).contains(&r.total),
                "trial {trial} {scheme}: total {}",
                r.total
            );
            for o in &r.per_set {
                assert!(
                    o.conditional_outage.is_finite()
                        && (-1e-9..=1.0 + 1e-9).contains(&o.conditional_outage),
                    "trial {trial} {scheme} set {:?}: {}",
                    o.set.members(),
                    o.conditional_outage
                );
            }
        }
    }
}
