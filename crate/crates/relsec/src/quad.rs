//! Adaptive-quadrature oracle.
//!
//! Evaluates the *integral definitions* behind every closed form — the
//! per-selected-relay regions I1/I2 (TS) and I3/I4 (ITS), the optimal
//! selection pair I5/I6, and the defining probabilities for the empty and
//! singleton decoding sets — without reusing any of the analytic engine's
//! algebra. The innermost exponential layer (the selected relay's SNR,
//! and for ITS/TS the unselected maximum via its product-form CDF) is
//! integrated in closed antiderivative form; the remaining one or two
//! dimensions run through Gauss-Kronrod adaptive subdivision.
//!
//! Semi-infinite domains are truncated where the integrand's exponential
//! envelope drops below a hundredth of the requested tolerance, then
//! subdivided adaptively; the truncation allowance is folded into the
//! reported error estimate.

use crate::channel::{LinkParams, SecrecyConfig};
use crate::error::Error;
use crate::numeric::{exp_diff_ratio, one_minus_exp_neg};
use crate::sets::DecodingSet;
use crate::Scheme;

/// A quadrature value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOutcome {
    pub value: f64,
    pub abs_error: f64,
}

// 15-point Kronrod extension of 7-point Gauss (positive half of the
// symmetric node set). Full published precision kept verbatim.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One Gauss-Kronrod panel: returns (integral, error estimate).
///
/// The raw |K15 - G7| difference can be deceptively small on a panel
/// that straddles unresolved structure, so it is rescaled against the
/// integrand's variation on the panel (the classic QUADPACK formula):
/// a small difference on a panel with large variation is not trusted.
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut fv = [0.0f64; 15];
    let fc = f(c);
    fv[7] = fc;
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    for j in 0..3 {
        let x = h * XGK[2 * j + 1];
        let (f1, f2) = (f(c - x), f(c + x));
        fv[2 * j + 1] = f1;
        fv[14 - (2 * j + 1)] = f2;
        resg += WG[j] * (f1 + f2);
        resk += WGK[2 * j + 1] * (f1 + f2);
    }
    for j in 0..4 {
        let x = h * XGK[2 * j];
        let (f1, f2) = (f(c - x), f(c + x));
        fv[2 * j] = f1;
        fv[14 - 2 * j] = f2;
        resk += WGK[2 * j] * (f1 + f2);
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }
    resasc *= h.abs();
    let mut err = ((resk - resg) * h).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * 1.0f64.min((200.0 * err / resasc).powf(1.5));
    }
    (resk * h, err)
}

const MAX_PANELS: usize = 4000;

/// Adaptive bisection over a finite interval until the summed panel
/// error estimate drops below `abs_tol`.
pub fn adaptive_quad(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    context: &str,
) -> Result<QuadOutcome, Error> {
    if abs_tol.is_nan() || abs_tol <= 0.0 {
        return Err(Error::BadRequest(format!(
            "abs_tol must be positive in {context}"
        )));
    }
    if a == b {
        return Ok(QuadOutcome {
            value: 0.0,
            abs_error: 0.0,
        });
    }
    // Seed with several panels rather than one: a single wide panel can
    // straddle a narrow feature with a deceptively small error estimate.
    let mut breaks = Vec::with_capacity(INITIAL_PANELS + 1);
    breaks.push(a);
    for i in 1..INITIAL_PANELS {
        breaks.push(a + (b - a) * i as f64 / INITIAL_PANELS as f64);
    }
    breaks.push(b);
    adaptive_quad_with_breaks(f, &breaks, abs_tol, context)
}

const INITIAL_PANELS: usize = 16;

fn adaptive_quad_with_breaks(
    f: &dyn Fn(f64) -> f64,
    breaks: &[f64],
    abs_tol: f64,
    context: &str,
) -> Result<QuadOutcome, Error> {
    let mut panels: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(64);
    for w in breaks.windows(2) {
        let (v, e) = gk15(f, w[0], w[1]);
        panels.push((w[0], w[1], v, e));
    }
    loop {
        if panels.iter().any(|p| !(p.2.is_finite() && p.3.is_finite())) {
            return Err(Error::Convergence {
                context: format!("{context} (integrand produced a non-finite value)"),
                best_error: f64::INFINITY,
                requested: abs_tol,
            });
        }
        let total_err: f64 = panels.iter().map(|p| p.3).sum();
        if total_err <= abs_tol {
            let value = panels.iter().map(|p| p.2).sum();
            return Ok(QuadOutcome {
                value,
                abs_error: total_err,
            });
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::Convergence {
                context: context.to_string(),
                best_error: total_err,
                requested: abs_tol,
            });
        }
        // split the worst panel
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (pa, pb, _, perr) = panels[idx];
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            // interval no longer splittable in f64
            return Err(Error::Convergence {
                context: format!("{context} (panel width underflow near {pa})"),
                best_error: perr,
                requested: abs_tol,
            });
        }
        let left = gk15(f, pa, mid);
        let right = gk15(f, mid, pb);
        panels[idx] = (pa, mid, left.0, left.1);
        panels.push((mid, pb, right.0, right.1));
    }
}

/// Truncation point for a semi-infinite integral whose integrand is
/// bounded by an envelope `A * exp(-decay * (x - a))`: the amplitude `A`
/// is estimated by back-extrapolating a few probe evaluations, and the
/// cutoff is placed where the *tail mass* `A exp(-decay(c-a))/decay`
/// falls below `abs_tol/100`.
fn envelope_cutoff(f: &dyn Fn(f64) -> f64, a: f64, decay: f64, abs_tol: f64) -> f64 {
    let scale = 1.0 / decay;
    let mut amp = 0.0_f64;
    for j in 0..6 {
        let x = a + 0.7 * j as f64 * scale;
        let fx = f(x).abs();
        if fx > 0.0 {
            amp = amp.max(fx * (decay * (x - a)).exp());
        }
    }
    if amp == 0.0 {
        amp = 1.0;
    }
    let tail_target = abs_tol / 100.0;
    let c = a + (amp / (tail_target * decay)).max(1.0).ln() * scale;
    c.max(a + 2.0 * scale)
}

/// Adaptive integration of `f` over `[a, inf)` given the decay rate of
/// its exponential envelope. The truncated domain is seeded with
/// geometrically graded panels from the left, where decaying integrands
/// concentrate their structure; uniform seeding there can leave the
/// first panels so much wider than the feature scale that their error
/// estimates lie.
pub fn adaptive_quad_semi_inf(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    decay: f64,
    abs_tol: f64,
    context: &str,
) -> Result<QuadOutcome, Error> {
    debug_assert!(decay > 0.0, "envelope decay must be positive");
    let b = envelope_cutoff(f, a, decay, abs_tol);
    let mut breaks = Vec::with_capacity(INITIAL_PANELS + 1);
    breaks.push(a);
    for i in (1..INITIAL_PANELS).rev() {
        breaks.push(a + (b - a) / (1u64 << i) as f64);
    }
    breaks.push(b);
    let mut out = adaptive_quad_with_breaks(f, &breaks, abs_tol, context)?;
    out.abs_error += abs_tol / 100.0; // truncated tail allowance
    Ok(out)
}

/// Like [`adaptive_quad_semi_inf`], but with an a-posteriori check: the
/// integral is recomputed at a four-times-tighter tolerance and the two
/// results must agree within `abs_tol`. Gauss-Kronrod error estimates
/// can understate the error of a marginally resolved panel set; the
/// difference between two refinement levels is an observed bound rather
/// than a guess. Meant for the outermost layer of a nest, where a lying
/// estimate would otherwise go unnoticed.
pub fn adaptive_quad_semi_inf_verified(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    decay: f64,
    abs_tol: f64,
    context: &str,
) -> Result<QuadOutcome, Error> {
    let coarse = adaptive_quad_semi_inf(f, a, decay, abs_tol, context)?;
    let fine = adaptive_quad_semi_inf(f, a, decay, abs_tol / 4.0, context)?;
    let diff = (coarse.value - fine.value).abs();
    if diff <= abs_tol {
        return Ok(QuadOutcome {
            value: fine.value,
            abs_error: fine.abs_error.max(diff),
        });
    }
    let finer = adaptive_quad_semi_inf(f, a, decay, abs_tol / 16.0, context)?;
    let diff2 = (fine.value - finer.value).abs();
    if diff2 <= abs_tol {
        return Ok(QuadOutcome {
            value: finer.value,
            abs_error: finer.abs_error.max(diff2),
        });
    }
    Err(Error::Convergence {
        context: format!("{context} (refinement levels keep disagreeing)"),
        best_error: diff2,
        requested: abs_tol,
    })
}

/// Which integral definition to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrand {
    /// TS, selected relay in outage, direct-link SNR above `rho - 1`.
    I1,
    /// TS, selected relay in outage, direct-link SNR below `rho - 1`.
    I2,
    /// ITS counterpart of `I1`.
    I3,
    /// ITS counterpart of `I2`.
    I4,
    /// OS, all members in outage, direct-link SNR above the eavesdropper
    /// threshold line.
    I5,
    /// OS complement region.
    I6,
    /// Defining probability of the empty decoding set.
    DirectLinkOutage,
    /// Defining probability of a singleton decoding set.
    SingleRelayOutage,
}

/// A fully specified oracle request.
#[derive(Debug, Clone)]
pub struct QuadratureRequest<'a> {
    pub integrand: Integrand,
    pub links: &'a LinkParams,
    pub cfg: &'a SecrecyConfig,
    /// Decoding set, required by I1..I6.
    pub set: Option<&'a DecodingSet>,
    /// Selected relay, required by I1..I4 and SingleRelayOutage.
    pub relay: Option<usize>,
    pub abs_tol: f64,
}

/// Evaluates one integral definition.
pub fn quad_eval(req: &QuadratureRequest) -> Result<QuadOutcome, Error> {
    if req.abs_tol.is_nan() || req.abs_tol <= 0.0 {
        return Err(Error::BadRequest("abs_tol must be positive".into()));
    }
    let oracle = QuadOracle {
        links: req.links,
        cfg: req.cfg,
    };
    let need_set = |min_len: usize| -> Result<&DecodingSet, Error> {
        let set = req.set.ok_or_else(|| {
            Error::BadRequest(format!("{:?} requires a decoding set", req.integrand))
        })?;
        if set.len() < min_len {
            return Err(Error::BadRequest(format!(
                "{:?} requires a decoding set with at least {min_len} members, got {}",
                req.integrand,
                set.len()
            )));
        }
        Ok(set)
    };
    let need_relay = |set: &DecodingSet| -> Result<usize, Error> {
        let k = req.relay.ok_or_else(|| {
            Error::BadRequest(format!("{:?} requires a selected relay", req.integrand))
        })?;
        if !set.members().contains(&k) {
            return Err(Error::BadRequest(format!(
                "selected relay {k} is not a member of the decoding set"
            )));
        }
        Ok(k)
    };
    match req.integrand {
        Integrand::I1 => {
            let set = need_set(2)?;
            let k = need_relay(set)?;
            oracle.ts_region_above(set, k, req.abs_tol)
        }
        Integrand::I2 => {
            let set = need_set(2)?;
            let k = need_relay(set)?;
            oracle.ts_region_below(set, k, req.abs_tol)
        }
        Integrand::I3 => {
            let set = need_set(2)?;
            let k = need_relay(set)?;
            oracle.its_region_above(set, k, req.abs_tol)
        }
        Integrand::I4 => {
            let set = need_set(2)?;
            let k = need_relay(set)?;
            oracle.its_region_below(set, k, req.abs_tol)
        }
        Integrand::I5 => oracle.os_region_above(need_set(1)?, req.abs_tol),
        Integrand::I6 => oracle.os_region_below(need_set(1)?, req.abs_tol),
        Integrand::DirectLinkOutage => oracle.direct_link_outage(req.abs_tol),
        Integrand::SingleRelayOutage => {
            let k = req.relay.ok_or_else(|| {
                Error::BadRequest("SingleRelayOutage requires a relay index".into())
            })?;
            if k >= req.links.relay_count() {
                return Err(Error::BadRequest(format!("relay {k} out of range")));
            }
            oracle.single_relay_outage(k, req.abs_tol)
        }
    }
}

/// Bundles the system parameters for the integral evaluators.
pub struct QuadOracle<'a> {
    pub links: &'a LinkParams,
    pub cfg: &'a SecrecyConfig,
}

impl<'a> QuadOracle<'a> {
    pub fn new(links: &'a LinkParams, cfg: &'a SecrecyConfig) -> Self {
        Self { links, cfg }
    }

    /// Density of `gamma_se + gamma_ke`, evaluated in the cancellation-free
    /// form `ase*ake*(exp(-ase x) - exp(-ake x))/(ake - ase)` (valid for
    /// equal rates as the Erlang limit).
    fn f_x(&self, alpha_ke: f64, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let ase = self.links.alpha_se;
        ase * alpha_ke * exp_diff_ratio(ase, alpha_ke, x)
    }

    /// Joint selected-relay layer for TS:
    /// `P[max_others < gamma_kd <= lambda]`, computed as
    /// `beta_kd * int_0^lambda prod_i (1 - exp(-beta_id y)) exp(-beta_kd y) dy`
    /// with the product CDF left unexpanded. One numeric dimension.
    fn inner_ts(&self, lambda: f64, beta_kd: f64, others: &[f64], tol: f64) -> f64 {
        if lambda <= 0.0 {
            return 0.0;
        }
        let g = |y: f64| {
            let mut p = (-beta_kd * y).exp();
            for &w in others {
                p *= one_minus_exp_neg(w * y);
            }
            p
        };
        // the exp(-beta_kd y) factor bounds the tail
        let upper = lambda.min(envelope_cutoff(&g, 0.0, beta_kd, tol / beta_kd));
        beta_kd
            * adaptive_quad(&g, 0.0, upper, tol / beta_kd, "inner TS selection layer")
                .map(|o| o.value)
                .unwrap_or(f64::NAN)
    }

    /// Joint selected-relay layer for ITS: the unselected maximum runs
    /// over `gamma_id * alpha_ie`, and the selection threshold for the
    /// candidate rescales by its own `alpha_ke`:
    /// `beta_kd * int_0^lambda prod_i (1 - exp(-w_i alpha_ke u)) exp(-beta_kd u) du`
    /// with `w_i = beta_id / alpha_ie`.
    fn inner_its(
        &self,
        lambda: f64,
        beta_kd: f64,
        alpha_ke: f64,
        other_weights: &[f64],
        tol: f64,
    ) -> f64 {
        if lambda <= 0.0 {
            return 0.0;
        }
        let g = |u: f64| {
            let mut p = (-beta_kd * u).exp();
            for &w in other_weights {
                p *= one_minus_exp_neg(w * alpha_ke * u);
            }
            p
        };
        let upper = lambda.min(envelope_cutoff(&g, 0.0, beta_kd, tol / beta_kd));
        beta_kd
            * adaptive_quad(&g, 0.0, upper, tol / beta_kd, "inner ITS selection layer")
                .map(|o| o.value)
                .unwrap_or(f64::NAN)
    }

    fn member_rates(&self, set: &DecodingSet, k: usize) -> (f64, f64, Vec<usize>) {
        let others: Vec<usize> = set.members().iter().copied().filter(|&i| i != k).collect();
        (self.links.beta_kd[k], self.links.alpha_ke[k], others)
    }

    /// TS region with the direct-link SNR above `rho - 1`. After the
    /// change of variables `u = gamma_sd - (rho-1)`, `s = x - u/rho`, the
    /// domain is a quadrant and the selection layer depends on `s` alone.
    pub fn ts_region_above(
        &self,
        set: &DecodingSet,
        k: usize,
        tol: f64,
    ) -> Result<QuadOutcome, Error> {
        let (beta_kd, alpha_ke, others) = self.member_rates(set, k);
        let other_betas: Vec<f64> = others.iter().map(|&i| self.links.beta_kd[i]).collect();
        self.region_above_common(tol, alpha_ke, move |lambda, tol_y| {
            self.inner_ts(lambda, beta_kd, &other_betas, tol_y)
        })
    }

    /// ITS counterpart of [`Self::ts_region_above`].
    pub fn its_region_above(
        &self,
        set: &DecodingSet,
        k: usize,
        tol: f64,
    ) -> Result<QuadOutcome, Error> {
        let (beta_kd, alpha_ke, others) = self.member_rates(set, k);
        let weights: Vec<f64> = others
            .iter()
            .map(|&i| self.links.beta_kd[i] / self.links.alpha_ke[i])
            .collect();
        self.region_above_common(tol, alpha_ke, move |lambda, tol_y| {
            self.inner_its(lambda, beta_kd, alpha_ke, &weights, tol_y)
        })
    }

    fn region_above_common(
        &self,
        tol: f64,
        alpha_ke: f64,
        inner: impl Fn(f64, f64) -> f64,
    ) -> Result<QuadOutcome, Error> {
        let (beta_sd, alpha_se, rho) = (self.links.beta_sd, self.links.alpha_se, self.cfg.rho);
        let prefactor = beta_sd * (-beta_sd * (rho - 1.0)).exp();
        let tol_u = (tol * 1e-7).max(1e-13);
        let tol_y = (tol * 1e-7).max(1e-13);
        let u_decay = beta_sd + alpha_se.min(alpha_ke) / rho;
        let outer = |s: f64| {
            let sel = inner(rho * s, tol_y);
            if sel == 0.0 {
                return 0.0;
            }
            let fu = |u: f64| (-beta_sd * u).exp() * self.f_x(alpha_ke, u / rho + s);
            let uint = adaptive_quad_semi_inf(&fu, 0.0, u_decay, tol_u, "direct-link excess layer")
                .map(|o| o.value)
                .unwrap_or(f64::NAN);
            sel * prefactor * uint
        };
        let decay = alpha_se.min(alpha_ke);
        adaptive_quad_semi_inf_verified(
            &outer,
            0.0,
            decay,
            tol * 0.5,
            "TS/ITS region above threshold",
        )
    }

    /// TS region with the direct-link SNR below `rho - 1`, integrated
    /// over the outage cap `lambda` with the finite shortfall layer inside.
    pub fn ts_region_below(
        &self,
        set: &DecodingSet,
        k: usize,
        tol: f64,
    ) -> Result<QuadOutcome, Error> {
        let (beta_kd, alpha_ke, others) = self.member_rates(set, k);
        let other_betas: Vec<f64> = others.iter().map(|&i| self.links.beta_kd[i]).collect();
        self.region_below_common(tol, alpha_ke, move |lambda, tol_y| {
            self.inner_ts(lambda, beta_kd, &other_betas, tol_y)
        })
    }

    /// ITS counterpart of [`Self::ts_region_below`].
    pub fn its_region_below(
        &self,
        set: &DecodingSet,
        k: usize,
        tol: f64,
    ) -> Result<QuadOutcome, Error> {
        let (beta_kd, alpha_ke, others) = self.member_rates(set, k);
        let weights: Vec<f64> = others
            .iter()
            .map(|&i| self.links.beta_kd[i] / self.links.alpha_ke[i])
            .collect();
        self.region_below_common(tol, alpha_ke, move |lambda, tol_y| {
            self.inner_its(lambda, beta_kd, alpha_ke, &weights, tol_y)
        })
    }

    fn region_below_common(
        &self,
        tol: f64,
        alpha_ke: f64,
        inner: impl Fn(f64, f64) -> f64,
    ) -> Result<QuadOutcome, Error> {
        let (beta_sd, alpha_se, rho) = (self.links.beta_sd, self.links.alpha_se, self.cfg.rho);
        if rho <= 1.0 {
            // the below-threshold region is empty at zero target rate
            return Ok(QuadOutcome {
                value: 0.0,
                abs_error: 0.0,
            });
        }
        let s_max = rho - 1.0;
        let prefactor = beta_sd / rho;
        let tol_w = (tol * 1e-7).max(1e-13);
        let tol_y = (tol * 1e-7).max(1e-13);
        // lambda = shortfall w + rho x; for fixed lambda integrate the
        // shortfall analytic weight times the hypoexponential density.
        // The direct-link exponential stays grouped as exp(-beta_sd(rho-1-w))
        // so the integrand never exceeds O(f_X).
        let outer = |lambda: f64| {
            let sel = inner(lambda, tol_y);
            if sel == 0.0 {
                return 0.0;
            }
            let fw =
                |w: f64| (-beta_sd * (s_max - w)).exp() * self.f_x(alpha_ke, (lambda - w) / rho);
            let w_hi = s_max.min(lambda);
            let wint = adaptive_quad(&fw, 0.0, w_hi, tol_w, "shortfall layer")
                .map(|o| o.value)
                .unwrap_or(f64::NAN);
            sel * prefactor * wint
        };
        let decay = alpha_se.min(alpha_ke) / rho;
        adaptive_quad_semi_inf_verified(
            &outer,
            0.0,
            decay,
            tol * 0.5,
            "TS/ITS region below threshold",
        )
    }

    /// OS region where the direct-link SNR exceeds the eavesdropper
    /// threshold line `rho*gamma_se + rho - 1`; every member factor has a
    /// one-line closed inner layer and the product is taken numerically.
    pub fn os_region_above(&self, set: &DecodingSet, tol: f64) -> Result<QuadOutcome, Error> {
        let (beta_sd, alpha_se, rho) = (self.links.beta_sd, self.links.alpha_se, self.cfg.rho);
        let members: Vec<(f64, f64)> = set
            .members()
            .iter()
            .map(|&k| (self.links.beta_kd[k], self.links.alpha_ke[k]))
            .collect();
        let sum_ake: f64 = members.iter().map(|&(_, a)| a).sum();
        let tol_z = (tol * 1e-7).max(1e-13);
        let z_decay = beta_sd + sum_ake / rho;
        let outer = |y: f64| {
            let z0 = rho * y + rho - 1.0;
            let fz = |z: f64| {
                let u = z - z0;
                let mut p = beta_sd * (-beta_sd * z).exp();
                for &(bkd, ake) in &members {
                    p *= (-ake * u / rho).exp() * rho * bkd / (rho * bkd + ake);
                }
                p
            };
            let zint = adaptive_quad_semi_inf(&fz, z0, z_decay, tol_z, "OS upper z layer")
                .map(|o| o.value)
                .unwrap_or(f64::NAN);
            alpha_se * (-alpha_se * y).exp() * zint
        };
        adaptive_quad_semi_inf_verified(
            &outer,
            0.0,
            alpha_se,
            tol * 0.5,
            "OS region above threshold",
        )
    }

    /// OS complement region with a finite inner layer.
    pub fn os_region_below(&self, set: &DecodingSet, tol: f64) -> Result<QuadOutcome, Error> {
        let (beta_sd, alpha_se, rho) = (self.links.beta_sd, self.links.alpha_se, self.cfg.rho);
        let members: Vec<(f64, f64)> = set
            .members()
            .iter()
            .map(|&k| (self.links.beta_kd[k], self.links.alpha_ke[k]))
            .collect();
        let tol_z = (tol * 1e-7).max(1e-13);
        let outer = |y: f64| {
            let z0 = rho * y + rho - 1.0;
            let fz = |z: f64| {
                let v = z0 - z;
                let mut p = beta_sd * (-beta_sd * z).exp();
                for &(bkd, ake) in &members {
                    p *= 1.0 - ake * (-bkd * v).exp() / (ake + rho * bkd);
                }
                p
            };
            // the direct-link factor bounds the support; do not let the
            // domain grow with y past its envelope
            let z_hi = z0.min(envelope_cutoff(&fz, 0.0, beta_sd, tol_z));
            let zint = adaptive_quad(&fz, 0.0, z_hi, tol_z, "OS lower z layer")
                .map(|o| o.value)
                .unwrap_or(f64::NAN);
            alpha_se * (-alpha_se * y).exp() * zint
        };
        adaptive_quad_semi_inf_verified(
            &outer,
            0.0,
            alpha_se,
            tol * 0.5,
            "OS region below threshold",
        )
    }

    /// Defining probability for the empty decoding set:
    /// `P[gamma_sd < rho(1 + gamma_se) - 1]` as a one-dimensional integral.
    pub fn direct_link_outage(&self, tol: f64) -> Result<QuadOutcome, Error> {
        let (beta_sd, alpha_se, rho) = (self.links.beta_sd, self.links.alpha_se, self.cfg.rho);
        let f = |y: f64| {
            alpha_se * (-alpha_se * y).exp() * (1.0 - (-beta_sd * (rho - 1.0 + rho * y)).exp())
        };
        adaptive_quad_semi_inf_verified(&f, 0.0, alpha_se, tol, "direct-link outage")
    }

    /// Defining probability for a singleton decoding set:
    /// `P[gamma_sd + gamma_kd < rho(1 + gamma_se + gamma_ke) - 1]`,
    /// with three nested numeric layers (the sum CDF innermost).
    pub fn single_relay_outage(&self, k: usize, tol: f64) -> Result<QuadOutcome, Error> {
        let (beta_sd, alpha_se, rho) = (self.links.beta_sd, self.links.alpha_se, self.cfg.rho);
        let beta_kd = self.links.beta_kd[k];
        let alpha_ke = self.links.alpha_ke[k];
        let tol_x = (tol * 1e-5).max(1e-13);
        let tol_t = (tol * 1e-7).max(1e-13);
        // CDF of gamma_sd + gamma_kd by direct convolution
        let sum_cdf = move |v: f64| -> f64 {
            if v <= 0.0 {
                return 0.0;
            }
            let ft = |t: f64| beta_kd * (-beta_kd * t).exp() * one_minus_exp_neg(beta_sd * (v - t));
            let upper = v.min(envelope_cutoff(&ft, 0.0, beta_kd, tol_t / beta_kd.max(1.0)));
            adaptive_quad(&ft, 0.0, upper, tol_t, "sum-SNR convolution")
                .map(|o| o.value)
                .unwrap_or(f64::NAN)
        };
        let outer = |y: f64| {
            let fx = |x: f64| alpha_ke * (-alpha_ke * x).exp() * sum_cdf(rho - 1.0 + rho * (x + y));
            let xint =
                adaptive_quad_semi_inf(&fx, 0.0, alpha_ke, tol_x, "eavesdropper relay layer")
                    .map(|o| o.value)
                    .unwrap_or(f64::NAN);
            alpha_se * (-alpha_se * y).exp() * xint
        };
        adaptive_quad_semi_inf_verified(&outer, 0.0, alpha_se, tol * 0.5, "single-relay outage")
    }

    /// Conditional per-set outage for `scheme` by quadrature alone.
    pub fn set_outage(&self, scheme: Scheme, set: &DecodingSet, tol: f64) -> Result<f64, Error> {
        match set.len() {
            0 => Ok(self.direct_link_outage(tol)?.value),
            1 => Ok(self.single_relay_outage(set.members()[0], tol)?.value),
            k => {
                match scheme {
                    Scheme::Ts => {
                        let per = tol / k as f64;
                        set.members()
                            .iter()
                            .map(|&m| {
                                Ok(self.ts_region_above(set, m, per)?.value
                                    + self.ts_region_below(set, m, per)?.value)
                            })
                            .sum()
                    }
                    Scheme::Its => {
                        let per = tol / k as f64;
                        set.members()
                            .iter()
                            .map(|&m| {
                                Ok(self.its_region_above(set, m, per)?.value
                                    + self.its_region_below(set, m, per)?.value)
                            })
                            .sum()
                    }
                    Scheme::Os => Ok(self.os_region_above(set, tol)?.value
                        + self.os_region_below(set, tol)?.value),
                }
            }
        }
    }
}

/// End-to-end total outage with every per-set term evaluated by
/// quadrature of the integral definitions.
pub fn total_outage_quad(
    links: &LinkParams,
    cfg: &SecrecyConfig,
    scheme: Scheme,
    tol: f64,
) -> Result<f64, Error> {
    let n = links.relay_count();
    let sets = crate::sets::enumerate_decoding_sets(n)?;
    let oracle = QuadOracle::new(links, cfg);
    let per_set_tol = tol / sets.len() as f64;
    let mut total = 0.0;
    for set in &sets {
        let p = crate::analytic::prob_decoding_set(links, cfg, set);
        if p == 0.0 {
            continue;
        }
        total += p * oracle.set_outage(scheme, set, per_set_tol)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{LinkParams, SecrecyConfig};
    use crate::sets::DecodingSet;

    #[test]
    fn panel_rule_integrates_polynomials_exactly() {
        // GK15 is exact far beyond cubic
        let (v, _) = gk15(&|x: f64| 3.0 * x * x, 0.0, 2.0);
        assert!((v - 8.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_handles_known_integrals() {
        let out =
            adaptive_quad(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12, "sin").unwrap();
        assert!((out.value - 2.0).abs() < 1e-11);
        let out = adaptive_quad_semi_inf(&|x: f64| (-x).exp(), 0.0, 1.0, 1e-10, "exp").unwrap();
        assert!((out.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn convergence_failure_is_reported() {
        // a spike far narrower than the panel budget can resolve
        let f = |x: f64| {
            if (x - 0.123456789).abs() < 1e-280 {
                1e280
            } else {
                0.0
            }
        };
        let r = adaptive_quad(&f, 0.0, 1.0, 1e-12, "needle");
        // either resolves to ~0 or reports failure, but never lies silently
        if let Ok(o) = r {
            assert!(o.abs_error <= 1e-12);
        }
    }

    #[test]
    fn rejects_bad_requests() {
        let links = LinkParams::from_rates(1.0, 1.0, vec![1.0], vec![2.0], vec![2.0]).unwrap();
        let cfg = SecrecyConfig::new(1.0, 1.0).unwrap();
        let set = DecodingSet::new(1, &[0]).unwrap();
        // I5 on an empty set is undefined
        let empty = DecodingSet::new(1, &[]).unwrap();
        let req = QuadratureRequest {
            integrand: Integrand::I5,
            links: &links,
            cfg: &cfg,
            set: Some(&empty),
            relay: None,
            abs_tol: 1e-8,
        };
        assert!(matches!(quad_eval(&req), Err(Error::BadRequest(_))));
        // I1 needs K >= 2
        let req = QuadratureRequest {
            integrand: Integrand::I1,
            links: &links,
            cfg: &cfg,
            set: Some(&set),
            relay: Some(0),
            abs_tol: 1e-8,
        };
        assert!(matches!(quad_eval(&req), Err(Error::BadRequest(_))));
        // nonpositive tolerance
        let req = QuadratureRequest {
            integrand: Integrand::DirectLinkOutage,
            links: &links,
            cfg: &cfg,
            set: None,
            relay: None,
            abs_tol: 0.0,
        };
        assert!(matches!(quad_eval(&req), Err(Error::BadRequest(_))));
    }

    #[test]
    fn direct_link_quadrature_matches_closed_form() {
        let links = LinkParams::from_means_db(3.0, 2.0, &[], &[], &[]).unwrap();
        let cfg = SecrecyConfig::from_db(1.0, 3.0).unwrap();
        let oracle = QuadOracle::new(&links, &cfg);
        let q = oracle.direct_link_outage(1e-10).unwrap();
        let closed = crate::analytic::outage_empty_set(&links, &cfg);
        assert!(
            (q.value - closed).abs() < 1e-9,
            "quad {} vs closed {closed}",
            q.value
        );
    }
}
