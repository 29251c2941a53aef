//! Closed-form BMSE expressions, their floors and bounds, and downlink
//! secrecy evaluation under a matched-filter precoder.

use num_complex::Complex64;
use rand::Rng;

use crate::array_channel::{composite_matrix, ChannelDraw, SteeringMatrix};
use crate::error::{Error, Result};
use crate::estimators::{estimated_spoofing_matrix, DisturbanceModel};
use crate::linalg::{
    hermitian_eigen_desc, hermitize, inverse_hpd, pinv, require_full_column_rank, singular_values,
    solve_hpd, trace_re, CMat, CVec, CompensatedSum,
};
use crate::scenario::{ArrayConfig, EveErrorModel, UserLink};

/// Closed-form BMSE of one estimator with optional limits and cross-checks.
#[derive(Debug, Clone, PartialEq)]
pub struct BmsReport {
    pub tag: String,
    pub closed_form: f64,
    /// Limit as the noise variance goes to zero.
    pub floor: Option<f64>,
    /// `(lower, upper)` bounds on the floor.
    pub bounds: Option<(f64, f64)>,
    /// The same quantity evaluated along a different algebraic route, or an
    /// approximation of it.
    pub alternative_form: Option<f64>,
    /// Mismatch penalty of a plug-in estimator.
    pub degradation: Option<f64>,
}

impl BmsReport {
    fn new(tag: &str, closed_form: f64) -> Self {
        Self {
            tag: tag.to_string(),
            closed_form,
            floor: None,
            bounds: None,
            alternative_form: None,
            degradation: None,
        }
    }
}

fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

fn scale(m: CMat, s: f64) -> CMat {
    m * Complex64::new(s, 0.0)
}

/// BMSE of the LSE for unit-variance gains:
/// `tr[A_B G^{-2} A_B^H A_E A_E^H]/SSR + tr[G^{-1}]/SNR_B`, `G = A_B^H A_B`.
///
/// The floor is the first term; bounds come from [`lemma1_bounds`].
pub fn bmse_lse_closed_form(
    a_b: &SteeringMatrix,
    a_e: &SteeringMatrix,
    snr_b: f64,
    ssr: f64,
) -> Result<BmsReport> {
    let ab = &a_b.entries;
    let ae = &a_e.entries;
    require_full_column_rank(ab)?;
    let g_inv = inverse_hpd(&(ab.adjoint() * ab), "A_B^H A_B")?;
    let spoof = trace_re(&(ab * &g_inv * &g_inv * ab.adjoint() * ae * ae.adjoint()));
    let floor = if ssr.is_infinite() { 0.0 } else { spoof / ssr };
    let noise = if snr_b.is_infinite() { 0.0 } else { trace_re(&g_inv) / snr_b };
    let mut r = BmsReport::new("lse", floor + noise);
    r.floor = Some(floor);
    r.bounds = Some(lemma1_bounds(a_b, a_e, ssr)?);
    Ok(r)
}

/// Singular-value bounds on the LSE floor. `A_B` singular values are taken
/// in increasing order; the lower bound pairs them with the smallest `A_E`
/// singular values, the upper bound with the largest.
pub fn lemma1_bounds(a_b: &SteeringMatrix, a_e: &SteeringMatrix, ssr: f64) -> Result<(f64, f64)> {
    let ab = &a_b.entries;
    require_full_column_rank(ab)?;
    let n = ab.nrows();
    let mut sb = singular_values(ab);
    sb.reverse();
    let mut se = singular_values(&a_e.entries);
    se.resize(n, 0.0);
    let inv_ssr = if ssr.is_infinite() { 0.0 } else { 1.0 / ssr };
    let mut lower = 0.0;
    let mut upper = 0.0;
    for (l, s) in sb.iter().enumerate() {
        let s2 = s * s;
        lower += se[n - 1 - l].powi(2) / s2;
        upper += se[l].powi(2) / s2;
    }
    Ok((lower * inv_ssr, upper * inv_ssr))
}

/// BMSE of the MLE, `tr[(K_B^H R_dd^{-1} K_B)^{-1}]`.
///
/// When `disturbance` carries its factors `(K_E, sigma_v^2)` the report also
/// holds the projector expansion
/// `s tr[(K_B^H K_B)^{-1}] + s tr[K_B^+ K_E (K_E^H P K_E + s I)^{-1} K_E^H K_B^+H]`
/// and the zero-noise floor
/// `tr[K_B^+ K_E Pi K_E^H K_B^+H]`, `Pi` the projector onto the null space
/// of `K_E^H P K_E`. The floor is `tr[K_B^+ K_E K_E^H K_B^+H]` when the Eve
/// subspace lies inside Bob's and 0 when the two are disjoint.
pub fn bmse_mle_closed_form(k_b: &CMat, disturbance: &DisturbanceModel) -> Result<BmsReport> {
    require_full_column_rank(k_b)?;
    let whitened = solve_hpd(disturbance.matrix(), k_b, "R_dd")?;
    let fisher = k_b.adjoint() * whitened;
    let mut r = BmsReport::new("mle", trace_re(&inverse_hpd(&fisher, "K_B^H R_dd^{-1} K_B")?));
    if let Some((k_e, s)) = disturbance.spoofing() {
        let n = k_b.nrows();
        let l_e = k_e.ncols();
        let g_inv = inverse_hpd(&(k_b.adjoint() * k_b), "K_B^H K_B")?;
        let k_pinv = &g_inv * k_b.adjoint();
        let proj_out = identity(n) - k_b * &k_pinv;
        let t = &k_pinv * k_e;
        let m = hermitize(&(k_e.adjoint() * &proj_out * k_e));
        let alt = if l_e == 0 {
            s * trace_re(&g_inv)
        } else {
            let inner = inverse_hpd(&(&m + scale(identity(l_e), s)), "K_E^H P K_E + s I")?;
            s * trace_re(&g_inv) + s * trace_re(&(&t * inner * t.adjoint()))
        };
        r.alternative_form = Some(alt);

        let floor = if l_e == 0 {
            0.0
        } else {
            let (vals, vecs) = hermitian_eigen_desc(&m);
            let tol = 1e-10 * (1.0 + k_e.norm_squared());
            let mut null = CMat::zeros(l_e, l_e);
            for (j, &v) in vals.iter().enumerate() {
                if v.abs() <= tol {
                    let u = vecs.column(j);
                    null += &u * u.adjoint();
                }
            }
            trace_re(&(&t * null * t.adjoint()))
        };
        r.floor = Some(floor);
    }
    Ok(r)
}

/// Bayesian information matrix `K_B^H R_dd^{-1} K_B + I`.
pub fn bayesian_information_matrix(k_b: &CMat, disturbance: &DisturbanceModel) -> Result<CMat> {
    let whitened = solve_hpd(disturbance.matrix(), k_b, "R_dd")?;
    Ok(hermitize(&(k_b.adjoint() * whitened + identity(k_b.ncols()))))
}

/// BMSE of the MMSE estimator, `tr[(I + K_B^H R_dd^{-1} K_B)^{-1}]`.
///
/// `alternative_form` is the trace of the inverse information matrix via a
/// general LU inverse. With the disturbance factors available, the floor is
/// `L_B - tr[J^T (K^+ K)^H J]` for `K = [K_B, K_E]`.
pub fn bmse_mmse_closed_form(k_b: &CMat, disturbance: &DisturbanceModel) -> Result<BmsReport> {
    let bim = bayesian_information_matrix(k_b, disturbance)?;
    let mut r = BmsReport::new("mmse", trace_re(&inverse_hpd(&bim, "BIM")?));
    r.alternative_form = bim
        .clone()
        .try_inverse()
        .map(|inv| trace_re(&inv));
    if let Some((k_e, _)) = disturbance.spoofing() {
        let l_b = k_b.ncols();
        let mut k = CMat::zeros(k_b.nrows(), l_b + k_e.ncols());
        k.columns_mut(0, l_b).copy_from(k_b);
        k.columns_mut(l_b, k_e.ncols()).copy_from(k_e);
        let p = pinv(&k, 1e-10) * &k;
        let kept: f64 = (0..l_b).map(|i| p[(i, i)].re).sum();
        r.floor = Some(l_b as f64 - kept);
    }
    Ok(r)
}

/// Expected BMSE of the naive LMMSE estimator under Alice's error model.
///
/// Each of `error_samples` draws of Alice's knowledge contributes
/// `tr[K_B^H Rh^{-1}(R Rh^{-1} - I) K_B] + tr[(I + K_B^H Rh_dd^{-1} K_B)^{-1}]`
/// with `Rh` built from the estimates and `R` from `true_eve`. The mean of
/// the first term is `degradation`; `alternative_form` is the exact MMSE
/// BMSE plus that mean.
#[allow(clippy::too_many_arguments)]
pub fn bmse_lmmse_naive_semianalytic<R: Rng + ?Sized>(
    k_b: &CMat,
    true_eve: &UserLink,
    model: &EveErrorModel,
    noise_variance: f64,
    array: &ArrayConfig,
    error_samples: usize,
    rng: &mut R,
) -> Result<BmsReport> {
    if error_samples == 0 {
        return Err(Error::EmptyInput("no error samples"));
    }
    let n = k_b.nrows();
    let l_b = k_b.ncols();
    let k_e = composite_matrix(true_eve, array);
    let noise = scale(identity(n), noise_variance);
    let bob = k_b * k_b.adjoint();
    let r_true = hermitize(&(&bob + &k_e * k_e.adjoint() + &noise));
    let mut delta = CompensatedSum::default();
    let mut total = CompensatedSum::default();
    for _ in 0..error_samples {
        let know = model.sample_knowledge(true_eve, rng);
        let k_hat = estimated_spoofing_matrix(&know, array);
        let r_dd_hat = hermitize(&(&k_hat * k_hat.adjoint() + &noise));
        let r_hat = hermitize(&(&bob + &r_dd_hat));
        let x = solve_hpd(&r_hat, k_b, "R_hat_yy")?;
        let d = trace_re(&(x.adjoint() * (&r_true * &x - k_b)));
        let w = solve_hpd(&r_dd_hat, k_b, "R_hat_dd")?;
        let base = trace_re(&inverse_hpd(&(identity(l_b) + k_b.adjoint() * w), "I + K_B^H Rh_dd^{-1} K_B")?);
        delta.add(d);
        total.add(d + base);
    }
    let q = error_samples as f64;
    let exact = bmse_mmse_closed_form(k_b, &DisturbanceModel::from_spoofing(&k_e, noise_variance)?)?;
    let mut r = BmsReport::new("lmmse-naive", total.value() / q);
    r.degradation = Some(delta.value() / q);
    r.alternative_form = Some(exact.closed_form + delta.value() / q);
    Ok(r)
}

/// Downlink beamformer with unit Frobenius norm; column `m` serves user `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    pub w: CMat,
}

/// `W = conj(H_hat) / ||H_hat||_F` with column `m` of `H_hat` equal to
/// `A_B,m h_hat_m`.
pub fn matched_filter_precoder(estimates: &[CVec], steering: &[SteeringMatrix]) -> Result<Precoder> {
    if estimates.is_empty() {
        return Err(Error::EmptyInput("no channel estimates"));
    }
    if estimates.len() != steering.len() {
        return Err(Error::Dimension(format!(
            "{} estimates for {} steering matrices",
            estimates.len(),
            steering.len()
        )));
    }
    let n = steering[0].entries.nrows();
    let mut h = CMat::zeros(n, estimates.len());
    for (m, (est, a)) in estimates.iter().zip(steering).enumerate() {
        if a.entries.ncols() != est.len() || a.entries.nrows() != n {
            return Err(Error::Dimension(format!("user {m} estimate does not match its steering")));
        }
        h.set_column(m, &(&a.entries * est));
    }
    let norm = h.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::DegeneratePrecoder);
    }
    Ok(Precoder {
        w: h.conjugate() / Complex64::new(norm, 0.0),
    })
}

/// Per-user downlink quality for one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkQuality {
    pub sinr_bob: f64,
    pub sinr_eve: f64,
    pub rate_bob: f64,
    pub rate_eve: f64,
    /// `max(rate_bob - rate_eve, 0)` for this realization.
    pub secrecy: f64,
}

fn sinr(g: &CVec, w: &CMat, user: usize, snr_dl: f64) -> f64 {
    let mut signal = 0.0;
    let mut interference = 0.0;
    for m in 0..w.ncols() {
        let p = g.dot(&w.column(m)).norm_sqr();
        if m == user {
            signal = p;
        } else {
            interference += p;
        }
    }
    snr_dl * signal / (snr_dl * interference + 1.0)
}

/// SINR of receiver channel `g = A h` for beam `user`:
/// `SNR_DL |g^T w_u|^2 / (SNR_DL sum_{m != u} |g^T w_m|^2 + 1)`, evaluated
/// for every Bob and Eve, with rates `log2(1 + SINR)`.
pub fn sinr_and_secrecy(
    draw: &ChannelDraw,
    precoder: &Precoder,
    bob_steering: &[SteeringMatrix],
    eve_steering: &[SteeringMatrix],
    snr_dl: f64,
) -> Result<Vec<LinkQuality>> {
    let m = precoder.w.ncols();
    if bob_steering.len() != m
        || eve_steering.len() != m
        || draw.bob_gains.len() != m
        || draw.eve_gains.len() != m
    {
        return Err(Error::Dimension("precoder, steering and draw disagree on user count".into()));
    }
    (0..m)
        .map(|u| {
            let g_b = &bob_steering[u].entries * &draw.bob_gains[u];
            let g_e = &eve_steering[u].entries * &draw.eve_gains[u];
            if g_b.len() != precoder.w.nrows() || g_e.len() != precoder.w.nrows() {
                return Err(Error::Dimension(format!("user {u} channel length mismatch")));
            }
            let sinr_bob = sinr(&g_b, &precoder.w, u, snr_dl);
            let sinr_eve = sinr(&g_e, &precoder.w, u, snr_dl);
            let rate_bob = (1.0 + sinr_bob).log2();
            let rate_eve = (1.0 + sinr_eve).log2();
            Ok(LinkQuality {
                sinr_bob,
                sinr_eve,
                rate_bob,
                rate_eve,
                secrecy: (rate_bob - rate_eve).max(0.0),
            })
        })
        .collect()
}
