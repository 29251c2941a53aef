//! Uniform-linear-array steering, Rayleigh channel draws, training-phase
//! synthesis and pilot correlation.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};
use crate::scenario::{ArrayConfig, ScenarioConfig, UserLink};

/// Unit-norm ULA response; entry `n` is `exp(-j 2 pi n (d/lambda) cos theta) / sqrt(N)`.
pub fn steering_vector(theta: f64, array: &ArrayConfig) -> CVec {
    let n = array.n_antennas;
    let scale = 1.0 / (n as f64).sqrt();
    let step = -2.0 * PI * array.spacing_over_wavelength * theta.cos();
    CVec::from_fn(n, |i, _| Complex64::from_polar(scale, step * i as f64))
}

/// `A = [a(theta_1), ..., a(theta_L)] / sqrt(L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringMatrix {
    pub entries: CMat,
    pub aoas: Vec<f64>,
}

impl SteeringMatrix {
    pub fn from_aoas(aoas: &[f64], array: &ArrayConfig) -> Self {
        let l = aoas.len();
        let scale = Complex64::new(1.0 / (l as f64).sqrt(), 0.0);
        let mut entries = CMat::zeros(array.n_antennas, l);
        for (j, &t) in aoas.iter().enumerate() {
            entries.set_column(j, &(steering_vector(t, array) * scale));
        }
        Self {
            entries,
            aoas: aoas.to_vec(),
        }
    }

    pub fn paths(&self) -> usize {
        self.entries.ncols()
    }

    /// `sqrt(P) A`.
    pub fn composite(&self, power: f64) -> CMat {
        &self.entries * Complex64::new(power.sqrt(), 0.0)
    }
}

pub fn steering_matrix(link: &UserLink, array: &ArrayConfig) -> SteeringMatrix {
    SteeringMatrix::from_aoas(&link.aoas, array)
}

/// `sqrt(P) A` for a link.
pub fn composite_matrix(link: &UserLink, array: &ArrayConfig) -> CMat {
    steering_matrix(link, array).composite(link.power)
}

/// One joint fading and noise realization for every user.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    pub bob_gains: Vec<CVec>,
    pub eve_gains: Vec<CVec>,
    /// N x K noise over the training block.
    pub noise: CMat,
}

/// One `CN(0, variance)` sample: independent real/imaginary parts of
/// variance `variance / 2`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = variance.sqrt() * FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, len: usize) -> CVec {
    CVec::from_fn(len, |_, _| complex_gaussian(rng, 1.0))
}

/// Draws `h_B,m ~ CN(0, I)`, `h_E,m ~ CN(0, I)` and `V` with i.i.d.
/// `CN(0, sigma_v^2)` entries, in that order.
pub fn sample_channel_draw<R: Rng + ?Sized>(config: &ScenarioConfig, rng: &mut R) -> ChannelDraw {
    let bob_gains = config.bobs.iter().map(|b| gaussian_vec(rng, b.paths())).collect();
    let eve_gains = config.eves.iter().map(|e| gaussian_vec(rng, e.paths())).collect();
    let nv = config.noise_variance;
    let noise = if nv == 0.0 {
        CMat::zeros(config.array.n_antennas, config.pilot_length)
    } else {
        CMat::from_fn(config.array.n_antennas, config.pilot_length, |_, _| {
            complex_gaussian(rng, nv)
        })
    };
    ChannelDraw {
        bob_gains,
        eve_gains,
        noise,
    }
}

/// `Y = sum_m (sqrt(P_B,m) A_B,m h_B,m + sqrt(P_E,m) A_E,m h_E,m) p_m^T + V`.
pub fn synthesize_received(
    config: &ScenarioConfig,
    pilots: &[CVec],
    draw: &ChannelDraw,
) -> Result<CMat> {
    synthesize_with(&CompositeSet::new(config), config, pilots, draw)
}

/// Every user's composite matrices, computed once per scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeSet {
    pub bobs: Vec<CMat>,
    pub eves: Vec<CMat>,
}

impl CompositeSet {
    pub fn new(config: &ScenarioConfig) -> Self {
        Self {
            bobs: config.bobs.iter().map(|b| composite_matrix(b, &config.array)).collect(),
            eves: config.eves.iter().map(|e| composite_matrix(e, &config.array)).collect(),
        }
    }
}

/// [`synthesize_received`] with precomputed composite matrices.
pub fn synthesize_with(
    composites: &CompositeSet,
    config: &ScenarioConfig,
    pilots: &[CVec],
    draw: &ChannelDraw,
) -> Result<CMat> {
    let n = config.array.n_antennas;
    let k = config.pilot_length;
    let m = config.users();
    if pilots.len() != m || draw.bob_gains.len() != m || draw.eve_gains.len() != m {
        return Err(Error::Dimension(format!(
            "{m} users but {} pilots, {} Bob gains, {} Eve gains",
            pilots.len(),
            draw.bob_gains.len(),
            draw.eve_gains.len()
        )));
    }
    if draw.noise.shape() != (n, k) {
        return Err(Error::Dimension(format!(
            "noise is {:?}, expected ({n}, {k})",
            draw.noise.shape()
        )));
    }
    let mut y = draw.noise.clone();
    for u in 0..m {
        if pilots[u].len() != k
            || draw.bob_gains[u].len() != config.bobs[u].paths()
            || draw.eve_gains[u].len() != config.eves[u].paths()
        {
            return Err(Error::Dimension(format!("user {u} dimensions do not match config")));
        }
        let mut x = &composites.bobs[u] * &draw.bob_gains[u];
        if config.eves[u].power > 0.0 {
            x += &composites.eves[u] * &draw.eve_gains[u];
        }
        y += x * pilots[u].transpose();
    }
    Ok(y)
}

/// Output of correlating the training block with one user's pilot.
///
/// `k_e` is ground truth; only oracles and knowledge-granting code read it.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatedObservation {
    pub y: CVec,
    pub k_b: CMat,
    pub k_e: CMat,
}

/// `y = Y p*`, returned together with the target user's composite matrices.
pub fn correlate(
    received: &CMat,
    pilot: &CVec,
    target_user: usize,
    config: &ScenarioConfig,
) -> Result<CorrelatedObservation> {
    if received.ncols() != pilot.len() {
        return Err(Error::Dimension(format!(
            "received block has {} columns, pilot length {}",
            received.ncols(),
            pilot.len()
        )));
    }
    let bob = config
        .bobs
        .get(target_user)
        .ok_or_else(|| Error::Dimension(format!("no user {target_user}")))?;
    let y = received * pilot.conjugate();
    Ok(CorrelatedObservation {
        y,
        k_b: composite_matrix(bob, &config.array),
        k_e: composite_matrix(&config.eves[target_user], &config.array),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::singular_values;
    use crate::scenario::make_dft_pilots;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn broadside_is_uniform() {
        let a = steering_vector(PI / 2.0, &ArrayConfig::new(4, 0.5).unwrap());
        for z in a.iter() {
            assert!((z - c(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn endfire_half_wavelength_alternates() {
        let a = steering_vector(0.0, &ArrayConfig::new(2, 0.5).unwrap());
        let s = 1.0 / 2f64.sqrt();
        assert!((a[0] - c(s, 0.0)).norm() < 1e-15);
        assert!((a[1] - c(-s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn consecutive_entry_ratio() {
        let arr = ArrayConfig::reference();
        let th = PI / 5.0;
        let a = steering_vector(th, &arr);
        assert!((a.norm() - 1.0).abs() < 1e-12);
        let want = Complex64::from_polar(1.0, -PI * th.cos());
        for n in 1..10 {
            assert!((a[n] / a[n - 1] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn steering_matrix_column_norms() {
        let arr = ArrayConfig::reference();
        let one = SteeringMatrix::from_aoas(&[1.0], &arr);
        assert!((one.entries.column(0).norm() - 1.0).abs() < 1e-12);
        let bob1 = SteeringMatrix::from_aoas(&[0.0, PI / 10.0, PI / 5.0], &arr);
        assert_eq!(bob1.entries.shape(), (10, 3));
        for j in 0..3 {
            assert!((bob1.entries.column(j).norm() - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn duplicate_aoas_give_rank_one() {
        let m = SteeringMatrix::from_aoas(&[0.7, 0.7], &ArrayConfig::reference());
        let s = singular_values(&m.entries);
        assert!(s[1] / s[0] < 1e-12);
    }

    #[test]
    fn zero_powers_leave_pure_noise() {
        let mut cfg = ScenarioConfig::reference();
        for l in cfg.bobs.iter_mut().chain(cfg.eves.iter_mut()) {
            l.power = 0.0;
        }
        let pilots = make_dft_pilots(8, 2).unwrap();
        let draw = sample_channel_draw(&cfg, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(synthesize_received(&cfg, &pilots, &draw).unwrap(), draw.noise);
    }

    #[test]
    fn noiseless_single_user_is_rank_one() {
        let mut cfg = ScenarioConfig::reference().with_users(1).unwrap().passive();
        cfg.noise_variance = 0.0;
        let pilots = make_dft_pilots(8, 1).unwrap();
        let draw = sample_channel_draw(&cfg, &mut ChaCha8Rng::seed_from_u64(2));
        assert!(draw.noise.iter().all(|z| *z == c(0.0, 0.0)));
        let y = synthesize_received(&cfg, &pilots, &draw).unwrap();
        let s = singular_values(&y);
        assert!(s[1] / s[0] < 1e-12);
        let want = composite_matrix(&cfg.bobs[0], &cfg.array) * &draw.bob_gains[0] * pilots[0].transpose();
        assert!((y - want).norm() < 1e-9);
    }

    #[test]
    fn dimension_mismatch_reported() {
        let cfg = ScenarioConfig::reference();
        let pilots = make_dft_pilots(8, 1).unwrap();
        let draw = sample_channel_draw(&cfg, &mut ChaCha8Rng::seed_from_u64(2));
        assert!(matches!(
            synthesize_received(&cfg, &pilots, &draw),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn noiseless_passive_correlation_recovers_bob_term() {
        let mut cfg = ScenarioConfig::reference().passive();
        cfg.noise_variance = 0.0;
        let pilots = make_dft_pilots(8, 2).unwrap();
        let draw = sample_channel_draw(&cfg, &mut ChaCha8Rng::seed_from_u64(3));
        let y = synthesize_received(&cfg, &pilots, &draw).unwrap();
        let obs = correlate(&y, &pilots[0], 0, &cfg).unwrap();
        assert!((&obs.y - &obs.k_b * &draw.bob_gains[0]).norm() < 1e-10);
    }

    #[test]
    fn correlation_cancels_other_users() {
        let mut cfg = ScenarioConfig::reference();
        cfg.noise_variance = 0.0;
        let pilots = make_dft_pilots(8, 2).unwrap();
        let draw = sample_channel_draw(&cfg, &mut ChaCha8Rng::seed_from_u64(4));
        let both = synthesize_received(&cfg, &pilots, &draw).unwrap();
        let mut silent = cfg.clone();
        silent.bobs[1].power = 0.0;
        silent.eves[1].power = 0.0;
        let alone = synthesize_received(&silent, &pilots, &draw).unwrap();
        let y1 = correlate(&both, &pilots[0], 0, &cfg).unwrap().y;
        let y1_alone = correlate(&alone, &pilots[0], 0, &silent).unwrap().y;
        assert!((y1 - &y1_alone).norm() < 1e-12 * (1.0 + y1_alone.norm()));
    }
}
