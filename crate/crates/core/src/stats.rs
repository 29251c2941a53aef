//! Truncated Gaussian / lognormal error models and the expected steering
//! outer product used by the improved LMMSE estimator.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::erf_inv;

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::scenario::ArrayConfig;

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Below this acceptance probability rejection sampling switches to
/// inverse-CDF sampling.
const MIN_REJECTION_ACCEPTANCE: f64 = 0.05;

/// Gaussian with location `mu` and shape `sigma`, restricted to `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncGauss {
    pub mu: f64,
    pub sigma: f64,
    pub a: f64,
    pub b: f64,
}

impl TruncGauss {
    pub fn new(mu: f64, sigma: f64, a: f64, b: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) || !(b > a) || !mu.is_finite() {
            return Err(Error::Config(format!(
                "invalid truncated Gaussian (mu={mu}, sigma={sigma}, a={a}, b={b})"
            )));
        }
        Ok(Self { mu, sigma, a, b })
    }

    /// Zero-location, truncated to `[-half_width, half_width]`.
    pub fn symmetric(sigma: f64, half_width: f64) -> Result<Self> {
        Self::new(0.0, sigma, -half_width, half_width)
    }

    /// Probability mass of the untruncated Gaussian inside `[a, b]`.
    pub fn normalization(&self) -> f64 {
        let s = SQRT_2 * self.sigma;
        (erf((self.b - self.mu) / s) - erf((self.a - self.mu) / s)) / 2.0
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < self.a || x > self.b {
            return 0.0;
        }
        let z = (x - self.mu) / self.sigma;
        (-0.5 * z * z).exp() / (self.normalization() * (2.0 * PI).sqrt() * self.sigma)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.normalization() < MIN_REJECTION_ACCEPTANCE {
            return self.sample_inverse_cdf(rng);
        }
        loop {
            let z: f64 = rng.sample(StandardNormal);
            let x = self.mu + self.sigma * z;
            if x >= self.a && x <= self.b {
                return x;
            }
        }
    }

    fn sample_inverse_cdf<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let s = SQRT_2 * self.sigma;
        let lo = erf((self.a - self.mu) / s);
        let hi = erf((self.b - self.mu) / s);
        let u: f64 = rng.random();
        let x = self.mu + s * erf_inv(lo + u * (hi - lo));
        x.clamp(self.a, self.b)
    }

    /// `E[X^2] = sigma^2 (1 - 2 b p(b))` for the symmetric zero-location case.
    pub fn symmetric_second_moment(&self) -> f64 {
        self.sigma * self.sigma * (1.0 - 2.0 * self.b * self.pdf(self.b))
    }
}

/// `E[e^X] = E[e^{-X}]` for `X` a zero-location Gaussian of shape `sigma`
/// truncated to `[-b, b]`.
pub fn trunc_lognormal_mean(sigma: f64, b: f64) -> f64 {
    let s2 = sigma * sigma;
    let d = SQRT_2 * sigma;
    (s2 / 2.0).exp() / (2.0 * erf(b / d)) * (erf((b - s2) / d) + erf((b + s2) / d))
}

/// Half of the truncated second moment, `sigma^2 [1/2 - b p(b)]`, written in
/// the form that appears inside the expected steering outer product.
fn half_truncated_second_moment(sigma: f64, b: f64) -> f64 {
    let tail = b / (erf(b / (SQRT_2 * sigma)) * (2.0 * PI).sqrt() * sigma)
        * (-(b * b) / (2.0 * sigma * sigma)).exp();
    sigma * sigma * (0.5 - tail)
}

/// Second-order approximation of `E[a(theta_hat - dt) a^H(theta_hat - dt)]`
/// for `dt` truncated Gaussian with shape `sigma_theta` on
/// `[-delta_theta_max, delta_theta_max]`.
///
/// Entry `(n1, n2)` depends only on `d = n1 - n2`; the phase term uses the
/// array's `d/lambda` as the spacing factor. The result is Hermitian with
/// unit trace but is not guaranteed positive semidefinite once
/// `2 pi d (d/lambda) sin(theta_hat) sigma_theta` approaches 1.
pub fn raa_matrix(
    theta_hat: f64,
    sigma_theta: f64,
    delta_theta_max: f64,
    array: &ArrayConfig,
) -> CMat {
    let n = array.n_antennas;
    let spacing = array.spacing_over_wavelength;
    let m2 = half_truncated_second_moment(sigma_theta, delta_theta_max);
    let (sin_t, cos_t) = theta_hat.sin_cos();
    let inv_n = 1.0 / n as f64;
    CMat::from_fn(n, n, |n1, n2| {
        let d = n1 as f64 - n2 as f64;
        let beta_q = 2.0 * PI * d * spacing * sin_t;
        let beta_i = 2.0 * PI * d * spacing * cos_t;
        let amp = Complex64::new(1.0 - beta_q * beta_q * m2, beta_i * m2);
        amp * Complex64::from_polar(inv_n, -beta_i)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Composite Simpson's rule.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let n = n + n % 2;
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + h * i as f64);
        }
        s * h / 3.0
    }

    #[test]
    fn erf_reference_value() {
        assert!((erf(1.0) - 0.842_700_792_949_714_9).abs() < 1e-12);
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(-0.5) + erf(0.5)).abs() < 1e-16);
    }

    #[test]
    fn pdf_zero_outside_and_symmetric() {
        let d = TruncGauss::symmetric(0.3, 0.5).unwrap();
        assert_eq!(d.pdf(0.51), 0.0);
        assert_eq!(d.pdf(-0.7), 0.0);
        for x in [0.0, 0.1, 0.27, 0.5] {
            assert_eq!(d.pdf(x), d.pdf(-x));
        }
    }

    #[test]
    fn pdf_integrates_to_one() {
        for (mu, s, a, b) in [(0.0, 0.3, -0.5, 0.5), (0.2, 1.0, -1.0, 3.0), (0.0, 0.05, -0.1, 0.1)] {
            let d = TruncGauss::new(mu, s, a, b).unwrap();
            let area = simpson(|x| d.pdf(x), a, b, 20_000);
            assert!((area - 1.0).abs() < 1e-8, "{area}");
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(TruncGauss::new(0.0, 0.0, -1.0, 1.0).is_err());
        assert!(TruncGauss::new(0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn samples_stay_in_window_and_are_centered() {
        let d = TruncGauss::symmetric(0.2, 0.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
        assert!(xs.iter().all(|x| x.abs() <= 0.3));
        let mean = xs.iter().sum::<f64>() / n as f64;
        assert!(mean.abs() < 4.0 * 0.2 / (n as f64).sqrt());
    }

    #[test]
    fn wide_window_second_moment_is_untruncated() {
        let sigma = 0.7;
        let d = TruncGauss::symmetric(sigma, 6.0 * sigma).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 100_000;
        let m2 = (0..n).map(|_| d.sample(&mut rng).powi(2)).sum::<f64>() / n as f64;
        assert!((m2 / (sigma * sigma) - 1.0).abs() < 0.01, "{m2}");
        assert!((d.symmetric_second_moment() / (sigma * sigma) - 1.0).abs() < 0.005);
    }

    #[test]
    fn narrow_window_uses_inverse_cdf() {
        let d = TruncGauss::new(0.0, 1.0, 3.0, 3.2).unwrap();
        assert!(d.normalization() < MIN_REJECTION_ACCEPTANCE);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 20_000;
        let xs: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
        assert!(xs.iter().all(|&x| (3.0..=3.2).contains(&x)));
        let mean = xs.iter().sum::<f64>() / n as f64;
        let want = simpson(|x| x * d.pdf(x), 3.0, 3.2, 2000);
        assert!((mean - want).abs() < 2e-3, "{mean} vs {want}");
    }

    #[test]
    fn lognormal_mean_limits() {
        assert!((trunc_lognormal_mean(1e-4, 0.3454) - 1.0).abs() < 1e-7);
        let v = trunc_lognormal_mean(0.1727, 0.3454);
        assert!(v > 1.0 && v <= (0.1727f64 * 0.1727 / 2.0).exp());
    }

    #[test]
    fn lognormal_mean_matches_quadrature() {
        for (s, b) in [(0.1727, 0.3454), (0.5, 1.0), (0.05, 0.2)] {
            let d = TruncGauss::symmetric(s, b).unwrap();
            let q = simpson(|x| (-x).exp() * d.pdf(x), -b, b, 20_000);
            assert!((trunc_lognormal_mean(s, b) - q).abs() < 1e-8);
        }
    }

    #[test]
    fn raa_diagonal_trace_and_hermitian() {
        let arr = ArrayConfig::reference();
        let r = raa_matrix(2.0 * PI / 5.0, PI / 75.0, PI / 25.0, &arr);
        for i in 0..10 {
            assert!((r[(i, i)] - Complex64::new(0.1, 0.0)).norm() < 1e-15);
        }
        assert!((r.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((&r - r.adjoint()).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn raa_zero_uncertainty_is_outer_product() {
        let arr = ArrayConfig::reference();
        let th = 2.0 * PI / 5.0;
        let r = raa_matrix(th, 1e-7, 3e-7, &arr);
        let a = crate::array_channel::steering_vector(th, &arr);
        let outer = &a * a.adjoint();
        assert!((r - outer).iter().all(|z| z.norm() < 1e-12));
    }
}
