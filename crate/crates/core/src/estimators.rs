//! Channel estimators for the target Bob.
//!
//! Each estimator takes exactly the side information it is entitled to:
//! LSE sees only `K_B`; MLE adds the disturbance correlation; the MMSE
//! family adds the data correlation (exact, sampled, or its signal
//! subspace); the LMMSE variants see Alice's noisy [`EveKnowledge`] and the
//! noise variance, never the true Eve link.

use num_complex::Complex64;

use crate::array_channel::SteeringMatrix;
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen_desc, hermitize, is_hermitian, require_full_column_rank, solve_hermitian_vec,
    solve_hpd, solve_hpd_vec, CMat, CVec,
};
use crate::scenario::{ArrayConfig, EveKnowledge};
use crate::stats::{raa_matrix, trunc_lognormal_mean};

fn hermitian_tol(m: &CMat) -> f64 {
    1e-12 * (1.0 + m.norm())
}

/// `R_dd = K_E K_E^H + sigma_v^2 I`, the spoofing-plus-noise correlation.
#[derive(Debug, Clone, PartialEq)]
pub struct DisturbanceModel {
    r_dd: CMat,
    spoofing: Option<(CMat, f64)>,
}

impl DisturbanceModel {
    pub fn from_spoofing(k_e: &CMat, noise_variance: f64) -> Result<Self> {
        if !(noise_variance > 0.0) {
            return Err(Error::Model(format!(
                "noise variance must be positive, got {noise_variance}"
            )));
        }
        let n = k_e.nrows();
        let r_dd = k_e * k_e.adjoint() + CMat::identity(n, n) * Complex64::new(noise_variance, 0.0);
        Ok(Self {
            r_dd: hermitize(&r_dd),
            spoofing: Some((k_e.clone(), noise_variance)),
        })
    }

    /// Wraps an arbitrary Hermitian positive definite matrix.
    pub fn new(r_dd: CMat) -> Result<Self> {
        if !is_hermitian(&r_dd, hermitian_tol(&r_dd)) {
            return Err(Error::Model("disturbance correlation is not Hermitian".into()));
        }
        solve_hpd(&r_dd, &CMat::zeros(r_dd.nrows(), 0), "disturbance correlation")
            .map_err(|e| Error::Model(e.to_string()))?;
        Ok(Self {
            r_dd,
            spoofing: None,
        })
    }

    pub fn matrix(&self) -> &CMat {
        &self.r_dd
    }

    /// `(K_E, sigma_v^2)` when the model was built from its factors.
    pub fn spoofing(&self) -> Option<(&CMat, f64)> {
        self.spoofing.as_ref().map(|(k, s)| (k, *s))
    }
}

/// Data correlation `R_yy` (exact) or a sample estimate `S_yy`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataCorrelation {
    r_yy: CMat,
}

impl DataCorrelation {
    pub fn new(r_yy: CMat) -> Result<Self> {
        if !is_hermitian(&r_yy, hermitian_tol(&r_yy)) {
            return Err(Error::Model("data correlation is not Hermitian".into()));
        }
        Ok(Self { r_yy })
    }

    /// `R_yy = K_B K_B^H + R_dd`.
    pub fn exact(k_b: &CMat, disturbance: &DisturbanceModel) -> Self {
        Self {
            r_yy: hermitize(&(k_b * k_b.adjoint() + disturbance.matrix())),
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.r_yy
    }
}

/// Signal/noise subspace split of a data correlation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceDecomp {
    pub u_s: CMat,
    /// Signal eigenvalues, decreasing.
    pub lambda_s: Vec<f64>,
    pub u_n: CMat,
    /// Remaining eigenvalues, decreasing.
    pub lambda_n: Vec<f64>,
    pub r: usize,
}

fn check_dims(y: &CVec, k_b: &CMat) -> Result<()> {
    if y.len() != k_b.nrows() {
        return Err(Error::Dimension(format!(
            "observation length {} vs composite matrix rows {}",
            y.len(),
            k_b.nrows()
        )));
    }
    Ok(())
}

/// `(K_B^H K_B)^{-1} K_B^H y`.
pub fn lse(y: &CVec, k_b: &CMat) -> Result<CVec> {
    check_dims(y, k_b)?;
    require_full_column_rank(k_b)?;
    solve_hpd_vec(&(k_b.adjoint() * k_b), &(k_b.adjoint() * y), "K_B^H K_B")
}

/// `(K_B^H R_dd^{-1} K_B)^{-1} K_B^H R_dd^{-1} y`.
///
/// A silent spoofer (`K_E = 0`) leaves white disturbance and the result is
/// exactly [`lse`].
pub fn mle(y: &CVec, k_b: &CMat, disturbance: &DisturbanceModel) -> Result<CVec> {
    check_dims(y, k_b)?;
    if let Some((k_e, _)) = disturbance.spoofing() {
        if k_e.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
            return lse(y, k_b);
        }
    }
    require_full_column_rank(k_b)?;
    let whitened = solve_hpd(disturbance.matrix(), k_b, "R_dd").map_err(|e| Error::Model(e.to_string()))?;
    let fisher = k_b.adjoint() * &whitened;
    solve_hpd_vec(&fisher, &(whitened.adjoint() * y), "K_B^H R_dd^{-1} K_B")
}

/// `K_B^H R_yy^{-1} y`. Defined for rank-deficient `K_B`.
pub fn mmse(y: &CVec, k_b: &CMat, data_corr: &DataCorrelation) -> Result<CVec> {
    check_dims(y, k_b)?;
    let x = solve_hpd_vec(data_corr.matrix(), y, "R_yy").map_err(|e| Error::Model(e.to_string()))?;
    Ok(k_b.adjoint() * x)
}

/// `(I + K_B^H R_dd^{-1} K_B)^{-1} K_B^H R_dd^{-1} y`, the disturbance-side
/// form of [`mmse`].
pub fn mmse_disturbance_form(y: &CVec, k_b: &CMat, disturbance: &DisturbanceModel) -> Result<CVec> {
    check_dims(y, k_b)?;
    let whitened = solve_hpd(disturbance.matrix(), k_b, "R_dd").map_err(|e| Error::Model(e.to_string()))?;
    let l = k_b.ncols();
    let info = CMat::identity(l, l) + k_b.adjoint() * &whitened;
    solve_hpd_vec(&info, &(whitened.adjoint() * y), "I + K_B^H R_dd^{-1} K_B")
}

/// `S_yy = (1/Q) sum_q y_q y_q^H`.
pub fn estimate_sample_correlation(snapshots: &[CVec]) -> Result<DataCorrelation> {
    let first = snapshots.first().ok_or(Error::EmptyInput("no snapshots"))?;
    let n = first.len();
    let mut s = CMat::zeros(n, n);
    for y in snapshots {
        if y.len() != n {
            return Err(Error::Dimension("snapshots differ in length".into()));
        }
        s.ger(Complex64::new(1.0, 0.0), y, &y.conjugate(), Complex64::new(1.0, 0.0));
    }
    s /= Complex64::new(snapshots.len() as f64, 0.0);
    Ok(DataCorrelation { r_yy: hermitize(&s) })
}

/// `K_B^H S_yy^{-1} y`. A singular `S_yy` is an error; no diagonal loading.
pub fn mmse_smi(y: &CVec, k_b: &CMat, s_yy: &DataCorrelation) -> Result<CVec> {
    check_dims(y, k_b)?;
    let x = solve_hpd_vec(s_yy.matrix(), y, "S_yy")?;
    Ok(k_b.adjoint() * x)
}

/// Splits `corr` into its top-`r` eigenpairs and the remainder.
pub fn eigendecompose_signal_subspace(corr: &DataCorrelation, r: usize) -> Result<SubspaceDecomp> {
    let n = corr.matrix().nrows();
    if r == 0 || r > n {
        return Err(Error::Config(format!("signal dimension {r} outside 1..={n}")));
    }
    let (values, vectors) = hermitian_eigen_desc(corr.matrix());
    Ok(SubspaceDecomp {
        u_s: vectors.columns(0, r).into_owned(),
        lambda_s: values[..r].to_vec(),
        u_n: vectors.columns(r, n - r).into_owned(),
        lambda_n: values[r..].to_vec(),
        r,
    })
}

/// `K_B^H U_s Lambda_s^{-1} U_s^H y`.
pub fn mmse_subspace(y: &CVec, k_b: &CMat, decomp: &SubspaceDecomp) -> Result<CVec> {
    check_dims(y, k_b)?;
    if decomp.lambda_s.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::Model("non-positive signal eigenvalue".into()));
    }
    let mut proj = decomp.u_s.adjoint() * y;
    for (z, &l) in proj.iter_mut().zip(&decomp.lambda_s) {
        *z /= l;
    }
    Ok(k_b.adjoint() * (&decomp.u_s * proj))
}

/// `K_E` as Alice reconstructs it from point estimates: `sqrt(P_hat) A(theta_hat)`.
pub fn estimated_spoofing_matrix(know: &EveKnowledge, array: &ArrayConfig) -> CMat {
    SteeringMatrix::from_aoas(&know.aoa_estimates, array).composite(know.power_estimate)
}

fn noise_identity(n: usize, noise_variance: f64) -> CMat {
    CMat::identity(n, n) * Complex64::new(noise_variance, 0.0)
}

/// `R_hat_yy = K_B K_B^H + K_hat_E K_hat_E^H + sigma_v^2 I`.
pub fn naive_lmmse_correlation(
    k_b: &CMat,
    know: &EveKnowledge,
    noise_variance: f64,
    array: &ArrayConfig,
) -> CMat {
    let k_e = estimated_spoofing_matrix(know, array);
    hermitize(&(k_b * k_b.adjoint() + &k_e * k_e.adjoint() + noise_identity(k_b.nrows(), noise_variance)))
}

/// Plug-in LMMSE: `K_B^H R_hat_yy^{-1} y`, ignoring the error statistics.
pub fn lmmse_naive(
    y: &CVec,
    k_b: &CMat,
    know: &EveKnowledge,
    noise_variance: f64,
    array: &ArrayConfig,
) -> Result<CVec> {
    check_dims(y, k_b)?;
    let r = naive_lmmse_correlation(k_b, know, noise_variance, array);
    Ok(k_b.adjoint() * solve_hpd_vec(&r, y, "R_hat_yy")?)
}

/// `K_B K_B^H + P_hat E[e^{-dP}] (1/L_E) sum_l R_aa(theta_hat_l) + sigma_v^2 I`.
pub fn improved_lmmse_correlation(
    k_b: &CMat,
    know: &EveKnowledge,
    noise_variance: f64,
    array: &ArrayConfig,
) -> CMat {
    let n = k_b.nrows();
    let m = &know.model;
    let mut spoof = CMat::zeros(n, n);
    if !know.aoa_estimates.is_empty() && know.power_estimate > 0.0 {
        for &t in &know.aoa_estimates {
            spoof += raa_matrix(t, m.sigma_theta, m.delta_theta_max, array);
        }
        let w = know.power_estimate * trunc_lognormal_mean(m.sigma_power, m.delta_power_max)
            / know.aoa_estimates.len() as f64;
        spoof *= Complex64::new(w, 0.0);
    }
    hermitize(&(k_b * k_b.adjoint() + spoof + noise_identity(n, noise_variance)))
}

/// LMMSE averaged over the AoA and power error distributions.
///
/// The expected steering outer product is a second-order expansion and can
/// be indefinite, so the solve does not assume positive definiteness.
pub fn lmmse_improved(
    y: &CVec,
    k_b: &CMat,
    know: &EveKnowledge,
    noise_variance: f64,
    array: &ArrayConfig,
) -> Result<CVec> {
    check_dims(y, k_b)?;
    let r = improved_lmmse_correlation(k_b, know, noise_variance, array);
    Ok(k_b.adjoint() * solve_hermitian_vec(&r, y, "improved LMMSE correlation")?)
}

/// Frobenius-norm distance helper used in tests and the harness.
pub fn squared_error(estimate: &CVec, truth: &CVec) -> f64 {
    (estimate - truth).norm_squared()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array_channel::{composite_matrix, complex_gaussian};
    use crate::scenario::{EveErrorModel, ScenarioConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn rand_mat(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMat {
        CMat::from_fn(r, c, |_, _| complex_gaussian(rng, 1.0))
    }

    fn rand_vec(rng: &mut ChaCha8Rng, n: usize) -> CVec {
        CVec::from_fn(n, |_, _| complex_gaussian(rng, 1.0))
    }

    fn reference_user1() -> (ScenarioConfig, CMat, CMat) {
        let s = ScenarioConfig::reference();
        let k_b = composite_matrix(&s.bobs[0], &s.array);
        let k_e = composite_matrix(&s.eves[0], &s.array);
        (s, k_b, k_e)
    }

    #[test]
    fn lse_exact_without_noise() {
        let (_, k_b, _) = reference_user1();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = rand_vec(&mut rng, 3);
        let est = lse(&(&k_b * &h), &k_b).unwrap();
        assert!((est - h).norm() < 1e-10);
    }

    #[test]
    fn lse_matches_pseudo_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let k = rand_mat(&mut rng, 8, 3);
            let y = rand_vec(&mut rng, 8);
            let est = lse(&y, &k).unwrap();
            let oracle = crate::linalg::pinv(&k, 1e-12) * &y;
            assert!((est - oracle).norm() < 1e-10);
        }
    }

    #[test]
    fn lse_rejects_duplicate_aoas() {
        let s = ScenarioConfig::reference().with_psi(0.0).unwrap();
        let k_b = composite_matrix(&s.bobs[0], &s.array);
        let y = CVec::zeros(10);
        assert!(matches!(lse(&y, &k_b), Err(Error::NotIdentifiable { .. })));
        let d = DisturbanceModel::from_spoofing(&composite_matrix(&s.eves[0], &s.array), 1.0).unwrap();
        assert!(matches!(mle(&y, &k_b, &d), Err(Error::NotIdentifiable { .. })));
    }

    #[test]
    fn mle_with_white_disturbance_is_lse() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let k = rand_mat(&mut rng, 10, 3);
        let d = DisturbanceModel::from_spoofing(&CMat::zeros(10, 0), 0.7).unwrap();
        for _ in 0..20 {
            let y = rand_vec(&mut rng, 10);
            let a = mle(&y, &k, &d).unwrap();
            let b = lse(&y, &k).unwrap();
            assert!((a - b).iter().all(|z| z.norm() < 1e-10));
        }
    }

    #[test]
    fn mle_cancels_spoofing_at_high_snr() {
        let s = ScenarioConfig::reference().with_snr_b_db(120.0);
        let k_b = composite_matrix(&s.bobs[0], &s.array);
        let k_e = composite_matrix(&s.eves[0], &s.array);
        let d = DisturbanceModel::from_spoofing(&k_e, s.noise_variance).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h_b = rand_vec(&mut rng, 3);
        let h_e = rand_vec(&mut rng, 3);
        let est = mle(&(&k_b * &h_b + &k_e * &h_e), &k_b, &d).unwrap();
        assert!((est - h_b).norm() < 1e-6);
    }

    #[test]
    fn mle_solves_normal_equation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let k_b = rand_mat(&mut rng, 10, 3);
        let k_e = rand_mat(&mut rng, 10, 4);
        let d = DisturbanceModel::from_spoofing(&k_e, 0.3).unwrap();
        let y = rand_vec(&mut rng, 10);
        let est = mle(&y, &k_b, &d).unwrap();
        let rinv = d.matrix().clone().try_inverse().unwrap();
        let lhs = k_b.adjoint() * &rinv * &k_b * est;
        let rhs = k_b.adjoint() * &rinv * &y;
        assert!((lhs - &rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
    }

    #[test]
    fn mmse_forms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let k_b = rand_mat(&mut rng, 10, 3);
            let k_e = rand_mat(&mut rng, 10, 3);
            let d = DisturbanceModel::from_spoofing(&k_e, 0.5).unwrap();
            let y = rand_vec(&mut rng, 10);
            let a = mmse(&y, &k_b, &DataCorrelation::exact(&k_b, &d)).unwrap();
            let b = mmse_disturbance_form(&y, &k_b, &d).unwrap();
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn mmse_zero_gain_and_rank_deficient() {
        let d = DisturbanceModel::from_spoofing(&CMat::zeros(10, 0), 1.0).unwrap();
        let zero = CMat::zeros(10, 3);
        let y = CVec::from_element(10, Complex64::new(1.0, -2.0));
        let est = mmse(&y, &zero, &DataCorrelation::exact(&zero, &d)).unwrap();
        assert!(est.iter().all(|z| z.norm() == 0.0));

        let s = ScenarioConfig::reference().with_psi(0.0).unwrap();
        let k_b = composite_matrix(&s.bobs[0], &s.array);
        let k_e = composite_matrix(&s.eves[0], &s.array);
        let d = DisturbanceModel::from_spoofing(&k_e, 1.0).unwrap();
        let est = mmse(&y, &k_b, &DataCorrelation::exact(&k_b, &d)).unwrap();
        assert!(est.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
    }

    #[test]
    fn sample_correlation_edge_cases() {
        assert!(matches!(estimate_sample_correlation(&[]), Err(Error::EmptyInput(_))));
        let v = CVec::from_fn(4, |i, _| Complex64::new(i as f64, 1.0));
        let s = estimate_sample_correlation(&[v.clone()]).unwrap();
        let sv = crate::linalg::singular_values(s.matrix());
        assert!(sv[1] / sv[0] < 1e-12);
        assert!((s.matrix() - &v * v.adjoint()).norm() < 1e-12);
        let zero = estimate_sample_correlation(&[CVec::zeros(4), CVec::zeros(4)]).unwrap();
        assert!(zero.matrix().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn smi_with_exact_correlation_equals_mmse() {
        let (s, k_b, k_e) = reference_user1();
        let d = DisturbanceModel::from_spoofing(&k_e, s.noise_variance).unwrap();
        let r = DataCorrelation::exact(&k_b, &d);
        let y = rand_vec(&mut ChaCha8Rng::seed_from_u64(7), 10);
        assert_eq!(mmse_smi(&y, &k_b, &r).unwrap(), mmse(&y, &k_b, &r).unwrap());
    }

    #[test]
    fn smi_singular_with_too_few_snapshots() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let snaps: Vec<CVec> = (0..9).map(|_| rand_vec(&mut rng, 10)).collect();
        let s = estimate_sample_correlation(&snaps).unwrap();
        let k_b = rand_mat(&mut rng, 10, 3);
        assert!(matches!(mmse_smi(&snaps[0], &k_b, &s), Err(Error::Singular(_))));
    }

    #[test]
    fn exact_subspace_has_noise_floor_and_matches_mmse() {
        let (s, k_b, k_e) = reference_user1();
        let d = DisturbanceModel::from_spoofing(&k_e, s.noise_variance).unwrap();
        let r = DataCorrelation::exact(&k_b, &d);
        let dec = eigendecompose_signal_subspace(&r, 6).unwrap();
        for &l in &dec.lambda_n {
            assert!((l - s.noise_variance).abs() < 1e-9, "{l}");
        }
        assert!(dec.lambda_s.windows(2).all(|w| w[0] >= w[1]));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let y = rand_vec(&mut rng, 10);
            let a = mmse_subspace(&y, &k_b, &dec).unwrap();
            let b = mmse(&y, &k_b, &r).unwrap();
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn isotropic_decomposition_and_reconstruction() {
        let c = 2.5;
        let r = DataCorrelation::new(CMat::identity(5, 5) * Complex64::new(c, 0.0)).unwrap();
        let dec = eigendecompose_signal_subspace(&r, 2).unwrap();
        assert!(dec.lambda_s.iter().all(|&l| (l - c).abs() < 1e-12));

        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let g = rand_mat(&mut rng, 6, 6);
        let r = DataCorrelation::new(hermitize(&(&g * g.adjoint()))).unwrap();
        let dec = eigendecompose_signal_subspace(&r, 3).unwrap();
        let diag = |v: &[f64]| CMat::from_diagonal(&CVec::from_iterator(v.len(), v.iter().map(|&x| Complex64::new(x, 0.0))));
        let rebuilt = &dec.u_s * diag(&dec.lambda_s) * dec.u_s.adjoint()
            + &dec.u_n * diag(&dec.lambda_n) * dec.u_n.adjoint();
        assert!((rebuilt - r.matrix()).norm() < 1e-9);
        let mut u = CMat::zeros(6, 6);
        u.columns_mut(0, 3).copy_from(&dec.u_s);
        u.columns_mut(3, 3).copy_from(&dec.u_n);
        assert!((u.adjoint() * &u - CMat::identity(6, 6)).norm() < 1e-10);
        assert!(eigendecompose_signal_subspace(&r, 0).is_err());
        assert!(eigendecompose_signal_subspace(&r, 7).is_err());
    }

    #[test]
    fn subspace_annihilates_orthogonal_observation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = rand_mat(&mut rng, 6, 6);
        let r = DataCorrelation::new(hermitize(&(&g * g.adjoint()))).unwrap();
        let dec = eigendecompose_signal_subspace(&r, 2).unwrap();
        let y = dec.u_n.column(1).into_owned();
        let est = mmse_subspace(&y, &rand_mat(&mut rng, 6, 2), &dec).unwrap();
        assert!(est.norm() < 1e-12);
    }

    #[test]
    fn subspace_rejects_zero_eigenvalue() {
        let dec = SubspaceDecomp {
            u_s: CMat::identity(3, 1),
            lambda_s: vec![0.0],
            u_n: CMat::zeros(3, 2),
            lambda_n: vec![0.0, 0.0],
            r: 1,
        };
        assert!(matches!(
            mmse_subspace(&CVec::zeros(3), &CMat::zeros(3, 1), &dec),
            Err(Error::Model(_))
        ));
    }

    #[test]
    fn naive_lmmse_with_exact_knowledge_is_mmse() {
        let (s, k_b, k_e) = reference_user1();
        let know = EveErrorModel::reference().exact_knowledge(&s.eves[0]);
        let d = DisturbanceModel::from_spoofing(&k_e, s.noise_variance).unwrap();
        let y = rand_vec(&mut ChaCha8Rng::seed_from_u64(12), 10);
        let a = lmmse_naive(&y, &k_b, &know, s.noise_variance, &s.array).unwrap();
        let b = mmse(&y, &k_b, &DataCorrelation::exact(&k_b, &d)).unwrap();
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn naive_lmmse_with_zero_power_ignores_eve() {
        let (s, k_b, _) = reference_user1();
        let mut know = EveErrorModel::reference().exact_knowledge(&s.eves[0]);
        know.power_estimate = 0.0;
        let d = DisturbanceModel::from_spoofing(&CMat::zeros(10, 0), s.noise_variance).unwrap();
        let y = rand_vec(&mut ChaCha8Rng::seed_from_u64(13), 10);
        let a = lmmse_naive(&y, &k_b, &know, s.noise_variance, &s.array).unwrap();
        let b = mmse(&y, &k_b, &DataCorrelation::exact(&k_b, &d)).unwrap();
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn improved_converges_to_naive_as_uncertainty_vanishes() {
        let (s, k_b, _) = reference_user1();
        let mut model = EveErrorModel::reference();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let know = model.sample_knowledge(&s.eves[0], &mut rng);
        model.sigma_theta = 1e-7;
        model.delta_theta_max = 3e-7;
        model.sigma_power = 1e-7;
        model.delta_power_max = 2e-7;
        let know = EveKnowledge { model, ..know };
        let y = rand_vec(&mut rng, 10);
        let a = lmmse_improved(&y, &k_b, &know, s.noise_variance, &s.array).unwrap();
        let b = lmmse_naive(&y, &k_b, &know, s.noise_variance, &s.array).unwrap();
        assert!((&a - &b).norm() < 1e-6 * (1.0 + b.norm()), "{}", (a - b).norm());
    }

    #[test]
    fn improved_correlation_hermitian() {
        let (s, k_b, _) = reference_user1();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for i in 0..50 {
            let mut model = EveErrorModel::reference();
            model.delta_theta_max = PI / 25.0 * (0.2 + 0.05 * i as f64);
            model.sigma_theta = model.delta_theta_max / 3.0;
            let know = model.sample_knowledge(&s.eves[0], &mut rng);
            let r = improved_lmmse_correlation(&k_b, &know, s.noise_variance, &s.array);
            assert!(is_hermitian(&r, 1e-10));
        }
    }
}
