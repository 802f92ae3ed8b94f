//! Model-level oracle checks: posterior closed forms against covariance-form
//! Bayes, M-step against finite differences and scalar calculus, free energy
//! against a spectral marginal-likelihood oracle, EM monotonicity, and the
//! PCCA-to-PPCA reduction.

use approx::assert_abs_diff_eq;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use matproj::models::{
    pcca_fit, ppca_em, ppca_estep, ppca_free_energy, ppca_mstep, regression_posterior,
    select_groups_regression, EmOptions, NoiseMode, PccaModel, PpcaModel, ProjectedGaussian,
    RegressionModel,
};
use matproj::{
    log_mass_at_zero, restricted_kl, GaussianDensity, GreedyOptions, GroupStructure,
    PartialEnumOptions, SupportSet,
};

fn randn(rng: &mut ChaCha12Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn random_matrix(n: usize, d: usize, rng: &mut ChaCha12Rng) -> DMatrix<f64> {
    DMatrix::from_fn(n, d, |_, _| randn(rng))
}

fn solver_opts() -> PartialEnumOptions {
    PartialEnumOptions { m: 1, compat_budget: false, greedy: GreedyOptions::default() }
}

mod regression {
    use super::*;

    #[test]
    fn zero_design_returns_prior() {
        let d = 4;
        let groups = GroupStructure::uniform_blocks(d, 2).unwrap();
        let model = RegressionModel::new(
            DMatrix::zeros(3, d),
            DVector::zeros(3),
            DMatrix::identity(d, d) * 2.0,
            1.0,
            groups,
            d,
        )
        .unwrap();
        let post = regression_posterior(&model).unwrap();
        for i in 0..d {
            assert_abs_diff_eq!(post.precision()[(i, i)], 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(post.potential()[i], 0.0);
        }
    }

    /// Scalar Bayes rule: Z=[1], y=[2], C=[1], σ²=1 gives Λ=2, r=2, μ=1.
    #[test]
    fn scalar_bayes_rule() {
        let groups = GroupStructure::uniform_blocks(1, 1).unwrap();
        let model = RegressionModel::new(
            DMatrix::from_row_slice(1, 1, &[1.0]),
            DVector::from_row_slice(&[2.0]),
            DMatrix::from_row_slice(1, 1, &[1.0]),
            1.0,
            groups,
            1,
        )
        .unwrap();
        let post = regression_posterior(&model).unwrap();
        assert_abs_diff_eq!(post.precision()[(0, 0)], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(post.potential()[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(post.mean().unwrap()[0], 1.0, epsilon = 1e-12);
    }

    /// Covariance-form oracle: Σ = (C⁻¹ + ZᵀZ/σ²)⁻¹ and μ = ΣZᵀy/σ²
    /// computed the direct way.
    #[test]
    fn matches_covariance_form() {
        let mut rng = ChaCha12Rng::seed_from_u64(20);
        for _ in 0..20 {
            let (n, d) = (rng.random_range(3..=12), rng.random_range(2..=8));
            let z = random_matrix(n, d, &mut rng);
            let y = DVector::from_fn(n, |_, _| randn(&mut rng));
            let a = random_matrix(d, d, &mut rng);
            let c = &a * a.transpose() + DMatrix::identity(d, d) * d as f64;
            let sigma2 = rng.random_range(0.25..2.0);
            let groups = GroupStructure::uniform_blocks(d, 1).unwrap();
            let model =
                RegressionModel::new(z.clone(), y.clone(), c.clone(), sigma2, groups, d).unwrap();
            let post = regression_posterior(&model).unwrap();

            let c_inv = c.clone().try_inverse().unwrap();
            let sigma = (&c_inv + z.transpose() * &z / sigma2).try_inverse().unwrap();
            let mu = &sigma * z.transpose() * &y / sigma2;
            let mu_got = post.mean().unwrap();
            let cov_got = post.covariance().unwrap();
            for i in 0..d {
                assert_abs_diff_eq!(mu_got[i], mu[i], epsilon = 1e-8 * mu[i].abs().max(1.0));
                for j in 0..d {
                    assert_abs_diff_eq!(
                        cov_got[(i, j)],
                        sigma[(i, j)],
                        epsilon = 1e-8 * sigma[(i, j)].abs().max(1.0)
                    );
                }
            }
        }
    }

    /// Planted instance: β supported on groups {1, 3} at high SNR is
    /// recovered exactly.
    #[test]
    fn planted_groups_recovered() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let d = 12;
        let n = 60;
        let groups = GroupStructure::uniform_blocks(d, 3).unwrap(); // 4 groups of 3
        let mut beta = DVector::zeros(d);
        for &g in &[1usize, 3] {
            for &i in groups.members(g).unwrap() {
                beta[i] = 1.0 + rng.random_range(0.0..1.0);
            }
        }
        let z = random_matrix(n, d, &mut rng);
        let signal = (&z * &beta).norm_squared() / n as f64;
        let sigma2 = 1e-4 * signal;
        let noise = DVector::from_fn(n, |_, _| sigma2.sqrt() * randn(&mut rng));
        let y = &z * &beta + noise;
        let model =
            RegressionModel::new(z, y, DMatrix::identity(d, d), sigma2, groups, 6).unwrap();
        let sel = select_groups_regression(&model, &PartialEnumOptions::default()).unwrap();
        assert_eq!(sel.selection.selected, vec![1, 3]);
        assert_eq!(sel.support.as_slice(), &[3, 4, 5, 9, 10, 11]);
        // Projected coefficients approximate the planted ones.
        for i in sel.support.iter() {
            assert_abs_diff_eq!(sel.coef_mean[i], beta[i], epsilon = 0.1);
        }
    }

    #[test]
    fn full_budget_single_group_keeps_everything() {
        let mut rng = ChaCha12Rng::seed_from_u64(22);
        let d = 5;
        let z = random_matrix(8, d, &mut rng);
        let y = DVector::from_fn(8, |_, _| randn(&mut rng));
        let groups = GroupStructure::new(d, vec![(0..d).collect()]).unwrap();
        let model =
            RegressionModel::new(z, y, DMatrix::identity(d, d), 1.0, groups, d).unwrap();
        let sel = select_groups_regression(&model, &PartialEnumOptions::default()).unwrap();
        assert_eq!(sel.support.as_slice(), &[0, 1, 2, 3, 4]);
        let full_mean = sel.posterior.mean().unwrap();
        for i in 0..d {
            assert_abs_diff_eq!(sel.coef_mean[i], full_mean[i], epsilon = 1e-10);
        }
    }
}

mod ppca {
    use super::*;

    fn planted_ppca(
        n: usize,
        d: usize,
        group_size: usize,
        true_groups: &[usize],
        noise: f64,
        rng: &mut ChaCha12Rng,
    ) -> (DMatrix<f64>, GroupStructure, DVector<f64>, DVector<f64>) {
        let groups = GroupStructure::uniform_blocks(d, group_size).unwrap();
        let mut w = DVector::zeros(d);
        for &g in true_groups {
            for &i in groups.members(g).unwrap() {
                w[i] = 1.0 + rng.random_range(0.0..1.0);
            }
        }
        let x = DVector::from_fn(n, |_, _| randn(rng));
        let mut t = &x * w.transpose();
        for v in t.iter_mut() {
            *v += noise * randn(rng);
        }
        (t, groups, w, x)
    }

    /// Diagonal oracle: C = I, σ² = 1, x = e₁, T = e₁aᵀ gives Λ = 2I and
    /// r = a, so selection ranks groups by Σ aᵢ² within the budget.
    #[test]
    fn diagonal_estep_oracle() {
        let n = 3;
        let d = 6;
        let a = DVector::from_row_slice(&[3.0, 2.9, 0.1, 0.2, 1.0, 1.1]);
        let mut t = DMatrix::zeros(n, d);
        t.row_mut(0).copy_from(&a.transpose());
        let mut x = DVector::zeros(n);
        x[0] = 1.0;
        let groups = GroupStructure::uniform_blocks(d, 2).unwrap();
        let model = PpcaModel::new(t, &DMatrix::identity(d, d), groups, 2)
            .unwrap()
            .with_theta(x, 1.0)
            .unwrap();
        let e = ppca_estep(&model, &solver_opts()).unwrap();
        for i in 0..d {
            assert_abs_diff_eq!(e.posterior.precision()[(i, i)], 2.0, epsilon = 1e-12);
            assert_abs_diff_eq!(e.posterior.potential()[i], a[i], epsilon = 1e-12);
        }
        // Budget 2 = one group of 2; the group {0,1} carries the largest
        // aggregate signal.
        assert_eq!(e.selection.selected, vec![0]);
        assert_eq!(e.q.support().as_slice(), &[0, 1]);
    }

    #[test]
    fn estep_with_zero_factor_uses_prior() {
        let mut rng = ChaCha12Rng::seed_from_u64(30);
        let d = 4;
        let t = random_matrix(5, d, &mut rng);
        let groups = GroupStructure::uniform_blocks(d, 2).unwrap();
        let model = PpcaModel::new(t, &(DMatrix::identity(d, d) * 2.0), groups, 2)
            .unwrap()
            .with_theta(DVector::zeros(5), 1.0)
            .unwrap();
        let e = ppca_estep(&model, &solver_opts()).unwrap();
        for i in 0..d {
            assert_abs_diff_eq!(e.posterior.precision()[(i, i)], 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(e.posterior.potential()[i], 0.0);
        }
    }

    /// Noiseless fixed point: T = x μᵀ exactly and Σ_q = 0-ish gives back x
    /// and a floored σ².
    #[test]
    fn mstep_noiseless_fixed_point() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        let n = 6;
        let d = 4;
        let x_true = DVector::from_fn(n, |_, _| randn(&mut rng));
        let mu = DVector::from_row_slice(&[1.0, -2.0, 0.5, 3.0]);
        let t = &x_true * mu.transpose();
        let groups = GroupStructure::uniform_blocks(d, 1).unwrap();
        let model = PpcaModel::new(t.clone(), &DMatrix::identity(d, d), groups, d).unwrap();

        // Sharp posterior around mu on the full support.
        let sharp = GaussianDensity::from_precision(
            DMatrix::identity(d, d) * 1e12,
            mu * 1e12,
        )
        .unwrap();
        let q = ProjectedGaussian::project(&sharp, &SupportSet::full(d)).unwrap();
        let up = ppca_mstep(&model, &q).unwrap();
        for i in 0..n {
            assert_abs_diff_eq!(up.x[i], x_true[i], epsilon = 1e-6);
        }
        assert!(up.sigma2 < 1e-6);
        assert!(up.sigma2 >= 1e-12);
    }

    /// Scalar calculus oracle (n = d = 1): maximizing
    /// −½ln(2πσ²) − (t² − 2xtμ + x²(μ² + s²))/(2σ²) gives
    /// x = tμ/(μ² + s²) and σ² = t² − 2xtμ + x²(μ² + s²).
    #[test]
    fn mstep_scalar_case() {
        let t = 2.0;
        let mu = 1.5;
        let s2 = 0.25;
        let data = DMatrix::from_row_slice(1, 1, &[t]);
        let groups = GroupStructure::uniform_blocks(1, 1).unwrap();
        let model = PpcaModel::new(data, &DMatrix::identity(1, 1), groups, 1).unwrap();
        let q_density = GaussianDensity::from_precision(
            DMatrix::from_row_slice(1, 1, &[1.0 / s2]),
            DVector::from_row_slice(&[mu / s2]),
        )
        .unwrap();
        let q = ProjectedGaussian::project(&q_density, &SupportSet::full(1)).unwrap();
        let up = ppca_mstep(&model, &q).unwrap();
        let x_expected = t * mu / (mu * mu + s2);
        let s_expected = t * t - 2.0 * x_expected * t * mu + x_expected * x_expected * (mu * mu + s2);
        assert_abs_diff_eq!(up.x[0], x_expected, epsilon = 1e-12);
        assert_abs_diff_eq!(up.sigma2, s_expected, epsilon = 1e-12);
    }

    /// Finite-difference gradient of the expected complete log-likelihood at
    /// the M-step output is zero to 1e-5 in max-norm. Instances carry a
    /// genuine noise floor so the σ² coordinate is well-scaled for central
    /// differences (the analytic gradient is zero by construction; what this
    /// guards is the closed-form update itself).
    #[test]
    fn mstep_gradient_check() {
        let mut rng = ChaCha12Rng::seed_from_u64(32);
        for _ in 0..20 {
            let n = rng.random_range(4..=6);
            let d = rng.random_range(4..=6);
            let noise = rng.random_range(0.4..0.8);
            let x_true = DVector::from_fn(n, |_, _| randn(&mut rng));
            let w_true = DVector::from_fn(d, |_, _| randn(&mut rng));
            let mut t = &x_true * w_true.transpose();
            for v in t.iter_mut() {
                *v += noise * randn(&mut rng);
            }
            let groups = GroupStructure::uniform_blocks(d, 1).unwrap();
            let model = PpcaModel::new(t.clone(), &DMatrix::identity(d, d), groups, d).unwrap();
            let e = ppca_estep(&model, &solver_opts()).unwrap();
            let up = ppca_mstep(&model, &e.q).unwrap();

            let mu = e.q.mean_embedded().clone();
            let s2m: f64 = mu.norm_squared() + e.q.cov_on_support().trace();
            let ell = |x: &DVector<f64>, sigma2: f64| -> f64 {
                let resid = t.norm_squared() - 2.0 * x.dot(&(&t * &mu))
                    + x.norm_squared() * s2m;
                -0.5 * (n * d) as f64 * (2.0 * std::f64::consts::PI * sigma2).ln()
                    - 0.5 * resid / sigma2
            };

            let h = 1e-5;
            let mut worst: f64 = 0.0;
            for i in 0..n {
                let mut xp = up.x.clone();
                let mut xm = up.x.clone();
                xp[i] += h;
                xm[i] -= h;
                let g = (ell(&xp, up.sigma2) - ell(&xm, up.sigma2)) / (2.0 * h);
                worst = worst.max(g.abs());
            }
            let gs = (ell(&up.x, up.sigma2 + h) - ell(&up.x, up.sigma2 - h)) / (2.0 * h);
            worst = worst.max(gs.abs());
            assert!(worst <= 1e-5, "gradient max-norm {worst} at M-step output");
        }
    }

    /// Planted sparse factor at high SNR: EM recovers the support.
    #[test]
    fn planted_factor_recovered() {
        let mut rng = ChaCha12Rng::seed_from_u64(33);
        let (t, groups, w, _) = planted_ppca(40, 12, 2, &[1, 4], 0.01, &mut rng);
        let model = PpcaModel::new(t, &DMatrix::identity(12, 12), groups, 4).unwrap();
        let fit = ppca_em(&model, &EmOptions { solver: solver_opts(), ..Default::default() })
            .unwrap();
        let expected: Vec<usize> = (0..12).filter(|&i| w[i] != 0.0).collect();
        assert_eq!(fit.support.as_slice(), expected.as_slice());
    }

    #[test]
    fn zero_iterations_returns_init() {
        let mut rng = ChaCha12Rng::seed_from_u64(34);
        let t = random_matrix(6, 4, &mut rng);
        let groups = GroupStructure::uniform_blocks(4, 2).unwrap();
        let model = PpcaModel::new(t, &DMatrix::identity(4, 4), groups, 4).unwrap();
        let init = model.theta().clone();
        let fit = ppca_em(
            &model,
            &EmOptions { max_iters: 0, solver: solver_opts(), ..Default::default() },
        )
        .unwrap();
        assert_eq!(fit.x, init.x);
        assert_eq!(fit.sigma2, init.sigma2[0]);
        assert!(fit.free_energy.is_empty());
        assert!(fit.support.is_empty());
    }

    /// Free energy is nondecreasing per half-step across seeds.
    #[test]
    fn em_free_energy_monotone() {
        let mut rng = ChaCha12Rng::seed_from_u64(35);
        for seed in 0..25 {
            let n = rng.random_range(5..=10);
            let d = rng.random_range(4..=8);
            let noise = rng.random_range(0.05..0.8);
            let size = if d % 2 == 0 { 2 } else { 1 };
            let true_groups = [0usize];
            let (t, groups, _, _) = planted_ppca(n, d, size, &true_groups, noise, &mut rng);
            let budget = rng.random_range(size..=d);
            let model = PpcaModel::new(t, &DMatrix::identity(d, d), groups, budget).unwrap();
            let fit = ppca_em(
                &model,
                &EmOptions { max_iters: 15, solver: solver_opts(), ..Default::default() },
            )
            .unwrap();
            for w in fit.free_energy.windows(2) {
                assert!(
                    w[1] >= w[0] - 1e-9,
                    "seed {seed}: free energy decreased {} -> {}",
                    w[0],
                    w[1]
                );
            }
        }
    }

    /// Rank-1 noiseless data: the recovered factor explains all variance.
    #[test]
    fn rank_one_noiseless_variance_ratio() {
        let mut rng = ChaCha12Rng::seed_from_u64(36);
        let n = 8;
        let d = 5;
        let x = DVector::from_fn(n, |_, _| randn(&mut rng));
        let w = DVector::from_fn(d, |_, _| 1.0 + rng.random_range(0.0..1.0));
        let t = &x * w.transpose();
        let groups = GroupStructure::new(d, vec![(0..d).collect()]).unwrap();
        let model = PpcaModel::new(t.clone(), &DMatrix::identity(d, d), groups, d).unwrap();
        let fit = ppca_em(&model, &EmOptions { solver: solver_opts(), ..Default::default() })
            .unwrap();
        let v = fit.factor_mean.normalize();
        let explained = (t.transpose() * &t * &v).dot(&v);
        let total: f64 = t.transpose().norm_squared();
        assert_abs_diff_eq!(explained / total, 1.0, epsilon = 1e-6);
    }

    /// Among random Gaussians on the selected support, the projected
    /// posterior attains the minimal restricted KL to the posterior.
    #[test]
    fn estep_projection_is_optimal_at_fixed_support() {
        let mut rng = ChaCha12Rng::seed_from_u64(37);
        let (t, groups, _, _) = planted_ppca(10, 6, 2, &[0, 2], 0.3, &mut rng);
        let model = PpcaModel::new(t, &DMatrix::identity(6, 6), groups, 4).unwrap();
        let e = ppca_estep(&model, &solver_opts()).unwrap();
        let s = e.q.support();
        let q_star = e.q.density().unwrap();
        let kl_star = restricted_kl(q_star, &e.posterior, s).unwrap();
        for _ in 0..100 {
            let k = s.len();
            let jiggle = DMatrix::from_fn(k, k, |_, _| rng.random_range(-0.3..0.3));
            let prec = q_star.precision() + &jiggle * jiggle.transpose();
            let prec = (&prec + prec.transpose()) * 0.5;
            let pot = q_star.potential()
                + DVector::from_fn(k, |_, _| rng.random_range(-0.5..0.5));
            let q = GaussianDensity::from_precision(prec, pot).unwrap();
            let kl = restricted_kl(&q, &e.posterior, s).unwrap();
            assert!(kl_star <= kl + 1e-9);
        }
    }
}

mod free_energy {
    use super::*;

    /// Spectral oracle for log p(T; θ): the marginal covariance of vec(T) is
    /// (xxᵀ) ⊗ C + σ²I, whose eigenvalues are σ² + ‖x‖²λ_j(C) on the x
    /// direction and σ² elsewhere.
    fn log_marginal_oracle(
        t: &DMatrix<f64>,
        c: &DMatrix<f64>,
        x: &DVector<f64>,
        sigma2: f64,
    ) -> f64 {
        let n = t.nrows();
        let d = t.ncols();
        let eig = c.clone().symmetric_eigen();
        let x_sq = x.norm_squared();
        let ln_2pi = (2.0 * std::f64::consts::PI).ln();

        let mut log_det = ((n - 1) * d) as f64 * sigma2.ln();
        for j in 0..d {
            log_det += (sigma2 + x_sq * eig.eigenvalues[j]).ln();
        }

        let mut quad = t.norm_squared() / sigma2;
        if x_sq > 0.0 {
            let xhat = x / x_sq.sqrt();
            let t_on_x = t.transpose() * xhat;
            quad -= t_on_x.norm_squared() / sigma2;
            for j in 0..d {
                let coeff = eig.eigenvectors.column(j).dot(&t_on_x);
                quad += coeff * coeff / (sigma2 + x_sq * eig.eigenvalues[j]);
            }
        }
        -0.5 * ((n * d) as f64 * ln_2pi + log_det + quad)
    }

    #[test]
    fn exact_posterior_attains_log_marginal() {
        let mut rng = ChaCha12Rng::seed_from_u64(40);
        for _ in 0..15 {
            let n = rng.random_range(2..=5);
            let d = rng.random_range(2..=5);
            let t = random_matrix(n, d, &mut rng);
            let a = random_matrix(d, d, &mut rng);
            let c = &a * a.transpose() + DMatrix::identity(d, d) * d as f64;
            let x = DVector::from_fn(n, |_, _| randn(&mut rng));
            let sigma2 = rng.random_range(0.3..1.5);
            let groups = GroupStructure::uniform_blocks(d, 1).unwrap();
            let model = PpcaModel::new(t.clone(), &c, groups, d)
                .unwrap()
                .with_theta(x.clone(), sigma2)
                .unwrap();
            let e = ppca_estep(&model, &solver_opts()).unwrap();
            // q = exact posterior (full support projection of the posterior).
            let q = ProjectedGaussian::project(&e.posterior, &SupportSet::full(d)).unwrap();
            let f = ppca_free_energy(&model, &q, &x, sigma2).unwrap();
            let oracle = log_marginal_oracle(&t, &c, &x, sigma2);
            assert_abs_diff_eq!(f, oracle, epsilon = 1e-8 * oracle.abs().max(1.0));
        }
    }

    #[test]
    fn free_energy_bounded_by_log_marginal() {
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        for _ in 0..15 {
            let n = rng.random_range(2..=5);
            let d = rng.random_range(2..=6);
            let t = random_matrix(n, d, &mut rng);
            let c = DMatrix::identity(d, d);
            let x = DVector::from_fn(n, |_, _| randn(&mut rng));
            let sigma2 = rng.random_range(0.3..1.5);
            let groups = GroupStructure::uniform_blocks(d, 1).unwrap();
            let budget = rng.random_range(1..=d);
            let model = PpcaModel::new(t.clone(), &c, groups, budget)
                .unwrap()
                .with_theta(x.clone(), sigma2)
                .unwrap();
            let e = ppca_estep(&model, &solver_opts()).unwrap();
            let f = ppca_free_energy(&model, &e.q, &x, sigma2).unwrap();
            let oracle = log_marginal_oracle(&t, &c, &x, sigma2);
            assert!(f <= oracle + 1e-9, "F = {f} exceeds log-marginal {oracle}");
        }
    }

    /// Cross-module identity: the free-energy gap between the full posterior
    /// and the projected posterior equals −J(S) on the posterior.
    #[test]
    fn gap_equals_negative_log_mass() {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        for _ in 0..15 {
            let n = rng.random_range(3..=6);
            let d = rng.random_range(3..=6);
            let t = random_matrix(n, d, &mut rng);
            let c = DMatrix::identity(d, d);
            let x = DVector::from_fn(n, |_, _| randn(&mut rng));
            let sigma2 = rng.random_range(0.3..1.5);
            let groups = GroupStructure::uniform_blocks(d, 1).unwrap();
            let budget = rng.random_range(1..=d);
            let model = PpcaModel::new(t.clone(), &c, groups, budget)
                .unwrap()
                .with_theta(x.clone(), sigma2)
                .unwrap();
            let e = ppca_estep(&model, &solver_opts()).unwrap();
            let q_full = ProjectedGaussian::project(&e.posterior, &SupportSet::full(d)).unwrap();
            let f_full = ppca_free_energy(&model, &q_full, &x, sigma2).unwrap();
            let f_proj = ppca_free_energy(&model, &e.q, &x, sigma2).unwrap();
            let j_s = log_mass_at_zero(&e.posterior, e.q.support()).unwrap();
            assert_abs_diff_eq!(f_full - f_proj, -j_s, epsilon = 1e-8 * j_s.abs().max(1.0));
        }
    }
}

mod pcca {
    use super::*;

    /// Single view with singleton groups and fast solver mode reduces to
    /// PPCA with a uniform budget, trace-for-trace.
    #[test]
    fn single_view_reduces_to_ppca() {
        let mut rng = ChaCha12Rng::seed_from_u64(50);
        let n = 10;
        let d = 7;
        let t = random_matrix(n, d, &mut rng);
        let k = 3;

        let groups = GroupStructure::uniform_blocks(d, 1).unwrap();
        let ppca = PpcaModel::new(t.clone(), &DMatrix::identity(d, d), groups, k).unwrap();
        let em_opts = EmOptions { max_iters: 12, solver: solver_opts(), ..Default::default() };
        let fit_p = ppca_em(&ppca, &em_opts).unwrap();

        let pcca = PccaModel::new(vec![t], vec![DMatrix::identity(d, d)], vec![k]).unwrap();
        let fit_c = pcca_fit(&pcca, &em_opts).unwrap();

        assert_eq!(fit_p.free_energy, fit_c.free_energy);
        assert_eq!(fit_p.x, fit_c.x);
        assert_eq!(fit_p.sigma2, fit_c.sigma2[0]);
        assert_eq!(fit_p.support.as_slice(), fit_c.support.as_slice());
        let (tp, tc) = (fit_p.selection.unwrap(), fit_c.selection.unwrap());
        assert_eq!(tp.trace, tc.trace);
    }

    /// Two views generated from a shared factor with sparse per-view
    /// loadings: both supports recovered within the caps.
    #[test]
    fn two_view_planted_supports() {
        let mut rng = ChaCha12Rng::seed_from_u64(51);
        let n = 40;
        let (d1, d2) = (8, 6);
        let x = DVector::from_fn(n, |_, _| randn(&mut rng));
        let mut w1 = DVector::zeros(d1);
        let mut w2 = DVector::zeros(d2);
        for i in [1usize, 4] {
            w1[i] = 1.5 + rng.random_range(0.0..0.5);
        }
        for i in [0usize, 5] {
            w2[i] = 1.5 + rng.random_range(0.0..0.5);
        }
        let noise = 0.02;
        let mut t1 = &x * w1.transpose();
        let mut t2 = &x * w2.transpose();
        for v in t1.iter_mut() {
            *v += noise * randn(&mut rng);
        }
        for v in t2.iter_mut() {
            *v += noise * randn(&mut rng);
        }
        let model = PccaModel::new(
            vec![t1, t2],
            vec![DMatrix::identity(d1, d1), DMatrix::identity(d2, d2)],
            vec![2, 2],
        )
        .unwrap();
        let fit = pcca_fit(
            &model,
            &EmOptions { max_iters: 20, solver: solver_opts(), ..Default::default() },
        )
        .unwrap();
        assert_eq!(fit.view_supports[0], vec![1, 4]);
        assert_eq!(fit.view_supports[1], vec![0, 5]);
    }

    /// A zero cap on view 1 forces all selections into view 2.
    #[test]
    fn zero_cap_blocks_view() {
        let mut rng = ChaCha12Rng::seed_from_u64(52);
        let n = 12;
        let (d1, d2) = (4, 5);
        let t1 = random_matrix(n, d1, &mut rng);
        let t2 = random_matrix(n, d2, &mut rng);
        let model = PccaModel::new(
            vec![t1, t2],
            vec![DMatrix::identity(d1, d1), DMatrix::identity(d2, d2)],
            vec![0, 3],
        )
        .unwrap();
        let fit = pcca_fit(
            &model,
            &EmOptions { max_iters: 8, solver: solver_opts(), ..Default::default() },
        )
        .unwrap();
        assert!(fit.view_supports[0].is_empty());
        assert!(!fit.view_supports[1].is_empty());
        assert!(fit.view_supports[1].len() <= 3);
    }

    #[test]
    fn pcca_free_energy_monotone() {
        let mut rng = ChaCha12Rng::seed_from_u64(53);
        for seed in 0..25 {
            let n = rng.random_range(6..=10);
            let (d1, d2) = (rng.random_range(3..=5), rng.random_range(3..=5));
            let x = DVector::from_fn(n, |_, _| randn(&mut rng));
            let w1 = DVector::from_fn(d1, |i, _| if i == 0 { 2.0 } else { 0.0 });
            let w2 = DVector::from_fn(d2, |i, _| if i == 1 { 2.0 } else { 0.0 });
            let noise = rng.random_range(0.05..0.5);
            let mut t1 = &x * w1.transpose();
            let mut t2 = &x * w2.transpose();
            for v in t1.iter_mut() {
                *v += noise * randn(&mut rng);
            }
            for v in t2.iter_mut() {
                *v += noise * randn(&mut rng);
            }
            for mode in [NoiseMode::Shared, NoiseMode::PerView] {
                let model = PccaModel::new(
                    vec![t1.clone(), t2.clone()],
                    vec![DMatrix::identity(d1, d1), DMatrix::identity(d2, d2)],
                    vec![1, 2],
                )
                .unwrap()
                .with_noise_mode(mode);
                let fit = pcca_fit(
                    &model,
                    &EmOptions { max_iters: 10, solver: solver_opts(), ..Default::default() },
                )
                .unwrap();
                for w in fit.free_energy.windows(2) {
                    assert!(
                        w[1] >= w[0] - 1e-9,
                        "seed {seed} ({mode:?}): free energy decreased {} -> {}",
                        w[0],
                        w[1]
                    );
                }
            }
        }
    }
}
