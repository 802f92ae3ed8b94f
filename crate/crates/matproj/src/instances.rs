//! Seeded random problem instances for benchmarks and oracle comparisons.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::gaussian::GaussianDensity;

/// Random well-conditioned Gaussian in precision form: `Λ = AᵀA + d·I` with
/// `A` uniform in `[-1, 1]`, potential uniform in `[-2, 2]`.
pub fn random_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> GaussianDensity {
    let a = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    let mut precision = a.transpose() * &a;
    for i in 0..d {
        precision[(i, i)] += d as f64;
    }
    // Symmetrize exactly; the product can be off at the last ulp.
    let sym = (&precision + precision.transpose()) * 0.5;
    let potential = DVector::from_fn(d, |_, _| rng.random_range(-2.0..2.0));
    GaussianDensity::from_precision(sym, potential).expect("constructed SPD precision")
}

/// Random density with a heavier potential, making selections less
/// tie-prone.
pub fn random_density_scaled<R: Rng + ?Sized>(
    d: usize,
    potential_scale: f64,
    rng: &mut R,
) -> GaussianDensity {
    let base = random_density(d, rng);
    let potential = base.potential() * potential_scale;
    GaussianDensity::from_precision(base.precision().clone(), potential)
        .expect("rescaled potential keeps the precision")
}

/// Random density whose log-mass objective is monotone and submodular.
///
/// The closed-form objective has both properties only in a restricted
/// regime: every conditional precision must stay below `2π` (monotonicity)
/// and correlations must not overpower the aligned potentials
/// (submodularity). This generator draws a permuted block-diagonal precision
/// from that regime: blocks of size one or two, block scale in `[0.5, 1]`,
/// in-block correlation in `[0.2, 0.4]` and potentials of matching sign with
/// magnitude in `[1, 1.25]`. Within a two-coordinate block the submodularity
/// excess is then at least
/// `ρ(2u₀u₁ − ρ(u₀² + u₁²))/(2c(1 − ρ²)) + ln(1 − ρ²)/2 > 0.09`,
/// and the objective decomposes additively across blocks.
pub fn monotone_submodular_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> GaussianDensity {
    // Random permutation of coordinates.
    let mut perm: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }

    let mut precision = DMatrix::zeros(d, d);
    let mut potential = DVector::zeros(d);
    let mut pos = 0;
    while pos < d {
        let block = if d - pos >= 2 && rng.random_bool(0.7) { 2 } else { 1 };
        let c = rng.random_range(0.5..1.0);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        if block == 1 {
            let i = perm[pos];
            precision[(i, i)] = c;
            potential[i] = sign * rng.random_range(1.0..1.25);
        } else {
            let (i, j) = (perm[pos], perm[pos + 1]);
            let rho = rng.random_range(0.2..0.4);
            precision[(i, i)] = c;
            precision[(j, j)] = c;
            precision[(i, j)] = c * rho;
            precision[(j, i)] = c * rho;
            potential[i] = sign * rng.random_range(1.0..1.25);
            potential[j] = sign * rng.random_range(1.0..1.25);
        }
        pos += block;
    }
    GaussianDensity::from_precision(precision, potential).expect("block construction is SPD")
}
