//! Type-indexed initial output laws and reservation utilities.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::typefn::TypeFn;

/// Initial output law `λ̂(u, ·)` of the type-`u` agent. Only point masses and
/// Gaussians are supported; both have bounded second moments and Wasserstein-
/// Lipschitz disintegrations whenever `mean`/`std` are block-Lipschitz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InitialLaw {
    /// `λ̂(u, ·) = δ_{m(u)}`.
    PointMass { mean: TypeFn },
    /// `λ̂(u, ·) = N(m(u), s(u)^2)`.
    Gaussian { mean: TypeFn, std: TypeFn },
}

impl InitialLaw {
    pub fn point_mass(mean: TypeFn) -> Result<Self> {
        mean.validate()?;
        Ok(InitialLaw::PointMass { mean })
    }

    pub fn gaussian(mean: TypeFn, std: TypeFn) -> Result<Self> {
        mean.validate()?;
        std.validate()?;
        if std.min() < 0.0 {
            return Err(Error::InvalidParameter {
                name: "population.std",
                reason: "standard deviation must be nonnegative on [0,1]".into(),
            });
        }
        Ok(InitialLaw::Gaussian { mean, std })
    }

    /// The zero point mass `δ_0`.
    pub fn delta_zero() -> Self {
        InitialLaw::PointMass {
            mean: TypeFn::constant(0.0),
        }
    }

    fn check_domain(u: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::OutOfDomain(u));
        }
        Ok(())
    }

    /// `∫ x λ̂(u, dx) = m(u)` for both kinds.
    pub fn mean_initial(&self, u: f64) -> Result<f64> {
        Self::check_domain(u)?;
        Ok(match self {
            InitialLaw::PointMass { mean } | InitialLaw::Gaussian { mean, .. } => mean.eval(u),
        })
    }

    /// One draw from `λ̂(u, ·)`; deterministic given the stream state.
    pub fn sample_initial(&self, u: f64, rng: &mut impl Rng) -> Result<f64> {
        Self::check_domain(u)?;
        Ok(match self {
            InitialLaw::PointMass { mean } => mean.eval(u),
            InitialLaw::Gaussian { mean, std } => {
                let z: f64 = rng.sample(StandardNormal);
                mean.eval(u) + std.eval(u) * z
            }
        })
    }

    /// `∫ x^2 λ̂(u, dx)`; finite and bounded over `u` by construction.
    pub fn second_moment(&self, u: f64) -> Result<f64> {
        Self::check_domain(u)?;
        Ok(match self {
            InitialLaw::PointMass { mean } => mean.eval(u).powi(2),
            InitialLaw::Gaussian { mean, std } => mean.eval(u).powi(2) + std.eval(u).powi(2),
        })
    }
}

/// Reservation utility `R_a : [0,1] -> R`, the participation floor that the
/// optimal contract binds exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReservationUtility(TypeFn);

impl ReservationUtility {
    pub fn new(f: TypeFn) -> Result<Self> {
        f.validate()?;
        Ok(ReservationUtility(f))
    }

    pub fn zero() -> Self {
        ReservationUtility(TypeFn::constant(0.0))
    }

    pub fn value(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::OutOfDomain(u));
        }
        Ok(self.0.eval(u))
    }

    pub fn as_typefn(&self) -> &TypeFn {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{derive_rng, domain, pairwise_sum};
    use approx::assert_abs_diff_eq;

    #[test]
    fn means_of_both_kinds() {
        let pm = InitialLaw::delta_zero();
        assert_eq!(pm.mean_initial(0.3).unwrap(), 0.0);

        let g = InitialLaw::gaussian(TypeFn::affine(0.0, 1.0), TypeFn::constant(1.0)).unwrap();
        assert_abs_diff_eq!(g.mean_initial(0.5).unwrap(), 0.5);

        let pm2 = InitialLaw::point_mass(TypeFn::affine(0.0, 2.0)).unwrap();
        assert_abs_diff_eq!(pm2.mean_initial(1.0).unwrap(), 2.0);

        assert!(pm.mean_initial(1.5).is_err());
        assert!(pm.mean_initial(-0.1).is_err());
    }

    #[test]
    fn degenerate_samples_are_exact() {
        let mut rng = derive_rng(1, domain::INITIAL_OUTPUT, 0);
        let pm = InitialLaw::delta_zero();
        let z = InitialLaw::gaussian(TypeFn::constant(0.0), TypeFn::constant(0.0)).unwrap();
        for _ in 0..100 {
            assert_eq!(pm.sample_initial(0.7, &mut rng).unwrap(), 0.0);
            assert_eq!(z.sample_initial(0.7, &mut rng).unwrap(), 0.0);
        }
    }

    #[test]
    fn gaussian_negative_std_rejected() {
        assert!(InitialLaw::gaussian(TypeFn::constant(0.0), TypeFn::constant(-1.0)).is_err());
        assert!(InitialLaw::gaussian(TypeFn::constant(0.0), TypeFn::affine(0.5, -1.0)).is_err());
    }

    #[test]
    fn sample_moments_match_law() {
        // Law of large numbers: 1e5 standard normal draws.
        let law = InitialLaw::gaussian(TypeFn::constant(0.0), TypeFn::constant(1.0)).unwrap();
        let mut rng = derive_rng(42, domain::INITIAL_OUTPUT, 0);
        let n = 100_000usize;
        let xs: Vec<f64> = (0..n)
            .map(|_| law.sample_initial(0.5, &mut rng).unwrap())
            .collect();
        let mean = pairwise_sum(&xs) / n as f64;
        assert!(
            mean.abs() <= 3.0 / (n as f64).sqrt(),
            "sample mean {mean} outside 3 standard errors"
        );
        let var = pairwise_sum(&xs.iter().map(|x| (x - mean).powi(2)).collect::<Vec<_>>())
            / (n as f64 - 1.0);
        assert!((var - 1.0).abs() < 0.05, "sample variance {var} off by more than 5%");
    }

    #[test]
    fn sampled_mean_agrees_with_mean_initial() {
        let law =
            InitialLaw::gaussian(TypeFn::affine(1.0, -0.5), TypeFn::constant(2.0)).unwrap();
        let u = 0.25;
        let mut rng = derive_rng(9, domain::INITIAL_OUTPUT, 3);
        let n = 100_000usize;
        let xs: Vec<f64> = (0..n)
            .map(|_| law.sample_initial(u, &mut rng).unwrap())
            .collect();
        let mean = pairwise_sum(&xs) / n as f64;
        let se = 2.0 / (n as f64).sqrt();
        let target = law.mean_initial(u).unwrap();
        assert!((mean - target).abs() <= 3.0 * se);
    }

    #[test]
    fn reservation_domain_checks() {
        let r = ReservationUtility::new(TypeFn::affine(0.0, 1.0)).unwrap();
        assert_eq!(r.value(0.5).unwrap(), 0.5);
        assert!(r.value(2.0).is_err());
    }
}
