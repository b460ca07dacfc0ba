//! Seeded simulation of the equilibrium dynamics and contract sampling.
//!
//! Everything here is a pure function of (configuration, seed): per-particle
//! and per-path noise comes from counter-derived RNG streams, and reductions
//! run in a fixed pairwise order, so outputs are bit-identical across reruns
//! and across thread counts.

use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::continuum::EffortField;
use crate::error::{Error, Result};
use crate::finite::FiniteEffort;
use crate::graphon::{DiscreteInteraction, InteractionFunction};
use crate::numeric::{
    derive_rng, domain, pairwise_sum, rk4_linear_forced, trapezoid_uniform,
};
use crate::population::{InitialLaw, ReservationUtility};

/// Simulation configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Particle count for the interacting system / replication count for
    /// contract sampling.
    pub paths: usize,
    /// Euler–Maruyama steps over the horizon.
    pub steps: usize,
    /// Master seed; all streams derive from it.
    pub seed: u64,
    /// Time horizon; must match the effort field's.
    pub horizon: f64,
    /// Type buckets for empirical-measure summaries.
    pub buckets: usize,
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(Error::InvalidParameter {
                name: "paths",
                reason: "must be at least 1".into(),
            });
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter {
                name: "steps",
                reason: "must be at least 1".into(),
            });
        }
        if self.buckets == 0 {
            return Err(Error::InvalidParameter {
                name: "buckets",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }

    fn check_horizon(&self, field_horizon: f64) -> Result<()> {
        if (field_horizon - self.horizon).abs() > 1e-12 {
            return Err(Error::HorizonMismatch {
                field: field_horizon,
                requested: self.horizon,
            });
        }
        Ok(())
    }
}

/// Per-step, per-type-bucket summaries of the particle empirical measure.
#[derive(Debug, Clone)]
pub struct ParticleSummary {
    pub times: Vec<f64>,
    pub bucket_centers: Vec<f64>,
    pub bucket_counts: Vec<usize>,
    /// `(steps+1) × buckets` bucket means of `X_t`.
    pub means: Array2<f64>,
    /// `(steps+1) × buckets` bucket second moments of `X_t`.
    pub second_moments: Array2<f64>,
}

/// Sample statistics of simulated contracts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractSampleStats {
    pub count: usize,
    pub empirical_mean: f64,
    pub empirical_variance: f64,
    pub standard_error_mean: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

impl ContractSampleStats {
    pub fn from_samples(xs: &[f64]) -> ContractSampleStats {
        let n = xs.len();
        assert!(n >= 2, "need at least two samples");
        let nf = n as f64;
        let mean = pairwise_sum(xs) / nf;
        let c2: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
        let c3: Vec<f64> = xs.iter().map(|x| (x - mean).powi(3)).collect();
        let c4: Vec<f64> = xs.iter().map(|x| (x - mean).powi(4)).collect();
        let variance = pairwise_sum(&c2) / (nf - 1.0);
        let m2 = pairwise_sum(&c2) / nf;
        let m3 = pairwise_sum(&c3) / nf;
        let m4 = pairwise_sum(&c4) / nf;
        let skewness = if m2 > 0.0 { m3 / m2.powf(1.5) } else { 0.0 };
        let excess_kurtosis = if m2 > 0.0 { m4 / (m2 * m2) - 3.0 } else { 0.0 };
        ContractSampleStats {
            count: n,
            empirical_mean: mean,
            empirical_variance: variance,
            standard_error_mean: (variance / nf).sqrt(),
            skewness,
            excess_kurtosis,
        }
    }
}

/// Stratified particle types `(p − 0.5) / P`, ascending.
fn stratified_types(paths: usize) -> Vec<f64> {
    (1..=paths)
        .map(|p| (p as f64 - 0.5) / paths as f64)
        .collect()
}

/// Simulates the interacting particle approximation of the equilibrium
/// dynamics: `P` particles with stratified types, Euler–Maruyama steps
///
/// `X_{t+h} = X_t + h·[Q(t,u_p) + (1/P) Σ_q G(u_p,u_q) X_q] + √h ζ`,
///
/// and per-bucket means and second moments recorded each step.
pub fn simulate_particles(
    g: &InteractionFunction,
    qc: &EffortField,
    law: &InitialLaw,
    cfg: &SimConfig,
) -> Result<ParticleSummary> {
    cfg.validate()?;
    cfg.check_horizon(qc.horizon())?;
    let p = cfg.paths;
    let types = stratified_types(p);
    let h = cfg.horizon / cfg.steps as f64;
    let sqrt_h = h.sqrt();

    // One RNG stream per particle: the p-th particle's draws are identical
    // regardless of scheduling. First draw is the initial output.
    let mut rngs: Vec<_> = (0..p)
        .map(|i| derive_rng(cfg.seed, domain::PARTICLE, i as u64))
        .collect();
    let mut xs: Vec<f64> = types
        .iter()
        .zip(rngs.iter_mut())
        .map(|(&u, rng)| law.sample_initial(u, rng))
        .collect::<Result<_>>()?;

    // Buckets are contiguous runs of the sorted stratified types.
    let buckets = cfg.buckets.min(p);
    let bucket_of = |u: f64| -> usize { ((u * buckets as f64) as usize).min(buckets - 1) };
    let mut bucket_counts = vec![0usize; buckets];
    for &u in &types {
        bucket_counts[bucket_of(u)] += 1;
    }
    let bucket_centers: Vec<f64> = (0..buckets)
        .map(|b| (b as f64 + 0.5) / buckets as f64)
        .collect();

    let mut means = Array2::zeros((cfg.steps + 1, buckets));
    let mut second = Array2::zeros((cfg.steps + 1, buckets));
    let record = |row: usize, xs: &[f64], means: &mut Array2<f64>, second: &mut Array2<f64>| {
        let mut start = 0usize;
        for b in 0..buckets {
            let end = start + bucket_counts[b];
            let slice = &xs[start..end];
            if !slice.is_empty() {
                means[[row, b]] = pairwise_sum(slice) / slice.len() as f64;
                let sq: Vec<f64> = slice.iter().map(|x| x * x).collect();
                second[[row, b]] = pairwise_sum(&sq) / slice.len() as f64;
            }
            start = end;
        }
    };
    record(0, &xs, &mut means, &mut second);

    let efforts_at = |t: f64| -> Result<Vec<f64>> {
        types.iter().map(|&u| qc.effort(t, u)).collect()
    };

    let mut mf = vec![0.0; p];
    for k in 0..cfg.steps {
        let t = h * k as f64;
        let q_now = efforts_at(t)?;
        g.mean_field_term(&types, &xs, &mut mf);
        xs.par_iter_mut()
            .zip(rngs.par_iter_mut())
            .enumerate()
            .for_each(|(i, (x, rng))| {
                let z: f64 = rng.sample(StandardNormal);
                *x += h * (q_now[i] + mf[i]) + sqrt_h * z;
            });
        record(k + 1, &xs, &mut means, &mut second);
    }

    Ok(ParticleSummary {
        times: crate::numeric::linspace(0.0, cfg.horizon, cfg.steps + 1),
        bucket_centers,
        bucket_counts,
        means,
        second_moments: second,
    })
}

/// Deterministic mean field `b̄(t, u) = ∫ G(u, v) E[X_t | U=v] dv` on the
/// simulation time grid: the type-conditional mean solves the forced linear
/// system `dm/dt (t,v) = Q(t,v) + ∫ G(v,w) m(t,w) dw` (receiver first).
fn mean_field_drift(
    g: &InteractionFunction,
    qc: &EffortField,
    law: &InitialLaw,
    u: f64,
    steps: usize,
    horizon: f64,
) -> Result<Vec<f64>> {
    let grid = qc.grid();
    let k = grid.len();
    let mut op = Array2::zeros((k, k));
    for i in 0..k {
        let ui = grid.eval_coords()[i];
        for kk in 0..k {
            op[[i, kk]] = grid.weights()[kk] * g.eval(ui, grid.eval_coords()[kk]);
        }
    }
    let m0: Vec<f64> = grid
        .coords()
        .iter()
        .map(|&v| law.mean_initial(v))
        .collect::<Result<_>>()?;
    let qrow = |t: f64| {
        let row: Vec<f64> = (0..k)
            .map(|i| {
                qc.effort(t, grid.coords()[i])
                    .expect("grid coordinates are in domain")
            })
            .collect();
        ndarray::Array1::from(row)
    };
    let m = rk4_linear_forced(&op, qrow, ndarray::Array1::from(m0).view(), horizon, steps);
    // Contract the type dimension against G(u, ·).
    let gk: Vec<f64> = (0..k)
        .map(|i| grid.weights()[i] * g.eval(u, grid.eval_coords()[i]))
        .collect();
    Ok((0..=steps)
        .map(|j| {
            let terms: Vec<f64> = m.row(j).iter().zip(&gk).map(|(mv, gw)| mv * gw).collect();
            pairwise_sum(&terms)
        })
        .collect())
}

fn contract_paths(
    g: &InteractionFunction,
    qc: &EffortField,
    law: &InitialLaw,
    r: &ReservationUtility,
    u: f64,
    cfg: &SimConfig,
    keep: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    cfg.validate()?;
    cfg.check_horizon(qc.horizon())?;
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::OutOfDomain(u));
    }
    let steps = cfg.steps;
    let h = cfg.horizon / steps as f64;
    let sqrt_h = h.sqrt();
    let drift = mean_field_drift(g, qc, law, u, steps, cfg.horizon)?;
    let q_at: Vec<f64> = (0..=steps)
        .map(|k| qc.effort(h * k as f64, u))
        .collect::<Result<_>>()?;
    let r_u = r.value(u)?;

    // Trapezoid of the deterministic dt-terms ½Q² + Q·b̄ is path-independent.
    let dt_integrand: Vec<f64> = (0..=steps)
        .map(|k| 0.5 * q_at[k] * q_at[k] + q_at[k] * drift[k])
        .collect();
    let dt_term = trapezoid_uniform(&dt_integrand, h);

    let keep = keep.min(cfg.paths);
    let mut xis = vec![0.0f64; cfg.paths];
    let mut kept: Vec<Vec<f64>> = vec![vec![0.0; steps + 1]; keep];
    let kept_slices: Vec<&mut Vec<f64>> = kept.iter_mut().collect();

    // One tagged particle of type u per replication, driven by the
    // deterministic mean field. ∫Q dX is left-point (Itô).
    let run_path = |path: usize, trace: Option<&mut Vec<f64>>| -> Result<f64> {
        let mut rng = derive_rng(cfg.seed, domain::CONTRACT_PATH, path as u64);
        let mut x = law.sample_initial(u, &mut rng)?;
        let mut stoch = 0.0f64;
        if let Some(tr) = &trace {
            debug_assert_eq!(tr.len(), steps + 1);
        }
        let mut trace = trace;
        if let Some(tr) = trace.as_deref_mut() {
            tr[0] = x;
        }
        for k in 0..steps {
            let z: f64 = rng.sample(StandardNormal);
            let dx = h * (q_at[k] + drift[k]) + sqrt_h * z;
            stoch += q_at[k] * dx;
            x += dx;
            if let Some(tr) = trace.as_deref_mut() {
                tr[k + 1] = x;
            }
        }
        Ok(r_u - dt_term + stoch)
    };

    let head: Result<Vec<f64>> = kept_slices
        .into_iter()
        .enumerate()
        .map(|(p, tr)| run_path(p, Some(tr)))
        .collect();
    let head = head?;
    xis[..keep].copy_from_slice(&head);
    let tail: Result<Vec<f64>> = (keep..cfg.paths)
        .into_par_iter()
        .map(|p| run_path(p, None))
        .collect();
    let tail = tail?;
    xis[keep..].copy_from_slice(&tail);
    Ok((xis, kept))
}

/// Samples the optimal contract `ξ*` for a tagged type-`u` agent under the
/// equilibrium dynamics; returns sample statistics over `cfg.paths`
/// replications.
pub fn sample_contracts(
    g: &InteractionFunction,
    qc: &EffortField,
    law: &InitialLaw,
    r: &ReservationUtility,
    u: f64,
    cfg: &SimConfig,
) -> Result<ContractSampleStats> {
    let (xis, _) = contract_paths(g, qc, law, r, u, cfg, 0)?;
    Ok(ContractSampleStats::from_samples(&xis))
}

/// Like [`sample_contracts`] but also returns the first `keep` tagged-particle
/// trajectories (rows = paths, columns = time).
pub fn sample_contracts_with_paths(
    g: &InteractionFunction,
    qc: &EffortField,
    law: &InitialLaw,
    r: &ReservationUtility,
    u: f64,
    cfg: &SimConfig,
    keep: usize,
) -> Result<(ContractSampleStats, Vec<Vec<f64>>)> {
    let (xis, kept) = contract_paths(g, qc, law, r, u, cfg, keep)?;
    Ok((ContractSampleStats::from_samples(&xis), kept))
}

/// Samples agent `i`'s optimal contract in the `n`-agent problem by
/// simulating the full coupled system under the equilibrium effort, with the
/// interaction term `Q^i · (1/N) Σ_j G(i/N, j/N) X^j` in the contract.
pub fn sample_contracts_finite(
    d: &DiscreteInteraction,
    f: &FiniteEffort,
    law: &InitialLaw,
    r: &ReservationUtility,
    agent: usize,
    cfg: &SimConfig,
) -> Result<ContractSampleStats> {
    cfg.validate()?;
    cfg.check_horizon(f.horizon())?;
    let n = d.n;
    if agent == 0 || agent > n {
        return Err(Error::AgentIndex { index: agent, n });
    }
    let i = agent - 1;
    let steps = cfg.steps;
    let h = cfg.horizon / steps as f64;
    let sqrt_h = h.sqrt();
    let nf = n as f64;
    let r_i = r.value(agent as f64 / nf)?;

    // Per-agent efforts at the simulation times.
    let q_table: Vec<Vec<f64>> = (0..=steps)
        .map(|k| {
            let t = h * k as f64;
            (0..n).map(|j| f.effort_at(t, j)).collect()
        })
        .collect();

    let xis: Result<Vec<f64>> = (0..cfg.paths)
        .into_par_iter()
        .map(|path| {
            let mut rng = derive_rng(cfg.seed, domain::CONTRACT_PATH, path as u64);
            let mut xs: Vec<f64> = (1..=n)
                .map(|j| law.sample_initial(j as f64 / nf, &mut rng))
                .collect::<Result<_>>()?;
            let mut stoch = 0.0f64;
            // Trapezoid accumulation of ½(Q^i)² + Q^i·(1/N)ΣG_{i,j}X^j.
            let integrand = |xs: &[f64], k: usize| -> f64 {
                let mut coupling = 0.0;
                for j in 0..n {
                    coupling += d.weights[[i, j]] * xs[j];
                }
                coupling /= nf;
                0.5 * q_table[k][i] * q_table[k][i] + q_table[k][i] * coupling
            };
            let mut dt_term = 0.5 * h * integrand(&xs, 0);
            for k in 0..steps {
                // Shared coupling drift for all agents this step.
                let mut drift = vec![0.0f64; n];
                for a in 0..n {
                    let mut c = 0.0;
                    for j in 0..n {
                        c += d.weights[[a, j]] * xs[j];
                    }
                    drift[a] = c / nf + q_table[k][a];
                }
                let mut dx_i = 0.0;
                for (a, x) in xs.iter_mut().enumerate() {
                    let z: f64 = rng.sample(StandardNormal);
                    let dx = h * drift[a] + sqrt_h * z;
                    if a == i {
                        dx_i = dx;
                    }
                    *x += dx;
                }
                stoch += q_table[k][i] * dx_i;
                let w = if k + 1 == steps { 0.5 } else { 1.0 };
                dt_term += w * h * integrand(&xs, k + 1);
            }
            Ok(r_i - dt_term + stoch)
        })
        .collect();
    Ok(ContractSampleStats::from_samples(&xis?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuum::solve_continuum;
    use crate::graphon::{discretize, Family, InteractionFunction};
    use crate::finite::solve_finite;
    use crate::typefn::TypeFn;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::E;

    fn constant(c: f64) -> InteractionFunction {
        InteractionFunction::new(Family::Constant(c)).unwrap()
    }

    fn cfg(paths: usize, steps: usize, seed: u64) -> SimConfig {
        SimConfig {
            paths,
            steps,
            seed,
            horizon: 1.0,
            buckets: 10,
        }
    }

    #[test]
    fn particle_drift_one_reaches_one() {
        // Zero kernel, Q ≡ 1: X_1 = 1 + W_1, bucket means within 3 SE of 1.
        let g = constant(0.0);
        let qc = solve_continuum(&g, 1.0, 32, 17).unwrap();
        let s = simulate_particles(&g, &qc, &InitialLaw::delta_zero(), &cfg(10_000, 128, 11))
            .unwrap();
        let last = s.times.len() - 1;
        for b in 0..s.bucket_centers.len() {
            let count = s.bucket_counts[b] as f64;
            let mean = s.means[[last, b]];
            let var = s.second_moments[[last, b]] - mean * mean;
            let se = (var / count).sqrt();
            assert!(
                (mean - 1.0).abs() <= 3.0 * se,
                "bucket {b}: mean {mean}, se {se}"
            );
        }
    }

    #[test]
    fn particle_population_mean_matches_mean_ode() {
        // Constant kernel g = 1 with the exponential effort: the population
        // mean follows dm/dt = m + e^{1-t}, m(0) = 0.
        let g = constant(1.0);
        let ghat = InteractionFunction::new(Family::ColumnSeparable(TypeFn::constant(1.0))).unwrap();
        let qc = solve_continuum(&ghat, 1.0, 256, 64).unwrap();
        let c = SimConfig {
            paths: 10_000,
            steps: 512,
            seed: 5,
            horizon: 1.0,
            buckets: 10,
        };
        let s = simulate_particles(&g, &qc, &InitialLaw::delta_zero(), &c).unwrap();
        let last = s.times.len() - 1;
        // Mean-ODE oracle, solved independently by RK4.
        let mat = ndarray::array![[1.0]];
        let oracle = rk4_linear_forced(
            &mat,
            |t| ndarray::array![(1.0 - t).exp()],
            ndarray::array![0.0].view(),
            1.0,
            512,
        )[[512, 0]];
        let mut weighted = 0.0;
        let mut var_acc = 0.0;
        let total: usize = s.bucket_counts.iter().sum();
        for b in 0..s.bucket_centers.len() {
            let w = s.bucket_counts[b] as f64 / total as f64;
            weighted += w * s.means[[last, b]];
            var_acc += w * (s.second_moments[[last, b]] - s.means[[last, b]].powi(2));
        }
        let se = (var_acc / total as f64).sqrt();
        assert!(
            (weighted - oracle).abs() <= 3.0 * se + 0.02,
            "population mean {weighted} vs oracle {oracle} (3se = {})",
            3.0 * se
        );
    }

    #[test]
    fn particles_bitwise_reproducible() {
        let g = InteractionFunction::new(Family::Logistic { theta: 10.0 }).unwrap();
        let qc = solve_continuum(&g, 1.0, 16, 9).unwrap();
        let c = SimConfig {
            paths: 1,
            steps: 1,
            seed: 123,
            horizon: 1.0,
            buckets: 1,
        };
        let a = simulate_particles(&g, &qc, &InitialLaw::delta_zero(), &c).unwrap();
        let b = simulate_particles(&g, &qc, &InitialLaw::delta_zero(), &c).unwrap();
        assert_eq!(a.means, b.means);
        assert_eq!(a.second_moments, b.second_moments);
    }

    #[test]
    fn particle_errors() {
        let g = constant(0.0);
        let qc = solve_continuum(&g, 1.0, 16, 9).unwrap();
        let mut c = cfg(0, 16, 0);
        assert!(simulate_particles(&g, &qc, &InitialLaw::delta_zero(), &c).is_err());
        c.paths = 10;
        c.horizon = 2.0;
        assert!(simulate_particles(&g, &qc, &InitialLaw::delta_zero(), &c).is_err());
    }

    #[test]
    fn contract_samples_standard_law() {
        // Zero kernel: ξ* ~ N(0.5, 1).
        let g = constant(0.0);
        let qc = solve_continuum(&g, 1.0, 64, 17).unwrap();
        let stats = sample_contracts(
            &g,
            &qc,
            &InitialLaw::delta_zero(),
            &ReservationUtility::zero(),
            0.5,
            &cfg(100_000, 256, 17),
        )
        .unwrap();
        assert!(
            (stats.empirical_mean - 0.5).abs() <= 3.0 * stats.standard_error_mean,
            "mean {} se {}",
            stats.empirical_mean,
            stats.standard_error_mean
        );
        assert!((stats.empirical_variance - 1.0).abs() <= 0.05);
        assert!(stats.skewness.abs() <= 0.05);
        assert!(stats.excess_kurtosis.abs() <= 0.1);
    }

    #[test]
    fn contract_samples_exponential_effort_mean() {
        let g = InteractionFunction::new(Family::ColumnSeparable(TypeFn::constant(1.0))).unwrap();
        let qc = solve_continuum(&g, 1.0, 256, 64).unwrap();
        let stats = sample_contracts(
            &g,
            &qc,
            &InitialLaw::delta_zero(),
            &ReservationUtility::zero(),
            0.5,
            &cfg(100_000, 256, 3),
        )
        .unwrap();
        let target = (E * E - 1.0) / 4.0;
        assert!(
            (stats.empirical_mean - target).abs() <= 3.0 * stats.standard_error_mean + 5e-3,
            "mean {} vs {target}",
            stats.empirical_mean
        );
    }

    #[test]
    fn reservation_shift_moves_mean_only() {
        let g = InteractionFunction::new(Family::Logistic { theta: 10.0 }).unwrap();
        let qc = solve_continuum(&g, 1.0, 128, 64).unwrap();
        let law = InitialLaw::delta_zero();
        let c = cfg(20_000, 128, 9);
        let s0 = sample_contracts(&g, &qc, &law, &ReservationUtility::zero(), 0.3, &c).unwrap();
        let shifted = ReservationUtility::new(TypeFn::constant(0.7)).unwrap();
        let s1 = sample_contracts(&g, &qc, &law, &shifted, 0.3, &c).unwrap();
        assert_abs_diff_eq!(s1.empirical_mean - s0.empirical_mean, 0.7, epsilon = 1e-9);
        assert_abs_diff_eq!(s1.empirical_variance, s0.empirical_variance, epsilon = 1e-9);
    }

    #[test]
    fn reservation_binding_in_expectation() {
        // E[ξ* − ½∫Q²dt] = R_a(u).
        let g = InteractionFunction::new(Family::Logistic { theta: 10.0 }).unwrap();
        let qc = solve_continuum(&g, 1.0, 256, 128).unwrap();
        let r = ReservationUtility::new(TypeFn::constant(0.25)).unwrap();
        let u = 0.5;
        let c = cfg(50_000, 256, 21);
        let stats =
            sample_contracts(&g, &qc, &InitialLaw::delta_zero(), &r, u, &c).unwrap();
        let half_int = 0.5 * qc.time_integral_q2(u).unwrap();
        assert!(
            (stats.empirical_mean - half_int - 0.25).abs()
                <= 3.0 * stats.standard_error_mean + 5e-3
        );
    }

    #[test]
    fn finite_contract_sampling_trivial_and_constant() {
        let law = InitialLaw::delta_zero();
        let r = ReservationUtility::zero();

        let d = discretize(&constant(0.0), 4).unwrap();
        let f = solve_finite(&d, 1.0, 128).unwrap();
        let stats = sample_contracts_finite(&d, &f, &law, &r, 2, &cfg(20_000, 128, 4)).unwrap();
        assert!((stats.empirical_mean - 0.5).abs() <= 3.0 * stats.standard_error_mean);
        assert!((stats.empirical_variance - 1.0).abs() <= 0.05);

        let d1 = discretize(&constant(1.0), 4).unwrap();
        let f1 = solve_finite(&d1, 1.0, 256).unwrap();
        let stats =
            sample_contracts_finite(&d1, &f1, &law, &r, 1, &cfg(20_000, 256, 6)).unwrap();
        let target = (E * E - 1.0) / 2.0;
        assert!(
            (stats.empirical_variance - target).abs() <= 0.05 * target,
            "variance {} vs {target}",
            stats.empirical_variance
        );
    }

    #[test]
    fn finite_contract_sampling_seed_contract() {
        let d = discretize(&constant(1.0), 3).unwrap();
        let f = solve_finite(&d, 1.0, 64).unwrap();
        let law = InitialLaw::delta_zero();
        let r = ReservationUtility::zero();
        let a = sample_contracts_finite(&d, &f, &law, &r, 1, &cfg(500, 64, 1)).unwrap();
        let b = sample_contracts_finite(&d, &f, &law, &r, 1, &cfg(500, 64, 1)).unwrap();
        let c = sample_contracts_finite(&d, &f, &law, &r, 1, &cfg(500, 64, 2)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(sample_contracts_finite(&d, &f, &law, &r, 9, &cfg(10, 8, 0)).is_err());
        assert!(sample_contracts_finite(&d, &f, &law, &r, 0, &cfg(10, 8, 0)).is_err());
    }

    #[test]
    fn gaussianity_of_sampled_contracts() {
        let g = InteractionFunction::new(Family::Logistic { theta: 10.0 }).unwrap();
        let qc = solve_continuum(&g, 1.0, 256, 128).unwrap();
        let stats = sample_contracts(
            &g,
            &qc,
            &InitialLaw::delta_zero(),
            &ReservationUtility::zero(),
            0.5,
            &cfg(100_000, 256, 31),
        )
        .unwrap();
        assert!(stats.skewness.abs() <= 0.05, "skewness {}", stats.skewness);
        assert!(
            stats.excess_kurtosis.abs() <= 0.1,
            "excess kurtosis {}",
            stats.excess_kurtosis
        );
    }
}
