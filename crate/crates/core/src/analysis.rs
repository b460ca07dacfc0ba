//! Quantitative verification of the model's limit theorems: convergence
//! rates of the `N`-agent problem to the continuum, stability of efforts and
//! contract laws under kernel perturbations, and the influence-ordering
//! property of optimal efforts.

use crate::continuum::{contract_law, solve_on_grid, ContractLaw, EffortField};
use crate::error::{Error, Result};
use crate::finite::{draw_initial_outputs, solve_finite};
use crate::graphon::{discretize, sup_distance, InteractionFunction};
use crate::grid::TypeGrid;
use crate::numeric::{log_log_slope, pairwise_sum, trapezoid_uniform};
use crate::population::{InitialLaw, ReservationUtility};

/// Measured errors across problem sizes with a fitted log-log slope and the
/// per-size constant estimates `N^rate · error`.
#[derive(Debug, Clone)]
pub struct RateReport {
    pub sizes: Vec<usize>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log error` vs `log N`; `None` when fewer than
    /// three strictly positive errors exist (e.g. the zero kernel).
    pub fitted_slope: Option<f64>,
    /// `N^rate_exponent · error` per size.
    pub constant_estimates: Vec<f64>,
    /// The claimed rate: 1.0 for `O(1/N)`, 0.5 for `O(1/√N)`.
    pub rate_exponent: f64,
    /// Estimated discretization error of the continuum reference, for
    /// checking it sits well below the measured errors.
    pub reference_resolution_error: Option<f64>,
}

impl RateReport {
    fn new(
        sizes: Vec<usize>,
        errors: Vec<f64>,
        rate_exponent: f64,
        reference_resolution_error: Option<f64>,
    ) -> Result<Self> {
        if !sizes.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter {
                name: "sizes",
                reason: "must be strictly increasing".into(),
            });
        }
        if errors.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite("rate report errors"));
        }
        let xs: Vec<f64> = sizes.iter().map(|n| *n as f64).collect();
        let fitted_slope = log_log_slope(&xs, &errors);
        let constant_estimates = sizes
            .iter()
            .zip(&errors)
            .map(|(n, e)| (*n as f64).powf(rate_exponent) * e)
            .collect();
        Ok(RateReport {
            sizes,
            errors,
            fitted_slope,
            constant_estimates,
            rate_exponent,
            reference_resolution_error,
        })
    }

    /// Max/min ratio of the constant estimates over the upper half of the
    /// size range; `None` when any of them vanishes.
    pub fn upper_half_constant_spread(&self) -> Option<f64> {
        let half = &self.constant_estimates[self.constant_estimates.len() / 2..];
        let max = half.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = half.iter().cloned().fold(f64::INFINITY, f64::min);
        if min <= 0.0 {
            return None;
        }
        Some(max / min)
    }
}

/// Closed-form Wasserstein-2 distance between one-dimensional Gaussians:
/// `sqrt((Δmean)² + (Δσ)²)`.
pub fn gaussian_w2(a: &ContractLaw, b: &ContractLaw) -> Result<f64> {
    if a.variance < 0.0 {
        return Err(Error::NegativeVariance(a.variance));
    }
    if b.variance < 0.0 {
        return Err(Error::NegativeVariance(b.variance));
    }
    let dm = a.mean - b.mean;
    let ds = a.variance.sqrt() - b.variance.sqrt();
    Ok((dm * dm + ds * ds).sqrt())
}

/// Grid parameters for the convergence studies.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceParams {
    /// RK4 steps shared by the finite solves and the continuum reference.
    pub time_steps: usize,
    /// The reference grid has `factor · max(sizes)` uniform intervals
    /// (split at block boundaries), so `i/N` lands on nodes whenever `N`
    /// divides `factor · max(sizes)`.
    pub reference_factor: usize,
}

impl Default for ConvergenceParams {
    fn default() -> Self {
        ConvergenceParams {
            time_steps: 256,
            reference_factor: 4,
        }
    }
}

fn continuum_reference(
    g: &InteractionFunction,
    horizon: f64,
    params: &ConvergenceParams,
    max_size: usize,
) -> Result<(EffortField, f64)> {
    if params.reference_factor < 4 {
        return Err(Error::InvalidParameter {
            name: "reference_factor",
            reason: "reference resolution must be at least 4x the largest size".into(),
        });
    }
    let intervals = params.reference_factor * max_size;
    let grid = TypeGrid::uniform_with_breaks(g.partition(), intervals);
    let reference = solve_on_grid(g, horizon, params.time_steps, grid)?;
    // Richardson-style sanity check at half the resolution.
    let coarse_grid = TypeGrid::uniform_with_breaks(g.partition(), intervals / 2);
    let coarse = solve_on_grid(g, horizon, params.time_steps, coarse_grid)?;
    let mut res_err = 0.0f64;
    for (i, &u) in coarse.grid().coords().iter().enumerate() {
        let rn = reference.grid().nearest(u);
        for j in 0..coarse.times().len() {
            res_err = res_err.max((coarse.values()[[j, i]] - reference.values()[[j, rn]]).abs());
        }
    }
    Ok((reference, res_err))
}

/// Theorem-rate check for the equilibrium efforts: for each `N`,
/// `error_N = max_i sup_t |Q(t, i/N) − Q^{i,N}(t)|` against a continuum
/// reference at ≥4x resolution, with a fitted `O(1/N)` slope.
pub fn effort_convergence(
    g: &InteractionFunction,
    horizon: f64,
    sizes: &[usize],
    params: &ConvergenceParams,
) -> Result<RateReport> {
    if sizes.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "sizes",
            reason: "need at least two sizes".into(),
        });
    }
    let max_size = *sizes.iter().max().unwrap();
    let (reference, res_err) = continuum_reference(g, horizon, params, max_size)?;
    let mut errors = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let d = discretize(g, n)?;
        let f = solve_finite(&d, horizon, params.time_steps)?;
        let mut worst = 0.0f64;
        for i in 0..n {
            let u = (i + 1) as f64 / n as f64;
            let node = reference.grid().nearest(u);
            for j in 0..f.times().len() {
                worst = worst.max((f.values()[[j, i]] - reference.values()[[j, node]]).abs());
            }
        }
        errors.push(worst);
    }
    RateReport::new(sizes.to_vec(), errors, 1.0, Some(res_err))
}

/// Output of [`value_convergence`]: the mean-square value error rate and the
/// per-size max contract-law Wasserstein distances with their `O(1/√N)`
/// report.
#[derive(Debug, Clone)]
pub struct ValueConvergence {
    pub value_mse: RateReport,
    pub contract_w2: RateReport,
}

/// Theorem-rate check for the principal's value and the contract laws:
/// `E[(V^P_N − V^P)²]` estimated over independent initial draws, and
/// `max_i W2(continuum law at i/N, finite law of agent i)`.
#[allow(clippy::too_many_arguments)]
pub fn value_convergence(
    g: &InteractionFunction,
    law: &InitialLaw,
    r: &ReservationUtility,
    horizon: f64,
    sizes: &[usize],
    replications: usize,
    seed: u64,
    params: &ConvergenceParams,
) -> Result<ValueConvergence> {
    if sizes.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "sizes",
            reason: "need at least two sizes".into(),
        });
    }
    if replications < 30 {
        return Err(Error::InvalidParameter {
            name: "replications",
            reason: "need at least 30 replications for the outer expectation".into(),
        });
    }
    let max_size = *sizes.iter().max().unwrap();
    let (reference, res_err) = continuum_reference(g, horizon, params, max_size)?;
    let vp = crate::continuum::principal_value(&reference, law, r)?;
    let h = horizon / params.time_steps as f64;

    let mut mses = Vec::with_capacity(sizes.len());
    let mut w2_max = Vec::with_capacity(sizes.len());
    for (si, &n) in sizes.iter().enumerate() {
        let d = discretize(g, n)?;
        let f = solve_finite(&d, horizon, params.time_steps)?;
        let nf = n as f64;
        let q0: Vec<f64> = f.values().row(0).to_vec();
        let int_q2: Vec<f64> = (0..n).map(|i| f.time_integral_q2(i)).collect();
        let r_vals: Result<Vec<f64>> = (1..=n).map(|i| r.value(i as f64 / nf)).collect();
        let base = 0.5 * pairwise_sum(&int_q2) / nf - pairwise_sum(&r_vals?) / nf;

        let sq_errs: Result<Vec<f64>> = (0..replications)
            .map(|rep| {
                let rep_seed = crate::numeric::derive_rng(
                    seed,
                    crate::numeric::domain::REPLICATION,
                    (si * replications + rep) as u64,
                );
                // Use the derived stream's first word as the per-replication
                // draw seed so agent draws stay index-stable.
                use rand::RngCore;
                let mut rs = rep_seed;
                let x0 = draw_initial_outputs(law, n, rs.next_u64())?;
                let terms: Vec<f64> = q0.iter().zip(&x0).map(|(q, x)| q * x).collect();
                let vn = pairwise_sum(&terms) / nf + base;
                Ok((vn - vp) * (vn - vp))
            })
            .collect();
        let sq_errs = sq_errs?;
        mses.push(pairwise_sum(&sq_errs) / replications as f64);

        let mut worst = 0.0f64;
        for i in 0..n {
            let u = (i + 1) as f64 / nf;
            let node = reference.grid().nearest(u);
            let col: Vec<f64> = reference
                .values()
                .column(node)
                .iter()
                .map(|q| q * q)
                .collect();
            let vc = trapezoid_uniform(&col, h);
            let ru = r.value(u)?;
            let cont = ContractLaw::new(ru + 0.5 * vc, vc)?;
            let fin = ContractLaw::new(ru + 0.5 * int_q2[i], int_q2[i])?;
            worst = worst.max(gaussian_w2(&cont, &fin)?);
        }
        w2_max.push(worst);
    }
    Ok(ValueConvergence {
        value_mse: RateReport::new(sizes.to_vec(), mses, 1.0, Some(res_err))?,
        contract_w2: RateReport::new(sizes.to_vec(), w2_max, 0.5, Some(res_err))?,
    })
}

/// Result of an effort-stability comparison.
#[derive(Debug, Clone, Copy)]
pub struct EffortStability {
    pub sup_q_diff: f64,
    pub sup_g_diff: f64,
    /// `sup_q_diff / sup_g_diff`; `None` when both vanish.
    pub ratio: Option<f64>,
}

/// Grid used by the stability comparisons.
#[derive(Debug, Clone, Copy)]
pub struct StabilityGrid {
    pub time_steps: usize,
    pub type_nodes: usize,
    /// Mesh for the sampled `‖G1 − G2‖∞`.
    pub sup_mesh: usize,
}

impl Default for StabilityGrid {
    fn default() -> Self {
        StabilityGrid {
            time_steps: 256,
            type_nodes: 256,
            sup_mesh: 1024,
        }
    }
}

fn union_partition(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut all: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    all.sort_by(|x, y| x.total_cmp(y));
    all.dedup();
    all
}

/// Solves both kernels on the shared union-partition grid and measures
/// `sup |Q_{G1} − Q_{G2}|` over all grid points against the sampled
/// `‖G1 − G2‖∞`.
pub fn stability_effort(
    g1: &InteractionFunction,
    g2: &InteractionFunction,
    horizon: f64,
    grid: &StabilityGrid,
) -> Result<EffortStability> {
    let partition = union_partition(g1.partition(), g2.partition());
    let tg = TypeGrid::new(&partition, grid.type_nodes);
    let q1 = solve_on_grid(g1, horizon, grid.time_steps, tg.clone())?;
    let q2 = solve_on_grid(g2, horizon, grid.time_steps, tg)?;
    let mut sup_q = 0.0f64;
    for (v1, v2) in q1.values().iter().zip(q2.values().iter()) {
        sup_q = sup_q.max((v1 - v2).abs());
    }
    let sup_g = sup_distance(g1, g2, grid.sup_mesh)?;
    let ratio = if sup_g > 0.0 { Some(sup_q / sup_g) } else { None };
    Ok(EffortStability {
        sup_q_diff: sup_q,
        sup_g_diff: sup_g,
        ratio,
    })
}

/// Result of a contract-law stability comparison at one type.
#[derive(Debug, Clone, Copy)]
pub struct ContractStability {
    pub w2: f64,
    /// `‖G1−G2‖∞^{1/2} + ‖G1−G2‖∞`, the shape of the theorem's bound.
    pub bound_rhs_shape: f64,
    pub sup_g_diff: f64,
}

/// Wasserstein distance between the two kernels' contract laws at type `u`,
/// paired with the bound shape for ratio monitoring.
pub fn stability_contracts(
    g1: &InteractionFunction,
    g2: &InteractionFunction,
    r: &ReservationUtility,
    u: f64,
    horizon: f64,
    grid: &StabilityGrid,
) -> Result<ContractStability> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::OutOfDomain(u));
    }
    let partition = union_partition(g1.partition(), g2.partition());
    let tg = TypeGrid::new(&partition, grid.type_nodes);
    let q1 = solve_on_grid(g1, horizon, grid.time_steps, tg.clone())?;
    let q2 = solve_on_grid(g2, horizon, grid.time_steps, tg)?;
    let l1 = contract_law(&q1, r, u)?;
    let l2 = contract_law(&q2, r, u)?;
    let w2 = gaussian_w2(&l1, &l2)?;
    let sup_g = sup_distance(g1, g2, grid.sup_mesh)?;
    Ok(ContractStability {
        w2,
        bound_rhs_shape: sup_g.sqrt() + sup_g,
        sup_g_diff: sup_g,
    })
}

/// Verdict of the influence-ordering check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotonicityVerdict {
    /// `G(v,u1) ≤ G(v,u2)` for all sampled `v`, and
    /// `Q(t,u1) ≤ Q(t,u2) + 1e-9` at every grid time.
    HypothesisHoldsAndOrdered,
    /// The hypothesis holds but the ordering failed somewhere.
    HypothesisHoldsButViolated,
    /// `u1` is not dominated by `u2` in influence.
    HypothesisFails,
}

/// Ordering tolerance for the effort comparison.
pub const ORDERING_TOL: f64 = 1e-9;

/// Checks the comparative-statics property: if type `u1` is at most as
/// influential as `u2` (`G(v,u1) ≤ G(v,u2)` for all `v` — influence enters
/// through the SECOND argument), the solved efforts must satisfy
/// `Q(t,u1) ≤ Q(t,u2)` up to [`ORDERING_TOL`].
///
/// Errors with [`Error::NegativeKernel`] when `G` is negative somewhere on
/// the sample grid: the theorem does not apply and no assertion is made.
pub fn check_influence_monotonicity(
    g: &InteractionFunction,
    u1: f64,
    u2: f64,
    q: &EffortField,
) -> Result<MonotonicityVerdict> {
    if !(0.0..=1.0).contains(&u1) {
        return Err(Error::OutOfDomain(u1));
    }
    if !(0.0..=1.0).contains(&u2) {
        return Err(Error::OutOfDomain(u2));
    }
    let samples = q.grid().eval_coords();
    for &v in samples {
        for &w in samples {
            if g.eval(v, w) < 0.0 {
                return Err(Error::NegativeKernel { u: v, v: w });
            }
        }
    }
    let hypothesis = samples.iter().all(|&v| g.eval(v, u1) <= g.eval(v, u2));
    if !hypothesis {
        return Ok(MonotonicityVerdict::HypothesisFails);
    }
    let n1 = q.grid().nearest(u1);
    let n2 = q.grid().nearest(u2);
    let ordered = (0..q.times().len())
        .all(|j| q.values()[[j, n1]] <= q.values()[[j, n2]] + ORDERING_TOL);
    if ordered {
        Ok(MonotonicityVerdict::HypothesisHoldsAndOrdered)
    } else {
        Ok(MonotonicityVerdict::HypothesisHoldsButViolated)
    }
}
