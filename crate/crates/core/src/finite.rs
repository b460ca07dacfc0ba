//! The `N`-agent contracting problem: backward solve of
//!
//! ```text
//! dQ^i/dt (t) = -(1/N) Σ_j G(j/N, i/N) Q^j(t),    Q^i(T) = 1,
//! ```
//!
//! its principal value and contract laws, the mean output dynamics under a
//! given effort profile, and the deterministic near-optimality gap of the
//! projected mean-field contract.
//!
//! Orientation note: the `Q` system weighs `G(j/N, i/N)` (influence OF agent
//! `i` ON agent `j`), while the state dynamics weigh `G(i/N, j/N)` (row `i`
//! receives). The pair of transposes is locked by regression tests with an
//! asymmetric matrix.

use ndarray::{Array1, Array2};

use crate::continuum::{ContractLaw, EffortField};
use crate::error::{Error, Result};
use crate::graphon::{DiscreteInteraction, InteractionFunction};
use crate::numeric::{
    derive_rng, domain, pairwise_sum, rk4_linear_forced, rk4_linear_terminal, trapezoid_uniform,
};
use crate::population::{InitialLaw, ReservationUtility};

/// Solved per-agent efforts `Q^i(t_j)`, stored time-major like
/// [`EffortField`]: row `j` = time `t_j`, column `i` = agent `i+1`.
#[derive(Debug, Clone)]
pub struct FiniteEffort {
    pub n: usize,
    times: Vec<f64>,
    values: Array2<f64>,
    horizon: f64,
}

impl FiniteEffort {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn time_step(&self) -> f64 {
        self.horizon / (self.times.len() - 1) as f64
    }

    /// Linear-in-time interpolation of agent `i`'s effort (0-based column).
    pub fn effort_at(&self, t: f64, agent: usize) -> f64 {
        let m = self.times.len() - 1;
        let h = self.time_step();
        let s = (t / h).clamp(0.0, m as f64);
        let j = (s.floor() as usize).min(m - 1);
        let a = s - j as f64;
        (1.0 - a) * self.values[[j, agent]] + a * self.values[[j + 1, agent]]
    }

    /// `∫₀ᵀ Q^i(t)² dt`, trapezoid on the solve grid.
    pub fn time_integral_q2(&self, agent: usize) -> f64 {
        let sq: Vec<f64> = self.values.column(agent).iter().map(|q| q * q).collect();
        trapezoid_uniform(&sq, self.time_step())
    }
}

/// Full solution record: efforts, principal value, per-agent contract laws,
/// and the drawn initial outputs.
#[derive(Debug, Clone)]
pub struct FiniteSolution {
    pub effort: FiniteEffort,
    pub principal_value: f64,
    pub contract_laws: Vec<ContractLaw>,
    pub initial_outputs: Vec<f64>,
}

/// RK4 backward integration of the `N`-agent linear system.
pub fn solve_finite(d: &DiscreteInteraction, horizon: f64, time_steps: usize) -> Result<FiniteEffort> {
    if horizon <= 0.0 || !horizon.is_finite() {
        return Err(Error::InvalidParameter {
            name: "horizon",
            reason: format!("must be positive and finite, got {horizon}"),
        });
    }
    if time_steps < 1 {
        return Err(Error::InvalidParameter {
            name: "time_steps",
            reason: "must be at least 1".into(),
        });
    }
    if d.weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::NonFinite("discrete interaction matrix"));
    }
    let n = d.n;
    // op[i][j] = G^N_{j,i} / N: the transpose of the interaction matrix.
    let mut op = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            op[[i, j]] = d.weights[[j, i]] / n as f64;
        }
    }
    let values = rk4_linear_terminal(&op, horizon, time_steps);
    Ok(FiniteEffort {
        n,
        times: crate::numeric::linspace(0.0, horizon, time_steps + 1),
        values,
        horizon,
    })
}

/// Draws the agents' initial outputs `x₀^{i,N} ~ λ̂(i/N, ·)`, mutually
/// independent, one RNG stream per agent so the draw for agent `i` does not
/// depend on `n` ordering or scheduling.
pub fn draw_initial_outputs(law: &InitialLaw, n: usize, seed: u64) -> Result<Vec<f64>> {
    (1..=n)
        .map(|i| {
            let mut rng = derive_rng(seed, domain::INITIAL_OUTPUT, i as u64);
            law.sample_initial(i as f64 / n as f64, &mut rng)
        })
        .collect()
}

/// Solves the system and assembles principal value and contract laws:
///
/// `V^N_P = (1/N)ΣQ^i(0)x₀^i + (1/2N)Σ∫(Q^i)²dt − (1/N)ΣR_a(i/N)`.
pub fn finite_solution(
    d: &DiscreteInteraction,
    horizon: f64,
    time_steps: usize,
    law: &InitialLaw,
    r: &ReservationUtility,
    seed: u64,
) -> Result<FiniteSolution> {
    let effort = solve_finite(d, horizon, time_steps)?;
    let n = d.n;
    let initial_outputs = draw_initial_outputs(law, n, seed)?;
    let mut contract_laws = Vec::with_capacity(n);
    let mut q0x = Vec::with_capacity(n);
    let mut int_q2 = Vec::with_capacity(n);
    for i in 0..n {
        let u = (i + 1) as f64 / n as f64;
        let v = effort.time_integral_q2(i);
        contract_laws.push(ContractLaw::new(r.value(u)? + 0.5 * v, v)?);
        q0x.push(effort.values()[[0, i]] * initial_outputs[i]);
        int_q2.push(v);
    }
    let r_sum: Result<Vec<f64>> = (1..=n).map(|i| r.value(i as f64 / n as f64)).collect();
    let nf = n as f64;
    let principal_value = pairwise_sum(&q0x) / nf + 0.5 * pairwise_sum(&int_q2) / nf
        - pairwise_sum(&r_sum?) / nf;
    Ok(FiniteSolution {
        effort,
        principal_value,
        contract_laws,
        initial_outputs,
    })
}

/// Expected output trajectory under a deterministic effort profile:
/// RK4 solve of `dm_i/dt = (1/N) Σ_j G(i/N, j/N) m_j + effort_i(t)` from
/// `m(0) = x0`. Row `i` of the interaction matrix is the receiver.
pub fn mean_output_trajectory(
    d: &DiscreteInteraction,
    effort: impl Fn(f64) -> Vec<f64>,
    x0: &[f64],
    horizon: f64,
    time_steps: usize,
) -> Result<Array2<f64>> {
    let n = d.n;
    if x0.len() != n {
        return Err(Error::GridMismatch(format!(
            "x0 has {} entries for n={n}",
            x0.len()
        )));
    }
    let drift = d.weights.mapv(|w| w / n as f64);
    let phi = |t: f64| Array1::from(effort(t));
    Ok(rk4_linear_forced(
        &drift,
        phi,
        Array1::from(x0.to_vec()).view(),
        horizon,
        time_steps,
    ))
}

/// Paired evaluation of the projected mean-field contract against the exact
/// `N`-agent optimum.
#[derive(Debug, Clone, Copy)]
pub struct NearOptimalReport {
    /// `J^N_p(ξ̂^N)`: principal's value under the projected contract.
    pub projected_value: f64,
    /// `V^N_p` computed through the identical pipeline with effort `Q^{i,N}`.
    pub optimal_value: f64,
}

impl NearOptimalReport {
    pub fn gap(&self) -> f64 {
        (self.projected_value - self.optimal_value).abs()
    }
}

/// Computes both sides of the Theorem-style near-optimality comparison
/// deterministically through mean ODEs:
///
/// `J = −(1/N)ΣR_a + (1/N)ΣE[X^i_T] − (1/2N)Σ∫Q(t,i/N)²dt`
///
/// with `E[X_T]` from [`mean_output_trajectory`] driven by the projected
/// effort `Q(t, i/N)`, and `V` identically with effort `Q^{i,N}`. The same
/// drawn `x₀` (from `seed`) feeds both sides.
pub fn near_optimal_report(
    g: &InteractionFunction,
    continuum_effort: &EffortField,
    law: &InitialLaw,
    r: &ReservationUtility,
    n: usize,
    horizon: f64,
    time_steps: usize,
    seed: u64,
) -> Result<NearOptimalReport> {
    if (continuum_effort.horizon() - horizon).abs() > 1e-12 {
        return Err(Error::HorizonMismatch {
            field: continuum_effort.horizon(),
            requested: horizon,
        });
    }
    let d = crate::graphon::discretize(g, n)?;
    let finite = solve_finite(&d, horizon, time_steps)?;
    let x0 = draw_initial_outputs(law, n, seed)?;
    let nf = n as f64;
    let h = horizon / time_steps as f64;

    let types: Vec<f64> = (1..=n).map(|i| i as f64 / nf).collect();
    // Projected effort: the continuum field read at the agent types.
    let projected: Result<Vec<Vec<f64>>> = (0..=time_steps)
        .map(|j| {
            types
                .iter()
                .map(|&u| continuum_effort.effort(h * j as f64, u))
                .collect()
        })
        .collect();
    let projected = projected?;

    let lerp = |table: &[Vec<f64>], t: f64| -> Vec<f64> {
        let s = (t / h).clamp(0.0, time_steps as f64);
        let j = (s.floor() as usize).min(time_steps - 1);
        let a = s - j as f64;
        table[j]
            .iter()
            .zip(&table[j + 1])
            .map(|(lo, hi)| (1.0 - a) * lo + a * hi)
            .collect()
    };

    let value_under = |efforts: &[Vec<f64>]| -> f64 {
        let traj = mean_output_trajectory(&d, |t| lerp(efforts, t), &x0, horizon, time_steps)
            .expect("dimensions validated above");
        let terminal: Vec<f64> = traj.row(time_steps).to_vec();
        let mean_xt = pairwise_sum(&terminal) / nf;
        let int_q2: Vec<f64> = (0..n)
            .map(|i| {
                let col: Vec<f64> = (0..=time_steps).map(|j| efforts[j][i] * efforts[j][i]).collect();
                trapezoid_uniform(&col, h)
            })
            .collect();
        mean_xt - 0.5 * pairwise_sum(&int_q2) / nf
    };

    let r_vals: Result<Vec<f64>> = types.iter().map(|&u| r.value(u)).collect();
    let r_avg = pairwise_sum(&r_vals?) / nf;

    let optimal_table: Vec<Vec<f64>> = (0..=time_steps)
        .map(|j| finite.values().row(j).to_vec())
        .collect();

    Ok(NearOptimalReport {
        projected_value: value_under(&projected) - r_avg,
        optimal_value: value_under(&optimal_table) - r_avg,
    })
}

/// `|J^N_p(ξ̂^N) − V^N_p|`, the near-optimality gap.
#[allow(clippy::too_many_arguments)]
pub fn near_optimal_gap(
    g: &InteractionFunction,
    continuum_effort: &EffortField,
    law: &InitialLaw,
    r: &ReservationUtility,
    n: usize,
    horizon: f64,
    time_steps: usize,
    seed: u64,
) -> Result<f64> {
    near_optimal_report(g, continuum_effort, law, r, n, horizon, time_steps, seed).map(|rep| rep.gap())
}
