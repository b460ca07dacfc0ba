//! The continuum contracting problem: backward solve of
//!
//! ```text
//! dQ/dt (t,u) = -∫₀¹ G(v,u) Q(t,v) dv,    Q(T,u) = 1,
//! ```
//!
//! and every quantity the solution determines: the principal's value, the
//! per-type marginal values, the Gaussian contract laws, and the equilibrium
//! effort (which equals `Q` itself).
//!
//! The integration variable is the FIRST argument of `G`: the effort of type
//! `u` aggregates `G(v, u)` over the receivers `v` of `u`'s influence. A
//! regression test with an asymmetric kernel pins this orientation.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graphon::InteractionFunction;
use crate::grid::TypeGrid;
use crate::numeric::{rk4_linear_terminal, trapezoid_uniform};
use crate::population::{InitialLaw, ReservationUtility};

/// The solved effort field `Q(t_j, u_k)` on a time × type grid.
///
/// `Q` is the equilibrium effort and the incentive slope of the optimal
/// contract. Values are stored time-major: row `j` is the type slice at
/// `t_j = j·T/M`, ascending from 0 to `T`.
#[derive(Debug, Clone)]
pub struct EffortField {
    times: Vec<f64>,
    grid: TypeGrid,
    values: Array2<f64>,
    horizon: f64,
}

/// Conditional law of the optimal lump-sum contract for one type: Gaussian
/// with `mean = R_a(u) + ½∫Q²dt` and `variance = ∫Q²dt`, so that
/// `variance = 2(mean − R_a(u))` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractLaw {
    pub mean: f64,
    pub variance: f64,
}

impl ContractLaw {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if variance < 0.0 {
            return Err(Error::NegativeVariance(variance));
        }
        Ok(ContractLaw { mean, variance })
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

impl EffortField {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn grid(&self) -> &TypeGrid {
        &self.grid
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

    /// Equilibrium effort `α*(t,u) = Q(t,u)` by bilinear interpolation within
    /// the block containing `u`; exact at grid nodes.
    pub fn effort(&self, t: f64, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::OutOfDomain(u));
        }
        if t < 0.0 || t > self.horizon {
            return Err(Error::OutOfTimeDomain {
                t,
                horizon: self.horizon,
            });
        }
        let m = self.times.len() - 1;
        let h = self.time_step();
        let s = (t / h).min(m as f64);
        let j = (s.floor() as usize).min(m - 1);
        let a = s - j as f64;
        let (lo, hi) = self.grid.bracket(u);
        let (clo, chi) = (self.grid.coords()[lo], self.grid.coords()[hi]);
        let b = if chi > clo { (u - clo) / (chi - clo) } else { 0.0 };
        let at = |row: usize| {
            (1.0 - b) * self.values[[row, lo]] + b * self.values[[row, hi]]
        };
        Ok((1.0 - a) * at(j) + a * at(j + 1))
    }

    /// The stored time trace at the node nearest to `u`.
    pub fn node_trace(&self, node: usize) -> Vec<f64> {
        self.values.column(node).to_vec()
    }

    /// `∫₀ᵀ Q(t, u)² dt` at the node nearest to `u` (trapezoid in time).
    /// Nearest-node lookup keeps block discontinuities sharp; the node
    /// spacing bounds the lookup error.
    pub fn time_integral_q2(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::OutOfDomain(u));
        }
        let node = self.grid.nearest(u);
        let sq: Vec<f64> = self.values.column(node).iter().map(|q| q * q).collect();
        Ok(trapezoid_uniform(&sq, self.time_step()))
    }
}

/// Solves the terminal-value system on a block-aligned grid: RK4 backward in
/// time, block-aware composite trapezoid for the kernel integral.
pub fn solve_continuum(
    g: &InteractionFunction,
    horizon: f64,
    time_steps: usize,
    type_nodes: usize,
) -> Result<EffortField> {
    if horizon <= 0.0 || !horizon.is_finite() {
        return Err(Error::InvalidParameter {
            name: "horizon",
            reason: format!("must be positive and finite, got {horizon}"),
        });
    }
    if time_steps < 1 || type_nodes < 1 {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: "time_steps and type_nodes must be at least 1".into(),
        });
    }
    let grid = TypeGrid::new(g.partition(), type_nodes);
    solve_on_grid(g, horizon, time_steps, grid)
}

/// Same as [`solve_continuum`] but on a caller-supplied grid (used by the
/// analysis module for shared and reference grids).
pub fn solve_on_grid(
    g: &InteractionFunction,
    horizon: f64,
    time_steps: usize,
    grid: TypeGrid,
) -> Result<EffortField> {
    let k = grid.len();
    // B[i][k] = w_k G(v_k, u_i): the dummy coordinate enters first.
    let mut op = Array2::zeros((k, k));
    for i in 0..k {
        let ui = grid.eval_coords()[i];
        for kk in 0..k {
            let val = grid.weights()[kk] * g.eval(grid.eval_coords()[kk], ui);
            if !val.is_finite() {
                return Err(Error::NonFinite("interaction kernel evaluation"));
            }
            op[[i, kk]] = val;
        }
    }
    let values = rk4_linear_terminal(&op, horizon, time_steps);
    let times = crate::numeric::linspace(0.0, horizon, time_steps + 1);
    Ok(EffortField {
        times,
        grid,
        values,
        horizon,
    })
}

/// Principal's value
/// `V_P = ∫ Q(0,u) m(u) du + ½∫₀ᵀ∫₀¹ Q² du dt − ∫ R_a(u) du`,
/// trapezoid in both variables.
pub fn principal_value(
    q: &EffortField,
    law: &InitialLaw,
    r: &ReservationUtility,
) -> Result<f64> {
    let grid = q.grid();
    let q0_m: Vec<f64> = grid
        .coords()
        .iter()
        .enumerate()
        .map(|(i, &u)| Ok(q.values()[[0, i]] * law.mean_initial(u)?))
        .collect::<Result<_>>()?;
    let first = grid.integrate(&q0_m);

    let per_time: Vec<f64> = (0..q.times().len())
        .map(|j| {
            let sq: Vec<f64> = q.values().row(j).iter().map(|x| x * x).collect();
            grid.integrate(&sq)
        })
        .collect();
    let second = 0.5 * trapezoid_uniform(&per_time, q.time_step());

    let rvals: Vec<f64> = grid
        .coords()
        .iter()
        .map(|&u| r.value(u))
        .collect::<Result<_>>()?;
    let third = grid.integrate(&rvals);

    Ok(first + second - third)
}

/// Marginal value of type `u`:
/// `v_p(u) = m(u) + ½∫₀ᵀ Q(t,u)² dt − R_a(u)`.
pub fn marginal_value(
    q: &EffortField,
    law: &InitialLaw,
    r: &ReservationUtility,
    u: f64,
) -> Result<f64> {
    Ok(law.mean_initial(u)? + 0.5 * q.time_integral_q2(u)? - r.value(u)?)
}

/// Gaussian law of the optimal contract for type `u`.
pub fn contract_law(q: &EffortField, r: &ReservationUtility, u: f64) -> Result<ContractLaw> {
    let int_q2 = q.time_integral_q2(u)?;
    ContractLaw::new(r.value(u)? + 0.5 * int_q2, int_q2)
}
