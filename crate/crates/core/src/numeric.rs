//! Shared numerical building blocks: deterministic summation, quadrature,
//! classical RK4 for linear systems, partition lookups, seeded RNG streams.
//!
//! Everything here is deterministic given its inputs. Reductions use a fixed
//! pairwise order so results do not depend on thread scheduling.

use ndarray::{Array1, Array2, ArrayView1};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG domain tags, used so different consumers of the same master seed
/// draw from unrelated streams.
pub mod domain {
    pub const INITIAL_OUTPUT: u64 = 1;
    pub const CONTRACT_PATH: u64 = 2;
    pub const PARTICLE: u64 = 3;
    pub const REPLICATION: u64 = 4;
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-style stream derivation: the RNG for (master, domain, index) is a
/// pure function of its arguments, so per-path noise is identical no matter
/// how work is scheduled across threads.
pub fn derive_rng(master: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut state = master
        ^ domain.wrapping_mul(0xA076_1D64_78BD_642F)
        ^ index.wrapping_mul(0xE703_7ED1_A0B4_28DB);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// Pairwise summation; order is fixed by the slice layout.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Composite trapezoid on a uniform grid with spacing `h`.
pub fn trapezoid_uniform(values: &[f64], h: f64) -> f64 {
    assert!(values.len() >= 2, "trapezoid needs at least two nodes");
    let inner = pairwise_sum(&values[1..values.len() - 1]);
    h * (0.5 * values[0] + inner + 0.5 * values[values.len() - 1])
}

/// `n` evenly spaced points from `a` to `b` inclusive (`n >= 2`); the
/// endpoints are exact.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let step = (b - a) / (n - 1) as f64;
    let mut out: Vec<f64> = (0..n).map(|i| a + step * i as f64).collect();
    out[0] = a;
    out[n - 1] = b;
    out
}

/// Index of the half-open block `(b_i, b_{i+1}]` containing `u`, where
/// `breaks` is the full partition `0 = b_0 < ... < b_m = 1`. The first block
/// is closed on the left so that `u = 0` has an owner.
pub fn block_of(breaks: &[f64], u: f64) -> usize {
    debug_assert!(breaks.len() >= 2);
    if u <= breaks[1] {
        return 0;
    }
    // Smallest i with u <= breaks[i+1].
    let inner = &breaks[1..breaks.len() - 1];
    inner.partition_point(|b| *b < u)
}

/// Least-squares slope of `ln y` against `ln x`, restricted to strictly
/// positive samples. `None` when fewer than three usable points remain.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

fn rk4_step(mat: &Array2<f64>, y: &Array1<f64>, dt: f64) -> Array1<f64> {
    let k1 = mat.dot(y);
    let k2 = mat.dot(&(y + &(&k1 * (dt / 2.0))));
    let k3 = mat.dot(&(y + &(&k2 * (dt / 2.0))));
    let k4 = mat.dot(&(y + &(&k3 * dt)));
    y + &((k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0))
}

/// Solves the terminal-value linear system `q' = -mat q`, `q(T) = 1`,
/// by classical RK4 marched backward in `steps` uniform steps. Row `j` of the
/// result holds `q(t_j)` with `t_j = j T / steps` ascending.
pub fn rk4_linear_terminal(mat: &Array2<f64>, horizon: f64, steps: usize) -> Array2<f64> {
    assert!(steps >= 1 && horizon > 0.0);
    let dim = mat.nrows();
    let h = horizon / steps as f64;
    let neg = mat.mapv(|x| -x);
    let mut rows = Array2::zeros((steps + 1, dim));
    rows.row_mut(steps).fill(1.0);
    let mut current = Array1::from_elem(dim, 1.0);
    for j in (0..steps).rev() {
        current = rk4_step(&neg, &current, -h);
        rows.row_mut(j).assign(&current);
    }
    rows
}

/// Solves the forced linear system `m' = mat m + phi(t)` forward from
/// `m(0) = x0` by classical RK4. Row `j` holds `m(t_j)`. `phi` is evaluated
/// at the stage times `t`, `t + h/2`, `t + h`.
pub fn rk4_linear_forced(
    mat: &Array2<f64>,
    phi: impl Fn(f64) -> Array1<f64>,
    x0: ArrayView1<f64>,
    horizon: f64,
    steps: usize,
) -> Array2<f64> {
    assert!(steps >= 1 && horizon > 0.0);
    let dim = mat.nrows();
    assert_eq!(x0.len(), dim);
    let h = horizon / steps as f64;
    let mut rows = Array2::zeros((steps + 1, dim));
    rows.row_mut(0).assign(&x0);
    let mut m = x0.to_owned();
    for j in 0..steps {
        let t = h * j as f64;
        let k1 = mat.dot(&m) + phi(t);
        let k2 = mat.dot(&(&m + &(&k1 * (h / 2.0)))) + phi(t + h / 2.0);
        let k3 = mat.dot(&(&m + &(&k2 * (h / 2.0)))) + phi(t + h / 2.0);
        let k4 = mat.dot(&(&m + &(&k3 * h))) + phi(t + h);
        m = &m + &((k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0));
        rows.row_mut(j + 1).assign(&m);
    }
    rows
}
