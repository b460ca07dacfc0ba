//! Interaction functions `G : [0,1]^2 -> R` with block-Lipschitz structure.
//!
//! `G(u, v)` weighs how strongly the type-`v` agent influences the type-`u`
//! agent's project (first argument = receiver). Every kernel carries a block
//! partition of [0,1]; `G` is Lipschitz on each block rectangle. Blocks are
//! half-open `(b_{i-1}, b_i]` with `u = 0` assigned to the first block.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{block_of, pairwise_sum};

/// Builtin kernel families plus ingested step kernels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Family {
    /// `G ≡ c`.
    Constant(f64),
    /// `G(u,v) = ĝ(u)`: heterogeneous sensitivity, uniform influence.
    RowSeparable(crate::typefn::TypeFn),
    /// `G(u,v) = ĝ(v)`: uniform sensitivity, heterogeneous influence.
    ColumnSeparable(crate::typefn::TypeFn),
    /// `G(u,v) = sin(|u - v|)`.
    SineDistance,
    /// `G(u,v) = 1 / (1 + e^{θ(u - v)})`.
    Logistic { theta: f64 },
    /// `G(u,v) = (⌈uL⌉/L)(⌈vL⌉/L)` with blocks at `i/L`.
    BlockProduct { levels: u32 },
    /// `G(u,v) = L / (1 + e^{(i-1)L(u-v)})` on the diagonal block `i`,
    /// zero off-diagonal; blocks at `i/L`.
    BlockLogistic { levels: u32 },
    /// Piecewise constant: `values[i][j]` on block row `i` (first argument)
    /// and block column `j` (second argument).
    Step {
        breaks: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
    /// `base + offset`, used for stability perturbations.
    Shifted { base: Box<Family>, offset: f64 },
}

/// An interaction function together with its block partition and an optional
/// cached sup-norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionFunction {
    family: Family,
    /// Full partition `0 = b_0 < ... < b_m = 1`.
    partition: Vec<f64>,
    sup_norm_hint: Option<f64>,
}

/// Default mesh (per axis) for sampled sup-norms when no analytic value is
/// available.
pub const SUP_NORM_MESH: usize = 1024;

impl InteractionFunction {
    pub fn new(family: Family) -> Result<Self> {
        let partition = family_partition(&family)?;
        let sup_norm_hint = family_sup_hint(&family);
        Ok(InteractionFunction {
            family,
            partition,
            sup_norm_hint,
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Full block partition including 0 and 1.
    pub fn partition(&self) -> &[f64] {
        &self.partition
    }

    /// Interior breakpoints only.
    pub fn interior_breaks(&self) -> &[f64] {
        &self.partition[1..self.partition.len() - 1]
    }

    /// Evaluates `G(u, v)`; total and finite on [0,1]^2.
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        eval_family(&self.family, u, v)
    }

    /// `‖G‖∞`: the cached analytic value when the family documents one,
    /// otherwise a block-aware sampled supremum on [`SUP_NORM_MESH`].
    pub fn sup_norm(&self) -> f64 {
        match self.sup_norm_hint {
            Some(h) => h,
            None => self.sampled_sup_norm(SUP_NORM_MESH),
        }
    }

    /// Sampled sup-norm on the block-aware mesh.
    pub fn sampled_sup_norm(&self, mesh: usize) -> f64 {
        let coords = sample_coords(&[self.partition.clone()], mesh);
        let mut worst = 0.0f64;
        for &u in &coords {
            for &v in &coords {
                worst = worst.max(self.eval(u, v).abs());
            }
        }
        worst
    }

    /// Returns the same kernel shifted by a constant `delta`.
    pub fn shifted(&self, delta: f64) -> InteractionFunction {
        let family = match &self.family {
            Family::Constant(c) => Family::Constant(c + delta),
            Family::Shifted { base, offset } => Family::Shifted {
                base: base.clone(),
                offset: offset + delta,
            },
            other => Family::Shifted {
                base: Box::new(other.clone()),
                offset: delta,
            },
        };
        InteractionFunction::new(family).expect("shifting preserves validity")
    }

    /// Empirical mean-field term `out[p] = (1/P) Σ_q G(u_p, u_q) x_q`.
    ///
    /// Wherever the family factorizes, the sum collapses to O(P) with a fixed
    /// summation order; the generic path is a row-parallel O(P^2) loop whose
    /// per-row reduction is sequential, so results never depend on the thread
    /// count.
    pub fn mean_field_term(&self, types: &[f64], xs: &[f64], out: &mut [f64]) {
        assert_eq!(types.len(), xs.len());
        assert_eq!(types.len(), out.len());
        let p = types.len() as f64;
        match &self.family {
            Family::Constant(c) => {
                let s = pairwise_sum(xs) / p;
                out.iter_mut().for_each(|o| *o = c * s);
            }
            Family::RowSeparable(g) => {
                let s = pairwise_sum(xs) / p;
                for (o, &u) in out.iter_mut().zip(types) {
                    *o = g.eval(u) * s;
                }
            }
            Family::ColumnSeparable(g) => {
                let weighted: Vec<f64> =
                    types.iter().zip(xs).map(|(&u, &x)| g.eval(u) * x).collect();
                let s = pairwise_sum(&weighted) / p;
                out.iter_mut().for_each(|o| *o = s);
            }
            Family::BlockProduct { levels } => {
                let l = *levels;
                let weighted: Vec<f64> = types
                    .iter()
                    .zip(xs)
                    .map(|(&u, &x)| block_level(u, l) * x)
                    .collect();
                let s = pairwise_sum(&weighted) / p;
                for (o, &u) in out.iter_mut().zip(types) {
                    *o = block_level(u, l) * s;
                }
            }
            Family::Step { breaks, values } => {
                let full = full_partition(breaks);
                let m = values.len();
                let mut block_sums = vec![Vec::new(); m];
                for (&u, &x) in types.iter().zip(xs) {
                    block_sums[block_of(&full, u)].push(x);
                }
                let sums: Vec<f64> = block_sums.iter().map(|b| pairwise_sum(b)).collect();
                for (o, &u) in out.iter_mut().zip(types) {
                    let row = &values[block_of(&full, u)];
                    let mut acc = 0.0;
                    for (val, s) in row.iter().zip(&sums) {
                        acc += val * s;
                    }
                    *o = acc / p;
                }
            }
            Family::Shifted { base, offset } => {
                let inner = InteractionFunction::new((**base).clone())
                    .expect("base family already validated");
                inner.mean_field_term(types, xs, out);
                let s = pairwise_sum(xs) / p;
                out.iter_mut().for_each(|o| *o += offset * s);
            }
            _ => {
                use rayon::prelude::*;
                out.par_iter_mut().enumerate().for_each(|(i, o)| {
                    let u = types[i];
                    let mut acc = 0.0;
                    for (&v, &x) in types.iter().zip(xs) {
                        acc += self.eval(u, v) * x;
                    }
                    *o = acc / p;
                });
            }
        }
    }
}

fn full_partition(interior: &[f64]) -> Vec<f64> {
    let mut full = Vec::with_capacity(interior.len() + 2);
    full.push(0.0);
    full.extend_from_slice(interior);
    full.push(1.0);
    full
}

/// Block level `⌈uL⌉/L` with `u = 0` owned by the first block.
fn block_level(u: f64, levels: u32) -> f64 {
    let l = levels as f64;
    let i = (u * l).ceil().clamp(1.0, l);
    i / l
}

/// 1-based diagonal block index for the block families.
fn block_index(u: f64, levels: u32) -> u32 {
    let l = levels as f64;
    (u * l).ceil().clamp(1.0, l) as u32
}

fn eval_family(family: &Family, u: f64, v: f64) -> f64 {
    match family {
        Family::Constant(c) => *c,
        Family::RowSeparable(g) => g.eval(u),
        Family::ColumnSeparable(g) => g.eval(v),
        Family::SineDistance => (u - v).abs().sin(),
        Family::Logistic { theta } => 1.0 / (1.0 + (theta * (u - v)).exp()),
        Family::BlockProduct { levels } => block_level(u, *levels) * block_level(v, *levels),
        Family::BlockLogistic { levels } => {
            let bi = block_index(u, *levels);
            if bi != block_index(v, *levels) {
                return 0.0;
            }
            let l = *levels as f64;
            l / (1.0 + (((bi - 1) as f64) * l * (u - v)).exp())
        }
        Family::Step { breaks, values } => {
            let full = full_partition(breaks);
            values[block_of(&full, u)][block_of(&full, v)]
        }
        Family::Shifted { base, offset } => eval_family(base, u, v) + offset,
    }
}

fn level_breaks(levels: u32) -> Vec<f64> {
    (1..levels).map(|i| i as f64 / levels as f64).collect()
}

fn family_partition(family: &Family) -> Result<Vec<f64>> {
    let interior: Vec<f64> = match family {
        Family::Constant(c) => {
            if !c.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "constant.value",
                    reason: "must be finite".into(),
                });
            }
            vec![]
        }
        Family::RowSeparable(g) | Family::ColumnSeparable(g) => {
            g.validate()?;
            g.breaks().to_vec()
        }
        Family::SineDistance => vec![],
        Family::Logistic { theta } => {
            if !(*theta > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "logistic.theta",
                    reason: format!("must be positive, got {theta}"),
                });
            }
            vec![]
        }
        Family::BlockProduct { levels } | Family::BlockLogistic { levels } => {
            if *levels == 0 {
                return Err(Error::InvalidParameter {
                    name: "levels",
                    reason: "must be a positive integer".into(),
                });
            }
            level_breaks(*levels)
        }
        Family::Step { breaks, values } => {
            validate_step(breaks, values)?;
            breaks.clone()
        }
        Family::Shifted { base, .. } => return family_partition(base),
    };
    Ok(full_partition(&interior))
}

fn family_sup_hint(family: &Family) -> Option<f64> {
    match family {
        Family::Constant(c) => Some(c.abs()),
        Family::RowSeparable(g) | Family::ColumnSeparable(g) => Some(g.sup_abs()),
        Family::SineDistance => Some(1.0f64.sin()),
        Family::Logistic { theta } => Some(1.0 / (1.0 + (-theta).exp())),
        Family::BlockProduct { .. } => Some(1.0),
        Family::BlockLogistic { levels } => {
            let l = *levels as f64;
            Some(l / (1.0 + (-(l - 1.0)).exp()))
        }
        Family::Step { values, .. } => Some(
            values
                .iter()
                .flatten()
                .fold(0.0f64, |m, v| m.max(v.abs())),
        ),
        // Upper bound: ‖base + d‖∞ ≤ ‖base‖∞ + |d|.
        Family::Shifted { base, offset } => family_sup_hint(base).map(|h| h + offset.abs()),
    }
}

fn validate_step(breaks: &[f64], values: &[Vec<f64>]) -> Result<()> {
    if !breaks.windows(2).all(|w| w[0] < w[1]) || breaks.iter().any(|b| !(*b > 0.0 && *b < 1.0)) {
        return Err(Error::MalformedStepTable(
            "breakpoints must be strictly increasing inside (0,1)".into(),
        ));
    }
    let m = breaks.len() + 1;
    if values.len() != m {
        return Err(Error::MalformedStepTable(format!(
            "expected {m} block rows, got {}",
            values.len()
        )));
    }
    for (i, row) in values.iter().enumerate() {
        if row.len() != m {
            return Err(Error::MalformedStepTable(format!(
                "row {i} has {} entries, expected {m}",
                row.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::MalformedStepTable(format!(
                "row {i} contains a non-finite entry"
            )));
        }
    }
    Ok(())
}

/// Constructs a builtin family by string id.
///
/// Known ids: `constant`, `row-separable`, `column-separable`,
/// `sine-distance`, `logistic`, `block-product`, `block-logistic`.
pub fn builtin(name: &str, params: &BuiltinParams) -> Result<InteractionFunction> {
    let family = match name {
        "constant" => Family::Constant(params.value.unwrap_or(0.0)),
        "row-separable" => Family::RowSeparable(params.require_ghat(name)?),
        "column-separable" => Family::ColumnSeparable(params.require_ghat(name)?),
        "sine-distance" => Family::SineDistance,
        "logistic" => Family::Logistic {
            theta: params.theta.ok_or(Error::InvalidParameter {
                name: "theta",
                reason: "required for the logistic family".into(),
            })?,
        },
        "block-product" => Family::BlockProduct {
            levels: params.require_levels(name)?,
        },
        "block-logistic" => Family::BlockLogistic {
            levels: params.require_levels(name)?,
        },
        other => return Err(Error::UnknownFamily(other.to_string())),
    };
    InteractionFunction::new(family)
}

/// Parameters accepted by [`builtin`]; unused fields are ignored by families
/// that do not need them.
#[derive(Debug, Clone, Default)]
pub struct BuiltinParams {
    pub value: Option<f64>,
    pub theta: Option<f64>,
    pub levels: Option<u32>,
    pub ghat: Option<crate::typefn::TypeFn>,
}

impl BuiltinParams {
    fn require_ghat(&self, fam: &str) -> Result<crate::typefn::TypeFn> {
        self.ghat.clone().ok_or(Error::InvalidParameter {
            name: "ghat",
            reason: format!("required for the {fam} family"),
        })
    }

    fn require_levels(&self, fam: &str) -> Result<u32> {
        match self.levels {
            Some(l) if l >= 1 => Ok(l),
            Some(_) => Err(Error::InvalidParameter {
                name: "l",
                reason: "must be a positive integer".into(),
            }),
            None => Err(Error::InvalidParameter {
                name: "l",
                reason: format!("required for the {fam} family"),
            }),
        }
    }
}

/// Parses a step graphon from delimited text: the first line holds the
/// interior breakpoints (empty for a single block), each following line one
/// row of block values. Fields split on commas and/or whitespace.
pub fn load_step_graphon(text: &str) -> Result<InteractionFunction> {
    let mut lines = text.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::MalformedStepTable("empty input".into()))?;
    let breaks = parse_fields(first)?;
    let mut values = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        values.push(parse_fields(line)?);
    }
    if values.is_empty() {
        return Err(Error::MalformedStepTable("no block-value rows".into()));
    }
    InteractionFunction::new(Family::Step { breaks, values })
}

fn parse_fields(line: &str) -> Result<Vec<f64>> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::MalformedStepTable(format!("cannot parse `{s}` as a number")))
        })
        .collect()
}

/// `n x n` matrix of kernel values at agent coordinates: agent `i` of `n`
/// has type `i/n`, so entry `(i, j)` (1-indexed agents) equals `G(i/n, j/n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteInteraction {
    pub n: usize,
    pub weights: Array2<f64>,
}

/// Samples `G` at the agent coordinates `i/n`, `i = 1..n`.
pub fn discretize(g: &InteractionFunction, n: usize) -> Result<DiscreteInteraction> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "agent count must be at least 1".into(),
        });
    }
    let coords: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
    let mut weights = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            weights[[i, j]] = g.eval(coords[i], coords[j]);
        }
    }
    Ok(DiscreteInteraction { n, weights })
}

/// Block-aware sample coordinates: the nested grid `{i/mesh}` plus every
/// partition corner and a one-ulp point on the open side of each interior
/// breakpoint, so one-sided limits of step kernels are sampled.
pub fn sample_coords(partitions: &[Vec<f64>], mesh: usize) -> Vec<f64> {
    let mut coords: Vec<f64> = (0..=mesh).map(|i| i as f64 / mesh as f64).collect();
    for partition in partitions {
        for &b in partition {
            coords.push(b);
            if b > 0.0 && b < 1.0 {
                coords.push(b.next_up());
            }
        }
    }
    coords.sort_by(|a, b| a.total_cmp(b));
    coords.dedup();
    coords
}

/// Sampled `sup |G1 - G2|` over the block-aware `mesh x mesh` grid. The
/// sample set is nested under integer mesh refinement, so the value is
/// monotone nondecreasing in refinement.
pub fn sup_distance(g1: &InteractionFunction, g2: &InteractionFunction, mesh: usize) -> Result<f64> {
    if mesh < 2 {
        return Err(Error::InvalidParameter {
            name: "mesh",
            reason: "must be at least 2".into(),
        });
    }
    let coords = sample_coords(&[g1.partition.clone(), g2.partition.clone()], mesh);
    let mut worst = 0.0f64;
    for &u in &coords {
        for &v in &coords {
            worst = worst.max((g1.eval(u, v) - g2.eval(u, v)).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typefn::TypeFn;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn logistic(theta: f64) -> InteractionFunction {
        InteractionFunction::new(Family::Logistic { theta }).unwrap()
    }

    #[test]
    fn builtin_family_values() {
        let g1 = InteractionFunction::new(Family::SineDistance).unwrap();
        assert_eq!(g1.eval(0.25, 0.25), 0.0);

        let g2 = logistic(10.0);
        assert_abs_diff_eq!(g2.eval(0.3, 0.3), 0.5);

        let g3 = InteractionFunction::new(Family::BlockProduct { levels: 5 }).unwrap();
        assert_abs_diff_eq!(g3.eval(0.1, 0.9), 0.2, epsilon = 1e-15);
        // u = 0 belongs to the first block.
        assert_abs_diff_eq!(g3.eval(0.0, 0.0), 0.04, epsilon = 1e-15);
        assert_abs_diff_eq!(g3.eval(1.0, 1.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn block_logistic_structure() {
        let g4 = InteractionFunction::new(Family::BlockLogistic { levels: 5 }).unwrap();
        // Off-diagonal blocks vanish.
        assert_eq!(g4.eval(0.1, 0.9), 0.0);
        // First diagonal block is the homogeneous team: L / (1 + e^0).
        assert_abs_diff_eq!(g4.eval(0.1, 0.15), 2.5);
        assert_eq!(g4.partition(), &[0.0, 0.2, 0.4, 0.6, 0.8, 1.0]);
    }

    #[test]
    fn builtin_rejects_bad_params() {
        assert!(matches!(
            builtin("nosuch", &BuiltinParams::default()),
            Err(Error::UnknownFamily(_))
        ));
        assert!(builtin(
            "logistic",
            &BuiltinParams {
                theta: Some(-1.0),
                ..Default::default()
            }
        )
        .is_err());
        assert!(builtin(
            "block-product",
            &BuiltinParams {
                levels: Some(0),
                ..Default::default()
            }
        )
        .is_err());
    }

    #[test]
    fn step_graphon_loading() {
        let zero = load_step_graphon("\n0\n").unwrap();
        assert_eq!(zero.eval(0.3, 0.8), 0.0);

        let diag = load_step_graphon("0.5\n1 0\n0 1\n").unwrap();
        assert_eq!(diag.eval(0.25, 0.75), 0.0);
        assert_eq!(diag.eval(0.25, 0.25), 1.0);
        assert_eq!(diag.eval(0.75, 0.75), 1.0);

        assert!(load_step_graphon("0.5\n1 0\n").is_err());
        assert!(load_step_graphon("0.7 0.2\n1 0 0\n0 1 0\n0 0 1\n").is_err());
        assert!(load_step_graphon("0.5\n1 nan\n0 1\n").is_err());
    }

    #[test]
    fn discretize_matches_eval() {
        let zero = InteractionFunction::new(Family::Constant(0.0)).unwrap();
        let d = discretize(&zero, 3).unwrap();
        assert!(d.weights.iter().all(|w| *w == 0.0));

        let g1 = InteractionFunction::new(Family::SineDistance).unwrap();
        let d = discretize(&g1, 2).unwrap();
        assert_eq!(d.weights[[0, 0]], 0.0);
        assert_abs_diff_eq!(d.weights[[0, 1]], 0.5f64.sin());
        assert_abs_diff_eq!(d.weights[[1, 0]], 0.5f64.sin());
        assert_eq!(d.weights[[1, 1]], 0.0);

        let g2 = logistic(10.0);
        let d = discretize(&g2, 1).unwrap();
        assert_abs_diff_eq!(d.weights[[0, 0]], 0.5);

        assert!(discretize(&zero, 0).is_err());
    }

    #[test]
    fn discretize_step_exact_on_aligned_grid() {
        let g = load_step_graphon("0.5\n1 2\n3 4\n").unwrap();
        let d = discretize(&g, 4).unwrap();
        // types 0.25, 0.5 -> block 0; 0.75, 1.0 -> block 1.
        assert_eq!(d.weights[[0, 0]], 1.0);
        assert_eq!(d.weights[[1, 3]], 2.0);
        assert_eq!(d.weights[[2, 0]], 3.0);
        assert_eq!(d.weights[[3, 3]], 4.0);
    }

    #[test]
    fn sup_distance_basics() {
        let zero = InteractionFunction::new(Family::Constant(0.0)).unwrap();
        let two = InteractionFunction::new(Family::Constant(2.0)).unwrap();
        assert_eq!(sup_distance(&zero, &zero, 16).unwrap(), 0.0);
        assert_eq!(sup_distance(&zero, &two, 16).unwrap(), 2.0);
        assert!(sup_distance(&zero, &two, 1).is_err());
    }

    #[test]
    fn sup_distance_logistic_golden() {
        // Oracle: dense 4096^2 evaluation of |G_10 - G_10.1|, frozen.
        const DENSE_ORACLE: f64 = 0.002227580907773197;
        let d = sup_distance(&logistic(10.0), &logistic(10.1), 256).unwrap();
        assert!(d <= DENSE_ORACLE + 1e-15, "sampled sup exceeded the dense oracle: {d}");
        assert!((DENSE_ORACLE - d).abs() <= 1e-3, "sampled sup too far from oracle: {d}");
    }

    #[test]
    fn sup_distance_monotone_in_refinement() {
        let a = logistic(10.0);
        let b = logistic(10.1);
        let d16 = sup_distance(&a, &b, 16).unwrap();
        let d32 = sup_distance(&a, &b, 32).unwrap();
        let d64 = sup_distance(&a, &b, 64).unwrap();
        assert!(d16 <= d32 && d32 <= d64);
    }

    #[test]
    fn sup_norm_hints_bound_samples() {
        for g in [
            InteractionFunction::new(Family::SineDistance).unwrap(),
            logistic(10.0),
            InteractionFunction::new(Family::BlockProduct { levels: 5 }).unwrap(),
            InteractionFunction::new(Family::BlockLogistic { levels: 5 }).unwrap(),
        ] {
            let sampled = g.sampled_sup_norm(256);
            assert!(
                sampled <= g.sup_norm() + 1e-12,
                "sampled {sampled} exceeds hint {}",
                g.sup_norm()
            );
        }
    }

    #[test]
    fn lipschitz_quotients_stay_bounded_within_blocks() {
        // Difference quotients on shrinking meshes stay below a fixed bound.
        let g = logistic(10.0);
        let mut worst = 0.0f64;
        for mesh in [64usize, 128, 256] {
            let xs: Vec<f64> = (0..=mesh).map(|i| i as f64 / mesh as f64).collect();
            for w in xs.windows(2) {
                let dq = (g.eval(w[1], 0.3) - g.eval(w[0], 0.3)).abs() / (w[1] - w[0]);
                worst = worst.max(dq);
            }
        }
        // |d/du logistic| <= theta/4.
        assert!(worst <= 10.0 / 4.0 + 1e-9);
    }

    #[test]
    fn mean_field_fast_paths_match_generic() {
        let types: Vec<f64> = (0..64).map(|p| (p as f64 + 0.5) / 64.0).collect();
        let xs: Vec<f64> = (0..64).map(|p| ((p * 37) % 11) as f64 - 5.0).collect();
        let fams = [
            InteractionFunction::new(Family::Constant(1.3)).unwrap(),
            InteractionFunction::new(Family::RowSeparable(TypeFn::affine(0.2, 1.0))).unwrap(),
            InteractionFunction::new(Family::ColumnSeparable(TypeFn::affine(-0.5, 2.0))).unwrap(),
            InteractionFunction::new(Family::BlockProduct { levels: 4 }).unwrap(),
            load_step_graphon("0.4\n1 2\n0 -1\n").unwrap(),
            InteractionFunction::new(Family::Constant(0.7)).unwrap().shifted(0.4),
        ];
        for g in &fams {
            let mut fast = vec![0.0; 64];
            g.mean_field_term(&types, &xs, &mut fast);
            for (p, &u) in types.iter().enumerate() {
                let brute: f64 = types
                    .iter()
                    .zip(&xs)
                    .map(|(&v, &x)| g.eval(u, v) * x)
                    .sum::<f64>()
                    / 64.0;
                assert_abs_diff_eq!(fast[p], brute, epsilon = 1e-10);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn discretize_preserves_symmetry(vals in proptest::collection::vec(-5.0f64..5.0, 3)) {
            // Symmetric 2x2 step kernel -> symmetric weight matrix.
            let g = InteractionFunction::new(Family::Step {
                breaks: vec![0.5],
                values: vec![vec![vals[0], vals[1]], vec![vals[1], vals[2]]],
            }).unwrap();
            let d = discretize(&g, 7).unwrap();
            for i in 0..7 {
                for j in 0..7 {
                    prop_assert_eq!(d.weights[[i, j]], d.weights[[j, i]]);
                }
            }
        }

        #[test]
        fn sup_distance_is_pseudometric_on_fixed_mesh(
            a in proptest::collection::vec(-3.0f64..3.0, 4),
            b in proptest::collection::vec(-3.0f64..3.0, 4),
            c in proptest::collection::vec(-3.0f64..3.0, 4),
        ) {
            let mk = |v: &[f64]| InteractionFunction::new(Family::Step {
                breaks: vec![0.5],
                values: vec![vec![v[0], v[1]], vec![v[2], v[3]]],
            }).unwrap();
            let (ga, gb, gc) = (mk(&a), mk(&b), mk(&c));
            let dab = sup_distance(&ga, &gb, 8).unwrap();
            let dba = sup_distance(&gb, &ga, 8).unwrap();
            let dac = sup_distance(&ga, &gc, 8).unwrap();
            let dcb = sup_distance(&gc, &gb, 8).unwrap();
            prop_assert!(dab >= 0.0);
            prop_assert_eq!(dab, dba);
            prop_assert!(dab <= dac + dcb + 1e-12);
        }
    }
}
