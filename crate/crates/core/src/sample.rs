//! Seeded random instances: metric spaces, maps, potentials and Bellman
//! problems.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::bellman::{Aggregator, BellmanProblem};
use crate::metric::{
    repair_triangle, FiniteMetricSpace, MultiValuedMap, PointSet, SingleValuedMap,
};

/// Shape of a random self-map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapFamily {
    /// Every point goes to one point.
    Constant,
    /// Images drawn from two or three points.
    FewValued,
    /// Images drawn uniformly from the whole space.
    Uniform,
}

/// Symmetric weights in `[0.1, 10)` closed under shortest paths.
pub fn random_space<R: Rng>(rng: &mut R, n: usize) -> FiniteMetricSpace {
    let mut w = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rng.random_range(0.1..10.0);
            w[i][j] = v;
            w[j][i] = v;
        }
    }
    let d = repair_triangle(&w).expect("random weights are valid");
    FiniteMetricSpace::from_matrix(d).expect("repaired matrix is a metric")
}

/// Distinct points on `[0, 10)`.
pub fn random_line_space<R: Rng>(rng: &mut R, n: usize) -> FiniteMetricSpace {
    let mut coords: Vec<f64> = Vec::with_capacity(n);
    while coords.len() < n {
        let c = (rng.random_range(0.0..10.0) * 1000.0_f64).round() / 1000.0;
        if !coords.contains(&c) {
            coords.push(c);
        }
    }
    FiniteMetricSpace::on_line(&coords).expect("distinct coordinates")
}

pub fn random_map<R: Rng>(
    rng: &mut R,
    space: &FiniteMetricSpace,
    family: MapFamily,
) -> SingleValuedMap {
    let n = space.len();
    let image = match family {
        MapFamily::Constant => vec![rng.random_range(0..n); n],
        MapFamily::FewValued => {
            let k = rng.random_range(2..=3).min(n);
            let targets: Vec<usize> = (0..k).map(|_| rng.random_range(0..n)).collect();
            (0..n).map(|_| *targets.choose(rng).unwrap()).collect()
        }
        MapFamily::Uniform => (0..n).map(|_| rng.random_range(0..n)).collect(),
    };
    SingleValuedMap::new(image, space).expect("indices in range")
}

/// A nonempty subset of `0..n` with about `density * n` members.
pub fn random_subset<R: Rng>(rng: &mut R, n: usize, density: f64) -> PointSet {
    let mut members: Vec<usize> = (0..n).filter(|_| rng.random_bool(density)).collect();
    if members.is_empty() {
        members.push(rng.random_range(0..n));
    }
    PointSet::new(members).expect("nonempty")
}

pub fn random_multimap<R: Rng>(
    rng: &mut R,
    space: &FiniteMetricSpace,
    density: f64,
) -> MultiValuedMap {
    let n = space.len();
    let images = (0..n).map(|_| random_subset(rng, n, density)).collect();
    MultiValuedMap::new(images, space).expect("indices in range")
}

/// `x -> {f(x), g(x)}`.
pub fn union_map(
    space: &FiniteMetricSpace,
    f: &SingleValuedMap,
    g: &SingleValuedMap,
) -> MultiValuedMap {
    let images = (0..space.len())
        .map(|x| PointSet::new([f.apply(x), g.apply(x)]).expect("nonempty"))
        .collect();
    MultiValuedMap::new(images, space).expect("indices in range")
}

/// Uniform values in `[0, scale)`.
pub fn random_potential<R: Rng>(rng: &mut R, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.0..scale)).collect()
}

/// `phi(x) = d(x, Tx) + phi(Tx) + slack(x)`, defined when every orbit of
/// `map` ends in a fixed point. Slack is zero with probability `tight`.
pub fn descent_potential<R: Rng>(
    rng: &mut R,
    space: &FiniteMetricSpace,
    map: &SingleValuedMap,
    tight: f64,
) -> Option<Vec<f64>> {
    let n = space.len();
    let slack: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_bool(tight) {
                0.0
            } else {
                rng.random_range(0.0..1.0)
            }
        })
        .collect();
    let mut phi: Vec<Option<f64>> = vec![None; n];
    for start in 0..n {
        let mut path = Vec::new();
        let mut x = start;
        while phi[x].is_none() {
            if path.contains(&x) {
                return None;
            }
            path.push(x);
            let tx = map.apply(x);
            if tx == x {
                phi[x] = Some(slack[x]);
                path.pop();
                break;
            }
            x = tx;
        }
        while let Some(y) = path.pop() {
            let ty = map.apply(y);
            phi[y] = Some(space.d(y, ty) + phi[ty].unwrap() + slack[y]);
        }
    }
    phi.into_iter().collect()
}

/// An affine problem `c + beta * t` with rewards in `[-10, 10)` and offsets
/// in `[-1, 1)`.
pub fn random_affine_problem<R: Rng>(
    rng: &mut R,
    max_states: usize,
    max_decisions: usize,
    max_beta: f64,
) -> BellmanProblem {
    let w = rng.random_range(1..=max_states);
    let d = rng.random_range(1..=max_decisions);
    let table = |rng: &mut R, lo: f64, hi: f64| -> Vec<Vec<f64>> {
        (0..w)
            .map(|_| (0..d).map(|_| rng.random_range(lo..hi)).collect())
            .collect()
    };
    let reward = table(rng, -10.0, 10.0);
    let c = table(rng, -1.0, 1.0);
    let transition = (0..w)
        .map(|_| (0..d).map(|_| rng.random_range(0..w)).collect())
        .collect();
    let beta = rng.random_range(0.0..=max_beta);
    BellmanProblem::new(
        (0..w).map(|i| format!("w{i}")).collect(),
        (0..d).map(|i| format!("y{i}")).collect(),
        reward,
        transition,
        Aggregator::Affine { c, beta },
    )
    .expect("well-formed random problem")
}
