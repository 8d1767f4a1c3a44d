//! Finite metric spaces, point sets, self-maps and the Hausdorff metric.
//!
//! A finite metric space is trivially complete and every nonempty subset is
//! closed and bounded, so the family of nonempty subsets plays the role of
//! `CB(X)` throughout the crate.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Absolute tolerance used for metric-axiom checks.
pub const AXIOM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    ZeroDiagonal,
    Symmetry,
    Positivity,
    Triangle,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Axiom::ZeroDiagonal => "zero-diagonal",
            Axiom::Symmetry => "symmetry",
            Axiom::Positivity => "positivity",
            Axiom::Triangle => "triangle",
        };
        f.write_str(name)
    }
}

/// One failed axiom instance.
///
/// Witness layout: `[i]` for the diagonal, `[i, j]` for symmetry and
/// positivity, and `[i, j, k]` for the triangle inequality meaning
/// `dist[i][j] > dist[i][k] + dist[k][j]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AxiomReport {
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn is_metric(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, axiom: Axiom, witness: &[usize]) -> bool {
        self.violations
            .iter()
            .any(|v| v.axiom == axiom && v.witness == witness)
    }
}

fn validate_square(dist: &[Vec<f64>]) -> Result<usize> {
    let n = dist.len();
    if n == 0 {
        return invalid("distance matrix is empty");
    }
    for (i, row) in dist.iter().enumerate() {
        if row.len() != n {
            return invalid(format!(
                "distance matrix is not square: row {i} has {} entries, expected {n}",
                row.len()
            ));
        }
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return invalid(format!("non-finite distance at ({i}, {j})"));
        }
    }
    Ok(n)
}

/// Checks the four metric axioms on a square matrix of finite reals.
pub fn check_metric_axioms(dist: &[Vec<f64>]) -> Result<AxiomReport> {
    let n = validate_square(dist)?;
    let mut violations = Vec::new();

    for (i, row) in dist.iter().enumerate() {
        if row[i].abs() > AXIOM_TOL {
            violations.push(Violation {
                axiom: Axiom::ZeroDiagonal,
                witness: vec![i],
            });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (dist[i][j] - dist[j][i]).abs() > AXIOM_TOL {
                violations.push(Violation {
                    axiom: Axiom::Symmetry,
                    witness: vec![i, j],
                });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && dist[i][j] <= 0.0 {
                violations.push(Violation {
                    axiom: Axiom::Positivity,
                    witness: vec![i, j],
                });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if dist[i][j] > dist[i][k] + dist[k][j] + AXIOM_TOL {
                    violations.push(Violation {
                        axiom: Axiom::Triangle,
                        witness: vec![i, j, k],
                    });
                }
            }
        }
    }
    Ok(AxiomReport { violations })
}

/// Replaces every distance by the length of the shortest path between its
/// endpoints.
///
/// Relaxation sweeps are repeated until nothing changes, so the result
/// satisfies the triangle inequality exactly in floating point and a second
/// application returns it unchanged.
pub fn repair_triangle(dist: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = validate_square(dist)?;
    for i in 0..n {
        if dist[i][i] != 0.0 {
            return invalid(format!("nonzero diagonal entry at ({i}, {i})"));
        }
        for j in 0..n {
            if dist[i][j] != dist[j][i] {
                return invalid(format!("asymmetric entries at ({i}, {j})"));
            }
            if i != j && dist[i][j] <= 0.0 {
                return invalid(format!("non-positive off-diagonal entry at ({i}, {j})"));
            }
        }
    }

    let mut d = dist.to_vec();
    loop {
        let mut changed = false;
        for k in 0..n {
            for i in 0..n {
                let dik = d[i][k];
                for j in 0..n {
                    let via = dik + d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return Ok(d);
        }
    }
}

/// A finite set of labelled points with a validated distance matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<f64>>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl FiniteMetricSpace {
    pub fn new(labels: Vec<String>, dist: Vec<Vec<f64>>) -> Result<Self> {
        let report = check_metric_axioms(&dist)?;
        if labels.len() != dist.len() {
            return invalid(format!(
                "{} labels for a {}-point distance matrix",
                labels.len(),
                dist.len()
            ));
        }
        if !report.is_metric() {
            return Err(Error::NotAMetric(report));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return invalid(format!("duplicate point label {label:?}"));
            }
        }
        Ok(Self {
            labels,
            dist,
            index,
        })
    }

    /// Builds a space whose labels are the point indices.
    pub fn from_matrix(dist: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (0..dist.len()).map(|i| i.to_string()).collect();
        Self::new(labels, dist)
    }

    /// Points on the real line with `|a - b|` distances, labelled by their
    /// coordinate.
    pub fn on_line(coords: &[f64]) -> Result<Self> {
        let labels = coords.iter().map(|c| format!("{c}")).collect();
        let dist = coords
            .iter()
            .map(|a| coords.iter().map(|b| (a - b).abs()).collect())
            .collect();
        Self::new(labels, dist)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.dist
    }

    /// Sorted distinct positive pairwise distances.
    pub fn distinct_distances(&self) -> Vec<f64> {
        let n = self.len();
        let mut out: Vec<f64> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| self.dist[i][j])
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    pub(crate) fn check_point(&self, x: usize) -> Result<()> {
        if x < self.len() {
            Ok(())
        } else {
            invalid(format!(
                "point index {x} out of range for {} points",
                self.len()
            ))
        }
    }

    pub(crate) fn check_set(&self, set: &PointSet) -> Result<()> {
        if set.is_empty() {
            return invalid("point set is empty");
        }
        set.iter().try_for_each(|x| self.check_point(x))
    }
}

/// A nonempty set of point indices, stored sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct PointSet {
    members: Vec<usize>,
}

impl PointSet {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        if members.is_empty() {
            return invalid("point set is empty");
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self { members })
    }

    pub fn singleton(x: usize) -> Self {
        Self { members: vec![x] }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// `T: X -> X`, stored as an image table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct SingleValuedMap {
    image: Vec<usize>,
}

impl SingleValuedMap {
    pub fn new(image: Vec<usize>, space: &FiniteMetricSpace) -> Result<Self> {
        if image.len() != space.len() {
            return invalid(format!(
                "map has {} images for {} points",
                image.len(),
                space.len()
            ));
        }
        image.iter().try_for_each(|&y| space.check_point(y))?;
        Ok(Self { image })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            image: (0..n).collect(),
        }
    }

    pub fn constant(n: usize, c: usize) -> Self {
        Self { image: vec![c; n] }
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.image
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }
}

/// `T: X -> CB(X)`; every image is a nonempty point set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct MultiValuedMap {
    images: Vec<PointSet>,
}

impl MultiValuedMap {
    pub fn new(images: Vec<PointSet>, space: &FiniteMetricSpace) -> Result<Self> {
        if images.len() != space.len() {
            return invalid(format!(
                "map has {} image sets for {} points",
                images.len(),
                space.len()
            ));
        }
        images.iter().try_for_each(|s| space.check_set(s))?;
        Ok(Self { images })
    }

    pub fn image(&self, x: usize) -> &PointSet {
        &self.images[x]
    }

    pub fn images(&self) -> &[PointSet] {
        &self.images
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }
}

impl From<&SingleValuedMap> for MultiValuedMap {
    fn from(map: &SingleValuedMap) -> Self {
        Self {
            images: map
                .images()
                .iter()
                .map(|&y| PointSet::singleton(y))
                .collect(),
        }
    }
}

/// `d(x, A) = min_{a in A} d(x, a)`.
pub fn point_to_set_distance(space: &FiniteMetricSpace, x: usize, set: &PointSet) -> Result<f64> {
    space.check_point(x)?;
    space.check_set(set)?;
    Ok(min_distance(space, x, set))
}

pub(crate) fn min_distance(space: &FiniteMetricSpace, x: usize, set: &PointSet) -> f64 {
    set.iter()
        .map(|a| space.d(x, a))
        .fold(f64::INFINITY, f64::min)
}

/// The two directed components of a Hausdorff distance and their maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HausdorffParts {
    /// `sup_{a in A} d(a, B)`
    pub a_to_b: f64,
    /// `sup_{b in B} d(b, A)`
    pub b_to_a: f64,
    pub distance: f64,
}

pub fn hausdorff_parts(
    space: &FiniteMetricSpace,
    a: &PointSet,
    b: &PointSet,
) -> Result<HausdorffParts> {
    space.check_set(a)?;
    space.check_set(b)?;
    Ok(hausdorff_unchecked(space, a, b))
}

pub(crate) fn hausdorff_unchecked(
    space: &FiniteMetricSpace,
    a: &PointSet,
    b: &PointSet,
) -> HausdorffParts {
    let directed = |from: &PointSet, to: &PointSet| {
        from.iter()
            .map(|x| min_distance(space, x, to))
            .fold(0.0, f64::max)
    };
    let a_to_b = directed(a, b);
    let b_to_a = directed(b, a);
    HausdorffParts {
        a_to_b,
        b_to_a,
        distance: a_to_b.max(b_to_a),
    }
}

/// `H(A, B) = max{ sup_{x in B} d(x, A), sup_{x in A} d(x, B) }`.
pub fn hausdorff_distance(space: &FiniteMetricSpace, a: &PointSet, b: &PointSet) -> Result<f64> {
    hausdorff_parts(space, a, b).map(|p| p.distance)
}
