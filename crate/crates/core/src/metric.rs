//! Finite pointed metric spaces.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar};

/// Index of a point inside its space. Indices are dense, `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub usize);

impl PointId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for PointId {
    fn from(i: usize) -> Self {
        PointId(i)
    }
}

/// Validated finite metric space with a distinguished base point.
///
/// Immutable once built; every constructor goes through [`validate_metric`].
#[derive(Debug, Clone, PartialEq)]
pub struct PointedMetricSpace {
    names: Vec<String>,
    base: PointId,
    dist: Vec<Scalar>,
    mode: Mode,
}

impl PointedMetricSpace {
    /// Builds a space from display names and a full distance matrix.
    pub fn new(names: Vec<String>, dist: Vec<Vec<Scalar>>, base: usize) -> Result<Self> {
        let n = dist.len();
        if names.len() != n {
            return Err(Error::InvalidParameter {
                reason: format!("{} names for {} points", names.len(), n),
            });
        }
        let mut space = validate_metric(dist, PointId(base))?;
        space.names = names;
        Ok(space)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn base(&self) -> PointId {
        self.base
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, p: PointId) -> &str {
        &self.names[p.0]
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> + Clone {
        (0..self.len()).map(PointId)
    }

    /// Distance between two points.
    #[inline]
    pub fn d(&self, a: PointId, b: PointId) -> &Scalar {
        &self.dist[a.0 * self.len() + b.0]
    }

    pub fn row(&self, a: PointId) -> &[Scalar] {
        let n = self.len();
        &self.dist[a.0 * n..(a.0 + 1) * n]
    }

    pub fn matrix(&self) -> Vec<Vec<Scalar>> {
        self.points().map(|p| self.row(p).to_vec()).collect()
    }

    pub fn contains(&self, p: PointId) -> bool {
        p.0 < self.len()
    }

    pub fn check_point(&self, p: PointId) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::InvalidPoint { point: p.0, size: self.len() })
        }
    }

    /// Looks a point up by display name first, then as `@index` or a bare
    /// index.
    pub fn resolve(&self, token: &str) -> Option<PointId> {
        let token = token.trim();
        if let Some(i) = self.names.iter().position(|n| n == token) {
            return Some(PointId(i));
        }
        let digits = token.strip_prefix('@').unwrap_or(token);
        digits.parse::<usize>().ok().filter(|&i| i < self.len()).map(PointId)
    }

    /// Same distances with another point as base.
    pub fn with_base(&self, base: PointId) -> Result<Self> {
        self.check_point(base)?;
        Ok(PointedMetricSpace { base, ..self.clone() })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.len() {
            return Err(Error::InvalidParameter {
                reason: format!("{} names for {} points", names.len(), self.len()),
            });
        }
        self.names = names;
        Ok(self)
    }

    /// Converts every distance to binary64.
    pub fn to_float(&self) -> Self {
        PointedMetricSpace {
            dist: self.dist.iter().map(|x| x.in_mode(Mode::Float)).collect(),
            mode: Mode::Float,
            ..self.clone()
        }
    }
}

/// Ordered list of distinct points of a host space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Subset(Vec<PointId>);

impl Subset {
    pub fn new(space: &PointedMetricSpace, ids: impl IntoIterator<Item = PointId>) -> Result<Self> {
        let ids: Vec<PointId> = ids.into_iter().collect();
        let mut seen = vec![false; space.len()];
        for &p in &ids {
            space.check_point(p)?;
            if std::mem::replace(&mut seen[p.0], true) {
                return Err(Error::DuplicatePoint { point: p });
            }
        }
        Ok(Subset(ids))
    }

    pub fn from_indices(space: &PointedMetricSpace, ids: &[usize]) -> Result<Self> {
        Subset::new(space, ids.iter().map(|&i| PointId(i)))
    }

    pub fn all(space: &PointedMetricSpace) -> Self {
        Subset(space.points().collect())
    }

    pub fn ids(&self) -> &[PointId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: PointId) -> bool {
        self.0.contains(&p)
    }
}

/// Validates a full distance matrix and returns the space it defines.
///
/// Axioms are checked in the order diagonal, symmetry, positivity, triangle
/// inequality; the first violation found (scanning indices in increasing
/// order) is reported with its witnesses. A matrix containing any float is
/// treated as a float-mode space.
pub fn validate_metric(dist: Vec<Vec<Scalar>>, base: PointId) -> Result<PointedMetricSpace> {
    let n = dist.len();
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    for (row, r) in dist.iter().enumerate() {
        if r.len() != n {
            return Err(Error::NotSquare { rows: n, row, len: r.len() });
        }
    }
    if base.0 >= n {
        return Err(Error::InvalidPoint { point: base.0, size: n });
    }
    let mode = if dist.iter().flatten().all(Scalar::is_exact) { Mode::Exact } else { Mode::Float };
    let flat: Vec<Scalar> = dist.into_iter().flatten().map(|x| x.in_mode(mode)).collect();
    if let Some(bad) = flat.iter().find(|x| !x.is_finite()) {
        return Err(Error::BadScalar { value: bad.to_string(), mode });
    }
    let at = |a: usize, b: usize| &flat[a * n + b];

    for a in 0..n {
        if !at(a, a).is_zero_tol() {
            return Err(Error::NonzeroDiagonal { a: PointId(a) });
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            if !at(a, b).eq_tol(at(b, a)) {
                return Err(Error::Asymmetric { a: PointId(a), b: PointId(b) });
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            if a != b && !at(a, b).is_positive_tol() {
                return Err(Error::NonpositiveOffDiagonal { a: PointId(a), b: PointId(b) });
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if at(a, c).cmp_tol(&(at(a, b) + at(b, c))).is_gt() {
                    return Err(Error::TriangleViolation { a: PointId(a), b: PointId(b), c: PointId(c) });
                }
            }
        }
    }

    let mut flat = flat;
    if mode == Mode::Float {
        // symmetrize and pin the diagonal so later code can rely on exact
        // symmetry even when the input was only tolerance-symmetric
        for a in 0..n {
            flat[a * n + a] = Scalar::Float(0.0);
            for b in a + 1..n {
                let v = flat[a * n + b].clone();
                flat[b * n + a] = v;
            }
        }
    }
    Ok(PointedMetricSpace { names: (0..n).map(|i| i.to_string()).collect(), base, dist: flat, mode })
}

/// Multiplies every distance by `s > 0`.
pub fn scale_space(space: &PointedMetricSpace, s: &Scalar) -> Result<PointedMetricSpace> {
    if !s.is_positive_tol() || !s.is_finite() {
        return Err(Error::NonpositiveScale { scale: s.clone() });
    }
    let mode = space.mode.join(s.mode());
    Ok(PointedMetricSpace {
        dist: space.dist.iter().map(|x| (x * s).in_mode(mode)).collect(),
        mode,
        ..space.clone()
    })
}

/// Induced subspace on `subset`, in the subset's order. The base point must
/// belong to the subset.
pub fn restrict(space: &PointedMetricSpace, subset: &Subset) -> Result<PointedMetricSpace> {
    let base = subset
        .ids()
        .iter()
        .position(|&p| p == space.base)
        .ok_or(Error::BaseNotInSubset { base: space.base })?;
    let ids = subset.ids();
    let m = ids.len();
    let mut dist = Vec::with_capacity(m * m);
    for &a in ids {
        for &b in ids {
            dist.push(space.d(a, b).clone());
        }
    }
    Ok(PointedMetricSpace {
        names: ids.iter().map(|&p| space.name(p).to_string()).collect(),
        base: PointId(base),
        dist,
        mode: space.mode,
    })
}

/// Glues two pointed spaces at their base points with the ℓ₁ rule
/// `d(x,y) = d(x,0) + d(0,y)` across the parts.
///
/// The points of `left` keep their indices; the non-base points of `right`
/// follow in order. See [`L1Sum`] for the index maps.
pub fn l1_sum(left: &PointedMetricSpace, right: &PointedMetricSpace) -> Result<L1Sum> {
    if left.mode != right.mode {
        return Err(Error::ModeMismatch { left: left.mode, right: right.mode });
    }
    let n1 = left.len();
    let right_ids: Vec<PointId> = right.points().filter(|&p| p != right.base).collect();
    let n = n1 + right_ids.len();

    // position in the glued space of each point of `right`
    let mut right_map = vec![left.base; right.len()];
    for (k, &p) in right_ids.iter().enumerate() {
        right_map[p.0] = PointId(n1 + k);
    }

    let mut names: Vec<String> = left.names.clone();
    for &p in &right_ids {
        let name = right.name(p);
        if names.iter().any(|n| n == name) {
            names.push(format!("{name}'"));
        } else {
            names.push(name.to_string());
        }
    }

    let side = |i: usize| -> (bool, PointId) {
        if i < n1 {
            (true, PointId(i))
        } else {
            (false, right_ids[i - n1])
        }
    };
    let mut dist = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let v = match (side(i), side(j)) {
                ((true, a), (true, b)) => left.d(a, b).clone(),
                ((false, a), (false, b)) => right.d(a, b).clone(),
                ((true, a), (false, b)) => left.d(a, left.base) + right.d(right.base, b),
                ((false, a), (true, b)) => right.d(a, right.base) + left.d(left.base, b),
            };
            dist.push(v);
        }
    }
    let matrix: Vec<Vec<Scalar>> = dist.chunks(n).map(<[Scalar]>::to_vec).collect();
    let space = PointedMetricSpace::new(names, matrix, left.base.0)?;
    Ok(L1Sum { space, left_map: left.points().collect(), right_map })
}

/// Result of [`l1_sum`]: the glued space plus where each part landed.
#[derive(Debug, Clone)]
pub struct L1Sum {
    pub space: PointedMetricSpace,
    /// `left_map[i]` is the glued index of point `i` of the left part.
    pub left_map: Vec<PointId>,
    /// `right_map[i]` is the glued index of point `i` of the right part; the
    /// right base maps to the shared base.
    pub right_map: Vec<PointId>,
}

/// Smallest distance between distinct points.
pub fn min_separation(space: &PointedMetricSpace) -> Result<Scalar> {
    off_diagonal_extreme(space, |cand, best| cand.total_cmp(best).is_lt())
}

/// Largest distance between two points; `0` for a single point.
pub fn diameter(space: &PointedMetricSpace) -> Scalar {
    off_diagonal_extreme(space, |cand, best| cand.total_cmp(best).is_gt())
        .unwrap_or_else(|_| Scalar::zero(space.mode))
}

fn off_diagonal_extreme(
    space: &PointedMetricSpace,
    better: impl Fn(&Scalar, &Scalar) -> bool,
) -> Result<Scalar> {
    let n = space.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let mut best = space.d(PointId(0), PointId(1)).clone();
    for a in space.points() {
        for b in space.points().skip(a.0 + 1) {
            let cand = space.d(a, b);
            if better(cand, &best) {
                best = cand.clone();
            }
        }
    }
    Ok(best)
}
