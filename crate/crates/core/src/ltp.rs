//! Long trapezoid analysis of finite subsets.
//!
//! For a subset `N` and a witness pair `u ≠ v` the trapezoid ratio is
//!
//! ```text
//! min over ordered x ≠ y in N of (d(x,u) + d(y,v)) / (d(x,y) + d(u,v))
//! ```
//!
//! and the LTP condition at level `ε` asks for a pair whose ratio is at least
//! `1 − ε`. The subset ratio `R(N)` is the best witness ratio capped at 1;
//! the modulus `1 − R(N)` is the supremum of the levels at which the
//! condition fails.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{PointId, PointedMetricSpace, Subset};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LtpReport {
    pub subset: Subset,
    pub ratio: Scalar,
    pub modulus: Scalar,
    pub witness: (PointId, PointId),
    /// Minimizing trapezoid for the witness; absent when `|N| < 2`.
    pub worst_pair: Option<(PointId, PointId)>,
}

/// Trapezoid ratio of one witness pair together with the minimizing `(x,y)`.
fn pair_ratio_with_argmin(
    space: &PointedMetricSpace,
    subset: &Subset,
    u: PointId,
    v: PointId,
) -> (Scalar, Option<(PointId, PointId)>) {
    let duv = space.d(u, v);
    let mut best: Option<(Scalar, (PointId, PointId))> = None;
    for &x in subset.ids() {
        for &y in subset.ids() {
            if x == y {
                continue;
            }
            let r = (space.d(x, u) + space.d(y, v)) / (space.d(x, y) + duv);
            if best.as_ref().is_none_or(|(b, _)| r.total_cmp(b).is_lt()) {
                best = Some((r, (x, y)));
            }
        }
    }
    match best {
        Some((r, xy)) => (r, Some(xy)),
        None => (Scalar::one(space.mode()), None),
    }
}

/// Worst trapezoid ratio for the witness pair `(u, v)`; `1` when `N` has
/// fewer than two points. Not capped, so it may exceed 1.
pub fn pair_ratio(space: &PointedMetricSpace, subset: &Subset, u: PointId, v: PointId) -> Result<Scalar> {
    space.check_point(u)?;
    space.check_point(v)?;
    if u == v {
        return Err(Error::EqualWitnesses { point: u });
    }
    Ok(pair_ratio_with_argmin(space, subset, u, v).0)
}

/// Maximizes the (capped) pair ratio over all ordered witness pairs of the
/// space. Ties go to the lexicographically smallest `(u, v)`.
pub fn ltp_ratio(space: &PointedMetricSpace, subset: &Subset) -> Result<LtpReport> {
    let n = space.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    for &p in subset.ids() {
        space.check_point(p)?;
    }
    let one = Scalar::one(space.mode());
    let witnesses: Vec<(PointId, PointId)> = space
        .points()
        .flat_map(|u| space.points().filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    let scored: Vec<(Scalar, Option<(PointId, PointId)>)> = witnesses
        .par_iter()
        .map(|&(u, v)| {
            let (r, xy) = pair_ratio_with_argmin(space, subset, u, v);
            (Scalar::min_of(r, one.clone()), xy)
        })
        .collect();

    let mut best = 0;
    for (k, (r, _)) in scored.iter().enumerate() {
        if r.total_cmp(&scored[best].0).is_gt() {
            best = k;
        }
    }
    let (ratio, worst_pair) = scored[best].clone();
    Ok(LtpReport {
        subset: subset.clone(),
        modulus: &one - &ratio,
        ratio,
        witness: witnesses[best],
        worst_pair,
    })
}

/// `1 − R(N)`.
pub fn ltp_modulus(space: &PointedMetricSpace, subset: &Subset) -> Result<Scalar> {
    Ok(ltp_ratio(space, subset)?.modulus)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairModulus {
    pub pair: (PointId, PointId),
    pub modulus: Scalar,
}

/// LTP modulus of every two-point subset `{a, b}`, `a < b`.
pub fn all_pairs_profile(space: &PointedMetricSpace) -> Result<Vec<PairModulus>> {
    let n = space.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    space
        .points()
        .flat_map(|a| space.points().skip(a.0 + 1).map(move |b| (a, b)))
        .map(|(a, b)| {
            let subset = Subset::new(space, [a, b])?;
            Ok(PairModulus { pair: (a, b), modulus: ltp_modulus(space, &subset)? })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RamseyReport {
    /// The couple `(x₀, y₀)` of `N` selected by pigeonhole.
    pub pair: (PointId, PointId),
    /// Largest set of points outside `N` all of whose pairs fail against
    /// `(x₀, y₀)`.
    pub homogeneous: Vec<PointId>,
    /// Points of `homogeneous` that fail together with `x₀`.
    pub excluded_x: Vec<PointId>,
    /// Points of `homogeneous` that fail together with `y₀`.
    pub excluded_y: Vec<PointId>,
    /// `{x₀, y₀} ∪ homogeneous ∖ (excluded_x ∪ excluded_y)`, sorted.
    pub subset: Vec<PointId>,
    pub eps: Scalar,
}

/// `(1−ε)(d(x,y)+d(u,v)) > min{d(x,u)+d(y,v), d(x,v)+d(y,u)}`.
pub fn two_point_failure(space: &PointedMetricSpace, eps: &Scalar, x: PointId, y: PointId, u: PointId, v: PointId) -> bool {
    let lhs = (Scalar::one(space.mode()) - eps) * (space.d(x, y) + space.d(u, v));
    let straight = space.d(x, u) + space.d(y, v);
    let crossed = space.d(x, v) + space.d(y, u);
    lhs.cmp_tol(&Scalar::min_of(straight, crossed)).is_gt()
}

impl RamseyReport {
    /// Re-checks the report by enumeration: the exclusion sets have at most
    /// one point and every pair of `subset` fails against `pair`.
    pub fn check(&self, space: &PointedMetricSpace) -> bool {
        let (x0, y0) = self.pair;
        self.excluded_x.len() <= 1
            && self.excluded_y.len() <= 1
            && self.subset.iter().all(|&u| {
                self.subset
                    .iter()
                    .filter(|&&v| v != u)
                    .all(|&v| two_point_failure(space, &self.eps, x0, y0, u, v))
            })
    }
}

/// Finite pigeonhole version of the extraction of a two-point LTP failure.
///
/// Requires that every pair `u ≠ v` outside `N` fails the trapezoid
/// inequality against some couple of `N` at level `eps`.
pub fn ramsey_extract(space: &PointedMetricSpace, subset: &Subset, eps: &Scalar) -> Result<RamseyReport> {
    let one = Scalar::one(space.mode());
    if !eps.is_positive_tol() || !eps.lt_tol(&one) {
        return Err(Error::BadLevel { eps: eps.clone() });
    }
    for &p in subset.ids() {
        space.check_point(p)?;
    }
    let outside: Vec<PointId> = space.points().filter(|&p| !subset.contains(p)).collect();
    let ids = subset.ids();
    let couples: Vec<(PointId, PointId)> = ids
        .iter()
        .enumerate()
        .flat_map(|(i, &x)| ids[i + 1..].iter().map(move |&y| (x, y)))
        .collect();

    for (i, &u) in outside.iter().enumerate() {
        for &v in &outside[i + 1..] {
            if !couples.iter().any(|&(x, y)| two_point_failure(space, eps, x, y, u, v)) {
                return Err(Error::HypothesisFails { u, v });
            }
        }
    }
    let Some(&first) = couples.first() else {
        return Err(Error::TooFewPoints { needed: 2, got: ids.len() });
    };

    let mut chosen = (first, Vec::new());
    for (k, &(x, y)) in couples.iter().enumerate() {
        let adjacent = |a: usize, b: usize| two_point_failure(space, eps, x, y, outside[a], outside[b]);
        let clique: Vec<PointId> = max_clique(outside.len(), adjacent).into_iter().map(|i| outside[i]).collect();
        if k == 0 || clique.len() > chosen.1.len() {
            chosen = ((x, y), clique);
        }
    }
    let ((x0, y0), homogeneous) = chosen;

    let factor = &one - eps;
    let excluded = |near: PointId, far: PointId| -> Vec<PointId> {
        homogeneous
            .iter()
            .copied()
            .filter(|&w| {
                let rhs = &factor * (space.d(x0, y0) + space.d(near, w));
                !space.d(far, w).lt_tol(&rhs)
            })
            .collect()
    };
    let excluded_x = excluded(x0, y0);
    let excluded_y = excluded(y0, x0);

    let mut kept: Vec<PointId> = homogeneous
        .iter()
        .copied()
        .filter(|w| !excluded_x.contains(w) && !excluded_y.contains(w))
        .chain([x0, y0])
        .collect();
    kept.sort();

    Ok(RamseyReport {
        pair: (x0, y0),
        homogeneous,
        excluded_x,
        excluded_y,
        subset: kept,
        eps: eps.clone(),
    })
}

/// Maximum clique by Bron–Kerbosch with pivoting. Among cliques of maximum
/// size the lexicographically smallest sorted index list wins.
fn max_clique(n: usize, adjacent: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let adj: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| a != b && adjacent(a, b)).collect()).collect();
    let mut best: Vec<usize> = Vec::new();

    fn expand(adj: &[Vec<bool>], r: &mut Vec<usize>, mut p: Vec<usize>, mut x: Vec<usize>, best: &mut Vec<usize>) {
        if p.is_empty() && x.is_empty() {
            let mut cand = r.clone();
            cand.sort_unstable();
            if cand.len() > best.len() || (cand.len() == best.len() && cand < *best) {
                *best = cand;
            }
            return;
        }
        if r.len() + p.len() < best.len() {
            return;
        }
        let pivot = p
            .iter()
            .chain(&x)
            .copied()
            .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
            .expect("p or x is non-empty");
        let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
        for v in candidates {
            r.push(v);
            let np = p.iter().copied().filter(|&w| adj[v][w]).collect();
            let nx = x.iter().copied().filter(|&w| adj[v][w]).collect();
            expand(adj, r, np, nx, best);
            r.pop();
            p.retain(|&w| w != v);
            x.push(v);
        }
    }

    let mut r = Vec::new();
    expand(&adj, &mut r, (0..n).collect(), Vec::new(), &mut best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{gen_4branch, gen_ejenega, gen_equilateral, gen_geometric_line};
    use crate::metric::scale_space;

    fn ejenega_n(m: &PointedMetricSpace) -> Subset {
        Subset::new(m, [m.base(), m.resolve("z").unwrap()]).unwrap()
    }

    #[test]
    fn ejenega_pair_ratio() {
        let m = gen_ejenega(2).unwrap();
        let r = pair_ratio(&m, &ejenega_n(&m), PointId(1), PointId(2)).unwrap();
        assert_eq!(r, Scalar::ratio(2, 3));
    }

    #[test]
    fn equilateral_fresh_witnesses_have_ratio_one() {
        let m = gen_equilateral(5, Scalar::int(3)).unwrap();
        let n = Subset::from_indices(&m, &[0, 1]).unwrap();
        assert_eq!(pair_ratio(&m, &n, PointId(2), PointId(3)).unwrap(), Scalar::int(1));
    }

    #[test]
    fn vacuous_subset() {
        let m = gen_ejenega(2).unwrap();
        let n = Subset::from_indices(&m, &[0]).unwrap();
        assert_eq!(pair_ratio(&m, &n, PointId(1), PointId(2)).unwrap(), Scalar::int(1));
        assert_eq!(
            pair_ratio(&m, &n, PointId(1), PointId(1)).unwrap_err(),
            Error::EqualWitnesses { point: PointId(1) }
        );
    }

    #[test]
    fn ejenega_modulus_is_one_third() {
        let m = gen_ejenega(2).unwrap();
        let rep = ltp_ratio(&m, &ejenega_n(&m)).unwrap();
        assert_eq!(rep.ratio, Scalar::ratio(2, 3));
        assert_eq!(rep.modulus, Scalar::ratio(1, 3));
        assert_eq!(rep.witness, (PointId(1), PointId(2)));
        assert_eq!(rep.worst_pair, Some((PointId(0), PointId(3))));
    }

    #[test]
    fn scaled_ejenega_keeps_its_modulus() {
        let m = scale_space(&gen_ejenega(2).unwrap(), &Scalar::ratio(3, 2)).unwrap();
        assert_eq!(*m.d(m.base(), PointId(3)), Scalar::int(3));
        assert_eq!(ltp_modulus(&m, &ejenega_n(&m)).unwrap(), Scalar::ratio(1, 3));
    }

    #[test]
    fn too_few_points() {
        let m = gen_equilateral(2, Scalar::int(1)).unwrap().with_base(PointId(0)).unwrap();
        let one = crate::metric::restrict(&m, &Subset::from_indices(&m, &[0]).unwrap()).unwrap();
        assert_eq!(
            ltp_ratio(&one, &Subset::all(&one)).unwrap_err(),
            Error::TooFewPoints { needed: 2, got: 1 }
        );
        assert!(all_pairs_profile(&one).is_err());
    }

    #[test]
    fn geometric_line_witness_bound() {
        for k in 1..=6 {
            let m = gen_geometric_line(k).unwrap();
            let n = Subset::from_indices(&m, &[0, 1]).unwrap();
            let top = PointId(m.len() - 1);
            let r = pair_ratio(&m, &n, top, PointId(0)).unwrap();
            let bound = Scalar::ratio(2, (1 << k) + 1);
            assert_eq!(Scalar::int(1) - r, bound);
            assert!(ltp_modulus(&m, &n).unwrap() <= bound);
        }
    }

    #[test]
    fn ejenega_profile() {
        let m = gen_ejenega(3).unwrap();
        let z = m.resolve("z").unwrap();
        for pm in all_pairs_profile(&m).unwrap() {
            if pm.pair == (m.base(), z) {
                assert_eq!(pm.modulus, Scalar::ratio(1, 3));
            } else {
                assert_eq!(pm.modulus, Scalar::int(0), "pair {:?}", pm.pair);
            }
        }
    }

    #[test]
    fn four_branch_profile_is_flat() {
        let m = gen_4branch(3).unwrap();
        assert!(all_pairs_profile(&m).unwrap().iter().all(|pm| pm.modulus == Scalar::int(0)));
    }

    #[test]
    fn ramsey_on_ejenega() {
        let m = gen_ejenega(6).unwrap();
        let n = ejenega_n(&m);
        let rep = ramsey_extract(&m, &n, &Scalar::ratio(1, 5)).unwrap();
        assert_eq!(rep.pair, (m.base(), m.resolve("z").unwrap()));
        assert!(rep.excluded_x.is_empty() && rep.excluded_y.is_empty());
        assert_eq!(rep.subset, m.points().collect::<Vec<_>>());
        assert!(rep.check(&m));
    }

    #[test]
    fn ramsey_hypothesis_fails_on_equilateral() {
        let m = gen_equilateral(5, Scalar::int(1)).unwrap();
        let n = Subset::from_indices(&m, &[0, 1]).unwrap();
        assert!(matches!(
            ramsey_extract(&m, &n, &Scalar::ratio(1, 5)),
            Err(Error::HypothesisFails { .. })
        ));
        assert!(matches!(ramsey_extract(&m, &n, &Scalar::int(1)), Err(Error::BadLevel { .. })));
    }

    #[test]
    fn clique_search() {
        // path 0-1-2 plus triangle 3-4-5
        let edges = [(0, 1), (1, 2), (3, 4), (4, 5), (3, 5)];
        let adj = |a: usize, b: usize| edges.contains(&(a.min(b), a.max(b)));
        assert_eq!(max_clique(6, adj), vec![3, 4, 5]);
        assert_eq!(max_clique(3, |_, _| false), vec![0]);
        assert_eq!(max_clique(0, |_, _| true), Vec::<usize>::new());
    }
}
