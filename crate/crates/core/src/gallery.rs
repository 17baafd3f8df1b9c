//! Generators for the example spaces, ℓ_p point configurations and the
//! distortion of bijections between spaces.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{PointId, PointedMetricSpace};
use crate::scalar::Scalar;

fn build(names: Vec<String>, base: usize, d: impl Fn(usize, usize) -> Scalar) -> Result<PointedMetricSpace> {
    let n = names.len();
    let dist = (0..n).map(|i| (0..n).map(|j| if i == j { Scalar::int(0) } else { d(i, j) }).collect()).collect();
    PointedMetricSpace::new(names, dist, base)
}

fn require(got: usize, min: usize) -> Result<()> {
    if got < min {
        Err(Error::ZeroCount { min, got })
    } else {
        Ok(())
    }
}

fn numbered(prefix: &str, k: usize) -> impl Iterator<Item = String> + '_ {
    (1..=k).map(move |i| format!("{prefix}{i}"))
}

/// `{0, x1..xk, z}`: every distance is 1 except `d(0,z) = 2`.
pub fn gen_ejenega(k: usize) -> Result<PointedMetricSpace> {
    require(k, 1)?;
    let z = k + 1;
    let mut names = vec!["0".to_string()];
    names.extend(numbered("x", k));
    names.push("z".into());
    build(names, 0, |i, j| if (i, j) == (0, z) || (i, j) == (z, 0) { Scalar::int(2) } else { Scalar::int(1) })
}

/// Shortest-path metric of the graph with edges `{0,xi}` and `{xi,z}` of
/// length 1, on points `{0, z, x1..xk}`.
pub fn gen_graph_m(k: usize) -> Result<PointedMetricSpace> {
    require(k, 2)?;
    let mut names = vec!["0".to_string(), "z".to_string()];
    names.extend(numbered("x", k));
    // 0 and z are both at distance 1 from every x and 2 from each other;
    // two x's are 2 apart through 0 or z
    build(names, 0, |i, j| if i >= 2 && j >= 2 || i + j == 1 { Scalar::int(2) } else { Scalar::int(1) })
}

/// The four-branch space on `{alpha, beta, 0, z, x1..xk}` (base `0`).
///
/// ```text
/// d(0,xn) = d(xn,z) = 1, d(0,z) = 2, d(alpha,0) = d(beta,0) = 1,
/// d(alpha,beta) = 2, d(alpha,xn) = d(beta,xn) = 2,
/// d(alpha,z) = d(beta,z) = 3, d(xn,xm) = 1
/// ```
pub fn gen_4branch(k: usize) -> Result<PointedMetricSpace> {
    require(k, 2)?;
    let mut names: Vec<String> = ["alpha", "beta", "0", "z"].iter().map(|s| s.to_string()).collect();
    names.extend(numbered("x", k));
    let class = |i: usize| match i {
        0 | 1 => 'a',
        2 => 'o',
        3 => 'z',
        _ => 'x',
    };
    build(names, 2, |i, j| {
        let d = match (class(i), class(j)) {
            ('o', 'x') | ('x', 'o') | ('z', 'x') | ('x', 'z') | ('x', 'x') => 1,
            ('o', 'z') | ('z', 'o') => 2,
            ('a', 'o') | ('o', 'a') => 1,
            ('a', 'a') | ('a', 'x') | ('x', 'a') => 2,
            ('a', 'z') | ('z', 'a') => 3,
            _ => unreachable!("diagonal handled by build"),
        };
        Scalar::int(d)
    })
}

/// `n` points pairwise at distance `c`.
pub fn gen_equilateral(n: usize, c: Scalar) -> Result<PointedMetricSpace> {
    require(n, 2)?;
    if !c.is_positive_tol() {
        return Err(Error::InvalidParameter { reason: format!("edge length {c} must be positive") });
    }
    let mut names = vec!["0".to_string()];
    names.extend(numbered("p", n - 1));
    build(names, 0, |_, _| c.clone())
}

/// Real-line metric on positions given as exact values; base is the first.
pub fn gen_line(positions: &[Scalar]) -> Result<PointedMetricSpace> {
    let names = positions.iter().map(Scalar::to_string).collect();
    build(names, 0, |i, j| (&positions[i] - &positions[j]).abs())
}

/// `{0, 1, 2, 4, …, 2^k}` on the real line.
pub fn gen_geometric_line(k: usize) -> Result<PointedMetricSpace> {
    require(k, 1)?;
    let mut pos = vec![Scalar::int(0)];
    pos.extend((0..=k).map(|j| Scalar::int(1 << j)));
    gen_line(&pos)
}

/// `{0} ∪ {3 + 2^(−j) : 0 ≤ j ≤ k}` on the real line.
pub fn gen_dyadic_cluster(k: usize) -> Result<PointedMetricSpace> {
    require(k, 1)?;
    let mut pos = vec![Scalar::int(0)];
    pos.extend((0..=k).map(|j| Scalar::int(3) + Scalar::ratio(1, 1 << j)));
    gen_line(&pos)
}

/// A finite tree with positive edge weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedTree {
    pub names: Vec<String>,
    pub edges: Vec<(usize, usize, Scalar)>,
}

/// Shortest-path metric of a [`WeightedTree`], with nearest-point maps onto
/// convex hulls of vertex sets.
#[derive(Debug, Clone)]
pub struct TreeMetric {
    tree: WeightedTree,
    dist: Vec<Vec<Scalar>>,
}

impl TreeMetric {
    pub fn new(tree: WeightedTree) -> Result<Self> {
        let n = tree.names.len();
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        if tree.edges.len() != n - 1 {
            return Err(Error::InvalidParameter {
                reason: format!("a tree on {n} vertices has {} edges, got {}", n - 1, tree.edges.len()),
            });
        }
        let mut adj: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); n];
        for (a, b, w) in &tree.edges {
            if *a >= n || *b >= n || a == b {
                return Err(Error::InvalidParameter { reason: format!("bad edge ({a},{b})") });
            }
            if !w.is_positive_tol() {
                return Err(Error::InvalidParameter { reason: format!("edge ({a},{b}) has weight {w}") });
            }
            adj[*a].push((*b, w.clone()));
            adj[*b].push((*a, w.clone()));
        }
        let mut dist = Vec::with_capacity(n);
        for s in 0..n {
            let mut row: Vec<Option<Scalar>> = vec![None; n];
            row[s] = Some(Scalar::int(0));
            let mut stack = vec![s];
            while let Some(p) = stack.pop() {
                let dp = row[p].clone().expect("visited");
                for (q, w) in &adj[p] {
                    if row[*q].is_none() {
                        row[*q] = Some(&dp + w);
                        stack.push(*q);
                    }
                }
            }
            let row: Option<Vec<Scalar>> = row.into_iter().collect();
            dist.push(row.ok_or_else(|| Error::InvalidParameter { reason: "tree is not connected".into() })?);
        }
        Ok(TreeMetric { tree, dist })
    }

    pub fn d(&self, a: usize, b: usize) -> &Scalar {
        &self.dist[a][b]
    }

    /// `c` lies on the geodesic between `a` and `b`.
    pub fn on_path(&self, a: usize, b: usize, c: usize) -> bool {
        *self.d(a, b) == self.d(a, c) + self.d(c, b)
    }

    /// Vertices of the convex hull (union of geodesics) of `set`.
    pub fn hull(&self, set: &[usize]) -> Vec<usize> {
        (0..self.tree.names.len())
            .filter(|&c| set.iter().any(|&a| set.iter().any(|&b| self.on_path(a, b, c))))
            .collect()
    }

    /// Nearest hull vertex to `v`.
    pub fn projection(&self, set: &[usize], v: usize) -> usize {
        self.hull(set)
            .into_iter()
            .min_by(|&a, &b| self.d(v, a).total_cmp(self.d(v, b)))
            .expect("hull of a non-empty set is non-empty")
    }

    /// The induced metric on `marked` (distinct vertices, first one is the
    /// base).
    pub fn space(&self, marked: &[usize]) -> Result<PointedMetricSpace> {
        let n = self.tree.names.len();
        if marked.is_empty() {
            return Err(Error::EmptySpace);
        }
        for (i, &m) in marked.iter().enumerate() {
            if m >= n {
                return Err(Error::InvalidPoint { point: m, size: n });
            }
            if marked[..i].contains(&m) {
                return Err(Error::DuplicatePoint { point: PointId(m) });
            }
        }
        let names = marked.iter().map(|&m| self.tree.names[m].clone()).collect();
        build(names, 0, |i, j| self.d(marked[i], marked[j]).clone())
    }
}

/// Tree metric on the marked vertices of a weighted tree.
pub fn gen_tree_metric(tree: WeightedTree, marked: &[usize]) -> Result<PointedMetricSpace> {
    TreeMetric::new(tree)?.space(marked)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exponent {
    One,
    P(f64),
    Infinity,
}

/// Finitely supported vectors of a sequence space, with the induced metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointConfiguration {
    pub exponent: Exponent,
    pub names: Vec<String>,
    pub coordinates: Vec<Vec<Scalar>>,
}

impl PointConfiguration {
    fn distance(&self, a: &[Scalar], b: &[Scalar]) -> Scalar {
        let len = a.len().max(b.len());
        let zero = Scalar::int(0);
        let diffs = (0..len).map(|i| (a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero)).abs());
        match self.exponent {
            Exponent::One => diffs.fold(Scalar::int(0), |acc, x| acc + x),
            Exponent::Infinity => diffs.fold(Scalar::int(0), Scalar::max_of),
            Exponent::P(p) => {
                let s: f64 = diffs.map(|x| x.to_f64().powf(p)).sum();
                Scalar::float(s.powf(1.0 / p))
            }
        }
    }

    /// The induced space, base at the first point. Exact only for ℓ₁/ℓ∞
    /// with rational coordinates.
    pub fn to_space(&self) -> Result<PointedMetricSpace> {
        let mut names = self.names.clone();
        if names.len() != self.coordinates.len() {
            names = (0..self.coordinates.len()).map(|i| i.to_string()).collect();
        }
        let space = build(names, 0, |i, j| self.distance(&self.coordinates[i], &self.coordinates[j]))?;
        Ok(match self.exponent {
            Exponent::P(_) => space.to_float(),
            _ => space,
        })
    }
}

/// A bijection between two spaces of the same size: source point `i` maps to
/// target point `mapping[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bijection {
    pub source: PointedMetricSpace,
    pub target: PointedMetricSpace,
    pub mapping: Vec<PointId>,
}

impl Bijection {
    pub fn new(source: PointedMetricSpace, target: PointedMetricSpace, mapping: Vec<PointId>) -> Result<Self> {
        if source.len() != target.len() {
            return Err(Error::SizeMismatch { source_size: source.len(), target_size: target.len() });
        }
        if mapping.len() != source.len() {
            return Err(Error::NotABijection { reason: format!("{} images for {} points", mapping.len(), source.len()) });
        }
        let mut hit = vec![false; target.len()];
        for &t in &mapping {
            target.check_point(t)?;
            if std::mem::replace(&mut hit[t.0], true) {
                return Err(Error::NotABijection { reason: format!("point {t} is hit twice") });
            }
        }
        Ok(Bijection { source, target, mapping })
    }

    pub fn identity(source: PointedMetricSpace, target: PointedMetricSpace) -> Result<Self> {
        let mapping = source.points().collect();
        Bijection::new(source, target, mapping)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    /// `max d_target(b(x), b(y)) / d_source(x, y)`.
    pub expansion: Scalar,
    /// `max d_source(x, y) / d_target(b(x), b(y))`.
    pub contraction: Scalar,
    /// `expansion · contraction`.
    pub distortion: Scalar,
}

/// Lipschitz constants of a bijection and its inverse, and their product.
pub fn distortion(b: &Bijection) -> Result<DistortionReport> {
    let n = b.source.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let mode = b.source.mode().join(b.target.mode());
    let mut expansion = Scalar::zero(mode);
    let mut contraction = Scalar::zero(mode);
    for x in b.source.points() {
        for y in b.source.points().skip(x.0 + 1) {
            let ds = b.source.d(x, y).in_mode(mode);
            let dt = b.target.d(b.mapping[x.0], b.mapping[y.0]).in_mode(mode);
            expansion = Scalar::max_of(expansion, &dt / &ds);
            contraction = Scalar::max_of(contraction, &ds / &dt);
        }
    }
    let distortion = &expansion * &contraction;
    Ok(DistortionReport { expansion, contraction, distortion })
}

/// The image of [`gen_graph_m`] in ℓ_p: `0 ↦ −e₁`, `z ↦ e₁`,
/// `xᵢ ↦ 2^((p−1)/p) e_{i+1}`, together with the bijection from the graph.
pub fn gen_ellp_embed(p: f64, k: usize) -> Result<(PointConfiguration, Bijection)> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::BadExponent { p });
    }
    let graph = gen_graph_m(k)?;
    let dim = k + 1;
    let axis = |i: usize, c: Scalar| {
        let mut v = vec![Scalar::int(0); dim];
        v[i] = c;
        v
    };
    let scale = Scalar::float(2f64.powf((p - 1.0) / p));
    let mut coordinates = vec![axis(0, Scalar::int(-1)), axis(0, Scalar::int(1))];
    coordinates.extend((1..=k).map(|i| axis(i, scale.clone())));
    let config = PointConfiguration { exponent: Exponent::P(p), names: graph.names().to_vec(), coordinates };
    let image = config.to_space()?;
    let bijection = Bijection::identity(graph, image)?;
    Ok((config, bijection))
}

/// Closed form `(1 + 2^(p−1))^(1/p)` of the ℓ_p embedding's distortion.
pub fn ellp_distortion_formula(p: f64) -> f64 {
    (1.0 + 2f64.powf(p - 1.0)).powf(1.0 / p)
}

/// Random exact metric on `n` points: shortest-path closure of a complete
/// graph with random rational weights `a/b`, `1 ≤ a ≤ 12`, `1 ≤ b ≤ 4`.
pub fn random_metric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PointedMetricSpace> {
    require(n, 1)?;
    let mut d = vec![vec![Scalar::int(0); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = Scalar::ratio(rng.gen_range(1..=12), rng.gen_range(1..=4));
            d[i][j] = w.clone();
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = &d[i][k] + &d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    PointedMetricSpace::new((0..n).map(|i| i.to_string()).collect(), d, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Mode;

    #[test]
    fn ejenega_shapes() {
        let m = gen_ejenega(2).unwrap();
        assert_eq!(m.len(), 4);
        assert_eq!(m.names(), &["0", "x1", "x2", "z"]);
        assert_eq!(*m.d(PointId(0), PointId(3)), Scalar::int(2));
        assert_eq!(gen_ejenega(1).unwrap().len(), 3);
        assert_eq!(gen_ejenega(0).unwrap_err(), Error::ZeroCount { min: 1, got: 0 });
    }

    #[test]
    fn graph_m_is_the_shortest_path_metric() {
        let m = gen_graph_m(3).unwrap();
        let (x1, x2) = (m.resolve("x1").unwrap(), m.resolve("x2").unwrap());
        assert_eq!(*m.d(x1, x2), Scalar::int(2));
        assert_eq!(*m.d(m.base(), m.resolve("z").unwrap()), Scalar::int(2));
        assert_eq!(*m.d(m.base(), x1), Scalar::int(1));
        for k in 2..=100 {
            gen_graph_m(k).unwrap();
        }
        assert!(gen_graph_m(1).is_err());
    }

    #[test]
    fn four_branch_table() {
        let m = gen_4branch(2).unwrap();
        let p = |s: &str| m.resolve(s).unwrap();
        assert_eq!(m.base(), p("0"));
        assert_eq!(*m.d(p("alpha"), p("beta")), Scalar::int(2));
        assert_eq!(*m.d(p("alpha"), p("z")), Scalar::int(3));
        assert_eq!(*m.d(p("beta"), p("x2")), Scalar::int(2));
        assert_eq!(*m.d(p("x1"), p("x2")), Scalar::int(1));
        assert_eq!(*m.d(p("0"), p("beta")), Scalar::int(1));
    }

    #[test]
    fn simple_generators() {
        let e = gen_equilateral(4, Scalar::int(1)).unwrap();
        assert!(e.points().all(|a| e.points().all(|b| a == b || *e.d(a, b) == Scalar::int(1))));
        assert!(gen_equilateral(3, Scalar::int(0)).is_err());

        let line = gen_geometric_line(4).unwrap();
        assert_eq!(line.names(), &["0", "1", "2", "4", "8", "16"]);
        assert_eq!(*line.d(PointId(0), PointId(5)), Scalar::int(16));

        let cluster = gen_dyadic_cluster(2).unwrap();
        assert_eq!(cluster.names(), &["0", "4", "7/2", "13/4"]);
    }

    #[test]
    fn star_tree() {
        let w = Scalar::int(1);
        let tree = WeightedTree {
            names: vec!["c".into(), "a".into(), "b".into(), "d".into()],
            edges: vec![(0, 1, w.clone()), (0, 2, w.clone()), (0, 3, w)],
        };
        let t = TreeMetric::new(tree.clone()).unwrap();
        let m = t.space(&[0, 1, 2, 3]).unwrap();
        assert_eq!(*m.d(PointId(1), PointId(2)), Scalar::int(2));
        assert_eq!(t.projection(&[1, 2], 3), 0);
        assert_eq!(t.hull(&[1, 2]), vec![0, 1, 2]);

        let mut broken = tree;
        broken.edges.pop();
        assert!(TreeMetric::new(broken).is_err());
    }

    #[test]
    fn ellp_image_distances() {
        let (config, b) = gen_ellp_embed(2.0, 5).unwrap();
        assert_eq!(config.coordinates.len(), 7);
        let t = &b.target;
        let (o, z, x1, x2) = (PointId(0), PointId(1), PointId(2), PointId(3));
        assert!((t.d(o, x1).to_f64() - 3f64.sqrt()).abs() < 1e-12);
        assert!((t.d(x1, x2).to_f64() - 2.0).abs() < 1e-12);
        assert!((t.d(o, z).to_f64() - 2.0).abs() < 1e-12);
        assert!(matches!(gen_ellp_embed(1.0, 5), Err(Error::BadExponent { .. })));
        assert!(matches!(gen_ellp_embed(f64::INFINITY, 5), Err(Error::BadExponent { .. })));
    }

    #[test]
    fn distortion_basics() {
        let m = gen_ejenega(3).unwrap();
        let id = Bijection::identity(m.clone(), m.clone()).unwrap();
        assert_eq!(distortion(&id).unwrap().distortion, Scalar::int(1));

        let g = gen_graph_m(4).unwrap();
        let e = gen_equilateral(6, Scalar::int(1)).unwrap();
        let rep = distortion(&Bijection::identity(g.clone(), e).unwrap()).unwrap();
        assert_eq!(rep.distortion, Scalar::int(2));

        let small = gen_equilateral(3, Scalar::int(1)).unwrap();
        assert!(matches!(Bijection::identity(g, small), Err(Error::SizeMismatch { .. })));
        assert!(matches!(
            Bijection::new(m.clone(), m.clone(), vec![PointId(0); m.len()]),
            Err(Error::NotABijection { .. })
        ));
    }

    #[test]
    fn distortion_formula_limits() {
        assert_eq!(ellp_distortion_formula(1.0), 2.0);
        assert!((ellp_distortion_formula(2.0) - 3f64.sqrt()).abs() < 1e-15);
        assert!((ellp_distortion_formula(400.0) - 2.0).abs() < 1e-2);
        for p in [1.5, 2.0, 3.0, 10.0] {
            assert!(ellp_distortion_formula(p) < 2.0);
        }
    }

    #[test]
    fn random_metrics_validate() {
        use rand::SeedableRng;
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for n in 1..10 {
            let m = random_metric(n, &mut rng).unwrap();
            assert_eq!(m.mode(), Mode::Exact);
        }
    }
}
