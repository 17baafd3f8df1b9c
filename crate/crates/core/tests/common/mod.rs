//! Brute-force oracles used to freeze and cross-check expected values.
//! They work on `Ratio<i128>` copies of the data and share no code path with
//! the solvers under test.
#![allow(dead_code)]

use lipfree_core::gallery::{
    gen_4branch, gen_dyadic_cluster, gen_ejenega, gen_equilateral, gen_geometric_line, gen_graph_m, random_metric,
};
use lipfree_core::{Measure, PointId, PointedMetricSpace, Scalar};
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub type Q = Ratio<i128>;

pub fn q(s: &Scalar) -> Q {
    let r = s.as_rational().expect("oracles run on exact spaces");
    Q::new(r.numer().to_i128().unwrap(), r.denom().to_i128().unwrap())
}

pub fn dist(space: &PointedMetricSpace) -> Vec<Vec<Q>> {
    space.points().map(|a| space.points().map(|b| q(space.d(a, b))).collect()).collect()
}

/// KR norm as the maximum of `Σ aᵢ f(xᵢ)` over the vertices of the
/// Lipschitz polytope on `supp(μ) ∪ {base}`.
///
/// Every vertex is pinned by a spanning tree of tight constraints rooted at
/// the base, so it suffices to let each non-base node pick a parent and a
/// sign, `f(k) = f(parent) ± d(k, parent)`, discard cyclic choices and
/// infeasible vectors, and take the best value.
pub fn kr_norm_oracle(space: &PointedMetricSpace, mu: &Measure) -> Q {
    let d = dist(space);
    let mut nodes = vec![space.base().0];
    let mut coeff = vec![Q::zero()];
    for (p, a) in mu.iter() {
        nodes.push(p.0);
        coeff.push(q(a));
    }
    let m = nodes.len();
    if m == 1 {
        return Q::zero();
    }
    let choices = 2 * (m - 1);
    let total = choices.pow((m - 1) as u32);
    let mut best: Option<Q> = None;
    let mut f = vec![Q::zero(); m];
    for code in 0..total {
        let mut c = code;
        let mut parent = vec![(0usize, 1i128); m];
        for slot in parent.iter_mut().skip(1) {
            let pick = c % choices;
            c /= choices;
            *slot = (pick / 2, if pick % 2 == 0 { 1 } else { -1 });
        }
        // parent index `p` among the other nodes: skip self
        let mut ok = true;
        for k in 1..m {
            let p = parent[k].0;
            parent[k].0 = if p >= k { p + 1 } else { p };
        }
        let mut done = vec![false; m];
        done[0] = true;
        for start in 1..m {
            let mut chain = Vec::new();
            let mut k = start;
            while !done[k] {
                if chain.contains(&k) {
                    ok = false;
                    break;
                }
                chain.push(k);
                k = parent[k].0;
            }
            if !ok {
                break;
            }
            for &k in chain.iter().rev() {
                let (p, s) = parent[k];
                f[k] = f[p] + Q::from_integer(s) * d[nodes[k]][nodes[p]];
                done[k] = true;
            }
        }
        if !ok {
            continue;
        }
        let feasible = (0..m).all(|i| (0..m).all(|j| (f[i] - f[j]).abs() <= d[nodes[i]][nodes[j]]));
        if !feasible {
            continue;
        }
        let val: Q = (1..m).map(|k| coeff[k] * f[k]).sum();
        if best.is_none_or(|b| val > b) {
            best = Some(val);
        }
    }
    best.expect("the zero function is a feasible tree choice")
}

/// Naive LTP ratio: max over ordered witnesses of the min over ordered
/// `x ≠ y` in `subset`, each witness capped at 1.
pub fn ltp_ratio_oracle(space: &PointedMetricSpace, subset: &[usize]) -> Q {
    let d = dist(space);
    let n = d.len();
    let mut best = Q::from_integer(-1);
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let mut worst = Q::from_integer(1);
            for &x in subset {
                for &y in subset {
                    if x != y {
                        let r = (d[x][u] + d[y][v]) / (d[x][y] + d[u][v]);
                        if r < worst {
                            worst = r;
                        }
                    }
                }
            }
            if worst > best {
                best = worst;
            }
        }
    }
    best
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_space(rng: &mut StdRng, min: usize, max: usize) -> PointedMetricSpace {
    let n = rng.gen_range(min..=max);
    random_metric(n, rng).unwrap()
}

/// Random measure on `space` with small rational coefficients.
pub fn random_measure(rng: &mut StdRng, space: &PointedMetricSpace) -> Measure {
    let mut raw: Vec<(PointId, Scalar)> = Vec::new();
    for p in space.points() {
        if rng.gen_bool(0.6) {
            raw.push((p, Scalar::ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3))));
        }
    }
    Measure::canonicalize(space, raw).unwrap()
}

/// Random subset of `size` distinct points in index order.
pub fn random_subset(rng: &mut StdRng, n: usize, size: usize) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..n).collect();
    for i in 0..size.min(n) {
        let j = rng.gen_range(i..n);
        ids.swap(i, j);
    }
    let mut out = ids[..size.min(n)].to_vec();
    out.sort_unstable();
    out
}

pub fn to_scalar(x: Q) -> Scalar {
    Scalar::ratio(x.numer().to_i64().unwrap(), x.denom().to_i64().unwrap())
}

/// Small members of every generator family.
pub fn gallery() -> Vec<PointedMetricSpace> {
    vec![
        gen_ejenega(1).unwrap(),
        gen_ejenega(3).unwrap(),
        gen_graph_m(3).unwrap(),
        gen_4branch(2).unwrap(),
        gen_4branch(3).unwrap(),
        gen_equilateral(4, Scalar::int(1)).unwrap(),
        gen_geometric_line(4).unwrap(),
        gen_dyadic_cluster(3).unwrap(),
    ]
}
