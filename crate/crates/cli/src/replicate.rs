//! `replicate all`: the bundled examples with their expected values.

use lipfree_core::diff::{frechet_check, ConvexMoleculeCombination};
use lipfree_core::gallery::{
    distortion, ellp_distortion_formula, gen_4branch, gen_dyadic_cluster, gen_ejenega, gen_ellp_embed, gen_equilateral,
    gen_geometric_line, gen_graph_m, Bijection,
};
use lipfree_core::ltp::{all_pairs_profile, ltp_modulus, ramsey_extract};
use lipfree_core::metric::{scale_space, validate_metric};
use lipfree_core::octa::{chain_check, oct_index};
use lipfree_core::transport::{kr_norm, ltp_extend};
use lipfree_core::{Error, Measure, PointedMetricSpace, Scalar, Subset};
use serde_json::{json, Value};

type Outcome = Result<String, String>;
type Example = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn named(m: &PointedMetricSpace, names: &[&str]) -> Result<Subset, String> {
    let ids = names
        .iter()
        .map(|n| m.resolve(n).ok_or_else(|| format!("no point {n}")))
        .collect::<Result<Vec<_>, _>>()?;
    Subset::new(m, ids).map_err(|e| e.to_string())
}

fn err(e: Error) -> String {
    e.to_string()
}

fn ejenega_threshold() -> Outcome {
    let m = gen_ejenega(10).map_err(err)?;
    let modulus = ltp_modulus(&m, &named(&m, &["0", "z"])?).map_err(err)?;
    ensure(modulus == Scalar::ratio(1, 3), || format!("modulus {modulus}, expected 1/3"))?;
    Ok(format!("modulus {modulus}"))
}

fn ejenega_scaled() -> Outcome {
    let m = scale_space(&gen_ejenega(10).map_err(err)?, &Scalar::ratio(3, 2)).map_err(err)?;
    let modulus = ltp_modulus(&m, &named(&m, &["0", "z"])?).map_err(err)?;
    ensure(modulus == Scalar::ratio(1, 3), || format!("modulus {modulus}, expected 1/3"))?;
    Ok(format!("scaled by 3/2: modulus {modulus}"))
}

fn ejenega_sandwich() -> Outcome {
    let m = gen_ejenega(10).map_err(err)?;
    let rep = chain_check(&m, &named(&m, &["0", "z"])?).map_err(err)?;
    ensure(rep.ratio == Scalar::ratio(2, 3) && rep.oct == Scalar::ratio(3, 2) && rep.holds, || {
        format!("R = {}, OCT = {}", rep.ratio, rep.oct)
    })?;
    Ok(format!("R = {}, OCT = {} in [{}, {}]", rep.ratio, rep.oct, rep.lower, rep.upper))
}

fn ejenega_frechet() -> Outcome {
    for k in 1..=10 {
        let m = gen_ejenega(k).map_err(err)?;
        let z = m.resolve("z").ok_or("no point z")?;
        let phi = ConvexMoleculeCombination::new(&m, vec![z], vec![Scalar::int(1)], m.base()).map_err(err)?;
        ensure(frechet_check(&m, &phi).map_err(err)?.frechet, || format!("k = {k} not Fréchet"))?;
    }
    Ok("Fréchet at the unit direction of z for k = 1..10".into())
}

fn four_branch_profile() -> Outcome {
    let m = gen_4branch(5).map_err(err)?;
    let profile = all_pairs_profile(&m).map_err(err)?;
    ensure(profile.iter().all(|p| p.modulus.is_zero()), || "a two-point modulus is positive".into())?;
    Ok(format!("{} two-point subsets, all moduli 0", profile.len()))
}

fn four_branch_gateaux() -> Outcome {
    let m = gen_4branch(5).map_err(err)?;
    let z = m.resolve("z").ok_or("no point z")?;
    let alpha = m.resolve("alpha").ok_or("no point alpha")?;
    let phi = ConvexMoleculeCombination::new(&m, vec![z], vec![Scalar::int(1)], m.base()).map_err(err)?;
    let rep = frechet_check(&m, &phi).map_err(err)?;
    ensure(!rep.frechet && rep.witness == Some(alpha), || format!("witness {:?}", rep.witness))?;
    let (f1, f2) = (rep.f1.ok_or("missing f1")?, rep.f2.ok_or("missing f2")?);
    ensure(f1.value(alpha) == &Scalar::int(1) && f2.value(alpha) == &Scalar::int(-1), || {
        format!("f1(alpha) = {}, f2(alpha) = {}", f1.value(alpha), f2.value(alpha))
    })?;
    Ok("not Fréchet; witness alpha, f1(alpha) = 1, f2(alpha) = -1".into())
}

fn mixed_norm() -> Outcome {
    let m = gen_ejenega(2).map_err(err)?;
    let at = |n: &str| m.resolve(n).ok_or_else(|| format!("no point {n}"));
    let mu = Measure::canonicalize(
        &m,
        [(at("z")?, Scalar::ratio(1, 2)), (at("x1")?, Scalar::int(1)), (at("x2")?, Scalar::int(-1))],
    )
    .map_err(err)?;
    let cert = kr_norm(&m, &mu).map_err(err)?;
    ensure(cert.value == Scalar::ratio(3, 2), || format!("norm {}", cert.value))?;
    cert.verify(&m, &mu).map_err(|e| e.to_string())?;
    Ok(format!("norm {} with verified certificate", cert.value))
}

fn symmetric_diracs() -> Outcome {
    let m = gen_ejenega(4).map_err(err)?;
    let z = m.resolve("z").ok_or("no point z")?;
    let half = Measure::dirac(&m, z, Scalar::ratio(1, 2)).map_err(err)?;
    let rep = oct_index(&m, &[half.clone(), half.neg()]).map_err(err)?;
    ensure(rep.index == Scalar::ratio(3, 2), || format!("index {}", rep.index))?;
    Ok(format!("OCT = {} at ({}, {})", rep.index, m.name(rep.molecule.0), m.name(rep.molecule.1)))
}

fn ellp() -> Outcome {
    let mut parts = Vec::new();
    for p in [1.5, 2.0, 3.0, 10.0] {
        let (_, b) = gen_ellp_embed(p, 8).map_err(err)?;
        let got = distortion(&b).map_err(err)?.distortion.to_f64();
        let want = ellp_distortion_formula(p);
        ensure((got - want).abs() <= 1e-9 * want && got < 2.0, || format!("p = {p}: {got} vs {want}"))?;
        let image = &b.target;
        let modulus = ltp_modulus(image, &named(image, &["0", "z"])?).map_err(err)?;
        ensure(modulus.is_positive_tol(), || format!("p = {p}: image modulus {modulus}"))?;
        parts.push(format!("p={p}: {got:.9}"));
    }
    Ok(format!("distortions {}; image moduli positive", parts.join(", ")))
}

fn graph_equilateral() -> Outcome {
    let b = Bijection::identity(gen_graph_m(5).map_err(err)?, gen_equilateral(7, Scalar::int(1)).map_err(err)?)
        .map_err(err)?;
    let d = distortion(&b).map_err(err)?.distortion;
    ensure(d == Scalar::int(2), || format!("distortion {d}"))?;
    Ok(format!("distortion {d}"))
}

fn ramsey() -> Outcome {
    let m = gen_ejenega(20).map_err(err)?;
    let rep = ramsey_extract(&m, &named(&m, &["0", "z"])?, &Scalar::ratio(1, 5)).map_err(err)?;
    ensure(rep.check(&m) && rep.subset.len() == m.len(), || format!("|A| = {}", rep.subset.len()))?;
    let eq = gen_equilateral(6, Scalar::int(1)).map_err(err)?;
    let fails = matches!(
        ramsey_extract(&eq, &Subset::from_indices(&eq, &[0, 1]).map_err(err)?, &Scalar::ratio(1, 5)),
        Err(Error::HypothesisFails { .. })
    );
    ensure(fails, || "equilateral space should fail the hypothesis".into())?;
    Ok(format!("|A| = {} of {}; equilateral rejected", rep.subset.len(), m.len()))
}

fn extension() -> Outcome {
    let m = gen_geometric_line(4).map_err(err)?;
    let n = named(&m, &["0", "1"])?;
    let at = |name: &str| m.resolve(name).ok_or_else(|| format!("no point {name}"));
    let (u, v) = (at("16")?, at("2")?);
    let w = ltp_extend(&m, &n, &[Scalar::int(0), Scalar::int(1)], u, v, &Scalar::ratio(1, 4)).map_err(err)?;
    ensure(w.value(u) == &Scalar::ratio(79, 4) && w.value(v) == &Scalar::ratio(9, 4), || {
        format!("f(16) = {}, f(2) = {}", w.value(u), w.value(v))
    })?;
    Ok(format!("f(16) = {}, f(2) = {}", w.value(u), w.value(v)))
}

fn dyadic() -> Outcome {
    let mut values = Vec::new();
    for k in 1..=6 {
        let m = gen_dyadic_cluster(k).map_err(err)?;
        let modulus = ltp_modulus(&m, &named(&m, &["0", "4"])?).map_err(err)?;
        let want = Scalar::ratio(2, (1 << (k + 2)) + 1);
        ensure(modulus == want, || format!("k = {k}: {modulus}, expected {want}"))?;
        values.push(modulus.to_string());
    }
    Ok(format!("moduli {}", values.join(", ")))
}

fn triangle() -> Outcome {
    let d = |x: i64| Scalar::int(x);
    let dist = vec![vec![d(0), d(1), d(3)], vec![d(1), d(0), d(1)], vec![d(3), d(1), d(0)]];
    match validate_metric(dist, lipfree_core::PointId(0)) {
        Err(e @ Error::TriangleViolation { .. }) => Ok(e.to_string()),
        other => Err(format!("expected a triangle violation, got {other:?}")),
    }
}

/// Runs every example in order. Returns the JSON table and whether all
/// examples passed.
pub fn run_all() -> (Value, bool) {
    let examples: [Example; 15] = [
        ("ejenega-threshold", ejenega_threshold),
        ("ejenega-scaled", ejenega_scaled),
        ("ejenega-sandwich", ejenega_sandwich),
        ("ejenega-frechet", ejenega_frechet),
        ("four-branch-profile", four_branch_profile),
        ("four-branch-gateaux", four_branch_gateaux),
        ("mixed-norm", mixed_norm),
        ("symmetric-diracs-oct", symmetric_diracs),
        ("ellp-distortion", ellp),
        ("graph-m-equilateral", graph_equilateral),
        ("ramsey-ejenega", ramsey),
        ("geometric-line-extension", extension),
        ("dyadic-cluster", dyadic),
        ("triangle-violation", triangle),
        ("four-branch-oct", four_branch_oct),
    ];
    let rows: Vec<Value> = examples
        .iter()
        .map(|(name, f)| match f() {
            Ok(detail) => json!({ "name": name, "pass": true, "detail": detail }),
            Err(detail) => json!({ "name": name, "pass": false, "detail": detail }),
        })
        .collect();
    let passed = rows.iter().filter(|r| r["pass"] == json!(true)).count();
    let all = passed == rows.len();
    (json!({ "passed": passed, "total": rows.len(), "results": rows }), all)
}

fn four_branch_oct() -> Outcome {
    let m = gen_4branch(3).map_err(err)?;
    let n = named(&m, &["0", "z"])?;
    let rep = chain_check(&m, &n).map_err(err)?;
    ensure(rep.holds && rep.oct == Scalar::int(2), || format!("R = {}, OCT = {}", rep.ratio, rep.oct))?;
    Ok(format!("R = {}, OCT = {}", rep.ratio, rep.oct))
}
