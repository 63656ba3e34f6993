//! End-to-end acceptance run: one PASS/FAIL line per criterion, non-zero
//! exit status if any criterion fails. Every expected value comes from the
//! independent oracle in `common` or from a hand-derived closed form.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use num_traits::{ToPrimitive, Zero};
use omtrop::domain::OmegaDomain;
use omtrop::dynamics::{cap, wave_closure, wave_single, ClosureOptions, Schedule};
use omtrop::experiments::{avalanche_experiment, fit_power_law, fit_report, write_csv, XMinPolicy};
use omtrop::perturb::run_pipeline;
use omtrop::scene::SceneConfig;
use omtrop::series::{rho, Monomial, TropicalSeries};
use omtrop::subdivision::{extract_geometry, is_mild, planar_mild_catalogue};
use omtrop::{LatticeVector, Scalar};
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::Rng;
use rand_distr::{Distribution, Pareto};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: Duration) -> Result<(), String> {
    let t = start.elapsed();
    check(t < budget, || format!("took {t:.2?}, budget {budget:.0?}"))
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn r(p: i64, q: i64) -> Scalar {
    Scalar::ratio(p, q)
}

/// `min(x, y, 1−x, 1−y, 1/3)` on the unit square.
fn square_third() -> TropicalSeries {
    TropicalSeries::with_coefficients(OmegaDomain::unit_square(), [Monomial::new(vec![0, 0], r(1, 3))]).unwrap()
}

fn small_pairs(f: &TropicalSeries) -> Vec<(Vec<i64>, Scalar)> {
    f.small_canonical_form()
        .unwrap()
        .explicit()
        .iter()
        .map(|(q, a)| (q.coords().to_vec(), a.clone()))
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (g, step) = wave_single(&square_third(), &[r(1, 5), r(1, 2)]).map_err(e2s)?;
    let mut want = vec![
        (vec![2, 0], r(0, 1)),
        (vec![1, 0], r(2, 15)),
        (vec![0, 1], r(0, 1)),
        (vec![-1, 0], r(1, 1)),
        (vec![0, -1], r(1, 1)),
        (vec![0, 0], r(1, 3)),
    ];
    want.sort_by(|a, b| a.0.cmp(&b.0));
    let mut got = small_pairs(&g);
    got.sort_by(|a, b| a.0.cmp(&b.0));
    check(got == want, || format!("small form {got:?}"))?;
    check(step.q0 == LatticeVector::new(vec![1, 0]) && step.c == r(2, 15), || {
        format!("step {:?} c={}", step.q0, step.c)
    })?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("6 monomials, Add_(1,0)^(2/15), {:.2?}", start.elapsed()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let f = square_third().canonical_form().map_err(e2s)?;
    let mut sq = Polygon::square(1);
    let mut probed = 0;
    for x in -10i64..=10 {
        for y in -10i64..=10 {
            let want = if (x, y) == (0, 0) { q(1, 3) } else { -sq.support([x, y]) };
            let got = f.coefficient(&[x, y]).map(|a| to_q(&a));
            check(got == Some(want), || format!("a_({x},{y}) = {got:?}, expected {want}"))?;
            probed += 1;
        }
    }
    within(start, Duration::from_secs(1))?;
    Ok(format!("{probed} coefficients, {:.2?}", start.elapsed()))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut r = rng(3);
    let mut compared = 0;
    for case in 0..20 {
        let mut poly = Polygon::random(&mut r);
        let d = poly.domain();
        let p = poly.random_interior(&mut r, 24);
        let (g, _) = wave_single(&TropicalSeries::zero(d), &point(&p)).map_err(e2s)?;
        let lp = oracle_l(&mut poly, &p);
        for _ in 0..1000 {
            let z = poly.random_interior(&mut r, 64);
            let want = oracle_l(&mut poly, &z).min(lp);
            let got = to_q(&g.evaluate(&point(&z)).map_err(e2s)?);
            check(got == want, || format!("case {case}: G_p 0 at {z:?} is {got}, expected {want}"))?;
            compared += 1;
        }
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("{compared} points on 20 polygons, {:.2?}", start.elapsed()))
}

/// One random instance for the dynamics property suite.
struct Inst {
    poly: Polygon,
    dom: Arc<OmegaDomain>,
    raised: Raised,
    f: TropicalSeries,
    points: Vec<Pt>,
    samples: Vec<Pt>,
}

impl Inst {
    fn new(seed: u64) -> Self {
        let mut r = rng(seed);
        let mut poly = Polygon::random(&mut r);
        let dom = poly.domain();
        let raised = random_raised(&mut poly, &mut r);
        let f = series(&dom, &raised);
        let mut points: Vec<Pt> = Vec::new();
        for _ in 0..r.random_range(1..=3) {
            let p = poly.random_interior(&mut r, 12);
            if !points.contains(&p) {
                points.push(p);
            }
        }
        let mut samples: Vec<Pt> = (0..30).map(|_| poly.random_interior(&mut r, 64)).collect();
        samples.extend(points.iter().cloned());
        Inst {
            poly,
            dom,
            raised,
            f,
            points,
            samples,
        }
    }

    fn pts(&self) -> Vec<Vec<Scalar>> {
        self.points.iter().map(point).collect()
    }
}

fn fail<E: std::fmt::Display>(e: E) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

fn val(f: &TropicalSeries, z: &Pt) -> Result<Q, TestCaseError> {
    Ok(to_q(&f.evaluate(&point(z)).map_err(fail)?))
}

fn closure(f: &TropicalSeries, pts: &[Vec<Scalar>], schedule: Schedule) -> Result<TropicalSeries, TestCaseError> {
    let opts = ClosureOptions {
        schedule,
        ..ClosureOptions::default()
    };
    Ok(wave_closure(f, pts, &opts).map_err(fail)?.0)
}

fn small(f: &TropicalSeries) -> Result<BTreeMap<LatticeVector, Scalar>, TestCaseError> {
    Ok(f.small_canonical_form().map_err(fail)?.explicit().clone())
}

type Property = fn(u64) -> Result<(), TestCaseError>;

fn prop_monotone(seed: u64) -> Result<(), TestCaseError> {
    let mut inst = Inst::new(seed);
    let mut r = rng(seed ^ 0xA5);
    let mut raised = inst.raised.clone();
    for _ in 0..r.random_range(1..=3) {
        let qv = [r.random_range(-2..=2), r.random_range(-2..=2)];
        let base = raised.get(&qv).copied().unwrap_or_else(|| -inst.poly.support(qv));
        raised.insert(qv, base + q(r.random_range(1..=12), 12));
    }
    let g = series(&inst.dom, &raised);
    let p = point(&inst.points[0]);
    let (gf, _) = wave_single(&inst.f, &p).map_err(fail)?;
    let (gg, _) = wave_single(&g, &p).map_err(fail)?;
    let pts = inst.pts();
    let cf = closure(&inst.f, &pts, Schedule::RoundRobin)?;
    let cg = closure(&g, &pts, Schedule::RoundRobin)?;
    for z in &inst.samples {
        proptest::prop_assert!(val(&gf, z)? <= val(&gg, z)?, "G_p not monotone at {:?}", z);
        proptest::prop_assert!(val(&cf, z)? <= val(&cg, z)?, "G_P not monotone at {:?}", z);
    }
    Ok(())
}

fn prop_idempotent(seed: u64) -> Result<(), TestCaseError> {
    let inst = Inst::new(seed);
    let p = point(&inst.points[0]);
    let (g, _) = wave_single(&inst.f, &p).map_err(fail)?;
    let (h, step) = wave_single(&g, &p).map_err(fail)?;
    proptest::prop_assert!(step.c.is_zero(), "second wave raised by {}", step.c);
    for z in &inst.samples {
        proptest::prop_assert_eq!(val(&g, z)?, val(&h, z)?);
    }
    Ok(())
}

fn prop_growth(seed: u64) -> Result<(), TestCaseError> {
    let inst = Inst::new(seed);
    let p = point(&inst.points[0]);
    let (g, step) = wave_single(&inst.f, &p).map_err(fail)?;
    proptest::prop_assert!(!step.c.is_negative());
    proptest::prop_assert!(g.argmin_set(&p).map_err(fail)?.len() >= 2, "not a corner at p");
    for z in &inst.samples {
        proptest::prop_assert!(val(&g, z)? >= val(&inst.f, z)?, "G_p f < f at {:?}", z);
    }
    Ok(())
}

fn prop_upper_bound(seed: u64) -> Result<(), TestCaseError> {
    let mut inst = Inst::new(seed);
    let h = closure(&inst.f, &inst.pts(), Schedule::RoundRobin)?;
    let k = inst.points.len() as i128;
    for z in inst.samples.clone() {
        let bound = val(&inst.f, &z)? + oracle_l(&mut inst.poly, &z) * k;
        let got = val(&h, &z)?;
        proptest::prop_assert!(got <= bound, "G_P f = {} > f + |P| l = {} at {:?}", got, bound, z);
    }
    Ok(())
}

fn prop_contraction(seed: u64) -> Result<(), TestCaseError> {
    let mut inst = Inst::new(seed);
    let other = random_raised(&mut inst.poly, &mut rng(seed ^ 0x5A));
    let g = series(&inst.dom, &other);
    let before = to_q(&rho(&inst.f, &g).map_err(fail)?);
    for p in inst.pts() {
        let (gf, _) = wave_single(&inst.f, &p).map_err(fail)?;
        let (gg, _) = wave_single(&g, &p).map_err(fail)?;
        let after = to_q(&rho(&gf, &gg).map_err(fail)?);
        proptest::prop_assert!(after <= before, "rho grew from {} to {}", before, after);
    }
    Ok(())
}

fn prop_cut(seed: u64) -> Result<(), TestCaseError> {
    let inst = Inst::new(seed);
    let pts = inst.pts();
    let full = closure(&TropicalSeries::zero(inst.dom.clone()), &pts, Schedule::RoundRobin)?;
    let mut m: Option<Q> = None;
    for p in &inst.points {
        let v = val(&full, p)?;
        m = Some(m.map_or(v, |m| m.min(v)));
    }
    let m = m.unwrap();
    let j = rng(seed).random_range(1..=7);
    let eps = m * q(j, 8);
    let capped = cap(&full, &from_q(&eps)).map_err(fail)?;
    let again = closure(&capped, &pts, Schedule::RoundRobin)?;
    proptest::prop_assert_eq!(small(&full)?, small(&again)?);
    for z in &inst.samples {
        proptest::prop_assert_eq!(val(&full, z)?, val(&again, z)?);
    }
    Ok(())
}

fn prop_schedule(seed: u64) -> Result<(), TestCaseError> {
    let inst = Inst::new(seed);
    let pts = inst.pts();
    let a = closure(&inst.f, &pts, Schedule::RoundRobin)?;
    let b = closure(&inst.f, &pts, Schedule::SeededRandom { seed })?;
    let mut rev = pts.clone();
    rev.reverse();
    let c = closure(&inst.f, &rev, Schedule::RoundRobin)?;
    let sa = small(&a)?;
    proptest::prop_assert_eq!(&sa, &small(&b)?);
    proptest::prop_assert_eq!(&sa, &small(&c)?);
    Ok(())
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let props: [(&str, Property); 7] = [
        ("monotonicity", prop_monotone),
        ("idempotence", prop_idempotent),
        ("growth", prop_growth),
        ("upper bound", prop_upper_bound),
        ("rho contraction", prop_contraction),
        ("cut invariance", prop_cut),
        ("schedule invariance", prop_schedule),
    ];
    let mut notes = Vec::new();
    for (name, prop) in props {
        let t = Instant::now();
        let config = Config {
            cases: 100,
            failure_persistence: None,
            ..Config::default()
        };
        let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
        runner
            .run(&proptest::num::u64::ANY, prop)
            .map_err(|e| format!("{name}: {e}"))?;
        notes.push(format!("{name} {:.1?}", t.elapsed()));
    }
    within(start, Duration::from_secs(300))?;
    Ok(format!("7 x 100 instances [{}], {:.2?}", notes.join(", "), start.elapsed()))
}

// ---- corner-locus stability -------------------------------------------

type Seg = ([f64; 2], [f64; 2]);

fn segments(f: &TropicalSeries) -> Result<Vec<Seg>, String> {
    let c = extract_geometry(f).map_err(e2s)?;
    Ok(c.pieces
        .iter()
        .map(|p| {
            let v = |k: usize| [p.vertices[k][0].to_f64(), p.vertices[k][1].to_f64()];
            (v(0), v(1))
        })
        .collect())
}

fn seg_dist(z: [f64; 2], (a, b): &Seg) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((z[0] - a[0]) * d[0] + (z[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    };
    ((z[0] - a[0] - t * d[0]).powi(2) + (z[1] - a[1] - t * d[1]).powi(2)).sqrt()
}

fn boundary_dist(poly: &Polygon, z: [f64; 2]) -> f64 {
    poly.normals
        .iter()
        .zip(&poly.offsets)
        .map(|(n, b)| {
            let (x, y) = (n[0] as f64, n[1] as f64);
            (x * z[0] + y * z[1] - b.to_f64().unwrap()) / (x * x + y * y).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// `sup` over samples of `from` at least `margin` inside Ω of the distance
/// to `to`; samples are spaced at most `h` apart along every segment.
fn directed(poly: &Polygon, from: &[Seg], to: &[Seg], margin: f64, h: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for (a, b) in from {
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        let steps = (len / h).ceil().max(1.0) as usize;
        for i in 0..=steps {
            let t = i as f64 / steps as f64;
            let z = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            if boundary_dist(poly, z) <= margin {
                continue;
            }
            let d = to.iter().map(|s| seg_dist(z, s)).fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
    }
    worst
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    const RES: f64 = 1e-3;
    let fixtures = [
        Polygon::square(4),
        Polygon::new(
            vec![[1, 0], [0, 1], [-1, 0], [0, -1], [-1, -1]],
            vec![q(0, 1), q(0, 1), q(-4, 1), q(-4, 1), q(-6, 1)],
        ),
    ];
    let mut r = rng(5);
    let mut cases = 0;
    let mut max_ratio: f64 = 0.0;
    for base in fixtures {
        for eps in [q(1, 10), q(1, 40)] {
            for same_sign in [false, true] {
                for _ in 0..10 {
                    let mut poly = base.clone();
                    let dom = poly.domain();
                    let mut a: Vec<([i64; 2], Q)> = Vec::new();
                    while a.len() < r.random_range(5..=9) {
                        let qv = [r.random_range(-2..=2), r.random_range(-2..=2)];
                        if a.iter().all(|(x, _)| *x != qv) {
                            let c = -poly.support(qv) + eps + q(r.random_range(0..=16), 8);
                            a.push((qv, c));
                        }
                    }
                    let sign: i128 = if r.random_bool(0.5) { 1 } else { -1 };
                    let b: Vec<([i64; 2], Q)> = a
                        .iter()
                        .map(|(qv, c)| {
                            let k: i128 = if same_sign {
                                sign * r.random_range(0..=999)
                            } else {
                                r.random_range(-999..=999)
                            };
                            (*qv, c + eps * q(k, 1000))
                        })
                        .collect();
                    let poly_of = |m: &[([i64; 2], Q)]| {
                        TropicalSeries::polynomial(
                            dom.clone(),
                            m.iter().map(|(qv, c)| Monomial::new(qv.to_vec(), from_q(c))),
                        )
                        .map_err(e2s)
                    };
                    let (sf, sg) = (segments(&poly_of(&a)?)?, segments(&poly_of(&b)?)?);
                    let bound = if same_sign { eps } else { eps * 2 }.to_f64().unwrap();
                    let d = directed(&poly, &sf, &sg, bound + RES, RES).max(directed(&poly, &sg, &sf, bound + RES, RES));
                    check(d <= bound + RES, || {
                        format!("distance {d} > {bound} + {RES} (same sign: {same_sign}) for {a:?} -> {b:?}")
                    })?;
                    max_ratio = max_ratio.max(d / bound);
                    cases += 1;
                }
            }
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{cases} perturbations, worst distance/bound {max_ratio:.3}, {:.2?}", start.elapsed()))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let dom = OmegaDomain::cube(2, 5).map_err(e2s)?;
    let mut r = rng(6);
    let mut counts = Vec::new();
    for _ in 0..10 {
        let mut pts: Vec<Vec<Scalar>> = Vec::new();
        while pts.len() < 5 {
            let p = vec![Scalar::int(r.random_range(1..=4)), Scalar::int(r.random_range(1..=4))];
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
        let (_, trace) = wave_closure(&TropicalSeries::zero(dom.clone()), &pts, &ClosureOptions::default()).map_err(e2s)?;
        check(trace.steps.iter().all(|s| s.c.is_integer()), || "non-integer increment".into())?;
        check(
            trace.status == omtrop::dynamics::Termination::StabilizedExactly,
            || format!("status {:?}", trace.status),
        )?;
        counts.push(trace.steps.len());
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("step counts {counts:?}, {:.2?}", start.elapsed()))
}

fn scene_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenes").join(name)
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    for name in ["square.json", "pentagon.json"] {
        let scene = SceneConfig::load(&scene_path(name)).map_err(e2s)?.build().map_err(e2s)?;
        let cfg = scene.config.perturb.as_ref().ok_or("scene without perturb section")?.to_config();
        check(cfg.epsilon == r(1, 4) && scene.points().len() <= 5, || format!("{name}: fixture drifted"))?;
        let rep = run_pipeline(&scene.domain, scene.points(), &cfg).map_err(e2s)?;
        let eps = to_q(&rep.epsilon);
        check(rep.pass, || format!("{name}: {:?}", rep.failure))?;
        check(rep.initial_mild && rep.faces_mild, || format!("{name}: initial certificate not mild"))?;
        check(rep.steps.iter().all(|s| s.mild && s.times.iter().all(|t| t.mild)), || {
            format!("{name}: a step certificate is not mild")
        })?;
        let dist = to_q(&rep.distance.unshifted);
        check(dist <= eps, || format!("{name}: distance {dist} > {eps}"))?;
        notes.push(format!(
            "{name}: {} steps, distance {}",
            rep.steps.len(),
            rep.distance.unshifted.to_decimal(4)
        ));
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("{}, {:.2?}", notes.join("; "), start.elapsed()))
}

// ---- mildness ground truth --------------------------------------------

type Mono = ([i64; 2], Q);

fn argmin(ms: &[Mono], z: &Pt) -> Vec<[i64; 2]> {
    let vals: Vec<Q> = ms.iter().map(|(qv, a)| dot(*qv, z) + a).collect();
    let m = *vals.iter().min().unwrap();
    let mut out: Vec<[i64; 2]> = ms.iter().zip(&vals).filter(|(_, v)| **v == m).map(|(x, _)| x.0).collect();
    out.sort();
    out
}

/// Strictly convex hull vertices (monotone chain).
fn hull(pts: &[[i64; 2]]) -> Vec<[i64; 2]> {
    let mut p = pts.to_vec();
    p.sort();
    p.dedup();
    if p.len() <= 2 {
        return p;
    }
    let cross = |o: [i64; 2], a: [i64; 2], b: [i64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut h: Vec<[i64; 2]> = Vec::new();
    for pass in 0..2 {
        let start = h.len();
        let it: Vec<[i64; 2]> = if pass == 0 { p.clone() } else { p.iter().rev().cloned().collect() };
        for x in it {
            while h.len() >= start + 2 && cross(h[h.len() - 2], h[h.len() - 1], x) <= 0 {
                h.pop();
            }
            h.push(x);
        }
        h.pop();
    }
    h.sort();
    h
}

/// Brute force: does the hull of `b` contain a lattice point that is not
/// one of its vertices?
fn lattice_free(b: &[[i64; 2]]) -> bool {
    let ext = hull(b);
    let (x0, x1) = (ext.iter().map(|v| v[0]).min().unwrap(), ext.iter().map(|v| v[0]).max().unwrap());
    let (y0, y1) = (ext.iter().map(|v| v[1]).min().unwrap(), ext.iter().map(|v| v[1]).max().unwrap());
    let inside = |z: [i64; 2]| -> bool {
        if ext.len() == 1 {
            return z == ext[0];
        }
        if ext.len() == 2 {
            let (a, c) = (ext[0], ext[1]);
            let cr = (c[0] - a[0]) * (z[1] - a[1]) - (c[1] - a[1]) * (z[0] - a[0]);
            return cr == 0 && (z[0] - a[0]) * (z[0] - c[0]) <= 0 && (z[1] - a[1]) * (z[1] - c[1]) <= 0;
        }
        // Sign of the cross product must not change around the polygon.
        let mut ring = ext.clone();
        let c = [
            ring.iter().map(|v| v[0] as f64).sum::<f64>() / ring.len() as f64,
            ring.iter().map(|v| v[1] as f64).sum::<f64>() / ring.len() as f64,
        ];
        ring.sort_by(|a, b| {
            let ang = |v: &[i64; 2]| (v[1] as f64 - c[1]).atan2(v[0] as f64 - c[0]);
            ang(a).total_cmp(&ang(b))
        });
        (0..ring.len()).all(|i| {
            let (a, b) = (ring[i], ring[(i + 1) % ring.len()]);
            (b[0] - a[0]) * (z[1] - a[1]) - (b[1] - a[1]) * (z[0] - a[0]) >= 0
        })
    };
    for x in x0..=x1 {
        for y in y0..=y1 {
            if inside([x, y]) && !ext.contains(&[x, y]) {
                return false;
            }
        }
    }
    true
}

/// Every corner-locus cell of a finite planar polynomial: argmin sets at
/// midpoints of the pairwise tie lines (cut at every other tie line and at
/// the boundary) and at triple tie points, interior points only.
fn oracle_cells(poly: &Polygon, ms: &[Mono]) -> BTreeSet<Vec<[i64; 2]>> {
    let mut cells = BTreeSet::new();
    let n = ms.len();
    // Lines d·z = e.
    let mut lines: Vec<([i128; 2], Q)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = [(ms[i].0[0] - ms[j].0[0]) as i128, (ms[i].0[1] - ms[j].0[1]) as i128];
            lines.push((d, ms[j].1 - ms[i].1));
        }
    }
    let boundary: Vec<([i128; 2], Q)> = poly
        .normals
        .iter()
        .zip(&poly.offsets)
        .map(|(nv, b)| ([nv[0] as i128, nv[1] as i128], *b))
        .collect();
    let meet = |(d1, e1): &([i128; 2], Q), (d2, e2): &([i128; 2], Q)| -> Option<Pt> {
        let det = d1[0] * d2[1] - d1[1] * d2[0];
        (det != 0).then(|| [(*e1 * d2[1] - *e2 * d1[1]) / det, (*e2 * d1[0] - *e1 * d2[0]) / det])
    };
    for (k, line) in lines.iter().enumerate() {
        let (d, e) = line;
        // Parametrise: base point + t·(−d1, d0).
        let base: Pt = if d[0] != 0 { [*e / d[0], Q::zero()] } else { [Q::zero(), *e / d[1]] };
        let dir = [-d[1], d[0]];
        let param = |z: &Pt| -> Q {
            if dir[0] != 0 {
                (z[0] - base[0]) / dir[0]
            } else {
                (z[1] - base[1]) / dir[1]
            }
        };
        let mut ts: Vec<Q> = lines
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .map(|(_, l)| l)
            .chain(boundary.iter())
            .filter_map(|l| meet(line, l))
            .map(|z| param(&z))
            .collect();
        ts.sort();
        ts.dedup();
        for w in ts.windows(2) {
            let t = (w[0] + w[1]) / 2;
            let z = [base[0] + t * dir[0], base[1] + t * dir[1]];
            if poly.interior(&z) {
                let b = argmin(ms, &z);
                if b.len() >= 2 {
                    cells.insert(b);
                }
            }
        }
        // Vertices: this line against every other tie line.
        for l in &lines {
            if let Some(z) = meet(line, l) {
                if poly.interior(&z) {
                    let b = argmin(ms, &z);
                    if b.len() >= 2 {
                        cells.insert(b);
                    }
                }
            }
        }
    }
    cells
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut r = rng(8);
    let (mut mild_series, mut non_mild_series, mut cells_checked) = (0, 0, 0);
    for case in 0..50 {
        let mut poly = Polygon::square(4);
        let dom = poly.domain();
        // Lifts `−q·z0 + h_q`. Even cases: scattered exponents with small
        // integer `h_q`, so ties and lattice gaps abound. Odd cases: every
        // exponent of a small box on a jittered paraboloid, a unimodular
        // triangulation. The shift keeps every monomial nonnegative on Ω.
        let z0: Pt = [q(r.random_range(1..=3), 1), q(r.random_range(1..=3), 1)];
        let mut ms: Vec<Mono> = Vec::new();
        if case % 2 == 0 {
            let size = r.random_range(3..=12);
            while ms.len() < size {
                let qv = [r.random_range(-2..=2), r.random_range(-2..=2)];
                if ms.iter().all(|(x, _)| *x != qv) {
                    ms.push((qv, -dot(qv, &z0) + q(r.random_range(0..=3), 1) + q(12, 1)));
                }
            }
        } else {
            let (w, h) = (r.random_range(1..=2), r.random_range(1..=3));
            let (x0, y0) = (r.random_range(-2..=0), r.random_range(-2..=-1));
            for x in x0..=x0 + w {
                for y in y0..=y0 + h {
                    let lift = q((x * x + y * y) as i128, 2) + q(r.random_range(0..=99), 1000);
                    ms.push(([x, y], -dot([x, y], &z0) + lift + q(12, 1)));
                }
            }
        }
        // Only the nonnegativity floor matters here; confirm it holds.
        for (qv, a) in &ms {
            check(*a >= -poly.support(*qv), || "fixture below the floor".into())?;
        }
        let f = TropicalSeries::polynomial(dom.clone(), ms.iter().map(|(qv, a)| Monomial::new(qv.to_vec(), from_q(a))))
            .map_err(e2s)?;
        let report = is_mild(&f).map_err(e2s)?;
        let oracle = oracle_cells(&poly, &ms);
        // Cells agree up to non-vertex members (which never change the hull).
        let key = |b: &[[i64; 2]]| hull(b);
        let want: BTreeSet<Vec<[i64; 2]>> = oracle.iter().map(|b| key(b)).collect();
        let got: BTreeSet<Vec<[i64; 2]>> = report
            .cells
            .iter()
            .map(|c| key(&c.argmin.iter().map(|v| [v.coords()[0], v.coords()[1]]).collect::<Vec<_>>()))
            .collect();
        check(got == want, || format!("case {case}: cells {got:?} vs oracle {want:?} for {ms:?}"))?;
        let mut all = true;
        for b in &oracle {
            let brute = lattice_free(b);
            let lv: Vec<LatticeVector> = b.iter().map(|v| LatticeVector::new(v.to_vec())).collect();
            check(planar_mild_catalogue(&lv) == brute, || format!("case {case}: catalogue disagrees on {b:?}"))?;
            all &= brute;
            cells_checked += 1;
        }
        for c in &report.cells {
            let b: Vec<[i64; 2]> = c.argmin.iter().map(|v| [v.coords()[0], v.coords()[1]]).collect();
            check(c.mild == lattice_free(&b), || format!("case {case}: verdict on {b:?}"))?;
        }
        check(report.mild == all, || format!("case {case}: is_mild {} vs oracle {all}", report.mild))?;
        if all {
            mild_series += 1;
        } else {
            non_mild_series += 1;
        }
    }
    check(mild_series > 0 && non_mild_series > 0, || "fixtures not discriminating".into())?;
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "50 series ({mild_series} mild, {non_mild_series} not), {cells_checked} cells, {:.2?}",
        start.elapsed()
    ))
}

fn criterion_9() -> Outcome {
    let mut r = rng(9);
    let pareto = Pareto::new(1.0, 1.5).map_err(e2s)?;
    let xs: Vec<f64> = (0..100_000).map(|_| pareto.sample(&mut r)).collect();
    let fit = fit_power_law(&xs, XMinPolicy::Fixed(1.0)).map_err(e2s)?;
    check((fit.alpha - 2.5).abs() <= 0.05, || format!("alpha = {}", fit.alpha))?;

    let dom = OmegaDomain::unit_square();
    let mut bytes = Vec::new();
    let mut times = Vec::new();
    let mut report = None;
    for _ in 0..2 {
        let t = Instant::now();
        let run = avalanche_experiment(&dom, 10_000, 2024).map_err(e2s)?;
        let mut buf = Vec::new();
        write_csv(&run.samples, 2, &mut buf).map_err(e2s)?;
        report = Some(fit_report(&run.samples, XMinPolicy::KsScan).map_err(e2s)?);
        times.push(t.elapsed());
        check(t.elapsed() < Duration::from_secs(120), || format!("avalanche run took {:.1?}", t.elapsed()))?;
        bytes.push(buf);
    }
    check(bytes[0] == bytes[1], || "avalanche CSV differs between runs".into())?;
    let rep = report.unwrap();
    Ok(format!(
        "synthetic alpha {:.4}; square avalanche alpha {:.3} (x_min {:.3e}, n_tail {}), runs {:.1?}/{:.1?}, identical",
        fit.alpha, rep.mle.alpha, rep.mle.x_min, rep.mle.n_tail, times[0], times[1]
    ))
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let mut r = rng(10);
    let mut compared = 0;
    for case in 0..20 {
        let mut poly = Polygon::random(&mut r);
        let dom = poly.domain();
        let raised = random_raised(&mut poly, &mut r);
        let f = series(&dom, &raised);
        for _ in 0..1000 {
            let z = poly.random_interior(&mut r, 64);
            let want = oracle_eval(&mut poly, &raised, &z);
            let got = to_q(&f.evaluate(&point(&z)).map_err(e2s)?);
            check(got == want, || format!("case {case}: f({z:?}) = {got}, oracle {want}"))?;
            compared += 1;
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{compared} points on 20 series, {:.2?}", start.elapsed()))
}

fn main() -> ExitCode {
    let criteria: [fn() -> Outcome; 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let n = i + 1;
        if only.is_some_and(|o| o != n) {
            continue;
        }
        match c() {
            Ok(msg) => println!("criterion {n}: PASS ({msg})"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n}: FAIL ({msg})");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
