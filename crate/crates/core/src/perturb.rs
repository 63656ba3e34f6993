//! The perturbed-flow pipeline: shrink the domain to a level set, cap and
//! generically lower the series so that its corner locus is mild, replay
//! the recorded waves with every increment reduced by `δ`, certify mildness
//! along the way and measure how far the result is from the closure on Ω.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domain::{FaceMildness, OmegaDomain};
use crate::dynamics::{self, add_monomial, wave_closure, ClosureOptions, FlowTrace};
use crate::error::{Error, Result};
use crate::geometry::{halfspaces_to_geometry, HalfSpace, IntegerHull, Point};
use crate::lattice::{self, LatticeVector};
use crate::scalar::Scalar;
use crate::series::{Monomial, TropicalSeries};
use crate::subdivision::{self, CellVerdict};

/// Denominator of the random generic lowerings `δ_q`.
const DELTA_Q_RESOLUTION: i64 = 1 << 20;

#[derive(Clone, Debug)]
pub struct PerturbConfig {
    /// Target closeness.
    pub epsilon: Scalar,
    /// Level-set height; default `min(ε/4, min_p f(p)/2)`.
    pub epsilon_prime: Option<Scalar>,
    /// Cap; default `ε′`.
    pub epsilon_second: Option<Scalar>,
    /// Increment reduction; default `min(c_min/2, ε/(4(N+1)))`.
    pub delta: Option<Scalar>,
    pub seed: u64,
    pub retry_limit: usize,
    /// Flow times `k/t_grid`, `k = 1..=t_grid`, are certified per step.
    pub t_grid: u32,
    /// Points per axis of the comparison grid.
    pub grid_per_axis: usize,
    /// Extra round-robin passes over `P` after the replay, with the same
    /// `δ` reduction, until no reduced increment is positive.
    pub extra_passes: usize,
}

impl PerturbConfig {
    pub fn new(epsilon: Scalar) -> Self {
        PerturbConfig {
            epsilon,
            epsilon_prime: None,
            epsilon_second: None,
            delta: None,
            seed: 0,
            retry_limit: 8,
            t_grid: 8,
            grid_per_axis: 100,
            extra_passes: 64,
        }
    }
}

/// Result of the construction of `Q` and `g`.
#[derive(Clone, Debug)]
pub struct PerturbBuild {
    pub points: Vec<Point>,
    /// Closure `G_P 0_Ω` on the original domain.
    pub base: TropicalSeries,
    pub base_trace: FlowTrace,
    pub epsilon_prime: Scalar,
    pub epsilon_second: Scalar,
    pub q_domain: Arc<OmegaDomain>,
    /// Starting polynomial on `Q`.
    pub g_polynomial: TropicalSeries,
    /// Same function with implicit defaults, ready for waves.
    pub g: TropicalSeries,
    pub lowered: BTreeMap<LatticeVector, Scalar>,
    pub attempts: usize,
    pub face_checks: Vec<FaceMildness>,
    pub mildness: subdivision::MildnessReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct TimeCertificate {
    pub t: Scalar,
    pub mild: bool,
    pub offending: Option<CellVerdict>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepCertificate {
    pub step: usize,
    pub point_index: usize,
    pub q0: LatticeVector,
    /// Full increment recomputed on the current series.
    pub increment: Scalar,
    /// `max(increment − δ, 0)`.
    pub applied: Scalar,
    pub times: Vec<TimeCertificate>,
    pub mild: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistanceReport {
    /// `sup |F(g) − (G_P 0_Ω − ε′)|` over samples in `Q`.
    pub shifted: Scalar,
    /// `sup |F(g) − G_P 0_Ω|` over samples in Ω, with `F(g) = 0` off `Q`.
    pub unshifted: Scalar,
    pub worst_point: Option<Point>,
    pub samples: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PerturbReport {
    pub epsilon: Scalar,
    pub epsilon_prime: Scalar,
    pub epsilon_second: Scalar,
    pub delta: Scalar,
    pub attempts: usize,
    pub q_vertices: Vec<Point>,
    pub g: crate::series::SeriesJson,
    pub lowered: Vec<(LatticeVector, Scalar)>,
    pub initial_mild: bool,
    pub faces_mild: bool,
    pub steps: Vec<StepCertificate>,
    pub final_series: crate::series::SeriesJson,
    pub distance: DistanceReport,
    pub failure: Option<String>,
    pub pass: bool,
}

fn default_epsilon_prime(eps: &Scalar, f: &TropicalSeries, points: &[Point]) -> Result<Scalar> {
    let mut min_fp: Option<Scalar> = None;
    for p in points {
        let v = f.evaluate(p)?;
        min_fp = Some(match min_fp {
            None => v,
            Some(m) => m.min(v),
        });
    }
    let min_fp = min_fp.ok_or(Error::EmptyPointSet)?;
    Ok((eps / &Scalar::int(4)).min(&min_fp / &Scalar::int(2)))
}

/// Runs the closure on Ω and builds `Q`, `g` with a mild corner locus and
/// mild faces, retrying with fresh lowerings (and halving the cap every
/// other attempt) up to the retry limit.
pub fn build_q_and_g(domain: &Arc<OmegaDomain>, points: &[Point], config: &PerturbConfig) -> Result<PerturbBuild> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    domain.require_polytope()?;
    if !config.epsilon.is_positive() {
        return Err(Error::Invalid(format!("epsilon {} must be positive", config.epsilon)));
    }
    let zero = TropicalSeries::zero(domain.clone());
    let (base, base_trace) = wave_closure(&zero, points, &ClosureOptions::default())?;

    let mut eps1 = match &config.epsilon_prime {
        Some(e) => e.clone(),
        None => default_epsilon_prime(&config.epsilon, &base, points)?,
    };
    if !eps1.is_positive() {
        return Err(Error::Invalid(format!("level height {eps1} must be positive")));
    }
    // The shift identity needs f(p) > ε′ strictly at every point.
    let values: Vec<Scalar> = points.iter().map(|p| base.evaluate(p)).collect::<Result<_>>()?;
    while values.iter().any(|v| v <= &eps1) {
        eps1 = &eps1 / &Scalar::int(2);
    }
    let level = dynamics::level_set_polytope(&base, &eps1)?;
    let mut eps2 = config.epsilon_second.clone().unwrap_or_else(|| eps1.clone());
    if !eps2.is_positive() || eps2 > eps1 {
        return Err(Error::Invalid(format!("cap {eps2} must lie in (0, {eps1}]")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let attempts_max = config.retry_limit.max(1);
    let mut last_failure = String::new();
    for attempt in 0..attempts_max {
        if attempt > 0 && attempt % 2 == 0 {
            eps2 = &eps2 / &Scalar::int(2);
        }
        let capped = dynamics::cap(&level.restricted, &eps2)?;
        let g1 = capped.small_canonical_form()?;
        let b_prime: Vec<LatticeVector> = g1.explicit().keys().cloned().collect();
        let b_all = IntegerHull::new(&b_prime).lattice_points();
        let verts = subdivision::region_vertices(&g1)?;
        let vals: Vec<Scalar> = verts.iter().map(|v| g1.evaluate(v)).collect::<Result<_>>()?;
        let canon_of = |q: &LatticeVector| -> Result<Scalar> {
            let mut best: Option<Scalar> = None;
            for (v, fv) in verts.iter().zip(&vals) {
                let val = fv - &lattice::dot(q.coords(), v);
                best = Some(match best {
                    None => val,
                    Some(b) => b.max(val),
                });
            }
            Ok(best.expect("level set has vertices"))
        };
        let delta0 = &eps2 / &Scalar::int(8);
        let mut used: BTreeSet<i64> = BTreeSet::new();
        let mut lowered = BTreeMap::new();
        let mut monomials: Vec<Monomial> = g1.monomials();
        for q in b_all.iter().filter(|q| !b_prime.contains(q)) {
            let k = loop {
                let k = rng.random_range(1..DELTA_Q_RESOLUTION);
                if used.insert(k) {
                    break k;
                }
            };
            let dq = &delta0 * &Scalar::ratio(k, DELTA_Q_RESOLUTION);
            let a = canon_of(q)? - dq.clone();
            lowered.insert(q.clone(), dq);
            monomials.push(Monomial::new(q.clone(), a));
        }

        // Q = {g >= 0} inside the level set.
        let qprime = level.geometry();
        let mut hs: Vec<HalfSpace> = qprime.facet_halfspaces().cloned().collect();
        for m in &monomials {
            if !m.q.is_zero() {
                hs.push(HalfSpace::normalized(m.q.coords(), -m.a.clone())?);
            }
        }
        let q_geo = halfspaces_to_geometry(&hs, domain.dim())?;
        let q_domain = Arc::new(OmegaDomain::from_geometry(q_geo));
        let g_polynomial = TropicalSeries::polynomial(q_domain.clone(), monomials)?;
        let g = g_polynomial.complete()?;
        let mildness = subdivision::is_mild(&g)?;
        let face_checks = q_domain.mild_faces_check()?;
        let faces_ok = face_checks.iter().all(|f| f.mild);
        if mildness.mild && faces_ok {
            return Ok(PerturbBuild {
                points: points.to_vec(),
                base,
                base_trace,
                epsilon_prime: eps1,
                epsilon_second: eps2,
                q_domain,
                g_polynomial,
                g,
                lowered,
                attempts: attempt + 1,
                face_checks,
                mildness,
            });
        }
        last_failure = match (mildness.first_offender(), face_checks.iter().find(|f| !f.mild)) {
            (Some(c), _) => format!(
                "cell {:?} contains lattice point {:?}",
                c.argmin.iter().map(LatticeVector::coords).collect::<Vec<_>>(),
                c.offending.as_ref().map(LatticeVector::coords)
            ),
            (None, Some(f)) => format!("face with normals {:?} is not mild", f.normals),
            (None, None) => unreachable!(),
        };
    }
    Err(Error::Resource(format!(
        "no mild starting series after {attempts_max} attempts: {last_failure}"
    )))
}

fn default_delta(eps: &Scalar, trace: &FlowTrace) -> Scalar {
    let n = trace.steps.len() as i64;
    let by_eps = eps / &Scalar::int(4 * (n + 1));
    match trace.steps.iter().map(|s| s.c.clone()).filter(Scalar::is_positive).reduce(Scalar::min) {
        Some(c) => (&c / &Scalar::int(2)).min(by_eps),
        None => by_eps,
    }
}

/// Flow times in `(0, 1)` where the raised term passes a vertex of the
/// arrangement of the other monomials.
fn event_times(before: &TropicalSeries, q0: &LatticeVector, applied: &Scalar) -> Result<Vec<Scalar>> {
    let after = add_monomial(before, q0, applied, &Scalar::one(before.mode()))?;
    let g = before.domain().require_polytope()?;
    let mut verts = subdivision::region_vertices(&after)?;
    for v in subdivision::region_vertices(before)? {
        if !verts.contains(&v) {
            verts.push(v);
        }
    }
    let mut out: Vec<Scalar> = Vec::new();
    let one = Scalar::one(before.mode());
    for v in verts.iter().filter(|v| g.contains_in_interior(v)) {
        let t0 = before.term(q0.coords(), v).expect("raised exponent has a coefficient");
        let other = before.evaluate_excluding(v, q0.coords())?.value;
        let t = (other - t0) / applied.clone();
        if t.is_positive() && t < one && !out.contains(&t) {
            out.push(t);
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).expect("exact times"));
    Ok(out)
}

fn certify(series: &TropicalSeries, t: Scalar) -> Result<TimeCertificate> {
    let rep = subdivision::is_mild(series)?;
    Ok(TimeCertificate {
        t,
        mild: rep.mild,
        offending: rep.first_offender().cloned(),
    })
}

/// One reduced wave at `w` with certificates at the sampled flow times.
fn reduced_step(
    current: &TropicalSeries,
    w: &[Scalar],
    delta: &Scalar,
    t_grid: u32,
    step: usize,
    point_index: usize,
) -> Result<(TropicalSeries, StepCertificate)> {
    let o = dynamics::wave_outcome(current, w)?;
    let mode = current.mode();
    let applied = if o.smooth {
        (&o.c - delta).max(Scalar::zero(mode))
    } else {
        Scalar::zero(mode)
    };
    let mut times = Vec::new();
    if applied.is_positive() {
        let mut ts: Vec<Scalar> = (1..=t_grid.max(1))
            .map(|k| Scalar::ratio(i64::from(k), i64::from(t_grid.max(1))))
            .collect();
        for t in event_times(current, &o.q0, &applied)? {
            if !ts.contains(&t) {
                ts.push(t);
            }
        }
        ts.sort_by(|a, b| a.partial_cmp(b).expect("exact times"));
        for t in ts {
            let s = add_monomial(current, &o.q0, &applied, &t)?;
            times.push(certify(&s, t)?);
        }
    }
    let next = add_monomial(current, &o.q0, &applied, &Scalar::one(mode))?;
    let mild = times.iter().all(|t| t.mild);
    Ok((
        next,
        StepCertificate {
            step,
            point_index,
            q0: o.q0,
            increment: if o.smooth { o.c } else { Scalar::zero(mode) },
            applied,
            times,
            mild,
        },
    ))
}

fn grid_points(domain: &OmegaDomain, per_axis: usize) -> Result<Vec<Point>> {
    let g = domain.require_polytope()?;
    let (lo, hi) = g.bounding_box();
    let n = domain.dim();
    let k = per_axis.max(1) as i64;
    let mut out = Vec::new();
    let mut idx = vec![0i64; n];
    loop {
        let p: Point = (0..n)
            .map(|d| &lo[d] + &(&(&hi[d] - &lo[d]) * &Scalar::ratio(2 * idx[d] + 1, 2 * k)))
            .collect();
        if g.contains(&p) {
            out.push(p);
        }
        let mut d = 0;
        loop {
            if d == n {
                return Ok(out);
            }
            idx[d] += 1;
            if idx[d] < k {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

fn distances(build: &PerturbBuild, fg: &TropicalSeries, per_axis: usize) -> Result<DistanceReport> {
    let mode = fg.mode();
    let mut shifted = Scalar::zero(mode);
    let mut unshifted = Scalar::zero(mode);
    let mut worst = None;
    let mut samples = grid_points(build.base.domain(), per_axis)?;
    if let Ok(cx) = subdivision::extract_geometry(fg) {
        samples.extend(cx.vertices.into_iter().flat_map(|v| v.vertices));
    }
    let qg = build.q_domain.require_polytope()?;
    let count = samples.len();
    for z in samples {
        let f = build.base.evaluate(&z)?;
        if qg.contains(&z) {
            let v = fg.evaluate(&z)?;
            let d = (&v - &(&f - &build.epsilon_prime)).abs();
            if d > shifted {
                shifted = d;
            }
            let u = (&v - &f).abs();
            if u > unshifted {
                unshifted = u;
                worst = Some(z);
            }
        } else if f > unshifted {
            unshifted = f;
            worst = Some(z);
        }
    }
    Ok(DistanceReport {
        shifted,
        unshifted,
        worst_point: worst,
        samples: count,
    })
}

/// Replays the Ω trace on `Q` with increments reduced by `δ`, certifying
/// mildness at each sampled flow time, then measures the distance of the
/// result to the closure on Ω.
pub fn perturbed_replay(build: &PerturbBuild, config: &PerturbConfig) -> Result<PerturbReport> {
    let delta = config
        .delta
        .clone()
        .unwrap_or_else(|| default_delta(&config.epsilon, &build.base_trace));
    if delta.is_negative() {
        return Err(Error::Invalid(format!("delta {delta} must be non-negative")));
    }
    let qg = build.q_domain.require_polytope()?;
    let mut current = build.g.clone();
    let mut steps = Vec::new();
    let mut failure = None;
    let mut run = |current: &mut TropicalSeries, i: usize, steps: &mut Vec<StepCertificate>| -> Result<bool> {
        let w = &build.points[i];
        if !qg.contains_in_interior(w) {
            return Ok(false);
        }
        let (next, cert) = reduced_step(current, w, &delta, config.t_grid, steps.len(), i)?;
        let moved = cert.applied.is_positive();
        if !cert.mild && failure.is_none() {
            let off = cert.times.iter().find(|t| !t.mild).and_then(|t| t.offending.clone());
            failure = Some(format!(
                "step {} (point {}): not mild{}",
                cert.step,
                i,
                off.map(|c| format!(
                    ", cell {:?} contains {:?}",
                    c.argmin.iter().map(LatticeVector::coords).collect::<Vec<_>>(),
                    c.offending.as_ref().map(LatticeVector::coords)
                ))
                .unwrap_or_default()
            ));
        }
        steps.push(cert);
        *current = next;
        Ok(moved)
    };
    for s in &build.base_trace.steps {
        run(&mut current, s.point_index, &mut steps)?;
    }
    for _ in 0..config.extra_passes {
        let mut moved = false;
        for i in 0..build.points.len() {
            moved |= run(&mut current, i, &mut steps)?;
        }
        if !moved {
            break;
        }
    }
    let initial_mild = build.mildness.mild;
    let faces_mild = build.face_checks.iter().all(|f| f.mild);
    let distance = distances(build, &current, config.grid_per_axis)?;
    if failure.is_none() && distance.shifted > config.epsilon {
        failure = Some(format!(
            "shifted distance {} exceeds epsilon {}",
            distance.shifted, config.epsilon
        ));
    }
    if failure.is_none() && distance.unshifted > config.epsilon {
        failure = Some(format!(
            "distance {} exceeds epsilon {} at {:?}",
            distance.unshifted,
            config.epsilon,
            distance.worst_point.as_ref().map(|p| p.iter().map(|x| x.to_string()).collect::<Vec<_>>())
        ));
    }
    let pass = failure.is_none() && initial_mild && faces_mild && steps.iter().all(|s| s.mild);
    Ok(PerturbReport {
        epsilon: config.epsilon.clone(),
        epsilon_prime: build.epsilon_prime.clone(),
        epsilon_second: build.epsilon_second.clone(),
        delta,
        attempts: build.attempts,
        q_vertices: qg.vertices().to_vec(),
        g: build.g_polynomial.to_json(),
        lowered: build.lowered.iter().map(|(q, d)| (q.clone(), d.clone())).collect(),
        initial_mild,
        faces_mild,
        steps,
        final_series: current.small_canonical_form()?.to_json(),
        distance,
        failure,
        pass,
    })
}

/// Build followed by replay.
pub fn run_pipeline(domain: &Arc<OmegaDomain>, points: &[Point], config: &PerturbConfig) -> Result<PerturbReport> {
    let build = build_q_and_g(domain, points, config)?;
    perturbed_replay(&build, config)
}
