//! Shrinking operators: raising one coefficient (`add_monomial`), the
//! single-point wave, its closure over a finite point set, level sets and
//! avalanche regions.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{DomainKind, OmegaDomain};
use crate::error::{Error, Result};
use crate::geometry::{halfspaces_to_geometry, measure, HalfSpace, Point, PolytopeGeometry};
use crate::lattice::LatticeVector;
use crate::scalar::{Mode, Scalar, DEFAULT_TOLERANCE};
use crate::series::{Completion, Monomial, TropicalSeries};
use crate::subdivision;

/// Default cap on the number of single-point waves in a closure.
pub const DEFAULT_STEP_CAP: usize = 1_000_000;

/// One application of the single-point wave.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveStep {
    pub point_index: usize,
    pub q0: LatticeVector,
    pub c: Scalar,
    pub value_before: Scalar,
    pub value_after: Scalar,
    /// Position of the step in the whole run (0-based).
    pub order: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Schedule {
    RoundRobin,
    /// Each pass visits every point once, in an order shuffled by a
    /// generator seeded once per run.
    SeededRandom { seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// A full pass produced only zero increments.
    StabilizedExactly,
    /// A full pass produced increments below the tolerance.
    ToleranceStopped,
    /// Stopped at the step cap.
    StepCap,
}

/// Ordered record of the non-trivial waves of a run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlowTrace {
    pub steps: Vec<WaveStep>,
    pub schedule: Schedule,
    pub status: Termination,
    /// Full passes over the point set, including the final quiet one.
    pub passes: usize,
    /// All waves applied, including zero increments.
    pub waves: usize,
}

#[derive(Serialize, Deserialize)]
struct StepJson {
    point_index: usize,
    q: Vec<i64>,
    c: String,
    order: usize,
}

impl FlowTrace {
    /// JSON array of `{point_index, q, c, order}` with `c` as an exact
    /// rational string.
    pub fn steps_json(&self) -> serde_json::Value {
        let steps: Vec<StepJson> = self
            .steps
            .iter()
            .map(|s| StepJson {
                point_index: s.point_index,
                q: s.q0.coords().to_vec(),
                c: s.c.to_string(),
                order: s.order,
            })
            .collect();
        serde_json::to_value(steps).expect("steps serialise")
    }

    /// Sum of all increments.
    pub fn total_increment(&self, mode: Mode) -> Scalar {
        self.steps.iter().fold(Scalar::zero(mode), |acc, s| acc + s.c.clone())
    }

    /// Re-applies the recorded raises to `init`.
    pub fn replay(&self, init: &TropicalSeries) -> Result<TropicalSeries> {
        let mut f = init.clone();
        for s in &self.steps {
            f = add_monomial(&f, &s.q0, &s.c, &Scalar::one(f.mode()))?;
        }
        Ok(f)
    }
}

/// Raises the coefficient of `q` by `c·t`.
pub fn add_monomial(f: &TropicalSeries, q: &LatticeVector, c: &Scalar, t: &Scalar) -> Result<TropicalSeries> {
    if c.is_negative() {
        return Err(Error::NegativeIncrement(c.to_string()));
    }
    let one = Scalar::one(t.mode());
    if t.is_negative() || t > &one {
        return Err(Error::FlowParameter(t.to_string()));
    }
    if q.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: q.dim(),
        });
    }
    if c.is_zero() || t.is_zero() {
        return Ok(f.clone());
    }
    let current = f.coefficient(q.coords()).unwrap_or_else(|| f.default_coefficient(q.coords()));
    f.with_coefficient(q, current + c * t)
}

/// Outcome of the single-point wave before it is placed in a run.
#[derive(Clone, Debug)]
pub(crate) struct WaveOutcome {
    pub q0: LatticeVector,
    pub c: Scalar,
    pub value_before: Scalar,
    pub value_after: Scalar,
    /// False when `p` already lies on the corner locus.
    pub smooth: bool,
}

fn require_interior(f: &TropicalSeries, p: &[Scalar]) -> Result<()> {
    f.domain().check_point(p)?;
    if !matches!(f.domain().locate(p), crate::domain::Location::Interior) {
        return Err(Error::NotInterior);
    }
    Ok(())
}

pub(crate) fn wave_outcome(f: &TropicalSeries, p: &[Scalar]) -> Result<WaveOutcome> {
    require_interior(f, p)?;
    let e = f.evaluate_full(p)?;
    if e.argmin.len() >= 2 {
        return Ok(WaveOutcome {
            q0: e.argmin[0].clone(),
            c: Scalar::zero(f.mode()),
            value_after: e.value.clone(),
            value_before: e.value,
            smooth: false,
        });
    }
    let q0 = e.argmin[0].clone();
    let second = f.evaluate_excluding(p, q0.coords())?;
    let c = &second.value - &e.value;
    Ok(WaveOutcome {
        q0,
        c,
        value_before: e.value,
        value_after: second.value,
        smooth: true,
    })
}

/// Waves act on functions, so raised coefficients that never attain the
/// minimum must first come down to their canonical values; otherwise a
/// raise could expose them. Waves preserve canonical form, so this is only
/// needed on entry. Domains without exact regions keep the input as given.
fn canonical_start(f: &TropicalSeries) -> Result<TropicalSeries> {
    if f.explicit().is_empty() || f.domain().geometry().is_none() {
        return Ok(f.clone());
    }
    match f.canonical_form() {
        Err(Error::Unsupported(_)) => Ok(f.clone()),
        other => other,
    }
}

/// The single-point wave `G_p`: raises the unique minimal monomial at `p`
/// (in canonical form) until it ties with the runner-up. Points already on
/// the corner locus leave `f` unchanged.
pub fn wave_single(f: &TropicalSeries, p: &[Scalar]) -> Result<(TropicalSeries, WaveStep)> {
    if !f.has_defaults() {
        return Err(Error::Invalid(
            "waves act on series with implicit defaults; call complete() first".into(),
        ));
    }
    require_interior(f, p)?;
    let f = &canonical_start(f)?;
    let o = wave_outcome(f, p)?;
    let g = if o.smooth {
        add_monomial(f, &o.q0, &o.c, &Scalar::one(f.mode()))?
    } else {
        f.clone()
    };
    Ok((
        g,
        WaveStep {
            point_index: 0,
            q0: o.q0,
            c: o.c,
            value_before: o.value_before,
            value_after: o.value_after,
            order: 0,
        },
    ))
}

/// Stopping rules for [`wave_closure`].
#[derive(Clone, Debug)]
pub struct ClosureOptions {
    pub schedule: Schedule,
    /// Only used in approximate mode; exact runs stop on a zero pass.
    pub tolerance: f64,
    pub step_cap: usize,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        ClosureOptions {
            schedule: Schedule::RoundRobin,
            tolerance: DEFAULT_TOLERANCE,
            step_cap: DEFAULT_STEP_CAP,
        }
    }
}

pub(crate) fn check_points(domain: &OmegaDomain, points: &[Point]) -> Result<()> {
    for (i, p) in points.iter().enumerate() {
        domain.check_point(p)?;
        if !matches!(domain.locate(p), crate::domain::Location::Interior) {
            return Err(Error::NotInterior);
        }
        if let Some(j) = points[..i].iter().position(|o| o == p) {
            return Err(Error::DuplicatePoint(j, i));
        }
    }
    Ok(())
}

/// Iterates single-point waves over `points` until nothing moves: the
/// smallest series above `f_init` that is non-smooth at every point.
pub fn wave_closure(
    f_init: &TropicalSeries,
    points: &[Point],
    options: &ClosureOptions,
) -> Result<(TropicalSeries, FlowTrace)> {
    if !f_init.has_defaults() {
        return Err(Error::Invalid(
            "closure needs a series with implicit defaults; call complete() first".into(),
        ));
    }
    check_points(f_init.domain(), points)?;
    let f_init = &canonical_start(f_init)?;
    let exact = f_init.mode() == Mode::Exact;
    let mut rng = match options.schedule {
        Schedule::SeededRandom { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        Schedule::RoundRobin => None,
    };
    let mut f = f_init.clone();
    let mut trace = FlowTrace {
        steps: Vec::new(),
        schedule: options.schedule,
        status: Termination::StabilizedExactly,
        passes: 0,
        waves: 0,
    };
    if points.is_empty() {
        return Ok((f, trace));
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    loop {
        if let Some(r) = rng.as_mut() {
            order.shuffle(r);
        }
        trace.passes += 1;
        let mut max_c = Scalar::zero(f.mode());
        for &i in &order {
            if trace.waves >= options.step_cap {
                trace.status = Termination::StepCap;
                return Err(Error::NonConvergence {
                    steps: trace.waves,
                    trace: Box::new(trace),
                });
            }
            trace.waves += 1;
            let o = wave_outcome(&f, &points[i])?;
            if !o.smooth || o.c.is_zero() {
                continue;
            }
            f = add_monomial(&f, &o.q0, &o.c, &Scalar::one(f.mode()))?;
            max_c = max_c.max(o.c.clone());
            let order_ix = trace.steps.len();
            trace.steps.push(WaveStep {
                point_index: i,
                q0: o.q0,
                c: o.c,
                value_before: o.value_before,
                value_after: o.value_after,
                order: order_ix,
            });
        }
        if max_c.is_zero() {
            trace.status = Termination::StabilizedExactly;
            break;
        }
        if !exact && max_c.to_f64() < options.tolerance {
            trace.status = Termination::ToleranceStopped;
            break;
        }
    }
    Ok((f, trace))
}

/// `{z : f(z) >= ε}` with the restriction of `f − ε` to it.
#[derive(Clone, Debug)]
pub struct LevelSet {
    pub domain: Arc<OmegaDomain>,
    /// Tropical polynomial on the level set, vanishing on its boundary.
    pub restricted: TropicalSeries,
}

impl LevelSet {
    pub fn geometry(&self) -> &PolytopeGeometry {
        self.domain.geometry().expect("level sets are polytopes")
    }
}

/// The level set `Ω_ε` as a rational polytope cut out by the small
/// canonical monomials.
pub fn level_set_polytope(f: &TropicalSeries, eps: &Scalar) -> Result<LevelSet> {
    if !eps.is_positive() {
        return Err(Error::Invalid(format!("level {eps} must be positive")));
    }
    let g = f.domain().require_polytope()?;
    let small = f.small_canonical_form()?;
    let n = f.dim();
    let mut hs: Vec<HalfSpace> = g.facet_halfspaces().cloned().collect();
    for (q, a) in small.explicit() {
        if q.is_zero() {
            if a < eps {
                return Err(Error::EpsilonTooLarge(eps.to_string()));
            }
            continue;
        }
        hs.push(HalfSpace::normalized(q.coords(), eps - a)?);
    }
    let geo = match halfspaces_to_geometry(&hs, n) {
        Ok(geo) => geo,
        Err(Error::DegenerateDomain(_)) => return Err(Error::EpsilonTooLarge(eps.to_string())),
        Err(e) => return Err(e),
    };
    let domain = Arc::new(OmegaDomain::from_geometry(geo));
    let restricted = TropicalSeries::polynomial(
        domain.clone(),
        small.explicit().iter().map(|(q, a)| Monomial::new(q.clone(), a - eps)),
    )?;
    Ok(LevelSet { domain, restricted })
}

/// The face containing `p`: the region changed by the wave at `p`.
#[derive(Clone, Debug)]
pub struct AvalancheRegion {
    /// `None` when `p` is on the corner locus.
    pub q0: Option<LatticeVector>,
    /// Exact region on polytope domains.
    pub geometry: Option<PolytopeGeometry>,
    pub measure: Scalar,
}

pub fn avalanche_region(f: &TropicalSeries, p: &[Scalar]) -> Result<AvalancheRegion> {
    require_interior(f, p)?;
    let e = f.evaluate_full(p)?;
    if e.argmin.len() >= 2 {
        return Ok(AvalancheRegion {
            q0: None,
            geometry: None,
            measure: Scalar::zero(f.mode()),
        });
    }
    let q0 = e.argmin[0].clone();
    region_measure(f, p, q0)
}

pub(crate) fn region_measure(f: &TropicalSeries, p: &[Scalar], q0: LatticeVector) -> Result<AvalancheRegion> {
    match f.domain().kind() {
        DomainKind::QPolytope(_) => {
            let cands: Vec<(LatticeVector, Scalar)> = f
                .dominating_candidates()?
                .into_iter()
                .map(|q| {
                    let a = f.coefficient(q.coords()).expect("candidate coefficient");
                    (q, a)
                })
                .collect();
            let a0 = f.coefficient(q0.coords()).expect("argmin has a coefficient");
            let geometry = subdivision::region_of(f, &q0, &a0, &cands)?;
            let m = geometry
                .as_ref()
                .map_or_else(|| Scalar::zero(f.mode()), |g| measure(g).value);
            Ok(AvalancheRegion {
                q0: Some(q0),
                geometry,
                measure: m,
            })
        }
        _ => {
            let m = radial_measure(f, p, &q0)?;
            Ok(AvalancheRegion {
                q0: Some(q0),
                geometry: None,
                measure: Scalar::approx(m),
            })
        }
    }
}

const RADIAL_DIRECTIONS_2D: usize = 512;
const RADIAL_DIRECTIONS_3D: usize = 4000;
const BISECTION_STEPS: usize = 32;
const BOUNDARY_MARGINS: [f64; 3] = [1e-3, 1e-4, 1e-5];
/// Most lattice points a boundary probe may enumerate.
const PROBE_POINT_BUDGET: f64 = 300_000.0;

/// Measure of the convex face `{T_{q0} <= min_{q≠q0} T_q}` around `p` by
/// radial bisection: along each ray the gap `g − T_{q0}` is concave and
/// positive at `p`, so the face boundary is its first zero.
fn radial_measure(f: &TropicalSeries, p: &[Scalar], q0: &LatticeVector) -> Result<f64> {
    let n = f.dim();
    let pf: Vec<f64> = p.iter().map(Scalar::to_f64).collect();
    let dirs: Vec<Vec<f64>> = match n {
        2 => (0..RADIAL_DIRECTIONS_2D)
            .map(|k| {
                let t = (k as f64 + 0.5) * std::f64::consts::TAU / RADIAL_DIRECTIONS_2D as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => fibonacci_sphere(RADIAL_DIRECTIONS_3D),
        _ => {
            return Err(Error::Unsupported(format!(
                "approximate avalanche measure in dimension {n}"
            )))
        }
    };
    let inside = |z: &[f64]| -> Result<Option<bool>> {
        let zs: Vec<Scalar> = z.iter().map(|&x| Scalar::approx(x)).collect();
        if !matches!(f.domain().locate(&zs), crate::domain::Location::Interior) {
            return Ok(None);
        }
        let t0 = f.term(q0.coords(), &zs).expect("argmin coefficient");
        Ok(Some(!f.any_term_below(&zs, q0.coords(), &t0)?))
    };
    let affordable = |z: &[f64]| -> bool {
        let zs: Vec<Scalar> = z.iter().map(|&x| Scalar::approx(x)).collect();
        let Some(t0) = f.term(q0.coords(), &zs) else { return false };
        f.domain()
            .default_terms_below(z, t0.to_f64())
            .is_none_or(|e| e.estimated_points() <= PROBE_POINT_BUDGET)
    };
    // Points too close to ∂Ω to certify within the budget count as inside;
    // the unreachable band is thinner than the smallest boundary margin.
    let probe = |z: &[f64]| -> Result<Option<bool>> {
        if affordable(z) {
            inside(z)
        } else {
            Ok(Some(true))
        }
    };
    let diam = {
        let (lo, hi) = approx_bounds(f.domain());
        lo.iter().zip(&hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt()
    };
    let mut radii = Vec::with_capacity(dirs.len());
    for u in &dirs {
        let at = |s: f64| -> Vec<f64> { pf.iter().zip(u).map(|(x, d)| x + s * d).collect() };
        // Exit distance from Ω along the ray, then the face boundary inside
        // it; probes stay a relative margin away from ∂Ω, where lattice
        // enumeration blows up.
        let (mut lo, mut hi) = (0.0, diam);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            let zs: Vec<Scalar> = at(mid).into_iter().map(Scalar::approx).collect();
            if f.domain().contains(&zs) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let exit = lo;
        // Faces of series on curved domains meet ∂Ω only at isolated
        // points, so probing at graded margins loses little area while
        // keeping the enumeration small.
        let mut lo = 0.0;
        let mut hi = None;
        for m in BOUNDARY_MARGINS {
            let s = exit * (1.0 - m);
            if probe(&at(s))? == Some(true) {
                lo = s;
            } else {
                hi = Some(s);
                break;
            }
        }
        let Some(mut hi) = hi else {
            radii.push(exit);
            continue;
        };
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            match probe(&at(mid))? {
                Some(true) => lo = mid,
                _ => hi = mid,
            }
        }
        radii.push(lo);
    }
    Ok(match n {
        2 => {
            let dt = std::f64::consts::TAU / dirs.len() as f64;
            radii.iter().map(|r| 0.5 * r * r * dt).sum()
        }
        _ => {
            let dw = 4.0 * std::f64::consts::PI / dirs.len() as f64;
            radii.iter().map(|r| r * r * r / 3.0 * dw).sum()
        }
    })
}

fn fibonacci_sphere(k: usize) -> Vec<Vec<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..k)
        .map(|i| {
            let y = 1.0 - 2.0 * (i as f64 + 0.5) / k as f64;
            let r = (1.0 - y * y).sqrt();
            let t = golden * i as f64;
            vec![r * t.cos(), y, r * t.sin()]
        })
        .collect()
}

/// Axis-aligned bounding box of the domain as floats.
pub(crate) fn approx_bounds(domain: &OmegaDomain) -> (Vec<f64>, Vec<f64>) {
    match domain.kind() {
        DomainKind::QPolytope(g) => {
            let (lo, hi) = g.bounding_box();
            (
                lo.iter().map(Scalar::to_f64).collect(),
                hi.iter().map(Scalar::to_f64).collect(),
            )
        }
        DomainKind::Ball { center, radius } => {
            let r = radius.to_f64();
            (
                center.iter().map(|c| c.to_f64() - r).collect(),
                center.iter().map(|c| c.to_f64() + r).collect(),
            )
        }
        DomainKind::SupportOracle(_) => {
            let n = domain.dim();
            let lo = (0..n)
                .map(|k| {
                    let mut e = vec![0i64; n];
                    e[k] = 1;
                    -domain.support_value(&e).to_f64()
                })
                .collect();
            let hi = (0..n)
                .map(|k| {
                    let mut e = vec![0i64; n];
                    e[k] = -1;
                    domain.support_value(&e).to_f64()
                })
                .collect();
            (lo, hi)
        }
    }
}

/// Caps a series at `eps`: `min(f, eps)`.
pub fn cap(f: &TropicalSeries, eps: &Scalar) -> Result<TropicalSeries> {
    let zero = LatticeVector::zero(f.dim());
    let current = f.coefficient(zero.coords()).unwrap_or_else(|| f.default_coefficient(zero.coords()));
    match f.completion() {
        Completion::Defaults => f.with_coefficient(&zero, current.min(eps.clone())),
        Completion::Finite => {
            let mut ms = f.monomials();
            match ms.iter_mut().find(|m| m.q.is_zero()) {
                Some(m) => m.a = m.a.clone().min(eps.clone()),
                None => ms.push(Monomial::new(zero, eps.clone())),
            }
            TropicalSeries::polynomial(f.domain().clone(), ms)
        }
    }
}
