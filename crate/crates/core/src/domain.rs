//! Compact convex domains: rational polytopes (exact) and balls or support
//! oracles (approximate). Support values `c_q = min_Ω q·z`, the default
//! monomials `l^q = q·z − c_q`, boundary-distance bounds and the weighted
//! distance `l_Ω = min_{q≠0} l^q`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    self, halfspaces_to_geometry, HalfSpace, IntegerHull, PolytopeGeometry, Point,
};
use crate::lattice::{self, sqrt_upper_bound, LatticeVector};
use crate::scalar::{Mode, Scalar, DEFAULT_TOLERANCE};

const SUPPORT_MEMO_LIMIT: usize = 1 << 16;

/// Callable `u ↦ inf_{z∈Ω} u·z` on real directions.
pub type SupportFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum DomainKind {
    QPolytope(PolytopeGeometry),
    Ball { center: Point, radius: Scalar },
    SupportOracle(SupportFn),
}

/// Where a point lies relative to Ω.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Interior,
    Boundary,
    Outside,
}

pub struct OmegaDomain {
    n: usize,
    kind: DomainKind,
    vertices_f64: Vec<Vec<f64>>,
    facet_norm_ub: Vec<Scalar>,
    support: RwLock<HashMap<LatticeVector, Scalar>>,
}

impl fmt::Debug for OmegaDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            DomainKind::QPolytope(g) => f
                .debug_struct("QPolytope")
                .field("halfspaces", &g.facet_halfspaces().collect::<Vec<_>>())
                .finish(),
            DomainKind::Ball { center, radius } => f
                .debug_struct("Ball")
                .field("center", center)
                .field("radius", radius)
                .finish(),
            DomainKind::SupportOracle(_) => write!(f, "SupportOracle(n={})", self.n),
        }
    }
}

impl OmegaDomain {
    /// A rational polytope `{z : normal_i · z >= offset_i}`.
    pub fn polytope(halfspaces: Vec<HalfSpace>) -> Result<Arc<Self>> {
        let n = halfspaces
            .first()
            .map(HalfSpace::dim)
            .ok_or_else(|| Error::DegenerateDomain("no halfspaces".into()))?;
        for h in &halfspaces {
            if !h.normal.is_primitive() {
                // Re-run the constructor check for its fix-it message.
                HalfSpace::new(h.normal.clone(), h.offset.clone())?;
            }
        }
        let geo = halfspaces_to_geometry(&halfspaces, n)?;
        Ok(Arc::new(Self::from_geometry(geo)))
    }

    pub fn from_geometry(geo: PolytopeGeometry) -> Self {
        let vertices_f64 = geo
            .vertices()
            .iter()
            .map(|v| v.iter().map(Scalar::to_f64).collect())
            .collect();
        let facet_norm_ub = geo
            .halfspaces()
            .iter()
            .map(|h| sqrt_upper_bound(h.normal.norm_sq()))
            .collect();
        OmegaDomain {
            n: geo.dim(),
            kind: DomainKind::QPolytope(geo),
            vertices_f64,
            facet_norm_ub,
            support: RwLock::new(HashMap::new()),
        }
    }

    /// The axis-aligned box `[lo, hi]^n` with rational bounds.
    pub fn rational_box(lo: &[Scalar], hi: &[Scalar]) -> Result<Arc<Self>> {
        Self::polytope(geometry::box_halfspaces(lo, hi))
    }

    /// `[0, side]^n`.
    pub fn cube(n: usize, side: i64) -> Result<Arc<Self>> {
        Self::rational_box(&vec![Scalar::int(0); n], &vec![Scalar::int(side); n])
    }

    pub fn unit_square() -> Arc<Self> {
        Self::cube(2, 1).expect("unit square is a valid domain")
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Arc<Self>> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::DegenerateDomain(format!("ball radius {radius} must be positive")));
        }
        if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::Invalid("ball center must be a finite point".into()));
        }
        Ok(Arc::new(OmegaDomain {
            n: center.len(),
            kind: DomainKind::Ball {
                center: center.into_iter().map(Scalar::approx).collect(),
                radius: Scalar::approx(radius),
            },
            vertices_f64: Vec::new(),
            facet_norm_ub: Vec::new(),
            support: RwLock::new(HashMap::new()),
        }))
    }

    /// A domain known only through its support function. The caller
    /// guarantees compactness and a non-empty interior.
    pub fn support_oracle(n: usize, h: SupportFn) -> Result<Arc<Self>> {
        if n == 0 {
            return Err(Error::Invalid("dimension must be at least 1".into()));
        }
        Ok(Arc::new(OmegaDomain {
            n,
            kind: DomainKind::SupportOracle(h),
            vertices_f64: Vec::new(),
            facet_norm_ub: Vec::new(),
            support: RwLock::new(HashMap::new()),
        }))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn mode(&self) -> Mode {
        match self.kind {
            DomainKind::QPolytope(_) => Mode::Exact,
            _ => Mode::Approximate,
        }
    }

    pub fn geometry(&self) -> Option<&PolytopeGeometry> {
        match &self.kind {
            DomainKind::QPolytope(g) => Some(g),
            _ => None,
        }
    }

    pub fn require_polytope(&self) -> Result<&PolytopeGeometry> {
        self.geometry()
            .ok_or_else(|| Error::Unsupported("this operation needs a rational polytope domain".into()))
    }

    /// Structural identity used to decide whether two series share a domain.
    pub fn same_as(&self, other: &OmegaDomain) -> bool {
        if std::ptr::eq(self, other) {
            return true;
        }
        match (&self.kind, &other.kind) {
            (DomainKind::QPolytope(a), DomainKind::QPolytope(b)) => {
                a.vertices().len() == b.vertices().len()
                    && a.vertices().iter().all(|v| b.vertices().contains(v))
            }
            (
                DomainKind::Ball { center: c1, radius: r1 },
                DomainKind::Ball { center: c2, radius: r2 },
            ) => c1 == c2 && r1 == r2,
            (DomainKind::SupportOracle(a), DomainKind::SupportOracle(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }

    pub fn check_point(&self, z: &[Scalar]) -> Result<()> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: z.len(),
            });
        }
        for c in z {
            c.ensure_mode(self.mode())?;
        }
        Ok(())
    }

    /// `c_q = inf_{z∈Ω} q·z`.
    pub fn support_value(&self, q: &[i64]) -> Scalar {
        debug_assert_eq!(q.len(), self.n);
        if q.iter().all(|&c| c == 0) {
            return Scalar::zero(self.mode());
        }
        if let Some(v) = self.support.read().unwrap().get(q) {
            return v.clone();
        }
        let v = self.compute_support(q);
        let mut memo = self.support.write().unwrap();
        if memo.len() < SUPPORT_MEMO_LIMIT {
            memo.entry(LatticeVector::from(q)).or_insert_with(|| v.clone());
        }
        v
    }

    fn compute_support(&self, q: &[i64]) -> Scalar {
        match &self.kind {
            DomainKind::QPolytope(g) => g
                .vertices()
                .iter()
                .map(|v| lattice::dot(q, v))
                .reduce(Scalar::min)
                .expect("polytope has vertices"),
            DomainKind::Ball { center, radius } => {
                let qc = lattice::dot(q, center);
                let norm = (lattice::norm_sq(q) as f64).sqrt();
                qc - Scalar::approx(radius.to_f64() * norm)
            }
            DomainKind::SupportOracle(h) => {
                let u: Vec<f64> = q.iter().map(|&c| c as f64).collect();
                Scalar::approx(h(&u))
            }
        }
    }

    /// Region holding every exponent whose default term at `z` is at most
    /// `t`. On a ball, `R|q| + q·(z − c) <= t` squares to the ellipsoid
    /// `qᵀ(R²I − vvᵀ)q + 2t q·v <= t²` with `v = z − c`; on a polytope it
    /// is a polyhedron. `None` for support oracles and off the interior.
    pub(crate) fn default_terms_below(&self, z: &[f64], t: f64) -> Option<lattice::TermRegion> {
        if !(t > 0.0) {
            return None;
        }
        let n = z.len();
        match &self.kind {
            DomainKind::Ball { center, radius } => {
                let r = radius.to_f64();
                let v: Vec<f64> = z.iter().zip(center).map(|(x, c)| x - c.to_f64()).collect();
                let gap = r * r - v.iter().map(|x| x * x).sum::<f64>();
                if !(gap > 0.0) {
                    return None;
                }
                let a = (0..n)
                    .map(|i| (0..n).map(|j| if i == j { r * r } else { 0.0 } - v[i] * v[j]).collect())
                    .collect();
                Some(lattice::TermRegion::Ellipsoid(lattice::Ellipsoid {
                    a,
                    center: v.iter().map(|x| -t * x / gap).collect(),
                    rho2: t * t * r * r / gap,
                }))
            }
            // `l^q(z) = max_v q·(z − v)` over the vertices; the region is
            // `t·(Ω − z)` polar, with vertices `t·n_i / slack_i`.
            DomainKind::QPolytope(g) => {
                let mut lo = vec![0.0; n];
                let mut hi = vec![0.0; n];
                for h in g.facet_halfspaces() {
                    let nf: Vec<f64> = h.normal.coords().iter().map(|&c| c as f64).collect();
                    let slack = lattice::dot_f64(h.normal.coords(), z) - h.offset.to_f64();
                    if !(slack > 0.0) {
                        return None;
                    }
                    for k in 0..n {
                        let v = t * nf[k] / slack;
                        lo[k] = f64::min(lo[k], v);
                        hi[k] = f64::max(hi[k], v);
                    }
                }
                let rows = self
                    .vertices_f64
                    .iter()
                    .map(|v| z.iter().zip(v).map(|(a, b)| a - b).collect())
                    .collect();
                Some(lattice::TermRegion::Polyhedron(lattice::Polyhedron { rows, rhs: t, lo, hi }))
            }
            DomainKind::SupportOracle(_) => None,
        }
    }

    /// Fast floating-point support value, used only for prefiltering.
    pub(crate) fn support_value_f64(&self, q: &[i64]) -> f64 {
        match &self.kind {
            DomainKind::QPolytope(_) => self
                .vertices_f64
                .iter()
                .map(|v| lattice::dot_f64(q, v))
                .fold(f64::INFINITY, f64::min),
            _ => self.support_value(q).to_f64(),
        }
    }

    /// The default monomial `l^q(z) = q·z − c_q`.
    pub fn default_monomial(&self, q: &[i64], z: &[Scalar]) -> Scalar {
        lattice::dot(q, z) - self.support_value(q)
    }

    pub fn locate(&self, z: &[Scalar]) -> Location {
        match &self.kind {
            DomainKind::QPolytope(g) => {
                let mut boundary = false;
                for h in g.facet_halfspaces() {
                    let s = h.slack(z);
                    if s.is_negative() {
                        return Location::Outside;
                    }
                    boundary |= s.is_zero();
                }
                if boundary {
                    Location::Boundary
                } else {
                    Location::Interior
                }
            }
            _ => {
                let d = self.signed_distance_f64(z);
                if d < -DEFAULT_TOLERANCE {
                    Location::Outside
                } else if d <= DEFAULT_TOLERANCE {
                    Location::Boundary
                } else {
                    Location::Interior
                }
            }
        }
    }

    pub fn contains(&self, z: &[Scalar]) -> bool {
        self.locate(z) != Location::Outside
    }

    /// Approximate signed distance to the boundary (positive inside) for
    /// ball and oracle domains.
    fn signed_distance_f64(&self, z: &[Scalar]) -> f64 {
        let zf: Vec<f64> = z.iter().map(Scalar::to_f64).collect();
        match &self.kind {
            DomainKind::Ball { center, radius } => {
                let d2: f64 = zf
                    .iter()
                    .zip(center)
                    .map(|(a, c)| (a - c.to_f64()).powi(2))
                    .sum();
                radius.to_f64() - d2.sqrt()
            }
            DomainKind::SupportOracle(h) => sphere_directions(self.n)
                .iter()
                .map(|u| lattice_free_dot(u, &zf) - h(u))
                .fold(f64::INFINITY, f64::min),
            DomainKind::QPolytope(_) => unreachable!(),
        }
    }

    /// Positive lower bound on the Euclidean distance from `z` to ∂Ω.
    pub fn boundary_distance_lb(&self, z: &[Scalar]) -> Result<Scalar> {
        self.check_point(z)?;
        match &self.kind {
            DomainKind::QPolytope(g) => {
                let mut best: Option<Scalar> = None;
                for (i, h) in g.halfspaces().iter().enumerate() {
                    if g.is_redundant(i) {
                        continue;
                    }
                    let s = h.slack(z);
                    if !s.is_positive() {
                        return Err(if s.is_negative() {
                            Error::OutsideDomain
                        } else {
                            Error::NotInterior
                        });
                    }
                    let b = s / &self.facet_norm_ub[i];
                    best = Some(match best {
                        None => b,
                        Some(x) => x.min(b),
                    });
                }
                Ok(best.expect("polytope has facets"))
            }
            _ => {
                let d = self.signed_distance_f64(z);
                if d < -DEFAULT_TOLERANCE {
                    Err(Error::OutsideDomain)
                } else if d <= DEFAULT_TOLERANCE {
                    Err(Error::NotInterior)
                } else {
                    Ok(Scalar::approx(d))
                }
            }
        }
    }

    /// Cheap upper bound on `l_Ω(z)` from a few default monomials, with the
    /// exponent attaining it.
    pub(crate) fn weighted_distance_seed(&self, z: &[Scalar]) -> (Scalar, LatticeVector) {
        let candidates: Vec<LatticeVector> = match &self.kind {
            DomainKind::QPolytope(g) => g.facet_halfspaces().map(|h| h.normal.clone()).collect(),
            DomainKind::Ball { center, .. } => {
                let mut c: Vec<LatticeVector> = self.axis_directions();
                // Lattice approximations of the inward direction at the
                // nearest boundary point: there `q·z` is close to its
                // minimum over the ball, so these beat the axes near ∂Ω.
                let u: Vec<f64> = z.iter().zip(center).map(|(a, b)| b.to_f64() - a.to_f64()).collect();
                let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 0.0 {
                    for k in 1..=64 {
                        let q: Vec<i64> = u.iter().map(|x| (x / norm * k as f64).round() as i64).collect();
                        if q.iter().any(|&x| x != 0) {
                            c.push(LatticeVector::new(q));
                        }
                    }
                }
                c
            }
            DomainKind::SupportOracle(_) => self.axis_directions(),
        };
        candidates
            .into_iter()
            .map(|q| (self.default_monomial(q.coords(), z), q))
            .reduce(|a, b| if b.0 < a.0 { b } else { a })
            .expect("at least one seed direction")
    }

    fn axis_directions(&self) -> Vec<LatticeVector> {
        (0..self.n)
            .flat_map(|k| [LatticeVector::unit(self.n, k, 1), LatticeVector::unit(self.n, k, -1)])
            .collect()
    }

    /// `l_Ω(z) = min_{q≠0} (q·z − c_q)`, attained by a concrete exponent.
    pub fn weighted_distance(&self, z: &[Scalar]) -> Result<WeightedDistance> {
        self.check_point(z)?;
        match self.locate(z) {
            Location::Outside => return Err(Error::OutsideDomain),
            Location::Boundary => {
                let (_, q) = self.weighted_distance_seed(z);
                return Ok(WeightedDistance {
                    value: Scalar::zero(self.mode()),
                    minimizer: q,
                    on_boundary: true,
                });
            }
            Location::Interior => {}
        }
        let (seed, seed_q) = self.weighted_distance_seed(z);
        let r = self.boundary_distance_lb(z)?;
        let bound = &seed / &r;
        let bound_sq = &bound * &bound;
        let mut best = (seed, seed_q);
        let limit = lattice::floor_bound(&bound_sq)?;
        lattice::check_ball_cap(limit, self.n, lattice::DEFAULT_LATTICE_CAP)?;
        lattice::for_each_in_ball(limit, self.n, |q| {
            if q.iter().all(|&c| c == 0) {
                return;
            }
            let v = self.default_monomial(q, z);
            if v < best.0 {
                best = (v, LatticeVector::from(q));
            }
        });
        Ok(WeightedDistance {
            value: best.0,
            minimizer: best.1,
            on_boundary: false,
        })
    }

    /// Mildness of every face of a polytope domain.
    pub fn mild_faces_check(&self) -> Result<Vec<FaceMildness>> {
        let g = self.require_polytope()?;
        let n = g.dim();
        let mut out = Vec::new();
        for k in 0..n {
            for face in g.faces(k) {
                let normals: Vec<LatticeVector> = face
                    .facets
                    .iter()
                    .map(|&i| g.halfspaces()[i].normal.clone())
                    .collect();
                let (mild, offending) = if k + 1 == n {
                    (true, None)
                } else {
                    let mut pts = normals.clone();
                    pts.push(LatticeVector::zero(n));
                    lattice_free_hull(&pts)
                };
                out.push(FaceMildness {
                    dim: k,
                    vertices: face.vertices,
                    normals,
                    mild,
                    offending,
                });
            }
        }
        Ok(out)
    }

    /// Serializable description, when one exists.
    pub fn spec(&self) -> Option<DomainSpec> {
        match &self.kind {
            DomainKind::QPolytope(g) => Some(DomainSpec::Halfspaces {
                halfspaces: g
                    .facet_halfspaces()
                    .map(|h| HalfSpaceSpec {
                        normal: h.normal.coords().to_vec(),
                        offset: h.offset.to_string(),
                    })
                    .collect(),
            }),
            DomainKind::Ball { center, radius } => Some(DomainSpec::Ball {
                center: center.iter().map(Scalar::to_f64).collect(),
                radius: radius.to_f64(),
            }),
            DomainKind::SupportOracle(_) => None,
        }
    }
}

/// `(lattice-free?, first extra lattice point)` for the hull of `points`.
pub(crate) fn lattice_free_hull(points: &[LatticeVector]) -> (bool, Option<LatticeVector>) {
    let hull = IntegerHull::new(points);
    let extreme = hull.extreme_points();
    let extra = hull.lattice_points().into_iter().find(|p| !extreme.contains(p));
    (extra.is_none(), extra)
}

fn lattice_free_dot(u: &[f64], z: &[f64]) -> f64 {
    u.iter().zip(z).map(|(a, b)| a * b).sum()
}

/// Deterministic, roughly uniform unit directions.
fn sphere_directions(n: usize) -> Vec<Vec<f64>> {
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..720)
            .map(|k| {
                let t = k as f64 * std::f64::consts::TAU / 720.0;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            // Fibonacci sphere in 3-D, coordinate directions otherwise.
            if n == 3 {
                let m = 2000;
                let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
                (0..m)
                    .map(|i| {
                        let y = 1.0 - 2.0 * (i as f64 + 0.5) / m as f64;
                        let r = (1.0 - y * y).sqrt();
                        let th = golden * i as f64;
                        vec![r * th.cos(), y, r * th.sin()]
                    })
                    .collect()
            } else {
                (0..n)
                    .flat_map(|k| {
                        [1.0, -1.0].map(|s| {
                            let mut v = vec![0.0; n];
                            v[k] = s;
                            v
                        })
                    })
                    .collect()
            }
        }
    }
}

/// Result of [`OmegaDomain::weighted_distance`].
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedDistance {
    pub value: Scalar,
    pub minimizer: LatticeVector,
    pub on_boundary: bool,
}

/// Mildness verdict for one face of a polytope domain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FaceMildness {
    pub dim: usize,
    pub vertices: Vec<usize>,
    pub normals: Vec<LatticeVector>,
    pub mild: bool,
    pub offending: Option<LatticeVector>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfSpaceSpec {
    pub normal: Vec<i64>,
    pub offset: String,
}

/// Scene-file description of a domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DomainSpec {
    Halfspaces { halfspaces: Vec<HalfSpaceSpec> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl DomainSpec {
    pub fn mode(&self) -> Mode {
        match self {
            DomainSpec::Halfspaces { .. } => Mode::Exact,
            DomainSpec::Ball { .. } => Mode::Approximate,
        }
    }

    pub fn build(&self) -> Result<Arc<OmegaDomain>> {
        match self {
            DomainSpec::Halfspaces { halfspaces } => {
                let hs = halfspaces
                    .iter()
                    .map(|h| {
                        HalfSpace::new(
                            LatticeVector::new(h.normal.clone()),
                            Scalar::parse(&h.offset, Mode::Exact)?,
                        )
                    })
                    .collect::<Result<Vec<_>>>()?;
                OmegaDomain::polytope(hs)
            }
            DomainSpec::Ball { center, radius } => OmegaDomain::ball(center.clone(), *radius),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rational_point;

    fn hs(normal: &[i64], offset: Scalar) -> HalfSpace {
        HalfSpace::new(LatticeVector::new(normal.to_vec()), offset).unwrap()
    }

    fn triangle() -> Arc<OmegaDomain> {
        OmegaDomain::polytope(vec![
            hs(&[1, 0], Scalar::int(0)),
            hs(&[0, 1], Scalar::int(0)),
            hs(&[-1, -1], Scalar::int(-1)),
        ])
        .unwrap()
    }

    #[test]
    fn support_values_of_square_and_ball() {
        let sq = OmegaDomain::unit_square();
        assert_eq!(sq.support_value(&[-1, -1]), Scalar::int(-2));
        assert_eq!(sq.support_value(&[2, 3]), Scalar::int(0));
        assert_eq!(sq.support_value(&[0, 0]), Scalar::int(0));
        let b = OmegaDomain::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert!((b.support_value(&[1, 0]).to_f64() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_distance_bounds() {
        let sq = OmegaDomain::unit_square();
        let p = rational_point(&[(1, 2), (1, 2)]);
        assert_eq!(sq.boundary_distance_lb(&p).unwrap(), Scalar::ratio(1, 2));
        let p = rational_point(&[(1, 5), (1, 2)]);
        assert_eq!(sq.boundary_distance_lb(&p).unwrap(), Scalar::ratio(1, 5));
        let p = rational_point(&[(0, 1), (1, 2)]);
        assert!(matches!(sq.boundary_distance_lb(&p), Err(Error::NotInterior)));
    }

    #[test]
    fn triangle_bound_is_below_true_distance() {
        let t = triangle();
        let p = rational_point(&[(1, 4), (1, 4)]);
        let lb = t.boundary_distance_lb(&p).unwrap();
        // true distance: min(1/4, 1/4, (1/2)/sqrt(2))
        let truth = 0.25f64.min(0.5 / 2f64.sqrt());
        assert!(lb.to_f64() <= truth + 1e-15);
        assert!(lb.to_f64() > truth - 1e-5);
        assert_eq!(lb, Scalar::ratio(1, 4));
    }

    #[test]
    fn weighted_distance_examples() {
        let sq = OmegaDomain::unit_square();
        let w = sq.weighted_distance(&rational_point(&[(1, 2), (1, 2)])).unwrap();
        assert_eq!(w.value, Scalar::ratio(1, 2));
        // brute force over |q| <= 2
        for x in -2i64..=2 {
            for y in -2i64..=2 {
                if (x, y) != (0, 0) && x * x + y * y <= 4 {
                    let v = sq.default_monomial(&[x, y], &rational_point(&[(1, 2), (1, 2)]));
                    assert!(v >= Scalar::ratio(1, 2));
                }
            }
        }
        let w = sq.weighted_distance(&rational_point(&[(0, 1), (1, 2)])).unwrap();
        assert!(w.on_boundary && w.value.is_zero());
        let b = OmegaDomain::ball(vec![0.0, 0.0], 1.0).unwrap();
        let w = b.weighted_distance(&[Scalar::approx(0.0), Scalar::approx(0.0)]).unwrap();
        assert!((w.value.to_f64() - 1.0).abs() < 1e-9);
        assert!(matches!(
            sq.weighted_distance(&rational_point(&[(2, 1), (1, 2)])),
            Err(Error::OutsideDomain)
        ));
    }

    #[test]
    fn mild_faces() {
        let sq = OmegaDomain::unit_square();
        assert!(sq.mild_faces_check().unwrap().iter().all(|f| f.mild));
        // Corner at the origin with facet normals (1,0) and (1,2).
        let d = OmegaDomain::polytope(vec![
            hs(&[1, 0], Scalar::int(0)),
            hs(&[1, 2], Scalar::int(0)),
            hs(&[-1, 0], Scalar::int(-1)),
            hs(&[0, -1], Scalar::int(-1)),
        ])
        .unwrap();
        let report = d.mild_faces_check().unwrap();
        let origin_corner = report
            .iter()
            .find(|f| {
                f.dim == 0
                    && f.normals.contains(&LatticeVector::new(vec![1, 0]))
                    && f.normals.contains(&LatticeVector::new(vec![1, 2]))
            })
            .unwrap();
        assert!(!origin_corner.mild);
        assert_eq!(origin_corner.offending, Some(LatticeVector::new(vec![1, 1])));
        assert!(report.iter().filter(|f| f.dim == 1).all(|f| f.mild));
    }

    #[test]
    fn oracle_domain_matches_ball() {
        let h: SupportFn = Arc::new(|u: &[f64]| -(u[0] * u[0] + u[1] * u[1]).sqrt());
        let d = OmegaDomain::support_oracle(2, h).unwrap();
        let w = d.weighted_distance(&[Scalar::approx(0.0), Scalar::approx(0.0)]).unwrap();
        assert!((w.value.to_f64() - 1.0).abs() < 1e-9);
        let lb = d
            .boundary_distance_lb(&[Scalar::approx(0.5), Scalar::approx(0.0)])
            .unwrap();
        assert!((lb.to_f64() - 0.5).abs() < 1e-4);
    }

    #[test]
    fn spec_round_trip_and_fix_it() {
        let spec = OmegaDomain::unit_square().spec().unwrap();
        let d = spec.build().unwrap();
        assert!(d.same_as(&OmegaDomain::unit_square()));
        let bad = DomainSpec::Halfspaces {
            halfspaces: vec![HalfSpaceSpec {
                normal: vec![2, 0],
                offset: "0".into(),
            }],
        };
        assert!(bad.build().unwrap_err().to_string().contains("not primitive"));
    }
}
