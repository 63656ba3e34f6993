//! Ω-tropical series `f(z) = min_q (q·z + a_q)`.
//!
//! A series with implicit defaults stores only the exponents whose
//! coefficient was raised above the default `a_q = −c_q`; every other
//! exponent contributes its default monomial `l^q`. Evaluation enumerates
//! those defaults inside a certified lattice ball: since
//! `l^q(z) >= |q|·dist(z, ∂Ω)`, no exponent with `|q| > best / R` can beat a
//! known value `best` when `R` bounds the boundary distance from below.
//!
//! A finite series is an ordinary tropical polynomial on Ω (no implicit
//! terms); small canonical forms and level-set restrictions are finite.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{DomainKind, DomainSpec, Location, OmegaDomain};
use crate::error::{Error, Result};
use crate::geometry::{lp_feasible, LinearConstraint, Relation};
use crate::lattice::{self, sqrt_upper_bound, LatticeVector};
use crate::scalar::{Mode, Scalar, DEFAULT_TOLERANCE};
use crate::subdivision;

/// How exponents absent from the explicit map behave.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Completion {
    /// Every other exponent carries its default coefficient `−c_q`.
    Defaults,
    /// Only the explicit monomials exist.
    Finite,
}

/// `q·z + a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub q: LatticeVector,
    pub a: Scalar,
}

impl Monomial {
    pub fn new(q: impl Into<LatticeVector>, a: Scalar) -> Self {
        Monomial { q: q.into(), a }
    }
}

/// Value and full tie set at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub value: Scalar,
    pub argmin: Vec<LatticeVector>,
}

#[derive(Clone, Debug)]
pub struct TropicalSeries {
    domain: Arc<OmegaDomain>,
    coeffs: BTreeMap<LatticeVector, Scalar>,
    completion: Completion,
}

/// Threshold widened so float ties at `t` are still enumerated.
fn tie_margin(t: f64) -> f64 {
    t + 4.0 * DEFAULT_TOLERANCE * (1.0 + t.abs())
}

impl TropicalSeries {
    /// `0_Ω`: every coefficient at its default.
    pub fn zero(domain: Arc<OmegaDomain>) -> Self {
        TropicalSeries {
            domain,
            coeffs: BTreeMap::new(),
            completion: Completion::Defaults,
        }
    }

    /// Defaults everywhere except the listed coefficients.
    pub fn with_coefficients(
        domain: Arc<OmegaDomain>,
        monomials: impl IntoIterator<Item = Monomial>,
    ) -> Result<Self> {
        let mut s = Self::zero(domain);
        for m in monomials {
            s.set(m.q, m.a)?;
        }
        Ok(s)
    }

    /// A tropical polynomial with exactly the listed monomials.
    pub fn polynomial(
        domain: Arc<OmegaDomain>,
        monomials: impl IntoIterator<Item = Monomial>,
    ) -> Result<Self> {
        let mut s = TropicalSeries {
            domain,
            coeffs: BTreeMap::new(),
            completion: Completion::Finite,
        };
        for m in monomials {
            s.set(m.q, m.a)?;
        }
        if s.coeffs.is_empty() {
            return Err(Error::Invalid("a tropical polynomial needs at least one monomial".into()));
        }
        Ok(s)
    }

    fn set(&mut self, q: LatticeVector, a: Scalar) -> Result<()> {
        let n = self.domain.dim();
        if q.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: q.dim(),
            });
        }
        a.ensure_mode(self.domain.mode())?;
        let default = self.default_coefficient(q.coords());
        if a < default && !a.ties(&default, DEFAULT_TOLERANCE) {
            return Err(Error::Invalid(format!(
                "monomial {q} with coefficient {a} is negative somewhere on the domain \
                 (needs a >= {default})"
            )));
        }
        if self.completion == Completion::Defaults && a.ties(&default, 0.0) {
            self.coeffs.remove(&q);
        } else {
            self.coeffs.insert(q, a);
        }
        Ok(())
    }

    /// Same series with one coefficient replaced.
    pub fn with_coefficient(&self, q: &LatticeVector, a: Scalar) -> Result<Self> {
        if self.completion == Completion::Finite && !self.coeffs.contains_key(q) {
            return Err(Error::Invalid(format!(
                "exponent {q} is not a monomial of this tropical polynomial"
            )));
        }
        let mut s = self.clone();
        s.set(q.clone(), a)?;
        Ok(s)
    }

    pub fn domain(&self) -> &Arc<OmegaDomain> {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn mode(&self) -> Mode {
        self.domain.mode()
    }

    pub fn completion(&self) -> Completion {
        self.completion
    }

    pub fn has_defaults(&self) -> bool {
        self.completion == Completion::Defaults
    }

    /// Explicit coefficients: raised ones for series with defaults, all of
    /// them for polynomials.
    pub fn explicit(&self) -> &BTreeMap<LatticeVector, Scalar> {
        &self.coeffs
    }

    pub fn monomials(&self) -> Vec<Monomial> {
        self.coeffs
            .iter()
            .map(|(q, a)| Monomial::new(q.clone(), a.clone()))
            .collect()
    }

    /// `−c_q`.
    pub fn default_coefficient(&self, q: &[i64]) -> Scalar {
        -self.domain.support_value(q)
    }

    /// `a_q`, or `None` for an exponent a polynomial does not contain.
    pub fn coefficient(&self, q: &[i64]) -> Option<Scalar> {
        match self.coeffs.get(q) {
            Some(a) => Some(a.clone()),
            None if self.has_defaults() => Some(self.default_coefficient(q)),
            None => None,
        }
    }

    /// `a_q + c_q`, how far a coefficient sits above its default.
    pub fn raise(&self, q: &[i64]) -> Scalar {
        match self.coeffs.get(q) {
            Some(a) => a + &self.domain.support_value(q),
            None => Scalar::zero(self.mode()),
        }
    }

    /// `q·z + a_q`.
    pub fn term(&self, q: &[i64], z: &[Scalar]) -> Option<Scalar> {
        self.coefficient(q).map(|a| lattice::dot(q, z) + a)
    }

    pub fn evaluate(&self, z: &[Scalar]) -> Result<Scalar> {
        Ok(self.scan(z, None)?.value)
    }

    pub fn argmin_set(&self, z: &[Scalar]) -> Result<Vec<LatticeVector>> {
        Ok(self.scan(z, None)?.argmin)
    }

    pub fn evaluate_full(&self, z: &[Scalar]) -> Result<Evaluation> {
        self.scan(z, None)
    }

    /// Minimum over all exponents except `exclude`.
    pub fn evaluate_excluding(&self, z: &[Scalar], exclude: &[i64]) -> Result<Evaluation> {
        self.scan(z, Some(exclude))
    }

    fn scan(&self, z: &[Scalar], exclude: Option<&[i64]>) -> Result<Evaluation> {
        self.domain.check_point(z)?;
        let loc = self.domain.locate(z);
        if loc == Location::Outside {
            return Err(Error::OutsideDomain);
        }
        let mut acc = TieSet::new(self.mode());
        if !self.has_defaults() {
            for (q, a) in &self.coeffs {
                if Some(q.coords()) != exclude {
                    acc.offer(q.coords(), lattice::dot(q.coords(), z) + a);
                }
            }
            return acc.finish();
        }
        if loc == Location::Boundary && exclude.is_none() {
            // Ω-tropical series vanish on the boundary.
            let zero = Scalar::zero(self.mode());
            let argmin = match self.dominating_candidates() {
                Ok(c) => c
                    .into_iter()
                    .filter(|q| self.term(q.coords(), z).is_some_and(|v| v.ties(&zero, DEFAULT_TOLERANCE)))
                    .collect(),
                Err(_) => vec![self.domain.weighted_distance_seed(z).1],
            };
            return Ok(Evaluation { value: zero, argmin });
        }
        let r = self.domain.boundary_distance_lb(z)?;
        // Seed with cheap exact candidates: zero, raised terms and facet
        // directions.
        let n = self.dim();
        let mut seeds: Vec<LatticeVector> = vec![LatticeVector::zero(n)];
        seeds.extend(self.coeffs.keys().cloned());
        seeds.push(self.domain.weighted_distance_seed(z).1);
        for q in &seeds {
            if Some(q.coords()) != exclude {
                acc.offer(q.coords(), self.term(q.coords(), z).unwrap());
            }
        }
        let best = acc.best().cloned().unwrap_or_else(|| Scalar::zero(self.mode()));
        let zf: Vec<f64> = z.iter().map(Scalar::to_f64).collect();
        if let Some(e) = self.domain.default_terms_below(&zf, tie_margin(best.to_f64())) {
            e.for_each(lattice::DEFAULT_LATTICE_CAP, |q| {
                if Some(q) != exclude {
                    acc.offer(q, self.term(q, z).unwrap());
                }
            })?;
            return acc.finish();
        }
        let bound = &best / &r;
        let limit = lattice::floor_bound(&(&bound * &bound))?;
        lattice::check_ball_cap(limit, n, lattice::DEFAULT_LATTICE_CAP)?;

        let exact = self.mode() == Mode::Exact;
        let coeff_f64: BTreeMap<&[i64], f64> = self
            .coeffs
            .iter()
            .map(|(q, a)| (q.coords(), a.to_f64()))
            .collect();
        lattice::for_each_in_ball(limit, n, |q| {
            if Some(q) == exclude {
                return;
            }
            if exact {
                let c = match coeff_f64.get(q) {
                    Some(a) => -a,
                    None => self.domain.support_value_f64(q),
                };
                let qz = lattice::dot_f64(q, &zf);
                let v = qz - c;
                let best_f = acc.best_f64();
                let slack = 1e-9 * (1.0 + qz.abs() + c.abs() + best_f.abs());
                if v > best_f + slack {
                    return;
                }
            }
            acc.offer(q, self.term(q, z).unwrap());
        });
        acc.finish()
    }

    /// Whether some exponent other than `exclude` has a term strictly below
    /// `threshold` at the interior point `z`. Cheap seeds are tried first;
    /// the lattice ball only has to reach `threshold / dist(z, ∂Ω)`.
    pub fn any_term_below(&self, z: &[Scalar], exclude: &[i64], threshold: &Scalar) -> Result<bool> {
        let below = |v: &Scalar| match self.mode() {
            Mode::Exact => v < threshold,
            Mode::Approximate => {
                v.to_f64() < threshold.to_f64() - DEFAULT_TOLERANCE * (1.0 + threshold.to_f64().abs())
            }
        };
        let n = self.dim();
        let mut seeds: Vec<LatticeVector> = vec![LatticeVector::zero(n)];
        seeds.extend(self.coeffs.keys().cloned());
        if !self.has_defaults() {
            return Ok(seeds
                .iter()
                .skip(1)
                .any(|q| q.coords() != exclude && below(&self.term(q.coords(), z).unwrap())));
        }
        self.domain.check_point(z)?;
        seeds.push(self.domain.weighted_distance_seed(z).1);
        for q in &seeds {
            if q.coords() != exclude && below(&self.term(q.coords(), z).unwrap()) {
                return Ok(true);
            }
        }
        if !threshold.is_positive() {
            return Ok(false);
        }
        let mut found = false;
        let zf: Vec<f64> = z.iter().map(Scalar::to_f64).collect();
        if let Some(e) = self.domain.default_terms_below(&zf, tie_margin(threshold.to_f64())) {
            e.for_each(lattice::DEFAULT_LATTICE_CAP, |q| {
                if !found && q != exclude && below(&self.term(q, z).unwrap()) {
                    found = true;
                }
            })?;
            return Ok(found);
        }
        let r = self.domain.boundary_distance_lb(z)?;
        let bound = threshold / &r;
        let limit = lattice::floor_bound(&(&bound * &bound))?;
        lattice::check_ball_cap(limit, n, lattice::DEFAULT_LATTICE_CAP)?;
        lattice::for_each_in_ball(limit, n, |q| {
            if !found && q != exclude && below(&self.term(q, z).unwrap()) {
                found = true;
            }
        });
        Ok(found)
    }

    /// Every exponent that can attain the minimum somewhere in Ω°.
    ///
    /// For polytopes, `f <= k_i·(n_i·z − b_i) <= k_i·|n_i|·dist(z, ∂Ω)` near
    /// the facet realising the distance, where `k_i n_i` is the smallest
    /// unraised multiple of the facet normal; together with
    /// `l^q >= |q|·dist` this bounds every possibly-minimal unraised `q`.
    pub fn dominating_candidates(&self) -> Result<Vec<LatticeVector>> {
        if !self.has_defaults() {
            return Ok(self.coeffs.keys().cloned().collect());
        }
        let g = match self.domain.kind() {
            DomainKind::QPolytope(g) => g,
            _ => {
                return Err(Error::Unsupported(
                    "finite dominating sets exist only on polytope domains".into(),
                ))
            }
        };
        let mut radius = Scalar::int(0);
        for h in g.facet_halfspaces() {
            let mut k = 1i64;
            while self.coeffs.contains_key(&h.normal.scaled(k)) {
                k += 1;
            }
            let r = sqrt_upper_bound(h.normal.norm_sq()).mul_int(k);
            radius = radius.max(r);
        }
        let mut out = lattice::lattice_ball(&(&radius * &radius), self.dim())?;
        for q in self.coeffs.keys() {
            if out.binary_search(q).is_err() {
                out.push(q.clone());
            }
        }
        out.sort();
        Ok(out)
    }

    /// Coefficients lowered to `sup_Ω (f(z) − q·z)` without changing `f`.
    pub fn canonical_form(&self) -> Result<Self> {
        let vertices = subdivision::region_vertices(self)?;
        let values: Vec<Scalar> = vertices
            .iter()
            .map(|v| self.evaluate(v))
            .collect::<Result<_>>()?;
        let sup = |q: &[i64]| -> Scalar {
            vertices
                .iter()
                .zip(&values)
                .map(|(v, fv)| fv - &lattice::dot(q, v))
                .reduce(Scalar::max)
                .expect("regions have vertices")
        };
        let mut out = TropicalSeries {
            domain: self.domain.clone(),
            coeffs: BTreeMap::new(),
            completion: self.completion,
        };
        for q in self.coeffs.keys() {
            let a = sup(q.coords());
            out.set(q.clone(), a)?;
        }
        Ok(out)
    }

    /// The canonical monomials that are strictly minimal on an open subset
    /// of Ω, as a tropical polynomial.
    pub fn small_canonical_form(&self) -> Result<Self> {
        let canon = self.canonical_form()?;
        let candidates = canon.dominating_candidates()?;
        let coeff: Vec<Scalar> = candidates
            .iter()
            .map(|q| canon.coefficient(q.coords()).unwrap())
            .collect();
        let keep: Vec<bool> = if self.dim() == 2 {
            let regions = subdivision::linearity_regions(&canon)?;
            candidates
                .iter()
                .map(|q| regions.iter().any(|r| &r.q == q))
                .collect()
        } else {
            (0..candidates.len())
                .map(|i| strictly_minimal_somewhere(&canon, &candidates, &coeff, i))
                .collect::<Result<_>>()?
        };
        let monomials = candidates
            .into_iter()
            .zip(coeff)
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|((q, a), _)| Monomial::new(q, a));
        TropicalSeries::polynomial(self.domain.clone(), monomials)
    }

    /// Converts an Ω-tropical polynomial (non-negative, zero on ∂Ω) into a
    /// series with implicit defaults and the same values on Ω.
    ///
    /// With `M = max |q|` over the polynomial, `f <= M·dist(z, ∂Ω)` while
    /// `l^q >= |q|·dist`, so only exponents with `|q| <= M` need canonical
    /// coefficients; the rest keep their defaults.
    pub fn complete(&self) -> Result<Self> {
        if self.has_defaults() {
            return Ok(self.clone());
        }
        let g = self.domain.require_polytope()?;
        for v in g.vertices() {
            if !self.evaluate(v)?.is_zero() {
                return Err(Error::Invalid(
                    "polynomial does not vanish on the domain boundary".into(),
                ));
            }
        }
        let max_sq = self.coeffs.keys().map(LatticeVector::norm_sq).max().unwrap_or(0);
        let vertices = subdivision::region_vertices(self)?;
        let values: Vec<Scalar> = vertices
            .iter()
            .map(|v| self.evaluate(v))
            .collect::<Result<_>>()?;
        let mut out = TropicalSeries::zero(self.domain.clone());
        for q in lattice::lattice_ball(&Scalar::int(max_sq), self.dim())? {
            let a = vertices
                .iter()
                .zip(&values)
                .map(|(v, fv)| fv - &lattice::dot(q.coords(), v))
                .reduce(Scalar::max)
                .unwrap();
            out.set(q, a)?;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> SeriesJson {
        let mut monomials: Vec<MonomialJson> = Vec::new();
        if self.has_defaults() && !self.coeffs.contains_key(&LatticeVector::zero(self.dim())) {
            monomials.push(MonomialJson {
                q: vec![0; self.dim()],
                a: self.coefficient(&vec![0; self.dim()]).unwrap(),
            });
        }
        monomials.extend(self.coeffs.iter().map(|(q, a)| MonomialJson {
            q: q.coords().to_vec(),
            a: a.clone(),
        }));
        monomials.sort_by(|x, y| x.q.cmp(&y.q));
        SeriesJson {
            domain_ref: self.domain.spec(),
            implicit_defaults: self.has_defaults(),
            monomials,
        }
    }

    pub fn from_json(json: &SeriesJson, domain: Option<Arc<OmegaDomain>>) -> Result<Self> {
        let domain = match (domain, &json.domain_ref) {
            (Some(d), _) => d,
            (None, Some(spec)) => spec.build()?,
            (None, None) => return Err(Error::Invalid("series JSON without a domain".into())),
        };
        let monomials: Vec<Monomial> = json
            .monomials
            .iter()
            .map(|m| {
                let a = match (&m.a, domain.mode()) {
                    (Scalar::Exact(r), Mode::Approximate) => {
                        Scalar::approx(Scalar::Exact(r.clone()).to_f64())
                    }
                    (a, _) => a.clone(),
                };
                Monomial::new(m.q.clone(), a)
            })
            .collect();
        if json.implicit_defaults {
            Self::with_coefficients(domain, monomials)
        } else {
            Self::polynomial(domain, monomials)
        }
    }

    /// Pointwise comparison of two series on the same domain at `z`.
    pub fn same_domain(&self, other: &Self) -> bool {
        self.domain.same_as(&other.domain)
    }
}

/// Per-point bound used to build a working set.
#[derive(Clone, Debug, Serialize)]
pub struct WorkingBound {
    pub point_index: usize,
    /// `budget · |P| · l_Ω(p)`: no value at `p` during the closure from
    /// `0_Ω` exceeds `|P| · l_Ω(p)`.
    pub value_bound: Scalar,
    pub distance_lb: Scalar,
    /// Squared radius of the enumerated lattice ball.
    pub radius_sq: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WorkingSet {
    pub monomials: Vec<LatticeVector>,
    pub bounds: Vec<WorkingBound>,
    pub budget_factor: u32,
}

/// Exponents that can be minimal at a point of `points` during the closure
/// from `0_Ω`, with the bounds certifying the cutoff. A budget above 1 also
/// adds the ball of radius `2·max |n_i|` over the facet normals, which
/// covers scaled normals exposed by raising facet monomials.
pub fn working_monomial_set(domain: &OmegaDomain, points: &[Vec<Scalar>], budget_factor: u32) -> Result<WorkingSet> {
    let n = domain.dim();
    if budget_factor == 0 {
        return Err(Error::Invalid("budget factor must be at least 1".into()));
    }
    let mut set: std::collections::BTreeSet<LatticeVector> = [LatticeVector::zero(n)].into();
    let mut bounds = Vec::with_capacity(points.len());
    let count = points.len() as i64;
    for (i, p) in points.iter().enumerate() {
        let l = domain.weighted_distance(p)?.value;
        let r = domain.boundary_distance_lb(p)?;
        let value_bound = l.mul_int(count * i64::from(budget_factor));
        let rad = &value_bound / &r;
        let radius_sq = lattice::floor_bound(&(&rad * &rad))?;
        lattice::check_ball_cap(radius_sq, n, lattice::DEFAULT_LATTICE_CAP).map_err(|_| {
            Error::Resource(format!(
                "working set for point {i}: lattice ball |q|^2 <= {radius_sq} exceeds the enumeration cap"
            ))
        })?;
        lattice::for_each_in_ball(radius_sq, n, |q| {
            if domain.default_monomial(q, p) <= value_bound {
                set.insert(LatticeVector::from(q));
            }
        });
        bounds.push(WorkingBound {
            point_index: i,
            value_bound,
            distance_lb: r,
            radius_sq,
        });
    }
    if budget_factor > 1 && !points.is_empty() {
        if let DomainKind::QPolytope(g) = domain.kind() {
            let m = g.facet_halfspaces().map(|h| h.normal.norm_sq()).max().unwrap_or(0);
            set.extend(lattice::lattice_ball(&Scalar::int(4 * m), n)?);
        }
    }
    Ok(WorkingSet {
        monomials: set.into_iter().collect(),
        bounds,
        budget_factor,
    })
}

/// `ρ(f, g) = sup_q |a_q − b_q|` over the union of explicit supports, with
/// defaults filled in.
pub fn rho(f: &TropicalSeries, g: &TropicalSeries) -> Result<Scalar> {
    if !f.same_domain(g) {
        return Err(Error::DifferentDomains);
    }
    let mut best = Scalar::zero(f.mode());
    for q in f.coeffs.keys().chain(g.coeffs.keys()) {
        let a = f.coefficient(q.coords()).unwrap_or_else(|| f.default_coefficient(q.coords()));
        let b = g.coefficient(q.coords()).unwrap_or_else(|| g.default_coefficient(q.coords()));
        best = best.max((a - b).abs());
    }
    Ok(best)
}

/// LP test: is monomial `i` strictly below every other candidate on some
/// open subset of Ω°?
fn strictly_minimal_somewhere(
    f: &TropicalSeries,
    candidates: &[LatticeVector],
    coeff: &[Scalar],
    i: usize,
) -> Result<bool> {
    let g = f.domain().require_polytope()?;
    let n = f.dim();
    let to_row = |v: &[i64]| v.iter().map(|&c| Scalar::int(c)).collect::<Vec<_>>();
    let mut cons: Vec<LinearConstraint> = g
        .facet_halfspaces()
        .map(|h| LinearConstraint::new(to_row(h.normal.coords()), Relation::Gt, h.offset.clone()))
        .collect();
    let qi = candidates[i].coords();
    for (j, qj) in candidates.iter().enumerate() {
        if j == i {
            continue;
        }
        // (qj − qi)·z > a_i − a_j
        let d: Vec<i64> = qj.coords().iter().zip(qi).map(|(a, b)| a - b).collect();
        if d.iter().all(|&c| c == 0) {
            continue;
        }
        cons.push(LinearConstraint::new(to_row(&d), Relation::Gt, &coeff[i] - &coeff[j]));
    }
    Ok(lp_feasible(n, &cons)?.is_feasible())
}

/// Running minimum with its tie set.
struct TieSet {
    mode: Mode,
    best: Option<Scalar>,
    best_f64: f64,
    ties: Vec<LatticeVector>,
}

impl TieSet {
    fn new(mode: Mode) -> Self {
        TieSet {
            mode,
            best: None,
            best_f64: f64::INFINITY,
            ties: Vec::new(),
        }
    }

    fn best(&self) -> Option<&Scalar> {
        self.best.as_ref()
    }

    fn best_f64(&self) -> f64 {
        self.best_f64
    }

    fn offer(&mut self, q: &[i64], v: Scalar) {
        let tol = if self.mode == Mode::Exact { 0.0 } else { DEFAULT_TOLERANCE };
        match &self.best {
            None => {
                self.best_f64 = v.to_f64();
                self.best = Some(v);
                self.ties = vec![LatticeVector::from(q)];
            }
            Some(b) => {
                if v.ties(b, tol) {
                    if !self.ties.iter().any(|t| t.coords() == q) {
                        self.ties.push(LatticeVector::from(q));
                    }
                    if v < *b {
                        self.best_f64 = v.to_f64();
                        self.best = Some(v);
                    }
                } else if v < *b {
                    self.best_f64 = v.to_f64();
                    self.best = Some(v);
                    // In approximate mode keep earlier values still within
                    // tolerance of the new minimum.
                    self.ties.clear();
                    self.ties.push(LatticeVector::from(q));
                }
            }
        }
    }

    fn finish(mut self) -> Result<Evaluation> {
        let value = self
            .best
            .ok_or_else(|| Error::Invalid("no monomial to minimise over".into()))?;
        self.ties.sort();
        Ok(Evaluation {
            value,
            argmin: self.ties,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialJson {
    pub q: Vec<i64>,
    pub a: Scalar,
}

/// JSON form of a series; rationals are `"p/q"` strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub domain_ref: Option<DomainSpec>,
    pub implicit_defaults: bool,
    pub monomials: Vec<MonomialJson>,
}
