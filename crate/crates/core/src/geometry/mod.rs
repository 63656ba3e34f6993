//! Exact polytope kernel for dimensions 1–3: halfspace intersection with a
//! face lattice, volumes, lattice-point scans and convex polygon clipping.

pub mod clip;
pub mod hull;
pub mod lp;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeVector;
use crate::scalar::{Mode, Scalar};

pub use clip::ConvexPolygon;
pub use hull::{lattice_points_in_polytope, IntegerHull};
pub use lp::{lp_feasible, LinearConstraint, LpOutcome, Relation};

/// A point with scalar coordinates.
pub type Point = Vec<Scalar>;

/// `{ z : normal · z >= offset }` with a primitive integer normal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: LatticeVector,
    pub offset: Scalar,
}

impl HalfSpace {
    /// Rejects zero and non-primitive normals.
    pub fn new(normal: LatticeVector, offset: Scalar) -> Result<Self> {
        if normal.is_zero() {
            return Err(Error::Invalid("halfspace normal must be non-zero".into()));
        }
        let g = normal.gcd();
        if g != 1 {
            let fixed: Vec<i64> = normal.coords().iter().map(|c| c / g).collect();
            return Err(Error::Invalid(format!(
                "halfspace normal {normal} is not primitive (gcd {g}); divide by {g}: \
                 normal {} with offset {}",
                LatticeVector::new(fixed),
                &offset / &Scalar::from_int(g, offset.mode())
            )));
        }
        Ok(HalfSpace { normal, offset })
    }

    /// Divides an arbitrary non-zero integer normal (and its offset) by the
    /// gcd of its coordinates.
    pub fn normalized(normal: &[i64], offset: Scalar) -> Result<Self> {
        let v = LatticeVector::new(normal.to_vec());
        if v.is_zero() {
            return Err(Error::Invalid("halfspace normal must be non-zero".into()));
        }
        let g = v.gcd();
        let mode = offset.mode();
        Ok(HalfSpace {
            normal: LatticeVector::new(normal.iter().map(|c| c / g).collect()),
            offset: offset / Scalar::from_int(g, mode),
        })
    }

    pub fn dim(&self) -> usize {
        self.normal.dim()
    }

    /// `normal · z − offset`; non-negative exactly on the halfspace.
    pub fn slack(&self, z: &[Scalar]) -> Scalar {
        self.normal.dot(z) - &self.offset
    }

    pub fn contains(&self, z: &[Scalar]) -> bool {
        !self.slack(z).is_negative()
    }
}

/// A face of a polytope: its vertex indices and the (non-redundant)
/// halfspaces tight on it. Two-dimensional faces list vertices in cyclic
/// order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub vertices: Vec<usize>,
    pub facets: Vec<usize>,
}

/// A compact full-dimensional polytope with its face lattice.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolytopeGeometry {
    dim: usize,
    halfspaces: Vec<HalfSpace>,
    redundant: Vec<bool>,
    /// In the plane the vertices are stored counter-clockwise.
    vertices: Vec<Point>,
    vertex_facets: Vec<Vec<usize>>,
    edges: Vec<Face>,
    facets: Vec<Face>,
}

impl PolytopeGeometry {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    pub fn is_redundant(&self, i: usize) -> bool {
        self.redundant[i]
    }

    pub fn redundant_flags(&self) -> &[bool] {
        &self.redundant
    }

    /// Non-redundant halfspaces, one per facet.
    pub fn facet_halfspaces(&self) -> impl Iterator<Item = &HalfSpace> + '_ {
        self.halfspaces
            .iter()
            .zip(&self.redundant)
            .filter(|(_, r)| !**r)
            .map(|(h, _)| h)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Face] {
        &self.edges
    }

    pub fn facets(&self) -> &[Face] {
        &self.facets
    }

    /// All faces of dimension `k`, `0 <= k <= dim`.
    pub fn faces(&self, k: usize) -> Vec<Face> {
        let n = self.dim;
        if k == n {
            return vec![Face {
                vertices: (0..self.vertices.len()).collect(),
                facets: Vec::new(),
            }];
        }
        if k == 0 {
            return self
                .vertex_facets
                .iter()
                .enumerate()
                .map(|(i, f)| Face {
                    vertices: vec![i],
                    facets: f.clone(),
                })
                .collect();
        }
        if k + 1 == n {
            return self.facets.clone();
        }
        if k == 1 {
            return self.edges.clone();
        }
        Vec::new()
    }

    pub fn mode(&self) -> Mode {
        Mode::Exact
    }

    pub fn contains(&self, z: &[Scalar]) -> bool {
        self.facet_halfspaces().all(|h| h.contains(z))
    }

    pub fn contains_in_interior(&self, z: &[Scalar]) -> bool {
        self.facet_halfspaces().all(|h| h.slack(z).is_positive())
    }

    pub fn vertex(&self, i: usize) -> &[Scalar] {
        &self.vertices[i]
    }

    /// Average of the listed vertices: a relative-interior point of their hull.
    pub fn centroid_of(&self, ids: &[usize]) -> Point {
        centroid(ids.iter().map(|&i| self.vertices[i].as_slice()))
    }

    pub fn centroid(&self) -> Point {
        centroid(self.vertices.iter().map(Vec::as_slice))
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices[1..] {
            for k in 0..self.dim {
                if v[k] < lo[k] {
                    lo[k] = v[k].clone();
                }
                if v[k] > hi[k] {
                    hi[k] = v[k].clone();
                }
            }
        }
        (lo, hi)
    }

    /// Counter-clockwise polygon of a planar polytope.
    pub fn to_polygon(&self) -> Result<ConvexPolygon> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.dim,
            });
        }
        Ok(ConvexPolygon::from_ccw(self.vertices.clone()))
    }
}

impl PolytopeGeometry {
    /// Face lattice of a full-dimensional convex polygon given by its
    /// counter-clockwise vertices and a superset of its bounding halfspaces.
    /// Collinear vertices are dropped; every halfspace that does not support
    /// an edge (or duplicates an earlier one) is flagged redundant.
    pub fn from_convex_polygon(vertices: Vec<Point>, halfspaces: Vec<HalfSpace>) -> Result<Self> {
        let mut vs: Vec<Point> = Vec::with_capacity(vertices.len());
        let k = vertices.len();
        for i in 0..k {
            let (a, b, c) = (&vertices[(i + k - 1) % k], &vertices[i], &vertices[(i + 1) % k]);
            let cross = (&b[0] - &a[0]) * (&c[1] - &b[1]) - (&b[1] - &a[1]) * (&c[0] - &b[0]);
            if !cross.is_zero() {
                vs.push(b.clone());
            }
        }
        if vs.len() < 3 {
            return Err(Error::DegenerateDomain("polygon without interior".into()));
        }
        require_exact(&halfspaces)?;
        let m = halfspaces.len();
        let all_tight: Vec<Vec<usize>> = vs
            .iter()
            .map(|v| (0..m).filter(|&i| halfspaces[i].slack(v).is_zero()).collect())
            .collect();
        let nv = vs.len();
        let mut redundant = vec![true; m];
        let mut facets = Vec::with_capacity(nv);
        for i in 0..nv {
            let j = (i + 1) % nv;
            let h = all_tight[i]
                .iter()
                .copied()
                .find(|h| all_tight[j].contains(h))
                .ok_or_else(|| Error::Invalid("polygon edge without a supporting halfspace".into()))?;
            redundant[h] = false;
            facets.push(Face {
                vertices: vec![i, j],
                facets: vec![h],
            });
        }
        let vertex_facets = all_tight
            .into_iter()
            .map(|t| t.into_iter().filter(|&h| !redundant[h]).collect())
            .collect();
        Ok(PolytopeGeometry {
            dim: 2,
            halfspaces,
            redundant,
            vertices: vs,
            vertex_facets,
            edges: facets.clone(),
            facets,
        })
    }
}

pub(crate) fn centroid<'a>(points: impl Iterator<Item = &'a [Scalar]>) -> Point {
    let mut acc: Option<Point> = None;
    let mut count = 0i64;
    for p in points {
        count += 1;
        match acc.as_mut() {
            None => acc = Some(p.to_vec()),
            Some(a) => {
                for (x, y) in a.iter_mut().zip(p) {
                    *x += y;
                }
            }
        }
    }
    let a = acc.expect("centroid of an empty point set");
    let mode = a[0].mode();
    let k = Scalar::from_int(count, mode);
    a.into_iter().map(|x| x / &k).collect()
}

fn require_exact(hs: &[HalfSpace]) -> Result<()> {
    for h in hs {
        h.offset.ensure_mode(Mode::Exact)?;
    }
    Ok(())
}

/// Intersect halfspaces in dimension `n <= 3`, enumerate vertices, flag
/// redundant halfspaces and assemble the face lattice.
pub fn halfspaces_to_geometry(halfspaces: &[HalfSpace], n: usize) -> Result<PolytopeGeometry> {
    if !(1..=3).contains(&n) {
        return Err(Error::Unsupported(format!(
            "polytope geometry in dimension {n} (supported: 1 to 3)"
        )));
    }
    for h in halfspaces {
        if h.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: h.dim(),
            });
        }
        if h.normal.is_zero() {
            return Err(Error::Invalid("halfspace normal must be non-zero".into()));
        }
    }
    require_exact(halfspaces)?;
    let to_row = |h: &HalfSpace| -> Vec<Scalar> {
        h.normal.coords().iter().map(|&c| Scalar::int(c)).collect()
    };

    let strict: Vec<LinearConstraint> = halfspaces
        .iter()
        .map(|h| LinearConstraint::new(to_row(h), Relation::Gt, h.offset.clone()))
        .collect();
    if !lp_feasible(n, &strict)?.is_feasible() {
        return Err(Error::DegenerateDomain("empty interior".into()));
    }
    // Bounded iff the recession cone {d : normal·d >= 0} is trivial.
    for axis in 0..n {
        for sign in [1i64, -1] {
            let mut cons: Vec<LinearConstraint> = halfspaces
                .iter()
                .map(|h| LinearConstraint::new(to_row(h), Relation::Ge, Scalar::int(0)))
                .collect();
            let mut e = vec![Scalar::int(0); n];
            e[axis] = Scalar::int(sign);
            cons.push(LinearConstraint::new(e, Relation::Ge, Scalar::int(1)));
            if lp_feasible(n, &cons)?.is_feasible() {
                return Err(Error::NotCompact);
            }
        }
    }

    let m = halfspaces.len();
    let mut vertices: Vec<Point> = Vec::new();
    for_each_subset(m, n, |subset| {
        let rows: Vec<Vec<Scalar>> = subset.iter().map(|&i| to_row(&halfspaces[i])).collect();
        let rhs: Vec<Scalar> = subset.iter().map(|&i| halfspaces[i].offset.clone()).collect();
        if let Some(x) = lp::solve_square(&rows, &rhs) {
            if halfspaces.iter().all(|h| h.contains(&x)) && !vertices.contains(&x) {
                vertices.push(x);
            }
        }
    });

    let tight = |h: &HalfSpace, v: &[Scalar]| h.slack(v).is_zero();
    let mut redundant = vec![false; m];
    for i in 0..m {
        let on: Vec<&Point> = vertices.iter().filter(|v| tight(&halfspaces[i], v)).collect();
        let spans = affine_rank(&on) + 1 >= n && on.len() >= n;
        let duplicate = (0..i).any(|j| !redundant[j] && halfspaces[j] == halfspaces[i]);
        redundant[i] = !spans || duplicate;
    }

    let mut geo = PolytopeGeometry {
        dim: n,
        halfspaces: halfspaces.to_vec(),
        redundant,
        vertices,
        vertex_facets: Vec::new(),
        edges: Vec::new(),
        facets: Vec::new(),
    };
    if n == 2 {
        let order = order_ccw(&geo.vertices, None);
        geo.vertices = order.into_iter().map(|i| geo.vertices[i].clone()).collect();
    }
    geo.vertex_facets = geo
        .vertices
        .iter()
        .map(|v| {
            (0..m)
                .filter(|&i| !geo.redundant[i] && tight(&geo.halfspaces[i], v))
                .collect()
        })
        .collect();

    let nv = geo.vertices.len();
    for i in (0..m).filter(|&i| !geo.redundant[i]) {
        let mut ids: Vec<usize> = (0..nv).filter(|&v| geo.vertex_facets[v].contains(&i)).collect();
        if n == 2 {
            // Keep the counter-clockwise successor order around the polygon.
            if ids.len() == 2 && ids[0] == 0 && ids[1] == nv - 1 {
                ids.swap(0, 1);
            }
        } else if n == 3 {
            let pts: Vec<Point> = ids.iter().map(|&v| geo.vertices[v].clone()).collect();
            let order = order_ccw(&pts, Some(geo.halfspaces[i].normal.coords()));
            ids = order.into_iter().map(|k| ids[k]).collect();
        }
        geo.facets.push(Face {
            vertices: ids,
            facets: vec![i],
        });
    }
    match n {
        2 => geo.edges = geo.facets.clone(),
        3 => {
            for a in 0..nv {
                for b in a + 1..nv {
                    let common: Vec<usize> = geo.vertex_facets[a]
                        .iter()
                        .filter(|f| geo.vertex_facets[b].contains(f))
                        .copied()
                        .collect();
                    if common.len() < 2 {
                        continue;
                    }
                    let normals: Vec<Vec<i64>> = common
                        .iter()
                        .map(|&f| geo.halfspaces[f].normal.coords().to_vec())
                        .collect();
                    if lp::integer_rank(&normals) != 2 {
                        continue;
                    }
                    let on_line = (0..nv)
                        .filter(|&v| common.iter().all(|f| geo.vertex_facets[v].contains(f)))
                        .count();
                    if on_line == 2 {
                        geo.edges.push(Face {
                            vertices: vec![a, b],
                            facets: common,
                        });
                    }
                }
            }
        }
        _ => {}
    }
    Ok(geo)
}

/// Visits every `k`-subset of `0..m` in lexicographic order.
pub(crate) fn for_each_subset(m: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < m - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Affine dimension of a finite exact point set (−1 encoded as 0 points → 0).
pub(crate) fn affine_rank(points: &[&Point]) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let base = points[0];
    let rows: Vec<Vec<BigRational>> = points[1..]
        .iter()
        .map(|p| {
            p.iter()
                .zip(base)
                .map(|(a, b)| (a - b).as_exact().cloned().unwrap_or_else(BigRational::zero))
                .collect()
        })
        .collect();
    // Clear denominators row by row, then take the integer rank.
    let int_rows: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let den = r
                .iter()
                .fold(BigInt::from(1), |acc, x| num_integer::lcm(acc, x.denom().clone()));
            r.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect()
        })
        .collect();
    big_rank(int_rows)
}

fn big_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank].clone();
        for row in m.iter_mut().skip(rank + 1) {
            if !row[col].is_zero() {
                let b = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&pivot) {
                    *v = &*v * &pivot[col] - pv * &b;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Indices of `points` sorted counter-clockwise around their centroid. In
/// 3-D the points are coplanar and `normal` is the facet's inward normal;
/// the order is then counter-clockwise seen from outside.
pub(crate) fn order_ccw(points: &[Point], normal: Option<&[i64]>) -> Vec<usize> {
    if points.len() < 3 {
        return (0..points.len()).collect();
    }
    let (ax, ay, flip) = match normal {
        None => (0, 1, false),
        Some(nrm) => {
            // Drop the coordinate with the largest normal component.
            let k = (0..3).max_by_key(|&k| nrm[k].abs()).unwrap();
            let (ax, ay) = match k {
                0 => (1, 2),
                1 => (2, 0),
                _ => (0, 1),
            };
            // Projection along axis k preserves orientation iff nrm[k] > 0.
            (ax, ay, nrm[k] > 0)
        }
    };
    let c = centroid(points.iter().map(Vec::as_slice));
    let rel: Vec<(Scalar, Scalar)> = points
        .iter()
        .map(|p| (&p[ax] - &c[ax], &p[ay] - &c[ay]))
        .collect();
    let half = |v: &(Scalar, Scalar)| -> u8 {
        if v.1.is_negative() || (v.1.is_zero() && v.0.is_negative()) {
            1
        } else {
            0
        }
    };
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| {
        let (a, b) = (&rel[i], &rel[j]);
        half(a).cmp(&half(b)).then_with(|| {
            let cross = &a.0 * &b.1 - &a.1 * &b.0;
            if cross.is_positive() {
                Ordering::Less
            } else if cross.is_negative() {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        })
    });
    if flip {
        // Seen from outside we look along the inward normal, which
        // reverses the projected orientation.
        idx.reverse();
    }
    idx
}

/// Area or volume of a polytope, with a flag for dimension-1 or degenerate
/// input (value zero).
#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    pub value: Scalar,
    pub degenerate: bool,
}

pub fn measure(geo: &PolytopeGeometry) -> Measure {
    let zero = Measure {
        value: Scalar::int(0),
        degenerate: true,
    };
    match geo.dim {
        2 => {
            let a = polygon_area(&geo.vertices);
            if a.is_zero() {
                zero
            } else {
                Measure {
                    value: a,
                    degenerate: false,
                }
            }
        }
        3 => {
            let apex = &geo.vertices[0];
            let mut vol = Scalar::int(0);
            for f in &geo.facets {
                let vs = &f.vertices;
                for k in 1..vs.len().saturating_sub(1) {
                    let d = det3(
                        &sub(&geo.vertices[vs[0]], apex),
                        &sub(&geo.vertices[vs[k]], apex),
                        &sub(&geo.vertices[vs[k + 1]], apex),
                    );
                    vol += &d.abs();
                }
            }
            let v = vol / Scalar::int(6);
            if v.is_zero() {
                zero
            } else {
                Measure {
                    value: v,
                    degenerate: false,
                }
            }
        }
        _ => zero,
    }
}

/// Shoelace area of a polygon given in cyclic order (absolute value).
pub fn polygon_area(vertices: &[Point]) -> Scalar {
    let mode = vertices.first().map_or(Mode::Exact, |v| v[0].mode());
    let mut twice = Scalar::zero(mode);
    let k = vertices.len();
    for i in 0..k {
        let (p, q) = (&vertices[i], &vertices[(i + 1) % k]);
        twice += &(&p[0] * &q[1] - &p[1] * &q[0]);
    }
    twice.abs() / Scalar::from_int(2, mode)
}

pub(crate) fn sub(a: &[Scalar], b: &[Scalar]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn det3(a: &[Scalar], b: &[Scalar], c: &[Scalar]) -> Scalar {
    &a[0] * &(&b[1] * &c[2] - &b[2] * &c[1]) - &a[1] * &(&b[0] * &c[2] - &b[2] * &c[0])
        + &a[2] * &(&b[0] * &c[1] - &b[1] * &c[0])
}

/// Convenience: halfspaces of the axis-aligned box `[lo, hi]^n`.
pub fn box_halfspaces(lo: &[Scalar], hi: &[Scalar]) -> Vec<HalfSpace> {
    let n = lo.len();
    let mut out = Vec::with_capacity(2 * n);
    for k in 0..n {
        out.push(HalfSpace {
            normal: LatticeVector::unit(n, k, 1),
            offset: lo[k].clone(),
        });
        out.push(HalfSpace {
            normal: LatticeVector::unit(n, k, -1),
            offset: -&hi[k],
        });
    }
    out
}

/// Rational point helper: `pt(&[(1,5),(1,2)])` is `(1/5, 1/2)`.
pub fn rational_point(coords: &[(i64, i64)]) -> Point {
    coords.iter().map(|&(p, q)| Scalar::ratio(p, q)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hs(normal: &[i64], offset: Scalar) -> HalfSpace {
        HalfSpace::new(LatticeVector::new(normal.to_vec()), offset).unwrap()
    }

    fn unit_square() -> Vec<HalfSpace> {
        box_halfspaces(&[Scalar::int(0), Scalar::int(0)], &[Scalar::int(1), Scalar::int(1)])
    }

    #[test]
    fn unit_square_vertices() {
        let g = halfspaces_to_geometry(&unit_square(), 2).unwrap();
        let want = [
            rational_point(&[(0, 1), (0, 1)]),
            rational_point(&[(1, 1), (0, 1)]),
            rational_point(&[(1, 1), (1, 1)]),
            rational_point(&[(0, 1), (1, 1)]),
        ];
        assert_eq!(g.vertices().len(), 4);
        for w in &want {
            assert!(g.vertices().contains(w));
        }
        assert!(g.redundant_flags().iter().all(|r| !r));
        assert_eq!(g.facets().len(), 4);
        assert_eq!(measure(&g).value, Scalar::int(1));
    }

    #[test]
    fn triangle_and_area() {
        let t = vec![
            hs(&[1, 0], Scalar::int(0)),
            hs(&[0, 1], Scalar::int(0)),
            hs(&[-1, -1], Scalar::int(-1)),
        ];
        let g = halfspaces_to_geometry(&t, 2).unwrap();
        assert_eq!(g.vertices().len(), 3);
        assert_eq!(measure(&g).value, Scalar::ratio(1, 2));
    }

    #[test]
    fn redundant_constraint_is_flagged() {
        let mut s = unit_square();
        s.push(hs(&[1, 0], Scalar::int(-5)));
        let g = halfspaces_to_geometry(&s, 2).unwrap();
        assert_eq!(g.vertices().len(), 4);
        assert_eq!(g.redundant_flags(), &[false, false, false, false, true]);
    }

    #[test]
    fn duplicate_halfspace_is_redundant_once() {
        let mut s = unit_square();
        s.push(s[0].clone());
        let g = halfspaces_to_geometry(&s, 2).unwrap();
        assert_eq!(g.redundant_flags().iter().filter(|r| **r).count(), 1);
        assert_eq!(g.facets().len(), 4);
    }

    #[test]
    fn trapezoid_area() {
        let pts = vec![
            rational_point(&[(0, 1), (0, 1)]),
            rational_point(&[(1, 3), (1, 3)]),
            rational_point(&[(1, 3), (2, 3)]),
            rational_point(&[(0, 1), (1, 1)]),
        ];
        assert_eq!(polygon_area(&pts), Scalar::ratio(2, 9));
    }

    #[test]
    fn empty_interior_and_unbounded() {
        let flat = vec![
            hs(&[1, 0], Scalar::int(0)),
            hs(&[-1, 0], Scalar::int(0)),
            hs(&[0, 1], Scalar::int(0)),
            hs(&[0, -1], Scalar::int(-1)),
        ];
        assert!(matches!(
            halfspaces_to_geometry(&flat, 2),
            Err(Error::DegenerateDomain(_))
        ));
        let open = vec![hs(&[1, 0], Scalar::int(0)), hs(&[0, 1], Scalar::int(0))];
        assert!(matches!(halfspaces_to_geometry(&open, 2), Err(Error::NotCompact)));
    }

    #[test]
    fn non_primitive_normal_has_fix_it() {
        let err = HalfSpace::new(LatticeVector::new(vec![2, 4]), Scalar::int(1)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("(1,2)") && msg.contains("1/2"), "{msg}");
    }

    #[test]
    fn cube_face_lattice_and_volume() {
        let z = Scalar::int(0);
        let o = Scalar::int(1);
        let cube = box_halfspaces(&[z.clone(), z.clone(), z], &[o.clone(), o.clone(), o]);
        let g = halfspaces_to_geometry(&cube, 3).unwrap();
        assert_eq!(g.vertices().len(), 8);
        assert_eq!(g.edges().len(), 12);
        assert_eq!(g.facets().len(), 6);
        assert!(g.facets().iter().all(|f| f.vertices.len() == 4));
        assert_eq!(measure(&g).value, Scalar::int(1));
    }

    #[test]
    fn simplex_volume() {
        let s = vec![
            hs(&[1, 0, 0], Scalar::int(0)),
            hs(&[0, 1, 0], Scalar::int(0)),
            hs(&[0, 0, 1], Scalar::int(0)),
            hs(&[-1, -1, -1], Scalar::int(-1)),
        ];
        let g = halfspaces_to_geometry(&s, 3).unwrap();
        assert_eq!(g.vertices().len(), 4);
        assert_eq!(g.edges().len(), 6);
        assert_eq!(measure(&g).value, Scalar::ratio(1, 6));
    }

    #[test]
    fn interval_is_flagged_degenerate_measure() {
        let s = vec![hs(&[1], Scalar::int(0)), hs(&[-1], Scalar::int(-2))];
        let g = halfspaces_to_geometry(&s, 1).unwrap();
        assert_eq!(g.vertices().len(), 2);
        let m = measure(&g);
        assert!(m.degenerate && m.value.is_zero());
    }

    #[test]
    fn polygon_vertices_are_counter_clockwise() {
        let g = halfspaces_to_geometry(&unit_square(), 2).unwrap();
        let v = g.vertices();
        for i in 0..v.len() {
            let (a, b, c) = (&v[i], &v[(i + 1) % 4], &v[(i + 2) % 4]);
            let cross = (&b[0] - &a[0]) * (&c[1] - &b[1]) - (&b[1] - &a[1]) * (&c[0] - &b[0]);
            assert!(cross.is_positive());
        }
        // Facet vertex pairs follow the polygon order.
        for f in g.facets() {
            assert_eq!((f.vertices[0] + 1) % 4, f.vertices[1]);
        }
    }

    #[test]
    fn subsets() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| seen.push(s.to_vec()));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 1]);
        assert_eq!(seen[5], vec![2, 3]);
    }
}
