//! Convex hulls of small integer point sets (ambient dimension ≤ 3) with an
//! exact, integer-only membership test.

use crate::lattice::LatticeVector;

type V3 = [i128; 3];

fn lift(p: &[i64]) -> V3 {
    let mut v = [0i128; 3];
    for (k, &c) in p.iter().enumerate() {
        v[k] = c as i128;
    }
    v
}

fn sub(a: &V3, b: &V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: &V3, b: &V3) -> i128 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &V3, b: &V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn is_zero(a: &V3) -> bool {
    a.iter().all(|&c| c == 0)
}

fn cross2(o: &[i128; 2], a: &[i128; 2], b: &[i128; 2]) -> i128 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

#[derive(Clone, Debug)]
enum Shape {
    Empty,
    Point(V3),
    Segment { a: V3, dir: V3, lo: i128, hi: i128 },
    Polygon {
        base: V3,
        normal: Option<V3>,
        axes: (usize, usize),
        ring: Vec<[i128; 2]>,
    },
    Polyhedron { planes: Vec<(V3, i128)> },
}

/// Convex hull of integer points, embedded in dimension 1–3.
#[derive(Clone, Debug)]
pub struct IntegerHull {
    n: usize,
    points: Vec<V3>,
    shape: Shape,
    affine_dim: usize,
}

impl IntegerHull {
    pub fn new(points: &[LatticeVector]) -> Self {
        let n = points.first().map_or(0, LatticeVector::dim);
        assert!(n <= 3, "integer hulls are supported up to dimension 3");
        let mut pts: Vec<V3> = points.iter().map(|p| lift(p.coords())).collect();
        pts.sort();
        pts.dedup();
        let Some(&v0) = pts.first() else {
            return IntegerHull {
                n,
                points: pts,
                shape: Shape::Empty,
                affine_dim: 0,
            };
        };
        let d1 = pts.iter().map(|p| sub(p, &v0)).find(|d| !is_zero(d));
        let Some(d1) = d1 else {
            return IntegerHull {
                n,
                points: pts,
                shape: Shape::Point(v0),
                affine_dim: 0,
            };
        };
        let d2 = pts
            .iter()
            .map(|p| sub(p, &v0))
            .find(|d| !is_zero(&cross(&d1, d)));
        let Some(d2) = d2 else {
            let ts: Vec<i128> = pts.iter().map(|p| dot(&sub(p, &v0), &d1)).collect();
            let (lo, hi) = (*ts.iter().min().unwrap(), *ts.iter().max().unwrap());
            return IntegerHull {
                n,
                points: pts,
                shape: Shape::Segment {
                    a: v0,
                    dir: d1,
                    lo,
                    hi,
                },
                affine_dim: 1,
            };
        };
        let nrm = cross(&d1, &d2);
        let spatial = pts.iter().any(|p| dot(&nrm, &sub(p, &v0)) != 0);
        if !spatial {
            let (axes, normal) = if n <= 2 {
                ((0, 1), None)
            } else {
                let k = (0..3).max_by_key(|&k| nrm[k].abs()).unwrap();
                let axes = match k {
                    0 => (1, 2),
                    1 => (0, 2),
                    _ => (0, 1),
                };
                (axes, Some(nrm))
            };
            let flat: Vec<[i128; 2]> = pts.iter().map(|p| [p[axes.0], p[axes.1]]).collect();
            let ring = monotone_chain(flat);
            return IntegerHull {
                n,
                points: pts,
                shape: Shape::Polygon {
                    base: v0,
                    normal,
                    axes,
                    ring,
                },
                affine_dim: 2,
            };
        }
        // Full-dimensional in 3-D: collect all supporting planes through
        // point triples (these are exactly the facet planes).
        let mut planes: Vec<(V3, i128)> = Vec::new();
        let m = pts.len();
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    let mut nv = cross(&sub(&pts[j], &pts[i]), &sub(&pts[k], &pts[i]));
                    if is_zero(&nv) {
                        continue;
                    }
                    let g = nv.iter().fold(0i128, |g, &c| gcd(g, c));
                    for c in nv.iter_mut() {
                        *c /= g;
                    }
                    let off = dot(&nv, &pts[i]);
                    let (mut pos, mut neg) = (false, false);
                    for p in &pts {
                        let s = dot(&nv, p) - off;
                        pos |= s > 0;
                        neg |= s < 0;
                    }
                    if pos && neg {
                        continue;
                    }
                    let plane = if neg { ([-nv[0], -nv[1], -nv[2]], -off) } else { (nv, off) };
                    if !planes.contains(&plane) {
                        planes.push(plane);
                    }
                }
            }
        }
        IntegerHull {
            n,
            points: pts,
            shape: Shape::Polyhedron { planes },
            affine_dim: 3,
        }
    }

    pub fn affine_dim(&self) -> usize {
        self.affine_dim
    }

    pub fn is_empty(&self) -> bool {
        matches!(self.shape, Shape::Empty)
    }

    /// Non-strict membership.
    pub fn contains(&self, x: &[i64]) -> bool {
        let x = lift(x);
        match &self.shape {
            Shape::Empty => false,
            Shape::Point(p) => *p == x,
            Shape::Segment { a, dir, lo, hi } => {
                let d = sub(&x, a);
                is_zero(&cross(dir, &d)) && {
                    let t = dot(&d, dir);
                    *lo <= t && t <= *hi
                }
            }
            Shape::Polygon {
                base,
                normal,
                axes,
                ring,
            } => {
                if let Some(nv) = normal {
                    if dot(nv, &sub(&x, base)) != 0 {
                        return false;
                    }
                }
                let p = [x[axes.0], x[axes.1]];
                let k = ring.len();
                (0..k).all(|i| cross2(&ring[i], &ring[(i + 1) % k], &p) >= 0)
            }
            Shape::Polyhedron { planes } => planes.iter().all(|(nv, off)| dot(nv, &x) >= *off),
        }
    }

    /// The vertices of the hull, sorted lexicographically.
    pub fn extreme_points(&self) -> Vec<LatticeVector> {
        let out: Vec<V3> = match &self.shape {
            Shape::Empty => Vec::new(),
            Shape::Point(p) => vec![*p],
            Shape::Segment { a, dir, lo, hi } => {
                let pick = |t: i128| *self.points.iter().find(|p| dot(&sub(p, a), dir) == t).unwrap();
                vec![pick(*lo), pick(*hi)]
            }
            Shape::Polygon { axes, ring, .. } => self
                .points
                .iter()
                .filter(|p| ring.contains(&[p[axes.0], p[axes.1]]))
                .copied()
                .collect(),
            Shape::Polyhedron { planes } => self
                .points
                .iter()
                .filter(|p| {
                    let tight: Vec<Vec<i64>> = planes
                        .iter()
                        .filter(|(nv, off)| dot(nv, p) == *off)
                        .map(|(nv, _)| nv.iter().map(|&c| c as i64).collect())
                        .collect();
                    super::lp::integer_rank(&tight) == 3
                })
                .copied()
                .collect(),
        };
        let mut v: Vec<LatticeVector> = out.iter().map(|p| self.unlift(p)).collect();
        v.sort();
        v.dedup();
        v
    }

    fn unlift(&self, p: &V3) -> LatticeVector {
        LatticeVector::new(p[..self.n].iter().map(|&c| c as i64).collect())
    }

    /// Every lattice point of the hull, by bounding-box scan.
    pub fn lattice_points(&self) -> Vec<LatticeVector> {
        if self.points.is_empty() {
            return Vec::new();
        }
        let mut lo = self.points[0];
        let mut hi = self.points[0];
        for p in &self.points {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let mut out = Vec::new();
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                for z in lo[2]..=hi[2] {
                    let c = [x as i64, y as i64, z as i64];
                    if self.contains(&c[..self.n]) {
                        out.push(LatticeVector::new(c[..self.n].to_vec()));
                    }
                }
            }
        }
        out
    }

    /// Twice the area of a full-dimensional hull in the plane.
    pub fn twice_area(&self) -> Option<i128> {
        match &self.shape {
            Shape::Polygon { ring, normal: None, .. } => {
                let k = ring.len();
                Some(
                    (0..k)
                        .map(|i| ring[i][0] * ring[(i + 1) % k][1] - ring[(i + 1) % k][0] * ring[i][1])
                        .sum::<i128>()
                        .abs(),
                )
            }
            _ => None,
        }
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Counter-clockwise hull without collinear points.
fn monotone_chain(mut pts: Vec<[i128; 2]>) -> Vec<[i128; 2]> {
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<[i128; 2]> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross2(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<[i128; 2]> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross2(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// All integer points in the convex hull of the given integer points.
pub fn lattice_points_in_polytope(vertices: &[LatticeVector]) -> Vec<LatticeVector> {
    if vertices.is_empty() {
        return Vec::new();
    }
    IntegerHull::new(vertices).lattice_points()
}
