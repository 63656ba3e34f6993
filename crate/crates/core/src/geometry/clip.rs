//! Convex polygons clipped by halfplanes (Sutherland–Hodgman on a convex
//! subject, so a single pass per halfplane is exact).

use crate::scalar::{Mode, Scalar};

use super::{polygon_area, Point};

/// Counter-clockwise convex polygon; may degenerate to fewer than three
/// vertices after clipping.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    pub fn from_ccw(vertices: Vec<Point>) -> Self {
        ConvexPolygon { vertices }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Point> {
        self.vertices
    }

    pub fn mode(&self) -> Mode {
        self.vertices.first().map_or(Mode::Exact, |v| v[0].mode())
    }

    pub fn area(&self) -> Scalar {
        if self.vertices.len() < 3 {
            return Scalar::zero(self.mode());
        }
        polygon_area(&self.vertices)
    }

    /// True when the polygon has no interior.
    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3 || self.area().is_zero()
    }

    /// Keep the part where `a · z >= b`.
    pub fn clip(&self, a: &[Scalar], b: &Scalar) -> ConvexPolygon {
        let k = self.vertices.len();
        if k == 0 {
            return self.clone();
        }
        let side = |p: &Point| &a[0] * &p[0] + &a[1] * &p[1] - b;
        let s: Vec<Scalar> = self.vertices.iter().map(side).collect();
        if s.iter().all(|v| !v.is_negative()) {
            return self.clone();
        }
        let mut out: Vec<Point> = Vec::with_capacity(k + 1);
        for i in 0..k {
            let j = (i + 1) % k;
            let (p, q) = (&self.vertices[i], &self.vertices[j]);
            if !s[i].is_negative() {
                out.push(p.clone());
            }
            let crosses = (s[i].is_positive() && s[j].is_negative())
                || (s[i].is_negative() && s[j].is_positive());
            if crosses {
                let t = &s[i] / &(&s[i] - &s[j]);
                out.push(vec![
                    &p[0] + &(&t * &(&q[0] - &p[0])),
                    &p[1] + &(&t * &(&q[1] - &p[1])),
                ]);
            }
        }
        out.dedup();
        while out.len() > 1 && out.first() == out.last() {
            out.pop();
        }
        ConvexPolygon { vertices: out }
    }

    /// Clip by an integer normal: keep `normal · z >= offset`.
    pub fn clip_int(&self, normal: &[i64], offset: &Scalar) -> ConvexPolygon {
        let mode = offset.mode();
        let a: Vec<Scalar> = normal.iter().map(|&c| Scalar::from_int(c, mode)).collect();
        self.clip(&a, offset)
    }

    pub fn contains(&self, z: &[Scalar]) -> bool {
        let k = self.vertices.len();
        (0..k).all(|i| {
            let (p, q) = (&self.vertices[i], &self.vertices[(i + 1) % k]);
            let cross = (&q[0] - &p[0]) * (&z[1] - &p[1]) - (&q[1] - &p[1]) * (&z[0] - &p[0]);
            !cross.is_negative()
        })
    }
}
