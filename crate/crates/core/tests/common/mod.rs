//! Shared fixtures for the integration suites: random rational polygons,
//! random raised series, and an independent `Ratio<i128>` oracle that knows
//! nothing about the engine's enumeration cutoffs.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive, Zero};
use omtrop::domain::{DomainSpec, HalfSpaceSpec, OmegaDomain};
use omtrop::series::{Monomial, TropicalSeries};
use omtrop::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Q = Ratio<i128>;
pub type Pt = [Q; 2];

pub fn q(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn to_q(s: &Scalar) -> Q {
    let r = s.as_exact().expect("exact scalar");
    Q::new(r.numer().to_i128().unwrap(), r.denom().to_i128().unwrap())
}

pub fn from_q(x: &Q) -> Scalar {
    Scalar::from_big(BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom())))
}

pub fn point(z: &Pt) -> Vec<Scalar> {
    z.iter().map(from_q).collect()
}

pub fn dot(a: [i64; 2], z: &Pt) -> Q {
    z[0] * a[0] as i128 + z[1] * a[1] as i128
}

/// Primitive normals with coordinates in [-2, 2].
pub const NORMAL_POOL: [[i64; 2]; 16] = [
    [1, 0],
    [0, 1],
    [-1, 0],
    [0, -1],
    [1, 1],
    [1, -1],
    [-1, 1],
    [-1, -1],
    [1, 2],
    [2, 1],
    [-1, 2],
    [-2, 1],
    [1, -2],
    [2, -1],
    [-1, -2],
    [-2, -1],
];

/// `{z : normal_i · z >= offset_i}`.
#[derive(Clone, Debug)]
pub struct Polygon {
    pub normals: Vec<[i64; 2]>,
    pub offsets: Vec<Q>,
    support: BTreeMap<[i64; 2], Q>,
    vertices: Vec<Pt>,
}

impl Polygon {
    pub fn new(normals: Vec<[i64; 2]>, offsets: Vec<Q>) -> Self {
        let mut p = Polygon {
            normals,
            offsets,
            support: BTreeMap::new(),
            vertices: Vec::new(),
        };
        p.vertices = p.brute_vertices();
        assert!(p.vertices.len() >= 3, "fixture polygon must have interior");
        p
    }

    pub fn square(side: i128) -> Self {
        Polygon::new(
            vec![[1, 0], [0, 1], [-1, 0], [0, -1]],
            vec![q(0, 1), q(0, 1), q(-side, 1), q(-side, 1)],
        )
    }

    /// `[0,2]²` with the corner cut by `x + y <= 3`.
    pub fn pentagon() -> Self {
        Polygon::new(
            vec![[1, 0], [0, 1], [-1, 0], [0, -1], [-1, -1]],
            vec![q(0, 1), q(0, 1), q(-2, 1), q(-2, 1), q(-3, 1)],
        )
    }

    /// Three normals that positively span the plane plus 1–4 random ones,
    /// each at a random rational slack from a random centre, so the result
    /// is bounded with non-empty interior.
    pub fn random(r: &mut impl Rng) -> Self {
        let mut normals = vec![[1, 0], [0, 1], [-1, -1]];
        let extra = r.random_range(1..=4);
        while normals.len() < 3 + extra {
            let n = NORMAL_POOL[r.random_range(0..NORMAL_POOL.len())];
            if !normals.contains(&n) {
                normals.push(n);
            }
        }
        let c: Pt = [q(r.random_range(-8..=8), 4), q(r.random_range(-8..=8), 4)];
        let offsets = normals
            .iter()
            .map(|&n| dot(n, &c) - q(r.random_range(2..=16), 8))
            .collect();
        Polygon::new(normals, offsets)
    }

    pub fn spec(&self) -> DomainSpec {
        DomainSpec::Halfspaces {
            halfspaces: self
                .normals
                .iter()
                .zip(&self.offsets)
                .map(|(n, b)| HalfSpaceSpec {
                    normal: n.to_vec(),
                    offset: format!("{}/{}", b.numer(), b.denom()),
                })
                .collect(),
        }
    }

    pub fn domain(&self) -> Arc<OmegaDomain> {
        self.spec().build().expect("fixture polygon builds")
    }

    fn brute_vertices(&self) -> Vec<Pt> {
        let m = self.normals.len();
        let mut out: Vec<Pt> = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                let (a, b) = (self.normals[i], self.normals[j]);
                let det = (a[0] * b[1] - a[1] * b[0]) as i128;
                if det == 0 {
                    continue;
                }
                let (u, v) = (self.offsets[i], self.offsets[j]);
                let x = (u * b[1] as i128 - v * a[1] as i128) / det;
                let y = (v * a[0] as i128 - u * b[0] as i128) / det;
                let z = [x, y];
                if self.min_slack(&z) >= Q::zero() && !out.contains(&z) {
                    out.push(z);
                }
            }
        }
        out
    }

    pub fn vertices(&self) -> &[Pt] {
        &self.vertices
    }

    pub fn min_slack(&self, z: &Pt) -> Q {
        self.normals
            .iter()
            .zip(&self.offsets)
            .map(|(&n, b)| dot(n, z) - b)
            .min()
            .unwrap()
    }

    pub fn interior(&self, z: &Pt) -> bool {
        self.min_slack(z) > Q::zero()
    }

    /// `min_{v} q · v`.
    pub fn support(&mut self, qv: [i64; 2]) -> Q {
        if let Some(s) = self.support.get(&qv) {
            return *s;
        }
        let s = self.vertices.iter().map(|v| dot(qv, v)).min().unwrap();
        self.support.insert(qv, s);
        s
    }

    pub fn bbox(&self) -> (Pt, Pt) {
        let lo = [0, 1].map(|k| self.vertices.iter().map(|v| v[k]).min().unwrap());
        let hi = [0, 1].map(|k| self.vertices.iter().map(|v| v[k]).max().unwrap());
        (lo, hi)
    }

    /// Uniform-ish interior point with coordinates on the grid `1/den`.
    pub fn random_interior(&self, r: &mut impl Rng, den: i128) -> Pt {
        let (lo, hi) = self.bbox();
        let range = |k: usize| {
            let a = (lo[k] * den).ceil().to_integer();
            let b = (hi[k] * den).floor().to_integer();
            (a, b)
        };
        let (rx, ry) = (range(0), range(1));
        loop {
            let z = [q(r.random_range(rx.0..=rx.1), den), q(r.random_range(ry.0..=ry.1), den)];
            if self.interior(&z) {
                return z;
            }
        }
    }

    pub fn area(&self) -> Q {
        // Vertices sorted by angle around their mean.
        let n = self.vertices.len() as i128;
        let cx = self.vertices.iter().map(|v| v[0]).sum::<Q>() / n;
        let cy = self.vertices.iter().map(|v| v[1]).sum::<Q>() / n;
        let mut v = self.vertices.clone();
        v.sort_by(|a, b| {
            let ang = |p: &Pt| ((p[1] - cy).to_f64().unwrap()).atan2((p[0] - cx).to_f64().unwrap());
            ang(a).total_cmp(&ang(b))
        });
        let mut s = Q::zero();
        for i in 0..v.len() {
            let (a, b) = (v[i], v[(i + 1) % v.len()]);
            s += a[0] * b[1] - a[1] * b[0];
        }
        s.abs() / 2
    }
}

/// Raised coefficients over the defaults, keyed by exponent.
pub type Raised = BTreeMap<[i64; 2], Q>;

/// Up to four raised exponents with `|q_i| <= 2` (the constant included),
/// each lifted by a multiple of 1/12 in (0, 2] above its default.
pub fn random_raised(poly: &mut Polygon, r: &mut impl Rng) -> Raised {
    let mut out = Raised::new();
    for _ in 0..r.random_range(0..=4) {
        let qv = [r.random_range(-2..=2), r.random_range(-2..=2)];
        let default = -poly.support(qv);
        out.insert(qv, default + q(r.random_range(1..=24), 12));
    }
    out
}

pub fn series(domain: &Arc<OmegaDomain>, raised: &Raised) -> TropicalSeries {
    TropicalSeries::with_coefficients(
        domain.clone(),
        raised.iter().map(|(qv, a)| Monomial::new(qv.to_vec(), from_q(a))),
    )
    .expect("raised coefficients are admissible")
}

pub const ORACLE_RADIUS_SQ: i64 = 400;

/// Brute-force `min_{|q| <= 20} (q·z + a_q)` with defaults `a_q = −min_Ω q·z`.
pub fn oracle_eval(poly: &mut Polygon, raised: &Raised, z: &Pt) -> Q {
    let r = 20;
    let mut best: Option<Q> = None;
    for x in -r..=r {
        for y in -r..=r {
            if x * x + y * y > ORACLE_RADIUS_SQ {
                continue;
            }
            let a = match raised.get(&[x, y]) {
                Some(a) => *a,
                None => -poly.support([x, y]),
            };
            let v = dot([x, y], z) + a;
            if best.is_none_or(|b| v < b) {
                best = Some(v);
            }
        }
    }
    best.unwrap()
}

/// Brute-force weighted distance `min_{0 < |q| <= 20} (q·z − min_Ω q·z)`.
pub fn oracle_l(poly: &mut Polygon, z: &Pt) -> Q {
    let mut raised = Raised::new();
    // Lifting the constant out of reach leaves only q ≠ 0.
    raised.insert([0, 0], q(1 << 40, 1));
    oracle_eval(poly, &raised, z)
}
