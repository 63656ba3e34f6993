//! Integer exponent vectors and lattice-ball enumeration.

use std::borrow::Borrow;
use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar};

/// Default cap on the number of points a single lattice enumeration may yield.
pub const DEFAULT_LATTICE_CAP: usize = 10_000_000;

/// Exponent `q` of a tropical monomial. Ordered lexicographically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(Vec<i64>);

impl LatticeVector {
    pub fn new(coords: Vec<i64>) -> Self {
        assert!(!coords.is_empty(), "lattice vectors need at least one coordinate");
        LatticeVector(coords)
    }

    pub fn zero(n: usize) -> Self {
        LatticeVector(vec![0; n])
    }

    pub fn unit(n: usize, axis: usize, sign: i64) -> Self {
        let mut v = vec![0; n];
        v[axis] = sign;
        LatticeVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn norm_sq(&self) -> i64 {
        norm_sq(&self.0)
    }

    pub fn gcd(&self) -> i64 {
        self.0.iter().fold(0i64, |g, &c| g.gcd(&c))
    }

    pub fn is_primitive(&self) -> bool {
        self.gcd() == 1
    }

    pub fn scaled(&self, k: i64) -> Self {
        LatticeVector(self.0.iter().map(|c| c * k).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// `q · z` for a point with scalar coordinates.
    pub fn dot(&self, z: &[Scalar]) -> Scalar {
        dot(&self.0, z)
    }
}

impl Borrow<[i64]> for LatticeVector {
    fn borrow(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for LatticeVector {
    fn from(v: Vec<i64>) -> Self {
        LatticeVector::new(v)
    }
}

impl From<&[i64]> for LatticeVector {
    fn from(v: &[i64]) -> Self {
        LatticeVector::new(v.to_vec())
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn norm_sq(q: &[i64]) -> i64 {
    q.iter().map(|c| c * c).sum()
}

pub(crate) fn dot(q: &[i64], z: &[Scalar]) -> Scalar {
    debug_assert_eq!(q.len(), z.len());
    let mode = z.first().map(Scalar::mode).unwrap_or(Mode::Exact);
    let mut acc = Scalar::zero(mode);
    for (&c, x) in q.iter().zip(z) {
        match c {
            0 => {}
            1 => acc += x,
            -1 => acc -= x,
            _ => acc += &x.mul_int(c),
        }
    }
    acc
}

pub(crate) fn dot_f64(q: &[i64], z: &[f64]) -> f64 {
    q.iter().zip(z).map(|(&c, x)| c as f64 * x).sum()
}

/// Rational upper bound on `sqrt(s)` with denominator `2^20`.
pub fn sqrt_upper_bound(s: i64) -> Scalar {
    assert!(s >= 0);
    let scaled = (s as u128) << 40;
    let mut r = scaled.sqrt();
    if r * r < scaled {
        r += 1;
    }
    Scalar::from_big(num_rational::BigRational::new(
        BigInt::from(r),
        BigInt::from(1u64 << 20),
    ))
}

/// Integer bound `floor(b)` for a non-negative scalar, saturating into `i64`.
pub(crate) fn floor_bound(b: &Scalar) -> Result<i64> {
    if b.is_negative() {
        return Err(Error::Invalid(format!("negative radius bound {b}")));
    }
    match b {
        Scalar::Approx(v) if !v.is_finite() => {
            Err(Error::Resource(format!("non-finite radius bound {v}")))
        }
        _ => b
            .floor_int()
            .to_i64()
            .ok_or_else(|| Error::Resource(format!("radius bound {b} does not fit in 64 bits"))),
    }
}

fn ball_volume_estimate(bound: i64, n: usize) -> f64 {
    let r = (bound as f64).sqrt() + (n as f64).sqrt();
    // Volume of the cube around the ball is a safe over-estimate for n <= 3
    // and cheap for any n.
    let unit = match n {
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 / 3.0 * std::f64::consts::PI,
        _ => 2f64.powi(n as i32),
    };
    unit * r.powi(n as i32)
}

/// Calls `visit` for every `q` with `|q|^2 <= bound`, in lexicographic order.
pub(crate) fn for_each_in_ball(bound: i64, n: usize, mut visit: impl FnMut(&[i64])) {
    fn rec(buf: &mut Vec<i64>, depth: usize, left: i64, visit: &mut impl FnMut(&[i64])) {
        if depth == buf.len() {
            visit(buf);
            return;
        }
        let r = isqrt(left);
        for c in -r..=r {
            buf[depth] = c;
            rec(buf, depth + 1, left - c * c, visit);
        }
    }
    if bound < 0 {
        return;
    }
    let mut buf = vec![0i64; n];
    rec(&mut buf, 0, bound, &mut visit);
}

pub(crate) fn isqrt(v: i64) -> i64 {
    if v <= 0 {
        0
    } else {
        (v as u64).sqrt() as i64
    }
}

/// All `q in Z^n` with `|q|_2^2 <= radius_sq_bound`, sorted lexicographically.
pub fn lattice_ball(radius_sq_bound: &Scalar, n: usize) -> Result<Vec<LatticeVector>> {
    lattice_ball_capped(radius_sq_bound, n, DEFAULT_LATTICE_CAP)
}

pub fn lattice_ball_capped(
    radius_sq_bound: &Scalar,
    n: usize,
    cap: usize,
) -> Result<Vec<LatticeVector>> {
    if n == 0 {
        return Err(Error::Invalid("dimension must be at least 1".into()));
    }
    let bound = floor_bound(radius_sq_bound)?;
    check_ball_cap(bound, n, cap)?;
    let mut out = Vec::new();
    for_each_in_ball(bound, n, |q| out.push(LatticeVector(q.to_vec())));
    if out.len() > cap {
        return Err(cap_error(bound, n, cap));
    }
    Ok(out)
}

pub(crate) fn check_ball_cap(bound: i64, n: usize, cap: usize) -> Result<()> {
    if ball_volume_estimate(bound, n) > 2.0 * cap as f64 + 64.0 {
        Err(cap_error(bound, n, cap))
    } else {
        Ok(())
    }
}

fn cap_error(bound: i64, n: usize, cap: usize) -> Error {
    Error::Resource(format!(
        "lattice ball |q|^2 <= {bound} in dimension {n} exceeds the enumeration cap of {cap} points"
    ))
}

/// `{q : (q − center)ᵀ A (q − center) <= rho2}` for positive-definite `A`.
#[derive(Clone, Debug)]
pub(crate) struct Ellipsoid {
    pub a: Vec<Vec<f64>>,
    pub center: Vec<f64>,
    pub rho2: f64,
}

impl Ellipsoid {
    /// Over-estimate of the number of lattice points: the volume of the
    /// ellipsoid grown by the half-diagonal of a unit cell.
    fn count_estimate(&self, form: &[Vec<f64>]) -> f64 {
        let n = self.center.len();
        // trace(A) bounds the largest eigenvalue.
        let trace: f64 = (0..n).map(|i| self.a[i][i]).sum();
        let grow = (n as f64).sqrt() / 2.0 * trace.sqrt();
        let r = self.rho2.max(0.0).sqrt() + grow;
        let det: f64 = (0..n).map(|i| form[i][i]).product();
        let unit = match n {
            1 => 2.0,
            2 => std::f64::consts::PI,
            3 => 4.0 / 3.0 * std::f64::consts::PI,
            _ => 2f64.powi(n as i32),
        };
        unit * r.powi(n as i32) / det.max(f64::MIN_POSITIVE).sqrt()
    }

    pub fn estimated_points(&self) -> f64 {
        self.count_estimate(&self.triangular())
    }

    /// Triangular form `Q(y) = Σ q_ii (y_i + Σ_{j>i} q_ij y_j)²`.
    fn triangular(&self) -> Vec<Vec<f64>> {
        let n = self.center.len();
        let mut q = self.a.clone();
        for i in 0..n {
            for j in i + 1..n {
                q[j][i] = q[i][j];
                q[i][j] /= q[i][i];
            }
            for k in i + 1..n {
                for l in k..n {
                    q[k][l] -= q[k][i] * q[i][l];
                }
            }
        }
        q
    }

    /// Visits every lattice point inside (Fincke–Pohst), or fails with a
    /// resource error when the count estimate exceeds `cap`.
    pub fn for_each(&self, cap: usize, mut visit: impl FnMut(&[i64])) -> Result<()> {
        let n = self.center.len();
        let q = self.triangular();
        if (0..n).any(|i| !(q[i][i] > 0.0)) {
            return Err(Error::Invalid("ellipsoid form is not positive definite".into()));
        }
        if self.count_estimate(&q) > 2.0 * cap as f64 + 64.0 {
            return Err(Error::Resource(format!(
                "lattice ellipsoid around {:?} exceeds the enumeration cap of {cap} points",
                self.center
            )));
        }
        fn rec(
            i: usize,
            left: f64,
            q: &[Vec<f64>],
            c: &[f64],
            buf: &mut [i64],
            visit: &mut impl FnMut(&[i64]),
        ) {
            let n = c.len();
            let u = c[i] - (i + 1..n).map(|j| q[i][j] * (buf[j] as f64 - c[j])).sum::<f64>();
            let w = (left.max(0.0) / q[i][i]).sqrt();
            let (lo, hi) = ((u - w).ceil() as i64, (u + w).floor() as i64);
            for x in lo..=hi {
                let t = left - q[i][i] * (x as f64 - u).powi(2);
                if t < 0.0 {
                    continue;
                }
                buf[i] = x;
                if i == 0 {
                    visit(buf);
                } else {
                    rec(i - 1, t, q, c, buf, visit);
                }
            }
        }
        if self.rho2 < 0.0 {
            return Ok(());
        }
        let mut buf = vec![0i64; n];
        rec(n - 1, self.rho2, &q, &self.center, &mut buf, &mut visit);
        Ok(())
    }
}

/// `{q : rows_k · q <= rhs}` inside the box `[lo, hi]`.
#[derive(Clone, Debug)]
pub(crate) struct Polyhedron {
    pub rows: Vec<Vec<f64>>,
    pub rhs: f64,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Polyhedron {
    fn range(&self, k: usize) -> (i64, i64) {
        let pad = |x: f64| 1e-9 * (1.0 + x.abs());
        (
            (self.lo[k] - pad(self.lo[k])).ceil() as i64,
            (self.hi[k] + pad(self.hi[k])).floor() as i64,
        )
    }

    /// Box volume: an over-estimate of the number of lattice points.
    pub fn estimated_points(&self) -> f64 {
        (0..self.lo.len())
            .map(|k| {
                let (a, b) = self.range(k);
                (b - a + 1).max(0) as f64
            })
            .product()
    }

    /// Visits every lattice point (and possibly a few just outside, within
    /// rounding): the outer coordinates sweep the box, the widest one is
    /// cut exactly by the rows.
    pub fn for_each(&self, cap: usize, mut visit: impl FnMut(&[i64])) -> Result<()> {
        let n = self.lo.len();
        let widths: Vec<(i64, i64)> = (0..n).map(|k| self.range(k)).collect();
        if widths.iter().any(|(a, b)| a > b) {
            return Ok(());
        }
        let inner = (0..n)
            .max_by_key(|&k| widths[k].1 - widths[k].0)
            .expect("positive dimension");
        let outer: f64 = (0..n)
            .filter(|&k| k != inner)
            .map(|k| (widths[k].1 - widths[k].0 + 1) as f64)
            .product();
        let too_many = || {
            Error::Resource(format!(
                "lattice region in the box {:?}..{:?} exceeds the enumeration cap of {cap} points",
                self.lo, self.hi
            ))
        };
        if outer > cap as f64 {
            return Err(too_many());
        }
        let mut buf: Vec<i64> = widths.iter().map(|w| w.0).collect();
        let mut visited = 0usize;
        loop {
            let (mut a, mut b) = (widths[inner].0 as f64, widths[inner].1 as f64);
            let mut empty = false;
            for row in &self.rows {
                let s: f64 = (0..n).filter(|&k| k != inner).map(|k| row[k] * buf[k] as f64).sum();
                let room = self.rhs - s + 1e-9 * (1.0 + self.rhs.abs() + s.abs());
                let r = row[inner];
                if r.abs() < 1e-300 {
                    empty |= room < 0.0;
                } else if r > 0.0 {
                    b = b.min((room / r).floor());
                } else {
                    a = a.max((room / r).ceil());
                }
            }
            if !empty && a <= b {
                visited += (b - a) as usize + 1;
                if visited > cap {
                    return Err(too_many());
                }
                for x in a as i64..=b as i64 {
                    buf[inner] = x;
                    visit(&buf);
                }
            }
            // Odometer over the outer coordinates.
            let mut k = n;
            loop {
                if k == 0 {
                    return Ok(());
                }
                k -= 1;
                if k == inner {
                    continue;
                }
                if buf[k] < widths[k].1 {
                    buf[k] += 1;
                    break;
                }
                buf[k] = widths[k].0;
            }
        }
    }
}

/// Lattice points whose default term is below a threshold.
#[derive(Clone, Debug)]
pub(crate) enum TermRegion {
    Ellipsoid(Ellipsoid),
    Polyhedron(Polyhedron),
}

impl TermRegion {
    pub fn estimated_points(&self) -> f64 {
        match self {
            TermRegion::Ellipsoid(e) => e.estimated_points(),
            TermRegion::Polyhedron(p) => p.estimated_points(),
        }
    }

    pub fn for_each(&self, cap: usize, visit: impl FnMut(&[i64])) -> Result<()> {
        match self {
            TermRegion::Ellipsoid(e) => e.for_each(cap, visit),
            TermRegion::Polyhedron(p) => p.for_each(cap, visit),
        }
    }
}
