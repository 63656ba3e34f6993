//! Linearity regions of a series, the cells of its corner locus with their
//! dual argmin sets, mildness classification, and renderable geometry.

use serde::Serialize;

use crate::domain::lattice_free_hull;
use crate::error::{Error, Result};
use crate::geometry::{
    halfspaces_to_geometry, measure, HalfSpace, IntegerHull, PolytopeGeometry, Point,
};
use crate::lattice::{self, LatticeVector};
use crate::scalar::Scalar;
use crate::series::TropicalSeries;

/// Closed region where one monomial attains the minimum, with non-empty
/// interior.
#[derive(Clone, Debug)]
pub struct LinearityRegion {
    pub q: LatticeVector,
    pub a: Scalar,
    pub geometry: PolytopeGeometry,
}

/// One constraint `d·z >= rhs` of a region, with a float shadow for cheap
/// screening.
struct Cut {
    d: Vec<i64>,
    rhs: Scalar,
    df: Vec<f64>,
    rhs_f: f64,
}

impl Cut {
    fn slack_f(&self, v: &[f64]) -> f64 {
        self.df.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() - self.rhs_f
    }

    fn scale(&self, v: &[f64]) -> f64 {
        1.0 + self.rhs_f.abs() + self.df.iter().zip(v).map(|(a, b)| (a * b).abs()).sum::<f64>()
    }

    /// Float slack below which the exact test is needed.
    fn margin(&self, v: &[f64]) -> f64 {
        1e-9 * self.scale(v)
    }

    fn violated_by(&self, v: &[Scalar], vf: &[f64]) -> bool {
        self.slack_f(vf) <= self.margin(vf) && lattice::dot(&self.d, v) < self.rhs
    }

    fn halfspace(&self) -> Result<HalfSpace> {
        HalfSpace::normalized(&self.d, self.rhs.clone())
    }
}

fn to_f64(v: &[Scalar]) -> Vec<f64> {
    v.iter().map(Scalar::to_f64).collect()
}

/// Keeps the part of a float polygon where `cut` holds.
fn clip_f64(poly: &[[f64; 2]], cut: &Cut) -> Vec<[f64; 2]> {
    let k = poly.len();
    let mut out = Vec::with_capacity(k + 1);
    for i in 0..k {
        let (p, q) = (poly[i], poly[(i + 1) % k]);
        let (sp, sq) = (cut.slack_f(&p), cut.slack_f(&q));
        if sp >= 0.0 {
            out.push(p);
        }
        if (sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0) {
            let t = sp / (sp - sq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

/// Region `{z ∈ Ω : q0·z + a0 <= q·z + a_q for all candidates}`, or `None`
/// when it has empty interior.
///
/// Only a few constraints are active, so the region is built from an
/// active set and then verified exactly against every other constraint
/// (floats only screen out constraints with a comfortable margin).
pub(crate) fn region_of(
    f: &TropicalSeries,
    q0: &LatticeVector,
    a0: &Scalar,
    candidates: &[(LatticeVector, Scalar)],
) -> Result<Option<PolytopeGeometry>> {
    let g = f.domain().require_polytope()?;
    let n = f.dim();
    let cuts: Vec<Cut> = candidates
        .iter()
        .filter(|(q, _)| q != q0)
        .map(|(q, a)| {
            let d: Vec<i64> = q.coords().iter().zip(q0.coords()).map(|(x, y)| x - y).collect();
            let rhs = a0 - a;
            Cut {
                df: d.iter().map(|&x| x as f64).collect(),
                rhs_f: rhs.to_f64(),
                d,
                rhs,
            }
        })
        .collect();
    let mut active: Vec<bool> = vec![false; cuts.len()];

    if n == 2 {
        let mut fpoly: Vec<[f64; 2]> = g.vertices().iter().map(|v| [v[0].to_f64(), v[1].to_f64()]).collect();
        for c in &cuts {
            fpoly = clip_f64(&fpoly, c);
        }
        if fpoly.len() < 3 {
            active.iter_mut().for_each(|a| *a = true);
        } else {
            for (c, a) in cuts.iter().zip(active.iter_mut()) {
                *a = fpoly.iter().any(|v| c.slack_f(v) <= 1e-7 * c.scale(v));
            }
        }
        loop {
            let mut poly = g.to_polygon()?;
            for (c, _) in cuts.iter().zip(&active).filter(|(_, &a)| a) {
                poly = poly.clip_int(&c.d, &c.rhs);
                if poly.vertices().len() < 3 {
                    return Ok(None);
                }
            }
            if poly.is_degenerate() {
                return Ok(None);
            }
            let verts = poly.into_vertices();
            if !add_violators(&cuts, &mut active, &verts, usize::MAX) {
                let mut hs: Vec<HalfSpace> = g.facet_halfspaces().cloned().collect();
                for (c, _) in cuts.iter().zip(&active).filter(|(_, &a)| a) {
                    hs.push(c.halfspace()?);
                }
                return match PolytopeGeometry::from_convex_polygon(verts, hs) {
                    Ok(geo) => Ok(Some(geo)),
                    Err(Error::DegenerateDomain(_)) => Ok(None),
                    Err(e) => Err(e),
                };
            }
        }
    }

    loop {
        let mut hs: Vec<HalfSpace> = g.facet_halfspaces().cloned().collect();
        for (c, _) in cuts.iter().zip(&active).filter(|(_, &a)| a) {
            hs.push(c.halfspace()?);
        }
        let geo = match halfspaces_to_geometry(&hs, n) {
            Ok(geo) => geo,
            Err(Error::DegenerateDomain(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        if !add_violators(&cuts, &mut active, geo.vertices(), 1) {
            return Ok(Some(geo));
        }
    }
}

/// Marks constraints violated at `verts` (at most `per_vertex` per vertex,
/// most violated first); returns whether anything was added.
fn add_violators(cuts: &[Cut], active: &mut [bool], verts: &[Point], per_vertex: usize) -> bool {
    let mut added = false;
    for v in verts {
        let vf = to_f64(v);
        let mut hits: Vec<(f64, usize)> = cuts
            .iter()
            .enumerate()
            .filter(|(i, c)| !active[*i] && c.violated_by(v, &vf))
            .map(|(i, c)| (c.slack_f(&vf) / c.df.iter().map(|x| x * x).sum::<f64>().sqrt(), i))
            .collect();
        hits.sort_by(|a, b| a.0.total_cmp(&b.0));
        for &(_, i) in hits.iter().take(per_vertex) {
            active[i] = true;
            added = true;
        }
    }
    added
}

fn candidate_coefficients(f: &TropicalSeries) -> Result<Vec<(LatticeVector, Scalar)>> {
    Ok(f.dominating_candidates()?
        .into_iter()
        .map(|q| {
            let a = f.coefficient(q.coords()).expect("candidate has a coefficient");
            (q, a)
        })
        .collect())
}

/// All full-dimensional linearity regions, sorted by exponent.
pub fn linearity_regions(f: &TropicalSeries) -> Result<Vec<LinearityRegion>> {
    let cands = candidate_coefficients(f)?;
    let mut out = Vec::new();
    for (q, a) in &cands {
        if let Some(geometry) = region_of(f, q, a, &cands)? {
            out.push(LinearityRegion {
                q: q.clone(),
                a: a.clone(),
                geometry,
            });
        }
    }
    Ok(out)
}

/// Union of the vertices of all linearity regions (includes the vertices
/// of Ω). A concave piecewise-linear function minus a linear one attains its
/// maximum at one of these.
pub fn region_vertices(f: &TropicalSeries) -> Result<Vec<Point>> {
    let mut out: Vec<Point> = Vec::new();
    for r in linearity_regions(f)? {
        for v in r.geometry.vertices() {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
    }
    Ok(out)
}

/// A face of the stratification of Ω by argmin sets, together with the
/// exponents minimal on it.
#[derive(Clone, Debug, Serialize)]
pub struct DualCell {
    /// `B_z`, sorted.
    pub argmin: Vec<LatticeVector>,
    /// Dimension of the geometric face.
    pub dim: usize,
    /// Vertices of the geometric face (cyclic for 2-faces).
    pub vertices: Vec<Point>,
    /// Relative-interior point where `argmin` is attained exactly.
    pub witness: Point,
}

impl DualCell {
    pub fn on_corner_locus(&self) -> bool {
        self.argmin.len() >= 2
    }
}

fn require_dim(f: &TropicalSeries) -> Result<()> {
    match f.dim() {
        2 | 3 => Ok(()),
        n => Err(Error::Unsupported(format!(
            "corner-locus cells in dimension {n} (supported: 2 and 3)"
        ))),
    }
}

/// Cells of every dimension, deduplicated by argmin set. The argmin sets
/// are taken over the small canonical form.
pub fn corner_locus_cells(f: &TropicalSeries) -> Result<Vec<DualCell>> {
    require_dim(f)?;
    let small = if f.has_defaults() {
        f.small_canonical_form()?
    } else {
        // A finite polynomial may carry redundant monomials; reduce first.
        f.small_canonical_form()?
    };
    cells_of_small(&small)
}

pub(crate) fn cells_of_small(small: &TropicalSeries) -> Result<Vec<DualCell>> {
    let n = small.dim();
    let regions = linearity_regions(small)?;
    let domain = small.domain();
    let g = domain.require_polytope()?;
    let mut cells: Vec<DualCell> = Vec::new();
    for r in &regions {
        for k in 0..=n {
            for face in r.geometry.faces(k) {
                let witness = r.geometry.centroid_of(&face.vertices);
                if !g.contains_in_interior(&witness) {
                    continue;
                }
                let argmin = small.argmin_set(&witness)?;
                if cells.iter().any(|c| c.argmin == argmin) {
                    continue;
                }
                cells.push(DualCell {
                    argmin,
                    dim: k,
                    vertices: face.vertices.iter().map(|&i| r.geometry.vertex(i).to_vec()).collect(),
                    witness,
                });
            }
        }
    }
    cells.sort_by(|a, b| a.argmin.cmp(&b.argmin));
    Ok(cells)
}

/// Mildness verdict for one corner-locus cell.
#[derive(Clone, Debug, Serialize)]
pub struct CellVerdict {
    pub argmin: Vec<LatticeVector>,
    pub dim: usize,
    pub mild: bool,
    pub offending: Option<LatticeVector>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MildnessReport {
    pub cells: Vec<CellVerdict>,
    pub mild: bool,
    /// Lattice points of the hull of the small support that dominate no
    /// open set. Mildness of every cell implies this is empty.
    pub non_dominating_lattice_points: Vec<LatticeVector>,
}

impl MildnessReport {
    pub fn first_offender(&self) -> Option<&CellVerdict> {
        self.cells.iter().find(|c| !c.mild)
    }
}

/// Checks that the hull of every argmin set on the corner locus has no
/// lattice points other than its vertices.
pub fn is_mild(f: &TropicalSeries) -> Result<MildnessReport> {
    require_dim(f)?;
    let small = f.small_canonical_form()?;
    mildness_of_small(&small)
}

pub(crate) fn mildness_of_small(small: &TropicalSeries) -> Result<MildnessReport> {
    let cells = cells_of_small(small)?;
    let verdicts: Vec<CellVerdict> = cells
        .into_iter()
        .filter(DualCell::on_corner_locus)
        .map(|c| {
            let (mild, offending) = lattice_free_hull(&c.argmin);
            CellVerdict {
                argmin: c.argmin,
                dim: c.dim,
                mild,
                offending,
            }
        })
        .collect();
    let support: Vec<LatticeVector> = small.explicit().keys().cloned().collect();
    let non_dominating = IntegerHull::new(&support)
        .lattice_points()
        .into_iter()
        .filter(|q| !support.contains(q))
        .collect();
    Ok(MildnessReport {
        mild: verdicts.iter().all(|v| v.mild),
        cells: verdicts,
        non_dominating_lattice_points: non_dominating,
    })
}

/// A labelled piece of the corner locus.
#[derive(Clone, Debug, Serialize)]
pub struct LocusPiece {
    pub vertices: Vec<Point>,
    pub labels: Vec<LatticeVector>,
}

/// Exact geometry for renderers.
#[derive(Clone, Debug, Serialize)]
pub struct Complex {
    pub dim: usize,
    /// Domain polygon (2-D) or domain facets (3-D, each a cyclic polygon).
    pub domain_faces: Vec<Vec<Point>>,
    /// Segments (2-D) or planar polygons (3-D) of the corner locus.
    pub pieces: Vec<LocusPiece>,
    /// Corner-locus vertices with their argmin sets.
    pub vertices: Vec<LocusPiece>,
    /// One label point per linearity region.
    pub regions: Vec<(LatticeVector, Point)>,
}

pub fn extract_geometry(f: &TropicalSeries) -> Result<Complex> {
    require_dim(f)?;
    let n = f.dim();
    let g = f.domain().require_polytope()?;
    let small = f.small_canonical_form()?;
    let cells = cells_of_small(&small)?;
    let domain_faces = if n == 2 {
        vec![g.vertices().to_vec()]
    } else {
        g.facets()
            .iter()
            .map(|face| face.vertices.iter().map(|&i| g.vertex(i).to_vec()).collect())
            .collect()
    };
    let mut pieces = Vec::new();
    let mut vertices = Vec::new();
    let mut regions = Vec::new();
    for c in cells {
        if c.dim == n {
            regions.push((c.argmin[0].clone(), c.witness));
        } else if c.dim + 1 == n {
            pieces.push(LocusPiece {
                vertices: c.vertices,
                labels: c.argmin,
            });
        } else if c.dim == 0 {
            vertices.push(LocusPiece {
                vertices: c.vertices,
                labels: c.argmin,
            });
        }
    }
    Ok(Complex {
        dim: n,
        domain_faces,
        pieces,
        vertices,
        regions,
    })
}

/// Area (2-D) or volume (3-D) of every linearity region, for diagnostics.
pub fn region_measures(f: &TropicalSeries) -> Result<Vec<(LatticeVector, Scalar)>> {
    Ok(linearity_regions(f)?
        .into_iter()
        .map(|r| (r.q, measure(&r.geometry).value))
        .collect())
}

/// Catalogue test for planar lattice polygons without extra lattice
/// points: primitive segments, triangles of area 1/2, parallelograms of area
/// 1. Used to cross-check [`is_mild`].
pub fn planar_mild_catalogue(points: &[LatticeVector]) -> bool {
    let hull = IntegerHull::new(points);
    let ext = hull.extreme_points();
    match hull.affine_dim() {
        0 => true,
        1 => {
            let d = ext[1].sub(&ext[0]);
            d.is_primitive()
        }
        2 => {
            let twice = hull.twice_area().unwrap_or(0);
            match ext.len() {
                3 => twice == 1,
                4 => {
                    // Parallelogram: opposite sides equal as vectors.
                    let mut e = ext.clone();
                    sort_ccw(&mut e);
                    twice == 2 && e[1].sub(&e[0]) == e[2].sub(&e[3])
                }
                _ => false,
            }
        }
        _ => false,
    }
}

fn sort_ccw(pts: &mut [LatticeVector]) {
    let cx: i64 = pts.iter().map(|p| p.coords()[0]).sum();
    let cy: i64 = pts.iter().map(|p| p.coords()[1]).sum();
    let k = pts.len() as i64;
    pts.sort_by(|a, b| {
        let ang = |p: &LatticeVector| {
            let x = (p.coords()[0] * k - cx) as f64;
            let y = (p.coords()[1] * k - cy) as f64;
            y.atan2(x)
        };
        ang(a).total_cmp(&ang(b))
    });
}
