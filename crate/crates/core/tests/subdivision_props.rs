mod common;

use common::*;
use omtrop::geometry::IntegerHull;
use omtrop::subdivision::{corner_locus_cells, is_mild, planar_mild_catalogue, region_measures};
use omtrop::LatticeVector;
use proptest::prelude::*;
use rand::Rng;

fn lv(v: [i64; 2]) -> LatticeVector {
    LatticeVector::new(v.to_vec())
}

/// Lattice points of the hull, by brute force over the bounding box.
fn hull_lattice_points(pts: &[[i64; 2]]) -> usize {
    let ext: Vec<[i64; 2]> = {
        // Monotone chain, dropping collinear points.
        let mut p = pts.to_vec();
        p.sort();
        p.dedup();
        if p.len() < 3 {
            p
        } else {
            let cross = |o: [i64; 2], a: [i64; 2], b: [i64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
            let mut h: Vec<[i64; 2]> = Vec::new();
            for pass in 0..2 {
                let start = h.len();
                let iter: Box<dyn Iterator<Item = &[i64; 2]>> =
                    if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
                for &x in iter {
                    while h.len() >= start + 2 && cross(h[h.len() - 2], h[h.len() - 1], x) <= 0 {
                        h.pop();
                    }
                    h.push(x);
                }
                h.pop();
            }
            h
        }
    };
    let lo = [0, 1].map(|k| pts.iter().map(|p| p[k]).min().unwrap());
    let hi = [0, 1].map(|k| pts.iter().map(|p| p[k]).max().unwrap());
    let mut count = 0;
    for x in lo[0]..=hi[0] {
        for y in lo[1]..=hi[1] {
            let z = [x, y];
            let inside = match ext.len() {
                1 => z == ext[0],
                2 => {
                    let (a, b) = (ext[0], ext[1]);
                    let cr = (b[0] - a[0]) * (z[1] - a[1]) - (b[1] - a[1]) * (z[0] - a[0]);
                    cr == 0
                }
                _ => (0..ext.len()).all(|i| {
                    let (a, b) = (ext[i], ext[(i + 1) % ext.len()]);
                    (b[0] - a[0]) * (z[1] - a[1]) - (b[1] - a[1]) * (z[0] - a[0]) >= 0
                }),
            };
            if inside {
                count += 1;
            }
        }
    }
    count
}

fn brute_mild(pts: &[[i64; 2]]) -> bool {
    let hull = IntegerHull::new(&pts.iter().map(|&p| lv(p)).collect::<Vec<_>>());
    hull_lattice_points(pts) == hull.extreme_points().len()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn regions_cover_the_domain(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut poly = Polygon::random(&mut r);
        let raised = random_raised(&mut poly, &mut r);
        let f = series(&poly.domain(), &raised);
        let total: Q = region_measures(&f).unwrap().iter().map(|(_, m)| to_q(m)).sum();
        prop_assert_eq!(total, poly.area());
    }

    #[test]
    fn cells_are_dual_and_witnessed(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut poly = Polygon::random(&mut r);
        let raised = random_raised(&mut poly, &mut r);
        let f = series(&poly.domain(), &raised);
        let cells = corner_locus_cells(&f).unwrap();
        // Cells are labelled by the small form; the full series may also
        // touch the minimum at lattice points that dominate nothing.
        let small = f.small_canonical_form().unwrap();
        prop_assert!(cells.iter().any(|c| c.dim == 2));
        for c in &cells {
            let w: Pt = [to_q(&c.witness[0]), to_q(&c.witness[1])];
            prop_assert!(poly.interior(&w));
            prop_assert_eq!(&small.argmin_set(&c.witness).unwrap(), &c.argmin);
            prop_assert!(f.argmin_set(&c.witness).unwrap().iter().all(|q| IntegerHull::new(&c.argmin).contains(q.coords())));
            let hull = IntegerHull::new(&c.argmin);
            prop_assert_eq!(hull.affine_dim() + c.dim, 2, "cell {:?}", c.argmin);
        }
        // Mildness is the catalogue test over corner-locus cells.
        let report = is_mild(&f).unwrap();
        let by_catalogue = cells.iter().filter(|c| c.on_corner_locus()).all(|c| planar_mild_catalogue(&c.argmin));
        prop_assert_eq!(report.mild, by_catalogue);
        if report.mild {
            prop_assert!(report.non_dominating_lattice_points.is_empty());
        }
    }

    #[test]
    fn catalogue_matches_lattice_point_count(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = r.random_range(1..=5);
        let pts: Vec<[i64; 2]> = (0..k).map(|_| [r.random_range(-3..=3), r.random_range(-3..=3)]).collect();
        let vs: Vec<LatticeVector> = pts.iter().map(|&p| lv(p)).collect();
        prop_assert_eq!(planar_mild_catalogue(&vs), brute_mild(&pts), "points {:?}", pts);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn grid_argmins_are_cells(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut poly = Polygon::random(&mut r);
        let raised = random_raised(&mut poly, &mut r);
        let f = series(&poly.domain(), &raised);
        let cells = corner_locus_cells(&f).unwrap();
        let small = f.small_canonical_form().unwrap();
        let (lo, hi) = poly.bbox();
        let n = 200;
        for i in 1..n {
            for j in 1..n {
                let t = [q(i, n), q(j, n)];
                let z = [lo[0] + (hi[0] - lo[0]) * t[0], lo[1] + (hi[1] - lo[1]) * t[1]];
                if !poly.interior(&z) {
                    continue;
                }
                let b = small.argmin_set(&point(&z)).unwrap();
                prop_assert!(cells.iter().any(|c| c.argmin == b), "argmin {:?} at {:?} is no cell", b, z);
            }
        }
    }
}
