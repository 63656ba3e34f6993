//! Built-in fixtures: the worked square examples and their pictures,
//! checked exactly. Each check prints one line; any mismatch fails.

use omtrop::domain::{DomainSpec, HalfSpaceSpec, OmegaDomain};
use omtrop::dynamics::{add_monomial, wave_closure, wave_single, ClosureOptions};
use omtrop::render::{render_svg, SvgStyle};
use omtrop::scene::SceneConfig;
use omtrop::series::{rho, Monomial, TropicalSeries};
use omtrop::subdivision::extract_geometry;
use omtrop::{LatticeVector, Result, Scalar};

fn r(p: i64, q: i64) -> Scalar {
    Scalar::ratio(p, q)
}

fn lv(v: &[i64]) -> LatticeVector {
    LatticeVector::new(v.to_vec())
}

fn mono(q: &[i64], a: Scalar) -> Monomial {
    Monomial::new(q.to_vec(), a)
}

/// Sorted `(q, a)` pairs of a small canonical form.
fn small_pairs(f: &TropicalSeries) -> Result<Vec<(Vec<i64>, Scalar)>> {
    let mut v: Vec<_> = f
        .small_canonical_form()?
        .monomials()
        .into_iter()
        .map(|m| (m.q.coords().to_vec(), m.a))
        .collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(v)
}

fn pairs(list: &[(&[i64], Scalar)]) -> Vec<(Vec<i64>, Scalar)> {
    let mut v: Vec<_> = list.iter().map(|(q, a)| (q.to_vec(), a.clone())).collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v
}

/// `min(x, y, 1−x, 1−y, 1/3)` on the unit square.
fn square_third() -> Result<TropicalSeries> {
    TropicalSeries::with_coefficients(OmegaDomain::unit_square(), [mono(&[0, 0], r(1, 3))])
}

/// `min(2x, x+2/15, y, 1−x, 1−y, 1/3)`.
fn waved_square() -> Vec<(Vec<i64>, Scalar)> {
    pairs(&[
        (&[2, 0], r(0, 1)),
        (&[1, 0], r(2, 15)),
        (&[0, 1], r(0, 1)),
        (&[-1, 0], r(1, 1)),
        (&[0, -1], r(1, 1)),
        (&[0, 0], r(1, 3)),
    ])
}

fn pentagon() -> DomainSpec {
    let h = |n: [i64; 2], o: &str| HalfSpaceSpec {
        normal: n.to_vec(),
        offset: o.into(),
    };
    DomainSpec::Halfspaces {
        halfspaces: vec![
            h([1, 0], "0"),
            h([0, 1], "0"),
            h([-1, 0], "-2"),
            h([0, -1], "-2"),
            h([-1, -1], "-3"),
        ],
    }
}

const SQUARE_SCENE: &str = r#"{
  "domain": {"type": "halfspaces", "halfspaces": [
    {"normal": [1, 0], "offset": "0"}, {"normal": [0, 1], "offset": "0"},
    {"normal": [-1, 0], "offset": "-1"}, {"normal": [0, -1], "offset": "-1"}]},
  "points": [["1/5", "1/2"]],
  "initial": {"implicit_defaults": true, "monomials": [{"q": [0, 0], "a": "1/3"}]}
}"#;

type Check = (&'static str, fn() -> Result<bool>);

const CHECKS: &[Check] = &[
    ("every facet of the square and the pentagon is mild", || {
        for d in [OmegaDomain::unit_square(), pentagon().build()?] {
            let faces = d.mild_faces_check()?;
            if faces.iter().any(|f| f.dim == 1 && !f.mild) {
                return Ok(false);
            }
        }
        Ok(true)
    }),
    ("canonical coefficients: a_00 = 1/3, a_q = -min q.z otherwise", || {
        let f = square_third()?.canonical_form()?;
        let d = f.domain().clone();
        let mut ok = f.coefficient(&[0, 0]) == Some(r(1, 3));
        for x in -4i64..=4 {
            for y in -4i64..=4 {
                if (x, y) != (0, 0) {
                    ok &= f.coefficient(&[x, y]) == Some(-d.support_value(&[x, y]));
                }
            }
        }
        Ok(ok)
    }),
    ("small canonical form returns the five monomials", || {
        let want = pairs(&[
            (&[1, 0], r(0, 1)),
            (&[0, 1], r(0, 1)),
            (&[-1, 0], r(1, 1)),
            (&[0, -1], r(1, 1)),
            (&[0, 0], r(1, 3)),
        ]);
        Ok(small_pairs(&square_third()?.canonical_form()?)? == want)
    }),
    ("wave at (1/5,1/2) gives min(2x, x+2/15, y, 1-x, 1-y, 1/3)", || {
        let (g, step) = wave_single(&square_third()?, &[r(1, 5), r(1, 2)])?;
        Ok(small_pairs(&g)? == waved_square() && step.q0 == lv(&[1, 0]) && step.c == r(2, 15))
    }),
    ("rho(before, after) = 2/15", || {
        let f = square_third()?;
        let (g, _) = wave_single(&f, &[r(1, 5), r(1, 2)])?;
        Ok(rho(&f, &g)? == r(2, 15))
    }),
    ("Add with t = 1 raises a_(1,0) from 0 to 2/15", || {
        let f = square_third()?;
        let g = add_monomial(&f, &lv(&[1, 0]), &r(2, 15), &r(1, 1))?;
        Ok(f.coefficient(&[1, 0]) == Some(r(0, 1)) && g.coefficient(&[1, 0]) == Some(r(2, 15)))
    }),
    ("wave of 0 at the centre is min(x, y, 1-x, 1-y)", || {
        let (g, _) = wave_single(&TropicalSeries::zero(OmegaDomain::unit_square()), &[r(1, 2), r(1, 2)])?;
        let want = pairs(&[
            (&[1, 0], r(0, 1)),
            (&[0, 1], r(0, 1)),
            (&[-1, 0], r(1, 1)),
            (&[0, -1], r(1, 1)),
        ]);
        let mut got = small_pairs(&g)?;
        // The constant 1/2 ties only at the centre and is not a face.
        got.retain(|(q, _)| q != &vec![0, 0]);
        Ok(got == want)
    }),
    ("closure of 0 at (1/5,1/2) is min(l, 1/5)", || {
        let (g, _) = wave_closure(
            &TropicalSeries::zero(OmegaDomain::unit_square()),
            &[vec![r(1, 5), r(1, 2)]],
            &ClosureOptions::default(),
        )?;
        let want = pairs(&[
            (&[1, 0], r(0, 1)),
            (&[0, 1], r(0, 1)),
            (&[-1, 0], r(1, 1)),
            (&[0, -1], r(1, 1)),
            (&[0, 0], r(1, 5)),
        ]);
        Ok(small_pairs(&g)? == want)
    }),
    ("square curve: inner frame at 1/3, 2/3 with four legs", || {
        let c = extract_geometry(&square_third()?)?;
        let verts: Vec<Vec<Scalar>> = c.vertices.iter().map(|v| v.vertices[0].clone()).collect();
        let want = [
            vec![r(1, 3), r(1, 3)],
            vec![r(2, 3), r(1, 3)],
            vec![r(2, 3), r(2, 3)],
            vec![r(1, 3), r(2, 3)],
        ];
        let same = verts.len() == want.len() && want.iter().all(|w| verts.contains(w));
        Ok(same && c.pieces.len() == 8 && c.regions.len() == 5)
    }),
    ("after the wave the curve passes the point and a 2x face appears", || {
        let (g, _) = wave_single(&square_third()?, &[r(1, 5), r(1, 2)])?;
        let p = [r(1, 5), r(1, 2)];
        let on_locus = g.argmin_set(&p)?.len() >= 2;
        let c = extract_geometry(&g)?;
        let has_face = c.regions.iter().any(|(q, _)| q == &lv(&[2, 0]));
        Ok(on_locus && has_face && c.regions.len() == 6)
    }),
    ("scene run reports a_(1,0) = \"2/15\"", || {
        let scene = SceneConfig::from_json_str(SQUARE_SCENE)?.build()?;
        let (g, _) = wave_closure(&scene.initial_series()?, scene.points(), &scene.closure_options())?;
        let json = serde_json::to_value(g.small_canonical_form()?.to_json())?;
        Ok(json["monomials"]
            .as_array()
            .is_some_and(|m| m.iter().any(|x| x["q"] == serde_json::json!([1, 0]) && x["a"] == "2/15")))
    }),
    ("rendering labels six faces including 2x and marks the point", || {
        let scene = SceneConfig::from_json_str(SQUARE_SCENE)?.build()?;
        let (g, _) = wave_closure(&scene.initial_series()?, scene.points(), &scene.closure_options())?;
        let style = SvgStyle {
            labels: true,
            ..SvgStyle::default()
        };
        let svg = render_svg(&extract_geometry(&g)?, scene.points(), &style)?;
        Ok(svg.matches("<text ").count() == 6 && svg.contains(">(2,0)</text>") && svg.matches("<circle ").count() == 1)
    }),
];

/// Runs every check, printing one line each; returns whether all passed.
pub fn run() -> bool {
    let mut ok = true;
    for (name, check) in CHECKS {
        let verdict = match check() {
            Ok(true) => "PASS".to_string(),
            Ok(false) => "FAIL".to_string(),
            Err(e) => format!("FAIL ({e})"),
        };
        ok &= verdict == "PASS";
        println!("selftest {name}: {verdict}");
    }
    ok
}
