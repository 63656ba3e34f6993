//! SVG (planar) and Wavefront OBJ (spatial) output for a [`Complex`].
//! Coordinates are printed with a fixed number of decimals so output is
//! byte-stable across runs.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scalar::Scalar;
use crate::subdivision::Complex;

pub const VIEWBOX: f64 = 1024.0;
const MARGIN: f64 = 32.0;

#[derive(Clone, Debug)]
pub struct SvgStyle {
    /// Print the exponent `q` of every linearity region at its witness.
    pub labels: bool,
    pub point_radius: f64,
    pub stroke_width: f64,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            labels: false,
            point_radius: 5.0,
            stroke_width: 2.0,
        }
    }
}

fn fmt_num(x: f64) -> String {
    let s = format!("{x:.3}");
    // Avoid "-0.000".
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0".into()
    } else {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn to_f64(p: &[Scalar]) -> Vec<f64> {
    p.iter().map(Scalar::to_f64).collect()
}

struct Frame {
    lo: [f64; 2],
    scale: f64,
    off: [f64; 2],
}

impl Frame {
    fn new(outline: &[Point]) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in outline {
            for k in 0..2 {
                let x = p[k].to_f64();
                lo[k] = lo[k].min(x);
                hi[k] = hi[k].max(x);
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
        let scale = (VIEWBOX - 2.0 * MARGIN) / span;
        let off = [
            (VIEWBOX - (hi[0] - lo[0]) * scale) / 2.0,
            (VIEWBOX - (hi[1] - lo[1]) * scale) / 2.0,
        ];
        Frame { lo, scale, off }
    }

    /// Screen coordinates, y pointing up.
    fn map(&self, p: &[f64]) -> (String, String) {
        let x = self.off[0] + (p[0] - self.lo[0]) * self.scale;
        let y = VIEWBOX - (self.off[1] + (p[1] - self.lo[1]) * self.scale);
        (fmt_num(x), fmt_num(y))
    }
}

/// Planar picture: dashed domain boundary, solid corner locus, points as
/// dots.
pub fn render_svg(complex: &Complex, points: &[Point], style: &SvgStyle) -> Result<String> {
    if complex.dim != 2 {
        return Err(Error::Unsupported(format!(
            "SVG output needs a planar complex, got dimension {}",
            complex.dim
        )));
    }
    let outline = &complex.domain_faces[0];
    let frame = Frame::new(outline);
    let sw = fmt_num(style.stroke_width);
    let mut s = String::new();
    let v = fmt_num(VIEWBOX);
    writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {v} {v}\" width=\"{v}\" height=\"{v}\">"
    )
    .unwrap();
    writeln!(s, "<rect width=\"{v}\" height=\"{v}\" fill=\"white\"/>").unwrap();

    let poly: Vec<String> = outline
        .iter()
        .map(|p| {
            let (x, y) = frame.map(&to_f64(p));
            format!("{x},{y}")
        })
        .collect();
    writeln!(
        s,
        "<polygon points=\"{}\" fill=\"none\" stroke=\"#555\" stroke-width=\"{sw}\" stroke-dasharray=\"8 6\"/>",
        poly.join(" ")
    )
    .unwrap();

    writeln!(s, "<g stroke=\"black\" stroke-width=\"{sw}\" fill=\"none\">").unwrap();
    for piece in &complex.pieces {
        if piece.vertices.len() < 2 {
            continue;
        }
        let (x1, y1) = frame.map(&to_f64(&piece.vertices[0]));
        let (x2, y2) = frame.map(&to_f64(&piece.vertices[1]));
        writeln!(s, "<line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\"/>").unwrap();
    }
    writeln!(s, "</g>").unwrap();

    if !points.is_empty() {
        let r = fmt_num(style.point_radius);
        writeln!(s, "<g fill=\"#c0392b\">").unwrap();
        for p in points {
            let (x, y) = frame.map(&to_f64(p));
            writeln!(s, "<circle cx=\"{x}\" cy=\"{y}\" r=\"{r}\"/>").unwrap();
        }
        writeln!(s, "</g>").unwrap();
    }

    if style.labels {
        writeln!(
            s,
            "<g font-family=\"monospace\" font-size=\"14\" fill=\"#1f4e79\" text-anchor=\"middle\">"
        )
        .unwrap();
        for (q, w) in &complex.regions {
            let (x, y) = frame.map(&to_f64(w));
            writeln!(s, "<text x=\"{x}\" y=\"{y}\">{q}</text>").unwrap();
        }
        writeln!(s, "</g>").unwrap();
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Corner-locus polygons (3-D) or segments (2-D) as an OBJ mesh; the
/// domain boundary goes in its own group.
pub fn render_obj(complex: &Complex) -> String {
    let mut s = String::new();
    let mut next = 1usize;
    let mut emit = |s: &mut String, poly: &[Point]| -> Vec<usize> {
        let mut ids = Vec::with_capacity(poly.len());
        for p in poly {
            let c: Vec<String> = (0..3)
                .map(|k| p.get(k).map_or("0".into(), |x| fmt_num(x.to_f64())))
                .collect();
            writeln!(s, "v {}", c.join(" ")).unwrap();
            ids.push(next);
            next += 1;
        }
        ids
    };
    let join = |ids: &[usize]| ids.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");

    writeln!(s, "g domain").unwrap();
    for face in &complex.domain_faces {
        let ids = emit(&mut s, face);
        let kw = if complex.dim == 2 { "l" } else { "f" };
        if complex.dim == 2 {
            let mut closed = ids.clone();
            closed.push(ids[0]);
            writeln!(s, "{kw} {}", join(&closed)).unwrap();
        } else {
            writeln!(s, "{kw} {}", join(&ids)).unwrap();
        }
    }
    writeln!(s, "g corner_locus").unwrap();
    for piece in &complex.pieces {
        let ids = emit(&mut s, &piece.vertices);
        let kw = if piece.vertices.len() <= 2 { "l" } else { "f" };
        writeln!(s, "{kw} {}", join(&ids)).unwrap();
    }
    s
}
