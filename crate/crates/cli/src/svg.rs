//! The well-rounded retract for `n = 2` drawn in the upper half-plane.
//!
//! A form `[[a, b], [b, c]]` is the point `z = (b + i√(ac − b²)) / a`, the
//! ratio of a reduced basis under the isometry `v ↦ v₁ + v₂ z`. Under this
//! identification the retract is the tree of `SL_2(Z)`-translates of the arc
//! of the unit circle from `e^{2πi/3}` to `e^{iπ/3}`. The half-edge from the
//! edge midpoint `i` to the vertex `e^{iπ/3}` is a fundamental domain for the
//! action on the tree and is drawn highlighted.
//!
//! Rendering is floating point; nothing downstream depends on it.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt::Write;
use std::str::FromStr;

use num_traits::ToPrimitive;
use wellround::cells::OrbitComplex;
use wellround::lattice::GramForm;
use wellround::{Error, Result};

/// The visible rectangle `[x_min, x_max] × [y_min, y_max]` of the half-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Default for Window {
    fn default() -> Self {
        Window { x_min: -1.5, x_max: 1.5, y_min: 0.0, y_max: 1.5 }
    }
}

impl FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let xs: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad window entry {t:?}: {e}")))
            .collect::<std::result::Result<_, _>>()?;
        match xs[..] {
            [x_min, x_max, y_min, y_max] if xs.iter().all(|x| x.is_finite()) => Ok(Window { x_min, x_max, y_min, y_max }),
            _ => Err("window is x_min,x_max,y_min,y_max with finite entries".into()),
        }
    }
}

impl Window {
    /// No interior: nothing can be drawn.
    pub fn is_empty(&self) -> bool {
        !(self.x_max > self.x_min && self.y_max > self.y_min)
    }

    fn meets(&self, b: &Bbox) -> bool {
        b.x_min <= self.x_max && b.x_max >= self.x_min && b.y_min <= self.y_max && b.y_max >= self.y_min
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Pt {
    x: f64,
    y: f64,
}

/// `(a z + b) / (c z + d)`.
fn mobius(m: [i64; 4], z: Pt) -> Pt {
    let [a, b, c, d] = m.map(|v| v as f64);
    let (nr, ni) = (a * z.x + b, a * z.y);
    let (dr, di) = (c * z.x + d, c * z.y);
    let den = dr * dr + di * di;
    Pt { x: (nr * dr + ni * di) / den, y: (ni * dr - nr * di) / den }
}

fn mul(p: [i64; 4], q: [i64; 4]) -> [i64; 4] {
    [p[0] * q[0] + p[1] * q[2], p[0] * q[1] + p[1] * q[3], p[2] * q[0] + p[3] * q[2], p[2] * q[1] + p[3] * q[3]]
}

/// `±g` as one key.
fn projective(m: [i64; 4]) -> [i64; 4] {
    let first = m.iter().copied().find(|&v| v != 0).unwrap_or(1);
    if first < 0 {
        m.map(|v| -v)
    } else {
        m
    }
}

/// The point of the half-plane of a binary form.
pub fn point_of_form(f: &GramForm) -> Result<(f64, f64)> {
    if f.n() != 2 {
        return Err(Error::NotApplicable("the half-plane picture needs n = 2".into()));
    }
    let m = f.matrix();
    let get = |i: usize, j: usize| m[(i, j)].to_f64().expect("finite entry");
    let (a, b, c) = (get(0, 0), get(0, 1), get(1, 1));
    Ok((b / a, (a * c - b * b).sqrt() / a))
}

/// Moves `z` into `|Re z| <= 1/2, |z| >= 1`, preferring `Re z = +1/2` on the
/// boundary.
fn reduce(mut z: Pt) -> Pt {
    for _ in 0..200 {
        z.x -= z.x.round();
        if z.x * z.x + z.y * z.y < 1.0 - 1e-12 {
            z = mobius([0, -1, 1, 0], z);
        } else {
            break;
        }
    }
    if (z.x + 0.5).abs() < 1e-9 {
        z.x = 0.5;
    }
    z
}

#[derive(Clone, Copy, Debug)]
struct Bbox {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

/// An image of the base arc: endpoints, midpoint and samples.
#[derive(Clone, Debug)]
struct Arc {
    from: Pt,
    mid: Pt,
    to: Pt,
    bbox: Bbox,
}

impl Arc {
    /// Image under `m` of the unit-circle arc between angles `t0` and `t1`.
    fn image(m: [i64; 4], t0: f64, t1: f64) -> Arc {
        let at = |t: f64| mobius(m, Pt { x: t.cos(), y: t.sin() });
        let samples: Vec<Pt> = (0..=16).map(|k| at(t0 + (t1 - t0) * k as f64 / 16.0)).collect();
        let fold = |f: fn(f64, f64) -> f64, g: fn(&Pt) -> f64, init: f64| samples.iter().map(g).fold(init, f);
        Arc {
            from: samples[0],
            mid: samples[8],
            to: samples[16],
            bbox: Bbox {
                x_min: fold(f64::min, |p| p.x, f64::INFINITY),
                x_max: fold(f64::max, |p| p.x, f64::NEG_INFINITY),
                y_min: fold(f64::min, |p| p.y, f64::INFINITY),
                y_max: fold(f64::max, |p| p.y, f64::NEG_INFINITY),
            },
        }
    }

    fn size(&self) -> f64 {
        (self.bbox.x_max - self.bbox.x_min).max(self.bbox.y_max - self.bbox.y_min)
    }

    fn translated(&self, k: f64) -> Arc {
        let sh = |p: Pt| Pt { x: p.x + k, y: p.y };
        Arc {
            from: sh(self.from),
            mid: sh(self.mid),
            to: sh(self.to),
            bbox: Bbox { x_min: self.bbox.x_min + k, x_max: self.bbox.x_max + k, ..self.bbox },
        }
    }

    /// Unordered endpoints rounded, for deduplication.
    fn key(&self) -> (i64, i64, i64, i64) {
        let r = |v: f64| (v * 1e7).round() as i64;
        let (a, b) = ((r(self.from.x), r(self.from.y)), (r(self.to.x), r(self.to.y)));
        let (p, q) = if a <= b { (a, b) } else { (b, a) };
        (p.0, p.1, q.0, q.1)
    }
}

const EDGE_FROM: f64 = std::f64::consts::FRAC_PI_3 * 2.0;
const EDGE_TO: f64 = std::f64::consts::FRAC_PI_3;

/// Edges of the tree meeting the window, down to a size of about one pixel.
fn tree_edges(window: &Window, pixel: f64) -> Vec<Arc> {
    // The tree is invariant under z ↦ z + 1: collect the edges in a strip
    // around [0, 1] and translate.
    let strip = Window { x_min: -1.0, x_max: 2.0, y_min: 0.0, y_max: 2.0 };
    let gens = [[1, 1, 0, 1], [1, -1, 0, 1], [0, -1, 1, 0]];
    let mut seen: HashSet<[i64; 4]> = HashSet::new();
    let mut edges: BTreeMap<(i64, i64, i64, i64), Arc> = BTreeMap::new();
    let mut queue = VecDeque::from([[1, 0, 0, 1]]);
    seen.insert([1, 0, 0, 1]);
    while let Some(g) = queue.pop_front() {
        let arc = Arc::image(g, EDGE_FROM, EDGE_TO);
        if arc.size() < pixel || !strip.meets(&arc.bbox) || seen.len() > 400_000 {
            continue;
        }
        edges.entry(arc.key()).or_insert(arc);
        for h in gens {
            let next = projective(mul(g, h));
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    let mut out: BTreeMap<(i64, i64, i64, i64), Arc> = BTreeMap::new();
    let (lo, hi) = (window.x_min.floor() as i64 - 2, window.x_max.ceil() as i64 + 2);
    for k in lo..=hi {
        for arc in edges.values() {
            let t = arc.translated(k as f64);
            if window.meets(&t.bbox) {
                out.entry(t.key()).or_insert(t);
            }
        }
    }
    out.into_values().collect()
}

/// SVG path data for a circular arc (or segment) through three points.
fn path_data(p0: (f64, f64), pm: (f64, f64), p1: (f64, f64)) -> String {
    let cross = (p1.0 - p0.0) * (pm.1 - p0.1) - (p1.1 - p0.1) * (pm.0 - p0.0);
    let chord = ((p1.0 - p0.0).powi(2) + (p1.1 - p0.1).powi(2)).sqrt();
    if cross.abs() <= 1e-9 * chord.max(1.0).powi(2) {
        return format!("M{:.3} {:.3} L{:.3} {:.3}", p0.0, p0.1, p1.0, p1.1);
    }
    // Circumcenter.
    let (ax, ay, bx, by, cx, cy) = (p0.0, p0.1, pm.0, pm.1, p1.0, p1.1);
    let d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    let (a2, b2, c2) = (ax * ax + ay * ay, bx * bx + by * by, cx * cx + cy * cy);
    let ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
    let uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
    let r = ((ax - ux).powi(2) + (ay - uy).powi(2)).sqrt();
    let center_side = (p1.0 - p0.0) * (uy - p0.1) - (p1.1 - p0.1) * (ux - p0.0);
    let large = u8::from(center_side * cross > 0.0);
    // In screen coordinates (y down) a negative cross product is clockwise.
    let sweep = u8::from(cross < 0.0);
    format!("M{:.3} {:.3} A{r:.3} {r:.3} 0 {large} {sweep} {:.3} {:.3}", p0.0, p0.1, p1.0, p1.1)
}

/// Renders the tree inside `window`. The complex must be the retract for
/// `n = 2`; its vertex witness locates the highlighted half-edge.
pub fn svg_tree(complex: &OrbitComplex, window: &Window) -> Result<String> {
    if complex.group.n != 2 {
        return Err(Error::NotApplicable("the half-plane picture needs n = 2".into()));
    }
    if window.is_empty() {
        return Ok("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"0\" height=\"0\"></svg>\n".into());
    }
    let vertex = complex
        .cells_of_dim(0)
        .first()
        .map(|c| point_of_form(&c.witness))
        .transpose()?
        .ok_or_else(|| Error::NotApplicable("complex has no vertex".into()))?;
    let v = reduce(Pt { x: vertex.0, y: vertex.1 });
    // Every vertex of the tree is a translate of e^{iπ/3}.
    if (v.x - 0.5).abs() > 1e-9 || (v.y - 0.75f64.sqrt()).abs() > 1e-9 {
        return Err(Error::Invariant(format!("vertex witness reduces to {:.6}+{:.6}i, not e^(iπ/3)", v.x, v.y)));
    }
    let width = 800.0;
    let scale = width / (window.x_max - window.x_min);
    let height = (window.y_max - window.y_min) * scale;
    let screen = |p: Pt| ((p.x - window.x_min) * scale, (window.y_max - p.y) * scale);

    let mut body = String::new();
    let edges = tree_edges(window, 1.0 / scale);
    if !edges.is_empty() {
        body.push_str("<g fill=\"none\" stroke=\"#444\" stroke-width=\"1\">\n");
        for e in &edges {
            let _ = writeln!(body, "<path d=\"{}\"/>", path_data(screen(e.from), screen(e.mid), screen(e.to)));
        }
        body.push_str("</g>\n");
    }
    let fundamental = Arc::image([1, 0, 0, 1], std::f64::consts::FRAC_PI_2, v.y.atan2(v.x));
    if window.meets(&fundamental.bbox) {
        let _ = writeln!(
            body,
            "<path id=\"fundamental-arc\" data-from=\"{:.6},{:.6}\" data-to=\"{:.6},{:.6}\" fill=\"none\" \
             stroke=\"#c0392b\" stroke-width=\"3\" d=\"{}\"/>",
            fundamental.from.x,
            fundamental.from.y,
            fundamental.to.x,
            fundamental.to.y,
            path_data(screen(fundamental.from), screen(fundamental.mid), screen(fundamental.to))
        );
    }
    Ok(format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.3} {height:.3}\">\n{body}</svg>\n"
    ))
}
