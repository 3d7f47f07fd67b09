//! Rank-3 semi-invariant pictures.
//!
//! Each domain `D(β)` meets the unit sphere in a geodesic path through the
//! directions of its perpendicular simples, extended through the negated
//! simples wherever projective generators free a coordinate. Paths and the
//! normalized fan markers are stereographically projected from the
//! antipode of `dim Λ`. Floats are used for drawing only; every incidence
//! question is answered by the exact modules.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use num_traits::Signed;

use crate::cluster::Fan;
use crate::error::{Error, Result};
use crate::linalg::IntVector;
use crate::quiver::EulerData;
use crate::report::{Report, Status};
use crate::stability::StabilityDomain;

pub const CANVAS: f64 = 800.0;
pub const MARGIN: f64 = 0.1;
pub const SAMPLES_PER_QUARTER: usize = 128;

/// Shape of `D(β) ∩ S²` in the plane spanned by the perpendicular simples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathKind {
    Arc,
    Semicircle,
    Circle,
}

#[derive(Clone, Debug)]
pub struct DomainCurve {
    pub beta: IntVector,
    pub kind: PathKind,
    /// Exact generator directions visited in order.
    pub directions: Vec<IntVector>,
    /// Projected samples, one polyline per geodesic piece.
    pub pieces: Vec<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug)]
pub struct Marker {
    pub v: IntVector,
    pub label: String,
    pub pos: [f64; 2],
    pub incidence: usize,
}

#[derive(Clone, Debug)]
pub struct Region {
    pub columns: Vec<IntVector>,
    /// `|γ_i|`, the walls of the region.
    pub walls: Vec<IntVector>,
    pub word: String,
}

#[derive(Clone, Debug)]
pub struct Projection {
    pub center: [f64; 3],
    u: [f64; 3],
    w: [f64; 3],
}

#[derive(Clone, Debug, Default)]
pub struct PictureModel {
    pub curves: Vec<DomainCurve>,
    pub markers: Vec<Marker>,
    pub regions: Vec<Region>,
    /// Pairs of region indices sharing `n - 1` columns.
    pub adjacency: Vec<(usize, usize)>,
    pub projection: Option<Projection>,
}

fn to_f(v: &IntVector) -> [f64; 3] {
    [v.0[0] as f64, v.0[1] as f64, v.0[2] as f64]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> [f64; 3] {
    let l = dot(a, a).sqrt();
    [a[0] / l, a[1] / l, a[2] / l]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

impl Projection {
    /// Stereographic projection from `-center` onto the plane through the
    /// origin orthogonal to `center`.
    pub fn new(center: [f64; 3]) -> Self {
        let c = norm(center);
        let seed = if c[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let u = norm(cross(c, seed));
        let w = cross(c, u);
        Projection { center: c, u, w }
    }

    pub fn project(&self, x: [f64; 3]) -> [f64; 2] {
        let x = norm(x);
        let t = 1.0 + dot(x, self.center);
        [dot(x, self.u) / t, dot(x, self.w) / t]
    }
}

/// Geodesic samples from `a` to `b`, including both endpoints.
fn slerp(a: [f64; 3], b: [f64; 3]) -> Vec<[f64; 3]> {
    let (a, b) = (norm(a), norm(b));
    let theta = dot(a, b).clamp(-1.0, 1.0).acos();
    let steps = ((SAMPLES_PER_QUARTER as f64) * theta / FRAC_PI_2).ceil().max(1.0) as usize;
    let s = theta.sin();
    (0..=steps)
        .map(|k| {
            let t = k as f64 / steps as f64;
            if s.abs() < 1e-12 {
                return a;
            }
            let ca = ((1.0 - t) * theta).sin() / s;
            let cb = (t * theta).sin() / s;
            [ca * a[0] + cb * b[0], ca * a[1] + cb * b[1], ca * a[2] + cb * b[2]]
        })
        .collect()
}

/// Path kind and ordered directions from the projective coordinates.
pub fn domain_path(domain: &StabilityDomain) -> (PathKind, Vec<IntVector>) {
    let e1 = domain.perp_simples[0].clone();
    let e2 = domain.perp_simples[1].clone();
    let mut axis1 = false;
    let mut axis2 = false;
    let mut both = false;
    for c in domain.proj_coords() {
        match (c.0[0] > 0, c.0[1] > 0) {
            (true, true) => both = true,
            (true, false) => axis1 = true,
            (false, true) => axis2 = true,
            _ => {}
        }
    }
    if both || (axis1 && axis2) {
        (PathKind::Circle, vec![e1.clone(), e2.clone(), e1.neg(), e2.neg(), e1])
    } else if axis1 {
        (PathKind::Semicircle, vec![e1.clone(), e2, e1.neg()])
    } else if axis2 {
        (PathKind::Semicircle, vec![e2.clone(), e1, e2.neg()])
    } else {
        (PathKind::Arc, vec![e1, e2])
    }
}

fn marker_label(ed: &EulerData, v: &IntVector) -> String {
    if let Some(i) = (0..ed.n()).find(|&i| ed.projective(i).neg() == *v) {
        return format!("P{}[1]", i + 1);
    }
    v.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("")
}

pub fn build_model(ed: &EulerData, fan: &Fan, domains: &BTreeMap<IntVector, StabilityDomain>) -> Result<PictureModel> {
    if ed.n() != 3 {
        return Err(Error::RankUnsupported(ed.n()));
    }
    let mut center = [0.0; 3];
    for i in 0..3 {
        let p = to_f(&ed.projective(i));
        for k in 0..3 {
            center[k] += p[k];
        }
    }
    let proj = Projection::new(center);
    let curves = domains
        .values()
        .map(|d| {
            let (kind, directions) = domain_path(d);
            let pieces = directions
                .windows(2)
                .map(|w| slerp(to_f(&w[0]), to_f(&w[1])).into_iter().map(|x| proj.project(x)).collect())
                .collect();
            DomainCurve { beta: d.beta.clone(), kind, directions, pieces }
        })
        .collect();
    let mut counts: BTreeMap<IntVector, usize> = BTreeMap::new();
    for s in &fan.states {
        for c in s.v.columns() {
            *counts.entry(c).or_default() += 1;
        }
    }
    let markers = counts
        .into_iter()
        .map(|(v, incidence)| Marker { pos: proj.project(to_f(&v)), label: marker_label(ed, &v), v, incidence })
        .collect();
    let regions: Vec<Region> = fan
        .states
        .iter()
        .map(|s| Region {
            columns: s.v.columns(),
            walls: s.gamma().columns().iter().map(|g| g.abs()).collect(),
            word: s.word_string(),
        })
        .collect();
    let mut adjacency = Vec::new();
    for i in 0..regions.len() {
        let a: BTreeSet<&IntVector> = regions[i].columns.iter().collect();
        for j in i + 1..regions.len() {
            let shared = regions[j].columns.iter().filter(|c| a.contains(c)).count();
            if shared == 2 {
                adjacency.push((i, j));
            }
        }
    }
    Ok(PictureModel { curves, markers, regions, adjacency, projection: Some(proj) })
}

/// Exact consistency checks between the model, the fan and the domains.
pub fn check_model(
    ed: &EulerData,
    fan: &Fan,
    domains: &BTreeMap<IntVector, StabilityDomain>,
    model: &PictureModel,
) -> Report {
    let mut report = Report::new();
    let suite = "picture";
    report.check(suite, "region_count", model.regions.len() == fan.len(), format!("{} regions", model.regions.len()));
    let occurrences: usize = fan.states.iter().map(|s| s.n()).sum();
    let incidences: usize = model.markers.iter().map(|m| m.incidence).sum();
    report.check(suite, "marker_incidence", occurrences == incidences, format!("{} markers", model.markers.len()));

    let mut wall_errors = Vec::new();
    for s in &fan.states {
        let cols = s.v.columns();
        for (i, g) in s.gamma().columns().iter().enumerate() {
            let beta = g.abs();
            let Some(d) = domains.get(&beta) else {
                wall_errors.push(format!("{}: no domain for {beta}", s.word_string()));
                continue;
            };
            for (j, c) in cols.iter().enumerate() {
                let inside = d.delta_contains(c).is_some();
                if (j != i) != inside {
                    wall_errors.push(format!("{} col {}: wall {beta} vs {c}", s.word_string(), j + 1));
                }
            }
            if ed.pair(&cols[i], &beta) == 0 {
                wall_errors.push(format!("{} col {}: column on wall {beta}", s.word_string(), i + 1));
            }
        }
    }
    if wall_errors.is_empty() {
        report.push(suite, "walls_are_gamma_columns", Status::Pass, format!("{} regions", fan.len()));
    }
    for e in wall_errors {
        report.push(suite, "walls_are_gamma_columns", Status::Fail, e);
    }

    let mut endpoint_err: f64 = 0.0;
    if let Some(p) = &model.projection {
        for c in &model.curves {
            for (piece, w) in c.pieces.iter().zip(c.directions.windows(2)) {
                let a = p.project(to_f(&w[0]));
                let b = p.project(to_f(&w[1]));
                let (first, last) = (piece[0], piece[piece.len() - 1]);
                for (x, y) in [(a, first), (b, last)] {
                    endpoint_err = endpoint_err.max((x[0] - y[0]).abs()).max((x[1] - y[1]).abs());
                }
            }
        }
    }
    report.check(suite, "curve_endpoints", endpoint_err < 1e-9, format!("max deviation {endpoint_err:.1e}"));

    let inverses: Vec<_> = fan.states.iter().map(|s| s.v.to_rational().inverse()).collect();
    let mut overlap = Vec::new();
    for s in &fan.states {
        let cols = s.v.columns();
        for w in [[1, 1, 1], [2, 1, 1], [1, 2, 1], [1, 1, 2]] {
            let mut alpha = IntVector::zeros(ed.n());
            for (c, k) in cols.iter().zip(w) {
                alpha = alpha.add(&c.scale(k));
            }
            let hits = inverses
                .iter()
                .filter(|inv| inv.as_ref().is_some_and(|m| m.mul_vec(&alpha).iter().all(|x| !x.is_negative())))
                .count();
            if hits != 1 {
                overlap.push(format!("{}: interior point {alpha} in {hits} cones", s.word_string()));
            }
        }
    }
    if overlap.is_empty() {
        report.push(suite, "interiors_disjoint", Status::Pass, format!("{} sample points", 4 * fan.len()));
    }
    for e in overlap {
        report.push(suite, "interiors_disjoint", Status::Fail, e);
    }
    report
}

#[derive(Clone, Debug, Default)]
pub struct RenderOptions {
    pub highlight: Vec<IntVector>,
}

fn fmt_num(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Deterministic SVG 1.1 text.
pub fn render_svg(model: &PictureModel, opts: &RenderOptions) -> String {
    let mut pts: Vec<[f64; 2]> = model.markers.iter().map(|m| m.pos).collect();
    for c in &model.curves {
        for p in &c.pieces {
            pts.extend(p.iter().copied());
        }
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = if pts.is_empty() { 1.0 } else { (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12) };
    let scale = CANVAS * (1.0 - 2.0 * MARGIN) / span;
    let mid = if pts.is_empty() { [0.0, 0.0] } else { [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0] };
    let to_canvas = |p: [f64; 2]| {
        let x = CANVAS / 2.0 + (p[0] - mid[0]) * scale;
        let y = CANVAS / 2.0 - (p[1] - mid[1]) * scale;
        (fmt_num(x), fmt_num(y))
    };

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{c}\" height=\"{c}\" viewBox=\"0 0 {c} {c}\">",
        c = CANVAS as u32
    );
    out.push_str("<style>.domain{fill:none;stroke:#555;stroke-width:1.2}.highlight{fill:none;stroke:#000;stroke-width:3}.marker{fill:#c22}.label{font:11px sans-serif}</style>\n");
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for c in &model.curves {
        let class = if opts.highlight.contains(&c.beta) { "highlight" } else { "domain" };
        let _ = writeln!(out, "<g class=\"{class}\" data-beta=\"{}\">", c.beta);
        for piece in &c.pieces {
            let coords: Vec<String> = piece
                .iter()
                .map(|&p| {
                    let (x, y) = to_canvas(p);
                    format!("{x},{y}")
                })
                .collect();
            let _ = writeln!(out, "<polyline points=\"{}\"/>", coords.join(" "));
        }
        out.push_str("</g>\n");
    }
    for m in &model.markers {
        let (x, y) = to_canvas(m.pos);
        let _ = writeln!(out, "<circle class=\"marker\" cx=\"{x}\" cy=\"{y}\" r=\"4\"/>");
        let _ = writeln!(out, "<text class=\"label\" x=\"{x}\" y=\"{y}\" dx=\"6\" dy=\"-6\">{}</text>", m.label);
    }
    out.push_str("</svg>\n");
    out
}
