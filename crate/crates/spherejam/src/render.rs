//! Byte-deterministic renderers: SVG for planar packings, Graphviz DOT for
//! contact graphs in any dimension.

use crate::container::{Configuration, Container};
use crate::error::{Error, Result};
use crate::verify::ContactGraph;

const SVG_SCALE: f64 = 400.0;
const SVG_MARGIN: f64 = 20.0;

fn fmt(v: f64) -> String {
    // Avoid "-0.000000" so output does not depend on signed zeros.
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.6}")
}

/// Vertices of a bounded planar polytope, counterclockwise. Obtained by
/// intersecting wall lines pairwise and keeping feasible points.
pub fn polygon_vertices(container: &Container) -> Result<Vec<[f64; 2]>> {
    if container.d() != 2 {
        return Err(Error::InvalidArgument("polygon outline needs d = 2".into()));
    }
    let walls = container.walls();
    let mut verts: Vec<[f64; 2]> = Vec::new();
    for i in 0..walls.len() {
        for j in i + 1..walls.len() {
            let (a, b) = (&walls[i], &walls[j]);
            let det = a.normal[0] * b.normal[1] - a.normal[1] * b.normal[0];
            if det.abs() < 1e-12 {
                continue;
            }
            let x = (a.offset * b.normal[1] - b.offset * a.normal[1]) / det;
            let y = (a.normal[0] * b.offset - b.normal[0] * a.offset) / det;
            let p = [x, y];
            if walls.iter().all(|w| w.distance(&p) >= -1e-9)
                && !verts
                    .iter()
                    .any(|q| (q[0] - x).hypot(q[1] - y) < 1e-9)
            {
                verts.push(p);
            }
        }
    }
    if verts.len() < 3 {
        return Err(Error::InvalidContainer("polytope has fewer than 3 vertices".into()));
    }
    let cx = verts.iter().map(|p| p[0]).sum::<f64>() / verts.len() as f64;
    let cy = verts.iter().map(|p| p[1]).sum::<f64>() / verts.len() as f64;
    verts.sort_by(|p, q| {
        let ap = (p[1] - cy).atan2(p[0] - cx);
        let aq = (q[1] - cy).atan2(q[0] - cx);
        ap.partial_cmp(&aq).unwrap()
    });
    Ok(verts)
}

/// SVG drawing of a planar packing: container outline, one circle per disk,
/// one segment per pair contact and a tick from each wall-touching center
/// toward its wall.
pub fn render_svg(
    container: &Container,
    x: &Configuration,
    r: f64,
    graph: &ContactGraph,
) -> Result<String> {
    if x.d() != 2 {
        return Err(Error::InvalidArgument("SVG rendering needs d = 2".into()));
    }
    let verts = polygon_vertices(container)?;
    let (lo, hi) = container.bounding_box();
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let scale = SVG_SCALE / span;
    // SVG y grows downward; flip about the box top.
    let tx = |p: &[f64]| (p[0] - lo[0]) * scale + SVG_MARGIN;
    let ty = |p: &[f64]| (hi[1] - p[1]) * scale + SVG_MARGIN;
    let w = (hi[0] - lo[0]) * scale + 2.0 * SVG_MARGIN;
    let h = (hi[1] - lo[1]) * scale + 2.0 * SVG_MARGIN;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        fmt(w),
        fmt(h),
        fmt(w),
        fmt(h)
    ));
    let points: Vec<String> = verts
        .iter()
        .map(|p| format!("{},{}", fmt(tx(p)), fmt(ty(p))))
        .collect();
    out.push_str(&format!(
        "  <polygon points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n",
        points.join(" ")
    ));
    for &(i, j) in &graph.pair_edges {
        let (p, q) = (x.point(i), x.point(j));
        out.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#c03030\" stroke-width=\"1\"/>\n",
            fmt(tx(p)),
            fmt(ty(p)),
            fmt(tx(q)),
            fmt(ty(q))
        ));
    }
    for &(i, widx) in &graph.wall_incidences {
        let wall = &container.walls()[widx];
        let p = x.point(i);
        let dist = wall.distance(p);
        // Foot of the perpendicular from the center onto the wall line.
        let foot = [p[0] - dist * wall.normal[0], p[1] - dist * wall.normal[1]];
        out.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#3050c0\" stroke-width=\"1\" stroke-dasharray=\"3,2\"/>\n",
            fmt(tx(p)),
            fmt(ty(p)),
            fmt(tx(&foot)),
            fmt(ty(&foot))
        ));
    }
    for i in 0..x.n() {
        let p = x.point(i);
        out.push_str(&format!(
            "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#d0d8f0\" fill-opacity=\"0.7\" stroke=\"#202020\" stroke-width=\"1\"/>\n",
            fmt(tx(p)),
            fmt(ty(p)),
            fmt(r * scale)
        ));
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" dominant-baseline=\"middle\">{}</text>\n",
            fmt(tx(p)),
            fmt(ty(p)),
            i + 1
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// DOT contact graph: one node per sphere, one edge per pair contact and a
/// labeled leaf node per wall incidence.
pub fn render_dot(n: usize, graph: &ContactGraph) -> String {
    let mut out = String::from("graph contacts {\n  node [shape=circle];\n");
    for i in 0..n {
        out.push_str(&format!("  s{};\n", i + 1));
    }
    for &(i, j) in &graph.pair_edges {
        out.push_str(&format!("  s{} -- s{};\n", i + 1, j + 1));
    }
    for &(i, w) in &graph.wall_incidences {
        out.push_str(&format!(
            "  w{}_{} [shape=box, label=\"wall {}\"];\n  s{} -- w{}_{};\n",
            i + 1,
            w + 1,
            w + 1,
            i + 1,
            i + 1,
            w + 1
        ));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::container::ConstraintSet;
    use crate::verify;

    #[test]
    fn square_vertices() {
        let c = Container::cube(2).unwrap();
        let v = polygon_vertices(&c).unwrap();
        assert_eq!(v.len(), 4);
        for p in &v {
            assert!((p[0] == 0.0 || p[0] == 1.0) && (p[1] == 0.0 || p[1] == 1.0));
        }
    }

    #[test]
    fn triangle_vertices() {
        let c = Container::triangle2();
        let v = polygon_vertices(&c).unwrap();
        assert_eq!(v.len(), 3);
    }

    #[test]
    fn svg_is_deterministic_and_well_formed() {
        let cs = ConstraintSet::cube(2, 2).unwrap();
        let x = Configuration::new(2, 2, vec![0.25, 0.25, 0.75, 0.75]).unwrap();
        let r = 0.25;
        let g = verify::contact_graph(&cs, &x, r, 1e-3);
        let a = render_svg(cs.container(), &x, r, &g).unwrap();
        let b = render_svg(cs.container(), &x, r, &g).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.ends_with("</svg>\n"));
        assert_eq!(a.matches("<circle").count(), 2);
        assert!(a.contains("<polygon"));
    }

    #[test]
    fn dot_lists_all_contacts() {
        let g = ContactGraph {
            pair_edges: vec![(0, 1)],
            wall_incidences: vec![(0, 2), (1, 3)],
            tolerance: 1e-5,
        };
        let dot = render_dot(2, &g);
        assert!(dot.contains("s1 -- s2;"));
        assert!(dot.contains("s1 -- w1_3;"));
        assert!(dot.contains("label=\"wall 4\""));
        assert!(dot.starts_with("graph contacts {"));
    }
}
