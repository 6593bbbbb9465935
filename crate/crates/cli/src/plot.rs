use std::fmt::Write as _;

use bevtraj::graph::SceneGraph;
use bevtraj::scenegen::{meters_to_pixels, CameraConfig, GroundPoint, ObjectClass, SceneFrame};

pub const START_COLOR: &str = "blue";
pub const TRUTH_COLOR: &str = "blue";
pub const PREDICTION_COLOR: &str = "red";

pub struct PlotInput<'a> {
    pub camera: CameraConfig,
    pub frame: &'a SceneFrame,
    pub graph: &'a SceneGraph,
    /// Ego position at the last observed frame.
    pub start: GroundPoint,
    pub truth: Vec<GroundPoint>,
    pub predicted: Vec<GroundPoint>,
}

fn class_color(c: ObjectClass) -> &'static str {
    match c {
        ObjectClass::Ego => "#2e7d32",
        ObjectClass::Vehicle => "#546e7a",
        ObjectClass::Pedestrian => "#ef6c00",
        ObjectClass::TrafficLight => "#8e24aa",
        ObjectClass::StaticObstacle => "#6d4c41",
    }
}

fn polyline(cam: &CameraConfig, start: GroundPoint, pts: &[GroundPoint]) -> String {
    std::iter::once(start)
        .chain(pts.iter().copied())
        .map(|p| {
            let q = meters_to_pixels(p, cam);
            format!("{:.3},{:.3}", q.x, q.y)
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Footprint, objects, graph edges, true future (blue) and prediction (red).
pub fn render_svg(p: &PlotInput) -> String {
    let (w, h) = (p.camera.image_width, p.camera.image_height);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(
        s,
        r##"<rect id="footprint" x="0" y="0" width="{w}" height="{h}" fill="#f5f5f5" stroke="#222"/>"##
    );
    let _ = writeln!(s, r##"<g id="edges" stroke="#9e9e9e" stroke-width="1">"##);
    for e in &p.graph.edges {
        let (a, b) = (p.graph.centers[e.i], p.graph.centers[e.j]);
        let _ = writeln!(
            s,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
            a.x, a.y, b.x, b.y
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g id="objects">"#);
    for o in &p.frame.objects {
        let _ = writeln!(
            s,
            r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}" fill-opacity="0.6"><title>{} {}</title></rect>"#,
            o.center.x - o.extent.w / 2.0,
            o.center.y - o.extent.h / 2.0,
            o.extent.w,
            o.extent.h,
            class_color(o.class_id),
            o.class_id.name(),
            o.object_id
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<polyline id="truth" points="{}" fill="none" stroke="{TRUTH_COLOR}" stroke-width="3"/>"#,
        polyline(&p.camera, p.start, &p.truth)
    );
    let _ = writeln!(
        s,
        r#"<polyline id="prediction" points="{}" fill="none" stroke="{PREDICTION_COLOR}" stroke-width="2"/>"#,
        polyline(&p.camera, p.start, &p.predicted)
    );
    let c = meters_to_pixels(p.start, &p.camera);
    let _ = writeln!(
        s,
        r#"<circle id="start" cx="{:.3}" cy="{:.3}" r="6" fill="{START_COLOR}"/>"#,
        c.x, c.y
    );
    s.push_str("</svg>\n");
    s
}

/// Header plus `H + 1` rows: the start position, then each predicted step.
pub fn render_csv(p: &PlotInput) -> String {
    let mut s = String::from("step,pred_x_m,pred_y_m,truth_x_m,truth_y_m\n");
    let _ = writeln!(
        s,
        "0,{:.6},{:.6},{:.6},{:.6}",
        p.start.x, p.start.y, p.start.x, p.start.y
    );
    for (j, (q, t)) in p.predicted.iter().zip(&p.truth).enumerate() {
        let _ = writeln!(s, "{},{:.6},{:.6},{:.6},{:.6}", j + 1, q.x, q.y, t.x, t.y);
    }
    s
}
