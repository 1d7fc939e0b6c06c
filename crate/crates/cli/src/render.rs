//! SVG rendering of peel results and grid fields.
//!
//! Peel layers are drawn as dots every k-th layer, colored blue when the
//! removal was facet-constrained and red when it was round-constrained; the
//! nested rings of dots trace the peel curves. Grid fields render as contour
//! maps via marching squares.

use pareto_peeling::GridField;
use std::fmt::Write as _;

const BLUE: &str = "#1f77b4";
const RED: &str = "#d62728";
const GRAY: &str = "#7f7f7f";

/// One parsed row of `points.csv`.
#[derive(Clone, Debug)]
pub struct PointRow {
    pub x: f64,
    pub y: f64,
    pub layer: u32,
    pub reason: String,
}

pub fn parse_points_csv(csv: &str) -> Result<Vec<PointRow>, String> {
    let mut lines = csv.lines();
    match lines.next() {
        Some("x1,x2,layer,reason") => {}
        other => return Err(format!("unexpected points.csv header: {other:?}")),
    }
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let parse = |s: Option<&str>| -> Result<f64, String> {
            s.ok_or_else(|| format!("line {}: missing field", k + 2))?
                .parse()
                .map_err(|e| format!("line {}: {e}", k + 2))
        };
        let x = parse(parts.next())?;
        let y = parse(parts.next())?;
        let layer = parse(parts.next())? as u32;
        let reason = parts.next().unwrap_or("").to_string();
        rows.push(PointRow {
            x,
            y,
            layer,
            reason,
        });
    }
    Ok(rows)
}

pub fn parse_grid_csv(csv: &str) -> Result<GridField, String> {
    let mut lines = csv.lines();
    match lines.next() {
        Some("x1,x2,value") => {}
        other => return Err(format!("unexpected grid csv header: {other:?}")),
    }
    let mut triples: Vec<(f64, f64, f64)> = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let mut next = || -> Result<f64, String> {
            parts
                .next()
                .ok_or_else(|| "missing field".to_string())?
                .parse()
                .map_err(|e: std::num::ParseFloatError| e.to_string())
        };
        triples.push((next()?, next()?, next()?));
    }
    if triples.is_empty() {
        return Err("empty grid".to_string());
    }
    let mut xs: Vec<f64> = triples.iter().map(|t| t.0).collect();
    let mut ys: Vec<f64> = triples.iter().map(|t| t.1).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ys.dedup();
    let (nx, ny) = (xs.len(), ys.len());
    if nx * ny != triples.len() {
        return Err(format!(
            "grid is not rectangular: {nx}×{ny} vs {} rows",
            triples.len()
        ));
    }
    let rect = pareto_peeling::Rect::new(xs[0], xs[nx - 1], ys[0], ys[ny - 1])
        .map_err(|e| e.to_string())?;
    // Rows were written j-major; trust the ordering.
    let values = triples.iter().map(|t| t.2).collect();
    Ok(GridField {
        rect,
        nx,
        ny,
        values,
    })
}

struct Frame {
    xmin: f64,
    ymax: f64,
    scale: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64, pixels: f64) -> Self {
        let w = (xmax - xmin).max(1e-9);
        let h = (ymax - ymin).max(1e-9);
        let scale = pixels / w.max(h);
        Frame {
            xmin,
            ymax,
            scale,
            width: w * scale,
            height: h * scale,
        }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.xmin) * self.scale, (self.ymax - y) * self.scale)
    }
}

/// Peel scatter: dots for every point whose layer is a multiple of `stride`.
pub fn peel_svg(rows: &[PointRow], stride: u32) -> String {
    let stride = stride.max(1);
    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in rows {
        xmin = xmin.min(r.x);
        xmax = xmax.max(r.x);
        ymin = ymin.min(r.y);
        ymax = ymax.max(r.y);
    }
    let frame = Frame::new(xmin, xmax, ymin, ymax, 720.0);
    let radius = 1.8;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.0} {:.0}">"#,
        frame.width, frame.height, frame.width, frame.height
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for r in rows {
        if r.layer % stride != 0 {
            continue;
        }
        let color = if r.reason.starts_with("facet") {
            BLUE
        } else if r.reason == "hull" {
            RED
        } else {
            GRAY
        };
        let (cx, cy) = frame.map(r.x, r.y);
        let _ = writeln!(
            svg,
            r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{radius}" fill="{color}"/>"#
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Contour map of a grid field at the given levels.
pub fn grid_svg(field: &GridField, levels: &[f64]) -> String {
    let palette = [
        "#00429d", "#2e59a8", "#4771b2", "#5d8abd", "#73a2c6", "#8abccf", "#a5d5d8",
    ];
    let frame = Frame::new(
        field.rect.xmin,
        field.rect.xmax,
        field.rect.ymin,
        field.rect.ymax,
        720.0,
    );
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.0} {:.0}">"#,
        frame.width, frame.height, frame.width, frame.height
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (k, &level) in levels.iter().enumerate() {
        let color = palette[k % palette.len()];
        for (a, b) in field.contour_segments(level) {
            let (x1, y1) = frame.map(a.x, a.y);
            let (x2, y2) = frame.map(b.x, b.y);
            let _ = writeln!(
                svg,
                r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{color}" stroke-width="1.2"/>"#
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}
