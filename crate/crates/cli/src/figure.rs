//! SVG rendering of the coordinate-grid figure.

use maskit::pleatmap::GridFigure;
use maskit::svg::SvgCanvas;

/// Render rays, level curves and the boundary polyline into a deterministic
/// SVG document.
pub fn grid_to_svg(figure: &GridFigure, px_width: f64) -> String {
    let mut canvas = SvgCanvas::new(figure.viewport, px_width);
    canvas.comment(&format!(
        "coordinate grid: {} rays, {} level curves, {} boundary cusps",
        figure.rays.len(),
        figure.level_curves.len(),
        figure.boundary.len()
    ));
    if !figure.ray_failures.is_empty() {
        canvas.comment(&format!("warning: {} rays failed", figure.ray_failures.len()));
    }
    canvas.axes();

    for ray in &figure.rays {
        let mut pts: Vec<(f64, f64)> = ray
            .samples
            .iter()
            .map(|s| (s.mu.re, s.mu.im))
            .collect();
        pts.push((ray.endpoint.mu.re, ray.endpoint.mu.im));
        canvas.polyline(&pts, "#2b6cb0", 0.9);
    }

    for curve in &figure.level_curves {
        let pts: Vec<(f64, f64)> = curve.points.iter().map(|(_, mu)| (mu.re, mu.im)).collect();
        canvas.polyline(&pts, "#b03030", 0.9);
    }

    let boundary_pts: Vec<(f64, f64)> = figure
        .boundary
        .iter()
        .map(|c| (c.mu.re, c.mu.im))
        .collect();
    canvas.polyline(&boundary_pts, "#111111", 1.2);
    for c in &figure.boundary {
        canvas.dot(c.mu.re, c.mu.im, 1.6, "#111111");
    }

    canvas.finish()
}
