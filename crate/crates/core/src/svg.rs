//! Minimal deterministic SVG writer.
//!
//! Hand-rolled so that identical inputs give byte-identical documents: fixed
//! header, fixed attribute order, fixed `{:.3}` pixel formatting.

/// Axis-aligned rectangle in mu-plane coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Rect {
        Rect { x0, x1, y0, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }
}

/// Liang-Barsky clip of the segment `p0 -> p1` against `rect`.
pub fn clip_segment(
    rect: &Rect,
    p0: (f64, f64),
    p1: (f64, f64),
) -> Option<((f64, f64), (f64, f64))> {
    let (dx, dy) = (p1.0 - p0.0, p1.1 - p0.1);
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    let checks = [
        (-dx, p0.0 - rect.x0),
        (dx, rect.x1 - p0.0),
        (-dy, p0.1 - rect.y0),
        (dy, rect.y1 - p0.1),
    ];
    for (p, q) in checks {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                if r > t1 {
                    return None;
                }
                t0 = t0.max(r);
            } else {
                if r < t0 {
                    return None;
                }
                t1 = t1.min(r);
            }
        }
    }
    if t0 > t1 {
        return None;
    }
    Some((
        (p0.0 + t0 * dx, p0.1 + t0 * dy),
        (p0.0 + t1 * dx, p0.1 + t1 * dy),
    ))
}

/// A drawing surface mapping a mu-plane rectangle to pixels (y flipped).
pub struct SvgCanvas {
    rect: Rect,
    px_w: f64,
    px_h: f64,
    margin: f64,
    body: String,
}

impl SvgCanvas {
    pub fn new(rect: Rect, px_width: f64) -> SvgCanvas {
        let margin = 40.0;
        let aspect = rect.height() / rect.width();
        let inner_w = px_width - 2.0 * margin;
        let px_h = inner_w * aspect + 2.0 * margin;
        SvgCanvas {
            rect,
            px_w: px_width,
            px_h,
            margin,
            body: String::new(),
        }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let sx = (self.px_w - 2.0 * self.margin) / self.rect.width();
        let sy = (self.px_h - 2.0 * self.margin) / self.rect.height();
        (
            self.margin + (x - self.rect.x0) * sx,
            self.px_h - self.margin - (y - self.rect.y0) * sy,
        )
    }

    pub fn comment(&mut self, text: &str) {
        self.body.push_str(&format!("<!-- {text} -->\n"));
    }

    /// Polyline clipped to the canvas rectangle; split into runs where it
    /// leaves the viewport.
    pub fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, width: f64) {
        let mut runs: Vec<Vec<(f64, f64)>> = Vec::new();
        for seg in pts.windows(2) {
            if let Some((a, b)) = clip_segment(&self.rect, seg[0], seg[1]) {
                let extend = runs.last().and_then(|r| r.last()).is_some_and(|&last| {
                    let (px, py) = self.map(a.0, a.1);
                    (last.0 - px).abs() < 1e-9 && (last.1 - py).abs() < 1e-9
                });
                let (bx, by) = self.map(b.0, b.1);
                if extend {
                    runs.last_mut().unwrap().push((bx, by));
                } else {
                    let (ax, ay) = self.map(a.0, a.1);
                    runs.push(vec![(ax, ay), (bx, by)]);
                }
            }
        }
        for run in runs {
            let coords: Vec<String> = run
                .iter()
                .map(|&(x, y)| format!("{x:.3},{y:.3}"))
                .collect();
            self.body.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{width}\" points=\"{}\"/>\n",
                coords.join(" ")
            ));
        }
    }

    pub fn dot(&mut self, x: f64, y: f64, r: f64, fill: &str) {
        if !self.rect.contains(x, y) {
            return;
        }
        let (px, py) = self.map(x, y);
        self.body.push_str(&format!(
            "<circle cx=\"{px:.3}\" cy=\"{py:.3}\" r=\"{r}\" fill=\"{fill}\"/>\n"
        ));
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, content: &str) {
        let (px, py) = self.map(x, y);
        self.body.push_str(&format!(
            "<text x=\"{px:.3}\" y=\"{py:.3}\" font-size=\"{size}\" font-family=\"monospace\" text-anchor=\"{anchor}\">{content}</text>\n"
        ));
    }

    /// Frame plus integer tick labels in mu-plane coordinates.
    pub fn axes(&mut self) {
        let r = self.rect;
        let frame = [
            (r.x0, r.y0),
            (r.x1, r.y0),
            (r.x1, r.y1),
            (r.x0, r.y1),
            (r.x0, r.y0),
        ];
        let coords: Vec<String> = frame
            .iter()
            .map(|&(x, y)| {
                let (px, py) = self.map(x, y);
                format!("{px:.3},{py:.3}")
            })
            .collect();
        self.body.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"#444444\" stroke-width=\"1\" points=\"{}\"/>\n",
            coords.join(" ")
        ));
        let mut x = r.x0.ceil();
        while x <= r.x1 {
            let (px, py) = self.map(x, r.y0);
            self.body.push_str(&format!(
                "<line x1=\"{px:.3}\" y1=\"{py:.3}\" x2=\"{px:.3}\" y2=\"{:.3}\" stroke=\"#444444\" stroke-width=\"1\"/>\n",
                py + 5.0
            ));
            self.body.push_str(&format!(
                "<text x=\"{px:.3}\" y=\"{:.3}\" font-size=\"11\" font-family=\"monospace\" text-anchor=\"middle\">{x}</text>\n",
                py + 18.0
            ));
            x += 1.0;
        }
        let mut y = r.y0.ceil();
        while y <= r.y1 {
            let (px, py) = self.map(r.x0, y);
            self.body.push_str(&format!(
                "<line x1=\"{:.3}\" y1=\"{py:.3}\" x2=\"{px:.3}\" y2=\"{py:.3}\" stroke=\"#444444\" stroke-width=\"1\"/>\n",
                px - 5.0
            ));
            self.body.push_str(&format!(
                "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"11\" font-family=\"monospace\" text-anchor=\"end\">{y}</text>\n",
                px - 8.0,
                py + 4.0
            ));
            y += 1.0;
        }
    }

    pub fn finish(self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.0} {:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.px_w, self.px_h, self.px_w, self.px_h, self.body
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clip_cases() {
        let r = Rect::new(0.0, 1.0, 0.0, 1.0);
        // fully inside
        let s = clip_segment(&r, (0.2, 0.2), (0.8, 0.8)).unwrap();
        assert_eq!(s, ((0.2, 0.2), (0.8, 0.8)));
        // fully outside
        assert!(clip_segment(&r, (2.0, 2.0), (3.0, 3.0)).is_none());
        // crossing the right edge
        let ((ax, _), (bx, _)) = clip_segment(&r, (0.5, 0.5), (1.5, 0.5)).unwrap();
        assert_eq!(ax, 0.5);
        assert!((bx - 1.0).abs() < 1e-12);
    }

    #[test]
    fn canvas_is_deterministic() {
        let make = || {
            let mut c = SvgCanvas::new(Rect::new(0.0, 2.0, 0.0, 4.0), 600.0);
            c.axes();
            c.polyline(&[(0.0, 2.0), (0.0, 5.0)], "#000000", 1.0);
            c.dot(1.0, 1.7320508, 2.0, "#cc0000");
            c.text(1.0, 3.5, 12.0, "middle", "label");
            c.finish()
        };
        assert_eq!(make(), make());
        assert!(make().starts_with("<?xml"));
    }

    #[test]
    fn polyline_outside_viewport_is_dropped() {
        let mut c = SvgCanvas::new(Rect::new(0.0, 1.0, 0.0, 1.0), 100.0);
        c.polyline(&[(5.0, 5.0), (6.0, 6.0)], "#000000", 1.0);
        let doc = c.finish();
        assert!(!doc.contains("polyline"));
    }
}
