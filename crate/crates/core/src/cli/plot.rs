use std::fmt::Write;

use super::report::ReportRow;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

struct Scale {
    lo: f64,
    hi: f64,
    from: f64,
    to: f64,
}

impl Scale {
    fn new(lo: f64, hi: f64, from: f64, to: f64) -> Self {
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
        let pad = 0.03 * (hi - lo);
        Self {
            lo: lo - pad,
            hi: hi + pad,
            from,
            to,
        }
    }

    fn map(&self, v: f64) -> f64 {
        self.from + (v - self.lo) / (self.hi - self.lo) * (self.to - self.from)
    }

    fn ticks(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=4).map(move |i| self.lo + (self.hi - self.lo) * i as f64 / 4.0)
    }
}

/// Static SVG of the data cloud with frontier estimates and interval bands.
///
/// Uses the first input coordinate for the horizontal axis. Skipped report
/// rows are left out.
pub fn render_svg(data: &[(f64, f64)], rows: &[ReportRow], title: &str) -> String {
    let mut ok: Vec<(f64, f64, f64, f64)> = rows
        .iter()
        .filter(|r| r.is_ok())
        .filter_map(|r| Some((r.x_first()?, r.point?, r.lower?, r.upper?)))
        .collect();
    ok.sort_by(|a, b| a.0.total_cmp(&b.0));

    let xs = data.iter().map(|d| d.0).chain(ok.iter().map(|r| r.0));
    let ys = data
        .iter()
        .map(|d| d.1)
        .chain(ok.iter().flat_map(|r| [r.1, r.2, r.3]));
    let (x_lo, x_hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let (y_lo, y_hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let (x_lo, x_hi) = if x_lo.is_finite() { (x_lo, x_hi) } else { (0.0, 1.0) };
    let (y_lo, y_hi) = if y_lo.is_finite() { (y_lo, y_hi) } else { (0.0, 1.0) };
    let sx = Scale::new(x_lo, x_hi, MARGIN, WIDTH - MARGIN / 2.0);
    let sy = Scale::new(y_lo, y_hi, HEIGHT - MARGIN, MARGIN / 2.0);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    // Axes and ticks.
    let (x0, y0) = (MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        svg,
        r#"<path d="M{x0} {} V{y0} H{}" stroke="black" fill="none"/>"#,
        MARGIN / 2.0,
        WIDTH - MARGIN / 2.0
    );
    for t in sx.ticks() {
        let px = sx.map(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" text-anchor="middle">{t:.3}</text>"#,
            y0 + 4.0,
            y0 + 16.0
        );
    }
    for t in sy.ticks() {
        let py = sy.map(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{t:.3}</text>"#,
            x0 - 4.0,
            x0 - 6.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">input</text><text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">output</text>"#,
        WIDTH / 2.0,
        HEIGHT - 20.0,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    let _ = writeln!(svg, r##"<g fill="#4a6fa5" fill-opacity="0.35">"##);
    for &(x, y) in data {
        let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="1.6"/>"#, sx.map(x), sy.map(y));
    }
    let _ = writeln!(svg, "</g>");

    if !ok.is_empty() {
        let upper: Vec<String> = ok.iter().map(|r| format!("{:.2},{:.2}", sx.map(r.0), sy.map(r.3))).collect();
        let lower: Vec<String> = ok
            .iter()
            .rev()
            .map(|r| format!("{:.2},{:.2}", sx.map(r.0), sy.map(r.2)))
            .collect();
        let _ = writeln!(
            svg,
            r##"<polygon points="{} {}" fill="#d95f02" fill-opacity="0.25" stroke="#d95f02" stroke-width="0.8"/>"##,
            upper.join(" "),
            lower.join(" ")
        );
        let line: Vec<String> = ok.iter().map(|r| format!("{:.2},{:.2}", sx.map(r.0), sy.map(r.1))).collect();
        let _ = writeln!(
            svg,
            r##"<polyline points="{}" fill="none" stroke="#b2182b" stroke-width="1.8"/>"##,
            line.join(" ")
        );
        for r in &ok {
            let _ = writeln!(
                svg,
                r##"<circle cx="{:.2}" cy="{:.2}" r="2.8" fill="#b2182b"/>"##,
                sx.map(r.0),
                sy.map(r.1)
            );
        }
    }
    let _ = writeln!(svg, "</svg>");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Method;

    #[test]
    fn svg_contains_layers() {
        let rows = vec![ReportRow {
            x: "1".into(),
            n_eff: 10,
            p_hat: 0.5,
            xi_hat: Some(-0.5),
            point: Some(1.0),
            lower: Some(0.9),
            upper: Some(1.2),
            level: 0.95,
            method: Method::Sub,
            status: "OK".into(),
        }];
        let svg = render_svg(&[(0.5, 0.3), (1.0, 0.8)], &rows, "a <b>");
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("<polygon") && svg.contains("<polyline"));
        assert_eq!(svg.matches("r=\"1.6\"").count(), 2);
        assert!(svg.contains("a &lt;b&gt;"));
    }
}
