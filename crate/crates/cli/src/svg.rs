use std::fmt::Write;

use recur::burst::Peak;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 320.0;
const MARGIN: f64 = 40.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Line chart of a daily series with peak markers.
pub fn series_chart(counts: &[u64], peaks: &[Peak], title: &str) -> String {
    let max = counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let span = counts.len().saturating_sub(1).max(1) as f64;
    let x = |d: usize| MARGIN + d as f64 * (WIDTH - 2.0 * MARGIN) / span;
    let y = |c: u64| HEIGHT - MARGIN - c as f64 / max * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="24" font-family="sans-serif" font-size="14">{}</text>"#,
        escape(title)
    );
    let (x0, x1, yb) = (MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{x0} {MARGIN} L{x0} {yb} L{x1} {yb}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
        x0 - 4.0,
        MARGIN + 4.0,
        max as u64
    );
    let _ = writeln!(
        s,
        r#"<text x="{x1}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">day {}</text>"#,
        yb + 16.0,
        counts.len().saturating_sub(1)
    );
    let points: Vec<String> = counts
        .iter()
        .enumerate()
        .map(|(d, &c)| format!("{:.2},{:.2}", x(d), y(c)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#,
        points.join(" ")
    );
    for p in peaks {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="crimson"/>"#,
            x(p.day),
            y(p.height)
        );
    }
    s.push_str("</svg>\n");
    s
}
