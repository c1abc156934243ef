//! Grouped bar chart: black bars for the maximum-likelihood estimate, grey
//! for linear inversion and hollow outlines for the true values.

use std::fmt::Write as _;

const WIDTH: f64 = 1000.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 110.0;

pub struct Series<'a> {
    pub maxlik: &'a [f64],
    pub linear: &'a [f64],
    pub truth: &'a [f64],
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders the chart. Coordinates are printed with two decimals so that the
/// output depends only on the data.
pub fn bar_chart(title: &str, labels: &[&str], series: &Series) -> String {
    let all = series
        .maxlik
        .iter()
        .chain(series.linear)
        .chain(series.truth);
    let (lo, hi) = all.fold((0.0f64, 1.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let lo = (lo * 5.0).floor() / 5.0;
    let hi = (hi * 5.0).ceil() / 5.0;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let plot_w = WIDTH - LEFT - RIGHT;
    let y = |v: f64| TOP + (hi - v) / (hi - lo) * plot_h;
    let zero = y(0.0);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    let steps = ((hi - lo) * 5.0).round() as i64;
    for s in 0..=steps {
        let v = lo + s as f64 * 0.2;
        let yy = y(v);
        let _ = writeln!(
            out,
            r##"<line x1="{LEFT:.2}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="#dddddd"/>"##,
            WIDTH - RIGHT
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{:.1}</text>"#,
            LEFT - 6.0,
            yy + 4.0,
            v + 0.0
        );
    }

    let group = plot_w / labels.len() as f64;
    let bar = group * 0.22;
    for (i, label) in labels.iter().enumerate() {
        let x0 = LEFT + i as f64 * group + group * 0.17;
        let bars = [
            (series.maxlik[i], r##"fill="black""##),
            (series.linear[i], r##"fill="#999999""##),
            (
                series.truth[i],
                r##"fill="none" stroke="black" stroke-width="1.5""##,
            ),
        ];
        for (k, (v, style)) in bars.iter().enumerate() {
            let top = y(v.max(0.0));
            let h = (y(v.min(0.0)) - top).abs();
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{top:.2}" width="{bar:.2}" height="{h:.2}" {style}/>"#,
                x0 + k as f64 * bar
            );
        }
        let cx = LEFT + (i as f64 + 0.5) * group;
        let ly = HEIGHT - BOTTOM + 16.0;
        let _ = writeln!(
            out,
            r#"<text x="{cx:.2}" y="{ly:.2}" text-anchor="end" transform="rotate(-40 {cx:.2} {ly:.2})">{}</text>"#,
            escape(label)
        );
    }
    let _ = writeln!(
        out,
        r#"<line x1="{LEFT:.2}" y1="{zero:.2}" x2="{:.2}" y2="{zero:.2}" stroke="black"/>"#,
        WIDTH - RIGHT
    );
    let _ = writeln!(
        out,
        r#"<line x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{:.2}" stroke="black"/>"#,
        HEIGHT - BOTTOM
    );

    let legend = [
        ("Max-Lik", r##"fill="black""##),
        ("linear inversion", r##"fill="#999999""##),
        (
            "exact",
            r##"fill="none" stroke="black" stroke-width="1.5""##,
        ),
    ];
    for (k, (name, style)) in legend.iter().enumerate() {
        let lx = WIDTH - RIGHT - 150.0;
        let ly = TOP + 8.0 + k as f64 * 18.0;
        let _ = writeln!(
            out,
            r#"<rect x="{lx:.2}" y="{ly:.2}" width="12" height="12" {style}/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{name}</text>"#,
            lx + 18.0,
            ly + 10.0
        );
    }
    out.push_str("</svg>\n");
    out
}
