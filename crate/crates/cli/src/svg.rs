//! Self-contained semilog SVG plots of magnitude responses.

use std::fmt::Write as _;

use tonestack_core::ResponseCurve;

/// Displayed frequency range in hertz.
pub const X_RANGE: (f64, f64) = (20.0, 24000.0);
/// Top of the dB axis.
pub const Y_TOP_DB: f64 = 1.0;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 540.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 11] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#000000",
];

const X_TICKS: [f64; 10] = [20.0, 50.0, 100.0, 200.0, 500.0, 1e3, 2e3, 5e3, 10e3, 20e3];

fn tick_label(f: f64) -> String {
    if f >= 1000.0 {
        format!("{}k", f / 1000.0)
    } else {
        format!("{f}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Renders the magnitude (dB) of each labelled curve on a log-frequency axis.
pub fn render(title: &str, curves: &[(String, &ResponseCurve)]) -> String {
    let (fmin, fmax) = X_RANGE;
    let visible = |f: f64| f >= fmin && f <= fmax;

    let lowest = curves
        .iter()
        .flat_map(|(_, c)| c.points.iter())
        .filter(|p| visible(p.frequency) && p.magnitude_db.is_finite())
        .map(|p| p.magnitude_db)
        .fold(f64::INFINITY, f64::min);
    let y_bottom = if lowest.is_finite() {
        ((lowest / 10.0).floor() * 10.0).min(Y_TOP_DB - 10.0)
    } else {
        Y_TOP_DB - 40.0
    };

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let x_of = |f: f64| LEFT + (f / fmin).log10() / (fmax / fmin).log10() * plot_w;
    let y_of =
        |db: f64| TOP + (Y_TOP_DB - db.clamp(y_bottom, Y_TOP_DB)) / (Y_TOP_DB - y_bottom) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(title)
    );

    for f in X_TICKS {
        let x = x_of(f);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#dddddd"/>"##,
            TOP + plot_h
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + plot_h + 18.0,
            tick_label(f)
        );
    }
    let step = if Y_TOP_DB - y_bottom > 60.0 {
        20.0
    } else {
        10.0
    };
    let mut db = (Y_TOP_DB / step).floor() * step;
    while db >= y_bottom {
        let y = y_of(db);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{db}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
        db -= step;
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Hz</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 18.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">dB</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for (k, (label, curve)) in curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = curve
            .points
            .iter()
            .filter(|p| visible(p.frequency) && p.magnitude_db.is_finite())
            .map(|p| format!("{:.2},{:.2}", x_of(p.frequency), y_of(p.magnitude_db)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = LEFT + plot_w + 14.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 22.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{}</text>"#,
            lx + 28.0,
            ly + 4.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}
