//! Minimal SVG renderer for learning curves. No dependencies; emits a
//! fixed-size plot with one polyline per series.

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 200.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/// `series`: (label, points (simulations, min corner reward)).
pub fn learning_curve_svg(series: &[(String, Vec<(f64, f64)>)]) -> String {
    let x_max = series
        .iter()
        .flat_map(|(_, pts)| pts.iter().map(|p| p.0))
        .fold(1.0_f64, f64::max);
    let (y_min, y_max) = (-1.05, 0.25);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_of = |x: f64| MARGIN_LEFT + (x / x_max) * plot_w;
    let y_of = |y: f64| MARGIN_TOP + (y_max - y) / (y_max - y_min) * plot_h;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // Axes.
    out.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{x0}\" y1=\"{yt}\" x2=\"{x0}\" y2=\"{y0}\" stroke=\"black\"/>\n",
        x0 = MARGIN_LEFT,
        y0 = MARGIN_TOP + plot_h,
        x1 = MARGIN_LEFT + plot_w,
        yt = MARGIN_TOP,
    ));
    for frac in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let x = MARGIN_LEFT + frac * plot_w;
        out.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" font-size=\"12\" text-anchor=\"middle\">{v:.0}</text>\n",
            y = MARGIN_TOP + plot_h + 20.0,
            v = frac * x_max,
        ));
    }
    for tick in [-1.0, -0.75, -0.5, -0.25, 0.0, 0.2] {
        let y = y_of(tick);
        out.push_str(&format!(
            "<line x1=\"{x0}\" y1=\"{y}\" x2=\"{x1}\" y2=\"{y}\" stroke=\"#dddddd\"/>\n\
             <text x=\"{xt}\" y=\"{yt}\" font-size=\"12\" text-anchor=\"end\">{tick}</text>\n",
            x0 = MARGIN_LEFT,
            x1 = MARGIN_LEFT + plot_w,
            xt = MARGIN_LEFT - 8.0,
            yt = y + 4.0,
        ));
    }
    out.push_str(&format!(
        "<text x=\"{x}\" y=\"{y}\" font-size=\"13\" text-anchor=\"middle\">simulations</text>\n",
        x = MARGIN_LEFT + plot_w / 2.0,
        y = HEIGHT - 12.0,
    ));
    out.push_str(&format!(
        "<text x=\"16\" y=\"{y}\" font-size=\"13\" transform=\"rotate(-90 16 {y})\" \
         text-anchor=\"middle\">worst corner reward</text>\n",
        y = MARGIN_TOP + plot_h / 2.0,
    ));

    for (i, (label, points)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if !points.is_empty() {
            let path: Vec<String> = points
                .iter()
                .map(|&(x, y)| {
                    format!("{:.1},{:.1}", x_of(x), y_of(y.clamp(y_min, y_max)))
                })
                .collect();
            out.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" \
                 points=\"{}\"/>\n",
                path.join(" ")
            ));
        }
        let ly = MARGIN_TOP + 14.0 + i as f64 * 18.0;
        out.push_str(&format!(
            "<line x1=\"{lx}\" y1=\"{ly0}\" x2=\"{lx2}\" y2=\"{ly0}\" stroke=\"{color}\" \
             stroke-width=\"2\"/>\n\
             <text x=\"{tx}\" y=\"{ty}\" font-size=\"12\">{label}</text>\n",
            lx = MARGIN_LEFT + plot_w + 12.0,
            lx2 = MARGIN_LEFT + plot_w + 34.0,
            ly0 = ly - 4.0,
            tx = MARGIN_LEFT + plot_w + 40.0,
            ty = ly,
        ));
    }
    out.push_str("</svg>\n");
    out
}
