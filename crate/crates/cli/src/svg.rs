//! Minimal SVG line plot: one polyline per trace, annotated axes, no
//! dependencies.

use fractosc_core::SampledFn;

const W: f64 = 900.0;
const H: f64 = 500.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

pub fn render(trace: &SampledFn, title: &str) -> String {
    let grid = trace.grid();
    let (t0, t1) = (0.0, grid.t_end());
    let mut y0 = f64::INFINITY;
    let mut y1 = f64::NEG_INFINITY;
    for &v in trace.values() {
        y0 = y0.min(v);
        y1 = y1.max(v);
    }
    if y0 == y1 {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);

    let px = |t: f64| MARGIN_L + (t - t0) / (t1 - t0) * (W - MARGIN_L - MARGIN_R);
    let py = |y: f64| H - MARGIN_B - (y - y0) / (y1 - y0) * (H - MARGIN_T - MARGIN_B);

    let mut points = String::new();
    for (i, &v) in trace.values().iter().enumerate() {
        if i > 0 {
            points.push(' ');
        }
        points.push_str(&format!("{:.2},{:.2}", px(grid.node(i)), py(v)));
    }

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    s.push_str(&format!(
        "<text x=\"{:.1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        W / 2.0,
        xml_escape(title)
    ));
    // axes
    s.push_str(&format!(
        "<line x1=\"{l:.1}\" y1=\"{b:.1}\" x2=\"{r:.1}\" y2=\"{b:.1}\" stroke=\"black\"/>\n",
        l = MARGIN_L,
        r = W - MARGIN_R,
        b = H - MARGIN_B
    ));
    s.push_str(&format!(
        "<line x1=\"{l:.1}\" y1=\"{t:.1}\" x2=\"{l:.1}\" y2=\"{b:.1}\" stroke=\"black\"/>\n",
        l = MARGIN_L,
        t = MARGIN_T,
        b = H - MARGIN_B
    ));
    // zero line if visible
    if y0 < 0.0 && y1 > 0.0 {
        s.push_str(&format!(
            "<line x1=\"{l:.1}\" y1=\"{z:.1}\" x2=\"{r:.1}\" y2=\"{z:.1}\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n",
            l = MARGIN_L,
            r = W - MARGIN_R,
            z = py(0.0)
        ));
    }
    // tick labels
    for k in 0..=4 {
        let t = t0 + (t1 - t0) * k as f64 / 4.0;
        s.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{:.4}</text>\n",
            px(t),
            H - MARGIN_B + 18.0,
            t
        ));
        let y = y0 + (y1 - y0) * k as f64 / 4.0;
        s.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">{:.4}</text>\n",
            MARGIN_L - 6.0,
            py(y) + 4.0,
            y
        ));
    }
    s.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">t</text>\n",
        (MARGIN_L + W - MARGIN_R) / 2.0,
        H - 10.0
    ));
    s.push_str(&format!(
        "<text x=\"16\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">x</text>\n",
        (MARGIN_T + H - MARGIN_B) / 2.0,
        (MARGIN_T + H - MARGIN_B) / 2.0
    ));
    s.push_str(&format!(
        "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.2\" points=\"{points}\"/>\n"
    ));
    s.push_str("</svg>\n");
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
