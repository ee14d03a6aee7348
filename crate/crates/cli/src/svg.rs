//! Minimal self-contained SVG curve emitter: axes, ticks and one polyline.
//! No dependency; coordinates rounded to 0.01 px, deterministically.

pub fn curve(points: &[(f64, f64)], x_label: &str, y_label: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 440.0;
    const L: f64 = 72.0;
    const R: f64 = 620.0;
    const T: f64 = 20.0;
    const B: f64 = 392.0;

    let finite: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (mut x0, mut x1) = (f64::MAX, f64::MIN);
    let (mut y0, mut y1) = (f64::MAX, f64::MIN);
    for &(x, y) in &finite {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if finite.is_empty() {
        x0 = 0.0;
        x1 = 1.0;
        y0 = 0.0;
        y1 = 1.0;
    }
    if x1 - x0 < 1e-300 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-300 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| L + (x - x0) / (x1 - x0) * (R - L);
    let sy = |y: f64| B - (y - y0) / (y1 - y0) * (B - T);

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" \
         font-family=\"monospace\" font-size=\"11\">\n"
    ));
    s.push_str(&format!(
        "<rect x=\"{L}\" y=\"{T}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n",
        R - L,
        B - T
    ));
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let xp = sx(xv);
        let yp = sy(yv);
        s.push_str(&format!(
            "<line x1=\"{xp:.2}\" y1=\"{B}\" x2=\"{xp:.2}\" y2=\"{:.2}\" stroke=\"#444\"/>\n",
            B + 5.0
        ));
        s.push_str(&format!(
            "<text x=\"{xp:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{xv:.3e}</text>\n",
            B + 18.0
        ));
        s.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{yp:.2}\" x2=\"{L}\" y2=\"{yp:.2}\" stroke=\"#444\"/>\n",
            L - 5.0
        ));
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{yv:.3e}</text>\n",
            L - 8.0,
            yp + 4.0
        ));
    }
    s.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{x_label}</text>\n",
        0.5 * (L + R),
        H - 8.0
    ));
    s.push_str(&format!(
        "<text x=\"14\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.2})\">{y_label}</text>\n",
        0.5 * (T + B),
        0.5 * (T + B)
    ));
    if !finite.is_empty() {
        let pts: Vec<String> = finite
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        s.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n",
            pts.join(" ")
        ));
    }
    s.push_str("</svg>\n");
    s
}
