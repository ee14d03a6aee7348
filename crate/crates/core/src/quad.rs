//! Quadrature machinery: Gauss-Legendre nodes, composite panel grids with
//! polynomial interpolation inside panels, and an adaptive Simpson rule.

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence from the Chebyshev-like initial guesses.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (p2, d2) = legendre_with_derivative(n, x);
                dp = d2;
                x -= p2 / d2;
                break;
            }
        }
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A composite Gauss-Legendre grid on [a, b]: `panels` equal panels carrying
/// `per_panel` nodes each.  Panel boundaries are kept so integrands with a
/// kink at a known point can be re-integrated panel-locally.
#[derive(Debug, Clone)]
pub struct CompositeGrid {
    pub a: f64,
    pub b: f64,
    pub panels: usize,
    pub per_panel: usize,
    /// All nodes, panel-major, ascending.
    pub nodes: Vec<f64>,
    /// Matching quadrature weights.
    pub weights: Vec<f64>,
    /// Reference nodes on [-1, 1] shared by every panel.
    pub ref_nodes: Vec<f64>,
    /// Barycentric weights for interpolation on `ref_nodes`.
    pub bary: Vec<f64>,
}

impl CompositeGrid {
    pub fn new(a: f64, b: f64, panels: usize, per_panel: usize) -> Self {
        assert!(b > a && panels >= 1 && per_panel >= 2);
        let (ref_nodes, ref_weights) = gauss_legendre(per_panel);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * per_panel);
        let mut weights = Vec::with_capacity(panels * per_panel);
        for p in 0..panels {
            let left = a + p as f64 * h;
            let mid = left + 0.5 * h;
            for (&t, &w) in ref_nodes.iter().zip(&ref_weights) {
                nodes.push(mid + 0.5 * h * t);
                weights.push(0.5 * h * w);
            }
        }
        let bary = barycentric_weights(&ref_nodes);
        Self {
            a,
            b,
            panels,
            per_panel,
            nodes,
            weights,
            ref_nodes,
            bary,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn panel_width(&self) -> f64 {
        (self.b - self.a) / self.panels as f64
    }

    /// Index of the panel containing `x` (clamped to the grid).
    pub fn panel_of(&self, x: f64) -> usize {
        let h = self.panel_width();
        (((x - self.a) / h).floor() as isize).clamp(0, self.panels as isize - 1) as usize
    }

    pub fn panel_bounds(&self, p: usize) -> (f64, f64) {
        let h = self.panel_width();
        (self.a + p as f64 * h, self.a + (p + 1) as f64 * h)
    }

    /// Lagrange cardinal values l_j(x) on panel `p`, so that a function known
    /// at the panel nodes is interpolated by sum_j l_j(x) f_j.
    pub fn cardinal_values(&self, p: usize, x: f64) -> Vec<f64> {
        let (left, right) = self.panel_bounds(p);
        let t = 2.0 * (x - left) / (right - left) - 1.0;
        let m = self.per_panel;
        let mut out = vec![0.0; m];
        // Exact hit on a node short-circuits the barycentric form.
        for j in 0..m {
            if (t - self.ref_nodes[j]).abs() < 1e-14 {
                out[j] = 1.0;
                return out;
            }
        }
        let mut denom = 0.0;
        for ((o, &w), &node) in out.iter_mut().zip(&self.bary).zip(&self.ref_nodes) {
            let c = w / (t - node);
            *o = c;
            denom += c;
        }
        for v in &mut out {
            *v /= denom;
        }
        out
    }
}

fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut w = vec![1.0; n];
    for j in 0..n {
        for k in 0..n {
            if k != j {
                w[j] /= nodes[j] - nodes[k];
            }
        }
    }
    w
}

/// Adaptive Simpson integration to a relative tolerance (with an absolute
/// floor for integrals near zero).
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let scale = whole.abs().max(1e-300);
    simpson_step(f, a, b, fa, fm, fb, whole, rel_tol * scale, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
