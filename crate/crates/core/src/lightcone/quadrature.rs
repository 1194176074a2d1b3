//! Gauss-Legendre rules and composite integration on the triangle 0 ≤ t″ ≤ t′ ≤ T.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Nodes and weights of the n-point Gauss-Legendre rule on [−1, 1], by Newton iteration
/// on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n <= 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite rule: `panels` equal panels with an `order`-point rule on each.
pub(crate) struct Composite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Composite {
    pub(crate) fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        Composite { nodes, weights }
    }

    /// Points and weights on [a, b] split into `panels` panels.
    fn points(&self, a: f64, b: f64, panels: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = (b - a) / panels as f64;
        (0..panels).flat_map(move |p| {
            let lo = a + h * p as f64;
            self.nodes
                .iter()
                .zip(&self.weights)
                .map(move |(x, w)| (lo + 0.5 * h * (x + 1.0), 0.5 * h * w))
        })
    }

    /// `∫₀^T dt′ ∫₀^{t′} dt″ f(t′, t″)` with `panels` panels on each level; the inner
    /// interval is rescaled to [0, t′] so the rule follows the triangle's edge.
    pub(crate) fn triangle(
        &self,
        upper: f64,
        panels: usize,
        f: &impl Fn(f64, f64) -> Complex64,
    ) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (t1, w1) in self.points(0.0, upper, panels) {
            let inner: Complex64 = self
                .points(0.0, t1, panels)
                .map(|(t2, w2)| f(t1, t2) * w2)
                .sum();
            acc += inner * w1;
        }
        acc
    }

    pub(crate) fn order(&self) -> usize {
        self.nodes.len()
    }
}
