//! Deep-cut ellipsoid method state.
//!
//! The ellipsoid is `{z : (z − x)ᵀ Q⁻¹ (z − x) ≤ 1}`. A cut `(a, h)` keeps
//! the half-space `aᵀ(z − x) ≤ −h`; `h = 0` is a central cut.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    pub center: DVector<f64>,
    pub shape: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutOutcome {
    /// Ellipsoid replaced by the minimum-volume one containing the cut part.
    Updated,
    /// The kept half-space misses the ellipsoid's interior; state unchanged.
    Empty,
    /// `aᵀQa` is not positive (zero direction or degenerate shape).
    Degenerate,
}

impl Ellipsoid {
    pub fn ball(center: DVector<f64>, radius: f64) -> Self {
        let n = center.len();
        Self {
            center,
            shape: DMatrix::identity(n, n) * (radius * radius),
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// `max_{z∈E} aᵀ(z − x) = √(aᵀQa)`.
    pub fn width(&self, a: &DVector<f64>) -> f64 {
        (a.dot(&(&self.shape * a))).max(0.0).sqrt()
    }

    pub fn contains(&self, z: &DVector<f64>) -> bool {
        let d = z - &self.center;
        match self.shape.clone().cholesky() {
            Some(c) => d.dot(&c.solve(&d)) <= 1.0 + 1e-12,
            None => false,
        }
    }

    pub fn cut(&mut self, a: &DVector<f64>, depth: f64) -> CutOutcome {
        let n = self.dim() as f64;
        let qa = &self.shape * a;
        let w2 = a.dot(&qa);
        if !(w2 > 0.0) || !w2.is_finite() {
            return CutOutcome::Degenerate;
        }
        let w = w2.sqrt();
        let alpha = (depth / w).max(0.0);
        if alpha >= 1.0 {
            return CutOutcome::Empty;
        }
        let b = qa / w;
        if n == 1.0 {
            // Interval [x − √q, x + √q] intersected with the cut.
            let half = self.shape[(0, 0)].sqrt() * a[0].signum();
            let lo = self.center[0] - half;
            let hi = self.center[0] - alpha * half;
            self.center[0] = 0.5 * (lo + hi);
            self.shape[(0, 0)] = (0.5 * (hi - lo)).powi(2);
            return CutOutcome::Updated;
        }
        let step = (1.0 + n * alpha) / (n + 1.0);
        self.center -= &b * step;
        let factor = n * n / (n * n - 1.0) * (1.0 - alpha * alpha);
        let rank1 = 2.0 * (1.0 + n * alpha) / ((n + 1.0) * (1.0 + alpha));
        let mut q = (&self.shape - (&b * b.transpose()) * rank1) * factor;
        let qt = q.transpose();
        q = (q + qt) * 0.5;
        self.shape = q;
        CutOutcome::Updated
    }
}
