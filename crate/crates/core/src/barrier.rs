//! Log-barrier Newton method for small smooth concave programs
//! `max f(x) s.t. c_j(x) ≥ 0` with concave `c_j`.

use nalgebra::{DMatrix, DVector};

/// Value, gradient and Hessian of a scalar function at a point.
pub(crate) struct Local {
    pub value: f64,
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
}

pub(crate) trait ConcaveProgram {
    fn dim(&self) -> usize;
    fn objective(&self, x: &DVector<f64>) -> Local;
    fn constraints(&self, x: &DVector<f64>) -> Vec<Local>;

    fn constraint_values(&self, x: &DVector<f64>) -> Vec<f64> {
        self.constraints(x).into_iter().map(|c| c.value).collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct BarrierOptions {
    /// Stop once the duality-gap bound `m/t` falls below this.
    pub gap_tol: f64,
    pub t0: f64,
    pub growth: f64,
    pub max_newton: usize,
}

impl Default for BarrierOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-10,
            t0: 1.0,
            growth: 20.0,
            max_newton: 200,
        }
    }
}

#[derive(Debug, Clone)]
#[allow(dead_code)]
pub(crate) struct BarrierResult {
    pub x: DVector<f64>,
    pub newton_steps: usize,
    pub gap: f64,
    /// True when `stop` fired before the gap target was met.
    pub stopped_early: bool,
}

fn barrier_value<P: ConcaveProgram>(p: &P, x: &DVector<f64>, t: f64) -> Option<f64> {
    let mut v = t * p.objective(x).value;
    for c in p.constraint_values(x) {
        if !(c > 0.0) {
            return None;
        }
        v += c.ln();
    }
    v.is_finite().then_some(v)
}

/// `x0` must be strictly feasible. `stop` is checked after every Newton step.
pub(crate) fn maximize<P: ConcaveProgram>(
    p: &P,
    x0: DVector<f64>,
    opts: BarrierOptions,
    stop: &dyn Fn(&DVector<f64>) -> bool,
) -> BarrierResult {
    let n = p.dim();
    let mut x = x0;
    let m = p.constraint_values(&x).len() as f64;
    let mut t = opts.t0;
    let mut steps = 0;
    loop {
        for _ in 0..opts.max_newton {
            let obj = p.objective(&x);
            let mut grad = obj.grad * t;
            let mut hess = obj.hess * t;
            for c in p.constraints(&x) {
                let inv = 1.0 / c.value;
                grad += &c.grad * inv;
                hess += &c.hess * inv - (&c.grad * c.grad.transpose()) * (inv * inv);
            }
            let neg = -&hess;
            let d = match neg.clone().cholesky() {
                Some(ch) => ch.solve(&grad),
                None => {
                    let shift = 1e-12 * neg.diagonal().amax().max(1.0);
                    match (neg + DMatrix::identity(n, n) * shift).lu().solve(&grad) {
                        Some(d) => d,
                        None => break,
                    }
                }
            };
            let dec = grad.dot(&d);
            if !(dec > 1e-14) {
                break;
            }
            let Some(phi0) = barrier_value(p, &x, t) else { break };
            let mut s = 1.0;
            let mut moved = false;
            while s > 1e-16 {
                let trial = &x + &d * s;
                if let Some(phi) = barrier_value(p, &trial, t) {
                    if phi >= phi0 + 0.25 * s * dec {
                        x = trial;
                        moved = true;
                        break;
                    }
                }
                s *= 0.5;
            }
            steps += 1;
            if stop(&x) {
                return BarrierResult {
                    x,
                    newton_steps: steps,
                    gap: m / t,
                    stopped_early: true,
                };
            }
            if !moved || dec < 1e-12 {
                break;
            }
        }
        if m / t < opts.gap_tol {
            return BarrierResult {
                x,
                newton_steps: steps,
                gap: m / t,
                stopped_early: false,
            };
        }
        t *= opts.growth;
    }
}
