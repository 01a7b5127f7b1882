//! Function oracles on ℝⁿ with a declared convexity shape.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gauss::SeededStream;

/// Declared shape of a function oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Convex,
    Concave,
    Affine,
    Unknown,
}

impl Shape {
    pub fn negated(self) -> Shape {
        match self {
            Shape::Convex => Shape::Concave,
            Shape::Concave => Shape::Convex,
            s => s,
        }
    }

    /// Whether a convex function may carry this declaration.
    pub fn admits_convex(self) -> bool {
        matches!(self, Shape::Convex | Shape::Affine)
    }

    pub fn admits_concave(self) -> bool {
        matches!(self, Shape::Concave | Shape::Affine)
    }
}

type EvalFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A function ℝⁿ → ℝ together with its declared shape. Evaluation must be
/// reentrant; oracles are shared across Monte Carlo worker threads.
#[derive(Clone)]
pub struct ConvexFunctionOracle {
    name: String,
    dim: usize,
    shape: Shape,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for ConvexFunctionOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexFunctionOracle")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("shape", &self.shape)
            .finish()
    }
}

/// Largest midpoint-inequality violation found by [`ConvexFunctionOracle::midpoint_probe`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeReport {
    pub probes: usize,
    /// max of f((x+y)/2) − (f(x)+f(y))/2 (positive means non-convex).
    pub convexity_violation: f64,
    /// max of (f(x)+f(y))/2 − f((x+y)/2) (positive means non-concave).
    pub concavity_violation: f64,
}

impl ProbeReport {
    pub fn consistent_with(&self, shape: Shape, tol: f64) -> bool {
        match shape {
            Shape::Convex => self.convexity_violation <= tol,
            Shape::Concave => self.concavity_violation <= tol,
            Shape::Affine => self.convexity_violation <= tol && self.concavity_violation <= tol,
            Shape::Unknown => true,
        }
    }
}

impl ConvexFunctionOracle {
    pub fn new<F>(name: impl Into<String>, dim: usize, shape: Shape, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        assert!(dim >= 1, "oracle dimension must be positive");
        ConvexFunctionOracle { name: name.into(), dim, shape, eval: Arc::new(f) }
    }

    /// One-dimensional convenience constructor.
    pub fn scalar<F>(name: impl Into<String>, shape: Shape, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(name, 1, shape, move |x: &[f64]| f(x[0]))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        (self.eval)(x)
    }

    pub fn eval1(&self, z: f64) -> f64 {
        (self.eval)(std::slice::from_ref(&z))
    }

    /// −f, with the declared shape flipped.
    pub fn negated(&self) -> Self {
        let inner = self.eval.clone();
        ConvexFunctionOracle {
            name: format!("-({})", self.name),
            dim: self.dim,
            shape: self.shape.negated(),
            eval: Arc::new(move |x: &[f64]| -inner(x)),
        }
    }

    /// f + c.
    pub fn shifted(&self, c: f64) -> Self {
        let inner = self.eval.clone();
        ConvexFunctionOracle {
            name: format!("{}+{c}", self.name),
            dim: self.dim,
            shape: self.shape,
            eval: Arc::new(move |x: &[f64]| inner(x) + c),
        }
    }

    /// Randomized midpoint test on pairs drawn uniformly from [−scale, scale]ⁿ.
    pub fn midpoint_probe(&self, probes: usize, stream: SeededStream, scale: f64) -> ProbeReport {
        let mut rng = stream.rng();
        let n = self.dim;
        let mut x = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut m = vec![0.0; n];
        let mut cv = f64::NEG_INFINITY;
        let mut cc = f64::NEG_INFINITY;
        for _ in 0..probes {
            for i in 0..n {
                x[i] = rng.random_range(-scale..scale);
                y[i] = rng.random_range(-scale..scale);
                m[i] = 0.5 * (x[i] + y[i]);
            }
            let fm = self.eval(&m);
            let avg = 0.5 * (self.eval(&x) + self.eval(&y));
            let s = 1.0 + fm.abs().max(avg.abs());
            cv = cv.max((fm - avg) / s);
            cc = cc.max((avg - fm) / s);
        }
        ProbeReport { probes, convexity_violation: cv, concavity_violation: cc }
    }

    /// Randomized check that f is nondecreasing in every coordinate on
    /// [0, scale]ⁿ; returns the largest decrease found.
    pub fn monotonicity_probe(&self, probes: usize, stream: SeededStream, scale: f64) -> f64 {
        let mut rng = stream.rng();
        let mut worst: f64 = 0.0;
        let mut x = vec![0.0; self.dim];
        for _ in 0..probes {
            for v in x.iter_mut() {
                *v = rng.random_range(0.0..scale);
            }
            let base = self.eval(&x);
            let i = rng.random_range(0..self.dim);
            let step = rng.random_range(0.0..scale);
            x[i] += step;
            let up = self.eval(&x);
            worst = worst.max(base - up);
        }
        worst
    }
}

/// Built-in oracles used by fixtures and tests.
pub mod builtin {
    use super::*;

    pub fn square() -> ConvexFunctionOracle {
        ConvexFunctionOracle::scalar("z^2", Shape::Convex, |z| z * z)
    }

    pub fn abs() -> ConvexFunctionOracle {
        ConvexFunctionOracle::scalar("|z|", Shape::Convex, f64::abs)
    }

    pub fn exp() -> ConvexFunctionOracle {
        ConvexFunctionOracle::scalar("e^z", Shape::Convex, f64::exp)
    }

    pub fn relu() -> ConvexFunctionOracle {
        ConvexFunctionOracle::scalar("max(z,0)", Shape::Convex, |z| z.max(0.0))
    }

    pub fn softplus() -> ConvexFunctionOracle {
        ConvexFunctionOracle::scalar("log(1+e^z)", Shape::Convex, |z| {
            if z > 0.0 {
                z + (-z).exp().ln_1p()
            } else {
                z.exp().ln_1p()
            }
        })
    }

    pub fn affine1(slope: f64, intercept: f64) -> ConvexFunctionOracle {
        ConvexFunctionOracle::scalar(format!("{slope}z+{intercept}"), Shape::Affine, move |z| {
            slope * z + intercept
        })
    }

    /// x ↦ ⟨a, x⟩ + b.
    pub fn affine(a: Vec<f64>, b: f64) -> ConvexFunctionOracle {
        let n = a.len();
        ConvexFunctionOracle::new("<a,x>+b", n, Shape::Affine, move |x| {
            a.iter().zip(x).map(|(ai, xi)| ai * xi).sum::<f64>() + b
        })
    }

    pub fn sum(n: usize) -> ConvexFunctionOracle {
        ConvexFunctionOracle::new("sum", n, Shape::Affine, |x| x.iter().sum())
    }

    pub fn max(n: usize) -> ConvexFunctionOracle {
        ConvexFunctionOracle::new("max", n, Shape::Convex, |x| {
            x.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        })
    }

    pub fn norm_sq(n: usize) -> ConvexFunctionOracle {
        ConvexFunctionOracle::new("|x|^2", n, Shape::Convex, |x| x.iter().map(|v| v * v).sum())
    }

    pub fn log_sum_exp(n: usize) -> ConvexFunctionOracle {
        ConvexFunctionOracle::new("logsumexp", n, Shape::Convex, |x| {
            let m = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            m + x.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
        })
    }

    /// The one-dimensional convex suite used by coherence checks.
    pub fn convex_suite_1d() -> Vec<ConvexFunctionOracle> {
        vec![square(), abs(), exp(), relu(), softplus(), affine1(2.0, 1.0)]
    }
}

#[cfg(test)]
mod tests {
    use super::builtin::*;
    use super::*;

    #[test]
    fn builtin_shapes_pass_probes() {
        let s = SeededStream::new(1);
        for o in convex_suite_1d() {
            let r = o.midpoint_probe(2000, s, 4.0);
            assert!(r.consistent_with(o.shape(), 1e-9), "{:?} {:?}", o, r);
        }
        for o in [max(3), norm_sq(3), log_sum_exp(4), sum(2)] {
            let r = o.midpoint_probe(2000, s, 3.0);
            assert!(r.consistent_with(o.shape(), 1e-9), "{:?}", o);
        }
    }

    #[test]
    fn probe_detects_wrong_declaration() {
        let bogus = ConvexFunctionOracle::scalar("sin", Shape::Convex, f64::sin);
        let r = bogus.midpoint_probe(500, SeededStream::new(2), 3.0);
        assert!(!r.consistent_with(Shape::Convex, 1e-9));
        let neg = square().negated();
        assert_eq!(neg.shape(), Shape::Concave);
        assert!(neg.midpoint_probe(500, SeededStream::new(3), 3.0).consistent_with(Shape::Concave, 1e-9));
    }

    #[test]
    fn monotonicity() {
        assert!(max(3).monotonicity_probe(500, SeededStream::new(4), 2.0) <= 0.0);
        let dec = ConvexFunctionOracle::new("-x0", 2, Shape::Affine, |x| -x[0]);
        assert!(dec.monotonicity_probe(500, SeededStream::new(4), 2.0) > 0.0);
    }
}
