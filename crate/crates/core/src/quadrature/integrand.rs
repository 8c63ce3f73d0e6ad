//! Built-in test integrands with known means.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::digitspace::checked_power;
use crate::error::{Error, Result};
use crate::rng::{keyed_rng, Role};

type Eval = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A function on `[0,1)^d`, optionally with its exact mean and variance.
#[derive(Clone)]
pub struct Integrand {
    name: String,
    dim: usize,
    eval: Arc<Eval>,
    mean: Option<f64>,
    variance: Option<f64>,
}

impl fmt::Debug for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Integrand")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("mean", &self.mean)
            .field("variance", &self.variance)
            .finish()
    }
}

/// Names accepted by [`Integrand::from_name`].
pub const CATALOG: [&str; 6] = [
    "sloan_joe_f",
    "sloan_joe_g",
    "linear",
    "piecewise_linear",
    "smooth_1d",
    "antisymmetric",
];

const E: f64 = std::f64::consts::E;

fn g_variance() -> f64 {
    (3.0 - E) * (7.0 * E - 11.0) / 8.0
}

impl Integrand {
    pub fn new<F>(name: impl Into<String>, dim: usize, f: F, mean: Option<f64>, variance: Option<f64>) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Integrand {
            name: name.into(),
            dim,
            eval: Arc::new(f),
            mean,
            variance,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mean(&self) -> Option<f64> {
        self.mean
    }

    pub fn variance(&self) -> Option<f64> {
        self.variance
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    /// `g(x) = x2 exp(x1 x2)`, mean `e - 2`.
    pub fn sloan_joe_g() -> Self {
        Integrand::new(
            "sloan_joe_g",
            2,
            |x| x[1] * (x[0] * x[1]).exp(),
            Some(E - 2.0),
            Some(g_variance()),
        )
    }

    /// `g / (e - 2)`, mean 1, so absolute and relative errors coincide.
    pub fn sloan_joe_f() -> Self {
        let c = E - 2.0;
        Integrand::new(
            "sloan_joe_f",
            2,
            move |x| x[1] * (x[0] * x[1]).exp() / c,
            Some(1.0),
            Some(g_variance() / (c * c)),
        )
    }

    /// `sum_j a_j x_j`.
    pub fn linear(a: Vec<f64>) -> Self {
        let mean = a.iter().sum::<f64>() / 2.0;
        let variance = a.iter().map(|v| v * v).sum::<f64>() / 12.0;
        let dim = a.len();
        Integrand::new(
            "linear",
            dim,
            move |x| a.iter().zip(x).map(|(c, v)| c * v).sum(),
            Some(mean),
            Some(variance),
        )
    }

    /// `exp(x)` on `[0,1)`.
    pub fn smooth_1d() -> Self {
        Integrand::new(
            "smooth_1d",
            1,
            |x| x[0].exp(),
            Some(E - 1.0),
            Some((E * E - 1.0) / 2.0 - (E - 1.0) * (E - 1.0)),
        )
    }

    /// `sum_j (x_j - 1/2)`, odd about the center of the cube.
    pub fn antisymmetric(dim: usize) -> Self {
        Integrand::new(
            "antisymmetric",
            dim,
            |x| x.iter().map(|v| v - 0.5).sum(),
            Some(0.0),
            Some(dim as f64 / 12.0),
        )
    }

    /// Looks up a catalog entry; `piecewise_linear` uses `m = 4`, seed 0.
    pub fn from_name(name: &str, dim: usize, base: u32) -> Result<Self> {
        let fixed = |want: usize, f: Integrand| {
            if dim == want {
                Ok(f)
            } else {
                Err(Error::Contract(format!("{name} is {want}-dimensional, got d = {dim}")))
            }
        };
        match name {
            "sloan_joe_f" => fixed(2, Integrand::sloan_joe_f()),
            "sloan_joe_g" => fixed(2, Integrand::sloan_joe_g()),
            "smooth_1d" => fixed(1, Integrand::smooth_1d()),
            "linear" => Ok(Integrand::linear(vec![1.0; dim])),
            "antisymmetric" => Ok(Integrand::antisymmetric(dim)),
            "piecewise_linear" => {
                if dim != 2 {
                    return Err(Error::Contract(format!("{name} is 2-dimensional, got d = {dim}")));
                }
                Ok(PiecewiseLinear::random(4, base, 0)?.into_integrand())
            }
            other => Err(Error::Unsupported(format!(
                "unknown integrand '{other}', expected one of {}",
                CATALOG.join(", ")
            ))),
        }
    }
}

/// A two-dimensional sum over `k = 0..=m` of functions that are affine on
/// each elementary interval of shape `(k, m-k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    base: u32,
    m: usize,
    /// Per `k`, per cell: value at the center and the two slopes.
    coefficients: Vec<Vec<[f64; 3]>>,
}

impl PiecewiseLinear {
    pub fn random(m: usize, base: u32, seed: u64) -> Result<Self> {
        let cells = checked_power(base, m)
            .filter(|&c| c <= 1 << 20)
            .ok_or_else(|| Error::Precision(format!("{base}^{m} cells is too many")))?;
        let coefficients = (0..=m)
            .map(|k| {
                let mut rng = keyed_rng(seed, k as u32, Role::Points, 0);
                (0..cells)
                    .map(|_| {
                        [
                            rng.random_range(-1.0..1.0),
                            rng.random_range(-1.0..1.0),
                            rng.random_range(-1.0..1.0),
                        ]
                    })
                    .collect()
            })
            .collect();
        Ok(PiecewiseLinear {
            base,
            m,
            coefficients,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let b = f64::from(self.base);
        let mut total = 0.0;
        for (k, cells) in self.coefficients.iter().enumerate() {
            let w1 = b.powi(k as i32);
            let w2 = b.powi((self.m - k) as i32);
            let t1 = (x[0] * w1).floor().min(w1 - 1.0);
            let t2 = (x[1] * w2).floor().min(w2 - 1.0);
            let c1 = (t1 + 0.5) / w1;
            let c2 = (t2 + 0.5) / w2;
            let [a, s1, s2] = cells[(t1 * w2 + t2) as usize];
            total += a + s1 * (x[0] - c1) + s2 * (x[1] - c2);
        }
        total
    }

    /// The integral: the mean of the cell-center values.
    pub fn mean(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|cells| cells.iter().map(|c| c[0]).sum::<f64>() / cells.len() as f64)
            .sum()
    }

    pub fn into_integrand(self) -> Integrand {
        let mean = self.mean();
        Integrand::new("piecewise_linear", 2, move |x| self.eval(x), Some(mean), None)
    }
}
