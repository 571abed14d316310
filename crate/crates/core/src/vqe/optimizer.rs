//! Derivative-free minimisers: Nelder-Mead simplex and SPSA.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::rng::{self, unit_f64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    NelderMead,
    Spsa,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub method: Method,
    /// Nelder-Mead stops once the simplex energies spread less than this.
    pub tolerance: f64,
    pub max_evaluations: usize,
    pub seed: u64,
    /// Edge length of the initial simplex, or SPSA perturbation size.
    pub initial_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> OptimizerConfig {
        OptimizerConfig {
            method: Method::NelderMead,
            tolerance: 1e-7,
            max_evaluations: 5000,
            seed: 0,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Best value seen after each evaluation.
    pub trace: Vec<f64>,
}

/// Wraps the objective to record the best point and the running minimum.
struct Tracker<'a, F> {
    f: &'a mut F,
    best_x: Vec<f64>,
    best: f64,
    trace: Vec<f64>,
    budget: usize,
}

impl<'a, F: FnMut(&[f64]) -> Result<f64, E>, E> Tracker<'a, F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64, E> {
        let v = (self.f)(x)?;
        if v < self.best || self.trace.is_empty() {
            self.best = v;
            self.best_x = x.to_vec();
        }
        self.trace.push(self.best);
        Ok(v)
    }

    fn exhausted(&self) -> bool {
        self.trace.len() >= self.budget
    }

    fn finish(self, converged: bool) -> OptimizationResult {
        OptimizationResult {
            x: self.best_x,
            value: self.best,
            evaluations: self.trace.len(),
            converged,
            trace: self.trace,
        }
    }
}

pub fn minimize<F, E>(f: &mut F, x0: &[f64], cfg: &OptimizerConfig) -> Result<OptimizationResult, E>
where
    F: FnMut(&[f64]) -> Result<f64, E>,
{
    let mut t = Tracker {
        f,
        best_x: x0.to_vec(),
        best: f64::INFINITY,
        trace: Vec::new(),
        budget: cfg.max_evaluations.max(1),
    };
    if x0.is_empty() {
        t.eval(x0)?;
        return Ok(t.finish(true));
    }
    let converged = match cfg.method {
        Method::NelderMead => nelder_mead(&mut t, x0, cfg)?,
        Method::Spsa => spsa(&mut t, x0, cfg)?,
    };
    Ok(t.finish(converged))
}

/// Simplex search with standard coefficients (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2). After each convergence it restarts from the
/// best vertex and stops once a restart no longer improves the value.
fn nelder_mead<F, E>(t: &mut Tracker<'_, F>, x0: &[f64], cfg: &OptimizerConfig) -> Result<bool, E>
where
    F: FnMut(&[f64]) -> Result<f64, E>,
{
    let n = x0.len();
    let mut start = x0.to_vec();
    let mut step = cfg.initial_step;
    let mut previous = f64::INFINITY;
    loop {
        let mut simplex: Vec<Vec<f64>> = vec![start.clone()];
        for i in 0..n {
            let mut v = start.clone();
            v[i] += step;
            simplex.push(v);
        }
        let mut values = Vec::with_capacity(n + 1);
        for v in &simplex {
            values.push(t.eval(v)?);
        }

        let mut converged = false;
        while !t.exhausted() {
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            if values[n] - values[0] < cfg.tolerance {
                converged = true;
                break;
            }

            let centroid: Vec<f64> = (0..n)
                .map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64)
                .collect();
            let along = |coef: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n])
                    .map(|(c, w)| c + coef * (c - w))
                    .collect()
            };

            let xr = along(1.0);
            let fr = t.eval(&xr)?;
            if fr < values[0] {
                let xe = along(2.0);
                let fe = t.eval(&xe)?;
                if fe < fr {
                    simplex[n] = xe;
                    values[n] = fe;
                } else {
                    simplex[n] = xr;
                    values[n] = fr;
                }
                continue;
            }
            if fr < values[n - 1] {
                simplex[n] = xr;
                values[n] = fr;
                continue;
            }
            let (xc, fc) = if fr < values[n] {
                let xc = along(0.5);
                let fc = t.eval(&xc)?;
                (xc, fc)
            } else {
                let xc = along(-0.5);
                let fc = t.eval(&xc)?;
                (xc, fc)
            };
            if fc < values[n].min(fr) {
                simplex[n] = xc;
                values[n] = fc;
                continue;
            }
            for i in 1..=n {
                let shrunk: Vec<f64> = simplex[0]
                    .iter()
                    .zip(&simplex[i])
                    .map(|(b, v)| b + 0.5 * (v - b))
                    .collect();
                values[i] = t.eval(&shrunk)?;
                simplex[i] = shrunk;
                if t.exhausted() {
                    break;
                }
            }
        }

        if !converged {
            return Ok(false);
        }
        if previous - t.best < cfg.tolerance {
            return Ok(true);
        }
        previous = t.best;
        start = t.best_x.clone();
        step = (step * 0.5).max(1e-4);
        if t.exhausted() {
            return Ok(false);
        }
    }
}

/// Simultaneous-perturbation stochastic approximation with Spall's gain
/// exponents. Returns the best point visited; never reports convergence
/// before the budget unless the step size has vanished.
fn spsa<F, E>(t: &mut Tracker<'_, F>, x0: &[f64], cfg: &OptimizerConfig) -> Result<bool, E>
where
    F: FnMut(&[f64]) -> Result<f64, E>,
{
    let mut rng = rng::stream(cfg.seed, "spsa", 0);
    let n = x0.len();
    let (a, c, big_a) = (
        cfg.initial_step,
        cfg.initial_step,
        (cfg.max_evaluations / 20) as f64,
    );
    let mut x = x0.to_vec();
    t.eval(&x)?;
    let mut k = 0usize;
    while t.trace.len() + 2 <= t.budget {
        let ak = a / libm::pow(k as f64 + 1.0 + big_a, 0.602);
        let ck = c / libm::pow(k as f64 + 1.0, 0.101);
        let delta: Vec<f64> = (0..n)
            .map(|_| if unit_f64(&mut rng) < 0.5 { -1.0 } else { 1.0 })
            .collect();
        let plus: Vec<f64> = x.iter().zip(&delta).map(|(xi, d)| xi + ck * d).collect();
        let minus: Vec<f64> = x.iter().zip(&delta).map(|(xi, d)| xi - ck * d).collect();
        let diff = t.eval(&plus)? - t.eval(&minus)?;
        for (xi, d) in x.iter_mut().zip(&delta) {
            *xi -= ak * diff / (2.0 * ck * d);
        }
        k += 1;
        if ak < 1e-12 {
            return Ok(true);
        }
    }
    if t.trace.len() < t.budget {
        t.eval(&x)?;
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::convert::Infallible;

    fn rosenbrock(x: &[f64]) -> Result<f64, Infallible> {
        Ok((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2))
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let cfg = OptimizerConfig {
            tolerance: 1e-14,
            max_evaluations: 20_000,
            ..Default::default()
        };
        let r = minimize(&mut rosenbrock, &[-1.2, 1.0], &cfg).unwrap();
        assert!(r.converged);
        assert!(
            (r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] - 1.0).abs() < 1e-4,
            "{:?}",
            r.x
        );
        assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(r.trace.len(), r.evaluations);
    }

    #[test]
    fn one_dimensional_cosine() {
        let mut f = |x: &[f64]| -> Result<f64, Infallible> { Ok(libm::cos(x[0])) };
        let cfg = OptimizerConfig {
            tolerance: 1e-14,
            ..Default::default()
        };
        let r = minimize(&mut f, &[0.3], &cfg).unwrap();
        assert!((r.value + 1.0).abs() < 1e-10);
    }

    #[test]
    fn spsa_quadratic() {
        let mut f = |x: &[f64]| -> Result<f64, Infallible> {
            Ok(x.iter().map(|v| (v - 0.5) * (v - 0.5)).sum())
        };
        let cfg = OptimizerConfig {
            method: Method::Spsa,
            max_evaluations: 4000,
            initial_step: 0.2,
            ..Default::default()
        };
        let a = minimize(&mut f, &[0.0, 0.0, 0.0], &cfg).unwrap();
        let b = minimize(&mut f, &[0.0, 0.0, 0.0], &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.value < 1e-3, "{}", a.value);
        assert!(a.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn errors_propagate() {
        let mut f = |_: &[f64]| -> Result<f64, &'static str> { Err("boom") };
        assert_eq!(
            minimize(&mut f, &[0.0], &OptimizerConfig::default()),
            Err("boom")
        );
    }
}
