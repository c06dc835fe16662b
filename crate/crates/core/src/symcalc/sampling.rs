//! Deterministic randomized point sampling and the `is_zero` identity test.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::eval::{EvalError, Number};
use super::expr::{normalize, Expr, Rational};
use crate::par;
use crate::report::Witness;

/// Numerical knobs shared by every sampled check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingPolicy {
    pub seed: u64,
    /// Number of accepted (non-singular) sample points per check.
    pub count: usize,
    pub low: f64,
    pub high: f64,
    /// Absolute tolerance of `is_zero`.
    pub tol_abs: f64,
    /// Relative tolerance of `is_zero`, against the summed magnitude of the terms.
    pub tol_rel: f64,
    /// Candidate cap is `resample_factor * count`.
    pub resample_factor: usize,
    /// Least-squares membership threshold, scaled by `1 + |value|`.
    pub membership_tol: f64,
    /// Singular values below `rank_tol * sigma_max` count as zero.
    pub rank_tol: f64,
    pub parallel: bool,
}

impl Default for SamplingPolicy {
    fn default() -> Self {
        SamplingPolicy {
            seed: 0x5eed,
            count: 50,
            low: -2.0,
            high: 2.0,
            tol_abs: 1e-9,
            tol_rel: 1e-9,
            resample_factor: 10,
            membership_tol: 1e-7,
            rank_tol: 1e-9,
            parallel: true,
        }
    }
}

impl SamplingPolicy {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }

    pub fn sequential(mut self) -> Self {
        self.parallel = false;
        self
    }

    pub fn tolerance(&self, scale: f64) -> f64 {
        self.tol_abs + self.tol_rel * scale
    }

    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// A numeric point: values for a fixed list of coordinate names.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    names: Arc<[Arc<str>]>,
    values: Vec<f64>,
}

impl Point {
    pub fn new(names: Arc<[Arc<str>]>, values: Vec<f64>) -> Point {
        assert_eq!(names.len(), values.len());
        Point { names, values }
    }

    pub fn from_pairs(pairs: &[(&str, f64)]) -> Point {
        let names: Arc<[Arc<str>]> = pairs.iter().map(|(n, _)| Arc::from(*n)).collect();
        Point::new(names, pairs.iter().map(|(_, v)| *v).collect())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| &**n == name)
            .map(|i| self.values[i])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn names(&self) -> &[Arc<str>] {
        &self.names
    }

    pub fn pairs(&self) -> Vec<(String, f64)> {
        self.names
            .iter()
            .zip(&self.values)
            .map(|(n, v)| (n.to_string(), *v))
            .collect()
    }

    /// Point extended (or overridden) by extra coordinate values.
    pub fn with(&self, extra: &[(Arc<str>, f64)]) -> Point {
        let mut names: Vec<Arc<str>> = self.names.to_vec();
        let mut values = self.values.clone();
        for (n, v) in extra {
            match names.iter().position(|m| m == n) {
                Some(i) => values[i] = *v,
                None => {
                    names.push(n.clone());
                    values.push(*v);
                }
            }
        }
        Point::new(names.into(), values)
    }

    pub fn eval(&self, e: &Expr) -> Result<f64, EvalError> {
        let v = e.eval_f64(&|n: &str| self.get(n))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::Domain(format!("non-finite value at {:?}", self.values)))
        }
    }
}

/// Draws uniform points in the policy's box.
pub fn random_point(rng: &mut ChaCha8Rng, names: &Arc<[Arc<str>]>, low: f64, high: f64) -> Point {
    let values = names.iter().map(|_| rng.gen_range(low..high)).collect();
    Point::new(names.clone(), values)
}

/// Draws a point with small-denominator rational coordinates inside the box.
pub fn random_rational_point(
    rng: &mut ChaCha8Rng,
    n: usize,
    low: f64,
    high: f64,
) -> Vec<Rational> {
    (0..n)
        .map(|_| {
            let d: i64 = rng.gen_range(1..=16);
            let lo = (low * d as f64).ceil() as i64;
            let hi = (high * d as f64).floor() as i64;
            let k = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
            Rational::new(BigInt::from(k), BigInt::from(d))
        })
        .collect()
}

/// Accepted sample points of a run together with the per-point payload.
#[derive(Debug)]
pub struct SampleRun<T> {
    pub accepted: Vec<(Point, T)>,
    pub discarded: usize,
    /// True when the candidate cap was hit before `count` points were accepted.
    pub exhausted: bool,
}

/// Evaluates `f` on deterministic random points of the box spanned by `names`.
///
/// Candidates are drawn sequentially in batches, evaluated (in parallel when
/// allowed) and accepted in index order; points where `f` errors are counted
/// as singular and replaced, up to the resample cap.
pub fn sample_map<T, F>(policy: &SamplingPolicy, names: &[Arc<str>], stream: u64, f: F) -> SampleRun<T>
where
    T: Send,
    F: Fn(&Point) -> Result<T, EvalError> + Sync + Send,
{
    let names: Arc<[Arc<str>]> = names.iter().cloned().collect();
    let mut rng = policy.rng(stream);
    let want = if names.is_empty() { 1 } else { policy.count.max(1) };
    let cap = want * policy.resample_factor.max(1);
    let mut accepted = Vec::with_capacity(want);
    let mut discarded = 0;
    let mut drawn = 0;
    while accepted.len() < want && drawn < cap {
        let batch = (want - accepted.len()).min(cap - drawn);
        let points: Vec<Point> = (0..batch)
            .map(|_| random_point(&mut rng, &names, policy.low, policy.high))
            .collect();
        drawn += batch;
        let results = par::map_indexed(points.len(), policy.parallel, |i| f(&points[i]));
        for (p, r) in points.into_iter().zip(results) {
            match r {
                Ok(v) if accepted.len() < want => accepted.push((p, v)),
                Ok(_) => {}
                Err(_) => discarded += 1,
            }
        }
    }
    SampleRun {
        exhausted: accepted.len() < want,
        accepted,
        discarded,
    }
}

/// Outcome of an identity test.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ZeroVerdict {
    /// The normalized form is the literal zero.
    Zero,
    /// Every sampled value is zero (exactly, for rational expressions) or within tolerance.
    ProbablyZero { samples: usize, max_residual: f64, exact: bool },
    NonZero { witness: Witness },
    /// Too many sample points were singular to reach a decision.
    Undetermined { accepted: usize, discarded: usize },
}

impl ZeroVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, ZeroVerdict::Zero | ZeroVerdict::ProbablyZero { .. })
    }
}

fn term_scale(e: &Expr, p: &Point) -> Result<(f64, f64), EvalError> {
    let mut value = 0.0;
    let mut scale = 0.0;
    for t in e.terms() {
        let v = p.eval(&t)?;
        value += v;
        scale += v.abs();
    }
    Ok((value, scale))
}

/// Decides whether `e` vanishes identically.
///
/// Rational expressions are evaluated exactly at rational points, so a
/// PROBABLY_ZERO verdict there is exact on every sampled point. Other
/// expressions are evaluated in floating point against
/// `tol_abs + tol_rel * sum |term|`.
pub fn is_zero(e: &Expr, policy: &SamplingPolicy) -> ZeroVerdict {
    let e = normalize(e);
    if e.is_zero_literal() {
        return ZeroVerdict::Zero;
    }
    let names: Vec<Arc<str>> = e.free_symbols().into_iter().collect();
    if e.is_rational_function() {
        return is_zero_exact(&e, &names, policy);
    }
    let run = sample_map(policy, &names, 0, |p| term_scale(&e, p));
    let mut max_residual: f64 = 0.0;
    for (p, (v, scale)) in &run.accepted {
        let r = v.abs();
        max_residual = max_residual.max(r);
        if r > policy.tolerance(*scale) {
            return ZeroVerdict::NonZero {
                witness: Witness::new("nonzero value", p, *v),
            };
        }
    }
    if run.exhausted {
        return ZeroVerdict::Undetermined {
            accepted: run.accepted.len(),
            discarded: run.discarded,
        };
    }
    ZeroVerdict::ProbablyZero {
        samples: run.accepted.len(),
        max_residual,
        exact: false,
    }
}

fn is_zero_exact(e: &Expr, names: &[Arc<str>], policy: &SamplingPolicy) -> ZeroVerdict {
    let mut rng = policy.rng(1);
    let names_arc: Arc<[Arc<str>]> = names.iter().cloned().collect();
    let want = if names.is_empty() { 1 } else { policy.count.max(1) };
    let cap = want * policy.resample_factor.max(1);
    let candidates: Vec<Vec<Rational>> = (0..cap)
        .map(|_| random_rational_point(&mut rng, names.len(), policy.low, policy.high))
        .collect();
    let mut accepted = 0;
    let mut discarded = 0;
    for chunk in candidates.chunks(want) {
        let results = par::map_indexed(chunk.len(), policy.parallel, |i| {
            let q = &chunk[i];
            e.evaluate(&|n: &str| {
                names
                    .iter()
                    .position(|m| &**m == n)
                    .map(|k| Number::Exact(q[k].clone()))
            })
        });
        for (q, r) in chunk.iter().zip(results) {
            match r {
                Ok(v) => {
                    let nonzero = match &v {
                        Number::Exact(x) => !x.is_zero(),
                        Number::Float(x) => x.abs() > policy.tol_abs,
                    };
                    if nonzero {
                        let values = q.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
                        let p = Point::new(names_arc.clone(), values);
                        let value = v.to_f64();
                        return ZeroVerdict::NonZero {
                            witness: Witness::new("nonzero value", &p, value),
                        };
                    }
                    accepted += 1;
                    if accepted == want {
                        return ZeroVerdict::ProbablyZero {
                            samples: accepted,
                            max_residual: 0.0,
                            exact: true,
                        };
                    }
                }
                Err(_) => discarded += 1,
            }
        }
    }
    ZeroVerdict::Undetermined { accepted, discarded }
}
