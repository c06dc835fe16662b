//! Sampling glue shared by the structure, algebroid and groupoid checks.

use std::sync::Arc;

use crate::report::Condition;
use crate::symcalc::{is_zero, sample_map, EvalError, Expr, Point, SamplingPolicy, ZeroVerdict};

/// Runs `f` at sample points, marking `cond` inconclusive when the resample cap is hit.
pub(crate) fn sample_into<T, F>(
    cond: &mut Condition,
    policy: &SamplingPolicy,
    names: &[Arc<str>],
    stream: u64,
    f: F,
) -> Vec<(Point, T)>
where
    T: Send,
    F: Fn(&Point) -> Result<T, EvalError> + Sync + Send,
{
    let run = sample_map(policy, names, stream, f);
    if run.discarded > 0 {
        cond.note(format!("{} singular sample points discarded", run.discarded));
    }
    if run.exhausted {
        cond.inconclusive(format!(
            "only {} of {} sample points were regular",
            run.accepted.len(),
            policy.count
        ));
    }
    run.accepted
}

/// Records the outcome of an identity test `e == 0` under `label`.
pub(crate) fn require_zero(cond: &mut Condition, e: &Expr, policy: &SamplingPolicy, label: &str) {
    match is_zero(e, policy) {
        ZeroVerdict::Zero => cond.residuals.push(0.0),
        ZeroVerdict::ProbablyZero { max_residual, .. } => cond.residuals.push(max_residual),
        ZeroVerdict::NonZero { mut witness } => {
            cond.residuals.push(witness.value.abs());
            witness.label = label.to_string();
            cond.fail_with(witness);
        }
        ZeroVerdict::Undetermined { accepted, discarded } => cond.inconclusive(format!(
            "{label}: undetermined ({accepted} regular, {discarded} singular points)"
        )),
    }
}

