//! Verdicts and diagnostic reports shared by every verification routine.

use serde::Serialize;

use crate::symcalc::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    /// The check could not be decided (e.g. frame expansion failed or every
    /// sample point was singular). Never counted as a pass.
    Inconclusive,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }

    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::Pass,
        }
    }
}

/// A sample point (or pair/triple label) where a condition was violated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub label: String,
    pub point: Vec<(String, f64)>,
    pub value: f64,
}

impl Witness {
    pub fn new(label: impl Into<String>, point: &Point, value: f64) -> Witness {
        Witness {
            label: label.into(),
            point: point.pairs(),
            value,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Residuals {
    pub max: f64,
    pub mean: f64,
    pub count: usize,
}

impl Residuals {
    pub fn push(&mut self, r: f64) {
        let r = if r.is_finite() { r } else { f64::MAX };
        self.mean = (self.mean * self.count as f64 + r) / (self.count as f64 + 1.0);
        self.count += 1;
        if r > self.max {
            self.max = r;
        }
    }

    pub fn merge(&mut self, other: &Residuals) {
        if other.count == 0 {
            return;
        }
        let total = self.count + other.count;
        self.mean = (self.mean * self.count as f64 + other.mean * other.count as f64) / total as f64;
        self.count = total;
        self.max = self.max.max(other.max);
    }
}

/// Outcome of one named condition inside a check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub name: String,
    pub verdict: Verdict,
    pub residuals: Residuals,
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
}

const MAX_WITNESSES: usize = 3;

impl Condition {
    pub fn new(name: impl Into<String>) -> Condition {
        Condition {
            name: name.into(),
            verdict: Verdict::Pass,
            residuals: Residuals::default(),
            witnesses: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Records a residual against a threshold; a violation turns the condition into a FAIL.
    pub fn observe(&mut self, residual: f64, threshold: f64, label: impl FnOnce() -> String, point: &Point) {
        self.residuals.push(residual);
        if residual.is_nan() || residual > threshold {
            self.fail_with(Witness::new(label(), point, residual));
        }
    }

    pub fn fail_with(&mut self, w: Witness) {
        self.verdict = self.verdict.and(Verdict::Fail);
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(w);
        }
    }

    pub fn fail(&mut self, note: impl Into<String>) {
        self.verdict = self.verdict.and(Verdict::Fail);
        self.notes.push(note.into());
    }

    /// Marks the condition undecidable at a witness point (never a pass, never a FAIL).
    pub fn inconclusive_with(&mut self, w: Witness) {
        self.verdict = self.verdict.and(Verdict::Inconclusive);
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(w);
        }
    }

    pub fn inconclusive(&mut self, note: impl Into<String>) {
        self.verdict = self.verdict.and(Verdict::Inconclusive);
        self.notes.push(note.into());
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }
}

/// Report of a full check: the conjunction of its conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub conditions: Vec<Condition>,
}

impl CheckReport {
    pub fn new(conditions: Vec<Condition>) -> CheckReport {
        let verdict = conditions
            .iter()
            .fold(Verdict::Pass, |acc, c| acc.and(c.verdict));
        CheckReport { verdict, conditions }
    }

    pub fn single(c: Condition) -> CheckReport {
        CheckReport::new(vec![c])
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }

    pub fn condition(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn max_residual(&self) -> f64 {
        self.conditions
            .iter()
            .map(|c| c.residuals.max)
            .fold(0.0, f64::max)
    }

    pub fn extend(&mut self, other: CheckReport) {
        self.verdict = self.verdict.and(other.verdict);
        self.conditions.extend(other.conditions);
    }
}
