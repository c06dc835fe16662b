//! Executes planned checks and assembles the report.

use std::time::Instant;

use dirac_jacobi::algebroid::{
    algebroid_differential_2, check_action_iso_with, check_anchor_morphism, check_central_extension,
    check_cocycle, check_jacobi_identity, extract_cocycle, omega_l0_cochain, AlgebroidOnL, Cochain2, Cocycle1,
};
use dirac_jacobi::groupoid::{
    build_action_groupoid, check_beta_forward, check_contact_form, check_groupoid, check_multiplicative_function,
    check_precontact_with, check_presymplectic_with, eta_to_omega, extract_lm, omega_to_eta,
};
use dirac_jacobi::report::{CheckReport, Condition, Residuals, Verdict};
use dirac_jacobi::structures::{
    check_anti_map, check_dirac, check_forward_map, check_involutivity, check_maximal_isotropy, check_same_subbundle,
    FrameSubbundle,
};
use dirac_jacobi::symcalc::{is_zero, normalize, Expr, SamplingPolicy, ZeroVerdict};
use dirac_jacobi::tensor::AlternatingTensor;
use dirac_jacobi::Error;
use serde::Serialize;

use crate::build::{CochainSource, Expect, Plan, PlannedCheck, Task};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
    Error,
}

impl Outcome {
    fn label(self) -> &'static str {
        match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Inconclusive => "INCONCLUSIVE",
            Outcome::Error => "ERROR",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub op: String,
    pub expect: Expect,
    pub verdict: Outcome,
    /// `ZERO` or `PROBABLY_ZERO` for identity checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qualifier: Option<&'static str>,
    pub as_expected: bool,
    pub residuals: Residuals,
    pub conditions: Vec<Condition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
    pub errors: usize,
    pub unexpected: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SamplingSummary {
    pub samples: usize,
    pub low: f64,
    pub high: f64,
    pub tol_abs: f64,
    pub tol_rel: f64,
    pub membership_tol: f64,
    pub rank_tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub scenario: String,
    pub digest: String,
    pub seed: u64,
    pub sampling: SamplingSummary,
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
}

impl Report {
    pub fn all_as_expected(&self) -> bool {
        self.summary.unexpected == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// One line per check and a closing tally.
    pub fn human(&self) -> String {
        let mut out = format!("scenario {} (seed {})\n", self.scenario, self.seed);
        for c in &self.checks {
            let mut line = format!("{:<13} {}", c.verdict.label(), c.name);
            if let Some(q) = c.qualifier {
                line.push_str(&format!(" [{q}]"));
            }
            if c.residuals.count > 0 {
                line.push_str(&format!("  max residual {:.2e}", c.residuals.max));
            }
            match (c.as_expected, c.expect) {
                (true, Expect::Pass) => {}
                (true, e) => line.push_str(&format!("  (expected {})", format!("{e:?}").to_lowercase())),
                (false, e) => line.push_str(&format!("  UNEXPECTED, wanted {}", format!("{e:?}").to_lowercase())),
            }
            out.push_str(&line);
            out.push('\n');
            if !c.as_expected {
                if let Some(e) = &c.error {
                    out.push_str(&format!("    error: {e}\n"));
                }
                for cond in c.conditions.iter().filter(|k| !k.verdict.is_pass()) {
                    out.push_str(&format!("    {} {:?}\n", cond.name, cond.verdict));
                    for w in &cond.witnesses {
                        out.push_str(&format!("      {} at {:?} (value {:.3e})\n", w.label, w.point, w.value));
                    }
                    for n in &cond.notes {
                        out.push_str(&format!("      {n}\n"));
                    }
                }
            }
        }
        let s = &self.summary;
        out.push_str(&format!(
            "{} checks: {} pass, {} fail, {} inconclusive, {} error; {} unexpected\n",
            s.total, s.passed, s.failed, s.inconclusive, s.errors, s.unexpected
        ));
        out
    }
}

struct Evaluation {
    report: CheckReport,
    qualifier: Option<&'static str>,
}

impl From<CheckReport> for Evaluation {
    fn from(report: CheckReport) -> Self {
        Evaluation { report, qualifier: None }
    }
}

fn zero_condition(name: &str, e: &Expr, policy: &SamplingPolicy) -> (Condition, Option<&'static str>) {
    let mut c = Condition::new(name);
    let q = match is_zero(e, policy) {
        ZeroVerdict::Zero => {
            c.residuals.push(0.0);
            Some("ZERO")
        }
        ZeroVerdict::ProbablyZero { max_residual, .. } => {
            c.residuals.push(max_residual);
            Some("PROBABLY_ZERO")
        }
        ZeroVerdict::NonZero { witness } => {
            c.residuals.push(witness.value.abs());
            c.fail_with(witness);
            None
        }
        ZeroVerdict::Undetermined { accepted, discarded } => {
            c.inconclusive(format!("{accepted} usable samples, {discarded} singular"));
            None
        }
    };
    (c, q)
}

/// Slot-by-slot symbolic equality of two frames.
fn identical(a: &FrameSubbundle, b: &FrameSubbundle) -> CheckReport {
    let mut c = Condition::new("symbolic identity");
    if a.chart() != b.chart() || a.ambient() != b.ambient() || a.len() != b.len() || a.rank() != b.rank() {
        c.fail(format!(
            "frames differ in shape: {:?} {:?} x{} vs {:?} {:?} x{}",
            a.chart(),
            a.ambient(),
            a.len(),
            b.chart(),
            b.ambient(),
            b.len()
        ));
        return CheckReport::single(c);
    }
    for (k, (x, y)) in a.generators().iter().zip(b.generators()).enumerate() {
        for (j, (s, t)) in x.slots().iter().zip(y.slots()).enumerate() {
            let same = normalize(&(s - &t)).is_zero_literal();
            c.residuals.push(if same { 0.0 } else { 1.0 });
            if !same {
                c.fail(format!("generator {k}, slot {j}: `{s}` vs `{t}`"));
            }
        }
    }
    CheckReport::single(c)
}

fn flag(name: &str, holds: bool, note: String) -> CheckReport {
    let mut c = Condition::new(name);
    c.residuals.push(if holds { 0.0 } else { 1.0 });
    if !holds {
        c.fail(note);
    }
    CheckReport::single(c)
}

fn evaluate(task: &Task, policy: &SamplingPolicy) -> dirac_jacobi::Result<Evaluation> {
    Ok(match task {
        Task::Zero(e) => {
            let (c, q) = zero_condition("identity", e, policy);
            Evaluation {
                report: CheckReport::single(c),
                qualifier: q,
            }
        }
        Task::Isotropy(l) => check_maximal_isotropy(l, policy)?.into(),
        Task::Involutivity(l) => check_involutivity(l, policy)?.into(),
        Task::Dirac(l) => check_dirac(l, policy)?.into(),
        Task::Same(a, b) => check_same_subbundle(a, b, policy)?.into(),
        Task::Identical(a, b) => identical(a, b).into(),
        Task::Forward(f, a, b) => check_forward_map(f, a, b, policy)?.into(),
        Task::Anti(f, a, b) => check_anti_map(f, a, b, policy)?.into(),
        Task::Mu(phi) => {
            let holds = phi.check_mu(policy)?;
            flag("mu", holds, "mu differs from d ln|phi|".into()).into()
        }
        Task::Nonvanishing(phi) => match phi.check_nonvanishing(policy) {
            Ok(()) => flag("nonvanishing", true, String::new()).into(),
            Err(Error::Vanishing(f)) => flag("nonvanishing", false, format!("`{f}` vanishes or changes sign")).into(),
            Err(e) => return Err(e),
        },
        Task::Cocycle(l, values) => {
            let phi = match values {
                Some(v) => Cocycle1 { values: v.clone() },
                None => extract_cocycle(l)?,
            };
            check_cocycle(&AlgebroidOnL::new(l.clone()), &phi, policy)?.into()
        }
        Task::CocycleExact(l, want) => {
            let got = extract_cocycle(l)?;
            let mut c = Condition::new("exact cocycle");
            if got.values.len() != want.len() {
                c.fail(format!("{} values given, the frame has {}", want.len(), got.values.len()));
            }
            for (i, (g, w)) in got.values.iter().zip(want).enumerate() {
                let same = normalize(&(g - w)).is_zero_literal();
                c.residuals.push(if same { 0.0 } else { 1.0 });
                if !same {
                    c.fail(format!("phi(e{i}) = `{g}`, expected `{w}`"));
                }
            }
            CheckReport::single(c).into()
        }
        Task::Closed(l, source) => {
            let omega = match source {
                CochainSource::OmegaL0 => omega_l0_cochain(l)?,
                CochainSource::Table(t) => Cochain2::from_table(t.clone())?,
            };
            algebroid_differential_2(&AlgebroidOnL::new(l.clone()), &omega, policy)?.into()
        }
        Task::CentralExtension(l) => check_central_extension(l, policy)?.into(),
        Task::ActionIso(l, map) => check_action_iso_with(l, policy, *map)?.into(),
        Task::AnchorMorphism(l) => check_anchor_morphism(&AlgebroidOnL::new(l.clone()), policy)?.into(),
        Task::JacobiIdentity(l) => check_jacobi_identity(&AlgebroidOnL::new(l.clone()), policy)?.into(),
        Task::Groupoid(gm) => check_groupoid(gm, policy)?.into(),
        Task::Multiplicative(gm, f) => check_multiplicative_function(gm, f, policy)?.into(),
        Task::Precontact(gm, pd, kp) => check_precontact_with(gm, pd, policy, *kp)?.into(),
        Task::Presymplectic(gm, ps, kp) => check_presymplectic_with(gm, ps, policy, *kp)?.into(),
        Task::RoundTrip(gm, pd) => {
            let action = build_action_groupoid(gm, &pd.sigma, policy)?;
            let back = omega_to_eta(&action, &eta_to_omega(&action, pd)?, policy)?;
            let mut conds = Vec::new();
            let mut qualifier = Some("ZERO");
            let diff = back.eta.sub(&pd.eta)?;
            let names = pd.eta.chart().coord_names();
            for (i, name) in names.iter().enumerate() {
                let (c, q) = zero_condition(&format!("eta, d{name} component"), &diff.coeff(&[i]), policy);
                qualifier = weaker(qualifier, q);
                conds.push(c);
            }
            let (c, q) = zero_condition("sigma", &(&back.sigma - &pd.sigma), policy);
            conds.push(c);
            Evaluation {
                report: CheckReport::new(conds),
                qualifier: weaker(qualifier, q),
            }
        }
        Task::Homogeneous(gm, ps) => match omega_to_eta(gm, ps, policy) {
            Ok(_) => flag("homogeneity", true, String::new()).into(),
            Err(Error::NotHomogeneous(m)) => flag("homogeneity", false, m).into(),
            Err(e) => return Err(e),
        },
        Task::Extract(gm, pd, expected) => extract_lm(gm, pd, expected.as_ref(), policy)?.report.into(),
        Task::BetaForward(gm, pd) => check_beta_forward(gm, pd, policy)?.into(),
        Task::Contact(gm, pd) => check_contact_form(gm, pd, policy)?.into(),
    })
}

fn weaker(a: Option<&'static str>, b: Option<&'static str>) -> Option<&'static str> {
    match (a, b) {
        (Some("ZERO"), Some("ZERO")) => Some("ZERO"),
        (Some(_), Some(_)) => Some("PROBABLY_ZERO"),
        _ => None,
    }
}

fn run_one(c: &PlannedCheck, policy: &SamplingPolicy, timing: bool) -> CheckResult {
    let start = Instant::now();
    let result = evaluate(&c.task, policy);
    let wall_ms = timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    let (verdict, qualifier, conditions, error) = match result {
        Ok(ev) => {
            let v = match ev.report.verdict {
                Verdict::Pass => Outcome::Pass,
                Verdict::Fail => Outcome::Fail,
                Verdict::Inconclusive => Outcome::Inconclusive,
            };
            let q = if v == Outcome::Pass { ev.qualifier } else { None };
            (v, q, ev.report.conditions, None)
        }
        Err(e) => (Outcome::Error, None, Vec::new(), Some(e.to_string())),
    };
    let mut residuals = Residuals::default();
    for cond in &conditions {
        residuals.merge(&cond.residuals);
    }
    let named_failure = match &c.condition {
        None => true,
        Some(name) => conditions.iter().any(|k| &k.name == name && k.verdict == Verdict::Fail),
    };
    let as_expected = named_failure
        && matches!(
            (c.expect, verdict),
            (Expect::Pass, Outcome::Pass)
                | (Expect::Fail, Outcome::Fail)
                | (Expect::Inconclusive, Outcome::Inconclusive)
                | (Expect::Error, Outcome::Error)
        );
    CheckResult {
        name: c.name.clone(),
        op: c.op.clone(),
        expect: c.expect,
        verdict,
        qualifier,
        as_expected,
        residuals,
        conditions,
        error,
        wall_ms,
    }
}

/// Runs the selected checks of `plan` in scenario order.
pub fn execute(plan: &Plan, digest: String, only: &[String], timing: bool) -> Report {
    let checks: Vec<CheckResult> = plan
        .checks
        .iter()
        .filter(|c| only.is_empty() || only.contains(&c.name))
        .map(|c| run_one(c, &plan.policy, timing))
        .collect();
    let mut summary = Summary {
        total: checks.len(),
        ..Summary::default()
    };
    for c in &checks {
        match c.verdict {
            Outcome::Pass => summary.passed += 1,
            Outcome::Fail => summary.failed += 1,
            Outcome::Inconclusive => summary.inconclusive += 1,
            Outcome::Error => summary.errors += 1,
        }
        if !c.as_expected {
            summary.unexpected += 1;
        }
    }
    let p = &plan.policy;
    Report {
        tool: "djcheck",
        version: env!("CARGO_PKG_VERSION"),
        scenario: plan.name.clone(),
        digest,
        seed: p.seed,
        sampling: SamplingSummary {
            samples: p.count,
            low: p.low,
            high: p.high,
            tol_abs: p.tol_abs,
            tol_rel: p.tol_rel,
            membership_tol: p.membership_tol,
            rank_tol: p.rank_tol,
        },
        checks,
        summary,
    }
}
