use std::sync::Arc;

use nalgebra::DMatrix;

use super::{GroupoidModel, PrecontactData};
use crate::error::{Error, Result};
use crate::linalg::{column_basis, null_space};
use crate::report::{CheckReport, Condition, Witness};
use crate::structures::{compare_fibers, construct_l_theta, pushforward_fiber, Ambient, FrameSubbundle};
use crate::symcalc::{EvalError, Point, SamplingPolicy};
use crate::tensor::{exterior_derivative, AlternatingTensor, DifferentialForm};
use crate::verify::sample_into;

/// Points sampled on each beta-fiber.
pub const FIBER_SAMPLES: usize = 5;

/// Pointwise fibers of the extracted structure on the base.
#[derive(Debug, Clone)]
pub struct ExtractedFibers {
    /// Base point and a column basis of the fiber in `T_yM x R x T*_yM x R`.
    pub fibers: Vec<(Point, DMatrix<f64>)>,
    pub report: CheckReport,
}

impl ExtractedFibers {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

/// All `((d beta) X, F) + (xi, G)` with `beta^* xi = i_X d eta + F eta`, `G = -eta(X)`, at `g`.
fn fiber_at(gm: &GroupoidModel, eta: &DifferentialForm, deta: &DifferentialForm, g: &Point, rank_tol: f64) -> std::result::Result<DMatrix<f64>, EvalError> {
    let big = gm.total().dim();
    let n = gm.base().dim();
    let omega = deta.eval_matrix(g)?;
    let e = eta.eval_components(g)?;
    let jb = gm.beta().jacobian_at(g)?;

    // unknowns (X, F, xi, G)
    let cols = big + n + 2;
    let mut a = DMatrix::zeros(big + 1, cols);
    for j in 0..big {
        for i in 0..big {
            a[(j, i)] = -omega[(i, j)];
        }
        a[(j, big)] = -e[j];
        for k in 0..n {
            a[(j, big + 1 + k)] = jb[(k, j)];
        }
        a[(big, j)] = e[j];
    }
    a[(big, cols - 1)] = 1.0;

    let sol = null_space(&a, rank_tol);

    let mut img = DMatrix::zeros(2 * n + 2, sol.ncols());
    for c in 0..sol.ncols() {
        let v = sol.column(c);
        let x = &jb * v.rows(0, big);
        img.view_mut((0, c), (n, 1)).copy_from(&x);
        img[(n, c)] = v[big];
        img.view_mut((n + 1, c), (n, 1)).copy_from(&v.rows(big + 1, n));
        img[(2 * n + 1, c)] = v[cols - 1];
    }
    Ok(column_basis(&img, rank_tol))
}

/// The `E1` pairing matrix on `[X, f, xi, g]`, up to the factor 1/2.
fn pairing_matrix(n: usize) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(2 * n + 2, 2 * n + 2);
    for i in 0..=n {
        p[(i, n + 1 + i)] = 1.0;
        p[(n + 1 + i, i)] = 1.0;
    }
    p
}

/// Extracts the base structure fiber by fiber from a precontact groupoid.
///
/// Each sampled base point `y` is paired with [`FIBER_SAMPLES`] points of
/// `beta^{-1}(y)`; the fiber from the first is the reported one and the rest
/// are compared against it. With `expected`, every fiber is also compared
/// with the frame of `expected` at `y`.
pub fn extract_lm(gm: &GroupoidModel, pd: &PrecontactData, expected: Option<&FrameSubbundle>, policy: &SamplingPolicy) -> Result<ExtractedFibers> {
    let fibers = gm
        .fibers()
        .ok_or_else(|| Error::Model(format!("`{}` has no beta-fiber parametrization", gm.name())))?;
    pd.eta.chart().ensure_same(gm.total())?;
    if let Some(l) = expected {
        l.chart().ensure_same(gm.base())?;
        if l.ambient() != Ambient::E1 {
            return Err(Error::Invalid("the expected structure must be a subbundle of E1".into()));
        }
    }
    let n = gm.base().dim();
    let want = n + 1;
    let deta = exterior_derivative(&pd.eta);
    let params: Vec<Arc<str>> = fibers.source().coords()[n..].to_vec();
    let fiber_names: Arc<[Arc<str>]> = fibers.source().coords().iter().cloned().collect();
    let base_names: Arc<[Arc<str>]> = gm.base().coords().iter().cloned().collect();
    let mut names: Vec<Arc<str>> = base_names.to_vec();
    for k in 0..FIBER_SAMPLES {
        names.extend(params.iter().map(|p| Arc::from(format!("{p}#{k}"))));
    }

    let mut rank_cond = Condition::new("fiber rank");
    let samples = sample_into(&mut rank_cond, policy, &names, 0x31, |p| {
        let v = p.values();
        let y = Point::new(base_names.clone(), v[..n].to_vec());
        let mut per_fiber = Vec::with_capacity(FIBER_SAMPLES);
        for k in 0..FIBER_SAMPLES {
            let start = n + k * params.len();
            let mut fv = v[..n].to_vec();
            fv.extend_from_slice(&v[start..start + params.len()]);
            let g = fibers.apply(&Point::new(fiber_names.clone(), fv))?;
            per_fiber.push(fiber_at(gm, &pd.eta, &deta, &g, policy.rank_tol)?);
        }
        let frame = expected.map(|l| l.frame_at(&y)).transpose()?;
        Ok((y, per_fiber, frame))
    });

    let mut consistency = Condition::new("fiber consistency");
    let mut isotropy = Condition::new("isotropy");
    let mut matches = expected.map(|_| Condition::new("expected structure"));
    let pm = pairing_matrix(n);
    let mut first: Option<(Point, usize)> = None;
    let mut out = Vec::with_capacity(samples.len());
    for (_, (y, per_fiber, frame)) in samples {
        let b = &per_fiber[0];
        let r = b.ncols();
        rank_cond.residuals.push(r.abs_diff(want) as f64);
        if r != want {
            rank_cond.fail_with(Witness::new(format!("fiber rank {r}, expected {want}"), &y, r as f64));
        }
        match &first {
            None => first = Some((y.clone(), r)),
            Some((y0, r0)) if *r0 != r => {
                rank_cond.fail_with(Witness::new(format!("rank jump: {r0} here"), y0, *r0 as f64));
                rank_cond.fail_with(Witness::new(format!("rank jump: {r} here"), &y, r as f64));
            }
            _ => {}
        }
        for other in &per_fiber[1..] {
            compare_fibers(&mut consistency, b, other, policy.rank_tol, &y);
        }
        for f in &per_fiber {
            let defect = f.transpose() * &pm * f;
            let worst = defect.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            isotropy.observe(worst, policy.membership_tol, || "fiber is not isotropic".into(), &y);
        }
        if let (Some(cond), Some(frame)) = (matches.as_mut(), frame.as_ref()) {
            compare_fibers(cond, b, frame, policy.rank_tol, &y);
        }
        out.push((y, b.clone()));
    }

    let mut conds = vec![rank_cond, consistency, isotropy];
    conds.extend(matches);
    Ok(ExtractedFibers {
        fibers: out,
        report: CheckReport::new(conds),
    })
}

/// `beta_*(L_eta)` at sampled `g` against the fiber extracted at `g`.
///
/// `L_eta` is the structure on `G` whose induced Dirac structure on
/// `G x R` is the graph of `d(e^s eta)`.
pub fn check_beta_forward(gm: &GroupoidModel, pd: &PrecontactData, policy: &SamplingPolicy) -> Result<CheckReport> {
    let l_eta = construct_l_theta(&pd.eta)?;
    let deta = exterior_derivative(&pd.eta);
    let beta = gm.beta();
    let mut cond = Condition::new("forward map");
    let samples = sample_into(&mut cond, policy, gm.total().coords(), 0x33, |g| {
        Ok((
            pushforward_fiber(beta, &l_eta, g, policy.rank_tol)?,
            fiber_at(gm, &pd.eta, &deta, g, policy.rank_tol)?,
        ))
    });
    for (g, (push, thm)) in &samples {
        compare_fibers(&mut cond, push, thm, policy.rank_tol, g);
    }
    Ok(CheckReport::single(cond))
}
