use nalgebra::{DMatrix, DVector};

use super::{Ambient, FrameSubbundle};
use crate::error::{Error, Result};
use crate::linalg::{compare_spans, least_squares, null_space, rank, SpanComparison};
use crate::report::{CheckReport, Condition, Witness};
use crate::symcalc::{EvalError, Point, SamplingPolicy};
use crate::tensor::SmoothMap;
use crate::verify::{require_zero, sample_into};

/// Pairwise isotropy of the generators and rank `n` (`TM + T*M`) or `n + 1` (`E1`) at samples.
pub fn check_maximal_isotropy(l: &FrameSubbundle, policy: &SamplingPolicy) -> Result<CheckReport> {
    let mut iso = Condition::new("isotropy");
    let k = l.len();
    for i in 0..k {
        for j in i..k {
            let e = l.pairing(&l.generators[i], &l.generators[j])?;
            require_zero(&mut iso, &e, policy, &format!("pairing of generators ({i},{j})"));
        }
    }

    let mut rk = Condition::new("rank");
    let want = l.maximal_rank();
    if l.rank() != want {
        rk.fail(format!("declared rank {} but a maximally isotropic subbundle has rank {want}", l.rank()));
    }
    let samples = sample_into(&mut rk, policy, l.chart().coords(), 0x11, |p| {
        Ok(rank(&l.frame_at(p)?, policy.rank_tol))
    });
    for (p, r) in &samples {
        rk.residuals.push((*r as f64 - want as f64).abs());
        if *r != want {
            rk.fail_with(Witness::new(format!("frame rank {r}, expected {want}"), p, *r as f64));
        }
    }
    Ok(CheckReport::new(vec![iso, rk]))
}

/// Membership of every generator bracket in the generator span at samples.
///
/// On `TM + T*M` all ordered pairs are tested since the Courant bracket is
/// not skew; on `E1` the pairs `i < j` suffice.
pub fn check_involutivity(l: &FrameSubbundle, policy: &SamplingPolicy) -> Result<CheckReport> {
    let k = l.len();
    let pairs: Vec<(usize, usize)> = match l.ambient() {
        Ambient::Tm => (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).collect(),
        Ambient::E1 => (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect(),
    };
    let brackets = pairs
        .iter()
        .map(|&(i, j)| l.bracket(&l.generators[i], &l.generators[j]))
        .collect::<Result<Vec<_>>>()?;

    let mut cond = Condition::new("involutivity");
    let samples = sample_into(&mut cond, policy, l.chart().coords(), 0x12, |p| {
        let a = l.frame_at(p)?;
        brackets
            .iter()
            .map(|b| {
                let v = DVector::from_vec(l.section_vector(b, p)?);
                let (_, r) = least_squares(&a, &v, policy.rank_tol);
                Ok((r, v.norm()))
            })
            .collect::<std::result::Result<Vec<_>, EvalError>>()
    });
    for (p, rs) in &samples {
        for (&(i, j), &(r, size)) in pairs.iter().zip(rs) {
            cond.observe(
                r,
                policy.membership_tol * (1.0 + size),
                || format!("bracket of generators ({i},{j}) leaves the span"),
                p,
            );
        }
    }
    Ok(CheckReport::single(cond))
}

/// Isotropy, rank and involutivity together.
pub fn check_dirac(l: &FrameSubbundle, policy: &SamplingPolicy) -> Result<CheckReport> {
    let mut r = check_maximal_isotropy(l, policy)?;
    r.extend(check_involutivity(l, policy)?);
    Ok(r)
}

/// Records whether two column spans agree at `p`.
pub fn compare_fibers(cond: &mut Condition, a: &DMatrix<f64>, b: &DMatrix<f64>, rank_tol: f64, p: &Point) -> SpanComparison {
    let c = compare_spans(a, b, rank_tol);
    let gap = (c.rank_joint - c.rank_a.min(c.rank_b)) as f64 + c.rank_a.abs_diff(c.rank_b) as f64;
    cond.residuals.push(gap);
    if !c.equal() {
        cond.fail_with(Witness::new(
            format!(
                "spans differ: ranks {}, {} and {} jointly",
                c.rank_a, c.rank_b, c.rank_joint
            ),
            p,
            gap,
        ));
    }
    c
}

/// Pointwise equality of two frames over the same chart and ambient.
pub fn check_same_subbundle(a: &FrameSubbundle, b: &FrameSubbundle, policy: &SamplingPolicy) -> Result<CheckReport> {
    a.chart().ensure_same(b.chart())?;
    if a.ambient() != b.ambient() {
        return Err(Error::Invalid("subbundles live in different ambient bundles".into()));
    }
    let mut cond = Condition::new("span equality");
    let samples = sample_into(&mut cond, policy, a.chart().coords(), 0x13, |p| {
        Ok((a.frame_at(p)?, b.frame_at(p)?))
    });
    for (p, (fa, fb)) in &samples {
        compare_fibers(&mut cond, fa, fb, policy.rank_tol, p);
    }
    Ok(CheckReport::single(cond))
}

fn block(m: &DMatrix<f64>, start: usize, len: usize) -> DMatrix<f64> {
    m.rows(start, len).into_owned()
}

/// The fiber of `F_*(L)` over `F(p)`, as columns in the target ambient.
///
/// Solves for `(c, xi)` with `A_xi c = J^T xi`, where `A` is the frame of
/// `L` at `p` and `J` the Jacobian, and maps each solution to
/// `(J A_X c, A_f c) + (xi, A_g c)`.
pub fn pushforward_fiber(f: &SmoothMap, l: &FrameSubbundle, p: &Point, rank_tol: f64) -> std::result::Result<DMatrix<f64>, EvalError> {
    let n = f.source().dim();
    let m = f.target().dim();
    let a = l.frame_at(p)?;
    let j = f.jacobian_at(p)?;
    let k = a.ncols();
    let e1 = l.ambient() == Ambient::E1;
    let (ax, af, axi, ag) = if e1 {
        (block(&a, 0, n), Some(block(&a, n, 1)), block(&a, n + 1, n), Some(block(&a, 2 * n + 1, 1)))
    } else {
        (block(&a, 0, n), None, block(&a, n, n), None)
    };
    let mut sys = DMatrix::zeros(n, k + m);
    sys.view_mut((0, 0), (n, k)).copy_from(&axi);
    sys.view_mut((0, k), (n, m)).copy_from(&(-j.transpose()));
    let kernel = null_space(&sys, rank_tol);
    let dim = if e1 { 2 * m + 2 } else { 2 * m };
    let mut out = DMatrix::zeros(dim, kernel.ncols());
    for col in 0..kernel.ncols() {
        let v = kernel.column(col);
        let c = v.rows(0, k).into_owned();
        let xi = v.rows(k, m).into_owned();
        let x = &j * (&ax * &c);
        let mut img = Vec::with_capacity(dim);
        img.extend(x.iter());
        if let Some(af) = &af {
            img.push((af * &c)[0]);
        }
        img.extend(xi.iter());
        if let Some(ag) = &ag {
            img.push((ag * &c)[0]);
        }
        out.set_column(col, &DVector::from_vec(img));
    }
    Ok(out)
}

fn forward_map_inner(
    f: &SmoothMap,
    src: &FrameSubbundle,
    dst: &FrameSubbundle,
    policy: &SamplingPolicy,
    name: &str,
) -> Result<CheckReport> {
    f.source().ensure_same(src.chart())?;
    f.target().ensure_same(dst.chart())?;
    if src.ambient() != dst.ambient() {
        return Err(Error::Invalid("source and target structures live in different ambient bundles".into()));
    }
    let want = dst.maximal_rank();
    let mut cond = Condition::new(name);
    let samples = sample_into(&mut cond, policy, f.source().coords(), 0x14, |p| {
        let q = f.apply(p)?;
        Ok((pushforward_fiber(f, src, p, policy.rank_tol)?, dst.frame_at(&q)?))
    });
    for (p, (push, target)) in &samples {
        let c = compare_fibers(&mut cond, push, target, policy.rank_tol, p);
        if c.rank_a != want {
            cond.fail_with(Witness::new(
                format!("pushforward fiber has rank {}, expected {want}", c.rank_a),
                p,
                c.rank_a as f64,
            ));
        }
    }
    Ok(CheckReport::single(cond))
}

/// `L_dst = F_*(L_src)` at sampled source points.
pub fn check_forward_map(f: &SmoothMap, src: &FrameSubbundle, dst: &FrameSubbundle, policy: &SamplingPolicy) -> Result<CheckReport> {
    forward_map_inner(f, src, dst, policy, "forward map")
}

/// Forward-map equality against `dst` with its form slots negated.
pub fn check_anti_map(f: &SmoothMap, src: &FrameSubbundle, dst: &FrameSubbundle, policy: &SamplingPolicy) -> Result<CheckReport> {
    forward_map_inner(f, src, &dst.flip_forms(), policy, "anti map")
}
