//! Candidate Dirac and Dirac-Jacobi structures given by global frames,
//! their verification, and the standard constructions.

mod checks;
mod construct;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::courant::{
    courant_bracket, extended_courant_bracket, pairing_e1, pairing_tm, SectionE1, SectionTM,
};
use crate::error::{Error, Result};
use crate::symcalc::{is_zero, EvalError, Expr, Point, SamplingPolicy, ZeroVerdict};
use crate::tensor::{exterior_derivative, AlternatingTensor, Chart, DifferentialForm};

pub use checks::{
    check_anti_map, check_dirac, check_forward_map, check_involutivity, check_maximal_isotropy,
    check_same_subbundle, compare_fibers, pushforward_fiber,
};
pub use construct::{
    conformal_change, construct_l_jacobi, construct_l_theta, graph_of_bivector, graph_of_two_form,
    induced_dirac_on_mxr, induced_dirac_with_coord, lift_dirac,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Ambient {
    /// `TM + T*M`
    Tm,
    /// `E1(M) = (TM x R) + (T*M x R)`
    E1,
}

/// A subbundle given by an ordered list of generating sections.
///
/// Generators are stored as `E1` sections; in the `Tm` ambient both scalar
/// slots are zero and ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameSubbundle {
    ambient: Ambient,
    chart: Chart,
    generators: Vec<SectionE1>,
    rank: usize,
}

impl FrameSubbundle {
    pub fn from_tm(chart: &Chart, generators: Vec<SectionTM>, rank: usize) -> Result<FrameSubbundle> {
        FrameSubbundle::build(
            Ambient::Tm,
            chart,
            generators.iter().map(SectionE1::from_tm).collect(),
            rank,
        )
    }

    pub fn from_e1(chart: &Chart, generators: Vec<SectionE1>, rank: usize) -> Result<FrameSubbundle> {
        FrameSubbundle::build(Ambient::E1, chart, generators, rank)
    }

    fn build(ambient: Ambient, chart: &Chart, generators: Vec<SectionE1>, rank: usize) -> Result<FrameSubbundle> {
        if generators.len() < rank {
            return Err(Error::Invalid(format!(
                "{} generators cannot span rank {rank}",
                generators.len()
            )));
        }
        for g in &generators {
            chart.ensure_same(g.chart())?;
        }
        Ok(FrameSubbundle {
            ambient,
            chart: chart.clone(),
            generators,
            rank,
        })
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[SectionE1] {
        &self.generators
    }

    pub fn tm_generators(&self) -> Vec<SectionTM> {
        self.generators.iter().map(SectionE1::tm_part).collect()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Rank of a maximally isotropic subbundle of the ambient bundle.
    pub fn maximal_rank(&self) -> usize {
        match self.ambient {
            Ambient::Tm => self.chart.dim(),
            Ambient::E1 => self.chart.dim() + 1,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        2 * self.maximal_rank()
    }

    /// The ambient pairing of two sections.
    pub fn pairing(&self, a: &SectionE1, b: &SectionE1) -> Result<Expr> {
        match self.ambient {
            Ambient::Tm => pairing_tm(&a.tm_part(), &b.tm_part()),
            Ambient::E1 => pairing_e1(a, b),
        }
    }

    /// The ambient bracket: Courant on `TM + T*M`, extended Courant on `E1`.
    pub fn bracket(&self, a: &SectionE1, b: &SectionE1) -> Result<SectionE1> {
        match self.ambient {
            Ambient::Tm => Ok(SectionE1::from_tm(&courant_bracket(&a.tm_part(), &b.tm_part())?)),
            Ambient::E1 => extended_courant_bracket(a, b),
        }
    }

    /// Numeric value of a section as an ambient vector.
    pub fn section_vector(&self, s: &SectionE1, p: &Point) -> std::result::Result<Vec<f64>, EvalError> {
        match self.ambient {
            Ambient::Tm => s.tm_part().eval(p),
            Ambient::E1 => s.eval(p),
        }
    }

    /// The generators at `p` as columns.
    pub fn frame_at(&self, p: &Point) -> std::result::Result<DMatrix<f64>, EvalError> {
        let cols = self
            .generators
            .iter()
            .map(|g| self.section_vector(g, p))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let mut m = DMatrix::zeros(self.ambient_dim(), cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        Ok(m)
    }

    /// The same subbundle with every form slot (and the `g` slot) negated.
    pub fn flip_forms(&self) -> FrameSubbundle {
        let m1 = Expr::int(-1);
        FrameSubbundle {
            generators: self
                .generators
                .iter()
                .map(|s| SectionE1 {
                    x: s.x.clone(),
                    f: s.f.clone(),
                    xi: s.xi.scale(&m1),
                    g: -&s.g,
                })
                .collect(),
            ..self.clone()
        }
    }

    pub fn with_rank(mut self, rank: usize) -> Result<FrameSubbundle> {
        if self.generators.len() < rank {
            return Err(Error::Invalid(format!("{} generators cannot span rank {rank}", self.len())));
        }
        self.rank = rank;
        Ok(self)
    }
}

/// A nowhere-vanishing function together with `mu = d ln|phi| = d phi / phi`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalFactor {
    phi: Expr,
    mu: DifferentialForm,
}

impl ConformalFactor {
    pub fn new(chart: &Chart, phi: Expr) -> Result<ConformalFactor> {
        if phi.is_zero_literal() {
            return Err(Error::Vanishing(phi.to_string()));
        }
        if let Some(s) = phi.free_symbols().iter().find(|s| chart.index_of(s).is_none()) {
            return Err(Error::UnknownSymbol(s.to_string()));
        }
        let inv = Expr::one() / phi.clone();
        let mu = exterior_derivative(&DifferentialForm::scalar(chart, phi.clone())).scale(&inv);
        Ok(ConformalFactor { phi, mu })
    }

    pub fn phi(&self) -> &Expr {
        &self.phi
    }

    pub fn mu(&self) -> &DifferentialForm {
        &self.mu
    }

    pub fn chart(&self) -> &Chart {
        self.mu.chart()
    }

    /// The factor `1/phi`.
    pub fn inverse(&self) -> ConformalFactor {
        ConformalFactor::new(self.chart(), Expr::one() / self.phi.clone())
            .expect("the reciprocal of a valid factor is valid")
    }

    /// The factor `phi * psi`.
    pub fn product(&self, other: &ConformalFactor) -> Result<ConformalFactor> {
        self.chart().ensure_same(other.chart())?;
        ConformalFactor::new(self.chart(), &self.phi * &other.phi)
    }

    /// Checks that `phi` keeps one sign, bounded away from zero, on the sample box.
    pub fn check_nonvanishing(&self, policy: &SamplingPolicy) -> Result<()> {
        let names: Vec<_> = self.chart().coords().to_vec();
        let run = crate::symcalc::sample_map(policy, &names, 0x0f, |p| p.eval(&self.phi));
        let floor = policy.tol_abs.max(1e-12);
        let first = run.accepted.first().map(|(_, v)| v.signum()).unwrap_or(0.0);
        let bad = run.exhausted
            || run.discarded > 0
            || run
                .accepted
                .iter()
                .any(|(_, v)| v.abs() <= floor || v.signum() != first);
        if bad {
            Err(Error::Vanishing(self.phi.to_string()))
        } else {
            Ok(())
        }
    }

    /// Sign of `phi` on the box (after [`ConformalFactor::check_nonvanishing`]).
    fn sign(&self, policy: &SamplingPolicy) -> Result<i64> {
        self.check_nonvanishing(policy)?;
        let names: Vec<_> = self.chart().coords().to_vec();
        let run = crate::symcalc::sample_map(&policy.clone().with_count(1), &names, 0x0f, |p| p.eval(&self.phi));
        Ok(if run.accepted[0].1 > 0.0 { 1 } else { -1 })
    }

    /// Verifies `mu = d ln|phi|`, using `ln(phi)` or `ln(-phi)` by the sign of `phi`.
    pub fn check_mu(&self, policy: &SamplingPolicy) -> Result<bool> {
        let s = self.sign(policy)?;
        let arg = if s > 0 { self.phi.clone() } else { -&self.phi };
        let dln = exterior_derivative(&DifferentialForm::scalar(self.chart(), arg.ln()));
        let diff = dln.sub(&self.mu)?;
        Ok(diff.terms().iter().all(|(_, e)| {
            !matches!(is_zero(e, policy), ZeroVerdict::NonZero { .. } | ZeroVerdict::Undetermined { .. })
        }))
    }
}

#[cfg(test)]
mod tests;
