//! Rank-revealing dense linear algebra at sample points, on top of nalgebra's SVD.
//!
//! Ranks use a threshold relative to the largest singular value; this is what
//! makes subspace comparisons scale-free across fixtures.

use nalgebra::{DMatrix, DVector};

fn max_sv(s: &DVector<f64>) -> f64 {
    s.iter().cloned().fold(0.0, f64::max)
}

/// Numerical rank: singular values above `rel_tol * sigma_max`.
pub fn rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let s = m.clone().singular_values();
    let top = max_sv(&s);
    if top <= f64::MIN_POSITIVE {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * top).count()
}

/// Orthonormal basis (as columns) of the null space of `m`.
pub fn null_space(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let n = m.ncols();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    // Pad with zero rows so the SVD yields a full right basis.
    let rows = m.nrows().max(n);
    let mut padded = DMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let top = max_sv(&svd.singular_values);
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| top <= f64::MIN_POSITIVE || s <= rel_tol * top)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Right singular vectors above the rank threshold, as columns.
fn retained_right(m: &DMatrix<f64>, rel_tol: f64) -> Option<DMatrix<f64>> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return None;
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let top = max_sv(&svd.singular_values);
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| top > f64::MIN_POSITIVE && s > rel_tol * top)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect();
    (!cols.is_empty()).then(|| DMatrix::from_columns(&cols))
}

/// Orthonormal basis (as columns) of the column space of `m`.
///
/// Computed as `m V_r` re-orthonormalized by QR: the left singular vectors
/// nalgebra returns lose accuracy on rank-deficient input with repeated
/// singular values.
pub fn column_basis(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    match retained_right(m, rel_tol) {
        Some(v_r) => {
            let r = v_r.ncols();
            (m * v_r).qr().q().columns(0, r).into_owned()
        }
        None => DMatrix::zeros(m.nrows(), 0),
    }
}

/// Minimum-norm least-squares solution of `a x = b` and the residual norm `|a x - b|`.
///
/// Solved on the retained right singular vectors as `x = V_r (a V_r)^+ b`,
/// with the inner problem done by QR.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>, rel_tol: f64) -> (DVector<f64>, f64) {
    let Some(v_r) = retained_right(a, rel_tol) else {
        return (DVector::zeros(a.ncols()), b.norm());
    };
    let qr = (a * &v_r).qr();
    let y = qr
        .r()
        .solve_upper_triangular(&(qr.q().transpose() * b))
        .unwrap_or_else(|| DVector::zeros(v_r.ncols()));
    let x = v_r * y;
    let r = (a * &x - b).norm();
    (x, r)
}

/// Ranks of `a`, `b` and `[a | b]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpanComparison {
    pub rank_a: usize,
    pub rank_b: usize,
    pub rank_joint: usize,
}

impl SpanComparison {
    pub fn equal(&self) -> bool {
        self.rank_a == self.rank_b && self.rank_a == self.rank_joint
    }

    /// Column space of `a` is contained in that of `b`.
    pub fn a_in_b(&self) -> bool {
        self.rank_joint == self.rank_b
    }
}

/// Mutual-containment comparison of two column spans.
pub fn compare_spans(a: &DMatrix<f64>, b: &DMatrix<f64>, rel_tol: f64) -> SpanComparison {
    assert_eq!(a.nrows(), b.nrows(), "span comparison needs equal ambient dimension");
    let joint = hstack(a, b);
    SpanComparison {
        rank_a: rank(a, rel_tol),
        rank_b: rank(b, rel_tol),
        rank_joint: rank(&joint, rel_tol),
    }
}

pub fn hstack(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    m.view_mut((0, a.ncols()), (b.nrows(), b.ncols())).copy_from(b);
    m
}

pub fn vstack(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.ncols(), b.ncols());
    let mut m = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    m.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    m.view_mut((a.nrows(), 0), (b.nrows(), b.ncols())).copy_from(b);
    m
}
