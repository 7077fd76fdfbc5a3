//! Finite index sets `T ⊂ ℝⁿ` and exact evaluation of `f_T(x) = max_t t·x`.
//!
//! Points are stored row by row. A row whose nonzeros are a small fraction of
//! the dimension is kept as sorted `(index, value)` pairs, otherwise densely.
//! Dense rows are truncated at the set's *active dimension* (one past the
//! largest coordinate any point touches), so zero padding is free and
//! evaluation only reads `x[..active_dim]`.

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Tolerance used when deduplicating points (for example in [`VectorSet::symmetrize`]).
pub const DEDUP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Row<F> {
    Dense(Vec<F>),
    Sparse { idx: Vec<u32>, val: Vec<F> },
}

impl<F: Scalar> Row<F> {
    fn from_pairs(mut pairs: Vec<(usize, F)>, active_dim: usize) -> Self {
        pairs.retain(|&(_, v)| v != F::zero());
        pairs.sort_by_key(|&(i, _)| i);
        if pairs.len() * 4 <= active_dim {
            Row::Sparse {
                idx: pairs.iter().map(|&(i, _)| i as u32).collect(),
                val: pairs.iter().map(|&(_, v)| v).collect(),
            }
        } else {
            let mut dense = vec![F::zero(); active_dim];
            for (i, v) in pairs {
                dense[i] = v;
            }
            Row::Dense(dense)
        }
    }

    #[inline]
    pub(crate) fn dot(&self, x: &[F]) -> F {
        match self {
            Row::Dense(v) => {
                let mut acc = F::zero();
                for (a, b) in v.iter().zip(x) {
                    acc = acc + *a * *b;
                }
                acc
            }
            Row::Sparse { idx, val } => {
                let mut acc = F::zero();
                for (&i, &v) in idx.iter().zip(val) {
                    acc = acc + v * x[i as usize];
                }
                acc
            }
        }
    }

    fn for_each_nonzero(&self, mut f: impl FnMut(usize, F)) {
        match self {
            Row::Dense(v) => v.iter().enumerate().filter(|(_, x)| **x != F::zero()).for_each(|(i, &x)| f(i, x)),
            Row::Sparse { idx, val } => idx.iter().zip(val).for_each(|(&i, &x)| f(i as usize, x)),
        }
    }

    fn pairs(&self) -> Vec<(usize, F)> {
        let mut out = Vec::new();
        self.for_each_nonzero(|i, v| out.push((i, v)));
        out
    }

    fn norm_sq(&self) -> F {
        let mut acc = F::zero();
        self.for_each_nonzero(|_, v| acc = acc + v * v);
        acc
    }

    /// Squared Euclidean distance, computed from coordinate differences
    /// (no `‖a‖² + ‖b‖² − 2a·b` cancellation).
    fn sq_dist(&self, other: &Row<F>) -> F {
        match (self, other) {
            (Row::Dense(a), Row::Dense(b)) => {
                let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
                let mut acc = F::zero();
                for (x, y) in short.iter().zip(long.iter()) {
                    let d = *x - *y;
                    acc = acc + d * d;
                }
                for y in &long[short.len()..] {
                    acc = acc + *y * *y;
                }
                acc
            }
            (Row::Dense(d), s @ Row::Sparse { .. }) | (s @ Row::Sparse { .. }, Row::Dense(d)) => {
                let Row::Sparse { idx, val } = s else { unreachable!() };
                let mut acc = F::zero();
                let mut k = 0;
                for (i, &x) in d.iter().enumerate() {
                    let y = if k < idx.len() && idx[k] as usize == i {
                        k += 1;
                        val[k - 1]
                    } else {
                        F::zero()
                    };
                    let diff = x - y;
                    acc = acc + diff * diff;
                }
                for &y in &val[k..] {
                    acc = acc + y * y;
                }
                acc
            }
            (Row::Sparse { idx: ia, val: va }, Row::Sparse { idx: ib, val: vb }) => {
                let (mut p, mut q) = (0, 0);
                let mut acc = F::zero();
                while p < ia.len() || q < ib.len() {
                    let d = if q >= ib.len() || (p < ia.len() && ia[p] < ib[q]) {
                        p += 1;
                        va[p - 1]
                    } else if p >= ia.len() || ib[q] < ia[p] {
                        q += 1;
                        vb[q - 1]
                    } else {
                        p += 1;
                        q += 1;
                        va[p - 1] - vb[q - 1]
                    };
                    acc = acc + d * d;
                }
                acc
            }
        }
    }

    fn map_values(&self, f: impl Fn(F) -> F) -> Row<F> {
        match self {
            Row::Dense(v) => Row::Dense(v.iter().map(|&x| f(x)).collect()),
            Row::Sparse { idx, val } => Row::Sparse { idx: idx.clone(), val: val.iter().map(|&x| f(x)).collect() },
        }
    }
}

/// A nonempty, ordered, finite set of points in `ℝ^dim`.
///
/// Point order is part of the identity of a set: indices are used for
/// deterministic tie-breaking throughout the crate.
#[derive(Debug, Clone)]
pub struct VectorSet<F> {
    dim: usize,
    active_dim: usize,
    rows: Vec<Row<F>>,
    labels: Option<Vec<String>>,
}

impl<F: Scalar> PartialEq for VectorSet<F> {
    /// Equality of the point lists; labels are ignored.
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.rows == other.rows
    }
}

impl<F: Scalar> VectorSet<F> {
    /// Builds a set from dense points, rejecting empty sets, ragged rows and
    /// non-finite entries.
    pub fn new(dim: usize, points: Vec<Vec<F>>) -> Result<Self> {
        if dim == 0 {
            return invalid("dimension must be positive");
        }
        let mut pairs = Vec::with_capacity(points.len());
        for (k, p) in points.into_iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
            }
            if let Some(bad) = p.iter().position(|x| !x.is_finite()) {
                return invalid(format!("point {k} has a non-finite entry at coordinate {bad}"));
            }
            pairs.push(p.into_iter().enumerate().collect::<Vec<_>>());
        }
        Self::from_pairs(dim, pairs)
    }

    /// Builds a set from sparse points given as `(coordinate, value)` pairs.
    /// Repeated coordinates within one point are rejected.
    pub fn from_sparse(dim: usize, points: Vec<Vec<(usize, F)>>) -> Result<Self> {
        if dim == 0 {
            return invalid("dimension must be positive");
        }
        for (k, p) in points.iter().enumerate() {
            let mut seen: Vec<usize> = p.iter().map(|&(i, _)| i).collect();
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                return invalid(format!("point {k} repeats a coordinate"));
            }
            if let Some(&(i, _)) = p.iter().find(|&&(i, _)| i >= dim) {
                return Err(Error::DimensionMismatch { expected: dim, found: i + 1 });
            }
            if p.iter().any(|(_, v)| !v.is_finite()) {
                return invalid(format!("point {k} has a non-finite entry"));
            }
        }
        Self::from_pairs(dim, points)
    }

    fn from_pairs(dim: usize, points: Vec<Vec<(usize, F)>>) -> Result<Self> {
        if points.is_empty() {
            return invalid("vector set must be nonempty");
        }
        let active_dim = points
            .iter()
            .flat_map(|p| p.iter().filter(|(_, v)| *v != F::zero()).map(|&(i, _)| i + 1))
            .max()
            .unwrap_or(0);
        let rows = points.into_iter().map(|p| Row::from_pairs(p, active_dim)).collect();
        Ok(Self { dim, active_dim, rows, labels: None })
    }

    pub(crate) fn from_rows(dim: usize, rows: Vec<Row<F>>) -> Result<Self> {
        Self::from_pairs(dim, rows.iter().map(Row::pairs).collect())
    }

    /// Attaches opaque per-point labels (one per point).
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return invalid(format!("{} labels for {} points", labels.len(), self.len()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// One past the largest coordinate on which some point is nonzero.
    pub fn active_dim(&self) -> usize {
        self.active_dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub(crate) fn row(&self, i: usize) -> &Row<F> {
        &self.rows[i]
    }

    /// Dense copy of point `i`.
    pub fn point(&self, i: usize) -> Vec<F> {
        let mut out = vec![F::zero(); self.dim];
        self.rows[i].for_each_nonzero(|k, v| out[k] = v);
        out
    }

    pub fn points(&self) -> Vec<Vec<F>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Nonzero `(coordinate, value)` pairs of point `i`, in coordinate order.
    pub fn nonzeros(&self, i: usize) -> Vec<(usize, F)> {
        self.rows[i].pairs()
    }

    /// `t_i · x` without a length check; `x` must cover `active_dim`.
    #[inline]
    pub fn dot_unchecked(&self, i: usize, x: &[F]) -> F {
        self.rows[i].dot(x)
    }

    pub fn norm(&self, i: usize) -> F {
        self.rows[i].norm_sq().sqrt()
    }

    pub fn max_norm(&self) -> F {
        (0..self.len()).map(|i| self.norm(i)).fold(F::zero(), F::max)
    }

    pub fn sq_dist(&self, i: usize, j: usize) -> F {
        self.rows[i].sq_dist(&self.rows[j])
    }

    pub fn dist(&self, i: usize, j: usize) -> F {
        self.rows[i].sq_dist(&self.rows[j]).sqrt()
    }

    /// `max_t t·x` for `x` of length `dim`.
    pub fn eval_sup(&self, x: &[F]) -> Result<F> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        Ok(self.sup_unchecked(x))
    }

    /// `max_t t·x`; `x` only needs to cover `active_dim`.
    #[inline]
    pub fn sup_unchecked(&self, x: &[F]) -> F {
        self.rows.iter().map(|r| r.dot(x)).fold(F::neg_infinity(), F::max)
    }

    /// `max_t (t·x + shift_t)`.
    #[inline]
    pub fn shifted_sup_unchecked(&self, x: &[F], shifts: &[F]) -> F {
        self.rows.iter().zip(shifts).map(|(r, &c)| r.dot(x) + c).fold(F::neg_infinity(), F::max)
    }

    /// Exact Euclidean diameter (all pairs).
    pub fn diameter(&self) -> F {
        let all: Vec<usize> = (0..self.len()).collect();
        self.subset_diameter(&all)
    }

    /// Diameter of the points with the given indices.
    pub fn subset_diameter(&self, indices: &[usize]) -> F {
        let mut best = F::zero();
        for (a, &i) in indices.iter().enumerate() {
            for &j in &indices[a + 1..] {
                best = best.max(self.rows[i].sq_dist(&self.rows[j]));
            }
        }
        best.sqrt()
    }

    /// The points `{α·t}` (labels kept).
    pub fn scaled(&self, alpha: F) -> Self {
        Self {
            dim: self.dim,
            active_dim: if alpha == F::zero() { 0 } else { self.active_dim },
            rows: self
                .rows
                .iter()
                .map(|r| {
                    if alpha == F::zero() {
                        Row::Sparse { idx: vec![], val: vec![] }
                    } else {
                        r.map_values(|v| v * alpha)
                    }
                })
                .collect(),
            labels: self.labels.clone(),
        }
    }

    /// The points with the given indices, in the given order. Rows are copied
    /// bit for bit.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return invalid("subset must be nonempty");
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.len()) {
            return invalid(format!("index {bad} out of range for {} points", self.len()));
        }
        let rows: Vec<Row<F>> = indices.iter().map(|&i| self.rows[i].clone()).collect();
        let mut out = Self::from_rows(self.dim, rows)?;
        if let Some(l) = &self.labels {
            out.labels = Some(indices.iter().map(|&i| l[i].clone()).collect());
        }
        Ok(out)
    }

    /// Embeds the set into `ℝ^(dim + extra)` by appending zero coordinates.
    pub fn padded(&self, extra: usize) -> Self {
        let mut out = self.clone();
        out.dim += extra;
        out
    }

    /// Whether points `i` of `self` and `j` of `other` agree coordinatewise
    /// within `tol`.
    pub(crate) fn close(&self, i: usize, other: &Self, j: usize, tol: F) -> bool {
        self.rows[i].sq_dist(&other.rows[j]) <= tol * tol
    }

    fn close_to_negation(&self, i: usize, j: usize, tol: F) -> bool {
        let neg = self.rows[j].map_values(|v| -v);
        self.rows[i].sq_dist(&neg) <= tol * tol
    }

    /// `T ∪ (−T)`, dropping any point within [`DEDUP_TOL`] of an earlier one.
    /// Order: the original points (deduplicated), then the new negations.
    pub fn symmetrize(&self) -> Self {
        let tol = F::of(DEDUP_TOL);
        let mut rows: Vec<Row<F>> = Vec::with_capacity(2 * self.len());
        let candidates = self.rows.iter().cloned().chain(self.rows.iter().map(|r| r.map_values(|v| -v)));
        for cand in candidates {
            if !rows.iter().any(|r| r.sq_dist(&cand) <= tol * tol) {
                rows.push(cand);
            }
        }
        Self::from_rows(self.dim, rows).expect("symmetrization of a valid set is valid")
    }

    /// Whether every point has its negation in the set (within [`DEDUP_TOL`]).
    pub fn is_symmetric(&self) -> bool {
        let tol = F::of(DEDUP_TOL);
        (0..self.len()).all(|i| (0..self.len()).any(|j| self.close_to_negation(i, j, tol)))
    }
}
