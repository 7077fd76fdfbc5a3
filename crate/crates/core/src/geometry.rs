//! Halfspaces with unit normals and finite intersections of them.

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;
use crate::vectors::VectorSet;

/// `{x : normal·x ≤ offset}` with `‖normal‖ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace<F> {
    normal: Vec<F>,
    offset: F,
}

impl<F: Scalar> Halfspace<F> {
    /// Normalizes `normal` to unit length and rescales `offset` by the same
    /// factor, so the described set is unchanged.
    pub fn new(normal: Vec<F>, offset: F) -> Result<Self> {
        if normal.iter().any(|x| !x.is_finite()) || !offset.is_finite() {
            return invalid("halfspace has a non-finite entry");
        }
        let norm = normal.iter().map(|&x| x * x).sum::<F>().sqrt();
        if norm == F::zero() {
            return invalid("halfspace normal is zero");
        }
        Ok(Self { normal: normal.into_iter().map(|x| x / norm).collect(), offset: offset / norm })
    }

    pub fn normal(&self) -> &[F] {
        &self.normal
    }

    pub fn offset(&self) -> F {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn contains(&self, x: &[F]) -> bool {
        let dot = self.normal.iter().zip(x).map(|(&a, &b)| a * b).sum::<F>();
        dot <= self.offset
    }
}

/// Intersection of finitely many halfspaces, or one of the two sentinels.
///
/// Normals are held in a [`VectorSet`] so that sparse normals (as in the
/// lifted constructions) stay cheap.
#[derive(Debug, Clone)]
pub enum Polytope<F> {
    /// The empty set.
    Empty {
        dim: usize,
    },
    /// All of `ℝ^dim`.
    Full {
        dim: usize,
    },
    List {
        normals: VectorSet<F>,
        offsets: Vec<F>,
    },
}

impl<F: Scalar> PartialEq for Polytope<F> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Polytope::Empty { dim: a }, Polytope::Empty { dim: b }) => a == b,
            (Polytope::Full { dim: a }, Polytope::Full { dim: b }) => a == b,
            (Polytope::List { normals: n1, offsets: o1 }, Polytope::List { normals: n2, offsets: o2 }) => {
                n1 == n2 && o1 == o2
            }
            _ => false,
        }
    }
}

impl<F: Scalar> Polytope<F> {
    /// Intersection of the given halfspaces; an empty list is `Full`.
    pub fn from_halfspaces(dim: usize, halfspaces: Vec<Halfspace<F>>) -> Result<Self> {
        if dim == 0 {
            return invalid("dimension must be positive");
        }
        if halfspaces.is_empty() {
            return Ok(Polytope::Full { dim });
        }
        if let Some(h) = halfspaces.iter().find(|h| h.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: h.dim() });
        }
        let offsets = halfspaces.iter().map(|h| h.offset).collect();
        let normals = VectorSet::new(dim, halfspaces.into_iter().map(|h| h.normal).collect())?;
        Ok(Polytope::List { normals, offsets })
    }

    /// Builds from normals that are already unit length (checked).
    pub fn from_unit_normals(normals: VectorSet<F>, offsets: Vec<F>) -> Result<Self> {
        if offsets.len() != normals.len() {
            return invalid(format!("{} offsets for {} normals", offsets.len(), normals.len()));
        }
        let tol = F::unit_tolerance();
        for i in 0..normals.len() {
            if (normals.norm(i) - F::one()).abs() > tol {
                return invalid(format!("normal {i} is not unit length"));
            }
        }
        if offsets.iter().any(|o| !o.is_finite()) {
            return invalid("non-finite offset");
        }
        Ok(Polytope::List { normals, offsets })
    }

    /// Builds from arbitrary nonzero normals, rescaling each halfspace to a
    /// unit normal.
    pub fn from_normals(normals: &VectorSet<F>, offsets: &[F]) -> Result<Self> {
        if offsets.len() != normals.len() {
            return invalid(format!("{} offsets for {} normals", offsets.len(), normals.len()));
        }
        let mut rows = Vec::with_capacity(normals.len());
        let mut scaled = Vec::with_capacity(normals.len());
        for (i, &o) in offsets.iter().enumerate() {
            let n = normals.norm(i);
            if n == F::zero() {
                return invalid(format!("normal {i} is zero"));
            }
            rows.push(normals.nonzeros(i).into_iter().map(|(k, v)| (k, v / n)).collect());
            scaled.push(o / n);
        }
        Self::from_unit_normals(VectorSet::from_sparse(normals.dim(), rows)?, scaled)
    }

    pub fn dim(&self) -> usize {
        match self {
            Polytope::Empty { dim } | Polytope::Full { dim } => *dim,
            Polytope::List { normals, .. } => normals.dim(),
        }
    }

    pub fn active_dim(&self) -> usize {
        match self {
            Polytope::List { normals, .. } => normals.active_dim(),
            _ => 0,
        }
    }

    /// Number of halfspaces (0 for the sentinels).
    pub fn len(&self) -> usize {
        match self {
            Polytope::List { offsets, .. } => offsets.len(),
            _ => 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn halfspaces(&self) -> Vec<Halfspace<F>> {
        match self {
            Polytope::List { normals, offsets } => {
                (0..normals.len()).map(|i| Halfspace { normal: normals.point(i), offset: offsets[i] }).collect()
            }
            _ => vec![],
        }
    }

    pub fn offsets(&self) -> &[F] {
        match self {
            Polytope::List { offsets, .. } => offsets,
            _ => &[],
        }
    }

    /// Largest offset, i.e. the geometric width of the listed halfspaces.
    pub fn max_offset(&self) -> Option<F> {
        self.offsets().iter().copied().reduce(F::max)
    }

    pub fn contains(&self, x: &[F]) -> Result<bool> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(self.contains_unchecked(x))
    }

    /// Membership; `x` only needs to cover `active_dim`.
    #[inline]
    pub fn contains_unchecked(&self, x: &[F]) -> bool {
        match self {
            Polytope::Empty { .. } => false,
            Polytope::Full { .. } => true,
            Polytope::List { normals, offsets } => {
                offsets.iter().enumerate().all(|(i, &o)| normals.dot_unchecked(i, x) <= o)
            }
        }
    }

    /// Keeps only the halfspaces with the given indices.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        match self {
            Polytope::List { normals, offsets } => {
                if indices.is_empty() {
                    return Ok(Polytope::Full { dim: normals.dim() });
                }
                let sub = normals.subset(indices)?;
                Ok(Polytope::List { normals: sub, offsets: indices.iter().map(|&i| offsets[i]).collect() })
            }
            other => Ok(other.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halfspace_is_renormalized() {
        let h = Halfspace::new(vec![3.0, 4.0], 10.0).unwrap();
        assert_eq!(h.normal(), &[0.6, 0.8]);
        assert_eq!(h.offset(), 2.0);
        let n: f64 = h.normal().iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((n - 1.0).abs() <= 1e-9);
        assert!(Halfspace::new(vec![0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn membership_is_conjunction() {
        let k = Polytope::from_halfspaces(
            2,
            vec![Halfspace::new(vec![1.0, 0.0], 1.0).unwrap(), Halfspace::new(vec![0.0, 1.0], 1.0).unwrap()],
        )
        .unwrap();
        assert!(k.contains(&[0.5, 0.5]).unwrap());
        assert!(!k.contains(&[1.5, 0.5]).unwrap());
        assert!(!k.contains(&[0.5, 1.5]).unwrap());
        assert!(k.contains(&[0.5]).is_err());
        assert!(!Polytope::<f64>::Empty { dim: 2 }.contains(&[0.0, 0.0]).unwrap());
        assert!(Polytope::<f64>::Full { dim: 2 }.contains(&[9.0, 9.0]).unwrap());
    }

    #[test]
    fn empty_list_is_full() {
        assert_eq!(Polytope::<f64>::from_halfspaces(3, vec![]).unwrap(), Polytope::Full { dim: 3 });
    }

    #[test]
    fn from_normals_rescales() {
        let normals = VectorSet::new(2, vec![vec![2.0, 0.0]]).unwrap();
        let p = Polytope::from_normals(&normals, &[4.0]).unwrap();
        assert_eq!(p.offsets(), &[2.0]);
        assert_eq!(p.halfspaces()[0].normal(), &[1.0, 0.0]);
    }
}
