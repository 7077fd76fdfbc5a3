//! Admissible sequences of partitions and the chaining functional
//! `sup_t Σ_h 2^{h/2}·diam(A_h(t))`.
//!
//! Construction is recursive greedy k-center: level `h` has a global budget
//! of `2^{2^h}` parts, split among the level-`h−1` parts in proportion to
//! their cardinality (largest remainder, at least one child each). Inside a
//! parent, farthest-first traversal picks the child centers and every point
//! joins its nearest center.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vectors::VectorSet;

/// One part of a partition: sorted indices into `T` plus a center, which is
/// itself a member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Part {
    pub indices: Vec<usize>,
    pub center: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleSequence {
    n_points: usize,
    levels: Vec<Vec<Part>>,
}

/// `min(2^{2^h}, cap)` without overflow.
pub fn level_budget(h: usize, cap: usize) -> usize {
    if h >= 6 {
        return cap;
    }
    let exp = 1u32 << h;
    if exp >= usize::BITS {
        cap
    } else {
        (1usize << exp).min(cap)
    }
}

/// Smallest `h` with `2^{2^h} ≥ m`, plus one.
pub fn default_depth(m: usize) -> usize {
    let mut h = 0;
    while level_budget(h, usize::MAX) < m {
        h += 1;
    }
    h + 1
}

/// Splits `budget` among parts of the given sizes: every part gets at least
/// one and at most its size, the rest proportionally to size by largest
/// remainder (ties to the lower index).
fn allocate(sizes: &[usize], budget: usize) -> Vec<usize> {
    let mut k = vec![1usize; sizes.len()];
    let mut remaining = budget.saturating_sub(sizes.len());
    while remaining > 0 {
        let eligible: Vec<usize> = (0..sizes.len()).filter(|&i| k[i] < sizes[i]).collect();
        if eligible.is_empty() {
            break;
        }
        let weight: u128 = eligible.iter().map(|&i| sizes[i] as u128).sum();
        let mut given = 0usize;
        let mut rems = Vec::with_capacity(eligible.len());
        for &i in &eligible {
            let num = remaining as u128 * sizes[i] as u128;
            let share = ((num / weight) as usize).min(sizes[i] - k[i]);
            k[i] += share;
            given += share;
            rems.push((num % weight, i));
        }
        let mut left = remaining - given;
        rems.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for &(_, i) in &rems {
            if left == 0 {
                break;
            }
            if k[i] < sizes[i] {
                k[i] += 1;
                left -= 1;
            }
        }
        remaining = left;
    }
    k
}

/// Farthest-first traversal over `indices` (sorted ascending) picking at most
/// `k` centers, then nearest-center assignment. Stops early when every point
/// coincides with a center.
fn farthest_first<F: Scalar>(t: &VectorSet<F>, indices: &[usize], k: usize) -> Vec<Part> {
    let first = indices[0];
    let mut centers = vec![first];
    let mut nearest: Vec<(F, usize)> = indices.iter().map(|&j| (t.sq_dist(first, j), first)).collect();
    while centers.len() < k {
        let mut best: Option<(F, usize)> = None;
        for (pos, &(d, _)) in nearest.iter().enumerate() {
            if best.is_none_or(|(bd, _)| d > bd) {
                best = Some((d, pos));
            }
        }
        let Some((d, pos)) = best else { break };
        if d == F::zero() {
            break;
        }
        let c = indices[pos];
        centers.push(c);
        for (slot, &j) in nearest.iter_mut().zip(indices) {
            let dj = t.sq_dist(c, j);
            if dj < slot.0 || (dj == slot.0 && c < slot.1) {
                *slot = (dj, c);
            }
        }
    }
    centers
        .iter()
        .map(|&c| Part {
            indices: indices.iter().zip(&nearest).filter(|(_, n)| n.1 == c).map(|(&j, _)| j).collect(),
            center: c,
        })
        .collect()
}

impl AdmissibleSequence {
    /// Builds levels `0..=h_max` for `t`. Deterministic given the point order.
    pub fn build<F: Scalar>(t: &VectorSet<F>, h_max: usize) -> Self {
        let m = t.len();
        let mut levels = vec![vec![Part { indices: (0..m).collect(), center: 0 }]];
        for h in 1..=h_max {
            let prev = levels.last().expect("level 0 exists");
            if prev.len() == m {
                levels.push(prev.clone());
                continue;
            }
            let budget = level_budget(h, m).max(prev.len());
            let sizes: Vec<usize> = prev.iter().map(|p| p.indices.len()).collect();
            let alloc = allocate(&sizes, budget);
            let next = prev.iter().zip(alloc).flat_map(|(p, k)| farthest_first(t, &p.indices, k)).collect();
            levels.push(next);
        }
        Self { n_points: m, levels }
    }

    /// Builds with [`default_depth`].
    pub fn build_default<F: Scalar>(t: &VectorSet<F>) -> Self {
        Self::build(t, default_depth(t.len()))
    }

    /// Wraps explicit levels after checking every admissibility condition.
    pub fn from_levels(n_points: usize, levels: Vec<Vec<Part>>) -> Result<Self> {
        let seq = Self { n_points, levels };
        seq.check()?;
        Ok(seq)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Deepest level index `h_max`.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[Vec<Part>] {
        &self.levels
    }

    pub fn level(&self, h: usize) -> &[Part] {
        &self.levels[h]
    }

    /// Whether the deepest level consists of singletons only.
    pub fn reaches_singletons(&self) -> bool {
        self.levels.last().is_some_and(|l| l.len() == self.n_points)
    }

    /// Checks the sequence against a set of `t.len()` points.
    pub fn validate_for<F: Scalar>(&self, t: &VectorSet<F>) -> Result<()> {
        if self.n_points != t.len() {
            return Err(Error::InvalidSequence(format!(
                "sequence covers {} points, set has {}",
                self.n_points,
                t.len()
            )));
        }
        self.check()
    }

    fn check(&self) -> Result<()> {
        let m = self.n_points;
        let bad = |msg: String| Err(Error::InvalidSequence(msg));
        if m == 0 || self.levels.is_empty() {
            return bad("empty sequence".into());
        }
        if self.levels[0].len() != 1 || self.levels[0][0].indices.len() != m {
            return bad("level 0 must be a single part holding every point".into());
        }
        let mut parent_of: Vec<usize> = vec![0; m];
        for (h, level) in self.levels.iter().enumerate() {
            if level.len() > level_budget(h, m) {
                return bad(format!("level {h} has {} parts, budget {}", level.len(), level_budget(h, m)));
            }
            let mut owner = vec![usize::MAX; m];
            for (p, part) in level.iter().enumerate() {
                if part.indices.is_empty() || !part.indices.contains(&part.center) {
                    return bad(format!("level {h} part {p} is empty or its center is not a member"));
                }
                let parent = parent_of[part.indices[0]];
                for &i in &part.indices {
                    if i >= m || owner[i] != usize::MAX {
                        return bad(format!("level {h}: index {i} out of range or repeated"));
                    }
                    if parent_of[i] != parent {
                        return bad(format!("level {h} part {p} straddles two parents"));
                    }
                    owner[i] = p;
                }
            }
            if owner.contains(&usize::MAX) {
                return bad(format!("level {h} does not cover every point"));
            }
            parent_of = owner;
        }
        Ok(())
    }

    /// Diameter of every part at level `h`.
    pub fn part_diameters<F: Scalar>(&self, t: &VectorSet<F>, h: usize) -> Vec<F> {
        self.levels[h].iter().map(|p| t.subset_diameter(&p.indices)).collect()
    }

    pub fn max_part_diameter<F: Scalar>(&self, t: &VectorSet<F>, h: usize) -> F {
        self.part_diameters(t, h).into_iter().fold(F::zero(), F::max)
    }
}

/// `max_t Σ_{h ≤ depth} 2^{h/2}·diam(A_h(t))` for the given sequence.
pub fn gamma2_upper<F: Scalar>(t: &VectorSet<F>, seq: &AdmissibleSequence) -> Result<F> {
    seq.validate_for(t)?;
    let mut sums = vec![0.0f64; t.len()];
    for h in 0..=seq.depth() {
        let weight = 2f64.powf(h as f64 / 2.0);
        for (part, d) in seq.level(h).iter().zip(seq.part_diameters(t, h)) {
            if d == F::zero() {
                continue;
            }
            for &i in &part.indices {
                sums[i] += weight * d.f64();
            }
        }
    }
    Ok(F::of(sums.into_iter().fold(0.0, f64::max)))
}

/// [`gamma2_upper`] with the default greedy sequence.
pub fn gamma2_upper_default<F: Scalar>(t: &VectorSet<F>) -> F {
    let seq = AdmissibleSequence::build_default(t);
    gamma2_upper(t, &seq).expect("a freshly built sequence is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit(dim: usize, i: usize, s: f64) -> Vec<f64> {
        let mut v = vec![0.0; dim];
        v[i] = s;
        v
    }

    #[test]
    fn budgets() {
        assert_eq!(level_budget(0, 100), 2);
        assert_eq!(level_budget(1, 100), 4);
        assert_eq!(level_budget(2, 100), 16);
        assert_eq!(level_budget(3, 1000), 256);
        assert_eq!(level_budget(9, 7), 7);
        assert_eq!(default_depth(1), 1);
        assert_eq!(default_depth(4), 2);
        assert_eq!(default_depth(5), 3);
        assert_eq!(default_depth(1024), 5);
    }

    #[test]
    fn allocation_is_proportional_and_exact() {
        assert_eq!(allocate(&[8, 8], 16), vec![8, 8]);
        assert_eq!(allocate(&[12, 4], 4), vec![3, 1]);
        assert_eq!(allocate(&[1, 1, 10], 4), vec![1, 1, 2]);
        assert_eq!(allocate(&[2, 30], 16), vec![2, 14]);
        let k = allocate(&[5, 7, 3, 9], 13);
        assert_eq!(k.iter().sum::<usize>(), 13);
    }

    #[test]
    fn singleton_set() {
        let t = VectorSet::new(2, vec![vec![1.0, 2.0]]).unwrap();
        let seq = AdmissibleSequence::build(&t, 3);
        for level in seq.levels() {
            assert_eq!(level, &vec![Part { indices: vec![0], center: 0 }]);
        }
        assert_eq!(gamma2_upper(&t, &seq).unwrap(), 0.0);
    }

    #[test]
    fn four_points_split_fully_at_level_one() {
        let t = VectorSet::new(4, (0..4).map(|i| unit(4, i, 1.0)).collect()).unwrap();
        let seq = AdmissibleSequence::build(&t, 1);
        assert_eq!(seq.level(1).len(), 4);
        assert!(seq.level(1).iter().all(|p| p.indices.len() == 1));
    }

    #[test]
    fn separated_clusters_are_not_mixed() {
        // Two clusters of 8 points; cluster diameter 1, distance 100.
        let mut pts = Vec::new();
        for c in [0.0, 100.0] {
            for k in 0..8 {
                let a = k as f64 * std::f64::consts::PI / 4.0;
                pts.push(vec![c + 0.5 * a.cos(), 0.5 * a.sin()]);
            }
        }
        let t = VectorSet::new(2, pts).unwrap();
        let seq = AdmissibleSequence::build(&t, 2);
        for part in seq.level(1) {
            let left = part.indices.iter().filter(|&&i| i < 8).count();
            assert!(left == 0 || left == part.indices.len(), "{part:?}");
        }
        assert!(seq.max_part_diameter(&t, 1) <= 1.0 + 1e-12);
    }

    #[test]
    fn gamma2_of_explicit_sequence() {
        let t = VectorSet::new(1, vec![vec![1.0], vec![-1.0]]).unwrap();
        let seq = AdmissibleSequence::from_levels(
            2,
            vec![
                vec![Part { indices: vec![0, 1], center: 0 }],
                vec![Part { indices: vec![0], center: 0 }, Part { indices: vec![1], center: 1 }],
            ],
        )
        .unwrap();
        assert_eq!(gamma2_upper(&t, &seq).unwrap(), 2.0);
    }

    #[test]
    fn invalid_sequences_are_rejected() {
        let t = VectorSet::new(1, vec![vec![1.0], vec![-1.0], vec![0.5]]).unwrap();
        let two =
            |a: Vec<usize>, b: Vec<usize>| vec![Part { center: a[0], indices: a }, Part { center: b[0], indices: b }];
        let root = vec![Part { indices: vec![0, 1, 2], center: 0 }];
        // missing point
        assert!(AdmissibleSequence::from_levels(3, vec![root.clone(), two(vec![0], vec![1])]).is_err());
        // not a refinement
        let l1 = two(vec![0, 1], vec![2]);
        let l2 = two(vec![0, 2], vec![1]);
        assert!(AdmissibleSequence::from_levels(3, vec![root.clone(), l1, l2]).is_err());
        // root must hold everything
        assert!(AdmissibleSequence::from_levels(3, vec![two(vec![0, 1], vec![2])]).is_err());
        // sequence for another set
        let seq = AdmissibleSequence::build(&t, 2);
        let other = VectorSet::new(1, vec![vec![1.0]]).unwrap();
        assert!(gamma2_upper(&other, &seq).is_err());
    }

    fn arb_set() -> impl Strategy<Value = VectorSet<f64>> {
        (1usize..4, 1usize..40).prop_flat_map(|(dim, m)| {
            prop::collection::vec(prop::collection::vec(-3.0f64..3.0, dim), m)
                .prop_map(move |pts| VectorSet::new(dim, pts).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn built_sequences_are_admissible(t in arb_set(), h in 0usize..5) {
            let seq = AdmissibleSequence::build(&t, h);
            prop_assert!(seq.validate_for(&t).is_ok());
            prop_assert_eq!(seq.depth(), h);
        }

        #[test]
        fn chaining_bounds(t in arb_set(), h in 0usize..4) {
            let seq = AdmissibleSequence::build(&t, h);
            let g = gamma2_upper(&t, &seq).unwrap();
            prop_assert!(g >= t.diameter() * (1.0 - 1e-12));
            for k in 0..h {
                prop_assert!(seq.max_part_diameter(&t, k + 1) <= seq.max_part_diameter(&t, k) * (1.0 + 1e-12));
            }
            let deeper = AdmissibleSequence::build(&t, h + 1);
            let g1 = gamma2_upper(&t, &deeper).unwrap();
            let tail = 2f64.powf((h + 1) as f64 / 2.0) * seq.max_part_diameter(&t, h);
            prop_assert!(g1 <= g + tail + 1e-9);
        }

        #[test]
        fn default_depth_reaches_singletons(t in arb_set()) {
            prop_assert!(AdmissibleSequence::build_default(&t).reaches_singletons());
        }
    }
}
