//! Sparsification of `f_T` by a shifted supremum over a subset `S ⊆ T`.
//!
//! The pipeline is: estimate the width `ŵ`, build an admissible sequence,
//! chop it into a partition whose parts satisfy `2·diam(P) ≤ δŵ·2^{−h/2}`
//! (with `δ = ε/2`), keep each part's center as its representative and give
//! it the shift `c_P = E sup_{t∈P} g·(t − s_P)`. Working with `δŵ` on `T`
//! itself is the same as normalizing `T` to unit width first, and keeps the
//! support rows bit-identical to rows of `T`.
//!
//! [`center`] then trades the constant shifts for extra Gaussian coordinates.

use log::{debug, warn};

use crate::chaining::AdmissibleSequence;
use crate::error::{invalid, Error, Result};
use crate::mc::{estimate_means, estimate_width, Estimate, McConfig, SupFn};
use crate::quadrature::expected_max_abs_gaussian;
use crate::scalar::Scalar;
use crate::vectors::VectorSet;

/// Substream tags, so that the width and the shifts never share draws.
pub(crate) const TAG_WIDTH: u64 = 0x5749_4454;
pub(crate) const TAG_SHIFTS: u64 = 0x5348_4946;

#[derive(Debug, Clone, PartialEq)]
pub struct ChopPart {
    pub indices: Vec<usize>,
    pub representative: usize,
    /// Level of the sequence the part was taken from.
    pub stage: usize,
    /// Singleton added after the deepest level, for sequences that stop
    /// before reaching singletons.
    pub fallback: bool,
    pub diameter: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChopPartition {
    pub parts: Vec<ChopPart>,
    pub delta: f64,
}

impl ChopPartition {
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Deepest stage at which a part was placed.
    pub fn terminal_stage(&self) -> usize {
        self.parts.iter().map(|p| p.stage).max().unwrap_or(0)
    }

    /// `Σ_P exp(−2δ²/diam(P)²)` over parts of positive diameter.
    pub fn geometric_sum(&self) -> f64 {
        self.parts
            .iter()
            .filter(|p| p.diameter > 0.0)
            .map(|p| (-2.0 * self.delta * self.delta / (p.diameter * p.diameter)).exp())
            .sum()
    }

    /// `δ·(1 + Σ_P exp(−2δ²/diam(P)²))`, the L1 error bound for this
    /// partition with exact shifts.
    pub fn error_bound(&self) -> f64 {
        self.delta * (1.0 + self.geometric_sum())
    }

    pub fn representatives(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.representative).collect()
    }
}

/// Places, stage by stage from level 0, every uncovered part with
/// `2·diam(P) ≤ δ·2^{−h/2}`. Points still uncovered after the deepest level
/// become fallback singletons.
pub fn chop<F: Scalar>(t: &VectorSet<F>, seq: &AdmissibleSequence, delta: f64) -> Result<ChopPartition> {
    if !(delta > 0.0 && delta.is_finite()) {
        return invalid(format!("delta must be positive, got {delta}"));
    }
    seq.validate_for(t)?;
    let mut covered = vec![false; t.len()];
    let mut left = t.len();
    let mut parts = Vec::new();
    for h in 0..=seq.depth() {
        if left == 0 {
            break;
        }
        let limit = delta * 2f64.powf(-(h as f64) / 2.0);
        for part in seq.level(h) {
            if covered[part.indices[0]] {
                continue;
            }
            let d = t.subset_diameter(&part.indices).f64();
            if 2.0 * d <= limit {
                for &i in &part.indices {
                    covered[i] = true;
                }
                left -= part.indices.len();
                parts.push(ChopPart {
                    indices: part.indices.clone(),
                    representative: part.center,
                    stage: h,
                    fallback: false,
                    diameter: d,
                });
            }
        }
    }
    for (i, _) in covered.iter().enumerate().filter(|(_, c)| !**c) {
        parts.push(ChopPart {
            indices: vec![i],
            representative: i,
            stage: seq.depth() + 1,
            fallback: true,
            diameter: 0.0,
        });
    }
    Ok(ChopPartition { parts, delta })
}

/// `x ↦ max_s (s·x + c_s)` over a subset of a source set.
#[derive(Debug, Clone)]
pub struct SparseSup<F> {
    pub dim: usize,
    pub support: VectorSet<F>,
    pub source_indices: Vec<usize>,
    pub shifts: Vec<F>,
    /// Width estimate the shifts were computed against.
    pub width_used: f64,
}

impl<F: Scalar> PartialEq for SparseSup<F> {
    fn eq(&self, o: &Self) -> bool {
        self.dim == o.dim
            && self.support == o.support
            && self.source_indices == o.source_indices
            && self.shifts == o.shifts
            && self.width_used == o.width_used
    }
}

impl<F: Scalar> SparseSup<F> {
    pub fn new(support: VectorSet<F>, source_indices: Vec<usize>, shifts: Vec<F>, width_used: f64) -> Result<Self> {
        if shifts.len() != support.len() || source_indices.len() != support.len() {
            return invalid(format!(
                "{} points, {} shifts, {} source indices",
                support.len(),
                shifts.len(),
                source_indices.len()
            ));
        }
        if shifts.iter().any(|c| !c.is_finite()) || !width_used.is_finite() {
            return invalid("non-finite shift or width");
        }
        Ok(Self { dim: support.dim(), support, source_indices, shifts, width_used })
    }

    /// The trivial sparsifier `S = T` with zero shifts.
    pub fn identity(t: &VectorSet<F>, width_used: f64) -> Self {
        Self {
            dim: t.dim(),
            support: t.clone(),
            source_indices: (0..t.len()).collect(),
            shifts: vec![F::zero(); t.len()],
            width_used,
        }
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn eval(&self, x: &[F]) -> Result<F> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        Ok(self.support.shifted_sup_unchecked(x, &self.shifts))
    }

    pub fn as_sup_fn(&self) -> SupFn<'_, F> {
        SupFn { set: &self.support, shifts: Some(&self.shifts) }
    }

    /// Keeps the first `k` support vectors.
    pub fn truncated(&self, k: usize) -> Result<Self> {
        let idx: Vec<usize> = (0..k.min(self.len())).collect();
        Self::new(
            self.support.subset(&idx)?,
            idx.iter().map(|&i| self.source_indices[i]).collect(),
            idx.iter().map(|&i| self.shifts[i]).collect(),
            self.width_used,
        )
    }
}

impl<'a, F: Scalar> From<&'a SparseSup<F>> for SupFn<'a, F> {
    fn from(sp: &'a SparseSup<F>) -> Self {
        sp.as_sup_fn()
    }
}

/// Per-part shift estimates before clamping.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftEstimates {
    pub raw: Vec<Estimate>,
    /// Shifts that fell outside `[0, cap]` by more than three standard errors.
    pub out_of_range: usize,
}

/// `c_P = E sup_{t∈P} g·(t − s_P)` for every part, from one shared set of
/// draws. Singletons get exactly 0; estimates are clamped to `[0, cap]`.
pub fn compute_shifts<F: Scalar>(
    t: &VectorSet<F>,
    part: &ChopPartition,
    cap: f64,
    cfg: &McConfig,
) -> Result<(Vec<F>, ShiftEstimates)> {
    cfg.validate()?;
    let live: Vec<usize> = (0..part.len()).filter(|&p| part.parts[p].indices.len() > 1).collect();
    let dim = t.active_dim();
    let raw = if live.is_empty() {
        vec![]
    } else {
        estimate_means(dim, live.len(), cfg, |g: &[F], out: &mut [f64]| {
            for (slot, &p) in out.iter_mut().zip(&live) {
                let pt = &part.parts[p];
                let base = t.dot_unchecked(pt.representative, g);
                let top = pt.indices.iter().map(|&i| t.dot_unchecked(i, g)).fold(F::neg_infinity(), F::max);
                *slot = (top - base).f64();
            }
        })
    };
    let mut shifts = vec![F::zero(); part.len()];
    let mut out_of_range = 0;
    for (e, &p) in raw.iter().zip(&live) {
        if e.mean < -3.0 * e.std_err || e.mean > cap + 3.0 * e.std_err {
            out_of_range += 1;
            warn!("shift of part {p} is {} ± {}, outside [0, {cap}]", e.mean, e.std_err);
        }
        shifts[p] = F::of(e.mean.clamp(0.0, cap.max(0.0)));
    }
    Ok((shifts, ShiftEstimates { raw, out_of_range }))
}

/// What [`sparsify_with_report`] did.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsifyReport {
    pub width: Estimate,
    /// Absolute `δ·ŵ` used for chopping.
    pub delta: f64,
    pub n_parts: usize,
    pub terminal_stage: usize,
    /// Lemma bound relative to `ŵ`.
    pub relative_bound: f64,
    pub geometric_sum: f64,
    pub shifts_out_of_range: usize,
}

fn all_identical<F: Scalar>(t: &VectorSet<F>) -> bool {
    (1..t.len()).all(|i| t.row(i) == t.row(0))
}

/// Sparsifier with relative error `eps`: `E|f_T − sparsifier| ≲ eps·ŵ(T)`.
pub fn sparsify<F: Scalar>(t: &VectorSet<F>, eps: f64, cfg: &McConfig) -> Result<SparseSup<F>> {
    sparsify_with_report(t, eps, cfg).map(|(s, _)| s)
}

pub fn sparsify_with_report<F: Scalar>(
    t: &VectorSet<F>,
    eps: f64,
    cfg: &McConfig,
) -> Result<(SparseSup<F>, SparsifyReport)> {
    if !(eps > 0.0 && eps < 0.5) {
        return invalid(format!("eps must lie in (0, 0.5), got {eps}"));
    }
    sparsify_target(t, Target::Relative(eps), cfg)
}

/// Error target of a sparsifier call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Target {
    /// `eps·ŵ`.
    Relative(f64),
    /// An absolute L1 error, turned into `min(η/ŵ, 0.499)·ŵ`.
    Absolute(f64),
}

pub(crate) fn sparsify_target<F: Scalar>(
    t: &VectorSet<F>,
    target: Target,
    cfg: &McConfig,
) -> Result<(SparseSup<F>, SparsifyReport)> {
    cfg.validate()?;
    if all_identical(t) {
        let sp = SparseSup::new(t.subset(&[0])?, vec![0], vec![F::zero()], 0.0)?;
        let report = SparsifyReport {
            width: Estimate::exact(0.0, cfg),
            delta: 0.0,
            n_parts: 1,
            terminal_stage: 0,
            relative_bound: 0.0,
            geometric_sum: 0.0,
            shifts_out_of_range: 0,
        };
        return Ok((sp, report));
    }
    let width = estimate_width(t, &cfg.derive(TAG_WIDTH));
    if width.mean <= 3.0 * width.std_err {
        return Err(Error::DegenerateWidth { mean: width.mean, std_err: width.std_err });
    }
    let eps = match target {
        Target::Relative(e) => e,
        Target::Absolute(eta) => (eta / width.mean).min(0.499),
    };
    let delta = eps / 2.0 * width.mean;
    let seq = AdmissibleSequence::build_default(t);
    let part = chop(t, &seq, delta)?;
    let (shifts, est) = compute_shifts(t, &part, width.mean, &cfg.derive(TAG_SHIFTS))?;
    let reps = part.representatives();
    debug!("sparsify: |T| = {}, |S| = {}, stage {}", t.len(), reps.len(), part.terminal_stage());
    let sp = SparseSup::new(t.subset(&reps)?, reps, shifts, width.mean)?;
    let report = SparsifyReport {
        width,
        delta,
        n_parts: part.len(),
        terminal_stage: part.terminal_stage(),
        relative_bound: part.error_bound() / width.mean,
        geometric_sum: part.geometric_sum(),
        shifts_out_of_range: est.out_of_range,
    };
    Ok((sp, report))
}

/// Knobs of the centering step: `A = min(a_cap, ⌈exp(κ·ŵ/ε)⌉)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterParams {
    pub a_cap: usize,
    pub kappa: f64,
}

impl Default for CenterParams {
    fn default() -> Self {
        Self { a_cap: 1 << 16, kappa: 1.0 }
    }
}

/// Output of [`center`].
#[derive(Debug, Clone)]
pub struct Centered<F> {
    /// Points in `ℝ^{dim + a}`; evaluate without shifts.
    pub set: VectorSet<F>,
    pub a: usize,
    /// `E max_{j≤a} |g_j|`.
    pub mu_a: f64,
    pub capped: bool,
}

impl<F: Scalar> PartialEq for Centered<F> {
    fn eq(&self, o: &Self) -> bool {
        self.set == o.set && self.a == o.a && self.mu_a == o.mu_a && self.capped == o.capped
    }
}

/// Number of auxiliary coordinates for a given width and error.
pub fn aux_count(width: f64, eps: f64, params: &CenterParams) -> (usize, bool) {
    let want = (params.kappa * width / eps).exp().ceil();
    if !want.is_finite() || want > params.a_cap as f64 {
        (params.a_cap, true)
    } else {
        ((want as usize).max(1), false)
    }
}

/// Replaces every shift `c_s` by `c_s·max_j |g_{n+j}|/μ_A`: the points
/// `(s, ±c_s e_j/μ_A)` for `j ≤ A`. Points with zero shift are kept once.
pub fn center<F: Scalar>(sp: &SparseSup<F>, eps: f64, params: &CenterParams) -> Result<Centered<F>> {
    if !(eps > 0.0 && eps < 0.5) {
        return invalid(format!("eps must lie in (0, 0.5), got {eps}"));
    }
    if params.a_cap < 2 {
        return invalid("a_cap must be at least 2");
    }
    if !(params.kappa > 0.0) {
        return invalid("kappa must be positive");
    }
    let (a, capped) = aux_count(sp.width_used, eps, params);
    if capped {
        warn!("auxiliary dimension capped at {a}");
    }
    let mu_a = expected_max_abs_gaussian(a as u64);
    let n = sp.dim;
    let mut rows = Vec::new();
    for (i, &c) in sp.shifts.iter().enumerate() {
        let base = sp.support.nonzeros(i);
        if c == F::zero() {
            rows.push(base);
            continue;
        }
        let alpha = c / F::of(mu_a);
        for j in 0..a {
            for sign in [F::one(), -F::one()] {
                let mut row = base.clone();
                row.push((n + j, sign * alpha));
                rows.push(row);
            }
        }
    }
    let set = VectorSet::from_sparse(n + a, rows)?;
    Ok(Centered { set, a, mu_a, capped })
}
