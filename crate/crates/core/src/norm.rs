//! Junta approximations of norms given by a symmetric dual-ball cloud.
//!
//! A norm is ingested as `ν(x) = max_{t∈T} t·x` for a finite symmetric `T`.
//! [`sparsify_norm`] returns `ψ(x) = max_{s∈S} s·x` with `S` symmetric and
//! small, so that `ψ` only depends on the projection of `x` onto `span(S)`.
//!
//! The construction normalizes to unit width, sparsifies with additive error
//! `ε³/160`, symmetrizes the support with matched shifts, and removes the
//! shifts with the auxiliary-coordinate centering at error `ε³/80`. The
//! auxiliary coordinates are appended after the original `dim`.

use log::debug;

use crate::error::{invalid, Error, Result};
use crate::mc::{derive_seed, estimate_event_prob, estimate_l1_gap, estimate_width, Estimate, McConfig, SupFn};
use crate::scalar::Scalar;
use crate::sparsify::{center, sparsify_with_report, CenterParams, SparseSup, TAG_WIDTH};
use crate::vectors::{VectorSet, DEDUP_TOL};

const TAG_GAP: u64 = 0x0047_4150;

#[derive(Debug, Clone)]
pub struct JuntaNorm<F> {
    /// Dimension of the original space.
    pub dim: usize,
    /// Symmetric set in `ℝ^{dim + ambient_pad}`.
    pub directions: VectorSet<F>,
    pub ambient_pad: usize,
    /// `E|ν − ψ|/ŵ` measured on an independent stream.
    pub measured_gap: Option<Estimate>,
    /// Size of the symmetric shifted support before centering.
    pub support_size: usize,
}

impl<F: Scalar> PartialEq for JuntaNorm<F> {
    fn eq(&self, o: &Self) -> bool {
        self.dim == o.dim
            && self.directions == o.directions
            && self.ambient_pad == o.ambient_pad
            && self.measured_gap == o.measured_gap
            && self.support_size == o.support_size
    }
}

impl<F: Scalar> JuntaNorm<F> {
    pub fn total_dim(&self) -> usize {
        self.dim + self.ambient_pad
    }

    /// `ψ(x)`; `x` has length `dim` (auxiliary part taken as zero) or
    /// `dim + ambient_pad`.
    pub fn eval(&self, x: &[F]) -> Result<F> {
        if x.len() == self.total_dim() || x.len() == self.dim {
            if x.len() >= self.directions.active_dim() {
                return Ok(self.directions.sup_unchecked(x));
            }
            let mut padded = x.to_vec();
            padded.resize(self.directions.active_dim(), F::zero());
            return Ok(self.directions.sup_unchecked(&padded));
        }
        Err(Error::DimensionMismatch { expected: self.dim, found: x.len() })
    }
}

/// `ψ(x)` as a free function.
pub fn eval_norm<F: Scalar>(psi: &JuntaNorm<F>, x: &[F]) -> Result<F> {
    psi.eval(x)
}

/// `T ∪ −T` where `−v` inherits the shift of `v`; coinciding points keep
/// the larger shift, so the result stays symmetric with matched shifts.
fn symmetric_union<F: Scalar>(sp: &SparseSup<F>) -> Result<(VectorSet<F>, Vec<F>)> {
    let tol = F::of(DEDUP_TOL);
    let both = sp.support.symmetrize();
    let neg = sp.support.scaled(-F::one());
    let mut shifts = vec![F::zero(); both.len()];
    for (k, slot) in shifts.iter_mut().enumerate() {
        for i in 0..sp.len() {
            if both.close(k, &sp.support, i, tol) || both.close(k, &neg, i, tol) {
                *slot = slot.max(sp.shifts[i]);
            }
        }
    }
    Ok((both, shifts))
}

/// Junta approximation of `ν = f_T` with multiplicative error `eps` outside
/// an event of probability `eps`.
pub fn sparsify_norm<F: Scalar>(
    t_dual: &VectorSet<F>,
    eps: f64,
    params: &CenterParams,
    symmetrize: bool,
    cfg: &McConfig,
) -> Result<JuntaNorm<F>> {
    if !(eps > 0.0 && eps < 0.5) {
        return invalid(format!("eps must lie in (0, 0.5), got {eps}"));
    }
    cfg.validate()?;
    let t = if t_dual.is_symmetric() {
        t_dual.clone()
    } else if symmetrize {
        t_dual.symmetrize()
    } else {
        return Err(Error::NotSymmetric);
    };
    let width = estimate_width(&t, &cfg.derive(TAG_WIDTH));
    if width.mean <= 3.0 * width.std_err {
        return Err(Error::DegenerateWidth { mean: width.mean, std_err: width.std_err });
    }
    let eps3 = eps * eps * eps;
    let (sp, report) = sparsify_with_report(&t, eps3 / 160.0, cfg)?;
    debug!("norm: |T'| = {} of {}, stage {}", sp.len(), t.len(), report.terminal_stage);
    let (s0, shifts) = symmetric_union(&sp)?;
    let support_size = s0.len();
    let n = t.dim();
    let (directions, pad) = if shifts.iter().all(|&c| c == F::zero()) {
        (s0, 0)
    } else {
        let shifted = SparseSup::new(s0, vec![0; support_size], shifts, sp.width_used)?;
        let abs_eps = sp.width_used * eps3 / 80.0;
        let c = center(&shifted, abs_eps.min(0.499), params)?;
        (c.set, c.a)
    };
    let mut psi = JuntaNorm { dim: n, directions, ambient_pad: pad, measured_gap: None, support_size };
    let gap_cfg = McConfig { seed: derive_seed(cfg.seed, TAG_GAP), ..*cfg };
    let padded = t.padded(pad);
    let gap = estimate_l1_gap(SupFn::plain(&padded), SupFn::plain(&psi.directions), n + pad, &gap_cfg)?;
    psi.measured_gap = Some(Estimate { mean: gap.mean / width.mean, std_err: gap.std_err / width.mean, ..gap });
    Ok(psi)
}

/// `Pr[ν(g) ∉ [(1−ε)ψ(g), (1+ε)ψ(g)]]` with `ν = f_T`.
pub fn multiplicative_failure<F: Scalar>(
    t: &VectorSet<F>,
    psi: &JuntaNorm<F>,
    eps: f64,
    cfg: &McConfig,
) -> Result<Estimate> {
    if t.dim() != psi.dim {
        return Err(Error::DimensionMismatch { expected: psi.dim, found: t.dim() });
    }
    cfg.validate()?;
    let active = t.active_dim().max(psi.directions.active_dim());
    Ok(estimate_event_prob(active, cfg, |g: &[F]| {
        let nu = t.sup_unchecked(g).f64();
        let p = psi.directions.sup_unchecked(g).f64();
        nu < (1.0 - eps) * p || nu > (1.0 + eps) * p
    }))
}

/// Orthonormal basis of `span(S)` by modified Gram–Schmidt; vectors whose
/// residual norm falls below `tol` are dropped.
pub fn span_basis<F: Scalar>(s: &VectorSet<F>, tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for i in 0..s.len() {
        let mut v: Vec<f64> = s.point(i).iter().map(|x| x.f64()).collect();
        for _ in 0..2 {
            for b in &basis {
                let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > tol {
            v.iter_mut().for_each(|x| *x /= n);
            basis.push(v);
        }
    }
    basis
}

/// Component of `z` orthogonal to the span of an orthonormal `basis`.
pub fn orthogonal_part(basis: &[Vec<f64>], z: &[f64]) -> Vec<f64> {
    let mut v = z.to_vec();
    for _ in 0..2 {
        for b in basis {
            let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
        }
    }
    v
}
