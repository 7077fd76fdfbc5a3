//! Monte Carlo checks of the inequalities the constructions rely on.
//!
//! Every check measures one quantity, compares it with a bound and passes
//! iff `measured ≤ bound + 3·std_err`. Widths used inside a check come from a
//! substream of the check's own seed, never from the object under test.

use crate::chaining::gamma2_upper_default;
use crate::error::{invalid, Error, Result};
use crate::geometry::Polytope;
use crate::mc::{
    estimate_event_prob, estimate_gaussian_distance, estimate_l1_gap, estimate_width, Estimate, McConfig, SupFn,
};
use crate::norm::{multiplicative_failure, JuntaNorm};
use crate::scalar::Scalar;
use crate::sparsify::SparseSup;
use crate::vectors::VectorSet;

const TAG_CHECK_WIDTH: u64 = 0x4357;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub bound: f64,
    pub measured: f64,
    pub std_err: f64,
    pub pass: bool,
    pub n_samples: usize,
    pub seed: u64,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, bound: f64, measured: f64, std_err: f64, cfg: &McConfig) -> Self {
        Self {
            name: name.into(),
            bound,
            measured,
            std_err,
            pass: Self::passes(bound, measured, std_err),
            n_samples: cfg.n_samples,
            seed: cfg.seed,
        }
    }

    pub fn passes(bound: f64, measured: f64, std_err: f64) -> bool {
        measured <= bound + 3.0 * std_err
    }

    fn from_estimate(name: impl Into<String>, bound: f64, e: &Estimate, cfg: &McConfig) -> Self {
        Self::new(name, bound, e.mean, e.std_err, cfg)
    }
}

fn check_width<F: Scalar>(t: &VectorSet<F>, cfg: &McConfig) -> Estimate {
    estimate_width(t, &cfg.derive(TAG_CHECK_WIDTH))
}

/// Subgaussian tail: `Pr[|f_T(g) − ŵ| ≥ ρ] ≤ 2exp(−ρ²/(2 max‖t‖²))`.
pub fn check_tail<F: Scalar>(t: &VectorSet<F>, rho: f64, cfg: &McConfig) -> Result<CheckReport> {
    if !(rho >= 0.0) {
        return invalid(format!("rho must be nonnegative, got {rho}"));
    }
    cfg.validate()?;
    let w = check_width(t, cfg).mean;
    let sigma = t.max_norm().f64();
    let bound = if sigma == 0.0 {
        if rho > 0.0 {
            0.0
        } else {
            2.0
        }
    } else {
        2.0 * (-rho * rho / (2.0 * sigma * sigma)).exp()
    };
    let e = estimate_event_prob(t.active_dim(), cfg, |g: &[F]| (t.sup_unchecked(g).f64() - w).abs() >= rho);
    Ok(CheckReport::from_estimate("tail", bound, &e, cfg))
}

/// Small-ball bound for symmetric sets: `Pr[|f_T(g)| ≤ ε·ŵ] ≤ 10ε`.
pub fn check_anticoncentration<F: Scalar>(t: &VectorSet<F>, eps: f64, cfg: &McConfig) -> Result<CheckReport> {
    if !(eps > 0.0 && eps < 0.5) {
        return invalid(format!("eps must lie in (0, 0.5), got {eps}"));
    }
    cfg.validate()?;
    if !t.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let w = check_width(t, cfg);
    if w.mean <= 3.0 * w.std_err {
        return Err(Error::DegenerateWidth { mean: w.mean, std_err: w.std_err });
    }
    let e = estimate_event_prob(t.active_dim(), cfg, |g: &[F]| t.sup_unchecked(g).f64().abs() <= eps * w.mean);
    Ok(CheckReport::from_estimate("anticoncentration", 10.0 * eps, &e, cfg))
}

/// Anti-concentration for unit vectors: `Pr[|f_T(g) − θ| ≤ ε] ≤ 4ε(1 + ŵ)`.
pub fn check_cck<F: Scalar>(t: &VectorSet<F>, theta: f64, eps: f64, cfg: &McConfig) -> Result<CheckReport> {
    if !(eps > 0.0) {
        return invalid(format!("eps must be positive, got {eps}"));
    }
    cfg.validate()?;
    for i in 0..t.len() {
        if (t.norm(i).f64() - 1.0).abs() > 1e-6 {
            return invalid(format!("point {i} is not a unit vector"));
        }
    }
    let w = check_width(t, cfg).mean;
    let e = estimate_event_prob(t.active_dim(), cfg, |g: &[F]| (t.sup_unchecked(g).f64() - theta).abs() <= eps);
    Ok(CheckReport::from_estimate("cck", 4.0 * eps * (1.0 + w), &e, cfg))
}

/// Relative L1 error of a sparsifier: `E|f_T − sp|/ŵ ≤ ε`.
pub fn check_sparsifier<F: Scalar>(
    t: &VectorSet<F>,
    sp: &SparseSup<F>,
    eps: f64,
    cfg: &McConfig,
) -> Result<CheckReport> {
    if sp.dim != t.dim() {
        return Err(Error::DimensionMismatch { expected: t.dim(), found: sp.dim });
    }
    cfg.validate()?;
    let gap = estimate_l1_gap(SupFn::plain(t), sp.as_sup_fn(), t.dim(), cfg)?;
    if gap.mean == 0.0 && gap.std_err == 0.0 {
        return Ok(CheckReport::new("sparsifier", eps, 0.0, 0.0, cfg));
    }
    let w = check_width(t, cfg);
    if w.mean <= 3.0 * w.std_err {
        return Err(Error::DegenerateWidth { mean: w.mean, std_err: w.std_err });
    }
    Ok(CheckReport::new("sparsifier", eps, gap.mean / w.mean, gap.std_err / w.mean, cfg))
}

/// One side of the chaining sandwich: `ŵ ≤ C·γ₂(T)` for the greedy sequence.
pub fn check_gamma2_sandwich<F: Scalar>(t: &VectorSet<F>, c: f64, cfg: &McConfig) -> Result<CheckReport> {
    if !(c > 0.0) {
        return invalid(format!("C must be positive, got {c}"));
    }
    cfg.validate()?;
    let w = check_width(t, cfg);
    let g = gamma2_upper_default(t).f64();
    Ok(CheckReport::from_estimate("gamma2_sandwich", c * g, &w, cfg))
}

/// `dist_G(K, L) ≤ ε`.
pub fn check_distance<F: Scalar>(k: &Polytope<F>, l: &Polytope<F>, eps: f64, cfg: &McConfig) -> Result<CheckReport> {
    cfg.validate()?;
    let d = estimate_gaussian_distance(k, l, cfg)?;
    Ok(CheckReport::from_estimate("polytope_distance", eps, &d, cfg))
}

/// `Pr[ν(g) ∉ [(1−ε)ψ(g), (1+ε)ψ(g)]] ≤ ε`.
pub fn check_norm<F: Scalar>(t: &VectorSet<F>, psi: &JuntaNorm<F>, eps: f64, cfg: &McConfig) -> Result<CheckReport> {
    let e = multiplicative_failure(t, psi, eps, cfg)?;
    Ok(CheckReport::from_estimate("norm_multiplicative", eps, &e, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::normal_cdf;

    fn set(points: Vec<Vec<f64>>) -> VectorSet<f64> {
        VectorSet::new(points[0].len(), points).unwrap()
    }

    #[test]
    fn tail_examples() {
        let cfg = McConfig::new(50_000, 11);
        let t = set(vec![vec![1.0, 0.0]]);
        let r = check_tail(&t, 0.0, &cfg).unwrap();
        assert_eq!((r.measured, r.bound, r.pass), (1.0, 2.0, true));
        let r = check_tail(&t, 2.0, &cfg).unwrap();
        let exact = 2.0 * (1.0 - normal_cdf(2.0));
        assert!((r.measured - exact).abs() <= 4.0 * r.std_err + 1e-3, "{r:?}");
        assert!((r.bound - 2.0 * (-2f64).exp()).abs() < 1e-15);
        assert!(r.pass);
        assert!(check_tail(&t, -1.0, &cfg).is_err());
    }

    #[test]
    fn anticoncentration_examples() {
        let cfg = McConfig::new(50_000, 12);
        let t = set(vec![vec![1.0], vec![-1.0]]);
        let r = check_anticoncentration(&t, 0.1, &cfg).unwrap();
        let exact = 2.0 * normal_cdf(0.1 * (2.0 / std::f64::consts::PI).sqrt()) - 1.0;
        assert!((r.measured - exact).abs() <= 4.0 * r.std_err + 2e-3, "{r:?}");
        assert!(r.pass);
        assert_eq!(check_anticoncentration(&set(vec![vec![1.0]]), 0.1, &cfg).unwrap_err(), Error::NotSymmetric);
    }

    #[test]
    fn cck_examples() {
        let cfg = McConfig::new(50_000, 13);
        let t = set(vec![vec![1.0, 0.0]]);
        let r = check_cck(&t, 0.0, 0.1, &cfg).unwrap();
        assert!((r.measured - (2.0 * normal_cdf(0.1) - 1.0)).abs() <= 4.0 * r.std_err);
        assert!(r.pass);
        let r = check_cck(&t, 0.0, 10.0, &cfg).unwrap();
        assert!(r.bound > 1.0 && r.pass);
        assert!(check_cck(&set(vec![vec![2.0, 0.0]]), 0.0, 0.1, &cfg).is_err());
    }

    #[test]
    fn exact_copy_passes_sparsifier_check() {
        let cfg = McConfig::new(5_000, 14);
        let t = set(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let r = check_sparsifier(&t, &SparseSup::identity(&t, 1.0), 0.1, &cfg).unwrap();
        assert_eq!((r.measured, r.std_err, r.pass), (0.0, 0.0, true));
    }

    #[test]
    fn sandwich_examples() {
        let cfg = McConfig::new(20_000, 15);
        let r = check_gamma2_sandwich(&set(vec![vec![1.0, 2.0]]), 30.0, &cfg).unwrap();
        assert_eq!(r.bound, 0.0);
        assert!(r.pass);
        let r = check_gamma2_sandwich(&set(vec![vec![1.0], vec![-1.0]]), 30.0, &cfg).unwrap();
        assert_eq!(r.bound, 60.0);
        assert!(r.pass);
    }

    #[test]
    fn reports_are_reproducible() {
        let cfg = McConfig::new(10_000, 16);
        let t = set(vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.3, 0.9]]);
        assert_eq!(check_tail(&t, 1.0, &cfg).unwrap(), check_tail(&t, 1.0, &cfg).unwrap());
    }
}
