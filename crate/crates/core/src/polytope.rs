//! Sparse approximation of intersections of narrow halfspaces in Gaussian
//! distance.
//!
//! Uniform width (every offset equal to some `r ≥ 1`): write the body as
//! `{x : f_T(x) ≤ 1}` with `T = normals/r`, sparsify `f_T` with absolute
//! error `η₁`, and threshold the resulting junta at 1.
//!
//! General width: lift each halfspace `t·x ≤ r_t` to `M_t` halfspaces
//! `t·x + y_i/(√2Q) ≤ 2r` over `ℝ^{n+M}`, which all have the same width, run
//! the uniform routine on the lifted body, then pick a cross-section
//! `y ∈ ℝ^M` that is close to the original body.
//!
//! The prescribed `Q` makes `M_t = exp((δ_t Q)²)` astronomically large, so
//! `Q` is lowered until `M_t ≤ m_cap`; the resulting loss is measured rather
//! than assumed.

use std::collections::HashMap;

use log::{debug, warn};

use crate::error::{invalid, Error, Result};
use crate::geometry::Polytope;
use crate::mc::{derive_seed, estimate_gaussian_distance, estimate_volume, gaussian_vector, Estimate, McConfig};
use crate::scalar::Scalar;
use crate::sparsify::{sparsify_target, Target};
use crate::vectors::VectorSet;

const TAG_VOL: u64 = 0x0056_4f4c;
const TAG_Y: u64 = 0x59_59;
const TAG_SECTION: u64 = 0x5345_4354;

/// Parameters of the lifting step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftConfig {
    /// Fixed `Q`; when `None` it comes from the constraints and the cap.
    pub q: Option<f64>,
    /// Upper bound on every block size `M_t`.
    pub m_cap: usize,
    /// Number of sampled cross-sections.
    pub y_candidates: usize,
    /// Variance constant of the maximum of Gaussians.
    pub tau: f64,
}

impl Default for LiftConfig {
    fn default() -> Self {
        Self { q: None, m_cap: 4096, y_candidates: 16, tau: 1.0 }
    }
}

impl LiftConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m_cap == 0 || self.y_candidates == 0 {
            return invalid("m_cap and y_candidates must be positive");
        }
        if let Some(q) = self.q {
            if !(q > 0.0 && q.is_finite()) {
                return invalid(format!("Q must be positive, got {q}"));
            }
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return invalid("tau must be positive");
        }
        Ok(())
    }
}

/// The lifted family `{(x, y) : t·x + y_i/(√2Q) ≤ 2r}`, normalized.
#[derive(Debug, Clone)]
pub struct LiftedPolytope<F> {
    pub base_dim: usize,
    /// `M = Σ_t M_t`.
    pub aux_dim: usize,
    /// `Q` actually used.
    pub q: f64,
    /// `Q` demanded by the two constraints before capping.
    pub q_theory: f64,
    pub capped: bool,
    pub r: f64,
    /// `δ_t = 2r − r_t`.
    pub delta: Vec<f64>,
    /// Realized block sizes.
    pub m: Vec<usize>,
    /// Unit normals over `ℝ^{n+M}`; every offset equals [`Self::width`].
    pub polytope: Polytope<F>,
}

impl<F: Scalar> LiftedPolytope<F> {
    /// `2r/√(1 + 1/(2Q²))`.
    pub fn width(&self) -> f64 {
        lifted_width(self.r, self.q)
    }
}

fn lifted_width(r: f64, q: f64) -> f64 {
    2.0 * r / (1.0 + 1.0 / (2.0 * q * q)).sqrt()
}

#[derive(Debug, Clone)]
pub enum Lift<F> {
    /// Some offset is so negative that `Vol(K) < ε`.
    Empty,
    Lifted(LiftedPolytope<F>),
}

/// Offsets below this make the body trivially ε-small.
pub fn prune_threshold(eps: f64) -> f64 {
    -(2.0 * (2.0 / eps).ln()).sqrt()
}

fn list_parts<F: Scalar>(k: &Polytope<F>) -> Result<(&VectorSet<F>, &[F])> {
    match k {
        Polytope::List { normals, offsets } => Ok((normals, offsets)),
        _ => invalid("expected an explicit list of halfspaces"),
    }
}

/// `Q` from the two constraints, before any cap.
pub fn q_theory(delta: &[f64], eps: f64, tau: f64) -> f64 {
    let n = delta.len() as f64;
    let min_delta = delta.iter().copied().fold(f64::INFINITY, f64::min);
    let first = (3f64.powf(0.25) * (100.0 * tau).sqrt() * (n / eps).powf(0.75) * (1.0 / min_delta).sqrt()).ceil();
    let second = delta.iter().map(|&d| 20.0 / d * (n * d / eps).sqrt()).fold(0.0, f64::max);
    first.max(second)
}

/// Builds the lifted family for `K` with width bound `r`.
pub fn lift<F: Scalar>(k: &Polytope<F>, r: f64, eps: f64, lc: &LiftConfig) -> Result<Lift<F>> {
    lc.validate()?;
    if !(eps > 0.0 && eps < 0.5) {
        return invalid(format!("eps must lie in (0, 0.5), got {eps}"));
    }
    if !(r >= 1.0 && r.is_finite()) {
        return invalid(format!("r must be at least 1, got {r}"));
    }
    let (normals, offsets) = list_parts(k)?;
    if let Some(bad) = offsets.iter().find(|o| o.f64() > r) {
        return invalid(format!("offset {bad} exceeds r = {r}"));
    }
    if offsets.iter().any(|o| o.f64() < prune_threshold(eps)) {
        return Ok(Lift::Empty);
    }
    let delta: Vec<f64> = offsets.iter().map(|o| 2.0 * r - o.f64()).collect();
    let qt = q_theory(&delta, eps, lc.tau);
    let max_delta = delta.iter().copied().fold(0.0, f64::max);
    let q_cap = (lc.m_cap as f64).ln().sqrt() / max_delta;
    let (q, capped) = match lc.q {
        Some(q) => (q, false),
        None if qt > q_cap => (q_cap, true),
        None => (qt, false),
    };
    if capped {
        warn!("Q lowered from {qt:.3e} to {q:.4} so that every M_t ≤ {}", lc.m_cap);
    }
    let m: Vec<usize> = delta
        .iter()
        .map(|&d| {
            let mt = ((d * q).powi(2).exp() * (1.0 + 1e-12)).floor();
            if mt.is_finite() && mt < lc.m_cap as f64 {
                (mt as usize).max(1)
            } else {
                lc.m_cap
            }
        })
        .collect();
    let n = k.dim();
    let aux_dim: usize = m.iter().sum();
    let scale = (1.0 + 1.0 / (2.0 * q * q)).sqrt();
    let aux_coef = F::of(1.0 / (2f64.sqrt() * q * scale));
    let offset = F::of(2.0 * r / scale);
    let mut rows = Vec::with_capacity(aux_dim);
    let mut next = n;
    for (ti, &mt) in m.iter().enumerate() {
        let base: Vec<(usize, F)> = normals.nonzeros(ti).into_iter().map(|(j, v)| (j, v / F::of(scale))).collect();
        for _ in 0..mt {
            let mut row = base.clone();
            row.push((next, aux_coef));
            rows.push(row);
            next += 1;
        }
    }
    let lifted = VectorSet::from_sparse(n + aux_dim, rows)?;
    let polytope = Polytope::from_unit_normals(lifted, vec![offset; aux_dim])?;
    debug!("lift: N = {}, Q = {q:.4}, M = {aux_dim}", delta.len());
    Ok(Lift::Lifted(LiftedPolytope { base_dim: n, aux_dim, q, q_theory: qt, capped, r, delta, m, polytope }))
}

/// What the uniform routine did.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformReport {
    pub volume: Estimate,
    pub eta1: f64,
    pub eta2: f64,
    /// `|S|` of the internal sparsifier (0 when a shortcut fired).
    pub support_size: usize,
    pub shortcut: Option<Shortcut>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shortcut {
    Empty,
    Full,
    /// Width indistinguishable from zero; the body is kept as is.
    Identity,
}

/// `η₂ = ε/(8r(2r + √(2 ln(2/ε))))`.
pub fn eta2(eps: f64, r: f64) -> f64 {
    eps / (8.0 * r * (2.0 * r + (2.0 * (2.0 / eps).ln()).sqrt()))
}

/// Volume shortcut with a three-sigma guard band.
fn volume_shortcut<F: Scalar>(k: &Polytope<F>, eps: f64, cfg: &McConfig) -> (Estimate, Option<Shortcut>) {
    let vol = estimate_volume(k, &cfg.derive(TAG_VOL));
    let s = if vol.mean + 3.0 * vol.std_err <= eps {
        Some(Shortcut::Empty)
    } else if vol.mean - 3.0 * vol.std_err >= 1.0 - eps {
        Some(Shortcut::Full)
    } else {
        None
    };
    (vol, s)
}

fn uniform_inner<F: Scalar>(
    t: &VectorSet<F>,
    r: f64,
    eps: f64,
    cfg: &McConfig,
) -> Result<(Polytope<F>, UniformReport)> {
    let dim = t.dim();
    let ones = vec![F::one(); t.len()];
    let k = Polytope::from_normals(t, &ones)?;
    let (volume, shortcut) = volume_shortcut(&k, eps, cfg);
    let e2 = eta2(eps, r);
    let e1 = e2 * e2 / 4.0;
    let mut report = UniformReport { volume, eta1: e1, eta2: e2, support_size: 0, shortcut };
    match shortcut {
        Some(Shortcut::Empty) => return Ok((Polytope::Empty { dim }, report)),
        Some(Shortcut::Full) => return Ok((Polytope::Full { dim }, report)),
        _ => {}
    }
    let sp = match sparsify_target(t, Target::Absolute(e1), cfg) {
        Ok((sp, _)) => sp,
        Err(Error::DegenerateWidth { .. }) => {
            report.shortcut = Some(Shortcut::Identity);
            report.support_size = t.len();
            return Ok((k, report));
        }
        Err(e) => return Err(e),
    };
    report.support_size = sp.len();
    let offsets: Vec<F> = sp.shifts.iter().map(|&c| F::one() - c).collect();
    Ok((Polytope::from_normals(&sp.support, &offsets)?, report))
}

/// Uniform-width sparsifier for `K = {x : t·x ≤ 1 ∀t}` with `‖t‖ = 1/r`.
pub fn sparsify_uniform<F: Scalar>(t: &VectorSet<F>, r: f64, eps: f64, cfg: &McConfig) -> Result<Polytope<F>> {
    sparsify_uniform_with_report(t, r, eps, cfg).map(|(p, _)| p)
}

pub fn sparsify_uniform_with_report<F: Scalar>(
    t: &VectorSet<F>,
    r: f64,
    eps: f64,
    cfg: &McConfig,
) -> Result<(Polytope<F>, UniformReport)> {
    if !(eps > 0.0 && eps <= 0.5) {
        return invalid(format!("eps must lie in (0, 0.5], got {eps}"));
    }
    if !(r >= 1.0 && r.is_finite()) {
        return invalid(format!("r must be at least 1, got {r}"));
    }
    cfg.validate()?;
    for i in 0..t.len() {
        if (t.norm(i).f64() - 1.0 / r).abs() > 1e-6 {
            return invalid(format!("point {i} does not have norm 1/r"));
        }
    }
    uniform_inner(t, r, eps, cfg)
}

/// Restriction of a lifted polytope to `y`, with parallel halfspaces merged.
fn restrict<F: Scalar>(l: &Polytope<F>, n: usize, y: &[F]) -> Result<Polytope<F>> {
    let (normals, offsets) = match l {
        Polytope::Empty { .. } => return Ok(Polytope::Empty { dim: n }),
        Polytope::Full { .. } => return Ok(Polytope::Full { dim: n }),
        Polytope::List { normals, offsets } => (normals, offsets),
    };
    let mut rows: Vec<Vec<(usize, F)>> = Vec::new();
    let mut offs: Vec<F> = Vec::new();
    let mut seen: HashMap<Vec<(usize, u64)>, usize> = HashMap::new();
    for (i, &o) in offsets.iter().enumerate() {
        let (base, aux): (Vec<_>, Vec<_>) = normals.nonzeros(i).into_iter().partition(|&(j, _)| j < n);
        let rhs = o - aux.iter().map(|&(j, v)| v * y[j - n]).sum::<F>();
        if base.is_empty() {
            if rhs < F::zero() {
                return Ok(Polytope::Empty { dim: n });
            }
            continue;
        }
        let key: Vec<(usize, u64)> = base.iter().map(|&(j, v)| (j, v.f64().to_bits())).collect();
        match seen.get(&key) {
            Some(&k) => offs[k] = offs[k].min(rhs),
            None => {
                seen.insert(key, rows.len());
                rows.push(base);
                offs.push(rhs);
            }
        }
    }
    if rows.is_empty() {
        return Ok(Polytope::Full { dim: n });
    }
    Polytope::from_normals(&VectorSet::from_sparse(n, rows)?, &offs)
}

/// The chosen cross-section and the distance estimates of all candidates.
#[derive(Debug, Clone)]
pub struct CrossSection<F> {
    pub polytope: Polytope<F>,
    pub chosen: usize,
    pub distances: Vec<Estimate>,
}

/// Samples `y_candidates` points `y ∈ ℝ^M`, restricts `L` to each, and keeps
/// the one closest to `K`. All candidates are scored on the same draws.
pub fn choose_cross_section<F: Scalar>(
    l: &Polytope<F>,
    k: &Polytope<F>,
    lc: &LiftConfig,
    cfg: &McConfig,
) -> Result<CrossSection<F>> {
    lc.validate()?;
    cfg.validate()?;
    let n = k.dim();
    if l.dim() < n {
        return Err(Error::DimensionMismatch { expected: n, found: l.dim() });
    }
    let m = l.dim() - n;
    let y_seed = derive_seed(cfg.seed, TAG_Y);
    let score_cfg = cfg.derive(TAG_SECTION);
    let mut best: Option<(usize, Polytope<F>)> = None;
    let mut distances = Vec::with_capacity(lc.y_candidates);
    for c in 0..lc.y_candidates {
        let y: Vec<F> = gaussian_vector(y_seed, c as u64, m);
        let cand = restrict(l, n, &y)?;
        let d = estimate_gaussian_distance(k, &cand, &score_cfg)?;
        if best.is_none() || d.mean < distances.iter().map(|e: &Estimate| e.mean).fold(f64::INFINITY, f64::min) {
            best = Some((c, cand));
        }
        distances.push(d);
    }
    let (chosen, polytope) = best.expect("at least one candidate");
    Ok(CrossSection { polytope, chosen, distances })
}

/// Which route [`sparsify_polytope_with_report`] took.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Route {
    Trivial,
    Pruned,
    VolumeShortcut(Shortcut),
    Uniform,
    Lifted,
}

#[derive(Debug, Clone)]
pub struct PolytopeReport {
    pub route: Route,
    pub r: f64,
    pub volume: Option<Estimate>,
    pub uniform: Option<UniformReport>,
    pub q: Option<f64>,
    pub q_theory: Option<f64>,
    pub q_capped: bool,
    pub aux_dim: usize,
    pub section_distances: Vec<Estimate>,
}

impl PolytopeReport {
    fn new(route: Route, r: f64) -> Self {
        Self {
            route,
            r,
            volume: None,
            uniform: None,
            q: None,
            q_theory: None,
            q_capped: false,
            aux_dim: 0,
            section_distances: vec![],
        }
    }

    /// `|S|` of the internal sparsifier call, when one ran.
    pub fn support_size(&self) -> Option<usize> {
        self.uniform.as_ref().map(|u| u.support_size)
    }
}

pub fn sparsify_polytope<F: Scalar>(k: &Polytope<F>, eps: f64, cfg: &McConfig, lc: &LiftConfig) -> Result<Polytope<F>> {
    sparsify_polytope_with_report(k, eps, cfg, lc).map(|(p, _)| p)
}

/// Sparse approximation of `K` within Gaussian distance `eps` (up to the
/// effect of the `m_cap` limit on the lifted path).
pub fn sparsify_polytope_with_report<F: Scalar>(
    k: &Polytope<F>,
    eps: f64,
    cfg: &McConfig,
    lc: &LiftConfig,
) -> Result<(Polytope<F>, PolytopeReport)> {
    if !(eps > 0.0 && eps < 0.5) {
        return invalid(format!("eps must lie in (0, 0.5), got {eps}"));
    }
    cfg.validate()?;
    lc.validate()?;
    let (normals, offsets) = match k {
        Polytope::List { normals, offsets } => (normals, offsets),
        other => return Ok((other.clone(), PolytopeReport::new(Route::Trivial, 1.0))),
    };
    let dim = k.dim();
    let r = offsets.iter().map(|o| o.f64()).fold(1.0, f64::max);
    if offsets.iter().any(|o| o.f64() < prune_threshold(eps)) {
        return Ok((Polytope::Empty { dim }, PolytopeReport::new(Route::Pruned, r)));
    }
    let (volume, shortcut) = volume_shortcut(k, eps, cfg);
    if let Some(s) = shortcut {
        let mut rep = PolytopeReport::new(Route::VolumeShortcut(s), r);
        rep.volume = Some(volume);
        let out = if s == Shortcut::Empty { Polytope::Empty { dim } } else { Polytope::Full { dim } };
        return Ok((out, rep));
    }
    let r0 = offsets[0];
    if r0.f64() >= 1.0 && offsets.iter().all(|&o| o == r0) {
        let t = normals.scaled(F::one() / r0);
        let (out, u) = uniform_inner(&t, r0.f64(), eps, cfg)?;
        let mut rep = PolytopeReport::new(Route::Uniform, r);
        rep.volume = Some(volume);
        rep.uniform = Some(u);
        return Ok((out, rep));
    }
    let lifted = match lift(k, r, eps, lc)? {
        Lift::Empty => return Ok((Polytope::Empty { dim }, PolytopeReport::new(Route::Pruned, r))),
        Lift::Lifted(l) => l,
    };
    let width = lifted.width();
    let (ln, _) = list_parts(&lifted.polytope)?;
    let t = ln.scaled(F::of(1.0 / width));
    let (l_prime, u) = uniform_inner(&t, width, 188.0 * eps / 300.0, &cfg.derive(TAG_SECTION + 1))?;
    let section = choose_cross_section(&l_prime, k, lc, cfg)?;
    let mut rep = PolytopeReport::new(Route::Lifted, r);
    rep.volume = Some(volume);
    rep.uniform = Some(u);
    rep.q = Some(lifted.q);
    rep.q_theory = Some(lifted.q_theory);
    rep.q_capped = lifted.capped;
    rep.aux_dim = lifted.aux_dim;
    rep.section_distances = section.distances;
    Ok((section.polytope, rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Halfspace;
    use crate::quadrature::normal_cdf;

    fn poly(dim: usize, hs: &[(&[f64], f64)]) -> Polytope<f64> {
        Polytope::from_halfspaces(dim, hs.iter().map(|(n, o)| Halfspace::new(n.to_vec(), *o).unwrap()).collect())
            .unwrap()
    }

    #[test]
    fn eta_schedule() {
        let e2 = eta2(0.2, 1.0);
        let expect = 0.2 / (8.0 * (2.0 + (2.0 * 10f64.ln()).sqrt()));
        assert!((e2 - expect).abs() < 1e-15);
        assert!((prune_threshold(0.1) + (2.0 * 20f64.ln()).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn single_halfspace_is_kept() {
        let k = poly(2, &[(&[1.0, 0.0], 1.0)]);
        let cfg = McConfig::new(20_000, 2);
        // Vol = Φ(1) ≈ 0.84 < 1 − ε
        let (out, rep) = sparsify_polytope_with_report(&k, 0.1, &cfg, &LiftConfig::default()).unwrap();
        assert_eq!(rep.route, Route::Uniform);
        assert_eq!(out.len(), 1);
        assert_eq!(out.halfspaces()[0].normal(), &[1.0, 0.0]);
        assert_eq!(out.offsets(), &[1.0]);
        assert_eq!(estimate_gaussian_distance(&k, &out, &cfg).unwrap().mean, 0.0);
    }

    #[test]
    fn tiny_volume_becomes_empty() {
        // x₁ ≤ −3 and x₂ ≤ −3
        let k = poly(2, &[(&[1.0, 0.0], -3.0), (&[0.0, 1.0], -3.0)]);
        let cfg = McConfig::new(20_000, 2);
        let (out, rep) = sparsify_polytope_with_report(&k, 0.2, &cfg, &LiftConfig::default()).unwrap();
        assert_eq!(out, Polytope::Empty { dim: 2 });
        assert_eq!(rep.route, Route::Pruned);
        let k = poly(2, &[(&[1.0, 0.0], -1.5), (&[-1.0, 0.0], 1.5)]);
        let (out, rep) = sparsify_polytope_with_report(&k, 0.2, &cfg, &LiftConfig::default()).unwrap();
        assert_eq!(out, Polytope::Empty { dim: 2 });
        assert_eq!(rep.route, Route::VolumeShortcut(Shortcut::Empty));
    }

    #[test]
    fn uniform_rejects_bad_input() {
        let t = VectorSet::new(2, vec![vec![1.0, 0.0], vec![0.0, 0.5]]).unwrap();
        let cfg = McConfig::new(1000, 0);
        assert!(sparsify_uniform(&t, 1.0, 0.2, &cfg).is_err());
        let t = VectorSet::new(2, vec![vec![0.5, 0.0]]).unwrap();
        assert!(sparsify_uniform(&t, 0.5, 0.2, &cfg).is_err());
        assert!(sparsify_uniform(&t, 2.0, 0.0, &cfg).is_err());
        assert!(sparsify_uniform(&t, 2.0, 0.2, &cfg).is_ok());
    }

    #[test]
    fn slab_uniform_path() {
        let t = VectorSet::new(2, vec![vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
        let cfg = McConfig::new(50_000, 4);
        let (l, rep) = sparsify_uniform_with_report(&t, 1.0, 0.2, &cfg).unwrap();
        assert!(rep.shortcut.is_none());
        let k = Polytope::from_normals(&t, &[1.0, 1.0]).unwrap();
        let d = estimate_gaussian_distance(&k, &l, &cfg.derive(5)).unwrap();
        assert!(d.mean <= 0.2 + 3.0 * d.std_err);
        assert!(l.len() <= rep.support_size);
    }

    #[test]
    fn lift_single_halfspace() {
        let k = poly(2, &[(&[0.6, 0.8], 1.0)]);
        let lc = LiftConfig { m_cap: 64, ..LiftConfig::default() };
        let Lift::Lifted(l) = lift(&k, 1.0, 0.3, &lc).unwrap() else { panic!("pruned") };
        assert_eq!(l.delta, vec![1.0]);
        assert!(l.capped);
        assert_eq!(l.m, vec![64]);
        assert_eq!(l.aux_dim, 64);
        assert_eq!(l.polytope.dim(), 66);
        for &o in l.polytope.offsets() {
            assert!((o - 2.0 / (1.0 + 1.0 / (2.0 * l.q * l.q)).sqrt()).abs() < 1e-12);
        }
        let (normals, _) = list_parts(&l.polytope).unwrap();
        for i in 0..normals.len() {
            assert!((normals.norm(i) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lift_prunes_and_rejects() {
        let lc = LiftConfig::default();
        let k = poly(1, &[(&[1.0], -10.0)]);
        assert!(matches!(lift(&k, 1.0, 0.1, &lc).unwrap(), Lift::Empty));
        let k = poly(1, &[(&[1.0], 3.0)]);
        assert!(lift(&k, 1.0, 0.1, &lc).is_err());
    }

    #[test]
    fn lift_with_explicit_q() {
        let k = poly(1, &[(&[1.0], 1.0), (&[-1.0], 0.5)]);
        let lc = LiftConfig { q: Some(1.2), m_cap: 1000, ..LiftConfig::default() };
        let Lift::Lifted(l) = lift(&k, 1.0, 0.3, &lc).unwrap() else { panic!() };
        assert_eq!(l.delta, vec![1.0, 1.5]);
        assert_eq!(l.m, vec![(1.44f64).exp().floor() as usize, ((1.8f64).powi(2)).exp().floor() as usize]);
        assert!(!l.capped);
    }

    #[test]
    fn cross_section_of_aux_free_family_is_itself() {
        let k = poly(2, &[(&[1.0, 0.0], 0.5)]);
        let l = poly(5, &[(&[1.0, 0.0, 0.0, 0.0, 0.0], 0.5), (&[0.0, 1.0, 0.0, 0.0, 0.0], 0.7)]);
        let cfg = McConfig::new(10_000, 1);
        let lc = LiftConfig { y_candidates: 4, ..LiftConfig::default() };
        let cs = choose_cross_section(&l, &k, &lc, &cfg).unwrap();
        assert_eq!(cs.chosen, 0);
        let expect = poly(2, &[(&[1.0, 0.0], 0.5), (&[0.0, 1.0], 0.7)]);
        assert_eq!(cs.polytope, expect);
        assert!(cs.distances.iter().all(|d| *d == cs.distances[0]));
        let min = cs.distances.iter().map(|d| d.mean).fold(f64::INFINITY, f64::min);
        assert_eq!(cs.distances[cs.chosen].mean, min);
    }

    #[test]
    fn restriction_merges_parallel_halfspaces() {
        // (x, y₀, y₁): x + y₀ ≤ 1, x + y₁ ≤ 1, y₀ ≤ 5
        let l = poly(3, &[(&[1.0, 1.0, 0.0], 1.0), (&[1.0, 0.0, 1.0], 1.0), (&[0.0, 1.0, 0.0], 5.0)]);
        let p = restrict(&l, 1, &[0.5, -0.25]).unwrap();
        assert_eq!(p.len(), 1);
        assert!((p.offsets()[0] - 0.5).abs() < 1e-12);
        let p = restrict(&l, 1, &[6.0, 0.0]).unwrap();
        assert_eq!(p, Polytope::Empty { dim: 1 });
    }

    #[test]
    fn general_width_slab() {
        // −0.5 ≤ x₁ ≤ 1: offsets differ, so the lifted path runs.
        let k = poly(2, &[(&[1.0, 0.0], 1.0), (&[-1.0, 0.0], 0.5)]);
        let cfg = McConfig::new(20_000, 8);
        let lc = LiftConfig { m_cap: 64, y_candidates: 8, ..LiftConfig::default() };
        let (out, rep) = sparsify_polytope_with_report(&k, 0.3, &cfg, &lc).unwrap();
        assert_eq!(rep.route, Route::Lifted);
        assert!(out.len() <= rep.support_size().unwrap());
        let d = estimate_gaussian_distance(&k, &out, &cfg.derive(99)).unwrap();
        let exact_vol = normal_cdf(1.0) - normal_cdf(-0.5);
        assert!(exact_vol > 0.3);
        assert!(d.mean <= 0.3 + 3.0 * d.std_err, "{d:?}");
    }
}
