//! Benchmark instances: the coordinate set and the shifted polytope from the
//! lower-bound examples, random clouds, clustered sets and regular polygons.

use crate::error::{invalid, Result};
use crate::geometry::Polytope;
use crate::mc::{derive_seed, gaussian_vector, McConfig};
use crate::norm::sparsify_norm;
use crate::polytope::{sparsify_polytope, LiftConfig};
use crate::quadrature::expected_max_gaussian;
use crate::scalar::Scalar;
use crate::sparsify::{sparsify, CenterParams};
use crate::vectors::VectorSet;
use crate::verify::{
    check_anticoncentration, check_cck, check_distance, check_gamma2_sandwich, check_norm, check_sparsifier,
    check_tail, CheckReport,
};

/// `a(n) = E[max of n iid N(0,1)]`.
pub fn a_n(n: u64) -> f64 {
    expected_max_gaussian(n)
}

/// `{e_i/a(n)}`, a set of Gaussian width 1.
pub fn gen_coordinate_example<F: Scalar>(n: usize) -> Result<VectorSet<F>> {
    if n < 2 {
        return invalid("n must be at least 2");
    }
    let v = F::of(1.0 / a_n(n as u64));
    VectorSet::from_sparse(n, (0..n).map(|i| vec![(i, v)]).collect())
}

/// `{e_i}`, the same set with unit vectors.
pub fn gen_unit_coordinates<F: Scalar>(n: usize) -> Result<VectorSet<F>> {
    if n < 1 {
        return invalid("n must be positive");
    }
    VectorSet::from_sparse(n, (0..n).map(|i| vec![(i, F::one())]).collect())
}

/// The `n` halfspaces `x₀ + x_i/a(n) ≤ √(1 + 1/a(n)²)` over `ℝ^{n+1}`
/// (coordinate 0 is `x₀`), with unit normals and offset exactly 1.
pub fn gen_shifted_polytope<F: Scalar>(n: usize) -> Result<Polytope<F>> {
    if n < 2 {
        return invalid("n must be at least 2");
    }
    let a = a_n(n as u64);
    let norm = (1.0 + 1.0 / (a * a)).sqrt();
    let u0 = F::of(1.0 / norm);
    let ui = F::of(1.0 / (a * norm));
    let rows = (1..=n).map(|i| vec![(0, u0), (i, ui)]).collect();
    let normals = VectorSet::from_sparse(n + 1, rows)?;
    Ok(Polytope::List { normals, offsets: vec![F::one(); n] })
}

const CLOUD_TAG: u64 = 0x434c_4f55;

/// `m` iid uniform unit vectors in `ℝⁿ`.
pub fn gen_random_unit_cloud<F: Scalar>(n: usize, m: usize, seed: u64) -> Result<VectorSet<F>> {
    if n < 1 || m < 1 {
        return invalid("n and m must be positive");
    }
    let s = derive_seed(seed, CLOUD_TAG);
    let pts = (0..m)
        .map(|i| {
            let mut g: Vec<f64> = gaussian_vector(s, i as u64, n);
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                g[0] = 1.0;
            } else {
                g.iter_mut().for_each(|x| *x /= norm);
            }
            g.into_iter().map(F::of).collect()
        })
        .collect();
    VectorSet::new(n, pts)
}

/// A cloud of `m` unit vectors together with their negations.
pub fn gen_symmetric_cloud<F: Scalar>(n: usize, m: usize, seed: u64) -> Result<VectorSet<F>> {
    Ok(gen_random_unit_cloud::<F>(n, m, seed)?.symmetrize())
}

/// `clusters` tight groups of `per_cluster` points in `ℝⁿ`: unit-vector
/// centers plus perturbations of length `spread`.
pub fn gen_clusters<F: Scalar>(
    n: usize,
    clusters: usize,
    per_cluster: usize,
    spread: f64,
    seed: u64,
) -> Result<VectorSet<F>> {
    let centers = gen_random_unit_cloud::<f64>(n, clusters, seed)?;
    let noise = gen_random_unit_cloud::<f64>(n, clusters * per_cluster, derive_seed(seed, 1))?;
    let mut pts = Vec::with_capacity(clusters * per_cluster);
    for c in 0..clusters {
        let center = centers.point(c);
        for k in 0..per_cluster {
            let d = noise.point(c * per_cluster + k);
            pts.push(center.iter().zip(&d).map(|(x, y)| F::of(x + spread * y)).collect());
        }
    }
    VectorSet::new(n, pts)
}

/// The two-scale mix used in the benchmark suite: 8 clusters of 32 points
/// in `ℝ³²` with spread 0.005.
pub fn gen_two_scale_clusters<F: Scalar>(seed: u64) -> Result<VectorSet<F>> {
    gen_clusters(32, 8, 32, 0.005, seed)
}

/// Regular `m`-gon `{x ∈ ℝ² : u_k·x ≤ apothem}` with `u_k` at angles
/// `2πk/m + phase`.
pub fn gen_regular_polygon<F: Scalar>(m: usize, apothem: f64, phase: f64) -> Result<Polytope<F>> {
    if m < 1 {
        return invalid("m must be positive");
    }
    let rows = (0..m)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / m as f64 + phase;
            vec![F::of(a.cos()), F::of(a.sin())]
        })
        .collect();
    Polytope::from_normals(&VectorSet::new(2, rows)?, &vec![F::of(apothem); m])
}

/// `{x ∈ ℝ² : |x₁| ≤ 1}`.
pub fn gen_slab<F: Scalar>() -> Result<Polytope<F>> {
    let normals = VectorSet::new(2, vec![vec![F::one(), F::zero()], vec![-F::one(), F::zero()]])?;
    Ok(Polytope::List { normals, offsets: vec![F::one(); 2] })
}

/// A named benchmark set.
#[derive(Debug, Clone)]
pub struct BenchSet<F> {
    pub name: String,
    pub set: VectorSet<F>,
    /// Every point has unit norm.
    pub unit: bool,
}

fn entry<F: Scalar>(name: &str, set: VectorSet<F>) -> BenchSet<F> {
    let unit = (0..set.len()).all(|i| (set.norm(i).f64() - 1.0).abs() <= 1e-9);
    BenchSet { name: name.to_string(), set, unit }
}

/// Sets on which sparsification is benchmarked.
pub fn sparsify_suite<F: Scalar>(seed: u64) -> Result<Vec<BenchSet<F>>> {
    Ok(vec![
        entry("coordinate_64", gen_coordinate_example(64)?),
        entry("coordinate_256", gen_coordinate_example(256)?),
        entry("coordinate_1024", gen_coordinate_example(1024)?),
        entry("cloud_64x512", gen_random_unit_cloud(64, 512, seed)?),
        entry("clusters_8x32", gen_two_scale_clusters(seed)?),
    ])
}

/// Sets on which the inequality checks run: the sparsification suite plus a
/// symmetric cloud and unit coordinate vectors.
pub fn validator_suite<F: Scalar>(seed: u64) -> Result<Vec<BenchSet<F>>> {
    let mut out = sparsify_suite(seed)?;
    out.push(entry("symmetric_cloud_32x128", gen_symmetric_cloud(32, 128, seed)?));
    out.push(entry("unit_coordinate_64", gen_unit_coordinates(64)?));
    Ok(out)
}

/// Named bodies for the polytope benchmark.
pub fn polytope_suite<F: Scalar>(n_shifted: usize) -> Result<Vec<(String, Polytope<F>)>> {
    Ok(vec![
        ("slab".to_string(), gen_slab()?),
        ("octagon".to_string(), gen_regular_polygon(8, 1.0, 0.0)?),
        (format!("shifted_{n_shifted}"), gen_shifted_polytope(n_shifted)?),
    ])
}

/// Parameters of [`run_suite`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteParams {
    pub c_sandwich: f64,
    pub sparsify_eps: f64,
    pub norm_eps: f64,
    pub polytope_eps: f64,
    /// `n` of the shifted polytope in the polytope suite.
    pub n_shifted: usize,
    pub center: CenterParams,
    pub lift: LiftConfig,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self {
            c_sandwich: 30.0,
            sparsify_eps: 0.4,
            norm_eps: 0.25,
            polytope_eps: 0.3,
            n_shifted: 64,
            center: CenterParams::default(),
            lift: LiftConfig::default(),
        }
    }
}

const TAG_BUILD: u64 = 0x4255_494c;

fn named(mut r: CheckReport, set: &str) -> CheckReport {
    r.name = format!("{}/{set}", r.name);
    r
}

/// Runs every check on the benchmark suites; reports are named
/// `<check>/<set>`. Objects under test are built on a stream independent of
/// the checks.
pub fn run_suite(cfg: &McConfig, p: &SuiteParams) -> Result<Vec<CheckReport>> {
    cfg.validate()?;
    let build = cfg.derive(TAG_BUILD);
    let mut out = Vec::new();
    for b in validator_suite::<f64>(cfg.seed)? {
        let rho = 3.0 * b.set.max_norm();
        out.push(named(check_tail(&b.set, rho, cfg)?, &b.name));
        out.push(named(check_gamma2_sandwich(&b.set, p.c_sandwich, cfg)?, &b.name));
        if b.set.is_symmetric() {
            out.push(named(check_anticoncentration(&b.set, 0.05, cfg)?, &b.name));
        }
        if b.unit {
            for theta in [0.0, 1.0] {
                let mut r = check_cck(&b.set, theta, 0.05, cfg)?;
                r.name = format!("cck_theta{theta}");
                out.push(named(r, &b.name));
            }
        }
    }
    for b in sparsify_suite::<f64>(cfg.seed)? {
        let sp = sparsify(&b.set, p.sparsify_eps, &build)?;
        out.push(named(check_sparsifier(&b.set, &sp, p.sparsify_eps, cfg)?, &b.name));
    }
    let cloud = gen_symmetric_cloud::<f64>(64, 256, cfg.seed)?;
    let psi = sparsify_norm(&cloud, p.norm_eps, &p.center, false, &build)?;
    out.push(named(check_norm(&cloud, &psi, p.norm_eps, cfg)?, "symmetric_cloud_64x512"));
    for (name, k) in polytope_suite::<f64>(p.n_shifted)? {
        let l = sparsify_polytope(&k, p.polytope_eps, &build, &p.lift)?;
        out.push(named(check_distance(&k, &l, p.polytope_eps, cfg)?, &name));
    }
    Ok(out)
}
