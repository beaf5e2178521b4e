//! Repeated randomized maximization, deduplication of maxima up to container
//! symmetry and sphere relabeling, and the catalog of found packings.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::assignment::min_cost_assignment;
use crate::container::{Configuration, Container, ContainerKind, ConstraintSet};
use crate::error::{Error, Result};
use crate::optimizer::{self, LocalMaximumRecord, OptimizerParams};

/// Container symmetries used when comparing configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryKind {
    Identity,
    /// Hyperoctahedral group of the unit cube: axis permutations composed
    /// with reflections across coordinate midplanes (2^d * d! elements).
    Cube,
    /// Dihedral group of the preset equilateral triangle (6 elements).
    Triangle,
}

impl SymmetryKind {
    pub fn for_container(c: &Container) -> Self {
        match c.kind() {
            ContainerKind::Cube => SymmetryKind::Cube,
            ContainerKind::PresetTriangle => SymmetryKind::Triangle,
            ContainerKind::Polytope => SymmetryKind::Identity,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SymmetryKind::Identity => "identity",
            SymmetryKind::Cube => "cube",
            SymmetryKind::Triangle => "triangle",
        }
    }
}

/// One symmetry as an affine map on points.
#[derive(Debug, Clone)]
pub enum SymmetryOp {
    Identity,
    /// `g(p)_k = flip[k] ? 1 - p[perm[k]] : p[perm[k]]`
    Cube { perm: Vec<usize>, flip: Vec<bool> },
    /// `g(p) = M p + t` (2-d only)
    Affine { m: [[f64; 2]; 2], t: [f64; 2] },
}

impl SymmetryOp {
    pub fn apply(&self, p: &[f64], out: &mut [f64]) {
        match self {
            SymmetryOp::Identity => out.copy_from_slice(p),
            SymmetryOp::Cube { perm, flip } => {
                for k in 0..p.len() {
                    let v = p[perm[k]];
                    out[k] = if flip[k] { 1.0 - v } else { v };
                }
            }
            SymmetryOp::Affine { m, t } => {
                out[0] = m[0][0] * p[0] + m[0][1] * p[1] + t[0];
                out[1] = m[1][0] * p[0] + m[1][1] * p[1] + t[1];
            }
        }
    }
}

fn axis_permutations(d: usize) -> Vec<Vec<usize>> {
    fn go(items: Vec<usize>) -> Vec<Vec<usize>> {
        if items.len() <= 1 {
            return vec![items];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.clone();
            let x = rest.remove(i);
            for mut p in go(rest) {
                p.insert(0, x);
                out.push(p);
            }
        }
        out
    }
    go((0..d).collect())
}

pub fn symmetry_elements(kind: SymmetryKind, d: usize) -> Vec<SymmetryOp> {
    match kind {
        SymmetryKind::Identity => vec![SymmetryOp::Identity],
        SymmetryKind::Cube => {
            let mut ops = Vec::new();
            for perm in axis_permutations(d) {
                for mask in 0..(1u32 << d) {
                    let flip: Vec<bool> = (0..d).map(|k| mask >> k & 1 == 1).collect();
                    ops.push(SymmetryOp::Cube {
                        perm: perm.clone(),
                        flip,
                    });
                }
            }
            ops
        }
        SymmetryKind::Triangle => {
            assert_eq!(d, 2);
            // Rotations about the centroid (1, sqrt3/3) by 0, 120, 240 degrees,
            // each with and without the reflection across x = 1.
            let c = [1.0, 3.0_f64.sqrt() / 3.0];
            let mut ops = Vec::new();
            for rot in 0..3 {
                let theta = 2.0 * std::f64::consts::PI * rot as f64 / 3.0;
                let (s, co) = theta.sin_cos();
                for reflect in [false, true] {
                    // Optional reflection (x -> 2 - x) applied first.
                    let rm = if reflect {
                        [[-co, -s], [-s, co]]
                    } else {
                        [[co, -s], [s, co]]
                    };
                    // Map p -> R (p - c) + c, with R including the reflection.
                    let t = [
                        c[0] - rm[0][0] * c[0] - rm[0][1] * c[1],
                        c[1] - rm[1][0] * c[0] - rm[1][1] * c[1],
                    ];
                    ops.push(SymmetryOp::Affine { m: rm, t });
                }
            }
            ops
        }
    }
}

/// Uniform start point inside the container (rejection sampling from the
/// bounding box for non-cube containers).
pub fn sample_start(n: usize, container: &Container, rng: &mut ChaCha8Rng) -> Result<Configuration> {
    let d = container.d();
    let mut coords = Vec::with_capacity(n * d);
    if container.kind() == ContainerKind::Cube {
        for _ in 0..n * d {
            coords.push(rng.random::<f64>());
        }
        return Configuration::new(n, d, coords);
    }
    let (mins, maxs) = container.bounding_box();
    let mut rejected = 0usize;
    let mut p = vec![0.0; d];
    while coords.len() < n * d {
        for k in 0..d {
            p[k] = mins[k] + (maxs[k] - mins[k]) * rng.random::<f64>();
        }
        if container.contains(&p) {
            coords.extend_from_slice(&p);
        } else {
            rejected += 1;
            if rejected > 1_000_000 {
                return Err(Error::SamplingFailure(
                    "rejection sampling exceeded 10^6 attempts".into(),
                ));
            }
        }
    }
    Configuration::new(n, d, coords)
}

/// Distance between configurations minimized over container symmetries and
/// sphere relabelings (exact assignment per symmetry element).
pub fn config_distance(a: &Configuration, b: &Configuration, ops: &[SymmetryOp]) -> f64 {
    assert_eq!(a.n(), b.n());
    assert_eq!(a.d(), b.d());
    let n = a.n();
    let d = a.d();
    let mut best = f64::INFINITY;
    let mut ga = vec![0.0; d];
    let mut cost = vec![vec![0.0; n]; n];
    for op in ops {
        for i in 0..n {
            op.apply(a.point(i), &mut ga);
            for j in 0..n {
                let pj = b.point(j);
                cost[i][j] = ga.iter().zip(pj).map(|(u, v)| (u - v) * (u - v)).sum();
            }
        }
        let (total, _) = min_cost_assignment(&cost);
        if total < best {
            best = total;
        }
    }
    best.max(0.0).sqrt()
}

/// Volume of the d-dimensional unit ball.
pub fn unit_ball_volume(d: usize) -> f64 {
    // omega_d = pi^{d/2} / Gamma(d/2 + 1), by the half-integer recurrence.
    let mut gamma = if d % 2 == 0 {
        1.0 // Gamma(1)
    } else {
        std::f64::consts::PI.sqrt() // Gamma(1/2)
    };
    let mut x = if d % 2 == 0 { 1.0 } else { 0.5 };
    while x < d as f64 / 2.0 + 1.0 - 0.25 {
        gamma *= x;
        x += 1.0;
    }
    std::f64::consts::PI.powf(d as f64 / 2.0) / gamma
}

/// Fraction of the unit cube covered by `n` spheres of radius `r`.
pub fn packing_fraction(n: usize, d: usize, r: f64) -> f64 {
    n as f64 * unit_ball_volume(d) * r.powi(d as i32)
}

/// Upper bound on the number of minimally determined maxima:
/// `C(n(n-1)/2 + nd, nd + 1)`.
pub fn max_maxima_bound(n: usize, d: usize) -> BigUint {
    let top = n * (n - 1) / 2 + n * d;
    let k = n * d + 1;
    binomial(top, k)
}

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut result = BigUint::from(1u32);
    for i in 0..k {
        result = result * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    result
}

#[derive(Debug, Clone)]
pub struct CampaignParams {
    pub restarts: usize,
    pub optimizer: OptimizerParams,
    pub match_radius_tol: f64,
    /// Defaults to `1e-4 * sqrt(n d)` when `None`.
    pub match_distance_tol: Option<f64>,
    pub symmetry: Option<SymmetryKind>,
    pub master_seed: u64,
    pub histogram_bin_width: f64,
    pub workers: usize,
}

impl Default for CampaignParams {
    fn default() -> Self {
        Self {
            restarts: 10_000,
            optimizer: OptimizerParams::default(),
            match_radius_tol: 1e-6,
            match_distance_tol: None,
            symmetry: None,
            master_seed: 0,
            histogram_bin_width: 1e-4,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub record: LocalMaximumRecord,
    pub hits: usize,
    /// Set for cube containers only; volume normalization differs elsewhere.
    pub packing_fraction: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
    pub n: usize,
    pub d: usize,
    pub container_id: String,
    pub total_runs: usize,
    pub failures: usize,
}

impl Catalog {
    pub fn new(cs: &ConstraintSet) -> Self {
        let container_id = match cs.container().kind() {
            ContainerKind::Cube => format!("cube-{}", cs.d()),
            ContainerKind::PresetTriangle => "triangle2".to_string(),
            ContainerKind::Polytope => format!("polytope-{}", cs.d()),
        };
        Self {
            entries: Vec::new(),
            n: cs.n(),
            d: cs.d(),
            container_id,
            total_runs: 0,
            failures: 0,
        }
    }

    pub fn successful_runs(&self) -> usize {
        self.entries.iter().map(|e| e.hits).sum()
    }
}

/// Insert a local maximum, merging with a matching entry when both the radius
/// and the symmetry-reduced geometry agree.
pub fn catalog_insert(
    catalog: &mut Catalog,
    record: LocalMaximumRecord,
    params: &CampaignParams,
    ops: &[SymmetryOp],
    is_cube: bool,
) {
    let dist_tol = params
        .match_distance_tol
        .unwrap_or(1e-4 * ((catalog.n * catalog.d) as f64).sqrt());
    for entry in &mut catalog.entries {
        if (entry.record.radius - record.radius).abs() <= params.match_radius_tol
            && config_distance(&record.configuration, &entry.record.configuration, ops) <= dist_tol
        {
            entry.hits += 1;
            if record.radius > entry.record.radius {
                entry.record = record;
                if is_cube {
                    entry.packing_fraction = Some(packing_fraction(
                        catalog.n,
                        catalog.d,
                        entry.record.radius,
                    ));
                }
            }
            return;
        }
    }
    let packing = is_cube.then(|| packing_fraction(catalog.n, catalog.d, record.radius));
    let pos = catalog
        .entries
        .partition_point(|e| e.record.radius < record.radius);
    catalog.entries.insert(
        pos,
        CatalogEntry {
            record,
            hits: 1,
            packing_fraction: packing,
        },
    );
}

/// SplitMix64; run `k` of a campaign derives its seeds from
/// `mix(master, 2k)` (start sampling) and `mix(master, 2k + 1)` (optimizer).
pub fn mix_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9e3779b97f4a7c15);
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct CampaignOutcome {
    pub catalog: Catalog,
    /// `(bin lower edge, relative frequency)` of terminal radii over
    /// successful runs, sorted by bin.
    pub histogram: Vec<(f64, f64)>,
}

/// Runs `restarts` independent maximizations and accumulates the catalog.
/// Worker parallelism does not change the result: records are merged in run
/// order regardless.
pub fn run_campaign(cs: &ConstraintSet, params: &CampaignParams) -> Result<CampaignOutcome> {
    if params.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    params.optimizer.validate()?;
    let symmetry = params
        .symmetry
        .unwrap_or_else(|| SymmetryKind::for_container(cs.container()));
    let ops = symmetry_elements(symmetry, cs.d());
    let is_cube = cs.container().kind() == ContainerKind::Cube;

    let run_one = |k: usize| -> Option<LocalMaximumRecord> {
        let mut sample_rng = ChaCha8Rng::seed_from_u64(mix_seed(params.master_seed, 2 * k as u64));
        let x0 = sample_start(cs.n(), cs.container(), &mut sample_rng).ok()?;
        let opt = OptimizerParams {
            rng_seed: mix_seed(params.master_seed, 2 * k as u64 + 1),
            ..params.optimizer.clone()
        };
        optimizer::maximize(cs, &x0, &opt).ok()
    };

    let results: Vec<Option<LocalMaximumRecord>> = if params.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(params.workers)
            .build()
            .map_err(|e| Error::NumericalFailure(e.to_string()))?;
        pool.install(|| (0..params.restarts).into_par_iter().map(run_one).collect())
    } else {
        (0..params.restarts).map(run_one).collect()
    };

    let mut catalog = Catalog::new(cs);
    catalog.total_runs = params.restarts;
    let mut radii = Vec::new();
    for rec in results {
        match rec {
            Some(r) => {
                radii.push(r.radius);
                catalog_insert(&mut catalog, r, params, &ops, is_cube);
            }
            None => catalog.failures += 1,
        }
    }

    let histogram = radius_histogram(&radii, params.histogram_bin_width);
    Ok(CampaignOutcome { catalog, histogram })
}

pub fn radius_histogram(radii: &[f64], bin_width: f64) -> Vec<(f64, f64)> {
    if radii.is_empty() {
        return Vec::new();
    }
    let mut counts: std::collections::BTreeMap<i64, usize> = std::collections::BTreeMap::new();
    for &r in radii {
        let bin = (r / bin_width).floor() as i64;
        *counts.entry(bin).or_insert(0) += 1;
    }
    let total = radii.len() as f64;
    counts
        .into_iter()
        .map(|(bin, c)| (bin as f64 * bin_width, c as f64 / total))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope;

    fn config(n: usize, d: usize, coords: &[f64]) -> Configuration {
        Configuration::new(n, d, coords.to_vec()).unwrap()
    }

    #[test]
    fn cube_group_sizes() {
        assert_eq!(symmetry_elements(SymmetryKind::Cube, 2).len(), 8);
        assert_eq!(symmetry_elements(SymmetryKind::Cube, 3).len(), 48);
        assert_eq!(symmetry_elements(SymmetryKind::Triangle, 2).len(), 6);
    }

    #[test]
    fn triangle_ops_preserve_container() {
        let tri = Container::triangle2();
        let ops = symmetry_elements(SymmetryKind::Triangle, 2);
        let mut out = [0.0; 2];
        for op in &ops {
            for p in [[0.5, 0.2], [1.0, 0.5], [1.5, 0.1]] {
                op.apply(&p, &mut out);
                assert!(
                    tri.walls().iter().all(|w| w.distance(&out) > -1e-9),
                    "symmetry image left the triangle: {out:?}"
                );
            }
        }
    }

    #[test]
    fn distance_vanishes_on_relabeling_and_symmetry() {
        let ops = symmetry_elements(SymmetryKind::Cube, 2);
        let a = config(3, 2, &[0.2, 0.3, 0.7, 0.4, 0.5, 0.9]);
        let relabeled = config(3, 2, &[0.5, 0.9, 0.2, 0.3, 0.7, 0.4]);
        assert!(config_distance(&a, &relabeled, &ops) < 1e-12);

        // Reflection across x = 1/2.
        let reflected = config(3, 2, &[0.8, 0.3, 0.3, 0.4, 0.5, 0.9]);
        assert!(config_distance(&a, &reflected, &ops) < 1e-12);
    }

    #[test]
    fn distance_of_small_shift() {
        let ops = vec![SymmetryOp::Identity];
        let a = config(2, 2, &[0.2, 0.3, 0.7, 0.8]);
        let mut b = a.clone();
        b.coords_mut()[1] += 1e-3;
        assert!((config_distance(&a, &b, &ops) - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn distance_is_a_pseudometric() {
        use rand::{Rng, SeedableRng};
        let ops = symmetry_elements(SymmetryKind::Cube, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let mk = |rng: &mut ChaCha8Rng| {
                let coords: Vec<f64> = (0..6).map(|_| rng.random::<f64>()).collect();
                Configuration::new(3, 2, coords).unwrap()
            };
            let (a, b, c) = (mk(&mut rng), mk(&mut rng), mk(&mut rng));
            let dab = config_distance(&a, &b, &ops);
            let dba = config_distance(&b, &a, &ops);
            assert!((dab - dba).abs() < 1e-9);
            let dac = config_distance(&a, &c, &ops);
            let dcb = config_distance(&c, &b, &ops);
            assert!(dab <= dac + dcb + 1e-9);
        }
    }

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-12);
        assert!((unit_ball_volume(3) - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn grid_packing_fractions() {
        assert!((packing_fraction(4, 2, 0.25) - std::f64::consts::PI / 4.0).abs() < 1e-12);
        assert!((packing_fraction(8, 3, 0.25) - std::f64::consts::PI / 6.0).abs() < 1e-12);
        assert_eq!(packing_fraction(5, 2, 0.0), 0.0);
    }

    #[test]
    fn maxima_bound_values() {
        assert_eq!(max_maxima_bound(2, 2), BigUint::from(1u32));
        assert_eq!(max_maxima_bound(3, 2), BigUint::from(36u32));
    }

    #[test]
    fn sampling_contracts() {
        let cube = Container::cube(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let x = sample_start(3, &cube, &mut rng).unwrap();
            assert!(x.coords().iter().all(|&c| (0.0..=1.0).contains(&c)));
        }
        let tri = Container::triangle2();
        for _ in 0..1000 {
            let x = sample_start(3, &tri, &mut rng).unwrap();
            for i in 0..3 {
                assert!(tri.contains(x.point(i)));
            }
        }
        // Reproducible under a fixed seed.
        let mut r1 = ChaCha8Rng::seed_from_u64(77);
        let mut r2 = ChaCha8Rng::seed_from_u64(77);
        let a = sample_start(4, &cube, &mut r1).unwrap();
        let b = sample_start(4, &cube, &mut r2).unwrap();
        assert_eq!(a.coords(), b.coords());
    }

    #[test]
    fn insert_merges_duplicates() {
        let cs = ConstraintSet::cube(2, 2).unwrap();
        let params = CampaignParams::default();
        let ops = symmetry_elements(SymmetryKind::Cube, 2);
        let mut catalog = Catalog::new(&cs);
        let x0 = config(2, 2, &[0.3, 0.4, 0.6, 0.7]);
        let rec = optimizer::maximize(&cs, &x0, &params.optimizer).unwrap();
        catalog_insert(&mut catalog, rec.clone(), &params, &ops, true);
        catalog_insert(&mut catalog, rec.clone(), &params, &ops, true);
        assert_eq!(catalog.entries.len(), 1);
        assert_eq!(catalog.entries[0].hits, 2);

        // Same radius, distant geometry: stays separate.
        let mut far = rec.clone();
        let shifted: Vec<f64> = far
            .configuration
            .coords()
            .iter()
            .enumerate()
            .map(|(i, &c)| if i == 0 { c + 0.5 } else { c })
            .collect();
        far.configuration = Configuration::new(2, 2, shifted).unwrap();
        catalog_insert(&mut catalog, far, &params, &ops, true);
        assert_eq!(catalog.entries.len(), 2);
    }

    #[test]
    fn two_disk_campaign_single_entry() {
        let cs = ConstraintSet::cube(2, 2).unwrap();
        let params = CampaignParams {
            restarts: 50,
            master_seed: 123,
            ..CampaignParams::default()
        };
        let out = run_campaign(&cs, &params).unwrap();
        assert_eq!(out.catalog.failures, 0);
        assert_eq!(out.catalog.entries.len(), 1);
        let expected = (2.0 - 2.0_f64.sqrt()) / 2.0;
        assert!((out.catalog.entries[0].record.radius - expected).abs() < 1e-7);
        let freq_sum: f64 = out.histogram.iter().map(|(_, f)| f).sum();
        assert!((freq_sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn campaign_is_deterministic_and_parallel_safe() {
        let cs = ConstraintSet::cube(3, 2).unwrap();
        let params = CampaignParams {
            restarts: 20,
            master_seed: 7,
            ..CampaignParams::default()
        };
        let serial = run_campaign(&cs, &params).unwrap();
        let parallel = run_campaign(
            &cs,
            &CampaignParams {
                workers: 4,
                ..params.clone()
            },
        )
        .unwrap();
        assert_eq!(serial.catalog.entries.len(), parallel.catalog.entries.len());
        for (a, b) in serial.catalog.entries.iter().zip(&parallel.catalog.entries) {
            assert_eq!(a.hits, b.hits);
            assert_eq!(a.record.configuration.coords(), b.record.configuration.coords());
        }
    }

    #[test]
    fn catalog_entries_are_admissible_and_sorted() {
        let cs = ConstraintSet::cube(3, 2).unwrap();
        let params = CampaignParams {
            restarts: 50,
            master_seed: 11,
            ..CampaignParams::default()
        };
        let out = run_campaign(&cs, &params).unwrap();
        let radii: Vec<f64> = out.catalog.entries.iter().map(|e| e.record.radius).collect();
        assert!(radii.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(out.catalog.successful_runs(), 50 - out.catalog.failures);
        for e in &out.catalog.entries {
            assert!(
                (envelope::g_value(&cs, &e.record.configuration) - e.record.radius).abs() < 1e-14
            );
        }
    }
}
