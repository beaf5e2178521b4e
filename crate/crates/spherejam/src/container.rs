//! Containers and the constraint family backing the maximal radius function.
//!
//! A configuration of `n` sphere centers in `R^d` is measured against
//! `n(n-1)/2` pairwise half-distance functions and one distance function per
//! (sphere, wall) incidence. The unit cube gets a dedicated constructor with
//! exact `±1` wall gradients; arbitrary convex polytopes are handled through
//! their bounding half-spaces.

use crate::error::{Error, Result};
use crate::simplex::{self, Lp, LpOutcome};

pub const COINCIDENT_TOL: f64 = 1e-14;

/// Flat vector of `n` sphere centers in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    n: usize,
    d: usize,
    coords: Vec<f64>,
}

impl Configuration {
    pub fn new(n: usize, d: usize, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != n * d {
            return Err(Error::InvalidArgument(format!(
                "expected {} coordinates for n={n}, d={d}, got {}",
                n * d,
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coordinate".into()));
        }
        Ok(Self { n, d, coords })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.coords
    }

    /// Center of sphere `i` (0-based) as a coordinate slice.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn set_point(&mut self, i: usize, p: &[f64]) {
        self.coords[i * self.d..(i + 1) * self.d].copy_from_slice(p);
    }

    /// Parse the text format: header line `n d`, then one line of `d`
    /// decimals per sphere.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::MalformedInput("empty configuration document".into()))?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::MalformedInput("bad header: expected `n d`".into()))?;
        let d: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::MalformedInput("bad header: expected `n d`".into()))?;
        let mut coords = Vec::with_capacity(n * d);
        for line in lines {
            for tok in line.split_whitespace() {
                let v: f64 = tok
                    .parse()
                    .map_err(|_| Error::MalformedInput(format!("bad coordinate `{tok}`")))?;
                coords.push(v);
            }
        }
        Self::new(n, d, coords)
    }

    /// Render the text format with full round-trip precision.
    pub fn render(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.d);
        for i in 0..self.n {
            let row: Vec<String> = self.point(i).iter().map(|c| format!("{c:.16e}")).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Half-space `{y : normal . y >= offset}` with an inward unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Wall {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Wall {
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let norm: f64 = normal.iter().map(|a| a * a).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidContainer(format!(
                "wall normal must be unit length, |a| = {norm}"
            )));
        }
        Ok(Self { normal, offset })
    }

    /// Signed distance of point `p` to the wall plane; negative outside.
    pub fn distance(&self, p: &[f64]) -> f64 {
        self.normal
            .iter()
            .zip(p)
            .map(|(a, x)| a * x)
            .sum::<f64>()
            - self.offset
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContainerKind {
    Cube,
    Polytope,
    PresetTriangle,
}

#[derive(Debug, Clone)]
pub struct Container {
    d: usize,
    walls: Vec<Wall>,
    kind: ContainerKind,
    diameter: f64,
}

impl Container {
    /// Unit cube `[0,1]^d`: 2d walls, normals `±e_k`, arranged so every wall
    /// function is positive at interior points.
    pub fn cube(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument("dimension must be at least 2".into()));
        }
        let mut walls = Vec::with_capacity(2 * d);
        for k in 0..d {
            let mut lo = vec![0.0; d];
            lo[k] = 1.0;
            walls.push(Wall::new(lo, 0.0)?); // x_k >= 0
        }
        for k in 0..d {
            let mut hi = vec![0.0; d];
            hi[k] = -1.0;
            walls.push(Wall::new(hi, -1.0)?); // 1 - x_k >= 0
        }
        Ok(Self {
            d,
            walls,
            kind: ContainerKind::Cube,
            diameter: (d as f64).sqrt(),
        })
    }

    /// Equilateral triangle of side length 2 with vertices
    /// (0,0), (2,0), (1, sqrt(3)).
    pub fn triangle2() -> Self {
        let s3 = 3.0_f64.sqrt();
        let walls = vec![
            Wall::new(vec![0.0, 1.0], 0.0).unwrap(),
            // Edge (2,0)-(1,sqrt3): inward normal (-sqrt3/2, -1/2), offset -sqrt3.
            Wall::new(vec![-s3 / 2.0, -0.5], -s3).unwrap(),
            // Edge (0,0)-(1,sqrt3): inward normal (sqrt3/2, -1/2), offset 0.
            Wall::new(vec![s3 / 2.0, -0.5], 0.0).unwrap(),
        ];
        Self {
            d: 2,
            walls,
            kind: ContainerKind::PresetTriangle,
            diameter: 2.0,
        }
    }

    /// General convex polytope from half-spaces. Boundedness and nonempty
    /// interior are checked by linear programs over the walls.
    pub fn polytope(d: usize, walls: Vec<Wall>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument("dimension must be at least 2".into()));
        }
        if walls.iter().any(|w| w.normal.len() != d) {
            return Err(Error::InvalidContainer("wall normal has wrong dimension".into()));
        }
        let diameter = check_polytope(d, &walls)?;
        Ok(Self {
            d,
            walls,
            kind: ContainerKind::Polytope,
            diameter,
        })
    }

    /// Parse the polytope file format: one wall per line, `a_1 ... a_d b`.
    pub fn parse_polytope(d: usize, text: &str) -> Result<Self> {
        let mut walls = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let nums: Vec<f64> = line
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::MalformedInput(format!("bad wall entry `{t}`")))
                })
                .collect::<Result<_>>()?;
            if nums.len() != d + 1 {
                return Err(Error::MalformedInput(format!(
                    "wall line needs {} entries, got {}",
                    d + 1,
                    nums.len()
                )));
            }
            walls.push(Wall::new(nums[..d].to_vec(), nums[d])?);
        }
        Self::polytope(d, walls)
    }

    pub fn preset(name: &str, d: usize) -> Result<Self> {
        match name {
            "cube" => Self::cube(d),
            "triangle2" => {
                if d != 2 {
                    return Err(Error::InvalidArgument("triangle2 requires d = 2".into()));
                }
                Ok(Self::triangle2())
            }
            other => Err(Error::InvalidArgument(format!("unknown container `{other}`"))),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    pub fn kind(&self) -> ContainerKind {
        self.kind
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// True iff the point satisfies every wall inequality.
    pub fn contains(&self, p: &[f64]) -> bool {
        self.walls.iter().all(|w| w.distance(p) >= 0.0)
    }

    /// Axis-aligned bounding box, `(mins, maxs)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self.kind {
            ContainerKind::Cube => (vec![0.0; self.d], vec![1.0; self.d]),
            ContainerKind::PresetTriangle => (vec![0.0, 0.0], vec![2.0, 3.0_f64.sqrt()]),
            ContainerKind::Polytope => {
                let mut mins = vec![0.0; self.d];
                let mut maxs = vec![0.0; self.d];
                for k in 0..self.d {
                    mins[k] = extreme_coordinate(self.d, &self.walls, k, -1.0).unwrap_or(0.0);
                    maxs[k] = extreme_coordinate(self.d, &self.walls, k, 1.0).unwrap_or(0.0);
                }
                (mins, maxs)
            }
        }
    }
}

const POLYTOPE_BOX: f64 = 1e6;

fn extreme_coordinate(d: usize, walls: &[Wall], k: usize, sign: f64) -> Option<f64> {
    let mut objective = vec![0.0; d];
    objective[k] = sign;
    let lp = Lp {
        objective,
        rows: walls.iter().map(|w| w.normal.clone()).collect(),
        rhs: walls.iter().map(|w| w.offset).collect(),
        lower: vec![-POLYTOPE_BOX; d],
        upper: vec![POLYTOPE_BOX; d],
    };
    match simplex::solve(&lp).ok()? {
        LpOutcome::Optimal { objective, .. } => Some(sign * objective),
        LpOutcome::Infeasible => None,
    }
}

/// Returns the bounding-box diameter, or an error when the half-space
/// intersection is unbounded or has empty interior.
fn check_polytope(d: usize, walls: &[Wall]) -> Result<f64> {
    let mut diam_sq = 0.0;
    for k in 0..d {
        let lo = extreme_coordinate(d, walls, k, -1.0)
            .ok_or_else(|| Error::InvalidContainer("empty polytope".into()))?;
        let hi = extreme_coordinate(d, walls, k, 1.0)
            .ok_or_else(|| Error::InvalidContainer("empty polytope".into()))?;
        if lo <= -POLYTOPE_BOX + 1.0 || hi >= POLYTOPE_BOX - 1.0 {
            return Err(Error::InvalidContainer("unbounded polytope".into()));
        }
        diam_sq += (hi - lo) * (hi - lo);
    }
    // Nonempty interior: maximize the common slack t with walls relaxed by t.
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(walls.len());
    for w in walls {
        let mut row = w.normal.clone();
        row.push(-1.0);
        rows.push(row);
    }
    let mut objective = vec![0.0; d];
    objective.push(1.0);
    let mut lower = vec![-POLYTOPE_BOX; d];
    lower.push(0.0);
    let mut upper = vec![POLYTOPE_BOX; d];
    upper.push(1.0);
    let lp = Lp {
        objective,
        rows,
        rhs: walls.iter().map(|w| w.offset).collect(),
        lower,
        upper,
    };
    match simplex::solve(&lp).map_err(Error::LpFailure)? {
        LpOutcome::Optimal { objective, .. } if objective > 1e-9 => Ok(diam_sq.sqrt()),
        _ => Err(Error::InvalidContainer("polytope has empty interior".into())),
    }
}

/// Index of one scalar function of the family: a pair half-distance or a
/// (sphere, wall) incidence. Sphere indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintId {
    Pair(usize, usize),
    WallContact(usize, usize),
}

impl std::fmt::Display for ConstraintId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConstraintId::Pair(i, j) => write!(f, "pair({},{})", i + 1, j + 1),
            ConstraintId::WallContact(i, w) => write!(f, "wall({},{})", i + 1, w + 1),
        }
    }
}

/// The full family of `N(n,d)` constraint functions in a fixed canonical
/// order: all pairs lexicographically, then wall contacts by (sphere, wall).
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    container: Container,
    n: usize,
    ids: Vec<ConstraintId>,
}

impl ConstraintSet {
    pub fn cube(n: usize, d: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("need at least 2 spheres".into()));
        }
        Self::for_container(n, Container::cube(d)?)
    }

    pub fn for_container(n: usize, container: Container) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("need at least 2 spheres".into()));
        }
        let mut ids = Vec::with_capacity(n * (n - 1) / 2 + n * container.walls().len());
        for i in 0..n {
            for j in (i + 1)..n {
                ids.push(ConstraintId::Pair(i, j));
            }
        }
        for i in 0..n {
            for w in 0..container.walls().len() {
                ids.push(ConstraintId::WallContact(i, w));
            }
        }
        Ok(Self { container, n, ids })
    }

    pub fn container(&self) -> &Container {
        &self.container
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.container.d()
    }

    pub fn dof(&self) -> usize {
        self.n * self.container.d()
    }

    pub fn ids(&self) -> &[ConstraintId] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn evaluate(&self, id: ConstraintId, x: &Configuration) -> f64 {
        debug_assert_eq!(x.n(), self.n);
        debug_assert_eq!(x.d(), self.d());
        match id {
            ConstraintId::Pair(i, j) => {
                let (pi, pj) = (x.point(i), x.point(j));
                let dist_sq: f64 = pi.iter().zip(pj).map(|(a, b)| (a - b) * (a - b)).sum();
                dist_sq.sqrt() / 2.0
            }
            ConstraintId::WallContact(i, w) => self.container.walls()[w].distance(x.point(i)),
        }
    }

    /// Gradient as a dense vector of length `n*d`.
    pub fn gradient(&self, id: ConstraintId, x: &Configuration) -> Result<Vec<f64>> {
        let mut g = vec![0.0; self.dof()];
        self.gradient_into(id, x, &mut g)?;
        Ok(g)
    }

    pub fn gradient_into(&self, id: ConstraintId, x: &Configuration, out: &mut [f64]) -> Result<()> {
        let d = self.d();
        out.fill(0.0);
        match id {
            ConstraintId::Pair(i, j) => {
                let (pi, pj) = (x.point(i), x.point(j));
                let dist: f64 = pi
                    .iter()
                    .zip(pj)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                if dist < COINCIDENT_TOL {
                    return Err(Error::DegeneratePair { i, j });
                }
                for k in 0..d {
                    let g = (pi[k] - pj[k]) / (2.0 * dist);
                    out[i * d + k] = g;
                    out[j * d + k] = -g;
                }
            }
            ConstraintId::WallContact(i, w) => {
                let wall = &self.container.walls()[w];
                out[i * d..(i + 1) * d].copy_from_slice(&wall.normal);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(n: usize, d: usize, coords: &[f64]) -> Configuration {
        Configuration::new(n, d, coords.to_vec()).unwrap()
    }

    #[test]
    fn cube_constraint_counts() {
        assert_eq!(ConstraintSet::cube(5, 2).unwrap().len(), 30);
        assert_eq!(ConstraintSet::cube(2, 2).unwrap().len(), 9);
        assert_eq!(ConstraintSet::cube(4, 3).unwrap().len(), 30);
    }

    #[test]
    fn rejects_small_arguments() {
        assert!(ConstraintSet::cube(1, 2).is_err());
        assert!(ConstraintSet::cube(2, 1).is_err());
    }

    #[test]
    fn pair_and_wall_values() {
        let cs = ConstraintSet::cube(2, 2).unwrap();
        let x = config(2, 2, &[0.25, 0.25, 0.75, 0.75]);
        let v = cs.evaluate(ConstraintId::Pair(0, 1), &x);
        assert!((v - 0.5_f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((cs.evaluate(ConstraintId::WallContact(0, 0), &x) - 0.25).abs() < 1e-15);

        let outside = config(2, 2, &[-0.1, 0.5, 0.75, 0.75]);
        assert!((cs.evaluate(ConstraintId::WallContact(0, 0), &outside) + 0.1).abs() < 1e-15);
    }

    #[test]
    fn pair_gradient_axis_aligned() {
        let cs = ConstraintSet::cube(2, 2).unwrap();
        let x = config(2, 2, &[0.0, 0.0, 1.0, 0.0]);
        let g = cs.gradient(ConstraintId::Pair(0, 1), &x).unwrap();
        assert_eq!(g, vec![-0.5, 0.0, 0.5, 0.0]);
    }

    #[test]
    fn upper_wall_gradient_is_negative_unit() {
        let cs = ConstraintSet::cube(2, 2).unwrap();
        let x = config(2, 2, &[0.25, 0.25, 0.75, 0.75]);
        // Wall index 2 in canonical order is the first "upper" wall 1 - x_1.
        let g = cs.gradient(ConstraintId::WallContact(0, 2), &x).unwrap();
        assert_eq!(g, vec![-1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn gradient_norms() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let cs = ConstraintSet::cube(3, 2).unwrap();
        for _ in 0..100 {
            let coords: Vec<f64> = (0..6).map(|_| rng.random::<f64>()).collect();
            let x = Configuration::new(3, 2, coords).unwrap();
            for &id in cs.ids() {
                let g = cs.gradient(id, &x).unwrap();
                let norm: f64 = g.iter().map(|a| a * a).sum::<f64>().sqrt();
                let expected = match id {
                    ConstraintId::Pair(..) => 0.5_f64.sqrt(),
                    ConstraintId::WallContact(..) => 1.0,
                };
                assert!((norm - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_pair_rejected() {
        let cs = ConstraintSet::cube(2, 2).unwrap();
        let x = config(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        assert!(matches!(
            cs.gradient(ConstraintId::Pair(0, 1), &x),
            Err(Error::DegeneratePair { .. })
        ));
    }

    #[test]
    fn polytope_square_matches_cube() {
        use rand::{Rng, SeedableRng};
        let square = Container::polytope(
            2,
            vec![
                Wall::new(vec![1.0, 0.0], 0.0).unwrap(),
                Wall::new(vec![0.0, 1.0], 0.0).unwrap(),
                Wall::new(vec![-1.0, 0.0], -1.0).unwrap(),
                Wall::new(vec![0.0, -1.0], -1.0).unwrap(),
            ],
        )
        .unwrap();
        let poly = ConstraintSet::for_container(2, square).unwrap();
        let cube = ConstraintSet::cube(2, 2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let coords: Vec<f64> = (0..4).map(|_| rng.random::<f64>()).collect();
            let x = Configuration::new(2, 2, coords).unwrap();
            // Same wall set, possibly different canonical ordering: compare as multisets.
            let mut a: Vec<f64> = cube.ids().iter().map(|&id| cube.evaluate(id, &x)).collect();
            let mut b: Vec<f64> = poly.ids().iter().map(|&id| poly.evaluate(id, &x)).collect();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            for (u, v) in a.iter().zip(&b) {
                assert!((u - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn triangle_wall_count() {
        let cs = ConstraintSet::for_container(5, Container::triangle2()).unwrap();
        assert_eq!(cs.len(), 10 + 15);
        // All three walls positive at the centroid.
        let c = [1.0, 3.0_f64.sqrt() / 3.0];
        for w in cs.container().walls() {
            assert!(w.distance(&c) > 0.0);
        }
    }

    #[test]
    fn unbounded_polytope_rejected() {
        let walls = vec![
            Wall::new(vec![1.0, 0.0], 0.0).unwrap(),
            Wall::new(vec![0.0, 1.0], 0.0).unwrap(),
        ];
        assert!(Container::polytope(2, walls).is_err());
    }

    #[test]
    fn empty_polytope_rejected() {
        let walls = vec![
            Wall::new(vec![1.0, 0.0], 1.0).unwrap(),
            Wall::new(vec![-1.0, 0.0], 0.0).unwrap(),
        ];
        assert!(Container::polytope(2, walls).is_err());
    }

    #[test]
    fn configuration_text_round_trip() {
        let x = config(2, 2, &[0.25, 0.3333333333333333, 0.75, 0.1]);
        let back = Configuration::parse(&x.render()).unwrap();
        assert_eq!(x, back);
    }

    #[test]
    fn gradients_match_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for &(n, d) in &[(3usize, 2usize), (4, 3)] {
            let cs = ConstraintSet::cube(n, d).unwrap();
            for _ in 0..20 {
                let coords: Vec<f64> = (0..n * d).map(|_| rng.random::<f64>()).collect();
                let x = Configuration::new(n, d, coords).unwrap();
                for &id in cs.ids() {
                    let g = cs.gradient(id, &x).unwrap();
                    for k in 0..n * d {
                        let h = 1e-6;
                        let mut xp = x.clone();
                        xp.coords_mut()[k] += h;
                        let mut xm = x.clone();
                        xm.coords_mut()[k] -= h;
                        let fd = (cs.evaluate(id, &xp) - cs.evaluate(id, &xm)) / (2.0 * h);
                        let scale = g[k].abs().max(1.0);
                        assert!(
                            (fd - g[k]).abs() / scale < 1e-6,
                            "id {id:?} coord {k}: fd {fd} vs grad {}",
                            g[k]
                        );
                    }
                }
            }
        }
    }
}
