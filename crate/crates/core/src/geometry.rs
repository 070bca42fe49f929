//! Point processes on a toroidal square window.
//!
//! The window `[0, side)²` wraps around in both axes so every point sees a
//! statistically identical neighbourhood, standing in for the infinite plane.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

/// Square simulation window with wrap-around distance.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Window {
    side: f64,
}

impl Window {
    pub const DEFAULT_SIDE: f64 = 100.0;

    pub fn new(side: f64) -> Result<Self> {
        if !(side.is_finite() && side > 0.0) {
            return Err(Error::param(
                "window_side",
                "must be a positive finite number",
            ));
        }
        Ok(Window { side })
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn area(&self) -> f64 {
        self.side * self.side
    }

    fn axis_gap(&self, a: f64, b: f64) -> f64 {
        let d = (a - b).abs();
        let wrapped = self.side - d;
        if wrapped < d {
            wrapped
        } else {
            d
        }
    }

    /// Toroidal Euclidean distance.
    pub fn distance(&self, a: Point, b: Point) -> f64 {
        let dx = self.axis_gap(a.x, b.x);
        let dy = self.axis_gap(a.y, b.y);
        math::sqrt(dx * dx + dy * dy)
    }

    pub fn contains(&self, p: Point) -> bool {
        (0.0..self.side).contains(&p.x) && (0.0..self.side).contains(&p.y)
    }

    pub fn uniform_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        Point::new(self.uniform_coord(rng), self.uniform_coord(rng))
    }

    fn uniform_coord<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let c = rng.random::<f64>() * self.side;
        // u * side can round up to side itself
        if c < self.side {
            c
        } else {
            0.0
        }
    }
}

impl Default for Window {
    fn default() -> Self {
        Window {
            side: Self::DEFAULT_SIDE,
        }
    }
}

/// A finite point pattern together with the intensity it was drawn at.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PointSet {
    pub points: Vec<Point>,
    pub intensity: f64,
}

impl PointSet {
    pub fn new(points: Vec<Point>, intensity: f64) -> Self {
        PointSet { points, intensity }
    }

    pub fn empty() -> Self {
        PointSet {
            points: Vec::new(),
            intensity: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The `k` nearest points to `query` under the window's toroidal metric,
    /// ascending by distance, ties broken by lower index.
    ///
    /// Exhaustive; see [`NeighborIndex`] for the bucketed version used inside
    /// the simulator.
    pub fn nearest_k(&self, window: &Window, query: Point, k: usize) -> Result<Vec<(usize, f64)>> {
        check_k(k, self.len())?;
        let mut all: Vec<(usize, f64)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, &p)| (i, window.distance(p, query)))
            .collect();
        if k < all.len() {
            all.select_nth_unstable_by(k - 1, by_distance_then_index);
            all.truncate(k);
        }
        all.sort_unstable_by(by_distance_then_index);
        Ok(all)
    }
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::param("k", "must be at least 1"));
    }
    if k > n {
        return Err(Error::param(
            "k",
            alloc::format!("requested {k} nearest points but only {n} exist"),
        ));
    }
    Ok(())
}

fn by_distance_then_index(a: &(usize, f64), b: &(usize, f64)) -> Ordering {
    a.1.total_cmp(&b.1).then(a.0.cmp(&b.0))
}

/// Draws a homogeneous Poisson point process of the given intensity on the
/// window: a Poisson(`intensity * area`) count of i.i.d. uniform points.
pub fn sample_ppp<R: Rng + ?Sized>(
    intensity: f64,
    window: &Window,
    rng: &mut R,
) -> Result<PointSet> {
    if !(intensity.is_finite() && intensity > 0.0) {
        return Err(Error::param(
            "intensity",
            "must be a positive finite number",
        ));
    }
    let mean = intensity * window.area();
    let count = Poisson::new(mean)
        .map_err(|_| Error::param("intensity", "Poisson mean out of range"))?
        .sample(rng) as usize;
    let points = (0..count).map(|_| window.uniform_point(rng)).collect();
    Ok(PointSet { points, intensity })
}

/// One uplink user per macro cell. User `i` lives in the Voronoi cell of MBS
/// `i`, so the owner of every user is its own index.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UserPlacement {
    pub user_coordinates: Vec<Point>,
    /// Distance from each user to its cell MBS, the power-control anchor.
    pub dist_to_mbs: Vec<f64>,
    /// Uniform draws spent by the rejection sampler.
    pub draws: u64,
}

impl UserPlacement {
    pub fn len(&self) -> usize {
        self.user_coordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.user_coordinates.is_empty()
    }

    pub fn mbs_index(&self, user: usize) -> usize {
        user
    }
}

/// Places exactly one user uniformly inside each MBS Voronoi cell.
///
/// Uniform window points are assigned to their nearest MBS and the first
/// arrival in each cell is kept, which is uniform on that cell.
pub fn place_users<R: Rng + ?Sized>(
    mbs: &PointSet,
    window: &Window,
    rng: &mut R,
) -> Result<UserPlacement> {
    if mbs.is_empty() {
        return Err(Error::param(
            "mbs",
            "at least one macro base station is required",
        ));
    }
    let index = NeighborIndex::new(mbs, window);
    let n = mbs.len();
    let mut coords = vec![Point::default(); n];
    let mut dist = vec![0.0; n];
    let mut filled = vec![false; n];
    let mut remaining = n;
    let mut draws = 0u64;
    while remaining > 0 {
        let p = window.uniform_point(rng);
        draws += 1;
        let (owner, d) = index.nearest(p);
        if !filled[owner] {
            filled[owner] = true;
            coords[owner] = p;
            dist[owner] = d;
            remaining -= 1;
        }
    }
    Ok(UserPlacement {
        user_coordinates: coords,
        dist_to_mbs: dist,
        draws,
    })
}

/// Bucket grid over the torus for nearest-neighbour queries.
#[derive(Debug, Clone)]
pub struct NeighborIndex<'a> {
    set: &'a PointSet,
    window: Window,
    cells: usize,
    cell_size: f64,
    starts: Vec<u32>,
    members: Vec<u32>,
}

impl<'a> NeighborIndex<'a> {
    pub fn new(set: &'a PointSet, window: &Window) -> Self {
        let n = set.len();
        // about two points per bucket
        let cells = (math::floor(math::sqrt(n as f64 / 2.0)) as usize).max(1);
        let cell_size = window.side() / cells as f64;
        let bucket_of = |p: Point| {
            let i = ((p.x / cell_size) as usize).min(cells - 1);
            let j = ((p.y / cell_size) as usize).min(cells - 1);
            i * cells + j
        };
        let mut counts = vec![0u32; cells * cells + 1];
        for &p in &set.points {
            counts[bucket_of(p) + 1] += 1;
        }
        for b in 0..cells * cells {
            counts[b + 1] += counts[b];
        }
        let starts = counts.clone();
        let mut cursor = counts;
        let mut members = vec![0u32; n];
        for (idx, &p) in set.points.iter().enumerate() {
            let b = bucket_of(p);
            members[cursor[b] as usize] = idx as u32;
            cursor[b] += 1;
        }
        NeighborIndex {
            set,
            window: *window,
            cells,
            cell_size,
            starts,
            members,
        }
    }

    /// Nearest point; the set must be non-empty.
    pub fn nearest(&self, query: Point) -> (usize, f64) {
        let mut best = [(usize::MAX, f64::INFINITY)];
        self.search(query, &mut best);
        best[0]
    }

    pub fn nearest_k(&self, query: Point, k: usize) -> Result<Vec<(usize, f64)>> {
        check_k(k, self.set.len())?;
        let mut best = vec![(usize::MAX, f64::INFINITY); k];
        self.search(query, &mut best);
        Ok(best)
    }

    fn offer(best: &mut [(usize, f64)], cand: (usize, f64)) {
        let k = best.len();
        if by_distance_then_index(&cand, &best[k - 1]) != Ordering::Less {
            return;
        }
        let mut pos = k - 1;
        while pos > 0 && by_distance_then_index(&cand, &best[pos - 1]) == Ordering::Less {
            best[pos] = best[pos - 1];
            pos -= 1;
        }
        best[pos] = cand;
    }

    fn scan_bucket(&self, bucket: usize, query: Point, best: &mut [(usize, f64)]) {
        let (s, e) = (
            self.starts[bucket] as usize,
            self.starts[bucket + 1] as usize,
        );
        for &m in &self.members[s..e] {
            let idx = m as usize;
            Self::offer(
                best,
                (idx, self.window.distance(self.set.points[idx], query)),
            );
        }
    }

    fn search(&self, query: Point, best: &mut [(usize, f64)]) {
        let g = self.cells as isize;
        let qi = ((query.x / self.cell_size) as isize).min(g - 1);
        let qj = ((query.y / self.cell_size) as isize).min(g - 1);
        let k = best.len();
        let mut ring = 0isize;
        while 2 * ring < g {
            for di in -ring..=ring {
                for dj in -ring..=ring {
                    if di.abs() != ring && dj.abs() != ring {
                        continue;
                    }
                    let bi = (qi + di).rem_euclid(g) as usize;
                    let bj = (qj + dj).rem_euclid(g) as usize;
                    self.scan_bucket(bi * self.cells + bj, query, best);
                }
            }
            // every unvisited bucket is at least `ring` cells away on some axis
            if best[k - 1].1 < ring as f64 * self.cell_size {
                return;
            }
            ring += 1;
        }
        if 2 * ring - 1 == g {
            // rings 0..ring-1 covered the whole grid exactly once
            return;
        }
        best.fill((usize::MAX, f64::INFINITY));
        for b in 0..self.cells * self.cells {
            self.scan_bucket(b, query, best);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn rejects_bad_window_and_intensity() {
        assert!(Window::new(0.0).is_err());
        assert!(Window::new(-1.0).is_err());
        assert!(Window::new(f64::NAN).is_err());
        let w = Window::default();
        assert!(sample_ppp(0.0, &w, &mut rng(1)).is_err());
        assert!(sample_ppp(-0.5, &w, &mut rng(1)).is_err());
    }

    #[test]
    fn single_point_nearest() {
        let w = Window::new(10.0).unwrap();
        let s = PointSet::new(vec![Point::new(0.0, 0.0)], 1.0);
        assert_eq!(
            s.nearest_k(&w, Point::new(1.0, 0.0), 1).unwrap(),
            vec![(0, 1.0)]
        );
    }

    #[test]
    fn toroidal_wrap() {
        let w = Window::new(10.0).unwrap();
        let s = PointSet::new(vec![Point::new(9.0, 0.0)], 1.0);
        let hit = s.nearest_k(&w, Point::new(0.0, 0.0), 1).unwrap();
        assert_eq!(hit[0].1, 1.0);
    }

    #[test]
    fn k_out_of_range() {
        let w = Window::default();
        let s = PointSet::new(vec![Point::new(1.0, 1.0)], 1.0);
        assert!(s.nearest_k(&w, Point::new(0.0, 0.0), 2).is_err());
        assert!(s.nearest_k(&w, Point::new(0.0, 0.0), 0).is_err());
    }

    #[test]
    fn ties_resolve_to_lower_index() {
        let w = Window::new(10.0).unwrap();
        let s = PointSet::new(
            vec![
                Point::new(2.0, 1.0),
                Point::new(0.0, 1.0),
                Point::new(1.0, 2.0),
            ],
            1.0,
        );
        let q = Point::new(1.0, 1.0);
        let got = s.nearest_k(&w, q, 3).unwrap();
        assert_eq!(got.iter().map(|h| h.0).collect::<Vec<_>>(), vec![0, 1, 2]);
        let idx = NeighborIndex::new(&s, &w);
        assert_eq!(idx.nearest_k(q, 3).unwrap(), got);
    }

    #[test]
    fn brute_force_oracle_for_nearest_k() {
        let w = Window::new(30.0).unwrap();
        let mut r = rng(11);
        for _ in 0..20 {
            let pts: Vec<Point> = (0..50).map(|_| w.uniform_point(&mut r)).collect();
            let set = PointSet::new(pts, 50.0 / w.area());
            let q = w.uniform_point(&mut r);
            // all-pairs oracle: full sort of every distance
            let mut oracle: Vec<(usize, f64)> = set
                .points
                .iter()
                .enumerate()
                .map(|(i, &p)| (i, w.distance(p, q)))
                .collect();
            oracle.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
            oracle.truncate(5);
            assert_eq!(set.nearest_k(&w, q, 5).unwrap(), oracle);
            assert_eq!(
                NeighborIndex::new(&set, &w).nearest_k(q, 5).unwrap(),
                oracle
            );
        }
    }

    #[test]
    fn grid_index_matches_exhaustive_on_many_sizes() {
        let w = Window::new(100.0).unwrap();
        let mut r = rng(3);
        for n in [1usize, 2, 3, 7, 8, 18, 19, 50, 200, 513] {
            let pts: Vec<Point> = (0..n).map(|_| w.uniform_point(&mut r)).collect();
            let set = PointSet::new(pts, n as f64 / w.area());
            let idx = NeighborIndex::new(&set, &w);
            for _ in 0..40 {
                let q = w.uniform_point(&mut r);
                let k = n.min(4);
                assert_eq!(
                    idx.nearest_k(q, k).unwrap(),
                    set.nearest_k(&w, q, k).unwrap(),
                    "n={n}"
                );
            }
        }
    }

    #[test]
    fn samples_stay_in_window() {
        let w = Window::default();
        let s = sample_ppp(0.01, &w, &mut rng(5)).unwrap();
        assert!(s.points.iter().all(|&p| w.contains(p)));
    }

    #[test]
    fn one_user_per_cell_nearest_owner() {
        let w = Window::default();
        let mut r = rng(9);
        let mbs = PointSet::new(vec![Point::new(20.0, 20.0), Point::new(70.0, 60.0)], 0.0002);
        for _ in 0..200 {
            let users = place_users(&mbs, &w, &mut r).unwrap();
            assert_eq!(users.len(), 2);
            for u in 0..2 {
                let p = users.user_coordinates[u];
                let own = w.distance(p, mbs.points[u]);
                let other = w.distance(p, mbs.points[1 - u]);
                assert!(own < other);
                assert_eq!(users.dist_to_mbs[u], own);
            }
        }
    }

    #[test]
    fn place_users_requires_mbs() {
        assert!(place_users(&PointSet::empty(), &Window::default(), &mut rng(0)).is_err());
    }
}
