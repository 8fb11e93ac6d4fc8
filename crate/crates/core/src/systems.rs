//! Finite metric spaces, bijective dynamics on them, and orbit structure.
//!
//! Every other module consumes the types defined here. A system is a finite
//! metric space (planar points or an explicit distance matrix) together with
//! a permutation of its point ids; all analysis is exact over the stored
//! `f64` distances.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Geometry backing a [`MetricSpace`]: planar coordinates (distances are
/// Euclidean, computed once at construction) or an explicit matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Planar(Vec<(f64, f64)>),
    Matrix,
}

/// A finite metric space over dense point ids `0..n`.
///
/// Distances are materialized into an `n x n` table at construction.
/// Matrix input is validated against all three metric axioms, including the
/// triangle inequality, exactly as stored; coordinate input is trusted after
/// the distances are computed (Euclidean distances cannot break symmetry or
/// the triangle inequality beyond rounding noise, which stays far below the
/// decision margins generators are required to keep).
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpace {
    n: usize,
    geometry: Geometry,
    dist: Vec<f64>,
}

impl MetricSpace {
    /// Builds a space from planar points; distances are Euclidean.
    pub fn from_points(points: Vec<(f64, f64)>) -> Result<Self, Error> {
        if points.is_empty() {
            return Err(Error::Schema("a system needs at least one point".into()));
        }
        for (id, &(x, y)) in points.iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::Schema(format!(
                    "point {id} has non-finite coordinates ({x}, {y})"
                )));
            }
        }
        let n = points.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = points[i].0 - points[j].0;
                let dy = points[i].1 - points[j].1;
                let d = (dx * dx + dy * dy).sqrt();
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        let space = MetricSpace {
            n,
            geometry: Geometry::Planar(points),
            dist,
        };
        space.check_positivity()?;
        Ok(space)
    }

    /// Builds a space from a full symmetric distance matrix.
    ///
    /// All metric axioms are validated exactly on the stored values; the
    /// triangle check is O(n^3).
    pub fn from_matrix(matrix: Vec<Vec<f64>>) -> Result<Self, Error> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::Schema("a system needs at least one point".into()));
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Schema(format!(
                    "distance_matrix row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::Schema(format!(
                        "distance_matrix[{i}][{j}] = {v} is not finite"
                    )));
                }
            }
        }
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            if matrix[i][i] != 0.0 {
                return Err(Error::NonZeroDiagonal {
                    i,
                    value: matrix[i][i],
                });
            }
            for j in 0..n {
                if matrix[i][j] != matrix[j][i] {
                    return Err(Error::AsymmetricDistance {
                        i,
                        j,
                        forward: matrix[i][j],
                        backward: matrix[j][i],
                    });
                }
                dist[i * n + j] = matrix[i][j];
            }
        }
        let space = MetricSpace {
            n,
            geometry: Geometry::Matrix,
            dist,
        };
        space.check_positivity()?;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let via = space.dist(i, j) + space.dist(j, k);
                    if space.dist(i, k) > via {
                        return Err(Error::TriangleViolation {
                            i,
                            j,
                            k,
                            direct: space.dist(i, k),
                            via,
                        });
                    }
                }
            }
        }
        Ok(space)
    }

    fn check_positivity(&self) -> Result<(), Error> {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let d = self.dist(i, j);
                if d <= 0.0 {
                    return Err(Error::NonPositiveDistance { i, j, value: d });
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    /// Maximum pairwise distance; 0 for a single point.
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                d = d.max(self.dist(i, j));
            }
        }
        d
    }

    /// Smallest positive pairwise distance, if the space has more than one point.
    pub fn min_positive_distance(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let d = self.dist(i, j);
                best = Some(match best {
                    Some(b) => b.min(d),
                    None => d,
                });
            }
        }
        best
    }

    /// All unordered pair distances, sorted ascending (with multiplicity).
    pub fn positive_distances(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n * (self.n - 1) / 2);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                out.push(self.dist(i, j));
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }

    /// Sorted distinct pairwise distances.
    pub fn distinct_distances(&self) -> Vec<f64> {
        let mut out = self.positive_distances();
        out.dedup();
        out
    }

    /// The distance at quantile `q` in [0, 1] of the sorted pair distances.
    pub fn distance_quantile(&self, q: f64) -> Option<f64> {
        let sorted = self.positive_distances();
        if sorted.is_empty() {
            return None;
        }
        let q = q.clamp(0.0, 1.0);
        let idx = (q * (sorted.len() - 1) as f64).floor() as usize;
        Some(sorted[idx])
    }
}

/// Per-point annotation carried by generated example systems:
/// level `n`, column `j`, index `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointLabel {
    pub n: u32,
    pub j: i32,
    pub i: u32,
}

/// A finite metric space together with a bijection of its points.
#[derive(Debug, Clone, PartialEq)]
pub struct DynSystem {
    space: MetricSpace,
    map: Vec<usize>,
    inverse: Vec<usize>,
    labels: Option<Vec<Option<PointLabel>>>,
}

/// On-disk form of a system.
///
/// Exactly one of `points` and `distance_matrix` must be present; `map[x]`
/// is the image of point `x`; `labels`, when present, has one (nullable)
/// entry per point.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<PointRecord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_matrix: Option<Vec<Vec<f64>>>,
    pub map: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Option<PointLabel>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointRecord {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

impl DynSystem {
    /// Validates the map as a bijection of `0..n` and assembles the system.
    pub fn new(
        space: MetricSpace,
        map: Vec<usize>,
        labels: Option<Vec<Option<PointLabel>>>,
    ) -> Result<Self, Error> {
        let n = space.len();
        if map.len() != n {
            return Err(Error::Schema(format!(
                "map has {} entries, expected {n}",
                map.len()
            )));
        }
        if let Some(ls) = &labels {
            if ls.len() != n {
                return Err(Error::Schema(format!(
                    "labels has {} entries, expected {n}",
                    ls.len()
                )));
            }
        }
        let mut seen: Vec<Option<usize>> = vec![None; n];
        for (pos, &img) in map.iter().enumerate() {
            if img >= n {
                return Err(Error::Schema(format!(
                    "map[{pos}] = {img} is out of range for {n} points"
                )));
            }
            if let Some(first) = seen[img] {
                return Err(Error::NonBijectiveMap {
                    image: img,
                    first,
                    second: pos,
                });
            }
            seen[img] = Some(pos);
        }
        let mut inverse = vec![0; n];
        for (x, &img) in map.iter().enumerate() {
            inverse[img] = x;
        }
        Ok(DynSystem {
            space,
            map,
            inverse,
            labels,
        })
    }

    /// Loads and validates a system from its JSON document form.
    pub fn from_document(doc: SystemDocument) -> Result<Self, Error> {
        let space = match (doc.points, doc.distance_matrix) {
            (Some(points), None) => {
                for (idx, p) in points.iter().enumerate() {
                    if p.id != idx {
                        return Err(Error::Schema(format!(
                            "point at position {idx} has id {}, ids must be 0..n-1 in order",
                            p.id
                        )));
                    }
                }
                MetricSpace::from_points(points.into_iter().map(|p| (p.x, p.y)).collect())?
            }
            (None, Some(matrix)) => MetricSpace::from_matrix(matrix)?,
            (Some(_), Some(_)) => {
                return Err(Error::Schema(
                    "give either points or distance_matrix, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Schema(
                    "one of points or distance_matrix is required".into(),
                ))
            }
        };
        DynSystem::new(space, doc.map, doc.labels)
    }

    /// Parses a JSON string per the system schema.
    pub fn load_str(json: &str) -> Result<Self, Error> {
        let doc: SystemDocument = serde_json::from_str(json)?;
        Self::from_document(doc)
    }

    /// Reads and validates a system file.
    pub fn load_path(path: impl AsRef<Path>) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        Self::load_str(&text)
    }

    /// The document form of this system (inverse of loading, bit-exact).
    pub fn to_document(&self) -> SystemDocument {
        let (points, distance_matrix) = match self.space.geometry() {
            Geometry::Planar(pts) => (
                Some(
                    pts.iter()
                        .enumerate()
                        .map(|(id, &(x, y))| PointRecord { id, x, y })
                        .collect(),
                ),
                None,
            ),
            Geometry::Matrix => {
                let n = self.len();
                let rows = (0..n)
                    .map(|i| (0..n).map(|j| self.space.dist(i, j)).collect())
                    .collect();
                (None, Some(rows))
            }
        };
        SystemDocument {
            points,
            distance_matrix,
            map: self.map.clone(),
            labels: self.labels.clone(),
        }
    }

    /// Pretty JSON of the document form, with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_document())
            .expect("system documents always serialize");
        s.push('\n');
        s
    }

    pub fn space(&self) -> &MetricSpace {
        &self.space
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> &[usize] {
        &self.inverse
    }

    pub fn labels(&self) -> Option<&[Option<PointLabel>]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    /// Length of the cycle through `x`.
    pub fn point_period(&self, x: usize) -> u64 {
        let mut cur = self.map[x];
        let mut period = 1;
        while cur != x {
            cur = self.map[cur];
            period += 1;
        }
        period
    }

    /// `map^k(x)` for any integer `k` (negative powers via the inverse).
    pub fn apply_power(&self, x: usize, k: i64) -> usize {
        let period = self.point_period(x) as i64;
        let steps = k.rem_euclid(period) as u64;
        let mut cur = x;
        for _ in 0..steps {
            cur = self.map[cur];
        }
        cur
    }

    /// Largest distance between the orbits of `x` and `y`, time-aligned,
    /// over one full joint period.
    pub fn sup_orbit_distance(&self, x: usize, y: usize) -> f64 {
        self.fold_orbit_distance(x, y, 0.0, f64::max)
    }

    /// Smallest distance between the orbits of `x` and `y`, time-aligned,
    /// over one full joint period.
    pub fn min_orbit_distance(&self, x: usize, y: usize) -> f64 {
        self.fold_orbit_distance(x, y, f64::INFINITY, f64::min)
    }

    fn fold_orbit_distance(&self, x: usize, y: usize, init: f64, f: fn(f64, f64) -> f64) -> f64 {
        let steps = lcm_u128(self.point_period(x) as u128, self.point_period(y) as u128);
        let (mut cx, mut cy) = (x, y);
        let mut acc = init;
        let mut t: u128 = 0;
        while t < steps {
            acc = f(acc, self.space.dist(cx, cy));
            cx = self.map[cx];
            cy = self.map[cy];
            t += 1;
        }
        acc
    }
}

/// The cycle structure of a system's permutation.
///
/// Cycles are sorted by smallest member and listed starting from it;
/// `order` is the least common multiple of all cycle lengths (the order of
/// the map in the symmetric group), saturating at `u128::MAX`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitDecomposition {
    pub cycles: Vec<Vec<usize>>,
    pub period_of: Vec<usize>,
    pub cycle_of: Vec<usize>,
    pub order: u128,
}

impl OrbitDecomposition {
    /// Cardinality of the orbit of `x`.
    pub fn orbit_size(&self, x: usize) -> usize {
        self.period_of[x]
    }

    /// Whether `x` and `y` lie on a common cycle.
    pub fn same_orbit(&self, x: usize, y: usize) -> bool {
        self.cycle_of[x] == self.cycle_of[y]
    }
}

/// Decomposes the map into cycles.
pub fn orbit_decomposition(sys: &DynSystem) -> OrbitDecomposition {
    let n = sys.len();
    let map = sys.map();
    let mut cycles = Vec::new();
    let mut period_of = vec![0usize; n];
    let mut cycle_of = vec![usize::MAX; n];
    for start in 0..n {
        if cycle_of[start] != usize::MAX {
            continue;
        }
        let id = cycles.len();
        let mut cycle = vec![start];
        cycle_of[start] = id;
        let mut cur = map[start];
        while cur != start {
            cycle_of[cur] = id;
            cycle.push(cur);
            cur = map[cur];
        }
        let len = cycle.len();
        for &p in &cycle {
            period_of[p] = len;
        }
        cycles.push(cycle);
    }
    let order = cycles
        .iter()
        .fold(1u128, |acc, c| lcm_u128(acc, c.len() as u128));
    OrbitDecomposition {
        cycles,
        period_of,
        cycle_of,
        order,
    }
}

/// The `k`-fold composition of the system's map over the same space.
///
/// Negative `k` composes the inverse; `k = 0` is rejected. Labels are
/// preserved.
pub fn power_system(sys: &DynSystem, k: i64) -> Result<DynSystem, Error> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "power exponent k must be nonzero".into(),
        ));
    }
    let map = permutation_power(sys.map(), k);
    DynSystem::new(sys.space().clone(), map, sys.labels().map(|ls| ls.to_vec()))
}

/// Raises a permutation to the `k`-th power by rotating each cycle.
pub(crate) fn permutation_power(map: &[usize], k: i64) -> Vec<usize> {
    let n = map.len();
    let mut out = vec![usize::MAX; n];
    let mut visited = vec![false; n];
    for start in 0..n {
        if visited[start] {
            continue;
        }
        let mut cycle = vec![start];
        visited[start] = true;
        let mut cur = map[start];
        while cur != start {
            visited[cur] = true;
            cycle.push(cur);
            cur = map[cur];
        }
        let len = cycle.len() as i64;
        let shift = k.rem_euclid(len) as usize;
        for (t, &p) in cycle.iter().enumerate() {
            out[p] = cycle[(t + shift) % cycle.len()];
        }
    }
    out
}

pub(crate) fn gcd_u128(a: u128, b: u128) -> u128 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

pub(crate) fn lcm_u128(a: u128, b: u128) -> u128 {
    if a == 0 || b == 0 {
        return 0;
    }
    let g = gcd_u128(a, b);
    (a / g).saturating_mul(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn collinear_three_cycle() -> DynSystem {
        let space = MetricSpace::from_points(vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]).unwrap();
        DynSystem::new(space, vec![1, 2, 0], None).unwrap()
    }

    #[test]
    fn load_one_point_identity() {
        let sys =
            DynSystem::load_str(r#"{ "points": [{"id":0,"x":0.0,"y":0.0}], "map": [0] }"#).unwrap();
        assert_eq!(sys.len(), 1);
        assert_eq!(sys.map(), &[0]);
    }

    #[test]
    fn load_collinear_three_cycle() {
        let json = r#"{
            "points": [{"id":0,"x":0.0,"y":0.0},{"id":1,"x":1.0,"y":0.0},{"id":2,"x":2.0,"y":0.0}],
            "map": [1, 2, 0]
        }"#;
        let sys = DynSystem::load_str(json).unwrap();
        assert_eq!(sys.len(), 3);
        assert_eq!(sys.point_period(0), 3);
        assert_eq!(sys.space().dist(0, 2), 2.0);
    }

    #[test]
    fn load_rejects_non_bijective_map() {
        let json = r#"{
            "points": [{"id":0,"x":0.0,"y":0.0},{"id":1,"x":1.0,"y":0.0},{"id":2,"x":2.0,"y":0.0}],
            "map": [0, 0, 2]
        }"#;
        let err = DynSystem::load_str(json).unwrap_err();
        assert!(err.to_string().contains("non-bijective: image 0 repeated"));
    }

    #[test]
    fn load_rejects_out_of_order_ids() {
        let json = r#"{
            "points": [{"id":1,"x":0.0,"y":0.0},{"id":0,"x":1.0,"y":0.0}],
            "map": [0, 1]
        }"#;
        assert!(matches!(DynSystem::load_str(json), Err(Error::Schema(_))));
    }

    #[test]
    fn load_rejects_unknown_fields() {
        let json = r#"{ "points": [{"id":0,"x":0.0,"y":0.0}], "map": [0], "extra": 1 }"#;
        assert!(matches!(DynSystem::load_str(json), Err(Error::Json(_))));
    }

    #[test]
    fn matrix_validation_catches_axiom_breaks() {
        let asym = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        assert!(matches!(
            MetricSpace::from_matrix(asym),
            Err(Error::AsymmetricDistance { .. })
        ));

        let diag = vec![vec![0.5, 1.0], vec![1.0, 0.0]];
        assert!(matches!(
            MetricSpace::from_matrix(diag),
            Err(Error::NonZeroDiagonal { .. })
        ));

        let zero = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        assert!(matches!(
            MetricSpace::from_matrix(zero),
            Err(Error::NonPositiveDistance { .. })
        ));

        let triangle = vec![
            vec![0.0, 1.0, 3.0],
            vec![1.0, 0.0, 1.0],
            vec![3.0, 1.0, 0.0],
        ];
        assert!(matches!(
            MetricSpace::from_matrix(triangle),
            Err(Error::TriangleViolation { .. })
        ));
    }

    #[test]
    fn orbit_decomposition_identity() {
        let space = MetricSpace::from_points((0..5).map(|i| (i as f64, 0.0)).collect()).unwrap();
        let sys = DynSystem::new(space, (0..5).collect(), None).unwrap();
        let od = orbit_decomposition(&sys);
        assert_eq!(od.cycles.len(), 5);
        assert!(od.cycles.iter().all(|c| c.len() == 1));
        assert_eq!(od.order, 1);
    }

    #[test]
    fn orbit_decomposition_three_cycle() {
        let od = orbit_decomposition(&collinear_three_cycle());
        assert_eq!(od.cycles, vec![vec![0, 1, 2]]);
        assert_eq!(od.period_of, vec![3, 3, 3]);
        assert_eq!(od.order, 3);
    }

    #[test]
    fn power_identity_exponent() {
        let sys = collinear_three_cycle();
        let p1 = power_system(&sys, 1).unwrap();
        assert_eq!(p1.map(), sys.map());
    }

    #[test]
    fn power_full_period_is_identity() {
        let sys = collinear_three_cycle();
        let p3 = power_system(&sys, 3).unwrap();
        assert_eq!(p3.map(), &[0, 1, 2]);
    }

    #[test]
    fn power_rejects_zero() {
        let sys = collinear_three_cycle();
        assert!(matches!(
            power_system(&sys, 0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn power_negative_is_inverse() {
        let sys = collinear_three_cycle();
        let inv = power_system(&sys, -1).unwrap();
        assert_eq!(inv.map(), sys.inverse());
    }

    #[test]
    fn document_round_trip_is_exact() {
        let sys = collinear_three_cycle();
        let reloaded = DynSystem::load_str(&sys.to_json()).unwrap();
        assert_eq!(reloaded, sys);
    }

    #[test]
    fn matrix_document_round_trip_is_exact() {
        let space = MetricSpace::from_matrix(vec![
            vec![0.0, 1.0, 1.5],
            vec![1.0, 0.0, 1.2],
            vec![1.5, 1.2, 0.0],
        ])
        .unwrap();
        let sys = DynSystem::new(space, vec![2, 0, 1], None).unwrap();
        let reloaded = DynSystem::load_str(&sys.to_json()).unwrap();
        assert_eq!(reloaded, sys);
    }
}
