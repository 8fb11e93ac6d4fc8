//! Generators for the example families the analyses are exercised on: the
//! layered tube family whose balls grow with the truncation level, the
//! power-witness pairs it contains, a rigid double circle, and identity
//! systems on Cantor-set endpoints.

use std::fmt;
use std::sync::Arc;

use crate::error::Error;
use crate::systems::{orbit_decomposition, power_system, DynSystem, MetricSpace, PointLabel};

/// Human-readable form of the default spacing rule.
pub const DEFAULT_SPACING_RULE: &str = "1/n+i/(4n^3)";

/// Vertical spacing rule for the tube values `a(n, i)`, `i` in `0..n`.
///
/// The default `1/n + i/(4n^3)` keeps levels pairwise disjoint with margin
/// and tube widths `(n-1)/(4n^3)` strictly decreasing for `n >= 2`, so one
/// fixed resolution captures whole tubes at every level while staying far
/// from any decision boundary. Any other rule satisfying the disjointness
/// invariant can be plugged in.
#[derive(Clone)]
pub enum Spacing {
    Default,
    Custom(Arc<dyn Fn(u32, u32) -> f64 + Send + Sync>),
}

impl Spacing {
    pub fn value(&self, n: u32, i: u32) -> f64 {
        match self {
            Spacing::Default => {
                let nf = n as f64;
                1.0 / nf + i as f64 / (4.0 * nf * nf * nf)
            }
            Spacing::Custom(f) => f(n, i),
        }
    }
}

impl fmt::Debug for Spacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spacing::Default => write!(f, "Spacing::Default({DEFAULT_SPACING_RULE})"),
            Spacing::Custom(_) => write!(f, "Spacing::Custom(..)"),
        }
    }
}

/// Parameters for the layered tube family.
#[derive(Debug, Clone)]
pub struct WineParams {
    /// Highest level `M`; level `n` contributes `n * (2n + 1)` points.
    pub max_level: u32,
    pub spacing: Spacing,
    /// Adds an isolated fixed point at infinity; all distances then switch
    /// to the chordal metric of the one-point compactification.
    pub include_fixed_point: bool,
}

impl WineParams {
    pub fn new(max_level: u32) -> Self {
        WineParams {
            max_level,
            spacing: Spacing::Default,
            include_fixed_point: false,
        }
    }
}

/// Id of the point at level `n`, column `j`, index `i` in the generated
/// layout, or `None` when out of range. The fixed point at infinity, when
/// present, takes the final id.
pub fn wine_point_id(max_level: u32, n: u32, j: i32, i: u32) -> Option<usize> {
    if n < 1 || n > max_level || j < -(n as i32) || j > n as i32 || i >= n {
        return None;
    }
    let base: usize = (1..n).map(|v| v as usize * (2 * v as usize + 1)).sum();
    Some(base + (j + n as i32) as usize * n as usize + i as usize)
}

fn validate_spacing(params: &WineParams) -> Result<Vec<Vec<f64>>, Error> {
    let mut levels: Vec<Vec<f64>> = Vec::with_capacity(params.max_level as usize);
    for n in 1..=params.max_level {
        let values: Vec<f64> = (0..n).map(|i| params.spacing.value(n, i)).collect();
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::SpacingRule {
                    level: n,
                    reason: format!("a({n}, {i}) = {v} is not a positive finite value"),
                });
            }
        }
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::SpacingRule {
                level: n,
                reason: "tube values must be pairwise distinct".into(),
            });
        }
        if let Some(prev) = levels.last() {
            let prev_min = prev.iter().copied().fold(f64::INFINITY, f64::min);
            let cur_max = sorted[sorted.len() - 1];
            if cur_max >= prev_min {
                return Err(Error::SpacingRule {
                    level: n,
                    reason: format!(
                        "levels overlap: max(A_{n}) = {cur_max} reaches min(A_{}) = {prev_min}",
                        n - 1
                    ),
                });
            }
        }
        levels.push(values);
    }
    Ok(levels)
}

/// Generates the layered tube family truncated at `max_level`.
///
/// Points are `(j, a(n, i))` for levels `1..=M`, columns `-n..=n`, indices
/// `0..n`, with Euclidean distances. The map advances the column and, on
/// wrapping from column `n` to `-n`, increments the index mod `n`; level
/// `n` is a single cycle of length `n * (2n + 1)`. Labels carry `(n, j, i)`.
///
/// A non-periodic integer-line orbit cannot live inside a finite bijection,
/// so only the optional fixed point at infinity survives compactification:
/// with `include_fixed_point` the system is emitted as a distance matrix
/// under the chordal metric and infinity becomes an isolated fixed point.
pub fn gen_wine(params: &WineParams) -> Result<DynSystem, Error> {
    if params.max_level < 1 {
        return Err(Error::InvalidParameter(
            "max_level must be at least 1".into(),
        ));
    }
    let levels = validate_spacing(params)?;

    let mut coords: Vec<(f64, f64)> = Vec::new();
    let mut labels: Vec<Option<PointLabel>> = Vec::new();
    for n in 1..=params.max_level {
        let values = &levels[(n - 1) as usize];
        for j in -(n as i32)..=(n as i32) {
            for i in 0..n {
                coords.push((j as f64, values[i as usize]));
                labels.push(Some(PointLabel { n, j, i }));
            }
        }
    }

    let finite_count = coords.len();
    let mut map = vec![0usize; finite_count];
    for n in 1..=params.max_level {
        for j in -(n as i32)..=(n as i32) {
            for i in 0..n {
                let from = wine_point_id(params.max_level, n, j, i).unwrap();
                let to = if j < n as i32 {
                    wine_point_id(params.max_level, n, j + 1, i).unwrap()
                } else {
                    wine_point_id(params.max_level, n, -(n as i32), (i + 1) % n).unwrap()
                };
                map[from] = to;
            }
        }
    }

    if params.include_fixed_point {
        let total = finite_count + 1;
        let mut matrix = vec![vec![0.0f64; total]; total];
        let chordal_weight = |&(x, y): &(f64, f64)| -> f64 { (1.0 + x * x + y * y).sqrt() };
        for a in 0..finite_count {
            for b in (a + 1)..finite_count {
                let (ax, ay) = coords[a];
                let (bx, by) = coords[b];
                let dx = ax - bx;
                let dy = ay - by;
                let d = 2.0 * (dx * dx + dy * dy).sqrt()
                    / (chordal_weight(&coords[a]) * chordal_weight(&coords[b]));
                matrix[a][b] = d;
                matrix[b][a] = d;
            }
        }
        for a in 0..finite_count {
            let d = 2.0 / chordal_weight(&coords[a]);
            matrix[a][finite_count] = d;
            matrix[finite_count][a] = d;
        }
        let space = MetricSpace::from_matrix(matrix)?;
        let mut full_map = map;
        full_map.push(finite_count);
        labels.push(None);
        DynSystem::new(space, full_map, Some(labels))
    } else {
        let space = MetricSpace::from_points(coords)?;
        DynSystem::new(space, map, Some(labels))
    }
}

/// A pair in one periodic orbit that the `k`-th power of the map splits
/// into two orbits while their whole joint orbit stays at tube scale.
#[derive(Debug, Clone)]
pub struct WitnessCase {
    pub k: u32,
    pub m: u32,
    pub system: DynSystem,
    pub x_id: usize,
    pub y_id: usize,
    /// `km (2km + 1)`: the shared period of the pair under the base map.
    pub claimed_period: u64,
    /// `2km + 1`: the power sending `x` to `y`.
    pub claimed_shift: u64,
    /// Largest distance along one full joint period of the pair.
    pub sup_orbit_distance: f64,
}

/// Builds the witness pair `x = (0, a(km, 1))`, `y = (0, a(km, 2))` inside
/// the tube family (indices taken mod `km`) and verifies the claimed
/// period, shift, and the splitting of the pair into distinct cycles of
/// the `k`-th power before returning.
pub fn gen_power_witness(k: u32, m: u32, params: &WineParams) -> Result<WitnessCase, Error> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "power witness needs k >= 2, got {k}"
        )));
    }
    if m < 1 {
        return Err(Error::InvalidParameter(format!(
            "power witness needs m >= 1, got {m}"
        )));
    }
    let level = k * m;
    if params.max_level < level {
        return Err(Error::InvalidParameter(format!(
            "truncation level {} is below the witness level km = {level}",
            params.max_level
        )));
    }
    let system = gen_wine(params)?;
    let x_id = wine_point_id(params.max_level, level, 0, 1 % level).expect("witness x is in range");
    let y_id = wine_point_id(params.max_level, level, 0, 2 % level).expect("witness y is in range");

    let level64 = level as u64;
    let claimed_period = level64 * (2 * level64 + 1);
    let claimed_shift = 2 * level64 + 1;

    let actual_period = system.point_period(x_id);
    if actual_period != claimed_period {
        return Err(Error::WitnessInvariant(format!(
            "period of x is {actual_period}, claimed {claimed_period}"
        )));
    }
    let mut cur = x_id;
    for _ in 0..claimed_shift {
        cur = system.map()[cur];
    }
    if cur != y_id {
        return Err(Error::WitnessInvariant(format!(
            "map^{claimed_shift}(x) = {cur}, expected y = {y_id}"
        )));
    }
    let powered = power_system(&system, k as i64)?;
    let power_orbits = orbit_decomposition(&powered);
    if power_orbits.same_orbit(x_id, y_id) {
        return Err(Error::WitnessInvariant(format!(
            "x and y share a cycle of the {k}-th power"
        )));
    }

    let sup_orbit_distance = system.sup_orbit_distance(x_id, y_id);
    Ok(WitnessCase {
        k,
        m,
        system,
        x_id,
        y_id,
        claimed_period,
        claimed_shift,
        sup_orbit_distance,
    })
}

/// Two concentric rigid rotations: `n_angles` points on radius 1 and on
/// radius `1 + rho`, both advanced one angle step by the map.
///
/// Emitted as a distance matrix indexed by ring and angle difference, so
/// the map is an exact isometry of the stored values: same-angle pairs sit
/// at exactly `rho` forever, and the diameter-line equalities (for even
/// `n_angles`) are built as the literal sums the triangle check compares
/// against.
pub fn gen_double_circle(n_angles: usize, rho: f64) -> Result<DynSystem, Error> {
    if n_angles < 2 {
        return Err(Error::InvalidParameter(format!(
            "double circle needs at least 2 angles, got {n_angles}"
        )));
    }
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "radial gap rho must be positive and finite, got {rho}"
        )));
    }
    let n = n_angles;
    let r_outer = 1.0 + rho;
    let half = |delta: usize| 2 * delta == n;
    let chord_unit = |delta: usize| -> f64 {
        if half(delta) {
            2.0
        } else {
            2.0 * (std::f64::consts::PI * delta as f64 / n as f64).sin()
        }
    };
    let antipodal_cross = 2.0 + rho;
    let inner_inner = |delta: usize| chord_unit(delta);
    let outer_outer = |delta: usize| {
        if half(delta) {
            antipodal_cross + rho
        } else {
            r_outer * chord_unit(delta)
        }
    };
    let cross = |delta: usize| -> f64 {
        if delta == 0 {
            rho
        } else if half(delta) {
            antipodal_cross
        } else {
            let angle = std::f64::consts::TAU * delta as f64 / n as f64;
            (1.0 + r_outer * r_outer - 2.0 * r_outer * angle.cos()).sqrt()
        }
    };

    let total = 2 * n;
    let mut matrix = vec![vec![0.0f64; total]; total];
    for a in 0..total {
        for b in (a + 1)..total {
            let (ring_a, t_a) = (a / n, a % n);
            let (ring_b, t_b) = (b / n, b % n);
            let delta = (t_b + n - t_a) % n;
            let delta = delta.min(n - delta);
            let d = match (ring_a, ring_b) {
                (0, 0) => inner_inner(delta),
                (1, 1) => outer_outer(delta),
                _ => cross(delta),
            };
            matrix[a][b] = d;
            matrix[b][a] = d;
        }
    }
    let space = MetricSpace::from_matrix(matrix)?;
    let map = (0..total)
        .map(|p| {
            let (ring, t) = (p / n, p % n);
            ring * n + (t + 1) % n
        })
        .collect();
    DynSystem::new(space, map, None)
}

/// The identity map on the first `n` left endpoints of the middle-thirds
/// construction on [0, 1], enumerated level by level.
pub fn gen_identity_space(n: usize) -> Result<DynSystem, Error> {
    if n < 1 {
        return Err(Error::InvalidParameter(
            "identity space needs at least 1 point".into(),
        ));
    }
    let mut chosen = vec![0.0f64];
    let mut current = vec![0.0f64];
    let mut depth = 1;
    while chosen.len() < n {
        let step = 2.0 / 3f64.powi(depth);
        let new: Vec<f64> = current.iter().map(|&e| e + step).collect();
        for &v in &new {
            if chosen.len() < n {
                chosen.push(v);
            }
        }
        current.extend(new);
        current.sort_by(f64::total_cmp);
        depth += 1;
    }
    let space = MetricSpace::from_points(chosen.into_iter().map(|x| (x, 0.0)).collect())?;
    DynSystem::new(space, (0..n).collect(), None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{orbit_decomposition, Geometry};

    #[test]
    fn wine_level_one_is_a_three_cycle() {
        let sys = gen_wine(&WineParams::new(1)).unwrap();
        assert_eq!(sys.len(), 3);
        let od = orbit_decomposition(&sys);
        assert_eq!(od.cycles.len(), 1);
        assert_eq!(od.order, 3);
    }

    #[test]
    fn wine_level_two_counts_and_periods() {
        let sys = gen_wine(&WineParams::new(2)).unwrap();
        assert_eq!(sys.len(), 13);
        let od = orbit_decomposition(&sys);
        let mut lengths: Vec<usize> = od.cycles.iter().map(Vec::len).collect();
        lengths.sort_unstable();
        assert_eq!(lengths, vec![3, 10]);
        assert_eq!(od.order, 30);
    }

    #[test]
    fn wine_fixed_point_variant() {
        let params = WineParams {
            include_fixed_point: true,
            ..WineParams::new(1)
        };
        let sys = gen_wine(&params).unwrap();
        assert_eq!(sys.len(), 4);
        assert_eq!(sys.map()[3], 3);
        assert_eq!(sys.labels().unwrap()[3], None);
    }

    #[test]
    fn wine_map_follows_the_wrap_rule() {
        let sys = gen_wine(&WineParams::new(3)).unwrap();
        let id = |n, j, i| wine_point_id(3, n, j, i).unwrap();
        assert_eq!(sys.map()[id(3, 0, 1)], id(3, 1, 1));
        assert_eq!(sys.map()[id(3, 3, 1)], id(3, -3, 2));
        assert_eq!(sys.map()[id(3, 3, 2)], id(3, -3, 0));
    }

    #[test]
    fn wine_rejects_overlapping_spacing() {
        let params = WineParams {
            spacing: Spacing::Custom(Arc::new(|_, i| 1.0 + i as f64)),
            ..WineParams::new(2)
        };
        assert!(matches!(gen_wine(&params), Err(Error::SpacingRule { .. })));
    }

    #[test]
    fn power_witness_small_case() {
        let case = gen_power_witness(3, 1, &WineParams::new(3)).unwrap();
        assert_eq!(case.claimed_period, 21);
        assert_eq!(case.claimed_shift, 7);
        // Largest cyclic tube gap at level 3: (n-1)/(4 n^3).
        assert!((case.sup_orbit_distance - 2.0 / 108.0).abs() < 1e-12);
    }

    #[test]
    fn power_witness_rejects_small_truncation() {
        assert!(matches!(
            gen_power_witness(2, 3, &WineParams::new(5)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn double_circle_structure() {
        let sys = gen_double_circle(4, 0.5).unwrap();
        assert_eq!(sys.len(), 8);
        let od = orbit_decomposition(&sys);
        assert_eq!(od.cycles.len(), 2);
        assert!(od.cycles.iter().all(|c| c.len() == 4));
        // Same-angle distance is exactly rho and constant along the orbit.
        assert_eq!(sys.space().dist(0, 4), 0.5);
        assert_eq!(sys.sup_orbit_distance(0, 4), 0.5);
    }

    #[test]
    fn double_circle_even_antipodes_validate() {
        for n in [2usize, 6, 8, 16] {
            gen_double_circle(n, 0.05).unwrap();
        }
        for n in [3usize, 5, 9] {
            gen_double_circle(n, 0.05).unwrap();
        }
    }

    #[test]
    fn identity_space_endpoints() {
        let sys = gen_identity_space(4).unwrap();
        let Geometry::Planar(pts) = sys.space().geometry() else {
            panic!("planar geometry expected");
        };
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        assert_eq!(xs, vec![0.0, 2.0 / 3.0, 2.0 / 9.0, 2.0 / 3.0 + 2.0 / 9.0]);
        assert!(sys.map().iter().enumerate().all(|(i, &img)| i == img));
    }
}
