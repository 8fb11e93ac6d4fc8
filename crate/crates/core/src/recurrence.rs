//! Displacement norms, recurrence profiles, minimality, near-approach
//! scans, and expansivity of the cyclic group of map powers.
//!
//! The displacement norm of a map `g` is `max_x d(x, g(x))`. Every finite
//! bijection is recurrent: composing the map `L` times (the order of the
//! permutation) yields the identity, whose displacement is 0.

use serde::Serialize;

use crate::error::Error;
use crate::systems::{orbit_decomposition, DynSystem};

/// Default cap on the displacement sequence length `L`.
pub const DEFAULT_SEQUENCE_CAP: u64 = 1_000_000;

/// Default cap on materialized group entries (`L` permutations of `n` points).
pub const DEFAULT_GROUP_ENTRY_CAP: u64 = 1_000_000;

/// Displacement sequence `|f^n|` for `n = 1..=L` and, per requested
/// closeness `epsilon`, the first power moving every point less than it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceProfile {
    #[serde(rename = "L")]
    pub order: u64,
    /// `displacement[i]` is `|f^(i+1)|`; the final entry is exactly 0.
    pub displacement: Vec<f64>,
    pub minimal_n: Vec<MinimalPower>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimalPower {
    pub epsilon: f64,
    /// Smallest `n` in `1..=L` with `|f^n| < epsilon`; `L` always qualifies.
    pub n: u64,
}

/// Computes the displacement sequence with the default length cap.
pub fn recurrence_profile(sys: &DynSystem, eps_list: &[f64]) -> Result<RecurrenceProfile, Error> {
    recurrence_profile_capped(sys, eps_list, DEFAULT_SEQUENCE_CAP)
}

/// Computes the displacement sequence, rejecting systems whose permutation
/// order exceeds `cap` rather than truncating.
pub fn recurrence_profile_capped(
    sys: &DynSystem,
    eps_list: &[f64],
    cap: u64,
) -> Result<RecurrenceProfile, Error> {
    for &eps in eps_list {
        if !eps.is_finite() || eps <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "recurrence epsilon must be positive and finite, got {eps}"
            )));
        }
    }
    let orbits = orbit_decomposition(sys);
    if orbits.order > cap as u128 {
        return Err(Error::GroupTooLarge {
            order: orbits.order,
            points: sys.len(),
            cap,
        });
    }
    let order = orbits.order as u64;
    let n = sys.len();
    let map = sys.map();
    let space = sys.space();

    let mut displacement = Vec::with_capacity(order as usize);
    let mut current: Vec<usize> = (0..n).collect();
    for _ in 0..order {
        for img in current.iter_mut() {
            *img = map[*img];
        }
        let norm = (0..n)
            .map(|x| space.dist(x, current[x]))
            .fold(0.0, f64::max);
        displacement.push(norm);
    }

    let minimal_n = eps_list
        .iter()
        .map(|&epsilon| {
            let idx = displacement
                .iter()
                .position(|&d| d < epsilon)
                .expect("the identity power has displacement 0");
            MinimalPower {
                epsilon,
                n: idx as u64 + 1,
            }
        })
        .collect();

    Ok(RecurrenceProfile {
        order,
        displacement,
        minimal_n,
    })
}

/// Grid-relative expansivity of the cyclic group of map powers.
///
/// For each `eps` in `eps_grid`, asks whether some `delta` in `delta_grid`
/// works: every pair `(x, y)` with `max_{g in G} d(g(x), g(y)) < delta`
/// must admit a group element `g` with `y = g(x)` and `|g| < eps`. The
/// quantifiers range over the recorded finite grids, so verdicts are
/// reproducible. (The group-expansivity hypothesis is sometimes stated
/// with a stray eta where its delta is meant; delta is used here.)
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupExpansivityReport {
    pub eps_grid: Vec<f64>,
    pub delta_grid: Vec<f64>,
    pub verdicts: Vec<EpsVerdict>,
    pub overall: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsVerdict {
    pub eps: f64,
    pub holds: bool,
    /// Largest grid delta that works, when one does.
    pub witness_delta: Option<f64>,
}

/// Runs the group-expansivity check on default grids: deltas from the
/// distinct positive pair distances, eps values from the distinct positive
/// displacement norms of the group elements.
pub fn cyclic_group_expansivity(sys: &DynSystem) -> Result<GroupExpansivityReport, Error> {
    group_expansivity_impl(sys, None, DEFAULT_GROUP_ENTRY_CAP)
}

/// Same check on caller-supplied grids.
pub fn cyclic_group_expansivity_with_grids(
    sys: &DynSystem,
    eps_grid: Vec<f64>,
    delta_grid: Vec<f64>,
) -> Result<GroupExpansivityReport, Error> {
    group_expansivity_impl(sys, Some((eps_grid, delta_grid)), DEFAULT_GROUP_ENTRY_CAP)
}

fn group_expansivity_impl(
    sys: &DynSystem,
    grids: Option<(Vec<f64>, Vec<f64>)>,
    entry_cap: u64,
) -> Result<GroupExpansivityReport, Error> {
    let n = sys.len();
    let orbits = orbit_decomposition(sys);
    if orbits.order.saturating_mul(n as u128) > entry_cap as u128 {
        return Err(Error::GroupTooLarge {
            order: orbits.order,
            points: n,
            cap: entry_cap,
        });
    }
    let order = orbits.order as usize;
    let space = sys.space();

    // Materialize G = {f^0, ..., f^(L-1)} and the norm of each element.
    let mut group: Vec<Vec<usize>> = Vec::with_capacity(order);
    group.push((0..n).collect());
    for t in 1..order {
        let prev = &group[t - 1];
        group.push(sys.map().iter().map(|&img| prev[img]).collect());
    }
    // Composition order is irrelevant for norms: powers of one map commute.
    let norms: Vec<f64> = group
        .iter()
        .map(|g| (0..n).map(|x| space.dist(x, g[x])).fold(0.0, f64::max))
        .collect();

    let (eps_grid, delta_grid) = match grids {
        Some((mut eps, mut delta)) => {
            eps.sort_by(f64::total_cmp);
            eps.dedup();
            delta.sort_by(f64::total_cmp);
            delta.dedup();
            (eps, delta)
        }
        None => {
            let mut eps: Vec<f64> = norms.iter().copied().filter(|&v| v > 0.0).collect();
            eps.sort_by(f64::total_cmp);
            eps.dedup();
            (eps, space.distinct_distances())
        }
    };

    // For each unordered pair: the sup of d(g x, g y) over the group, and
    // the smallest norm of a group element sending x to y (infinite when
    // the pair spans two orbits). Both are symmetric: the inverse of f^t
    // is f^(L-t) and shares its norm.
    let mut pair_stats = Vec::with_capacity(n.saturating_sub(1) * n / 2);
    for x in 0..n {
        for y in (x + 1)..n {
            let mut sup = 0.0f64;
            let mut min_norm = f64::INFINITY;
            for (g, &norm) in group.iter().zip(&norms) {
                sup = sup.max(space.dist(g[x], g[y]));
                if g[x] == y {
                    min_norm = min_norm.min(norm);
                }
            }
            pair_stats.push((sup, min_norm));
        }
    }
    pair_stats.sort_by(|a, b| a.0.total_cmp(&b.0));

    // worst_norm[i]: the largest min-norm among pairs with sup distance
    // strictly below delta_grid[i]. Nondecreasing in delta.
    let mut worst_norm = Vec::with_capacity(delta_grid.len());
    let mut running = 0.0f64;
    let mut cursor = 0;
    for &delta in &delta_grid {
        while cursor < pair_stats.len() && pair_stats[cursor].0 < delta {
            running = running.max(pair_stats[cursor].1);
            cursor += 1;
        }
        worst_norm.push(running);
    }

    let verdicts: Vec<EpsVerdict> = eps_grid
        .iter()
        .map(|&eps| {
            let works = worst_norm.partition_point(|&w| w < eps);
            if works > 0 {
                EpsVerdict {
                    eps,
                    holds: true,
                    witness_delta: Some(delta_grid[works - 1]),
                }
            } else {
                EpsVerdict {
                    eps,
                    holds: false,
                    witness_delta: None,
                }
            }
        })
        .collect();
    let overall = verdicts.iter().all(|v| v.holds);

    Ok(GroupExpansivityReport {
        eps_grid,
        delta_grid,
        verdicts,
        overall,
    })
}

/// Whether a single cycle covers the space, and how many cycles there are.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinimalityReport {
    pub minimal: bool,
    pub orbit_count: usize,
}

/// A finite system is minimal iff one orbit covers every point.
pub fn minimality(sys: &DynSystem) -> MinimalityReport {
    let orbit_count = orbit_decomposition(sys).cycles.len();
    MinimalityReport {
        minimal: orbit_count == 1,
        orbit_count,
    }
}

/// A pair of distinct points whose orbits come within `delta` of each
/// other at some time, with the minimum attained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProximalPair {
    pub x: usize,
    pub y: usize,
    pub min_distance: f64,
}

/// Scans all distinct pairs for close approaches: the minimum of
/// `d(map^t x, map^t y)` over one full joint period, kept when `<= delta`.
///
/// True asymptotic pairs cannot exist for distinct points of a finite
/// bijection; this returns the finite-scale evidence instead.
pub fn asymptotic_scan(sys: &DynSystem, delta: f64) -> Result<Vec<ProximalPair>, Error> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "scan delta must be positive and finite, got {delta}"
        )));
    }
    let n = sys.len();
    let mut out = Vec::new();
    for x in 0..n {
        for y in (x + 1)..n {
            let min = sys.min_orbit_distance(x, y);
            if min <= delta {
                out.push(ProximalPair {
                    x,
                    y,
                    min_distance: min,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{DynSystem, MetricSpace};

    fn circle(n: usize, radius: f64) -> DynSystem {
        let pts = (0..n)
            .map(|t| {
                let a = std::f64::consts::TAU * t as f64 / n as f64;
                (radius * a.cos(), radius * a.sin())
            })
            .collect();
        let space = MetricSpace::from_points(pts).unwrap();
        let map = (0..n).map(|t| (t + 1) % n).collect();
        DynSystem::new(space, map, None).unwrap()
    }

    fn identity_pair(distance: f64) -> DynSystem {
        let space = MetricSpace::from_points(vec![(0.0, 0.0), (distance, 0.0)]).unwrap();
        DynSystem::new(space, vec![0, 1], None).unwrap()
    }

    #[test]
    fn identity_recurs_immediately() {
        let sys = identity_pair(1.0);
        let profile = recurrence_profile(&sys, &[0.5, 2.0]).unwrap();
        assert_eq!(profile.order, 1);
        assert_eq!(profile.displacement, vec![0.0]);
        assert!(profile.minimal_n.iter().all(|m| m.n == 1));
    }

    #[test]
    fn circle_recurs_only_at_full_turn() {
        let sys = circle(8, 1.0);
        let profile = recurrence_profile(&sys, &[0.1]).unwrap();
        assert_eq!(profile.order, 8);
        assert_eq!(profile.minimal_n[0].n, 8);
        assert_eq!(*profile.displacement.last().unwrap(), 0.0);
        // Proper powers displace by the rotation chord.
        for (i, &d) in profile.displacement.iter().enumerate().take(7) {
            let expected = 2.0 * (std::f64::consts::PI * (i + 1) as f64 / 8.0).sin();
            assert!((d - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_positive_epsilon() {
        let sys = identity_pair(1.0);
        assert!(recurrence_profile(&sys, &[0.0]).is_err());
        assert!(recurrence_profile(&sys, &[-1.0]).is_err());
    }

    #[test]
    fn cap_rejects_oversized_orders() {
        let sys = circle(8, 1.0);
        match recurrence_profile_capped(&sys, &[0.1], 4) {
            Err(Error::GroupTooLarge { order, cap, .. }) => {
                assert_eq!(order, 8);
                assert_eq!(cap, 4);
            }
            other => panic!("expected GroupTooLarge, got {other:?}"),
        }
    }

    #[test]
    fn circle_group_is_expansive_on_default_grids() {
        let report = cyclic_group_expansivity(&circle(8, 1.0)).unwrap();
        assert!(report.overall);
        assert!(report.verdicts.iter().all(|v| v.holds));
        assert!(!report.eps_grid.is_empty());
    }

    #[test]
    fn trivial_group_fails_on_a_coarse_delta_grid() {
        let sys = identity_pair(0.1);
        let report =
            cyclic_group_expansivity_with_grids(&sys, vec![0.05, 0.15], vec![0.2]).unwrap();
        assert!(!report.overall);
        assert!(report.verdicts.iter().all(|v| !v.holds));
    }

    #[test]
    fn one_point_group_vacuously_expansive() {
        let space = MetricSpace::from_points(vec![(0.0, 0.0)]).unwrap();
        let sys = DynSystem::new(space, vec![0], None).unwrap();
        let report = cyclic_group_expansivity(&sys).unwrap();
        assert!(report.overall);
        assert!(report.eps_grid.is_empty());
    }

    #[test]
    fn minimality_checks_orbit_count() {
        assert!(minimality(&circle(5, 1.0)).minimal);
        let id = identity_pair(1.0);
        let report = minimality(&id);
        assert!(!report.minimal);
        assert_eq!(report.orbit_count, 2);
    }

    #[test]
    fn scan_finds_constant_distance_pair() {
        let sys = identity_pair(1.0);
        let hits = asymptotic_scan(&sys, 2.0).unwrap();
        assert_eq!(hits.len(), 1);
        assert_eq!((hits[0].x, hits[0].y), (0, 1));
        assert_eq!(hits[0].min_distance, 1.0);
    }

    #[test]
    fn scan_below_all_minima_is_empty() {
        let sys = circle(8, 1.0);
        let hits = asymptotic_scan(&sys, 0.01).unwrap();
        assert!(hits.is_empty());
    }
}
