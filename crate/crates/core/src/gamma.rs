//! Dynamical balls: for each point `x`, the set of points `y` whose whole
//! orbit stays within a resolution `eta` of `x`'s orbit, time-aligned at
//! every step (non-strict `<=`).
//!
//! Some sources write the resolution as eta and the defining inequality
//! with epsilon; here they are one and the same parameter.
//!
//! Two independent routes compute the same profile. [`gamma_profile`]
//! deletes pairs from the set `{(x, y) : d(x, y) <= eta}` whenever their
//! forward or backward image under the pair map `(x, y) -> (p[x], p[y])`
//! has already been deleted, cascading until the greatest invariant subset
//! remains. [`gamma_oracle`] walks every pair orbit for one full joint
//! period and checks the distance bound directly.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::systems::{lcm_u128, orbit_decomposition, DynSystem};

/// Per-point dynamical balls at a resolution, with cardinality statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaProfile {
    pub eta: f64,
    /// For each `x`, the sorted ids `y` whose orbit stays within `eta`.
    pub members: Vec<Vec<usize>>,
    pub max_card: usize,
    pub card_histogram: BTreeMap<usize, usize>,
}

impl GammaProfile {
    /// Checks reflexivity, symmetry, equivariance under the map, and
    /// containment in the closed ball at time zero.
    pub fn check_invariants(&self, sys: &DynSystem) -> Result<(), Error> {
        let n = sys.len();
        if self.members.len() != n {
            return Err(Error::InvariantViolation(format!(
                "profile covers {} points, system has {n}",
                self.members.len()
            )));
        }
        let map = sys.map();
        for x in 0..n {
            if self.members[x].binary_search(&x).is_err() {
                return Err(Error::InvariantViolation(format!(
                    "reflexivity: {x} missing from its own ball"
                )));
            }
            for &y in &self.members[x] {
                if self.members[y].binary_search(&x).is_err() {
                    return Err(Error::InvariantViolation(format!(
                        "symmetry: {y} in ball of {x} but not conversely"
                    )));
                }
                if self.members[map[x]].binary_search(&map[y]).is_err() {
                    return Err(Error::InvariantViolation(format!(
                        "equivariance: ({x}, {y}) in but ({}, {}) out",
                        map[x], map[y]
                    )));
                }
                if sys.space().dist(x, y) > self.eta {
                    return Err(Error::InvariantViolation(format!(
                        "ball bound: d({x}, {y}) exceeds eta at time zero"
                    )));
                }
            }
        }
        let max = self.members.iter().map(Vec::len).max().unwrap_or(0);
        if max != self.max_card {
            return Err(Error::InvariantViolation(format!(
                "max_card {} does not match members (found {max})",
                self.max_card
            )));
        }
        Ok(())
    }
}

fn check_eta(eta: f64) -> Result<(), Error> {
    if !eta.is_finite() || eta < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "eta must be nonnegative and finite, got {eta}"
        )));
    }
    Ok(())
}

fn finish_profile(eta: f64, members: Vec<Vec<usize>>) -> GammaProfile {
    let max_card = members.iter().map(Vec::len).max().unwrap_or(0);
    let mut card_histogram = BTreeMap::new();
    for row in &members {
        *card_histogram.entry(row.len()).or_insert(0) += 1;
    }
    GammaProfile {
        eta,
        members,
        max_card,
        card_histogram,
    }
}

/// Dynamical balls at `eta` via the greatest fixed point of pair deletion.
///
/// Starts from all pairs within `eta` at time zero and deletes any pair
/// whose forward or backward pair-map image is already gone; what survives
/// is exactly the union of pair-map cycles that stay within `eta` forever.
/// Runs in O(n^2) after the distance table.
pub fn gamma_profile(sys: &DynSystem, eta: f64) -> Result<GammaProfile, Error> {
    check_eta(eta)?;
    let n = sys.len();
    let map = sys.map();
    let inv = sys.inverse();
    let space = sys.space();

    let mut alive = vec![false; n * n];
    let mut dead_stack = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if space.dist(x, y) <= eta {
                alive[x * n + y] = true;
            } else {
                dead_stack.push(x * n + y);
            }
        }
    }
    while let Some(idx) = dead_stack.pop() {
        let (x, y) = (idx / n, idx % n);
        let backward = inv[x] * n + inv[y];
        if alive[backward] {
            alive[backward] = false;
            dead_stack.push(backward);
        }
        let forward = map[x] * n + map[y];
        if alive[forward] {
            alive[forward] = false;
            dead_stack.push(forward);
        }
    }

    let members = (0..n)
        .map(|x| (0..n).filter(|&y| alive[x * n + y]).collect())
        .collect();
    Ok(finish_profile(eta, members))
}

/// Brute-force reference for [`gamma_profile`]: walks each ordered pair for
/// `lcm(period(x), period(y))` steps and keeps `y` iff every distance along
/// the way is `<= eta`. Pairs are checked independently and in parallel.
pub fn gamma_oracle(sys: &DynSystem, eta: f64) -> Result<GammaProfile, Error> {
    check_eta(eta)?;
    let n = sys.len();
    let map = sys.map();
    let space = sys.space();
    let orbits = orbit_decomposition(sys);

    let members: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut row = Vec::new();
            for y in 0..n {
                let steps = lcm_u128(orbits.period_of[x] as u128, orbits.period_of[y] as u128);
                let (mut cx, mut cy) = (x, y);
                let mut within = true;
                let mut t: u128 = 0;
                while t < steps {
                    if space.dist(cx, cy) > eta {
                        within = false;
                        break;
                    }
                    cx = map[cx];
                    cy = map[cy];
                    t += 1;
                }
                if within {
                    row.push(y);
                }
            }
            row
        })
        .collect();
    Ok(finish_profile(eta, members))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::MetricSpace;

    fn identity_line(xs: &[f64]) -> DynSystem {
        let space = MetricSpace::from_points(xs.iter().map(|&x| (x, 0.0)).collect()).unwrap();
        let n = xs.len();
        DynSystem::new(space, (0..n).collect(), None).unwrap()
    }

    #[test]
    fn tiny_eta_gives_singletons() {
        let sys = identity_line(&[0.0, 1.0, 2.0]);
        let profile = gamma_profile(&sys, 0.5).unwrap();
        assert_eq!(profile.max_card, 1);
        assert!(profile.members.iter().enumerate().all(|(x, m)| m == &[x]));
        assert_eq!(profile.card_histogram.get(&1), Some(&3));
    }

    #[test]
    fn non_strict_bound_keeps_equality() {
        let sys = identity_line(&[0.0, 1.0]);
        let profile = gamma_oracle(&sys, 1.0).unwrap();
        assert_eq!(profile.members[0], vec![0, 1]);
    }

    #[test]
    fn just_below_bound_drops_pair() {
        let sys = identity_line(&[0.0, 1.0]);
        let profile = gamma_oracle(&sys, 1.0 - 1e-9).unwrap();
        assert_eq!(profile.members[0], vec![0]);
        assert_eq!(profile.members[1], vec![1]);
    }

    #[test]
    fn rejects_negative_or_nan_eta() {
        let sys = identity_line(&[0.0, 1.0]);
        assert!(gamma_profile(&sys, -0.1).is_err());
        assert!(gamma_profile(&sys, f64::NAN).is_err());
        assert!(gamma_oracle(&sys, -0.1).is_err());
    }

    #[test]
    fn fixed_point_matches_oracle_on_a_mixing_cycle() {
        // 4-cycle on a line: pairs drift apart and come back.
        let space =
            MetricSpace::from_points(vec![(0.0, 0.0), (0.3, 0.0), (1.0, 0.0), (1.4, 0.0)]).unwrap();
        let sys = DynSystem::new(space, vec![1, 2, 3, 0], None).unwrap();
        for eta in [0.0, 0.2, 0.3, 0.5, 1.0, 1.4, 2.0] {
            let a = gamma_profile(&sys, eta).unwrap();
            let b = gamma_oracle(&sys, eta).unwrap();
            assert_eq!(a, b, "profiles differ at eta {eta}");
            a.check_invariants(&sys).unwrap();
        }
    }
}
