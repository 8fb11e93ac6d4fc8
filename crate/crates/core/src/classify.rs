//! Hierarchy verdicts at a resolution: expansive, separating, the smallest
//! cardinality bound, isolation margins, and chain-trivial balls, together
//! with the critical resolutions at which the verdicts flip and per-system
//! consistency checks.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::Error;
use crate::gamma::{gamma_profile, GammaProfile};
use crate::systems::{orbit_decomposition, DynSystem, OrbitDecomposition};

/// Verdicts at a resolution `eta` (with chain resolution `epsilon` for the
/// chain-trivial check), each backed by a recomputable witness.
///
/// `expansive_at` holds iff every ball is a singleton (`min_N == 1`);
/// `separating_at` holds iff every ball stays inside its point's orbit, and
/// `separating_witness` carries an offending pair otherwise.
/// `isolation_margin` is the smallest distance from a point to the rest of
/// its ball, over points with non-trivial balls: the quantitative residue
/// of "every point is isolated in its own ball", which is vacuously true on
/// finite spaces. `cw_at_resolution` holds iff no ball contains two points
/// within `epsilon` of each other, i.e. every ball's internal chain classes
/// are singletons.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub eta: f64,
    pub epsilon: f64,
    pub expansive_at: bool,
    pub separating_at: bool,
    pub separating_witness: Option<(usize, usize)>,
    #[serde(rename = "min_N")]
    pub min_n: usize,
    pub isolation_margin: Option<f64>,
    pub cw_at_resolution: bool,
}

/// Whether a threshold is achieved at its value or only strictly below it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Attainment {
    Strict,
    NonStrict,
}

/// A critical resolution, or `Unbounded` when no pair constrains it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Value { value: f64, attained: Attainment },
    Unbounded,
}

impl Serialize for Threshold {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Threshold::Unbounded => serializer.serialize_str("unbounded"),
            Threshold::Value { value, attained } => {
                let mut s = serializer.serialize_struct("Threshold", 2)?;
                s.serialize_field("value", value)?;
                s.serialize_field("attained", attained)?;
                s.end()
            }
        }
    }
}

/// Largest resolutions at which expansivity and separation hold, found over
/// the finite candidate set of sup-orbit pair distances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalConstants {
    pub expansive_threshold: Threshold,
    pub separating_threshold: Threshold,
    /// Sorted distinct values of `max_k d(map^k x, map^k y)` over pairs.
    pub candidate_set: Vec<f64>,
}

/// One checked assertion: pass/fail plus the offending ids on failure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub passed: bool,
    pub counterexample: Option<Vec<usize>>,
}

impl Assertion {
    fn pass() -> Self {
        Assertion {
            passed: true,
            counterexample: None,
        }
    }

    fn fail(ids: Vec<usize>) -> Self {
        Assertion {
            passed: false,
            counterexample: Some(ids),
        }
    }
}

/// Instance-level consistency report: when `eta` separates, the balls at
/// the resolved chain resolution must sit inside single periodic orbits;
/// the hierarchy implications at `eta` are checked unconditionally.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub eta: f64,
    pub premise_separating: bool,
    /// Chain resolution resolved from `eta`; absent when the premise is unmet.
    pub epsilon: Option<f64>,
    pub gamma_within_orbit: Option<Assertion>,
    pub nontrivial_gamma_periodic: Option<Assertion>,
    pub hierarchy: Assertion,
}

fn separating_witness(
    profile: &GammaProfile,
    orbits: &OrbitDecomposition,
) -> Option<(usize, usize)> {
    for (x, row) in profile.members.iter().enumerate() {
        for &y in row {
            if !orbits.same_orbit(x, y) {
                return Some((x, y));
            }
        }
    }
    None
}

fn check_resolution(name: &str, value: f64) -> Result<(), Error> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{name} must be nonnegative and finite, got {value}"
        )));
    }
    Ok(())
}

/// Classifies a system at resolution `eta`, using `epsilon` for the
/// chain-trivial check.
pub fn classify(sys: &DynSystem, eta: f64, epsilon: f64) -> Result<ClassificationReport, Error> {
    check_resolution("eta", eta)?;
    check_resolution("epsilon", epsilon)?;
    let profile = gamma_profile(sys, eta)?;
    let orbits = orbit_decomposition(sys);
    let space = sys.space();

    let witness = separating_witness(&profile, &orbits);
    let min_n = profile.max_card;

    let mut isolation_margin: Option<f64> = None;
    let mut cw = true;
    for (x, row) in profile.members.iter().enumerate() {
        if row.len() <= 1 {
            continue;
        }
        let nearest = row
            .iter()
            .filter(|&&y| y != x)
            .map(|&y| space.dist(x, y))
            .fold(f64::INFINITY, f64::min);
        isolation_margin = Some(match isolation_margin {
            Some(m) => m.min(nearest),
            None => nearest,
        });
        if cw {
            'edges: for (a, &u) in row.iter().enumerate() {
                for &v in &row[a + 1..] {
                    if space.dist(u, v) < epsilon {
                        cw = false;
                        break 'edges;
                    }
                }
            }
        }
    }

    Ok(ClassificationReport {
        eta,
        epsilon,
        expansive_at: min_n == 1,
        separating_at: witness.is_none(),
        separating_witness: witness,
        min_n,
        isolation_margin,
        cw_at_resolution: cw,
    })
}

/// Critical resolutions from the sup-orbit distance of every pair.
///
/// Expansivity holds exactly for `eta` strictly below the smallest
/// sup-orbit distance over all pairs (the ball bound is non-strict, so the
/// threshold itself already fails); separation likewise over pairs in
/// distinct orbits, or `Unbounded` when every pair shares an orbit.
pub fn critical_constants(sys: &DynSystem) -> CriticalConstants {
    let orbits = orbit_decomposition(sys);
    let n = sys.len();
    let mut candidates = Vec::new();
    let mut min_all: Option<f64> = None;
    let mut min_cross: Option<f64> = None;
    for x in 0..n {
        for y in (x + 1)..n {
            let s = sys.sup_orbit_distance(x, y);
            candidates.push(s);
            min_all = Some(min_all.map_or(s, |m: f64| m.min(s)));
            if !orbits.same_orbit(x, y) {
                min_cross = Some(min_cross.map_or(s, |m: f64| m.min(s)));
            }
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let threshold = |value: Option<f64>| match value {
        Some(value) => Threshold::Value {
            value,
            attained: Attainment::Strict,
        },
        None => Threshold::Unbounded,
    };
    CriticalConstants {
        expansive_threshold: threshold(min_all),
        separating_threshold: threshold(min_cross),
        candidate_set: candidates,
    }
}

/// Checks, on one instance, that a separating resolution forces balls at
/// the resolved chain resolution into single periodic orbits, plus the
/// hierarchy implications at `eta`.
///
/// When `eta` is not a separating constant (a separating constant must be
/// positive), the premise is reported unmet and the two conditional checks
/// are skipped; the hierarchy check always runs.
pub fn theorem_checks(sys: &DynSystem, eta: f64) -> Result<TheoremReport, Error> {
    check_resolution("eta", eta)?;
    let profile_eta = gamma_profile(sys, eta)?;
    let orbits = orbit_decomposition(sys);
    let premise = eta > 0.0 && separating_witness(&profile_eta, &orbits).is_none();

    let (epsilon, within_orbit, periodic) = if premise {
        let eps = crate::chains::resolve_epsilon(sys.space(), eta)?;
        let profile_eps = gamma_profile(sys, eps)?;

        let mut within = Assertion::pass();
        'a: for (x, row) in profile_eps.members.iter().enumerate() {
            for &y in row {
                if !orbits.same_orbit(x, y) {
                    within = Assertion::fail(vec![x, y]);
                    break 'a;
                }
            }
        }

        let mut periodic = Assertion::pass();
        'b: for (x, row) in profile_eps.members.iter().enumerate() {
            if row.len() <= 1 {
                continue;
            }
            // Periodicity of x itself: its period really closes up.
            let p = orbits.period_of[x];
            let mut cur = x;
            for _ in 0..p {
                cur = sys.map()[cur];
            }
            if cur != x {
                periodic = Assertion::fail(vec![x]);
                break 'b;
            }
            for &y in row {
                if !orbits.same_orbit(x, y) {
                    periodic = Assertion::fail(vec![x, y]);
                    break 'b;
                }
            }
        }
        (Some(eps), Some(within), Some(periodic))
    } else {
        (None, None, None)
    };

    // Hierarchy at eta: expansive => separating => every ball no larger
    // than its orbit.
    let expansive = profile_eta.max_card == 1;
    let sep_witness = separating_witness(&profile_eta, &orbits);
    let separating = sep_witness.is_none();
    let card_violation = profile_eta
        .members
        .iter()
        .enumerate()
        .find(|(x, row)| row.len() > orbits.orbit_size(*x))
        .map(|(x, _)| x);
    let hierarchy = if expansive && !separating {
        let (x, y) = sep_witness.expect("witness exists when not separating");
        Assertion::fail(vec![x, y])
    } else if separating && card_violation.is_some() {
        Assertion::fail(vec![card_violation.unwrap()])
    } else {
        Assertion::pass()
    };

    Ok(TheoremReport {
        eta,
        premise_separating: premise,
        epsilon,
        gamma_within_orbit: within_orbit,
        nontrivial_gamma_periodic: periodic,
        hierarchy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::MetricSpace;

    fn two_fixed_points(distance: f64) -> DynSystem {
        let space = MetricSpace::from_points(vec![(0.0, 0.0), (distance, 0.0)]).unwrap();
        DynSystem::new(space, vec![0, 1], None).unwrap()
    }

    fn square_cycle(radius: f64) -> DynSystem {
        let pts = (0..4)
            .map(|t| {
                let a = std::f64::consts::FRAC_PI_2 * t as f64;
                (radius * a.cos(), radius * a.sin())
            })
            .collect();
        let space = MetricSpace::from_points(pts).unwrap();
        DynSystem::new(space, vec![1, 2, 3, 0], None).unwrap()
    }

    #[test]
    fn small_eta_is_expansive() {
        let sys = two_fixed_points(1.0);
        let report = classify(&sys, 0.25, 0.1).unwrap();
        assert!(report.expansive_at);
        assert!(report.separating_at);
        assert_eq!(report.min_n, 1);
        assert_eq!(report.isolation_margin, None);
        assert!(report.cw_at_resolution);
    }

    #[test]
    fn fixed_pair_within_eta_breaks_separation() {
        let sys = two_fixed_points(1.0);
        let report = classify(&sys, 1.0, 0.1).unwrap();
        assert!(!report.expansive_at);
        assert!(!report.separating_at);
        assert_eq!(report.separating_witness, Some((0, 1)));
        assert_eq!(report.min_n, 2);
        assert_eq!(report.isolation_margin, Some(1.0));
    }

    #[test]
    fn critical_constants_square() {
        let sys = square_cycle(1.0);
        let cc = critical_constants(&sys);
        match cc.expansive_threshold {
            Threshold::Value { value, attained } => {
                assert!((value - 2f64.sqrt()).abs() < 1e-12);
                assert_eq!(attained, Attainment::Strict);
                assert!(cc.candidate_set.contains(&value));
            }
            Threshold::Unbounded => panic!("expected a bounded expansive threshold"),
        }
        assert_eq!(cc.separating_threshold, Threshold::Unbounded);
    }

    #[test]
    fn critical_constants_two_fixed_points() {
        let cc = critical_constants(&two_fixed_points(1.0));
        assert_eq!(
            cc.expansive_threshold,
            Threshold::Value {
                value: 1.0,
                attained: Attainment::Strict
            }
        );
        assert_eq!(
            cc.separating_threshold,
            Threshold::Value {
                value: 1.0,
                attained: Attainment::Strict
            }
        );
        assert_eq!(cc.candidate_set, vec![1.0]);
    }

    #[test]
    fn critical_constants_single_point() {
        let space = MetricSpace::from_points(vec![(0.0, 0.0)]).unwrap();
        let sys = DynSystem::new(space, vec![0], None).unwrap();
        let cc = critical_constants(&sys);
        assert_eq!(cc.expansive_threshold, Threshold::Unbounded);
        assert_eq!(cc.separating_threshold, Threshold::Unbounded);
        assert!(cc.candidate_set.is_empty());
    }

    #[test]
    fn thresholds_flip_verdicts_exactly() {
        let sys = square_cycle(1.0);
        let cc = critical_constants(&sys);
        let Threshold::Value { value, .. } = cc.expansive_threshold else {
            panic!("bounded threshold expected");
        };
        let below = classify(&sys, value * (1.0 - 1e-6), 0.01).unwrap();
        assert!(below.expansive_at);
        let at = classify(&sys, value, 0.01).unwrap();
        assert!(
            !at.expansive_at,
            "non-strict ball bound fails at the threshold"
        );
    }

    #[test]
    fn theorem_checks_one_point_vacuous() {
        let space = MetricSpace::from_points(vec![(0.0, 0.0)]).unwrap();
        let sys = DynSystem::new(space, vec![0], None).unwrap();
        let report = theorem_checks(&sys, 0.7).unwrap();
        assert!(report.premise_separating);
        assert!(report.gamma_within_orbit.unwrap().passed);
        assert!(report.nontrivial_gamma_periodic.unwrap().passed);
        assert!(report.hierarchy.passed);
    }

    #[test]
    fn theorem_checks_premise_unmet_still_checks_hierarchy() {
        let sys = two_fixed_points(0.05);
        let report = theorem_checks(&sys, 0.1).unwrap();
        assert!(!report.premise_separating);
        assert!(report.epsilon.is_none());
        assert!(report.gamma_within_orbit.is_none());
        assert!(report.hierarchy.passed);
    }

    #[test]
    fn threshold_serializes_as_string_or_object() {
        let json = serde_json::to_string(&Threshold::Unbounded).unwrap();
        assert_eq!(json, "\"unbounded\"");
        let json = serde_json::to_string(&Threshold::Value {
            value: 1.5,
            attained: Attainment::Strict,
        })
        .unwrap();
        assert_eq!(json, "{\"value\":1.5,\"attained\":\"strict\"}");
    }
}
