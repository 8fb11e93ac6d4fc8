//! Chain components of the proximity graph at a resolution.
//!
//! Two points are chain-related at `epsilon` when a finite sequence joins
//! them with every consecutive distance strictly below `epsilon`; the
//! classes are the connected components of the graph with edges
//! `d(u, v) < epsilon`. Note the strict `<` here against the non-strict
//! `<=` used by dynamical balls: both are kept verbatim, the asymmetry is
//! intentional.

use serde::Serialize;

use crate::error::Error;
use crate::systems::MetricSpace;

/// Chain classes at a resolution, with per-class diameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainPartition {
    pub epsilon: f64,
    /// Class id per point (classes numbered by smallest member).
    #[serde(skip)]
    pub class_of: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
    pub diameters: Vec<f64>,
}

impl ChainPartition {
    pub fn max_diameter(&self) -> f64 {
        self.diameters.iter().copied().fold(0.0, f64::max)
    }
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(len: usize) -> Self {
        UnionFind {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    fn find(&mut self, id: usize) -> usize {
        let mut root = id;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = id;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return;
        }
        if self.size[ra] >= self.size[rb] {
            self.parent[rb] = ra;
            self.size[ra] += self.size[rb];
        } else {
            self.parent[ra] = rb;
            self.size[rb] += self.size[ra];
        }
    }
}

fn check_epsilon(epsilon: f64) -> Result<(), Error> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "chain resolution must be positive and finite, got {epsilon}"
        )));
    }
    Ok(())
}

fn partition_with_edges(
    space: &MetricSpace,
    epsilon: f64,
    edge: impl Fn(f64) -> bool,
) -> ChainPartition {
    let n = space.len();
    let mut uf = UnionFind::new(n);
    for u in 0..n {
        for v in (u + 1)..n {
            if edge(space.dist(u, v)) {
                uf.union(u, v);
            }
        }
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
    for p in 0..n {
        let root = uf.find(p);
        members[root].push(p);
    }
    // Member lists are sorted because points were scanned in order; classes
    // are numbered by smallest member, independent of union order.
    let mut classes: Vec<Vec<usize>> = members.into_iter().filter(|c| !c.is_empty()).collect();
    classes.sort_by_key(|c| c[0]);
    finish_partition(space, epsilon, classes)
}

fn finish_partition(space: &MetricSpace, epsilon: f64, classes: Vec<Vec<usize>>) -> ChainPartition {
    let mut class_of = vec![0usize; space.len()];
    let mut diameters = Vec::with_capacity(classes.len());
    for (id, class) in classes.iter().enumerate() {
        let mut diam = 0.0f64;
        for (a, &u) in class.iter().enumerate() {
            class_of[u] = id;
            for &v in &class[a + 1..] {
                diam = diam.max(space.dist(u, v));
            }
        }
        diameters.push(diam);
    }
    ChainPartition {
        epsilon,
        class_of,
        classes,
        diameters,
    }
}

/// Chain classes at `epsilon` (edges `d < epsilon`), via union-find.
pub fn chain_partition(space: &MetricSpace, epsilon: f64) -> Result<ChainPartition, Error> {
    check_epsilon(epsilon)?;
    Ok(partition_with_edges(space, epsilon, |d| d < epsilon))
}

/// Components of the closed-threshold graph (edges `d <= cutoff`).
///
/// This is the partition shared by every resolution in the open interval
/// just above `cutoff`; [`resolve_epsilon`] searches these.
pub fn chain_partition_at_most(space: &MetricSpace, cutoff: f64) -> ChainPartition {
    partition_with_edges(space, cutoff, |d| d <= cutoff)
}

/// Breadth-first reference labeling of the chain classes at `epsilon`.
///
/// Independent of the union-find path; used for differential checks.
pub fn chain_partition_oracle(space: &MetricSpace, epsilon: f64) -> Result<ChainPartition, Error> {
    check_epsilon(epsilon)?;
    let n = space.len();
    let mut seen = vec![false; n];
    let mut classes = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut queue = std::collections::VecDeque::from([start]);
        seen[start] = true;
        let mut class = Vec::new();
        while let Some(u) = queue.pop_front() {
            class.push(u);
            for (v, seen_v) in seen.iter_mut().enumerate() {
                if !*seen_v && space.dist(u, v) < epsilon {
                    *seen_v = true;
                    queue.push_back(v);
                }
            }
        }
        class.sort_unstable();
        classes.push(class);
    }
    Ok(finish_partition(space, epsilon, classes))
}

/// Candidate resolutions: one value below the smallest distance, then every
/// distinct pairwise distance.
fn candidate_resolutions(space: &MetricSpace) -> Vec<f64> {
    let distinct = space.distinct_distances();
    match distinct.first() {
        Some(&min) => {
            let mut out = Vec::with_capacity(distinct.len() + 1);
            out.push(min / 2.0);
            out.extend(distinct);
            out
        }
        // Single point: any positive resolution gives one singleton class.
        None => vec![1.0],
    }
}

/// Largest candidate resolution whose chain classes all have diameter
/// strictly below `eta`.
///
/// A candidate `c` stands for every resolution in the interval just above
/// it, so it is evaluated on the closed graph `d <= c`; the partition at
/// the returned value itself (strict `<`) only refines that, so the
/// diameter bound carries over. Always succeeds: the sub-minimum candidate
/// yields singletons of diameter 0.
pub fn resolve_epsilon(space: &MetricSpace, eta: f64) -> Result<f64, Error> {
    if !eta.is_finite() || eta <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "eta must be positive and finite, got {eta}"
        )));
    }
    let candidates = candidate_resolutions(space);
    let fits = |c: f64| chain_partition_at_most(space, c).max_diameter() < eta;
    // Max diameter is nondecreasing in the resolution, so the candidates
    // split into a true prefix and a false suffix.
    let boundary = candidates.partition_point(|&c| fits(c));
    debug_assert!(boundary > 0, "sub-minimum candidate always fits");
    Ok(candidates[boundary - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_space(xs: &[f64]) -> MetricSpace {
        MetricSpace::from_points(xs.iter().map(|&x| (x, 0.0)).collect()).unwrap()
    }

    #[test]
    fn everything_merges_above_diameter() {
        let space = line_space(&[0.0, 1.0, 2.5]);
        let part = chain_partition(&space, 3.0).unwrap();
        assert_eq!(part.classes, vec![vec![0, 1, 2]]);
        assert_eq!(part.diameters, vec![2.5]);
    }

    #[test]
    fn strict_edges_exclude_equality() {
        let space = line_space(&[0.0, 1.0, 2.0]);
        let part = chain_partition(&space, 1.0).unwrap();
        assert_eq!(part.classes.len(), 3);
        assert!(part.diameters.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn rejects_non_positive_epsilon() {
        let space = line_space(&[0.0, 1.0]);
        assert!(chain_partition(&space, 0.0).is_err());
        assert!(chain_partition(&space, -1.0).is_err());
        assert!(chain_partition(&space, f64::NAN).is_err());
    }

    #[test]
    fn oracle_matches_union_find() {
        let space = line_space(&[0.0, 0.1, 0.25, 1.0, 1.05, 3.0]);
        for eps in [0.05, 0.11, 0.2, 0.5, 2.0, 5.0] {
            let a = chain_partition(&space, eps).unwrap();
            let b = chain_partition_oracle(&space, eps).unwrap();
            assert_eq!(a, b, "partitions differ at epsilon {eps}");
        }
    }

    #[test]
    fn resolve_epsilon_two_points() {
        let space = line_space(&[0.0, 1.0]);
        let eps = resolve_epsilon(&space, 0.5).unwrap();
        assert_eq!(eps, 0.5, "expected the candidate below the only distance");
        let part = chain_partition(&space, eps).unwrap();
        assert_eq!(part.classes.len(), 2);
    }

    #[test]
    fn resolve_epsilon_large_eta_returns_largest_candidate() {
        let space = line_space(&[0.0, 1.0, 2.5]);
        let eps = resolve_epsilon(&space, 10.0).unwrap();
        assert_eq!(eps, 2.5);
        let closed = chain_partition_at_most(&space, eps);
        assert_eq!(closed.classes, vec![vec![0, 1, 2]]);
        assert!(closed.max_diameter() < 10.0);
    }

    #[test]
    fn resolve_epsilon_single_point() {
        let space = line_space(&[0.0]);
        let eps = resolve_epsilon(&space, 0.25).unwrap();
        assert!(eps > 0.0);
    }
}
