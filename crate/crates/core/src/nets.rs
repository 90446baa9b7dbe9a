//! Maximal nets and the multi-scale net partition.
//!
//! A `2s`-net is a vertex set whose members are pairwise at distance at
//! least `2s`. The partition `V = R_1 ⊔ ... ⊔ R_n ⊔ R_{n+1}` takes `R_i` to be
//! a maximal `2s_i`-net avoiding `R_1, ..., R_{i-1}`, scanning candidates in
//! ascending id order, and leaves the rest in `R_{n+1}`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BoundedBfs, ColorAdjacency, ColoredGraph, UNREACHED};

/// Covering constant of the partition: every vertex lies within
/// `COVERING_FACTOR * s_i` of `R_i`.
pub const COVERING_FACTOR: u64 = 10;

/// Exact diameters are computed only up to this many vertices; larger
/// graphs use the double-sweep lower bound.
const EXACT_DIAMETER_LIMIT: usize = 4096;

/// Strictly increasing scales `s_1 < s_2 < ... < s_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetSchedule(Vec<u64>);

impl NetSchedule {
    pub fn new(scales: Vec<u64>) -> Result<Self> {
        if scales.is_empty() {
            return Err(Error::Schedule("empty schedule".into()));
        }
        if scales[0] == 0 {
            return Err(Error::Schedule("scales must be positive".into()));
        }
        if let Some(w) = scales.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Schedule(format!("not strictly increasing: {} then {}", w[0], w[1])));
        }
        Ok(NetSchedule(scales))
    }

    /// Additionally requires `s_i >= 10^(i+1)`.
    pub fn with_floor(scales: Vec<u64>) -> Result<Self> {
        let s = Self::new(scales)?;
        for (i, &si) in s.0.iter().enumerate() {
            let floor = 10u64.checked_pow(i as u32 + 2).unwrap_or(u64::MAX);
            if si < floor {
                return Err(Error::Schedule(format!("s_{} = {si} below 10^{}", i + 1, i + 2)));
            }
        }
        Ok(s)
    }

    pub fn scales(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn spacing_depth(spacing: u64) -> u32 {
    // distance < spacing  <=>  distance <= spacing - 1
    spacing.saturating_sub(1).min(u64::from(u32::MAX - 1)) as u32
}

/// Greedy maximal net: scans vertices in ascending id, keeping each vertex
/// that is not forbidden and lies at distance `>= spacing` from all kept ones.
pub fn greedy_maximal_net(g: &ColoredGraph, spacing: u64, forbidden: &[bool]) -> Vec<u32> {
    let n = g.vertex_count();
    let depth = spacing_depth(spacing);
    let mut blocked = vec![false; n];
    let mut bfs = BoundedBfs::new(n);
    let mut net = Vec::new();
    for v in 0..n as u32 {
        if blocked[v as usize] || forbidden.get(v as usize).copied().unwrap_or(false) {
            continue;
        }
        net.push(v);
        bfs.run(g, &[v], depth, |w, _| {
            blocked[w as usize] = true;
            true
        });
    }
    net
}

/// Diameter, exact on small graphs and a double-sweep lower bound otherwise.
pub fn diameter_estimate(g: &ColoredGraph) -> u32 {
    if g.vertex_count() <= EXACT_DIAMETER_LIMIT {
        g.diameter_exact()
    } else {
        g.diameter_lower_bound()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum DensityOutcome {
    Pass,
    Fail,
    /// `d <= 2` or the diameter is below `2d`; the bound is not asserted.
    HypothesisViolated,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityCheck {
    pub ratio: f64,
    pub bound: f64,
    pub diameter: u32,
    pub outcome: DensityOutcome,
}

/// `|A| / |V| <= 1/d` for a `2d`-net `A`, under `d > 2` and `diam >= 2d`.
pub fn check_density(g: &ColoredGraph, net: &[u32], d: u64) -> DensityCheck {
    check_density_with_diameter(g, net, d, diameter_estimate(g))
}

/// As [`check_density`] with a known diameter (or certified lower bound).
pub fn check_density_with_diameter(g: &ColoredGraph, net: &[u32], d: u64, diameter: u32) -> DensityCheck {
    let ratio = net.len() as f64 / g.vertex_count().max(1) as f64;
    let bound = 1.0 / d as f64;
    let outcome = if d <= 2 || u64::from(diameter) < 2 * d {
        DensityOutcome::HypothesisViolated
    } else if ratio <= bound {
        DensityOutcome::Pass
    } else {
        DensityOutcome::Fail
    };
    DensityCheck { ratio, bound, diameter, outcome }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetPartition {
    pub schedule: NetSchedule,
    /// `R_1, ..., R_n, R_{n+1}`, each ascending.
    pub parts: Vec<Vec<u32>>,
    /// Measured `max_x d(x, R_i)` for `i <= n`.
    pub covering_radius: Vec<u32>,
}

impl NetPartition {
    /// 1-based part index per vertex.
    pub fn part_index(&self, n: usize) -> Vec<u16> {
        let mut idx = vec![0u16; n];
        for (i, part) in self.parts.iter().enumerate() {
            for &v in part {
                idx[v as usize] = i as u16 + 1;
            }
        }
        idx
    }
}

/// Computes and verifies the partition.
///
/// `min_diam_factor` is the precondition `diam(g) > min_diam_factor * s_n`
/// (10 for the full guarantee). `known_diameter` may supply a certified
/// lower bound; otherwise it is estimated.
pub fn partition_nets(
    g: &ColoredGraph,
    schedule: &NetSchedule,
    min_diam_factor: u64,
    known_diameter: Option<u32>,
) -> Result<NetPartition> {
    let n = g.vertex_count();
    let s_last = *schedule.scales().last().expect("nonempty");
    let required = min_diam_factor.saturating_mul(s_last);
    let diameter = known_diameter.unwrap_or_else(|| diameter_estimate(g));
    if u64::from(diameter) <= required {
        return Err(Error::DiameterTooSmall { diameter: diameter.into(), required });
    }
    let mut taken = vec![false; n];
    let mut parts = Vec::with_capacity(schedule.len() + 1);
    for &s in schedule.scales() {
        let part = greedy_maximal_net(g, 2 * s, &taken);
        for &v in &part {
            taken[v as usize] = true;
        }
        parts.push(part);
    }
    parts.push((0..n as u32).filter(|&v| !taken[v as usize]).collect());
    let covering_radius = verify_partition(g, schedule, &parts)?;
    Ok(NetPartition { schedule: schedule.clone(), parts, covering_radius })
}

/// Checks spacing, maximality and the `10 s_i` covering bound for every net
/// part; returns the measured covering radii.
pub fn verify_partition(g: &ColoredGraph, schedule: &NetSchedule, parts: &[Vec<u32>]) -> Result<Vec<u32>> {
    let n = g.vertex_count();
    let mut bfs = BoundedBfs::new(n);
    let mut earlier = vec![false; n];
    let mut radii = Vec::with_capacity(schedule.len());
    for (i, (&s, part)) in schedule.scales().iter().zip(parts).enumerate() {
        let label = i + 1;
        let spacing = 2 * s;
        let mut member = vec![false; n];
        for &v in part {
            member[v as usize] = true;
        }
        // spacing: no other member within distance < 2s
        for &v in part {
            let mut clash = None;
            bfs.run(g, &[v], spacing_depth(spacing), |w, _| {
                if w != v && member[w as usize] {
                    clash = Some(w);
                    return false;
                }
                true
            });
            if let Some(w) = clash {
                return Err(Error::NetSpacing { part: label, a: v, b: w, spacing });
            }
        }
        let dist = g.distances(part);
        // maximality: every vertex outside R_1..R_i is within < 2s of R_i
        if let Some(v) = (0..n).find(|&v| !earlier[v] && !member[v] && dist[v] as u64 >= spacing) {
            return Err(Error::NetSpacing { part: label, a: v as u32, b: v as u32, spacing });
        }
        let bound = COVERING_FACTOR * s;
        let mut radius = 0;
        for (v, &d) in dist.iter().enumerate() {
            if d == UNREACHED || u64::from(d) > bound {
                return Err(Error::Covering { part: label, vertex: v as u32, distance: d.into(), bound });
            }
            radius = radius.max(d);
        }
        radii.push(radius);
        for &v in part {
            earlier[v as usize] = true;
        }
    }
    Ok(radii)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::Color;

    pub(crate) fn cycle(n: u32) -> ColoredGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, if i % 2 == 0 { Color::A } else { Color::B })).collect();
        ColoredGraph::from_edges(n as usize, &edges).unwrap()
    }

    fn path(n: u32) -> ColoredGraph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, if i % 2 == 0 { Color::A } else { Color::B })).collect();
        ColoredGraph::from_edges(n as usize, &edges).unwrap()
    }

    #[test]
    fn twenty_cycle_net() {
        let g = cycle(20);
        let net = greedy_maximal_net(&g, 6, &[]);
        assert_eq!(net, [0, 6, 12]);
        let check = check_density(&g, &net, 3);
        assert_eq!(check.outcome, DensityOutcome::Pass);
        assert!((check.ratio - 0.15).abs() < 1e-12);
    }

    #[test]
    fn spacing_two_and_forbidden() {
        let g = cycle(10);
        let net = greedy_maximal_net(&g, 2, &[]);
        assert_eq!(net, [0, 2, 4, 6, 8]);
        let all = vec![true; 10];
        assert!(greedy_maximal_net(&g, 6, &all).is_empty());
    }

    #[test]
    fn density_hypothesis_gate() {
        let g = path(5);
        let c = check_density(&g, &[0], 3);
        assert_eq!(c.outcome, DensityOutcome::HypothesisViolated);
        assert_eq!(c.diameter, 4);
        let big = cycle(200);
        assert_eq!(check_density(&big, &[7], 5).outcome, DensityOutcome::Pass);
    }

    #[test]
    fn partition_of_long_cycle() {
        let g = cycle(2000);
        let schedule = NetSchedule::new(vec![10, 40]).unwrap();
        let p = partition_nets(&g, &schedule, 2, None).unwrap();
        assert_eq!(p.parts.len(), 3);
        let total: usize = p.parts.iter().map(Vec::len).sum();
        assert_eq!(total, 2000);
        assert!(p.covering_radius[0] <= 100 && p.covering_radius[1] <= 400);
        let idx = p.part_index(2000);
        assert!(idx.iter().all(|&i| (1..=3).contains(&i)));
    }

    #[test]
    fn partition_precondition() {
        let g = cycle(200);
        let schedule = NetSchedule::new(vec![10]).unwrap();
        assert!(matches!(partition_nets(&g, &schedule, 10, None), Err(Error::DiameterTooSmall { .. })));
        let p = partition_nets(&g, &schedule, 5, None).unwrap();
        assert_eq!(p.parts.len(), 2);
    }

    #[test]
    fn schedule_validation() {
        assert!(NetSchedule::new(vec![3, 3]).is_err());
        assert!(NetSchedule::new(vec![]).is_err());
        assert!(NetSchedule::with_floor(vec![100, 1000]).is_ok());
        assert!(NetSchedule::with_floor(vec![24, 2304]).is_err());
    }

    #[test]
    fn verify_rejects_corrupted_net() {
        let g = cycle(100);
        let schedule = NetSchedule::new(vec![5]).unwrap();
        let bad = vec![vec![0, 3], (1..100).filter(|&v| v != 3).collect()];
        assert!(matches!(verify_partition(&g, &schedule, &bad), Err(Error::NetSpacing { .. })));
    }
}
