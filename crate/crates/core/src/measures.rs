//! Empirical type measures on Følner sets, edge measures, `{A,B,C}`-free
//! fractions and the cost estimate, and the comparison of the even- and
//! odd-stage measures.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::action::is_free;
use crate::ball::Fingerprint;
use crate::color::ColorSet;
use crate::construction::BuildLog;
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::graph::{ColorAdjacency, ColoredGraph};
use crate::typespace::{compute_types, TypeTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureEntry {
    pub count: u64,
    pub root_degree: u32,
    pub degree_sum: u64,
}

/// Frequencies of `r`-types over a finite vertex set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub radius: u32,
    /// Stage `n` of the source set `Ω_n`, if it is one.
    pub source: Option<u32>,
    pub sample_size: u64,
    pub entries: BTreeMap<Fingerprint, MeasureEntry>,
}

impl EmpiricalMeasure {
    pub fn frequency(&self, t: &Fingerprint) -> f64 {
        self.entries.get(t).map_or(0.0, |e| e.count as f64 / self.sample_size as f64)
    }

    pub fn frequencies(&self) -> impl Iterator<Item = (Fingerprint, f64)> + '_ {
        self.entries.iter().map(|(t, e)| (*t, e.count as f64 / self.sample_size as f64))
    }
}

/// Type frequencies over `omega` at radius `r`, with host degree sums per
/// type (the radius-0 code carries no degree).
pub fn empirical_measure<G: ColorAdjacency + ?Sized>(
    g: &G,
    table: &TypeTable,
    omega: &[u32],
    r: u32,
    source: Option<u32>,
) -> Result<EmpiricalMeasure> {
    if omega.is_empty() {
        return Err(Error::Empty);
    }
    let level = table.level(r);
    let mut entries: BTreeMap<Fingerprint, MeasureEntry> = BTreeMap::new();
    for &x in omega {
        let i = table.position(x).ok_or_else(|| Error::Inconsistent(alloc::format!("vertex {x} is not typed")))?;
        let t = level.per_vertex[i];
        let root_degree = level.stats[&t].root_degree;
        let e = entries.entry(t).or_insert(MeasureEntry { count: 0, root_degree, degree_sum: 0 });
        e.count += 1;
        e.degree_sum += u64::from(g.degree(x));
    }
    Ok(EmpiricalMeasure { radius: r, source, sample_size: omega.len() as u64, entries })
}

/// `½ Σ_α μ(α) deg(root of α)`, reading degrees off the codes; at radius 0
/// the recorded host degrees are used instead.
pub fn edge_measure(mu: &EmpiricalMeasure) -> f64 {
    let total: u64 = mu
        .entries
        .values()
        .map(|e| if mu.radius == 0 { e.degree_sum } else { e.count * u64::from(e.root_degree) })
        .sum();
    total as f64 / (2 * mu.sample_size) as f64
}

/// `½ · average degree` over `omega`, straight from the graph.
pub fn direct_edge_measure<G: ColorAdjacency + ?Sized>(g: &G, omega: &[u32]) -> f64 {
    let total: u64 = omega.iter().map(|&x| u64::from(g.degree(x))).sum();
    total as f64 / (2 * omega.len().max(1)) as f64
}

/// Fraction of `omega` that is `{A,B,C}`-free at radius `k`.
pub fn free_fraction<G, E>(g: &G, omega: &[u32], k: u32, exec: &E) -> f64
where
    G: ColorAdjacency + Sync + ?Sized,
    E: Executor,
{
    if omega.is_empty() {
        return 0.0;
    }
    let free = exec.map(omega, |_, x| is_free(g, x, k, ColorSet::TILDE));
    free.iter().filter(|&&f| f).count() as f64 / omega.len() as f64
}

/// `(3/2) f + (1 - f)`.
pub fn cost_estimate(free_frac: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&free_frac) {
        return Err(Error::OutOfUnitRange(free_frac));
    }
    Ok(1.5 * free_frac + (1.0 - free_frac))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub fingerprint: Fingerprint,
    pub mu1: f64,
    pub mu2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub tv_distance: f64,
    /// Largest `|μ1(α) − μ2(α)|` first.
    pub top: Vec<Discrepancy>,
}

/// Total variation distance and the largest per-type discrepancies.
pub fn compare_measures(mu1: &EmpiricalMeasure, mu2: &EmpiricalMeasure, top: usize) -> Result<Comparison> {
    if mu1.radius != mu2.radius {
        return Err(Error::RadiusMismatch(mu1.radius, mu2.radius));
    }
    let mut rows: Vec<Discrepancy> = mu1
        .entries
        .keys()
        .chain(mu2.entries.keys().filter(|k| !mu1.entries.contains_key(k)))
        .map(|&t| Discrepancy { fingerprint: t, mu1: mu1.frequency(&t), mu2: mu2.frequency(&t) })
        .collect();
    let tv = 0.5 * rows.iter().map(|d| (d.mu1 - d.mu2).abs()).sum::<f64>();
    rows.sort_by(|a, b| (b.mu1 - b.mu2).abs().total_cmp(&(a.mu1 - a.mu2).abs()).then(a.fingerprint.cmp(&b.fingerprint)));
    rows.truncate(top);
    Ok(Comparison { tv_distance: tv.min(1.0), top: rows })
}

/// Per-stage values feeding the trend table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageMeasure {
    pub stage: u32,
    pub size: u64,
    pub edge_measure: f64,
    pub free_fraction: f64,
    pub cost_estimate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub m: u64,
    pub levels: u32,
    pub r: u32,
    pub k: u32,
    /// Stages supplying `μ1` (even) and `μ2` (odd).
    pub even_stage: u32,
    pub odd_stage: u32,
    pub edge_measure_mu1: f64,
    pub edge_measure_mu2: f64,
    pub free_fraction_mu1: f64,
    pub free_fraction_mu2: f64,
    pub cost_estimate_mu2: f64,
    pub tv_distance: f64,
    pub gap: f64,
    pub top_discrepancies: Vec<Discrepancy>,
    pub trend: Vec<StageMeasure>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapParams {
    pub r: u32,
    pub k: u32,
}

/// Measures on the largest even and odd `Ω_n` (`n >= 2`), their edge
/// measures, free fractions and cost estimate, and
/// `gap = cost_estimate(μ2) − edge_measure(μ1)`.
pub fn gap_report<E: Executor>(g: &ColoredGraph, log: &BuildLog, params: &GapParams, exec: &E) -> Result<CostReport> {
    let levels = log.levels();
    let even = (2..=levels).rev().find(|n| n % 2 == 0);
    let odd = (3..=levels).rev().find(|n| n % 2 == 1);
    let (Some(even), Some(odd)) = (even, odd) else {
        return Err(Error::InsufficientLevels { levels });
    };
    let mut trend = Vec::new();
    let mut measures = BTreeMap::new();
    for n in 2..=levels {
        let omega: Vec<u32> = log.omega(n).collect();
        let ff = free_fraction(g, &omega, params.k, exec);
        let e_direct = direct_edge_measure(g, &omega);
        if n == even || n == odd {
            let table = compute_types(g, params.r, &omega, exec)?;
            let mu = empirical_measure(g, &table, &omega, params.r, Some(n))?;
            measures.insert(n, (mu, ff));
        }
        trend.push(StageMeasure { stage: n, size: omega.len() as u64, edge_measure: e_direct, free_fraction: ff, cost_estimate: cost_estimate(ff)? });
    }
    let (mu1, ff1) = &measures[&even];
    let (mu2, ff2) = &measures[&odd];
    let comparison = compare_measures(mu1, mu2, 10)?;
    let e1 = edge_measure(mu1);
    let cost2 = cost_estimate(*ff2)?;
    Ok(CostReport {
        m: log.config.m,
        levels,
        r: params.r,
        k: params.k,
        even_stage: even,
        odd_stage: odd,
        edge_measure_mu1: e1,
        edge_measure_mu2: edge_measure(mu2),
        free_fraction_mu1: *ff1,
        free_fraction_mu2: *ff2,
        cost_estimate_mu2: cost2,
        tv_distance: comparison.tv_distance,
        gap: cost2 - e1,
        top_discrepancies: comparison.top,
        trend,
    })
}
