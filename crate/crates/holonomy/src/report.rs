//! The report pipeline: the measure gap plus type-space exports.

use holonomy_core::construction::BuildLog;
use holonomy_core::measures::{gap_report, CostReport, GapParams};
use holonomy_core::typespace::{cantor_indicator, compute_types, genericity_report, holonomy_radius, stable_region, CantorRow, GenericityReport, TypeTable};
use holonomy_core::{ColoredGraph, Result};
use serde::{Deserialize, Serialize};

use crate::io::HolonomyRow;
use crate::par::RayonExecutor;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    pub r: u32,
    pub k: u32,
    /// Radii `0..=type_radius` are typed on the stable region.
    pub type_radius: u32,
    /// `m_α` is measured for every type of radius `<= holonomy_radius`.
    pub holonomy_radius: u32,
    /// Stage whose stable region is typed; defaults to `max(N - 2, 1)`.
    pub stage: Option<u32>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { r: 2, k: 5, type_radius: 6, holonomy_radius: 2, stage: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeSpaceSummary {
    pub stage: u32,
    pub radius: u32,
    pub genericity: GenericityReport,
    pub cantor: Vec<CantorRow>,
    /// Largest `m_α` per radius.
    pub max_holonomy: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    #[serde(flatten)]
    pub cost: CostReport,
    pub types: TypeSpaceSummary,
}

pub struct ReportOutput {
    pub report: Report,
    pub table: TypeTable,
    pub holonomy: Vec<HolonomyRow>,
}

/// Types on the stable region of `G_stage` with `m_α` for every low-radius type.
pub fn type_space(g: &ColoredGraph, log: &BuildLog, opts: &ReportOptions, exec: &RayonExecutor) -> Result<(TypeSpaceSummary, TypeTable, Vec<HolonomyRow>)> {
    let stage = opts.stage.unwrap_or(log.levels().saturating_sub(2).max(1)).min(log.levels());
    let region = stable_region(g, log, stage, opts.type_radius);
    if region.is_empty() {
        return Err(holonomy_core::Error::Empty);
    }
    let table = compute_types(g, opts.type_radius, &region, exec)?;
    let mut rows = Vec::new();
    let mut max_holonomy = Vec::new();
    for r in 0..=opts.holonomy_radius.min(opts.type_radius) {
        let mut worst = 0;
        for (alpha, stats) in &table.level(r).stats {
            let m = holonomy_radius(g, &table, r, *alpha, &region)?;
            worst = worst.max(m);
            rows.push(HolonomyRow { r, fingerprint: alpha.to_string(), count: stats.count, m_alpha: m });
        }
        max_holonomy.push(worst);
    }
    let summary = TypeSpaceSummary { stage, radius: opts.type_radius, genericity: genericity_report(&table), cantor: cantor_indicator(&table), max_holonomy };
    Ok((summary, table, rows))
}

pub fn run_report(g: &ColoredGraph, log: &BuildLog, opts: &ReportOptions, exec: &RayonExecutor) -> Result<ReportOutput> {
    let cost = gap_report(g, log, &GapParams { r: opts.r, k: opts.k }, exec)?;
    let (types, table, holonomy) = type_space(g, log, opts, exec)?;
    Ok(ReportOutput { report: Report { cost, types }, table, holonomy })
}
