//! The verify suite: every structural invariant of a build, checked from
//! the graph and its log alone.

use std::collections::BTreeSet;
use std::ops::Range;

use holonomy_core::action::orbit;
use holonomy_core::blocks::verify_cubic;
use holonomy_core::construction::{boundaries, faithfulness_witnesses, BlockInfo, BuildLog, ScheduleMode};
use holonomy_core::graph::LocalBfs;
use holonomy_core::measures::{direct_edge_measure, edge_measure, empirical_measure};
use holonomy_core::nets::{check_density_with_diameter, verify_partition, DensityOutcome, NetSchedule};
use holonomy_core::typespace::{compute_types, pushforward_defect, refinement_consistent};
use holonomy_core::{nth_word, Color, ColorAdjacency, ColorSet, ColoredGraph, Word};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::io::GraphFile;
use crate::par::RayonExecutor;
use crate::report::{type_space, ReportOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, failures: Vec<String>, ok: String) -> Self {
        let pass = failures.is_empty();
        let detail = if pass {
            ok
        } else {
            let shown: Vec<&str> = failures.iter().take(5).map(String::as_str).collect();
            let more = failures.len().saturating_sub(5);
            if more > 0 {
                format!("{} (+{more} more)", shown.join("; "))
            } else {
                shown.join("; ")
            }
        };
        CheckResult { name: name.into(), pass, detail }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Pushforward defects are checked for every `r <= defect_radius`.
    pub defect_radius: u32,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { defect_radius: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Loads the graph file first; a file that does not describe a properly
/// colored graph fails `properness` and nothing else is run.
pub fn verify_file(file: &GraphFile, log: &BuildLog, opts: &VerifyOptions, exec: &RayonExecutor) -> VerifyReport {
    match file.to_graph() {
        Ok(g) => verify(&g, log, opts, exec),
        Err(e) => VerifyReport { checks: vec![CheckResult { name: "properness".into(), pass: false, detail: format!("{e:#}") }] },
    }
}

pub fn verify(g: &ColoredGraph, log: &BuildLog, opts: &VerifyOptions, exec: &RayonExecutor) -> VerifyReport {
    let mut checks = vec![
        properness(g),
        log_consistency(g, log),
        d_bridges(g),
        orbit_check(g),
        faithfulness(g, log),
        boundary_check(g, log),
        folner_decay(g, log),
    ];
    // the stage-level checks index by the log, so they need it to fit the graph
    if checks[1].pass {
        checks.push(blocks(g, log, exec));
        checks.push(nets(g, log));
        checks.push(attachments(g, log));
        checks.push(attachment_ratio(log));
        checks.push(degree_count(g, log));
        let (defects, refinement, routes) = type_checks(g, log, opts, exec);
        checks.extend([defects, refinement, routes]);
        checks.push(genericity(g, log, exec));
    }
    VerifyReport { checks }
}

fn properness(g: &ColoredGraph) -> CheckResult {
    let failures = g.check_proper().err().map(|e| e.to_string()).into_iter().collect();
    CheckResult::new("properness", failures, format!("{} vertices, {} edges", g.vertex_count(), g.edge_count()))
}

fn log_consistency(g: &ColoredGraph, log: &BuildLog) -> CheckResult {
    let mut f = Vec::new();
    let n = g.vertex_count() as u64;
    if log.stages.len() < 2 {
        f.push("log has fewer than two stages".into());
    }
    if log.total_vertices() != n {
        f.push(format!("log records {} vertices, graph has {n}", log.total_vertices()));
    }
    let mut next = 0u32;
    for s in &log.stages {
        if s.omega.start != next || u64::from(s.omega.end) != s.g_size {
            f.push(format!("stage {}: omega {:?} does not continue at {next}", s.stage, s.omega));
        }
        next = s.omega.end;
        if s.h_range.start < s.omega.start || s.h_range.end > s.omega.end || u64::from(s.h_range.end - s.h_range.start) != s.h_size {
            f.push(format!("stage {}: block range {:?} outside omega", s.stage, s.h_range));
        }
        if s.stage >= 2 && (s.nets.len() != s.stage as usize || s.copies.len() != s.stage as usize - 1) {
            f.push(format!("stage {}: wrong number of nets or copy groups", s.stage));
        }
        if u64::from(next) <= n {
            if let Some(v) = s.omega.clone().find(|&v| g.meta(v).stage != s.stage) {
                f.push(format!("vertex {v} is tagged stage {} but lies in omega {}", g.meta(v).stage, s.stage));
            }
        }
    }
    CheckResult::new("log_consistency", f, format!("{} stages cover {n} vertices", log.stages.len()))
}

fn d_bridges(g: &ColoredGraph) -> CheckResult {
    let d = g.edges().filter(|e| e.2 == Color::D).count();
    let f = if g.d_bridges() { vec![] } else { vec!["a D-edge lies on a cycle".into()] };
    CheckResult::new("d_bridges", f, format!("all {d} D-edges are bridges"))
}

fn orbit_check(g: &ColoredGraph) -> CheckResult {
    let size = orbit(g, 0, ColorSet::FULL).len();
    let n = g.vertex_count();
    let f = if size == n { vec![] } else { vec![format!("orbit of 0 has {size} of {n} vertices")] };
    CheckResult::new("orbit", f, format!("orbit of 0 is all {n} vertices"))
}

fn faithfulness(g: &ColoredGraph, log: &BuildLog) -> CheckResult {
    let mut f = Vec::new();
    let witnesses = faithfulness_witnesses(g, log, log.levels());
    for n in 2..=log.levels() {
        let expected = nth_word(u64::from(n - 1)).to_string();
        match witnesses.iter().find(|w| w.stage == n) {
            None => f.push(format!("stage {n} has no witness")),
            Some(w) if w.word != expected => f.push(format!("stage {n} attached {} instead of {expected}", w.word)),
            Some(w) if !w.moved => f.push(format!("stage {n}: {} fixes {}", w.word, w.witness)),
            Some(_) => {}
        }
    }
    let words: Vec<&str> = witnesses.iter().map(|w| w.word.as_str()).collect();
    CheckResult::new("faithfulness", f, format!("words {words:?} move their witnesses"))
}

fn boundary_check(g: &ColoredGraph, log: &BuildLog) -> CheckResult {
    let mut f = Vec::new();
    let levels = log.levels();
    for b in boundaries(g, log) {
        let n = b.stage;
        let expected: Vec<u32> = if n < levels { vec![log.stage(n).distinguished()] } else { vec![] };
        if b.g_boundary != expected {
            f.push(format!("boundary of G_{n} is {:?}, expected {expected:?}", b.g_boundary));
        }
        if b.g_boundary_size() != 1 {
            f.push(format!("|boundary of G_{n}| = {}", b.g_boundary_size()));
        }
        if b.omega_boundary_size() > 2 {
            f.push(format!("|boundary of Omega_{n}| = {}", b.omega_boundary_size()));
        }
    }
    CheckResult::new("boundaries", f, format!("|dG_n| = 1 and |dOmega_n| <= 2 for n <= {levels}"))
}

fn folner_decay(g: &ColoredGraph, log: &BuildLog) -> CheckResult {
    let ratios: Vec<f64> = boundaries(g, log)
        .iter()
        .map(|b| b.g_boundary_size() as f64 / log.stage(b.stage).g_size as f64)
        .collect();
    let f = ratios
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] >= w[0])
        .map(|(i, w)| format!("ratio at stage {} is {} >= {}", i + 1, w[1], w[0]))
        .collect();
    CheckResult::new("folner_decay", f, format!("|dG_n|/|G_n| = {ratios:?}"))
}

/// The `{A,B,C}` subgraph on `range`, relabeled from 0; also reports
/// `{A,B,C}` edges leaving the range.
pub fn induced_block(g: &ColoredGraph, range: Range<u32>) -> (ColoredGraph, Vec<u32>) {
    let base = range.start;
    let mut h = ColoredGraph::with_vertices((range.end - range.start) as usize);
    let mut leaks = Vec::new();
    for v in range.clone() {
        for c in Color::TILDE {
            match g.neighbor(v, c) {
                Some(w) if range.contains(&w) => {
                    if v < w {
                        h.add_edge(v - base, w - base, c).expect("proper host");
                    }
                }
                Some(_) => leaks.push(v),
                None => {}
            }
        }
    }
    (h, leaks)
}

/// Girth of `h` is at least `girth`, scanning every vertex.
fn girth_at_least(h: &ColoredGraph, girth: u32, exec: &RayonExecutor) -> Option<(u32, u32)> {
    let depth = (girth - 1) / 2;
    exec.install(|| {
        (0..h.vertex_count() as u32)
            .into_par_iter()
            .map_init(LocalBfs::default, |bfs, v| h.short_cycle_at(v, ColorSet::TILDE, depth, bfs).filter(|&l| l < girth).map(|l| (v, l)))
            .find_any(Option::is_some)
            .flatten()
    })
}

fn blocks(g: &ColoredGraph, log: &BuildLog, exec: &RayonExecutor) -> CheckResult {
    let mut f = Vec::new();
    let mut summary = Vec::new();
    let config = &log.config;
    for s in log.stages.iter().filter(|s| s.stage >= 2) {
        let n = s.stage;
        let (h, leaks) = induced_block(g, s.h_range.clone());
        if !leaks.is_empty() {
            f.push(format!("stage {n}: {{A,B,C}}-edges leave the block at {:?}", &leaks[..leaks.len().min(3)]));
        }
        let scale = s.scale.unwrap_or(0);
        let min_diam = config.diam_multiplier * scale + 1;
        match &s.block {
            BlockInfo::Cycle { half } => {
                let ok = u64::from(*half) >= min_diam
                    && h.vertex_count() as u32 == 2 * half
                    && (0..h.vertex_count() as u32).all(|v| h.colors_at(v) == ColorSet::EMPTY.with(Color::A).with(Color::B))
                    && h.is_connected();
                if !ok {
                    f.push(format!("stage {n}: not an A/B cycle of half-length {half} >= {min_diam}"));
                }
                summary.push(format!("H_{n} = {}-cycle", 2 * half));
            }
            BlockInfo::Cubic(info) => {
                if let Err(e) = verify_cubic(&h, config.girth, info) {
                    f.push(format!("stage {n}: {e}"));
                }
                if let Some((v, l)) = girth_at_least(&h, config.girth, exec) {
                    f.push(format!("stage {n}: cycle of length {l} at block vertex {v}"));
                }
                let diam = h.diameter_lower_bound();
                if u64::from(diam) < min_diam {
                    f.push(format!("stage {n}: diameter bound {diam} < {min_diam}"));
                }
                summary.push(format!("H_{n} cubic on {} vertices, girth >= {}", h.vertex_count(), config.girth));
            }
            other => f.push(format!("stage {n}: unexpected block {other:?}")),
        }
    }
    CheckResult::new("blocks", f, summary.join(", "))
}

fn nets(g: &ColoredGraph, log: &BuildLog) -> CheckResult {
    let mut f = Vec::new();
    let mut checked = 0;
    for s in log.stages.iter().filter(|s| s.stage >= 2) {
        let n = s.stage;
        let base = s.h_range.start;
        let (h, _) = induced_block(g, s.h_range.clone());
        let Ok(schedule) = NetSchedule::new(log.scales[..n as usize].to_vec()) else {
            f.push(format!("stage {n}: invalid schedule"));
            continue;
        };
        let mut parts: Vec<Vec<u32>> = s.nets.iter().map(|p| p.iter().map(|&v| v.wrapping_sub(base)).collect()).collect();
        if parts.iter().flatten().any(|&v| v as usize >= h.vertex_count()) {
            f.push(format!("stage {n}: net vertex outside the block"));
            continue;
        }
        let taken: BTreeSet<u32> = parts.iter().flatten().copied().collect();
        let rest: Vec<u32> = (0..h.vertex_count() as u32).filter(|v| !taken.contains(v)).collect();
        if rest.len() as u64 != s.last_net_size {
            f.push(format!("stage {n}: last part has {} vertices, log says {}", rest.len(), s.last_net_size));
        }
        parts.push(rest);
        match verify_partition(&h, &schedule, &parts) {
            Ok(radii) if radii != s.covering_radius => f.push(format!("stage {n}: covering radii {radii:?} differ from log")),
            Ok(_) => {}
            Err(e) => f.push(format!("stage {n}: {e}")),
        }
        let diameter = match &s.block {
            BlockInfo::Cycle { half } => *half,
            BlockInfo::Cubic(info) => info.diameter_lower_bound,
            _ => 0,
        };
        for (i, (&scale, part)) in schedule.scales().iter().zip(&parts).enumerate() {
            let d = check_density_with_diameter(&h, part, scale, diameter);
            if d.outcome == DensityOutcome::Fail {
                f.push(format!("stage {n}: R_{} has density {} > {}", i + 1, d.ratio, d.bound));
            }
            if s.density.get(i) != Some(&d) {
                f.push(format!("stage {n}: density of R_{} differs from log", i + 1));
            }
            checked += 1;
        }
    }
    CheckResult::new("nets", f, format!("{checked} nets: spacing, maximality, covering <= 10 s_i, density <= 1/s_i"))
}

fn attachments(g: &ColoredGraph, log: &BuildLog) -> CheckResult {
    let mut f = Vec::new();
    let mut d_edges = 0;
    for s in log.stages.iter().filter(|s| s.stage >= 2) {
        let n = s.stage;
        let mut used = BTreeSet::new();
        for group in &s.copies {
            let k = group.copy_of;
            if k + 1 != group.net || s.nets.get(group.net as usize - 1) != Some(&group.anchors) {
                f.push(format!("stage {n}: copy group on R_{} does not match the log", group.net));
                continue;
            }
            let prev = log.stage(k);
            let anchor_in_copy = prev.distinguished();
            for (j, &a) in group.anchors.iter().enumerate() {
                let range = group.range(j);
                if range.end > s.omega.end || range.start < s.h_range.end || !used.insert(range.start) {
                    f.push(format!("stage {n}: copy {j} of G_{k} out of place"));
                    continue;
                }
                let shift = range.start;
                for v in 0..group.size {
                    for c in Color::ALL {
                        let want = if c == Color::D && v == anchor_in_copy { Some(a) } else { g.neighbor(v, c).map(|w| w + shift) };
                        if g.neighbor(v + shift, c) != want {
                            f.push(format!("stage {n}: copy {j} of G_{k} differs at {} color {c}", v + shift));
                        }
                    }
                }
            }
        }
        // copies, G_{n-1}, the word path, and G_{n+1} unless this is the last stage
        let onward = usize::from(n < log.levels());
        let expected_d: usize = s.copies.iter().map(|c| c.anchors.len()).sum::<usize>() + 2 + onward;
        let found_d = s.h_range.clone().filter(|&v| g.neighbor(v, Color::D).is_some()).count();
        if found_d != expected_d {
            f.push(format!("stage {n}: block has {found_d} D-edges, expected {expected_d}"));
        }
        d_edges += found_d;
        if let Some((r_prev, at)) = s.previous_attachment {
            let ok = r_prev == log.stage(n - 1).distinguished() && s.nets[n as usize - 1].first() == Some(&at) && g.neighbor(at, Color::D) == Some(r_prev);
            if !ok {
                f.push(format!("stage {n}: G_{} is not attached at the first vertex of R_{n}", n - 1));
            }
        }
        if let (Some(x), Some(word)) = (s.x, s.word.as_ref()) {
            let path_ok = word.parse::<Word>().is_ok_and(|w| {
                let starts_with_d = w.letter(1) == Color::D;
                let len = if starts_with_d { w.len() } else { w.len() + 1 } as u32;
                s.word_path.end - s.word_path.start == len && g.neighbor(x, Color::D) == Some(s.word_path.start)
            });
            if !path_ok {
                f.push(format!("stage {n}: word path for {word} is malformed"));
            }
        }
    }
    CheckResult::new("attachments", f, format!("copies match G_k; {d_edges} D-edges at blocks are logged attachments"))
}

fn attachment_ratio(log: &BuildLog) -> CheckResult {
    let mut f = Vec::new();
    let mut shown = Vec::new();
    for s in log.stages.iter().filter(|s| s.stage >= 2) {
        let attached = (s.g_size - s.h_size) as f64;
        let (rh, rg) = (attached / s.h_size as f64, attached / s.g_size as f64);
        if rh != s.attach_ratio_h || rg != s.attach_ratio_g {
            f.push(format!("stage {}: recorded attachment ratios differ", s.stage));
        }
        if s.stage == 2 && log.config.schedule == ScheduleMode::Paper && rg >= 1.0 / log.config.m as f64 {
            f.push(format!("stage 2: ratio {rg} >= 1/{}", log.config.m));
        }
        shown.push(format!("{}: {rg:.5}", s.stage));
    }
    CheckResult::new("attachment_ratio", f, format!("|G_n - H_n|/|G_n| by stage: {}", shown.join(", ")))
}

/// On degree-2 blocks, vertices of degree above 2 are attached vertices or
/// their anchors.
fn degree_count(g: &ColoredGraph, log: &BuildLog) -> CheckResult {
    let mut f = Vec::new();
    let mut shown = Vec::new();
    for s in log.stages.iter().filter(|s| matches!(s.block, BlockInfo::Cycle { .. })) {
        let high = s.omega.clone().filter(|&v| g.degree(v) > 2).count() as u64;
        let attached = s.g_size - s.h_size;
        if high > 2 * attached {
            f.push(format!("stage {}: {high} vertices of degree > 2, {attached} attached", s.stage));
        }
        shown.push(format!("stage {}: {high} <= 2*{attached}", s.stage));
    }
    CheckResult::new("degree_count", f, shown.join(", "))
}

/// Stable region of `G_max(N-2,1)`: separated at some radius `<= 6`, and
/// every type of radius `<= 2` realized there has finite `m_α`.
fn genericity(g: &ColoredGraph, log: &BuildLog, exec: &RayonExecutor) -> CheckResult {
    match type_space(g, log, &ReportOptions::default(), exec) {
        Ok((t, _, _)) => {
            let f = if t.genericity.pass { vec![] } else { vec![format!("stage {}: region not separated by radius {}", t.stage, t.radius)] };
            let ok = format!(
                "stage {}: {} vertices separated at r = {}, max m_alpha per radius {:?}",
                t.stage,
                t.genericity.region_size,
                t.genericity.separation_radius.unwrap_or(0),
                t.max_holonomy
            );
            CheckResult::new("genericity", f, ok)
        }
        Err(e) => CheckResult::new("genericity", vec![e.to_string()], String::new()),
    }
}

fn type_checks(g: &ColoredGraph, log: &BuildLog, opts: &VerifyOptions, exec: &RayonExecutor) -> (CheckResult, CheckResult, CheckResult) {
    let r_top = opts.defect_radius;
    let bounds = boundaries(g, log);
    let (mut fd, mut fr, mut fe) = (Vec::new(), Vec::new(), Vec::new());
    let mut worst = 0;
    for s in &log.stages {
        let n = s.stage;
        let omega: Vec<u32> = s.omega.clone().collect();
        let mut region = omega.clone();
        for &v in &omega {
            region.extend(g.neighbors(v).map(|(_, w)| w));
        }
        region.sort_unstable();
        region.dedup();
        let table = match compute_types(g, r_top + 1, &region, exec) {
            Ok(t) => t,
            Err(e) => {
                fd.push(format!("Omega_{n}: {e}"));
                continue;
            }
        };
        if !refinement_consistent(&table) {
            fr.push(format!("Omega_{n}: counts do not refine"));
        }
        let boundary = bounds[n as usize].omega_boundary_size() as u64;
        for r in 0..=r_top {
            for c in Color::ALL {
                match pushforward_defect(g, &table, r, c, &omega, boundary) {
                    Ok(row) => {
                        worst = worst.max(row.defect);
                        if !row.pass {
                            fd.push(format!("Omega_{n}, r={r}, {c}: defect {} > {}", row.defect, row.bound));
                        }
                    }
                    Err(e) => fd.push(format!("Omega_{n}, r={r}, {c}: {e}")),
                }
            }
        }
        let direct = direct_edge_measure(g, &omega);
        for r in [0, 1, 2.min(r_top + 1)] {
            match empirical_measure(g, &table, &omega, r, Some(n)) {
                Ok(mu) if edge_measure(&mu) != direct => fe.push(format!("Omega_{n}, r={r}: {} != {direct}", edge_measure(&mu))),
                Ok(_) => {}
                Err(e) => fe.push(format!("Omega_{n}, r={r}: {e}")),
            }
        }
    }
    let levels = log.levels();
    (
        CheckResult::new("pushforward", fd, format!("4 generators, r <= {r_top}, Omega_0..Omega_{levels}: max defect {worst} <= 2|dOmega_n|")),
        CheckResult::new("refinement", fr, format!("type counts refine across radii 0..={}", r_top + 1)),
        CheckResult::new("edge_measure_routes", fe, "type-based and direct edge measures agree exactly".into()),
    )
}
