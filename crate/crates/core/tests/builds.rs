use holonomy_core::construction::{build, ConstructionConfig, ScheduleMode, P};
use holonomy_core::exec::Sequential;
use holonomy_core::measures::{edge_measure, empirical_measure, gap_report, GapParams};
use holonomy_core::typespace::{compute_types, stable_region};
use holonomy_core::ColorAdjacency;

#[test]
fn stable_types_survive_another_stage() {
    let r = 4;
    let (g2, log2) = build(&ConstructionConfig { levels: 2, ..Default::default() }).unwrap();
    let (g3, log3) = build(&ConstructionConfig::default()).unwrap();
    let region = stable_region(&g2, &log2, 2, r);
    assert!(region.len() > 900, "{}", region.len());
    let before = compute_types(&g2, r, &region, &Sequential).unwrap();
    let after = compute_types(&g3, r, &region, &Sequential).unwrap();
    for radius in 0..=r {
        assert_eq!(before.level(radius).per_vertex, after.level(radius).per_vertex, "r={radius}");
    }
    // the frontier itself does change
    let frontier = log2.frontier();
    assert_ne!(g2.degree(frontier), g3.degree(frontier));
    assert_eq!(log3.stage(2).r, Some(frontier));
}

#[test]
fn p_and_q_have_different_types() {
    let (g, _) = build(&ConstructionConfig { levels: 2, ..Default::default() }).unwrap();
    let t = compute_types(&g, 1, &[P, P + 1], &Sequential).unwrap();
    assert_ne!(t.type_of(P, 1), t.type_of(P + 1, 1));
}

fn desk_gap(m: u64) -> f64 {
    let (g, log) = build(&ConstructionConfig { m, ..Default::default() }).unwrap();
    gap_report(&g, &log, &GapParams { r: 2, k: 5 }, &Sequential).unwrap().gap
}

fn exponential_stage_two_edge_measure(m: u64) -> f64 {
    let config = ConstructionConfig { m, levels: 2, schedule: ScheduleMode::Paper, ..Default::default() };
    let (g, log) = build(&config).unwrap();
    let omega: Vec<u32> = log.omega(2).collect();
    let table = compute_types(&g, 2, &omega, &Sequential).unwrap();
    edge_measure(&empirical_measure(&g, &table, &omega, 2, Some(2)).unwrap())
}

#[test]
fn gap_grows_with_m() {
    let (g12, g20) = (desk_gap(12), desk_gap(20));
    assert!(g12 > 0.25 && g20 > g12, "{g12} {g20}");
    let (e12, e20) = (exponential_stage_two_edge_measure(12), exponential_stage_two_edge_measure(20));
    assert!(1.0 < e20 && e20 < e12 && e12 < 1.0 + 2.0 / 12.0, "{e12} {e20}");
}
