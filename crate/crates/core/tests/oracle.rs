mod common;

use common::{small_instance, Oracle, Rules};
use conjmatch::energy::{EnergyModel, EnergyParams};
use conjmatch::graph::{LayeredGraph, PruneOptions, RefTagPolicy};
use conjmatch::shapes;
use conjmatch::solver::{solve_cyclic, SolveOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rules_of(p: PruneOptions) -> Rules {
    Rules {
        turning_points: p.turning_points,
        degenerate_pairs: p.degenerate_pairs,
        all_incoming: p.ref_tags == RefTagPolicy::AllIncoming,
    }
}

#[test]
fn label_correcting_search_matches_enumeration() {
    for seed in 0..4u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let contour = shapes::random_star_polygon(&mut rng, 3);
        let mesh = shapes::tetrahedron();
        let t2: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..2.0)).collect();
        let t3: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..2.0)).collect();
        let o = Oracle::new(&contour, &mesh, &t2, &t3, Rules::default());
        let a = o.min_cycle().unwrap();
        let b = o.min_cycle_enumerated().unwrap();
        assert!((a - b).abs() <= 1e-12, "seed {seed}: {a} vs {b}");
    }
}

#[test]
fn solver_matches_oracle_for_every_pruning_variant() {
    let variants = [
        PruneOptions::default(),
        PruneOptions { turning_points: false, ..Default::default() },
        PruneOptions { degenerate_pairs: false, ..Default::default() },
        PruneOptions { turning_points: false, degenerate_pairs: false, ..Default::default() },
        PruneOptions { ref_tags: RefTagPolicy::AllIncoming, ..Default::default() },
    ];
    for seed in 0..10u64 {
        let inst = small_instance(1000 + seed);
        if inst.contour.len() > 5 {
            continue;
        }
        let model = EnergyModel::new(&inst.contour, &inst.mesh, &inst.t2, &inst.t3, EnergyParams::default()).unwrap();
        for p in variants {
            let g = LayeredGraph::new(&inst.contour, &inst.mesh, p);
            let (path, _) = solve_cyclic(&g, &model, SolveOptions::default()).unwrap();
            let want = Oracle::new(&inst.contour, &inst.mesh, &inst.t2, &inst.t3, rules_of(p)).min_cycle().unwrap();
            assert!((path.total_energy - want).abs() <= 1e-12, "{} {p:?}: {} vs {want}", inst.label, path.total_energy);
        }
    }
}

#[test]
fn path_states_are_oracle_states() {
    let inst = small_instance(77);
    let model = EnergyModel::new(&inst.contour, &inst.mesh, &inst.t2, &inst.t3, EnergyParams::default()).unwrap();
    let g = LayeredGraph::new(&inst.contour, &inst.mesh, PruneOptions::default());
    let (path, _) = solve_cyclic(&g, &model, SolveOptions::default()).unwrap();
    let o = Oracle::new(&inst.contour, &inst.mesh, &inst.t2, &inst.t3, Rules::default());
    // rebuild the walk in oracle terms and re-score it
    let walk: Vec<common::St> = path
        .correspondences()
        .iter()
        .map(|s| {
            let v = s.vertex;
            let c = match v.product.contour {
                conjmatch::graph::ContourStep::Edge(k) => common::Cs::Edge(k),
                conjmatch::graph::ContourStep::Stay(i) => common::Cs::Stay(i),
            };
            let m = match (v.product.mesh, v.ref_edge) {
                (conjmatch::graph::MeshStep::Edge(d), _) => common::Ms::Edge(d),
                (conjmatch::graph::MeshStep::Stay(j), Some(t)) => common::Ms::Stay { vertex: j, tag: t },
                _ => panic!("untagged pause"),
            };
            common::St { c, m }
        })
        .collect();
    assert!(o.is_feasible_cycle(&walk));
    assert!((o.cycle_energy(&walk) - path.total_energy).abs() <= 1e-12);
}
