use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::energy::EnergyParams;
use crate::geometry::{Contour, TriMesh, Vec3};
use crate::graph::PruneOptions;
use crate::shapes;

fn instance(seed: u64, m: usize, mesh: TriMesh) -> (Contour, TriMesh, EnergyModel) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = shapes::random_star_polygon(&mut rng, m);
    let t2: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..2.0)).collect();
    let t3: Vec<f64> = (0..mesh.vertex_count()).map(|_| rng.random_range(0.0..2.0)).collect();
    let model = EnergyModel::new(&c, &mesh, &t2, &t3, EnergyParams::default()).unwrap();
    (c, mesh, model)
}

#[test]
fn zero_bound_gives_no_path() {
    let (c, mesh, model) = instance(1, 3, shapes::tetrahedron());
    let g = LayeredGraph::new(&c, &mesh, PruneOptions::default());
    let first: Vec<usize> = g.first_layer_ids().collect();
    assert!(matches!(
        layered_dijkstra(&g, &model, &first, Targets::Duplicates, Some(0.0)),
        Err(SolverError::NoPath(_))
    ));
}

#[test]
fn set_source_is_min_over_single_sources() {
    let (c, mesh, model) = instance(2, 4, shapes::tetrahedron());
    let g = LayeredGraph::new(&c, &mesh, PruneOptions::default());
    let first: Vec<usize> = g.first_layer_ids().collect();
    let all = layered_dijkstra(&g, &model, &first, Targets::FinalLayer, None).unwrap();
    let singles: Vec<_> =
        first.iter().map(|&s| layered_dijkstra(&g, &model, &[s], Targets::FinalLayer, None).unwrap()).collect();
    for &t in all.targets() {
        let best = singles.iter().map(|r| r.distance(t)).fold(f64::INFINITY, f64::min);
        assert_eq!(all.distance(t), best);
    }
}

#[test]
fn cyclic_path_is_valid_and_below_every_closed_path() {
    for seed in 0..10 {
        let (c, mesh, model) = instance(seed, 3 + seed as usize % 4, shapes::octahedron());
        let g = LayeredGraph::new(&c, &mesh, PruneOptions::default());
        let (path, stats) = solve_cyclic(&g, &model, SolveOptions::default()).unwrap();
        path.validate(&g, &model).unwrap();
        assert_eq!(path.total_energy, path.recomputed_energy(&g, &model));
        for s in g.first_layer_ids() {
            let run = layered_dijkstra(&g, &model, &[s], Targets::Duplicates, None).unwrap();
            assert!(path.total_energy <= run.distance(g.duplicate(s)));
        }
        assert!(stats.branches_processed <= stats.first_layer_size);
        assert!(stats.upper_bounds.windows(2).all(|w| w[1] <= w[0]));
        assert!(stats.popped_lower_bounds.iter().all(|&b| b <= path.total_energy));
    }
}

#[test]
fn warm_start_finds_same_optimum() {
    let (c, mesh, model) = instance(9, 6, shapes::octahedron());
    let g = LayeredGraph::new(&c, &mesh, PruneOptions::default());
    let (a, _) = solve_cyclic(&g, &model, SolveOptions::default()).unwrap();
    let (b, _) = solve_cyclic(&g, &model, SolveOptions { warm_start: true }).unwrap();
    assert_eq!(a.total_energy, b.total_energy);
}

#[test]
fn open_mode_relaxes_cyclic() {
    for seed in 0..50 {
        let (c, mesh, model) = instance(100 + seed, 3 + seed as usize % 5, shapes::tetrahedron());
        let g = LayeredGraph::new(&c, &mesh, PruneOptions::default());
        let open = solve_open(&g, &model).unwrap();
        open.validate(&g, &model).unwrap();
        let (cyc, _) = solve_cyclic(&g, &model, SolveOptions::default()).unwrap();
        assert!(open.total_energy <= cyc.total_energy);
    }
}

#[test]
fn open_contour_path() {
    let (c, mesh, _) = instance(4, 5, shapes::tetrahedron());
    let c = Contour::new(c.vertices().to_vec(), false).unwrap();
    let model = EnergyModel::new(&c, &mesh, &[1.0; 5], &[1.0; 4], EnergyParams::default()).unwrap();
    let g = LayeredGraph::new(&c, &mesh, PruneOptions::default());
    let p = solve_open(&g, &model).unwrap();
    p.validate(&g, &model).unwrap();
    assert!(!p.cyclic);
    assert_eq!(p.vertex_matches(&g).len(), 5);
    assert!(matches!(solve_cyclic(&g, &model, SolveOptions::default()), Err(SolverError::NoPath(_))));
}

#[test]
fn mesh_without_edges_has_no_path() {
    let c = shapes::regular_polygon(4, 1.0);
    let mesh = TriMesh::new(vec![Vec3::zeros()], Vec::new()).unwrap();
    let model = EnergyModel::new(&c, &mesh, &[1.0; 4], &[1.0], EnergyParams::default()).unwrap();
    let g = LayeredGraph::new(&c, &mesh, PruneOptions::default());
    assert!(matches!(solve_open(&g, &model), Err(SolverError::NoPath(_))));
    assert!(matches!(solve_cyclic(&g, &model, SolveOptions::default()), Err(SolverError::NoPath(_))));
}

#[test]
fn zero_cost_rim_path() {
    // open tube whose bottom rim coincides with the contour: walking the rim
    // costs nothing
    let c = shapes::regular_polygon(4, 1.0);
    let mut v: Vec<Vec3> = c.vertices().iter().map(|p| Vec3::new(p.x, p.y, 0.0)).collect();
    v.extend(c.vertices().iter().map(|p| Vec3::new(p.x, p.y, 1.0)));
    let faces = (0..4)
        .flat_map(|k| {
            let n = (k + 1) % 4;
            [[k, n, n + 4], [k, n + 4, k + 4]]
        })
        .collect();
    let mesh = TriMesh::new(v, faces).unwrap();
    let model = EnergyModel::new(&c, &mesh, &[0.5; 4], &[0.5; 8], EnergyParams::default()).unwrap();
    let g = LayeredGraph::new(&c, &mesh, PruneOptions::default());
    let (p, _) = solve_cyclic(&g, &model, SolveOptions::default()).unwrap();
    assert!(p.total_energy < 1e-12);
    p.validate(&g, &model).unwrap();
}

#[test]
fn voronoi_split_on_tetrahedron() {
    let (c, mesh, _) = instance(3, 3, shapes::tetrahedron());
    let g = LayeredGraph::new(&c, &mesh, PruneOptions::default());
    let first: Vec<usize> = g.first_layer_ids().collect();
    for &a in &first {
        for &b in &first {
            match voronoi_split(&g, a, b, &first) {
                Ok((b1, b2)) => {
                    assert!(!b1.is_empty() && !b2.is_empty());
                    assert_eq!(b1.len() + b2.len(), first.len());
                    assert!(b1.contains(&a));
                }
                Err(SolverError::InvalidSplit(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }
}

#[test]
fn voronoi_split_far_seeds() {
    let mesh = shapes::icosphere(1, 1.0);
    let c = shapes::regular_polygon(3, 1.0);
    let g = LayeredGraph::new(&c, &mesh, PruneOptions::default());
    let top = (0..mesh.vertex_count()).max_by(|&a, &b| mesh.vertex(a).z.total_cmp(&mesh.vertex(b).z)).unwrap();
    let bottom = (0..mesh.vertex_count()).min_by(|&a, &b| mesh.vertex(a).z.total_cmp(&mesh.vertex(b).z)).unwrap();
    let ea = mesh.out_edges(top)[0];
    let eb = mesh.out_edges(bottom)[0];
    let over = |j: usize| -> Vec<usize> {
        mesh.out_edges(j).iter().filter(|&&e| mesh.edge(e).1 != top && mesh.edge(e).1 != bottom).copied().collect()
    };
    let mut branch = over(top);
    branch.extend(over(bottom));
    let (b1, b2) = voronoi_split(&g, ea, eb, &branch).unwrap();
    assert_eq!(b1, over(top));
    assert_eq!(b2, over(bottom));
}

#[test]
fn deterministic() {
    let (c, mesh, model) = instance(21, 7, shapes::octahedron());
    let g = LayeredGraph::new(&c, &mesh, PruneOptions::default());
    let a = solve_cyclic(&g, &model, SolveOptions::default()).unwrap();
    let b = solve_cyclic(&g, &model, SolveOptions::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn cached_costs_give_identical_runs() {
    use super::dijkstra::{layered_dijkstra_cached, EdgeCosts};
    for (seed, prune) in [
        (5, PruneOptions::default()),
        (6, PruneOptions { turning_points: false, degenerate_pairs: false, ..Default::default() }),
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c, mesh, model) = instance(seed, 5, shapes::random_convex_hull(&mut rng, 9));
        let g = LayeredGraph::new(&c, &mesh, prune);
        let cache = EdgeCosts::build(&g, &model).unwrap();
        let first: Vec<usize> = g.first_layer_ids().collect();
        for sources in [&first[..], &first[..3]] {
            let a = layered_dijkstra(&g, &model, sources, Targets::Duplicates, None).unwrap();
            let b = layered_dijkstra_cached(&g, &cache, sources, Targets::Duplicates, None).unwrap();
            for id in 0..g.id_bound() {
                assert_eq!(a.distance(id).to_bits(), b.distance(id).to_bits());
                assert_eq!(a.origin(id), b.origin(id));
            }
            let t = a.best_target().unwrap().0;
            assert_eq!(a.path_to(t), b.path_to(t));
        }
    }
}
