use std::collections::BTreeSet;

use super::*;
use crate::geometry::Contour;
use crate::shapes;

fn ends_contour(s: ContourStep, m: usize) -> (usize, usize) {
    match s {
        ContourStep::Edge(k) => (k, (k + 1) % m),
        ContourStep::Stay(i) => (i, i),
    }
}

fn ends_mesh(s: MeshStep, mesh: &TriMesh) -> (usize, usize) {
    match s {
        MeshStep::Edge(d) => mesh.edge(d),
        MeshStep::Stay(j) => (j, j),
    }
}

fn frame_mesh_edge(v: &ConjugateVertex) -> usize {
    match v.product.mesh {
        MeshStep::Edge(d) => d,
        MeshStep::Stay(_) => v.ref_edge.unwrap(),
    }
}

/// Conjugate edges tail -> head straight from the definitions.
fn definition_allows(g: &LayeredGraph, tail: usize, head: usize) -> bool {
    let m = g.contour_vertex_count();
    let mesh = g.mesh();
    if tail == head || g.is_virtual(tail) {
        return false;
    }
    let (tv, hv) = (g.vertex(tail), g.vertex(head));
    let advance = matches!(hv.product.contour, ContourStep::Edge(_));
    let want_layer = g.layer_of(tail) + usize::from(advance);
    if g.layer_of(head) != want_layer {
        return false;
    }
    if ends_contour(tv.product.contour, m).1 != ends_contour(hv.product.contour, m).0 {
        return false;
    }
    if ends_mesh(tv.product.mesh, mesh).1 != ends_mesh(hv.product.mesh, mesh).0 {
        return false;
    }
    let p = g.prune();
    if p.turning_points {
        if let (MeshStep::Edge(a), MeshStep::Edge(b)) = (tv.product.mesh, hv.product.mesh) {
            if b == TriMesh::reverse_edge(a) {
                return false;
            }
        }
    }
    if p.degenerate_pairs {
        let t_stay_m = matches!(tv.product.contour, ContourStep::Stay(_));
        let t_stay_n = matches!(tv.product.mesh, MeshStep::Stay(_));
        let h_stay_m = matches!(hv.product.contour, ContourStep::Stay(_));
        let h_stay_n = matches!(hv.product.mesh, MeshStep::Stay(_));
        if (t_stay_m && h_stay_n) || (t_stay_n && h_stay_m) {
            return false;
        }
    }
    if let MeshStep::Stay(j) = hv.product.mesh {
        let tag = hv.ref_edge.unwrap();
        if mesh.edge(tag).1 != j {
            return false;
        }
        if p.ref_tags == RefTagPolicy::Previous && tag != frame_mesh_edge(&tv) {
            return false;
        }
    }
    true
}

fn square() -> Contour {
    shapes::regular_polygon(4, 1.0)
}

#[test]
fn tetrahedron_counts() {
    let mesh = shapes::tetrahedron();
    let g = LayeredGraph::new(&square(), &mesh, PruneOptions::default());
    assert_eq!(g.first_layer_vertices().len(), 16);
    let info = g.info();
    assert_eq!(info.conjugate_vertices, 64);
    assert_eq!(info.conjugate_vertices_formula, 64);
    assert_eq!(info.product_vertices, 16);
}

#[test]
fn ids_round_trip() {
    let mesh = shapes::octahedron();
    let c = shapes::regular_polygon(5, 1.0);
    let g = LayeredGraph::new(&c, &mesh, PruneOptions::default());
    for id in 0..g.layer_count() * g.stride() {
        let v = g.vertex(id);
        assert!(v.product.is_valid());
        assert_eq!(g.id_of(&v), Some(id));
    }
}

#[test]
fn turning_point_not_emitted() {
    let mesh = shapes::tetrahedron();
    let g = LayeredGraph::new(&square(), &mesh, PruneOptions::default());
    let a_b = mesh.find_edge(0, 1).unwrap();
    let b_a = mesh.find_edge(1, 0).unwrap();
    let tail = ConjugateVertex {
        product: ProductEdge { contour: ContourStep::Edge(0), mesh: MeshStep::Edge(a_b) },
        ref_edge: None,
    };
    let heads: Vec<_> = g.out_neighbors(&tail).into_iter().map(|e| e.head.product.mesh).collect();
    assert!(!heads.contains(&MeshStep::Edge(b_a)));
    assert!(heads.contains(&MeshStep::Edge(mesh.find_edge(1, 2).unwrap())));
}

#[test]
fn contour_stay_then_mesh_stay_not_emitted() {
    let mesh = shapes::tetrahedron();
    let g = LayeredGraph::new(&square(), &mesh, PruneOptions::default());
    let a_b = mesh.find_edge(0, 1).unwrap();
    let tail = ConjugateVertex {
        product: ProductEdge { contour: ContourStep::Stay(1), mesh: MeshStep::Edge(a_b) },
        ref_edge: None,
    };
    assert!(g.out_neighbors(&tail).iter().all(|e| !matches!(e.head.product.mesh, MeshStep::Stay(_))));
}

#[test]
fn mesh_stay_tagged_with_previous_edge() {
    let mesh = shapes::tetrahedron();
    let g = LayeredGraph::new(&square(), &mesh, PruneOptions::default());
    let a_b = mesh.find_edge(0, 1).unwrap();
    let tail = ConjugateVertex {
        product: ProductEdge { contour: ContourStep::Edge(0), mesh: MeshStep::Edge(a_b) },
        ref_edge: None,
    };
    let stays: Vec<_> =
        g.out_neighbors(&tail).into_iter().filter(|e| matches!(e.head.product.mesh, MeshStep::Stay(_))).collect();
    assert_eq!(stays.len(), 1);
    assert_eq!(stays[0].head.product, ProductEdge { contour: ContourStep::Edge(1), mesh: MeshStep::Stay(1) });
    assert_eq!(stays[0].head.ref_edge, Some(a_b));
    assert_eq!(stays[0].layer_advance, 1);
}

#[test]
fn enumeration_matches_definitions() {
    let policies = [RefTagPolicy::Previous, RefTagPolicy::AllIncoming];
    for mesh in [shapes::tetrahedron(), shapes::octahedron()] {
        for closed in [true, false] {
            let pts = shapes::regular_polygon(4, 1.0).vertices().to_vec();
            let c = Contour::new(pts, closed).unwrap();
            for turning_points in [true, false] {
                for degenerate_pairs in [true, false] {
                    for ref_tags in policies {
                        let prune = PruneOptions { turning_points, degenerate_pairs, ref_tags };
                        let g = LayeredGraph::new(&c, &mesh, prune);
                        for tail in 0..g.id_bound() {
                            let emitted: Vec<usize> = g.out_ids(tail).into_iter().map(|x| x.0).collect();
                            let set: BTreeSet<usize> = emitted.iter().copied().collect();
                            assert_eq!(set.len(), emitted.len(), "duplicate heads");
                            let expected: BTreeSet<usize> =
                                (0..g.id_bound()).filter(|&h| definition_allows(&g, tail, h)).collect();
                            assert_eq!(set, expected, "tail {tail} prune {prune:?} closed {closed}");
                            for (h, adv) in g.out_ids(tail) {
                                assert_eq!(adv, g.layer_of(h) == g.layer_of(tail) + 1);
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn first_layer_open_contour() {
    let mesh = shapes::tetrahedron();
    let pts = square().vertices().to_vec();
    let g = LayeredGraph::new(&Contour::new(pts, false).unwrap(), &mesh, PruneOptions::default());
    assert_eq!(g.first_layer_vertices().len(), 16);
    assert_eq!(g.layer_count(), 3);
}

#[test]
fn empty_mesh_has_empty_first_layer() {
    let mesh = TriMesh::new(Vec::new(), Vec::new()).unwrap();
    let g = LayeredGraph::new(&square(), &mesh, PruneOptions::default());
    assert!(g.first_layer_vertices().is_empty());
    assert!(g.first_layer_ids().is_empty());
}

#[test]
fn icosphere_ratio_and_degree() {
    let mesh = shapes::icosphere(3, 1.0);
    assert!(mesh.vertex_count() >= 600);
    let g = LayeredGraph::new(&shapes::regular_polygon(8, 1.0), &mesh, PruneOptions::default());
    let info = g.info();
    assert!((6.0..=8.0).contains(&info.vertex_ratio), "{}", info.vertex_ratio);
    assert!((9.0..=13.0).contains(&info.mean_out_degree), "{}", info.mean_out_degree);
}
