//! Embedding search against a brute-force enumeration of injective vertex
//! maps, and translation equivariance of the neighborhood table.

use std::collections::BTreeSet;

use edgemorph::{
    embeddings_at, neighborhood, Builtin, Connectivity, GridGraph, NeighborhoodTable, Orientation,
    Pixel, StructuringGraph,
};

/// Every injective adjacency-preserving vertex map, built by assigning
/// vertices in index order and rejecting as soon as an edge between
/// assigned vertices fails.
fn brute_force(s: &StructuringGraph, g: &GridGraph) -> Vec<Vec<Pixel>> {
    fn edge_ok(g: &GridGraph, o: Orientation, a: Pixel, b: Pixel) -> bool {
        if !g.are_adjacent(a, b) {
            return false;
        }
        let axis = a.row == b.row || a.col == b.col;
        match o {
            Orientation::Any => true,
            Orientation::Axis => axis,
            Orientation::Diagonal => !axis,
        }
    }
    fn go(s: &StructuringGraph, g: &GridGraph, map: &mut Vec<Pixel>, out: &mut Vec<Vec<Pixel>>) {
        let i = map.len();
        if i == s.vertex_count() {
            out.push(map.clone());
            return;
        }
        for p in g.pixels() {
            if map.contains(&p) {
                continue;
            }
            map.push(p);
            let ok = s.edges().iter().all(|e| {
                e.u.max(e.v) != i || edge_ok(g, e.orientation, map[e.u], map[e.v])
            });
            if ok {
                go(s, g, map, out);
            }
            map.pop();
        }
    }
    let mut out = Vec::new();
    go(s, g, &mut Vec::new(), &mut out);
    out
}

#[test]
fn matches_brute_force_on_4x4() {
    for conn in [Connectivity::Four, Connectivity::Eight] {
        let g = GridGraph::new(4, 4, conn).unwrap();
        for b in Builtin::ALL {
            let s = StructuringGraph::builtin(b, conn);
            let maps = brute_force(&s, &g);
            for root in s.roots() {
                for anchor in 0..g.edge_count() {
                    let expected: BTreeSet<Vec<Pixel>> = maps
                        .iter()
                        .filter(|m| {
                            let e = &s.edges()[root];
                            g.edge_index(m[e.u], m[e.v]) == Some(anchor)
                        })
                        .cloned()
                        .collect();
                    let found: BTreeSet<Vec<Pixel>> = embeddings_at(&s, &g, root, anchor)
                        .unwrap()
                        .into_iter()
                        .map(|e| e.vertex_map)
                        .collect();
                    assert_eq!(found, expected, "{b:?} {conn} root {root} anchor {anchor}");
                }
            }
        }
    }
}

#[test]
fn edge_map_agrees_with_vertex_map() {
    let g = GridGraph::new(4, 4, Connectivity::Eight).unwrap();
    let s = StructuringGraph::builtin(Builtin::Square, Connectivity::Eight);
    for anchor in 0..g.edge_count() {
        for emb in embeddings_at(&s, &g, 0, anchor).unwrap() {
            assert_eq!(emb.edge_map[0], anchor);
            for (e, &img) in s.edges().iter().zip(&emb.edge_map) {
                assert_eq!(g.edge_index(emb.vertex_map[e.u], emb.vertex_map[e.v]), Some(img));
            }
        }
    }
}

#[test]
fn neighborhoods_commute_with_translation() {
    for conn in [Connectivity::Four, Connectivity::Eight] {
        let g = GridGraph::new(11, 11, conn).unwrap();
        for b in Builtin::ALL {
            let s = StructuringGraph::builtin(b, conn);
            let table = NeighborhoodTable::build_exhaustive(&s, &g);
            // anchors whose origin is at least 4 away from every border see
            // all embeddings of these graphs (diameter ≤ 4)
            for &dir in g.directions() {
                let base = g.edge_at(Pixel::new(4, 4), dir).unwrap();
                let reference: BTreeSet<(isize, isize, usize)> =
                    shifted(&g, table.get(base), Pixel::new(4, 4));
                for (r, c) in [(4, 5), (5, 4), (5, 5), (6, 4)] {
                    let anchor = g.edge_at(Pixel::new(r, c), dir).unwrap();
                    assert_eq!(
                        shifted(&g, table.get(anchor), Pixel::new(r, c)),
                        reference,
                        "{b:?} {conn} {dir:?}"
                    );
                }
            }
        }
    }
}

fn shifted(g: &GridGraph, items: &[u32], origin: Pixel) -> BTreeSet<(isize, isize, usize)> {
    items
        .iter()
        .map(|&i| {
            let (p, d) = g.edge_origin(i as usize);
            (
                p.row as isize - origin.row as isize,
                p.col as isize - origin.col as isize,
                d as usize,
            )
        })
        .collect()
}

#[test]
fn table_rows_match_direct_neighborhoods() {
    let g = GridGraph::new(7, 6, Connectivity::Eight).unwrap();
    for b in Builtin::ALL {
        let s = StructuringGraph::builtin(b, Connectivity::Eight);
        let table = NeighborhoodTable::build(&s, &g);
        for anchor in 0..g.edge_count() {
            assert_eq!(table.to_edgeset(anchor), neighborhood(&s, &g, anchor).unwrap());
        }
    }
}
