//! Skeleton exactness, layer consistency and distance maps against
//! independent oracles.

use std::collections::VecDeque;

use edgemorph::{
    distance_map, edgeset_to_image, image_to_edgeset, reconstruct,
    skeleton_by_distance, skeletonize, BinaryImage, Builtin, Connectivity, DistanceVariant,
    EdgeSet, GridGraph, Pixel, StructuredMorphology, StructuringGraph, Termination, VacuousPolicy,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const POLICIES: [VacuousPolicy; 2] = [VacuousPolicy::Include, VacuousPolicy::Exclude];

fn image(w: usize, h: usize) -> impl Strategy<Value = BinaryImage> {
    prop::collection::vec(prop::bool::weighted(0.6), w * h)
        .prop_map(move |v| BinaryImage::from_vec(w, h, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reconstruction_is_exact_and_monotone(
        img in image(10, 9),
        b in prop::sample::select(vec![Builtin::Single, Builtin::Square, Builtin::Grid3]),
        conn in prop::sample::select(vec![Connectivity::Four, Connectivity::Eight]),
        policy in prop::sample::select(POLICIES.to_vec()),
    ) {
        let g = GridGraph::new(10, 9, conn).unwrap();
        let s = StructuringGraph::builtin(b, conn);
        let m = image_to_edgeset(&img, g).unwrap();
        let d = skeletonize(&m, &s, &g, policy, 80).unwrap();
        prop_assert_eq!(&reconstruct(&d, &g, 0).unwrap(), &m);
        let mut prev = m.clone();
        for k in 1..=d.residue_index() {
            let r = reconstruct(&d, &g, k).unwrap();
            prop_assert!(r.is_subset(&prev));
            prev = r;
        }
    }
}

/// Recomputes `E_n` by repeated erosion and checks every stored layer, the
/// residue, and `reconstruct(d, k) = δᵏ(E_k)`.
#[test]
fn layers_match_direct_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..30 {
        let conn = if trial % 2 == 0 { Connectivity::Four } else { Connectivity::Eight };
        let g = GridGraph::new(12, 12, conn).unwrap();
        let img = BinaryImage::from_fn(12, 12, |_| rng.gen_bool(0.7));
        let m = image_to_edgeset(&img, g).unwrap();
        for b in [Builtin::Square, Builtin::Grid3, Builtin::TriangleOdd] {
            let s = StructuringGraph::builtin(b, conn);
            let ops = StructuredMorphology::new(&s, &g).unwrap();
            for policy in POLICIES {
                let d = skeletonize(&m, &s, &g, policy, 100).unwrap();
                let mut levels = vec![m.clone()];
                for _ in 0..d.residue_index() {
                    let next = ops.erode(levels.last().unwrap(), policy).unwrap();
                    levels.push(next);
                }
                for (n, layer) in d.layers().iter().enumerate() {
                    let expect = levels[n].difference(&ops.dilate(&levels[n + 1]).unwrap());
                    assert_eq!(layer, &expect, "{b:?} {policy:?} level {n}");
                }
                assert_eq!(d.residue(), &levels[d.residue_index()]);
                if d.termination() == Termination::Emptied {
                    assert!(d.residue().is_empty());
                }
                for (k, level) in levels.iter().enumerate().take(d.residue_index() + 1) {
                    let mut expect = level.clone();
                    for _ in 0..k {
                        expect = ops.dilate(&expect).unwrap();
                    }
                    assert_eq!(reconstruct(&d, &g, k).unwrap(), expect);
                }
            }
        }
    }
}

/// Step distance from the background, moving only along `steps`. Pixels
/// outside the raster are background; unreachable pixels get `None`.
fn bfs_distance(img: &BinaryImage, steps: &[(isize, isize)]) -> Vec<Option<u32>> {
    let (w, h) = (img.width(), img.height());
    let mut dist = vec![None; w * h];
    let mut queue = VecDeque::new();
    for p in (0..h).flat_map(|r| (0..w).map(move |c| Pixel::new(r, c))) {
        if !img.get(p) {
            dist[p.row * w + p.col] = Some(0);
            queue.push_back(p);
        }
    }
    // foreground pixels one step from outside the raster start at 1
    for p in img.foreground() {
        let escapes = steps.iter().any(|&(dr, dc)| {
            let (r, c) = (p.row as isize + dr, p.col as isize + dc);
            r < 0 || c < 0 || r >= h as isize || c >= w as isize
        });
        if escapes {
            dist[p.row * w + p.col] = Some(1);
        }
    }
    let mut frontier: Vec<Pixel> = queue.drain(..).collect();
    frontier.extend(img.foreground().filter(|p| dist[p.row * w + p.col] == Some(1)));
    let mut queue: VecDeque<Pixel> = frontier.into();
    while let Some(p) = queue.pop_front() {
        let dp = dist[p.row * w + p.col].unwrap();
        for &(dr, dc) in steps {
            let (r, c) = (p.row as isize + dr, p.col as isize + dc);
            if r < 0 || c < 0 || r >= h as isize || c >= w as isize {
                continue;
            }
            let i = r as usize * w + c as usize;
            if dist[i].is_none_or(|d| d > dp + 1) {
                dist[i] = Some(dp + 1);
                queue.push_back(Pixel::new(r as usize, c as usize));
            }
        }
    }
    dist
}

fn framed_random(rng: &mut ChaCha8Rng, n: usize, density: f64) -> BinaryImage {
    BinaryImage::from_fn(n, n, |p| {
        p.row > 0 && p.col > 0 && p.row + 1 < n && p.col + 1 < n && rng.gen_bool(density)
    })
}

#[test]
fn step_graph_distance_equals_bfs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let g = GridGraph::new(16, 16, Connectivity::Eight).unwrap();
    for trial in 0..50 {
        let raw = framed_random(&mut rng, 16, 0.75);
        let m = image_to_edgeset(&raw, g).unwrap();
        let rendered = edgeset_to_image(&m);
        for variant in [DistanceVariant::Odd, DistanceVariant::Even] {
            let dm = distance_map(&m, &variant.sgraph(), &g, VacuousPolicy::Include, 64).unwrap();
            let oracle = bfs_distance(&rendered, variant.steps());
            assert_eq!(dm.values(), &oracle[..], "trial {trial} {variant:?}");
        }
    }
}

#[test]
fn distance_skeleton_of_square_is_bfs_maxima() {
    let img = BinaryImage::from_fn(7, 7, |p| (1..6).contains(&p.row) && (1..6).contains(&p.col));
    for variant in [DistanceVariant::Odd, DistanceVariant::Even] {
        let dist = bfs_distance(&img, variant.steps());
        let at = |p: Pixel| dist[p.row * 7 + p.col].unwrap();
        let expect = BinaryImage::from_fn(7, 7, |p| {
            img.get(p)
                && variant.steps().iter().all(|&(dr, dc)| {
                    let q = Pixel::new((p.row as isize + dr) as usize, (p.col as isize + dc) as usize);
                    at(q) <= at(p)
                })
        });
        assert_eq!(skeleton_by_distance(&img, variant), expect, "{variant:?}");
    }
    // city-block plateaus keep both diagonals of the square
    let odd = skeleton_by_distance(&img, DistanceVariant::Odd);
    assert_eq!(
        odd,
        BinaryImage::from_fn(7, 7, |p| img.get(p) && (p.row == p.col || p.row + p.col == 6))
    );
}

#[test]
fn distance_skeleton_keeps_isolated_pixels_and_blank() {
    let img = BinaryImage::from_ascii(
        "
        #....
        ..#..
        .....
        ",
    )
    .unwrap();
    for variant in [DistanceVariant::Odd, DistanceVariant::Even] {
        assert_eq!(skeleton_by_distance(&img, variant), img);
    }
}

#[test]
fn unresolved_pixels_stay_unresolved() {
    // no triangle embeds on a 4-grid, so no edge is anchorable and every
    // foreground pixel stays inside forever
    let g = GridGraph::new(4, 4, Connectivity::Four).unwrap();
    let s = StructuringGraph::builtin(Builtin::TriangleOdd, Connectivity::Four);
    let m = EdgeSet::from_indices(g, [0]).unwrap();
    let dm = distance_map(&m, &s, &g, VacuousPolicy::Include, 10).unwrap();
    assert_eq!(dm.get(Pixel::new(0, 0)), None);
    assert_eq!(dm.get(Pixel::new(0, 1)), None);
    assert_eq!(dm.get(Pixel::new(3, 3)), Some(0));
}
