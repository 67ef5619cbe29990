//! Injective homomorphisms of a structuring graph into the grid, and the
//! edge neighborhood function built on them.
//!
//! The neighborhood of a grid edge `e` is the union of the bud images over
//! every embedding that maps some root edge onto `e`. The skeleton loop asks
//! for it once per edge per iteration, so [`NeighborhoodTable`] computes it
//! for every edge up front. For a connected structuring graph the result
//! away from the border only depends on the edge direction, so the table
//! searches one template per direction and translates it; anchors near the
//! border fall back to the full search.

use crate::error::{Error, Result};
use crate::grid::{Direction, EdgeSet, GridGraph, Pixel};
use crate::sgraph::{orientation_ok, StructuringGraph};

/// An injective, adjacency-preserving map from structuring-graph vertices
/// to grid pixels, with the induced edge map.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Embedding {
    pub vertex_map: Vec<Pixel>,
    /// Grid edge index of the image of each structuring edge, in the order of
    /// [`StructuringGraph::edges`].
    pub edge_map: Vec<usize>,
}

impl Embedding {
    fn from_vertex_map(s: &StructuringGraph, grid: &GridGraph, vertex_map: &[Pixel]) -> Self {
        let edge_map = s
            .edges()
            .iter()
            .map(|e| {
                grid.edge_index(vertex_map[e.u], vertex_map[e.v])
                    .expect("embedding preserves adjacency")
            })
            .collect();
        Embedding {
            vertex_map: vertex_map.to_vec(),
            edge_map,
        }
    }

    /// Grid indices of the bud images.
    pub fn bud_images<'a>(&'a self, s: &'a StructuringGraph) -> impl Iterator<Item = usize> + 'a {
        s.buds().map(|b| self.edge_map[b])
    }
}

/// Backtracking matcher over the vertices of a structuring graph.
struct Matcher<'a> {
    s: &'a StructuringGraph,
    grid: GridGraph,
    adj: Vec<Vec<(usize, usize)>>,
}

struct Plan {
    order: Vec<usize>,
    parent: Vec<Option<usize>>,
}

impl<'a> Matcher<'a> {
    fn new(s: &'a StructuringGraph, grid: GridGraph) -> Self {
        Matcher {
            s,
            grid,
            adj: s.adjacency(),
        }
    }

    /// Breadth-first vertex order seeded by the pinned vertices. Each later
    /// vertex records an earlier neighbor whose image bounds its candidates;
    /// vertices in other components start fresh and range over all pixels.
    fn plan(&self, pinned: &[usize]) -> Plan {
        let n = self.s.vertex_count();
        let mut placed = vec![false; n];
        let mut parent = vec![None; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = std::collections::VecDeque::new();
        for &v in pinned {
            placed[v] = true;
            queue.push_back(v);
        }
        let mut next_seed = 0;
        loop {
            while let Some(x) = queue.pop_front() {
                for &(y, _) in &self.adj[x] {
                    if !placed[y] {
                        placed[y] = true;
                        parent[y] = Some(x);
                        order.push(y);
                        queue.push_back(y);
                    }
                }
            }
            while next_seed < n && placed[next_seed] {
                next_seed += 1;
            }
            if next_seed == n {
                break;
            }
            placed[next_seed] = true;
            order.push(next_seed);
            queue.push_back(next_seed);
        }
        Plan { order, parent }
    }

    fn feasible(&self, v: usize, cand: Pixel, img: &[Pixel], set: &[bool]) -> bool {
        if img.iter().zip(set).any(|(&p, &s)| s && p == cand) {
            return false;
        }
        self.adj[v].iter().all(|&(w, ei)| {
            !set[w]
                || (self.grid.are_adjacent(cand, img[w])
                    && orientation_ok(self.s.edges()[ei].orientation, cand, img[w]))
        })
    }

    /// Calls `visit` with the vertex map of every embedding extending `pins`.
    fn run(&self, pins: &[(usize, Pixel)], visit: &mut dyn FnMut(&[Pixel])) {
        let n = self.s.vertex_count();
        let mut img = vec![Pixel::new(0, 0); n];
        let mut set = vec![false; n];
        for &(v, p) in pins {
            if !self.grid.contains(p) || !self.feasible(v, p, &img, &set) {
                return;
            }
            img[v] = p;
            set[v] = true;
        }
        let pinned: Vec<usize> = pins.iter().map(|&(v, _)| v).collect();
        let plan = self.plan(&pinned);
        self.extend(0, &plan, &mut img, &mut set, visit);
    }

    fn extend(
        &self,
        depth: usize,
        plan: &Plan,
        img: &mut [Pixel],
        set: &mut [bool],
        visit: &mut dyn FnMut(&[Pixel]),
    ) {
        let Some(&v) = plan.order.get(depth) else {
            visit(img);
            return;
        };
        let mut try_candidate = |cand: Pixel, img: &mut [Pixel], set: &mut [bool]| {
            if self.feasible(v, cand, img, set) {
                img[v] = cand;
                set[v] = true;
                self.extend(depth + 1, plan, img, set, visit);
                set[v] = false;
            }
        };
        match plan.parent[v] {
            Some(p) => {
                let anchor = img[p];
                for cand in self.grid.neighbors(anchor) {
                    try_candidate(cand, img, set);
                }
            }
            None => {
                for cand in self.grid.pixels() {
                    try_candidate(cand, img, set);
                }
            }
        }
    }

    /// Pins root edge `root` onto grid edge `anchor`, both orientations.
    fn anchored(&self, root: usize, anchor: usize, visit: &mut dyn FnMut(&[Pixel])) {
        let re = self.s.edges()[root];
        let e = self.grid.edge(anchor);
        self.run(&[(re.u, e.u), (re.v, e.v)], visit);
        self.run(&[(re.u, e.v), (re.v, e.u)], visit);
    }

    /// Sorted, deduplicated neighborhood of `anchor`.
    fn neighborhood(&self, anchor: usize, out: &mut Vec<u32>) {
        out.clear();
        let buds: Vec<(usize, usize)> = self
            .s
            .buds()
            .map(|b| (self.s.edges()[b].u, self.s.edges()[b].v))
            .collect();
        for root in self.s.roots() {
            self.anchored(root, anchor, &mut |map| {
                for &(u, v) in &buds {
                    let idx = self.grid.edge_index(map[u], map[v]).expect("adjacent");
                    out.push(idx as u32);
                }
            });
        }
        out.sort_unstable();
        out.dedup();
    }
}

/// All embeddings mapping root edge `root` (an index into
/// [`StructuringGraph::edges`]) onto grid edge `anchor`, in lexicographic
/// order of their vertex maps.
pub fn embeddings_at(
    s: &StructuringGraph,
    grid: &GridGraph,
    root: usize,
    anchor: usize,
) -> Result<Vec<Embedding>> {
    if !s.edges().get(root).is_some_and(|e| e.root) {
        return Err(Error::InvalidArgument(format!(
            "structuring edge {root} is not a root"
        )));
    }
    if anchor >= grid.edge_count() {
        return Err(Error::InvalidArgument(format!(
            "anchor {anchor} is not an edge of {grid}"
        )));
    }
    let matcher = Matcher::new(s, *grid);
    let mut out = Vec::new();
    matcher.anchored(root, anchor, &mut |map| {
        out.push(Embedding::from_vertex_map(s, grid, map))
    });
    out.sort();
    Ok(out)
}

/// Every embedding of `s` into `grid`, in lexicographic order.
pub fn all_embeddings(s: &StructuringGraph, grid: &GridGraph) -> Vec<Embedding> {
    let mut out = Vec::new();
    for_each_embedding(s, grid, |map| out.push(Embedding::from_vertex_map(s, grid, map)));
    out.sort();
    out
}

/// Streams the vertex map of every embedding of `s` into `grid`.
pub fn for_each_embedding(s: &StructuringGraph, grid: &GridGraph, mut visit: impl FnMut(&[Pixel])) {
    if s.vertex_count() == 0 {
        return;
    }
    Matcher::new(s, *grid).run(&[], &mut visit);
}

/// The neighborhood of grid edge `anchor`: the union of bud images over all
/// embeddings mapping a root onto it.
pub fn neighborhood(s: &StructuringGraph, grid: &GridGraph, anchor: usize) -> Result<EdgeSet> {
    if anchor >= grid.edge_count() {
        return Err(Error::InvalidArgument(format!(
            "anchor {anchor} is not an edge of {grid}"
        )));
    }
    let mut buf = Vec::new();
    Matcher::new(s, *grid).neighborhood(anchor, &mut buf);
    EdgeSet::from_indices(*grid, buf.into_iter().map(|i| i as usize))
}

/// Precomputed neighborhoods of every edge of a grid, stored row-compressed.
///
/// Immutable once built, so it can be shared freely across threads.
#[derive(Debug, Clone)]
pub struct NeighborhoodTable {
    grid: GridGraph,
    offsets: Vec<u32>,
    items: Vec<u32>,
}

/// One embedding seen from the anchor's origin: the bounding box of its
/// vertex offsets and its bud images as `(drow, dcol, direction)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Placement {
    rows: (isize, isize),
    cols: (isize, isize),
    buds: Vec<(isize, isize, Direction)>,
}

/// Embeddings of a connected structuring graph at an anchor of one
/// direction, plus the union of their buds.
#[derive(Debug, Clone, Default)]
struct Template {
    placements: Vec<Placement>,
    union: Vec<(isize, isize, Direction)>,
}

fn translate(grid: &GridGraph, origin: Pixel, (dr, dc, d): (isize, isize, Direction)) -> Option<usize> {
    let p = grid.offset(origin, dr, dc)?;
    grid.edge_at(p, d)
}

impl NeighborhoodTable {
    /// Builds the table by translating per-direction templates.
    ///
    /// The grid is an induced subgraph of the infinite lattice, so the
    /// embeddings at any anchor are the template embeddings whose vertices
    /// all land on the grid. Interior anchors keep all of them. Graphs with
    /// several components fall back to full search.
    pub fn build(s: &StructuringGraph, grid: &GridGraph) -> Self {
        let grid = *grid;
        let Some(margin) = translation_margin(s) else {
            return Self::build_exhaustive(s, &grid);
        };
        let templates = build_templates(s, &grid, margin);

        let mut offsets = Vec::with_capacity(grid.edge_count() + 1);
        let mut items: Vec<u32> = Vec::new();
        offsets.push(0u32);
        for anchor in 0..grid.edge_count() {
            let (origin, dir) = grid.edge_origin(anchor);
            let template = &templates[dir as usize];
            let start = items.len();
            if is_interior(&grid, origin, dir, margin) {
                items.extend(template.union.iter().map(|&t| {
                    translate(&grid, origin, t).expect("interior translation stays on grid") as u32
                }));
            } else {
                let fits = |(lo, hi): (isize, isize), at: usize, size: usize| {
                    at as isize + lo >= 0 && at as isize + hi < size as isize
                };
                for pl in &template.placements {
                    if fits(pl.rows, origin.row, grid.height()) && fits(pl.cols, origin.col, grid.width()) {
                        items.extend(pl.buds.iter().map(|&t| {
                            translate(&grid, origin, t).expect("placement fits the grid") as u32
                        }));
                    }
                }
                items[start..].sort_unstable();
                let kept = dedup_in_place(&mut items[start..]);
                items.truncate(start + kept);
            }
            offsets.push(u32::try_from(items.len()).expect("neighborhood table overflow"));
        }
        NeighborhoodTable {
            grid,
            offsets,
            items,
        }
    }

    /// Builds the table with full search at every anchor. Slower; kept as a
    /// reference for the translated fast path.
    pub fn build_exhaustive(s: &StructuringGraph, grid: &GridGraph) -> Self {
        let matcher = Matcher::new(s, *grid);
        let mut offsets = vec![0u32];
        let mut items = Vec::new();
        let mut buf = Vec::new();
        for anchor in 0..grid.edge_count() {
            matcher.neighborhood(anchor, &mut buf);
            items.extend_from_slice(&buf);
            offsets.push(items.len() as u32);
        }
        NeighborhoodTable {
            grid: *grid,
            offsets,
            items,
        }
    }

    pub fn grid(&self) -> GridGraph {
        self.grid
    }

    /// Neighborhood of `anchor` as grid edge indices.
    pub fn get(&self, anchor: usize) -> &[u32] {
        &self.items[self.offsets[anchor] as usize..self.offsets[anchor + 1] as usize]
    }

    /// True if some root can be mapped onto `anchor`.
    pub fn is_anchorable(&self, anchor: usize) -> bool {
        self.offsets[anchor] != self.offsets[anchor + 1]
    }

    pub fn to_edgeset(&self, anchor: usize) -> EdgeSet {
        EdgeSet::from_indices(self.grid, self.get(anchor).iter().map(|&i| i as usize))
            .expect("table indices are in range")
    }
}

/// Hop bound from any root edge to every vertex, or `None` when the graph is
/// disconnected (embeddings of other components are not local).
fn translation_margin(s: &StructuringGraph) -> Option<usize> {
    if !s.is_connected() || !s.has_roots() {
        return None;
    }
    s.roots()
        .map(|r| {
            let e = s.edges()[r];
            s.distances_from(&[e.u, e.v])
                .into_iter()
                .map(|d| d.expect("connected"))
                .max()
                .unwrap_or(0)
        })
        .max()
}

fn is_interior(grid: &GridGraph, origin: Pixel, dir: Direction, margin: usize) -> bool {
    let (dr, dc) = dir.offset();
    let other_col = origin.col as isize + dc;
    let min_row = origin.row;
    let max_row = origin.row + dr as usize;
    let min_col = (origin.col as isize).min(other_col);
    let max_col = (origin.col as isize).max(other_col);
    min_row >= margin
        && max_row + margin < grid.height()
        && min_col >= margin as isize
        && (max_col as usize) + margin < grid.width()
}

fn dedup_in_place(xs: &mut [u32]) -> usize {
    if xs.is_empty() {
        return 0;
    }
    let mut w = 1;
    for r in 1..xs.len() {
        if xs[r] != xs[w - 1] {
            xs[w] = xs[r];
            w += 1;
        }
    }
    w
}

fn build_templates(s: &StructuringGraph, grid: &GridGraph, margin: usize) -> Vec<Template> {
    let side = 2 * margin + 4;
    let virt = GridGraph::new(side, side, grid.connectivity()).expect("positive size");
    let matcher = Matcher::new(s, virt);
    let origin = Pixel::new(margin + 1, margin + 1);
    let rel = |p: Pixel| (p.row as isize - origin.row as isize, p.col as isize - origin.col as isize);
    let buds: Vec<usize> = s.buds().collect();
    Direction::ALL
        .iter()
        .map(|&dir| {
            let Some(anchor) = virt.edge_at(origin, dir) else {
                return Template::default();
            };
            let mut placements = Vec::new();
            for root in s.roots() {
                matcher.anchored(root, anchor, &mut |map| {
                    let (r0, c0) = rel(map[0]);
                    let mut rows = (r0, r0);
                    let mut cols = (c0, c0);
                    for &p in map {
                        let (r, c) = rel(p);
                        rows = (rows.0.min(r), rows.1.max(r));
                        cols = (cols.0.min(c), cols.1.max(c));
                    }
                    let mut pb: Vec<_> = buds
                        .iter()
                        .map(|&b| {
                            let e = s.edges()[b];
                            let idx = virt.edge_index(map[e.u], map[e.v]).expect("adjacent");
                            let (p, d) = virt.edge_origin(idx);
                            let (r, c) = rel(p);
                            (r, c, d)
                        })
                        .collect();
                    pb.sort_unstable();
                    pb.dedup();
                    placements.push(Placement { rows, cols, buds: pb });
                });
            }
            placements.sort_unstable();
            placements.dedup();
            let mut union: Vec<_> = placements.iter().flat_map(|p| p.buds.iter().copied()).collect();
            union.sort_unstable();
            union.dedup();
            Template { placements, union }
        })
        .collect()
}
