//! Edge-based dilation, erosion, openings and closings, their grayscale
//! counterparts, and a certificate check for connected-operator behaviour on
//! a single input/output pair.

use std::collections::HashSet;

use crate::embed::{for_each_embedding, NeighborhoodTable};
use crate::error::{Error, Result};
use crate::grid::{BinaryImage, Connectivity, EdgeSet, GridGraph, Pixel};
use crate::sgraph::StructuringGraph;

/// How erosion treats an edge onto which no root can be mapped.
///
/// `Include` keeps it (its neighborhood is empty, and the empty set is a
/// subset of anything). `Exclude` drops it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum VacuousPolicy {
    #[default]
    Include,
    Exclude,
}

impl VacuousPolicy {
    pub fn name(self) -> &'static str {
        match self {
            VacuousPolicy::Include => "include",
            VacuousPolicy::Exclude => "exclude",
        }
    }
}

impl std::fmt::Display for VacuousPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for VacuousPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "include" => Ok(VacuousPolicy::Include),
            "exclude" => Ok(VacuousPolicy::Exclude),
            _ => Err(Error::InvalidArgument(format!("unknown vacuous policy {s:?}"))),
        }
    }
}

pub const GRAY_BOTTOM: u8 = 0;
pub const GRAY_TOP: u8 = 255;

/// A gray value for every edge of a grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeWeightMap {
    grid: GridGraph,
    weights: Vec<u8>,
}

impl EdgeWeightMap {
    pub fn constant(grid: GridGraph, value: u8) -> Self {
        EdgeWeightMap {
            grid,
            weights: vec![value; grid.edge_count()],
        }
    }

    pub fn from_vec(grid: GridGraph, weights: Vec<u8>) -> Result<Self> {
        if weights.len() != grid.edge_count() {
            return Err(Error::InvalidArgument(format!(
                "{} weights for {} edges",
                weights.len(),
                grid.edge_count()
            )));
        }
        Ok(EdgeWeightMap { grid, weights })
    }

    pub fn grid(&self) -> GridGraph {
        self.grid
    }

    pub fn get(&self, edge: usize) -> u8 {
        self.weights[edge]
    }

    pub fn set(&mut self, edge: usize, value: u8) {
        self.weights[edge] = value;
    }

    pub fn weights(&self) -> &[u8] {
        &self.weights
    }

    /// Pointwise `self <= other`.
    pub fn le(&self, other: &EdgeWeightMap) -> bool {
        self.grid == other.grid && self.weights.iter().zip(&other.weights).all(|(a, b)| a <= b)
    }
}

fn check_grid(expected: GridGraph, found: GridGraph) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::GridMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        })
    }
}

/// Binary and grayscale operators for one structuring graph on one grid.
///
/// Construction precomputes every edge neighborhood; all operators after
/// that are table lookups.
#[derive(Debug, Clone)]
pub struct StructuredMorphology {
    sgraph: StructuringGraph,
    table: NeighborhoodTable,
}

impl StructuredMorphology {
    pub fn new(sgraph: &StructuringGraph, grid: &GridGraph) -> Result<Self> {
        if !sgraph.has_roots() || !sgraph.has_buds() {
            return Err(Error::InvalidArgument(format!(
                "structuring graph {:?} needs at least one root and one bud",
                sgraph.name()
            )));
        }
        Ok(StructuredMorphology {
            sgraph: sgraph.clone(),
            table: NeighborhoodTable::build(sgraph, grid),
        })
    }

    pub fn grid(&self) -> GridGraph {
        self.table.grid()
    }

    pub fn sgraph(&self) -> &StructuringGraph {
        &self.sgraph
    }

    pub fn table(&self) -> &NeighborhoodTable {
        &self.table
    }

    pub fn dilate(&self, m: &EdgeSet) -> Result<EdgeSet> {
        check_grid(self.grid(), m.grid())?;
        let mut out = EdgeSet::empty(self.grid());
        for e in m.iter() {
            for &x in self.table.get(e) {
                out.insert(x as usize);
            }
        }
        Ok(out)
    }

    pub fn erode(&self, p: &EdgeSet, policy: VacuousPolicy) -> Result<EdgeSet> {
        check_grid(self.grid(), p.grid())?;
        let mut out = EdgeSet::empty(self.grid());
        for e in 0..self.grid().edge_count() {
            let n = self.table.get(e);
            let keep = if n.is_empty() {
                policy == VacuousPolicy::Include
            } else {
                n.iter().all(|&x| p.contains(x as usize))
            };
            if keep {
                out.insert(e);
            }
        }
        Ok(out)
    }

    /// Dilation of the erosion.
    pub fn open(&self, m: &EdgeSet, policy: VacuousPolicy) -> Result<EdgeSet> {
        self.dilate(&self.erode(m, policy)?)
    }

    /// Erosion of the dilation.
    pub fn close(&self, m: &EdgeSet, policy: VacuousPolicy) -> Result<EdgeSet> {
        self.erode(&self.dilate(m)?, policy)
    }

    /// Each edge takes the largest weight among the edges whose neighborhood
    /// contains it; edges reached by none get [`GRAY_BOTTOM`].
    pub fn gray_dilate(&self, f: &EdgeWeightMap) -> Result<EdgeWeightMap> {
        check_grid(self.grid(), f.grid())?;
        let mut out = EdgeWeightMap::constant(self.grid(), GRAY_BOTTOM);
        for e in 0..self.grid().edge_count() {
            let w = f.get(e);
            for &x in self.table.get(e) {
                let slot = &mut out.weights[x as usize];
                *slot = (*slot).max(w);
            }
        }
        Ok(out)
    }

    /// Each edge takes the smallest weight over its neighborhood;
    /// an empty neighborhood gives [`GRAY_TOP`].
    pub fn gray_erode(&self, f: &EdgeWeightMap) -> Result<EdgeWeightMap> {
        check_grid(self.grid(), f.grid())?;
        let weights = (0..self.grid().edge_count())
            .map(|e| {
                self.table
                    .get(e)
                    .iter()
                    .map(|&x| f.get(x as usize))
                    .min()
                    .unwrap_or(GRAY_TOP)
            })
            .collect();
        Ok(EdgeWeightMap {
            grid: self.grid(),
            weights,
        })
    }
}

pub fn dilate(m: &EdgeSet, s: &StructuringGraph, grid: &GridGraph) -> Result<EdgeSet> {
    check_grid(*grid, m.grid())?;
    StructuredMorphology::new(s, grid)?.dilate(m)
}

pub fn erode(
    p: &EdgeSet,
    s: &StructuringGraph,
    grid: &GridGraph,
    policy: VacuousPolicy,
) -> Result<EdgeSet> {
    check_grid(*grid, p.grid())?;
    StructuredMorphology::new(s, grid)?.erode(p, policy)
}

pub fn open_adjoint(
    m: &EdgeSet,
    s: &StructuringGraph,
    grid: &GridGraph,
    policy: VacuousPolicy,
) -> Result<EdgeSet> {
    check_grid(*grid, m.grid())?;
    StructuredMorphology::new(s, grid)?.open(m, policy)
}

pub fn close_adjoint(
    m: &EdgeSet,
    s: &StructuringGraph,
    grid: &GridGraph,
    policy: VacuousPolicy,
) -> Result<EdgeSet> {
    check_grid(*grid, m.grid())?;
    StructuredMorphology::new(s, grid)?.close(m, policy)
}

pub fn gray_dilate(
    f: &EdgeWeightMap,
    s: &StructuringGraph,
    grid: &GridGraph,
) -> Result<EdgeWeightMap> {
    StructuredMorphology::new(s, grid)?.gray_dilate(f)
}

pub fn gray_erode(
    f: &EdgeWeightMap,
    s: &StructuringGraph,
    grid: &GridGraph,
) -> Result<EdgeWeightMap> {
    StructuredMorphology::new(s, grid)?.gray_erode(f)
}

/// Structural opening: the union of the bud images of every embedding whose
/// bud images all lie in the input.
#[derive(Debug, Clone)]
pub struct StructuralOpening {
    grid: GridGraph,
    patterns: Vec<Vec<u32>>,
}

impl StructuralOpening {
    pub fn new(s: &StructuringGraph, grid: &GridGraph) -> Result<Self> {
        if !s.has_buds() {
            return Err(Error::InvalidArgument(format!(
                "structuring graph {:?} has no buds",
                s.name()
            )));
        }
        let buds: Vec<(usize, usize)> = s.buds().map(|b| (s.edges()[b].u, s.edges()[b].v)).collect();
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        for_each_embedding(s, grid, |map| {
            let mut pat: Vec<u32> = buds
                .iter()
                .map(|&(u, v)| grid.edge_index(map[u], map[v]).expect("adjacent") as u32)
                .collect();
            pat.sort_unstable();
            pat.dedup();
            seen.insert(pat);
        });
        let mut patterns: Vec<Vec<u32>> = seen.into_iter().collect();
        patterns.sort();
        Ok(StructuralOpening {
            grid: *grid,
            patterns,
        })
    }

    /// Number of distinct bud-image sets.
    pub fn pattern_count(&self) -> usize {
        self.patterns.len()
    }

    pub fn apply(&self, m: &EdgeSet) -> Result<EdgeSet> {
        check_grid(self.grid, m.grid())?;
        let mut out = EdgeSet::empty(self.grid);
        for pat in &self.patterns {
            if pat.iter().all(|&x| m.contains(x as usize)) {
                for &x in pat {
                    out.insert(x as usize);
                }
            }
        }
        Ok(out)
    }
}

pub fn open_structural(m: &EdgeSet, s: &StructuringGraph, grid: &GridGraph) -> Result<EdgeSet> {
    check_grid(*grid, m.grid())?;
    StructuralOpening::new(s, grid)?.apply(m)
}

/// Labels the flat zones of a binary raster: maximal connected regions of
/// equal value. Returns one label per pixel (row-major) and the zone count.
pub fn flat_zones(img: &BinaryImage, connectivity: Connectivity) -> (Vec<u32>, usize) {
    const UNSET: u32 = u32::MAX;
    let (w, h) = (img.width(), img.height());
    let mut labels = vec![UNSET; w * h];
    if w == 0 || h == 0 {
        return (labels, 0);
    }
    let grid = GridGraph::new(w, h, connectivity).expect("positive size");
    let mut next = 0u32;
    let mut stack = Vec::new();
    for start in 0..w * h {
        if labels[start] != UNSET {
            continue;
        }
        let value = img.data()[start];
        labels[start] = next;
        stack.push(start);
        while let Some(i) = stack.pop() {
            for q in grid.neighbors(grid.pixel(i)) {
                let j = grid.pixel_index(q);
                if labels[j] == UNSET && img.data()[j] == value {
                    labels[j] = next;
                    stack.push(j);
                }
            }
        }
        next += 1;
    }
    (labels, next as usize)
}

/// An input flat zone that the output splits across two of its own zones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitWitness {
    /// Whether the split zone is a foreground component of the input.
    pub foreground: bool,
    /// All pixels of the input zone.
    pub component: Vec<Pixel>,
    /// Two pixels of the zone that fall in different output zones.
    pub pixels: (Pixel, Pixel),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectedCheck {
    pub connected: bool,
    pub witness: Option<SplitWitness>,
}

/// Checks whether `output` could have come from `input` through a connected
/// operator: every flat zone of the input must fall inside a single flat
/// zone of the output.
pub fn check_connected_instance(
    input: &BinaryImage,
    output: &BinaryImage,
    connectivity: Connectivity,
) -> Result<ConnectedCheck> {
    if input.width() != output.width() || input.height() != output.height() {
        return Err(Error::InvalidArgument(format!(
            "input is {}x{} but output is {}x{}",
            input.width(),
            input.height(),
            output.width(),
            output.height()
        )));
    }
    let (in_labels, in_count) = flat_zones(input, connectivity);
    let (out_labels, _) = flat_zones(output, connectivity);
    let mut first_seen: Vec<Option<(usize, u32)>> = vec![None; in_count];
    for (i, (&zi, &zo)) in in_labels.iter().zip(&out_labels).enumerate() {
        match first_seen[zi as usize] {
            None => first_seen[zi as usize] = Some((i, zo)),
            Some((j, z)) if z != zo => {
                let w = input.width();
                let component = in_labels
                    .iter()
                    .enumerate()
                    .filter(|(_, &l)| l == zi)
                    .map(|(k, _)| Pixel::new(k / w, k % w))
                    .collect();
                return Ok(ConnectedCheck {
                    connected: false,
                    witness: Some(SplitWitness {
                        foreground: input.data()[i],
                        component,
                        pixels: (Pixel::new(j / w, j % w), Pixel::new(i / w, i % w)),
                    }),
                });
            }
            Some(_) => {}
        }
    }
    Ok(ConnectedCheck {
        connected: true,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sgraph::Builtin;

    fn grid(w: usize, h: usize, c: Connectivity) -> GridGraph {
        GridGraph::new(w, h, c).unwrap()
    }

    fn sg(b: Builtin, c: Connectivity) -> StructuringGraph {
        StructuringGraph::builtin(b, c)
    }

    fn px(r: usize, c: usize) -> Pixel {
        Pixel::new(r, c)
    }

    #[test]
    fn single_is_identity() {
        let g = grid(4, 3, Connectivity::Eight);
        let s = sg(Builtin::Single, Connectivity::Eight);
        let ops = StructuredMorphology::new(&s, &g).unwrap();
        let m = EdgeSet::from_indices(g, [0, 3, 7, 12, 20]).unwrap();
        assert_eq!(ops.dilate(&m).unwrap(), m);
        for policy in [VacuousPolicy::Include, VacuousPolicy::Exclude] {
            assert_eq!(ops.erode(&m, policy).unwrap(), m);
            assert_eq!(ops.open(&m, policy).unwrap(), m);
            assert_eq!(ops.close(&m, policy).unwrap(), m);
        }
        assert_eq!(open_structural(&m, &s, &g).unwrap(), m);
    }

    #[test]
    fn empty_input() {
        let g = grid(4, 4, Connectivity::Four);
        for b in [Builtin::Single, Builtin::Square, Builtin::Grid3] {
            let s = sg(b, Connectivity::Four);
            let empty = EdgeSet::empty(g);
            assert!(dilate(&empty, &s, &g).unwrap().is_empty());
            assert!(open_structural(&empty, &s, &g).unwrap().is_empty());
        }
    }

    #[test]
    fn square_dilation_of_two_components() {
        let g = grid(6, 6, Connectivity::Four);
        let s = sg(Builtin::Square, Connectivity::Four);
        // a horizontal edge and a vertical edge, far apart
        let m = EdgeSet::from_edges(g, [(px(1, 1), px(1, 2)), (px(3, 4), px(4, 4))]).unwrap();
        let expected = EdgeSet::from_edges(
            g,
            [
                (px(0, 1), px(0, 2)),
                (px(2, 1), px(2, 2)),
                (px(3, 3), px(4, 3)),
                (px(3, 5), px(4, 5)),
            ],
        )
        .unwrap();
        assert_eq!(dilate(&m, &s, &g).unwrap(), expected);
    }

    #[test]
    fn vacuous_triangle_erosion() {
        let g = grid(4, 4, Connectivity::Four);
        let s = sg(Builtin::TriangleOdd, Connectivity::Four);
        let empty = EdgeSet::empty(g);
        // no embedding anywhere: Include keeps every edge, Exclude none
        assert_eq!(erode(&empty, &s, &g, VacuousPolicy::Include).unwrap(), EdgeSet::full(g));
        assert!(erode(&empty, &s, &g, VacuousPolicy::Exclude).unwrap().is_empty());
    }

    #[test]
    fn missing_roots_or_buds_is_invalid() {
        let g = grid(3, 3, Connectivity::Four);
        let s = crate::sgraph::parse_sgraph("v 0\nv 1\ne 0 1 b").unwrap();
        assert!(matches!(
            dilate(&EdgeSet::empty(g), &s, &g),
            Err(Error::InvalidArgument(_))
        ));
        let s = crate::sgraph::parse_sgraph("v 0\nv 1\ne 0 1 r").unwrap();
        assert!(open_structural(&EdgeSet::empty(g), &s, &g).is_err());
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let g4 = grid(3, 3, Connectivity::Four);
        let g8 = grid(3, 3, Connectivity::Eight);
        let s = sg(Builtin::Single, Connectivity::Four);
        assert!(matches!(
            dilate(&EdgeSet::empty(g8), &s, &g4),
            Err(Error::GridMismatch { .. })
        ));
        assert!(matches!(
            erode(&EdgeSet::empty(g8), &s, &g4, VacuousPolicy::Include),
            Err(Error::GridMismatch { .. })
        ));
    }

    #[test]
    fn gray_constant_and_empty() {
        let g = grid(3, 2, Connectivity::Four);
        let single = sg(Builtin::Single, Connectivity::Four);
        let c = EdgeWeightMap::constant(g, 77);
        assert_eq!(gray_dilate(&c, &single, &g).unwrap(), c);
        assert_eq!(gray_erode(&c, &single, &g).unwrap(), c);

        // the triangle never embeds in a 4-grid: max over nothing, min over nothing
        let tri = sg(Builtin::TriangleOdd, Connectivity::Four);
        assert_eq!(
            gray_dilate(&c, &tri, &g).unwrap(),
            EdgeWeightMap::constant(g, GRAY_BOTTOM)
        );
        assert_eq!(
            gray_erode(&c, &tri, &g).unwrap(),
            EdgeWeightMap::constant(g, GRAY_TOP)
        );
    }

    #[test]
    fn connected_check_basics() {
        let img = BinaryImage::from_ascii(
            "
            .....
            .###.
            .###.
            .....
            ",
        )
        .unwrap();
        let c = check_connected_instance(&img, &img, Connectivity::Four).unwrap();
        assert!(c.connected && c.witness.is_none());
        let blank = BinaryImage::new(5, 4);
        assert!(check_connected_instance(&img, &blank, Connectivity::Four).unwrap().connected);
        assert!(check_connected_instance(&img, &BinaryImage::new(4, 4), Connectivity::Four).is_err());

        // shrinking the blob moves its boundary
        let mut shrunk = img.clone();
        shrunk.set(px(1, 1), false);
        let c = check_connected_instance(&img, &shrunk, Connectivity::Four).unwrap();
        assert!(!c.connected);
        let w = c.witness.unwrap();
        assert!(w.foreground);
        assert_eq!(w.component.len(), 6);
    }

    #[test]
    fn erosion_can_add_foreground() {
        // an edge is eroded in when its whole neighborhood is present, even if
        // the edge itself is absent from the input
        let g = grid(3, 3, Connectivity::Four);
        let s = sg(Builtin::Square, Connectivity::Four);
        let p = EdgeSet::from_edges(g, [(px(1, 0), px(1, 1))]).unwrap();
        let e = erode(&p, &s, &g, VacuousPolicy::Exclude).unwrap();
        let top = g.edge_index(px(0, 0), px(0, 1)).unwrap();
        assert!(e.contains(top));
        assert!(!e.is_subset(&p));
    }
}
