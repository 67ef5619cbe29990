//! Regular pixel-adjacency grids, edge sets over them, and conversions
//! between binary rasters and edge sets.
//!
//! Edges are undirected and stored in canonical form: the first endpoint is
//! the lexicographically smaller one by `(row, col)`. Seen from that endpoint
//! an edge points East, South, South-East or South-West, and the canonical
//! edge index enumerates those four direction blocks in that order. Each
//! block is laid out row-major, so the index of an edge is a closed form of
//! its origin pixel and never needs a lookup table.

use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// Adjacency relation of the pixel grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    pub fn from_count(n: u32) -> Option<Self> {
        match n {
            4 => Some(Connectivity::Four),
            8 => Some(Connectivity::Eight),
            _ => None,
        }
    }

    pub fn count(self) -> u32 {
        match self {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
        }
    }
}

impl fmt::Display for Connectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.count())
    }
}

/// A pixel position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pixel {
    pub row: usize,
    pub col: usize,
}

impl Pixel {
    pub const fn new(row: usize, col: usize) -> Self {
        Pixel { row, col }
    }

    /// Chebyshev distance between two pixels.
    pub fn chebyshev(self, other: Pixel) -> usize {
        self.row.abs_diff(other.row).max(self.col.abs_diff(other.col))
    }
}

impl fmt::Display for Pixel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// Direction of an edge seen from its canonical (smaller) endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    East,
    South,
    SouthEast,
    SouthWest,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::East,
        Direction::South,
        Direction::SouthEast,
        Direction::SouthWest,
    ];

    pub const fn offset(self) -> (isize, isize) {
        match self {
            Direction::East => (0, 1),
            Direction::South => (1, 0),
            Direction::SouthEast => (1, 1),
            Direction::SouthWest => (1, -1),
        }
    }

    pub const fn is_axis(self) -> bool {
        matches!(self, Direction::East | Direction::South)
    }

    fn from_offset(dr: isize, dc: isize) -> Option<Direction> {
        match (dr, dc) {
            (0, 1) => Some(Direction::East),
            (1, 0) => Some(Direction::South),
            (1, 1) => Some(Direction::SouthEast),
            (1, -1) => Some(Direction::SouthWest),
            _ => None,
        }
    }
}

/// An undirected grid edge with `u < v` in `(row, col)` order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: Pixel,
    pub v: Pixel,
}

impl Edge {
    /// Builds the canonical form of the edge between `a` and `b`.
    pub fn new(a: Pixel, b: Pixel) -> Self {
        if a <= b {
            Edge { u: a, v: b }
        } else {
            Edge { u: b, v: a }
        }
    }

    /// The direction from `u` to `v`, if the endpoints are grid neighbors.
    pub fn direction(&self) -> Option<Direction> {
        let dr = self.v.row as isize - self.u.row as isize;
        let dc = self.v.col as isize - self.u.col as isize;
        Direction::from_offset(dr, dc)
    }

    /// True for horizontal and vertical edges.
    pub fn is_axis(&self) -> bool {
        self.u.row == self.v.row || self.u.col == self.v.col
    }

    pub fn contains(&self, p: Pixel) -> bool {
        self.u == p || self.v == p
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.u, self.v)
    }
}

const FOUR_STEPS: [(isize, isize); 4] = [(0, 1), (1, 0), (0, -1), (-1, 0)];
const EIGHT_STEPS: [(isize, isize); 8] = [
    (0, 1),
    (1, 0),
    (0, -1),
    (-1, 0),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
];

/// The regular 4- or 8-connected pixel-adjacency graph of a `width x height`
/// raster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridGraph {
    width: usize,
    height: usize,
    connectivity: Connectivity,
}

impl GridGraph {
    pub fn new(width: usize, height: usize, connectivity: Connectivity) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!(
                "grid dimensions must be positive, got {width}x{height}"
            )));
        }
        Ok(GridGraph {
            width,
            height,
            connectivity,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn connectivity(&self) -> Connectivity {
        self.connectivity
    }

    pub fn vertex_count(&self) -> usize {
        self.width * self.height
    }

    pub fn edge_count(&self) -> usize {
        self.directions().iter().map(|&d| self.block_len(d)).sum()
    }

    /// The edge directions present on this grid.
    pub fn directions(&self) -> &'static [Direction] {
        match self.connectivity {
            Connectivity::Four => &Direction::ALL[..2],
            Connectivity::Eight => &Direction::ALL[..],
        }
    }

    fn block_len(&self, dir: Direction) -> usize {
        let (w, h) = (self.width, self.height);
        match dir {
            Direction::East => h * (w - 1),
            Direction::South => (h - 1) * w,
            Direction::SouthEast | Direction::SouthWest => (h - 1) * (w - 1),
        }
    }

    fn block_start(&self, dir: Direction) -> usize {
        let mut start = 0;
        for &d in Direction::ALL.iter() {
            if d == dir {
                break;
            }
            start += self.block_len(d);
        }
        start
    }

    pub fn contains(&self, p: Pixel) -> bool {
        p.row < self.height && p.col < self.width
    }

    /// `p` shifted by `(dr, dc)`, if the result lies on the grid.
    pub fn offset(&self, p: Pixel, dr: isize, dc: isize) -> Option<Pixel> {
        let row = p.row.checked_add_signed(dr)?;
        let col = p.col.checked_add_signed(dc)?;
        let q = Pixel { row, col };
        self.contains(q).then_some(q)
    }

    /// Index of the edge leaving `origin` in direction `dir`.
    pub fn edge_at(&self, origin: Pixel, dir: Direction) -> Option<usize> {
        if !self.directions().contains(&dir) || !self.contains(origin) {
            return None;
        }
        let (dr, dc) = dir.offset();
        self.offset(origin, dr, dc)?;
        let (r, c, w) = (origin.row, origin.col, self.width);
        let local = match dir {
            Direction::East => r * (w - 1) + c,
            Direction::South => r * w + c,
            Direction::SouthEast => r * (w - 1) + c,
            Direction::SouthWest => r * (w - 1) + (c - 1),
        };
        Some(self.block_start(dir) + local)
    }

    /// Index of the edge joining `a` and `b`, in either order.
    pub fn edge_index(&self, a: Pixel, b: Pixel) -> Option<usize> {
        let e = Edge::new(a, b);
        self.edge_at(e.u, e.direction()?)
    }

    pub fn are_adjacent(&self, a: Pixel, b: Pixel) -> bool {
        self.edge_index(a, b).is_some()
    }

    /// Canonical origin and direction of edge `idx`.
    ///
    /// # Panics
    /// If `idx >= self.edge_count()`.
    pub fn edge_origin(&self, idx: usize) -> (Pixel, Direction) {
        let mut local = idx;
        for &dir in self.directions() {
            let len = self.block_len(dir);
            if local < len {
                let w = self.width;
                let p = match dir {
                    Direction::East => Pixel::new(local / (w - 1), local % (w - 1)),
                    Direction::South => Pixel::new(local / w, local % w),
                    Direction::SouthEast => Pixel::new(local / (w - 1), local % (w - 1)),
                    Direction::SouthWest => Pixel::new(local / (w - 1), local % (w - 1) + 1),
                };
                return (p, dir);
            }
            local -= len;
        }
        panic!("edge index {idx} out of range for {self}");
    }

    /// The endpoints of edge `idx`.
    pub fn edge(&self, idx: usize) -> Edge {
        let (u, dir) = self.edge_origin(idx);
        let (dr, dc) = dir.offset();
        let v = Pixel::new(
            u.row.wrapping_add_signed(dr),
            u.col.wrapping_add_signed(dc),
        );
        Edge { u, v }
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.edge_count()).map(move |i| self.edge(i))
    }

    fn steps(&self) -> &'static [(isize, isize)] {
        match self.connectivity {
            Connectivity::Four => &FOUR_STEPS,
            Connectivity::Eight => &EIGHT_STEPS,
        }
    }

    /// Grid neighbors of `p`, axis neighbors first.
    pub fn neighbors(&self, p: Pixel) -> impl Iterator<Item = Pixel> + '_ {
        self.steps()
            .iter()
            .filter_map(move |&(dr, dc)| self.offset(p, dr, dc))
    }

    /// Indices of the edges incident to `p`.
    pub fn incident_edges(&self, p: Pixel) -> impl Iterator<Item = usize> + '_ {
        self.neighbors(p)
            .map(move |q| self.edge_index(p, q).expect("neighbors are adjacent"))
    }

    pub fn pixel_index(&self, p: Pixel) -> usize {
        p.row * self.width + p.col
    }

    pub fn pixel(&self, idx: usize) -> Pixel {
        Pixel::new(idx / self.width, idx % self.width)
    }

    pub fn pixels(&self) -> impl Iterator<Item = Pixel> + '_ {
        (0..self.vertex_count()).map(move |i| self.pixel(i))
    }
}

impl fmt::Display for GridGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}x{} {}-connected",
            self.width, self.height, self.connectivity
        )
    }
}

/// A subset of the edges of a grid.
///
/// Set-algebra methods require both operands to live on the same grid and
/// panic otherwise; fallible operators check grids up front and report
/// [`Error::GridMismatch`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EdgeSet {
    grid: GridGraph,
    bits: FixedBitSet,
}

impl EdgeSet {
    pub fn empty(grid: GridGraph) -> Self {
        EdgeSet {
            grid,
            bits: FixedBitSet::with_capacity(grid.edge_count()),
        }
    }

    pub fn full(grid: GridGraph) -> Self {
        let mut s = Self::empty(grid);
        s.bits.insert_range(..);
        s
    }

    /// Builds a set from edge indices.
    pub fn from_indices<I>(grid: GridGraph, indices: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut s = Self::empty(grid);
        for i in indices {
            if i >= grid.edge_count() {
                return Err(Error::InvalidArgument(format!(
                    "edge index {i} out of range for {grid}"
                )));
            }
            s.bits.insert(i);
        }
        Ok(s)
    }

    /// Builds a set from endpoint pairs; every pair must be a grid edge.
    pub fn from_edges<I>(grid: GridGraph, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Pixel, Pixel)>,
    {
        let mut s = Self::empty(grid);
        for (a, b) in edges {
            let idx = grid
                .edge_index(a, b)
                .ok_or_else(|| Error::InvalidArgument(format!("{a}-{b} is not an edge of {grid}")))?;
            s.bits.insert(idx);
        }
        Ok(s)
    }

    pub fn grid(&self) -> GridGraph {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.bits.contains(idx)
    }

    pub fn insert(&mut self, idx: usize) {
        self.bits.insert(idx);
    }

    pub fn remove(&mut self, idx: usize) {
        self.bits.set(idx, false);
    }

    /// Member edge indices in ascending (canonical) order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.bits.ones().map(|i| self.grid.edge(i))
    }

    fn assert_same_grid(&self, other: &EdgeSet) {
        assert_eq!(
            self.grid, other.grid,
            "edge sets live on different grids"
        );
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersection(&self, other: &EdgeSet) -> EdgeSet {
        self.assert_same_grid(other);
        let mut out = self.clone();
        out.bits.intersect_with(&other.bits);
        out
    }

    pub fn difference(&self, other: &EdgeSet) -> EdgeSet {
        self.assert_same_grid(other);
        let mut out = self.clone();
        out.bits.difference_with(&other.bits);
        out
    }

    pub fn union_with(&mut self, other: &EdgeSet) {
        self.assert_same_grid(other);
        self.bits.union_with(&other.bits);
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.assert_same_grid(other);
        self.bits.is_subset(&other.bits)
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EdgeSet[{}] ", self.grid)?;
        f.debug_set().entries(self.edges().map(|e| e.to_string())).finish()
    }
}

/// A binary raster; `true` is foreground.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryImage {
    /// An all-background raster.
    pub fn new(width: usize, height: usize) -> Self {
        BinaryImage {
            width,
            height,
            data: vec![false; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::InvalidArgument(format!(
                "{} pixels supplied for a {width}x{height} raster",
                data.len()
            )));
        }
        Ok(BinaryImage {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(Pixel) -> bool) -> Self {
        let mut img = Self::new(width, height);
        for row in 0..height {
            for col in 0..width {
                img.data[row * width + col] = f(Pixel::new(row, col));
            }
        }
        img
    }

    /// Parses rows of `#` (foreground) and `.` (background); whitespace
    /// around rows is ignored. Handy for fixtures.
    pub fn from_ascii(text: &str) -> Result<Self> {
        let rows: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut data = Vec::with_capacity(width * height);
        for (i, r) in rows.iter().enumerate() {
            if r.chars().count() != width {
                return Err(Error::Parse {
                    line: i + 1,
                    message: "ragged raster row".into(),
                });
            }
            for ch in r.chars() {
                match ch {
                    '#' => data.push(true),
                    '.' => data.push(false),
                    other => {
                        return Err(Error::Parse {
                            line: i + 1,
                            message: format!("unexpected character {other:?}"),
                        })
                    }
                }
            }
        }
        Self::from_vec(width, height, data)
    }

    pub fn to_ascii(&self) -> String {
        let mut s = String::with_capacity((self.width + 1) * self.height);
        for row in 0..self.height {
            for col in 0..self.width {
                s.push(if self.get(Pixel::new(row, col)) { '#' } else { '.' });
            }
            s.push('\n');
        }
        s
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn in_bounds(&self, p: Pixel) -> bool {
        p.row < self.height && p.col < self.width
    }

    /// Foreground test; pixels outside the raster are background.
    pub fn get(&self, p: Pixel) -> bool {
        self.in_bounds(p) && self.data[p.row * self.width + p.col]
    }

    pub fn set(&mut self, p: Pixel, value: bool) {
        assert!(self.in_bounds(p), "{p} outside {}x{}", self.width, self.height);
        self.data[p.row * self.width + p.col] = value;
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    pub fn foreground(&self) -> impl Iterator<Item = Pixel> + '_ {
        let w = self.width;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| Pixel::new(i / w, i % w))
    }

    /// Copy of the raster with foreground pixels that have no foreground
    /// neighbor under `connectivity` turned off.
    pub fn without_isolated(&self, connectivity: Connectivity) -> BinaryImage {
        let grid = GridGraph::new(self.width.max(1), self.height.max(1), connectivity)
            .expect("positive dimensions");
        BinaryImage::from_fn(self.width, self.height, |p| {
            self.get(p) && grid.neighbors(p).any(|q| self.get(q))
        })
    }
}

/// The edge set induced by the foreground: an edge is a member iff both of
/// its endpoints are foreground.
pub fn image_to_edgeset(img: &BinaryImage, grid: GridGraph) -> Result<EdgeSet> {
    if img.width() != grid.width() || img.height() != grid.height() {
        return Err(Error::InvalidArgument(format!(
            "raster is {}x{} but grid is {grid}",
            img.width(),
            img.height()
        )));
    }
    let mut es = EdgeSet::empty(grid);
    for idx in 0..grid.edge_count() {
        let e = grid.edge(idx);
        if img.get(e.u) && img.get(e.v) {
            es.insert(idx);
        }
    }
    Ok(es)
}

/// Renders an edge set: a pixel is foreground iff it is incident to a member.
pub fn edgeset_to_image(es: &EdgeSet) -> BinaryImage {
    let grid = es.grid();
    let mut img = BinaryImage::new(grid.width(), grid.height());
    for e in es.edges() {
        img.set(e.u, true);
        img.set(e.v, true);
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(w: usize, h: usize, c: Connectivity) -> GridGraph {
        GridGraph::new(w, h, c).unwrap()
    }

    #[test]
    fn edge_counts_match_closed_form() {
        assert_eq!(grid(2, 2, Connectivity::Four).edge_count(), 4);
        assert_eq!(grid(3, 3, Connectivity::Four).edge_count(), 12);
        assert_eq!(grid(3, 3, Connectivity::Eight).edge_count(), 20);
        for w in 1..7 {
            for h in 1..7 {
                let four = h * (w - 1) + w * (h - 1);
                assert_eq!(grid(w, h, Connectivity::Four).edge_count(), four);
                assert_eq!(
                    grid(w, h, Connectivity::Eight).edge_count(),
                    four + 2 * (w - 1) * (h - 1)
                );
            }
        }
    }

    #[test]
    fn zero_dimension_is_rejected() {
        assert!(matches!(
            GridGraph::new(0, 3, Connectivity::Four),
            Err(Error::InvalidArgument(_))
        ));
        assert!(GridGraph::new(3, 0, Connectivity::Eight).is_err());
    }

    #[test]
    fn indexing_is_a_bijection() {
        for conn in [Connectivity::Four, Connectivity::Eight] {
            for w in 1..6 {
                for h in 1..6 {
                    let g = grid(w, h, conn);
                    let mut seen = vec![false; g.edge_count()];
                    for a in g.pixels() {
                        for b in g.pixels() {
                            if a >= b {
                                continue;
                            }
                            let adjacent = match conn {
                                Connectivity::Four => {
                                    a.row.abs_diff(b.row) + a.col.abs_diff(b.col) == 1
                                }
                                Connectivity::Eight => a.chebyshev(b) == 1,
                            };
                            match g.edge_index(a, b) {
                                Some(i) => {
                                    assert!(adjacent);
                                    assert!(!seen[i], "index {i} assigned twice");
                                    seen[i] = true;
                                    assert_eq!(g.edge(i), Edge::new(a, b));
                                }
                                None => assert!(!adjacent),
                            }
                        }
                    }
                    assert!(seen.iter().all(|&s| s));
                }
            }
        }
    }

    #[test]
    fn image_conversions() {
        let g = grid(3, 3, Connectivity::Four);
        let blank = BinaryImage::new(3, 3);
        assert!(image_to_edgeset(&blank, g).unwrap().is_empty());

        let full = BinaryImage::from_fn(3, 3, |_| true);
        assert_eq!(image_to_edgeset(&full, g).unwrap().len(), 12);
        assert_eq!(edgeset_to_image(&EdgeSet::full(g)), full);
        assert_eq!(edgeset_to_image(&EdgeSet::empty(g)), blank);

        let mut single = BinaryImage::new(3, 3);
        single.set(Pixel::new(1, 1), true);
        assert!(image_to_edgeset(&single, g).unwrap().is_empty());

        let one = EdgeSet::from_edges(g, [(Pixel::new(0, 0), Pixel::new(0, 1))]).unwrap();
        let img = edgeset_to_image(&one);
        assert_eq!(img.count(), 2);
        assert!(img.get(Pixel::new(0, 0)) && img.get(Pixel::new(0, 1)));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let g = grid(3, 3, Connectivity::Four);
        assert!(image_to_edgeset(&BinaryImage::new(2, 3), g).is_err());
    }

    #[test]
    fn isolated_pixels_are_lost_in_round_trip() {
        let img = BinaryImage::from_ascii(
            "
            #...
            ..##
            ....
            ",
        )
        .unwrap();
        let g = grid(4, 3, Connectivity::Four);
        let back = edgeset_to_image(&image_to_edgeset(&img, g).unwrap());
        assert_eq!(back, img.without_isolated(Connectivity::Four));
        assert!(!back.get(Pixel::new(0, 0)));
    }

    #[test]
    #[should_panic(expected = "different grids")]
    fn set_algebra_rejects_mixed_grids() {
        let a = EdgeSet::empty(grid(2, 2, Connectivity::Four));
        let b = EdgeSet::empty(grid(2, 2, Connectivity::Eight));
        let _ = a.union(&b);
    }
}
