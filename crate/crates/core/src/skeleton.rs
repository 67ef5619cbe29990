//! Multiscale skeletons of edge sets, their exact reconstruction, and
//! erosion-driven distance maps.
//!
//! Level `n` of the skeleton is `E_n \ δ(E_{n+1})` where `E_0 = M` and
//! `E_{n+1} = ε(E_n)`. Because `δε` never grows a set, every level satisfies
//! `E_n = skel_n ∪ δ(E_{n+1})`; keeping the last erosion `E_N` (the residue)
//! therefore makes reconstruction from level 0 exact.
//!
//! Edge erosion is not anti-extensive, so the erosion sequence need not
//! reach the empty set. Iteration stops on an empty set, a repeated set
//! (fixpoint or longer cycle) or an iteration cap, and the reason is kept.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{image_to_edgeset, BinaryImage, Connectivity, EdgeSet, GridGraph, Pixel};
use crate::morph::{StructuredMorphology, VacuousPolicy};
use crate::sgraph::{Builtin, StructuringGraph};

/// Why the erosion sequence stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    Emptied,
    Fixpoint,
    CycleDetected,
    MaxIterations,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::Emptied => "emptied",
            Termination::Fixpoint => "fixpoint",
            Termination::CycleDetected => "cycle",
            Termination::MaxIterations => "max-iterations",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Termination {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Termination::Emptied,
            Termination::Fixpoint,
            Termination::CycleDetected,
            Termination::MaxIterations,
        ]
        .into_iter()
        .find(|t| t.name() == s)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown termination {s:?}")))
    }
}

/// Skeleton levels `skel_0 .. skel_{N-1}` plus the residue `E_N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonDecomposition {
    grid: GridGraph,
    sgraph: StructuringGraph,
    policy: VacuousPolicy,
    layers: Vec<EdgeSet>,
    residue: EdgeSet,
    termination: Termination,
}

impl SkeletonDecomposition {
    /// Assembles a decomposition from stored parts, checking its structural
    /// invariants (all sets on `grid`, empty residue when emptied).
    pub fn from_parts(
        grid: GridGraph,
        sgraph: StructuringGraph,
        policy: VacuousPolicy,
        layers: Vec<EdgeSet>,
        residue: EdgeSet,
        termination: Termination,
    ) -> Result<Self> {
        if layers.iter().chain(std::iter::once(&residue)).any(|l| l.grid() != grid) {
            return Err(Error::GridMismatch {
                expected: grid.to_string(),
                found: "a layer on another grid".into(),
            });
        }
        if termination == Termination::Emptied && !residue.is_empty() {
            return Err(Error::InvalidArgument(
                "an emptied decomposition must have an empty residue".into(),
            ));
        }
        Ok(SkeletonDecomposition {
            grid,
            sgraph,
            policy,
            layers,
            residue,
            termination,
        })
    }

    pub fn grid(&self) -> GridGraph {
        self.grid
    }

    pub fn sgraph(&self) -> &StructuringGraph {
        &self.sgraph
    }

    pub fn policy(&self) -> VacuousPolicy {
        self.policy
    }

    pub fn termination(&self) -> Termination {
        self.termination
    }

    /// `skel_n` for `n` in `0..N`.
    pub fn layers(&self) -> &[EdgeSet] {
        &self.layers
    }

    /// `N`, the index of the residue.
    pub fn residue_index(&self) -> usize {
        self.layers.len()
    }

    /// `E_N`.
    pub fn residue(&self) -> &EdgeSet {
        &self.residue
    }

    /// Union of all skeleton levels.
    pub fn skeleton(&self) -> EdgeSet {
        let mut out = EdgeSet::empty(self.grid);
        for l in &self.layers {
            out.union_with(l);
        }
        out
    }
}

pub fn skeletonize(
    m: &EdgeSet,
    s: &StructuringGraph,
    grid: &GridGraph,
    policy: VacuousPolicy,
    max_iter: usize,
) -> Result<SkeletonDecomposition> {
    let ops = StructuredMorphology::new(s, grid)?;
    skeletonize_with(&ops, m, policy, max_iter)
}

/// Default iteration cap for a grid: four times its perimeter half-length.
pub fn default_max_iter(grid: &GridGraph) -> usize {
    4 * (grid.width() + grid.height())
}

pub fn skeletonize_with(
    ops: &StructuredMorphology,
    m: &EdgeSet,
    policy: VacuousPolicy,
    max_iter: usize,
) -> Result<SkeletonDecomposition> {
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    if m.grid() != ops.grid() {
        return Err(Error::GridMismatch {
            expected: ops.grid().to_string(),
            found: m.grid().to_string(),
        });
    }
    let mut layers = Vec::new();
    let mut current = m.clone();
    let mut seen: HashSet<EdgeSet> = HashSet::new();
    seen.insert(current.clone());

    let termination = loop {
        if current.is_empty() {
            break Termination::Emptied;
        }
        if layers.len() == max_iter {
            break Termination::MaxIterations;
        }
        let next = ops.erode(&current, policy)?;
        let reopened = ops.dilate(&next)?;
        layers.push(current.difference(&reopened));
        let previous = std::mem::replace(&mut current, next);
        if current.is_empty() {
            break Termination::Emptied;
        }
        if current == previous {
            break Termination::Fixpoint;
        }
        if !seen.insert(current.clone()) {
            break Termination::CycleDetected;
        }
    };

    Ok(SkeletonDecomposition {
        grid: ops.grid(),
        sgraph: ops.sgraph().clone(),
        policy,
        layers,
        residue: current,
        termination,
    })
}

/// `⋃_{k≤n<N} δⁿ(skel_n) ∪ δᴺ(E_N)`. With `k = 0` this is the original set;
/// in general it equals `δᵏ(E_k)`.
pub fn reconstruct(d: &SkeletonDecomposition, grid: &GridGraph, k: usize) -> Result<EdgeSet> {
    if *grid != d.grid() {
        return Err(Error::GridMismatch {
            expected: d.grid().to_string(),
            found: grid.to_string(),
        });
    }
    let ops = StructuredMorphology::new(d.sgraph(), grid)?;
    reconstruct_with(&ops, d, k)
}

pub fn reconstruct_with(
    ops: &StructuredMorphology,
    d: &SkeletonDecomposition,
    k: usize,
) -> Result<EdgeSet> {
    let n = d.residue_index();
    if k > n {
        return Err(Error::KOutOfRange { k, max: n });
    }
    // Horner form: acc_n = skel_n ∪ δ(acc_{n+1}), then k further dilations.
    let mut acc = d.residue().clone();
    for layer in d.layers()[k..].iter().rev() {
        acc = ops.dilate(&acc)?;
        acc.union_with(layer);
    }
    for _ in 0..k {
        acc = ops.dilate(&acc)?;
    }
    Ok(acc)
}

/// Per-pixel erosion depth.
///
/// `Some(0)` marks pixels not incident to the input; `None` marks pixels
/// still inside when iteration stopped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMap {
    width: usize,
    height: usize,
    values: Vec<Option<u32>>,
}

impl DistanceMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, p: Pixel) -> Option<u32> {
        self.values[p.row * self.width + p.col]
    }

    pub fn values(&self) -> &[Option<u32>] {
        &self.values
    }

    /// Largest resolved value.
    pub fn max_value(&self) -> u32 {
        self.values.iter().flatten().copied().max().unwrap_or(0)
    }
}

/// Erosion depth of every pixel.
///
/// A pixel counts as inside `E` while every grid edge at it that can anchor
/// a root of `s` is in `E`. Its value is the first `n ≥ 1` for which it is
/// no longer inside `E_{n-1}`. Edges no root can reach take no part, so the
/// structuring graph selects which steps the distance measures.
pub fn distance_map(
    m: &EdgeSet,
    s: &StructuringGraph,
    grid: &GridGraph,
    policy: VacuousPolicy,
    max_iter: usize,
) -> Result<DistanceMap> {
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    if m.grid() != *grid {
        return Err(Error::GridMismatch {
            expected: grid.to_string(),
            found: m.grid().to_string(),
        });
    }
    let ops = StructuredMorphology::new(s, grid)?;
    let table = ops.table();

    let anchorable: Vec<Vec<usize>> = grid
        .pixels()
        .map(|p| {
            grid.incident_edges(p)
                .filter(|&e| table.is_anchorable(e))
                .collect()
        })
        .collect();

    let mut incident = vec![false; grid.vertex_count()];
    for e in m.edges() {
        incident[grid.pixel_index(e.u)] = true;
        incident[grid.pixel_index(e.v)] = true;
    }
    let mut values: Vec<Option<u32>> = incident.iter().map(|&i| (!i).then_some(0)).collect();
    let mut pending: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_none()).collect();

    let mut level = m.clone();
    for n in 1..=max_iter {
        pending.retain(|&i| {
            let inside = anchorable[i].iter().all(|&e| level.contains(e));
            if !inside {
                values[i] = Some(n as u32);
            }
            inside
        });
        if pending.is_empty() || n == max_iter {
            break;
        }
        let next = ops.erode(&level, policy)?;
        if next == level {
            break;
        }
        level = next;
    }

    Ok(DistanceMap {
        width: grid.width(),
        height: grid.height(),
        values,
    })
}

/// Step pattern of a distance-map skeleton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistanceVariant {
    /// Horizontal and vertical steps (city-block distance).
    Odd,
    /// Diagonal steps only.
    Even,
}

impl DistanceVariant {
    pub fn steps(self) -> &'static [(isize, isize)] {
        match self {
            DistanceVariant::Odd => &[(0, 1), (1, 0), (0, -1), (-1, 0)],
            DistanceVariant::Even => &[(1, 1), (1, -1), (-1, 1), (-1, -1)],
        }
    }

    /// The structuring graph whose erosion peels exactly one step of this
    /// pattern per iteration.
    pub fn sgraph(self) -> StructuringGraph {
        let b = match self {
            DistanceVariant::Odd => Builtin::StepOdd,
            DistanceVariant::Even => Builtin::StepEven,
        };
        StructuringGraph::builtin(b, Connectivity::Eight)
    }
}

impl FromStr for DistanceVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "odd" => Ok(DistanceVariant::Odd),
            "even" => Ok(DistanceVariant::Even),
            _ => Err(Error::InvalidArgument(format!("unknown distance variant {s:?}"))),
        }
    }
}

/// Foreground pixels whose erosion depth is at least that of every
/// neighbor under the variant's steps (plateaus are kept). Pixels outside
/// the raster count as background.
pub fn skeleton_by_distance(img: &BinaryImage, variant: DistanceVariant) -> BinaryImage {
    let (w, h) = (img.width(), img.height());
    if w == 0 || h == 0 {
        return img.clone();
    }
    // one pixel of background padding so the border behaves like any edge
    let padded = BinaryImage::from_fn(w + 2, h + 2, |p| {
        p.row >= 1 && p.col >= 1 && img.get(Pixel::new(p.row - 1, p.col - 1))
    });
    let grid = GridGraph::new(w + 2, h + 2, Connectivity::Eight).expect("positive size");
    let m = image_to_edgeset(&padded, grid).expect("matching size");
    let dm = distance_map(
        &m,
        &variant.sgraph(),
        &grid,
        VacuousPolicy::Include,
        w + h + 4,
    )
    .expect("builtin graph has roots and buds");
    let value = |p: Pixel| dm.get(p).unwrap_or(u32::MAX);

    BinaryImage::from_fn(w, h, |p| {
        if !img.get(p) {
            return false;
        }
        let q = Pixel::new(p.row + 1, p.col + 1);
        let v = value(q);
        variant.steps().iter().all(|&(dr, dc)| {
            grid.offset(q, dr, dc).is_none_or(|n| value(n) <= v)
        })
    })
}
