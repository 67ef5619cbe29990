//! Structuring graphs: small graphs whose root edges anchor embeddings into
//! the grid and whose bud edges are emitted (dilation) or tested (erosion).
//!
//! Text format, one directive per line, `#` starts a comment:
//!
//! ```text
//! v <id>                 declare a vertex
//! e <u> <v> [flags]      declare an edge
//! ```
//!
//! `flags` is a possibly empty word over `r` (root), `b` (bud), and at most
//! one of `a` / `d`, which restricts the edge to map onto axis-aligned or
//! diagonal grid edges respectively. Vertex ids may be any non-negative
//! integers; they are renumbered `0..k` in ascending order.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{Connectivity, GridGraph, Pixel};

/// Upper bound on structuring-graph vertices.
pub const MAX_VERTICES: usize = 16;

/// Geometric restriction on the grid edges a structuring edge may map onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Orientation {
    #[default]
    Any,
    Axis,
    Diagonal,
}

impl Orientation {
    pub fn admits(self, axis: bool) -> bool {
        match self {
            Orientation::Any => true,
            Orientation::Axis => axis,
            Orientation::Diagonal => !axis,
        }
    }
}

/// An edge of a structuring graph together with its roles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StructuringEdge {
    pub u: usize,
    pub v: usize,
    pub root: bool,
    pub bud: bool,
    pub orientation: Orientation,
}

impl StructuringEdge {
    pub fn new(u: usize, v: usize, root: bool, bud: bool) -> Self {
        StructuringEdge {
            u,
            v,
            root,
            bud,
            orientation: Orientation::Any,
        }
    }

    pub fn oriented(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    fn flags(&self) -> String {
        let mut s = String::new();
        if self.root {
            s.push('r');
        }
        if self.bud {
            s.push('b');
        }
        match self.orientation {
            Orientation::Any => {}
            Orientation::Axis => s.push('a'),
            Orientation::Diagonal => s.push('d'),
        }
        s
    }
}

/// The builtin structuring graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// One edge that is both root and bud; every operator reduces to the identity.
    Single,
    /// Triangle whose root must land on an axis edge; the other two edges are buds.
    TriangleOdd,
    /// Triangle whose root must land on a diagonal edge; the other two edges are buds.
    TriangleEven,
    /// 4-cycle with one root and one bud on opposite sides.
    Square,
    /// The 3x3 grid graph of the host connectivity; every edge is root and bud.
    Grid3,
    /// Axis root followed by one adjacent axis bud. Eroding with it peels one
    /// city-block layer per step.
    StepOdd,
    /// Diagonal counterpart of [`Builtin::StepOdd`].
    StepEven,
}

impl Builtin {
    pub const ALL: [Builtin; 7] = [
        Builtin::Single,
        Builtin::TriangleOdd,
        Builtin::TriangleEven,
        Builtin::Square,
        Builtin::Grid3,
        Builtin::StepOdd,
        Builtin::StepEven,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Single => "single",
            Builtin::TriangleOdd => "triangle-odd",
            Builtin::TriangleEven => "triangle-even",
            Builtin::Square => "square",
            Builtin::Grid3 => "grid3",
            Builtin::StepOdd => "step-odd",
            Builtin::StepEven => "step-even",
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == norm || b.name().replace('-', "") == norm)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown builtin structuring graph {s:?}")))
    }
}

/// A small simple graph with root and bud edge sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StructuringGraph {
    name: String,
    vertex_count: usize,
    edges: Vec<StructuringEdge>,
}

impl StructuringGraph {
    /// Validates and builds a structuring graph.
    pub fn new(
        name: impl Into<String>,
        vertex_count: usize,
        edges: Vec<StructuringEdge>,
    ) -> Result<Self> {
        if vertex_count > MAX_VERTICES {
            return Err(Error::InvalidArgument(format!(
                "{vertex_count} vertices exceeds the cap of {MAX_VERTICES}"
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for e in &edges {
            if e.u >= vertex_count || e.v >= vertex_count {
                return Err(Error::InvalidArgument(format!(
                    "edge {}-{} references an undeclared vertex",
                    e.u, e.v
                )));
            }
            if e.u == e.v {
                return Err(Error::InvalidArgument(format!("self-loop on vertex {}", e.u)));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate edge {}-{}",
                    e.u, e.v
                )));
            }
        }
        Ok(StructuringGraph {
            name: name.into(),
            vertex_count,
            edges,
        })
    }

    pub fn builtin(which: Builtin, connectivity: Connectivity) -> Self {
        use Orientation::*;
        let e = StructuringEdge::new;
        let (n, edges) = match which {
            Builtin::Single => (2, vec![e(0, 1, true, true)]),
            Builtin::TriangleOdd => (
                3,
                vec![
                    e(0, 1, true, false).oriented(Axis),
                    e(1, 2, false, true),
                    e(0, 2, false, true),
                ],
            ),
            Builtin::TriangleEven => (
                3,
                vec![
                    e(0, 1, true, false).oriented(Diagonal),
                    e(1, 2, false, true),
                    e(0, 2, false, true),
                ],
            ),
            Builtin::Square => (
                4,
                vec![
                    e(0, 1, true, false),
                    e(1, 2, false, false),
                    e(2, 3, false, true),
                    e(3, 0, false, false),
                ],
            ),
            Builtin::Grid3 => {
                let g = GridGraph::new(3, 3, connectivity).expect("3x3 grid");
                let edges = g
                    .edges()
                    .map(|ed| e(g.pixel_index(ed.u), g.pixel_index(ed.v), true, true))
                    .collect();
                (9, edges)
            }
            Builtin::StepOdd => (
                3,
                vec![e(0, 1, true, false).oriented(Axis), e(1, 2, false, true).oriented(Axis)],
            ),
            Builtin::StepEven => (
                3,
                vec![
                    e(0, 1, true, false).oriented(Diagonal),
                    e(1, 2, false, true).oriented(Diagonal),
                ],
            ),
        };
        StructuringGraph::new(which.name(), n, edges).expect("builtins are valid")
    }

    /// Resolves `arg` as a builtin name, else reads it as a file path.
    pub fn resolve(arg: &str, connectivity: Connectivity) -> Result<Self> {
        if let Ok(b) = arg.parse::<Builtin>() {
            return Ok(Self::builtin(b, connectivity));
        }
        let text = std::fs::read_to_string(arg).map_err(|err| {
            Error::InvalidArgument(format!("{arg:?} is neither a builtin nor a readable file: {err}"))
        })?;
        let name = std::path::Path::new(arg)
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("custom");
        Ok(parse_sgraph(&text)?.with_name(name))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[StructuringEdge] {
        &self.edges
    }

    /// Indices (into [`Self::edges`]) of the root edges.
    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().enumerate().filter(|(_, e)| e.root).map(|(i, _)| i)
    }

    /// Indices (into [`Self::edges`]) of the bud edges.
    pub fn buds(&self) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().enumerate().filter(|(_, e)| e.bud).map(|(i, _)| i)
    }

    pub fn has_roots(&self) -> bool {
        self.edges.iter().any(|e| e.root)
    }

    pub fn has_buds(&self) -> bool {
        self.edges.iter().any(|e| e.bud)
    }

    /// Adjacency lists: `(neighbor, edge index)` per vertex.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.u].push((e.v, i));
            adj[e.v].push((e.u, i));
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        self.distances_from(&[0]).iter().all(Option::is_some)
    }

    /// Breadth-first hop counts from a set of sources.
    pub fn distances_from(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let adj = self.adjacency();
        let mut dist = vec![None; self.vertex_count];
        let mut queue = std::collections::VecDeque::new();
        for &s in sources {
            dist[s] = Some(0);
            queue.push_back(s);
        }
        while let Some(x) = queue.pop_front() {
            let d = dist[x].unwrap();
            for &(y, _) in &adj[x] {
                if dist[y].is_none() {
                    dist[y] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Serializes to the text format; [`parse_sgraph`] inverts it.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for v in 0..self.vertex_count {
            s.push_str(&format!("v {v}\n"));
        }
        for e in &self.edges {
            let flags = e.flags();
            if flags.is_empty() {
                s.push_str(&format!("e {} {}\n", e.u, e.v));
            } else {
                s.push_str(&format!("e {} {} {flags}\n", e.u, e.v));
            }
        }
        s
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses the structuring-graph text format described in the module docs.
pub fn parse_sgraph(text: &str) -> Result<StructuringGraph> {
    // declared id -> line
    let mut vertices: BTreeMap<u64, usize> = BTreeMap::new();
    let mut raw_edges: Vec<(usize, u64, u64, &str)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse_id = |tok: &str| {
            tok.parse::<u64>()
                .map_err(|_| parse_err(lineno, format!("bad vertex id {tok:?}")))
        };
        match fields.as_slice() {
            ["v", id] => {
                let id = parse_id(id)?;
                if vertices.insert(id, lineno).is_some() {
                    return Err(parse_err(lineno, format!("vertex {id} declared twice")));
                }
                if vertices.len() > MAX_VERTICES {
                    return Err(parse_err(
                        lineno,
                        format!("more than {MAX_VERTICES} vertices"),
                    ));
                }
            }
            ["e", u, v] => raw_edges.push((lineno, parse_id(u)?, parse_id(v)?, "")),
            ["e", u, v, flags] => raw_edges.push((lineno, parse_id(u)?, parse_id(v)?, flags)),
            _ => return Err(parse_err(lineno, format!("malformed line {line:?}"))),
        }
    }

    let renumber: BTreeMap<u64, usize> = vertices
        .keys()
        .enumerate()
        .map(|(new, &old)| (old, new))
        .collect();
    let mut seen = std::collections::HashSet::new();
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (lineno, u, v, flags) in raw_edges {
        let lookup = |id: u64| {
            renumber
                .get(&id)
                .copied()
                .ok_or_else(|| parse_err(lineno, format!("vertex {id} is not declared")))
        };
        let (u, v) = (lookup(u)?, lookup(v)?);
        if u == v {
            return Err(parse_err(lineno, "self-loop"));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(parse_err(lineno, "duplicate edge"));
        }
        let mut edge = StructuringEdge::new(u, v, false, false);
        for ch in flags.chars() {
            match ch {
                'r' if !edge.root => edge.root = true,
                'b' if !edge.bud => edge.bud = true,
                'a' | 'd' if edge.orientation == Orientation::Any => {
                    edge.orientation = if ch == 'a' {
                        Orientation::Axis
                    } else {
                        Orientation::Diagonal
                    }
                }
                _ => return Err(parse_err(lineno, format!("bad edge flags {flags:?}"))),
            }
        }
        edges.push(edge);
    }
    StructuringGraph::new("custom", renumber.len(), edges)
}

/// True if the grid edge from `a` to `b` satisfies `orientation`.
pub(crate) fn orientation_ok(orientation: Orientation, a: Pixel, b: Pixel) -> bool {
    orientation.admits(a.row == b.row || a.col == b.col)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_shapes() {
        let single = StructuringGraph::builtin(Builtin::Single, Connectivity::Four);
        assert_eq!(single.edges().len(), 1);
        assert!(single.edges()[0].root && single.edges()[0].bud);

        let square = StructuringGraph::builtin(Builtin::Square, Connectivity::Four);
        assert_eq!(square.vertex_count(), 4);
        assert_eq!(square.edges().len(), 4);
        assert_eq!(square.roots().count(), 1);
        assert_eq!(square.buds().count(), 1);

        let g4 = StructuringGraph::builtin(Builtin::Grid3, Connectivity::Four);
        assert_eq!(g4.edges().len(), 12);
        assert!(g4.edges().iter().all(|e| e.root && e.bud));
        let g8 = StructuringGraph::builtin(Builtin::Grid3, Connectivity::Eight);
        assert_eq!(g8.edges().len(), 20);

        for b in Builtin::ALL {
            let s = StructuringGraph::builtin(b, Connectivity::Eight);
            assert!(s.has_roots() && s.has_buds(), "{b}");
            assert!(s.is_connected(), "{b}");
        }
    }

    #[test]
    fn parses_single_and_triangle() {
        let s = parse_sgraph("v 0\nv 1\ne 0 1 rb").unwrap();
        assert_eq!(s.vertex_count(), 2);
        assert_eq!(s.edges(), StructuringGraph::builtin(Builtin::Single, Connectivity::Four).edges());

        let t = parse_sgraph("v 0\nv 1\nv 2\ne 0 1 r\ne 1 2 b\ne 0 2 b").unwrap();
        assert_eq!(t.roots().collect::<Vec<_>>(), vec![0]);
        assert_eq!(t.buds().collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = parse_sgraph("v 0\ne 0 5 r").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 2,
                message: "vertex 5 is not declared".into()
            }
        );
        assert!(matches!(
            parse_sgraph("v 0\nv 1\ne 0 1 r\ne 1 0 b"),
            Err(Error::Parse { line: 4, .. })
        ));
        assert!(matches!(parse_sgraph("v 0\nx 1"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_sgraph("v 0\nv 0"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(
            parse_sgraph("v 0\nv 1\ne 0 1 rq"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(parse_sgraph("v 0\ne 0 0"), Err(Error::Parse { line: 2, .. })));

        let many: String = (0..17).map(|i| format!("v {i}\n")).collect();
        assert!(matches!(parse_sgraph(&many), Err(Error::Parse { line: 17, .. })));
    }

    #[test]
    fn comments_blank_lines_and_sparse_ids() {
        let s = parse_sgraph("# square-ish\n\nv 10\nv 20  # trailing\ne 20 10\n").unwrap();
        assert_eq!(s.vertex_count(), 2);
        assert_eq!((s.edges()[0].u, s.edges()[0].v), (1, 0));
        assert!(!s.edges()[0].root && !s.edges()[0].bud);
    }

    #[test]
    fn builtins_round_trip_through_text() {
        for conn in [Connectivity::Four, Connectivity::Eight] {
            for b in Builtin::ALL {
                let s = StructuringGraph::builtin(b, conn);
                let back = parse_sgraph(&s.to_text()).unwrap().with_name(s.name());
                assert_eq!(back, s);
            }
        }
    }

    #[test]
    fn builtin_names_parse() {
        assert_eq!("grid3".parse::<Builtin>().unwrap(), Builtin::Grid3);
        assert_eq!("Triangle_Odd".parse::<Builtin>().unwrap(), Builtin::TriangleOdd);
        assert_eq!("stepeven".parse::<Builtin>().unwrap(), Builtin::StepEven);
        assert!("pentagon".parse::<Builtin>().is_err());
    }
}
