//! Line-oriented text formats.
//!
//! Edge sets (`GME1`):
//!
//! ```text
//! GME1 <width> <height> <4|8>
//! <u_row> <u_col> <v_row> <v_col>      one line per edge, canonical order
//! ```
//!
//! Skeleton decompositions (`GMD1`):
//!
//! ```text
//! GMD1 <width> <height> <4|8>
//! POLICY <include|exclude>
//! SGRAPH <name>
//! ...structuring graph text...
//! END
//! LAYER <n> <count>                    for n = 0, 1, ..., N-1
//! <edge lines>
//! RESIDUE <N> <count>
//! <edge lines>
//! TERMINATION <emptied|fixpoint|cycle|max-iterations>
//! ```
//!
//! Classical skeletons (`GMC1`):
//!
//! ```text
//! GMC1 <width> <height> <cross3|box3>
//! LAYER <n> <count>
//! <row> <col>                          one line per pixel
//! ```
//!
//! Outside the embedded structuring graph, blank lines and `#` comments are
//! ignored.

use std::fmt::Write as _;

use edgemorph::{
    parse_sgraph, BinaryImage, Connectivity, EdgeSet, FlatElement, GridGraph, Pixel,
    PixelSkeleton, SkeletonDecomposition, Termination, VacuousPolicy,
};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

type Result<T> = std::result::Result<T, FormatError>;

fn fail<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(FormatError {
        line,
        message: message.into(),
    })
}

/// Significant lines with their 1-based numbers.
struct Lines<'a> {
    inner: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate().peekable(),
            last: 0,
        }
    }

    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                return Some((i + 1, line.split_whitespace().collect()));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        match self.next() {
            Some(l) => Ok(l),
            None => fail(self.last + 1, format!("unexpected end of file, expected {what}")),
        }
    }

    /// Raw lines up to (not including) a line that reads `END`.
    fn raw_until_end(&mut self) -> Result<String> {
        let mut out = String::new();
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            if raw.trim() == "END" {
                return Ok(out);
            }
            out.push_str(raw);
            out.push('\n');
        }
        fail(self.last + 1, "missing END after structuring graph")
    }
}

fn number<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .or_else(|_| fail(line, format!("bad {what} {tok:?}")))
}

fn grid_header(line: usize, fields: &[&str], magic: &str) -> Result<GridGraph> {
    match fields {
        [m, w, h, c] if *m == magic => {
            let w: usize = number(line, w, "width")?;
            let h: usize = number(line, h, "height")?;
            let conn = number::<u32>(line, c, "connectivity")
                .ok()
                .and_then(Connectivity::from_count)
                .map_or_else(|| fail(line, format!("connectivity must be 4 or 8, got {c:?}")), Ok)?;
            GridGraph::new(w, h, conn).or_else(|e| fail(line, e.to_string()))
        }
        _ => fail(line, format!("expected `{magic} <width> <height> <4|8>`")),
    }
}

fn edge_line(out: &mut String, grid: &GridGraph, idx: usize) {
    let e = grid.edge(idx);
    let _ = writeln!(out, "{} {} {} {}", e.u.row, e.u.col, e.v.row, e.v.col);
}

fn push_edges(out: &mut String, es: &EdgeSet) {
    let grid = es.grid();
    for idx in es.iter() {
        edge_line(out, &grid, idx);
    }
}

fn read_edges(lines: &mut Lines<'_>, grid: GridGraph, count: usize) -> Result<EdgeSet> {
    let mut es = EdgeSet::empty(grid);
    for _ in 0..count {
        let (n, f) = lines.expect("an edge line")?;
        es.insert(parse_edge(n, &f, &grid)?);
    }
    Ok(es)
}

fn parse_edge(line: usize, fields: &[&str], grid: &GridGraph) -> Result<usize> {
    let [a, b, c, d] = fields else {
        return fail(line, "expected `u_row u_col v_row v_col`");
    };
    let p = Pixel::new(number(line, a, "row")?, number(line, b, "column")?);
    let q = Pixel::new(number(line, c, "row")?, number(line, d, "column")?);
    match grid.edge_index(p, q) {
        Some(idx) => Ok(idx),
        None => fail(line, format!("{p}-{q} is not an edge of the {grid} grid")),
    }
}

pub fn write_edges(es: &EdgeSet) -> String {
    let g = es.grid();
    let mut out = format!("GME1 {} {} {}\n", g.width(), g.height(), g.connectivity());
    push_edges(&mut out, es);
    out
}

pub fn read_edges_text(text: &str) -> Result<EdgeSet> {
    let mut lines = Lines::new(text);
    let (n, f) = lines.expect("a GME1 header")?;
    let grid = grid_header(n, &f, "GME1")?;
    let mut es = EdgeSet::empty(grid);
    while let Some((n, f)) = lines.next() {
        let idx = parse_edge(n, &f, &grid)?;
        if es.contains(idx) {
            return fail(n, "duplicate edge");
        }
        es.insert(idx);
    }
    Ok(es)
}

pub fn write_decomposition(d: &SkeletonDecomposition) -> String {
    let g = d.grid();
    let mut out = format!("GMD1 {} {} {}\n", g.width(), g.height(), g.connectivity());
    let _ = writeln!(out, "POLICY {}", d.policy());
    let _ = writeln!(out, "SGRAPH {}", d.sgraph().name());
    out.push_str(&d.sgraph().to_text());
    out.push_str("END\n");
    for (n, layer) in d.layers().iter().enumerate() {
        let _ = writeln!(out, "LAYER {n} {}", layer.len());
        push_edges(&mut out, layer);
    }
    let _ = writeln!(out, "RESIDUE {} {}", d.residue_index(), d.residue().len());
    push_edges(&mut out, d.residue());
    let _ = writeln!(out, "TERMINATION {}", d.termination());
    out
}

pub fn read_decomposition(text: &str) -> Result<SkeletonDecomposition> {
    let mut lines = Lines::new(text);
    let (n, f) = lines.expect("a GMD1 header")?;
    let grid = grid_header(n, &f, "GMD1")?;

    let (n, f) = lines.expect("POLICY")?;
    let policy: VacuousPolicy = match f.as_slice() {
        ["POLICY", p] => p.parse().or_else(|e: edgemorph::Error| fail(n, e.to_string()))?,
        _ => return fail(n, "expected `POLICY <include|exclude>`"),
    };

    let (n, f) = lines.expect("SGRAPH")?;
    let name = match f.as_slice() {
        ["SGRAPH", name] => name.to_string(),
        _ => return fail(n, "expected `SGRAPH <name>`"),
    };
    let body = lines.raw_until_end()?;
    let sgraph = match parse_sgraph(&body) {
        Ok(s) => s.with_name(name),
        Err(edgemorph::Error::Parse { line, message }) => return fail(n + line, message),
        Err(e) => return fail(n, e.to_string()),
    };

    let mut layers = Vec::new();
    let (residue, header_line) = loop {
        let (n, f) = lines.expect("LAYER or RESIDUE")?;
        match f.as_slice() {
            ["LAYER", idx, count] => {
                let idx: usize = number(n, idx, "layer index")?;
                if idx != layers.len() {
                    return fail(n, format!("expected layer {}, found {idx}", layers.len()));
                }
                layers.push(read_edges(&mut lines, grid, number(n, count, "count")?)?);
            }
            ["RESIDUE", idx, count] => {
                let idx: usize = number(n, idx, "residue index")?;
                if idx != layers.len() {
                    return fail(
                        n,
                        format!("residue index {idx} does not follow {} layers", layers.len()),
                    );
                }
                break (read_edges(&mut lines, grid, number(n, count, "count")?)?, n);
            }
            _ => return fail(n, "expected `LAYER <n> <count>` or `RESIDUE <N> <count>`"),
        }
    };

    let (n, f) = lines.expect("TERMINATION")?;
    let termination: Termination = match f.as_slice() {
        ["TERMINATION", t] => t.parse().or_else(|e: edgemorph::Error| fail(n, e.to_string()))?,
        _ => return fail(n, "expected `TERMINATION <reason>`"),
    };
    if let Some((n, _)) = lines.next() {
        return fail(n, "trailing content after TERMINATION");
    }
    SkeletonDecomposition::from_parts(grid, sgraph, policy, layers, residue, termination)
        .or_else(|e| fail(header_line, e.to_string()))
}

pub fn write_pixel_skeleton(sk: &PixelSkeleton) -> String {
    let mut out = format!("GMC1 {} {} {}\n", sk.width(), sk.height(), sk.element().name());
    for (n, layer) in sk.layers() {
        let _ = writeln!(out, "LAYER {n} {}", layer.count());
        for p in layer.foreground() {
            let _ = writeln!(out, "{} {}", p.row, p.col);
        }
    }
    out
}

pub fn read_pixel_skeleton(text: &str) -> Result<PixelSkeleton> {
    let mut lines = Lines::new(text);
    let (n, f) = lines.expect("a GMC1 header")?;
    let (w, h, element) = match f.as_slice() {
        ["GMC1", w, h, e] => {
            let w: usize = number(n, w, "width")?;
            let h: usize = number(n, h, "height")?;
            let e: FlatElement = e.parse().or_else(|e: edgemorph::Error| fail(n, e.to_string()))?;
            (w, h, e)
        }
        _ => return fail(n, "expected `GMC1 <width> <height> <cross3|box3>`"),
    };
    let mut layers = Vec::new();
    while let Some((n, f)) = lines.next() {
        let ["LAYER", idx, count] = f.as_slice() else {
            return fail(n, "expected `LAYER <n> <count>`");
        };
        let idx: usize = number(n, idx, "layer index")?;
        if idx != layers.len() {
            return fail(n, format!("expected layer {}, found {idx}", layers.len()));
        }
        let mut layer = BinaryImage::new(w, h);
        for _ in 0..number::<usize>(n, count, "count")? {
            let (n, f) = lines.expect("a pixel line")?;
            let [r, c] = f.as_slice() else {
                return fail(n, "expected `<row> <col>`");
            };
            let p = Pixel::new(number(n, r, "row")?, number(n, c, "column")?);
            if !layer.in_bounds(p) {
                return fail(n, format!("{p} lies outside {w}x{h}"));
            }
            layer.set(p, true);
        }
        layers.push(layer);
    }
    PixelSkeleton::from_parts(w, h, element, layers).or_else(|e| fail(1, e.to_string()))
}

/// Skeleton rendering where each pixel carries `1 + ` the smallest layer
/// index among skeleton edges touching it (saturating at 255), 0 elsewhere.
pub fn label_scales(d: &SkeletonDecomposition) -> Vec<u8> {
    let g = d.grid();
    let mut labels = vec![0u8; g.vertex_count()];
    for (n, layer) in d.layers().iter().enumerate().rev() {
        let label = u8::try_from(n + 1).unwrap_or(u8::MAX);
        for e in layer.edges() {
            labels[g.pixel_index(e.u)] = label;
            labels[g.pixel_index(e.v)] = label;
        }
    }
    labels
}
