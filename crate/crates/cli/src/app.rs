use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use edgemorph::{
    check_connected_instance, default_max_iter, distance_map, edgeset_to_image, image_to_edgeset,
    open_structural, recon_px, reconstruct, skel_px, skeleton_by_distance, skeletonize_with,
    BinaryImage, Builtin, Connectivity, DistanceVariant, EdgeSet, FlatElement, GridGraph,
    StructuredMorphology, StructuringGraph, VacuousPolicy,
};

use crate::formats;
use crate::pnm::{self, Pnm};

/// Failure classes, each with its own exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Pipeline(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Io(_) => 2,
            Failure::Pipeline(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Pipeline(m) => m,
        }
    }
}

impl From<edgemorph::Error> for Failure {
    fn from(e: edgemorph::Error) -> Self {
        Failure::Pipeline(e.to_string())
    }
}

type Outcome<T> = Result<T, Failure>;

#[derive(Parser, Debug)]
#[command(name = "edgemorph", version, about = "Edge-based structured morphology on pixel grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dilate the edge set of an image.
    Dilate(OpArgs),
    /// Erode the edge set of an image.
    Erode(OpArgs),
    /// Open (dilation after erosion, or the structural opening).
    Open(OpenArgs),
    /// Close (erosion after dilation).
    Close(OpArgs),
    /// Write the multiscale skeleton decomposition of an image.
    Skeletonize(SkeletonizeArgs),
    /// Rebuild an image from a decomposition file.
    Reconstruct(ReconstructArgs),
    /// Write the erosion-depth map as a PGM.
    Distmap(DistmapArgs),
    /// Local maxima of the step distance map.
    SkelDt(SkelDtArgs),
    /// Report whether an operator acted as a connected operator.
    CheckConnected(CheckArgs),
    /// Classical pixel skeleton with a flat 3x3 element.
    ClassicalSkel(ClassicalSkelArgs),
    /// Rebuild from a classical skeleton file.
    ClassicalRecon(ClassicalReconArgs),
}

#[derive(Args, Debug)]
struct Io {
    /// Input file: PBM/PGM (P1, P2, P4, P5) or a GME1 edge set.
    input: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Gray level at or above which a PGM pixel is foreground.
    #[arg(long, default_value_t = 128)]
    threshold: u8,
}

#[derive(Args, Debug)]
struct Structure {
    /// Pixel adjacency of the grid graph [default: 8, or the edge file's].
    #[arg(long, value_parser = parse_connectivity)]
    connectivity: Option<Connectivity>,
    /// Builtin structuring graph name or a path to a structuring graph file.
    #[arg(long)]
    sgraph: Option<String>,
    /// Treatment of edges with an empty neighborhood under erosion.
    #[arg(long, value_enum, default_value_t = Policy::Include)]
    vacuous: Policy,
}

#[derive(Args, Debug)]
struct OpArgs {
    #[command(flatten)]
    io: Io,
    #[command(flatten)]
    structure: Structure,
    #[arg(long, value_enum, default_value_t = Format::Pbm)]
    format: Format,
}

#[derive(Args, Debug)]
struct OpenArgs {
    #[command(flatten)]
    op: OpArgs,
    /// Union of the bud patterns that fit inside the input instead of
    /// dilation after erosion.
    #[arg(long)]
    structural: bool,
}

#[derive(Args, Debug)]
struct SkeletonizeArgs {
    #[command(flatten)]
    io: Io,
    #[command(flatten)]
    structure: Structure,
    /// Iteration cap [default: 4 * (width + height)].
    #[arg(long)]
    max_iter: Option<usize>,
    /// Also render the skeleton to this file.
    #[arg(long)]
    render: Option<PathBuf>,
    /// Render as a PGM labelling each pixel with its finest layer index + 1.
    #[arg(long, requires = "render")]
    label_scales: bool,
}

#[derive(Args, Debug)]
struct ReconstructArgs {
    /// Decomposition file written by `skeletonize`.
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Finest scale kept.
    #[arg(long, default_value_t = 0)]
    k: usize,
    #[arg(long, value_enum, default_value_t = Format::Pbm)]
    format: Format,
}

#[derive(Args, Debug)]
struct DistmapArgs {
    #[command(flatten)]
    io: Io,
    #[command(flatten)]
    structure: Structure,
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args, Debug)]
struct SkelDtArgs {
    #[command(flatten)]
    io: Io,
    #[arg(long, value_enum, default_value_t = Variant::Odd)]
    variant: Variant,
    #[arg(long, value_enum, default_value_t = Format::Pbm)]
    format: Format,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    io: Io,
    #[command(flatten)]
    structure: Structure,
    /// Compare the input with this image instead of applying `--op`.
    #[arg(long)]
    against: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Operator::Erode)]
    op: Operator,
}

#[derive(Args, Debug)]
struct ClassicalSkelArgs {
    #[command(flatten)]
    io: Io,
    #[arg(long, value_enum, default_value_t = Element::Box3)]
    se: Element,
}

#[derive(Args, Debug)]
struct ClassicalReconArgs {
    /// Classical skeleton file written by `classical-skel`.
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    k: usize,
    #[arg(long, value_enum, default_value_t = Format::Pbm)]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Pbm,
    Pgm,
    Edges,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Policy {
    Include,
    Exclude,
}

impl From<Policy> for VacuousPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Include => VacuousPolicy::Include,
            Policy::Exclude => VacuousPolicy::Exclude,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Variant {
    Odd,
    Even,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Operator {
    Dilate,
    Erode,
    Open,
    Close,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Element {
    Cross3,
    Box3,
}

fn parse_connectivity(s: &str) -> Result<Connectivity, String> {
    s.parse()
        .ok()
        .and_then(Connectivity::from_count)
        .ok_or_else(|| format!("expected 4 or 8, got {s:?}"))
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code: 0 success, 1 bad arguments, 2 I/O or parse failure, 3 pipeline
/// failure.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("edgemorph: {}", f.message());
            f.code()
        }
    }
}

fn dispatch(command: Command) -> Outcome<()> {
    match command {
        Command::Dilate(a) => morph_command(a, |ops, m, _| Ok(ops.dilate(m)?)),
        Command::Erode(a) => morph_command(a, |ops, m, p| Ok(ops.erode(m, p)?)),
        Command::Close(a) => morph_command(a, |ops, m, p| Ok(ops.close(m, p)?)),
        Command::Open(a) if a.structural => morph_command(a.op, |ops, m, _| {
            Ok(open_structural(m, ops.sgraph(), &ops.grid())?)
        }),
        Command::Open(a) => morph_command(a.op, |ops, m, p| Ok(ops.open(m, p)?)),
        Command::Skeletonize(a) => skeletonize_command(a),
        Command::Reconstruct(a) => {
            let text = read_text(&a.input)?;
            let d = formats::read_decomposition(&text).map_err(|e| parse_failure(&a.input, e))?;
            let r = reconstruct(&d, &d.grid(), a.k)?;
            write_output(a.output.as_deref(), &render(&r, a.format))
        }
        Command::Distmap(a) => {
            let (m, s) = load_structured(&a.io, &a.structure, Builtin::TriangleOdd)?;
            let grid = m.grid();
            let max_iter = a.max_iter.unwrap_or_else(|| default_max_iter(&grid));
            let dm = distance_map(&m, &s, &grid, a.structure.vacuous.into(), max_iter)?;
            // unresolved pixels saturate at 255, depths cap at 254
            let samples: Vec<u8> = dm
                .values()
                .iter()
                .map(|v| v.map_or(255, |d| d.min(254) as u8))
                .collect();
            write_output(
                a.io.output.as_deref(),
                &pnm::encode_pgm(grid.width(), grid.height(), &samples),
            )
        }
        Command::SkelDt(a) => {
            let img = load_image(&a.io)?;
            let variant = match a.variant {
                Variant::Odd => DistanceVariant::Odd,
                Variant::Even => DistanceVariant::Even,
            };
            let out = skeleton_by_distance(&img, variant);
            write_output(a.io.output.as_deref(), &render_image(&out, a.format)?)
        }
        Command::CheckConnected(a) => check_command(a),
        Command::ClassicalSkel(a) => {
            let img = load_image(&a.io)?;
            let se = match a.se {
                Element::Cross3 => FlatElement::Cross3,
                Element::Box3 => FlatElement::Box3,
            };
            let sk = skel_px(&img, se);
            write_output(a.io.output.as_deref(), formats::write_pixel_skeleton(&sk).as_bytes())
        }
        Command::ClassicalRecon(a) => {
            let text = read_text(&a.input)?;
            let sk = formats::read_pixel_skeleton(&text).map_err(|e| parse_failure(&a.input, e))?;
            let img = recon_px(&sk, a.k)?;
            write_output(a.output.as_deref(), &render_image(&img, a.format)?)
        }
    }
}

fn morph_command(
    a: OpArgs,
    op: impl FnOnce(&StructuredMorphology, &EdgeSet, VacuousPolicy) -> Outcome<EdgeSet>,
) -> Outcome<()> {
    let (m, s) = load_structured(&a.io, &a.structure, Builtin::Square)?;
    let ops = StructuredMorphology::new(&s, &m.grid())?;
    let out = op(&ops, &m, a.structure.vacuous.into())?;
    write_output(a.io.output.as_deref(), &render(&out, a.format))
}

fn skeletonize_command(a: SkeletonizeArgs) -> Outcome<()> {
    let (m, s) = load_structured(&a.io, &a.structure, Builtin::Square)?;
    let grid = m.grid();
    let max_iter = a.max_iter.unwrap_or_else(|| default_max_iter(&grid));
    let ops = StructuredMorphology::new(&s, &grid)?;
    let d = skeletonize_with(&ops, &m, a.structure.vacuous.into(), max_iter)?;
    write_output(a.io.output.as_deref(), formats::write_decomposition(&d).as_bytes())?;
    if let Some(path) = &a.render {
        let bytes = if a.label_scales {
            pnm::encode_pgm(grid.width(), grid.height(), &formats::label_scales(&d))
        } else {
            pnm::encode_pbm(&edgeset_to_image(&d.skeleton()))
        };
        write_output(Some(path), &bytes)?;
    }
    Ok(())
}

fn check_command(a: CheckArgs) -> Outcome<()> {
    let conn = a.structure.connectivity.unwrap_or(Connectivity::Eight);
    let (input, output) = match &a.against {
        Some(path) => (load_image(&a.io)?, read_image(path, a.io.threshold)?),
        None => {
            let (m, s) = load_structured(&a.io, &a.structure, Builtin::Square)?;
            let ops = StructuredMorphology::new(&s, &m.grid())?;
            let policy = a.structure.vacuous.into();
            let out = match a.op {
                Operator::Dilate => ops.dilate(&m)?,
                Operator::Erode => ops.erode(&m, policy)?,
                Operator::Open => ops.open(&m, policy)?,
                Operator::Close => ops.close(&m, policy)?,
            };
            (edgeset_to_image(&m), edgeset_to_image(&out))
        }
    };
    let check = check_connected_instance(&input, &output, conn)?;
    let mut report = format!("connected: {}\n", if check.connected { "yes" } else { "no" });
    if let Some(w) = check.witness {
        report.push_str(&format!(
            "split-zone: {} component of {} pixels\nwitness: {} {}\n",
            if w.foreground { "foreground" } else { "background" },
            w.component.len(),
            w.pixels.0,
            w.pixels.1
        ));
    }
    write_output(a.io.output.as_deref(), report.as_bytes())
}

fn parse_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn read_bytes(path: &Path) -> Outcome<Vec<u8>> {
    std::fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Outcome<String> {
    String::from_utf8(read_bytes(path)?)
        .map_err(|_| Failure::Io(format!("{}: not valid UTF-8 text", path.display())))
}

fn read_image(path: &Path, threshold: u8) -> Outcome<BinaryImage> {
    let bytes = read_bytes(path)?;
    if bytes.starts_with(b"GME1") {
        let text = String::from_utf8_lossy(&bytes);
        let es = formats::read_edges_text(&text).map_err(|e| parse_failure(path, e))?;
        return Ok(edgeset_to_image(&es));
    }
    let img: Pnm = pnm::decode(&bytes).map_err(|e| parse_failure(path, e))?;
    Ok(img.to_binary(threshold))
}

fn load_image(io: &Io) -> Outcome<BinaryImage> {
    read_image(&io.input, io.threshold)
}

/// Reads the input as an edge set and resolves the structuring graph.
fn load_structured(
    io: &Io,
    st: &Structure,
    default: Builtin,
) -> Outcome<(EdgeSet, StructuringGraph)> {
    let bytes = read_bytes(&io.input)?;
    let m = if bytes.starts_with(b"GME1") {
        let text = String::from_utf8_lossy(&bytes);
        let es = formats::read_edges_text(&text).map_err(|e| parse_failure(&io.input, e))?;
        if let Some(c) = st.connectivity.filter(|&c| c != es.grid().connectivity()) {
            return Err(Failure::Usage(format!(
                "--connectivity {c} conflicts with the {}-connected edge file",
                es.grid().connectivity()
            )));
        }
        es
    } else {
        let img = pnm::decode(&bytes)
            .map_err(|e| parse_failure(&io.input, e))?
            .to_binary(io.threshold);
        let conn = st.connectivity.unwrap_or(Connectivity::Eight);
        let grid = GridGraph::new(img.width(), img.height(), conn)?;
        image_to_edgeset(&img, grid)?
    };
    let conn = m.grid().connectivity();
    let s = match &st.sgraph {
        None => StructuringGraph::builtin(default, conn),
        Some(arg) => {
            if arg.parse::<Builtin>().is_err() && !Path::new(arg).exists() {
                return Err(Failure::Usage(format!(
                    "--sgraph {arg:?} is neither a builtin ({}) nor an existing file",
                    Builtin::ALL.map(Builtin::name).join(", ")
                )));
            }
            StructuringGraph::resolve(arg, conn).map_err(|e| Failure::Io(format!("{arg}: {e}")))?
        }
    };
    Ok((m, s))
}

fn render(es: &EdgeSet, format: Format) -> Vec<u8> {
    match format {
        Format::Pbm => pnm::encode_pbm(&edgeset_to_image(es)),
        Format::Pgm => pnm::encode_binary_pgm(&edgeset_to_image(es)),
        Format::Edges => formats::write_edges(es).into_bytes(),
    }
}

fn render_image(img: &BinaryImage, format: Format) -> Outcome<Vec<u8>> {
    match format {
        Format::Pbm => Ok(pnm::encode_pbm(img)),
        Format::Pgm => Ok(pnm::encode_binary_pgm(img)),
        Format::Edges => Err(Failure::Usage(
            "this command produces a raster; use --format pbm or pgm".into(),
        )),
    }
}

/// Writes to `path` through a sibling temporary file and a rename, or to
/// standard output.
fn write_output(path: Option<&Path>, bytes: &[u8]) -> Outcome<()> {
    let io_err = |e: std::io::Error| {
        Failure::Io(format!(
            "{}: {e}",
            path.map_or("<stdout>".into(), |p| p.display().to_string())
        ))
    };
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out.write_all(bytes).and_then(|_| out.flush()).map_err(io_err);
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
