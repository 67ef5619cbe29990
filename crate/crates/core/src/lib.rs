//! Structured morphology on pixel-adjacency graphs.
//!
//! Binary images are edge sets of a regular 4- or 8-connected [`GridGraph`].
//! A [`StructuringGraph`] with designated root and bud edges plays the role
//! of the structuring element: an embedding that maps a root onto an image
//! edge contributes the images of the buds. On top of that neighborhood
//! function the crate provides:
//!
//! * dilation and its adjoint erosion, openings and closings, and the
//!   grayscale (max/min) operators on edge weights ([`morph`]);
//! * multiscale skeletons with exact reconstruction and erosion-driven
//!   distance maps ([`skeleton`]);
//! * a classical pixel-morphology baseline ([`classical`]).
//!
//! ```
//! use edgemorph::{
//!     image_to_edgeset, reconstruct, skeletonize, BinaryImage, Builtin, Connectivity,
//!     GridGraph, StructuringGraph, VacuousPolicy,
//! };
//!
//! let img = BinaryImage::from_ascii("
//!     ......
//!     .####.
//!     .####.
//!     .####.
//!     ......
//! ").unwrap();
//! let grid = GridGraph::new(6, 5, Connectivity::Four).unwrap();
//! let m = image_to_edgeset(&img, grid).unwrap();
//! let s = StructuringGraph::builtin(Builtin::Square, Connectivity::Four);
//! let d = skeletonize(&m, &s, &grid, VacuousPolicy::Include, 50).unwrap();
//! assert_eq!(reconstruct(&d, &grid, 0).unwrap(), m);
//! ```

pub mod classical;
pub mod embed;
pub mod error;
pub mod grid;
pub mod morph;
pub mod sgraph;
pub mod skeleton;

pub use classical::{
    dilate_px, erode_px, open_px, open_scaled, recon_px, skel_px, FlatElement, PixelSet,
    PixelSkeleton,
};
pub use embed::{all_embeddings, embeddings_at, neighborhood, Embedding, NeighborhoodTable};
pub use error::{Error, Result};
pub use grid::{
    edgeset_to_image, image_to_edgeset, BinaryImage, Connectivity, Direction, Edge, EdgeSet,
    GridGraph, Pixel,
};
pub use morph::{
    check_connected_instance, close_adjoint, dilate, erode, gray_dilate, gray_erode,
    open_adjoint, open_structural, ConnectedCheck, EdgeWeightMap, SplitWitness,
    StructuralOpening, StructuredMorphology, VacuousPolicy,
};
pub use sgraph::{parse_sgraph, Builtin, Orientation, StructuringEdge, StructuringGraph};
pub use skeleton::{
    default_max_iter, distance_map, reconstruct, reconstruct_with, skeleton_by_distance,
    skeletonize, skeletonize_with, DistanceMap, DistanceVariant, SkeletonDecomposition,
    Termination,
};
