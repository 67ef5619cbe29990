//! Classical pixel morphology with flat 3x3 structuring elements: erosion,
//! dilation, opening, the Lantuéjoul skeleton and its reconstruction.
//!
//! Pixels outside the raster are background.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::grid::{BinaryImage, Pixel};

/// A set of pixels on a bounded raster.
pub type PixelSet = BinaryImage;

/// Origin-centred flat structuring elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlatElement {
    /// The 4-neighborhood plus the origin.
    Cross3,
    /// The full 3x3 box.
    Box3,
}

impl FlatElement {
    pub fn offsets(self) -> Vec<(isize, isize)> {
        let mut v = Vec::new();
        for dr in -1..=1isize {
            for dc in -1..=1isize {
                if self == FlatElement::Box3 || dr == 0 || dc == 0 {
                    v.push((dr, dc));
                }
            }
        }
        v
    }

    /// Offsets of `nB`: `B` dilated with itself `n` times (`0B` is the origin).
    pub fn scaled(self, n: usize) -> Vec<(isize, isize)> {
        let unit = self.offsets();
        let mut acc: BTreeSet<(isize, isize)> = BTreeSet::from([(0, 0)]);
        for _ in 0..n {
            acc = acc
                .iter()
                .flat_map(|&(r, c)| unit.iter().map(move |&(dr, dc)| (r + dr, c + dc)))
                .collect();
        }
        acc.into_iter().collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            FlatElement::Cross3 => "cross3",
            FlatElement::Box3 => "box3",
        }
    }
}

impl std::str::FromStr for FlatElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cross3" | "cross" => Ok(FlatElement::Cross3),
            "box3" | "box" => Ok(FlatElement::Box3),
            _ => Err(Error::InvalidArgument(format!("unknown flat element {s:?}"))),
        }
    }
}

fn shifted(p: Pixel, dr: isize, dc: isize) -> Option<Pixel> {
    Some(Pixel::new(
        p.row.checked_add_signed(dr)?,
        p.col.checked_add_signed(dc)?,
    ))
}

/// Minkowski erosion by an offset set.
pub fn erode_by(m: &PixelSet, offsets: &[(isize, isize)]) -> PixelSet {
    BinaryImage::from_fn(m.width(), m.height(), |p| {
        offsets
            .iter()
            .all(|&(dr, dc)| shifted(p, dr, dc).is_some_and(|q| m.get(q)))
    })
}

/// Minkowski dilation by an offset set, clipped to the raster.
pub fn dilate_by(m: &PixelSet, offsets: &[(isize, isize)]) -> PixelSet {
    let mut out = BinaryImage::new(m.width(), m.height());
    for p in m.foreground() {
        for &(dr, dc) in offsets {
            if let Some(q) = shifted(p, dr, dc).filter(|&q| out.in_bounds(q)) {
                out.set(q, true);
            }
        }
    }
    out
}

pub fn erode_px(m: &PixelSet, b: FlatElement) -> PixelSet {
    erode_by(m, &b.offsets())
}

pub fn dilate_px(m: &PixelSet, b: FlatElement) -> PixelSet {
    dilate_by(m, &b.offsets())
}

pub fn open_px(m: &PixelSet, b: FlatElement) -> PixelSet {
    dilate_px(&erode_px(m, b), b)
}

/// Opening by `nB`.
pub fn open_scaled(m: &PixelSet, b: FlatElement, n: usize) -> PixelSet {
    let nb = b.scaled(n);
    dilate_by(&erode_by(m, &nb), &nb)
}

fn difference(a: &PixelSet, b: &PixelSet) -> PixelSet {
    BinaryImage::from_fn(a.width(), a.height(), |p| a.get(p) && !b.get(p))
}

/// Skeleton levels `skel_n = (M ⊖ nB) \ ((M ⊖ nB) ∘ B)` for every `n` with
/// `M ⊖ nB` non-empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelSkeleton {
    width: usize,
    height: usize,
    element: FlatElement,
    layers: Vec<PixelSet>,
}

impl PixelSkeleton {
    pub fn from_parts(
        width: usize,
        height: usize,
        element: FlatElement,
        layers: Vec<PixelSet>,
    ) -> Result<Self> {
        if layers.iter().any(|l| l.width() != width || l.height() != height) {
            return Err(Error::InvalidArgument(format!(
                "skeleton layer size differs from {width}x{height}"
            )));
        }
        Ok(PixelSkeleton {
            width,
            height,
            element,
            layers,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn element(&self) -> FlatElement {
        self.element
    }

    /// `(n, skel_n)` pairs.
    pub fn layers(&self) -> impl Iterator<Item = (usize, &PixelSet)> {
        self.layers.iter().enumerate()
    }

    pub fn layer(&self, n: usize) -> Option<&PixelSet> {
        self.layers.get(n)
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }
}

pub fn skel_px(m: &PixelSet, b: FlatElement) -> PixelSkeleton {
    let mut layers = Vec::new();
    let mut eroded = m.clone();
    while !eroded.is_empty() {
        layers.push(difference(&eroded, &open_px(&eroded, b)));
        eroded = erode_px(&eroded, b);
    }
    PixelSkeleton {
        width: m.width(),
        height: m.height(),
        element: b,
        layers,
    }
}

/// `⋃_{k≤n≤N} skel_n ⊕ nB`: the original image for `k = 0`, its opening
/// by `kB` otherwise.
pub fn recon_px(skel: &PixelSkeleton, k: usize) -> Result<PixelSet> {
    let max = skel.layers.len().saturating_sub(1);
    if k > max {
        return Err(Error::KOutOfRange { k, max });
    }
    let mut out = BinaryImage::new(skel.width, skel.height);
    for (n, layer) in skel.layers.iter().enumerate().skip(k) {
        let grown = dilate_by(layer, &skel.element.scaled(n));
        for p in grown.foreground() {
            out.set(p, true);
        }
    }
    Ok(out)
}
