//! Deterministic inputs for the benchmarks.

use edgemorph::BinaryImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Union of `count` random discs with radii in `4..24`.
pub fn random_blobs(seed: u64, width: usize, height: usize, count: usize) -> BinaryImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let discs: Vec<(f64, f64, f64)> = (0..count)
        .map(|_| {
            (
                rng.gen_range(0.0..height as f64),
                rng.gen_range(0.0..width as f64),
                rng.gen_range(4.0..24.0),
            )
        })
        .collect();
    BinaryImage::from_fn(width, height, |p| {
        discs.iter().any(|&(r, c, rad)| {
            let (dr, dc) = (p.row as f64 - r, p.col as f64 - c);
            dr * dr + dc * dc <= rad * rad
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blobs_are_deterministic_and_nonempty() {
        let a = random_blobs(1, 64, 48, 5);
        assert_eq!(a, random_blobs(1, 64, 48, 5));
        assert!(!a.is_empty());
        assert_eq!((a.width(), a.height()), (64, 48));
    }
}
