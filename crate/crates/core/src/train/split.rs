use crate::error::{Error, Result};
use crate::rng::Rng;

/// Seeded shuffle, then contiguous train / validation / test slices.
///
/// Sizes are `⌊f₀·n⌋`, `⌊f₁·n⌋` and the remainder.
pub fn split_dataset<T: Clone>(
    items: &[T],
    seed: u64,
    fractions: [f64; 3],
) -> Result<(Vec<T>, Vec<T>, Vec<T>)> {
    let n = items.len();
    if n < 10 {
        return Err(Error::Config(format!(
            "need at least 10 sequences to split, got {n}"
        )));
    }
    let (train, val, _) = split_sizes(n, fractions);
    let order = shuffled_indices(n, seed);
    let pick = |range: &[usize]| range.iter().map(|&i| items[i].clone()).collect::<Vec<T>>();
    Ok((
        pick(&order[..train]),
        pick(&order[train..train + val]),
        pick(&order[train + val..]),
    ))
}

pub fn split_sizes(n: usize, fractions: [f64; 3]) -> (usize, usize, usize) {
    // Small epsilon so products like 0.8 × 1000 land on the intended integer.
    let train = (fractions[0] * n as f64 + 1e-9).floor() as usize;
    let val = ((fractions[1] * n as f64 + 1e-9).floor() as usize).min(n - train);
    (train, val, n - train - val)
}

fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    Rng::with_stream(seed, 0x5b1).shuffle(&mut order);
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    const DEFAULT_SPLIT: [f64; 3] = [0.8, 0.1, 0.1];

    #[test]
    fn thousand_items() {
        let v: Vec<u32> = (0..1000).collect();
        let (a, b, c) = split_dataset(&v, 1, DEFAULT_SPLIT).unwrap();
        assert_eq!((a.len(), b.len(), c.len()), (800, 100, 100));
    }

    #[test]
    fn odd_size_remainder_goes_to_test() {
        assert_eq!(split_sizes(17, DEFAULT_SPLIT), (13, 1, 3));
        assert_eq!(split_sizes(10, DEFAULT_SPLIT), (8, 1, 1));
    }

    #[test]
    fn partition() {
        let v: Vec<u32> = (0..137).collect();
        let (a, b, c) = split_dataset(&v, 9, DEFAULT_SPLIT).unwrap();
        let mut all: Vec<u32> = a.iter().chain(&b).chain(&c).copied().collect();
        all.sort();
        assert_eq!(all, v);
    }

    #[test]
    fn seeded() {
        let v: Vec<u32> = (0..100).collect();
        assert_eq!(
            split_dataset(&v, 3, DEFAULT_SPLIT).unwrap(),
            split_dataset(&v, 3, DEFAULT_SPLIT).unwrap()
        );
        assert_ne!(
            split_dataset(&v, 3, DEFAULT_SPLIT).unwrap().0,
            split_dataset(&v, 4, DEFAULT_SPLIT).unwrap().0
        );
    }

    #[test]
    fn too_small() {
        let v: Vec<u32> = (0..9).collect();
        assert!(matches!(split_dataset(&v, 0, DEFAULT_SPLIT), Err(Error::Config(_))));
    }
}
