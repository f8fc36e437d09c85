//! Deterministic quasi-random interior sample points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::ParamBox;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Fraction of each box side excluded at both ends.
pub const DEFAULT_MARGIN: f64 = 0.05;

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// Halton points in the unit cube with a seeded random shift modulo 1.
pub fn shifted_halton(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(dim <= PRIMES.len(), "at most {} sample dimensions", PRIMES.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
    (1..=count as u64)
        .map(|i| {
            (0..dim)
                .map(|d| (radical_inverse(i, PRIMES[d] as u64) + shift[d]).fract())
                .collect()
        })
        .collect()
}

/// `count` points inside `domain`, kept `margin` (fraction of each side) away
/// from the boundary.
pub fn interior_points(domain: &ParamBox, count: usize, seed: u64, margin: f64) -> Vec<Vec<f64>> {
    shifted_halton(domain.dim(), count, seed)
        .iter()
        .map(|s| domain.from_unit(s, margin))
        .collect()
}

/// Tensor grid with `per_axis` evenly spaced points per coordinate, inset by `margin`.
pub fn grid_points(domain: &ParamBox, per_axis: usize, margin: f64) -> Vec<Vec<f64>> {
    let dim = domain.dim();
    let axis: Vec<f64> = if per_axis == 1 {
        vec![0.5]
    } else {
        (0..per_axis).map(|i| i as f64 / (per_axis - 1) as f64).collect()
    };
    let total = per_axis.pow(dim as u32);
    (0..total)
        .map(|mut k| {
            let mut s = vec![0.0; dim];
            for x in s.iter_mut() {
                *x = axis[k % per_axis];
                k /= per_axis;
            }
            domain.from_unit(&s, margin)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_interior() {
        let b = ParamBox::new(vec![0.0, -1.0], vec![1.0, 1.0]).unwrap();
        let a = interior_points(&b, 50, 7, 0.05);
        assert_eq!(a, interior_points(&b, 50, 7, 0.05));
        assert_ne!(a, interior_points(&b, 50, 8, 0.05));
        assert!(a.iter().all(|p| b.contains(p, 0.049)));
    }

    #[test]
    fn radical_inverse_base_two() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
    }

    #[test]
    fn grid_covers_corners() {
        let b = ParamBox::cube(2, 0.0, 1.0);
        let g = grid_points(&b, 3, 0.0);
        assert_eq!(g.len(), 9);
        assert!(g.contains(&vec![0.0, 0.0]) && g.contains(&vec![1.0, 1.0]));
    }
}
