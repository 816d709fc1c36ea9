//! Seeded low-discrepancy sampling: a Halton sequence under a random
//! Cranley–Patterson rotation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PRIMES: [u64; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    out
}

/// Points of `[0, 1)^dim`; deterministic given `(seed, dim)`.
#[derive(Debug, Clone)]
pub(crate) struct HaltonStream {
    shift: Vec<f64>,
    index: u64,
}

impl HaltonStream {
    pub(crate) fn new(dim: usize, seed: u64) -> Self {
        assert!(
            dim <= PRIMES.len(),
            "sampling dimension {dim} exceeds the prime table"
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = (0..dim).map(|_| rng.gen::<f64>()).collect();
        Self { shift, index: 1 }
    }

    pub(crate) fn next_point(&mut self) -> Vec<f64> {
        let i = self.index;
        self.index += 1;
        self.shift
            .iter()
            .zip(PRIMES)
            .map(|(s, base)| {
                let u = radical_inverse(i, base) + s;
                u - u.floor()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base_two() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(5, 3) - (2.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn deterministic_per_seed() {
        let a: Vec<_> = (0..5)
            .map({
                let mut s = HaltonStream::new(3, 9);
                move |_| s.next_point()
            })
            .collect();
        let mut s = HaltonStream::new(3, 9);
        for p in &a {
            assert_eq!(&s.next_point(), p);
        }
        let mut other = HaltonStream::new(3, 10);
        assert_ne!(other.next_point(), a[0]);
    }

    #[test]
    fn points_in_unit_cube() {
        let mut s = HaltonStream::new(5, 1);
        for _ in 0..1000 {
            assert!(s.next_point().iter().all(|&u| (0.0..1.0).contains(&u)));
        }
    }
}
