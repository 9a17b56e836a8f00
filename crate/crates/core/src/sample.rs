//! Deterministic quasi-random sampling. Reports and tests draw their sample
//! points from Halton sequences inside a declared box, so a (box, seed,
//! count) triple always reproduces the same points.

/// Axis-aligned sampling box.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SampleBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> SampleBox {
        assert_eq!(lo.len(), hi.len());
        SampleBox { lo, hi }
    }

    pub fn cube(n: usize, lo: f64, hi: f64) -> SampleBox {
        SampleBox {
            lo: vec![lo; n],
            hi: vec![hi; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }
}

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Van der Corput radical inverse of `i` in the given base.
fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let b = base as f64;
    while i > 0 {
        f /= b;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// `count` Halton points inside the box. Different seeds select disjoint
/// stretches of the sequence.
pub fn halton_points(bx: &SampleBox, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let n = bx.dim();
    assert!(n <= PRIMES.len(), "sampling supports up to 8 dimensions");
    let start = seed.wrapping_mul(65_536).wrapping_add(1);
    (0..count as u64)
        .map(|i| {
            (0..n)
                .map(|d| {
                    let u = radical_inverse(start + i, PRIMES[d]);
                    bx.lo[d] + u * (bx.hi[d] - bx.lo[d])
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_lie_in_box_and_are_deterministic() {
        let bx = SampleBox::cube(3, -1.0, 2.0);
        let a = halton_points(&bx, 100, 0);
        let b = halton_points(&bx, 100, 0);
        assert_eq!(a, b);
        for p in &a {
            for d in 0..3 {
                assert!(p[d] >= -1.0 && p[d] <= 2.0);
            }
        }
        let c = halton_points(&bx, 100, 1);
        assert_ne!(a, c);
    }
}
