//! Low-discrepancy sampling used for coverage checks and volume estimates.

use rand::Rng;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    r
}

/// Halton sequence in `[0, 1)^dim` with a Cranley-Patterson random shift.
#[derive(Debug, Clone)]
pub struct Halton {
    dim: usize,
    shift: Vec<f64>,
    index: u64,
}

impl Halton {
    pub fn new(dim: usize) -> Self {
        assert!(dim <= PRIMES.len(), "Halton supports at most {} dims", PRIMES.len());
        Halton {
            dim,
            shift: vec![0.0; dim],
            index: 1,
        }
    }

    pub fn shifted<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let mut h = Halton::new(dim);
        h.shift = (0..dim).map(|_| rng.gen::<f64>()).collect();
        h
    }

    pub fn next_into(&mut self, out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate().take(self.dim) {
            let v = radical_inverse(self.index, PRIMES[k]) + self.shift[k];
            *o = v - v.floor();
        }
        self.index += 1;
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        self.next_into(&mut v);
        v
    }
}
