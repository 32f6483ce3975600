use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::preisach::{apply_monotone, MemoryCurve, Triangle};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn unit() -> Triangle {
    Triangle::new(1.0).unwrap()
}

/// Curve reached from the virgin state by up to `moves` random inputs, ending at `end`.
pub fn random_curve(rng: &mut StdRng, triangle: Triangle, moves: usize, end: Option<f64>) -> MemoryCurve {
    let a = triangle.a();
    let mut c = MemoryCurve::virgin(triangle);
    for _ in 0..rng.gen_range(0..=moves) {
        c = apply_monotone(&c, rng.gen_range(-a..=a)).unwrap().0;
    }
    if let Some(u) = end {
        c = apply_monotone(&c, u).unwrap().0;
    }
    c
}

/// Curve whose inputs all lie on `2^-n ℤ ∩ [-a, a]`.
pub fn random_lattice_curve(rng: &mut StdRng, triangle: Triangle, n: u32, moves: usize, end: Option<f64>) -> MemoryCurve {
    let k = (triangle.a() * f64::from(n).exp2()).floor() as i64;
    let h = (-f64::from(n)).exp2();
    let mut c = MemoryCurve::virgin(triangle);
    for _ in 0..rng.gen_range(0..=moves) {
        c = apply_monotone(&c, rng.gen_range(-k..=k) as f64 * h).unwrap().0;
    }
    if let Some(u) = end {
        c = apply_monotone(&c, u).unwrap().0;
    }
    c
}
