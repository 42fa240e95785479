//! Counter-based uniform generator for probe points.
//!
//! Draw `i` of stream `seed` is `splitmix64(seed + (i + 1) * 0x9E3779B97F4A7C15)`
//! (wrapping arithmetic), mapped to `[0, 1)` as `(x >> 11) * 2^-53`. Every draw
//! depends only on `(seed, i)`, so point sets are reproducible from any language
//! and independent of evaluation order.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform in `[0, 1)` for counter `i` of stream `seed`.
#[inline]
pub fn uniform(seed: u64, i: u64) -> f64 {
    let x = splitmix64(seed.wrapping_add(i.wrapping_add(1).wrapping_mul(GOLDEN)));
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone)]
pub struct CounterRng {
    seed: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { seed, counter: 0 }
    }

    pub fn next_f64(&mut self) -> f64 {
        let u = uniform(self.seed, self.counter);
        self.counter += 1;
        u
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// `n` points with `|x̃|` log-uniform in `[r_min, r_max]`, uniform azimuth and
/// `x₃` uniform in `[−half_height, half_height)`. Point `i` uses draws `3i..3i+3`.
pub fn cylinder_points(seed: u64, n: usize, r_min: f64, r_max: f64, half_height: f64) -> Vec<crate::geometry::Vec3> {
    let ratio = r_max / r_min;
    (0..n as u64)
        .map(|i| {
            let r = r_min * ratio.powf(uniform(seed, 3 * i));
            let a = std::f64::consts::TAU * uniform(seed, 3 * i + 1);
            let z = half_height * (2.0 * uniform(seed, 3 * i + 2) - 1.0);
            crate::geometry::Vec3::new(r * a.cos(), r * a.sin(), z)
        })
        .collect()
}
