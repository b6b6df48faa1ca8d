//! Synthetic attitude-control traces.
//!
//! `mu` starts with a large transient, settles around 0.005 with small
//! noise, and is pushed above 0.007 by one disturbance after t = 11.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sigdiag_core::trace::Trace;

pub const RATE_HZ: f64 = 480.0;
pub const DURATION: f64 = 50.0;

/// A trace of `mu` over `[0, 50]` sampled at 480 Hz (24 001 records).
pub fn afc_trace(seed: u64) -> Trace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = (DURATION * RATE_HZ) as usize + 1;
    let onset = rng.gen_range(12.0..45.0);
    let height = rng.gen_range(0.003..0.01);
    let decay = rng.gen_range(0.5..2.0);
    let samples: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let t = k as f64 / RATE_HZ;
            let transient = 0.05 * (-t / 2.0).exp();
            let bump = if t >= onset { height * (-(t - onset) / decay).exp() } else { 0.0 };
            let noise = rng.gen_range(-0.0008..0.0008);
            (t, 0.005 + transient + bump + noise)
        })
        .collect();
    Trace::from_samples("mu", &samples).expect("timestamps increase")
}
