//! Test support for sigdiag: a brute-force oracle, seeded trace
//! generators and the worked-example fixtures.

pub mod afc;
pub mod corpus;
pub mod fixtures;
pub mod generator;
pub mod oracle;

pub use generator::{cause_case, generate_trace, Case, GenError, GeneratorSpec, Shape};
pub use oracle::{Oracle, TooLarge};
pub use rand_chacha::ChaCha8Rng;

/// The generator used across the kit, seeded.
pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}
