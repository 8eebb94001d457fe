//! Randomized verification of Simons-type inequalities on harmonic
//! polynomials.

pub mod harmonic;
pub mod mpoly;
pub mod verify;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use harmonic::{harmonic_projection, harmonic_subspace_dimension, random_harmonic_poly, HarmonicPoly, Jet};
pub use mpoly::MPoly;
pub use verify::{
    frobenius_identity, frobenius_identity_suite, homogeneous_improved_check, verify_general_inequality, verify_suite,
    IdentityReport, ViolationReport,
};

/// Independent ChaCha stream `stream` of the master seed.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
