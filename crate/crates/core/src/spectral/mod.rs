//! Functions of Hessian eigenvalues and the boundary functionals built on them.

pub mod boundary;
pub mod identity;
pub mod lstar;
pub mod upoly;
pub mod weight;
pub mod window;

pub use boundary::{
    boundary_b, boundary_b_exact, boundary_b_rational, boundary_functional, boundary_l, boundary_l_exact, BoundaryCase,
    BoundaryFunctionalResult,
};
pub use identity::{case_identity_check, IdentityRecord, ProofRecord};
pub use lstar::{lstar_optimize, LStarResult};
pub use weight::{
    eval_weight, identity_nf, spectral_radius, weight_gradient, weight_laplacian, PairingSums, Spectrum, Tensor3,
    WeightSpec, DELTA_SMOOTH,
};
pub use window::{alpha_min_exact, subsolution_window, Endpoint, SubsolutionWindow};

/// Serializes an optional exact rational as `"p/q"` (or `null`).
pub mod exact_serde {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(r) => s.serialize_str(&r.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        let raw: Option<String> = Option::deserialize(d)?;
        raw.map(|s| s.parse().map_err(serde::de::Error::custom)).transpose()
    }
}

/// Serializes an exact rational as `"p/q"`.
pub mod exact_serde_plain {
    use num_rational::BigRational;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }
}

/// Serializes a list of exact rationals as strings.
pub mod exact_serde_vec_plain {
    use num_rational::BigRational;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| r.to_string()))
    }
}
