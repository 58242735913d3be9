//! Nondispersive Bateman–Hillion wave packets.
//!
//! The crate evaluates the localized solutions `u = f(θ)/(√2 ξ₊ − iε)` of the
//! wave equation, their spectral images on the mass shell, propagates them
//! with an exact-in-time spectral integrator, and evaluates the canonical
//! commutation constraints `[Q̂, P̂] = i` that fix the packet amplitude.
//!
//! Runnable examples live in `examples/`; `cargo run --example <name>`.

// `!(x > 0.0)` is deliberate: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::manual_is_multiple_of)]

pub mod cli;
pub mod dynamics;
pub mod envelope;
pub mod error;
pub mod fresnel;
pub mod lightcone;
pub mod packets;
pub mod quadrature;
pub mod quantization;
pub mod spectral;

pub use envelope::{Envelope, EnvelopeFamily, SampledFunction};
pub use error::{Error, Result};
pub use lightcone::{from_light_cone, to_light_cone, LightConePoint};
pub use num_complex::Complex64;
