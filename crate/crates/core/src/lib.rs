//! Device-to-device private coded caching with a trusted server.
//!
//! The crate has two halves:
//!
//! * an executable half that runs the virtual-user scheme ([`scheme_a`]) and
//!   the two-user redundancy-free scheme ([`scheme_b`]) on real bit buffers
//!   through the trusted-server protocol engine ([`sim`]), then checks
//!   decodability and demand privacy of the produced transcripts
//!   ([`verify`]);
//! * an analytic half that evaluates achievable loads and converse bounds
//!   with exact rationals ([`bounds`], [`combinat`]) so that optimality gaps
//!   can be compared without rounding.
//!
//! Users, files and subfile slots are 1-based everywhere in the public API.
//!
//! ```
//! use d2d_privcache::{model::SystemParams, scheme_a::SchemeAParams, sim};
//!
//! let base = SystemParams::new(2, 3, 1, 7).unwrap();
//! let params = SchemeAParams::new(base, 3).unwrap().fit_file_bits(1);
//! let demands = vec![1, 1].try_into().unwrap();
//! let run = sim::run_protocol(&sim::Scheme::A(params), &demands).unwrap();
//! assert_eq!(sim::measure_load(&run), d2d_privcache::model::rat(1, 3));
//! ```

pub mod bounds;
pub mod cli;
pub mod combinat;
pub mod error;
pub mod model;
pub mod rng;
pub mod scheme_a;
pub mod scheme_b;
pub mod sim;
pub mod verify;

mod decode;

pub use error::{Error, Result};
pub use model::{rat, Rational};
