//! Two-party secure computation kernel for mixed-bitwidth fixed-point math.
//!
//! Two parties holding additive shares of fixed-point values over power-of-two
//! rings jointly evaluate math functions (negative exponential, sigmoid,
//! hyperbolic tangent, reciprocal square root) without revealing their
//! inputs. The protocols move between ring widths as precision demands
//! change, built from a small set of share-conversion primitives: comparison,
//! extension, truncation, multiplication with width growth, digit
//! decomposition, and table lookup.
//!
//! The crate layers as follows:
//!
//! - [`ring`]: cleartext power-of-two-ring arithmetic and fixed-point codecs;
//! - [`oracle`]: a double-double real-valued oracle used only for accuracy
//!   measurement and table construction;
//! - [`math`]: kernel parameters, lookup tables, and cleartext reference
//!   pipelines that mirror the protocols operation for operation;
//! - [`transport`]: channels between the parties with exact bit metering;
//! - [`gadgets`]: oblivious-transfer-based primitives (comparison, bit-share
//!   conversion, multiplexing, table lookup);
//! - [`blocks`]: share-conversion building blocks (extension, truncation,
//!   multiplication, digit decomposition, most-significant-bit search);
//! - [`secure`]: the math protocols themselves;
//! - [`cost`]: a closed-form model of every protocol's communication, checked
//!   bit-for-bit against the transport meters;
//! - [`report`]: the pass/fail report structure shared by the harness
//!   commands;
//! - [`par`]: chunked execution helpers, data-parallel when the `parallel`
//!   feature is enabled (the default), sequential otherwise;
//! - [`driver`]: harness entry points shared by the command-line interface
//!   and the test suite.
//!
//! The oblivious transfers are *simulated*: message sizes, round counts, and
//! share distributions are faithful to a real instantiation at the configured
//! security parameter, but the masking uses a shared seed rather than a
//! public-key base protocol, so the artifact measures cost and verifies
//! correctness without providing cryptographic security.

pub mod blocks;
pub mod cost;
pub mod driver;
pub mod error;
pub mod gadgets;
pub mod math;
pub mod oracle;
pub mod par;
mod prg;
pub mod report;
pub mod ring;
pub mod secure;
pub mod transport;

pub use error::{Error, Result};
