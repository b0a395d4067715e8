//! Noisy quantum channels, error metrics, and composite-error bounds.
//!
//! This crate models completely-positive trace-preserving maps in several
//! interchangeable representations (Kraus, chi matrix, Liouville, Choi),
//! computes the scalar noise metrics used by randomized benchmarking
//! (fidelity, infidelity, decay rate, chi00, unitarity, coherence angle),
//! evaluates certified bounds on the metrics of composed channels, and
//! simulates standard and interleaved randomized benchmarking on
//! single-qubit gate sets.
//!
//! Start with the runnable programs under `examples/`, one per capability,
//! or with the `qnoise` command-line tool.

pub mod basis;
pub mod bounds;
pub mod channel;
pub mod cli;
pub mod error;
pub mod figures;
pub mod metrics;
pub mod rb;
pub mod realmat;
pub mod verify;
pub mod zoo;

pub use basis::{BasisKind, OperatorBasis};
pub use channel::{Channel, CptpReport};
pub use error::{Error, Result};
pub use metrics::{ChannelMetrics, Metric, MetricKind};
