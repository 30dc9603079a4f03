//! Minimization of Kripke structures under trace-preserving equivalences.
//!
//! A [`KripkeStructure`] is checked against a [`Partition`] with [`is_kme`]
//! (two-step predecessor reachability) or [`is_wkme`] (the same, up to
//! stutter steps inside a block). Accepted partitions are quotiented with
//! [`kme_quotient`] / [`wkme_quotient`]; [`kme_reduce`] and [`wkme_reduce`]
//! search for small ones. The [`oracles`] module decides trace and
//! stutter-trace equivalence exactly, which is how quotients are validated.

pub mod compose;
pub mod error;
pub mod gen;
pub mod kme;
pub mod kripke;
pub mod oracles;
pub mod partition;
pub mod reduce;
pub mod selftest;
pub mod trace;
pub mod verdict;
pub mod wkme;

pub use compose::{compositionality_check, sync_compose, sync_compose_reachable, CompositionReport};
pub use error::{Error, Result};
pub use gen::gen_random;
pub use kme::{is_kme, kme_quotient, kme_reduce, pbr, star_equivalent, strong_bisim_partition};
pub use kripke::{parse_ks, serialize_ks, KripkeStructure, Label, NormalizeOptions, StateId};
pub use oracles::{stutter_trace_equivalent, trace_equivalent, Equivalence};
pub use partition::{parse_partition, Partition};
pub use reduce::Strategy;
pub use trace::{Lasso, TraceWord};
pub use verdict::{Verdict, Witness, WitnessReport};
pub use wkme::{div_stutter_bisim_partition, is_wkme, odot_equivalent, wkme_quotient, wkme_reduce, wpbr};
