//! Labeling schemes for rooted forests.
//!
//! * [`forest`] and [`graph`]: the forest model, event streams and
//!   ground-truth oracles.
//! * [`bits`]: exact-width bit-string labels.
//! * [`schemes`]: static encoders and decoders, including the connectivity
//!   wrapper.
//! * [`dynamic`]: online encoders whose labels never change once emitted,
//!   and ancestry adapters over NCA, routing and distance labels.
//! * [`bounds`]: adversarial families and exact lower-bound certification.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod bits;
pub mod bounds;
pub mod dynamic;
pub mod forest;
pub mod graph;
pub mod schemes;

pub use bits::{Label, LabelError};
pub use forest::{
    build_from_events, random_forest, random_stream, EventSequence, ForestError, NodeId,
    QueryAnswer, QueryKind, RootedForest, TopologicalEvent,
};
pub use schemes::{Labeling, SchemeError, StaticScheme};
