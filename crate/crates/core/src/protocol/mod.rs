//! Communication protocols over player valuations.

pub mod cover;
pub mod reduction;
pub mod tree;

pub use tree::{
    leaf_representatives, run_protocol, verify_monochromatic, Event, LeafInfo, LeafLabel, MessageFn, Node,
    ProtocolTree, RectangleFn, Representatives, Run, Transcript,
};
