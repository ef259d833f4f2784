//! La-cross hypergraph-product codes: construction, circuit-level simulation,
//! BP+OSD decoding, threshold analysis and a Rydberg gate-error model.

pub mod analysis;
pub mod circuit;
pub mod code;
pub mod decoder;
pub mod experiment;
pub mod gf2;
pub mod par;
pub mod rydberg;
pub mod sim;
