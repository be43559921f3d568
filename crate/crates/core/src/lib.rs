pub mod benford;
pub mod cli;
pub mod corpus;
pub mod dtm;
pub mod error;
pub mod learn;
pub mod metrics;
pub mod pii;
pub mod poi;
pub mod sentiment;
pub mod synth;
pub mod textpipe;

pub use error::{Error, Result};
