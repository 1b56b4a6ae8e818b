pub mod encoding;
pub mod ibe;
pub mod error;
pub mod lattice;
pub mod samplers;
pub mod sigs;

pub use error::{Error, Result};
pub mod commit;
pub mod oracles;
pub mod relations;
pub mod scheme;
pub mod zk;
