pub mod cli_io;
pub mod dynamics;
pub mod error;
pub mod gp_smooth;
pub mod harness;
pub mod policy;
pub mod ppo;
pub mod seed;

pub use error::{Error, Result};
