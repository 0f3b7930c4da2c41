pub mod baseline;
pub mod bench;
pub mod e2ibs;
pub mod error;
pub mod group;
pub mod hashing;
pub mod protocol;
pub mod robust;
pub mod sim;

pub use error::{Error, Result};
