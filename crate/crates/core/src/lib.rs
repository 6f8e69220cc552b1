pub mod bounds;
pub mod cmperiod;
pub mod colmez;
pub mod error;
pub mod exact;
pub mod heights;
pub mod highprec;
pub mod igusa;
pub mod job;
pub mod siegel;
pub mod theta;

pub use error::{Error, Result};
